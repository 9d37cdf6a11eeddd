//! Analytic kernels: complex Gamma, Gauss hypergeometric, normalized Bessel,
//! Jacobi/spherical functions, the c-function and the Plancherel density.

pub mod bessel;
pub mod gamma;
pub mod hyp2f1;
pub mod jacobi;

pub use bessel::bessel_j_normalized;
pub use gamma::{gamma_complex, ln_gamma_complex, recip_gamma_complex};
pub use hyp2f1::gauss_2f1;
pub use jacobi::{c_function, jacobi_phi, jacobi_phi_many, plancherel_density, JacobiParams, SpectralPoint};

use num_complex::Complex64;

use crate::error::Result;
use crate::geometry::SpaceParams;

/// Spherical function of the space at `a_t`, `phi_lambda(a_t)`.
///
/// Realized through the Jacobi function at doubled spectral parameter and
/// half radius, the unique rescaling with Laplace-Beltrami eigenvalue
/// `-(lambda^2 + rho^2)` and `phi_{-i rho} = 1`. Even in `lambda`.
pub fn phi_dr(space: &SpaceParams, lam: SpectralPoint, t: f64) -> Result<Complex64> {
    let jp = space.jacobi_params();
    jacobi_phi(
        &jp,
        SpectralPoint::new(2.0 * lam.xi(), 2.0 * lam.eta()),
        0.5 * t,
    )
}

/// `phi_lambda(a_t)` at many radii (sorted ascending) in one pass.
pub fn phi_dr_many(space: &SpaceParams, lam: SpectralPoint, t: &[f64]) -> Result<Vec<Complex64>> {
    let jp = space.jacobi_params();
    let half: Vec<f64> = t.iter().map(|&x| 0.5 * x).collect();
    jacobi_phi_many(
        &jp,
        SpectralPoint::new(2.0 * lam.xi(), 2.0 * lam.eta()),
        &half,
    )
}

#[cfg(test)]
mod invariant_tests {
    use super::*;
    use crate::norms::gamma_p;
    use crate::SpaceParams;

    #[test]
    fn strip_bound_is_constant_free() {
        // |phi_lambda(t)| <= phi_{i gamma_p rho}(t) + 1e-9 inside the strip.
        let space = SpaceParams::new(2, 1).unwrap();
        for &p in &[1.2, 4.0 / 3.0, 2.0] {
            let edge = gamma_p(p) * space.rho();
            for &t in &[0.5, 1.5, 4.0, 8.0] {
                let bound = phi_dr(&space, SpectralPoint::new(0.0, edge), t)
                    .unwrap()
                    .re;
                for &xi in &[0.0, 0.7, 2.0, 9.0] {
                    for &frac in &[0.0, 0.45, -0.45, 0.9, -0.9] {
                        let v = phi_dr(&space, SpectralPoint::new(xi, frac * edge), t).unwrap();
                        assert!(
                            v.norm() <= bound + 1e-9,
                            "p={p}, t={t}, xi={xi}, eta={}: |phi| {} > bound {}",
                            frac * edge,
                            v.norm(),
                            bound
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn dr_eigenvalue_identity_with_radial_density() {
        // |phi'' + (A'/A) phi' + (lambda^2 + rho^2) phi| <= 1e-5 with A from
        // the geometry module; fourth-order stencils, step 1e-4.
        let h = 1e-4;
        for space in [SpaceParams::new(2, 1).unwrap(), SpaceParams::new(2, 0).unwrap()] {
            let rho = space.rho();
            for &(xi, eta) in &[(1.0, 0.0), (6.0, 0.4), (15.0, -rho)] {
                let lam = SpectralPoint::new(xi, eta);
                let lam2 = lam.as_complex() * lam.as_complex() + rho * rho;
                for &t in &[0.1, 0.9, 2.2, 6.0] {
                    let pts = [t - 2.0 * h, t - h, t, t + h, t + 2.0 * h];
                    let f = phi_dr_many(&space, lam, &pts).unwrap();
                    let d1 = (-f[4] + f[3] * 8.0 - f[1] * 8.0 + f[0]) / (12.0 * h);
                    let d2 =
                        (-f[4] + f[3] * 16.0 - f[2] * 30.0 + f[1] * 16.0 - f[0]) / (12.0 * h * h);
                    let w = crate::geometry::radial_log_density_derivative(&space, t);
                    let res = (d2 + d1 * w + f[2] * lam2).norm();
                    assert!(
                        res <= 1e-5,
                        "{} lam={xi}+{eta}i t={t}: residual {res:.2e}",
                        space.tag()
                    );
                }
            }
        }
    }
}
