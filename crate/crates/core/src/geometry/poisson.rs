//! Poisson kernel, its normalization, complex powers and the quadrature grid
//! over `N` used for kernel norms.

use num_complex::Complex64;

use super::{n_mul, GroupElement, NPoint, SpaceParams};
use crate::error::{Error, Result};
use crate::quad::{clustered_edges, gl_on_panels};
use crate::specfun::SpectralPoint;

/// Surface area of the unit sphere in `R^d`.
fn sphere_area(d: u32) -> f64 {
    match d {
        0 => 0.0,
        1 => 2.0,
        2 => 2.0 * std::f64::consts::PI,
        _ => {
            let df = d as f64;
            2.0 * std::f64::consts::PI.powf(df / 2.0)
                / crate::specfun::gamma::gamma_real(df / 2.0)
        }
    }
}

/// Unnormalized Poisson mass `int_N ((1+|V|^2/4)^2 + |Z|^2)^{-Q} dn`
/// by tensor Gauss-Legendre in trigonometric polar variables; `n` points per axis.
fn unnormalized_mass(m: u32, k: u32, q: f64, n: usize) -> f64 {
    // u = 2 tan(theta), v = sec^2(theta) tan(phi); the integrand becomes a
    // trigonometric polynomial: 2^m sin^{m-1} cos^{4Q-2k-m-1}(theta) *
    // sin^{k-1} cos^{2Q-k-1}(phi), times the sphere areas.
    let mf = m as f64;
    let kf = k as f64;
    let theta = gl_on_panels(n, &[0.0, 0.4 * std::f64::consts::FRAC_PI_2, std::f64::consts::FRAC_PI_2]);
    let i_theta: f64 = theta
        .iter()
        .map(|&(th, w)| {
            w * th.sin().powf(mf - 1.0) * th.cos().powf(4.0 * q - 2.0 * kf - mf - 1.0)
        })
        .sum();
    let base = 2.0f64.powi(m as i32) * sphere_area(m) * i_theta;
    if k == 0 {
        return base;
    }
    let phi = gl_on_panels(n, &[0.0, 0.4 * std::f64::consts::FRAC_PI_2, std::f64::consts::FRAC_PI_2]);
    let i_phi: f64 = phi
        .iter()
        .map(|&(ph, w)| w * ph.sin().powf(kf - 1.0) * ph.cos().powf(2.0 * q - kf - 1.0))
        .sum();
    base * sphere_area(k) * i_phi
}

/// Normalization constant `C` with `int_N P_1 = 1`, by polar quadrature
/// cross-checked at two resolutions (relative agreement 1e-9 required).
pub(super) fn compute_normalization(m: u32, k: u32, q: f64) -> Result<f64> {
    let coarse = unnormalized_mass(m, k, q, 40);
    let fine = unnormalized_mass(m, k, q, 56);
    if !(fine.is_finite() && fine > 0.0) || (coarse - fine).abs() > 1e-9 * fine.abs() {
        return Err(Error::QuadratureFailure(format!(
            "poisson normalization did not converge: {coarse} vs {fine}"
        )));
    }
    Ok(1.0 / fine)
}

/// Poisson normalization constant of the space (`int_N P_{a_t} = 1`).
pub fn poisson_normalization(space: &SpaceParams) -> f64 {
    space.poisson_c()
}

/// Poisson kernel `P_{a_t}(n) = C a_t^Q ((a_t + |V|^2/4)^2 + |Z|^2)^{-Q}`,
/// with `a_t = e^t`. Strictly positive.
pub fn poisson_kernel(space: &SpaceParams, t: f64, n: &NPoint) -> f64 {
    let a = t.exp();
    let v2 = n.x.iter().map(|v| v * v).sum::<f64>();
    let z2 = n.y.iter().map(|v| v * v).sum::<f64>();
    let base = (a + 0.25 * v2) * (a + 0.25 * v2) + z2;
    space.poisson_c() * a.powf(space.q()) * base.powf(-space.q())
}

/// Total mass `int_N P_{a_t}(n) dn` by quadrature over the `N`-grid
/// (analytically 1 for every t; the grid does not know that).
pub fn poisson_mass(space: &SpaceParams, t: f64, refine: usize) -> f64 {
    let grid = n_grid(space, refine);
    grid.coords
        .iter()
        .zip(&grid.mass)
        .map(|(&(u, v), &dm)| {
            let a = t.exp();
            let base = (a + 0.25 * u * u) * (a + 0.25 * u * u) + v * v;
            space.poisson_c() * a.powf(space.q()) * base.powf(-space.q()) * dm
        })
        .sum()
}

/// `P(x, n1) = P_{a_t}(n1^{-1} n)` for `x = n a_t`.
pub fn poisson_p(space: &SpaceParams, x: &GroupElement, n1: &NPoint) -> f64 {
    let shifted = n_mul(space, &super::n_inv(space, n1), &x.n);
    poisson_kernel(space, x.t, &shifted)
}

/// Complex-power kernel `P_lambda(x, n) = P(x, n)^{1/2 - i lambda / Q}`.
///
/// The base is positive real, so the principal branch is unambiguous.
/// `P_{i rho} = P` and `P_{-i rho} = 1`.
pub fn p_lambda(
    space: &SpaceParams,
    x: &GroupElement,
    n1: &NPoint,
    lam: SpectralPoint,
) -> Complex64 {
    let base = poisson_p(space, x, n1);
    let exponent = Complex64::new(0.5, 0.0) - Complex64::new(0.0, 1.0) * lam.as_complex() / space.q();
    Complex64::new(base, 0.0).powc(exponent)
}

/// Quadrature grid over `N`: nodes with their `dn`-masses and `P_1` values.
///
/// Carries everything needed to evaluate `int_N P_1^sigma dn`-type integrals
/// and Lebesgue/Lorentz norms of radial kernels over `(N, dn)` or `(N, P_1 dn)`.
#[derive(Debug, Clone)]
pub struct NGrid {
    /// Polar coordinates `(|V|, |Z|)` of each node.
    pub coords: Vec<(f64, f64)>,
    /// `P_1` at each node.
    pub p1: Vec<f64>,
    /// `dn`-mass attached to each node.
    pub mass: Vec<f64>,
}

/// Builds the `N`-grid at a refinement level (1 = base, 2 = doubled panels).
pub fn n_grid(space: &SpaceParams, refine: usize) -> NGrid {
    let m = space.m();
    let k = space.k();
    let q = space.q();
    let c = space.poisson_c();
    let mf = m as f64;
    let kf = k as f64;
    let panels = 20 * refine.max(1);
    let nodes = 14;
    let theta_pts = gl_on_panels(nodes, &clustered_edges(std::f64::consts::FRAC_PI_2, panels));
    let mut coords = Vec::new();
    let mut p1 = Vec::new();
    let mut mass = Vec::new();
    if k == 0 {
        for &(th, w) in &theta_pts {
            let (s, co) = (th.sin(), th.cos());
            if co <= 0.0 {
                continue;
            }
            // mass = S_{m-1} 2^m tan^{m-1} sec^2 d(theta)
            let dm = sphere_area(m) * 2.0f64.powi(m as i32) * (s / co).powf(mf - 1.0) / (co * co) * w;
            coords.push((2.0 * s / co, 0.0));
            p1.push(c * co.powf(4.0 * q));
            mass.push(dm);
        }
    } else {
        let phi_pts = gl_on_panels(nodes, &clustered_edges(std::f64::consts::FRAC_PI_2, panels));
        for &(th, wt) in &theta_pts {
            let (st, ct) = (th.sin(), th.cos());
            if ct <= 0.0 {
                continue;
            }
            let theta_factor =
                sphere_area(m) * 2.0f64.powi(m as i32) * (st / ct).powf(mf - 1.0) * ct.powf(-2.0 * kf - 2.0) * wt;
            let sec2t = 1.0 / (ct * ct);
            for &(ph, wp) in &phi_pts {
                let (sp, cp) = (ph.sin(), ph.cos());
                if cp <= 0.0 {
                    continue;
                }
                let phi_factor = sphere_area(k) * (sp / cp).powf(kf - 1.0) / (cp * cp) * wp;
                coords.push((2.0 * st / ct, sec2t * sp / cp));
                p1.push(c * ct.powf(4.0 * q) * cp.powf(2.0 * q));
                mass.push(theta_factor * phi_factor);
            }
        }
    }
    NGrid { coords, p1, mass }
}

impl NGrid {
    /// `int_N P_1^sigma dn`; diverges (returns Err) unless `sigma > 1/2`.
    pub fn p1_power_mass(&self, sigma: f64) -> Result<f64> {
        if sigma <= 0.5 {
            return Err(Error::DivergentRegime(format!(
                "int_N P_1^sigma dn diverges for sigma = {sigma:.4} <= 1/2"
            )));
        }
        Ok(self
            .p1
            .iter()
            .zip(&self.mass)
            .map(|(p, m)| p.powf(sigma) * m)
            .sum())
    }
}
