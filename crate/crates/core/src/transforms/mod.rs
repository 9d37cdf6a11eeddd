//! Spherical (Jacobi) transform and inverse for radial profiles, Helgason-type
//! Fourier transform values, and weighted kernel norms over `N`.

mod plan;
mod profile;

pub use plan::{PlanConfig, SpectralGrid, TransformPlan};
pub use profile::{DecayClass, ProfileMeta, RadialProfile};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::error::{Error, Result};
use crate::geometry::{p_lambda, GroupElement, NGrid, NPoint, SpaceParams};
use crate::specfun::{phi_dr_many, SpectralPoint};

/// Admissibility of `int f phi_lambda A dr` for the declared decay class:
/// the integrand decays like `e^{(|eta| + rho - rate) r}` for exponential-class
/// profiles, so the strip line must satisfy `|eta| + rho < rate`.
pub(crate) fn check_transform_regime(
    space: &SpaceParams,
    decay: &DecayClass,
    eta: f64,
) -> Result<()> {
    if let DecayClass::Exponential { rate, power } = decay {
        let exponent = eta.abs() + space.rho() - rate;
        // Strictly inside the admissible strip the exponential wins; exactly
        // on the boundary a polynomial factor beyond the first power is
        // required for absolute convergence.
        let divergent = exponent > 1e-9 || (exponent.abs() <= 1e-9 && *power <= 2.0);
        if divergent {
            return Err(Error::DivergentRegime(format!(
                "transform diverges: profile decay rate {rate:.4} (power {power:.1}) \
                 against |eta| + rho = {:.4}",
                eta.abs() + space.rho()
            )));
        }
    }
    Ok(())
}

/// Spherical transform `int_0^inf f(r) phi_lambda(r) A(r) dr` of a radial
/// profile by quadrature on its own grid.
pub fn spherical_transform(
    space: &SpaceParams,
    f: &RadialProfile,
    lam: SpectralPoint,
) -> Result<Complex64> {
    check_transform_regime(space, f.decay_class(), lam.eta())?;
    let phi = phi_dr_many(space, lam, f.grid())?;
    Ok(f
        .values()
        .iter()
        .zip(phi.iter())
        .zip(f.measure_weights())
        .map(|((v, p), w)| v * p * w)
        .sum())
}

/// Helgason-type Fourier transform of a radial profile:
/// `f~(lambda, n) = f^(lambda) P_lambda(e, n)`.
pub fn helgason_ft_radial(
    space: &SpaceParams,
    f: &RadialProfile,
    lam: SpectralPoint,
    n: &NPoint,
) -> Result<Complex64> {
    let fhat = spherical_transform(space, f, lam)?;
    Ok(fhat * p_lambda(space, &GroupElement::identity(space), n, lam))
}

/// Support box of a black-box function on the group.
#[derive(Debug, Clone, Copy)]
pub struct SupportBox {
    pub radius_x: f64,
    pub radius_z: f64,
    pub s_min: f64,
    pub s_max: f64,
}

/// A Monte-Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy)]
pub struct McEstimate {
    pub value: Complex64,
    pub std_error: f64,
}

/// Helgason-type Fourier transform of a black-box function by Monte-Carlo
/// integration of `int_S f(x) P_lambda(x, n) dx` with left Haar measure over
/// the declared support box. Deterministic given `seed`.
pub fn helgason_ft_general<F>(
    space: &SpaceParams,
    f: F,
    support: SupportBox,
    lam: SpectralPoint,
    n1: &NPoint,
    budget: usize,
    seed: u64,
) -> Result<McEstimate>
where
    F: Fn(&GroupElement) -> Complex64,
{
    if budget < 100 {
        return Err(Error::invalid("helgason_ft_general: budget too small"));
    }
    if !(support.s_max > support.s_min) || support.radius_x <= 0.0 {
        return Err(Error::invalid("helgason_ft_general: empty support box"));
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let m = space.m();
    let k = space.k();
    let vol_x = ball_volume(m, support.radius_x);
    let vol_z = ball_volume(k, support.radius_z);
    let vol = (support.s_max - support.s_min) * vol_x * vol_z;
    let mut sum = Complex64::new(0.0, 0.0);
    let mut sum2 = 0.0f64;
    let mut xbuf = Vec::new();
    let mut ybuf = Vec::new();
    for _ in 0..budget {
        let s = support.s_min + (support.s_max - support.s_min) * rng.random::<f64>();
        sample_ball(&mut rng, m, support.radius_x, &mut xbuf);
        sample_ball(&mut rng, k, support.radius_z, &mut ybuf);
        let g = GroupElement {
            n: NPoint {
                x: xbuf.clone(),
                y: ybuf.clone(),
            },
            t: s,
        };
        let haar = (-2.0 * space.rho() * s).exp();
        let val = f(&g) * p_lambda(space, &g, n1, lam) * haar;
        sum += val;
        sum2 += val.norm_sqr();
    }
    let n = budget as f64;
    let mean = sum / n;
    let var = (sum2 / n - mean.norm_sqr()).max(0.0);
    Ok(McEstimate {
        value: mean * vol,
        std_error: vol * (var / n).sqrt(),
    })
}

fn ball_volume(d: u32, r: f64) -> f64 {
    match d {
        0 => 1.0,
        1 => 2.0 * r,
        2 => std::f64::consts::PI * r * r,
        _ => {
            let df = d as f64;
            std::f64::consts::PI.powf(df / 2.0) / crate::specfun::gamma::gamma_real(df / 2.0 + 1.0)
                * r.powf(df)
        }
    }
}

fn sample_ball(rng: &mut ChaCha12Rng, d: u32, r: f64, out: &mut Vec<f64>) {
    out.clear();
    if d == 0 {
        return;
    }
    if d == 1 {
        out.push(r * (2.0 * rng.random::<f64>() - 1.0));
        return;
    }
    for _ in 0..d.div_ceil(2) {
        let u1: f64 = rng.random::<f64>().max(1e-300);
        let u2: f64 = rng.random();
        let mag = (-2.0 * u1.ln()).sqrt();
        let (sn, cs) = (2.0 * std::f64::consts::PI * u2).sin_cos();
        out.push(mag * cs);
        out.push(mag * sn);
    }
    out.truncate(d as usize);
    let norm2: f64 = out.iter().map(|v| v * v).sum();
    let scale = r * rng.random::<f64>().powf(1.0 / d as f64) / norm2.sqrt().max(1e-300);
    for v in out.iter_mut() {
        *v *= scale;
    }
}

/// Norm of the kernel `n -> P_lambda(e, n)` in `L^q(N, w)` with `w = P_1`
/// (weighted) or `w = 1`:  the radial-reduction factor of every restriction
/// and Hausdorff-Young check.
///
/// Uses `|P_lambda(e, n)| = P_1(n)^{1/2 + eta/Q}`, so the integral is a
/// `P_1`-power mass over the `N`-grid. Divergent exponent regimes are
/// rejected with the failing exponent named.
pub fn n_norm_of_kernel(
    space: &SpaceParams,
    lam: SpectralPoint,
    q: f64,
    weighted: bool,
    grid: &NGrid,
) -> Result<f64> {
    if !(q >= 1.0) {
        return Err(Error::invalid("n_norm_of_kernel: q must be >= 1"));
    }
    let tau = 0.5 + lam.eta() / space.q();
    let sigma = q * tau + if weighted { 1.0 } else { 0.0 };
    let mass = grid.p1_power_mass(sigma).map_err(|_| {
        Error::DivergentRegime(format!(
            "int_N |P_lambda|^q {} dn diverges: total P_1-exponent {sigma:.4} <= 1/2 \
             (q = {q}, eta = {}, tau = {tau:.4})",
            if weighted { "P_1" } else { "" },
            lam.eta()
        ))
    })?;
    Ok(mass.powf(1.0 / q))
}


#[cfg(test)]
mod translate_tests {
    use super::*;
    use crate::geometry::group_mul;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;

    #[test]
    fn right_translate_scales_haar_mass() {
        // int_S f(x y) dx = e^{2 rho A(y)} int_S f(x) dx, Monte-Carlo.
        let s = SpaceParams::new(2, 1).unwrap();
        let f = |g: &GroupElement| {
            let x2: f64 = g.n.x.iter().map(|v| v * v).sum();
            let z2: f64 = g.n.y.iter().map(|v| v * v).sum();
            (-(x2 + z2 + g.t * g.t)).exp()
        };
        let y = GroupElement::new(NPoint::new(&s, vec![0.4, -0.1], vec![0.2]), 0.6);
        let mut rng = ChaCha12Rng::seed_from_u64(23);
        let box_r: f64 = 4.0;
        let vol = (2.0 * box_r).powi(4);
        let n_samples = 500_000;
        let (mut lhs, mut lhs2, mut rhs, mut rhs2) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
        for _ in 0..n_samples {
            let g = GroupElement {
                n: NPoint {
                    x: vec![
                        box_r * (2.0 * rng.random::<f64>() - 1.0),
                        box_r * (2.0 * rng.random::<f64>() - 1.0),
                    ],
                    y: vec![box_r * (2.0 * rng.random::<f64>() - 1.0)],
                },
                t: box_r * (2.0 * rng.random::<f64>() - 1.0),
            };
            let haar = (-2.0 * s.rho() * g.t).exp();
            let a = f(&group_mul(&s, &g, &y)) * haar;
            let b = f(&g) * haar;
            lhs += a;
            lhs2 += a * a;
            rhs += b;
            rhs2 += b * b;
        }
        let nf = n_samples as f64;
        let scale = (2.0 * s.rho() * y.t).exp();
        let l = vol * lhs / nf;
        let r = vol * rhs / nf * scale;
        let se = vol * ((lhs2 / nf - (lhs / nf) * (lhs / nf)) / nf).sqrt()
            + vol * ((rhs2 / nf - (rhs / nf) * (rhs / nf)) / nf).sqrt() * scale;
        assert!(
            (l - r).abs() <= 3.0 * se + 1e-3 * r.abs(),
            "{l} vs {r} (se {se:.2e})"
        );
    }
}
