//! The spherical mean operator `M_t` realized as the Fourier multiplier
//! `phi_lambda(t)`, its operator bound, and the spherical modulus of
//! continuity.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::norms::{gamma_p, lorentz_norm, LorentzIndex};
use crate::specfun::{phi_dr, SpectralPoint};
use crate::transforms::{DecayClass, RadialProfile, TransformPlan};

/// Sweep configuration for mean-based tables.
#[derive(Debug, Clone)]
pub struct MeanConfig {
    t_grid: Vec<f64>,
    sup_refinements: usize,
}

impl MeanConfig {
    pub fn new(t_grid: Vec<f64>, sup_refinements: usize) -> Result<Self> {
        if t_grid.is_empty() || t_grid[0] <= 0.0 || t_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("MeanConfig: t_grid must be increasing and positive"));
        }
        Ok(MeanConfig {
            t_grid,
            sup_refinements,
        })
    }

    pub fn t_grid(&self) -> &[f64] {
        &self.t_grid
    }

    pub fn sup_refinements(&self) -> usize {
        self.sup_refinements
    }
}

fn multiplier(plan: &TransformPlan, t: f64) -> Result<Vec<Complex64>> {
    use rayon::prelude::*;
    plan.spectral()
        .xi()
        .par_iter()
        .map(|&x| phi_dr(plan.space(), SpectralPoint::new(x, plan.spectral().eta()), t))
        .collect()
}

fn mean_decay_class(f: &RadialProfile, t: f64, r_max: f64) -> DecayClass {
    match *f.decay_class() {
        DecayClass::Compact { support } => DecayClass::Compact {
            support: (support + t).min(r_max),
        },
        other => other,
    }
}

/// Spherical mean `M_t f` of a radial profile, computed spectrally:
/// the inverse transform of `f^(xi) phi_xi(t)`. `M_0 f = f`.
pub fn spherical_mean(plan: &TransformPlan, f: &RadialProfile, t: f64) -> Result<RadialProfile> {
    if t < 0.0 {
        return Err(Error::invalid("spherical_mean: t must be nonnegative"));
    }
    if t == 0.0 {
        return Ok(f.clone());
    }
    let spectrum = plan.forward(f)?;
    let mult = multiplier(plan, t)?;
    let shifted: Vec<Complex64> = spectrum.iter().zip(&mult).map(|(a, b)| a * b).collect();
    plan.inverse_profile(&shifted, mean_decay_class(f, t, plan.config().r_max))
}

/// Values of `M_t f - f` on the plan grid, computed through the single
/// multiplier `phi_xi(t) - 1` so the inversion bias cancels in the
/// difference.
pub fn spherical_mean_deviation(
    plan: &TransformPlan,
    f: &RadialProfile,
    t: f64,
) -> Result<Vec<Complex64>> {
    if t == 0.0 {
        return Ok(vec![Complex64::new(0.0, 0.0); f.values().len()]);
    }
    let spectrum = plan.forward(f)?;
    let mult = multiplier(plan, t)?;
    let shifted: Vec<Complex64> = spectrum
        .iter()
        .zip(&mult)
        .map(|(a, b)| a * (b - 1.0))
        .collect();
    plan.inverse_values(&shifted)
}

/// Operator norm bound of `M_t` on `L^p`: `phi_{i gamma_p rho}(a_t)`.
///
/// For `p = 1` the bound is exactly 1; for `p > 2` the bound equals the one
/// for the conjugate exponent by evenness of `phi` in `lambda`.
pub fn mean_operator_bound(space: &crate::SpaceParams, p: f64, t: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::invalid("mean_operator_bound: p must be >= 1"));
    }
    if t < 0.0 {
        return Err(Error::invalid("mean_operator_bound: t must be nonnegative"));
    }
    let g = gamma_p(p).abs();
    if (g - 1.0).abs() < 1e-15 {
        return Ok(1.0);
    }
    let v = phi_dr(space, SpectralPoint::new(0.0, g * space.rho()), t)?;
    Ok(v.re)
}

/// Norm model for radial data: midpoints of a 3x subdivision of the grid
/// cells, with piecewise-linear interpolation. Rearrangement-based norms of
/// node-mass data carry an O(h/r) bias where the measure is thin; the
/// subdivision keeps Lorentz moduli stable under grid refinement.
fn subdivided_norm_model(plan: &TransformPlan) -> (Vec<(usize, usize, f64)>, crate::norms::WeightedGrid) {
    const SUB: usize = 3;
    let r = plan.radial_grid();
    let n = r.len();
    let r_max = plan.config().r_max;
    let space = plan.space();
    let boundary = |j: usize| -> f64 {
        if j == 0 {
            0.0
        } else if j == n {
            r_max
        } else {
            0.5 * (r[j - 1] + r[j])
        }
    };
    let mut interp = Vec::with_capacity(n * SUB);
    let mut pts = Vec::with_capacity(n * SUB);
    let mut mass = Vec::with_capacity(n * SUB);
    for j in 0..n {
        let (lo, hi) = (boundary(j), boundary(j + 1));
        for s in 0..SUB {
            let a = lo + (hi - lo) * s as f64 / SUB as f64;
            let b = lo + (hi - lo) * (s + 1) as f64 / SUB as f64;
            let mid = 0.5 * (a + b);
            // neighbours bracketing mid
            let hi_idx = r.partition_point(|&x| x < mid).min(n - 1);
            let lo_idx = hi_idx.saturating_sub(1);
            let w = if hi_idx == lo_idx || r[hi_idx] == r[lo_idx] {
                0.0
            } else {
                ((mid - r[lo_idx]) / (r[hi_idx] - r[lo_idx])).clamp(0.0, 1.0)
            };
            interp.push((lo_idx, hi_idx, w));
            pts.push(mid);
            mass.push(crate::geometry::radial_density(space, mid).max(1e-300) * (b - a));
        }
    }
    let grid = crate::norms::WeightedGrid::new(pts, mass).expect("positive subcell masses");
    (interp, grid)
}

/// Spherical modulus of continuity
/// `Omega_{p,q}[f](r) = sup_{0 < t <= r} || M_t f - f ||_{p,q}`,
/// by a geometric grid sup with local refinement until stable to 1%.
pub fn modulus_of_continuity(
    plan: &TransformPlan,
    f: &RadialProfile,
    idx: LorentzIndex,
    r: f64,
) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::invalid("modulus_of_continuity: r must be positive"));
    }
    let (interp, grid) = subdivided_norm_model(plan);
    let norm_at = |t: f64| -> Result<f64> {
        let dev = spherical_mean_deviation(plan, f, t)?;
        let mags: Vec<f64> = interp
            .iter()
            .map(|&(lo, hi, w)| (dev[lo] * (1.0 - w) + dev[hi] * w).norm())
            .collect();
        Ok(lorentz_norm(&mags, &grid, idx))
    };
    // Geometric sweep down from r.
    let ratio = 1.25f64;
    let mut ts = Vec::new();
    let mut t = r;
    while t > r / 60.0 {
        ts.push(t);
        t /= ratio;
    }
    let mut best_t = r;
    let mut best = 0.0f64;
    for &t in &ts {
        let v = norm_at(t)?;
        if v > best {
            best = v;
            best_t = t;
        }
    }
    // Refine around the argmax until the sup is stable to 1%.
    let mut lo = (best_t / ratio).max(r / 600.0);
    let mut hi = (best_t * ratio).min(r);
    for _ in 0..4 {
        let mut improved = best;
        let mut arg = best_t;
        for i in 0..=8 {
            let t = lo + (hi - lo) * i as f64 / 8.0;
            if t <= 0.0 || t > r {
                continue;
            }
            let v = norm_at(t)?;
            if v > improved {
                improved = v;
                arg = t;
            }
        }
        if improved <= best * 1.01 {
            best = best.max(improved);
            break;
        }
        best = improved;
        best_t = arg;
        let span = (hi - lo) / 4.0;
        lo = (best_t - span).max(r / 600.0);
        hi = (best_t + span).min(r);
    }
    Ok(best)
}

/// One row of a decay sweep.
#[derive(Debug, Clone, Copy)]
pub struct DecayRow {
    pub t: f64,
    /// `phi_{i gamma_p rho}(t)`.
    pub bound: f64,
    /// `bound * e^{(2 rho / p') t}`: compensated profile.
    pub compensated: f64,
}

/// Decay table of the mean operator bound against its exponential rate
/// `e^{-(2 rho / p') t}` for `p` in `[1, 2]`.
#[derive(Debug, Clone)]
pub struct DecayTable {
    pub p: f64,
    pub rows: Vec<DecayRow>,
}

impl DecayTable {
    /// Max/min ratio of the compensated column.
    pub fn compensated_spread(&self) -> f64 {
        let mut lo = f64::INFINITY;
        let mut hi = 0.0f64;
        for row in &self.rows {
            lo = lo.min(row.compensated);
            hi = hi.max(row.compensated);
        }
        hi / lo
    }

    /// Least-squares slope of `ln(compensated)` against `ln t` (polynomial
    /// correction order; ~1 at p = 2, ~0 for p < 2).
    pub fn log_slope(&self) -> f64 {
        let n = self.rows.len() as f64;
        let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
        for row in &self.rows {
            let x = row.t.ln();
            let y = row.compensated.ln();
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
        }
        (n * sxy - sx * sy) / (n * sxx - sx * sx)
    }

    /// CSV with header `t,bound,norm,ratio`: compensated value and its ratio
    /// to the first row.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,bound,norm,ratio\n");
        let first = self.rows.first().map(|r| r.compensated).unwrap_or(1.0);
        for row in &self.rows {
            out.push_str(&format!(
                "{:.12e},{:.12e},{:.12e},{:.12e}\n",
                row.t,
                row.bound,
                row.compensated,
                row.compensated / first
            ));
        }
        out
    }
}

/// Sweeps the operator bound over a time grid for `p` in `[1, 2]`.
pub fn decay_profile(space: &crate::SpaceParams, p: f64, config: &MeanConfig) -> Result<DecayTable> {
    if !(1.0..=2.0).contains(&p) {
        return Err(Error::invalid("decay_profile: p must lie in [1, 2]"));
    }
    let rate = 2.0 * space.rho() * (1.0 - 1.0 / p); // 2 rho / p'
    let rows = config
        .t_grid()
        .iter()
        .map(|&t| {
            let bound = mean_operator_bound(space, p, t)?;
            Ok(DecayRow {
                t,
                bound,
                compensated: bound * (rate * t).exp(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DecayTable { p, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norms::lp_norm;
    use crate::transforms::PlanConfig;
    use crate::SpaceParams;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn plan(space: &SpaceParams) -> TransformPlan {
        let mut p = TransformPlan::new(
            space,
            PlanConfig {
                r_max: 14.0,
                xi_max: 24.0,
                eta: 0.0,
                refine: 1,
            },
        )
        .unwrap();
        p.calibrate().unwrap();
        p
    }

    fn gaussian(plan: &TransformPlan) -> RadialProfile {
        plan.profile_from_fn(DecayClass::Gaussian { width: 1.0 }, |r| {
            Complex64::new((-r * r).exp(), 0.0)
        })
        .unwrap()
    }

    #[test]
    fn identity_at_t_zero() {
        let s = SpaceParams::new(2, 1).unwrap();
        let p = plan(&s);
        let f = gaussian(&p);
        let m0 = spherical_mean(&p, &f, 0.0).unwrap();
        for (a, b) in m0.values().iter().zip(f.values()) {
            assert!((a - b).norm() <= 1e-6 * b.norm().max(1e-9));
        }
    }

    #[test]
    fn mass_preserved_for_nonnegative_f() {
        // int M_t f A dr = phi_{-i rho}(t) int f A dr = int f A dr.
        let s = SpaceParams::new(2, 1).unwrap();
        let p = plan(&s);
        let f = gaussian(&p);
        let mt = spherical_mean(&p, &f, 1.0).unwrap();
        let mass = |g: &RadialProfile| -> f64 {
            g.values()
                .iter()
                .zip(g.measure_weights())
                .map(|(v, w)| v.re * w)
                .sum()
        };
        assert_relative_eq!(mass(&mt), mass(&f), max_relative = 1e-5);
    }

    #[test]
    fn multiplier_identity_roundtrip() {
        // (M_t f)^(lambda) = f^(lambda) phi_lambda(t) on the real grid.
        let s = SpaceParams::new(2, 1).unwrap();
        let p = plan(&s);
        let f = gaussian(&p);
        let t = 0.8;
        let mt = spherical_mean(&p, &f, t).unwrap();
        let lhs = p.forward(&mt).unwrap();
        let fhat = p.forward(&f).unwrap();
        let peak = fhat.iter().fold(0.0f64, |a, v| a.max(v.norm()));
        for ((l, fh), &x) in lhs.iter().zip(&fhat).zip(p.spectral().xi()) {
            let phi = phi_dr(&s, SpectralPoint::real(x), t).unwrap();
            assert!(
                (l - fh * phi).norm() <= 1e-5 * peak,
                "multiplier identity fails at xi = {x}"
            );
        }
    }

    #[test]
    fn means_commute() {
        let s = SpaceParams::new(2, 1).unwrap();
        let p = plan(&s);
        let f = gaussian(&p);
        let a = spherical_mean(&p, &spherical_mean(&p, &f, 0.7).unwrap(), 1.3).unwrap();
        let b = spherical_mean(&p, &spherical_mean(&p, &f, 1.3).unwrap(), 0.7).unwrap();
        let grid = f.weighted_grid();
        let diff: Vec<f64> = a
            .values()
            .iter()
            .zip(b.values())
            .map(|(x, y)| (x - y).norm())
            .collect();
        let scale = lp_norm(&f.magnitudes(), &grid, 2.0);
        assert!(lp_norm(&diff, &grid, 2.0) <= 1e-5 * scale);
    }

    #[test]
    fn operator_bound_values() {
        let s = SpaceParams::new(2, 1).unwrap();
        // p = 1: bound exactly 1.
        assert_eq!(mean_operator_bound(&s, 1.0, 2.0).unwrap(), 1.0);
        // p = 2: phi_0(t) < 1 strictly for t > 0.
        for &t in &[0.3, 1.0, 3.0] {
            let b = mean_operator_bound(&s, 2.0, t).unwrap();
            assert!(b < 1.0 && b > 0.0, "phi_0({t}) = {b}");
        }
        // Conjugate exponents share the bound.
        for &t in &[0.5, 2.0] {
            let b43 = mean_operator_bound(&s, 4.0 / 3.0, t).unwrap();
            let b4 = mean_operator_bound(&s, 4.0, t).unwrap();
            assert_relative_eq!(b43, b4, max_relative = 1e-10);
        }
    }

    #[test]
    fn bound_strictly_decreasing_in_t() {
        let s = SpaceParams::new(2, 0).unwrap();
        let mut last = 1.0;
        for &t in &[0.5, 1.0, 2.0, 4.0, 8.0] {
            let b = mean_operator_bound(&s, 2.0, t).unwrap();
            assert!(b < last, "phi_0 not decreasing at t = {t}");
            last = b;
        }
    }

    #[test]
    fn contraction_on_gaussian() {
        let s = SpaceParams::new(2, 1).unwrap();
        let p = plan(&s);
        let f = gaussian(&p);
        let grid = f.weighted_grid();
        for &pp in &[1.0, 4.0 / 3.0, 2.0, 3.0, 8.0] {
            for &t in &[0.25, 1.0, 3.0] {
                let mt = spherical_mean(&p, &f, t).unwrap();
                let lhs = lp_norm(&mt.magnitudes(), &grid, pp);
                let rhs = mean_operator_bound(&s, pp, t).unwrap() * lp_norm(&f.magnitudes(), &grid, pp);
                assert!(
                    lhs <= rhs * (1.0 + 1e-4),
                    "contraction violated: p={pp}, t={t}: {lhs} vs {rhs}"
                );
            }
        }
    }

    #[test]
    fn modulus_monotone_and_vanishing() {
        let s = SpaceParams::new(2, 1).unwrap();
        let p = plan(&s);
        let f = gaussian(&p);
        let idx = LorentzIndex::new(2.0, 2.0).unwrap();
        let o_small = modulus_of_continuity(&p, &f, idx, 0.05).unwrap();
        let o_mid = modulus_of_continuity(&p, &f, idx, 0.4).unwrap();
        let o_big = modulus_of_continuity(&p, &f, idx, 1.5).unwrap();
        assert!(o_small <= o_mid * (1.0 + 1e-9) && o_mid <= o_big * (1.0 + 1e-9));
        // Omega -> 0 as r -> 0 for smooth profiles.
        assert!(o_small < 0.2 * o_big);
        // Omega_{p,p} agrees with the plain L^p modulus on the grid sweep.
        let dev = spherical_mean_deviation(&p, &f, 0.4).unwrap();
        let mags: Vec<f64> = dev.iter().map(|v| v.norm()).collect();
        let lp = lp_norm(&mags, &f.weighted_grid(), 2.0);
        assert!(o_mid >= lp * (1.0 - 1e-9));
    }

    #[test]
    fn decay_table_shapes() {
        let s = SpaceParams::new(2, 1).unwrap();
        let grid: Vec<f64> = (0..17).map(|i| 2.0 + 0.5 * i as f64).collect();
        let cfg = MeanConfig::new(grid, 1).unwrap();
        // p = 1: bound identically 1, rate 0.
        let t1 = decay_profile(&s, 1.0, &cfg).unwrap();
        for row in &t1.rows {
            assert_abs_diff_eq!(row.bound, 1.0, epsilon = 1e-9);
            assert_abs_diff_eq!(row.compensated, 1.0, epsilon = 1e-9);
        }
        // p = 4/3: compensated profile flat within a factor 10.
        let t43 = decay_profile(&s, 4.0 / 3.0, &cfg).unwrap();
        assert!(t43.compensated_spread() <= 10.0);
        // p = 2: compensated grows like t (slower than t^2).
        let t2 = decay_profile(&s, 2.0, &cfg).unwrap();
        let slope = t2.log_slope();
        assert!(slope > 0.3 && slope < 2.0, "log-log slope {slope}");
    }
}
