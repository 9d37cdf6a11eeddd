//! Monte-Carlo shell averages: the numerical realization of the
//! radialization operator.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use super::{distance, GroupElement, NPoint, SpaceParams};
use crate::error::{Error, Result};

/// Result of one shell-average estimate.
#[derive(Debug, Clone, Copy)]
pub struct ShellEstimate {
    pub value: Complex64,
    pub std_error: f64,
    /// Samples contributing to the estimate.
    pub accepted: usize,
}

/// Per-slice bounding radii for the outer surface `d <= t_outer` at height s.
fn slice_bounds(t_outer: f64, s: f64) -> (f64, f64) {
    let ch_t = (0.5 * t_outer).cosh();
    let ch_s = (0.5 * s).cosh();
    if ch_t <= ch_s {
        return (0.0, 0.0);
    }
    let u_max = (8.0 * (0.5 * s).exp() * (ch_t - ch_s)).sqrt();
    let z_max = 2.0 * (0.5 * s).exp() * (ch_t * ch_t - ch_s * ch_s).sqrt();
    (u_max, z_max)
}

/// `|Z|`-interval of the shell `t_in <= d <= t_out` at height `s`, radius `u`.
/// Returns `(z_lo, z_hi)` with `z_hi <= z_lo` meaning an empty slice.
fn z_interval(t_in: f64, t_out: f64, s: f64, u: f64) -> (f64, f64) {
    let a = (0.5 * s).cosh() + (-0.5 * s).exp() * u * u / 8.0;
    let c_out = (0.5 * t_out).cosh();
    let c_in = (0.5 * t_in).cosh();
    let d_out = c_out * c_out - a * a;
    if d_out <= 0.0 {
        return (0.0, -1.0);
    }
    let hi = (4.0 * s.exp() * d_out).sqrt();
    let d_in = c_in * c_in - a * a;
    let lo = if d_in > 0.0 {
        (4.0 * s.exp() * d_in).sqrt()
    } else {
        0.0
    };
    (lo, hi)
}

/// `|V|^2`-interval of the shell at height `s` for the `k = 0` instance.
fn u2_interval(t_in: f64, t_out: f64, s: f64) -> (f64, f64) {
    let ch_s = (0.5 * s).cosh();
    let q = (-0.5 * s).exp() / 8.0;
    let c_out = (0.5 * t_out).cosh();
    let c_in = (0.5 * t_in).cosh();
    if c_out <= ch_s {
        return (0.0, -1.0);
    }
    let hi = (c_out - ch_s) / q;
    let lo = if c_in > ch_s { (c_in - ch_s) / q } else { 0.0 };
    (lo, hi)
}

struct Stratum {
    s_lo: f64,
    s_hi: f64,
    /// Upper bound of the slice `|V|`-extent over the stratum.
    u_cap: f64,
    n_samples: usize,
    sum_w: f64,
    sum_w2: f64,
    sum_wf: Complex64,
    sum_wf2: f64,
    sum_cross: Complex64,
    score: f64,
}

/// Generic uniform direction on the sphere `S^{d-1}`.
fn sphere_dir(rng: &mut ChaCha12Rng, d: u32, out: &mut Vec<f64>) {
    out.clear();
    if d == 1 {
        out.push(if rng.random::<f64>() < 0.5 { -1.0 } else { 1.0 });
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
    let norm = out.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-300);
    for v in out.iter_mut() {
        *v /= norm;
    }
}

/// Normalized average of `F` over the shell `{x : d(x, e) in [t, t + delta]}`
/// with respect to left Haar measure: seeded, stratified Monte-Carlo.
///
/// The `A`-coordinate is stratified; within a stratum, points are drawn
/// exactly inside the shell slice (inverse-CDF in the `|V|`-radius with exact
/// density-ratio weights, uniform in the admissible `|Z|`-interval and in the
/// angular directions), so no proposals are rejected. A pilot pass
/// Neyman-allocates the remaining budget across strata. Deterministic given
/// `seed`.
pub fn shell_average<F>(
    space: &SpaceParams,
    f: F,
    t: f64,
    delta: f64,
    budget: usize,
    seed: u64,
    target_rel_se: Option<f64>,
) -> Result<ShellEstimate>
where
    F: Fn(&GroupElement) -> Complex64,
{
    if !(t > delta && delta > 0.0) {
        return Err(Error::invalid("shell_average: need t > delta > 0"));
    }
    if budget < 4_000 {
        return Err(Error::invalid("shell_average: budget too small (< 4000)"));
    }
    let t_outer = t + delta;
    let n_strata = (budget / 3_000).clamp(32, 256);
    let mut rng = ChaCha12Rng::seed_from_u64(seed);

    let mut strata: Vec<Stratum> = (0..n_strata)
        .map(|j| {
            let s_lo = -t_outer + 2.0 * t_outer * j as f64 / n_strata as f64;
            let s_hi = -t_outer + 2.0 * t_outer * (j + 1) as f64 / n_strata as f64;
            let caps = [
                slice_bounds(t_outer, s_lo).0,
                slice_bounds(t_outer, 0.5 * (s_lo + s_hi)).0,
                slice_bounds(t_outer, s_hi).0,
            ];
            Stratum {
                s_lo,
                s_hi,
                u_cap: caps.iter().fold(0.0f64, |a, &b| a.max(b)) * 1.0001,
                n_samples: 0,
                sum_w: 0.0,
                sum_w2: 0.0,
                sum_wf: Complex64::new(0.0, 0.0),
                sum_wf2: 0.0,
                sum_cross: Complex64::new(0.0, 0.0),
                score: 0.0,
            }
        })
        .collect();

    let rho = space.rho();
    let m = space.m();
    let k = space.k();
    let mf = m as f64;
    let sphere_area_m =
        2.0 * std::f64::consts::PI.powf(mf / 2.0) / crate::specfun::gamma::gamma_real(mf / 2.0);
    let mut dirbuf: Vec<f64> = Vec::new();

    // One sample of the slice at a given height; returns (point, weight).
    // Every draw lands inside the shell; the weight is the exact slice
    // density over the sampler density.
    let mut sample_at = |s: f64, width: f64, u_cap: f64, rng: &mut ChaCha12Rng| -> Option<(GroupElement, f64)> {
        let haar = (-2.0 * rho * s).exp();
        let (g, w) = if k == 0 {
            let (lo, hi) = u2_interval(t, t_outer, s);
            if hi <= lo {
                return None;
            }
            // Uniform in u^2 over the annulus; exact du-density ratio.
            let u2 = lo + (hi - lo) * rng.random::<f64>();
            let u = u2.sqrt();
            let density = sphere_area_m * u.powf(mf - 1.0);
            let q_density = 2.0 * u / (hi - lo);
            sphere_dir(rng, m, &mut dirbuf);
            let x: Vec<f64> = dirbuf.iter().map(|d| d * u).collect();
            (
                GroupElement {
                    n: NPoint { x, y: vec![] },
                    t: s,
                },
                haar * width * density / q_density,
            )
        } else {
            // (m, k) = (2, 1): u from a piecewise-linear approximation of the
            // slice u-density, corrected by the exact density ratio; |Z|
            // uniform in the admissible interval. The u-grid is split at the
            // inner-shell entry radius, where the density has a square-root
            // kink that a straight grid would misfit.
            let hi_u = u_cap.max(1e-12);
            const NSEG: usize = 24;
            let mut nodes = [0.0f64; NSEG + 1];
            let ch_s = (0.5 * s).cosh();
            let c_in = (0.5 * t).cosh();
            let u_star = if c_in > ch_s {
                (8.0 * (0.5 * s).exp() * (c_in - ch_s)).sqrt().min(hi_u)
            } else {
                0.0
            };
            let half = NSEG / 2;
            if u_star > 1e-9 && u_star < hi_u - 1e-9 {
                for i in 0..=half {
                    nodes[i] = u_star * i as f64 / half as f64;
                }
                for i in 1..=(NSEG - half) {
                    nodes[half + i] = u_star + (hi_u - u_star) * i as f64 / (NSEG - half) as f64;
                }
            } else {
                for (i, n) in nodes.iter_mut().enumerate() {
                    *n = hi_u * i as f64 / NSEG as f64;
                }
            }
            let mut dens = [0.0f64; NSEG + 1];
            for (i, d) in dens.iter_mut().enumerate() {
                let (zl, zh) = z_interval(t, t_outer, s, nodes[i]);
                *d = if zh > zl { nodes[i] * (zh - zl) } else { 0.0 };
            }
            let mut cdf = [0.0f64; NSEG + 1];
            for i in 0..NSEG {
                cdf[i + 1] = cdf[i] + 0.5 * (nodes[i + 1] - nodes[i]) * (dens[i] + dens[i + 1]);
            }
            let total = cdf[NSEG];
            if total <= 0.0 {
                return None;
            }
            let target = rng.random::<f64>() * total;
            let mut seg = 0;
            while seg < NSEG - 1 && cdf[seg + 1] < target {
                seg += 1;
            }
            let h = nodes[seg + 1] - nodes[seg];
            let (d0, d1) = (dens[seg], dens[seg + 1]);
            let rem = target - cdf[seg];
            let frac = if (d1 - d0).abs() < 1e-13 * (d0 + d1).max(1e-300) {
                if d0 > 0.0 {
                    (rem / (d0 * h)).clamp(0.0, 1.0)
                } else {
                    0.5
                }
            } else {
                let a = 0.5 * (d1 - d0) / h;
                let disc = (d0 * d0 + 4.0 * a * rem).max(0.0).sqrt();
                ((disc - d0) / (2.0 * a * h)).clamp(0.0, 1.0)
            };
            let u = nodes[seg] + h * frac;
            let q_u = (d0 + (d1 - d0) * frac) / total;
            let (zl, zh) = z_interval(t, t_outer, s, u);
            if zh <= zl || q_u <= 0.0 {
                return None;
            }
            // Exact slice du-density at u: 2 pi u * 2 (zh - zl).
            let density = 2.0 * std::f64::consts::PI * u * 2.0 * (zh - zl);
            let z_mag = zl + (zh - zl) * rng.random::<f64>();
            let z = if rng.random::<f64>() < 0.5 { z_mag } else { -z_mag };
            let th = 2.0 * std::f64::consts::PI * rng.random::<f64>();
            (
                GroupElement {
                    n: NPoint {
                        x: vec![u * th.cos(), u * th.sin()],
                        y: vec![z],
                    },
                    t: s,
                },
                haar * width * density / q_u,
            )
        };
        debug_assert!({
            let d = distance(space, &g);
            d >= t - 1e-7 && d <= t_outer + 1e-7
        });
        Some((g, w))
    };

    // One observation = an antithetic pair mirrored in the A-coordinate, so
    // the within-stratum linear variation of the phase and of the Haar weight
    // cancels in the pair average.
    let mut draw = |st: &mut Stratum, rng: &mut ChaCha12Rng, fref: &F| {
        let width = st.s_hi - st.s_lo;
        let x = rng.random::<f64>();
        st.n_samples += 1;
        let mut w_pair = 0.0;
        let mut wf_pair = Complex64::new(0.0, 0.0);
        for s in [st.s_lo + width * x, st.s_hi - width * x] {
            if let Some((g, w)) = sample_at(s, width, st.u_cap, rng) {
                w_pair += 0.5 * w;
                wf_pair += fref(&g) * w * 0.5;
            }
        }
        st.sum_w += w_pair;
        st.sum_w2 += w_pair * w_pair;
        st.sum_wf += wf_pair;
        st.sum_wf2 += wf_pair.norm_sqr();
        st.sum_cross += wf_pair * w_pair;
        st.score += wf_pair.norm();
    };

    // Pilot: a quarter of the budget, equal split (a draw spends 2 samples).
    let pilot_per = (budget / 8 / n_strata).max(8);
    for st in strata.iter_mut() {
        for _ in 0..pilot_per {
            draw(st, &mut rng, &f);
        }
    }
    // Neyman-style allocation of the remainder by pilot |w F| mass.
    let scores: Vec<f64> = strata
        .iter()
        .map(|st| {
            if st.n_samples > 0 {
                st.score / st.n_samples as f64
            } else {
                0.0
            }
        })
        .collect();
    let total_score: f64 = scores.iter().sum();
    let remaining = budget.saturating_sub(2 * pilot_per * n_strata) / 2;
    if total_score > 0.0 {
        for (st, sc) in strata.iter_mut().zip(&scores) {
            let extra = ((remaining as f64) * sc / total_score) as usize;
            for _ in 0..extra.max(4) {
                draw(st, &mut rng, &f);
            }
        }
    }

    // Ratio estimator with delta-method standard error, strata independent.
    let mut num = Complex64::new(0.0, 0.0);
    let mut den = 0.0;
    let mut used = 0usize;
    for st in &strata {
        if st.n_samples == 0 {
            continue;
        }
        let inv = 1.0 / st.n_samples as f64;
        num += st.sum_wf * inv;
        den += st.sum_w * inv;
        used += 2 * st.n_samples;
    }
    if den <= 0.0 {
        return Err(Error::BudgetExhausted {
            achieved: f64::INFINITY,
            requested: target_rel_se.unwrap_or(f64::NAN),
        });
    }
    let value = num / den;
    let mut var = 0.0;
    for st in &strata {
        if st.n_samples < 2 {
            continue;
        }
        let n = st.n_samples as f64;
        let mean_res = (st.sum_wf - value * st.sum_w) / n;
        let m2 = (st.sum_wf2 - 2.0 * (value.conj() * st.sum_cross).re
            + value.norm_sqr() * st.sum_w2)
            / n;
        let var_res = (m2 - mean_res.norm_sqr()).max(0.0);
        var += var_res / n;
    }
    let std_error = var.sqrt() / den;
    if let Some(target) = target_rel_se {
        let rel = std_error / value.norm().max(1e-300);
        if rel > target {
            return Err(Error::BudgetExhausted {
                achieved: rel,
                requested: target,
            });
        }
    }
    Ok(ShellEstimate {
        value,
        std_error,
        accepted: used,
    })
}

/// Haar volume of the shell `{d(x, e) in [t, t + delta]}` with a standard
/// error: the A-coordinate is sampled, the slice measure is exact per sample.
/// Deterministic given `seed`.
pub fn shell_haar_volume(
    space: &SpaceParams,
    t: f64,
    delta: f64,
    budget: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    if !(t > delta && delta > 0.0) {
        return Err(Error::invalid("shell_haar_volume: need t > delta > 0"));
    }
    let t_outer = t + delta;
    let n_strata = (budget / 2_000).clamp(16, 128);
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let per = (budget / n_strata).max(16);
    let mut total = 0.0;
    let mut var = 0.0;
    let rho = space.rho();
    let m = space.m();
    let k = space.k();
    let mf = m as f64;
    let sphere_area_m =
        2.0 * std::f64::consts::PI.powf(mf / 2.0) / crate::specfun::gamma::gamma_real(mf / 2.0);
    for j in 0..n_strata {
        let s_lo = -t_outer + 2.0 * t_outer * j as f64 / n_strata as f64;
        let s_hi = -t_outer + 2.0 * t_outer * (j + 1) as f64 / n_strata as f64;
        let width = s_hi - s_lo;
        let mut sum = 0.0;
        let mut sum2 = 0.0;
        for _ in 0..per {
            let s = s_lo + width * rng.random::<f64>();
            let haar = (-2.0 * rho * s).exp();
            let area = if k == 0 {
                let (lo, hi) = u2_interval(t, t_outer, s);
                if hi <= lo {
                    0.0
                } else {
                    sphere_area_m / mf * (hi.powf(mf / 2.0) - lo.powf(mf / 2.0))
                }
            } else {
                let u_cap = slice_bounds(t_outer, s).0;
                crate::quad::gl_on_interval(24, 0.0, u_cap.max(1e-12))
                    .iter()
                    .map(|&(u, w)| {
                        let (zl, zh) = z_interval(t, t_outer, s, u);
                        if zh > zl {
                            w * 2.0 * std::f64::consts::PI * u * 2.0 * (zh - zl)
                        } else {
                            0.0
                        }
                    })
                    .sum()
            };
            let v = haar * area;
            sum += v;
            sum2 += v * v;
        }
        let n = per as f64;
        let mean = sum / n;
        total += width * mean;
        var += width * width * ((sum2 / n - mean * mean).max(0.0)) / n;
    }
    Ok((total, var.sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{radial_density, radial_to_haar_constant};
    use crate::quad::integrate;
    use crate::specfun::{phi_dr, SpectralPoint};
    use approx::assert_abs_diff_eq;

    #[test]
    fn constant_function_averages_to_one() {
        let s = SpaceParams::new(2, 1).unwrap();
        let est =
            shell_average(&s, |_| Complex64::new(1.0, 0.0), 2.0, 0.1, 50_000, 7, None).unwrap();
        assert_abs_diff_eq!(est.value.re, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(est.value.im, 0.0, epsilon = 1e-12);
        assert!(est.accepted > 10_000);
    }

    #[test]
    fn deterministic_given_seed() {
        let s = SpaceParams::new(2, 0).unwrap();
        let f = |g: &GroupElement| Complex64::new(g.t, 0.0);
        let a = shell_average(&s, f, 1.5, 0.1, 40_000, 42, None).unwrap();
        let b = shell_average(&s, f, 1.5, 0.1, 40_000, 42, None).unwrap();
        assert_eq!(a.value, b.value);
        assert_eq!(a.std_error, b.std_error);
    }

    #[test]
    fn exponential_reproduces_spherical_function() {
        // Radialization identity: the shell average of the horocyclic
        // eigenfunction e^{(i lambda + rho) A(.)} is phi_lambda(a_t). The
        // exponent's rho-sign is pinned by the geometry (e^{(i lambda - rho) A}
        // is the eigenfunction of spectral parameter lambda + 2 i rho and its
        // average is phi_{lambda + 2 i rho} instead).
        for s in [SpaceParams::new(2, 1).unwrap(), SpaceParams::new(2, 0).unwrap()] {
            let rho = s.rho();
            for (lam, t) in [
                (SpectralPoint::real(0.0), 1.0),
                (SpectralPoint::real(2.0), 2.0),
                (SpectralPoint::new(1.0, 0.3), 1.5),
            ] {
                let ilr = Complex64::new(0.0, 1.0) * lam.as_complex() + rho;
                let f = move |g: &GroupElement| (ilr * g.t).exp();
                let est = shell_average(&s, f, t, 0.02, 400_000, 11, None).unwrap();
                let reference = phi_dr(&s, lam, t + 0.01).unwrap();
                let err = (est.value - reference).norm();
                assert!(
                    err <= 3.0 * est.std_error + 0.005 * reference.norm(),
                    "lambda={lam}, t={t}: est {} vs phi {} (err {err:.2e}, se {:.2e})",
                    est.value,
                    reference,
                    est.std_error
                );
            }
        }
    }

    #[test]
    fn wrong_rho_sign_shifts_the_spectral_parameter() {
        // Companion to the test above: e^{(i lambda - rho) A} averages to
        // phi_{lambda + 2 i rho}.
        let s = SpaceParams::new(2, 0).unwrap();
        let rho = s.rho();
        let t = 1.0;
        let f = move |g: &GroupElement| Complex64::new((-rho * g.t).exp(), 0.0);
        let est = shell_average(&s, f, t, 0.02, 200_000, 4, None).unwrap();
        let shifted = phi_dr(&s, SpectralPoint::new(0.0, 2.0 * rho), t + 0.01).unwrap();
        assert!(
            (est.value - shifted).norm() <= 3.0 * est.std_error + 0.005 * shifted.norm(),
            "est {} vs phi_(2 i rho) {}",
            est.value,
            shifted
        );
    }

    #[test]
    fn shell_volume_matches_density_with_constant_kappa() {
        // Haar{d in [t, t+delta]} = kappa int_t^{t+delta} A(r) dr with the
        // space's angular constant; validates distance and density jointly.
        for s in [SpaceParams::new(2, 1).unwrap(), SpaceParams::new(2, 0).unwrap()] {
            let kappa = radial_to_haar_constant(&s);
            for &t in &[1.0, 2.0, 4.0] {
                let delta = 0.05;
                let (vol, se) = shell_haar_volume(&s, t, delta, 200_000, 9).unwrap();
                let expect = kappa * integrate(|r| radial_density(&s, r), t, t + delta, 32);
                assert!(
                    (vol - expect).abs() <= 3.0 * se + 0.002 * expect,
                    "{} t={t}: vol {vol:.6} vs kappa*intA {expect:.6} (se {se:.2e})",
                    s.tag()
                );
            }
        }
    }

    #[test]
    fn poisson_power_kernel_radializes_to_phi() {
        // R(P_lambda(., n0))(t) = phi_lambda(t) P_lambda(e, n0).
        let s = SpaceParams::new(2, 1).unwrap();
        let n0 = crate::geometry::NPoint::new(&s, vec![0.8, -0.4], vec![0.5]);
        for (lam, t) in [(SpectralPoint::real(0.0), 1.0), (SpectralPoint::real(2.0), 2.0)] {
            let n0c = n0.clone();
            let sp = s;
            let f = move |g: &GroupElement| crate::geometry::p_lambda(&sp, g, &n0c, lam);
            let est = shell_average(&s, f, t, 0.02, 400_000, 13, None).unwrap();
            let expect = phi_dr(&s, lam, t + 0.01).unwrap()
                * crate::geometry::p_lambda(&s, &GroupElement::identity(&s), &n0, lam);
            let err = (est.value - expect).norm();
            assert!(
                err <= 3.0 * est.std_error + 0.01 * expect.norm(),
                "lam={lam}, t={t}: est {} vs {} (se {:.2e})",
                est.value,
                expect,
                est.std_error
            );
        }
    }

    #[test]
    fn rejects_bad_arguments() {
        let s = SpaceParams::new(2, 0).unwrap();
        assert!(shell_average(&s, |_| Complex64::new(1.0, 0.0), 0.05, 0.1, 50_000, 1, None).is_err());
        assert!(shell_average(&s, |_| Complex64::new(1.0, 0.0), 2.0, 0.1, 100, 1, None).is_err());
    }

    #[test]
    fn budget_error_reports_achieved_se() {
        let s = SpaceParams::new(2, 1).unwrap();
        let f = |g: &GroupElement| Complex64::new((5.0 * g.t).sin(), 0.0);
        let out = shell_average(&s, f, 2.0, 0.1, 5_000, 3, Some(1e-12));
        match out {
            Err(Error::BudgetExhausted { achieved, requested }) => {
                assert!(achieved > requested);
            }
            other => panic!("expected budget exhaustion, got {other:?}"),
        }
    }
}

#[cfg(test)]
mod jacobian_tests {
    use super::*;
    use crate::geometry::{group_inv, group_mul, modular_delta, sigma, GroupElement, NPoint};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;

    // Test function on N with gaussian decay in the homogeneous gauge.
    fn fn_on_n(n: &NPoint) -> f64 {
        let x2: f64 = n.x.iter().map(|v| v * v).sum();
        let z2: f64 = n.y.iter().map(|v| v * v).sum();
        (-(x2 + z2 + 0.3 * x2 * z2.sqrt().min(5.0))).exp()
    }

    #[test]
    fn conjugation_jacobian_identity() {
        // int_N f(a_t n a_{-t}) dn = e^{-2 rho t} int_N f dn, Monte-Carlo.
        let s = SpaceParams::new(2, 1).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        let box_r: f64 = 4.0;
        let vol = (2.0 * box_r).powi(3);
        for &t in &[-1.0, 0.5, 1.0] {
            let n_samples = 400_000;
            let (mut lhs, mut lhs2, mut rhs, mut rhs2) = (0.0, 0.0, 0.0, 0.0);
            for _ in 0..n_samples {
                let n = NPoint {
                    x: vec![
                        box_r * (2.0 * rng.random::<f64>() - 1.0),
                        box_r * (2.0 * rng.random::<f64>() - 1.0),
                    ],
                    y: vec![box_r * (2.0 * rng.random::<f64>() - 1.0)],
                };
                let a = fn_on_n(&sigma(&s, t, &n));
                let b = fn_on_n(&n);
                lhs += a;
                lhs2 += a * a;
                rhs += b;
                rhs2 += b * b;
            }
            let nf = n_samples as f64;
            let lhs_mean = vol * lhs / nf;
            let rhs_mean = vol * rhs / nf * (-2.0 * s.rho() * t).exp();
            let se = vol * ((lhs2 / nf - (lhs / nf) * (lhs / nf)) / nf).sqrt()
                + vol
                    * ((rhs2 / nf - (rhs / nf) * (rhs / nf)) / nf).sqrt()
                    * (-2.0 * s.rho() * t).exp();
            assert!(
                (lhs_mean - rhs_mean).abs() <= 3.0 * se + 1e-4 * rhs_mean.abs(),
                "t={t}: {lhs_mean} vs {rhs_mean} (se {se:.2e})"
            );
        }
    }

    #[test]
    fn inversion_jacobian_identity() {
        // int_S f(x^{-1}) dx = int_S f(x) e^{2 rho A(x)} dx, Monte-Carlo with
        // a compactly truncated smooth f on the group.
        let s = SpaceParams::new(2, 1).unwrap();
        let f = |g: &GroupElement| {
            let x2: f64 = g.n.x.iter().map(|v| v * v).sum();
            let z2: f64 = g.n.y.iter().map(|v| v * v).sum();
            (-(x2 + z2 + g.t * g.t)).exp()
        };
        let mut rng = ChaCha12Rng::seed_from_u64(17);
        let box_r: f64 = 3.5;
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
            let a = f(&group_inv(&s, &g)) * haar;
            let b = f(&g) * (2.0 * s.rho() * g.t).exp() * haar;
            lhs += a;
            lhs2 += a * a;
            rhs += b;
            rhs2 += b * b;
        }
        let nf = n_samples as f64;
        let se = vol * ((lhs2 / nf - (lhs / nf) * (lhs / nf)) / nf).sqrt()
            + vol * ((rhs2 / nf - (rhs / nf) * (rhs / nf)) / nf).sqrt();
        let (l, r) = (vol * lhs / nf, vol * rhs / nf);
        assert!(
            (l - r).abs() <= 3.0 * se + 1e-3 * r.abs(),
            "{l} vs {r} (se {se:.2e})"
        );
        // Sanity on the modular function driving the identity.
        let g1 = GroupElement::a(&s, 0.8);
        let g2 = GroupElement::new(NPoint::new(&s, vec![0.3, -0.2], vec![0.1]), -0.5);
        let prod = group_mul(&s, &g1, &g2);
        assert!(
            (modular_delta(&s, &prod) - modular_delta(&s, &g1) * modular_delta(&s, &g2)).abs()
                < 1e-12
        );
    }
}
