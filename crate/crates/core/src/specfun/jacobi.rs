//! Jacobi functions at complex spectral parameter, the c-function and the
//! Plancherel density.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::specfun::gamma::{is_gamma_pole, ln_gamma_complex, recip_gamma_complex};
use crate::specfun::hyp2f1::hyp2f1_series;

/// Internal accuracy target for one function evaluation.
const TARGET: f64 = 3e-9;

/// Parameter pair (alpha, beta) of a Jacobi function, with rho = alpha + beta + 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobiParams {
    alpha: f64,
    beta: f64,
    rho: f64,
}

impl JacobiParams {
    /// Requires `alpha >= beta >= -1/2`.
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha.is_finite() && beta.is_finite()) || alpha < beta || beta < -0.5 {
            return Err(Error::invalid(format!(
                "JacobiParams: need alpha >= beta >= -1/2, got ({alpha}, {beta})"
            )));
        }
        Ok(JacobiParams {
            alpha,
            beta,
            rho: alpha + beta + 1.0,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// rho = alpha + beta + 1, the half-sum parameter of the Jacobi analysis.
    pub fn rho(&self) -> f64 {
        self.rho
    }
}

/// Complex spectral parameter `lambda = xi + i eta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralPoint {
    xi: f64,
    eta: f64,
}

impl SpectralPoint {
    pub fn new(xi: f64, eta: f64) -> Self {
        assert!(
            xi.is_finite() && eta.is_finite(),
            "SpectralPoint: non-finite components"
        );
        SpectralPoint { xi, eta }
    }

    pub fn real(xi: f64) -> Self {
        Self::new(xi, 0.0)
    }

    pub fn xi(&self) -> f64 {
        self.xi
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn as_complex(&self) -> Complex64 {
        Complex64::new(self.xi, self.eta)
    }

    pub fn neg(&self) -> Self {
        SpectralPoint {
            xi: -self.xi,
            eta: -self.eta,
        }
    }
}

impl std::fmt::Display for SpectralPoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}{:+}i", self.xi, self.eta)
    }
}

fn cc(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Jacobi function `phi^{(alpha,beta)}_mu(s)`, normalized `phi_mu(0) = 1`.
///
/// Evaluation routes: hypergeometric series near the origin, the
/// asymptotic connection formula (two Gamma-weighted series in `sech^2 s`)
/// away from it, and adaptive ODE marching wherever neither is
/// well-conditioned (large real `mu` mid-band and spectral parameters with
/// `i mu` near an integer, where the connection coefficients degenerate).
/// Routes cross-validate to ~1e-9; the target is 1e-8 relative for
/// `s <= 12`, `|mu| <= 50`, `|Im mu| <= 2 rho`.
pub fn jacobi_phi(params: &JacobiParams, mu: SpectralPoint, s: f64) -> Result<Complex64> {
    if !(s.is_finite() && s >= 0.0) {
        return Err(Error::invalid("jacobi_phi: s must be finite and >= 0"));
    }
    let mut out = [Complex64::new(0.0, 0.0)];
    jacobi_phi_into(params, mu, &[s], &mut out)?;
    Ok(out[0])
}

/// Evaluates `phi_mu` at several radii at once (must be sorted ascending).
///
/// Shares a single ODE march across all radii that need it; this is the fast
/// path used when building transform plans.
pub fn jacobi_phi_many(params: &JacobiParams, mu: SpectralPoint, s: &[f64]) -> Result<Vec<Complex64>> {
    let mut out = vec![Complex64::new(0.0, 0.0); s.len()];
    jacobi_phi_into(params, mu, s, &mut out)?;
    Ok(out)
}

fn jacobi_phi_into(
    params: &JacobiParams,
    mu: SpectralPoint,
    s: &[f64],
    out: &mut [Complex64],
) -> Result<()> {
    debug_assert!(s.windows(2).all(|w| w[0] <= w[1]), "radii must be sorted");
    let muc = mu.as_complex();
    let conn = ConnectionData::prepare(params, muc);
    let mut ode_targets: Vec<(usize, f64)> = Vec::new();
    for (i, &si) in s.iter().enumerate() {
        if !(si.is_finite() && si >= 0.0) {
            return Err(Error::invalid("jacobi_phi: s must be finite and >= 0"));
        }
        if si == 0.0 {
            out[i] = cc(1.0, 0.0);
            continue;
        }
        if series_applicable(muc, si) {
            out[i] = phi_series(params, muc, si)?.0;
            continue;
        }
        if let Some(v) = conn.as_ref().and_then(|c| phi_connection(params, muc, si, c)) {
            out[i] = v;
            continue;
        }
        ode_targets.push((i, si));
    }
    if !ode_targets.is_empty() {
        let values = phi_ode_march(params, muc, &ode_targets)?;
        for ((i, _), v) in ode_targets.iter().zip(values) {
            out[*i] = v;
        }
    }
    Ok(())
}

/// Per-mu data of the connection formula: the Gamma coefficient and series
/// parameters for both signs of mu. Computed once per spectral point.
struct ConnectionData {
    terms: [(Complex64, Complex64, Complex64, Complex64); 2], // (g, a, b, c) per sign
    re_abs: f64,
}

impl ConnectionData {
    fn prepare(params: &JacobiParams, mu: Complex64) -> Option<Self> {
        let imu = Complex64::new(0.0, 1.0) * mu;
        let dist = (imu.re - imu.re.round()).hypot(imu.im);
        if dist < 0.02 {
            return None;
        }
        let mut terms = [(cc(0.0, 0.0), cc(0.0, 0.0), cc(0.0, 0.0), cc(0.0, 0.0)); 2];
        for (slot, signed) in [mu, -mu].into_iter().enumerate() {
            let ism = Complex64::new(0.0, 1.0) * signed;
            let g = connection_coefficient(params, signed).ok()?;
            let a = (-ism + params.rho) / 2.0;
            let b = (-ism + (params.alpha - params.beta + 1.0)) / 2.0;
            let c = -ism + 1.0;
            terms[slot] = (g, a, b, c);
        }
        Some(ConnectionData {
            terms,
            re_abs: mu.re.abs(),
        })
    }
}

// Route boundaries are deliberately non-round numbers so that finite
// difference stencils in tests do not straddle a representation switch.
const SERIES_S_MAX: f64 = 0.7871;
const SERIES_CANCEL_NATS: f64 = 5.07;
const CONN_S_MIN: f64 = 0.5563;
const CONN_CANCEL_NATS: f64 = 5.91;

fn series_applicable(mu: Complex64, s: f64) -> bool {
    s <= SERIES_S_MAX && mu.re.abs() * s <= SERIES_CANCEL_NATS
}

/// Direct series: phi = 2F1((rho+i mu)/2, (rho-i mu)/2; alpha+1; -sinh^2 s).
/// Returns (value, derivative d phi/ds) so the ODE march can seed from it.
fn phi_series(params: &JacobiParams, mu: Complex64, s: f64) -> Result<(Complex64, Complex64)> {
    let imu = Complex64::new(0.0, 1.0) * mu;
    let a = (imu + params.rho) / 2.0;
    let b = (-imu + params.rho) / 2.0;
    let c = cc(params.alpha + 1.0, 0.0);
    let z = cc(-s.sinh() * s.sinh(), 0.0);
    let (f, diag) = hyp2f1_series(a, b, c, z, 4000);
    if !diag.converged {
        return Err(Error::PrecisionLoss {
            achieved: diag.max_term * 1e-16 / f.norm().max(1e-300),
            requested: TARGET,
        });
    }
    // d/ds 2F1(z(s)) = (a b / c) 2F1(a+1,b+1;c+1;z) * z'(s)
    let (fp, _) = hyp2f1_series(a + 1.0, b + 1.0, c + 1.0, z, 4000);
    let dz = -(2.0 * s).sinh();
    let deriv = a * b / c * fp * dz;
    Ok((f, deriv))
}

/// Connection-formula coefficient
/// g(mu) = Gamma(alpha+1) Gamma(i mu) / (Gamma((rho + i mu)/2) Gamma((alpha - beta + 1 + i mu)/2)).
///
/// This equals `2^{i mu - rho} c(mu)` for the c-function below.
fn connection_coefficient(params: &JacobiParams, mu: Complex64) -> Result<Complex64> {
    let imu = Complex64::new(0.0, 1.0) * mu;
    let ln = ln_gamma_complex(cc(params.alpha + 1.0, 0.0))? + ln_gamma_complex(imu)?
        - ln_gamma_complex((imu + params.rho) / 2.0)?
        - ln_gamma_complex((imu + (params.alpha - params.beta + 1.0)) / 2.0)?;
    Ok(ln.exp())
}

/// Asymptotic side: two series in y = sech^2 s glued by Gamma coefficients.
/// Returns None when the route is inapplicable or too ill-conditioned.
fn phi_connection(
    params: &JacobiParams,
    mu: Complex64,
    s: f64,
    conn: &ConnectionData,
) -> Option<Complex64> {
    if s < CONN_S_MIN {
        return None;
    }
    let sech2 = {
        let c = s.cosh();
        1.0 / (c * c)
    };
    if conn.re_abs * sech2 / 4.0 > CONN_CANCEL_NATS {
        return None; // cancellation budget
    }
    // ln cosh s, stable for large s.
    let ln_cosh = s + (0.5 * (1.0 + (-2.0 * s).exp())).ln();
    let y = cc(sech2, 0.0);
    let mut total = cc(0.0, 0.0);
    let mut gross = 0.0f64;
    for (slot, signed) in [mu, -mu].into_iter().enumerate() {
        let ism = Complex64::new(0.0, 1.0) * signed;
        let (g, a, b, c) = conn.terms[slot];
        let (f, diag) = hyp2f1_series(a, b, c, y, 4000);
        if !diag.converged {
            return None;
        }
        // sech^{rho - i mu~} = exp(-(rho - i mu~) ln cosh s)
        let pre = (-(cc(params.rho, 0.0) - ism) * ln_cosh).exp();
        let addend = pre * g * f;
        gross += addend.norm() * (1.0 + diag.max_term / f.norm().max(1e-300));
        total += addend;
    }
    // Post-hoc conditioning: the two addends may cancel near degeneracies.
    let est = 1e-16 * gross / total.norm().max(1e-300);
    if est > TARGET {
        return None;
    }
    Some(total)
}

/// Jacobi ODE right-hand side as a first-order complex system.
fn phi_rhs(params: &JacobiParams, lam2: Complex64, s: f64, y: &[Complex64; 2]) -> [Complex64; 2] {
    let w = (2.0 * params.alpha + 1.0) / s.tanh() + (2.0 * params.beta + 1.0) * s.tanh();
    [y[1], -(y[1] * w) - y[0] * lam2]
}

/// Adaptive Dormand-Prince 5(4) march from a series seed to each target.
fn phi_ode_march(
    params: &JacobiParams,
    mu: Complex64,
    targets: &[(usize, f64)],
) -> Result<Vec<Complex64>> {
    let lam2 = mu * mu + params.rho * params.rho;
    // Seed inside the series radius, scaled down for large oscillation rates.
    let first = targets[0].1;
    let mut s0 = 0.5f64.min(0.9 * SERIES_CANCEL_NATS / mu.re.abs().max(1.0));
    if s0 > first {
        s0 = first;
    }
    let (phi0, dphi0) = phi_series(params, mu, s0)?;
    let mut y = [phi0, dphi0];
    let mut s = s0;
    let mut h: f64 = 1e-3;
    let rtol = 1e-12;
    let mut out = Vec::with_capacity(targets.len());
    for &(_, target) in targets {
        if target <= s + 1e-15 {
            // Either equals the seed point or a repeated radius.
            if (target - s).abs() < 1e-14 {
                out.push(y[0]);
                continue;
            }
        }
        while s < target {
            let mut step = h.min(target - s);
            loop {
                let (ynew, err_ratio) = dopri5_step(params, lam2, s, &y, step, rtol);
                if err_ratio <= 1.0 {
                    s += step;
                    y = ynew;
                    let grow = 0.9 * err_ratio.powf(-0.2);
                    h = (step * grow.clamp(0.2, 5.0)).min(0.5);
                    break;
                }
                step *= (0.9 * err_ratio.powf(-0.2)).clamp(0.1, 0.9);
                if step < 1e-12 {
                    return Err(Error::PrecisionLoss {
                        achieved: f64::NAN,
                        requested: TARGET,
                    });
                }
            }
        }
        out.push(y[0]);
    }
    Ok(out)
}

#[rustfmt::skip]
fn dopri5_step(
    params: &JacobiParams,
    lam2: Complex64,
    s: f64,
    y: &[Complex64; 2],
    h: f64,
    rtol: f64,
) -> ([Complex64; 2], f64) {
    let f = |t: f64, v: &[Complex64; 2]| phi_rhs(params, lam2, t, v);
    let k1 = f(s, y);
    let add = |base: &[Complex64; 2], terms: &[(f64, &[Complex64; 2])]| {
        let mut v = *base;
        for (c, k) in terms {
            v[0] += k[0] * (*c * h);
            v[1] += k[1] * (*c * h);
        }
        v
    };
    let k2 = f(s + 0.2 * h, &add(y, &[(0.2, &k1)]));
    let k3 = f(s + 0.3 * h, &add(y, &[(3.0 / 40.0, &k1), (9.0 / 40.0, &k2)]));
    let k4 = f(s + 0.8 * h, &add(y, &[(44.0 / 45.0, &k1), (-56.0 / 15.0, &k2), (32.0 / 9.0, &k3)]));
    let k5 = f(s + 8.0 / 9.0 * h, &add(y, &[
        (19372.0 / 6561.0, &k1), (-25360.0 / 2187.0, &k2),
        (64448.0 / 6561.0, &k3), (-212.0 / 729.0, &k4),
    ]));
    let k6 = f(s + h, &add(y, &[
        (9017.0 / 3168.0, &k1), (-355.0 / 33.0, &k2), (46732.0 / 5247.0, &k3),
        (49.0 / 176.0, &k4), (-5103.0 / 18656.0, &k5),
    ]));
    let y5 = add(y, &[
        (35.0 / 384.0, &k1), (500.0 / 1113.0, &k3), (125.0 / 192.0, &k4),
        (-2187.0 / 6784.0, &k5), (11.0 / 84.0, &k6),
    ]);
    let k7 = f(s + h, &y5);
    let y4 = add(y, &[
        (5179.0 / 57600.0, &k1), (7571.0 / 16695.0, &k3), (393.0 / 640.0, &k4),
        (-92097.0 / 339200.0, &k5), (187.0 / 2100.0, &k6), (1.0 / 40.0, &k7),
    ]);
    let mut err: f64 = 0.0;
    for i in 0..2 {
        let scale = rtol * y[i].norm().max(y5[i].norm()).max(1e-30);
        err = err.max((y5[i] - y4[i]).norm() / scale);
    }
    (y5, err.max(1e-10))
}

/// Harish-Chandra c-function
/// `c(mu) = 2^{rho - i mu} Gamma(alpha+1) Gamma(i mu) / (Gamma((rho+i mu)/2) Gamma((alpha-beta+1+i mu)/2))`.
///
/// Callers working at the space's spectral scaling pass `mu = 2 lambda`.
pub fn c_function(params: &JacobiParams, lam: SpectralPoint) -> Result<Complex64> {
    let mu = lam.as_complex();
    let imu = Complex64::new(0.0, 1.0) * mu;
    if is_gamma_pole(imu) {
        return Err(Error::GammaPole {
            re: imu.re,
            im: imu.im,
        });
    }
    let two_pow = (cc(params.rho, 0.0) - imu) * std::f64::consts::LN_2;
    let num = ln_gamma_complex(cc(params.alpha + 1.0, 0.0))? + ln_gamma_complex(imu)?;
    let den1 = recip_gamma_complex((imu + params.rho) / 2.0);
    let den2 = recip_gamma_complex((imu + (params.alpha - params.beta + 1.0)) / 2.0);
    Ok((two_pow + num).exp() * den1 * den2)
}

/// Plancherel density `|c(xi)|^{-2}` on the real spectral line, with the
/// removable singularity at 0 filled by its (zero) limit; even and nonnegative.
pub fn plancherel_density(params: &JacobiParams, xi: f64) -> f64 {
    assert!(xi.is_finite(), "plancherel_density: non-finite xi");
    // 1/c(mu) = i mu 2^{i mu - rho} Gamma((rho+i mu)/2) Gamma((alpha-beta+1+i mu)/2)
    //           / (Gamma(alpha+1) Gamma(1 + i mu)),  so |1/c|^2 is smooth in xi.
    let imu = cc(0.0, xi);
    let ln = ln_gamma_complex((imu + params.rho) / 2.0).expect("parameters keep arguments off poles")
        + ln_gamma_complex((imu + (params.alpha - params.beta + 1.0)) / 2.0).unwrap()
        - ln_gamma_complex(cc(params.alpha + 1.0, 0.0)).unwrap()
        - ln_gamma_complex(imu + 1.0).unwrap()
        - params.rho * std::f64::consts::LN_2;
    let modulus = (2.0 * ln.re).exp();
    xi * xi * modulus
}
