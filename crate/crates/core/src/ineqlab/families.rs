//! Built-in function families the checks quantify over.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::SpaceParams;
use crate::transforms::{DecayClass, RadialProfile};

/// Family tokens.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    /// `e^{-a r^2}`.
    Gauss,
    /// Smooth, compactly supported in `[0, support]`.
    Bump,
    /// `(1+r)^{-b} e^{-2 rho r / p}`: lies in the weak `L^p` class.
    Powertail,
}

impl std::fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FamilyKind::Gauss => write!(f, "gauss"),
            FamilyKind::Bump => write!(f, "bump"),
            FamilyKind::Powertail => write!(f, "powertail"),
        }
    }
}

/// A parametrized family request.
///
/// `parameters`: Gauss takes a base width `a`; Bump a base support; Powertail
/// `(b, p)` with tail exponent `b` and Lebesgue class `p`. Each member must
/// lie in the function class the target check requires; for the powertail
/// class the tail rate is `2 rho / p` against the volume growth `2 rho`.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct FamilySpec {
    pub name: FamilyKind,
    pub parameters: Vec<f64>,
    pub count: usize,
}

impl FamilySpec {
    pub fn gauss(a: f64, count: usize) -> Self {
        FamilySpec {
            name: FamilyKind::Gauss,
            parameters: vec![a],
            count,
        }
    }

    pub fn bump(support: f64, count: usize) -> Self {
        FamilySpec {
            name: FamilyKind::Bump,
            parameters: vec![support],
            count,
        }
    }

    pub fn powertail(b: f64, p: f64, count: usize) -> Self {
        FamilySpec {
            name: FamilyKind::Powertail,
            parameters: vec![b, p],
            count,
        }
    }

    /// Radial grid extent the family's profiles live on.
    ///
    /// Compact profiles keep a short grid (integrating reconstruction noise
    /// against the exponentially growing measure over dead zones only adds
    /// junk); the slow powertail class needs the long grid for transforms on
    /// strip lines.
    pub fn r_max(&self) -> f64 {
        match self.name {
            FamilyKind::Gauss => 16.0,
            FamilyKind::Bump => 10.0,
            FamilyKind::Powertail => 28.0,
        }
    }

    /// Grid extent for modulus-of-continuity evaluations: rearrangement
    /// norms amplify additive noise at radius r by the measure factor
    /// e^{gamma_p rho r}, so moduli of slowly decaying profiles are computed
    /// on a shorter grid where their own tails are already negligible.
    pub fn modulus_r_max(&self) -> f64 {
        self.r_max().min(17.0)
    }
}

/// One family member, labeled for reports.
#[derive(Debug, Clone)]
pub struct FamilyMember {
    pub label: String,
    pub profile: RadialProfile,
}

/// Materializes the family members at a refinement level.
pub fn make_family(
    spec: &FamilySpec,
    space: &SpaceParams,
    refine: usize,
) -> Result<Vec<FamilyMember>> {
    make_family_on(spec, space, refine, spec.r_max())
}

/// Family members on an explicit grid extent (used for modulus grids).
pub(crate) fn make_family_on(
    spec: &FamilySpec,
    space: &SpaceParams,
    refine: usize,
    r_max: f64,
) -> Result<Vec<FamilyMember>> {
    if spec.count == 0 || spec.count > 16 {
        return Err(Error::invalid("make_family: count must lie in 1..=16"));
    }
    if spec.parameters.iter().any(|p| !(p.is_finite() && *p > 0.0)) {
        return Err(Error::invalid("make_family: parameters must be positive"));
    }
    let mut out = Vec::with_capacity(spec.count);
    match spec.name {
        FamilyKind::Gauss => {
            let base = *spec.parameters.first().ok_or_else(|| Error::invalid("gauss: missing width"))?;
            for i in 0..spec.count {
                let a = base * 1.6f64.powi(i as i32);
                let profile = RadialProfile::from_fn(space, DecayClass::Gaussian { width: a }, r_max, refine, move |r| {
                    Complex64::new((-a * r * r).exp(), 0.0)
                })?;
                out.push(FamilyMember {
                    label: format!("gauss(a={a:.3})"),
                    profile,
                });
            }
        }
        FamilyKind::Bump => {
            let base = *spec.parameters.first().ok_or_else(|| Error::invalid("bump: missing support"))?;
            for i in 0..spec.count {
                let support = base * (1.0 + 0.35 * i as f64);
                if support > r_max {
                    return Err(Error::invalid(format!(
                        "bump: support {support} exceeds the family grid extent {r_max}"
                    )));
                }
                out.push(FamilyMember {
                    label: format!("bump(R={support:.3})"),
                    profile: RadialProfile::bump(space, support, r_max, refine)?,
                });
            }
        }
        FamilyKind::Powertail => {
            if spec.parameters.len() < 2 {
                return Err(Error::invalid("powertail: parameters are (b, p)"));
            }
            let b0 = spec.parameters[0];
            let p = spec.parameters[1];
            if !(p > 1.0 && p < 2.0) {
                return Err(Error::invalid("powertail: class p must lie in (1, 2)"));
            }
            let rate = 2.0 * space.rho() / p;
            for i in 0..spec.count {
                let b = b0 + 1.5 * i as f64;
                if b <= 2.0 * space.rho() / p {
                    return Err(Error::invalid(format!(
                        "powertail: exponent b = {b} not above the class threshold 2 rho / p = {:.4}",
                        2.0 * space.rho() / p
                    )));
                }
                // Smooth at the origin (even in r) with the same tail
                // (1+r)^{-b} e^{-rate r} up to a bounded factor: a genuine
                // cone at r = 0 makes weak-Lorentz moduli unstable to
                // discretize without changing the function class.
                let profile = RadialProfile::from_fn(
                    space,
                    DecayClass::Exponential { rate, power: b },
                    r_max,
                    refine,
                    move |r| {
                        let s = (1.0 + r * r).sqrt();
                        Complex64::new(s.powf(-b) * (-rate * (s - 1.0)).exp(), 0.0)
                    },
                )?;
                out.push(FamilyMember {
                    label: format!("powertail(b={b:.2},p={p:.3})"),
                    profile,
                });
            }
        }
    }
    Ok(out)
}
