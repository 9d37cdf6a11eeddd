//! Radial profiles: functions of the geodesic radius sampled on a quadrature
//! grid against the measure `A(r) dr`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{radial_density, SpaceParams};
use crate::norms::WeightedGrid;
use crate::quad::gl_on_panels;

/// Decay class of a radial profile; drives admissible strip lines and tails.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "class", rename_all = "snake_case")]
pub enum DecayClass {
    /// Supported in `[0, support]`.
    Compact { support: f64 },
    /// Dominated by `e^{-width r^2}`.
    Gaussian { width: f64 },
    /// Dominated by `(1+r)^{-power} e^{-rate r}`.
    Exponential {
        rate: f64,
        #[serde(default)]
        power: f64,
    },
}

/// Side-car metadata serialized next to profile CSV files.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProfileMeta {
    pub decay_class: DecayClass,
    pub r_max: f64,
}

/// A radial function sampled on a Gauss-Legendre grid in the geodesic radius,
/// carrying quadrature weights for `int_0^inf . A(r) dr`.
#[derive(Debug, Clone)]
pub struct RadialProfile {
    grid: Vec<f64>,
    values: Vec<Complex64>,
    /// Cell masses of the measure `A(r) dr`.
    measure_weights: Vec<f64>,
    decay: DecayClass,
    r_max: f64,
}

pub(crate) const PANEL_WIDTH: f64 = 1.0 / 3.0;
pub(crate) const NODES_PER_PANEL: usize = 18;

pub(crate) fn radial_points(r_max: f64, refine: usize) -> Vec<(f64, f64)> {
    let refine = refine.max(1);
    let panels = ((r_max / PANEL_WIDTH).ceil() as usize).max(1) * refine;
    let edges: Vec<f64> = (0..=panels).map(|i| r_max * i as f64 / panels as f64).collect();
    gl_on_panels(NODES_PER_PANEL, &edges)
}

impl RadialProfile {
    /// Samples `f` on a fresh grid over `[0, r_max]` at the given refinement
    /// and validates the declared tail: the `|f|^2 A` mass beyond `r_max`
    /// (probed on `[r_max, 1.5 r_max]`) must stay below 1e-10 of the mass
    /// inside.
    pub fn from_fn<F>(
        space: &SpaceParams,
        decay: DecayClass,
        r_max: f64,
        refine: usize,
        f: F,
    ) -> Result<Self>
    where
        F: Fn(f64) -> Complex64,
    {
        if !(r_max > 0.0) || r_max > 40.0 {
            return Err(Error::invalid(format!(
                "RadialProfile: r_max must lie in (0, 40], got {r_max}"
            )));
        }
        let pts = radial_points(r_max, refine);
        let grid: Vec<f64> = pts.iter().map(|&(r, _)| r).collect();
        let values: Vec<Complex64> = grid.iter().map(|&r| f(r)).collect();
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::invalid("RadialProfile: non-finite sample"));
        }
        let measure_weights: Vec<f64> = pts
            .iter()
            .map(|&(r, w)| w * radial_density(space, r))
            .collect();
        // Tail gauge: the |f|^p A mass with p matched to the declared class;
        // for exponential classes p = 2 rho / rate is the borderline Lebesgue
        // class, which is exactly where truncation hurts first.
        let gauge = match decay {
            DecayClass::Exponential { rate, .. } => {
                if !(rate > 0.0) {
                    return Err(Error::invalid("RadialProfile: exponential rate must be positive"));
                }
                (2.0 * space.rho() / rate).clamp(1.0, 2.0)
            }
            _ => 2.0,
        };
        let inner: f64 = values
            .iter()
            .zip(&measure_weights)
            .map(|(v, w)| v.norm().powf(gauge) * w)
            .sum();
        let tail: f64 = gl_on_panels(24, &[r_max, 1.25 * r_max, 1.5 * r_max])
            .iter()
            .map(|&(r, w)| f(r).norm().powf(gauge) * radial_density(space, r) * w)
            .sum();
        if !(tail <= 1e-10 * inner.max(1e-300)) {
            return Err(Error::invalid(format!(
                "RadialProfile: tail mass beyond r_max = {r_max} is {:.3e} of the interior mass \
                 (limit 1e-10) for the declared decay class",
                tail / inner.max(1e-300)
            )));
        }
        Ok(RadialProfile {
            grid,
            values,
            measure_weights,
            decay,
            r_max,
        })
    }

    /// Gaussian profile `e^{-a r^2}`.
    pub fn gaussian(space: &SpaceParams, a: f64, r_max: f64, refine: usize) -> Result<Self> {
        if !(a > 0.0) {
            return Err(Error::invalid("gaussian profile: width must be positive"));
        }
        Self::from_fn(space, DecayClass::Gaussian { width: a }, r_max, refine, |r| {
            Complex64::new((-a * r * r).exp(), 0.0)
        })
    }

    /// Smooth bump supported in `[0, support]`, normalized to 1 at the origin.
    pub fn bump(space: &SpaceParams, support: f64, r_max: f64, refine: usize) -> Result<Self> {
        if !(support > 0.0 && support <= r_max) {
            return Err(Error::invalid("bump profile: need 0 < support <= r_max"));
        }
        Self::from_fn(space, DecayClass::Compact { support }, r_max, refine, move |r| {
            let x = r / support;
            if x >= 1.0 {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new((1.0 - 1.0 / (1.0 - x * x)).exp(), 0.0)
            }
        })
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// Cell masses of `A(r) dr` per node.
    pub fn measure_weights(&self) -> &[f64] {
        &self.measure_weights
    }

    pub fn decay_class(&self) -> &DecayClass {
        &self.decay
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    pub fn meta(&self) -> ProfileMeta {
        ProfileMeta {
            decay_class: self.decay,
            r_max: self.r_max,
        }
    }

    /// Same grid, new values (used by the spectral mean realization).
    pub(crate) fn with_values(&self, values: Vec<Complex64>, decay: DecayClass) -> Self {
        assert_eq!(values.len(), self.grid.len());
        RadialProfile {
            grid: self.grid.clone(),
            values,
            measure_weights: self.measure_weights.clone(),
            decay,
            r_max: self.r_max,
        }
    }

    /// `a f + b g` on a common grid.
    pub fn linear_combination(
        &self,
        other: &RadialProfile,
        a: Complex64,
        b: Complex64,
    ) -> Result<RadialProfile> {
        if self.grid != other.grid {
            return Err(Error::invalid("linear_combination: grids differ"));
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(x, y)| a * x + b * y)
            .collect();
        // The slower-decaying class wins.
        let decay = slower_class(&self.decay, &other.decay);
        Ok(self.with_values(values, decay))
    }

    /// The measure grid `(r_i, A(r_i) dr_i)` as a `WeightedGrid` for norms.
    pub fn weighted_grid(&self) -> WeightedGrid {
        WeightedGrid::new(self.grid.clone(), self.measure_weights.clone())
            .expect("profile weights are positive")
    }

    /// Magnitudes of the samples (for norm computations).
    pub fn magnitudes(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm()).collect()
    }

    /// CSV serialization with header `r,re,im`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("r,re,im\n");
        for (r, v) in self.grid.iter().zip(&self.values) {
            out.push_str(&format!("{:.17e},{:.17e},{:.17e}\n", r, v.re, v.im));
        }
        out
    }

    /// Parses the CSV form produced by [`to_csv`], re-deriving quadrature
    /// metadata from the side-car record.
    pub fn from_csv(space: &SpaceParams, csv: &str, meta: &ProfileMeta) -> Result<Self> {
        let mut grid = Vec::new();
        let mut values = Vec::new();
        for (i, line) in csv.lines().enumerate() {
            if i == 0 {
                if line.trim() != "r,re,im" {
                    return Err(Error::invalid("profile CSV: bad header"));
                }
                continue;
            }
            if line.trim().is_empty() {
                continue;
            }
            let cols: Vec<&str> = line.split(',').collect();
            if cols.len() != 3 {
                return Err(Error::invalid(format!("profile CSV: bad row {i}")));
            }
            let parse = |s: &str| -> Result<f64> {
                s.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::invalid(format!("profile CSV row {i}: {e}")))
            };
            grid.push(parse(cols[0])?);
            values.push(Complex64::new(parse(cols[1])?, parse(cols[2])?));
        }
        if grid.is_empty() || grid.windows(2).any(|w| w[0] >= w[1]) || grid[0] < 0.0 {
            return Err(Error::invalid(
                "profile CSV: grid must be strictly increasing and nonnegative",
            ));
        }
        // Rebuild weights for the canonical grid of the same size.
        let refine = {
            let base = radial_points(meta.r_max, 1).len();
            if grid.len() == base {
                1
            } else if grid.len() == 2 * base {
                2
            } else {
                return Err(Error::invalid(
                    "profile CSV: grid is not a canonical quadrature grid for r_max",
                ));
            }
        };
        let pts = radial_points(meta.r_max, refine);
        for (a, &(b, _)) in grid.iter().zip(pts.iter()) {
            if (a - b).abs() > 1e-9 * (1.0 + b.abs()) {
                return Err(Error::invalid("profile CSV: grid nodes differ from canonical"));
            }
        }
        let measure_weights = pts
            .iter()
            .map(|&(r, w)| w * radial_density(space, r))
            .collect();
        Ok(RadialProfile {
            grid,
            values,
            measure_weights,
            decay: meta.decay_class,
            r_max: meta.r_max,
        })
    }
}

fn slower_class(a: &DecayClass, b: &DecayClass) -> DecayClass {
    // Order: exponential slower than gaussian slower than compact,
    // within a class the smaller rate/width (larger support) is slower.
    fn rank(c: &DecayClass) -> (u8, f64) {
        match c {
            DecayClass::Exponential { rate, .. } => (0, *rate),
            DecayClass::Gaussian { width } => (1, *width),
            DecayClass::Compact { support } => (2, -*support),
        }
    }
    let (ra, ka) = rank(a);
    let (rb, kb) = rank(b);
    if (ra, ka) <= (rb, kb) {
        *a
    } else {
        *b
    }
}
