//! Lebesgue and Lorentz norms over discretized weighted measures.
//!
//! All computations treat the data as a genuine step function on the measure
//! cells: the decreasing rearrangement is obtained by sorting values with
//! their masses and the Lorentz integral is evaluated in closed form per
//! step, so norms of step data are exact up to rounding.

use crate::error::{Error, Result};

/// A discretized measure: cell masses attached to points.
#[derive(Debug, Clone)]
pub struct WeightedGrid {
    points: Vec<f64>,
    weights: Vec<f64>,
}

impl WeightedGrid {
    pub fn new(points: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if points.len() != weights.len() {
            return Err(Error::invalid("WeightedGrid: points/weights length mismatch"));
        }
        let total: f64 = weights.iter().sum();
        if !total.is_finite() {
            return Err(Error::invalid("WeightedGrid: total mass not finite"));
        }
        if weights.iter().any(|&w| !(w > 0.0) || !w.is_finite()) {
            return Err(Error::invalid("WeightedGrid: weights must be positive"));
        }
        Ok(WeightedGrid { points, weights })
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn total_mass(&self) -> f64 {
        self.weights.iter().sum()
    }
}

/// Lorentz index pair `(p, q)` with the strip parameter `gamma_p = 2/p - 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LorentzIndex {
    p: f64,
    q: f64,
}

impl LorentzIndex {
    /// `p` in `(0, inf]`, `q` in `[1, inf]`; `(inf, q)` with finite `q` is
    /// rejected as non-normable.
    pub fn new(p: f64, q: f64) -> Result<Self> {
        if !(p > 0.0) || !(q >= 1.0) {
            return Err(Error::invalid(format!("LorentzIndex: bad (p, q) = ({p}, {q})")));
        }
        if p.is_infinite() && q.is_finite() {
            return Err(Error::invalid(
                "LorentzIndex: (inf, q < inf) is not a normable Lorentz space",
            ));
        }
        Ok(LorentzIndex { p, q })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    /// `gamma_p = 2/p - 1` (so `gamma_inf = -1`); satisfies `gamma_p = -gamma_{p'}`.
    pub fn gamma_p(&self) -> f64 {
        gamma_p(self.p)
    }
}

/// `gamma_p = 2/p - 1`, with `gamma_inf = -1`.
pub fn gamma_p(p: f64) -> f64 {
    if p.is_infinite() {
        -1.0
    } else {
        2.0 / p - 1.0
    }
}

/// Conjugate exponent `p' = p/(p-1)`.
pub fn conjugate_exponent(p: f64) -> f64 {
    if p.is_infinite() {
        1.0
    } else if p == 1.0 {
        f64::INFINITY
    } else {
        p / (p - 1.0)
    }
}

/// `(sum |f|^p w)^{1/p}`, essential sup for `p = inf`.
pub fn lp_norm(values: &[f64], grid: &WeightedGrid, p: f64) -> f64 {
    assert_eq!(values.len(), grid.len(), "lp_norm: value/grid length mismatch");
    assert!(p >= 1.0, "lp_norm: p must be >= 1");
    if p.is_infinite() {
        return values.iter().fold(0.0, |acc, v| acc.max(v.abs()));
    }
    let sum: f64 = values
        .iter()
        .zip(grid.weights())
        .map(|(v, w)| v.abs().powf(p) * w)
        .sum();
    sum.powf(1.0 / p)
}

/// Distribution function: total weight of `{ |f| > s }`. Right-continuous and
/// nonincreasing in `s`.
pub fn distribution_function(values: &[f64], grid: &WeightedGrid, s: f64) -> f64 {
    assert_eq!(values.len(), grid.len());
    assert!(s >= 0.0, "distribution_function: s must be nonnegative");
    values
        .iter()
        .zip(grid.weights())
        .filter(|(v, _)| v.abs() > s)
        .map(|(_, w)| w)
        .sum()
}

/// Decreasing rearrangement as steps `(value, mass)`, values nonincreasing.
fn rearrangement(values: &[f64], grid: &WeightedGrid) -> Vec<(f64, f64)> {
    let mut steps: Vec<(f64, f64)> = values
        .iter()
        .zip(grid.weights())
        .map(|(v, &w)| (v.abs(), w))
        .collect();
    steps.sort_by(|a, b| b.0.partial_cmp(&a.0).expect("finite values"));
    steps
}

/// Lorentz norm `(int_0^inf (t^{1/p} f*(t))^q dt/t)^{1/q}` on the grid measure.
///
/// Exact on step data: the integral is a closed form per rearrangement step.
/// `q = inf` gives `sup_t t^{1/p} f*(t)`; `(p, p)` coincides with `lp_norm`.
pub fn lorentz_norm(values: &[f64], grid: &WeightedGrid, idx: LorentzIndex) -> f64 {
    assert_eq!(values.len(), grid.len());
    let p = idx.p();
    let q = idx.q();
    if p.is_infinite() {
        // Only (inf, inf) is constructible.
        return values.iter().fold(0.0, |acc, v| acc.max(v.abs()));
    }
    let steps = rearrangement(values, grid);
    if q.is_infinite() {
        // Weak norm: sup over the right endpoint of each step.
        let mut acc = 0.0f64;
        let mut t = 0.0;
        let mut best = 0.0f64;
        for (v, w) in steps {
            t += w;
            acc = acc.max(v * t.powf(1.0 / p));
            best = acc;
        }
        return best;
    }
    // int_{T0}^{T1} t^{q/p - 1} dt = (p/q) (T1^{q/p} - T0^{q/p})
    let qp = q / p;
    let mut t0 = 0.0f64;
    let mut total = 0.0f64;
    for (v, w) in steps {
        let t1 = t0 + w;
        if v > 0.0 {
            total += v.powf(q) * (p / q) * (t1.powf(qp) - t0.powf(qp));
        }
        t0 = t1;
    }
    total.powf(1.0 / q)
}
