//! Gauss-Legendre quadrature rules and panel helpers.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

/// Nodes and weights of an `n`-point Gauss-Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

fn rule_cache() -> &'static Mutex<HashMap<usize, Arc<GaussLegendre>>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<GaussLegendre>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Returns the `n`-point Gauss-Legendre rule on `[-1, 1]`, cached per `n`.
///
/// Nodes are computed by Newton iteration on the Legendre polynomial with the
/// Chebyshev-based initial guess; accurate to machine precision for n <= 1024.
pub fn gauss_legendre(n: usize) -> Arc<GaussLegendre> {
    assert!(n >= 1 && n <= 1024, "gauss_legendre: n out of range");
    if let Some(rule) = rule_cache().lock().unwrap().get(&n) {
        return Arc::clone(rule);
    }
    let rule = Arc::new(compute_rule(n));
    rule_cache().lock().unwrap().insert(n, Arc::clone(&rule));
    rule
}

fn compute_rule(n: usize) -> GaussLegendre {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Initial guess (Abramowitz-Stegun 22.16.6 style).
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut pp = 0.0;
        for _ in 0..100 {
            // Evaluate P_n(x) and P_n'(x) by the three-term recurrence.
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let p = if n == 1 { x } else { p1 };
            let pm1 = if n == 1 { 1.0 } else { p0 };
            pp = (n as f64) * (x * p - pm1) / (x * x - 1.0);
            let dx = p / pp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * pp * pp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    GaussLegendre { nodes, weights }
}

/// (node, weight) pairs of an `n`-point rule mapped to `[a, b]`.
pub fn gl_on_interval(n: usize, a: f64, b: f64) -> Vec<(f64, f64)> {
    let rule = gauss_legendre(n);
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    rule.nodes
        .iter()
        .zip(rule.weights.iter())
        .map(|(&x, &w)| (mid + half * x, half * w))
        .collect()
}

/// (node, weight) pairs of a composite rule: `n` points per panel over the
/// panels defined by consecutive `edges`.
pub fn gl_on_panels(n: usize, edges: &[f64]) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n * edges.len().saturating_sub(1));
    for pair in edges.windows(2) {
        out.extend(gl_on_interval(n, pair[0], pair[1]));
    }
    out
}

/// Panel edges on `[0, len]` clustered quadratically toward both endpoints.
///
/// Used for integrands with algebraic behaviour at one or both ends.
pub fn clustered_edges(len: f64, panels: usize) -> Vec<f64> {
    let n = panels.max(2);
    (0..=n)
        .map(|i| {
            let u = i as f64 / n as f64;
            // Smoothstep mapping: dense near 0 and 1.
            len * u * u * (3.0 - 2.0 * u)
        })
        .collect()
}

/// Integrates `f` over `[a, b]` with an `n`-point rule.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    gl_on_interval(n, a, b).iter().map(|&(x, w)| w * f(x)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn weights_sum_to_two() {
        for n in [1, 2, 5, 16, 33, 64] {
            let rule = gauss_legendre(n);
            let s: f64 = rule.weights.iter().sum();
            assert_relative_eq!(s, 2.0, max_relative = 1e-14);
        }
    }

    #[test]
    fn integrates_polynomials_exactly() {
        // n-point rule is exact for degree 2n-1.
        let val = integrate(|x| x.powi(9) + 3.0 * x.powi(4) - x, 0.0, 2.0, 6);
        let exact = 2.0f64.powi(10) / 10.0 + 3.0 * 2.0f64.powi(5) / 5.0 - 2.0;
        assert_relative_eq!(val, exact, max_relative = 1e-14);
    }

    #[test]
    fn integrates_oscillation() {
        let val = integrate(|x| (10.0 * x).cos(), 0.0, 1.0, 32);
        assert_relative_eq!(val, 10.0f64.sin() / 10.0, max_relative = 1e-13);
    }

    #[test]
    fn panels_cover_interval() {
        let edges = clustered_edges(3.0, 8);
        assert_eq!(edges.len(), 9);
        assert_eq!(edges[0], 0.0);
        assert_relative_eq!(edges[8], 3.0, max_relative = 1e-15);
        let pts = gl_on_panels(4, &edges);
        let total: f64 = pts.iter().map(|&(_, w)| w).sum();
        assert_relative_eq!(total, 3.0, max_relative = 1e-13);
    }
}
