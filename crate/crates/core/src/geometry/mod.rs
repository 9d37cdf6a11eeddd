//! The Damek-Ricci space: structural constants, group law, geodesic distance,
//! radial volume density and Monte-Carlo geometric oracles.

pub mod poisson;
pub mod shell;

pub use poisson::{n_grid, p_lambda, poisson_kernel, poisson_mass, poisson_normalization, NGrid};
pub use shell::{shell_average, ShellEstimate};

use crate::error::{Error, Result};
use crate::specfun::JacobiParams;

/// Which closed form the geodesic distance uses.
///
/// `Calibrated` is the form consistent with the Poisson kernel normalization
/// and the group dilations used here; it is the one under which geodesic-shell
/// averages of `exp((i lambda - rho) A(x))` reproduce the spherical function.
/// `PaperLiteral` keeps the alternative cosh-square form with full-angle
/// variables for comparison; it is not consistent with the rest of the
/// normalization and is exposed behind this flag only.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DistanceConvention {
    #[default]
    Calibrated,
    PaperLiteral,
}

/// Structural constants of a Damek-Ricci space `S = N A` with
/// `dim v = m`, `dim z = k`.
///
/// Supported instances: `k = 0` with positive even `m` (real hyperbolic
/// type), and the Heisenberg-type case `(m, k) = (2, 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpaceParams {
    m: u32,
    k: u32,
    q: f64,
    rho: f64,
    alpha: f64,
    beta: f64,
    poisson_c: f64,
    convention: DistanceConvention,
}

impl SpaceParams {
    pub fn new(m: u32, k: u32) -> Result<Self> {
        let supported = (k == 0 && m > 0 && m % 2 == 0) || (m == 2 && k == 1);
        if !supported {
            return Err(Error::UnsupportedInstance { m, k });
        }
        let mf = m as f64;
        let kf = k as f64;
        let q = mf / 2.0 + kf;
        let alpha = (mf + kf - 1.0) / 2.0;
        let beta = (kf - 1.0) / 2.0;
        let poisson_c = poisson::compute_normalization(m, k, q)?;
        Ok(SpaceParams {
            m,
            k,
            q,
            rho: q / 2.0,
            alpha,
            beta,
            poisson_c,
            convention: DistanceConvention::Calibrated,
        })
    }

    /// Same space with the paper-literal distance formula (comparison only).
    pub fn with_distance_convention(mut self, convention: DistanceConvention) -> Self {
        self.convention = convention;
        self
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    /// Homogeneous dimension Q = m/2 + k.
    pub fn q(&self) -> f64 {
        self.q
    }

    /// rho = Q/2.
    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Poisson kernel normalization constant C.
    pub fn poisson_c(&self) -> f64 {
        self.poisson_c
    }

    pub fn distance_convention(&self) -> DistanceConvention {
        self.convention
    }

    /// The Jacobi parameter pair (alpha, beta) of this space.
    pub fn jacobi_params(&self) -> JacobiParams {
        JacobiParams::new(self.alpha, self.beta).expect("space parameters satisfy alpha >= beta >= -1/2")
    }

    /// Short token used in reports, e.g. `m2k1`.
    pub fn tag(&self) -> String {
        format!("m{}k{}", self.m, self.k)
    }
}

/// Point of the nilpotent part `N`, `n = (X, Y)` with `X` in `R^m`, `Y` in `R^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct NPoint {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl NPoint {
    pub fn new(space: &SpaceParams, x: Vec<f64>, y: Vec<f64>) -> Self {
        assert_eq!(x.len(), space.m as usize, "NPoint: wrong dim v");
        assert_eq!(y.len(), space.k as usize, "NPoint: wrong dim z");
        assert!(
            x.iter().chain(y.iter()).all(|v| v.is_finite()),
            "NPoint: non-finite entries"
        );
        NPoint { x, y }
    }

    pub fn origin(space: &SpaceParams) -> Self {
        NPoint {
            x: vec![0.0; space.m as usize],
            y: vec![0.0; space.k as usize],
        }
    }

    pub fn norm_x(&self) -> f64 {
        self.x.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn norm_y(&self) -> f64 {
        self.y.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

/// Group element `x = n a_t`; `t` is the `A`-coordinate `A(x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupElement {
    pub n: NPoint,
    pub t: f64,
}

impl GroupElement {
    pub fn new(n: NPoint, t: f64) -> Self {
        assert!(t.is_finite(), "GroupElement: non-finite A-coordinate");
        GroupElement { n, t }
    }

    pub fn identity(space: &SpaceParams) -> Self {
        GroupElement {
            n: NPoint::origin(space),
            t: 0.0,
        }
    }

    /// Pure `A`-element `a_t`.
    pub fn a(space: &SpaceParams, t: f64) -> Self {
        GroupElement::new(NPoint::origin(space), t)
    }
}

/// Lie bracket `[X, X']` of the `v`-parts, landing in the centre.
fn bracket(space: &SpaceParams, x1: &[f64], x2: &[f64]) -> Vec<f64> {
    match space.k {
        0 => vec![],
        1 => vec![x1[0] * x2[1] - x1[1] * x2[0]],
        _ => unreachable!("unsupported instance is rejected at construction"),
    }
}

/// Product in `N`: `(X, Y)(X', Y') = (X + X', Y + Y' + [X, X']/2)`.
pub fn n_mul(space: &SpaceParams, n1: &NPoint, n2: &NPoint) -> NPoint {
    let x: Vec<f64> = n1.x.iter().zip(&n2.x).map(|(a, b)| a + b).collect();
    let br = bracket(space, &n1.x, &n2.x);
    let y: Vec<f64> = n1
        .y
        .iter()
        .zip(&n2.y)
        .zip(br.iter())
        .map(|((a, b), c)| a + b + 0.5 * c)
        .collect();
    NPoint { x, y }
}

pub fn n_inv(_space: &SpaceParams, n: &NPoint) -> NPoint {
    NPoint {
        x: n.x.iter().map(|v| -v).collect(),
        y: n.y.iter().map(|v| -v).collect(),
    }
}

/// The `A`-dilation entering conjugation: `a_t n a_{-t} = sigma_t(n)`,
/// `sigma_t(X, Y) = (e^{t/2} X, e^t Y)`.
pub fn sigma(_space: &SpaceParams, t: f64, n: &NPoint) -> NPoint {
    let eh = (0.5 * t).exp();
    let ef = t.exp();
    NPoint {
        x: n.x.iter().map(|v| eh * v).collect(),
        y: n.y.iter().map(|v| ef * v).collect(),
    }
}

/// Group product `(n1 a_{t1})(n2 a_{t2}) = (n1 sigma_{t1}(n2)) a_{t1 + t2}`.
pub fn group_mul(space: &SpaceParams, g1: &GroupElement, g2: &GroupElement) -> GroupElement {
    let moved = sigma(space, g1.t, &g2.n);
    GroupElement {
        n: n_mul(space, &g1.n, &moved),
        t: g1.t + g2.t,
    }
}

/// Group inverse `(n a_t)^{-1} = sigma_{-t}(n^{-1}) a_{-t}`.
pub fn group_inv(space: &SpaceParams, g: &GroupElement) -> GroupElement {
    GroupElement {
        n: sigma(space, -g.t, &n_inv(space, &g.n)),
        t: -g.t,
    }
}

/// Geodesic distance to the identity.
///
/// Calibrated form: `cosh^2(d/2) = (cosh(t/2) + e^{-t/2}|X|^2/8)^2 + e^{-t}|Y|^2/4`
/// for `x = n a_t`, `n = (X, Y)`. Exact `d(a_t, e) = |t|`.
pub fn distance(space: &SpaceParams, x: &GroupElement) -> f64 {
    let x2 = x.n.x.iter().map(|v| v * v).sum::<f64>();
    let y2 = x.n.y.iter().map(|v| v * v).sum::<f64>();
    match space.convention {
        DistanceConvention::Calibrated => {
            let t = x.t;
            let a = (0.5 * t).cosh() + (-0.5 * t).exp() * x2 / 8.0;
            let ch2 = a * a + (-t).exp() * y2 / 4.0;
            2.0 * acosh_stable(ch2.sqrt())
        }
        DistanceConvention::PaperLiteral => {
            let t = x.t;
            let a = t.cosh() + t.exp() * x2;
            let ch2 = a * a + (2.0 * t).exp() * y2;
            acosh_stable(ch2.sqrt())
        }
    }
}

fn acosh_stable(c: f64) -> f64 {
    if c <= 1.0 {
        0.0
    } else {
        c.acosh()
    }
}

/// Radial volume density `A(r) = (2 sinh(r/2))^{m+k} (2 cosh(r/2))^k`.
pub fn radial_density(space: &SpaceParams, r: f64) -> f64 {
    assert!(r >= 0.0, "radial_density: r must be nonnegative");
    let sh = 2.0 * (0.5 * r).sinh();
    let ch = 2.0 * (0.5 * r).cosh();
    sh.powi((space.m + space.k) as i32) * ch.powi(space.k as i32)
}

/// Logarithmic derivative `A'(r)/A(r)`.
pub fn radial_log_density_derivative(space: &SpaceParams, r: f64) -> f64 {
    assert!(r > 0.0, "radial_log_density_derivative: r must be positive");
    let mk = (space.m + space.k) as f64;
    let k = space.k as f64;
    0.5 * mk / (0.5 * r).tanh() + 0.5 * k * (0.5 * r).tanh()
}

/// Modular function `Delta(y) = e^{-2 rho A(y)}`.
pub fn modular_delta(space: &SpaceParams, y: &GroupElement) -> f64 {
    (-2.0 * space.rho * y.t).exp()
}

/// Angular constant of the Haar decomposition in geodesic polar coordinates:
/// `int_S g dx = kappa int_0^inf (shell average of g)(r) A(r) dr`.
///
/// Equals the area of the unit sphere `S^{m+k}` divided by `2^k`, because
/// `A(r) ~ 2^k r^{m+k}` near the origin in this density normalization.
pub fn radial_to_haar_constant(space: &SpaceParams) -> f64 {
    let d = (space.m + space.k + 1) as f64;
    2.0 * std::f64::consts::PI.powf(d / 2.0) / crate::specfun::gamma::gamma_real(d / 2.0)
        / 2.0f64.powi(space.k as i32)
}
