//! Precomputed transform plans: the spherical-function matrix on a fixed
//! (radial x spectral) grid pair, with calibrated inversion.

use num_complex::Complex64;
use rayon::prelude::*;

use super::profile::{radial_points, DecayClass, RadialProfile};
use crate::error::{Error, Result};
use crate::geometry::{radial_density, SpaceParams};
use crate::norms::WeightedGrid;
use crate::quad::gl_on_panels;
use crate::specfun::{phi_dr_many, plancherel_density, SpectralPoint};

/// Grid extents and refinement of a transform plan.
#[derive(Debug, Clone, Copy)]
pub struct PlanConfig {
    /// Radial extent of the quadrature grid.
    pub r_max: f64,
    /// Spectral truncation: the grid covers `0 < xi <= xi_max`.
    pub xi_max: f64,
    /// Imaginary offset of the spectral line (`lambda = xi + i eta`).
    pub eta: f64,
    /// 1 = base resolution; `n` multiplies panel counts on both grids.
    pub refine: usize,
}

impl Default for PlanConfig {
    fn default() -> Self {
        PlanConfig {
            r_max: 16.0,
            xi_max: 60.0,
            eta: 0.0,
            refine: 1,
        }
    }
}

/// Discretized spectral measure on the line `Im lambda = eta`: nodes,
/// quadrature weights and the Plancherel density `|c|^{-2}` per node.
#[derive(Debug, Clone)]
pub struct SpectralGrid {
    xi: Vec<f64>,
    glw: Vec<f64>,
    density: Vec<f64>,
    eta: f64,
    xi_max: f64,
}

impl SpectralGrid {
    /// Half-line grid on `(0, xi_max]`, exploiting evenness of the density
    /// and of transforms of radial data.
    pub fn new(space: &SpaceParams, xi_max: f64, eta: f64, refine: usize) -> Self {
        let jp = space.jacobi_params();
        let panels = (xi_max.ceil() as usize).max(1) * refine.max(1);
        let edges: Vec<f64> = (0..=panels).map(|i| xi_max * i as f64 / panels as f64).collect();
        let pts = gl_on_panels(18, &edges);
        let xi: Vec<f64> = pts.iter().map(|&(x, _)| x).collect();
        let glw: Vec<f64> = pts.iter().map(|&(_, w)| w).collect();
        // Spectral scaling: the Jacobi-level density is evaluated at 2 xi;
        // the overall constant is folded into the calibrated inversion.
        let density: Vec<f64> = xi.iter().map(|&x| plancherel_density(&jp, 2.0 * x)).collect();
        SpectralGrid {
            xi,
            glw,
            density,
            eta,
            xi_max,
        }
    }

    pub fn xi(&self) -> &[f64] {
        &self.xi
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn xi_max(&self) -> f64 {
        self.xi_max
    }

    pub fn density(&self) -> &[f64] {
        &self.density
    }

    pub fn len(&self) -> usize {
        self.xi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xi.is_empty()
    }

    /// Masses of the full-line measure `|c|^{-2} d xi` (doubled half-line).
    pub fn measure_weights(&self) -> Vec<f64> {
        self.glw
            .iter()
            .zip(&self.density)
            .map(|(w, d)| 2.0 * w * d)
            .collect()
    }

    /// The spectral measure as a `WeightedGrid` for norms over the line.
    pub fn weighted_grid(&self) -> WeightedGrid {
        WeightedGrid::new(self.xi.clone(), self.measure_weights())
            .expect("spectral weights positive")
    }

    /// CSV with header `xi,eta,re,im,density` for sampled spectral data.
    pub fn to_csv(&self, values: &[Complex64]) -> String {
        assert_eq!(values.len(), self.xi.len());
        let mut out = String::from("xi,eta,re,im,density\n");
        for ((x, v), d) in self.xi.iter().zip(values).zip(&self.density) {
            out.push_str(&format!(
                "{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}\n",
                x, self.eta, v.re, v.im, d
            ));
        }
        out
    }
}

/// A forward/inverse transform plan: the matrix `phi_{xi_j + i eta}(r_i)` on a
/// fixed grid pair, plus the calibrated inversion constant.
pub struct TransformPlan {
    space: SpaceParams,
    r: Vec<f64>,
    a_weights: Vec<f64>,
    spectral: SpectralGrid,
    phi: Vec<Complex64>,
    c_s: Option<f64>,
    config: PlanConfig,
}

impl TransformPlan {
    pub fn new(space: &SpaceParams, config: PlanConfig) -> Result<Self> {
        if !(config.r_max > 0.0 && config.r_max <= 40.0) || !(config.xi_max > 0.0) {
            return Err(Error::invalid("PlanConfig: bad extents"));
        }
        let pts = radial_points(config.r_max, config.refine);
        let r: Vec<f64> = pts.iter().map(|&(x, _)| x).collect();
        let a_weights: Vec<f64> = pts
            .iter()
            .map(|&(x, w)| w * radial_density(space, x))
            .collect();
        let spectral = SpectralGrid::new(space, config.xi_max, config.eta, config.refine);
        let rows: Vec<Vec<Complex64>> = spectral
            .xi
            .par_iter()
            .map(|&x| phi_dr_many(space, SpectralPoint::new(x, config.eta), &r))
            .collect::<Result<Vec<_>>>()?;
        let nr = r.len();
        let mut phi = Vec::with_capacity(nr * spectral.len());
        for row in rows {
            debug_assert_eq!(row.len(), nr);
            phi.extend(row);
        }
        Ok(TransformPlan {
            space: *space,
            r,
            a_weights,
            spectral,
            phi,
            c_s: None,
            config,
        })
    }

    pub fn space(&self) -> &SpaceParams {
        &self.space
    }

    pub fn spectral(&self) -> &SpectralGrid {
        &self.spectral
    }

    pub fn config(&self) -> &PlanConfig {
        &self.config
    }

    pub fn radial_grid(&self) -> &[f64] {
        &self.r
    }

    /// Builds a profile on this plan's radial grid.
    pub fn profile_from_fn<F>(&self, decay: DecayClass, f: F) -> Result<RadialProfile>
    where
        F: Fn(f64) -> Complex64,
    {
        let p = RadialProfile::from_fn(&self.space, decay, self.config.r_max, self.config.refine, f)?;
        debug_assert_eq!(p.grid().len(), self.r.len());
        Ok(p)
    }

    fn check_grid(&self, f: &RadialProfile) -> Result<()> {
        if f.grid().len() != self.r.len()
            || f.grid()
                .iter()
                .zip(&self.r)
                .any(|(a, b)| (a - b).abs() > 1e-12 * (1.0 + b.abs()))
        {
            return Err(Error::invalid(
                "profile grid does not match the transform plan grid",
            ));
        }
        Ok(())
    }

    /// Forward transform: `f^(xi_j + i eta)` at every spectral node.
    pub fn forward(&self, f: &RadialProfile) -> Result<Vec<Complex64>> {
        self.check_grid(f)?;
        super::check_transform_regime(&self.space, f.decay_class(), self.spectral.eta)?;
        let nr = self.r.len();
        let vals = f.values();
        Ok((0..self.spectral.len())
            .into_par_iter()
            .map(|j| {
                let row = &self.phi[j * nr..(j + 1) * nr];
                let mut acc = Complex64::new(0.0, 0.0);
                for i in 0..nr {
                    acc += vals[i] * row[i] * self.a_weights[i];
                }
                acc
            })
            .collect())
    }

    /// Calibrates the inversion constant by a forward-inverse roundtrip on a
    /// reference gaussian profile; returns the constant.
    pub fn calibrate(&mut self) -> Result<f64> {
        if self.spectral.eta != 0.0 {
            return Err(Error::invalid("calibrate: inversion lives on the real line (eta = 0)"));
        }
        if self.config.r_max < 8.0 {
            return Err(Error::invalid("calibrate: plan r_max too small for the reference profile"));
        }
        let reference = self.profile_from_fn(DecayClass::Gaussian { width: 1.0 }, |r| {
            Complex64::new((-r * r).exp(), 0.0)
        })?;
        let spectrum = self.forward(&reference)?;
        let raw = self.inverse_values_raw(&spectrum);
        let mut num = 0.0;
        let mut den = 0.0;
        for ((g, u), w) in reference.values().iter().zip(&raw).zip(&self.a_weights) {
            num += g.re * u.re * w;
            den += u.re * u.re * w;
        }
        if !(den > 0.0) {
            return Err(Error::QuadratureFailure("calibration roundtrip degenerate".into()));
        }
        let c_s = num / den;
        // The roundtrip must actually reproduce the reference.
        let mut err2 = 0.0;
        let mut ref2 = 0.0;
        for ((g, u), w) in reference.values().iter().zip(&raw).zip(&self.a_weights) {
            err2 += (g - u * c_s).norm_sqr() * w;
            ref2 += g.norm_sqr() * w;
        }
        let rel = (err2 / ref2).sqrt();
        if rel > 1e-4 {
            return Err(Error::QuadratureFailure(format!(
                "calibration roundtrip error {rel:.3e} too large"
            )));
        }
        self.c_s = Some(c_s);
        Ok(c_s)
    }

    pub fn inversion_constant(&self) -> Option<f64> {
        self.c_s
    }

    fn inverse_values_raw(&self, spectrum: &[Complex64]) -> Vec<Complex64> {
        let nr = self.r.len();
        let weights = self.spectral.measure_weights();
        // Radial-chunked so the reduction parallelizes without contention.
        let chunk = nr.div_ceil(rayon::current_num_threads().max(1));
        let mut out = vec![Complex64::new(0.0, 0.0); nr];
        out.par_chunks_mut(chunk).enumerate().for_each(|(ci, slot)| {
            let base = ci * chunk;
            for (j, (fv, w)) in spectrum.iter().zip(&weights).enumerate() {
                let row = &self.phi[j * nr..(j + 1) * nr];
                let c = fv * *w;
                for (o, s) in slot.iter_mut().enumerate() {
                    *s += c * row[base + o];
                }
            }
        });
        out
    }

    /// Inverse transform on the plan's radial grid:
    /// `c_S int F(xi) phi_xi(r) |c(xi)|^{-2} d xi`.
    pub fn inverse_values(&self, spectrum: &[Complex64]) -> Result<Vec<Complex64>> {
        if spectrum.len() != self.spectral.len() {
            return Err(Error::invalid("inverse: spectrum length mismatch"));
        }
        let c_s = self.c_s.ok_or(Error::Uncalibrated)?;
        let tail: f64 = spectrum.iter().rev().take(8).map(|v| v.norm()).sum::<f64>() / 8.0;
        let peak = spectrum.iter().fold(0.0f64, |a, v| a.max(v.norm()));
        if peak > 0.0 && tail > 0.05 * peak {
            return Err(Error::invalid(
                "inverse: spectrum has not decayed at the grid truncation",
            ));
        }
        Ok(self
            .inverse_values_raw(spectrum)
            .into_iter()
            .map(|v| v * c_s)
            .collect())
    }

    /// Inverse transform evaluated at a single radius.
    pub fn inverse_at(&self, spectrum: &[Complex64], r: f64) -> Result<Complex64> {
        if spectrum.len() != self.spectral.len() {
            return Err(Error::invalid("inverse: spectrum length mismatch"));
        }
        let c_s = self.c_s.ok_or(Error::Uncalibrated)?;
        let weights = self.spectral.measure_weights();
        let mut acc = Complex64::new(0.0, 0.0);
        for ((&x, fv), w) in self.spectral.xi.iter().zip(spectrum).zip(&weights) {
            let phi = crate::specfun::phi_dr(&self.space, SpectralPoint::new(x, 0.0), r)?;
            acc += fv * phi * *w;
        }
        Ok(acc * c_s)
    }

    /// Inverse wrapped as a profile on the plan grid.
    pub fn inverse_profile(&self, spectrum: &[Complex64], decay: DecayClass) -> Result<RadialProfile> {
        let values = self.inverse_values(spectrum)?;
        let template = self.profile_from_fn(DecayClass::Gaussian { width: 1.0 }, |r| {
            Complex64::new((-r * r).exp(), 0.0)
        })?;
        Ok(template.with_values(values, decay))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn plan(space: &SpaceParams) -> TransformPlan {
        // xi_max 40 keeps the build quick; the bump's root-exponential
        // spectral tail is ~2e-4 there (2e-5 at the default 60).
        let mut p = TransformPlan::new(
            space,
            PlanConfig {
                r_max: 14.0,
                xi_max: 40.0,
                eta: 0.0,
                refine: 1,
            },
        )
        .unwrap();
        p.calibrate().unwrap();
        p
    }

    fn rel_l2(plan: &TransformPlan, a: &[Complex64], b: &[Complex64]) -> f64 {
        let mut err = 0.0;
        let mut scale = 0.0;
        for ((x, y), w) in a.iter().zip(b).zip(&plan.a_weights) {
            err += (x - y).norm_sqr() * w;
            scale += y.norm_sqr() * w;
        }
        (err / scale).sqrt()
    }

    #[test]
    fn roundtrip_on_held_out_profiles() {
        for space in [SpaceParams::new(2, 1).unwrap(), SpaceParams::new(2, 0).unwrap()] {
            let plan = plan(&space);
            // Held-out: a wider gaussian and a bump (calibration used width 1).
            let g = plan
                .profile_from_fn(DecayClass::Gaussian { width: 0.5 }, |r| {
                    Complex64::new((-0.5 * r * r).exp(), 0.0)
                })
                .unwrap();
            let b = RadialProfile::bump(&space, 2.0, 14.0, 1).unwrap();
            for f in [g, b] {
                let rec = plan.inverse_values(&plan.forward(&f).unwrap()).unwrap();
                let rel = rel_l2(&plan, &rec, &f.values().to_vec());
                assert!(rel <= 1e-3, "roundtrip error {rel:.3e} for {:?}", f.decay_class());
            }
        }
    }

    #[test]
    fn inversion_requires_calibration() {
        let space = SpaceParams::new(2, 1).unwrap();
        let p = TransformPlan::new(
            &space,
            PlanConfig {
                r_max: 14.0,
                xi_max: 20.0,
                eta: 0.0,
                refine: 1,
            },
        )
        .unwrap();
        let f = p
            .profile_from_fn(DecayClass::Gaussian { width: 1.0 }, |r| {
                Complex64::new((-r * r).exp(), 0.0)
            })
            .unwrap();
        let spec = p.forward(&f).unwrap();
        assert!(matches!(p.inverse_values(&spec), Err(Error::Uncalibrated)));
    }

    #[test]
    fn zero_spectrum_inverts_to_zero() {
        let space = SpaceParams::new(2, 1).unwrap();
        let p = plan(&space);
        let zeros = vec![Complex64::new(0.0, 0.0); p.spectral().len()];
        let vals = p.inverse_values(&zeros).unwrap();
        assert!(vals.iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn inverse_at_origin_is_weighted_spectral_mass() {
        // phi_xi(0) = 1, so the inverse at r = 0 is c_S * int F |c|^{-2}.
        let space = SpaceParams::new(2, 1).unwrap();
        let p = plan(&space);
        let f = p
            .profile_from_fn(DecayClass::Gaussian { width: 1.0 }, |r| {
                Complex64::new((-r * r).exp(), 0.0)
            })
            .unwrap();
        let spec = p.forward(&f).unwrap();
        let at0 = p.inverse_at(&spec, 0.0).unwrap();
        let mass: Complex64 = spec
            .iter()
            .zip(p.spectral().measure_weights())
            .map(|(v, w)| v * w)
            .sum();
        let expect = mass * p.inversion_constant().unwrap();
        assert_relative_eq!(at0.re, expect.re, max_relative = 1e-10);
    }

    #[test]
    fn transform_smooth_along_line_interpolates() {
        // 4-point polynomial interpolation of neighbours reproduces f^ to 1e-5.
        let space = SpaceParams::new(2, 1).unwrap();
        let p = plan(&space);
        let f = p
            .profile_from_fn(DecayClass::Gaussian { width: 1.0 }, |r| {
                Complex64::new((-r * r).exp(), 0.0)
            })
            .unwrap();
        let spec = p.forward(&f).unwrap();
        let xi = p.spectral().xi();
        let peak = spec.iter().fold(0.0f64, |a, v| a.max(v.norm()));
        let mut checked = 0;
        for j in (2..xi.len() - 2).step_by(7) {
            // Lagrange through j-2, j-1, j+1, j+2 evaluated at j.
            let xs = [xi[j - 2], xi[j - 1], xi[j + 1], xi[j + 2]];
            let ys = [spec[j - 2], spec[j - 1], spec[j + 1], spec[j + 2]];
            let x = xi[j];
            let mut acc = Complex64::new(0.0, 0.0);
            for a in 0..4 {
                let mut basis = 1.0;
                for b in 0..4 {
                    if a != b {
                        basis *= (x - xs[b]) / (xs[a] - xs[b]);
                    }
                }
                acc += ys[a] * basis;
            }
            assert!(
                (acc - spec[j]).norm() <= 1e-5 * peak,
                "interpolation defect at xi = {x}"
            );
            checked += 1;
        }
        assert!(checked > 10);
    }
}
