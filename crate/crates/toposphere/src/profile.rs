//! Rotationally symmetric model surfaces `dr^2 + y(r)^2 dtheta^2`.
//!
//! Built-in families carry analytic profiles; arbitrary surfaces are loaded
//! from sampled profiles and interpolated with a clamped C^2 cubic spline.

use serde::Deserialize;
use thiserror::Error;

use crate::num::spline::CubicSpline;

/// Below this radius `y(r)` is replaced by its pole series `y = r + O(r^3)`
/// so that ratios like `y'/y` stay finite.
const POLE_EPS: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum ProfileError {
    #[error("radius {r} outside the open interval (0, {ell})")]
    Domain { r: f64, ell: f64 },
    #[error("invalid profile: {}", .0.join("; "))]
    Validation(Vec<String>),
}

#[derive(Debug, Clone)]
pub enum SurfaceFamily {
    /// Round sphere of constant curvature `kappa > 0`.
    ConstantCurvature { kappa: f64 },
    /// The one-parameter family `y(r) = sin r / sqrt(1 + lambda sin^2 r)`,
    /// `lambda > -1`.
    LambdaSphere { lambda: f64 },
    /// Profile interpolated from samples of `y` on a monotone `r`-grid.
    Sampled { spline: CubicSpline },
}

/// A model surface of revolution about its base point, with the metric
/// `dr^2 + y(r)^2 dtheta^2` for `0 < r < ell`.
#[derive(Debug, Clone)]
pub struct ModelSurface {
    family: SurfaceFamily,
    ell: f64,
}

impl ModelSurface {
    pub fn constant_curvature(kappa: f64) -> Result<Self, ProfileError> {
        if !(kappa > 0.0) || !kappa.is_finite() {
            return Err(ProfileError::Validation(vec![format!(
                "kappa must be positive and finite, got {kappa}"
            )]));
        }
        Ok(Self {
            family: SurfaceFamily::ConstantCurvature { kappa },
            ell: std::f64::consts::PI / kappa.sqrt(),
        })
    }

    pub fn lambda_sphere(lambda: f64) -> Result<Self, ProfileError> {
        if !(lambda > -1.0) || !lambda.is_finite() {
            return Err(ProfileError::Validation(vec![format!(
                "lambda must exceed -1, got {lambda}"
            )]));
        }
        Ok(Self {
            family: SurfaceFamily::LambdaSphere { lambda },
            ell: std::f64::consts::PI,
        })
    }

    /// Build a surface from samples `(r_i, y_i)`. The grid must start at the
    /// pole (`r_0 = 0`, `y_0 = 0`) and be strictly increasing; the surface is
    /// compact when the last sample returns to zero.
    pub fn from_samples(samples: &[(f64, f64)]) -> Result<Self, ProfileError> {
        let mut problems = Vec::new();
        if samples.len() < 8 {
            problems.push(format!("need at least 8 samples, got {}", samples.len()));
        }
        if let Some(&(r0, y0)) = samples.first() {
            if r0 != 0.0 {
                problems.push(format!("grid must start at r = 0, got {r0}"));
            }
            if y0.abs() > 1e-12 {
                problems.push(format!("profile must vanish at the pole, got y(0) = {y0}"));
            }
        }
        for w in samples.windows(2) {
            if w[1].0 <= w[0].0 {
                problems.push(format!(
                    "grid not strictly increasing at r = {} -> {}",
                    w[0].0, w[1].0
                ));
                break;
            }
        }
        let last = *samples.last().unwrap_or(&(0.0, 0.0));
        let compact = last.1.abs() < 1e-9;
        for &(r, y) in samples.iter().skip(1) {
            let interior = if compact { r < last.0 } else { true };
            if interior && y <= 0.0 && r != last.0 {
                problems.push(format!("profile must be positive in the interior: y({r}) = {y}"));
                break;
            }
        }
        // Pole slope check from the first interval.
        if samples.len() >= 2 {
            let slope = (samples[1].1 - samples[0].1) / (samples[1].0 - samples[0].0);
            if (slope - 1.0).abs() > 0.05 {
                problems.push(format!(
                    "pole slope must be 1 (smooth pole), first-interval slope is {slope:.4}"
                ));
            }
        }
        if !problems.is_empty() {
            return Err(ProfileError::Validation(problems));
        }
        let xs: Vec<f64> = samples.iter().map(|s| s.0).collect();
        let ys: Vec<f64> = samples.iter().map(|s| s.1).collect();
        let end_slope = if compact { -1.0 } else {
            let n = xs.len();
            (ys[n - 1] - ys[n - 2]) / (xs[n - 1] - xs[n - 2])
        };
        let spline = CubicSpline::clamped(xs, ys, 1.0, end_slope);
        let ell = if compact { last.0 } else { f64::INFINITY };
        Ok(Self {
            family: SurfaceFamily::Sampled { spline },
            ell,
        })
    }

    pub fn family(&self) -> &SurfaceFamily {
        &self.family
    }

    /// Radius of the surface: `pi/sqrt(kappa)`, `pi`, or the detected grid
    /// extent (infinite for non-compact sampled profiles).
    pub fn ell(&self) -> f64 {
        self.ell
    }

    pub fn is_compact(&self) -> bool {
        self.ell.is_finite()
    }

    /// Warping function `y(r)`.
    pub fn y(&self, r: f64) -> f64 {
        if r < POLE_EPS {
            return r;
        }
        match &self.family {
            SurfaceFamily::ConstantCurvature { kappa } => {
                let sk = kappa.sqrt();
                (sk * r).sin() / sk
            }
            SurfaceFamily::LambdaSphere { lambda } => {
                let s = r.sin();
                s / (1.0 + lambda * s * s).sqrt()
            }
            SurfaceFamily::Sampled { spline } => spline.eval(r),
        }
    }

    pub fn y_prime(&self, r: f64) -> f64 {
        if r < POLE_EPS {
            return 1.0;
        }
        match &self.family {
            SurfaceFamily::ConstantCurvature { kappa } => (kappa.sqrt() * r).cos(),
            SurfaceFamily::LambdaSphere { lambda } => {
                let u = 1.0 + lambda * r.sin().powi(2);
                r.cos() / u.powf(1.5)
            }
            SurfaceFamily::Sampled { spline } => spline.deriv(r),
        }
    }

    pub fn y_second(&self, r: f64) -> f64 {
        match &self.family {
            SurfaceFamily::ConstantCurvature { kappa } => -kappa.sqrt() * (kappa.sqrt() * r).sin(),
            SurfaceFamily::LambdaSphere { lambda } => {
                let s2 = r.sin().powi(2);
                let u = 1.0 + lambda * s2;
                -r.sin() * (1.0 + 3.0 * lambda - 2.0 * lambda * s2) / u.powf(2.5)
            }
            SurfaceFamily::Sampled { spline } => spline.deriv2(r),
        }
    }

    fn check_domain(&self, r: f64) -> Result<(), ProfileError> {
        if r <= 0.0 || r >= self.ell {
            Err(ProfileError::Domain { r, ell: self.ell })
        } else {
            Ok(())
        }
    }

    /// Gaussian curvature `-y''(r)/y(r)`.
    pub fn gaussian_curvature(&self, r: f64) -> Result<f64, ProfileError> {
        self.check_domain(r)?;
        match &self.family {
            SurfaceFamily::ConstantCurvature { kappa } => Ok(*kappa),
            SurfaceFamily::LambdaSphere { lambda } => {
                let s2 = r.sin().powi(2);
                let u = 1.0 + lambda * s2;
                Ok((1.0 + 3.0 * lambda - 2.0 * lambda * s2) / (u * u))
            }
            SurfaceFamily::Sampled { .. } => Ok(-self.y_second(r) / self.y(r)),
        }
    }

    /// Curvature evaluation that tolerates the poles, for ODE right-hand
    /// sides whose trajectories may graze `r = 0` or `r = ell`.
    pub fn curvature_clamped(&self, r: f64) -> f64 {
        let lo = POLE_EPS;
        let hi = if self.ell.is_finite() { self.ell - POLE_EPS } else { f64::MAX };
        self.gaussian_curvature(r.clamp(lo, hi)).unwrap_or(0.0)
    }

    /// Radial Hessian scalar `h(r) = y'(r)/y(r)`; the Hessian of the distance
    /// function from the base point is `h(r) (ds^2 - dr^2)`.
    pub fn radial_hessian(&self, r: f64) -> Result<f64, ProfileError> {
        self.check_domain(r)?;
        if r < POLE_EPS {
            return Ok(1.0 / r);
        }
        match &self.family {
            SurfaceFamily::LambdaSphere { lambda } => {
                let s = r.sin();
                Ok(r.cos() / (s * (1.0 + lambda * s * s)))
            }
            _ => Ok(self.y_prime(r) / self.y(r)),
        }
    }
}

/// On-disk profile document.
#[derive(Debug, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
enum ProfileDoc {
    Kappa { kappa: f64 },
    Lambda { lambda: f64 },
    Profile { samples: Vec<(f64, f64)> },
}

/// Parse a profile document (JSON) into a validated surface.
pub fn load_profile(json: &str) -> Result<ModelSurface, ProfileError> {
    let doc: ProfileDoc = serde_json::from_str(json)
        .map_err(|e| ProfileError::Validation(vec![format!("malformed document: {e}")]))?;
    match doc {
        ProfileDoc::Kappa { kappa } => ModelSurface::constant_curvature(kappa),
        ProfileDoc::Lambda { lambda } => ModelSurface::lambda_sphere(lambda),
        ProfileDoc::Profile { samples } => ModelSurface::from_samples(&samples),
    }
}

/// Sample a built-in surface onto a uniform grid, mainly to exercise the
/// sampled-profile code path against closed forms.
pub fn resample(surface: &ModelSurface, n: usize) -> ModelSurface {
    let ell = surface.ell();
    assert!(ell.is_finite(), "resample needs a compact surface");
    let samples: Vec<(f64, f64)> = (0..=n)
        .map(|i| {
            let r = ell * i as f64 / n as f64;
            let y = if i == 0 || i == n { 0.0 } else { surface.y(r) };
            (r, y)
        })
        .collect();
    ModelSurface::from_samples(&samples).expect("resampled built-in profile is valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn lambda_zero_is_unit_sphere() {
        let m = ModelSurface::lambda_sphere(0.0).unwrap();
        assert!((m.gaussian_curvature(0.7).unwrap() - 1.0).abs() < 1e-14);
        assert_eq!(m.ell(), PI);
    }

    #[test]
    fn lambda_curvature_printed_value() {
        // lambda = -1/2 at r = pi/2: (1 - 1.5 + 1) / (1/2)^2 = 2.
        let m = ModelSurface::lambda_sphere(-0.5).unwrap();
        assert!((m.gaussian_curvature(PI / 2.0).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn radial_hessian_values() {
        let m = ModelSurface::constant_curvature(1.0).unwrap();
        assert!(m.radial_hessian(PI / 2.0).unwrap().abs() < 1e-14);
        let m = ModelSurface::lambda_sphere(-0.5).unwrap();
        assert!((m.radial_hessian(PI / 4.0).unwrap() - 4.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn radial_hessian_matches_log_derivative() {
        // Centered finite difference of log y as an independent oracle.
        let m = ModelSurface::lambda_sphere(-0.9).unwrap();
        let r = 1.2;
        let h = 1e-6;
        let fd = (m.y(r + h).ln() - m.y(r - h).ln()) / (2.0 * h);
        assert!((m.radial_hessian(r).unwrap() - fd).abs() < 1e-7);
    }

    #[test]
    fn curvature_matches_finite_difference_on_sampled_sine() {
        let samples: Vec<(f64, f64)> = (0..=512)
            .map(|i| {
                let r = PI * i as f64 / 512.0;
                (r, r.sin())
            })
            .collect();
        let m = ModelSurface::from_samples(&samples).unwrap();
        assert!((m.ell() - PI).abs() < PI / 512.0);
        let g = m.gaussian_curvature(0.3).unwrap();
        assert!((g - 1.0).abs() < 1e-4, "sampled unit-sphere curvature: {g}");
    }

    #[test]
    fn domain_errors() {
        let m = ModelSurface::constant_curvature(1.0).unwrap();
        assert!(m.gaussian_curvature(-0.1).is_err());
        assert!(m.gaussian_curvature(PI + 0.1).is_err());
        assert!(m.radial_hessian(0.0).is_err());
    }

    #[test]
    fn load_profile_documents() {
        let m = load_profile(r#"{"family":"lambda","lambda":-0.5}"#).unwrap();
        assert!((m.ell() - PI).abs() < 1e-15);
        let m = load_profile(r#"{"family":"kappa","kappa":2.25}"#).unwrap();
        assert!((m.ell() - PI / 1.5).abs() < 1e-15);
        assert!(load_profile(r#"{"family":"kappa","kappa":-1}"#).is_err());
    }

    #[test]
    fn validation_reports_every_problem() {
        let bad = r#"{"family":"profile","samples":[[0.1,0.0],[0.05,-0.2],[0.2,0.1]]}"#;
        match load_profile(bad) {
            Err(ProfileError::Validation(problems)) => assert!(problems.len() >= 2),
            other => panic!("expected validation error, got {other:?}"),
        }
    }

    #[test]
    fn hessian_ordering_against_round_sphere() {
        // h_lambda(r) >= h_0(r) = cot(r) on (0, pi/2) for -1 < lambda < 0.
        let round = ModelSurface::lambda_sphere(0.0).unwrap();
        for &lambda in &[-0.1, -0.5, -0.9, -0.99] {
            let m = ModelSurface::lambda_sphere(lambda).unwrap();
            for i in 1..200 {
                let r = PI / 2.0 * i as f64 / 200.0;
                assert!(m.radial_hessian(r).unwrap() >= round.radial_hessian(r).unwrap() - 1e-12);
            }
        }
    }
}
