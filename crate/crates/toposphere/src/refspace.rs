//! The reference space of a base pair: the image of the half-surface under
//! `q -> (d(p, q), d(o, q))`, its inversion, and the slope field whose
//! integral curves are the images of geodesics from the first vertex.

use serde::Serialize;
use thiserror::Error;

use crate::cutlocus::{self, CutStructure};
use crate::geodesics::{self, Ray, ShootSpec};
use crate::num::optim;
use crate::profile::{ModelSurface, SurfaceFamily};

const PI: f64 = std::f64::consts::PI;
/// Points closer than this to the reference-space boundary are treated as
/// boundary points, where the slope field is left undefined.
const BOUNDARY_TOL: f64 = 1e-9;
/// Height offset inside which a reference point counts as on the cut image.
const CUT_TOL: f64 = 1e-7;

#[derive(Debug, Error)]
pub enum RefSpaceError {
    #[error("point ({x}, {y}) lies outside the reference space")]
    OutsideReferenceSpace { x: f64, y: f64 },
    #[error("slope field undefined on the reference-space boundary at ({x}, {y})")]
    UndefinedOnBoundary { x: f64, y: f64 },
    #[error("slope-field solution exited the reference space at t = {t}")]
    ExitedReferenceSpace { t: f64, curve: ReferenceCurve },
    #[error("inversion failed at ({x}, {y}): {reason}")]
    InversionFailed { x: f64, y: f64, reason: String },
    #[error(transparent)]
    Cut(#[from] cutlocus::CutError),
}

/// A point of the reference plane: `x = d(p, .)`, `y = d(o, .)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReferencePoint {
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SlopeRegime {
    Interior,
    CutPoint,
    Boundary,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct SlopeSample {
    pub point: ReferencePoint,
    pub value: f64,
    pub regime: SlopeRegime,
}

/// A sampled curve `t -> (x(t), y(t))` with `x(t) = t`: heights of a
/// unit-speed curve over its own arclength.
#[derive(Debug, Clone, Serialize)]
pub struct ReferenceCurve {
    /// `(t, y)` samples with strictly increasing `t`.
    pub samples: Vec<(f64, f64)>,
}

impl ReferenceCurve {
    pub fn new(samples: Vec<(f64, f64)>) -> Self {
        debug_assert!(samples.windows(2).all(|w| w[1].0 > w[0].0));
        Self { samples }
    }

    pub fn t_start(&self) -> f64 {
        self.samples.first().map(|s| s.0).unwrap_or(f64::NAN)
    }

    pub fn t_end(&self) -> f64 {
        self.samples.last().map(|s| s.0).unwrap_or(f64::NAN)
    }

    pub fn y_at(&self, t: f64) -> f64 {
        let s = &self.samples;
        if t <= s[0].0 {
            return s[0].1;
        }
        if t >= s[s.len() - 1].0 {
            return s[s.len() - 1].1;
        }
        let i = s.partition_point(|&(ts, _)| ts <= t) - 1;
        let (a, b) = (s[i], s[i + 1]);
        a.1 + (t - a.0) / (b.0 - a.0) * (b.1 - a.1)
    }

    /// Right-hand derivative estimate: quadratic Lagrange stencil through
    /// the base sample and the next two, second-order on smooth stretches.
    pub fn right_deriv_at(&self, t: f64) -> f64 {
        let s = &self.samples;
        let i0 = s
            .partition_point(|&(ts, _)| ts <= t + 1e-12)
            .saturating_sub(1)
            .min(s.len().saturating_sub(2));
        if i0 + 2 >= s.len() {
            let (a, b) = (s[s.len() - 2], s[s.len() - 1]);
            return (b.1 - a.1) / (b.0 - a.0);
        }
        let (t0, y0) = s[i0];
        let (t1, y1) = s[i0 + 1];
        let (t2, y2) = s[i0 + 2];
        // Derivative of the interpolating quadratic, evaluated at t.
        let l0 = (2.0 * t - t1 - t2) / ((t0 - t1) * (t0 - t2));
        let l1 = (2.0 * t - t0 - t2) / ((t1 - t0) * (t1 - t2));
        let l2 = (2.0 * t - t0 - t1) / ((t2 - t0) * (t2 - t1));
        y0 * l0 + y1 * l1 + y2 * l2
    }
}

/// The reference space of `(surface, r0)` with its cut structure.
pub struct RefSpace<'a> {
    pub surface: &'a ModelSurface,
    pub r0: f64,
    cut: CutStructure,
}

impl<'a> RefSpace<'a> {
    pub fn new(
        surface: &'a ModelSurface,
        r0: f64,
        resolution: usize,
    ) -> Result<Self, RefSpaceError> {
        let cut = cutlocus::cut_structure(surface, r0, resolution)?;
        Ok(Self { surface, r0, cut })
    }

    pub fn cut(&self) -> &CutStructure {
        &self.cut
    }

    /// Largest `x` attained at height `y`: the distance from the first
    /// vertex to the opposite-meridian point at that height.
    pub fn x_max_at(&self, y: f64) -> f64 {
        let ell = self.surface.ell();
        match self.surface.family() {
            SurfaceFamily::ConstantCurvature { .. } | SurfaceFamily::LambdaSphere { .. } => {
                (self.r0 + y).min(2.0 * ell - self.r0 - y)
            }
            SurfaceFamily::Sampled { .. } => {
                let mut bound = self.r0 + y;
                if ell.is_finite() {
                    bound = bound.min(2.0 * ell - self.r0 - y);
                }
                geodesics::distance(self.surface, (self.r0, 0.0), (y, PI), 96).unwrap_or(bound)
            }
        }
    }

    /// Membership in the image of the closed half-surface.
    pub fn membership(&self, pt: ReferencePoint) -> bool {
        let (x, y) = (pt.x, pt.y);
        let ell = self.surface.ell();
        if y < -BOUNDARY_TOL || (ell.is_finite() && y > ell + BOUNDARY_TOL) {
            return false;
        }
        if x + y < self.r0 - 1e-9 || (y - x).abs() > self.r0 + 1e-9 {
            return false;
        }
        x <= self.x_max_at(y) + 1e-9
    }

    fn on_boundary(&self, pt: ReferencePoint) -> bool {
        let (x, y) = (pt.x, pt.y);
        (x + y - self.r0).abs() < BOUNDARY_TOL
            || ((y - x).abs() - self.r0).abs() < BOUNDARY_TOL
            || (x - self.x_max_at(y)).abs() < BOUNDARY_TOL
            || y < BOUNDARY_TOL
            || (self.surface.ell().is_finite() && y > self.surface.ell() - BOUNDARY_TOL)
    }

    /// The cut arc (and parameter offset) whose image passes through `pt`.
    pub fn cut_image_at(&self, pt: ReferencePoint) -> Option<&cutlocus::CutArc> {
        for arc in self.cut.arcs() {
            if arc.is_trunk {
                continue;
            }
            if pt.x >= arc.t_start() - CUT_TOL && pt.x <= arc.t_end() + CUT_TOL {
                if let Ok(h) = arc.height_at(pt.x.clamp(arc.t_start(), arc.t_end())) {
                    if (h - pt.y).abs() < CUT_TOL.max(1e-6) {
                        return Some(arc);
                    }
                }
            }
        }
        None
    }

    /// The minimizing geodesic from the first vertex realizing `pt`: the
    /// launch angle whose ray is at radius `y` after arclength `x`, with the
    /// arrival still minimizing.
    fn minimizing_ray(&self, pt: ReferencePoint) -> Result<(f64, Ray), RefSpaceError> {
        let (x, y) = (pt.x, pt.y);
        let horizon = x * 1.01 + 1e-6;
        let f = |phi: f64| {
            let ray = Ray::new(self.surface, ShootSpec { r0: self.r0, phi }, horizon);
            ray.state(x).r - y
        };
        let mut candidates: Vec<f64> = Vec::new();
        let grid = 128;
        let mut prev: Option<(f64, f64)> = None;
        for i in 0..=grid {
            let phi = 1e-9 + (PI - 2e-9) * i as f64 / grid as f64;
            let g = f(phi);
            if let Some((pp, gp)) = prev {
                if gp * g <= 0.0 && (gp != 0.0 || g != 0.0) {
                    candidates.push(optim::bisect(f, pp, phi, 1e-13));
                }
            }
            prev = Some((phi, g));
        }
        // Prefer rays still minimizing at arclength x; fall back to the
        // smallest residual candidate (boundary of the cut image).
        let mut best: Option<(f64, f64)> = None;
        for &phi in &candidates {
            let slack = self.cut.tau_at(phi) - x;
            if best.map(|(s, _)| slack > s).unwrap_or(true) {
                best = Some((slack, phi));
            }
        }
        match best {
            Some((slack, phi)) if slack > -1e-4 => Ok((
                phi,
                Ray::new(self.surface, ShootSpec { r0: self.r0, phi }, horizon),
            )),
            _ => Err(RefSpaceError::InversionFailed {
                x,
                y,
                reason: format!(
                    "no minimizing launch angle found ({} candidates)",
                    candidates.len()
                ),
            }),
        }
    }

    /// Invert the reference map on the half-surface: the unique point
    /// `(y, theta)` at distance `x` from the first vertex.
    pub fn invert(&self, pt: ReferencePoint) -> Result<(f64, f64), RefSpaceError> {
        if !self.membership(pt) {
            return Err(RefSpaceError::OutsideReferenceSpace { x: pt.x, y: pt.y });
        }
        let (x, y) = (pt.x, pt.y);
        // Degenerate heights: the base point and (for compact surfaces) the
        // far pole lie on every meridian.
        if y < 1e-9 {
            return Ok((0.0, 0.0));
        }
        if let SurfaceFamily::ConstantCurvature { kappa } = self.surface.family() {
            let sk = kappa.sqrt();
            let denom = (sk * self.r0).sin() * (sk * y).sin();
            if denom.abs() < 1e-300 {
                return Ok((y, 0.0));
            }
            let c = ((sk * x).cos() - (sk * self.r0).cos() * (sk * y).cos()) / denom;
            return Ok((y, c.clamp(-1.0, 1.0).acos()));
        }
        // Meridian boundary cases are exact.
        if (x - (self.r0 - y)).abs() < 1e-12 || (x - (y - self.r0)).abs() < 1e-12 {
            return Ok((y, 0.0));
        }
        let (_, ray) = self.minimizing_ray(pt)?;
        let st = ray.state(x);
        let theta = st.theta.rem_euclid(2.0 * PI);
        let theta = if theta > PI { 2.0 * PI - theta } else { theta };
        Ok((y, theta))
    }

    /// Slope field value at a reference point.
    pub fn slope(&self, pt: ReferencePoint) -> Result<SlopeSample, RefSpaceError> {
        if !self.membership(pt) {
            return Err(RefSpaceError::OutsideReferenceSpace { x: pt.x, y: pt.y });
        }
        if self.on_boundary(pt) {
            return Err(RefSpaceError::UndefinedOnBoundary { x: pt.x, y: pt.y });
        }
        if let Some(arc) = self.cut_image_at(pt) {
            let value = cutlocus::arc_height_right_derivative(arc, pt.x.clamp(arc.t_start(), arc.t_end()))?;
            return Ok(SlopeSample {
                point: pt,
                value,
                regime: SlopeRegime::CutPoint,
            });
        }
        if let SurfaceFamily::ConstantCurvature { kappa } = self.surface.family() {
            let sk = kappa.sqrt();
            let value = ((sk * self.r0).cos() - (sk * pt.y).cos() * (sk * pt.x).cos())
                / ((sk * pt.x).sin() * (sk * pt.y).sin());
            return Ok(SlopeSample {
                point: pt,
                value,
                regime: SlopeRegime::Interior,
            });
        }
        let (_, ray) = self.minimizing_ray(pt)?;
        Ok(SlopeSample {
            point: pt,
            value: ray.state(pt.x).rdot,
            regime: SlopeRegime::Interior,
        })
    }

    /// The geodesic-then-cut-arc curve at launch angle `phi`: follows the
    /// geodesic until its cut time, then the branch arc toward the trunk.
    /// Its height function solves the slope field from the right.
    pub fn varsigma(&self, phi: f64) -> ReferenceCurve {
        let ell = self.surface.ell();
        let horizon = if ell.is_finite() {
            (self.r0 + ell) * 1.02
        } else {
            self.r0 + 20.0
        };
        let ray = Ray::new(self.surface, ShootSpec { r0: self.r0, phi }, horizon);
        // Cut time: first meeting with a branch-arc image, the opposite
        // meridian, or the tabulated per-ray cut distance.
        let mut tau = self.cut.tau_at(phi);
        for arc in self.cut.arcs() {
            if arc.is_trunk {
                continue;
            }
            if let Some(t) = cutlocus::first_arc_crossing(&ray, arc, horizon) {
                if t < tau {
                    tau = t;
                }
            }
        }
        let mut samples: Vec<(f64, f64)> = Vec::new();
        let n_geo = 1024;
        let t_geo = tau.min(horizon);
        for i in 0..=n_geo {
            let t = t_geo * i as f64 / n_geo as f64;
            samples.push((t, ray.state(t).r));
        }
        // Continue along the branch arc containing the cut point, if any.
        if tau.is_finite() {
            let cut_pt = ray.state(tau);
            for arc in self.cut.arcs() {
                if arc.is_trunk {
                    continue;
                }
                if tau >= arc.t_start() - 1e-6 && tau <= arc.t_end() + 1e-6 {
                    if let Ok(h) = arc.height_at(tau.clamp(arc.t_start(), arc.t_end())) {
                        if (h - cut_pt.r).abs() < 1e-4 {
                            let n_arc = 256;
                            for i in 1..=n_arc {
                                let t = tau + (arc.t_end() - tau) * i as f64 / n_arc as f64;
                                if let Ok(h) = arc.height_at(t) {
                                    samples.push((t, h));
                                }
                            }
                            break;
                        }
                    }
                }
            }
        }
        samples.dedup_by(|a, b| (a.0 - b.0).abs() < 1e-12);
        ReferenceCurve::new(samples)
    }

    /// Forward-Euler solution (with one Richardson refinement per step) of
    /// `f' = slope(t, f) + perturbation(t)` from `start`, stopping at
    /// `t_end` or when the solution leaves the reference space.
    pub fn solve_slope_ode(
        &self,
        start: ReferencePoint,
        perturbation: &dyn Fn(f64) -> f64,
        t_end: f64,
    ) -> Result<ReferenceCurve, RefSpaceError> {
        let h: f64 = 1e-3;
        let mut t = start.x;
        let mut y = start.y;
        let mut samples = vec![(t, y)];
        let field = |t: f64, y: f64| -> Result<f64, RefSpaceError> {
            Ok(self.slope(ReferencePoint { x: t, y })?.value + perturbation(t))
        };
        while t < t_end - 1e-12 {
            let step = h.min(t_end - t);
            let f0 = match field(t, y) {
                Ok(v) => v,
                Err(_) => {
                    return Err(RefSpaceError::ExitedReferenceSpace {
                        t,
                        curve: ReferenceCurve::new(samples),
                    })
                }
            };
            // One Richardson refinement: two half steps vs one full step.
            let full = y + step * f0;
            let half = y + 0.5 * step * f0;
            let refined = match field(t + 0.5 * step, half) {
                Ok(f1) => {
                    let two_half = half + 0.5 * step * f1;
                    2.0 * two_half - full
                }
                Err(_) => full,
            };
            t += step;
            y = refined;
            if !self.membership(ReferencePoint { x: t, y }) {
                samples.push((t, y));
                return Err(RefSpaceError::ExitedReferenceSpace {
                    t,
                    curve: ReferenceCurve::new(samples),
                });
            }
            samples.push((t, y));
        }
        Ok(ReferenceCurve::new(samples))
    }
}
