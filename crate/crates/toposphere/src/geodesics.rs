//! Unit-speed geodesics on model surfaces.
//!
//! Built-in families evaluate in closed form: a geodesic of the lambda
//! family is a reparameterized great circle with a linear drift in the
//! angular coordinate, and constant curvature is the round sphere rescaled.
//! Sampled profiles integrate the second-order geodesic system
//! `r'' = y y' theta'^2`, `theta'' = -2 (y'/y) r' theta'` with an adaptive
//! embedded Runge-Kutta 5(4) scheme.

use thiserror::Error;

use crate::num::ode::{integrate, Solution};
use crate::num::optim;
use crate::profile::{ModelSurface, SurfaceFamily};

/// Launch angles closer than this to a meridian are dispatched to the exact
/// meridian path.
const MERIDIAN_EPS: f64 = 1e-12;
/// Integrator tolerance for trajectories and Jacobi fields.
pub const ODE_TOL: f64 = 1e-10;
/// Step cap keeping cubic Hermite dense output below ~1e-9.
const DENSE_MAX_STEP: f64 = 0.02;

#[derive(Debug, Error)]
pub enum GeodesicError {
    #[error("parameter {t} outside the path domain [0, {t_max}]")]
    Domain { t: f64, t_max: f64 },
    #[error("trajectory hits a pole exactly at t = {t}")]
    PoleCrossing { t: f64 },
    #[error("angle root-find failed: {0}")]
    Convergence(String),
}

/// State of a unit-speed geodesic at arclength `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeodesicState {
    pub t: f64,
    pub r: f64,
    /// Unwrapped angular coordinate (monotone along non-meridian rays).
    pub theta: f64,
    pub rdot: f64,
    /// Clairaut constant `y(r)^2 theta'`.
    pub nu: f64,
}

/// Launch data: start radius and angle from the meridian direction that
/// points at the base point (`phi = 0` launches toward it, `phi = pi` away).
#[derive(Debug, Clone, Copy)]
pub struct ShootSpec {
    pub r0: f64,
    pub phi: f64,
}

/// Closed-form ray data: a unit-sphere great circle, an arclength rescaling
/// and an angular drift.
#[derive(Debug, Clone, Copy)]
struct ClosedFormRay {
    /// Start point on the reduced unit sphere: colatitude.
    sin_rho0: f64,
    cos_rho0: f64,
    /// Reduced radial velocity and tangential speed (tangential >= 0).
    vr: f64,
    vt: f64,
    /// Reduced arclength per unit t.
    rate: f64,
    /// Colatitude scaling back to the surface: `r = rho * scale_r`.
    scale_r: f64,
    /// Extra angular drift per unit t (zero for constant curvature).
    drift: f64,
}

impl ClosedFormRay {
    fn eval(&self, t: f64) -> (f64, f64, f64) {
        let s = self.rate * t;
        let (sin_s, cos_s) = s.sin_cos();
        let x = self.sin_rho0 * cos_s + self.vr * self.cos_rho0 * sin_s;
        let y = self.vt * sin_s;
        let z = self.cos_rho0 * cos_s - self.vr * self.sin_rho0 * sin_s;
        let planar = x.hypot(y);
        let rho = planar.atan2(z);
        // Unwrapped azimuth: the great circle crosses the meridian plane at
        // s = k pi exactly, so lift the principal angle into (k pi, k pi + pi).
        let k = (s / std::f64::consts::PI).floor();
        let principal = y.atan2(x);
        let turns = ((k * std::f64::consts::PI - principal)
            / (2.0 * std::f64::consts::PI))
            .ceil();
        let azimuth = principal + 2.0 * std::f64::consts::PI * turns;
        let dz = -self.cos_rho0 * sin_s - self.vr * self.sin_rho0 * cos_s;
        let rho_dot = if planar > 1e-300 { -dz / planar } else { 0.0 };
        (
            rho * self.scale_r,
            azimuth + self.drift * t,
            rho_dot * self.rate * self.scale_r,
        )
    }
}

#[derive(Debug, Clone)]
enum RayBackend {
    ClosedForm(ClosedFormRay),
    /// Meridians are exact reflecting sawtooth paths; no integration needed.
    Meridian {
        /// +1 launches away from the base point, -1 toward it.
        dir: f64,
    },
    Integrated(Solution<4>),
}

/// A single geodesic, evaluable at any arclength up to its horizon.
#[derive(Debug, Clone)]
pub struct Ray {
    spec: ShootSpec,
    nu: f64,
    ell: f64,
    horizon: f64,
    backend: RayBackend,
}

impl Ray {
    /// Construct the geodesic with launch data `spec`, evaluable on
    /// `[0, horizon]`. Closed-form families ignore the horizon.
    pub fn new(surface: &ModelSurface, spec: ShootSpec, horizon: f64) -> Ray {
        let phi = spec.phi;
        let nu = surface.y(spec.r0) * phi.sin();
        if phi.abs() < MERIDIAN_EPS || (std::f64::consts::PI - phi).abs() < MERIDIAN_EPS {
            return Ray {
                spec,
                nu: 0.0,
                ell: surface.ell(),
                horizon,
                backend: RayBackend::Meridian {
                    dir: if phi < 1.0 { -1.0 } else { 1.0 },
                },
            };
        }
        let rdot0 = -phi.cos();
        let backend = match surface.family() {
            SurfaceFamily::ConstantCurvature { kappa } => {
                let sk = kappa.sqrt();
                let rho0 = sk * spec.r0;
                RayBackend::ClosedForm(ClosedFormRay {
                    sin_rho0: rho0.sin(),
                    cos_rho0: rho0.cos(),
                    vr: rdot0,
                    vt: phi.sin(),
                    rate: sk,
                    scale_r: 1.0 / sk,
                    drift: 0.0,
                })
            }
            SurfaceFamily::LambdaSphere { lambda } => {
                let s0 = spec.r0.sin();
                let u0 = 1.0 + lambda * s0 * s0;
                let rate = ((1.0 + rdot0 * rdot0 * lambda * s0 * s0) / u0).sqrt();
                let vr = rdot0 / rate;
                let vt = (1.0 - vr * vr).max(0.0).sqrt();
                RayBackend::ClosedForm(ClosedFormRay {
                    sin_rho0: s0,
                    cos_rho0: spec.r0.cos(),
                    vr,
                    vt,
                    rate,
                    scale_r: 1.0,
                    drift: lambda * nu,
                })
            }
            SurfaceFamily::Sampled { .. } => {
                let y0 = surface.y(spec.r0);
                let state0 = [spec.r0, rdot0, 0.0, phi.sin() / y0];
                let surf = surface.clone();
                let sol = integrate(
                    move |_, s: &[f64; 4]| {
                        let y = surf.y(s[0]);
                        let yp = surf.y_prime(s[0]);
                        [
                            s[1],
                            y * yp * s[3] * s[3],
                            s[3],
                            -2.0 * (yp / y) * s[1] * s[3],
                        ]
                    },
                    0.0,
                    state0,
                    horizon,
                    ODE_TOL,
                    DENSE_MAX_STEP,
                    None,
                );
                RayBackend::Integrated(sol)
            }
        };
        Ray {
            spec,
            nu,
            ell: surface.ell(),
            horizon,
            backend,
        }
    }

    pub fn spec(&self) -> ShootSpec {
        self.spec
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    /// Evaluate `(r, theta, rdot)` at arclength `t >= 0`.
    pub fn state(&self, t: f64) -> GeodesicState {
        let (r, theta, rdot) = match &self.backend {
            RayBackend::ClosedForm(cf) => cf.eval(t),
            RayBackend::Meridian { dir } => self.meridian_eval(*dir, t),
            RayBackend::Integrated(sol) => {
                let s = sol.eval(t);
                (s[0], s[2], s[1])
            }
        };
        GeodesicState {
            t,
            r,
            theta,
            rdot,
            nu: self.nu,
        }
    }

    /// Exact reflecting meridian path; each pole crossing advances theta by pi.
    fn meridian_eval(&self, dir: f64, t: f64) -> (f64, f64, f64) {
        let ell = self.ell;
        let mut r = self.spec.r0;
        let mut v = dir;
        let mut theta = 0.0;
        let mut remaining = t;
        if !ell.is_finite() {
            // One possible reflection at the pole, then escape.
            if v > 0.0 {
                return (r + remaining, 0.0, 1.0);
            }
            if remaining <= r {
                return (r - remaining, 0.0, -1.0);
            }
            return (remaining - r, std::f64::consts::PI, 1.0);
        }
        loop {
            let to_wall = if v > 0.0 { ell - r } else { r };
            if remaining <= to_wall {
                return (r + v * remaining, theta, v);
            }
            remaining -= to_wall;
            r = if v > 0.0 { ell } else { 0.0 };
            v = -v;
            theta += std::f64::consts::PI;
        }
    }

    /// First arclength at which the unwrapped angle reaches `target`
    /// (angles are strictly monotone along non-meridian rays). `None` when
    /// the target is not reached before `t_cap`.
    pub fn theta_time(&self, target: f64, t_cap: f64) -> Option<f64> {
        match &self.backend {
            RayBackend::Meridian { .. } => None,
            _ => {
                if target <= 0.0 {
                    return Some(0.0);
                }
                let f = |t: f64| self.state(t).theta - target;
                if f(t_cap) < 0.0 {
                    return None;
                }
                // Bracket by doubling from a small step, then bisect.
                let mut lo = 0.0;
                let mut hi = (t_cap * 1e-3).max(1e-6);
                while hi < t_cap && f(hi) < 0.0 {
                    lo = hi;
                    hi = (hi * 2.0).min(t_cap);
                }
                Some(optim::bisect(f, lo, hi, 1e-13 * (1.0 + t_cap)))
            }
        }
    }

    /// Arclengths in `(0, t_cap]` where `r` is at a smooth extremum: zeros
    /// of the radial velocity, plus pole-reflection corners on meridians.
    /// Turnings repeat with the radial half-period, so they never bunch up
    /// and a fixed scan density resolves them all.
    pub fn turning_times(&self, t_cap: f64) -> Vec<f64> {
        if let RayBackend::Meridian { dir } = self.backend {
            let mut out = Vec::new();
            let mut t = if dir < 0.0 { self.spec.r0 } else { self.ell - self.spec.r0 };
            if !t.is_finite() {
                return out;
            }
            while t <= t_cap {
                if t > 1e-12 {
                    out.push(t);
                }
                if !self.ell.is_finite() {
                    break;
                }
                t += self.ell;
            }
            return out;
        }
        let n = match &self.backend {
            RayBackend::ClosedForm(cf) => {
                ((t_cap * cf.rate / 0.3).ceil() as usize).clamp(32, 200_000)
            }
            _ => ((t_cap / 0.02).ceil() as usize).clamp(32, 200_000),
        };
        let f = |t: f64| self.state(t).rdot;
        optim::scan_roots(&f, 0.0, t_cap, n, 1e-14 * (1.0 + t_cap))
            .into_iter()
            .filter(|&t| t > 1e-12)
            .collect()
    }

    /// All arclengths in `(0, t_cap]` at which `r` crosses `level`,
    /// including arbitrarily shallow dips: `r` is monotone between turning
    /// points, so each segment is bisected independently.
    pub fn r_crossings(&self, level: f64, t_cap: f64) -> Vec<f64> {
        let mut nodes = vec![0.0];
        nodes.extend(self.turning_times(t_cap));
        nodes.push(t_cap);
        let f = |t: f64| self.state(t).r - level;
        let mut out = Vec::new();
        for w in nodes.windows(2) {
            let (a, b) = (w[0], w[1]);
            if b - a < 1e-14 {
                continue;
            }
            let (fa, fb) = (f(a), f(b));
            if fa == 0.0 && a > 1e-12 {
                out.push(a);
            } else if fa * fb < 0.0 {
                out.push(optim::bisect(f, a, b, 1e-14 * (1.0 + t_cap)));
            }
        }
        if f(t_cap) == 0.0 {
            out.push(t_cap);
        }
        out
    }
}

/// A densely sampled geodesic.
#[derive(Debug, Clone)]
pub struct GeodesicPath {
    pub samples: Vec<GeodesicState>,
}

impl GeodesicPath {
    pub fn t_max(&self) -> f64 {
        self.samples.last().map(|s| s.t).unwrap_or(0.0)
    }

    fn locate(&self, t: f64) -> Result<usize, GeodesicError> {
        if t < 0.0 || t > self.t_max() + 1e-12 {
            return Err(GeodesicError::Domain {
                t,
                t_max: self.t_max(),
            });
        }
        let i = self
            .samples
            .partition_point(|s| s.t <= t)
            .saturating_sub(1)
            .min(self.samples.len().saturating_sub(2));
        Ok(i)
    }

    /// Linear interpolation of the stored samples.
    pub fn state_at(&self, t: f64) -> Result<GeodesicState, GeodesicError> {
        let i = self.locate(t)?;
        let (a, b) = (&self.samples[i], &self.samples[i + 1]);
        let w = if b.t > a.t { (t - a.t) / (b.t - a.t) } else { 0.0 };
        Ok(GeodesicState {
            t,
            r: a.r + w * (b.r - a.r),
            theta: a.theta + w * (b.theta - a.theta),
            rdot: a.rdot + w * (b.rdot - a.rdot),
            nu: a.nu,
        })
    }
}

/// Distance from the base point along the path, i.e. the radial coordinate.
pub fn radial_distance_along(path: &GeodesicPath, t: f64) -> Result<f64, GeodesicError> {
    Ok(path.state_at(t)?.r)
}

/// Shoot a geodesic and sample it densely enough that linear interpolation
/// of `r` and `theta` stays within `tol`.
pub fn shoot(
    surface: &ModelSurface,
    spec: ShootSpec,
    t_max: f64,
    tol: f64,
) -> Result<GeodesicPath, GeodesicError> {
    if !(t_max > 0.0) {
        return Err(GeodesicError::Domain { t: t_max, t_max: 0.0 });
    }
    if spec.r0 <= 0.0 || spec.r0 >= surface.ell() {
        return Err(GeodesicError::Domain {
            t: spec.r0,
            t_max: surface.ell(),
        });
    }
    let ray = Ray::new(surface, spec, t_max);
    let mut samples = vec![ray.state(0.0)];
    let mut stack = vec![(0.0, t_max)];
    let mut segments: Vec<GeodesicState> = Vec::new();
    // Midpoint-refinement: split every interval whose midpoint deviates from
    // the chord by more than tol.
    while let Some((a, b)) = stack.pop() {
        let sa = ray.state(a);
        let sb = ray.state(b);
        let m = 0.5 * (a + b);
        let sm = ray.state(m);
        let r_lin = 0.5 * (sa.r + sb.r);
        let th_lin = 0.5 * (sa.theta + sb.theta);
        if (b - a) > 1e-9
            && ((sm.r - r_lin).abs() > 0.25 * tol || (sm.theta - th_lin).abs() > 0.25 * tol)
        {
            stack.push((m, b));
            stack.push((a, m));
        } else {
            segments.push(sb);
        }
    }
    segments.sort_by(|x, y| x.t.partial_cmp(&y.t).unwrap());
    samples.extend(segments);
    Ok(GeodesicPath { samples })
}

/// Scalar Jacobi solution `f'' + G(r(t)) f = 0` along a path.
#[derive(Debug, Clone)]
pub struct JacobiSolution {
    sol: Solution<2>,
}

impl JacobiSolution {
    pub fn eval(&self, t: f64) -> f64 {
        self.sol.eval(t)[0]
    }

    /// First sign change after `t_from`, refined by bisection.
    pub fn first_zero_after(&self, t_from: f64) -> Option<f64> {
        let mut prev: Option<(f64, f64)> = None;
        for step in &self.sol.steps {
            if step.t <= t_from {
                continue;
            }
            let v = step.y[0];
            if let Some((tp, vp)) = prev {
                if vp > 0.0 && v <= 0.0 || vp < 0.0 && v >= 0.0 {
                    return Some(optim::bisect(|t| self.eval(t), tp, step.t, 1e-12));
                }
            }
            prev = Some((step.t, v));
        }
        None
    }
}

/// Integrate the scalar Jacobi equation along `path` with data
/// `f(0) = f0`, `f'(0) = fdot0`.
pub fn scalar_jacobi(
    surface: &ModelSurface,
    path: &GeodesicPath,
    f0: f64,
    fdot0: f64,
) -> JacobiSolution {
    let sol = integrate(
        |t, s: &[f64; 2]| {
            let r = path.state_at(t).map(|st| st.r).unwrap_or(f64::NAN);
            [s[1], -surface.curvature_clamped(r) * s[0]]
        },
        0.0,
        [f0, fdot0],
        path.t_max(),
        ODE_TOL,
        DENSE_MAX_STEP,
        None,
    );
    JacobiSolution { sol }
}

/// Scalar Jacobi field along a ray (no pre-sampled path needed).
pub fn scalar_jacobi_on_ray(
    surface: &ModelSurface,
    ray: &Ray,
    t_max: f64,
    f0: f64,
    fdot0: f64,
) -> JacobiSolution {
    let sol = integrate(
        |t, s: &[f64; 2]| {
            let r = ray.state(t).r;
            [s[1], -surface.curvature_clamped(r) * s[0]]
        },
        0.0,
        [f0, fdot0],
        t_max,
        ODE_TOL,
        DENSE_MAX_STEP,
        None,
    );
    JacobiSolution { sol }
}

/// One geodesic connecting the source parallel point to a target point.
#[derive(Debug, Clone, Copy)]
pub struct Connection {
    pub length: f64,
    /// Launch angle from the meridian-toward-base direction, in `[0, pi]`.
    /// `swept_down` records that the realized geodesic is the mirror image
    /// (angle swept in the negative direction).
    pub phi: f64,
    pub swept_down: bool,
    pub arrival_rdot: f64,
}

/// All candidate minimizing geodesics from `(r_from, 0)` to `(r_to, dtheta)`
/// with `dtheta` in `[0, pi]`, sorted by length.
pub fn connect(
    surface: &ModelSurface,
    r_from: f64,
    r_to: f64,
    dtheta: f64,
    fan: usize,
) -> Result<Vec<Connection>, GeodesicError> {
    connect_within(surface, r_from, r_to, dtheta, fan, 1.0)
}

/// Like [`connect`], but keeps connections up to `cap_factor` times the
/// meridian-route distance bound, so callers can see the runner-up geodesic
/// family as well as the minimizer.
pub fn connect_within(
    surface: &ModelSurface,
    r_from: f64,
    r_to: f64,
    dtheta: f64,
    fan: usize,
    cap_factor: f64,
) -> Result<Vec<Connection>, GeodesicError> {
    let ell = surface.ell();
    let mut out: Vec<Connection> = Vec::new();
    // Upper bound on the distance: meridian routes through the poles.
    let mut bound = r_from + r_to;
    if ell.is_finite() {
        bound = bound.min(2.0 * ell - r_from - r_to);
    }
    let t_cap = bound * (1.0 + 1e-9) + 1e-12;
    // Enumerate crossings with headroom past the bound so that branches
    // whose lengths flirt with the bound itself stay visible to the scan.
    let t_search = bound * 1.25 + 0.1;

    // Meridian candidates.
    let dpi = std::f64::consts::PI;
    if dtheta.abs() < 1e-9 {
        out.push(Connection {
            length: (r_from - r_to).abs(),
            phi: if r_to >= r_from { dpi } else { 0.0 },
            swept_down: false,
            arrival_rdot: if r_to >= r_from { 1.0 } else { -1.0 },
        });
    }
    if (dtheta - dpi).abs() < 1e-9 {
        out.push(Connection {
            length: r_from + r_to,
            phi: 0.0,
            swept_down: false,
            arrival_rdot: 1.0,
        });
        if ell.is_finite() {
            out.push(Connection {
                length: 2.0 * ell - r_from - r_to,
                phi: dpi,
                swept_down: false,
                arrival_rdot: -1.0,
            });
        }
    }

    // Non-meridian candidates. A connecting geodesic either crosses the
    // target parallel transversally with the right swept angle, or arrives
    // tangentially at a turning point of r. Both are root-finds over the
    // launch fan: the k-th parallel crossing (respectively turning point)
    // moves continuously with the launch angle, so its swept angle
    // (respectively radius) is a smooth residual to solve.
    let mut sweep_targets = Vec::new();
    if dtheta > 1e-9 {
        sweep_targets.push((dtheta, false));
    }
    if dtheta < dpi - 1e-9 && surface.is_compact() {
        sweep_targets.push((2.0 * dpi - dtheta, true));
    }
    const K_MAX: usize = 8;
    // Offset keeping fan endpoints off the exact meridians.
    const FAN_EPS: f64 = 1e-7;
    // Rays and their crossing/turning lists are reused heavily across the
    // residual scans; cache them per launch angle.
    use std::cell::RefCell;
    use std::collections::HashMap;
    use std::rc::Rc;
    type RayCache = HashMap<u64, Rc<(Ray, Vec<f64>, Vec<f64>)>>;
    let cache: RefCell<RayCache> = RefCell::new(HashMap::new());
    let ray_at = |phi: f64| -> Rc<(Ray, Vec<f64>, Vec<f64>)> {
        let key = phi.to_bits();
        if let Some(hit) = cache.borrow().get(&key) {
            return hit.clone();
        }
        let ray = Ray::new(surface, ShootSpec { r0: r_from, phi }, t_search);
        let crossings = ray.r_crossings(r_to, t_search);
        let turnings = ray.turning_times(t_search);
        let entry = Rc::new((ray, crossings, turnings));
        cache.borrow_mut().insert(key, entry.clone());
        entry
    };

    for &(sweep, swept_down) in &sweep_targets {
        // Residual for crossing index k: swept angle at the crossing minus
        // the target; None when the ray has fewer crossings in range.
        let residual = |phi: f64, k: usize| -> Option<(f64, f64, f64)> {
            let data = ray_at(phi);
            let t = *data.1.get(k)?;
            let st = data.0.state(t);
            Some((st.theta - sweep, t, st.rdot))
        };
        for k in 0..K_MAX {
            let grid: Vec<(f64, Option<f64>)> = (0..=fan)
                .map(|i| {
                    let phi = FAN_EPS + (dpi - 2.0 * FAN_EPS) * i as f64 / fan as f64;
                    (phi, residual(phi, k).map(|v| v.0))
                })
                .collect();
            if grid.iter().all(|(_, g)| g.is_none()) {
                break;
            }
            let try_bracket = |lo: f64, hi: f64, out: &mut Vec<Connection>| {
                let root = optim::bisect(
                    |p| residual(p, k).map(|v| v.0).unwrap_or(f64::NAN),
                    lo,
                    hi,
                    1e-12,
                );
                if let Some((res, t, rdot)) = residual(root, k) {
                    if res.abs() < 1e-6 {
                        out.push(Connection {
                            length: t,
                            phi: root,
                            swept_down,
                            arrival_rdot: rdot,
                        });
                    }
                }
            };
            for w in grid.windows(2) {
                match (w[0], w[1]) {
                    ((phi_p, Some(g_p)), (phi, Some(g))) => {
                        if g_p == 0.0 {
                            try_bracket(phi_p, phi_p, &mut out);
                        } else if g_p * g < 0.0 {
                            try_bracket(phi_p, phi, &mut out);
                        }
                    }
                    // The k-th crossing branch ends inside this window (the
                    // dip folds away). Walk up to the fold and check whether
                    // the residual changes sign before it.
                    ((phi_d, Some(g_d)), (phi_u, None)) | ((phi_u, None), (phi_d, Some(g_d))) => {
                        let mut a = phi_d;
                        let mut b = phi_u;
                        for _ in 0..60 {
                            let m = 0.5 * (a + b);
                            if residual(m, k).is_some() {
                                a = m;
                            } else {
                                b = m;
                            }
                        }
                        if let Some((g_edge, _, _)) = residual(a, k) {
                            if g_d == 0.0 {
                                try_bracket(phi_d, phi_d, &mut out);
                            } else if g_d * g_edge < 0.0 {
                                try_bracket(phi_d.min(a), phi_d.max(a), &mut out);
                            }
                        }
                    }
                    _ => {}
                }
            }
        }

        // Tangential arrivals: the m-th turning radius equals r_to and the
        // swept angle there matches the target.
        let turning = |phi: f64, m: usize| -> Option<(f64, f64, f64)> {
            let data = ray_at(phi);
            let t = *data.2.get(m)?;
            let st = data.0.state(t);
            Some((st.r - r_to, t, st.theta))
        };
        for m in 0..K_MAX {
            let grid: Vec<(f64, Option<f64>)> = (0..=fan)
                .map(|i| {
                    let phi = FAN_EPS + (dpi - 2.0 * FAN_EPS) * i as f64 / fan as f64;
                    (phi, turning(phi, m).map(|v| v.0))
                })
                .collect();
            if grid.iter().all(|(_, g)| g.is_none()) {
                break;
            }
            for w in grid.windows(2) {
                let ((phi_p, Some(g_p)), (phi, Some(g))) = (w[0], w[1]) else {
                    continue;
                };
                if g_p * g < 0.0 || g_p == 0.0 {
                    let root = if g_p == 0.0 {
                        phi_p
                    } else {
                        optim::bisect(
                            |p| turning(p, m).map(|v| v.0).unwrap_or(f64::NAN),
                            phi_p,
                            phi,
                            1e-12,
                        )
                    };
                    if let Some((res, t, th)) = turning(root, m) {
                        if res.abs() < 1e-7 && (th - sweep).abs() < 1e-6 {
                            out.push(Connection {
                                length: t,
                                phi: root,
                                swept_down,
                                arrival_rdot: 0.0,
                            });
                        }
                    }
                }
            }
        }
    }
    out.retain(|c| c.length <= t_cap * cap_factor.max(1.0));
    if out.is_empty() {
        return Err(GeodesicError::Convergence(format!(
            "no connecting geodesic found: r_from={r_from}, r_to={r_to}, dtheta={dtheta}"
        )));
    }
    out.sort_by(|a, b| a.length.partial_cmp(&b.length).unwrap());
    out.dedup_by(|a, b| (a.length - b.length).abs() < 1e-8 && (a.phi - b.phi).abs() < 1e-6);
    Ok(out)
}

/// Geodesic distance between two points of the surface.
pub fn distance(
    surface: &ModelSurface,
    a: (f64, f64),
    b: (f64, f64),
    fan: usize,
) -> Result<f64, GeodesicError> {
    if let SurfaceFamily::ConstantCurvature { kappa } = surface.family() {
        let sk = kappa.sqrt();
        let c = (sk * a.0).cos() * (sk * b.0).cos()
            + (sk * a.0).sin() * (sk * b.0).sin() * (a.1 - b.1).cos();
        return Ok(c.clamp(-1.0, 1.0).acos() / sk);
    }
    // Reduce to a source on the zero meridian by rotational symmetry.
    let mut dt = (a.1 - b.1).abs() % (2.0 * std::f64::consts::PI);
    if dt > std::f64::consts::PI {
        dt = 2.0 * std::f64::consts::PI - dt;
    }
    let conns = connect(surface, a.0, b.0, dt, fan)?;
    Ok(conns[0].length)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::ModelSurface;
    use std::f64::consts::PI;

    fn residuals(surface: &ModelSurface, ray: &Ray, t_max: f64) -> (f64, f64) {
        let mut unit = 0.0f64;
        let mut clairaut = 0.0f64;
        for i in 0..=400 {
            let t = t_max * i as f64 / 400.0;
            let s = ray.state(t);
            let y = surface.y(s.r);
            unit = unit.max((s.rdot * s.rdot + s.nu * s.nu / (y * y) - 1.0).abs());
            // theta' from finite difference to probe the Clairaut constant.
            let h = 1e-6;
            if t > h && t + h < t_max {
                let td = (ray.state(t + h).theta - ray.state(t - h).theta) / (2.0 * h);
                clairaut = clairaut.max((y * y * td - s.nu).abs());
            }
        }
        (unit, clairaut)
    }

    #[test]
    fn unit_sphere_perpendicular_shot() {
        let m = ModelSurface::lambda_sphere(0.0).unwrap();
        let ray = Ray::new(&m, ShootSpec { r0: 1.0, phi: PI / 2.0 }, 10.0);
        let s = ray.state(PI);
        assert!((s.r - (PI - 1.0)).abs() < 1e-12, "antipodal parallel, got r = {}", s.r);
        // Great circle on the unit sphere: r(t) = arccos(cos r0 cos t).
        for i in 0..50 {
            let t = 3.0 * i as f64 / 49.0;
            let expected = (1.0f64.cos() * t.cos()).acos();
            assert!((ray.state(t).r - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn lambda_sphere_angle_formula() {
        // theta(t) = t phi0 lambda sin(r0) + arctan(tan(t phi0)/sin r0),
        // branch-continued, for the perpendicular launch.
        let lambda = -0.5;
        let r0 = 1.0f64;
        let m = ModelSurface::lambda_sphere(lambda).unwrap();
        let ray = Ray::new(&m, ShootSpec { r0, phi: PI / 2.0 }, 10.0);
        let phi0 = 1.0 / (1.0 + lambda * r0.sin().powi(2)).sqrt();
        for i in 1..=100 {
            let t = 2.0 * i as f64 / 100.0;
            let x = t * phi0;
            let branch = ((x + PI / 2.0) / PI).floor();
            let expected = x * lambda * r0.sin() + (x.tan() / r0.sin()).atan() + branch * PI;
            let got = ray.state(t).theta;
            assert!(
                (got - expected).abs() < 1e-9,
                "t = {t}: theta {got} vs formula {expected}"
            );
        }
    }

    #[test]
    fn lambda_radial_closed_form_general_launch() {
        // r(t) = arccos(cos r0 cos(t phi) - rdot0 sin r0 sin(t phi)/phi).
        let lambda = -0.7;
        let r0: f64 = 2.1;
        let phi_launch = 2.2;
        let m = ModelSurface::lambda_sphere(lambda).unwrap();
        let ray = Ray::new(&m, ShootSpec { r0, phi: phi_launch }, 10.0);
        let rdot0 = -phi_launch.cos();
        let s0 = r0.sin();
        let phi = ((1.0 + rdot0 * rdot0 * lambda * s0 * s0) / (1.0 + lambda * s0 * s0)).sqrt();
        for i in 0..=80 {
            let t = 2.5 * i as f64 / 80.0;
            let expected =
                (r0.cos() * (t * phi).cos() - rdot0 * s0 * (t * phi).sin() / phi).acos();
            assert!((ray.state(t).r - expected).abs() < 1e-11);
        }
    }

    #[test]
    fn closed_form_residuals_small() {
        let m = ModelSurface::lambda_sphere(-0.5).unwrap();
        for &(r0, phi) in &[(1.0, 1.0), (0.4, 2.5), (2.8, 0.3), (1.5707, 1.5707)] {
            let ray = Ray::new(&m, ShootSpec { r0, phi }, 10.0);
            let (u, c) = residuals(&m, &ray, 2.0 * PI);
            assert!(u < 1e-10, "unit-speed residual {u}");
            assert!(c < 1e-7, "clairaut residual {c}");
        }
    }

    #[test]
    fn integrator_matches_closed_form_on_sampled_surface() {
        let analytic = ModelSurface::lambda_sphere(-0.5).unwrap();
        let sampled = crate::profile::resample(&analytic, 2048);
        let spec = ShootSpec { r0: 1.0, phi: PI / 2.0 };
        let exact = Ray::new(&analytic, spec, 8.0);
        let numeric = Ray::new(&sampled, spec, 8.0);
        for i in 0..=100 {
            let t = 6.0 * i as f64 / 100.0;
            let a = exact.state(t);
            let b = numeric.state(t);
            assert!((a.r - b.r).abs() < 1e-6, "r mismatch at t={t}: {} vs {}", a.r, b.r);
            assert!((a.theta - b.theta).abs() < 1e-6, "theta mismatch at t={t}");
        }
    }

    #[test]
    fn meridian_path_reflects_at_poles() {
        let m = ModelSurface::lambda_sphere(0.0).unwrap();
        let ray = Ray::new(&m, ShootSpec { r0: 1.0, phi: 0.0 }, 10.0);
        let s = ray.state(0.4);
        assert!((s.r - 0.6).abs() < 1e-15 && s.theta == 0.0);
        let s = ray.state(1.5);
        assert!((s.r - 0.5).abs() < 1e-15);
        assert!((s.theta - PI).abs() < 1e-15, "crossed the pole onto the opposite meridian");
        // At t = 1 + pi the path sits exactly on the far pole.
        let s = ray.state(1.0 + PI);
        assert!((s.r - PI).abs() < 1e-12);
    }

    #[test]
    fn jacobi_meridian_on_unit_sphere() {
        let m = ModelSurface::constant_curvature(1.0).unwrap();
        let path = shoot(&m, ShootSpec { r0: 0.5, phi: 0.0 }, 3.5, 1e-9).unwrap();
        let j = scalar_jacobi(&m, &path, 0.0, 1.0);
        for i in 1..20 {
            let t = 2.8 * i as f64 / 20.0;
            assert!((j.eval(t) - t.sin()).abs() < 1e-8);
        }
        let z = j.first_zero_after(0.1).expect("conjugate point");
        assert!((z - PI).abs() < 1e-8);
    }

    #[test]
    fn jacobi_meridian_equals_profile_on_lambda_sphere() {
        // Along a meridian from (nearly) the base point, the perpendicular
        // Jacobi field with f(0) = 0, f'(0) = 1 is y itself.
        let m = ModelSurface::lambda_sphere(-0.6).unwrap();
        let r0 = 1e-7;
        let meridian = shoot(&m, ShootSpec { r0, phi: PI }, 3.0, 1e-9).unwrap();
        let jm = scalar_jacobi(&m, &meridian, 0.0, 1.0);
        for i in 1..=20 {
            let t = 2.5 * i as f64 / 20.0;
            let expected = m.y(r0 + t);
            assert!(
                (jm.eval(t) - expected).abs() < 1e-6,
                "t={t}: jacobi {} vs profile {}",
                jm.eval(t),
                expected
            );
        }
    }

    #[test]
    fn distance_law_of_cosines() {
        let m = ModelSurface::constant_curvature(1.0).unwrap();
        let d = distance(&m, (1.0, 0.0), (1.0, PI), 0).unwrap();
        let expected = (1.0f64.cos().powi(2) + 1.0f64.sin().powi(2) * PI.cos()).acos();
        assert!((d - expected).abs() < 1e-14);
        assert!((d - 2.0).abs() < 1e-14);
    }

    #[test]
    fn lambda_distance_to_cut_endpoint() {
        let lambda = -0.5;
        let r0: f64 = 1.0;
        let m = ModelSurface::lambda_sphere(lambda).unwrap();
        // Endpoint of the cut arc: on the parallel pi - r0 at angle
        // pi (1 + lambda sin r0), at distance pi sqrt(1 + lambda sin^2 r0).
        let theta_end = PI * (1.0 + lambda * r0.sin());
        let expected = PI * (1.0 + lambda * r0.sin().powi(2)).sqrt();
        let d = distance(&m, (r0, 0.0), (PI - r0, theta_end), 256).unwrap();
        assert!((d - expected).abs() < 1e-8, "endpoint distance {d} vs {expected}");
    }

    #[test]
    fn distance_symmetry_random_pairs() {
        let m = ModelSurface::lambda_sphere(-0.3).unwrap();
        let mut rng = crate::num::rng::SplitMix64::new(11);
        for _ in 0..100 {
            let a = (rng.range(0.2, 2.9), rng.range(0.0, PI));
            let b = (rng.range(0.2, 2.9), rng.range(0.0, PI));
            let d1 = distance(&m, a, b, 128).unwrap();
            let d2 = distance(&m, b, a, 128).unwrap();
            assert!((d1 - d2).abs() < 1e-7, "asymmetry {} vs {}", d1, d2);
        }
    }

    #[test]
    fn shoot_path_interpolation_error() {
        let m = ModelSurface::lambda_sphere(-0.5).unwrap();
        let spec = ShootSpec { r0: 1.0, phi: 1.2 };
        let path = shoot(&m, spec, 6.0, 1e-8).unwrap();
        let ray = Ray::new(&m, spec, 6.0);
        for i in 0..=500 {
            let t = 6.0 * i as f64 / 500.0;
            let a = path.state_at(t).unwrap();
            let b = ray.state(t);
            assert!((a.r - b.r).abs() < 1e-8);
            assert!((a.theta - b.theta).abs() < 1e-8);
        }
        // Refinement-based interpolation check from the spec contract.
        assert!((radial_distance_along(&path, 0.0).unwrap() - 1.0).abs() < 1e-12);
    }
}
