//! Cut locus of a point on a model surface.
//!
//! The base vertex sits at `(r0, 0)`. Cut points in the closed half-surface
//! are found as equal-length meetings of a geodesic with the mirror image of
//! another fan geodesic (the swept angles sum to `2 pi`), or as first
//! conjugate points. Built-in families dispatch to cheap shooting
//! constructions; sampled profiles run the full fan engine, which is also
//! used to cross-check the built-in dispatches.

use rayon::prelude::*;
use thiserror::Error;

use crate::geodesics::{self, Ray, ShootSpec};
use crate::profile::{ModelSurface, SurfaceFamily};

const PI: f64 = std::f64::consts::PI;

#[derive(Debug, Error)]
pub enum CutError {
    #[error("parameter {t} outside the arc range [{lo}, {hi}]")]
    Domain { t: f64, lo: f64, hi: f64 },
    #[error("point ({r}, {theta}) is not on the computed cut locus (offset {offset:.3e})")]
    NotACutPoint { r: f64, theta: f64, offset: f64 },
    #[error("cut locus topology ambiguous at this fan resolution: {0}")]
    Resolution(String),
}

/// One sampled point of a cut arc: distance from the base vertex, position,
/// and the angles of the extreme minimizing geodesics with the outward
/// meridian direction at the point.
#[derive(Debug, Clone, Copy)]
pub struct ArcPoint {
    pub t: f64,
    pub r: f64,
    pub theta: f64,
    pub psi_down: f64,
    pub psi_up: f64,
}

/// A trunk or branch arc of the cut locus, parameterized by distance from
/// the base vertex.
#[derive(Debug, Clone)]
pub struct CutArc {
    pub is_trunk: bool,
    /// Tip of the arc is a conjugate point (unique minimizing geodesic).
    pub conjugate_tip: bool,
    /// Sorted by strictly increasing `t`.
    pub points: Vec<ArcPoint>,
}

impl CutArc {
    pub fn t_start(&self) -> f64 {
        self.points.first().map(|p| p.t).unwrap_or(f64::NAN)
    }

    pub fn t_end(&self) -> f64 {
        self.points.last().map(|p| p.t).unwrap_or(f64::NAN)
    }

    fn bracket(&self, t: f64) -> Result<(usize, f64), CutError> {
        let (lo, hi) = (self.t_start(), self.t_end());
        if t < lo - 1e-9 || t > hi + 1e-9 {
            return Err(CutError::Domain { t, lo, hi });
        }
        if self.points.len() == 1 {
            return Ok((0, 0.0));
        }
        let i = self
            .points
            .partition_point(|p| p.t <= t)
            .saturating_sub(1)
            .min(self.points.len() - 2);
        let (a, b) = (self.points[i].t, self.points[i + 1].t);
        let w = if b > a { ((t - a) / (b - a)).clamp(0.0, 1.0) } else { 0.0 };
        Ok((i, w))
    }

    /// Position on the arc at distance `t` from the base vertex.
    pub fn point_at(&self, t: f64) -> Result<(f64, f64), CutError> {
        let (i, w) = self.bracket(t)?;
        if self.points.len() == 1 {
            let p = self.points[0];
            return Ok((p.r, p.theta));
        }
        let (a, b) = (self.points[i], self.points[i + 1]);
        Ok((a.r + w * (b.r - a.r), a.theta + w * (b.theta - a.theta)))
    }

    /// Height of the arc above the base point of the surface, `d(base, .)`,
    /// which in polar coordinates is just the radial coordinate.
    pub fn height_at(&self, t: f64) -> Result<f64, CutError> {
        Ok(self.point_at(t)?.0)
    }

    /// Angles `(psi_down, psi_up)` of the lowermost and uppermost minimizing
    /// geodesics at the cut point.
    pub fn psi_at(&self, t: f64) -> Result<(f64, f64), CutError> {
        let (i, w) = self.bracket(t)?;
        if self.points.len() == 1 {
            let p = self.points[0];
            return Ok((p.psi_down, p.psi_up));
        }
        let (a, b) = (self.points[i], self.points[i + 1]);
        Ok((
            a.psi_down + w * (b.psi_down - a.psi_down),
            a.psi_up + w * (b.psi_up - a.psi_up),
        ))
    }
}

/// The cut locus of `(r0, 0)`: optional trunk on the opposite meridian plus
/// positive branches, and the cut distance as a function of launch angle.
#[derive(Debug, Clone)]
pub struct CutStructure {
    pub r0: f64,
    pub trunk: Option<CutArc>,
    pub branches: Vec<CutArc>,
    /// `(phi, tau)` samples of the cut distance per launch angle.
    tau_samples: Vec<(f64, f64)>,
}

impl CutStructure {
    pub fn arcs(&self) -> impl Iterator<Item = &CutArc> {
        self.trunk.iter().chain(self.branches.iter())
    }

    /// Cut distance along the geodesic with launch angle `phi`.
    pub fn tau_at(&self, phi: f64) -> f64 {
        let s = &self.tau_samples;
        if s.is_empty() {
            return f64::INFINITY;
        }
        if phi <= s[0].0 {
            return s[0].1;
        }
        if phi >= s[s.len() - 1].0 {
            return s[s.len() - 1].1;
        }
        let i = s.partition_point(|&(p, _)| p <= phi) - 1;
        let (a, b) = (s[i], s[i + 1]);
        let w = if b.0 > a.0 { (phi - a.0) / (b.0 - a.0) } else { 0.0 };
        a.1 + w * (b.1 - a.1)
    }

    fn nearest_offset(&self, r: f64, theta: f64) -> (f64, f64) {
        let mut best = (f64::INFINITY, f64::NAN);
        for arc in self.arcs() {
            for p in &arc.points {
                let d = (p.r - r).hypot(p.theta - theta);
                if d < best.0 {
                    best = (d, p.t);
                }
            }
        }
        best
    }
}

/// Compute the cut locus structure. `resolution` controls arc sampling for
/// the built-in families and the fan density for sampled profiles.
pub fn cut_structure(
    surface: &ModelSurface,
    r0: f64,
    resolution: usize,
) -> Result<CutStructure, CutError> {
    assert!(r0 > 0.0 && r0 < surface.ell(), "base vertex inside the surface");
    match surface.family() {
        SurfaceFamily::ConstantCurvature { kappa } => {
            let ell = PI / kappa.sqrt();
            Ok(degenerate_antipode(r0, ell))
        }
        SurfaceFamily::LambdaSphere { lambda } => {
            if *lambda == 0.0 {
                Ok(degenerate_antipode(r0, PI))
            } else if *lambda < 0.0 {
                lambda_negative_structure(surface, r0, resolution.max(17))
            } else {
                trunk_structure(surface, r0, resolution.max(33))
            }
        }
        SurfaceFamily::Sampled { .. } => cut_structure_generic(surface, r0, resolution.max(64)),
    }
}

/// Constant curvature: the cut locus is the single antipodal point, carried
/// as a zero-length trunk arc so downstream encounter logic needs no special
/// case. The antipode is conjugate along every connecting geodesic.
fn degenerate_antipode(r0: f64, ell: f64) -> CutStructure {
    let p = ArcPoint {
        t: ell,
        r: ell - r0,
        theta: PI,
        psi_down: 0.0,
        psi_up: PI,
    };
    CutStructure {
        r0,
        trunk: Some(CutArc {
            is_trunk: true,
            conjugate_tip: true,
            points: vec![p],
        }),
        branches: Vec::new(),
        tau_samples: vec![(0.0, ell), (PI, ell)],
    }
}

/// Negative-lambda spheres: the cut locus is a branch arc on the parallel
/// `r = pi - r0`. Every arc point is computed by shooting: the direct
/// minimizer is the ray whose crossing of the parallel sweeps `theta_c`, the
/// other one arrives mirrored with sweep `2 pi - theta_c`.
fn lambda_negative_structure(
    surface: &ModelSurface,
    r0: f64,
    resolution: usize,
) -> Result<CutStructure, CutError> {
    let level = PI - r0;
    let t_cap = PI * 1.3 + 1.0;
    // Tip of the arc: the perpendicular ray grazes the parallel at its
    // first turning point.
    let perp = Ray::new(surface, ShootSpec { r0, phi: PI / 2.0 }, t_cap);
    let (t_tip, theta_tip) = if (r0 - PI / 2.0).abs() < 1e-12 {
        // The equatorial launch runs inside the parallel itself; the tip is
        // where the first mirror pair of off-equator geodesics ties, which
        // the sweep root-find below locates as theta_c -> theta_tip. Seed
        // with the equator arclength of that angle.
        let lambda = match surface.family() {
            SurfaceFamily::LambdaSphere { lambda } => *lambda,
            _ => unreachable!(),
        };
        (PI * (1.0 + lambda).sqrt(), PI * (1.0 + lambda))
    } else {
        let turns = perp.turning_times(t_cap);
        let t = *turns.first().ok_or_else(|| {
            CutError::Resolution("perpendicular ray has no turning point".into())
        })?;
        let st = perp.state(t);
        if (st.r - level).abs() > 1e-7 {
            return Err(CutError::Resolution(format!(
                "perpendicular turning radius {} is off the expected parallel {}",
                st.r, level
            )));
        }
        (t, st.theta)
    };

    let n = resolution;
    let points: Vec<ArcPoint> = (0..n)
        .into_par_iter()
        .map(|i| {
            let theta_c = theta_tip + (PI - theta_tip) * i as f64 / (n - 1) as f64;
            if i == 0 && (r0 - PI / 2.0).abs() >= 1e-12 {
                return Ok(ArcPoint {
                    t: t_tip,
                    r: level,
                    theta: theta_tip,
                    psi_down: PI / 2.0,
                    psi_up: PI / 2.0,
                });
            }
            // Every minimizing connection to the arc point, by shooting.
            let conns = geodesics::connect(surface, r0, level, theta_c, 96).map_err(|e| {
                CutError::Resolution(format!("shooting to theta={theta_c:.6} failed: {e}"))
            })?;
            let best = conns[0].length;
            let mins: Vec<_> = conns
                .iter()
                .filter(|c| c.length <= best + 1e-7 * (1.0 + best))
                .collect();
            if mins.len() < 2 && i != 0 && i != n - 1 {
                return Err(CutError::Resolution(format!(
                    "only one minimizer recovered at interior arc point theta={theta_c:.6}"
                )));
            }
            let t = mins.iter().map(|c| c.length).sum::<f64>() / mins.len() as f64;
            let mut rdots: Vec<f64> = mins.iter().map(|c| c.arrival_rdot).collect();
            rdots.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let psi_up = rdots[0].clamp(-1.0, 1.0).acos();
            let psi_down = rdots[rdots.len() - 1].clamp(-1.0, 1.0).acos();
            Ok(ArcPoint {
                t,
                r: level,
                theta: theta_c,
                psi_down,
                psi_up,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;

    let mut points = points;
    points.sort_by(|a, b| a.t.partial_cmp(&b.t).unwrap());
    points.dedup_by(|a, b| (a.t - b.t).abs() < 1e-12);

    // Cut distance per launch angle: the first parallel crossing whose sweep
    // lands on the arc (directly or mirrored).
    let theta_end = theta_tip;
    let mut tau_samples = Vec::new();
    for i in 0..=128 {
        let phi = 1e-7 + (PI - 2e-7) * i as f64 / 128.0;
        let ray = Ray::new(surface, ShootSpec { r0, phi }, t_cap);
        let mut tau = f64::INFINITY;
        for t in ray.r_crossings(level, t_cap) {
            let th = ray.state(t).theta.rem_euclid(2.0 * PI);
            let fold = th.min(2.0 * PI - th);
            if fold >= theta_end - 1e-9 {
                tau = t;
                break;
            }
        }
        tau_samples.push((phi, tau));
    }

    Ok(CutStructure {
        r0,
        trunk: None,
        branches: vec![CutArc {
            is_trunk: false,
            conjugate_tip: true,
            points,
        }],
        tau_samples,
    })
}

/// Positive-lambda spheres: the cut locus is a sub-arc of the opposite
/// meridian. Each fan geodesic is cut where it meets its own mirror image on
/// the meridian (swept angle `pi`), unless a conjugate point comes first.
fn trunk_structure(
    surface: &ModelSurface,
    r0: f64,
    resolution: usize,
) -> Result<CutStructure, CutError> {
    let t_cap = PI * 1.5 + 1.0;
    let n = resolution;
    let data: Vec<(f64, f64, Option<ArcPoint>)> = (0..=n)
        .into_par_iter()
        .map(|i| {
            let phi = 1e-6 + (PI - 2e-6) * i as f64 / n as f64;
            let ray = Ray::new(surface, ShootSpec { r0, phi }, t_cap);
            let meridian_cross = ray.theta_time(PI, t_cap);
            let conj = geodesics::scalar_jacobi_on_ray(surface, &ray, t_cap, 0.0, 1.0)
                .first_zero_after(1e-9);
            match (meridian_cross, conj) {
                (Some(tm), conj) => {
                    let conj_first = conj.map(|tc| tc < tm - 1e-9).unwrap_or(false);
                    let t = if conj_first { conj.unwrap() } else { tm };
                    let st = ray.state(t);
                    let psi = st.rdot.clamp(-1.0, 1.0).acos();
                    Some((
                        phi,
                        t,
                        ArcPoint {
                            t,
                            r: st.r,
                            theta: st.theta,
                            psi_down: psi,
                            psi_up: psi,
                        },
                        conj_first,
                    ))
                }
                (None, Some(tc)) => {
                    let st = ray.state(tc);
                    let psi = st.rdot.clamp(-1.0, 1.0).acos();
                    Some((
                        phi,
                        tc,
                        ArcPoint {
                            t: tc,
                            r: st.r,
                            theta: st.theta,
                            psi_down: psi,
                            psi_up: psi,
                        },
                        true,
                    ))
                }
                (None, None) => None,
            }
            .map(|(phi, tau, pt, conj_first)| {
                (
                    phi,
                    tau,
                    if (pt.theta - PI).abs() < 1e-6 || conj_first {
                        Some(pt)
                    } else {
                        None
                    },
                )
            })
            .unwrap_or((phi, f64::INFINITY, None))
        })
        .collect();

    let tau_samples: Vec<(f64, f64)> = data.iter().map(|&(p, t, _)| (p, t)).collect();
    let mut points: Vec<ArcPoint> = data.into_iter().filter_map(|(_, _, p)| p).collect();
    if points.is_empty() {
        return Err(CutError::Resolution(
            "no cut points recovered on the opposite meridian".into(),
        ));
    }
    points.sort_by(|a, b| a.t.partial_cmp(&b.t).unwrap());
    points.dedup_by(|a, b| (a.t - b.t).abs() < 1e-10);
    Ok(CutStructure {
        r0,
        trunk: Some(CutArc {
            is_trunk: true,
            conjugate_tip: true,
            points,
        }),
        branches: Vec::new(),
        tau_samples,
    })
}

/// Shooting helper with a shared ray cache, for repeated root-finds over
/// launch angles on one surface.
struct Shooter<'a> {
    surface: &'a ModelSurface,
    r0: f64,
    t_cap: f64,
    cache: std::collections::HashMap<u64, std::rc::Rc<Ray>>,
}

impl<'a> Shooter<'a> {
    fn new(surface: &'a ModelSurface, r0: f64, t_cap: f64) -> Self {
        Self {
            surface,
            r0,
            t_cap,
            cache: std::collections::HashMap::new(),
        }
    }

    fn ray(&mut self, phi: f64) -> std::rc::Rc<Ray> {
        let key = phi.to_bits();
        if let Some(r) = self.cache.get(&key) {
            return r.clone();
        }
        let ray = std::rc::Rc::new(Ray::new(
            self.surface,
            ShootSpec { r0: self.r0, phi },
            self.t_cap,
        ));
        if self.cache.len() > 4096 {
            self.cache.clear();
        }
        self.cache.insert(key, ray.clone());
        ray
    }

    /// Swept angle, time and arrival direction of the `k`-th crossing of
    /// the parallel `level`.
    fn crossing(&mut self, phi: f64, level: f64, k: usize) -> Option<(f64, f64, f64)> {
        let ray = self.ray(phi);
        let t = *ray.r_crossings(level, self.t_cap).get(k)?;
        let st = ray.state(t);
        Some((st.theta, t, st.rdot))
    }

    /// Secant iteration for a crossing with swept angle `sweep`, starting
    /// from a warm launch-angle guess; falls back to the windowed scan.
    fn track_secant(
        &mut self,
        level: f64,
        sweep: f64,
        k: usize,
        phi_guess: f64,
    ) -> Option<(f64, f64, f64)> {
        let mut p0 = phi_guess.clamp(1e-7, PI - 1e-7);
        let mut f0 = self
            .crossing(p0, level, k)
            .map(|(th, _, _)| th - sweep);
        if let Some(f0v) = f0 {
            if f0v.abs() < 1e-13 {
                return self.crossing(p0, level, k).map(|(_, t, rd)| (p0, t, rd));
            }
            let mut p1 = (p0 + 1e-5).min(PI - 1e-7);
            let mut f1 = self.crossing(p1, level, k).map(|(th, _, _)| th - sweep);
            let mut f0v = f0v;
            for _ in 0..30 {
                let Some(f1v) = f1 else { break };
                if (f1v - f0v).abs() < 1e-300 {
                    break;
                }
                let p2 = p1 - f1v * (p1 - p0) / (f1v - f0v);
                if !(1e-7..=PI - 1e-7).contains(&p2) || (p2 - p1).abs() > 0.2 {
                    break;
                }
                p0 = p1;
                f0v = f1v;
                p1 = p2;
                f1 = self.crossing(p1, level, k).map(|(th, _, _)| th - sweep);
                if let Some(f1v) = f1 {
                    if f1v.abs() < 1e-12 {
                        return self.crossing(p1, level, k).map(|(_, t, rd)| (p1, t, rd));
                    }
                }
            }
        } else {
            f0 = None;
        }
        let _ = f0;
        self.track_arrival(level, sweep, k, phi_guess, 0.05)
    }

    /// Track a crossing whose swept angle equals `sweep` near a previous
    /// launch angle, scanning outward for a bracket and bisecting.
    fn track_arrival(
        &mut self,
        level: f64,
        sweep: f64,
        k: usize,
        phi_guess: f64,
        window: f64,
    ) -> Option<(f64, f64, f64)> {
        let res = |s: &mut Self, p: f64| s.crossing(p, level, k).map(|(th, _, _)| th - sweep);
        // Search widening windows around the guess with a dense scan; the
        // residual of a crossing family is not monotone in the launch angle.
        let mut bracket: Option<(f64, f64, f64)> = None;
        'widths: for mult in [1.0, 4.0, 16.0, f64::INFINITY] {
            let (w_lo, w_hi) = if mult.is_finite() {
                (
                    (phi_guess - mult * window).max(1e-7),
                    (phi_guess + mult * window).min(PI - 1e-7),
                )
            } else {
                (1e-7, PI - 1e-7)
            };
            let steps = if mult.is_finite() { 16 } else { 96 };
            let mut prev: Option<(f64, f64)> = None;
            for q in 0..=steps {
                let p = w_lo + (w_hi - w_lo) * q as f64 / steps as f64;
                let Some(f) = res(self, p) else {
                    prev = None;
                    continue;
                };
                if f == 0.0 {
                    bracket = Some((p, p, 0.0));
                    break 'widths;
                }
                if let Some((pp, fp)) = prev {
                    if fp * f < 0.0 {
                        bracket = Some((pp, p, fp));
                        break 'widths;
                    }
                }
                prev = Some((p, f));
            }
        }
        let (mut a, mut b, mut fa) = bracket?;
        if a == b {
            return self.crossing(a, level, k).map(|(_, t, rd)| (a, t, rd));
        }
        for _ in 0..60 {
            let m = 0.5 * (a + b);
            let Some(fm) = res(self, m) else { return None };
            if fa * fm <= 0.0 {
                b = m;
            } else {
                a = m;
                fa = fm;
            }
        }
        let root = 0.5 * (a + b);
        self.crossing(root, level, k)
            .map(|(_, t, rd)| (root, t, rd))
    }
}

/// Generic fan engine for arbitrary (sampled) profiles; also used to
/// cross-check the built-in dispatches.
///
/// The skeleton comes from exact per-ray candidates (first conjugate point
/// and the meeting with the ray's own mirror image on the opposite
/// meridian). Branch arcs in the open half-surface are then traced azimuth
/// by azimuth: at fixed azimuth the signed length gap between the
/// ascending-arrival and descending-arrival connections changes sign
/// transversally across the cut arc, so the arc radius is an ordinary
/// bisection.
pub fn cut_structure_generic(
    surface: &ModelSurface,
    r0: f64,
    fan: usize,
) -> Result<CutStructure, CutError> {
    let ell = surface.ell();
    if !ell.is_finite() {
        return Err(CutError::Resolution(
            "generic engine currently requires a compact surface".into(),
        ));
    }
    let t_cap = (r0 + ell) * 1.02 + 1e-6;
    let n = fan.max(64);
    let phis: Vec<f64> = (0..=n)
        .map(|i| 1e-6 + (PI - 2e-6) * i as f64 / n as f64)
        .collect();

    // Exact per-ray candidates.
    struct RayInfo {
        conj: Option<f64>,
        meridian: Option<f64>,
    }
    let infos: Vec<RayInfo> = phis
        .par_iter()
        .map(|&phi| {
            let ray = Ray::new(surface, ShootSpec { r0, phi }, t_cap);
            let conj = geodesics::scalar_jacobi_on_ray(surface, &ray, t_cap, 0.0, 1.0)
                .first_zero_after(1e-9);
            let meridian = ray.theta_time(PI, t_cap);
            RayInfo { conj, meridian }
        })
        .collect();

    // Skeleton classification per ray.
    let mut trunk_points: Vec<ArcPoint> = Vec::new();
    let mut branch_hint: Vec<(f64, f64, f64)> = Vec::new(); // (theta, r, t) rough
    let mut tau_skeleton: Vec<(f64, f64)> = Vec::new();
    for (i, info) in infos.iter().enumerate() {
        let ray = Ray::new(surface, ShootSpec { r0, phi: phis[i] }, t_cap);
        match (info.meridian, info.conj) {
            (Some(tm), conj) if conj.map(|tc| tm <= tc + 1e-9).unwrap_or(true) => {
                let st = ray.state(tm);
                let psi = st.rdot.clamp(-1.0, 1.0).acos();
                trunk_points.push(ArcPoint {
                    t: tm,
                    r: st.r,
                    theta: PI,
                    psi_down: psi,
                    psi_up: psi,
                });
                tau_skeleton.push((phis[i], tm));
            }
            (_, Some(tc)) => {
                let st = ray.state(tc);
                if st.theta < PI {
                    branch_hint.push((st.theta, st.r, tc));
                }
                tau_skeleton.push((phis[i], tc));
            }
            _ => tau_skeleton.push((phis[i], f64::INFINITY)),
        }
    }

    // Trace branch arcs through the hinted region by azimuth slices. The
    // minimizing connection jumps between two geodesic families across a cut
    // arc, so per azimuth: identify the family on each side of the hinted
    // radius, then bisect the signed length gap between the two tracked
    // families.
    let mut branches: Vec<CutArc> = Vec::new();
    if !branch_hint.is_empty() {
        branch_hint.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let theta_lo = branch_hint.first().unwrap().0;
        let theta_hi = branch_hint.last().unwrap().0.min(PI - 1e-4);
        let m = (n / 2).clamp(64, 512);
        let mut shooter = Shooter::new(surface, r0, t_cap);

        #[derive(Clone, Copy, Debug)]
        struct Track {
            phi: f64,
            k: usize,
            mirrored: bool,
        }

        // Family descriptor of the minimizing connection at a point.
        let family_at = |shooter: &mut Shooter, level: f64, theta_c: f64| -> Option<(Track, f64, f64)> {
            let conns = geodesics::connect(surface, r0, level, theta_c, 96).ok()?;
            let c = conns.first()?;
            let ray = shooter.ray(c.phi);
            let k = ray
                .r_crossings(level, shooter.t_cap)
                .iter()
                .position(|&t| (t - c.length).abs() < 1e-6 * (1.0 + c.length))?;
            Some((
                Track {
                    phi: c.phi,
                    k,
                    mirrored: c.swept_down,
                },
                c.length,
                c.arrival_rdot,
            ))
        };

        let hint_radius = |theta_c: f64| -> f64 {
            let i = branch_hint
                .partition_point(|h| h.0 <= theta_c)
                .clamp(1, branch_hint.len())
                - 1;
            branch_hint[i].1
        };

        // Tracking-free slice solve: full connection enumeration at a
        // single radius inside the (possibly razor-thin) two-family band,
        // then Newton steps in the radius. The radial derivative of each
        // arrival length is its arrival direction cosine, so the length gap
        // has slope rd_first - rd_second > 0.
        let slice_by_connect = |theta_c: f64, r_center: f64, spread: f64| -> Option<ArcPoint> {
            let eval = |r: f64| -> Option<(f64, f64, f64, f64)> {
                let mut conns =
                    geodesics::connect_within(surface, r0, r, theta_c, 96, 1.2).ok()?;
                // Collapse near-duplicate fold roots of one family.
                conns.dedup_by(|a, b| (a.phi - b.phi).abs() < 0.02 && a.swept_down == b.swept_down);
                if conns.len() < 2 {
                    return None;
                }
                let (c0, c1) = (&conns[0], &conns[1]);
                if c1.length > c0.length + 0.1 {
                    return None;
                }
                let (first, second) = if c0.arrival_rdot >= c1.arrival_rdot {
                    (c0, c1)
                } else {
                    (c1, c0)
                };
                Some((
                    first.length - second.length,
                    0.5 * (first.length + second.length),
                    first.arrival_rdot,
                    second.arrival_rdot,
                ))
            };
            // Ladder probe outward from the hint until inside the band.
            let mut hit = None;
            'ladder: for step in [0.0, 1e-3, 2e-3, 4e-3, 8e-3, 1.6e-2, 3.2e-2] {
                for sign in [1.0, -1.0] {
                    if step == 0.0 && sign < 0.0 {
                        continue;
                    }
                    let r = (r_center + sign * step).clamp(1e-4, ell - 1e-4);
                    if let Some(v) = eval(r) {
                        hit = Some((r, v));
                        break 'ladder;
                    }
                }
            }
            let (mut r, mut v) = hit?;
            if (r - r_center).abs() > spread {
                return None;
            }
            // Newton in the radius; keep the last in-band evaluation.
            for _ in 0..6 {
                let (g, _t, rd1, rd2) = v;
                let slope = rd1 - rd2;
                if g.abs() < 1e-11 || slope.abs() < 1e-9 {
                    break;
                }
                let r_next = (r - g / slope).clamp(1e-4, ell - 1e-4);
                match eval(r_next) {
                    Some(v_next) => {
                        r = r_next;
                        v = v_next;
                    }
                    None => {
                        // Stepped out of the band: apply the analytic
                        // correction once and stop (error is O(g^2)).
                        let t_corr = v.1 + 0.5 * (rd1 + rd2) * (r_next - r);
                        return Some(ArcPoint {
                            t: t_corr,
                            r: r_next,
                            theta: theta_c,
                            psi_down: rd1.clamp(-1.0, 1.0).acos(),
                            psi_up: rd2.clamp(-1.0, 1.0).acos(),
                        });
                    }
                }
            }
            let (g, t, rd1, rd2) = v;
            let slope = rd1 - rd2;
            let dr = if slope.abs() > 1e-9 { -g / slope } else { 0.0 };
            Some(ArcPoint {
                t: t + 0.5 * (rd1 + rd2) * dr,
                r: r + dr,
                theta: theta_c,
                psi_down: rd1.clamp(-1.0, 1.0).acos(),
                psi_up: rd2.clamp(-1.0, 1.0).acos(),
            })
        };

        let mut warm: Option<(Track, Track, f64)> = None;
        let mut points: Vec<ArcPoint> = Vec::new();
        for g in 0..=m {
            let theta_c = theta_lo + (theta_hi - theta_lo) * g as f64 / m as f64;
            let r_hint = hint_radius(theta_c);
            // Window and family pair: either warm from the previous slice,
            // or found by probing levels across the hinted radius until the
            // minimizing family jumps.
            let setup = if let Some((fa, fb, r_prev)) = warm.take() {
                Some((fa, fb, (r_prev - 0.03).max(1e-4), (r_prev + 0.03).min(ell - 1e-4)))
            } else {
                let w_lo = (r_hint - 0.25).max(1e-4);
                let w_hi = (r_hint + 0.25).min(ell - 1e-4);
                let probes = 10usize;
                let mut found = None;
                let mut prev: Option<(Track, f64, f64, f64)> = None;
                for q in 0..=probes {
                    let r = w_lo + (w_hi - w_lo) * q as f64 / probes as f64;
                    match family_at(&mut shooter, r, theta_c) {
                        Some((fam, _len, rd)) => {
                            if let Some((pf, p_rd, p_r, _)) = prev {
                                // Distinct families launch at macroscopically
                                // different angles; within-family drift across
                                // one probe step is small.
                                let differs = (fam.phi - pf.phi).abs() > 0.2
                                    || pf.mirrored != fam.mirrored
                                    || (rd.signum() != p_rd.signum() && (rd - p_rd).abs() > 0.1);
                                if differs {
                                    found = Some((pf, fam, p_r, r));
                                    break;
                                }
                            }
                            prev = Some((fam, rd, r, 0.0));
                        }
                        None => prev = None,
                    }
                }
                found
            };
            // Near arc tips the families merge and the probe cannot see the
            // jump; a fallback seeds the pair from the two shortest
            // connections at the hinted radius instead.
            let pair_fallback = |shooter: &mut Shooter| -> Option<(Track, Track, f64, f64)> {
                let conns =
                    geodesics::connect_within(surface, r0, r_hint, theta_c, 96, 1.2).ok()?;
                if conns.len() < 2 || conns[1].length > conns[0].length + 0.05 {
                    return None;
                }
                let mk = |c: &geodesics::Connection, shooter: &mut Shooter| -> Option<Track> {
                    let ray = shooter.ray(c.phi);
                    let k = ray
                        .r_crossings(r_hint, shooter.t_cap)
                        .iter()
                        .position(|&t| (t - c.length).abs() < 1e-6 * (1.0 + c.length))?;
                    Some(Track {
                        phi: c.phi,
                        k,
                        mirrored: c.swept_down,
                    })
                };
                let fa = mk(&conns[0], shooter)?;
                let fb = mk(&conns[1], shooter)?;
                if (fa.phi - fb.phi).abs() < 1e-7 {
                    return None;
                }
                Some((fa, fb, (r_hint - 0.02).max(1e-4), (r_hint + 0.02).min(ell - 1e-4)))
            };

            // Run the signed-gap bisection for a given family pair/window.
            let run = |shooter: &mut Shooter,
                       fam_lo: Track,
                       fam_hi: Track,
                       lo: f64,
                       hi: f64|
             -> Option<(Track, Track, f64, (f64, f64, f64, f64))> {
                let sweep = |tr: &Track| if tr.mirrored { 2.0 * PI - theta_c } else { theta_c };
                let track = |shooter: &mut Shooter, fam: &mut Track, level: f64| -> Option<(f64, f64)> {
                    let (phi, t, rd) = shooter.track_secant(level, sweep(fam), fam.k, fam.phi)?;
                    if (phi - fam.phi).abs() > 0.15 {
                        return None;
                    }
                    fam.phi = phi;
                    Some((t, rd))
                };
                let mut fam_a = fam_lo;
                let mut fam_b = fam_hi;
                let gap = |shooter: &mut Shooter,
                           fa: &mut Track,
                           fb: &mut Track,
                           r: f64|
                 -> Option<(f64, f64, f64, f64)> {
                    let (ta, rda) = track(shooter, fa, r)?;
                    let (tb, rdb) = track(shooter, fb, r)?;
                    Some((ta - tb, 0.5 * (ta + tb), rda, rdb))
                };
                let g_lo = gap(shooter, &mut fam_a, &mut fam_b, lo)?;
                let g_hi = gap(shooter, &mut fam_a, &mut fam_b, hi)?;
                if g_lo.0 * g_hi.0 > 0.0 {
                    return None;
                }
                let (mut a, mut b, mut sign_lo) = (lo, hi, g_lo.0);
                let mut last = None;
                for _ in 0..52 {
                    let mid = 0.5 * (a + b);
                    let Some(gm) = gap(shooter, &mut fam_a, &mut fam_b, mid) else { break };
                    if sign_lo * gm.0 <= 0.0 {
                        b = mid;
                    } else {
                        a = mid;
                        sign_lo = gm.0;
                    }
                    last = Some((mid, gm));
                }
                last.map(|(r_cut, gm)| (fam_a, fam_b, r_cut, gm))
            };

            let mut outcome = setup.and_then(|(fa, fb, lo, hi)| run(&mut shooter, fa, fb, lo, hi));
            if outcome.is_none() {
                outcome = pair_fallback(&mut shooter)
                    .and_then(|(fa, fb, lo, hi)| run(&mut shooter, fa, fb, lo, hi));
            }
            match outcome {
                Some((fam_a, fam_b, r_cut, (gap_v, t, rd_a, rd_b)))
                    if gap_v.abs() < 1e-6 * (1.0 + t) =>
                {
                    let (hi_rd, lo_rd) = if rd_a >= rd_b { (rd_a, rd_b) } else { (rd_b, rd_a) };
                    points.push(ArcPoint {
                        t,
                        r: r_cut,
                        theta: theta_c,
                        psi_down: hi_rd.clamp(-1.0, 1.0).acos(),
                        psi_up: lo_rd.clamp(-1.0, 1.0).acos(),
                    });
                    warm = Some((fam_a, fam_b, r_cut));
                }
                _ => {
                    // Last resort for slices where tracking breaks down.
                    if let Some(pt) = slice_by_connect(theta_c, r_hint, 0.1) {
                        points.push(pt);
                    } else {
                    }
                }
            }
        }
        // Refine the tip boundary: bisect the azimuth at which the two
        // families stop being resolvable and keep the deepest recovered
        // slice point, which converges quadratically to the arc tip.
        if !points.is_empty() {
            let theta_first = points
                .iter()
                .map(|p| p.theta)
                .fold(f64::INFINITY, f64::min);
            let dtheta = (theta_hi - theta_lo) / m as f64;
            let mut bad = (theta_first - 20.0 * dtheta).max(1e-6);
            let mut good = theta_first;
            let mut deepest: Option<ArcPoint> = None;
            for _ in 0..18 {
                let mid = 0.5 * (bad + good);
                let rh = hint_radius(mid);
                match slice_by_connect(mid, rh, 0.05) {
                    Some(pt) => {
                        good = mid;
                        deepest = Some(pt);
                    }
                    None => bad = mid,
                }
            }
            if let Some(pt) = deepest {
                points.push(pt);
            }
        }

        if !points.is_empty() {
            points.sort_by(|a, b| a.t.partial_cmp(&b.t).unwrap());
            points.dedup_by(|a, b| (a.t - b.t).abs() < 1e-10);
            branches.push(CutArc {
                is_trunk: false,
                conjugate_tip: true,
                points,
            });
        }
    }

    // Per-ray cut distances: exact candidates plus the first crossing of a
    // recovered branch arc.
    let branches_ref = &branches;
    let tau_samples: Vec<(f64, f64)> = phis
        .par_iter()
        .zip(infos.par_iter())
        .map(|(&phi, info)| {
            let ray = Ray::new(surface, ShootSpec { r0, phi }, t_cap);
            let mut tau = f64::INFINITY;
            if let Some(tm) = info.meridian {
                tau = tau.min(tm);
            }
            if let Some(tc) = info.conj {
                tau = tau.min(tc);
            }
            for arc in branches_ref {
                if let Some(t_hit) = first_arc_crossing(&ray, arc, t_cap) {
                    tau = tau.min(t_hit);
                }
            }
            (phi, tau)
        })
        .collect();

    // Continuity guard against topology the fan cannot resolve.
    let spacing = PI / n as f64;
    for w in tau_samples.windows(2) {
        let (ta, tb) = (w[0].1, w[1].1);
        if ta.is_finite() && tb.is_finite() && (tb - ta).abs() > 2500.0 * spacing {
            return Err(CutError::Resolution(format!(
                "cut distance jumps from {ta} to {tb} between adjacent rays"
            )));
        }
    }

    let trunk = if trunk_points.is_empty() {
        None
    } else {
        trunk_points.sort_by(|a, b| a.t.partial_cmp(&b.t).unwrap());
        trunk_points.dedup_by(|a, b| (a.t - b.t).abs() < 1e-10);
        Some(CutArc {
            is_trunk: true,
            conjugate_tip: true,
            points: trunk_points,
        })
    };
    Ok(CutStructure {
        r0,
        trunk,
        branches,
        tau_samples,
    })
}

/// First time a ray meets the image of a branch arc: sign change of the
/// radial offset from the arc at matching azimuth.
pub fn first_arc_crossing(ray: &Ray, arc: &CutArc, t_cap: f64) -> Option<f64> {
    let theta_lo = arc.points.first().map(|p| p.theta.min(arc.points.last().unwrap().theta))?;
    let theta_hi = arc.points.first().map(|p| p.theta.max(arc.points.last().unwrap().theta))?;
    let arc_r = |theta: f64| -> Option<f64> {
        if theta < theta_lo || theta > theta_hi {
            return None;
        }
        // The arc is monotone in azimuth by construction of the tracer.
        let pts = &arc.points;
        let asc = pts.first().unwrap().theta <= pts.last().unwrap().theta;
        let pos = if asc {
            pts.partition_point(|p| p.theta <= theta)
        } else {
            pts.partition_point(|p| p.theta >= theta)
        };
        let i = pos.clamp(1, pts.len() - 1);
        let (a, b) = (&pts[i - 1], &pts[i]);
        let w = if (b.theta - a.theta).abs() > 1e-300 {
            (theta - a.theta) / (b.theta - a.theta)
        } else {
            0.5
        };
        Some(a.r + w * (b.r - a.r))
    };
    let f = |t: f64| -> Option<f64> {
        let st = ray.state(t);
        arc_r(st.theta).map(|r_arc| st.r - r_arc)
    };
    let n = (t_cap / 0.01) as usize;
    let mut prev: Option<(f64, f64)> = None;
    for k in 0..=n {
        let t = t_cap * k as f64 / n as f64;
        let Some(v) = f(t) else {
            prev = None;
            continue;
        };
        if let Some((tp, vp)) = prev {
            if vp * v <= 0.0 {
                let (mut a, mut b, mut fa) = (tp, t, vp);
                for _ in 0..48 {
                    let m = 0.5 * (a + b);
                    let Some(fm) = f(m) else { break };
                    if fa * fm <= 0.0 {
                        b = m;
                    } else {
                        a = m;
                        fa = fm;
                    }
                }
                return Some(0.5 * (a + b));
            }
        }
        prev = Some((t, v));
    }
    None
}

/// Right-hand derivative of the height function `d(base, .)` along a cut
/// arc with respect to the distance-from-vertex parameter. On branch arcs
/// this is `cos(mean angle) / cos(half angle gap)`, equivalently
/// `cos psi_up + sin psi_up tan((psi_up - psi_down)/2)`; on trunk arcs the
/// arc runs inside a meridian and the derivative is read off the samples.
pub fn arc_height_right_derivative(arc: &CutArc, t: f64) -> Result<f64, CutError> {
    if arc.is_trunk {
        let h = 1e-6 * (1.0 + arc.t_end());
        let lo = t.max(arc.t_start());
        let hi = (t + h).min(arc.t_end());
        if hi - lo < 1e-12 {
            let lo2 = (t - h).max(arc.t_start());
            return Ok((arc.height_at(t)? - arc.height_at(lo2)?) / (t - lo2));
        }
        return Ok((arc.height_at(hi)? - arc.height_at(lo)?) / (hi - lo));
    }
    let (psi_down, psi_up) = arc.psi_at(t)?;
    Ok(slope_from_angles(psi_down, psi_up))
}

/// The two printed forms of the cut-arc slope; they agree identically.
pub fn slope_from_angles(psi_down: f64, psi_up: f64) -> f64 {
    let mean = 0.5 * (psi_up + psi_down);
    let half_gap = 0.5 * (psi_up - psi_down);
    mean.cos() / half_gap.cos()
}

pub fn slope_from_angles_alt(psi_down: f64, psi_up: f64) -> f64 {
    let half_gap = 0.5 * (psi_up - psi_down);
    psi_up.cos() + psi_up.sin() * half_gap.tan()
}

/// Extreme minimizing-geodesic angles at a cut point, recovered by shooting:
/// every minimizing connection to the point is found and its arrival
/// direction converted to an angle with the outward meridian direction.
pub struct MinimizingAngles {
    pub psi_down: f64,
    pub psi_up: f64,
    pub conjugate: bool,
    pub lengths: Vec<f64>,
}

pub fn minimizing_angles(
    surface: &ModelSurface,
    r0: f64,
    structure: &CutStructure,
    cut_point: (f64, f64),
) -> Result<MinimizingAngles, CutError> {
    let (offset, _) = structure.nearest_offset(cut_point.0, cut_point.1);
    if offset > 1e-4 {
        return Err(CutError::NotACutPoint {
            r: cut_point.0,
            theta: cut_point.1,
            offset,
        });
    }
    let conns = geodesics::connect(surface, r0, cut_point.0, cut_point.1, 256).map_err(|e| {
        CutError::Resolution(format!("shooting to the cut point failed: {e}"))
    })?;
    let best = conns[0].length;
    let mins: Vec<_> = conns
        .iter()
        .filter(|c| c.length <= best + 1e-7)
        .collect();
    let conjugate = mins.len() < 2;
    let mut rdots: Vec<f64> = mins.iter().map(|c| c.arrival_rdot).collect();
    rdots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let psi_up = rdots[0].clamp(-1.0, 1.0).acos();
    let psi_down = rdots[rdots.len() - 1].clamp(-1.0, 1.0).acos();
    Ok(MinimizingAngles {
        psi_down,
        psi_up,
        conjugate,
        lengths: mins.iter().map(|c| c.length).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::ModelSurface;

    #[test]
    fn sphere_cut_is_antipode() {
        let m = ModelSurface::constant_curvature(1.0).unwrap();
        let s = cut_structure(&m, 1.0, 64).unwrap();
        let trunk = s.trunk.as_ref().unwrap();
        assert_eq!(trunk.points.len(), 1);
        let p = trunk.points[0];
        assert!((p.t - PI).abs() < 1e-12);
        assert!((p.r - (PI - 1.0)).abs() < 1e-12);
        assert!((p.theta - PI).abs() < 1e-12);
        assert!((s.tau_at(0.7) - PI).abs() < 1e-12);
    }

    #[test]
    fn lambda_negative_arc_matches_closed_forms() {
        let lambda = -0.5;
        let r0: f64 = 1.0;
        let m = ModelSurface::lambda_sphere(lambda).unwrap();
        let s = cut_structure(&m, r0, 65).unwrap();
        assert!(s.trunk.is_none());
        assert_eq!(s.branches.len(), 1);
        let arc = &s.branches[0];
        let t_tip = PI * (1.0 + lambda * r0.sin().powi(2)).sqrt();
        assert!(
            (arc.t_start() - t_tip).abs() < 1e-8,
            "tip distance {} vs {}",
            arc.t_start(),
            t_tip
        );
        assert!((arc.t_end() - PI).abs() < 1e-6, "trunk attachment at {}", arc.t_end());
        let theta_end = PI * (1.0 + lambda * r0.sin());
        assert!((arc.points[0].theta - theta_end).abs() < 1e-8);
        for p in &arc.points {
            assert!((p.r - (PI - r0)).abs() < 1e-9, "arc stays on the parallel");
            // Mirror symmetry of the two minimizers on a parallel arc.
            assert!((p.psi_up + p.psi_down - PI).abs() < 1e-7);
        }
    }

    #[test]
    fn lambda_negative_arc_distance_consistency() {
        // d(base vertex, arc(t)) = t, via the independent distance routine.
        let m = ModelSurface::lambda_sphere(-0.5).unwrap();
        let s = cut_structure(&m, 1.0, 17).unwrap();
        let arc = &s.branches[0];
        for k in [1usize, 5, 9, 13] {
            let p = arc.points[k.min(arc.points.len() - 1)];
            let d = geodesics::distance(&m, (1.0, 0.0), (p.r, p.theta), 192).unwrap();
            assert!(
                (d - p.t).abs() < 1e-6,
                "d = {d} vs t = {} at theta = {}",
                p.t,
                p.theta
            );
        }
    }

    #[test]
    fn sandwich_inequality_on_branch_arc() {
        let m = ModelSurface::lambda_sphere(-0.6).unwrap();
        let s = cut_structure(&m, 0.9, 33).unwrap();
        let arc = &s.branches[0];
        // Strictness holds off the endpoints (the tip has a unique
        // minimizer; the attachment point carries the meridian pair).
        let interior = arc.points.len().saturating_sub(1);
        for p in arc.points.iter().take(interior).skip(1) {
            if (p.psi_up - p.psi_down).abs() < 1e-9 {
                continue;
            }
            let slope = slope_from_angles(p.psi_down, p.psi_up);
            let alt = slope_from_angles_alt(p.psi_down, p.psi_up);
            assert!((slope - alt).abs() < 1e-10, "two forms agree");
            assert!(
                p.psi_down.cos() > slope && slope > p.psi_up.cos(),
                "strict sandwich: cos(down)={} slope={} cos(up)={}",
                p.psi_down.cos(),
                slope,
                p.psi_up.cos()
            );
        }
        // Parallel arc: the height is constant, so the slope vanishes.
        let mid = 0.5 * (arc.t_start() + arc.t_end());
        let d = arc_height_right_derivative(arc, mid).unwrap();
        assert!(d.abs() < 1e-7, "parallel arc slope {d}");
    }

    #[test]
    fn trunk_structure_positive_lambda() {
        let m = ModelSurface::lambda_sphere(0.8).unwrap();
        let s = cut_structure(&m, 1.2, 65).unwrap();
        let trunk = s.trunk.as_ref().expect("positive lambda has a meridian trunk");
        assert!(s.branches.is_empty());
        for p in &trunk.points {
            assert!((p.theta - PI).abs() < 1e-5, "cut point off the meridian: {}", p.theta);
        }
        // The antipodal point is inside the trunk range.
        let r_ant = PI - 1.2;
        assert!(trunk.points.iter().any(|p| (p.r - r_ant).abs() < 0.2));
        // Distance consistency at a mid-trunk point.
        let p = trunk.points[trunk.points.len() / 2];
        let d = geodesics::distance(&m, (1.2, 0.0), (p.r, p.theta), 192).unwrap();
        assert!((d - p.t).abs() < 1e-5, "d = {d} vs t = {}", p.t);
    }

    #[test]
    fn generic_engine_matches_lambda_dispatch() {
        let lambda = -0.5;
        let r0 = 1.0;
        let analytic = ModelSurface::lambda_sphere(lambda).unwrap();
        let generic = cut_structure_generic(&analytic, r0, 512).unwrap();
        let arc = generic
            .branches
            .first()
            .expect("generic engine finds the branch arc");
        let mut max_off = 0.0f64;
        for p in &arc.points {
            max_off = max_off.max((p.r - (PI - r0)).abs());
        }
        assert!(max_off < 1e-4, "generic arc off the parallel by {max_off}");
        let t_tip = PI * (1.0 + lambda * (r0 as f64).sin().powi(2)).sqrt();
        assert!(
            (arc.t_start() - t_tip).abs() < 2e-3,
            "generic tip {} vs exact {}",
            arc.t_start(),
            t_tip
        );
    }

    #[test]
    fn sampled_profile_cut_close_to_analytic() {
        let lambda = -0.5;
        let r0 = 1.0;
        let analytic = ModelSurface::lambda_sphere(lambda).unwrap();
        let sampled = crate::profile::resample(&analytic, 2048);
        let s = cut_structure(&sampled, r0, 512).unwrap();
        let arc = s.branches.first().expect("sampled surface branch arc");
        // Hausdorff-style check against the analytic parallel arc.
        let mut max_dev = 0.0f64;
        for p in &arc.points {
            max_dev = max_dev.max((p.r - (PI - r0)).abs());
        }
        assert!(max_dev < 1e-4, "sampled arc deviates {max_dev}");
        let t_tip = PI * (1.0 + lambda * (r0 as f64).sin().powi(2)).sqrt();
        assert!((arc.t_start() - t_tip).abs() < 1e-3);
    }

    #[test]
    fn minimizing_angles_by_shooting() {
        let lambda = -0.5;
        let r0 = 1.0;
        let m = ModelSurface::lambda_sphere(lambda).unwrap();
        let s = cut_structure(&m, r0, 33).unwrap();
        let arc = &s.branches[0];
        let p = arc.points[arc.points.len() / 2];
        let ma = minimizing_angles(&m, r0, &s, (p.r, p.theta)).unwrap();
        assert!(!ma.conjugate);
        assert!(ma.lengths.iter().all(|&l| (l - p.t).abs() < 1e-6));
        assert!((ma.psi_down - p.psi_down).abs() < 1e-5);
        assert!((ma.psi_up - p.psi_up).abs() < 1e-5);
        // Off-locus query errors out.
        assert!(matches!(
            minimizing_angles(&m, r0, &s, (0.3, 0.3)),
            Err(CutError::NotACutPoint { .. })
        ));
    }
}
