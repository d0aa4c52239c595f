//! Alexandrov comparison triangles on a model surface: place the triangle,
//! verify side-length matching, base convexity, vertex and base angle
//! comparisons and the meridian-side convexity, and detect encounters of
//! the side's reference curve with the cut-locus image.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cutlocus::{self, CutArc};
use crate::geodesics::{self, Ray, ShootSpec};
use crate::num::optim;
use crate::profile::SurfaceFamily;
use crate::refspace::{RefSpace, ReferenceCurve, ReferencePoint};

const PI: f64 = std::f64::consts::PI;

#[derive(Debug, Error)]
pub enum ComparisonError {
    #[error("reference point ({x}, {y}) outside the reference space: no comparison triangle exists")]
    OutsideReferenceSpace { x: f64, y: f64 },
    #[error("triangle data inconsistent: {0}")]
    ProfileInconsistent(String),
    #[error("profile exceeds the model radius {ell} while radial attraction is asserted (max {max})")]
    RadiusBound { ell: f64, max: f64 },
    #[error("side too short to carry angle data (d_pq = {0})")]
    DegenerateSide(f64),
    #[error("t = {0} is not a detected encounter")]
    NotAnEncounter(f64),
    #[error(transparent)]
    RefSpace(#[from] crate::refspace::RefSpaceError),
    #[error(transparent)]
    Geodesic(#[from] crate::geodesics::GeodesicError),
    #[error(transparent)]
    Cut(#[from] cutlocus::CutError),
}

/// Side lengths and exact side profiles of a geodesic triangle in the space
/// being compared against the model.
#[derive(Debug, Clone)]
pub struct TriangleData {
    pub d_op: f64,
    pub d_oq: f64,
    pub d_pq: f64,
    /// `t -> d(o, sigma(t))` along the side from `p` to `q`.
    pub sigma_profile: ReferenceCurve,
    /// Exact one-sided derivatives of the profile at the endpoints, when
    /// the generator knows them; otherwise finite differences are used.
    pub sigma_deriv_start: Option<f64>,
    pub sigma_deriv_end: Option<f64>,
    /// `s -> d(p, gamma(s))` along the side from `o` to `q`, if available.
    pub gamma_profile: Option<ReferenceCurve>,
    pub gamma_deriv_start: Option<f64>,
}

#[derive(Serialize, Deserialize)]
struct TriangleDoc {
    d_op: f64,
    d_oq: f64,
    d_pq: f64,
    sigma_profile: Vec<(f64, f64)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    gamma_profile: Option<Vec<(f64, f64)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    sigma_deriv_start: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    sigma_deriv_end: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    gamma_deriv_start: Option<f64>,
}

impl TriangleData {
    pub fn from_json(json: &str) -> Result<Self, ComparisonError> {
        let doc: TriangleDoc = serde_json::from_str(json)
            .map_err(|e| ComparisonError::ProfileInconsistent(format!("malformed JSON: {e}")))?;
        let tri = TriangleData {
            d_op: doc.d_op,
            d_oq: doc.d_oq,
            d_pq: doc.d_pq,
            sigma_profile: ReferenceCurve::new(doc.sigma_profile),
            sigma_deriv_start: doc.sigma_deriv_start,
            sigma_deriv_end: doc.sigma_deriv_end,
            gamma_profile: doc.gamma_profile.map(ReferenceCurve::new),
            gamma_deriv_start: doc.gamma_deriv_start,
        };
        tri.validate()?;
        Ok(tri)
    }

    pub fn to_json(&self) -> String {
        let doc = TriangleDoc {
            d_op: self.d_op,
            d_oq: self.d_oq,
            d_pq: self.d_pq,
            sigma_profile: self.sigma_profile.samples.clone(),
            gamma_profile: self.gamma_profile.as_ref().map(|c| c.samples.clone()),
            sigma_deriv_start: self.sigma_deriv_start,
            sigma_deriv_end: self.sigma_deriv_end,
            gamma_deriv_start: self.gamma_deriv_start,
        };
        serde_json::to_string(&doc).expect("triangle serialization")
    }

    pub fn validate(&self) -> Result<(), ComparisonError> {
        let s = &self.sigma_profile.samples;
        if s.len() < 2 {
            return Err(ComparisonError::ProfileInconsistent(
                "profile needs at least two samples".into(),
            ));
        }
        let f0 = s[0].1;
        let fe = s[s.len() - 1].1;
        if (f0 - self.d_op).abs() > 1e-6 || (fe - self.d_oq).abs() > 1e-6 {
            return Err(ComparisonError::ProfileInconsistent(format!(
                "profile endpoints ({f0}, {fe}) disagree with side lengths ({}, {})",
                self.d_op, self.d_oq
            )));
        }
        for w in s.windows(2) {
            if (w[1].1 - w[0].1).abs() > (w[1].0 - w[0].0) + 1e-9 {
                return Err(ComparisonError::ProfileInconsistent(format!(
                    "profile not 1-Lipschitz near t = {}",
                    w[0].0
                )));
            }
        }
        let (a, b, c) = (self.d_op, self.d_oq, self.d_pq);
        if a > b + c + 1e-9 || b > a + c + 1e-9 || c > a + b + 1e-9 {
            return Err(ComparisonError::ProfileInconsistent(
                "triangle inequality violated".into(),
            ));
        }
        Ok(())
    }

    pub fn sigma_deriv_start(&self) -> f64 {
        self.sigma_deriv_start
            .unwrap_or_else(|| self.sigma_profile.right_deriv_at(0.0))
    }

    pub fn sigma_deriv_end(&self) -> f64 {
        self.sigma_deriv_end.unwrap_or_else(|| {
            let s = &self.sigma_profile.samples;
            let n = s.len();
            (s[n - 1].1 - s[n - 2].1) / (s[n - 1].0 - s[n - 2].0)
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum EncounterClass {
    NotBad,
    Bad,
    Indeterminate,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Encounter {
    pub t_enter: f64,
    pub t_exit: f64,
    pub class: EncounterClass,
}

#[derive(Debug, Clone, Serialize)]
pub struct ComparisonReport {
    /// Placed apex `(r, theta)` in the model.
    pub q_tilde: (f64, f64),
    /// Angles in the compared space: at p, at q, at the base (if the
    /// meridian-side profile was provided).
    pub angle_p: f64,
    pub angle_q: f64,
    pub angle_o: Option<f64>,
    /// Angles of the comparison triangle.
    pub angle_p_model: f64,
    pub angle_q_model: f64,
    pub angle_o_model: f64,
    /// min over the side of `d(o, sigma(t)) - d(o_model, side(t))`.
    pub convexity_margin: f64,
    /// min over the meridian side of `d(p, gamma(s)) - d(p_model, .)`.
    pub gamma_margin: Option<f64>,
    pub encounters: Vec<Encounter>,
    /// Verdicts for side lengths, base convexity, vertex angles, base
    /// angle, and meridian-side convexity. `None` when the data needed is
    /// absent.
    pub properties: [Option<bool>; 5],
}

impl ComparisonReport {
    pub fn all_hold(&self) -> bool {
        self.properties.iter().all(|p| p.unwrap_or(true))
    }

    pub fn has_bad_encounter(&self) -> bool {
        self.encounters
            .iter()
            .any(|e| e.class == EncounterClass::Bad)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ComparisonOptions {
    /// Absolute tolerance for margin verdicts.
    pub tol: f64,
    /// Reject profiles exceeding the model radius (the radius bound that
    /// weaker radial attraction forces).
    pub wra_asserted: bool,
}

impl Default for ComparisonOptions {
    fn default() -> Self {
        Self {
            tol: 1e-7,
            wra_asserted: false,
        }
    }
}

/// Angles at `p` and `q` recovered from one-sided derivatives of the side
/// profile (first variation of arclength).
pub fn angles_from_profile(tri: &TriangleData) -> Result<(f64, f64), ComparisonError> {
    if tri.d_pq < 1e-9 {
        return Err(ComparisonError::DegenerateSide(tri.d_pq));
    }
    let ap = (-tri.sigma_deriv_start()).clamp(-1.0, 1.0).acos();
    let aq = tri.sigma_deriv_end().clamp(-1.0, 1.0).acos();
    Ok((ap, aq))
}

/// The lowermost minimizing geodesic from the base pair's first vertex to
/// `(r_q, theta_q)`: ties at cut points resolve to the smaller launch angle.
fn lowermost_side(
    rs: &RefSpace,
    r_q: f64,
    theta_q: f64,
    expect_len: f64,
    tol: f64,
) -> Result<(f64, Ray), ComparisonError> {
    let conns = geodesics::connect(rs.surface, rs.r0, r_q, theta_q, 128)?;
    let best = conns[0].length;
    if (best - expect_len).abs() > tol.max(1e-6) * (1.0 + expect_len) {
        return Err(ComparisonError::ProfileInconsistent(format!(
            "side length mismatch: placed apex at distance {best}, triangle says {expect_len}"
        )));
    }
    let mins: Vec<_> = conns
        .iter()
        .filter(|c| c.length <= best + 1e-7 * (1.0 + best))
        .collect();
    // Lowermost = largest arrival direction cosine; exact ties take the
    // smaller launch angle.
    let chosen = mins
        .iter()
        .max_by(|a, b| {
            (a.arrival_rdot, -a.phi)
                .partial_cmp(&(b.arrival_rdot, -b.phi))
                .unwrap()
        })
        .unwrap();
    let horizon = expect_len * 1.01 + 1e-6;
    Ok((
        chosen.phi,
        Ray::new(rs.surface, ShootSpec { r0: rs.r0, phi: chosen.phi }, horizon),
    ))
}

/// Distance from the base pair's first vertex to points of the meridian at
/// `theta_star`, evaluated on a decreasing grid of heights with warm-started
/// launch-angle tracking per geodesic family.
pub fn meridian_distance_profile(
    rs: &RefSpace,
    theta_star: f64,
    heights: &[f64],
    start_phi: f64,
) -> Vec<f64> {
    let surface = rs.surface;
    let r0 = rs.r0;
    let ell = surface.ell();

    if let SurfaceFamily::ConstantCurvature { kappa } = surface.family() {
        let sk = kappa.sqrt();
        return heights
            .iter()
            .map(|&s| {
                let c = (sk * r0).cos() * (sk * s).cos()
                    + (sk * r0).sin() * (sk * s).sin() * theta_star.cos();
                c.clamp(-1.0, 1.0).acos() / sk
            })
            .collect();
    }

    let cap = if ell.is_finite() { r0 + ell + 1.0 } else { r0 + 50.0 };
    // Arrival radius at a given swept angle, as a function of launch angle.
    let radius_at = |phi: f64, sweep: f64| -> Option<(f64, f64)> {
        let ray = Ray::new(surface, ShootSpec { r0, phi }, cap);
        let t = ray.theta_time(sweep, cap)?;
        Some((ray.state(t).r, t))
    };
    // All launch angles whose arrival radius at the sweep equals the target.
    // The scan grid is uniform plus geometric ladders toward the meridian
    // launches, where near-pole arrivals concentrate.
    let scan_phis: Vec<f64> = {
        let mut v: Vec<f64> = (0..=96)
            .map(|i| 1e-7 + (PI - 2e-7) * i as f64 / 96.0)
            .collect();
        let mut step = 1e-6;
        while step < 0.04 {
            v.push(step);
            v.push(PI - step);
            step *= 2.0;
        }
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        v
    };
    let all_roots = |sweep: f64, target: f64| -> Vec<f64> {
        let mut out = Vec::new();
        let mut prev: Option<(f64, f64)> = None;
        for &phi in &scan_phis {
            let Some((r, _)) = radius_at(phi, sweep) else {
                prev = None;
                continue;
            };
            if let Some((pp, rp)) = prev {
                if (rp - target) * (r - target) <= 0.0 {
                    out.push(optim::bisect(
                        |p| radius_at(p, sweep).map(|(r, _)| r - target).unwrap_or(f64::NAN),
                        pp,
                        phi,
                        1e-11,
                    ));
                }
            }
            prev = Some((phi, r));
        }
        if std::env::var("TOPO_DBG_MP").is_ok() {
            eprintln!("    all_roots(sweep={sweep:.4}, target={target:.6}) -> {out:?}");
        }
        out
    };
    // Secant update of one tracked root toward a new target height.
    let retrack = |sweep: f64, phi_warm: f64, target: f64| -> Option<(f64, f64)> {
        let f = |p: f64| radius_at(p, sweep).map(|(r, _)| r - target);
        let mut p0 = phi_warm;
        let Some(mut f0) = f(p0) else {
            if std::env::var("TOPO_DBG_MP").is_ok() {
                eprintln!("    retrack f(p0) None at {p0:.6e}");
            }
            return None;
        };
        let _ = &mut f0;
        let mut p1 = (p0 + 1e-5).min(PI - 1e-7);
        let Some(mut f1) = f(p1) else {
            if std::env::var("TOPO_DBG_MP").is_ok() {
                eprintln!("    retrack f(p1) None at {p1:.6e}");
            }
            return None;
        };
        for _ in 0..40 {
            if f1.abs() < 1e-12 {
                break;
            }
            if (f1 - f0).abs() < 1e-300 {
                return None;
            }
            let p2 = (p1 - f1 * (p1 - p0) / (f1 - f0)).clamp(1e-7, PI - 1e-7);
            if (p2 - p1).abs() > 0.3 {
                return None;
            }
            p0 = p1;
            f0 = f1;
            p1 = p2;
            match f(p1) {
                Some(v) => f1 = v,
                None => {
                    if std::env::var("TOPO_DBG_MP").is_ok() {
                        eprintln!("    retrack inner None at p={p1:.6e} (from warm {phi_warm:.6e})");
                    }
                    return None;
                }
            }
        }
        if f1.abs() > 1e-8 {
            if std::env::var("TOPO_DBG_MP").is_ok() {
                eprintln!("    retrack reject phi={phi_warm:.6e} -> p1={p1:.6e} f1={f1:.3e} target={target:.6}");
            }
            return None;
        }
        radius_at(p1, sweep).map(|(_, t)| (p1, t))
    };

    // Evaluate from the apex height downward so the warm roots stay valid.
    let mut order: Vec<usize> = (0..heights.len()).collect();
    order.sort_by(|&a, &b| heights[b].partial_cmp(&heights[a]).unwrap());
    let mut results = vec![0.0; heights.len()];
    let sweeps = if surface.is_compact() {
        vec![theta_star, 2.0 * PI - theta_star]
    } else {
        vec![theta_star]
    };
    let mut tracked: Vec<Vec<f64>> = vec![Vec::new(); sweeps.len()];
    tracked[0].push(start_phi);
    for (step, &idx) in order.iter().enumerate() {
        let s = heights[idx];
        let mut d = r0 + s;
        if ell.is_finite() {
            d = d.min(2.0 * ell - r0 - s);
        }
        if s > 1e-6 {
            let dbg = std::env::var("TOPO_DBG_MP").is_ok() && (s - 0.0079).abs() < 1e-3;
            for (class, &sweep) in sweeps.iter().enumerate() {
                if dbg { eprintln!("s={s} class={class} sweep={sweep} step={step} tracked={:?}", tracked[class]); }
                // Periodically rescan for geodesic branches that appear as
                // the target point moves down the meridian, and whenever
                // tracking loses every root of the class.
                for attempt in 0..2 {
                    if attempt == 1 || step % 16 == 0 || tracked[class].is_empty() {
                        for root in all_roots(sweep, s) {
                            if tracked[class].iter().all(|&p| (p - root).abs() > 1e-6) {
                                tracked[class].push(root);
                            }
                        }
                    }
                    let mut kept = Vec::new();
                    for &phi in &tracked[class] {
                        if let Some((phi_new, t)) = retrack(sweep, phi, s) {
                            d = d.min(t);
                            if kept.iter().all(|&p: &f64| (p - phi_new).abs() > 1e-6) {
                                kept.push(phi_new);
                            }
                        }
                    }
                    let lost = kept.is_empty() && !tracked[class].is_empty();
                    if dbg { eprintln!("  attempt={attempt} kept={kept:?} d={d}"); }
                    let lost = lost;
                    tracked[class] = kept;
                    if !lost {
                        break;
                    }
                }
            }
        }
        results[idx] = d;
    }
    results
}

/// Detect all encounters of a reference curve with the cut-locus image:
/// transversal crossings and tangential contact stretches of each branch
/// arc.
pub fn detect_encounters(rs: &RefSpace, curve: &ReferenceCurve) -> Vec<Encounter> {
    let mut out = Vec::new();
    let touch_tol = 1e-9;
    for arc in rs.cut().arcs() {
        if arc.is_trunk {
            continue;
        }
        let lo = arc.t_start().max(curve.t_start());
        let hi = arc.t_end().min(curve.t_end());
        if hi <= lo {
            continue;
        }
        // Fast reject: the curve never reaches the arc heights.
        let arc_min = arc
            .points
            .iter()
            .map(|p| p.r)
            .fold(f64::INFINITY, f64::min);
        let curve_max = curve
            .samples
            .iter()
            .filter(|&&(t, _)| t >= lo - 1e-9 && t <= hi + 1e-9)
            .map(|&(_, y)| y)
            .fold(f64::NEG_INFINITY, f64::max);
        if curve_max < arc_min - 1e-6 {
            continue;
        }
        let g = |t: f64| curve.y_at(t) - arc.height_at(t.clamp(arc.t_start(), arc.t_end())).unwrap_or(f64::NAN);
        let n = 2048;
        let step = (hi - lo) / n as f64;
        let vals: Vec<(f64, f64)> = (0..=n)
            .map(|i| {
                let t = lo + step * i as f64;
                (t, g(t))
            })
            .collect();
        let mut runs: Vec<(f64, f64)> = Vec::new();
        for w in vals.windows(2) {
            let ((tp, vp), (t, v)) = (w[0], w[1]);
            if vp * v < 0.0 && vp.abs() > touch_tol && v.abs() > touch_tol {
                let root = optim::bisect(g, tp, t, 1e-9);
                runs.push((root, root));
            }
            if v.abs() <= touch_tol {
                match runs.last_mut() {
                    Some(last) if (last.1 - t).abs() <= step * 1.5 => last.1 = t,
                    _ => runs.push((t, t)),
                }
            }
        }
        // Tangential touches from below: local maxima of the offset that
        // reach zero without a sign change.
        for w in vals.windows(3) {
            let ((ta, va), (_, vb), (tc, vc)) = (w[0], w[1], w[2]);
            if vb >= va && vb >= vc && vb < -touch_tol && vb > -1e-3 {
                let (t_m, v_m) = optim::golden_max(g, ta, tc, 1e-12);
                if v_m >= -touch_tol {
                    runs.push((t_m, t_m));
                }
            }
        }
        runs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        for (enter, exit) in runs {
            out.push(Encounter {
                t_enter: enter,
                t_exit: exit,
                class: EncounterClass::Indeterminate,
            });
        }
    }
    out.sort_by(|a, b| a.t_enter.partial_cmp(&b.t_enter).unwrap());
    out.dedup_by(|a, b| (a.t_enter - b.t_enter).abs() < 1e-9);
    out
}

/// Classify one encounter: not bad if the curve drops below the arc
/// immediately to the right (decided by the one-sided derivative shortcut
/// when conclusive, otherwise by scanning shrinking windows).
pub fn classify_encounter(
    rs: &RefSpace,
    curve: &ReferenceCurve,
    t0: f64,
    tol: f64,
) -> Result<EncounterClass, ComparisonError> {
    let arc: &CutArc = rs
        .cut()
        .arcs()
        .find(|arc| {
            !arc.is_trunk
                && t0 >= arc.t_start() - 1e-6
                && t0 <= arc.t_end() + 1e-6
                && arc
                    .height_at(t0.clamp(arc.t_start(), arc.t_end()))
                    .map(|h| (h - curve.y_at(t0)).abs() < 1e-4)
                    .unwrap_or(false)
        })
        .ok_or(ComparisonError::NotAnEncounter(t0))?;

    let deriv_tol = 1e-6;
    let curve_slope = curve.right_deriv_at(t0);
    let arc_slope = cutlocus::arc_height_right_derivative(arc, t0.clamp(arc.t_start(), arc.t_end()))?;
    if curve_slope < arc_slope - deriv_tol {
        return Ok(EncounterClass::NotBad);
    }
    if curve_slope > arc_slope + deriv_tol {
        return Ok(EncounterClass::Bad);
    }
    // Scan shrinking windows to the right of the encounter.
    let domain_end = curve.t_end().min(arc.t_end());
    let mut eps = (domain_end - t0).min(0.05);
    if eps <= 1e-9 {
        return Ok(EncounterClass::NotBad);
    }
    let mut excess = f64::NEG_INFINITY;
    while eps >= 1e-6 {
        excess = f64::NEG_INFINITY;
        for i in 1..=64 {
            let t = t0 + eps * i as f64 / 64.0;
            let h = arc.height_at(t.clamp(arc.t_start(), arc.t_end()))?;
            excess = excess.max(curve.y_at(t) - h);
        }
        if excess <= tol {
            return Ok(EncounterClass::NotBad);
        }
        eps /= 4.0;
    }
    if excess > 10.0 * tol {
        Ok(EncounterClass::Bad)
    } else {
        Ok(EncounterClass::Indeterminate)
    }
}

/// Build the comparison triangle and verify all five properties.
pub fn build_comparison(
    rs: &RefSpace,
    tri: &TriangleData,
    opts: &ComparisonOptions,
) -> Result<ComparisonReport, ComparisonError> {
    tri.validate()?;
    let ell = rs.surface.ell();
    if opts.wra_asserted && ell.is_finite() {
        let max = tri
            .sigma_profile
            .samples
            .iter()
            .map(|&(_, y)| y)
            .fold(tri.d_op.max(tri.d_oq), f64::max);
        if max > ell + opts.tol {
            return Err(ComparisonError::RadiusBound { ell, max });
        }
    }
    let apex = ReferencePoint {
        x: tri.d_pq,
        y: tri.d_oq,
    };
    if !rs.membership(apex) {
        return Err(ComparisonError::OutsideReferenceSpace {
            x: apex.x,
            y: apex.y,
        });
    }
    let (r_q, theta_q) = rs.invert(apex)?;

    // Degenerate boundary placements: the side runs along meridians and all
    // margins are exact.
    let boundary = (apex.x + apex.y - rs.r0).abs() < 1e-9
        || ((apex.y - apex.x).abs() - rs.r0).abs() < 1e-9;
    let (side_phi, side_heights): (f64, Vec<f64>) = if boundary {
        let sgn = if apex.y >= rs.r0 { 1.0 } else { -1.0 };
        let heights = tri
            .sigma_profile
            .samples
            .iter()
            .map(|&(t, _)| (rs.r0 + sgn * t).abs())
            .collect();
        (if sgn > 0.0 { PI } else { 0.0 }, heights)
    } else {
        let (phi, ray) = lowermost_side(rs, r_q, theta_q, tri.d_pq, opts.tol)?;
        let heights = tri
            .sigma_profile
            .samples
            .iter()
            .map(|&(t, _)| ray.state(t).r)
            .collect();
        (phi, heights)
    };

    // Base convexity margin over the side samples.
    let mut convexity_margin = f64::INFINITY;
    for (&(_, f), h) in tri.sigma_profile.samples.iter().zip(side_heights.iter()) {
        convexity_margin = convexity_margin.min(f - h);
    }

    // Angles.
    let (angle_p, angle_q) = angles_from_profile(tri)?;
    let angle_p_model = side_phi;
    let end_state_rdot = if boundary {
        if apex.y >= rs.r0 { 1.0 } else { -1.0 }
    } else {
        Ray::new(
            rs.surface,
            ShootSpec { r0: rs.r0, phi: side_phi },
            tri.d_pq * 1.01 + 1e-9,
        )
        .state(tri.d_pq)
        .rdot
    };
    let angle_q_model = end_state_rdot.clamp(-1.0, 1.0).acos();
    let angle_o_model = theta_q;
    let angle_o = tri
        .gamma_deriv_start
        .map(|d| (-d).clamp(-1.0, 1.0).acos())
        .or_else(|| {
            tri.gamma_profile
                .as_ref()
                .map(|g| (-g.right_deriv_at(0.0)).clamp(-1.0, 1.0).acos())
        });

    // Meridian-side convexity margin.
    let gamma_margin = tri.gamma_profile.as_ref().map(|g| {
        let heights: Vec<f64> = g.samples.iter().map(|&(s, _)| s).collect();
        let dists = meridian_distance_profile(rs, theta_q, &heights, side_phi);
        g.samples
            .iter()
            .zip(dists.iter())
            .map(|(&(_, gv), &d)| gv - d)
            .fold(f64::INFINITY, f64::min)
    });

    // Encounters of the side's reference curve with the cut image.
    let mut encounters = detect_encounters(rs, &tri.sigma_profile);
    for e in &mut encounters {
        e.class = classify_encounter(rs, &tri.sigma_profile, e.t_enter, opts.tol)?;
    }

    let tol = opts.tol;
    let angle_tol = 1e-5;
    let properties = [
        Some(true), // side lengths match by construction of the placement
        Some(convexity_margin >= -tol),
        Some(angle_p_model <= angle_p + angle_tol && angle_q_model <= angle_q + angle_tol),
        angle_o.map(|ao| angle_o_model <= ao + angle_tol),
        gamma_margin.map(|m| m >= -tol),
    ];

    Ok(ComparisonReport {
        q_tilde: (r_q, theta_q),
        angle_p,
        angle_q,
        angle_o,
        angle_p_model,
        angle_q_model,
        angle_o_model,
        convexity_margin,
        gamma_margin,
        encounters,
        properties,
    })
}

/// Alexandrov convexity margins of every prefix triangle of a reference
/// curve: prefix `t` forms the triangle with sides `(r0, y(t), t)` and
/// profile the curve restricted to `[0, t]`.
pub fn prefix_convexity_margins(
    rs: &RefSpace,
    curve: &ReferenceCurve,
    n_prefix: usize,
    opts: &ComparisonOptions,
) -> Vec<(f64, Result<f64, ComparisonError>)> {
    let t_end = curve.t_end();
    (1..=n_prefix)
        .map(|i| {
            let t = t_end * i as f64 / n_prefix as f64;
            let samples: Vec<(f64, f64)> = curve
                .samples
                .iter()
                .copied()
                .filter(|&(ts, _)| ts <= t + 1e-12)
                .collect();
            if samples.len() < 3 {
                return (t, Err(ComparisonError::DegenerateSide(t)));
            }
            let tri = TriangleData {
                d_op: rs.r0,
                d_oq: samples.last().unwrap().1,
                d_pq: samples.last().unwrap().0,
                sigma_profile: ReferenceCurve::new(samples),
                sigma_deriv_start: None,
                sigma_deriv_end: None,
                gamma_profile: None,
                gamma_deriv_start: None,
            };
            let margin = build_comparison(rs, &tri, opts).map(|rep| rep.convexity_margin);
            (t, margin)
        })
        .collect()
}

/// Recovered azimuth of the moving apex along the meridian side: by the
/// monotone-angle property this is nonincreasing for triangle families
/// satisfying the comparison hypotheses.
pub fn apex_azimuth_along_gamma(
    rs: &RefSpace,
    tri: &TriangleData,
    n: usize,
) -> Result<Vec<(f64, f64)>, ComparisonError> {
    let g = tri
        .gamma_profile
        .as_ref()
        .ok_or_else(|| ComparisonError::ProfileInconsistent("no meridian-side profile".into()))?;
    let mut out = Vec::new();
    for i in 1..=n {
        let s = g.t_end() * i as f64 / n as f64;
        let pt = ReferencePoint {
            x: g.y_at(s),
            y: s,
        };
        if !rs.membership(pt) {
            continue;
        }
        let (_, theta) = rs.invert(pt)?;
        out.push((s, theta));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mspace::{self, TestManifold};
    use crate::num::rng::SplitMix64;
    use crate::profile::ModelSurface;
    use crate::refspace::RefSpace;

    #[test]
    fn angles_from_profile_degenerate_directions() {
        // Profile decreasing at unit rate: apex straight toward the base.
        let n = 16;
        let tri = TriangleData {
            d_op: 1.0,
            d_oq: 0.5,
            d_pq: 0.5,
            sigma_profile: ReferenceCurve::new(
                (0..=n)
                    .map(|i| {
                        let t = 0.5 * i as f64 / n as f64;
                        (t, 1.0 - t)
                    })
                    .collect(),
            ),
            sigma_deriv_start: None,
            sigma_deriv_end: None,
            gamma_profile: None,
            gamma_deriv_start: None,
        };
        let (ap, _) = angles_from_profile(&tri).unwrap();
        assert!(ap.abs() < 1e-9);
        let tri2 = TriangleData {
            d_oq: 1.5,
            sigma_profile: ReferenceCurve::new(
                (0..=n)
                    .map(|i| {
                        let t = 0.5 * i as f64 / n as f64;
                        (t, 1.0 + t)
                    })
                    .collect(),
            ),
            ..tri
        };
        let (ap2, _) = angles_from_profile(&tri2).unwrap();
        assert!((ap2 - PI).abs() < 1e-9);
    }

    #[test]
    fn self_comparison_on_the_unit_sphere() {
        // Comparing the unit sphere against itself: congruent triangles,
        // all margins vanish.
        let m = ModelSurface::constant_curvature(1.0).unwrap();
        let rs = RefSpace::new(&m, 1.0, 65).unwrap();
        let manifold = TestManifold::sphere(1.0, 2).unwrap();
        let mut rng = SplitMix64::new(4);
        let opts = ComparisonOptions::default();
        for _ in 0..30 {
            let Ok(tri) = mspace::triangle_from(
                &manifold,
                1.0,
                rng.range(0.3, 2.6),
                rng.range(0.2, PI - 0.2),
            ) else {
                continue;
            };
            let rep = build_comparison(&rs, &tri, &opts).unwrap();
            assert!(rep.all_hold(), "self comparison failed: {rep:?}");
            assert!(
                rep.convexity_margin.abs() < 1e-7,
                "margin {} should vanish",
                rep.convexity_margin
            );
            if let Some(gm) = rep.gamma_margin {
                assert!(gm.abs() < 1e-6, "gamma margin {gm}");
            }
            assert!((rep.angle_p - rep.angle_p_model).abs() < 1e-5);
            assert!((rep.angle_q - rep.angle_q_model).abs() < 1e-5);
        }
    }

    #[test]
    fn degenerate_apex_on_base_segment() {
        // Apex on the segment between the vertices: boundary placement with
        // exact margins and straight angles.
        let m = ModelSurface::constant_curvature(1.0).unwrap();
        let rs = RefSpace::new(&m, 1.0, 65).unwrap();
        let manifold = TestManifold::sphere(1.0, 2).unwrap();
        let tri = mspace::triangle_from(&manifold, 1.0, 0.4, 1e-12).unwrap();
        let rep = build_comparison(&rs, &tri, &ComparisonOptions::default()).unwrap();
        assert!(rep.all_hold());
        assert!(rep.convexity_margin.abs() < 1e-9);
        assert!((rep.angle_q - PI).abs() < 1e-4, "angle at apex {}", rep.angle_q);
        assert!((rep.angle_q_model - PI).abs() < 1e-4);
    }

    #[test]
    fn projective_triangles_against_lambda_sphere() {
        let m = ModelSurface::lambda_sphere(-0.9).unwrap();
        let rs = RefSpace::new(&m, 1.2, 65).unwrap();
        let manifold = TestManifold::projective(3).unwrap();
        let mut rng = SplitMix64::new(12);
        let opts = ComparisonOptions {
            wra_asserted: true,
            ..Default::default()
        };
        let mut done = 0;
        while done < 25 {
            let Ok(tri) = mspace::triangle_from(
                &manifold,
                1.2,
                rng.range(0.1, PI / 2.0),
                rng.range(0.1, PI - 0.1),
            ) else {
                continue;
            };
            let rep = build_comparison(&rs, &tri, &opts).unwrap();
            assert!(
                rep.all_hold(),
                "comparison property failed: margins {:?} angles ({}, {}) vs ({}, {})",
                (rep.convexity_margin, rep.gamma_margin),
                rep.angle_p_model,
                rep.angle_q_model,
                rep.angle_p,
                rep.angle_q
            );
            assert!(!rep.has_bad_encounter());
            done += 1;
        }
    }

    #[test]
    fn rp_at_half_pi_encounters_are_not_bad() {
        // Base distance exactly a quarter turn: profiles can touch the cut
        // image (the parallel at the same height); contact must classify as
        // not bad.
        let m = ModelSurface::lambda_sphere(-0.9).unwrap();
        let r0 = PI / 2.0;
        let rs = RefSpace::new(&m, r0, 129).unwrap();
        let manifold = TestManifold::projective(3).unwrap();
        let mut rng = SplitMix64::new(21);
        let mut encountered = 0;
        for _ in 0..200 {
            let Ok(tri) = mspace::triangle_from(
                &manifold,
                r0,
                rng.range(0.3, PI / 2.0),
                rng.range(0.1, PI - 0.1),
            ) else {
                continue;
            };
            let rep = build_comparison(&rs, &tri, &ComparisonOptions::default()).unwrap();
            for e in &rep.encounters {
                encountered += 1;
                assert_eq!(
                    e.class,
                    EncounterClass::NotBad,
                    "projective contact at t={} misclassified",
                    e.t_enter
                );
            }
            assert!(rep.all_hold());
        }
        assert!(encountered > 0, "expected some cut-image contacts at r0 = pi/2");
    }

    #[test]
    fn synthetic_bad_encounter_detected() {
        // A curve that crosses the horizontal cut arc from below going up.
        let lambda = -0.5;
        let r0: f64 = 1.0;
        let m = ModelSurface::lambda_sphere(lambda).unwrap();
        let rs = RefSpace::new(&m, r0, 65).unwrap();
        let arc_height = PI - r0;
        let t_tip = PI * (1.0 + lambda * r0.sin().powi(2)).sqrt();
        let n = 1024;
        // Keep the contact time exactly on the sample grid.
        let t0 = t_tip + 0.25;
        let t_end = 2.0 * t0;
        let curve = ReferenceCurve::new(
            (0..=n)
                .map(|i| {
                    let t = t_end * i as f64 / n as f64;
                    // Rise toward the arc, cross it at t0 with slope 1/2.
                    (t, arc_height + 0.5 * (t - t0))
                })
                .collect(),
        );
        let found = detect_encounters(&rs, &curve);
        assert_eq!(found.len(), 1, "one transversal crossing, got {found:?}");
        let class = classify_encounter(&rs, &curve, found[0].t_enter, 1e-7).unwrap();
        assert_eq!(class, EncounterClass::Bad);

        // Tangent from below then receding: not bad.
        let curve2 = ReferenceCurve::new(
            (0..=n)
                .map(|i| {
                    let t = t_end * i as f64 / n as f64;
                    (t, arc_height - 2.0 * (t - t0) * (t - t0))
                })
                .collect(),
        );
        // The parabola's top sits exactly on a sample, so the sampled curve
        // genuinely touches the arc there.
        let found2 = detect_encounters(&rs, &curve2);
        assert!(!found2.is_empty());
        let class2 = classify_encounter(&rs, &curve2, found2[0].t_enter, 1e-7).unwrap();
        assert_eq!(class2, EncounterClass::NotBad);
    }

    #[test]
    fn apex_azimuth_monotone_for_projective_samples() {
        let m = ModelSurface::lambda_sphere(-0.8).unwrap();
        let rs = RefSpace::new(&m, 1.0, 65).unwrap();
        let manifold = TestManifold::projective(3).unwrap();
        let mut rng = SplitMix64::new(31);
        let mut done = 0;
        while done < 10 {
            let Ok(tri) = mspace::triangle_from(
                &manifold,
                1.0,
                rng.range(0.3, PI / 2.0),
                rng.range(0.2, PI - 0.2),
            ) else {
                continue;
            };
            let Ok(track) = apex_azimuth_along_gamma(&rs, &tri, 60) else {
                continue;
            };
            for w in track.windows(2) {
                assert!(
                    w[1].1 <= w[0].1 + 1e-4,
                    "apex azimuth increased along the meridian side: {:?}",
                    w
                );
            }
            done += 1;
        }
    }

    #[test]
    fn radius_bound_rejection() {
        let m = ModelSurface::lambda_sphere(-0.5).unwrap();
        let rs = RefSpace::new(&m, 1.0, 65).unwrap();
        let n = 64;
        let tri = TriangleData {
            d_op: 1.0,
            d_oq: PI + 0.5,
            d_pq: PI,
            sigma_profile: ReferenceCurve::new(
                (0..=n)
                    .map(|i| {
                        let t = PI * i as f64 / n as f64;
                        (t, 1.0 + t * (PI + 0.5 - 1.0) / PI)
                    })
                    .collect(),
            ),
            sigma_deriv_start: None,
            sigma_deriv_end: None,
            gamma_profile: None,
            gamma_deriv_start: None,
        };
        let opts = ComparisonOptions {
            wra_asserted: true,
            ..Default::default()
        };
        assert!(matches!(
            build_comparison(&rs, &tri, &opts),
            Err(ComparisonError::RadiusBound { .. })
        ));
    }

    #[test]
    fn triangle_json_round_trip() {
        let manifold = TestManifold::sphere(1.0, 2).unwrap();
        let tri = mspace::triangle_from(&manifold, 1.0, 1.2, 0.9).unwrap();
        let json = tri.to_json();
        let back = TriangleData::from_json(&json).unwrap();
        assert_eq!(tri.d_pq, back.d_pq);
        assert_eq!(tri.sigma_profile.samples, back.sigma_profile.samples);
    }
}
