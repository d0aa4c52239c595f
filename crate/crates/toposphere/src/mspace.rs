//! Closed-form test manifolds: round spheres and real projective space,
//! with exact triangle data for feeding the comparison machinery.
//!
//! A geodesic triangle on either space lies in a totally geodesic 2-sphere
//! (or projective plane), so all distances come from the spherical law of
//! cosines applied to a lift; the projective metric folds distances at a
//! quarter turn.

use thiserror::Error;

use crate::comparison::TriangleData;
use crate::num::rng::SplitMix64;
use crate::refspace::ReferenceCurve;

const PI: f64 = std::f64::consts::PI;

#[derive(Debug, Error)]
pub enum MspaceError {
    #[error("failed to sample a non-degenerate triangle after {0} attempts")]
    DegenerateTriangle(usize),
    #[error("parameter outside the manifold: {0}")]
    Domain(String),
}

#[derive(Debug, Clone, Copy)]
pub enum TestManifold {
    /// Round n-sphere of constant curvature `kappa`.
    Sphere { kappa: f64, dim: usize },
    /// Real projective n-space of constant curvature 1 (diameter pi/2).
    ProjectiveSpace { dim: usize },
}

impl TestManifold {
    pub fn sphere(kappa: f64, dim: usize) -> Result<Self, MspaceError> {
        if !(kappa > 0.0) {
            return Err(MspaceError::Domain(format!("kappa must be positive, got {kappa}")));
        }
        if dim < 2 {
            return Err(MspaceError::Domain("dimension must be at least 2".into()));
        }
        Ok(TestManifold::Sphere { kappa, dim })
    }

    pub fn projective(dim: usize) -> Result<Self, MspaceError> {
        if dim < 2 {
            return Err(MspaceError::Domain("dimension must be at least 2".into()));
        }
        Ok(TestManifold::ProjectiveSpace { dim })
    }

    /// Largest distance from the base point.
    pub fn max_radius(&self) -> f64 {
        match self {
            TestManifold::Sphere { kappa, .. } => PI / kappa.sqrt(),
            TestManifold::ProjectiveSpace { .. } => PI / 2.0,
        }
    }
}

/// Spherical law of cosines for the side opposite the included angle.
fn side_from_angle(a: f64, b: f64, angle: f64) -> f64 {
    (a.cos() * b.cos() + a.sin() * b.sin() * angle.cos())
        .clamp(-1.0, 1.0)
        .acos()
}

/// Cosine of the angle at the vertex between sides `a`, `b` with opposite
/// side `c`, on the unit sphere.
fn angle_cos(a: f64, b: f64, c: f64) -> f64 {
    let denom = a.sin() * b.sin();
    if denom.abs() < 1e-300 {
        return 1.0;
    }
    ((c.cos() - a.cos() * b.cos()) / denom).clamp(-1.0, 1.0)
}

/// Height profile of a unit-sphere geodesic over its arclength: the running
/// distance to a vertex at distance `r_start` whose angle with the geodesic
/// is `angle` (cosine given).
fn sphere_height(r_start: f64, cos_angle: f64, t: f64) -> f64 {
    (r_start.cos() * t.cos() + r_start.sin() * t.sin() * cos_angle)
        .clamp(-1.0, 1.0)
        .acos()
}

/// Exact distance `d(o, sigma(t))` along the minimizing geodesic from `p`
/// to `q`, for points given as (colatitude from o, azimuth).
pub fn profile_along(
    manifold: &TestManifold,
    p: (f64, f64),
    q: (f64, f64),
    t: f64,
) -> Result<f64, MspaceError> {
    let scale = match manifold {
        TestManifold::Sphere { kappa, .. } => kappa.sqrt(),
        TestManifold::ProjectiveSpace { .. } => 1.0,
    };
    let (rp, rq, beta) = (p.0 * scale, q.0 * scale, (p.1 - q.1).abs());
    match manifold {
        TestManifold::Sphere { .. } => {
            let d_pq = side_from_angle(rp, rq, beta);
            if !(0.0..=d_pq + 1e-12).contains(&(t * scale)) {
                return Err(MspaceError::Domain(format!("t = {t} outside the side")));
            }
            let cos_p = angle_cos(rp, d_pq, rq);
            Ok(sphere_height(rp, cos_p, t * scale) / scale)
        }
        TestManifold::ProjectiveSpace { .. } => {
            if rp > PI / 2.0 + 1e-12 || rq > PI / 2.0 + 1e-12 {
                return Err(MspaceError::Domain("projective colatitude exceeds pi/2".into()));
            }
            let d_sphere = side_from_angle(rp, rq, beta);
            // Minimizing lift: flip the far endpoint when the spherical
            // distance exceeds a quarter turn; at the exact tie take the
            // lift with the smaller start colatitude unchanged.
            let (rq_eff, d_eff) = if d_sphere > PI / 2.0 + 1e-15 {
                (PI - rq, PI - d_sphere)
            } else {
                (rq, d_sphere)
            };
            if t > d_eff + 1e-12 {
                return Err(MspaceError::Domain(format!("t = {t} outside the side")));
            }
            let cos_p = angle_cos(rp, d_eff, rq_eff);
            let g = sphere_height(rp, cos_p, t);
            Ok(g.min(PI - g))
        }
    }
}

/// Sample a random geodesic triangle with exact side profiles. The profile
/// of the side from `p` to `q` carries 512 samples plus exact one-sided
/// endpoint derivatives; the profile along the side from the base vertex to
/// `q` is also provided so that base-angle comparisons are possible.
pub fn sample_triangle(
    manifold: &TestManifold,
    rng: &mut SplitMix64,
    r0_range: (f64, f64),
) -> Result<TriangleData, MspaceError> {
    let max_r = manifold.max_radius();
    for _ in 0..100 {
        let d_op = rng.range(r0_range.0.max(1e-3), r0_range.1.min(max_r - 1e-9));
        let d_oq = rng.range(0.05, max_r * 0.98);
        let beta = rng.range(0.05, PI - 0.05);
        match triangle_from(manifold, d_op, d_oq, beta) {
            Ok(tri) if tri.d_pq > 0.05 => return Ok(tri),
            _ => continue,
        }
    }
    Err(MspaceError::DegenerateTriangle(100))
}

/// Exact triangle data from base distances and the included angle at the
/// base vertex.
pub fn triangle_from(
    manifold: &TestManifold,
    d_op: f64,
    d_oq: f64,
    beta: f64,
) -> Result<TriangleData, MspaceError> {
    match manifold {
        TestManifold::Sphere { kappa, .. } => {
            let sk = kappa.sqrt();
            let (a, b) = (sk * d_op, sk * d_oq);
            let c = side_from_angle(a, b, beta);
            let d_pq = c / sk;
            if d_pq < 1e-9 || d_pq > PI / sk - 1e-9 {
                return Err(MspaceError::Domain("degenerate side".into()));
            }
            let cos_p = angle_cos(a, c, b);
            let n = 512;
            let sigma: Vec<(f64, f64)> = (0..=n)
                .map(|i| {
                    let t = d_pq * i as f64 / n as f64;
                    (t, sphere_height(a, cos_p, sk * t) / sk)
                })
                .collect();
            // Derivative of the height profile at the endpoints, exact.
            let cos_q = angle_cos(c, b, a);
            let m = 129;
            let gamma: Vec<(f64, f64)> = (0..=m)
                .map(|i| {
                    let s = d_oq * i as f64 / m as f64;
                    (s, sphere_height(a, beta.cos(), sk * s) / sk)
                })
                .collect();
            Ok(TriangleData {
                d_op,
                d_oq,
                d_pq,
                sigma_profile: ReferenceCurve::new(sigma),
                sigma_deriv_start: Some(-cos_p),
                sigma_deriv_end: Some(cos_q),
                gamma_profile: Some(ReferenceCurve::new(gamma)),
                gamma_deriv_start: Some(-beta.cos()),
            })
        }
        TestManifold::ProjectiveSpace { .. } => {
            if d_op > PI / 2.0 + 1e-12 || d_oq > PI / 2.0 + 1e-12 {
                return Err(MspaceError::Domain("projective distance exceeds pi/2".into()));
            }
            let d_sphere = side_from_angle(d_op, d_oq, beta);
            let (rq_eff, d_eff) = if d_sphere > PI / 2.0 + 1e-15 {
                (PI - d_oq, PI - d_sphere)
            } else {
                (d_oq, d_sphere)
            };
            let d_pq = d_eff;
            if d_pq < 1e-9 {
                return Err(MspaceError::Domain("degenerate side".into()));
            }
            let cos_p = angle_cos(d_op, d_eff, rq_eff);
            let fold = |g: f64| g.min(PI - g);
            let n = 512;
            let sigma: Vec<(f64, f64)> = (0..=n)
                .map(|i| {
                    let t = d_pq * i as f64 / n as f64;
                    (t, fold(sphere_height(d_op, cos_p, t)))
                })
                .collect();
            // One-sided derivatives flip sign across the fold.
            let start_folded = sphere_height(d_op, cos_p, 1e-9) > PI / 2.0;
            let end_g = sphere_height(d_op, cos_p, d_pq - 1e-9);
            let cos_q = angle_cos(d_eff, rq_eff, d_op);
            let sigma_d0 = if start_folded { cos_p } else { -cos_p };
            let sigma_d1 = if end_g > PI / 2.0 { -cos_q } else { cos_q };
            // Profile along the base side toward q: distances from p stay
            // in the projective range by the same fold.
            let m = 129;
            let gamma: Vec<(f64, f64)> = (0..=m)
                .map(|i| {
                    let s = d_oq * i as f64 / m as f64;
                    (s, fold(sphere_height(d_op, beta.cos(), s)))
                })
                .collect();
            let gamma_folded = sphere_height(d_op, beta.cos(), 1e-9) > PI / 2.0;
            Ok(TriangleData {
                d_op,
                d_oq,
                d_pq,
                sigma_profile: ReferenceCurve::new(sigma),
                sigma_deriv_start: Some(sigma_d0),
                sigma_deriv_end: Some(sigma_d1),
                gamma_profile: Some(ReferenceCurve::new(gamma)),
                gamma_deriv_start: Some(if gamma_folded { beta.cos() } else { -beta.cos() }),
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn collinear_profile_is_piecewise_linear() {
        let m = TestManifold::sphere(1.0, 2).unwrap();
        // q between o and p: angle at the base is zero.
        let tri = triangle_from(&m, 1.0, 0.4, 1e-9).unwrap();
        assert!((tri.d_pq - 0.6).abs() < 1e-9);
        for &(t, f) in &tri.sigma_profile.samples {
            assert!((f - (1.0 - t)).abs() < 1e-9, "collinear profile at {t}");
        }
    }

    #[test]
    fn profiles_are_lipschitz_and_consistent() {
        let m = TestManifold::sphere(1.7, 3).unwrap();
        let mut rng = SplitMix64::new(3);
        for _ in 0..50 {
            let tri = sample_triangle(&m, &mut rng, (0.1, 1.2)).unwrap();
            let s = &tri.sigma_profile.samples;
            assert!((s[0].1 - tri.d_op).abs() < 1e-12);
            assert!((s[s.len() - 1].1 - tri.d_oq).abs() < 1e-9);
            for w in s.windows(2) {
                assert!((w[1].1 - w[0].1).abs() <= (w[1].0 - w[0].0) + 1e-12);
            }
            assert!(tri.d_pq <= tri.d_op + tri.d_oq + 1e-12);
            assert!(tri.d_oq <= tri.d_op + tri.d_pq + 1e-12);
        }
    }

    #[test]
    fn projective_profiles_stay_under_quarter_turn() {
        let m = TestManifold::projective(3).unwrap();
        let mut rng = SplitMix64::new(8);
        for _ in 0..100 {
            let tri = sample_triangle(&m, &mut rng, (0.1, PI / 2.0)).unwrap();
            for &(_, f) in &tri.sigma_profile.samples {
                assert!(f <= PI / 2.0 + 1e-12, "projective distance exceeded: {f}");
            }
        }
    }

    #[test]
    fn projective_fold_continuity() {
        let m = TestManifold::projective(2).unwrap();
        // A long triangle whose spherical lift crosses the fold.
        let tri = triangle_from(&m, 1.5, 1.5, 2.9).unwrap();
        let s = &tri.sigma_profile.samples;
        for w in s.windows(2) {
            assert!(
                (w[1].1 - w[0].1).abs() <= (w[1].0 - w[0].0) + 1e-12,
                "fold broke continuity"
            );
        }
    }

    #[test]
    fn profile_along_matches_triangle_samples() {
        let m = TestManifold::sphere(1.0, 2).unwrap();
        let (d_op, d_oq, beta) = (0.9, 1.4, 1.1);
        let tri = triangle_from(&m, d_op, d_oq, beta).unwrap();
        for i in [37usize, 201, 388] {
            let (t, f) = tri.sigma_profile.samples[i];
            let via_points = profile_along(&m, (d_op, 0.0), (d_oq, beta), t).unwrap();
            assert!((f - via_points).abs() < 1e-12);
        }
    }

    #[test]
    fn deterministic_given_seed() {
        let m = TestManifold::projective(3).unwrap();
        let t1 = sample_triangle(&m, &mut SplitMix64::new(77), (0.2, 1.5)).unwrap();
        let t2 = sample_triangle(&m, &mut SplitMix64::new(77), (0.2, 1.5)).unwrap();
        assert_eq!(t1.d_pq, t2.d_pq);
        assert_eq!(t1.sigma_profile.samples, t2.sigma_profile.samples);
    }
}
