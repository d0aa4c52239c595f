use toposphere::mspace::{self, TestManifold};
use toposphere::num::rng::SplitMix64;
use toposphere::profile::ModelSurface;
use toposphere::geodesics;
fn main() {
    let pi = std::f64::consts::PI;
    let m = ModelSurface::lambda_sphere(-0.9).unwrap();
    let manifold = TestManifold::projective(3).unwrap();
    let mut rng = SplitMix64::new(12);
    for k in 0..7 { let _ = mspace::triangle_from(&manifold, 1.2, rng.range(0.1, pi/2.0), rng.range(0.1, pi - 0.1)); let _ = k; }
    // k=6 failing triangle
    let tri = mspace::triangle_from(&manifold, 1.2, 1.0216531084009979, 0.29712497127730836_f64.to_degrees().to_radians()).unwrap();
    // reconstruct beta from gamma_deriv_start: angle_o = 0.297125 => beta = 0.297125
    println!("d=({}, {}, {})", tri.d_op, tri.d_oq, tri.d_pq);
    let theta_star = 0.15876409295634103;
    let g = tri.gamma_profile.as_ref().unwrap();
    let mut worst = (0.0f64, 0.0, 0.0, 0.0);
    for &(s, gv) in g.samples.iter() {
        if s < 1e-6 { continue; }
        let d = geodesics::distance(&m, (1.2, 0.0), (s, theta_star), 128).unwrap();
        let margin = gv - d;
        if margin < worst.0 { worst = (margin, s, gv, d); }
    }
    println!("worst margin via full connect: {:.6} at s={:.4} (g={:.6}, d={:.6})", worst.0, worst.1, worst.2, worst.3);
}
