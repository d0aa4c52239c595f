use toposphere::mspace::{self, TestManifold};
use toposphere::profile::ModelSurface;
use toposphere::refspace::RefSpace;
use toposphere::{geodesics, comparison};
fn main() {
    let m = ModelSurface::lambda_sphere(-0.9).unwrap();
    let rs = RefSpace::new(&m, 1.2, 65).unwrap();
    let manifold = TestManifold::projective(3).unwrap();
    let tri = mspace::triangle_from(&manifold, 1.2, 1.0216531084009979, 0.29712497127730836).unwrap();
    let theta_star = 0.15876409295634103;
    let g = tri.gamma_profile.as_ref().unwrap();
    let heights: Vec<f64> = g.samples.iter().map(|&(s, _)| s).collect();
    let dists = comparison::meridian_distance_profile(&rs, theta_star, &heights, 0.7516);
    for (i, (&(s, gv), &d)) in g.samples.iter().zip(dists.iter()).enumerate() {
        if gv - d < -1e-6 {
            let truth = geodesics::distance(&m, (1.2, 0.0), (s, theta_star), 128).unwrap();
            println!("i={i} s={s:.4}: profiler d={d:.6} truth={truth:.6} g={gv:.6}");
            if i > 5 { break; }
        }
    }
    println!("done");
}
