use toposphere::comparison::{build_comparison, ComparisonOptions};
use toposphere::mspace::{self, TestManifold};
use toposphere::num::rng::SplitMix64;
use toposphere::profile::ModelSurface;
use toposphere::refspace::RefSpace;
use toposphere::geodesics;
fn main() {
    let pi = std::f64::consts::PI;
    let m = ModelSurface::lambda_sphere(-0.9).unwrap();
    let rs = RefSpace::new(&m, 1.2, 65).unwrap();
    let manifold = TestManifold::projective(3).unwrap();
    let mut rng = SplitMix64::new(12);
    let opts = ComparisonOptions { wra_asserted: true, ..Default::default() };
    for k in 0..40 {
        let Ok(tri) = mspace::triangle_from(&manifold, 1.2, rng.range(0.1, pi/2.0), rng.range(0.1, pi - 0.1)) else { continue };
        let rep = build_comparison(&rs, &tri, &opts).unwrap();
        if !rep.all_hold() {
            println!("k={k} FAIL d=({:.4},{:.4},{:.4})", tri.d_op, tri.d_oq, tri.d_pq);
            println!("  q_tilde={:?} props={:?}", rep.q_tilde, rep.properties);
            println!("  angles m=({:.4},{:.4},{:?}) model=({:.4},{:.4},{:.4})", rep.angle_p, rep.angle_q, rep.angle_o, rep.angle_p_model, rep.angle_q_model, rep.angle_o_model);
            println!("  margins conv={:.3e} gamma={:?}", rep.convexity_margin, rep.gamma_margin);
            let conns = geodesics::connect(&m, 1.2, rep.q_tilde.0, rep.q_tilde.1, 128).unwrap();
            for c in conns.iter().take(4) {
                println!("  conn l={:.6} phi={:.4} dn={} rd={:+.4}", c.length, c.phi, c.swept_down, c.arrival_rdot);
            }
            break;
        }
    }
}
