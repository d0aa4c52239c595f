use toposphere::profile::ModelSurface;
use toposphere::geodesics::{Ray, ShootSpec};
fn main() {
    let m = ModelSurface::lambda_sphere(-0.9).unwrap();
    let r0 = 1.2;
    let cap = r0 + std::f64::consts::PI + 1.0;
    let sweep = 0.15876409295634103;
    let mut phi = 1e-6;
    while phi < 0.05 {
        let ray = Ray::new(&m, ShootSpec { r0, phi }, cap);
        match ray.theta_time(sweep, cap) {
            Some(t) => println!("phi={phi:.2e}: t={t:.6} r={:.6}", ray.state(t).r),
            None => println!("phi={phi:.2e}: no sweep"),
        }
        phi *= 2.0;
    }
}
