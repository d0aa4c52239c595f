//! Small numerical building blocks shared across the crate.

pub mod ode;
pub mod optim;
pub mod rng;
pub mod spline;
