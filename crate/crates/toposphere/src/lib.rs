//! Numerical toolkit for triangle comparison against rotationally symmetric
//! model surfaces: geodesics, cut loci, reference maps, slope fields,
//! Alexandrov comparison triangles and the weaker-radial-attraction checks
//! that tie them together.

pub mod num;
pub mod profile;
pub mod geodesics;
pub mod cutlocus;
pub mod refspace;
pub mod comparison;
pub mod mspace;

pub use profile::{load_profile, ModelSurface, ProfileError, SurfaceFamily};
