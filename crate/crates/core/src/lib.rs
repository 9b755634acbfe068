//! Generalized plane stress elasticity on domains with cavities: geometry,
//! meshing, materials, a finite element forward solver, local Airy stress
//! functions and diagnostics for the identification of cavities from
//! boundary data.

pub mod airy;
pub mod elasticity;
pub mod error;
pub mod geometry;
pub mod inverse;
pub mod material;
pub mod mesh;
pub mod tensor;

pub use error::{Error, Result};
pub use geometry::{DomainSpec, Point2, RigidMotion, StarShape};
pub use elasticity::{DisplacementField, ElementOrder, SaddleSolution, StressField, TractionSpec};
pub use material::PlateMaterial;
pub use mesh::{BoundaryTag, Mesh};
