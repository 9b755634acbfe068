//! Local Airy stress functions and the diagnostics built on them.

mod arc;
mod checks;
mod field;
mod patch;
mod poly;

pub use arc::{airy_gradient_along, airy_gradient_on_arc, ArcGradient};
pub use checks::{
    compatibility_at, dirichlet_residual, field_residuals, sandwich_check, sandwich_fraction, strain_function_at,
    strain_k, test_bumps, Bump, DirichletResidual, FieldResiduals, SandwichReport, StrainFunctions,
};
pub use field::{airy_from_fn, airy_from_samples, airy_on_patch, AiryField, AiryOptions};
pub use patch::{Patch, PatchKind};
