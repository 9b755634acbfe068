//! Finite element forward solver for the traction problem with
//! traction-free cavities.

mod fields;
mod solve;
mod space;
mod traction;

pub use fields::{boundary_traction_max, local_energy, stress_field, stress_in, DisplacementField, StressField};
pub use solve::{
    assemble_stiffness, balanced_load, constraint_rows, rigid_basis, solve_forward, solve_on_space, solve_system,
    SaddleSolution, SolveMethod, SolverOptions, Stiffness, System,
};
pub use space::{bary_point, element_geometry, ElementGeometry, ElementOrder, FeSpace};
pub use traction::{
    boundary_sobolev_norm, check_load_equilibrium, equilibrium_of, frequency_ratio, EquilibriumReport, Profile,
    SobolevOrder, TractionSegment, TractionSpec,
};
