//! Cauchy-data gaps, stability sweeps, vanishing rates, propagation of
//! smallness and cavity reconstruction.

mod family;
mod gap;
mod reconstruct;
mod smallness;
mod stats;
mod sweep;
mod vanishing;

pub use family::CavityFamily;
pub use gap::{cauchy_gap, rigid_quotient, sigma_trace, trace_gap, trace_norm, SigmaSampling, Trace, SIGMA_SAMPLES};
pub use reconstruct::{
    reconstruct, reconstruct_discrepancy, ObservedData, ReconstructOptions, ReconstructionResult, OBSERVED_SAMPLES,
};
pub use smallness::{offset_centers, smallness_profile, smallness_profile_at, ProfilePoint};
pub use stats::{linear_fit, spearman, RateFit};
pub use sweep::{family_mesh, fit_eta, fit_rows, stability_sweep, SweepFailure, SweepOptions, SweepResult, SweepRow};
pub use vanishing::{dyadic_radii, vanishing_rate, VanishingMode, VanishingRate};
