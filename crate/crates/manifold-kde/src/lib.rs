//! k-nearest-neighbor kernel density estimation for random objects on
//! Riemannian manifolds.
//!
//! The estimator at a point p adapts its bandwidth to the data: with
//! H_n(p) the geodesic distance from p to its k-th nearest sample point
//! and ζ_n(p) = min(H_n(p), inj_g M),
//!
//! ```text
//! f̂_n(p) = 1/(n ζ_n^d(p)) · Σ_j K(d_g(p, x_j)/ζ_n(p)) / θ_{x_j}(p)
//! ```
//!
//! where K is a compactly supported radial kernel and θ the volume
//! density function correcting the kernel weights for curvature. Exact
//! geometry is provided for ℝ^d, the 2-sphere, and the unit cylinder.
//!
//! The crate is organized bottom-up:
//!
//! * [`geometry`] — manifolds, distances, θ, exp/log maps, ball volumes;
//! * [`kernel`] — kernel profiles and their integral constants;
//! * [`neighbors`] — k-th nearest-neighbor distances and the bandwidth
//!   clamp;
//! * [`estimator`] — the adaptive, fixed-bandwidth, and simple kNN
//!   estimators;
//! * [`models`] — sampling distributions with exact densities for
//!   simulation ground truth;
//! * [`experiment`] — the Monte Carlo harness (MSE/MedSE sweeps,
//!   consistency and normality diagnostics);
//! * [`data_io`] — dataset ingestion, angular jitter, grid export.

pub mod data_io;
pub mod estimator;
pub mod experiment;
pub mod geometry;
pub mod kernel;
pub mod models;
pub mod neighbors;
mod numeric;

pub use data_io::{
    cylinder_to_sample, default_jitter_scale, directional_to_sample, export_grid,
    jitter_repeated_angles, CylinderColumns, CylinderRecord, DataIoError, DirectionalRecord,
    ExportFormat, SphereColumns,
};
pub use estimator::{
    estimate_on_grid, fixed_bandwidth_estimate, knn_kernel_estimate, simple_knn_estimate,
    DensityEstimate, EstimateError, EstimatorConfig,
};
pub use experiment::{
    consistency_check, equidistant_k_grid, medse, mse, normality_diagnostic, run_sweep,
    spherical_cap_grid, substream, EvaluationMode, ExperimentConfig, ExperimentError,
    NormalityReport, SweepResult,
};
pub use geometry::{unit_ball_volume, GeometryError, Manifold, ManifoldPoint};
pub use kernel::{
    radial_normalization, second_moment, squared_integral, Kernel, KernelScaling, KernelSpec,
};
pub use models::{
    asymptotic_sigma_sq, DensityModel, MardiaSutton, ModelError, ModelSpec, UniformSphere,
    VonMisesFisher,
};
pub use neighbors::{clamped_bandwidth, NeighborError, SampleSet};
