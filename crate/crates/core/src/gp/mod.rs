//! Gaussian-process machinery over a finite grid of strategy profiles.

mod bessel;
mod grid;
mod kernel;
pub(crate) mod linalg;
mod posterior;
mod sampling;

pub use bessel::bessel_k;
pub use grid::{equally_spaced_axis, Profile, ProfileGrid};
pub use kernel::{kernel_eval, kernel_matrix, KernelKind, KernelSpec};
pub(crate) use posterior::aggregated_marginals;
pub use posterior::{posterior_aggregated, posterior_batch, variance_bound, GpPosterior};
pub use sampling::{sample_utility, sample_utility_dense};
