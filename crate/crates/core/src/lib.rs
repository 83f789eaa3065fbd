//! Learning maximin strategy profiles in two-player zero-sum simulation-based games.
//!
//! Utilities are only observable through a noisy simulator. A Gaussian-process prior
//! over the utility table lets the solvers share information between neighbouring
//! strategy profiles:
//!
//! - [`solvers::m_gp_lucb`]: fixed-confidence LUCB-style querying with a GP posterior.
//! - [`solvers::gp_se`]: fixed-budget successive elimination.
//! - [`solvers::m_g_lucb`] and [`solvers::m_lucb_baseline`]: independent-arm baselines.
//!
//! [`complexity`] evaluates the hardness constants and the sample-complexity and
//! confidence bounds; [`games`] covers discretization of continuous strategy spaces;
//! [`spitfire`] is a missile/flare security game used as a non-GP benchmark; and
//! [`harness`] runs seeded batches of experiments.

// Negated comparisons reject NaN parameters along with out-of-range ones.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod complexity;
pub mod error;
pub mod games;
pub mod gp;
pub mod harness;
pub mod rng;
pub mod solvers;
pub mod spitfire;

pub use error::{Error, Result};
pub use games::{FiniteGame, SimulatorHandle, UtilityTable};
pub use gp::{GpPosterior, KernelKind, KernelSpec, ProfileGrid};
pub use solvers::{QueryRecord, SolverResult};
