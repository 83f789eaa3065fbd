//! Finite games, the noisy simulator contract, and discretization of [0,1]².

mod discretize;
mod simulator;
mod table;

pub use discretize::{
    arbitrary_discretization_bound, covering_distances, covering_radius, discretize, eps_hat,
    k_epsilon, smoothness_log_term, DiscretizationSpec,
};
pub use simulator::{Evaluator, SimulatorHandle, TableEvaluator};
pub use table::{best_response, brute_force_maximin, FiniteGame, Maximin, UtilityTable};
