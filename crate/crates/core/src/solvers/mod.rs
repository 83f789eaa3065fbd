//! Dynamic querying algorithms: each round picks a profile, queries the simulator,
//! and updates its belief until a stopping rule or budget ends the run.

mod belief;
mod lucb;
mod result;
mod se;

pub use belief::{
    Belief, ConfidenceState, EmpiricalBelief, Exploration, GpBelief, IndependentBelief,
    PosteriorForm,
};
pub use lucb::{
    m_g_lucb, m_gp_lucb, m_lucb_baseline, run_lucb, select, GpModel, LucbConfig, Selection,
};
pub use result::{read_query_log_csv, write_query_log_csv, QueryRecord, SolverResult};
pub use se::{gp_se, logbar, phase_lengths, PhaseSchedule, SeBelief};

use crate::error::{Error, Result};
use crate::games::SimulatorHandle;
use crate::gp::ProfileGrid;

pub(crate) fn check_shapes(sim: &SimulatorHandle, grid: &ProfileGrid) -> Result<()> {
    let (n, m) = sim.shape();
    if (n, m) != (grid.n(), grid.m()) {
        return Err(Error::param(format!(
            "simulator is {n}x{m} but grid is {}x{}",
            grid.n(),
            grid.m()
        )));
    }
    if n < 2 || m < 2 {
        return Err(Error::param(format!(
            "both players need at least two strategies, got {n}x{m}"
        )));
    }
    Ok(())
}
