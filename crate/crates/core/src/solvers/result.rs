use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One simulator query: round `t` (1-based), profile indices and the observed value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QueryRecord {
    pub t: u64,
    pub x_index: usize,
    pub y_index: usize,
    pub u_tilde: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverResult {
    /// Recommended profile as (first-player index, second-player index).
    pub profile: (usize, usize),
    pub rounds_used: u64,
    /// Whether the stopping rule fired before the round cap.
    pub terminated: bool,
    pub query_log: Vec<QueryRecord>,
    pub wall_time: f64,
}

/// Writes the query log as CSV with columns `t,x_index,y_index,u_tilde`.
pub fn write_query_log_csv<W: Write>(log: &[QueryRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    if log.is_empty() {
        w.write_record(["t", "x_index", "y_index", "u_tilde"])
            .map_err(|e| Error::format("<query log>", e))?;
    }
    for rec in log {
        w.serialize(rec)
            .map_err(|e| Error::format("<query log>", e))?;
    }
    w.flush().map_err(|e| Error::io("<query log>", e))
}

pub fn read_query_log_csv<R: Read>(input: R) -> Result<Vec<QueryRecord>> {
    csv::Reader::from_reader(input)
        .deserialize()
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| Error::format("<query log>", e))
}
