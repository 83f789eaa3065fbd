use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gp::ProfileGrid;

/// Row-major n×m table of utilities for the first (maximizing) player.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct UtilityTable {
    n: usize,
    m: usize,
    values: Vec<f64>,
}

impl TryFrom<Vec<Vec<f64>>> for UtilityTable {
    type Error = Error;
    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        UtilityTable::from_rows(rows)
    }
}

impl From<UtilityTable> for Vec<Vec<f64>> {
    fn from(t: UtilityTable) -> Self {
        t.rows().map(<[f64]>::to_vec).collect()
    }
}

impl UtilityTable {
    pub fn new(n: usize, m: usize, values: Vec<f64>) -> Result<Self> {
        if n == 0 || m == 0 {
            return Err(Error::param("utility table must be non-empty"));
        }
        if values.len() != n * m {
            return Err(Error::param(format!(
                "expected {} utilities for a {n}x{m} table, got {}",
                n * m,
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::param("utilities must be finite"));
        }
        Ok(Self { n, m, values })
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        let m = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != m) {
            return Err(Error::param("ragged utility table"));
        }
        Self::new(n, m, rows.into_iter().flatten().collect())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.m + j]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.m..(i + 1) * self.m]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks(self.m)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn range(&self) -> f64 {
        self.max() - self.min()
    }

    /// Index of the row minimum, lowest index on ties.
    pub fn best_response(&self, i: usize) -> usize {
        argmin(self.row(i))
    }

    /// u(x, y*(x)) for every row.
    pub fn security_values(&self) -> Vec<f64> {
        (0..self.n)
            .map(|i| self.get(i, self.best_response(i)))
            .collect()
    }

    pub fn maximin(&self) -> Maximin {
        let sec = self.security_values();
        let x = argmax(&sec);
        let y = self.best_response(x);
        Maximin {
            x,
            y,
            value: sec[x],
        }
    }

    /// Gap between the best and the second-best security value, `None` for a single row.
    pub fn maximin_separation(&self) -> Option<f64> {
        if self.n < 2 {
            return None;
        }
        let sec = self.security_values();
        let best = argmax(&sec);
        let second = sec
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != best)
            .map(|(_, &v)| v)
            .fold(f64::NEG_INFINITY, f64::max);
        Some(sec[best] - second)
    }

    pub fn scaled(&self, alpha: f64, shift: f64) -> Self {
        Self {
            values: self.values.iter().map(|v| alpha * v + shift).collect(),
            ..self.clone()
        }
    }
}

pub(crate) fn argmin(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in v.iter().enumerate().skip(1) {
        if x < v[best] {
            best = i;
        }
    }
    best
}

pub(crate) fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in v.iter().enumerate().skip(1) {
        if x > v[best] {
            best = i;
        }
    }
    best
}

/// Maximin profile `(x, y)` as grid indices together with its value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Maximin {
    pub x: usize,
    pub y: usize,
    pub value: f64,
}

/// Two-player zero-sum game over a finite grid of strategies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawGame", into = "RawGame")]
pub struct FiniteGame {
    grid: ProfileGrid,
    u: UtilityTable,
}

#[derive(Serialize, Deserialize)]
struct RawGame {
    xs: Vec<f64>,
    ys: Vec<f64>,
    u: UtilityTable,
}

impl TryFrom<RawGame> for FiniteGame {
    type Error = Error;
    fn try_from(raw: RawGame) -> Result<Self> {
        FiniteGame::new(ProfileGrid::new(raw.xs, raw.ys)?, raw.u)
    }
}

impl From<FiniteGame> for RawGame {
    fn from(g: FiniteGame) -> Self {
        RawGame {
            xs: g.grid.xs().to_vec(),
            ys: g.grid.ys().to_vec(),
            u: g.u,
        }
    }
}

impl FiniteGame {
    pub fn new(grid: ProfileGrid, u: UtilityTable) -> Result<Self> {
        if grid.n() != u.n() || grid.m() != u.m() {
            return Err(Error::param(format!(
                "grid is {}x{} but table is {}x{}",
                grid.n(),
                grid.m(),
                u.n(),
                u.m()
            )));
        }
        Ok(Self { grid, u })
    }

    /// Table on an equally spaced grid with one point per row/column.
    pub fn from_table(u: UtilityTable) -> Result<Self> {
        let axis = |k: usize| -> Vec<f64> {
            if k == 1 {
                vec![0.5]
            } else {
                (0..k).map(|i| i as f64 / (k - 1) as f64).collect()
            }
        };
        Self::new(ProfileGrid::new(axis(u.n()), axis(u.m()))?, u)
    }

    pub fn grid(&self) -> &ProfileGrid {
        &self.grid
    }

    pub fn utilities(&self) -> &UtilityTable {
        &self.u
    }

    pub fn utility(&self, i: usize, j: usize) -> f64 {
        self.u.get(i, j)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("game serialization is infallible")
    }

    pub fn from_json(text: &str) -> std::result::Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text).map_err(|e| Error::format(path, e))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json() + "\n").map_err(|e| Error::io(path, e))
    }
}

/// Exact maximin by enumeration; ties go to the lowest index.
pub fn brute_force_maximin(game: &FiniteGame) -> Maximin {
    game.u.maximin()
}

/// Second player's best response (row argmin) to first-player strategy `x`.
pub fn best_response(game: &FiniteGame, x: usize) -> usize {
    game.u.best_response(x)
}
