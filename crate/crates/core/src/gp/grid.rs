use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A strategy profile (x, y) in [0,1]².
pub type Profile = (f64, f64);

/// Product grid of first-player strategies `xs` and second-player strategies `ys`.
///
/// Flat profile index of `(i, j)` is `i * m + j` (row-major, rows are first-player
/// strategies).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawGrid", into = "RawGrid")]
pub struct ProfileGrid {
    xs: Vec<f64>,
    ys: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawGrid {
    xs: Vec<f64>,
    ys: Vec<f64>,
}

impl TryFrom<RawGrid> for ProfileGrid {
    type Error = Error;
    fn try_from(raw: RawGrid) -> Result<Self> {
        ProfileGrid::new(raw.xs, raw.ys)
    }
}

impl From<ProfileGrid> for RawGrid {
    fn from(g: ProfileGrid) -> Self {
        RawGrid { xs: g.xs, ys: g.ys }
    }
}

fn check_axis(name: &str, v: &[f64]) -> Result<()> {
    if v.is_empty() {
        return Err(Error::param(format!("{name} must not be empty")));
    }
    if v.iter().any(|x| !x.is_finite() || !(0.0..=1.0).contains(x)) {
        return Err(Error::param(format!("{name} must lie in [0, 1]")));
    }
    if v.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::param(format!(
            "{name} must be strictly increasing (duplicate or unsorted strategies)"
        )));
    }
    Ok(())
}

impl ProfileGrid {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        check_axis("xs", &xs)?;
        check_axis("ys", &ys)?;
        Ok(Self { xs, ys })
    }

    /// `k` equally spaced points per axis, endpoints included.
    pub fn equally_spaced(k: usize) -> Result<Self> {
        let axis = equally_spaced_axis(k)?;
        Self::new(axis.clone(), axis)
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn ys(&self) -> &[f64] {
        &self.ys
    }

    pub fn n(&self) -> usize {
        self.xs.len()
    }

    pub fn m(&self) -> usize {
        self.ys.len()
    }

    pub fn len(&self) -> usize {
        self.n() * self.m()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < self.n() && j < self.m());
        i * self.m() + j
    }

    pub fn coords(&self, idx: usize) -> (usize, usize) {
        (idx / self.m(), idx % self.m())
    }

    pub fn profile(&self, idx: usize) -> Profile {
        let (i, j) = self.coords(idx);
        (self.xs[i], self.ys[j])
    }

    pub fn profiles(&self) -> impl Iterator<Item = Profile> + '_ {
        (0..self.len()).map(move |idx| self.profile(idx))
    }
}

pub fn equally_spaced_axis(k: usize) -> Result<Vec<f64>> {
    if k < 2 {
        return Err(Error::param(format!(
            "need at least 2 grid points, got {k}"
        )));
    }
    let step = (k - 1) as f64;
    Ok((0..k).map(|i| i as f64 / step).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_duplicates_and_out_of_range() {
        assert!(ProfileGrid::new(vec![0.0, 0.0], vec![0.0, 1.0]).is_err());
        assert!(ProfileGrid::new(vec![0.5, 0.2], vec![0.0, 1.0]).is_err());
        assert!(ProfileGrid::new(vec![0.0, 1.2], vec![0.0, 1.0]).is_err());
        assert!(ProfileGrid::new(vec![], vec![0.0, 1.0]).is_err());
    }

    #[test]
    fn index_round_trips() {
        let g = ProfileGrid::new(vec![0.0, 0.5, 1.0], vec![0.1, 0.9]).unwrap();
        for idx in 0..g.len() {
            let (i, j) = g.coords(idx);
            assert_eq!(g.index(i, j), idx);
        }
        assert_eq!(g.profile(3), (0.5, 0.9));
    }

    #[test]
    fn equally_spaced_includes_endpoints() {
        let g = ProfileGrid::equally_spaced(5).unwrap();
        assert_eq!(g.xs(), &[0.0, 0.25, 0.5, 0.75, 1.0]);
        assert!(ProfileGrid::equally_spaced(1).is_err());
    }
}
