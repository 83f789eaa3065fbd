use super::table::{FiniteGame, UtilityTable};
use crate::error::{Error, Result};
use crate::gp::ProfileGrid;

/// `k` equally spaced strategies per player over [0,1].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DiscretizationSpec {
    k: usize,
}

impl DiscretizationSpec {
    pub fn new(k: usize) -> Result<Self> {
        if k < 2 {
            return Err(Error::param(format!(
                "discretization needs K >= 2, got {k}"
            )));
        }
        Ok(Self { k })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn spacing(&self) -> f64 {
        1.0 / (self.k - 1) as f64
    }

    pub fn point(&self, i: usize) -> f64 {
        i as f64 / (self.k - 1) as f64
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.k).map(|i| self.point(i)).collect()
    }

    /// Index of the grid point closest to `x` (clamped into [0,1]).
    pub fn nearest(&self, x: f64) -> usize {
        let s = x.clamp(0.0, 1.0) * (self.k - 1) as f64;
        (s.round() as usize).min(self.k - 1)
    }

    /// Covering radius of the grid, 1 / (2(K − 1)).
    pub fn covering_radius(&self) -> f64 {
        0.5 * self.spacing()
    }

    pub fn grid(&self) -> ProfileGrid {
        ProfileGrid::equally_spaced(self.k).expect("K >= 2 checked at construction")
    }
}

/// log(4a/δ), validating δ ∈ (0, 2), a > 0, b > 0 and a positive logarithm.
pub fn smoothness_log_term(delta: f64, a: f64, b: f64) -> Result<f64> {
    if !(delta > 0.0 && delta < 2.0) {
        return Err(Error::param(format!(
            "delta must lie in (0, 2), got {delta}"
        )));
    }
    if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
        return Err(Error::param(format!(
            "smoothness constants must be positive, got a={a}, b={b}"
        )));
    }
    let l = (4.0 * a / delta).ln();
    if l <= 0.0 {
        return Err(Error::param(format!(
            "log(4a/delta) must be positive, got a={a}, delta={delta}"
        )));
    }
    Ok(l)
}

/// Grid size K_ε = ⌈(b / 2ε)·√log(4a/δ)⌉ + 1 that makes the discretization error at
/// most ε with probability 1 − δ/2 under the smoothness constants (a, b).
pub fn k_epsilon(eps: f64, delta: f64, a: f64, b: f64) -> Result<usize> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::param(format!("epsilon must be positive, got {eps}")));
    }
    let l = smoothness_log_term(delta, a, b)?;
    let raw = (b / (2.0 * eps)) * l.sqrt();
    if raw > 1e9 {
        return Err(Error::param(format!("K_eps = {raw:.3e} is too large")));
    }
    Ok(raw.ceil().max(1.0) as usize + 1)
}

/// Samples `f` on a K×K equally spaced grid.
pub fn discretize<F>(mut f: F, k: usize) -> Result<FiniteGame>
where
    F: FnMut(f64, f64) -> Result<f64>,
{
    let spec = DiscretizationSpec::new(k)?;
    let pts = spec.points();
    let mut values = Vec::with_capacity(k * k);
    for &x in &pts {
        for &y in &pts {
            values.push(f(x, y)?);
        }
    }
    FiniteGame::new(spec.grid(), UtilityTable::new(k, k, values)?)
}

/// max over x ∈ [0,1] of the distance to the nearest point of `points`.
pub fn covering_radius(points: &[f64]) -> Result<f64> {
    if points.is_empty() {
        return Err(Error::param("strategy set must be non-empty"));
    }
    if points.iter().any(|p| !(0.0..=1.0).contains(p)) {
        return Err(Error::param("strategies must lie in [0, 1]"));
    }
    let mut s = points.to_vec();
    s.sort_by(f64::total_cmp);
    let mut radius = s[0].max(1.0 - s[s.len() - 1]);
    for w in s.windows(2) {
        radius = radius.max(0.5 * (w[1] - w[0]));
    }
    Ok(radius)
}

/// Covering radii (d_x^max, d_y^max) of two strategy sets over [0,1].
pub fn covering_distances(xs: &[f64], ys: &[f64]) -> Result<(f64, f64)> {
    Ok((covering_radius(xs)?, covering_radius(ys)?))
}

/// Error radius b·√log(4a/δ)·max(d_x^max, d_y^max) for an arbitrary discretization.
pub fn arbitrary_discretization_bound(
    delta: f64,
    a: f64,
    b: f64,
    dx_max: f64,
    dy_max: f64,
) -> Result<f64> {
    let l = smoothness_log_term(delta, a, b)?;
    Ok(b * l.sqrt() * dx_max.max(dy_max))
}

/// ε̂ of a returned first-player strategy against a fine reference game:
/// |u(π*_ref) − u(x̄, y*_ref(x̄))| with x̄ snapped to the nearest reference row.
pub fn eps_hat(returned_x: f64, reference: &FiniteGame) -> f64 {
    let xs = reference.grid().xs();
    let row = xs
        .iter()
        .enumerate()
        .min_by(|a, b| {
            (a.1 - returned_x)
                .abs()
                .total_cmp(&(b.1 - returned_x).abs())
        })
        .map(|(i, _)| i)
        .expect("grids are non-empty");
    let table = reference.utilities();
    let best = table.maximin().value;
    let y = table.best_response(row);
    (best - table.get(row, y)).abs()
}
