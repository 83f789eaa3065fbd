//! Hardness constants and the sample-complexity and confidence bounds built on them.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::games::{k_epsilon, UtilityTable};
use crate::solvers::{logbar, Exploration};

/// Hardness terms of a finite game.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HardnessProfile {
    pub h_star: f64,
    pub h_one: f64,
    pub h_two: f64,
    /// Δ_(1) ≤ ... ≤ Δ_(P), with the maximin profile's own gap set to the smallest nonzero gap.
    pub gaps: Vec<f64>,
    /// Second-best maximin row x**.
    pub x_second: usize,
    /// (u(x*, y*(x*)) + u(x**, y*(x**))) / 2.
    pub midpoint: f64,
}

impl HardnessProfile {
    pub fn new(u: &UtilityTable) -> Result<Self> {
        let (h_star, x_second, midpoint) = h_star_parts(u)?;
        let gaps = gaps(u)?;
        Ok(Self {
            h_star,
            h_one: sum_inverse_squares(&gaps),
            h_two: max_weighted(&gaps),
            gaps,
            x_second,
            midpoint,
        })
    }
}

fn h_star_parts(u: &UtilityTable) -> Result<(f64, usize, f64)> {
    if u.n() < 2 {
        return Err(Error::param(
            "H* needs at least two first-player strategies",
        ));
    }
    let sec = u.security_values();
    let best = u.maximin().x;
    let second = (0..u.n())
        .filter(|&i| i != best)
        .fold(None::<usize>, |acc, i| match acc {
            Some(a) if sec[a] >= sec[i] => Some(a),
            _ => Some(i),
        })
        .expect("n >= 2");
    if sec[best] == sec[second] {
        return Err(Error::Degenerate(format!(
            "best and second-best maximin values coincide at {}",
            sec[best]
        )));
    }
    let mid = 0.5 * (sec[best] + sec[second]);
    let mut total = 0.0;
    for (i, &s) in sec.iter().enumerate() {
        for j in 0..u.m() {
            let own = (u.get(i, j) - s).powi(2);
            let rel = (mid - s).powi(2);
            total += 1.0 / own.max(rel);
        }
    }
    Ok((total, second, mid))
}

/// H*(u) = Σ_π 1 / max{(u(π) − u(x, y*(x)))², (m − u(x, y*(x)))²}, m the midpoint of the
/// best two security values.
pub fn h_star(u: &UtilityTable) -> Result<f64> {
    Ok(h_star_parts(u)?.0)
}

/// Sorted gaps |u(π*) − u(π)|, the maximin profile's own zero gap replaced by the
/// smallest nonzero gap. Other zero gaps stay zero.
pub fn gaps(u: &UtilityTable) -> Result<Vec<f64>> {
    let star = u.maximin();
    let star_idx = star.x * u.m() + star.y;
    let mut g: Vec<f64> = u.values().iter().map(|v| (v - star.value).abs()).collect();
    let floor = g
        .iter()
        .copied()
        .filter(|&d| d > 0.0)
        .fold(f64::INFINITY, f64::min);
    if !floor.is_finite() {
        return Err(Error::Degenerate("all utilities are equal".into()));
    }
    g[star_idx] = floor;
    g.sort_by(f64::total_cmp);
    Ok(g)
}

fn sum_inverse_squares(gaps: &[f64]) -> f64 {
    gaps.iter().map(|d| 1.0 / (d * d)).sum()
}

fn max_weighted(gaps: &[f64]) -> f64 {
    gaps.iter()
        .enumerate()
        .map(|(i, d)| (i + 1) as f64 / (d * d))
        .fold(0.0, f64::max)
}

/// H₁ = Σ_i Δ_(i)^{-2}. Infinite when a non-maximin profile ties the maximin value.
pub fn h_one(u: &UtilityTable) -> Result<f64> {
    Ok(sum_inverse_squares(&gaps(u)?))
}

/// H₂ = max_i i·Δ_(i)^{-2}. Infinite when a non-maximin profile ties the maximin value.
pub fn h_two(u: &UtilityTable) -> Result<f64> {
    Ok(max_weighted(&gaps(u)?))
}

fn check_common(lambda: f64, n: usize, m: usize, delta: f64) -> Result<()> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::param(format!("lambda must be > 0, got {lambda}")));
    }
    if n < 1 || m < 1 {
        return Err(Error::param("grid dimensions must be positive"));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::param(format!(
            "delta must be in (0, 1), got {delta}"
        )));
    }
    Ok(())
}

/// Closed-form stopping-time bound 64H*λ(log C + 2 log log C), C = 64H*λπ√(nm/6δ).
///
/// Requires 64λπ√(nm/6δ) > 4.85.
pub fn t_delta_bound(h_star: f64, lambda: f64, n: usize, m: usize, delta: f64) -> Result<f64> {
    check_common(lambda, n, m, delta)?;
    if !(h_star > 0.0 && h_star.is_finite()) {
        return Err(Error::param(format!(
            "H* must be positive and finite, got {h_star}"
        )));
    }
    let root = PI * ((n * m) as f64 / (6.0 * delta)).sqrt();
    let guard = 64.0 * lambda * root;
    if guard <= 4.85 {
        return Err(Error::param(format!(
            "requires 64*lambda*pi*sqrt(nm/(6 delta)) > 4.85, got {guard:.6}"
        )));
    }
    let scale = 64.0 * h_star * lambda;
    let c = scale * root;
    if c.ln() <= 0.0 {
        return Err(Error::param(format!(
            "log term must be positive, got C = {c}"
        )));
    }
    Ok(scale * (c.ln() + 2.0 * c.ln().ln()))
}

/// inf{t ∈ ℕ : 8H*·b_t·λ − λnm/σ² < t} for b_t of the form c + 4 log t or constant.
pub fn t_delta_inf(
    h_star: f64,
    lambda: f64,
    n: usize,
    m: usize,
    prior_variance: f64,
    exploration: Exploration,
    delta: f64,
) -> Result<u64> {
    check_common(lambda, n, m, delta)?;
    if !(h_star > 0.0 && h_star.is_finite()) {
        return Err(Error::param(format!(
            "H* must be positive and finite, got {h_star}"
        )));
    }
    if !(prior_variance > 0.0) {
        return Err(Error::param("prior variance must be positive"));
    }
    let offset = lambda * (n * m) as f64 / prior_variance;
    let holds =
        |t: u64| 8.0 * h_star * exploration.value(t, n, m, delta) * lambda - offset < t as f64;
    // t − 8H*λb_t is convex in t, so once it holds at t ≥ 1 it keeps holding.
    if holds(1) {
        return Ok(1);
    }
    let mut hi = 2u64;
    while !holds(hi) {
        hi = hi
            .checked_mul(2)
            .ok_or_else(|| Error::numeric("stopping-time bound overflowed"))?;
    }
    let mut lo = hi / 2;
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if holds(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// δ_T = 2P(n+m−2)·exp(−(T−P)/(8λ·logbar(P)·H₂)). May exceed 1.
pub fn delta_t(budget: u64, n: usize, m: usize, lambda: f64, h_two: f64) -> Result<f64> {
    let p = n * m;
    if n < 2 || m < 2 {
        return Err(Error::param("both players need at least two strategies"));
    }
    if budget <= p as u64 {
        return Err(Error::param(format!("budget {budget} must exceed P = {p}")));
    }
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::param(format!("lambda must be > 0, got {lambda}")));
    }
    if !(h_two > 0.0) {
        return Err(Error::param(format!("H2 must be positive, got {h_two}")));
    }
    let exponent = (budget - p as u64) as f64 / (8.0 * lambda * logbar(p) * h_two);
    Ok(2.0 * p as f64 * (n + m - 2) as f64 * (-exponent).exp())
}

/// Clamps a confidence bound into [0, 1] for reporting.
pub fn clamp_confidence(value: f64) -> f64 {
    value.clamp(0.0, 1.0)
}

/// δ_{T,ε} = 4K²(K−1)·exp(−(T−K²)/(8λ·logbar(K²)·H₂)) + 2a·exp(−b²/(4ε²(K−1)²)),
/// K = K_ε(ε, δ, a, b).
pub fn delta_t_eps(
    budget: u64,
    eps: f64,
    delta: f64,
    a: f64,
    b: f64,
    lambda: f64,
    h_two: f64,
) -> Result<f64> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::param(format!(
            "delta must be in (0, 1), got {delta}"
        )));
    }
    let k = k_epsilon(eps, delta, a, b)?;
    delta_t_eps_at(budget, k, eps, a, b, lambda, h_two)
}

fn delta_t_eps_at(
    budget: u64,
    k: usize,
    eps: f64,
    a: f64,
    b: f64,
    lambda: f64,
    h_two: f64,
) -> Result<f64> {
    let p = (k * k) as u64;
    if budget <= p {
        return Err(Error::param(format!(
            "budget {budget} must exceed K_eps^2 = {p}"
        )));
    }
    let first = delta_t(budget, k, k, lambda, h_two)?;
    let km1 = (k - 1) as f64;
    let second = 2.0 * a * (-(b * b) / (4.0 * eps * eps * km1 * km1)).exp();
    Ok(first + second)
}

/// Minimizer of δ_{T,ε} over δ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeltaOpt {
    pub delta: f64,
    pub value: f64,
    pub k_eps: usize,
}

const GOLDEN_ITERS: usize = 80;

/// Minimizes δ_{T,ε}(δ) over δ ∈ [1e-6, 0.999] by a grid scan (steps of 1e-3 plus
/// log-spaced points below 1e-3) refined with golden-section search.
///
/// `h_two_of_k` supplies H₂ of the K×K discretized game. Ties go to the smallest δ.
pub fn delta_opt<F>(
    budget: u64,
    eps: f64,
    a: f64,
    b: f64,
    lambda: f64,
    h_two_of_k: F,
) -> Result<DeltaOpt>
where
    F: Fn(usize) -> f64,
{
    let eval = |delta: f64| -> Option<(f64, usize)> {
        let k = k_epsilon(eps, delta, a, b).ok()?;
        let v = delta_t_eps_at(budget, k, eps, a, b, lambda, h_two_of_k(k)).ok()?;
        v.is_finite().then_some((v, k))
    };
    let mut grid: Vec<f64> = (0..30)
        .map(|i| 1e-6 * 10f64.powf(i as f64 / 10.0))
        .collect();
    grid.extend((1..1000).map(|i| i as f64 * 1e-3));
    let mut best: Option<(usize, f64, usize)> = None;
    for (pos, &d) in grid.iter().enumerate() {
        if let Some((v, k)) = eval(d) {
            if best.is_none_or(|(_, bv, _)| v < bv) {
                best = Some((pos, v, k));
            }
        }
    }
    let (pos, mut value, mut k_eps) = best.ok_or_else(|| {
        Error::Infeasible(format!(
            "budget {budget} is too small for every delta (K_eps^2 >= T)"
        ))
    })?;
    let mut delta = grid[pos];
    let lo = if pos > 0 { grid[pos - 1] } else { grid[pos] };
    let hi = grid.get(pos + 1).copied().unwrap_or(grid[pos]);
    let f = |d: f64| eval(d).map_or(f64::INFINITY, |(v, _)| v);
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut l, mut r) = (lo, hi);
    let mut c = r - inv_phi * (r - l);
    let mut d = l + inv_phi * (r - l);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..GOLDEN_ITERS {
        if fc <= fd {
            r = d;
            d = c;
            fd = fc;
            c = r - inv_phi * (r - l);
            fc = f(c);
        } else {
            l = c;
            c = d;
            fc = fd;
            d = l + inv_phi * (r - l);
            fd = f(d);
        }
    }
    for cand in [c, d] {
        if let Some((v, k)) = eval(cand) {
            if v < value {
                value = v;
                delta = cand;
                k_eps = k;
            }
        }
    }
    Ok(DeltaOpt {
        delta,
        value,
        k_eps,
    })
}
