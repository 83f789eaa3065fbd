//! Hit-the-Spitfire: a missile/flare security game with stochastic deflection.
//!
//! The first player (defender) picks the launch angle θ ∈ [0, 1] rad, the second
//! player (airplane) picks the flare release point s_d ∈ [0, 1] as a fraction of
//! s_max. The defender's utility is the damage dealt to the airplane.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::games::{Evaluator, SimulatorHandle, UtilityTable};
use crate::gp::ProfileGrid;
use crate::rng::SimRng;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpitfireParams {
    /// Detection distance h⊥ (m).
    pub h_perp: f64,
    /// Flare standoff h_f (m).
    pub h_f: f64,
    /// Missile speed v_a (m/s).
    pub v_a: f64,
    /// Airplane speed v_d (m/s).
    pub v_d: f64,
    /// Airplane length ℓ (m).
    pub ell: f64,
}

impl Default for SpitfireParams {
    fn default() -> Self {
        Self {
            h_perp: 100.0,
            h_f: 10.0,
            v_a: 500.0,
            v_d: 120.0,
            ell: 15.0,
        }
    }
}

/// Which branch of the interaction a draw took.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    FlareDeflected,
    FlareHitAnyway,
    DirectHit,
    Miss,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpitfireOutcome {
    pub branch: Branch,
    pub damage: f64,
    /// Offset of the impact from the airplane centre (m).
    pub hit_point: Option<f64>,
}

/// Deterministic part of one interaction.
enum Geometry {
    /// Missile meets the flare; it still hits with probability `p_hit`.
    Flare {
        p_hit: f64,
    },
    Direct {
        offset: f64,
    },
    Miss,
}

impl SpitfireParams {
    pub fn new(h_perp: f64, h_f: f64, v_a: f64, v_d: f64, ell: f64) -> Result<Self> {
        let p = Self {
            h_perp,
            h_f,
            v_a,
            v_d,
            ell,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let all_finite = [self.h_perp, self.h_f, self.v_a, self.v_d, self.ell]
            .iter()
            .all(|v| v.is_finite());
        if !all_finite || !(self.v_a > self.v_d && self.v_d > 0.0) {
            return Err(Error::param(format!(
                "speeds must satisfy v_a > v_d > 0, got v_a={}, v_d={}",
                self.v_a, self.v_d
            )));
        }
        if !(self.h_perp > self.h_f && self.h_f > 0.0) {
            return Err(Error::param(format!(
                "distances must satisfy h_perp > h_f > 0, got h_perp={}, h_f={}",
                self.h_perp, self.h_f
            )));
        }
        if !(self.ell > 0.0) {
            return Err(Error::param(format!(
                "airplane length must be > 0, got {}",
                self.ell
            )));
        }
        Ok(())
    }

    /// s_max = v_d·h⊥ / (v_a·cos 1).
    pub fn s_max(&self) -> f64 {
        self.v_d * self.h_perp / (self.v_a * 1f64.cos())
    }

    /// d(x) = 1 − 4x²/ℓ² for an impact at offset |x| ≤ ℓ/2 from the centre.
    pub fn damage(&self, x: f64) -> Result<f64> {
        let half = 0.5 * self.ell;
        if !(x.abs() <= half * (1.0 + 1e-12)) {
            return Err(Error::param(format!(
                "impact offset {x} outside the airplane (|x| <= {half})"
            )));
        }
        Ok((1.0 - 4.0 * x * x / (self.ell * self.ell)).clamp(0.0, 1.0))
    }

    /// Unclamped hit-anyway probability 1 − |s_d·s_max − x_d|/s_max after meeting the flare.
    pub fn raw_hit_probability(&self, theta: f64, s_d: f64) -> f64 {
        let s_max = self.s_max();
        let x_d = self.v_d * (self.h_perp - self.h_f) / (self.v_a * theta.cos());
        1.0 - (s_d * s_max - x_d).abs() / s_max
    }

    fn geometry(&self, theta: f64, s_d: f64) -> Geometry {
        let theta = theta.clamp(0.0, 1.0);
        let s_d = s_d.clamp(0.0, 1.0);
        let flare = s_d * self.s_max();
        let at_flare = (self.h_perp - self.h_f) * theta.tan();
        let quarter = 0.25 * self.ell;
        if flare - quarter <= at_flare && at_flare <= flare + quarter {
            return Geometry::Flare {
                p_hit: self.raw_hit_probability(theta, s_d).clamp(0.0, 1.0),
            };
        }
        let plane = self.v_d * self.h_perp / (self.v_a * theta.cos());
        let missile = self.h_perp * theta.tan();
        let half = 0.5 * self.ell;
        if plane - half <= missile && missile <= plane + half {
            Geometry::Direct {
                offset: (plane - missile).abs(),
            }
        } else {
            Geometry::Miss
        }
    }

    /// One interaction. Inputs are clamped to [0, 1]; draws Bernoulli then uniform.
    pub fn simulate(&self, theta: f64, s_d: f64, rng: &mut SimRng) -> SpitfireOutcome {
        match self.geometry(theta, s_d) {
            Geometry::Flare { p_hit } => {
                if rng.random::<f64>() < p_hit {
                    let half = 0.5 * self.ell;
                    let x = rng.random_range(-half..=half);
                    SpitfireOutcome {
                        branch: Branch::FlareHitAnyway,
                        damage: self.damage(x).expect("impact on the airplane"),
                        hit_point: Some(x),
                    }
                } else {
                    SpitfireOutcome {
                        branch: Branch::FlareDeflected,
                        damage: 0.0,
                        hit_point: None,
                    }
                }
            }
            Geometry::Direct { offset } => SpitfireOutcome {
                branch: Branch::DirectHit,
                damage: self
                    .damage(offset)
                    .expect("gate keeps the offset on the airplane"),
                hit_point: Some(offset),
            },
            Geometry::Miss => SpitfireOutcome {
                branch: Branch::Miss,
                damage: 0.0,
                hit_point: None,
            },
        }
    }

    /// E[damage]: p_hit·2/3 on the flare branch, the deterministic damage otherwise.
    pub fn expected_damage(&self, theta: f64, s_d: f64) -> f64 {
        match self.geometry(theta, s_d) {
            Geometry::Flare { p_hit } => p_hit * 2.0 / 3.0,
            Geometry::Direct { offset } => self.damage(offset).expect("gated offset"),
            Geometry::Miss => 0.0,
        }
    }

    /// Expected-damage table on a (θ, s_d) grid, multiplied by `role_sign`.
    pub fn expected_table(&self, grid: &ProfileGrid, role_sign: f64) -> Result<UtilityTable> {
        let values = grid
            .profiles()
            .map(|(x, y)| role_sign * self.expected_damage(x, y))
            .collect();
        UtilityTable::new(grid.n(), grid.m(), values)
    }

    /// Simulator over `grid` (rows θ, columns s_d) reporting `role_sign`·damage per query.
    pub fn as_simulator(
        &self,
        grid: &ProfileGrid,
        role_sign: f64,
        seed: u64,
    ) -> Result<SimulatorHandle> {
        self.validate()?;
        if role_sign != 1.0 && role_sign != -1.0 {
            return Err(Error::param(format!(
                "role sign must be +1 or -1, got {role_sign}"
            )));
        }
        let eval = SpitfireEvaluator {
            params: *self,
            thetas: grid.xs().to_vec(),
            s_ds: grid.ys().to_vec(),
            sign: role_sign,
        };
        SimulatorHandle::new(Box::new(eval), 0.0, seed)
    }
}

struct SpitfireEvaluator {
    params: SpitfireParams,
    thetas: Vec<f64>,
    s_ds: Vec<f64>,
    sign: f64,
}

impl Evaluator for SpitfireEvaluator {
    fn shape(&self) -> (usize, usize) {
        (self.thetas.len(), self.s_ds.len())
    }

    fn sample(&mut self, i: usize, j: usize, rng: &mut SimRng) -> f64 {
        self.sign
            * self
                .params
                .simulate(self.thetas[i], self.s_ds[j], rng)
                .damage
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;
    use approx::assert_abs_diff_eq;

    fn defaults() -> SpitfireParams {
        SpitfireParams::default()
    }

    #[test]
    fn s_max_values() {
        assert_abs_diff_eq!(defaults().s_max(), 44.420, epsilon = 1e-3);
        let fast = SpitfireParams {
            v_d: 240.0,
            ..defaults()
        };
        assert_abs_diff_eq!(fast.s_max(), 2.0 * defaults().s_max(), epsilon = 1e-12);
        let still = SpitfireParams {
            v_d: 0.0,
            ..defaults()
        };
        assert_eq!(still.s_max(), 0.0);
        assert!(still.validate().is_err());
        assert!(SpitfireParams::new(100.0, 10.0, 100.0, 120.0, 15.0).is_err());
        assert!(SpitfireParams::new(10.0, 10.0, 500.0, 120.0, 15.0).is_err());
    }

    #[test]
    fn damage_profile() {
        let p = defaults();
        assert_eq!(p.damage(0.0).unwrap(), 1.0);
        assert_eq!(p.damage(7.5).unwrap(), 0.0);
        assert_eq!(p.damage(-7.5).unwrap(), 0.0);
        assert_abs_diff_eq!(p.damage(3.75).unwrap(), 0.75, epsilon = 1e-15);
        assert!(matches!(p.damage(7.6), Err(Error::Parameter(_))));
    }

    #[test]
    fn flare_branch_example() {
        let p = defaults();
        assert_abs_diff_eq!(0.5 * p.s_max(), 22.21, epsilon = 1e-2);
        assert_abs_diff_eq!(90.0 * 0.25f64.tan(), 22.98, epsilon = 1e-2);
        let mean = p.raw_hit_probability(0.25, 0.5);
        assert_abs_diff_eq!(mean, 0.9981, epsilon = 1e-4);
        assert_abs_diff_eq!(
            p.expected_damage(0.25, 0.5),
            mean * 2.0 / 3.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(p.expected_damage(0.25, 0.5), 0.6654, epsilon = 1e-4);
        let mut rng = rng_from_seed(1);
        for _ in 0..100 {
            let o = p.simulate(0.25, 0.5, &mut rng);
            assert!(matches!(
                o.branch,
                Branch::FlareHitAnyway | Branch::FlareDeflected
            ));
        }
    }

    #[test]
    fn direct_and_miss_examples() {
        let p = defaults();
        let mut rng = rng_from_seed(2);
        let o = p.simulate(0.2424, 0.0, &mut rng);
        assert_eq!(o.branch, Branch::DirectHit);
        assert!(o.hit_point.unwrap() < 0.01);
        assert_abs_diff_eq!(o.damage, 1.0, epsilon = 1e-5);
        let o = p.simulate(1.0, 0.0, &mut rng);
        assert_eq!(o.branch, Branch::Miss);
        assert_eq!(o.damage, 0.0);
        assert_eq!(p.expected_damage(1.0, 0.0), 0.0);
    }

    #[test]
    fn deterministic_branches_repeat() {
        let p = defaults();
        let grid = ProfileGrid::new(vec![0.2424, 1.0], vec![0.0, 1.0]).unwrap();
        let mut sim = p.as_simulator(&grid, 1.0, 5).unwrap();
        let first = (sim.query(0, 0), sim.query(1, 0));
        for _ in 0..50 {
            assert_eq!((sim.query(0, 0), sim.query(1, 0)), first);
        }
        let mut neg = p.as_simulator(&grid, -1.0, 5).unwrap();
        assert_eq!(neg.query(0, 0), -first.0);
        assert!(p.as_simulator(&grid, 0.5, 5).is_err());
    }

    #[test]
    fn hit_probability_stays_in_unit_interval() {
        let p = defaults();
        for a in 0..200 {
            for b in 0..200 {
                let theta = a as f64 / 199.0;
                let s_d = b as f64 / 199.0;
                let theta_gate = (p.h_perp - p.h_f) * theta.tan();
                let s = s_d * p.s_max();
                if (theta_gate - s).abs() <= 0.25 * p.ell {
                    let raw = p.raw_hit_probability(theta, s_d);
                    assert!((-1e-9..=1.0 + 1e-9).contains(&raw), "{theta} {s_d} {raw}");
                }
                let d = p.expected_damage(theta, s_d);
                assert!((0.0..=1.0).contains(&d));
            }
        }
    }

    #[test]
    fn flare_gate_boundaries() {
        let p = defaults();
        let theta: f64 = 0.25;
        let at_flare = 90.0 * theta.tan();
        let edge = (at_flare + 0.25 * p.ell) / p.s_max();
        let mut rng = rng_from_seed(3);
        let inside = p.simulate(theta, edge - 1e-9, &mut rng).branch;
        assert!(matches!(
            inside,
            Branch::FlareHitAnyway | Branch::FlareDeflected
        ));
        let outside = p.simulate(theta, edge + 1e-6, &mut rng).branch;
        assert!(matches!(outside, Branch::DirectHit | Branch::Miss));
    }

    #[test]
    fn monte_carlo_matches_oracle() {
        let p = defaults();
        let grid = ProfileGrid::new(vec![0.22, 0.2424, 0.25], vec![0.0, 0.45, 0.5]).unwrap();
        let mut sim = p.as_simulator(&grid, 1.0, 11).unwrap();
        for (i, j) in [(0, 1), (2, 2), (2, 1), (1, 0)] {
            let n = 100_000;
            let mean = (0..n).map(|_| sim.query(i, j)).sum::<f64>() / n as f64;
            let expected = p.expected_damage(grid.xs()[i], grid.ys()[j]);
            assert!(
                (mean - expected).abs() < 0.005,
                "{i} {j}: {mean} vs {expected}"
            );
        }
    }
}
