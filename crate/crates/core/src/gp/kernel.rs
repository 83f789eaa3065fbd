use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use super::bessel::bessel_k;
use super::grid::{Profile, ProfileGrid};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum KernelKind {
    SquaredExponential,
    Matern { nu: f64 },
}

/// Stationary covariance function over [0,1]² with Euclidean distance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawKernel", into = "RawKernel")]
pub struct KernelSpec {
    kind: KernelKind,
    length_scale: f64,
    prior_variance: f64,
}

#[derive(Serialize, Deserialize)]
struct RawKernel {
    #[serde(flatten)]
    kind: KernelKind,
    length_scale: f64,
    #[serde(default = "one")]
    prior_variance: f64,
}

fn one() -> f64 {
    1.0
}

impl TryFrom<RawKernel> for KernelSpec {
    type Error = Error;
    fn try_from(raw: RawKernel) -> Result<Self> {
        KernelSpec::new(raw.kind, raw.length_scale)?.with_prior_variance(raw.prior_variance)
    }
}

impl From<KernelSpec> for RawKernel {
    fn from(k: KernelSpec) -> Self {
        RawKernel {
            kind: k.kind,
            length_scale: k.length_scale,
            prior_variance: k.prior_variance,
        }
    }
}

impl KernelSpec {
    pub fn new(kind: KernelKind, length_scale: f64) -> Result<Self> {
        if !(length_scale > 0.0 && length_scale.is_finite()) {
            return Err(Error::param(format!(
                "length scale must be positive, got {length_scale}"
            )));
        }
        if let KernelKind::Matern { nu } = kind {
            if !(nu > 0.0 && nu.is_finite()) {
                return Err(Error::param(format!(
                    "Matern smoothness must be positive, got {nu}"
                )));
            }
        }
        Ok(Self {
            kind,
            length_scale,
            prior_variance: 1.0,
        })
    }

    pub fn squared_exponential(length_scale: f64) -> Result<Self> {
        Self::new(KernelKind::SquaredExponential, length_scale)
    }

    pub fn matern(nu: f64, length_scale: f64) -> Result<Self> {
        Self::new(KernelKind::Matern { nu }, length_scale)
    }

    /// Sets k(π, π). Must lie in (0, 1].
    pub fn with_prior_variance(mut self, variance: f64) -> Result<Self> {
        if !(variance > 0.0 && variance <= 1.0) {
            return Err(Error::param(format!(
                "prior variance must lie in (0, 1], got {variance}"
            )));
        }
        self.prior_variance = variance;
        Ok(self)
    }

    pub fn kind(&self) -> KernelKind {
        self.kind
    }

    pub fn length_scale(&self) -> f64 {
        self.length_scale
    }

    pub fn prior_variance(&self) -> f64 {
        self.prior_variance
    }

    /// Covariance as a function of Euclidean distance.
    pub fn at_distance(&self, dist: f64) -> f64 {
        let l = self.length_scale;
        let shape = match self.kind {
            KernelKind::SquaredExponential => (-0.5 * (dist / l).powi(2)).exp(),
            KernelKind::Matern { nu } => matern_shape(nu, dist / l),
        };
        self.prior_variance * shape
    }

    pub fn eval(&self, a: Profile, b: Profile) -> f64 {
        let dx = a.0 - b.0;
        let dy = a.1 - b.1;
        self.at_distance((dx * dx + dy * dy).sqrt())
    }

    /// One-dimensional factor of a separable kernel, if this kernel is separable
    /// across the two coordinates (only the squared exponential is).
    pub(crate) fn axis_factor(&self, a: f64, b: f64) -> Option<f64> {
        match self.kind {
            KernelKind::SquaredExponential => {
                Some((-0.5 * ((a - b) / self.length_scale).powi(2)).exp())
            }
            KernelKind::Matern { .. } => None,
        }
    }
}

/// Unit-variance Matérn correlation at scaled distance `d = ‖π−π'‖ / l`.
fn matern_shape(nu: f64, d: f64) -> f64 {
    if d == 0.0 {
        return 1.0;
    }
    if nu == 0.5 {
        return (-d).exp();
    }
    if nu == 1.5 {
        let s = 3f64.sqrt() * d;
        return (1.0 + s) * (-s).exp();
    }
    if nu == 2.5 {
        let s = 5f64.sqrt() * d;
        return (1.0 + s + s * s / 3.0) * (-s).exp();
    }
    matern_bessel(nu, d)
}

/// Matérn correlation from its definition 2^{1−ν}/Γ(ν) · r^ν · K_ν(r), r = √(2ν)·d.
pub(crate) fn matern_bessel(nu: f64, d: f64) -> f64 {
    if d == 0.0 {
        return 1.0;
    }
    let r = (2.0 * nu).sqrt() * d;
    let k = bessel_k(nu, r);
    if k == 0.0 {
        return 0.0;
    }
    let log_val = (1.0 - nu) * std::f64::consts::LN_2 - ln_gamma(nu) + nu * r.ln() + k.ln();
    log_val.exp().min(1.0)
}

/// Evaluates the kernel between two profiles in [0,1]².
pub fn kernel_eval(spec: &KernelSpec, a: Profile, b: Profile) -> Result<f64> {
    let inside = |p: Profile| (0.0..=1.0).contains(&p.0) && (0.0..=1.0).contains(&p.1);
    if !inside(a) || !inside(b) {
        return Err(Error::param("profiles must lie in [0,1]²"));
    }
    Ok(spec.eval(a, b))
}

/// Prior covariance matrix over all grid profiles, in flat index order.
pub fn kernel_matrix(grid: &ProfileGrid, spec: &KernelSpec) -> DMatrix<f64> {
    let p = grid.len();
    let pts: Vec<Profile> = grid.profiles().collect();
    DMatrix::from_fn(p, p, |a, b| spec.eval(pts[a], pts[b]))
}
