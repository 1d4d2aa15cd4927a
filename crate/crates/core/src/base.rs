//! Non-atomic base probability measures `H`.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::{Rng, RngExt};
use rand_distr::Open01;
use serde::{Deserialize, Serialize};
use statrs::distribution::{Continuous, ContinuousCDF, Normal};

use crate::error::{Error, Result};

/// A continuous distribution given through its quantile function.
pub trait InverseCdf: fmt::Debug + Send + Sync {
    /// `H⁻¹(u)` for `u ∈ (0, 1)`; must be nondecreasing.
    fn quantile(&self, u: f64) -> f64;
    fn cdf(&self, x: f64) -> f64;
    /// Density `h(x)`, when known.
    fn density(&self, x: f64) -> Option<f64>;
    /// Spec string used in configs and metadata.
    fn spec(&self) -> String;
}

#[derive(Debug, Clone)]
pub struct NormalBase {
    mean: f64,
    sd: f64,
    dist: Normal,
}

impl NormalBase {
    pub fn new(mean: f64, sd: f64) -> Result<Self> {
        let dist = Normal::new(mean, sd).map_err(|e| Error::domain(format!("normal base measure: {e}")))?;
        Ok(NormalBase { mean, sd, dist })
    }
}

impl InverseCdf for NormalBase {
    fn quantile(&self, u: f64) -> f64 {
        self.dist.inverse_cdf(u)
    }

    fn cdf(&self, x: f64) -> f64 {
        self.dist.cdf(x)
    }

    fn density(&self, x: f64) -> Option<f64> {
        Some(self.dist.pdf(x))
    }

    fn spec(&self) -> String {
        format!("normal:{}:{}", self.mean, self.sd)
    }
}

#[derive(Debug, Clone, Default)]
pub enum BaseMeasure {
    #[default]
    UniformOn01,
    ByInverseCdf(Arc<dyn InverseCdf>),
}

impl BaseMeasure {
    pub fn normal(mean: f64, sd: f64) -> Result<Self> {
        Ok(BaseMeasure::ByInverseCdf(Arc::new(NormalBase::new(mean, sd)?)))
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.sample(Open01);
        match self {
            BaseMeasure::UniformOn01 => u,
            BaseMeasure::ByInverseCdf(q) => q.quantile(u),
        }
    }

    /// `H((−∞, x])`.
    pub fn cdf(&self, x: f64) -> f64 {
        match self {
            BaseMeasure::UniformOn01 => x.clamp(0.0, 1.0),
            BaseMeasure::ByInverseCdf(q) => q.cdf(x),
        }
    }

    pub fn quantile(&self, u: f64) -> Result<f64> {
        if !(u > 0.0 && u < 1.0) {
            return Err(Error::domain(format!("quantile level must lie in (0,1), got {u}")));
        }
        Ok(match self {
            BaseMeasure::UniformOn01 => u,
            BaseMeasure::ByInverseCdf(q) => q.quantile(u),
        })
    }

    pub fn density(&self, x: f64) -> Option<f64> {
        match self {
            BaseMeasure::UniformOn01 => Some(if x > 0.0 && x < 1.0 { 1.0 } else { 0.0 }),
            BaseMeasure::ByInverseCdf(q) => q.density(x),
        }
    }

    /// `H(l, r]`.
    pub fn mass(&self, l: f64, r: f64) -> f64 {
        (self.cdf(r) - self.cdf(l)).max(0.0)
    }
}

impl fmt::Display for BaseMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BaseMeasure::UniformOn01 => write!(f, "uniform"),
            BaseMeasure::ByInverseCdf(q) => write!(f, "{}", q.spec()),
        }
    }
}

impl FromStr for BaseMeasure {
    type Err = Error;

    fn from_str(spec: &str) -> Result<Self> {
        let parts: Vec<&str> = spec.trim().split(':').collect();
        match parts.as_slice() {
            ["uniform"] => Ok(BaseMeasure::UniformOn01),
            ["normal", m, s] => {
                let num = |x: &str| {
                    x.parse::<f64>().map_err(|_| Error::Parse(format!("bad number '{x}' in base measure '{spec}'")))
                };
                BaseMeasure::normal(num(m)?, num(s)?)
            }
            _ => Err(Error::Parse(format!("unknown base measure '{spec}' (expected uniform or normal:M:S)"))),
        }
    }
}

impl PartialEq for BaseMeasure {
    fn eq(&self, other: &Self) -> bool {
        self.to_string() == other.to_string()
    }
}

impl Serialize for BaseMeasure {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BaseMeasure {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}
