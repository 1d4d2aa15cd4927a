//! Analytic objects of the large-`a` theory: scaled statistics, the CLT
//! covariance, the variance integral `I_a`, CRM moments via Faà di Bruno,
//! moments of `V_a` and the Gaussian limit covariances.

use serde::{Deserialize, Serialize};

use crate::base::BaseMeasure;
use crate::crm::AtomicMeasure;
use crate::error::{Error, Result};
use crate::levy::LevyFamily;
use crate::measure::Partition;
use crate::quadrature::integrate;
use crate::stats::{fit_rate_slope, RateFit};

/// Largest moment order accepted by [`crm_moment`].
pub const MAX_MOMENT_ORDER: u32 = 8;

fn check_h(h: f64) -> Result<()> {
    if h > 0.0 && h < 1.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("base mass must lie in (0,1), got {h}; drop such components first")))
    }
}

fn check_positive(name: &str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("{name} must be finite and positive, got {x}")))
    }
}

/// Limit covariance `Σ` of `(D_a(A₁), …, D_a(A_n))`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CltCovariance {
    pub n: usize,
    pub entries: Vec<Vec<f64>>,
}

impl CltCovariance {
    /// `cᵀΣc`.
    pub fn quadratic_form(&self, c: &[f64]) -> Result<f64> {
        if c.len() != self.n {
            return Err(Error::domain(format!("coefficient vector has length {}, expected {}", c.len(), self.n)));
        }
        let mut q = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                q += c[i] * self.entries[i][j] * c[j];
            }
        }
        Ok(q)
    }

    pub fn max_abs_deviation(&self, other: &[Vec<f64>]) -> f64 {
        let mut m: f64 = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                m = m.max((self.entries[i][j] - other[i][j]).abs());
            }
        }
        m
    }

    pub fn frobenius_distance(&self, other: &[Vec<f64>]) -> f64 {
        let mut s = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                s += (self.entries[i][j] - other[i][j]).powi(2);
            }
        }
        s.sqrt()
    }
}

/// `σ_ii = 1`, `σ_ij = −√(H_iH_j/((1−H_i)(1−H_j)))`.
pub fn clt_covariance(h_values: &[f64]) -> Result<CltCovariance> {
    if h_values.is_empty() {
        return Err(Error::domain("CLT covariance needs at least one set"));
    }
    for &h in h_values {
        check_h(h)?;
    }
    let n = h_values.len();
    let r: Vec<f64> = h_values.iter().map(|h| (h / (1.0 - h)).sqrt()).collect();
    let entries = (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { -r[i] * r[j] }).collect()).collect();
    Ok(CltCovariance { n, entries })
}

/// `D_a = √a·τ₁·(P − H)/√(H(1−H)τ₂)`.
pub fn scaled_d(p_value: f64, h: f64, a: f64, tau1: f64, tau2: f64) -> Result<f64> {
    check_h(h)?;
    Ok(scaled_q(p_value, h, a, tau1, tau2)? / (h * (1.0 - h)).sqrt())
}

/// `Q_{H,a} = √a·τ₁·(P − H)/√τ₂`.
pub fn scaled_q(p_value: f64, h: f64, a: f64, tau1: f64, tau2: f64) -> Result<f64> {
    check_positive("a", a)?;
    check_positive("tau_1", tau1)?;
    check_positive("tau_2", tau2)?;
    Ok(a.sqrt() * tau1 * (p_value - h) / tau2.sqrt())
}

/// Centered and scaled views of one CRM draw over a partition.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaledStatistics {
    pub d_values: Vec<f64>,
    pub q_values: Vec<f64>,
    /// `V_a = μ̃_a(X)/(aτ₁)`.
    pub v_a: f64,
    pub a: f64,
    pub tau1: f64,
    pub tau2: f64,
}

impl ScaledStatistics {
    /// Requires every `H(A_i) ∈ (0,1)`.
    pub fn from_measure(mu: &AtomicMeasure, part: &Partition, tau1: f64, tau2: f64) -> Result<Self> {
        let total = mu.total_mass();
        if !(total > 0.0) {
            return Err(Error::ZeroMass);
        }
        let a = mu.a();
        let b = part.boundaries();
        let mut d_values = Vec::with_capacity(part.len());
        let mut q_values = Vec::with_capacity(part.len());
        for (i, &h) in part.h_values().iter().enumerate() {
            let p = mu.mass_of(b[i], b[i + 1]) / total;
            q_values.push(scaled_q(p, h, a, tau1, tau2)?);
            d_values.push(scaled_d(p, h, a, tau1, tau2)?);
        }
        Ok(ScaledStatistics { d_values, q_values, v_a: total / (a * tau1), a, tau1, tau2 })
    }
}

/// `I_a = a∫₀^∞ λ e^{−aψ(λ)} M₂(λ) dλ` with `M₂(λ) = ∫ s² e^{−λs} ρ(ds)`, so
/// that `Var P(A) = H(A)(1 − H(A))·I_a`.
pub fn variance_integral_ia(family: &LevyFamily, a: f64) -> Result<f64> {
    check_positive("a", a)?;
    let tau2 = family
        .tau(2)?
        .finite()
        .ok_or_else(|| Error::domain(format!("I_a needs a finite second moment, which {family} lacks")))?;
    let q = family.quadrature();
    let cut = q.abs_tol * a.min(1.0) * 1e-2;
    // in u = ln λ the integrand is a·λ²·e^{−aψ}·M₂
    let g = |u: f64| {
        let lam = u.exp();
        let m2 = family.tilted_unchecked(2, lam);
        a * lam * lam * (-a * family.psi_unchecked(lam)).exp() * m2
    };
    // below λ_lo the integrand is ≤ aτ₂λ², whose integral in u is aτ₂λ²/2
    let lo = 0.5 * (2.0 * cut / (a * tau2)).ln();
    // the mass sits near λ ≈ 1/a; walk right from there
    let mut hi = 2.0 - a.ln();
    while g(hi) > cut {
        hi += 1.0;
        if hi > 700.0 {
            return Err(Error::Numerical {
                message: "no outer cutoff found for the variance integral".into(),
                estimate: g(hi),
            });
        }
    }
    let r = integrate(g, lo, hi, q)?;
    Ok(r.value)
}

/// Fit `ln I_a` against `ln a` over a grid spanning at least two decades.
pub fn ia_order_check(family: &LevyFamily, a_grid: &[f64]) -> Result<RateFit> {
    if a_grid.len() < 2 {
        return Err(Error::domain("order check needs at least two values of a"));
    }
    if a_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::domain("order check needs an increasing grid"));
    }
    if a_grid[a_grid.len() - 1] / a_grid[0] < 100.0 * (1.0 - 1e-12) {
        return Err(Error::domain("order check grid must span at least two decades"));
    }
    let points = a_grid.iter().map(|&a| Ok((a, variance_integral_ia(family, a)?))).collect::<Result<Vec<_>>>()?;
    fit_rate_slope(&points)
}

/// Compositions of `p` into exactly `parts` positive integers.
fn compositions(p: u32, parts: u32) -> Vec<Vec<u32>> {
    if parts == 1 {
        return vec![vec![p]];
    }
    let mut out = Vec::new();
    for first in 1..=(p - parts + 1) {
        for mut rest in compositions(p - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

/// `E[μ_m(A)^p]` for a unit block with `H(A) = h`:
/// `Σ_{i=1}^p hⁱ/i! Σ_{q₁+…+q_i=p} p!/(q₁!…q_i!) Π τ_{q_j}`.
pub fn crm_moment(family: &LevyFamily, p: u32, h: f64) -> Result<f64> {
    if p == 0 || p > MAX_MOMENT_ORDER {
        return Err(Error::domain(format!("moment order must be in 1..={MAX_MOMENT_ORDER}, got {p}")));
    }
    if !(h > 0.0 && h <= 1.0) {
        return Err(Error::domain(format!("base mass must lie in (0,1], got {h}")));
    }
    let taus = (1..=p)
        .map(|k| family.tau(k)?.finite().ok_or_else(|| Error::domain(format!("tau_{k} diverges for {family}"))))
        .collect::<Result<Vec<f64>>>()?;
    let pf = factorial(p);
    let mut total = 0.0;
    for i in 1..=p {
        let inner: f64 = compositions(p, i)
            .iter()
            .map(|q| {
                let denom: f64 = q.iter().map(|&qj| factorial(qj)).product();
                let prod: f64 = q.iter().map(|&qj| taus[qj as usize - 1]).product();
                pf / denom * prod
            })
            .sum();
        total += h.powi(i as i32) / factorial(i) * inner;
    }
    Ok(total)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VaMoments {
    pub m1: f64,
    pub m2: f64,
    pub m3: f64,
    /// `E[(V_a − 1)³]`.
    pub third_central: f64,
}

/// Raw moments of `V_a = μ̃_a(X)/(aτ₁)`.
pub fn va_moments(family: &LevyFamily, a: f64) -> Result<VaMoments> {
    check_positive("a", a)?;
    let tau = |k| family.tau(k)?.finite().ok_or_else(|| Error::domain(format!("tau_{k} diverges for {family}")));
    let (t1, t2, t3) = (tau(1)?, tau(2)?, tau(3)?);
    let c2 = t2 / (a * t1 * t1);
    let c3 = t3 / (a * a * t1 * t1 * t1);
    Ok(VaMoments { m1: 1.0, m2: 1.0 + c2, m3: 1.0 + 3.0 * c2 + c3, third_central: c3 })
}

/// `H(s ∧ t) − H(s)H(t)`.
pub fn brownian_bridge_cov(base: &BaseMeasure, s: f64, t: f64) -> f64 {
    let (hs, ht) = (base.cdf(s), base.cdf(t));
    hs.min(ht) - hs * ht
}

/// `(s ∧ t − st)/(h(H⁻¹(s))·h(H⁻¹(t)))`.
pub fn quantile_limit_cov(base: &BaseMeasure, s: f64, t: f64) -> Result<f64> {
    let dens = |u: f64| -> Result<f64> {
        let x = base.quantile(u)?;
        match base.density(x) {
            Some(d) if d > 0.0 && d.is_finite() => Ok(d),
            _ => Err(Error::domain(format!("base density is unavailable or zero at H^-1({u})"))),
        }
    };
    Ok((s.min(t) - s * t) / (dens(s)? * dens(t)?))
}
