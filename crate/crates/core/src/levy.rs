//! Homogeneous Lévy intensities `ρ(ds)` and their analytic functionals.
//!
//! Every supported family is a finite sum of tempered-stable pieces
//! `c · s^{-1-α} · e^{-θ s}` (α ∈ [0, 1), θ ≥ 0), so closed forms for the
//! tail mass, Laplace exponent and moments all reduce to (incomplete) gamma
//! functions. The quadrature routes are kept alongside as independent checks.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::{gamma, ln_gamma};

use crate::error::{Error, Result};
use crate::quadrature::{integrate_log, QuadratureSettings, UpperCutoff};
use crate::special::{exp_int_e1, lower_gamma, upper_gamma, EULER_GAMMA};

/// Largest `γ` accepted for the generalized Dirichlet family.
pub const MAX_GDIR_GAMMA: u32 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LevyKind {
    Dirichlet,
    GeneralizedDirichlet { gamma: u32 },
    SigmaStable { sigma: f64 },
    NormalizedInverseGaussian,
    NormalizedGeneralizedGamma { sigma: f64, theta: f64 },
}

/// One tempered-stable piece `scale · s^{-1-alpha} · e^{-theta s}`.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Piece {
    scale: f64,
    alpha: f64,
    theta: f64,
}

/// Either a finite value or a signal that the integral diverges.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Moment {
    Finite(f64),
    Divergent,
}

impl Moment {
    pub fn finite(self) -> Option<f64> {
        match self {
            Moment::Finite(v) => Some(v),
            Moment::Divergent => None,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Moment::Finite(_))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LevyFamily {
    kind: LevyKind,
    quadrature: QuadratureSettings,
    pieces: Vec<Piece>,
}

impl LevyFamily {
    pub fn new(kind: LevyKind) -> Result<Self> {
        Self::with_settings(kind, QuadratureSettings::default())
    }

    pub fn with_settings(kind: LevyKind, quadrature: QuadratureSettings) -> Result<Self> {
        quadrature.check()?;
        let in_unit = |s: f64| s > 0.0 && s < 1.0;
        let pieces = match kind {
            LevyKind::Dirichlet => vec![Piece { scale: 1.0, alpha: 0.0, theta: 1.0 }],
            LevyKind::GeneralizedDirichlet { gamma } => {
                if gamma == 0 || gamma > MAX_GDIR_GAMMA {
                    return Err(Error::domain(format!(
                        "generalized Dirichlet needs 1 <= gamma <= {MAX_GDIR_GAMMA}, got {gamma}"
                    )));
                }
                (1..=gamma).map(|i| Piece { scale: 1.0, alpha: 0.0, theta: i as f64 }).collect()
            }
            LevyKind::SigmaStable { sigma } => {
                if !in_unit(sigma) {
                    return Err(Error::domain(format!("sigma-stable needs sigma in (0,1), got {sigma}")));
                }
                vec![Piece { scale: sigma / gamma(1.0 - sigma), alpha: sigma, theta: 0.0 }]
            }
            LevyKind::NormalizedInverseGaussian => {
                vec![Piece { scale: 1.0 / (2.0 * std::f64::consts::PI).sqrt(), alpha: 0.5, theta: 0.5 }]
            }
            LevyKind::NormalizedGeneralizedGamma { sigma, theta } => {
                if !in_unit(sigma) {
                    return Err(Error::domain(format!("NGG needs sigma in (0,1), got {sigma}")));
                }
                if !(theta > 0.0 && theta.is_finite()) {
                    return Err(Error::domain(format!("NGG needs theta > 0, got {theta}")));
                }
                vec![Piece { scale: sigma / gamma(1.0 - sigma), alpha: sigma, theta }]
            }
        };
        Ok(LevyFamily { kind, quadrature, pieces })
    }

    pub fn dirichlet() -> Self {
        Self::new(LevyKind::Dirichlet).expect("valid")
    }

    pub fn nig() -> Self {
        Self::new(LevyKind::NormalizedInverseGaussian).expect("valid")
    }

    pub fn kind(&self) -> LevyKind {
        self.kind
    }

    pub fn quadrature(&self) -> &QuadratureSettings {
        &self.quadrature
    }

    /// Short human name of the family.
    pub fn name(&self) -> &'static str {
        match self.kind {
            LevyKind::Dirichlet => "Dirichlet",
            LevyKind::GeneralizedDirichlet { .. } => "generalized Dirichlet",
            LevyKind::SigmaStable { .. } => "sigma-stable",
            LevyKind::NormalizedInverseGaussian => "normalized inverse Gaussian",
            LevyKind::NormalizedGeneralizedGamma { .. } => "normalized generalized gamma",
        }
    }

    fn tempered(&self) -> bool {
        self.pieces.iter().all(|p| p.theta > 0.0)
    }

    /// Density of `ρ` with respect to Lebesgue measure.
    pub fn rho_density(&self, s: f64) -> Result<f64> {
        if !(s > 0.0) {
            return Err(Error::domain(format!("Lévy density needs s > 0, got {s}")));
        }
        Ok(self.density_unchecked(s))
    }

    fn density_unchecked(&self, s: f64) -> f64 {
        let ln_s = s.ln();
        self.pieces.iter().map(|p| p.scale * (-(1.0 + p.alpha) * ln_s - p.theta * s).exp()).sum()
    }

    /// Tail mass `N(v) = ρ((v, ∞))`.
    pub fn tail_mass(&self, v: f64) -> Result<f64> {
        if v.is_nan() || v <= 0.0 {
            return Err(Error::domain(format!("tail mass needs v > 0, got {v}")));
        }
        if v == f64::INFINITY {
            return Ok(0.0);
        }
        Ok(self.tail_unchecked(v))
    }

    fn tail_unchecked(&self, v: f64) -> f64 {
        self.pieces
            .iter()
            .map(|p| {
                if p.theta == 0.0 {
                    p.scale * v.powf(-p.alpha) / p.alpha
                } else if p.alpha == 0.0 {
                    p.scale * exp_int_e1(p.theta * v)
                } else {
                    p.scale * p.theta.powf(p.alpha) * upper_gamma(-p.alpha, p.theta * v)
                }
            })
            .sum()
    }

    /// Solve `N(v) = u` for the jump height `v`.
    ///
    /// Brackets are grown geometrically in `ln v` from an asymptotic guess,
    /// then refined with Newton steps that fall back to bisection.
    pub fn inverse_tail_mass(&self, u: f64) -> Result<f64> {
        if !(u > 0.0) || u.is_infinite() {
            return Err(Error::domain(format!("inverse tail mass needs finite u > 0, got {u}")));
        }
        if let Some(v) = self.stable_inverse(u)? {
            return Ok(v);
        }
        let guess = self.inverse_guess(u);
        self.solve_tail(u, guess.ln(), None, None, None)
    }

    /// Same as [`inverse_tail_mass`](Self::inverse_tail_mass), started from a
    /// previously solved pair `(u_prev, v_prev)` with `u_prev < u`. Used by
    /// series samplers where consecutive arrivals are close.
    pub fn inverse_tail_mass_after(&self, u: f64, u_prev: f64, v_prev: f64) -> Result<f64> {
        if !(u > 0.0) || u.is_infinite() {
            return Err(Error::domain(format!("inverse tail mass needs finite u > 0, got {u}")));
        }
        if let Some(v) = self.stable_inverse(u)? {
            return Ok(v);
        }
        debug_assert!(u_prev <= u);
        let t = v_prev.ln();
        self.solve_tail(u, t, Some(u_prev - u), None, Some(t))
    }

    fn stable_inverse(&self, u: f64) -> Result<Option<f64>> {
        if let [p] = self.pieces.as_slice() {
            if p.theta == 0.0 {
                let v = (u * p.alpha / p.scale).powf(-1.0 / p.alpha);
                if !(v >= f64::MIN_POSITIVE) {
                    return Err(Error::Underflow { u });
                }
                return Ok(Some(v));
            }
        }
        Ok(None)
    }

    fn inverse_guess(&self, u: f64) -> f64 {
        let t_min = f64::MIN_POSITIVE.ln();
        let at_one = self.tail_unchecked(1.0);
        let t = if u >= at_one {
            let alpha_max = self.pieces.iter().map(|p| p.alpha).fold(0.0, f64::max);
            if alpha_max > 0.0 {
                let c: f64 = self.pieces.iter().filter(|p| p.alpha == alpha_max).map(|p| p.scale).sum();
                -(u * alpha_max / c).ln() / alpha_max
            } else {
                let c: f64 = self.pieces.iter().map(|p| p.scale).sum();
                let offset: f64 = self.pieces.iter().map(|p| p.scale * (p.theta.ln() + EULER_GAMMA)).sum();
                -(u + offset) / c
            }
        } else {
            let p = self.pieces.iter().min_by(|a, b| a.theta.total_cmp(&b.theta)).expect("nonempty");
            let v = (-(u * p.theta / p.scale).ln() / p.theta).max(1.0);
            v.ln()
        };
        t.clamp(t_min, 700.0).exp()
    }

    /// Safeguarded Newton iteration on `f(t) = N(e^t) - u`, which is
    /// decreasing and convex in `t`.
    fn solve_tail(
        &self,
        u: f64,
        mut t: f64,
        mut known_f: Option<f64>,
        mut lo: Option<f64>,
        mut hi: Option<f64>,
    ) -> Result<f64> {
        let t_min = f64::MIN_POSITIVE.ln();
        let t_max = 709.0;
        let tol = 1e-2 * self.quadrature.rel_tol;
        let mut expand = 1.0;
        for _ in 0..400 {
            let v = t.exp();
            let f = match known_f.take() {
                Some(f) => f,
                None => self.tail_unchecked(v) - u,
            };
            if f == 0.0 {
                return Ok(v);
            }
            if f > 0.0 {
                if t >= t_max {
                    return Err(Error::Numerical {
                        message: format!("no upper bracket for inverse tail mass at u = {u:e}"),
                        estimate: f,
                    });
                }
                lo = Some(t);
            } else {
                if t <= t_min {
                    return Err(Error::Underflow { u });
                }
                hi = Some(t);
            }
            let slope = v * self.density_unchecked(v);
            let newton = t + f / slope;
            let mut next = match (lo, hi) {
                (Some(l), Some(h)) => {
                    if newton > l && newton < h {
                        newton
                    } else {
                        0.5 * (l + h)
                    }
                }
                (Some(l), None) => {
                    if newton.is_finite() && newton > l && newton - l <= expand {
                        newton
                    } else {
                        let n = l + expand;
                        expand *= 2.0;
                        n
                    }
                }
                (None, Some(h)) => {
                    if newton.is_finite() && newton < h && h - newton <= expand {
                        newton
                    } else {
                        let n = h - expand;
                        expand *= 2.0;
                        n
                    }
                }
                (None, None) => unreachable!("f is nonzero so one bracket is set"),
            };
            next = next.clamp(t_min, t_max);
            let width_ok = matches!((lo, hi), (Some(l), Some(h)) if h - l <= tol);
            if (next - t).abs() <= tol || width_ok {
                return Ok(next.exp());
            }
            t = next;
        }
        Err(Error::Numerical {
            message: format!("inverse tail mass did not converge at u = {u:e}"),
            estimate: f64::NAN,
        })
    }

    /// `τ_k = ∫_0^∞ s^k ρ(ds)`; divergence is decided from the tail exponent.
    pub fn tau(&self, k: u32) -> Result<Moment> {
        if k == 0 {
            return Err(Error::domain("tau needs k >= 1"));
        }
        if !self.tempered() {
            return Ok(Moment::Divergent);
        }
        let kf = k as f64;
        let v =
            self.pieces.iter().map(|p| p.scale * (ln_gamma(kf - p.alpha) + (p.alpha - kf) * p.theta.ln()).exp()).sum();
        Ok(Moment::Finite(v))
    }

    /// `τ_k` that must be finite, with a typed error otherwise.
    pub fn tau_finite(&self, k: u32) -> Result<f64> {
        self.tau(k)?.finite().ok_or_else(|| Error::Divergent { family: self.to_string(), order: k })
    }

    /// `τ_k` computed by quadrature; `Divergent` for untempered families.
    pub fn tau_by_quadrature(&self, k: u32) -> Result<Moment> {
        if k == 0 {
            return Err(Error::domain("tau needs k >= 1"));
        }
        if !self.tempered() {
            return Ok(Moment::Divergent);
        }
        let kf = k as i32;
        let v = self.integrate_rho(|s| s.powi(kf), 0.0, None, (1.0, k as f64), k as f64)?;
        Ok(Moment::Finite(v))
    }

    /// `τ̃_k = ∫_1^∞ s^k ρ(ds)` by quadrature.
    pub fn tau_tilde(&self, k: u32) -> Result<Moment> {
        if k == 0 {
            return Err(Error::domain("tau_tilde needs k >= 1"));
        }
        if !self.tempered() {
            return Ok(Moment::Divergent);
        }
        let kf = k as i32;
        let v = self.integrate_rho(|s| s.powi(kf), 1.0, None, (1.0, k as f64), k as f64)?;
        Ok(Moment::Finite(v))
    }

    /// Laplace exponent `ψ(λ) = ∫ (1 - e^{-λ s}) ρ(ds)`.
    pub fn laplace_exponent(&self, lam: f64) -> Result<f64> {
        if !(lam >= 0.0) {
            return Err(Error::domain(format!("Laplace exponent needs lambda >= 0, got {lam}")));
        }
        Ok(self.psi_unchecked(lam))
    }

    pub(crate) fn psi_unchecked(&self, lam: f64) -> f64 {
        if lam == 0.0 {
            return 0.0;
        }
        self.pieces
            .iter()
            .map(|p| {
                if p.theta == 0.0 {
                    p.scale * gamma(1.0 - p.alpha) / p.alpha * lam.powf(p.alpha)
                } else if p.alpha == 0.0 {
                    p.scale * (lam / p.theta).ln_1p()
                } else {
                    let c = p.scale * gamma(1.0 - p.alpha) / p.alpha;
                    c * p.theta.powf(p.alpha) * (p.alpha * (lam / p.theta).ln_1p()).exp_m1()
                }
            })
            .sum()
    }

    pub fn laplace_exponent_by_quadrature(&self, lam: f64) -> Result<f64> {
        if !(lam >= 0.0) {
            return Err(Error::domain(format!("Laplace exponent needs lambda >= 0, got {lam}")));
        }
        if lam == 0.0 {
            return Ok(0.0);
        }
        self.integrate_rho(|s| -(-lam * s).exp_m1(), 0.0, None, (lam, 1.0), 0.0)
    }

    /// `M_k(λ) = ∫ s^k e^{-λ s} ρ(ds) = (-1)^{k-1} ψ^{(k)}(λ)`.
    pub fn tilted_moment(&self, k: u32, lam: f64) -> Result<Moment> {
        if k == 0 {
            return Err(Error::domain("tilted moment needs k >= 1"));
        }
        if !(lam >= 0.0) {
            return Err(Error::domain(format!("tilted moment needs lambda >= 0, got {lam}")));
        }
        if lam == 0.0 {
            return self.tau(k);
        }
        Ok(Moment::Finite(self.tilted_unchecked(k, lam)))
    }

    pub(crate) fn tilted_unchecked(&self, k: u32, lam: f64) -> f64 {
        let kf = k as f64;
        self.pieces
            .iter()
            .map(|p| p.scale * (ln_gamma(kf - p.alpha) + (p.alpha - kf) * (lam + p.theta).ln()).exp())
            .sum()
    }

    pub fn tilted_moment_by_quadrature(&self, k: u32, lam: f64) -> Result<f64> {
        if !(lam > 0.0) && !self.tempered() {
            return Err(Error::Divergent { family: self.to_string(), order: k });
        }
        let kf = k as i32;
        let f = |s: f64| s.powi(kf) * (-lam * s).exp();
        self.integrate_rho_with_rate(f, 0.0, None, (1.0, k as f64), k as f64, lam)
    }

    /// `∫_0^v s^k ρ(ds)`, the k-th moment carried by jumps below `v`.
    pub fn truncated_moment(&self, k: u32, v: f64) -> Result<f64> {
        if k == 0 {
            return Err(Error::domain("truncated moment needs k >= 1"));
        }
        if !(v >= 0.0) {
            return Err(Error::domain(format!("truncated moment needs v >= 0, got {v}")));
        }
        if v == 0.0 {
            return Ok(0.0);
        }
        let kf = k as f64;
        Ok(self
            .pieces
            .iter()
            .map(|p| {
                let a = kf - p.alpha;
                if p.theta == 0.0 {
                    p.scale * v.powf(a) / a
                } else {
                    p.scale * p.theta.powf(-a) * lower_gamma(a, p.theta * v)
                }
            })
            .sum())
    }

    pub fn truncated_moment_by_quadrature(&self, k: u32, v: f64) -> Result<f64> {
        if !(v > 0.0) {
            return Err(Error::domain(format!("truncated moment needs v > 0, got {v}")));
        }
        let kf = k as i32;
        self.integrate_rho(|s| s.powi(kf), 0.0, Some(v), (1.0, k as f64), k as f64)
    }

    pub fn tail_mass_by_quadrature(&self, v: f64) -> Result<f64> {
        if !(v > 0.0) {
            return Err(Error::domain(format!("tail mass needs v > 0, got {v}")));
        }
        self.integrate_rho(|_| 1.0, v, None, (1.0, 0.0), 0.0)
    }

    /// Majorant of `∫_V^∞ s^k ρ(ds)`; infinite when the tail is not integrable.
    fn tail_moment_bound(&self, k: f64, cutoff: f64, rate: f64) -> f64 {
        self.pieces
            .iter()
            .map(|p| {
                let a = k - p.alpha;
                let theta = p.theta + rate;
                if theta == 0.0 {
                    if a < 0.0 {
                        p.scale * cutoff.powf(a) / -a
                    } else {
                        f64::INFINITY
                    }
                } else {
                    p.scale * theta.powf(-a) * upper_gamma(a, theta * cutoff)
                }
            })
            .sum()
    }

    fn integrate_rho<F: Fn(f64) -> f64>(
        &self,
        g: F,
        lo: f64,
        hi: Option<f64>,
        near_zero: (f64, f64),
        growth: f64,
    ) -> Result<f64> {
        self.integrate_rho_with_rate(g, lo, hi, near_zero, growth, 0.0)
    }

    /// `∫_lo^hi g(s) ρ(s) ds` with `g(s) ≤ c s^β` near zero and `g(s) ≤ s^k`
    /// at infinity; both infinite ends are cut where the analytic majorants
    /// drop below a quarter of `abs_tol`. `rate` is extra exponential decay
    /// of `g` that the majorant may use.
    fn integrate_rho_with_rate<F: Fn(f64) -> f64>(
        &self,
        g: F,
        lo: f64,
        hi: Option<f64>,
        (c, beta): (f64, f64),
        growth: f64,
        rate: f64,
    ) -> Result<f64> {
        let q = &self.quadrature;
        let budget = 0.25 * q.abs_tol;
        let lower = if lo > 0.0 {
            lo
        } else {
            // ∫_0^ε c s^β ρ(ds) ≤ Σ scale·c·ε^{β-α}/(β-α)
            let mut eps: f64 = 1.0;
            for p in &self.pieces {
                let d = beta - p.alpha;
                if d <= 0.0 {
                    return Err(Error::Divergent { family: self.to_string(), order: beta as u32 });
                }
                let share = budget / self.pieces.len() as f64;
                let e = (share * d / (p.scale * c)).powf(1.0 / d);
                eps = eps.min(e);
            }
            eps.max(f64::MIN_POSITIVE)
        };
        let upper = match hi {
            Some(h) => h,
            None => match q.upper_cutoff {
                UpperCutoff::Fixed(v) => v.max(lower),
                UpperCutoff::ExponentialMajorant => {
                    let mut v = lower.max(1.0) * 2.0;
                    loop {
                        let bound = self.tail_moment_bound(growth, v, rate);
                        if bound.is_infinite() {
                            return Err(Error::Divergent { family: self.to_string(), order: growth as u32 });
                        }
                        if bound <= budget {
                            break v;
                        }
                        v *= 2.0;
                        if v > 1e300 {
                            return Err(Error::Numerical {
                                message: "no finite upper cutoff meets the tail budget".into(),
                                estimate: bound,
                            });
                        }
                    }
                }
            },
        };
        if upper <= lower {
            return Ok(0.0);
        }
        let inner = QuadratureSettings { abs_tol: 0.5 * q.abs_tol, ..*q };
        let r = integrate_log(|s| g(s) * self.density_unchecked(s), lower, upper, &inner)?;
        Ok(r.value)
    }

    /// Numerical checks of the structural conditions on `ρ` and of which
    /// moment hypotheses hold.
    pub fn validate(&self) -> ValidationReport {
        let small = self.integrate_rho(|s| s, 0.0, Some(1.0), (1.0, 1.0), 1.0);
        let big = self.tail_mass(1.0);
        let min_s_one = match (small, big) {
            (Ok(a), Ok(b)) => Some(a + b),
            _ => None,
        };
        let ladder: Vec<(f64, f64)> = (1..=8)
            .map(|e| {
                let v = 10f64.powi(-e);
                (v, self.tail_mass(v).unwrap_or(f64::NAN))
            })
            .collect();
        // growth without bound: strictly increasing and decade increments not shrinking
        let increments: Vec<f64> = ladder.windows(2).map(|w| w[1].1 - w[0].1).collect();
        let infinite_activity =
            increments.iter().all(|d| *d > 0.0) && increments.windows(2).all(|w| w[1] >= 0.9 * w[0]);
        let tau_tilde: Vec<Option<f64>> = (1..=3).map(|k| self.tau_tilde(k).ok().and_then(Moment::finite)).collect();
        let levy_ok = min_s_one.is_some_and(f64::is_finite) && infinite_activity;
        ValidationReport {
            family: self.to_string(),
            min_s_one_integral: min_s_one,
            tail_ladder: ladder,
            infinite_activity,
            tau_tilde: [tau_tilde[0], tau_tilde[1], tau_tilde[2]],
            slln: levy_ok && tau_tilde[0].is_some(),
            clt: levy_ok && tau_tilde[1].is_some(),
            berry_esseen: levy_ok && tau_tilde[2].is_some(),
            sampler: levy_ok,
        }
    }
}

impl fmt::Display for LevyFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            LevyKind::Dirichlet => write!(f, "dirichlet"),
            LevyKind::GeneralizedDirichlet { gamma } => write!(f, "gdir:{gamma}"),
            LevyKind::SigmaStable { sigma } => write!(f, "stable:{sigma}"),
            LevyKind::NormalizedInverseGaussian => write!(f, "nig"),
            LevyKind::NormalizedGeneralizedGamma { sigma, theta } => write!(f, "ngg:{sigma}:{theta}"),
        }
    }
}

impl FromStr for LevyFamily {
    type Err = Error;

    fn from_str(spec: &str) -> Result<Self> {
        let parts: Vec<&str> = spec.trim().split(':').collect();
        let num = |s: &str| -> Result<f64> {
            s.parse::<f64>().map_err(|_| Error::Parse(format!("bad number '{s}' in family spec '{spec}'")))
        };
        let kind = match parts.as_slice() {
            ["dirichlet"] => LevyKind::Dirichlet,
            ["nig"] => LevyKind::NormalizedInverseGaussian,
            ["gdir", g] => LevyKind::GeneralizedDirichlet {
                gamma: g.parse().map_err(|_| Error::Parse(format!("gdir needs a positive integer, got '{g}'")))?,
            },
            ["stable", s] => LevyKind::SigmaStable { sigma: num(s)? },
            ["ngg", s, t] => LevyKind::NormalizedGeneralizedGamma { sigma: num(s)?, theta: num(t)? },
            _ => {
                return Err(Error::Parse(format!(
                    "unknown family spec '{spec}' (expected dirichlet, gdir:G, stable:S, nig, ngg:S:T)"
                )))
            }
        };
        LevyFamily::new(kind)
    }
}

impl Serialize for LevyFamily {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for LevyFamily {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Findings of [`LevyFamily::validate`].
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub family: String,
    /// `∫ min(s, 1) ρ(ds)`, `None` when it could not be computed.
    pub min_s_one_integral: Option<f64>,
    /// `(v, N(v))` for `v = 1e-1, …, 1e-8`.
    pub tail_ladder: Vec<(f64, f64)>,
    pub infinite_activity: bool,
    /// `τ̃_1, τ̃_2, τ̃_3`, `None` when divergent.
    pub tau_tilde: [Option<f64>; 3],
    pub slln: bool,
    pub clt: bool,
    pub berry_esseen: bool,
    pub sampler: bool,
}

impl ValidationReport {
    /// Flat, ordered key/value view.
    pub fn to_record(&self) -> Vec<(String, String)> {
        let fmt_opt = |v: Option<f64>| v.map_or_else(|| "divergent".to_string(), |x| format!("{x}"));
        let mut rec = vec![
            ("family".to_string(), self.family.clone()),
            ("min_s_one_integral".to_string(), fmt_opt(self.min_s_one_integral)),
        ];
        for (v, n) in &self.tail_ladder {
            rec.push((format!("tail_mass_{v:e}"), format!("{n}")));
        }
        rec.push(("infinite_activity".into(), self.infinite_activity.to_string()));
        for (k, t) in self.tau_tilde.iter().enumerate() {
            rec.push((format!("tau_tilde_{}", k + 1), fmt_opt(*t)));
        }
        rec.push(("slln_applicable".into(), self.slln.to_string()));
        rec.push(("clt_applicable".into(), self.clt.to_string()));
        rec.push(("berry_esseen_applicable".into(), self.berry_esseen.to_string()));
        rec.push(("sampler_only".into(), (self.sampler && !self.slln).to_string()));
        rec
    }

    pub fn to_json(&self) -> serde_json::Value {
        let map: serde_json::Map<String, serde_json::Value> =
            self.to_record().into_iter().map(|(k, v)| (k, serde_json::Value::String(v))).collect();
        serde_json::Value::Object(map)
    }
}
