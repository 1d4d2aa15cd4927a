use std::f64::consts::PI;

use statrs::distribution::{ContinuousCDF, Normal};

use super::config::{ExperimentConfig, FIGURE1_COEFFICIENTS};
use super::result::{ExperimentResult, HistogramRecord, Row};
use super::{run_replicates, worker_blocks};
use crate::asymptotics::{brownian_bridge_cov, clt_covariance, quantile_limit_cov, scaled_q, ScaledStatistics};
use crate::base::BaseMeasure;
use crate::crm::{sample_crm_ferguson_klass, AtomicMeasure};
use crate::error::{Error, Result};
use crate::levy::{LevyFamily, LevyKind};
use crate::measure::normalize;
use crate::quadrature::{integrate, QuadratureSettings};
use crate::rng::StreamRng;
use crate::stats::{covariance_matrix, fit_rate_slope, ks_critical_1pct, ks_statistic, mean, percentile, Histogram};

/// Grid size for the Glivenko–Cantelli supremum.
pub const SLLN_GRID_POINTS: usize = 512;
/// Length of the test-function ladder `f_i(x) = cos(iπx)`.
pub const SLLN_TEST_FUNCTIONS: usize = 20;
pub const DEFAULT_FCLT_GRID: [f64; 9] = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9];
pub const DEFAULT_QUANTILE_LEVELS: [f64; 3] = [0.2, 0.5, 0.8];

#[derive(Clone, Copy)]
enum Hypothesis {
    Slln,
    Clt,
    BerryEsseen,
}

fn require(family: &LevyFamily, h: Hypothesis) -> Result<()> {
    let report = family.validate();
    let (ok, what) = match h {
        Hypothesis::Slln => (report.slln, "a finite first moment of rho on (1, inf)"),
        Hypothesis::Clt => (report.clt, "a finite second moment of rho on (1, inf)"),
        Hypothesis::BerryEsseen => (report.berry_esseen, "a finite third moment of rho on (1, inf)"),
    };
    if ok {
        Ok(())
    } else {
        Err(Error::config(format!("hypotheses fail for {family}: the suite needs {what}")))
    }
}

fn taus(family: &LevyFamily) -> Result<(f64, f64)> {
    Ok((family.tau_finite(1)?, family.tau_finite(2)?))
}

fn draw(cfg: &ExperimentConfig, a: f64, rng: &mut StreamRng) -> Result<AtomicMeasure> {
    sample_crm_ferguson_klass(&cfg.family, a, &cfg.base, &cfg.truncation, rng)
}

fn push_matrix(rows: &mut Vec<Row>, a: f64, prefix: &str, m: &[Vec<f64>]) {
    for i in 0..m.len() {
        for j in i..m.len() {
            rows.push(Row::aggregate(a, format!("{prefix}_{}_{}", i + 1, j + 1), m[i][j]));
        }
    }
}

fn max_abs_diff(x: &[Vec<f64>], y: &[Vec<f64>]) -> f64 {
    let mut m: f64 = 0.0;
    for (rx, ry) in x.iter().zip(y) {
        for (u, v) in rx.iter().zip(ry) {
            m = m.max((u - v).abs());
        }
    }
    m
}

fn standard_normal() -> Normal {
    Normal::new(0.0, 1.0).expect("valid")
}

/// `E_H[f]` computed as `∫₀¹ f(H⁻¹(u)) du`.
fn base_expectation<F: Fn(f64) -> f64>(base: &BaseMeasure, f: F) -> Result<f64> {
    match base {
        BaseMeasure::UniformOn01 => Ok(integrate(f, 0.0, 1.0, &QuadratureSettings::default())?.value),
        BaseMeasure::ByInverseCdf(q) => {
            Ok(integrate(|u| f(q.quantile(u)), 0.0, 1.0, &QuadratureSettings::default())?.value)
        }
    }
}

fn finish(suite: &str, cfg: &ExperimentConfig, rows: Vec<Row>) -> ExperimentResult {
    ExperimentResult::new(suite, cfg, rows, worker_blocks(cfg.seed, cfg.replicates, cfg.workers))
}

/// Glivenko–Cantelli supremum over a grid and the weak-convergence metric
/// `Σ 2^{-i}(|⟨P − H, f_i⟩| ∧ 1)` with `f_i(x) = cos(iπx)`.
pub fn run_slln(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    cfg.check()?;
    require(&cfg.family, Hypothesis::Slln)?;
    let grid: Vec<f64> = match &cfg.grid {
        Some(g) => {
            if g.is_empty() || g.windows(2).any(|w| w[1] < w[0]) {
                return Err(Error::config("SLLN grid must be nonempty and sorted"));
            }
            g.clone()
        }
        None => (0..SLLN_GRID_POINTS)
            .map(|k| cfg.base.quantile((k + 1) as f64 / (SLLN_GRID_POINTS + 1) as f64))
            .collect::<Result<_>>()?,
    };
    let h_grid: Vec<f64> = grid.iter().map(|&x| cfg.base.cdf(x)).collect();
    let h_moments = (1..=SLLN_TEST_FUNCTIONS)
        .map(|i| base_expectation(&cfg.base, |x| (i as f64 * PI * x).cos()))
        .collect::<Result<Vec<f64>>>()?;
    let mut rows = Vec::new();
    for &a in &cfg.a_list {
        let stats = run_replicates(cfg.seed, cfg.replicates, cfg.workers, |_, rng| {
            let p = normalize(&draw(cfg, a, rng)?)?;
            let cdf = p.empirical_cdf(&grid)?;
            let sup = cdf.iter().zip(&h_grid).map(|(f, h)| (f - h).abs()).fold(0.0, f64::max);
            let mut pm = [0.0; SLLN_TEST_FUNCTIONS];
            for (x, w) in p.locations().iter().zip(p.weights()) {
                // cos(iθ) by the Chebyshev recurrence
                let c1 = (PI * x).cos();
                let (mut prev, mut cur) = (1.0, c1);
                for m in pm.iter_mut() {
                    *m += w * cur;
                    let next = 2.0 * c1 * cur - prev;
                    prev = cur;
                    cur = next;
                }
            }
            let metric: f64 = pm
                .iter()
                .zip(&h_moments)
                .enumerate()
                .map(|(i, (m, h))| 0.5f64.powi(i as i32 + 1) * (m - h).abs().min(1.0))
                .sum();
            Ok((sup, metric, p.max_weight()))
        })?;
        let sups: Vec<f64> = stats.iter().map(|s| s.0).collect();
        let metrics: Vec<f64> = stats.iter().map(|s| s.1).collect();
        let maxw: Vec<f64> = stats.iter().map(|s| s.2).collect();
        for (r, s) in stats.iter().enumerate() {
            rows.push(Row::replicate(a, r, "sup_distance", s.0));
            rows.push(Row::replicate(a, r, "metric", s.1));
        }
        rows.push(Row::aggregate(a, "sup_distance_mean", mean(&sups)));
        rows.push(Row::aggregate(a, "sup_distance_p95", percentile(&sups, 0.95)));
        rows.push(Row::aggregate(a, "metric_mean", mean(&metrics)));
        rows.push(Row::aggregate(a, "metric_p95", percentile(&metrics, 0.95)));
        rows.push(Row::aggregate(a, "max_weight_mean", mean(&maxw)));
    }
    Ok(finish("slln", cfg, rows))
}

/// Draw `D_a` vectors over the configured partition at one `a`.
fn d_vectors(cfg: &ExperimentConfig, a: f64) -> Result<Vec<Vec<f64>>> {
    let part = cfg.partition()?;
    let (t1, t2) = taus(&cfg.family)?;
    run_replicates(cfg.seed, cfg.replicates, cfg.workers, |_, rng| {
        let mu = draw(cfg, a, rng)?;
        Ok(ScaledStatistics::from_measure(&mu, &part, t1, t2)?.d_values)
    })
}

fn combination_variances(cfg: &ExperimentConfig, coefficients: &[Vec<f64>]) -> Result<Vec<f64>> {
    let part = cfg.partition()?;
    let sigma = clt_covariance(part.h_values())?;
    coefficients
        .iter()
        .map(|c| {
            let v = sigma.quadratic_form(c)?;
            if !(v > 1e-12) {
                return Err(Error::config(format!("coefficients {c:?} give a degenerate limit variance {v}")));
            }
            Ok(v)
        })
        .collect()
}

fn combine(d: &[f64], c: &[f64]) -> f64 {
    d.iter().zip(c).map(|(x, y)| x * y).sum()
}

/// KS distance of `cᵀD/√(cᵀΣc)` to the standard normal.
fn combination_ks(ds: &[Vec<f64>], c: &[f64], var: f64) -> Result<(Vec<f64>, f64)> {
    let sd = var.sqrt();
    let z: Vec<f64> = ds.iter().map(|d| combine(d, c) / sd).collect();
    let n = standard_normal();
    let ks = ks_statistic(&z, |x| n.cdf(x))?;
    Ok((z, ks))
}

/// Empirical covariance of `(D_a(A_1), …, D_a(A_n))` against `Σ`, and KS
/// distances of standardized linear combinations to the normal law.
pub fn run_clt(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    cfg.check()?;
    require(&cfg.family, Hypothesis::Clt)?;
    let part = cfg.partition()?;
    let sigma = clt_covariance(part.h_values())?;
    let vars = combination_variances(cfg, &cfg.coefficients)?;
    let mut rows = Vec::new();
    for &a in &cfg.a_list {
        let ds = d_vectors(cfg, a)?;
        for (r, d) in ds.iter().enumerate() {
            for (i, x) in d.iter().enumerate() {
                rows.push(Row::replicate(a, r, format!("D_{}", i + 1), *x));
            }
        }
        let cov = covariance_matrix(&ds);
        push_matrix(&mut rows, a, "cov", &cov);
        push_matrix(&mut rows, a, "sigma", &sigma.entries);
        rows.push(Row::aggregate(a, "max_abs_dev", sigma.max_abs_deviation(&cov)));
        rows.push(Row::aggregate(a, "frobenius", sigma.frobenius_distance(&cov)));
        rows.push(Row::aggregate(a, "ks_critical_1pct", ks_critical_1pct(cfg.replicates)));
        for (k, (c, v)) in cfg.coefficients.iter().zip(&vars).enumerate() {
            let (_, ks) = combination_ks(&ds, c, *v)?;
            rows.push(Row::aggregate(a, format!("combo_{}_variance", k + 1), *v));
            rows.push(Row::aggregate(a, format!("combo_{}_ks", k + 1), ks));
        }
    }
    Ok(finish("clt", cfg, rows))
}

/// Covariance of `Q_{H,a}((−∞, x_k])` over a grid against the `H`-bridge.
pub fn run_fclt(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    cfg.check()?;
    require(&cfg.family, Hypothesis::Clt)?;
    let grid = cfg.grid.clone().unwrap_or_else(|| DEFAULT_FCLT_GRID.to_vec());
    if grid.len() < 2 {
        return Err(Error::config("functional CLT grid needs at least two points"));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::config("functional CLT grid must be strictly increasing"));
    }
    let (t1, t2) = taus(&cfg.family)?;
    let h: Vec<f64> = grid.iter().map(|&x| cfg.base.cdf(x)).collect();
    let limit: Vec<Vec<f64>> =
        grid.iter().map(|&s| grid.iter().map(|&t| brownian_bridge_cov(&cfg.base, s, t)).collect()).collect();
    let mut rows = Vec::new();
    for &a in &cfg.a_list {
        let qs = run_replicates(cfg.seed, cfg.replicates, cfg.workers, |_, rng| {
            let p = normalize(&draw(cfg, a, rng)?)?;
            let cdf = p.empirical_cdf(&grid)?;
            cdf.iter().zip(&h).map(|(f, hx)| scaled_q(*f, *hx, a, t1, t2)).collect::<Result<Vec<f64>>>()
        })?;
        for (r, q) in qs.iter().enumerate() {
            for (k, x) in q.iter().enumerate() {
                rows.push(Row::replicate(a, r, format!("Q_{}", k + 1), *x));
            }
        }
        let cov = covariance_matrix(&qs);
        push_matrix(&mut rows, a, "cov", &cov);
        push_matrix(&mut rows, a, "bridge", &limit);
        for (k, row) in cov.iter().enumerate() {
            rows.push(Row::aggregate(a, format!("var_{}", k + 1), row[k]));
        }
        rows.push(Row::aggregate(a, "max_abs_dev", max_abs_diff(&cov, &limit)));
    }
    Ok(finish("fclt", cfg, rows))
}

/// KS distance of a standardized combination at each `a`, then the slope of
/// `ln KS` against `ln a`. Uses the first coefficient vector, or the first
/// unit vector when none is configured.
pub fn run_berry_esseen(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    cfg.check()?;
    require(&cfg.family, Hypothesis::BerryEsseen)?;
    if cfg.a_list.len() < 2 {
        return Err(Error::config("the rate fit needs at least two values of a"));
    }
    let part = cfg.partition()?;
    let c = cfg.coefficients.first().cloned().unwrap_or_else(|| {
        let mut e = vec![0.0; part.len()];
        e[0] = 1.0;
        e
    });
    let var = combination_variances(cfg, std::slice::from_ref(&c))?[0];
    let mut rows = Vec::new();
    let mut points = Vec::new();
    for &a in &cfg.a_list {
        let ds = d_vectors(cfg, a)?;
        let (z, ks) = combination_ks(&ds, &c, var)?;
        for (r, x) in z.iter().enumerate() {
            rows.push(Row::replicate(a, r, "combo", *x));
        }
        rows.push(Row::aggregate(a, "ks", ks));
        rows.push(Row::aggregate(a, "ks_critical_1pct", ks_critical_1pct(cfg.replicates)));
        points.push((a, ks));
    }
    let fit = fit_rate_slope(&points)?;
    rows.push(Row::pooled("limit_variance", var));
    rows.push(Row::pooled("slope", fit.slope));
    rows.push(Row::pooled("slope_stderr", fit.stderr));
    rows.push(Row::pooled("intercept", fit.intercept));
    Ok(finish("berry_esseen", cfg, rows))
}

/// Samples and histograms of the linear combination `cᵀD_a` with the normal
/// limit `N(0, cᵀΣc)` for overlay.
pub fn run_figure1(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    cfg.check()?;
    match cfg.family.kind() {
        LevyKind::Dirichlet | LevyKind::NormalizedInverseGaussian => {}
        _ => return Err(Error::config(format!("figure1 supports dirichlet and nig, got {}", cfg.family))),
    }
    let c = cfg.coefficients.first().cloned().unwrap_or_else(|| FIGURE1_COEFFICIENTS.to_vec());
    let var = combination_variances(cfg, std::slice::from_ref(&c))?[0];
    let sd = var.sqrt();
    let mut rows = Vec::new();
    let mut histograms = Vec::new();
    for &a in &cfg.a_list {
        let ds = d_vectors(cfg, a)?;
        let (z, ks) = combination_ks(&ds, &c, var)?;
        let combo: Vec<f64> = z.iter().map(|x| x * sd).collect();
        for (r, x) in combo.iter().enumerate() {
            rows.push(Row::replicate(a, r, "combo", *x));
        }
        rows.push(Row::aggregate(a, "ks", ks));
        rows.push(Row::aggregate(a, "mean", mean(&combo)));
        rows.push(Row::aggregate(a, "variance", crate::stats::variance(&combo)));
        histograms.push(HistogramRecord { a, histogram: Histogram::freedman_diaconis(&combo)? });
    }
    rows.push(Row::pooled("limit_variance", var));
    let mut res = finish("figure1", cfg, rows);
    res.histograms = histograms;
    res.limit_curve = (0..=200)
        .map(|k| {
            let x = -4.0 * sd + 8.0 * sd * k as f64 / 200.0;
            (x, (-0.5 * x * x / var).exp() / (2.0 * PI * var).sqrt())
        })
        .collect();
    Ok(res)
}

/// Scaled quantile process `(√a τ₁/√τ₂)(P⁻¹(u) − H⁻¹(u))` on a level grid.
pub fn run_quantile(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    cfg.check()?;
    require(&cfg.family, Hypothesis::Clt)?;
    let levels = cfg.grid.clone().unwrap_or_else(|| DEFAULT_QUANTILE_LEVELS.to_vec());
    if levels.is_empty() {
        return Err(Error::config("quantile suite needs at least one level"));
    }
    if let Some(u) = levels.iter().find(|u| !(**u > 0.0 && **u < 1.0)) {
        return Err(Error::config(format!("quantile levels must lie in (0,1), got {u}")));
    }
    let limit = levels
        .iter()
        .map(|&s| levels.iter().map(|&t| quantile_limit_cov(&cfg.base, s, t)).collect::<Result<Vec<f64>>>())
        .collect::<Result<Vec<_>>>()
        .map_err(|e| Error::config(e.to_string()))?;
    let hq = levels.iter().map(|&u| cfg.base.quantile(u)).collect::<Result<Vec<f64>>>()?;
    let (t1, t2) = taus(&cfg.family)?;
    let mut rows = Vec::new();
    for &a in &cfg.a_list {
        let scale = a.sqrt() * t1 / t2.sqrt();
        let qs = run_replicates(cfg.seed, cfg.replicates, cfg.workers, |_, rng| {
            let p = normalize(&draw(cfg, a, rng)?)?;
            levels.iter().zip(&hq).map(|(&u, &h)| Ok(scale * (p.quantile(u)? - h))).collect::<Result<Vec<f64>>>()
        })?;
        for (r, q) in qs.iter().enumerate() {
            for (k, x) in q.iter().enumerate() {
                rows.push(Row::replicate(a, r, format!("Qu_{}", k + 1), *x));
            }
        }
        let cov = covariance_matrix(&qs);
        push_matrix(&mut rows, a, "cov", &cov);
        push_matrix(&mut rows, a, "limit", &limit);
        for (k, row) in cov.iter().enumerate() {
            rows.push(Row::aggregate(a, format!("var_{}", k + 1), row[k]));
        }
        rows.push(Row::aggregate(a, "max_abs_dev", max_abs_diff(&cov, &limit)));
    }
    Ok(finish("quantile", cfg, rows))
}
