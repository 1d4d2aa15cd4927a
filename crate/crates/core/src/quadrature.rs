//! Globally adaptive Gauss–Kronrod (7/15) quadrature.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How infinite upper limits are replaced by finite cutoffs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UpperCutoff {
    /// Grow the cutoff until an exponential-tail majorant of the integrand
    /// bounds the discarded mass by a small fraction of `abs_tol`.
    ExponentialMajorant,
    /// Integrate up to a fixed finite limit. No tail guarantee.
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSettings {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
    pub upper_cutoff: UpperCutoff,
}

impl Default for QuadratureSettings {
    fn default() -> Self {
        QuadratureSettings {
            abs_tol: 1e-10,
            rel_tol: 1e-8,
            max_subdivisions: 1000,
            upper_cutoff: UpperCutoff::ExponentialMajorant,
        }
    }
}

impl QuadratureSettings {
    pub fn new(abs_tol: f64, rel_tol: f64, max_subdivisions: usize) -> Result<Self> {
        let s =
            QuadratureSettings { abs_tol, rel_tol, max_subdivisions, upper_cutoff: UpperCutoff::ExponentialMajorant };
        s.check()?;
        Ok(s)
    }

    pub fn check(&self) -> Result<()> {
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0 && self.max_subdivisions >= 1) {
            return Err(Error::domain(format!(
                "quadrature settings need abs_tol > 0, rel_tol > 0, max_subdivisions >= 1 (got {}, {}, {})",
                self.abs_tol, self.rel_tol, self.max_subdivisions
            )));
        }
        if let UpperCutoff::Fixed(v) = self.upper_cutoff {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::domain(format!("fixed upper cutoff must be finite and positive, got {v}")));
            }
        }
        Ok(())
    }

    /// Same settings with tighter tolerances.
    pub fn scaled(&self, factor: f64) -> Self {
        QuadratureSettings { abs_tol: self.abs_tol * factor, rel_tol: self.rel_tol * factor, ..*self }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
    pub intervals: usize,
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];

const WG: [f64; 4] =
    [0.129_484_966_168_869_7, 0.279_705_391_489_276_7, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];

#[derive(Debug, Clone, Copy)]
struct Segment {
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
}

fn kronrod15<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64) -> Segment {
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let abs_half = half.abs();

    let fc = f(center);
    let mut res_gauss = fc * WG[3];
    let mut res_kronrod = fc * WGK[7];
    let mut res_abs = res_kronrod.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];

    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        res_kronrod += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_gauss += WG[j / 2] * (f1 + f2);
        }
    }

    let mean = res_kronrod * 0.5;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }

    let value = res_kronrod * half;
    res_abs *= abs_half;
    res_asc *= abs_half;
    let mut error = ((res_kronrod - res_gauss) * half).abs();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * res_abs);
    }
    Segment { lo, hi, value, error }
}

/// Integrate `f` over the finite interval `[lo, hi]`.
///
/// Bisects the segment with the largest error estimate until the summed
/// estimate drops below `max(abs_tol, rel_tol·|I|)`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, settings: &QuadratureSettings) -> Result<Integral> {
    if !(lo.is_finite() && hi.is_finite()) {
        return Err(Error::domain(format!("integration limits must be finite, got [{lo}, {hi}]")));
    }
    if lo == hi {
        return Ok(Integral { value: 0.0, error: 0.0, intervals: 0 });
    }
    let mut segments = vec![kronrod15(&f, lo, hi)];
    loop {
        let (value, error) = segments.iter().fold((0.0, 0.0), |(v, e), s| (v + s.value, e + s.error));
        if !value.is_finite() {
            return Err(Error::Numerical {
                message: format!("non-finite integrand on [{lo}, {hi}]"),
                estimate: f64::INFINITY,
            });
        }
        let target = settings.abs_tol.max(settings.rel_tol * value.abs());
        if error <= target {
            return Ok(Integral { value, error, intervals: segments.len() });
        }
        if segments.len() >= settings.max_subdivisions {
            return Err(Error::Numerical {
                message: format!(
                    "quadrature on [{lo}, {hi}] did not converge within {} subdivisions",
                    settings.max_subdivisions
                ),
                estimate: error,
            });
        }
        let (worst, _) =
            segments.iter().enumerate().max_by(|a, b| a.1.error.total_cmp(&b.1.error)).expect("at least one segment");
        let seg = segments.swap_remove(worst);
        let mid = 0.5 * (seg.lo + seg.hi);
        if mid <= seg.lo.min(seg.hi) || mid >= seg.lo.max(seg.hi) {
            return Err(Error::Numerical {
                message: "quadrature segment collapsed below machine resolution".into(),
                estimate: error,
            });
        }
        segments.push(kronrod15(&f, seg.lo, mid));
        segments.push(kronrod15(&f, mid, seg.hi));
    }
}

/// Integrate `f(s)` over `[lo, hi] ⊂ (0, ∞)` in the variable `u = ln s`,
/// which smooths the algebraic endpoint singularities of Lévy densities at 0.
pub fn integrate_log<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, settings: &QuadratureSettings) -> Result<Integral> {
    if !(lo > 0.0 && hi >= lo) {
        return Err(Error::domain(format!("log-substituted limits must satisfy 0 < lo <= hi, got [{lo}, {hi}]")));
    }
    integrate(
        |u| {
            let s = u.exp();
            f(s) * s
        },
        lo.ln(),
        hi.ln(),
        settings,
    )
}
