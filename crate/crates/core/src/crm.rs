//! Truncated simulation of the homogeneous CRM `μ̃_a` with Lévy intensity
//! `ρ(ds)·aH(dx)`.
//!
//! The main sampler is the inverse-Lévy (Ferguson–Klass) series: with unit
//! Poisson arrivals `Γ₁ < Γ₂ < …`, the jumps are `N⁻¹(Γ_i/a)` in decreasing
//! order. A Dirichlet-process stick-breaking sampler is kept as an exact
//! cross-check.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rand::{Rng, RngExt};
use rand_distr::{Exp1, Open01, Poisson};
use serde::{Deserialize, Serialize};

use crate::base::BaseMeasure;
use crate::error::{Error, Result};
use crate::levy::LevyFamily;
use crate::measure::{Provenance, RandomProbabilityMeasure};

/// Hard cap on the number of series terms in adaptive mode.
pub const MAX_SERIES_ATOMS: usize = 2_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TruncationMode {
    /// Keep the `T` largest jumps.
    FixedCount(usize),
    /// Stop at the first jump `v` with `a·∫₀^v s ρ(ds) ≤ ε`; `None` uses
    /// `ε = 10⁻²/a²`.
    AdaptiveMass(Option<f64>),
}

/// What to do with the jumps below the truncation point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RemainderPolicy {
    /// Discard them.
    Drop,
    /// Replace them by a Poisson number of equal atoms at `H`-distributed
    /// locations, matching the mean and variance of the discarded mass on
    /// every set.
    #[default]
    MomentMatched,
}

/// Serialized as its string form, e.g. `fixed:3000` or `adaptive:1e-4`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationSpec {
    pub mode: TruncationMode,
    pub remainder: RemainderPolicy,
    /// Series terms actually simulated (filled by the sampler).
    pub realized_count: usize,
    /// `a·∫₀^{v_last} s ρ(ds)`, the expected mass of the unsimulated jumps.
    pub leftover_bound: f64,
}

impl TruncationSpec {
    pub fn fixed(count: usize) -> Self {
        Self::from_mode(TruncationMode::FixedCount(count))
    }

    pub fn adaptive(epsilon: Option<f64>) -> Self {
        Self::from_mode(TruncationMode::AdaptiveMass(epsilon))
    }

    pub fn from_mode(mode: TruncationMode) -> Self {
        TruncationSpec { mode, remainder: RemainderPolicy::default(), realized_count: 0, leftover_bound: 0.0 }
    }

    pub fn with_remainder(self, remainder: RemainderPolicy) -> Self {
        TruncationSpec { remainder, ..self }
    }

    pub fn check(&self) -> Result<()> {
        match self.mode {
            TruncationMode::FixedCount(_) => Ok(()),
            TruncationMode::AdaptiveMass(Some(eps)) if !(eps > 0.0 && eps.is_finite()) => {
                Err(Error::domain(format!("adaptive truncation needs epsilon > 0, got {eps}")))
            }
            TruncationMode::AdaptiveMass(_) => Ok(()),
        }
    }

    /// Mass threshold used at concentration `a`, if adaptive.
    pub fn epsilon_for(&self, a: f64) -> Option<f64> {
        match self.mode {
            TruncationMode::FixedCount(_) => None,
            TruncationMode::AdaptiveMass(eps) => Some(eps.unwrap_or(1e-2 / (a * a))),
        }
    }
}

impl fmt::Display for TruncationSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.mode {
            TruncationMode::FixedCount(t) => write!(f, "fixed:{t}")?,
            TruncationMode::AdaptiveMass(None) => write!(f, "adaptive")?,
            TruncationMode::AdaptiveMass(Some(e)) => write!(f, "adaptive:{e:e}")?,
        }
        if self.remainder == RemainderPolicy::Drop {
            write!(f, ":drop")?;
        }
        Ok(())
    }
}

impl FromStr for TruncationSpec {
    type Err = Error;

    /// `fixed:T`, `adaptive`, `adaptive:EPS`, each optionally suffixed by
    /// `:drop` to disable remainder compensation.
    fn from_str(s: &str) -> Result<Self> {
        let mut parts: Vec<&str> = s.trim().split(':').collect();
        let mut remainder = RemainderPolicy::MomentMatched;
        if parts.len() > 1 && parts.last() == Some(&"drop") {
            parts.pop();
            remainder = RemainderPolicy::Drop;
        }
        let mode = match parts.as_slice() {
            ["fixed", t] => TruncationMode::FixedCount(
                t.parse().map_err(|_| Error::Parse(format!("fixed truncation needs an integer count, got '{t}'")))?,
            ),
            ["adaptive"] => TruncationMode::AdaptiveMass(None),
            ["adaptive", e] => TruncationMode::AdaptiveMass(Some(
                e.parse().map_err(|_| Error::Parse(format!("adaptive truncation needs a number, got '{e}'")))?,
            )),
            _ => {
                return Err(Error::Parse(format!(
                    "unknown truncation '{s}' (expected fixed:T or adaptive[:EPS], optionally with :drop)"
                )))
            }
        };
        let spec = TruncationSpec::from_mode(mode).with_remainder(remainder);
        spec.check()?;
        Ok(spec)
    }
}

impl Serialize for TruncationSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for TruncationSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub location: f64,
    pub jump: f64,
}

/// A truncated CRM realization.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomicMeasure {
    atoms: Vec<Atom>,
    total_mass: f64,
    series_len: usize,
    family: LevyFamily,
    a: f64,
    truncation: TruncationSpec,
    seed: Option<u64>,
}

impl AtomicMeasure {
    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    /// Number of leading atoms that come from the series itself; the rest
    /// are remainder compensation atoms.
    pub fn series_len(&self) -> usize {
        self.series_len
    }

    pub fn total_mass(&self) -> f64 {
        self.total_mass
    }

    pub fn family(&self) -> &LevyFamily {
        &self.family
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn truncation(&self) -> &TruncationSpec {
        &self.truncation
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    /// Tag the measure with the seed of the stream that produced it.
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    /// `μ̃((l, r])`.
    pub fn mass_of(&self, l: f64, r: f64) -> f64 {
        self.atoms.iter().filter(|at| at.location > l && at.location <= r).map(|at| at.jump).sum()
    }

    pub fn provenance(&self) -> Provenance {
        Provenance {
            family: self.family.to_string(),
            a: self.a,
            seed: self.seed,
            truncation: self.truncation.to_string(),
        }
    }

    /// CSV with a `#` header line carrying family, a, seed, truncation and
    /// leftover bound, then `index,location,jump`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        let seed = self.seed.map_or_else(|| "none".to_string(), |s| s.to_string());
        writeln!(
            out,
            "# family={},a={},seed={},truncation={},leftover_bound={:e}",
            self.family, self.a, seed, self.truncation, self.truncation.leftover_bound
        )?;
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["index", "location", "jump"])?;
        for (i, at) in self.atoms.iter().enumerate() {
            w.write_record([i.to_string(), at.location.to_string(), at.jump.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

fn check_a(a: f64) -> Result<()> {
    if a > 0.0 && a.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("concentration parameter must be finite and positive, got {a}")))
    }
}

/// `a·∫₀^v s ρ(ds)`, the expected total mass of all jumps below `v`.
pub fn leftover_mass_bound(family: &LevyFamily, a: f64, v: f64) -> Result<f64> {
    check_a(a)?;
    Ok(a * family.truncated_moment(1, v)?)
}

/// Jump heights `N⁻¹(Γ_i/a)` for given arrival times. With shared arrivals
/// the jumps are pathwise increasing in `a`. Stops early if a jump would
/// underflow.
pub fn jumps_from_arrivals(family: &LevyFamily, a: f64, arrivals: &[f64]) -> Result<Vec<f64>> {
    check_a(a)?;
    let mut out = Vec::with_capacity(arrivals.len());
    let mut prev: Option<(f64, f64)> = None;
    for &g in arrivals {
        let u = g / a;
        let v = match prev {
            None => family.inverse_tail_mass(u),
            Some((up, vp)) if up <= u => family.inverse_tail_mass_after(u, up, vp),
            Some(_) => return Err(Error::domain("arrival times must be nondecreasing")),
        };
        match v {
            Ok(v) => {
                out.push(v);
                prev = Some((u, v));
            }
            Err(Error::Underflow { .. }) => break,
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

/// Inverse-Lévy series for `μ̃_a`.
pub fn sample_crm_ferguson_klass<R: Rng + ?Sized>(
    family: &LevyFamily,
    a: f64,
    base: &BaseMeasure,
    trunc: &TruncationSpec,
    rng: &mut R,
) -> Result<AtomicMeasure> {
    check_a(a)?;
    trunc.check()?;
    let (limit, epsilon) = match trunc.mode {
        TruncationMode::FixedCount(t) => (t, None),
        TruncationMode::AdaptiveMass(_) => (MAX_SERIES_ATOMS, trunc.epsilon_for(a)),
    };
    let mut atoms: Vec<Atom> = Vec::with_capacity(limit.min(1 << 16));
    let mut arrival = 0.0;
    let mut prev: Option<(f64, f64)> = None;
    let mut reached = epsilon.is_none();
    while atoms.len() < limit {
        let e: f64 = rng.sample(Exp1);
        arrival += e;
        let u = arrival / a;
        let v = match prev {
            None => family.inverse_tail_mass(u),
            Some((up, vp)) => family.inverse_tail_mass_after(u, up, vp),
        };
        let mut v = match v {
            Ok(v) => v,
            Err(Error::Underflow { .. }) => {
                reached = true;
                break;
            }
            Err(err) => return Err(err),
        };
        if let Some((_, vp)) = prev {
            // ties from rounding would break strict ordering
            if v >= vp {
                v = vp.next_down();
                if !(v > 0.0) {
                    reached = true;
                    break;
                }
            }
        }
        let location = base.sample(rng);
        atoms.push(Atom { location, jump: v });
        prev = Some((u, v));
        if let Some(eps) = epsilon {
            if a * family.truncated_moment(1, v)? <= eps {
                reached = true;
                break;
            }
        }
    }
    if !reached {
        let v = prev.map_or(f64::NAN, |p| p.1);
        return Err(Error::Numerical {
            message: format!("adaptive truncation did not reach its mass target within {MAX_SERIES_ATOMS} jumps"),
            estimate: a * family.truncated_moment(1, v).unwrap_or(f64::NAN),
        });
    }
    if atoms.is_empty() {
        return Err(Error::EmptyMeasure);
    }
    let series_len = atoms.len();
    let v_last = atoms[series_len - 1].jump;
    let leftover = a * family.truncated_moment(1, v_last)?;
    if trunc.remainder == RemainderPolicy::MomentMatched && leftover > 0.0 {
        let second = a * family.truncated_moment(2, v_last)?;
        if second > 0.0 && second.is_finite() {
            let weight = second / leftover;
            let rate = leftover * leftover / second;
            let k = Poisson::new(rate)
                .map_err(|e| Error::Numerical { message: format!("remainder atom count: {e}"), estimate: rate })?;
            let count: f64 = rng.sample(k);
            for _ in 0..count as u64 {
                atoms.push(Atom { location: base.sample(rng), jump: weight });
            }
        }
    }
    let total_mass = atoms.iter().map(|at| at.jump).sum();
    Ok(AtomicMeasure {
        atoms,
        total_mass,
        series_len,
        family: family.clone(),
        a,
        truncation: TruncationSpec { realized_count: series_len, leftover_bound: leftover, ..*trunc },
        seed: None,
    })
}

/// `μ̃_a = Σ_{m=1}^{⌊a⌋} μ_m + μ_Δ`: independent unit-parameter blocks plus a
/// fractional block with parameter `Δ = a − ⌊a⌋` (skipped when `Δ = 0`).
pub fn sample_crm_decomposed<R: Rng + ?Sized>(
    family: &LevyFamily,
    a: f64,
    base: &BaseMeasure,
    trunc_per_block: &TruncationSpec,
    rng: &mut R,
) -> Result<AtomicMeasure> {
    check_a(a)?;
    let whole = a.floor();
    let delta = a - whole;
    let mut params: Vec<f64> = vec![1.0; whole as usize];
    if delta > 0.0 {
        params.push(delta);
    }
    let mut atoms = Vec::new();
    let mut realized = 0;
    let mut leftover = 0.0;
    for p in params {
        let block = sample_crm_ferguson_klass(family, p, base, trunc_per_block, rng)?;
        realized += block.truncation.realized_count;
        leftover += block.truncation.leftover_bound;
        atoms.extend_from_slice(&block.atoms);
    }
    let total_mass = atoms.iter().map(|at| at.jump).sum();
    let series_len = atoms.len();
    Ok(AtomicMeasure {
        atoms,
        total_mass,
        series_len,
        family: family.clone(),
        a,
        truncation: TruncationSpec { realized_count: realized, leftover_bound: leftover, ..*trunc_per_block },
        seed: None,
    })
}

/// Number of unit blocks and whether a fractional block is drawn.
pub fn block_layout(a: f64) -> (usize, bool) {
    let whole = a.floor();
    (whole as usize, a > whole)
}

/// Dirichlet process by stick-breaking with `T` sticks, `v_j ~ Beta(1, a)`,
/// renormalized so the weights sum to one.
pub fn sample_dp_stick_breaking<R: Rng + ?Sized>(
    a: f64,
    base: &BaseMeasure,
    sticks: usize,
    rng: &mut R,
) -> Result<RandomProbabilityMeasure> {
    check_a(a)?;
    if sticks == 0 {
        return Err(Error::domain("stick-breaking needs at least one stick"));
    }
    // 1 − v = U^{1/a}, so log of the remaining stick is Σ ln(U_j)/a
    let mut log_rest = 0.0f64;
    let mut atoms = Vec::with_capacity(sticks);
    for _ in 0..sticks {
        let u: f64 = rng.sample(Open01);
        let log_keep = u.ln() / a;
        let v = -log_keep.exp_m1();
        let w = v * log_rest.exp();
        let x = base.sample(rng);
        atoms.push((x, w));
        log_rest += log_keep;
    }
    if atoms.iter().all(|&(_, w)| !(w > 0.0)) {
        atoms[0].1 = 1.0;
    }
    let provenance = Provenance { family: "dirichlet".into(), a, seed: None, truncation: format!("stick:{sticks}") };
    RandomProbabilityMeasure::from_weighted(atoms, provenance)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::replicate_rng;

    #[test]
    fn fixed_count_gives_sorted_jumps() {
        let fam = LevyFamily::dirichlet();
        let trunc = TruncationSpec::fixed(500).with_remainder(RemainderPolicy::Drop);
        let mu =
            sample_crm_ferguson_klass(&fam, 5.0, &BaseMeasure::UniformOn01, &trunc, &mut replicate_rng(1, 0)).unwrap();
        assert_eq!(mu.atoms().len(), 500);
        assert_eq!(mu.truncation().realized_count, 500);
        assert!(mu.atoms().windows(2).all(|w| w[0].jump > w[1].jump));
        let sum: f64 = mu.atoms().iter().map(|a| a.jump).sum();
        assert_eq!(sum, mu.total_mass());
        let v_last = mu.atoms()[499].jump;
        let lb = mu.truncation().leftover_bound;
        assert!((lb - 5.0 * (1.0 - (-v_last).exp())).abs() <= 1e-15 * 5.0);
    }

    #[test]
    fn zero_count_is_empty_measure() {
        let fam = LevyFamily::nig();
        let r = sample_crm_ferguson_klass(
            &fam,
            2.0,
            &BaseMeasure::UniformOn01,
            &TruncationSpec::fixed(0),
            &mut replicate_rng(1, 0),
        );
        assert!(matches!(r, Err(Error::EmptyMeasure)));
    }

    #[test]
    fn small_a_stops_before_underflow() {
        let fam = LevyFamily::dirichlet();
        let trunc = TruncationSpec::fixed(3000);
        let mu =
            sample_crm_ferguson_klass(&fam, 2.0, &BaseMeasure::UniformOn01, &trunc, &mut replicate_rng(3, 0)).unwrap();
        assert!(mu.truncation().realized_count < 3000);
        assert!(mu.atoms().iter().all(|a| a.jump > 0.0));
    }

    #[test]
    fn adaptive_reaches_target() {
        let fam = LevyFamily::dirichlet();
        let trunc = TruncationSpec::adaptive(None).with_remainder(RemainderPolicy::Drop);
        let a = 10.0;
        let mu =
            sample_crm_ferguson_klass(&fam, a, &BaseMeasure::UniformOn01, &trunc, &mut replicate_rng(5, 2)).unwrap();
        assert!(mu.truncation().leftover_bound <= 1e-2 / (a * a));
        let n = mu.atoms().len();
        let before = leftover_mass_bound(&fam, a, mu.atoms()[n - 2].jump).unwrap();
        assert!(before > 1e-2 / (a * a));
    }

    #[test]
    fn same_stream_same_measure() {
        let fam: LevyFamily = "ngg:0.4:1".parse().unwrap();
        let trunc = TruncationSpec::fixed(300);
        let draw = || {
            sample_crm_ferguson_klass(&fam, 7.5, &BaseMeasure::UniformOn01, &trunc, &mut replicate_rng(11, 4)).unwrap()
        };
        assert_eq!(draw(), draw());
    }

    #[test]
    fn decomposed_block_layout() {
        assert_eq!(block_layout(3.0), (3, false));
        assert_eq!(block_layout(3.7), (3, true));
        assert_eq!(block_layout(0.4), (0, true));
        let fam = LevyFamily::dirichlet();
        let trunc = TruncationSpec::fixed(50).with_remainder(RemainderPolicy::Drop);
        let mu = sample_crm_decomposed(&fam, 3.0, &BaseMeasure::UniformOn01, &trunc, &mut replicate_rng(2, 0)).unwrap();
        assert_eq!(mu.atoms().len(), 150);
        assert_eq!(mu.truncation().realized_count, 150);
    }

    #[test]
    fn leftover_bound_examples() {
        let fam = LevyFamily::dirichlet();
        let v = leftover_mass_bound(&fam, 1.0, 1.0).unwrap();
        assert!((v - (1.0 - (-1.0f64).exp())).abs() < 1e-15);
        assert_eq!(leftover_mass_bound(&fam, 3.0, 0.0).unwrap(), 0.0);
        // quadrature cross-check
        let q = fam.truncated_moment_by_quadrature(1, 0.37).unwrap();
        assert!((leftover_mass_bound(&fam, 2.0, 0.37).unwrap() - 2.0 * q).abs() < 1e-9);
    }

    #[test]
    fn stick_breaking_single_and_weights() {
        let h = BaseMeasure::UniformOn01;
        let p = sample_dp_stick_breaking(4.0, &h, 1, &mut replicate_rng(0, 0)).unwrap();
        assert_eq!(p.len(), 1);
        assert_eq!(p.weights(), &[1.0]);
        let p = sample_dp_stick_breaking(4.0, &h, 200, &mut replicate_rng(0, 1)).unwrap();
        let s: f64 = p.weights().iter().sum();
        assert!((s - 1.0).abs() < 1e-12);
        assert!(sample_dp_stick_breaking(4.0, &h, 0, &mut replicate_rng(0, 1)).is_err());
    }

    #[test]
    fn truncation_grammar() {
        assert_eq!("fixed:3000".parse::<TruncationSpec>().unwrap(), TruncationSpec::fixed(3000));
        let t: TruncationSpec = "adaptive:1e-4:drop".parse().unwrap();
        assert_eq!(t.mode, TruncationMode::AdaptiveMass(Some(1e-4)));
        assert_eq!(t.remainder, RemainderPolicy::Drop);
        assert_eq!(t.to_string().parse::<TruncationSpec>().unwrap(), t);
        assert_eq!(TruncationSpec::adaptive(None).epsilon_for(10.0), Some(1e-4));
        for bad in ["fixed", "fixed:x", "adaptive:-1", "stick:3"] {
            assert!(bad.parse::<TruncationSpec>().is_err(), "{bad}");
        }
    }

    #[test]
    fn csv_header() {
        let fam = LevyFamily::dirichlet();
        let mu = sample_crm_ferguson_klass(
            &fam,
            1.0,
            &BaseMeasure::UniformOn01,
            &TruncationSpec::fixed(3).with_remainder(RemainderPolicy::Drop),
            &mut replicate_rng(1, 0),
        )
        .unwrap()
        .with_seed(1);
        let mut buf = Vec::new();
        mu.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert!(lines[0].starts_with("# family=dirichlet,a=1,seed=1,truncation=fixed:3:drop,leftover_bound="));
        assert_eq!(lines[1], "index,location,jump");
        assert_eq!(lines.len(), 5);
    }
}
