//! Random probability measures `P = μ̃/μ̃(X)` and their evaluation on
//! intervals, partitions, grids and quantile levels.
//!
//! Intervals are half-open, `(l, r]`.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::base::BaseMeasure;
use crate::crm::AtomicMeasure;
use crate::error::{Error, Result};

/// Where a measure came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub family: String,
    pub a: f64,
    pub seed: Option<u64>,
    pub truncation: String,
}

/// Atoms sorted by location, with cumulative weights for `O(log n)` queries.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomProbabilityMeasure {
    locations: Vec<f64>,
    weights: Vec<f64>,
    cumulative: Vec<f64>,
    provenance: Provenance,
}

impl RandomProbabilityMeasure {
    /// Build from `(location, weight)` pairs whose weights are positive; the
    /// weights are rescaled to sum to one.
    pub fn from_weighted(mut atoms: Vec<(f64, f64)>, provenance: Provenance) -> Result<Self> {
        atoms.retain(|&(_, w)| w > 0.0);
        let total: f64 = atoms.iter().map(|&(_, w)| w).sum();
        if atoms.is_empty() || !(total > 0.0) {
            return Err(Error::ZeroMass);
        }
        atoms.sort_by(|x, y| x.0.total_cmp(&y.0));
        let locations: Vec<f64> = atoms.iter().map(|&(x, _)| x).collect();
        let weights: Vec<f64> = atoms.iter().map(|&(_, w)| w / total).collect();
        let mut acc = 0.0;
        let cumulative = weights
            .iter()
            .map(|w| {
                acc += w;
                acc
            })
            .collect();
        Ok(RandomProbabilityMeasure { locations, weights, cumulative, provenance })
    }

    pub fn len(&self) -> usize {
        self.locations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.locations.is_empty()
    }

    pub fn locations(&self) -> &[f64] {
        &self.locations
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn max_weight(&self) -> f64 {
        self.weights.iter().copied().fold(0.0, f64::max)
    }

    /// `P((−∞, x])`.
    pub fn cdf(&self, x: f64) -> f64 {
        let n = self.locations.partition_point(|&l| l <= x);
        if n == 0 {
            0.0
        } else {
            self.cumulative[n - 1]
        }
    }

    /// `P((l, r])`.
    pub fn measure_of_interval(&self, l: f64, r: f64) -> Result<f64> {
        if !(l < r) {
            return Err(Error::domain(format!("interval needs l < r, got ({l}, {r}]")));
        }
        Ok((self.cdf(r) - self.cdf(l)).clamp(0.0, 1.0))
    }

    pub fn evaluate_partition(&self, part: &Partition) -> PartitionValues {
        let cdfs: Vec<f64> = part.boundaries.iter().map(|&b| self.cdf(b)).collect();
        let values: Vec<f64> = cdfs.windows(2).map(|w| (w[1] - w[0]).max(0.0)).collect();
        let covered: f64 = values.iter().sum();
        PartitionValues { values, remainder: (1.0 - covered).max(0.0), covering: part.covers_support() }
    }

    /// `P((−∞, x_k])` for each grid point; the grid must be sorted.
    pub fn empirical_cdf(&self, grid: &[f64]) -> Result<Vec<f64>> {
        if grid.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::domain("grid must be sorted"));
        }
        Ok(grid.iter().map(|&x| self.cdf(x)).collect())
    }

    /// Generalized inverse `inf{t : P((−∞, t]) ≥ u}`.
    pub fn quantile(&self, u: f64) -> Result<f64> {
        if !(u > 0.0 && u < 1.0) {
            return Err(Error::domain(format!("quantile level must lie in (0,1), got {u}")));
        }
        let i = self.cumulative.partition_point(|&c| c < u).min(self.len() - 1);
        Ok(self.locations[i])
    }

    /// CSV with a `#` provenance line followed by `index,location,weight`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        let p = &self.provenance;
        let seed = p.seed.map_or_else(|| "none".to_string(), |s| s.to_string());
        writeln!(out, "# family={},a={},seed={},truncation={}", p.family, p.a, seed, p.truncation)?;
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["index", "location", "weight"])?;
        for (i, (x, wt)) in self.locations.iter().zip(&self.weights).enumerate() {
            w.write_record([i.to_string(), x.to_string(), wt.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// `P = μ̃/μ̃(X)`.
pub fn normalize(mu: &AtomicMeasure) -> Result<RandomProbabilityMeasure> {
    let total = mu.total_mass();
    if mu.atoms().is_empty() || !(total > 0.0) {
        return Err(Error::ZeroMass);
    }
    let atoms = mu.atoms().iter().map(|a| (a.location, a.jump)).collect();
    RandomProbabilityMeasure::from_weighted(atoms, mu.provenance())
}

/// Disjoint half-open intervals `(l₀,l₁], (l₁,l₂], …` with their `H` masses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Partition {
    boundaries: Vec<f64>,
    h_values: Vec<f64>,
}

impl Partition {
    pub fn from_cuts(cuts: &[f64], base: &BaseMeasure) -> Result<Self> {
        if cuts.len() < 2 {
            return Err(Error::domain("a partition needs at least two cut points"));
        }
        if cuts.iter().any(|c| c.is_nan()) || cuts.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::domain(format!("partition cuts must be strictly increasing, got {cuts:?}")));
        }
        let h_values = cuts.windows(2).map(|w| base.mass(w[0], w[1])).collect();
        Ok(Partition { boundaries: cuts.to_vec(), h_values })
    }

    pub fn boundaries(&self) -> &[f64] {
        &self.boundaries
    }

    pub fn h_values(&self) -> &[f64] {
        &self.h_values
    }

    pub fn len(&self) -> usize {
        self.h_values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.h_values.is_empty()
    }

    pub fn covers_support(&self) -> bool {
        (self.h_values.iter().sum::<f64>() - 1.0).abs() <= 1e-12
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PartitionValues {
    pub values: Vec<f64>,
    /// Mass outside the partition; zero up to rounding for covering partitions.
    pub remainder: f64,
    pub covering: bool,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn prov() -> Provenance {
        Provenance { family: "dirichlet".into(), a: 1.0, seed: None, truncation: "fixed:2".into() }
    }

    fn two_point() -> RandomProbabilityMeasure {
        RandomProbabilityMeasure::from_weighted(vec![(0.8, 0.5), (0.2, 0.5)], prov()).unwrap()
    }

    #[test]
    fn interval_and_cdf() {
        let p = two_point();
        assert_eq!(p.measure_of_interval(0.0, 0.5).unwrap(), 0.5);
        assert_eq!(p.measure_of_interval(-1.0, 2.0).unwrap(), 1.0);
        assert_eq!(p.measure_of_interval(0.3, 0.6).unwrap(), 0.0);
        assert!(p.measure_of_interval(0.5, 0.5).is_err());
        assert_eq!(p.empirical_cdf(&[0.5]).unwrap(), vec![0.5]);
        assert_eq!(p.empirical_cdf(&[0.0, 0.1]).unwrap(), vec![0.0, 0.0]);
        assert_eq!(p.empirical_cdf(&[0.9, 1.0]).unwrap(), vec![1.0, 1.0]);
        // a location on the right endpoint belongs to the interval
        assert_eq!(p.measure_of_interval(0.1, 0.2).unwrap(), 0.5);
    }

    #[test]
    fn quantiles() {
        let p = two_point();
        assert_eq!(p.quantile(0.3).unwrap(), 0.2);
        assert_eq!(p.quantile(0.7).unwrap(), 0.8);
        assert_eq!(p.quantile(0.5).unwrap(), 0.2);
        assert!(p.quantile(1.0).is_err());
    }

    #[test]
    fn partition_evaluation() {
        let h = BaseMeasure::UniformOn01;
        let part = Partition::from_cuts(&[0.0, 0.3, 0.7, 1.0], &h).unwrap();
        let p = RandomProbabilityMeasure::from_weighted(vec![(0.5, 1.0)], prov()).unwrap();
        let v = p.evaluate_partition(&part);
        assert_eq!(v.values, vec![0.0, 1.0, 0.0]);
        assert!(v.covering);
        let partial = Partition::from_cuts(&[0.0, 0.3], &h).unwrap();
        let v = p.evaluate_partition(&partial);
        assert!(!v.covering);
        assert_eq!(v.remainder, 1.0);
        assert!(Partition::from_cuts(&[0.0, 0.5, 0.5], &h).is_err());
    }

    #[test]
    fn zero_mass_rejected() {
        assert!(matches!(RandomProbabilityMeasure::from_weighted(vec![], prov()), Err(Error::ZeroMass)));
        assert!(matches!(RandomProbabilityMeasure::from_weighted(vec![(0.1, 0.0)], prov()), Err(Error::ZeroMass)));
    }

    #[test]
    fn csv_has_provenance_line() {
        let mut buf = Vec::new();
        two_point().write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "# family=dirichlet,a=1,seed=none,truncation=fixed:2");
        assert_eq!(lines.next().unwrap(), "index,location,weight");
        assert_eq!(lines.next().unwrap(), "0,0.2,0.5");
    }
}
