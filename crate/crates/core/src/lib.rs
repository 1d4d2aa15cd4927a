//! Simulation and verification toolkit for homogeneous normalized random
//! measures with independent increments (hNRMIs).
//!
//! The crate covers Lévy intensities and their functionals ([`levy`]),
//! truncated CRM samplers ([`crm`]), normalized measures ([`measure`]),
//! large-`a` asymptotics ([`asymptotics`]) and Monte Carlo experiment suites
//! ([`experiments`]).

// Negated float comparisons are deliberate: they reject NaN along with
// out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod asymptotics;
pub mod base;
pub mod crm;
pub mod error;
pub mod experiments;
pub mod levy;
pub mod measure;
pub mod quadrature;
pub mod rng;
pub mod special;
pub mod stats;

pub use asymptotics::{
    brownian_bridge_cov, clt_covariance, crm_moment, ia_order_check, quantile_limit_cov, scaled_d, scaled_q,
    va_moments, variance_integral_ia, CltCovariance, ScaledStatistics, VaMoments,
};
pub use base::{BaseMeasure, InverseCdf, NormalBase};
pub use crm::{
    jumps_from_arrivals, leftover_mass_bound, sample_crm_decomposed, sample_crm_ferguson_klass,
    sample_dp_stick_breaking, Atom, AtomicMeasure, RemainderPolicy, TruncationMode, TruncationSpec,
};
pub use error::{Error, Result};
pub use experiments::{
    run_berry_esseen, run_clt, run_fclt, run_figure1, run_quantile, run_slln, Assertion, ExperimentConfig,
    ExperimentResult, Row,
};
pub use levy::{LevyFamily, LevyKind, Moment, ValidationReport};
pub use measure::{normalize, Partition, PartitionValues, Provenance, RandomProbabilityMeasure};
pub use quadrature::{QuadratureSettings, UpperCutoff};
pub use rng::{replicate_rng, StreamRng};
pub use stats::{fit_rate_slope, ks_statistic, ks_two_sample, Histogram, RateFit};
