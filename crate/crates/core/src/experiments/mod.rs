//! Monte Carlo suites for the large-`a` limit theorems.
//!
//! Replicate `r` always draws from the stream `(seed, r)`, independent of the
//! value of `a` and of the worker count; the same streams are reused across
//! `a` so results at different `a` are positively coupled, which sharpens
//! comparisons along `a_list`.

mod config;
mod result;
mod suites;

use std::thread;

pub use config::{
    Assertion, ExperimentConfig, DEFAULT_CUTS, DEFAULT_TRUNCATION, FIGURE1_A, FIGURE1_COEFFICIENTS, FIGURE1_REPLICATES,
    MIN_ASSERTED_REPLICATES,
};
pub use result::{
    CheckOutcome, ExperimentResult, HistogramRecord, Metadata, Row, WorkerLedger, SCHEMA_VERSION, STREAM_SCHEME,
};
pub use suites::{
    run_berry_esseen, run_clt, run_fclt, run_figure1, run_quantile, run_slln, DEFAULT_FCLT_GRID,
    DEFAULT_QUANTILE_LEVELS, SLLN_GRID_POINTS, SLLN_TEST_FUNCTIONS,
};

pub use crate::stats::{fit_rate_slope, ks_statistic};

use crate::error::Result;
use crate::rng::{replicate_rng, stream_id, StreamRng};

/// Contiguous replicate blocks, one per worker.
pub fn worker_blocks(seed: u64, replicates: usize, workers: usize) -> Vec<WorkerLedger> {
    let workers = workers.clamp(1, replicates.max(1));
    (0..workers)
        .map(|w| {
            let first = w * replicates / workers;
            let end = (w + 1) * replicates / workers;
            let streams = if end > first {
                format!("{} .. {}", stream_id(seed, first as u64), stream_id(seed, end as u64 - 1))
            } else {
                String::new()
            };
            WorkerLedger { worker: w, first_replicate: first, end_replicate: end, streams }
        })
        .collect()
}

/// Run `f` on every replicate with its own stream, spreading contiguous
/// blocks over scoped threads; output order is replicate order.
pub fn run_replicates<T, F>(seed: u64, replicates: usize, workers: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize, &mut StreamRng) -> Result<T> + Sync,
{
    let blocks = worker_blocks(seed, replicates, workers);
    let run_block = |b: &WorkerLedger| -> Result<Vec<T>> {
        (b.first_replicate..b.end_replicate).map(|r| f(r, &mut replicate_rng(seed, r as u64))).collect()
    };
    if blocks.len() == 1 {
        return run_block(&blocks[0]);
    }
    let parts: Vec<Result<Vec<T>>> = thread::scope(|s| {
        let handles: Vec<_> = blocks.iter().map(|b| s.spawn(|| run_block(b))).collect();
        handles.into_iter().map(|h| h.join().expect("worker thread panicked")).collect()
    });
    let mut out = Vec::with_capacity(replicates);
    for p in parts {
        out.extend(p?);
    }
    Ok(out)
}
