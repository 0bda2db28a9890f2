//! Independent runs in parallel. A single simulation stays sequential; only
//! whole runs are distributed. Without the `parallel` feature everything here
//! runs on the calling thread.

use crate::engine::{run, validate_trace, SimConfig, SimResult};
use crate::error::Result;
use crate::instances::Instance;

/// Order-preserving map, parallel when the `parallel` feature is on.
pub fn par_map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}

pub fn seq_map<T, R, F: Fn(&T) -> R>(items: &[T], f: F) -> Vec<R> {
    items.iter().map(f).collect()
}

/// Result of one batch entry: the run plus its violation count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BatchRun {
    pub result: SimResult,
    pub violations: usize,
}

fn one(instance: &Instance, config: &SimConfig) -> Result<BatchRun> {
    let (result, trace) = run(instance, config)?;
    let violations = validate_trace(instance, config, &trace).len();
    Ok(BatchRun { result, violations })
}

/// Runs and validates every instance under `config`, preserving order.
pub fn run_batch(instances: &[Instance], config: &SimConfig) -> Vec<Result<BatchRun>> {
    par_map(instances, |i| one(i, config))
}

pub fn run_batch_sequential(instances: &[Instance], config: &SimConfig) -> Vec<Result<BatchRun>> {
    seq_map(instances, |i| one(i, config))
}
