//! Seeded instance generation and sweeps.

use std::sync::Arc;
use std::time::Instant;

use rand::seq::index;

use super::config::{Algorithm, ExperimentConfig, SweepAxis};
use crate::error::{Error, Result};
use crate::fidelity::{fidelity_sweep, FidelityRow};
use crate::metrics::MetricsReport;
use crate::net::{generate_entanglement, generate_topology, Demand, EntangledGraph, PhysicalNetwork};
use crate::rng::{child_seed, tag, RngStream};
use crate::routing::{dmpsa_schedule, mcsa_schedule, rmpsa_schedule, smpsa_schedule, RoutingSchedule};

/// Everything one iteration's algorithms share.
#[derive(Debug, Clone)]
pub struct Instance {
    pub seed: u64,
    pub network: Arc<PhysicalNetwork>,
    pub graph: EntangledGraph,
    pub demands: Vec<Demand>,
    pub routing_rng: RngStream,
}

/// `count` distinct unordered node pairs, uniformly without replacement,
/// in draw order. Each pair is `(lower id, higher id)`.
pub fn sample_demands(node_count: usize, count: usize, rng: &mut RngStream) -> Result<Vec<Demand>> {
    let pairs = node_count * node_count.saturating_sub(1) / 2;
    if count > pairs {
        return Err(Error::InvalidParameter(format!("{count} demands but only {pairs} node pairs")));
    }
    index::sample(rng, pairs, count)
        .into_iter()
        .enumerate()
        .map(|(id, mut m)| {
            // row u of the upper triangle holds n - 1 - u pairs
            let mut u = 0;
            while m >= node_count - 1 - u {
                m -= node_count - 1 - u;
                u += 1;
            }
            Demand::new(id, u, u + 1 + m)
        })
        .collect()
}

/// Topology, entanglement and demands for `seed`, each from its own
/// sub-stream.
pub fn build_instance(config: &ExperimentConfig, seed: u64) -> Result<Instance> {
    let root = RngStream::new(seed);
    let network = generate_topology(
        config.node_count,
        config.avg_distance_km,
        config.avg_capacity,
        &mut root.substream(tag::TOPOLOGY),
    )?;
    let graph = generate_entanglement(&network, config.alpha_per_km, &mut root.substream(tag::ENTANGLEMENT))?;
    let demands = sample_demands(config.node_count, config.demand_count, &mut root.substream(tag::DEMANDS))?;
    Ok(Instance {
        seed,
        network: Arc::new(network),
        graph,
        demands,
        routing_rng: root.substream(tag::RANDOM_ROUTING),
    })
}

pub fn schedule(algorithm: Algorithm, instance: &Instance) -> Result<RoutingSchedule> {
    let (g, d) = (&instance.graph, &instance.demands);
    match algorithm {
        Algorithm::Smpsa => smpsa_schedule(g, d),
        Algorithm::Mcsa => mcsa_schedule(g, d),
        Algorithm::Rmpsa => rmpsa_schedule(g, d, &instance.routing_rng),
        Algorithm::Dmpsa => dmpsa_schedule(g, d),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub seed: u64,
    pub algorithm: Algorithm,
    pub sweep_value: Option<f64>,
    pub iteration: usize,
    pub k: usize,
    pub avg_hop_count: f64,
    pub depletion_ratio: f64,
    pub total_paths: usize,
    pub runtime_ms: f64,
}

/// Runs and checks one algorithm, returning the schedule with its metrics.
pub fn evaluate(algorithm: Algorithm, instance: &Instance) -> Result<(RoutingSchedule, MetricsReport, f64)> {
    let start = Instant::now();
    let s = schedule(algorithm, instance)?;
    let runtime_ms = start.elapsed().as_secs_f64() * 1e3;
    s.validate(&instance.graph)?;
    let m = MetricsReport::compute(&s, &instance.demands, &instance.network)?;
    if m.consumed_qubits != 2 * s.total_hops() as u64 || !(0.0..=1.0).contains(&m.depletion_ratio) {
        return Err(Error::InvariantViolation(format!("{algorithm}: depletion accounting off")));
    }
    Ok((s, m, runtime_ms))
}

/// Every algorithm in `algorithms` on one instance. The graph is
/// fingerprinted before each run so a scheduler that mutated the shared
/// input is caught.
pub fn run_instance(
    instance: &Instance,
    algorithms: &[Algorithm],
    sweep_value: Option<f64>,
    iteration: usize,
) -> Result<Vec<ResultRow>> {
    let fingerprint = instance.graph.fingerprint();
    let mut rows = Vec::with_capacity(algorithms.len());
    for &algorithm in algorithms {
        if instance.graph.fingerprint() != fingerprint {
            return Err(Error::InvariantViolation(format!("entangled graph changed before {algorithm}")));
        }
        let (_, m, runtime_ms) = evaluate(algorithm, instance)?;
        rows.push(ResultRow {
            seed: instance.seed,
            algorithm,
            sweep_value,
            iteration,
            k: m.k,
            avg_hop_count: m.avg_hop_count,
            depletion_ratio: m.depletion_ratio,
            total_paths: m.total_paths,
            runtime_ms,
        });
    }
    Ok(rows)
}

/// Iteration `iteration_index` of the unswept config, one row per algorithm.
pub fn run_single(config: &ExperimentConfig, iteration_index: usize) -> Result<Vec<ResultRow>> {
    config.validate()?;
    let instance = build_instance(config, child_seed(config.master_seed, iteration_index as u64, 0))?;
    run_instance(&instance, &config.algorithm_set(), None, iteration_index)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    /// Falls back to sequential without the `parallel` feature.
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel
        } else {
            Execution::Sequential
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AggregateRow {
    pub sweep_value: Option<f64>,
    pub algorithm: Algorithm,
    pub iterations: usize,
    pub mean_k: f64,
    /// Standard error of `mean_k`, 0 for a single iteration.
    pub stderr_k: f64,
    pub mean_avg_hop_count: f64,
    pub mean_depletion_ratio: f64,
    pub mean_total_paths: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub rows: Vec<ResultRow>,
    pub aggregates: Vec<AggregateRow>,
}

struct Job {
    config: ExperimentConfig,
    sweep_value: Option<f64>,
    iteration: usize,
    seed: u64,
}

fn run_jobs(jobs: &[Job], algorithms: &[Algorithm], exec: Execution) -> Result<Vec<ResultRow>> {
    let one = |j: &Job| -> Result<Vec<ResultRow>> {
        let instance = build_instance(&j.config, j.seed)?;
        run_instance(&instance, algorithms, j.sweep_value, j.iteration)
    };
    let nested: Vec<Vec<ResultRow>> = match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            jobs.par_iter().map(one).collect::<Result<_>>()?
        }
        _ => jobs.iter().map(one).collect::<Result<_>>()?,
    };
    Ok(nested.into_iter().flatten().collect())
}

/// Per-algorithm means over `rows`, in algorithm order.
pub fn aggregate(rows: &[&ResultRow], sweep_value: Option<f64>, algorithms: &[Algorithm]) -> Vec<AggregateRow> {
    algorithms
        .iter()
        .map(|&algorithm| {
            let own: Vec<_> = rows.iter().filter(|r| r.algorithm == algorithm).collect();
            let n = own.len() as f64;
            let mean = |f: &dyn Fn(&ResultRow) -> f64| own.iter().map(|r| f(r)).sum::<f64>() / n;
            let mean_k = mean(&|r| r.k as f64);
            let stderr_k = if own.len() > 1 {
                let var = own.iter().map(|r| (r.k as f64 - mean_k).powi(2)).sum::<f64>() / (n - 1.0);
                (var / n).sqrt()
            } else {
                0.0
            };
            AggregateRow {
                sweep_value,
                algorithm,
                iterations: own.len(),
                mean_k,
                stderr_k,
                mean_avg_hop_count: mean(&|r| r.avg_hop_count),
                mean_depletion_ratio: mean(&|r| r.depletion_ratio),
                mean_total_paths: mean(&|r| r.total_paths as f64),
            }
        })
        .collect()
}

pub fn run_sweep(config: &ExperimentConfig) -> Result<SweepResult> {
    run_sweep_with(config, Execution::default())
}

/// Runs `iterations` instances per sweep value, seeded by
/// `child_seed(master_seed, iteration, value_index)`.
///
/// The `iterations` axis instead runs a single stream of
/// `max(values)` instances (value index 0). Each raw row is tagged with the
/// smallest checkpoint that includes it and every checkpoint aggregates the
/// running means up to it.
pub fn run_sweep_with(config: &ExperimentConfig, exec: Execution) -> Result<SweepResult> {
    config.validate()?;
    let axis = config
        .sweep_axis
        .ok_or_else(|| Error::Config("sweep needs sweep_axis and sweep_values".into()))?;
    let algorithms = config.algorithm_set();
    let mut jobs = Vec::new();
    if axis == SweepAxis::Iterations {
        let mut checkpoints: Vec<usize> = config
            .sweep_values
            .iter()
            .map(|&v| config.with_axis_value(axis, v).map(|c| c.iterations))
            .collect::<Result<_>>()?;
        checkpoints.sort_unstable();
        checkpoints.dedup();
        for i in 0..*checkpoints.last().expect("validated non-empty") {
            let tag = checkpoints.iter().find(|&&c| c > i).copied().expect("within last checkpoint");
            jobs.push(Job {
                config: config.clone(),
                sweep_value: Some(tag as f64),
                iteration: i,
                seed: child_seed(config.master_seed, i as u64, 0),
            });
        }
        let rows = run_jobs(&jobs, &algorithms, exec)?;
        let mut aggregates = Vec::new();
        for &c in &checkpoints {
            let upto: Vec<&ResultRow> = rows.iter().filter(|r| r.iteration < c).collect();
            aggregates.extend(aggregate(&upto, Some(c as f64), &algorithms));
        }
        return Ok(SweepResult { rows, aggregates });
    }
    for (vi, &v) in config.sweep_values.iter().enumerate() {
        let point = config.with_axis_value(axis, v)?;
        for i in 0..point.iterations {
            jobs.push(Job {
                config: point.clone(),
                sweep_value: Some(v),
                iteration: i,
                seed: child_seed(config.master_seed, i as u64, vi as u64),
            });
        }
    }
    let rows = run_jobs(&jobs, &algorithms, exec)?;
    let mut aggregates = Vec::new();
    let mut start = 0;
    for &v in &config.sweep_values {
        let end = start + rows[start..].iter().take_while(|r| r.sweep_value == Some(v)).count();
        let point: Vec<&ResultRow> = rows[start..end].iter().collect();
        aggregates.extend(aggregate(&point, Some(v), &algorithms));
        start = end;
    }
    Ok(SweepResult { rows, aggregates })
}

pub fn run_fidelity(config: &ExperimentConfig) -> Result<Vec<FidelityRow>> {
    let noise = config
        .noise
        .as_ref()
        .ok_or_else(|| Error::Config("fidelity mode needs a noise section".into()))?;
    noise.validate().map_err(|e| Error::Config(e.to_string()))?;
    fidelity_sweep(&noise.grid())
}
