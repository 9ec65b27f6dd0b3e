//! Evaluation metrics of a routing schedule.
//!
//! A path of `h` hops holds one qubit at each end and two at every
//! intermediate repeater, `2h` in total. Qubits count as exhausted only when
//! their entangled link is allocated to a path.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::net::{Demand, PhysicalNetwork};
use crate::routing::RoutingSchedule;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricsReport {
    pub k: usize,
    pub avg_hop_count: f64,
    pub depletion_ratio: f64,
    pub total_paths: usize,
    /// C_N
    pub total_capacity: u64,
    pub consumed_qubits: u64,
}

impl MetricsReport {
    pub fn compute(schedule: &RoutingSchedule, demands: &[Demand], net: &PhysicalNetwork) -> Result<Self> {
        Ok(Self {
            k: compute_k(schedule, demands)?,
            avg_hop_count: avg_hop_count(schedule),
            depletion_ratio: qubit_depletion_ratio(schedule, net)?,
            total_paths: schedule.total_paths(),
            total_capacity: net.total_capacity(),
            consumed_qubits: consumed_qubits(schedule),
        })
    }
}

/// Minimum number of allocated paths over `demands`.
pub fn compute_k(schedule: &RoutingSchedule, demands: &[Demand]) -> Result<usize> {
    let mut k = usize::MAX;
    for d in demands {
        let paths = schedule
            .paths_for(d.id)
            .ok_or_else(|| Error::Inconsistency(format!("demand {} missing from schedule", d.id)))?;
        k = k.min(paths.len());
    }
    Ok(if demands.is_empty() { 0 } else { k })
}

/// Mean hop count over every allocated path, 0 when there are none.
pub fn avg_hop_count(schedule: &RoutingSchedule) -> f64 {
    match schedule.total_paths() {
        0 => 0.0,
        n => schedule.total_hops() as f64 / n as f64,
    }
}

pub fn consumed_qubits(schedule: &RoutingSchedule) -> u64 {
    2 * schedule.total_hops() as u64
}

/// `(C_N - C_N') / C_N` with `C_N - C_N' = 2 * total hops`.
pub fn qubit_depletion_ratio(schedule: &RoutingSchedule, net: &PhysicalNetwork) -> Result<f64> {
    let total = net.total_capacity();
    if total == 0 {
        return Err(Error::InvalidParameter("network has zero total capacity".into()));
    }
    let consumed = consumed_qubits(schedule);
    if consumed > total {
        return Err(Error::InvariantViolation(format!(
            "{consumed} qubits consumed out of {total}"
        )));
    }
    Ok(consumed as f64 / total as f64)
}
