//! CSV tables. Floats use Rust's shortest round-trip formatting, so output
//! is byte-stable across runs and platforms.

use std::io::{self, Write};

use super::run::{AggregateRow, ResultRow};
use crate::fidelity::FidelityRow;

pub const RESULTS_HEADER: &str = "seed,algorithm,sweep_value,k,avg_hop_count,depletion_ratio,total_paths,runtime_ms";
pub const AGGREGATE_HEADER: &str =
    "sweep_value,algorithm,iterations,mean_k,stderr_k,mean_avg_hop_count,mean_depletion_ratio,mean_total_paths";
pub const FIDELITY_HEADER: &str = "channel,rate_hz,distance_km,fidelity";

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Raw rows. Wall-clock `runtime_ms` is only written when `timing` is set;
/// otherwise the column is left empty to keep output reproducible.
pub fn write_results<W: Write>(mut w: W, rows: &[ResultRow], timing: bool) -> io::Result<()> {
    writeln!(w, "{RESULTS_HEADER}")?;
    for r in rows {
        let runtime = if timing { format!("{:.3}", r.runtime_ms) } else { String::new() };
        writeln!(
            w,
            "{},{},{},{},{},{},{},{}",
            r.seed,
            r.algorithm,
            opt(r.sweep_value),
            r.k,
            r.avg_hop_count,
            r.depletion_ratio,
            r.total_paths,
            runtime
        )?;
    }
    Ok(())
}

pub fn write_aggregates<W: Write>(mut w: W, rows: &[AggregateRow]) -> io::Result<()> {
    writeln!(w, "{AGGREGATE_HEADER}")?;
    for a in rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{}",
            opt(a.sweep_value),
            a.algorithm,
            a.iterations,
            a.mean_k,
            a.stderr_k,
            a.mean_avg_hop_count,
            a.mean_depletion_ratio,
            a.mean_total_paths
        )?;
    }
    Ok(())
}

pub fn write_fidelity<W: Write>(mut w: W, rows: &[FidelityRow]) -> io::Result<()> {
    writeln!(w, "{FIDELITY_HEADER}")?;
    for r in rows {
        writeln!(w, "{},{},{},{:.6}", r.channel.name(), r.rate_hz, r.distance_km, r.fidelity)?;
    }
    Ok(())
}
