//! Boundary-demand check on fully entangled grids.

use rand::seq::index;

use crate::error::{invalid, Result};
use crate::net::{generate_grid, grid_node, Demand, EntangledGraph, PhysicalNetwork, QuantumNode};
use crate::rng::{tag, RngStream};
use crate::routing::{mcsa_schedule, path_flexibility};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridCheckReport {
    pub rows: usize,
    pub cols: usize,
    pub demands: Vec<Demand>,
    /// Min-cut of each demand on the untouched grid.
    pub flexibility: Vec<usize>,
    /// Paths MCSA allocated to each demand.
    pub paths_per_demand: Vec<usize>,
}

impl GridCheckReport {
    /// Every demand got at least one path from MCSA.
    pub fn passed(&self) -> bool {
        self.paths_per_demand.iter().all(|&p| p >= 1)
    }

    /// Every demand, taken alone, is connected on the fresh grid.
    pub fn paths_exist(&self) -> bool {
        self.flexibility.iter().all(|&f| f >= 1)
    }
}

/// Grid whose every node holds exactly one qubit per incident link, so the
/// entangled graph is the grid itself.
pub fn entangled_grid(rows: usize, cols: usize) -> Result<EntangledGraph> {
    let base = generate_grid(rows, cols, 1.0, 1)?;
    let mut degree = vec![0u32; base.node_count()];
    for l in base.links() {
        degree[l.u] += 1;
        degree[l.v] += 1;
    }
    let nodes = degree.iter().enumerate().map(|(id, &d)| QuantumNode { id, capacity: d.max(1) }).collect();
    let net = PhysicalNetwork::new(nodes, base.links().to_vec())?;
    let pairs: Vec<_> = net.links().iter().map(|l| (l.u, l.v)).collect();
    EntangledGraph::from_pairs(net, &pairs)
}

/// Samples `demand_count` demands from distinct top-row columns to distinct
/// bottom-row columns and schedules them with MCSA.
pub fn run_grid_check(rows: usize, cols: usize, demand_count: usize, seed: u64) -> Result<GridCheckReport> {
    if demand_count == 0 {
        return Err(invalid("grid check needs at least one demand"));
    }
    if rows < demand_count + 2 {
        return Err(invalid(format!("{rows} rows, need at least {}", demand_count + 2)));
    }
    if cols < demand_count {
        return Err(invalid(format!("{cols} columns cannot hold {demand_count} distinct demand columns")));
    }
    let g = entangled_grid(rows, cols)?;
    let mut rng = RngStream::new(seed).substream(tag::DEMANDS);
    let tops = index::sample(&mut rng, cols, demand_count).into_vec();
    let bottoms = index::sample(&mut rng, cols, demand_count).into_vec();
    let demands = tops
        .iter()
        .zip(&bottoms)
        .enumerate()
        .map(|(id, (&a, &b))| Demand::new(id, grid_node(cols, 0, a), grid_node(cols, rows - 1, b)))
        .collect::<Result<Vec<_>>>()?;
    let flexibility = demands.iter().map(|d| path_flexibility(&g, d)).collect::<Result<_>>()?;
    let schedule = mcsa_schedule(&g, &demands)?;
    schedule.validate(&g)?;
    let paths_per_demand = demands
        .iter()
        .map(|d| schedule.paths_for(d.id).map_or(0, |p| p.len()))
        .collect();
    Ok(GridCheckReport { rows, cols, demands, flexibility, paths_per_demand })
}
