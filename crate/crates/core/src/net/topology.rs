use super::{NodeId, PhysicalLink, PhysicalNetwork, QuantumNode};
use crate::error::{invalid, Error, Result};
use crate::rng::RngStream;

/// Number of G(n, p) draws before giving up on connectivity.
pub const CONNECT_RETRY_BUDGET: usize = 100;

/// Random connected topology.
///
/// Edges follow G(n, p) with `p = min(1, 2 ln n / n)`, redrawn until the
/// graph is connected. Distances are i.i.d. uniform on
/// `[0.5 d, 1.5 d]` and capacities i.i.d. uniform integers on
/// `[1, round(2 c - 1)]`, so both have the requested mean in expectation.
pub fn generate_topology(
    node_count: usize,
    avg_distance_km: f64,
    avg_capacity: f64,
    rng: &mut RngStream,
) -> Result<PhysicalNetwork> {
    if node_count < 2 {
        return Err(invalid(format!("node_count = {node_count}, need at least 2")));
    }
    if !(avg_distance_km > 0.0 && avg_distance_km.is_finite()) {
        return Err(invalid(format!("average distance {avg_distance_km} km")));
    }
    if !(avg_capacity >= 1.0 && avg_capacity.is_finite()) {
        return Err(invalid(format!("average capacity {avg_capacity}, need at least 1")));
    }
    let n = node_count as f64;
    let p = (2.0 * n.ln() / n).min(1.0);
    let pairs = connected_gnp(node_count, p, CONNECT_RETRY_BUDGET, rng)?;

    let links = pairs
        .into_iter()
        .map(|(u, v)| {
            let d = avg_distance_km * (0.5 + rng.uniform());
            PhysicalLink::new(u, v, d)
        })
        .collect::<Result<Vec<_>>>()?;
    let max_capacity = ((2.0 * avg_capacity - 1.0).round() as u64).max(1);
    let nodes = (0..node_count)
        .map(|id| QuantumNode {
            id,
            capacity: rng.uniform_u64_inclusive(1, max_capacity) as u32,
        })
        .collect();
    PhysicalNetwork::new(nodes, links)
}

/// Edge list `(u, v)` with `u < v` of a connected G(n, p) draw.
pub(crate) fn connected_gnp(
    n: usize,
    p: f64,
    budget: usize,
    rng: &mut RngStream,
) -> Result<Vec<(NodeId, NodeId)>> {
    for _ in 0..budget {
        let mut pairs = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                if rng.uniform() < p {
                    pairs.push((u, v));
                }
            }
        }
        if is_connected(n, &pairs) {
            return Ok(pairs);
        }
    }
    Err(Error::GenerationFailure {
        node_count: n,
        attempts: budget,
        edge_probability: p,
    })
}

fn is_connected(n: usize, pairs: &[(NodeId, NodeId)]) -> bool {
    // union-find with path halving
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let mut components = n;
    for &(u, v) in pairs {
        let (a, b) = (find(&mut parent, u), find(&mut parent, v));
        if a != b {
            parent[a] = b;
            components -= 1;
        }
    }
    components <= 1
}

/// Node id of grid cell `(row, col)`, row-major.
pub fn grid_node(cols: usize, row: usize, col: usize) -> NodeId {
    row * cols + col
}

/// `rows x cols` grid with uniform distance and capacity.
pub fn generate_grid(rows: usize, cols: usize, distance_km: f64, capacity: u32) -> Result<PhysicalNetwork> {
    if rows * cols < 2 {
        return Err(invalid(format!("grid {rows}x{cols} has fewer than 2 nodes")));
    }
    if capacity == 0 {
        return Err(invalid("grid capacity must be at least 1"));
    }
    let nodes = (0..rows * cols).map(|id| QuantumNode { id, capacity }).collect();
    let mut links = Vec::with_capacity(rows * (cols - 1) + cols * (rows - 1));
    for r in 0..rows {
        for c in 0..cols {
            let u = grid_node(cols, r, c);
            if c + 1 < cols {
                links.push(PhysicalLink::new(u, grid_node(cols, r, c + 1), distance_km)?);
            }
            if r + 1 < rows {
                links.push(PhysicalLink::new(u, grid_node(cols, r + 1, c), distance_km)?);
            }
        }
    }
    PhysicalNetwork::new(nodes, links)
}
