//! Quantum network model: physical topology, qubit capacities, demands and
//! the entangled multigraph produced by one round of link generation.

mod entangle;
mod topology;

pub use entangle::{generate_entanglement, slot_pairs, EntangledGraph, EntangledLink};
pub use topology::{generate_grid, generate_topology, grid_node};

use std::collections::{BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

pub type NodeId = usize;
pub type LinkId = usize;
pub type DemandId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuantumNode {
    pub id: NodeId,
    /// Number of qubits the node can hold.
    pub capacity: u32,
}

/// Fiber between two adjacent nodes. Endpoints are stored with `u < v`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalLink {
    pub u: NodeId,
    pub v: NodeId,
    pub distance_km: f64,
}

impl PhysicalLink {
    pub fn new(a: NodeId, b: NodeId, distance_km: f64) -> Result<Self> {
        if a == b {
            return Err(invalid(format!("self-loop on node {a}")));
        }
        if !(distance_km >= 0.0) || !distance_km.is_finite() {
            return Err(invalid(format!("link distance {distance_km} km")));
        }
        Ok(Self {
            u: a.min(b),
            v: a.max(b),
            distance_km,
        })
    }

    pub fn other(&self, end: NodeId) -> NodeId {
        if end == self.u {
            self.v
        } else {
            self.u
        }
    }
}

/// Nodes and fibers. Serializes as `{"nodes":[..],"links":[..]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PhysicalNetworkRepr")]
pub struct PhysicalNetwork {
    nodes: Vec<QuantumNode>,
    links: Vec<PhysicalLink>,
}

#[derive(Deserialize)]
struct PhysicalNetworkRepr {
    nodes: Vec<QuantumNode>,
    links: Vec<PhysicalLink>,
}

impl TryFrom<PhysicalNetworkRepr> for PhysicalNetwork {
    type Error = crate::Error;

    fn try_from(r: PhysicalNetworkRepr) -> Result<Self> {
        PhysicalNetwork::new(r.nodes, r.links)
    }
}

impl PhysicalNetwork {
    /// Validates ids, capacities and endpoints. Links are sorted by `(u, v)`.
    pub fn new(nodes: Vec<QuantumNode>, mut links: Vec<PhysicalLink>) -> Result<Self> {
        for (i, n) in nodes.iter().enumerate() {
            if n.id != i {
                return Err(invalid(format!("node ids must be contiguous, found {} at {i}", n.id)));
            }
            if n.capacity == 0 {
                return Err(invalid(format!("node {i} has zero capacity")));
            }
        }
        let mut seen = BTreeSet::new();
        for l in &mut links {
            *l = PhysicalLink::new(l.u, l.v, l.distance_km)?;
            if l.v >= nodes.len() {
                return Err(invalid(format!("link ({}, {}) references a missing node", l.u, l.v)));
            }
            if !seen.insert((l.u, l.v)) {
                return Err(invalid(format!("duplicate physical link ({}, {})", l.u, l.v)));
            }
        }
        links.sort_by_key(|l| (l.u, l.v));
        Ok(Self { nodes, links })
    }

    pub fn nodes(&self) -> &[QuantumNode] {
        &self.nodes
    }

    pub fn links(&self) -> &[PhysicalLink] {
        &self.links
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn capacity(&self, node: NodeId) -> u32 {
        self.nodes[node].capacity
    }

    /// C_N, the sum of all node capacities.
    pub fn total_capacity(&self) -> u64 {
        self.nodes.iter().map(|n| u64::from(n.capacity)).sum()
    }

    /// Per node, `(neighbor, physical link index)` in ascending neighbor order.
    pub fn adjacency(&self) -> Vec<Vec<(NodeId, usize)>> {
        let mut adj = vec![Vec::new(); self.nodes.len()];
        for (i, l) in self.links.iter().enumerate() {
            adj[l.u].push((l.v, i));
            adj[l.v].push((l.u, i));
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        adj
    }

    pub fn link_between(&self, a: NodeId, b: NodeId) -> Option<&PhysicalLink> {
        let key = (a.min(b), a.max(b));
        self.links
            .binary_search_by_key(&key, |l| (l.u, l.v))
            .ok()
            .map(|i| &self.links[i])
    }

    pub fn is_connected(&self) -> bool {
        if self.nodes.is_empty() {
            return true;
        }
        let adj = self.adjacency();
        let mut seen = vec![false; self.nodes.len()];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        let mut reached = 1;
        while let Some(u) = queue.pop_front() {
            for &(v, _) in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    reached += 1;
                    queue.push_back(v);
                }
            }
        }
        reached == self.nodes.len()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("network serialization cannot fail")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

/// A source-destination pair requesting entangled paths.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Demand {
    pub id: DemandId,
    pub src: NodeId,
    pub dst: NodeId,
}

impl Demand {
    pub fn new(id: DemandId, src: NodeId, dst: NodeId) -> Result<Self> {
        if src == dst {
            return Err(invalid(format!("demand {id} has src == dst == {src}")));
        }
        Ok(Self { id, src, dst })
    }
}

/// Checks a demand set against a network of `node_count` nodes.
pub fn validate_demands(demands: &[Demand], node_count: usize) -> Result<()> {
    if demands.is_empty() {
        return Err(invalid("demand set is empty"));
    }
    let mut ids = BTreeSet::new();
    for d in demands {
        if d.src == d.dst {
            return Err(invalid(format!("demand {} has src == dst", d.id)));
        }
        if d.src >= node_count || d.dst >= node_count {
            return Err(invalid(format!("demand {} references a missing node", d.id)));
        }
        if !ids.insert(d.id) {
            return Err(invalid(format!("duplicate demand id {}", d.id)));
        }
    }
    Ok(())
}

/// Per-attempt entanglement success probability `exp(-alpha * distance)`.
pub fn entanglement_probability(distance_km: f64, alpha_per_km: f64) -> Result<f64> {
    if !(distance_km >= 0.0) {
        return Err(invalid(format!("distance {distance_km} km")));
    }
    if !(alpha_per_km >= 0.0) {
        return Err(invalid(format!("attenuation {alpha_per_km} per km")));
    }
    if distance_km == 0.0 {
        return Ok(1.0);
    }
    Ok((-alpha_per_km * distance_km).exp())
}
