use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{entanglement_probability, LinkId, NodeId, PhysicalLink, PhysicalNetwork, QuantumNode};
use crate::error::{invalid, Error, Result};
use crate::rng::RngStream;

/// One Bell pair shared by two adjacent nodes. Every link has unit weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntangledLink {
    pub id: LinkId,
    pub u: NodeId,
    pub v: NodeId,
    pub physical_distance_km: f64,
    pub allocated: bool,
}

impl EntangledLink {
    pub fn other(&self, end: NodeId) -> NodeId {
        if end == self.u {
            self.v
        } else {
            self.u
        }
    }
}

/// Entangled multigraph G_e over the nodes of a physical network.
///
/// Parallel links are allowed. Allocated links stay in the graph but are no
/// longer traversable.
#[derive(Debug, Clone)]
pub struct EntangledGraph {
    physical: Arc<PhysicalNetwork>,
    links: Vec<EntangledLink>,
    /// Per node, `(neighbor, link id)` sorted ascending.
    adjacency: Vec<Vec<(NodeId, LinkId)>>,
}

impl EntangledGraph {
    /// Builds a graph with one entangled link per entry of `pairs`; link ids
    /// follow the order of `pairs`. Every pair must lie on a physical link and
    /// no node may exceed its qubit capacity.
    pub fn from_pairs(physical: impl Into<Arc<PhysicalNetwork>>, pairs: &[(NodeId, NodeId)]) -> Result<Self> {
        Self::build(physical.into(), pairs, true)
    }

    /// Skips the capacity check, for exercising code paths that a valid
    /// graph cannot reach.
    #[cfg(test)]
    pub(crate) fn from_pairs_unchecked(physical: PhysicalNetwork, pairs: &[(NodeId, NodeId)]) -> Self {
        Self::build(Arc::new(physical), pairs, false).unwrap()
    }

    fn build(physical: Arc<PhysicalNetwork>, pairs: &[(NodeId, NodeId)], check_capacity: bool) -> Result<Self> {
        let n = physical.node_count();
        let mut links = Vec::with_capacity(pairs.len());
        let mut adjacency = vec![Vec::new(); n];
        for (id, &(a, b)) in pairs.iter().enumerate() {
            let pl = physical
                .link_between(a, b)
                .filter(|_| a != b && a.max(b) < n)
                .ok_or_else(|| invalid(format!("entangled pair ({a}, {b}) has no physical link")))?;
            links.push(EntangledLink {
                id,
                u: pl.u,
                v: pl.v,
                physical_distance_km: pl.distance_km,
                allocated: false,
            });
            adjacency[pl.u].push((pl.v, id));
            adjacency[pl.v].push((pl.u, id));
        }
        for (node, list) in adjacency.iter_mut().enumerate() {
            if check_capacity && list.len() > physical.capacity(node) as usize {
                return Err(invalid(format!(
                    "node {node} has {} entangled links but capacity {}",
                    list.len(),
                    physical.capacity(node)
                )));
            }
            list.sort_unstable();
        }
        Ok(Self {
            physical,
            links,
            adjacency,
        })
    }

    /// Convenience constructor for hand-built multigraphs: every node gets
    /// capacity `max(1, degree)` and every physical link 1 km.
    pub fn with_links(node_count: usize, pairs: &[(NodeId, NodeId)]) -> Result<Self> {
        let weighted: Vec<_> = pairs.iter().map(|&(u, v)| (u, v, 1.0)).collect();
        Self::with_weighted_links(node_count, &weighted)
    }

    /// Like [`with_links`](Self::with_links) with explicit physical distances.
    /// Parallel pairs must repeat the same distance.
    pub fn with_weighted_links(node_count: usize, pairs: &[(NodeId, NodeId, f64)]) -> Result<Self> {
        let mut degree = vec![0u32; node_count];
        let mut phys: Vec<PhysicalLink> = Vec::new();
        for &(u, v, d) in pairs {
            if u >= node_count || v >= node_count {
                return Err(invalid(format!("pair ({u}, {v}) references a missing node")));
            }
            let link = PhysicalLink::new(u, v, d)?;
            match phys.iter().find(|l| (l.u, l.v) == (link.u, link.v)) {
                Some(l) if l.distance_km != d => {
                    return Err(invalid(format!("parallel pair ({u}, {v}) with differing distances")))
                }
                Some(_) => {}
                None => phys.push(link),
            }
            degree[u] += 1;
            degree[v] += 1;
        }
        let nodes = (0..node_count)
            .map(|id| QuantumNode {
                id,
                capacity: degree[id].max(1),
            })
            .collect();
        let physical = PhysicalNetwork::new(nodes, phys)?;
        let plain: Vec<_> = pairs.iter().map(|&(u, v, _)| (u, v)).collect();
        Self::from_pairs(physical, &plain)
    }

    pub fn physical(&self) -> &PhysicalNetwork {
        &self.physical
    }

    pub fn nodes(&self) -> &[QuantumNode] {
        self.physical.nodes()
    }

    pub fn node_count(&self) -> usize {
        self.physical.node_count()
    }

    /// Configured qubit capacity C_u.
    pub fn capacity(&self, node: NodeId) -> u32 {
        self.physical.capacity(node)
    }

    pub fn links(&self) -> &[EntangledLink] {
        &self.links
    }

    pub fn link(&self, id: LinkId) -> &EntangledLink {
        &self.links[id]
    }

    pub fn edge_count(&self) -> usize {
        self.links.len()
    }

    pub fn unallocated_count(&self) -> usize {
        self.links.iter().filter(|l| !l.allocated).count()
    }

    /// Entangled degree of `node`, counting parallel and allocated links.
    pub fn degree(&self, node: NodeId) -> usize {
        self.adjacency[node].len()
    }

    /// Unallocated incident links as `(neighbor, link id)`, ascending.
    pub fn neighbors(&self, node: NodeId) -> impl Iterator<Item = (NodeId, LinkId)> + '_ {
        self.adjacency[node]
            .iter()
            .copied()
            .filter(move |&(_, l)| !self.links[l].allocated)
    }

    /// Smallest unallocated link id between `a` and `b`.
    pub fn free_link_between(&self, a: NodeId, b: NodeId) -> Option<LinkId> {
        self.neighbors(a).find(|&(n, _)| n == b).map(|(_, l)| l)
    }

    pub fn is_allocated(&self, id: LinkId) -> bool {
        self.links[id].allocated
    }

    /// Marks a link as consumed by a path.
    pub fn allocate(&mut self, id: LinkId) -> Result<()> {
        let link = self
            .links
            .get_mut(id)
            .ok_or_else(|| invalid(format!("unknown entangled link {id}")))?;
        if link.allocated {
            return Err(Error::DoubleAllocation(id));
        }
        link.allocated = true;
        Ok(())
    }

    pub fn to_json(&self) -> String {
        let repr = GraphRepr {
            nodes: self.physical.nodes().to_vec(),
            links: self.physical.links().to_vec(),
            entangled: self
                .links
                .iter()
                .map(|l| EntangledRepr { id: l.id, u: l.u, v: l.v })
                .collect(),
        };
        serde_json::to_string(&repr).expect("graph serialization cannot fail")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let repr: GraphRepr = serde_json::from_str(s)?;
        let physical = PhysicalNetwork::new(repr.nodes, repr.links)?;
        let mut entangled = repr.entangled;
        entangled.sort_by_key(|e| e.id);
        if entangled.iter().enumerate().any(|(i, e)| e.id != i) {
            return Err(invalid("entangled link ids must be contiguous from 0"));
        }
        let pairs: Vec<_> = entangled.iter().map(|e| (e.u, e.v)).collect();
        Self::from_pairs(physical, &pairs)
    }

    /// Hash of the serialized graph plus allocation flags; equal graphs hash
    /// equally within one process.
    pub fn fingerprint(&self) -> u64 {
        let mut h = DefaultHasher::new();
        self.to_json().hash(&mut h);
        for l in &self.links {
            l.allocated.hash(&mut h);
        }
        h.finish()
    }
}

#[derive(Serialize, Deserialize)]
struct GraphRepr {
    nodes: Vec<QuantumNode>,
    links: Vec<PhysicalLink>,
    entangled: Vec<EntangledRepr>,
}

#[derive(Serialize, Deserialize)]
struct EntangledRepr {
    id: LinkId,
    u: NodeId,
    v: NodeId,
}

/// Number of synchronized qubit-slot pairs on each physical link (in link
/// order).
///
/// Each node deals its `C_u` slots round-robin over its incident links in
/// ascending neighbor order, so a link to the neighbor of rank `i` among `d`
/// receives `C_u / d` slots, plus one if `i < C_u mod d`. A pair exists in
/// every round where both endpoints dealt a slot to the link, giving
/// `min(slots_u, slots_v)` pairs.
pub fn slot_pairs(net: &PhysicalNetwork) -> Vec<u32> {
    let adj = net.adjacency();
    let mut dealt = vec![[0u32; 2]; net.links().len()];
    for (node, list) in adj.iter().enumerate() {
        let d = list.len() as u32;
        if d == 0 {
            continue;
        }
        let cap = net.capacity(node);
        for (rank, &(_, link)) in list.iter().enumerate() {
            let slots = cap / d + u32::from((rank as u32) < cap % d);
            let side = usize::from(net.links()[link].u != node);
            dealt[link][side] = slots;
        }
    }
    dealt.into_iter().map(|[a, b]| a.min(b)).collect()
}

/// One synchronized round of entanglement generation.
///
/// Every slot pair makes a single attempt that succeeds when a uniform draw
/// falls below `exp(-alpha d_l)`. Draws are consumed in link order, one per
/// slot pair, independent of `alpha`.
pub fn generate_entanglement(net: &PhysicalNetwork, alpha_per_km: f64, rng: &mut RngStream) -> Result<EntangledGraph> {
    if !(alpha_per_km >= 0.0) {
        return Err(invalid(format!("attenuation {alpha_per_km} per km")));
    }
    let mut pairs = Vec::new();
    for (link, count) in net.links().iter().zip(slot_pairs(net)) {
        let p = entanglement_probability(link.distance_km, alpha_per_km)?;
        for _ in 0..count {
            if rng.uniform() < p {
                pairs.push((link.u, link.v));
            }
        }
    }
    EntangledGraph::from_pairs(net.clone(), &pairs)
}
