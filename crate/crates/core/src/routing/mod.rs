//! Entangled path search, s-t min-cut and demand scheduling.

mod mincut;
mod schedulers;
mod search;

pub use mincut::{path_flexibility, st_min_cut, CutResult};
pub use schedulers::{
    dmpsa_schedule, fcfs_schedule, mcsa_schedule, rmpsa_schedule, smpsa_schedule, QueueObserver,
};
pub use search::{min_distance_path, random_entangled_path, shortest_entangled_path};

use std::collections::BTreeSet;

use serde::ser::{SerializeStruct, Serializer};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::net::{Demand, DemandId, EntangledGraph, LinkId, NodeId};

/// Node and link sequence of a walk through the entangled graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Route {
    pub nodes: Vec<NodeId>,
    pub edges: Vec<LinkId>,
}

impl Route {
    pub fn hop_count(&self) -> usize {
        self.edges.len()
    }
}

/// An entangled path allocated to a demand.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Path {
    pub demand_id: DemandId,
    pub nodes: Vec<NodeId>,
    pub edges: Vec<LinkId>,
}

impl Path {
    pub fn new(demand_id: DemandId, route: Route) -> Self {
        Self {
            demand_id,
            nodes: route.nodes,
            edges: route.edges,
        }
    }

    pub fn hop_count(&self) -> usize {
        self.edges.len()
    }

    /// Checks simplicity, link adjacency and endpoints against `demand`.
    pub fn validate(&self, g: &EntangledGraph, demand: &Demand) -> Result<()> {
        let fail = |msg: String| Err(Error::InvariantViolation(format!("path of demand {}: {msg}", demand.id)));
        if self.edges.is_empty() || self.nodes.len() != self.edges.len() + 1 {
            return fail(format!("{} nodes for {} edges", self.nodes.len(), self.edges.len()));
        }
        if self.nodes[0] != demand.src || *self.nodes.last().unwrap() != demand.dst {
            return fail("endpoints do not match the demand".into());
        }
        let distinct: BTreeSet<_> = self.nodes.iter().collect();
        if distinct.len() != self.nodes.len() {
            return fail("repeated node".into());
        }
        for (i, &e) in self.edges.iter().enumerate() {
            let Some(link) = g.links().get(e) else {
                return fail(format!("unknown link {e}"));
            };
            let (a, b) = (self.nodes[i], self.nodes[i + 1]);
            if (link.u, link.v) != (a.min(b), a.max(b)) {
                return fail(format!("link {e} does not join {a} and {b}"));
            }
        }
        Ok(())
    }
}

impl Serialize for Path {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Path", 2)?;
        st.serialize_field("nodes", &self.nodes)?;
        st.serialize_field("edges", &self.edges)?;
        st.end()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DemandPaths {
    pub demand: Demand,
    /// Paths in allocation order.
    pub paths: Vec<Path>,
}

/// Paths allocated to each demand of the original demand set.
#[derive(Debug, Clone, PartialEq)]
pub struct RoutingSchedule {
    entries: Vec<DemandPaths>,
    k: usize,
    consumed: BTreeSet<LinkId>,
}

impl RoutingSchedule {
    /// Empty schedule covering `demands`, in their given order.
    pub fn new(demands: &[Demand]) -> Self {
        Self {
            entries: demands
                .iter()
                .map(|&demand| DemandPaths { demand, paths: Vec::new() })
                .collect(),
            k: 0,
            consumed: BTreeSet::new(),
        }
    }

    pub fn entries(&self) -> &[DemandPaths] {
        &self.entries
    }

    /// Minimum path count over all demands, as of the last [`finalize`](Self::finalize).
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn consumed_edge_ids(&self) -> &BTreeSet<LinkId> {
        &self.consumed
    }

    pub fn paths_for(&self, demand_id: DemandId) -> Option<&[Path]> {
        self.entries
            .iter()
            .find(|e| e.demand.id == demand_id)
            .map(|e| e.paths.as_slice())
    }

    pub fn paths(&self) -> impl Iterator<Item = &Path> {
        self.entries.iter().flat_map(|e| e.paths.iter())
    }

    pub fn total_paths(&self) -> usize {
        self.entries.iter().map(|e| e.paths.len()).sum()
    }

    pub fn total_hops(&self) -> usize {
        self.paths().map(Path::hop_count).sum()
    }

    /// Recomputes k = min |P(src, dst)| over every demand in the schedule.
    pub fn finalize(&mut self) -> usize {
        self.k = self.entries.iter().map(|e| e.paths.len()).min().unwrap_or(0);
        self.k
    }

    /// Checks path validity and link-disjointness against `g`.
    pub fn validate(&self, g: &EntangledGraph) -> Result<()> {
        let mut used = BTreeSet::new();
        for e in &self.entries {
            for p in &e.paths {
                if p.demand_id != e.demand.id {
                    return Err(Error::InvariantViolation(format!(
                        "path tagged with demand {} stored under demand {}",
                        p.demand_id, e.demand.id
                    )));
                }
                p.validate(g, &e.demand)?;
                for &l in &p.edges {
                    if !used.insert(l) {
                        return Err(Error::InvariantViolation(format!("link {l} used by two paths")));
                    }
                }
            }
        }
        if used != self.consumed {
            return Err(Error::InvariantViolation("consumed link set out of sync".into()));
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("schedule serialization cannot fail")
    }
}

impl Serialize for RoutingSchedule {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Entry<'a> {
            id: DemandId,
            paths: &'a [Path],
        }
        let demands: Vec<Entry> = self
            .entries
            .iter()
            .map(|e| Entry {
                id: e.demand.id,
                paths: &e.paths,
            })
            .collect();
        let mut st = s.serialize_struct("RoutingSchedule", 2)?;
        st.serialize_field("k", &self.k)?;
        st.serialize_field("demands", &demands)?;
        st.end()
    }
}

/// Consumes every link of `path` and records it under its demand.
///
/// Nothing is modified unless all links are currently unallocated.
pub fn allocate_path(schedule: &mut RoutingSchedule, g: &mut EntangledGraph, path: Path) -> Result<()> {
    let entry = schedule
        .entries
        .iter()
        .position(|e| e.demand.id == path.demand_id)
        .ok_or_else(|| Error::Inconsistency(format!("demand {} is not in the schedule", path.demand_id)))?;
    let mut seen = BTreeSet::new();
    for &l in &path.edges {
        if l >= g.edge_count() {
            return Err(Error::InvalidParameter(format!("unknown entangled link {l}")));
        }
        if g.is_allocated(l) || !seen.insert(l) {
            return Err(Error::DoubleAllocation(l));
        }
    }
    for &l in &path.edges {
        g.allocate(l)?;
        schedule.consumed.insert(l);
    }
    schedule.entries[entry].paths.push(path);
    Ok(())
}
