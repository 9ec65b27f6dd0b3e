use std::collections::{BTreeSet, VecDeque};

use super::search::check_endpoints;
use crate::error::Result;
use crate::net::{Demand, EntangledGraph, LinkId, NodeId};

/// Minimum s-t edge cut over the unallocated links.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CutResult {
    pub src: NodeId,
    pub dst: NodeId,
    pub cut_edge_ids: BTreeSet<LinkId>,
    /// |cut|, equal to the number of link-disjoint src-dst paths.
    pub flexibility: usize,
}

/// Residual network of an undirected unit-capacity multigraph. Link `i`
/// becomes arcs `2i` (u -> v) and `2i + 1` (v -> u), each the other's
/// reverse, both with capacity 1.
struct Residual {
    out: Vec<Vec<usize>>,
    head: Vec<NodeId>,
    cap: Vec<u8>,
    link: Vec<LinkId>,
}

impl Residual {
    fn new(g: &EntangledGraph) -> Self {
        let mut r = Residual {
            out: vec![Vec::new(); g.node_count()],
            head: Vec::new(),
            cap: Vec::new(),
            link: Vec::new(),
        };
        for l in g.links().iter().filter(|l| !l.allocated) {
            let a = r.head.len();
            r.head.extend([l.v, l.u]);
            r.cap.extend([1, 1]);
            r.link.push(l.id);
            r.out[l.u].push(a);
            r.out[l.v].push(a + 1);
        }
        r
    }

    /// BFS over positive-capacity arcs; returns the arc used to reach each node.
    fn search(&self, src: NodeId, stop_at: Option<NodeId>) -> Vec<Option<usize>> {
        let mut via = vec![None; self.out.len()];
        let mut seen = vec![false; self.out.len()];
        seen[src] = true;
        let mut queue = VecDeque::from([src]);
        while let Some(u) = queue.pop_front() {
            for &a in &self.out[u] {
                let v = self.head[a];
                if self.cap[a] > 0 && !seen[v] {
                    seen[v] = true;
                    via[v] = Some(a);
                    if Some(v) == stop_at {
                        return via;
                    }
                    queue.push_back(v);
                }
            }
        }
        via
    }
}

/// Exact s-t min-cut by shortest augmenting paths (Edmonds-Karp).
pub fn st_min_cut(g: &EntangledGraph, src: NodeId, dst: NodeId) -> Result<CutResult> {
    check_endpoints(g, src, dst)?;
    let mut r = Residual::new(g);
    let mut flow = 0;
    loop {
        let via = r.search(src, Some(dst));
        if via[dst].is_none() {
            break;
        }
        let mut v = dst;
        while v != src {
            let a = via[v].expect("augmenting path is connected");
            r.cap[a] -= 1;
            r.cap[a ^ 1] += 1;
            v = r.head[a ^ 1];
        }
        flow += 1;
    }
    let via = r.search(src, None);
    let reach = |n: NodeId| n == src || via[n].is_some();
    let cut_edge_ids: BTreeSet<LinkId> = r
        .link
        .iter()
        .enumerate()
        .filter(|&(i, _)| reach(r.head[2 * i]) != reach(r.head[2 * i + 1]))
        .map(|(_, &l)| l)
        .collect();
    debug_assert_eq!(cut_edge_ids.len(), flow);
    Ok(CutResult {
        src,
        dst,
        cut_edge_ids,
        flexibility: flow,
    })
}

/// F(s, d): size of the minimum cut separating the demand's endpoints.
pub fn path_flexibility(g: &EntangledGraph, demand: &Demand) -> Result<usize> {
    Ok(st_min_cut(g, demand.src, demand.dst)?.flexibility)
}
