use std::cmp::Ordering;
use std::collections::{BinaryHeap, VecDeque};

use rand::seq::SliceRandom;

use super::Route;
use crate::error::{invalid, Result};
use crate::net::{EntangledGraph, NodeId};
use crate::rng::RngStream;

pub(crate) fn check_endpoints(g: &EntangledGraph, src: NodeId, dst: NodeId) -> Result<()> {
    if src == dst {
        return Err(invalid(format!("src and dst are both node {src}")));
    }
    if src >= g.node_count() || dst >= g.node_count() {
        return Err(invalid(format!("node pair ({src}, {dst}) outside the graph")));
    }
    Ok(())
}

/// Follows `next` from `src` to `dst`, taking the smallest free link per hop.
fn materialize(g: &EntangledGraph, src: NodeId, dst: NodeId, mut next: impl FnMut(NodeId) -> NodeId) -> Route {
    let mut nodes = vec![src];
    let mut edges = Vec::new();
    let mut cur = src;
    while cur != dst {
        let v = next(cur);
        edges.push(g.free_link_between(cur, v).expect("hop follows a free link"));
        nodes.push(v);
        cur = v;
    }
    Route { nodes, edges }
}

/// Minimum-hop path over unallocated links.
///
/// Among shortest paths the lexicographically smallest node sequence wins,
/// and each hop uses the smallest free link id between its endpoints.
pub fn shortest_entangled_path(g: &EntangledGraph, src: NodeId, dst: NodeId) -> Result<Option<Route>> {
    check_endpoints(g, src, dst)?;
    // Hop distance to dst, so a greedy walk from src can pick the smallest
    // neighbor that still lies on a shortest path.
    let mut dist = vec![usize::MAX; g.node_count()];
    dist[dst] = 0;
    let mut queue = VecDeque::from([dst]);
    while let Some(u) = queue.pop_front() {
        if u == src {
            break;
        }
        for (v, _) in g.neighbors(u) {
            if dist[v] == usize::MAX {
                dist[v] = dist[u] + 1;
                queue.push_back(v);
            }
        }
    }
    if dist[src] == usize::MAX {
        return Ok(None);
    }
    Ok(Some(materialize(g, src, dst, |cur| {
        g.neighbors(cur)
            .map(|(v, _)| v)
            .find(|&v| dist[v] != usize::MAX && dist[v] + 1 == dist[cur])
            .expect("bfs layer has a predecessor")
    })))
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Key {
    km: f64,
    hops: usize,
}

impl Key {
    const INF: Key = Key { km: f64::INFINITY, hops: usize::MAX };

    fn cmp(&self, other: &Key) -> Ordering {
        self.km.total_cmp(&other.km).then(self.hops.cmp(&other.hops))
    }
}

#[derive(PartialEq)]
struct Entry(Key, NodeId);

impl Eq for Entry {}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Entry {
    // reversed: BinaryHeap is a max-heap
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.cmp(&self.0).then(other.1.cmp(&self.1))
    }
}

/// Path of least total physical distance over unallocated links.
///
/// Ties on distance go to fewer hops, then to the smallest next node id.
pub fn min_distance_path(g: &EntangledGraph, src: NodeId, dst: NodeId) -> Result<Option<Route>> {
    check_endpoints(g, src, dst)?;
    let mut best = vec![Key::INF; g.node_count()];
    let mut done = vec![false; g.node_count()];
    best[dst] = Key { km: 0.0, hops: 0 };
    let mut heap = BinaryHeap::from([Entry(best[dst], dst)]);
    while let Some(Entry(key, u)) = heap.pop() {
        if done[u] {
            continue;
        }
        done[u] = true;
        if u == src {
            break;
        }
        for (v, l) in g.neighbors(u) {
            let cand = Key {
                km: key.km + g.link(l).physical_distance_km,
                hops: key.hops + 1,
            };
            if !done[v] && cand.cmp(&best[v]) == Ordering::Less {
                best[v] = cand;
                heap.push(Entry(cand, v));
            }
        }
    }
    if best[src].hops == usize::MAX {
        return Ok(None);
    }
    Ok(Some(materialize(g, src, dst, |cur| {
        g.neighbors(cur)
            .find(|&(v, l)| {
                best[v].hops != usize::MAX
                    && best[v].hops + 1 == best[cur].hops
                    && best[v].km + g.link(l).physical_distance_km == best[cur].km
            })
            .map(|(v, _)| v)
            .expect("settled node has a predecessor")
    })))
}

/// First simple path found by a depth-first search that visits each node's
/// neighbors in an order shuffled by `rng`.
pub fn random_entangled_path(
    g: &EntangledGraph,
    src: NodeId,
    dst: NodeId,
    rng: &mut RngStream,
) -> Result<Option<Route>> {
    check_endpoints(g, src, dst)?;
    let shuffled = |u: NodeId, rng: &mut RngStream| {
        let mut ns: Vec<NodeId> = g.neighbors(u).map(|(v, _)| v).collect();
        ns.dedup();
        ns.shuffle(rng);
        ns
    };
    let mut visited = vec![false; g.node_count()];
    visited[src] = true;
    let mut stack = vec![(src, shuffled(src, rng), 0usize)];
    while let Some((_, order, pos)) = stack.last_mut() {
        let Some(&v) = order.get(*pos) else {
            stack.pop();
            continue;
        };
        *pos += 1;
        if visited[v] {
            continue;
        }
        if v == dst {
            let mut trail: Vec<NodeId> = stack.iter().map(|f| f.0).collect();
            trail.push(dst);
            let mut hop = trail.iter().skip(1);
            return Ok(Some(materialize(g, src, dst, |_| *hop.next().unwrap())));
        }
        visited[v] = true;
        let order = shuffled(v, rng);
        stack.push((v, order, 0));
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Every simple path from src to dst as a node sequence.
    fn all_simple_paths(g: &EntangledGraph, src: NodeId, dst: NodeId) -> Vec<Vec<NodeId>> {
        fn go(g: &EntangledGraph, cur: NodeId, dst: NodeId, trail: &mut Vec<NodeId>, out: &mut Vec<Vec<NodeId>>) {
            if cur == dst {
                out.push(trail.clone());
                return;
            }
            let mut ns: Vec<_> = g.neighbors(cur).map(|(v, _)| v).collect();
            ns.dedup();
            for v in ns {
                if !trail.contains(&v) {
                    trail.push(v);
                    go(g, v, dst, trail, out);
                    trail.pop();
                }
            }
        }
        let mut out = Vec::new();
        go(g, src, dst, &mut vec![src], &mut out);
        out
    }

    #[test]
    fn single_link() {
        let g = EntangledGraph::with_links(2, &[(0, 1)]).unwrap();
        let r = shortest_entangled_path(&g, 0, 1).unwrap().unwrap();
        assert_eq!(r.nodes, vec![0, 1]);
        assert_eq!(r.hop_count(), 1);
    }

    #[test]
    fn four_cycle_prefers_lower_id_relay() {
        // s = 0, t = 3, relays 2 and 1 (listed high id first).
        let g = EntangledGraph::with_links(4, &[(0, 2), (2, 3), (0, 1), (1, 3)]).unwrap();
        let r = shortest_entangled_path(&g, 0, 3).unwrap().unwrap();
        let oracle = all_simple_paths(&g, 0, 3);
        let min_len = oracle.iter().map(Vec::len).min().unwrap();
        let expected = oracle.into_iter().filter(|p| p.len() == min_len).min().unwrap();
        assert_eq!(r.nodes, expected);
        assert_eq!(r.nodes, vec![0, 1, 3]);
        assert_eq!(r.edges, vec![2, 3]);
    }

    #[test]
    fn disconnected_is_none() {
        let g = EntangledGraph::with_links(4, &[(0, 1), (2, 3)]).unwrap();
        assert!(shortest_entangled_path(&g, 0, 3).unwrap().is_none());
        assert!(min_distance_path(&g, 0, 3).unwrap().is_none());
        assert!(random_entangled_path(&g, 0, 3, &mut RngStream::new(0)).unwrap().is_none());
    }

    #[test]
    fn same_endpoint_is_invalid() {
        let g = EntangledGraph::with_links(2, &[(0, 1)]).unwrap();
        assert!(shortest_entangled_path(&g, 1, 1).is_err());
        assert!(min_distance_path(&g, 0, 0).is_err());
        assert!(random_entangled_path(&g, 0, 0, &mut RngStream::new(0)).is_err());
        assert!(shortest_entangled_path(&g, 0, 9).is_err());
    }

    #[test]
    fn shortest_matches_enumeration_on_random_graphs() {
        let mut rng = RngStream::new(123);
        for _ in 0..300 {
            let n = 6;
            let pairs: Vec<_> = (0..9)
                .filter_map(|_| {
                    let a = rng.uniform_u64_inclusive(0, 5) as usize;
                    let b = rng.uniform_u64_inclusive(0, 5) as usize;
                    (a != b).then_some((a, b))
                })
                .collect();
            let g = EntangledGraph::with_links(n, &pairs).unwrap();
            let got = shortest_entangled_path(&g, 0, 5).unwrap();
            let oracle = all_simple_paths(&g, 0, 5);
            match got {
                None => assert!(oracle.is_empty()),
                Some(r) => {
                    let min_len = oracle.iter().map(Vec::len).min().unwrap();
                    let expected = oracle.into_iter().filter(|p| p.len() == min_len).min().unwrap();
                    assert_eq!(r.nodes, expected);
                }
            }
        }
    }

    #[test]
    fn min_distance_prefers_short_fiber() {
        // 0-1-2 at 1 km per hop versus direct 0-2 at 5 km.
        let g = EntangledGraph::with_weighted_links(3, &[(0, 1, 1.0), (1, 2, 1.0), (0, 2, 5.0)]).unwrap();
        let r = min_distance_path(&g, 0, 2).unwrap().unwrap();
        assert_eq!(r.nodes, vec![0, 1, 2]);
        let r = shortest_entangled_path(&g, 0, 2).unwrap().unwrap();
        assert_eq!(r.nodes, vec![0, 2]);
    }

    #[test]
    fn min_distance_matches_enumeration() {
        let mut rng = RngStream::new(9);
        for _ in 0..200 {
            let mut pairs = Vec::new();
            for a in 0..6usize {
                for b in a + 1..6 {
                    if rng.uniform() < 0.5 {
                        pairs.push((a, b, 1.0 + (rng.uniform() * 8.0).floor()));
                    }
                }
            }
            let g = EntangledGraph::with_weighted_links(6, &pairs).unwrap();
            let km = |p: &[NodeId]| -> f64 {
                p.windows(2)
                    .map(|w| g.physical().link_between(w[0], w[1]).unwrap().distance_km)
                    .sum()
            };
            let oracle = all_simple_paths(&g, 0, 5);
            match min_distance_path(&g, 0, 5).unwrap() {
                None => assert!(oracle.is_empty()),
                Some(r) => {
                    let best = oracle.iter().map(|p| km(p)).fold(f64::INFINITY, f64::min);
                    assert_eq!(km(&r.nodes), best);
                }
            }
        }
    }

    #[test]
    fn min_distance_handles_zero_length_links() {
        let g = EntangledGraph::with_weighted_links(4, &[(0, 1, 0.0), (1, 2, 0.0), (2, 3, 0.0), (0, 3, 0.0)]).unwrap();
        let r = min_distance_path(&g, 0, 2).unwrap().unwrap();
        assert_eq!(r.hop_count(), 2);
    }

    #[test]
    fn random_path_is_simple_and_reproducible() {
        let pairs: Vec<_> = (0..8).flat_map(|a| (a + 1..8).map(move |b| (a, b))).collect();
        let g = EntangledGraph::with_links(8, &pairs).unwrap();
        let a = random_entangled_path(&g, 0, 7, &mut RngStream::new(5)).unwrap().unwrap();
        let b = random_entangled_path(&g, 0, 7, &mut RngStream::new(5)).unwrap().unwrap();
        assert_eq!(a, b);
        let mut ns = a.nodes.clone();
        ns.sort();
        ns.dedup();
        assert_eq!(ns.len(), a.nodes.len());
        assert_eq!((a.nodes[0], *a.nodes.last().unwrap()), (0, 7));
    }

    #[test]
    fn random_path_unique_route() {
        let g = EntangledGraph::with_links(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        for seed in 0..10 {
            let r = random_entangled_path(&g, 0, 3, &mut RngStream::new(seed)).unwrap().unwrap();
            assert_eq!(r.nodes, vec![0, 1, 2, 3]);
        }
    }
}
