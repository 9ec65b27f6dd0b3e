//! Demand scheduling.
//!
//! SMPSA, RMPSA and DMPSA share a first-come first-serve queue: the front
//! demand asks for one path, and goes back to the rear if it got one or
//! leaves the queue for good otherwise. They differ only in how the path is
//! chosen. MCSA instead serves the demand with the smallest s-t min-cut
//! first and gives it up to `min(C_src, C_dst)` paths at once.

use std::collections::VecDeque;

use super::{allocate_path, min_distance_path, path_flexibility, random_entangled_path, shortest_entangled_path};
use super::{Path, Route, RoutingSchedule};
use crate::error::Result;
use crate::net::{validate_demands, Demand, EntangledGraph};
use crate::rng::RngStream;

/// Called at the top of every FCFS loop iteration with the schedule so far
/// and the demands still queued (front first).
pub trait QueueObserver {
    fn observe(&mut self, schedule: &RoutingSchedule, queue: &VecDeque<Demand>);
}

impl<F: FnMut(&RoutingSchedule, &VecDeque<Demand>)> QueueObserver for F {
    fn observe(&mut self, schedule: &RoutingSchedule, queue: &VecDeque<Demand>) {
        self(schedule, queue)
    }
}

impl QueueObserver for () {
    fn observe(&mut self, _: &RoutingSchedule, _: &VecDeque<Demand>) {}
}

/// FCFS round-robin driver. `select` is asked for one route per service;
/// the graph it sees reflects every allocation made so far.
pub fn fcfs_schedule<S, O>(g: &EntangledGraph, demands: &[Demand], mut select: S, mut observer: O) -> Result<RoutingSchedule>
where
    S: FnMut(&EntangledGraph, &Demand) -> Result<Option<Route>>,
    O: QueueObserver,
{
    validate_demands(demands, g.node_count())?;
    let mut work = g.clone();
    let mut schedule = RoutingSchedule::new(demands);
    let mut queue: VecDeque<Demand> = demands.iter().copied().collect();
    loop {
        observer.observe(&schedule, &queue);
        let Some(d) = queue.pop_front() else { break };
        if let Some(route) = select(&work, &d)? {
            allocate_path(&mut schedule, &mut work, Path::new(d.id, route))?;
            queue.push_back(d);
        }
    }
    schedule.finalize();
    Ok(schedule)
}

/// Sequential multi-path scheduling: FCFS with minimum-hop paths.
pub fn smpsa_schedule(g: &EntangledGraph, demands: &[Demand]) -> Result<RoutingSchedule> {
    fcfs_schedule(g, demands, |g, d| shortest_entangled_path(g, d.src, d.dst), ())
}

/// FCFS with a randomized depth-first path per service. Each demand draws
/// from its own sub-stream of `rng`, keyed by demand id.
pub fn rmpsa_schedule(g: &EntangledGraph, demands: &[Demand], rng: &RngStream) -> Result<RoutingSchedule> {
    let mut streams: Vec<(usize, RngStream)> = demands.iter().map(|d| (d.id, rng.substream(d.id as u64))).collect();
    fcfs_schedule(
        g,
        demands,
        |g, d| {
            let (_, stream) = streams.iter_mut().find(|(id, _)| *id == d.id).expect("stream per demand");
            random_entangled_path(g, d.src, d.dst, stream)
        },
        (),
    )
}

/// FCFS with paths of least total physical distance.
pub fn dmpsa_schedule(g: &EntangledGraph, demands: &[Demand]) -> Result<RoutingSchedule> {
    fcfs_schedule(g, demands, |g, d| min_distance_path(g, d.src, d.dst), ())
}

/// Min-cut based multi-path scheduling.
///
/// Each round recomputes the path flexibility of every remaining demand on
/// the current graph, removes the least flexible one (lowest id on ties) and
/// allocates up to `min(C_src, C_dst)` shortest paths to it, stopping early
/// when none is left.
pub fn mcsa_schedule(g: &EntangledGraph, demands: &[Demand]) -> Result<RoutingSchedule> {
    validate_demands(demands, g.node_count())?;
    let mut work = g.clone();
    let mut schedule = RoutingSchedule::new(demands);
    let mut remaining = demands.to_vec();
    while !remaining.is_empty() {
        let mut pick = 0;
        let mut pick_key = (usize::MAX, usize::MAX);
        for (i, d) in remaining.iter().enumerate() {
            let key = (path_flexibility(&work, d)?, d.id);
            if key < pick_key {
                pick = i;
                pick_key = key;
            }
        }
        let d = remaining.remove(pick);
        let quota = work.capacity(d.src).min(work.capacity(d.dst));
        for _ in 0..quota {
            match shortest_entangled_path(&work, d.src, d.dst)? {
                Some(route) => allocate_path(&mut schedule, &mut work, Path::new(d.id, route))?,
                None => break,
            }
        }
    }
    schedule.finalize();
    Ok(schedule)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::net::{PhysicalLink, PhysicalNetwork, QuantumNode};

    fn demand(id: usize, src: usize, dst: usize) -> Demand {
        Demand::new(id, src, dst).unwrap()
    }

    #[test]
    fn smpsa_two_disjoint_routes() {
        // s=0, t=3 via 1 or via 2
        let g = EntangledGraph::with_links(4, &[(0, 1), (1, 3), (0, 2), (2, 3)]).unwrap();
        let s = smpsa_schedule(&g, &[demand(0, 0, 3)]).unwrap();
        assert_eq!(s.k(), 2);
        let nodes: Vec<_> = s.paths().map(|p| p.nodes.clone()).collect();
        assert_eq!(nodes, vec![vec![0, 1, 3], vec![0, 2, 3]]);
        s.validate(&g).unwrap();
    }

    #[test]
    fn smpsa_disconnected() {
        let g = EntangledGraph::with_links(4, &[(0, 1), (2, 3)]).unwrap();
        let s = smpsa_schedule(&g, &[demand(0, 0, 3)]).unwrap();
        assert_eq!(s.k(), 0);
        assert_eq!(s.total_paths(), 0);
    }

    #[test]
    fn smpsa_shared_bridge_goes_to_first_in_queue() {
        // 0 = 1 - 2 with leaves 3 and 4 on node 2; both demands need link 1-2.
        let g = EntangledGraph::with_links(5, &[(0, 1), (1, 2), (2, 3), (2, 4), (1, 0)]).unwrap();
        let ds = [demand(0, 0, 3), demand(1, 1, 4)];
        let s = smpsa_schedule(&g, &ds).unwrap();
        assert_eq!(s.paths_for(0).unwrap().len(), 1);
        assert_eq!(s.paths_for(1).unwrap().len(), 0);
        assert_eq!(s.k(), 0);
    }

    /// Demand 0 (0 -> 3) has three disjoint two-hop routes via 1, 2 and 4.
    /// Demand 1 (5 -> 0) hangs off node 1 by a single link, so its only
    /// route 5-1-0 shares link 0-1 with demand 0's lexicographically first
    /// shortest path.
    fn bridge_instance() -> (EntangledGraph, [Demand; 2]) {
        let g = EntangledGraph::with_links(6, &[(0, 1), (1, 3), (0, 2), (2, 3), (0, 4), (4, 3), (1, 5)]).unwrap();
        (g, [demand(0, 0, 3), demand(1, 5, 0)])
    }

    #[test]
    fn mcsa_serves_bridge_demand_first() {
        let (g, ds) = bridge_instance();
        assert_eq!(path_flexibility(&g, &ds[0]).unwrap(), 3);
        assert_eq!(path_flexibility(&g, &ds[1]).unwrap(), 1);

        // FCFS: demand 0 takes 0-1-3 first and cuts demand 1 off.
        let smpsa = smpsa_schedule(&g, &ds).unwrap();
        assert_eq!(smpsa.paths_for(0).unwrap()[0].nodes, vec![0, 1, 3]);
        assert_eq!(smpsa.paths_for(1).unwrap().len(), 0);
        assert_eq!(smpsa.k(), 0);

        let mcsa = mcsa_schedule(&g, &ds).unwrap();
        assert_eq!(mcsa.paths_for(1).unwrap()[0].nodes, vec![5, 1, 0]);
        assert_eq!(mcsa.paths_for(0).unwrap().len(), 2);
        assert_eq!(mcsa.k(), 1);
        mcsa.validate(&g).unwrap();
    }

    #[test]
    fn mcsa_quota_is_min_endpoint_capacity() {
        // A valid graph never has more links at a node than its capacity, so
        // the quota binding below the available paths needs an unchecked graph.
        let net = PhysicalNetwork::new(
            vec![QuantumNode { id: 0, capacity: 2 }, QuantumNode { id: 1, capacity: 2 }],
            vec![PhysicalLink { u: 0, v: 1, distance_km: 1.0 }],
        )
        .unwrap();
        let g = EntangledGraph::from_pairs_unchecked(net, &[(0, 1), (0, 1), (0, 1)]);
        assert_eq!(path_flexibility(&g, &demand(0, 0, 1)).unwrap(), 3);
        let s = mcsa_schedule(&g, &[demand(0, 0, 1)]).unwrap();
        assert_eq!(s.total_paths(), 2);
        assert_eq!(s.k(), 2);
    }

    #[test]
    fn mcsa_quota_uses_configured_capacity() {
        let net = PhysicalNetwork::new(
            vec![
                QuantumNode { id: 0, capacity: 3 },
                QuantumNode { id: 1, capacity: 6 },
                QuantumNode { id: 2, capacity: 2 },
            ],
            vec![
                PhysicalLink { u: 0, v: 1, distance_km: 1.0 },
                PhysicalLink { u: 1, v: 2, distance_km: 1.0 },
            ],
        )
        .unwrap();
        let g = EntangledGraph::from_pairs(net, &[(0, 1), (0, 1), (0, 1), (1, 2), (1, 2)]).unwrap();
        assert_eq!(mcsa_schedule(&g, &[demand(0, 0, 1)]).unwrap().k(), 3);
        assert_eq!(mcsa_schedule(&g, &[demand(0, 2, 1)]).unwrap().k(), 2);
        assert_eq!(mcsa_schedule(&g, &[demand(0, 0, 2)]).unwrap().k(), 2);
    }

    #[test]
    fn mcsa_zero_flexibility_first() {
        let g = EntangledGraph::with_links(4, &[(0, 1)]).unwrap();
        let ds = [demand(0, 0, 1), demand(1, 2, 3)];
        let s = mcsa_schedule(&g, &ds).unwrap();
        assert_eq!(s.k(), 0);
        assert_eq!(s.paths_for(0).unwrap().len(), 1);
    }

    #[test]
    fn rmpsa_unique_path_and_determinism() {
        let g = EntangledGraph::with_links(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        let s = rmpsa_schedule(&g, &[demand(0, 0, 3)], &RngStream::new(1)).unwrap();
        assert_eq!(s.paths().next().unwrap().nodes, vec![0, 1, 2, 3]);
        let pairs: Vec<_> = (0..10).flat_map(|a| (a + 1..10).map(move |b| (a, b))).collect();
        let g = EntangledGraph::with_links(10, &pairs).unwrap();
        let ds = [demand(0, 0, 9), demand(1, 3, 4)];
        let a = rmpsa_schedule(&g, &ds, &RngStream::new(17)).unwrap();
        let b = rmpsa_schedule(&g, &ds, &RngStream::new(17)).unwrap();
        assert_eq!(a.to_json(), b.to_json());
        a.validate(&g).unwrap();
    }

    #[test]
    fn rmpsa_disconnected_is_dropped() {
        let g = EntangledGraph::with_links(4, &[(0, 1), (2, 3)]).unwrap();
        let s = rmpsa_schedule(&g, &[demand(0, 0, 3)], &RngStream::new(1)).unwrap();
        assert_eq!(s.total_paths(), 0);
    }

    #[test]
    fn dmpsa_prefers_short_fiber() {
        let g = EntangledGraph::with_weighted_links(3, &[(0, 1, 1.0), (1, 2, 1.0), (0, 2, 5.0)]).unwrap();
        let s = dmpsa_schedule(&g, &[demand(0, 0, 2)]).unwrap();
        let first = s.paths().next().unwrap();
        assert_eq!(first.nodes, vec![0, 1, 2]);
        assert_eq!(s.k(), 2);
    }

    #[test]
    fn dmpsa_matches_smpsa_hops_on_uniform_distances() {
        let g = EntangledGraph::with_links(6, &[(0, 1), (1, 2), (2, 5), (0, 3), (3, 5), (0, 4), (4, 1)]).unwrap();
        let a = dmpsa_schedule(&g, &[demand(0, 0, 5)]).unwrap();
        let b = smpsa_schedule(&g, &[demand(0, 0, 5)]).unwrap();
        assert_eq!(a.paths().next().unwrap().hop_count(), b.paths().next().unwrap().hop_count());
    }

    #[test]
    fn fcfs_observer_sees_fair_counts() {
        let pairs: Vec<_> = (0..8).flat_map(|a| (a + 1..8).map(move |b| (a, b))).collect();
        let g = EntangledGraph::with_links(8, &pairs).unwrap();
        let ds = [demand(0, 0, 7), demand(1, 1, 6), demand(2, 2, 5)];
        let mut steps = 0;
        fcfs_schedule(
            &g,
            &ds,
            |g, d| shortest_entangled_path(g, d.src, d.dst),
            |s: &RoutingSchedule, q: &VecDeque<Demand>| {
                steps += 1;
                let counts: Vec<_> = q.iter().map(|d| s.paths_for(d.id).unwrap().len()).collect();
                if let (Some(lo), Some(hi)) = (counts.iter().min(), counts.iter().max()) {
                    assert!(hi - lo <= 1);
                }
            },
        )
        .unwrap();
        assert!(steps > 3);
    }

    #[test]
    fn invalid_demands_rejected() {
        let g = EntangledGraph::with_links(2, &[(0, 1)]).unwrap();
        assert!(smpsa_schedule(&g, &[]).is_err());
        assert!(mcsa_schedule(&g, &[Demand { id: 0, src: 0, dst: 5 }]).is_err());
    }
}
