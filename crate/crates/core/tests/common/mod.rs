//! Independent oracles shared by the integration suites.
#![allow(dead_code)]

use entroute::fidelity::DensityMatrix;
use entroute::net::EntangledGraph;
use entroute::rng::RngStream;
use nalgebra::Matrix4;
use num_complex::Complex64;
use rand::Rng;

/// Random multigraph on 2..=max_nodes nodes with 0..=max_edges links
/// (parallel links allowed), plus a random distinct endpoint pair.
pub fn random_multigraph(rng: &mut RngStream, max_nodes: usize, max_edges: usize) -> (EntangledGraph, usize, usize) {
    let n = rng.gen_range(2..=max_nodes);
    let m = rng.gen_range(0..=max_edges);
    let mut pairs = Vec::with_capacity(m);
    for _ in 0..m {
        let u = rng.gen_range(0..n);
        let mut v = rng.gen_range(0..n - 1);
        if v >= u {
            v += 1;
        }
        pairs.push((u, v));
    }
    let g = EntangledGraph::with_links(n, &pairs).unwrap();
    let s = rng.gen_range(0..n);
    let mut t = rng.gen_range(0..n - 1);
    if t >= s {
        t += 1;
    }
    (g, s, t)
}

fn endpoints(g: &EntangledGraph) -> Vec<(usize, usize)> {
    g.links().iter().filter(|l| !l.allocated).map(|l| (l.u, l.v)).collect()
}

/// Edge-id bitmasks of every simple s-t path over the free links.
pub fn all_simple_paths(g: &EntangledGraph, s: usize, t: usize) -> Vec<u64> {
    let edges = endpoints(g);
    let ids: Vec<usize> = g.links().iter().filter(|l| !l.allocated).map(|l| l.id).collect();
    let mut out = Vec::new();
    let mut visited = vec![false; g.node_count()];
    fn walk(
        u: usize,
        t: usize,
        edges: &[(usize, usize)],
        ids: &[usize],
        visited: &mut Vec<bool>,
        mask: u64,
        out: &mut Vec<u64>,
    ) {
        if u == t {
            out.push(mask);
            return;
        }
        visited[u] = true;
        for (i, &(a, b)) in edges.iter().enumerate() {
            let w = if a == u {
                b
            } else if b == u {
                a
            } else {
                continue;
            };
            if !visited[w] {
                walk(w, t, edges, ids, visited, mask | 1 << ids[i], out);
            }
        }
        visited[u] = false;
    }
    walk(s, t, &edges, &ids, &mut visited, 0, &mut out);
    out
}

/// Largest family of pairwise edge-disjoint s-t paths, by exhaustive search
/// memoized on the set of links already used.
pub fn brute_max_disjoint_paths(g: &EntangledGraph, s: usize, t: usize) -> usize {
    let paths = all_simple_paths(g, s, t);
    fn best(paths: &[u64], used: u64, memo: &mut std::collections::HashMap<u64, usize>) -> usize {
        if let Some(&v) = memo.get(&used) {
            return v;
        }
        let v = paths
            .iter()
            .filter(|&&p| p & used == 0)
            .map(|&p| 1 + best(paths, used | p, memo))
            .max()
            .unwrap_or(0);
        memo.insert(used, v);
        v
    }
    best(&paths, 0, &mut Default::default())
}

/// Smallest set of free links whose removal disconnects s from t.
pub fn brute_min_cut(g: &EntangledGraph, s: usize, t: usize) -> usize {
    let edges = endpoints(g);
    let m = edges.len();
    let connected = |removed: u32| {
        let mut seen = vec![false; g.node_count()];
        seen[s] = true;
        let mut changed = true;
        while changed {
            changed = false;
            for (i, &(a, b)) in edges.iter().enumerate() {
                if removed >> i & 1 == 0 && seen[a] != seen[b] {
                    seen[a] = true;
                    seen[b] = true;
                    changed = true;
                }
            }
        }
        seen[t]
    };
    (0u32..1 << m).filter(|&r| !connected(r)).map(|r| r.count_ones() as usize).min().unwrap()
}

/// Full-rank mixed state `A A^dagger / tr`, with `A` complex Gaussian-ish.
pub fn random_mixed_state(rng: &mut RngStream) -> DensityMatrix {
    let a = Matrix4::from_fn(|_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    let m = a * a.adjoint();
    let tr = m.trace();
    DensityMatrix::new(m / tr).unwrap()
}

/// Hermitian, unit trace and positive semidefinite within `tol`.
pub fn is_valid_state(m: &Matrix4<Complex64>, tol: f64) -> bool {
    let herm = (0..4).all(|i| (0..4).all(|j| (m[(i, j)] - m[(j, i)].conj()).norm() <= tol));
    let tr = m.trace();
    let h = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let min_eig = nalgebra::SymmetricEigen::new(h).eigenvalues.min();
    herm && (tr.re - 1.0).abs() <= tol && tr.im.abs() <= tol && min_eig >= -tol
}
