//! Exact bottleneck distance.
//!
//! The answer is one of finitely many candidate costs (pairwise L-infinity
//! distances and half-persistences), so a binary search over the sorted
//! candidates with a perfect-matching test at each step is exact.

use std::collections::VecDeque;

use super::PersistenceDiagram;
use crate::error::{Error, Result};

pub fn bottleneck(a: &PersistenceDiagram, b: &PersistenceDiagram) -> Result<f64> {
    if a.kind != b.kind {
        return Err(Error::Mismatch("bottleneck distance between different filtrations".into()));
    }
    let essential = essential_distance(&a.essential, &b.essential);
    if essential.is_infinite() {
        return Ok(essential);
    }
    Ok(finite_distance(&a.points, &b.points).max(essential))
}

fn essential_distance(a: &[f64], b: &[f64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn linf(p: (f64, f64), q: (f64, f64)) -> f64 {
    (p.0 - q.0).abs().max((p.1 - q.1).abs())
}

fn to_diagonal(p: (f64, f64)) -> f64 {
    (p.1 - p.0).abs() / 2.0
}

fn finite_distance(a: &[(f64, f64)], b: &[(f64, f64)]) -> f64 {
    let mut candidates: Vec<f64> = a.iter().chain(b).map(|&p| to_diagonal(p)).collect();
    for &p in a {
        for &q in b {
            candidates.push(linf(p, q));
        }
    }
    if candidates.is_empty() {
        return 0.0;
    }
    candidates.sort_by(f64::total_cmp);
    candidates.dedup();
    // the largest candidate is always feasible: every point can go to the diagonal
    let (mut lo, mut hi) = (0, candidates.len() - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if perfect_matching(a, b, candidates[mid]) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    candidates[lo]
}

/// Left side: points of `a`, then one diagonal slot per point of `b`.
/// Right side: points of `b`, then one diagonal slot per point of `a`.
fn perfect_matching(a: &[(f64, f64)], b: &[(f64, f64)], radius: f64) -> bool {
    let (n, m) = (a.len(), b.len());
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n + m];
    for (i, &p) in a.iter().enumerate() {
        for (j, &q) in b.iter().enumerate() {
            if linf(p, q) <= radius {
                adj[i].push(j);
            }
        }
        if to_diagonal(p) <= radius {
            adj[i].push(m + i);
        }
    }
    for (j, &q) in b.iter().enumerate() {
        let slot = &mut adj[n + j];
        if to_diagonal(q) <= radius {
            slot.push(j);
        }
        slot.extend(m..m + n);
    }
    hopcroft_karp(&adj, n + m) == n + m
}

/// Maximum bipartite matching size; `adj[l]` lists right vertices.
fn hopcroft_karp(adj: &[Vec<usize>], right: usize) -> usize {
    const FREE: usize = usize::MAX;
    let left = adj.len();
    let mut match_l = vec![FREE; left];
    let mut match_r = vec![FREE; right];
    let mut dist = vec![0usize; left];
    let mut matched = 0;

    loop {
        // BFS layering from free left vertices
        let mut queue = VecDeque::new();
        for l in 0..left {
            if match_l[l] == FREE {
                dist[l] = 0;
                queue.push_back(l);
            } else {
                dist[l] = usize::MAX;
            }
        }
        let mut found = false;
        while let Some(l) = queue.pop_front() {
            for &r in &adj[l] {
                let next = match_r[r];
                if next == FREE {
                    found = true;
                } else if dist[next] == usize::MAX {
                    dist[next] = dist[l] + 1;
                    queue.push_back(next);
                }
            }
        }
        if !found {
            return matched;
        }
        let mut cursor = vec![0usize; left];
        for l in 0..left {
            if match_l[l] == FREE && augment(l, adj, &mut match_l, &mut match_r, &mut dist, &mut cursor) {
                matched += 1;
            }
        }
    }
}

fn augment(
    start: usize,
    adj: &[Vec<usize>],
    match_l: &mut [usize],
    match_r: &mut [usize],
    dist: &mut [usize],
    cursor: &mut [usize],
) -> bool {
    const FREE: usize = usize::MAX;
    // iterative DFS along the BFS layers
    let mut path: Vec<(usize, usize)> = Vec::new();
    let mut l = start;
    loop {
        if cursor[l] < adj[l].len() {
            let r = adj[l][cursor[l]];
            cursor[l] += 1;
            let next = match_r[r];
            if next == FREE {
                path.push((l, r));
                for &(pl, pr) in &path {
                    match_l[pl] = pr;
                    match_r[pr] = pl;
                }
                return true;
            }
            if dist[next] == dist[l] + 1 {
                path.push((l, r));
                l = next;
            }
        } else {
            dist[l] = usize::MAX;
            match path.pop() {
                Some((pl, _)) => l = pl,
                None => return false,
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::persistence::Filtration;

    fn d(points: &[(f64, f64)]) -> PersistenceDiagram {
        PersistenceDiagram::new(Filtration::Sublevel, points.to_vec(), vec![0.0])
    }

    #[test]
    fn identical_diagrams() {
        let a = d(&[(0.0, 2.0), (1.0, 1.5), (0.3, 4.0)]);
        assert_eq!(bottleneck(&a, &a).unwrap(), 0.0);
    }

    #[test]
    fn single_point_against_empty() {
        assert_eq!(bottleneck(&d(&[(0.0, 2.0)]), &d(&[])).unwrap(), 1.0);
    }

    #[test]
    fn prefers_diagonal_when_cheaper() {
        // matching the two points costs 3, sending both to the diagonal costs 0.5
        let a = d(&[(0.0, 1.0)]);
        let b = d(&[(3.0, 4.0)]);
        assert_eq!(bottleneck(&a, &b).unwrap(), 0.5);
        let c = d(&[(0.0, 10.0)]);
        let e = d(&[(0.5, 10.25)]);
        assert_eq!(bottleneck(&c, &e).unwrap(), 0.5);
    }

    #[test]
    fn essential_mismatch_is_infinite() {
        let a = PersistenceDiagram::new(Filtration::Sublevel, vec![], vec![0.0, 1.0]);
        assert!(bottleneck(&a, &d(&[])).unwrap().is_infinite());
        let b = PersistenceDiagram::new(Filtration::Sublevel, vec![], vec![0.25]);
        assert_eq!(bottleneck(&b, &d(&[])).unwrap(), 0.25);
    }

    #[test]
    fn matches_exhaustive_search_on_small_diagrams() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let gen = |k: usize, rng: &mut rand_chacha::ChaCha8Rng| -> Vec<(f64, f64)> {
                (0..k)
                    .map(|_| {
                        let b: f64 = rng.gen_range(0.0..4.0);
                        (b, b + rng.gen_range(0.01..3.0))
                    })
                    .collect()
            };
            let (na, nb) = (rng.gen_range(0..4), rng.gen_range(0..4));
            let (a, b) = (gen(na, &mut rng), gen(nb, &mut rng));
            let brute = brute_force(&a, &b);
            assert_eq!(finite_distance(&a, &b), brute, "{a:?} vs {b:?}");
        }
    }

    /// Minimum over all partial injections of the max cost, unmatched points
    /// paying their diagonal distance.
    fn brute_force(a: &[(f64, f64)], b: &[(f64, f64)]) -> f64 {
        fn rec(i: usize, a: &[(f64, f64)], b: &[(f64, f64)], used: &mut Vec<bool>, acc: f64) -> f64 {
            if i == a.len() {
                return b
                    .iter()
                    .zip(used.iter())
                    .filter(|(_, &u)| !u)
                    .map(|(&q, _)| to_diagonal(q))
                    .fold(acc, f64::max);
            }
            let mut best = rec(i + 1, a, b, used, acc.max(to_diagonal(a[i])));
            for j in 0..b.len() {
                if !used[j] {
                    used[j] = true;
                    best = best.min(rec(i + 1, a, b, used, acc.max(linf(a[i], b[j]))));
                    used[j] = false;
                }
            }
            best
        }
        rec(0, a, b, &mut vec![false; b.len()], 0.0)
    }
}
