//! Brute-force reference computations.
//!
//! These recompute everything from scratch with the most direct method
//! available (per-vertex chain walks, connected components recomputed at
//! every threshold, exhaustive edge scans). They are quadratic and meant for
//! small fields only; the `verify` suite and the tests compare the fast paths
//! against them.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::field::ScalarField;
use crate::persistence::Filtration;

/// Steepest-neighbor chains followed separately for every vertex.
pub fn naive_labels(field: &ScalarField) -> (Vec<u32>, Vec<u32>) {
    let step = |v: usize, up: bool| -> Option<usize> {
        let mut best: Option<usize> = None;
        for u in field.neighbors(v) {
            let better = match (up, best) {
                (true, None) => field.rank(u) > field.rank(v),
                (false, None) => field.rank(u) < field.rank(v),
                (true, Some(b)) => field.rank(u) > field.rank(b),
                (false, Some(b)) => field.rank(u) < field.rank(b),
            };
            if better {
                best = Some(u);
            }
        }
        best
    };
    let follow = |mut v: usize, up: bool| {
        while let Some(next) = step(v, up) {
            v = next;
        }
        v as u32
    };
    let mins = (0..field.len()).map(|v| follow(v, false)).collect();
    let maxs = (0..field.len()).map(|v| follow(v, true)).collect();
    (mins, maxs)
}

/// Pair as seen by the threshold sweep.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SweepPair {
    pub extremum: usize,
    pub saddle: usize,
    pub absorbed_into: usize,
}

/// Recomputes the connected components of the swept subgraph after every
/// vertex and reads off births and deaths by comparing consecutive steps.
/// A component is named by its oldest vertex.
pub fn sweep_pairs(field: &ScalarField, kind: Filtration) -> (Vec<SweepPair>, Vec<usize>) {
    let n = field.len();
    let sweep: Vec<usize> = match kind {
        Filtration::Sublevel => field.order().iter().map(|&v| v as usize).collect(),
        Filtration::Superlevel => field.order().iter().rev().map(|&v| v as usize).collect(),
    };
    let mut position = vec![0usize; n];
    for (i, &v) in sweep.iter().enumerate() {
        position[v] = i;
    }

    let mut previous: BTreeSet<usize> = BTreeSet::new();
    let mut pairs = Vec::new();
    let mut name = vec![usize::MAX; n];
    for t in 0..n {
        let saddle = sweep[t];
        name.iter_mut().for_each(|x| *x = usize::MAX);
        let mut current = BTreeSet::new();
        // BFS from active vertices in sweep order, so each component's
        // first-visited vertex is its oldest
        for &s in &sweep[..=t] {
            if name[s] != usize::MAX {
                continue;
            }
            name[s] = s;
            current.insert(s);
            let mut queue = vec![s];
            while let Some(v) = queue.pop() {
                for u in field.neighbors(v) {
                    if position[u] <= t && name[u] == usize::MAX {
                        name[u] = s;
                        queue.push(u);
                    }
                }
            }
        }
        for &old in &previous {
            if !current.contains(&old) {
                pairs.push(SweepPair { extremum: old, saddle, absorbed_into: name[old] });
            }
        }
        previous = current;
    }
    let mut essential: Vec<usize> = previous.into_iter().collect();
    essential.sort_by_key(|&v| position[v]);
    pairs.sort();
    (pairs, essential)
}

/// Distinct region pairs `(a, b)`, `a < b`, joined by at least one domain edge.
pub fn adjacency(field: &ScalarField, region_of: &[u32]) -> BTreeSet<(u32, u32)> {
    let mut out = BTreeSet::new();
    for u in 0..field.len() {
        for v in field.neighbors(u) {
            let (a, b) = (region_of[u], region_of[v]);
            if a != b {
                out.insert((a.min(b), a.max(b)));
            }
        }
    }
    out
}

/// Per-vertex `(min, max)` labels after cancelling every sweep pair with
/// persistence strictly below `epsilon`, following absorption one step at a
/// time.
pub fn simplified_labels(field: &ScalarField, epsilon: f64) -> (Vec<u32>, Vec<u32>) {
    let (mins, maxs) = naive_labels(field);
    let sub = sweep_pairs(field, Filtration::Sublevel).0;
    let sup = sweep_pairs(field, Filtration::Superlevel).0;
    (absorb(field, &mins, &sub, epsilon), absorb(field, &maxs, &sup, epsilon))
}

/// Moves each label up its absorption chain while the pair it died in has
/// persistence below `epsilon`.
pub fn absorb(field: &ScalarField, labels: &[u32], pairs: &[SweepPair], epsilon: f64) -> Vec<u32> {
    let parent: HashMap<usize, (usize, f64)> = pairs
        .iter()
        .map(|p| (p.extremum, (p.absorbed_into, (field.value(p.saddle) - field.value(p.extremum)).abs())))
        .collect();
    labels
        .iter()
        .map(|&m| {
            let mut m = m;
            while let Some(&(up, pers)) = parent.get(&(m as usize)) {
                if pers >= epsilon {
                    break;
                }
                m = up as u32;
            }
            m
        })
        .collect()
}

/// Dense region ids numbered by first appearance, for comparing partitions.
pub fn canonical_partition(mins: &[u32], maxs: &[u32]) -> Vec<u32> {
    let mut ids: BTreeMap<(u32, u32), u32> = BTreeMap::new();
    mins.iter()
        .zip(maxs)
        .map(|(&a, &b)| {
            let next = ids.len() as u32;
            *ids.entry((a, b)).or_insert(next)
        })
        .collect()
}
