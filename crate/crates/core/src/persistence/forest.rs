use crate::field::NONE;

use super::{Filtration, PersistencePairSet};

/// The absorption forest of one pair set: each dying extremum points at the
/// elder extremum that absorbed it. Persistence never decreases towards the
/// roots, so cancelling everything below a threshold maps an extremum to its
/// first ancestor at or above it.
#[derive(Clone, Debug)]
pub struct MergeForest {
    kind: Filtration,
    vertex_count: usize,
    /// vertex -> node, `NONE` for non-extrema
    slot: Vec<u32>,
    vertex: Vec<u32>,
    parent: Vec<u32>,
    /// index into the pair set, `NONE` for roots
    pair: Vec<u32>,
    persistence: Vec<f64>,
    depth: Vec<u32>,
    /// nodes sorted by depth, parents first
    top_down: Vec<u32>,
}

impl MergeForest {
    pub fn new(set: &PersistencePairSet) -> Self {
        let mut slot = vec![NONE; set.vertex_count];
        let mut vertex = Vec::with_capacity(set.pairs.len() + set.essential.len());
        let mut add = |v: usize, vertex: &mut Vec<u32>| {
            if slot[v] == NONE {
                slot[v] = vertex.len() as u32;
                vertex.push(v as u32);
            }
        };
        for e in &set.essential {
            add(e.extremum, &mut vertex);
        }
        for p in &set.pairs {
            add(p.extremum, &mut vertex);
            add(p.absorbed_into, &mut vertex);
        }
        let nodes = vertex.len();
        let mut parent = vec![NONE; nodes];
        let mut pair = vec![NONE; nodes];
        let mut persistence = vec![f64::INFINITY; nodes];
        for (i, p) in set.pairs.iter().enumerate() {
            let c = slot[p.extremum] as usize;
            parent[c] = slot[p.absorbed_into];
            pair[c] = i as u32;
            persistence[c] = p.persistence;
        }

        let mut depth = vec![NONE; nodes];
        let mut stack = Vec::new();
        for start in 0..nodes {
            let mut c = start;
            while depth[c] == NONE && parent[c] != NONE {
                stack.push(c);
                c = parent[c] as usize;
            }
            if depth[c] == NONE {
                depth[c] = 0;
            }
            let mut d = depth[c];
            while let Some(s) = stack.pop() {
                d += 1;
                depth[s] = d;
            }
        }
        let mut top_down: Vec<u32> = (0..nodes as u32).collect();
        top_down.sort_by_key(|&c| depth[c as usize]);

        MergeForest {
            kind: set.kind,
            vertex_count: set.vertex_count,
            slot,
            vertex,
            parent,
            pair,
            persistence,
            depth,
            top_down,
        }
    }

    pub fn kind(&self) -> Filtration {
        self.kind
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    /// Elder extremum that absorbed `v`, if `v` is a finite extremum.
    pub fn absorbed_into(&self, v: usize) -> Option<usize> {
        let c = self.slot[v];
        (c != NONE && self.parent[c as usize] != NONE).then(|| self.vertex[self.parent[c as usize] as usize] as usize)
    }

    /// Dense `vertex -> surviving extremum` map after cancelling every pair
    /// with persistence strictly below `threshold`. Vertices that are not
    /// extrema map to themselves.
    pub fn survivors(&self, threshold: f64) -> Vec<u32> {
        let mut out: Vec<u32> = (0..self.vertex_count as u32).collect();
        for &c in &self.top_down {
            let c = c as usize;
            let p = self.parent[c];
            if p != NONE && self.persistence[c] < threshold {
                let v = self.vertex[c] as usize;
                out[v] = out[self.vertex[p as usize] as usize];
            }
        }
        out
    }

    /// The pair that decides when extrema `a` and `b` end up with the same
    /// survivor: the largest-persistence pair on the forest path between
    /// them. Returns `(persistence, pair index)`, or `None` when they lie in
    /// different trees or are equal.
    pub fn merge_witness(&self, a: usize, b: usize) -> Option<(f64, usize)> {
        let (mut x, mut y) = (self.slot[a], self.slot[b]);
        if x == NONE || y == NONE || x == y {
            return None;
        }
        let mut best: Option<(f64, usize)> = None;
        let mut climb = |c: &mut u32| -> bool {
            let i = *c as usize;
            if self.parent[i] == NONE {
                return false;
            }
            let pers = self.persistence[i];
            if best.is_none_or(|(b, _)| pers > b) {
                best = Some((pers, self.pair[i] as usize));
            }
            *c = self.parent[i];
            true
        };
        while x != y {
            let (dx, dy) = (self.depth[x as usize], self.depth[y as usize]);
            let moved = if dx > dy {
                climb(&mut x)
            } else if dy > dx {
                climb(&mut y)
            } else {
                climb(&mut x) && climb(&mut y)
            };
            if !moved {
                return None;
            }
        }
        best
    }
}
