//! 0-dimensional sublevel and superlevel persistence.
//!
//! Vertices are swept in rank order (reversed for superlevel) and merged with
//! a union-find. When a vertex joins several components, every component
//! except the one with the oldest extremum dies there (elder rule).

mod bottleneck;
mod forest;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{ScalarField, NONE};

pub use bottleneck::bottleneck;
pub use forest::MergeForest;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Filtration {
    /// `{f <= t}`: minima born, saddles kill them.
    Sublevel,
    /// `{f >= t}`: maxima born, saddles kill them.
    Superlevel,
}

impl Filtration {
    pub fn as_str(self) -> &'static str {
        match self {
            Filtration::Sublevel => "sublevel",
            Filtration::Superlevel => "superlevel",
        }
    }
}

/// A saddle–extremum pair produced by a merge.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PersistencePair {
    pub extremum: usize,
    pub saddle: usize,
    /// `f(extremum)`
    pub birth: f64,
    /// `f(saddle)`
    pub death: f64,
    pub persistence: f64,
    pub kind: Filtration,
    /// The older extremum whose component survived the merge.
    pub absorbed_into: usize,
}

/// All finite pairs of one filtration, sorted by persistence, plus the
/// extrema that never die (one per connected component).
#[derive(Clone, Debug, PartialEq)]
pub struct PersistencePairSet {
    pub kind: Filtration,
    pub vertex_count: usize,
    pub pairs: Vec<PersistencePair>,
    pub essential: Vec<EssentialClass>,
}

/// An extremum that never dies.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EssentialClass {
    pub extremum: usize,
    pub birth: f64,
}

impl PersistencePairSet {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn max_persistence(&self) -> Option<f64> {
        self.pairs.iter().map(|p| p.persistence).reduce(f64::max)
    }
}

/// CSV with one row per pair and per essential class (`death = inf`,
/// empty saddle) across all given sets.
pub fn pairs_csv(sets: &[&PersistencePairSet]) -> String {
    let rows = sets.iter().flat_map(|set| {
        let finite = set.pairs.iter().map(|p| (p.birth, p.death, p.extremum, Some(p.saddle), p.kind.as_str()));
        let essential = set.essential.iter().map(|e| (e.birth, f64::INFINITY, e.extremum, None, set.kind.as_str()));
        finite.chain(essential)
    });
    crate::to_csv(&["birth", "death", "extremum_vertex", "saddle_vertex", "kind"], rows)
}

pub fn sublevel_pairs(field: &ScalarField) -> PersistencePairSet {
    sweep(field, Filtration::Sublevel)
}

pub fn superlevel_pairs(field: &ScalarField) -> PersistencePairSet {
    sweep(field, Filtration::Superlevel)
}

struct UnionFind {
    parent: Vec<u32>,
    size: Vec<u32>,
    /// Oldest extremum of the component, valid at roots.
    oldest: Vec<u32>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: vec![NONE; n], size: vec![0; n], oldest: vec![NONE; n] }
    }

    fn make_set(&mut self, v: usize) {
        self.parent[v] = v as u32;
        self.size[v] = 1;
        self.oldest[v] = v as u32;
    }

    fn find(&mut self, mut v: usize) -> usize {
        while self.parent[v] as usize != v {
            let grand = self.parent[self.parent[v] as usize];
            self.parent[v] = grand;
            v = grand as usize;
        }
        v
    }

    /// Joins two roots and keeps `oldest` as the merged component's extremum.
    fn union(&mut self, a: usize, b: usize, oldest: u32) -> usize {
        let (big, small) = if self.size[a] >= self.size[b] { (a, b) } else { (b, a) };
        self.parent[small] = big as u32;
        self.size[big] += self.size[small];
        self.oldest[big] = oldest;
        big
    }
}

fn sweep(field: &ScalarField, kind: Filtration) -> PersistencePairSet {
    let n = field.len();
    // position in the sweep; lower means processed earlier
    let position = |v: usize| match kind {
        Filtration::Sublevel => field.rank(v),
        Filtration::Superlevel => (n - 1) as u32 - field.rank(v),
    };
    let sweep_order: Box<dyn Iterator<Item = &u32>> = match kind {
        Filtration::Sublevel => Box::new(field.order().iter()),
        Filtration::Superlevel => Box::new(field.order().iter().rev()),
    };

    let mut uf = UnionFind::new(n);
    let mut pairs = Vec::new();
    let mut roots: Vec<usize> = Vec::new();
    for &v in sweep_order {
        let v = v as usize;
        let here = position(v);
        roots.clear();
        for u in field.neighbors(v) {
            if position(u) < here {
                let r = uf.find(u);
                if !roots.contains(&r) {
                    roots.push(r);
                }
            }
        }
        uf.make_set(v);
        let Some(elder) = roots.iter().copied().min_by_key(|&r| position(uf.oldest[r] as usize)) else {
            continue;
        };
        let survivor = uf.oldest[elder];
        let mut joined = uf.union(elder, v, survivor);
        for &r in &roots {
            if r == elder {
                continue;
            }
            let extremum = uf.oldest[r] as usize;
            let (birth, death) = (field.value(extremum), field.value(v));
            pairs.push(PersistencePair {
                extremum,
                saddle: v,
                birth,
                death,
                persistence: (death - birth).abs(),
                kind,
                absorbed_into: survivor as usize,
            });
            joined = uf.union(joined, r, survivor);
        }
    }

    let mut essential: Vec<EssentialClass> = (0..n)
        .filter(|&v| uf.parent[v] as usize == v)
        .map(|v| {
            let extremum = uf.oldest[v] as usize;
            EssentialClass { extremum, birth: field.value(extremum) }
        })
        .collect();
    essential.sort_by_key(|e| position(e.extremum));
    pairs.sort_by(|a, b| a.persistence.total_cmp(&b.persistence));
    PersistencePairSet { kind, vertex_count: n, pairs, essential }
}

/// Birth–death points of one filtration.
///
/// Superlevel diagrams are stored as the sublevel diagram of `-f`, so every
/// point satisfies `birth < death`. Pairs of zero persistence (possible only
/// with tied values) are dropped.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PersistenceDiagram {
    pub kind: Filtration,
    pub points: Vec<(f64, f64)>,
    pub essential: Vec<f64>,
}

impl PersistenceDiagram {
    pub fn new(kind: Filtration, points: Vec<(f64, f64)>, essential: Vec<f64>) -> Self {
        PersistenceDiagram { kind, points, essential }
    }
}

pub fn diagram(set: &PersistencePairSet) -> Result<PersistenceDiagram> {
    if let Some(p) = set.pairs.iter().find(|p| p.kind != set.kind) {
        return Err(Error::Mismatch(format!(
            "{} pair in a {} pair set",
            p.kind.as_str(),
            set.kind.as_str()
        )));
    }
    let orient = |x: f64| match set.kind {
        Filtration::Sublevel => x,
        Filtration::Superlevel => -x,
    };
    let points = set
        .pairs
        .iter()
        .filter(|p| p.persistence > 0.0)
        .map(|p| (orient(p.birth), orient(p.death)))
        .collect();
    let essential = set.essential.iter().map(|e| orient(e.birth)).collect();
    Ok(PersistenceDiagram { kind: set.kind, points, essential })
}
