//! Dual graph of a segmentation: one node per region, one edge per pair of
//! regions that touch along a domain edge.
//!
//! An edge's weight is the persistence at which its two regions would be
//! merged by cancellation. On the min side that is the largest-persistence
//! pair on the absorption-forest path between the two minima (for regions
//! whose minima were merged directly, exactly that pair); likewise on the
//! max side. The edge keeps the smaller of the two and names the pair.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::morse::Segmentation;
use crate::par::{self, Exec};
use crate::persistence::{Filtration, MergeForest, PersistencePair, PersistencePairSet};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DualNode {
    pub id: usize,
    #[serde(rename = "min")]
    pub min_vertex: usize,
    #[serde(rename = "max")]
    pub max_vertex: usize,
    pub f_min: f64,
    pub f_max: f64,
    pub size: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Witness {
    pub extremum: usize,
    pub saddle: usize,
    pub kind: Filtration,
}

impl From<&PersistencePair> for Witness {
    fn from(p: &PersistencePair) -> Self {
        Witness { extremum: p.extremum, saddle: p.saddle, kind: p.kind }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DualEdge {
    pub a: usize,
    pub b: usize,
    /// `+inf` when the regions can never merge (different components).
    pub weight: f64,
    pub witness: Option<Witness>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DualGraph {
    pub nodes: Vec<DualNode>,
    pub edges: Vec<DualEdge>,
}

impl DualGraph {
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("dual graph serializes")
    }

    /// `a,b,weight,kind,extremum,saddle`; missing witnesses leave the last
    /// three columns empty and infinite weights are written as `inf`.
    pub fn to_csv(&self) -> String {
        let rows = self.edges.iter().map(|e| {
            let w = e.witness.map(|w| (w.kind.as_str(), w.extremum, w.saddle));
            (e.a, e.b, e.weight, w.map(|w| w.0), w.map(|w| w.1), w.map(|w| w.2))
        });
        crate::to_csv(&["a", "b", "weight", "kind", "extremum", "saddle"], rows)
    }
}

/// Absorption forests for both filtrations, built once and shared across
/// hierarchy levels.
#[derive(Clone, Debug)]
pub struct Forests<'a> {
    pub sub: &'a PersistencePairSet,
    pub sup: &'a PersistencePairSet,
    pub sub_forest: MergeForest,
    pub sup_forest: MergeForest,
}

impl<'a> Forests<'a> {
    pub fn new(sub: &'a PersistencePairSet, sup: &'a PersistencePairSet) -> Result<Self> {
        if sub.kind != Filtration::Sublevel || sup.kind != Filtration::Superlevel {
            return Err(Error::Mismatch("expected a sublevel and a superlevel pair set".into()));
        }
        if sub.vertex_count != sup.vertex_count {
            return Err(Error::Mismatch(format!(
                "pair sets cover {} and {} vertices",
                sub.vertex_count, sup.vertex_count
            )));
        }
        Ok(Forests { sub, sup, sub_forest: MergeForest::new(sub), sup_forest: MergeForest::new(sup) })
    }

    fn vertex_count(&self) -> usize {
        self.sub.vertex_count
    }
}

pub fn build_dual(
    seg: &Segmentation,
    field: &ScalarField,
    sub: &PersistencePairSet,
    sup: &PersistencePairSet,
) -> Result<DualGraph> {
    let forests = Forests::new(sub, sup)?;
    build_dual_with(seg, field, &forests, Exec::default())
}

pub fn build_dual_with(seg: &Segmentation, field: &ScalarField, forests: &Forests, exec: Exec) -> Result<DualGraph> {
    if seg.len() != field.len() || forests.vertex_count() != field.len() {
        return Err(Error::Mismatch(format!(
            "segmentation has {} vertices, field {}, pair sets {}",
            seg.len(),
            field.len(),
            forests.vertex_count()
        )));
    }

    let sizes = seg.region_sizes();
    let nodes = seg
        .regions()
        .iter()
        .enumerate()
        .map(|(id, r)| DualNode {
            id,
            min_vertex: r.min as usize,
            max_vertex: r.max as usize,
            f_min: field.value(r.min as usize),
            f_max: field.value(r.max as usize),
            size: sizes[id],
        })
        .collect();

    let adjacent = region_adjacency(seg, field, exec);
    let regions = seg.regions();
    let edges = par::map_slice(exec, &adjacent, |&(a, b)| {
        let (ra, rb) = (regions[a as usize], regions[b as usize]);
        let min_side = (ra.min != rb.min)
            .then(|| forests.sub_forest.merge_witness(ra.min as usize, rb.min as usize))
            .flatten()
            .map(|(w, i)| (w, &forests.sub.pairs[i]));
        let max_side = (ra.max != rb.max)
            .then(|| forests.sup_forest.merge_witness(ra.max as usize, rb.max as usize))
            .flatten()
            .map(|(w, i)| (w, &forests.sup.pairs[i]));
        let best = match (min_side, max_side) {
            (Some(x), Some(y)) => Some(if y.0 < x.0 { y } else { x }),
            (x, y) => x.or(y),
        };
        DualEdge {
            a: a as usize,
            b: b as usize,
            weight: best.map_or(f64::INFINITY, |(w, _)| w),
            witness: best.map(|(_, p)| Witness::from(p)),
        }
    });
    Ok(DualGraph { nodes, edges })
}

/// Sorted, deduplicated region pairs `(a, b)`, `a < b`, that share a domain edge.
pub fn region_adjacency(seg: &Segmentation, field: &ScalarField, exec: Exec) -> Vec<(u32, u32)> {
    const CHUNK: usize = 1 << 14;
    let ids = seg.region_ids();
    let parts = par::map_chunks(exec, field.len(), CHUNK, |range| {
        let mut local = Vec::new();
        for u in range {
            for v in field.neighbors(u) {
                if v > u && ids[u] != ids[v] {
                    local.push((ids[u].min(ids[v]), ids[u].max(ids[v])));
                }
            }
        }
        local.sort_unstable();
        local.dedup();
        local
    });
    let mut all: Vec<(u32, u32)> = parts.into_iter().flatten().collect();
    all.sort_unstable();
    all.dedup();
    all
}
