//! Discrete gradient, critical vertices and integral-line segmentation.
//!
//! Every vertex is paired with its steepest higher neighbor and its steepest
//! lower neighbor. Following those pairings from any vertex reaches a unique
//! maximum and a unique minimum; the `(min, max)` pair names its region.

use serde::Serialize;

use crate::field::{ScalarField, NONE};
use crate::par::{self, Exec};

/// Steepest ascent / descent pairing for every vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiscreteGradient {
    ascend: Vec<u32>,
    descend: Vec<u32>,
}

impl DiscreteGradient {
    pub fn ascend_to(&self, v: usize) -> Option<usize> {
        some(self.ascend[v])
    }

    pub fn descend_to(&self, v: usize) -> Option<usize> {
        some(self.descend[v])
    }

    pub fn len(&self) -> usize {
        self.ascend.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ascend.is_empty()
    }
}

#[inline]
fn some(v: u32) -> Option<usize> {
    (v != NONE).then_some(v as usize)
}

pub fn build_gradient(field: &ScalarField) -> DiscreteGradient {
    build_gradient_with(field, Exec::default())
}

/// The highest neighbor has the largest value difference, and among equal
/// values the largest rank, so steepest selection reduces to a rank argmax.
pub fn build_gradient_with(field: &ScalarField, exec: Exec) -> DiscreteGradient {
    let pairs = par::map_range(exec, field.len(), |v| {
        let own = field.rank(v);
        let (mut hi, mut hi_rank) = (NONE, own);
        let (mut lo, mut lo_rank) = (NONE, own);
        for u in field.neighbors(v) {
            let r = field.rank(u);
            if r > hi_rank {
                hi = u as u32;
                hi_rank = r;
            }
            if r < lo_rank {
                lo = u as u32;
                lo_rank = r;
            }
        }
        (hi, lo)
    });
    let (ascend, descend) = pairs.into_iter().unzip();
    DiscreteGradient { ascend, descend }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CriticalPoint {
    pub vertex: usize,
    pub value: f64,
}

/// Unpaired vertices of the gradient, in increasing vertex order.
#[derive(Clone, Debug, PartialEq)]
pub struct CriticalSet {
    pub minima: Vec<CriticalPoint>,
    pub maxima: Vec<CriticalPoint>,
}

pub fn find_critical(gradient: &DiscreteGradient, field: &ScalarField) -> CriticalSet {
    let collect = |side: &[u32]| {
        side.iter()
            .enumerate()
            .filter(|(_, &t)| t == NONE)
            .map(|(v, _)| CriticalPoint { vertex: v, value: field.value(v) })
            .collect()
    };
    CriticalSet { minima: collect(&gradient.descend), maxima: collect(&gradient.ascend) }
}

/// A Morse–Smale cell: every vertex in it flows down to `min` and up to `max`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Region {
    pub min: u32,
    pub max: u32,
}

/// Per-vertex `(min, max)` labels and the dense region numbering.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Segmentation {
    min_label: Vec<u32>,
    max_label: Vec<u32>,
    region_id: Vec<u32>,
    regions: Vec<Region>,
}

impl Segmentation {
    /// Numbers regions in order of first appearance by vertex index. Labels
    /// must be vertex indices, i.e. below the label count.
    pub fn from_labels(min_label: Vec<u32>, max_label: Vec<u32>) -> Self {
        assert_eq!(min_label.len(), max_label.len());
        let n = min_label.len();
        // regions sharing a minimum form a list: head[min] -> id -> sibling[id] -> ...
        let mut head = vec![NONE; n];
        let mut sibling: Vec<u32> = Vec::new();
        let mut regions: Vec<Region> = Vec::new();
        let mut last = NONE;
        let region_id = min_label
            .iter()
            .zip(&max_label)
            .map(|(&min, &max)| {
                let key = Region { min, max };
                if last != NONE && regions[last as usize] == key {
                    return last;
                }
                let mut r = head[min as usize];
                while r != NONE && regions[r as usize].max != max {
                    r = sibling[r as usize];
                }
                if r == NONE {
                    r = regions.len() as u32;
                    regions.push(key);
                    sibling.push(head[min as usize]);
                    head[min as usize] = r;
                }
                last = r;
                r
            })
            .collect();
        Segmentation { min_label, max_label, region_id, regions }
    }

    pub fn len(&self) -> usize {
        self.min_label.len()
    }

    pub fn is_empty(&self) -> bool {
        self.min_label.is_empty()
    }

    pub fn min_labels(&self) -> &[u32] {
        &self.min_label
    }

    pub fn max_labels(&self) -> &[u32] {
        &self.max_label
    }

    pub fn region_ids(&self) -> &[u32] {
        &self.region_id
    }

    /// `region_id -> (min, max)`.
    pub fn regions(&self) -> &[Region] {
        &self.regions
    }

    pub fn region_count(&self) -> usize {
        self.regions.len()
    }

    pub fn region_of(&self, v: usize) -> usize {
        self.region_id[v] as usize
    }

    /// Region id of the `(min, max)` pair, if present.
    pub fn find_region(&self, min: u32, max: u32) -> Option<usize> {
        self.regions.iter().position(|r| r.min == min && r.max == max)
    }

    pub fn region_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.regions.len()];
        for &r in &self.region_id {
            sizes[r as usize] += 1;
        }
        sizes
    }
}

/// One row of the exported region table.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RegionRecord {
    pub id: usize,
    pub min_vertex: usize,
    pub max_vertex: usize,
    pub f_min: f64,
    pub f_max: f64,
}

pub fn region_table(seg: &Segmentation, field: &ScalarField) -> Vec<RegionRecord> {
    seg.regions()
        .iter()
        .enumerate()
        .map(|(id, r)| RegionRecord {
            id,
            min_vertex: r.min as usize,
            max_vertex: r.max as usize,
            f_min: field.value(r.min as usize),
            f_max: field.value(r.max as usize),
        })
        .collect()
}

/// Region ids as a dense array over the field's shape, plus the region table
/// as JSON.
pub fn export_segmentation(seg: &Segmentation, field: &ScalarField) -> (Vec<u8>, String) {
    let npy = crate::npy::to_bytes(&field.shape(), seg.region_ids());
    let json = serde_json::to_string(&region_table(seg, field)).expect("region table serializes");
    (npy, json)
}

pub fn segment(field: &ScalarField) -> Segmentation {
    segment_with(field, Exec::default())
}

pub fn segment_with(field: &ScalarField, exec: Exec) -> Segmentation {
    let gradient = build_gradient_with(field, exec);
    segment_gradient(&gradient, exec)
}

/// Traces every vertex to its extrema along an existing gradient.
pub fn segment_gradient(gradient: &DiscreteGradient, exec: Exec) -> Segmentation {
    let min_label = chain_roots(&gradient.descend, exec);
    let max_label = chain_roots(&gradient.ascend, exec);
    Segmentation::from_labels(min_label, max_label)
}

/// Endpoint of the chain `v -> next[v] -> ...` for every vertex.
fn chain_roots(next: &[u32], exec: Exec) -> Vec<u32> {
    if exec.is_parallel() {
        chain_roots_jumping(next, exec)
    } else {
        chain_roots_memo(next)
    }
}

/// Walks each unlabeled chain once and labels every vertex on it, so total
/// work is linear.
fn chain_roots_memo(next: &[u32]) -> Vec<u32> {
    let mut label = vec![NONE; next.len()];
    let mut stack = Vec::new();
    for v in 0..next.len() {
        if label[v] != NONE {
            continue;
        }
        let mut u = v;
        while label[u] == NONE && next[u] != NONE {
            stack.push(u);
            u = next[u] as usize;
        }
        let root = if label[u] != NONE { label[u] } else { u as u32 };
        label[u] = root;
        for s in stack.drain(..) {
            label[s] = root;
        }
    }
    label
}

/// Pointer jumping: each round squares the chain map, so the number of
/// rounds is logarithmic in the longest chain. Every write is a pure function
/// of the previous round, which keeps it race-free.
fn chain_roots_jumping(next: &[u32], exec: Exec) -> Vec<u32> {
    let mut cur: Vec<u32> =
        par::map_range(exec, next.len(), |v| if next[v] == NONE { v as u32 } else { next[v] });
    loop {
        let jumped = par::map_slice(exec, &cur, |&p| cur[p as usize]);
        if jumped == cur {
            return cur;
        }
        cur = jumped;
    }
}
