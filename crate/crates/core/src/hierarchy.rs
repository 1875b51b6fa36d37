//! Persistence-threshold simplification and the multi-level hierarchy.

use std::collections::HashMap;

use log::warn;
use serde::Serialize;

use crate::dual::{build_dual_with, DualEdge, DualGraph, DualNode, Forests};
use crate::error::{Error, Result};
use crate::field::{DomainKind, ScalarField};
use crate::morse::{segment_with, Region, Segmentation};
use crate::par::{self, Exec};
use crate::persistence::{sublevel_pairs, superlevel_pairs, PersistencePairSet};

/// Persistence thresholds, one per simplified level.
#[derive(Clone, Debug, PartialEq)]
pub struct ThresholdSchedule {
    epsilons: Vec<f64>,
    degenerate: bool,
}

impl ThresholdSchedule {
    /// Explicit thresholds; must be non-negative and strictly increasing.
    pub fn new(epsilons: Vec<f64>) -> Result<Self> {
        if let Some(e) = epsilons.iter().find(|e| e.is_nan() || **e < 0.0) {
            return Err(Error::InvalidParameter(format!("threshold {e} must be >= 0")));
        }
        if epsilons.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParameter(format!("thresholds {epsilons:?} are not strictly increasing")));
        }
        Ok(ThresholdSchedule { epsilons, degenerate: false })
    }

    pub fn empty() -> Self {
        ThresholdSchedule { epsilons: Vec::new(), degenerate: false }
    }

    pub fn epsilons(&self) -> &[f64] {
        &self.epsilons
    }

    pub fn len(&self) -> usize {
        self.epsilons.len()
    }

    pub fn is_empty(&self) -> bool {
        self.epsilons.is_empty()
    }

    /// Set when a nonzero fraction was requested but there were no pairs.
    pub fn is_degenerate(&self) -> bool {
        self.degenerate
    }
}

/// Picks thresholds so that cancelling everything below `eps(q)` removes
/// about a fraction `q` of all finite pairs (both filtrations pooled).
///
/// `eps(q)` is the persistence at index `ceil(q * count)` of the sorted pool;
/// `q = 1` gives the next float above the largest persistence. Equal
/// persistences can make consecutive thresholds coincide; such levels are
/// kept so that the level count always matches the number of fractions.
pub fn thresholds_from_fractions(
    sub: &PersistencePairSet,
    sup: &PersistencePairSet,
    fractions: &[f64],
) -> Result<ThresholdSchedule> {
    if fractions.iter().any(|q| !(0.0..=1.0).contains(q)) {
        return Err(Error::InvalidParameter(format!("fractions {fractions:?} must lie in [0, 1]")));
    }
    if fractions.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter(format!("fractions {fractions:?} are not strictly increasing")));
    }
    let mut pool: Vec<f64> = sub.pairs.iter().chain(&sup.pairs).map(|p| p.persistence).collect();
    pool.sort_by(f64::total_cmp);
    let count = pool.len();

    let mut degenerate = false;
    let epsilons = fractions
        .iter()
        .map(|&q| {
            if q == 0.0 {
                return 0.0;
            }
            if count == 0 {
                degenerate = true;
                return 0.0;
            }
            // shave float noise so that e.g. 0.3 * 10 indexes 3, not 4
            let index = (q * count as f64 - 1e-9).ceil().max(0.0) as usize;
            if index >= count {
                pool[count - 1].next_up()
            } else {
                pool[index]
            }
        })
        .collect();
    if degenerate {
        warn!("no finite persistence pairs; fraction thresholds collapse to 0");
    }
    Ok(ThresholdSchedule { epsilons, degenerate })
}

/// Cancels every pair with persistence strictly below `epsilon`.
pub fn simplify(
    seg: &Segmentation,
    sub: &PersistencePairSet,
    sup: &PersistencePairSet,
    epsilon: f64,
) -> Result<Segmentation> {
    let forests = Forests::new(sub, sup)?;
    if seg.len() != sub.vertex_count {
        return Err(Error::Mismatch(format!(
            "segmentation has {} vertices, pair sets {}",
            seg.len(),
            sub.vertex_count
        )));
    }
    if epsilon.is_nan() || epsilon < 0.0 {
        return Err(Error::InvalidParameter(format!("threshold {epsilon} must be >= 0")));
    }
    Ok(simplify_with(seg, &forests, epsilon, Exec::default()))
}

pub fn simplify_with(seg: &Segmentation, forests: &Forests, epsilon: f64, exec: Exec) -> Segmentation {
    let min_map = forests.sub_forest.survivors(epsilon);
    let max_map = forests.sup_forest.survivors(epsilon);
    let mins = par::map_slice(exec, seg.min_labels(), |&m| min_map[m as usize]);
    let maxs = par::map_slice(exec, seg.max_labels(), |&m| max_map[m as usize]);
    Segmentation::from_labels(mins, maxs)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Level {
    /// 0 for the unsimplified base level.
    pub epsilon: f64,
    pub segmentation: Segmentation,
    pub dual: DualGraph,
}

/// Directed edge from a region at `level` to its image at `level + 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Merge {
    pub level: usize,
    #[serde(rename = "from_region")]
    pub from: usize,
    #[serde(rename = "to_region")]
    pub to: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Hierarchy {
    pub kind: DomainKind,
    pub shape: Vec<usize>,
    /// `(min, max)` of the field values.
    pub value_range: (f64, f64),
    pub levels: Vec<Level>,
    pub merges: Vec<Merge>,
}

impl Hierarchy {
    pub fn vertex_count(&self) -> usize {
        self.levels[0].segmentation.len()
    }

    pub fn region_counts(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.segmentation.region_count()).collect()
    }

    /// Merge edges leaving `level`.
    pub fn merges_from(&self, level: usize) -> impl Iterator<Item = &Merge> {
        self.merges.iter().filter(move |m| m.level == level)
    }

    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct LevelOut<'a> {
            epsilon: f64,
            regions: &'a [DualNode],
            dual_edges: &'a [DualEdge],
        }
        #[derive(Serialize)]
        struct Out<'a> {
            kind: DomainKind,
            shape: &'a [usize],
            levels: Vec<LevelOut<'a>>,
            merges: &'a [Merge],
        }
        let out = Out {
            kind: self.kind,
            shape: &self.shape,
            levels: self
                .levels
                .iter()
                .map(|l| LevelOut { epsilon: l.epsilon, regions: &l.dual.nodes, dual_edges: &l.dual.edges })
                .collect(),
            merges: &self.merges,
        };
        serde_json::to_string(&out).expect("hierarchy serializes")
    }
}

pub fn build_hierarchy(field: &ScalarField, schedule: &ThresholdSchedule) -> Hierarchy {
    build_hierarchy_with(field, schedule, Exec::default())
}

pub fn build_hierarchy_with(field: &ScalarField, schedule: &ThresholdSchedule, exec: Exec) -> Hierarchy {
    let sub = sublevel_pairs(field);
    let sup = superlevel_pairs(field);
    hierarchy_from_pairs(field, &sub, &sup, schedule, exec)
}

/// Builds the hierarchy from precomputed pair sets.
pub fn hierarchy_from_pairs(
    field: &ScalarField,
    sub: &PersistencePairSet,
    sup: &PersistencePairSet,
    schedule: &ThresholdSchedule,
    exec: Exec,
) -> Hierarchy {
    let forests = Forests::new(sub, sup).expect("pair sets come from the same field");
    let base = segment_with(field, exec);
    let mut levels = vec![level(field, &forests, 0.0, base, exec)];
    let mut merges = Vec::new();
    for &epsilon in schedule.epsilons() {
        let prev = levels.last().unwrap();
        let next = simplify_with(&prev.segmentation, &forests, epsilon, exec);
        let min_map = forests.sub_forest.survivors(epsilon);
        let max_map = forests.sup_forest.survivors(epsilon);
        let index: HashMap<Region, usize> = next.regions().iter().enumerate().map(|(i, &r)| (r, i)).collect();
        let from_level = levels.len() - 1;
        merges.extend(prev.segmentation.regions().iter().enumerate().map(|(from, r)| {
            let image = Region { min: min_map[r.min as usize], max: max_map[r.max as usize] };
            Merge { level: from_level, from, to: index[&image] }
        }));
        levels.push(level(field, &forests, epsilon, next, exec));
    }
    Hierarchy { kind: field.kind(), shape: field.shape(), value_range: field.value_range(), levels, merges }
}

fn level(field: &ScalarField, forests: &Forests, epsilon: f64, segmentation: Segmentation, exec: Exec) -> Level {
    let dual = build_dual_with(&segmentation, field, forests, exec).expect("inputs share the field");
    Level { epsilon, segmentation, dual }
}
