//! Brute-force property checks on random fields.
//!
//! Each property runs the [`Subject`] under test against the oracles in
//! [`crate::oracle`]. The report keeps properties in a fixed order, so the
//! first failing entry is the first violated property.

use std::collections::{BTreeSet, HashMap};

use rand::Rng;
use serde::Serialize;

use crate::dual::{build_dual_with, DualGraph, Forests};
use crate::field::{DomainKind, ScalarField};
use crate::hierarchy::simplify_with;
use crate::morse::{segment_with, Region, Segmentation};
use crate::oracle;
use crate::par::Exec;
use crate::persistence::{sublevel_pairs, superlevel_pairs, Filtration, PersistencePairSet};
use crate::synth;

/// The implementation being checked. Defaults call the library.
pub trait Subject {
    fn segment(&self, field: &ScalarField, exec: Exec) -> Segmentation {
        segment_with(field, exec)
    }

    fn pairs(&self, field: &ScalarField, kind: Filtration) -> PersistencePairSet {
        match kind {
            Filtration::Sublevel => sublevel_pairs(field),
            Filtration::Superlevel => superlevel_pairs(field),
        }
    }

    fn simplify(&self, seg: &Segmentation, forests: &Forests, epsilon: f64) -> Segmentation {
        simplify_with(seg, forests, epsilon, Exec::default())
    }

    fn dual(&self, seg: &Segmentation, field: &ScalarField, forests: &Forests) -> DualGraph {
        build_dual_with(seg, field, forests, Exec::default()).expect("inputs share the field")
    }
}

/// The library itself.
pub struct Library;

impl Subject for Library {}

pub const PROPERTIES: [&str; 10] = [
    "segmentation_oracle",
    "segmentation_exec_agree",
    "sublevel_pairs_oracle",
    "superlevel_pairs_oracle",
    "dual_adjacency",
    "dual_pair_coverage",
    "hierarchy_contracts",
    "simplify_nesting",
    "simplify_oracle",
    "region_count_bound",
];

/// A field in plain form, enough to rebuild it.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FieldDump {
    pub kind: DomainKind,
    pub shape: Vec<usize>,
    pub values: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub edges: Option<Vec<(usize, usize)>>,
}

impl FieldDump {
    pub fn of(field: &ScalarField) -> Self {
        FieldDump {
            kind: field.kind(),
            shape: field.shape(),
            values: field.values().to_vec(),
            edges: (!field.kind().is_grid()).then(|| field.edges().collect()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Failure {
    pub trial: usize,
    pub detail: String,
    pub field: FieldDump,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PropertyResult {
    pub name: &'static str,
    pub passed: bool,
    pub trials: usize,
    /// First failing trial.
    pub failure: Option<Failure>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub size: usize,
    pub trials: usize,
    pub seed: u64,
    pub passed: bool,
    pub properties: Vec<PropertyResult>,
}

impl Report {
    pub fn first_failure(&self) -> Option<&PropertyResult> {
        self.properties.iter().find(|p| !p.passed)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Field for trial `t`: size×size grids, alternating continuous values with
/// heavily tied integer values; every fourth trial is a random graph.
pub fn trial_field(size: usize, trial: usize, rng: &mut impl Rng) -> ScalarField {
    let size = size.max(1);
    match trial % 4 {
        0 | 2 => synth::uniform_grid(&[size, size], rng),
        1 => synth::quantized_grid(&[size, size], 4, rng),
        _ => synth::random_graph(size * size, size * size / 2, rng),
    }
}

pub fn run(size: usize, trials: usize, seed: u64) -> Report {
    run_subject(&Library, size, trials, seed)
}

pub fn run_subject(subject: &dyn Subject, size: usize, trials: usize, seed: u64) -> Report {
    let mut results: Vec<PropertyResult> =
        PROPERTIES.iter().map(|&name| PropertyResult { name, passed: true, trials, failure: None }).collect();
    let mut rng = synth::rng(seed);
    for trial in 0..trials {
        let field = trial_field(size, trial, &mut rng);
        for (i, outcome) in check_field(subject, &field).into_iter().enumerate() {
            if let (Err(detail), None) = (outcome, &results[i].failure) {
                results[i].passed = false;
                results[i].failure = Some(Failure { trial, detail, field: FieldDump::of(&field) });
            }
        }
    }
    let passed = results.iter().all(|r| r.passed);
    Report { size, trials, seed, passed, properties: results }
}

type Outcome = Result<(), String>;

/// Thresholds checked per field, including 0 and one above every pair.
const MAX_LEVELS: usize = 16;

fn ensure(ok: bool, detail: impl FnOnce() -> String) -> Outcome {
    if ok {
        Ok(())
    } else {
        Err(detail())
    }
}

/// Runs every property on one field, in [`PROPERTIES`] order.
pub fn check_field(subject: &dyn Subject, field: &ScalarField) -> Vec<Outcome> {
    let seg = subject.segment(field, Exec::Sequential);
    let sub = subject.pairs(field, Filtration::Sublevel);
    let sup = subject.pairs(field, Filtration::Superlevel);
    let forests = Forests::new(&sub, &sup);

    let truth = Truth::of(field);

    let mut out = vec![
        segmentation_oracle(&truth, &seg),
        ensure(subject.segment(field, Exec::Parallel) == seg, || "sequential and parallel labels differ".into()),
        pairs_oracle(field, &sub, &truth.sub),
        pairs_oracle(field, &sup, &truth.sup),
    ];
    let forests = match forests {
        Ok(f) => f,
        Err(e) => {
            out.resize(PROPERTIES.len(), Err(format!("pair sets unusable: {e}")));
            return out;
        }
    };
    let dual = subject.dual(&seg, field, &forests);
    out.push(dual_adjacency(field, &seg, &dual));
    out.push(pair_coverage(&seg, &dual, &sub, &sup));

    let mut thresholds: Vec<f64> = sub.pairs.iter().chain(&sup.pairs).map(|p| p.persistence).collect();
    thresholds.push(0.0);
    thresholds.sort_by(f64::total_cmp);
    thresholds.dedup();
    let top = thresholds.last().copied().unwrap_or(0.0).next_up();
    // thresholds at, between and beyond the persistence values
    let mut eps: Vec<f64> = thresholds.windows(2).map(|w| (w[0] + w[1]) / 2.0).collect();
    eps.extend(&thresholds);
    eps.push(top);
    eps.sort_by(f64::total_cmp);
    eps.dedup();
    // nesting is quadratic in the level count; keep an even spread
    if eps.len() > MAX_LEVELS {
        let last = eps.len() - 1;
        eps = (0..MAX_LEVELS).map(|i| eps[i * last / (MAX_LEVELS - 1)]).collect();
    }
    let levels: Vec<Segmentation> = eps.iter().map(|&e| subject.simplify(&seg, &forests, e)).collect();

    out.push(hierarchy_contracts(field, &eps, &levels));
    out.push(nesting(subject, &forests, &eps, &levels));
    out.push(simplify_oracle(field, &truth, &eps, &levels));
    out.push(region_bound(&sub, &sup, &eps, &levels));
    out
}

/// Oracle results computed once per field.
struct Truth {
    mins: Vec<u32>,
    maxs: Vec<u32>,
    sub: (Vec<oracle::SweepPair>, Vec<usize>),
    sup: (Vec<oracle::SweepPair>, Vec<usize>),
}

impl Truth {
    fn of(field: &ScalarField) -> Self {
        let (mins, maxs) = oracle::naive_labels(field);
        Truth {
            mins,
            maxs,
            sub: oracle::sweep_pairs(field, Filtration::Sublevel),
            sup: oracle::sweep_pairs(field, Filtration::Superlevel),
        }
    }
}

fn segmentation_oracle(truth: &Truth, seg: &Segmentation) -> Outcome {
    ensure(seg.min_labels() == truth.mins.as_slice(), || "min labels differ from chain following".into())?;
    ensure(seg.max_labels() == truth.maxs.as_slice(), || "max labels differ from chain following".into())
}

fn pairs_oracle(field: &ScalarField, set: &PersistencePairSet, truth: &(Vec<oracle::SweepPair>, Vec<usize>)) -> Outcome {
    let (expected, essential) = truth;
    let kind = set.kind;
    let mut got: Vec<oracle::SweepPair> = set
        .pairs
        .iter()
        .map(|p| oracle::SweepPair { extremum: p.extremum, saddle: p.saddle, absorbed_into: p.absorbed_into })
        .collect();
    got.sort();
    ensure(&got == expected, || format!("{} pairs {got:?}, oracle {expected:?}", kind.as_str()))?;
    let got: Vec<usize> = set.essential.iter().map(|e| e.extremum).collect();
    ensure(&got == essential, || format!("essential {got:?}, oracle {essential:?}"))?;
    for p in &set.pairs {
        let pers = (field.value(p.saddle) - field.value(p.extremum)).abs();
        ensure(p.persistence == pers && p.kind == kind, || format!("pair {p:?} has inconsistent fields"))?;
    }
    Ok(())
}

fn dual_adjacency(field: &ScalarField, seg: &Segmentation, dual: &DualGraph) -> Outcome {
    let expected = oracle::adjacency(field, seg.region_ids());
    let got: BTreeSet<(u32, u32)> = dual.edges.iter().map(|e| (e.a as u32, e.b as u32)).collect();
    ensure(got == expected && got.len() == dual.edges.len(), || {
        format!("dual edges {got:?}, brute force {expected:?}")
    })?;
    let sizes: usize = dual.nodes.iter().map(|n| n.size).sum();
    ensure(dual.nodes.len() == seg.region_count() && sizes == field.len(), || {
        "dual nodes do not partition the domain".into()
    })
}

/// Every pair with positive persistence must be cancelled before some pair
/// of adjacent regions can merge: it lies on the absorption path between
/// their extrema on its own filtration side.
fn pair_coverage(seg: &Segmentation, dual: &DualGraph, sub: &PersistencePairSet, sup: &PersistencePairSet) -> Outcome {
    let regions = seg.regions();
    for set in [sub, sup] {
        let pair_of: HashMap<usize, usize> = set.pairs.iter().enumerate().map(|(i, p)| (p.extremum, i)).collect();
        let chain = |mut v: usize| {
            let mut out = Vec::new();
            while let Some(&i) = pair_of.get(&v) {
                out.push(i);
                v = set.pairs[i].absorbed_into;
            }
            out
        };
        let mut covered = vec![false; set.pairs.len()];
        for e in &dual.edges {
            let (x, y) = match set.kind {
                Filtration::Sublevel => (regions[e.a].min, regions[e.b].min),
                Filtration::Superlevel => (regions[e.a].max, regions[e.b].max),
            };
            let (cx, cy) = (chain(x as usize), chain(y as usize));
            // pairs above the meeting point are shared; the rest is the path
            let shared = cx.iter().rev().zip(cy.iter().rev()).take_while(|(a, b)| a == b).count();
            for &i in cx[..cx.len() - shared].iter().chain(&cy[..cy.len() - shared]) {
                covered[i] = true;
            }
        }
        if let Some(p) = set.pairs.iter().zip(&covered).find(|(p, c)| p.persistence > 0.0 && !**c) {
            return Err(format!("pair {:?} separates no adjacent regions", p.0));
        }
    }
    Ok(())
}

fn hierarchy_contracts(field: &ScalarField, eps: &[f64], levels: &[Segmentation]) -> Outcome {
    let counts: Vec<usize> = levels.iter().map(Segmentation::region_count).collect();
    ensure(counts.windows(2).all(|w| w[0] >= w[1]), || format!("region counts {counts:?} at {eps:?} increase"))?;
    if field.component_count() == 1 {
        let last = levels.last().unwrap();
        let expected = [Region { min: field.global_min() as u32, max: field.global_max() as u32 }];
        ensure(last.regions() == expected, || format!("top level keeps regions {:?}", last.regions()))?;
    }
    Ok(())
}

fn nesting(subject: &dyn Subject, forests: &Forests, eps: &[f64], levels: &[Segmentation]) -> Outcome {
    for i in 0..eps.len() {
        for j in i..eps.len() {
            let twice = subject.simplify(&levels[i], forests, eps[j]);
            ensure(twice == levels[j], || format!("simplify at {} after {} differs from direct", eps[j], eps[i]))?;
        }
    }
    Ok(())
}

fn simplify_oracle(field: &ScalarField, truth: &Truth, eps: &[f64], levels: &[Segmentation]) -> Outcome {
    for (&e, seg) in eps.iter().zip(levels) {
        let mins = oracle::absorb(field, &truth.mins, &truth.sub.0, e);
        let maxs = oracle::absorb(field, &truth.maxs, &truth.sup.0, e);
        ensure(seg.min_labels() == mins.as_slice() && seg.max_labels() == maxs.as_slice(), || {
            format!("labels at threshold {e} differ from step-by-step absorption")
        })?;
    }
    Ok(())
}

fn region_bound(sub: &PersistencePairSet, sup: &PersistencePairSet, eps: &[f64], levels: &[Segmentation]) -> Outcome {
    for (&e, seg) in eps.iter().zip(levels) {
        let alive = |s: &PersistencePairSet| s.essential.len() + s.pairs.iter().filter(|p| p.persistence >= e).count();
        let bound = alive(sub) * alive(sup);
        ensure(seg.region_count() <= bound, || format!("{} regions at {e} exceed bound {bound}", seg.region_count()))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn library_passes() {
        for size in [1, 2, 5, 8] {
            let r = run(size, 24, 11);
            assert!(r.passed, "{}", r.to_json());
        }
    }

    struct HalvedThreshold;

    impl Subject for HalvedThreshold {
        // a bug that only shows up once simplification runs
        fn simplify(&self, seg: &Segmentation, forests: &Forests, epsilon: f64) -> Segmentation {
            simplify_with(seg, forests, epsilon * 0.5, Exec::Sequential)
        }
    }

    #[test]
    fn injected_bug_is_named() {
        let r = run_subject(&HalvedThreshold, 6, 8, 2);
        assert!(!r.passed);
        let first = r.first_failure().unwrap();
        assert_eq!(first.name, "hierarchy_contracts");
        assert!(first.failure.as_ref().unwrap().detail.contains("top level"));
    }
}
