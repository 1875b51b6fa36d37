use msaug_core::dual::build_dual;
use msaug_core::encode::{to_gnn_graph, EdgeType};
use msaug_core::hierarchy::{build_hierarchy, ThresholdSchedule};
use msaug_core::morse::segment;
use msaug_core::oracle;
use msaug_core::persistence::{sublevel_pairs, superlevel_pairs, Filtration};
use msaug_core::{synth, ScalarField};

#[test]
fn two_bump_dual_weight_is_the_saddle_pair() {
    let f = synth::two_bumps(32, 32);
    let (sub, sup) = (sublevel_pairs(&f), superlevel_pairs(&f));
    let seg = segment(&f);
    let d = build_dual(&seg, &f, &sub, &sup).unwrap();

    // the lower bump dies at the pass between the bumps
    let (pairs, _) = oracle::sweep_pairs(&f, Filtration::Superlevel);
    let main = pairs
        .iter()
        .map(|p| (p, f.value(p.extremum) - f.value(p.saddle)))
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap();
    let (low, high) = (main.0.extremum as u32, main.0.absorbed_into as u32);
    assert_eq!(high as usize, f.global_max());

    let regions = seg.regions();
    let across: Vec<_> = d
        .edges
        .iter()
        .filter(|e| {
            let (a, b) = (regions[e.a].max, regions[e.b].max);
            (a, b) == (low, high) || (a, b) == (high, low)
        })
        .collect();
    assert!(!across.is_empty());
    for e in &across {
        assert!(e.weight <= main.1);
    }
    // at least one boundary edge between the bump regions carries the pass
    assert!(across.iter().any(|e| e.weight == main.1 && e.witness.unwrap().extremum == low as usize));
}

fn line(values: &[f64]) -> ScalarField {
    ScalarField::grid(&[1, values.len()], values.to_vec()).unwrap()
}

/// Node and edge counts derived from the oracles alone: stepwise
/// simplification for the partitions, brute-force adjacency for intra edges.
fn expected_counts(f: &ScalarField, eps: &[f64], prune: bool) -> (usize, usize, usize) {
    let mut levels = vec![0.0];
    levels.extend(eps);
    let first = usize::from(prune && eps.len() > 0);
    let (mut nodes, mut intra, mut inter) = (0, 0, 0);
    for (i, &e) in levels.iter().enumerate().skip(first) {
        let (mins, maxs) = oracle::simplified_labels(f, e);
        let part = oracle::canonical_partition(&mins, &maxs);
        let regions = part.iter().max().map_or(0, |&m| m as usize + 1);
        nodes += regions;
        intra += oracle::adjacency(f, &part).len();
        if i + 1 < levels.len() {
            inter += regions;
        }
    }
    (nodes, intra, inter)
}

fn next_permutation(p: &mut [usize]) -> bool {
    let Some(i) = (1..p.len()).rev().find(|&i| p[i - 1] < p[i]) else { return false };
    let j = (i..p.len()).rev().find(|&j| p[j] > p[i - 1]).unwrap();
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

#[test]
fn gnn_counts_on_lines() {
    let check = |values: &[f64]| {
        let f = line(values);
        let sub = sublevel_pairs(&f);
        let sup = superlevel_pairs(&f);
        let mut p: Vec<f64> = sub.pairs.iter().chain(&sup.pairs).map(|p| p.persistence).collect();
        p.sort_by(f64::total_cmp);
        p.dedup();
        let eps: Vec<f64> = p.iter().map(|x| x + 0.5).collect();
        let h = build_hierarchy(&f, &ThresholdSchedule::new(eps.clone()).unwrap());
        for prune in [false, true] {
            let g = to_gnn_graph(&h, prune);
            let got = (g.nodes.len(), g.count(EdgeType::Intra), g.count(EdgeType::Inter));
            assert_eq!(got, expected_counts(&f, &eps, prune), "{values:?} prune={prune}");
        }
    };
    // every ordering up to length 7, then random lines up to length 16
    for n in 1..=7 {
        let mut p: Vec<usize> = (0..n).collect();
        loop {
            check(&p.iter().map(|&x| x as f64).collect::<Vec<_>>());
            if !next_permutation(&mut p) {
                break;
            }
        }
    }
    let mut rng = synth::rng(9);
    for n in 8..=16 {
        for _ in 0..200 {
            check(synth::uniform_grid(&[1, n], &mut rng).values());
        }
    }
}

#[test]
fn seven_vertex_gnn() {
    let f = line(&[0.0, 1.0, 2.0, 1.0, 0.0, 1.0, 2.0]);
    let h = build_hierarchy(&f, &ThresholdSchedule::new(vec![0.5, 2.5]).unwrap());
    let g = to_gnn_graph(&h, false);
    assert_eq!((g.nodes.len(), g.count(EdgeType::Intra), g.count(EdgeType::Inter)), (7, 4, 6));
    assert_eq!(to_gnn_graph(&h, true).nodes.len(), 4);
}
