//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any FAIL.

use std::fs;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use msaug_cli::time_pipeline;
use msaug_core::encode::{
    persistence_image, persistence_landscape, to_channels_with, to_gnn_graph, DEFAULT_LAYERS, DEFAULT_RESOLUTION,
    DEFAULT_SAMPLES, DEFAULT_SIGMA,
};
use msaug_core::field::io::load_npy_field;
use msaug_core::hierarchy::{build_hierarchy_with, hierarchy_from_pairs, thresholds_from_fractions};
use msaug_core::morse::{segment_with, Region};
use msaug_core::oracle::{self, SweepPair};
use msaug_core::persistence::{
    bottleneck, diagram, sublevel_pairs, superlevel_pairs, Filtration, PersistenceDiagram, PersistencePairSet,
};
use msaug_core::{npy, synth, verify, Exec, ScalarField};

type Outcome = Result<String, String>;

fn check(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn sweep_form(set: &PersistencePairSet) -> (Vec<SweepPair>, Vec<usize>) {
    let mut pairs: Vec<SweepPair> = set
        .pairs
        .iter()
        .map(|p| SweepPair { extremum: p.extremum, saddle: p.saddle, absorbed_into: p.absorbed_into })
        .collect();
    pairs.sort();
    (pairs, set.essential.iter().map(|e| e.extremum).collect())
}

fn random_field(size: usize, i: usize, seed: u64) -> ScalarField {
    let mut rng = synth::rng(seed * 10_000 + i as u64);
    if i % 3 == 2 {
        synth::quantized_grid(&[size, size], 6, &mut rng)
    } else {
        synth::uniform_grid(&[size, size], &mut rng)
    }
}

fn persistence_oracle() -> Outcome {
    let start = Instant::now();
    let mut fields = 0;
    for (size, seed) in [(8, 101), (16, 102)] {
        for i in 0..100 {
            let f = random_field(size, i, seed);
            check(sweep_form(&sublevel_pairs(&f)) == oracle::sweep_pairs(&f, Filtration::Sublevel), || {
                format!("sublevel pairs differ on {size}x{size} field {i}")
            })?;
            check(sweep_form(&superlevel_pairs(&f)) == oracle::sweep_pairs(&f, Filtration::Superlevel), || {
                format!("superlevel pairs differ on {size}x{size} field {i}")
            })?;
            fields += 1;
        }
    }
    let f = ScalarField::grid(&[1, 7], vec![0.0, 1.0, 2.0, 1.0, 0.0, 1.0, 2.0]).unwrap();
    let sub = sublevel_pairs(&f);
    let sup = superlevel_pairs(&f);
    let expected_sub = (vec![SweepPair { extremum: 4, saddle: 2, absorbed_into: 0 }], vec![0]);
    let expected_sup = (vec![SweepPair { extremum: 2, saddle: 4, absorbed_into: 6 }], vec![6]);
    check(sweep_form(&sub) == expected_sub && sweep_form(&sup) == expected_sup, || "1x7 example differs".into())?;
    check(sub.pairs[0].persistence == 2.0 && sup.pairs[0].persistence == 2.0, || "1x7 persistence".into())?;
    let secs = start.elapsed().as_secs_f64();
    check(secs < 60.0, || format!("took {secs:.1}s"))?;
    Ok(format!("{fields} fields x 2 filtrations + 1x7 example, {secs:.1}s"))
}

fn segmentation_oracle() -> Outcome {
    let start = Instant::now();
    for i in 0..50 {
        let f = random_field(64, i, 103);
        let (mins, maxs) = oracle::naive_labels(&f);
        let s = segment_with(&f, Exec::Sequential);
        check(s.min_labels() == mins.as_slice() && s.max_labels() == maxs.as_slice(), || {
            format!("labels differ on field {i}")
        })?;
    }
    let secs = start.elapsed().as_secs_f64();
    check(secs < 60.0, || format!("took {secs:.1}s"))?;
    Ok(format!("50 fields 64x64, exact label equality, {secs:.1}s"))
}

fn hierarchy_contracts() -> Outcome {
    // threshold sweeps with nesting and oracle checks on small fields
    let mut fields = 0;
    for (size, seed) in [(1, 104), (4, 105), (8, 106), (16, 107), (32, 108)] {
        let r = verify::run(size, 25, seed);
        for name in ["hierarchy_contracts", "simplify_nesting", "simplify_oracle"] {
            let p = r.properties.iter().find(|p| p.name == name).unwrap();
            check(p.passed, || format!("{name} failed at size {size}: {:?}", p.failure.as_ref().map(|f| &f.detail)))?;
        }
        fields += r.trials;
    }
    // full hierarchies on larger fields
    for i in 0..30 {
        let f = random_field(64, i, 109);
        let (sub, sup) = (sublevel_pairs(&f), superlevel_pairs(&f));
        let s = thresholds_from_fractions(&sub, &sup, &[0.3, 0.65, 1.0]).unwrap();
        let h = hierarchy_from_pairs(&f, &sub, &sup, &s, Exec::Sequential);
        let counts = h.region_counts();
        check(counts.windows(2).all(|w| w[0] >= w[1]), || format!("counts {counts:?} increase"))?;
        let top = [Region { min: f.global_min() as u32, max: f.global_max() as u32 }];
        check(h.levels.last().unwrap().segmentation.regions() == top, || "top level is not the global pair".into())?;
        for l in 0..counts.len() - 1 {
            let mut hit = vec![0; counts[l + 1]];
            let mut out = vec![0; counts[l]];
            for m in h.merges_from(l) {
                out[m.from] += 1;
                hit[m.to] += 1;
            }
            check(out.iter().all(|&c| c == 1) && hit.iter().all(|&c| c > 0), || {
                format!("merge map at level {l} is not a surjection")
            })?;
        }
        fields += 1;
    }
    Ok(format!("{fields} fields: monotone counts, single global region, exact nesting"))
}

fn stability() -> Outcome {
    let mut worst = Vec::new();
    for (delta, seed) in [(0.01, 110), (0.1, 111)] {
        let mut rng = synth::rng(seed);
        let mut max_ratio: f64 = 0.0;
        for t in 0..100 {
            let f = synth::uniform_grid(&[16, 16], &mut rng);
            let g = synth::perturb(&f, delta, &mut rng);
            for (a, b) in [(sublevel_pairs(&f), sublevel_pairs(&g)), (superlevel_pairs(&f), superlevel_pairs(&g))] {
                let d = bottleneck(&diagram(&a).unwrap(), &diagram(&b).unwrap()).unwrap();
                check(d <= delta + 1e-9, || format!("trial {t}: bottleneck {d} > {delta}"))?;
                max_ratio = max_ratio.max(d / delta);
            }
        }
        worst.push(format!("delta {delta}: max d/delta {max_ratio:.3}"));
    }
    Ok(format!("100 trials 16x16 each; {}", worst.join(", ")))
}

fn complexity() -> Outcome {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    pool.install(|| {
        let sizes = [1usize << 16, 1 << 18, 1 << 20];
        let times: Vec<f64> =
            sizes.iter().map(|&n| time_pipeline(n, 4, 5, 112, Exec::Sequential).unwrap().t_segment).collect();
        // sizes grow 4x, i.e. two doublings per step
        let ratios: Vec<f64> = times.windows(2).map(|w| (w[1] / w[0]).sqrt()).collect();
        check(ratios.iter().all(|r| (1.7..=2.6).contains(r)), || {
            format!("per-doubling t_segment ratios {ratios:.3?} from {times:.4?}s")
        })?;

        // ingestion from an array file through every encoder
        let dir = tempfile::tempdir().unwrap();
        let input = dir.path().join("field.npy");
        let f = synth::uniform_grid(&[1024, 1024], &mut synth::rng(113));
        npy::write(&input, &[1024, 1024], f.values()).unwrap();
        let start = Instant::now();
        let f = load_npy_field(&input).unwrap();
        let (sub, sup) = (sublevel_pairs(&f), superlevel_pairs(&f));
        let s = thresholds_from_fractions(&sub, &sup, &[0.3, 0.65, 0.9, 1.0]).unwrap();
        let h = hierarchy_from_pairs(&f, &sub, &sup, &s, Exec::Sequential);
        let c = to_channels_with(&h, false, Exec::Sequential).unwrap();
        let g = to_gnn_graph(&h, false);
        for set in [&sub, &sup] {
            let d = diagram(set).unwrap();
            persistence_image(&d, DEFAULT_RESOLUTION, DEFAULT_SIGMA, None).unwrap();
            persistence_landscape(&d, DEFAULT_LAYERS, DEFAULT_SAMPLES, None).unwrap();
        }
        let secs = start.elapsed().as_secs_f64();
        check(secs < 10.0, || format!("1024x1024 k=4 pipeline took {secs:.2}s"))?;
        let sizes = format!("{} channels, {} graph nodes", c.channel_count(), g.nodes.len());
        Ok(format!("t_segment per-doubling {ratios:.2?}; 1024x1024 k=4 single-threaded {secs:.2}s ({sizes})"))
    })
}

fn encoders() -> Outcome {
    let mut rng = synth::rng(114);
    for i in 0..1000 {
        let count = i % 40;
        let d = synth::random_diagram(count, &mut rng);
        let l = persistence_landscape(&d, DEFAULT_LAYERS, DEFAULT_SAMPLES, None).unwrap();
        for k in 0..DEFAULT_LAYERS - 1 {
            check(l.layer(k).iter().zip(l.layer(k + 1)).all(|(a, b)| a >= b && *b >= 0.0), || {
                format!("landscape layers {k},{} cross on diagram {i}", k + 1)
            })?;
        }
    }

    let ranges = Some(((-0.5, 1.5), (-0.5, 1.5)));
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let a = synth::random_diagram(15, &mut rng);
        let b = synth::random_diagram(10, &mut rng);
        let union = PersistenceDiagram::new(
            Filtration::Sublevel,
            a.points.iter().chain(&b.points).copied().collect(),
            vec![],
        );
        let (ia, ib, iu) = (
            persistence_image(&a, DEFAULT_RESOLUTION, DEFAULT_SIGMA, ranges).unwrap(),
            persistence_image(&b, DEFAULT_RESOLUTION, DEFAULT_SIGMA, ranges).unwrap(),
            persistence_image(&union, DEFAULT_RESOLUTION, DEFAULT_SIGMA, ranges).unwrap(),
        );
        for ((x, y), u) in ia.values.iter().zip(&ib.values).zip(&iu.values) {
            let err = (x + y - u).abs() / u.abs().max(f64::MIN_POSITIVE);
            worst = worst.max(if *u == 0.0 { (x + y).abs() } else { err });
        }
    }
    check(worst <= 1e-12, || format!("image linearity relative error {worst:e}"))?;

    let f = synth::uniform_grid(&[64, 64], &mut rng);
    let d = diagram(&sublevel_pairs(&f)).unwrap();
    let im = persistence_image(&d, DEFAULT_RESOLUTION, DEFAULT_SIGMA, None).unwrap();
    let l = persistence_landscape(&d, DEFAULT_LAYERS, DEFAULT_SAMPLES, None).unwrap();
    check(im.values.len() == 400 && (l.layers, l.samples()) == (5, 100), || "default shapes".into())?;

    let f = synth::uniform_grid(&[1024, 1024], &mut rng);
    let (sub, sup) = (sublevel_pairs(&f), superlevel_pairs(&f));
    let s = thresholds_from_fractions(&sub, &sup, &[0.3, 0.65, 1.0]).unwrap();
    let h = hierarchy_from_pairs(&f, &sub, &sup, &s, Exec::default());
    let c = to_channels_with(&h, false, Exec::default()).unwrap();
    check(c.array_shape() == vec![8, 1024, 1024], || format!("stack shape {:?}", c.array_shape()))?;
    Ok(format!(
        "1000 landscapes ordered; image linearity rel err {worst:.1e}; 20x20 / 5x100 defaults; 4 levels -> 8 channels"
    ))
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("field.npy");
    let f = synth::quantized_grid(&[96, 128], 50, &mut synth::rng(115));
    npy::write(&input, &[96, 128], f.values()).unwrap();
    let run = |threads: &str, i: usize| -> Result<Vec<u8>, String> {
        let out = dir.path().join(format!("out-{threads}-{i}"));
        let status = Command::new(env!("CARGO_BIN_EXE_msaug"))
            .args(["--threads", threads, "augment", "--input"])
            .arg(&input)
            .args(["--fractions", "0.3,0.65,1.0", "--channels", "--gnn", "--pi", "--landscape", "-o"])
            .arg(&out)
            .status()
            .map_err(|e| e.to_string())?;
        check(status.success(), || format!("augment failed with {status}"))?;
        fs::read(Path::new(&out).join("manifest.json")).map_err(|e| e.to_string())
    };
    let mut manifests = Vec::new();
    for threads in ["1", "4"] {
        for i in 0..3 {
            manifests.push(run(threads, i)?);
        }
    }
    check(manifests.windows(2).all(|w| w[0] == w[1]), || "manifests differ".into())?;
    let seq = build_hierarchy_with(&f, &thresholds(&f), Exec::Sequential);
    let par = build_hierarchy_with(&f, &thresholds(&f), Exec::Parallel);
    check(seq == par, || "sequential and parallel hierarchies differ".into())?;
    Ok("3 runs x threads {1, 4}: identical manifests".into())
}

fn thresholds(f: &ScalarField) -> msaug_core::hierarchy::ThresholdSchedule {
    thresholds_from_fractions(&sublevel_pairs(f), &superlevel_pairs(f), &[0.3, 0.65, 1.0]).unwrap()
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 7] = [
        ("oracle equivalence, persistence", persistence_oracle),
        ("oracle equivalence, segmentation", segmentation_oracle),
        ("hierarchy contracts", hierarchy_contracts),
        ("stability", stability),
        ("complexity", complexity),
        ("encoder correctness", encoders),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS  {name}: {detail} [{secs:.1}s]"),
            Err(detail) => {
                failed += 1;
                println!("FAIL  {name}: {detail} [{secs:.1}s]");
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
