use msaug_core::persistence::{bottleneck, diagram, sublevel_pairs, superlevel_pairs};
use msaug_core::synth;

#[test]
fn bottleneck_bounded_by_perturbation() {
    for (delta, seed) in [(0.01, 1), (0.1, 2)] {
        let mut rng = synth::rng(seed);
        let mut worst: f64 = 0.0;
        for _ in 0..100 {
            let f = synth::uniform_grid(&[16, 16], &mut rng);
            let g = synth::perturb(&f, delta, &mut rng);
            for (a, b) in [
                (diagram(&sublevel_pairs(&f)), diagram(&sublevel_pairs(&g))),
                (diagram(&superlevel_pairs(&f)), diagram(&superlevel_pairs(&g))),
            ] {
                let d = bottleneck(&a.unwrap(), &b.unwrap()).unwrap();
                assert!(d <= delta + 1e-9, "bottleneck {d} exceeds {delta}");
                worst = worst.max(d);
            }
        }
        // the bound is not vacuous: perturbations do move the diagrams
        assert!(worst > delta * 0.1);
    }
}

#[test]
fn identical_fields_have_zero_distance() {
    let f = synth::uniform_grid(&[12, 12], &mut synth::rng(3));
    let a = diagram(&sublevel_pairs(&f)).unwrap();
    assert_eq!(bottleneck(&a, &a).unwrap(), 0.0);
}
