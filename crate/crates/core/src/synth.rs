//! Seeded synthetic fields and diagrams for tests, verification and benches.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::field::ScalarField;
use crate::persistence::{Filtration, PersistenceDiagram};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform values in `[0, 1)`.
pub fn uniform_grid(shape: &[usize], rng: &mut impl Rng) -> ScalarField {
    let n = shape.iter().product();
    ScalarField::grid(shape, (0..n).map(|_| rng.gen::<f64>()).collect()).expect("shape is valid")
}

/// Integer values in `0..levels`, so ties are common.
pub fn quantized_grid(shape: &[usize], levels: u32, rng: &mut impl Rng) -> ScalarField {
    let n = shape.iter().product();
    ScalarField::grid(shape, (0..n).map(|_| rng.gen_range(0..levels) as f64).collect()).expect("shape is valid")
}

/// Connected graph: a random spanning tree plus `extra` random edges.
pub fn random_graph(n: usize, extra: usize, rng: &mut impl Rng) -> ScalarField {
    let mut edges: Vec<(usize, usize)> = (1..n).map(|v| (rng.gen_range(0..v), v)).collect();
    if n > 1 {
        for _ in 0..extra {
            let a = rng.gen_range(0..n);
            let b = rng.gen_range(0..n);
            if a != b {
                edges.push((a, b));
            }
        }
    }
    let values = (0..n).map(|_| rng.gen::<f64>()).collect();
    ScalarField::graph(values, &edges).expect("graph is valid")
}

/// Adds independent uniform noise in `[-delta, delta]` to every value.
pub fn perturb(field: &ScalarField, delta: f64, rng: &mut impl Rng) -> ScalarField {
    let values = field.values().iter().map(|v| v + rng.gen_range(-delta..=delta)).collect();
    field.with_values(values).expect("same domain")
}

/// Two Gaussian bumps of heights 1 and 0.6 on an `h × w` grid, with a tiny
/// index-dependent tilt so that no two values tie.
pub fn two_bumps(h: usize, w: usize) -> ScalarField {
    let bump = |y: f64, x: f64, cy: f64, cx: f64, s: f64| (-((y - cy).powi(2) + (x - cx).powi(2)) / (2.0 * s * s)).exp();
    let (hf, wf) = (h as f64, w as f64);
    let values = (0..h * w)
        .map(|i| {
            let (y, x) = ((i / w) as f64, (i % w) as f64);
            bump(y, x, hf * 0.5, wf * 0.25, wf * 0.12) + 0.6 * bump(y, x, hf * 0.5, wf * 0.75, wf * 0.12)
                + 1e-9 * i as f64
        })
        .collect();
    ScalarField::grid(&[h, w], values).expect("shape is valid")
}

/// `count` points with births in `[0, 1)` and lifetimes in `(0, 1]`.
pub fn random_diagram(count: usize, rng: &mut impl Rng) -> PersistenceDiagram {
    let points = (0..count)
        .map(|_| {
            let b = rng.gen::<f64>();
            (b, b + 1.0 - rng.gen::<f64>())
        })
        .collect();
    PersistenceDiagram::new(Filtration::Sublevel, points, vec![])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::morse::segment;
    use crate::persistence::superlevel_pairs;

    #[test]
    fn seeded_fields_repeat() {
        let a = uniform_grid(&[4, 5], &mut rng(3));
        let b = uniform_grid(&[4, 5], &mut rng(3));
        assert_eq!(a.values(), b.values());
        assert_ne!(a.values(), uniform_grid(&[4, 5], &mut rng(4)).values());
    }

    #[test]
    fn random_graph_is_connected() {
        let f = random_graph(50, 20, &mut rng(1));
        assert_eq!(f.component_count(), 1);
    }

    #[test]
    fn two_bumps_have_two_maxima() {
        let f = two_bumps(32, 32);
        let sup = superlevel_pairs(&f);
        assert_eq!(sup.essential.len(), 1);
        let big: Vec<_> = sup.pairs.iter().filter(|p| p.persistence > 0.1).collect();
        assert_eq!(big.len(), 1);
        assert!((big[0].birth - 0.6).abs() < 1e-3);
        assert!(segment(&f).region_count() >= 2);
    }
}
