//! Exact Euclidean distance transform.
//!
//! Squared distances are propagated one axis at a time with the lower
//! envelope of parabolas. Parabola intersections are compared as exact
//! rationals, so the integer squared distances match a brute-force scan
//! bit for bit.

use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::par::{self, Exec};

/// Occupancy grid: `true` marks an obstacle (solid) cell.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BinaryMask {
    shape: Vec<usize>,
    occupancy: Vec<bool>,
}

impl BinaryMask {
    pub fn new(shape: &[usize], occupancy: Vec<bool>) -> Result<Self> {
        if !(2..=3).contains(&shape.len()) {
            return Err(Error::Shape { shape: shape.to_vec(), what: "binary mask" });
        }
        let n: usize = shape.iter().product();
        if n == 0 {
            return Err(Error::Empty);
        }
        if occupancy.len() != n {
            return Err(Error::Mismatch(format!(
                "mask shape {shape:?} needs {n} cells, got {}",
                occupancy.len()
            )));
        }
        Ok(BinaryMask { shape: shape.to_vec(), occupancy })
    }

    /// 2D mask from rows of 0/1 (any nonzero is an obstacle).
    pub fn from_rows<R: AsRef<[u8]>>(rows: &[R]) -> Result<Self> {
        let width = rows.first().map_or(0, |r| r.as_ref().len());
        let mut occupancy = Vec::with_capacity(rows.len() * width);
        for (r, row) in rows.iter().enumerate() {
            if row.as_ref().len() != width {
                return Err(Error::Ragged(format!("mask row {r}")));
            }
            occupancy.extend(row.as_ref().iter().map(|&b| b != 0));
        }
        Self::new(&[rows.len(), width], occupancy)
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn occupancy(&self) -> &[bool] {
        &self.occupancy
    }

    pub fn obstacle_count(&self) -> usize {
        self.occupancy.iter().filter(|&&b| b).count()
    }
}

/// Distance from each cell to its nearest obstacle cell, as a grid field.
pub fn distance_transform(mask: &BinaryMask) -> Result<ScalarField> {
    distance_transform_with(mask, Exec::default())
}

pub fn distance_transform_with(mask: &BinaryMask, exec: Exec) -> Result<ScalarField> {
    let squared = squared_distance_transform(mask, exec)?;
    let values = squared.into_iter().map(|d| (d as f64).sqrt()).collect();
    ScalarField::grid_with(&mask.shape, values, exec)
}

/// Integer squared distances to the nearest obstacle.
pub fn squared_distance_transform(mask: &BinaryMask, exec: Exec) -> Result<Vec<u64>> {
    if mask.obstacle_count() == 0 {
        return Err(Error::NoObstacles);
    }
    let mut dist: Vec<Option<u64>> =
        mask.occupancy.iter().map(|&solid| solid.then_some(0)).collect();

    let n = dist.len();
    for axis in 0..mask.shape.len() {
        let extent = mask.shape[axis];
        let stride: usize = mask.shape[axis + 1..].iter().product();
        let lines = n / extent;
        let line_start = |l: usize| (l / stride) * extent * stride + l % stride;

        let snapshot = &dist;
        let transformed = par::map_range(exec, lines, |l| {
            let start = line_start(l);
            let line: Vec<Option<u64>> = (0..extent).map(|i| snapshot[start + i * stride]).collect();
            envelope_1d(&line)
        });
        for (l, line) in transformed.into_iter().enumerate() {
            let start = line_start(l);
            for (i, d) in line.into_iter().enumerate() {
                dist[start + i * stride] = d;
            }
        }
    }
    Ok(dist.into_iter().map(|d| d.expect("every cell reaches an obstacle")).collect())
}

/// Intersection abscissa of the parabolas rooted at `a < b`, as `num / den`.
fn crossing(f: &[Option<u64>], a: usize, b: usize) -> (i128, i128) {
    let fa = f[a].unwrap() as i128 + (a * a) as i128;
    let fb = f[b].unwrap() as i128 + (b * b) as i128;
    (fb - fa, 2 * (b - a) as i128)
}

/// `x <= y` for positive-denominator rationals.
fn rational_le(x: (i128, i128), y: (i128, i128)) -> bool {
    x.0 * y.1 <= y.0 * x.1
}

/// One-dimensional pass: `out[i] = min_j (i - j)^2 + f[j]` over finite `f[j]`.
fn envelope_1d(f: &[Option<u64>]) -> Vec<Option<u64>> {
    let mut hull: Vec<usize> = Vec::with_capacity(f.len());
    // bounds[k] = crossing(hull[k - 1], hull[k]); bounds[0] is unused
    let mut bounds: Vec<(i128, i128)> = Vec::with_capacity(f.len());
    for q in (0..f.len()).filter(|&q| f[q].is_some()) {
        while let Some(&top) = hull.last() {
            if hull.len() >= 2 && rational_le(crossing(f, top, q), bounds[hull.len() - 1]) {
                hull.pop();
                bounds.pop();
            } else {
                break;
            }
        }
        let bound = match hull.last() {
            Some(&top) => crossing(f, top, q),
            None => (0, 1),
        };
        hull.push(q);
        bounds.push(bound);
    }
    if hull.is_empty() {
        return vec![None; f.len()];
    }

    let mut k = 0;
    (0..f.len())
        .map(|i| {
            // advance while the next parabola takes over strictly before i
            while k + 1 < hull.len() && !rational_le((i as i128, 1), bounds[k + 1]) {
                k += 1;
            }
            let j = hull[k];
            let dx = i.abs_diff(j) as u64;
            Some(dx * dx + f[j].unwrap())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_force(mask: &BinaryMask) -> Vec<u64> {
        let shape = mask.shape();
        let coords = |mut i: usize| {
            let mut c = vec![0usize; shape.len()];
            for a in (0..shape.len()).rev() {
                c[a] = i % shape[a];
                i /= shape[a];
            }
            c
        };
        let obstacles: Vec<Vec<usize>> =
            (0..mask.occupancy().len()).filter(|&i| mask.occupancy()[i]).map(coords).collect();
        (0..mask.occupancy().len())
            .map(|i| {
                let p = coords(i);
                obstacles
                    .iter()
                    .map(|o| p.iter().zip(o).map(|(&a, &b)| (a.abs_diff(b) as u64).pow(2)).sum::<u64>())
                    .min()
                    .unwrap()
            })
            .collect()
    }

    #[test]
    fn one_by_three() {
        let mask = BinaryMask::from_rows(&[[1u8, 0, 1]]).unwrap();
        let f = distance_transform(&mask).unwrap();
        assert_eq!(f.values(), &[0.0, 1.0, 0.0]);
    }

    #[test]
    fn center_obstacle_corner_is_sqrt2() {
        let mask = BinaryMask::from_rows(&[[0u8, 0, 0], [0, 1, 0], [0, 0, 0]]).unwrap();
        let f = distance_transform(&mask).unwrap();
        assert_eq!(f.value(0), 2f64.sqrt());
        assert_eq!(f.value(1), 1.0);
        assert_eq!(f.value(4), 0.0);
    }

    #[test]
    fn all_open_is_an_error_all_solid_is_zero() {
        let open = BinaryMask::from_rows(&[[0u8, 0], [0, 0]]).unwrap();
        assert!(matches!(distance_transform(&open), Err(Error::NoObstacles)));
        let solid = BinaryMask::from_rows(&[[1u8, 1], [1, 1]]).unwrap();
        assert_eq!(distance_transform(&solid).unwrap().values(), &[0.0; 4]);
    }

    #[test]
    fn opposite_corners_of_16_cube() {
        let n = 16;
        let mut occ = vec![false; n * n * n];
        occ[0] = true;
        occ[n * n * n - 1] = true;
        let mask = BinaryMask::new(&[n, n, n], occ).unwrap();
        for exec in [Exec::Sequential, Exec::Parallel] {
            assert_eq!(squared_distance_transform(&mask, exec).unwrap(), brute_force(&mask));
        }
    }

    #[test]
    fn random_masks_match_brute_force() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for trial in 0..40 {
            let shape: Vec<usize> = if trial % 2 == 0 {
                vec![rng.gen_range(1..=16), rng.gen_range(1..=16)]
            } else {
                vec![rng.gen_range(1..=8), rng.gen_range(1..=8), rng.gen_range(1..=8)]
            };
            let n: usize = shape.iter().product();
            let density = rng.gen_range(0.01..0.5);
            let mut occ: Vec<bool> = (0..n).map(|_| rng.gen_bool(density)).collect();
            occ[rng.gen_range(0..n)] = true;
            let mask = BinaryMask::new(&shape, occ).unwrap();
            assert_eq!(
                squared_distance_transform(&mask, Exec::Parallel).unwrap(),
                brute_force(&mask),
                "shape {shape:?}"
            );
        }
    }
}
