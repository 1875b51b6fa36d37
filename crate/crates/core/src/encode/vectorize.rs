//! Fixed-size vectorizations of persistence diagrams.
//!
//! Only finite points are used; essential classes have no death.

use crate::error::{Error, Result};
use crate::npy;
use crate::persistence::PersistenceDiagram;

pub const DEFAULT_RESOLUTION: usize = 20;
pub const DEFAULT_SIGMA: f64 = 0.1;
pub const DEFAULT_LAYERS: usize = 5;
pub const DEFAULT_SAMPLES: usize = 100;

/// Sum of unweighted Gaussians centered at `(birth, death - birth)`.
///
/// `values[row * resolution + col]`: rows step through persistence, columns
/// through birth, both increasing. Samples sit at pixel centers.
#[derive(Clone, Debug, PartialEq)]
pub struct PersistenceImage {
    pub resolution: usize,
    pub sigma: f64,
    pub birth_range: (f64, f64),
    pub persistence_range: (f64, f64),
    pub values: Vec<f64>,
}

impl PersistenceImage {
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.resolution + col]
    }

    pub fn to_npy(&self) -> Vec<u8> {
        npy::to_bytes(&[self.resolution, self.resolution], &self.values)
    }
}

type Range = (f64, f64);

pub fn persistence_image(
    d: &PersistenceDiagram,
    resolution: usize,
    sigma: f64,
    ranges: Option<(Range, Range)>,
) -> Result<PersistenceImage> {
    if resolution == 0 {
        return Err(Error::InvalidParameter("image resolution must be >= 1".into()));
    }
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::InvalidParameter(format!("sigma {sigma} must be positive")));
    }
    let points: Vec<(f64, f64)> = d.points.iter().map(|&(b, d)| (b, d - b)).collect();
    let (birth_range, persistence_range) = match ranges {
        Some((b, p)) => {
            for r in [b, p] {
                if !(r.0 < r.1 && r.0.is_finite() && r.1.is_finite()) {
                    return Err(Error::InvalidParameter(format!("image range {r:?} is empty")));
                }
            }
            (b, p)
        }
        None => (
            default_axis(points.iter().map(|p| p.0), sigma),
            default_axis(points.iter().map(|p| p.1), sigma),
        ),
    };

    let centers = |(lo, hi): Range| -> Vec<f64> {
        let step = (hi - lo) / resolution as f64;
        (0..resolution).map(|i| lo + (i as f64 + 0.5) * step).collect()
    };
    let xs = centers(birth_range);
    let ys = centers(persistence_range);
    let scale = -0.5 / (sigma * sigma);
    let mut values = vec![0.0; resolution * resolution];
    for &(b, p) in &points {
        // the kernel is separable; precompute both factors
        let gx: Vec<f64> = xs.iter().map(|x| (scale * (x - b) * (x - b)).exp()).collect();
        for (row, y) in ys.iter().enumerate() {
            let gy = (scale * (y - p) * (y - p)).exp();
            for (v, g) in values[row * resolution..(row + 1) * resolution].iter_mut().zip(&gx) {
                *v += gy * g;
            }
        }
    }
    Ok(PersistenceImage { resolution, sigma, birth_range, persistence_range, values })
}

/// Bounding box grown by 3σ; a zero-width axis becomes a unit interval
/// centered on the shared coordinate.
fn default_axis(coords: impl Iterator<Item = f64>, sigma: f64) -> Range {
    let (lo, hi) = coords.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(x), b.max(x)));
    if lo > hi {
        (0.0, 1.0)
    } else if lo == hi {
        (lo - 0.5, lo + 0.5)
    } else {
        (lo - 3.0 * sigma, hi + 3.0 * sigma)
    }
}

/// `values[k * samples + i] = λ_{k+1}(grid[i])`.
#[derive(Clone, Debug, PartialEq)]
pub struct PersistenceLandscape {
    pub layers: usize,
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
}

impl PersistenceLandscape {
    pub fn samples(&self) -> usize {
        self.grid.len()
    }

    pub fn layer(&self, k: usize) -> &[f64] {
        let t = self.samples();
        &self.values[k * t..(k + 1) * t]
    }

    pub fn to_npy(&self) -> Vec<u8> {
        npy::to_bytes(&[self.layers, self.samples()], &self.values)
    }
}

pub fn persistence_landscape(
    d: &PersistenceDiagram,
    layers: usize,
    samples: usize,
    range: Option<Range>,
) -> Result<PersistenceLandscape> {
    if layers == 0 || samples < 2 {
        return Err(Error::InvalidParameter(format!(
            "landscape needs >= 1 layer and >= 2 samples, got {layers} and {samples}"
        )));
    }
    let (lo, hi) = match range {
        Some(r) if r.0 <= r.1 && r.0.is_finite() && r.1.is_finite() => r,
        Some(r) => return Err(Error::InvalidParameter(format!("landscape range {r:?} is invalid"))),
        None if d.points.is_empty() => (0.0, 1.0),
        None => d.points.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &(x, y)| (a.min(x), b.max(y))),
    };
    let step = (hi - lo) / (samples - 1) as f64;
    let grid: Vec<f64> = (0..samples).map(|i| if i + 1 == samples { hi } else { lo + i as f64 * step }).collect();

    let mut values = vec![0.0; layers * samples];
    let mut tents = Vec::with_capacity(d.points.len());
    for (i, &t) in grid.iter().enumerate() {
        tents.clear();
        tents.extend(d.points.iter().map(|&(b, d)| (t - b).min(d - t)).filter(|&v| v > 0.0));
        if tents.len() > layers {
            tents.select_nth_unstable_by(layers - 1, |a, b| b.total_cmp(a));
            tents.truncate(layers);
        }
        tents.sort_unstable_by(|a, b| b.total_cmp(a));
        for (k, &v) in tents.iter().take(layers).enumerate() {
            values[k * samples + i] = v;
        }
    }
    Ok(PersistenceLandscape { layers, grid, values })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::persistence::Filtration;

    fn diagram(points: &[(f64, f64)]) -> PersistenceDiagram {
        PersistenceDiagram::new(Filtration::Sublevel, points.to_vec(), vec![])
    }

    #[test]
    fn empty_image_is_zero() {
        let im = persistence_image(&diagram(&[]), DEFAULT_RESOLUTION, DEFAULT_SIGMA, None).unwrap();
        assert_eq!(im.values, vec![0.0; 400]);
    }

    #[test]
    fn kernel_peak_on_pixel_center() {
        // 3 pixels over [-1.5, 1.5] and [0.5, 3.5]: the middle centers are 0 and 2
        let im = persistence_image(&diagram(&[(0.0, 2.0)]), 3, 0.1, Some(((-1.5, 1.5), (0.5, 3.5)))).unwrap();
        assert_eq!(im.get(1, 1), 1.0);
        assert!(im.get(0, 1) < 1e-20);
    }

    #[test]
    fn default_ranges() {
        let im = persistence_image(&diagram(&[(0.0, 2.0), (1.0, 2.0)]), 4, 0.1, None).unwrap();
        assert_eq!(im.birth_range, (-0.30000000000000004, 1.3));
        assert_eq!(im.persistence_range, (0.7, 2.3));
        let single = persistence_image(&diagram(&[(0.0, 2.0)]), 4, 0.1, None).unwrap();
        assert_eq!(single.birth_range, (-0.5, 0.5));
        assert_eq!(single.persistence_range, (1.5, 2.5));
    }

    #[test]
    fn image_rejects_bad_parameters() {
        let d = diagram(&[(0.0, 1.0)]);
        assert!(persistence_image(&d, 0, 0.1, None).is_err());
        assert!(persistence_image(&d, 4, 0.0, None).is_err());
        assert!(persistence_image(&d, 4, 0.1, Some(((1.0, 1.0), (0.0, 1.0)))).is_err());
    }

    #[test]
    fn single_tent() {
        let l = persistence_landscape(&diagram(&[(0.0, 2.0)]), DEFAULT_LAYERS, 5, None).unwrap();
        assert_eq!(l.grid, vec![0.0, 0.5, 1.0, 1.5, 2.0]);
        assert_eq!(l.layer(0), &[0.0, 0.5, 1.0, 0.5, 0.0]);
        assert!(l.values[5..].iter().all(|&v| v == 0.0));
    }

    #[test]
    fn disjoint_tents() {
        let l = persistence_landscape(&diagram(&[(0.0, 2.0), (4.0, 6.0)]), 2, 7, None).unwrap();
        assert_eq!(l.layer(0), &[0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0]);
        assert_eq!(l.layer(1), &[0.0; 7]);
    }

    #[test]
    fn nested_tents() {
        let l = persistence_landscape(&diagram(&[(0.0, 4.0), (1.0, 3.0)]), 3, 5, None).unwrap();
        assert_eq!(l.layer(0), &[0.0, 1.0, 2.0, 1.0, 0.0]);
        assert_eq!(l.layer(1), &[0.0, 0.0, 1.0, 0.0, 0.0]);
        assert_eq!(l.layer(2), &[0.0; 5]);
    }

    #[test]
    fn empty_landscape() {
        let l = persistence_landscape(&diagram(&[]), DEFAULT_LAYERS, DEFAULT_SAMPLES, None).unwrap();
        assert_eq!((l.layers, l.samples()), (5, 100));
        assert_eq!(l.grid[0], 0.0);
        assert_eq!(l.grid[99], 1.0);
        assert!(persistence_landscape(&diagram(&[]), 0, 10, None).is_err());
        assert!(persistence_landscape(&diagram(&[]), 1, 1, None).is_err());
    }
}
