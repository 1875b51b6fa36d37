//! Readers and writers for fields and masks.
//!
//! Supported inputs: PNG/PGM images (8/16-bit gray, RGB converted with
//! ITU-R 601 luma weights), `.npy` arrays, graphs as JSON
//! `{values: [...], edges: [[i, j], ...]}` or as a directory holding
//! `values.csv` and `edges.csv`.

use std::path::Path;

use image::DynamicImage;
use serde::{Deserialize, Serialize};

use super::{BinaryMask, DomainKind, ScalarField};
use crate::error::{Error, Result};
use crate::npy::{self, DenseArray};

const LUMA_601: [f64; 3] = [0.299, 0.587, 0.114];

/// Builds a grid field from a dense array. One-dimensional arrays become a
/// single-row 2D grid.
pub fn load_grid_field(array: DenseArray, kind: DomainKind) -> Result<ScalarField> {
    let shape = match (kind, array.shape.len()) {
        (DomainKind::Grid2d, 1) => vec![1, array.shape[0]],
        (DomainKind::Grid2d, 2) | (DomainKind::Grid3d, 3) => array.shape.clone(),
        _ => return Err(Error::Shape { shape: array.shape, what: "grid field" }),
    };
    ScalarField::grid(&shape, array.data)
}

/// Decodes an encoded image (PNG, PGM, ...) into a 2D field.
pub fn image_from_bytes(bytes: &[u8]) -> Result<ScalarField> {
    grayscale_field(image::load_from_memory(bytes)?)
}

pub fn load_image(path: &Path) -> Result<ScalarField> {
    grayscale_field(image::open(path)?)
}

fn grayscale_field(img: DynamicImage) -> Result<ScalarField> {
    let (w, h) = (img.width() as usize, img.height() as usize);
    let values: Vec<f64> = match img {
        DynamicImage::ImageLuma8(buf) => buf.pixels().map(|p| f64::from(p.0[0])).collect(),
        DynamicImage::ImageLumaA8(buf) => buf.pixels().map(|p| f64::from(p.0[0])).collect(),
        DynamicImage::ImageLuma16(buf) => buf.pixels().map(|p| f64::from(p.0[0])).collect(),
        DynamicImage::ImageLumaA16(buf) => buf.pixels().map(|p| f64::from(p.0[0])).collect(),
        DynamicImage::ImageRgb16(buf) => buf.pixels().map(|p| luma(p.0.map(f64::from))).collect(),
        DynamicImage::ImageRgba16(buf) => {
            buf.pixels().map(|p| luma([p.0[0], p.0[1], p.0[2]].map(f64::from))).collect()
        }
        other => other.to_rgb8().pixels().map(|p| luma(p.0.map(f64::from))).collect(),
    };
    ScalarField::grid(&[h, w], values)
}

fn luma(rgb: [f64; 3]) -> f64 {
    rgb.iter().zip(LUMA_601).map(|(c, w)| c * w).sum()
}

/// Reads a `.npy` array as a grid field (1D, 2D or 3D).
pub fn load_npy_field(path: &Path) -> Result<ScalarField> {
    let array = npy::read(path)?;
    let kind = if array.shape.len() == 3 { DomainKind::Grid3d } else { DomainKind::Grid2d };
    load_grid_field(array, kind)
}

/// Reads an occupancy mask from `.npy` or an image; nonzero cells are obstacles.
pub fn load_mask(path: &Path) -> Result<BinaryMask> {
    if has_extension(path, &["npy"]) {
        let array = npy::read(path)?;
        let shape = if array.shape.len() == 1 { vec![1, array.shape[0]] } else { array.shape };
        BinaryMask::new(&shape, array.data.iter().map(|&v| v != 0.0).collect())
    } else {
        let field = load_image(path)?;
        BinaryMask::new(&field.shape(), field.values().iter().map(|&v| v != 0.0).collect())
    }
}

#[derive(Deserialize)]
struct GraphFile {
    values: Vec<f64>,
    edges: Vec<[usize; 2]>,
}

pub fn graph_from_json(text: &str) -> Result<ScalarField> {
    let g: GraphFile = serde_json::from_str(text)?;
    let edges: Vec<(usize, usize)> = g.edges.iter().map(|e| (e[0], e[1])).collect();
    ScalarField::graph(g.values, &edges)
}

pub fn load_graph_json(path: &Path) -> Result<ScalarField> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    graph_from_json(&text).map_err(|e| match e {
        Error::Json(j) => Error::parse(path, j),
        other => other,
    })
}

/// Reads `values.csv` (one value per row) and `edges.csv` (`i,j` per row).
/// A non-numeric first row is treated as a header.
pub fn load_graph_csv(values_path: &Path, edges_path: &Path) -> Result<ScalarField> {
    let values: Vec<f64> = read_csv_rows(values_path, 1)?.into_iter().map(|r| r[0]).collect();
    let mut edges = Vec::new();
    for row in read_csv_rows(edges_path, 2)? {
        if row.iter().any(|&x| x < 0.0 || x.fract() != 0.0) {
            return Err(Error::parse(edges_path, format!("edge endpoints must be indices, got {row:?}")));
        }
        edges.push((row[0] as usize, row[1] as usize));
    }
    ScalarField::graph(values, &edges)
}

fn read_csv_rows(path: &Path, columns: usize) -> Result<Vec<Vec<f64>>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Error::parse(path, e))?;
    let mut rows = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::parse(path, e))?;
        if record.len() < columns {
            return Err(Error::parse(path, format!("row {} has {} columns, need {columns}", line + 1, record.len())));
        }
        let parsed: std::result::Result<Vec<f64>, _> =
            record.iter().take(columns).map(|s| s.parse::<f64>()).collect();
        match parsed {
            Ok(row) => rows.push(row),
            Err(_) if line == 0 => continue,
            Err(e) => return Err(Error::parse(path, format!("row {}: {e}", line + 1))),
        }
    }
    Ok(rows)
}

/// Loads a field, choosing the reader from the path: a directory is a CSV
/// graph, `.json` a JSON graph, `.npy` a dense grid, anything else an image.
pub fn load_field(path: &Path) -> Result<ScalarField> {
    if path.is_dir() {
        load_graph_csv(&path.join("values.csv"), &path.join("edges.csv"))
    } else if !path.exists() {
        Err(Error::io(path, std::io::Error::from(std::io::ErrorKind::NotFound)))
    } else if has_extension(path, &["json"]) {
        load_graph_json(path)
    } else if has_extension(path, &["npy"]) {
        load_npy_field(path)
    } else {
        load_image(path)
    }
}

fn has_extension(path: &Path, exts: &[&str]) -> bool {
    path.extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| exts.iter().any(|x| e.eq_ignore_ascii_case(x)))
}

/// Metadata written next to a field snapshot array.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SnapshotMeta {
    pub kind: DomainKind,
    pub shape: Vec<usize>,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edges: Option<Vec<[usize; 2]>>,
}

/// Field snapshot: the values as `.npy` bytes and the JSON metadata.
pub fn snapshot(field: &ScalarField) -> (Vec<u8>, String) {
    let meta = SnapshotMeta {
        kind: field.kind(),
        shape: field.shape(),
        n: field.len(),
        edges: field.graph_edges().map(|es| es.into_iter().map(|(a, b)| [a, b]).collect()),
    };
    let json = serde_json::to_string_pretty(&meta).expect("metadata serializes");
    (npy::to_bytes(&field.shape(), field.values()), json)
}

pub fn from_snapshot(npy_bytes: &[u8], meta_json: &str) -> Result<ScalarField> {
    let meta: SnapshotMeta = serde_json::from_str(meta_json)?;
    let array = npy::from_bytes(npy_bytes)?;
    if array.data.len() != meta.n {
        return Err(Error::Mismatch(format!("metadata says {} vertices, array has {}", meta.n, array.data.len())));
    }
    match meta.kind {
        DomainKind::Graph => {
            let edges: Vec<(usize, usize)> =
                meta.edges.unwrap_or_default().iter().map(|e| (e[0], e[1])).collect();
            ScalarField::graph(array.data, &edges)
        }
        _ => ScalarField::grid(&meta.shape, array.data),
    }
}

pub fn write_snapshot(field: &ScalarField, dir: &Path, stem: &str) -> Result<()> {
    let (bytes, json) = snapshot(field);
    let npy_path = dir.join(format!("{stem}.npy"));
    std::fs::write(&npy_path, bytes).map_err(|e| Error::io(&npy_path, e))?;
    let json_path = dir.join(format!("{stem}.json"));
    std::fs::write(&json_path, json).map_err(|e| Error::io(&json_path, e))
}

pub fn read_snapshot(dir: &Path, stem: &str) -> Result<ScalarField> {
    let npy_path = dir.join(format!("{stem}.npy"));
    let json_path = dir.join(format!("{stem}.json"));
    let bytes = std::fs::read(&npy_path).map_err(|e| Error::io(&npy_path, e))?;
    let json = std::fs::read_to_string(&json_path).map_err(|e| Error::io(&json_path, e))?;
    from_snapshot(&bytes, &json)
}
