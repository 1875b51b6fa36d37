//! Scalar fields over grids and graphs.
//!
//! A [`ScalarField`] stores one value per vertex together with a strict total
//! order (`order_rank`) that breaks value ties by vertex index. Everything
//! downstream compares vertices through that rank, never through raw values.

mod edt;
pub mod io;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par::{self, Exec};

pub use edt::{distance_transform, distance_transform_with, BinaryMask};

/// Sentinel used in dense `u32` vertex maps.
pub const NONE: u32 = u32::MAX;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DomainKind {
    Grid2d,
    Grid3d,
    Graph,
}

impl DomainKind {
    pub fn is_grid(self) -> bool {
        !matches!(self, DomainKind::Graph)
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Domain {
    /// Row-major `rows x cols`, 4-connected.
    Grid2 { rows: usize, cols: usize },
    /// Row-major `depth x rows x cols`, 6-connected.
    Grid3 { depth: usize, rows: usize, cols: usize },
    /// Symmetric adjacency in CSR form with sorted neighbor lists.
    Graph { offsets: Vec<usize>, targets: Vec<u32> },
}

/// One scalar per vertex plus the adjacency and a tie-free vertex order.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarField {
    domain: Domain,
    values: Vec<f64>,
    rank: Vec<u32>,
    order: Vec<u32>,
}

impl ScalarField {
    /// Builds a grid field from row-major values. `shape` is `[rows, cols]`
    /// or `[depth, rows, cols]`.
    pub fn grid(shape: &[usize], values: Vec<f64>) -> Result<Self> {
        Self::grid_with(shape, values, Exec::default())
    }

    pub fn grid_with(shape: &[usize], values: Vec<f64>, exec: Exec) -> Result<Self> {
        let domain = match *shape {
            [rows, cols] => Domain::Grid2 { rows, cols },
            [depth, rows, cols] => Domain::Grid3 { depth, rows, cols },
            _ => {
                return Err(Error::Shape { shape: shape.to_vec(), what: "grid field" });
            }
        };
        let n: usize = shape.iter().product();
        if n == 0 {
            return Err(Error::Empty);
        }
        if values.len() != n {
            return Err(Error::Mismatch(format!(
                "shape {shape:?} needs {n} values, got {}",
                values.len()
            )));
        }
        check_vertex_count(n)?;
        check_finite(&values, |i| grid_location(shape, i))?;
        Ok(Self::assemble(domain, values, exec))
    }

    /// Builds a 2D grid field from nested rows.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let height = rows.len();
        let width = rows.first().map_or(0, |r| r.as_ref().len());
        let mut values = Vec::with_capacity(height * width);
        for (r, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != width {
                return Err(Error::Ragged(format!(
                    "row {r} has {} entries, expected {width}",
                    row.len()
                )));
            }
            values.extend_from_slice(row);
        }
        Self::grid(&[height, width], values)
    }

    /// Builds a graph field. Duplicate and reversed edges collapse into one
    /// undirected edge.
    pub fn graph(values: Vec<f64>, edges: &[(usize, usize)]) -> Result<Self> {
        Self::graph_with(values, edges, Exec::default())
    }

    pub fn graph_with(values: Vec<f64>, edges: &[(usize, usize)], exec: Exec) -> Result<Self> {
        let n = values.len();
        if n == 0 {
            return Err(Error::Empty);
        }
        check_vertex_count(n)?;
        check_finite(&values, |i| format!("vertex {i}"))?;

        let mut undirected = Vec::with_capacity(edges.len());
        for &(a, b) in edges {
            if a >= n || b >= n {
                return Err(Error::EndpointOutOfRange(a, b, n));
            }
            if a == b {
                return Err(Error::SelfLoop(a));
            }
            undirected.push((a.min(b) as u32, a.max(b) as u32));
        }
        undirected.sort_unstable();
        undirected.dedup();

        let mut degree = vec![0usize; n];
        for &(a, b) in &undirected {
            degree[a as usize] += 1;
            degree[b as usize] += 1;
        }
        if n > 1 {
            if let Some(v) = degree.iter().position(|&d| d == 0) {
                return Err(Error::IsolatedVertex(v));
            }
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut fill = offsets.clone();
        let mut targets = vec![0u32; undirected.len() * 2];
        for &(a, b) in &undirected {
            targets[fill[a as usize]] = b;
            fill[a as usize] += 1;
            targets[fill[b as usize]] = a;
            fill[b as usize] += 1;
        }
        for v in 0..n {
            targets[offsets[v]..offsets[v + 1]].sort_unstable();
        }
        Ok(Self::assemble(Domain::Graph { offsets, targets }, values, exec))
    }

    fn assemble(domain: Domain, values: Vec<f64>, exec: Exec) -> Self {
        let n = values.len();
        let mut order: Vec<u32> = (0..n as u32).collect();
        par::sort_unstable_by(exec, &mut order, |&a, &b| {
            cmp_by_value(&values, a as usize, b as usize)
        });
        let mut rank = vec![0u32; n];
        for (r, &v) in order.iter().enumerate() {
            rank[v as usize] = r as u32;
        }
        ScalarField { domain, values, rank, order }
    }

    /// Same domain, new values.
    pub fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        if values.len() != self.len() {
            return Err(Error::Mismatch(format!(
                "field has {} vertices, got {} values",
                self.len(),
                values.len()
            )));
        }
        let shape = self.shape();
        check_finite(&values, |i| match self.kind() {
            DomainKind::Graph => format!("vertex {i}"),
            _ => grid_location(&shape, i),
        })?;
        Ok(Self::assemble(self.domain.clone(), values, Exec::default()))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn kind(&self) -> DomainKind {
        match self.domain {
            Domain::Grid2 { .. } => DomainKind::Grid2d,
            Domain::Grid3 { .. } => DomainKind::Grid3d,
            Domain::Graph { .. } => DomainKind::Graph,
        }
    }

    /// Grid dimensions (slowest axis first), or `[n]` for graphs.
    pub fn shape(&self) -> Vec<usize> {
        match self.domain {
            Domain::Grid2 { rows, cols } => vec![rows, cols],
            Domain::Grid3 { depth, rows, cols } => vec![depth, rows, cols],
            Domain::Graph { .. } => vec![self.len()],
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn value(&self, v: usize) -> f64 {
        self.values[v]
    }

    /// Position of every vertex in the tie-broken order.
    pub fn ranks(&self) -> &[u32] {
        &self.rank
    }

    #[inline]
    pub fn rank(&self, v: usize) -> u32 {
        self.rank[v]
    }

    /// Vertices sorted by increasing rank.
    pub fn order(&self) -> &[u32] {
        &self.order
    }

    /// Neighbors of `v` in increasing index order.
    #[inline]
    pub fn neighbors(&self, v: usize) -> Neighbors<'_> {
        match self.domain {
            Domain::Grid2 { rows, cols } => {
                let (r, c) = (v / cols, v % cols);
                let mut n = Neighbors::inline();
                if r > 0 {
                    n.push(v - cols);
                }
                if c > 0 {
                    n.push(v - 1);
                }
                if c + 1 < cols {
                    n.push(v + 1);
                }
                if r + 1 < rows {
                    n.push(v + cols);
                }
                n
            }
            Domain::Grid3 { depth, rows, cols } => {
                let plane = rows * cols;
                let (z, rem) = (v / plane, v % plane);
                let (r, c) = (rem / cols, rem % cols);
                let mut n = Neighbors::inline();
                if z > 0 {
                    n.push(v - plane);
                }
                if r > 0 {
                    n.push(v - cols);
                }
                if c > 0 {
                    n.push(v - 1);
                }
                if c + 1 < cols {
                    n.push(v + 1);
                }
                if r + 1 < rows {
                    n.push(v + cols);
                }
                if z + 1 < depth {
                    n.push(v + plane);
                }
                n
            }
            Domain::Graph { ref offsets, ref targets } => {
                Neighbors(NeighborsInner::Slice(targets[offsets[v]..offsets[v + 1]].iter()))
            }
        }
    }

    /// Undirected edges `(u, v)` with `u < v`, in increasing `(u, v)` order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.len()).flat_map(move |u| self.neighbors(u).filter(move |&v| v > u).map(move |v| (u, v)))
    }

    pub fn edge_count(&self) -> usize {
        match self.domain {
            Domain::Grid2 { rows, cols } => rows * cols.saturating_sub(1) + cols * rows.saturating_sub(1),
            Domain::Grid3 { depth, rows, cols } => {
                depth * rows * cols.saturating_sub(1)
                    + depth * cols * rows.saturating_sub(1)
                    + rows * cols * depth.saturating_sub(1)
            }
            Domain::Graph { ref targets, .. } => targets.len() / 2,
        }
    }

    /// Vertex with the lowest rank.
    pub fn global_min(&self) -> usize {
        self.order[0] as usize
    }

    /// Vertex with the highest rank.
    pub fn global_max(&self) -> usize {
        self.order[self.len() - 1] as usize
    }

    /// `(min, max)` of the raw values.
    pub fn value_range(&self) -> (f64, f64) {
        (self.values[self.global_min()], self.values[self.global_max()])
    }

    /// Number of connected components of the domain.
    pub fn component_count(&self) -> usize {
        match self.domain {
            Domain::Graph { .. } => {
                let mut seen = vec![false; self.len()];
                let mut stack = Vec::new();
                let mut count = 0;
                for s in 0..self.len() {
                    if seen[s] {
                        continue;
                    }
                    count += 1;
                    seen[s] = true;
                    stack.push(s);
                    while let Some(v) = stack.pop() {
                        for u in self.neighbors(v) {
                            if !seen[u] {
                                seen[u] = true;
                                stack.push(u);
                            }
                        }
                    }
                }
                count
            }
            _ => 1,
        }
    }

    /// Edge list of a graph domain, `None` for grids.
    pub fn graph_edges(&self) -> Option<Vec<(usize, usize)>> {
        match self.domain {
            Domain::Graph { .. } => Some(self.edges().collect()),
            _ => None,
        }
    }
}

/// `(value, index)` comparison that defines `order_rank`.
#[inline]
fn cmp_by_value(values: &[f64], a: usize, b: usize) -> std::cmp::Ordering {
    values[a]
        .partial_cmp(&values[b])
        .expect("field values are finite")
        .then(a.cmp(&b))
}

fn check_vertex_count(n: usize) -> Result<()> {
    if n >= NONE as usize {
        return Err(Error::InvalidParameter(format!("{n} vertices exceeds the supported maximum")));
    }
    Ok(())
}

fn check_finite(values: &[f64], location: impl Fn(usize) -> String) -> Result<()> {
    match values.iter().position(|v| !v.is_finite()) {
        Some(i) => Err(Error::NonFinite { value: values[i], location: location(i) }),
        None => Ok(()),
    }
}

fn grid_location(shape: &[usize], mut index: usize) -> String {
    let mut coords = vec![0; shape.len()];
    for (axis, &extent) in shape.iter().enumerate().rev() {
        coords[axis] = index % extent.max(1);
        index /= extent.max(1);
    }
    let parts: Vec<String> = coords.iter().map(|c| c.to_string()).collect();
    format!("({})", parts.join(", "))
}

/// Iterator over a vertex's neighbors.
pub struct Neighbors<'a>(NeighborsInner<'a>);

enum NeighborsInner<'a> {
    Inline { buf: [u32; 6], len: u8, pos: u8 },
    Slice(std::slice::Iter<'a, u32>),
}

impl Neighbors<'_> {
    fn inline() -> Self {
        Neighbors(NeighborsInner::Inline { buf: [0; 6], len: 0, pos: 0 })
    }

    #[inline]
    fn push(&mut self, v: usize) {
        if let NeighborsInner::Inline { buf, len, .. } = &mut self.0 {
            buf[*len as usize] = v as u32;
            *len += 1;
        }
    }
}

impl Iterator for Neighbors<'_> {
    type Item = usize;

    #[inline]
    fn next(&mut self) -> Option<usize> {
        match &mut self.0 {
            NeighborsInner::Inline { buf, len, pos } => {
                if pos < len {
                    let v = buf[*pos as usize];
                    *pos += 1;
                    Some(v as usize)
                } else {
                    None
                }
            }
            NeighborsInner::Slice(it) => it.next().map(|&v| v as usize),
        }
    }
}
