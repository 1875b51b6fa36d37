//! Learning-ready encodings of hierarchies and diagrams.

mod vectorize;

pub use vectorize::{
    persistence_image, persistence_landscape, PersistenceImage, PersistenceLandscape, DEFAULT_LAYERS,
    DEFAULT_RESOLUTION, DEFAULT_SAMPLES, DEFAULT_SIGMA,
};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::hierarchy::Hierarchy;
use crate::npy;
use crate::par::{self, Exec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ChannelKind {
    MinValue,
    MaxValue,
    RegionId,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChannelInfo {
    pub level: usize,
    pub epsilon: f64,
    pub kind: ChannelKind,
    /// Observed range of the channel, for consumers that normalize.
    pub min: f64,
    pub max: f64,
}

/// Per-vertex channels, channel-major: `data[c * n + v]`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelStack {
    pub shape: Vec<usize>,
    pub channels: Vec<ChannelInfo>,
    pub data: Vec<f64>,
}

impl ChannelStack {
    pub fn channel_count(&self) -> usize {
        self.channels.len()
    }

    pub fn vertex_count(&self) -> usize {
        self.shape.iter().product()
    }

    pub fn channel(&self, c: usize) -> &[f64] {
        let n = self.vertex_count();
        &self.data[c * n..(c + 1) * n]
    }

    /// Array shape `(channels, ...domain shape)`.
    pub fn array_shape(&self) -> Vec<usize> {
        let mut s = vec![self.channels.len()];
        s.extend(&self.shape);
        s
    }

    pub fn to_npy(&self) -> Vec<u8> {
        npy::to_bytes(&self.array_shape(), &self.data)
    }

    pub fn metadata_json(&self) -> String {
        #[derive(Serialize)]
        struct Meta<'a> {
            shape: Vec<usize>,
            channels: &'a [ChannelInfo],
        }
        serde_json::to_string(&Meta { shape: self.array_shape(), channels: &self.channels }).expect("metadata serializes")
    }
}

/// Two channels per level, `f(m)` then `f(M)` of each vertex's region.
pub fn to_channels(h: &Hierarchy) -> Result<ChannelStack> {
    to_channels_with(h, false, Exec::default())
}

/// With `region_ids`, a third channel per level holds the raw region id.
pub fn to_channels_with(h: &Hierarchy, region_ids: bool, exec: Exec) -> Result<ChannelStack> {
    if !h.kind.is_grid() {
        return Err(Error::NotGrid);
    }
    let mut channels = Vec::new();
    let mut data = Vec::new();
    for (level, l) in h.levels.iter().enumerate() {
        let ids = l.segmentation.region_ids();
        let nodes = &l.dual.nodes;
        let mut push = |kind: ChannelKind, values: Vec<f64>| {
            let (min, max) = values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
            channels.push(ChannelInfo { level, epsilon: l.epsilon, kind, min, max });
            data.extend(values);
        };
        push(ChannelKind::MinValue, par::map_slice(exec, ids, |&r| nodes[r as usize].f_min));
        push(ChannelKind::MaxValue, par::map_slice(exec, ids, |&r| nodes[r as usize].f_max));
        if region_ids {
            push(ChannelKind::RegionId, ids.iter().map(|&r| r as f64).collect());
        }
    }
    Ok(ChannelStack { shape: h.shape.clone(), channels, data })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GnnNode {
    pub global_id: usize,
    pub level: usize,
    /// Region id within its level.
    pub region: usize,
    /// `[f_min, f_max, size_fraction, cheapest incident edge persistence]`
    pub features: [f64; 4],
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeType {
    Intra,
    Inter,
}

impl EdgeType {
    pub fn as_str(self) -> &'static str {
        match self {
            EdgeType::Intra => "intra",
            EdgeType::Inter => "inter",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GnnEdge {
    pub src: usize,
    pub dst: usize,
    #[serde(rename = "type")]
    pub kind: EdgeType,
    /// Dual-edge persistence; absent on inter edges.
    pub weight: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GnnGraph {
    pub nodes: Vec<GnnNode>,
    pub edges: Vec<GnnEdge>,
}

impl GnnGraph {
    pub fn count(&self, kind: EdgeType) -> usize {
        self.edges.iter().filter(|e| e.kind == kind).count()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("graph serializes")
    }

    /// `(nodes.csv, edges.csv)`; inter edges leave the weight empty.
    pub fn to_csv(&self) -> (String, String) {
        let nodes = crate::to_csv(
            &["global_id", "level", "region", "f_min", "f_max", "size_fraction", "min_edge_persistence"],
            self.nodes.iter().map(|n| {
                let [a, b, c, d] = n.features;
                (n.global_id, n.level, n.region, a, b, c, d)
            }),
        );
        let edges = crate::to_csv(
            &["src", "dst", "type", "weight"],
            self.edges.iter().map(|e| (e.src, e.dst, e.kind.as_str(), e.weight)),
        );
        (nodes, edges)
    }
}

/// Flattens the hierarchy into one graph. Nodes get dense ids level by
/// level; `prune_base` drops level 0 and the merge edges leaving it.
///
/// A region with no dual edge gets the field's value range as its cheapest
/// edge persistence, an upper bound on every finite persistence.
pub fn to_gnn_graph(h: &Hierarchy, prune_base: bool) -> GnnGraph {
    let first = usize::from(prune_base && h.levels.len() > 1);
    let n = h.vertex_count() as f64;
    let span = h.value_range.1 - h.value_range.0;

    let mut offsets = vec![0; h.levels.len()];
    let mut next = 0;
    for (level, l) in h.levels.iter().enumerate().skip(first) {
        offsets[level] = next;
        next += l.dual.node_count();
    }

    let mut nodes = Vec::with_capacity(next);
    let mut edges = Vec::new();
    for (level, l) in h.levels.iter().enumerate().skip(first) {
        let mut cheapest = vec![span; l.dual.node_count()];
        for e in &l.dual.edges {
            cheapest[e.a] = cheapest[e.a].min(e.weight);
            cheapest[e.b] = cheapest[e.b].min(e.weight);
        }
        for (node, c) in l.dual.nodes.iter().zip(cheapest) {
            nodes.push(GnnNode {
                global_id: offsets[level] + node.id,
                level,
                region: node.id,
                features: [node.f_min, node.f_max, node.size as f64 / n, c],
            });
        }
        edges.extend(l.dual.edges.iter().map(|e| GnnEdge {
            src: offsets[level] + e.a,
            dst: offsets[level] + e.b,
            kind: EdgeType::Intra,
            weight: Some(e.weight),
        }));
        edges.extend(h.merges_from(level).map(|m| GnnEdge {
            src: offsets[level] + m.from,
            dst: offsets[level + 1] + m.to,
            kind: EdgeType::Inter,
            weight: None,
        }));
    }
    GnnGraph { nodes, edges }
}
