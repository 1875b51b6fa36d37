//! The `msaug` command line: augment, verify, bench, diagram and dual.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use log::info;
use serde::Serialize;
use sha2::{Digest, Sha256};

use msaug_core::dual::{build_dual_with, Forests};
use msaug_core::encode::{self, persistence_image, persistence_landscape};
use msaug_core::field::io::{load_field, load_mask};
use msaug_core::hierarchy::{
    hierarchy_from_pairs, simplify_with, thresholds_from_fractions, Hierarchy, ThresholdSchedule,
};
use msaug_core::morse::{export_segmentation, segment_with};
use msaug_core::persistence::{diagram, pairs_csv, sublevel_pairs, superlevel_pairs};
use msaug_core::{distance_transform, synth, verify, Exec, ScalarField};

pub const EXIT_OK: i32 = 0;
pub const EXIT_PROPERTY: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "msaug", version, about = "Morse-Smale segmentation hierarchies and topological encodings")]
pub struct Cli {
    /// Worker threads; 0 uses one per core.
    #[arg(long, global = true, env = "MSAUG_THREADS", default_value_t = 0)]
    pub threads: usize,

    /// Run every stage on the calling thread without rayon.
    #[arg(long, global = true)]
    pub sequential: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build the hierarchy for one input and write the selected encodings.
    Augment(AugmentArgs),
    /// Check the library against brute-force oracles on random fields.
    Verify(VerifyArgs),
    /// Time segmentation and hierarchy construction on random fields.
    Bench(BenchArgs),
    /// Print the persistence pairs of an input as CSV.
    Diagram(DumpArgs),
    /// Print the dual graph of an input as JSON.
    Dual(DualArgs),
}

#[derive(Args, Debug, Clone)]
pub struct InputArgs {
    /// Image, .npy array, graph .json, or a directory with values.csv and edges.csv.
    #[arg(long)]
    pub input: PathBuf,

    /// Treat the input as an obstacle mask and use its distance transform.
    #[arg(long)]
    pub mask: bool,
}

#[derive(Args, Debug, Clone)]
#[group(required = true, multiple = false)]
pub struct ScheduleArgs {
    /// Explicit persistence thresholds, strictly increasing.
    #[arg(long, value_delimiter = ',')]
    pub epsilons: Option<Vec<f64>>,

    /// Fractions of pairs to cancel at each level, strictly increasing in [0, 1].
    #[arg(long, value_delimiter = ',')]
    pub fractions: Option<Vec<f64>>,
}

#[derive(Args, Debug, Clone)]
pub struct AugmentArgs {
    #[command(flatten)]
    pub input: InputArgs,

    #[command(flatten)]
    pub schedule: ScheduleArgs,

    /// Output directory; must not exist unless --force is given.
    #[arg(long, short, default_value = "msaug-out")]
    pub output: PathBuf,

    /// Replace an existing output directory.
    #[arg(long)]
    pub force: bool,

    /// Write the per-level f(m)/f(M) channel stack.
    #[arg(long)]
    pub channels: bool,

    /// Add a region-id channel per level to the stack.
    #[arg(long, requires = "channels")]
    pub region_id_channels: bool,

    /// Write the hierarchical graph as JSON and CSV.
    #[arg(long)]
    pub gnn: bool,

    /// Drop the unsimplified base level from the graph.
    #[arg(long, requires = "gnn")]
    pub prune_base: bool,

    /// Write persistence images of both diagrams.
    #[arg(long)]
    pub pi: bool,

    #[arg(long, default_value_t = encode::DEFAULT_RESOLUTION)]
    pub pi_resolution: usize,

    #[arg(long, default_value_t = encode::DEFAULT_SIGMA)]
    pub pi_sigma: f64,

    /// Write persistence landscapes of both diagrams.
    #[arg(long)]
    pub landscape: bool,

    #[arg(long, default_value_t = encode::DEFAULT_LAYERS)]
    pub landscape_layers: usize,

    #[arg(long, default_value_t = encode::DEFAULT_SAMPLES)]
    pub landscape_samples: usize,
}

#[derive(Args, Debug, Clone)]
pub struct VerifyArgs {
    /// Grid side length (at most 64).
    #[arg(long, default_value_t = 16)]
    pub size: usize,

    #[arg(long, default_value_t = 100)]
    pub trials: usize,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Also write the report here.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct BenchArgs {
    /// Vertex counts.
    #[arg(long, value_delimiter = ',', default_values_t = [1usize << 16, 1 << 18, 1 << 20])]
    pub sizes: Vec<usize>,

    /// Number of simplification levels.
    #[arg(long, default_value_t = 4)]
    pub k: usize,

    /// Timings are the best of this many runs.
    #[arg(long, default_value_t = 3)]
    pub repeats: usize,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Debug, Clone)]
pub struct DumpArgs {
    #[command(flatten)]
    pub input: InputArgs,

    /// Write here instead of stdout.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct DualArgs {
    #[command(flatten)]
    pub dump: DumpArgs,

    /// Simplify at this threshold first.
    #[arg(long, default_value_t = 0.0)]
    pub epsilon: f64,
}

/// Runs a parsed command line and returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    let exec = if cli.sequential { Exec::Sequential } else { Exec::Parallel };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    let outcome = pool.install(|| match &cli.command {
        Command::Augment(a) => augment(a, exec).map(|_| EXIT_OK),
        Command::Verify(a) => run_verify(a),
        Command::Bench(a) => bench(a, exec).map(|csv| {
            print!("{csv}");
            EXIT_OK
        }),
        Command::Diagram(a) => dump_diagram(a).map(|_| EXIT_OK),
        Command::Dual(a) => dump_dual(a, exec).map(|_| EXIT_OK),
    });
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            EXIT_USAGE
        }
    }
}

pub fn load_input(args: &InputArgs) -> anyhow::Result<ScalarField> {
    let field = if args.mask {
        distance_transform(&load_mask(&args.input)?)?
    } else {
        load_field(&args.input)?
    };
    info!("loaded {} vertices ({:?}) from {}", field.len(), field.kind(), args.input.display());
    Ok(field)
}

#[derive(Clone, Debug, Serialize)]
pub struct FileEntry {
    pub name: String,
    pub bytes: usize,
    pub sha256: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct Manifest {
    pub version: &'static str,
    pub input: FileEntry,
    pub kind: msaug_core::DomainKind,
    pub shape: Vec<usize>,
    pub epsilons: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fractions: Option<Vec<f64>>,
    pub degenerate_schedule: bool,
    pub region_counts: Vec<usize>,
    pub files: Vec<FileEntry>,
}

fn sha256(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Collects output files in memory so that nothing touches disk until the
/// whole pipeline has succeeded.
#[derive(Default)]
struct Outputs {
    files: Vec<(String, Vec<u8>)>,
}

impl Outputs {
    fn add(&mut self, name: &str, bytes: impl Into<Vec<u8>>) {
        let bytes = bytes.into();
        info!("{name}: {} bytes", bytes.len());
        self.files.push((name.to_string(), bytes));
    }

    fn entries(&self) -> Vec<FileEntry> {
        let mut e: Vec<FileEntry> = self
            .files
            .iter()
            .map(|(name, b)| FileEntry { name: name.clone(), bytes: b.len(), sha256: sha256(b) })
            .collect();
        e.sort_by(|a, b| a.name.cmp(&b.name));
        e
    }
}

fn input_entry(path: &Path) -> anyhow::Result<FileEntry> {
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    // a CSV graph directory hashes its two files in order
    let bytes = if path.is_dir() {
        let mut b = fs::read(path.join("values.csv")).context("reading values.csv")?;
        b.extend(fs::read(path.join("edges.csv")).context("reading edges.csv")?);
        b
    } else {
        fs::read(path).with_context(|| format!("reading {}", path.display()))?
    };
    Ok(FileEntry { name, bytes: bytes.len(), sha256: sha256(&bytes) })
}

/// Runs the full pipeline and writes all outputs plus `manifest.json`.
pub fn augment(args: &AugmentArgs, exec: Exec) -> anyhow::Result<Manifest> {
    if args.output.exists() && !args.force {
        bail!("{} already exists (use --force to replace it)", args.output.display());
    }
    let field = load_input(&args.input)?;
    let input = input_entry(&args.input.input)?;

    let sub = sublevel_pairs(&field);
    let sup = superlevel_pairs(&field);
    let schedule = match (&args.schedule.epsilons, &args.schedule.fractions) {
        (Some(e), None) => ThresholdSchedule::new(e.clone())?,
        (None, Some(q)) => thresholds_from_fractions(&sub, &sup, q)?,
        _ => bail!("give exactly one of --epsilons and --fractions"),
    };
    let t = Instant::now();
    let h = hierarchy_from_pairs(&field, &sub, &sup, &schedule, exec);
    info!("hierarchy {:?} regions in {:.3}s", h.region_counts(), t.elapsed().as_secs_f64());

    let mut out = Outputs::default();
    let (seg_npy, regions) = export_segmentation(&h.levels[0].segmentation, &field);
    out.add("segmentation.npy", seg_npy);
    out.add("regions.json", regions);
    out.add("pairs.csv", pairs_csv(&[&sub, &sup]));
    out.add("hierarchy.json", h.to_json());
    write_encodings(args, &h, &sub, &sup, exec, &mut out)?;

    let t = Instant::now();
    let files = out.entries();
    info!("hashed outputs in {:.3}s", t.elapsed().as_secs_f64());
    let manifest = Manifest {
        version: env!("CARGO_PKG_VERSION"),
        input,
        kind: field.kind(),
        shape: field.shape(),
        epsilons: schedule.epsilons().to_vec(),
        fractions: args.schedule.fractions.clone(),
        degenerate_schedule: schedule.is_degenerate(),
        region_counts: h.region_counts(),
        files,
    };
    let t = Instant::now();
    commit(&args.output, args.force, &out, &manifest)?;
    info!("wrote {} in {:.3}s", args.output.display(), t.elapsed().as_secs_f64());
    Ok(manifest)
}

fn write_encodings(
    args: &AugmentArgs,
    h: &Hierarchy,
    sub: &msaug_core::persistence::PersistencePairSet,
    sup: &msaug_core::persistence::PersistencePairSet,
    exec: Exec,
    out: &mut Outputs,
) -> anyhow::Result<()> {
    if args.channels {
        let c = encode::to_channels_with(h, args.region_id_channels, exec)?;
        out.add("channels.npy", c.to_npy());
        out.add("channels.json", c.metadata_json());
    }
    if args.gnn {
        let g = encode::to_gnn_graph(h, args.prune_base);
        let (nodes, edges) = g.to_csv();
        out.add("gnn.json", g.to_json());
        out.add("gnn_nodes.csv", nodes);
        out.add("gnn_edges.csv", edges);
    }
    for (set, name) in [(sub, "sublevel"), (sup, "superlevel")] {
        let d = diagram(set)?;
        if args.pi {
            let im = persistence_image(&d, args.pi_resolution, args.pi_sigma, None)?;
            out.add(&format!("pi_{name}.npy"), im.to_npy());
        }
        if args.landscape {
            let l = persistence_landscape(&d, args.landscape_layers, args.landscape_samples, None)?;
            out.add(&format!("landscape_{name}.npy"), l.to_npy());
        }
    }
    Ok(())
}

/// Writes everything into a sibling temp directory, then renames it into place.
fn commit(target: &Path, force: bool, out: &Outputs, manifest: &Manifest) -> anyhow::Result<()> {
    let parent = match target.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    fs::create_dir_all(&parent).with_context(|| format!("creating {}", parent.display()))?;
    let tmp = tempfile::Builder::new()
        .prefix(".msaug-")
        .tempdir_in(&parent)
        .with_context(|| format!("creating a temp dir in {}", parent.display()))?;
    for (name, bytes) in &out.files {
        fs::write(tmp.path().join(name), bytes).with_context(|| format!("writing {name}"))?;
    }
    let json = serde_json::to_string_pretty(manifest)?;
    fs::write(tmp.path().join("manifest.json"), json).context("writing manifest.json")?;
    if force && target.exists() {
        fs::remove_dir_all(target).with_context(|| format!("removing {}", target.display()))?;
    }
    let staged = tmp.keep();
    if let Err(e) = fs::rename(&staged, target) {
        let _ = fs::remove_dir_all(&staged);
        return Err(e).with_context(|| format!("moving outputs to {}", target.display()));
    }
    Ok(())
}

fn run_verify(args: &VerifyArgs) -> anyhow::Result<i32> {
    if args.size > 64 {
        bail!("--size must be at most 64");
    }
    let report = verify::run(args.size, args.trials, args.seed);
    let json = report.to_json();
    if let Some(path) = &args.report {
        fs::write(path, &json).with_context(|| format!("writing {}", path.display()))?;
    }
    println!("{json}");
    if let Some(p) = report.first_failure() {
        eprintln!("property {} failed", p.name);
        return Ok(EXIT_PROPERTY);
    }
    Ok(EXIT_OK)
}

/// Most square `(h, w)` with `h * w = n`.
pub fn grid_shape(n: usize) -> [usize; 2] {
    let mut h = (n as f64).sqrt() as usize;
    while h > 1 && n % h != 0 {
        h -= 1;
    }
    [h.max(1), n / h.max(1)]
}

/// Evenly spaced fractions `1/k, 2/k, ..., 1`.
pub fn bench_fractions(k: usize) -> Vec<f64> {
    (1..=k).map(|i| i as f64 / k as f64).collect()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Timing {
    pub n: usize,
    pub t_segment: f64,
    pub t_hierarchy: f64,
}

/// Best-of-`repeats` timings of segmentation and of the full hierarchy
/// (pairs, schedule, levels) on a uniform random field of `n` vertices.
pub fn time_pipeline(n: usize, k: usize, repeats: usize, seed: u64, exec: Exec) -> anyhow::Result<Timing> {
    let field = synth::uniform_grid(&grid_shape(n), &mut synth::rng(seed));
    let fractions = bench_fractions(k);
    let (mut t_segment, mut t_hierarchy) = (f64::INFINITY, f64::INFINITY);
    for _ in 0..repeats.max(1) {
        let t = Instant::now();
        std::hint::black_box(segment_with(&field, exec));
        t_segment = t_segment.min(t.elapsed().as_secs_f64());

        let t = Instant::now();
        let sub = sublevel_pairs(&field);
        let sup = superlevel_pairs(&field);
        let schedule = thresholds_from_fractions(&sub, &sup, &fractions)?;
        std::hint::black_box(hierarchy_from_pairs(&field, &sub, &sup, &schedule, exec));
        t_hierarchy = t_hierarchy.min(t.elapsed().as_secs_f64());
    }
    Ok(Timing { n, t_segment, t_hierarchy })
}

pub fn bench(args: &BenchArgs, exec: Exec) -> anyhow::Result<String> {
    let mut csv = String::from("n,t_segment,t_hierarchy\n");
    for &n in &args.sizes {
        if n == 0 {
            bail!("bench sizes must be positive");
        }
        let t = time_pipeline(n, args.k, args.repeats, args.seed, exec)?;
        csv.push_str(&format!("{},{:.6},{:.6}\n", t.n, t.t_segment, t.t_hierarchy));
    }
    Ok(csv)
}

fn emit(output: &Option<PathBuf>, text: &str) -> anyhow::Result<()> {
    match output {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn dump_diagram(args: &DumpArgs) -> anyhow::Result<()> {
    let field = load_input(&args.input)?;
    emit(&args.output, &pairs_csv(&[&sublevel_pairs(&field), &superlevel_pairs(&field)]))
}

fn dump_dual(args: &DualArgs, exec: Exec) -> anyhow::Result<()> {
    if args.epsilon.is_nan() || args.epsilon < 0.0 {
        bail!("--epsilon must be >= 0");
    }
    let field = load_input(&args.dump.input)?;
    let (sub, sup) = (sublevel_pairs(&field), superlevel_pairs(&field));
    let forests = Forests::new(&sub, &sup)?;
    let seg = simplify_with(&segment_with(&field, exec), &forests, args.epsilon, exec);
    let dual = build_dual_with(&seg, &field, &forests, exec)?;
    emit(&args.dump.output, &(dual.to_json() + "\n"))
}
