//! Command-line interface.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{ArgGroup, Args, Parser, Subcommand};

use crate::discrepancy::{discrepancy_curve, DEFAULT_EXTREME_CAP};
use crate::error::{Error, Result};
use crate::fmt::num;
use crate::partitions::{two_length_counts, KakutaniRefinements, DEFAULT_SIZE_CAP};
use crate::planar_sets::io::{read_set, write_pgm, write_set};
use crate::planar_sets::{steiner_polygon, steiner_raster_with, GridSpec, PlanarSet, Rearrangement};
use crate::process::{
    checkpoint_probe, compare_sequences, comparison_csv, frame_path, frame_raster, run_process_observed, trace_csv,
    Backend, ProcessConfig, SeedSpec, BUILTIN_SEEDS, DEFAULT_GRID_SIZE,
};
use crate::registry::{parse_alpha, SequenceRegistry};
use crate::sequences::{to_direction, DirectionAngle};

const AFTER_HELP: &str = "\
Sequence ids: kf, vdc:<base> (or vdc<base>), kronecker:<alpha|gamma>, random:<seed>,
constant:<x>, geometric:<x1>/<ratio>, file:<path> (one value in [0,1] per line, # comments).
Numbers are written with 15 significant digits.";

#[derive(Debug, Parser)]
#[command(name = "kf-steiner", version, about = "Steiner symmetrization processes driven by low-discrepancy sequences", after_help = AFTER_HELP)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the first N points of a sequence and their directions (CSV `k,x,theta`).
    Seq(SeqArgs),
    /// Interval counts of successive Kakutani refinements (CSV `level,t,l,s`).
    Partition(PartitionArgs),
    /// Star and extreme discrepancy of sequence prefixes (CSV `N,d_star,d_extreme,normalized`).
    Disc(DiscArgs),
    /// Steiner-symmetrize one set in one direction.
    Symmetrize(SymmetrizeArgs),
    /// Run a Steiner process and write its trace.
    Process(ProcessArgs),
    /// Run one process per sequence on the same seed (CSV `step,d1_to_ball:<id>,mu:<id>,...`).
    Compare(CompareArgs),
    /// Symmetry defects at the kf checkpoints (CSV `k,step,theta,direction_ok,defect`).
    Checkpoints(CheckpointArgs),
}

#[derive(Debug, Args)]
pub struct KindArgs {
    /// Sequence kind: kf, vdc, kronecker, or any full sequence id.
    #[arg(long, default_value = "kf")]
    pub kind: String,
    /// Base for `--kind vdc`.
    #[arg(long)]
    pub base: Option<u32>,
    /// Irrational for `--kind kronecker`: a number or `gamma`.
    #[arg(long, value_parser = parse_alpha_arg)]
    pub alpha: Option<String>,
}

impl KindArgs {
    fn sequence_id(&self) -> Result<String> {
        match (self.kind.as_str(), self.base, &self.alpha) {
            ("vdc", b, None) => Ok(format!("vdc:{}", b.unwrap_or(2))),
            ("kronecker", None, a) => Ok(format!("kronecker:{}", a.as_deref().unwrap_or("gamma"))),
            (k, None, None) => Ok(k.to_string()),
            (k, _, _) => Err(Error::Domain(format!(
                "--base applies to vdc and --alpha to kronecker, not to `{k}`"
            ))),
        }
    }
}

fn parse_alpha_arg(s: &str) -> std::result::Result<String, String> {
    parse_alpha(s).map(|_| s.to_string()).map_err(|e| e.to_string())
}

fn parse_open_unit(s: &str) -> std::result::Result<f64, String> {
    let a = parse_alpha(s).map_err(|e| e.to_string())?;
    if a > 0.0 && a < 1.0 {
        Ok(a)
    } else {
        Err(format!("alpha must lie in (0, 1), got {s}"))
    }
}

fn parse_sample_size(s: &str) -> std::result::Result<usize, String> {
    match s.trim().parse::<usize>() {
        Ok(n) if n >= 2 => Ok(n),
        Ok(n) => Err(format!("sample size {n} < 2")),
        Err(_) => Err(format!("`{s}` is not a sample size")),
    }
}

fn parse_grid(s: &str) -> std::result::Result<GridSpec, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_rearrangement(s: &str) -> std::result::Result<Rearrangement, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_backend(s: &str) -> std::result::Result<Backend, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Debug, Args)]
pub struct SeqArgs {
    #[command(flatten)]
    pub kind: KindArgs,
    /// Number of points.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub n: u64,
    /// Output CSV path (stdout when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PartitionArgs {
    /// Split ratio in (0, 1), or `gamma`.
    #[arg(long, value_parser = parse_open_unit)]
    pub alpha: f64,
    /// Last refinement level.
    #[arg(long)]
    pub level: u32,
    /// Output CSV path (stdout when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Write the breakpoints of the last level instead (CSV `level,index,breakpoint`).
    #[arg(long)]
    pub dump_breakpoints: bool,
    /// Largest number of intervals to build.
    #[arg(long, default_value_t = DEFAULT_SIZE_CAP)]
    pub cap: usize,
}

#[derive(Debug, Args)]
pub struct DiscArgs {
    #[command(flatten)]
    pub kind: KindArgs,
    /// Comma-separated sample sizes, each >= 2.
    #[arg(long, required = true, value_delimiter = ',', value_parser = parse_sample_size)]
    pub ns: Vec<usize>,
    /// Also compute the extreme (two-sided) discrepancy.
    #[arg(long)]
    pub extreme: bool,
    /// Largest N for which the extreme discrepancy is computed.
    #[arg(long, default_value_t = DEFAULT_EXTREME_CAP)]
    pub extreme_cap: usize,
    /// Output CSV path (stdout when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("direction").required(true).args(["theta", "x"])))]
pub struct SymmetrizeArgs {
    /// Input set: polygon text (`x y` per line) or PGM (P2/P5).
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Direction angle in radians.
    #[arg(long, allow_hyphen_values = true)]
    pub theta: Option<f64>,
    /// Sequence value in [0, 1]; the direction is `pi * x`.
    #[arg(long)]
    pub x: Option<f64>,
    /// Output path; written in the input's format.
    #[arg(long)]
    pub out: PathBuf,
    /// Column rearrangement for rasters: run or layer-cake.
    #[arg(long, default_value = "run", value_parser = parse_rearrangement)]
    pub rearrangement: Rearrangement,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// `builtin:<name>` or a path to a polygon or PGM file.
    #[arg(long)]
    pub seed: String,
    /// Number of symmetrization steps.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub steps: u64,
    /// Record metrics every this many steps (plus step 0 and the last step).
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub cadence: u64,
    /// Raster grid `WxH:h`, centered at the origin; fitted to the seed when absent.
    #[arg(long, value_parser = parse_grid)]
    pub grid: Option<GridSpec>,
    /// Set representation: auto, polygon or raster.
    #[arg(long, default_value = "auto", value_parser = parse_backend)]
    pub backend: Backend,
    /// Column rearrangement for rasters: run or layer-cake.
    #[arg(long, default_value = "run", value_parser = parse_rearrangement)]
    pub rearrangement: Rearrangement,
}

impl RunArgs {
    fn config(&self, sequence: String) -> Result<ProcessConfig> {
        let seed: SeedSpec = self.seed.parse()?;
        if let SeedSpec::Builtin(name) = &seed {
            crate::process::builtin_seed(name)?;
        }
        Ok(ProcessConfig {
            sequence,
            seed,
            steps: self.steps,
            cadence: self.cadence,
            grid: self.grid,
            backend: self.backend,
            rearrangement: self.rearrangement,
        })
    }
}

#[derive(Debug, Args)]
pub struct ProcessArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// Direction sequence id.
    #[arg(long, default_value = "kf")]
    pub kind: String,
    /// Output directory for `trace.csv` and frames (trace to stdout when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Dump `frame_<step>.pgm` at every recorded step (needs --out).
    #[arg(long, requires = "out")]
    pub frames: bool,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// Comma-separated sequence ids, at least two.
    #[arg(long, value_delimiter = ',', num_args = 1.., required = true)]
    pub kinds: Vec<String>,
    /// Runs executed concurrently.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub jobs: u64,
    /// Output directory for `compare.csv` and per-run traces (table to stdout when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CheckpointArgs {
    /// `builtin:<name>` or a path to a polygon or PGM file.
    #[arg(long, default_value = "builtin:offset-square")]
    pub seed: String,
    /// Probe checkpoints k = 1..=max-k.
    #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u32).range(1..=34))]
    pub max_k: u32,
    /// Raster grid `WxH:h`; fitted to the seed when absent.
    #[arg(long, value_parser = parse_grid)]
    pub grid: Option<GridSpec>,
    /// Set representation: auto, polygon or raster.
    #[arg(long, default_value = "auto", value_parser = parse_backend)]
    pub backend: Backend,
    /// Output CSV path (stdout when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Error::io(p, e)),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| Error::io("<stdout>", e))
        }
    }
}

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

/// Executes a parsed command line.
pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Seq(a) => seq(a),
        Command::Partition(a) => partition(a),
        Command::Disc(a) => disc(a),
        Command::Symmetrize(a) => symmetrize(a),
        Command::Process(a) => process(a),
        Command::Compare(a) => compare(a),
        Command::Checkpoints(a) => checkpoints(a),
    }
}

fn seq(a: SeqArgs) -> Result<()> {
    let s = SequenceRegistry::standard().build(&a.kind.sequence_id()?)?;
    let n = usize::try_from(a.n).map_err(|_| Error::Overflow(format!("n = {}", a.n)))?;
    let mut out = String::from("k,x,theta\n");
    for (k, x) in s.take(n)?.into_iter().enumerate() {
        let theta = to_direction(x)?.theta();
        out.push_str(&format!("{},{},{}\n", k + 1, num(x), num(theta)));
    }
    emit(a.out.as_deref(), &out)
}

fn partition(a: PartitionArgs) -> Result<()> {
    let mut out = String::new();
    let mut last = None;
    if !a.dump_breakpoints {
        out.push_str("level,t,l,s\n");
    }
    for (level, p) in KakutaniRefinements::with_cap(a.alpha, a.cap)?
        .take(a.level as usize + 1)
        .enumerate()
    {
        let p = p?;
        if !a.dump_breakpoints {
            match two_length_counts(&p) {
                Some((l, s)) => out.push_str(&format!("{level},{},{l},{s}\n", p.num_intervals())),
                None => out.push_str(&format!("{level},{},,\n", p.num_intervals())),
            }
        }
        last = Some(p);
    }
    if a.dump_breakpoints {
        out.push_str("level,index,breakpoint\n");
        if let Some(p) = last {
            for (i, b) in p.breakpoints().iter().enumerate() {
                out.push_str(&format!("{},{i},{}\n", a.level, num(*b)));
            }
        }
    }
    emit(a.out.as_deref(), &out)
}

fn disc(a: DiscArgs) -> Result<()> {
    let s = SequenceRegistry::standard().build(&a.kind.sequence_id()?)?;
    let rows = discrepancy_curve(s.as_ref(), &a.ns, a.extreme, a.extreme_cap)?;
    let mut out = String::from("N,d_star,d_extreme,normalized\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{}\n",
            r.n,
            num(r.d_star),
            r.d_extreme.map(num).unwrap_or_default(),
            num(r.normalized)
        ));
    }
    emit(a.out.as_deref(), &out)
}

fn symmetrize(a: SymmetrizeArgs) -> Result<()> {
    let dir = match (a.theta, a.x) {
        (Some(t), None) => DirectionAngle::from_theta(t)?,
        (None, Some(x)) => to_direction(x)?,
        _ => unreachable!("clap enforces exactly one of --theta/--x"),
    };
    let (set, format) = read_set(&a.input)?;
    let out = match &set {
        PlanarSet::Polygon(p) => PlanarSet::Polygon(steiner_polygon(p, &dir)?),
        PlanarSet::Raster(r) => PlanarSet::Raster(steiner_raster_with(r, &dir, a.rearrangement)?.0),
    };
    write_set(&out, format, &a.out)
}

fn process(a: ProcessArgs) -> Result<()> {
    let cfg = a.run.config(a.kind.clone())?;
    if let Some(dir) = &a.out {
        ensure_dir(dir)?;
    }
    let frames_dir = a.frames.then(|| a.out.clone()).flatten();
    let frame_size = cfg.grid.map_or(DEFAULT_GRID_SIZE, |g| g.width.max(g.height));
    if let Some(dir) = &frames_dir {
        write_pgm(&frame_raster(&cfg.initial_set()?, frame_size)?, &frame_path(dir, 0))?;
    }
    let run = run_process_observed(&cfg, |view| {
        if let (Some(dir), Some(_)) = (&frames_dir, view.recorded) {
            write_pgm(&frame_raster(view.set, frame_size)?, &frame_path(dir, view.step))?;
        }
        Ok(())
    })?;
    let csv = trace_csv(&run.trace);
    match &a.out {
        Some(dir) => emit(Some(&dir.join("trace.csv")), &csv),
        None => emit(None, &csv),
    }
}

fn file_safe(id: &str) -> String {
    id.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '.' || c == '-' { c } else { '_' })
        .collect()
}

fn compare(a: CompareArgs) -> Result<()> {
    let cfg = a.run.config(a.kinds[0].clone())?;
    let runs = compare_sequences(&cfg, &a.kinds, a.jobs as usize)?;
    let table = comparison_csv(&runs);
    match &a.out {
        Some(dir) => {
            ensure_dir(dir)?;
            for (i, r) in runs.iter().enumerate() {
                let name = format!("trace_{}_{}.csv", i + 1, file_safe(&r.sequence));
                emit(Some(&dir.join(name)), &trace_csv(&r.trace))?;
            }
            emit(Some(&dir.join("compare.csv")), &table)
        }
        None => emit(None, &table),
    }
}

fn checkpoints(a: CheckpointArgs) -> Result<()> {
    let seed: SeedSpec = a.seed.parse()?;
    let mut cfg = ProcessConfig::new("kf", seed, 1);
    cfg.grid = a.grid;
    cfg.backend = a.backend;
    let rows = checkpoint_probe(&cfg, a.max_k)?;
    let mut out = String::from("k,step,theta,direction_ok,defect\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.k,
            r.step,
            num(r.theta),
            r.direction_ok,
            num(r.defect)
        ));
    }
    emit(a.out.as_deref(), &out)
}

/// Names shown when a builtin seed is unknown.
pub fn builtin_names() -> String {
    BUILTIN_SEEDS.join(", ")
}
