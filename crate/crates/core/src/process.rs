//! Steiner processes `T_k = S_{f_k} ∘ … ∘ S_{f_1}` and their traces.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Mutex;

use crate::error::{Error, Result};
use crate::fmt::num;
use crate::metrics::{self, MetricsRecord};
use crate::planar_sets::io::read_set;
use crate::planar_sets::{
    annulus_fixture, ball_of_same_area, rasterize_ball, rasterize_union, steiner_polygon, steiner_raster_with,
    Ball, ConvexPolygon, GridSpec, PlanarSet, Point, Rearrangement, RasterSet,
};
use crate::registry::SequenceRegistry;
use crate::sequences::{checkpoint_index, gamma_pow, to_direction, DirectionAngle};

/// Raster resolution used when no grid is given.
pub const DEFAULT_GRID_SIZE: usize = 512;

pub const TRACE_HEADER: &str = "step,x,theta,area,mu,d1_to_ball,hausdorff,perimeter";

/// Which set representation a process runs on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Backend {
    /// The seed's own representation.
    #[default]
    Auto,
    Polygon,
    Raster,
}

impl FromStr for Backend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(Backend::Auto),
            "polygon" => Ok(Backend::Polygon),
            "raster" => Ok(Backend::Raster),
            _ => Err(Error::parse("backend", format!("unknown `{s}` (expected auto, polygon or raster)"))),
        }
    }
}

/// Seed geometry before it is committed to a backend.
#[derive(Debug, Clone, PartialEq)]
pub enum SeedShape {
    Polygon(ConvexPolygon),
    /// Interior-disjoint convex pieces; only rasterizable.
    Union(Vec<ConvexPolygon>),
    Annulus { inner: f64, outer: f64 },
    Ball(Ball),
    Raster(RasterSet),
}

impl SeedShape {
    fn circumradius(&self) -> f64 {
        match self {
            SeedShape::Polygon(p) => p.circumradius(),
            SeedShape::Union(ps) => ps.iter().map(|p| p.circumradius()).fold(0.0, f64::max),
            SeedShape::Annulus { outer, .. } => *outer,
            SeedShape::Ball(b) => b.radius,
            SeedShape::Raster(r) => r.support_radius(),
        }
    }

    fn rasterize(&self, grid: &GridSpec) -> Result<RasterSet> {
        match self {
            SeedShape::Polygon(p) => rasterize_union(std::slice::from_ref(p), grid),
            SeedShape::Union(ps) => rasterize_union(ps, grid),
            SeedShape::Annulus { inner, outer } => annulus_fixture(*inner, *outer, grid),
            SeedShape::Ball(b) => rasterize_ball(b, grid),
            SeedShape::Raster(r) => Ok(r.resample_to(grid)),
        }
    }
}

/// Names accepted after `builtin:`.
pub const BUILTIN_SEEDS: &[&str] = &[
    "annulus",
    "ball",
    "ellipse",
    "l-shape",
    "offset-square",
    "square",
    "two-component",
];

/// Builtin seed geometry by name.
pub fn builtin_seed(name: &str) -> Result<SeedShape> {
    let rect = |x0, x1, y0, y1| ConvexPolygon::rectangle(x0, x1, y0, y1);
    Ok(match name {
        "square" => SeedShape::Polygon(rect(-0.5, 0.5, -0.5, 0.5)?),
        "offset-square" => SeedShape::Polygon(rect(0.0, 1.0, 0.0, 1.0)?),
        "ellipse" => SeedShape::Polygon(ConvexPolygon::ellipse(64, 1.0, 0.5, Point::default())?),
        "l-shape" => SeedShape::Union(vec![rect(-1.0, 1.0, -1.0, 0.0)?, rect(-1.0, 0.0, 0.0, 1.0)?]),
        "two-component" => SeedShape::Union(vec![rect(-1.0, -0.2, -0.6, 0.4)?, rect(0.3, 0.9, -0.2, 0.5)?]),
        "annulus" => SeedShape::Annulus { inner: 0.5, outer: 1.0 },
        "ball" => SeedShape::Ball(Ball { radius: 1.0 }),
        _ => {
            return Err(Error::UnknownSeed {
                name: name.into(),
                known: BUILTIN_SEEDS.join(", "),
            })
        }
    })
}

/// `builtin:<name>`, or a path to a polygon or PGM file (optionally `file:<path>`).
#[derive(Debug, Clone, PartialEq)]
pub enum SeedSpec {
    Builtin(String),
    File(PathBuf),
}

impl FromStr for SeedSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if let Some(name) = s.strip_prefix("builtin:") {
            return Ok(SeedSpec::Builtin(name.into()));
        }
        let path = s.strip_prefix("file:").unwrap_or(s);
        if path.is_empty() {
            return Err(Error::parse("seed", "empty seed"));
        }
        Ok(SeedSpec::File(path.into()))
    }
}

impl fmt::Display for SeedSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SeedSpec::Builtin(n) => write!(f, "builtin:{n}"),
            SeedSpec::File(p) => write!(f, "{}", p.display()),
        }
    }
}

impl SeedSpec {
    pub fn load(&self) -> Result<SeedShape> {
        match self {
            SeedSpec::Builtin(name) => builtin_seed(name),
            SeedSpec::File(path) => Ok(match read_set(path)?.0 {
                PlanarSet::Polygon(p) => SeedShape::Polygon(p),
                PlanarSet::Raster(r) => SeedShape::Raster(r),
            }),
        }
    }
}

/// Everything that determines a run.
#[derive(Debug, Clone, PartialEq)]
pub struct ProcessConfig {
    /// Direction sequence id, resolved through [`SequenceRegistry::standard`].
    pub sequence: String,
    pub seed: SeedSpec,
    pub steps: u64,
    /// Metrics are recorded at step 0, every `cadence` steps and at the end.
    pub cadence: u64,
    /// Raster grid; fitted to the seed at [`DEFAULT_GRID_SIZE`] when absent.
    pub grid: Option<GridSpec>,
    pub backend: Backend,
    pub rearrangement: Rearrangement,
}

impl ProcessConfig {
    pub fn new(sequence: impl Into<String>, seed: SeedSpec, steps: u64) -> Self {
        ProcessConfig {
            sequence: sequence.into(),
            seed,
            steps,
            cadence: 1,
            grid: None,
            backend: Backend::Auto,
            rearrangement: Rearrangement::default(),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.steps == 0 {
            return Err(Error::Domain("steps must be >= 1".into()));
        }
        if self.cadence == 0 {
            return Err(Error::Domain("cadence must be >= 1".into()));
        }
        Ok(())
    }

    /// The seed committed to its backend.
    pub fn initial_set(&self) -> Result<PlanarSet> {
        let shape = self.seed.load()?;
        let want_raster = match (self.backend, &shape) {
            (Backend::Polygon, SeedShape::Polygon(_)) => false,
            (Backend::Polygon, other) => {
                let kind = match other {
                    SeedShape::Union(_) => "nonconvex union",
                    SeedShape::Annulus { .. } => "annulus",
                    SeedShape::Ball(_) => "ball",
                    _ => "raster",
                };
                return Err(Error::BackendMismatch(format!(
                    "seed `{}` is a {kind}; the polygon backend needs a convex polygon",
                    self.seed
                )));
            }
            (Backend::Auto, SeedShape::Polygon(_)) => false,
            _ => true,
        };
        if !want_raster {
            let SeedShape::Polygon(p) = shape else { unreachable!() };
            return Ok(PlanarSet::Polygon(p));
        }
        let grid = match (&self.grid, &shape) {
            (Some(g), _) => *g,
            (None, SeedShape::Raster(r)) => *r.grid(),
            (None, s) => GridSpec::fitted(DEFAULT_GRID_SIZE, DEFAULT_GRID_SIZE, s.circumradius())?,
        };
        Ok(PlanarSet::Raster(shape.rasterize(&grid)?))
    }
}

/// One row of a trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRecord {
    pub step: u64,
    /// Sequence value applied at this step; absent at step 0.
    pub x: Option<f64>,
    pub theta: Option<f64>,
    pub metrics: MetricsRecord,
}

impl TraceRecord {
    pub fn csv_row(&self) -> String {
        let opt = |v: Option<f64>| v.map(num).unwrap_or_default();
        let m = &self.metrics;
        format!(
            "{},{},{},{},{},{},{},{}",
            self.step,
            opt(self.x),
            opt(self.theta),
            num(m.area),
            num(m.mu),
            num(m.d1_to_ball),
            opt(m.hausdorff_to_ball),
            num(m.perimeter)
        )
    }
}

pub fn trace_csv(trace: &[TraceRecord]) -> String {
    let mut s = String::with_capacity(64 * (trace.len() + 1));
    s.push_str(TRACE_HEADER);
    s.push('\n');
    for r in trace {
        s.push_str(&r.csv_row());
        s.push('\n');
    }
    s
}

/// A finished run.
#[derive(Debug, Clone)]
pub struct ProcessRun {
    pub sequence: String,
    pub final_set: PlanarSet,
    pub trace: Vec<TraceRecord>,
}

/// What an observer sees after each step.
pub struct StepView<'a> {
    pub step: u64,
    pub x: f64,
    pub dir: &'a DirectionAngle,
    pub set: &'a PlanarSet,
    pub recorded: Option<&'a TraceRecord>,
}

pub fn run_process(cfg: &ProcessConfig) -> Result<ProcessRun> {
    run_process_observed(cfg, |_| Ok(()))
}

/// [`run_process`] calling `observe` after every step.
pub fn run_process_observed(
    cfg: &ProcessConfig,
    mut observe: impl FnMut(&StepView<'_>) -> Result<()>,
) -> Result<ProcessRun> {
    cfg.validate()?;
    let seq = SequenceRegistry::standard().build(&cfg.sequence)?;
    let steps = usize::try_from(cfg.steps).map_err(|_| Error::Overflow(format!("{} steps", cfg.steps)))?;
    let xs = seq.take(steps)?;
    let mut set = cfg.initial_set()?;

    // M* only depends on the (invariant) area, so rasterize it once
    let ball = match &set {
        PlanarSet::Raster(r) => {
            let b = ball_of_same_area(r.area())?;
            Some(if b.radius > 0.0 {
                rasterize_ball(&b, r.grid())?
            } else {
                RasterSet::empty(*r.grid())
            })
        }
        PlanarSet::Polygon(_) => None,
    };

    let mut trace = vec![TraceRecord {
        step: 0,
        x: None,
        theta: None,
        metrics: metrics::measure(&set, ball.as_ref())?,
    }];
    for (k, &x) in xs.iter().enumerate() {
        let step = k as u64 + 1;
        let dir = to_direction(x)?;
        set = match &set {
            PlanarSet::Polygon(p) => PlanarSet::Polygon(steiner_polygon(p, &dir)?),
            PlanarSet::Raster(r) => PlanarSet::Raster(steiner_raster_with(r, &dir, cfg.rearrangement)?.0),
        };
        let record = if step.is_multiple_of(cfg.cadence) || step == cfg.steps {
            let r = TraceRecord {
                step,
                x: Some(x),
                theta: Some(dir.theta()),
                metrics: metrics::measure(&set, ball.as_ref())?,
            };
            log::info!(
                "{} step {step}/{}: mu {:.6e} d1_to_ball {:.6e}",
                cfg.sequence,
                cfg.steps,
                r.metrics.mu,
                r.metrics.d1_to_ball
            );
            trace.push(r);
            true
        } else {
            false
        };
        observe(&StepView {
            step,
            x,
            dir: &dir,
            set: &set,
            recorded: record.then(|| trace.last().unwrap()),
        })?;
    }
    Ok(ProcessRun {
        sequence: seq.id(),
        final_set: set,
        trace,
    })
}

/// Symmetry bookkeeping at one checkpoint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CheckpointRecord {
    pub k: u32,
    /// `P_k`, the step at which `γ^k` is applied.
    pub step: u64,
    pub theta: f64,
    /// Whether `theta` equals `π·γ^k` within 1e-12.
    pub direction_ok: bool,
    /// `d₁(T_P M, reflection of T_P M across the symmetry line)`.
    pub defect: f64,
}

/// `d₁` between a set and its mirror image across the line orthogonal to `dir`.
pub fn reflection_defect(set: &PlanarSet, dir: &DirectionAngle) -> Result<f64> {
    Ok(match set {
        PlanarSet::Polygon(p) => p.symmetric_difference_area(&p.reflect(dir)),
        PlanarSet::Raster(r) => metrics::d1(r, &r.reflect(dir))?,
    })
}

/// Runs a `kf` process through the checkpoints `P_1, …, P_max_k`.
pub fn checkpoint_probe(cfg: &ProcessConfig, max_k: u32) -> Result<Vec<CheckpointRecord>> {
    if SequenceRegistry::standard().build(&cfg.sequence)?.id() != "kf" {
        return Err(Error::Domain(format!(
            "checkpoints are defined for the kf sequence, not `{}`",
            cfg.sequence
        )));
    }
    let wanted: Vec<(u32, u64)> = (1..=max_k)
        .map(|k| checkpoint_index(k).map(|p| (k, p)))
        .collect::<Result<_>>()?;
    let last = wanted.last().map_or(0, |w| w.1);
    let mut run_cfg = cfg.clone();
    run_cfg.steps = last.max(1);
    run_cfg.cadence = run_cfg.steps;
    let mut out = Vec::with_capacity(wanted.len());
    run_process_observed(&run_cfg, |view| {
        for &(k, p) in wanted.iter().filter(|w| w.1 == view.step) {
            let expected = std::f64::consts::PI * gamma_pow(k);
            out.push(CheckpointRecord {
                k,
                step: p,
                theta: view.dir.theta(),
                direction_ok: (view.dir.theta() - expected).abs() <= 1e-12,
                defect: reflection_defect(view.set, view.dir)?,
            });
        }
        Ok(())
    })?;
    Ok(out)
}

/// Runs `base` once per sequence id, at most `jobs` at a time.
pub fn compare_sequences(base: &ProcessConfig, ids: &[String], jobs: usize) -> Result<Vec<ProcessRun>> {
    if ids.len() < 2 {
        return Err(Error::Domain(format!("compare needs at least 2 sequences, got {}", ids.len())));
    }
    // fail fast on bad ids before any work
    let registry = SequenceRegistry::standard();
    for id in ids {
        registry.build(id)?;
    }
    let jobs = jobs.clamp(1, ids.len());
    let results: Vec<Mutex<Option<Result<ProcessRun>>>> = ids.iter().map(|_| Mutex::new(None)).collect();
    let next = Mutex::new(0usize);
    std::thread::scope(|scope| {
        for _ in 0..jobs {
            scope.spawn(|| loop {
                let i = {
                    let mut n = next.lock().unwrap();
                    let i = *n;
                    *n += 1;
                    i
                };
                let Some(id) = ids.get(i) else { break };
                let mut cfg = base.clone();
                cfg.sequence = id.clone();
                let r = run_process(&cfg);
                *results[i].lock().unwrap() = Some(r);
            });
        }
    });
    results
        .into_iter()
        .map(|m| m.into_inner().unwrap().expect("every id is run"))
        .collect()
}

/// Aligned table: `step` then `d1_to_ball:<id>,mu:<id>` per run.
pub fn comparison_csv(runs: &[ProcessRun]) -> String {
    let mut s = String::from("step");
    for r in runs {
        s.push_str(&format!(",d1_to_ball:{},mu:{}", r.sequence, r.sequence));
    }
    s.push('\n');
    let rows = runs.iter().map(|r| r.trace.len()).max().unwrap_or(0);
    for i in 0..rows {
        let step = runs.iter().find_map(|r| r.trace.get(i)).map(|t| t.step).unwrap_or(0);
        s.push_str(&step.to_string());
        for r in runs {
            match r.trace.get(i) {
                Some(t) => s.push_str(&format!(",{},{}", num(t.metrics.d1_to_ball), num(t.metrics.mu))),
                None => s.push_str(",,"),
            }
        }
        s.push('\n');
    }
    s
}

/// Raster view of a set for frame dumps: rasters as-is, polygons on a fitted grid.
pub fn frame_raster(set: &PlanarSet, size: usize) -> Result<RasterSet> {
    match set {
        PlanarSet::Raster(r) => Ok(r.clone()),
        PlanarSet::Polygon(p) => {
            let g = GridSpec::fitted(size, size, p.circumradius())?;
            rasterize_union(std::slice::from_ref(p), &g)
        }
    }
}

pub fn frame_path(dir: &Path, step: u64) -> PathBuf {
    dir.join(format!("frame_{step}.pgm"))
}
