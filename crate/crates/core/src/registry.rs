//! Direction-sequence strategies, registered by name and selected at runtime.
//!
//! Ids have the form `name` or `name:arg`, e.g. `kf`, `vdc:3` (also `vdc3`),
//! `kronecker:gamma`, `file:schedule.txt`, `random:7`.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::sequences::{kronecker_point, vdc_point, KfPoints, GAMMA};

/// A sequence `x_1, x_2, ...` in `[0, 1]` that drives a Steiner process.
pub trait DirectionSequence: Send + Sync {
    /// Canonical id; parsing it back through the registry yields the same sequence.
    fn id(&self) -> String;

    /// The first `n` values.
    fn take(&self, n: usize) -> Result<Vec<f64>>;
}

impl fmt::Debug for dyn DirectionSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DirectionSequence({})", self.id())
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct KakutaniFibonacci;

impl DirectionSequence for KakutaniFibonacci {
    fn id(&self) -> String {
        "kf".into()
    }

    fn take(&self, n: usize) -> Result<Vec<f64>> {
        let xs: Vec<f64> = KfPoints::new().take(n).map(|(_, _, x)| x).collect();
        if xs.len() < n {
            return Err(Error::Overflow("admissible integers exhausted u64".into()));
        }
        Ok(xs)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct VanDerCorput {
    pub base: u32,
}

impl DirectionSequence for VanDerCorput {
    fn id(&self) -> String {
        format!("vdc:{}", self.base)
    }

    fn take(&self, n: usize) -> Result<Vec<f64>> {
        (1..=n as u64).map(|k| vdc_point(k, self.base)).collect()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Kronecker {
    pub alpha: f64,
}

impl DirectionSequence for Kronecker {
    fn id(&self) -> String {
        if self.alpha == GAMMA {
            "kronecker:gamma".into()
        } else {
            format!("kronecker:{}", self.alpha)
        }
    }

    fn take(&self, n: usize) -> Result<Vec<f64>> {
        Ok((1..=n as u64).map(|k| kronecker_point(k, self.alpha)).collect())
    }
}

/// Uniform pseudo-random values from a fixed seed.
#[derive(Debug, Clone, Copy)]
pub struct SeededRandom {
    pub seed: u64,
}

impl DirectionSequence for SeededRandom {
    fn id(&self) -> String {
        format!("random:{}", self.seed)
    }

    fn take(&self, n: usize) -> Result<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        Ok((0..n).map(|_| rng.gen::<f64>()).collect())
    }
}

/// The same value at every step.
#[derive(Debug, Clone, Copy)]
pub struct Constant {
    pub x: f64,
}

impl DirectionSequence for Constant {
    fn id(&self) -> String {
        format!("constant:{}", self.x)
    }

    fn take(&self, n: usize) -> Result<Vec<f64>> {
        Ok(vec![self.x; n])
    }
}

/// `x_k = x_1 · ratio^{k-1}`: directions accumulating at `θ = 0`.
#[derive(Debug, Clone, Copy)]
pub struct GeometricDecay {
    pub first: f64,
    pub ratio: f64,
}

impl DirectionSequence for GeometricDecay {
    fn id(&self) -> String {
        format!("geometric:{}/{}", self.first, self.ratio)
    }

    fn take(&self, n: usize) -> Result<Vec<f64>> {
        let mut x = self.first;
        Ok((0..n)
            .map(|_| {
                let v = x;
                x *= self.ratio;
                v
            })
            .collect())
    }
}

/// A schedule read from a text file, one value per line; `#` starts a comment.
#[derive(Debug, Clone)]
pub struct FileSchedule {
    path: PathBuf,
    values: Arc<[f64]>,
}

impl FileSchedule {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let values = parse_schedule(&text, &path.display().to_string())?;
        Ok(FileSchedule {
            path: path.to_path_buf(),
            values: values.into(),
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

fn parse_schedule(text: &str, context: &str) -> Result<Vec<f64>> {
    let mut values = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let x: f64 = line
            .parse()
            .map_err(|_| Error::parse(format!("{context}:{}", lineno + 1), format!("`{line}` is not a number")))?;
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::parse(
                format!("{context}:{}", lineno + 1),
                format!("{x} outside [0, 1]"),
            ));
        }
        values.push(x);
    }
    if values.is_empty() {
        return Err(Error::parse(context, "schedule file holds no values"));
    }
    Ok(values)
}

impl DirectionSequence for FileSchedule {
    fn id(&self) -> String {
        format!("file:{}", self.path.display())
    }

    fn take(&self, n: usize) -> Result<Vec<f64>> {
        if n > self.values.len() {
            return Err(Error::Domain(format!(
                "{} holds {} values, {n} requested",
                self.path.display(),
                self.values.len()
            )));
        }
        Ok(self.values[..n].to_vec())
    }
}

type Factory = fn(Option<&str>) -> Result<Box<dyn DirectionSequence>>;

struct Entry {
    summary: &'static str,
    factory: Factory,
}

/// Name → constructor table for [`DirectionSequence`] strategies.
pub struct SequenceRegistry {
    entries: BTreeMap<&'static str, Entry>,
}

impl Default for SequenceRegistry {
    fn default() -> Self {
        Self::standard()
    }
}

/// `gamma` or a decimal.
pub fn parse_alpha(s: &str) -> Result<f64> {
    let s = s.trim();
    if s.eq_ignore_ascii_case("gamma") {
        return Ok(GAMMA);
    }
    let v: f64 = s
        .parse()
        .map_err(|_| Error::parse("alpha", format!("`{s}` is neither `gamma` nor a number")))?;
    if !v.is_finite() {
        return Err(Error::parse("alpha", format!("`{s}` is not finite")));
    }
    Ok(v)
}

fn parse_unit(s: &str, what: &str) -> Result<f64> {
    let v = parse_alpha(s)?;
    if !(0.0..=1.0).contains(&v) {
        return Err(Error::Domain(format!("{what} {v} outside [0, 1]")));
    }
    Ok(v)
}

impl SequenceRegistry {
    /// Empty registry.
    pub fn new() -> Self {
        SequenceRegistry {
            entries: BTreeMap::new(),
        }
    }

    /// Registry with every built-in strategy.
    pub fn standard() -> Self {
        let mut r = Self::new();
        r.register("kf", "Kakutani-Fibonacci (gamma-radical inverse)", |_| {
            Ok(Box::new(KakutaniFibonacci))
        });
        r.register("vdc", "van der Corput, vdc:<base> (default 2)", |arg| {
            let base = match arg {
                None => 2,
                Some(a) => a
                    .parse()
                    .map_err(|_| Error::parse("vdc base", format!("`{a}` is not an integer")))?,
            };
            if base < 2 {
                return Err(Error::Domain(format!("van der Corput base must be >= 2, got {base}")));
            }
            Ok(Box::new(VanDerCorput { base }))
        });
        r.register("kronecker", "{n alpha}, kronecker:<alpha|gamma> (default gamma)", |arg| {
            let alpha = arg.map(parse_alpha).transpose()?.unwrap_or(GAMMA);
            Ok(Box::new(Kronecker { alpha }))
        });
        r.register("random", "seeded uniform pseudo-random, random:<seed>", |arg| {
            let seed = match arg {
                None => 0,
                Some(a) => a
                    .parse()
                    .map_err(|_| Error::parse("random seed", format!("`{a}` is not an integer")))?,
            };
            Ok(Box::new(SeededRandom { seed }))
        });
        r.register("constant", "one fixed value, constant:<x>", |arg| {
            let x = parse_unit(arg.unwrap_or("0.5"), "constant value")?;
            Ok(Box::new(Constant { x }))
        });
        r.register("geometric", "x_k = x1*ratio^(k-1), geometric:<x1>/<ratio>", |arg| {
            let arg = arg.unwrap_or("0.5/0.5");
            let (first, ratio) = arg
                .split_once('/')
                .ok_or_else(|| Error::parse("geometric", format!("expected `<x1>/<ratio>`, got `{arg}`")))?;
            let first = parse_unit(first, "first value")?;
            let ratio = parse_unit(ratio, "ratio")?;
            Ok(Box::new(GeometricDecay { first, ratio }))
        });
        r.register("file", "schedule file, one value per line, file:<path>", |arg| {
            let path = arg.ok_or_else(|| Error::parse("file", "missing path, use file:<path>"))?;
            Ok(Box::new(FileSchedule::load(path)?))
        });
        r
    }

    pub fn register(&mut self, name: &'static str, summary: &'static str, factory: Factory) {
        self.entries.insert(name, Entry { summary, factory });
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.entries.keys().copied()
    }

    /// `(name, summary)` pairs in name order.
    pub fn describe(&self) -> Vec<(&'static str, &'static str)> {
        self.entries.iter().map(|(k, e)| (*k, e.summary)).collect()
    }

    /// Builds the sequence named by `id`.
    pub fn build(&self, id: &str) -> Result<Box<dyn DirectionSequence>> {
        let id = id.trim();
        let (name, arg) = match id.split_once(':') {
            Some((n, a)) => (n, Some(a)),
            None => (id, None),
        };
        if let Some(e) = self.entries.get(name) {
            return (e.factory)(arg);
        }
        // shorthand like `vdc2`
        if arg.is_none() {
            let split = name.trim_end_matches(|c: char| c.is_ascii_digit()).len();
            if split > 0 && split < name.len() {
                if let Some(e) = self.entries.get(&name[..split]) {
                    return (e.factory)(Some(&name[split..]));
                }
            }
        }
        Err(Error::UnknownSequence {
            id: id.to_string(),
            known: self.names().collect::<Vec<_>>().join(", "),
        })
    }
}
