//! Kakutani α-refinements of partitions of `[0, 1]`.

use crate::error::{Error, Result};
use crate::sequences::gamma_pow;

/// Relative tolerance under which two interval lengths count as tied for longest.
pub const TIE_TOLERANCE: f64 = 1e-12;

/// Absolute slack added to the tie test. Lengths are differences of
/// breakpoints near 1, so each carries an absolute rounding error of a few
/// ulps of 1 whatever its size.
pub const TIE_ABSOLUTE: f64 = 1e-13;

/// Default cap on the number of intervals a refinement may produce.
pub const DEFAULT_SIZE_CAP: usize = 10_000_000;

/// Absolute tolerance used when classifying lengths as `γ^n` or `γ^{n+1}`.
pub const LENGTH_TOLERANCE: f64 = 1e-10;

/// A partition of `[0, 1]` stored as its breakpoints.
#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    breakpoints: Vec<f64>,
}

impl Partition {
    /// The trivial partition `ω = {0, 1}`.
    pub fn trivial() -> Self {
        Partition {
            breakpoints: vec![0.0, 1.0],
        }
    }

    pub fn from_breakpoints(breakpoints: Vec<f64>) -> Result<Self> {
        if breakpoints.len() < 2 {
            return Err(Error::InvalidPartition("need at least two breakpoints".into()));
        }
        if breakpoints[0] != 0.0 || *breakpoints.last().unwrap() != 1.0 {
            return Err(Error::InvalidPartition("breakpoints must start at 0 and end at 1".into()));
        }
        if let Some(w) = breakpoints.windows(2).find(|w| w[0].partial_cmp(&w[1]) != Some(std::cmp::Ordering::Less)) {
            return Err(Error::InvalidPartition(format!(
                "breakpoints not strictly increasing at {} .. {}",
                w[0], w[1]
            )));
        }
        Ok(Partition { breakpoints })
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    /// Breakpoints strictly inside `(0, 1)`.
    pub fn interior(&self) -> &[f64] {
        &self.breakpoints[1..self.breakpoints.len() - 1]
    }

    pub fn num_intervals(&self) -> usize {
        self.breakpoints.len() - 1
    }

    pub fn lengths(&self) -> impl Iterator<Item = f64> + '_ {
        self.breakpoints.windows(2).map(|w| w[1] - w[0])
    }

    pub fn max_length(&self) -> f64 {
        self.lengths().fold(0.0, f64::max)
    }
}

/// Splits every longest interval at `left + α·length`.
pub fn alpha_refine(p: &Partition, alpha: f64) -> Result<Partition> {
    alpha_refine_capped(p, alpha, DEFAULT_SIZE_CAP)
}

pub fn alpha_refine_capped(p: &Partition, alpha: f64, cap: usize) -> Result<Partition> {
    check_alpha(alpha)?;
    let longest = p.max_length();
    let threshold = longest * (1.0 - TIE_TOLERANCE) - TIE_ABSOLUTE;
    let splits = p.lengths().filter(|&l| l >= threshold).count();
    if p.num_intervals() + splits > cap {
        return Err(Error::PartitionTooLarge { cap });
    }
    let mut out = Vec::with_capacity(p.breakpoints.len() + splits);
    for w in p.breakpoints.windows(2) {
        out.push(w[0]);
        let len = w[1] - w[0];
        if len >= threshold {
            out.push(w[0] + alpha * len);
        }
    }
    out.push(1.0);
    Ok(Partition { breakpoints: out })
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("alpha must lie in (0, 1), got {alpha}")))
    }
}

/// The successive refinements `ω, αω, α²ω, ...`.
#[derive(Debug)]
pub struct KakutaniRefinements {
    alpha: f64,
    cap: usize,
    next: Option<Partition>,
    failed: Option<Error>,
}

impl KakutaniRefinements {
    pub fn new(alpha: f64) -> Result<Self> {
        Self::with_cap(alpha, DEFAULT_SIZE_CAP)
    }

    pub fn with_cap(alpha: f64, cap: usize) -> Result<Self> {
        check_alpha(alpha)?;
        Ok(KakutaniRefinements {
            alpha,
            cap,
            next: Some(Partition::trivial()),
            failed: None,
        })
    }
}

impl Iterator for KakutaniRefinements {
    type Item = Result<Partition>;

    fn next(&mut self) -> Option<Self::Item> {
        let Some(current) = self.next.take() else {
            return self.failed.take().map(Err);
        };
        // the level past the cap is reported when it is reached
        match alpha_refine_capped(&current, self.alpha, self.cap) {
            Ok(p) => self.next = Some(p),
            Err(e) => self.failed = Some(e),
        }
        Some(Ok(current))
    }
}

/// `α^n ω`.
pub fn kakutani_level(alpha: f64, n: u32) -> Result<Partition> {
    kakutani_level_capped(alpha, n, DEFAULT_SIZE_CAP)
}

pub fn kakutani_level_capped(alpha: f64, n: u32, cap: usize) -> Result<Partition> {
    check_alpha(alpha)?;
    let mut p = Partition::trivial();
    for _ in 0..n {
        p = alpha_refine_capped(&p, alpha, cap)?;
    }
    Ok(p)
}

/// Interval counts `(t, l, s)` of the level-`n` Kakutani-Fibonacci partition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IntervalCounts {
    pub total: u64,
    pub long: u64,
    pub short: u64,
}

/// Counts intervals of length `γ^n` (long) and `γ^{n+1}` (short).
pub fn interval_counts(p: &Partition, level: u32) -> Result<IntervalCounts> {
    let long_len = gamma_pow(level);
    let short_len = gamma_pow(level + 1);
    let (mut long, mut short) = (0u64, 0u64);
    for (i, len) in p.lengths().enumerate() {
        if (len - long_len).abs() <= LENGTH_TOLERANCE {
            long += 1;
        } else if (len - short_len).abs() <= LENGTH_TOLERANCE {
            short += 1;
        } else {
            return Err(Error::InvalidPartition(format!(
                "interval {i} has length {len}, neither gamma^{level} nor gamma^{}",
                level + 1
            )));
        }
    }
    Ok(IntervalCounts {
        total: long + short,
        long,
        short,
    })
}

/// `(long, short)` counts when `p` has at most two distinct interval lengths
/// (within [`LENGTH_TOLERANCE`]), `None` otherwise. `short` is 0 when all
/// intervals share one length.
pub fn two_length_counts(p: &Partition) -> Option<(u64, u64)> {
    let longest = p.max_length();
    let mut other: Option<f64> = None;
    let (mut long, mut short) = (0u64, 0u64);
    for len in p.lengths() {
        if (len - longest).abs() <= LENGTH_TOLERANCE {
            long += 1;
        } else {
            match other {
                None => other = Some(len),
                Some(o) if (len - o).abs() <= LENGTH_TOLERANCE => {}
                Some(_) => return None,
            }
            short += 1;
        }
    }
    Some((long, short))
}

/// Fraction of the intervals of `p` contained in `[a, b]`.
pub fn ud_ratio(p: &Partition, a: f64, b: f64) -> f64 {
    let bp = &p.breakpoints;
    // first interval whose left end is >= a
    let first = bp.partition_point(|&x| x < a);
    // number of breakpoints <= b
    let last = bp.partition_point(|&x| x <= b);
    // intervals [bp[i], bp[i+1]] with first <= i and i + 1 < last
    let contained = last.saturating_sub(first).saturating_sub(1);
    contained as f64 / p.num_intervals() as f64
}
