//! Point sequences on `[0, 1]` and their mapping to planar directions.
//!
//! The Kakutani-Fibonacci sequence is produced by the γ-radical inverse on
//! the admissible integers (binary representations without two adjacent
//! ones), enumerated in increasing order. Van der Corput and Kronecker
//! sequences are provided for comparison.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Inverse golden ratio `(√5 − 1) / 2`, the nearest `f64`.
pub const GAMMA: f64 = 0.618_033_988_749_894_9;

/// Largest `n` for which `fib(n)` fits in a `u64`.
pub const MAX_FIB_INDEX: u32 = 93;

/// `γ^k` for `k = 0..=64`, built by repeated multiplication.
fn gamma_powers() -> &'static [f64; 65] {
    use std::sync::OnceLock;
    static POWERS: OnceLock<[f64; 65]> = OnceLock::new();
    POWERS.get_or_init(|| {
        let mut p = [1.0; 65];
        for k in 1..65 {
            p[k] = p[k - 1] * GAMMA;
        }
        p
    })
}

/// `γ^k`.
pub fn gamma_pow(k: u32) -> f64 {
    match gamma_powers().get(k as usize) {
        Some(&v) => v,
        None => GAMMA.powi(k as i32),
    }
}

/// Fibonacci numbers with `F_0 = 0`, `F_1 = 1`.
///
/// Fails for `n > 93` instead of wrapping.
pub fn fib(n: u32) -> Result<u64> {
    if n == 0 {
        return Ok(0);
    }
    let (mut a, mut b) = (0u64, 1u64);
    for _ in 1..n {
        let next = a
            .checked_add(b)
            .ok_or_else(|| Error::Overflow(format!("fib({n}) exceeds u64")))?;
        a = b;
        b = next;
    }
    Ok(b)
}

/// True iff `n ≥ 1` has no two adjacent 1-bits.
#[inline]
pub fn is_admissible(n: u64) -> bool {
    n != 0 && n & (n >> 1) == 0
}

/// A positive integer whose binary digits satisfy `a_{k+1} a_k = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Admissible(u64);

impl Admissible {
    pub fn new(n: u64) -> Result<Self> {
        if is_admissible(n) {
            Ok(Admissible(n))
        } else {
            Err(Error::NotAdmissible { value: n })
        }
    }

    pub fn get(self) -> u64 {
        self.0
    }

    /// `Φ_γ(n) = Σ a_k(n) γ^{k+1}`.
    pub fn radical_inverse(self) -> f64 {
        let n = self.0;
        let mut acc = 0.0;
        // smallest terms first
        for k in (0..64).rev() {
            if n >> k & 1 == 1 {
                acc += gamma_pow(k + 1);
            }
        }
        acc
    }
}

impl TryFrom<u64> for Admissible {
    type Error = Error;

    fn try_from(n: u64) -> Result<Self> {
        Admissible::new(n)
    }
}

/// The admissible integers in increasing order, found by incrementing and
/// bit-testing.
#[derive(Debug, Clone, Default)]
pub struct AdmissibleIntegers {
    current: u64,
}

impl AdmissibleIntegers {
    pub fn new() -> Self {
        Self::default()
    }
}

impl Iterator for AdmissibleIntegers {
    type Item = Admissible;

    fn next(&mut self) -> Option<Admissible> {
        loop {
            self.current = self.current.checked_add(1)?;
            if is_admissible(self.current) {
                return Some(Admissible(self.current));
            }
        }
    }
}

/// `Φ_γ(n)` for an admissible `n`.
pub fn gamma_radical_inverse(n: u64) -> Result<f64> {
    Ok(Admissible::new(n)?.radical_inverse())
}

/// The `k`-th admissible integer (1-based).
///
/// Positive fibbinary numbers listed in increasing order are the Zeckendorf
/// digit strings of `1, 2, 3, ...`, with `F_2` as the lowest digit, so the
/// rank map is a greedy Zeckendorf decomposition of `k`.
pub fn nth_admissible(k: u64) -> Result<Admissible> {
    if k == 0 {
        return Err(Error::Domain("sequence index must be >= 1".into()));
    }
    // fibs[i] = F_{i+2}; bit i of the result corresponds to F_{i+2}.
    let mut fibs = Vec::with_capacity(64);
    for i in 2..=MAX_FIB_INDEX {
        let f = fib(i)?;
        if f > k {
            break;
        }
        fibs.push(f);
    }
    if fibs.len() > 63 {
        return Err(Error::Overflow(format!(
            "the {k}-th admissible integer does not fit in u64"
        )));
    }
    let mut rest = k;
    let mut n = 0u64;
    for (bit, &f) in fibs.iter().enumerate().rev() {
        if f <= rest {
            rest -= f;
            n |= 1 << bit;
        }
    }
    debug_assert_eq!(rest, 0);
    Admissible::new(n)
}

/// One term of the Kakutani-Fibonacci sequence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SequencePoint {
    pub index: u64,
    pub value: f64,
}

/// `f_k = Φ_γ(n_k)` with `n_k` the `k`-th admissible integer.
pub fn kf_point(k: u64) -> Result<SequencePoint> {
    let n = nth_admissible(k)?;
    Ok(SequencePoint {
        index: k,
        value: n.radical_inverse(),
    })
}

/// Streams `(k, n_k, f_k)` for `k = 1, 2, ...`.
#[derive(Debug, Clone, Default)]
pub struct KfPoints {
    admissible: AdmissibleIntegers,
    index: u64,
}

impl KfPoints {
    pub fn new() -> Self {
        Self::default()
    }
}

impl Iterator for KfPoints {
    type Item = (u64, Admissible, f64);

    fn next(&mut self) -> Option<Self::Item> {
        let n = self.admissible.next()?;
        self.index += 1;
        Some((self.index, n, n.radical_inverse()))
    }
}

/// Radical inverse of `n` in base `base` (van der Corput).
pub fn vdc_point(n: u64, base: u32) -> Result<f64> {
    if base < 2 {
        return Err(Error::Domain(format!("van der Corput base must be >= 2, got {base}")));
    }
    let b = base as u64;
    let inv = 1.0 / base as f64;
    let mut n = n;
    let mut scale = inv;
    let mut acc = 0.0;
    while n > 0 {
        acc += (n % b) as f64 * scale;
        n /= b;
        scale *= inv;
    }
    Ok(acc)
}

/// Fractional part of `n α`.
pub fn kronecker_point(n: u64, alpha: f64) -> f64 {
    let x = (n as f64 * alpha).rem_euclid(1.0);
    // rem_euclid can round up to exactly 1.0 for tiny negative inputs
    if x >= 1.0 {
        0.0
    } else {
        x
    }
}

/// A planar direction `θ ∈ [0, π]` with its unit vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectionAngle {
    theta: f64,
    unit: (f64, f64),
}

impl DirectionAngle {
    pub fn from_theta(theta: f64) -> Result<Self> {
        if !theta.is_finite() {
            return Err(Error::Domain(format!("direction angle {theta} is not finite")));
        }
        let (s, c) = theta.sin_cos();
        Ok(DirectionAngle {
            theta,
            unit: (c, s),
        })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// `u = (cos θ, sin θ)`.
    pub fn unit(&self) -> (f64, f64) {
        self.unit
    }

    /// `u⊥`, chosen so that `(u⊥, u)` is a positively oriented frame.
    pub fn normal(&self) -> (f64, f64) {
        (self.unit.1, -self.unit.0)
    }
}

/// `x ↦ θ = π x`.
pub fn to_direction(x: f64) -> Result<DirectionAngle> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::Domain(format!("sequence value {x} outside [0, 1]")));
    }
    DirectionAngle::from_theta(PI * x)
}

/// Largest `k` accepted by [`checkpoint_index`]; the enumeration costs `2^{k-1}`
/// increments.
pub const MAX_CHECKPOINT_LEVEL: u32 = 34;

/// Position `P_k` of `γ^k` in the Kakutani-Fibonacci sequence, found by
/// enumerating admissible integers up to `2^{k-1}`.
pub fn checkpoint_index(k: u32) -> Result<u64> {
    if k == 0 {
        return Err(Error::Domain("checkpoint level must be >= 1".into()));
    }
    if k > MAX_CHECKPOINT_LEVEL {
        return Err(Error::Overflow(format!(
            "checkpoint level {k} exceeds the enumeration cap {MAX_CHECKPOINT_LEVEL}"
        )));
    }
    let target = 1u64 << (k - 1);
    let mut position = 0u64;
    for n in AdmissibleIntegers::new() {
        position += 1;
        if n.get() == target {
            return Ok(position);
        }
    }
    Err(Error::Overflow(format!("checkpoint level {k}")))
}
