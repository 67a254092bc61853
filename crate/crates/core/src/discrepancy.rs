//! Exact one-dimensional discrepancy of finite point sets.

use crate::error::{Error, Result};
use crate::registry::DirectionSequence;

/// Default largest `N` for which the two-sided discrepancy is reported.
pub const DEFAULT_EXTREME_CAP: usize = 1_000_000;

/// A finite multiset of points in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSample {
    points: Vec<f64>,
}

impl PointSample {
    pub fn new(points: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptySample);
        }
        if let Some(x) = points.iter().find(|x| !(0.0..=1.0).contains(*x)) {
            return Err(Error::Domain(format!("sample point {x} outside [0, 1]")));
        }
        Ok(PointSample { points })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    fn sorted(&self) -> Vec<f64> {
        let mut xs = self.points.clone();
        xs.sort_by(f64::total_cmp);
        xs
    }
}

/// `D*_N = sup_t |#{x_i < t}/N − t|`, from the sorted points.
pub fn star_discrepancy(sample: &PointSample) -> f64 {
    star_of_sorted(&sample.sorted())
}

fn star_of_sorted(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let i = i as f64;
            ((i + 1.0) / n - x).max(x - i / n)
        })
        .fold(0.0, f64::max)
}

/// Two-sided discrepancy `sup_{[a,b) ⊂ [0,1]} |#{x_i ∈ [a,b)}/N − (b − a)|`.
///
/// The supremum is reached in the limit by intervals whose ends sit at a
/// point or just past it. A single sweep over the distinct point values
/// covers every such pair: overcounts pair a left end at a point with a right
/// end just past a later point, undercounts pair a left end just past a point
/// (or at 0) with a right end at a later point (or at 1).
pub fn extreme_discrepancy(sample: &PointSample) -> f64 {
    extreme_of_sorted(&sample.sorted())
}

fn extreme_of_sorted(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    // anchors at 0
    let mut min_over = 0.0_f64; // min of cnt/N − pos over left ends, overcount side
    let mut min_under = 0.0_f64; // min of pos − cnt/N over left ends, undercount side
    let mut over = 0.0_f64;
    let mut under = 0.0_f64;

    let mut i = 0;
    while i < xs.len() {
        let v = xs[i];
        let below = i as f64; // points < v
        let mut j = i;
        while j < xs.len() && xs[j] == v {
            j += 1;
        }
        let upto = j as f64; // points <= v

        min_over = min_over.min(below / n - v);
        under = under.max(v - below / n - min_under);
        if v < 1.0 {
            over = over.max(upto / n - v - min_over);
        }
        min_under = min_under.min(v - upto / n);
        i = j;
    }
    // right end at 1 never captures a point sitting at 1
    let below_one = xs.partition_point(|&x| x < 1.0) as f64;
    over = over.max(below_one / n - 1.0 - min_over);
    under = under.max(1.0 - below_one / n - min_under);
    over.max(under)
}

pub fn star_discrepancy_of(points: &[f64]) -> Result<f64> {
    Ok(star_discrepancy(&PointSample::new(points.to_vec())?))
}

pub fn extreme_discrepancy_of(points: &[f64]) -> Result<f64> {
    Ok(extreme_discrepancy(&PointSample::new(points.to_vec())?))
}

/// Both statistics at once; the two-sided value is skipped above `extreme_cap`.
pub fn discrepancies(sample: &PointSample, extreme_cap: usize) -> (f64, Option<f64>) {
    let xs = sample.sorted();
    let star = star_of_sorted(&xs);
    let extreme = (xs.len() <= extreme_cap).then(|| extreme_of_sorted(&xs));
    if let Some(e) = extreme {
        // [0, t) is one of the half-open intervals
        assert!(e + 1e-15 >= star, "extreme {e} < star {star}");
    }
    (star, extreme)
}

/// One row of a discrepancy-growth table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveRow {
    pub n: usize,
    pub d_star: f64,
    pub d_extreme: Option<f64>,
    /// `N·D*_N / ln N`.
    pub normalized: f64,
}

/// Discrepancy of the first `N` points of `seq` for every `N` in `ns`.
///
/// `extreme` requests the two-sided value, computed only for `N <= extreme_cap`.
pub fn discrepancy_curve(
    seq: &dyn DirectionSequence,
    ns: &[usize],
    extreme: bool,
    extreme_cap: usize,
) -> Result<Vec<CurveRow>> {
    if ns.is_empty() {
        return Err(Error::Domain("no sample sizes given".into()));
    }
    if let Some(&bad) = ns.iter().find(|&&n| n < 2) {
        return Err(Error::Domain(format!("sample size {bad} < 2")));
    }
    let max_n = *ns.iter().max().unwrap();
    let points = seq.take(max_n)?;
    ns.iter()
        .map(|&n| {
            let sample = PointSample::new(points[..n].to_vec())?;
            let cap = if extreme { extreme_cap } else { 0 };
            let (d_star, d_extreme) = discrepancies(&sample, cap);
            Ok(CurveRow {
                n,
                d_star,
                d_extreme,
                normalized: n as f64 * d_star / (n as f64).ln(),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::registry::{KakutaniFibonacci, Kronecker, SeededRandom, VanDerCorput};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// `sup_t |#{x < t}/N − t|` over the grid `t = j/T`.
    fn star_brute(points: &[f64], t_steps: usize) -> f64 {
        let mut xs = points.to_vec();
        xs.sort_by(f64::total_cmp);
        let n = xs.len() as f64;
        let mut below = 0;
        let mut worst = 0.0_f64;
        for j in 0..=t_steps {
            let t = j as f64 / t_steps as f64;
            while below < xs.len() && xs[below] < t {
                below += 1;
            }
            worst = worst.max((below as f64 / n - t).abs());
        }
        worst
    }

    #[derive(Clone, Copy)]
    enum End {
        At(f64),
        Past(f64),
    }

    impl End {
        fn pos(self) -> f64 {
            match self {
                End::At(v) | End::Past(v) => v,
            }
        }
        // orders `v` before `v+`
        fn key(self) -> (f64, u8) {
            match self {
                End::At(v) => (v, 0),
                End::Past(v) => (v, 1),
            }
        }
    }

    /// Every half-open interval with ends in {0, 1, x_i, x_i+}.
    fn extreme_brute(points: &[f64]) -> f64 {
        let mut ends = vec![End::At(0.0), End::At(1.0)];
        for &x in points {
            ends.push(End::At(x));
            if x < 1.0 {
                ends.push(End::Past(x));
            }
        }
        let n = points.len() as f64;
        let mut worst = 0.0_f64;
        for &a in &ends {
            for &b in &ends {
                if a.key() > b.key() {
                    continue;
                }
                let count = points
                    .iter()
                    .filter(|&&x| {
                        let after_a = match a {
                            End::At(v) => x >= v,
                            End::Past(v) => x > v,
                        };
                        let before_b = match b {
                            End::At(v) => x < v,
                            End::Past(v) => x <= v,
                        };
                        after_a && before_b
                    })
                    .count() as f64;
                worst = worst.max((count / n - (b.pos() - a.pos())).abs());
            }
        }
        worst
    }

    fn sample(points: &[f64]) -> PointSample {
        PointSample::new(points.to_vec()).unwrap()
    }

    #[test]
    fn star_examples() {
        assert!((star_discrepancy(&sample(&[0.5])) - 0.5).abs() < 1e-15);
        let mid: Vec<f64> = (1..=10).map(|i| (2 * i - 1) as f64 / 20.0).collect();
        assert!((star_discrepancy(&sample(&mid)) - 0.05).abs() < 1e-15);
        assert!((star_discrepancy(&sample(&[0.1])) - 0.9).abs() < 1e-15);
        // brute force agrees on the same examples
        assert!((star_brute(&[0.5], 100_000) - 0.5).abs() <= 1e-5 + 1e-12);
        assert!((star_brute(&mid, 100_000) - 0.05).abs() <= 1e-5 + 1e-12);
        assert!((star_brute(&[0.1], 100_000) - 0.9).abs() <= 1e-5 + 1e-12);
    }

    #[test]
    fn empty_and_out_of_range_samples() {
        assert!(matches!(PointSample::new(vec![]), Err(Error::EmptySample)));
        assert!(PointSample::new(vec![1.5]).is_err());
        assert!(PointSample::new(vec![f64::NAN]).is_err());
        assert!(star_discrepancy_of(&[]).is_err());
        assert!(extreme_discrepancy_of(&[]).is_err());
    }

    #[test]
    fn extreme_examples() {
        // a short interval starting at the lone point holds all the mass
        assert!((extreme_discrepancy(&sample(&[0.5])) - 1.0).abs() < 1e-15);
        assert!((extreme_brute(&[0.5]) - 1.0).abs() < 1e-15);
        let equi = [0.0, 0.25, 0.5, 0.75];
        assert!((extreme_discrepancy(&sample(&equi)) - 0.25).abs() < 1e-15);
        assert!((extreme_brute(&equi) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn extreme_handles_ties_and_endpoints() {
        for pts in [
            vec![0.0, 0.0, 1.0],
            vec![1.0],
            vec![0.0],
            vec![0.3, 0.3, 0.3, 0.9],
            vec![0.2, 0.2, 0.7, 0.7, 1.0, 1.0],
        ] {
            let fast = extreme_discrepancy(&sample(&pts));
            let brute = extreme_brute(&pts);
            assert!((fast - brute).abs() < 1e-14, "{pts:?}: {fast} vs {brute}");
        }
    }

    #[test]
    fn star_agrees_with_threshold_brute_force() {
        let t_steps = 100_000;
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let n = rng.gen_range(1..=200);
            let pts: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
            let exact = star_discrepancy(&sample(&pts));
            let brute = star_brute(&pts, t_steps);
            assert!(brute <= exact + 1e-15);
            assert!(exact - brute <= 1.0 / t_steps as f64, "{exact} vs {brute}");
        }
    }

    proptest! {
        #[test]
        fn extreme_matches_candidate_enumeration(
            pts in prop::collection::vec(
                prop_oneof![
                    4 => 0.0..=1.0f64,
                    1 => prop::sample::select(vec![0.0, 0.25, 0.5, 1.0]),
                ],
                1..25,
            )
        ) {
            let s = sample(&pts);
            let fast = extreme_discrepancy(&s);
            let brute = extreme_brute(&pts);
            prop_assert!((fast - brute).abs() < 1e-12, "{} vs {}", fast, brute);
            let star = star_discrepancy(&s);
            prop_assert!(fast + 1e-15 >= star);
            prop_assert!(fast <= 2.0 * star + 1e-15);
        }
    }

    #[test]
    fn curve_rows() {
        let rows = discrepancy_curve(&KakutaniFibonacci, &[100], true, DEFAULT_EXTREME_CAP).unwrap();
        assert_eq!(rows.len(), 1);
        assert!(rows[0].d_star < 0.05, "{}", rows[0].d_star);
        assert!(rows[0].d_extreme.unwrap() >= rows[0].d_star);

        let rows = discrepancy_curve(&Kronecker { alpha: 0.5 }, &[100], false, 0).unwrap();
        assert!(rows[0].d_star >= 0.49);
        assert!(rows[0].d_extreme.is_none());

        let rows = discrepancy_curve(&KakutaniFibonacci, &[1000], true, 500).unwrap();
        assert!(rows[0].d_extreme.is_none());

        assert!(discrepancy_curve(&KakutaniFibonacci, &[], false, 0).is_err());
        assert!(discrepancy_curve(&KakutaniFibonacci, &[1], false, 0).is_err());
    }

    #[test]
    fn vdc_envelope_constant() {
        let ns: Vec<usize> = (4..=14).map(|k| 1usize << k).collect();
        let rows = discrepancy_curve(&VanDerCorput { base: 2 }, &ns, false, 0).unwrap();
        for r in &rows {
            // D*_N <= c log N / N with c = N D*_N / ln N
            assert!(r.normalized < 1.0, "N = {}: {}", r.n, r.normalized);
        }
    }

    #[test]
    fn random_points_are_not_low_discrepancy() {
        let rows = discrepancy_curve(&SeededRandom { seed: 1 }, &[10_000], false, 0).unwrap();
        // sqrt(N) scaling puts N D* / ln N far above the low-discrepancy envelope
        assert!(rows[0].normalized > 3.0, "{}", rows[0].normalized);
    }
}
