//! Worsening cuts: the k-th cut on a path improves the bound by `c / k`.
//!
//! Harmonic numbers are exact rationals for small arguments. Past
//! [`EXACT_LIMIT`] terms the exact sum is too large to carry around, so
//! comparisons `H(k) >= x` use the Euler-Maclaurin enclosure
//!
//! ```text
//! ln k + γ + 1/(2k) - 1/(12k²) < H(k) < ln k + γ + 1/(2k) - 1/(12k²) + 1/(120k⁴)
//! ```
//!
//! and fall back to the exact sum whenever the float decision is within
//! [`DECISION_MARGIN`] of the threshold.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::tree_size;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::rational::{ratio_to_f64, Rational};

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Largest `k` for which comparisons always use the exact rational `H(k)`.
pub const EXACT_LIMIT: u64 = 256;

/// Float decisions closer than this to the threshold are redone exactly.
pub const DECISION_MARGIN: f64 = 1e-12;

/// Exact `H(k) = 1 + 1/2 + ... + 1/k`; `H(0) = 0`.
pub fn harmonic(k: u64) -> Rational {
    let mut state = HarmonicState::new();
    for _ in 0..k {
        state.step();
    }
    Rational::from_big(BigRational::new(state.num, state.den))
}

/// Running sum `num / den` with `den = lcm(1, ..., k)`, never reduced.
#[derive(Debug, Clone)]
struct HarmonicState {
    k: u64,
    num: BigInt,
    den: BigInt,
}

impl HarmonicState {
    fn new() -> Self {
        HarmonicState {
            k: 0,
            num: BigInt::zero(),
            den: BigInt::one(),
        }
    }

    fn step(&mut self) {
        self.k += 1;
        let k = self.k;
        let rem = (&self.den % k).to_u64().expect("remainder below k");
        let scale = k / rem.gcd(&k);
        if scale > 1 {
            self.num *= scale;
            self.den *= scale;
        }
        self.num += &self.den / k;
    }
}

/// Successive exact harmonic numbers `H(0), H(1), H(2), ...`.
#[derive(Debug, Clone)]
pub struct HarmonicSeq {
    state: HarmonicState,
    started: bool,
}

impl HarmonicSeq {
    pub fn new() -> Self {
        HarmonicSeq {
            state: HarmonicState::new(),
            started: false,
        }
    }

    fn advance(&mut self) {
        if self.started {
            self.state.step();
        }
        self.started = true;
    }

    /// Next harmonic number rounded to a float, skipping the costly
    /// reduction to lowest terms.
    pub fn next_f64(&mut self) -> f64 {
        self.advance();
        ratio_to_f64(&self.state.num, &self.state.den)
    }
}

impl Default for HarmonicSeq {
    fn default() -> Self {
        Self::new()
    }
}

impl Iterator for HarmonicSeq {
    type Item = Rational;

    fn next(&mut self) -> Option<Rational> {
        self.advance();
        Some(Rational::from_big(BigRational::new(
            self.state.num.clone(),
            self.state.den.clone(),
        )))
    }
}

/// Enclosure `(lo, hi)` of `H(k)` for `k >= 1`, before float rounding.
fn harmonic_enclosure(k: u64) -> (f64, f64) {
    let kf = k as f64;
    let lo = kf.ln() + EULER_GAMMA + 0.5 / kf - 1.0 / (12.0 * kf * kf);
    let hi = lo + 1.0 / (120.0 * kf.powi(4));
    (lo, hi)
}

/// Decides `H(k) >= x` exactly.
pub fn harmonic_at_least(k: u64, x: &Rational) -> bool {
    if !x.is_positive() {
        return true;
    }
    if k == 0 {
        return false;
    }
    if k <= EXACT_LIMIT {
        return harmonic(k) >= *x;
    }
    let xf = x.to_f64();
    let (lo, hi) = harmonic_enclosure(k);
    if lo - DECISION_MARGIN >= xf {
        true
    } else if hi + DECISION_MARGIN < xf {
        false
    } else {
        harmonic(k) >= *x
    }
}

/// `H⁻¹(x)`: the least `k >= 0` with `H(k) >= x`.
///
/// Small answers come from an exact scan. Larger ones are seeded with
/// `⌊e^{x-γ} + 1/2⌋` and then corrected with exact comparisons, so the
/// result never depends on the seed being right.
pub fn harmonic_inverse(x: &Rational) -> u64 {
    if !x.is_positive() {
        return 0;
    }
    for (k, h) in HarmonicSeq::new().enumerate().skip(1) {
        if h >= *x {
            return k as u64;
        }
        if k as u64 == EXACT_LIMIT {
            break;
        }
    }
    let xf = x.to_f64();
    assert!(xf < 43.0, "H^-1({x}) does not fit in u64");
    let seed = ((xf - EULER_GAMMA).exp() + 0.5).floor() as u64;
    let mut k = seed.max(EXACT_LIMIT + 1);
    while k > EXACT_LIMIT + 1 && harmonic_at_least(k - 1, x) {
        k -= 1;
    }
    while !harmonic_at_least(k, x) {
        k += 1;
    }
    k
}

fn require_positive(name: &str, v: &Rational) -> Result<()> {
    if v.is_positive() {
        Ok(())
    } else {
        Err(Error::Parameter(format!("{name} = {v} must be > 0")))
    }
}

/// `Z - δ r`, the part of the bound left to the cuts.
fn cut_share(z: &Rational, r: &Rational, delta: i64) -> Rational {
    z - r * Rational::from_integer(delta)
}

/// Fewest root cuts letting a depth-`delta` branching component finish the
/// proof: `H⁻¹((Z - δ r) / c)`, zero when nothing is left for the cuts.
pub fn kappa_bar(z: &Rational, r: &Rational, c: &Rational, delta: u64) -> Result<u64> {
    require_positive("c", c)?;
    Ok(harmonic_inverse(&(cut_share(z, r, delta as i64) / c)))
}

/// Exact size of the cut-and-branch tree with `κ̄(δ)` root cuts and a
/// depth-`δ` branching component.
pub fn size_at_depth(z: &Rational, r: &Rational, c: &Rational, delta: u64) -> Result<u64> {
    tree_size(kappa_bar(z, r, c, delta)?, delta)
}

/// Smallest cut-and-branch size over every branching depth up to `⌈Z/r⌉`.
/// Returns `(delta, cuts, size)`.
pub fn min_size_over_depths(z: &Rational, r: &Rational, c: &Rational) -> Result<(u64, u64, u64)> {
    require_positive("r", r)?;
    let max_depth = (z / r).ceil_i64().max(0) as u64;
    let mut best: Option<(u64, u64, u64)> = None;
    for delta in 0..=max_depth {
        let cuts = kappa_bar(z, r, c, delta)?;
        // deeper components only grow; depth 0 always fits
        let Ok(size) = tree_size(cuts, delta) else {
            break;
        };
        if best.is_none_or(|(_, _, s)| size < s) {
            best = Some((delta, cuts, size));
        }
    }
    Ok(best.expect("at least depth 0"))
}

/// Lower and upper bounds on the size of a depth-`δ` tree. When the cut
/// share is at most `c` the size is known exactly and both bounds equal it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SizeBounds {
    pub lb: f64,
    pub ub: f64,
    pub exact: Option<u64>,
}

/// `f_lb(δ) = e^{(Z-δr)/c - 1} + 2^{δ+1} - 1` for real `δ`.
pub fn f_lb(z: f64, r: f64, c: f64, delta: f64) -> f64 {
    ((z - delta * r) / c - 1.0).exp() + (delta + 1.0).exp2() - 1.0
}

/// `f_ub(δ) = e^{(Z-δr)/c} + 2^{δ+1} - 2` for real `δ`.
pub fn f_ub(z: f64, r: f64, c: f64, delta: f64) -> f64 {
    ((z - delta * r) / c).exp() + (delta + 1.0).exp2() - 2.0
}

pub fn size_bounds(z: &Rational, r: &Rational, c: &Rational, delta: u64) -> Result<SizeBounds> {
    require_positive("c", c)?;
    require_positive("r", r)?;
    let share = cut_share(z, r, delta as i64);
    let full = tree_size(1, delta)?;
    if !share.is_positive() {
        let n = full - 1;
        return Ok(SizeBounds {
            lb: n as f64,
            ub: n as f64,
            exact: Some(n),
        });
    }
    if share <= *c {
        return Ok(SizeBounds {
            lb: full as f64,
            ub: full as f64,
            exact: Some(full),
        });
    }
    let delta_hat = ((z - c) / r).floor_i64();
    if delta as i64 > delta_hat {
        return Err(Error::Domain(format!(
            "depth {delta} exceeds {delta_hat}, where the size bounds are not established"
        )));
    }
    let (zf, rf, cf) = (z.to_f64(), r.to_f64(), c.to_f64());
    let d = delta as f64;
    Ok(SizeBounds {
        lb: f_lb(zf, rf, cf, d),
        ub: f_ub(zf, rf, cf, d),
        exact: None,
    })
}

/// Real minimizers of `f_lb` (`lower`) and `f_ub` (`upper`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Minimizers {
    pub lower: f64,
    pub upper: f64,
}

impl Minimizers {
    pub fn gap(&self) -> f64 {
        self.upper - self.lower
    }
}

pub fn continuous_minimizers(z: &Rational, r: &Rational, c: &Rational) -> Result<Minimizers> {
    require_positive("c", c)?;
    require_positive("r", r)?;
    let (zf, rf, cf) = (z.to_f64(), r.to_f64(), c.to_f64());
    let ln2 = std::f64::consts::LN_2;
    let denom = rf + cf * ln2;
    let common = cf * (rf / (cf * ln2)).ln() + zf;
    let m = Minimizers {
        lower: (common - cf * (1.0 + ln2)) / denom,
        upper: (common - cf * ln2) / denom,
    };
    let expected_gap = cf / denom;
    debug_assert!((m.gap() - expected_gap).abs() < 1e-9);
    if !(m.gap() > 0.0 && m.gap() < 1.5) {
        return Err(Error::Invariant(format!(
            "minimizer gap {} outside (0, 1.5)",
            m.gap()
        )));
    }
    Ok(m)
}

/// Nonnegative integer minimizer of a convex function with real minimizer
/// `x`: the better of `⌊x⌋` and `⌈x⌉`, clamped at zero. Ties go to the
/// smaller depth.
pub fn round_convex_minimizer(x: f64, f: impl Fn(f64) -> f64) -> u64 {
    let lo = x.floor().max(0.0);
    let hi = x.ceil().max(0.0);
    if f(hi) < f(lo) {
        hi as u64
    } else {
        lo as u64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Candidate {
    pub delta: u64,
    pub cuts: u64,
    /// `u64::MAX` when the tree is too large to count.
    pub size: u64,
}

/// Output of the approximate cut-count rule.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SvbwcPlan {
    pub chosen_delta: u64,
    pub num_cuts: u64,
    pub tree_size: u64,
    /// Candidates in the order `δ₁ = ⌊δ̄ᶜ⌋`, `δ₂ = ⌈δ̄ᶜ⌉`, `δ₃ = δ̂* + 1`.
    pub candidates: Vec<Candidate>,
    pub delta_upper_c: f64,
    pub delta_hat_star: i64,
}

/// Picks the number of root cuts by checking the two roundings of the real
/// minimizer of `f_ub` and the one depth past the range where the size
/// bounds hold. Ties go to the smaller depth.
pub fn approx_cut_count(z: &Rational, r: &Rational, c: &Rational) -> Result<SvbwcPlan> {
    let mins = continuous_minimizers(z, r, c)?;
    let delta_hat_star = ((z - c) / r).floor_i64();
    let deltas = [
        mins.upper.floor().max(0.0) as u64,
        mins.upper.ceil().max(0.0) as u64,
        (delta_hat_star + 1).max(0) as u64,
    ];
    let candidates = deltas
        .iter()
        .map(|&delta| {
            let cuts = kappa_bar(z, r, c, delta)?;
            Ok(Candidate {
                delta,
                cuts,
                size: tree_size(cuts, delta).unwrap_or(u64::MAX),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let best = candidates
        .iter()
        .min_by_key(|cand| (cand.size, cand.delta))
        .copied()
        .expect("three candidates");
    if best.size == u64::MAX {
        return Err(Error::Domain(format!(
            "every candidate tree for Z = {z} overflows u64"
        )));
    }
    Ok(SvbwcPlan {
        chosen_delta: best.delta,
        num_cuts: best.cuts,
        tree_size: best.size,
        candidates,
        delta_upper_c: mins.upper,
        delta_hat_star,
    })
}

/// `max{8, e^{1 + r/c}}`.
pub fn approximation_factor(r: &Rational, c: &Rational) -> f64 {
    (1.0 + r.to_f64() / c.to_f64()).exp().max(8.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    fn int(n: i64) -> Rational {
        Rational::from_integer(n)
    }

    #[test]
    fn harmonic_examples() {
        assert_eq!(harmonic(0), int(0));
        assert_eq!(harmonic(2), q(3, 2));
        assert_eq!(harmonic(4), q(25, 12));
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(harmonic_inverse(&int(0)), 0);
        assert_eq!(harmonic_inverse(&q(-3, 2)), 0);
        for x in [q(1, 1000), q(1, 2), int(1)] {
            assert_eq!(harmonic_inverse(&x), 1);
        }
        assert_eq!(harmonic_inverse(&int(2)), 4);
        assert_eq!(harmonic_inverse(&int(3)), 11);
        // exact boundary: H(2) = 3/2 exactly
        assert_eq!(harmonic_inverse(&q(3, 2)), 2);
    }

    #[test]
    fn inverse_beyond_exact_range_matches_known_values() {
        // least k with H(k) >= n, n = 7..=12
        let known = [616u64, 1674, 4550, 12367, 33617, 91380];
        for (n, k) in (7..=12).zip(known) {
            assert_eq!(harmonic_inverse(&int(n)), k, "n = {n}");
        }
        // independent float summation brackets the same answers
        let mut sum = 0.0f64;
        let mut found = Vec::new();
        let mut n = 7.0;
        for k in 1..=100_000u64 {
            sum += 1.0 / k as f64;
            if sum >= n {
                found.push(k);
                n += 1.0;
            }
        }
        assert_eq!(found, known);
    }

    #[test]
    fn enclosure_agrees_with_exact_sum() {
        let mut seq = HarmonicSeq::new();
        let values: Vec<_> = (&mut seq).take(400).collect();
        for k in [257u64, 300, 399] {
            let exact = values[k as usize].to_f64();
            let (lo, hi) = harmonic_enclosure(k);
            assert!(lo < exact + 1e-13 && exact < hi + 1e-13, "k = {k}");
        }
    }

    #[test]
    fn kappa_bar_examples() {
        let (z, r, c) = (int(3), int(1), int(1));
        assert_eq!(kappa_bar(&z, &r, &c, 2).unwrap(), 1);
        assert_eq!(kappa_bar(&z, &r, &c, 3).unwrap(), 0);
        assert_eq!(kappa_bar(&z, &r, &c, 0).unwrap(), 11);
        assert!(kappa_bar(&z, &r, &int(0), 0).is_err());
    }

    #[test]
    fn size_bounds_examples() {
        let (z, r, c) = (int(3), int(1), int(1));
        assert_eq!(size_bounds(&z, &r, &c, 3).unwrap().exact, Some(15));
        assert_eq!(size_bounds(&z, &r, &c, 2).unwrap().exact, Some(8));
        let b = size_bounds(&z, &r, &c, 1).unwrap();
        assert_eq!(b.exact, None);
        assert!((b.lb - (std::f64::consts::E + 3.0)).abs() < 1e-12);
        assert!((b.ub - (std::f64::consts::E.powi(2) + 2.0)).abs() < 1e-12);
        let true_size = size_at_depth(&z, &r, &c, 1).unwrap();
        assert_eq!(true_size, 7);
        assert!(b.lb <= 7.0 && 7.0 <= b.ub);
    }

    #[test]
    fn minimizer_examples() {
        let m = continuous_minimizers(&int(3), &int(1), &int(1)).unwrap();
        let ln2 = std::f64::consts::LN_2;
        let expected = ((1.0 / ln2).ln() + 3.0 - ln2) / (1.0 + ln2);
        assert!((m.upper - expected).abs() < 1e-12);
        assert!((m.upper - 1.579).abs() < 1e-3);
        assert!((m.gap() - 1.0 / (1.0 + ln2)).abs() < 1e-12);
        assert!((m.gap() - 0.5906).abs() < 1e-4);
        let wide = continuous_minimizers(&int(5), &int(1000), &q(1, 1000)).unwrap();
        assert!(wide.gap() < 1e-5);
    }

    #[test]
    fn plan_example() {
        let plan = approx_cut_count(&int(3), &int(1), &int(1)).unwrap();
        let got: Vec<_> = plan
            .candidates
            .iter()
            .map(|c| (c.delta, c.cuts, c.size))
            .collect();
        assert_eq!(got, [(1, 4, 7), (2, 1, 8), (3, 0, 15)]);
        assert_eq!(
            (plan.chosen_delta, plan.num_cuts, plan.tree_size),
            (1, 4, 7)
        );
        assert_eq!(
            min_size_over_depths(&int(3), &int(1), &int(1)).unwrap().2,
            7
        );
    }

    #[test]
    fn plan_when_one_cut_suffices() {
        for (z, r) in [(q(1, 2), int(1)), (int(1), int(3)), (q(3, 4), q(1, 2))] {
            let plan = approx_cut_count(&z, &r, &int(1)).unwrap();
            assert_eq!(
                (plan.chosen_delta, plan.num_cuts, plan.tree_size),
                (0, 1, 2)
            );
        }
    }
}
