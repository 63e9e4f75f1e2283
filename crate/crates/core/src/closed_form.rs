//! Closed forms for constant-strength cuts and unit node time.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{CutDecay, SvbcParams};
use crate::rational::Rational;
use crate::{below_pow2, tree_size};

/// Which branch of the optimal cut-count rule produced `k_star`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum CutCase {
    /// `Z >= r δ*` and removing the layer at depth `δ*` pays off.
    DeltaStar,
    /// `Z >= r δ*` and it does not.
    DeltaStarMinus1,
    /// `Z < r δ*` and cutting down to depth `⌈Z/r⌉ - 1` pays off.
    DepthMaxMinus1,
    /// Pure branching.
    Zero,
}

impl std::fmt::Display for CutCase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            CutCase::DeltaStar => "delta_star",
            CutCase::DeltaStarMinus1 => "delta_star_minus_1",
            CutCase::DepthMaxMinus1 => "depth_max_minus_1",
            CutCase::Zero => "zero",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CutCountAnswer {
    pub k_star: u64,
    pub case_taken: CutCase,
    /// `2^{⌈(Z - c k*)/r⌉ + 1} - 1 + k*`, with the exponent's ceiling
    /// clamped at zero.
    pub min_size_lower_bound: u64,
    pub delta_star: u64,
    /// Depth of the branching component that follows the `k_star` cuts.
    pub branch_depth: u64,
}

fn require_positive(name: &str, v: &Rational) -> Result<()> {
    if v.is_positive() {
        Ok(())
    } else {
        Err(Error::Parameter(format!("{name} = {v} must be > 0")))
    }
}

/// `max{0, ⌈(Z - δ r)/c⌉}` for a possibly negative depth.
fn kappa_signed(z: &Rational, r: &Rational, c: &Rational, delta: i64) -> u64 {
    let share = z - r * Rational::from_integer(delta);
    (share / c).ceil_i64().max(0) as u64
}

/// Fewest root cuts that let a depth-`delta` branching component finish
/// proving `z`.
pub fn kappa(z: &Rational, r: &Rational, c: &Rational, delta: u64) -> Result<u64> {
    require_positive("c", c)?;
    Ok(kappa_signed(z, r, c, delta as i64))
}

/// Largest `p` with `2^p <= n`, for `n >= 1`.
fn floor_log2(n: u64) -> u64 {
    debug_assert!(n >= 1);
    63 - u64::from(n.leading_zeros())
}

/// `⌊log₂⌈r/c⌉⌋`, computed with integer arithmetic.
pub fn delta_star(r: &Rational, c: &Rational) -> Result<u64> {
    require_positive("c", c)?;
    require_positive("r", r)?;
    let ratio = (r / c).ceil_i64() as u64;
    Ok(floor_log2(ratio))
}

/// Depth of the pure branching tree, `⌈Z/r⌉` clamped at zero.
pub fn depth_max(z: &Rational, r: &Rational) -> u64 {
    (z / r).ceil_i64().max(0) as u64
}

/// Branching depth left after `k` cuts: `max{0, ⌈(Z - c k)/r⌉}`.
pub fn depth_after_cuts(z: &Rational, r: &Rational, c: &Rational, k: u64) -> u64 {
    let share = z - c * Rational::from(k);
    (share / r).ceil_i64().max(0) as u64
}

/// Size of the cut-and-branch tree with `k` root cuts when `ell = r`.
pub fn size_by_cut_count(z: &Rational, r: &Rational, c: &Rational, k: u64) -> Result<u64> {
    require_positive("r", r)?;
    tree_size(k, depth_after_cuts(z, r, c, k))
}

/// Optimal number of root cuts for `0 < c <= ell = r` and unit node time.
pub fn optimal_cuts_equal_lr(z: &Rational, r: &Rational, c: &Rational) -> Result<CutCountAnswer> {
    require_positive("c", c)?;
    if c > r {
        return Err(Error::Parameter(format!(
            "the cut-count formula needs c <= r, got c = {c}, r = {r}"
        )));
    }
    if z.is_negative() {
        return Err(Error::Parameter(format!("Z = {z} must be >= 0")));
    }
    let ds = delta_star(r, c)?;
    let dmax = depth_max(z, r);
    let k = |delta: i64| kappa_signed(z, r, c, delta);
    let (k_star, case_taken) = if *z >= r * Rational::from(ds) {
        let (deeper, shallower) = (k(ds as i64), k(ds as i64 - 1));
        if !below_pow2(shallower - deeper, ds) {
            (deeper, CutCase::DeltaStar)
        } else {
            (shallower, CutCase::DeltaStarMinus1)
        }
    } else {
        let cand = k(dmax as i64 - 1);
        if below_pow2(cand, dmax) {
            (cand, CutCase::DepthMaxMinus1)
        } else {
            (0, CutCase::Zero)
        }
    };
    let branch_depth = depth_after_cuts(z, r, c, k_star);
    Ok(CutCountAnswer {
        k_star,
        case_taken,
        min_size_lower_bound: tree_size(k_star, branch_depth)?,
        delta_star: ds,
        branch_depth,
    })
}

/// Same as [`optimal_cuts_equal_lr`] but takes full parameters and refuses
/// anything outside the formula's hypothesis.
pub fn optimal_cuts(params: &SvbcParams, z: &Rational) -> Result<CutCountAnswer> {
    if params.decay != CutDecay::Constant {
        return Err(Error::Parameter(
            "the closed-form cut count needs constant cut strength".into(),
        ));
    }
    if !params.equal_branching() {
        return Err(Error::Parameter(format!(
            "the closed-form cut count needs ell = r, got ell = {}, r = {}",
            params.ell, params.r
        )));
    }
    optimal_cuts_equal_lr(z, &params.r, &params.c)
}

/// `r ⌊log₂⌈r/c⌉⌋`: above this bound every minimal tree has a cut.
pub fn cut_benefit_threshold(r: &Rational, c: &Rational) -> Result<Rational> {
    require_positive("c", c)?;
    if c > r {
        return Err(Error::Parameter(format!(
            "need c <= r, got c = {c}, r = {r}"
        )));
    }
    Ok(r * Rational::from(delta_star(r, c)?))
}

/// `max{0, ⌈(Z - Z̄)/c⌉}`.
pub fn min_cut_count_lower(z: &Rational, z_bar: &Rational, c: &Rational) -> Result<u64> {
    require_positive("c", c)?;
    Ok(((z - z_bar) / c).ceil_i64().max(0) as u64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    fn int(n: i64) -> Rational {
        Rational::from_integer(n)
    }

    #[test]
    fn kappa_examples() {
        assert_eq!(kappa(&int(6), &int(3), &int(1), 1).unwrap(), 3);
        assert_eq!(kappa(&int(6), &int(3), &int(1), 2).unwrap(), 0);
        assert!(kappa(&int(6), &int(3), &int(0), 2).is_err());
    }

    #[test]
    fn kappa_matches_linear_scan() {
        let (z, c) = (int(5), int(1));
        let scan = (0..).find(|&k| &c * Rational::from(k) >= z).unwrap();
        assert_eq!(kappa(&z, &int(3), &c, 0).unwrap(), scan);
        assert_eq!(scan, 5);
    }

    #[test]
    fn delta_star_examples() {
        assert_eq!(delta_star(&int(3), &int(1)).unwrap(), 1);
        assert_eq!(delta_star(&int(1), &int(1)).unwrap(), 0);
        assert_eq!(delta_star(&int(4), &int(1)).unwrap(), 2);
        assert_eq!(delta_star(&int(8), &int(1)).unwrap(), 3);
        assert_eq!(delta_star(&int(7), &int(1)).unwrap(), 2);
        assert!(delta_star(&int(7), &int(0)).is_err());
    }

    #[test]
    fn optimal_cuts_examples() {
        let a = optimal_cuts_equal_lr(&int(6), &int(3), &int(1)).unwrap();
        assert_eq!(a.k_star, 3);
        assert_eq!(a.case_taken, CutCase::DeltaStar);
        assert_eq!(a.min_size_lower_bound, 6);

        let b = optimal_cuts_equal_lr(&int(4), &int(4), &int(1)).unwrap();
        assert_eq!(b.k_star, 0);
        assert_eq!(b.case_taken, CutCase::Zero);
        assert_eq!(b.min_size_lower_bound, 3);

        let c = optimal_cuts_equal_lr(&int(0), &int(3), &int(1)).unwrap();
        assert_eq!(c.k_star, 0);
        assert_eq!(c.min_size_lower_bound, 1);
    }

    #[test]
    fn optimal_cuts_rejects_outside_hypothesis() {
        assert!(optimal_cuts_equal_lr(&int(4), &int(1), &int(2)).is_err());
        assert!(optimal_cuts_equal_lr(&int(4), &int(1), &int(0)).is_err());
        let unequal = SvbcParams::constant(int(1), int(3), int(1)).unwrap();
        assert!(optimal_cuts(&unequal, &int(4)).is_err());
        let harm = SvbcParams::harmonic(int(3), int(3), int(1)).unwrap();
        assert!(optimal_cuts(&harm, &int(4)).is_err());
    }

    #[test]
    fn thresholds() {
        assert_eq!(cut_benefit_threshold(&int(3), &int(1)).unwrap(), int(3));
        assert_eq!(cut_benefit_threshold(&int(1), &int(1)).unwrap(), int(0));
        assert_eq!(cut_benefit_threshold(&int(4), &int(1)).unwrap(), int(8));
        assert_eq!(min_cut_count_lower(&int(10), &int(3), &int(1)).unwrap(), 7);
        assert_eq!(min_cut_count_lower(&int(3), &int(3), &int(1)).unwrap(), 0);
        assert_eq!(min_cut_count_lower(&int(10), &int(3), &int(2)).unwrap(), 4);
    }

    #[test]
    fn nonmonotone_sizes() {
        let sizes: Vec<_> = (0..3)
            .map(|k| size_by_cut_count(&int(5), &int(3), &int(1), k).unwrap())
            .collect();
        assert_eq!(sizes, [7, 8, 5]);
        // two cuts save 2^{⌈Z/r⌉} - 2
        assert_eq!(sizes[0] - sizes[2], (1u64 << 2) - 2);
    }

    #[test]
    fn fractional_inputs() {
        // c = 1/3, r = 1: ⌈3⌉ = 3, δ* = 1
        assert_eq!(delta_star(&int(1), &q(1, 3)).unwrap(), 1);
        assert_eq!(kappa(&q(5, 2), &int(1), &q(1, 3), 2).unwrap(), 2);
    }
}
