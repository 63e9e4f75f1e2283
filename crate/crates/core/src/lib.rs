//! Exact analysis of an abstract branch-and-cut model.
//!
//! Each branch node improves the bound of its children by fixed amounts
//! `(ell, r)`, each cut node improves its child by a cut strength that is
//! either constant or decays harmonically, and every node costs a time that
//! depends on how many cuts sit above it. The crate computes minimum-time
//! trees exactly (rational arithmetic throughout), evaluates the closed-form
//! answers available for special cases, and checks them against each other.
//!
//! Modules:
//! - [`model`]: parameters, time-functions, trees and tree time.
//! - [`closed_form`]: optimal cut count for constant cuts and unit time.
//! - [`svbwc`]: harmonic numbers and the approximate rule for decaying cuts.
//! - [`optimizer`]: the exact DP and the root-cuts-only search.
//! - [`oracle`]: brute-force enumeration used as ground truth.
//! - [`instances`]: the disjoint-triangle family.
//! - [`verify`]: property suites over parameter grids.
//! - [`cli`]: the `abc-tree` command line.

pub mod cli;
pub mod closed_form;
pub mod error;
pub mod instances;
pub mod model;
pub mod optimizer;
pub mod oracle;
pub mod rational;
pub mod svbwc;
pub mod verify;

pub use error::{Error, Result};
pub use model::{BcTree, CutDecay, OptResult, SvbcParams, TimeFn};
pub use rational::Rational;

/// `x < 2^d`, true for every `x` once `2^d` leaves `u64`.
pub(crate) fn below_pow2(x: u64, d: u64) -> bool {
    d >= 64 || x < 1u64 << d
}

/// `cuts + 2^{depth+1} - 1`: nodes of a cut path followed by a complete
/// branching component.
pub(crate) fn tree_size(cuts: u64, depth: u64) -> Result<u64> {
    (depth < 63)
        .then(|| (1u64 << (depth + 1)) - 1)
        .and_then(|full| full.checked_add(cuts))
        .ok_or_else(|| {
            Error::Domain(format!(
                "tree with {cuts} cuts and depth {depth} overflows u64"
            ))
        })
}
