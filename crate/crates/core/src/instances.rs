//! Maximum independent set on `m` disjoint triangles.
//!
//! The LP relaxation sets every vertex to 1/2, so each triangle contributes
//! 3/2 against an integer optimum of 1. Branching on a vertex, in either
//! direction, forces that triangle's contribution down to 1; the clique cut
//! `x_u + x_v + x_w <= 1` does the same. All three moves therefore improve
//! the bound by 1/2 and leave a copy of the same problem with one triangle
//! fewer.

use serde::Serialize;

use crate::closed_form::{optimal_cuts_equal_lr, CutCountAnswer};
use crate::error::{Error, Result};
use crate::model::SvbcParams;
use crate::rational::{q, Rational};
use crate::tree_size;

/// Relaxation value contributed by one triangle (every vertex at 1/2).
fn lp_per_triangle() -> Rational {
    q(3, 2)
}

/// Integer value contributed by one triangle (one vertex picked).
fn ip_per_triangle() -> Rational {
    q(1, 1)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TriangleInstance {
    pub m: u64,
    pub lp_value: Rational,
    pub ip_value: Rational,
    pub gap: Rational,
}

impl TriangleInstance {
    pub fn new(m: u64) -> Result<Self> {
        if m == 0 {
            return Err(Error::Parameter("need at least one triangle".into()));
        }
        let count = Rational::from(m);
        let lp_value = lp_per_triangle() * &count;
        let ip_value = ip_per_triangle() * &count;
        let gap = &lp_value - &ip_value;
        Ok(TriangleInstance {
            m,
            lp_value,
            ip_value,
            gap,
        })
    }
}

/// Branch and cut improvements and the bound to prove for `m` triangles.
pub fn derive_model(m: u64) -> Result<(SvbcParams, Rational)> {
    let inst = TriangleInstance::new(m)?;
    // fixing any vertex, either way, caps its triangle at the integer value
    let branch_gain = lp_per_triangle() - ip_per_triangle();
    // the clique inequality has the same effect on one triangle
    let cut_gain = lp_per_triangle() - ip_per_triangle();
    let params = SvbcParams::constant(branch_gain.clone(), branch_gain, cut_gain)?;
    Ok((params, inst.gap))
}

/// Optimal cut plan for `m` triangles. Checks that it uses one cut per
/// triangle and no branching.
pub fn optimal_plan(m: u64) -> Result<CutCountAnswer> {
    let (params, z) = derive_model(m)?;
    let answer = optimal_cuts_equal_lr(&z, &params.r, &params.c)?;
    if answer.k_star != m || answer.delta_star != 0 {
        return Err(Error::Invariant(format!(
            "expected k* = {m} and delta* = 0, got k* = {} and delta* = {}",
            answer.k_star, answer.delta_star
        )));
    }
    Ok(answer)
}

/// Size of the cut-only optimum: `m` cuts and one leaf.
pub fn optimal_size(m: u64) -> Result<u64> {
    let answer = optimal_plan(m)?;
    tree_size(answer.k_star, answer.branch_depth)
}

/// Size of the pure branching tree: complete of depth `m`.
pub fn pure_branch_size(m: u64) -> Result<u64> {
    tree_size(0, m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derived_parameters() {
        let (p, z) = derive_model(1).unwrap();
        assert_eq!(
            (p.ell.clone(), p.r.clone(), p.c.clone()),
            (q(1, 2), q(1, 2), q(1, 2))
        );
        assert_eq!(z, q(1, 2));
        assert_eq!(derive_model(4).unwrap().1, q(2, 1));
        assert!(derive_model(0).is_err());
    }

    #[test]
    fn instance_values() {
        let inst = TriangleInstance::new(5).unwrap();
        assert_eq!(inst.lp_value, q(15, 2));
        assert_eq!(inst.ip_value, q(5, 1));
        assert_eq!(inst.gap, q(5, 2));
    }

    #[test]
    fn plans() {
        let a = optimal_plan(3).unwrap();
        assert_eq!((a.k_star, a.branch_depth), (3, 0));
        assert_eq!(optimal_size(3).unwrap(), 4);
        assert_eq!(pure_branch_size(3).unwrap(), 15);
        assert!(pure_branch_size(63).is_err());
        assert_eq!(optimal_plan(1).unwrap().k_star, 1);
    }
}
