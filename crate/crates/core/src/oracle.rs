//! Brute-force search over tree shapes, used as ground truth for the DP.
//!
//! The search walks gap labels downward from the root, tries every node
//! kind at every open node, and never memoizes. A node becomes a leaf exactly
//! when its gap reaches the target. The winning shape is materialized as a
//! [`BcTree`] and re-evaluated with [`tree_time`], so the reported time does
//! not rest on the search's own bookkeeping.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{tree_time, BcTree, OptResult, SvbcParams, TimeFn};
use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct EnumLimits {
    /// Branch nodes allowed on any root-to-leaf path.
    pub max_depth: u64,
    /// Nodes allowed in the returned tree.
    pub max_nodes: u64,
    /// Cut nodes allowed on any root-to-leaf path.
    pub max_cuts_per_path: u64,
}

impl EnumLimits {
    pub fn new(max_depth: u64, max_nodes: u64, max_cuts_per_path: u64) -> Result<Self> {
        if max_depth == 0 || max_nodes == 0 || max_cuts_per_path == 0 {
            return Err(Error::Parameter(
                "enumeration limits must all be >= 1".into(),
            ));
        }
        Ok(EnumLimits {
            max_depth,
            max_nodes,
            max_cuts_per_path,
        })
    }

    /// Limits wide enough that they never exclude a minimal tree: the pure
    /// branching depth and the pure cutting length.
    pub fn covering(params: &SvbcParams, z: &Rational, max_nodes: u64) -> Result<Self> {
        let depth = if params.ell.is_positive() {
            (z / &params.ell).ceil_i64().max(1) as u64
        } else {
            1
        };
        let cuts = params.cuts_needed(z).unwrap_or(0).max(1);
        Self::new(depth, max_nodes, cuts)
    }
}

#[derive(Debug, Clone)]
enum Shape {
    Leaf,
    Cut(Box<Shape>),
    Branch(Box<Shape>, Box<Shape>),
}

struct Search<'a> {
    params: &'a SvbcParams,
    w: &'a TimeFn,
    target: &'a Rational,
    limits: EnumLimits,
    visited: u64,
}

impl Search<'_> {
    /// Cheapest subtree rooted at a node with gap `gap`, `cuts` cuts and
    /// `branches` branch nodes above it.
    fn best(
        &mut self,
        gap: &Rational,
        cuts: u64,
        branches: u64,
    ) -> Result<Option<(Rational, Shape)>> {
        self.visited += 1;
        let here = self.w.eval(cuts)?;
        if gap >= self.target {
            return Ok(Some((here, Shape::Leaf)));
        }
        let mut best: Option<(Rational, Shape)> = None;
        if cuts < self.limits.max_cuts_per_path && self.params.c.is_positive() {
            let gain = self.params.cut_gain(cuts);
            if let Some((t, s)) = self.best(&(gap + &gain), cuts + 1, branches)? {
                best = Some((&here + &t, Shape::Cut(Box::new(s))));
            }
        }
        if branches < self.limits.max_depth {
            let left = self.best(&(gap + &self.params.ell), cuts, branches + 1)?;
            let right = if self.params.ell == self.params.r {
                // identical siblings
                left.clone()
            } else {
                self.best(&(gap + &self.params.r), cuts, branches + 1)?
            };
            if let (Some((tl, sl)), Some((tr, sr))) = (left, right) {
                let t = &here + &tl + &tr;
                if best.as_ref().is_none_or(|(b, _)| t < *b) {
                    best = Some((t, Shape::Branch(Box::new(sl), Box::new(sr))));
                }
            }
        }
        Ok(best)
    }
}

fn materialize(params: &SvbcParams, shape: &Shape) -> Result<BcTree> {
    let mut tree = BcTree::new(params.clone());
    let mut stack = vec![(tree.root(), shape)];
    while let Some((id, s)) = stack.pop() {
        match s {
            Shape::Leaf => {}
            Shape::Cut(child) => {
                let c = tree.cut(id)?;
                stack.push((c, child));
            }
            Shape::Branch(l, r) => {
                let (li, ri) = tree.branch(id)?;
                stack.push((li, l));
                stack.push((ri, r));
            }
        }
    }
    Ok(tree)
}

/// Exhaustive minimum tree time within `limits`, with a witness.
pub fn enumerate_min(
    params: &SvbcParams,
    w: &TimeFn,
    z: &Rational,
    limits: EnumLimits,
) -> Result<OptResult> {
    if z.is_positive() {
        let pure_depth = params
            .ell
            .is_positive()
            .then(|| (z / &params.ell).ceil_i64() as u64);
        if pure_depth.is_none_or(|d| d > limits.max_depth) {
            return Err(Error::InfeasibleWithinLimits(format!(
                "pure branching for {z} needs depth beyond {}",
                limits.max_depth
            )));
        }
    }
    let mut search = Search {
        params,
        w,
        target: z,
        limits,
        visited: 0,
    };
    let (tau, shape) = search
        .best(&Rational::zero(), 0, 0)?
        .ok_or_else(|| Error::InfeasibleWithinLimits(format!("{z} with {params}")))?;
    let tree = materialize(params, &shape)?;
    if tree.len() as u64 > limits.max_nodes {
        return Err(Error::InfeasibleWithinLimits(format!(
            "best tree has {} nodes, limit {}",
            tree.len(),
            limits.max_nodes
        )));
    }
    tree.validate()?;
    if !tree.proves_bound(z) {
        return Err(Error::Invariant(
            "enumerated tree does not prove the bound".into(),
        ));
    }
    let evaluated = tree_time(&tree, w)?;
    if evaluated != tau {
        return Err(Error::Invariant(format!(
            "search time {tau} disagrees with tree time {evaluated}"
        )));
    }
    OptResult::from_tree(tree, w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    fn int(n: i64) -> Rational {
        Rational::from_integer(n)
    }

    #[test]
    fn equal3() {
        let p = SvbcParams::constant(int(3), int(3), int(1)).unwrap();
        let limits = EnumLimits::new(4, 1000, 6).unwrap();
        let res = enumerate_min(&p, &TimeFn::ConstantOne, &int(6), limits).unwrap();
        assert_eq!(res.tau, int(6));
    }

    #[test]
    fn skewed() {
        let p = SvbcParams::constant(int(3), int(7), int(2)).unwrap();
        let w = TimeFn::affine(q(1, 2), int(1)).unwrap();
        let limits = EnumLimits::new(5, 1000, 4).unwrap();
        let res = enumerate_min(&p, &w, &int(7), limits).unwrap();
        assert_eq!(res.tau, q(13, 2));
    }

    #[test]
    fn zero_bound() {
        let p = SvbcParams::constant(int(3), int(7), int(2)).unwrap();
        let limits = EnumLimits::new(1, 1, 1).unwrap();
        let res = enumerate_min(&p, &TimeFn::ConstantOne, &int(0), limits).unwrap();
        assert_eq!(res.tau, int(1));
    }

    #[test]
    fn refuses_deep_instances() {
        let p = SvbcParams::constant(int(1), int(1), int(1)).unwrap();
        let limits = EnumLimits::new(3, 1000, 10).unwrap();
        let err = enumerate_min(&p, &TimeFn::ConstantOne, &int(4), limits).unwrap_err();
        assert!(matches!(err, Error::InfeasibleWithinLimits(_)));
    }

    #[test]
    fn node_limit() {
        let p = SvbcParams::constant(int(1), int(1), int(1)).unwrap();
        let limits = EnumLimits::new(3, 3, 3).unwrap();
        // optimum is 3 cuts + leaf = 4 nodes
        let err = enumerate_min(&p, &TimeFn::ConstantOne, &int(3), limits).unwrap_err();
        assert!(matches!(err, Error::InfeasibleWithinLimits(_)));
    }

    #[test]
    fn limits_must_be_positive() {
        assert!(EnumLimits::new(0, 1, 1).is_err());
    }
}
