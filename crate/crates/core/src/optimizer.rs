//! Exact tree-time minimization.
//!
//! The optimal subtree below a node depends only on the bound still to be
//! proved there and on the number of cuts above it, so the search memoizes
//! on `(residual, cuts_used)`:
//!
//! ```text
//! T(g, z) = w(z)                                        if g <= 0
//! T(g, z) = w(z) + min( T(g - gain(z), z + 1),          cut
//!                       T(g - ell, z) + T(g - r, z) )   branch
//! ```
//!
//! Branching is skipped when `ell = 0`: the left child would face the same
//! state as its parent, so such a branch never beats the left subtree alone.

use std::collections::{BTreeSet, HashMap};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{
    build_cuts_then_branching, BcTree, CutDecay, NodeKind, OptResult, SvbcParams, TimeCache, TimeFn,
};
use crate::rational::Rational;
use crate::svbwc;

pub const DEFAULT_MAX_STATES: usize = 10_000_000;

/// Env var overriding [`DEFAULT_MAX_STATES`].
pub const MAX_STATES_ENV: &str = "ABC_TREE_MAX_STATES";

/// Witness trees are only materialized up to this many nodes.
pub const WITNESS_NODE_LIMIT: u64 = 1_000_000;

/// Harmonic witnesses carry exact gap labels; past this many cuts on a path
/// the labels get too large to be worth building.
const HARMONIC_WITNESS_CUT_LIMIT: u64 = 4096;

pub fn max_states_from_env() -> usize {
    std::env::var(MAX_STATES_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_MAX_STATES)
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct DpState {
    pub residual: Rational,
    pub cuts_used: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Choice {
    Leaf,
    Cut,
    Branch,
}

#[derive(Debug, Clone)]
struct Entry {
    tau: Rational,
    choice: Choice,
    size: u64,
    cuts: u64,
    depth: u64,
}

fn check_provable(params: &SvbcParams, z: &Rational) -> Result<()> {
    if z.is_positive() && params.c.is_zero() && !params.ell.is_positive() {
        return Err(Error::Unprovable(format!(
            "Z = {z} with {params}: neither cuts nor the left branch improve the bound"
        )));
    }
    Ok(())
}

struct Dp<'a> {
    params: &'a SvbcParams,
    times: TimeCache<'a>,
    memo: HashMap<DpState, Entry>,
    max_states: usize,
}

impl<'a> Dp<'a> {
    fn cut_child(&self, s: &DpState) -> Option<DpState> {
        if self.params.c.is_zero() {
            return None;
        }
        Some(DpState {
            residual: &s.residual - self.params.cut_gain(s.cuts_used),
            cuts_used: s.cuts_used + 1,
        })
    }

    fn branch_children(&self, s: &DpState) -> Option<(DpState, DpState)> {
        if !self.params.ell.is_positive() {
            return None;
        }
        let left = DpState {
            residual: &s.residual - &self.params.ell,
            cuts_used: s.cuts_used,
        };
        let right = DpState {
            residual: &s.residual - &self.params.r,
            cuts_used: s.cuts_used,
        };
        Some((left, right))
    }

    fn solve(&mut self, root: &DpState) -> Result<()> {
        let mut stack = vec![(root.clone(), false)];
        while let Some((s, expanded)) = stack.pop() {
            if self.memo.contains_key(&s) {
                continue;
            }
            if self.memo.len() >= self.max_states {
                return Err(Error::StateLimit(self.max_states));
            }
            let node_time = self.times.get(s.cuts_used)?.clone();
            if !s.residual.is_positive() {
                self.memo.insert(
                    s,
                    Entry {
                        tau: node_time,
                        choice: Choice::Leaf,
                        size: 1,
                        cuts: 0,
                        depth: 0,
                    },
                );
                continue;
            }
            let cut = self.cut_child(&s);
            let branch = self.branch_children(&s);
            if !expanded {
                stack.push((s.clone(), true));
                let pending = cut
                    .into_iter()
                    .chain(branch.into_iter().flat_map(|(l, r)| [l, r]))
                    .filter(|child| !self.memo.contains_key(child));
                for child in pending.collect::<Vec<_>>() {
                    stack.push((child, false));
                }
                continue;
            }
            let mut best: Option<Entry> = cut.map(|child| {
                let e = &self.memo[&child];
                Entry {
                    tau: &node_time + &e.tau,
                    choice: Choice::Cut,
                    size: e.size + 1,
                    cuts: e.cuts + 1,
                    depth: e.depth,
                }
            });
            if let Some((l, r)) = branch {
                let (el, er) = (&self.memo[&l], &self.memo[&r]);
                let tau = &node_time + &el.tau + &er.tau;
                // cuts win ties
                if best.as_ref().is_none_or(|b| tau < b.tau) {
                    best = Some(Entry {
                        tau,
                        choice: Choice::Branch,
                        size: el.size + er.size + 1,
                        cuts: el.cuts + er.cuts,
                        depth: el.depth.max(er.depth) + 1,
                    });
                }
            }
            let entry = best.ok_or_else(|| {
                Error::Unprovable(format!("residual {} with {}", s.residual, self.params))
            })?;
            self.memo.insert(s, entry);
        }
        Ok(())
    }

    fn witness(&self, root: &DpState) -> Result<BcTree> {
        let mut tree = BcTree::new(self.params.clone());
        let mut queue = vec![(tree.root(), root.clone())];
        while let Some((id, s)) = queue.pop() {
            match self.memo[&s].choice {
                Choice::Leaf => {}
                Choice::Cut => {
                    let child = tree.cut(id)?;
                    let next = self.cut_child(&s).expect("cut was chosen");
                    queue.push((child, next));
                }
                Choice::Branch => {
                    let (l, r) = tree.branch(id)?;
                    let (ls, rs) = self.branch_children(&s).expect("branch was chosen");
                    queue.push((l, ls));
                    queue.push((r, rs));
                }
            }
        }
        Ok(tree)
    }
}

/// Minimum tree time over all trees proving `z`, with a witness.
pub fn min_tree_time(params: &SvbcParams, w: &TimeFn, z: &Rational) -> Result<OptResult> {
    min_tree_time_with_limit(params, w, z, max_states_from_env())
}

pub fn min_tree_time_with_limit(
    params: &SvbcParams,
    w: &TimeFn,
    z: &Rational,
    max_states: usize,
) -> Result<OptResult> {
    check_provable(params, z)?;
    let mut dp = Dp {
        params,
        times: TimeCache::new(w),
        memo: HashMap::new(),
        max_states,
    };
    let root = DpState {
        residual: z.clone(),
        cuts_used: 0,
    };
    dp.solve(&root)?;
    let top = dp.memo[&root].clone();
    let witness = if top.size <= WITNESS_NODE_LIMIT {
        Some(dp.witness(&root)?)
    } else {
        None
    };
    Ok(OptResult {
        tau: top.tau,
        size: top.size,
        num_cuts: top.cuts,
        branch_depth: top.depth,
        witness,
    })
}

/// Size of the pure branching tree for residual `g`; `None` when `ell = 0`
/// and `g > 0`.
pub fn pure_branch_size(params: &SvbcParams, g: &Rational) -> Option<u64> {
    fn go(params: &SvbcParams, g: &Rational, memo: &mut HashMap<Rational, u64>) -> u64 {
        if !g.is_positive() {
            return 1;
        }
        if let Some(&n) = memo.get(g) {
            return n;
        }
        let n = 1 + go(params, &(g - &params.ell), memo) + go(params, &(g - &params.r), memo);
        memo.insert(g.clone(), n);
        n
    }
    if g.is_positive() && !params.ell.is_positive() {
        return None;
    }
    Some(go(params, g, &mut HashMap::new()))
}

/// Distinct offsets `a ell + b r` in `(0, z)`, sorted. The pure branching
/// size is constant for residuals between consecutive offsets.
fn branch_offsets(params: &SvbcParams, z: &Rational) -> Vec<Rational> {
    let mut out = BTreeSet::new();
    if !params.ell.is_positive() {
        return Vec::new();
    }
    let mut a_part = Rational::zero();
    while a_part < *z {
        let mut total = a_part.clone();
        while total < *z {
            if total.is_positive() {
                out.insert(total.clone());
            }
            total += &params.r;
        }
        a_part += &params.ell;
    }
    out.into_iter().collect()
}

/// Minimum tree time over cut-and-branch trees: `k` root cuts followed by
/// pure branching, minimized over `k`.
///
/// Only the smallest `k` reaching each constant piece of the pure branching
/// size needs checking, since the time is increasing in `k` within a piece.
/// That keeps the search cheap even when the optimal cut count is in the
/// millions.
pub fn min_tree_time_root_cuts_only(
    params: &SvbcParams,
    w: &TimeFn,
    z: &Rational,
) -> Result<OptResult> {
    check_provable(params, z)?;
    let mut times = TimeCache::new(w);
    if !z.is_positive() {
        return OptResult::from_tree(BcTree::new(params.clone()), w);
    }
    // piece boundaries: residual <= 0, then each offset below z
    let mut levels = vec![Rational::zero()];
    levels.extend(branch_offsets(params, z));

    let mut candidates: BTreeSet<u64> = BTreeSet::new();
    if params.ell.is_positive() {
        candidates.insert(0);
    }
    for t in &levels {
        if let Some(k) = params.cuts_needed(&(z - t)) {
            candidates.insert(k);
        }
    }

    let mut best: Option<(Rational, u64, u64, u64)> = None;
    for k in candidates {
        // smallest level the residual after k cuts does not exceed; the
        // predicate is monotone in the level
        let exact_total = (params.decay == CutDecay::Constant || k <= svbwc::EXACT_LIMIT)
            .then(|| params.cut_total(k));
        let reaches = |t: &Rational| match &exact_total {
            Some(total) => *total >= z - t,
            None => params.cut_total_at_least(k, &(z - t)),
        };
        let level = levels.get(levels.partition_point(|t| !reaches(t)));
        let (size, depth) = match level {
            Some(t) => {
                let depth = if t.is_positive() {
                    (t / &params.ell).ceil_i64() as u64
                } else {
                    0
                };
                (
                    pure_branch_size(params, t).expect("ell > 0 at positive levels"),
                    depth,
                )
            }
            None => match pure_branch_size(params, z) {
                Some(n) => (n, (z / &params.ell).ceil_i64() as u64),
                None => continue,
            },
        };
        let tau = times.prefix_sum(k)? + times.get(k)? * Rational::from(size);
        if best.as_ref().is_none_or(|b| tau < b.0) {
            best = Some((tau, k, size, depth));
        }
    }
    let (tau, k, branch_size, depth) =
        best.ok_or_else(|| Error::Unprovable(format!("{z} with {params}")))?;
    let size = k + branch_size;
    let buildable = size <= WITNESS_NODE_LIMIT
        && (params.decay == CutDecay::Constant || k <= HARMONIC_WITNESS_CUT_LIMIT);
    let witness = if buildable {
        Some(build_cuts_then_branching(params, k, z)?)
    } else {
        None
    };
    Ok(OptResult {
        tau,
        size,
        num_cuts: k,
        branch_depth: depth,
        witness,
    })
}

/// Smallest minimizer of `w(t) - sum_{i<t} w(i)` over `0 <= t <= k`: how many
/// of `k` cuts per path to place before the first branch.
pub fn optimal_prefix_cuts(w: &TimeFn, k: u64) -> Result<u64> {
    let mut times = TimeCache::new(w);
    let mut prefix = Rational::zero();
    let mut best: Option<(Rational, u64)> = None;
    for t in 0..=k {
        let wt = times.get(t)?.clone();
        let objective = &wt - &prefix;
        if best.as_ref().is_none_or(|b| objective < b.0) {
            best = Some((objective, t));
        }
        prefix = prefix + wt;
    }
    Ok(best.expect("t = 0 always evaluated").1)
}

/// Whether every minimum-time tree proving `z` contains a cut: the optimum
/// beats the best cut-free tree, which is the pure branching tree.
pub fn cuts_required(params: &SvbcParams, w: &TimeFn, z: &Rational) -> Result<bool> {
    let best = min_tree_time(params, w, z)?;
    Ok(match pure_branch_size(params, z) {
        // pure branching nodes all have z = 0, so time = size
        Some(size) => best.tau < Rational::from(size),
        None => true,
    })
}

/// Scans `Z = step, 2 step, ..., z_max` and returns the first grid point from
/// which on every minimum-time tree contains a cut. `None` when the last grid
/// point still admits a cut-free optimum.
pub fn cut_threshold_search(
    params: &SvbcParams,
    w: &TimeFn,
    z_max: &Rational,
    step: &Rational,
) -> Result<Option<Rational>> {
    if matches!(w, TimeFn::Table(_)) {
        return Err(Error::TimeFn(
            "threshold search needs a polynomially bounded time-function, not a table".into(),
        ));
    }
    if !step.is_positive() {
        return Err(Error::Parameter(format!("step = {step} must be > 0")));
    }
    let n = (z_max / step).floor_i64().max(0) as u64;
    let mut threshold = None;
    for i in 1..=n {
        let z = step * Rational::from(i);
        if cuts_required(params, w, &z)? {
            threshold.get_or_insert(z);
        } else {
            threshold = None;
        }
    }
    Ok(threshold)
}

/// Branch nodes of `tree` whose children both start a path of cuts, with
/// the length of the shorter path.
pub fn branch_nodes_with_cut_children(tree: &BcTree) -> Vec<(usize, u64)> {
    let run = |mut id: usize| {
        let mut k = 0;
        while tree.node(id).kind == NodeKind::Cut {
            k += 1;
            id = tree.node(id).children[0];
        }
        k
    };
    tree.nodes()
        .iter()
        .enumerate()
        .filter(|(_, n)| n.kind == NodeKind::Branch)
        .filter_map(|(id, n)| {
            let k = run(n.children[0]).min(run(n.children[1]));
            (k > 0).then_some((id, k))
        })
        .collect()
}
