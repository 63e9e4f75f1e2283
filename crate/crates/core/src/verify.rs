//! Property suites checked on concrete parameter grids.
//!
//! Every suite returns a [`CheckReport`]; the CLI `verify` command and the
//! acceptance tests both run them.

use std::fmt;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::closed_form::{
    cut_benefit_threshold, kappa, min_cut_count_lower, optimal_cuts_equal_lr, size_by_cut_count,
};
use crate::error::Result;
use crate::instances;
use crate::model::{
    build_cut_and_branch, pure_branching_tree, pure_cutting_tree, tree_time, BcTree, CutDecay,
    NodeKind, SvbcParams, TimeFn,
};
use crate::optimizer::{
    branch_nodes_with_cut_children, cut_threshold_search, min_tree_time,
    min_tree_time_root_cuts_only, optimal_prefix_cuts, pure_branch_size,
};
use crate::oracle::{enumerate_min, EnumLimits};
use crate::rational::{q, Rational};
use crate::svbwc::{
    self, approx_cut_count, approximation_factor, continuous_minimizers, f_lb, f_ub,
    harmonic_inverse, kappa_bar, size_at_depth, size_bounds, HarmonicSeq,
};

/// Slack for float comparisons against irrational bounds.
pub const FLOAT_MARGIN: f64 = 1e-9;

/// Failures kept per report; the count is always exact.
const MAX_LISTED_FAILURES: usize = 20;

#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub name: &'static str,
    pub checks: usize,
    pub failures: Vec<String>,
    pub failure_count: usize,
    pub notes: Vec<String>,
    #[serde(skip)]
    pub elapsed: Duration,
}

impl CheckReport {
    fn new(name: &'static str) -> Self {
        CheckReport {
            name,
            checks: 0,
            failures: Vec::new(),
            failure_count: 0,
            notes: Vec::new(),
            elapsed: Duration::ZERO,
        }
    }

    pub fn passed(&self) -> bool {
        self.failure_count == 0
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.fail(what());
        }
    }

    fn fail(&mut self, msg: String) {
        self.failure_count += 1;
        if self.failures.len() < MAX_LISTED_FAILURES {
            self.failures.push(msg);
        }
    }

    fn absorb(&mut self, outcome: PointOutcome) {
        self.checks += outcome.checks;
        for f in outcome.failures {
            self.fail(f);
        }
    }

    fn error(&mut self, context: &str, err: crate::error::Error) {
        self.checks += 1;
        self.fail(format!("{context}: {err}"));
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed() { "PASS" } else { "FAIL" };
        write!(
            f,
            "{status} {} ({} checks, {} failed, {:.2}s)",
            self.name,
            self.checks,
            self.failure_count,
            self.elapsed.as_secs_f64()
        )?;
        for note in &self.notes {
            write!(f, "\n    note: {note}")?;
        }
        for fail in &self.failures {
            write!(f, "\n    {fail}")?;
        }
        Ok(())
    }
}

/// Checks from one grid point, merged into a report afterwards.
#[derive(Default)]
struct PointOutcome {
    checks: usize,
    failures: Vec<String>,
}

impl PointOutcome {
    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failures.push(what());
        }
    }

    fn run(f: impl FnOnce(&mut PointOutcome) -> Result<()>, context: impl fmt::Display) -> Self {
        let mut out = PointOutcome::default();
        if let Err(e) = f(&mut out) {
            out.checks += 1;
            out.failures.push(format!("{context}: {e}"));
        }
        out
    }
}

fn timed(name: &'static str, body: impl FnOnce(&mut CheckReport)) -> CheckReport {
    let start = Instant::now();
    let mut report = CheckReport::new(name);
    body(&mut report);
    report.elapsed = start.elapsed();
    report
}

fn int(n: i64) -> Rational {
    Rational::from_integer(n)
}

/// `Z ∈ {0, 1/2, ..., max}`.
pub fn half_steps(max: i64) -> Vec<Rational> {
    (0..=2 * max).map(|i| q(i, 2)).collect()
}

/// Cut strengths `{1/3, 1/2, 1, 2, ..., r}`.
pub fn cut_strengths_up_to(r: i64) -> Vec<Rational> {
    let mut out = vec![q(1, 3), q(1, 2)];
    out.extend((1..=r).map(int));
    out
}

/// `(Z, r, c)` for `Z ∈ {0, 1/2, ..., 12}`, `r ∈ {1, 2, 3, 4}`,
/// `c ∈ {1/3, 1/2, 1, ..., r}`.
pub fn closed_form_grid() -> Vec<(Rational, Rational, Rational)> {
    let mut out = Vec::new();
    for z in half_steps(12) {
        for r in 1..=4 {
            for c in cut_strengths_up_to(r) {
                out.push((z.clone(), int(r), c));
            }
        }
    }
    out
}

/// `(Z, r, c)` for `Z ∈ {0, 1/2, ..., 8}` and `r, c ∈ {1/2, 1, 2, 3}`.
pub fn worsening_cut_grid() -> Vec<(Rational, Rational, Rational)> {
    let values = [q(1, 2), int(1), int(2), int(3)];
    let mut out = Vec::new();
    for z in half_steps(8) {
        for r in &values {
            for c in &values {
                out.push((z.clone(), r.clone(), c.clone()));
            }
        }
    }
    out
}

fn constant(ell: &Rational, r: &Rational, c: &Rational) -> SvbcParams {
    SvbcParams::constant(ell.clone(), r.clone(), c.clone()).expect("grid parameters are valid")
}

/// Equal branching `ell = r = 3`, `c = 1`, unit time, `Z = 6`.
pub fn branch_and_cut_beats_pure() -> CheckReport {
    timed(
        "branch-and-cut beats pure branching and pure cutting",
        |rep| {
            let p = constant(&int(3), &int(3), &int(1));
            let (w, z) = (TimeFn::ConstantOne, int(6));
            let run = || -> Result<_> {
                let branch = tree_time(&pure_branching_tree(&p, &z)?, &w)?;
                let cut = tree_time(&pure_cutting_tree(&p, &z)?, &w)?;
                let best = min_tree_time(&p, &w, &z)?;
                Ok((branch, cut, best))
            };
            match run() {
                Ok((branch, cut, best)) => {
                    rep.check(branch == 7, || {
                        format!("pure branching time {branch}, expected 7")
                    });
                    rep.check(cut == 7, || format!("pure cutting time {cut}, expected 7"));
                    rep.check(best.tau == 6, || {
                        format!("minimum time {}, expected 6", best.tau)
                    });
                    let witness = best.witness.expect("small tree");
                    let expected = build_cut_and_branch(&p, 3, 1);
                    rep.check(witness == expected, || {
                        "witness is not 3 root cuts + depth-1 branching".into()
                    });
                }
                Err(e) => rep.error("ell = r = 3, Z = 6", e),
            }
        },
    )
}

/// Unequal branching `ell = 3`, `r = 7`, `c = 2`, `w(z) = z/2 + 1`, `Z = 7`.
pub fn cuts_below_root() -> CheckReport {
    timed("time-minimal tree cuts below the root", |rep| {
        let p = constant(&int(3), &int(7), &int(2));
        let w = TimeFn::affine(q(1, 2), int(1)).expect("valid");
        let z = int(7);
        let run = || -> Result<_> {
            Ok((
                min_tree_time(&p, &w, &z)?,
                min_tree_time_root_cuts_only(&p, &w, &z)?,
                tree_time(&pure_cutting_tree(&p, &z)?, &w)?,
                tree_time(&pure_branching_tree(&p, &z)?, &w)?,
            ))
        };
        match run() {
            Ok((best, root_only, cut, branch)) => {
                rep.check(best.tau == q(13, 2), || {
                    format!("minimum {}, expected 13/2", best.tau)
                });
                rep.check(root_only.tau == 7, || {
                    format!("root-cuts-only minimum {}, expected 7", root_only.tau)
                });
                rep.check(cut == 10, || format!("pure cutting {cut}, expected 10"));
                rep.check(branch == 7, || {
                    format!("pure branching {branch}, expected 7")
                });
                let t = best.witness.expect("small tree");
                let root = t.node(t.root());
                let left = t.node(root.children.first().copied().unwrap_or(0));
                rep.check(
                    root.kind == NodeKind::Branch && left.kind == NodeKind::Cut,
                    || "witness does not branch first and then cut on the left".into(),
                );
                rep.check(!t.is_cut_and_branch(), || "witness cuts at the root".into());
            }
            Err(e) => rep.error("ell = 3, r = 7, Z = 7", e),
        }
    })
}

/// Closed-form cut count against exhaustion over `k` and against the DP,
/// plus the threshold results that follow from it.
pub fn cut_count_formula() -> CheckReport {
    timed("closed-form optimal cut count", |rep| {
        let outcomes: Vec<_> = closed_form_grid()
            .into_par_iter()
            .map(|(z, r, c)| {
                PointOutcome::run(
                    |out| {
                        let ctx = format!("Z={z} r={r} c={c}");
                        let ans = optimal_cuts_equal_lr(&z, &r, &c)?;
                        let k0 = kappa(&z, &r, &c, 0)?;
                        let best_scan = (0..=k0)
                            .map(|k| size_by_cut_count(&z, &r, &c, k))
                            .collect::<Result<Vec<_>>>()?
                            .into_iter()
                            .min()
                            .expect("k = 0 evaluated");
                        let formula = size_by_cut_count(&z, &r, &c, ans.k_star)?;
                        out.check(formula == best_scan, || {
                            format!(
                                "{ctx}: size(k*={}) = {formula}, scan min {best_scan}",
                                ans.k_star
                            )
                        });
                        let p = constant(&r, &r, &c);
                        let dp = min_tree_time(&p, &TimeFn::ConstantOne, &z)?;
                        out.check(dp.tau == Rational::from(formula), || {
                            format!("{ctx}: DP size {} != formula size {formula}", dp.tau)
                        });
                        out.check(Rational::from(ans.min_size_lower_bound) == dp.tau, || {
                            format!(
                                "{ctx}: size bound {} != DP size {}",
                                ans.min_size_lower_bound, dp.tau
                            )
                        });
                        let z_bar = cut_benefit_threshold(&r, &c)?;
                        if z > z_bar {
                            out.check(ans.k_star >= 1, || format!("{ctx}: no cut above {z_bar}"));
                            let need = min_cut_count_lower(&z, &z_bar, &c)?;
                            out.check(dp.num_cuts >= need, || {
                                format!("{ctx}: DP tree has {} cuts, need {need}", dp.num_cuts)
                            });
                        }
                        Ok(())
                    },
                    format!("Z={z} r={r} c={c}"),
                )
            })
            .collect();
        for o in outcomes {
            rep.absorb(o);
        }
    })
}

/// Minimal trees for small bounds carry at least `⌈(Z - Z̄)/c⌉` cuts, with
/// minimality established by exhaustive enumeration.
pub fn cut_lower_bound_by_enumeration() -> CheckReport {
    timed(
        "minimal trees above the threshold carry enough cuts",
        |rep| {
            for r in 1..=4 {
                for c in cut_strengths_up_to(r) {
                    let r = int(r);
                    for z in half_steps(6) {
                        let mut run = || -> Result<()> {
                            let z_bar = cut_benefit_threshold(&r, &c)?;
                            if z <= z_bar {
                                return Ok(());
                            }
                            let p = constant(&r, &r, &c);
                            let limits = EnumLimits::covering(&p, &z, 100_000)?;
                            let best = enumerate_min(&p, &TimeFn::ConstantOne, &z, limits)?;
                            let need = min_cut_count_lower(&z, &z_bar, &c)?;
                            rep.check(best.num_cuts >= need, || {
                                format!("Z={z} r={r} c={c}: {} cuts < {need}", best.num_cuts)
                            });
                            Ok(())
                        };
                        if let Err(e) = run() {
                            rep.error(&format!("Z={z} r={r} c={c}"), e);
                        }
                    }
                }
            }
        },
    )
}

/// Sizes for `Z = 5`, `r = 3`, `c = 1` with 0, 1, 2 root cuts.
pub fn nonmonotone_cut_effect() -> CheckReport {
    timed("tree size is not monotone in the cut count", |rep| {
        let sizes: Result<Vec<u64>> = (0..3)
            .map(|k| size_by_cut_count(&int(5), &int(3), &int(1), k))
            .collect();
        match sizes {
            Ok(s) => {
                rep.check(s == [7, 8, 5], || {
                    format!("sizes {s:?}, expected [7, 8, 5]")
                });
                rep.check(s[1] > s[0] && s[0] > s[2], || "ordering".into());
                // two cut rounds save 2^{⌈Z/r⌉} - 2
                rep.check(s[0] - s[2] == (1u64 << 2) - 2, || "reduction".into());
            }
            Err(e) => rep.error("sizes", e),
        }
    })
}

/// Harmonic number bounds for `z = 1..=max_z` and inverse bounds at
/// `samples` evenly spaced rationals in `(1, 12]`.
pub fn harmonic_bounds(max_z: u64, samples: i64) -> CheckReport {
    timed("harmonic number and inverse bounds", |rep| {
        let mut float_sum = 0.0f64;
        let mut exact = HarmonicSeq::new();
        exact.next_f64();
        for z in 1..=max_z {
            float_sum += 1.0 / z as f64;
            let hf = exact.next_f64();
            let zf = z as f64;
            rep.check((hf - float_sum).abs() < 1e-10, || {
                format!("z={z}: exact H {hf} vs float sum {float_sum}")
            });
            rep.check(hf - (zf + 1.0).ln() > FLOAT_MARGIN, || {
                format!("z={z}: H = {hf} not above ln(z+1)")
            });
            rep.check(hf <= zf.ln() + 1.0 + FLOAT_MARGIN, || {
                format!("z={z}: H = {hf} above ln z + 1")
            });
        }
        // H(1) = ln 1 + 1 holds with equality
        rep.check(svbwc::harmonic(1) == 1, || "H(1) != 1".into());
        for i in 1..=samples {
            let x = int(1) + q(11 * i, samples);
            let k = harmonic_inverse(&x);
            let xf = x.to_f64();
            let kf = k as f64;
            rep.check((xf - 1.0).exp() <= kf + FLOAT_MARGIN, || {
                format!("x={x}: H^-1 = {k} below e^(x-1)")
            });
            rep.check(kf < xf.exp() - 1.0 - FLOAT_MARGIN, || {
                format!("x={x}: H^-1 = {k} not below e^x - 1")
            });
            rep.check(
                svbwc::harmonic_at_least(k, &x) && !svbwc::harmonic_at_least(k - 1, &x),
                || format!("x={x}: {k} is not the least k with H(k) >= x"),
            );
        }
        for x in [q(1, 7), q(1, 2), int(1)] {
            rep.check(harmonic_inverse(&x) == 1, || format!("H^-1({x}) != 1"));
        }
        rep.check(harmonic_inverse(&int(0)) == 0, || "H^-1(0) != 0".into());
    })
}

/// Exact minimum cut-and-branch size for worsening cuts, `ell = r`.
fn worsening_minimum(z: &Rational, r: &Rational, c: &Rational) -> Result<crate::model::OptResult> {
    let p = SvbcParams::harmonic(r.clone(), r.clone(), c.clone())?;
    min_tree_time_root_cuts_only(&p, &TimeFn::ConstantOne, z)
}

/// Size bounds at every depth where they apply, and the distance between
/// the integer minimizers of the two bounding functions.
pub fn worsening_size_bounds() -> CheckReport {
    timed("worsening-cut size bounds and minimizers", |rep| {
        for (z, r, c) in worsening_cut_grid() {
            let ctx = format!("Z={z} r={r} c={c}");
            let run = |rep: &mut CheckReport| -> Result<()> {
                let delta_hat = ((&z - &c) / &r).floor_i64();
                for delta in 0..=delta_hat.max(-1) + 1 {
                    let delta = delta as u64;
                    let share = &z - &r * Rational::from(delta);
                    let b = size_bounds(&z, &r, &c, delta)?;
                    let size = size_at_depth(&z, &r, &c, delta)?;
                    if share > c {
                        let sf = size as f64;
                        rep.check(
                            b.lb <= sf + FLOAT_MARGIN && sf <= b.ub + FLOAT_MARGIN,
                            || format!("{ctx} d={delta}: size {size} outside [{}, {}]", b.lb, b.ub),
                        );
                    } else {
                        rep.check(b.exact == Some(size), || {
                            format!("{ctx} d={delta}: exact case {:?} != {size}", b.exact)
                        });
                    }
                }
                let m = continuous_minimizers(&z, &r, &c)?;
                rep.check(m.gap() > 0.0 && m.gap() < 1.5, || {
                    format!("{ctx}: gap {}", m.gap())
                });
                let (zf, rf, cf) = (z.to_f64(), r.to_f64(), c.to_f64());
                let argmin = |f: &dyn Fn(f64) -> f64| {
                    (0..=64u32)
                        .map(f64::from)
                        .min_by(|a, b| f(*a).total_cmp(&f(*b)))
                        .expect("nonempty")
                };
                let lo = argmin(&|d| f_lb(zf, rf, cf, d));
                let hi = argmin(&|d| f_ub(zf, rf, cf, d));
                let diff = hi - lo;
                rep.check((-1.0..=2.0).contains(&diff), || {
                    format!("{ctx}: integer minimizers {lo} (lb) and {hi} (ub)")
                });
                let rounded =
                    svbwc::round_convex_minimizer(m.upper, |d| f_ub(zf, rf, cf, d)) as f64;
                rep.check(
                    f_ub(zf, rf, cf, rounded) <= f_ub(zf, rf, cf, hi) + FLOAT_MARGIN,
                    || format!("{ctx}: rounding the real minimizer misses the integer one"),
                );
                Ok(())
            };
            if let Err(e) = run(rep) {
                rep.error(&ctx, e);
            }
        }
    })
}

/// Outcome of [`worsening_approximation`]: the report and the worst ratio of
/// the approximate size to the minimum.
pub struct ApproximationOutcome {
    pub report: CheckReport,
    pub worst_ratio: f64,
    pub worst_at: String,
}

/// Approximate cut count against the exact minimum; also checks which cut
/// counts minimal trees can use.
pub fn worsening_approximation() -> ApproximationOutcome {
    let mut worst = (0.0f64, String::new());
    let report = timed("approximate worsening-cut plan within its factor", |rep| {
        for (z, r, c) in worsening_cut_grid() {
            let ctx = format!("Z={z} r={r} c={c}");
            let mut run = |rep: &mut CheckReport| -> Result<()> {
                let plan = approx_cut_count(&z, &r, &c)?;
                let best = worsening_minimum(&z, &r, &c)?;
                let opt = best.size;
                let factor = approximation_factor(&r, &c);
                let ratio = plan.tree_size as f64 / opt as f64;
                rep.check(plan.tree_size >= opt, || {
                    format!("{ctx}: plan beats the minimum")
                });
                rep.check(ratio <= factor + FLOAT_MARGIN, || {
                    format!("{ctx}: ratio {ratio} > factor {factor}")
                });
                if ratio > worst.0 {
                    worst = (ratio, ctx.clone());
                }
                rep.check(best.tau == Rational::from(opt), || {
                    format!("{ctx}: tau != size")
                });
                // every minimal tree uses κ̄(δ) cuts for a small enough δ
                let dmax = (&z / &r).ceil_i64().max(0);
                let cap = (dmax - (&c / &r).floor_i64()).max(0) as u64;
                let mut found = false;
                for delta in 0..=cap {
                    if kappa_bar(&z, &r, &c, delta)? == best.num_cuts {
                        found = true;
                        break;
                    }
                }
                rep.check(found, || {
                    format!("{ctx}: {} cuts is not κ̄(δ) for δ <= {cap}", best.num_cuts)
                });
                let (_, _, direct) = svbwc::min_size_over_depths(&z, &r, &c)?;
                rep.check(direct == opt, || {
                    format!("{ctx}: depth scan {direct} != {opt}")
                });
                // the general DP is affordable when pure cutting is short
                let p = SvbcParams::harmonic(r.clone(), r.clone(), c.clone())?;
                if p.cuts_needed(&z).unwrap_or(0) <= 300 {
                    let dp = min_tree_time(&p, &TimeFn::ConstantOne, &z)?;
                    rep.check(dp.size == opt, || format!("{ctx}: DP {} != {opt}", dp.size));
                }
                Ok(())
            };
            if let Err(e) = run(rep) {
                rep.error(&ctx, e);
            }
        }
    });
    let mut report = report;
    report
        .notes
        .push(format!("worst ratio {:.4} at {}", worst.0, worst.1));
    ApproximationOutcome {
        report,
        worst_ratio: worst.0,
        worst_at: worst.1,
    }
}

fn branching_values_up_to(r: i64) -> Vec<Rational> {
    let mut out = vec![int(0), q(1, 2)];
    out.extend((1..=r).map(int));
    out
}

/// The full DP and the root-cuts-only search agree under unit time for
/// any `ell <= r`.
pub fn root_cuts_suffice_unit_time() -> CheckReport {
    timed("root cuts suffice for unit node time", |rep| {
        let mut points = Vec::new();
        for (z, r, c) in closed_form_grid() {
            let ri = r.floor_i64();
            for ell in branching_values_up_to(ri) {
                points.push((z.clone(), ell, r.clone(), c.clone()));
            }
        }
        let outcomes: Vec<_> = points
            .into_par_iter()
            .map(|(z, ell, r, c)| {
                let ctx = format!("Z={z} l={ell} r={r} c={c}");
                PointOutcome::run(
                    |out| {
                        let p = constant(&ell, &r, &c);
                        let full = min_tree_time(&p, &TimeFn::ConstantOne, &z)?;
                        let root = min_tree_time_root_cuts_only(&p, &TimeFn::ConstantOne, &z)?;
                        out.check(full.tau == root.tau, || {
                            format!("{ctx}: DP {} != root-only {}", full.tau, root.tau)
                        });
                        Ok(())
                    },
                    ctx.clone(),
                )
            })
            .collect();
        for o in outcomes {
            rep.absorb(o);
        }
    })
}

/// Time-functions used for the equal-branching placement checks.
pub fn placement_time_fns() -> Vec<TimeFn> {
    ["affine:1,1", "affine:1/2,1", "poly:1,0,1"]
        .iter()
        .map(|s| s.parse().expect("valid time-function"))
        .collect()
}

/// Moving `q <= k` cuts from below a branch node at cut level `z0` to above
/// it must not lower the time: `w(z0 + q) >= w(z0) + sum_{i<q} w(z0 + i)`.
fn cannot_move_cuts_up(w: &TimeFn, z0: u64, k: u64) -> Result<bool> {
    let base = w.eval(z0)?;
    let mut prefix = Rational::zero();
    for q in 1..=k {
        prefix = prefix + w.eval(z0 + q - 1)?;
        if w.eval(z0 + q)? < &base + &prefix {
            return Ok(false);
        }
    }
    Ok(true)
}

/// With `ell = r`, the full DP matches the root-cuts-only optimum for
/// growing time-functions, its witness is symmetric, and no branch node
/// has cut paths below it that would be cheaper at the top.
pub fn root_cuts_suffice_equal_branching() -> CheckReport {
    timed(
        "root cuts suffice when both branches improve equally",
        |rep| {
            let mut points = Vec::new();
            for (z, r, c) in closed_form_grid() {
                for w in placement_time_fns() {
                    points.push((z.clone(), r.clone(), c.clone(), w));
                }
            }
            let outcomes: Vec<_> = points
            .into_par_iter()
            .map(|(z, r, c, w)| {
                let ctx = format!("Z={z} r={r} c={c} w={w}");
                PointOutcome::run(
                    |out| {
                        let p = constant(&r, &r, &c);
                        let full = min_tree_time(&p, &w, &z)?;
                        let root = min_tree_time_root_cuts_only(&p, &w, &z)?;
                        out.check(full.tau == root.tau, || {
                            format!("{ctx}: DP {} != root-only {}", full.tau, root.tau)
                        });
                        let t = full.witness.as_ref().expect("small tree");
                        out.check(t.is_cut_symmetric(), || format!("{ctx}: asymmetric witness"));
                        out.check(tree_time(t, &w)? == full.tau, || {
                            format!("{ctx}: witness time differs")
                        });
                        out.check(t.proves_bound(&z), || format!("{ctx}: witness fails bound"));
                        for (id, k) in branch_nodes_with_cut_children(t) {
                            let z0 = t.node(id).cuts_on_path;
                            out.check(cannot_move_cuts_up(&w, z0, k)?, || {
                                format!("{ctx}: cuts under branch node {id} would be cheaper above it")
                            });
                        }
                        Ok(())
                    },
                    ctx.clone(),
                )
            })
            .collect();
            for o in outcomes {
                rep.absorb(o);
            }
        },
    )
}

/// For `ell < r` the full DP is never worse than root cuts only.
pub fn dp_never_worse_than_root_cuts() -> CheckReport {
    timed("DP optimum never exceeds root-cuts-only optimum", |rep| {
        let ws = placement_time_fns();
        for z in half_steps(8) {
            for (ell, r) in [
                (int(1), int(2)),
                (int(1), int(3)),
                (int(3), int(7)),
                (q(1, 2), int(2)),
            ] {
                for c in [q(1, 2), int(1), int(2)] {
                    for w in &ws {
                        let p = constant(&ell, &r, &c);
                        match (
                            min_tree_time(&p, w, &z),
                            min_tree_time_root_cuts_only(&p, w, &z),
                        ) {
                            (Ok(a), Ok(b)) => rep.check(a.tau <= b.tau, || {
                                format!("Z={z} l={ell} r={r} c={c} w={w}: {} > {}", a.tau, b.tau)
                            }),
                            (Err(e), _) | (_, Err(e)) => rep.error(&format!("Z={z}"), e),
                        }
                    }
                }
            }
        }
    })
}

/// A small random instance whose pure branching proof has depth at most 5.
#[derive(Debug, Clone)]
pub struct SmallInstance {
    pub params: SvbcParams,
    pub w: TimeFn,
    pub z: Rational,
}

pub fn random_small_instances(count: usize, seed: u64) -> Vec<SmallInstance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ells = [q(1, 2), int(1), q(3, 2), int(2), int(3)];
    let extra = [int(0), int(0), q(1, 2), int(1), int(2), int(4)];
    let cuts = [q(1, 3), q(1, 2), int(1), q(3, 2), int(2), int(3)];
    let ws = [
        TimeFn::ConstantOne,
        TimeFn::affine(q(1, 2), int(1)).expect("valid"),
        TimeFn::polynomial(vec![int(1), int(0), int(1)]).expect("valid"),
    ];
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let ell = ells.choose(&mut rng).expect("nonempty").clone();
        let r = &ell + extra.choose(&mut rng).expect("nonempty");
        let c = cuts.choose(&mut rng).expect("nonempty").clone();
        let decay = if rng.gen_bool(0.5) {
            CutDecay::Constant
        } else {
            CutDecay::Harmonic
        };
        let z = q(rng.gen_range(1..=16), 2);
        let params = SvbcParams::new(ell, r, c, decay).expect("valid by construction");
        let depth = (&z / &params.ell).ceil_i64();
        let cut_len = params.cuts_needed(&z).unwrap_or(u64::MAX);
        if depth > 5 || cut_len > 10 {
            continue;
        }
        let w = ws[out.len() % ws.len()].clone();
        out.push(SmallInstance { params, w, z });
    }
    out
}

/// DP against brute-force enumeration on random small instances.
pub fn oracle_agreement(count: usize, seed: u64) -> CheckReport {
    timed("DP agrees with brute-force enumeration", |rep| {
        let instances = random_small_instances(count, seed);
        let decays: std::collections::BTreeSet<_> = instances
            .iter()
            .map(|i| i.params.decay.to_string())
            .collect();
        rep.notes.push(format!(
            "{} instances, decays {:?}",
            instances.len(),
            decays
        ));
        for inst in instances {
            let ctx = format!("Z={} {} w={}", inst.z, inst.params, inst.w);
            let run = || -> Result<_> {
                let limits = EnumLimits::covering(&inst.params, &inst.z, 1_000_000)?;
                Ok((
                    min_tree_time(&inst.params, &inst.w, &inst.z)?,
                    enumerate_min(&inst.params, &inst.w, &inst.z, limits)?,
                ))
            };
            match run() {
                Ok((dp, brute)) => {
                    rep.check(dp.tau == brute.tau, || {
                        format!("{ctx}: DP {} != enumeration {}", dp.tau, brute.tau)
                    });
                    let t = dp.witness.as_ref().expect("small tree");
                    rep.check(t.validate().is_ok() && t.proves_bound(&inst.z), || {
                        format!("{ctx}: invalid DP witness")
                    });
                    rep.check(tree_time(t, &inst.w).ok() == Some(dp.tau.clone()), || {
                        format!("{ctx}: DP witness time differs")
                    });
                }
                Err(e) => rep.error(&ctx, e),
            }
        }
    })
}

/// Disjoint triangles for `m = 1..=max_m`.
pub fn triangle_family(max_m: u64) -> CheckReport {
    timed("disjoint triangles: cuts give exponential savings", |rep| {
        for m in 1..=max_m {
            let run = || -> Result<_> {
                let plan = instances::optimal_plan(m)?;
                let size = instances::optimal_size(m)?;
                let (p, z) = instances::derive_model(m)?;
                let dp = min_tree_time(&p, &TimeFn::ConstantOne, &z)?;
                let branch = pure_branch_size(&p, &z).expect("ell > 0");
                Ok((plan, size, dp, branch))
            };
            match run() {
                Ok((plan, size, dp, branch)) => {
                    rep.check(plan.k_star == m, || format!("m={m}: k* = {}", plan.k_star));
                    rep.check(size == m + 1, || format!("m={m}: optimal size {size}"));
                    rep.check(dp.tau == Rational::from(m + 1), || {
                        format!("m={m}: DP size {}", dp.tau)
                    });
                    let expected = (1u64 << (m + 1)) - 1;
                    rep.check(branch == expected, || {
                        format!("m={m}: pure branching {branch}, expected {expected}")
                    });
                    rep.check(
                        instances::pure_branch_size(m).ok() == Some(expected),
                        || format!("m={m}: formula pure branching size"),
                    );
                }
                Err(e) => rep.error(&format!("m={m}"), e),
            }
        }
        rep.notes
            .push("optimal size is m + 1: m cuts and one leaf".into());
    })
}

/// Growing polynomial node time eventually forces cuts; a steep enough
/// linear node time makes pure branching optimal.
pub fn polynomial_time_threshold() -> CheckReport {
    timed(
        "cuts pay off for large bounds under polynomial node time",
        |rep| {
            let unit = constant(&int(1), &int(1), &int(1));
            let w = TimeFn::affine(int(1), int(1)).expect("valid");
            match cut_threshold_search(&unit, &w, &int(10), &int(1)) {
                Ok(found) => {
                    rep.check(found.as_ref().is_some_and(|z| *z <= 10), || {
                        format!("threshold {found:?}, expected a value <= 10")
                    });
                    if let Some(z) = found {
                        rep.notes
                            .push(format!("threshold for w(z) = z + 1 is Z = {z}"));
                    }
                }
                Err(e) => rep.error("threshold search", e),
            }
            let z = int(4);
            let run = || -> Result<_> {
                let s_bar = pure_branch_size(&unit, &z).expect("ell > 0");
                let steep = TimeFn::affine(Rational::from(s_bar), int(1))?;
                let best = min_tree_time(&unit, &steep, &z)?;
                Ok((s_bar, best))
            };
            match run() {
                Ok((s_bar, best)) => {
                    rep.check(best.tau == Rational::from(s_bar), || {
                        format!("steep time: optimum {} != pure branching {s_bar}", best.tau)
                    });
                    rep.check(best.num_cuts == 0, || "steep time: optimum has cuts".into());
                    let expected = pure_branching_tree(&unit, &z).expect("ell > 0");
                    rep.check(best.witness.as_ref() == Some(&expected), || {
                        "steep time: witness is not the pure branching tree".into()
                    });
                }
                Err(e) => rep.error("steep time", e),
            }
        },
    )
}

/// Explicit trees with `t` cuts before the first branch and `k - t` below
/// each child, compared with the closed-form placement rule.
pub fn prefix_cut_placement() -> CheckReport {
    timed(
        "placement of a fixed cut budget around the first branch",
        |rep| {
            let p = constant(&int(1), &int(1), &int(1));
            let mut ws = placement_time_fns();
            ws.push(TimeFn::ConstantOne);
            ws.push("affine:4,1".parse().expect("valid"));
            ws.push("table:1,1,3,3,10,10,10".parse().expect("valid"));
            for w in &ws {
                for k in 0..=6u64 {
                    let run = || -> Result<(u64, u64)> {
                        let mut best: Option<(Rational, u64)> = None;
                        for t in 0..=k {
                            let mut tree = BcTree::new(p.clone());
                            let mut at = tree.root();
                            for _ in 0..t {
                                at = tree.cut(at)?;
                            }
                            let (l, r) = tree.branch(at)?;
                            for mut id in [l, r] {
                                for _ in t..k {
                                    id = tree.cut(id)?;
                                }
                            }
                            let tau = tree_time(&tree, w)?;
                            if best.as_ref().is_none_or(|b| tau < b.0) {
                                best = Some((tau, t));
                            }
                        }
                        Ok((best.expect("t = 0").1, optimal_prefix_cuts(w, k)?))
                    };
                    match run() {
                        Ok((brute, rule)) => rep.check(brute == rule, || {
                            format!("w={w} k={k}: explicit trees pick t={brute}, rule picks {rule}")
                        }),
                        Err(e) => rep.error(&format!("w={w} k={k}"), e),
                    }
                }
            }
        },
    )
}

/// Seed for the random instances of [`oracle_agreement`].
pub const DEFAULT_SEED: u64 = 0x5eed;

/// Every suite with its default size.
pub fn run_all() -> Vec<CheckReport> {
    run_all_with_seed(DEFAULT_SEED)
}

pub fn run_all_with_seed(seed: u64) -> Vec<CheckReport> {
    vec![
        branch_and_cut_beats_pure(),
        cuts_below_root(),
        cut_count_formula(),
        cut_lower_bound_by_enumeration(),
        nonmonotone_cut_effect(),
        harmonic_bounds(10_000, 200),
        worsening_size_bounds(),
        worsening_approximation().report,
        root_cuts_suffice_unit_time(),
        root_cuts_suffice_equal_branching(),
        dp_never_worse_than_root_cuts(),
        oracle_agreement(50, seed),
        triangle_family(12),
        polynomial_time_threshold(),
        prefix_cut_placement(),
    ]
}
