//! The `abc-tree` command line.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use crate::closed_form::{optimal_cuts, CutCountAnswer};
use crate::error::{Error, Result};
use crate::instances::{self, TriangleInstance};
use crate::model::{build_cut_and_branch, CutDecay, OptResult, SvbcParams, TimeFn};
use crate::optimizer::{min_tree_time, min_tree_time_root_cuts_only};
use crate::rational::Rational;
use crate::svbwc::{approx_cut_count, approximation_factor, SvbwcPlan};
use crate::verify;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Text,
    Csv,
    Dot,
    Json,
}

#[derive(Debug, Parser)]
#[command(
    name = "abc-tree",
    version,
    about = "Minimum branch-and-cut trees in an abstract model"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

impl Cli {
    pub fn into_config(self) -> RunConfig {
        RunConfig {
            command: self.command,
            output: self.out,
            format: self.format,
        }
    }
}

/// Model parameters shared by most subcommands.
#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    /// Left branch improvement; defaults to `--r`.
    #[arg(long = "l")]
    pub ell: Option<Rational>,
    /// Right branch improvement.
    #[arg(long)]
    pub r: Rational,
    /// Cut strength (of the first cut, when decaying).
    #[arg(long)]
    pub c: Rational,
    /// Bound to prove.
    #[arg(long = "Z")]
    pub z: Rational,
    /// Node time: one, affine:a,1, poly:1,c1,..., table:1,v1,...
    #[arg(long, default_value = "one")]
    pub w: TimeFn,
    #[arg(long, default_value = "constant")]
    pub decay: CutDecay,
}

impl ModelArgs {
    pub fn params(&self) -> Result<SvbcParams> {
        let ell = self.ell.clone().unwrap_or_else(|| self.r.clone());
        SvbcParams::new(ell, self.r.clone(), self.c.clone(), self.decay)
    }
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Optimal root cut count for constant cuts, equal branching, unit time.
    Optcuts(ModelArgs),
    /// Minimum tree time by exact DP.
    Mintree {
        #[command(flatten)]
        model: ModelArgs,
        /// Also solve with all cuts forced to the root.
        #[arg(long)]
        compare_root_only: bool,
    },
    /// Approximate cut count for harmonically decaying cuts.
    Svbwc {
        #[arg(long)]
        r: Rational,
        #[arg(long)]
        c: Rational,
        #[arg(long = "Z")]
        z: Rational,
    },
    /// DP and root-cuts-only optimum over a parameter grid, as CSV.
    Sweep(SweepArgs),
    /// Run the property suites; exits nonzero if any fails.
    Verify {
        /// Seed for the random instances checked against enumeration.
        #[arg(long, default_value_t = verify::DEFAULT_SEED)]
        seed: u64,
    },
    /// Report for `m` disjoint triangles.
    Example {
        #[arg(long, default_value_t = 4)]
        m: u64,
    },
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    /// Comma-separated left branch values; defaults to each `r`.
    #[arg(long = "l", value_delimiter = ',')]
    pub ell: Vec<Rational>,
    #[arg(long, value_delimiter = ',', required = true)]
    pub r: Vec<Rational>,
    #[arg(long, value_delimiter = ',', required = true)]
    pub c: Vec<Rational>,
    /// Largest bound; the grid runs `step, 2 step, ..., Z`.
    #[arg(long = "Z")]
    pub z_max: Rational,
    #[arg(long, default_value = "1/2")]
    pub step: Rational,
    /// Time-functions, separated by `;`.
    #[arg(long, value_delimiter = ';', default_value = "one")]
    pub w: Vec<TimeFn>,
    #[arg(long, value_delimiter = ',', default_value = "constant")]
    pub decay: Vec<CutDecay>,
}

/// One parsed invocation.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    pub output: Option<PathBuf>,
    pub format: Format,
}

/// Executes `config`, writes its artifact and returns the exit status.
pub fn run(config: &RunConfig) -> Result<u8> {
    let (text, status) = render(config)?;
    match &config.output {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(status)
}

/// The artifact for `config` and the exit status it implies.
pub fn render(config: &RunConfig) -> Result<(String, u8)> {
    let fmt = config.format;
    match &config.command {
        Command::Optcuts(m) => optcuts(m, fmt).map(|s| (s, 0)),
        Command::Mintree {
            model,
            compare_root_only,
        } => mintree(model, *compare_root_only, fmt).map(|s| (s, 0)),
        Command::Svbwc { r, c, z } => svbwc_cmd(r, c, z, fmt).map(|s| (s, 0)),
        Command::Sweep(args) => sweep(args, fmt).map(|s| (s, 0)),
        Command::Verify { seed } => Ok(verify_cmd(*seed, fmt)),
        Command::Example { m } => example(*m, fmt).map(|s| (s, 0)),
    }
}

fn json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Error::Io(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn csv_of<T: Serialize>(rows: &[T]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row).map_err(|e| Error::Io(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
}

fn unsupported(command: &str, fmt: Format) -> Error {
    Error::Parameter(format!("{command} has no {fmt:?} output"))
}

#[derive(Serialize)]
struct OptCutsRow<'a> {
    ell: &'a Rational,
    r: &'a Rational,
    c: &'a Rational,
    #[serde(rename = "Z")]
    z: &'a Rational,
    k_star: u64,
    case: String,
    size_lower_bound: u64,
    delta_star: u64,
    branch_depth: u64,
}

fn optcuts(m: &ModelArgs, fmt: Format) -> Result<String> {
    let params = m.params()?;
    let ans: CutCountAnswer = optimal_cuts(&params, &m.z)?;
    match fmt {
        Format::Text => Ok(format!(
            "k*={} size>={}\ncase={} delta*={} branch-depth={}\n",
            ans.k_star, ans.min_size_lower_bound, ans.case_taken, ans.delta_star, ans.branch_depth
        )),
        Format::Json => json(&ans),
        Format::Csv => csv_of(&[OptCutsRow {
            ell: &params.ell,
            r: &params.r,
            c: &params.c,
            z: &m.z,
            k_star: ans.k_star,
            case: ans.case_taken.to_string(),
            size_lower_bound: ans.min_size_lower_bound,
            delta_star: ans.delta_star,
            branch_depth: ans.branch_depth,
        }]),
        Format::Dot => Ok(build_cut_and_branch(&params, ans.k_star, ans.branch_depth).to_dot()),
    }
}

#[derive(Serialize)]
struct MinTreeReport<'a> {
    optimum: &'a OptResult,
    #[serde(skip_serializing_if = "Option::is_none")]
    root_only_tau: Option<&'a Rational>,
}

#[derive(Serialize)]
struct MinTreeRow<'a> {
    tau: &'a Rational,
    size: u64,
    cuts: u64,
    branch_depth: u64,
    root_only_tau: Option<&'a Rational>,
}

fn mintree(m: &ModelArgs, compare: bool, fmt: Format) -> Result<String> {
    let params = m.params()?;
    let best = min_tree_time(&params, &m.w, &m.z)?;
    let root_only = if compare {
        Some(min_tree_time_root_cuts_only(&params, &m.w, &m.z)?)
    } else {
        None
    };
    let root_tau = root_only.as_ref().map(|r| &r.tau);
    match fmt {
        Format::Text => {
            let mut s = format!("tau={}", best.tau);
            if let Some(t) = root_tau {
                write!(s, " root-only={t}").expect("string write");
            }
            writeln!(
                s,
                "\nsize={} cuts={} branch-depth={}",
                best.size, best.num_cuts, best.branch_depth
            )
            .expect("string write");
            Ok(s)
        }
        Format::Json => json(&MinTreeReport {
            optimum: &best,
            root_only_tau: root_tau,
        }),
        Format::Csv => csv_of(&[MinTreeRow {
            tau: &best.tau,
            size: best.size,
            cuts: best.num_cuts,
            branch_depth: best.branch_depth,
            root_only_tau: root_tau,
        }]),
        Format::Dot => best.witness.as_ref().map(|t| t.to_dot()).ok_or_else(|| {
            Error::Tree(format!(
                "optimal tree has {} nodes, too many to export",
                best.size
            ))
        }),
    }
}

fn svbwc_cmd(r: &Rational, c: &Rational, z: &Rational, fmt: Format) -> Result<String> {
    let plan: SvbwcPlan = approx_cut_count(z, r, c)?;
    match fmt {
        Format::Text => {
            let mut s = String::from("delta  cuts  size\n");
            for cand in &plan.candidates {
                writeln!(s, "{:>5} {:>5} {:>5}", cand.delta, cand.cuts, cand.size)
                    .expect("string write");
            }
            writeln!(
                s,
                "chosen delta={} cuts={} size={} (factor bound {:.4})",
                plan.chosen_delta,
                plan.num_cuts,
                plan.tree_size,
                approximation_factor(r, c)
            )
            .expect("string write");
            Ok(s)
        }
        Format::Json => json(&plan),
        Format::Csv => csv_of(&plan.candidates),
        Format::Dot => Err(unsupported("svbwc", fmt)),
    }
}

/// One sweep row; field order is the CSV column order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct SweepRow {
    pub ell: Rational,
    pub r: Rational,
    pub c: Rational,
    pub decay: String,
    #[serde(rename = "Z")]
    pub z: Rational,
    pub w: String,
    /// Empty when the closed form does not apply.
    pub k_star: Option<u64>,
    pub case: Option<String>,
    pub dp_tau: Rational,
    pub dp_size: u64,
    pub dp_cuts: u64,
    pub root_only_tau: Rational,
    pub ratio: Rational,
}

fn sweep_point(params: SvbcParams, w: &TimeFn, z: Rational) -> Result<SweepRow> {
    let closed = (params.equal_branching()
        && params.decay == CutDecay::Constant
        && params.c.is_positive()
        && params.c <= params.r
        && *w == TimeFn::ConstantOne)
        .then(|| optimal_cuts(&params, &z))
        .transpose()?;
    let dp = min_tree_time(&params, w, &z)?;
    let root = min_tree_time_root_cuts_only(&params, w, &z)?;
    let ratio = &root.tau / &dp.tau;
    Ok(SweepRow {
        decay: params.decay.to_string(),
        w: w.to_string(),
        k_star: closed.as_ref().map(|a| a.k_star),
        case: closed.as_ref().map(|a| a.case_taken.to_string()),
        dp_tau: dp.tau,
        dp_size: dp.size,
        dp_cuts: dp.num_cuts,
        root_only_tau: root.tau,
        ratio,
        ell: params.ell,
        r: params.r,
        c: params.c,
        z,
    })
}

/// Evaluates the sweep grid; rows come back sorted.
pub fn sweep_rows(args: &SweepArgs) -> Result<Vec<SweepRow>> {
    if !args.step.is_positive() {
        return Err(Error::Parameter(format!(
            "step = {} must be > 0",
            args.step
        )));
    }
    let n = (&args.z_max / &args.step).floor_i64().max(0);
    let mut points = Vec::new();
    for r in &args.r {
        let ells = if args.ell.is_empty() {
            vec![r.clone()]
        } else {
            args.ell.iter().filter(|l| *l <= r).cloned().collect()
        };
        for ell in ells {
            for c in &args.c {
                for &decay in &args.decay {
                    let params = SvbcParams::new(ell.clone(), r.clone(), c.clone(), decay)?;
                    for w in &args.w {
                        for i in 1..=n {
                            points.push((
                                params.clone(),
                                w,
                                &args.step * Rational::from_integer(i),
                            ));
                        }
                    }
                }
            }
        }
    }
    let mut rows = points
        .into_par_iter()
        .map(|(p, w, z)| sweep_point(p, w, z))
        .collect::<Result<Vec<_>>>()?;
    rows.sort();
    Ok(rows)
}

fn sweep(args: &SweepArgs, fmt: Format) -> Result<String> {
    let rows = sweep_rows(args)?;
    match fmt {
        Format::Text | Format::Csv => csv_of(&rows),
        Format::Json => json(&rows),
        Format::Dot => Err(unsupported("sweep", fmt)),
    }
}

fn verify_cmd(seed: u64, fmt: Format) -> (String, u8) {
    let reports = verify::run_all_with_seed(seed);
    let failed = reports.iter().filter(|r| !r.passed()).count();
    let status = u8::from(failed > 0);
    let text = match fmt {
        Format::Json => json(&reports).unwrap_or_default(),
        _ => {
            let mut s = String::new();
            for r in &reports {
                writeln!(s, "{r}").expect("string write");
            }
            writeln!(
                s,
                "{} suites, {} passed, {failed} failed",
                reports.len(),
                reports.len() - failed
            )
            .expect("string write");
            s
        }
    };
    (text, status)
}

#[derive(Serialize)]
struct ExampleReport {
    instance: TriangleInstance,
    params: SvbcParams,
    bound: Rational,
    k_star: u64,
    optimal_size: u64,
    pure_branch_size: u64,
}

fn example(m: u64, fmt: Format) -> Result<String> {
    let instance = TriangleInstance::new(m)?;
    let (params, bound) = instances::derive_model(m)?;
    let plan = instances::optimal_plan(m)?;
    let report = ExampleReport {
        optimal_size: instances::optimal_size(m)?,
        pure_branch_size: instances::pure_branch_size(m)?,
        k_star: plan.k_star,
        instance,
        params,
        bound,
    };
    match fmt {
        Format::Text => Ok(format!(
            "{m} disjoint triangles: LP {} IP {} gap {}\nmodel {} Z={}\nk*={} optimal size={} pure branching size={}\n",
            report.instance.lp_value,
            report.instance.ip_value,
            report.instance.gap,
            report.params,
            report.bound,
            report.k_star,
            report.optimal_size,
            report.pure_branch_size
        )),
        Format::Json => json(&report),
        Format::Csv => Err(unsupported("example", fmt)),
        Format::Dot => Ok(build_cut_and_branch(&report.params, plan.k_star, plan.branch_depth).to_dot()),
    }
}
