//! The `equiload` command line: every operation over the JSON instance format.
//!
//! Exit codes: 0 on success, 1 when a check is violated or a program is
//! infeasible, 2 on usage, input or parse errors.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::io::{Read, Write};
use std::ops::RangeInclusive;
use std::path::PathBuf;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use equiload_core::instance::validate_instance;
use equiload_core::integral::{enumerate_integral_with_cap, DEFAULT_CAP};
use equiload_core::io::{
    assignment_to_json, instance_to_json, loads_to_json, parse_assignment, parse_instance, AnyAssignment,
};
use equiload_core::lp::{self, LpStatus, Objective};
use equiload_core::tree::{bfs_tree, default_root, equalize_connected, fix_loads, RootedTreeView, TreePolicy};
use equiload_core::verify::{self, GenParams, TheoremKind, Verdict};
use equiload_core::{evaluate_loads, Assignment, BipartiteInstance, Rational, Scalar};

#[derive(Debug, Parser)]
#[command(name = "equiload", version, about = "Equal and balanced loads on bipartite task/worker graphs")]
struct Cli {
    /// Write the JSON result here instead of standard output.
    #[arg(long, global = true, value_name = "FILE")]
    output: Option<PathBuf>,
    /// Print version, timing and a timestamp to standard error.
    #[arg(long, global = true)]
    meta: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check an instance against every structural invariant.
    Validate { input: Option<PathBuf> },
    /// Solve one of the linear programs exactly.
    Solve {
        #[arg(long, value_enum)]
        objective: ObjectiveArg,
        input: Option<PathBuf>,
    },
    /// Equalize all worker loads along a spanning tree.
    Equalize {
        /// Starting assignment; defaults to the tree solution with zero loads.
        #[arg(long, value_name = "FILE")]
        start: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = TreeArg::Bfs)]
        tree: TreeArg,
        /// Comma-separated edge keys `task:worker`, required with `--tree given`.
        #[arg(long, value_name = "KEYS", value_delimiter = ',')]
        tree_edges: Vec<String>,
        #[arg(long, default_value_t = verify::GENERAL_TOL)]
        tol: f64,
        input: Option<PathBuf>,
    },
    /// Enumerate the integer feasible points.
    Enumerate {
        /// Include the (lmax, lmin) Pareto frontier.
        #[arg(long)]
        pareto: bool,
        /// Stream every point as one JSON line instead of the summary.
        #[arg(long)]
        dump: bool,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: u128,
        input: Option<PathBuf>,
    },
    /// Check a theorem on seeded random instances, or on one given instance.
    Verify {
        #[arg(long, value_enum)]
        theorem: TheoremArg,
        /// Inclusive seed range `a..b`, or a single seed.
        #[arg(long, value_parser = parse_seeds, default_value = "1..500")]
        seeds: RangeInclusive<u64>,
        /// Starting assignment for thm2 on a given instance.
        #[arg(long, value_name = "FILE")]
        start: Option<PathBuf>,
        #[arg(long, default_value_t = verify::GENERAL_TOL)]
        tol: f64,
        input: Option<PathBuf>,
    },
    /// Generate a random instance.
    Gen {
        #[arg(long, value_name = "FILE")]
        params: PathBuf,
        /// Overrides the seed in the parameter file.
        #[arg(long)]
        seed: Option<u64>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ObjectiveArg {
    MinMax,
    MaxMin,
    MinSpread,
    EqualFeas,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TreeArg {
    Bfs,
    Given,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum TheoremArg {
    Prop1,
    Thm1,
    Thm2,
}

fn parse_seeds(s: &str) -> Result<RangeInclusive<u64>, String> {
    let bad = || format!("expected a seed or a range a..b, got {s:?}");
    match s.split_once("..") {
        Some((a, b)) => {
            let a: u64 = a.trim().parse().map_err(|_| bad())?;
            let b: u64 = b.trim().trim_start_matches('=').parse().map_err(|_| bad())?;
            if a > b {
                return Err(format!("empty seed range {s:?}"));
            }
            Ok(a..=b)
        }
        None => {
            let a: u64 = s.trim().parse().map_err(|_| bad())?;
            Ok(a..=a)
        }
    }
}

/// A failure that maps to an exit code.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

fn usage(message: impl Into<String>) -> Failure {
    Failure { code: 2, message: message.into() }
}

/// What a subcommand produced: the canonical payload, or raw lines.
enum Output {
    Json(Value, i32),
    Lines(Vec<String>),
}

/// Runs the command line `argv` (program name first).
pub fn run<I, S>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    0
                }
                _ => {
                    let _ = write!(err, "{}", e.render());
                    2
                }
            };
        }
    };
    let started = Instant::now();
    let subcommand = subcommand_name(&cli.command);
    let result = dispatch(cli.command);
    let code = match result {
        Ok(output) => {
            let (text, code) = match output {
                Output::Json(v, code) => {
                    let mut text = serde_json::to_string_pretty(&v).expect("JSON value serializes");
                    text.push('\n');
                    (text, code)
                }
                Output::Lines(lines) => (lines.iter().map(|l| format!("{l}\n")).collect(), 0),
            };
            match &cli.output {
                Some(path) => {
                    if let Err(e) = fs::write(path, text) {
                        let _ = writeln!(err, "error: cannot write {}: {e}", path.display());
                        return 2;
                    }
                }
                None => {
                    let _ = out.write_all(text.as_bytes());
                }
            }
            code
        }
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    };
    if cli.meta {
        let stamp = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        let meta = json!({
            "tool": "equiload",
            "version": env!("CARGO_PKG_VERSION"),
            "subcommand": subcommand,
            "elapsed_ms": started.elapsed().as_secs_f64() * 1e3,
            "unix_time": stamp,
            "exit_code": code,
        });
        let _ = writeln!(err, "{meta}");
    }
    code
}

fn subcommand_name(c: &Command) -> &'static str {
    match c {
        Command::Validate { .. } => "validate",
        Command::Solve { .. } => "solve",
        Command::Equalize { .. } => "equalize",
        Command::Enumerate { .. } => "enumerate",
        Command::Verify { .. } => "verify",
        Command::Gen { .. } => "gen",
    }
}

fn dispatch(command: Command) -> Result<Output, Failure> {
    match command {
        Command::Validate { input } => validate(input),
        Command::Solve { objective, input } => solve(objective, input),
        Command::Equalize { start, tree, tree_edges, tol, input } => equalize(input, start, tree, tree_edges, tol),
        Command::Enumerate { pareto, dump, cap, input } => enumerate(input, pareto, dump, cap),
        Command::Verify { theorem, seeds, start, tol, input } => verify_cmd(theorem, seeds, start, tol, input),
        Command::Gen { params, seed } => gen(params, seed),
    }
}

fn read_text(path: Option<&PathBuf>) -> Result<(String, String), Failure> {
    match path {
        Some(p) if p.as_os_str() != "-" => fs::read_to_string(p)
            .map(|t| (t, p.display().to_string()))
            .map_err(|e| usage(format!("cannot read {}: {e}", p.display()))),
        _ => {
            let mut text = String::new();
            std::io::stdin()
                .read_to_string(&mut text)
                .map_err(|e| usage(format!("cannot read standard input: {e}")))?;
            Ok((text, "<stdin>".into()))
        }
    }
}

fn load_instance(path: Option<&PathBuf>) -> Result<BipartiteInstance, Failure> {
    let (text, name) = read_text(path)?;
    parse_instance(&text).map_err(|e| usage(format!("{name}: {e}")))
}

fn load_assignment(inst: &BipartiteInstance, path: &PathBuf) -> Result<AnyAssignment, Failure> {
    let (text, name) = read_text(Some(path))?;
    parse_assignment(inst, &text).map_err(|e| usage(format!("{name}: {e}")))
}

fn validate(input: Option<PathBuf>) -> Result<Output, Failure> {
    let inst = load_instance(input.as_ref())?;
    let report = validate_instance(&inst);
    let code = if report.is_ok() { 0 } else { 1 };
    Ok(Output::Json(
        json!({
            "valid": report.is_ok(),
            "mode": inst.mode(),
            "tasks": inst.num_tasks(),
            "workers": inst.num_workers(),
            "edges": inst.num_edges(),
            "linear": inst.is_linear(),
            "connected": inst.is_connected(),
            "violations": report.violations,
        }),
        code,
    ))
}

fn solve(objective: ObjectiveArg, input: Option<PathBuf>) -> Result<Output, Failure> {
    let inst = load_instance(input.as_ref())?;
    let objective = match objective {
        ObjectiveArg::MinMax => Objective::MinLmax,
        ObjectiveArg::MaxMin => Objective::MaxLmin,
        ObjectiveArg::MinSpread => Objective::MinSpread,
        ObjectiveArg::EqualFeas => Objective::EqualFeas,
    };
    let r = lp::solve(&inst, objective, &Rational::from_integer(0.into())).map_err(|e| usage(e.to_string()))?;
    let mut payload = json!({
        "status": r.status,
        "objective": objective.to_string(),
        "exact": true,
        "value": r.value.as_ref().map(|v| v.to_string()),
        "assignment": Value::Null,
        "loads": Value::Null,
    });
    if let Some(x) = &r.assignment {
        payload["assignment"] = assignment_to_json(&inst, x);
        let loads = evaluate_loads(&inst, x).expect("solver output matches the instance");
        payload["loads"] = loads_to_json(&inst, &loads);
    }
    // a negative answer to the feasibility question is still an answer
    let code = match (r.status, objective) {
        (LpStatus::Optimal, _) | (LpStatus::Infeasible, Objective::EqualFeas) => 0,
        _ => 1,
    };
    Ok(Output::Json(payload, code))
}

/// Non-tree edges at zero, every non-root load at zero.
fn default_start<T: Scalar>(inst: &BipartiteInstance) -> Result<Assignment<T>, Failure> {
    let root = default_root(inst).ok_or_else(|| usage("instance has no workers"))?;
    let tree = bfs_tree(inst, root).ok_or_else(|| usage("instance is not connected"))?;
    let view = RootedTreeView::new(inst, tree, root, Assignment::zeros(inst)).map_err(|e| usage(e.to_string()))?;
    let targets: BTreeMap<_, _> = inst.worker_ids().map(|w| (w, T::zero())).collect();
    fix_loads(&view, &targets, 0.0).map_err(|e| usage(e.to_string()))
}

fn equalize(
    input: Option<PathBuf>,
    start: Option<PathBuf>,
    tree: TreeArg,
    tree_edges: Vec<String>,
    tol: f64,
) -> Result<Output, Failure> {
    let inst = load_instance(input.as_ref())?;
    let policy = match tree {
        TreeArg::Bfs if tree_edges.is_empty() => TreePolicy::Bfs,
        TreeArg::Bfs => return Err(usage("--tree-edges requires --tree given")),
        TreeArg::Given => {
            if tree_edges.is_empty() {
                return Err(usage("--tree given requires --tree-edges"));
            }
            let edges = tree_edges
                .iter()
                .map(|k| inst.edge_by_key(k.trim()).ok_or_else(|| usage(format!("--tree-edges: unknown edge {k:?}"))))
                .collect::<Result<Vec<_>, _>>()?;
            TreePolicy::Given(edges)
        }
    };
    let start = match &start {
        Some(p) => Some(load_assignment(&inst, p)?),
        None => None,
    };
    match start {
        Some(AnyAssignment::Exact(x)) if inst.is_linear() => equalize_with(&inst, &x, &policy, tol),
        Some(any) => equalize_with(&inst, &any.to_f64(), &policy, tol),
        None if inst.is_linear() => equalize_with(&inst, &default_start::<Rational>(&inst)?, &policy, tol),
        None => equalize_with(&inst, &default_start::<f64>(&inst)?, &policy, tol),
    }
}

fn equalize_with<T: Scalar>(
    inst: &BipartiteInstance,
    x0: &Assignment<T>,
    policy: &TreePolicy,
    tol: f64,
) -> Result<Output, Failure> {
    let before = evaluate_loads(inst, x0).map_err(|e| usage(e.to_string()))?;
    let out = equalize_connected(inst, x0, policy, tol).map_err(|e| Failure { code: 1, message: e.to_string() })?;
    let after = evaluate_loads(inst, &out.x).expect("equalized point matches the instance");
    Ok(Output::Json(
        json!({
            "exact": T::is_exact(),
            "lambda": out.lambda.to_canonical_string(),
            "improved": out.improved,
            "warn_negative": out.warn_negative,
            "root": inst.workers()[out.root.0],
            "tree": out.tree.iter().map(|&e| inst.edge_key(e)).collect::<Vec<_>>(),
            "start": { "lmin": before.lmin.to_canonical_string(), "lmax": before.lmax.to_canonical_string() },
            "assignment": assignment_to_json(inst, &out.x),
            "loads": loads_to_json(inst, &after),
        }),
        0,
    ))
}

fn enumerate(input: Option<PathBuf>, pareto: bool, dump: bool, cap: u128) -> Result<Output, Failure> {
    let inst = load_instance(input.as_ref())?;
    let set = enumerate_integral_with_cap(&inst, cap).map_err(|e| usage(e.to_string()))?;
    if dump {
        let lines = set
            .iter()
            .map(|x| serde_json::to_string(&assignment_to_json(&inst, &x)).expect("JSON value serializes"))
            .collect();
        return Ok(Output::Lines(lines));
    }
    if set.is_empty() {
        return Ok(Output::Json(json!({ "count": 0 }), 1));
    }
    let err = |e: equiload_core::integral::IntegralError| usage(e.to_string());
    let summary = set.summary().map_err(err)?;
    let lmax = set.min_lmax().map_err(err)?;
    let spread = set.min_spread().map_err(err)?;
    let witness_loads = evaluate_loads(&inst, &spread.witness).expect("enumerated point matches the instance");
    let mut payload = json!({
        "count": summary.count.to_string(),
        "edges": inst.edge_ids().map(|e| inst.edge_key(e)).collect::<Vec<_>>(),
        "min_lmax": lmax.value.to_string(),
        "argmin_count": lmax.argmin_count,
        "argmin": lmax.argmin.as_ref().map(|xs| xs.iter().map(|x| assignment_to_json(&inst, x)).collect::<Vec<_>>()),
        "min_spread_among_argmin": lmax.min_spread_among_argmin.to_string(),
        "max_lmin": summary.max_lmin.to_string(),
        "min_spread": spread.value.to_string(),
        "min_spread_witness": {
            "assignment": assignment_to_json(&inst, &spread.witness),
            "loads": loads_to_json(&inst, &witness_loads),
        },
    });
    if pareto {
        payload["pareto"] =
            summary.pareto.iter().map(|p| json!({ "lmax": p.lmax.to_string(), "lmin": p.lmin.to_string() })).collect();
    }
    Ok(Output::Json(payload, 0))
}

fn verify_cmd(
    theorem: TheoremArg,
    seeds: RangeInclusive<u64>,
    start: Option<PathBuf>,
    tol: f64,
    input: Option<PathBuf>,
) -> Result<Output, Failure> {
    let kind = match theorem {
        TheoremArg::Prop1 => TheoremKind::Prop1,
        TheoremArg::Thm1 => TheoremKind::Thm1,
        TheoremArg::Thm2 => TheoremKind::Thm2,
    };
    let fail = |e: verify::VerifyError| usage(e.to_string());
    let reports = match input {
        Some(path) => {
            let inst = load_instance(Some(&path))?;
            let report = match kind {
                TheoremKind::Prop1 => verify::check_prop1(&inst).map_err(fail)?,
                TheoremKind::Thm1 => verify::check_theorem1(&inst).map_err(fail)?,
                TheoremKind::Thm2 => match start.as_ref().map(|p| load_assignment(&inst, p)).transpose()? {
                    Some(AnyAssignment::Exact(x)) if inst.is_linear() => verify::check_theorem2(&inst, &x, tol),
                    Some(any) => verify::check_theorem2(&inst, &any.to_f64(), tol),
                    None => {
                        verify::check_theorem2(&inst, &verify::random_start(&inst, *seeds.start()).map_err(fail)?, tol)
                    }
                }
                .map_err(fail)?,
            };
            vec![report]
        }
        None => {
            if start.is_some() {
                return Err(usage("--start needs an instance file"));
            }
            if tol != verify::GENERAL_TOL {
                return Err(usage("--tol applies to a given instance only; suites use 1e-9"));
            }
            let (a, b) = (*seeds.start(), *seeds.end());
            let end = b.checked_add(1).ok_or_else(|| usage("--seeds: range end too large"))?;
            verify::run_suite(kind, a..end).map_err(fail)?
        }
    };
    let summary = verify::summarize(&reports);
    let code = if summary.violated > 0 { 1 } else { 0 };
    let violated: Vec<_> = reports.iter().filter(|r| r.verdict == Verdict::Violated).filter_map(|r| r.seed).collect();
    Ok(Output::Json(
        json!({
            "theorem": kind,
            "summary": summary,
            "violated_seeds": violated,
            "reports": reports,
        }),
        code,
    ))
}

fn gen(params: PathBuf, seed: Option<u64>) -> Result<Output, Failure> {
    let (text, name) = read_text(Some(&params))?;
    let mut p: GenParams = serde_json::from_str(&text)
        .map_err(|e| usage(format!("{name}: parse error at line {}, column {}: {e}", e.line(), e.column())))?;
    if let Some(s) = seed {
        p.seed = s;
    }
    let inst = verify::gen_random_instance(&p).map_err(|e| usage(e.to_string()))?;
    Ok(Output::Json(instance_to_json(&inst), 0))
}
