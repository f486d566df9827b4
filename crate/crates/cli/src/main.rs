use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use graphcurv::curvature::{
    curvature_at, curvature_bruteforce, curvature_function, Dimension, VertexCurvature,
};
use graphcurv::generate::{generate, random_function, Family};
use graphcurv::graph::{MeasureKind, MeasurePolicy, VertexSubset, WeightedGraph};
use graphcurv::harness::{buser_check, cheeger_lower_bound_check, edge_indicator_bound_check};
use graphcurv::isoperimetry::{
    cheeger_finite_exact, cheeger_subset, cheeger_sweep, IsoperimetricResult,
};
use graphcurv::metric::{canonical_intrinsic_metric, dgg_check};
use graphcurv::operators::VertexFunction;
use graphcurv::report::{CheckReport, Relation, Status, DEFAULT_TOL};
use graphcurv::semigroup::{
    heat_apply, mass_conservation_residual, pseudo_poincare_check, semigroup_identities,
    HeatOptions,
};
use graphcurv::spectral::{
    lambda1_finite_with, lambda_bottom_dirichlet_with, Solver, SolverChoice,
};
use graphcurv::suite::{run_suite, SuiteConfig};

#[derive(Parser)]
#[command(
    name = "graphcurv",
    version,
    about = "Curvature, isoperimetry and heat-semigroup checks on weighted graphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a graph file and validate its structure.
    Validate {
        #[arg(long)]
        graph: PathBuf,
    },
    /// Write a graph from a built-in family.
    Generate {
        #[arg(long)]
        family: String,
        /// Family parameters, e.g. `d=2,r=3`.
        #[arg(long, default_value = "")]
        params: String,
        #[arg(long, default_value = "normalized")]
        measure: String,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Per-vertex curvature-dimension constants.
    Curvature {
        #[command(flatten)]
        input: GraphInput,
        /// Dimension n, a positive number or `inf`.
        #[arg(long, default_value = "inf")]
        dim: Dimension,
        /// Restrict to one vertex label.
        #[arg(long)]
        vertex: Option<String>,
        /// Also run the random-restart minimization oracle.
        #[arg(long)]
        oracle: bool,
        #[arg(long)]
        json: bool,
    },
    /// Cheeger constant of the graph, or of a subset when `--subset` is given.
    Cheeger {
        #[command(flatten)]
        input: GraphInput,
        #[arg(long)]
        subset: Option<PathBuf>,
        #[arg(long, conflicts_with = "sweep")]
        exact: bool,
        /// Spectral sweep upper bound.
        #[arg(long)]
        sweep: bool,
    },
    /// Spectral gap, or the Dirichlet bottom eigenvalue of a subset.
    Spectrum {
        #[command(flatten)]
        input: GraphInput,
        #[arg(long)]
        dirichlet: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = SolverArg::Auto)]
        solver: SolverArg,
    },
    /// Apply the heat semigroup to a function.
    Heat {
        #[command(flatten)]
        input: GraphInput,
        /// Function file: a JSON array or an object keyed by vertex label.
        #[arg(long)]
        f: PathBuf,
        #[arg(long)]
        t: f64,
        #[arg(long)]
        dirichlet: Option<PathBuf>,
    },
    /// Evaluate one inequality check.
    Check {
        #[arg(value_enum)]
        kind: CheckArg,
        #[command(flatten)]
        input: GraphInput,
        #[command(flatten)]
        opts: CheckOpts,
        #[arg(long)]
        json: bool,
    },
    /// Run a verification suite. Exit code 1 when a non-skipped check fails.
    Suite {
        /// JSON config; the default suite runs when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct GraphInput {
    #[arg(long)]
    graph: PathBuf,
    /// Override the measure named in the graph file.
    #[arg(long)]
    measure: Option<String>,
}

#[derive(Args)]
struct CheckOpts {
    /// Subset file: Ω for buser and dgg, U for indicator-bound.
    #[arg(long)]
    subset: Option<PathBuf>,
    #[arg(long, default_value = "inf")]
    dim: Dimension,
    #[arg(long, default_value_t = 1.0)]
    t: f64,
    #[arg(long, default_value_t = 0.5)]
    s: f64,
    #[arg(long)]
    f: Option<PathBuf>,
    #[arg(long)]
    h: Option<PathBuf>,
    /// Source set for dgg.
    #[arg(long)]
    a: Option<PathBuf>,
    /// Target set for dgg.
    #[arg(long)]
    b: Option<PathBuf>,
    /// Seed for functions that are not given explicitly.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum SolverArg {
    Auto,
    Dense,
    Lanczos,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CheckArg {
    Buser,
    CheegerBound,
    PseudoPoincare,
    Semigroup,
    Dgg,
    IndicatorBound,
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write_or_print(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => {
            fs::write(p, format!("{text}\n")).with_context(|| format!("writing {}", p.display()))
        }
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("serializable")
}

fn load_graph(input: &GraphInput) -> Result<WeightedGraph> {
    let text = read(&input.graph)?;
    let g = match &input.measure {
        None => WeightedGraph::from_json(&text)?,
        Some(name) => WeightedGraph::from_json_with(&text, MeasurePolicy::parse(name)?.kind())?,
    };
    Ok(g)
}

fn load_subset(g: &WeightedGraph, path: &Path) -> Result<VertexSubset> {
    let labels: Vec<String> = serde_json::from_str(&read(path)?)
        .with_context(|| format!("{}: expected a JSON array of vertex labels", path.display()))?;
    Ok(VertexSubset::from_labels(g, &labels)?)
}

fn load_function(g: &WeightedGraph, path: &Path) -> Result<Vec<f64>> {
    let value: Value = serde_json::from_str(&read(path)?)
        .with_context(|| format!("parsing {}", path.display()))?;
    match value {
        Value::Array(items) => {
            if items.len() != g.num_vertices() {
                bail!(
                    "{}: {} values for {} vertices",
                    path.display(),
                    items.len(),
                    g.num_vertices()
                );
            }
            items
                .iter()
                .map(|v| {
                    v.as_f64()
                        .with_context(|| format!("{}: non-numeric value {v}", path.display()))
                })
                .collect()
        }
        Value::Object(map) => {
            let mut f = vec![0.0; g.num_vertices()];
            for (label, v) in map {
                let x = g.index_of(&label)?;
                f[x] = v.as_f64().with_context(|| {
                    format!("{}: non-numeric value for {label}", path.display())
                })?;
            }
            Ok(f)
        }
        _ => bail!(
            "{}: expected an array or an object of numbers",
            path.display()
        ),
    }
}

fn labelled(g: &WeightedGraph, f: &[f64]) -> BTreeMap<String, f64> {
    (0..g.num_vertices())
        .map(|x| (g.label(x).to_string(), f[x]))
        .collect()
}

fn iso_json(g: &WeightedGraph, r: &IsoperimetricResult) -> Value {
    json!({
        "value": r.value,
        "subset": r.subset.labels(g),
        "method": r.method,
        "iterations": r.iterations,
    })
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Validate { graph } => {
            let g = WeightedGraph::from_json(&read(&graph)?)?;
            println!(
                "{}",
                pretty(&json!({
                    "valid": true,
                    "vertices": g.num_vertices(),
                    "edges": g.num_edges(),
                    "measure": g.measure_kind(),
                    "digest": g.digest(),
                }))
            );
        }
        Command::Generate {
            family,
            params,
            measure,
            out,
        } => {
            let fam = Family::parse(&family, &params)?;
            let g = generate(fam, MeasurePolicy::parse(&measure)?)?;
            write_or_print(out.as_deref(), &g.to_json())?;
        }
        Command::Curvature {
            input,
            dim,
            vertex,
            oracle,
            json,
        } => {
            let g = load_graph(&input)?;
            let rows: Vec<VertexCurvature> = match vertex {
                Some(label) => vec![curvature_at(&g, g.index_of(&label)?, dim)?],
                None => curvature_function(&g, dim)?.vertices,
            };
            let oracle_values = if oracle {
                Some(
                    rows.iter()
                        .map(|r| curvature_bruteforce(&g, r.vertex, dim, 64, 0))
                        .collect::<graphcurv::Result<Vec<f64>>>()?,
                )
            } else {
                None
            };
            if json {
                let entries: Vec<Value> = rows
                    .iter()
                    .enumerate()
                    .map(|(i, r)| {
                        let mut e = json!({
                            "vertex": g.label(r.vertex),
                            "k": r.k,
                            "witness": labelled(&g, &r.witness.0),
                            "witness_slack": r.witness_slack,
                        });
                        if let Some(o) = &oracle_values {
                            e["oracle"] = json!(o[i]);
                            e["oracle_gap"] = json!(o[i] - r.k);
                        }
                        e
                    })
                    .collect();
                let global = rows.iter().map(|r| r.k).fold(f64::INFINITY, f64::min);
                println!(
                    "{}",
                    pretty(
                        &json!({ "n": dim.to_string(), "global_k": global, "vertices": entries })
                    )
                );
            } else {
                let width = rows
                    .iter()
                    .map(|r| g.label(r.vertex).len())
                    .max()
                    .unwrap_or(6)
                    .max(6);
                match &oracle_values {
                    Some(_) => println!(
                        "{:<width$}  {:>22}  {:>22}  {:>10}",
                        "vertex", "K", "oracle", "gap"
                    ),
                    None => println!("{:<width$}  {:>22}", "vertex", "K"),
                }
                for (i, r) in rows.iter().enumerate() {
                    let label = g.label(r.vertex);
                    match &oracle_values {
                        Some(o) => println!(
                            "{label:<width$}  {:>22.15e}  {:>22.15e}  {:>10.2e}",
                            r.k,
                            o[i],
                            o[i] - r.k
                        ),
                        None => println!("{label:<width$}  {:>22.15e}", r.k),
                    }
                }
            }
        }
        Command::Cheeger {
            input,
            subset,
            exact,
            sweep,
        } => {
            let g = load_graph(&input)?;
            let r = match (subset, sweep) {
                (Some(p), false) => cheeger_subset(&g, &load_subset(&g, &p)?)?,
                (Some(_), true) => bail!("--sweep applies to the finite Cheeger constant only"),
                (None, true) => cheeger_sweep(&g)?,
                (None, false) => {
                    let _ = exact;
                    cheeger_finite_exact(&g)?
                }
            };
            println!("{}", pretty(&iso_json(&g, &r)));
        }
        Command::Spectrum {
            input,
            dirichlet,
            solver,
        } => {
            let g = load_graph(&input)?;
            let choice = match solver {
                SolverArg::Auto => SolverChoice::Auto,
                SolverArg::Dense => SolverChoice::Force(Solver::Dense),
                SolverArg::Lanczos => SolverChoice::Force(Solver::Lanczos),
            };
            let (kind, r) = match dirichlet {
                Some(p) => (
                    "dirichlet_bottom",
                    lambda_bottom_dirichlet_with(&g, &load_subset(&g, &p)?, choice)?,
                ),
                None => ("lambda1", lambda1_finite_with(&g, choice)?),
            };
            println!(
                "{}",
                pretty(&json!({
                    "quantity": kind,
                    "eigenvalue": r.eigenvalue,
                    "solver": r.solver,
                    "residual": r.residual,
                    "eigenvector": labelled(&g, &r.eigenvector.0),
                }))
            );
        }
        Command::Heat {
            input,
            f,
            t,
            dirichlet,
        } => {
            let g = load_graph(&input)?;
            let f = load_function(&g, &f)?;
            let mut opts = HeatOptions::auto(&g, t);
            if let Some(p) = dirichlet {
                opts = opts.dirichlet(load_subset(&g, &p)?);
            }
            let u = heat_apply(&g, &f, &opts)?;
            println!(
                "{}",
                pretty(&json!({ "t": t, "values": labelled(&g, &u.0) }))
            );
        }
        Command::Check {
            kind,
            input,
            opts,
            json,
        } => {
            let g = load_graph(&input)?;
            let report = run_check(&g, kind, &opts)?;
            if json {
                println!("{}", pretty(&serde_json::to_value(&report)?));
            } else {
                println!(
                    "{} {}: lhs={:.17e} {} rhs={:.17e} margin={:.3e} [{:?}]",
                    report.check,
                    report.graph,
                    report.lhs,
                    if report.relation == Relation::AtMost {
                        "<="
                    } else {
                        ">="
                    },
                    report.rhs,
                    report.margin,
                    report.status,
                );
            }
            if report.status.is_failure() {
                return Ok(ExitCode::from(1));
            }
        }
        Command::Suite { config, out } => {
            let cfg = match config {
                Some(p) => SuiteConfig::from_json(&read(&p)?)?,
                None => SuiteConfig::default(),
            };
            let report = run_suite(&cfg)?;
            write_or_print(out.as_deref(), &report.to_json())?;
            for (check, s) in &report.summary {
                eprintln!(
                    "{check:<22} total {:>4}  pass {:>4}  fail {:>3}  skipped {:>3}  expected-fail {:>3}  worst margin {}",
                    s.total, s.passed, s.failed, s.skipped, s.expected_fail, s.worst_margin
                );
            }
            eprintln!(
                "{} failure(s) in {:.1} s",
                report.failures,
                report.total_ms / 1e3
            );
            if report.failed() {
                return Ok(ExitCode::from(1));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn function_or_random(g: &WeightedGraph, path: Option<&PathBuf>, seed: u64) -> Result<Vec<f64>> {
    match path {
        Some(p) => load_function(g, p),
        None => Ok(random_function(g.num_vertices(), seed)),
    }
}

fn run_check(g: &WeightedGraph, kind: CheckArg, opts: &CheckOpts) -> Result<CheckReport> {
    let subset = opts
        .subset
        .as_deref()
        .map(|p| load_subset(g, p))
        .transpose()?;
    let report = match kind {
        CheckArg::Buser => {
            let omega = subset.unwrap_or_else(|| VertexSubset::all(g));
            buser_check(g, &omega, opts.dim)?
        }
        CheckArg::CheegerBound => cheeger_lower_bound_check(g)?,
        CheckArg::IndicatorBound => {
            let u = subset.context("indicator-bound needs --subset")?;
            edge_indicator_bound_check(g, &u)?
        }
        CheckArg::PseudoPoincare => {
            let f = function_or_random(g, opts.f.as_ref(), opts.seed)?;
            let k = curvature_function(g, Dimension::INFINITE)?.global_k;
            pseudo_poincare_check(g, &f, opts.t, k)?
        }
        CheckArg::Semigroup => {
            let f = function_or_random(g, opts.f.as_ref(), opts.seed)?;
            let h = function_or_random(g, opts.h.as_ref(), opts.seed.wrapping_add(1))?;
            let ident = semigroup_identities(g, &f, &h, opts.t, opts.s)?;
            let l1: f64 = (0..g.num_vertices()).map(|x| g.m(x) * f[x].abs()).sum();
            let mass = mass_conservation_residual(g, &f, opts.t, None)?.abs() / l1.max(1.0);
            CheckReport::new(
                "semigroup",
                g,
                Relation::AtMost,
                ident.max_residual().max(mass),
                0.0,
                DEFAULT_TOL,
                "P_t identities and Σ m P_t f = Σ m f",
            )
            .with_extra("identities", serde_json::to_value(ident)?)
            .with_extra("mass", mass)
        }
        CheckArg::Dgg => {
            let a = load_subset(g, opts.a.as_deref().context("dgg needs --a")?)?;
            let b = load_subset(g, opts.b.as_deref().context("dgg needs --b")?)?;
            let f = match &opts.f {
                Some(p) => load_function(g, p)?,
                None => VertexFunction::indicator(&a).0,
            };
            let h = match &opts.h {
                Some(p) => load_function(g, p)?,
                None => VertexFunction::indicator(&b).0,
            };
            let metric = canonical_intrinsic_metric(g)?;
            let lambda = match &subset {
                Some(o) => graphcurv::spectral::lambda_bottom_dirichlet(g, o)?.eigenvalue,
                None => 0.0,
            };
            dgg_check(g, &metric, &a, &b, &f, &h, opts.t, lambda, subset.as_ref())?
        }
    };
    let name = input_name(g);
    let mut report = report.param("t", opts.t);
    if report.graph.is_empty() {
        report = report.on_graph(name);
    }
    if report.status == Status::Skipped {
        report.pass = false;
    }
    Ok(report)
}

fn input_name(g: &WeightedGraph) -> String {
    let kind = match g.measure_kind() {
        MeasureKind::Normalized => "normalized",
        MeasureKind::Combinatorial => "combinatorial",
        MeasureKind::Custom => "custom",
    };
    format!("graph({} vertices,{kind})", g.num_vertices())
}
