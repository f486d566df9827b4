//! Configurable verification suites over graph families.
//!
//! A suite expands its configuration into graph instances, runs every
//! requested check on every instance and aggregates the resulting
//! [`CheckReport`]s. Reports are sorted by (check, graph, parameters), so the
//! JSON output does not depend on scheduling; wall-clock timings are kept in
//! a separate section.

use std::collections::BTreeMap;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::curvature::{curvature_function, CurvatureResult, Dimension};
use crate::error::{Error, Result};
use crate::generate::{center_vertex, generate, Family};
use crate::graph::{ball, MeasurePolicy, VertexSubset, WeightedGraph};
use crate::harness::{
    buser_check_with_curvature, cheeger_lower_bound_check_with_curvature,
    edge_indicator_bound_check,
};
use crate::isoperimetry::ENUMERATION_CAP;
use crate::metric::{canonical_intrinsic_metric, dgg_check_with};
use crate::report::{json_f64, CheckReport, Relation, Status, DEFAULT_TOL};
use crate::semigroup::{
    convergence_to_average, gradient_bound_check_with, indicator_lower_bound_check_with,
    mass_conservation_residual, pseudo_poincare_check_with, remark_bound_check_with,
    reverse_poincare_check_with, semigroup_identities, HeatKernel,
};
use crate::spectral::{lambda_bottom_dirichlet, DENSE_LIMIT};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    Buser,
    CheegerBound,
    GradientBound,
    ReversePoincare,
    /// Gradient bound at `K + ε`; expected to fail on positively curved graphs.
    GradientProbe,
    PseudoPoincare,
    RemarkBound,
    IndicatorBound,
    IndicatorLowerBound,
    Semigroup,
    Dgg,
    Convergence,
}

impl CheckKind {
    pub const ALL: [CheckKind; 12] = [
        CheckKind::Buser,
        CheckKind::CheegerBound,
        CheckKind::GradientBound,
        CheckKind::ReversePoincare,
        CheckKind::GradientProbe,
        CheckKind::PseudoPoincare,
        CheckKind::RemarkBound,
        CheckKind::IndicatorBound,
        CheckKind::IndicatorLowerBound,
        CheckKind::Semigroup,
        CheckKind::Dgg,
        CheckKind::Convergence,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CheckKind::Buser => "buser",
            CheckKind::CheegerBound => "cheeger_bound",
            CheckKind::GradientBound => "gradient_bound",
            CheckKind::ReversePoincare => "reverse_poincare",
            CheckKind::GradientProbe => "gradient_probe",
            CheckKind::PseudoPoincare => "pseudo_poincare",
            CheckKind::RemarkBound => "remark_bound",
            CheckKind::IndicatorBound => "indicator_bound",
            CheckKind::IndicatorLowerBound => "indicator_lower_bound",
            CheckKind::Semigroup => "semigroup",
            CheckKind::Dgg => "dgg",
            CheckKind::Convergence => "convergence",
        }
    }
}

/// A size entry: a bare number sets the family's main size parameter, a
/// string gives explicit `k=v` parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SizeSpec {
    Size(usize),
    Params(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Probes {
    /// Random functions per battery.
    #[serde(default = "Probes::default_functions")]
    pub functions: usize,
    /// Random subsets per battery.
    #[serde(default = "Probes::default_subsets")]
    pub subsets: usize,
    /// Curvature increment for the tightness probe.
    #[serde(default = "Probes::default_epsilon")]
    pub epsilon: f64,
    /// Times for the gradient and reverse Poincaré batteries.
    #[serde(default = "Probes::default_times")]
    pub times: Vec<f64>,
}

impl Probes {
    fn default_functions() -> usize {
        100
    }
    fn default_subsets() -> usize {
        100
    }
    fn default_epsilon() -> f64 {
        1e-2
    }
    fn default_times() -> Vec<f64> {
        vec![0.1, 1.0, 10.0]
    }
}

impl Default for Probes {
    fn default() -> Self {
        Probes {
            functions: Self::default_functions(),
            subsets: Self::default_subsets(),
            epsilon: Self::default_epsilon(),
            times: Self::default_times(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteConfig {
    pub families: Vec<String>,
    pub sizes: BTreeMap<String, Vec<SizeSpec>>,
    pub seeds: Vec<u64>,
    pub checks: Vec<CheckKind>,
    pub tolerances: BTreeMap<String, f64>,
    pub probes: Probes,
    pub measure: String,
}

const FAMILIES: [&str; 8] = [
    "two_vertex",
    "complete",
    "hypercube",
    "cycle",
    "path",
    "lattice_ball",
    "tree_ball",
    "random",
];
const KEYS: [&str; 7] = [
    "families",
    "sizes",
    "seeds",
    "checks",
    "tolerances",
    "probes",
    "measure",
];

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            families: FAMILIES.iter().map(|s| s.to_string()).collect(),
            sizes: BTreeMap::new(),
            seeds: vec![1, 2, 3],
            checks: CheckKind::ALL.to_vec(),
            tolerances: BTreeMap::new(),
            probes: Probes::default(),
            measure: "normalized".into(),
        }
    }
}

fn config_err(key: &str, message: impl Into<String>) -> Error {
    Error::Config {
        key: key.to_string(),
        message: message.into(),
    }
}

fn field<T: serde::de::DeserializeOwned>(
    obj: &serde_json::Map<String, Value>,
    key: &str,
) -> Result<Option<T>> {
    obj.get(key)
        .map(|v| serde_json::from_value(v.clone()).map_err(|e| config_err(key, e.to_string())))
        .transpose()
}

impl SuiteConfig {
    /// Parses a JSON config. Missing keys take their defaults; unknown keys
    /// are rejected.
    pub fn from_json(text: &str) -> Result<SuiteConfig> {
        let value: Value =
            serde_json::from_str(text).map_err(|e| config_err("<document>", e.to_string()))?;
        let obj = value
            .as_object()
            .ok_or_else(|| config_err("<document>", "config must be a JSON object"))?;
        if let Some(bad) = obj.keys().find(|k| !KEYS.contains(&k.as_str())) {
            return Err(config_err(bad, "unknown key"));
        }
        let mut cfg = SuiteConfig::default();
        if let Some(f) = field::<Vec<String>>(obj, "families")? {
            if let Some(bad) = f.iter().find(|name| !FAMILIES.contains(&name.as_str())) {
                return Err(config_err("families", format!("unknown family `{bad}`")));
            }
            cfg.families = f;
        }
        if let Some(s) = field::<BTreeMap<String, Vec<SizeSpec>>>(obj, "sizes")? {
            if let Some(bad) = s.keys().find(|name| !FAMILIES.contains(&name.as_str())) {
                return Err(config_err("sizes", format!("unknown family `{bad}`")));
            }
            cfg.sizes = s;
        }
        if let Some(s) = field(obj, "seeds")? {
            cfg.seeds = s;
        }
        if let Some(c) = field(obj, "checks")? {
            cfg.checks = c;
        }
        if let Some(t) = field::<BTreeMap<String, f64>>(obj, "tolerances")? {
            let known = |k: &str| k == "default" || CheckKind::ALL.iter().any(|c| c.name() == k);
            if let Some(bad) = t.keys().find(|k| !known(k)) {
                return Err(config_err("tolerances", format!("unknown check `{bad}`")));
            }
            if let Some((k, v)) = t.iter().find(|(_, v)| !(**v >= 0.0)) {
                return Err(config_err(
                    "tolerances",
                    format!("tolerance for `{k}` must be nonnegative, got {v}"),
                ));
            }
            cfg.tolerances = t;
        }
        if let Some(p) = field(obj, "probes")? {
            cfg.probes = p;
        }
        if let Some(m) = field::<String>(obj, "measure")? {
            MeasurePolicy::parse(&m).map_err(|e| config_err("measure", e.to_string()))?;
            cfg.measure = m;
        }
        if cfg.seeds.is_empty() && cfg.families.iter().any(|f| f == "random") {
            return Err(config_err(
                "seeds",
                "the random family needs at least one seed",
            ));
        }
        Ok(cfg)
    }

    fn tolerance(&self, check: CheckKind) -> f64 {
        self.tolerances
            .get(check.name())
            .or_else(|| self.tolerances.get("default"))
            .copied()
            .unwrap_or(DEFAULT_TOL)
    }

    fn default_sizes(family: &str) -> Vec<SizeSpec> {
        use SizeSpec::*;
        match family {
            "complete" => (3..=6).map(Size).collect(),
            "hypercube" => (1..=4).map(Size).collect(),
            "cycle" => (4..=12).map(Size).collect(),
            "path" => vec![Size(5), Size(9)],
            "lattice_ball" => (3..=8)
                .map(|r| Params(format!("d=1,r={r}")))
                .chain((2..=4).map(|r| Params(format!("d=2,r={r}"))))
                .collect(),
            "tree_ball" => vec![Params("degree=3,r=2".into()), Params("degree=3,r=3".into())],
            "random" => vec![Size(8), Size(10)],
            _ => vec![],
        }
    }

    /// The graph instances this config describes, with their battery seeds.
    pub fn instances(&self) -> Result<Vec<(Family, u64)>> {
        let base_seed = self.seeds.first().copied().unwrap_or(0);
        let mut out = Vec::new();
        for name in &self.families {
            if name == "two_vertex" {
                out.push((Family::Path { n: 2 }, base_seed));
                continue;
            }
            let sizes = self
                .sizes
                .get(name)
                .cloned()
                .unwrap_or_else(|| Self::default_sizes(name));
            for size in sizes {
                let params = match size {
                    SizeSpec::Params(p) => p,
                    SizeSpec::Size(v) => {
                        let key = match name.as_str() {
                            "hypercube" => "d",
                            "lattice_ball" | "tree_ball" => "r",
                            _ => "n",
                        };
                        format!("{key}={v}")
                    }
                };
                if name == "random" {
                    for &seed in &self.seeds {
                        let with_seed = if params.contains("seed=") {
                            params.clone()
                        } else {
                            format!("{params},seed={seed}")
                        };
                        out.push((
                            Family::parse(name, &with_seed)
                                .map_err(|e| config_err("sizes", e.to_string()))?,
                            seed,
                        ));
                    }
                } else {
                    out.push((
                        Family::parse(name, &params)
                            .map_err(|e| config_err("sizes", e.to_string()))?,
                        base_seed,
                    ));
                }
            }
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckSummary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
    pub expected_fail: usize,
    pub unexpected_pass: usize,
    /// Smallest margin among evaluated (non-skipped) entries.
    pub worst_margin: Value,
    pub worst_graph: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Timing {
    pub check: String,
    pub graph: String,
    pub ms: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub config: SuiteConfig,
    pub reports: Vec<CheckReport>,
    pub summary: BTreeMap<String, CheckSummary>,
    pub failures: usize,
    pub timings: Vec<Timing>,
    pub total_ms: f64,
}

impl SuiteReport {
    /// True when some non-skipped, non-probe check failed or a probe passed.
    pub fn failed(&self) -> bool {
        self.failures > 0
    }

    /// The report without its timing section.
    pub fn deterministic_json(&self) -> String {
        let mut v = serde_json::to_value(self).expect("report serializes");
        let obj = v.as_object_mut().expect("object");
        obj.remove("timings");
        obj.remove("total_ms");
        serde_json::to_string_pretty(&v).expect("value serializes")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

pub fn run_suite(config: &SuiteConfig) -> Result<SuiteReport> {
    let start = Instant::now();
    let instances = config.instances()?;
    let policy = MeasurePolicy::parse(&config.measure)?;
    let tasks: Vec<(Family, u64)> = if config.checks.is_empty() {
        Vec::new()
    } else {
        instances
    };
    let run_one =
        |&(family, seed): &(Family, u64)| run_instance(config, family, seed, policy.clone());
    #[cfg(feature = "parallel")]
    let results: Vec<Result<Vec<(CheckReport, f64)>>> = {
        use rayon::prelude::*;
        tasks.par_iter().map(run_one).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let results: Vec<Result<Vec<(CheckReport, f64)>>> = tasks.iter().map(run_one).collect();

    let mut entries = Vec::new();
    for r in results {
        entries.extend(r?);
    }
    entries.sort_by_key(|e| sort_key(&e.0));
    let timings = entries
        .iter()
        .map(|(r, ms)| Timing {
            check: r.check.clone(),
            graph: r.graph.clone(),
            ms: *ms,
        })
        .collect();
    let reports: Vec<CheckReport> = entries.into_iter().map(|(r, _)| r).collect();
    let summary = summarize(&reports);
    let failures = reports.iter().filter(|r| r.status.is_failure()).count();
    Ok(SuiteReport {
        config: config.clone(),
        reports,
        summary,
        failures,
        timings,
        total_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

fn sort_key(r: &CheckReport) -> (String, String, String) {
    (
        r.check.clone(),
        r.graph.clone(),
        serde_json::to_string(&r.params).unwrap_or_default(),
    )
}

fn summarize(reports: &[CheckReport]) -> BTreeMap<String, CheckSummary> {
    let mut out: BTreeMap<String, CheckSummary> = BTreeMap::new();
    for r in reports {
        let s = out.entry(r.check.clone()).or_insert_with(|| CheckSummary {
            total: 0,
            passed: 0,
            failed: 0,
            skipped: 0,
            expected_fail: 0,
            unexpected_pass: 0,
            worst_margin: Value::Null,
            worst_graph: String::new(),
        });
        s.total += 1;
        match r.status {
            Status::Pass => s.passed += 1,
            Status::Fail => s.failed += 1,
            Status::Skipped => s.skipped += 1,
            Status::ExpectedFail => s.expected_fail += 1,
            Status::UnexpectedPass => s.unexpected_pass += 1,
        }
        if r.status != Status::Skipped && r.margin.is_finite() {
            let better = s.worst_margin.as_f64().is_none_or(|w| r.margin < w);
            if better {
                s.worst_margin = Value::from(r.margin);
                s.worst_graph = r.graph.clone();
            }
        }
    }
    out
}

/// FNV-1a, used to derive stable per-battery seeds.
fn stable_hash(parts: &[&str], seed: u64) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325 ^ seed;
    for p in parts {
        for b in p.bytes().chain([0xff]) {
            h ^= b as u64;
            h = h.wrapping_mul(0x100000001b3);
        }
    }
    h
}

struct Instance {
    name: String,
    graph: WeightedGraph,
    /// Proper ball `Ω` for ball-shaped families.
    truncation: Option<VertexSubset>,
    seed: u64,
    curvature: CurvatureResult,
    k: f64,
}

impl Instance {
    fn rng(&self, check: CheckKind) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(stable_hash(&[&self.name, check.name()], self.seed))
    }
}

fn random_function(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

fn random_subset(
    rng: &mut ChaCha8Rng,
    g: &WeightedGraph,
    within: Option<&VertexSubset>,
) -> VertexSubset {
    let pool: Vec<usize> = match within {
        Some(o) => o.members().to_vec(),
        None => (0..g.num_vertices()).collect(),
    };
    loop {
        let picked: Vec<usize> = pool.iter().copied().filter(|_| rng.gen_bool(0.4)).collect();
        if !picked.is_empty() && (within.is_some() || picked.len() < pool.len()) {
            return VertexSubset::new(g, picked).expect("indices come from the graph");
        }
    }
}

fn worst_of(mut reports: Vec<CheckReport>) -> Option<CheckReport> {
    let samples = reports.len();
    let mut best: Option<usize> = None;
    for (i, r) in reports.iter().enumerate() {
        if best.is_none_or(|b| r.margin < reports[b].margin) {
            best = Some(i);
        }
    }
    best.map(|i| reports.swap_remove(i).with_extra("samples", samples))
}

fn retolerate(mut r: CheckReport, tol: f64) -> CheckReport {
    if r.status == Status::Skipped {
        return r;
    }
    r.tolerance = tol;
    r.pass = r.margin >= -tol;
    r.status = if r.pass { Status::Pass } else { Status::Fail };
    r
}

fn run_instance(
    config: &SuiteConfig,
    family: Family,
    seed: u64,
    policy: MeasurePolicy,
) -> Result<Vec<(CheckReport, f64)>> {
    let graph = generate(family, policy)?;
    if graph.num_vertices() > DENSE_LIMIT {
        return Err(config_err(
            "sizes",
            format!("{family} has more than {DENSE_LIMIT} vertices"),
        ));
    }
    let truncation = match family {
        Family::LatticeBall { r, .. } | Family::TreeBall { r, .. } if r >= 1 => {
            let c = center_vertex(family, &graph).expect("ball families have a centre");
            Some(ball(&graph, c, r - 1)?)
        }
        _ => None,
    };
    let curvature = curvature_function(&graph, Dimension::INFINITE)?;
    let k = curvature.global_k;
    let inst = Instance {
        name: family.to_string(),
        graph,
        truncation,
        seed,
        curvature,
        k,
    };
    let kernel = HeatKernel::new(&inst.graph, None)?;
    let mut out = Vec::new();
    for &check in &config.checks {
        let started = Instant::now();
        let reports = run_check(config, check, &inst, &kernel)?;
        let ms = started.elapsed().as_secs_f64() * 1e3 / reports.len().max(1) as f64;
        for r in reports {
            let probe = r.status == Status::ExpectedFail || r.status == Status::UnexpectedPass;
            let r = if probe {
                r
            } else {
                retolerate(r, config.tolerance(check))
            };
            out.push((r.on_graph(inst.name.clone()).param("seed", inst.seed), ms));
        }
    }
    Ok(out)
}

fn run_check(
    config: &SuiteConfig,
    check: CheckKind,
    inst: &Instance,
    kernel: &HeatKernel,
) -> Result<Vec<CheckReport>> {
    let g = &inst.graph;
    let n = g.num_vertices();
    let probes = &config.probes;
    let mut rng = inst.rng(check);
    let k = inst.k;
    let mut out = Vec::new();
    match check {
        CheckKind::Buser => {
            let omega = match &inst.truncation {
                Some(o) => Some(o.clone()),
                None if n <= ENUMERATION_CAP => Some(VertexSubset::all(g)),
                None => None,
            };
            out.push(match omega {
                Some(o) => buser_check_with_curvature(g, &o, k)?,
                None => CheckReport::skipped(
                    "buser",
                    g,
                    "exact Cheeger constant needs at most 20 vertices",
                    "λ ≤ max{C_1 h^2, C_2 √|K| h}",
                ),
            });
        }
        CheckKind::CheegerBound => out.push(cheeger_lower_bound_check_with_curvature(g, k)?),
        CheckKind::GradientBound | CheckKind::ReversePoincare => {
            let functions: Vec<Vec<f64>> = (0..probes.functions)
                .map(|_| random_function(&mut rng, n))
                .chain(std::iter::once(
                    inst.curvature.vertices[inst.curvature.argmin]
                        .witness
                        .0
                        .clone(),
                ))
                .collect();
            for &t in &probes.times {
                let mut battery = Vec::new();
                for f in &functions {
                    battery.push(if check == CheckKind::GradientBound {
                        gradient_bound_check_with(kernel, g, f, t, Dimension::INFINITE, k)?
                    } else {
                        reverse_poincare_check_with(kernel, g, f, t, Dimension::INFINITE, k)?
                    });
                }
                out.extend(worst_of(battery));
            }
        }
        CheckKind::GradientProbe => {
            let anchor = "Γ(P_t f) ≤ e^{-2Kt} P_t(Γ(f)) at K + ε";
            if k <= 0.0 {
                out.push(CheckReport::skipped(
                    "gradient_probe",
                    g,
                    "probe applies to positively curved graphs",
                    anchor,
                ));
            } else {
                let mut battery = Vec::new();
                let probe_k = k + probes.epsilon;
                for v in &inst.curvature.vertices {
                    for t in [1e-3, 1e-2, 1e-1] {
                        battery.push(gradient_bound_check_with(
                            kernel,
                            g,
                            &v.witness.0,
                            t,
                            Dimension::INFINITE,
                            probe_k,
                        )?);
                    }
                }
                for _ in 0..probes.functions {
                    let f = random_function(&mut rng, n);
                    battery.push(gradient_bound_check_with(
                        kernel,
                        g,
                        &f,
                        0.1,
                        Dimension::INFINITE,
                        probe_k,
                    )?);
                }
                if let Some(mut r) = worst_of(battery) {
                    r.check = "gradient_probe".into();
                    out.push(r.with_extra("epsilon", probes.epsilon).as_probe());
                }
            }
        }
        CheckKind::PseudoPoincare => {
            let t_max = if k < 0.0 { 1.0 / (2.0 * k.abs()) } else { 10.0 };
            let mut battery = Vec::new();
            for _ in 0..probes.functions {
                let f = random_function(&mut rng, n);
                let t = rng.gen_range(0.0..=1.0) * t_max;
                battery.push(pseudo_poincare_check_with(kernel, g, &f, t, k)?);
            }
            out.extend(worst_of(battery));
        }
        CheckKind::RemarkBound => {
            let anchor = "‖f - P_t f‖_1 ≤ (2/√K)(π - 2 arcsin e^{-Kt}) ‖√Γ(f)‖_1";
            if k <= 0.0 {
                out.push(CheckReport::skipped(
                    "remark_bound",
                    g,
                    &Error::NonpositiveCurvature(k).to_string(),
                    anchor,
                ));
            } else {
                let mut battery = Vec::new();
                let mut literal_worst = f64::INFINITY;
                for _ in 0..probes.functions {
                    let f = random_function(&mut rng, n);
                    let t = rng.gen_range(0.0..=10.0);
                    let r = remark_bound_check_with(kernel, g, &f, t, k)?;
                    literal_worst = literal_worst
                        .min(r.extra["literal_gamma_margin"].as_f64().unwrap_or(f64::NAN));
                    battery.push(r);
                }
                out.extend(
                    worst_of(battery).map(|r| {
                        r.with_extra("literal_gamma_worst_margin", json_f64(literal_worst))
                    }),
                );
            }
        }
        CheckKind::IndicatorBound => {
            let battery = (0..probes.subsets)
                .map(|_| edge_indicator_bound_check(g, &random_subset(&mut rng, g, None)))
                .collect::<Result<Vec<_>>>()?;
            out.extend(worst_of(battery));
        }
        CheckKind::IndicatorLowerBound => {
            // λ is the bottom of the whole-graph spectrum, 0 on a finite graph
            let subsets: Vec<VertexSubset> = (0..probes.subsets)
                .map(|_| random_subset(&mut rng, g, None))
                .collect();
            for t in [0.1, 1.0] {
                let mut battery = Vec::new();
                let mut dirichlet_worst = f64::INFINITY;
                for u in &subsets {
                    battery.push(indicator_lower_bound_check_with(kernel, g, u, t, 0.0)?);
                    let lam_u = lambda_bottom_dirichlet(g, u)?.eigenvalue;
                    let r = indicator_lower_bound_check_with(kernel, g, u, t, lam_u)?;
                    dirichlet_worst = dirichlet_worst.min(r.margin);
                }
                out.extend(worst_of(battery).map(|r| {
                    r.with_extra(
                        "subset_dirichlet_lambda_worst_margin",
                        json_f64(dirichlet_worst),
                    )
                }));
            }
        }
        CheckKind::Semigroup => {
            let mut worst: f64 = 0.0;
            let mut worst_params = (0.0, 0.0);
            for _ in 0..probes.functions.min(10) {
                let f = random_function(&mut rng, n);
                let h = random_function(&mut rng, n);
                let t = rng.gen_range(0.0..3.0);
                let s = rng.gen_range(0.0..3.0);
                let ident = semigroup_identities(g, &f, &h, t, s)?;
                let l1: f64 = (0..n).map(|x| g.m(x) * f[x].abs()).sum();
                let mass = mass_conservation_residual(g, &f, t, None)?.abs() / l1.max(1.0);
                let r = ident.max_residual().max(mass);
                if r > worst {
                    worst = r;
                    worst_params = (t, s);
                }
            }
            out.push(
                CheckReport::new(
                    "semigroup",
                    g,
                    Relation::AtMost,
                    worst,
                    0.0,
                    DEFAULT_TOL,
                    "P_t identities and Σ m P_t f = Σ m f",
                )
                .with_extra("t", worst_params.0)
                .with_extra("s", worst_params.1),
            );
        }
        CheckKind::Dgg => {
            let metric = canonical_intrinsic_metric(g)?;
            let mut battery = Vec::new();
            let mut dirichlet = Vec::new();
            let omega_kernel = match &inst.truncation {
                Some(o) if o.len() >= 2 => Some((
                    o,
                    HeatKernel::new(g, Some(o))?,
                    lambda_bottom_dirichlet(g, o)?.eigenvalue,
                )),
                _ => None,
            };
            for _ in 0..probes.subsets {
                let (a, b) = disjoint_pair(&mut rng, g, None);
                let f = supported_function(&mut rng, &a, n);
                let h = supported_function(&mut rng, &b, n);
                for t in [0.5, 1.0, 2.0] {
                    battery.push(dgg_check_with(kernel, g, &metric, &a, &b, &f, &h, t, 0.0)?);
                }
                if let Some((o, ok, lam)) = &omega_kernel {
                    let (a, b) = disjoint_pair(&mut rng, g, Some(o));
                    let f = supported_function(&mut rng, &a, n);
                    let h = supported_function(&mut rng, &b, n);
                    for t in [0.5, 1.0, 2.0] {
                        dirichlet.push(
                            dgg_check_with(ok, g, &metric, &a, &b, &f, &h, t, *lam)?
                                .param("dirichlet", true),
                        );
                    }
                }
            }
            out.extend(worst_of(battery));
            out.extend(worst_of(dirichlet));
        }
        CheckKind::Convergence => {
            let anchor = "P_t f → (1/|V|) Σ m f";
            if k <= 0.0 {
                out.push(CheckReport::skipped(
                    "convergence",
                    g,
                    &Error::NonpositiveCurvature(k).to_string(),
                    anchor,
                ));
            } else {
                let f = random_function(&mut rng, n);
                let times: Vec<f64> = (1..=10).map(|i| 0.5 * i as f64).collect();
                let rep = convergence_to_average(g, &f, &times, Some(k))?;
                let worst_increase = rep
                    .deviation
                    .windows(2)
                    .map(|w| w[1] - w[0])
                    .fold(f64::NEG_INFINITY, f64::max);
                out.push(
                    CheckReport::new(
                        "convergence",
                        g,
                        Relation::AtMost,
                        worst_increase.max(0.0),
                        0.0,
                        DEFAULT_TOL,
                        anchor,
                    )
                    .with_extra("deviation", rep.deviation.clone())
                    .with_extra("envelope_holds", rep.envelope_holds),
                );
            }
        }
    }
    Ok(out)
}

fn disjoint_pair(
    rng: &mut ChaCha8Rng,
    g: &WeightedGraph,
    within: Option<&VertexSubset>,
) -> (VertexSubset, VertexSubset) {
    let pool: Vec<usize> = match within {
        Some(o) => o.members().to_vec(),
        None => (0..g.num_vertices()).collect(),
    };
    let mut a = Vec::new();
    let mut b = Vec::new();
    for &x in &pool {
        match rng.gen_range(0..4) {
            0 => a.push(x),
            1 => b.push(x),
            _ => {}
        }
    }
    if a.is_empty() {
        a.push(pool[0]);
        b.retain(|&x| x != pool[0]);
    }
    if b.is_empty() {
        let last = *pool
            .iter()
            .rev()
            .find(|x| !a.contains(x))
            .unwrap_or(&pool[pool.len() - 1]);
        a.retain(|&x| x != last);
        if a.is_empty() {
            a.push(pool[0]);
        }
        b.push(last);
    }
    (
        VertexSubset::new(g, a).expect("valid"),
        VertexSubset::new(g, b).expect("valid"),
    )
}

fn supported_function(rng: &mut ChaCha8Rng, support: &VertexSubset, n: usize) -> Vec<f64> {
    let mut f = vec![0.0; n];
    for &x in support.members() {
        f[x] = rng.gen_range(-1.0..1.0);
    }
    f
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_errors_name_the_key() {
        let err = SuiteConfig::from_json(r#"{"families": [], "colour": 3}"#).unwrap_err();
        assert_eq!(
            err,
            Error::Config {
                key: "colour".into(),
                message: "unknown key".into()
            }
        );
        let err = SuiteConfig::from_json(r#"{"checks": ["nope"]}"#).unwrap_err();
        assert!(matches!(err, Error::Config { ref key, .. } if key == "checks"));
        let err = SuiteConfig::from_json(r#"{"families": ["moebius"]}"#).unwrap_err();
        assert!(matches!(err, Error::Config { ref key, .. } if key == "families"));
        let err = SuiteConfig::from_json("[1]").unwrap_err();
        assert!(matches!(err, Error::Config { .. }));
    }

    #[test]
    fn empty_check_list_gives_empty_report() {
        let cfg = SuiteConfig::from_json(r#"{"checks": []}"#).unwrap();
        let rep = run_suite(&cfg).unwrap();
        assert!(rep.reports.is_empty());
        assert!(!rep.failed());
    }

    #[test]
    fn instance_expansion() {
        let cfg = SuiteConfig::from_json(
            r#"{"families": ["two_vertex", "hypercube", "random", "lattice_ball"],
                "sizes": {"hypercube": [2], "random": [6], "lattice_ball": ["d=2,r=2"]},
                "seeds": [4, 5]}"#,
        )
        .unwrap();
        let inst = cfg.instances().unwrap();
        let names: Vec<String> = inst.iter().map(|(f, _)| f.to_string()).collect();
        assert_eq!(
            names,
            [
                "path(n=2)",
                "hypercube(d=2)",
                "random(n=6,p=0.3,seed=4)",
                "random(n=6,p=0.3,seed=5)",
                "lattice_ball(d=2,r=2)"
            ]
        );
    }

    #[test]
    fn small_suite_is_deterministic_and_green() {
        let cfg = SuiteConfig::from_json(
            r#"{"families": ["two_vertex", "cycle", "lattice_ball"],
                "sizes": {"cycle": [5], "lattice_ball": ["d=1,r=3"]},
                "probes": {"functions": 4, "subsets": 3}}"#,
        )
        .unwrap();
        let a = run_suite(&cfg).unwrap();
        let b = run_suite(&cfg).unwrap();
        assert_eq!(a.deterministic_json(), b.deterministic_json());
        let bad: Vec<_> = a
            .reports
            .iter()
            .filter(|r| r.status.is_failure())
            .map(|r| (&r.check, &r.graph, r.margin))
            .collect();
        assert!(bad.is_empty(), "{bad:?}");
        assert_eq!(a.summary["gradient_probe"].expected_fail, 1);
        assert_eq!(a.summary["cheeger_bound"].skipped, 2);
    }
}
