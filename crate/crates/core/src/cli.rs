//! Command-line front end.
//!
//! Every run is described by a [`RunConfig`] that is embedded verbatim in
//! its report, so outputs are self-describing. JSON reports follow
//! `schema/report.schema.json`; CSV is a flat projection of the main table
//! preceded by a `#` comment line holding the configuration.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::arith::{
    class_group, dot_pair_count, dot_product_distribution, field_discriminant, pall_count, perp_summary,
    verify_cardinality,
};
use crate::budget::Budget;
use crate::equidist::{cap_stats, dev_mod_q, hecke_equidist_check, hecke_layer, standard_caps, Cap};
use crate::error::{Error, ErrorKind};
use crate::graph::Multigraph;
use crate::lattice::{count_hd_with, enumerate_hd_with, legendre_representable, so3z_orbits, LatticePoint};
use crate::modq_graph::build_graph_with;
use crate::nbwalk::{large_deviation_stats, predicted_arc_spectrum, random_subset, ArcGraph, DeviationMode};
use crate::spectral::{adjacency_spectrum, multiplicity};
use crate::walk::{extend_trajectory, orbit_period_with, shadowing_check, sigma_count_with, sigma_pairs};

pub const SCHEMA_VERSION: &str = "1.0.0";

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_PRECONDITION: i32 = 3;
pub const EXIT_BUDGET: i32 = 4;

#[derive(Parser, Debug, Clone)]
#[command(name = "linnik", version, about = "Integer points on spheres, Linnik trajectories and Ramanujan graphs mod q")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug, Clone)]
pub struct CommonArgs {
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    /// Cap on worker threads.
    #[arg(long, global = true, env = "LINNIK_THREADS")]
    pub threads: Option<usize>,
    #[command(flatten)]
    pub budget: BudgetArgs,
}

#[derive(Args, Debug, Clone, Default)]
pub struct BudgetArgs {
    #[arg(long, global = true, env = "LINNIK_BUDGET_MAX_D")]
    pub max_d: Option<u64>,
    #[arg(long, global = true, env = "LINNIK_BUDGET_MAX_PAIRS")]
    pub max_pairs: Option<u128>,
    #[arg(long, global = true, env = "LINNIK_BUDGET_MAX_DENSE_DIM")]
    pub max_dense_dim: Option<usize>,
    #[arg(long, global = true, env = "LINNIK_BUDGET_MAX_PATHS")]
    pub max_paths: Option<u128>,
    #[arg(long, global = true, env = "LINNIK_BUDGET_MAX_HECKE_NODES")]
    pub max_hecke_nodes: Option<u128>,
    #[arg(long, global = true, env = "LINNIK_BUDGET_MAX_TRACE_WORK")]
    pub max_trace_work: Option<u128>,
}

impl BudgetArgs {
    pub fn resolve(&self) -> Budget {
        let d = Budget::default();
        Budget {
            max_d: self.max_d.unwrap_or(d.max_d),
            max_pairs: self.max_pairs.unwrap_or(d.max_pairs),
            max_dense_dim: self.max_dense_dim.unwrap_or(d.max_dense_dim),
            max_paths: self.max_paths.unwrap_or(d.max_paths),
            max_hecke_nodes: self.max_hecke_nodes.unwrap_or(d.max_hecke_nodes),
            max_trace_work: self.max_trace_work.unwrap_or(d.max_trace_work),
        }
    }
}

#[derive(Subcommand, Debug, Clone, Serialize)]
#[serde(untagged)]
pub enum Command {
    /// List the integer points of norm d.
    Enumerate(DArgs),
    /// Split H_d into SO3(Z) orbits.
    Orbits(OrbitsArgs),
    /// Forward Linnik trajectory from a point.
    Trajectory(TrajectoryArgs),
    /// Period of the trajectory through a point.
    Period(PointArgs),
    /// Compare trajectory agreement with congruence mod 5^ℓ.
    Shadowing(ShadowingArgs),
    /// Count ordered pairs whose segments agree mod q.
    Sigma(SigmaArgs),
    /// Export the 6-regular graph on H_d(q).
    Graph(DqArgs),
    /// Adjacency spectrum of the graph on H_d(q).
    Spectrum(DqArgs),
    /// Non-backtracking operator: predicted spectrum versus power traces.
    ArcSpectrum(ArcSpectrumArgs),
    /// Large deviations of non-backtracking walks on H_d(q).
    WalkLd(WalkLdArgs),
    /// Dot products of pairs in H_d.
    BasicLemma(BasicLemmaArgs),
    /// Representations of a binary form by x² + y² + z².
    Pall(PallArgs),
    /// Class group of a negative discriminant.
    ClassGroup(ClassGroupArgs),
    /// Perp map from H_d to the class group.
    Perp(DArgs),
    /// Compare |H_d| with the class number.
    Cardinality(DArgs),
    /// Fiber deviations of H_d → H_d(q).
    DevQ(DevQArgs),
    /// Spherical cap deviations at random centers.
    Caps(CapsArgs),
    /// Hecke tree layer and cap discrepancies.
    Hecke(HeckeArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Enumerate(_) => "enumerate",
            Command::Orbits(_) => "orbits",
            Command::Trajectory(_) => "trajectory",
            Command::Period(_) => "period",
            Command::Shadowing(_) => "shadowing",
            Command::Sigma(_) => "sigma",
            Command::Graph(_) => "graph",
            Command::Spectrum(_) => "spectrum",
            Command::ArcSpectrum(_) => "arc-spectrum",
            Command::WalkLd(_) => "walk-ld",
            Command::BasicLemma(_) => "basic-lemma",
            Command::Pall(_) => "pall",
            Command::ClassGroup(_) => "class-group",
            Command::Perp(_) => "perp",
            Command::Cardinality(_) => "cardinality",
            Command::DevQ(_) => "dev-q",
            Command::Caps(_) => "caps",
            Command::Hecke(_) => "hecke",
        }
    }
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct DArgs {
    #[arg(long)]
    pub d: u64,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct OrbitsArgs {
    #[arg(long)]
    pub d: u64,
    /// Use the 12 even signed permutations only.
    #[arg(long)]
    pub even: bool,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct TrajectoryArgs {
    #[arg(long)]
    pub d: u64,
    #[arg(long, allow_hyphen_values = true)]
    pub start: LatticePoint,
    /// Number of forward steps.
    #[arg(long)]
    pub len: usize,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct PointArgs {
    #[arg(long)]
    pub d: u64,
    #[arg(long, allow_hyphen_values = true)]
    pub start: LatticePoint,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct ShadowingArgs {
    #[arg(long)]
    pub d: u64,
    #[arg(long, allow_hyphen_values = true)]
    pub x: LatticePoint,
    /// Second point; all of H_d when omitted.
    #[arg(long, allow_hyphen_values = true)]
    pub y: Option<LatticePoint>,
    #[arg(long)]
    pub ell: usize,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct SigmaArgs {
    #[arg(long)]
    pub d: u64,
    #[arg(long)]
    pub ell: usize,
    #[arg(long)]
    pub q: u64,
    /// Also list the pairs of centers.
    #[arg(long)]
    pub pairs: bool,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct DqArgs {
    #[arg(long)]
    pub d: u64,
    #[arg(long)]
    pub q: u64,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct ArcSpectrumArgs {
    #[arg(long, requires = "q", conflicts_with = "complete")]
    pub d: Option<u64>,
    #[arg(long, requires = "d")]
    pub q: Option<u64>,
    /// Use the complete graph on this many vertices instead of H_d(q).
    #[arg(long, required_unless_present = "d")]
    pub complete: Option<usize>,
    /// Largest power trace compared.
    #[arg(long, default_value_t = 12)]
    pub k: usize,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct WalkLdArgs {
    #[arg(long)]
    pub d: u64,
    #[arg(long)]
    pub q: u64,
    #[arg(long)]
    pub ell: usize,
    #[arg(long)]
    pub epsilon: f64,
    /// Density of the random target set.
    #[arg(long)]
    pub mu: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Sample this many walks instead of counting all of them.
    #[arg(long)]
    pub samples: Option<u64>,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct BasicLemmaArgs {
    #[arg(long)]
    pub d: u64,
    /// Single dot product; compares with the Pall count for `d X² + 2e XY + d Y²`.
    #[arg(long, allow_hyphen_values = true)]
    pub e: Option<i64>,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct PallArgs {
    #[arg(long)]
    pub a: i64,
    #[arg(long, allow_hyphen_values = true)]
    pub b: i64,
    #[arg(long)]
    pub c: i64,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct ClassGroupArgs {
    #[arg(long, allow_hyphen_values = true, conflicts_with = "d", required_unless_present = "d")]
    pub disc: Option<i64>,
    /// Use the discriminant of Q(√−d).
    #[arg(long)]
    pub d: Option<u64>,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct DevQArgs {
    #[arg(long)]
    pub d: u64,
    #[arg(long)]
    pub q: u64,
    #[arg(long, default_value_t = 0.5)]
    pub delta: f64,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct CapsArgs {
    #[arg(long)]
    pub d: u64,
    #[arg(long)]
    pub rho: f64,
    #[arg(long, default_value_t = 1000)]
    pub centers: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.5)]
    pub eta: f64,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct HeckeArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub start: LatticePoint,
    #[arg(long)]
    pub ell: usize,
    /// Include every node of the layer.
    #[arg(long)]
    pub nodes: bool,
}

/// Everything that determines a report.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub command: &'static str,
    pub parameters: Command,
    pub budget: Budget,
    pub format: Format,
    pub output: Option<String>,
    pub threads: Option<usize>,
}

impl RunConfig {
    pub fn from_cli(cli: &Cli) -> Self {
        RunConfig {
            command: cli.command.name(),
            parameters: cli.command.clone(),
            budget: cli.common.budget.resolve(),
            format: cli.common.format,
            output: cli.common.output.as_ref().map(|p| p.display().to_string()),
            threads: cli.common.threads,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Run(#[from] Error),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("thread pool: {0}")]
    Threads(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Run(e) => match e.kind() {
                ErrorKind::Precondition => EXIT_PRECONDITION,
                ErrorKind::Budget => EXIT_BUDGET,
            },
            CliError::Io(_) => EXIT_IO,
            CliError::Threads(_) => EXIT_PRECONDITION,
        }
    }
}

/// A result object plus its flat table.
pub struct Report {
    pub result: Value,
    pub headers: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

fn to_value(v: impl Serialize) -> Value {
    serde_json::to_value(v).expect("report types serialize to JSON")
}

fn merge(base: impl Serialize, extra: Value) -> Value {
    let mut v = to_value(base);
    if let (Value::Object(m), Value::Object(e)) = (&mut v, extra) {
        m.extend(e);
    }
    v
}

fn point_row(p: &LatticePoint) -> Vec<String> {
    p.coords().iter().map(|c| c.to_string()).collect()
}

/// Computes the report for `config` without writing anything.
pub fn execute(config: &RunConfig) -> Result<Report, CliError> {
    let b = &config.budget;
    let report = match &config.parameters {
        Command::Enumerate(a) => {
            let points = enumerate_hd_with(a.d, b)?;
            let excluded = !legendre_representable(a.d);
            Report {
                result: json!({
                    "d": a.d,
                    "count": points.len(),
                    "legendre_excluded": excluded,
                    "note": if excluded { Some("Legendre-excluded") } else { None },
                    "points": points,
                }),
                headers: vec!["x", "y", "z"],
                rows: points.iter().map(point_row).collect(),
            }
        }
        Command::Orbits(a) => {
            let points = enumerate_hd_with(a.d, b)?;
            let orbits = so3z_orbits(&points, a.even)?;
            let list: Vec<Value> = orbits
                .iter()
                .map(|o| json!({"representative": o.representative, "size": o.members.len()}))
                .collect();
            Report {
                result: json!({
                    "d": a.d,
                    "even_only": a.even,
                    "point_count": points.len(),
                    "orbit_count": orbits.len(),
                    "orbits": list,
                }),
                headers: vec!["x", "y", "z", "size"],
                rows: orbits
                    .iter()
                    .map(|o| {
                        let mut r = point_row(&o.representative);
                        r.push(o.members.len().to_string());
                        r
                    })
                    .collect(),
            }
        }
        Command::Trajectory(a) => {
            let seg = extend_trajectory(&a.start, a.len, a.d)?;
            let mut points = vec![seg.center()];
            points.extend_from_slice(seg.forward_points());
            let word = seg.forward_word().to_vec();
            Report {
                rows: points
                    .iter()
                    .enumerate()
                    .map(|(i, p)| {
                        let mut r = vec![i.to_string()];
                        r.extend(point_row(p));
                        r.push(if i == 0 { String::new() } else { word[i - 1].to_string() });
                        r
                    })
                    .collect(),
                result: json!({"d": a.d, "start": a.start, "len": a.len, "points": points, "word": word}),
                headers: vec!["i", "x", "y", "z", "letter"],
            }
        }
        Command::Period(a) => {
            let period = orbit_period_with(&a.start, a.d, b)?;
            Report {
                result: json!({"d": a.d, "start": a.start, "period": period}),
                headers: vec!["period"],
                rows: vec![vec![period.to_string()]],
            }
        }
        Command::Shadowing(a) => {
            let ys = match a.y {
                Some(y) => vec![y],
                None => enumerate_hd_with(a.d, b)?,
            };
            let checks: Vec<_> = ys
                .iter()
                .map(|y| shadowing_check(&a.x, y, a.ell, a.d).map(|s| (*y, s)))
                .collect::<crate::Result<_>>()?;
            let mismatches = checks.iter().filter(|(_, s)| s.words_agree != s.congruent).count();
            let modulus = 5u128.pow(a.ell as u32);
            Report {
                result: json!({
                    "d": a.d,
                    "x": a.x,
                    "ell": a.ell,
                    "modulus": modulus,
                    "comparisons": checks.iter().map(|(y, s)| json!({"y": y, "words_agree": s.words_agree, "congruent": s.congruent})).collect::<Vec<_>>(),
                    "words_agree_count": checks.iter().filter(|(_, s)| s.words_agree).count(),
                    "congruent_count": checks.iter().filter(|(_, s)| s.congruent).count(),
                    "mismatches": mismatches,
                }),
                headers: vec!["x", "y", "z", "words_agree", "congruent"],
                rows: checks
                    .iter()
                    .map(|(y, s)| {
                        let mut r = point_row(y);
                        r.push(s.words_agree.to_string());
                        r.push(s.congruent.to_string());
                        r
                    })
                    .collect(),
            }
        }
        Command::Sigma(a) => {
            let count = sigma_count_with(a.d, a.ell, a.q, b)?;
            let pairs = if a.pairs { Some(sigma_pairs(a.d, a.ell, a.q, b)?) } else { None };
            Report {
                result: json!({"d": a.d, "ell": a.ell, "q": a.q, "count": count, "pairs": pairs}),
                headers: vec!["count"],
                rows: vec![vec![count.to_string()]],
            }
        }
        Command::Graph(a) => {
            let g = build_graph_with(a.d, a.q, b)?;
            let export = g.export();
            Report {
                rows: export.edges.iter().map(|&(i, j, m)| vec![i.to_string(), j.to_string(), m.to_string()]).collect(),
                result: merge(
                    &export,
                    json!({
                        "vertex_count": g.vertices.len(),
                        "connected": g.graph.is_connected(),
                        "bipartite": g.graph.is_bipartite(),
                    }),
                ),
                headers: vec!["i", "j", "multiplicity"],
            }
        }
        Command::Spectrum(a) => {
            let g = build_graph_with(a.d, a.q, b)?;
            let r = adjacency_spectrum(&g.graph, b)?;
            let top = r.eigenvalues[0];
            let top_multiplicity = multiplicity(&r.eigenvalues, top, 1e-8);
            Report {
                rows: r.eigenvalues.iter().enumerate().map(|(i, l)| vec![i.to_string(), l.to_string()]).collect(),
                result: merge(&r, json!({"d": a.d, "q": a.q, "top_multiplicity": top_multiplicity})),
                headers: vec!["index", "eigenvalue"],
            }
        }
        Command::ArcSpectrum(a) => arc_spectrum(a, b)?,
        Command::WalkLd(a) => {
            let g = build_graph_with(a.d, a.q, b)?;
            let ag = ArcGraph::from_sphere_graph(&g);
            let in_b = random_subset(ag.vertex_count(), a.mu, a.seed)?;
            let mode = match a.samples {
                Some(samples) => DeviationMode::Sampled { samples, seed: a.seed },
                None => DeviationMode::Exhaustive,
            };
            let r = large_deviation_stats(&ag, &in_b, a.ell, a.epsilon, mode)?;
            Report {
                rows: vec![vec![
                    r.ell.to_string(),
                    r.violating.to_string(),
                    r.total.to_string(),
                    r.fraction_violating.to_string(),
                    r.half_width.to_string(),
                ]],
                result: merge(&r, json!({"d": a.d, "q": a.q, "seed": a.seed})),
                headers: vec!["ell", "violating", "total", "fraction_violating", "half_width"],
            }
        }
        Command::BasicLemma(a) => basic_lemma(a, b)?,
        Command::Pall(a) => {
            let count = pall_count(a.a, a.b, a.c, b)?;
            Report {
                result: json!({"a": a.a, "b": a.b, "c": a.c, "count": count}),
                headers: vec!["count"],
                rows: vec![vec![count.to_string()]],
            }
        }
        Command::ClassGroup(a) => {
            let disc = match (a.disc, a.d) {
                (Some(disc), _) => disc,
                (None, Some(d)) => field_discriminant(d)?,
                (None, None) => return Err(Error::precondition("give --disc or --d").into()),
            };
            let g = class_group(disc)?;
            let orders: Vec<u64> = g.forms.iter().map(|f| g.element_order(f)).collect::<crate::Result<_>>()?;
            Report {
                rows: g
                    .forms
                    .iter()
                    .zip(&orders)
                    .map(|(f, o)| vec![f.a.to_string(), f.b.to_string(), f.c.to_string(), o.to_string()])
                    .collect(),
                result: json!({
                    "discriminant": disc,
                    "order": g.order(),
                    "cyclic": g.is_cyclic()?,
                    "two_torsion": g.two_torsion_count()?,
                    "forms": g.forms.iter().zip(&orders).map(|(f, o)| json!({"form": f, "order": o})).collect::<Vec<_>>(),
                }),
                headers: vec!["a", "b", "c", "order"],
            }
        }
        Command::Perp(a) => {
            let s = perp_summary(a.d, b)?;
            Report {
                rows: s
                    .fibers
                    .iter()
                    .map(|(f, n)| vec![f.a.to_string(), f.b.to_string(), f.c.to_string(), n.to_string()])
                    .collect(),
                result: to_value(&s),
                headers: vec!["a", "b", "c", "fiber_size"],
            }
        }
        Command::Cardinality(a) => {
            let c = verify_cardinality(a.d, b)?;
            Report {
                rows: vec![vec![
                    c.d.to_string(),
                    c.hd.to_string(),
                    c.h.to_string(),
                    c.factor.to_string(),
                    c.relation_holds.to_string(),
                ]],
                result: to_value(&c),
                headers: vec!["d", "hd", "h", "factor", "relation_holds"],
            }
        }
        Command::DevQ(a) => {
            let s = dev_mod_q(a.d, a.q, b)?;
            Report {
                rows: s
                    .cells
                    .iter()
                    .map(|c| {
                        let mut r: Vec<String> = c.residue.iter().map(|x| x.to_string()).collect();
                        r.push(c.count.to_string());
                        r.push(c.deviation.to_string());
                        r
                    })
                    .collect(),
                result: merge(
                    &s,
                    json!({
                        "delta": a.delta,
                        "fraction_above": s.fraction_above(a.delta),
                        "bookkeeping_exact": s.bookkeeping_exact(),
                    }),
                ),
                headers: vec!["x", "y", "z", "count", "deviation"],
            }
        }
        Command::Caps(a) => {
            let s = cap_stats(a.d, a.rho, a.centers, a.seed, a.eta, b)?;
            Report {
                rows: s
                    .samples
                    .iter()
                    .map(|c| {
                        let mut r: Vec<String> = c.center.iter().map(|x| x.to_string()).collect();
                        r.push(c.deviation.to_string());
                        r
                    })
                    .collect(),
                result: to_value(&s),
                headers: vec!["cx", "cy", "cz", "deviation"],
            }
        }
        Command::Hecke(a) => {
            let layer = hecke_layer(&a.start, a.ell, b)?;
            let caps = hecke_equidist_check(&a.start, a.ell, &standard_caps(), b)?;
            let max = caps.iter().map(|c| c.discrepancy).fold(0.0, f64::max);
            let mean = caps.iter().map(|c| c.discrepancy).sum::<f64>() / caps.len() as f64;
            Report {
                rows: caps
                    .iter()
                    .map(|c| {
                        let Cap { center, rho } = c.cap;
                        let mut r: Vec<String> = center.iter().map(|x| x.to_string()).collect();
                        r.extend([rho, c.fraction, c.area, c.discrepancy].iter().map(|x| x.to_string()));
                        r
                    })
                    .collect(),
                result: json!({
                    "root": layer.root,
                    "ell": layer.ell,
                    "norm": layer.norm,
                    "node_count": layer.nodes.len(),
                    "distinct_vectors": layer.distinct_vectors,
                    "caps": caps,
                    "max_discrepancy": max,
                    "mean_discrepancy": mean,
                    "nodes": if a.nodes { Some(&layer.nodes) } else { None },
                }),
                headers: vec!["cx", "cy", "cz", "rho", "fraction", "area", "discrepancy"],
            }
        }
    };
    Ok(report)
}

fn arc_spectrum(a: &ArcSpectrumArgs, b: &Budget) -> Result<Report, CliError> {
    if a.k < 2 {
        return Err(Error::precondition("--k must be at least 2").into());
    }
    let (base, ag, label) = match (a.d, a.q, a.complete) {
        (Some(d), Some(q), _) => {
            let g = build_graph_with(d, q, b)?;
            let ag = ArcGraph::from_sphere_graph(&g);
            (g.graph, ag, json!({"d": d, "q": q}))
        }
        (_, _, Some(n)) => {
            let g = Multigraph::complete(n);
            let ag = ArcGraph::from_multigraph(&g)?;
            (g, ag, json!({"complete": n}))
        }
        _ => return Err(Error::precondition("give --d and --q, or --complete").into()),
    };
    let spec = adjacency_spectrum(&base, b)?;
    let degree = ag.base_degree();
    let norm_eigs: Vec<f64> = spec.eigenvalues.iter().map(|l| l / degree as f64).collect();
    let traces = ag.power_traces(a.k, b)?;
    let predicted = predicted_arc_spectrum(&norm_eigs, ag.vertex_count(), ag.arc_count(), degree, traces[0], traces[1])?;
    let predicted_traces: Vec<f64> = (1..=a.k).map(|k| predicted.power_sum(k)).collect();
    let discrepancy = traces
        .iter()
        .zip(&predicted_traces)
        .map(|(t, p)| (t - p).abs())
        .fold(0.0, f64::max);
    Ok(Report {
        rows: (0..a.k)
            .map(|i| {
                vec![
                    (i + 1).to_string(),
                    traces[i].to_string(),
                    predicted_traces[i].to_string(),
                    (traces[i] - predicted_traces[i]).abs().to_string(),
                ]
            })
            .collect(),
        result: json!({
            "graph": label,
            "vertex_count": ag.vertex_count(),
            "base_degree": degree,
            "arc_count": ag.arc_count(),
            "base_second_largest_abs": spec.second_largest_abs,
            "predicted": predicted,
            "nontrivial_radius": predicted.nontrivial_radius(),
            "ramanujan_radius": 1.0 / ((degree - 1) as f64).sqrt(),
            "traces": traces,
            "predicted_traces": predicted_traces,
            "discrepancy": discrepancy,
        }),
        headers: vec!["k", "trace", "predicted", "difference"],
    })
}

fn basic_lemma(a: &BasicLemmaArgs, b: &Budget) -> Result<Report, CliError> {
    if let Some(e) = a.e {
        let dots = dot_pair_count(a.d, e, b)?;
        let di = i64::try_from(a.d).map_err(|_| Error::Overflow("d"))?;
        let pall = if e.unsigned_abs() == a.d { None } else { Some(pall_count(di, 2 * e, di, b)?) };
        return Ok(Report {
            result: json!({
                "d": a.d,
                "e": e,
                "dot_pair_count": dots,
                "pall_count": pall,
                "counts_agree": pall.map(|p| p == dots),
            }),
            headers: vec!["e", "dot_pair_count"],
            rows: vec![vec![e.to_string(), dots.to_string()]],
        });
    }
    let hd = count_hd_with(a.d, b)? as u128;
    let dist = dot_product_distribution(a.d, b)?;
    let total: u128 = dist.values().sum();
    let di = a.d as i64;
    let at = |e: i64| dist.get(&e).copied().unwrap_or(0);
    Ok(Report {
        rows: dist.iter().map(|(e, n)| vec![e.to_string(), n.to_string()]).collect(),
        result: json!({
            "d": a.d,
            "hd": hd,
            "distribution": dist.iter().map(|(e, n)| json!({"e": e, "count": n})).collect::<Vec<_>>(),
            "total": total,
            "total_is_hd_squared": total == hd * hd,
            "diagonal_matches": at(di) == hd && at(-di) == hd,
        }),
        headers: vec!["e", "dot_pair_count"],
    })
}

/// Serializes a report in the configured format.
pub fn render(config: &RunConfig, report: &Report) -> Result<Vec<u8>, CliError> {
    match config.format {
        Format::Json => {
            let envelope = json!({
                "schema_version": SCHEMA_VERSION,
                "config": config,
                "result": report.result,
            });
            let mut out = serde_json::to_vec_pretty(&envelope).expect("JSON values serialize");
            out.push(b'\n');
            Ok(out)
        }
        Format::Csv => {
            let mut out = Vec::new();
            writeln!(out, "# {}", serde_json::to_string(config).expect("configs serialize"))?;
            {
                let mut w = csv::Writer::from_writer(&mut out);
                w.write_record(&report.headers).map_err(std::io::Error::from)?;
                for r in &report.rows {
                    w.write_record(r).map_err(std::io::Error::from)?;
                }
                w.flush()?;
            }
            Ok(out)
        }
    }
}

/// Runs `config`, honoring the thread cap, and returns the rendered bytes.
pub fn run(config: &RunConfig) -> Result<Vec<u8>, CliError> {
    let work = || execute(config).and_then(|r| render(config, &r));
    match config.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Threads(e.to_string()))?
            .install(work),
        None => work(),
    }
}

/// Parses `args`, runs, and writes the report; returns the process exit code.
pub fn main_with<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let _ = if code == 0 { stdout.write_all(text.as_bytes()) } else { stderr.write_all(text.as_bytes()) };
            return code;
        }
    };
    let config = RunConfig::from_cli(&cli);
    let result = run(&config).and_then(|bytes| match &cli.common.output {
        Some(path) => std::fs::write(path, bytes).map_err(CliError::from),
        None => stdout.write_all(&bytes).map_err(CliError::from),
    });
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}
