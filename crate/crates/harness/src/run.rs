//! Degree sweeps: one [`ResultRow`] per configured degree.

use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use nearbest::constructor::ConstructionMeta;
use nearbest::kernels::wedge_exponent;
use nearbest::{Complex, MinimaxResult, NearBestPolynomial, Scenario};

use crate::config::{CompactSpec, ExperimentConfig, ModeSpec};

/// Version of the CSV header and the JSON layout.
pub const SCHEMA_VERSION: u32 = 1;

/// Safety factor of the compact-set damping bound.
pub const COMPACT_SAFETY: f64 = 10.0;

#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    /// Record wall-clock times; off by default so reruns are byte-identical.
    pub timings: bool,
}

/// Error and damping record on one compact set.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct CompactResult {
    pub name: String,
    pub points: usize,
    pub sup_err: f64,
    /// `max |w(z, ζ)|` over `z ∈ E` and all quadrature nodes.
    pub q_measured: f64,
    /// `max q^m` over rays.
    pub damping_measured: f64,
    /// Lemniscate mode: `d(E) = min_E (1 − |P(z)|/R^N)`.
    pub d_e: Option<f64>,
    /// Damping factor used by the bound: `(1 − d(E))^m` or the measured one.
    pub damping_bound: f64,
    /// `safety · (‖f − P‖_L · damping_bound + h₂ error)`.
    pub bound: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct RayDetail {
    pub singularity: usize,
    pub side: usize,
    pub theta: f64,
    pub orientation: f64,
    pub d_split: f64,
    pub reach: f64,
    pub panels: usize,
    pub inner_nodes: usize,
    pub outer_nodes: usize,
    pub damping_kind: &'static str,
    pub m: usize,
    pub damping_degree: usize,
    pub kappa: Option<usize>,
    pub beta: Option<f64>,
    pub zeta0: Option<f64>,
    pub q_degree: Option<usize>,
    pub degree_bound: usize,
    pub ratio_max: f64,
    pub damping_max: f64,
    pub classification: Option<ClassificationDetail>,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct ClassificationDetail {
    pub a1: usize,
    pub a2: usize,
    pub a3: usize,
    pub b1: usize,
    pub b2: usize,
    pub max_arc_angle: f64,
    pub max_ray_angle: f64,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct ConstructionDetail {
    pub degree_bound: usize,
    pub exact_degree: Option<usize>,
    pub projection_residual: f64,
    pub h2_degree: usize,
    pub h2_error: f64,
    pub quadrature_change: f64,
    pub n_min: usize,
    pub rays: Vec<RayDetail>,
    pub compact: Vec<CompactResult>,
}

/// One degree of a sweep. Missing values are `None`.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct ResultRow {
    pub n: usize,
    pub e_n: Option<f64>,
    pub e_n_lower: Option<f64>,
    pub bracket: Option<f64>,
    pub lawson_iterations: Option<usize>,
    pub lawson_converged: Option<bool>,
    pub sup_l_err: Option<f64>,
    pub sup_e_err: Vec<Option<f64>>,
    pub d_n: Option<f64>,
    pub m_damping: Option<usize>,
    pub near_best_ratio: Option<f64>,
    pub wall_ms: u64,
    /// `ok`, or the first failure message.
    pub status: String,
    pub construction: Option<ConstructionDetail>,
}

impl ResultRow {
    pub fn is_ok(&self) -> bool {
        self.status == "ok"
    }
}

/// Node indices of each compact set; arc endpoints are never included.
pub fn compact_indices(scenario: &Scenario, compact: &[CompactSpec]) -> Vec<Vec<usize>> {
    let params = scenario.node_params();
    let t_max = scenario.f.arc().t_max();
    compact
        .iter()
        .map(|e| {
            params
                .iter()
                .enumerate()
                .filter(|&(_, &t)| t > 0.0 && t < t_max && e.contains(t))
                .map(|(k, _)| k)
                .collect()
        })
        .collect()
}

pub fn build_scenario(config: &ExperimentConfig) -> nearbest::Result<Scenario> {
    Scenario::new(config.function()?, config.core_mode()?, config.options())
}

/// Sweep over the configured degrees, in parallel across degrees; rows come
/// back in degree order.
pub fn run_scenario(config: &ExperimentConfig, scenario: &Scenario, options: RunOptions) -> Vec<ResultRow> {
    let sets = compact_indices(scenario, &config.compact);
    config.degrees.par_iter().map(|&n| run_row(config, scenario, &sets, n, options)).collect()
}

/// Sweep of `E_n` only.
pub fn run_entable(config: &ExperimentConfig, scenario: &Scenario, options: RunOptions) -> Vec<ResultRow> {
    config
        .degrees
        .par_iter()
        .map(|&n| {
            let start = Instant::now();
            let mut row = empty_row(n, config.compact.len());
            fill_best(config, scenario, &mut row);
            row.d_n = first_dn(scenario, n);
            if options.timings {
                row.wall_ms = start.elapsed().as_millis() as u64;
            }
            row
        })
        .collect()
}

fn empty_row(n: usize, compact: usize) -> ResultRow {
    ResultRow {
        n,
        e_n: None,
        e_n_lower: None,
        bracket: None,
        lawson_iterations: None,
        lawson_converged: None,
        sup_l_err: None,
        sup_e_err: vec![None; compact],
        d_n: None,
        m_damping: None,
        near_best_ratio: None,
        wall_ms: 0,
        status: "ok".into(),
        construction: None,
    }
}

fn fail(row: &mut ResultRow, message: String) {
    if row.is_ok() {
        row.status = message;
    }
}

fn fill_best(config: &ExperimentConfig, scenario: &Scenario, row: &mut ResultRow) -> Option<MinimaxResult> {
    match scenario.problem.solve(row.n, config.tol, config.max_iter) {
        Ok(r) => {
            row.e_n = Some(r.e_n);
            row.e_n_lower = Some(r.lower);
            row.bracket = Some(r.bracket_width());
            row.lawson_iterations = Some(r.iterations);
            row.lawson_converged = Some(r.converged);
            Some(r)
        }
        Err(e) => {
            fail(row, format!("minimax: {e}"));
            None
        }
    }
}

/// `d_n` of the first singular point with a jump, else of the first one.
fn first_dn(scenario: &Scenario, n: usize) -> Option<f64> {
    let configs = &scenario.split.configs;
    let j = configs.iter().position(|c| c.has_jump()).or(if configs.is_empty() { None } else { Some(0) })?;
    scenario.d_n(j, n).ok().map(|d| d * scenario.scale)
}

fn run_row(config: &ExperimentConfig, scenario: &Scenario, sets: &[Vec<usize>], n: usize, options: RunOptions) -> ResultRow {
    let start = Instant::now();
    let mut row = empty_row(n, sets.len());
    let best = fill_best(config, scenario, &mut row);
    row.d_n = first_dn(scenario, n);
    if !matches!(config.mode, ModeSpec::BestApprox) {
        match scenario.construct(n) {
            Ok(p) => record_construction(config, scenario, sets, &p, &mut row),
            Err(e) => fail(&mut row, format!("construction: {e}")),
        }
    } else {
        // the best approximant stands in for P_n
        if let Some(r) = best {
            let errs = &r.residual;
            row.sup_l_err = Some(errs.iter().copied().fold(0.0, f64::max));
            for (k, set) in sets.iter().enumerate() {
                row.sup_e_err[k] = Some(set.iter().map(|&i| errs[i]).fold(0.0, f64::max));
            }
            row.near_best_ratio = ratio(row.sup_l_err, row.e_n);
        }
    }
    if options.timings {
        row.wall_ms = start.elapsed().as_millis() as u64;
    }
    row
}

fn ratio(num: Option<f64>, den: Option<f64>) -> Option<f64> {
    match (num, den) {
        (Some(a), Some(b)) if b > 0.0 => Some(a / b),
        _ => None,
    }
}

fn record_construction(
    config: &ExperimentConfig,
    scenario: &Scenario,
    sets: &[Vec<usize>],
    p: &NearBestPolynomial,
    row: &mut ResultRow,
) {
    let errs = scenario.error_profile(p);
    let err_l = errs.iter().copied().fold(0.0, f64::max);
    row.sup_l_err = Some(err_l);
    row.near_best_ratio = ratio(row.sup_l_err, row.e_n);
    let meta: &ConstructionMeta = p.meta.as_ref().expect("constructions carry metadata");
    let rays: Vec<RayDetail> = meta
        .singularities
        .iter()
        .enumerate()
        .flat_map(|(j, s)| s.rays.iter().enumerate().map(move |(i, r)| (j, i, r)))
        .map(|(j, i, r)| RayDetail {
            singularity: j,
            side: i + 1,
            theta: r.theta,
            orientation: r.orientation,
            d_split: r.d_split,
            reach: r.reach,
            panels: r.panels,
            inner_nodes: r.inner_nodes,
            outer_nodes: r.outer_nodes,
            damping_kind: r.damping.kind,
            m: r.damping.m,
            damping_degree: r.damping.degree,
            kappa: r.damping.kappa,
            beta: r.damping.beta,
            zeta0: r.damping.zeta0,
            q_degree: r.damping.q_degree,
            degree_bound: r.degree_bound,
            ratio_max: r.ratio_max,
            damping_max: r.damping_max,
            classification: r.classification.as_ref().map(|c| ClassificationDetail {
                a1: c.a1,
                a2: c.a2,
                a3: c.a3,
                b1: c.b1,
                b2: c.b2,
                max_arc_angle: c.max_arc_angle,
                max_ray_angle: c.max_ray_angle,
            }),
        })
        .collect();
    row.m_damping = rays.iter().map(|r| r.m).max();

    let points = scenario.node_points();
    let mut compact = Vec::new();
    for (k, (set, spec)) in sets.iter().zip(&config.compact).enumerate() {
        let sup_err = set.iter().map(|&i| errs[i]).fold(0.0, f64::max);
        row.sup_e_err[k] = Some(sup_err);
        let e_points: Vec<Complex> = set.iter().map(|&i| points[i]).collect();
        let profile = scenario.damping_profile(p, &e_points).unwrap_or_default();
        let q_measured = profile.iter().map(|&(_, q)| q).fold(0.0, f64::max);
        let damping_measured = profile.iter().map(|&(m, q)| q.powi(m as i32)).fold(0.0, f64::max);
        let d_e = match &scenario.mode {
            nearbest::Mode::Theorem2 { lemniscate } => {
                let internal: Vec<Complex> = e_points.iter().map(|z| z / scenario.scale).collect();
                lemniscate.d_of_e(&internal).ok()
            }
            _ => None,
        };
        let m = row.m_damping.unwrap_or(0) as i32;
        let damping_bound = match d_e {
            Some(d) => (1.0 - d).powi(m),
            None => damping_measured,
        };
        let bound = COMPACT_SAFETY * (err_l * damping_bound + meta.h2_error);
        compact.push(CompactResult {
            name: spec.name.clone(),
            points: set.len(),
            sup_err,
            q_measured,
            damping_measured,
            d_e,
            damping_bound,
            bound,
            holds: sup_err <= bound,
        });
    }
    row.construction = Some(ConstructionDetail {
        degree_bound: meta.degree_bound,
        exact_degree: meta.exact_degree,
        projection_residual: meta.projection_residual,
        h2_degree: meta.h2_degree,
        h2_error: meta.h2_error,
        quadrature_change: meta.quadrature_change,
        n_min: meta.n_min,
        rays,
        compact,
    });
}

/// Fixed CSV header for a run with the given compact-set names.
pub fn csv_header(compact: &[CompactSpec]) -> Vec<String> {
    let mut h: Vec<String> = ["n", "E_n", "E_n_lower", "sup_L_err"].iter().map(|s| s.to_string()).collect();
    h.extend(compact.iter().map(|c| format!("sup_{}_err", c.name)));
    h.extend(["d_n", "m_damping", "near_best_ratio", "wall_ms", "status"].iter().map(|s| s.to_string()));
    h
}

fn num(v: Option<f64>) -> String {
    v.map(|x| format!("{x:e}")).unwrap_or_default()
}

/// Run table as CSV text; floats use the shortest round-trip form.
pub fn rows_to_csv(compact: &[CompactSpec], rows: &[ResultRow]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(csv_header(compact)).expect("in-memory write");
    for r in rows {
        let mut rec = vec![r.n.to_string(), num(r.e_n), num(r.e_n_lower), num(r.sup_l_err)];
        rec.extend(r.sup_e_err.iter().map(|&v| num(v)));
        rec.push(num(r.d_n));
        rec.push(r.m_damping.map(|m| m.to_string()).unwrap_or_default());
        rec.push(num(r.near_best_ratio));
        rec.push(r.wall_ms.to_string());
        rec.push(r.status.clone());
        w.write_record(&rec).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 csv")
}

/// `E_n` table as CSV text.
pub fn entable_to_csv(rows: &[ResultRow]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["n", "E_n", "E_n_lower", "bracket", "iterations", "converged", "d_n", "wall_ms", "status"])
        .expect("in-memory write");
    for r in rows {
        w.write_record([
            r.n.to_string(),
            num(r.e_n),
            num(r.e_n_lower),
            num(r.bracket),
            r.lawson_iterations.map(|v| v.to_string()).unwrap_or_default(),
            r.lawson_converged.map(|v| v.to_string()).unwrap_or_default(),
            num(r.d_n),
            r.wall_ms.to_string(),
            r.status.clone(),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 csv")
}

#[derive(Debug, Serialize)]
struct RunJson<'a> {
    schema_version: u32,
    scenario: ScenarioJson,
    compact: Vec<CompactJson<'a>>,
    rows: &'a [ResultRow],
}

#[derive(Debug, Serialize)]
struct ScenarioJson {
    name: String,
    mode: &'static str,
    degrees: Vec<usize>,
    sigma: Option<f64>,
    lemniscate: Option<(usize, f64)>,
    singular: Vec<f64>,
    branches: Vec<String>,
    tol: f64,
    max_iter: usize,
    order: usize,
    scale: f64,
    /// Wedge mode: parameters per singular point and side.
    wedges: Vec<WedgeJson>,
    /// Nodes: uniform in arclength plus geometric clusters at the singular
    /// points; no random sampling is used anywhere.
    nodes: NodesJson,
}

#[derive(Debug, Serialize)]
struct WedgeJson {
    singularity: usize,
    side: usize,
    kappa: usize,
    beta: f64,
    zeta0: f64,
    alpha: f64,
    alpha_r_squared: f64,
    n_min: Option<usize>,
}

#[derive(Debug, Serialize)]
struct NodesJson {
    total: usize,
    base: usize,
    clustered: usize,
}

#[derive(Debug, Serialize)]
struct CompactJson<'a> {
    name: &'a str,
    intervals: &'a [(f64, f64)],
    points: usize,
}

/// Full run record as pretty JSON.
pub fn rows_to_json(config: &ExperimentConfig, scenario: &Scenario, rows: &[ResultRow]) -> String {
    let sets = compact_indices(scenario, &config.compact);
    let nodes = &scenario.problem.nodes;
    let doc = RunJson {
        schema_version: SCHEMA_VERSION,
        scenario: ScenarioJson {
            name: config.name.clone(),
            mode: config.mode.name(),
            degrees: config.degrees.clone(),
            sigma: match config.mode {
                ModeSpec::Theorem1 { sigma } => Some(sigma),
                _ => None,
            },
            lemniscate: match config.mode {
                ModeSpec::Theorem2 { n, r } => Some((n, r)),
                _ => None,
            },
            singular: config.singular.clone(),
            branches: config.branches.iter().map(|b| b.source.clone()).collect(),
            tol: config.tol,
            max_iter: config.max_iter,
            order: config.order,
            scale: scenario.scale,
            wedges: scenario
                .wedges
                .iter()
                .enumerate()
                .flat_map(|(j, pair)| pair.iter().enumerate().map(move |(i, w)| (j, i, w)))
                .map(|(j, i, w)| WedgeJson {
                    singularity: j,
                    side: i + 1,
                    kappa: w.params.kappa,
                    beta: w.params.beta,
                    zeta0: w.params.zeta0,
                    alpha: w.params.alpha,
                    alpha_r_squared: w.rate.r_squared,
                    n_min: (1..=1usize << 24).find(|&k| wedge_exponent(k, w.params.beta, w.params.kappa) >= 1),
                })
                .collect(),
            nodes: NodesJson { total: nodes.len(), base: nodes.base_count, clustered: nodes.added },
        },
        compact: config
            .compact
            .iter()
            .zip(&sets)
            .map(|(c, s)| CompactJson { name: &c.name, intervals: &c.intervals, points: s.len() })
            .collect(),
        rows,
    };
    serde_json::to_string_pretty(&doc).expect("serializable")
}

#[derive(Debug, Serialize)]
struct PolynomialJson<'a> {
    schema_version: u32,
    scenario: &'a str,
    mode: &'static str,
    n: usize,
    degree: Option<usize>,
    /// Monomial coefficients `[re, im]`, constant term first.
    coefficients: Vec<[f64; 2]>,
    construction: Option<ConstructionDetail>,
}

/// One constructed polynomial with its metadata.
pub fn polynomial_json(config: &ExperimentConfig, scenario: &Scenario, p: &NearBestPolynomial) -> String {
    let mut row = empty_row(p.n, config.compact.len());
    let sets = compact_indices(scenario, &config.compact);
    record_construction(config, scenario, &sets, p, &mut row);
    let doc = PolynomialJson {
        schema_version: SCHEMA_VERSION,
        scenario: &config.name,
        mode: config.mode.name(),
        n: p.n,
        degree: p.degree(),
        coefficients: p.monomial_coefficients().iter().map(|c| [c.re, c.im]).collect(),
        construction: row.construction,
    };
    serde_json::to_string_pretty(&doc).expect("serializable")
}
