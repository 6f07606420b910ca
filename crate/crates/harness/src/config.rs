//! Experiment configuration: a flat `key = value` text format with
//! `[section]` headers; `[piece]`, `[branch]` and `[compact]` repeat.
//!
//! ```text
//! [scenario]
//! name = corner
//! mode = theorem2            # bestapprox | theorem1 | theorem2
//! degrees = 16, 32, 64
//! singular = 1               # arc parameters of the interior singular points
//!
//! [lemniscate]
//! n = 4
//! r = 1
//!
//! [piece]
//! kind = segment
//! from = 1
//! to = 0
//!
//! [branch]
//! expr = z^2 - exp(z)/2
//! ```
//!
//! See `docs/config.md` for every key.

use std::fmt;
use std::path::Path;
use std::sync::Arc as Shared;

use nearbest::constructor::{Mode, ScenarioOptions, DEFAULT_ORDER};
use nearbest::geometry::{Arc, Branch, Lemniscate, Piece, PiecewiseAnalyticFunction};
use nearbest::Complex;

use crate::expr::{parse_constant, parse_real, Expr};

/// Error with the 1-based line it refers to; line 0 means the file as a whole.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub line: usize,
    pub message: String,
}

impl ConfigError {
    fn at(line: usize, message: impl Into<String>) -> Self {
        Self { line, message: message.into() }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line == 0 {
            write!(f, "config: {}", self.message)
        } else {
            write!(f, "line {}: {}", self.line, self.message)
        }
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModeSpec {
    BestApprox,
    Theorem1 { sigma: f64 },
    Theorem2 { n: usize, r: f64 },
}

impl ModeSpec {
    pub fn name(&self) -> &'static str {
        match self {
            ModeSpec::BestApprox => "bestapprox",
            ModeSpec::Theorem1 { .. } => "theorem1",
            ModeSpec::Theorem2 { .. } => "theorem2",
        }
    }
}

#[derive(Debug, Clone)]
pub struct BranchSpec {
    pub source: String,
    pub expr: Shared<Expr>,
    pub center: Complex,
    pub radius: f64,
}

/// Union of closed arc-parameter intervals.
#[derive(Debug, Clone, PartialEq)]
pub struct CompactSpec {
    pub name: String,
    pub intervals: Vec<(f64, f64)>,
}

impl CompactSpec {
    pub fn contains(&self, t: f64) -> bool {
        self.intervals.iter().any(|&(a, b)| t >= a && t <= b)
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub name: String,
    pub mode: ModeSpec,
    pub degrees: Vec<usize>,
    pub pieces: Vec<Piece<f64>>,
    pub singular: Vec<f64>,
    pub branches: Vec<BranchSpec>,
    pub compact: Vec<CompactSpec>,
    /// Lawson relative-change tolerance.
    pub tol: f64,
    pub max_iter: usize,
    /// Gauss–Legendre nodes per panel.
    pub order: usize,
    pub base_nodes: usize,
    pub map_accuracy: f64,
    pub out: Option<String>,
}

/// Default radius of a branch's analyticity disk.
pub const DEFAULT_BRANCH_RADIUS: f64 = 1e3;
/// Smallest allowed distance, in arc parameter, between a compact set and a
/// singular parameter.
pub const COMPACT_MARGIN: f64 = 1e-6;

struct Entry {
    key: String,
    value: String,
    line: usize,
}

struct Section {
    name: String,
    line: usize,
    entries: Vec<Entry>,
}

impl Section {
    fn get(&self, key: &str) -> Option<&Entry> {
        self.entries.iter().find(|e| e.key == key)
    }

    fn require(&self, key: &str) -> Result<&Entry, ConfigError> {
        self.get(key)
            .ok_or_else(|| ConfigError::at(self.line, format!("[{}] is missing the key '{key}'", self.name)))
    }

    fn check_keys(&self, allowed: &[&str]) -> Result<(), ConfigError> {
        for e in &self.entries {
            if !allowed.contains(&e.key.as_str()) {
                return Err(ConfigError::at(
                    e.line,
                    format!("unknown key '{}' in [{}] (expected one of: {})", e.key, self.name, allowed.join(", ")),
                ));
            }
        }
        Ok(())
    }
}

fn split_sections(text: &str) -> Result<Vec<Section>, ConfigError> {
    let mut sections: Vec<Section> = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let content = raw.split(['#', ';']).next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(rest) = content.strip_prefix('[') {
            let Some(name) = rest.strip_suffix(']') else {
                return Err(ConfigError::at(line, "section header is missing ']'"));
            };
            let name = name.trim();
            if !["scenario", "lemniscate", "piece", "branch", "compact"].contains(&name) {
                return Err(ConfigError::at(line, format!("unknown section [{name}]")));
            }
            if ["scenario", "lemniscate"].contains(&name) && sections.iter().any(|s| s.name == name) {
                return Err(ConfigError::at(line, format!("section [{name}] appears twice")));
            }
            sections.push(Section { name: name.to_string(), line, entries: Vec::new() });
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            return Err(ConfigError::at(line, format!("expected 'key = value', found '{content}'")));
        };
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() {
            return Err(ConfigError::at(line, "empty key"));
        }
        if value.is_empty() {
            return Err(ConfigError::at(line, format!("key '{key}' has no value")));
        }
        let Some(section) = sections.last_mut() else {
            return Err(ConfigError::at(line, "key outside any section"));
        };
        if section.get(key).is_some() {
            return Err(ConfigError::at(line, format!("key '{key}' repeated in [{}]", section.name)));
        }
        section.entries.push(Entry { key: key.to_string(), value: value.to_string(), line });
    }
    Ok(sections)
}

fn real(e: &Entry) -> Result<f64, ConfigError> {
    parse_real(&e.value).map_err(|err| ConfigError::at(e.line, format!("{}: {err}", e.key)))
}

fn complex(e: &Entry) -> Result<Complex, ConfigError> {
    parse_constant(&e.value).map_err(|err| ConfigError::at(e.line, format!("{}: {err}", e.key)))
}

fn positive_int(e: &Entry) -> Result<usize, ConfigError> {
    match e.value.parse::<usize>() {
        Ok(v) if v > 0 => Ok(v),
        _ => Err(ConfigError::at(e.line, format!("{} must be a positive integer, found '{}'", e.key, e.value))),
    }
}

fn real_list(e: &Entry) -> Result<Vec<f64>, ConfigError> {
    e.value.split(',').map(|s| parse_real(s.trim()).map_err(|err| ConfigError::at(e.line, format!("{}: {err}", e.key)))).collect()
}

fn valid_name(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::at(0, format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let sections = split_sections(text)?;
        let scenario = sections
            .iter()
            .find(|s| s.name == "scenario")
            .ok_or_else(|| ConfigError::at(0, "missing [scenario] section"))?;
        scenario.check_keys(&[
            "name", "mode", "degrees", "singular", "sigma", "tol", "max_iter", "panels", "base_nodes", "map_accuracy", "out",
        ])?;

        let name = match scenario.get("name") {
            Some(e) if valid_name(&e.value) => e.value.clone(),
            Some(e) => return Err(ConfigError::at(e.line, "name may contain only letters, digits, '_' and '-'")),
            None => "scenario".to_string(),
        };

        let degrees_entry = scenario.require("degrees")?;
        let degrees: Vec<usize> = degrees_entry
            .value
            .split(',')
            .map(|s| s.trim().parse::<usize>())
            .collect::<Result<_, _>>()
            .map_err(|_| ConfigError::at(degrees_entry.line, "degrees must be a comma-separated list of integers"))?;
        if degrees.is_empty() || degrees.windows(2).any(|w| w[0] >= w[1]) {
            return Err(ConfigError::at(degrees_entry.line, "degrees must be strictly ascending"));
        }

        let mode_entry = scenario.require("mode")?;
        let lemniscate = sections.iter().find(|s| s.name == "lemniscate");
        let mode = match mode_entry.value.as_str() {
            "bestapprox" => ModeSpec::BestApprox,
            "theorem1" => {
                let e = scenario
                    .require("sigma")
                    .map_err(|_| ConfigError::at(mode_entry.line, "mode theorem1 needs 'sigma' in [scenario]"))?;
                let sigma = real(e)?;
                if !(sigma > 0.0 && sigma < 1.0) {
                    return Err(ConfigError::at(e.line, "sigma must lie in (0, 1)"));
                }
                ModeSpec::Theorem1 { sigma }
            }
            "theorem2" => {
                let lem = lemniscate
                    .ok_or_else(|| ConfigError::at(mode_entry.line, "mode theorem2 needs a [lemniscate] section"))?;
                lem.check_keys(&["n", "r"])?;
                let n = positive_int(lem.require("n")?)?;
                let r_entry = lem.require("r")?;
                let r = real(r_entry)?;
                if !(r > 0.0) {
                    return Err(ConfigError::at(r_entry.line, "r must be positive"));
                }
                ModeSpec::Theorem2 { n, r }
            }
            other => {
                return Err(ConfigError::at(
                    mode_entry.line,
                    format!("unknown mode '{other}' (expected bestapprox, theorem1 or theorem2)"),
                ))
            }
        };
        if let (Some(lem), false) = (lemniscate, matches!(mode, ModeSpec::Theorem2 { .. })) {
            return Err(ConfigError::at(lem.line, "[lemniscate] is only used by mode theorem2"));
        }
        if let (Some(e), false) = (scenario.get("sigma"), matches!(mode, ModeSpec::Theorem1 { .. })) {
            return Err(ConfigError::at(e.line, "sigma is only used by mode theorem1"));
        }

        let mut pieces = Vec::new();
        for s in sections.iter().filter(|s| s.name == "piece") {
            pieces.push(parse_piece(s)?);
        }
        if pieces.is_empty() {
            return Err(ConfigError::at(0, "at least one [piece] is required"));
        }
        let t_max = pieces.len() as f64;

        let mut branches = Vec::new();
        for s in sections.iter().filter(|s| s.name == "branch") {
            s.check_keys(&["expr", "center", "radius"])?;
            let e = s.require("expr")?;
            let expr = Expr::parse(&e.value).map_err(|err| ConfigError::at(e.line, format!("expr: {err}")))?;
            let center = s.get("center").map(complex).transpose()?.unwrap_or_default();
            let radius = match s.get("radius") {
                Some(r) => {
                    let v = real(r)?;
                    if !(v > 0.0) {
                        return Err(ConfigError::at(r.line, "radius must be positive"));
                    }
                    v
                }
                None => DEFAULT_BRANCH_RADIUS,
            };
            branches.push(BranchSpec { source: e.value.clone(), expr: Shared::new(expr), center, radius });
        }
        if branches.is_empty() {
            return Err(ConfigError::at(0, "at least one [branch] is required"));
        }

        let singular = match scenario.get("singular") {
            Some(e) => {
                let v = real_list(e)?;
                if v.windows(2).any(|w| w[0] >= w[1]) || v.iter().any(|&t| !(t > 0.0 && t < t_max)) {
                    return Err(ConfigError::at(
                        e.line,
                        format!("singular parameters must be strictly ascending and inside (0, {t_max})"),
                    ));
                }
                v
            }
            None => Vec::new(),
        };
        if branches.len() != singular.len() + 1 {
            let line = scenario.get("singular").map_or(scenario.line, |e| e.line);
            return Err(ConfigError::at(
                line,
                format!("{} singular point(s) need {} [branch] sections, found {}", singular.len(), singular.len() + 1, branches.len()),
            ));
        }

        let mut compact: Vec<CompactSpec> = Vec::new();
        for (k, s) in sections.iter().filter(|s| s.name == "compact").enumerate() {
            s.check_keys(&["name", "intervals"])?;
            let name = match s.get("name") {
                Some(e) if valid_name(&e.value) => e.value.clone(),
                Some(e) => return Err(ConfigError::at(e.line, "name may contain only letters, digits, '_' and '-'")),
                None => format!("E{}", k + 1),
            };
            if compact.iter().any(|c| c.name == name) {
                return Err(ConfigError::at(s.line, format!("compact set name '{name}' is used twice")));
            }
            let e = s.require("intervals")?;
            let mut intervals = Vec::new();
            for part in e.value.split(',') {
                let Some((a, b)) = part.split_once(':') else {
                    return Err(ConfigError::at(e.line, format!("interval '{}' must be written 'a:b'", part.trim())));
                };
                let a = parse_real(a.trim()).map_err(|err| ConfigError::at(e.line, format!("intervals: {err}")))?;
                let b = parse_real(b.trim()).map_err(|err| ConfigError::at(e.line, format!("intervals: {err}")))?;
                if !(a < b && a >= 0.0 && b <= t_max) {
                    return Err(ConfigError::at(e.line, format!("interval {a}:{b} must satisfy 0 ≤ a < b ≤ {t_max}")));
                }
                for &t in &singular {
                    let gap = if t < a { a - t } else if t > b { t - b } else { 0.0 };
                    if gap < COMPACT_MARGIN {
                        return Err(ConfigError::at(
                            e.line,
                            format!("interval {a}:{b} must keep a positive margin from the singular parameter {t}"),
                        ));
                    }
                }
                intervals.push((a, b));
            }
            compact.push(CompactSpec { name, intervals });
        }

        let tol = match scenario.get("tol") {
            Some(e) => {
                let v = real(e)?;
                if !(v > 0.0) {
                    return Err(ConfigError::at(e.line, "tol must be positive"));
                }
                v
            }
            None => nearbest::bestapprox::LAWSON_TOL,
        };
        let max_iter = scenario.get("max_iter").map(positive_int).transpose()?.unwrap_or(nearbest::bestapprox::LAWSON_MAX_ITER);
        let order = scenario.get("panels").map(positive_int).transpose()?.unwrap_or(DEFAULT_ORDER);
        let base_nodes =
            scenario.get("base_nodes").map(positive_int).transpose()?.unwrap_or(nearbest::bestapprox::DEFAULT_BASE_NODES);
        let map_accuracy = match scenario.get("map_accuracy") {
            Some(e) => real(e)?,
            None => nearbest::conformal::DEFAULT_MAP_ACCURACY,
        };
        let out = scenario.get("out").map(|e| e.value.clone());

        Ok(Self { name, mode, degrees, pieces, singular, branches, compact, tol, max_iter, order, base_nodes, map_accuracy, out })
    }

    pub fn arc(&self) -> nearbest::Result<Arc<f64>> {
        Arc::new(self.pieces.clone())
    }

    pub fn function(&self) -> nearbest::Result<PiecewiseAnalyticFunction<f64>> {
        let branches = self
            .branches
            .iter()
            .map(|b| {
                let e = b.expr.clone();
                Branch::new(b.source.clone(), b.center, b.radius, move |z: Complex| e.eval(z))
            })
            .collect();
        PiecewiseAnalyticFunction::new(self.arc()?, self.singular.clone(), branches, None)
    }

    pub fn core_mode(&self) -> nearbest::Result<Mode<f64>> {
        Ok(match self.mode {
            ModeSpec::BestApprox => Mode::BestApprox,
            ModeSpec::Theorem1 { sigma } => Mode::Theorem1 { sigma },
            ModeSpec::Theorem2 { n, r } => Mode::Theorem2 { lemniscate: Lemniscate::new(n, r)? },
        })
    }

    pub fn options(&self) -> ScenarioOptions {
        ScenarioOptions {
            n_max: *self.degrees.last().expect("degrees are nonempty"),
            order: self.order,
            base_nodes: self.base_nodes,
            map_accuracy: self.map_accuracy,
        }
    }
}

fn parse_piece(s: &Section) -> Result<Piece<f64>, ConfigError> {
    let kind = s.require("kind")?;
    match kind.value.as_str() {
        "segment" => {
            s.check_keys(&["kind", "from", "to"])?;
            Ok(Piece::Segment { a: complex(s.require("from")?)?, b: complex(s.require("to")?)? })
        }
        "arc" => {
            s.check_keys(&["kind", "center", "radius", "start", "sweep"])?;
            let radius_entry = s.require("radius")?;
            let radius = real(radius_entry)?;
            if !(radius > 0.0) {
                return Err(ConfigError::at(radius_entry.line, "radius must be positive"));
            }
            Ok(Piece::CircularArc {
                center: complex(s.require("center")?)?,
                radius,
                start: real(s.require("start")?)?,
                sweep: real(s.require("sweep")?)?,
            })
        }
        other => Err(ConfigError::at(kind.line, format!("unknown piece kind '{other}' (expected segment or arc)"))),
    }
}
