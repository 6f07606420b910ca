//! Invariant checks over a scenario sweep, plus the closed-form segment
//! block.

use std::fmt;

use serde::Serialize;

use nearbest::{Complex, Error, ExteriorMap, Scenario};

use crate::config::{ExperimentConfig, ModeSpec};
use crate::run::{build_scenario, run_scenario, ResultRow, RunOptions};

pub const ORACLE_TOL: f64 = 1e-10;
pub const RHO_STAR_REL: f64 = 0.01;
pub const BRACKET_MAX: f64 = 0.05;
pub const QUADRATURE_MAX: f64 = 1e-8;
pub const RATIO_SLACK: f64 = 1e-12;
pub const STABILITY: f64 = 0.2;
pub const SPREAD_MAX: f64 = 10.0;
pub const ADMISSIBLE_SLACK: f64 = 16.0 * f64::EPSILON;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Pass,
    Fail,
    Info,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Info => "INFO",
        })
    }
}

/// One report line. Soft checks are reported but never fail a run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub measured: String,
    pub threshold: String,
    pub verdict: Verdict,
    pub hard: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, measured: impl Into<String>, threshold: impl Into<String>, ok: bool, hard: bool) -> Self {
        Self {
            name: name.into(),
            measured: measured.into(),
            threshold: threshold.into(),
            verdict: if ok { Verdict::Pass } else { Verdict::Fail },
            hard,
        }
    }

    pub fn info(name: impl Into<String>, measured: impl Into<String>) -> Self {
        Self { name: name.into(), measured: measured.into(), threshold: String::new(), verdict: Verdict::Info, hard: false }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = if self.verdict == Verdict::Info {
            ""
        } else if self.hard {
            " [hard]"
        } else {
            " [soft]"
        };
        write!(f, "{} {}{kind}: {}", self.verdict, self.name, self.measured)?;
        if !self.threshold.is_empty() {
            write!(f, " (threshold {})", self.threshold)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn hard_failures(&self) -> usize {
        self.checks.iter().filter(|c| c.hard && c.verdict == Verdict::Fail).count()
    }

    pub fn render(&self) -> String {
        let mut s: String = self.checks.iter().map(|c| format!("{c}\n")).collect();
        let fails = self.checks.iter().filter(|c| c.verdict == Verdict::Fail).count();
        s.push_str(&format!(
            "{} checks, {} failed ({} hard)\n",
            self.checks.iter().filter(|c| c.verdict != Verdict::Info).count(),
            fails,
            self.hard_failures()
        ));
        s
    }
}

/// Deterministic points with `|w| ∈ [1.01, 5]` from additive recurrences.
pub fn oracle_samples(count: usize) -> Vec<Complex> {
    (1..=count)
        .map(|k| {
            let a = (k as f64 * 0.618_033_988_749_894_8).fract();
            let b = (k as f64 * 0.754_877_666_246_692_7).fract();
            Complex::from_polar(1.01 + 3.99 * a, std::f64::consts::TAU * b)
        })
        .collect()
}

fn joukowski(w: Complex) -> Complex {
    (w + w.inv()) * 0.5
}

fn joukowski_prime(w: Complex) -> Complex {
    (Complex::new(1.0, 0.0) - (w * w).inv()) * 0.5
}

/// Exterior root of `w² − 2zw + 1 = 0`.
fn joukowski_inverse(z: Complex) -> Complex {
    let s = (z * z - 1.0).sqrt();
    let (a, b) = (z + s, z - s);
    if a.norm() >= b.norm() {
        a
    } else {
        b
    }
}

/// Semi-minor axis of the level ellipse `|w| = 1 + 1/n`.
pub fn segment_dn(n: usize) -> f64 {
    let rho = 1.0 + 1.0 / n as f64;
    (rho - 1.0 / rho) / 2.0
}

/// Exterior map of `[−1, 1]` against the Joukowski closed form.
pub fn segment_oracle() -> Vec<Check> {
    let mut out = Vec::new();
    let arc = match nearbest::Arc::segment(Complex::new(-1.0, 0.0), Complex::new(1.0, 0.0)) {
        Ok(a) => a,
        Err(e) => return vec![Check::new("segment oracle: arc", e.to_string(), "builds", false, true)],
    };
    let map = match ExteriorMap::new(&arc, 1e-12) {
        Ok(m) => m,
        Err(e) => return vec![Check::new("segment oracle: map", e.to_string(), "builds", false, true)],
    };
    let ws = oracle_samples(100);
    let (mut psi, mut dpsi, mut phi, mut trip) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let mut failed = None;
    for &w in &ws {
        let r = (|| -> nearbest::Result<()> {
            let z = map.psi(w)?;
            psi = psi.max((z - joukowski(w)).norm());
            dpsi = dpsi.max((map.psi_prime(w)? - joukowski_prime(w)).norm());
            phi = phi.max((map.phi(joukowski(w))? - joukowski_inverse(joukowski(w))).norm());
            trip = trip.max((map.phi(z)? - w).norm());
            Ok(())
        })();
        if let Err(e) = r {
            failed = Some(e.to_string());
        }
    }
    if let Some(e) = failed {
        out.push(Check::new("segment oracle: evaluation", e, "no errors", false, true));
    }
    let thr = format!("< {ORACLE_TOL:e}");
    out.push(Check::new("segment oracle: Ψ", format!("{psi:.3e}"), thr.clone(), psi < ORACLE_TOL, true));
    out.push(Check::new("segment oracle: Ψ'", format!("{dpsi:.3e}"), thr.clone(), dpsi < ORACLE_TOL, true));
    out.push(Check::new("segment oracle: Φ", format!("{phi:.3e}"), thr.clone(), phi < ORACLE_TOL, true));
    out.push(Check::new("segment oracle: Φ(Ψ(w)) − w", format!("{trip:.3e}"), thr, trip < ORACLE_TOL, true));
    let cap = (map.capacity() - 0.5).abs();
    out.push(Check::new("segment oracle: capacity", format!("|cap − 1/2| = {cap:.3e}"), format!("< {ORACLE_TOL:e}"), cap < ORACLE_TOL, true));
    let mut worst = 0.0f64;
    for k in 3..=8 {
        let n = 1usize << k;
        match map.rho_star(Complex::new(0.0, 0.0), 1.0 / n as f64) {
            Ok(d) => worst = worst.max((d / segment_dn(n) - 1.0).abs()),
            Err(_) => worst = f64::INFINITY,
        }
    }
    out.push(Check::new(
        "segment oracle: ρ*_{1/n}(0), n = 8..256",
        format!("max relative deviation {worst:.3e}"),
        format!("< {RHO_STAR_REL}"),
        worst < RHO_STAR_REL,
        true,
    ));
    out
}

/// `max/min` of positive finite values; `None` with fewer than two.
pub fn spread(values: &[f64]) -> Option<f64> {
    let v: Vec<f64> = values.iter().copied().filter(|x| x.is_finite() && *x > 0.0).collect();
    if v.len() < 2 {
        return None;
    }
    let hi = v.iter().copied().fold(f64::MIN, f64::max);
    let lo = v.iter().copied().fold(f64::MAX, f64::min);
    Some(hi / lo)
}

/// Lemniscate margins, or the construction failure that replaces them.
fn admissibility(config: &ExperimentConfig, built: &Result<Scenario, Error>) -> Option<Check> {
    let ModeSpec::Theorem2 { n, r } = config.mode else { return None };
    let name = format!("lemniscate admissibility (N = {n}, R = {r})");
    Some(match built {
        Err(Error::InadmissibleLemniscate(msg)) => Check::new(name, msg.clone(), "|P| < R^N on L∖{z₀}, |P| > R^N on Γ", false, true),
        Err(_) => return None,
        Ok(s) => match s.lemniscate_margins {
            Some((arc_max, ray_min)) => Check::new(
                name,
                format!("max |P|/R^N on L∖{{z₀}} = {arc_max:.16}, min on Γ nodes = {ray_min:.16}"),
                "arc ≤ 1 ≤ rays up to 16ε; both tend to 1 at z₀",
                arc_max <= 1.0 + ADMISSIBLE_SLACK && ray_min >= 1.0 - ADMISSIBLE_SLACK,
                true,
            ),
            None => Check::info(name, "no margins recorded"),
        },
    })
}

/// Checks over finished rows.
pub fn check_rows(config: &ExperimentConfig, scenario: &Scenario, rows: &[ResultRow]) -> Vec<Check> {
    let mut out = Vec::new();
    for r in rows {
        out.push(Check::new(format!("n = {}: row status", r.n), r.status.clone(), "ok", r.is_ok(), true));
    }
    let brackets: Vec<(usize, f64)> = rows.iter().filter_map(|r| r.bracket.map(|b| (r.n, b))).collect();
    if let Some(&(n, worst)) = brackets.iter().max_by(|a, b| a.1.total_cmp(&b.1)) {
        out.push(Check::new(
            "Lawson bracket width",
            format!("max {worst:.3e} at n = {n}"),
            format!("< {BRACKET_MAX}"),
            worst < BRACKET_MAX,
            true,
        ));
    }
    let built: Vec<&ResultRow> = rows.iter().filter(|r| r.construction.is_some()).collect();
    for r in &built {
        let c = r.construction.as_ref().expect("filtered");
        let deg = c.exact_degree.map_or("zero polynomial".to_string(), |d| d.to_string());
        out.push(Check::new(
            format!("n = {}: exact degree", r.n),
            format!("{deg} (structural bound {})", c.degree_bound),
            format!("≤ {}", r.n),
            c.exact_degree.is_none_or(|d| d <= r.n) && c.degree_bound <= r.n,
            true,
        ));
        out.push(Check::new(
            format!("n = {}: panel-doubling change", r.n),
            format!("{:.3e}", c.quadrature_change),
            format!("< {QUADRATURE_MAX:e}"),
            c.quadrature_change < QUADRATURE_MAX,
            true,
        ));
        for ray in &c.rays {
            out.push(Check::info(
                format!("n = {}: damping, singularity {} ray {}", r.n, ray.singularity + 1, ray.side),
                format!("m = {}, max|w| = {:.6}, max|w|^m = {:.6e}", ray.m, ray.ratio_max, ray.damping_max),
            ));
        }
        if matches!(config.mode, ModeSpec::Theorem2 { .. }) {
            let worst = c.rays.iter().map(|x| x.ratio_max).fold(0.0, f64::max);
            out.push(Check::new(
                format!("n = {}: lemniscate ratio max |P(z)/P(ζ)|", r.n),
                format!("{worst:.15}"),
                format!("≤ 1 + {RATIO_SLACK:e}"),
                worst <= 1.0 + RATIO_SLACK,
                true,
            ));
        }
        for e in &c.compact {
            out.push(Check::new(
                format!("n = {}: compact bound on {}", r.n, e.name),
                format!("‖f − P‖_E = {:.3e}, damping {:.3e}", e.sup_err, e.damping_bound),
                format!("≤ {:.3e}", e.bound),
                e.holds,
                true,
            ));
        }
    }
    if matches!(config.mode, ModeSpec::Theorem1 { .. }) {
        out.extend(uniform_bound_stability(rows));
    }
    let ratios: Vec<f64> = rows.iter().filter_map(|r| r.near_best_ratio).collect();
    if let Some(s) = spread(&ratios) {
        let hi = ratios.iter().copied().fold(0.0, f64::max);
        out.push(Check::new(
            "near-best ratio spread",
            format!("max/min = {s:.3} (max ratio {hi:.3})"),
            format!("< {SPREAD_MAX}"),
            s < SPREAD_MAX,
            false,
        ));
    }
    if let Some(k) = scenario.split.configs.iter().find_map(|c| c.order) {
        let scaled: Vec<f64> = rows
            .iter()
            .filter_map(|r| match (r.e_n, r.d_n) {
                (Some(e), Some(d)) => Some(e / d.powi(k as i32 + 1)),
                _ => None,
            })
            .collect();
        if let Some(s) = spread(&scaled) {
            out.push(Check::new(
                format!("E_n / d_n^{} spread", k + 1),
                format!("max/min = {s:.3}"),
                format!("< {SPREAD_MAX}"),
                s < SPREAD_MAX,
                false,
            ));
        }
    }
    out
}

/// `max_ray max|w|^m` for each pair `(n, 2n)` of tested degrees.
pub fn uniform_bound_stability(rows: &[ResultRow]) -> Vec<Check> {
    let bound = |r: &ResultRow| r.construction.as_ref().map(|c| c.rays.iter().map(|x| x.damping_max).fold(0.0, f64::max));
    let mut out = Vec::new();
    for a in rows {
        let Some(b) = rows.iter().find(|b| b.n == 2 * a.n) else { continue };
        if let (Some(x), Some(y)) = (bound(a), bound(b)) {
            let change = y / x - 1.0;
            out.push(Check::new(
                format!("uniform wedge damping bound, n = {} → {}", a.n, b.n),
                format!("{x:.6e} → {y:.6e} ({:+.1}%)", 100.0 * change),
                format!("±{:.0}%", 100.0 * STABILITY),
                change.abs() <= STABILITY,
                true,
            ));
        }
    }
    out
}

/// Segment block, scenario build, full sweep and every row check.
pub fn verify_suite(config: &ExperimentConfig, options: RunOptions) -> Report {
    let mut checks = segment_oracle();
    let built = build_scenario(config);
    checks.extend(admissibility(config, &built));
    let scenario = match built {
        Ok(s) => s,
        Err(e) => {
            if !matches!(e, Error::InadmissibleLemniscate(_)) {
                checks.push(Check::new("scenario build", e.to_string(), "builds", false, true));
            }
            return Report { checks };
        }
    };
    let rows = run_scenario(config, &scenario, options);
    checks.extend(check_rows(config, &scenario, &rows));
    Report { checks }
}
