//! Least-squares convergence-rate fits on log errors.

use std::fmt;

use serde::Serialize;

use nearbest::linalg::fit_line;

/// Errors at or below this level are treated as floor-saturated.
pub const FLOOR: f64 = 1e-13;
/// Fewest usable rows for a fit.
pub const MIN_ROWS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum RateModel {
    /// `log err = a − b·n`
    Geometric,
    /// `log err = a − b·n^σ`
    Stretched { sigma: f64 },
    /// `log err = a − b·log n`
    Powerlaw,
}

impl RateModel {
    fn abscissa(&self, n: f64) -> f64 {
        match *self {
            RateModel::Geometric => n,
            RateModel::Stretched { sigma } => n.powf(sigma),
            RateModel::Powerlaw => n.ln(),
        }
    }

    /// `geometric`, `powerlaw`, `stretched` (σ = 0.5) or `stretched:<σ>`.
    pub fn parse(s: &str) -> Result<Self, String> {
        match s {
            "geometric" => Ok(RateModel::Geometric),
            "powerlaw" => Ok(RateModel::Powerlaw),
            "stretched" => Ok(RateModel::Stretched { sigma: 0.5 }),
            _ => {
                let sigma = s
                    .strip_prefix("stretched:")
                    .and_then(|v| v.parse::<f64>().ok())
                    .ok_or_else(|| format!("unknown model '{s}' (geometric, stretched[:σ], powerlaw)"))?;
                if !(sigma > 0.0 && sigma < 1.0) {
                    return Err(format!("σ = {sigma} is outside (0, 1)"));
                }
                Ok(RateModel::Stretched { sigma })
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateFit {
    pub model: RateModel,
    pub a: f64,
    /// Decay constant; negative when the errors grow.
    pub b: f64,
    pub r_squared: f64,
    /// Degrees used by the fit.
    pub used: Vec<usize>,
    /// `log err − fit` per used degree.
    pub residuals: Vec<f64>,
    /// Degrees dropped for being at the floor or not finite.
    pub excluded: Vec<usize>,
    /// `b ≤ 0`.
    pub no_decay: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RateError(pub String);

impl fmt::Display for RateError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for RateError {}

/// Fits `model` to `(n, err)` pairs. Missing and floor-level errors are
/// excluded, not weighted.
pub fn fit_rate(points: &[(usize, Option<f64>)], model: RateModel) -> Result<RateFit, RateError> {
    let mut used = Vec::new();
    let mut excluded = Vec::new();
    for &(n, e) in points {
        match e {
            Some(v) if v.is_finite() && v > FLOOR => used.push((n, v)),
            _ => excluded.push(n),
        }
    }
    if used.len() < MIN_ROWS {
        return Err(RateError(format!(
            "{} usable rows above the floor {FLOOR:e}; at least {MIN_ROWS} are needed",
            used.len()
        )));
    }
    let x: Vec<f64> = used.iter().map(|&(n, _)| model.abscissa(n as f64)).collect();
    let y: Vec<f64> = used.iter().map(|&(_, e)| e.ln()).collect();
    let line = fit_line(&x, &y).ok_or_else(|| RateError("all usable rows share one degree".into()))?;
    let residuals = x.iter().zip(&y).map(|(xi, yi)| yi - (line.intercept + line.slope * xi)).collect();
    // a flat line is reported as b = 0 rather than −0
    let b = if line.slope == 0.0 { 0.0 } else { -line.slope };
    Ok(RateFit {
        model,
        a: line.intercept,
        b,
        r_squared: line.r_squared,
        used: used.iter().map(|&(n, _)| n).collect(),
        residuals,
        excluded,
        no_decay: b <= 0.0,
    })
}

/// Reads `(n, column)` pairs from a run CSV; empty cells become `None`.
pub fn read_csv_column(text: &str, column: &str) -> Result<Vec<(usize, Option<f64>)>, RateError> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let headers = r.headers().map_err(|e| RateError(format!("csv header: {e}")))?.clone();
    let find = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| RateError(format!("column '{name}' not found (have: {})", headers.iter().collect::<Vec<_>>().join(", "))))
    };
    let (ni, ci) = (find("n")?, find(column)?);
    let mut out = Vec::new();
    for (k, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| RateError(format!("csv row {}: {e}", k + 2)))?;
        let n = rec[ni].parse::<usize>().map_err(|_| RateError(format!("csv row {}: bad degree '{}'", k + 2, &rec[ni])))?;
        let cell = rec[ci].trim();
        let v = if cell.is_empty() {
            None
        } else {
            Some(cell.parse::<f64>().map_err(|_| RateError(format!("csv row {}: bad value '{cell}'", k + 2)))?)
        };
        out.push((n, v));
    }
    Ok(out)
}
