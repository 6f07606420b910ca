//! Sampled geometry for plotting: the arc, level lines `u = 1/n` and
//! Γ-rays.

use nearbest::conformal::{Side, SidedPoint};
use nearbest::{Complex, Scenario};

use crate::config::ExperimentConfig;

/// Level-line and Γ-ray samples of a scenario, in original coordinates.
pub fn geometry_samples(config: &ExperimentConfig, scenario: &Scenario, count: usize) -> nearbest::Result<Vec<GeometrySample>> {
    let mut out = Vec::new();
    let arc = scenario.f.arc();
    let t_max = arc.t_max();
    for k in 0..=count {
        let t = t_max * k as f64 / count as f64;
        out.push(GeometrySample { kind: "arc", index: 0, side: 0, level: t, z: arc.eval(t)? * scenario.scale });
    }
    for &n in &config.degrees {
        for side in Side::BOTH {
            for z in scenario.map.level_line(1.0 / n as f64, side, count)? {
                out.push(GeometrySample { kind: "level_line", index: n, side: side.index() + 1, level: 1.0 / n as f64, z: z * scenario.scale });
            }
        }
    }
    for (j, c) in scenario.split.configs.iter().enumerate() {
        for side in Side::BOTH {
            let ray = scenario.map.gamma_ray(SidedPoint { t: c.t0, side }, c.lambda, count)?;
            for (r, z) in ray.samples {
                out.push(GeometrySample { kind: "gamma_ray", index: j + 1, side: side.index() + 1, level: r, z: z * scenario.scale });
            }
        }
    }
    Ok(out)
}

/// One exported geometry point; `level` is the arc parameter, `u` or `|Φ|`.
#[derive(Debug, Clone, PartialEq)]
pub struct GeometrySample {
    pub kind: &'static str,
    pub index: usize,
    pub side: usize,
    pub level: f64,
    pub z: Complex,
}

pub fn geometry_csv(samples: &[GeometrySample]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["kind", "index", "side", "level", "re", "im"]).expect("in-memory write");
    for s in samples {
        w.write_record([
            s.kind.to_string(),
            s.index.to_string(),
            s.side.to_string(),
            format!("{:e}", s.level),
            format!("{:e}", s.z.re),
            format!("{:e}", s.z.im),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 csv")
}
