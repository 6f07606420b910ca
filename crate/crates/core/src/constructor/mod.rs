//! Near-best polynomial approximants of piecewise analytic functions.

mod assembly;
mod contour;
mod split;
mod straighten;

pub use assembly::{DampingSpec, RayAssembly};
pub use contour::{
    quadrature_contour, ContourIntegral, ContourNode, MapRay, Panel, RayContour, RayPath, RayPoint, StraightRay, INNER_FLOOR,
};
pub use split::{select_lambda, CauchySplit, SingularityConfig, LAMBDA_MAX, LAMBDA_TOL, ORIENTATION_PROBE_DEGREE};
pub use straighten::{
    admissible_beta, approximate_straightening, build_straightening_map, classify_points, select_theorem1_params, Classification,
    Piece, RateEstimate, StraightSample, StraighteningFit, StraighteningMap, WedgeParams, ALPHA_SWEEP, KAPPA_MAX,
};

use std::sync::Arc as Shared;

use num_complex::Complex;

use crate::bestapprox::{MinimaxProblem, DEFAULT_BASE_NODES, LAWSON_MAX_ITER, LAWSON_TOL};
use crate::conformal::{ExteriorMap, DEFAULT_MAP_ACCURACY};
use crate::error::{Error, Result};
use crate::geometry::{Arc, Branch, Lemniscate, PiecewiseAnalyticFunction};
use crate::kernels::{wedge_q_degree, DampingFactor, DampingKind};
use crate::poly::{BasisPoly, HessenbergBasis};
use crate::real::{from_usize, lit, Real};

/// Gauss–Legendre nodes per panel.
pub const DEFAULT_ORDER: usize = 16;
/// Relative projection residual above which a materialized polynomial is
/// rejected as not of degree `≤ n`.
pub const PROJECTION_TOL: f64 = 1e-8;
/// Number of probe points for the panel-doubling check.
const DOUBLING_PROBES: usize = 24;

/// Construction mode.
#[derive(Debug, Clone)]
pub enum Mode<T> {
    /// Only `E_n` is computed.
    BestApprox,
    /// Lemniscate damping.
    Theorem2 { lemniscate: Lemniscate<T> },
    /// Wedge damping with target exponent `σ`.
    Theorem1 { sigma: f64 },
}

impl<T> Mode<T> {
    pub fn name(&self) -> &'static str {
        match self {
            Mode::BestApprox => "bestapprox",
            Mode::Theorem2 { .. } => "theorem2",
            Mode::Theorem1 { .. } => "theorem1",
        }
    }
}

/// Settings that do not depend on `n`.
#[derive(Debug, Clone, Copy)]
pub struct ScenarioOptions {
    pub n_max: usize,
    pub order: usize,
    pub base_nodes: usize,
    pub map_accuracy: f64,
}

impl Default for ScenarioOptions {
    fn default() -> Self {
        Self { n_max: 128, order: DEFAULT_ORDER, base_nodes: DEFAULT_BASE_NODES, map_accuracy: DEFAULT_MAP_ACCURACY }
    }
}

/// Per-ray wedge data of the stretched-exponential construction.
#[derive(Debug, Clone)]
pub struct WedgeSetup<T> {
    pub map: StraighteningMap<T>,
    pub fit: StraighteningFit<T>,
    pub rate: RateEstimate,
    pub params: WedgeParams,
}

/// Everything about a scenario that is independent of `n`.
#[derive(Debug, Clone)]
pub struct Scenario<T> {
    pub f: PiecewiseAnalyticFunction<T>,
    pub map: ExteriorMap<T>,
    pub mode: Mode<T>,
    pub options: ScenarioOptions,
    /// Original coordinates are `scale` times the internal ones.
    pub scale: T,
    pub split: CauchySplit<T>,
    pub problem: MinimaxProblem<T>,
    /// `f − h₁` at the problem nodes; empty in bestapprox mode.
    pub h2_values: Vec<Complex<T>>,
    pub faber: Shared<HessenbergBasis<T>>,
    /// Wedge mode only: `[side one, side two]` per singular point.
    pub wedges: Vec<[WedgeSetup<T>; 2]>,
    /// Lemniscate mode only: `(max |P/R^N|` on the arc away from `z₀`,
    /// `min |P/R^N|` on the rays`)`.
    pub lemniscate_margins: Option<(T, T)>,
}

impl<T: Real> Scenario<T> {
    pub fn new(f: PiecewiseAnalyticFunction<T>, mode: Mode<T>, options: ScenarioOptions) -> Result<Self> {
        let (f, mode, scale) = normalize(f, mode)?;
        let map = ExteriorMap::new(f.arc(), lit(options.map_accuracy))?;
        let problem = MinimaxProblem::new(&f, options.n_max, options.base_nodes)?;
        let (split, h2_values, faber) = if matches!(mode, Mode::BestApprox) {
            (CauchySplit::locate(&f, &map, options.order)?, Vec::new(), Shared::new(map.faber_basis(1)?))
        } else {
            let split = CauchySplit::new(&f, &map, options.order)?;
            let h2 = split.h2_values(&f, &problem.nodes.params, &problem.nodes.points)?;
            (split, h2, Shared::new(map.faber_basis((options.n_max / 2).max(1))?))
        };
        let mut scenario = Self {
            f,
            map,
            mode,
            options,
            scale,
            split,
            problem,
            h2_values,
            faber,
            wedges: Vec::new(),
            lemniscate_margins: None,
        };
        match scenario.mode.clone() {
            Mode::Theorem2 { lemniscate } => scenario.check_lemniscate(&lemniscate)?,
            Mode::Theorem1 { sigma } => scenario.prepare_wedges(sigma)?,
            Mode::BestApprox => {}
        }
        Ok(scenario)
    }

    fn check_lemniscate(&mut self, lem: &Lemniscate<T>) -> Result<()> {
        if self.f.singular_params().len() != 1 {
            return Err(Error::InvalidArgument("lemniscate mode needs exactly one singular point".into()));
        }
        let c = &self.split.configs[0];
        let (worst, _) = lem.check_admissible(self.f.arc(), c.t0)?;
        let mut ray_min = T::infinity();
        for i in 0..2 {
            for q in &self.split.contours[0][i].nodes {
                ray_min = ray_min.min(lem.eval_normalized(q.zeta).norm());
            }
        }
        if ray_min < T::one() - T::epsilon() * lit(16.0) {
            return Err(Error::InadmissibleLemniscate(format!(
                "|P(ζ)| = {:e}·R^N < R^N on a Γ-ray",
                ray_min.to_f64().unwrap_or(f64::NAN)
            )));
        }
        self.lemniscate_margins = Some((worst, ray_min));
        Ok(())
    }

    fn prepare_wedges(&mut self, sigma: f64) -> Result<()> {
        if !self.f.arc().is_polyline() {
            return Err(Error::UnsupportedArc("the wedge construction needs a polyline arc".into()));
        }
        let mut wedges = Vec::new();
        for c in &self.split.configs {
            let mut pair = Vec::new();
            for i in 0..2 {
                let ray = c.ray(&self.map, i);
                pair.push(select_wedge(self.f.arc(), c.t0, &ray, sigma, self.options.n_max)?);
            }
            let [a, b]: [WedgeSetup<T>; 2] = pair.try_into().expect("two rays");
            wedges.push([a, b]);
        }
        self.wedges = wedges;
        Ok(())
    }

    /// `d_n = ρ*_{1/n}(z₀)` for singular point `j`.
    pub fn d_n(&self, j: usize, n: usize) -> Result<T> {
        compute_dn(&self.map, self.split.configs[j].z0, n)
    }

    /// Minimax `E_n(f)` on the problem nodes.
    pub fn best(&self, n: usize) -> Result<crate::bestapprox::MinimaxResult<T>> {
        self.problem.solve(n, lit(LAWSON_TOL), LAWSON_MAX_ITER)
    }

    /// Arc parameters of the problem nodes.
    pub fn node_params(&self) -> &[T] {
        &self.problem.nodes.params
    }

    /// Nodes in original coordinates.
    pub fn node_points(&self) -> Vec<Complex<T>> {
        self.problem.nodes.points.iter().map(|z| z * self.scale).collect()
    }

    /// Near-best polynomial of degree `≤ n`.
    pub fn construct(&self, n: usize) -> Result<NearBestPolynomial<T>> {
        if n == 0 || n > self.options.n_max {
            return Err(Error::InvalidArgument(format!("degree {n} is outside 1..={}", self.options.n_max)));
        }
        match &self.mode {
            Mode::BestApprox => Err(Error::InvalidArgument("bestapprox mode constructs no near-best polynomial".into())),
            Mode::Theorem2 { .. } | Mode::Theorem1 { .. } => self.assemble(n),
        }
    }

    fn damping_for(&self, j: usize, i: usize, n: usize) -> Result<(DampingSpec<T>, Option<Classification>)> {
        match &self.mode {
            Mode::Theorem2 { lemniscate } => {
                let factor = DampingFactor::lemniscate(lemniscate.order(), n)?;
                Ok((DampingSpec { v: lemniscate.normalized_poly(), kappa: 1, anchor: T::zero(), factor }, None))
            }
            Mode::Theorem1 { .. } => {
                let w = &self.wedges[j][i];
                let p = w.params;
                let factor = DampingFactor::wedge(p.kappa, p.beta, p.zeta0, n)?;
                let d = wedge_q_degree(n, p.beta);
                let (q, err) = w.fit.approximate(d)?;
                let class = classify_points(&w.map, &q, err);
                if let Some(v) = class.violation() {
                    return Err(Error::Classification(format!("singular point {j}, ray {}: {v}", i + 1)));
                }
                Ok((DampingSpec { v: q, kappa: p.kappa, anchor: lit(p.zeta0), factor }, Some(class)))
            }
            Mode::BestApprox => unreachable!("no damping in bestapprox mode"),
        }
    }

    fn build_assembly(&self, n: usize, doubled: bool) -> Result<(Assembly<T>, Vec<SingularityMeta>)> {
        let faber_degree = n / 2;
        let length = self.f.arc().length();
        let mut rays = Vec::new();
        let mut metas = Vec::new();
        for (j, c) in self.split.configs.iter().enumerate() {
            let mut meta = SingularityMeta {
                t0: c.t0.to_f64().unwrap_or(f64::NAN),
                z0: to_pair(c.z0 * self.scale),
                order: c.order,
                lambda: c.lambda.to_f64().unwrap_or(f64::NAN),
                d_n: f64::NAN,
                rays: Vec::new(),
            };
            if !c.has_jump() {
                metas.push(meta);
                continue;
            }
            let d_n = self.d_n(j, n)?;
            meta.d_n = (d_n * self.scale).to_f64().unwrap_or(f64::NAN);
            for i in 0..2 {
                let path = c.ray(&self.map, i);
                let mut contour = RayContour::build(&path, d_n, self.options.order, c.orientation[i])?;
                if doubled {
                    contour = contour.doubled(&path)?;
                }
                let charges: Vec<Complex<T>> = contour
                    .nodes
                    .iter()
                    .map(|q| q.weight * self.f.jump(j, q.zeta) / (crate::real::imag_unit::<T>() * T::TAU()))
                    .collect();
                let (spec, class) = self.damping_for(j, i, n)?;
                let ray = RayAssembly::new(spec, &contour, &charges, &self.faber, faber_degree, length)?;
                meta.rays.push(RayMeta {
                    theta: c.theta[i].to_f64().unwrap_or(f64::NAN),
                    orientation: c.orientation[i].to_f64().unwrap_or(f64::NAN),
                    d_split: contour.d_split.to_f64().unwrap_or(f64::NAN),
                    reach: (contour.reach * self.scale).to_f64().unwrap_or(f64::NAN),
                    panels: contour.panels.len(),
                    inner_nodes: contour.nodes.len() - contour.outer_count(),
                    outer_nodes: contour.outer_count(),
                    damping: DampingMeta::from_factor(&ray.spec.factor),
                    degree_bound: ray.degree_bound(),
                    classification: class,
                    ratio_max: f64::NAN,
                    damping_max: f64::NAN,
                });
                rays.push(ray);
            }
            metas.push(meta);
        }
        Ok((Assembly { rays, h2: None }, metas))
    }

    fn assemble(&self, n: usize) -> Result<NearBestPolynomial<T>> {
        let (mut assembly, mut metas) = self.build_assembly(n, false)?;
        // analytic remainder
        let h2_degree = n.div_ceil(2);
        let h2 = crate::bestapprox::lawson_minimax(&self.h2_values, &self.problem.basis, h2_degree, lit(LAWSON_TOL), LAWSON_MAX_ITER)?;
        let h2_poly = self.problem.basis.poly(h2.coeffs.clone())?;
        assembly.h2 = Some(h2_poly);
        // structural degree
        let mut degree_bound = h2_degree;
        for r in &assembly.rays {
            degree_bound = degree_bound.max(r.degree_bound());
        }
        if degree_bound > n {
            return Err(Error::DegreeViolation(format!("assembled degree bound {degree_bound} exceeds n = {n}")));
        }
        // materialize on the problem nodes at the structural degree bound
        let values: Vec<Complex<T>> = self.problem.nodes.points.iter().map(|&z| assembly.eval(z)).collect();
        let coeffs = self.problem.basis.project(&values, degree_bound);
        let fitted = self.problem.basis.combine(&coeffs);
        let vscale = values.iter().map(|v| v.norm()).fold(T::zero(), T::max).max(T::min_positive_value());
        let residual = values.iter().zip(&fitted).map(|(a, b)| (a - b).norm()).fold(T::zero(), T::max) / vscale;
        if !(residual <= lit(PROJECTION_TOL)) {
            return Err(Error::DegreeViolation(format!(
                "assembled values leave a projection residual {:e} on degree {degree_bound}",
                residual.to_f64().unwrap_or(f64::NAN)
            )));
        }
        let poly = self.problem.basis.poly(coeffs)?;
        // damping instrumentation over the arc nodes
        let mut k = 0;
        for meta in metas.iter_mut() {
            for rm in meta.rays.iter_mut() {
                let ray = &assembly.rays[k];
                let rmax = self.problem.nodes.points.iter().map(|&z| ray.max_ratio(z)).fold(T::zero(), T::max);
                rm.ratio_max = rmax.to_f64().unwrap_or(f64::NAN);
                rm.damping_max = rm.ratio_max.powi(ray.spec.factor.m as i32);
                k += 1;
            }
        }
        // panel doubling on probe points
        let quadrature_change = if assembly.rays.is_empty() {
            0.0
        } else {
            let (fine, _) = self.build_assembly(n, true)?;
            let probes = self.probe_points();
            let mut worst = T::zero();
            let scale_v = vscale;
            for &z in &probes {
                let a = assembly.eval_rays(z);
                let b = fine.eval_rays(z);
                worst = worst.max((a - b).norm() / scale_v);
            }
            worst.to_f64().unwrap_or(f64::NAN)
        };
        let exact_degree = poly.degree();
        let meta = ConstructionMeta {
            mode: self.mode.name(),
            n,
            degree_bound,
            exact_degree,
            projection_residual: residual.to_f64().unwrap_or(f64::NAN),
            h2_degree,
            h2_error: h2.e_n.to_f64().unwrap_or(f64::NAN),
            quadrature_change,
            singularities: metas,
            n_min: assembly.rays.iter().map(|r| r.spec.factor.n_min).max().unwrap_or(1),
        };
        Ok(NearBestPolynomial { n, poly, scale: self.scale, meta: Some(meta), assembly: Some(Shared::new(assembly)) })
    }

    /// Problem nodes spread over the arc and clustered at the singular points.
    fn probe_points(&self) -> Vec<Complex<T>> {
        let pts = &self.problem.nodes.points;
        let step = (pts.len() / DOUBLING_PROBES).max(1);
        let mut out: Vec<Complex<T>> = pts.iter().step_by(step).copied().collect();
        for c in &self.split.configs {
            let mut near: Vec<(T, Complex<T>)> = pts.iter().map(|&z| ((z - c.z0).norm(), z)).collect();
            near.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
            out.extend(near.iter().take(8).map(|p| p.1));
        }
        out
    }

    /// `max_{z, q} |w(z, ζ_q)|^m` over the given original-coordinate points.
    pub fn damping_on(&self, p: &NearBestPolynomial<T>, points: &[Complex<T>]) -> Option<T> {
        let profile = self.damping_profile(p, points)?;
        Some(profile.iter().map(|&(m, q)| q.powi(m as i32)).fold(T::zero(), T::max))
    }

    /// Per ray: `(m, max_{z, q} |w(z, ζ_q)|)` over the given
    /// original-coordinate points.
    pub fn damping_profile(&self, p: &NearBestPolynomial<T>, points: &[Complex<T>]) -> Option<Vec<(usize, T)>> {
        let a = p.assembly.as_ref()?;
        let out = a
            .rays
            .iter()
            .map(|r| {
                let q = points.iter().map(|&z| r.max_ratio(z / self.scale)).fold(T::zero(), T::max);
                (r.spec.factor.m, q)
            })
            .collect();
        Some(out)
    }

    /// `f` at the problem nodes.
    pub fn node_values(&self) -> &[Complex<T>] {
        &self.problem.values
    }

    /// `|f − P|` at the problem nodes.
    pub fn error_profile(&self, p: &NearBestPolynomial<T>) -> Vec<T> {
        self.problem
            .nodes
            .points
            .iter()
            .zip(&self.problem.values)
            .map(|(&z, &v)| (v - p.poly.eval(z)).norm())
            .collect()
    }
}

/// Smallest `κ` whose straightening map has a reliable measured rate `α`
/// admitting a `β`; `α` is measured afresh for each candidate.
fn select_wedge<T: Real, P: RayPath<T>>(arc: &Arc<T>, t0: T, ray: &P, sigma: f64, n_max: usize) -> Result<WedgeSetup<T>> {
    let mut rejected = Vec::new();
    for kappa in 2..=KAPPA_MAX {
        let map = build_straightening_map(arc, t0, ray, kappa)?;
        let rate = map.rate()?;
        if !rate.reliable() {
            rejected.push(format!("κ = {kappa}: α = {:.3}, R² = {:.3}", rate.alpha, rate.r_squared));
            continue;
        }
        let Some(beta) = admissible_beta(sigma, rate.alpha, kappa) else { continue };
        let lengths = [map.lengths[0].to_f64().unwrap_or(f64::NAN), map.lengths[1].to_f64().unwrap_or(f64::NAN)];
        let zeta0 = 2.0 * lengths[0].powi(kappa as i32).max(lengths[1].powi(kappa as i32));
        let params = WedgeParams { kappa, beta, zeta0, alpha: rate.alpha };
        let d_max = wedge_q_degree(n_max, beta).max(*ALPHA_SWEEP.last().expect("nonempty"));
        let fit = map.fitter(d_max)?;
        return Ok(WedgeSetup { map, fit, rate, params });
    }
    if rejected.len() == KAPPA_MAX - 1 {
        return Err(Error::UnreliableFit(format!("no reliable straightening rate: {}", rejected.join("; "))));
    }
    Err(Error::NoAdmissibleParameters(format!("no κ ≤ {KAPPA_MAX} is admissible for σ = {sigma}")))
}

/// Rescales a lemniscate scenario to `R = 1`.
fn normalize<T: Real>(f: PiecewiseAnalyticFunction<T>, mode: Mode<T>) -> Result<(PiecewiseAnalyticFunction<T>, Mode<T>, T)> {
    let Mode::Theorem2 { lemniscate } = &mode else { return Ok((f, mode, T::one())) };
    let r = lemniscate.radius();
    if r == T::one() {
        return Ok((f, mode, T::one()));
    }
    if !f.arc().is_polyline() {
        return Err(Error::UnsupportedArc("rescaling is implemented for polylines".into()));
    }
    let vertices: Vec<Complex<T>> = f.arc().vertices().iter().map(|v| v / r).collect();
    let arc = Arc::polyline(&vertices)?;
    let branches = f
        .branches()
        .iter()
        .map(|b| {
            let g = b.eval.clone();
            Branch::new(b.label.clone(), b.center / r, b.radius / r, move |z: Complex<T>| g(z * r))
        })
        .collect();
    let orders: Option<Vec<isize>> = None;
    let g = PiecewiseAnalyticFunction::new(arc, f.singular_params().to_vec(), branches, orders)?;
    Ok((g, Mode::Theorem2 { lemniscate: Lemniscate::new(lemniscate.order(), T::one())? }, r))
}

/// `d_n = ρ*_{1/n}(z₀)`.
pub fn compute_dn<T: Real>(map: &ExteriorMap<T>, z0: Complex<T>, n: usize) -> Result<T> {
    if n == 0 {
        return Err(Error::InvalidArgument("d_n needs n ≥ 1".into()));
    }
    map.rho_star(z0, T::one() / from_usize::<T>(n))
}

/// Sum of ray contributions plus the analytic remainder.
#[derive(Debug, Clone)]
pub struct Assembly<T> {
    pub rays: Vec<RayAssembly<T>>,
    pub h2: Option<BasisPoly<T>>,
}

impl<T: Real> Assembly<T> {
    pub fn eval_rays(&self, z: Complex<T>) -> Complex<T> {
        self.rays.iter().map(|r| r.eval(z)).sum()
    }

    pub fn eval(&self, z: Complex<T>) -> Complex<T> {
        let h2 = self.h2.as_ref().map(|p| p.eval(z)).unwrap_or_default();
        self.eval_rays(z) + h2
    }
}

/// Damping parameters in plain numbers.
#[derive(Debug, Clone, PartialEq)]
pub struct DampingMeta {
    pub kind: &'static str,
    pub m: usize,
    pub degree: usize,
    pub n_roots: Option<usize>,
    pub kappa: Option<usize>,
    pub beta: Option<f64>,
    pub zeta0: Option<f64>,
    pub q_degree: Option<usize>,
}

impl DampingMeta {
    fn from_factor(f: &DampingFactor) -> Self {
        match &f.kind {
            DampingKind::Lemniscate { n_roots } => Self {
                kind: "lemniscate",
                m: f.m,
                degree: f.degree,
                n_roots: Some(*n_roots),
                kappa: None,
                beta: None,
                zeta0: None,
                q_degree: None,
            },
            DampingKind::Wedge { kappa, beta, zeta0, q_degree } => Self {
                kind: "wedge",
                m: f.m,
                degree: f.degree,
                n_roots: None,
                kappa: Some(*kappa),
                beta: Some(*beta),
                zeta0: Some(*zeta0),
                q_degree: Some(*q_degree),
            },
        }
    }
}

/// Quadrature and damping record of one ray.
#[derive(Debug, Clone)]
pub struct RayMeta {
    pub theta: f64,
    pub orientation: f64,
    pub d_split: f64,
    pub reach: f64,
    pub panels: usize,
    pub inner_nodes: usize,
    pub outer_nodes: usize,
    pub damping: DampingMeta,
    pub degree_bound: usize,
    pub classification: Option<Classification>,
    /// `max |w(z, ζ)|` over arc nodes and quadrature nodes.
    pub ratio_max: f64,
    /// `ratio_max^m`.
    pub damping_max: f64,
}

#[derive(Debug, Clone)]
pub struct SingularityMeta {
    pub t0: f64,
    pub z0: (f64, f64),
    pub order: Option<isize>,
    pub lambda: f64,
    pub d_n: f64,
    pub rays: Vec<RayMeta>,
}

/// Everything needed to reproduce and audit a construction.
#[derive(Debug, Clone)]
pub struct ConstructionMeta {
    pub mode: &'static str,
    pub n: usize,
    pub degree_bound: usize,
    pub exact_degree: Option<usize>,
    /// Relative residual of projecting the assembled values onto degree `n`.
    pub projection_residual: f64,
    pub h2_degree: usize,
    pub h2_error: f64,
    /// Relative change of the ray sums under panel doubling.
    pub quadrature_change: f64,
    pub singularities: Vec<SingularityMeta>,
    /// Smallest `n` for which every damping exponent is positive.
    pub n_min: usize,
}

/// Polynomial produced by a construction, stored in a discretely
/// orthonormal basis of the internal coordinates.
#[derive(Debug, Clone)]
pub struct NearBestPolynomial<T> {
    pub n: usize,
    pub poly: BasisPoly<T>,
    pub scale: T,
    pub meta: Option<ConstructionMeta>,
    assembly: Option<Shared<Assembly<T>>>,
}

impl<T: Real> NearBestPolynomial<T> {
    /// Polynomial given by monomial coefficients, without metadata.
    pub fn from_monomial(coeffs: Vec<Complex<T>>) -> Self {
        let n = coeffs.len().saturating_sub(1);
        Self { n, poly: BasisPoly::from_monomial(coeffs), scale: T::one(), meta: None, assembly: None }
    }

    /// Exact degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.poly.degree()
    }

    /// Monomial coefficients in the original variable.
    pub fn monomial_coefficients(&self) -> Vec<Complex<T>> {
        let mut c = self.poly.monomial_coefficients();
        let mut s = T::one();
        for ck in c.iter_mut() {
            *ck = *ck * s;
            s = s / self.scale;
        }
        c
    }

    /// Value through the factored quadrature sum, bypassing the stored
    /// coefficients.
    pub fn direct(&self, z: Complex<T>) -> Option<Complex<T>> {
        self.assembly.as_ref().map(|a| a.eval(z / self.scale))
    }
}

/// `P(z)` by the basis recurrence.
pub fn eval_nearbest<T: Real>(p: &NearBestPolynomial<T>, z: Complex<T>) -> Complex<T> {
    p.poly.eval(z / p.scale)
}

fn to_pair<T: Real>(z: Complex<T>) -> (f64, f64) {
    (z.re.to_f64().unwrap_or(f64::NAN), z.im.to_f64().unwrap_or(f64::NAN))
}
