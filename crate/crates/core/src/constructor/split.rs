//! Cauchy splitting `f = h₁ + h₂` near each singular point.

use num_complex::Complex;

use super::contour::{MapRay, RayContour};
use crate::bestapprox::{discretize, OrthonormalBasis};
use crate::conformal::{ExteriorMap, Side, SidedPoint};
use crate::error::{Error, Result};
use crate::geometry::PiecewiseAnalyticFunction;
use crate::real::{imag_unit, lit, Real};

/// Upper limit for `λ`.
pub const LAMBDA_MAX: f64 = 2.0;
/// Bisection tolerance for `λ`.
pub const LAMBDA_TOL: f64 = 1e-3;
/// Samples per ray used when testing `Γ ⊂ U`.
pub const RAY_SAMPLES: usize = 256;
/// Degree of the least-squares probe that decides the orientation.
pub const ORIENTATION_PROBE_DEGREE: usize = 24;

/// Γ-ray configuration at one singular point.
#[derive(Debug, Clone)]
pub struct SingularityConfig<T> {
    /// Index into the function's singular parameters.
    pub index: usize,
    pub t0: T,
    pub z0: Complex<T>,
    /// Jump order `k`; `None` when the adjacent branches agree.
    pub order: Option<isize>,
    pub lambda: T,
    /// Radius of a disk about `z₀` inside both branch disks.
    pub radius: T,
    /// Boundary angles of `Γ¹` (side one) and `Γ²` (side two).
    pub theta: [T; 2],
    /// Orientation sign of each ray, `+1` outward.
    pub orientation: [T; 2],
}

impl<T: Real> SingularityConfig<T> {
    pub fn ray<'a>(&self, map: &'a ExteriorMap<T>, i: usize) -> MapRay<'a, T> {
        MapRay { map, theta: self.theta[i], lambda: self.lambda, z0: self.z0 }
    }

    pub fn has_jump(&self) -> bool {
        self.order.is_some()
    }
}

/// Largest `λ ≤ 2` (bisection to `1e-3`) with both rays inside the disks of
/// the two adjacent branches.
pub fn select_lambda<T: Real>(map: &ExteriorMap<T>, f: &PiecewiseAnalyticFunction<T>, j: usize) -> Result<T> {
    let t0 = f.singular_params()[j];
    let inside = |lambda: T| -> Result<bool> {
        for side in Side::BOTH {
            let ray = map.gamma_ray(SidedPoint { t: t0, side }, lambda, RAY_SAMPLES)?;
            for &(_, zeta) in &ray.samples {
                if f.branches()[j].inner_radius(zeta) <= T::zero() || f.branches()[j + 1].inner_radius(zeta) <= T::zero() {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    };
    let top = lit::<T>(LAMBDA_MAX);
    if inside(top)? {
        return Ok(top);
    }
    let (mut lo, mut hi) = (T::one(), top);
    while hi - lo > lit(LAMBDA_TOL) {
        let mid = (lo + hi) * lit(0.5);
        if inside(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if lo - T::one() < lit(LAMBDA_TOL) {
        return Err(Error::InvalidArgument(format!("no Γ-ray at singular point {j} fits inside the branch disks")));
    }
    Ok(lo)
}

/// Rays, orientations and the reference discretization of `h₁`.
#[derive(Debug, Clone)]
pub struct CauchySplit<T> {
    pub configs: Vec<SingularityConfig<T>>,
    /// Reference contours `[side one, side two]` per singular point.
    pub contours: Vec<[RayContour<T>; 2]>,
    /// `weight·jump(ζ)/(2πi)` per contour node.
    pub charges: Vec<[Vec<Complex<T>>; 2]>,
    /// Probe residuals `(chosen, rejected)` of the orientation decision.
    pub orientation_evidence: Vec<(T, T)>,
    pub order: usize,
}

impl<T: Real> CauchySplit<T> {
    pub fn new(f: &PiecewiseAnalyticFunction<T>, map: &ExteriorMap<T>, order: usize) -> Result<Self> {
        let mut split = Self::locate(f, map, order)?;
        split.rebuild(f, map)?;
        split.orient(f)?;
        Ok(split)
    }

    /// Ray configurations only: no contours, charges or orientation.
    pub fn locate(f: &PiecewiseAnalyticFunction<T>, map: &ExteriorMap<T>, order: usize) -> Result<Self> {
        let mut configs = Vec::new();
        for (j, &t0) in f.singular_params().iter().enumerate() {
            let k = f.orders()[j];
            if let Some(k) = k {
                if k < 0 {
                    return Err(Error::InvalidArgument(format!(
                        "singular point {j} has a discontinuity (jump order {k}); the construction needs k ≥ 0"
                    )));
                }
            }
            let lambda = select_lambda(map, f, j)?;
            let theta = [
                map.boundary_angle(SidedPoint { t: t0, side: Side::One })?,
                map.boundary_angle(SidedPoint { t: t0, side: Side::Two })?,
            ];
            configs.push(SingularityConfig {
                index: j,
                t0,
                z0: f.arc().eval(t0)?,
                order: k,
                lambda,
                radius: f.common_radius(j),
                theta,
                orientation: [T::one(), -T::one()],
            });
        }
        Ok(Self { configs, contours: vec![], charges: vec![], orientation_evidence: vec![], order })
    }

    fn rebuild(&mut self, f: &PiecewiseAnalyticFunction<T>, map: &ExteriorMap<T>) -> Result<()> {
        self.contours.clear();
        self.charges.clear();
        let scale = (imag_unit::<T>() * T::TAU()).inv();
        for c in &self.configs {
            let mut pair = Vec::new();
            let mut charge = Vec::new();
            for i in 0..2 {
                let path = c.ray(map, i);
                let reach = (path.map.psi_offset(c.lambda - T::one(), c.theta[i])?.0 - c.z0).norm();
                let contour = RayContour::build(&path, reach * lit(0.125), self.order, c.orientation[i])?;
                charge.push(contour.nodes.iter().map(|q| q.weight * f.jump(c.index, q.zeta) * scale).collect());
                pair.push(contour);
            }
            let [a, b]: [RayContour<T>; 2] = pair.try_into().expect("two rays");
            let [ca, cb]: [Vec<Complex<T>>; 2] = charge.try_into().expect("two rays");
            self.contours.push([a, b]);
            self.charges.push([ca, cb]);
        }
        Ok(())
    }

    /// Contribution of singular point `j` to `h₁(z)`.
    pub fn h1_part(&self, j: usize, z: Complex<T>) -> Complex<T> {
        let mut s = Complex::new(T::zero(), T::zero());
        let (Some(contours), Some(charges)) = (self.contours.get(j), self.charges.get(j)) else { return s };
        for i in 0..2 {
            for (q, c) in contours[i].nodes.iter().zip(&charges[i]) {
                s += c / (q.zeta - z);
            }
        }
        s
    }

    pub fn h1(&self, z: Complex<T>) -> Complex<T> {
        (0..self.configs.len()).map(|j| self.h1_part(j, z)).sum()
    }

    /// `f − h₁` at the given arc parameters.
    pub fn h2_values(&self, f: &PiecewiseAnalyticFunction<T>, params: &[T], points: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
        params.iter().zip(points).map(|(&t, &z)| Ok(f.eval_param(t)? - self.h1(z))).collect()
    }

    /// Chooses, per singular point, the orientation under which `f − h₁` is
    /// best fitted by a polynomial of moderate degree.
    fn orient(&mut self, f: &PiecewiseAnalyticFunction<T>) -> Result<()> {
        let mut cluster = f.singular_params().to_vec();
        cluster.push(T::zero());
        cluster.push(f.arc().t_max());
        let nodes = discretize(f.arc(), 30 * (ORIENTATION_PROBE_DEGREE + 1), &cluster)?;
        let basis = OrthonormalBasis::new(&nodes.points, ORIENTATION_PROBE_DEGREE)?;
        let fvals = nodes.params.iter().map(|&t| f.eval_param(t)).collect::<Result<Vec<_>>>()?;
        let fscale = fvals.iter().map(|v| v.norm()).fold(T::zero(), T::max).max(T::one());
        self.orientation_evidence = vec![(T::zero(), T::zero()); self.configs.len()];
        for j in 0..self.configs.len() {
            let jump_scale = self.charges[j].iter().flatten().map(|c| c.norm()).fold(T::zero(), T::max);
            if !self.configs[j].has_jump() || jump_scale <= T::epsilon() * fscale {
                continue;
            }
            let parts: Vec<Vec<Complex<T>>> =
                (0..self.configs.len()).map(|l| nodes.points.iter().map(|&z| self.h1_part(l, z)).collect()).collect();
            // flipping both rays negates the contribution of singular point j
            let residual = |sign: T| -> T {
                let vals: Vec<Complex<T>> = (0..nodes.len())
                    .map(|i| {
                        let mut h = fvals[i];
                        for (l, p) in parts.iter().enumerate() {
                            h -= if l == j { p[i] * sign } else { p[i] };
                        }
                        h
                    })
                    .collect();
                let coeffs = basis.project(&vals, ORIENTATION_PROBE_DEGREE);
                let fit = basis.combine(&coeffs);
                vals.iter().zip(&fit).map(|(a, b)| (a - b).norm()).fold(T::zero(), T::max)
            };
            let keep = residual(T::one());
            let flip = residual(-T::one());
            let (chosen, rejected) = if flip < keep { (flip, keep) } else { (keep, flip) };
            if !(rejected > chosen * lit(10.0)) {
                return Err(Error::Consistency(format!(
                    "orientation at singular point {j} is ambiguous: probe residuals {:e} and {:e}",
                    keep.to_f64().unwrap_or(f64::NAN),
                    flip.to_f64().unwrap_or(f64::NAN)
                )));
            }
            if flip < keep {
                let c = &mut self.configs[j];
                c.orientation = [-c.orientation[0], -c.orientation[1]];
                for i in 0..2 {
                    self.contours[j][i].orientation = -self.contours[j][i].orientation;
                    for q in self.contours[j][i].nodes.iter_mut() {
                        q.weight = -q.weight;
                    }
                    for c in self.charges[j][i].iter_mut() {
                        *c = -*c;
                    }
                }
            }
            self.orientation_evidence[j] = (chosen, rejected);
        }
        Ok(())
    }
}
