//! Gauss–Legendre discretization of Γ-rays with dyadic panels in the
//! distance to the singular point.

use num_complex::Complex;

use crate::conformal::ExteriorMap;
use crate::error::{Error, Result};
use crate::quadrature::GaussLegendre;
use crate::real::{cis, lit, Real};

/// Point of a ray at offset `d` from its base: `ζ`, `dζ/dd`, and the
/// values `w = Φ(ζ)`, `Φ'(ζ)` used by the Faber kernel.
#[derive(Debug, Clone, Copy)]
pub struct RayPoint<T> {
    pub zeta: Complex<T>,
    pub dzeta: Complex<T>,
    pub w: Complex<T>,
    pub dphi: Complex<T>,
}

/// Curve `d ↦ ζ(d)`, `d ∈ (0, d_max]`, leaving `z₀` as `d → 0` with
/// `|ζ(d) − z₀|` increasing.
pub trait RayPath<T: Real> {
    fn base(&self) -> Complex<T>;
    fn d_max(&self) -> T;
    fn point(&self, d: T) -> Result<RayPoint<T>>;
}

/// Γ-ray `Ψ((1+d)e^{iθ})`, `d ∈ (0, λ−1]`.
#[derive(Debug, Clone, Copy)]
pub struct MapRay<'a, T> {
    pub map: &'a ExteriorMap<T>,
    pub theta: T,
    pub lambda: T,
    pub z0: Complex<T>,
}

impl<T: Real> RayPath<T> for MapRay<'_, T> {
    fn base(&self) -> Complex<T> {
        self.z0
    }

    fn d_max(&self) -> T {
        self.lambda - T::one()
    }

    fn point(&self, d: T) -> Result<RayPoint<T>> {
        let (zeta, dpsi) = self.map.psi_offset(d, self.theta)?;
        let e = cis(self.theta);
        Ok(RayPoint { zeta, dzeta: dpsi * e, w: e * (T::one() + d), dphi: dpsi.inv() })
    }
}

/// Straight segment `z₀ + d·e^{iθ}`, `d ∈ (0, ℓ]`; `w` and `Φ'` are
/// placeholders (`1 + d`, `1`).
#[derive(Debug, Clone, Copy)]
pub struct StraightRay<T> {
    pub z0: Complex<T>,
    pub direction: T,
    pub length: T,
}

impl<T: Real> RayPath<T> for StraightRay<T> {
    fn base(&self) -> Complex<T> {
        self.z0
    }

    fn d_max(&self) -> T {
        self.length
    }

    fn point(&self, d: T) -> Result<RayPoint<T>> {
        let e = cis(self.direction);
        let one = Complex::new(T::one(), T::zero());
        Ok(RayPoint { zeta: self.z0 + e * d, dzeta: e, w: one * (T::one() + d), dphi: one })
    }
}

/// Quadrature node on a ray. `weight` includes `dζ/dd` and the orientation.
#[derive(Debug, Clone, Copy)]
pub struct ContourNode<T> {
    pub zeta: Complex<T>,
    pub w: Complex<T>,
    pub dphi: Complex<T>,
    pub weight: Complex<T>,
    /// `|ζ − z₀|`.
    pub dist: T,
    /// Whether the node belongs to `γ = {|ζ − z₀| ≥ split}`.
    pub outer: bool,
}

/// Panel `[d0, d1]` in the ray offset.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Panel<T> {
    pub d0: T,
    pub d1: T,
    pub outer: bool,
}

/// Relative distance below which the inner part is truncated.
pub const INNER_FLOOR: f64 = 1e-15;

/// Discretized ray.
#[derive(Debug, Clone)]
pub struct RayContour<T> {
    pub z0: Complex<T>,
    /// `+1` from `z₀` outward, `−1` toward `z₀`.
    pub orientation: T,
    /// Split radius `d_n` (distance from `z₀`).
    pub split: T,
    /// Ray offset at the split (equal to `d_max` when the whole ray is inner).
    pub d_split: T,
    pub order: usize,
    pub panels: Vec<Panel<T>>,
    pub nodes: Vec<ContourNode<T>>,
    /// `|ζ(d_max) − z₀|`.
    pub reach: T,
}

impl<T: Real> RayContour<T> {
    /// Dyadic breakpoints `split·2^{±l}` in `|ζ − z₀|`, found by bisection in
    /// `log d`, panels of `order` Gauss–Legendre nodes in `d`.
    pub fn build<P: RayPath<T>>(path: &P, split: T, order: usize, orientation: T) -> Result<Self> {
        if !(split > T::zero()) {
            return Err(Error::InvalidArgument("split radius must be positive".into()));
        }
        let z0 = path.base();
        let d_max = path.d_max();
        let reach = (path.point(d_max)?.zeta - z0).norm();
        let floor = reach * lit(INNER_FLOOR);
        let split_eff = split.min(reach);
        let d_split = if split >= reach { d_max } else { offset_at(path, split, d_max)? };
        // breakpoints in increasing d
        let mut inner = vec![d_split];
        let mut s = split_eff;
        while s > floor {
            s = s * lit(0.5);
            inner.push(offset_at(path, s.max(floor), d_split)?);
        }
        inner.reverse();
        let mut outer = vec![d_split];
        if split < reach {
            let mut s = split;
            loop {
                s = s + s;
                if s >= reach * lit(0.75) {
                    break;
                }
                outer.push(offset_at(path, s, d_max)?);
            }
            outer.push(d_max);
        }
        let mut panels = Vec::new();
        for w in inner.windows(2) {
            if w[1] > w[0] {
                panels.push(Panel { d0: w[0], d1: w[1], outer: false });
            }
        }
        for w in outer.windows(2) {
            if w[1] > w[0] {
                panels.push(Panel { d0: w[0], d1: w[1], outer: true });
            }
        }
        Self::from_panels(path, split, d_split, order, orientation, panels, reach)
    }

    fn from_panels<P: RayPath<T>>(
        path: &P,
        split: T,
        d_split: T,
        order: usize,
        orientation: T,
        panels: Vec<Panel<T>>,
        reach: T,
    ) -> Result<Self> {
        let rule = GaussLegendre::<T>::new(order);
        let z0 = path.base();
        let mut nodes = Vec::with_capacity(panels.len() * order);
        for p in &panels {
            for (d, wt) in rule.on(p.d0, p.d1) {
                let q = path.point(d)?;
                nodes.push(ContourNode {
                    zeta: q.zeta,
                    w: q.w,
                    dphi: q.dphi,
                    weight: q.dzeta * (wt * orientation),
                    dist: (q.zeta - z0).norm(),
                    outer: p.outer,
                });
            }
        }
        Ok(Self { z0, orientation, split, d_split, order, panels, nodes, reach })
    }

    /// Same ray with every panel bisected.
    pub fn doubled<P: RayPath<T>>(&self, path: &P) -> Result<Self> {
        let half = lit::<T>(0.5);
        let panels = self
            .panels
            .iter()
            .flat_map(|p| {
                let mid = (p.d0 + p.d1) * half;
                [Panel { d0: p.d0, d1: mid, outer: p.outer }, Panel { d0: mid, d1: p.d1, outer: p.outer }]
            })
            .collect();
        Self::from_panels(path, self.split, self.d_split, self.order, self.orientation, panels, self.reach)
    }

    /// `∫ g(ζ) dζ` over the whole ray.
    pub fn integrate<G: Fn(Complex<T>) -> Complex<T>>(&self, g: G) -> Complex<T> {
        self.nodes.iter().map(|q| g(q.zeta) * q.weight).sum()
    }

    pub fn outer_count(&self) -> usize {
        self.nodes.iter().filter(|q| q.outer).count()
    }
}

/// Offset `d ∈ (0, hi]` with `|ζ(d) − z₀| = s`.
fn offset_at<T: Real, P: RayPath<T>>(path: &P, s: T, hi: T) -> Result<T> {
    let z0 = path.base();
    let dist = |d: T| -> Result<T> { Ok((path.point(d)?.zeta - z0).norm()) };
    if dist(hi)? <= s {
        return Ok(hi);
    }
    let mut lo_log = hi.ln() - lit(745.0);
    let mut hi_log = hi.ln();
    for _ in 0..200 {
        let mid = (lo_log + hi_log) * lit(0.5);
        if dist(mid.exp())? < s {
            lo_log = mid;
        } else {
            hi_log = mid;
        }
        if hi_log - lo_log < lit(1e-13) {
            break;
        }
    }
    Ok(((lo_log + hi_log) * lit(0.5)).exp())
}

/// Integral of `g` along a ray split at `split`, with an error estimate from
/// panel doubling.
#[derive(Debug, Clone, Copy)]
pub struct ContourIntegral<T> {
    pub value: Complex<T>,
    pub outer: Complex<T>,
    pub inner: Complex<T>,
    pub error: T,
}

pub fn quadrature_contour<T, P, G>(path: &P, split: T, order: usize, g: G) -> Result<ContourIntegral<T>>
where
    T: Real,
    P: RayPath<T>,
    G: Fn(Complex<T>) -> Complex<T>,
{
    let c = RayContour::build(path, split, order, T::one())?;
    let fine = c.doubled(path)?;
    let part = |outer: bool| -> Complex<T> { c.nodes.iter().filter(|q| q.outer == outer).map(|q| g(q.zeta) * q.weight).sum() };
    let value = c.integrate(&g);
    let error = (fine.integrate(&g) - value).norm();
    Ok(ContourIntegral { value, outer: part(true), inner: part(false), error })
}
