//! Piecewise-affine straightening of `L ∪ Γ` onto a model wedge, its
//! polynomial approximation, and the parameter choices built on it.

use num_complex::Complex;

use super::contour::RayPath;
use crate::bestapprox::{discretize, OrthonormalBasis};
use crate::error::{Error, Result};
use crate::geometry::Arc;
use crate::linalg::fit_line;
use crate::poly::BasisPoly;
use crate::real::{cis, from_usize, lit, Real};

/// Degrees used to estimate the approximation rate of `F`.
pub const ALPHA_SWEEP: [usize; 9] = [2, 3, 4, 6, 8, 12, 16, 24, 32];
/// Minimal `R²` of the rate fit.
pub const ALPHA_MIN_R2: f64 = 0.8;
/// Largest wedge order tried.
pub const KAPPA_MAX: usize = 64;
/// Errors below this are treated as exact representation.
pub const EXACT_FLOOR: f64 = 1e-12;

/// Which piece of `L ∪ Γ` a sample lies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Piece {
    /// `L(z₁, z_j)`, mapped to `L′ ⊂ [0, ∞)`.
    Before,
    /// `L(z_j, z_m)`, mapped to `L″` at angle `φ`.
    After,
    /// The ray, mapped to `Γ̃` at angle `φ/2`.
    Ray,
}

#[derive(Debug, Clone, Copy)]
pub struct StraightSample<T> {
    pub z: Complex<T>,
    pub image: Complex<T>,
    pub piece: Piece,
}

/// Arclength-preserving map of each piece onto its model segment.
#[derive(Debug, Clone)]
pub struct StraighteningMap<T> {
    pub kappa: usize,
    pub phi: T,
    pub z0: Complex<T>,
    pub samples: Vec<StraightSample<T>>,
    /// `|L′|`, `|L″|`, `|Γ̃|`.
    pub lengths: [T; 3],
    /// Infimum and supremum of `|F(z) − F(ζ)|/|z − ζ|` over sampled pairs.
    pub lipschitz: (T, T),
}

/// Number of arc samples of the straightening map.
pub const ARC_SAMPLES: usize = 800;
/// Geometric ratio of ray offsets.
const RAY_RATIO: f64 = 0.8;
const RAY_LEVELS: usize = 160;

/// Builds `F` for the singular parameter `t0` and one ray. Polylines only.
pub fn build_straightening_map<T: Real, P: RayPath<T>>(arc: &Arc<T>, t0: T, ray: &P, kappa: usize) -> Result<StraighteningMap<T>> {
    if !arc.is_polyline() {
        return Err(Error::UnsupportedArc("the straightening map is built for polylines only".into()));
    }
    if kappa < 2 {
        return Err(Error::InvalidArgument("κ must be at least 2".into()));
    }
    let phi = T::TAU() / from_usize::<T>(kappa);
    let z0 = arc.eval(t0)?;
    let nodes = discretize(arc, ARC_SAMPLES, &[T::zero(), t0, arc.t_max()])?;
    let e_after = cis(phi);
    let e_ray = cis(phi * lit(0.5));
    let mut samples = Vec::with_capacity(nodes.len() + RAY_LEVELS);
    for (&t, &z) in nodes.params.iter().zip(&nodes.points) {
        if t <= t0 {
            let s = arc.subarc_length(t, t0)?;
            samples.push(StraightSample { z, image: Complex::new(s, T::zero()), piece: Piece::Before });
        } else {
            let s = arc.subarc_length(t0, t)?;
            samples.push(StraightSample { z, image: e_after * s, piece: Piece::After });
        }
    }
    // ray samples from z0 outward, arclength accumulated along the polygon
    let d_max = ray.d_max();
    let mut offsets: Vec<T> = (0..RAY_LEVELS).map(|l| d_max * lit::<T>(RAY_RATIO).powi(l as i32)).collect();
    offsets.reverse();
    let mut prev = z0;
    let mut s = T::zero();
    for d in offsets {
        let z = ray.point(d)?.zeta;
        s += (z - prev).norm();
        prev = z;
        samples.push(StraightSample { z, image: e_ray * s, piece: Piece::Ray });
    }
    let lengths = [arc.subarc_length(T::zero(), t0)?, arc.subarc_length(t0, arc.t_max())?, s];
    let lipschitz = lipschitz_bounds(&samples);
    Ok(StraighteningMap { kappa, phi, z0, samples, lengths, lipschitz })
}

fn lipschitz_bounds<T: Real>(samples: &[StraightSample<T>]) -> (T, T) {
    let stride = (samples.len() / 300).max(1);
    let sub: Vec<&StraightSample<T>> = samples.iter().step_by(stride).collect();
    let (mut lo, mut hi) = (T::infinity(), T::zero());
    for (i, a) in sub.iter().enumerate() {
        for b in &sub[i + 1..] {
            let dz = (a.z - b.z).norm();
            if dz > T::zero() {
                let r = (a.image - b.image).norm() / dz;
                lo = lo.min(r);
                hi = hi.max(r);
            }
        }
    }
    (lo, hi)
}

impl<T: Real> StraighteningMap<T> {
    pub fn points(&self) -> Vec<Complex<T>> {
        self.samples.iter().map(|s| s.z).collect()
    }

    pub fn images(&self) -> Vec<Complex<T>> {
        self.samples.iter().map(|s| s.image).collect()
    }

    /// Least-squares polynomials of the listed degrees on the samples.
    pub fn fitter(&self, max_degree: usize) -> Result<StraighteningFit<T>> {
        let basis = OrthonormalBasis::new(&self.points(), max_degree)?;
        Ok(StraighteningFit { basis, images: self.images() })
    }

    /// Sweep of sup errors over `ALPHA_SWEEP` and the fitted rate.
    pub fn rate(&self) -> Result<RateEstimate> {
        let fit = self.fitter(*ALPHA_SWEEP.last().expect("nonempty"))?;
        let errors: Vec<f64> = ALPHA_SWEEP
            .iter()
            .map(|&d| fit.approximate(d).map(|(_, e)| e.to_f64().unwrap_or(f64::NAN)))
            .collect::<Result<_>>()?;
        Ok(RateEstimate::from_sweep(&ALPHA_SWEEP, &errors))
    }
}

/// Orthonormal basis on the straightening samples.
#[derive(Debug, Clone)]
pub struct StraighteningFit<T> {
    pub basis: OrthonormalBasis<T>,
    pub images: Vec<Complex<T>>,
}

impl<T: Real> StraighteningFit<T> {
    /// `(Q_d, max |F − Q_d|)` where `Q_d` is the least-squares fit of the
    /// degree `d′ ≤ d` with the smallest sup error, so the error is
    /// nonincreasing in `d`.
    pub fn approximate(&self, d: usize) -> Result<(BasisPoly<T>, T)> {
        if d > self.basis.degree() {
            return Err(Error::DegreeBudget { requested: d, budget: self.basis.degree() });
        }
        let coeffs = self.basis.project(&self.images, d);
        let mut fit = vec![Complex::new(T::zero(), T::zero()); self.images.len()];
        let mut best = (T::infinity(), 0usize);
        for (k, c) in coeffs.iter().enumerate() {
            for (f, q) in fit.iter_mut().zip(&self.basis.columns[k]) {
                *f += q * c;
            }
            let err = self.images.iter().zip(&fit).map(|(a, b)| (a - b).norm()).fold(T::zero(), T::max);
            if err < best.0 {
                best = (err, k);
            }
        }
        let mut kept = coeffs;
        for c in kept.iter_mut().skip(best.1 + 1) {
            *c = Complex::new(T::zero(), T::zero());
        }
        Ok((self.basis.poly(kept)?, best.0))
    }
}

/// `(Q_d, supError)` for one degree.
pub fn approximate_straightening<T: Real>(f: &StraighteningMap<T>, d: usize) -> Result<(BasisPoly<T>, T)> {
    f.fitter(d.max(1))?.approximate(d)
}

/// Log-log fit of sup errors against degree.
#[derive(Debug, Clone, PartialEq)]
pub struct RateEstimate {
    pub degrees: Vec<usize>,
    pub errors: Vec<f64>,
    /// `α`; infinite when every error is below `EXACT_FLOOR`.
    pub alpha: f64,
    pub r_squared: f64,
    pub exact: bool,
}

impl RateEstimate {
    pub fn from_sweep(degrees: &[usize], errors: &[f64]) -> Self {
        let usable: Vec<(f64, f64)> = degrees
            .iter()
            .zip(errors)
            .filter(|(_, &e)| e > EXACT_FLOOR)
            .map(|(&d, &e)| ((d as f64).ln(), e.ln()))
            .collect();
        if usable.is_empty() {
            return Self { degrees: degrees.to_vec(), errors: errors.to_vec(), alpha: f64::INFINITY, r_squared: 1.0, exact: true };
        }
        let (x, y): (Vec<f64>, Vec<f64>) = usable.into_iter().unzip();
        let (alpha, r2) = match fit_line(&x, &y) {
            Some(f) => (-f.slope, f.r_squared),
            None => (0.0, 0.0),
        };
        Self { degrees: degrees.to_vec(), errors: errors.to_vec(), alpha, r_squared: r2, exact: false }
    }

    pub fn reliable(&self) -> bool {
        self.exact || (self.alpha > 0.0 && self.r_squared >= ALPHA_MIN_R2)
    }
}

/// Wedge parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WedgeParams {
    pub kappa: usize,
    pub beta: f64,
    pub zeta0: f64,
    pub alpha: f64,
}

/// Smallest `κ ≥ 2` with `1 − σ > 1/(1 + κα)`, `β` the midpoint of
/// `(1/(1+κα), 1−σ)`, `ζ₀ = 2·max(|L′|^κ, |L″|^κ)`.
pub fn select_theorem1_params(sigma: f64, alpha: f64, lengths: [f64; 2]) -> Result<WedgeParams> {
    if !(sigma > 0.0 && sigma < 1.0) {
        return Err(Error::InvalidArgument(format!("σ = {sigma} is outside (0, 1)")));
    }
    if !(alpha > 0.0) {
        return Err(Error::UnreliableFit(format!("α = {alpha} is not positive")));
    }
    for kappa in 2..=KAPPA_MAX {
        if let Some(beta) = admissible_beta(sigma, alpha, kappa) {
            let zeta0 = 2.0 * lengths[0].powi(kappa as i32).max(lengths[1].powi(kappa as i32));
            return Ok(WedgeParams { kappa, beta, zeta0, alpha });
        }
    }
    Err(Error::NoAdmissibleParameters(format!("no κ ≤ {KAPPA_MAX} satisfies 1 − σ > 1/(1 + κα) for σ = {sigma}, α = {alpha}")))
}

/// `β` for a given `κ`, if the inequality holds.
pub fn admissible_beta(sigma: f64, alpha: f64, kappa: usize) -> Option<f64> {
    let lower = if alpha.is_infinite() { 0.0 } else { 1.0 / (1.0 + kappa as f64 * alpha) };
    (1.0 - sigma > lower).then(|| 0.5 * (lower + 1.0 - sigma))
}

/// Partition of samples by the thresholds on `|Q|` and the distance of `Q`
/// to the model segments, with the angle bounds checked.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Classification {
    pub a1: usize,
    pub a2: usize,
    pub a3: usize,
    pub b1: usize,
    pub b2: usize,
    /// Arc samples in none of `A₁, A₂, A₃`.
    pub unassigned: usize,
    /// Largest `|arg Q^κ|` on `A₂ ∪ A₃`.
    pub max_arc_angle: f64,
    /// Largest `|arg Q^κ − π|` on `B₂`.
    pub max_ray_angle: f64,
    pub threshold: f64,
}

impl Classification {
    pub fn violation(&self) -> Option<String> {
        let q = std::f64::consts::FRAC_PI_4 * (1.0 + 1e-9);
        if self.max_arc_angle > q {
            return Some(format!("arg Q^κ reaches {:.4} on A₂ ∪ A₃", self.max_arc_angle));
        }
        if self.max_ray_angle > q {
            return Some(format!("arg Q^κ deviates from π by {:.4} on B₂", self.max_ray_angle));
        }
        if self.unassigned > 0 {
            return Some(format!("{} arc samples fall outside A₁ ∪ A₂ ∪ A₃", self.unassigned));
        }
        None
    }
}

/// Classifies samples of `F` with `c` the measured sup error of `Q`.
pub fn classify_points<T: Real>(map: &StraighteningMap<T>, q: &BasisPoly<T>, c: T) -> Classification {
    let kappa = map.kappa;
    let threshold = c / (T::PI() / lit::<T>(4.0 * kappa as f64)).sin();
    let after_end = cis(map.phi) * map.lengths[1];
    let mut out = Classification { threshold: threshold.to_f64().unwrap_or(f64::NAN), ..Default::default() };
    for s in &map.samples {
        let v = q.eval(s.z);
        let small = v.norm() < threshold;
        let arg = v.powu(kappa as u32).arg().to_f64().unwrap_or(f64::NAN);
        match s.piece {
            Piece::Before | Piece::After => {
                if small {
                    out.a1 += 1;
                } else if dist_to_segment(v, Complex::new(map.lengths[0], T::zero())) <= c * lit(1.0 + 1e-9) {
                    out.a2 += 1;
                    out.max_arc_angle = out.max_arc_angle.max(arg.abs());
                } else if dist_to_segment(v, after_end) <= c * lit(1.0 + 1e-9) {
                    out.a3 += 1;
                    out.max_arc_angle = out.max_arc_angle.max(arg.abs());
                } else {
                    out.unassigned += 1;
                }
            }
            Piece::Ray => {
                if small {
                    out.b1 += 1;
                } else {
                    out.b2 += 1;
                    let dev = std::f64::consts::PI - arg.abs();
                    out.max_ray_angle = out.max_ray_angle.max(dev);
                }
            }
        }
    }
    out
}

/// Distance from `v` to the segment `[0, end]`.
fn dist_to_segment<T: Real>(v: Complex<T>, end: Complex<T>) -> T {
    let len2 = end.norm_sqr();
    if len2 == T::zero() {
        return v.norm();
    }
    let t = ((v * end.conj()).re / len2).max(T::zero()).min(T::one());
    (v - end * t).norm()
}
