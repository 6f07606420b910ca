//! Exterior conformal map `Φ` of the arc complement onto `|w| > 1`, its
//! inverse `Ψ`, sided boundary correspondence, level lines, ρ-distances,
//! Γ-rays and Faber polynomials.

mod joukowski;
mod sc;

use num_complex::Complex;

pub use joukowski::Joukowski;
pub use sc::ScMap;

use crate::error::{Error, Result};
use crate::geometry::Arc;
use crate::poly::HessenbergBasis;
use crate::real::{cis, from_usize, lit, wrap_angle, Real};

/// Default map tolerance.
pub const DEFAULT_MAP_ACCURACY: f64 = 1e-8;
/// Faber degrees beyond this are refused.
pub const FABER_BUDGET: usize = 1024;

/// Bank of the slit. Side 1 lies to the right of the arc's direction and is
/// traversed forward by the counterclockwise unit circle; side 2 lies to
/// the left.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    One,
    Two,
}

impl Side {
    pub const BOTH: [Side; 2] = [Side::One, Side::Two];

    pub fn index(self) -> usize {
        match self {
            Side::One => 1,
            Side::Two => 2,
        }
    }
}

/// Arc parameter with a bank tag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SidedPoint<T> {
    pub t: T,
    pub side: Side,
}

#[derive(Debug, Clone)]
enum Backend<T> {
    Segment(Joukowski<T>),
    Polyline(Box<ScMap<T>>),
}

/// Numerical exterior map of an arc.
#[derive(Debug, Clone)]
pub struct ExteriorMap<T> {
    arc: Arc<T>,
    backend: Backend<T>,
    accuracy: T,
}

/// Sampled Γ-ray `Ψ(r e^{iθ₀})`, `r ∈ (1, λ]`.
#[derive(Debug, Clone)]
pub struct GammaRay<T> {
    pub theta: T,
    pub lambda: T,
    /// `(r, Ψ(r e^{iθ₀}))` with increasing `r`.
    pub samples: Vec<(T, Complex<T>)>,
    /// Range of `dist(ζ, L)/|ζ − z₀|` over the samples.
    pub ratio_min: T,
    pub ratio_max: T,
}

impl<T: Real> ExteriorMap<T> {
    /// Builds the map: closed form for a single segment, Schwarz–Christoffel
    /// for polylines. Arcs with circular pieces are not supported.
    pub fn new(arc: &Arc<T>, target: T) -> Result<Self> {
        let backend = if arc.pieces().len() == 1 && arc.is_polyline() {
            Backend::Segment(Joukowski::new(arc.start(), arc.end()))
        } else if arc.is_polyline() {
            Backend::Polyline(Box::new(ScMap::new(&arc.vertices(), target * lit(1e-3))?))
        } else {
            return Err(Error::UnsupportedArc("exterior maps are built for polylines only".into()));
        };
        let mut map = Self { arc: arc.clone(), backend, accuracy: T::zero() };
        let achieved = map.measure_round_trip()?;
        map.accuracy = achieved.max(T::epsilon() * lit(16.0));
        if !(achieved <= target) {
            return Err(Error::MapAccuracy {
                achieved: achieved.to_f64().unwrap_or(f64::NAN),
                requested: target.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(map)
    }

    fn measure_round_trip(&self) -> Result<T> {
        let mut worst = T::zero();
        for &r in &[1.01, 1.1, 2.0, 5.0] {
            for k in 0..16 {
                let w = cis(T::TAU() * (from_usize::<T>(k) + lit(0.37)) / lit(16.0)) * lit::<T>(r);
                let back = self.phi(self.psi(w)?)?;
                worst = worst.max((back - w).norm());
            }
        }
        Ok(worst)
    }

    pub fn arc(&self) -> &Arc<T> {
        &self.arc
    }

    /// Measured round-trip accuracy `ε_map`.
    pub fn accuracy(&self) -> T {
        self.accuracy
    }

    pub fn is_closed_form(&self) -> bool {
        matches!(self.backend, Backend::Segment(_))
    }

    pub fn capacity(&self) -> T {
        match &self.backend {
            Backend::Segment(j) => j.capacity(),
            Backend::Polyline(s) => s.capacity(),
        }
    }

    /// Laurent coefficients `c_0, c_1, …` of `Ψ(w) = cap·w + Σ c_j w^{−j}`.
    pub fn laurent(&self, count: usize) -> Vec<Complex<T>> {
        match &self.backend {
            Backend::Segment(j) => j.laurent(count),
            Backend::Polyline(s) => {
                let mut c = s.laurent().to_vec();
                c.resize(count.max(1), Complex::new(T::zero(), T::zero()));
                c
            }
        }
    }

    fn check_outside(w: Complex<T>) -> Result<()> {
        let r = w.norm();
        if !(r >= T::one() - T::epsilon() * lit(64.0)) {
            return Err(Error::InsideDisk(r.to_f64().unwrap_or(f64::NAN)));
        }
        Ok(())
    }

    /// `Ψ(w)` for `|w| ≥ 1`.
    pub fn psi(&self, w: Complex<T>) -> Result<Complex<T>> {
        Self::check_outside(w)?;
        Ok(match &self.backend {
            Backend::Segment(j) => j.psi(w),
            Backend::Polyline(s) => s.psi(w),
        })
    }

    pub fn psi_prime(&self, w: Complex<T>) -> Result<Complex<T>> {
        Self::check_outside(w)?;
        Ok(match &self.backend {
            Backend::Segment(j) => j.psi_prime(w),
            Backend::Polyline(s) => s.psi_prime(w),
        })
    }

    /// `Ψ(r e^{iθ})` and `Ψ'(r e^{iθ})`; exact in `r − 1` when `θ` is a
    /// prevertex angle of a polyline map.
    pub fn psi_polar(&self, r: T, theta: T) -> Result<(Complex<T>, Complex<T>)> {
        let w = cis(theta) * r;
        Self::check_outside(w)?;
        if let Backend::Polyline(s) = &self.backend {
            if let Some(k) = s.prevertex_angles().iter().position(|&t| t == theta) {
                let d = r - T::one();
                return Ok((s.psi_radial(k, d), s.psi_prime_radial(k, d)));
            }
        }
        Ok((self.psi(w)?, self.psi_prime(w)?))
    }

    /// `Ψ((1+d)e^{iθ})` and `Ψ'` with the offset `d > 0` passed separately,
    /// so rays keep full relative accuracy as `d → 0`.
    pub fn psi_offset(&self, d: T, theta: T) -> Result<(Complex<T>, Complex<T>)> {
        if !(d > T::zero()) {
            return Err(Error::InsideDisk((T::one() + d).to_f64().unwrap_or(f64::NAN)));
        }
        match &self.backend {
            Backend::Segment(j) => {
                let r = T::one() + d;
                let e = cis(theta);
                // (r ± 1/r)/2 written in d to avoid cancellation
                let plus = T::one() + d * d / (r + r);
                let minus = d * (lit::<T>(2.0) + d) / (r + r);
                let rel = theta - j.angle;
                let x = Complex::new(rel.cos() * plus, rel.sin() * minus);
                let psi = j.center + cis(j.angle) * x * j.half_length;
                Ok((psi, j.psi_prime(e * r)))
            }
            Backend::Polyline(s) => {
                if let Some(k) = s.prevertex_angles().iter().position(|&t| wrap_angle(t) == wrap_angle(theta)) {
                    return Ok((s.psi_radial(k, d), s.psi_prime_radial(k, d)));
                }
                let w = cis(theta) * (T::one() + d);
                Ok((s.psi(w), s.psi_prime(w)))
            }
        }
    }

    /// `Φ(z)` for `z` off the arc, by damped Newton iteration on `Ψ(w) = z`.
    pub fn phi(&self, z: Complex<T>) -> Result<Complex<T>> {
        let scale = self.arc.length();
        let (t, dist) = self.arc.nearest(z);
        if dist <= scale * T::epsilon() * lit(4.0) {
            return Err(Error::OnArc(format!("{z}")));
        }
        if let Backend::Segment(j) = &self.backend {
            return Ok(j.phi(z));
        }
        let mut candidates = Vec::new();
        let cap = self.capacity();
        let c0 = self.laurent(1)[0];
        let far = (z - c0) / cap;
        if far.norm() > lit(1.2) {
            candidates.push(far);
        }
        let tangent = self.arc.derivative(t.min(self.arc.t_max()))?;
        let cross = (tangent.conj() * (z - self.arc.eval(t)?)).im;
        let side = if cross > T::zero() { Side::Two } else { Side::One };
        let theta = self.boundary_angle(SidedPoint { t, side })?;
        let mut eta = lit::<T>(0.5);
        while eta > lit(1e-14) {
            candidates.push(cis(theta) * (T::one() + eta));
            eta *= lit(0.25);
        }
        let mut best = candidates[0];
        let mut best_r = T::infinity();
        for w in candidates {
            let r = (self.psi(w)? - z).norm();
            if r < best_r {
                best_r = r;
                best = w;
            }
        }
        let mut w = best;
        let mut res = best_r;
        for _ in 0..100 {
            if res <= scale * T::epsilon() * lit(8.0) {
                break;
            }
            let step = (self.psi(w)? - z) / self.psi_prime(w)?;
            let mut lambda = T::one();
            let mut accepted = false;
            for _ in 0..40 {
                let mut wn = w - step * lambda;
                let rn = wn.norm();
                if rn < T::one() {
                    let target = T::one() + (w.norm() - T::one()) * lit(0.5);
                    wn = wn * (target / rn);
                }
                let resn = (self.psi(wn)? - z).norm();
                if resn < res {
                    w = wn;
                    res = resn;
                    accepted = true;
                    break;
                }
                lambda *= lit(0.5);
            }
            if !accepted {
                break;
            }
        }
        if !(res <= scale * lit(1e-10)) {
            return Err(Error::Solver(format!(
                "Φ Newton iteration stalled with residual {:e}",
                res.to_f64().unwrap_or(f64::NAN)
            )));
        }
        Ok(w)
    }

    /// Angles `(τ₁, τ₂)` of the start and end points of the arc.
    pub fn endpoint_angles(&self) -> (T, T) {
        match &self.backend {
            Backend::Segment(j) => (wrap_angle(j.angle + T::PI()), wrap_angle(j.angle)),
            Backend::Polyline(s) => {
                let p = self.arc.pieces().len();
                let th = s.prevertex_angles();
                (wrap_angle(th[0]), wrap_angle(th[s.prevertex_of(p, true)]))
            }
        }
    }

    /// Angular interval `[a, b]` (with `a < b`, possibly beyond 2π) of the
    /// circle arc corresponding to one side.
    pub fn side_interval(&self, side: Side) -> (T, T) {
        let (t1, t2) = self.endpoint_angles();
        let mut t2u = t2;
        while t2u <= t1 {
            t2u += T::TAU();
        }
        match side {
            Side::One => (t1, t2u),
            Side::Two => (t2u, t1 + T::TAU()),
        }
    }

    /// Boundary angle `θ ∈ [0, 2π)` with `Ψ(e^{iθ})` equal to the sided point.
    pub fn boundary_angle(&self, p: SidedPoint<T>) -> Result<T> {
        let tmax = self.arc.t_max();
        if !(p.t >= T::zero() && p.t <= tmax) {
            return Err(Error::ParameterOutOfRange {
                t: p.t.to_f64().unwrap_or(f64::NAN),
                lo: 0.0,
                hi: tmax.to_f64().unwrap_or(f64::NAN),
            });
        }
        match &self.backend {
            Backend::Segment(j) => {
                let x = (lit::<T>(2.0) * p.t - T::one()).max(-T::one()).min(T::one());
                let a = x.acos();
                let theta = match p.side {
                    Side::One => T::TAU() - a,
                    Side::Two => a,
                };
                Ok(wrap_angle(theta + j.angle))
            }
            Backend::Polyline(s) => {
                let np = self.arc.pieces().len();
                let i = p.t.floor().to_usize().unwrap_or(0).min(np - 1);
                let frac = p.t - from_usize(i);
                let right = p.side == Side::One;
                let len = self.arc.pieces()[i].length();
                let th = s.prevertex_angles();
                if frac == T::zero() {
                    return Ok(wrap_angle(th[s.prevertex_of(i, right)]));
                }
                if frac == T::one() {
                    return Ok(wrap_angle(th[s.prevertex_of(i + 1, right)]));
                }
                let theta = if right {
                    s.angle_on_edge(s.prevertex_of(i, true), frac * len)
                } else {
                    s.angle_on_edge(s.prevertex_of(i + 1, false), (T::one() - frac) * len)
                };
                Ok(wrap_angle(theta))
            }
        }
    }

    /// Whether `θ` is a prevertex angle, so that rays from it are evaluated
    /// exactly in `r − 1`.
    pub fn prevertex_angle(&self, theta: T) -> Option<T> {
        match &self.backend {
            Backend::Segment(_) => None,
            Backend::Polyline(s) => s.prevertex_angles().iter().copied().find(|&t| wrap_angle(t) == theta),
        }
    }

    /// Samples of the level line `Ψ((1+u)e^{iθ})` over the side's angular arc,
    /// endpoints included.
    pub fn level_line(&self, u: T, side: Side, count: usize) -> Result<Vec<Complex<T>>> {
        if !(u > T::zero()) {
            return Err(Error::InvalidArgument("level line needs u > 0".into()));
        }
        let (a, b) = self.side_interval(side);
        let n = count.max(2);
        (0..n)
            .map(|k| {
                let th = a + (b - a) * from_usize::<T>(k) / from_usize::<T>(n - 1);
                self.psi(cis(th) * (T::one() + u))
            })
            .collect::<Result<Vec<_>>>()
            .map(|mut v| {
                v.truncate(count);
                v
            })
    }

    /// `dist(z₀, L^j_u)`: dense sampling, golden-section refinement around the
    /// minimizer, sample density doubled until the value settles to 0.1%.
    pub fn rho(&self, z0: Complex<T>, u: T, side: Side) -> Result<T> {
        if !(u > T::zero()) {
            return Err(Error::InvalidArgument("ρ needs u > 0".into()));
        }
        let (a, b) = self.side_interval(side);
        let r = T::one() + u;
        let dist = |th: T| -> Result<T> { Ok((self.psi(cis(th) * r)? - z0).norm()) };
        let mut count = 512usize;
        let mut previous: Option<T> = None;
        loop {
            let h = (b - a) / from_usize::<T>(count);
            let mut best = (T::infinity(), a);
            for k in 0..=count {
                let th = a + h * from_usize::<T>(k);
                let d = dist(th)?;
                if d < best.0 {
                    best = (d, th);
                }
            }
            let mut lo = (best.1 - h).max(a);
            let mut hi = (best.1 + h).min(b);
            let g = lit::<T>(0.618_033_988_749_894_8);
            for _ in 0..2 {
                let mut x1 = hi - (hi - lo) * g;
                let mut x2 = lo + (hi - lo) * g;
                let mut f1 = dist(x1)?;
                let mut f2 = dist(x2)?;
                for _ in 0..60 {
                    if f1 < f2 {
                        hi = x2;
                        x2 = x1;
                        f2 = f1;
                        x1 = hi - (hi - lo) * g;
                        f1 = dist(x1)?;
                    } else {
                        lo = x1;
                        x1 = x2;
                        f1 = f2;
                        x2 = lo + (hi - lo) * g;
                        f2 = dist(x2)?;
                    }
                }
                best.0 = best.0.min(f1.min(f2));
                let c = (lo + hi) * lit(0.5);
                lo = (c - h * lit(0.25)).max(a);
                hi = (c + h * lit(0.25)).min(b);
            }
            if let Some(p) = previous {
                if (best.0 - p).abs() <= p * lit(1e-3) || count >= 1 << 14 {
                    return Ok(best.0.min(p));
                }
            }
            previous = Some(best.0);
            count *= 2;
        }
    }

    /// `ρ*_u(z₀) = max_j ρ^j_u(z₀)`.
    pub fn rho_star(&self, z0: Complex<T>, u: T) -> Result<T> {
        Ok(self.rho(z0, u, Side::One)?.max(self.rho(z0, u, Side::Two)?))
    }

    /// Γ-ray from the sided point `p`: samples at `r = 1 + (λ−1)(k/count)²`.
    pub fn gamma_ray(&self, p: SidedPoint<T>, lambda: T, count: usize) -> Result<GammaRay<T>> {
        if !(lambda > T::one()) {
            return Err(Error::InvalidArgument("Γ-ray needs λ > 1".into()));
        }
        let tmax = self.arc.t_max();
        if !(p.t > T::zero() && p.t < tmax) {
            return Err(Error::InvalidArgument("Γ-ray needs an interior arc point".into()));
        }
        let theta = self.boundary_angle(p)?;
        let z0 = self.arc.eval(p.t)?;
        let mut samples = Vec::with_capacity(count);
        let (mut lo, mut hi) = (T::infinity(), T::zero());
        for k in 1..=count.max(1) {
            let f = from_usize::<T>(k) / from_usize::<T>(count.max(1));
            let r = T::one() + (lambda - T::one()) * f * f;
            let (zeta, _) = self.psi_polar(r, theta)?;
            let ratio = self.arc.distance(zeta) / (zeta - z0).norm();
            lo = lo.min(ratio);
            hi = hi.max(ratio);
            samples.push((r, zeta));
        }
        Ok(GammaRay { theta, lambda, samples, ratio_min: lo, ratio_max: hi })
    }

    /// Faber polynomials `F_0 … F_n` as a Hessenberg recurrence.
    pub fn faber_basis(&self, n: usize) -> Result<HessenbergBasis<T>> {
        if n > FABER_BUDGET {
            return Err(Error::DegreeBudget { requested: n, budget: FABER_BUDGET });
        }
        let lead = self.capacity().powi(-(n as i32));
        if !lead.is_finite() || lead == T::zero() {
            return Err(Error::DegreeBudget { requested: n, budget: FABER_BUDGET.min(n.saturating_sub(1)) });
        }
        HessenbergBasis::faber(self.capacity(), &self.laurent(n.max(1)), n)
    }
}
