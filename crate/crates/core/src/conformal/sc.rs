//! Schwarz–Christoffel map of the exterior of the unit disk onto the
//! complement of a polyline slit.
//!
//! `Ψ'(w) = cap·Π_k (1 − w_k/w)^{a_k}` with prevertices `w_k = e^{iθ_k}`
//! listed counterclockwise: the start tip, the corners along the right bank,
//! the end tip, then the corners along the left bank. Tips carry `a = 1`;
//! a corner turning left by `δ` carries `a = δ/π` on the right bank and
//! `−δ/π` on the left bank.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::linalg::solve_real;
use crate::quadrature::{graded_panels, grading_levels, integrate_panels, GaussLegendre};
use crate::real::{cis, from_usize, lit, Real};

/// Radius beyond which `Ψ` is summed from its Laurent series.
const LAURENT_RADIUS: f64 = 1.1;
/// Number of Laurent coefficients kept.
const LAURENT_TERMS: usize = 1024;
const GRADE: f64 = 0.25;

/// Which bank of the slit a prevertex belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bank {
    Tip,
    Right,
    Left,
}

#[derive(Debug, Clone)]
pub struct ScMap<T> {
    cap: T,
    theta: Vec<T>,
    expo: Vec<T>,
    image: Vec<Complex<T>>,
    vertex: Vec<(usize, Bank)>,
    laurent: Vec<Complex<T>>,
    rule: GaussLegendre<T>,
    edge_residual: T,
    scale: T,
}

fn wrap_pm<T: Real>(x: T) -> T {
    let tau = T::TAU();
    let mut y = x % tau;
    if y > T::PI() {
        y -= tau;
    } else if y <= -T::PI() {
        y += tau;
    }
    y
}

/// `1 − e^{−iφ}/(1+s)`, accurate for small `s` and `φ`.
fn one_minus<T: Real>(s: T, phi: T) -> Complex<T> {
    let half = phi * lit(0.5);
    let sh = half.sin();
    Complex::new(s + lit::<T>(2.0) * sh * sh, phi.sin()) / (T::one() + s)
}

/// Prevertex bookkeeping shared by the solver and the map.
struct Layout<T> {
    expo: Vec<T>,
    image: Vec<Complex<T>>,
    vertex: Vec<(usize, Bank)>,
}

fn layout<T: Real>(vertices: &[Complex<T>]) -> Result<Layout<T>> {
    let p = vertices.len() - 1;
    let mut turn = vec![T::zero(); p + 1];
    for i in 1..p {
        let din = vertices[i] - vertices[i - 1];
        let dout = vertices[i + 1] - vertices[i];
        let delta = (dout / din).arg();
        if delta.abs() >= T::PI() * lit(0.999_999) {
            return Err(Error::UnsupportedArc("polyline folds back on itself".into()));
        }
        turn[i] = delta / T::PI();
    }
    let mut expo = Vec::with_capacity(2 * p);
    let mut image = Vec::with_capacity(2 * p);
    let mut vertex = Vec::with_capacity(2 * p);
    expo.push(T::one());
    image.push(vertices[0]);
    vertex.push((0, Bank::Tip));
    for i in 1..p {
        expo.push(turn[i]);
        image.push(vertices[i]);
        vertex.push((i, Bank::Right));
    }
    expo.push(T::one());
    image.push(vertices[p]);
    vertex.push((p, Bank::Tip));
    for i in (1..p).rev() {
        expo.push(-turn[i]);
        image.push(vertices[i]);
        vertex.push((i, Bank::Left));
    }
    Ok(Layout { expo, image, vertex })
}

/// Integrand machinery parametrized by prevertex angles and exponents.
struct Kernel<'a, T> {
    theta: &'a [T],
    expo: &'a [T],
    cap: T,
    rule: &'a GaussLegendre<T>,
}

impl<T: Real> Kernel<'_, T> {
    /// `Ψ'` at `w = (1+s)e^{i(θ_base+φ)}`.
    fn deriv(&self, base: usize, s: T, phi: T) -> Complex<T> {
        let mut acc = Complex::new(self.cap, T::zero());
        let tb = self.theta[base];
        for (j, (&tj, &a)) in self.theta.iter().zip(self.expo).enumerate() {
            let pj = if j == base { phi } else { wrap_pm(tb + phi - tj) };
            let u = one_minus(s, pj);
            acc *= if a == T::one() { u } else { u.powf(a) };
        }
        acc
    }

    fn levels(&self, base: usize, reach: T, floor: T) -> usize {
        let target = (floor / reach.abs()).max(lit(1e-300)).min(lit(0.5));
        grading_levels(self.expo[base], lit(GRADE), target)
    }

    /// `∫_0^{s_end} Ψ'((1+σ)e^{iθ_k}) e^{iθ_k} dσ`.
    fn radial(&self, base: usize, s_end: T) -> Complex<T> {
        if s_end == T::zero() {
            return Complex::new(T::zero(), T::zero());
        }
        let e = cis(self.theta[base]);
        let panels = graded_panels(T::zero(), s_end, lit(GRADE), self.levels(base, s_end, lit(1e-17)));
        integrate_panels(self.rule, &panels, |sig| self.deriv(base, sig, T::zero())) * e
    }

    /// `∫_0^{φ_end} Ψ'(w) i w dφ` along `w = (1+s)e^{i(θ_k+φ)}`.
    fn circular(&self, base: usize, s: T, phi_end: T) -> Complex<T> {
        if phi_end == T::zero() {
            return Complex::new(T::zero(), T::zero());
        }
        let r = T::one() + s;
        let tb = self.theta[base];
        let floor = if s > T::zero() { s * lit(0.05) } else { lit(1e-17) };
        let levels = self.levels(base, phi_end, floor.min(phi_end.abs() * lit(0.5)));
        let panels = graded_panels(T::zero(), phi_end, lit(GRADE), levels);
        integrate_panels(self.rule, &panels, |phi| {
            let w = cis(tb + phi) * r;
            self.deriv(base, s, phi) * Complex::new(-w.im, w.re)
        })
    }

    /// Image of the boundary edge from prevertex `e` to the next one.
    fn edge(&self, e: usize) -> Complex<T> {
        let m = self.theta.len();
        let next = (e + 1) % m;
        let mut len = self.theta[next] - self.theta[e];
        if next == 0 {
            len += T::TAU();
        }
        let half = len * lit(0.5);
        self.circular(e, T::zero(), half) - self.circular(next, T::zero(), -half)
    }
}

fn unpack<T: Real>(x: &[T], m: usize) -> (Vec<T>, T) {
    // x = [θ_0, logits_1 .. logits_{m−1}, ln cap]; the last gap has logit 0
    let mut weights: Vec<T> = (0..m).map(|i| if i + 1 < m { x[1 + i] } else { T::zero() }).collect();
    let mx = weights.iter().copied().fold(T::neg_infinity(), T::max);
    for v in weights.iter_mut() {
        *v = (*v - mx).exp();
    }
    let total: T = weights.iter().copied().sum();
    let mut theta = Vec::with_capacity(m);
    let mut acc = x[0];
    for g in weights.iter().take(m) {
        theta.push(acc);
        acc += T::TAU() * *g / total;
    }
    (theta, x[m].exp())
}

fn residuals<T: Real>(x: &[T], lay: &Layout<T>, rule: &GaussLegendre<T>, scale: T) -> Vec<T> {
    let m = lay.expo.len();
    let (theta, cap) = unpack(x, m);
    let k = Kernel { theta: &theta, expo: &lay.expo, cap, rule };
    let mut out = Vec::with_capacity(2 * m + 2);
    for e in 0..m {
        let want = lay.image[(e + 1) % m] - lay.image[e];
        let d = (k.edge(e) - want) / scale;
        out.push(d.re);
        out.push(d.im);
    }
    let res = theta
        .iter()
        .zip(&lay.expo)
        .fold(Complex::new(T::zero(), T::zero()), |acc, (&t, &a)| acc + cis(t) * a);
    out.push(res.re);
    out.push(res.im);
    out
}

fn sumsq<T: Real>(r: &[T]) -> T {
    r.iter().map(|v| *v * *v).sum()
}

impl<T: Real> ScMap<T> {
    /// Solves the parameter problem for the polyline through `vertices`.
    pub fn new(vertices: &[Complex<T>], target: T) -> Result<Self> {
        if vertices.len() < 2 {
            return Err(Error::DegenerateArc("polyline needs two vertices".into()));
        }
        let lay = layout(vertices)?;
        let m = lay.expo.len();
        let rule = GaussLegendre::new(16);
        let lengths: Vec<T> = (0..m).map(|e| (lay.image[(e + 1) % m] - lay.image[e]).norm()).collect();
        let scale: T = lengths.iter().copied().sum::<T>() * lit(0.5);
        // initial guess: gaps proportional to edge lengths, chord-based rotation
        let mut x = vec![T::zero(); m + 1];
        let chord = vertices[vertices.len() - 1] - vertices[0];
        x[0] = chord.arg() + T::PI();
        for i in 0..m - 1 {
            x[1 + i] = (lengths[i] / lengths[m - 1]).ln();
        }
        x[m] = (chord.norm() * lit(0.25)).max(scale * lit(0.1)).ln();
        let mut r = residuals(&x, &lay, &rule, scale);
        let mut f = sumsq(&r);
        let mut mu = lit::<T>(1e-3);
        let tiny = lit::<T>(1e-30);
        for _ in 0..200 {
            if f < tiny {
                break;
            }
            let nvar = x.len();
            let h = lit::<T>(1e-7);
            let mut jac = vec![vec![T::zero(); nvar]; r.len()];
            for v in 0..nvar {
                let mut xp = x.clone();
                let mut xm = x.clone();
                xp[v] += h;
                xm[v] -= h;
                let rp = residuals(&xp, &lay, &rule, scale);
                let rm = residuals(&xm, &lay, &rule, scale);
                for (row, (a, b)) in jac.iter_mut().zip(rp.iter().zip(&rm)) {
                    row[v] = (*a - *b) / (h + h);
                }
            }
            let mut jtj = vec![vec![T::zero(); nvar]; nvar];
            let mut jtr = vec![T::zero(); nvar];
            for (row, ri) in jac.iter().zip(&r) {
                for a in 0..nvar {
                    jtr[a] += row[a] * *ri;
                    for b in 0..nvar {
                        jtj[a][b] += row[a] * row[b];
                    }
                }
            }
            let mut improved = false;
            for _ in 0..30 {
                let mut sys = jtj.clone();
                for (a, row) in sys.iter_mut().enumerate() {
                    row[a] += mu * (jtj[a][a] + lit(1e-12));
                }
                let rhs: Vec<T> = jtr.iter().map(|v| -*v).collect();
                let step = match solve_real(sys, rhs) {
                    Ok(s) => s,
                    Err(_) => {
                        mu *= lit(10.0);
                        continue;
                    }
                };
                let xn: Vec<T> = x.iter().zip(&step).map(|(a, b)| *a + *b).collect();
                let rn = residuals(&xn, &lay, &rule, scale);
                let fnew = sumsq(&rn);
                if fnew.is_finite() && fnew < f {
                    x = xn;
                    r = rn;
                    f = fnew;
                    mu = (mu * lit(0.2)).max(lit(1e-12));
                    improved = true;
                    break;
                }
                mu *= lit(10.0);
            }
            if !improved {
                break;
            }
        }
        let (theta, cap) = unpack(&x, m);
        let edge_residual = r.iter().map(|v| v.abs()).fold(T::zero(), T::max);
        if !(edge_residual <= target) {
            return Err(Error::MapAccuracy {
                achieved: edge_residual.to_f64().unwrap_or(f64::NAN),
                requested: target.to_f64().unwrap_or(f64::NAN),
            });
        }
        let mut map = Self {
            cap,
            theta,
            expo: lay.expo,
            image: lay.image,
            vertex: lay.vertex,
            laurent: vec![],
            rule,
            edge_residual,
            scale,
        };
        map.laurent = map.compute_laurent();
        Ok(map)
    }

    fn kernel(&self) -> Kernel<'_, T> {
        Kernel { theta: &self.theta, expo: &self.expo, cap: self.cap, rule: &self.rule }
    }

    fn compute_laurent(&self) -> Vec<Complex<T>> {
        let d = LAURENT_TERMS + 1;
        // e_j: coefficients of Π (1 − w_k x)^{a_k} in x = 1/w
        let mut e = vec![Complex::new(T::zero(), T::zero()); d + 1];
        e[0] = Complex::new(T::one(), T::zero());
        for (&t, &a) in self.theta.iter().zip(&self.expo) {
            let wk = cis(t);
            let mut series = vec![Complex::new(T::zero(), T::zero()); d + 1];
            series[0] = Complex::new(T::one(), T::zero());
            for j in 1..=d {
                let jf = from_usize::<T>(j);
                series[j] = series[j - 1] * (-wk) * ((a - jf + T::one()) / jf);
            }
            let mut next = vec![Complex::new(T::zero(), T::zero()); d + 1];
            for (i, ei) in e.iter().enumerate() {
                if *ei == Complex::new(T::zero(), T::zero()) {
                    continue;
                }
                for (j, sj) in series.iter().enumerate().take(d + 1 - i) {
                    next[i + j] += ei * sj;
                }
            }
            e = next;
        }
        let mut c = vec![Complex::new(T::zero(), T::zero()); LAURENT_TERMS + 1];
        for j in 1..=LAURENT_TERMS {
            c[j] = -e[j + 1] * self.cap / from_usize::<T>(j);
        }
        // c_0 from Ψ(2) reached by integration from the start tip
        let k = self.kernel();
        let two = lit::<T>(2.0);
        let psi2 = self.image[0] + k.radial(0, T::one()) + k.circular(0, T::one(), wrap_pm(-self.theta[0]));
        let tail = (1..=LAURENT_TERMS).rev().fold(Complex::new(T::zero(), T::zero()), |acc, j| (acc + c[j]) / two);
        c[0] = psi2 - two * self.cap - tail;
        c
    }

    pub fn capacity(&self) -> T {
        self.cap
    }

    pub fn laurent(&self) -> &[Complex<T>] {
        &self.laurent
    }

    pub fn prevertex_angles(&self) -> &[T] {
        &self.theta
    }

    pub fn exponents(&self) -> &[T] {
        &self.expo
    }

    pub fn edge_residual(&self) -> T {
        self.edge_residual
    }

    pub fn scale(&self) -> T {
        self.scale
    }

    /// Index of the prevertex of polyline vertex `i` on the given bank
    /// (tips ignore the bank).
    pub fn prevertex_of(&self, i: usize, right: bool) -> usize {
        self.vertex
            .iter()
            .position(|&(v, b)| v == i && (b == Bank::Tip || (b == Bank::Right) == right))
            .expect("vertex has a prevertex")
    }

    fn nearest_prevertex(&self, theta: T) -> (usize, T) {
        self.theta
            .iter()
            .enumerate()
            .map(|(k, &t)| (k, wrap_pm(theta - t)))
            .fold((0, T::infinity()), |b, c| if c.1.abs() < b.1.abs() { c } else { b })
    }

    /// `Ψ(w)` for `|w| ≥ 1`.
    pub fn psi(&self, w: Complex<T>) -> Complex<T> {
        let r = w.norm();
        if r >= lit(LAURENT_RADIUS) {
            let inv = w.inv();
            let tail = self.laurent[1..].iter().rev().fold(Complex::new(T::zero(), T::zero()), |acc, c| (acc + c) * inv);
            return w * self.cap + self.laurent[0] + tail;
        }
        let s = (r - T::one()).max(T::zero());
        let (k, phi) = self.nearest_prevertex(w.arg());
        let ker = self.kernel();
        self.image[k] + ker.radial(k, s) + ker.circular(k, s, phi)
    }

    /// `Ψ(e^{iθ})`.
    pub fn psi_boundary(&self, theta: T) -> Complex<T> {
        let (k, phi) = self.nearest_prevertex(theta);
        self.image[k] + self.kernel().circular(k, T::zero(), phi)
    }

    /// `Ψ((1+s)e^{iθ_k})` measured from prevertex `k`, exact in `s`.
    pub fn psi_radial(&self, k: usize, s: T) -> Complex<T> {
        self.image[k] + self.kernel().radial(k, s)
    }

    pub fn psi_prime(&self, w: Complex<T>) -> Complex<T> {
        let (k, phi) = self.nearest_prevertex(w.arg());
        self.kernel().deriv(k, (w.norm() - T::one()).max(T::zero()), phi)
    }

    /// `Ψ'((1+s)e^{iθ_k})`, exact in `s`.
    pub fn psi_prime_radial(&self, k: usize, s: T) -> Complex<T> {
        self.kernel().deriv(k, s, T::zero())
    }

    /// Angle on the edge from prevertex `a` to its successor whose image
    /// lies at distance `dist` from the image of `a`.
    pub fn angle_on_edge(&self, a: usize, dist: T) -> T {
        let m = self.theta.len();
        let b = (a + 1) % m;
        let lo0 = self.theta[a];
        let mut hi0 = self.theta[b];
        if b == 0 {
            hi0 += T::TAU();
        }
        let total = (self.image[b] - self.image[a]).norm();
        if dist <= T::zero() {
            return lo0;
        }
        if dist >= total {
            return hi0;
        }
        let (mut lo, mut hi) = (lo0, hi0);
        for _ in 0..80 {
            let mid = (lo + hi) * lit(0.5);
            if mid <= lo || mid >= hi {
                break;
            }
            let d = (self.psi_boundary(mid) - self.image[a]).norm();
            if d < dist {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        (lo + hi) * lit(0.5)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64 as C;

    #[test]
    fn single_segment_reproduces_joukowski() {
        let m = ScMap::<f64>::new(&[C::new(-1.0, 0.0), C::new(1.0, 0.0)], 1e-12).unwrap();
        assert!((m.capacity() - 0.5).abs() < 1e-12);
        let w = C::new(0.3, 1.4);
        let exact = (w + w.inv()) * 0.5;
        assert!((m.psi(w) - exact).norm() < 1e-12);
        let w2 = C::new(1.02, 0.05);
        assert!((m.psi(w2) - (w2 + w2.inv()) * 0.5).norm() < 1e-12);
        assert!((m.laurent()[0]).norm() < 1e-12);
        assert!((m.laurent()[1] - C::new(0.5, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn corner_parameter_problem_converges() {
        let m = ScMap::<f64>::new(&[C::new(1.0, 0.0), C::new(0.0, 0.0), C::new(0.0, 1.0)], 1e-12).unwrap();
        // symmetry about the diagonal: prevertex images and continuity
        for (k, &t) in m.prevertex_angles().iter().enumerate() {
            let b = m.psi_boundary(t);
            assert!((b - m.image[k]).norm() < 1e-12);
        }
        let w = C::new(1.05, 0.04);
        let w_far = w * 1.2;
        // Laurent and integration agree across the switch radius
        let a = m.kernel();
        let (k, phi) = m.nearest_prevertex(w_far.arg());
        let integrated = m.image[k] + a.radial(k, w_far.norm() - 1.0) + a.circular(k, w_far.norm() - 1.0, phi);
        assert!((integrated - m.psi(w_far)).norm() < 1e-12);
        assert!(m.psi(w).norm().is_finite());
    }
}
