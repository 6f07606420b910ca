//! Gauss–Legendre rules, geometrically graded panels and an adaptive
//! panel integrator for complex-valued integrands of a real parameter.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::real::{from_usize, lit, Real};

/// Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre<T> {
    pub nodes: Vec<T>,
    pub weights: Vec<T>,
}

impl<T: Real> GaussLegendre<T> {
    /// Nodes by Newton iteration on `P_n` from the Tricomi initial guess.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre order must be positive");
        let mut nodes = vec![T::zero(); n];
        let mut weights = vec![T::zero(); n];
        let nf = from_usize::<T>(n);
        let half = lit::<T>(0.5);
        let m = n.div_ceil(2);
        for i in 0..m {
            let mut x = (T::PI() * (from_usize::<T>(i) + lit(0.75)) / (nf + half)).cos();
            let mut dp = T::one();
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() <= T::epsilon() * lit(4.0) {
                    let (_, d) = legendre_with_derivative(n, x);
                    dp = d;
                    break;
                }
            }
            let w = lit::<T>(2.0) / ((T::one() - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = T::zero();
        }
        Self { nodes, weights }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// Nodes and weights mapped to `[a, b]`.
    pub fn on(&self, a: T, b: T) -> impl Iterator<Item = (T, T)> + '_ {
        let half = lit::<T>(0.5);
        let mid = (a + b) * half;
        let h = (b - a) * half;
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (mid + h * x, h * w))
    }

    /// `∫_a^b f` on a single panel.
    pub fn integrate<F>(&self, a: T, b: T, mut f: F) -> Complex<T>
    where
        F: FnMut(T) -> Complex<T>,
    {
        self.on(a, b).fold(Complex::new(T::zero(), T::zero()), |acc, (x, w)| acc + f(x) * w)
    }
}

fn legendre_with_derivative<T: Real>(n: usize, x: T) -> (T, T) {
    let mut p0 = T::one();
    let mut p1 = x;
    for k in 2..=n {
        let kf = from_usize::<T>(k);
        let p2 = ((lit::<T>(2.0) * kf - T::one()) * x * p1 - (kf - T::one()) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let nf = from_usize::<T>(n);
    let d = nf * (x * p1 - p0) / (x * x - T::one());
    (p1, d)
}

/// Panels of `[a, b]` shrinking geometrically toward `a` with the given ratio;
/// the innermost panel is `[a, a + (b-a)·ratio^levels]`, or wider when that
/// offset would drop below the floating point resolution at `a`.
pub fn graded_panels<T: Real>(a: T, b: T, ratio: T, levels: usize) -> Vec<(T, T)> {
    let mut cuts = Vec::with_capacity(levels + 2);
    let len = b - a;
    let mut s = T::one();
    cuts.push(b);
    let floor = (a.abs() * T::epsilon() * lit(64.0)).max(T::min_positive_value());
    for _ in 0..levels {
        s *= ratio;
        if (len * s).abs() <= floor {
            break;
        }
        cuts.push(a + len * s);
    }
    cuts.push(a);
    cuts.windows(2).rev().map(|w| (w[1], w[0])).collect()
}

/// Number of grading levels so that an endpoint singularity `t^exponent`
/// leaves a remainder below `target` in the innermost panel.
pub fn grading_levels<T: Real>(exponent: T, ratio: T, target: T) -> usize {
    let power = (exponent + T::one()).max(lit(0.05));
    let levels = (target.ln() / (power * ratio.ln())).ceil();
    levels.to_usize().unwrap_or(1).clamp(1, 400)
}

/// Integrates over a list of panels with one rule.
pub fn integrate_panels<T, F>(rule: &GaussLegendre<T>, panels: &[(T, T)], mut f: F) -> Complex<T>
where
    T: Real,
    F: FnMut(T) -> Complex<T>,
{
    panels
        .iter()
        .fold(Complex::new(T::zero(), T::zero()), |acc, &(a, b)| acc + rule.integrate(a, b, &mut f))
}

/// Integral with an algebraic singularity `(t-a)^ea` at `a` and `(b-t)^eb`
/// at `b`: the interval is split at its midpoint and each half is graded
/// toward its singular end.
pub fn integrate_two_sided<T, F>(
    rule: &GaussLegendre<T>,
    a: T,
    b: T,
    ea: T,
    eb: T,
    target: T,
    mut f: F,
) -> Complex<T>
where
    T: Real,
    F: FnMut(T) -> Complex<T>,
{
    let ratio = lit::<T>(0.25);
    let mid = (a + b) * lit(0.5);
    let la = grading_levels(ea, ratio, target);
    let lb = grading_levels(eb, ratio, target);
    let left = integrate_panels(rule, &graded_panels(a, mid, ratio, la), &mut f);
    // mirror the grading toward b
    let right_panels: Vec<(T, T)> = graded_panels(b, mid, ratio, lb)
        .into_iter()
        .map(|(x, y)| (y, x))
        .collect();
    let right = integrate_panels(rule, &right_panels, &mut f);
    left + right
}

/// Adaptive bisection with a fixed Gauss–Legendre rule; a panel is accepted
/// when it agrees with the sum over its two halves to `abs_tol`.
pub fn integrate_adaptive<T, F>(
    rule: &GaussLegendre<T>,
    a: T,
    b: T,
    abs_tol: T,
    max_depth: usize,
    mut f: F,
) -> Result<Complex<T>>
where
    T: Real,
    F: FnMut(T) -> Complex<T>,
{
    let whole = rule.integrate(a, b, &mut f);
    let mut total = Complex::new(T::zero(), T::zero());
    let mut stack = vec![(a, b, whole, 0usize)];
    let mut worst = T::zero();
    while let Some((lo, hi, est, depth)) = stack.pop() {
        let mid = (lo + hi) * lit(0.5);
        let left = rule.integrate(lo, mid, &mut f);
        let right = rule.integrate(mid, hi, &mut f);
        let refined = left + right;
        let diff = (refined - est).norm();
        if diff <= abs_tol || depth >= max_depth {
            if depth >= max_depth {
                worst = worst.max(diff);
            }
            total = total + refined;
        } else {
            stack.push((lo, mid, left, depth + 1));
            stack.push((mid, hi, right, depth + 1));
        }
    }
    if worst > abs_tol * lit(1e3) {
        return Err(Error::Quadrature(format!(
            "adaptive refinement stalled with panel discrepancy {:e}",
            worst.to_f64().unwrap_or(f64::NAN)
        )));
    }
    Ok(total)
}
