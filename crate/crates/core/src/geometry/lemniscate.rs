use num_complex::Complex;

use super::arc::Arc;
use crate::error::{Error, Result};
use crate::poly::BasisPoly;
use crate::real::{cis, from_usize, lit, Real};

/// Position of a point relative to the lemniscate `|P(z)| = R^N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LemniscateSide {
    Inside,
    On,
    Outside,
}

/// `P(z) = Π_k (z − a_k)` with roots `a_k = R·e^{2πi(k−1)/N}`.
#[derive(Debug, Clone)]
pub struct Lemniscate<T> {
    n: usize,
    radius: T,
    roots: Vec<Complex<T>>,
}

impl<T: Real> Lemniscate<T> {
    pub fn new(n: usize, radius: T) -> Result<Self> {
        if n == 0 || !(radius > T::zero()) || !radius.is_finite() {
            return Err(Error::InvalidArgument("lemniscate needs N ≥ 1 and R > 0".into()));
        }
        let roots = (0..n)
            .map(|k| cis(T::TAU() * from_usize::<T>(k) / from_usize::<T>(n)) * radius)
            .collect();
        Ok(Self { n, radius, roots })
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn radius(&self) -> T {
        self.radius
    }

    pub fn roots(&self) -> &[Complex<T>] {
        &self.roots
    }

    /// `R^N`.
    pub fn level(&self) -> T {
        self.radius.powi(self.n as i32)
    }

    pub fn eval(&self, z: Complex<T>) -> Complex<T> {
        self.roots.iter().fold(Complex::new(T::one(), T::zero()), |acc, a| acc * (z - a))
    }

    /// `P(z)/R^N`, evaluated factor by factor as `Π (z/R − a_k/R)`.
    pub fn eval_normalized(&self, z: Complex<T>) -> Complex<T> {
        let u = z / self.radius;
        self.roots.iter().fold(Complex::new(T::one(), T::zero()), |acc, a| acc * (u - a / self.radius))
    }

    pub fn classify(&self, z: Complex<T>, tol: T) -> LemniscateSide {
        let m = self.eval_normalized(z).norm();
        if (m - T::one()).abs() <= tol {
            LemniscateSide::On
        } else if m < T::one() {
            LemniscateSide::Inside
        } else {
            LemniscateSide::Outside
        }
    }

    /// Normalized polynomial `P(z)/R^N` in monomial form.
    pub fn normalized_poly(&self) -> BasisPoly<T> {
        let mut c = vec![Complex::new(T::one(), T::zero())];
        for a in &self.roots {
            let a = a / self.radius;
            let mut next = vec![Complex::new(T::zero(), T::zero()); c.len() + 1];
            for (i, ci) in c.iter().enumerate() {
                next[i + 1] += ci;
                next[i] -= ci * a;
            }
            c = next;
        }
        let scale = self.radius.powi(-(self.n as i32));
        let mut scaled = Vec::with_capacity(c.len());
        for (i, ci) in c.into_iter().enumerate() {
            // coefficient of z^i in P(z)/R^N is c_i / R^i
            scaled.push(ci * (scale * self.radius.powi((self.n - i) as i32)));
        }
        BasisPoly::from_monomial(scaled)
    }

    /// `d(E) = min_E (1 − |P(z)/R^N|)`.
    pub fn d_of_e(&self, points: &[Complex<T>]) -> Result<T> {
        if points.is_empty() {
            return Err(Error::InvalidArgument("compact set has no sample points".into()));
        }
        let d = points
            .iter()
            .map(|&z| T::one() - self.eval_normalized(z).norm())
            .fold(T::infinity(), T::min);
        if d <= T::epsilon() * lit(64.0) {
            return Err(Error::TouchesLemniscate(d.to_f64().unwrap_or(f64::NAN)));
        }
        Ok(d)
    }

    /// Checks `|P(z)| < R^N` on the arc except at the parameter `t0`, on a
    /// sample that doubles from 2048 points until the verdict is stable, with
    /// extra geometric refinement toward `t0`. Returns the worst normalized
    /// modulus seen away from `t0` together with its parameter.
    pub fn check_admissible(&self, arc: &Arc<T>, t0: T) -> Result<(T, T)> {
        let z0 = arc.eval(t0)?;
        if (self.eval_normalized(z0).norm() - T::one()).abs() > lit(1e-10) {
            return Err(Error::InadmissibleLemniscate("the singular point does not lie on the lemniscate".into()));
        }
        let tmax = arc.t_max();
        let mut count = 2048usize;
        let mut previous: Option<bool> = None;
        loop {
            let mut params: Vec<T> = (0..=count).map(|k| tmax * from_usize::<T>(k) / from_usize::<T>(count)).collect();
            let mut h = tmax / from_usize::<T>(count);
            for _ in 0..40 {
                h *= lit(0.5);
                params.push(t0 - h);
                params.push(t0 + h);
            }
            let mut worst = (T::neg_infinity(), t0);
            for &t in &params {
                if t < T::zero() || t > tmax || t == t0 {
                    continue;
                }
                let m = self.eval_normalized(arc.eval(t)?).norm();
                if m > worst.0 {
                    worst = (m, t);
                }
            }
            // near z0 the modulus rounds to 1; only a resolvable excess counts
            let ok = worst.0 <= T::one() + T::epsilon() * lit(16.0);
            if previous == Some(ok) || count >= 1 << 16 {
                if !ok {
                    return Err(Error::InadmissibleLemniscate(format!(
                        "|P(z)|/R^N = {:.6} at arc parameter {:.6}",
                        worst.0.to_f64().unwrap_or(f64::NAN),
                        worst.1.to_f64().unwrap_or(f64::NAN)
                    )));
                }
                return Ok(worst);
            }
            previous = Some(ok);
            count *= 2;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64 as C;

    #[test]
    fn evaluation_examples() {
        let l = Lemniscate::<f64>::new(4, 1.0).unwrap();
        assert!((l.eval(C::new(0.0, 0.0)) - C::new(-1.0, 0.0)).norm() < 1e-15);
        assert!(l.eval(l.roots()[0]).norm() < 1e-15);
        let z = C::new(0.3, 0.7);
        assert!((l.eval(z) - (z.powi(4) - 1.0)).norm() < 1e-14);
        let l2 = Lemniscate::<f64>::new(2, 1.0).unwrap();
        assert!((l2.eval(C::new(2.0, 0.0)) - C::new(3.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn origin_lies_on_lemniscate() {
        for (n, r) in [(4, 1.0), (3, 2.5), (6, 0.4)] {
            let l = Lemniscate::<f64>::new(n, r).unwrap();
            assert!((l.eval(C::new(0.0, 0.0)).norm() - l.level()).abs() < 1e-12 * l.level());
            assert!((l.eval_normalized(C::new(0.0, 0.0)).norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn classification() {
        let l = Lemniscate::<f64>::new(4, 1.0).unwrap();
        assert_eq!(l.classify(C::new(0.0, 0.0), 1e-12), LemniscateSide::On);
        assert_eq!(l.classify(l.roots()[0], 1e-12), LemniscateSide::Inside);
        assert_eq!(l.classify(C::new(10.0, 0.0), 1e-12), LemniscateSide::Outside);
    }

    #[test]
    fn d_of_e_examples() {
        let l = Lemniscate::<f64>::new(4, 1.0).unwrap();
        assert!((l.d_of_e(&[l.roots()[0]]).unwrap() - 1.0).abs() < 1e-15);
        assert!((l.d_of_e(&[C::new(0.5, 0.0)]).unwrap() - 0.0625).abs() < 1e-15);
        assert!(matches!(l.d_of_e(&[C::new(0.0, 0.0)]), Err(Error::TouchesLemniscate(_))));
    }

    #[test]
    fn normalized_poly_matches_product() {
        let l = Lemniscate::<f64>::new(5, 1.7).unwrap();
        let p = l.normalized_poly();
        for z in [C::new(0.2, 0.1), C::new(-1.0, 0.8), C::new(1.7, 0.0)] {
            assert!((p.eval(z) - l.eval_normalized(z)).norm() < 1e-12);
        }
    }

    #[test]
    fn admissibility() {
        let l = Lemniscate::<f64>::new(4, 1.0).unwrap();
        let corner = Arc::polyline(&[C::new(1.0, 0.0), C::new(0.0, 0.0), C::new(0.0, 1.0)]).unwrap();
        let (worst, _) = l.check_admissible(&corner, 1.0).unwrap();
        assert!(worst <= 1.0);
        // an arm reaching 1.5 crosses the lemniscate at 2^{1/4}
        let long = Arc::polyline(&[C::new(1.5, 0.0), C::new(0.0, 0.0), C::new(0.0, 1.0)]).unwrap();
        assert!(matches!(l.check_admissible(&long, 1.0), Err(Error::InadmissibleLemniscate(_))));
    }
}
