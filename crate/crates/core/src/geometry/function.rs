use std::fmt;
use std::sync::Arc as Shared;

use num_complex::Complex;

use super::arc::Arc;
use crate::error::{Error, Result};
use crate::real::{cis, from_usize, lit, Real};

/// Evaluator of one analytic branch.
pub type BranchFn<T> = Shared<dyn Fn(Complex<T>) -> Complex<T> + Send + Sync>;

/// Analytic branch with the disk on which it is declared analytic.
#[derive(Clone)]
pub struct Branch<T> {
    pub eval: BranchFn<T>,
    pub center: Complex<T>,
    pub radius: T,
    /// Source text or description, carried into reports.
    pub label: String,
}

impl<T: Real> Branch<T> {
    pub fn new<F>(label: impl Into<String>, center: Complex<T>, radius: T, f: F) -> Self
    where
        F: Fn(Complex<T>) -> Complex<T> + Send + Sync + 'static,
    {
        Self { eval: Shared::new(f), center, radius, label: label.into() }
    }

    pub fn call(&self, z: Complex<T>) -> Complex<T> {
        (self.eval)(z)
    }

    /// Radius of the largest disk about `z` inside this branch's disk.
    pub fn inner_radius(&self, z: Complex<T>) -> T {
        self.radius - (z - self.center).norm()
    }
}

impl<T: fmt::Debug> fmt::Debug for Branch<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Branch")
            .field("label", &self.label)
            .field("center", &self.center)
            .field("radius", &self.radius)
            .finish()
    }
}

/// Default relative tolerance for derivative mismatch detection.
pub const JUMP_TOLERANCE: f64 = 1e-8;
/// Highest derivative order examined before reporting analytic continuation.
pub const MAX_JUMP_ORDER: usize = 20;
const CAUCHY_NODES: usize = 64;

/// `f = f_i` on the `i`-th subarc between consecutive singular parameters.
#[derive(Debug, Clone)]
pub struct PiecewiseAnalyticFunction<T> {
    arc: Arc<T>,
    singular_params: Vec<T>,
    branches: Vec<Branch<T>>,
    orders: Vec<Option<isize>>,
}

impl<T: Real> PiecewiseAnalyticFunction<T> {
    /// `singular_params` are the interior singular points in increasing
    /// parameter order; there must be one more branch than singular points.
    /// Orders are detected from the branches; when `declared` is given it
    /// must agree with the detection.
    pub fn new(
        arc: Arc<T>,
        singular_params: Vec<T>,
        branches: Vec<Branch<T>>,
        declared: Option<Vec<isize>>,
    ) -> Result<Self> {
        if branches.len() != singular_params.len() + 1 {
            return Err(Error::InvalidArgument(format!(
                "{} singular points need {} branches, got {}",
                singular_params.len(),
                singular_params.len() + 1,
                branches.len()
            )));
        }
        let tmax = arc.t_max();
        let mut prev = T::zero();
        for &s in &singular_params {
            if !(s > prev && s < tmax) {
                return Err(Error::InvalidArgument("singular parameters must be interior and increasing".into()));
            }
            prev = s;
        }
        for b in &branches {
            if !(b.radius > T::zero()) {
                return Err(Error::InvalidArgument(format!("branch '{}' has nonpositive radius", b.label)));
            }
        }
        let mut f = Self { arc, singular_params, branches, orders: vec![] };
        // each branch's disk must contain its closed subarc
        for i in 0..f.branches.len() {
            let (lo, hi) = f.branch_interval(i);
            let n = 64;
            for k in 0..=n {
                let t = lo + (hi - lo) * from_usize::<T>(k) / from_usize::<T>(n);
                let z = f.arc.eval(t)?;
                if f.branches[i].inner_radius(z) <= T::zero() {
                    return Err(Error::InvalidArgument(format!(
                        "branch '{}' disk does not contain its subarc",
                        f.branches[i].label
                    )));
                }
            }
        }
        let mut orders = Vec::with_capacity(f.singular_params.len());
        for j in 0..f.singular_params.len() {
            match f.jump_order(j, lit(JUMP_TOLERANCE)) {
                Ok(k) => orders.push(Some(k)),
                Err(Error::AnalyticContinuation(_)) => orders.push(None),
                Err(e) => return Err(e),
            }
        }
        if let Some(d) = declared {
            let detected: Vec<isize> = orders.iter().map(|o| o.unwrap_or(isize::MAX)).collect();
            if d != detected {
                return Err(Error::Consistency(format!("declared orders {d:?} differ from detected {orders:?}")));
            }
        }
        f.orders = orders;
        Ok(f)
    }

    /// Single-branch function on the whole arc.
    pub fn analytic(arc: Arc<T>, branch: Branch<T>) -> Result<Self> {
        Self::new(arc, vec![], vec![branch], None)
    }

    pub fn arc(&self) -> &Arc<T> {
        &self.arc
    }

    pub fn branches(&self) -> &[Branch<T>] {
        &self.branches
    }

    pub fn singular_params(&self) -> &[T] {
        &self.singular_params
    }

    pub fn singular_points(&self) -> Vec<Complex<T>> {
        self.singular_params.iter().map(|&t| self.arc.eval(t).expect("validated parameter")).collect()
    }

    /// Orders `k_j`: derivatives agree through order `k_j`, differ at `k_j+1`.
    /// `None` marks a removable singular point (the branches continue each other).
    pub fn orders(&self) -> &[Option<isize>] {
        &self.orders
    }

    /// Parameter interval of branch `i`.
    pub fn branch_interval(&self, i: usize) -> (T, T) {
        let lo = if i == 0 { T::zero() } else { self.singular_params[i - 1] };
        let hi = if i == self.singular_params.len() { self.arc.t_max() } else { self.singular_params[i] };
        (lo, hi)
    }

    /// Branch used at parameter `t` (left branch at a singular point).
    pub fn branch_index(&self, t: T) -> usize {
        self.singular_params.iter().position(|&s| t <= s).unwrap_or(self.singular_params.len())
    }

    pub fn eval_param(&self, t: T) -> Result<Complex<T>> {
        let z = self.arc.eval(t)?;
        Ok(self.branches[self.branch_index(t)].call(z))
    }

    /// Jump `f_{j} − f_{j+1}` across singular point `j` (0-based branches).
    pub fn jump(&self, j: usize, zeta: Complex<T>) -> Complex<T> {
        self.branches[j].call(zeta) - self.branches[j + 1].call(zeta)
    }

    /// Radius of a disk about singular point `j` inside both adjacent
    /// branch disks.
    pub fn common_radius(&self, j: usize) -> T {
        let z = self.arc.eval(self.singular_params[j]).expect("validated parameter");
        self.branches[j].inner_radius(z).min(self.branches[j + 1].inner_radius(z))
    }

    /// Smallest derivative order at which the two branches meeting at
    /// singular point `j` differ, minus one. Taylor coefficients come from a
    /// trapezoid Cauchy integral on a circle of half the common radius.
    pub fn jump_order(&self, j: usize, tol: T) -> Result<isize> {
        if j >= self.singular_params.len() {
            return Err(Error::InvalidArgument(format!("no interior singular point {j}")));
        }
        let z0 = self.arc.eval(self.singular_params[j])?;
        let rho = self.common_radius(j) * lit(0.5);
        if !(rho > T::zero()) {
            return Err(Error::InvalidArgument("branch disks do not share a circle about z_j".into()));
        }
        let a = taylor_coefficients(&self.branches[j], z0, rho, MAX_JUMP_ORDER);
        let b = taylor_coefficients(&self.branches[j + 1], z0, rho, MAX_JUMP_ORDER);
        mismatch_order(&a, &b, tol)
    }
}

/// Scaled Taylor coefficients `a_k ρ^k` of a branch about `z0`.
pub fn taylor_coefficients<T: Real>(branch: &Branch<T>, z0: Complex<T>, rho: T, max_order: usize) -> Vec<Complex<T>> {
    let m = CAUCHY_NODES;
    let vals: Vec<(Complex<T>, Complex<T>)> = (0..m)
        .map(|l| {
            let e = cis(T::TAU() * from_usize::<T>(l) / from_usize::<T>(m));
            (e, branch.call(z0 + e * rho))
        })
        .collect();
    (0..=max_order)
        .map(|k| {
            let s = vals
                .iter()
                .fold(Complex::new(T::zero(), T::zero()), |acc, (e, v)| acc + v * e.powi(-(k as i32)));
            s / from_usize::<T>(m)
        })
        .collect()
}

fn mismatch_order<T: Real>(a: &[Complex<T>], b: &[Complex<T>], tol: T) -> Result<isize> {
    let scale = a.iter().chain(b).map(|c| c.norm()).fold(T::zero(), T::max);
    let floor = T::epsilon() * lit(1e3);
    for (k, (x, y)) in a.iter().zip(b).enumerate() {
        let diff = (x - y).norm();
        if diff > tol * scale && diff > floor * scale {
            return Ok(k as isize - 1);
        }
    }
    Err(Error::AnalyticContinuation(a.len() - 1))
}
