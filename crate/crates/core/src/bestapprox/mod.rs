//! Discrete minimax approximation on an arc.

mod basis;
mod discretize;
mod lawson;

pub use basis::OrthonormalBasis;
pub use discretize::{discretize, DiscretizedArc, CLUSTER_LEVELS, CLUSTER_RATIO};
pub use lawson::{lawson_minimax, MinimaxResult, BRACKET_ACCEPT, BRACKET_STOP, LAWSON_MAX_ITER, LAWSON_TOL};

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::geometry::PiecewiseAnalyticFunction;
use crate::real::{lit, Real};

/// Base node count used when no larger floor applies.
pub const DEFAULT_BASE_NODES: usize = 2000;

/// One row of an `E_n` table.
#[derive(Debug, Clone)]
pub struct EnRow<T> {
    pub n: usize,
    pub e_n: T,
    pub lower: T,
    pub iterations: usize,
    pub converged: bool,
    pub error: Option<String>,
}

impl<T: Real> EnRow<T> {
    pub fn bracket_width(&self) -> T {
        if self.e_n > T::zero() {
            (self.e_n - self.lower) / self.e_n
        } else {
            T::zero()
        }
    }
}

/// Node set and sampled values shared by a family of minimax solves.
#[derive(Debug, Clone)]
pub struct MinimaxProblem<T> {
    pub nodes: DiscretizedArc<T>,
    pub values: Vec<Complex<T>>,
    pub basis: OrthonormalBasis<T>,
}

impl<T: Real> MinimaxProblem<T> {
    /// Samples `f` on a clustered node set large enough for `max_degree`.
    pub fn new(f: &PiecewiseAnalyticFunction<T>, max_degree: usize, base_nodes: usize) -> Result<Self> {
        let m = base_nodes.max(20 * (max_degree + 1));
        let arc = f.arc();
        let mut cluster: Vec<T> = f.singular_params().to_vec();
        cluster.push(T::zero());
        cluster.push(arc.t_max());
        let nodes = discretize(arc, m, &cluster)?;
        nodes.check_degree(max_degree)?;
        let values = nodes.params.iter().map(|&t| f.eval_param(t)).collect::<Result<Vec<_>>>()?;
        Self::from_values(nodes, values, max_degree)
    }

    pub fn from_values(nodes: DiscretizedArc<T>, values: Vec<Complex<T>>, max_degree: usize) -> Result<Self> {
        if values.len() != nodes.len() {
            return Err(Error::InvalidArgument("value count differs from node count".into()));
        }
        let basis = OrthonormalBasis::new(&nodes.points, max_degree)?;
        Ok(Self { nodes, values, basis })
    }

    pub fn solve(&self, n: usize, tol: T, max_iter: usize) -> Result<MinimaxResult<T>> {
        if n > self.basis.degree() {
            return Err(Error::DegreeBudget { requested: n, budget: self.basis.degree() });
        }
        lawson_minimax(&self.values, &self.basis, n, tol, max_iter)
    }

    /// Discrete least-squares fit of degree `n`.
    pub fn least_squares(&self, n: usize) -> Vec<Complex<T>> {
        self.basis.project(&self.values, n)
    }

    /// Maximal deviation of `g` from `f` over the nodes.
    pub fn sup_error<G: Fn(Complex<T>) -> Complex<T>>(&self, g: G) -> T {
        self.nodes.points.iter().zip(&self.values).map(|(&z, &v)| (v - g(z)).norm()).fold(T::zero(), T::max)
    }
}

/// `E_n(f)` for each listed degree. Row failures are recorded, not raised.
pub fn en_table<T: Real>(f: &PiecewiseAnalyticFunction<T>, degrees: &[usize]) -> Result<Vec<EnRow<T>>> {
    if degrees.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument("degrees must be strictly ascending".into()));
    }
    let Some(&n_max) = degrees.last() else { return Ok(Vec::new()) };
    let problem = MinimaxProblem::new(f, n_max, DEFAULT_BASE_NODES)?;
    Ok(degrees.iter().map(|&n| row_from(n, problem.solve(n, lit(LAWSON_TOL), LAWSON_MAX_ITER))).collect())
}

pub fn row_from<T: Real>(n: usize, r: Result<MinimaxResult<T>>) -> EnRow<T> {
    match r {
        Ok(r) => EnRow { n, e_n: r.e_n, lower: r.lower, iterations: r.iterations, converged: r.converged, error: None },
        Err(e) => EnRow {
            n,
            e_n: T::nan(),
            lower: T::nan(),
            iterations: 0,
            converged: false,
            error: Some(e.to_string()),
        },
    }
}
