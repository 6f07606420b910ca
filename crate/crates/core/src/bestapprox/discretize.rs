use num_complex::Complex;

use crate::error::{Error, Result};
use crate::geometry::Arc;
use crate::real::{from_usize, lit, Real};

/// Geometric ratio of cluster nodes.
pub const CLUSTER_RATIO: f64 = 0.7;
/// Number of cluster levels on each side of a cluster point.
pub const CLUSTER_LEVELS: usize = 12;

/// Deterministic node set on an arc.
#[derive(Debug, Clone)]
pub struct DiscretizedArc<T> {
    pub params: Vec<T>,
    pub points: Vec<Complex<T>>,
    /// Number of uniform-in-arclength base nodes.
    pub base_count: usize,
    /// Nodes added by clustering (after removing duplicates).
    pub added: usize,
}

impl<T: Real> DiscretizedArc<T> {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Rejects node sets too small for degree `n` (fewer than `20(n+1)`).
    pub fn check_degree(&self, n: usize) -> Result<()> {
        if self.len() < 20 * (n + 1) {
            return Err(Error::InvalidArgument(format!(
                "{} nodes are below the floor 20(n+1) = {} for degree {n}",
                self.len(),
                20 * (n + 1)
            )));
        }
        Ok(())
    }
}

/// `m` nodes uniform in arclength (endpoints included), plus nodes at
/// arclength offsets `±Δ·0.7^l`, `l = 1..=12`, around every cluster
/// parameter, where `Δ` is the base spacing.
pub fn discretize<T: Real>(arc: &Arc<T>, m: usize, cluster_params: &[T]) -> Result<DiscretizedArc<T>> {
    if m < 2 {
        return Err(Error::InvalidArgument("discretization needs at least two base nodes".into()));
    }
    let len = arc.length();
    let step = len / from_usize::<T>(m - 1);
    let mut lengths: Vec<T> = (0..m).map(|i| step * from_usize::<T>(i)).collect();
    lengths[m - 1] = len;
    for &c in cluster_params {
        let lc = arc.length_to(c)?;
        let mut off = step;
        for _ in 0..CLUSTER_LEVELS {
            off *= lit(CLUSTER_RATIO);
            for cand in [lc - off, lc + off] {
                if cand > T::zero() && cand < len {
                    lengths.push(cand);
                }
            }
        }
        lengths.push(lc);
    }
    lengths.sort_by(|a, b| a.partial_cmp(b).expect("finite arclengths"));
    let tol = len * T::epsilon() * lit(64.0);
    lengths.dedup_by(|a, b| (*a - *b).abs() <= tol);
    let params: Vec<T> = lengths.iter().map(|&l| arc.param_at_length(l)).collect();
    // breakpoints are exact integers in parameter space
    let params: Vec<T> = params
        .into_iter()
        .map(|t| {
            let r = t.round();
            if (t - r).abs() <= lit(1e-13) { r } else { t }
        })
        .collect();
    let points = params.iter().map(|&t| arc.eval(t)).collect::<Result<Vec<_>>>()?;
    let added = points.len() - m;
    Ok(DiscretizedArc { params, points, base_count: m, added })
}
