use nearbest::bestapprox::{discretize, en_table, lawson_minimax, MinimaxProblem, OrthonormalBasis};
use nearbest::geometry::{Arc, Branch, PiecewiseAnalyticFunction};
use nearbest::Complex;

fn c(re: f64, im: f64) -> Complex {
    Complex::new(re, im)
}

fn unit_segment() -> Arc<f64> {
    Arc::segment(c(-1.0, 0.0), c(1.0, 0.0)).unwrap()
}

fn abs_x() -> PiecewiseAnalyticFunction<f64> {
    PiecewiseAnalyticFunction::new(
        unit_segment(),
        vec![0.5],
        vec![
            Branch::new("-z", c(0.0, 0.0), 10.0, |z: Complex| -z),
            Branch::new("z", c(0.0, 0.0), 10.0, |z: Complex| z),
        ],
        None,
    )
    .unwrap()
}

fn sampled(f: impl Fn(Complex) -> Complex, m: usize, n: usize) -> MinimaxProblem<f64> {
    let nodes = discretize(&unit_segment(), m, &[0.0, 0.5, 1.0]).unwrap();
    let values = nodes.points.iter().map(|&z| f(z)).collect();
    MinimaxProblem::from_values(nodes, values, n).unwrap()
}

/// Best affine approximation of |x| by exhaustive search.
fn brute_force_affine_abs() -> f64 {
    let xs: Vec<f64> = (0..=2000).map(|i| -1.0 + i as f64 / 1000.0).collect();
    let mut best = f64::INFINITY;
    for ia in 0..=200 {
        let a = ia as f64 / 200.0;
        for ib in -40..=40 {
            let b = ib as f64 / 200.0;
            let e = xs.iter().map(|x| (x.abs() - a - b * x).abs()).fold(0.0, f64::max);
            best = best.min(e);
        }
    }
    best
}

#[test]
fn symmetric_basis_degree_one() {
    let nodes: Vec<Complex> = (0..11).map(|i| c(-1.0 + i as f64 / 5.0, 0.0)).collect();
    let b = OrthonormalBasis::new(&nodes, 1).unwrap();
    let m = nodes.len() as f64;
    let norm_x = nodes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    for (i, z) in nodes.iter().enumerate() {
        assert!((b.columns[0][i] - c(1.0 / m.sqrt(), 0.0)).norm() < 1e-14);
        assert!((b.columns[1][i].norm() - (z / norm_x).norm()).abs() < 1e-14);
    }
}

#[test]
fn gram_identity_and_idempotence() {
    let nodes = discretize(&unit_segment(), 400, &[0.5]).unwrap();
    let b = OrthonormalBasis::new(&nodes.points, 19).unwrap();
    assert!(b.gram_deviation() < 1e-10);
    assert!(b.gram_condition() < 1.0 + 1e-8);
    // orthonormalizing the columns again leaves them unchanged
    let mut again = b.columns.clone();
    for k in 0..again.len() {
        for j in 0..k {
            let proj: Complex = again[j].iter().zip(&again[k]).map(|(a, v)| a.conj() * v).sum();
            let qj = again[j].clone();
            for (v, q) in again[k].iter_mut().zip(&qj) {
                *v -= q * proj;
            }
        }
        let nrm = again[k].iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        again[k].iter_mut().for_each(|v| *v /= nrm);
    }
    let dev = again
        .iter()
        .zip(&b.columns)
        .flat_map(|(a, q)| a.iter().zip(q).map(|(x, y)| (x - y).norm()))
        .fold(0.0, f64::max);
    assert!(dev < 1e-10, "{dev}");
}

#[test]
fn recurrence_matches_node_values() {
    let nodes = discretize(&unit_segment(), 300, &[]).unwrap();
    let b = OrthonormalBasis::new(&nodes.points, 12).unwrap();
    for (i, &z) in nodes.points.iter().enumerate().step_by(17) {
        let vals = b.recurrence.eval_all(z, 12);
        for k in 0..=12 {
            assert!((vals[k] - b.columns[k][i]).norm() < 1e-10);
        }
    }
}

#[test]
fn odd_function_constant_fit() {
    let p = sampled(|z| z, 201, 0);
    let r = p.solve(0, 1e-8, 500).unwrap();
    assert!((r.e_n - 1.0).abs() < 1e-12, "{}", r.e_n);
    assert!(r.coeffs[0].norm() < 1e-12);
}

#[test]
fn abs_degree_one_matches_brute_force() {
    let oracle = brute_force_affine_abs();
    assert!((oracle - 0.5).abs() < 1e-3);
    let p = sampled(|z| c(z.re.abs(), 0.0), 400, 1);
    let r = p.solve(1, 1e-8, 500).unwrap();
    assert!((r.e_n - oracle).abs() < 1e-3, "{} vs {oracle}", r.e_n);
    assert!(r.converged);
    assert!(r.lower <= r.e_n);
}

#[test]
fn polynomial_is_reproduced() {
    let p = sampled(|z| c(1.0, 2.0) + z * z * z * c(0.5, -1.0), 200, 5);
    for n in 3..=5 {
        assert!(p.solve(n, 1e-8, 500).unwrap().e_n < 1e-10);
    }
}

#[test]
fn coefficients_reproduce_residual() {
    let p = sampled(|z| (z * 3.0).exp(), 300, 6);
    let r = p.solve(6, 1e-8, 500).unwrap();
    let fit = p.basis.combine(&r.coeffs);
    for ((v, q), res) in p.values.iter().zip(&fit).zip(&r.residual) {
        assert!(((v - q).norm() - res).abs() < 1e-10);
    }
    let max = r.residual.iter().copied().fold(0.0, f64::max);
    assert!(max >= r.e_n * (1.0 - 1e-12) && r.e_n >= 0.0);
}

#[test]
fn constant_table_is_zero() {
    let f = PiecewiseAnalyticFunction::analytic(unit_segment(), Branch::new("2", c(0.0, 0.0), 10.0, |_| c(2.0, 0.0))).unwrap();
    for row in en_table(&f, &[0, 2, 4]).unwrap() {
        assert!(row.e_n < 1e-12);
    }
}

#[test]
fn translation_invariance() {
    let base = |z: Complex| c(z.re.abs(), 0.0);
    let shift = |z: Complex| c(0.3, -0.7) + z * c(1.1, 0.2) - z * z * z * c(0.4, 0.0);
    let p = sampled(base, 400, 4);
    let q = sampled(move |z| base(z) - shift(z), 400, 4);
    let a = p.solve(4, 1e-8, 500).unwrap().e_n;
    let b = q.solve(4, 1e-8, 500).unwrap().e_n;
    assert!((a - b).abs() < 1e-8 + 1e-3 * a, "{a} vs {b}");
}

#[test]
fn abs_rate_is_one_over_n() {
    let degrees: Vec<usize> = vec![8, 16, 32, 64, 128];
    let rows = en_table(&abs_x(), &degrees).unwrap();
    let scaled: Vec<f64> = rows.iter().map(|r| r.e_n * r.n as f64).collect();
    let hi = scaled.iter().copied().fold(0.0, f64::max);
    let lo = scaled.iter().copied().fold(f64::INFINITY, f64::min);
    assert!(hi / lo < 4.0, "{scaled:?}");
    for w in rows.windows(2) {
        assert!(w[1].e_n <= w[0].e_n * (1.0 + w[0].bracket_width()));
    }
    for r in &rows {
        assert!(r.converged, "n={} bracket {}", r.n, r.bracket_width());
    }
}

#[test]
fn lawson_rejects_excess_degree() {
    let p = sampled(|z| z, 100, 3);
    assert!(p.solve(4, 1e-8, 10).is_err());
    assert!(lawson_minimax(&p.values, &p.basis, 3, 1e-8, 10).is_ok());
}
