use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use nearbest::geometry::{Arc, Branch, Lemniscate, LemniscateSide, Piece, PiecewiseAnalyticFunction};
use nearbest::{Complex, Error};

fn c(re: f64, im: f64) -> Complex {
    Complex::new(re, im)
}

fn corner() -> Arc<f64> {
    Arc::polyline(&[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 1.0)]).unwrap()
}

fn quarter_circle() -> Arc<f64> {
    Arc::new(vec![Piece::CircularArc { center: c(0.0, 0.0), radius: 1.0, start: 0.0, sweep: FRAC_PI_2 }]).unwrap()
}

fn two_branch(arc: Arc<f64>, f1: fn(Complex) -> Complex, f2: fn(Complex) -> Complex) -> Result<PiecewiseAnalyticFunction<f64>, Error> {
    PiecewiseAnalyticFunction::new(
        arc,
        vec![1.0],
        vec![Branch::new("f1", c(0.0, 0.0), 10.0, f1), Branch::new("f2", c(0.0, 0.0), 10.0, f2)],
        None,
    )
}

#[test]
fn arc_evaluation() {
    let seg = Arc::segment(c(-1.0, 0.0), c(1.0, 0.0)).unwrap();
    assert_eq!(seg.eval(0.5).unwrap(), c(0.0, 0.0));
    assert_eq!(seg.eval(0.0).unwrap(), c(-1.0, 0.0));
    assert!(seg.eval(1.5).is_err());
    let arc = corner();
    assert_eq!(arc.eval(1.0).unwrap(), c(0.0, 0.0));
    assert!((arc.eval(1.0 - 1e-12).unwrap()).norm() < 1e-11);
    assert!((arc.eval(1.0 + 1e-12).unwrap()).norm() < 1e-11);
}

#[test]
fn subarc_lengths() {
    let seg = Arc::segment(c(-1.0, 0.0), c(1.0, 0.0)).unwrap();
    assert!((seg.subarc_length(0.0, 1.0).unwrap() - 2.0).abs() < 1e-15);
    assert_eq!(seg.subarc_length(0.3, 0.3).unwrap(), 0.0);
    assert!(seg.subarc_length(0.6, 0.3).is_err());
    let q = quarter_circle();
    assert!((q.subarc_length(0.0, 0.5).unwrap() - FRAC_PI_4).abs() < 1e-14);
    // additivity across a breakpoint
    let arc = corner();
    let (a, b, d) = (0.2, 1.3, 1.9);
    let whole = arc.subarc_length(a, d).unwrap();
    let parts = arc.subarc_length(a, b).unwrap() + arc.subarc_length(b, d).unwrap();
    assert!((whole - parts).abs() < 1e-10 * whole);
}

#[test]
fn quasi_smoothness_constants() {
    let seg = Arc::segment(c(-1.0, 0.0), c(1.0, 0.0)).unwrap();
    assert!((seg.quasi_smoothness_constant(200).unwrap() - 1.0).abs() < 1e-12);
    let k = corner().quasi_smoothness_constant(400).unwrap();
    assert!((k - 2f64.sqrt()).abs() < 1e-9, "{k}");
    let q = quarter_circle().quasi_smoothness_constant(400).unwrap();
    let expected = FRAC_PI_4 / FRAC_PI_4.sin();
    assert!((q - expected).abs() < 1e-9, "{q} vs {expected}");
    // nondecreasing in the sample count
    let coarse = quarter_circle().quasi_smoothness_constant(17).unwrap();
    assert!(coarse <= q + 1e-12);
}

#[test]
fn broken_arcs_are_rejected() {
    let gap = Arc::new(vec![
        Piece::Segment { a: c(0.0, 0.0), b: c(1.0, 0.0) },
        Piece::Segment { a: c(1.1, 0.0), b: c(1.0, 1.0) },
    ]);
    assert!(gap.is_err());
    let crossing = Arc::polyline(&[c(0.0, 0.0), c(2.0, 0.0), c(2.0, 1.0), c(1.0, -1.0)]);
    assert!(crossing.is_err());
    assert!(Arc::segment(c(1.0, 1.0), c(1.0, 1.0)).is_err());
}

#[test]
fn lemniscate_values() {
    let lem = Lemniscate::new(4, 1.0).unwrap();
    assert!((lem.eval(c(0.0, 0.0)) - c(-1.0, 0.0)).norm() < 1e-15);
    assert!(lem.eval(lem.roots()[0]).norm() < 1e-15);
    let z = c(0.4, 0.7);
    assert!((lem.eval(z) - (z.powu(4) - 1.0)).norm() < 1e-14);
    let two = Lemniscate::new(2, 1.0).unwrap();
    assert!((two.eval(c(2.0, 0.0)) - c(3.0, 0.0)).norm() < 1e-15);
    let wide = Lemniscate::new(3, 2.0).unwrap();
    assert!((wide.eval_normalized(c(0.0, 0.0)).norm() - 1.0).abs() < 1e-12);
}

#[test]
fn lemniscate_sides() {
    let lem = Lemniscate::new(4, 1.0).unwrap();
    assert_eq!(lem.classify(c(0.0, 0.0), 1e-12), LemniscateSide::On);
    assert_eq!(lem.classify(lem.roots()[1], 1e-12), LemniscateSide::Inside);
    assert_eq!(lem.classify(c(10.0, 0.0), 1e-12), LemniscateSide::Outside);
}

#[test]
fn lemniscate_distance_of_compact_sets() {
    let lem = Lemniscate::<f64>::new(4, 1.0).unwrap();
    assert!((lem.d_of_e(&[lem.roots()[0]]).unwrap() - 1.0).abs() < 1e-15);
    assert!((lem.d_of_e(&[c(0.5, 0.0)]).unwrap() - 0.0625).abs() < 1e-15);
    assert!(matches!(lem.d_of_e(&[c(0.0, 0.0)]), Err(Error::TouchesLemniscate(_))));
}

#[test]
fn admissibility_of_the_corner() {
    let lem = Lemniscate::new(4, 1.0).unwrap();
    let (worst, _) = lem.check_admissible(&corner(), 1.0).unwrap();
    assert!(worst <= 1.0);
    let long = Arc::polyline(&[c(1.5, 0.0), c(0.0, 0.0), c(0.0, 1.0)]).unwrap();
    assert!(lem.check_admissible(&long, 1.0).is_err());
}

#[test]
fn jump_orders() {
    let f = two_branch(corner(), |_| c(0.0, 0.0), |z| z).unwrap();
    assert_eq!(f.orders(), &[Some(0)]);
    let f = two_branch(corner(), |_| c(0.0, 0.0), |z| z.powu(3)).unwrap();
    assert_eq!(f.orders(), &[Some(2)]);
    let f = two_branch(corner(), |z| z.exp(), |z| 1.0 + z + z * z * 0.5).unwrap();
    assert_eq!(f.orders(), &[Some(2)]);
    // a shared polynomial leaves the order alone
    let f = two_branch(corner(), |z| z.exp() + z * z * 3.0, |z| 1.0 + z + z * z * 3.5).unwrap();
    assert_eq!(f.orders(), &[Some(2)]);
    let same = two_branch(corner(), |z| z.sin(), |z| z.sin()).unwrap();
    assert_eq!(same.orders(), &[None]);
}

#[test]
fn declared_orders_must_match() {
    let r = PiecewiseAnalyticFunction::new(
        corner(),
        vec![1.0],
        vec![Branch::new("0", c(0.0, 0.0), 10.0, |_| c(0.0, 0.0)), Branch::new("z", c(0.0, 0.0), 10.0, |z| z)],
        Some(vec![1]),
    );
    assert!(r.is_err());
}

#[test]
fn branch_evaluation_follows_subarcs() {
    let f = two_branch(corner(), |_| c(0.0, 0.0), |z| z).unwrap();
    assert_eq!(f.eval_param(0.5).unwrap(), c(0.0, 0.0));
    assert!((f.eval_param(1.5).unwrap() - c(0.0, 0.5)).norm() < 1e-15);
    assert_eq!(f.singular_points(), vec![c(0.0, 0.0)]);
    let jump = f.jump(0, Complex::from_polar(0.1, PI / 4.0));
    assert!((jump - Complex::from_polar(-0.1, PI / 4.0)).norm() < 1e-15);
}

#[test]
fn single_precision_geometry() {
    let z = |re: f32, im: f32| num_complex::Complex::new(re, im);
    let arc = Arc::<f32>::polyline(&[z(1.0, 0.0), z(0.0, 0.0), z(0.0, 1.0)]).unwrap();
    assert_eq!(arc.eval(1.5).unwrap(), z(0.0, 0.5));
    assert!((arc.length() - 2.0).abs() < 1e-6);
    let lem = Lemniscate::<f32>::new(4, 1.0).unwrap();
    assert!((lem.eval(z(0.0, 0.0)) - z(-1.0, 0.0)).norm() < 1e-6);
}
