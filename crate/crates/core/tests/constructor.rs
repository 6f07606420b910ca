use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::sync::OnceLock;

use nearbest::bestapprox::lawson_minimax;
use nearbest::conformal::ExteriorMap;
use nearbest::constructor::{
    approximate_straightening, build_straightening_map, classify_points, compute_dn, eval_nearbest, quadrature_contour,
    select_theorem1_params, CauchySplit, Mode, NearBestPolynomial, Piece, Scenario, ScenarioOptions, StraightRay,
};
use nearbest::geometry::{Arc, Branch, Lemniscate, PiecewiseAnalyticFunction};
use nearbest::linalg::fit_line;
use nearbest::poly::BasisPoly;
use nearbest::{Complex, Error};

fn c(re: f64, im: f64) -> Complex {
    Complex::new(re, im)
}

fn corner() -> Arc<f64> {
    Arc::polyline(&[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 1.0)]).unwrap()
}

/// `0` on the first leg, `z` on the second.
fn corner_jump() -> PiecewiseAnalyticFunction<f64> {
    PiecewiseAnalyticFunction::new(
        corner(),
        vec![1.0],
        vec![Branch::new("0", c(0.0, 0.0), 10.0, |_| c(0.0, 0.0)), Branch::new("z", c(0.0, 0.0), 10.0, |z| z)],
        None,
    )
    .unwrap()
}

fn corner_smooth() -> PiecewiseAnalyticFunction<f64> {
    let g = |z: Complex| z * z - z * 0.5;
    PiecewiseAnalyticFunction::new(
        corner(),
        vec![1.0],
        vec![Branch::new("z^2-z/2", c(0.0, 0.0), 10.0, g), Branch::new("z^2-z/2", c(0.0, 0.0), 10.0, g)],
        None,
    )
    .unwrap()
}

fn lemniscate_mode() -> Mode<f64> {
    Mode::Theorem2 { lemniscate: Lemniscate::new(4, 1.0).unwrap() }
}

fn theorem2_corner() -> &'static Scenario<f64> {
    static S: OnceLock<Scenario<f64>> = OnceLock::new();
    S.get_or_init(|| Scenario::new(corner_jump(), lemniscate_mode(), ScenarioOptions { n_max: 64, ..Default::default() }).unwrap())
}

fn theorem2_n64() -> &'static NearBestPolynomial<f64> {
    static P: OnceLock<NearBestPolynomial<f64>> = OnceLock::new();
    P.get_or_init(|| theorem2_corner().construct(64).unwrap())
}

fn sup(v: &[f64]) -> f64 {
    v.iter().copied().fold(0.0, f64::max)
}

#[test]
fn constant_integrand_gives_ray_length() {
    for dir in [0.0, 0.7] {
        let ray = StraightRay { z0: c(0.3, -0.2), direction: dir, length: 2.5 };
        let r = quadrature_contour(&ray, 0.1, 16, |_| c(1.0, 0.0)).unwrap();
        let exact = Complex::from_polar(2.5, dir);
        assert!((r.value - exact).norm() < 1e-12, "{} vs {exact}", r.value);
        assert!((r.outer + r.inner - r.value).norm() < 1e-14);
    }
}

#[test]
fn linear_integrand_on_imaginary_ray() {
    let h = 0.8;
    let ray = StraightRay { z0: c(0.0, 0.0), direction: FRAC_PI_2, length: h };
    let r = quadrature_contour(&ray, 0.05, 16, |z| z).unwrap();
    assert!((r.value - c(-h * h / 2.0, 0.0)).norm() < 1e-13, "{}", r.value);
    assert!(r.error < 1e-10 * h * h);
    // inner part spans |ζ| < 0.05
    assert!((r.inner - c(-0.05 * 0.05 / 2.0, 0.0)).norm() < 1e-13);
}

#[test]
fn dn_matches_joukowski_semi_minor_axis() {
    let seg = Arc::segment(c(-1.0, 0.0), c(1.0, 0.0)).unwrap();
    let map = ExteriorMap::new(&seg, 1e-10).unwrap();
    let d16 = compute_dn(&map, c(0.0, 0.0), 16).unwrap();
    assert!((d16 - (17.0 / 16.0 - 16.0 / 17.0) / 2.0).abs() < 1e-9, "{d16}");
    let ds: Vec<f64> = [8, 16, 32, 64].iter().map(|&n| compute_dn(&map, c(0.0, 0.0), n).unwrap()).collect();
    assert!(ds.windows(2).all(|w| w[1] < w[0]), "{ds:?}");
    for n in [32, 64, 128, 256] {
        let scaled = compute_dn(&map, c(0.0, 0.0), n).unwrap() * n as f64;
        assert!((0.8..=1.2).contains(&scaled), "n = {n}: {scaled}");
    }
    assert!(compute_dn(&map, c(0.0, 0.0), 0).is_err());
}

#[test]
fn zero_jump_gives_zero_h1() {
    let f = corner_smooth();
    let map = ExteriorMap::new(f.arc(), 1e-8).unwrap();
    let split = CauchySplit::new(&f, &map, 16).unwrap();
    for k in 0..50 {
        let t = 2.0 * (k as f64 + 0.5) / 50.0;
        assert_eq!(split.h1(f.arc().eval(t).unwrap()), c(0.0, 0.0));
    }
}

#[test]
fn cauchy_split_reproduces_f() {
    let s = theorem2_corner();
    let basis = &s.problem.basis;
    let fit = lawson_minimax(&s.h2_values, basis, 40, 1e-8, 500).unwrap();
    let h2 = basis.poly(fit.coeffs).unwrap();
    // fresh samples between the problem nodes
    let mut worst: f64 = 0.0;
    for k in 0..200 {
        let t = 2.0 * (k as f64 + 0.37) / 200.0;
        let z = s.f.arc().eval(t).unwrap();
        let f = s.f.eval_param(t).unwrap();
        worst = worst.max((s.split.h1(z) + h2.eval(z) - f).norm());
    }
    assert!(worst < 1e-6, "{worst:e}");
}

#[test]
fn analytic_remainder_decays_geometrically() {
    let s = theorem2_corner();
    let ns = [2usize, 4, 6, 8, 10, 12, 14, 16];
    let errs: Vec<f64> = ns
        .iter()
        .map(|&n| lawson_minimax(&s.h2_values, &s.problem.basis, n, 1e-8, 500).unwrap().e_n)
        .collect();
    let x: Vec<f64> = ns.iter().map(|&n| n as f64).collect();
    let y: Vec<f64> = errs.iter().map(|e| e.ln()).collect();
    let line = fit_line(&x, &y).unwrap();
    assert!(line.slope < 0.0 && line.r_squared >= 0.95, "{line:?} {errs:?}");
}

#[test]
fn straightening_is_identity_on_model_wedge() {
    let ray = StraightRay { z0: c(0.0, 0.0), direction: FRAC_PI_4, length: 0.5 };
    let f = build_straightening_map(&corner(), 1.0, &ray, 4).unwrap();
    let mut anchored = false;
    for s in &f.samples {
        assert!((s.image - s.z).norm() < 1e-12, "{:?}", s);
        if s.z == c(0.0, 0.0) {
            assert_eq!(s.image, c(0.0, 0.0));
            anchored = true;
        }
    }
    assert!(anchored);
    let (lo, hi) = f.lipschitz;
    assert!((lo - 1.0).abs() < 1e-9 && (hi - 1.0).abs() < 1e-9, "{lo} {hi}");
    assert!((f.lengths[0] - 1.0).abs() < 1e-14 && (f.lengths[1] - 1.0).abs() < 1e-14);
}

#[test]
fn straightening_lipschitz_bounds_on_real_ray() {
    let f = corner_jump();
    let map = ExteriorMap::new(f.arc(), 1e-8).unwrap();
    let split = CauchySplit::new(&f, &map, 16).unwrap();
    let ray = split.configs[0].ray(&map, 0);
    let sm = build_straightening_map(f.arc(), 1.0, &ray, 3).unwrap();
    let (lo, hi) = sm.lipschitz;
    assert!(lo > 0.0 && hi.is_finite() && lo <= 1.0 + 1e-12 && hi >= 1.0 - 1e-12, "{lo} {hi}");
    let origin = sm.samples.iter().find(|s| s.z == c(0.0, 0.0)).unwrap();
    assert_eq!(origin.image, c(0.0, 0.0));
    assert!(sm.samples.iter().any(|s| s.piece == Piece::Ray));
}

#[test]
fn straightening_of_flat_segment_is_linear() {
    // F(z) = −z for κ = 2 on [−1, 1] with the ray pointing down
    let seg = Arc::polyline(&[c(-1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
    let ray = StraightRay { z0: c(0.0, 0.0), direction: -FRAC_PI_2, length: 0.5 };
    let f = build_straightening_map(&seg, 1.0, &ray, 2).unwrap();
    let (q, err) = approximate_straightening(&f, 1).unwrap();
    assert!(err < 1e-12, "{err:e}");
    assert!((q.eval(c(0.25, 0.1)) + c(0.25, 0.1)).norm() < 1e-12);
}

#[test]
fn straightening_rate_on_corner() {
    let f = corner_jump();
    let map = ExteriorMap::new(f.arc(), 1e-8).unwrap();
    let split = CauchySplit::new(&f, &map, 16).unwrap();
    let ray = split.configs[0].ray(&map, 1);
    let sm = build_straightening_map(f.arc(), 1.0, &ray, 2).unwrap();
    let rate = sm.rate().unwrap();
    assert!(rate.errors.windows(2).all(|w| w[1] <= w[0] + 1e-10), "{:?}", rate.errors);
    assert!(rate.alpha > 0.0 && rate.r_squared >= 0.8, "{rate:?}");
}

#[test]
fn theorem1_parameter_rule() {
    let p = select_theorem1_params(0.5, 1.0, [1.0, 1.0]).unwrap();
    assert_eq!(p.kappa, 2);
    assert!((p.beta - (1.0 / 3.0 + 0.5) / 2.0).abs() < 1e-12);
    assert_eq!(p.zeta0, 2.0);
    assert!(matches!(select_theorem1_params(0.99, 1.0, [1.0, 1.0]), Err(Error::NoAdmissibleParameters(_))));
    // σ = 0.3 admits κ = 2 as well; a slow rate forces a larger κ
    assert_eq!(select_theorem1_params(0.3, 1.0, [1.0, 1.0]).unwrap().kappa, 2);
    let slow = select_theorem1_params(0.5, 0.1, [0.5, 2.0]).unwrap();
    assert_eq!(slow.kappa, 11);
    assert_eq!(slow.zeta0, 2.0 * 2f64.powi(11));
    assert!(select_theorem1_params(1.5, 1.0, [1.0, 1.0]).is_err());
}

#[test]
fn classification_on_model_wedge() {
    let ray = StraightRay { z0: c(0.0, 0.0), direction: FRAC_PI_4, length: 0.5 };
    let f = build_straightening_map(&corner(), 1.0, &ray, 4).unwrap();
    let id = BasisPoly::from_monomial(vec![c(0.0, 0.0), c(1.0, 0.0)]);
    let cls = classify_points(&f, &id, 1e-3);
    assert!(cls.violation().is_none(), "{cls:?}");
    assert!(cls.max_arc_angle < 1e-9 && cls.max_ray_angle < 1e-9, "{cls:?}");
    assert!(cls.a2 > 0 && cls.a3 > 0 && cls.b2 > 0 && cls.a1 > 0 && cls.b1 > 0);
    assert_eq!(cls.a1 + cls.a2 + cls.a3 + cls.b1 + cls.b2, f.samples.len());
    // a huge constant puts everything in the small-|Q| classes
    let all_small = classify_points(&f, &id, 100.0);
    assert_eq!(all_small.a1 + all_small.b1, f.samples.len());
    assert_eq!((all_small.max_arc_angle, all_small.max_ray_angle), (0.0, 0.0));
    // a rotated Q breaks the angle bound
    let rot = BasisPoly::from_monomial(vec![c(0.0, 0.0), Complex::from_polar(1.0, PI / 8.0)]);
    assert!(classify_points(&f, &rot, 1e-3).violation().is_some());
}

#[test]
fn eval_of_explicit_polynomials() {
    let zero = NearBestPolynomial::<f64>::from_monomial(vec![c(0.0, 0.0)]);
    assert_eq!(eval_nearbest(&zero, c(0.3, 2.0)), c(0.0, 0.0));
    assert_eq!(zero.degree(), None);
    let (a, b) = (c(1.5, -0.5), c(0.25, 2.0));
    let p = NearBestPolynomial::from_monomial(vec![a, b]);
    for z in [c(0.0, 0.0), c(1.0, 1.0), c(-3.0, 0.5)] {
        assert!((eval_nearbest(&p, z) - (a + b * z)).norm() < 1e-14);
    }
}

#[test]
fn zero_jump_construction_is_the_remainder_fit() {
    let s = Scenario::new(corner_smooth(), lemniscate_mode(), ScenarioOptions { n_max: 16, ..Default::default() }).unwrap();
    let p = s.construct(16).unwrap();
    assert!(sup(&s.error_profile(&p)) < 1e-8);
    let meta = p.meta.unwrap();
    assert!(meta.singularities[0].rays.is_empty());
    assert!(meta.exact_degree.unwrap() <= 16);
}

#[test]
fn theorem2_corner_construction() {
    let s = theorem2_corner();
    let p = theorem2_n64();
    let meta = p.meta.as_ref().unwrap();
    // degree accounting
    assert!(meta.degree_bound <= 64);
    assert!(meta.exact_degree.unwrap() <= meta.degree_bound);
    assert!(meta.projection_residual < 1e-8);
    assert!(meta.quadrature_change < 1e-9, "{:e}", meta.quadrature_change);
    // |P(z)/P(ζ)| ≤ 1 on the arc for ζ on the rays
    for r in &meta.singularities[0].rays {
        assert_eq!(r.damping.m, 8);
        assert!(r.ratio_max <= 1.0 + 1e-12, "{}", r.ratio_max);
    }
    let best = s.best(64).unwrap();
    let ratio = sup(&s.error_profile(p)) / best.e_n;
    assert!(ratio >= 1.0 && ratio < 10.0, "{ratio}");
}

#[test]
fn theorem2_damping_bound_away_from_corner() {
    let s = theorem2_corner();
    let p = theorem2_n64();
    let lem = Lemniscate::new(4, 1.0).unwrap();
    let errs = s.error_profile(p);
    let pts = s.node_points();
    let far: Vec<usize> = (0..pts.len()).filter(|&k| pts[k].norm() >= 0.5).collect();
    let far_pts: Vec<Complex> = far.iter().map(|&k| pts[k]).collect();
    let d_e = lem.d_of_e(&far_pts).unwrap();
    let err_e = far.iter().map(|&k| errs[k]).fold(0.0, f64::max);
    let err_l = sup(&errs);
    let bound = err_l * (1.0 - d_e).powi(8) * 10.0;
    assert!(err_e <= bound, "{err_e:e} > {bound:e}");
}

#[test]
fn direct_and_stored_evaluation_agree() {
    let p = theorem2_n64();
    let arc = corner();
    // deterministic scatter near the arc
    let mut worst: f64 = 0.0;
    for k in 0..32 {
        let t = 2.0 * ((k as f64 * 0.618_033_988_75).fract());
        let off = 0.02 * ((k as f64 * 0.414_213_562_37).fract() - 0.5);
        let z = arc.eval(t).unwrap() + c(off, off);
        let a = eval_nearbest(p, z);
        let b = p.direct(z).unwrap();
        worst = worst.max((a - b).norm() / b.norm().max(1e-3));
    }
    assert!(worst < 1e-9, "{worst:e}");
}

#[test]
fn construction_is_bit_identical() {
    let s = theorem2_corner();
    let a = s.construct(24).unwrap().monomial_coefficients();
    let b = s.construct(24).unwrap().monomial_coefficients();
    let bits = |v: &[Complex]| v.iter().flat_map(|z| [z.re.to_bits(), z.im.to_bits()]).collect::<Vec<_>>();
    assert_eq!(bits(&a), bits(&b));
}

#[test]
fn construction_rejects_bad_degrees() {
    let s = theorem2_corner();
    assert!(s.construct(0).is_err());
    assert!(s.construct(65).is_err());
    // m = ⌊n/8⌋ vanishes
    assert!(s.construct(7).is_err());
}

#[test]
fn inadmissible_lemniscate_is_rejected() {
    // the first leg reaches outside |z^4 − 1| < 1
    let arc = Arc::polyline(&[c(1.5, 0.0), c(0.0, 0.0), c(0.0, 1.0)]).unwrap();
    let f = PiecewiseAnalyticFunction::new(
        arc,
        vec![1.0],
        vec![Branch::new("0", c(0.0, 0.0), 10.0, |_| c(0.0, 0.0)), Branch::new("z", c(0.0, 0.0), 10.0, |z| z)],
        None,
    )
    .unwrap();
    let r = Scenario::new(f, lemniscate_mode(), ScenarioOptions { n_max: 16, ..Default::default() });
    assert!(matches!(r, Err(Error::InadmissibleLemniscate(_))), "{:?}", r.err());
}
