use nearbest::Complex;
use nearbest_harness::expr::{parse_constant, parse_real, Expr};

fn c(re: f64, im: f64) -> Complex {
    Complex::new(re, im)
}

fn eval(src: &str, z: Complex) -> Complex {
    Expr::parse(src).unwrap().eval(z)
}

#[test]
fn precedence_and_associativity() {
    let z = c(0.3, -0.7);
    assert_eq!(eval("1 + 2*3", z), c(7.0, 0.0));
    assert_eq!(eval("8 - 3 - 2", z), c(3.0, 0.0));
    assert_eq!(eval("8 / 4 / 2", z), c(1.0, 0.0));
    assert_eq!(eval("-2^2", z), c(-4.0, 0.0));
    assert_eq!(eval("(-2)^2", z), c(4.0, 0.0));
    assert_eq!(eval("2*z^3", z), z.powi(3) * 2.0);
    assert_eq!(eval("z^-2", z), z.powi(-2));
    assert_eq!(eval("z^(-2)", z), z.powi(-2));
}

#[test]
fn complex_literals_and_functions() {
    let z = c(0.5, 0.25);
    assert_eq!(eval("3i", z), c(0.0, 3.0));
    assert_eq!(eval("i*i", z), c(-1.0, 0.0));
    assert_eq!(eval("1.5e-1 + 2e1i", z), c(0.15, 20.0));
    let v = eval("z^2 - exp(z)/2", z);
    assert!((v - (z * z - z.exp() / 2.0)).norm() < 1e-15);
    let v = eval("1/(z - (1 + i))", z);
    assert!((v - (z - c(1.0, 1.0)).inv()).norm() < 1e-15);
    assert!((parse_real("pi/2").unwrap() - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
    assert_eq!(parse_constant("2 - 3i").unwrap(), c(2.0, -3.0));
}

#[test]
fn errors_carry_columns() {
    let e = Expr::parse("z + sin(z)").unwrap_err();
    assert_eq!(e.column, 5);
    assert!(e.message.contains("sin"));
    let e = Expr::parse("z^2^3").unwrap_err();
    assert_eq!(e.column, 4);
    assert!(Expr::parse("z^0.5").is_err());
    assert!(Expr::parse("z^z").is_err());
    assert_eq!(Expr::parse("(z + 1").unwrap_err().column, 7);
    assert_eq!(Expr::parse("z $ 1").unwrap_err().column, 3);
    assert!(Expr::parse("").is_err());
    assert!(Expr::parse("z z").is_err());
    assert!(parse_constant("z + 1").is_err());
    assert!(parse_real("1 + i").is_err());
    assert!(parse_constant("1/0").is_err());
}

#[test]
fn dependence_on_z() {
    assert!(!Expr::parse("exp(2) * 3i").unwrap().depends_on_z());
    assert!(Expr::parse("1 + 0*z").unwrap().depends_on_z());
}
