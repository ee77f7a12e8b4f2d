use proptest::prelude::*;
use qkm::series::{c, jet_derivative, jet_point, jet_zero, re, residue_at, Jet2, LaurentSeries, Scalar, Series, C64};
use qkm::Error;

fn close(a: C64, b: C64, tol: f64) -> bool {
    (a - b).norm() <= tol * (1.0 + b.norm())
}

#[test]
fn inverse_times_variable_is_one() {
    let z = Series::variable(re(0.0), 6);
    let p = z.recip() * z.clone();
    assert_eq!(p.ord_min(), 0);
    assert!(close(p.coeff(0).unwrap(), re(1.0), 1e-15));
    for n in 1..=p.trunc() {
        assert_eq!(p.coeff(n).unwrap(), re(0.0));
    }
}

#[test]
fn geometric_quotient() {
    let z = Series::variable(re(0.0), 2);
    let q = (z.add_c(re(1.0))) / (z.sub_from_c(re(1.0)));
    assert_eq!(q.trunc(), 2);
    let want = [1.0, 2.0, 2.0];
    for (n, w) in want.iter().enumerate() {
        assert!(close(q.coeff(n as i32).unwrap(), re(*w), 1e-15));
    }
}

#[test]
fn division_bookkeeping_shifts_orders() {
    let z = Series::variable(re(0.0), 8);
    let a = z.powi(-2).add_c(re(3.0));
    let b = z.powi(3) + z.powi(4);
    let q = a.clone() / b.clone();
    assert_eq!(q.ord_min(), a.ord_min() - b.ord_min());
    assert!(q.trunc() <= a.trunc() - b.ord_min());
    let back = q * b;
    for n in back.ord_min()..=back.trunc() {
        assert!(close(back.coeff(n).unwrap(), a.coeff(n).unwrap(), 1e-12));
    }
}

#[test]
fn division_by_zero_series() {
    let z = Series::variable(re(1.0), 4);
    let zero = z.clone() - z.clone();
    assert_eq!(z.try_div(&zero), Err(Error::DivisionByZeroSeries));
    assert!(!(z / zero).is_finite());
}

#[test]
fn center_mismatch_is_reported() {
    let a = Series::variable(re(0.0), 4);
    let b = Series::variable(re(1.0), 4);
    assert!(matches!(a.try_add(&b), Err(Error::CenterMismatch(..))));
}

#[test]
fn composition_examples() {
    let w = Series::variable(re(1.0), 6);
    let sq = w.sq();
    let q = Series::variable(re(0.0), 6).add_c(re(1.0));
    let r = sq.compose(&q).unwrap();
    for (n, want) in [1.0, 2.0, 1.0, 0.0].iter().enumerate() {
        assert!(close(r.coeff(n as i32).unwrap(), re(*want), 1e-14));
    }
    let inv = w.recip().compose(&q).unwrap();
    for n in 0..=5 {
        let want = if n % 2 == 0 { 1.0 } else { -1.0 };
        assert!(close(inv.coeff(n).unwrap(), re(want), 1e-13));
    }
    let bad = Series::variable(re(0.0), 4).add_c(re(2.0));
    assert!(matches!(sq.compose(&bad), Err(Error::IncompatibleSubstitution { .. })));
}

#[test]
fn residues_of_simple_cases() {
    let z = Series::variable(re(0.0), 5);
    assert!(close(z.recip().residue().unwrap(), re(1.0), 1e-15));
    assert_eq!(z.powi(-2).residue().unwrap(), re(0.0));
    // h(v)/(v+z) about v = −z gives h(−z).
    let z0 = c(0.3, -0.7);
    let r = residue_at(-z0, &(-z0), 6, |v| {
        let h = v.sq().add_c(re(2.0)) * v.clone().recip().add_c(re(5.0)).recip();
        h / v.add_c(z0)
    })
    .unwrap();
    let h = |v: C64| (v * v + 2.0) / (1.0 / v + 5.0);
    assert!(close(r, h(-z0), 1e-12));
}

#[test]
fn residue_beyond_truncation_is_an_error() {
    let z = Series::variable(re(0.0), 3).powi(2);
    let s = z.truncated(-2);
    assert!(matches!(s.residue(), Err(Error::OrderOutOfRange { .. })));
}

#[test]
fn nested_jets_give_mixed_derivatives() {
    // f(u1, u2) = u1² u2³ / (1 + u1 u2)
    let proto: Jet2 = jet_zero();
    let (a, b) = (c(0.4, 0.1), c(-0.3, 0.8));
    let u1 = jet_point(&proto, a, 0);
    let u2 = jet_point(&proto, b, 1);
    let f = u1.sq() * u2.powi(3) / (u1.clone() * u2.clone()).add_c(re(1.0));
    let g = |x: C64, y: C64| x * x * y.powi(3) / (1.0 + x * y);
    // Central differences as an independent estimate of the mixed derivative.
    let h = 1e-4;
    let fd = (g(a + h, b + h) - g(a + h, b - h) - g(a - h, b + h) + g(a - h, b - h)) / (4.0 * h * h);
    assert!(close(jet_derivative(&f, &[0, 1]), fd, 1e-6));
    assert!(close(f.value(), g(a, b), 1e-14));
}

fn poly_strategy() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-2.0..2.0f64, -2.0..2.0f64), 1..5)
}

fn eval_poly(p: &[(f64, f64)], x: C64) -> C64 {
    p.iter().rev().fold(re(0.0), |acc, &(a, b)| acc * x + c(a, b))
}

fn poly_series(p: &[(f64, f64)], z: &Series) -> Series {
    p.iter().rev().fold(z.zero(), |acc, &(a, b)| acc * z.clone() + z.cst(c(a, b)))
}

proptest! {
    #[test]
    fn simple_pole_residue(p in poly_strategy(), r in (-1.5..1.5f64, -1.5..1.5f64), s in (-1.5..1.5f64, -1.5..1.5f64)) {
        let (r, s) = (c(r.0, r.1), c(s.0, s.1));
        prop_assume!((r - s).norm() > 0.2);
        // q(v) = (v − r)(v − s), residue at r is p(r)/q'(r).
        let z = Series::variable(r, 8);
        let q = (z.clone() - z.cst(r)) * (z.clone() - z.cst(s));
        let res = (poly_series(&p, &z) / q).residue().unwrap();
        let want = eval_poly(&p, r) / (r - s);
        prop_assert!((res - want).norm() < 1e-10 * (1.0 + want.norm()));
    }

    #[test]
    fn compose_with_inverse_roundtrip(a in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 4), g1 in 0.5..2.0f64, g2 in -0.5..0.5f64) {
        let k = 8;
        let f = Series::from_coeffs(re(0.0), 0, a.iter().map(|&(x, y)| c(x, y)).collect(), k);
        // g(q) = g1 q + g2 q², inverse by reversion through Newton in series.
        let q = Series::variable(re(0.0), k);
        let g = q.scale_re(g1) + q.sq().scale_re(g2);
        let mut inv = q.scale_re(1.0 / g1);
        for _ in 0..6 {
            let val = g.compose(&inv).unwrap() - q.clone();
            let dg = (q.scale_re(2.0 * g2).add_c(re(g1))).compose(&inv).unwrap();
            inv = inv - val / dg;
        }
        let back = f.compose(&g).unwrap().compose(&inv).unwrap();
        for n in 0..=back.trunc().min(k) {
            prop_assert!((back.coeff_or_zero(n) - f.coeff_or_zero(n)).norm() < 1e-10);
        }
    }

    #[test]
    fn derivative_product_rule(a in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 6), b in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 6), o1 in -3..2i32, o2 in -3..2i32) {
        let f = Series::from_coeffs(re(0.5), o1, a.iter().map(|&(x, y)| c(x, y)).collect(), o1 + 5);
        let g = Series::from_coeffs(re(0.5), o2, b.iter().map(|&(x, y)| c(x, y)).collect(), o2 + 5);
        let lhs = (f.clone() * g.clone()).derivative();
        let rhs = f.derivative() * g.clone() + f * g.derivative();
        let top = lhs.trunc().min(rhs.trunc());
        for n in lhs.ord_min().min(rhs.ord_min())..=top {
            prop_assert!((lhs.coeff_or_zero(n) - rhs.coeff_or_zero(n)).norm() < 1e-12);
        }
    }
}

#[test]
fn constants_are_exact() {
    let z = Series::variable(re(0.0), 4);
    let k: LaurentSeries = z.cst(re(2.0));
    assert!(k.is_exact());
    // z is known through order 4, so z^-3 is known through relative order 3.
    let p = k * z.powi(-3);
    assert_eq!(p.trunc(), 0);
    assert_eq!(p.ord_min(), -3);
}
