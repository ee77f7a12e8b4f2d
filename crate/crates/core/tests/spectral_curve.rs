use proptest::prelude::*;
use qkm::io::CurveRecord;
use qkm::series::{c, re, C64};
use qkm::spectral_curve::{certify_galois, solve_curve, AlphaPoints, ModelData, RamificationData, SpectralCurve};
use qkm::Error;

fn curve(e: &[f64], r: &[u32], lambda: f64) -> SpectralCurve {
    solve_curve(&ModelData::new(e.to_vec(), r.to_vec(), lambda).unwrap(), 1e-13, 10).unwrap()
}

fn close(a: C64, b: C64, tol: f64) -> bool {
    (a - b).norm() <= tol * (1.0 + b.norm())
}

/// Independent d = 1 solution: eliminate ϱ and bisect in ε.
fn d1_bisect(e: f64, r: f64, lambda: f64) -> (f64, f64) {
    let rho = |eps: f64| 2.0 * r * eps * (eps - e) / lambda;
    let g = |eps: f64| rho(eps) * (1.0 + lambda * rho(eps) / (r * 4.0 * eps * eps)) - r;
    let (mut lo, mut hi) = (e, e + lambda + 1.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let eps = 0.5 * (lo + hi);
    (eps, rho(eps))
}

#[test]
fn decoupled_curve_is_identity() {
    let m = ModelData::decoupled(vec![1.0, 2.5], vec![1, 3]).unwrap();
    let cv = solve_curve(&m, 1e-13, 4).unwrap();
    assert_eq!(cv.eps, vec![re(1.0), re(2.5)]);
    assert_eq!(cv.rho, vec![re(1.0), re(3.0)]);
    let z = c(0.3, 0.2);
    assert_eq!(cv.r(&z), z);
}

#[test]
fn d1_matches_bisection() {
    for (e, r, lam) in [(1.0, 1, 0.125), (0.5, 3, 0.8), (2.0, 2, 0.01)] {
        let cv = curve(&[e], &[r], lam);
        let (eps, rho) = d1_bisect(e, r as f64, lam);
        assert!((cv.eps[0].re - eps).abs() < 1e-12, "{} vs {eps}", cv.eps[0]);
        assert!((cv.rho[0].re - rho).abs() < 1e-11, "{} vs {rho}", cv.rho[0]);
    }
}

#[test]
fn interpolation_conditions_hold() {
    let (e, r) = ([0.5, 1.0, 1.7], [2u32, 1, 3]);
    let cv = curve(&e, &r, 0.4);
    for k in 0..3 {
        assert!((cv.r(&cv.eps[k]) - e[k]).norm() < 1e-13);
        assert!((cv.rho[k] * cv.r_deriv(&cv.eps[k], 1) - r[k] as f64).norm() < 1e-13);
    }
}

#[test]
fn invalid_models_are_rejected() {
    assert!(matches!(ModelData::new(vec![1.0, 1.0], vec![1, 1], 0.1), Err(Error::InvalidModel(_))));
    assert!(matches!(ModelData::new(vec![-1.0], vec![1], 0.1), Err(Error::InvalidModel(_))));
    assert!(matches!(ModelData::new(vec![1.0], vec![0], 0.1), Err(Error::InvalidModel(_))));
    assert!(matches!(ModelData::new(vec![1.0], vec![1], 0.0), Err(Error::InvalidModel(_))));
    let m = ModelData::new(vec![2.0, 1.0], vec![1, 2], 0.1).unwrap();
    assert_eq!(m.e, vec![1.0, 2.0]);
    assert_eq!(m.n, 3);
}

#[test]
fn pole_of_r_is_reported() {
    let cv = curve(&[1.0], &[1], 0.125);
    assert!(matches!(cv.eval_r(-cv.eps[0], 0), Err(Error::PoleOfR(_))));
}

#[test]
fn preimages_d1_satisfy_vieta() {
    let cv = curve(&[1.0], &[1], 0.125);
    let z = c(0.7, 0.4);
    let p = cv.preimages(z).unwrap();
    assert_eq!(p.len(), 2);
    assert_eq!(p[0], z);
    assert!(close(p[0] + p[1], cv.r(&z) - cv.eps[0], 1e-13));
}

#[test]
fn preimages_share_the_fibre() {
    let cv = curve(&[0.5, 1.0, 1.7], &[2, 1, 3], 0.4);
    let z = c(0.3, 0.9);
    let p = cv.preimages(z).unwrap();
    assert_eq!(p.len(), 4);
    for v in &p[1..] {
        assert!((cv.r(v) - cv.r(&z)).norm() < 1e-12);
        assert!((v - z).norm() > 1e-3);
    }
}

#[test]
fn ramification_points_are_simple_critical_points() {
    let cv = curve(&[0.5, 1.0, 1.7], &[2, 1, 3], 0.4);
    let ram = RamificationData::compute(&cv).unwrap();
    assert_eq!(ram.len(), 2 * cv.d());
    for b in &ram.beta {
        assert!(cv.r_deriv(b, 1).norm() < 1e-11);
        assert!(cv.r_deriv(b, 2).norm() > 1e-8);
    }
}

#[test]
fn beta_approaches_minus_eps_like_sqrt_lambda() {
    let ratio = |lam: f64| {
        let cv = curve(&[1.0, 2.0], &[1, 1], lam);
        let ram = RamificationData::compute(&cv).unwrap();
        ram.beta.iter().map(|b| cv.eps.iter().map(|e| (b + e).norm()).fold(f64::INFINITY, f64::min)).fold(0.0, f64::max)
            / lam.sqrt()
    };
    let (a, b) = (ratio(1e-4), ratio(1e-6));
    assert!((a / b - 1.0).abs() < 0.05, "{a} {b}");
}

#[test]
fn galois_involution_is_certified() {
    let cv = curve(&[0.5, 1.0, 1.7], &[2, 1, 3], 0.4);
    let ram = RamificationData::compute(&cv).unwrap();
    for i in 0..ram.len() {
        for k in [4, 8, 12] {
            let (r1, r2) = certify_galois(&cv, &ram, i, k).unwrap();
            assert!(r1 < 1e-9 && r2 < 1e-9, "beta_{i} K={k}: {r1:e} {r2:e}");
        }
        assert_eq!(ram.galois[i][0], re(-1.0));
    }
}

#[test]
fn galois_order_beyond_storage_is_an_error() {
    let cv = curve(&[1.0], &[1], 0.125);
    let ram = RamificationData::compute(&cv).unwrap();
    assert!(matches!(ram.galois_series(0, 1000), Err(Error::OrderUnavailable { .. })));
}

#[test]
fn y_ratios_match_derivatives_of_y() {
    let cv = curve(&[0.5, 1.0], &[1, 2], 0.3);
    let ram = RamificationData::compute(&cv).unwrap();
    for i in 0..ram.len() {
        let b = ram.beta[i];
        // Finite-difference free check through a Taylor series of y.
        let q = qkm::Series::variable(b, 6);
        let y = cv.y(&q);
        let y1 = y.coeff(1).unwrap();
        let mut fact = 1.0;
        for n in 0..=4 {
            fact *= (n + 1) as f64;
            let want = y.coeff(n + 1).unwrap() * fact / y1;
            assert!(close(ram.yratios[i][n as usize], want, 1e-11));
        }
    }
}

/// Bracket of the printed kernel expansion at order `(q−β)^n`, as a function
/// of `w = 1/(z−β)`.
fn printed_kernel(n: i32, x: &[C64], y: &[C64], w: C64) -> C64 {
    let (x1, x2, x3) = (x[1], x[2], x[3]);
    let (y1, y2) = (y[1], y[2]);
    match n {
        -1 => -w * w / 2.0,
        0 => -x1 * w * w / 12.0,
        1 => (-x1 * x1 / 8.0 - x1 * y1 / 12.0 + x2 / 12.0 + y2 / 12.0) * w * w + x1 / 6.0 * w.powi(3) - w.powi(4) / 2.0,
        2 => {
            (-x1.powi(3) * 37.0 / 432.0 - x1 * x1 * y1 / 24.0 + x1 * x2 / 12.0 + x1 * y2 / 24.0 - x3 / 80.0) * w * w
                + x1 * x1 / 12.0 * w.powi(3)
                - x1 / 4.0 * w.powi(4)
        }
        _ => unreachable!(),
    }
}

#[test]
fn kernel_matches_printed_expansion() {
    let cv = curve(&[0.5, 1.0], &[1, 2], 0.3);
    let ram = RamificationData::compute(&cv).unwrap();
    for i in 0..ram.len() {
        let b = ram.beta[i];
        let pref = cv.r_deriv(&b, 2) * cv.r_deriv(&-b, 1);
        for z in [c(0.9, 0.4), c(-0.2, 1.3)] {
            let k = cv.kernel_series(&ram, i, z, 4).unwrap();
            assert_eq!(k.ord_min(), -1);
            let w = (z - b).inv();
            for n in -1..=2 {
                let got = k.coeff(n).unwrap() * pref;
                let want = printed_kernel(n, &ram.xratios[i], &ram.yratios[i], w);
                assert!(close(got, want, 1e-9), "beta_{i} n={n}: {got} vs {want}");
            }
        }
    }
}

#[test]
fn kernel_too_close_to_beta_is_rejected() {
    let cv = curve(&[1.0], &[1], 0.125);
    let ram = RamificationData::compute(&cv).unwrap();
    assert!(matches!(cv.kernel_series(&ram, 0, ram.beta[0], 4), Err(Error::PointTooCloseToBeta(_))));
}

#[test]
fn alpha_points_are_fixed_points() {
    let cv = curve(&[0.5, 1.0, 1.7], &[2, 1, 3], 0.4);
    let al = AlphaPoints::compute(&cv).unwrap();
    assert_eq!(al.alpha.len(), cv.d());
    for a in &al.alpha {
        assert!((cv.r(a) - cv.r(&-a)).norm() < 1e-12);
        assert!(a.norm() > 1e-6);
    }
}

#[test]
fn curve_json_roundtrip_is_exact() {
    let cv = curve(&[0.5, 1.0, 1.7], &[2, 1, 3], 0.4);
    let ram = RamificationData::compute(&cv).unwrap();
    let al = AlphaPoints::compute(&cv).unwrap();
    let rec = CurveRecord::new(&cv, Some(&ram), Some(&al));
    let text = rec.to_json();
    let back = CurveRecord::from_json(&text).unwrap();
    assert_eq!(back, rec);
    assert_eq!(back.to_json(), text);
    let cv2 = back.to_curve().unwrap();
    assert_eq!(cv2, cv);
    assert_eq!(cv2.fingerprint(), cv.fingerprint());
    assert!(CurveRecord::from_json(&text.replacen("\"d\"", "\"extra\": 1, \"d\"", 1)).is_err());
}

#[test]
fn fingerprint_depends_on_lambda() {
    let a = curve(&[1.0], &[1], 0.125);
    let b = curve(&[1.0], &[1], 0.126);
    assert_ne!(a.fingerprint(), b.fingerprint());
    assert_eq!(a.fingerprint(), curve(&[1.0], &[1], 0.125).fingerprint());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn solve_residuals_are_small(e0 in 0.2..1.0f64, gaps in prop::collection::vec(0.1..1.0f64, 0..3), lam in 0.01..0.6f64, seed in 1u32..4) {
        let mut e = vec![e0];
        for g in &gaps {
            let last = *e.last().unwrap();
            e.push(last + g);
        }
        let r: Vec<u32> = (0..e.len()).map(|k| 1 + (seed + k as u32) % 3).collect();
        let cv = curve(&e, &r, lam);
        for k in 0..e.len() {
            prop_assert!((cv.r(&cv.eps[k]) - e[k]).norm() < 1e-12);
            prop_assert!((cv.rho[k] * cv.r_deriv(&cv.eps[k], 1) - r[k] as f64).norm() < 1e-12);
        }
        // Galois involution closes on every ramification point.
        let ram = RamificationData::compute(&cv).unwrap();
        for i in 0..ram.len() {
            let (r1, r2) = certify_galois(&cv, &ram, i, 8).unwrap();
            prop_assert!(r1 < 1e-9 && r2 < 1e-9);
        }
    }
}
