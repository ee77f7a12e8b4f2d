use qkm::planar::{omega02, FrakMode, G0Mode, PlanarData};
use qkm::series::{c, limit_at, re, Scalar, Series, C64};
use qkm::spectral_curve::{solve_curve, ModelData, RamificationData, SpectralCurve};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn curve(e: &[f64], r: &[u32], lambda: f64) -> SpectralCurve {
    solve_curve(&ModelData::new(e.to_vec(), r.to_vec(), lambda).unwrap(), 1e-13, 10).unwrap()
}

fn rel(a: C64, b: C64) -> f64 {
    (a - b).norm() / (1.0 + b.norm())
}

fn random_point(rng: &mut ChaCha8Rng) -> C64 {
    c(rng.gen_range(-2.0..2.0), rng.gen_range(0.2..2.0))
}

#[test]
fn decoupled_two_point_function() {
    let m = ModelData::decoupled(vec![1.0, 2.0], vec![1, 1]).unwrap();
    let cv = solve_curve(&m, 1e-13, 2).unwrap();
    let pd = PlanarData::new(&cv).unwrap();
    let (z, w) = (c(0.3, 0.4), c(1.1, -0.2));
    for mode in [G0Mode::Sum, G0Mode::Product] {
        let g = pd.g0_two_point(z, w, mode).unwrap();
        assert!(rel(g, 1.0 / (z + w)) < 1e-14, "{mode:?}: {g}");
    }
    assert!(rel(pd.frak_g0(z, FrakMode::Formula).unwrap(), re(1.0)) < 1e-14);
    assert!(rel(pd.frak_g0(z, FrakMode::Residue).unwrap(), re(1.0)) < 1e-12);
}

#[test]
fn sum_and_product_forms_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for cv in [curve(&[1.0], &[1], 0.125), curve(&[0.5, 1.2, 2.0], &[1, 2, 1], 0.3)] {
        let pd = PlanarData::new(&cv).unwrap();
        for _ in 0..20 {
            let (z, w) = (random_point(&mut rng), random_point(&mut rng));
            let a = pd.g0_two_point(z, w, G0Mode::Sum).unwrap();
            let b = pd.g0_two_point(z, w, G0Mode::Product).unwrap();
            assert!(rel(a, b) < 1e-9, "{a} vs {b}");
            let p = pd.g0_partial_fractions(&z, &w);
            assert!(rel(p, b) < 1e-9, "{p} vs {b}");
            let s = pd.g0_two_point(w, z, G0Mode::Product).unwrap();
            assert!(rel(s, b) < 1e-10);
        }
    }
}

#[test]
fn ctensor_symmetry_and_recomputation() {
    let cv = curve(&[0.5, 1.2], &[2, 1], 0.4);
    let pd = PlanarData::new(&cv).unwrap();
    let d = 2;
    for k in 0..d {
        for l in 0..d {
            assert!(rel(pd.g_eps[k][l], pd.g_eps[l][k]) < 1e-10);
            for m in 0..d {
                for n in 0..d {
                    let a = pd.ctensor[k][l][m][n];
                    assert!(rel(a, pd.ctensor[l][k][n][m]) < 1e-9);
                    assert!(rel(a, pd.c_entry(k, l, m, n)) < 1e-9);
                }
            }
        }
    }
}

#[test]
fn frak_g0_modes_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let cv = curve(&[0.5, 1.2], &[2, 1], 0.4);
    let pd = PlanarData::new(&cv).unwrap();
    for _ in 0..10 {
        let z = random_point(&mut rng);
        let a = pd.frak_g0(z, FrakMode::Formula).unwrap();
        let b = pd.frak_g0(z, FrakMode::Residue).unwrap();
        assert!(rel(a, b) < 1e-8, "{a} vs {b}");
        // Residue at w = −z of the partial-fraction representation.
        let r = qkm::series::residue_at(-z, &-z, 4, |w| pd.g0_partial_fractions(&w.cst(z), w)).unwrap();
        assert!(rel(r, a) < 1e-9);
    }
}

#[test]
fn dse_and_ansatz_identities() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for cv in [curve(&[1.0], &[1], 0.125), curve(&[0.5, 1.2, 2.0], &[1, 2, 1], 0.3)] {
        let pd = PlanarData::new(&cv).unwrap();
        for _ in 0..20 {
            let (z, w) = (random_point(&mut rng), random_point(&mut rng));
            assert!(pd.ansatz_residual(z) < 1e-8);
            assert!(pd.gzw0_residual(z, w).unwrap() < 1e-8);
        }
    }
}

#[test]
fn pole_structure_of_two_point_function() {
    let cv = curve(&[0.5, 1.2], &[1, 1], 0.3);
    let pd = PlanarData::new(&cv).unwrap();
    let w = c(0.4, 0.7);
    let generic = Series::variable(c(-0.3, 1.1), 6);
    assert!(pd.g0_series_first(&generic, w).unwrap().ord_min() >= 0);
    let anti = Series::variable(-w, 6);
    assert_eq!(pd.g0_series_first(&anti, w).unwrap().ord_min(), -1);
    let at_hat = Series::variable(pd.hat_eps[0][0], 6);
    assert_eq!(pd.g0_series_first(&at_hat, w).unwrap().ord_min(), -1);
}

#[test]
fn omega02_examples() {
    let m = ModelData::decoupled(vec![1.0], vec![1]).unwrap();
    let id = solve_curve(&m, 1e-13, 1).unwrap();
    assert!(rel(omega02(&id, re(2.0), re(1.0)).unwrap(), re(10.0 / 9.0)) < 1e-15);
    let cv = curve(&[0.5, 1.2], &[1, 1], 0.3);
    let (u, z) = (c(0.3, 0.5), c(-0.7, 0.2));
    assert!(rel(omega02(&cv, u, z).unwrap(), omega02(&cv, z, u).unwrap()) < 1e-12);
    assert!(omega02(&cv, u, u).is_err());
    // Diagonal limit.
    let lim = limit_at(z, &z, 6, |s| {
        let zc = s.cst(z);
        let om = qkm::planar::omega02_form(s, &zc) / (cv.r_deriv(s, 1) * zc.cst(cv.r_deriv(&z, 1)));
        om - (cv.r(s) - zc.cst(cv.r(&z))).powi(-2)
    })
    .unwrap();
    let (r1, r2, r3) = (cv.r_deriv(&z, 1), cv.r_deriv(&z, 2), cv.r_deriv(&z, 3));
    let want = 1.0 / (4.0 * z * z * r1 * r1) - r3 / (6.0 * r1.powi(3)) + r2 * r2 / (4.0 * r1.powi(4));
    assert!(rel(lim, want) < 1e-9, "{lim} vs {want}");
}

#[test]
fn one_plus_one_limit_properties() {
    for cv in [curve(&[1.0], &[1], 0.125), curve(&[0.5, 1.2], &[2, 1], 0.4)] {
        let pd = PlanarData::new(&cv).unwrap();
        let q = c(0.3, 0.45);
        assert!(rel(pd.one_plus_one_limit(q).unwrap(), pd.one_plus_one_limit(-q).unwrap()) < 1e-10);
        let s = pd.one_plus_one(&Series::variable(re(0.0), 6));
        assert_eq!(s.ord_min(), -2);
        assert!(s.coeff(-1).unwrap().norm() < 1e-10);
        let z0 = re(0.0);
        let (r1, r2) = (cv.r_deriv(&z0, 1), cv.r_deriv(&z0, 2));
        let mut prod = re(1.0);
        for j in 0..cv.d() {
            prod *= ((cv.r(&z0) - cv.r(&pd.alpha[j])) / (cv.r(&z0) - cv.model.e_c(j))).powi(2);
        }
        let lam = cv.lambda();
        let a = s.coeff(-2).unwrap();
        assert!(rel(a, lam * r2 / (16.0 * r1.powi(4)) * prod) < 1e-9);
        let g0 = pd.frak_g0(z0, FrakMode::Formula).unwrap();
        assert!(rel(a, lam * r2 * g0 / (16.0 * r1.powi(3))) < 1e-9, "{a}");
        let ram = RamificationData::compute(&cv).unwrap();
        for b in &ram.beta {
            assert!(pd.one_plus_one(&Series::variable(*b, 4)).ord_min() >= 0);
        }
    }
}
