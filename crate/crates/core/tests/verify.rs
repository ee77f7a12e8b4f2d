use qkm::error::Error;
use qkm::series::{c, C64};
use qkm::spectral_curve::{solve_curve, ModelData};
use qkm::trec::Instance;
use qkm::verify::*;

fn inst(e: &[f64], r: &[u32], lambda: f64) -> Instance {
    Instance::new(&solve_curve(&ModelData::new(e.to_vec(), r.to_vec(), lambda).unwrap(), 1e-13, 10).unwrap()).unwrap()
}

fn d1() -> Instance {
    inst(&[1.0], &[1], 0.125)
}

fn d2() -> Instance {
    inst(&[0.7, 1.5], &[1, 2], 0.2)
}

const CASES: [(usize, usize); 3] = [(0, 3), (0, 4), (1, 1)];

fn marked(ins: &Instance, _g: usize, m: usize, seed: u64) -> Vec<C64> {
    sample_points(ins, seed, m - 1, 0.3)
}

#[test]
fn loop_equations_hold_at_every_beta() {
    for ins in [d1(), d2()] {
        for (g, m) in CASES {
            let us = marked(&ins, g, m, 11);
            for i in 0..ins.ram.len() {
                for src in [Source::Explicit, Source::Engine] {
                    let lin = check_linear_loop(&ins, src, g, i, &us, 16, 1e-5).unwrap();
                    let quad = check_quadratic_loop(&ins, src, g, i, &us, 16, 1e-5).unwrap();
                    eprintln!("({g},{m}) beta{i} {src:?} lin {:.2e} quad {:.2e}", lin.max_residual(), quad.max_residual());
                    assert!(lin.passed, "{}", lin.to_json_line());
                    assert!(quad.passed, "{}", quad.to_json_line());
                }
            }
        }
    }
}

#[test]
fn identity_involution_fails_linear_loop() {
    let ins = d1();
    let us = marked(&ins, 0, 3, 5);
    let res = linear_loop_residuals(&ins, Source::Explicit, 0, 0, &us, 16, true).unwrap();
    let worst = res.iter().map(|r| r.1).fold(0.0, f64::max);
    assert!(worst > 1e-2, "{res:?}");
}

#[test]
fn universal_formula_reproduces_polar_part() {
    for ins in [d1(), d2()] {
        for (g, m) in CASES {
            let us = marked(&ins, g, m, 21);
            let zs: Vec<C64> = sample_points(&ins, 99, 4, 0.3).into_iter().map(|z| c(z.re, -z.im)).collect();
            let rep = check_tr_formula(&ins, Source::Explicit, g, &us, &zs, 1e-6).unwrap();
            eprintln!("tr ({g},{m}) {:.2e}", rep.max_residual());
            assert!(rep.passed, "{}", rep.to_json_line());
        }
    }
}

#[test]
fn universal_formula_refuses_initial_data() {
    let ins = d1();
    let err = check_tr_formula(&ins, Source::Explicit, 0, &[c(0.3, 0.8)], &[c(0.5, -0.5)], 1e-6).unwrap_err();
    assert!(matches!(err, Error::UnsupportedCase(_)));
}

#[test]
fn forms_are_symmetric_including_z_swaps() {
    let ins = d2();
    for m in [3, 4] {
        let pts = sample_points(&ins, 7, m, 0.3);
        let rep = check_symmetry(&ins, Source::Explicit, 0, &pts, &permutations(m), 1e-7).unwrap();
        eprintln!("sym {m} {:.2e}", rep.max_residual());
        assert!(rep.passed, "{}", rep.to_json_line());
    }
}

#[test]
fn decomposition_and_holomorphy() {
    for ins in [d1(), d2()] {
        for n in [1, 2, 3] {
            let us = sample_points(&ins, 3, n, 0.3);
            let rep = check_holomorphy(&ins, Source::Explicit, &us, 1e-7).unwrap();
            eprintln!("holo {n} {:.2e}", rep.max_residual());
            assert!(rep.passed, "{}", rep.to_json_line());
        }
        let us = sample_points(&ins, 4, 2, 0.3);
        let zs = sample_points(&ins, 8, 5, 0.3);
        assert!(check_decomposition(&ins, Source::Explicit, 0, &us, &zs, 1e-9).unwrap().passed);
    }
}

#[test]
fn reports_serialize_as_json_lines() {
    let ins = d1();
    let us = marked(&ins, 0, 3, 1);
    let rep = check_linear_loop(&ins, Source::Explicit, 0, 0, &us, 12, 1e-5).unwrap().with_seed(1);
    let line = rep.to_json_line();
    assert!(!line.contains('\n'));
    let back: CheckReport = serde_json::from_str(&line).unwrap();
    assert_eq!(back, rep);
    assert_eq!(check_linear_loop(&ins, Source::Explicit, 0, 0, &us, 12, 1e-5).unwrap().with_seed(1).to_json_line(), line);
}

#[test]
fn closure_series_regular_at_alpha_close_to_eps() {
    // d = 1: α lies about 0.056 from ε, so the local coefficients grow fast
    let ins = d1();
    let u = sample_points(&ins, 3, 1, 0.3)[0];
    for a in [ins.pd.alpha[0], -ins.pd.alpha[0]] {
        for t in [4, 6, 8] {
            let s = omega_laurent(&ins, Source::Explicit, &[u], a, t).unwrap();
            assert!(s.ord_min() >= 0, "{a} trunc {t}: {s:?}");
        }
        let exact = qkm::planar::omega02(&ins.curve, u, a).unwrap();
        let s = omega_laurent(&ins, Source::Explicit, &[u], a, 6).unwrap();
        assert!((s.coeff_or_zero(0) - exact).norm() < 1e-7 * exact.norm().max(1.0));
    }
}
