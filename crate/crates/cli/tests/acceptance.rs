//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use qkm::oracle::{closed_form_lambda_expand, planar_dse_iterate, ratio_test};
use qkm::planar::{FrakMode, G0Mode, PlanarData};
use qkm::series::{c, Scalar, Series, C64};
use qkm::spectral_curve::{certify_galois, solve_curve, ModelData, RamificationData, SpectralCurve};
use qkm::trec::*;
use qkm::verify::{self, sample_points, Source};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = (bool, String);

fn curve(e: &[f64], r: &[u32], lambda: f64) -> SpectralCurve {
    solve_curve(&ModelData::new(e.to_vec(), r.to_vec(), lambda).unwrap(), 1e-13, 10).unwrap()
}

fn inst(e: &[f64], r: &[u32], lambda: f64) -> Instance {
    Instance::new(&curve(e, r, lambda)).unwrap()
}

fn d1() -> Instance {
    inst(&[1.0], &[1], 0.125)
}

fn d2() -> Instance {
    inst(&[0.7, 1.5], &[1, 2], 0.2)
}

fn rel(a: C64, b: C64) -> f64 {
    (a - b).norm() / (1.0 + b.norm())
}

/// `m − 1` marked points in the upper half plane and `z` in the lower one.
fn marked(ins: &Instance, seed: u64, m: usize) -> (Vec<C64>, C64) {
    let us = sample_points(ins, seed, m - 1, 0.3);
    let z = sample_points(ins, seed ^ 0x5eed, 1, 0.3)[0];
    (us, c(z.re, -z.im))
}

fn lower(ins: &Instance, seed: u64, n: usize) -> Vec<C64> {
    sample_points(ins, seed, n, 0.3).into_iter().map(|z| c(z.re, -z.im)).collect()
}

fn random_model(rng: &mut ChaCha8Rng) -> ModelData {
    let d = rng.gen_range(1..=4);
    let mut e = vec![rng.gen_range(0.3..1.0)];
    for _ in 1..d {
        let last = *e.last().unwrap();
        e.push(last + rng.gen_range(0.15..1.0));
    }
    let r = (0..d).map(|_| rng.gen_range(1..=3)).collect();
    ModelData::new(e, r, rng.gen_range(0.01..0.2)).unwrap()
}

const CASES: [(usize, usize); 3] = [(0, 3), (0, 4), (1, 1)];

fn curve_correctness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (mut worst, mut slowest) = (0.0f64, 0.0f64);
    for _ in 0..20 {
        let md = random_model(&mut rng);
        let t = Instant::now();
        let cv = solve_curve(&md, 1e-13, 10).unwrap();
        slowest = slowest.max(t.elapsed().as_secs_f64());
        for k in 0..md.d {
            worst = worst.max((cv.r(&cv.eps[k]) - md.e[k]).norm());
            worst = worst.max((cv.rho[k] * cv.r_deriv(&cv.eps[k], 1) - md.r[k] as f64).norm());
        }
    }
    (worst < 1e-11 && slowest < 1.0, format!("max residual {worst:.2e}, slowest solve {slowest:.3} s"))
}

fn ansatz() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let cv = solve_curve(&random_model(&mut rng), 1e-13, 10).unwrap();
        let pd = PlanarData::new(&cv).unwrap();
        for _ in 0..20 {
            let z = c(rng.gen_range(-2.0..2.0), rng.gen_range(0.2..2.0));
            worst = worst.max(pd.ansatz_residual(z));
        }
    }
    (worst < 1e-8, format!("max residual {worst:.2e}"))
}

fn two_point_forms() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut sp, mut frak) = (0.0f64, 0.0f64);
    for cv in [curve(&[1.0], &[1], 0.125), curve(&[0.5, 1.2, 2.0], &[1, 2, 1], 0.2)] {
        let pd = PlanarData::new(&cv).unwrap();
        for _ in 0..50 {
            let mut p = || c(rng.gen_range(-2.0..2.0), rng.gen_range(0.2..2.0));
            let (z, w) = (p(), p());
            let a = pd.g0_two_point(z, w, G0Mode::Sum).unwrap();
            let b = pd.g0_two_point(z, w, G0Mode::Product).unwrap();
            sp = sp.max((a - b).norm() / b.norm());
        }
        for _ in 0..10 {
            let z = c(rng.gen_range(-2.0..2.0), rng.gen_range(0.2..2.0));
            frak = frak.max(rel(pd.frak_g0(z, FrakMode::Formula).unwrap(), pd.frak_g0(z, FrakMode::Residue).unwrap()));
        }
    }
    (sp < 1e-9 && frak < 1e-8, format!("sum/product {sp:.2e}, G0 formula/residue {frak:.2e}"))
}

fn galois() -> Outcome {
    let mut worst = 0.0f64;
    for cv in [curve(&[1.0], &[1], 0.125), curve(&[0.7, 1.5], &[1, 2], 0.2), curve(&[0.5, 1.0, 1.7], &[2, 1, 3], 0.4)] {
        let ram = RamificationData::compute(&cv).unwrap();
        for i in 0..ram.len() {
            for k in 1..=12 {
                let (r1, r2) = certify_galois(&cv, &ram, i, k).unwrap();
                worst = worst.max(r1).max(r2);
            }
        }
    }
    (worst < 1e-9, format!("max normalized residual {worst:.2e} through K = 12"))
}

fn route_agreement() -> Outcome {
    let (mut w3, mut w4, mut w11) = (0.0f64, 0.0f64, 0.0f64);
    for (n, ins) in [d1(), d2()].iter().enumerate() {
        let btr = BtrEngine::new(ins, PartitionConvention::Ordered);
        let wr = WRoute::new(ins);
        for s in 0..5 {
            let (us, z) = marked(ins, 100 * n as u64 + s, 3);
            let (ep, eh) = omega03_explicit(ins, us[0], us[1], BetaRange::All).unwrap().eval(z);
            let (bp, bh) = btr.omega(&us).unwrap().eval(z);
            let (wp, wh) = wr.form_at(&us, z).unwrap();
            for (a, b) in [(ep, bp), (eh, bh), (ep, wp), (eh, wh), (bp, wp), (bh, wh)] {
                w3 = w3.max(rel(a, b));
            }
            let (us, z) = marked(ins, 500 + 100 * n as u64 + s, 4);
            let (ep, eh) = omega04_explicit(ins, us[0], us[1], us[2], BetaRange::All).unwrap().eval(z);
            let (bp, bh) = btr.omega(&us).unwrap().eval(z);
            w4 = w4.max(rel(ep, bp)).max(rel(eh, bh));
            let (e, r) = (omega11_explicit(ins).unwrap(), om11_route(ins).unwrap());
            let ((ep, eh), (rp, rh)) = (e.eval(z), r.eval(z));
            w11 = w11.max(rel(ep, rp)).max(rel(eh, rh));
        }
    }
    (w3 < 1e-6 && w4 < 1e-6 && w11 < 1e-6, format!("omega03 {w3:.2e}, omega04 {w4:.2e}, omega11 {w11:.2e}"))
}

fn loop_equations() -> Outcome {
    let (mut lin, mut quad) = (0.0f64, 0.0f64);
    for ins in [d1(), d2()] {
        for (g, m) in CASES {
            let us = sample_points(&ins, 11, m - 1, 0.3);
            for i in 0..ins.ram.len() {
                for src in [Source::Explicit, Source::Engine] {
                    lin = lin.max(verify::check_linear_loop(&ins, src, g, i, &us, 16, 1e-5).unwrap().max_residual());
                    quad = quad.max(verify::check_quadratic_loop(&ins, src, g, i, &us, 16, 1e-5).unwrap().max_residual());
                }
            }
        }
    }
    (lin < 1e-5 && quad < 1e-5, format!("linear {lin:.2e}, quadratic {quad:.2e}"))
}

fn tr_formula() -> Outcome {
    let mut worst = 0.0f64;
    for ins in [d1(), d2()] {
        for (g, m) in CASES {
            let us = sample_points(&ins, 21, m - 1, 0.3);
            let zs = lower(&ins, 99, 10);
            worst = worst.max(verify::check_tr_formula(&ins, Source::Explicit, g, &us, &zs, 1e-6).unwrap().max_residual());
        }
    }
    (worst < 1e-6, format!("max residual {worst:.2e} at 10 z"))
}

fn symmetry() -> Outcome {
    let (mut low, mut five) = (0.0f64, 0.0f64);
    for ins in [d1(), d2()] {
        for m in [3, 4] {
            let pts = sample_points(&ins, 7, m, 0.3);
            for src in [Source::Explicit, Source::Engine] {
                low = low.max(verify::check_symmetry(&ins, src, 0, &pts, &verify::permutations(m), 1e-7).unwrap().max_residual());
            }
        }
        let pts = sample_points(&ins, 8, 5, 0.3);
        five = five.max(verify::check_symmetry(&ins, Source::Engine, 0, &pts, &verify::permutations(5), 1e-6).unwrap().max_residual());
    }
    (low < 1e-7 && five < 1e-6, format!("omega03/04 {low:.2e}, omega05 {five:.2e}"))
}

fn oracle() -> Outcome {
    let t = Instant::now();
    let m = ModelData::new(vec![1.0, 2.0, 3.0], vec![1, 1, 1], 0.1).unwrap();
    let diff = planar_dse_iterate(&m, 3).unwrap().max_diff(&closed_form_lambda_expand(&m, 3).unwrap());
    let mut slope = 0.0f64;
    let table = closed_form_lambda_expand(&m, 3).unwrap();
    for row in ratio_test(&m, &table, 0.02).unwrap() {
        for a in row {
            slope = slope.max((a - 4.0).abs());
        }
    }
    let secs = t.elapsed().as_secs_f64();
    (diff < 1e-9 && slope < 0.3 && secs < 10.0, format!("max coefficient diff {diff:.2e}, exponent off by {slope:.3}, {secs:.2} s"))
}

fn flip_and_nabla() -> Outcome {
    let mut flip = 0.0f64;
    for (n, ins) in [d1(), d2()].iter().enumerate() {
        for s in 0..5 {
            let (us, z) = marked(ins, 40 + 10 * n as u64 + s, 3);
            flip = flip.max(w3_flip_residual(ins, us[0], us[1], z).unwrap().norm());
        }
    }
    let ins = d1();
    let f = |q: &Series| q.sq().add_c(c(0.3, 0.1)).recip() + q.scale_re(0.5);
    let mut nab = 0.0f64;
    for z in [c(0.3, 0.8), c(-1.1, 0.4), c(0.9, -0.6)] {
        for n in [1, 2] {
            nab = nab.max(rel(nabla_residue(&ins.curve, n, &f, z).unwrap(), nabla(&ins.curve, n, &f, z).unwrap()));
        }
    }
    (flip < 1e-7 && nab < 1e-8, format!("flip {flip:.2e}, nabla {nab:.2e}"))
}

fn holomorphy() -> Outcome {
    let mut worst = 0.0f64;
    for ins in [d1(), d2()] {
        for n in [1, 2, 3] {
            let us = sample_points(&ins, 3, n, 0.3);
            worst = worst.max(verify::check_holomorphy(&ins, Source::Explicit, &us, 1e-7).unwrap().max_residual());
        }
    }
    (worst < 1e-7, format!("max negative-order coefficient {worst:.2e}"))
}

fn read_dir(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap())
        })
        .collect();
    files.sort();
    files
}

fn cli_pipeline() -> Outcome {
    let config = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs/reference.json");
    let tmp = tempfile::tempdir().unwrap();
    let mut codes = Vec::new();
    for run in ["a", "b"] {
        let status = Command::new(env!("CARGO_BIN_EXE_qkm"))
            .args(["run", "--config"])
            .arg(&config)
            .arg("--out")
            .arg(tmp.path().join(run))
            .output()
            .unwrap()
            .status;
        codes.push(status.code());
    }
    let (a, b) = (read_dir(&tmp.path().join("a")), read_dir(&tmp.path().join("b")));
    let same = !a.is_empty() && a == b;
    (codes == [Some(0), Some(0)] && same, format!("exit codes {codes:?}, {} artifacts, identical: {same}", a.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("curve correctness", curve_correctness),
        ("ansatz identity", ansatz),
        ("two-point sum/product and G0 modes", two_point_forms),
        ("Galois certification", galois),
        ("route agreement", route_agreement),
        ("loop equations", loop_equations),
        ("universal formula", tr_formula),
        ("symmetry", symmetry),
        ("planar oracle", oracle),
        ("flip identity and nabla", flip_and_nabla),
        ("holomorphy", holomorphy),
        ("CLI pipeline", cli_pipeline),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let (ok, detail) = f();
        failed += usize::from(!ok);
        println!("criterion {:>2} {}: {name}: {detail}", i + 1, if ok { "PASS" } else { "FAIL" });
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
