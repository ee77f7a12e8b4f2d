//! Configuration and pipeline orchestration.
//!
//! A run is computed entirely in memory as a sorted map of artifact names to
//! file contents, then written in one pass. Independent evaluations go through
//! rayon; `collect` keeps task and point order, so output bytes do not depend
//! on scheduling.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use qkm::io::{fingerprint, CurveRecord};
use qkm::oracle::{closed_form_lambda_expand, compare, comparison_csv, planar_dse_iterate, MAX_ORDER};
use qkm::series::{c, C64};
use qkm::spectral_curve::{certify_galois, solve_curve, AlphaPoints, ModelData, RamificationData, SpectralCurve};
use qkm::trec::Instance;
use qkm::verify::{self, CheckReport, Source};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Continuation steps used by `solve_curve`.
const SOLVE_STEPS: usize = 10;
/// Minimum separation of sampled points from each other and from singular points.
const SAMPLE_SEP: f64 = 0.3;
/// Number of evaluation points for the universal-formula check.
const TR_POINTS: usize = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid config: {0}")]
    ConfigInvalid(String),
    #[error("computation failed: {0}")]
    ComputationFailed(String),
    #[error("{failed} of {total} checks failed")]
    ChecksFailed { failed: usize, total: usize },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::ChecksFailed { .. } => 1,
            CliError::ConfigInvalid(_) => 2,
            CliError::ComputationFailed(_) => 3,
        }
    }
}

impl From<qkm::Error> for CliError {
    fn from(e: qkm::Error) -> Self {
        CliError::ComputationFailed(e.to_string())
    }
}

type Result<T> = std::result::Result<T, CliError>;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub e: Vec<f64>,
    pub r: Vec<u32>,
    pub lambda: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    pub tol_solve: f64,
    /// Validated and recorded; root polishing inside the engine uses its own
    /// fixed threshold.
    pub tol_root: f64,
    pub tol_check: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    All,
    Curve,
    Galois,
    Routes,
    LinearLoop,
    QuadraticLoop,
    TrFormula,
    Symmetry,
    Decomposition,
    Holomorphy,
}

const EVERY_CHECK: [CheckKind; 9] = [
    CheckKind::Curve,
    CheckKind::Galois,
    CheckKind::Routes,
    CheckKind::LinearLoop,
    CheckKind::QuadraticLoop,
    CheckKind::TrFormula,
    CheckKind::Symmetry,
    CheckKind::Decomposition,
    CheckKind::Holomorphy,
];

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Which {
    One(CheckKind),
    Many(Vec<CheckKind>),
}

impl Which {
    fn kinds(&self) -> Vec<CheckKind> {
        let listed = match self {
            Which::One(k) => vec![*k],
            Which::Many(ks) => ks.clone(),
        };
        if listed.contains(&CheckKind::All) {
            return EVERY_CHECK.to_vec();
        }
        // canonical order regardless of how the list was written
        EVERY_CHECK.iter().copied().filter(|k| listed.contains(k)).collect()
    }
}

fn default_source() -> Source {
    Source::Explicit
}

fn default_cases() -> Vec<(usize, usize)> {
    vec![(0, 3), (0, 4), (1, 1)]
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OmegaTask {
    pub g: usize,
    pub m: usize,
    /// Explicit evaluation tuples `[[re, im], ...]` of length `m`; the last
    /// entry of each tuple is `z`.
    #[serde(default)]
    pub points: Option<Vec<Vec<[f64; 2]>>>,
    /// Number of seeded tuples to draw instead.
    #[serde(default)]
    pub sample: Option<usize>,
    #[serde(default = "default_source")]
    pub source: Source,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyTask {
    pub which: Which,
    #[serde(default = "default_cases")]
    pub cases: Vec<(usize, usize)>,
    #[serde(default = "default_source")]
    pub source: Source,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleTask {
    #[serde(rename = "L")]
    pub order: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    Curve,
    Omega(OmegaTask),
    Verify(VerifyTask),
    Oracle(OracleTask),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stage {
    Curve,
    Omega,
    Verify,
    Oracle,
}

impl Task {
    fn stage(&self) -> Stage {
        match self {
            Task::Curve => Stage::Curve,
            Task::Omega(_) => Stage::Omega,
            Task::Verify(_) => Stage::Verify,
            Task::Oracle(_) => Stage::Oracle,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelConfig,
    pub trunc: i32,
    pub tolerances: Tolerances,
    pub seed: u64,
    pub tasks: Vec<Task>,
    pub output_dir: PathBuf,
}

impl RunConfig {
    pub fn from_json(s: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(s).map_err(|e| CliError::ConfigInvalid(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let s = std::fs::read_to_string(path).map_err(|e| CliError::ConfigInvalid(format!("{}: {e}", path.display())))?;
        Self::from_json(&s)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(CliError::ConfigInvalid(msg));
        let l = self.model.lambda;
        if !(l.is_finite() && l >= 0.0) {
            return bad(format!("model.lambda must be finite and >= 0, got {l}"));
        }
        let t = &self.tolerances;
        for (name, v) in [("tol_solve", t.tol_solve), ("tol_root", t.tol_root), ("tol_check", t.tol_check)] {
            if !(v.is_finite() && v > 0.0) {
                return bad(format!("tolerances.{name} must be > 0, got {v}"));
            }
        }
        if self.trunc < 2 {
            return bad(format!("trunc must be >= 2, got {}", self.trunc));
        }
        self.model_data()?;
        for (i, task) in self.tasks.iter().enumerate() {
            match task {
                Task::Omega(o) => {
                    if o.m == 0 {
                        return bad(format!("tasks[{i}]: m must be >= 1"));
                    }
                    match (&o.points, o.sample) {
                        (Some(_), Some(_)) | (None, None) => return bad(format!("tasks[{i}]: give exactly one of points, sample")),
                        (Some(ps), None) if ps.iter().any(|p| p.len() != o.m) => {
                            return bad(format!("tasks[{i}]: every point tuple must have m = {} entries", o.m))
                        }
                        _ => {}
                    }
                }
                Task::Verify(v) => {
                    if v.which.kinds().is_empty() {
                        return bad(format!("tasks[{i}]: which selects no checks"));
                    }
                    if let Some(&(g, m)) = v.cases.iter().find(|&&(g, m)| 2 * g + m < 3 || g > 1) {
                        return bad(format!("tasks[{i}]: case ({g},{m}) is not a supported stable case"));
                    }
                }
                Task::Oracle(o) if o.order > MAX_ORDER => return bad(format!("tasks[{i}]: L must be <= {MAX_ORDER}, got {}", o.order)),
                _ => {}
            }
        }
        Ok(())
    }

    pub fn model_data(&self) -> Result<ModelData> {
        let m = &self.model;
        let md = if m.lambda == 0.0 { ModelData::decoupled(m.e.clone(), m.r.clone()) } else { ModelData::new(m.e.clone(), m.r.clone(), m.lambda) };
        md.map_err(|e| CliError::ConfigInvalid(format!("model: {e}")))
    }
}

/// Result of a pipeline run: artifact files by name plus check tallies.
#[derive(Clone, Debug, Default)]
pub struct Outcome {
    pub artifacts: BTreeMap<String, String>,
    pub checks_total: usize,
    pub checks_failed: usize,
}

impl Outcome {
    pub fn write(&self, dir: &Path) -> Result<()> {
        let io = |e: std::io::Error| CliError::ComputationFailed(format!("{}: {e}", dir.display()));
        std::fs::create_dir_all(dir).map_err(io)?;
        for (name, body) in &self.artifacts {
            std::fs::write(dir.join(name), body).map_err(io)?;
        }
        Ok(())
    }

    /// Final status: `ChecksFailed` if any check failed.
    pub fn status(&self) -> Result<()> {
        if self.checks_failed > 0 {
            return Err(CliError::ChecksFailed { failed: self.checks_failed, total: self.checks_total });
        }
        Ok(())
    }
}

#[derive(Serialize)]
struct Summary<'a> {
    fingerprint: &'a str,
    tasks: usize,
    forms: usize,
    checks_total: usize,
    checks_passed: usize,
    failed_checks: Vec<String>,
    oracle: Vec<OracleSummary>,
}

#[derive(Serialize)]
struct OracleSummary {
    task: usize,
    #[serde(rename = "L")]
    order: usize,
    file: String,
    max_abs_diff: f64,
}

/// Canonical curve record; ramification and fixed points are added when the
/// curve supports them (not at `λ = 0`).
pub fn curve_record(curve: &SpectralCurve) -> CurveRecord {
    if curve.model.lambda == 0.0 {
        return CurveRecord::new(curve, None, None);
    }
    let ram = RamificationData::compute(curve).ok();
    let alpha = AlphaPoints::compute(curve).ok();
    CurveRecord::new(curve, ram.as_ref(), alpha.as_ref())
}

pub fn load_curve(path: &Path) -> Result<SpectralCurve> {
    let s = std::fs::read_to_string(path).map_err(|e| CliError::ConfigInvalid(format!("{}: {e}", path.display())))?;
    let rec = CurveRecord::from_json(&s).map_err(|e| CliError::ConfigInvalid(e.to_string()))?;
    rec.to_curve().map_err(|e| CliError::ConfigInvalid(e.to_string()))
}

fn derived_seed(seed: u64, task: usize, sub: usize) -> u64 {
    seed.wrapping_add((task as u64) << 32).wrapping_add(sub as u64)
}

fn to_c(p: &[f64; 2]) -> C64 {
    c(p[0], p[1])
}

/// Runs the tasks of `cfg`, restricted to `only` if given. The curve is
/// taken from `stored` when provided and solved from the model otherwise.
pub fn run(cfg: &RunConfig, only: Option<Stage>, stored: Option<SpectralCurve>, verbose: bool) -> Result<Outcome> {
    let log = |msg: String| {
        if verbose {
            eprintln!("{msg}");
        }
    };
    let curve = match stored {
        Some(c) => c,
        None => {
            let md = cfg.model_data()?;
            log(format!("solving curve d={} lambda={}", md.d, md.lambda));
            solve_curve(&md, cfg.tolerances.tol_solve, SOLVE_STEPS)?
        }
    };
    let fp = fingerprint(&curve);
    let mut out = Outcome::default();
    out.artifacts.insert("curve.json".into(), curve_record(&curve).to_json() + "\n");

    let selected: Vec<(usize, &Task)> =
        cfg.tasks.iter().enumerate().filter(|(_, t)| only.map_or(true, |s| t.stage() == s)).collect();
    let needs_instance = selected.iter().any(|(_, t)| matches!(t, Task::Omega(_) | Task::Verify(_)));
    let inst = if needs_instance { Some(Instance::new(&curve)?) } else { None };

    let mut forms = Vec::new();
    let mut reports = Vec::new();
    let mut oracle = Vec::new();
    for &(idx, task) in &selected {
        match task {
            Task::Curve => {}
            Task::Omega(o) => {
                let inst = inst.as_ref().expect("instance built for omega tasks");
                log(format!("task {idx}: omega ({},{})", o.g, o.m));
                forms.extend(omega_task(inst, cfg, idx, o)?.into_iter().map(|v| serde_json::to_string(&v.record(&fp)).expect("record serializes")));
            }
            Task::Verify(v) => {
                let inst = inst.as_ref().expect("instance built for verify tasks");
                log(format!("task {idx}: verify {:?}", v.which.kinds()));
                reports.extend(verify_task(inst, cfg, idx, v)?);
            }
            Task::Oracle(o) => {
                log(format!("task {idx}: oracle L={}", o.order));
                let rows = compare(&planar_dse_iterate(&curve.model, o.order)?, &closed_form_lambda_expand(&curve.model, o.order)?);
                let file = format!("oracle_{idx}.csv");
                let max_abs_diff = rows.iter().map(|r| (r.dse - r.closed).abs()).fold(0.0, f64::max);
                out.artifacts.insert(file.clone(), comparison_csv(&rows));
                oracle.push(OracleSummary { task: idx, order: o.order, file, max_abs_diff });
            }
        }
    }

    if !forms.is_empty() {
        out.artifacts.insert("omega.jsonl".into(), forms.iter().map(|l| format!("{l}\n")).collect());
    }
    if !reports.is_empty() {
        out.artifacts.insert("checks.jsonl".into(), reports.iter().map(|r| r.to_json_line() + "\n").collect());
    }
    out.checks_total = reports.len();
    let failed: Vec<String> = reports.iter().filter(|r| !r.passed).map(|r| r.check_name.clone()).collect();
    out.checks_failed = failed.len();
    for r in reports.iter().filter(|r| !r.passed) {
        log(format!("FAILED {} max residual {:.3e}", r.check_name, r.max_residual()));
    }
    let summary = Summary {
        fingerprint: &fp,
        tasks: selected.len(),
        forms: forms.len(),
        checks_total: out.checks_total,
        checks_passed: out.checks_total - out.checks_failed,
        failed_checks: failed,
        oracle,
    };
    out.artifacts.insert("summary.json".into(), serde_json::to_string_pretty(&summary).expect("summary serializes") + "\n");
    Ok(out)
}

fn omega_task(inst: &Instance, cfg: &RunConfig, idx: usize, o: &OmegaTask) -> Result<Vec<qkm::trec::FormValue>> {
    let tuples: Vec<Vec<C64>> = match (&o.points, o.sample) {
        (Some(ps), _) => ps.iter().map(|t| t.iter().map(to_c).collect()).collect(),
        (None, Some(n)) => (0..n).map(|j| verify::sample_points(inst, derived_seed(cfg.seed, idx, j), o.m, SAMPLE_SEP)).collect(),
        (None, None) => unreachable!("validated"),
    };
    let vals: Vec<_> = tuples.par_iter().map(|pts| verify::omega_value(inst, o.source, o.g, pts)).collect();
    Ok(vals.into_iter().collect::<qkm::Result<Vec<_>>>()?)
}

/// One unit of verification work.
#[derive(Clone, Debug)]
enum Job {
    Curve,
    Galois(usize),
    Routes { g: usize, pts: Vec<C64>, seed: u64 },
    Linear { g: usize, i: usize, us: Vec<C64>, seed: u64 },
    Quadratic { g: usize, i: usize, us: Vec<C64>, seed: u64 },
    Tr { g: usize, us: Vec<C64>, zs: Vec<C64>, seed: u64 },
    Symmetry { pts: Vec<C64>, seed: u64 },
    Decomposition { g: usize, us: Vec<C64>, zs: Vec<C64>, seed: u64 },
    Holomorphy { us: Vec<C64>, seed: u64 },
}

fn verify_jobs(inst: &Instance, cfg: &RunConfig, idx: usize, v: &VerifyTask) -> Vec<Job> {
    let mut jobs = Vec::new();
    for kind in v.which.kinds() {
        match kind {
            CheckKind::Curve => jobs.push(Job::Curve),
            CheckKind::Galois => jobs.extend((0..inst.ram.len()).map(Job::Galois)),
            _ => {}
        }
        for (ci, &(g, m)) in v.cases.iter().enumerate() {
            let seed = derived_seed(cfg.seed, idx, ci);
            let us = verify::sample_points(inst, seed, m - 1, SAMPLE_SEP);
            let zs_seed = derived_seed(cfg.seed, idx, ci + 1000);
            // lower half plane keeps z away from the marked points and their negatives
            let zs: Vec<C64> = verify::sample_points(inst, zs_seed, TR_POINTS, SAMPLE_SEP).into_iter().map(|z| c(z.re, -z.im)).collect();
            match kind {
                CheckKind::Routes => {
                    let pts = verify::sample_points(inst, seed, m, SAMPLE_SEP);
                    jobs.push(Job::Routes { g, pts, seed });
                }
                CheckKind::LinearLoop => {
                    jobs.extend((0..inst.ram.len()).map(|i| Job::Linear { g, i, us: us.clone(), seed }));
                }
                CheckKind::QuadraticLoop => {
                    jobs.extend((0..inst.ram.len()).map(|i| Job::Quadratic { g, i, us: us.clone(), seed }));
                }
                CheckKind::TrFormula => jobs.push(Job::Tr { g, us: us.clone(), zs, seed: zs_seed }),
                CheckKind::Symmetry if g == 0 => {
                    jobs.push(Job::Symmetry { pts: verify::sample_points(inst, seed, m, SAMPLE_SEP), seed });
                }
                CheckKind::Decomposition => jobs.push(Job::Decomposition { g, us: us.clone(), zs, seed: zs_seed }),
                CheckKind::Holomorphy if g == 0 => jobs.push(Job::Holomorphy { us: us.clone(), seed }),
                _ => {}
            }
        }
    }
    jobs
}

fn run_job(inst: &Instance, cfg: &RunConfig, src: Source, job: &Job) -> qkm::Result<CheckReport> {
    let tol = cfg.tolerances.tol_check;
    let k = cfg.trunc;
    Ok(match job {
        Job::Curve => {
            let cv = &inst.curve;
            let mut res = Vec::new();
            for j in 0..cv.d() {
                res.push((format!("R(eps_{j}) - e_{j}"), (cv.r(&cv.eps[j]) - cv.model.e[j]).norm()));
                res.push((format!("rho_{j} R'(eps_{j}) - r_{j}"), (cv.rho[j] * cv.r_deriv(&cv.eps[j], 1) - cv.model.r[j] as f64).norm()));
            }
            CheckReport::new("curve", inst, &[], res, tol)
        }
        Job::Galois(i) => {
            let (r1, r2) = certify_galois(&inst.curve, &inst.ram, *i, k as usize)?;
            let res = vec![("R(sigma(q)) - R(q)".into(), r1), ("sigma(sigma(q)) - q".into(), r2)];
            CheckReport::new(&format!("galois_{i}"), inst, &[inst.ram.beta[*i]], res, tol)
        }
        Job::Routes { g, pts, seed } => {
            let a = verify::omega_value(inst, Source::Explicit, *g, pts)?.value;
            let b = verify::omega_value(inst, Source::Engine, *g, pts)?.value;
            let res = vec![("explicit vs engine".into(), (a - b).norm() / a.norm().max(1.0))];
            CheckReport::new(&format!("routes_{g}_{}", pts.len()), inst, pts, res, tol).with_seed(*seed)
        }
        Job::Linear { g, i, us, seed } => verify::check_linear_loop(inst, src, *g, *i, us, k, tol)?.with_seed(*seed),
        Job::Quadratic { g, i, us, seed } => verify::check_quadratic_loop(inst, src, *g, *i, us, k, tol)?.with_seed(*seed),
        Job::Tr { g, us, zs, seed } => verify::check_tr_formula(inst, src, *g, us, zs, tol)?.with_seed(*seed),
        Job::Symmetry { pts, seed } => verify::check_symmetry(inst, src, 0, pts, &verify::permutations(pts.len()), tol)?.with_seed(*seed),
        Job::Decomposition { g, us, zs, seed } => verify::check_decomposition(inst, src, *g, us, zs, tol)?.with_seed(*seed),
        Job::Holomorphy { us, seed } => verify::check_holomorphy(inst, src, us, tol)?.with_seed(*seed),
    })
}

fn verify_task(inst: &Instance, cfg: &RunConfig, idx: usize, v: &VerifyTask) -> Result<Vec<CheckReport>> {
    let jobs = verify_jobs(inst, cfg, idx, v);
    let reports: Vec<_> = jobs.par_iter().map(|j| run_job(inst, cfg, v.source, j)).collect();
    Ok(reports.into_iter().collect::<qkm::Result<Vec<_>>>()?)
}
