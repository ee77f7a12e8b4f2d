//! Structural checks on the computed differentials: loop equations at the
//! ramification points, the universal formula for the polar part,
//! symmetry, the P/H decomposition and holomorphy away from `β`.
//!
//! Every check returns a [`CheckReport`]; a report passes iff every
//! residual is below its tolerance.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::form::PolarForm;
use crate::io::{cxs, fingerprint, Cx};
use crate::planar::omega02_form;
use crate::series::{c, Scalar, Series, C64};
use crate::spectral_curve::DELTA_SEP;
use crate::trec::{
    om11_route, omega02_dse_series, omega02_parts, omega03_explicit, omega04_explicit, omega11_explicit, BetaRange, BtrEngine,
    FormValue, Instance, OmegaParts, PartitionConvention,
};

/// Which implementation supplies `ω_{g,m}` for the stable cases.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    /// Closed formulas for `(0,3)`, `(0,4)`, `(1,1)`.
    Explicit,
    /// Generic planar engine for `g = 0`; residue route for `(1,1)`.
    Engine,
}

/// Form coefficient of `ω_{g,|us|+1}(us, ·)`. `(0, m ≥ 5)` always comes from
/// the generic engine.
pub fn omega(inst: &Instance, src: Source, g: usize, us: &[C64]) -> Result<OmegaParts> {
    let engine = || BtrEngine::new(inst, PartitionConvention::Ordered).omega(us);
    match (g, us.len(), src) {
        (0, 0, _) => Err(Error::UnsupportedCase("omega_0,1 is not a polar form".into())),
        (0, 1, _) => Ok(omega02_parts(us[0])),
        (0, 2, Source::Explicit) => omega03_explicit(inst, us[0], us[1], BetaRange::All),
        (0, 3, Source::Explicit) => omega04_explicit(inst, us[0], us[1], us[2], BetaRange::All),
        (0, _, _) => engine(),
        (1, 0, Source::Explicit) => omega11_explicit(inst),
        (1, 0, Source::Engine) => om11_route(inst),
        (1, n, _) => Err(Error::UnsupportedCase(format!("genus 1 with {} points", n + 1))),
        (g, _, _) => Err(Error::UnsupportedGenus(g)),
    }
}

/// Normalized value `Ω⁽ᵍ⁾_m(points)`, last point is `z`.
pub fn omega_value(inst: &Instance, src: Source, g: usize, points: &[C64]) -> Result<FormValue> {
    let (z, us) = points.split_last().ok_or_else(|| Error::UnsupportedCase("no points".into()))?;
    let parts = omega(inst, src, g, us)?;
    let route = match src {
        Source::Explicit => "explicit",
        Source::Engine => "engine",
    };
    FormValue::from_parts(inst, g, us, *z, &parts, route)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckInstance {
    pub fingerprint: String,
    pub points: Vec<Cx>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub check_name: String,
    pub instance: CheckInstance,
    pub residuals: Vec<(String, f64)>,
    pub tolerance: f64,
    pub passed: bool,
    pub seed: Option<u64>,
}

impl CheckReport {
    pub fn new(name: &str, inst: &Instance, points: &[C64], residuals: Vec<(String, f64)>, tolerance: f64) -> Self {
        // NaN never passes
        let passed = residuals.iter().all(|(_, r)| *r < tolerance);
        CheckReport {
            check_name: name.into(),
            instance: CheckInstance { fingerprint: fingerprint(&inst.curve), points: cxs(points) },
            residuals,
            tolerance,
            passed,
            seed: None,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().map(|r| r.1).fold(0.0, f64::max)
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

/// Seeded marked points in the upper half plane, at distance at least
/// `sep` from each other's `±`, from `β_i`, `±ε_k`, `±α_j` and 0.
pub fn sample_points(inst: &Instance, seed: u64, count: usize, sep: f64) -> Vec<C64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut bad: Vec<C64> = inst.ram.beta.clone();
    for e in &inst.curve.eps {
        bad.extend([*e, -e]);
    }
    for a in &inst.pd.alpha {
        bad.extend([*a, -a]);
    }
    bad.push(c(0.0, 0.0));
    let mut out: Vec<C64> = vec![];
    while out.len() < count {
        let p = c(rng.gen_range(-1.8..1.8), rng.gen_range(0.3..1.6));
        let clear = bad.iter().all(|b| (p - b).norm() > sep) && out.iter().all(|u| (p - u).norm() > sep && (p + u).norm() > sep);
        if clear {
            out.push(p);
        }
    }
    out
}

/// `ω₀,₁` or a polar form, evaluated on local series.
enum Factor {
    Y,
    Form(PolarForm<C64>),
}

impl Factor {
    fn get(inst: &Instance, src: Source, g: usize, us: &[C64]) -> Result<Self> {
        if g == 0 && us.is_empty() {
            Ok(Factor::Y)
        } else {
            Ok(Factor::Form(omega(inst, src, g, us)?.total()))
        }
    }

    fn at(&self, inst: &Instance, x: &Series) -> Series {
        match self {
            Factor::Y => inst.curve.y(x) * inst.curve.r_deriv(x, 1),
            Factor::Form(f) => f.eval_in(x),
        }
    }
}

/// `q`, `σ_i(q)` and `σ_i'(q)` about `β_i`.
fn local(inst: &Instance, i: usize, trunc: i32, identity: bool) -> Result<(Series, Series, Series)> {
    if i >= inst.ram.len() {
        return Err(Error::UnsupportedCase(format!("no ramification point {i}")));
    }
    let q = Series::variable(inst.ram.beta[i], trunc);
    let s = if identity { q.clone() } else { inst.ram.galois_of(i, &q) };
    let ds = s.derivative();
    Ok((q, s, ds))
}

fn pick(us: &[C64], mask: usize) -> Vec<C64> {
    us.iter().enumerate().filter(|(j, _)| mask >> j & 1 == 1).map(|(_, &u)| u).collect()
}

/// Residuals `|S_n| / scale` for `n ≤ top`, where `S = Σ terms` is summed
/// coefficientwise (series addition would drop cancelled leading orders)
/// and the scale is the largest summand coefficient at the checked orders.
fn loop_residuals(terms: &[Series], top: i32) -> Result<Vec<(String, f64)>> {
    let lo = terms.iter().map(|t| t.ord_min()).min().unwrap_or(0);
    let mut scale: f64 = 0.0;
    let mut out = vec![];
    let mut sums = vec![];
    for n in lo..=top {
        let mut acc = c(0.0, 0.0);
        for t in terms {
            if n > t.trunc() {
                return Err(Error::TruncationInsufficient { trunc: t.trunc(), pole: -lo });
            }
            let x = t.coeff_or_zero(n);
            scale = scale.max(x.norm());
            acc += x;
        }
        sums.push((n, acc));
    }
    if scale == 0.0 {
        scale = 1.0;
    }
    for (n, acc) in sums {
        out.push((format!("order {n}"), acc.norm() / scale));
    }
    Ok(out)
}

fn check_stable(g: usize, m: usize) -> Result<()> {
    if 2 * g + m < 3 {
        return Err(Error::UnsupportedCase(format!("unstable ({g},{m})")));
    }
    Ok(())
}

/// `ω(…,z) + ω(…,σ_i(z)) = O(z−β_i) dz`, as a series of order `trunc`.
/// `identity` replaces `σ_i` by the identity (a negative control).
pub fn linear_loop_residuals(inst: &Instance, src: Source, g: usize, i: usize, us: &[C64], trunc: i32, identity: bool) -> Result<Vec<(String, f64)>> {
    check_stable(g, us.len() + 1)?;
    let (q, s, ds) = local(inst, i, trunc, identity)?;
    let f = Factor::get(inst, src, g, us)?;
    let a = f.at(inst, &q);
    let b = f.at(inst, &s) * ds;
    loop_residuals(&[a, b], 0)
}

pub fn check_linear_loop(inst: &Instance, src: Source, g: usize, i: usize, us: &[C64], trunc: i32, tol: f64) -> Result<CheckReport> {
    let res = linear_loop_residuals(inst, src, g, i, us, trunc, false)?;
    Ok(CheckReport::new(&format!("linear_loop_{g}_{}_beta{i}", us.len() + 1), inst, us, res, tol))
}

/// The summands of `Q^i_{g,m+1}` as series about `β_i`, with `σ_i' ` folded in.
fn quadratic_terms(inst: &Instance, src: Source, g: usize, i: usize, us: &[C64], trunc: i32) -> Result<Vec<Series>> {
    if g > 1 || (g == 1 && !us.is_empty()) {
        return Err(Error::UnsupportedCase(format!("quadratic loop for ({g},{})", us.len() + 1)));
    }
    let (q, s, ds) = local(inst, i, trunc, false)?;
    let mut terms = vec![];
    if g == 1 {
        terms.push(omega02_form(&q, &s) * ds.clone());
    }
    let n = us.len();
    for g1 in 0..=g {
        for mask in 0..(1usize << n) {
            let f1 = Factor::get(inst, src, g1, &pick(us, mask))?;
            let f2 = Factor::get(inst, src, g - g1, &pick(us, !mask))?;
            terms.push(f1.at(inst, &q) * f2.at(inst, &s) * ds.clone());
        }
    }
    Ok(terms)
}

pub fn check_quadratic_loop(inst: &Instance, src: Source, g: usize, i: usize, us: &[C64], trunc: i32, tol: f64) -> Result<CheckReport> {
    check_stable(g, us.len() + 1)?;
    let terms = quadratic_terms(inst, src, g, i, us, trunc)?;
    let res = loop_residuals(&terms, 1)?;
    Ok(CheckReport::new(&format!("quadratic_loop_{g}_{}_beta{i}", us.len() + 1), inst, us, res, tol))
}

/// Principal parts at every `β_i`, read off the expansion of the total form.
pub fn principal_parts(inst: &Instance, total: &PolarForm<C64>) -> Result<PolarForm<C64>> {
    let top = total.max_order() as i32;
    let mut out = PolarForm::new();
    for &b in &inst.ram.beta {
        let s = total.eval_in(&Series::variable(b, top + 2));
        let coeffs = (1..=top).map(|k| s.coeff(-k)).collect::<Result<Vec<_>>>()?;
        out.push(b, coeffs);
    }
    Ok(out)
}

/// The universal formula at `z`:
/// `Σ_i Res_{q→β_i} ½(1/(z−q) − 1/(z−σ_i(q))) / ((y(q)−y(σ_i(q)))R'(q)) · […]`.
pub fn toprec_value(inst: &Instance, src: Source, g: usize, us: &[C64], z: C64) -> Result<C64> {
    if g > 1 || (g == 1 && !us.is_empty()) {
        return Err(Error::UnsupportedCase(format!("universal formula for ({g},{})", us.len() + 1)));
    }
    let n = us.len();
    let trunc = 4 * n as i32 + 8;
    let mut lower = vec![];
    for g1 in 0..=g {
        for mask in 0..(1usize << n) {
            let g2 = g - g1;
            let (i1, i2) = (pick(us, mask), pick(us, !mask));
            if (g1 == 0 && i1.is_empty()) || (g2 == 0 && i2.is_empty()) {
                continue;
            }
            lower.push((Factor::get(inst, src, g1, &i1)?, Factor::get(inst, src, g2, &i2)?));
        }
    }
    let cv = &inst.curve;
    let mut acc = c(0.0, 0.0);
    for i in 0..inst.ram.len() {
        let (q, s, ds) = local(inst, i, trunc, false)?;
        let mut br = if g == 1 { omega02_form(&q, &s) } else { q.zero() };
        for (f1, f2) in &lower {
            br = br + f1.at(inst, &q) * f2.at(inst, &s);
        }
        let kernel = (q.sub_from_c(z).recip() - s.sub_from_c(z).recip()).scale_re(0.5);
        let den = (cv.y(&q) - cv.y(&s)) * cv.r_deriv(&q, 1);
        let w = kernel * br * ds / den;
        if !w.is_finite() {
            return Err(Error::NonFinite(format!("universal kernel at beta_{i}")));
        }
        acc += w.residue().map_err(|_| Error::TruncationInsufficient { trunc, pole: 2 * n as i32 + 2 })?;
    }
    Ok(acc)
}

/// Principal-part extraction against the universal formula (and against the
/// stored `P` part) at sample `z`, normalized by the largest extracted value.
pub fn check_tr_formula(inst: &Instance, src: Source, g: usize, us: &[C64], zs: &[C64], tol: f64) -> Result<CheckReport> {
    if g == 0 && us.len() < 2 {
        return Err(Error::UnsupportedCase(format!("(0,{}) is initial data", us.len() + 1)));
    }
    let parts = omega(inst, src, g, us)?;
    let extracted = principal_parts(inst, &parts.total())?;
    let mut rows = vec![];
    for &z in zs {
        inst.check_point(g, us, z)?;
        let a = extracted.eval(&z);
        rows.push((z, a, toprec_value(inst, src, g, us, z)?, parts.p.eval(&z)));
    }
    let scale = rows.iter().map(|r| r.1.norm()).fold(f64::MIN_POSITIVE, f64::max);
    let mut res = vec![];
    for (z, a, b, p) in rows {
        res.push((format!("toprec z={z}"), (a - b).norm() / scale));
        res.push((format!("P part z={z}"), (a - p).norm() / scale));
    }
    let mut pts = us.to_vec();
    pts.extend_from_slice(zs);
    Ok(CheckReport::new(&format!("tr_formula_{g}_{}", us.len() + 1), inst, &pts, res, tol))
}

/// All permutations of `0..n`.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = vec![];
    for p in permutations(n - 1) {
        for k in 0..n {
            let mut q = p.clone();
            q.insert(k, n - 1);
            out.push(q);
        }
    }
    out
}

/// `|Ω(π(points)) − Ω(points)| / max(1, |Ω(points)|)` over the permutations;
/// the last point is `z`, so permutations may exchange `z` with a `u_k`.
pub fn check_symmetry(inst: &Instance, src: Source, g: usize, points: &[C64], perms: &[Vec<usize>], tol: f64) -> Result<CheckReport> {
    let base = omega_value(inst, src, g, points)?.value;
    let scale = base.norm().max(1.0);
    let mut res = vec![];
    for p in perms {
        let moved: Vec<C64> = p.iter().map(|&k| points[k]).collect();
        let v = omega_value(inst, src, g, &moved)?.value;
        res.push((format!("perm {p:?}"), (v - base).norm() / scale));
    }
    Ok(CheckReport::new(&format!("symmetry_{g}_{}", points.len()), inst, points, res, tol))
}

/// `ω_total = ω_P + ω_H` at the sample `z`.
pub fn check_decomposition(inst: &Instance, src: Source, g: usize, us: &[C64], zs: &[C64], tol: f64) -> Result<CheckReport> {
    let parts = omega(inst, src, g, us)?;
    let total = parts.total();
    let mut res = vec![];
    for &z in zs {
        inst.check_point(g, us, z)?;
        let (p, h) = parts.eval(z);
        let t = total.eval(&z);
        res.push((format!("z={z}"), (t - p - h).norm() / t.norm().max(1.0)));
    }
    let mut pts = us.to_vec();
    pts.extend_from_slice(zs);
    Ok(CheckReport::new(&format!("decomposition_{g}_{}", us.len() + 1), inst, &pts, res, tol))
}

/// The points `±ε̂_k^j`, `±ε_k`, `±α_j` where `Ω⁽⁰⁾` must be regular.
pub fn holomorphy_centers(inst: &Instance) -> Vec<(String, C64)> {
    let mut out = vec![];
    for (k, row) in inst.pd.hat_eps.iter().enumerate() {
        for (j, h) in row.iter().enumerate() {
            out.push((format!("+hat_eps[{k}][{j}]"), *h));
            out.push((format!("-hat_eps[{k}][{j}]"), -h));
        }
    }
    for (k, e) in inst.curve.eps.iter().enumerate() {
        out.push((format!("+eps[{k}]"), *e));
        out.push((format!("-eps[{k}]"), -e));
    }
    for (j, a) in inst.pd.alpha.iter().enumerate() {
        out.push((format!("+alpha[{j}]"), *a));
        out.push((format!("-alpha[{j}]"), -a));
    }
    out
}

/// Laurent expansion of `Ω⁽⁰⁾_{m+1}(us; ·)` about `center`. For `m = 1` the
/// series comes from the closure relation of the two-point function, else
/// from the polar form.
pub fn omega_laurent(inst: &Instance, src: Source, us: &[C64], center: C64, trunc: i32) -> Result<Series> {
    if us.len() == 1 {
        return omega02_dse_series(inst, us[0], center, trunc);
    }
    let parts = omega(inst, src, 0, us)?;
    let q = Series::variable(center, trunc);
    let lam = inst.curve.lambda();
    let mut norm = c(lam.powi(us.len() as i32 - 1), 0.0);
    for u in us {
        norm /= inst.r1(*u);
    }
    let f = parts.total().eval_in(&q).scale(norm);
    Ok(f / inst.curve.r_deriv(&q, 1))
}

/// Negative-order coefficients of `Ω⁽⁰⁾_{m+1}(us; ·)` at every holomorphy
/// center, normalized by the largest coefficient of orders `0..=trunc`.
pub fn check_holomorphy(inst: &Instance, src: Source, us: &[C64], tol: f64) -> Result<CheckReport> {
    inst.check_marked(us)?;
    let trunc = 6;
    let mut res = vec![];
    for (label, z0) in holomorphy_centers(inst) {
        if us.iter().any(|u| (z0 - u).norm() < DELTA_SEP || (z0 + u).norm() < DELTA_SEP) {
            return Err(Error::NearSingularSet(format!("marked point at {label}")));
        }
        let s = omega_laurent(inst, src, us, z0, trunc)?.normalized(1e-300);
        let scale = (0..=trunc).map(|n| s.coeff_or_zero(n).norm()).fold(f64::MIN_POSITIVE, f64::max);
        let neg = (s.ord_min()..0).map(|n| s.coeff_or_zero(n).norm()).fold(0.0, f64::max);
        res.push((label, neg / scale));
    }
    Ok(CheckReport::new(&format!("holomorphy_0_{}", us.len() + 1), inst, us, res, tol))
}
