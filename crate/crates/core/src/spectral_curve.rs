//! The rational covering `R(z) = z − (λ/N) Σ_k ϱ_k/(ε_k + z)` determined by
//! `R(ε_k) = e_k`, `ϱ_k R'(ε_k) = r_k`, together with its ramification
//! points, fixed points of `z ↦ −z` on fibres, local Galois involutions and
//! the recursion kernel.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{cmp_re_im, polish, Poly};
use crate::series::{c, re, LaurentSeries, Scalar, Series, C64};

pub const DELTA_SEP: f64 = 1e-6;
pub const TOL_ROOT: f64 = 1e-11;
pub const TOL_SIMPLE: f64 = 1e-8;
/// Order through which Galois coefficients and local ratios are stored.
pub const GALOIS_ORDER: usize = 24;

/// Input spectrum, multiplicities, size and coupling.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelData {
    pub d: usize,
    pub e: Vec<f64>,
    pub r: Vec<u32>,
    #[serde(rename = "N")]
    pub n: u32,
    pub lambda: f64,
}

impl ModelData {
    /// Validates and sorts the spectrum.
    pub fn new(e: Vec<f64>, r: Vec<u32>, lambda: f64) -> Result<Self> {
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(Error::InvalidModel(format!("lambda must be > 0, got {lambda}")));
        }
        Self::build(e, r, lambda)
    }

    /// The decoupled model at `λ = 0`, where `R` is the identity. Outside
    /// the validated regime; used as the start of continuation and in tests.
    pub fn decoupled(e: Vec<f64>, r: Vec<u32>) -> Result<Self> {
        Self::build(e, r, 0.0)
    }

    fn build(e: Vec<f64>, r: Vec<u32>, lambda: f64) -> Result<Self> {
        if e.is_empty() || e.len() != r.len() {
            return Err(Error::InvalidModel("e and r must be nonempty and of equal length".into()));
        }
        if e.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
            return Err(Error::InvalidModel("eigenvalues e_k must be positive".into()));
        }
        if r.iter().any(|&m| m == 0) {
            return Err(Error::InvalidModel("multiplicities r_k must be >= 1".into()));
        }
        let mut pairs: Vec<(f64, u32)> = e.into_iter().zip(r).collect();
        pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        if pairs.windows(2).any(|w| w[1].0 - w[0].0 <= 0.0) {
            return Err(Error::InvalidModel("eigenvalues e_k must be distinct".into()));
        }
        let n = pairs.iter().map(|p| p.1).sum();
        Ok(ModelData { d: pairs.len(), e: pairs.iter().map(|p| p.0).collect(), r: pairs.iter().map(|p| p.1).collect(), n, lambda })
    }

    /// `e_k` as a complex number.
    pub fn e_c(&self, k: usize) -> C64 {
        re(self.e[k])
    }

    /// Re-checks a deserialized model.
    pub fn validate(&self) -> Result<()> {
        let m = ModelData::new(self.e.clone(), self.r.clone(), self.lambda)?;
        if m.d != self.d || m.n != self.n {
            return Err(Error::InvalidModel(format!("d = {} and N = {} inconsistent with e and r", self.d, self.n)));
        }
        if m != *self {
            return Err(Error::InvalidModel("e must be strictly increasing".into()));
        }
        Ok(())
    }
}

/// Solved curve parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralCurve {
    pub model: ModelData,
    pub eps: Vec<C64>,
    pub rho: Vec<C64>,
}

fn real_system(m: &ModelData, lambda: f64, x: &DVector<f64>) -> (DVector<f64>, DMatrix<f64>) {
    let d = m.d;
    let ln = lambda / m.n as f64;
    let (eps, rho) = (x.rows(0, d), x.rows(d, d));
    let mut f = DVector::zeros(2 * d);
    let mut jac = DMatrix::zeros(2 * d, 2 * d);
    for k in 0..d {
        let s1: f64 = (0..d).map(|j| rho[j] / (eps[j] + eps[k])).sum();
        let s2: f64 = (0..d).map(|j| rho[j] / (eps[j] + eps[k]).powi(2)).sum();
        let s3: f64 = (0..d).map(|j| rho[j] / (eps[j] + eps[k]).powi(3)).sum();
        f[k] = eps[k] - ln * s1 - m.e[k];
        f[d + k] = rho[k] * (1.0 + ln * s2) - m.r[k] as f64;
        for mm in 0..d {
            let a = eps[mm] + eps[k];
            let delta = if mm == k { 1.0 } else { 0.0 };
            jac[(k, mm)] = delta + ln * (rho[mm] / (a * a) + delta * s2);
            jac[(k, d + mm)] = -ln / a;
            let ds_de = -2.0 * rho[mm] / a.powi(3) - 2.0 * delta * s3;
            jac[(d + k, mm)] = rho[k] * ln * ds_de;
            jac[(d + k, d + mm)] = delta * (1.0 + ln * s2) + rho[k] * ln / (a * a);
        }
    }
    (f, jac)
}

fn newton(m: &ModelData, lambda: f64, mut x: DVector<f64>, tol: f64, iters: usize) -> Option<(DVector<f64>, f64)> {
    let mut res = f64::INFINITY;
    for _ in 0..iters {
        let (f, jac) = real_system(m, lambda, &x);
        res = f.amax();
        let step = jac.lu().solve(&f)?;
        x -= &step;
        if !x.iter().all(|v| v.is_finite()) {
            return None;
        }
        if step.amax() < 1e-15 * (1.0 + x.amax()) {
            break;
        }
    }
    let (f, _) = real_system(m, lambda, &x);
    res = res.min(f.amax());
    if res < tol {
        Some((x, f.amax()))
    } else {
        None
    }
}

/// Solves for `(ε, ϱ)` by continuation in `λ` from `(e, r)` at `λ = 0`.
pub fn solve_curve(model: &ModelData, tol_solve: f64, steps: usize) -> Result<SpectralCurve> {
    let d = model.d;
    let mut x = DVector::from_iterator(2 * d, model.e.iter().copied().chain(model.r.iter().map(|&v| v as f64)));
    let mut prev: Option<(f64, DVector<f64>)> = None;
    let mut s = 0.0;
    let mut h = 1.0 / steps.max(1) as f64;
    while s < 1.0 {
        let s_next = (s + h).min(1.0);
        let guess = match &prev {
            Some((sp, xp)) if s > *sp => &x + (&x - xp) * ((s_next - s) / (s - sp)),
            _ => x.clone(),
        };
        match newton(model, s_next * model.lambda, guess, tol_solve.max(1e-14) * 1e-2, 40) {
            Some((xn, _)) => {
                prev = Some((s, x));
                x = xn;
                s = s_next;
                h = (h * 1.5).min(0.25);
            }
            None => {
                h *= 0.5;
                if h < 1e-9 {
                    let (f, _) = real_system(model, s_next * model.lambda, &x);
                    return Err(Error::ContinuationDiverged { lambda: s_next * model.lambda, residual: f.amax() });
                }
            }
        }
    }
    let (x, res) = newton(model, model.lambda, x, tol_solve, 8)
        .ok_or(Error::ContinuationDiverged { lambda: model.lambda, residual: f64::NAN })?;
    if res >= tol_solve {
        return Err(Error::ContinuationDiverged { lambda: model.lambda, residual: res });
    }
    let eps: Vec<C64> = (0..d).map(|k| re(x[k])).collect();
    let rho: Vec<C64> = (0..d).map(|k| re(x[d + k])).collect();
    for i in 0..d {
        for j in i + 1..d {
            if (eps[i] - eps[j]).norm() < DELTA_SEP {
                return Err(Error::DegenerateSpectrum(i, j));
            }
        }
    }
    Ok(SpectralCurve { model: model.clone(), eps, rho })
}

impl SpectralCurve {
    pub fn d(&self) -> usize {
        self.model.d
    }

    pub fn lambda(&self) -> f64 {
        self.model.lambda
    }

    /// `λ/N`
    pub fn ln(&self) -> f64 {
        self.model.lambda / self.model.n as f64
    }

    /// `R(z)` for any scalar type.
    pub fn r<S: Scalar>(&self, z: &S) -> S {
        let mut acc = z.clone();
        for k in 0..self.d() {
            acc = acc - (z.add_c(self.eps[k])).recip().scale(self.rho[k] * self.ln());
        }
        acc
    }

    /// `R^{(n)}(z)` for any scalar type, by term-wise differentiation.
    pub fn r_deriv<S: Scalar>(&self, z: &S, n: usize) -> S {
        if n == 0 {
            return self.r(z);
        }
        let fact: f64 = (1..=n).map(|k| k as f64).product();
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        let mut acc = if n == 1 { z.one() } else { z.zero() };
        for k in 0..self.d() {
            let term = z.add_c(self.eps[k]).powi(-(n as i32 + 1)).scale(self.rho[k] * (self.ln() * sign * fact));
            acc = acc - term;
        }
        acc
    }

    /// `y(z) = −R(−z)`.
    pub fn y<S: Scalar>(&self, z: &S) -> S {
        -self.r(&-z.clone())
    }

    /// Checked numeric evaluation of `R^{(n)}(z)`.
    pub fn eval_r(&self, z: C64, n: usize) -> Result<C64> {
        if self.eps.iter().any(|e| (z + e).norm() < DELTA_SEP) {
            return Err(Error::PoleOfR(format!("{z}")));
        }
        Ok(self.r_deriv(&z, n))
    }

    /// Numerator polynomial of `R(v) − x` after clearing denominators.
    fn fibre_poly(&self, x: C64) -> Poly {
        let d = self.d();
        let mut p = Poly::linear(-x).mul(&Poly::from_shifts(self.eps.iter().copied()));
        for k in 0..d {
            let others = Poly::from_shifts((0..d).filter(|&j| j != k).map(|j| self.eps[j]));
            p = p.add(&others.scale(-self.rho[k] * self.ln()));
        }
        p
    }

    /// All `d + 1` solutions of `R(v) = x`, polished, unordered.
    pub fn fibre(&self, x: C64) -> Result<Vec<C64>> {
        if self.ln() == 0.0 {
            // Degree-one covering: the other preimages sit at their λ → 0 limits −ε_k.
            return Ok(std::iter::once(x).chain(self.eps.iter().map(|e| -e)).collect());
        }
        let roots = self.fibre_poly(x).roots()?;
        Ok(roots
            .into_iter()
            .map(|v| polish(v, |t| self.r(&t) - x, |t| self.r_deriv(&t, 1), 1e-13))
            .collect())
    }

    /// `[z, ẑ¹, …, ẑ^d]`: `z` first, the others sorted.
    pub fn preimages(&self, z: C64) -> Result<Vec<C64>> {
        if self.eps.iter().any(|e| (z + e).norm() < DELTA_SEP) {
            return Err(Error::PoleOfR(format!("{z}")));
        }
        let x = self.r(&z);
        let mut roots = self.fibre(x)?;
        let idx = (0..roots.len())
            .min_by(|&a, &b| (roots[a] - z).norm().partial_cmp(&(roots[b] - z).norm()).unwrap())
            .unwrap();
        roots.remove(idx);
        roots.sort_by(cmp_re_im);
        let mut all = vec![z];
        all.extend(roots);
        for i in 0..all.len() {
            for j in i + 1..all.len() {
                if (all[i] - all[j]).norm() < DELTA_SEP {
                    return Err(Error::NearRamification(format!("{z}")));
                }
            }
        }
        Ok(all)
    }

    /// The `d` other preimages of a symbolic point, lifted from the numeric
    /// ones by Newton iteration in the scalar type.
    pub fn other_preimages<S: Scalar>(&self, z: &S) -> Result<Vec<S>> {
        if self.ln() == 0.0 {
            return Ok(self.eps.iter().map(|e| z.cst(-e)).collect());
        }
        let z0 = z.value();
        let numeric = self.preimages(z0)?;
        let target = self.r(z);
        Ok(numeric[1..].iter().map(|&v0| self.lift_root(z.cst(v0), &target)).collect())
    }

    /// Newton lifting of a numeric root of `R(v) = target` to the full scalar type.
    pub fn lift_root<S: Scalar>(&self, mut v: S, target: &S) -> S {
        for _ in 0..8 {
            let step = (self.r(&v) - target.clone()) / self.r_deriv(&v, 1);
            v = v - step;
        }
        v
    }

    /// Stable identifier: SHA-256 of the curve's defining JSON.
    pub fn fingerprint(&self) -> String {
        crate::io::fingerprint(self)
    }

    /// Taylor series of `R` about `center` through order `trunc`.
    pub fn taylor_r(&self, center: C64, trunc: i32) -> Series {
        let mut fact = 1.0;
        let coeffs = (0..=trunc.max(0) as usize)
            .map(|n| {
                if n > 0 {
                    fact *= n as f64;
                }
                self.r_deriv(&center, n) / fact
            })
            .collect();
        Series::from_coeffs(center, 0, coeffs, trunc)
    }
}

/// Ramification points and their local data.
#[derive(Clone, Debug)]
pub struct RamificationData {
    pub beta: Vec<C64>,
    /// `galois[i][n] = c_{n,i}`
    pub galois: Vec<Vec<C64>>,
    /// `xratios[i][n] = x_{n,i}`
    pub xratios: Vec<Vec<C64>>,
    /// `yratios[i][n] = y_{n,i}`
    pub yratios: Vec<Vec<C64>>,
}

fn bell_table(a: &[C64], nmax: usize) -> Vec<Vec<C64>> {
    // a[j] holds x_j (1-based); B_{n,k} by the standard recurrence.
    let zero = c(0.0, 0.0);
    let mut b = vec![vec![zero; nmax + 1]; nmax + 1];
    b[0][0] = c(1.0, 0.0);
    let mut binom = vec![vec![0.0f64; nmax + 1]; nmax + 1];
    for n in 0..=nmax {
        binom[n][0] = 1.0;
        for k in 1..=n {
            binom[n][k] = binom[n - 1][k - 1] + if k < n { binom[n - 1][k] } else { 0.0 };
        }
    }
    for n in 1..=nmax {
        for k in 1..=n {
            let mut acc = zero;
            for i in 1..=(n - k + 1) {
                if i < a.len() {
                    acc += a[i] * b[n - i][k - 1] * binom[n - 1][i - 1];
                }
            }
            b[n][k] = acc;
        }
    }
    b
}

/// Coefficients `c_0..c_{order-1}` of the local involution from the ratios `x_n`.
pub fn galois_coefficients(x: &[C64], order: usize) -> Vec<C64> {
    let fact = |n: usize| (1..=n).map(|k| k as f64).product::<f64>();
    let mut cs = vec![c(-1.0, 0.0)];
    for n in 1..order {
        // a_j = j! c_{j-1}; unknown entries are never read for k >= 3.
        let mut a = vec![c(0.0, 0.0); n + 3];
        for j in 1..=n {
            a[j] = cs[j - 1] * fact(j);
        }
        let b = bell_table(&a, n + 2);
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        let mut val = x[n] * ((sign - 1.0) / fact(n + 2));
        for k in 1..n {
            val += cs[k] * cs[n - k] * 0.5;
        }
        let mut tail = c(0.0, 0.0);
        for k in 3..=n + 1 {
            tail += x[k - 2] * b[n + 2][k];
        }
        val += tail / fact(n + 2);
        cs.push(val);
    }
    cs
}

impl RamificationData {
    pub fn compute(curve: &SpectralCurve) -> Result<Self> {
        let d = curve.d();
        let ln = curve.ln();
        let mut p = Poly::from_shifts(curve.eps.iter().flat_map(|&e| [e, e]));
        for k in 0..d {
            let others = Poly::from_shifts((0..d).filter(|&j| j != k).flat_map(|j| [curve.eps[j], curve.eps[j]]));
            p = p.add(&others.scale(curve.rho[k] * ln));
        }
        let mut beta: Vec<C64> = p
            .roots()?
            .into_iter()
            .map(|b| polish(b, |t| curve.r_deriv(&t, 1), |t| curve.r_deriv(&t, 2), 1e-15))
            .collect();
        beta.sort_by(cmp_re_im);
        for (i, b) in beta.iter().enumerate() {
            if curve.r_deriv(b, 1).norm() >= TOL_ROOT {
                return Err(Error::RootFindingFailed(format!("R'(beta_{i}) = {:e}", curve.r_deriv(b, 1).norm())));
            }
            if curve.r_deriv(b, 2).norm() < TOL_SIMPLE {
                return Err(Error::NonSimpleRamification(i));
            }
            for b2 in &beta[..i] {
                if (b - b2).norm() < DELTA_SEP {
                    return Err(Error::NonSimpleRamification(i));
                }
            }
        }
        let n_max = GALOIS_ORDER + 2;
        let mut xratios = vec![];
        let mut yratios = vec![];
        let mut galois = vec![];
        for b in &beta {
            let r2 = curve.r_deriv(b, 2);
            let x: Vec<C64> = (0..=n_max).map(|n| curve.r_deriv(b, n + 2) / r2).collect();
            let mb = -*b;
            let r1m = curve.r_deriv(&mb, 1);
            let y: Vec<C64> = (0..=n_max)
                .map(|n| curve.r_deriv(&mb, n + 1) / r1m * if n % 2 == 0 { 1.0 } else { -1.0 })
                .collect();
            galois.push(galois_coefficients(&x, GALOIS_ORDER + 1));
            xratios.push(x);
            yratios.push(y);
        }
        Ok(RamificationData { beta, galois, xratios, yratios })
    }

    pub fn len(&self) -> usize {
        self.beta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.beta.is_empty()
    }

    /// `σ_i(q) = β_i + Σ_{n<K} c_{n,i}(q − β_i)^{n+1}`, valid through order `K`.
    pub fn galois_series(&self, i: usize, k: usize) -> Result<Series> {
        let stored = self.galois[i].len();
        if k > stored {
            return Err(Error::OrderUnavailable { requested: k, stored });
        }
        let mut coeffs = vec![self.beta[i]];
        coeffs.extend_from_slice(&self.galois[i][..k]);
        Ok(Series::from_coeffs(self.beta[i], 0, coeffs, k as i32))
    }

    /// `σ_i` applied to a local series in `q − β_i` with symbolic coefficients.
    pub fn galois_of<S: Scalar>(&self, i: usize, q: &LaurentSeries<S>) -> LaurentSeries<S> {
        let t = q.clone() - q.cst(self.beta[i]);
        let k = q.trunc().clamp(1, self.galois[i].len() as i32) as usize;
        let mut acc = q.zero();
        for n in (0..k).rev() {
            acc = (acc + q.cst(self.galois[i][n])) * t.clone();
        }
        acc.add_c(self.beta[i])
    }

    /// Index of the ramification point nearest to `z`.
    pub fn nearest(&self, z: C64) -> (usize, f64) {
        self.beta
            .iter()
            .enumerate()
            .map(|(i, b)| (i, (z - b).norm()))
            .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
            .unwrap()
    }
}

/// Distance from `β_i` to the nearest other ramification point or pole of `R`,
/// the natural length scale of the local expansions.
pub fn local_radius(curve: &SpectralCurve, ram: &RamificationData, i: usize) -> f64 {
    let b = ram.beta[i];
    let others = ram.beta.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, x)| (x - b).norm());
    let poles = curve.eps.iter().map(|e| (b + e).norm());
    others.chain(poles).fold(f64::INFINITY, f64::min)
}

/// Certification residuals of the Galois series: coefficients of
/// `R(σ(q)) − R(q)` and of `σ(σ(q)) − q` through order `k`, each measured
/// in the rescaled variable `(q − β_i)/ρ` with `ρ` the local radius, relative
/// to the size of the compared series.
pub fn certify_galois(curve: &SpectralCurve, ram: &RamificationData, i: usize, k: usize) -> Result<(f64, f64)> {
    let b = ram.beta[i];
    let rho = local_radius(curve, ram, i).min(1.0);
    let scaled_max = |s: &Series, from: i32| (from..=k as i32).map(|n| s.coeff_or_zero(n).norm() * rho.powi(n)).fold(0.0, f64::max);
    let sigma = ram.galois_series(i, k)?;
    let taylor = curve.taylor_r(b, k as i32 + 2);
    let lhs = taylor.compose(&sigma)?;
    let rhs = taylor.truncated(k as i32);
    // R'(β) = 0, so for k = 1 the series alone carries no scale; the
    // quadratic term of R at β is always there.
    let scale = scaled_max(&lhs, 1).max(taylor.coeff_or_zero(2).norm() * rho * rho).max(1e-300);
    let r1 = scaled_max(&(lhs.clone() - rhs), 0) / scale;
    let twice = sigma.compose(&sigma)?;
    let id = Series::variable(b, k as i32);
    let r2 = scaled_max(&(twice - id), 1) / rho;
    Ok((r1, r2))
}

/// Fixed points `α_j ≠ 0` of `R(z) = R(−z)`.
#[derive(Clone, Debug)]
pub struct AlphaPoints {
    pub alpha: Vec<C64>,
}

impl AlphaPoints {
    pub fn compute(curve: &SpectralCurve) -> Result<Self> {
        // R(z) − R(−z) = 2z [1 + (λ/N) Σ ϱ_k/(ε_k² − z²)]; solve in s = z².
        let d = curve.d();
        let sq = |k: usize| curve.eps[k] * curve.eps[k];
        let mut p = Poly::from_shifts((0..d).map(|k| -sq(k)));
        for k in 0..d {
            let others = Poly::from_shifts((0..d).filter(|&j| j != k).map(|j| -sq(j)));
            p = p.add(&others.scale(-curve.rho[k] * curve.ln()));
        }
        let g = |z: C64| curve.r(&z) - curve.r(&-z);
        let dg = |z: C64| curve.r_deriv(&z, 1) + curve.r_deriv(&-z, 1);
        let mut alpha: Vec<C64> = p
            .roots()?
            .into_iter()
            .map(|s| {
                let mut a = s.sqrt();
                if a.re < 0.0 || (a.re.abs() < 1e-14 * a.norm() && a.im < 0.0) {
                    a = -a;
                }
                polish(a, g, dg, 1e-14)
            })
            .collect();
        alpha.sort_by(cmp_re_im);
        for a in &alpha {
            if a.norm() < DELTA_SEP || g(*a).norm() > 1e-9 * (1.0 + a.norm()) {
                return Err(Error::RootFindingFailed(format!("alpha {a}")));
            }
        }
        Ok(AlphaPoints { alpha })
    }
}

impl SpectralCurve {
    /// Recursion kernel at `β_i` as a series in `q − β_i`:
    /// `(1/(z−q) − 1/(z−σ_i(q))) / (2(y(q) − y(σ_i(q))) x'(σ_i(q)))`, so that
    /// `K_i(z,q) = kernel · dz/dσ_i(q)`.
    pub fn kernel_series(&self, ram: &RamificationData, i: usize, z: C64, k: usize) -> Result<Series> {
        let b = ram.beta[i];
        if (z - b).norm() < DELTA_SEP {
            return Err(Error::PointTooCloseToBeta(format!("{z}")));
        }
        let inner = k as i32 + 4;
        let q = Series::variable(b, inner);
        let s = ram.galois_of(i, &q);
        Ok(self.kernel_from(&q, &s, z).truncated(k as i32))
    }

    /// The kernel expression for given local series `q` and `σ(q)`.
    pub fn kernel_from<S: Scalar>(&self, q: &LaurentSeries<S>, s: &LaurentSeries<S>, z: C64) -> LaurentSeries<S> {
        let zc = q.cst(z);
        let num = (zc.clone() - q.clone()).recip() - (zc - s.clone()).recip();
        let den = (self.y(q) - self.y(s)).scale_re(2.0) * self.r_deriv(s, 1);
        num / den
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d1(lambda: f64) -> SpectralCurve {
        solve_curve(&ModelData::new(vec![1.0], vec![1], lambda).unwrap(), 1e-13, 10).unwrap()
    }

    #[test]
    fn bell_recursion_reproduces_listed_coefficients() {
        let x: Vec<C64> = [1.0, 0.7, -0.3, 1.9, 0.4, 0.0].iter().map(|&v| re(v)).collect();
        let cs = galois_coefficients(&x, 5);
        let (x1, x2, x3) = (x[1], x[2], x[3]);
        assert_eq!(cs[0], re(-1.0));
        assert!((cs[1] + x1 / 3.0).norm() < 1e-15);
        assert!((cs[2] + x1 * x1 / 9.0).norm() < 1e-15);
        let c3 = -x1.powi(3) * 2.0 / 27.0 + x1 * x2 / 18.0 - x3 / 60.0;
        assert!((cs[3] - c3).norm() < 1e-14);
        let c4 = -x1.powi(4) * 4.0 / 81.0 + x1 * x1 * x2 / 18.0 - x1 * x3 / 60.0;
        assert!((cs[4] - c4).norm() < 1e-14);
    }

    #[test]
    fn d1_beta_matches_hand_solution() {
        let cv = d1(0.125);
        let ram = RamificationData::compute(&cv).unwrap();
        let (e, r) = (cv.eps[0], cv.rho[0]);
        let s = (r * 0.125).sqrt();
        let mut want = vec![-e + C64::i() * s, -e - C64::i() * s];
        want.sort_by(cmp_re_im);
        for (a, b) in ram.beta.iter().zip(&want) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn d1_alpha_matches_hand_solution() {
        let cv = d1(0.125);
        let al = AlphaPoints::compute(&cv).unwrap();
        let want = (cv.eps[0] * cv.eps[0] + cv.rho[0] * 0.125).sqrt();
        assert!((al.alpha[0] - want).norm() < 1e-12);
    }
}
