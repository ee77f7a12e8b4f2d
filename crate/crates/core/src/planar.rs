//! Planar building blocks: the two-point function `𝒢⁽⁰⁾(z,w)`, its
//! partial-fraction tensor, `𝔊₀`, `Ω⁽⁰⁾₂` and the 1+1-point limit.
//!
//! Most functions are generic over [`Scalar`] so that the same formula can
//! be evaluated at numbers, at local series (for residues and limits) and at
//! jets (for derivatives in marked points).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::{c, limit_at, residue_at, LaurentSeries, Scalar, C64};
use crate::spectral_curve::{AlphaPoints, SpectralCurve, DELTA_SEP};

/// Truncation used for limits and residues of planar functions.
const LOCAL_TRUNC: i32 = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum G0Mode {
    Sum,
    Product,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FrakMode {
    Formula,
    Residue,
}

/// Curve plus the cached planar data.
#[derive(Clone, Debug)]
pub struct PlanarData {
    pub curve: SpectralCurve,
    pub alpha: Vec<C64>,
    /// `hat_eps[k][j] = ε̂_k^j`, the other preimages of `e_k`.
    pub hat_eps: Vec<Vec<C64>>,
    /// `g_eps[k][l] = 𝒢⁽⁰⁾(ε_k, ε_l)`
    pub g_eps: Vec<Vec<C64>>,
    /// `ctensor[k][l][m][n] = C_{k,l}^{m,n}`
    pub ctensor: Vec<Vec<Vec<Vec<C64>>>>,
}

impl PlanarData {
    pub fn new(curve: &SpectralCurve) -> Result<Self> {
        let d = curve.d();
        // At λ = 0 the fixed points degenerate; their limit is ε_k.
        let alpha = if curve.lambda() == 0.0 { curve.eps.clone() } else { AlphaPoints::compute(curve)?.alpha };
        let hat_eps = (0..d).map(|k| Ok(curve.preimages(curve.eps[k])?[1..].to_vec())).collect::<Result<Vec<_>>>()?;
        let mut pd = PlanarData { curve: curve.clone(), alpha, hat_eps, g_eps: vec![], ctensor: vec![] };
        pd.g_eps = (0..d).map(|k| (0..d).map(|l| pd.g0_eps_eps(k, l)).collect::<Result<Vec<_>>>()).collect::<Result<_>>()?;
        // The tensor enters only with the prefactor (λ/N)², so it is irrelevant at λ = 0.
        let entry = |k, l, m, n| if curve.lambda() == 0.0 { c(0.0, 0.0) } else { pd.c_entry(k, l, m, n) };
        let ct = (0..d)
            .map(|k| (0..d).map(|l| (0..d).map(|m| (0..d).map(|n| entry(k, l, m, n)).collect()).collect()).collect())
            .collect();
        pd.ctensor = ct;
        Ok(pd)
    }

    fn d(&self) -> usize {
        self.curve.d()
    }

    /// `𝒢⁽⁰⁾(ε_k, ε_l)` as the limit `z → ε_k` of the product form.
    fn g0_eps_eps(&self, k: usize, l: usize) -> Result<C64> {
        let ek = self.curve.eps[k];
        let el = self.curve.eps[l];
        limit_at(ek, &ek, LOCAL_TRUNC, |z| self.product_form(z, &z.cst(el), &self.hat_eps[l]))
    }

    /// Recomputes `C_{k,l}^{m,n}` from its defining formula.
    pub fn c_entry(&self, k: usize, l: usize, m: usize, n: usize) -> C64 {
        let cv = &self.curve;
        let (a, b) = (self.hat_eps[k][m], self.hat_eps[l][n]);
        let rk = cv.model.r[k] as f64;
        let rl = cv.model.r[l] as f64;
        (a + b) * rk * rl * self.g_eps[k][l]
            / (cv.r_deriv(&a, 1) * cv.r_deriv(&b, 1) * (cv.r(&cv.eps[l]) - cv.r(&-a)) * (cv.r(&cv.eps[k]) - cv.r(&-b)))
    }

    /// Product form with the other preimages of `w` supplied.
    fn product_form<T: Scalar>(&self, z: &T, w: &T, w_hat: &[C64]) -> T {
        let cv = &self.curve;
        let rz = cv.r(z);
        let mut acc = (cv.r(w) - cv.r(&-z.clone())).recip();
        for k in 0..self.d() {
            acc = acc * (rz.clone() - cv.r(&z.cst(-w_hat[k]))) / rz.add_c(-cv.model.e_c(k));
        }
        acc
    }

    /// Product form with symbolic `w`: its preimages are lifted to the scalar type.
    fn product_form_sym<T: Scalar>(&self, z: &T, w: &T) -> Result<T> {
        let cv = &self.curve;
        let w_hat = cv.other_preimages(w)?;
        let rz = cv.r(z);
        let mut acc = (cv.r(w) - cv.r(&-z.clone())).recip();
        for (k, wh) in w_hat.iter().enumerate() {
            acc = acc * (rz.clone() - cv.r(&-wh.clone())) / rz.add_c(-cv.model.e_c(k));
        }
        Ok(acc)
    }

    /// The printed closed form with the cached `ε̂_k^j`.
    fn sum_form<T: Scalar>(&self, z: &T, w: &T) -> T {
        let cv = &self.curve;
        let d = self.d();
        let (rz, rw) = (cv.r(z), cv.r(w));
        let rmw = cv.r(&-w.clone());
        let mut num = z.one();
        for k in 0..d {
            let ek = cv.model.e_c(k);
            let mut prod = z.one();
            for j in 0..d {
                prod = prod * (rw.add_c(-cv.r(&-self.hat_eps[k][j]))) / rw.add_c(-cv.model.e_c(j));
            }
            let term = prod / (rz.add_c(-ek) * rmw.sub_from_c(ek));
            num = num - term.scale_re(cv.ln() * cv.model.r[k] as f64);
        }
        num / (rw - cv.r(&-z.clone()))
    }

    fn check_point(&self, z: C64, w: C64) -> Result<()> {
        if (z + w).norm() < DELTA_SEP {
            return Err(Error::NearPole(format!("z + w = 0 at z = {z}")));
        }
        for x in self.hat_eps.iter().flatten() {
            if (z - x).norm() < DELTA_SEP || (w - x).norm() < DELTA_SEP {
                return Err(Error::NearPole(format!("preimage of an eigenvalue at {x}")));
            }
        }
        Ok(())
    }

    /// `𝒢⁽⁰⁾(z,w)` at numeric points.
    pub fn g0_two_point(&self, z: C64, w: C64, mode: G0Mode) -> Result<C64> {
        self.check_point(z, w)?;
        let eps = &self.curve.eps;
        // The printed forms have removable singularities at z or w = ε_k.
        let near_eps = |x: C64| eps.iter().any(|e| (x - e).norm() < 1e-4);
        if near_eps(z) || near_eps(w) {
            let (a, b) = if near_eps(z) { (z, w) } else { (w, z) };
            return limit_at(a, &a, LOCAL_TRUNC, |s| self.g0(s, &s.cst(b), mode).unwrap_or_else(|_| s.cst(c(f64::NAN, 0.0))));
        }
        self.g0(&z, &w, mode)
    }

    /// `𝒢⁽⁰⁾(z,w)` for scalar-typed arguments.
    pub fn g0<T: Scalar>(&self, z: &T, w: &T, mode: G0Mode) -> Result<T> {
        match mode {
            G0Mode::Product => self.product_form_sym(z, w),
            G0Mode::Sum => Ok(self.sum_form(z, w)),
        }
    }

    /// `𝒢⁽⁰⁾(z, ε_k)`, regular in `z` away from the listed poles.
    pub fn g0_with_eps<T: Scalar>(&self, z: &T, k: usize) -> T {
        self.product_form(z, &z.cst(self.curve.eps[k]), &self.hat_eps[k])
    }

    /// The representation through the tensor `C`.
    pub fn g0_partial_fractions<T: Scalar>(&self, z: &T, u: &T) -> T {
        let d = self.d();
        let ln2 = self.curve.ln().powi(2);
        let mut s = z.zero();
        for k in 0..d {
            for l in 0..d {
                for m in 0..d {
                    for n in 0..d {
                        let den = z.add_c(-self.hat_eps[k][m]) * u.add_c(-self.hat_eps[l][n]);
                        s = s + den.recip().scale(self.ctensor[k][l][m][n]);
                    }
                }
            }
        }
        s.scale_re(ln2).add_c(c(1.0, 0.0)) / (z.clone() + u.clone())
    }

    /// `𝔊₀(z)` from the tensor formula, for any scalar type.
    pub fn frak_g0_formula<T: Scalar>(&self, z: &T) -> T {
        let d = self.d();
        let ln2 = self.curve.ln().powi(2);
        let mut s = z.zero();
        for k in 0..d {
            for l in 0..d {
                for m in 0..d {
                    for n in 0..d {
                        let den = z.add_c(-self.hat_eps[k][m]) * z.add_c(self.hat_eps[l][n]);
                        s = s + den.recip().scale(self.ctensor[k][l][m][n]);
                    }
                }
            }
        }
        s.scale_re(-ln2).add_c(c(1.0, 0.0))
    }

    /// `𝔊₀(z)` at a numeric point.
    pub fn frak_g0(&self, z: C64, mode: FrakMode) -> Result<C64> {
        for x in self.hat_eps.iter().flatten() {
            if (z - x).norm() < DELTA_SEP || (z + x).norm() < DELTA_SEP {
                return Err(Error::NearPole(format!("𝔊₀ pole at ±{x}")));
            }
        }
        match mode {
            FrakMode::Formula => Ok(self.frak_g0_formula(&z)),
            FrakMode::Residue => {
                // Res_{v→−z} 𝒢⁽⁰⁾(z,v) = Res_{v→−z} 𝒢⁽⁰⁾(v,z), expanded in v with z's preimages fixed.
                let z_hat = self.curve.preimages(z)?[1..].to_vec();
                residue_at(-z, &-z, LOCAL_TRUNC, |v| self.product_form(v, &v.cst(z), &z_hat))
            }
        }
    }

    /// `𝒢⁽⁰⁾(v, w)` as a local series in `v` with numeric `w`.
    pub fn g0_series_first(&self, v: &LaurentSeries<C64>, w: C64) -> Result<LaurentSeries<C64>> {
        let w_hat = self.curve.preimages(w)?[1..].to_vec();
        Ok(self.product_form(v, &v.cst(w), &w_hat))
    }

    /// Residual of `(R(w)−R(−z))𝒢(z,w) − 1 − (λ/N)Σ r_k 𝒢(ε_k,w)/(R(ε_k)−R(z))`.
    pub fn gzw0_residual(&self, z: C64, w: C64) -> Result<f64> {
        let cv = &self.curve;
        let g = self.g0_two_point(z, w, G0Mode::Product)?;
        let mut s = (cv.r(&w) - cv.r(&-z)) * g - 1.0;
        for k in 0..self.d() {
            let gk = self.g0_with_eps(&w, k);
            s -= gk * (cv.ln() * cv.model.r[k] as f64) / (cv.model.e_c(k) - cv.r(&z));
        }
        Ok(s.norm())
    }

    /// Residual of `−R(−z) = R(z) + (λ/N)Σ r_k/(R(ε_k)−R(z)) + (λ/N)Σ r_k 𝒢(z,ε_k)`.
    pub fn ansatz_residual(&self, z: C64) -> f64 {
        let cv = &self.curve;
        let mut s = -cv.r(&-z) - cv.r(&z);
        for k in 0..self.d() {
            let rk = cv.ln() * cv.model.r[k] as f64;
            s -= rk / (cv.model.e_c(k) - cv.r(&z));
            s -= self.g0_with_eps(&z, k) * rk;
        }
        s.norm()
    }

    /// `λ(R(q)+R(−q)−2R(0))/(R(q)−R(−q))⁴ · ∏_j (R(q)−R(α_j))(R(−q)−R(α_j))/((R(q)−R(ε_j))(R(−q)−R(ε_j)))`
    pub fn one_plus_one<T: Scalar>(&self, q: &T) -> T {
        let cv = &self.curve;
        let rq = cv.r(q);
        let rmq = cv.r(&-q.clone());
        let r0 = cv.r(&c(0.0, 0.0));
        let mut acc = (rq.clone() + rmq.clone()).add_c(-r0 * 2.0).scale_re(cv.lambda()) / (rq.clone() - rmq.clone()).powi(4);
        for j in 0..self.d() {
            let ra = cv.r(&self.alpha[j]);
            let ej = cv.model.e_c(j);
            acc = acc * rq.add_c(-ra) * rmq.add_c(-ra) / (rq.add_c(-ej) * rmq.add_c(-ej));
        }
        acc
    }

    pub fn one_plus_one_limit(&self, q: C64) -> Result<C64> {
        let cv = &self.curve;
        if q.norm() < DELTA_SEP {
            return Err(Error::NearPole("q = 0".into()));
        }
        for x in self.alpha.iter().chain(&cv.eps) {
            if (q - x).norm() < DELTA_SEP || (q + x).norm() < DELTA_SEP {
                return Err(Error::NearPole(format!("q = ±{x}")));
            }
        }
        Ok(self.one_plus_one(&q))
    }
}

/// `Ω⁽⁰⁾₂(u,z) = (1/(u−z)² + 1/(u+z)²)/(R'(u)R'(z))`
pub fn omega02(curve: &SpectralCurve, u: C64, z: C64) -> Result<C64> {
    if (u - z).norm() < DELTA_SEP || (u + z).norm() < DELTA_SEP {
        return Err(Error::DiagonalSingularity(format!("u = {u}, z = {z}")));
    }
    Ok(omega02_form(&u, &z) / (curve.r_deriv(&u, 1) * curve.r_deriv(&z, 1)))
}

/// Form coefficient of `ω₀,₂`: `1/(u−z)² + 1/(u+z)²`.
pub fn omega02_form<T: Scalar>(u: &T, z: &T) -> T {
    (u.clone() - z.clone()).powi(-2) + (u.clone() + z.clone()).powi(-2)
}
