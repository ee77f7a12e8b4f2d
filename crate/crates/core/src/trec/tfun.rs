//! Generalised correlation functions `𝒯⁽⁰⁾(I‖z,w|)` and `𝒯⁽⁰⁾(z|w|)` for the
//! planar cases needed by the checks, and the residue route to `ω₁,₁`.
//!
//! `𝒯⁽⁰⁾(u‖z,w|) = 𝒢⁽⁰⁾(z,w) ∂Ũ(u‖z,w)/∂R(u)` where `Ũ` is the pre-integrated
//! ratio `𝒰/𝒢`; the derivative in `u` is taken with a jet.

use serde::{Deserialize, Serialize};

use super::elim::{w2, WRoute};
use super::{Instance, OmegaParts};
use crate::error::{Error, Result};
use crate::form::{lift, PolarForm};
use crate::planar::{omega02, omega02_form, G0Mode};
use crate::series::{jet_point, jet_zero, limit_at, residue_at, Jet1, LaurentSeries, Scalar, Series, C64};
use crate::spectral_curve::{SpectralCurve, DELTA_SEP};

/// Truncation for the local expansions in this module.
const TRUNC: i32 = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TKind {
    TwoPoint,
    OnePlusOne,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TFunctionValue {
    pub kind: TKind,
    pub g: usize,
    pub i: Vec<C64>,
    pub boundary: (C64, C64),
    pub value: C64,
}

/// `Q(u;v) = 1/(u−v) + 1/(u+v)`
fn q<T: Scalar>(u: &T, v: &T) -> T {
    (u.clone() - v.clone()).recip() + (u.clone() + v.clone()).recip()
}

/// `Ũ⁽⁰⁾(u‖z,w)` with the other preimages `ŵ^j` of `w` supplied.
fn u_tilde1<T: Scalar>(cv: &SpectralCurve, u: &T, z: &T, w: C64, w_hat: &[C64]) -> T {
    let lam = cv.lambda();
    let rz = cv.r(z);
    let rw = cv.r(&w);
    let mut acc = z.zero();
    for &v in w_hat {
        // R'(−ŵ)𝒲₂(u;−ŵ) = −Q(u;−ŵ)
        let num = -q(u, &u.cst(-v));
        acc = acc + (num / rz.add_c(-cv.r(&-v))).scale(cv.r_deriv(&v, 1).inv());
    }
    let ru = cv.r(u);
    let rmu = cv.r(&-u.clone());
    acc = acc + (rmu.sub_from_c(rw) * (rz.clone() - ru)).recip();
    let rmz = cv.r(&-z.clone());
    acc = acc - w2(cv, u, z) / rmz.sub_from_c(rw);
    acc.scale_re(lam)
}

/// The boundary points may sit at `ε_k`; only collisions with `±u` and the
/// antidiagonal are excluded here, the poles of `𝒢` are checked by `planar`.
fn check_uzw(us: &[C64], z: C64, w: C64) -> Result<()> {
    for u in us {
        for x in [z, w] {
            if (x - u).norm() < DELTA_SEP || (x + u).norm() < DELTA_SEP {
                return Err(Error::NearSingularSet(format!("boundary point {x} near ±u {u}")));
            }
        }
    }
    if (z + w).norm() < DELTA_SEP {
        return Err(Error::NearSingularSet(format!("z + w = 0 at z = {z}")));
    }
    Ok(())
}

/// `𝒯⁽ᵍ⁾(I‖z,w|)` for `g = 0` and `|I| ≤ 1`.
pub fn t_two_point(inst: &Instance, g: usize, us: &[C64], z: C64, w: C64) -> Result<TFunctionValue> {
    if g > 0 {
        return Err(Error::UnsupportedGenus(g));
    }
    check_uzw(us, z, w)?;
    let cv = &inst.curve;
    let g0 = inst.pd.g0_two_point(z, w, G0Mode::Product)?;
    let value = match us.len() {
        0 => g0,
        1 => {
            let w_hat = &cv.preimages(w)?[1..];
            g0 * t_factor(cv, us[0], z, w, w_hat)?
        }
        n => return Err(Error::UnsupportedCase(format!("two-point function with {n} marked points"))),
    };
    if !value.is_finite() {
        return Err(Error::NonFinite("two-point function".into()));
    }
    Ok(TFunctionValue { kind: TKind::TwoPoint, g, i: us.to_vec(), boundary: (z, w), value })
}

/// `∂Ũ(u‖z,w)/∂R(u)` at numeric points. At `z = ε_k` the term with
/// `1/(R(w)−R(−z))` is read as its limit, since `−ε_k` is a pole of `R`.
fn t_factor(cv: &SpectralCurve, u: C64, z: C64, w: C64, w_hat: &[C64]) -> Result<C64> {
    let proto: Jet1 = jet_zero();
    let uj = jet_point(&proto, u, 0);
    let ut = if cv.eps.iter().any(|e| (z - e).norm() < 1e-4) {
        limit_at(z, &proto.cst(z), TRUNC, |zs| u_tilde1(cv, &lift(zs, &uj), zs, w, w_hat))?
    } else {
        u_tilde1(cv, &uj, &proto.cst(z), w, w_hat)
    };
    Ok(ut.coeff_or_zero(1) / cv.r_deriv(&u, 1))
}

/// Residual of the closure relation for `Ω⁽⁰⁾₂(u,z)`:
/// `R'(z)𝔊₀(z)Ω₂(u,z) − (λ/N²)Σ r_n r_k 𝒯(u‖ε_k,ε_n|)/((R(ε_k)−R(z))(R(ε_n)−R(−z)))
///  + ∂_{R(u)}[𝒢(u,−z) + 𝒢(u,z)]`.
pub fn omega02_closure_residual(inst: &Instance, u: C64, z: C64) -> Result<C64> {
    inst.check_point(0, &[u], z)?;
    let cv = &inst.curve;
    let pd = &inst.pd;
    let n = cv.model.n as f64;
    let lhs = cv.r_deriv(&z, 1) * pd.frak_g0_formula(&z) * omega02(cv, u, z)?;
    let mut sum = C64::new(0.0, 0.0);
    for k in 0..cv.d() {
        for l in 0..cv.d() {
            let (ek, el) = (cv.eps[k], cv.eps[l]);
            let t = pd.g_eps[k][l] * t_factor(cv, u, ek, el, &pd.hat_eps[l])?;
            let rr = (cv.model.r[k] * cv.model.r[l]) as f64;
            sum += t * rr / ((cv.model.e_c(k) - cv.r(&z)) * (cv.model.e_c(l) - cv.r(&-z)));
        }
    }
    let proto: Jet1 = jet_zero();
    let uj = jet_point(&proto, u, 0);
    let gg = pd.g0(&uj, &proto.cst(-z), G0Mode::Sum)? + pd.g0(&uj, &proto.cst(z), G0Mode::Sum)?;
    let dg = gg.coeff_or_zero(1) / cv.r_deriv(&u, 1);
    Ok(lhs - sum * (cv.lambda() / (n * n)) + dg)
}

/// `Ω⁽⁰⁾₂(u,z)` as a Laurent series in `z` about `s`, solved from the closure
/// relation by dividing through `R'(z)𝔊₀(z)`. Unlike the closed form, this
/// expression has candidate poles at the zeros of `𝔊₀` (the points `±α_j`),
/// at `±ε_k` and at `±ε̂_k^j`; the holomorphy check tests that they cancel.
pub fn omega02_dse_series(inst: &Instance, u: C64, s: C64, trunc: i32) -> Result<Series> {
    let cv = &inst.curve;
    let pd = &inst.pd;
    let n = cv.model.n as f64;
    let zs = Series::variable(s, trunc);
    let mut sum = zs.zero();
    for k in 0..cv.d() {
        for l in 0..cv.d() {
            let t = pd.g_eps[k][l] * t_factor(cv, u, cv.eps[k], cv.eps[l], &pd.hat_eps[l])?;
            let rr = (cv.model.r[k] * cv.model.r[l]) as f64;
            let den = cv.r(&zs).sub_from_c(cv.model.e_c(k)) * cv.r(&-zs.clone()).sub_from_c(cv.model.e_c(l));
            sum = sum + den.recip().scale(t * rr);
        }
    }
    let proto: Jet1 = jet_zero();
    let uj = jet_point(&proto, u, 0);
    let zj = LaurentSeries::variable_at(s, proto.cst(s), trunc);
    let uz = lift(&zj, &uj);
    let gg = pd.g0(&uz, &-zj.clone(), G0Mode::Sum)? + pd.g0(&uz, &zj, G0Mode::Sum)?;
    let dg = Series::from_coeffs(s, gg.ord_min(), gg.coeffs().iter().map(|c| c.coeff_or_zero(1)).collect(), gg.trunc());
    let rhs = sum.scale_re(cv.lambda() / (n * n)) - dg.scale(cv.r_deriv(&u, 1).inv());
    // 𝔊₀ vanishes at ±α_j; rounding leftovers of its leading coefficient
    // must not be mistaken for a nonzero value. Compared with the next
    // coefficient only: near other singular points the higher orders grow
    // geometrically.
    let out = rhs / drop_rounded_lead(cv.r_deriv(&zs, 1) * pd.frak_g0_formula(&zs));
    if !out.is_finite() {
        return Err(Error::NonFinite("Ω₂ closure series".into()));
    }
    Ok(out)
}

/// Both sides of the residue of `𝒰⁽⁰⁾(u‖z,w|)` and of `𝒯⁽⁰⁾(u‖z,w|)` at
/// `z = û^k`: returns `[(lhs_U, rhs_U), (lhs_T, rhs_T)]` where the right
/// sides are `λ𝒢(u,w)/(R'(û)(R(w)−R(−û)))` and its `∂/∂R(u)`.
pub fn res_u0_check(inst: &Instance, u: C64, k: usize, w: C64) -> Result<[(C64, C64); 2]> {
    inst.check_point(0, &[u], w)?;
    let cv = &inst.curve;
    let pd = &inst.pd;
    let lam = cv.lambda();
    let w_hat = cv.preimages(w)?[1..].to_vec();
    let proto: Jet1 = jet_zero();
    let uj = jet_point(&proto, u, 0);
    let u_hat = cv.other_preimages(&uj)?;
    let uk = u_hat.get(k).ok_or_else(|| Error::UnsupportedCase(format!("no preimage {k}")))?.clone();
    let wj = proto.cst(w);
    let lhs = residue_at(uk.value(), &uk, TRUNC, |zs| {
        let g = pd.g0(zs, &lift(zs, &wj), G0Mode::Sum).unwrap_or_else(|_| zs.zero());
        g * u_tilde1(cv, &lift(zs, &uj), zs, w, &w_hat)
    })?;
    let guw = pd.g0(&uj, &wj, G0Mode::Sum)?;
    let rhs = (guw / (cv.r_deriv(&uk, 1) * cv.r(&-uk.clone()).sub_from_c(cv.r(&w)))).scale_re(lam);
    let r1u = cv.r_deriv(&u, 1);
    Ok([
        (lhs.coeff_or_zero(0), rhs.coeff_or_zero(0)),
        (lhs.coeff_or_zero(1) / r1u, rhs.coeff_or_zero(1) / r1u),
    ])
}

/// `𝒯⁽⁰⁾(z|w|)` with `z` of any scalar type, from the residues at
/// `t → z, α_j, w` of the one-defect cut.
fn t11_in<S: Scalar>(inst: &Instance, z: &S, w: C64) -> Result<S> {
    let cv = &inst.curve;
    let pd = &inst.pd;
    let rz = cv.r(z);
    let integrand = |t: &LaurentSeries<S>| -> LaurentSeries<S> {
        let rt = cv.r(t);
        let mut f = cv.r_deriv(t, 1) / (LaurentSeries::constant(t.center(), rz.clone()) - rt.clone());
        for j in 0..cv.d() {
            f = f * rt.add_c(-cv.model.e_c(j)) / rt.add_c(-cv.r(&pd.alpha[j]));
        }
        let g = pd.g0(t, &t.cst(w), G0Mode::Sum).unwrap_or_else(|_| t.zero());
        f * g / rt.sub_from_c(cv.r(&w))
    };
    let mut res = residue_at(z.value(), z, TRUNC, &integrand)?;
    for a in &pd.alpha {
        res = res + residue_at(*a, &z.cst(*a), TRUNC, &integrand)?;
    }
    res = res + residue_at(w, &z.cst(w), TRUNC, &integrand)?;
    let flip = (rz.clone() - cv.r(&-z.clone())).recip();
    Ok(alpha_prefactor(inst, z) * flip * res.scale_re(cv.lambda()))
}

/// `∏_j (R(z)−R(α_j))/(R(z)−R(ε_j))`
pub fn alpha_prefactor<S: Scalar>(inst: &Instance, z: &S) -> S {
    let cv = &inst.curve;
    let rz = cv.r(z);
    let mut p = z.one();
    for j in 0..cv.d() {
        p = p * rz.add_c(-cv.r(&inst.pd.alpha[j])) / rz.add_c(-cv.model.e_c(j));
    }
    p
}

/// `𝒯⁽ᵍ⁾(I|z|w|)` for `g = 0`, `I = ∅`. At `z = ε_k` the value is the limit.
pub fn t_one_plus_one(inst: &Instance, g: usize, us: &[C64], z: C64, w: C64) -> Result<TFunctionValue> {
    if g > 0 {
        return Err(Error::UnsupportedGenus(g));
    }
    if !us.is_empty() {
        return Err(Error::UnsupportedCase(format!("1+1 function with {} marked points", us.len())));
    }
    check_uzw(us, w, w)?;
    let near_eps = inst.curve.eps.iter().any(|e| (z - e).norm() < 1e-4);
    let value = if near_eps {
        limit_at(z, &z, TRUNC, |zs: &Series| t11_in(inst, zs, w).unwrap_or_else(|_| zs.cst(C64::new(f64::NAN, 0.0))))?
    } else {
        inst.check_point(0, us, z)?;
        t11_in(inst, &z, w)?
    };
    if !value.is_finite() {
        return Err(Error::NonFinite("1+1 function".into()));
    }
    Ok(TFunctionValue { kind: TKind::OnePlusOne, g, i: vec![], boundary: (z, w), value })
}

/// Residual of the planar 1+1 equation at `I = ∅`:
/// `(R(z)−R(−z))𝒯(z|w|) − (λ/N)Σ r_k 𝒯(ε_k|w|)/(R(ε_k)−R(z)) + λ(𝒢(z,w)−𝒢(w,w))/(R(w)−R(z))`.
pub fn t11_dse_residual(inst: &Instance, z: C64, w: C64) -> Result<C64> {
    let cv = &inst.curve;
    let pd = &inst.pd;
    let t = t_one_plus_one(inst, 0, &[], z, w)?.value;
    let mut s = (cv.r(&z) - cv.r(&-z)) * t;
    for k in 0..cv.d() {
        let tk = t_one_plus_one(inst, 0, &[], cv.eps[k], w)?.value;
        s -= tk * (cv.ln() * cv.model.r[k] as f64) / (cv.model.e_c(k) - cv.r(&z));
    }
    let gzw = pd.g0_two_point(z, w, G0Mode::Product)?;
    let gww = pd.g0_two_point(w, w, G0Mode::Product)?;
    Ok(s + (gzw - gww) * cv.lambda() / (cv.r(&w) - cv.r(&z)))
}

/// `ω₁,₁` from the residues at `q → 0, β_i` of the integrand built from
/// `Ω⁽⁰⁾₂` at the preimages, the cube term and the 1+1 limit over `𝔊₀`.
pub fn om11_route(inst: &Instance) -> Result<OmegaParts> {
    let cv = &inst.curve;
    let pd = &inst.pd;
    let lam = cv.lambda();
    if lam == 0.0 {
        return Err(Error::UnsupportedCase("ω₁,₁ residue route needs λ > 0".into()));
    }
    let trunc = 10;
    let bracket = |q: &Series, pre: &[Series]| -> Series {
        let r1q = cv.r_deriv(q, 1);
        let rmq = cv.r(&-q.clone());
        let mut acc = q.zero();
        for v in pre {
            let om = omega02_form(q, v) / (r1q.clone() * cv.r_deriv(v, 1));
            acc = acc + r1q.clone() * om / (rmq.clone() - cv.r(&-v.clone()));
        }
        acc = acc + cv.r_deriv(&-q.clone(), 1) / (cv.r(q) - rmq).powi(3);
        acc + pd.one_plus_one(q) / pd.frak_g0_formula(q).scale_re(lam)
    };
    let coeffs = |f: Series, c: C64| -> Result<Vec<C64>> {
        if !f.is_finite() {
            return Err(Error::NonFinite("ω₁,₁ integrand".into()));
        }
        let top = (-f.ord_min()).max(0);
        let x = Series::variable(c, trunc).add_c(-c);
        (0..top).map(|n| Ok(-(x.powi(n) * f.clone()).residue()?)).collect()
    };
    let mut p = PolarForm::new();
    let route = WRoute::new(inst);
    for i in 0..inst.ram.len() {
        let b = inst.ram.beta[i];
        let qs = Series::variable(b, trunc);
        let pre = route.preimages_at_beta(i, &qs)?;
        p.push(b, trim(coeffs(bracket(&qs, &pre), b)?));
    }
    let zero = C64::new(0.0, 0.0);
    let q0 = Series::variable(zero, trunc);
    let pre0 = cv.other_preimages(&q0)?;
    let mut h = PolarForm::new();
    h.push(zero, trim(coeffs(bracket(&q0, &pre0), zero)?));
    Ok(OmegaParts { p, h })
}

/// Drops trailing coefficients that are zero up to rounding.
fn drop_rounded_lead(s: Series) -> Series {
    let (a, b) = (s.coeff_or_zero(s.ord_min()), s.coeff_or_zero(s.ord_min() + 1));
    if a.norm() <= 1e-10 * b.norm() {
        Series::from_coeffs(s.center(), s.ord_min() + 1, s.coeffs()[1..].to_vec(), s.trunc())
    } else {
        s
    }
}

fn trim(mut v: Vec<C64>) -> Vec<C64> {
    let scale = v.iter().map(|x| x.norm()).fold(0.0, f64::max);
    while v.last().is_some_and(|x| x.norm() <= 1e-13 * scale) {
        v.pop();
    }
    v
}
