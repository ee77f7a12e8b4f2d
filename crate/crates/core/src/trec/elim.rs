//! Route through the pre-integrated functions `𝒲⁽⁰⁾_{m+1}(I;z)` with
//! `𝔊₀` eliminated: `R'(z)𝒲` is obtained from residues at `q → −u_l` and
//! `q → β_i`, and `Ω` follows by differentiating in the marked points.
//!
//! All functions are generic over the jet type carrying the marked points,
//! so the same code yields `𝒲` itself (plain numbers) and its mixed
//! derivatives (nested jets).

use std::collections::HashMap;

use super::{FormValue, Instance};
use crate::error::{Error, Result};
use crate::form::{lift, PolarForm};
use crate::series::{jet_derivative, jet_point, jet_zero, Jet2, Jet3, LaurentSeries, Scalar, Series, C64};
use crate::spectral_curve::{SpectralCurve, DELTA_SEP};

type Ls<S> = LaurentSeries<S>;

/// `𝒲⁽⁰⁾₂(u;v) = −Q(u;v)/R'(v)`
pub fn w2<T: Scalar>(curve: &SpectralCurve, u: &T, v: &T) -> T {
    -((u.clone() - v.clone()).recip() + (u.clone() + v.clone()).recip()) / curve.r_deriv(v, 1)
}

/// `𝔘⁽⁰⁾(u‖q)` given the other preimages of `q`.
pub fn frak_u1<T: Scalar>(curve: &SpectralCurve, u: &T, q: &T, pre: &[T]) -> T {
    let rmq = curve.r(&-q.clone());
    let mut acc = q.zero();
    for v in pre {
        acc = acc + w2(curve, u, v) / (rmq.clone() - curve.r(&-v.clone()));
    }
    acc - cross(curve, u, q).recip()
}

/// `(R(u)−R(−q))(R(q)−R(−u))`
fn cross<T: Scalar>(curve: &SpectralCurve, u: &T, q: &T) -> T {
    (curve.r(u) - curve.r(&-q.clone())) * (curve.r(q) - curve.r(&-u.clone()))
}

/// `𝔘̌_j(u‖q)`
fn frak_u_check<T: Scalar>(curve: &SpectralCurve, j: usize, u: &T, q: &T, pre: &[T]) -> T {
    let rj = curve.r(&-pre[j].clone());
    let mut acc = q.zero();
    for (l, v) in pre.iter().enumerate() {
        if l != j {
            acc = acc + w2(curve, u, v) / (rj.clone() - curve.r(&-v.clone()));
        }
    }
    acc - cross(curve, u, q).recip()
}

/// `𝔘⁽⁰⁾({a,b}‖q)`; `x3` is `R'(·)𝒲⁽⁰⁾₃(a,b;·)`.
fn frak_u2<S: Scalar>(curve: &SpectralCurve, a: &S, b: &S, x3: &PolarForm<S>, q: &Ls<S>, pre: &[Ls<S>]) -> Ls<S> {
    let lam = curve.lambda();
    let (la, lb) = (lift(q, a), lift(q, b));
    let rmq = curve.r(&-q.clone());
    let mut acc = q.zero();
    for (j, v) in pre.iter().enumerate() {
        let w3 = x3.eval_series(v) / curve.r_deriv(v, 1);
        let mix = w2(curve, &lb, v) * frak_u_check(curve, j, &la, q, pre) + w2(curve, &la, v) * frak_u_check(curve, j, &lb, q, pre);
        acc = acc + (w3 + mix.scale_re(lam)) / (rmq.clone() - curve.r(&-v.clone()));
    }
    let rq = curve.r(q);
    for (x, y) in [(&la, &lb), (&lb, &la)] {
        let s = rq.clone() - curve.r(&-x.clone());
        let t = curve.r(x) - rmq.clone();
        acc = acc + (w2(curve, y, x) / (s.sq() * t)).scale_re(lam);
    }
    acc + (cross(curve, &la, q) * cross(curve, &lb, q)).recip().scale_re(lam)
}

/// The elimination route on one instance.
pub struct WRoute<'a> {
    inst: &'a Instance,
}

fn pick<T: Clone>(xs: &[T], mask: usize) -> Vec<T> {
    xs.iter().enumerate().filter(|(j, _)| mask >> j & 1 == 1).map(|(_, x)| x.clone()).collect()
}

impl<'a> WRoute<'a> {
    pub fn new(inst: &'a Instance) -> Self {
        WRoute { inst }
    }

    fn curve(&self) -> &SpectralCurve {
        &self.inst.curve
    }

    /// The `d` other preimages of a local series `q` about `β_i`: the Galois
    /// image first, then the remaining `d−1` lifted from the fibre of `R(β_i)`.
    pub fn preimages_at_beta<S: Scalar>(&self, i: usize, q: &Ls<S>) -> Result<Vec<Ls<S>>> {
        let b = self.inst.ram.beta[i];
        let mut roots = self.curve().fibre(self.curve().r(&b))?;
        roots.sort_by(|x, y| (x - b).norm().partial_cmp(&(y - b).norm()).unwrap());
        if roots.len() > 2 && (roots[2] - b).norm() < DELTA_SEP {
            return Err(Error::NonSimpleRamification(i));
        }
        let target = self.curve().r(q);
        let mut out = vec![self.inst.ram.galois_of(i, q)];
        out.extend(roots[2..].iter().map(|&v| self.curve().lift_root(q.cst(v), &target)));
        Ok(out)
    }

    /// `𝔘⁽⁰⁾(I‖q)` for `|I| ∈ {1,2}`.
    fn frak_u<S: Scalar>(&self, is: &[S], x: &HashMap<Vec<u64>, PolarForm<S>>, q: &Ls<S>, pre: &[Ls<S>]) -> Result<Ls<S>> {
        match is.len() {
            1 => Ok(frak_u1(self.curve(), &lift(q, &is[0]), q, pre)),
            2 => {
                let x3 = x.get(&set_key(is)).ok_or_else(|| Error::UnsupportedCase("missing lower W".into()))?;
                Ok(frak_u2(self.curve(), &is[0], &is[1], x3, q, pre))
            }
            n => Err(Error::UnsupportedCase(format!("frak U with {n} points"))),
        }
    }

    /// `R'(z)𝒲⁽⁰⁾_{m+1}(us;z)` as a polar form in `z`, split into the poles at
    /// `β_i` and those at `−u_l`.
    pub fn rw<S: Scalar>(&self, us: &[S]) -> Result<(PolarForm<S>, PolarForm<S>)> {
        let m = us.len();
        let proto = us[0].zero();
        let one = proto.one();
        if m == 1 {
            let mut h = PolarForm::new();
            h.push(us[0].clone(), vec![one.clone()]);
            h.push(-us[0].clone(), vec![-one]);
            return Ok((PolarForm::new(), h));
        }
        if m > 3 {
            return Err(Error::UnsupportedCase(format!("elimination route implemented for m <= 3, got {m}")));
        }
        let full = (1usize << m) - 1;
        let x = self.lower_forms(us)?;
        let integrand = |q: &Ls<S>, pre: &[Ls<S>]| self.integrand(us, &x, q, pre);
        let lam = self.curve().lambda();
        let trunc = 4 * m as i32 + 4;

        let mut p = PolarForm::new();
        for i in 0..self.inst.ram.len() {
            let b = self.inst.ram.beta[i];
            let c = proto.cst(b);
            let q = LaurentSeries::variable_at(b, c.clone(), trunc);
            let pre = self.preimages_at_beta(i, &q)?;
            p.push(c.clone(), polar_coeffs(&integrand(&q, &pre)?, &q, &c, trunc)?);
        }
        let mut h = PolarForm::new();
        for l in 0..m {
            let c = -us[l].clone();
            let q = LaurentSeries::variable_at(c.value(), c.clone(), trunc);
            let pre = self.curve().other_preimages(&q)?;
            let mut coeffs = polar_coeffs(&integrand(&q, &pre)?, &q, &c, trunc)?;
            // −λ 𝔘(I∖u_l‖u_l)/(z+u_l)
            let rest = pick(us, full & !(1 << l));
            let ql = LaurentSeries::constant(us[l].value(), us[l].clone());
            let prel = self.curve().other_preimages(&ql)?;
            let fu = self.frak_u(&rest, &x, &ql, &prel)?.coeff_or_zero(0);
            if coeffs.is_empty() {
                coeffs.push(proto.zero());
            }
            coeffs[0] = coeffs[0].clone() - fu.scale_re(lam);
            h.push(c, coeffs);
        }
        Ok((p, h))
    }

    /// `R'(·)𝒲` for every proper nonempty subset of `us`.
    fn lower_forms<S: Scalar>(&self, us: &[S]) -> Result<HashMap<Vec<u64>, PolarForm<S>>> {
        let full = (1usize << us.len()) - 1;
        let mut x = HashMap::new();
        for mask in 1..full {
            let sub = pick(us, mask);
            let (mut a, b) = self.rw(&sub)?;
            a.extend(b);
            x.insert(set_key(&sub), a);
        }
        Ok(x)
    }

    /// `λ Σ_{I_1⊎I_2} R'(q)𝒲(I_1;q) 𝔘(I_2‖q)` as a series in `q`.
    fn integrand<S: Scalar>(&self, us: &[S], x: &HashMap<Vec<u64>, PolarForm<S>>, q: &Ls<S>, pre: &[Ls<S>]) -> Result<Ls<S>> {
        let full = (1usize << us.len()) - 1;
        let mut acc = q.zero();
        for mask in 1..full {
            let i1 = pick(us, mask);
            let i2 = pick(us, full & !mask);
            acc = acc + x[&set_key(&i1)].eval_series(q) * self.frak_u(&i2, x, q, pre)?;
        }
        Ok(acc.scale_re(self.curve().lambda()))
    }

    /// Form coefficient of `ω₀,m+1(us, z)` at `z`, split into the `β` and
    /// `−u` contributions: `F = λ^{1−m} ∂_{u_1}⋯∂_{u_m}[R'(z)𝒲]`.
    pub fn form_at(&self, us: &[C64], z: C64) -> Result<(C64, C64)> {
        self.inst.check_marked(us)?;
        self.inst.check_point(0, us, z)?;
        let lam = self.curve().lambda();
        match us.len() {
            2 => {
                let proto: Jet2 = jet_zero();
                let js: Vec<Jet2> = (0..2).map(|k| jet_point(&proto, us[k], k)).collect();
                let (p, h) = self.rw(&js)?;
                let zc = proto.cst(z);
                let d = |v: &Jet2| jet_derivative(v, &[0, 1]) / lam;
                Ok((d(&p.eval(&zc)), d(&h.eval(&zc))))
            }
            3 => {
                let proto: Jet3 = jet_zero();
                let js: Vec<Jet3> = (0..3).map(|k| jet_point(&proto, us[k], k)).collect();
                let (p, h) = self.rw(&js)?;
                let zc = proto.cst(z);
                let d = |v: &Jet3| jet_derivative(v, &[0, 1, 2]) / (lam * lam);
                Ok((d(&p.eval(&zc)), d(&h.eval(&zc))))
            }
            n => Err(Error::UnsupportedCase(format!("elimination route needs m in {{2,3}}, got {n}"))),
        }
    }

    /// `𝔘⁽⁰⁾(u‖q)` at a numeric point.
    pub fn frak_u_at(&self, u: C64, q: C64) -> Result<C64> {
        let pre = self.curve().preimages(q)?;
        Ok(frak_u1(self.curve(), &u, &q, &pre[1..]))
    }
}

/// Stable key of a point set (values at the base point, sorted).
fn set_key<S: Scalar>(xs: &[S]) -> Vec<u64> {
    let mut v: Vec<(u64, u64)> = xs.iter().map(|x| (x.value().re.to_bits(), x.value().im.to_bits())).collect();
    v.sort_unstable();
    v.into_iter().flat_map(|(a, b)| [a, b]).collect()
}

/// Coefficients of `(z−c)^{−n−1}` in `Res_{q→c} f(q)/(q−z)`, i.e. `−Res (q−c)^n f`.
fn polar_coeffs<S: Scalar>(f: &Ls<S>, q: &Ls<S>, c: &S, trunc: i32) -> Result<Vec<S>> {
    if !f.is_finite() {
        return Err(Error::NonFinite("elimination integrand".into()));
    }
    let w = q.clone() - lift(q, c);
    let top = (-f.ord_min()).max(0);
    let mut out = vec![];
    for n in 0..top {
        let r = (w.powi(n) * f.clone()).residue().map_err(|_| Error::TruncationInsufficient { trunc, pole: top })?;
        out.push(-r);
    }
    Ok(out)
}

/// `∇ⁿ_z f` by residue of a series: `Res_{q→z} f(q)/((R(q)−R(z))ⁿ(R(−z)−R(−q)))`.
pub fn nabla_residue(curve: &SpectralCurve, n: usize, f: &dyn Fn(&Series) -> Series, z: C64) -> Result<C64> {
    let q = Series::variable(z, 8);
    let rz = curve.r(&z);
    let rmz = curve.r(&-z);
    let den = curve.r(&q).add_c(-rz).powi(n as i32) * curve.r(&-q.clone()).sub_from_c(rmz);
    (f(&q) / den).residue()
}

/// `∇¹_z f`, `∇²_z f` from their closed forms, with `f`, `f'`, `f''` read off
/// the Taylor series of `f` about `z`.
pub fn nabla(curve: &SpectralCurve, n: usize, f: &dyn Fn(&Series) -> Series, z: C64) -> Result<C64> {
    let s = f(&Series::variable(z, 4));
    let (f0, f1, f2) = (s.coeff(0)?, s.coeff(1)?, s.coeff(2)? * 2.0);
    let r = |k: usize, x: C64| curve.r_deriv(&x, k);
    let (a1, a2, a3) = (r(1, z), r(2, z), r(3, z));
    let (b1, b2, b3) = (r(1, -z), r(2, -z), r(3, -z));
    match n {
        1 => Ok((f1 + f0 * (b2 / (b1 * 2.0) - a2 / (a1 * 2.0))) / (a1 * b1)),
        2 => {
            let first = f2 * 0.5 + f1 * (b2 / (b1 * 2.0) - a2 / a1);
            let second = f0
                * (b2 * b2 / (b1 * b1 * 4.0) + a2 * a2 * 3.0 / (a1 * a1 * 4.0) - a2 * b2 / (a1 * b1 * 2.0) - b3 / (b1 * 6.0) - a3 / (a1 * 3.0));
            Ok((first + second) / (a1 * a1 * b1))
        }
        _ => Err(Error::UnsupportedCase(format!("nabla closed form for n = {n}"))),
    }
}

/// `R'(z)𝒲₃(z) − R'(−z)𝒲₃(−z) − λ[R'(−z)𝒲₂(u1;−z)∇¹_z(R'(z)𝒲₂(u2;z)) + (u1↔u2)]`
pub fn w3_flip_residual(inst: &Instance, u1: C64, u2: C64, z: C64) -> Result<C64> {
    let cv = &inst.curve;
    let route = WRoute::new(inst);
    let (mut x, h) = route.rw(&[u1, u2])?;
    x.extend(h);
    let lhs = x.eval(&z) - x.eval(&-z);
    let mut rhs = C64::new(0.0, 0.0);
    for (a, b) in [(u1, u2), (u2, u1)] {
        let outer = cv.r_deriv(&-z, 1) * w2(cv, &a, &-z);
        let inner = |q: &Series| -(q.cst(b) - q.clone()).recip() - (q.add_c(b)).recip();
        rhs += outer * nabla(cv, 1, &inner, z)?;
    }
    Ok(lhs - rhs * cv.lambda())
}

/// The elimination route as a normalized value.
pub fn w_route(inst: &Instance, us: &[C64], z: C64) -> Result<FormValue> {
    let (p, h) = WRoute::new(inst).form_at(us, z)?;
    FormValue::from_values(inst, 0, us, z, p, h, "elimination")
}
