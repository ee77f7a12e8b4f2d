//! Closed formulas for `ω₀,₃`, `ω₀,₄` and `ω₁,₁`.
//!
//! The `d_u` derivatives are taken with jets: every coefficient of the polar
//! parts in `z` is computed as a jet in the marked points and the mixed
//! first derivative is read off.

use serde::{Deserialize, Serialize};

use super::{d_u_polar, Instance, OmegaParts};
use crate::error::Result;
use crate::form::PolarForm;
use crate::planar::omega02_form;
use crate::series::{jet_derivative, jet_point, jet_zero, Jet1, Jet3, Scalar, C64};

/// Which ramification points enter the `β`-sum of the closed `ω₀,₃`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BetaRange {
    /// The first `d` of the `2d` points (sorted by real, then imaginary part).
    FirstD,
    All,
}

fn q<T: Scalar>(u: &T, z: &T) -> T {
    (u.clone() - z.clone()).recip() + (u.clone() + z.clone()).recip()
}

/// `∂_u Q(u;b)` for numeric `b`.
fn q_du<T: Scalar>(u: &T, b: C64) -> T {
    -(u.add_c(-b).powi(-2) + u.add_c(b).powi(-2))
}

/// `Q'(u;b)`, `Q''(u;b)`: derivatives in the second argument.
fn q_d1<T: Scalar>(u: &T, b: C64) -> T {
    u.add_c(-b).powi(-2) - u.add_c(b).powi(-2)
}

fn q_d2<T: Scalar>(u: &T, b: C64) -> T {
    (u.add_c(-b).powi(-3) + u.add_c(b).powi(-3)).scale_re(2.0)
}

fn betas(inst: &Instance, range: BetaRange) -> std::ops::Range<usize> {
    match range {
        BetaRange::FirstD => 0..inst.curve.d().min(inst.ram.len()),
        BetaRange::All => 0..inst.ram.len(),
    }
}

/// `1/(R'(−β_i) R''(β_i))`
fn beta_weight(inst: &Instance, i: usize) -> C64 {
    let b = inst.ram.beta[i];
    (inst.curve.r_deriv(&-b, 1) * inst.curve.r_deriv(&b, 2)).inv()
}

/// Form coefficient of `ω₀,₃(u1,u2,z)` as a function of `z`.
pub fn omega03_explicit(inst: &Instance, u1: C64, u2: C64, range: BetaRange) -> Result<OmegaParts> {
    inst.check_marked(&[u1, u2])?;
    let cv = &inst.curve;
    let zero = C64::new(0.0, 0.0);
    let mut p = PolarForm::new();
    for i in betas(inst, range) {
        let b = inst.ram.beta[i];
        let a = -q_du(&u1, b) * q_du(&u2, b) * beta_weight(inst, i);
        p.push(b, vec![zero, a]);
    }
    let mut h = PolarForm::new();
    let proto: Jet1 = jet_zero();
    for (x, y) in [(u1, u2), (u2, u1)] {
        let u = jet_point(&proto, x, 0);
        let yy = proto.cst(y);
        let b1 = omega02_form(&yy, &u) / (cv.r_deriv(&u, 1) * cv.r_deriv(&-u.clone(), 1));
        h.push(-x, d_u_polar(&[proto.zero(), b1]));
    }
    Ok(OmegaParts { p, h })
}

/// Form coefficient of `ω₀,₄(u1,u2,u3,z)` as a function of `z`. The inner
/// `ω₀,₃` uses the given range as well.
pub fn omega04_explicit(inst: &Instance, u1: C64, u2: C64, u3: C64, range: BetaRange) -> Result<OmegaParts> {
    inst.check_marked(&[u1, u2, u3])?;
    let cv = &inst.curve;
    let ram = &inst.ram;
    let proto: Jet3 = jet_zero();
    let us = [jet_point(&proto, u1, 0), jet_point(&proto, u2, 1), jet_point(&proto, u3, 2)];
    let r1 = |x: &Jet3| cv.r_deriv(x, 1);
    let r1m = |x: &Jet3| cv.r_deriv(&-x.clone(), 1);
    let roles = [(0, 1, 2), (2, 1, 0), (0, 2, 1)];
    let zero = C64::new(0.0, 0.0);

    let mut p = PolarForm::new();
    for i in 0..ram.len() {
        let b = ram.beta[i];
        let (x1, x2) = (ram.xratios[i][1], ram.xratios[i][2]);
        let (y1, y2) = (ram.yratios[i][1], ram.yratios[i][2]);
        let w = beta_weight(inst, i);
        let mut c2 = proto.zero();
        let mut c3 = proto.zero();
        let mut c4 = proto.zero();
        for &(a, bb, cc) in &roles {
            let (ua, ub, uc) = (&us[a], &us[bb], &us[cc]);
            let qa = q(ua, &proto.cst(b));
            let qb = q(ub, &proto.cst(b));
            let qc = q(uc, &proto.cst(b));
            let pre = (qa.clone() * qb.clone()).scale(w * w);
            c4 = c4 - pre.clone() * qc.clone();
            c3 = c3 + (pre.clone() * qc.clone()).scale(x1 / 3.0);
            let bracket = q_d1(uc, b).scale(x1 / 2.0) - q_d2(uc, b).scale_re(0.5)
                + qc.scale(x2 / 6.0 - x1 * x1 / 4.0 - y1 * x1 / 6.0 + y2 / 6.0);
            c2 = c2 + pre * bracket;
            let mut inner = q(ub, ua) / (r1(ua) * r1m(ua) * ua.add_c(b).sq()) + q(ua, ub) / (r1(ub) * r1m(ub) * ub.add_c(b).sq());
            for n in 0..ram.len() {
                if n != i {
                    let bn = ram.beta[n];
                    inner = inner + (q(ua, &proto.cst(bn)) * q(ub, &proto.cst(bn))).scale(beta_weight(inst, n) / (b - bn).powi(2));
                }
            }
            c2 = c2 - (qc * inner).scale(w);
        }
        let d = |x: &Jet3| jet_derivative(x, &[0, 1, 2]);
        p.push(b, vec![zero, d(&c2), d(&c3), d(&c4)]);
    }

    let mut h = PolarForm::new();
    let j1: Jet1 = jet_zero();
    let plain = [u1, u2, u3];
    for &(a, bb, cc) in &roles {
        let (ua, ub) = (plain[a], plain[bb]);
        let u = jet_point(&j1, plain[cc], 0);
        let f_a = omega02_form(&j1.cst(ua), &u);
        let f_b = omega02_form(&j1.cst(ub), &u);
        let rp = cv.r_deriv(&u, 1);
        let rm = cv.r_deriv(&-u.clone(), 1);
        let rmm = cv.r_deriv(&-u.clone(), 2);
        let ff = (f_a * f_b).scale_re(2.0) / (rp.sq() * rm.sq());
        let w3 = omega03_explicit(inst, ua, ub, range)?.total().eval_in(&u);
        let b3 = -ff.clone();
        let b2 = ff * rmm / (rm.scale_re(2.0)) + w3 / (rp * rm);
        h.push(-plain[cc], d_u_polar(&[j1.zero(), b2, b3]));
    }
    Ok(OmegaParts { p, h })
}

/// Form coefficient of `ω₁,₁(z)`.
pub fn omega11_explicit(inst: &Instance) -> Result<OmegaParts> {
    let cv = &inst.curve;
    let ram = &inst.ram;
    let zero = C64::new(0.0, 0.0);
    let mut p = PolarForm::new();
    for i in 0..ram.len() {
        let b = ram.beta[i];
        let (x1, x2) = (ram.xratios[i][1], ram.xratios[i][2]);
        let (y1, y2) = (ram.yratios[i][1], ram.yratios[i][2]);
        let w = beta_weight(inst, i);
        let c2 = x2 / 48.0 - x1 * x1 / 48.0 - x1 * y1 / 48.0 + y2 / 48.0 - (b * b * 8.0).inv();
        p.push(b, vec![zero, c2 * w, x1 / 24.0 * w, -w / 8.0]);
    }
    let r1 = cv.r_deriv(&zero, 1);
    let r2 = cv.r_deriv(&zero, 2);
    let mut h = PolarForm::new();
    h.push(zero, vec![zero, r2 / (r1.powi(3) * 16.0), -(r1 * r1 * 8.0).inv()]);
    Ok(OmegaParts { p, h })
}
