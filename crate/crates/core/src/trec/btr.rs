//! Generic planar residue engine for `ω₀,m+1`, `m ≥ 2`.
//!
//! The polar part at `β_i` comes from the recursion kernel applied to the
//! products of lower forms; the part at `−u_k` from the `K_u` residues at
//! `q → u_k` summed over set partitions of the remaining points, followed
//! by `d_{u_k}`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

use super::{d_u_polar, omega02_parts, Instance, OmegaParts};
use crate::error::{Error, Result};
use crate::form::{lift, PolarForm};
use crate::series::{jet_point, jet_zero, Jet1, LaurentSeries, Scalar, Series, C64};

/// Largest number of marked points the engine accepts.
pub const MAX_POINTS: usize = 6;

/// How the blocks `I_2, …, I_s` of the `K_u` partition sum are counted.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PartitionConvention {
    /// `I_1` distinguished, the other blocks an unordered set.
    Set,
    /// `I_1` distinguished, the other blocks an ordered tuple.
    Ordered,
}

type Key = Vec<(u64, u64)>;

fn key(us: &[C64]) -> Key {
    let mut k: Key = us.iter().map(|u| (u.re.to_bits(), u.im.to_bits())).collect();
    k.sort_unstable();
    k
}

/// All set partitions of `0..n`, blocks in order of their smallest element.
pub fn set_partitions(n: usize) -> Vec<Vec<Vec<usize>>> {
    let mut out: Vec<Vec<Vec<usize>>> = vec![vec![]];
    for x in 0..n {
        let mut next = vec![];
        for p in out {
            for b in 0..p.len() {
                let mut q = p.clone();
                q[b].push(x);
                next.push(q);
            }
            let mut q = p;
            q.push(vec![x]);
            next.push(q);
        }
        out = next;
    }
    out
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

pub struct BtrEngine<'a> {
    inst: &'a Instance,
    conv: PartitionConvention,
    memo: Mutex<HashMap<Key, Arc<OmegaParts>>>,
}

impl<'a> BtrEngine<'a> {
    pub fn new(inst: &'a Instance, conv: PartitionConvention) -> Self {
        BtrEngine { inst, conv, memo: Mutex::new(HashMap::new()) }
    }

    /// Lower form, memoized by the sorted point set.
    fn lower(&self, us: &[C64]) -> Result<Arc<OmegaParts>> {
        if us.len() == 1 {
            return Ok(Arc::new(omega02_parts(us[0])));
        }
        let k = key(us);
        if let Some(v) = self.memo.lock().expect("memo lock").get(&k) {
            return Ok(v.clone());
        }
        let v = Arc::new(self.compute(us)?);
        self.memo.lock().expect("memo lock").insert(k, v.clone());
        Ok(v)
    }

    /// Form coefficient of `ω₀,|us|+1(us, z)` as a function of `z`. The top
    /// level is never read from the memo, so permutation tests see the
    /// engine's actual dependence on the point order.
    pub fn omega(&self, us: &[C64]) -> Result<OmegaParts> {
        if us.len() < 2 {
            return Err(Error::UnsupportedCase(format!("engine needs at least 2 marked points, got {}", us.len())));
        }
        if us.len() > MAX_POINTS {
            return Err(Error::RecursionDepthExceeded(us.len()));
        }
        self.inst.check_marked(us)?;
        self.compute(us)
    }

    fn compute(&self, us: &[C64]) -> Result<OmegaParts> {
        let mut p = PolarForm::new();
        for i in 0..self.inst.ram.len() {
            let coeffs = self.beta_part(us, i)?;
            p.push(self.inst.ram.beta[i], coeffs);
        }
        let mut h = PolarForm::new();
        for k in 0..us.len() {
            h.push(-us[k], self.u_part(us, k)?);
        }
        Ok(OmegaParts { p, h })
    }

    /// Subsets `I_1 ⊊ I`, `I_1 ≠ ∅`, as bit masks.
    fn proper_subsets(m: usize) -> impl Iterator<Item = usize> {
        1..(1usize << m) - 1
    }

    fn pick(us: &[C64], mask: usize) -> Vec<C64> {
        us.iter().enumerate().filter(|(j, _)| mask >> j & 1 == 1).map(|(_, &u)| u).collect()
    }

    /// Principal part at `β_i`: the coefficient of `(z−β)^{−n−1}` is
    /// `Res_q (t^n − (σ(q)−β)^n) S(q)/D(q)` with `t = q − β`,
    /// `S = Σ F(I_1,q)F(I_2,σ(q))` and `D = 2(y(q)−y(σ(q)))R'(σ(q))`.
    fn beta_part(&self, us: &[C64], i: usize) -> Result<Vec<C64>> {
        let m = us.len();
        let cv = &self.inst.curve;
        let b = self.inst.ram.beta[i];
        let max_pole = 2 * m as i32 - 2;
        let trunc = max_pole + 6;
        let q = Series::variable(b, trunc);
        let sigma = self.inst.ram.galois_of(i, &q);
        let mut s = q.zero();
        for mask in Self::proper_subsets(m) {
            let f1 = self.lower(&Self::pick(us, mask))?.total();
            let f2 = self.lower(&Self::pick(us, !mask))?.total();
            s = s + f1.eval_in(&q) * f2.eval_in(&sigma);
        }
        let den = (cv.y(&q) - cv.y(&sigma)).scale_re(2.0) * cv.r_deriv(&sigma, 1);
        let ratio = s / den;
        if !ratio.is_finite() {
            return Err(Error::NonFinite(format!("kernel series at beta_{i}")));
        }
        let t = q.add_c(-b);
        let st = sigma.add_c(-b);
        let mut out = vec![];
        for n in 0..max_pole as usize {
            let w = (t.powi(n as i32) - st.powi(n as i32)) * ratio.clone();
            let r = w.residue().map_err(|_| Error::TruncationInsufficient { trunc, pole: max_pole })?;
            out.push(r);
        }
        while out.last().is_some_and(|x| x.norm() == 0.0) {
            out.pop();
        }
        Ok(out)
    }

    /// Principal part at `−u_k` after `d_{u_k}`.
    fn u_part(&self, us: &[C64], k: usize) -> Result<Vec<C64>> {
        let cv = &self.inst.curve;
        let rest: Vec<C64> = us.iter().enumerate().filter(|(j, _)| *j != k).map(|(_, &u)| u).collect();
        let proto: Jet1 = jet_zero();
        let u = jet_point(&proto, us[k], 0);
        let nmax = rest.len() + 1;
        let trunc = nmax as i32 + 4;
        let q = LaurentSeries::variable_at(us[k], u.clone(), trunc);
        let ru = lift(&q, &cv.r(&u));
        let rmu = lift(&q, &cv.r(&-u.clone()));
        let r1u = cv.r_deriv(&u, 1);
        let a = ru - cv.r(&q);
        let bden = rmu - cv.r(&-q.clone());
        let mut b: Vec<Jet1> = vec![proto.zero(); nmax + 1];
        for part in set_partitions(rest.len()) {
            let s = part.len();
            let weight = match self.conv {
                PartitionConvention::Set => 1.0,
                PartitionConvention::Ordered => factorial(s - 1),
            };
            let blocks: Vec<Vec<C64>> = part.iter().map(|bl| bl.iter().map(|&j| rest[j]).collect()).collect();
            for first in 0..s {
                let f1 = self.lower(&blocks[first])?.total();
                let mut num = -f1.eval_in(&-q.clone());
                let mut others = proto.one();
                for (r, bl) in blocks.iter().enumerate() {
                    if r != first {
                        others = others * self.lower(bl)?.total().eval_in(&u) / r1u.clone();
                    }
                }
                num = num * lift(&q, &others.scale_re(weight));
                let phi = num / (a.clone() * bden.powi(s as i32));
                if !phi.is_finite() {
                    return Err(Error::NonFinite(format!("K_u integrand at u_{k}")));
                }
                // b_n = (−1)^{n+1} Φ_{−n−1} for n ≥ 1; b_0 cancels.
                for (n, bn) in b.iter_mut().enumerate().skip(1) {
                    let c = phi.coeff(-(n as i32) - 1).map_err(|_| Error::TruncationInsufficient { trunc, pole: nmax as i32 })?;
                    let sign = if n % 2 == 0 { -1.0 } else { 1.0 };
                    *bn = bn.clone() + c.scale_re(sign);
                }
            }
        }
        Ok(d_u_polar(&b))
    }
}
