//! Perturbative cross-check of the planar two-point function: the
//! Dyson-Schwinger equation iterated in powers of `λ` against the
//! `λ`-expansion of the closed-form solution at the points `ε_p`.
//!
//! Only finite tables and `λ`-coefficients are manipulated here; neither
//! route goes through the numerically solved curve.

use std::fmt::Write as _;
use std::ops::{Add, Div, Mul, Sub};

use num::{BigRational, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::fmt_fixed;
use crate::series::{c, Scalar, Series};
use crate::spectral_curve::{solve_curve, ModelData};
use crate::trec::Instance;

pub const MAX_ORDER: usize = 8;

/// `entries[p][q][t]` is the coefficient of `λᵗ` in `G⁽⁰⁾_{pq}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LambdaSeriesTable {
    pub order: usize,
    pub entries: Vec<Vec<Vec<f64>>>,
}

impl LambdaSeriesTable {
    pub fn d(&self) -> usize {
        self.entries.len()
    }

    /// Truncated sum at a given coupling.
    pub fn eval(&self, p: usize, q: usize, lambda: f64) -> f64 {
        self.entries[p][q].iter().rev().fold(0.0, |acc, c| acc * lambda + c)
    }

    /// Largest `|c_t(p,q) − c_t(q,p)|`.
    pub fn asymmetry(&self) -> f64 {
        let d = self.d();
        let mut worst: f64 = 0.0;
        for p in 0..d {
            for q in 0..d {
                for t in 0..=self.order {
                    worst = worst.max((self.entries[p][q][t] - self.entries[q][p][t]).abs());
                }
            }
        }
        worst
    }

    /// Largest per-coefficient difference to another table of the same shape.
    pub fn max_diff(&self, other: &Self) -> f64 {
        let mut worst: f64 = 0.0;
        for (a, b) in self.entries.iter().flatten().zip(other.entries.iter().flatten()) {
            for (x, y) in a.iter().zip(b) {
                worst = worst.max((x - y).abs());
            }
        }
        worst
    }
}

fn check_order(order: usize) -> Result<()> {
    if order > MAX_ORDER {
        return Err(Error::UnsupportedCase(format!("lambda order {order} > {MAX_ORDER}")));
    }
    Ok(())
}

fn check_simple(model: &ModelData) -> Result<()> {
    if model.r.iter().any(|&r| r != 1) {
        return Err(Error::UnsupportedCase("the iteration needs all multiplicities 1".into()));
    }
    Ok(())
}

/// Arithmetic the iteration needs; `f64` for the floating mode and
/// `BigRational` for the exact one.
pub trait Field: Clone + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Div<Output = Self> {
    fn from_f64(x: f64) -> Self;
    fn to_f64(&self) -> f64;
}

impl Field for f64 {
    fn from_f64(x: f64) -> Self {
        x
    }
    fn to_f64(&self) -> f64 {
        *self
    }
}

impl Field for BigRational {
    fn from_f64(x: f64) -> Self {
        BigRational::from_float(x).expect("finite eigenvalue")
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

/// Order-by-order solution of the restricted equation
/// `(e_p+e_q)G_pq = 1 − λ G_pq (1/N)Σ_k G_pk + (λ/N)Σ_{l≠p} (G_lq − G_pq)/(e_l − e_p)`,
/// i.e. the discrete equation with the `1/N`-suppressed terms dropped. For
/// finite `N` this is not the genus-zero equation; see [`planar_dse_iterate_in`].
pub fn restricted_dse_iterate_in<T: Field>(model: &ModelData, order: usize) -> Result<Vec<Vec<Vec<T>>>> {
    check_order(order)?;
    check_simple(model)?;
    let d = model.d;
    let e: Vec<T> = model.e.iter().map(|&x| T::from_f64(x)).collect();
    let zero = T::from_f64(0.0);
    let inv_n = T::from_f64(1.0) / T::from_f64(model.n as f64);
    let mut c: Vec<Vec<Vec<T>>> = vec![vec![vec![]; d]; d];
    for t in 0..=order {
        let mut next = vec![vec![zero.clone(); d]; d];
        for p in 0..d {
            for q in 0..d {
                let mut rhs = if t == 0 { T::from_f64(1.0) } else { zero.clone() };
                if t >= 1 {
                    for a in 0..t {
                        let mut s = zero.clone();
                        for k in 0..d {
                            s = s + c[p][k][t - 1 - a].clone();
                        }
                        rhs = rhs - c[p][q][a].clone() * s * inv_n.clone();
                    }
                    for l in (0..d).filter(|&l| l != p) {
                        let diff = c[l][q][t - 1].clone() - c[p][q][t - 1].clone();
                        rhs = rhs + diff / (e[l].clone() - e[p].clone()) * inv_n.clone();
                    }
                }
                next[p][q] = rhs / (e[p].clone() + e[q].clone());
            }
        }
        for p in 0..d {
            for q in 0..d {
                c[p][q].push(next[p][q].clone());
            }
        }
    }
    Ok(c)
}

pub fn planar_dse_iterate_restricted(model: &ModelData, order: usize) -> Result<LambdaSeriesTable> {
    Ok(LambdaSeriesTable { order, entries: restricted_dse_iterate_in::<f64>(model, order)? })
}

/// Truncated product of two Taylor jets.
fn jet_mul<T: Field>(a: &[T], b: &[T], len: usize, zero: &T) -> Vec<T> {
    (0..len)
        .map(|n| {
            let mut acc = zero.clone();
            for i in 0..=n {
                if i < a.len() && n - i < b.len() {
                    acc = acc + a[i].clone() * b[n - i].clone();
                }
            }
            acc
        })
        .collect()
}

/// Taylor coefficients of `1/(a + s)` in `s`.
fn jet_inv_shift<T: Field>(a: &T, len: usize) -> Vec<T> {
    let one = T::from_f64(1.0);
    let mut out = vec![];
    let mut pw = one.clone() / a.clone();
    for _ in 0..len {
        out.push(pw.clone());
        pw = T::from_f64(0.0) - pw / a.clone();
    }
    out
}

/// Order-by-order solution of the genus-zero equation at `ζ` near `e_p`,
/// `η = e_q`:
/// `(ζ+η)G(ζ,η) = 1 − λG(ζ,η)(1/N)Σ_k r_k G(ζ,e_k) + (λ/N)Σ_k r_k (G(e_k,η) − G(ζ,η))/(e_k − ζ)`.
/// The `k = p` term is a derivative at `ζ = e_p`, so every entry is carried as
/// a Taylor jet in `ζ − e_p`; order `t` needs `L − t + 1` jet coefficients.
/// Returns the jets, `jets[t][p][q]`.
pub fn planar_dse_iterate_in<T: Field>(model: &ModelData, order: usize) -> Result<Vec<Vec<Vec<Vec<T>>>>> {
    check_order(order)?;
    let d = model.d;
    let e: Vec<T> = model.e.iter().map(|&x| T::from_f64(x)).collect();
    let r: Vec<T> = model.r.iter().map(|&x| T::from_f64(x as f64)).collect();
    let zero = T::from_f64(0.0);
    let inv_n = T::from_f64(1.0) / T::from_f64(model.n as f64);
    let mut jets: Vec<Vec<Vec<Vec<T>>>> = vec![];
    for t in 0..=order {
        let len = order - t + 1;
        let mut layer = vec![vec![vec![]; d]; d];
        for p in 0..d {
            for q in 0..d {
                let mut rhs = vec![zero.clone(); len];
                if t == 0 {
                    rhs[0] = T::from_f64(1.0);
                } else {
                    for a in 0..t {
                        let b = t - 1 - a;
                        let mut s = vec![zero.clone(); len];
                        for k in 0..d {
                            let term: Vec<T> = jets[b][p][k].iter().take(len).map(|x| x.clone() * r[k].clone()).collect();
                            s = s.iter().zip(term.iter().chain(std::iter::repeat(&zero))).map(|(x, y)| x.clone() + y.clone()).collect();
                        }
                        let prod = jet_mul(&jets[a][p][q], &s, len, &zero);
                        for (x, y) in rhs.iter_mut().zip(prod) {
                            *x = x.clone() - y * inv_n.clone();
                        }
                    }
                    let prev = &jets[t - 1][p][q];
                    for k in 0..d {
                        let dk: Vec<T> = if k == p {
                            // (G(e_p) − G(ζ))/(e_p − ζ) = Σ_{n≥1} g_n s^{n−1}
                            prev[1..=len].to_vec()
                        } else {
                            let mut num: Vec<T> = prev.iter().take(len).map(|x| zero.clone() - x.clone()).collect();
                            num[0] = num[0].clone() + jets[t - 1][k][q][0].clone();
                            // 1/(e_k − ζ) = 1/((e_k − e_p) − s)
                            let inv: Vec<T> = jet_inv_shift(&(e[k].clone() - e[p].clone()), len)
                                .into_iter()
                                .enumerate()
                                .map(|(n, x)| if n % 2 == 1 { zero.clone() - x } else { x })
                                .collect();
                            jet_mul(&num, &inv, len, &zero)
                        };
                        for (x, y) in rhs.iter_mut().zip(dk) {
                            *x = x.clone() + y * r[k].clone() * inv_n.clone();
                        }
                    }
                }
                layer[p][q] = jet_mul(&rhs, &jet_inv_shift(&(e[p].clone() + e[q].clone()), len), len, &zero);
            }
        }
        jets.push(layer);
    }
    Ok(jets)
}

fn table_from_jets<T: Field>(jets: &[Vec<Vec<Vec<T>>>], order: usize) -> LambdaSeriesTable {
    let d = jets.first().map_or(0, |l| l.len());
    let entries = (0..d).map(|p| (0..d).map(|q| (0..=order).map(|t| jets[t][p][q][0].to_f64()).collect()).collect()).collect();
    LambdaSeriesTable { order, entries }
}

/// `λ`-coefficients of `G⁽⁰⁾(e_p, e_q)` from the genus-zero equation.
pub fn planar_dse_iterate(model: &ModelData, order: usize) -> Result<LambdaSeriesTable> {
    Ok(table_from_jets(&planar_dse_iterate_in::<f64>(model, order)?, order))
}

/// The same iteration in exact rational arithmetic (the `e_k` taken at
/// their binary values), rounded at the end.
pub fn planar_dse_iterate_exact(model: &ModelData, order: usize) -> Result<LambdaSeriesTable> {
    Ok(table_from_jets(&planar_dse_iterate_in::<BigRational>(model, order)?, order))
}

/// `ε_k(λ)` and `ϱ_k(λ)` as `λ`-series, from `R(ε_k) = e_k` and
/// `ϱ_k R'(ε_k) = r_k` by fixed-point iteration (each sweep fixes one more
/// order).
pub fn curve_lambda_series(model: &ModelData, order: usize) -> (Vec<Series>, Vec<Series>) {
    let d = model.d;
    let lam = Series::variable(c(0.0, 0.0), order as i32);
    let ln = lam.scale_re(1.0 / model.n as f64);
    let cst = |x: f64| lam.cst(c(x, 0.0));
    let mut eps: Vec<Series> = model.e.iter().map(|&x| cst(x)).collect();
    let mut rho: Vec<Series> = model.r.iter().map(|&r| cst(r as f64)).collect();
    for _ in 0..=order {
        let mut ne = vec![];
        let mut nr = vec![];
        for k in 0..d {
            let mut s1 = lam.zero();
            let mut s2 = lam.zero();
            for j in 0..d {
                let inv = (eps[j].clone() + eps[k].clone()).recip();
                s1 = s1 + rho[j].clone() * inv.clone();
                s2 = s2 + rho[j].clone() * inv.sq();
            }
            ne.push(cst(model.e[k]) + ln.clone() * s1);
            nr.push(cst(model.r[k] as f64) / (ln.clone() * s2).add_c(c(1.0, 0.0)));
        }
        eps = ne;
        rho = nr;
    }
    (eps, rho)
}

/// `x_j` in `ε̂_q^j = −ε_j + λ x_j`, the other preimages of `e_q`.
fn hat_offsets(model: &ModelData, eps: &[Series], rho: &[Series], q: usize, order: usize) -> Vec<Series> {
    let d = model.d;
    let n = model.n as f64;
    let lam = Series::variable(c(0.0, 0.0), order as i32);
    let mut out = vec![];
    for j in 0..d {
        // x = ϱ_j / (N(−ε_j − e_q + λx − (λ/N)Σ_{i≠j} ϱ_i/(ε_i − ε_j + λx)))
        let mut x = lam.zero();
        for _ in 0..=order {
            let lx = lam.clone() * x.clone();
            let mut s = lam.zero();
            for i in (0..d).filter(|&i| i != j) {
                s = s + rho[i].clone() / (eps[i].clone() - eps[j].clone() + lx.clone());
            }
            let den = (lx - eps[j].clone() - lam.scale_re(1.0 / n) * s).add_c(c(-model.e[q], 0.0));
            x = rho[j].clone() / den.scale_re(n);
        }
        out.push(x);
    }
    out
}

/// `λ`-expansion of `𝒢⁽⁰⁾(ε_p, ε_q)`. At `z = ε_p` the factor
/// `(R(z) − R(−ε̂_q^p))/(R(z) − e_p)` of the product form is singular while
/// `1/(R(ε_q) − R(−z))` vanishes; their product tends to
/// `−N (e_p − R(−ε̂_q^p)) / (λ r_p)`, and the `1/λ` is cancelled analytically.
pub fn closed_form_lambda_expand(model: &ModelData, order: usize) -> Result<LambdaSeriesTable> {
    check_order(order)?;
    let d = model.d;
    let n = model.n as f64;
    let (eps, rho) = curve_lambda_series(model, order);
    let lam = Series::variable(c(0.0, 0.0), order as i32);
    let ln = lam.scale_re(1.0 / n);
    // R at a λ-series point
    let r_at = |v: &Series| {
        let mut s = lam.zero();
        for i in 0..d {
            s = s + rho[i].clone() / (eps[i].clone() + v.clone());
        }
        v.clone() - ln.clone() * s
    };
    let mut entries = vec![vec![vec![]; d]; d];
    for q in 0..d {
        let x = hat_offsets(model, &eps, &rho, q, order);
        for p in 0..d {
            // (e_p − R(−ε̂_q^p))/λ, expanded without cancellation
            let lx = lam.clone() * x[p].clone();
            let mut s = lam.zero();
            for i in 0..d {
                let a = eps[i].clone() + eps[p].clone();
                s = s + rho[i].clone() / ((a.clone() - lx.clone()) * a);
            }
            let dp = x[p].clone() * (ln.clone() * s).add_c(c(1.0, 0.0));
            let mut g = dp.scale_re(-n / model.r[p] as f64);
            for k in (0..d).filter(|&k| k != p) {
                let minus_hat = eps[k].clone() - lam.clone() * x[k].clone();
                let num = r_at(&minus_hat).sub_from_c(c(model.e[p], 0.0));
                g = g * num.scale_re(1.0 / (model.e[p] - model.e[k]));
            }
            if !g.is_finite() {
                return Err(Error::NonFinite(format!("closed form at ({p},{q})")));
            }
            entries[p][q] = (0..=order as i32).map(|t| g.coeff_or_zero(t).re).collect();
        }
    }
    Ok(LambdaSeriesTable { order, entries })
}

/// One row of the comparison CSV.
#[derive(Clone, Debug, PartialEq)]
pub struct ComparisonRow {
    pub p: usize,
    pub q: usize,
    pub order: usize,
    pub dse: f64,
    pub closed: f64,
}

pub fn compare(dse: &LambdaSeriesTable, closed: &LambdaSeriesTable) -> Vec<ComparisonRow> {
    let mut rows = vec![];
    for p in 0..dse.d() {
        for q in 0..dse.d() {
            for t in 0..=dse.order.min(closed.order) {
                rows.push(ComparisonRow { p, q, order: t, dse: dse.entries[p][q][t], closed: closed.entries[p][q][t] });
            }
        }
    }
    rows
}

pub fn comparison_csv(rows: &[ComparisonRow]) -> String {
    let mut out = String::from("p,q,order,dse_coeff,closedform_coeff,abs_diff\n");
    for r in rows {
        let _ = writeln!(out, "{},{},{},{},{},{}", r.p, r.q, r.order, fmt_fixed(r.dse), fmt_fixed(r.closed), fmt_fixed((r.dse - r.closed).abs()));
    }
    out
}

/// Estimated exponent `a` in `|𝒢(ε_p,ε_q)(λ) − Σ_{t≤L} c_t λᵗ| ~ λᵃ` from the
/// errors at `λ` and `λ/2`, with `𝒢` from the numerically solved curve.
pub fn ratio_test(model: &ModelData, table: &LambdaSeriesTable, lambda: f64) -> Result<Vec<Vec<f64>>> {
    let d = model.d;
    let mut err = vec![];
    for l in [lambda, lambda / 2.0] {
        let m = ModelData::new(model.e.clone(), model.r.clone(), l)?;
        let inst = Instance::new(&solve_curve(&m, 1e-13, 10)?)?;
        let mut e = vec![vec![0.0; d]; d];
        for p in 0..d {
            for q in 0..d {
                e[p][q] = (inst.pd.g_eps[p][q].re - table.eval(p, q, l)).abs();
            }
        }
        err.push(e);
    }
    Ok((0..d).map(|p| (0..d).map(|q| (err[0][p][q] / err[1][p][q]).log2()).collect()).collect())
}
