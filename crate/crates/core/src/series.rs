//! Truncated Laurent series about a complex center.
//!
//! Coefficients are generic over [`Scalar`], which is implemented both for
//! plain complex numbers and for series themselves. Nesting series inside
//! series gives multivariate jets: the outer variable is the expansion
//! variable of a residue, inner levels carry first-order perturbations of
//! marked points so that derivatives with respect to those points come out
//! as ordinary coefficients.
//!
//! Truncation bookkeeping: a series with `trunc = t` is valid through order
//! `t` inclusive. Constants are exact (`trunc = EXACT`). Products and
//! quotients propagate `trunc` by the usual rules, so a result never claims
//! more orders than its inputs justify.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Truncation order used for exact (polynomial-constant) series.
pub const EXACT: i32 = 1 << 28;
/// Default expansion order.
pub const DEFAULT_TRUNC: i32 = 12;
/// Relative threshold under which a sum counts as a cancellation.
pub const CANCEL_TOL: f64 = 1e-13;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Field-like values usable as series coefficients and as arguments of the
/// closed formulas of the model.
pub trait Scalar:
    Clone
    + fmt::Debug
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// Exact constant with the same shape as `self`.
    fn cst(&self, c: C64) -> Self;
    /// Largest coefficient magnitude (0 for an exact zero).
    fn magnitude(&self) -> f64;
    /// The order-zero part at every nesting level.
    fn value(&self) -> C64;
    fn scale(&self, c: C64) -> Self;
    fn recip(&self) -> Self;
    fn is_finite(&self) -> bool;
    /// Number of nested series levels.
    fn depth(&self) -> usize;
    /// The pure first-order variable of nesting level `level`.
    fn eps(&self, level: usize) -> Self;
    /// Coefficient at the given order of every nesting level.
    fn coeff_deep(&self, orders: &[i32]) -> C64;
    /// Zero template whose nesting levels have the given truncations.
    fn zero_template(truncs: &[i32]) -> Self;

    fn zero(&self) -> Self {
        self.cst(C64::new(0.0, 0.0))
    }
    fn one(&self) -> Self {
        self.cst(C64::new(1.0, 0.0))
    }
    fn is_zero(&self) -> bool {
        self.magnitude() == 0.0
    }
    fn scale_re(&self, x: f64) -> Self {
        self.scale(C64::new(x, 0.0))
    }
    fn add_c(&self, c: C64) -> Self {
        self.clone() + self.cst(c)
    }
    fn sub_from_c(&self, c: C64) -> Self {
        self.cst(c) - self.clone()
    }
    fn sq(&self) -> Self {
        self.clone() * self.clone()
    }
    fn powi(&self, n: i32) -> Self {
        if n < 0 {
            return self.recip().powi(-n);
        }
        let mut acc = self.one();
        let mut base = self.clone();
        let mut k = n as u32;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc * base.clone();
            }
            k >>= 1;
            if k > 0 {
                base = base.sq();
            }
        }
        acc
    }
}

impl Scalar for C64 {
    fn cst(&self, c: C64) -> Self {
        c
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
    fn value(&self) -> C64 {
        *self
    }
    fn scale(&self, c: C64) -> Self {
        self * c
    }
    fn recip(&self) -> Self {
        self.inv()
    }
    fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
    fn depth(&self) -> usize {
        0
    }
    fn eps(&self, _level: usize) -> Self {
        C64::new(f64::NAN, f64::NAN)
    }
    fn coeff_deep(&self, _orders: &[i32]) -> C64 {
        *self
    }
    fn zero_template(_truncs: &[i32]) -> Self {
        C64::new(0.0, 0.0)
    }
}

/// Truncated Laurent series `Σ coeffs[j] (z − center)^(ord_min + j)`, valid
/// through order `trunc`. Stored coefficients of finite-truncation series
/// always reach `trunc`; exact series store only their nonzero extent.
#[derive(Clone, PartialEq)]
pub struct LaurentSeries<C: Scalar = C64> {
    center: C64,
    ord_min: i32,
    trunc: i32,
    coeffs: Vec<C>,
    zero: C,
}

pub type Series = LaurentSeries<C64>;

fn clamp_trunc(t: i64) -> i32 {
    t.clamp(-(EXACT as i64), EXACT as i64) as i32
}

impl<C: Scalar> LaurentSeries<C> {
    /// Builds a series from raw parts and normalizes leading zeros.
    pub fn from_parts(center: C64, ord_min: i32, coeffs: Vec<C>, trunc: i32, zero: C) -> Self {
        let mut s = LaurentSeries { center, ord_min, trunc, coeffs, zero };
        s.fit();
        s
    }

    /// The zero series valid through `trunc`.
    pub fn zero_series(center: C64, trunc: i32, zero: C) -> Self {
        LaurentSeries { center, ord_min: trunc.saturating_add(1).min(EXACT), trunc, coeffs: vec![], zero }
    }

    /// Exact constant series.
    pub fn constant(center: C64, value: C) -> Self {
        let zero = value.zero();
        LaurentSeries::from_parts(center, 0, vec![value], EXACT, zero)
    }

    /// The coordinate `z = value + (z − center)` expanded about `center`,
    /// valid through `trunc`. `value` may itself be symbolic.
    pub fn variable_at(center: C64, value: C, trunc: i32) -> Self {
        let zero = value.zero();
        let one = value.one();
        LaurentSeries::from_parts(center, 0, vec![value, one], trunc.max(1), zero)
    }

    pub fn center(&self) -> C64 {
        self.center
    }
    pub fn ord_min(&self) -> i32 {
        self.ord_min
    }
    pub fn trunc(&self) -> i32 {
        self.trunc
    }
    pub fn is_exact(&self) -> bool {
        self.trunc >= EXACT
    }
    /// Stored coefficients, index `j` holding order `ord_min + j`.
    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }
    pub fn zero_coeff(&self) -> &C {
        &self.zero
    }
    pub fn is_zero_series(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficient of `(z − center)^n`; orders beyond `trunc` are unknown.
    pub fn coeff(&self, n: i32) -> Result<C> {
        if n > self.trunc {
            return Err(Error::OrderOutOfRange { order: n, ord_min: self.ord_min, trunc: self.trunc });
        }
        Ok(self.get(n).cloned().unwrap_or_else(|| self.zero.clone()))
    }

    /// Coefficient, zero for any order that is not stored.
    pub fn coeff_or_zero(&self, n: i32) -> C {
        self.get(n).cloned().unwrap_or_else(|| self.zero.clone())
    }

    fn get(&self, n: i32) -> Option<&C> {
        if n < self.ord_min {
            return None;
        }
        self.coeffs.get((n - self.ord_min) as usize)
    }

    /// Residue: the coefficient of `(z − center)^-1`.
    pub fn residue(&self) -> Result<C> {
        self.coeff(-1)
    }

    /// Drops leading zeros, pads finite series to `trunc`, trims trailing
    /// zeros of exact series.
    fn fit(&mut self) {
        let lead = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        if lead > 0 {
            self.coeffs.drain(..lead);
            self.ord_min += lead as i32;
        }
        if self.is_exact() {
            while self.coeffs.last().is_some_and(|c| c.is_zero()) {
                self.coeffs.pop();
            }
        } else {
            let want = (self.trunc as i64 - self.ord_min as i64 + 1).max(0) as usize;
            self.coeffs.truncate(want);
            while self.coeffs.len() < want && !self.coeffs.is_empty() {
                self.coeffs.push(self.zero.clone());
            }
        }
        if self.coeffs.is_empty() {
            self.ord_min = self.trunc.saturating_add(1).min(EXACT);
        }
    }

    /// Drops leading coefficients below `tol` times the largest magnitude.
    pub fn normalized(&self, tol: f64) -> Self {
        let max = self.coeffs.iter().map(|c| c.magnitude()).fold(0.0, f64::max);
        let mut out = self.clone();
        let lead = out.coeffs.iter().take_while(|c| c.magnitude() <= tol * max).count();
        out.coeffs.drain(..lead);
        out.ord_min += lead as i32;
        if out.coeffs.is_empty() {
            out.ord_min = out.trunc.saturating_add(1).min(EXACT);
        }
        out
    }

    /// Lowers the truncation order.
    pub fn truncated(&self, trunc: i32) -> Self {
        let mut out = self.clone();
        if trunc < out.trunc {
            out.trunc = trunc;
            out.fit();
        }
        out
    }

    fn check_center(&self, other: &Self) -> Result<()> {
        let tol = 1e-12 * (1.0 + self.center.norm());
        if (self.center - other.center).norm() > tol {
            return Err(Error::CenterMismatch(format!("{}", self.center), format!("{}", other.center)));
        }
        Ok(())
    }

    fn poisoned(&self) -> Self {
        let nan = self.zero.cst(C64::new(f64::NAN, f64::NAN));
        LaurentSeries { center: self.center, ord_min: 0, trunc: self.trunc.min(0), coeffs: vec![nan], zero: self.zero.clone() }
    }

    fn add_impl(&self, other: &Self, sign: f64) -> Self {
        let trunc = self.trunc.min(other.trunc);
        let top = |s: &Self| s.ord_min as i64 + s.coeffs.len() as i64 - 1;
        if other.coeffs.is_empty() {
            return self.truncated(trunc);
        }
        if self.coeffs.is_empty() {
            return other.scale_re(sign).truncated(trunc);
        }
        let lo = self.ord_min.min(other.ord_min);
        let hi: i64 = if trunc >= EXACT { top(self).max(top(other)) } else { trunc as i64 };
        if (lo as i64) > hi {
            return LaurentSeries::zero_series(self.center, trunc, self.zero.clone());
        }
        let mut coeffs = Vec::with_capacity((hi - lo as i64 + 1) as usize);
        let mut leading = true;
        let mut first = lo;
        for k in lo as i64..=hi {
            let k = k as i32;
            let a = self.get(k);
            let b = other.get(k);
            let (val, scale) = match (a, b) {
                (None, None) => (self.zero.clone(), 0.0),
                (Some(x), None) => (x.clone(), x.magnitude()),
                (None, Some(y)) => (y.scale_re(sign), y.magnitude()),
                (Some(x), Some(y)) => {
                    let v = if sign > 0.0 { x.clone() + y.clone() } else { x.clone() - y.clone() };
                    (v, x.magnitude().max(y.magnitude()))
                }
            };
            if leading {
                let m = val.magnitude();
                if m == 0.0 || m <= CANCEL_TOL * scale {
                    first = k + 1;
                    continue;
                }
                leading = false;
            }
            coeffs.push(val);
        }
        LaurentSeries::from_parts(self.center, first, coeffs, trunc, self.zero.clone())
    }

    fn mul_impl(&self, other: &Self) -> Self {
        let ord = self.ord_min as i64 + other.ord_min as i64;
        let trunc = clamp_trunc((self.ord_min as i64 + other.trunc as i64).min(other.ord_min as i64 + self.trunc as i64));
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return LaurentSeries::zero_series(self.center, trunc, self.zero.clone());
        }
        let n = if trunc >= EXACT {
            self.coeffs.len() + other.coeffs.len() - 1
        } else {
            (trunc as i64 - ord + 1).max(0) as usize
        };
        let mut coeffs = Vec::with_capacity(n);
        for k in 0..n {
            let mut acc: Option<C> = None;
            let i_lo = k.saturating_sub(other.coeffs.len() - 1);
            let i_hi = k.min(self.coeffs.len() - 1);
            for i in i_lo..=i_hi {
                let term = self.coeffs[i].clone() * other.coeffs[k - i].clone();
                acc = Some(match acc {
                    None => term,
                    Some(a) => a + term,
                });
            }
            coeffs.push(acc.unwrap_or_else(|| self.zero.clone()));
        }
        LaurentSeries::from_parts(self.center, ord as i32, coeffs, trunc, self.zero.clone())
    }

    fn recip_impl(&self) -> Option<Self> {
        if self.coeffs.is_empty() {
            return None;
        }
        let ord = -self.ord_min;
        let rel = if self.is_exact() {
            if self.coeffs.len() == 1 {
                0
            } else {
                DEFAULT_TRUNC as i64 + self.coeffs.len() as i64
            }
        } else {
            self.trunc as i64 - self.ord_min as i64
        };
        let trunc = if self.is_exact() && self.coeffs.len() == 1 { EXACT } else { clamp_trunc(ord as i64 + rel) };
        let r0 = self.coeffs[0].recip();
        let mut r: Vec<C> = vec![r0.clone()];
        for n in 1..=rel as usize {
            let mut acc: Option<C> = None;
            for i in 1..=n.min(self.coeffs.len() - 1) {
                let term = self.coeffs[i].clone() * r[n - i].clone();
                acc = Some(match acc {
                    None => term,
                    Some(a) => a + term,
                });
            }
            let v = match acc {
                None => self.zero.clone(),
                Some(a) => -(r0.clone() * a),
            };
            r.push(v);
        }
        Some(LaurentSeries::from_parts(self.center, ord, r, trunc, self.zero.clone()))
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_center(other)?;
        Ok(self.add_impl(other, 1.0))
    }
    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check_center(other)?;
        Ok(self.add_impl(other, -1.0))
    }
    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_center(other)?;
        Ok(self.mul_impl(other))
    }
    pub fn try_div(&self, other: &Self) -> Result<Self> {
        self.check_center(other)?;
        let r = other.recip_impl().ok_or(Error::DivisionByZeroSeries)?;
        Ok(self.mul_impl(&r))
    }
    pub fn try_recip(&self) -> Result<Self> {
        self.recip_impl().ok_or(Error::DivisionByZeroSeries)
    }

    /// Term-wise derivative with respect to the expansion variable.
    pub fn derivative(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(j, a)| a.scale_re((self.ord_min + j as i32) as f64))
            .collect();
        let trunc = if self.is_exact() { EXACT } else { self.trunc - 1 };
        LaurentSeries::from_parts(self.center, self.ord_min - 1, coeffs, trunc, self.zero.clone())
    }

    /// Multiplies by `(z − center)^k`.
    pub fn shift(&self, k: i32) -> Self {
        let trunc = if self.is_exact() { EXACT } else { self.trunc + k };
        LaurentSeries { center: self.center, ord_min: self.ord_min + k, trunc, coeffs: self.coeffs.clone(), zero: self.zero.clone() }
    }

    /// Applies `f` to every coefficient.
    pub fn map_coeffs(&self, f: impl Fn(&C) -> C) -> Self {
        let coeffs = self.coeffs.iter().map(f).collect();
        LaurentSeries::from_parts(self.center, self.ord_min, coeffs, self.trunc, self.zero.clone())
    }

    /// Formal substitution `self(inner(q))`. The constant term of `inner`
    /// must equal `self.center`; the result is expanded about `inner`'s center.
    pub fn compose(&self, inner: &Self) -> Result<Self> {
        let c0 = inner.coeff_or_zero(0).value();
        if inner.ord_min < 0 || (c0 - self.center).norm() > 1e-9 * (1.0 + self.center.norm()) {
            return Err(Error::IncompatibleSubstitution { inner: format!("{c0}"), outer: format!("{}", self.center) });
        }
        let h = inner.clone() - inner.cst(self.center);
        if h.is_zero_series() {
            return Err(Error::IncompatibleSubstitution { inner: "constant".into(), outer: format!("{}", self.center) });
        }
        let v = h.ord_min as i64;
        let mut acc = LaurentSeries::zero_series(inner.center, EXACT, inner.zero.clone());
        if self.coeffs.is_empty() {
            let t = if self.is_exact() { EXACT } else { clamp_trunc(v * (self.trunc as i64 + 1) - 1) };
            return Ok(LaurentSeries::zero_series(inner.center, t.min(inner.trunc.max(0)), inner.zero.clone()));
        }
        let top = self.ord_min + self.coeffs.len() as i32 - 1;
        // Horner in h, starting from the highest stored order.
        for n in (self.ord_min..=top).rev() {
            let a = self.coeff_or_zero(n);
            let lifted = LaurentSeries::constant(inner.center, a);
            acc = if n == top { lifted } else { acc * h.clone() + lifted };
        }
        if self.ord_min != 0 {
            acc = acc * h.powi(self.ord_min);
        }
        if !self.is_exact() {
            let cap = clamp_trunc(v * (self.trunc as i64 + 1) - 1);
            if cap < acc.trunc {
                acc = acc.truncated(cap);
            }
        }
        Ok(acc)
    }
}

impl LaurentSeries<C64> {
    /// Builds a complex series from coefficients starting at `ord_min`.
    pub fn from_coeffs(center: C64, ord_min: i32, coeffs: Vec<C64>, trunc: i32) -> Self {
        LaurentSeries::from_parts(center, ord_min, coeffs, trunc, C64::new(0.0, 0.0))
    }

    /// The coordinate about `center`, valid through `trunc`.
    pub fn variable(center: C64, trunc: i32) -> Self {
        LaurentSeries::variable_at(center, center, trunc)
    }

    /// Sums the stored terms at `z`.
    pub fn eval(&self, z: C64) -> C64 {
        let h = z - self.center;
        self.coeffs.iter().enumerate().map(|(j, a)| a * h.powi(self.ord_min + j as i32)).sum()
    }
}

impl<C: Scalar> fmt::Debug for LaurentSeries<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Series[c={}, ord={}, trunc={}](", self.center, self.ord_min, if self.is_exact() { "exact".to_string() } else { self.trunc.to_string() })?;
        for (j, a) in self.coeffs.iter().enumerate() {
            if j > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{:?}", a)?;
        }
        write!(f, ")")
    }
}

impl<C: Scalar> Scalar for LaurentSeries<C> {
    fn cst(&self, c: C64) -> Self {
        LaurentSeries::from_parts(self.center, 0, vec![self.zero.cst(c)], EXACT, self.zero.clone())
    }
    fn magnitude(&self) -> f64 {
        self.coeffs.iter().map(|c| c.magnitude()).fold(0.0, f64::max)
    }
    fn value(&self) -> C64 {
        if self.coeffs.is_empty() || self.ord_min > 0 {
            return C64::new(0.0, 0.0);
        }
        if self.ord_min < 0 {
            return C64::new(f64::NAN, f64::NAN);
        }
        self.coeffs[0].value()
    }
    fn scale(&self, c: C64) -> Self {
        self.map_coeffs(|a| a.scale(c))
    }
    fn recip(&self) -> Self {
        self.recip_impl().unwrap_or_else(|| self.poisoned())
    }
    fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_finite())
    }
    fn depth(&self) -> usize {
        1 + self.zero.depth()
    }
    fn eps(&self, level: usize) -> Self {
        if level == 0 {
            let one = self.zero.cst(C64::new(1.0, 0.0));
            LaurentSeries::from_parts(self.center, 1, vec![one], self.trunc.max(1), self.zero.clone())
        } else {
            LaurentSeries::from_parts(self.center, 0, vec![self.zero.eps(level - 1)], EXACT, self.zero.clone())
        }
    }
    fn coeff_deep(&self, orders: &[i32]) -> C64 {
        match orders.split_first() {
            None => self.value(),
            Some((&n, rest)) => match self.get(n) {
                Some(a) => a.coeff_deep(rest),
                None => C64::new(0.0, 0.0),
            },
        }
    }
    fn zero_template(truncs: &[i32]) -> Self {
        let (t, rest) = truncs.split_first().map(|(t, r)| (*t, r)).unwrap_or((EXACT, &[]));
        LaurentSeries::zero_series(C64::new(0.0, 0.0), t, C::zero_template(rest))
    }
}

macro_rules! series_op {
    ($tr:ident, $m:ident, $body:expr) => {
        impl<C: Scalar> $tr for LaurentSeries<C> {
            type Output = LaurentSeries<C>;
            fn $m(self, rhs: Self) -> Self {
                $body(&self, &rhs)
            }
        }
        impl<'a, C: Scalar> $tr<&'a LaurentSeries<C>> for &'a LaurentSeries<C> {
            type Output = LaurentSeries<C>;
            fn $m(self, rhs: Self) -> LaurentSeries<C> {
                $body(self, rhs)
            }
        }
    };
}

fn op_add<C: Scalar>(a: &LaurentSeries<C>, b: &LaurentSeries<C>) -> LaurentSeries<C> {
    a.try_add(b).expect("series add")
}
fn op_sub<C: Scalar>(a: &LaurentSeries<C>, b: &LaurentSeries<C>) -> LaurentSeries<C> {
    a.try_sub(b).expect("series sub")
}
fn op_mul<C: Scalar>(a: &LaurentSeries<C>, b: &LaurentSeries<C>) -> LaurentSeries<C> {
    a.try_mul(b).expect("series mul")
}
fn op_div<C: Scalar>(a: &LaurentSeries<C>, b: &LaurentSeries<C>) -> LaurentSeries<C> {
    a.check_center(b).expect("series div");
    match b.recip_impl() {
        Some(r) => a.mul_impl(&r),
        None => a.poisoned(),
    }
}

series_op!(Add, add, op_add);
series_op!(Sub, sub, op_sub);
series_op!(Mul, mul, op_mul);
series_op!(Div, div, op_div);

impl<C: Scalar> Neg for LaurentSeries<C> {
    type Output = LaurentSeries<C>;
    fn neg(self) -> Self {
        self.map_coeffs(|a| -a.clone())
    }
}

/// First-order jets in `n` independent perturbation parameters, one
/// nesting level each.
pub type Jet1 = LaurentSeries<C64>;
pub type Jet2 = LaurentSeries<Jet1>;
pub type Jet3 = LaurentSeries<Jet2>;
pub type Jet4 = LaurentSeries<Jet3>;

/// Zero of a jet type whose levels are all truncated at order 1.
pub fn jet_zero<S: Scalar>() -> S {
    S::zero_template(&[1, 1, 1, 1, 1, 1])
}

/// `x0 + ε_level` inside the jet type of `proto`.
pub fn jet_point<S: Scalar>(proto: &S, x0: C64, level: usize) -> S {
    proto.cst(x0) + proto.eps(level)
}

/// Mixed first derivative in every level listed in `levels`, evaluated at the base point.
pub fn jet_derivative<S: Scalar>(x: &S, levels: &[usize]) -> C64 {
    let mut orders = vec![0; x.depth()];
    for &l in levels {
        orders[l] = 1;
    }
    x.coeff_deep(&orders)
}

/// Expands `f` about a (possibly symbolic) point and returns the residue.
pub fn residue_at<S: Scalar>(
    center: C64,
    value: &S,
    trunc: i32,
    f: impl Fn(&LaurentSeries<S>) -> LaurentSeries<S>,
) -> Result<S> {
    let q = LaurentSeries::variable_at(center, value.clone(), trunc);
    let s = f(&q);
    if !s.is_finite() {
        return Err(Error::NonFinite("residue integrand".into()));
    }
    s.residue()
}

/// Value of `f` at a (possibly symbolic) point as the limit of its local
/// expansion; fails if the expansion has a genuine pole.
pub fn limit_at<S: Scalar>(
    center: C64,
    value: &S,
    trunc: i32,
    f: impl Fn(&LaurentSeries<S>) -> LaurentSeries<S>,
) -> Result<S> {
    let q = LaurentSeries::variable_at(center, value.clone(), trunc);
    let s = f(&q);
    if !s.is_finite() {
        return Err(Error::NonFinite("limit expansion".into()));
    }
    let pole: f64 = (s.ord_min()..0).map(|n| s.coeff_or_zero(n).magnitude()).fold(0.0, f64::max);
    let scale = (0..=2).map(|n| s.coeff_or_zero(n).magnitude()).fold(1e-300, f64::max);
    if pole > 1e-6 * scale {
        return Err(Error::NearPole(format!("limit at {center} has a pole of size {pole:e}")));
    }
    s.coeff(0)
}
