//! Rational functions of one variable stored as principal parts,
//! `f(z) = Σ_poles Σ_n a_n (z − c)^{−n−1}`.
//!
//! Every ω-route in the crate produces its result in this shape: the form
//! coefficient of `ω_{g,m+1}(…, z)` vanishes at `z = ∞` and is determined by
//! its principal parts.

use crate::series::{LaurentSeries, Scalar, C64};

#[derive(Clone, Debug)]
pub struct Pole<S> {
    pub center: S,
    /// `coeffs[n]` multiplies `(z − center)^{−n−1}`.
    pub coeffs: Vec<S>,
}

#[derive(Clone, Debug, Default)]
pub struct PolarForm<S> {
    pub poles: Vec<Pole<S>>,
}

impl<S: Scalar> PolarForm<S> {
    pub fn new() -> Self {
        PolarForm { poles: vec![] }
    }

    pub fn push(&mut self, center: S, coeffs: Vec<S>) {
        if !coeffs.is_empty() {
            self.poles.push(Pole { center, coeffs });
        }
    }

    pub fn extend(&mut self, other: PolarForm<S>) {
        self.poles.extend(other.poles);
    }

    pub fn scale(&self, k: C64) -> Self {
        PolarForm {
            poles: self.poles.iter().map(|p| Pole { center: p.center.clone(), coeffs: p.coeffs.iter().map(|a| a.scale(k)).collect() }).collect(),
        }
    }

    pub fn max_order(&self) -> usize {
        self.poles.iter().map(|p| p.coeffs.len()).max().unwrap_or(0)
    }

    /// Value at a point of the same scalar type.
    pub fn eval(&self, z: &S) -> S {
        let mut acc = z.zero();
        for p in &self.poles {
            let inv = (z.clone() - p.center.clone()).recip();
            let mut pw = inv.clone();
            for a in &p.coeffs {
                acc = acc + a.clone() * pw.clone();
                pw = pw * inv.clone();
            }
        }
        acc
    }

    /// Value at a local series whose coefficients have this scalar type.
    pub fn eval_series(&self, z: &LaurentSeries<S>) -> LaurentSeries<S> {
        let lift = |s: &S| LaurentSeries::constant(z.center(), s.clone());
        let mut acc = z.zero();
        for p in &self.poles {
            let inv = (z.clone() - lift(&p.center)).recip();
            let mut pw = inv.clone();
            for a in &p.coeffs {
                acc = acc + lift(a) * pw.clone();
                pw = pw * inv.clone();
            }
        }
        acc
    }

    /// Applies `f` to every center and coefficient.
    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> PolarForm<T> {
        PolarForm { poles: self.poles.iter().map(|p| Pole { center: f(&p.center), coeffs: p.coeffs.iter().map(&f).collect() }).collect() }
    }
}

impl PolarForm<C64> {
    /// Value at any scalar type, numeric data lifted as constants.
    pub fn eval_in<T: Scalar>(&self, z: &T) -> T {
        let mut acc = z.zero();
        for p in &self.poles {
            let inv = z.add_c(-p.center).recip();
            let mut pw = inv.clone();
            for a in &p.coeffs {
                acc = acc + pw.scale(*a);
                pw = pw * inv.clone();
            }
        }
        acc
    }

    /// Principal part at the pole nearest to `c`, if within `tol`.
    pub fn principal_part_at(&self, c: C64, tol: f64) -> Vec<C64> {
        let mut out: Vec<C64> = vec![];
        for p in self.poles.iter().filter(|p| (p.center - c).norm() < tol) {
            if out.len() < p.coeffs.len() {
                out.resize(p.coeffs.len(), C64::new(0.0, 0.0));
            }
            for (o, a) in out.iter_mut().zip(&p.coeffs) {
                *o += a;
            }
        }
        out
    }

    /// The same form with the poles near `c` removed.
    pub fn without_poles_near(&self, c: C64, tol: f64) -> Self {
        PolarForm { poles: self.poles.iter().filter(|p| (p.center - c).norm() >= tol).cloned().collect() }
    }
}

/// Local derivative of a scalar expression in one argument: evaluates `f`
/// on `u + t` with coefficients of type `T` and returns the `t`-coefficient.
pub fn d_at<T: Scalar>(u: &T, f: impl Fn(&LaurentSeries<T>) -> LaurentSeries<T>) -> T {
    let s = LaurentSeries::variable_at(u.value(), u.clone(), 1);
    f(&s).coeff_or_zero(1)
}

/// `x` lifted as an exact constant into the series type of `like`.
pub fn lift<T: Scalar>(like: &LaurentSeries<T>, x: &T) -> LaurentSeries<T> {
    LaurentSeries::constant(like.center(), x.clone())
}
