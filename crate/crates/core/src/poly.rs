//! Dense complex polynomials and simultaneous root finding (Aberth–Ehrlich).

use crate::error::{Error, Result};
use crate::series::C64;

/// Polynomial with coefficients in ascending powers.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly(pub Vec<C64>);

impl Poly {
    pub fn constant(c: C64) -> Self {
        Poly(vec![c])
    }

    /// `x + a`
    pub fn linear(a: C64) -> Self {
        Poly(vec![a, C64::new(1.0, 0.0)])
    }

    pub fn degree(&self) -> usize {
        self.0.iter().rposition(|c| *c != C64::new(0.0, 0.0)).unwrap_or(0)
    }

    pub fn eval(&self, x: C64) -> C64 {
        self.0.iter().rev().fold(C64::new(0.0, 0.0), |acc, c| acc * x + c)
    }

    pub fn derivative(&self) -> Poly {
        if self.0.len() <= 1 {
            return Poly(vec![C64::new(0.0, 0.0)]);
        }
        Poly(self.0.iter().enumerate().skip(1).map(|(k, c)| c * k as f64).collect())
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.0.len().max(other.0.len());
        let z = C64::new(0.0, 0.0);
        Poly((0..n).map(|k| self.0.get(k).copied().unwrap_or(z) + other.0.get(k).copied().unwrap_or(z)).collect())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = vec![C64::new(0.0, 0.0); self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in other.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly(out)
    }

    pub fn scale(&self, s: C64) -> Poly {
        Poly(self.0.iter().map(|c| c * s).collect())
    }

    /// Product of `(x + a_k)` over the given shifts.
    pub fn from_shifts(shifts: impl IntoIterator<Item = C64>) -> Poly {
        shifts.into_iter().fold(Poly::constant(C64::new(1.0, 0.0)), |p, a| p.mul(&Poly::linear(a)))
    }

    /// All roots, by Aberth–Ehrlich iteration from points on a circle.
    pub fn roots(&self) -> Result<Vec<C64>> {
        let n = self.degree();
        if n == 0 {
            return Ok(vec![]);
        }
        let lead = self.0[n];
        let monic: Vec<C64> = self.0[..=n].iter().map(|c| c / lead).collect();
        let p = Poly(monic);
        let dp = p.derivative();
        // Cauchy-type bound for the initial circle.
        let radius = 1.0 + p.0[..n].iter().map(|c| c.norm()).fold(0.0, f64::max);
        let mut z: Vec<C64> = (0..n)
            .map(|k| {
                let th = 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / n as f64 + 0.4;
                C64::from_polar(radius * 0.5, th)
            })
            .collect();
        for _ in 0..500 {
            let mut max_step: f64 = 0.0;
            for k in 0..n {
                let pk = p.eval(z[k]);
                if pk == C64::new(0.0, 0.0) {
                    continue;
                }
                let ratio = pk / dp.eval(z[k]);
                let s: C64 = (0..n).filter(|&j| j != k).map(|j| (z[k] - z[j]).inv()).sum();
                let w = ratio / (C64::new(1.0, 0.0) - ratio * s);
                if w.is_finite() {
                    z[k] -= w;
                    max_step = max_step.max(w.norm() / (1.0 + z[k].norm()));
                }
            }
            if max_step < 1e-15 {
                return Ok(z);
            }
        }
        let worst = z.iter().map(|x| p.eval(*x).norm()).fold(0.0, f64::max);
        if worst < 1e-9 {
            Ok(z)
        } else {
            Err(Error::RootFindingFailed(format!("Aberth iteration stalled, residual {worst:e}")))
        }
    }
}

/// Newton polishing of an approximate root of `f` with derivative `df`.
pub fn polish(mut x: C64, f: impl Fn(C64) -> C64, df: impl Fn(C64) -> C64, tol: f64) -> C64 {
    let mut best = x;
    let mut best_res = f(x).norm();
    for _ in 0..60 {
        let step = f(x) / df(x);
        if !step.is_finite() {
            break;
        }
        x -= step;
        let r = f(x).norm();
        if r < best_res {
            best = x;
            best_res = r;
        }
        if step.norm() <= tol * (1.0 + x.norm()) * 1e-3 {
            break;
        }
    }
    best
}

/// Orders complex numbers by real part, then imaginary part; real parts
/// equal up to rounding are treated as equal.
pub fn cmp_re_im(a: &C64, b: &C64) -> std::cmp::Ordering {
    let scale = 1.0 + a.norm().max(b.norm());
    if (a.re - b.re).abs() > 1e-9 * scale {
        a.re.partial_cmp(&b.re).unwrap_or(std::cmp::Ordering::Equal)
    } else {
        a.im.partial_cmp(&b.im).unwrap_or(std::cmp::Ordering::Equal)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roots_of_known_cubic() {
        let p = Poly::from_shifts([C64::new(-1.0, 0.0), C64::new(2.0, 1.0), C64::new(0.5, -3.0)]);
        let mut r = p.roots().unwrap();
        r.sort_by(cmp_re_im);
        let mut want = vec![C64::new(1.0, 0.0), C64::new(-2.0, -1.0), C64::new(-0.5, 3.0)];
        want.sort_by(cmp_re_im);
        for (a, b) in r.iter().zip(&want) {
            assert!((a - b).norm() < 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn double_root_is_found_twice() {
        let p = Poly::from_shifts([C64::new(1.0, 0.0), C64::new(1.0, 0.0), C64::new(-3.0, 0.0)]);
        let r = p.roots().unwrap();
        assert_eq!(r.iter().filter(|x| (**x + 1.0).norm() < 1e-6).count(), 2);
    }
}
