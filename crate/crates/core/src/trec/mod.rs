//! Recursion for the differentials `ω_{g,m}`: closed formulas for the first
//! cases, the generic planar residue engine, the generalised two-point
//! functions and the independent elimination route.
//!
//! Internally every route returns the coefficient `F` of `∏ dz_j` of the
//! differential as a [`PolarForm`] in the last variable `z`, split into the
//! part with poles at the ramification points (`p`) and the rest (`h`).
//! The normalized value `Ω⁽ᵍ⁾_m = λ^{2g+m−2} F / ∏ R'(z_j)` is formed only
//! when a [`FormValue`] is built.

mod btr;
mod elim;
mod explicit;
mod tfun;

pub use btr::{BtrEngine, PartitionConvention};
pub use elim::{frak_u1, nabla, nabla_residue, w2, w3_flip_residual, w_route, WRoute};
pub use explicit::{omega03_explicit, omega04_explicit, omega11_explicit, BetaRange};
pub use tfun::{alpha_prefactor, om11_route, omega02_closure_residual, omega02_dse_series, res_u0_check, t11_dse_residual, t_one_plus_one, t_two_point, TFunctionValue, TKind};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::form::PolarForm;
use crate::io::{cx, Cx};
use crate::planar::PlanarData;
use crate::series::C64;
use crate::spectral_curve::{RamificationData, SpectralCurve, DELTA_SEP};

/// Curve with its ramification and planar data.
#[derive(Clone, Debug)]
pub struct Instance {
    pub curve: SpectralCurve,
    pub ram: RamificationData,
    pub pd: PlanarData,
}

impl Instance {
    pub fn new(curve: &SpectralCurve) -> Result<Self> {
        Ok(Instance { curve: curve.clone(), ram: RamificationData::compute(curve)?, pd: PlanarData::new(curve)? })
    }

    pub fn r1(&self, z: C64) -> C64 {
        self.curve.r_deriv(&z, 1)
    }

    /// Fails if `z` is within `DELTA_SEP` of a ramification point, of `±u`
    /// for a marked point, of a pole of `R(±·)`, or (for `g ≥ 1`) of 0.
    pub fn check_point(&self, g: usize, us: &[C64], z: C64) -> Result<()> {
        let near = |a: C64, b: C64| (a - b).norm() < DELTA_SEP;
        for b in &self.ram.beta {
            if near(z, *b) {
                return Err(Error::NearSingularSet(format!("z = {z} near beta {b}")));
            }
        }
        for e in &self.curve.eps {
            if near(z, -e) || near(z, *e) {
                return Err(Error::NearSingularSet(format!("z = {z} near ±eps {e}")));
            }
        }
        for u in us {
            if near(z, *u) || near(z, -u) {
                return Err(Error::NearSingularSet(format!("z = {z} near ±u {u}")));
            }
        }
        if g >= 1 && z.norm() < DELTA_SEP {
            return Err(Error::NearSingularSet("z = 0".into()));
        }
        Ok(())
    }

    /// Marked points must avoid each other's `±`, the ramification points,
    /// the poles of `R(±·)` and the origin.
    pub fn check_marked(&self, us: &[C64]) -> Result<()> {
        for (k, u) in us.iter().enumerate() {
            if u.norm() < DELTA_SEP {
                return Err(Error::NearSingularSet(format!("marked point {u} at 0")));
            }
            self.check_point(0, &us[k + 1..], *u)?;
        }
        Ok(())
    }
}

/// Form coefficient of `ω_{g,m}` in the last variable, split into the part
/// with poles at the ramification points and the remainder.
#[derive(Clone, Debug, Default)]
pub struct OmegaParts {
    pub p: PolarForm<C64>,
    pub h: PolarForm<C64>,
}

impl OmegaParts {
    pub fn total(&self) -> PolarForm<C64> {
        let mut t = self.p.clone();
        t.extend(self.h.clone());
        t
    }

    pub fn eval(&self, z: C64) -> (C64, C64) {
        (self.p.eval(&z), self.h.eval(&z))
    }
}

/// `ω₀,₂(u, ·)` as a polar form: double poles at `±u`.
pub fn omega02_parts(u: C64) -> OmegaParts {
    let one = C64::new(1.0, 0.0);
    let zero = C64::new(0.0, 0.0);
    let mut h = PolarForm::new();
    h.push(u, vec![zero, one]);
    h.push(-u, vec![zero, one]);
    OmegaParts { p: PolarForm::new(), h }
}

/// A normalized evaluation `Ω⁽ᵍ⁾_m(points)`; the last point is `z`.
#[derive(Clone, Debug, PartialEq)]
pub struct FormValue {
    pub g: usize,
    pub m: usize,
    pub points: Vec<C64>,
    pub value: C64,
    pub value_p: C64,
    pub value_h: C64,
    /// `2 − 2g − m`: `ω_{g,m} = λ^{lambda_power} Ω ∏ R'(z_j) dz_j`.
    pub lambda_power: i32,
    pub route: String,
}

impl FormValue {
    pub fn from_parts(inst: &Instance, g: usize, us: &[C64], z: C64, parts: &OmegaParts, route: &str) -> Result<Self> {
        let (p, h) = parts.eval(z);
        Self::from_values(inst, g, us, z, p, h, route)
    }

    /// Normalizes given form-coefficient values of the two parts.
    pub fn from_values(inst: &Instance, g: usize, us: &[C64], z: C64, p: C64, h: C64, route: &str) -> Result<Self> {
        let m = us.len() + 1;
        let lambda_power = 2 - 2 * g as i32 - m as i32;
        let mut norm = C64::new(inst.curve.lambda().powi(-lambda_power), 0.0);
        for u in us.iter().chain(std::iter::once(&z)) {
            norm /= inst.r1(*u);
        }
        let (value_p, value_h) = (p * norm, h * norm);
        let value = value_p + value_h;
        if !value.is_finite() {
            return Err(Error::NonFinite(format!("omega_{g},{m}")));
        }
        let mut points = us.to_vec();
        points.push(z);
        Ok(FormValue { g, m, points, value, value_p, value_h, lambda_power, route: route.into() })
    }

    /// The form coefficient `F = λ^{2−2g−m} Ω ∏ R'`, undoing the normalization.
    pub fn form_coefficient(&self, inst: &Instance) -> C64 {
        let mut f = self.value * inst.curve.lambda().powi(self.lambda_power);
        for u in &self.points {
            f *= inst.r1(*u);
        }
        f
    }

    pub fn record(&self, fingerprint: &str) -> FormRecord {
        FormRecord {
            fingerprint: fingerprint.to_string(),
            g: self.g,
            m: self.m,
            points: self.points.iter().map(|&p| cx(p)).collect(),
            omega_total: cx(self.value),
            omega_p: cx(self.value_p),
            omega_h: cx(self.value_h),
            lambda_power: self.lambda_power,
            route: self.route.clone(),
        }
    }
}

/// JSON export shape of a [`FormValue`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FormRecord {
    pub fingerprint: String,
    pub g: usize,
    pub m: usize,
    pub points: Vec<Cx>,
    pub omega_total: Cx,
    #[serde(rename = "omega_P")]
    pub omega_p: Cx,
    #[serde(rename = "omega_H")]
    pub omega_h: Cx,
    pub lambda_power: i32,
    pub route: String,
}

/// Coefficients of `d_u[Σ_n b_n(u) (z+u)^{−n−1}]` in powers of `(z+u)^{−1}`,
/// given the `b_n` as first-order jets in `u`.
pub(crate) fn d_u_polar(b: &[crate::series::Jet1]) -> Vec<C64> {
    let val = |n: usize| b[n].coeff_or_zero(0);
    let der = |n: usize| b[n].coeff_or_zero(1);
    let mut out = vec![C64::new(0.0, 0.0); b.len() + 1];
    for (p, o) in out.iter_mut().enumerate() {
        // coefficient of (z+u)^{-(p+1)}: b'_p − p b_{p−1}
        if p < b.len() {
            *o += der(p);
        }
        if p >= 1 {
            *o -= val(p - 1) * p as f64;
        }
    }
    out
}
