//! JSON records with fixed 17-significant-digit number formatting.

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::value::RawValue;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::series::C64;
use crate::spectral_curve::{AlphaPoints, ModelData, RamificationData, SpectralCurve};

/// A float written as `d.dddddddddddddddde±x` (17 significant digits).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Fixed(pub f64);

pub fn fmt_fixed(x: f64) -> String {
    if x == 0.0 {
        // Keep the sign of negative zero out of the output.
        return "0.0000000000000000e0".to_string();
    }
    format!("{x:.16e}")
}

impl Serialize for Fixed {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if !self.0.is_finite() {
            return s.serialize_none();
        }
        RawValue::from_string(fmt_fixed(self.0)).map_err(serde::ser::Error::custom)?.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Fixed {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        Option::<f64>::deserialize(d).map(|v| Fixed(v.unwrap_or(f64::NAN)))
    }
}

/// Complex number as an `[re, im]` pair.
pub type Cx = [Fixed; 2];

pub fn cx(z: C64) -> Cx {
    [Fixed(z.re), Fixed(z.im)]
}

pub fn from_cx(z: &Cx) -> C64 {
    C64::new(z[0].0, z[1].0)
}

pub fn cxs(zs: &[C64]) -> Vec<Cx> {
    zs.iter().map(|&z| cx(z)).collect()
}

/// Curve export record.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveRecord {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fingerprint: Option<String>,
    pub d: usize,
    pub e: Vec<Fixed>,
    pub r: Vec<u32>,
    #[serde(rename = "N")]
    pub n: u32,
    pub lambda: Fixed,
    pub eps: Vec<Cx>,
    pub rho: Vec<Cx>,
    #[serde(default)]
    pub beta: Vec<Cx>,
    #[serde(default)]
    pub alpha: Vec<Cx>,
}

fn defining_json(curve: &SpectralCurve) -> String {
    let rec = CurveRecord {
        fingerprint: None,
        d: curve.model.d,
        e: curve.model.e.iter().map(|&x| Fixed(x)).collect(),
        r: curve.model.r.clone(),
        n: curve.model.n,
        lambda: Fixed(curve.model.lambda),
        eps: cxs(&curve.eps),
        rho: cxs(&curve.rho),
        beta: vec![],
        alpha: vec![],
    };
    serde_json::to_string(&rec).expect("curve record serializes")
}

/// SHA-256 (first 16 hex digits) of the curve's defining JSON.
pub fn fingerprint(curve: &SpectralCurve) -> String {
    let digest = Sha256::digest(defining_json(curve).as_bytes());
    digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
}

impl CurveRecord {
    pub fn new(curve: &SpectralCurve, ram: Option<&RamificationData>, alpha: Option<&AlphaPoints>) -> Self {
        CurveRecord {
            fingerprint: Some(fingerprint(curve)),
            d: curve.model.d,
            e: curve.model.e.iter().map(|&x| Fixed(x)).collect(),
            r: curve.model.r.clone(),
            n: curve.model.n,
            lambda: Fixed(curve.model.lambda),
            eps: cxs(&curve.eps),
            rho: cxs(&curve.rho),
            beta: ram.map(|r| cxs(&r.beta)).unwrap_or_default(),
            alpha: alpha.map(|a| cxs(&a.alpha)).unwrap_or_default(),
        }
    }

    pub fn to_curve(&self) -> Result<SpectralCurve> {
        let model = ModelData {
            d: self.d,
            e: self.e.iter().map(|x| x.0).collect(),
            r: self.r.clone(),
            n: self.n,
            lambda: self.lambda.0,
        };
        if model.lambda == 0.0 {
            ModelData::decoupled(model.e.clone(), model.r.clone())?;
        } else {
            model.validate()?;
        }
        if self.eps.len() != self.d || self.rho.len() != self.d {
            return Err(Error::InvalidModel("eps/rho length differs from d".into()));
        }
        Ok(SpectralCurve { model, eps: self.eps.iter().map(from_cx).collect(), rho: self.rho.iter().map(from_cx).collect() })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("curve record serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::InvalidModel(format!("curve JSON: {e}")))
    }
}
