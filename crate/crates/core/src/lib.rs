//! Numerical engine for the quartic Kontsevich model: spectral curve,
//! planar correlation functions, residue-based recursion for the
//! differentials `ω_{g,m}`, verification checks and a perturbative oracle.

pub mod error;
pub mod form;
pub mod io;
pub mod planar;
pub mod poly;
pub mod series;
pub mod spectral_curve;
pub mod trec;
pub mod oracle;
pub mod verify;

pub use error::{Error, Result};
pub use series::{LaurentSeries, Scalar, Series, C64};
