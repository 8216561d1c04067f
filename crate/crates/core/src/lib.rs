//! Numerical laboratory for Rankin–Selberg central values of level-one holomorphic forms.
//!
//! The floating-point layer is generic over [`Real`]; exact integer and rational arithmetic is
//! used wherever cancellation would otherwise destroy precision (q-expansions, Hecke matrices,
//! eigenvector coordinates, number-field residues).

pub mod arith;
pub mod error;
pub mod field;
pub mod kloosterman;
pub mod modforms;
pub mod moments;
pub mod rankin;
pub mod scalar;
pub mod specfun;

pub use error::{Error, Result};
pub use field::{BaseField, QuadInt, QuadraticField};
pub use scalar::Real;

pub type VProfile64 = specfun::VProfile<f64>;
pub type Eigenform64 = modforms::Eigenform<f64>;
pub type AfeTail64 = rankin::AfeTail<f64>;
pub type RSContext64<'a> = rankin::RSContext<'a, f64>;
pub type CentralValue64 = rankin::CentralValue<f64>;
pub type EisensteinSeries64 = rankin::EisensteinSeries<f64>;
pub type FirstMoment64 = moments::FirstMoment<f64>;
pub type PeterssonCheck64 = moments::PeterssonCheck<f64>;
pub type KloostermanCache64 = moments::KloostermanCache<f64>;
