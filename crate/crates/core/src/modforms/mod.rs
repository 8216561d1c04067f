//! Level-one modular forms: exact q-expansions, Hecke eigenforms, Petersson norms.

mod basis;
mod cache;
mod eigen;
mod hecke;
pub mod linalg;
mod series;

pub use basis::{cusp_dimension, delta_series, eisenstein_series, miller_basis};
pub use cache::{EigenCache, FormRecord, CACHE_FORMAT_VERSION};
pub use eigen::{
    eigen_coordinates, eigenforms, harmonic_weight, harmonic_weight_from, petersson_norm, petersson_norm_from,
    CuspEvaluator, EigenCoordinates, Eigenform,
};
pub use hecke::{hecke_coefficient, hecke_matrix};
pub use series::{mul_ntt, mul_schoolbook, mul_series, QExpansion};
