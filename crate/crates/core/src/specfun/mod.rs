//! Special functions: log-gamma, J- and K-Bessel, the V contour integral, zeta.

mod bessel;
mod dd;
mod gamma;
mod quad;
mod vfunc;
mod zeta;

pub use bessel::{
    bessel_j, bessel_j_asymptotic, bessel_j_mellin_barnes, bessel_j_mellin_barnes_auto, bessel_j_recurrence,
    bessel_j_series, bessel_k, bessel_k_complex, bessel_k_with_step, mellin_barnes_abscissa,
};
pub use gamma::{ln_gamma, ln_gamma_real, stirling_radius, BERNOULLI};
pub use quad::{gauss_legendre, GaussLegendre};
pub use vfunc::{v_half, VProfile};
pub use zeta::{completed_zeta, zeta, zeta_laurent_constant};
