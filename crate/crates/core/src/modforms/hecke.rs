//! Hecke operators on the echelon cusp basis.

use super::linalg::Matrix;
use super::series::QExpansion;
use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::Zero;

/// Coefficient j of T_m g: Σ_{e | gcd(m, j)} e^{k−1} c_g(mj/e²).
pub fn hecke_coefficient(k: u32, g: &QExpansion, m: usize, j: usize) -> BigInt {
    let mut s = BigInt::zero();
    let h = m.gcd(&j);
    for e in 1..=h {
        if h % e == 0 {
            s += BigInt::from(e).pow(k - 1) * &g.coeffs[m * j / (e * e)];
        }
    }
    s
}

/// Matrix of T_m in the basis: column i holds the coordinates of T_m g_i.
pub fn hecke_matrix(k: u32, basis: &[QExpansion], m: usize) -> Result<Matrix> {
    let d = basis.len();
    if m == 0 {
        return Err(Error::InvalidArgument("Hecke index must be positive".into()));
    }
    let have = basis.iter().map(QExpansion::order).min().unwrap_or(usize::MAX);
    let needed = m * (d + 1);
    if d > 0 && have < needed {
        return Err(Error::InsufficientOrder { needed, have });
    }
    Ok((1..=d)
        .map(|j| {
            basis
                .iter()
                .map(|g| BigRational::from_integer(hecke_coefficient(k, g, m, j)))
                .collect()
        })
        .collect())
}
