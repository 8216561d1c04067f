//! Eisenstein series, Δ, and the echelon (Miller) basis of level-one cusp forms.

use super::series::{mul_series, QExpansion};
use crate::arith::sigma_table;
use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_traits::{One, Zero};

/// E_4 = 1 + 240 Σ σ_3(n) q^n or E_6 = 1 − 504 Σ σ_5(n) q^n through q^order.
pub fn eisenstein_series(weight: u32, order: usize) -> Result<QExpansion> {
    let (scale, power) = match weight {
        4 => (240i64, 3),
        6 => (-504, 5),
        _ => return Err(Error::InvalidArgument(format!("no Eisenstein generator of weight {weight}"))),
    };
    if order < 1 {
        return Err(Error::InvalidArgument("series order must be at least 1".into()));
    }
    let sig = sigma_table(power, order);
    let mut c = Vec::with_capacity(order + 1);
    c.push(BigInt::one());
    c.extend(sig[1..=order].iter().map(|s| s * scale));
    Ok(QExpansion::new(weight, c))
}

/// ∏_{n≥1}(1 − q^n) via the pentagonal number theorem, `len` coefficients.
fn euler_product(len: usize) -> Vec<BigInt> {
    let mut c = vec![BigInt::zero(); len];
    let mut j: i64 = 0;
    loop {
        let sign = if j % 2 == 0 { 1 } else { -1 };
        let a = (j * (3 * j - 1) / 2) as usize;
        let b = (j * (3 * j + 1) / 2) as usize;
        if a >= len {
            break;
        }
        c[a] = BigInt::from(sign);
        if j > 0 && b < len {
            c[b] = BigInt::from(sign);
        }
        j += 1;
    }
    c
}

/// Δ = q ∏(1 − q^n)^24 through q^order.
pub fn delta_series(order: usize) -> Result<QExpansion> {
    if order < 1 {
        return Err(Error::InvalidArgument("series order must be at least 1".into()));
    }
    let len = order;
    let p = euler_product(len);
    let p2 = mul_series(&p, &p, len);
    let p4 = mul_series(&p2, &p2, len);
    let p8 = mul_series(&p4, &p4, len);
    let p16 = mul_series(&p8, &p8, len);
    let p24 = mul_series(&p16, &p8, len);
    let mut c = Vec::with_capacity(order + 1);
    c.push(BigInt::zero());
    c.extend(p24);
    Ok(QExpansion::new(12, c))
}

/// dim S_k(SL_2(Z)) for even k ≥ 0.
pub fn cusp_dimension(k: u32) -> usize {
    if k % 2 == 1 || k < 12 {
        return 0;
    }
    let base = (k / 12) as usize;
    if k % 12 == 2 {
        base - 1
    } else {
        base
    }
}

/// (a, b) with 4a + 6b = w and b ∈ {0, 1}; None for w = 2 or odd.
fn e4_e6_exponents(w: u32) -> Option<(u32, u32)> {
    match w % 4 {
        0 => Some((w / 4, 0)),
        2 if w >= 6 => Some(((w - 6) / 4, 1)),
        _ => None,
    }
}

/// Cusp basis g_1..g_d with g_i = q^i + O(q^{d+1}), exact integer coefficients through q^order.
pub fn miller_basis(k: u32, order: usize) -> Result<Vec<QExpansion>> {
    if k % 2 == 1 || k < 4 {
        return Err(Error::InvalidArgument(format!("weight must be even and at least 4, got {k}")));
    }
    let d = cusp_dimension(k);
    if d == 0 {
        return Ok(Vec::new());
    }
    if order < d + 10 {
        return Err(Error::InsufficientOrder { needed: d + 10, have: order });
    }
    let e4 = eisenstein_series(4, order)?;
    let e6 = eisenstein_series(6, order)?;
    let delta = delta_series(order)?;

    let mut monomials = Vec::new();
    let mut delta_pow = delta.clone();
    let mut i = 1u32;
    while 12 * i <= k {
        if let Some((a, b)) = e4_e6_exponents(k - 12 * i) {
            let mut m = delta_pow.mul(&e4.pow(a));
            if b == 1 {
                m = m.mul(&e6);
            }
            monomials.push(m);
        }
        i += 1;
        if 12 * i <= k {
            delta_pow = delta_pow.mul(&delta);
        }
    }
    if monomials.len() != d {
        return Err(Error::InconsistentDimension { formula: d, constructed: monomials.len() });
    }
    // Monomial i is q^i + higher terms; clear q^j for j > i from the bottom up.
    let mut basis: Vec<QExpansion> = Vec::with_capacity(d);
    for mut m in monomials.into_iter().rev() {
        for g in basis.iter().rev() {
            let j = g.coeffs.iter().position(|c| !c.is_zero()).expect("nonzero basis element");
            let t = m.coeffs[j].clone();
            if !t.is_zero() {
                m.sub_scaled(&t, g)?;
            }
        }
        basis.push(m);
    }
    basis.reverse();
    for (i, g) in basis.iter().enumerate() {
        for j in 0..=d {
            let expect = if j == i + 1 { BigInt::one() } else { BigInt::zero() };
            if g.coeffs[j] != expect {
                return Err(Error::InconsistentDimension { formula: d, constructed: i });
            }
        }
    }
    Ok(basis)
}
