//! Truncated q-expansions with exact integer coefficients.
//!
//! Products go through a multi-modular number-theoretic transform: each factor is reduced
//! modulo enough NTT-friendly primes to pin down the exact product, transformed, multiplied
//! pointwise, and lifted back by Garner's algorithm into the symmetric range.

use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use std::sync::OnceLock;

/// Coefficients c_0..c_P of Σ c_n q^n together with the weight of the form they represent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QExpansion {
    pub weight: u32,
    pub coeffs: Vec<BigInt>,
}

impl QExpansion {
    pub fn new(weight: u32, coeffs: Vec<BigInt>) -> Self {
        QExpansion { weight, coeffs }
    }

    /// Truncation order P: coefficients are known for n ≤ P.
    pub fn order(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn coeff(&self, n: usize) -> &BigInt {
        &self.coeffs[n]
    }

    pub fn is_cusp(&self) -> bool {
        self.coeffs.first().is_none_or(Zero::is_zero)
    }

    pub fn truncate(&self, order: usize) -> QExpansion {
        QExpansion::new(self.weight, self.coeffs[..=order.min(self.order())].to_vec())
    }

    fn check_weight(&self, o: &QExpansion) -> Result<usize> {
        if self.weight != o.weight {
            return Err(Error::InvalidArgument(format!(
                "cannot add forms of weights {} and {}",
                self.weight, o.weight
            )));
        }
        Ok(self.order().min(o.order()))
    }

    pub fn add(&self, o: &QExpansion) -> Result<QExpansion> {
        let p = self.check_weight(o)?;
        let c = (0..=p).map(|n| &self.coeffs[n] + &o.coeffs[n]).collect();
        Ok(QExpansion::new(self.weight, c))
    }

    pub fn sub(&self, o: &QExpansion) -> Result<QExpansion> {
        let p = self.check_weight(o)?;
        let c = (0..=p).map(|n| &self.coeffs[n] - &o.coeffs[n]).collect();
        Ok(QExpansion::new(self.weight, c))
    }

    /// self − t·o, in place.
    pub fn sub_scaled(&mut self, t: &BigInt, o: &QExpansion) -> Result<()> {
        let p = self.check_weight(o)?;
        self.coeffs.truncate(p + 1);
        for (c, d) in self.coeffs.iter_mut().zip(&o.coeffs) {
            *c -= t * d;
        }
        Ok(())
    }

    pub fn scale(&self, t: &BigInt) -> QExpansion {
        QExpansion::new(self.weight, self.coeffs.iter().map(|c| c * t).collect())
    }

    /// Product; weights add and the order is the smaller of the two.
    pub fn mul(&self, o: &QExpansion) -> QExpansion {
        let len = self.coeffs.len().min(o.coeffs.len());
        QExpansion::new(self.weight + o.weight, mul_series(&self.coeffs, &o.coeffs, len))
    }

    pub fn pow(&self, e: u32) -> QExpansion {
        let mut acc = QExpansion::new(0, one_series(self.coeffs.len()));
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }
}

pub(crate) fn one_series(len: usize) -> Vec<BigInt> {
    let mut v = vec![BigInt::zero(); len];
    if len > 0 {
        v[0] = BigInt::one();
    }
    v
}

/// Truncated product by the definition; the reference for the transform path.
pub fn mul_schoolbook(a: &[BigInt], b: &[BigInt], len: usize) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); len];
    for (i, x) in a.iter().enumerate().take(len) {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(len - i) {
            out[i + j] += x * y;
        }
    }
    out
}

const SCHOOLBOOK_CUTOFF: usize = 48;

/// Truncated product of two integer series, returning `len` coefficients.
pub fn mul_series(a: &[BigInt], b: &[BigInt], len: usize) -> Vec<BigInt> {
    let a = &a[..a.len().min(len)];
    let b = &b[..b.len().min(len)];
    if a.len().min(b.len()) <= SCHOOLBOOK_CUTOFF {
        let mut out = mul_schoolbook(a, b, len);
        out.resize(len, BigInt::zero());
        return out;
    }
    mul_ntt(a, b, len)
}

#[derive(Clone, Copy, Debug)]
struct NttPrime {
    p: u64,
    /// Primitive 2^20-th root of unity.
    root: u64,
}

const TWO_ADICITY: u32 = 20;

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

fn ntt_primes() -> &'static [NttPrime] {
    static PRIMES: OnceLock<Vec<NttPrime>> = OnceLock::new();
    PRIMES.get_or_init(|| {
        let mut out = Vec::new();
        for c in (1u64..(1 << (31 - TWO_ADICITY))).rev() {
            let p = (c << TWO_ADICITY) + 1;
            if !crate::arith::is_prime(p) {
                continue;
            }
            let mut qs: Vec<u64> = crate::arith::factorize(c).into_iter().map(|(q, _)| q).collect();
            if !qs.contains(&2) {
                qs.push(2);
            }
            let g = (2..p)
                .find(|&g| qs.iter().all(|&q| pow_mod(g, (p - 1) / q, p) != 1))
                .expect("a prime has a primitive root");
            out.push(NttPrime { p, root: pow_mod(g, c, p) });
        }
        out
    })
}

fn ntt(a: &mut [u64], prime: NttPrime, invert: bool) {
    let n = a.len();
    let p = prime.p;
    let mut j = 0;
    for i in 1..n {
        let mut bit = n >> 1;
        while j & bit != 0 {
            j ^= bit;
            bit >>= 1;
        }
        j |= bit;
        if i < j {
            a.swap(i, j);
        }
    }
    let mut len = 2;
    while len <= n {
        let mut w = pow_mod(prime.root, (1u64 << TWO_ADICITY) / len as u64, p);
        if invert {
            w = pow_mod(w, p - 2, p);
        }
        let half = len / 2;
        let mut tw = Vec::with_capacity(half);
        let mut cur = 1u64;
        for _ in 0..half {
            tw.push(cur);
            cur = cur * w % p;
        }
        for chunk in a.chunks_mut(len) {
            let (lo, hi) = chunk.split_at_mut(half);
            for ((u, v), &t) in lo.iter_mut().zip(hi.iter_mut()).zip(&tw) {
                let x = *u;
                let y = *v * t % p;
                *u = if x + y >= p { x + y - p } else { x + y };
                *v = if x >= y { x - y } else { x + p - y };
            }
        }
        len <<= 1;
    }
    if invert {
        let inv_n = pow_mod(n as u64, p - 2, p);
        for x in a.iter_mut() {
            *x = *x * inv_n % p;
        }
    }
}

fn residue(x: &BigInt, p: u64) -> u64 {
    let r = x.mod_floor(&BigInt::from(p));
    r.to_u64().expect("residue fits")
}

fn max_bits(v: &[BigInt]) -> u64 {
    v.iter().map(|x| x.bits()).max().unwrap_or(0)
}

/// Truncated product through the multi-modular transform.
pub fn mul_ntt(a: &[BigInt], b: &[BigInt], len: usize) -> Vec<BigInt> {
    let conv_len = (a.len() + b.len()).saturating_sub(1).min(len);
    if conv_len == 0 {
        return vec![BigInt::zero(); len];
    }
    let size = (a.len() + b.len() - 1).next_power_of_two();
    assert!(size <= 1 << TWO_ADICITY, "series too long for the transform");
    // |c_n| ≤ min(|a|,|b|)·max|a|·max|b|; the modulus must exceed twice that.
    let bound_bits = max_bits(a) + max_bits(b) + (a.len().min(b.len()) as u64).ilog2() as u64 + 3;
    let count = (bound_bits / 30 + 1) as usize;
    let primes = ntt_primes();
    assert!(count <= primes.len(), "coefficients too large for the prime pool");
    let primes = &primes[..count];

    let residues: Vec<Vec<u64>> = primes
        .par_iter()
        .map(|&pr| {
            let mut fa = vec![0u64; size];
            let mut fb = vec![0u64; size];
            for (d, x) in fa.iter_mut().zip(a) {
                *d = residue(x, pr.p);
            }
            for (d, x) in fb.iter_mut().zip(b) {
                *d = residue(x, pr.p);
            }
            ntt(&mut fa, pr, false);
            ntt(&mut fb, pr, false);
            for (x, y) in fa.iter_mut().zip(&fb) {
                *x = *x * y % pr.p;
            }
            ntt(&mut fa, pr, true);
            fa.truncate(conv_len);
            fa
        })
        .collect();

    // Garner: x = v_0 + v_1 p_0 + v_2 p_0 p_1 + …, v_i computed modulo p_i.
    let inv: Vec<Vec<u64>> = (0..count)
        .map(|i| (0..i).map(|j| pow_mod(primes[j].p % primes[i].p, primes[i].p - 2, primes[i].p)).collect())
        .collect();
    let modulus: BigInt = primes.iter().fold(BigInt::one(), |m, pr| m * pr.p);
    let half = &modulus >> 1;
    let mut out: Vec<BigInt> = (0..conv_len)
        .into_par_iter()
        .map(|n| {
            let mut v = vec![0u64; count];
            for i in 0..count {
                let p = primes[i].p;
                let mut x = residues[i][n];
                for j in 0..i {
                    x = (x + p - v[j] % p) % p * inv[i][j] % p;
                }
                v[i] = x;
            }
            let mut acc = BigInt::from(v[count - 1]);
            for i in (0..count - 1).rev() {
                acc = acc * primes[i].p + v[i];
            }
            if acc > half {
                acc -= &modulus;
            }
            acc
        })
        .collect();
    out.resize(len, BigInt::zero());
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn prime_pool_is_sound() {
        let ps = ntt_primes();
        assert!(ps.len() > 60);
        for pr in ps {
            assert!(pr.p < 1 << 31);
            assert_eq!(pow_mod(pr.root, 1 << TWO_ADICITY, pr.p), 1);
            assert_ne!(pow_mod(pr.root, 1 << (TWO_ADICITY - 1), pr.p), 1);
        }
    }

    #[test]
    fn transform_matches_schoolbook_with_large_entries() {
        let big = BigInt::from(3).pow(200u32);
        let a: Vec<BigInt> = (0..150).map(|i| &big * (i as i64 - 70) + i * i).collect();
        let b: Vec<BigInt> = (0..120).map(|i| -&big * (i as i64 % 7) + 3 - i).collect();
        assert_eq!(mul_ntt(&a, &b, 200), mul_schoolbook(&a, &b, 200));
        assert_eq!(mul_ntt(&a, &b, 90), mul_schoolbook(&a, &b, 90));
    }

    #[test]
    fn ring_operations() {
        let a = QExpansion::new(4, series(&[1, 2, 3]));
        let b = QExpansion::new(4, series(&[0, 1, 1, 5]));
        assert_eq!(a.add(&b).unwrap().coeffs, series(&[1, 3, 4]));
        assert_eq!(a.mul(&b).weight, 8);
        assert_eq!(a.mul(&b).coeffs, series(&[0, 1, 3]));
        assert!(a.add(&QExpansion::new(6, series(&[1]))).is_err());
        assert_eq!(a.pow(3).coeffs, series(&[1, 6, 21]));
        assert!(b.is_cusp() && !a.is_cusp());
    }
}
