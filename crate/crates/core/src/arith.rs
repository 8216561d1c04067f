//! Divisor functions, ideal-norm counts and residue constants.

use crate::error::{Error, Result};
use crate::field::BaseField;
use crate::scalar::Real;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::One;

/// Number of positive divisors.
pub fn divisor_count(n: u64) -> Result<u64> {
    if n == 0 {
        return Err(Error::InvalidArgument("divisor_count(0)".into()));
    }
    Ok(factorize(n).iter().map(|&(_, e)| u64::from(e) + 1).product())
}

/// Trial-division factorization, primes ascending.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && factorize(n) == [(n, 1)]
}

pub fn primes_up_to(n: usize) -> Vec<usize> {
    if n < 2 {
        return Vec::new();
    }
    let mut sieve = vec![true; n + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i <= n {
        if sieve[i] {
            (i * i..=n).step_by(i).for_each(|j| sieve[j] = false);
        }
        i += 1;
    }
    (0..=n).filter(|&i| sieve[i]).collect()
}

/// Smallest prime factor for every index up to `n`.
pub fn smallest_prime_factors(n: usize) -> Vec<usize> {
    let mut spf = vec![0usize; n + 1];
    for i in 2..=n {
        if spf[i] == 0 {
            let mut j = i;
            while j <= n {
                if spf[j] == 0 {
                    spf[j] = i;
                }
                j += i;
            }
        }
    }
    spf
}

/// σ_k(n) for n = 0..=limit (entry 0 is 0), exact.
pub fn sigma_table(k: u32, limit: usize) -> Vec<BigInt> {
    let mut out = vec![BigInt::from(0); limit + 1];
    for d in 1..=limit {
        let dk = BigInt::from(d).pow(k);
        let mut m = d;
        while m <= limit {
            out[m] += &dk;
            m += d;
        }
    }
    out
}

pub fn sigma(k: u32, n: u64) -> BigInt {
    let mut s = BigInt::from(0);
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            s += BigInt::from(d).pow(k);
            if d * d != n {
                s += BigInt::from(n / d).pow(k);
            }
        }
        d += 1;
    }
    s
}

/// Kronecker symbol (a/n).
pub fn kronecker(a: i64, n: i64) -> i32 {
    if n == 0 {
        return if a == 1 || a == -1 { 1 } else { 0 };
    }
    let mut result = 1i32;
    let mut n = n;
    if n < 0 {
        n = -n;
        if a < 0 {
            result = -result;
        }
    }
    let mut v = 0;
    while n % 2 == 0 {
        n /= 2;
        v += 1;
    }
    if v > 0 {
        if a % 2 == 0 {
            return 0;
        }
        if v % 2 == 1 && matches!(a.rem_euclid(8), 3 | 5) {
            result = -result;
        }
    }
    // Jacobi symbol (a/n), n odd positive.
    let mut a = a.rem_euclid(n);
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            if matches!(n % 8, 3 | 5) {
                result = -result;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            result = -result;
        }
        a %= n;
    }
    if n == 1 {
        result
    } else {
        0
    }
}

/// Integral ideals of norm d coprime to the level, for d = 1..=limit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdealCountTable {
    /// 1 for Q, D for Q(√D).
    pub field_disc: i64,
    pub level_norm: u64,
    /// `counts[d - 1]` is a_d.
    pub counts: Vec<u64>,
    pub limit: usize,
}

impl IdealCountTable {
    pub fn get(&self, d: usize) -> u64 {
        self.counts[d - 1]
    }
}

/// Ideal counts from prime splitting. For a quadratic field the level is read as the set of
/// rational primes dividing `level_norm`: an ideal is coprime to it iff its norm is.
pub fn ideal_norm_counts(field: &BaseField, level_norm: u64, limit: usize) -> Result<IdealCountTable> {
    if limit == 0 || level_norm == 0 {
        return Err(Error::InvalidArgument("limit and level_norm must be positive".into()));
    }
    let disc = match field {
        BaseField::Rational => None,
        BaseField::Quadratic(f) => {
            f.require_narrow_class_one()?;
            Some(f.discriminant())
        }
    };
    let spf = smallest_prime_factors(limit);
    let mut counts = vec![0u64; limit + 1];
    counts[1] = 1;
    for n in 2..=limit {
        let p = spf[n];
        let mut m = n;
        let mut e = 0u32;
        while m % p == 0 {
            m /= p;
            e += 1;
        }
        let local = if level_norm % p as u64 == 0 {
            0
        } else {
            match disc {
                None => 1,
                Some(d) => match kronecker(d, p as i64) {
                    1 => u64::from(e) + 1,
                    -1 => u64::from(e % 2 == 0),
                    _ => 1,
                },
            }
        };
        counts[n] = counts[m] * local;
    }
    counts.remove(0);
    Ok(IdealCountTable {
        field_disc: field.field_disc(),
        level_norm,
        counts,
        limit,
    })
}

/// Twice the residue of ζ^{(N)}(2u+1) at u = 0, exact: ∏_{p | N}(1 − 1/p).
pub fn gamma_minus_one(field: &BaseField, level_norm: u64) -> Result<BigRational> {
    if let BaseField::Quadratic(_) = field {
        return Err(Error::UnsupportedField(
            "gamma_minus_one is implemented over Q only".into(),
        ));
    }
    if level_norm == 0 {
        return Err(Error::InvalidArgument("level_norm must be positive".into()));
    }
    let mut r = BigRational::one();
    for (p, _) in factorize(level_norm) {
        let p = BigInt::from(p);
        r *= BigRational::new(&p - 1, p);
    }
    Ok(r)
}

/// Least-squares slope (through the origin) of X ↦ Σ_{d ≤ X} a_d over a grid on [limit/2, limit].
pub fn dedekind_residue_estimate<T: Real>(field: &BaseField, limit: usize) -> Result<T> {
    if limit < 10_000 {
        return Err(Error::InvalidArgument("limit must be at least 10^4".into()));
    }
    let table = ideal_norm_counts(field, 1, limit)?;
    let mut partial = Vec::with_capacity(limit);
    let mut s = 0u64;
    for &a in &table.counts {
        s += a;
        partial.push(s);
    }
    let points = 200usize;
    let (mut sxy, mut sxx) = (T::zero(), T::zero());
    for j in 0..=points {
        let x = limit / 2 + (limit - limit / 2) * j / points;
        let xf = T::from_usize_exact(x);
        let y = T::from_u64(partial[x - 1]).expect("count fits");
        sxy = sxy + xf * y;
        sxx = sxx + xf * xf;
    }
    Ok(sxy / sxx)
}

pub fn gcd_u64(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

/// Inverse of x modulo c (gcd(x, c) = 1 assumed, c ≥ 1).
pub fn mod_inverse(x: i64, c: i64) -> Option<i64> {
    let e = x.rem_euclid(c).extended_gcd(&c);
    if e.gcd != 1 {
        return None;
    }
    Some(e.x.rem_euclid(c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::QuadraticField;

    #[test]
    fn divisor_counts() {
        assert_eq!(divisor_count(1).unwrap(), 1);
        assert_eq!(divisor_count(97).unwrap(), 2);
        assert_eq!(divisor_count(12).unwrap(), 6);
        assert!(divisor_count(0).is_err());
    }

    #[test]
    fn divisor_count_matches_enumeration() {
        for n in 1..500u64 {
            let direct = (1..=n).filter(|d| n % d == 0).count() as u64;
            assert_eq!(divisor_count(n).unwrap(), direct);
        }
    }

    #[test]
    fn kronecker_matches_euler_criterion() {
        for p in [3i64, 5, 7, 11, 13, 101] {
            for a in -30..30i64 {
                let r = a.rem_euclid(p);
                let expected = if r == 0 {
                    0
                } else if (1..p).any(|x| (x * x) % p == r) {
                    1
                } else {
                    -1
                };
                assert_eq!(kronecker(a, p), expected, "({a}/{p})");
            }
        }
        assert_eq!(kronecker(5, 2), -1);
        assert_eq!(kronecker(17, 2), 1);
        assert_eq!(kronecker(8, 2), 0);
    }

    #[test]
    fn rational_counts() {
        let t = ideal_norm_counts(&BaseField::Rational, 1, 10).unwrap();
        assert!(t.counts.iter().all(|&a| a == 1));
        let t = ideal_norm_counts(&BaseField::Rational, 2, 6).unwrap();
        assert_eq!(t.counts, vec![1, 0, 1, 0, 1, 0]);
    }

    #[test]
    fn golden_field_counts() {
        let f = BaseField::Quadratic(QuadraticField::new(5).unwrap());
        let t = ideal_norm_counts(&f, 1, 20).unwrap();
        assert_eq!(t.get(2), 0);
        assert_eq!(t.get(4), 1);
        assert_eq!(t.get(5), 1);
        assert_eq!(t.get(11), 2);
        assert_eq!(t.get(9), 1);
        assert_eq!(t.get(19), 2);
    }

    #[test]
    fn unsupported_field_rejected() {
        let f = BaseField::Quadratic(QuadraticField::new(3).unwrap());
        assert!(matches!(
            ideal_norm_counts(&f, 1, 10),
            Err(Error::UnsupportedField(_))
        ));
    }

    #[test]
    fn gamma_minus_one_values() {
        let q = BaseField::Rational;
        assert_eq!(gamma_minus_one(&q, 1).unwrap(), BigRational::one());
        assert_eq!(
            gamma_minus_one(&q, 2).unwrap(),
            BigRational::new(1.into(), 2.into())
        );
        assert_eq!(
            gamma_minus_one(&q, 6).unwrap(),
            BigRational::new(1.into(), 3.into())
        );
    }

    #[test]
    fn rational_residue_is_one() {
        let r: f64 = dedekind_residue_estimate(&BaseField::Rational, 10_000).unwrap();
        assert!((r - 1.0).abs() < 0.01);
    }

    #[test]
    fn sigma_values() {
        assert_eq!(sigma(3, 1), BigInt::from(1));
        assert_eq!(sigma(5, 2), BigInt::from(33));
        let t = sigma_table(11, 50);
        for n in 1..=50u64 {
            assert_eq!(t[n as usize], sigma(11, n));
        }
    }

    #[test]
    fn inverses() {
        for c in 1..60i64 {
            for x in 0..c {
                if x.gcd(&c) == 1 {
                    let y = mod_inverse(x, c).unwrap();
                    assert_eq!((x * y) % c, 1 % c);
                } else {
                    assert!(mod_inverse(x, c).is_none());
                }
            }
        }
    }
}
