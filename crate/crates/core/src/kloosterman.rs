//! Kloosterman sums over Z and over real quadratic fields, Weil-bound ratios, and sums over
//! totally positive units.

use crate::arith::{divisor_count, gcd_u64, mod_inverse};
use crate::error::{Error, Result};
use crate::field::{BaseField, QuadInt, QuadraticField};
use crate::scalar::Real;
use num_complex::Complex;
use serde::Serialize;

/// e(num/den) with the fraction reduced exactly first.
fn unit_phase<T: Real>(num: i128, den: i128) -> Complex<T> {
    let r = num.rem_euclid(den);
    let theta = T::TAU() * T::from_i128(r).unwrap() / T::from_i128(den).unwrap();
    let (s, c) = theta.sin_cos();
    Complex::new(c, s)
}

/// S(m, n; c) = Σ_{x mod c, (x,c)=1} e((mx + n x̄)/c).
pub fn kloosterman_z<T: Real>(m: i64, n: i64, c: u64) -> Result<T> {
    if c == 0 {
        return Err(Error::InvalidArgument("Kloosterman modulus must be positive".into()));
    }
    let ci = c as i64;
    let mut sum = Complex::new(T::zero(), T::zero());
    let mut scale = T::zero();
    for x in 0..ci {
        if gcd_u64(x as u64, c) != 1 {
            continue;
        }
        let xb = mod_inverse(x, ci).expect("unit has an inverse");
        let num = (m as i128 * x as i128 + n as i128 * xb as i128).rem_euclid(ci as i128);
        sum = sum + unit_phase::<T>(num, ci as i128);
        scale = scale + T::one();
    }
    let tol = T::lit(2.0).powi(-(T::BITS as i32) / 2) * scale.max(T::one());
    assert!(sum.im.abs() <= tol, "S({m},{n};{c}) has imaginary part {}", sum.im);
    Ok(sum.re)
}

/// S(r, 1; c) for r = 0..c−1, all at once.
pub fn kloosterman_row<T: Real>(c: u64) -> Vec<T> {
    let ci = c as usize;
    let cos: Vec<T> = (0..ci)
        .map(|j| (T::TAU() * T::from_usize_exact(j) / T::from_usize_exact(ci)).cos())
        .collect();
    let units: Vec<(usize, usize)> = (0..ci)
        .filter(|&x| gcd_u64(x as u64, c) == 1)
        .map(|x| (x, mod_inverse(x as i64, c as i64).unwrap() as usize))
        .collect();
    (0..ci)
        .map(|r| {
            units
                .iter()
                .map(|&(x, xb)| cos[(r * x + xb) % ci])
                .fold(T::zero(), |s, v| s + v)
        })
        .collect()
}

/// |S(m,n;c)| / (gcd(m,n,c)^{1/2} τ(c) c^{1/2}).
pub fn weil_ratio_z<T: Real>(m: i64, n: i64, c: u64) -> Result<T> {
    let s = kloosterman_z::<T>(m, n, c)?;
    let g = gcd_u64(gcd_u64(m.unsigned_abs(), n.unsigned_abs()), c);
    let denom = (T::from_u64(g).unwrap() * T::from_u64(c).unwrap()).sqrt() * T::from_u64(divisor_count(c)?).unwrap();
    Ok(s.abs() / denom)
}

#[derive(Debug, Clone, PartialEq)]
pub struct KloostermanQuery {
    pub field: BaseField,
    pub alpha: QuadInt,
    pub modulus: QuadInt,
    /// Totally positive unit; 1 by default.
    pub eta: QuadInt,
}

impl KloostermanQuery {
    pub fn new(field: BaseField, alpha: QuadInt, modulus: QuadInt) -> Self {
        KloostermanQuery { field, alpha, modulus, eta: QuadInt::ONE }
    }
}

/// Σ_{x ∈ (𝔡^{-1}/𝔡^{-1}c)^×} e(Tr((αx + x̄)η/c)).
///
/// With δ a generator of the different (δ² = d_F) and x = y/δ, x̄ = δȳ for y ∈ (O/c)^×, the
/// argument becomes η(αy + d_F ȳ)/(δc); traces are evaluated exactly as
/// Tr(Z·conj(δc))/N(δc).
pub fn kloosterman_nf<T: Real>(q: &KloostermanQuery) -> Result<Complex<T>> {
    let f = match &q.field {
        BaseField::Rational => {
            if q.alpha.b != 0 || q.modulus.b != 0 || q.modulus.a <= 0 {
                return Err(Error::InvalidArgument("over Q, alpha and c must be rational integers, c > 0".into()));
            }
            let s = kloosterman_z::<T>(q.alpha.a as i64, 1, q.modulus.a as u64)?;
            return Ok(Complex::new(s, T::zero()));
        }
        BaseField::Quadratic(f) => f,
    };
    f.require_narrow_class_one()?;
    if q.modulus.is_zero() {
        return Err(Error::InvalidArgument("Kloosterman modulus must be nonzero".into()));
    }
    let (e1, e2) = f.embed::<T>(q.eta);
    if f.norm(q.eta) != 1 || e1 <= T::zero() || e2 <= T::zero() {
        return Err(Error::InvalidArgument(format!("{} is not a totally positive unit", q.eta)));
    }
    let dc = f.mul(f.different_gen, q.modulus);
    let dc_conj = f.conj(dc);
    let den = f.norm(dc);
    let disc = f.discriminant() as i128;
    let lat = f.residue_lattice(q.modulus)?;
    let mut sum = Complex::new(T::zero(), T::zero());
    for y in f.residues(&lat) {
        let Some(yb) = f.inverse_mod(y, q.modulus) else {
            continue;
        };
        let z = f.mul(q.eta, f.mul(q.alpha, y).add(yb.scale(disc)));
        let num = f.trace(f.mul(z, dc_conj));
        let (num, den) = if den < 0 { (-num, -den) } else { (num, den) };
        sum = sum + unit_phase::<T>(num, den);
    }
    Ok(sum)
}

/// |Kl| / (τ((c)) N(c)^{1/2}) for a query with second argument 1.
pub fn weil_ratio_nf<T: Real>(q: &KloostermanQuery) -> Result<T> {
    let kl = kloosterman_nf::<T>(q)?;
    let (tau, norm) = match &q.field {
        BaseField::Rational => {
            let c = q.modulus.a.unsigned_abs() as u64;
            (divisor_count(c)?, c)
        }
        BaseField::Quadratic(f) => (f.ideal_divisor_count(q.modulus), f.norm(q.modulus).unsigned_abs() as u64),
    };
    Ok(kl.norm() / (T::from_u64(tau).unwrap() * T::from_u64(norm).unwrap().sqrt()))
}

/// A totally positive generator of each integral ideal with norm ≤ `max_norm`, balanced so
/// both embeddings are close to N(c)^{1/2}; ordered by norm, then Hermite data.
pub fn moduli_up_to(f: &QuadraticField, max_norm: u64) -> Result<Vec<QuadInt>> {
    f.require_narrow_class_one()?;
    let mut out = Vec::new();
    for n in 1..=max_norm as i128 {
        for lat in f.ideals_of_norm(n) {
            let g = principal_generator(f, &lat, n)
                .ok_or_else(|| Error::Enumeration(format!("no generator for an ideal of norm {n}")))?;
            out.push(g);
        }
    }
    Ok(out)
}

fn principal_generator(f: &QuadraticField, lat: &crate::field::ResidueLattice, n: i128) -> Option<QuadInt> {
    let (g1, _) = f.embed::<f64>(f.tp_unit_generator);
    let bound = ((n as f64) * g1).sqrt() + 1.0;
    let (w1, w2) = f.embed::<f64>(QuadInt::new(0, 1));
    let bmax = (2.0 * bound / (w1 - w2)).ceil() as i128;
    for b in -bmax..=bmax {
        let lo = (-bound - b as f64 * w1).floor() as i128;
        let hi = (bound - b as f64 * w1).ceil() as i128;
        for a in lo..=hi {
            let x = QuadInt::new(a, b);
            if f.norm(x).abs() == n && lat.contains(x) {
                return Some(totally_positive_balanced(f, x));
            }
        }
    }
    None
}

fn totally_positive_balanced(f: &QuadraticField, x: QuadInt) -> QuadInt {
    let mut x = x;
    if f.norm(x) < 0 {
        x = f.mul(x, f.fundamental_unit);
    }
    let (x1, _) = f.embed::<f64>(x);
    if x1 < 0.0 {
        x = x.neg();
    }
    unit_rescale::<f64>(f, x).map(|r| r.rescaled).unwrap_or(x)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KloostermanRow {
    pub field_disc: i64,
    pub alpha: String,
    pub c_coords: String,
    pub norm_c: u64,
    pub re: f64,
    pub im: f64,
    pub weil_ratio: f64,
}

/// Kl(α, 1; c) and its Weil ratio for every modulus up to the norm bound (c ≤ bound over Q).
pub fn kloosterman_table(field: &BaseField, alpha: QuadInt, max_norm: u64) -> Result<Vec<KloostermanRow>> {
    let moduli: Vec<QuadInt> = match field {
        BaseField::Rational => (1..=max_norm as i128).map(|c| QuadInt::new(c, 0)).collect(),
        BaseField::Quadratic(f) => moduli_up_to(f, max_norm)?,
    };
    moduli
        .into_iter()
        .map(|c| {
            let q = KloostermanQuery::new(field.clone(), alpha, c);
            let kl = kloosterman_nf::<f64>(&q)?;
            let norm_c = match field {
                BaseField::Rational => c.a as u64,
                BaseField::Quadratic(f) => f.norm(c).unsigned_abs() as u64,
            };
            Ok(KloostermanRow {
                field_disc: field.field_disc(),
                alpha: alpha.to_string(),
                c_coords: c.to_string(),
                norm_c,
                re: kl.re,
                im: kl.im,
                weil_ratio: weil_ratio_nf::<f64>(&q)?,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitSum<T> {
    pub partial: T,
    /// 1 + 2/(g^e − 1).
    pub limit: T,
    pub terms: usize,
}

/// Σ_{|t| ≤ terms} ∏_{j} min(1, η_j)^{e}, η = g^t. By symmetry of the two embeddings of a norm-one
/// unit this also equals Σ ∏_j max(1, η_j)^{−e}, the second of the two convergent unit sums.
pub fn unit_sum<T: Real>(f: &QuadraticField, exponent: T, terms: usize) -> Result<UnitSum<T>> {
    if !(exponent > T::zero() && exponent < T::one()) {
        return Err(Error::InvalidArgument("unit-sum exponent must lie in (0, 1)".into()));
    }
    let (g1, g2) = f.embed::<T>(f.tp_unit_generator);
    let mut partial = T::one();
    for t in 1..=terms as i32 {
        for (a, b) in [(g1.powi(t), g2.powi(t)), (g1.powi(-t), g2.powi(-t))] {
            let small = |v: T| if v < T::one() { v.powf(exponent) } else { T::one() };
            partial = partial + small(a) * small(b);
        }
    }
    let gmax = g1.max(g2);
    let ratio = gmax.powf(-exponent);
    let limit = T::one() + T::lit(2.0) * ratio / (T::one() - ratio);
    let tail = T::lit(2.0) * ratio.powi(terms as i32 + 1) / (T::one() - ratio);
    if tail > T::lit(1e-12) * limit {
        return Err(Error::SeriesDivergence(format!(
            "unit sum with exponent {exponent} has tail {tail:e} after {terms} terms"
        )));
    }
    Ok(UnitSum { partial, limit, terms })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitRescale<T> {
    /// u = g^exponent.
    pub exponent: i64,
    pub unit: QuadInt,
    pub rescaled: QuadInt,
    /// max_j |log((au)_j / N(a)^{1/2})|.
    pub max_log_ratio: T,
}

/// Totally positive unit u minimizing the spread of the embeddings of au around N(a)^{1/2}.
pub fn unit_rescale<T: Real>(f: &QuadraticField, a: QuadInt) -> Result<UnitRescale<T>> {
    let (a1, a2) = f.embed::<T>(a);
    if !(a1 > T::zero() && a2 > T::zero()) {
        return Err(Error::InvalidArgument(format!("{a} is not totally positive")));
    }
    let (g1, _) = f.embed::<T>(f.tp_unit_generator);
    let lg = g1.ln();
    let t = ((a2.ln() - a1.ln()) / (T::lit(2.0) * lg)).round().to_i64().unwrap();
    let unit = f.tp_unit_power(t);
    let rescaled = f.mul(a, unit);
    let (r1, r2) = f.embed::<T>(rescaled);
    let half_log_norm = (a1.ln() + a2.ln()) / T::lit(2.0);
    let max_log_ratio = (r1.ln() - half_log_norm).abs().max((r2.ln() - half_log_norm).abs());
    Ok(UnitRescale { exponent: t, unit, rescaled, max_log_ratio })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn golden() -> QuadraticField {
        QuadraticField::new(5).unwrap()
    }

    #[test]
    fn small_rational_sums() {
        assert_eq!(kloosterman_z::<f64>(1, 1, 1).unwrap(), 1.0);
        assert!((kloosterman_z::<f64>(1, 1, 2).unwrap() - 1.0).abs() < 1e-15);
        assert!((kloosterman_z::<f64>(1, 1, 3).unwrap() + 1.0).abs() < 1e-15);
        assert!(kloosterman_z::<f64>(1, 1, 0).is_err());
    }

    #[test]
    fn row_matches_pointwise() {
        for c in [1u64, 7, 12, 30] {
            let row = kloosterman_row::<f64>(c);
            for r in 0..c {
                assert!((row[r as usize] - kloosterman_z::<f64>(r as i64, 1, c).unwrap()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn unit_modulus_single_term() {
        let f = golden();
        let q = KloostermanQuery::new(BaseField::Quadratic(f.clone()), QuadInt::ONE, f.fundamental_unit);
        assert!((kloosterman_nf::<f64>(&q).unwrap().norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn inert_two_has_three_terms() {
        let f = golden();
        let q = KloostermanQuery::new(BaseField::Quadratic(f.clone()), QuadInt::ONE, QuadInt::new(2, 0));
        // Units of O/2 = F_4: 1, ω, 1+ω.
        let kl = kloosterman_nf::<f64>(&q).unwrap();
        assert!(kl.im.abs() < 1e-14);
        assert!(weil_ratio_nf::<f64>(&q).unwrap() <= 1.0);
    }

    #[test]
    fn unit_sum_limit() {
        let f = golden();
        let s = unit_sum::<f64>(&f, 0.25, 200).unwrap();
        assert!((s.partial - s.limit).abs() < 1e-12);
        assert!(unit_sum::<f64>(&f, 1e-4, 200).is_err());
        assert_eq!(unit_sum::<f64>(&f, 0.25, 0).ok(), None);
    }

    #[test]
    fn rescale_units() {
        let f = golden();
        let r = unit_rescale::<f64>(&f, QuadInt::ONE).unwrap();
        assert_eq!((r.exponent, r.rescaled), (0, QuadInt::ONE));
        let g5 = f.tp_unit_power(5);
        let r = unit_rescale::<f64>(&f, g5).unwrap();
        assert_eq!((r.exponent, r.rescaled), (-5, QuadInt::ONE));
    }
}
