//! Normalized Hecke eigenforms, Petersson norms and harmonic weights.

use super::basis::{cusp_dimension, miller_basis};
use super::hecke::hecke_matrix;
use super::linalg::{adjugate, charpoly, is_squarefree, real_roots, Matrix};
use super::series::QExpansion;
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::specfun::{gauss_legendre, ln_gamma_real};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Bits to which Hecke eigenvalues are bisected before eigenvectors are formed.
const EIGENVALUE_BITS: u32 = 256;
/// Coefficients always computed internally so the norm quadrature has its full tail.
const MIN_INTERNAL_COEFFS: usize = 128;
const NORM_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct Eigenform<T> {
    pub weight: u32,
    /// Position of the form when sorted by increasing T_2 (or fallback operator) eigenvalue.
    pub eigenvalue_index: usize,
    /// a(m) at index m − 1.
    pub raw_coeffs: Vec<T>,
    /// λ(m) = a(m)/m^{(k−1)/2} at index m − 1.
    pub normalized: Vec<T>,
    /// (3/π) ∫_F |f|² y^k dμ.
    pub petersson_norm: T,
    pub harmonic_weight: T,
}

impl<T: Real> Eigenform<T> {
    pub fn lambda(&self, m: usize) -> T {
        self.normalized[m - 1]
    }

    pub fn coeff_limit(&self) -> usize {
        self.normalized.len()
    }
}

/// Eigenvector in basis coordinates, v_i = numerators[i]/denominator, with v_1 = 1.
#[derive(Clone, Debug)]
pub struct EigenCoordinates {
    pub numerators: Vec<BigInt>,
    pub denominator: BigInt,
    /// Hecke index whose eigenvalues separated the space.
    pub operator: usize,
}

impl EigenCoordinates {
    /// Numerators D·a(m) for m = 1..=limit, D = self.denominator.
    pub fn scaled_coefficients(&self, basis: &[QExpansion], limit: usize) -> Vec<BigInt> {
        (1..=limit)
            .map(|m| {
                self.numerators
                    .iter()
                    .zip(basis)
                    .fold(BigInt::zero(), |s, (n, g)| s + n * &g.coeffs[m])
            })
            .collect()
    }
}

/// Common eigenvectors of the Hecke algebra, from the first of T_2, T_3, T_5 with a squarefree
/// characteristic polynomial.
pub fn eigen_coordinates(k: u32, basis: &[QExpansion]) -> Result<Vec<EigenCoordinates>> {
    let d = basis.len();
    if d == 0 {
        return Ok(Vec::new());
    }
    for m in [2usize, 3, 5] {
        let t = hecke_matrix(k, basis, m)?;
        let cp = charpoly(&t);
        if !is_squarefree(&cp) {
            continue;
        }
        let roots = real_roots(&cp, EIGENVALUE_BITS);
        if roots.len() != d {
            return Err(Error::InconsistentDimension { formula: d, constructed: roots.len() });
        }
        return Ok(roots.iter().map(|lam| eigenvector(&t, lam, m)).collect());
    }
    Err(Error::RepeatedEigenvalue(k))
}

fn eigenvector(t: &Matrix, lam: &BigRational, operator: usize) -> EigenCoordinates {
    let n = t.len();
    let mut a = t.clone();
    for (i, row) in a.iter_mut().enumerate() {
        row[i] -= lam;
    }
    let adj = adjugate(&a);
    // adj(T − λI) has rank one at an exact simple eigenvalue; every column is an eigenvector.
    let col = (0..n)
        .max_by(|&i, &j| adj[0][i].abs().cmp(&adj[0][j].abs()))
        .expect("nonempty matrix");
    let v: Vec<BigRational> = (0..n).map(|i| &adj[i][col] / &adj[0][col]).collect();
    let denominator = v.iter().fold(BigInt::one(), |l, x| l.lcm(x.denom()));
    let numerators = v.iter().map(|x| x.numer() * (&denominator / x.denom())).collect();
    EigenCoordinates { numerators, denominator, operator }
}

/// All normalized eigenforms of weight k with λ(m) for m ≤ coeff_limit.
pub fn eigenforms<T: Real>(k: u32, coeff_limit: usize) -> Result<Vec<Eigenform<T>>> {
    if k % 2 == 1 || k < 12 {
        return Err(Error::InvalidArgument(format!("eigenforms need even weight ≥ 12, got {k}")));
    }
    if coeff_limit < 2 {
        return Err(Error::InvalidArgument("coefficient limit must be at least 2".into()));
    }
    let d = cusp_dimension(k);
    if d == 0 {
        return Ok(Vec::new());
    }
    let internal = coeff_limit.max(MIN_INTERNAL_COEFFS);
    let order = internal.max(5 * (d + 1)).max(d + 10);
    let basis = miller_basis(k, order)?;
    let coords = eigen_coordinates(k, &basis)?;
    coords
        .iter()
        .enumerate()
        .map(|(idx, v)| {
            let scaled = v.scaled_coefficients(&basis, internal);
            let (raw, normalized) = normalize::<T>(k, &scaled, &v.denominator);
            let norm = petersson_norm_from(k, &normalized, T::lit(NORM_TOLERANCE))?;
            Ok(Eigenform {
                weight: k,
                eigenvalue_index: idx,
                raw_coeffs: raw[..coeff_limit].to_vec(),
                normalized: normalized[..coeff_limit].to_vec(),
                petersson_norm: norm,
                harmonic_weight: harmonic_weight_from(k, norm)?,
            })
        })
        .collect()
}

fn normalize<T: Real>(k: u32, scaled: &[BigInt], denominator: &BigInt) -> (Vec<T>, Vec<T>) {
    let (dm, de) = split_f64(denominator);
    let half = (k as i32 - 2) / 2;
    scaled
        .iter()
        .enumerate()
        .map(|(i, a)| {
            let m = (i + 1) as f64;
            let (am, ae) = split_f64(a);
            let raw = am / dm * 2f64.powi((ae - de) as i32);
            let lam = raw / m.powi(half) / m.sqrt();
            (T::lit(raw), T::lit(lam))
        })
        .unzip()
}

/// x = mantissa · 2^exponent with the mantissa rounded from the leading 64 bits.
fn split_f64(x: &BigInt) -> (f64, i64) {
    let bits = x.bits() as i64;
    if bits <= 64 {
        return (x.to_f64().expect("finite"), 0);
    }
    let shift = bits - 64;
    let top = x >> shift as usize;
    (top.to_f64().expect("finite"), shift)
}

/// log of (Σ_{m>n} 2√m m^{(k−1)/2} e^{−2πmy}), the tail of f beyond n terms under |λ(m)| ≤ τ(m).
fn log_tail_bound<T: Real>(k: u32, n: usize, y: T) -> T {
    let half = T::lit((k as f64 - 1.0) / 2.0 + 0.5);
    let log_term = |m: usize| {
        let mf = T::from_usize_exact(m);
        T::LN_2() + half * mf.ln() - T::TAU() * mf * y
    };
    let mut m = n + 1;
    let first = log_term(m);
    let mut sum = T::zero();
    loop {
        let lt = log_term(m);
        sum = sum + (lt - first).exp();
        if lt - first < T::lit(-60.0) && m as f64 > (k as f64) / (4.0 * y.to_f64().unwrap()) {
            break;
        }
        m += 1;
    }
    first + sum.ln()
}

/// Evaluates f(z) = Σ λ(m) m^{(k−1)/2} e(mz) on y ≥ √3/2, keeping only terms above e^{−80}
/// of the largest one at the lowest height.
#[derive(Clone, Debug)]
pub struct CuspEvaluator<T> {
    pub weight: u32,
    amp: Vec<T>,
}

impl<T: Real> CuspEvaluator<T> {
    pub fn new(k: u32, lambda: &[T]) -> Self {
        let y_low = T::lit(0.75).sqrt();
        let log_size = |m: usize| {
            let mf = T::from_usize_exact(m);
            T::lit((k as f64 - 1.0) / 2.0) * mf.ln() - T::TAU() * mf * y_low
        };
        let peak = (1..=lambda.len()).map(log_size).fold(T::neg_infinity(), T::max);
        let used = (1..=lambda.len())
            .rev()
            .find(|&m| log_size(m) > peak - T::lit(80.0))
            .unwrap_or(0);
        let amp = lambda[..used]
            .iter()
            .enumerate()
            .map(|(i, &l)| {
                let m = T::from_usize_exact(i + 1);
                l * (T::lit((k as f64 - 1.0) / 2.0) * m.ln()).exp()
            })
            .collect();
        CuspEvaluator { weight: k, amp }
    }

    pub fn terms(&self) -> usize {
        self.amp.len()
    }

    /// (Re f, Im f) at x + iy by Horner in q = e(x + iy).
    pub fn eval(&self, x: T, y: T) -> (T, T) {
        let r = (-T::TAU() * y).exp();
        let (s, c) = (T::TAU() * x).sin_cos();
        let (qr, qi) = (r * c, r * s);
        let (mut fr, mut fi) = (T::zero(), T::zero());
        for &a_m in self.amp.iter().rev() {
            let nr = (fr + a_m) * qr - fi * qi;
            let ni = (fr + a_m) * qi + fi * qr;
            fr = nr;
            fi = ni;
        }
        (fr, fi)
    }

    /// Bound on |f − (evaluated part)| at height y, under |λ(m)| ≤ τ(m) ≤ 2√m.
    pub fn truncation_bound(&self, y: T) -> T {
        log_tail_bound::<T>(self.weight, self.amp.len(), y).exp()
    }

    /// Height beyond which |f|² y^{k−2+extra} has dropped below e^{−41.5} of its peak on F.
    pub fn integration_height(&self, extra: T) -> T {
        let k = self.weight;
        let bound = |y: T| {
            T::lit(2.0) * log_tail_bound::<T>(k, 0, y) + (T::from_usize_exact(k as usize - 2) + extra) * y.ln()
        };
        let mut y_top = T::one();
        let mut peak = bound(T::lit(0.75).sqrt());
        loop {
            let b = bound(y_top);
            peak = peak.max(b);
            if y_top > (T::from_usize_exact(k as usize - 2) + extra) / T::TAU() && b < peak - T::lit(41.5) {
                return y_top;
            }
            y_top = y_top + T::one();
        }
    }
}

/// Petersson norm (3/π) ∫_F |f|² y^{k−2} dx dy from normalized coefficients.
pub fn petersson_norm_from<T: Real>(k: u32, lambda: &[T], tolerance: T) -> Result<T> {
    let y_low = T::lit(0.75).sqrt();
    let ev = CuspEvaluator::new(k, lambda);
    let y_top = ev.integration_height(T::zero());

    let integrate = |n: usize| -> (T, T) {
        let gx = gauss_legendre::<T>(n);
        let gy = gauss_legendre::<T>(n);
        let mut total = T::zero();
        let mut trunc = T::zero();
        for (x, wx) in gx.on(T::zero(), T::lit(0.5)) {
            let y0 = (T::one() - x * x).sqrt();
            let panels = (y_top - y0).ceil().to_usize().unwrap_or(1).max(1);
            let width = (y_top - y0) / T::from_usize_exact(panels);
            for p in 0..panels {
                let a = y0 + width * T::from_usize_exact(p);
                for (y, wy) in gy.on(a, a + width) {
                    let (fr, fi) = ev.eval(x, y);
                    let absf = (fr * fr + fi * fi).sqrt();
                    let yk = (T::from_usize_exact(k as usize - 2) * y.ln()).exp();
                    let t = ev.truncation_bound(y);
                    total = total + wx * wy * absf * absf * yk;
                    trunc = trunc + wx * wy * (T::lit(2.0) * absf * t + t * t) * yk;
                }
            }
        }
        (total, trunc)
    };

    let mut n = 24;
    let (mut prev, _) = integrate(n);
    loop {
        n *= 2;
        let (cur, trunc) = integrate(n);
        if (cur - prev).abs() <= tolerance * cur {
            if trunc > tolerance * cur * T::lit(0.1) {
                let mut needed = ev.terms().max(1);
                while log_tail_bound::<T>(k, needed, y_low).exp() > tolerance * cur * T::lit(1e-3) {
                    needed *= 2;
                }
                return Err(Error::InsufficientOrder { needed, have: lambda.len() });
            }
            return Ok(cur * T::lit(6.0) / T::PI());
        }
        if n > 768 {
            return Err(Error::Quadrature(format!("Petersson norm did not converge at weight {k}")));
        }
        prev = cur;
    }
}

pub fn petersson_norm<T: Real>(form: &Eigenform<T>, tolerance: T) -> Result<T> {
    petersson_norm_from(form.weight, &form.normalized, tolerance)
}

/// ω_f = Γ(k−1)/((4π)^{k−1}⟨f,f⟩).
pub fn harmonic_weight_from<T: Real>(k: u32, norm: T) -> Result<T> {
    let km1 = T::from_usize_exact(k as usize - 1);
    Ok((ln_gamma_real(km1)? - km1 * (T::lit(4.0) * T::PI()).ln()).exp() / norm)
}

pub fn harmonic_weight<T: Real>(form: &Eigenform<T>) -> Result<T> {
    harmonic_weight_from(form.weight, form.petersson_norm)
}
