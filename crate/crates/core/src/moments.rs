//! Petersson trace formula checks, the first-moment decomposition into M_g(k) + E_g(k), second
//! moments, harmonic-weight bounds and nonvanishing counts over level-one eigenforms.

use crate::arith::ideal_norm_counts;
use crate::error::{Error, Result};
use crate::field::BaseField;
use crate::kloosterman::{kloosterman_row, kloosterman_z};
use crate::modforms::Eigenform;
use crate::rankin::{central_value, AfeTail, RSContext};
use crate::scalar::Real;
use crate::specfun::{bessel_j, ln_gamma_real};
use serde::Serialize;
use std::fmt;
use std::str::FromStr;

/// κ in Σ_f ω_f λ_f(m)λ_f(n) = κ(δ_{m,n} + 2π i^{−k} Σ_c S(m,n;c)c^{−1}J_{k−1}(4π√(mn)/c)) when
/// ⟨·,·⟩ is normalized by the covolume: the volume π/3 of the fundamental domain.
pub fn trace_normalization<T: Real>() -> T {
    T::PI() / T::lit(3.0)
}

/// i^{−k} for even k.
fn i_pow_minus_k<T: Real>(k: u32) -> T {
    if (k / 2) % 2 == 0 {
        T::one()
    } else {
        -T::one()
    }
}

/// Bound on 2π Σ_{c>C} |S(m,n;c)|c^{−1}|J_{k−1}(4π√(mn)/c)| from |S| ≤ c and
/// |J_ν(x)| ≤ (x/2)^ν/Γ(ν+1): 2π(2π√(mn))^ν C^{1−ν}/((ν−1)Γ(ν+1)).
pub fn kloosterman_tail_bound<T: Real>(k: u32, mn: u64, c_max: usize) -> Result<T> {
    let nu = T::from_u32(k - 1).unwrap();
    Ok(log_tail_prefactor(nu, mn)?.exp() * T::from_usize_exact(c_max.max(1)).powf(T::one() - nu))
}

fn log_tail_prefactor<T: Real>(nu: T, mn: u64) -> Result<T> {
    let x = T::TAU() * T::from_u64(mn).unwrap().sqrt();
    Ok(T::TAU().ln() + nu * x.ln() - (nu - T::one()).ln() - ln_gamma_real(nu + T::one())?)
}

/// Smallest C with kloosterman_tail_bound(k, mn, C) ≤ tol.
pub fn kloosterman_cutoff<T: Real>(k: u32, mn: u64, tol: T) -> Result<usize> {
    if k < 4 {
        return Err(Error::InvalidArgument("the Kloosterman tail bound needs k ≥ 4".into()));
    }
    let nu = T::from_u32(k - 1).unwrap();
    let c = ((log_tail_prefactor(nu, mn)? - tol.ln()) / (nu - T::one())).exp().ceil();
    let mut c = c.to_usize().ok_or_else(|| Error::TailBound("Kloosterman cutoff overflow".into()))?.max(1);
    while c > 1 && kloosterman_tail_bound::<T>(k, mn, c - 1)? <= tol {
        c -= 1;
    }
    while kloosterman_tail_bound::<T>(k, mn, c)? > tol {
        c += 1;
    }
    Ok(c)
}

/// Rows S(r, 1; c), r mod c, computed on demand.
#[derive(Debug, Clone, Default)]
pub struct KloostermanCache<T> {
    rows: Vec<Vec<T>>,
}

impl<T: Real> KloostermanCache<T> {
    pub fn new() -> Self {
        KloostermanCache { rows: vec![Vec::new()] }
    }

    pub fn ensure(&mut self, c_max: usize) {
        while self.rows.len() <= c_max {
            let c = self.rows.len() as u64;
            self.rows.push(kloosterman_row(c));
        }
    }

    /// S(m, 1; c); requires ensure(c).
    pub fn get(&self, m: usize, c: usize) -> T {
        self.rows[c][m % c]
    }
}

/// δ_{m,n} + 2π i^{−k} Σ_{c≤C} S(m,n;c)c^{−1}J_{k−1}(4π√(mn)/c).
pub fn petersson_geometric<T: Real>(k: u32, m: u64, n: u64, c_max: usize) -> Result<T> {
    let x = T::lit(4.0) * T::PI() * T::from_u64(m * n).unwrap().sqrt();
    let mut sum = T::zero();
    for c in 1..=c_max {
        let cf = T::from_usize_exact(c);
        let s: T = kloosterman_z(m as i64, n as i64, c as u64)?;
        sum = sum + s / cf * bessel_j(k - 1, x / cf)?;
    }
    let delta = if m == n { T::one() } else { T::zero() };
    Ok(delta + T::TAU() * i_pow_minus_k::<T>(k) * sum)
}

/// 2π i^{−k} Σ_{c≤C(m)} S(m,1;c)c^{−1}J_{k−1}(4π√m/c) with C(m) from the tail bound.
fn kloosterman_term<T: Real>(k: u32, m: usize, tol: T, cache: &mut KloostermanCache<T>) -> Result<T> {
    let c_max = kloosterman_cutoff(k, m as u64, tol)?;
    cache.ensure(c_max);
    let x = T::lit(4.0) * T::PI() * T::from_usize_exact(m).sqrt();
    let mut sum = T::zero();
    for c in 1..=c_max {
        let cf = T::from_usize_exact(c);
        sum = sum + cache.get(m, c) / cf * bessel_j(k - 1, x / cf)?;
    }
    Ok(T::TAU() * i_pow_minus_k::<T>(k) * sum)
}

fn check_weight<T>(k: u32, forms: &[Eigenform<T>]) -> Result<()> {
    if k < 4 || k % 2 == 1 {
        return Err(Error::InvalidArgument(format!("weight {k} must be even and at least 4")));
    }
    if forms.iter().any(|f| f.weight != k) {
        return Err(Error::InvalidArgument(format!("forms are not all of weight {k}")));
    }
    Ok(())
}

fn coefficient_at<T: Real>(f: &Eigenform<T>, m: usize) -> Result<T> {
    f.normalized
        .get(m - 1)
        .copied()
        .ok_or(Error::InsufficientOrder { needed: m, have: f.coeff_limit() })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PeterssonCheck<T> {
    pub weight: u32,
    pub m: u64,
    pub n: u64,
    /// Σ_f (ω_f/κ) λ_f(m)λ_f(n).
    pub spectral: T,
    pub geometric: T,
    pub gap: T,
    pub c_max: usize,
    pub tail_bound: T,
}

/// Both sides of the Petersson formula with the Kloosterman series cut where its tail is below tol.
pub fn petersson_check<T: Real>(k: u32, forms: &[Eigenform<T>], m: u64, n: u64, tol: T) -> Result<PeterssonCheck<T>> {
    check_weight(k, forms)?;
    if m == 0 || n == 0 {
        return Err(Error::InvalidArgument("Hecke indices start at 1".into()));
    }
    let kappa = trace_normalization::<T>();
    let mut spectral = T::zero();
    for f in forms {
        spectral = spectral + f.harmonic_weight / kappa * coefficient_at(f, m as usize)? * coefficient_at(f, n as usize)?;
    }
    let c_max = kloosterman_cutoff(k, m * n, tol)?;
    let geometric = petersson_geometric(k, m, n, c_max)?;
    Ok(PeterssonCheck {
        weight: k,
        m,
        n,
        spectral,
        geometric,
        gap: (spectral - geometric).abs(),
        c_max,
        tail_bound: kloosterman_tail_bound(k, m * n, c_max)?,
    })
}

/// Σ_f ω_f λ_f(m)² divided by the geometric side at (m, m): the normalization constant κ.
pub fn calibrate_normalization<T: Real>(k: u32, forms: &[Eigenform<T>], m: u64, tol: T) -> Result<T> {
    check_weight(k, forms)?;
    if forms.is_empty() {
        return Err(Error::InvalidArgument(format!("S_{k} is zero; nothing to calibrate")));
    }
    let mut spectral = T::zero();
    for f in forms {
        let l = coefficient_at(f, m as usize)?;
        spectral = spectral + f.harmonic_weight * l * l;
    }
    let c_max = kloosterman_cutoff(k, m * m, tol)?;
    Ok(spectral / petersson_geometric(k, m, m, c_max)?)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CalibrationSummary<T> {
    pub per_weight: Vec<(u32, T)>,
    pub mean: T,
    pub relative_spread: T,
}

/// Mean and relative spread of κ over weights; non-constant κ is an error.
pub fn calibration_summary<T: Real>(per_weight: Vec<(u32, T)>, tolerance: T) -> Result<CalibrationSummary<T>> {
    if per_weight.is_empty() {
        return Err(Error::InvalidArgument("no weights to calibrate".into()));
    }
    let count = T::from_usize_exact(per_weight.len());
    let mean = per_weight.iter().fold(T::zero(), |a, &(_, v)| a + v) / count;
    let spread = per_weight.iter().fold(T::zero(), |a, &(_, v)| a.max((v - mean).abs())) / mean.abs();
    if spread > tolerance {
        return Err(Error::Calibration {
            spread: spread.to_f64().unwrap_or(f64::NAN),
            tolerance: tolerance.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(CalibrationSummary { per_weight, mean, relative_spread: spread })
}

/// Trace weights w_f recovered from Σ_f w_f λ_f(m) = δ_{m,1} + 2π i^{−k}Σ_c S(m,1;c)c^{−1}J_{k−1}(4π√m/c),
/// m = 1..dim, by Gaussian elimination.
pub fn trace_weights<T: Real>(k: u32, forms: &[Eigenform<T>], tol: T) -> Result<Vec<T>> {
    check_weight(k, forms)?;
    let d = forms.len();
    let mut a = vec![vec![T::zero(); d + 1]; d];
    for (i, row) in a.iter_mut().enumerate() {
        let m = i + 1;
        for (j, f) in forms.iter().enumerate() {
            row[j] = coefficient_at(f, m)?;
        }
        row[d] = petersson_geometric(k, m as u64, 1, kloosterman_cutoff(k, m as u64, tol)?)?;
    }
    for col in 0..d {
        let pivot = (col..d)
            .max_by(|&x, &y| a[x][col].abs().partial_cmp(&a[y][col].abs()).unwrap())
            .unwrap();
        if a[pivot][col] == T::zero() {
            return Err(Error::InvalidArgument("eigenvalue matrix is singular".into()));
        }
        a.swap(col, pivot);
        for r in 0..d {
            if r != col {
                let factor = a[r][col] / a[col][col];
                for c in col..=d {
                    let v = a[col][c];
                    a[r][c] = a[r][c] - factor * v;
                }
            }
        }
    }
    Ok((0..d).map(|i| a[i][d] / a[i][i]).collect())
}

/// Choice of the fixed form g at each weight.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GSelector {
    /// Lowest-eigenvalue eigenform of the weight (Δ at k = 12), reported as `delta12`.
    Delta12,
    /// Lowest-eigenvalue eigenform of the weight, reported as `first`.
    First,
    /// Eigenform with the given eigenvalue index.
    Index(usize),
}

impl GSelector {
    /// Index of g among the forms, or None when the space is zero.
    pub fn select<T>(&self, forms: &[Eigenform<T>]) -> Result<Option<usize>> {
        let i = match self {
            GSelector::Delta12 | GSelector::First => 0,
            GSelector::Index(i) => *i,
        };
        if forms.is_empty() {
            return Ok(None);
        }
        forms
            .iter()
            .position(|f| f.eigenvalue_index == i)
            .map(Some)
            .ok_or_else(|| Error::InvalidArgument(format!("no eigenform with index {i} (dimension {})", forms.len())))
    }
}

impl fmt::Display for GSelector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GSelector::Delta12 => write!(f, "delta12"),
            GSelector::First => write!(f, "first"),
            GSelector::Index(i) => write!(f, "index:{i}"),
        }
    }
}

impl FromStr for GSelector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "delta12" => Ok(GSelector::Delta12),
            "first" => Ok(GSelector::First),
            _ => s
                .strip_prefix("index:")
                .and_then(|i| i.parse().ok())
                .map(GSelector::Index)
                .ok_or_else(|| Error::InvalidArgument(format!("unknown g selector '{s}' (delta12, first, index:<i>)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FormMoment<T> {
    pub f_index: usize,
    /// ω_f = Γ(k−1)/((4π)^{k−1}⟨f,f⟩).
    pub harmonic_weight: T,
    /// ω_f/κ, the weight that makes the Petersson formula exact.
    pub trace_weight: T,
    pub central_value: T,
    pub afe_error_estimate: T,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FirstMoment<T> {
    pub weight: u32,
    pub dim: usize,
    pub g_index: Option<usize>,
    /// AFE length N shared by every form and by both sides of the identity.
    pub truncation: usize,
    pub per_form: Vec<FormMoment<T>>,
    /// Σ_f (ω_f/κ) L(1/2, f⊗g).
    pub first_moment_harmonic: T,
    /// 2 Σ_{d²≤N} a_d d^{−1} V(4π²d²).
    pub main_term: T,
    /// 2 Σ_m λ_g(m)m^{−1/2} Σ_{d²m≤N} a_d d^{−1}V(4π²md²) · 2π i^{−k}Σ_c S(m,1;c)c^{−1}J_{k−1}(4π√m/c).
    pub error_term: T,
    /// (ω_g/κ) times the polar correction of L(1/2, g⊗g).
    pub polar_term: T,
    /// |first_moment_harmonic + polar_term − (main_term + error_term)|.
    pub identity_gap: T,
}

/// Kloosterman-series tolerance per index m inside E_g(k).
const KLOOSTERMAN_TOL: f64 = 1e-14;

/// The first moment at weight k with the decomposition M_g(k) + E_g(k). When S_k = 0 the fixed
/// sequence is λ_g = δ_{m,1}, for which the identity reads 0 = M + E.
pub fn first_moment<T: Real>(
    k: u32,
    forms: &[Eigenform<T>],
    g: &GSelector,
    tail: &AfeTail<T>,
    cache: &mut KloostermanCache<T>,
) -> Result<FirstMoment<T>> {
    check_weight(k, forms)?;
    if tail.profile.weights != [k] {
        return Err(Error::InvalidArgument("V-profile weight does not match k".into()));
    }
    let gi = g.select(forms)?;
    let n = tail.truncation()?;
    let lg: Vec<T> = match gi {
        Some(i) => {
            let gf = &forms[i];
            if gf.coeff_limit() < n {
                return Err(Error::InsufficientOrder { needed: n, have: gf.coeff_limit() });
            }
            gf.normalized[..n].to_vec()
        }
        None => (1..=n).map(|m| if m == 1 { T::one() } else { T::zero() }).collect(),
    };
    let kappa = trace_normalization::<T>();

    let mut per_form = Vec::with_capacity(forms.len());
    let mut first = T::zero();
    let mut polar = T::zero();
    if let Some(i) = gi {
        for f in forms {
            let ctx = RSContext::with_tail(f, &forms[i], tail.clone())?;
            let cv = central_value(&ctx)?;
            let w = f.harmonic_weight / kappa;
            first = first + w * cv.value;
            polar = polar + w * cv.polar_term;
            per_form.push(FormMoment {
                f_index: f.eigenvalue_index,
                harmonic_weight: f.harmonic_weight,
                trace_weight: w,
                central_value: cv.value,
                afe_error_estimate: cv.afe_error_estimate,
            });
        }
    }

    let scale = T::lit(4.0) * T::PI() * T::PI();
    let mut v = Vec::with_capacity(n + 1);
    v.push(T::zero());
    for j in 1..=n {
        v.push(tail.profile.eval(scale * T::from_usize_exact(j))?);
    }
    let root = (1..).take_while(|d: &usize| d * d <= n).last().unwrap_or(1);
    let a = ideal_norm_counts(&BaseField::Rational, 1, root)?;
    // W(m) = Σ_{d²m≤N} a_d d^{−1} V(4π²md²)
    let w_of = |m: usize| -> T {
        let mut s = T::zero();
        let mut d = 1;
        while d * d * m <= n {
            s = s + T::from_u64(a.get(d)).unwrap() / T::from_usize_exact(d) * v[d * d * m];
            d += 1;
        }
        s
    };
    let main = T::lit(2.0) * w_of(1);
    let mut error = T::zero();
    for m in 1..=n {
        let l = lg[m - 1];
        if l == T::zero() {
            continue;
        }
        let kt = kloosterman_term(k, m, T::lit(KLOOSTERMAN_TOL), cache)?;
        error = error + l / T::from_usize_exact(m).sqrt() * w_of(m) * kt;
    }
    error = T::lit(2.0) * error;
    Ok(FirstMoment {
        weight: k,
        dim: forms.len(),
        g_index: gi,
        truncation: n,
        per_form,
        first_moment_harmonic: first,
        main_term: main,
        error_term: error,
        polar_term: polar,
        identity_gap: (first + polar - main - error).abs(),
    })
}

/// Σ_f |L(1/2, f⊗g)|².
pub fn second_moment<T: Real>(fm: &FirstMoment<T>) -> T {
    fm.per_form.iter().fold(T::zero(), |a, p| a + p.central_value * p.central_value)
}

/// Lower bound for the second moment implied by Cauchy–Schwarz:
/// (Σ w_f L_f)² ≤ (max w)² · dim · Σ L_f².
pub fn second_moment_lower_bound<T: Real>(fm: &FirstMoment<T>) -> T {
    let wmax = fm.per_form.iter().fold(T::zero(), |a, p| a.max(p.trace_weight.abs()));
    if fm.per_form.is_empty() || wmax == T::zero() {
        return T::zero();
    }
    fm.first_moment_harmonic * fm.first_moment_harmonic / (wmax * wmax * T::from_usize_exact(fm.per_form.len()))
}

/// #{f : |L(1/2, f⊗g)| > threshold}.
pub fn nonvanishing_count<T: Real>(fm: &FirstMoment<T>, threshold: T) -> usize {
    fm.per_form.iter().filter(|p| p.central_value.abs() > threshold).count()
}

/// max_f ω_f · k / log k, or None for an empty space.
pub fn omega_bound_check<T: Real>(k: u32, forms: &[Eigenform<T>]) -> Option<T> {
    let kf = T::from_u32(k).unwrap();
    forms.iter().map(|f| f.harmonic_weight * kf / kf.ln()).fold(None, |a, v| Some(a.map_or(v, |a: T| a.max(v))))
}

/// One row of the moment sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentReport {
    pub k: u32,
    pub dim: usize,
    pub g_id: String,
    pub first_moment_harmonic: f64,
    pub main_term: f64,
    pub error_term: f64,
    pub second_moment: f64,
    pub nonvanishing_count: usize,
    pub max_k_omega_over_logk: Option<f64>,
    pub calibration_const: Option<f64>,
    pub polar_term: f64,
    pub identity_gap: f64,
    pub truncation: usize,
    pub threshold: f64,
    pub per_form: Vec<FormMoment<f64>>,
}

/// CSV projection of a MomentReport.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentCsvRow {
    pub k: u32,
    pub dim: usize,
    pub g_id: String,
    pub first_moment_harmonic: f64,
    pub main_term: f64,
    pub error_term: f64,
    pub second_moment: f64,
    pub nonvanishing_count: usize,
    pub max_k_omega_over_logk: Option<f64>,
    pub calibration_const: Option<f64>,
}

impl MomentReport {
    pub fn csv_row(&self) -> MomentCsvRow {
        MomentCsvRow {
            k: self.k,
            dim: self.dim,
            g_id: self.g_id.clone(),
            first_moment_harmonic: self.first_moment_harmonic,
            main_term: self.main_term,
            error_term: self.error_term,
            second_moment: self.second_moment,
            nonvanishing_count: self.nonvanishing_count,
            max_k_omega_over_logk: self.max_k_omega_over_logk,
            calibration_const: self.calibration_const,
        }
    }
}

fn f64_of<T: Real>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Every per-weight statistic for one weight.
pub fn moment_report<T: Real>(
    k: u32,
    forms: &[Eigenform<T>],
    g: &GSelector,
    threshold: T,
    cache: &mut KloostermanCache<T>,
) -> Result<MomentReport> {
    let tail = AfeTail::for_weight(k)?;
    let fm = first_moment(k, forms, g, &tail, cache)?;
    let calibration = if forms.is_empty() {
        None
    } else {
        Some(f64_of(calibrate_normalization(k, forms, 1, T::lit(KLOOSTERMAN_TOL))?))
    };
    Ok(MomentReport {
        k,
        dim: forms.len(),
        g_id: g.to_string(),
        first_moment_harmonic: f64_of(fm.first_moment_harmonic),
        main_term: f64_of(fm.main_term),
        error_term: f64_of(fm.error_term),
        second_moment: f64_of(second_moment(&fm)),
        nonvanishing_count: nonvanishing_count(&fm, threshold),
        max_k_omega_over_logk: omega_bound_check(k, forms).map(f64_of),
        calibration_const: calibration,
        polar_term: f64_of(fm.polar_term),
        identity_gap: f64_of(fm.identity_gap),
        truncation: fm.truncation,
        threshold: f64_of(threshold),
        per_form: fm
            .per_form
            .iter()
            .map(|p| FormMoment {
                f_index: p.f_index,
                harmonic_weight: f64_of(p.harmonic_weight),
                trace_weight: f64_of(p.trace_weight),
                central_value: f64_of(p.central_value),
                afe_error_estimate: f64_of(p.afe_error_estimate),
            })
            .collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NonvanishingRow {
    pub k: u32,
    pub dim: usize,
    pub count: usize,
    /// k/(log k)^{c0}.
    pub curve: f64,
}

/// Counts per weight with the comparison curve k/(log k)^{c0}; the asymptotic is not asserted.
pub fn nonvanishing_report(reports: &[MomentReport], c0: f64) -> Vec<NonvanishingRow> {
    reports
        .iter()
        .map(|r| {
            let k = f64::from(r.k);
            NonvanishingRow { k: r.k, dim: r.dim, count: r.nonvanishing_count, curve: k / k.ln().powf(c0) }
        })
        .collect()
}
