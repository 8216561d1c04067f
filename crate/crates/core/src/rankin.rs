//! Rankin–Selberg L-series of two level-one eigenforms: Dirichlet coefficients, central values
//! through the approximate functional equation, the residue at s = 1, the real-analytic
//! Eisenstein series and the unfolding identity.

use crate::arith::{ideal_norm_counts, IdealCountTable};
use crate::error::{Error, Result};
use crate::field::BaseField;
use crate::modforms::{CuspEvaluator, Eigenform};
use crate::scalar::Real;
use crate::specfun::{
    bessel_k, bessel_k_complex, completed_zeta, gauss_legendre, ln_gamma, ln_gamma_real, VProfile,
};
use num_complex::Complex;

/// Explicit constant in |b_n| ≤ 7n (from τ(e)² ≤ 4e and Σ d^{−2} < 7/4).
const COEFF_BOUND: f64 = 7.0;

/// b_j = Σ_{d²e = j} a_d λ_f(e) λ_g(e) for j = 1..=limit (index j − 1).
pub fn rs_dirichlet_coefficients<T: Real>(
    lf: &[T],
    lg: &[T],
    counts: &IdealCountTable,
    limit: usize,
) -> Result<Vec<T>> {
    if limit > lf.len() || limit > lg.len() {
        return Err(Error::InsufficientOrder { needed: limit, have: lf.len().min(lg.len()) });
    }
    let mut b = vec![T::zero(); limit];
    let mut d = 1;
    while d * d <= limit {
        if d > counts.limit {
            return Err(Error::InsufficientOrder { needed: d, have: counts.limit });
        }
        let a = T::from_u64(counts.get(d)).unwrap();
        if a != T::zero() {
            for e in 1..=limit / (d * d) {
                b[d * d * e - 1] = b[d * d * e - 1] + a * lf[e - 1] * lg[e - 1];
            }
        }
        d += 1;
    }
    Ok(b)
}

/// Width β of the default AFE test factor e^{βu²}; the central value does not depend on it.
pub const AFE_TEST_FACTOR: f64 = 0.25;

/// Rigorous truncation plan for 2 Σ_n b_n n^{−1/2} V(4π²n) at level one; it depends on the
/// V-profile only, through |b_n| ≤ Σ_{d²e=n} τ(e)² (Deligne) and |b_n| ≤ 7n.
#[derive(Debug, Clone)]
pub struct AfeTail<T> {
    pub profile: VProfile<T>,
    pub tolerance: T,
    /// suffix[n] bounds 2 Σ_{n<m≤cap} |b_m| m^{−1/2} |V(4π²m)|.
    suffix: Vec<T>,
    /// Bound for m > cap.
    far: T,
}

impl<T: Real> AfeTail<T> {
    /// Default profile e^{βu²} with β = AFE_TEST_FACTOR for weight k, tolerance 10^{−12}.
    pub fn for_weight(k: u32) -> Result<Self> {
        let profile = VProfile::with_params(vec![k], T::lit(1.5), T::lit(AFE_TEST_FACTOR), T::lit(1e-8), T::BITS)?;
        Self::new(profile, T::lit(1e-12))
    }

    pub fn new(profile: VProfile<T>, tolerance: T) -> Result<Self> {
        if !(tolerance > T::zero()) {
            return Err(Error::InvalidArgument("tolerance must be positive".into()));
        }
        let mut tail = AfeTail { profile, tolerance, suffix: Vec::new(), far: T::zero() };
        let quarter = tolerance * T::lit(0.25);
        let mut cap = 256usize;
        while tail.crude(cap)? > quarter {
            cap *= 2;
            if cap > 1 << 24 {
                return Err(Error::TailBound(format!(
                    "AFE tail above {:e} beyond 2^24 terms",
                    tolerance.to_f64().unwrap_or(f64::NAN)
                )));
            }
        }
        let mut tau = vec![0u32; cap + 1];
        for d in 1..=cap {
            for m in (d..=cap).step_by(d) {
                tau[m] += 1;
            }
        }
        let root = (1..).take_while(|d: &usize| d * d <= cap).last().unwrap_or(1);
        let a = ideal_norm_counts(&BaseField::Rational, 1, root)?;
        let mut majorant = vec![T::zero(); cap + 1];
        for d in 1..=root {
            let ad = T::from_u64(a.get(d)).unwrap();
            for e in 1..=cap / (d * d) {
                let t = T::from_u32(tau[e] * tau[e]).unwrap();
                majorant[d * d * e] = majorant[d * d * e] + ad * t;
            }
        }
        // |V| is decreasing in y, so each block uses the bound at its left end.
        let mut per_term = vec![T::zero(); cap + 1];
        let mut start = 1usize;
        while start <= cap {
            let stop = (start + start / 50 + 1).min(cap + 1);
            let vb = tail.profile.tail_bound(Self::scale() * T::from_usize_exact(start))?;
            for m in start..stop {
                per_term[m] = majorant[m] / T::from_usize_exact(m).sqrt() * vb;
            }
            start = stop;
        }
        let mut suffix = vec![T::zero(); cap + 1];
        for n in (0..cap).rev() {
            suffix[n] = suffix[n + 1] + T::lit(2.0) * per_term[n + 1];
        }
        tail.far = tail.crude(cap)?;
        tail.suffix = suffix;
        Ok(tail)
    }

    fn scale() -> T {
        T::lit(4.0) * T::PI() * T::PI()
    }

    fn crude(&self, n: usize) -> Result<T> {
        let tail = self.profile.dirichlet_tail_bound(T::from_usize_exact(n.max(1)), T::lit(0.5), Self::scale())?;
        Ok(T::lit(2.0 * COEFF_BOUND) * tail)
    }

    /// Rigorous bound on 2 Σ_{m>n} |b_m| m^{−1/2} |V(4π²m)|.
    pub fn bound(&self, n: usize) -> Result<T> {
        match self.suffix.get(n) {
            Some(&s) => Ok(s + self.far),
            None => self.crude(n),
        }
    }

    /// Smallest N whose tail bound meets the tolerance.
    pub fn truncation(&self) -> Result<usize> {
        for (n, &s) in self.suffix.iter().enumerate() {
            if s + self.far <= self.tolerance {
                return Ok(n.max(1));
            }
        }
        Err(Error::TailBound("AFE tail bound never met".into()))
    }
}

/// A pair (f, g) of equal weight with the truncation plan used for its central value.
#[derive(Debug, Clone)]
pub struct RSContext<'a, T> {
    pub f: &'a Eigenform<T>,
    pub g: &'a Eigenform<T>,
    pub counts: IdealCountTable,
    pub tail: AfeTail<T>,
}

impl<'a, T: Real> RSContext<'a, T> {
    pub fn new(f: &'a Eigenform<T>, g: &'a Eigenform<T>) -> Result<Self> {
        Self::with_tail(f, g, AfeTail::for_weight(f.weight)?)
    }

    pub fn with_profile(f: &'a Eigenform<T>, g: &'a Eigenform<T>, profile: VProfile<T>, tolerance: T) -> Result<Self> {
        Self::with_tail(f, g, AfeTail::new(profile, tolerance)?)
    }

    pub fn with_tail(f: &'a Eigenform<T>, g: &'a Eigenform<T>, tail: AfeTail<T>) -> Result<Self> {
        if f.weight != g.weight {
            return Err(Error::InvalidArgument(format!("weights {} and {} differ", f.weight, g.weight)));
        }
        if tail.profile.weights != [f.weight] {
            return Err(Error::InvalidArgument("V-profile weight does not match the forms".into()));
        }
        let limit = f.coeff_limit().min(g.coeff_limit());
        let counts = ideal_norm_counts(&BaseField::Rational, 1, limit.max(1))?;
        Ok(RSContext { f, g, counts, tail })
    }

    pub fn weight(&self) -> u32 {
        self.f.weight
    }

    pub fn profile(&self) -> &VProfile<T> {
        &self.tail.profile
    }

    pub fn afe_tail_bound(&self, n: usize) -> Result<T> {
        self.tail.bound(n)
    }

    pub fn truncation(&self) -> Result<usize> {
        self.tail.truncation()
    }

    pub fn coefficients(&self, limit: usize) -> Result<Vec<T>> {
        rs_dirichlet_coefficients(&self.f.normalized, &self.g.normalized, &self.counts, limit)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CentralValue<T> {
    pub value: T,
    /// 2 Σ_{n≤N} b_n n^{−1/2} V(4π²n) before the polar correction.
    pub afe_sum: T,
    /// Contribution of the poles of Λ(s, f⊗f) at s = 0, 1; zero when f ≠ g.
    pub polar_term: T,
    pub terms: usize,
    pub afe_error_estimate: T,
}

/// 2 Σ_{n ≤ N} b_n n^{−1/2} V(4π²n) for an explicit N, summed in increasing n (no polar term).
pub fn central_value_terms<T: Real>(ctx: &RSContext<T>, n: usize) -> Result<T> {
    let b = ctx.coefficients(n)?;
    let scale = T::lit(4.0) * T::PI() * T::PI();
    let mut sum = T::zero();
    for (i, &bn) in b.iter().enumerate() {
        let m = T::from_usize_exact(i + 1);
        sum = sum + bn / m.sqrt() * ctx.profile().eval(scale * m)?;
    }
    Ok(T::lit(2.0) * sum)
}

/// L(1/2, f⊗g) by the approximate functional equation, truncated by the rigorous tail bound.
pub fn central_value<T: Real>(ctx: &RSContext<T>) -> Result<CentralValue<T>> {
    let n = ctx.truncation()?;
    let have = ctx.f.coeff_limit().min(ctx.g.coeff_limit());
    if n > have {
        return Err(Error::InsufficientOrder { needed: n, have });
    }
    let afe_sum = central_value_terms(ctx, n)?;
    let polar_term = if ctx.f == ctx.g { polar_term(ctx.f, ctx.profile().test_factor)? } else { T::zero() };
    Ok(CentralValue {
        value: afe_sum - polar_term,
        afe_sum,
        polar_term,
        terms: n,
        afe_error_estimate: ctx.afe_tail_bound(n)?,
    })
}

/// Residues of Λ(1/2+u, f⊗f)e^{βu²}/u at u = ±1/2, divided by L∞(1/2):
/// 4e^{β/4} · Γ(k)/(2π√π Γ(k−1/2)) · Res_{s=1} L(s, f⊗f).
pub fn polar_term<T: Real>(f: &Eigenform<T>, beta: T) -> Result<T> {
    let k = T::from_u32(f.weight).unwrap();
    let half = T::lit(0.5);
    let ratio = (ln_gamma_real(k)? - ln_gamma_real(k - half)?).exp() / (T::TAU() * T::PI().sqrt());
    Ok(T::lit(4.0) * (beta * T::lit(0.25)).exp() * ratio * shimura_formula(f)?)
}

/// Res_{s=1} L(s, f⊗f) = (4π)^k ζ(2) Γ(k)^{−1} ⟨f,f⟩.
pub fn shimura_formula<T: Real>(f: &Eigenform<T>) -> Result<T> {
    let k = T::from_u32(f.weight).unwrap();
    let zeta2 = T::PI() * T::PI() / T::lit(6.0);
    Ok((k * (T::lit(4.0) * T::PI()).ln() - ln_gamma_real(k)?).exp() * zeta2 * f.petersson_norm)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShimuraCheck<T> {
    pub residue_estimate: T,
    pub formula_value: T,
    pub relative_gap: T,
}

/// Least-squares slope (through the origin) of X ↦ Σ_{j≤X} b_j over the grid, against the
/// closed-form residue.
pub fn shimura_residue_check<T: Real>(f: &Eigenform<T>, x_grid: &[usize]) -> Result<ShimuraCheck<T>> {
    let xmax = *x_grid.iter().max().ok_or_else(|| Error::InvalidArgument("empty X grid".into()))?;
    let counts = ideal_norm_counts(&BaseField::Rational, 1, xmax)?;
    let b = rs_dirichlet_coefficients(&f.normalized, &f.normalized, &counts, xmax)?;
    let mut partial = Vec::with_capacity(xmax);
    let mut s = T::zero();
    for &v in &b {
        s = s + v;
        partial.push(s);
    }
    let (mut num, mut den) = (T::zero(), T::zero());
    for &x in x_grid {
        let xf = T::from_usize_exact(x);
        num = num + partial[x - 1] * xf;
        den = den + xf * xf;
    }
    let estimate = num / den;
    let formula = shimura_formula(f)?;
    Ok(ShimuraCheck { residue_estimate: estimate, formula_value: formula, relative_gap: (estimate / formula - T::one()).abs() })
}

/// Evenly spaced grid of `points` values on [x/2, x].
pub fn upper_half_grid(x: usize, points: usize) -> Vec<usize> {
    (0..points).map(|i| x / 2 + (x - x / 2) * i / (points - 1).max(1)).collect()
}

/// Real-analytic Eisenstein series for SL_2(Z) through its Fourier expansion.
///
/// Completed: E*(z,s) = ξ(2s)y^s + ξ(2s−1)y^{1−s} + 4√y Σ_{n≥1} n^{s−1/2}σ_{1−2s}(n)K_{s−1/2}(2πny)cos(2πnx),
/// with ξ(s) = π^{−s/2}Γ(s/2)ζ(s). Otherwise E = E*/ξ(2s) = Σ_{(c,d)=1, ±} y^s/|cz+d|^{2s}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EisensteinSeries<T> {
    pub s: Complex<T>,
    /// Fourier terms used for y ≥ y_min.
    pub truncation: usize,
    pub y_min: T,
    pub completed: bool,
}

/// Step for the symmetric Richardson limit of the constant term around s = 1/2.
const RICHARDSON_STEP: f64 = 1e-3;

impl<T: Real> EisensteinSeries<T> {
    pub fn new(s: Complex<T>, y_min: T, completed: bool) -> Result<Self> {
        if !(y_min > T::zero()) {
            return Err(Error::InvalidArgument("y_min must be positive".into()));
        }
        Ok(EisensteinSeries { s, truncation: Self::terms_for(s, y_min), y_min, completed })
    }

    fn terms_for(s: Complex<T>, y: T) -> usize {
        let budget = T::from_u32(T::BITS + 12).unwrap() * T::LN_2() + T::lit(2.0) * s.re.abs() * T::lit(5.0);
        (budget / (T::TAU() * y)).ceil().to_usize().unwrap_or(1).max(1) + 2
    }

    fn raw_constant(s: Complex<T>, y: T) -> Result<Complex<T>> {
        let two = T::lit(2.0);
        let one = Complex::new(T::one(), T::zero());
        let ly = y.ln();
        Ok(completed_zeta(s * two)? * (s * ly).exp() + completed_zeta(s * two - one)? * ((one - s) * ly).exp())
    }

    /// ξ(2s)y^s + ξ(2s−1)y^{1−s}; within 10^{−3} of s = 1/2 the two poles cancel and the value is
    /// taken as a Richardson-extrapolated symmetric average around s.
    pub fn constant_term(&self, y: T) -> Result<Complex<T>> {
        let half = Complex::new(T::lit(0.5), T::zero());
        let dist = (self.s - half).norm();
        if dist >= T::lit(RICHARDSON_STEP) {
            return Self::raw_constant(self.s, y);
        }
        let h = Complex::new(T::lit(RICHARDSON_STEP) + dist, T::zero());
        let avg = |h: Complex<T>| -> Result<Complex<T>> {
            Ok((Self::raw_constant(self.s + h, y)? + Self::raw_constant(self.s - h, y)?) * T::lit(0.5))
        };
        let a1 = avg(h)?;
        let a2 = avg(h * T::lit(2.0))?;
        Ok((a1 * T::lit(4.0) - a2) / T::lit(3.0))
    }

    fn k_bessel(&self, x: T) -> Result<Complex<T>> {
        let nu = self.s - Complex::new(T::lit(0.5), T::zero());
        if nu.im == T::zero() {
            Ok(Complex::new(bessel_k(nu.re.abs(), x)?, T::zero()))
        } else {
            bessel_k_complex(nu, x)
        }
    }

    pub fn value(&self, x: T, y: T) -> Result<Complex<T>> {
        if !(y > T::zero()) {
            return Err(Error::InvalidArgument("Eisenstein series needs y > 0".into()));
        }
        let n_max = if y >= self.y_min { self.truncation } else { Self::terms_for(self.s, y) };
        let half = Complex::new(T::lit(0.5), T::zero());
        let one_minus_2s = Complex::new(T::one(), T::zero()) - self.s * T::lit(2.0);
        let mut sum = Complex::new(T::zero(), T::zero());
        for n in 1..=n_max {
            let nf = T::from_usize_exact(n);
            let mut sigma = Complex::new(T::zero(), T::zero());
            for d in 1..=n {
                if n % d == 0 {
                    sigma = sigma + (one_minus_2s * T::from_usize_exact(d).ln()).exp();
                }
            }
            let power = ((self.s - half) * nf.ln()).exp();
            let kb = self.k_bessel(T::TAU() * nf * y)?;
            sum = sum + power * sigma * kb * (T::TAU() * nf * x).cos();
        }
        let e_star = self.constant_term(y)? + sum * (T::lit(4.0) * y.sqrt());
        if self.completed {
            Ok(e_star)
        } else {
            Ok(e_star / completed_zeta(self.s * T::lit(2.0))?)
        }
    }
}

pub fn eisenstein_value<T: Real>(z: Complex<T>, series: &EisensteinSeries<T>) -> Result<Complex<T>> {
    series.value(z.re, z.im)
}

/// E*(z, s) for real s > 1 from the lattice sum π^{−s}Γ(s)/2 · Σ' y^s/|cz+d|^{2s}: the box
/// |c|, |d| ≤ R with trapezoid weights on its boundary, plus the exact polar integral of the
/// summand outside the box.
pub fn eisenstein_lattice_sum<T: Real>(x: T, y: T, s: T, radius: usize) -> Result<T> {
    if !(s > T::one()) || !(y > T::zero()) || radius == 0 {
        return Err(Error::InvalidArgument("lattice sum needs s > 1, y > 0, R ≥ 1".into()));
    }
    let r = radius as i64;
    let mut acc = T::zero();
    let mut comp = T::zero();
    for c in -r..=r {
        let cf = T::from_i64_exact(c);
        for d in -r..=r {
            if c == 0 && d == 0 {
                continue;
            }
            let mut w = T::one();
            if c.abs() == r {
                w = w * T::lit(0.5);
            }
            if d.abs() == r {
                w = w * T::lit(0.5);
            }
            let u = cf * x + T::from_i64_exact(d);
            let v = cf * y;
            let term = w * (u * u + v * v).powf(-s);
            let t = acc + term;
            comp = comp + if acc.abs() >= term.abs() { (acc - t) + term } else { (term - t) + acc };
            acc = t;
        }
    }
    let rr = T::from_i64_exact(r);
    let gl = gauss_legendre::<T>(48);
    let mut outside = T::zero();
    for oct in 0..8 {
        let a = T::FRAC_PI_4() * T::from_usize_exact(oct);
        for (th, w) in gl.on(a, a + T::FRAC_PI_4()) {
            let (sn, cs) = th.sin_cos();
            let u = cs * x + sn;
            let v = cs * y;
            let q = u * u + v * v;
            let rb = rr / cs.abs().max(sn.abs());
            outside = outside + w * q.powf(-s) * rb.powf(T::lit(2.0) - T::lit(2.0) * s);
        }
    }
    outside = outside / (T::lit(2.0) * s - T::lit(2.0));
    let pref = (ln_gamma_real(s)? - s * T::PI().ln()).exp() * T::lit(0.5) * y.powf(s);
    Ok(pref * (acc + comp + outside))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnfoldCheck<T> {
    pub lhs: T,
    pub rhs: T,
    pub relative_gap: T,
    /// Smoothing length N of the Dirichlet series on the right-hand side.
    pub smoothing_length: usize,
}

const SMOOTHING_BETA: f64 = 1.0 / 16.0;

/// L(s, f⊗g) for real s > 1 from Σ b_n n^{−s} φ(n/N), φ(x) = erfc(log x/(2√β))/2, corrected by
/// the residue term R e^{β(1−s)²} N^{1−s}/(1−s) when f = g.
pub fn rankin_selberg_value<T: Real>(f: &Eigenform<T>, g: &Eigenform<T>, s: T) -> Result<(T, usize)> {
    if !(s > T::one()) {
        return Err(Error::InvalidArgument("the smoothed Dirichlet series needs s > 1".into()));
    }
    let limit = f.coeff_limit().min(g.coeff_limit());
    let n_len = (limit / 10).max(1);
    let nf = T::from_usize_exact(n_len);
    let beta = T::lit(SMOOTHING_BETA);
    let phi = VProfile::smoothing(beta, T::one() / nf, T::BITS)?;
    let tail = T::lit(COEFF_BOUND) * phi.dirichlet_tail_bound(T::from_usize_exact(limit), T::one() - s, T::one() / nf)?;
    if tail > T::lit(1e-9) {
        return Err(Error::InsufficientOrder { needed: limit * 2, have: limit });
    }
    let counts = ideal_norm_counts(&BaseField::Rational, 1, limit)?;
    let b = rs_dirichlet_coefficients(&f.normalized, &g.normalized, &counts, limit)?;
    let mut sum = T::zero();
    for (i, &bn) in b.iter().enumerate() {
        let m = T::from_usize_exact(i + 1);
        sum = sum + bn * (-s * m.ln()).exp() * phi.eval(m / nf)?;
    }
    if f == g {
        let one_minus = T::one() - s;
        let pole = shimura_formula(f)? * (beta * one_minus * one_minus + one_minus * nf.ln()).exp() / one_minus;
        sum = sum - pole;
    }
    Ok((sum, n_len))
}

/// (3/π)∫_F f·conj(g)·ζ(2s)E(z,s)·y^k dμ against (4π)^{1−s−k}(3/π)Γ(s+k−1)L(s, f⊗g).
pub fn unfold_identity_check<T: Real>(
    f: &Eigenform<T>,
    g: &Eigenform<T>,
    s: T,
    tolerance: T,
) -> Result<UnfoldCheck<T>> {
    if f.weight != g.weight {
        return Err(Error::InvalidArgument("unfolding needs equal weights".into()));
    }
    let k = f.weight;
    let kf = T::from_u32(k).unwrap();
    let (l_value, n_len) = rankin_selberg_value(f, g, s)?;
    let three_over_pi = T::lit(3.0) / T::PI();
    let rhs = three_over_pi
        * ((T::one() - s - kf) * (T::lit(4.0) * T::PI()).ln() + ln_gamma_real(s + kf - T::one())?).exp()
        * l_value;

    let ef = CuspEvaluator::new(k, &f.normalized);
    let eg = CuspEvaluator::new(k, &g.normalized);
    let y_top = ef.integration_height(s).max(eg.integration_height(s));
    let y_low = T::lit(0.75).sqrt();
    let eis = EisensteinSeries::new(Complex::new(s, T::zero()), y_low, true)?;
    let unfold_scale = (ln_gamma(Complex::new(s, T::zero()))?.re - s * T::PI().ln()).exp();

    let integrate = |n: usize| -> Result<T> {
        let gx = gauss_legendre::<T>(n);
        let gy = gauss_legendre::<T>(n);
        let mut total = T::zero();
        for (x, wx) in gx.on(T::zero(), T::lit(0.5)) {
            let y0 = (T::one() - x * x).sqrt();
            let panels = (y_top - y0).ceil().to_usize().unwrap_or(1).max(1);
            let width = (y_top - y0) / T::from_usize_exact(panels);
            for p in 0..panels {
                let a = y0 + width * T::from_usize_exact(p);
                for (y, wy) in gy.on(a, a + width) {
                    let (fr, fi) = ef.eval(x, y);
                    let (gr, gi) = eg.eval(x, y);
                    let prod = fr * gr + fi * gi;
                    let e = eis.value(x, y)?.re / unfold_scale;
                    let yk = (T::from_usize_exact(k as usize - 2) * y.ln()).exp();
                    total = total + wx * wy * prod * e * yk;
                }
            }
        }
        Ok(total * T::lit(2.0) * three_over_pi)
    };
    let mut n = 24;
    let mut prev = integrate(n)?;
    let lhs = loop {
        n *= 2;
        let cur = integrate(n)?;
        if (cur - prev).abs() <= tolerance * T::lit(0.01) * cur.abs() {
            break cur;
        }
        if n > 384 {
            return Err(Error::Quadrature("unfolding integral did not converge".into()));
        }
        prev = cur;
    };
    Ok(UnfoldCheck { lhs, rhs, relative_gap: ((lhs - rhs) / rhs).abs(), smoothing_length: n_len })
}
