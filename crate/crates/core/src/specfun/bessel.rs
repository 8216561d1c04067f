use super::dd::Dd;
use super::gamma::{ln_gamma, ln_gamma_real};
use crate::error::{Error, Result};
use crate::scalar::Real;
use num_complex::Complex;

/// Neumaier-compensated accumulator.
#[derive(Clone, Copy)]
struct Acc<T> {
    sum: T,
    comp: T,
}

impl<T: Real> Acc<T> {
    fn new() -> Self {
        Acc { sum: T::zero(), comp: T::zero() }
    }

    fn add(&mut self, x: T) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp = self.comp + ((self.sum - t) + x);
        } else {
            self.comp = self.comp + ((x - t) + self.sum);
        }
        self.sum = t;
    }

    fn value(&self) -> T {
        self.sum + self.comp
    }
}

/// Ascending series Σ (−1)^m (x/2)^{2m+ν} / (m! Γ(m+ν+1)). Where the terms first grow the
/// ratios and the running sum are carried as unevaluated pairs.
pub fn bessel_j_series<T: Real>(nu: T, x: T) -> Result<T> {
    if nu < T::zero() || x < T::zero() {
        return Err(Error::InvalidArgument("bessel_j_series needs ν ≥ 0 and x ≥ 0".into()));
    }
    if x == T::zero() {
        return Ok(if nu == T::zero() { T::one() } else { T::zero() });
    }
    let half = x * T::lit(0.5);
    let first = if nu == nu.floor() && nu <= T::lit(200.0) {
        let n = nu.to_usize().unwrap();
        (1..=n).fold(T::one(), |acc, j| acc * half / T::from_usize_exact(j))
    } else {
        (nu * half.ln() - ln_gamma_real(nu + T::one())?).exp()
    };
    let q = Dd::new(half).mul(Dd::new(half));
    let eps = T::epsilon();
    let growing = q.hi > nu + T::one();
    let mut sum = Dd::new(T::zero());
    let mut abs_sum = T::zero();
    let mut term = Dd::new(T::one());
    let mut m = 0usize;
    loop {
        sum = sum.add(term);
        abs_sum = abs_sum + term.hi.abs();
        let mf = T::from_usize_exact(m);
        let den = Dd::new(mf + T::one()).mul(Dd::new(mf + T::one() + nu));
        term = if growing {
            term.mul(q).div(den).neg()
        } else {
            Dd::new(-term.hi * q.hi / den.hi)
        };
        m += 1;
        let past_peak = mf * (mf + nu) > q.hi;
        if past_peak && term.hi.abs() <= eps * eps * sum.hi.abs().max(eps) {
            break;
        }
        if m > 100_000 {
            return Err(Error::SeriesDivergence(format!("no convergence for x = {x}")));
        }
    }
    let value = sum.value() * first;
    let envelope = value.abs().max(first.min((T::lit(2.0) / (T::PI() * x)).sqrt()));
    let working = if growing { eps * eps } else { eps };
    let guard = T::lit(2.0).powf(-T::lit(f64::from(T::BITS)) * T::lit(0.5));
    if abs_sum * first * working > guard * envelope {
        return Err(Error::SeriesDivergence(format!(
            "cancellation too large at nu = {nu}, x = {x}"
        )));
    }
    Ok(value)
}

fn mb_log_magnitude<T: Real>(nu: T, x: T, sigma: T) -> Result<T> {
    let h = T::lit(0.5);
    Ok(sigma * (x * h).ln() + ln_gamma_real((nu - sigma) * h)? - ln_gamma_real((nu + sigma) * h + T::one())?)
}

/// Contour abscissa within ν − 1/2 of the pole, as far right as the integrand magnitude at t = 0
/// permits (within e^4 of its minimum): larger σ means faster algebraic decay.
pub fn mellin_barnes_abscissa<T: Real>(nu: T, x: T) -> Result<T> {
    let lo = T::lit(0.5).min(nu * T::lit(0.5));
    let hi = nu - T::lit(0.5);
    if hi <= lo {
        return Ok(nu * T::lit(0.5));
    }
    let steps = 200;
    let grid: Vec<T> = (0..=steps)
        .map(|i| lo + (hi - lo) * T::from_usize_exact(i) / T::from_usize_exact(steps))
        .collect();
    let mags: Vec<T> = grid.iter().map(|&s| mb_log_magnitude(nu, x, s)).collect::<Result<_>>()?;
    let min = mags.iter().copied().fold(T::infinity(), T::min);
    let mut best = grid[0];
    for (s, m) in grid.iter().zip(&mags) {
        if *m <= min + T::lit(4.0) {
            best = *s;
        }
    }
    Ok(best)
}

/// J_ν(x) = (1/4πi) ∫_{(σ)} Γ((ν−s)/2)/Γ((ν+s)/2+1) (x/2)^s ds by trapezoid on Re s = σ.
pub fn bessel_j_mellin_barnes<T: Real>(nu: T, x: T, sigma: T) -> Result<T> {
    if !(sigma > T::zero() && sigma < nu) {
        return Err(Error::ContourOutOfRange {
            sigma: sigma.to_f64().unwrap_or(f64::NAN),
            order: nu.to_f64().unwrap_or(f64::NAN),
        });
    }
    if x <= T::zero() {
        return Err(Error::InvalidArgument("Mellin–Barnes needs x > 0".into()));
    }
    let half = T::lit(0.5);
    let lnx2 = (x * half).ln();
    let integrand = |t: T| -> Result<T> {
        let s = Complex::new(sigma, t);
        let a = ln_gamma((Complex::new(nu, T::zero()) - s) * half)?;
        let b = ln_gamma((Complex::new(nu, T::zero()) + s) * half + T::one())?;
        Ok((a - b + s * lnx2).exp().re)
    };
    let log_m0 = mb_log_magnitude(nu, x, sigma)?;
    let m0 = log_m0.exp();
    let tol = T::epsilon() * m0;
    // |F(σ+it)| ≈ (x/2)^σ (t/2)^{−σ−1}: the tail beyond T is below 2^{σ+1}(x/2)^σ T^{−σ}/σ.
    let ln_tail_coef = (sigma + T::one()) * T::LN_2() + sigma * lnx2 - sigma.ln() + T::lit(4.0).ln();
    let height = ((ln_tail_coef - (tol * T::TAU()).ln()) / sigma).exp().max(T::lit(10.0));
    if height > T::lit(1e7) {
        return Err(Error::Quadrature(format!(
            "Mellin–Barnes truncation height {height} too large at nu = {nu}, x = {x}, sigma = {sigma}"
        )));
    }
    let d = nu - sigma;
    let bits = T::lit(f64::from(T::BITS) + 8.0) * T::LN_2();
    let mut h = (T::TAU() * d / bits).min(T::lit(0.5));
    let mut n = (height / h).ceil().to_usize().unwrap_or(usize::MAX);
    let mut acc = Acc::new();
    acc.add(integrand(T::zero())? * half);
    for j in 1..=n {
        acc.add(integrand(h * T::from_usize_exact(j))?);
    }
    let mut value = acc.value() * h;
    for _ in 0..8 {
        let mut odd = Acc::new();
        for j in 0..n {
            odd.add(integrand(h * (T::from_usize_exact(j) + half))?);
        }
        let refined = value * half + odd.value() * h * half;
        let done = (refined - value).abs() <= tol * T::lit(16.0);
        value = refined;
        h = h * half;
        n *= 2;
        if done {
            return Ok(value / T::TAU());
        }
    }
    Err(Error::Quadrature(format!("Mellin–Barnes step halving did not settle at nu = {nu}, x = {x}")))
}

pub fn bessel_j_mellin_barnes_auto<T: Real>(nu: T, x: T) -> Result<T> {
    bessel_j_mellin_barnes(nu, x, mellin_barnes_abscissa(nu, x)?)
}

/// Hankel expansion; returns (value, bound on the first omitted term).
pub fn bessel_j_asymptotic<T: Real>(nu: T, x: T) -> Result<(T, T)> {
    if x <= T::zero() {
        return Err(Error::InvalidArgument("asymptotic expansion needs x > 0".into()));
    }
    let mu = T::lit(4.0) * nu * nu;
    let eight_x = T::lit(8.0) * x;
    let (mut p, mut q) = (T::zero(), T::zero());
    let mut term = T::one();
    let mut k = 0usize;
    let mut last = T::infinity();
    let remainder;
    loop {
        let mag = term.abs();
        if mag > last && T::from_usize_exact(k) > nu {
            remainder = last;
            break;
        }
        if mag <= T::epsilon() * T::lit(0.125) {
            remainder = mag;
            break;
        }
        match k % 4 {
            0 => p = p + term,
            1 => q = q + term,
            2 => p = p - term,
            _ => q = q - term,
        }
        last = mag;
        let odd = T::from_usize_exact(2 * k + 1);
        term = term * (mu - odd * odd) / (T::from_usize_exact(k + 1) * eight_x);
        k += 1;
        if k > 500 {
            remainder = mag;
            break;
        }
    }
    let chi = x - (nu * T::lit(0.5) + T::lit(0.25)) * T::PI();
    let amp = (T::lit(2.0) / (T::PI() * x)).sqrt();
    Ok((amp * (p * chi.cos() - q * chi.sin()), amp * remainder))
}

/// Miller backward recurrence for integer order, normalized by J_0 + 2ΣJ_{2k} = 1.
pub fn bessel_j_recurrence<T: Real>(n: u32, x: T) -> Result<T> {
    if x < T::zero() {
        return Err(Error::InvalidArgument("negative argument".into()));
    }
    if x == T::zero() {
        return Ok(if n == 0 { T::one() } else { T::zero() });
    }
    let top = x.to_f64().unwrap().max(f64::from(n));
    let start = (top + 20.0 + (40.0 * top).sqrt()) as usize;
    let start = start + start % 2 + 2;
    let big = T::max_value().sqrt().sqrt();
    let small = big.recip();
    let two_over_x = T::lit(2.0) / x;
    let (mut jp, mut j) = (T::zero(), T::one());
    let mut norm = T::zero();
    let mut answer = T::zero();
    for k in (1..=start).rev() {
        let jm = T::from_usize_exact(k) * two_over_x * j - jp;
        jp = j;
        j = jm;
        if j.abs() > big {
            j = j * small;
            jp = jp * small;
            answer = answer * small;
            norm = norm * small;
        }
        if (k - 1) % 2 == 0 && k - 1 > 0 {
            norm = norm + j;
        }
        if k - 1 == n as usize {
            answer = j;
        }
    }
    norm = T::lit(2.0) * norm + j;
    Ok(answer / norm)
}

/// Integer-order J_n(x) with method chosen by regime.
pub fn bessel_j<T: Real>(n: u32, x: T) -> Result<T> {
    let nf = T::from_u32(n).unwrap();
    if x * x <= T::lit(4.0) * (nf + T::one()) {
        return bessel_j_series(nf, x);
    }
    if x > T::lit(25.0) + nf * nf * T::lit(0.5) {
        let (v, err) = bessel_j_asymptotic(nf, x)?;
        if err <= T::epsilon() * T::lit(4.0) {
            return Ok(v);
        }
    }
    bessel_j_recurrence(n, x)
}

const K_STEP: f64 = 0.05;

fn k_integral<T: Real, F: Fn(T) -> T>(x: T, h: T, cosh_part: F, log_growth: T) -> Result<T> {
    if x <= T::zero() {
        return Err(Error::InvalidArgument("K-Bessel needs x > 0".into()));
    }
    let mut acc = Acc::new();
    acc.add(T::lit(0.5) * (-x).exp() * cosh_part(T::zero()));
    let stop = T::epsilon() * T::lit(1e-3);
    let mut j = 1usize;
    loop {
        let t = h * T::from_usize_exact(j);
        let env = (-x * t.cosh() + log_growth * t).exp();
        let v = (-x * t.cosh()).exp() * cosh_part(t);
        acc.add(v);
        if env <= stop * acc.value().abs() && x * t.cosh() > log_growth * t {
            break;
        }
        j += 1;
        if j > 1_000_000 {
            return Err(Error::Quadrature("K-Bessel integral did not terminate".into()));
        }
    }
    Ok(acc.value() * h)
}

/// K_ν(x) = ∫_0^∞ e^{−x cosh t} cosh(νt) dt.
pub fn bessel_k<T: Real>(nu: T, x: T) -> Result<T> {
    bessel_k_with_step(nu, x, T::lit(K_STEP))
}

/// K_ν(x) with an explicit trapezoid step (refinement studies).
pub fn bessel_k_with_step<T: Real>(nu: T, x: T, h: T) -> Result<T> {
    k_integral(x, h, |t| (nu * t).cosh(), nu.abs())
}

/// K_ν(x) for complex order.
pub fn bessel_k_complex<T: Real>(nu: Complex<T>, x: T) -> Result<Complex<T>> {
    let g = nu.re.abs();
    let h = T::lit(K_STEP);
    let re = k_integral(x, h, |t| (nu * t).cosh().re, g)?;
    let im = k_integral(x, h, |t| (nu * t).cosh().im, g)?;
    Ok(Complex::new(re, im))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn series_trivial_values() {
        assert_eq!(bessel_j_series(0.0f64, 0.0).unwrap(), 1.0);
        assert_eq!(bessel_j_series(11.0f64, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn known_values() {
        // J_0(1), J_1(2.5), J_11(10) from standard tables.
        assert!((bessel_j_series(0.0f64, 1.0).unwrap() - 0.765_197_686_557_966_6).abs() < 1e-15);
        assert!((bessel_j_series(1.0f64, 2.5).unwrap() - 0.497_094_102_464_274_4).abs() < 1e-15);
        assert!((bessel_j(11, 10.0f64).unwrap() - 0.123_116_528_001_597_67).abs() < 1e-15);
    }

    #[test]
    fn series_vs_mellin_barnes() {
        for (nu, x) in [(11.0f64, 1.0f64), (23.0, 5.0), (15.0, 12.0), (11.0, 20.0)] {
            let a = bessel_j_series(nu, x).unwrap();
            let b = bessel_j_mellin_barnes_auto(nu, x).unwrap();
            assert!((a - b).abs() < 1e-9 * a.abs().max(1e-3), "nu={nu} x={x}: {a} vs {b}");
        }
    }

    #[test]
    fn contour_guard() {
        assert!(matches!(
            bessel_j_mellin_barnes(11.0f64, 1.0, 11.5),
            Err(Error::ContourOutOfRange { .. })
        ));
        assert!(bessel_j_mellin_barnes(11.0f64, 1.0, 0.0).is_err());
    }

    #[test]
    fn recurrence_matches_series() {
        for n in [0u32, 1, 5, 11, 23, 39] {
            for x in [0.3f64, 2.0, 7.5, 15.0, 20.0] {
                let s = bessel_j_series(f64::from(n), x).unwrap();
                let r = bessel_j_recurrence(n, x).unwrap();
                assert!((s - r).abs() < 1e-13 * s.abs().max(1e-3), "n={n} x={x}: {s} vs {r}");
            }
        }
    }

    #[test]
    fn asymptotic_matches_recurrence() {
        for (n, x) in [(0u32, 60.0f64), (11, 150.0), (3, 40.0)] {
            let (a, err) = bessel_j_asymptotic(f64::from(n), x).unwrap();
            let r = bessel_j_recurrence(n, x).unwrap();
            assert!(err < 1e-15);
            assert!((a - r).abs() < 1e-13, "n={n} x={x}: {a} vs {r}");
        }
    }

    #[test]
    fn series_guard_triggers() {
        assert!(matches!(
            bessel_j_series(0.0f64, 400.0),
            Err(Error::SeriesDivergence(_))
        ));
    }

    #[test]
    fn k_half_closed_form() {
        for x in [1.0f64, 5.0, 10.0] {
            let closed = (std::f64::consts::PI / (2.0 * x)).sqrt() * (-x).exp();
            let k = bessel_k(0.5, x).unwrap();
            assert!((k - closed).abs() < 1e-10 * closed, "x={x}");
        }
    }

    #[test]
    fn k_refinement_stable() {
        let a = bessel_k(0.0f64, 5.0).unwrap();
        let b = bessel_k_with_step(0.0f64, 5.0, K_STEP / 2.0).unwrap();
        assert!((a - b).abs() < 1e-10 * a);
        assert!((a - 0.003_691_098_334_042_594).abs() < 1e-15);
    }

    #[test]
    fn k_complex_real_axis() {
        let a = bessel_k_complex(Complex::new(0.3f64, 0.0), 2.0).unwrap();
        let b = bessel_k(0.3f64, 2.0).unwrap();
        assert!((a.re - b).abs() < 1e-15 && a.im == 0.0);
        assert!(bessel_k(0.0f64, 0.0).is_err());
    }
}
