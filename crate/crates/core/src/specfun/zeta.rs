use super::gamma::{ln_gamma, BERNOULLI};
use crate::error::{Error, Result};
use crate::scalar::Real;
use num_complex::Complex;

/// Riemann ζ(s) by Euler–Maclaurin summation.
pub fn zeta<T: Real>(s: Complex<T>) -> Result<Complex<T>> {
    let one = Complex::new(T::one(), T::zero());
    if s == one {
        return Err(Error::InvalidArgument("zeta pole at s = 1".into()));
    }
    let n = 30 + s.im.abs().to_usize().unwrap_or(0) + (-s.re).max(T::zero()).to_usize().unwrap_or(0);
    let nf = T::from_usize_exact(n);
    let mut sum = Complex::new(T::zero(), T::zero());
    for k in 1..n {
        sum = sum + (-s * T::from_usize_exact(k).ln()).exp();
    }
    let ln_n = nf.ln();
    let n_pow = (-s * ln_n).exp();
    sum = sum + n_pow * nf / (s - one) + n_pow * T::lit(0.5);
    // Σ B_{2j}/(2j)! s(s+1)…(s+2j−2) N^{−s−2j+1}
    let mut rising = s;
    let mut fact = T::lit(2.0);
    let mut npow = n_pow / nf;
    for (j, &(num, den)) in BERNOULLI.iter().enumerate() {
        let b = T::lit(num) / T::lit(den);
        let term = rising * npow * (b / fact);
        sum = sum + term;
        if term.norm() <= T::epsilon() * T::lit(1e-3) * sum.norm() {
            break;
        }
        let m = T::from_usize_exact(2 * j + 2);
        rising = rising * (s + m - T::one()) * (s + m);
        fact = fact * (m + T::one()) * (m + T::lit(2.0));
        npow = npow / (nf * nf);
    }
    Ok(sum)
}

/// ξ(s) = π^{−s/2} Γ(s/2) ζ(s).
pub fn completed_zeta<T: Real>(s: Complex<T>) -> Result<Complex<T>> {
    let half = T::lit(0.5);
    let lg = ln_gamma(s * half)?;
    Ok((lg - s * half * T::PI().ln()).exp() * zeta(s)?)
}

/// Constant term of ξ(s) − 1/(s−1) at s = 1, (γ − log 4π)/2.
pub fn zeta_laurent_constant<T: Real>() -> T {
    let euler_gamma = T::lit(0.577_215_664_901_532_9);
    (euler_gamma - (T::lit(4.0) * T::PI()).ln()) * T::lit(0.5)
}
