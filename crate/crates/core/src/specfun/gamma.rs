use crate::error::{Error, Result};
use crate::scalar::Real;
use num_complex::Complex;

/// B_2, B_4, …, B_34 as exact (numerator, denominator).
pub const BERNOULLI: [(f64, f64); 17] = [
    (1.0, 6.0),
    (-1.0, 30.0),
    (1.0, 42.0),
    (-1.0, 30.0),
    (5.0, 66.0),
    (-691.0, 2730.0),
    (7.0, 6.0),
    (-3617.0, 510.0),
    (43867.0, 798.0),
    (-174611.0, 330.0),
    (854513.0, 138.0),
    (-236364091.0, 2730.0),
    (8553103.0, 6.0),
    (-23749461029.0, 870.0),
    (8615841276005.0, 14322.0),
    (-7709321041217.0, 510.0),
    (2577687858367.0, 6.0),
];

fn bernoulli<T: Real>(j: usize) -> T {
    let (n, d) = BERNOULLI[j];
    T::lit(n) / T::lit(d)
}

/// Radius beyond which `terms` Stirling corrections reach the working precision anywhere in the
/// closed right half-plane.
pub fn stirling_radius<T: Real>() -> (usize, T) {
    let tol = T::unit_roundoff() * T::lit(0.25);
    let mut best = (BERNOULLI.len() - 1, T::infinity());
    for n in 1..BERNOULLI.len() {
        let next = bernoulli::<T>(n).abs();
        let m = T::from_usize_exact(2 * n + 2);
        // sec^{2n+2}(π/4) = 2^{n+1} covers |arg z| ≤ π/2.
        let c = next / (m * (m - T::one())) * T::lit(2.0).powi(n as i32 + 1);
        let r = (c / tol).powf(T::one() / T::from_usize_exact(2 * n + 1));
        if r < best.1 {
            best = (n, r);
        }
    }
    best
}

fn check_pole<T: Real>(z: Complex<T>) -> Result<()> {
    if z.im == T::zero() && z.re <= T::zero() && z.re == z.re.floor() {
        return Err(Error::GammaPole(format!("{}", z.re)));
    }
    Ok(())
}

/// Principal branch of log Γ(z).
pub fn ln_gamma<T: Real>(z: Complex<T>) -> Result<Complex<T>> {
    check_pole(z)?;
    let (terms, radius) = stirling_radius::<T>();
    let mut z = z;
    let mut shift = Complex::new(T::zero(), T::zero());
    let mut steps = 0;
    while z.re < T::zero() || z.norm() < radius {
        shift = shift + z.ln();
        z = z + T::one();
        steps += 1;
        if steps > 100_000 {
            return Err(Error::InvalidArgument("log_gamma argument too far left".into()));
        }
    }
    let half = T::lit(0.5);
    let ln2pi = (T::TAU()).ln();
    let mut s = (z - half) * z.ln() - z + half * ln2pi;
    let zi = z.inv();
    let z2 = zi * zi;
    let mut p = zi;
    for j in 0..terms {
        let m = T::from_usize_exact(2 * j + 2);
        s = s + p * (bernoulli::<T>(j) / (m * (m - T::one())));
        p = p * z2;
    }
    Ok(s - shift)
}

/// log Γ(x) for real x > 0.
pub fn ln_gamma_real<T: Real>(x: T) -> Result<T> {
    if x <= T::zero() {
        return ln_gamma(Complex::new(x, T::zero())).map(|v| v.re);
    }
    let (terms, radius) = stirling_radius::<T>();
    let mut x = x;
    let mut prod = T::one();
    let mut shift = T::zero();
    while x < radius {
        prod = prod * x;
        if prod > T::lit(1e30) {
            shift = shift + prod.ln();
            prod = T::one();
        }
        x = x + T::one();
    }
    shift = shift + prod.ln();
    let half = T::lit(0.5);
    let mut s = (x - half) * x.ln() - x + half * T::TAU().ln();
    let xi = x.recip();
    let x2 = xi * xi;
    let mut p = xi;
    for j in 0..terms {
        let m = T::from_usize_exact(2 * j + 2);
        s = s + p * (bernoulli::<T>(j) / (m * (m - T::one())));
        p = p * x2;
    }
    Ok(s - shift)
}
