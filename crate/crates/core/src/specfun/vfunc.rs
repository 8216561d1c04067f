use super::gamma::{ln_gamma, ln_gamma_real};
use crate::error::{Error, Result};
use crate::scalar::Real;
use num_complex::Complex;

/// Quadrature state for V(y) = (1/2πi)∫_{(σ)} y^{−u} e^{βu²} G(u) du/u with
/// G(u) = ∏_j Γ(1/2+u)Γ(k_j−1/2+u) / (Γ(1/2)Γ(k_j−1/2)).
#[derive(Debug, Clone)]
pub struct VProfile<T> {
    pub weights: Vec<u32>,
    pub contour_abscissa: T,
    pub truncation_height: T,
    pub step: T,
    pub target_precision: u32,
    /// β in the test factor e^{βu²}; 1 unless a replacement test factor is studied.
    pub test_factor: T,
    /// Smallest y the truncation was sized for.
    pub y_min: T,
    /// (t_j, e^{βu²}G(u)/u at u = σ + i t_j), t_0 = 0.
    nodes: Vec<(T, Complex<T>)>,
    /// Same on Re u = −1/4, used for y < 1 together with the residue 1 at u = 0; on the
    /// primary line y^{−σ} would amplify rounding by orders of magnitude there.
    left_step: T,
    left_nodes: Vec<(T, Complex<T>)>,
}

const LEFT_ABSCISSA: f64 = -0.25;

fn ln_g<T: Real>(weights: &[u32], u: Complex<T>) -> Result<Complex<T>> {
    let half = T::lit(0.5);
    let mut s = Complex::new(T::zero(), T::zero());
    for &k in weights {
        let kh = T::from_u32(k).unwrap() - half;
        s = s + ln_gamma(u + half)? + ln_gamma(u + kh)?;
        s = s - Complex::new(ln_gamma_real(half)? + ln_gamma_real(kh)?, T::zero());
    }
    Ok(s)
}

fn ln_g_real<T: Real>(weights: &[u32], x: T) -> Result<T> {
    let half = T::lit(0.5);
    let mut s = T::zero();
    for &k in weights {
        let kh = T::from_u32(k).unwrap() - half;
        s = s + ln_gamma_real(x + half)? + ln_gamma_real(x + kh)? - ln_gamma_real(half)? - ln_gamma_real(kh)?;
    }
    Ok(s)
}

impl<T: Real> VProfile<T> {
    /// Profile with e^{u²}, σ = 3/2, sized for y ≥ 10^{−8}.
    pub fn new(weights: Vec<u32>, target_precision: u32) -> Result<Self> {
        Self::with_params(weights, T::lit(1.5), T::one(), T::lit(1e-8), target_precision)
    }

    pub fn with_params(weights: Vec<u32>, sigma: T, beta: T, y_min: T, target_precision: u32) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidArgument("at least one weight is required".into()));
        }
        Self::build(weights, sigma, beta, y_min, target_precision)
    }

    /// The Γ-free kernel φ(y) = (1/2πi)∫ y^{−u} e^{βu²} du/u = erfc(log y / (2√β))/2, used as a
    /// smooth cutoff for Dirichlet series.
    pub fn smoothing(beta: T, y_min: T, target_precision: u32) -> Result<Self> {
        Self::build(Vec::new(), T::one(), beta, y_min, target_precision)
    }

    fn build(weights: Vec<u32>, sigma: T, beta: T, y_min: T, target_precision: u32) -> Result<Self> {
        if weights.iter().any(|&k| k < 4 || k % 2 == 1) {
            return Err(Error::InvalidArgument("weights must be even integers ≥ 4".into()));
        }
        if !(sigma > T::zero()) || !(beta > T::zero()) || !(y_min > T::zero()) {
            return Err(Error::InvalidArgument("σ, β and y_min must be positive".into()));
        }
        let ln2 = T::LN_2();
        let bits = T::from_u32(target_precision).unwrap();
        let ln_inv_y = (-y_min.ln()).max(T::zero());
        let base = (bits + T::lit(16.0)) * ln2 / beta;
        let extra = (ln_g_real(&weights, sigma)? - sigma.ln() + sigma * ln_inv_y + (bits + T::lit(8.0)) * ln2) / beta;
        let height = (sigma * sigma + base.max(extra)).sqrt();
        // Strip of analyticity: the u = 0 pole sits at distance σ.
        let d = sigma * T::lit(0.9);
        let right = sigma + d;
        let growth = ln_g_real(&weights, right)? + beta * right * right + right * ln_inv_y - (sigma - d).ln();
        let step = T::TAU() * d / ((bits + T::lit(8.0)) * ln2 + growth.max(T::zero()));
        let left_d = T::lit(0.2);
        let left_growth = ln_g_real(&weights, T::lit(LEFT_ABSCISSA) + left_d)?.abs() + T::lit(4.0);
        let left_step = T::TAU() * left_d / ((bits + T::lit(8.0)) * ln2 + left_growth);
        let mut p = VProfile {
            weights,
            contour_abscissa: sigma,
            truncation_height: height,
            step,
            target_precision,
            test_factor: beta,
            y_min,
            nodes: Vec::new(),
            left_step,
            left_nodes: Vec::new(),
        };
        p.build_nodes()?;
        p.validate()?;
        Ok(p)
    }

    fn line_nodes(&self, sigma: T, step: T) -> Result<Vec<(T, Complex<T>)>> {
        let n = (self.truncation_height / step).ceil().to_usize().unwrap_or(0);
        (0..=n)
            .map(|j| {
                let t = step * T::from_usize_exact(j);
                let u = Complex::new(sigma, t);
                let w = (ln_g(&self.weights, u)? + u * u * self.test_factor).exp() / u;
                Ok((t, w))
            })
            .collect()
    }

    fn build_nodes(&mut self) -> Result<()> {
        self.nodes = self.line_nodes(self.contour_abscissa, self.step)?;
        self.left_nodes = self.line_nodes(T::lit(LEFT_ABSCISSA), self.left_step)?;
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let s = self.contour_abscissa;
        let t = self.truncation_height;
        let bound = self.test_factor * (s * s - t * t);
        let limit = -T::from_u32(self.target_precision + 8).unwrap() * T::LN_2();
        if !(s > T::zero()) || bound >= limit || !(self.step > T::zero()) {
            return Err(Error::InvalidArgument(format!(
                "VProfile invariant violated: sigma = {s}, T = {t}, h = {}",
                self.step
            )));
        }
        Ok(())
    }

    /// Same contour and truncation with the step halved.
    pub fn refined(&self) -> Result<Self> {
        let mut p = self.clone();
        p.step = p.step * T::lit(0.5);
        p.left_step = p.left_step * T::lit(0.5);
        p.build_nodes()?;
        Ok(p)
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn eval(&self, y: T) -> Result<T> {
        if !(y > T::zero()) {
            return Err(Error::InvalidArgument("V(y) needs y > 0".into()));
        }
        if y < T::one() {
            let line = line_sum(&self.left_nodes, T::lit(LEFT_ABSCISSA), self.left_step, y);
            return Ok(T::one() + line);
        }
        Ok(self.eval_primary(y))
    }

    /// Quadrature on the profile's own line Re u = σ, for any y.
    pub fn eval_primary(&self, y: T) -> T {
        line_sum(&self.nodes, self.contour_abscissa, self.step, y)
    }

    /// Rigorous |V(y)| ≤ min_σ' y^{−σ'} e^{βσ'²} G(σ') / (2σ'√(πβ)).
    pub fn tail_bound(&self, y: T) -> Result<T> {
        let ly = y.ln();
        let beta = self.test_factor;
        let mut best = T::infinity();
        for i in 1..=160 {
            let s = T::from_usize_exact(i) * T::lit(0.25);
            let v = -s * ly + beta * s * s + ln_g_real(&self.weights, s)?
                - (T::lit(2.0) * s * (T::PI() * beta).sqrt()).ln();
            best = best.min(v);
        }
        Ok(best.exp())
    }

    /// Bound on Σ_{m>n} m^a |V(scale·m)|, from |V(y)| ≤ y^{−σ'}C(σ') and
    /// Σ_{m>n} m^{a−σ'} ≤ n^{a+1−σ'}/(σ'−a−1) for σ' > a + 1.
    pub fn dirichlet_tail_bound(&self, n: T, a: T, scale: T) -> Result<T> {
        let beta = self.test_factor;
        let mut best = T::infinity();
        for i in 1..=240 {
            let s = T::from_usize_exact(i) * T::lit(0.25);
            if s <= a + T::one() {
                continue;
            }
            let v = -s * scale.ln() + beta * s * s + ln_g_real(&self.weights, s)?
                - (T::lit(2.0) * s * (T::PI() * beta).sqrt()).ln()
                + (a + T::one() - s) * n.ln()
                - (s - a - T::one()).ln();
            best = best.min(v);
        }
        Ok(best.exp())
    }
}

fn line_sum<T: Real>(nodes: &[(T, Complex<T>)], sigma: T, step: T, y: T) -> T {
    let ly = y.ln();
    let scale = (-sigma * ly).exp();
    let mut sum = T::zero();
    for (j, &(t, w)) in nodes.iter().enumerate() {
        let (s, c) = (t * ly).sin_cos();
        let v = w.re * c + w.im * s;
        sum = sum + if j == 0 { v * T::lit(0.5) } else { v };
    }
    sum * scale * step / T::PI()
}

/// V_{1/2}(y) for the given profile.
pub fn v_half<T: Real>(y: T, profile: &VProfile<T>) -> Result<T> {
    profile.validate()?;
    profile.eval(y)
}
