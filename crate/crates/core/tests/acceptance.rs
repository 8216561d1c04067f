//! Acceptance harness: one PASS/FAIL line per criterion, nonzero exit on any failure.

mod common;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rankin_core::arith::{gamma_minus_one, primes_up_to, sigma};
use rankin_core::kloosterman::{
    kloosterman_nf, kloosterman_table, moduli_up_to, unit_rescale, unit_sum, weil_ratio_z, KloostermanQuery,
};
use rankin_core::modforms::{cusp_dimension, delta_series, eigenforms, miller_basis, EigenCache, Eigenform};
use rankin_core::moments::{
    calibrate_normalization, calibration_summary, moment_report, nonvanishing_report, petersson_check,
    trace_normalization, GSelector, KloostermanCache, MomentReport,
};
use rankin_core::rankin::{
    eisenstein_lattice_sum, shimura_residue_check, unfold_identity_check, upper_half_grid, EisensteinSeries,
};
use rankin_core::specfun::{bessel_j_mellin_barnes_auto, bessel_j_series, bessel_k, VProfile};
use rankin_core::{BaseField, QuadInt, QuadraticField};
use std::collections::BTreeMap;
use std::process::ExitCode;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

type Outcome = Result<String, String>;

const SWEEP: std::ops::RangeInclusive<u32> = 12..=40;
const SWEEP_COEFFS: usize = 2000;

fn sweep_weights() -> Vec<u32> {
    SWEEP.step_by(2).collect()
}

fn forms_2000() -> &'static BTreeMap<u32, Vec<Eigenform<f64>>> {
    static F: OnceLock<BTreeMap<u32, Vec<Eigenform<f64>>>> = OnceLock::new();
    F.get_or_init(|| sweep_weights().into_iter().map(|k| (k, eigenforms::<f64>(k, SWEEP_COEFFS).unwrap())).collect())
}

fn sweep_reports(threshold: f64) -> Result<Vec<MomentReport>, String> {
    let mut cache = KloostermanCache::<f64>::new();
    sweep_weights()
        .into_iter()
        .map(|k| moment_report(k, &forms_2000()[&k], &GSelector::First, threshold, &mut cache).map_err(|e| e.to_string()))
        .collect()
}

fn sweep_default() -> &'static Result<Vec<MomentReport>, String> {
    static R: OnceLock<Result<Vec<MomentReport>, String>> = OnceLock::new();
    R.get_or_init(|| sweep_reports(1e-10))
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond { Ok(()) } else { Err(msg()) }
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

/// dim S_k from the classical formula for even k ≥ 4.
fn classical_cusp_dim(k: u32) -> usize {
    let m = (k / 12) as usize;
    let modular = if k % 12 == 2 { m } else { m + 1 };
    modular - 1
}

fn hecke_recursion_exact(k: u32, a: &[BigInt]) -> Result<(), String> {
    let n = a.len() - 1;
    for p in primes_up_to(n) {
        let pk = BigInt::from(p).pow(k - 1);
        let (mut prev, mut cur, mut pr) = (BigInt::one(), a[p].clone(), p);
        while pr * p <= n {
            let next = &a[p] * &cur - &pk * &prev;
            ensure(next == a[pr * p], || format!("k = {k}: a({}) violates the prime-power recursion", pr * p))?;
            prev = cur;
            cur = next;
            pr *= p;
        }
    }
    for m in 2..=n {
        for l in 2..=n / m {
            if m.gcd(&l) == 1 {
                ensure(&a[m] * &a[l] == a[m * l], || format!("k = {k}: a({m})a({l}) ≠ a({})", m * l))?;
            }
        }
    }
    Ok(())
}

fn criterion_1() -> Outcome {
    for k in (4..=60).step_by(2) {
        let d = classical_cusp_dim(k);
        ensure(cusp_dimension(k) == d, || format!("cusp_dimension({k}) = {} ≠ {d}", cusp_dimension(k)))?;
        let basis = miller_basis(k, 40).map_err(err)?;
        ensure(basis.len() == d, || format!("Miller basis at k = {k} has {} elements, expected {d}", basis.len()))?;
    }
    let delta = delta_series(1000).map_err(err)?;
    ensure(*delta.coeff(2) == BigInt::from(-24), || format!("τ(2) = {}", delta.coeff(2)))?;
    let p691 = BigInt::from(691);
    for n in 1..=1000u64 {
        let diff = (delta.coeff(n as usize) - sigma(11, n)).mod_floor(&p691);
        ensure(diff.is_zero(), || format!("τ({n}) ≢ σ₁₁({n}) mod 691"))?;
    }
    let mut max_p = 0.0f64;
    for (&k, forms) in forms_2000() {
        for f in forms {
            for p in primes_up_to(100) {
                max_p = max_p.max(f.lambda(p).abs());
            }
        }
        ensure(forms.len() == classical_cusp_dim(k), || format!("k = {k}: {} eigenforms", forms.len()))?;
    }
    ensure(max_p <= 2.0, || format!("max |λ(p)| = {max_p}"))?;
    // Exact recursion where the eigenform is rational (one-dimensional spaces).
    let mut exact_weights = Vec::new();
    for k in [12u32, 16, 18, 20, 22, 26] {
        let b = miller_basis(k, 600).map_err(err)?;
        ensure(b.len() == 1, || format!("k = {k} is not one-dimensional"))?;
        hecke_recursion_exact(k, &b[0].coeffs)?;
        exact_weights.push(k);
    }
    hecke_recursion_exact(12, &delta.coeffs)?;
    // Irrational eigenforms: the same relations in floating point on λ.
    let mut float_gap = 0.0f64;
    for forms in forms_2000().values().filter(|fs| fs.len() > 1) {
        for f in forms {
            for p in primes_up_to(40) {
                let (mut prev, mut cur, mut pr) = (1.0, f.lambda(p), p);
                while pr * p <= SWEEP_COEFFS {
                    let next = f.lambda(p) * cur - prev;
                    float_gap = float_gap.max((next - f.lambda(pr * p)).abs());
                    prev = cur;
                    cur = next;
                    pr *= p;
                }
            }
        }
    }
    ensure(float_gap < 1e-9, || format!("Hecke recursion gap {float_gap:e} for higher-dimensional spaces"))?;
    Ok(format!(
        "dims k=4..60 ok; τ(2)=-24; τ≡σ₁₁ mod 691 (n≤1000); max|λ(p)|={max_p:.6}; exact recursion at k={exact_weights:?}; float recursion gap {float_gap:.1e}"
    ))
}

fn criterion_2() -> Outcome {
    let mut mb = 0.0f64;
    for nu in [11.0, 15.0, 23.0, 39.0] {
        for i in 0..=199 {
            let x = 0.1 + (20.0 - 0.1) * f64::from(i) / 199.0;
            let a = bessel_j_mellin_barnes_auto(nu, x).map_err(err)?;
            let b = bessel_j_series(nu, x).map_err(err)?;
            mb = mb.max((a - b).abs() / b.abs().max(1e-3));
        }
    }
    ensure(mb < 1e-9, || format!("Mellin–Barnes vs series {mb:e}"))?;
    let mut kh = 0.0f64;
    for i in 1..=100 {
        let x = 0.05 * f64::from(i);
        let exact = (std::f64::consts::PI / (2.0 * x)).sqrt() * (-x).exp();
        kh = kh.max((bessel_k(0.5, x).map_err(err)? - exact).abs() / exact);
    }
    ensure(kh < 1e-10, || format!("K_1/2 closed form {kh:e}"))?;
    let (mut contour, mut step, mut large) = (0.0f64, 0.0f64, 0.0f64);
    let mut small = [0.0f64; 6];
    for k in [12u32, 24, 40] {
        let p = VProfile::<f64>::new(vec![k], 53).map_err(err)?;
        let p2 = VProfile::<f64>::with_params(vec![k], 2.0, 1.0, 1e-8, 53).map_err(err)?;
        let fine = p.refined().map_err(err)?;
        for j in 0..=40 {
            let y = 10f64.powf(-3.0 + 0.25 * f64::from(j));
            let v = p.eval(y).map_err(err)?;
            contour = contour.max((v - p2.eval(y).map_err(err)?).abs());
            step = step.max((v - fine.eval(y).map_err(err)?).abs());
        }
        for (j, dev) in small.iter_mut().enumerate() {
            let y = f64::from(k) * 10f64.powi(-3 - j as i32);
            *dev = dev.max((p.eval(y).map_err(err)? - 1.0).abs());
        }
        large = large.max(p.eval(1e6 * f64::from(k)).map_err(err)?.abs());
    }
    ensure(contour < 1e-10, || format!("contour dependence {contour:e}"))?;
    ensure(step < 1e-10, || format!("step dependence {step:e}"))?;
    ensure(large < 1e-6, || format!("V(10⁶k) = {large:e}"))?;
    // V → 1 as y/k → 0: deviations shrink monotonically and end below 10⁻³.
    ensure(small.windows(2).all(|w| w[1] < w[0]) && small[5] < 1e-3, || format!("|V − 1| for y ≪ k: {small:?}"))?;
    Ok(format!(
        "MB/series {mb:.1e}; K_1/2 {kh:.1e}; contour {contour:.1e}; step {step:.1e}; |V−1| at y=k·10⁻⁸ {:.1e}; V(10⁶k) {large:.1e}",
        small[5]
    ))
}

fn criterion_3() -> Outcome {
    let mut max_gap = 0.0f64;
    let mut per_weight = Vec::new();
    for (&k, forms) in forms_2000() {
        for m in 1..=4u64 {
            for n in 1..=4u64 {
                let c = petersson_check(k, forms, m, n, 1e-14).map_err(err)?;
                max_gap = max_gap.max(c.gap);
            }
        }
        if !forms.is_empty() {
            per_weight.push((k, calibrate_normalization(k, forms, 1, 1e-14).map_err(err)?));
        }
    }
    ensure(max_gap < 1e-8, || format!("trace formula gap {max_gap:e}"))?;
    let kappa = trace_normalization::<f64>();
    let dev = per_weight.iter().map(|&(_, c)| (c - kappa).abs()).fold(0.0, f64::max);
    ensure(dev < 1e-8, || format!("calibration deviates from π/3 by {dev:e}"))?;
    let summary = calibration_summary(per_weight, 1e-8).map_err(err)?;
    Ok(format!("max |lhs−rhs| {max_gap:.1e}; calibration {:.13} vs π/3, max deviation {dev:.1e}; {summary:?}", kappa))
}

fn criterion_4() -> Outcome {
    let reports = sweep_default().as_ref().map_err(Clone::clone)?;
    let gap = reports.iter().map(|r| r.identity_gap).fold(0.0, f64::max);
    ensure(gap < 1e-6, || format!("identity gap {gap:e}"))?;
    let e: Vec<f64> = reports.iter().map(|r| r.error_term.abs()).collect();
    let (first, last) = (e[0], e[e.len() - 1]);
    ensure(last < first, || format!("|E| at endpoints {first:e} → {last:e}"))?;
    let drops = e.windows(2).filter(|w| w[1] < w[0]).count();
    Ok(format!(
        "max identity gap {gap:.1e} over k=12..40; |E| {first:.4} → {last:.4} ({drops}/{} steps decreasing)",
        e.len() - 1
    ))
}

fn criterion_5() -> Outcome {
    let gm1 = gamma_minus_one(&BaseField::Rational, 1).map_err(err)?;
    ensure(gm1 == BigRational::one(), || format!("γ₋₁(Q,1) = {gm1}"))?;
    let gm1 = gm1.to_f64().unwrap();
    let reports = sweep_default().as_ref().map_err(Clone::clone)?;
    let shifted: Vec<f64> = reports.iter().map(|r| r.main_term - gm1 * f64::from(r.k).ln()).collect();
    let d: Vec<f64> = shifted.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
    ensure(d.windows(2).all(|w| w[1] < w[0]), || format!("|Δ| not decreasing: {d:?}"))?;
    let last = d[d.len() - 1];
    ensure(last < 0.1, || format!("final |Δ| = {last}"))?;
    Ok(format!("γ₋₁(Q,1) = 1; |Δ| {:.4} → {last:.4}, strictly decreasing", d[0]))
}

fn criterion_6() -> Outcome {
    let mut gaps = Vec::new();
    for k in [12u32, 16, 18, 20] {
        let f = &eigenforms::<f64>(k, 10_000).map_err(err)?[0];
        let c = shimura_residue_check(f, &upper_half_grid(10_000, 20)).map_err(err)?;
        ensure(c.relative_gap < 0.05, || format!("k = {k}: relative gap {}", c.relative_gap))?;
        gaps.push(format!("k={k}: {:.1e}", c.relative_gap));
    }
    Ok(format!("relative gaps at X=10⁴: {}", gaps.join(", ")))
}

fn criterion_7() -> Outcome {
    let mut unfold = 0.0f64;
    for k in [12u32, 16] {
        let forms = eigenforms::<f64>(k, 5000).map_err(err)?;
        for s in [1.5, 2.0] {
            let u = unfold_identity_check(&forms[0], &forms[0], s, 1e-6).map_err(err)?;
            unfold = unfold.max(u.relative_gap);
        }
    }
    ensure(unfold < 1e-4, || format!("unfolding gap {unfold:e}"))?;
    let e32 = EisensteinSeries::<f64>::new(Complex64::new(1.5, 0.0), 0.5, true).map_err(err)?;
    let mut lattice_gap = 0.0f64;
    for (x, y) in [(0.0, 1.0), (0.25, 1.5)] {
        let fourier = e32.value(x, y).map_err(err)?.re;
        let lattice = eisenstein_lattice_sum(x, y, 1.5, 200).map_err(err)?;
        lattice_gap = lattice_gap.max(((fourier - lattice) / lattice).abs());
    }
    ensure(lattice_gap < 1e-6, || format!("Fourier vs lattice {lattice_gap:e}"))?;
    let half = EisensteinSeries::<f64>::new(Complex64::new(0.5, 0.0), 0.8, true).map_err(err)?;
    let growth = |y_max: f64| -> Result<(f64, f64), String> {
        let (mut c, mut c_log) = (0.0f64, 0.0f64);
        for i in 0..=10 {
            let x = 0.05 * f64::from(i);
            let y0 = (1.0 - x * x).sqrt();
            for j in 0..=40 {
                let y = y0 * (y_max / y0).powf(f64::from(j) / 40.0);
                let v = half.value(x, y).map_err(err)?.norm();
                c = c.max(v / y.sqrt());
                c_log = c_log.max(v / (y.sqrt() * (1.0 + y.ln())));
            }
        }
        Ok((c, c_log))
    };
    let (c10, l10) = growth(10.0)?;
    let (c1000, l1000) = growth(1000.0)?;
    ensure(c10.is_finite() && c10 > 0.0, || format!("growth constant {c10}"))?;
    ensure(l1000 <= l10 * 1.01, || format!("|E*|/(√y(1+log y)) grows: {l10} → {l1000}"))?;
    Ok(format!(
        "unfold gap {unfold:.1e}; Fourier/lattice {lattice_gap:.1e}; max|E*(z,1/2)|/√y = {c10:.4} (y≤10), {c1000:.4} (y≤1000), log-corrected {l10:.4}/{l1000:.4}"
    ))
}

fn criterion_8() -> Outcome {
    let mut weil_z = 0.0f64;
    for c in 1..=500u64 {
        for m in 0..c as i64 {
            weil_z = weil_z.max(weil_ratio_z::<f64>(m, 1, c).map_err(err)?);
        }
    }
    ensure(weil_z <= 1.0 + 1e-9, || format!("Weil ratio over Z reaches {weil_z}"))?;
    let f = QuadraticField::new(5).map_err(err)?;
    let field = BaseField::Quadratic(f.clone());
    let alphas = [QuadInt::ONE, QuadInt::new(0, 1), QuadInt::new(2, 1), QuadInt::new(-3, 2)];
    let mut weil_nf = 0.0f64;
    for &a in &alphas {
        let t1 = kloosterman_table(&field, a, 200).map_err(err)?;
        let t2 = kloosterman_table(&field, a, 200).map_err(err)?;
        ensure(t1 == t2, || format!("Q(√5) table for α = {a} not stable under re-run"))?;
        weil_nf = t1.iter().map(|r| r.weil_ratio).fold(weil_nf, f64::max);
    }
    ensure(weil_nf.is_finite() && weil_nf <= 1.0 + 1e-9, || format!("Weil ratio over Q(√5) reaches {weil_nf}"))?;
    let mut brute = 0.0f64;
    let mut checked = 0usize;
    for c in moduli_up_to(&f, 50).map_err(err)? {
        for &a in &alphas {
            for e in [QuadInt::ONE, f.tp_unit_generator] {
                let mut q = KloostermanQuery::new(field.clone(), a, c);
                q.eta = e;
                let fast = kloosterman_nf::<f64>(&q).map_err(err)?;
                let slow = common::brute_force(5, (a.a, a.b), (c.a, c.b), (e.a, e.b));
                brute = brute.max((Complex64::new(fast.re, fast.im) - slow).norm());
                checked += 1;
            }
        }
    }
    ensure(brute < 1e-8, || format!("brute-force mismatch {brute:e}"))?;
    let mut unit_gap = 0.0f64;
    for e in [0.1, 0.25, 0.5, 0.75, 0.9] {
        let u = unit_sum::<f64>(&f, e, 400).map_err(err)?;
        unit_gap = unit_gap.max((u.partial - u.limit).abs() / u.limit);
    }
    ensure(unit_gap < 1e-12, || format!("unit sums off by {unit_gap:e}"))?;
    let ln_g = f.embed::<f64>(f.tp_unit_generator).0.ln();
    let mut rescale = 0.0f64;
    let mut elements = 0usize;
    for a in -150i128..=150 {
        for b in -150i128..=150 {
            let x = QuadInt::new(a, b);
            let norm = f.norm(x);
            let (x1, x2) = f.embed::<f64>(x);
            if norm <= 0 || norm > 10_000 || x1 <= 0.0 || x2 <= 0.0 {
                continue;
            }
            let r = unit_rescale::<f64>(&f, x).map_err(err)?;
            ensure(f.norm(r.rescaled) == norm, || format!("rescaling {x} changed the norm"))?;
            rescale = rescale.max(r.max_log_ratio);
            elements += 1;
        }
    }
    ensure(rescale <= ln_g + 1e-9, || format!("rescaled log ratio {rescale} exceeds log of unit {ln_g}"))?;
    Ok(format!(
        "Weil Z max {weil_z:.6} (c≤500); Q(√5) max {weil_nf:.6} (N≤200, stable); brute force {brute:.1e} over {checked} sums; unit sums {unit_gap:.1e}; rescale max log ratio {rescale:.4} ≤ {ln_g:.4} over {elements} elements"
    ))
}

fn criterion_9() -> Outcome {
    let base = sweep_default().as_ref().map_err(Clone::clone)?;
    let zero = sweep_reports(0.0)?;
    let rows = nonvanishing_report(base, 1.0);
    let rows0 = nonvanishing_report(&zero, 1.0);
    for (a, b) in rows.iter().zip(&rows0) {
        ensure(a.count == b.count, || format!("k = {}: count {} at 1e-10 vs {} at 0", a.k, a.count, b.count))?;
    }
    let line: Vec<String> = rows.iter().map(|r| format!("{}:{}/{}({:.2})", r.k, r.count, r.dim, r.curve)).collect();
    Ok(format!("k:count/dim(k/log k) {}", line.join(" ")))
}

fn criterion_10() -> Outcome {
    let run = || -> Result<Vec<u8>, String> {
        let mut bytes = Vec::new();
        for k in [12u32, 24] {
            let forms = eigenforms::<f64>(k, SWEEP_COEFFS).map_err(err)?;
            bytes.extend(serde_json::to_vec(&EigenCache::from_forms(k, &forms)).map_err(err)?);
            let mut cache = KloostermanCache::<f64>::new();
            let r = moment_report(k, &forms, &GSelector::Delta12, 1e-10, &mut cache).map_err(err)?;
            bytes.extend(serde_json::to_vec(&r).map_err(err)?);
        }
        let field = BaseField::Quadratic(QuadraticField::new(5).map_err(err)?);
        bytes.extend(serde_json::to_vec(&kloosterman_table(&field, QuadInt::new(2, 1), 100).map_err(err)?).map_err(err)?);
        bytes.extend(serde_json::to_vec(&kloosterman_table(&BaseField::Rational, QuadInt::ONE, 100).map_err(err)?).map_err(err)?);
        Ok(bytes)
    };
    let (a, b) = (run()?, run()?);
    ensure(a == b, || "re-runs differ".into())?;
    let sweep_a = serde_json::to_vec(sweep_default().as_ref().map_err(Clone::clone)?).map_err(err)?;
    let sweep_b = serde_json::to_vec(&sweep_reports(1e-10)?).map_err(err)?;
    ensure(sweep_a == sweep_b, || "moment sweep re-run differs".into())?;
    Ok(format!("{} + {} bytes identical across re-runs", a.len(), sweep_a.len()))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome, Duration); 10] = [
        ("eigenform correctness", criterion_1, Duration::from_secs(120)),
        ("special functions", criterion_2, Duration::from_secs(60)),
        ("Petersson trace formula", criterion_3, Duration::from_secs(600)),
        ("first-moment identity", criterion_4, Duration::from_secs(1200)),
        ("main term", criterion_5, Duration::from_secs(1200)),
        ("Shimura residue", criterion_6, Duration::from_secs(300)),
        ("unfolding and Eisenstein", criterion_7, Duration::from_secs(600)),
        ("number-field Kloosterman layer", criterion_8, Duration::from_secs(300)),
        ("nonvanishing report", criterion_9, Duration::from_secs(1200)),
        ("determinism", criterion_10, Duration::from_secs(1200)),
    ];
    let mut failed = 0;
    for (i, (name, run, budget)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let outcome = outcome.and_then(|msg| {
            if elapsed <= budget {
                Ok(msg)
            } else {
                Err(format!("{msg}; runtime {elapsed:.1?} exceeds {budget:?}"))
            }
        });
        match outcome {
            Ok(msg) => println!("PASS criterion {} ({name}, {elapsed:.1?}): {msg}", i + 1),
            Err(msg) => {
                failed += 1;
                println!("FAIL criterion {} ({name}, {elapsed:.1?}): {msg}", i + 1);
            }
        }
    }
    if failed == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE }
}
