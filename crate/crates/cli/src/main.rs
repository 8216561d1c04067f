//! `rankin-lab`: builds eigenform caches, runs moment sweeps and emits verification reports.

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use rankin_core::kloosterman::kloosterman_table;
use rankin_core::modforms::{eigenforms, EigenCache, Eigenform, CACHE_FORMAT_VERSION};
use rankin_core::moments::{
    calibrate_normalization, calibration_summary, moment_report, nonvanishing_report, petersson_check,
    trace_normalization, GSelector, KloostermanCache, MomentReport,
};
use rankin_core::rankin::{
    central_value, eisenstein_lattice_sum, unfold_identity_check, EisensteinSeries, RSContext,
};
use rankin_core::specfun::{bessel_j_mellin_barnes_auto, bessel_j_series, bessel_k, VProfile};
use rankin_core::{BaseField, QuadInt, QuadraticField, Real};
use num_complex::Complex;
use rayon::prelude::*;
use serde_json::json;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

const WORKING_BITS: u32 = <f64 as Real>::BITS;

#[derive(Parser, Debug)]
#[command(name = "rankin-lab", version, about = "Rankin-Selberg central values, Petersson formulas and Kloosterman sums")]
struct Cli {
    /// Directory holding eigen_k{K}.json caches.
    #[arg(long, global = true, env = "RANKIN_LAB_CACHE", default_value = ".rankin-cache")]
    cache_dir: PathBuf,
    /// Output file (stdout when absent).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Cap on worker threads.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Fail instead of regenerating a cache with the wrong precision or too few coefficients.
    #[arg(long, global = true)]
    strict: bool,
    /// Working precision in bits; must equal the f64 mantissa width.
    #[arg(long, global = true, default_value_t = 53)]
    precision_bits: u32,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct WeightArgs {
    /// Single even weight.
    #[arg(long, conflicts_with = "weights")]
    weight: Option<u32>,
    /// Inclusive range start:stop:step.
    #[arg(long)]
    weights: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compute (or load) eigenforms and write their cache files.
    Eigen {
        #[command(flatten)]
        w: WeightArgs,
        #[arg(long, default_value_t = 5000)]
        coeffs: usize,
    },
    /// Central values L(1/2, f⊗g) at one weight.
    Lvalue {
        #[arg(long)]
        weight: u32,
        #[arg(long, default_value_t = 5000)]
        coeffs: usize,
        /// Eigenvalue index of f (all when absent).
        #[arg(long)]
        f: Option<usize>,
        /// Eigenvalue index of g (all when absent).
        #[arg(long)]
        g: Option<usize>,
    },
    /// First/second moments, main and error terms, nonvanishing counts.
    Moments {
        #[command(flatten)]
        w: WeightArgs,
        /// delta12, first or index:<i>.
        #[arg(long, default_value = "delta12")]
        g: String,
        #[arg(long, default_value_t = 2000)]
        coeffs: usize,
        /// |L| threshold for the nonvanishing count.
        #[arg(long, default_value_t = 1e-10)]
        threshold: f64,
        /// Exponent c0 of the comparison curve k/(log k)^c0.
        #[arg(long, default_value_t = 1.0)]
        c0: f64,
        /// JSON mirror of the CSV report.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Petersson trace formula for 1 ≤ m, n ≤ max-index and the normalization constant.
    PeterssonCheck {
        #[command(flatten)]
        w: WeightArgs,
        #[arg(long, default_value_t = 4)]
        max_index: u64,
        #[arg(long, default_value_t = 200)]
        coeffs: usize,
        #[arg(long, default_value_t = 1e-14)]
        tol: f64,
    },
    /// Kloosterman sums and Weil ratios over Q (field-disc 1) or a real quadratic field.
    Kloosterman {
        /// 1 for Q, otherwise the squarefree D of Q(√D).
        #[arg(long, default_value_t = 1)]
        field_disc: i64,
        /// α as "a,b" meaning a + bω.
        #[arg(long, default_value = "1,0")]
        alpha: String,
        #[arg(long, default_value_t = 100)]
        max_norm: u64,
    },
    /// Mellin–Barnes vs series J-Bessel, K_{1/2} closed form and V-function stability.
    BesselVerify,
    /// Modular invariance, lattice-sum agreement and the s = 1/2 growth constant of E*(z, s).
    EisensteinCheck {
        #[arg(long, default_value_t = 200)]
        lattice_radius: usize,
    },
    /// Rankin–Selberg unfolding identity for each eigenform of a weight.
    UnfoldCheck {
        #[arg(long)]
        weight: u32,
        #[arg(long, default_value_t = 1.5)]
        s: f64,
        #[arg(long, default_value_t = 5000)]
        coeffs: usize,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
}

fn invalid(msg: String) -> anyhow::Error {
    anyhow!(rankin_core::Error::InvalidArgument(msg))
}

fn parse_weights(w: &WeightArgs) -> Result<Vec<u32>> {
    let ks = match (&w.weight, &w.weights) {
        (Some(k), None) => vec![*k],
        (None, Some(r)) => {
            let parts: Vec<u32> = r
                .split(':')
                .map(|p| p.trim().parse::<u32>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| invalid(format!("bad weight range '{r}'")))?;
            let (a, b, s) = match parts.as_slice() {
                [a, b] => (*a, *b, 2),
                [a, b, s] => (*a, *b, *s),
                _ => return Err(invalid("weight range must be start:stop[:step]".into())),
            };
            if s == 0 || a > b {
                return Err(invalid(format!("weight range '{r}' is empty or has zero step")));
            }
            (a..=b).step_by(s as usize).collect()
        }
        _ => return Err(invalid("give exactly one of --weight or --weights".into())),
    };
    for &k in &ks {
        if k < 4 || k % 2 == 1 {
            return Err(invalid(format!("weight {k} must be even and at least 4")));
        }
    }
    Ok(ks)
}

struct Ctx {
    cache_dir: PathBuf,
    strict: bool,
}

impl Ctx {
    fn cache_path(&self, k: u32) -> PathBuf {
        self.cache_dir.join(format!("eigen_k{k}.json"))
    }

    /// Loads the cached forms of weight k, regenerating when absent or (non-strict) unusable.
    fn forms(&self, k: u32, coeffs: usize) -> Result<Vec<Eigenform<f64>>> {
        let path = self.cache_path(k);
        if path.exists() {
            let cache = EigenCache::read(&path)?;
            if cache.format_version != CACHE_FORMAT_VERSION {
                bail!(rankin_core::Error::Cache(format!(
                    "{}: format version {} is not {}",
                    path.display(),
                    cache.format_version,
                    CACHE_FORMAT_VERSION
                )));
            }
            let usable = cache.weight == k && cache.precision_bits == WORKING_BITS && cache.coeff_limit() >= coeffs;
            if usable {
                return Ok(cache.to_forms()?);
            }
            if self.strict {
                bail!(rankin_core::Error::Cache(format!(
                    "{}: precision {} bits / {} coefficients do not satisfy {} bits / {coeffs}",
                    path.display(),
                    cache.precision_bits,
                    cache.coeff_limit(),
                    WORKING_BITS
                )));
            }
        }
        let forms = if rankin_core::modforms::cusp_dimension(k) == 0 { Vec::new() } else { eigenforms::<f64>(k, coeffs)? };
        std::fs::create_dir_all(&self.cache_dir)
            .with_context(|| format!("creating cache directory {}", self.cache_dir.display()))?;
        EigenCache::from_forms(k, &forms).write(&path)?;
        Ok(forms)
    }
}

fn emit(out: &Option<PathBuf>, body: &[u8]) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, body).with_context(|| format!("writing {}", p.display())),
        None => {
            std::io::stdout().write_all(body)?;
            Ok(())
        }
    }
}

fn csv_bytes<S: serde::Serialize>(rows: &[S], header: &[&str]) -> Result<Vec<u8>> {
    let mut w = csv::WriterBuilder::new().has_headers(true).from_writer(Vec::new());
    if rows.is_empty() {
        w.write_record(header)?;
    }
    for r in rows {
        w.serialize(r)?;
    }
    Ok(w.into_inner().map_err(|e| anyhow!("{e}"))?)
}

fn json_bytes(v: &serde_json::Value) -> Result<Vec<u8>> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    Ok(s.into_bytes())
}

fn run_eigen(ctx: &Ctx, ks: &[u32], coeffs: usize) -> Result<serde_json::Value> {
    let summaries: Vec<serde_json::Value> = ks
        .par_iter()
        .map(|&k| {
            let forms = ctx.forms(k, coeffs)?;
            Ok(json!({
                "weight": k,
                "dim": forms.len(),
                "cache": ctx.cache_path(k).display().to_string(),
                "forms": forms.iter().map(|f| json!({
                    "eigenvalue_index": f.eigenvalue_index,
                    "coeff_limit": f.coeff_limit(),
                    "lambda_2": f.normalized.get(1),
                    "petersson_norm": f.petersson_norm,
                    "harmonic_weight": f.harmonic_weight,
                })).collect::<Vec<_>>(),
            }))
        })
        .collect::<Result<_>>()?;
    Ok(json!({ "weights": summaries }))
}

#[derive(serde::Serialize)]
struct LvalueRow {
    k: u32,
    f_index: usize,
    g_index: usize,
    central_value: f64,
    afe_error_estimate: f64,
}

fn run_lvalue(ctx: &Ctx, k: u32, coeffs: usize, fi: Option<usize>, gi: Option<usize>) -> Result<Vec<u8>> {
    let forms = ctx.forms(k, coeffs)?;
    let pick = |sel: Option<usize>| -> Result<Vec<&Eigenform<f64>>> {
        match sel {
            None => Ok(forms.iter().collect()),
            Some(i) => forms
                .iter()
                .find(|f| f.eigenvalue_index == i)
                .map(|f| vec![f])
                .ok_or_else(|| anyhow!(rankin_core::Error::InvalidArgument(format!("no form with index {i} at weight {k}")))),
        }
    };
    let (fs, gs) = (pick(fi)?, pick(gi)?);
    let mut rows = Vec::new();
    for f in &fs {
        for g in &gs {
            if fi.is_none() && gi.is_none() && g.eigenvalue_index < f.eigenvalue_index {
                continue;
            }
            let cv = central_value(&RSContext::new(f, g)?)?;
            rows.push(LvalueRow {
                k,
                f_index: f.eigenvalue_index,
                g_index: g.eigenvalue_index,
                central_value: cv.value,
                afe_error_estimate: cv.afe_error_estimate,
            });
        }
    }
    csv_bytes(&rows, &["k", "f_index", "g_index", "central_value", "afe_error_estimate"])
}

fn run_moments(ctx: &Ctx, ks: &[u32], g: &GSelector, coeffs: usize, threshold: f64) -> Result<Vec<MomentReport>> {
    ks.par_iter()
        .map(|&k| {
            let forms = ctx.forms(k, coeffs)?;
            let mut cache = KloostermanCache::new();
            Ok(moment_report(k, &forms, g, threshold, &mut cache)?)
        })
        .collect()
}

fn run_petersson(ctx: &Ctx, ks: &[u32], max_index: u64, coeffs: usize, tol: f64) -> Result<serde_json::Value> {
    let per_weight: Vec<(Vec<serde_json::Value>, Option<(u32, f64)>)> = ks
        .par_iter()
        .map(|&k| {
            let forms = ctx.forms(k, coeffs.max(max_index as usize))?;
            let mut checks = Vec::new();
            for m in 1..=max_index {
                for n in 1..=max_index {
                    checks.push(serde_json::to_value(petersson_check(k, &forms, m, n, tol)?)?);
                }
            }
            let kappa = if forms.is_empty() { None } else { Some((k, calibrate_normalization(k, &forms, 1, tol)?)) };
            Ok((checks, kappa))
        })
        .collect::<Result<_>>()?;
    let max_gap = per_weight
        .iter()
        .flat_map(|(c, _)| c.iter())
        .filter_map(|c| c["gap"].as_f64())
        .fold(0.0, f64::max);
    let kappas: Vec<(u32, f64)> = per_weight.iter().filter_map(|(_, k)| *k).collect();
    let calibration = if kappas.is_empty() {
        serde_json::Value::Null
    } else {
        let summary = calibration_summary(kappas, 1e-8)?;
        json!({
            "per_weight": summary.per_weight,
            "mean": summary.mean,
            "relative_spread": summary.relative_spread,
            "covolume": trace_normalization::<f64>(),
            "covolume_gap": (summary.mean - trace_normalization::<f64>()).abs(),
        })
    };
    Ok(json!({
        "checks": per_weight.into_iter().flat_map(|(c, _)| c).collect::<Vec<_>>(),
        "max_gap": max_gap,
        "calibration": calibration,
    }))
}

fn parse_alpha(s: &str) -> Result<QuadInt> {
    let parts: Vec<i128> = s
        .split(',')
        .map(|p| p.trim().parse::<i128>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| invalid(format!("bad alpha '{s}'")))?;
    match parts.as_slice() {
        [a] => Ok(QuadInt::new(*a, 0)),
        [a, b] => Ok(QuadInt::new(*a, *b)),
        _ => Err(invalid("alpha must be 'a' or 'a,b'".into())),
    }
}

fn run_kloosterman(disc: i64, alpha: &str, max_norm: u64) -> Result<Vec<u8>> {
    let field = if disc == 1 { BaseField::Rational } else { BaseField::Quadratic(QuadraticField::new(disc)?) };
    let alpha = parse_alpha(alpha)?;
    if matches!(field, BaseField::Rational) && alpha.b != 0 {
        bail!(rankin_core::Error::InvalidArgument("over Q alpha must be rational".into()));
    }
    let rows = kloosterman_table(&field, alpha, max_norm)?;
    csv_bytes(&rows, &["field_disc", "alpha", "c_coords", "norm_c", "re", "im", "weil_ratio"])
}

fn run_bessel_verify() -> Result<serde_json::Value> {
    let mut mb_max = 0.0f64;
    for nu in [11.0, 15.0, 23.0, 39.0] {
        for i in 0..=199 {
            let x = 0.1 + (20.0 - 0.1) * f64::from(i) / 199.0;
            let a = bessel_j_mellin_barnes_auto(nu, x)?;
            let b = bessel_j_series(nu, x)?;
            mb_max = mb_max.max((a - b).abs() / b.abs().max(1e-3));
        }
    }
    let mut k_half_max = 0.0f64;
    for i in 1..=100 {
        let x = 0.05 * f64::from(i);
        let exact = (std::f64::consts::PI / (2.0 * x)).sqrt() * (-x).exp();
        k_half_max = k_half_max.max((bessel_k(0.5, x)? - exact).abs() / exact);
    }
    let mut contour_max = 0.0f64;
    let mut step_max = 0.0f64;
    let mut small_y_dev = [0.0f64; 6];
    let mut large_y = 0.0f64;
    for k in [12u32, 24, 40] {
        let p = VProfile::<f64>::new(vec![k], 53)?;
        let p2 = VProfile::<f64>::with_params(vec![k], 2.0, 1.0, 1e-8, 53)?;
        let fine = p.refined()?;
        for j in 0..=40 {
            let y = 10f64.powf(-3.0 + 0.25 * f64::from(j));
            let v = p.eval(y)?;
            contour_max = contour_max.max((v - p2.eval(y)?).abs());
            step_max = step_max.max((v - fine.eval(y)?).abs());
        }
        for (j, dev) in small_y_dev.iter_mut().enumerate() {
            let y = f64::from(k) * 10f64.powi(-3 - j as i32);
            *dev = dev.max((p.eval(y)? - 1.0).abs());
        }
        large_y = large_y.max(p.eval(1e6 * f64::from(k))?.abs());
    }
    Ok(json!({
        "mellin_barnes_vs_series_max": mb_max,
        "k_half_closed_form_max_rel": k_half_max,
        "v_half_contour_max": contour_max,
        "v_half_step_max": step_max,
        "v_half_small_y_ratios": [1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8],
        "v_half_small_y_max_deviation_from_1": small_y_dev,
        "v_half_at_1e6k_max": large_y,
    }))
}

fn run_eisenstein(radius: usize) -> Result<serde_json::Value> {
    let s = Complex::new(0.75, 1.0 / 3.0);
    let e = EisensteinSeries::<f64>::new(s, 0.05, true)?;
    let mut invariance = 0.0f64;
    for (x, y) in [(0.31, 0.87), (-0.2, 1.3), (0.45, 0.95), (0.1, 2.0)] {
        let z = Complex::new(x, y);
        let w = -Complex::new(1.0, 0.0) / z;
        let v = e.value(x, y)?;
        invariance = invariance
            .max((v - e.value(x + 1.0, y)?).norm() / v.norm())
            .max((v - e.value(w.re, w.im)?).norm() / v.norm());
    }
    let e32 = EisensteinSeries::<f64>::new(Complex::new(1.5, 0.0), 0.5, true)?;
    let fourier = e32.value(0.0, 1.0)?.re;
    let lattice = eisenstein_lattice_sum(0.0, 1.0, 1.5, radius)?;
    let half = EisensteinSeries::<f64>::new(Complex::new(0.5, 0.0), 0.8, true)?;
    let mut growth = 0.0f64;
    for i in 0..=10 {
        let x = 0.05 * f64::from(i);
        let y0 = (1.0 - x * x).sqrt();
        for j in 0..=20 {
            let y = y0 + (10.0 - y0) * f64::from(j) / 20.0;
            growth = growth.max(half.value(x, y)?.norm() / y.sqrt());
        }
    }
    Ok(json!({
        "invariance_max_rel": invariance,
        "lattice_radius": radius,
        "fourier_at_i": fourier,
        "lattice_at_i": lattice,
        "lattice_rel_gap": ((fourier - lattice) / lattice).abs(),
        "half_growth_constant_y_le_10": growth,
    }))
}

fn run_unfold(ctx: &Ctx, k: u32, s: f64, coeffs: usize, tol: f64) -> Result<serde_json::Value> {
    let forms = ctx.forms(k, coeffs)?;
    let rows: Vec<serde_json::Value> = forms
        .iter()
        .map(|f| {
            let u = unfold_identity_check(f, f, s, tol)?;
            Ok(json!({
                "weight": k,
                "f_index": f.eigenvalue_index,
                "s": s,
                "lhs": u.lhs,
                "rhs": u.rhs,
                "relative_gap": u.relative_gap,
                "smoothing_length": u.smoothing_length,
            }))
        })
        .collect::<Result<_>>()?;
    Ok(json!({ "checks": rows }))
}

fn run(cli: Cli) -> Result<()> {
    if cli.precision_bits != WORKING_BITS {
        bail!(rankin_core::Error::InvalidArgument(format!(
            "precision_bits {} unsupported; the working precision is {} bits",
            cli.precision_bits,
            WORKING_BITS
        )));
    }
    if let Some(t) = cli.threads {
        rayon::ThreadPoolBuilder::new().num_threads(t.max(1)).build_global()?;
    }
    let ctx = Ctx { cache_dir: cli.cache_dir.clone(), strict: cli.strict };
    match &cli.command {
        Command::Eigen { w, coeffs } => emit(&cli.out, &json_bytes(&run_eigen(&ctx, &parse_weights(w)?, *coeffs)?)?),
        Command::Lvalue { weight, coeffs, f, g } => emit(&cli.out, &run_lvalue(&ctx, *weight, *coeffs, *f, *g)?),
        Command::Moments { w, g, coeffs, threshold, c0, json } => {
            let sel: GSelector = g.parse()?;
            let reports = run_moments(&ctx, &parse_weights(w)?, &sel, *coeffs, *threshold)?;
            let rows: Vec<_> = reports.iter().map(|r| r.csv_row()).collect();
            emit(&cli.out, &csv_bytes(&rows, &[])?)?;
            if let Some(path) = json {
                let body = json!({
                    "g": sel.to_string(),
                    "threshold": threshold,
                    "reports": reports,
                    "nonvanishing": nonvanishing_report(&reports, *c0),
                    "c0": c0,
                });
                write_file(path, &json_bytes(&body)?)?;
            }
            Ok(())
        }
        Command::PeterssonCheck { w, max_index, coeffs, tol } => {
            emit(&cli.out, &json_bytes(&run_petersson(&ctx, &parse_weights(w)?, *max_index, *coeffs, *tol)?)?)
        }
        Command::Kloosterman { field_disc, alpha, max_norm } => {
            emit(&cli.out, &run_kloosterman(*field_disc, alpha, *max_norm)?)
        }
        Command::BesselVerify => emit(&cli.out, &json_bytes(&run_bessel_verify()?)?),
        Command::EisensteinCheck { lattice_radius } => emit(&cli.out, &json_bytes(&run_eisenstein(*lattice_radius)?)?),
        Command::UnfoldCheck { weight, s, coeffs, tol } => {
            emit(&cli.out, &json_bytes(&run_unfold(&ctx, *weight, *s, *coeffs, *tol)?)?)
        }
    }
}

fn write_file(path: &Path, body: &[u8]) -> Result<()> {
    std::fs::write(path, body).with_context(|| format!("writing {}", path.display()))
}

fn error_json(e: &anyhow::Error) -> serde_json::Value {
    let kind = e
        .chain()
        .find_map(|c| c.downcast_ref::<rankin_core::Error>())
        .map(|c| c.kind())
        .unwrap_or("runtime");
    json!({ "error": { "kind": kind, "message": format!("{e:#}") } })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            if matches!(e.kind(), clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            let body = json!({ "error": { "kind": "usage", "message": e.to_string() } });
            eprintln!("{body}");
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", error_json(&e));
            ExitCode::FAILURE
        }
    }
}
