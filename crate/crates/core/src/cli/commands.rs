use std::fs::File;
use std::io::{BufWriter, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{CommandName, RunConfig};
use crate::conjecture::{conjecture_scan, ScanConfig};
use crate::error::{invalid, Error, Result};
use crate::extender::{
    build_extension, collar_bounds_report, export_field, norm_budget_report, seam_report, Extension, ExtensionSpec,
    GridSpec,
};
use crate::models::FunctionModel;
use crate::polyext::{min_admissible_m, BoundaryJet, Collar, CollarPolynomial};
use crate::report::{Check, VerificationReport};
use crate::spectral::{self, TruncatedModel, WaveVector};

const SEAM_SAMPLES: usize = 12;
const BUDGET_REL_TOL: f64 = 1e-3;
const DECAY_FIT_SAMPLES: usize = 120;
const DEFAULT_GRID_POINTS: usize = 41;

pub(super) fn dispatch(cfg: &RunConfig) -> Result<VerificationReport> {
    match cfg.command {
        CommandName::Collar => collar(cfg),
        CommandName::Extend => extend(cfg),
        CommandName::Transform => transform(cfg),
        CommandName::VerifyDecay => verify_decay(cfg),
        CommandName::VerifyInversion => verify_inversion(cfg),
        CommandName::Conjecture => conjecture(cfg),
    }
}

fn collar(cfg: &RunConfig) -> Result<VerificationReport> {
    if cfg.jet.len() != cfg.n {
        return invalid(format!("--jet has {} entries but --n is {}", cfg.jet.len(), cfg.n));
    }
    let jet = BoundaryJet::new(cfg.jet.clone())?;
    let w = cfg.m.powi(-(cfg.d as i32));
    let poly = CollarPolynomial::new(jet.clone(), Collar::increasing(cfg.m, w)?);
    let class = poly.sign_class();
    let mut r = VerificationReport::new("collar");
    r.push(Check::at_most("boundary_residual", poly.boundary_residual(), 0.0, cfg.tolerances.residual));
    r.push(Check::holds("sign_definite", class.is_definite()));
    let l1 = poly.nth_derivative_l1();
    if class.is_definite() {
        let a = cfg.jet[cfg.n - 1].abs();
        r.push(Check::at_most("ftc_identity", (l1 - a).abs(), 0.0, 1e-8 * (1.0 + a)));
    }
    r.detail("sign_class", class);
    r.detail("coefficients", poly.coeffs());
    r.detail("collar_roots", poly.nth_derivative_collar_roots());
    r.detail("nth_derivative_l1", l1);
    r.detail("sup_norm", poly.sup_norm());
    r.detail("min_admissible_m", min_admissible_m(&jet, cfg.d)?);
    if cfg.n == 2 && cfg.jet[0] > 0.0 && cfg.jet[1] > 0.0 {
        r.detail(
            "impossibility",
            "n = 2 with a0 > 0 and a1 > 0: reaching zero with zero slope needs h'' of both signs, \
             so no sign-definite collar exists",
        );
    }
    Ok(r)
}

fn model(cfg: &RunConfig) -> Result<FunctionModel> {
    FunctionModel::parse(&cfg.model, cfg.dim)
}

fn schedule(cfg: &RunConfig) -> Result<Vec<Extension>> {
    let model = model(cfg)?;
    if cfg.m_schedule.is_empty() {
        return invalid("--m-schedule must not be empty");
    }
    cfg.m_schedule
        .iter()
        .map(|&m| build_extension(ExtensionSpec::new(model.clone(), m, cfg.n, cfg.d)?))
        .collect()
}

fn extend(cfg: &RunConfig) -> Result<VerificationReport> {
    let exts = schedule(cfg)?;
    let mut r = VerificationReport::new("extend");
    for ext in &exts {
        let mut seam = seam_report(ext, SEAM_SAMPLES, cfg.tolerances.seam)?;
        seam.name = format!("seams_m{}", ext.m());
        r.absorb(seam);
    }
    if exts.len() >= 2 {
        r.absorb(norm_budget_report(&exts, BUDGET_REL_TOL)?);
        r.absorb(collar_bounds_report(&exts, BUDGET_REL_TOL)?);
    }
    if !cfg.csv.is_empty() {
        let ext = &exts[0];
        let points = if cfg.grid_points > 0 { cfg.grid_points } else { DEFAULT_GRID_POINTS };
        let grid = GridSpec::centered(ext.dim(), ext.outer(), points)?;
        let mut csv = BufWriter::new(File::create(&cfg.csv)?);
        let mut side = BufWriter::new(File::create(format!("{}.json", cfg.csv))?);
        export_field(ext, &grid, &mut csv, &mut side)?;
        csv.flush()?;
        side.flush()?;
        r.detail("csv", &cfg.csv);
    }
    Ok(r)
}

/// Seeded wave vectors with log-uniform norms in `[lo, hi]` and every
/// component at least `min_component` in size.
pub(crate) fn generic_ring(dim: usize, count: usize, lo: f64, hi: f64, min_component: f64, seed: u64) -> Result<Vec<WaveVector>> {
    if !(lo > 0.0 && hi >= lo) || count == 0 {
        return invalid("k range needs 0 < k_min <= k_max and at least one sample");
    }
    if min_component * (dim as f64).sqrt() > hi {
        return invalid("k_max is too small for off-axis samples");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let r = lo * (hi / lo).powf(rng.gen::<f64>());
        let dir = crate::models::random_unit(&mut rng, dim);
        let k: Vec<f64> = dir.iter().map(|c| c * r).collect();
        if k.iter().all(|c| c.abs() >= min_component.max(0.05 * r)) {
            out.push(WaveVector::new(k)?);
        }
    }
    Ok(out)
}

fn transform(cfg: &RunConfig) -> Result<VerificationReport> {
    let exts = schedule(cfg)?;
    let ext = &exts[0];
    let ks = generic_ring(ext.dim(), cfg.k_samples, cfg.k_min, cfg.k_max, 0.0, cfg.seed)?;
    let neg: Vec<WaveVector> = ks.iter().map(|k| k.scaled(-1.0)).collect();
    let plus = spectral::ft_batch(ext, &ks, cfg.tolerances.fourier)?;
    let minus = spectral::ft_batch(ext, &neg, cfg.tolerances.fourier)?;
    let asym = plus.iter().zip(&minus).map(|(a, b)| (a.value - b.value.conj()).norm()).fold(0.0, f64::max);
    let err = plus.iter().map(|s| s.error).fold(0.0, f64::max);
    let mut r = VerificationReport::new("transform");
    r.push(Check::at_most("conjugate_symmetry", asym, 0.0, 1e-10));
    r.detail("m", ext.m());
    r.detail("max_error_estimate", err);
    r.detail("samples", &plus);
    if !cfg.csv.is_empty() {
        let mut out = BufWriter::new(File::create(&cfg.csv)?);
        let header: Vec<String> = (1..=ext.dim()).map(|a| format!("k{a}")).collect();
        writeln!(out, "{},re,im", header.join(","))?;
        for s in &plus {
            let k: Vec<String> = s.k.k.iter().map(|c| c.to_string()).collect();
            writeln!(out, "{},{},{}", k.join(","), s.value.re, s.value.im)?;
        }
        out.flush()?;
        if cfg.grid_points > 0 {
            let grid = GridSpec::centered(ext.dim(), ext.outer(), cfg.grid_points)?;
            let field = spectral::ft_grid(&spectral::sample_source(ext, &grid)?, &grid)?;
            let mut g = BufWriter::new(File::create(format!("{}.grid.csv", cfg.csv))?);
            field.write_csv(&mut g)?;
            g.flush()?;
        }
    }
    Ok(r)
}

fn verify_decay(cfg: &RunConfig) -> Result<VerificationReport> {
    let exts = schedule(cfg)?;
    let dim = exts[0].dim();
    let ks = generic_ring(dim, cfg.k_samples, cfg.k_min.max(1.0 + 1e-9), cfg.k_max, 0.0, cfg.seed)?;
    let mut r = VerificationReport::new("verify_decay");
    r.absorb(spectral::decay_bound_check(&exts, cfg.n as u32, &ks, cfg.tolerances.fourier)?);
    let ray = generic_ring(dim, 1, 1.0, 1.0, 0.3 / (dim as f64).sqrt(), cfg.seed ^ 0x5a5a)?.remove(0);
    match spectral::decay_exponent_fit(&exts[0], &ray, (cfg.k_min, cfg.k_max), DECAY_FIT_SAMPLES, cfg.tolerances.fourier) {
        Ok(fit) => {
            r.push(Check::at_most("decay_exponent", fit.exponent, -(cfg.n as f64) + 0.5, 0.0));
            r.detail("decay_fit", fit);
        }
        Err(Error::Accuracy(msg)) => {
            r.push(Check::holds("decay_exponent", false));
            r.detail("decay_fit_error", msg);
        }
        Err(e) => return Err(e),
    }
    let p = (cfg.n as u32).max(2).div_ceil(2) * 2;
    let a = spectral::alpha_min(p)?;
    r.push(Check::at_least("alpha_min_positive", a, f64::MIN_POSITIVE, 0.0));
    r.detail("alpha_min", serde_json::json!({ "p": p, "value": a }));
    Ok(r)
}

const INVERSION_POINTS: usize = 10;
const INVERSION_FINAL_BOUND: f64 = 1e-5;
const CONVERGENCE_K0: f64 = 0.5;

fn verify_inversion(cfg: &RunConfig) -> Result<VerificationReport> {
    let model = model(cfg)?;
    let dim = model.dim();
    let mut r = VerificationReport::new("verify_inversion");
    let ks = generic_ring(dim, cfg.k_samples, cfg.k_min, cfg.k_max, CONVERGENCE_K0, cfg.seed)?;
    r.absorb(spectral::ft_convergence(&model, &cfg.m_schedule, cfg.n, cfg.d, &ks, CONVERGENCE_K0)?);
    let dir = [1.0, 0.6, -0.3];
    let points: Vec<Vec<f64>> = (0..INVERSION_POINTS)
        .map(|i| {
            let t = -2.0 + 4.0 * i as f64 / (INVERSION_POINTS - 1) as f64;
            dir[..dim].iter().map(|c| c * t).collect()
        })
        .collect();
    let cutoff = [40.0, 20.0, 12.0][dim - 1];
    r.absorb(spectral::inversion_error(
        &model,
        &cfg.m_schedule,
        cfg.n,
        cfg.d,
        &points,
        cutoff,
        Some(INVERSION_FINAL_BOUND),
    )?);
    let radius = TruncatedModel::auto(&model, 1e-8)?.radius();
    let ratio_ks = generic_ring(dim, cfg.k_samples, 0.8, 4.0, spectral::AXIS_EXCLUSION, cfg.seed ^ 0xa11)?;
    r.absorb(spectral::verify_ratio_identities(&model, &ratio_ks, radius, 1e-7)?);
    let rs: Vec<f64> = (0..=5).map(|k| 10f64.powi(-k)).collect();
    r.absorb(spectral::radial_limit_check(&model, 0.9, 0.6, &rs, 1e-4)?);
    Ok(r)
}

fn conjecture(cfg: &RunConfig) -> Result<VerificationReport> {
    let scan = ScanConfig {
        n_min: cfg.n_min,
        n_max: cfg.n_max,
        trials: cfg.trials,
        m_schedule: cfg.m_schedule.clone(),
        exponent: cfg.d,
        seed: cfg.seed,
    };
    let report = conjecture_scan(&scan)?;
    let mut r = VerificationReport::new("conjecture");
    r.push(Check::holds("scan_completed", true));
    r.detail("counterexample_candidates", report.counterexamples.len());
    r.detail("summaries", &report.summaries);
    r.detail("scan", &report);
    Ok(r)
}
