//! Power-law decay of transforms: exponent fits along rays, the `D m^dim`
//! bound across a schedule of extensions, the angular factor relating
//! `Σ|k_i|^p` to `|k|^p`, and L1 tails of power laws.

use std::f64::consts::PI;

use serde::Serialize;

use super::{ft_batch_scaled, normalization, sphere_area, SpectralSample, SpectralSource, WaveVector};
use crate::error::{invalid, Error, Result};
use crate::extender::{norm_budget, Extension};
use crate::fit::{linear_fit, loglog_residual};
use crate::quadrature::Rule1d;
use crate::report::{Check, VerificationReport};

/// Least-squares power law `|F(k)| ≈ constant |k|^exponent` along a ray.
#[derive(Debug, Clone, Serialize)]
pub struct DecayFit {
    pub direction: Vec<f64>,
    pub exponent: f64,
    pub constant: f64,
    /// RMS residual of the log-log fit.
    pub residual: f64,
    /// Values at or below this were discarded as quadrature noise.
    pub floor: f64,
    /// The `(|k|, |F|)` envelope points that entered the fit.
    pub points: Vec<(f64, f64)>,
}

const BINS_PER_DECADE: f64 = 8.0;

/// Maxima of `(x, y)` over logarithmic bins in `x`; input sorted by `x`.
/// Oscillating transforms have zeros, so the fit runs on this envelope.
pub(crate) fn envelope(points: &[(f64, f64)]) -> Vec<(f64, f64)> {
    if points.is_empty() {
        return Vec::new();
    }
    let lo = points[0].0.log10();
    let hi = points[points.len() - 1].0.log10();
    let bins = (((hi - lo) * BINS_PER_DECADE).ceil() as usize).max(3);
    let width = ((hi - lo) / bins as f64).max(f64::MIN_POSITIVE);
    let mut best: Vec<Option<(f64, f64)>> = vec![None; bins];
    for &(x, y) in points {
        let b = (((x.log10() - lo) / width) as usize).min(bins - 1);
        if best[b].map_or(true, |(_, v)| y > v) {
            best[b] = Some((x, y));
        }
    }
    best.into_iter().flatten().collect()
}

/// Fit the decay of `|F(src)|` on `samples` log-spaced radii in `k_range`
/// along a generic ray.
pub fn decay_exponent_fit(
    src: &dyn SpectralSource,
    ray: &WaveVector,
    k_range: (f64, f64),
    samples: usize,
    tol: f64,
) -> Result<DecayFit> {
    if ray.dim() != src.dim() || !ray.is_generic() {
        return invalid("decay fits need a ray of the source dimension with every component nonzero");
    }
    let (k0, k1) = k_range;
    if !(k0 > 0.0 && k1 > k0) || samples < 3 {
        return invalid("k_range must satisfy 0 < lo < hi and samples >= 3");
    }
    let unit = ray.scaled(1.0 / ray.norm());
    let ks: Vec<WaveVector> = (0..samples)
        .map(|i| unit.scaled(k0 * (k1 / k0).powf(i as f64 / (samples - 1) as f64)))
        .collect();
    let (values, l1) = ft_batch_scaled(src, &ks, tol)?;
    let floor_base = 1e-13 * l1;
    let mut floor: f64 = floor_base;
    let mut kept = Vec::new();
    for s in &values {
        let f = floor_base + s.error;
        floor = floor.max(f);
        if s.value.norm() > f {
            kept.push((s.k.norm(), s.value.norm()));
        }
    }
    let points = envelope(&kept);
    if points.len() < 3 {
        return Err(Error::Accuracy(format!(
            "only {} envelope points above the quadrature floor {floor:e}; fit rejected",
            points.len()
        )));
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let (intercept, slope) = linear_fit(&logs).expect("three distinct radii");
    Ok(DecayFit {
        direction: unit.k,
        exponent: slope,
        constant: intercept.exp(),
        residual: loglog_residual(&points, intercept, slope),
        floor,
        points,
    })
}

/// Relative slack on the integration-by-parts bound; the piecewise L1
/// budgets are accurate to about 1e-4.
const PARTS_REL_TOL: f64 = 1e-3;

/// Check `|F(f_m)(k)| <= D m^dim / |k|^n` across a schedule of extensions,
/// with `D` fitted at the first (smallest) `m`.
///
/// When `n` equals the extension order, each sample is also held to
/// `|k|^n |F(k)| <= (2π)^{-dim/2} (|k| / |k_a|)^n ||∂_a^n f_m||_1` with `a`
/// the dominant axis of `k`. That holds only if the derivatives below order
/// `n` are continuous, so a missed seam jump shows up here.
pub fn decay_bound_check(exts: &[Extension], n: u32, ks: &[WaveVector], tol: f64) -> Result<VerificationReport> {
    if exts.is_empty() {
        return invalid("decay bound check needs at least one extension");
    }
    let dim = exts[0].dim();
    check_decay_samples(ks, dim)?;
    let mut per_m = Vec::with_capacity(exts.len());
    for ext in exts {
        if ext.dim() != dim {
            return invalid("extensions in a schedule must share a dimension");
        }
        per_m.push(ft_batch_scaled(ext, ks, tol)?);
    }
    let ms: Vec<f64> = exts.iter().map(|e| e.m()).collect();
    let budgets: Option<Vec<Vec<f64>>> = exts
        .iter()
        .all(|e| e.order() == n as usize)
        .then(|| exts.iter().map(|e| norm_budget(e).per_axis).collect());
    Ok(bound_report(&ms, dim, n, &per_m, budgets.as_deref()))
}

/// The same check on precomputed samples, e.g. from a grid transform.
/// `samples[i]` belongs to `ms[i]`; `l1[i]` scales the noise floor and
/// `budgets[i]`, if given, holds `||∂_a^n f||_1` per axis.
pub fn decay_bound_check_samples(
    ms: &[f64],
    dim: usize,
    n: u32,
    samples: &[Vec<SpectralSample>],
    l1: &[f64],
    budgets: Option<&[Vec<f64>]>,
) -> Result<VerificationReport> {
    if ms.is_empty() || ms.len() != samples.len() || ms.len() != l1.len() {
        return invalid("one sample set and one scale per schedule entry are required");
    }
    if let Some(b) = budgets {
        if b.len() != ms.len() || b.iter().any(|v| v.len() != dim) {
            return invalid("budgets need one value per axis for every schedule entry");
        }
    }
    for s in samples {
        let ks: Vec<WaveVector> = s.iter().map(|x| x.k.clone()).collect();
        check_decay_samples(&ks, dim)?;
    }
    let per_m: Vec<(Vec<SpectralSample>, f64)> = samples.iter().cloned().zip(l1.iter().copied()).collect();
    Ok(bound_report(ms, dim, n, &per_m, budgets))
}

fn check_decay_samples(ks: &[WaveVector], dim: usize) -> Result<()> {
    if ks.is_empty() {
        return invalid("decay bound check needs k samples");
    }
    for k in ks {
        if k.dim() != dim || !k.is_generic() || k.norm() <= 1.0 {
            return invalid(format!("k sample {:?} must be generic with |k| > 1", k.k));
        }
    }
    Ok(())
}

fn bound_report(
    ms: &[f64],
    dim: usize,
    n: u32,
    per_m: &[(Vec<SpectralSample>, f64)],
    budgets: Option<&[Vec<f64>]>,
) -> VerificationReport {
    let mut report = VerificationReport::new("decay_bound");
    let ni = n as i32;
    let noise = |s: &SpectralSample, l1: f64| (s.error + 1e-13 * l1) * s.k.norm().powi(ni);
    let m0 = ms[0];
    let d = per_m[0].0.iter().map(|s| s.value.norm() * s.k.norm().powi(ni)).fold(0.0, f64::max) / m0.powi(dim as i32);
    report.detail("fitted_d", d);
    report.detail("m_schedule", ms);
    for (i, (&m, (samples, l1))) in ms.iter().zip(per_m).enumerate() {
        let scale = m.powi(dim as i32);
        if i > 0 {
            let measured = samples.iter().map(|s| s.value.norm() * s.k.norm().powi(ni)).fold(0.0, f64::max) / scale;
            let slack = samples.iter().map(|s| noise(s, *l1)).fold(0.0, f64::max) / scale;
            report.push(Check::at_most(format!("bound_m{m}"), measured, d, slack + 1e-12 * d));
        }
        if let Some(b) = budgets {
            // Each sample against its own bound; report the one with the least room.
            let worst = samples
                .iter()
                .map(|s| {
                    let (a, ka) = s.k.k.iter().enumerate().fold((0, 0.0), |best, (j, &c)| {
                        if c.abs() > best.1 { (j, c.abs()) } else { best }
                    });
                    let bound = normalization(dim) * (s.k.norm() / ka).powi(ni) * b[i][a];
                    (s.value.norm() * s.k.norm().powi(ni), bound, noise(s, *l1))
                })
                .max_by(|x, y| {
                    let room = |t: &(f64, f64, f64)| t.0 - t.1 * (1.0 + PARTS_REL_TOL) - t.2;
                    room(x).total_cmp(&room(y))
                })
                .expect("nonempty samples");
            let (lhs, bound, slack) = worst;
            report.push(Check::at_most(format!("integration_by_parts_m{m}"), lhs, bound, PARTS_REL_TOL * bound + slack));
        }
    }
    if budgets.is_none() {
        report.detail("integration_by_parts", "skipped: n differs from the extension order");
    }
    report
}

/// `sin^p θ (|cos φ|^p + |sin φ|^p) + |cos θ|^p`, i.e. `Σ|u_i|^p` for the
/// unit vector with angles `(θ, φ)`.
pub fn alpha(p: u32, theta: f64, phi: f64) -> f64 {
    let pi = p as i32;
    theta.sin().abs().powi(pi) * (phi.cos().abs().powi(pi) + phi.sin().abs().powi(pi)) + theta.cos().abs().powi(pi)
}

const ALPHA_GRID: (usize, usize) = (200, 400);

/// Global minimum of [`alpha`] over `[0, π] × (-π, π]`: dense grid, then a
/// compass search from the best few cells.
pub fn alpha_min(p: u32) -> Result<f64> {
    if p < 2 || p % 2 != 0 {
        return invalid(format!("alpha_min needs an even p >= 2, got {p}"));
    }
    let (nt, np) = ALPHA_GRID;
    let mut cells: Vec<(f64, f64, f64)> = Vec::with_capacity((nt + 1) * np);
    for i in 0..=nt {
        let t = PI * i as f64 / nt as f64;
        for j in 0..np {
            let f = -PI + 2.0 * PI * (j + 1) as f64 / np as f64;
            cells.push((alpha(p, t, f), t, f));
        }
    }
    cells.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut best = cells[0].0;
    for &(v0, t0, f0) in cells.iter().take(8) {
        let (mut v, mut t, mut f) = (v0, t0, f0);
        let mut step = PI / nt as f64;
        while step > 1e-12 {
            let mut moved = false;
            for (dt, df) in [(step, 0.0), (-step, 0.0), (0.0, step), (0.0, -step)] {
                let (tt, ff) = ((t + dt).clamp(0.0, PI), f + df);
                let vv = alpha(p, tt, ff);
                if vv < v {
                    (v, t, f, moved) = (vv, tt, ff, true);
                }
            }
            if !moved {
                step /= 2.0;
            }
        }
        best = best.min(v);
    }
    Ok(best)
}

/// `|g(k)| <= constant |k|^exponent` beyond some radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerLaw {
    pub constant: f64,
    pub exponent: f64,
}

impl From<&DecayFit> for PowerLaw {
    fn from(fit: &DecayFit) -> Self {
        PowerLaw { constant: fit.constant, exponent: fit.exponent }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "value")]
pub enum Tail {
    Finite(f64),
    Divergent,
}

impl Tail {
    pub fn value(self) -> Option<f64> {
        match self {
            Tail::Finite(v) => Some(v),
            Tail::Divergent => None,
        }
    }
}

/// `∫_{|k| > R} C |k|^e dk = C S_{d-1} R^{e+d} / -(e+d)`, divergent unless
/// `e < -dim`.
pub fn l1_tail(law: &PowerLaw, radius: f64, dim: usize) -> Result<Tail> {
    if !(1..=3).contains(&dim) || !(radius > 0.0) || !law.constant.is_finite() || !law.exponent.is_finite() {
        return invalid("l1_tail needs dim 1..3, a positive radius and a finite power law");
    }
    let q = law.exponent + dim as f64;
    if q >= 0.0 {
        return Ok(Tail::Divergent);
    }
    Ok(Tail::Finite(law.constant.abs() * sphere_area(dim) * radius.powf(q) / -q))
}

/// `∫_{|k| < R} |F(src)(k)| / |k|^power dk` in spherical coordinates, with
/// `order`-point Gauss-Legendre rules per coordinate.
pub fn weighted_l1_inside(src: &dyn SpectralSource, radius: f64, power: u32, order: usize, tol: f64) -> Result<f64> {
    let dim = src.dim();
    // Derivative transforms vanish at k = 0, and no node sits there.
    if !(radius > 0.0) || order < 2 {
        return invalid("weighted L1 needs a positive radius and order >= 2");
    }
    let radial = Rule1d::panelled(&[0.0, radius], 1.0, order);
    let phi = Rule1d::panelled(&[-PI, PI], PI / 2.0, order);
    let theta = Rule1d::panelled(&[0.0, PI], PI / 2.0, order);
    let mut ks = Vec::new();
    let mut ws = Vec::new();
    for (&r, &wr) in radial.nodes.iter().zip(&radial.weights) {
        let jac = wr * r.powi(dim as i32 - 1 - power as i32);
        match dim {
            1 => {
                for s in [-1.0, 1.0] {
                    ks.push(WaveVector { k: vec![s * r] });
                    ws.push(jac);
                }
            }
            2 => {
                for (&f, &wf) in phi.nodes.iter().zip(&phi.weights) {
                    ks.push(WaveVector::from_spherical(2, r, 0.0, f)?);
                    ws.push(jac * wf);
                }
            }
            _ => {
                for (&t, &wt) in theta.nodes.iter().zip(&theta.weights) {
                    for (&f, &wf) in phi.nodes.iter().zip(&phi.weights) {
                        ks.push(WaveVector::from_spherical(3, r, t, f)?);
                        ws.push(jac * wt * wf * t.sin());
                    }
                }
            }
        }
    }
    let (values, _) = ft_batch_scaled(src, &ks, tol)?;
    let terms: Vec<f64> = values.iter().zip(&ws).map(|(s, w)| s.value.norm() * w).collect();
    Ok(crate::quadrature::pairwise_sum(&terms))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::FunctionModel;
    use crate::spectral::TruncatedModel;

    #[test]
    fn alpha_minima() {
        assert!((alpha_min(2).unwrap() - 1.0).abs() < 1e-12);
        assert!((alpha_min(4).unwrap() - 1.0 / 3.0).abs() < 1e-10);
        assert!((alpha_min(14).unwrap() - 1.0 / 729.0).abs() < 1e-9);
        assert!(alpha_min(3).is_err());
    }

    #[test]
    fn power_law_tails() {
        let law = PowerLaw { constant: 1.0, exponent: -14.0 };
        let t = l1_tail(&law, 2.0, 3).unwrap().value().unwrap();
        assert!((t - 4.0 * PI * 2f64.powi(-11) / 11.0).abs() < 1e-15);
        assert_eq!(l1_tail(&PowerLaw { constant: 1.0, exponent: -2.0 }, 1.0, 3).unwrap(), Tail::Divergent);
        assert_eq!(l1_tail(&PowerLaw { constant: 1.0, exponent: -3.0 }, 1.0, 3).unwrap(), Tail::Divergent);
    }

    #[test]
    fn gaussian_decay_is_steep() {
        let g = FunctionModel::gaussian(1, 1.0).unwrap();
        let src = TruncatedModel::with_radius(&g, 12.0).unwrap();
        let fit = decay_exponent_fit(&src, &WaveVector::new(vec![1.0]).unwrap(), (2.0, 6.0), 40, 1e-10).unwrap();
        assert!(fit.exponent < -6.0, "{}", fit.exponent);
    }

    #[test]
    fn zero_source_fit_is_rejected() {
        let z = FunctionModel::zero(2).unwrap();
        let src = TruncatedModel::with_radius(&z, 3.0).unwrap();
        let r = decay_exponent_fit(&src, &WaveVector::new(vec![1.0, 2.0]).unwrap(), (1.0, 10.0), 20, 1e-9);
        assert!(matches!(r, Err(Error::Accuracy(_))));
    }

    #[test]
    fn weighted_inside_matches_gaussian_moment() {
        // ∫_{|k|<6} e^{-k^2/2} / |k| dk in 2D = 2π ∫_0^6 e^{-r^2/2} dr
        let g = FunctionModel::gaussian(2, 1.0).unwrap();
        let src = TruncatedModel::with_radius(&g, 10.0).unwrap();
        let v = weighted_l1_inside(&src, 6.0, 1, 12, 1e-9).unwrap();
        let exact = 2.0 * PI * (PI / 2.0).sqrt() * 0.999_999_998_026_824_9;
        assert!((v - exact).abs() < 1e-7, "{v} vs {exact}");
    }
}
