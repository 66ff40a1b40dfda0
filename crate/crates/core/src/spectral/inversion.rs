//! Inversion-side checks: derivative/multiplier identities, convergence of
//! `F(f_m)` to `F(f)`, the inverse transform, and small-`r` behaviour.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use super::{
    ft_batch, l1_tail, normalization, ExtensionResidual, PowerLaw, SpectralSource, Tail, TruncatedModel, WaveVector,
};
use crate::error::{invalid, Error, Result};
use crate::extender::{build_extension, Extension, ExtensionSpec};
use crate::models::FunctionModel;
use crate::quadrature::Rule1d;
use crate::report::{Check, VerificationReport};

/// Components smaller than this are too close to the coordinate planes.
pub const AXIS_EXCLUSION: f64 = 0.25;

fn require_off_axis(ks: &[WaveVector], dim: usize, k0: f64) -> Result<()> {
    if ks.is_empty() {
        return invalid("at least one k sample is required");
    }
    for k in ks {
        if k.dim() != dim {
            return invalid("wave vector and model dimensions differ");
        }
        if k.k.iter().any(|c| c.abs() < k0) {
            return invalid(format!("k = {:?} lies within {k0} of a coordinate plane", k.k));
        }
    }
    Ok(())
}

/// Check `F(∂f/∂x_i)(k) = i k_i F(f)(k)` for every axis with the model
/// truncated at `radius`, and `1/|k_i*| <= sqrt(dim)/|k|` for the largest
/// component `k_i*`.
pub fn verify_ratio_identities(
    model: &FunctionModel,
    ks: &[WaveVector],
    radius: f64,
    tolerance: f64,
) -> Result<VerificationReport> {
    let dim = model.dim();
    require_off_axis(ks, dim, AXIS_EXCLUSION)?;
    let base = TruncatedModel::with_radius(model, radius)?;
    let f_hat = ft_batch(&base, ks, 1e-10)?;
    let mut report = VerificationReport::new("ratio_identities");
    let mut tails = vec![base.tail_bound()];
    for axis in 0..dim {
        let mut idx = vec![0; dim];
        idx[axis] = 1;
        let d = base.derivative(&idx)?;
        tails.push(d.tail_bound());
        let d_hat = ft_batch(&d, ks, 1e-10)?;
        let residual = d_hat
            .iter()
            .zip(&f_hat)
            .map(|(a, b)| (a.value - Complex64::new(0.0, b.k.k[axis]) * b.value).norm())
            .fold(0.0, f64::max);
        report.push(Check::at_most(format!("residual_axis{axis}"), residual, 0.0, tolerance));
    }
    let worst_ratio = ks
        .iter()
        .map(|k| {
            let top = k.k.iter().map(|c| c.abs()).fold(0.0, f64::max);
            k.norm() / (top * (dim as f64).sqrt())
        })
        .fold(0.0, f64::max);
    report.push(Check::at_most("max_component_bound", worst_ratio, 1.0, 1e-12));
    report.detail("truncation_radius", radius);
    report.detail("tail_bounds", tails);
    Ok(report)
}

fn extension_schedule(model: &FunctionModel, ms: &[f64], n: usize, exponent: u32) -> Result<Vec<Extension>> {
    ms.iter()
        .map(|&m| build_extension(ExtensionSpec::new(model.clone(), m, n, exponent)?))
        .collect()
}

/// Smallest radius bringing the model tail below `1e-12`, at least `floor`.
fn residual_radius(model: &FunctionModel, floor: f64) -> Result<f64> {
    Ok(TruncatedModel::auto(model, 1e-12)?.radius().max(floor))
}

/// `sup_k |F(f)(k) - F(f_m)(k)|` across a schedule, fitted against `m` in
/// log-log; the slope must be at most `-0.8`.
pub fn ft_convergence(
    model: &FunctionModel,
    ms: &[f64],
    n: usize,
    exponent: u32,
    ks: &[WaveVector],
    k0: f64,
) -> Result<VerificationReport> {
    if ms.len() < 2 {
        return invalid("a convergence fit needs at least two schedule entries");
    }
    if !(k0 > 0.0) {
        return invalid("the axis exclusion k0 must be positive");
    }
    require_off_axis(ks, model.dim(), k0)?;
    let mut sups = Vec::with_capacity(ms.len());
    let mut tails = Vec::with_capacity(ms.len());
    for ext in extension_schedule(model, ms, n, exponent)? {
        let radius = residual_radius(model, ext.outer() + 1.0)?;
        let residual = ExtensionResidual::new(&ext, radius)?;
        tails.push(residual.tail_bound());
        let values = ft_batch(&residual, ks, 1e-9)?;
        sups.push(values.iter().map(|s| s.value.norm()).fold(0.0, f64::max));
    }
    let mut report = VerificationReport::new("ft_convergence");
    report.detail("m_schedule", ms);
    report.detail("sup_differences", &sups);
    report.detail("tail_bounds", tails);
    if sups.iter().all(|&s| s == 0.0) {
        report.push(Check::holds("identically_zero", true));
        return Ok(report);
    }
    // Exact zeros have converged; keep them on the log scale.
    let pts: Vec<(f64, f64)> = ms.iter().zip(&sups).map(|(&m, &s)| (m, s.max(f64::MIN_POSITIVE))).collect();
    let slope = crate::fit::loglog_slope(&pts).unwrap_or(f64::NAN);
    report.push(Check::at_most("convergence_slope", slope, -0.8, 0.0));
    Ok(report)
}

/// An inverse-transform value with its error budget.
#[derive(Debug, Clone, Serialize)]
pub struct InverseValue {
    pub value: Complex64,
    /// `|Q16 - Q12|` on the truncated cube.
    pub quadrature_error: f64,
    /// Bound on the contribution from outside the cube.
    pub tail_bound: f64,
}

/// `(2π)^{-d/2} ∫ g(k) e^{ik·x} dk` over the cube `[-R, R]^dim`, with the
/// outside bounded by `tail` (which dominates `|g|` for `|k| >= R`).
/// `panel` caps the panel length in k.
pub fn inverse_at_point(
    g: impl Fn(&[f64]) -> Complex64,
    dim: usize,
    x: &[f64],
    radius: f64,
    panel: f64,
    tail: &PowerLaw,
    tol: f64,
) -> Result<InverseValue> {
    if x.len() != dim || !(1..=3).contains(&dim) {
        return invalid("x must have 1 to 3 components matching dim");
    }
    if !(panel > 0.0) {
        return invalid("panel length must be positive");
    }
    let tail_bound = match l1_tail(tail, radius, dim)? {
        Tail::Finite(t) => t * normalization(dim),
        Tail::Divergent => return Err(Error::Accuracy("spectral tail diverges".into())),
    };
    if tail_bound > tol {
        return Err(Error::Accuracy(format!(
            "tail bound {tail_bound:e} beyond radius {radius} exceeds tolerance {tol:e}"
        )));
    }
    let xmax = x.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let len = if xmax > 0.0 { panel.min(1.5 * 2.0 * PI / xmax) } else { panel };
    let integrate = |order: usize| -> Complex64 {
        let rule = Rule1d::panelled(&[-radius, radius], len, order);
        let mut acc = Complex64::new(0.0, 0.0);
        let mut k = vec![0.0; dim];
        let n = rule.len();
        let total = n.pow(dim as u32);
        for flat in 0..total {
            let mut rest = flat;
            let mut w = 1.0;
            let mut phase = 0.0;
            for a in (0..dim).rev() {
                let i = rest % n;
                rest /= n;
                k[a] = rule.nodes[i];
                w *= rule.weights[i];
                phase += k[a] * x[a];
            }
            acc += g(&k) * Complex64::from_polar(w, phase);
        }
        acc * normalization(dim)
    };
    let hi = integrate(16);
    let lo = integrate(12);
    Ok(InverseValue { value: hi, quadrature_error: (hi - lo).norm(), tail_bound })
}

/// `(1/2π) ∫_{-K}^{K} e^{iku} dk = sin(Ku)/(πu)`.
fn dirichlet(cutoff: f64, u: f64) -> f64 {
    let t = cutoff * u;
    if t.abs() < 1e-6 {
        cutoff / PI * (1.0 - t * t / 6.0)
    } else {
        t.sin() / (PI * u)
    }
}

/// `F^{-1}(1_{|k_i|<=K} F(f_m))(x)` at every point. With the order of
/// integration exchanged this is `f_m` convolved with a product of
/// Dirichlet kernels, which avoids sampling `F(f_m)` at all.
fn band_limited_inverse(ext: &Extension, points: &[Vec<f64>], cutoff: f64) -> Vec<f64> {
    let dim = ext.dim();
    let period = 2.0 * PI / cutoff;
    let panel = (1.5 * period).min(1.0);
    let breaks = ext.breaks(0);
    let rule = Rule1d::panelled(&breaks, panel, 16);
    let n = rule.len();
    // kernel[p][a][i] = w_i D(x_pa - node_i)
    let kernels: Vec<Vec<Vec<f64>>> = points
        .iter()
        .map(|x| {
            (0..dim)
                .map(|a| rule.nodes.iter().zip(&rule.weights).map(|(&y, &w)| w * dirichlet(cutoff, x[a] - y)).collect())
                .collect()
        })
        .collect();
    let zero = [0usize; 3];
    let mut acc = vec![0.0; points.len()];
    let mut p = vec![0.0; dim];
    let mut slab = vec![0.0; n.pow(dim as u32 - 1)];
    for i in 0..n {
        p[0] = rule.nodes[i];
        for (j, v) in slab.iter_mut().enumerate() {
            let mut rest = j;
            for a in (1..dim).rev() {
                p[a] = rule.nodes[rest % n];
                rest /= n;
            }
            *v = ext.eval(&p, &zero[..dim]).expect("node inside the support box");
        }
        for (out, ker) in acc.iter_mut().zip(&kernels) {
            let inner = match dim {
                1 => slab[0],
                2 => slab.iter().zip(&ker[1]).map(|(v, k)| v * k).sum(),
                _ => (0..n)
                    .map(|j| ker[1][j] * slab[j * n..(j + 1) * n].iter().zip(&ker[2]).map(|(v, k)| v * k).sum::<f64>())
                    .sum(),
            };
            *out += ker[0][i] * inner;
        }
    }
    acc
}

const ROUNDING_ULPS: f64 = 1024.0;

/// Max over `points` of `|f(x) - F^{-1}(F(f_m))(x)|` for each `m`, with
/// the inverse truncated to the cube `|k_i| <= cutoff`. Errors must not grow
/// along the schedule, and the last must be below `final_bound` if given.
pub fn inversion_error(
    model: &FunctionModel,
    ms: &[f64],
    n: usize,
    exponent: u32,
    points: &[Vec<f64>],
    cutoff: f64,
    final_bound: Option<f64>,
) -> Result<VerificationReport> {
    if ms.is_empty() || points.is_empty() || !(cutoff > 0.0) {
        return invalid("inversion needs a schedule, sample points and a positive cutoff");
    }
    if points.iter().any(|p| p.len() != model.dim()) {
        return invalid("sample points must match the model dimension");
    }
    let mut scale: f64 = 0.0;
    for x in points {
        scale = scale.max(model.value(x)?.abs());
    }
    let mut errors = Vec::with_capacity(ms.len());
    for ext in extension_schedule(model, ms, n, exponent)? {
        let rec = band_limited_inverse(&ext, points, cutoff);
        let mut worst: f64 = 0.0;
        for (x, r) in points.iter().zip(rec) {
            worst = worst.max((model.value(x)? - r).abs());
        }
        errors.push(worst);
    }
    let mut report = VerificationReport::new("inversion");
    report.detail("m_schedule", ms);
    report.detail("max_errors", &errors);
    report.detail("cutoff", cutoff);
    // Once converged the errors are rounding noise and may wobble.
    let floor = ROUNDING_ULPS * f64::EPSILON * scale.max(1.0);
    report.detail("rounding_floor", floor);
    let decreasing = errors.windows(2).all(|w| w[1] <= w[0].max(floor));
    report.push(Check::holds("errors_decrease", decreasing));
    if let Some(bound) = final_bound {
        report.push(Check::at_most("final_error", *errors.last().expect("nonempty"), bound, 0.0));
    }
    Ok(report)
}

/// `r |F(f)(r u)|` along the direction `u(θ, φ)` as `r` shrinks: must
/// decrease along `rs` and end below `tol`.
pub fn radial_limit_check(
    model: &FunctionModel,
    theta: f64,
    phi: f64,
    rs: &[f64],
    tol: f64,
) -> Result<VerificationReport> {
    let dim = model.dim();
    let dir = WaveVector::from_spherical(dim, 1.0, theta, phi)?;
    if !dir.is_generic() {
        return invalid(format!("direction (θ={theta}, φ={phi}) has a vanishing direction cosine"));
    }
    if rs.len() < 2 || rs.iter().any(|&r| !(r > 0.0)) || rs.windows(2).any(|w| !(w[1] < w[0])) {
        return invalid("radii must be positive and strictly decreasing");
    }
    let src = TruncatedModel::auto(model, 1e-9)?;
    let ks: Vec<WaveVector> = rs.iter().map(|&r| dir.scaled(r)).collect();
    let values = ft_batch(&src, &ks, 1e-10)?;
    let scaled: Vec<f64> = values.iter().zip(rs).map(|(s, &r)| r * s.value.norm()).collect();
    let mut report = VerificationReport::new("radial_limit");
    report.detail("radii", rs);
    report.detail("r_times_abs_f", &scaled);
    report.detail("tail_bound", src.tail_bound());
    report.push(Check::holds("decreasing", scaled.windows(2).all(|w| w[1] <= w[0])));
    report.push(Check::at_most("final", *scaled.last().expect("nonempty"), tol, 0.0));
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_ratio_identity_1d() {
        let g = FunctionModel::gaussian(1, 1.0).unwrap();
        let ks = [WaveVector::new(vec![2.0]).unwrap()];
        let r = verify_ratio_identities(&g, &ks, 12.0, 1e-9).unwrap();
        assert!(r.pass(), "{r:?}");
    }

    #[test]
    fn axis_adjacent_k_is_rejected() {
        let g = FunctionModel::gaussian(2, 1.0).unwrap();
        let ks = [WaveVector::new(vec![0.0, 1.0]).unwrap()];
        assert!(verify_ratio_identities(&g, &ks, 8.0, 1e-9).is_err());
    }

    #[test]
    fn gaussian_inverse() {
        let gauss = |k: &[f64]| Complex64::new((-k.iter().map(|v| v * v).sum::<f64>() / 2.0).exp(), 0.0);
        // e^{-k^2/2} <= C k^-30 beyond 10 with C = e^{-50} 10^30
        let law = PowerLaw { constant: (-50.0f64).exp() * 1e30, exponent: -30.0 };
        for x in [-1.5, 0.0, 0.7, 2.0] {
            let v = inverse_at_point(gauss, 1, &[x], 10.0, 1.0, &law, 1e-8).unwrap();
            assert!((v.value.re - (-x * x / 2.0f64).exp()).abs() < 1e-10);
        }
        let short = inverse_at_point(gauss, 1, &[0.0], 2.0, 1.0, &PowerLaw { constant: 1.0, exponent: -2.0 }, 1e-6);
        assert!(matches!(short, Err(Error::Accuracy(_))));
    }

    #[test]
    fn short_schedule_is_rejected() {
        let g = FunctionModel::gaussian(2, 1.0).unwrap();
        let ks = [WaveVector::new(vec![1.0, 1.0]).unwrap()];
        assert!(ft_convergence(&g, &[4.0], 3, 1, &ks, 0.5).is_err());
    }

    #[test]
    fn radial_limit_of_gaussian() {
        let g = FunctionModel::gaussian(2, 1.0).unwrap();
        let r = radial_limit_check(&g, 0.0, 0.4, &[1.0, 0.1, 0.01, 0.001], 1e-2).unwrap();
        assert!(r.pass(), "{r:?}");
        assert!(radial_limit_check(&g, 0.0, PI / 2.0, &[1.0, 0.1], 1e-2).is_err());
    }
}
