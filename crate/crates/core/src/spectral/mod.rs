//! Fourier transforms of extensions and models under the symmetric
//! normalisation `F(f)(k) = (2π)^{-d/2} ∫ f(x) e^{-i k·x} dx`.
//!
//! Transforms are computed by tensor Gauss-Legendre quadrature on panels that
//! respect every seam of the source and are short enough to resolve the
//! oscillation. A batch of wave vectors shares one sampling pass: the source
//! is evaluated slab by slab and each slab is contracted against per-axis
//! phase tables. The error estimate is the difference between 16- and
//! 12-point rules on the same panels; panels are halved until it is small.

mod decay;
mod grid;
mod inversion;

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::extender::Extension;
use crate::models::{DecayClass, FunctionModel};
use crate::quadrature::Rule1d;

pub use decay::{
    alpha, alpha_min, decay_bound_check, decay_bound_check_samples, decay_exponent_fit, l1_tail, weighted_l1_inside,
    DecayFit, PowerLaw, Tail,
};
pub use grid::{ft_grid, ft_grid_at, sample_source, SpectralGrid};
pub use inversion::{
    AXIS_EXCLUSION,
    ft_convergence, inverse_at_point, inversion_error, radial_limit_check, verify_ratio_identities, InverseValue,
};

/// `(2π)^{-d/2}`.
pub fn normalization(dim: usize) -> f64 {
    (2.0 * PI).powf(-(dim as f64) / 2.0)
}

/// A wave vector `k`, with spherical form `k = r (sinθ cosφ, sinθ sinφ, cosθ)`
/// in 3D and `k = r (cosφ, sinφ)` in 2D.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WaveVector {
    pub k: Vec<f64>,
}

impl WaveVector {
    pub fn new(k: Vec<f64>) -> Result<Self> {
        if !(1..=3).contains(&k.len()) || k.iter().any(|v| !v.is_finite()) {
            return invalid("wave vectors need 1 to 3 finite components");
        }
        Ok(WaveVector { k })
    }

    pub fn from_spherical(dim: usize, r: f64, theta: f64, phi: f64) -> Result<Self> {
        let k = match dim {
            1 => vec![r],
            2 => vec![r * phi.cos(), r * phi.sin()],
            3 => vec![r * theta.sin() * phi.cos(), r * theta.sin() * phi.sin(), r * theta.cos()],
            _ => return invalid(format!("dimension must be 1, 2 or 3, got {dim}")),
        };
        WaveVector::new(k)
    }

    /// `(r, θ, φ)`; `θ` is `π/2` in 2D and both angles are 0 in 1D.
    pub fn to_spherical(&self) -> (f64, f64, f64) {
        let r = self.norm();
        match self.k.len() {
            1 => (r, 0.0, 0.0),
            2 => (r, PI / 2.0, self.k[1].atan2(self.k[0])),
            _ => {
                let theta = if r == 0.0 { 0.0 } else { (self.k[2] / r).clamp(-1.0, 1.0).acos() };
                (r, theta, self.k[1].atan2(self.k[0]))
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.k.len()
    }

    pub fn norm(&self) -> f64 {
        self.k.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn scaled(&self, s: f64) -> WaveVector {
        WaveVector { k: self.k.iter().map(|v| v * s).collect() }
    }

    /// All direction cosines are bounded away from zero.
    pub fn is_generic(&self) -> bool {
        let r = self.norm();
        r > 0.0 && self.k.iter().all(|v| (v / r).abs() > 1e-12)
    }
}

/// A transform value with its quadrature error estimate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralSample {
    pub k: WaveVector,
    pub value: Complex64,
    pub error: f64,
}

/// A real function with known support box and interior seams.
pub trait SpectralSource {
    fn dim(&self) -> usize;
    /// Sorted breakpoints along `axis`; the first and last bound the support.
    fn breaks(&self, axis: usize) -> Vec<f64>;
    fn value(&self, p: &[f64]) -> f64;
    /// Bound on `∫|f|` outside the breakpoint box.
    fn tail_bound(&self) -> f64 {
        0.0
    }
}

impl SpectralSource for Extension {
    fn dim(&self) -> usize {
        Extension::dim(self)
    }

    fn breaks(&self, _axis: usize) -> Vec<f64> {
        vec![-self.outer(), -self.m(), self.m(), self.outer()]
    }

    fn value(&self, p: &[f64]) -> f64 {
        self.eval(p, &[0, 0, 0][..p.len()]).expect("finite point in support box")
    }
}

/// Surface area of the unit sphere in R^dim.
pub fn sphere_area(dim: usize) -> f64 {
    match dim {
        1 => 2.0,
        2 => 2.0 * PI,
        _ => 4.0 * PI,
    }
}

const TRUNCATION_PROBE_RAYS: usize = 16;
const MAX_TRUNCATION_RADIUS: f64 = 64.0;

/// A model partial `∂^idx f` restricted to `[-R, R]^dim`.
#[derive(Debug, Clone)]
pub struct TruncatedModel<'a> {
    model: &'a FunctionModel,
    idx: Vec<usize>,
    radius: f64,
    tail: f64,
}

impl<'a> TruncatedModel<'a> {
    /// Truncate at `radius`, with the tail estimated from the decay class.
    pub fn with_radius(model: &'a FunctionModel, radius: f64) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return invalid(format!("truncation radius must be positive, got {radius}"));
        }
        let tail = tail_estimate(model, &vec![0; model.dim()], radius)?;
        Ok(TruncatedModel { model, idx: vec![0; model.dim()], radius, tail })
    }

    /// Smallest integer radius (at most 64) whose tail estimate is below `tol`.
    pub fn auto(model: &'a FunctionModel, tol: f64) -> Result<Self> {
        let mut r = 2.0;
        while r <= MAX_TRUNCATION_RADIUS {
            let t = TruncatedModel::with_radius(model, r)?;
            if t.tail <= tol {
                return Ok(t);
            }
            r += 1.0;
        }
        Err(Error::Accuracy(format!(
            "no truncation radius up to {MAX_TRUNCATION_RADIUS} brings the tail below {tol}"
        )))
    }

    /// The same truncation applied to the partial `∂^idx f`.
    pub fn derivative(&self, idx: &[usize]) -> Result<Self> {
        if idx.len() != self.model.dim() {
            return invalid("derivative index has the wrong dimension");
        }
        let tail = tail_estimate(self.model, idx, self.radius)?;
        Ok(TruncatedModel { model: self.model, idx: idx.to_vec(), radius: self.radius, tail })
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }
}

impl SpectralSource for TruncatedModel<'_> {
    fn dim(&self) -> usize {
        self.model.dim()
    }

    fn breaks(&self, _axis: usize) -> Vec<f64> {
        geometric_breaks(0.0, self.radius)
    }

    fn value(&self, p: &[f64]) -> f64 {
        self.model.partial_unchecked(&self.idx, p)
    }

    fn tail_bound(&self) -> f64 {
        self.tail
    }
}

/// Estimate `∫_{|x| > R} |∂^idx f|` from the decay class, with the constant
/// measured along seeded rays. Non-integrable classes are rejected.
fn tail_estimate(model: &FunctionModel, idx: &[usize], radius: f64) -> Result<f64> {
    use rand::SeedableRng;
    let dim = model.dim();
    let total: usize = idx.iter().sum();
    if total > model.max_order() {
        return Err(Error::OrderOverflow { requested: total, available: model.max_order() });
    }
    if model.is_zero() {
        return Ok(0.0);
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x7a11);
    let mut rays: Vec<Vec<f64>> = (0..TRUNCATION_PROBE_RAYS)
        .map(|_| crate::models::random_unit(&mut rng, dim))
        .collect();
    for a in 0..dim {
        let mut e = vec![0.0; dim];
        e[a] = 1.0;
        rays.push(e);
    }
    let sup_at = |r: f64| -> f64 {
        rays.iter()
            .map(|u| {
                let x: Vec<f64> = u.iter().map(|v| v * r).collect();
                model.partial_unchecked(idx, &x).abs()
            })
            .fold(0.0, f64::max)
    };
    let area = sphere_area(dim);
    match model.decay_class() {
        DecayClass::Schwartz => {
            // Shell sum of the sampled sup over [R, R + 32].
            let h = 0.25;
            let mut tail = 0.0;
            let mut r = radius;
            while r < radius + 32.0 {
                let mid = r + h / 2.0;
                tail += area * mid.powi(dim as i32 - 1) * sup_at(mid) * h;
                r += h;
            }
            Ok(tail)
        }
        class => {
            let q = class.power().unwrap_or(0.0);
            if q <= dim as f64 {
                return invalid(format!("a model decaying like |x|^-{q} is not integrable in {dim}D"));
            }
            let c = (0..=8)
                .map(|k| {
                    let r = radius * 2f64.powi(k);
                    sup_at(r) * r.powf(q)
                })
                .fold(0.0, f64::max);
            Ok(c * area * radius.powf(dim as f64 - q) / (q - dim as f64))
        }
    }
}

/// `f - f_m`, which vanishes on the box `[-m, m]^dim`, truncated at `R`.
#[derive(Debug, Clone)]
pub struct ExtensionResidual<'a> {
    ext: &'a Extension,
    radius: f64,
    tail: f64,
}

impl<'a> ExtensionResidual<'a> {
    pub fn new(ext: &'a Extension, radius: f64) -> Result<Self> {
        if !(radius >= ext.outer()) {
            return invalid("residual truncation radius must contain the extension support");
        }
        let tail = tail_estimate(&ext.spec().model, &vec![0; ext.dim()], radius)?;
        Ok(ExtensionResidual { ext, radius, tail })
    }
}

impl SpectralSource for ExtensionResidual<'_> {
    fn dim(&self) -> usize {
        self.ext.dim()
    }

    fn breaks(&self, _axis: usize) -> Vec<f64> {
        let (m, o) = (self.ext.m(), self.ext.outer());
        let mut b = vec![-m, m];
        let outside = geometric_breaks(o, self.radius);
        b.extend(outside.iter().filter(|&&x| x >= o));
        b.extend(outside.iter().filter(|&&x| x <= -o));
        b.sort_by(f64::total_cmp);
        b.dedup();
        b
    }

    fn value(&self, p: &[f64]) -> f64 {
        let m = self.ext.m();
        if p.iter().all(|x| x.abs() <= m) {
            return 0.0;
        }
        let model = &self.ext.spec().model;
        let zero = [0usize; 3];
        let f = model.partial_unchecked(&zero[..p.len()], p);
        if p.iter().any(|x| x.abs() > self.ext.outer()) {
            f
        } else {
            f - self.ext.eval(p, &zero[..p.len()]).expect("point in support box")
        }
    }

    fn tail_bound(&self) -> f64 {
        self.tail
    }
}

/// Symmetric breakpoints `±inner, ±2^j, ±outer` with `2^j` strictly
/// between; `inner = 0` gives a single central point.
fn geometric_breaks(inner: f64, outer: f64) -> Vec<f64> {
    let mut pos = vec![inner];
    let mut x = 1.0;
    while x < outer {
        if x > inner {
            pos.push(x);
        }
        x *= 2.0;
    }
    pos.push(outer);
    let mut b: Vec<f64> = pos.iter().rev().map(|v| -v).collect();
    b.extend(pos);
    b.dedup();
    b
}

/// A closure on an explicit box with explicit seams.
pub struct FnSource<F: Fn(&[f64]) -> f64> {
    breaks: Vec<Vec<f64>>,
    f: F,
}

impl<F: Fn(&[f64]) -> f64> FnSource<F> {
    pub fn new(breaks: Vec<Vec<f64>>, f: F) -> Result<Self> {
        if !(1..=3).contains(&breaks.len()) || breaks.iter().any(|b| b.len() < 2 || b.windows(2).any(|w| !(w[1] > w[0]))) {
            return invalid("each axis needs at least two increasing breakpoints");
        }
        Ok(FnSource { breaks, f })
    }
}

impl<F: Fn(&[f64]) -> f64> SpectralSource for FnSource<F> {
    fn dim(&self) -> usize {
        self.breaks.len()
    }

    fn breaks(&self, axis: usize) -> Vec<f64> {
        self.breaks[axis].clone()
    }

    fn value(&self, p: &[f64]) -> f64 {
        (self.f)(p)
    }
}

const HIGH_ORDER: usize = 16;
const LOW_ORDER: usize = 12;
const MAX_REFINEMENTS: usize = 3;
/// Panels span at most this many oscillation periods.
const PERIODS_PER_PANEL: f64 = 1.5;

/// Axis rules for a batch. Panels are no longer than 1.5 periods of the
/// fastest component along the axis, and no longer than `max(1, |x|/2)` for
/// the segment's distance `|x|` from the origin; all halved `level` times.
fn axis_rules(src: &dyn SpectralSource, ks: &[WaveVector], level: usize, order: usize) -> Vec<Rule1d> {
    let shrink = 2f64.powi(level as i32);
    (0..src.dim())
        .map(|a| {
            let kmax = ks.iter().map(|k| k.k[a].abs()).fold(0.0, f64::max);
            let oscillation = if kmax > 0.0 { PERIODS_PER_PANEL * 2.0 * PI / kmax } else { f64::INFINITY };
            let mut rule = Rule1d::default();
            for seg in src.breaks(a).windows(2) {
                let dist = if seg[0] < 0.0 && seg[1] > 0.0 { 0.0 } else { seg[0].abs().min(seg[1].abs()) };
                let panel = oscillation.min((dist / 2.0).max(1.0)) / shrink;
                let part = Rule1d::panelled(seg, panel, order);
                rule.nodes.extend(part.nodes);
                rule.weights.extend(part.weights);
            }
            rule
        })
        .collect()
}

/// Quadrature of the transform for every `k` with one pass over the source.
/// Returns the values (normalised) and `∫|f|` on the same nodes.
fn transform_pass(src: &dyn SpectralSource, ks: &[WaveVector], rules: &[Rule1d]) -> (Vec<Complex64>, f64) {
    let dim = src.dim();
    let phases: Vec<Vec<Vec<Complex64>>> = ks
        .iter()
        .map(|k| {
            rules
                .iter()
                .enumerate()
                .map(|(a, r)| {
                    r.nodes
                        .iter()
                        .zip(&r.weights)
                        .map(|(&x, &w)| Complex64::from_polar(w, -k.k[a] * x))
                        .collect()
                })
                .collect()
        })
        .collect();
    let sizes: Vec<usize> = rules.iter().map(|r| r.len()).collect();
    let slab_len: usize = sizes[1..].iter().product();
    let mut slab = vec![0.0; slab_len];
    let mut acc = vec![Complex64::new(0.0, 0.0); ks.len()];
    let mut l1 = 0.0;
    let mut p = vec![0.0; dim];
    for (i, &x0) in rules[0].nodes.iter().enumerate() {
        p[0] = x0;
        let mut any = false;
        match dim {
            1 => {
                slab[0] = src.value(&p);
                any = slab[0] != 0.0;
            }
            2 => {
                for (j, &y) in rules[1].nodes.iter().enumerate() {
                    p[1] = y;
                    slab[j] = src.value(&p);
                    any |= slab[j] != 0.0;
                }
            }
            _ => {
                for (j, &y) in rules[1].nodes.iter().enumerate() {
                    p[1] = y;
                    for (l, &z) in rules[2].nodes.iter().enumerate() {
                        p[2] = z;
                        let v = src.value(&p);
                        slab[j * sizes[2] + l] = v;
                        any |= v != 0.0;
                    }
                }
            }
        }
        if !any {
            continue;
        }
        let w0 = rules[0].weights[i];
        l1 += w0 * slab_abs_weighted(&slab, &rules[1..]);
        for (kk, ph) in phases.iter().enumerate() {
            let inner = match dim {
                1 => Complex64::new(slab[0], 0.0),
                2 => slab.iter().zip(&ph[1]).map(|(&v, &e)| e * v).sum(),
                _ => {
                    let mut s = Complex64::new(0.0, 0.0);
                    for (j, e1) in ph[1].iter().enumerate() {
                        let row = &slab[j * sizes[2]..(j + 1) * sizes[2]];
                        let t: Complex64 = row.iter().zip(&ph[2]).map(|(&v, &e)| e * v).sum();
                        s += e1 * t;
                    }
                    s
                }
            };
            acc[kk] += ph[0][i] * inner;
        }
    }
    let norm = normalization(dim);
    (acc.into_iter().map(|v| v * norm).collect(), l1 * norm)
}

fn slab_abs_weighted(slab: &[f64], rules: &[Rule1d]) -> f64 {
    match rules.len() {
        0 => slab[0].abs(),
        1 => slab.iter().zip(&rules[0].weights).map(|(v, w)| v.abs() * w).sum(),
        _ => {
            let n2 = rules[1].len();
            rules[0]
                .weights
                .iter()
                .enumerate()
                .map(|(j, w1)| {
                    let row = &slab[j * n2..(j + 1) * n2];
                    w1 * row.iter().zip(&rules[1].weights).map(|(v, w)| v.abs() * w).sum::<f64>()
                })
                .sum()
        }
    }
}

/// Transform at every `k`, refining panels until the 16/12-point difference
/// is at most `tol * (2π)^{-d/2} ∫|f|` for all of them.
pub fn ft_batch(src: &dyn SpectralSource, ks: &[WaveVector], tol: f64) -> Result<Vec<SpectralSample>> {
    ft_batch_scaled(src, ks, tol).map(|(s, _)| s)
}

/// [`ft_batch`] plus the normalised `∫|f|` it measured.
pub(crate) fn ft_batch_scaled(src: &dyn SpectralSource, ks: &[WaveVector], tol: f64) -> Result<(Vec<SpectralSample>, f64)> {
    let dim = src.dim();
    if let Some(k) = ks.iter().find(|k| k.dim() != dim) {
        return invalid(format!("wave vector {:?} does not match source dimension {dim}", k.k));
    }
    if ks.is_empty() {
        return Ok((Vec::new(), 0.0));
    }
    let mut worst = f64::INFINITY;
    for level in 0..=MAX_REFINEMENTS {
        let (hi, l1) = transform_pass(src, ks, &axis_rules(src, ks, level, HIGH_ORDER));
        let (lo, _) = transform_pass(src, ks, &axis_rules(src, ks, level, LOW_ORDER));
        let errors: Vec<f64> = hi.iter().zip(&lo).map(|(a, b)| (a - b).norm()).collect();
        worst = errors.iter().fold(0.0, |m, &e| m.max(e));
        if worst <= tol * l1 {
            let samples = ks
                .iter()
                .zip(hi)
                .zip(errors)
                .map(|((k, value), error)| SpectralSample { k: k.clone(), value, error })
                .collect();
            return Ok((samples, l1));
        }
    }
    Err(Error::Accuracy(format!(
        "Fourier quadrature did not converge after {MAX_REFINEMENTS} panel refinements (error {worst:e})"
    )))
}

pub fn ft_point(src: &dyn SpectralSource, k: &WaveVector, tol: f64) -> Result<SpectralSample> {
    Ok(ft_batch(src, std::slice::from_ref(k), tol)?.remove(0))
}
