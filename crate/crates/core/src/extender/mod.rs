//! Compactly supported extensions `f_m` of a model from the box `[-m, m]^dim`.
//!
//! The extension is built in stages, one axis at a time. Stage `k` leaves the
//! previous stage untouched for `|x_a| <= m` and, in the collar
//! `m < |x_a| <= m + w`, replaces it by the collar polynomial whose jets are the
//! `x_a`-partials of the previous stage on the face `x_a = ±m`. Jets depend on
//! the remaining coordinates, and tangential derivatives pass straight through
//! to them because the jet-to-polynomial map is linear. Axis order is `y, x`
//! in 2D and `x, y, z` in 3D.

mod budget;
mod export;

use std::sync::Arc;

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::models::FunctionModel;
use crate::polyext::{BoundaryJet, Collar, CollarPolynomial, HermiteBasis, Orientation, SignClass};
use crate::report::{Check, VerificationReport};

pub use budget::{
    collar_bounds, collar_bounds_report, norm_budget, norm_budget_report, BudgetCase, CollarBounds, NormBudget,
};
pub use export::{export_field, GridSpec};

/// Parameters of one member `f_m` of an extension sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtensionSpec {
    pub model: FunctionModel,
    pub m: f64,
    pub order_n: usize,
    /// Collar width is `m^-exponent`.
    pub exponent: u32,
}

/// Partial order the model must provide for an extension of order `n`: the
/// normal derivative of order `n` on one axis combined with `n - 1` jet
/// derivatives along every other axis.
pub fn required_model_order(dim: usize, n: usize) -> usize {
    n + (dim - 1) * (n - 1)
}

impl ExtensionSpec {
    pub fn new(model: FunctionModel, m: f64, order_n: usize, exponent: u32) -> Result<Self> {
        let spec = ExtensionSpec { model, m, order_n, exponent };
        spec.validate()?;
        Ok(spec)
    }

    pub fn dim(&self) -> usize {
        self.model.dim()
    }

    pub fn width(&self) -> f64 {
        self.m.powi(-(self.exponent as i32))
    }

    fn validate(&self) -> Result<()> {
        if !(self.m > 1.0) || !self.m.is_finite() {
            return invalid(format!("m must be finite and greater than 1, got {}", self.m));
        }
        if self.order_n < 3 {
            return invalid(format!("extension order must be at least 3, got {}", self.order_n));
        }
        if !(1..=3).contains(&self.exponent) {
            return invalid(format!("collar exponent must be 1, 2 or 3, got {}", self.exponent));
        }
        if !(self.width() < self.m) {
            return invalid("collar width must be smaller than m");
        }
        let need = required_model_order(self.dim(), self.order_n);
        if self.model.max_order() < need {
            return Err(Error::OrderOverflow { requested: need, available: self.model.max_order() });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Region {
    Interior,
    Face,
    Edge,
    Corner,
    Outside,
}

/// Which side of a seam a coordinate is approached from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// The closed-box convention: `|x| = m` is interior, `|x| = m + w` collar.
    Exact,
    /// Limit from smaller `|x|`.
    Inward,
    /// Limit from larger `|x|`.
    Outward,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Zone {
    Inside,
    /// Scaled collar coordinate and the sign of the coordinate.
    Collar(f64, f64),
    Outside,
}

/// A built extension; immutable and cheap to evaluate at any point.
#[derive(Debug, Clone)]
pub struct Extension {
    spec: ExtensionSpec,
    axes: Vec<usize>,
    width: f64,
    outer: f64,
    basis: Arc<HermiteBasis>,
}

/// Validate `spec` and assemble the extension.
pub fn build_extension(spec: ExtensionSpec) -> Result<Extension> {
    spec.validate()?;
    let axes = match spec.dim() {
        1 => vec![0],
        2 => vec![1, 0],
        _ => vec![0, 1, 2],
    };
    let width = spec.width();
    Ok(Extension {
        outer: spec.m + width,
        width,
        basis: HermiteBasis::for_order(spec.order_n),
        axes,
        spec,
    })
}

const MAX_DIM: usize = 3;

impl Extension {
    pub fn spec(&self) -> &ExtensionSpec {
        &self.spec
    }

    pub fn dim(&self) -> usize {
        self.spec.dim()
    }

    pub fn m(&self) -> f64 {
        self.spec.m
    }

    pub fn order(&self) -> usize {
        self.spec.order_n
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    /// Half side of the support box, `m + w`.
    pub fn outer(&self) -> f64 {
        self.outer
    }

    /// Axes in the order their collars are applied.
    pub fn stage_axes(&self) -> &[usize] {
        &self.axes
    }

    fn zone(&self, x: f64, side: Side) -> Zone {
        let (m, outer) = (self.spec.m, self.outer);
        let ax = x.abs();
        let sign = if x < 0.0 { -1.0 } else { 1.0 };
        if ax < m {
            Zone::Inside
        } else if ax == m {
            match side {
                Side::Outward => Zone::Collar(0.0, sign),
                _ => Zone::Inside,
            }
        } else if ax < outer {
            Zone::Collar((ax - m) / self.width, sign)
        } else if ax == outer {
            match side {
                Side::Outward => Zone::Outside,
                _ => Zone::Collar(1.0, sign),
            }
        } else {
            Zone::Outside
        }
    }

    /// Region of a point under the closed-box convention.
    pub fn region(&self, p: &[f64]) -> Region {
        let mut collars = 0;
        for &x in p {
            match self.zone(x, Side::Exact) {
                Zone::Outside => return Region::Outside,
                Zone::Collar(..) => collars += 1,
                Zone::Inside => {}
            }
        }
        match (collars, p.len()) {
            (0, _) => Region::Interior,
            (1, _) => Region::Face,
            (2, 3) => Region::Edge,
            _ => Region::Corner,
        }
    }

    fn check_args(&self, p: &[f64], idx: &[usize]) -> Result<()> {
        let dim = self.dim();
        if p.len() != dim || idx.len() != dim {
            return invalid(format!("expected {dim}-dimensional point and index"));
        }
        if p.iter().any(|v| !v.is_finite()) {
            return invalid("evaluation point must be finite");
        }
        let total: usize = idx.iter().sum();
        if total > self.spec.order_n {
            return Err(Error::OrderOverflow { requested: total, available: self.spec.order_n });
        }
        Ok(())
    }

    /// `∂^idx f_m(p)`.
    pub fn eval(&self, p: &[f64], idx: &[usize]) -> Result<f64> {
        self.check_args(p, idx)?;
        self.eval_one_sided(p, idx, &[Side::Exact; MAX_DIM][..p.len()])
    }

    /// `∂^idx f_m(p)` with every coordinate approached from the given side,
    /// giving exact one-sided limits on seams.
    pub fn eval_one_sided(&self, p: &[f64], idx: &[usize], sides: &[Side]) -> Result<f64> {
        self.check_args(p, idx)?;
        if sides.len() != p.len() {
            return invalid("one side per coordinate is required");
        }
        let mut pt = [0.0; MAX_DIM];
        let mut ix = [0usize; MAX_DIM];
        let mut sd = [Side::Exact; MAX_DIM];
        pt[..p.len()].copy_from_slice(p);
        ix[..idx.len()].copy_from_slice(idx);
        sd[..sides.len()].copy_from_slice(sides);
        Ok(self.level(self.axes.len(), pt, ix, &sd))
    }

    /// Value of stage `level` (stage 0 is the model itself).
    fn level(&self, level: usize, mut p: [f64; MAX_DIM], mut idx: [usize; MAX_DIM], sides: &[Side; MAX_DIM]) -> f64 {
        let dim = self.dim();
        if level == 0 {
            return self.spec.model.partial_unchecked(&idx[..dim], &p[..dim]);
        }
        let a = self.axes[level - 1];
        match self.zone(p[a], sides[a]) {
            Zone::Inside => self.level(level - 1, p, idx, sides),
            Zone::Outside => 0.0,
            Zone::Collar(s, sign) => {
                let beta = idx[a];
                let n = self.spec.order_n;
                if beta >= 2 * n {
                    return 0.0;
                }
                let sw = sign * self.width;
                p[a] = sign * self.spec.m;
                let mut sum = 0.0;
                let mut pw = 1.0;
                for i in 0..n {
                    let psi = self.basis.eval(i, s, beta);
                    if psi != 0.0 {
                        idx[a] = i;
                        sum += pw * psi * self.level(level - 1, p, idx, sides);
                    }
                    pw *= sw;
                }
                sum * (sign / self.width).powi(beta as i32)
            }
        }
    }

    /// The collar polynomial along `axis` on the face `x_axis = sign * m`,
    /// with jets taken at the tangential coordinates of `p`.
    pub fn face_polynomial(&self, axis: usize, sign: f64, p: &[f64]) -> Result<CollarPolynomial> {
        self.check_args(p, &vec![0; p.len()])?;
        let level = self
            .axes
            .iter()
            .position(|&a| a == axis)
            .ok_or_else(|| Error::InvalidInput(format!("axis {axis} out of range")))?;
        let mut pt = [0.0; MAX_DIM];
        pt[..p.len()].copy_from_slice(p);
        pt[axis] = sign.signum() * self.spec.m;
        let jet: Vec<f64> = (0..self.spec.order_n)
            .map(|i| {
                let mut idx = [0usize; MAX_DIM];
                idx[axis] = i;
                self.level(level, pt, idx, &[Side::Exact; MAX_DIM])
            })
            .collect();
        let orientation = if sign < 0.0 { Orientation::Decreasing } else { Orientation::Increasing };
        let collar = Collar::new(pt[axis], self.width, orientation)?;
        Ok(CollarPolynomial::new(BoundaryJet::new(jet)?, collar))
    }

    /// Tangential sample coordinates: a uniform grid on `[-m, m]` plus points
    /// inside and on the edges of both collars.
    pub(crate) fn tangential_samples(&self, samples: usize) -> Vec<f64> {
        let m = self.spec.m;
        let w = self.width;
        let mut v: Vec<f64> = (0..samples)
            .map(|i| -m + 2.0 * m * i as f64 / (samples - 1) as f64)
            .collect();
        for s in [1.0 / 3.0, 2.0 / 3.0] {
            v.push(m + s * w);
            v.push(-(m + s * w));
        }
        v.push(self.outer);
        v.push(-self.outer);
        v.sort_by(f64::total_cmp);
        v
    }
}

/// All multi-indices of the given dimension with total order `<= max`.
pub(crate) fn multi_indices(dim: usize, max: usize) -> Vec<[usize; MAX_DIM]> {
    let mut out = Vec::new();
    for i in 0..=max {
        for j in 0..=if dim >= 2 { max - i } else { 0 } {
            for k in 0..=if dim >= 3 { max - i - j } else { 0 } {
                out.push([i, j, k]);
            }
        }
    }
    out
}

/// Every point of the tensor grid built from `axes_values`.
pub(crate) fn grid_points(axes_values: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut pts = vec![Vec::new()];
    for vals in axes_values {
        let mut next = Vec::with_capacity(pts.len() * vals.len());
        for p in &pts {
            for &v in vals {
                let mut q = p.clone();
                q.push(v);
                next.push(q);
            }
        }
        pts = next;
    }
    pts
}

/// Two-sided mismatch of all partials through order `n - 1` across every
/// seam plane `x_a = ±m` and `x_a = ±(m + w)`, relative to the largest value
/// of that partial on the seam. One-sided limits are taken exactly.
pub fn seam_report(ext: &Extension, samples_per_seam: usize, tolerance: f64) -> Result<VerificationReport> {
    if samples_per_seam < 10 {
        return invalid(format!("at least 10 samples per seam are required, got {samples_per_seam}"));
    }
    let dim = ext.dim();
    let n = ext.order();
    let m = ext.m();
    let tangential = ext.tangential_samples(samples_per_seam);
    let indices = multi_indices(dim, n - 1);
    let mut report = VerificationReport::new("seams");
    let mut worst: f64 = 0.0;
    let mut top_jump: f64 = 0.0;
    let mut per_seam = Vec::new();
    let mut signs = [0usize; 4];

    for &a in ext.stage_axes() {
        for plane in [-ext.outer(), -m, m, ext.outer()] {
            let axes_values: Vec<Vec<f64>> = (0..dim)
                .map(|b| if b == a { vec![plane] } else { tangential.clone() })
                .collect();
            let points = grid_points(&axes_values);
            let mut seam_worst: f64 = 0.0;
            for idx in &indices {
                let idx = &idx[..dim];
                let mut scale: f64 = 0.0;
                let mut diffs: f64 = 0.0;
                for p in &points {
                    let mut inward = [Side::Exact; MAX_DIM];
                    let mut outward = [Side::Exact; MAX_DIM];
                    inward[a] = Side::Inward;
                    outward[a] = Side::Outward;
                    let l = ext.eval_one_sided(p, idx, &inward[..dim])?;
                    let r = ext.eval_one_sided(p, idx, &outward[..dim])?;
                    scale = scale.max(l.abs()).max(r.abs());
                    diffs = diffs.max((l - r).abs());
                }
                if scale > 0.0 {
                    seam_worst = seam_worst.max(diffs / scale);
                }
            }
            // The order-n normal derivative may jump; record its size.
            if plane.abs() == m {
                let mut idx = [0usize; MAX_DIM];
                idx[a] = n;
                for p in &points {
                    let mut inward = [Side::Exact; MAX_DIM];
                    let mut outward = [Side::Exact; MAX_DIM];
                    inward[a] = Side::Inward;
                    outward[a] = Side::Outward;
                    let l = ext.eval_one_sided(p, &idx[..dim], &inward[..dim])?;
                    let r = ext.eval_one_sided(p, &idx[..dim], &outward[..dim])?;
                    top_jump = top_jump.max((l - r).abs());
                    let class = ext.face_polynomial(a, plane, p)?.sign_class();
                    signs[match class {
                        SignClass::PositiveDefinite | SignClass::NegativeDefinite => 0,
                        SignClass::Indefinite => 1,
                        SignClass::IdenticallyZero => 2,
                    }] += 1;
                    signs[3] += 1;
                }
            }
            per_seam.push(serde_json::json!({ "axis": a, "plane": plane, "mismatch": seam_worst }));
            worst = worst.max(seam_worst);
        }
    }
    report.push(Check::at_most("max_seam_mismatch", worst, tolerance, 0.0));
    report.detail("per_seam", per_seam);
    report.detail("top_order_normal_jump", top_jump);
    report.detail(
        "face_sign_classes",
        serde_json::json!({ "definite": signs[0], "indefinite": signs[1], "zero": signs[2], "samples": signs[3] }),
    );
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gaussian_ext(dim: usize, m: f64, exponent: u32) -> Extension {
        let model = FunctionModel::gaussian(dim, 1.0).unwrap();
        build_extension(ExtensionSpec::new(model, m, 3, exponent).unwrap()).unwrap()
    }

    #[test]
    fn order_requirement_is_checked() {
        let model = FunctionModel::gaussian(2, 1.0).unwrap().with_max_order(4);
        let err = ExtensionSpec::new(model, 4.0, 3, 2).unwrap_err();
        assert_eq!(err, Error::OrderOverflow { requested: 5, available: 4 });
        assert_eq!(required_model_order(2, 14), 27);
        assert_eq!(required_model_order(3, 14), 40);
    }

    #[test]
    fn regions() {
        let e = gaussian_ext(3, 4.0, 1);
        let c = 4.1;
        assert_eq!(e.region(&[0.0, 0.0, 0.0]), Region::Interior);
        assert_eq!(e.region(&[4.0, 4.0, -4.0]), Region::Interior);
        assert_eq!(e.region(&[c, 0.0, 0.0]), Region::Face);
        assert_eq!(e.region(&[c, -c, 0.0]), Region::Edge);
        assert_eq!(e.region(&[c, -c, c]), Region::Corner);
        assert_eq!(e.region(&[4.25, 0.0, 0.0]), Region::Face);
        assert_eq!(e.region(&[4.3, 0.0, 0.0]), Region::Outside);
        let e2 = gaussian_ext(2, 4.0, 2);
        assert_eq!(e2.region(&[4.01, 4.01]), Region::Corner);
    }

    #[test]
    fn one_dimensional_extension_is_the_collar_polynomial() {
        let e = gaussian_ext(1, 5.0, 1);
        let g = FunctionModel::gaussian(1, 1.0).unwrap();
        let jet: Vec<f64> = (0..3).map(|i| g.partial(&[i], &[5.0]).unwrap()).collect();
        let h = CollarPolynomial::new(BoundaryJet::new(jet).unwrap(), Collar::increasing(5.0, 0.2).unwrap());
        for x in [5.0, 5.03, 5.1, 5.17, 5.2] {
            // The third derivative jumps at x = m, where the box value wins.
            for d in 0..if x == 5.0 { 3 } else { 4 } {
                let a = e.eval(&[x], &[d]).unwrap();
                let b = h.eval(x, d).unwrap();
                assert!((a - b).abs() <= 1e-12 * b.abs().max(1e-300), "x={x} d={d}");
            }
        }
        assert_eq!(e.eval(&[5.2001], &[0]).unwrap(), 0.0);
        assert_eq!(e.eval(&[3.0], &[1]).unwrap(), g.partial(&[1], &[3.0]).unwrap());
    }

    #[test]
    fn zero_model_extends_to_zero() {
        let model = FunctionModel::zero(2).unwrap();
        let e = build_extension(ExtensionSpec::new(model, 3.0, 3, 2).unwrap()).unwrap();
        for p in [[0.0, 0.0], [3.05, 0.2], [3.05, -3.1], [9.0, 0.0]] {
            assert_eq!(e.eval(&p, &[1, 1]).unwrap(), 0.0);
        }
        let r = seam_report(&e, 10, 1e-7).unwrap();
        assert!(r.pass());
        assert_eq!(r.checks[0].measured, 0.0);
    }

    #[test]
    fn seams_of_2d_gaussian_are_continuous() {
        let e = gaussian_ext(2, 4.0, 2);
        let r = seam_report(&e, 10, 1e-7).unwrap();
        assert!(r.pass(), "{:?}", r.checks);
    }

    #[test]
    fn derivative_order_is_limited() {
        let e = gaussian_ext(2, 4.0, 2);
        assert!(e.eval(&[0.0, 0.0], &[3, 1]).is_err());
        assert!(e.eval(&[f64::NAN, 0.0], &[0, 0]).is_err());
    }
}
