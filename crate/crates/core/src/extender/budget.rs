//! Integral budgets of an extension: the L1 norm of the order-`n` normal
//! derivatives split by region, and the size of `f_m` on the collar shell.

use serde::Serialize;

use super::{grid_points, Extension};
use crate::error::{invalid, Result};
use crate::fit;
use crate::polyext::{BoundaryJet, Collar, CollarPolynomial};
use crate::quadrature::{tensor_integrate, Rule1d};
use crate::report::{Check, VerificationReport};

/// One region of the decomposition: the interior box (shared by all
/// derivative axes), or the union of boxes collared along `collar_axes`.
#[derive(Debug, Clone, Serialize)]
pub struct BudgetCase {
    pub derivative_axes: Vec<usize>,
    pub collar_axes: Vec<usize>,
    /// `∫ |∂^n f_m / ∂x_a^n|` over the region, one entry per derivative axis.
    pub l1: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct NormBudget {
    pub m: f64,
    pub cases: Vec<BudgetCase>,
    /// Total per derivative axis.
    pub per_axis: Vec<f64>,
}

impl NormBudget {
    pub fn max_total(&self) -> f64 {
        self.per_axis.iter().fold(0.0, |a, &b| a.max(b))
    }
}

const PANEL: f64 = 1.0;
const PANEL_ORDER: usize = 8;

/// Quadrature rule along one axis of a region: the inner interval, or the
/// collar on the given side.
fn axis_rule(ext: &Extension, collar_side: Option<f64>) -> Rule1d {
    let m = ext.m();
    match collar_side {
        None => Rule1d::panelled(&[-m, m], PANEL, PANEL_ORDER),
        Some(sign) => {
            let (a, b) = if sign > 0.0 { (m, ext.outer()) } else { (-ext.outer(), -m) };
            Rule1d::on_interval(a, b, 2 * ext.order() + 2)
        }
    }
}

/// Sign patterns for the collar axes of `mask`, as per-axis `Option<sign>`.
fn region_boxes(dim: usize, mask: usize) -> Vec<Vec<Option<f64>>> {
    let collar: Vec<usize> = (0..dim).filter(|a| mask & (1 << a) != 0).collect();
    (0..1usize << collar.len())
        .map(|bits| {
            let mut sides = vec![None; dim];
            for (k, &a) in collar.iter().enumerate() {
                sides[a] = Some(if bits & (1 << k) != 0 { -1.0 } else { 1.0 });
            }
            sides
        })
        .collect()
}

fn mask_axes(dim: usize, mask: usize) -> Vec<usize> {
    (0..dim).filter(|a| mask & (1 << a) != 0).collect()
}

fn region_integral(ext: &Extension, mask: usize, mut f: impl FnMut(&[f64]) -> f64) -> f64 {
    let dim = ext.dim();
    region_boxes(dim, mask)
        .iter()
        .map(|sides| {
            let rules: Vec<Rule1d> = sides.iter().map(|&s| axis_rule(ext, s)).collect();
            let refs: Vec<&Rule1d> = rules.iter().collect();
            tensor_integrate(&refs, &mut f)
        })
        .sum()
}

fn normal_derivative(ext: &Extension, p: &[f64], axis: usize) -> f64 {
    let mut idx = [0usize; 3];
    idx[axis] = ext.order();
    ext.eval(p, &idx[..p.len()]).expect("validated extension")
}

/// Per-region L1 norms of the order-`n` normal derivatives: `2^dim` regions
/// per axis, with the interior shared (7 cases in 2D, 22 in 3D).
pub fn norm_budget(ext: &Extension) -> NormBudget {
    let dim = ext.dim();
    let all: Vec<usize> = (0..dim).collect();
    let mut cases = Vec::new();
    let interior: Vec<f64> = all
        .iter()
        .map(|&a| region_integral(ext, 0, |p| normal_derivative(ext, p, a).abs()))
        .collect();
    let mut per_axis = interior.clone();
    cases.push(BudgetCase { derivative_axes: all.clone(), collar_axes: Vec::new(), l1: interior });
    for &a in &all {
        for mask in 1..1usize << dim {
            let v = region_integral(ext, mask, |p| normal_derivative(ext, p, a).abs());
            per_axis[a] += v;
            cases.push(BudgetCase { derivative_axes: vec![a], collar_axes: mask_axes(dim, mask), l1: vec![v] });
        }
    }
    NormBudget { m: ext.m(), cases, per_axis }
}

/// Fit `G` at the smallest `m` from `total <= G m^dim` and check it at every
/// larger `m`; also check the log-log growth rate of the total.
pub fn norm_budget_report(exts: &[Extension], rel_tol: f64) -> Result<VerificationReport> {
    let budgets: Vec<NormBudget> = sorted_by_m(exts)?.into_iter().map(norm_budget).collect();
    let dim = exts[0].dim() as i32;
    let mut report = VerificationReport::new("norm_budget");
    let g = budgets[0].max_total() / budgets[0].m.powi(dim);
    report.detail("fitted_g", g);
    for b in &budgets[1..] {
        let bound = g * b.m.powi(dim);
        report.push(Check::at_most(format!("budget_at_m_{}", b.m), b.max_total(), bound, rel_tol * bound));
    }
    let pts: Vec<(f64, f64)> = budgets.iter().map(|b| (b.m, b.max_total())).collect();
    let slope = if pts.iter().all(|p| p.1 > 0.0) { fit::loglog_slope(&pts).unwrap_or(0.0) } else { 0.0 };
    report.push(Check::at_most("budget_growth_exponent", slope, dim as f64 + 0.1, 0.0));
    report.detail("budgets", &budgets);
    Ok(report)
}

fn sorted_by_m(exts: &[Extension]) -> Result<Vec<&Extension>> {
    if exts.len() < 2 {
        return invalid("an m-schedule needs at least two extensions");
    }
    if exts.windows(2).any(|w| w[0].dim() != w[1].dim()) {
        return invalid("all extensions in a schedule must share a dimension");
    }
    let mut v: Vec<&Extension> = exts.iter().collect();
    v.sort_by(|a, b| a.m().total_cmp(&b.m()));
    Ok(v)
}

/// L1 norm and sup of `f_m` on the collar shell `C_{m+w} \ C_m`, with the
/// chained bound `Σ_i Π_a w^{i_a} sup|Ψ_{i_a}| |∂^i f|` from the face jets.
#[derive(Debug, Clone, Serialize)]
pub struct CollarBounds {
    pub m: f64,
    pub l1: f64,
    pub sup: f64,
    pub chained_bound: f64,
}

const SUP_TANGENTIAL: usize = 41;
const SUP_NORMAL: usize = 9;

pub fn collar_bounds(ext: &Extension) -> CollarBounds {
    let dim = ext.dim();
    let n = ext.order();
    let m = ext.m();
    let w = ext.width();
    let zero = vec![0usize; dim];
    let mut l1 = 0.0;
    for mask in 1..1usize << dim {
        l1 += region_integral(ext, mask, |p| ext.eval(p, &zero).expect("validated extension").abs());
    }

    // sup |Ψ_i| on [0, 1]
    let psi_sup: Vec<f64> = (0..n)
        .map(|i| {
            let mut jet = vec![0.0; n];
            jet[i] = 1.0;
            let unit = Collar::increasing(0.0, 1.0).expect("unit collar");
            CollarPolynomial::new(BoundaryJet::new(jet).expect("finite jet"), unit).sup_norm()
        })
        .collect();

    let tangential: Vec<f64> = (0..SUP_TANGENTIAL)
        .map(|k| -m + 2.0 * m * k as f64 / (SUP_TANGENTIAL - 1) as f64)
        .collect();
    let mut sup: f64 = 0.0;
    let mut chained: f64 = 0.0;
    for mask in 1..1usize << dim {
        let collars = mask_axes(dim, mask);
        for sides in region_boxes(dim, mask) {
            // Sup over a grid of the region.
            let axes_values: Vec<Vec<f64>> = (0..dim)
                .map(|a| match sides[a] {
                    None => tangential.clone(),
                    Some(sign) => (0..SUP_NORMAL)
                        .map(|k| sign * (m + w * k as f64 / (SUP_NORMAL - 1) as f64))
                        .collect(),
                })
                .collect();
            for p in grid_points(&axes_values) {
                sup = sup.max(ext.eval(&p, &zero).expect("validated extension").abs());
            }
            // Chained bound over the face jets.
            let face_values: Vec<Vec<f64>> = (0..dim)
                .map(|a| match sides[a] {
                    None => tangential.clone(),
                    Some(sign) => vec![sign * m],
                })
                .collect();
            let jet_indices = grid_points(&vec![(0..n).map(|i| i as f64).collect::<Vec<f64>>(); collars.len()]);
            for q in grid_points(&face_values) {
                let mut bound = 0.0;
                for js in &jet_indices {
                    let mut idx = vec![0usize; dim];
                    let mut weight = 1.0;
                    for (&a, &j) in collars.iter().zip(js) {
                        let j = j as usize;
                        idx[a] = j;
                        weight *= w.powi(j as i32) * psi_sup[j];
                    }
                    let model = &ext.spec().model;
                    bound += weight * model.partial(&idx, &q).expect("validated model order").abs();
                }
                chained = chained.max(bound);
            }
        }
    }
    CollarBounds { m, l1, sup, chained_bound: chained }
}

/// Checks `L1 * m <= E` with `E` fitted at the smallest `m`, `sup <= D` for
/// the chained bound `D`, and that `D` does not grow with `m`.
pub fn collar_bounds_report(exts: &[Extension], rel_tol: f64) -> Result<VerificationReport> {
    let bounds: Vec<CollarBounds> = sorted_by_m(exts)?.into_iter().map(collar_bounds).collect();
    let mut report = VerificationReport::new("collar_bounds");
    let e = bounds[0].l1 * bounds[0].m;
    let d = bounds[0].chained_bound;
    report.detail("fitted_e", e);
    report.detail("chained_d", d);
    for b in &bounds {
        if b.m != bounds[0].m {
            report.push(Check::at_most(format!("l1_times_m_at_m_{}", b.m), b.l1 * b.m, e, rel_tol * e));
            report.push(Check::at_most(format!("chained_bound_at_m_{}", b.m), b.chained_bound, d, rel_tol * d));
        }
        report.push(Check::at_most(format!("sup_at_m_{}", b.m), b.sup, b.chained_bound, rel_tol * b.chained_bound));
    }
    report.detail("per_m", &bounds);
    Ok(report)
}
