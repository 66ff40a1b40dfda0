//! Sampled-field export: CSV rows plus a JSON grid description.

use std::io::Write;

use serde::{Deserialize, Serialize};

use super::Extension;
use crate::error::{invalid, Result};

/// A uniform grid. Rows are written in row-major order with the last axis
/// varying fastest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub dims: Vec<usize>,
    pub spacing: Vec<f64>,
    pub origin: Vec<f64>,
}

impl GridSpec {
    /// `points` samples per axis covering `[-half, half]`.
    pub fn centered(dim: usize, half: f64, points: usize) -> Result<GridSpec> {
        if points < 2 || !(half > 0.0) {
            return invalid("a centered grid needs at least 2 points and a positive extent");
        }
        Ok(GridSpec {
            dims: vec![points; dim],
            spacing: vec![2.0 * half / (points - 1) as f64; dim],
            origin: vec![-half; dim],
        })
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.dims.len();
        if !(1..=3).contains(&d) || self.spacing.len() != d || self.origin.len() != d {
            return invalid("grid dims, spacing and origin must share a dimension of 1, 2 or 3");
        }
        if self.dims.iter().any(|&n| n == 0) || self.spacing.iter().any(|&h| !(h > 0.0)) {
            return invalid("grid needs positive sizes and spacings");
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Coordinates of the `flat`-th point in row-major order.
    pub fn point(&self, flat: usize) -> Vec<f64> {
        let mut rest = flat;
        let mut p = vec![0.0; self.dims.len()];
        for a in (0..self.dims.len()).rev() {
            let i = rest % self.dims[a];
            rest /= self.dims[a];
            p[a] = self.origin[a] + self.spacing[a] * i as f64;
        }
        p
    }
}

#[derive(Serialize)]
struct Sidecar<'a> {
    #[serde(flatten)]
    grid: &'a GridSpec,
    order: &'static str,
    m: f64,
    n: usize,
    d: u32,
    model: String,
}

const AXIS_NAMES: [&str; 3] = ["x", "y", "z"];

/// Write `f_m` sampled on `grid` as CSV (`x,y[,z],value`) and the grid
/// description as JSON.
pub fn export_field(ext: &Extension, grid: &GridSpec, csv: &mut impl Write, sidecar: &mut impl Write) -> Result<()> {
    grid.validate()?;
    let dim = ext.dim();
    if grid.dims.len() != dim {
        return invalid(format!("grid is {}-dimensional, extension is {dim}-dimensional", grid.dims.len()));
    }
    writeln!(csv, "{},value", AXIS_NAMES[..dim].join(","))?;
    let zero = vec![0usize; dim];
    for k in 0..grid.len() {
        let p = grid.point(k);
        let v = ext.eval(&p, &zero)?;
        let coords: Vec<String> = p.iter().map(|c| c.to_string()).collect();
        writeln!(csv, "{},{}", coords.join(","), v)?;
    }
    let meta = Sidecar {
        grid,
        order: "row_major_last_axis_fastest",
        m: ext.m(),
        n: ext.order(),
        d: ext.spec().exponent,
        model: ext.spec().model.to_string(),
    };
    serde_json::to_writer_pretty(&mut *sidecar, &meta).map_err(|e| crate::Error::Io(e.to_string()))?;
    writeln!(sidecar)?;
    Ok(())
}
