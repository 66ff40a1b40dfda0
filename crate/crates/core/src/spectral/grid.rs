//! Uniform-grid transforms: an FFT for whole spectral fields and a direct
//! non-uniform sum at arbitrary wave vectors. Both are trapezoid-rule
//! approximations of the continuous transform, scaled by the cell volume.

use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;
use rustfft::FftPlanner;

use super::{normalization, SpectralSource, WaveVector};
use crate::error::{invalid, Error, Result};
use crate::extender::GridSpec;

/// Transform values on a uniform wave-vector grid, stored like [`GridSpec`]
/// samples (row-major, last axis fastest, ascending frequencies).
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralGrid {
    pub grid: GridSpec,
    pub values: Vec<Complex64>,
}

impl SpectralGrid {
    pub fn wave_vector(&self, flat: usize) -> WaveVector {
        WaveVector { k: self.grid.point(flat) }
    }

    /// Largest modulus over the field.
    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// CSV rows `k1,k2[,k3],re,im`.
    pub fn write_csv(&self, out: &mut impl Write) -> Result<()> {
        let dim = self.grid.dims.len();
        let header: Vec<String> = (1..=dim).map(|a| format!("k{a}")).collect();
        writeln!(out, "{},re,im", header.join(","))?;
        for (i, v) in self.values.iter().enumerate() {
            let k: Vec<String> = self.grid.point(i).iter().map(|c| c.to_string()).collect();
            writeln!(out, "{},{},{}", k.join(","), v.re, v.im)?;
        }
        Ok(())
    }
}

/// Sample a source on every point of `grid`.
pub fn sample_source(src: &dyn SpectralSource, grid: &GridSpec) -> Result<Vec<f64>> {
    grid.validate()?;
    if grid.dims.len() != src.dim() {
        return invalid("grid and source dimensions differ");
    }
    Ok((0..grid.len()).map(|i| src.value(&grid.point(i))).collect())
}

fn check_samples(samples: &[f64], grid: &GridSpec) -> Result<()> {
    grid.validate()?;
    if samples.len() != grid.len() {
        return invalid(format!("{} samples for a grid of {} points", samples.len(), grid.len()));
    }
    Ok(())
}

/// Spectral field of grid samples. Frequencies along axis `a` are
/// `2π (j - ⌊N/2⌋) / (N h_a)`; the support must lie inside the grid.
pub fn ft_grid(samples: &[f64], grid: &GridSpec) -> Result<SpectralGrid> {
    check_samples(samples, grid)?;
    let dim = grid.dims.len();
    let dims = &grid.dims;
    let mut data: Vec<Complex64> = samples.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let mut planner = FftPlanner::<f64>::new();
    for a in 0..dim {
        let n = dims[a];
        let stride: usize = dims[a + 1..].iter().product();
        let fft = planner.plan_fft_forward(n);
        let mut line = vec![Complex64::new(0.0, 0.0); n];
        for start in 0..data.len() {
            // Visit each line once, from its first element.
            if (start / stride) % n != 0 {
                continue;
            }
            for (j, slot) in line.iter_mut().enumerate() {
                *slot = data[start + j * stride];
            }
            fft.process(&mut line);
            for (j, v) in line.iter().enumerate() {
                data[start + j * stride] = *v;
            }
        }
    }
    let k_spacing: Vec<f64> = (0..dim).map(|a| 2.0 * PI / (dims[a] as f64 * grid.spacing[a])).collect();
    let k_origin: Vec<f64> = (0..dim).map(|a| -((dims[a] / 2) as f64) * k_spacing[a]).collect();
    let kgrid = GridSpec { dims: dims.clone(), spacing: k_spacing, origin: k_origin };
    let scale = normalization(dim) * grid.spacing.iter().product::<f64>();
    let mut values = vec![Complex64::new(0.0, 0.0); data.len()];
    for (i, out) in values.iter_mut().enumerate() {
        // Shifted index -> FFT index, plus the phase of the grid origin.
        let mut rest = i;
        let mut src_index = 0;
        let mut stride = 1;
        let k = kgrid.point(i);
        let mut phase = 0.0;
        for a in (0..dim).rev() {
            let j = rest % dims[a];
            rest /= dims[a];
            let q = (j + dims[a] - dims[a] / 2) % dims[a];
            src_index += q * stride;
            stride *= dims[a];
            phase -= k[a] * grid.origin[a];
        }
        *out = data[src_index] * Complex64::from_polar(scale, phase);
    }
    Ok(SpectralGrid { grid: kgrid, values })
}

/// Direct sum of grid samples at arbitrary wave vectors. Requests beyond the
/// grid Nyquist frequency `π/h` would alias and are rejected.
pub fn ft_grid_at(samples: &[f64], grid: &GridSpec, ks: &[WaveVector]) -> Result<Vec<Complex64>> {
    check_samples(samples, grid)?;
    let dim = grid.dims.len();
    for k in ks {
        if k.dim() != dim {
            return invalid("wave vector and grid dimensions differ");
        }
        for a in 0..dim {
            let nyquist = PI / grid.spacing[a];
            if k.k[a].abs() > nyquist {
                return Err(Error::Aliasing { requested: k.k[a].abs(), nyquist });
            }
        }
    }
    let scale = normalization(dim) * grid.spacing.iter().product::<f64>();
    Ok(ks
        .iter()
        .map(|k| {
            // Per-axis phase tables make each term a product of lookups.
            let tables: Vec<Vec<Complex64>> = (0..dim)
                .map(|a| {
                    (0..grid.dims[a])
                        .map(|j| Complex64::from_polar(1.0, -k.k[a] * (grid.origin[a] + grid.spacing[a] * j as f64)))
                        .collect()
                })
                .collect();
            let mut acc = Complex64::new(0.0, 0.0);
            for (i, &v) in samples.iter().enumerate() {
                if v == 0.0 {
                    continue;
                }
                let mut rest = i;
                let mut e = Complex64::new(v, 0.0);
                for a in (0..dim).rev() {
                    e *= tables[a][rest % grid.dims[a]];
                    rest /= grid.dims[a];
                }
                acc += e;
            }
            acc * scale
        })
        .collect())
}
