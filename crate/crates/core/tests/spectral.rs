use std::f64::consts::PI;

use approx::assert_relative_eq;
use inflexion::extender::{build_extension, Extension, ExtensionSpec, GridSpec};
use inflexion::models::FunctionModel;
use inflexion::quadrature::{tensor_integrate, Rule1d};
use inflexion::spectral::*;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn gaussian_ext(dim: usize, m: f64, n: usize) -> Extension {
    let model = FunctionModel::gaussian(dim, 1.0).unwrap();
    build_extension(ExtensionSpec::new(model, m, n, 1).unwrap()).unwrap()
}

fn generic_ring(dim: usize, count: usize, lo: f64, hi: f64, seed: u64) -> Vec<WaveVector> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    while out.len() < count {
        let r = lo * (hi / lo).powf(rng.gen::<f64>());
        let k: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let norm = k.iter().map(|v| v * v).sum::<f64>().sqrt();
        let w = WaveVector::new(k.iter().map(|v| v * r / norm).collect()).unwrap();
        if norm > 0.1 && w.k.iter().all(|c| c.abs() > (0.05 * r).max(0.3)) {
            out.push(w);
        }
    }
    out
}

#[test]
fn zero_frequency_is_normalised_integral_3d() {
    let ext = gaussian_ext(3, 2.0, 3);
    let f0 = ft_point(&ext, &WaveVector::new(vec![0.0; 3]).unwrap(), 1e-10).unwrap();
    // Independent volume quadrature on a different panel layout.
    let o = ext.outer();
    let rule = Rule1d::panelled(&[-o, -2.0, -1.0, 0.0, 1.0, 2.0, o], 0.5, 12);
    let vol = tensor_integrate(&[&rule, &rule, &rule], |p| ext.eval(p, &[0, 0, 0]).unwrap());
    assert!((f0.value.re - vol * normalization(3)).abs() < 1e-9);
    assert!(f0.value.im.abs() < 1e-12);
}

#[test]
fn conjugate_symmetry_and_linearity() {
    let ext = gaussian_ext(2, 2.0, 3);
    let ks = generic_ring(2, 6, 1.0, 8.0, 3);
    let neg: Vec<WaveVector> = ks.iter().map(|k| k.scaled(-1.0)).collect();
    let a = ft_batch(&ext, &ks, 1e-10).unwrap();
    let b = ft_batch(&ext, &neg, 1e-10).unwrap();
    for (x, y) in a.iter().zip(&b) {
        assert!((x.value - y.value.conj()).norm() < 1e-10);
    }
    let g = FunctionModel::gaussian(2, 1.0).unwrap();
    let combo = FnSource::new(vec![ext_breaks(&ext), ext_breaks(&ext)], |p| {
        2.0 * ext.eval(p, &[0, 0]).unwrap() - 3.0 * g.value(p).unwrap()
    })
    .unwrap();
    let gs = FnSource::new(vec![ext_breaks(&ext), ext_breaks(&ext)], |p| g.value(p).unwrap()).unwrap();
    let c = ft_batch(&combo, &ks, 1e-10).unwrap();
    let gv = ft_batch(&gs, &ks, 1e-10).unwrap();
    for ((x, y), z) in a.iter().zip(&gv).zip(&c) {
        assert!((2.0 * x.value - 3.0 * y.value - z.value).norm() < 1e-10);
    }
}

fn ext_breaks(ext: &Extension) -> Vec<f64> {
    ext.breaks(0)
}

#[test]
fn plancherel_for_gaussian() {
    let g = FunctionModel::gaussian(2, 0.8).unwrap();
    let rule = Rule1d::panelled(&[-8.0, 8.0], 1.0, 16);
    let space = tensor_integrate(&[&rule, &rule], |p| g.value(p).unwrap().powi(2));
    let src = TruncatedModel::with_radius(&g, 8.0).unwrap();
    let krule = Rule1d::panelled(&[-8.0, 8.0], 2.0, 12);
    let mut ks = Vec::new();
    let mut ws = Vec::new();
    for (&a, &wa) in krule.nodes.iter().zip(&krule.weights) {
        for (&b, &wb) in krule.nodes.iter().zip(&krule.weights) {
            ks.push(WaveVector::new(vec![a, b]).unwrap());
            ws.push(wa * wb);
        }
    }
    let freq: f64 = ft_batch(&src, &ks, 1e-10)
        .unwrap()
        .iter()
        .zip(&ws)
        .map(|(s, w)| s.value.norm_sqr() * w)
        .sum();
    assert_relative_eq!(space, freq, max_relative = 1e-6);
}

#[test]
fn grid_transform_converges_to_quadrature() {
    let ext = gaussian_ext(1, 2.0, 4);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let ks: Vec<WaveVector> = (0..20).map(|_| WaveVector::new(vec![rng.gen_range(-6.0..6.0)]).unwrap()).collect();
    let exact = ft_batch(&ext, &ks, 1e-12).unwrap();
    let mut errors = Vec::new();
    for points in [129, 257, 513] {
        let grid = GridSpec::centered(1, 4.0, points).unwrap();
        let s = sample_source(&ext, &grid).unwrap();
        let approx = ft_grid_at(&s, &grid, &ks).unwrap();
        let err = approx.iter().zip(&exact).map(|(a, b)| (a - b.value).norm()).fold(0.0, f64::max);
        errors.push(err);
    }
    assert!(errors[0] / errors[1] >= 4.0 && errors[1] / errors[2] >= 4.0, "{errors:?}");
}

#[test]
fn extension_decay_exponent_1d() {
    let ext = gaussian_ext(1, 2.0, 3);
    let fit = decay_exponent_fit(&ext, &WaveVector::new(vec![1.0]).unwrap(), (5.0, 50.0), 200, 1e-10).unwrap();
    assert!(fit.exponent <= -2.5, "{fit:?}");
    assert!(fit.residual.is_finite());
}

#[test]
fn decay_bound_gaussian_2d() {
    let exts: Vec<Extension> = [4.0, 8.0, 16.0].iter().map(|&m| gaussian_ext(2, m, 3)).collect();
    let ks = generic_ring(2, 16, 5.0, 50.0, 5);
    let r = decay_bound_check(&exts, 3, &ks, 1e-9).unwrap();
    assert!(r.pass(), "{r:#?}");
}

#[test]
fn decay_bound_zero_model() {
    let z = FunctionModel::zero(1).unwrap();
    let exts: Vec<Extension> =
        [4.0, 8.0].iter().map(|&m| build_extension(ExtensionSpec::new(z.clone(), m, 3, 1).unwrap()).unwrap()).collect();
    let ks = generic_ring(1, 5, 5.0, 50.0, 1);
    let r = decay_bound_check(&exts, 3, &ks, 1e-9).unwrap();
    assert_eq!(r.details["fitted_d"], 0.0);
    assert!(r.pass());
}

#[test]
fn step_field_fails_the_decay_bound() {
    let ms = [4.0, 8.0];
    let ks = generic_ring(1, 40, 5.0, 50.0, 9);
    let mut samples = Vec::new();
    let mut scales = Vec::new();
    for &m in &ms {
        let grid = GridSpec::centered(1, m + 1.0, 2001).unwrap();
        let field: Vec<f64> =
            (0..grid.len()).map(|i| if grid.point(i)[0].abs() <= m { 1.0 } else { 0.0 }).collect();
        let values = ft_grid_at(&field, &grid, &ks).unwrap();
        samples.push(
            ks.iter().zip(values).map(|(k, value)| SpectralSample { k: k.clone(), value, error: 0.0 }).collect(),
        );
        scales.push(2.0 * m * normalization(1));
    }
    // The step's piecewise third derivative vanishes, so its budget is zero.
    let budgets = vec![vec![0.0]; ms.len()];
    let r = decay_bound_check_samples(&ms, 1, 3, &samples, &scales, Some(&budgets)).unwrap();
    assert!(!r.pass());
    assert!(r.checks.iter().any(|c| c.name.starts_with("integration_by_parts") && !c.pass), "{:?}", r.checks);
}

#[test]
fn alpha_min_matches_random_directions() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for p in [4u32, 14] {
        let mut best = f64::INFINITY;
        for _ in 0..1_000_000 {
            let v: [f64; 3] = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
            let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
            if n < 1e-3 {
                continue;
            }
            best = best.min(v.iter().map(|c| (c / n).abs().powi(p as i32)).sum());
        }
        let a = alpha_min(p).unwrap();
        assert!(a <= best + 1e-12 && best - a < 1e-6, "p={p}: {a} vs {best}");
    }
}

#[test]
fn ratio_identities_rational_3d() {
    let r = FunctionModel::rational(3, 1.0, 6.0).unwrap();
    let ks = generic_ring(3, 20, 0.8, 4.0, 21);
    let rep = verify_ratio_identities(&r, &ks, 6.0, 1e-7).unwrap();
    assert!(rep.pass(), "{rep:#?}");
}

#[test]
fn ft_convergence_gaussian_2d() {
    let g = FunctionModel::gaussian(2, 1.0).unwrap();
    let ks = generic_ring(2, 12, 0.8, 3.0, 8);
    let ks: Vec<WaveVector> = ks.into_iter().filter(|k| k.k.iter().all(|c| c.abs() >= 0.5)).collect();
    let rep = ft_convergence(&g, &[4.0, 8.0, 16.0], 3, 1, &ks, 0.5).unwrap();
    assert!(rep.pass(), "{rep:#?}");
    let z = FunctionModel::zero(2).unwrap();
    assert!(ft_convergence(&z, &[4.0, 8.0], 3, 1, &ks, 0.5).unwrap().pass());
}

#[test]
fn inversion_gaussian_1d() {
    let g = FunctionModel::gaussian(1, 1.0).unwrap();
    let pts: Vec<Vec<f64>> = (0..10).map(|i| vec![-2.0 + 4.0 * i as f64 / 9.0]).collect();
    let rep = inversion_error(&g, &[4.0, 8.0], 3, 1, &pts, 40.0, Some(1e-5)).unwrap();
    assert!(rep.pass(), "{rep:#?}");
}

#[test]
fn inversion_gaussian_3d_coarse() {
    let g = FunctionModel::gaussian(3, 1.0).unwrap();
    let pts: Vec<Vec<f64>> = (0..5).map(|i| vec![0.3 * i as f64 - 0.6, 0.1 * i as f64, -0.2 * i as f64]).collect();
    let rep = inversion_error(&g, &[3.0, 5.0], 3, 1, &pts, 12.0, None).unwrap();
    assert!(rep.pass(), "{rep:#?}");
}

#[test]
fn inverse_of_gaussian_data_2d() {
    let gauss = |k: &[f64]| Complex64::new((-k.iter().map(|v| v * v).sum::<f64>() / 2.0).exp(), 0.0);
    let law = PowerLaw { constant: (-50.0f64).exp() * 1e30, exponent: -30.0 };
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..10 {
        let x = [rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)];
        let v = inverse_at_point(gauss, 2, &x, 10.0, 1.0, &law, 1e-8).unwrap();
        assert!((v.value.re - (-(x[0] * x[0] + x[1] * x[1]) / 2.0f64).exp()).abs() < 1e-6);
    }
    let zero = inverse_at_point(|_| Complex64::new(0.0, 0.0), 2, &[0.5, 0.5], 4.0, 1.0, &law, 1e-8).unwrap();
    assert_eq!(zero.value.norm(), 0.0);
}

#[test]
fn radial_limit_rational_3d() {
    let r = FunctionModel::rational(3, 1.0, 6.0).unwrap();
    let rep = radial_limit_check(&r, 0.9, 0.6, &[1.0, 0.1, 0.01, 0.001], 1e-4).unwrap();
    assert!(rep.pass(), "{rep:#?}");
    assert!(radial_limit_check(&r, PI / 2.0, PI / 2.0, &[1.0, 0.1], 1e-4).is_err());
}

#[test]
fn gaussian_l1_tail() {
    // e^{-k^2/2} <= e^{-50} 10^30 |k|^-30 for |k| >= 10
    let law = PowerLaw { constant: (-50.0f64).exp() * 1e30, exponent: -30.0 };
    let t = l1_tail(&law, 10.0, 3).unwrap().value().unwrap();
    // 4π ∫_10^∞ r^2 e^{-r^2/2} dr, closed form
    let exact = 4.0 * PI * (10.0 * (-50.0f64).exp() + (PI / 2.0).sqrt() * libm_erfc(10.0 / 2f64.sqrt()));
    assert!(t < 1e-12 && t >= exact);
}

fn libm_erfc(x: f64) -> f64 {
    // Asymptotic series, ample for x > 5.
    let t = 1.0 / (2.0 * x * x);
    (-x * x).exp() / (x * PI.sqrt()) * (1.0 - t + 3.0 * t * t - 15.0 * t * t * t)
}

#[test]
fn decaying_builtin_models_satisfy_the_decay_bound() {
    for dim in [1usize, 2] {
        let ks = generic_ring(dim, 16, 5.0, 50.0, 3);
        for text in ["gaussian", "rational{p=3}", "shift{x=0.5}(gaussian)", "product(gaussian,rational{p=2})", "zero", "laplacian(gaussian)"] {
            let model = FunctionModel::parse(text, dim).unwrap();
            for n in [3usize, 4, 5] {
                let exts: Vec<Extension> = [4.0, 8.0, 16.0]
                    .iter()
                    .map(|&m| build_extension(ExtensionSpec::new(model.clone(), m, n, dim as u32).unwrap()).unwrap())
                    .collect();
                let r = decay_bound_check(&exts, n as u32, &ks, 1e-9).unwrap();
                assert!(r.pass(), "{dim}D {text} n={n}: {:?}", r.checks);
                assert!(r.checks.iter().any(|c| c.name.starts_with("integration_by_parts")));
            }
        }
    }
}

#[test]
fn constant_model_breaks_the_decay_bound_in_1d() {
    // Its value jet never vanishes, so the collar cost grows with m.
    let model = FunctionModel::constant(1, 1.0).unwrap();
    let exts: Vec<Extension> =
        [4.0, 8.0].iter().map(|&m| build_extension(ExtensionSpec::new(model.clone(), m, 3, 1).unwrap()).unwrap()).collect();
    let r = decay_bound_check(&exts, 3, &generic_ring(1, 16, 5.0, 50.0, 3), 1e-9).unwrap();
    assert!(!r.pass());
}

#[test]
fn inversion_tolerates_rounding_after_convergence() {
    // By m = 8 the error is at machine precision; m = 16 only adds noise.
    let g = FunctionModel::gaussian(1, 1.0).unwrap();
    let pts: Vec<Vec<f64>> = (0..10).map(|i| vec![-2.0 + 4.0 * i as f64 / 9.0]).collect();
    let rep = inversion_error(&g, &[4.0, 8.0, 16.0], 3, 1, &pts, 40.0, Some(1e-5)).unwrap();
    assert!(rep.pass(), "{rep:#?}");
}
