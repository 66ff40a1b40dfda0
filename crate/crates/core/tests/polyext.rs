use approx::assert_relative_eq;
use inflexion::polyext::{
    min_admissible_m, Admissibility, BoundaryJet, Collar, CollarPolynomial, Orientation, SignClass,
};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

fn falling(k: usize, d: usize) -> f64 {
    (0..d).map(|j| (k - j) as f64).product()
}

/// Monomial coefficients of `h` in `s = (x - a)/w`, from the 2n x 2n
/// Hermite system solved densely.
fn dense_oracle(jet: &[f64], w: f64) -> Vec<f64> {
    let n = jet.len();
    let size = 2 * n;
    let mut a = DMatrix::<f64>::zeros(size, size);
    let mut rhs = DVector::<f64>::zeros(size);
    for i in 0..n {
        a[(i, i)] = falling(i, i);
        rhs[i] = jet[i] * w.powi(i as i32);
        for k in i..size {
            a[(n + i, k)] = falling(k, i);
        }
    }
    a.lu().solve(&rhs).expect("nonsingular Hermite system").iter().copied().collect()
}

/// `d`-th x-derivative at `x = a + w s`.
fn eval_monomial(p: &[f64], s: f64, w: f64, d: usize) -> f64 {
    let ds = p.iter().enumerate().skip(d).rev().fold(0.0, |acc, (k, &c)| acc * s + c * falling(k, d));
    ds / w.powi(d as i32)
}

fn poly(jet: &[f64], m: f64, w: f64) -> CollarPolynomial {
    CollarPolynomial::new(BoundaryJet::new(jet.to_vec()).unwrap(), Collar::increasing(m, w).unwrap())
}

#[test]
fn matches_dense_hermite_solve() {
    let jet = [1.0, -2.0, 3.0, -4.0];
    let (a, w) = (10.0, 0.1);
    let mono = dense_oracle(&jet, w);
    let h = poly(&jet, a, w);
    for i in 0..=20 {
        let x = a + w * i as f64 / 20.0;
        for d in 0..=4 {
            let want = eval_monomial(&mono, (x - a) / w, w, d);
            let got = h.eval(x, d).unwrap();
            let scale = w.powi(-(d as i32)) * 10.0;
            assert!((got - want).abs() < 1e-9 * scale, "d={d} x={x}: {got} vs {want}");
        }
    }
}

#[test]
fn dense_oracle_across_orders() {
    for n in 2..=8 {
        let jet: Vec<f64> = (0..n).map(|i| ((i * 7 + 3) % 5) as f64 - 2.0).collect();
        let w = 0.25;
        let mono = dense_oracle(&jet, w);
        let h = poly(&jet, 3.0, w);
        for i in 0..=10 {
            let x = 3.0 + w * i as f64 / 10.0;
            let want = eval_monomial(&mono, (x - 3.0) / w, w, 0);
            // The dense system's condition number grows like (2n)!, so the
            // oracle itself is only good to ~1e-8 at n = 8.
            let got = h.eval(x, 0).unwrap();
            assert!((got - want).abs() < 1e-7 * (1.0 + want.abs()), "n={n} x={x}: {got} vs {want}");
        }
    }
}

#[test]
fn ftc_identity_on_definite_jets() {
    // h = c (x - b)^n / n! has h^(n) = c on the collar.
    for n in 2..=8 {
        for &(c, w) in &[(1.5f64, 0.5f64), (-0.3, 0.01), (7.0, 1e-3)] {
            let a = 5.0;
            let jet: Vec<f64> = (0..n).map(|i| c * (-w).powi((n - i) as i32) / falling(n - i, n - i)).collect();
            let h = poly(&jet, a, w);
            let want = if c > 0.0 { SignClass::PositiveDefinite } else { SignClass::NegativeDefinite };
            assert_eq!(h.sign_class(), want, "n={n} c={c} w={w}");
            let l1 = h.nth_derivative_l1();
            assert!(h.boundary_residual() < 1e-8);
            let top = jet[n - 1].abs();
            assert!((l1 - top).abs() < 1e-8 * (1.0 + top), "n={n} c={c}: {l1} vs {top}");
        }
    }
}

#[test]
fn mirrored_collar_matches_reflection() {
    let jet = [0.7, -1.1, 0.4];
    let up = poly(&jet, 4.0, 0.2);
    let mirrored: Vec<f64> = jet.iter().enumerate().map(|(i, v)| v * (-1f64).powi(i as i32)).collect();
    let down = CollarPolynomial::new(
        BoundaryJet::new(mirrored).unwrap(),
        Collar::new(-4.0, 0.2, Orientation::Decreasing).unwrap(),
    );
    for i in 0..=10 {
        let x = 4.0 + 0.02 * i as f64;
        for d in 0..3 {
            let sign = (-1f64).powi(d as i32);
            assert_relative_eq!(up.eval(x, d).unwrap(), sign * down.eval(-x, d).unwrap(), max_relative = 1e-10, epsilon = 1e-9);
        }
    }
}

#[test]
fn n3_unit_jet_has_interior_roots() {
    let h = poly(&[1.0, 0.0, 0.0], 100.0, 0.01);
    assert_eq!(h.sign_class(), SignClass::Indefinite);
    let roots = h.nth_derivative_collar_roots();
    assert_eq!(roots.len(), 2);
    assert!((roots[0] - 0.2113).abs() < 1e-3 && (roots[1] - 0.7887).abs() < 1e-3, "{roots:?}");
    assert!(matches!(min_admissible_m(&BoundaryJet::new(vec![1.0, 0.0, 0.0]).unwrap(), 1).unwrap(), Admissibility::NotFound { .. }));
}

#[test]
fn zero_jet_is_identically_zero() {
    let h = poly(&[0.0; 5], 2.0, 0.5);
    assert_eq!(h.sign_class(), SignClass::IdenticallyZero);
    assert_eq!(h.sup_norm(), 0.0);
    assert_eq!(h.nth_derivative_l1(), 0.0);
}

#[test]
fn rejects_bad_inputs() {
    assert!(BoundaryJet::new(vec![]).is_err());
    assert!(BoundaryJet::new(vec![f64::NAN]).is_err());
    assert!(Collar::increasing(1.0, 0.0).is_err());
    assert!(Collar::increasing(f64::INFINITY, 1.0).is_err());
    assert!(min_admissible_m(&BoundaryJet::new(vec![1.0, 1.0]).unwrap(), 4).is_err());
}

fn jet_strategy() -> impl Strategy<Value = Vec<f64>> {
    (2usize..=8).prop_flat_map(|n| prop::collection::vec(-10.0f64..10.0, n))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn boundary_conditions_hold(jet in jet_strategy(), m in prop::sample::select(vec![5.0, 50.0, 500.0]), d in 1u32..=3) {
        let h = poly(&jet, m, m.powi(-(d as i32)));
        prop_assert!(h.boundary_residual() < 1e-8);
    }

    #[test]
    fn sign_class_is_scale_covariant(jet in jet_strategy(), lambda in 0.01f64..100.0) {
        let base = poly(&jet, 4.0, 0.25).sign_class();
        let scaled: Vec<f64> = jet.iter().map(|v| v * lambda).collect();
        prop_assert_eq!(poly(&scaled, 4.0, 0.25).sign_class(), base);
        let negated: Vec<f64> = jet.iter().map(|v| -v).collect();
        let flipped = match base {
            SignClass::PositiveDefinite => SignClass::NegativeDefinite,
            SignClass::NegativeDefinite => SignClass::PositiveDefinite,
            other => other,
        };
        prop_assert_eq!(poly(&negated, 4.0, 0.25).sign_class(), flipped);
    }

    #[test]
    fn n2_positive_jets_are_indefinite(a0 in 1e-3f64..10.0, a1 in 1e-3f64..10.0, m in 1.5f64..1e3) {
        prop_assert_eq!(poly(&[a0, a1], m, 1.0 / m).sign_class(), SignClass::Indefinite);
    }

    #[test]
    fn n3_sup_is_m_independent(jet in prop::collection::vec(-1.0f64..1.0, 3), e in 1i32..=4, d in 1i32..=3) {
        let m = 10f64.powi(e);
        prop_assert!(poly(&jet, m, m.powi(-d)).sup_norm() <= 24.0);
    }
}
