use inflexion::conjecture::{
    conjecture_scan, monotonicity_violation, random_jet, scaled_root_table, trial_seed, ScanConfig,
};
use inflexion::polyext::{BoundaryJet, SignClass};

fn doubling(lo: i32, hi: i32) -> Vec<f64> {
    (lo..=hi).map(|k| 2f64.powi(k)).collect()
}

/// Roots of the shifted Legendre polynomial of degree `n - 1` on [0, 1].
fn shifted_legendre_roots(n: usize) -> Vec<f64> {
    let s = match n {
        3 => vec![-(1.0f64 / 3.0).sqrt(), (1.0f64 / 3.0).sqrt()],
        4 => vec![-(0.6f64).sqrt(), 0.0, (0.6f64).sqrt()],
        _ => unreachable!(),
    };
    s.into_iter().map(|x| (1.0 + x) / 2.0).collect()
}

#[test]
fn collar_roots_approach_legendre_nodes() {
    for n in [3, 4] {
        let mut jet = vec![0.0; n];
        jet[0] = 1.0;
        jet[1] = 3.0;
        let table = scaled_root_table(&BoundaryJet::new(jet).unwrap(), &doubling(6, 14), 1).unwrap();
        let last = table.rows.last().unwrap();
        assert_eq!(last.class, SignClass::Indefinite);
        let want = shifted_legendre_roots(n);
        assert_eq!(last.collar_roots.len(), want.len());
        for (got, want) in last.collar_roots.iter().zip(&want) {
            assert!((got - want).abs() < 1e-3, "n={n}: {got} vs {want}");
        }
        // t - 1 = w s / m with w = 1/m.
        let m = last.m;
        for (off, s) in last.offsets.iter().zip(&last.collar_roots) {
            assert!((off - s / (m * m)).abs() < 1e-12 / (m * m));
        }
        let ex = table.extrapolated_offsets.unwrap();
        assert!(ex.iter().all(|d| d.abs() < 1e-8));
    }
}

#[test]
fn definite_jet_loses_definiteness_as_m_grows() {
    // h = (x - m0 - 1/m0)^3 / 6 is definite on the first collar only.
    let m0 = 4.0;
    let w = 1.0 / m0;
    let jet = BoundaryJet::new(vec![-w * w * w / 6.0, w * w / 2.0, -w]).unwrap();
    let table = scaled_root_table(&jet, &[4.0, 8.0, 16.0], 1).unwrap();
    let classes: Vec<SignClass> = table.rows.iter().map(|r| r.class).collect();
    assert_eq!(classes[0], SignClass::PositiveDefinite);
    assert_eq!(monotonicity_violation(&classes), Some((0, 1)));
}

#[test]
fn violation_detector() {
    use SignClass::*;
    assert_eq!(monotonicity_violation(&[Indefinite, Indefinite]), None);
    assert_eq!(monotonicity_violation(&[Indefinite, PositiveDefinite, NegativeDefinite]), None);
    assert_eq!(monotonicity_violation(&[Indefinite, NegativeDefinite, Indefinite]), Some((1, 2)));
    assert_eq!(monotonicity_violation(&[PositiveDefinite, IdenticallyZero]), Some((0, 1)));
}

#[test]
fn scan_bytes_are_reproducible() {
    let cfg = ScanConfig { n_min: 3, n_max: 5, trials: 5, m_schedule: doubling(4, 10), exponent: 1, seed: 2024 };
    let a = conjecture_scan(&cfg).unwrap();
    let b = conjecture_scan(&cfg).unwrap();
    assert_eq!(a.to_json(), b.to_json());
    assert!(a.evidence_only);
    assert_eq!(a.trials.len(), 15);
    let other = conjecture_scan(&ScanConfig { seed: 2025, ..cfg.clone() }).unwrap();
    assert_ne!(a.to_json(), other.to_json());
    for t in &a.trials {
        assert_eq!(t.seed, trial_seed(2024, t.n, t.trial));
        assert_eq!(random_jet(t.n, t.seed).unwrap().values(), t.jet.as_slice());
    }
}

#[test]
fn generic_n3_jets_end_indefinite() {
    let cfg = ScanConfig { n_min: 3, n_max: 3, trials: 20, m_schedule: doubling(4, 12), exponent: 1, seed: 1 };
    let report = conjecture_scan(&cfg).unwrap();
    let s = report.summary(3).unwrap();
    assert_eq!(s.fraction_definite, 0.0);
    assert!(s.min_distance_to_one.unwrap() < 1e-6);
}
