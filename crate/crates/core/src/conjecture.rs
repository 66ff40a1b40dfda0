//! Empirical scans of whether `h^(n)` stays root-free on the collar as `m`
//! grows, for random jets. Nothing here proves or refutes anything; every
//! report carries `evidence_only = true`.
//!
//! Roots are tracked as offsets `t - 1 = σ w s / m`, where `s` is the root in
//! the collar coordinate, so that they stay meaningful when `w` is far below
//! the spacing of doubles near `m`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{invalid, Result};
use crate::polyext::{BoundaryJet, Collar, CollarPolynomial, SignClass};

/// One schedule entry of a root table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RootRow {
    pub m: f64,
    pub class: SignClass,
    /// Roots of `h^(n)` inside the open collar, in the collar coordinate.
    pub collar_roots: Vec<f64>,
    /// All real roots of `h^(n)` as `x/m - 1`, sorted.
    pub offsets: Vec<f64>,
}

/// Roots of `h^(n)` divided by `m` across a schedule, with a Richardson
/// extrapolate in `1/m` when the last two rows have the same root count.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RootTable {
    pub n: usize,
    pub exponent: u32,
    pub rows: Vec<RootRow>,
    /// Extrapolated `t - 1` per root.
    pub extrapolated_offsets: Option<Vec<f64>>,
    /// Set when a polynomial could not be isolated (non-finite jet scaling or
    /// an identically zero derivative).
    pub flagged: bool,
}

impl RootTable {
    /// Extrapolated scaled roots `t`.
    pub fn extrapolates(&self) -> Option<Vec<f64>> {
        self.extrapolated_offsets.as_ref().map(|o| o.iter().map(|d| 1.0 + d).collect())
    }
}

fn check_schedule(ms: &[f64], exponent: u32) -> Result<()> {
    if ms.is_empty() || ms.iter().any(|&m| !(m > 1.0) || !m.is_finite()) {
        return invalid("m schedule must be nonempty with every m > 1");
    }
    if ms.windows(2).any(|w| !(w[1] > w[0])) {
        return invalid("m schedule must be strictly increasing");
    }
    if !(1..=3).contains(&exponent) {
        return invalid(format!("collar exponent must be 1, 2 or 3, got {exponent}"));
    }
    Ok(())
}

/// Roots of `h^(n)` for a fixed jet on the collars `[m, m + m^-d]`.
pub fn scaled_root_table(jet: &BoundaryJet, ms: &[f64], exponent: u32) -> Result<RootTable> {
    check_schedule(ms, exponent)?;
    let n = jet.order();
    let mut rows = Vec::with_capacity(ms.len());
    let mut flagged = false;
    for &m in ms {
        let w = m.powi(-(exponent as i32));
        let poly = CollarPolynomial::new(jet.clone(), Collar::increasing(m, w)?);
        let class = poly.sign_class();
        let exact = poly.exact_scaled(n);
        flagged |= exact.is_err() || (class == SignClass::IdenticallyZero && !jet.is_zero());
        let collar_roots = poly.nth_derivative_collar_roots();
        let mut offsets: Vec<f64> = match exact {
            Ok(p) => crate::exact::RootIsolator::all_real(&p)
                .map(|iso| iso.roots(1e-15).into_iter().map(|s| w * s / m).collect())
                .unwrap_or_default(),
            Err(_) => Vec::new(),
        };
        offsets.sort_by(f64::total_cmp);
        rows.push(RootRow { m, class, collar_roots, offsets });
    }
    let extrapolated_offsets = match rows.as_slice() {
        [.., a, b] if a.offsets.len() == b.offsets.len() && !b.offsets.is_empty() => Some(
            a.offsets
                .iter()
                .zip(&b.offsets)
                .map(|(&d1, &d2)| (b.m * d2 - a.m * d1) / (b.m - a.m))
                .collect(),
        ),
        _ => None,
    };
    Ok(RootTable { n, exponent, rows, extrapolated_offsets, flagged })
}

/// Scan settings. Trial `i` of order `n` uses the seed
/// [`trial_seed`]`(seed, n, i)` and can be replayed alone.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanConfig {
    pub n_min: usize,
    pub n_max: usize,
    pub trials: usize,
    pub m_schedule: Vec<f64>,
    pub exponent: u32,
    pub seed: u64,
}

pub fn trial_seed(seed: u64, n: usize, trial: usize) -> u64 {
    seed.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ (((n as u64) << 32) | trial as u64)
}

const JET_RANGE: f64 = 10.0;
const MIN_LEADING: f64 = 0.1;

/// A jet uniform in `[-10, 10]^n` with `|a_0| >= 0.1`.
pub fn random_jet(n: usize, trial_seed: u64) -> Result<BoundaryJet> {
    let mut rng = ChaCha8Rng::seed_from_u64(trial_seed);
    let mut values: Vec<f64> = (0..n).map(|_| rng.gen_range(-JET_RANGE..=JET_RANGE)).collect();
    while values[0].abs() < MIN_LEADING {
        values[0] = rng.gen_range(-JET_RANGE..=JET_RANGE);
    }
    BoundaryJet::new(values)
}

/// A trial whose `h^(n)` was definite at some `m` and indefinite later.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Counterexample {
    pub n: usize,
    pub trial: usize,
    pub seed: u64,
    pub definite_at: f64,
    pub indefinite_at: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConjectureTrial {
    pub n: usize,
    pub trial: usize,
    pub seed: u64,
    pub jet: Vec<f64>,
    pub classes: Vec<SignClass>,
    /// Real roots of `h^(n)` at the largest `m`, as `x/m - 1`.
    pub final_offsets: Vec<f64>,
    /// Collar-coordinate roots at the largest `m`.
    pub final_collar_roots: Vec<f64>,
    /// `min |t - 1|` at the largest `m`; `None` without real roots.
    pub min_distance_to_one: Option<f64>,
    /// Successive changes of the offsets shrink along the schedule.
    pub offsets_converging: bool,
    pub extrapolated_offsets: Option<Vec<f64>>,
    pub flagged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrderSummary {
    pub n: usize,
    pub trials: usize,
    pub fraction_definite: f64,
    pub min_distance_to_one: Option<f64>,
    pub fraction_converging: f64,
    pub flagged: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConjectureReport {
    pub evidence_only: bool,
    pub config: ScanConfig,
    pub summaries: Vec<OrderSummary>,
    pub counterexamples: Vec<Counterexample>,
    pub trials: Vec<ConjectureTrial>,
}

impl ConjectureReport {
    pub fn summary(&self, n: usize) -> Option<&OrderSummary> {
        self.summaries.iter().find(|s| s.n == n)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }
}

/// Indices `(i, j)`, `i < j`, of the first definite class and the first
/// non-definite class after it.
pub fn monotonicity_violation(classes: &[SignClass]) -> Option<(usize, usize)> {
    let first = classes.iter().position(|c| c.is_definite())?;
    let later = classes[first..].iter().position(|c| !c.is_definite())?;
    Some((first, first + later))
}

fn converging(rows: &[RootRow]) -> bool {
    let diffs: Vec<f64> = rows
        .windows(2)
        .filter(|w| w[0].offsets.len() == w[1].offsets.len())
        .map(|w| w[0].offsets.iter().zip(&w[1].offsets).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
        .collect();
    diffs.windows(2).all(|d| d[1] <= d[0])
}

/// Run `trials` random jets for every order in `n_min..=n_max`.
pub fn conjecture_scan(config: &ScanConfig) -> Result<ConjectureReport> {
    if config.n_min < 2 || config.n_max > 10 || config.n_min > config.n_max {
        return invalid(format!("orders must satisfy 2 <= n_min <= n_max <= 10, got {}..{}", config.n_min, config.n_max));
    }
    if config.trials == 0 {
        return invalid("at least one trial per order is required");
    }
    check_schedule(&config.m_schedule, config.exponent)?;
    let mut trials = Vec::new();
    let mut summaries = Vec::new();
    let mut counterexamples = Vec::new();
    for n in config.n_min..=config.n_max {
        let mut definite = 0;
        let mut converging_count = 0;
        let mut flagged = 0;
        let mut min_dist: Option<f64> = None;
        for trial in 0..config.trials {
            let seed = trial_seed(config.seed, n, trial);
            let jet = random_jet(n, seed)?;
            let table = scaled_root_table(&jet, &config.m_schedule, config.exponent)?;
            let classes: Vec<SignClass> = table.rows.iter().map(|r| r.class).collect();
            if let Some((i, j)) = monotonicity_violation(&classes) {
                counterexamples.push(Counterexample {
                    n,
                    trial,
                    seed,
                    definite_at: config.m_schedule[i],
                    indefinite_at: config.m_schedule[j],
                });
            }
            let last = table.rows.last().expect("nonempty schedule");
            if last.class.is_definite() {
                definite += 1;
            }
            let dist = last.offsets.iter().map(|d| d.abs()).fold(None, |acc: Option<f64>, d| {
                Some(acc.map_or(d, |a| a.min(d)))
            });
            if let Some(d) = dist {
                min_dist = Some(min_dist.map_or(d, |a| a.min(d)));
            }
            let conv = converging(&table.rows);
            converging_count += conv as usize;
            flagged += table.flagged as usize;
            trials.push(ConjectureTrial {
                n,
                trial,
                seed,
                jet: jet.values().to_vec(),
                classes,
                final_offsets: last.offsets.clone(),
                final_collar_roots: last.collar_roots.clone(),
                min_distance_to_one: dist,
                offsets_converging: conv,
                extrapolated_offsets: table.extrapolated_offsets.clone(),
                flagged: table.flagged,
            });
        }
        let t = config.trials as f64;
        summaries.push(OrderSummary {
            n,
            trials: config.trials,
            fraction_definite: definite as f64 / t,
            min_distance_to_one: min_dist,
            fraction_converging: converging_count as f64 / t,
            flagged,
        });
    }
    Ok(ConjectureReport { evidence_only: true, config: config.clone(), summaries, counterexamples, trials })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn doubling(lo: i32, hi: i32) -> Vec<f64> {
        (lo..=hi).map(|k| 2f64.powi(k)).collect()
    }

    #[test]
    fn scan_is_deterministic() {
        let cfg = ScanConfig { n_min: 3, n_max: 4, trials: 3, m_schedule: doubling(2, 6), exponent: 1, seed: 7 };
        let a = conjecture_scan(&cfg).unwrap().to_json();
        let b = conjecture_scan(&cfg).unwrap().to_json();
        assert_eq!(a, b);
        assert!(a.contains("\"evidence_only\": true"));
    }

    #[test]
    fn trials_replay_from_their_seed() {
        let cfg = ScanConfig { n_min: 5, n_max: 5, trials: 4, m_schedule: doubling(3, 5), exponent: 2, seed: 99 };
        let report = conjecture_scan(&cfg).unwrap();
        let t = &report.trials[2];
        assert_eq!(random_jet(5, t.seed).unwrap().values(), t.jet.as_slice());
        assert!(t.jet[0].abs() >= MIN_LEADING);
    }

    #[test]
    fn zero_jet_has_no_roots() {
        let table = scaled_root_table(&BoundaryJet::zero(4).unwrap(), &doubling(2, 4), 1).unwrap();
        assert!(table.rows.iter().all(|r| r.offsets.is_empty() && r.class == SignClass::IdenticallyZero));
        assert!(!table.flagged);
        assert!(table.extrapolates().is_none());
    }

    #[test]
    fn n2_positive_jets_never_definite() {
        let cfg = ScanConfig { n_min: 2, n_max: 2, trials: 10, m_schedule: doubling(4, 8), exponent: 1, seed: 3 };
        let report = conjecture_scan(&cfg).unwrap();
        for t in report.trials.iter().filter(|t| t.jet[0] > 0.0 && t.jet[1] > 0.0) {
            assert!(t.classes.iter().all(|c| !c.is_definite()));
        }
    }

    #[test]
    fn rejects_bad_configs() {
        let mut cfg = ScanConfig { n_min: 3, n_max: 11, trials: 1, m_schedule: vec![4.0], exponent: 1, seed: 0 };
        assert!(conjecture_scan(&cfg).is_err());
        cfg.n_max = 3;
        cfg.m_schedule = vec![8.0, 4.0];
        assert!(conjecture_scan(&cfg).is_err());
    }
}
