//! Composite Gauss–Legendre rules on panelled intervals.

use std::collections::HashMap;
use std::num::NonZeroUsize;
use std::sync::{Arc, Mutex, OnceLock};

use gauss_quad::GaussLegendre;

/// Reference nodes and weights on [-1, 1], cached per order.
pub fn gauss_legendre(order: usize) -> Arc<[(f64, f64)]> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<[(f64, f64)]>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("quadrature cache poisoned");
    guard
        .entry(order)
        .or_insert_with(|| {
            let n = NonZeroUsize::new(order.max(1)).expect("nonzero");
            let mut pairs: Vec<(f64, f64)> = GaussLegendre::new(n).as_node_weight_pairs().to_vec();
            pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
            pairs.into()
        })
        .clone()
}

/// A one-dimensional quadrature rule: nodes with matching weights.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Rule1d {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule1d {
    /// Gauss–Legendre of the given order on each panel. Consecutive `breaks`
    /// delimit segments; each segment is cut into equal panels no longer than
    /// `max_panel`.
    pub fn panelled(breaks: &[f64], max_panel: f64, order: usize) -> Rule1d {
        let reference = gauss_legendre(order);
        let mut rule = Rule1d::default();
        for seg in breaks.windows(2) {
            let (a, b) = (seg[0], seg[1]);
            if !(b > a) {
                continue;
            }
            let count = ((b - a) / max_panel).ceil().max(1.0) as usize;
            let h = (b - a) / count as f64;
            for p in 0..count {
                let lo = a + h * p as f64;
                let hi = if p + 1 == count { b } else { lo + h };
                let half = 0.5 * (hi - lo);
                let mid = 0.5 * (hi + lo);
                for &(x, w) in reference.iter() {
                    rule.nodes.push(mid + half * x);
                    rule.weights.push(half * w);
                }
            }
        }
        rule
    }

    /// Single-panel rule on [a, b].
    pub fn on_interval(a: f64, b: f64, order: usize) -> Rule1d {
        Rule1d::panelled(&[a, b], f64::INFINITY, order)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        let terms: Vec<f64> = self
            .nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .collect();
        pairwise_sum(&terms)
    }
}

/// Integrate `f` over [a, b] with `panels` equal Gauss–Legendre panels.
pub fn integrate(a: f64, b: f64, panels: usize, order: usize, f: impl FnMut(f64) -> f64) -> f64 {
    if !(b > a) {
        return 0.0;
    }
    let max_panel = (b - a) / panels.max(1) as f64 * (1.0 + 1e-12);
    Rule1d::panelled(&[a, b], max_panel, order).integrate(f)
}

/// Pairwise (tree) summation with a fixed reduction order.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    match values.len() {
        0 => 0.0,
        1 => values[0],
        n if n <= 8 => values.iter().sum(),
        n => {
            let (lo, hi) = values.split_at(n / 2);
            pairwise_sum(lo) + pairwise_sum(hi)
        }
    }
}

/// Tensor-product quadrature of `f` over the box spanned by `rules`.
/// Inner sums are pairwise; the outermost axis is summed pairwise as well.
pub fn tensor_integrate(rules: &[&Rule1d], mut f: impl FnMut(&[f64]) -> f64) -> f64 {
    let mut point = vec![0.0; rules.len()];
    tensor_level(rules, 0, &mut point, &mut f)
}

fn tensor_level(rules: &[&Rule1d], axis: usize, point: &mut Vec<f64>, f: &mut impl FnMut(&[f64]) -> f64) -> f64 {
    let rule = rules[axis];
    let mut terms = Vec::with_capacity(rule.len());
    for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
        point[axis] = x;
        let v = if axis + 1 == rules.len() {
            f(point)
        } else {
            tensor_level(rules, axis + 1, point, f)
        };
        terms.push(w * v);
    }
    pairwise_sum(&terms)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_polynomials_exactly() {
        let r = Rule1d::on_interval(0.0, 2.0, 4);
        let v = r.integrate(|x| x.powi(7));
        assert!((v - 2f64.powi(8) / 8.0).abs() < 1e-12);
    }

    #[test]
    fn panels_respect_breakpoints() {
        let r = Rule1d::panelled(&[-1.0, 0.0, 0.25], 0.3, 3);
        // [-1,0] -> 4 panels, [0,0.25] -> 1 panel
        assert_eq!(r.len(), 15);
        assert!(r.nodes.iter().all(|&x| (-1.0..=0.25).contains(&x)));
        let step = r.integrate(|x| if x < 0.0 { 1.0 } else { 2.0 });
        assert!((step - 1.5).abs() < 1e-14);
    }

    #[test]
    fn oscillatory_integral() {
        let v = integrate(0.0, std::f64::consts::PI * 20.0, 40, 16, |x| x.sin().powi(2));
        assert!((v - std::f64::consts::PI * 10.0).abs() < 1e-10);
    }
}
