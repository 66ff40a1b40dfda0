//! One-dimensional collar polynomials.
//!
//! A collar polynomial on `[a, b]` (or `[b, a]` for a decreasing collar) has
//! degree `2n - 1`, reproduces an `n`-jet at the inner edge `a` and vanishes to
//! order `n` at the outer edge `b`. Everything is computed in the scaled
//! coordinate `s = σ(x - a)/w`, where the problem no longer depends on `a` or
//! `w`: `h(x) = H(s)` with `H^(i)(0) = t_i = (σw)^i a_i` and `H^(i)(1) = 0`.
//!
//! `H` is expanded in a two-point Hermite basis `Ψ_j` with `Ψ_j^(i)(0) = δ_ij`
//! and `Ψ_j^(i)(1) = 0`. The basis is obtained once per order by exact rational
//! forward substitution and kept as integer Taylor coefficients about both
//! ends, so jet matching at `a` and vanishing at `b` hold without cancellation.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::exact::{rational_from_f64, RationalPoly, RootIsolator};
use crate::quadrature;

/// Derivative data `(a_0, ..., a_{n-1})` at a collar's inner edge.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryJet {
    values: Vec<f64>,
}

impl BoundaryJet {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return invalid(format!("a jet needs at least 2 values, got {}", values.len()));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return invalid(format!("jet value {v} is not finite"));
        }
        Ok(BoundaryJet { values })
    }

    pub fn zero(n: usize) -> Result<Self> {
        BoundaryJet::new(vec![0.0; n])
    }

    pub fn order(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    Increasing,
    Decreasing,
}

/// The interval between the inner edge `a` and the outer edge `a ± w`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Collar {
    inner: f64,
    width: f64,
    orientation: Orientation,
}

impl Collar {
    pub fn new(inner: f64, width: f64, orientation: Orientation) -> Result<Self> {
        if !inner.is_finite() {
            return invalid(format!("collar edge {inner} is not finite"));
        }
        if !(width > 0.0) || !width.is_finite() {
            return invalid(format!("collar width must be positive and finite, got {width}"));
        }
        Ok(Collar { inner, width, orientation })
    }

    pub fn increasing(inner: f64, width: f64) -> Result<Self> {
        Collar::new(inner, width, Orientation::Increasing)
    }

    pub fn inner(&self) -> f64 {
        self.inner
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    /// +1 for increasing collars, -1 for mirrored ones.
    pub fn sigma(&self) -> f64 {
        match self.orientation {
            Orientation::Increasing => 1.0,
            Orientation::Decreasing => -1.0,
        }
    }

    pub fn outer(&self) -> f64 {
        self.inner + self.sigma() * self.width
    }

    /// Scaled coordinate; the outer edge maps to exactly 1.
    pub fn to_scaled(&self, x: f64) -> f64 {
        if x == self.outer() {
            1.0
        } else {
            self.sigma() * (x - self.inner) / self.width
        }
    }

    pub fn from_scaled(&self, s: f64) -> f64 {
        self.inner + self.sigma() * self.width * s
    }
}

/// Two-point Hermite basis of order `n` on `[0, 1]`.
#[derive(Debug)]
pub struct HermiteBasis {
    n: usize,
    /// Taylor coefficients of `j! Ψ_j` about 0 and about 1.
    about_zero: Vec<Vec<f64>>,
    about_one: Vec<Vec<f64>>,
    exact: Vec<RationalPoly>,
}

fn factorial(k: usize) -> BigInt {
    (1..=k).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

fn binomial(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    factorial(n) / (factorial(k) * factorial(n - k))
}

fn falling(k: usize, d: usize) -> f64 {
    (0..d).fold(1.0, |acc, i| acc * (k - i) as f64)
}

impl HermiteBasis {
    /// Cached basis for order `n`.
    pub fn for_order(n: usize) -> Arc<HermiteBasis> {
        static CACHE: OnceLock<Mutex<HashMap<usize, Arc<HermiteBasis>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        if let Some(b) = cache.lock().expect("basis cache poisoned").get(&n) {
            return Arc::clone(b);
        }
        let basis = Arc::new(HermiteBasis::derive(n));
        cache
            .lock()
            .expect("basis cache poisoned")
            .entry(n)
            .or_insert(basis)
            .clone()
    }

    /// Solve `H^(i)(0) = δ_ij` for `H = (s - 1)^n Σ q_k s^k` by forward
    /// substitution on the lower-triangular system
    /// `H^(i)(0) = Σ_{k ≤ i} C(i,k) k! [(s-1)^n]^(i-k)(0) q_k`.
    fn derive(n: usize) -> HermiteBasis {
        assert!(n >= 1, "basis order must be positive");
        // [(s-1)^n]^(r)(0) = n!/(n-r)! (-1)^(n-r)
        let vanish = |r: usize| -> BigRational {
            let sign = if (n - r) % 2 == 0 { 1 } else { -1 };
            BigRational::from_integer(factorial(n) / factorial(n - r) * sign)
        };
        let entry = |i: usize, k: usize| -> BigRational {
            BigRational::from_integer(binomial(i, k) * factorial(k)) * vanish(i - k)
        };
        let mut power = RationalPoly::from_integers(&[1]);
        for _ in 0..n {
            power = power.mul(&RationalPoly::from_integers(&[-1, 1]));
        }

        let mut exact = Vec::with_capacity(n);
        for j in 0..n {
            let mut q = vec![BigRational::zero(); n];
            for i in 0..n {
                let rhs = if i == j { BigRational::one() } else { BigRational::zero() };
                let acc = (0..i).fold(rhs, |acc, k| acc - entry(i, k) * &q[k]);
                q[i] = acc / entry(i, i);
            }
            let scale = BigRational::from_integer(factorial(j));
            let phi = power.mul(&RationalPoly::new(q)).scale(&scale);
            debug_assert!(phi.coeffs().iter().all(|c| c.is_integer()));
            exact.push(phi);
        }

        let about_zero = exact
            .iter()
            .map(|p| coeffs_f64(p, 2 * n))
            .collect::<Vec<_>>();
        let about_one = exact
            .iter()
            .map(|p| coeffs_f64(&taylor_shift_one(p), 2 * n))
            .collect::<Vec<_>>();
        HermiteBasis { n, about_zero, about_one, exact }
    }

    pub fn order(&self) -> usize {
        self.n
    }

    /// `Ψ_j^(d)(s)`, normalised so that `Ψ_j^(i)(0) = δ_ij`.
    pub fn eval(&self, j: usize, s: f64, d: usize) -> f64 {
        self.eval_scaled(j, s, d) / factorial_f64(j)
    }

    /// `Φ_j^(d)(s)` for the integer form `Φ_j = j! Ψ_j`.
    pub fn eval_scaled(&self, j: usize, s: f64, d: usize) -> f64 {
        if d >= 2 * self.n {
            return 0.0;
        }
        if s <= 0.5 {
            taylor_derivative(&self.about_zero[j], s, d)
        } else {
            taylor_derivative(&self.about_one[j], s - 1.0, d)
        }
    }

    /// Exact integer form `Φ_j = j! Ψ_j` in powers of `s`.
    pub fn exact(&self, j: usize) -> &RationalPoly {
        &self.exact[j]
    }
}

fn factorial_f64(k: usize) -> f64 {
    (1..=k).fold(1.0, |acc, i| acc * i as f64)
}

fn coeffs_f64(p: &RationalPoly, len: usize) -> Vec<f64> {
    let mut out = vec![0.0; len];
    for (o, c) in out.iter_mut().zip(p.coeffs()) {
        *o = c.to_f64().unwrap_or(f64::NAN);
    }
    out
}

/// Coefficients of `p(1 + u)` in powers of `u`.
fn taylor_shift_one(p: &RationalPoly) -> RationalPoly {
    let c = p.coeffs();
    let mut out = vec![BigRational::zero(); c.len()];
    for (k, ck) in c.iter().enumerate() {
        for (i, o) in out.iter_mut().enumerate().take(k + 1) {
            *o += ck * BigRational::from_integer(binomial(k, i));
        }
    }
    RationalPoly::new(out)
}

/// d-th derivative of `Σ c_k u^k` at `u`.
fn taylor_derivative(c: &[f64], u: f64, d: usize) -> f64 {
    let mut acc = 0.0;
    for k in (d..c.len()).rev() {
        acc = acc * u + c[k] * falling(k, d);
    }
    acc
}

/// Sign behaviour of `h^(n)` on the open collar.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignClass {
    PositiveDefinite,
    NegativeDefinite,
    Indefinite,
    IdenticallyZero,
}

impl SignClass {
    pub fn is_definite(self) -> bool {
        matches!(self, SignClass::PositiveDefinite | SignClass::NegativeDefinite)
    }
}

/// `h(x) = (x - b)^n Σ c_i (x - a)^i` matching a jet at `a`.
#[derive(Debug, Clone)]
pub struct CollarPolynomial {
    collar: Collar,
    jet: BoundaryJet,
    /// `t_j = (σw)^j a_j`
    scaled_jet: Vec<f64>,
    /// Taylor coefficients of `H` about `s = 0` and `s = 1`.
    about_zero: Vec<f64>,
    about_one: Vec<f64>,
}

impl CollarPolynomial {
    pub fn new(jet: BoundaryJet, collar: Collar) -> Self {
        let n = jet.order();
        let basis = HermiteBasis::for_order(n);
        let sw = collar.sigma() * collar.width();
        let mut scaled_jet = Vec::with_capacity(n);
        let mut pw = 1.0;
        for &a in jet.values() {
            scaled_jet.push(pw * a);
            pw *= sw;
        }
        let combine = |rows: &[Vec<f64>]| {
            let mut out = vec![0.0; 2 * n];
            for (j, row) in rows.iter().enumerate() {
                let t = scaled_jet[j] / factorial_f64(j);
                if t == 0.0 {
                    continue;
                }
                for (o, r) in out.iter_mut().zip(row) {
                    *o += t * r;
                }
            }
            out
        };
        let about_zero = combine(&basis.about_zero);
        let about_one = combine(&basis.about_one);
        CollarPolynomial { collar, jet, scaled_jet, about_zero, about_one }
    }

    pub fn collar(&self) -> &Collar {
        &self.collar
    }

    pub fn jet(&self) -> &BoundaryJet {
        &self.jet
    }

    pub fn order(&self) -> usize {
        self.jet.order()
    }

    pub fn scaled_jet(&self) -> &[f64] {
        &self.scaled_jet
    }

    /// The coefficients `c_i` of `h(x) = (x - b)^n Σ c_i (x - a)^i`.
    pub fn coeffs(&self) -> Vec<f64> {
        let n = self.order();
        let sw = self.collar.sigma() * self.collar.width();
        // H(s) = (s-1)^n Q(s) and (x-b)^n (x-a)^i = (σw)^(n+i) (s-1)^n s^i
        let q = self.inner_factor();
        (0..n).map(|i| q[i] / sw.powi((n + i) as i32)).collect()
    }

    /// Coefficients of `Q` with `H(s) = (s - 1)^n Q(s)`.
    fn inner_factor(&self) -> Vec<f64> {
        let n = self.order();
        // The about-one expansion is u^n Σ_k e_k u^k with u = s - 1; shift back.
        let e = &self.about_one[n..];
        let mut q = vec![0.0; n];
        for (k, &ek) in e.iter().enumerate() {
            let mut binom = 1.0;
            for i in 0..=k {
                let sign = if (k - i) % 2 == 0 { 1.0 } else { -1.0 };
                q[i] += ek * binom * sign;
                binom = binom * (k - i) as f64 / (i + 1) as f64;
            }
        }
        q
    }

    /// `H^(d)(s)` in the scaled coordinate.
    pub fn eval_scaled(&self, s: f64, d: usize) -> f64 {
        if d >= 2 * self.order() {
            return 0.0;
        }
        if s <= 0.5 {
            taylor_derivative(&self.about_zero, s, d)
        } else {
            taylor_derivative(&self.about_one, s - 1.0, d)
        }
    }

    /// `h^(d)(x)`.
    pub fn eval(&self, x: f64, d: usize) -> Result<f64> {
        if !x.is_finite() {
            return invalid(format!("evaluation point {x} is not finite"));
        }
        let s = self.collar.to_scaled(x);
        let factor = (self.collar.sigma() / self.collar.width()).powi(d as i32);
        Ok(factor * self.eval_scaled(s, d))
    }

    /// `H^(d)` with exact rational coefficients, up to the positive factor
    /// relating it to `h^(d)` by `h^(d)(x) = (σ/w)^d H^(d)(s)`.
    pub fn exact_scaled(&self, d: usize) -> Result<RationalPoly> {
        let basis = HermiteBasis::for_order(self.order());
        let mut acc = RationalPoly::zero();
        for (j, &t) in self.scaled_jet.iter().enumerate() {
            if t == 0.0 {
                continue;
            }
            let k = rational_from_f64(t)? / BigRational::from_integer(factorial(j));
            acc = acc.add(&basis.exact(j).scale(&k));
        }
        for _ in 0..d {
            acc = acc.derivative();
        }
        Ok(acc)
    }

    fn nth_isolator(&self) -> Option<RootIsolator> {
        let p = self.exact_scaled(self.order()).ok()?;
        RootIsolator::new(&p, BigRational::zero(), BigRational::one())
    }

    /// Sign class of `h^(n)` on the open collar, by exact Sturm counting.
    pub fn sign_class(&self) -> SignClass {
        let n = self.order();
        let Some(iso) = self.nth_isolator() else {
            return SignClass::IdenticallyZero;
        };
        if iso.count() > 0 {
            return SignClass::Indefinite;
        }
        // No root inside: the sign at the inner edge (or just inside, when the
        // edge value itself vanishes) is the sign on the whole collar.
        let p = self.exact_scaled(n).expect("finite jet");
        let mut sign = p.sign_at(&BigRational::zero());
        if sign == 0 {
            sign = p.sign_at(&BigRational::new(BigInt::from(1), BigInt::from(2)));
        }
        let sigma_n = if self.collar.sigma() < 0.0 && n % 2 == 1 { -1 } else { 1 };
        match sign * sigma_n {
            1 => SignClass::PositiveDefinite,
            -1 => SignClass::NegativeDefinite,
            _ => SignClass::Indefinite,
        }
    }

    /// Roots of `H^(n)` in the open unit interval (scaled coordinate).
    pub fn nth_derivative_collar_roots(&self) -> Vec<f64> {
        self.nth_isolator().map(|iso| iso.roots(1e-15)).unwrap_or_default()
    }

    /// All real roots of `h^(n)`, in `x`.
    pub fn nth_derivative_roots(&self) -> Vec<f64> {
        let Ok(p) = self.exact_scaled(self.order()) else {
            return Vec::new();
        };
        let Some(iso) = RootIsolator::all_real(&p) else {
            return Vec::new();
        };
        let mut xs: Vec<f64> = iso
            .roots(1e-15)
            .into_iter()
            .map(|s| self.collar.from_scaled(s))
            .collect();
        xs.sort_by(f64::total_cmp);
        xs
    }

    /// `∫ |h^(n)|` over the collar, split at the sign changes of `h^(n)`.
    pub fn nth_derivative_l1(&self) -> f64 {
        let n = self.order();
        let mut breaks = vec![0.0];
        breaks.extend(self.nth_derivative_collar_roots());
        breaks.push(1.0);
        // h^(n) has degree n - 1, integrated exactly by an (n/2 + 1)-point rule.
        let order = n / 2 + 1;
        let pieces: Vec<f64> = breaks
            .windows(2)
            .map(|p| quadrature::integrate(p[0], p[1], 1, order, |s| self.eval_scaled(s, n)).abs())
            .collect();
        quadrature::pairwise_sum(&pieces) * self.collar.width().powi(1 - n as i32)
    }

    /// `max |h|` on the closed collar from the critical points of `h`.
    pub fn sup_norm(&self) -> f64 {
        let mut best = self.eval_scaled(0.0, 0).abs().max(self.eval_scaled(1.0, 0).abs());
        let Ok(p) = self.exact_scaled(1) else {
            return f64::NAN;
        };
        if let Some(iso) = RootIsolator::new(&p, BigRational::zero(), BigRational::one()) {
            for s in iso.roots(1e-15) {
                best = best.max(self.eval_scaled(s, 0).abs());
            }
        }
        best
    }

    /// Largest relative residual of the boundary conditions at both edges.
    pub fn boundary_residual(&self) -> f64 {
        let scale = self.jet.max_abs();
        let mut worst: f64 = 0.0;
        for (i, &a) in self.jet.values().iter().enumerate() {
            let at_inner = self.eval(self.collar.inner(), i).unwrap_or(f64::NAN);
            let at_outer = self.eval(self.collar.outer(), i).unwrap_or(f64::NAN);
            worst = worst.max((at_inner - a).abs() / (1.0 + a.abs()));
            if scale > 0.0 {
                worst = worst.max(at_outer.abs() / scale);
            } else {
                worst = worst.max(at_outer.abs());
            }
        }
        worst
    }
}

/// Coefficients `c_i` of the collar polynomial matching `jet` on `collar`.
pub fn solve_jet_coefficients(jet: &BoundaryJet, collar: &Collar) -> Vec<f64> {
    CollarPolynomial::new(jet.clone(), *collar).coeffs()
}

pub fn check_sign_definite(poly: &CollarPolynomial) -> SignClass {
    poly.sign_class()
}

/// Outcome of scanning `m = 2, 4, ..., 2^20` for a sign-definite collar.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "outcome")]
pub enum Admissibility {
    Found { m: f64, class: SignClass },
    NotFound { last: SignClass },
}

/// Smallest `m` in the doubling schedule for which the collar
/// `[m, m + 1/m^d]` carries a sign-definite (or zero) `h^(n)`.
pub fn min_admissible_m(jet: &BoundaryJet, exponent: u32) -> Result<Admissibility> {
    if !(1..=3).contains(&exponent) {
        return invalid(format!("collar exponent must be 1, 2 or 3, got {exponent}"));
    }
    let mut last = SignClass::Indefinite;
    for k in 1..=20 {
        let m = f64::powi(2.0, k);
        let collar = Collar::increasing(m, m.powi(-(exponent as i32)))?;
        let class = CollarPolynomial::new(jet.clone(), collar).sign_class();
        if class.is_definite() || class == SignClass::IdenticallyZero {
            return Ok(Admissibility::Found { m, class });
        }
        last = class;
    }
    Ok(Admissibility::NotFound { last })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(values: &[f64], a: f64, w: f64) -> CollarPolynomial {
        CollarPolynomial::new(BoundaryJet::new(values.to_vec()).unwrap(), Collar::increasing(a, w).unwrap())
    }

    #[test]
    fn basis_matches_binomial_closed_form() {
        // Φ_j = (-1)^n (s-1)^n s^j Σ_{k<n-j} C(n-1+k, k) s^k
        for n in 1..=7 {
            let b = HermiteBasis::for_order(n);
            for j in 0..n {
                let mut expected = RationalPoly::from_integers(&[if n % 2 == 0 { 1 } else { -1 }]);
                for _ in 0..n {
                    expected = expected.mul(&RationalPoly::from_integers(&[-1, 1]));
                }
                let mut shift = vec![0i64; j];
                shift.push(1);
                expected = expected.mul(&RationalPoly::from_integers(&shift));
                let tail: Vec<i64> = (0..n - j)
                    .map(|k| binomial(n - 1 + k, k).to_i64().unwrap())
                    .collect();
                expected = expected.mul(&RationalPoly::from_integers(&tail));
                assert_eq!(b.exact(j), &expected, "n={n} j={j}");
            }
        }
    }

    #[test]
    fn basis_is_unit_at_zero_and_flat_at_one() {
        let b = HermiteBasis::for_order(6);
        for j in 0..6 {
            for i in 0..6 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert_eq!(b.eval(j, 0.0, i), want);
                assert_eq!(b.eval(j, 1.0, i), 0.0);
            }
        }
    }

    #[test]
    fn zero_jet_gives_zero_polynomial() {
        let p = poly(&[0.0, 0.0, 0.0], 3.0, 0.5);
        assert!(p.coeffs().iter().all(|&c| c == 0.0));
        assert_eq!(p.sign_class(), SignClass::IdenticallyZero);
        assert_eq!(p.nth_derivative_l1(), 0.0);
        assert_eq!(p.sup_norm(), 0.0);
    }

    #[test]
    fn jet_is_matched_and_outer_edge_vanishes() {
        let m = 100.0;
        let p = poly(&[1.5, -2.0, 0.75], m, 1.0 / m);
        for (i, &a) in p.jet().values().iter().enumerate() {
            assert!((p.eval(m, i).unwrap() - a).abs() < 1e-9 * 2.0);
            assert_eq!(p.eval(m + 1.0 / m, i).unwrap(), 0.0);
        }
        assert_eq!(p.eval(m + 0.003, 6).unwrap(), 0.0);
    }

    #[test]
    fn coefficients_rebuild_the_polynomial() {
        let (a, w) = (2.0, 0.5);
        let p = poly(&[1.0, -2.0, 3.0, -4.0], a, w);
        let c = p.coeffs();
        for x in [2.0, 2.1, 2.37, 2.5] {
            let inner: f64 = c.iter().enumerate().map(|(i, ci)| ci * (x - a).powi(i as i32)).sum();
            let direct = (x - a - w).powi(4) * inner;
            assert!((direct - p.eval(x, 0).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn decreasing_collar_is_the_mirror_image() {
        let up = poly(&[1.0, 2.0, -1.0], 5.0, 0.2);
        let down = CollarPolynomial::new(
            BoundaryJet::new(vec![1.0, -2.0, -1.0]).unwrap(),
            Collar::new(-5.0, 0.2, Orientation::Decreasing).unwrap(),
        );
        for x in [5.0, 5.05, 5.13, 5.2] {
            for d in 0..6 {
                let mirrored = down.eval(-x, d).unwrap() * if d % 2 == 1 { -1.0 } else { 1.0 };
                assert!((up.eval(x, d).unwrap() - mirrored).abs() < 1e-9 * (1.0 + up.eval(x, d).unwrap().abs()));
            }
        }
    }

    #[test]
    fn generic_n3_jet_is_indefinite_for_thin_collars() {
        // h''' tends to a multiple of the shifted Legendre polynomial P_2, whose
        // roots (3 ± √3)/6 sit inside the collar.
        let p = poly(&[1.0, 0.0, 0.0], 100.0, 0.01);
        assert_eq!(p.sign_class(), SignClass::Indefinite);
        let roots = p.nth_derivative_collar_roots();
        let expected = [(3.0 - 3f64.sqrt()) / 6.0, (3.0 + 3f64.sqrt()) / 6.0];
        assert_eq!(roots.len(), 2);
        for (r, e) in roots.iter().zip(expected) {
            assert!((r - e).abs() < 1e-12);
        }
    }

    #[test]
    fn jet_of_a_pure_power_is_definite() {
        // The jet of (x-b)^n at a gives h = (x-b)^n, so h^(n) = n! everywhere.
        let (a, w) = (10.0_f64, 0.1_f64);
        let jet: Vec<f64> = (0..4)
            .map(|i| (0..i).fold(1.0, |acc, k| acc * (4 - k) as f64) * (-w).powi(4 - i as i32))
            .collect();
        let p = poly(&jet, a, w);
        assert_eq!(p.sign_class(), SignClass::PositiveDefinite);
        assert!((p.nth_derivative_l1() - jet[3].abs()).abs() < 1e-12);
    }

    #[test]
    fn n2_positive_jets_are_indefinite() {
        for w in [1.0, 0.1, 1e-3] {
            assert_eq!(poly(&[1.0, 1.0], 7.0, w).sign_class(), SignClass::Indefinite);
        }
    }

    #[test]
    fn n3_sup_is_m_independent() {
        for m in [10.0, 100.0, 1000.0, 10000.0] {
            let p = poly(&[1.0, -1.0, 1.0], m, 1.0 / m);
            assert!(p.sup_norm() <= 24.0);
        }
    }

    #[test]
    fn admissibility_scan() {
        let zero = BoundaryJet::zero(3).unwrap();
        assert_eq!(
            min_admissible_m(&zero, 1).unwrap(),
            Admissibility::Found { m: 2.0, class: SignClass::IdenticallyZero }
        );
        let pos = BoundaryJet::new(vec![1.0, 1.0]).unwrap();
        assert_eq!(
            min_admissible_m(&pos, 1).unwrap(),
            Admissibility::NotFound { last: SignClass::Indefinite }
        );
        let generic = BoundaryJet::new(vec![1.0, 0.0, 0.0]).unwrap();
        assert!(matches!(min_admissible_m(&generic, 1).unwrap(), Admissibility::NotFound { .. }));
    }

    #[test]
    fn invalid_inputs() {
        assert!(BoundaryJet::new(vec![1.0, f64::NAN]).is_err());
        assert!(BoundaryJet::new(vec![1.0]).is_err());
        assert!(Collar::increasing(0.0, 0.0).is_err());
        assert!(Collar::increasing(0.0, -1.0).is_err());
        assert!(poly(&[1.0, 1.0], 0.0, 1.0).eval(f64::INFINITY, 0).is_err());
    }
}
