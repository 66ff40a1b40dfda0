//! Univariate polynomials over exact rationals, with Sturm-sequence root
//! counting and isolation.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Dense polynomial with rational coefficients in ascending order. The
/// coefficient vector never carries trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalPoly {
    coeffs: Vec<BigRational>,
}

fn rat(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

/// Exact rational value of a finite `f64`.
pub fn rational_from_f64(x: f64) -> Result<BigRational> {
    BigRational::from_float(x).ok_or_else(|| Error::InvalidInput(format!("non-finite value {x}")))
}

impl RationalPoly {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        RationalPoly { coeffs }
    }

    pub fn zero() -> Self {
        RationalPoly { coeffs: Vec::new() }
    }

    /// Exact conversion of `f64` coefficients (ascending powers).
    pub fn from_f64(coeffs: &[f64]) -> Result<Self> {
        let c = coeffs
            .iter()
            .map(|&x| rational_from_f64(x))
            .collect::<Result<Vec<_>>>()?;
        Ok(RationalPoly::new(c))
    }

    pub fn from_integers(coeffs: &[i64]) -> Self {
        RationalPoly::new(coeffs.iter().map(|&c| rat(c)).collect())
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&BigRational> {
        self.coeffs.last()
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn sign_at(&self, x: &BigRational) -> i8 {
        let v = self.eval(x);
        if v.is_zero() {
            0
        } else if v.is_positive() {
            1
        } else {
            -1
        }
    }

    /// Floating-point evaluation through the exact coefficients rounded once.
    pub fn eval_f64(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c.to_f64().unwrap_or(f64::NAN);
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        let c = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c * rat(i as i64))
            .collect();
        RationalPoly::new(c)
    }

    pub fn scale(&self, k: &BigRational) -> Self {
        RationalPoly::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let c = (0..n)
            .map(|i| {
                let a = self.coeffs.get(i).cloned().unwrap_or_else(BigRational::zero);
                let b = other.coeffs.get(i).cloned().unwrap_or_else(BigRational::zero);
                a + b
            })
            .collect();
        RationalPoly::new(c)
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return RationalPoly::zero();
        }
        let mut c = vec![BigRational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        RationalPoly::new(c)
    }

    /// Euclidean division: `self = q * divisor + r` with `deg r < deg divisor`.
    pub fn div_rem(&self, divisor: &Self) -> (Self, Self) {
        let d = divisor.degree().expect("division by the zero polynomial");
        let lead = divisor.coeffs[d].clone();
        let mut rem = self.coeffs.clone();
        if rem.len() <= d {
            return (RationalPoly::zero(), self.clone());
        }
        let mut quot = vec![BigRational::zero(); rem.len() - d];
        for k in (0..quot.len()).rev() {
            let q = &rem[k + d] / &lead;
            if !q.is_zero() {
                for (j, dc) in divisor.coeffs.iter().enumerate() {
                    rem[k + j] -= &q * dc;
                }
            }
            quot[k] = q;
        }
        rem.truncate(d);
        (RationalPoly::new(quot), RationalPoly::new(rem))
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, other: &Self) -> Self {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        match a.leading().cloned() {
            Some(l) => a.scale(&(BigRational::one() / l)),
            None => a,
        }
    }

    /// The polynomial with the same roots, each simple.
    pub fn square_free(&self) -> Self {
        if self.degree().unwrap_or(0) == 0 {
            return self.clone();
        }
        let g = self.gcd(&self.derivative());
        if g.degree() == Some(0) {
            self.clone()
        } else {
            self.div_rem(&g).0
        }
    }

    /// Divide out the linear factor `(x - r)`; `r` must be a root.
    fn deflate(&self, r: &BigRational) -> Self {
        let divisor = RationalPoly::new(vec![-r.clone(), BigRational::one()]);
        self.div_rem(&divisor).0
    }

    /// Cauchy bound: every real root lies in `(-B, B)`.
    pub fn cauchy_bound(&self) -> BigRational {
        let Some(lead) = self.leading() else {
            return BigRational::one();
        };
        let lead = lead.abs();
        let max = self.coeffs[..self.coeffs.len() - 1]
            .iter()
            .map(|c| c.abs() / &lead)
            .fold(BigRational::zero(), |m, v| if v > m { v } else { m });
        max + rat(1)
    }
}

/// Sturm chain of a square-free polynomial.
#[derive(Debug, Clone)]
pub struct SturmChain {
    polys: Vec<RationalPoly>,
}

impl SturmChain {
    pub fn new(p: &RationalPoly) -> Self {
        let mut polys = vec![p.clone()];
        if p.degree().unwrap_or(0) == 0 {
            return SturmChain { polys };
        }
        polys.push(p.derivative());
        loop {
            let n = polys.len();
            let (_, r) = polys[n - 2].div_rem(&polys[n - 1]);
            if r.is_zero() {
                break;
            }
            // Negate, then normalise by a positive factor to keep sizes down.
            let lead = r.leading().expect("nonzero").abs();
            polys.push(r.scale(&(-BigRational::one() / lead)));
        }
        SturmChain { polys }
    }

    pub fn sign_changes(&self, x: &BigRational) -> usize {
        let mut changes = 0;
        let mut last = 0i8;
        for p in &self.polys {
            let s = p.sign_at(x);
            if s == 0 {
                continue;
            }
            if last != 0 && s != last {
                changes += 1;
            }
            last = s;
        }
        changes
    }

    /// Distinct roots in `(a, b)`; neither endpoint may be a root.
    fn count_between(&self, a: &BigRational, b: &BigRational) -> usize {
        self.sign_changes(a).saturating_sub(self.sign_changes(b))
    }
}

/// Root-isolation workspace for the distinct real roots of a polynomial in an
/// open interval.
#[derive(Debug, Clone)]
pub struct RootIsolator {
    reduced: RationalPoly,
    chain: SturmChain,
    lo: BigRational,
    hi: BigRational,
}

impl RootIsolator {
    /// Prepare to isolate the roots of `p` in the open interval `(lo, hi)`.
    /// Returns `None` when `p` is identically zero.
    pub fn new(p: &RationalPoly, lo: BigRational, hi: BigRational) -> Option<Self> {
        if p.is_zero() {
            return None;
        }
        let mut q = p.square_free();
        if q.sign_at(&lo) == 0 {
            q = q.deflate(&lo);
        }
        if q.sign_at(&hi) == 0 {
            q = q.deflate(&hi);
        }
        let chain = SturmChain::new(&q);
        Some(RootIsolator { reduced: q, chain, lo, hi })
    }

    /// Isolator for all real roots of `p`.
    pub fn all_real(p: &RationalPoly) -> Option<Self> {
        let b = p.cauchy_bound();
        RootIsolator::new(p, -b.clone(), b)
    }

    pub fn count(&self) -> usize {
        if self.reduced.degree().unwrap_or(0) == 0 {
            return 0;
        }
        self.chain.count_between(&self.lo, &self.hi)
    }

    /// Disjoint open intervals, sorted, each holding exactly one root with a
    /// strict sign change of the square-free part across it.
    pub fn intervals(&self) -> Vec<(BigRational, BigRational)> {
        let mut out = Vec::new();
        if self.count() > 0 {
            self.split(self.lo.clone(), self.hi.clone(), self.count(), &mut out);
        }
        out
    }

    fn split(&self, a: BigRational, b: BigRational, n: usize, out: &mut Vec<(BigRational, BigRational)>) {
        if n == 0 {
            return;
        }
        if n == 1 {
            out.push((a, b));
            return;
        }
        let mid = self.split_point(&a, &b);
        let left = self.chain.count_between(&a, &mid);
        self.split(a, mid.clone(), left, out);
        self.split(mid, b, n - left, out);
    }

    /// A rational strictly inside (a, b) that is not a root.
    fn split_point(&self, a: &BigRational, b: &BigRational) -> BigRational {
        let width = b - a;
        for (num, den) in [(1, 2), (1, 3), (2, 3), (2, 5), (3, 5), (3, 7), (4, 7)] {
            let m = a + &width * BigRational::new(BigInt::from(num), BigInt::from(den));
            if self.reduced.sign_at(&m) != 0 {
                return m;
            }
        }
        // A nonzero polynomial of degree d has at most d roots; more fractions
        // always exist.
        let mut k = 8i64;
        loop {
            let m = a + &width * BigRational::new(BigInt::from(k / 2), BigInt::from(k + 1));
            if self.reduced.sign_at(&m) != 0 {
                return m;
            }
            k += 1;
        }
    }

    /// Bisect an isolating interval until its width is below
    /// `rel_tol * max(1, |root|)`; returns the midpoint as `f64`.
    pub fn refine(&self, interval: &(BigRational, BigRational), rel_tol: f64) -> f64 {
        let (mut a, mut b) = interval.clone();
        let mut sa = self.reduced.sign_at(&a);
        let two = rat(2);
        for _ in 0..400 {
            let af = a.to_f64().unwrap_or(0.0);
            let bf = b.to_f64().unwrap_or(0.0);
            let scale = af.abs().max(bf.abs()).max(1.0);
            if (bf - af).abs() <= rel_tol * scale {
                break;
            }
            let mid = (&a + &b) / &two;
            let sm = self.reduced.sign_at(&mid);
            if sm == 0 {
                return mid.to_f64().unwrap_or(f64::NAN);
            }
            if sm == sa {
                a = mid;
                sa = sm;
            } else {
                b = mid;
            }
        }
        ((&a + &b) / two).to_f64().unwrap_or(f64::NAN)
    }

    /// All isolated roots refined to `rel_tol`, sorted ascending.
    pub fn roots(&self, rel_tol: f64) -> Vec<f64> {
        self.intervals().iter().map(|iv| self.refine(iv, rel_tol)).collect()
    }
}

/// Number of distinct roots of `p` in the open interval `(lo, hi)`;
/// `None` if `p` is identically zero.
pub fn count_roots_open(p: &RationalPoly, lo: f64, hi: f64) -> Result<Option<usize>> {
    let lo = rational_from_f64(lo)?;
    let hi = rational_from_f64(hi)?;
    Ok(RootIsolator::new(p, lo, hi).map(|iso| iso.count()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(v: f64) -> BigRational {
        rational_from_f64(v).unwrap()
    }

    #[test]
    fn division_and_gcd() {
        // (x-1)^2 (x+2)
        let p = RationalPoly::from_integers(&[2, -3, 0, 1]);
        let (q, rem) = p.div_rem(&RationalPoly::from_integers(&[-1, 1]));
        assert!(rem.is_zero());
        assert_eq!(q, RationalPoly::from_integers(&[-2, 1, 1]));
        let sf = p.square_free();
        assert_eq!(sf.degree(), Some(2));
    }

    #[test]
    fn counts_roots_with_endpoint_roots() {
        // x (x - 0.5) (x - 1): only 0.5 lies in the open interval (0, 1)
        let p = RationalPoly::from_f64(&[0.0, 0.5, -1.5, 1.0]).unwrap();
        assert_eq!(count_roots_open(&p, 0.0, 1.0).unwrap(), Some(1));
        assert_eq!(count_roots_open(&p, -1.0, 2.0).unwrap(), Some(3));
    }

    #[test]
    fn repeated_roots_count_once() {
        // (x - 0.25)^3 (x - 0.75)
        let a = RationalPoly::from_f64(&[-0.25, 1.0]).unwrap();
        let b = RationalPoly::from_f64(&[-0.75, 1.0]).unwrap();
        let p = a.mul(&a).mul(&a).mul(&b);
        let iso = RootIsolator::new(&p, r(0.0), r(1.0)).unwrap();
        assert_eq!(iso.count(), 2);
        let roots = iso.roots(1e-15);
        assert!((roots[0] - 0.25).abs() < 1e-14 && (roots[1] - 0.75).abs() < 1e-14);
    }

    #[test]
    fn all_real_roots() {
        // (x^2 + 1)(x - 3)(x + 7)
        let p = RationalPoly::from_integers(&[1, 0, 1])
            .mul(&RationalPoly::from_integers(&[-3, 1]))
            .mul(&RationalPoly::from_integers(&[7, 1]));
        let roots = RootIsolator::all_real(&p).unwrap().roots(1e-14);
        assert_eq!(roots.len(), 2);
        assert!((roots[0] + 7.0).abs() < 1e-12 && (roots[1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn zero_polynomial_has_no_isolator() {
        assert!(RootIsolator::new(&RationalPoly::zero(), r(0.0), r(1.0)).is_none());
    }
}
