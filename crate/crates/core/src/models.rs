//! Smooth test functions on R^1, R^2 and R^3 with exact partial derivatives.
//!
//! Models are small expression trees. Partials are evaluated from closed
//! forms: probabilists' Hermite polynomials for Gaussians, a Faà di Bruno
//! expansion over the quadratic `1 + |x|^2` for rational models, Leibniz for
//! products and a multinomial sum for Laplacian iterates.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{invalid, Error, Result};

/// Default highest partial order exposed by the builtin smooth models.
pub const DEFAULT_MAX_ORDER: usize = 42;

/// How fast a model decays at infinity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "class", content = "n")]
pub enum DecayClass {
    /// `|f| <= C/|x|`.
    VeryModerate,
    /// `|f| <= C/|x|^n` with `n >= 2`.
    Moderate(u32),
    /// Faster than any power.
    Schwartz,
    /// Bounded but not decaying.
    Bounded,
}

impl DecayClass {
    /// Power guaranteed by the class; `None` for Schwartz decay.
    pub fn power(self) -> Option<f64> {
        match self {
            DecayClass::VeryModerate => Some(1.0),
            DecayClass::Moderate(n) => Some(n as f64),
            DecayClass::Schwartz => None,
            DecayClass::Bounded => Some(0.0),
        }
    }

    fn from_power(p: f64) -> DecayClass {
        if p >= 2.0 {
            DecayClass::Moderate(p.floor() as u32)
        } else if p >= 1.0 {
            DecayClass::VeryModerate
        } else {
            DecayClass::Bounded
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Kind {
    Zero,
    Constant { c: f64 },
    Gaussian { sigma: f64 },
    Rational { c: f64, p: f64 },
    Shift { offset: Vec<f64>, inner: Box<FunctionModel> },
    Product(Box<FunctionModel>, Box<FunctionModel>),
    Laplacian { j: usize, inner: Box<FunctionModel> },
}

/// A smooth function on R^dim with exact partials up to `max_order`.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionModel {
    dim: usize,
    max_order: usize,
    decay: DecayClass,
    kind: Kind,
}

fn check_dim(dim: usize) -> Result<()> {
    if (1..=3).contains(&dim) {
        Ok(())
    } else {
        invalid(format!("dimension must be 1, 2 or 3, got {dim}"))
    }
}

impl FunctionModel {
    pub fn zero(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(FunctionModel { dim, max_order: usize::MAX, decay: DecayClass::Schwartz, kind: Kind::Zero })
    }

    pub fn constant(dim: usize, c: f64) -> Result<Self> {
        check_dim(dim)?;
        if !c.is_finite() {
            return invalid("constant must be finite");
        }
        Ok(FunctionModel { dim, max_order: usize::MAX, decay: DecayClass::Bounded, kind: Kind::Constant { c } })
    }

    /// `exp(-|x|^2 / (2 sigma^2))`.
    pub fn gaussian(dim: usize, sigma: f64) -> Result<Self> {
        check_dim(dim)?;
        if !(sigma > 0.0) || !sigma.is_finite() {
            return invalid(format!("gaussian sigma must be positive, got {sigma}"));
        }
        Ok(FunctionModel {
            dim,
            max_order: DEFAULT_MAX_ORDER,
            decay: DecayClass::Schwartz,
            kind: Kind::Gaussian { sigma },
        })
    }

    /// `c / (1 + |x|^2)^p`.
    pub fn rational(dim: usize, c: f64, p: f64) -> Result<Self> {
        check_dim(dim)?;
        if !c.is_finite() || !(p > 0.0) || !p.is_finite() {
            return invalid(format!("rational model needs finite c and p > 0, got c={c}, p={p}"));
        }
        Ok(FunctionModel {
            dim,
            max_order: DEFAULT_MAX_ORDER,
            decay: DecayClass::from_power(2.0 * p),
            kind: Kind::Rational { c, p },
        })
    }

    /// `x -> inner(x - offset)`.
    pub fn shift(offset: Vec<f64>, inner: FunctionModel) -> Result<Self> {
        if offset.len() != inner.dim {
            return invalid(format!("shift has {} components for a {}-dimensional model", offset.len(), inner.dim));
        }
        if offset.iter().any(|v| !v.is_finite()) {
            return invalid("shift offset must be finite");
        }
        Ok(FunctionModel {
            dim: inner.dim,
            max_order: inner.max_order,
            decay: inner.decay,
            kind: Kind::Shift { offset, inner: Box::new(inner) },
        })
    }

    /// Pointwise product.
    pub fn product(a: FunctionModel, b: FunctionModel) -> Result<Self> {
        if a.dim != b.dim {
            return invalid(format!("product of {}- and {}-dimensional models", a.dim, b.dim));
        }
        let decay = match (a.decay, b.decay) {
            (DecayClass::Schwartz, _) | (_, DecayClass::Schwartz) => DecayClass::Schwartz,
            (x, y) => DecayClass::from_power(x.power().unwrap_or(0.0) + y.power().unwrap_or(0.0)),
        };
        Ok(FunctionModel {
            dim: a.dim,
            max_order: a.max_order.min(b.max_order),
            decay,
            kind: Kind::Product(Box::new(a), Box::new(b)),
        })
    }

    /// The same model with a lower declared partial order.
    pub fn with_max_order(mut self, order: usize) -> Self {
        self.max_order = self.max_order.min(order);
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }

    pub fn decay_class(&self) -> DecayClass {
        self.decay
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.kind, Kind::Zero)
    }

    /// Whether the model factors as a product of one-dimensional functions.
    pub fn is_separable(&self) -> bool {
        match &self.kind {
            Kind::Zero | Kind::Constant { .. } | Kind::Gaussian { .. } => true,
            Kind::Rational { .. } => self.dim == 1,
            Kind::Shift { inner, .. } => inner.is_separable(),
            Kind::Product(a, b) => a.is_separable() && b.is_separable(),
            Kind::Laplacian { j, inner } => *j == 0 || (self.dim == 1 && inner.is_separable()),
        }
    }

    pub fn value(&self, x: &[f64]) -> Result<f64> {
        self.partial(&vec![0; self.dim], x)
    }

    /// `∂^idx f(x)`.
    pub fn partial(&self, idx: &[usize], x: &[f64]) -> Result<f64> {
        if idx.len() != self.dim || x.len() != self.dim {
            return invalid(format!(
                "expected {}-dimensional index and point, got {} and {}",
                self.dim,
                idx.len(),
                x.len()
            ));
        }
        let order: usize = idx.iter().sum();
        if order > self.max_order {
            return Err(Error::OrderOverflow { requested: order, available: self.max_order });
        }
        if x.iter().any(|v| !v.is_finite()) {
            return invalid("evaluation point must be finite");
        }
        Ok(self.partial_unchecked(idx, x))
    }

    pub(crate) fn partial_unchecked(&self, idx: &[usize], x: &[f64]) -> f64 {
        match &self.kind {
            Kind::Zero => 0.0,
            Kind::Constant { c } => {
                if idx.iter().all(|&i| i == 0) {
                    *c
                } else {
                    0.0
                }
            }
            Kind::Gaussian { sigma } => idx
                .iter()
                .zip(x)
                .map(|(&k, &xi)| gaussian_derivative(k, xi, *sigma))
                .product(),
            Kind::Rational { c, p } => rational_partial(*c, *p, idx, x),
            Kind::Shift { offset, inner } => {
                let y: Vec<f64> = x.iter().zip(offset).map(|(a, b)| a - b).collect();
                inner.partial_unchecked(idx, &y)
            }
            Kind::Product(a, b) => leibniz(a, b, idx, x),
            Kind::Laplacian { j, inner } => laplacian_partial(inner, *j, idx, x),
        }
    }
}

/// `d^k/dx^k exp(-x^2/(2 sigma^2)) = (-1/sigma)^k He_k(x/sigma) exp(-x^2/(2 sigma^2))`.
pub fn gaussian_derivative(k: usize, x: f64, sigma: f64) -> f64 {
    let u = x / sigma;
    let (mut prev, mut cur) = (0.0, 1.0);
    for i in 0..k {
        let next = u * cur - i as f64 * prev;
        prev = cur;
        cur = next;
    }
    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
    sign * cur * sigma.powi(-(k as i32)) * (-0.5 * u * u).exp()
}

fn factorial(k: usize) -> f64 {
    (1..=k).fold(1.0, |acc, i| acc * i as f64)
}

/// Partials of `c u^{-p}` with `u = 1 + |x|^2`:
/// `∂^α F(u) = Σ_{j <= α/2} Π_i α_i!/(j_i! (α_i - 2j_i)!) (2x_i)^{α_i - 2j_i} F^{(|α| - |j|)}(u)`.
fn rational_partial(c: f64, p: f64, idx: &[usize], x: &[f64]) -> f64 {
    let u = 1.0 + x.iter().map(|v| v * v).sum::<f64>();
    let total: usize = idx.iter().sum();
    // F^{(q)}(u) = c (-p)(-p-1)...(-p-q+1) u^{-p-q}
    let mut fq = Vec::with_capacity(total + 1);
    let mut fall = c;
    for q in 0..=total {
        fq.push(fall * u.powf(-p - q as f64));
        fall *= -p - q as f64;
    }
    // Per-axis factors indexed by j_i.
    let factors: Vec<Vec<f64>> = idx
        .iter()
        .zip(x)
        .map(|(&a, &xi)| {
            (0..=a / 2)
                .map(|j| factorial(a) / (factorial(j) * factorial(a - 2 * j)) * (2.0 * xi).powi((a - 2 * j) as i32))
                .collect()
        })
        .collect();
    let mut sum = 0.0;
    let mut j = vec![0usize; idx.len()];
    loop {
        let coef: f64 = factors.iter().zip(&j).map(|(f, &ji)| f[ji]).product();
        let jt: usize = j.iter().sum();
        sum += coef * fq[total - jt];
        // advance the multi-index odometer
        let mut axis = 0;
        loop {
            if axis == j.len() {
                return sum;
            }
            if j[axis] < idx[axis] / 2 {
                j[axis] += 1;
                break;
            }
            j[axis] = 0;
            axis += 1;
        }
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    factorial(n) / (factorial(k) * factorial(n - k))
}

/// Calls `f` with every multi-index `beta <= idx` (componentwise).
fn for_each_sub_index(idx: &[usize], mut f: impl FnMut(&[usize])) {
    let mut beta = vec![0usize; idx.len()];
    loop {
        f(&beta);
        let mut axis = 0;
        loop {
            if axis == beta.len() {
                return;
            }
            if beta[axis] < idx[axis] {
                beta[axis] += 1;
                break;
            }
            beta[axis] = 0;
            axis += 1;
        }
    }
}

fn leibniz(a: &FunctionModel, b: &FunctionModel, idx: &[usize], x: &[f64]) -> f64 {
    let mut sum = 0.0;
    for_each_sub_index(idx, |beta| {
        let rest: Vec<usize> = idx.iter().zip(beta).map(|(i, b)| i - b).collect();
        let coef: f64 = idx.iter().zip(beta).map(|(&i, &b)| binomial(i, b)).product();
        sum += coef * a.partial_unchecked(beta, x) * b.partial_unchecked(&rest, x);
    });
    sum
}

/// `∂^α (∇²)^j f = Σ_{|k| = j} j!/Π k_i! ∂^{α + 2k} f`.
fn laplacian_partial(inner: &FunctionModel, j: usize, idx: &[usize], x: &[f64]) -> f64 {
    let dim = idx.len();
    let mut sum = 0.0;
    let mut k = vec![0usize; dim];
    let mut visit = |k: &[usize]| {
        let coef = factorial(j) / k.iter().map(|&v| factorial(v)).product::<f64>();
        let shifted: Vec<usize> = idx.iter().zip(k).map(|(a, b)| a + 2 * b).collect();
        sum += coef * inner.partial_unchecked(&shifted, x);
    };
    match dim {
        1 => visit(&[j]),
        2 => {
            for a in 0..=j {
                visit(&[a, j - a]);
            }
        }
        _ => {
            for a in 0..=j {
                for b in 0..=j - a {
                    k[0] = a;
                    k[1] = b;
                    k[2] = j - a - b;
                    visit(&k);
                }
            }
        }
    }
    sum
}

/// The model `(∇²)^j f`.
pub fn laplacian_iterate(model: &FunctionModel, j: usize) -> Result<FunctionModel> {
    if j == 0 {
        return Ok(model.clone());
    }
    if 2 * j > model.max_order {
        return Err(Error::OrderOverflow { requested: 2 * j, available: model.max_order });
    }
    let decay = match model.decay {
        DecayClass::Schwartz => DecayClass::Schwartz,
        _ => DecayClass::from_power((2 * j + 1) as f64),
    };
    Ok(FunctionModel {
        dim: model.dim,
        max_order: model.max_order - 2 * j,
        decay,
        kind: Kind::Laplacian { j, inner: Box::new(model.clone()) },
    })
}

/// Result of probing `|f(x)| <= C/|x|^n` along random rays.
#[derive(Debug, Clone, Serialize)]
pub struct DecayProbe {
    pub n: u32,
    /// Largest observed `|f| |x|^n` over all rays and radii.
    pub fitted_c: f64,
    /// Largest log-log slope of `|f| |x|^n` over the outermost decade.
    pub outer_slope: f64,
    pub pass: bool,
}

const PROBE_RAYS: usize = 8;
const PROBE_SLOPE_LIMIT: f64 = 0.1;

/// Check that `|f| |x|^n` stays bounded along seeded random rays.
pub fn decay_probe(model: &FunctionModel, n: u32, radii: &[f64]) -> Result<DecayProbe> {
    if radii.len() < 2 || radii.windows(2).any(|w| !(w[1] > w[0])) {
        return invalid("radii must be strictly increasing with at least two entries");
    }
    let r_max = *radii.last().expect("nonempty");
    if r_max < 1e3 {
        return invalid(format!("largest probe radius must be at least 1e3, got {r_max}"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut fitted_c: f64 = 0.0;
    let mut outer_slope = f64::NEG_INFINITY;
    for _ in 0..PROBE_RAYS {
        let dir = random_unit(&mut rng, model.dim);
        let scaled: Vec<(f64, f64)> = radii
            .iter()
            .map(|&r| {
                let x: Vec<f64> = dir.iter().map(|d| d * r).collect();
                let v = model.value(&x).map(f64::abs);
                v.map(|v| (r, v * r.powi(n as i32)))
            })
            .collect::<Result<_>>()?;
        for &(_, v) in &scaled {
            fitted_c = fitted_c.max(v);
        }
        let outer: Vec<(f64, f64)> = scaled
            .iter()
            .copied()
            .filter(|&(r, v)| r >= r_max / 10.0 && v > 0.0)
            .collect();
        // Values that underflow to zero have certainly decayed.
        if outer.len() >= 2 {
            let slope = crate::fit::loglog_slope(&outer).unwrap_or(0.0);
            outer_slope = outer_slope.max(slope);
        }
    }
    if outer_slope == f64::NEG_INFINITY {
        outer_slope = 0.0;
    }
    Ok(DecayProbe { n, fitted_c, outer_slope, pass: outer_slope <= PROBE_SLOPE_LIMIT && fitted_c.is_finite() })
}

pub(crate) fn random_unit(rng: &mut impl Rng, dim: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        if norm > 1e-3 && norm <= 1.0 {
            return v.iter().map(|a| a / norm).collect();
        }
    }
}

// ---------------------------------------------------------------------------
// Text form: name{key=value,...}(submodel,...)

impl fmt::Display for FunctionModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let order = if self.max_order != DEFAULT_MAX_ORDER && self.max_order != usize::MAX {
            Some(self.max_order)
        } else {
            None
        };
        let order_suffix = |f: &mut fmt::Formatter<'_>, first: bool| -> fmt::Result {
            match order {
                Some(o) if first => write!(f, "order={o}"),
                Some(o) => write!(f, ",order={o}"),
                None => Ok(()),
            }
        };
        match &self.kind {
            Kind::Zero => write!(f, "zero"),
            Kind::Constant { c } => write!(f, "constant{{c={c}}}"),
            Kind::Gaussian { sigma } => {
                write!(f, "gaussian{{sigma={sigma}")?;
                order_suffix(f, false)?;
                write!(f, "}}")
            }
            Kind::Rational { c, p } => {
                write!(f, "rational{{c={c},p={p}")?;
                order_suffix(f, false)?;
                write!(f, "}}")
            }
            Kind::Shift { offset, inner } => {
                let names = ["x", "y", "z"];
                let parts: Vec<String> = offset.iter().zip(names).map(|(v, n)| format!("{n}={v}")).collect();
                write!(f, "shift{{{}}}({inner})", parts.join(","))
            }
            Kind::Product(a, b) => write!(f, "product({a},{b})"),
            Kind::Laplacian { j, inner } => write!(f, "laplacian{{j={j}}}({inner})"),
        }
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, msg: &str) -> Result<T> {
        Err(Error::Parse(format!("{msg} at offset {} in model '{}'", self.pos, self.src)))
    }

    fn skip_ws(&mut self) {
        while self.src[self.pos..].starts_with(char::is_whitespace) {
            self.pos += 1;
        }
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.src[self.pos..].starts_with(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn token(&mut self) -> &'a str {
        self.skip_ws();
        let rest = &self.src[self.pos..];
        let len = rest
            .find(|c: char| !(c.is_ascii_alphanumeric() || matches!(c, '_' | '.' | '-' | '+')))
            .unwrap_or(rest.len());
        self.pos += len;
        &rest[..len]
    }

    fn model(&mut self, dim: usize) -> Result<FunctionModel> {
        let name = self.token().to_ascii_lowercase();
        if name.is_empty() {
            return self.err("expected a model name");
        }
        let mut params: Vec<(String, f64)> = Vec::new();
        if self.eat('{') {
            if !self.eat('}') {
                loop {
                    let key = self.token().to_ascii_lowercase();
                    if !self.eat('=') {
                        return self.err("expected '='");
                    }
                    let raw = self.token();
                    let Ok(v) = raw.parse::<f64>() else {
                        return self.err(&format!("'{raw}' is not a number"));
                    };
                    params.push((key, v));
                    if self.eat('}') {
                        break;
                    }
                    if !self.eat(',') {
                        return self.err("expected ',' or '}'");
                    }
                }
            }
        }
        let mut subs = Vec::new();
        if self.eat('(') {
            loop {
                subs.push(self.model(dim)?);
                if self.eat(')') {
                    break;
                }
                if !self.eat(',') {
                    return self.err("expected ',' or ')'");
                }
            }
        }
        let mut take = |key: &str| -> Option<f64> {
            let i = params.iter().position(|(k, _)| k == key)?;
            Some(params.remove(i).1)
        };
        let order = take("order");
        let model = match name.as_str() {
            "zero" => FunctionModel::zero(dim)?,
            "constant" => FunctionModel::constant(dim, take("c").unwrap_or(1.0))?,
            "gaussian" => FunctionModel::gaussian(dim, take("sigma").unwrap_or(1.0))?,
            "rational" => FunctionModel::rational(dim, take("c").unwrap_or(1.0), take("p").unwrap_or(1.0))?,
            "shift" => {
                let offset: Vec<f64> = ["x", "y", "z"][..dim].iter().map(|k| take(k).unwrap_or(0.0)).collect();
                let [inner] = <[FunctionModel; 1]>::try_from(std::mem::take(&mut subs))
                    .map_err(|_| Error::Parse("shift takes exactly one submodel".into()))?;
                FunctionModel::shift(offset, inner)?
            }
            "product" => {
                if subs.len() < 2 {
                    return self.err("product takes at least two submodels");
                }
                let mut it = std::mem::take(&mut subs).into_iter();
                let first = it.next().expect("nonempty");
                it.try_fold(first, FunctionModel::product)?
            }
            "laplacian" => {
                let j = take("j").unwrap_or(1.0);
                let [inner] = <[FunctionModel; 1]>::try_from(std::mem::take(&mut subs))
                    .map_err(|_| Error::Parse("laplacian takes exactly one submodel".into()))?;
                laplacian_iterate(&inner, j as usize)?
            }
            other => return self.err(&format!("unknown model '{other}'")),
        };
        if let Some((k, _)) = params.first() {
            return self.err(&format!("unknown parameter '{k}' for {name}"));
        }
        if !subs.is_empty() {
            return self.err(&format!("{name} takes no submodels"));
        }
        Ok(match order {
            Some(o) if o >= 0.0 => model.with_max_order(o as usize),
            Some(_) => return self.err("order must be non-negative"),
            None => model,
        })
    }
}

impl FunctionModel {
    /// Parse `name{key=value,...}(submodels)`, e.g. `gaussian{sigma=1}`,
    /// `rational{c=1,p=6}`, `shift{x=0.5}(gaussian)`,
    /// `product(gaussian,rational{p=2})`.
    pub fn parse(text: &str, dim: usize) -> Result<FunctionModel> {
        check_dim(dim)?;
        let mut p = Parser { src: text, pos: 0 };
        let model = p.model(dim)?;
        p.skip_ws();
        if p.pos != text.len() {
            return p.err("trailing input");
        }
        Ok(model)
    }
}
