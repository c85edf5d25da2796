//! Scalar types, deterministic sampling and exact interpolation.
//!
//! All structural computations run over [`Rational`]; the Bethe equation
//! solver and numeric spot checks run over [`ComplexScalar`]. Code that works
//! for both is generic over the [`Scalar`] trait.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::fmt::{Debug, Display};
use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::{Error, Result};

/// Arbitrary precision rational number.
pub type Rational = BigRational;

/// Double precision complex number.
pub type ComplexScalar = num_complex::Complex64;

/// Builds `p/q` as a [`Rational`]. Panics if `q == 0`.
pub fn rat(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

/// Builds the integer `p` as a [`Rational`].
pub fn rat_int(p: i64) -> Rational {
    Rational::from_integer(BigInt::from(p))
}

/// Parses `"p"` or `"p/q"` into a [`Rational`].
pub fn parse_rational(s: &str) -> Result<Rational> {
    let parse_int = |t: &str| -> Result<BigInt> {
        t.trim()
            .parse::<BigInt>()
            .map_err(|_| Error::DimensionMismatch(format!("cannot parse integer `{t}`")))
    };
    match s.split_once('/') {
        None => Ok(Rational::from_integer(parse_int(s)?)),
        Some((p, q)) => {
            let den = parse_int(q)?;
            if den.is_zero() {
                return Err(Error::DimensionMismatch(format!("zero denominator in `{s}`")));
            }
            Ok(Rational::new(parse_int(p)?, den))
        }
    }
}

/// Formats a rational as `p` or `p/q`.
pub fn format_rational(r: &Rational) -> String {
    r.to_string()
}

/// Field scalar used throughout the crate.
pub trait Scalar:
    Clone
    + PartialEq
    + Debug
    + Display
    + Zero
    + One
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + 'static
{
    /// True when arithmetic in this type is exact.
    const EXACT: bool;

    /// Embeds a rational number.
    fn from_rational(r: &Rational) -> Self;

    /// Embeds a small integer.
    fn from_int(n: i64) -> Self {
        Self::from_rational(&rat_int(n))
    }

    /// Magnitude as `f64`, used for pivoting and reporting.
    fn abs_f64(&self) -> f64;

    /// Zero test relative to a scale; exact types ignore the scale.
    fn is_negligible(&self, scale: f64) -> bool {
        if Self::EXACT {
            self.is_zero()
        } else {
            self.abs_f64() <= 1e-12 * scale.max(1.0)
        }
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }

    fn abs_f64(&self) -> f64 {
        self.abs().to_f64().unwrap_or(f64::INFINITY)
    }
}

impl Scalar for ComplexScalar {
    const EXACT: bool = false;

    fn from_rational(r: &Rational) -> Self {
        ComplexScalar::new(r.to_f64().unwrap_or(f64::NAN), 0.0)
    }

    fn abs_f64(&self) -> f64 {
        self.norm()
    }
}

/// Draws `count` distinct rationals with numerator and denominator below
/// 1000, avoiding everything in `excluded`. Deterministic in `seed`.
pub fn sample_points(seed: u64, count: usize, excluded: &[Rational]) -> Vec<Rational> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out: Vec<Rational> = Vec::with_capacity(count);
    while out.len() < count {
        let p: i64 = rng.gen_range(-999..=999);
        let q: i64 = rng.gen_range(1..=16);
        let r = rat(p, q);
        if excluded.contains(&r) || out.contains(&r) {
            continue;
        }
        out.push(r);
    }
    out
}

/// Samples of a rational function with a declared denominator.
///
/// A sampled function `f` is reconstructed as `p(u) / q(u)`: the values store
/// `f` at each point, `denominator_at_points` stores `q` there, and the
/// numerator `p` is interpolated under `numerator_degree_bound`.
#[derive(Debug, Clone)]
pub struct RationalFunctionSample<S> {
    pub points: Vec<Rational>,
    pub values: Vec<S>,
    pub denominator_at_points: Vec<S>,
    pub denominator_degree: usize,
    pub numerator_degree_bound: usize,
}

impl<S: Scalar> RationalFunctionSample<S> {
    /// Evaluates `f` and the denominator at freshly drawn points.
    ///
    /// Points avoid `excluded` (poles of `f`), and at least two extra points
    /// beyond the degree bound are drawn so that the bound can be validated.
    pub fn collect(
        seed: u64,
        excluded: &[Rational],
        denominator_degree: usize,
        numerator_degree_bound: usize,
        mut denominator: impl FnMut(&Rational) -> S,
        mut f: impl FnMut(&Rational) -> Result<S>,
    ) -> Result<Self> {
        let points = sample_points(seed, numerator_degree_bound + 3, excluded);
        let mut values = Vec::with_capacity(points.len());
        let mut denominator_at_points = Vec::with_capacity(points.len());
        for p in &points {
            values.push(f(p)?);
            denominator_at_points.push(denominator(p));
        }
        Ok(Self {
            points,
            values,
            denominator_at_points,
            denominator_degree,
            numerator_degree_bound,
        })
    }
}

/// Recovers the numerator polynomial of a sampled rational function.
///
/// Interpolates `value * denominator` on the first `bound + 1` points and
/// validates the remaining held-out points, returning
/// [`Error::DegreeBoundExceeded`] on any disagreement.
pub fn interpolate_with_known_denominator<S: Scalar>(
    samples: &RationalFunctionSample<S>,
) -> Result<Poly<S>> {
    let bound = samples.numerator_degree_bound;
    if samples.points.len() < bound + 1 {
        return Err(Error::DimensionMismatch(format!(
            "need at least {} sample points, got {}",
            bound + 1,
            samples.points.len()
        )));
    }
    let xs: Vec<S> = samples.points.iter().map(|p| S::from_rational(p)).collect();
    let ws: Vec<S> = samples
        .values
        .iter()
        .zip(&samples.denominator_at_points)
        .map(|(v, d)| v.clone() * d.clone())
        .collect();
    let poly = interpolate_points(&xs[..=bound], &ws[..=bound]);
    let scale = ws.iter().map(|w| w.abs_f64()).fold(1.0_f64, f64::max);
    for i in bound + 1..xs.len() {
        let diff = poly.eval(&xs[i]) - ws[i].clone();
        if !diff.is_negligible(1e4 * scale) {
            return Err(Error::DegreeBoundExceeded { bound });
        }
    }
    Ok(poly)
}

/// Dense univariate polynomial with ascending coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly<S> {
    coeffs: Vec<S>,
}

impl<S: Scalar> Poly<S> {
    pub fn from_coeffs(coeffs: Vec<S>) -> Self {
        let mut p = Self { coeffs };
        p.trim();
        p
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: S) -> Self {
        Self::from_coeffs(vec![c])
    }

    pub fn one() -> Self {
        Self::constant(S::one())
    }

    /// The monomial `c * x^k`.
    pub fn monomial(c: S, k: usize) -> Self {
        let mut coeffs = vec![S::zero(); k + 1];
        coeffs[k] = c;
        Self::from_coeffs(coeffs)
    }

    fn trim(&mut self) {
        while matches!(self.coeffs.last(), Some(c) if c.is_zero()) {
            self.coeffs.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    /// Coefficient of `x^k` (zero beyond the stored length).
    pub fn coeff(&self, k: usize) -> S {
        self.coeffs.get(k).cloned().unwrap_or_else(S::zero)
    }

    pub fn eval(&self, x: &S) -> S {
        let mut acc = S::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x.clone() + c.clone();
        }
        acc
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|i| self.coeff(i) + other.coeff(i)).collect();
        Self::from_coeffs(coeffs)
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|i| self.coeff(i) - other.coeff(i)).collect();
        Self::from_coeffs(coeffs)
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![S::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] = coeffs[i + j].clone() + a.clone() * b.clone();
            }
        }
        Self::from_coeffs(coeffs)
    }

    pub fn scaled(&self, c: &S) -> Self {
        Self::from_coeffs(self.coeffs.iter().map(|a| a.clone() * c.clone()).collect())
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return Self::zero();
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c.clone() * S::from_int(i as i64))
            .collect();
        Self::from_coeffs(coeffs)
    }
}

/// The monic polynomial with the given roots.
pub fn poly_from_roots<S: Scalar>(roots: &[S]) -> Poly<S> {
    let mut p = Poly::one();
    for r in roots {
        p = p.mul(&Poly::from_coeffs(vec![-r.clone(), S::one()]));
    }
    p
}

/// Newton interpolation through `(xs[i], ys[i])`; the points must be distinct.
pub fn interpolate_points<S: Scalar>(xs: &[S], ys: &[S]) -> Poly<S> {
    assert_eq!(xs.len(), ys.len(), "mismatched interpolation data");
    let m = xs.len();
    let mut a = ys.to_vec();
    for j in 1..m {
        for i in (j..m).rev() {
            let num = a[i].clone() - a[i - 1].clone();
            let den = xs[i].clone() - xs[i - j].clone();
            a[i] = num / den;
        }
    }
    let mut p = Poly::zero();
    for i in (0..m).rev() {
        let lin = Poly::from_coeffs(vec![-xs[i].clone(), S::one()]);
        p = p.mul(&lin).add(&Poly::constant(a[i].clone()));
    }
    p
}

/// Truncated power series of `num / den` around 0; `den(0)` must be nonzero.
pub fn series_div<S: Scalar>(num: &Poly<S>, den: &Poly<S>, order: usize) -> Result<Vec<S>> {
    let d0 = den.coeff(0);
    if d0.is_zero() {
        return Err(Error::PoleAtSample("series division by 0 at the origin".into()));
    }
    let mut out: Vec<S> = Vec::with_capacity(order + 1);
    for m in 0..=order {
        let mut acc = num.coeff(m);
        for j in 1..=m {
            acc = acc - den.coeff(j) * out[m - j].clone();
        }
        out.push(acc / d0.clone());
    }
    Ok(out)
}

/// Coefficients `c_0..c_order` of `num/den = sum_m c_m u^{-m}` at infinity.
///
/// Requires `deg num <= deg den` so that the expansion starts at `u^0`.
pub fn laurent_at_infinity<S: Scalar>(
    num: &Poly<S>,
    den: &Poly<S>,
    order: usize,
) -> Result<Vec<S>> {
    let d = den.degree().ok_or_else(|| {
        Error::DimensionMismatch("zero denominator polynomial".into())
    })?;
    if let Some(dn) = num.degree() {
        if dn > d {
            return Err(Error::DegreeBoundExceeded { bound: d });
        }
    }
    let rev = |p: &Poly<S>| -> Poly<S> {
        Poly::from_coeffs((0..=d).map(|i| p.coeff(d - i)).collect())
    };
    series_div(&rev(num), &rev(den), order)
}
