//! Taylor jets and differential operators with variable coefficients.
//!
//! A jet stores the leading Taylor coefficients of a function at a fixed
//! base point. Differential operators carry one jet per power of `d/du`,
//! and composition follows the Leibniz rule, so products of operators
//! with rational coefficients can be evaluated exactly at a sample point
//! without symbolic algebra. Jets lose one order per differentiation;
//! callers allocate enough orders up front for the compositions they
//! plan to perform.

use crate::linalg::Matrix;
use crate::scalars::Scalar;

/// Truncated Taylor expansion with values in a coefficient ring.
pub trait Jet: Clone {
    fn add(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    /// Drops one order; panics when no order is left.
    fn derivative(&self) -> Self;
    fn scaled_int(&self, k: i64) -> Self;
    fn order(&self) -> usize;
}

/// Scalar-valued jet; entry `m` is the coefficient of `h^m` in the
/// expansion at `u0 + h`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarJet<S> {
    coeffs: Vec<S>,
}

impl<S: Scalar> ScalarJet<S> {
    pub fn from_coeffs(coeffs: Vec<S>) -> Self {
        assert!(!coeffs.is_empty(), "a jet needs at least the value");
        Self { coeffs }
    }

    pub fn constant(value: S, order: usize) -> Self {
        let mut coeffs = vec![S::zero(); order + 1];
        coeffs[0] = value;
        Self { coeffs }
    }

    /// Jet of the identity function `u` at base point `u0`.
    pub fn variable(u0: S, order: usize) -> Self {
        let mut coeffs = vec![S::zero(); order + 1];
        coeffs[0] = u0;
        if order >= 1 {
            coeffs[1] = S::one();
        }
        Self { coeffs }
    }

    /// Jet of `1/(u - z)` at base point `u0`.
    pub fn reciprocal_linear(u0: &S, z: &S, order: usize) -> crate::Result<Self> {
        let base = u0.clone() - z.clone();
        if base.is_zero() {
            return Err(crate::Error::PoleAtSample(format!("{u0}")));
        }
        let inv = S::one() / base;
        let mut coeffs = Vec::with_capacity(order + 1);
        let mut current = inv.clone();
        for m in 0..=order {
            coeffs.push(current.clone());
            if m < order {
                current = -(current * inv.clone());
            }
        }
        Ok(Self { coeffs })
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    pub fn value(&self) -> &S {
        &self.coeffs[0]
    }

    pub fn scaled(&self, c: &S) -> Self {
        Self { coeffs: self.coeffs.iter().map(|x| x.clone() * c.clone()).collect() }
    }
}

impl<S: Scalar> Jet for ScalarJet<S> {
    fn add(&self, other: &Self) -> Self {
        let len = self.coeffs.len().min(other.coeffs.len());
        Self {
            coeffs: (0..len)
                .map(|m| self.coeffs[m].clone() + other.coeffs[m].clone())
                .collect(),
        }
    }

    fn mul(&self, other: &Self) -> Self {
        let len = self.coeffs.len().min(other.coeffs.len());
        let mut coeffs = vec![S::zero(); len];
        for (i, a) in self.coeffs.iter().take(len).enumerate() {
            for (j, b) in other.coeffs.iter().take(len - i).enumerate() {
                coeffs[i + j] = coeffs[i + j].clone() + a.clone() * b.clone();
            }
        }
        Self { coeffs }
    }

    fn neg(&self) -> Self {
        Self { coeffs: self.coeffs.iter().map(|x| -x.clone()).collect() }
    }

    fn derivative(&self) -> Self {
        assert!(
            self.coeffs.len() > 1,
            "jet exhausted: allocate more orders before differentiating"
        );
        Self {
            coeffs: self
                .coeffs
                .iter()
                .skip(1)
                .enumerate()
                .map(|(m, c)| c.clone() * S::from_int(m as i64 + 1))
                .collect(),
        }
    }

    fn scaled_int(&self, k: i64) -> Self {
        let factor = S::from_int(k);
        Self { coeffs: self.coeffs.iter().map(|x| x.clone() * factor.clone()).collect() }
    }

    fn order(&self) -> usize {
        self.coeffs.len() - 1
    }
}

/// Matrix-valued jet with the same coefficient conventions as
/// [`ScalarJet`].
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixJet<S> {
    coeffs: Vec<Matrix<S>>,
}

impl<S: Scalar> MatrixJet<S> {
    pub fn from_coeffs(coeffs: Vec<Matrix<S>>) -> Self {
        assert!(!coeffs.is_empty(), "a jet needs at least the value");
        Self { coeffs }
    }

    pub fn constant(value: Matrix<S>, order: usize) -> Self {
        let dim = value.rows();
        let mut coeffs = vec![Matrix::zeros(dim, dim); order + 1];
        coeffs[0] = value;
        Self { coeffs }
    }

    pub fn zero(dim: usize, order: usize) -> Self {
        Self { coeffs: vec![Matrix::zeros(dim, dim); order + 1] }
    }

    pub fn coeffs(&self) -> &[Matrix<S>] {
        &self.coeffs
    }

    pub fn value(&self) -> &Matrix<S> {
        &self.coeffs[0]
    }

    pub fn dim(&self) -> usize {
        self.coeffs[0].rows()
    }

    /// Multiplies every Taylor order by a scalar jet.
    pub fn scale_by(&self, scalar: &ScalarJet<S>) -> Self {
        let len = self.coeffs.len().min(scalar.coeffs().len());
        let dim = self.dim();
        let mut coeffs = vec![Matrix::zeros(dim, dim); len];
        for (i, a) in scalar.coeffs().iter().take(len).enumerate() {
            for (j, b) in self.coeffs.iter().take(len - i).enumerate() {
                coeffs[i + j] = coeffs[i + j].add(&b.scaled(a));
            }
        }
        Self { coeffs }
    }

    pub fn map_coeffs(&self, f: impl Fn(&Matrix<S>) -> Matrix<S>) -> Self {
        Self { coeffs: self.coeffs.iter().map(f).collect() }
    }

    pub fn scaled(&self, c: &S) -> Self {
        Self { coeffs: self.coeffs.iter().map(|m| m.scaled(c)).collect() }
    }
}

impl<S: Scalar> Jet for MatrixJet<S> {
    fn add(&self, other: &Self) -> Self {
        let len = self.coeffs.len().min(other.coeffs.len());
        Self {
            coeffs: (0..len).map(|m| self.coeffs[m].add(&other.coeffs[m])).collect(),
        }
    }

    fn mul(&self, other: &Self) -> Self {
        let len = self.coeffs.len().min(other.coeffs.len());
        let dim = self.dim();
        let mut coeffs = vec![Matrix::zeros(dim, dim); len];
        for (i, a) in self.coeffs.iter().take(len).enumerate() {
            for (j, b) in other.coeffs.iter().take(len - i).enumerate() {
                coeffs[i + j] = coeffs[i + j].add(&a.matmul(b));
            }
        }
        Self { coeffs }
    }

    fn neg(&self) -> Self {
        Self { coeffs: self.coeffs.iter().map(|m| m.scaled(&-S::one())).collect() }
    }

    fn derivative(&self) -> Self {
        assert!(
            self.coeffs.len() > 1,
            "jet exhausted: allocate more orders before differentiating"
        );
        Self {
            coeffs: self
                .coeffs
                .iter()
                .skip(1)
                .enumerate()
                .map(|(m, c)| c.scaled(&S::from_int(m as i64 + 1)))
                .collect(),
        }
    }

    fn scaled_int(&self, k: i64) -> Self {
        let factor = S::from_int(k);
        Self { coeffs: self.coeffs.iter().map(|m| m.scaled(&factor)).collect() }
    }

    fn order(&self) -> usize {
        self.coeffs.len() - 1
    }
}

/// Differential operator `sum_j coeffs[j] (d/du)^j` with jet-valued
/// coefficients, stored by ascending power.
#[derive(Debug, Clone)]
pub struct DiffOp<J> {
    coeffs: Vec<J>,
}

impl<J: Jet> DiffOp<J> {
    pub fn from_coeffs(coeffs: Vec<J>) -> Self {
        assert!(!coeffs.is_empty(), "an operator needs at least order zero");
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[J] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n)
            .map(|j| match (self.coeffs.get(j), other.coeffs.get(j)) {
                (Some(a), Some(b)) => a.add(b),
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => unreachable!(),
            })
            .collect();
        Self { coeffs }
    }

    pub fn neg(&self) -> Self {
        Self { coeffs: self.coeffs.iter().map(Jet::neg).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    /// Operator composition `self . other` via the Leibniz rule:
    /// `(A d^j)(B d^k) = sum_s C(j,s) A B^{(s)} d^{j+k-s}`.
    pub fn compose(&self, other: &Self) -> Self {
        let deg = self.degree() + other.degree();
        let mut out: Vec<Option<J>> = vec![None; deg + 1];
        for (j, a) in self.coeffs.iter().enumerate() {
            for (k, b) in other.coeffs.iter().enumerate() {
                let mut b_deriv = b.clone();
                for s in 0..=j {
                    let term = a.mul(&b_deriv).scaled_int(binomial(j, s));
                    let slot = j + k - s;
                    out[slot] = Some(match out[slot].take() {
                        Some(acc) => acc.add(&term),
                        None => term,
                    });
                    if s < j {
                        b_deriv = b_deriv.derivative();
                    }
                }
            }
        }
        Self {
            coeffs: out
                .into_iter()
                .map(|c| c.expect("every order receives a contribution"))
                .collect(),
        }
    }
}

fn binomial(n: usize, k: usize) -> i64 {
    let mut value = 1i64;
    for i in 0..k {
        value = value * (n - i) as i64 / (i + 1) as i64;
    }
    value
}
