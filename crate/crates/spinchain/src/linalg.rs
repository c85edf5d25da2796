//! Dense matrices over an exact or floating scalar, with the tensor-leg
//! helpers used to build operators on chains of modules.
//!
//! Basis convention for tensor products: `kron(A, B)` treats the first factor
//! as the most significant digit, so a flat index on dims `[d0, d1, ..]` is
//! `i0 * d1 * d2 * .. + i1 * d2 * .. + ..`.

use crate::scalars::{Poly, Scalar};
use num_traits::Zero;

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: Scalar> Matrix<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![S::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, S::one());
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<S>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Self { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, i: usize, j: usize) -> &S {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: S) {
        self.data[i * self.cols + j] = v;
    }

    pub fn add_at(&mut self, i: usize, j: usize, v: S) {
        let idx = i * self.cols + j;
        self.data[idx] = self.data[idx].clone() + v;
    }

    pub fn row(&self, i: usize) -> &[S] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn cast_from(m: &Matrix<crate::scalars::Rational>) -> Self {
        Matrix::from_fn(m.rows(), m.cols(), |i, j| S::from_rational(m.at(i, j)))
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.at(j, i).clone())
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch in add");
        Self::from_fn(self.rows, self.cols, |i, j| self.at(i, j).clone() + other.at(i, j).clone())
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch in sub");
        Self::from_fn(self.rows, self.cols, |i, j| self.at(i, j).clone() - other.at(i, j).clone())
    }

    pub fn scaled(&self, c: &S) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| self.at(i, j).clone() * c.clone())
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "shape mismatch in matmul");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.at(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    out.add_at(i, j, a.clone() * b.clone());
                }
            }
        }
        out
    }

    pub fn kron(&self, other: &Self) -> Self {
        let mut out = Self::zeros(self.rows * other.rows, self.cols * other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.at(i, j);
                if a.is_zero() {
                    continue;
                }
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        out.set(
                            i * other.rows + k,
                            j * other.cols + l,
                            a.clone() * other.at(k, l).clone(),
                        );
                    }
                }
            }
        }
        out
    }

    pub fn trace(&self) -> S {
        assert_eq!(self.rows, self.cols, "trace of a non-square matrix");
        let mut acc = S::zero();
        for i in 0..self.rows {
            acc = acc + self.at(i, i).clone();
        }
        acc
    }

    pub fn apply(&self, v: &[S]) -> Vec<S> {
        assert_eq!(self.cols, v.len(), "shape mismatch in apply");
        let mut out = vec![S::zero(); self.rows];
        for i in 0..self.rows {
            let mut acc = S::zero();
            for j in 0..self.cols {
                let a = self.at(i, j);
                if !a.is_zero() {
                    acc = acc + a.clone() * v[j].clone();
                }
            }
            out[i] = acc;
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(Scalar::abs_f64).fold(0.0, f64::max)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn commutator(&self, other: &Self) -> Self {
        self.matmul(other).sub(&other.matmul(self))
    }

    /// Reduced row echelon form together with the pivot column list.
    pub fn rref(&self) -> (Self, Vec<usize>) {
        let mut m = self.clone();
        let scale = m.max_abs();
        let mut pivots = Vec::new();
        let mut r = 0;
        for col in 0..m.cols {
            if r == m.rows {
                break;
            }
            let pivot_row = if S::EXACT {
                (r..m.rows).find(|&i| !m.at(i, col).is_zero())
            } else {
                (r..m.rows)
                    .filter(|&i| !m.at(i, col).is_negligible(scale))
                    .max_by(|&a, &b| {
                        m.at(a, col)
                            .abs_f64()
                            .partial_cmp(&m.at(b, col).abs_f64())
                            .unwrap_or(std::cmp::Ordering::Equal)
                    })
            };
            let Some(p) = pivot_row else { continue };
            m.swap_rows(r, p);
            let inv = S::one() / m.at(r, col).clone();
            for j in col..m.cols {
                let v = m.at(r, j).clone() * inv.clone();
                m.set(r, j, v);
            }
            for i in 0..m.rows {
                if i == r || m.at(i, col).is_zero() {
                    continue;
                }
                let f = m.at(i, col).clone();
                for j in col..m.cols {
                    let v = m.at(i, j).clone() - f.clone() * m.at(r, j).clone();
                    m.set(i, j, v);
                }
            }
            pivots.push(col);
            r += 1;
        }
        (m, pivots)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Canonical basis of the right nullspace, one vector per free column.
    pub fn nullspace(&self) -> Vec<Vec<S>> {
        let (r, pivots) = self.rref();
        let mut basis = Vec::new();
        for free in 0..self.cols {
            if pivots.contains(&free) {
                continue;
            }
            let mut v = vec![S::zero(); self.cols];
            v[free] = S::one();
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = -r.at(row, free).clone();
            }
            basis.push(v);
        }
        basis
    }

    /// Solves `self * X = rhs` exactly, or returns `None` if inconsistent.
    pub fn solve(&self, rhs: &Self) -> Option<Self> {
        assert_eq!(self.rows, rhs.rows, "shape mismatch in solve");
        let aug = Self::from_fn(self.rows, self.cols + rhs.cols, |i, j| {
            if j < self.cols {
                self.at(i, j).clone()
            } else {
                rhs.at(i, j - self.cols).clone()
            }
        });
        let (r, pivots) = aug.rref();
        if pivots.iter().any(|&c| c >= self.cols) {
            return None;
        }
        let mut x = Self::zeros(self.cols, rhs.cols);
        for (row, &pc) in pivots.iter().enumerate() {
            for j in 0..rhs.cols {
                x.set(pc, j, r.at(row, self.cols + j).clone());
            }
        }
        Some(x)
    }

    pub fn solve_vec(&self, b: &[S]) -> Option<Vec<S>> {
        let rhs = Self::from_fn(b.len(), 1, |i, _| b[i].clone());
        self.solve(&rhs).map(|x| (0..self.cols).map(|i| x.at(i, 0).clone()).collect())
    }

    pub fn inverse(&self) -> Option<Self> {
        assert_eq!(self.rows, self.cols, "inverse of a non-square matrix");
        let x = self.solve(&Self::identity(self.rows))?;
        if x.matmul(self) == Self::identity(self.rows) || !S::EXACT {
            Some(x)
        } else {
            None
        }
    }

    pub fn det(&self) -> S {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let mut m = self.clone();
        let scale = m.max_abs();
        let mut det = S::one();
        for col in 0..m.cols {
            let pivot = (col..m.rows).find(|&i| {
                if S::EXACT {
                    !m.at(i, col).is_zero()
                } else {
                    !m.at(i, col).is_negligible(scale)
                }
            });
            let Some(p) = pivot else { return S::zero() };
            if p != col {
                m.swap_rows(col, p);
                det = -det;
            }
            let d = m.at(col, col).clone();
            det = det * d.clone();
            let inv = S::one() / d;
            for i in col + 1..m.rows {
                if m.at(i, col).is_zero() {
                    continue;
                }
                let f = m.at(i, col).clone() * inv.clone();
                for j in col..m.cols {
                    let v = m.at(i, j).clone() - f.clone() * m.at(col, j).clone();
                    m.set(i, j, v);
                }
            }
        }
        det
    }

    /// Characteristic polynomial `det(x - M)` via the Faddeev-LeVerrier
    /// recursion, exact over rational scalars.
    pub fn char_poly(&self) -> Poly<S> {
        assert_eq!(self.rows, self.cols, "characteristic polynomial needs a square matrix");
        let n = self.rows;
        let mut coeffs = vec![S::zero(); n + 1];
        coeffs[n] = S::one();
        let mut b = Self::identity(n);
        for k in 1..=n {
            let ab = self.matmul(&b);
            let c = -(ab.trace() / S::from_int(k as i64));
            coeffs[n - k] = c.clone();
            b = ab.add(&Self::identity(n).scaled(&c));
        }
        Poly::from_coeffs(coeffs)
    }
}

/// Standard basis vector `e_i` of length `n`.
pub fn unit_vector<S: Scalar>(n: usize, i: usize) -> Vec<S> {
    let mut v = vec![S::zero(); n];
    v[i] = S::one();
    v
}

pub fn vec_sub<S: Scalar>(a: &[S], b: &[S]) -> Vec<S> {
    assert_eq!(a.len(), b.len(), "length mismatch");
    a.iter().zip(b).map(|(x, y)| x.clone() - y.clone()).collect()
}

pub fn vec_scaled<S: Scalar>(a: &[S], c: &S) -> Vec<S> {
    a.iter().map(|x| x.clone() * c.clone()).collect()
}

pub fn vec_add<S: Scalar>(a: &[S], b: &[S]) -> Vec<S> {
    assert_eq!(a.len(), b.len(), "length mismatch");
    a.iter().zip(b).map(|(x, y)| x.clone() + y.clone()).collect()
}

pub fn vec_max_abs<S: Scalar>(a: &[S]) -> f64 {
    a.iter().map(Scalar::abs_f64).fold(0.0, f64::max)
}

pub fn vec_is_zero<S: Scalar>(a: &[S]) -> bool {
    a.iter().all(Zero::is_zero)
}

/// Elementary matrix `E_{ab}` (1-based indices) in dimension `n`.
pub fn elementary<S: Scalar>(n: usize, a: usize, b: usize) -> Matrix<S> {
    let mut m = Matrix::zeros(n, n);
    m.set(a - 1, b - 1, S::one());
    m
}

fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        s[i] = s[i + 1] * dims[i + 1];
    }
    s
}

fn leg_offsets(dims: &[usize], legs: &[usize]) -> (Vec<usize>, Vec<usize>) {
    let st = strides(dims);
    let leg_dims: Vec<usize> = legs.iter().map(|&l| dims[l]).collect();
    let op_dim: usize = leg_dims.iter().product();
    let mut offsets = Vec::with_capacity(op_dim);
    for mut idx in 0..op_dim {
        let mut off = 0;
        for pos in (0..legs.len()).rev() {
            off += (idx % leg_dims[pos]) * st[legs[pos]];
            idx /= leg_dims[pos];
        }
        offsets.push(off);
    }
    let total: usize = dims.iter().product();
    let mut rest = Vec::with_capacity(total / op_dim.max(1));
    'outer: for base in 0..total {
        for &l in legs {
            if (base / st[l]) % dims[l] != 0 {
                continue 'outer;
            }
        }
        rest.push(base);
    }
    (offsets, rest)
}

/// Applies an operator living on the listed legs (in that order) to a vector
/// on the full tensor product with factor dimensions `dims`.
pub fn apply_on_legs<S: Scalar>(dims: &[usize], legs: &[usize], op: &Matrix<S>, v: &[S]) -> Vec<S> {
    let total: usize = dims.iter().product();
    assert_eq!(v.len(), total, "vector length mismatch");
    let (offsets, rest) = leg_offsets(dims, legs);
    assert_eq!(op.rows(), offsets.len(), "operator does not match the legs");
    assert_eq!(op.cols(), offsets.len(), "operator must be square on its legs");
    let mut out = vec![S::zero(); total];
    for &base in &rest {
        for (r, &ro) in offsets.iter().enumerate() {
            let mut acc = S::zero();
            for (c, &co) in offsets.iter().enumerate() {
                let a = op.at(r, c);
                if !a.is_zero() && !v[base + co].is_zero() {
                    acc = acc + a.clone() * v[base + co].clone();
                }
            }
            out[base + ro] = acc;
        }
    }
    out
}

/// Left-multiplies a (possibly rectangular) matrix by an operator placed on
/// the listed legs of its row index.
pub fn apply_on_legs_matrix<S: Scalar>(
    dims: &[usize],
    legs: &[usize],
    op: &Matrix<S>,
    m: &Matrix<S>,
) -> Matrix<S> {
    let total: usize = dims.iter().product();
    assert_eq!(m.rows(), total, "matrix rows do not match the tensor dimensions");
    let (offsets, rest) = leg_offsets(dims, legs);
    let mut out = Matrix::zeros(total, m.cols());
    for &base in &rest {
        for (r, &ro) in offsets.iter().enumerate() {
            for (c, &co) in offsets.iter().enumerate() {
                let a = op.at(r, c);
                if a.is_zero() {
                    continue;
                }
                for j in 0..m.cols() {
                    let b = m.at(base + co, j);
                    if !b.is_zero() {
                        out.add_at(base + ro, j, a.clone() * b.clone());
                    }
                }
            }
        }
    }
    out
}

/// Embeds an operator on the listed legs into the full tensor product.
pub fn place_on_legs<S: Scalar>(dims: &[usize], legs: &[usize], op: &Matrix<S>) -> Matrix<S> {
    let total: usize = dims.iter().product();
    let (offsets, rest) = leg_offsets(dims, legs);
    assert_eq!(op.rows(), offsets.len(), "operator does not match the legs");
    let mut out = Matrix::zeros(total, total);
    for &base in &rest {
        for (r, &ro) in offsets.iter().enumerate() {
            for (c, &co) in offsets.iter().enumerate() {
                let a = op.at(r, c);
                if !a.is_zero() {
                    out.set(base + ro, base + co, a.clone());
                }
            }
        }
    }
    out
}

/// Computes `(op tensor id_rest) * m` for a rectangular `op` acting on the
/// leading group of legs, without materialising the Kronecker product.
pub fn apply_first_group<S: Scalar>(op: &Matrix<S>, rest: usize, m: &Matrix<S>) -> Matrix<S> {
    assert_eq!(m.rows(), op.cols() * rest, "row count does not match the group");
    let mut out = Matrix::zeros(op.rows() * rest, m.cols());
    for a in 0..op.rows() {
        for b in 0..op.cols() {
            let w = op.at(a, b);
            if w.is_zero() {
                continue;
            }
            for r in 0..rest {
                for j in 0..m.cols() {
                    let v = m.at(b * rest + r, j);
                    if !v.is_zero() {
                        out.add_at(a * rest + r, j, w.clone() * v.clone());
                    }
                }
            }
        }
    }
    out
}

/// Weighted partial trace over the leading factor:
/// `out[i, j] = sum_{a,b} weight[a, b] * m[(b, i), (a, j)]`.
pub fn partial_trace_first<S: Scalar>(
    aux_dim: usize,
    rest_dim: usize,
    m: &Matrix<S>,
    weight: &Matrix<S>,
) -> Matrix<S> {
    assert_eq!(m.rows(), aux_dim * rest_dim, "shape mismatch in partial trace");
    assert_eq!(weight.rows(), aux_dim, "weight does not match the traced factor");
    let mut out = Matrix::zeros(rest_dim, rest_dim);
    for a in 0..aux_dim {
        for b in 0..aux_dim {
            let w = weight.at(a, b);
            if w.is_zero() {
                continue;
            }
            for i in 0..rest_dim {
                for j in 0..rest_dim {
                    let v = m.at(b * rest_dim + i, a * rest_dim + j);
                    if !v.is_zero() {
                        out.add_at(i, j, w.clone() * v.clone());
                    }
                }
            }
        }
    }
    out
}

/// Permutation operator sending `v_0 x .. x v_{k-1}` to the tensor whose
/// `j`-th slot is `v_{perm[j]}`; `dims` are the input factor dimensions.
pub fn permutation_matrix<S: Scalar>(dims: &[usize], perm: &[usize]) -> Matrix<S> {
    assert_eq!(dims.len(), perm.len(), "permutation length mismatch");
    let total: usize = dims.iter().product();
    let in_strides = strides(dims);
    let out_dims: Vec<usize> = perm.iter().map(|&p| dims[p]).collect();
    let out_strides = strides(&out_dims);
    let mut m = Matrix::zeros(total, total);
    for flat in 0..total {
        let digits: Vec<usize> =
            (0..dims.len()).map(|l| (flat / in_strides[l]) % dims[l]).collect();
        let mut out_flat = 0;
        for j in 0..perm.len() {
            out_flat += digits[perm[j]] * out_strides[j];
        }
        m.set(out_flat, flat, S::one());
    }
    m
}
