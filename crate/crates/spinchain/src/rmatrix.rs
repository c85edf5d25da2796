//! Rational R-matrices, antisymmetrizers and fusion onto exterior powers.
//!
//! The elementary R-matrix on `C^N x C^N` is `R(u) = u + P` with `P` the flip.
//! Fused R-matrices act on pairs of exterior powers and are obtained by
//! restricting ordered products of elementary R-matrices; the restriction
//! checks invariance of the wedge subspace before projecting.

use itertools::Itertools;
use num_integer::binomial;

use crate::linalg::{elementary, permutation_matrix, place_on_legs, Matrix};
use crate::reps::GlModule;
use crate::scalars::{rat_int, Rational, Scalar};
use crate::{Error, Result};

/// Dimension of the `k`-th exterior power of `C^N`.
pub fn wedge_dim(n: usize, k: usize) -> usize {
    binomial(n, k)
}

/// Flip operator `P` on `C^N x C^N`.
pub fn flip<S: Scalar>(n: usize) -> Matrix<S> {
    permutation_matrix(&[n, n], &[1, 0])
}

/// Elementary rational R-matrix `R(u) = u + P`.
pub fn rational_r<S: Scalar>(n: usize, u: &S) -> Matrix<S> {
    Matrix::identity(n * n).scaled(u).add(&flip(n))
}

fn permutation_sign(perm: &[usize]) -> i64 {
    let mut sign = 1;
    for i in 0..perm.len() {
        for j in i + 1..perm.len() {
            if perm[i] > perm[j] {
                sign = -sign;
            }
        }
    }
    sign
}

/// Normalised antisymmetrizer on `(C^N)^{x k}`.
pub fn antisymmetrizer(n: usize, k: usize) -> Matrix<Rational> {
    let dims = vec![n; k];
    let total: usize = dims.iter().product();
    let mut sum = Matrix::zeros(total, total);
    let mut count = 0i64;
    for perm in (0..k).permutations(k) {
        let sign = rat_int(permutation_sign(&perm));
        sum = sum.add(&permutation_matrix::<Rational>(&dims, &perm).scaled(&sign));
        count += 1;
    }
    sum.scaled(&(rat_int(1) / rat_int(count)))
}

/// Inclusion of the exterior power into the tensor power: the column of an
/// ascending index set is the alternating sum over its permutations.
pub fn wedge_inclusion(n: usize, k: usize) -> Result<Matrix<Rational>> {
    if k == 0 || k > n {
        return Err(Error::InvalidRank { n_gl: n, rank: k });
    }
    let sets: Vec<Vec<usize>> = (1..=n).combinations(k).collect();
    let total = n.pow(k as u32);
    let mut m = Matrix::zeros(total, sets.len());
    for (col, set) in sets.iter().enumerate() {
        for perm in (0..k).permutations(k) {
            let sign = permutation_sign(&perm);
            let mut flat = 0;
            for &p in &perm {
                flat = flat * n + (set[p] - 1);
            }
            m.set(flat, col, rat_int(sign));
        }
    }
    Ok(m)
}

/// Left inverse of [`wedge_inclusion`]: reads off the coefficient of the
/// ascending word.
pub fn wedge_projection(n: usize, k: usize) -> Result<Matrix<Rational>> {
    if k == 0 || k > n {
        return Err(Error::InvalidRank { n_gl: n, rank: k });
    }
    let sets: Vec<Vec<usize>> = (1..=n).combinations(k).collect();
    let total = n.pow(k as u32);
    let mut m = Matrix::zeros(sets.len(), total);
    for (row, set) in sets.iter().enumerate() {
        let mut flat = 0;
        for &x in set {
            flat = flat * n + (x - 1);
        }
        m.set(row, flat, rat_int(1));
    }
    Ok(m)
}

/// Restricts an operator on `(C^N)^{x sum(ks)}` to the product of exterior
/// powers of the listed ranks, verifying that the operator preserves it.
pub fn restrict_to_wedges<S: Scalar>(n: usize, ks: &[usize], m: &Matrix<S>) -> Result<Matrix<S>> {
    let mut incl: Option<Matrix<Rational>> = None;
    let mut proj: Option<Matrix<Rational>> = None;
    for &k in ks {
        let i = wedge_inclusion(n, k)?;
        let p = wedge_projection(n, k)?;
        incl = Some(match incl {
            None => i,
            Some(acc) => acc.kron(&i),
        });
        proj = Some(match proj {
            None => p,
            Some(acc) => acc.kron(&p),
        });
    }
    let incl = Matrix::<S>::cast_from(&incl.expect("nonempty rank list"));
    let proj = Matrix::<S>::cast_from(&proj.expect("nonempty rank list"));
    let m_in = m.matmul(&incl);
    let small = proj.matmul(&m_in);
    let recon = incl.matmul(&small);
    let defect = recon.sub(&m_in).max_abs();
    let invariant = if S::EXACT { defect == 0.0 } else { defect <= 1e-9 * m.max_abs().max(1.0) };
    if !invariant {
        return Err(Error::NotInvariant(format!(
            "wedge ranks {ks:?}, defect magnitude {defect:e}"
        )));
    }
    Ok(small)
}

/// Fused R-matrix on the pair of exterior powers `(k, l)` of `C^N`.
///
/// Built as the ordered product of elementary R-matrices with arguments
/// `u + i - j - k + l` (first factor index descending, second ascending),
/// restricted to the wedge subspaces.
pub fn fused_r<S: Scalar>(n: usize, k: usize, l: usize, u: &S) -> Result<Matrix<S>> {
    if k == 0 || k > n {
        return Err(Error::InvalidRank { n_gl: n, rank: k });
    }
    if l == 0 || l > n {
        return Err(Error::InvalidRank { n_gl: n, rank: l });
    }
    let dims = vec![n; k + l];
    let total: usize = dims.iter().product();
    let mut acc = Matrix::<S>::identity(total);
    for i in (1..=k).rev() {
        for j in 1..=l {
            let shift = (i as i64) - (j as i64) - (k as i64) + (l as i64);
            let arg = u.clone() + S::from_int(shift);
            let factor = place_on_legs(&dims, &[i - 1, k + j - 1], &rational_r(n, &arg));
            acc = acc.matmul(&factor);
        }
    }
    restrict_to_wedges(n, &[k, l], &acc)
}

/// Which side of a reduced fused R-matrix carries the exterior power.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WedgeSide {
    /// Acts on `Wedge^k C^N x C^N`.
    WedgeThenVector,
    /// Acts on `C^N x Wedge^k C^N`.
    VectorThenWedge,
}

/// Reduced fused R-matrix with all scalar polynomial factors stripped.
pub fn reduced_fused_r<S: Scalar>(
    n: usize,
    k: usize,
    side: WedgeSide,
    u: &S,
) -> Result<Matrix<S>> {
    let wedge = GlModule::wedge_rep(n, k)?;
    let wd = wedge.dim();
    match side {
        WedgeSide::WedgeThenVector => {
            let mut acc = Matrix::<S>::identity(wd * n).scaled(u);
            for a in 1..=n {
                for b in 1..=n {
                    let g = Matrix::<S>::cast_from(wedge.generator(a, b));
                    let e = elementary::<S>(n, b, a);
                    acc = acc.add(&g.kron(&e));
                }
            }
            Ok(acc)
        }
        WedgeSide::VectorThenWedge => {
            let c = u.clone() + S::from_int(k as i64 - 1);
            let mut acc = Matrix::<S>::identity(n * wd).scaled(&c);
            for a in 1..=n {
                for b in 1..=n {
                    let e = elementary::<S>(n, a, b);
                    let g = Matrix::<S>::cast_from(wedge.generator(b, a));
                    acc = acc.add(&e.kron(&g));
                }
            }
            Ok(acc)
        }
    }
}

/// The scalar `prod_{i=1..k} prod_{j=1..l} (1 - (u - i + j)^2)` appearing in
/// the fused inversion relation.
pub fn fused_inversion_scalar<S: Scalar>(k: usize, l: usize, u: &S) -> S {
    let mut acc = S::one();
    for i in 1..=k {
        for j in 1..=l {
            let v = u.clone() + S::from_int(j as i64 - i as i64);
            acc = acc * (S::one() - v.clone() * v);
        }
    }
    acc
}

/// Exterior power of a matrix: entries are the `k x k` minors.
pub fn wedge_power_matrix<S: Scalar>(q: &Matrix<S>, k: usize) -> Result<Matrix<S>> {
    let n = q.rows();
    assert_eq!(q.rows(), q.cols(), "wedge power of a non-square matrix");
    if k == 0 {
        return Ok(Matrix::identity(1));
    }
    if k > n {
        return Err(Error::InvalidRank { n_gl: n, rank: k });
    }
    let sets: Vec<Vec<usize>> = (0..n).combinations(k).collect();
    Ok(Matrix::from_fn(sets.len(), sets.len(), |r, c| {
        let sub = Matrix::from_fn(k, k, |i, j| q.at(sets[r][i], sets[c][j]).clone());
        sub.det()
    }))
}

/// Conjugates an operator on `A x B` by the factor swap, producing an
/// operator on `B x A`.
pub fn swap_sides<S: Scalar>(m: &Matrix<S>, dim_a: usize, dim_b: usize) -> Matrix<S> {
    assert_eq!(m.rows(), dim_a * dim_b, "shape mismatch in swap");
    let fwd = permutation_matrix::<S>(&[dim_a, dim_b], &[1, 0]);
    let back = permutation_matrix::<S>(&[dim_b, dim_a], &[1, 0]);
    fwd.matmul(m).matmul(&back)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::rat;

    #[test]
    fn elementary_inversion_relation_holds() {
        let u = rat(5, 3);
        let n = 3;
        let lhs = rational_r(n, &u).matmul(&rational_r(n, &(-u.clone())));
        let scalar = rat_int(1) - u.clone() * u.clone();
        assert_eq!(lhs, Matrix::identity(n * n).scaled(&scalar));
    }

    #[test]
    fn antisymmetrizer_is_an_idempotent_with_binomial_rank() {
        for (n, k) in [(2, 2), (3, 2), (3, 3)] {
            let a = antisymmetrizer(n, k);
            assert_eq!(a.matmul(&a), a, "A^2 = A for n={n}, k={k}");
            assert_eq!(a.rank(), wedge_dim(n, k), "rank C({n},{k})");
        }
    }

    #[test]
    fn wedge_projection_is_a_left_inverse_of_inclusion() {
        for (n, k) in [(2, 2), (3, 2), (4, 3)] {
            let incl = wedge_inclusion(n, k).unwrap();
            let proj = wedge_projection(n, k).unwrap();
            assert_eq!(proj.matmul(&incl), Matrix::identity(wedge_dim(n, k)));
            let a = antisymmetrizer(n, k);
            assert_eq!(
                a.matmul(&incl),
                incl,
                "wedge vectors must be fixed by the antisymmetrizer"
            );
        }
    }

    #[test]
    fn non_invariant_operators_are_rejected() {
        let m = elementary::<Rational>(2, 1, 2).kron(&Matrix::identity(2));
        match restrict_to_wedges(2, &[2], &m) {
            Err(Error::NotInvariant(_)) => {}
            other => panic!("expected NotInvariant, got {other:?}"),
        }
    }

    #[test]
    fn fused_top_wedge_with_vector_for_gl2_is_scalar() {
        let u = rat(7, 5);
        let f = fused_r(2, 2, 1, &u).unwrap();
        let scalar = (u.clone() + rat_int(1)) * (u.clone() - rat_int(1));
        assert_eq!(f, Matrix::identity(2).scaled(&scalar), "(u+1)(u-1) id expected");
    }

    #[test]
    fn reduced_top_cases_are_the_expected_scalars() {
        let u = rat(3, 7);
        let n = 3;
        let a = reduced_fused_r(n, n, WedgeSide::WedgeThenVector, &u).unwrap();
        assert_eq!(a, Matrix::identity(n).scaled(&(u.clone() + rat_int(1))));
        let b = reduced_fused_r(n, n, WedgeSide::VectorThenWedge, &u).unwrap();
        assert_eq!(b, Matrix::identity(n).scaled(&(u + rat_int(n as i64))));
    }

    #[test]
    fn wedge_power_of_a_matrix_multiplies_determinants() {
        let q = Matrix::from_rows(vec![
            vec![rat_int(1), rat_int(2), rat_int(0)],
            vec![rat_int(0), rat_int(1), rat_int(3)],
            vec![rat_int(4), rat_int(0), rat_int(1)],
        ]);
        let w2 = wedge_power_matrix(&q, 2).unwrap();
        let w3 = wedge_power_matrix(&q, 3).unwrap();
        assert_eq!(w3.at(0, 0), &q.det(), "top wedge is the determinant");
        assert_eq!(w2.rows(), 3);
    }
}
