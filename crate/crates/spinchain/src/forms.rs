//! Bilinear forms and intertwining operators.
//!
//! Highest weight modules carry a unique symmetric contravariant form
//! normalized at the highest vector. Pairs of such modules carry a
//! unique intertwining operator fixed by commutation relations and the
//! same normalization. Chains combine the two into a deformed Gram
//! matrix with respect to which the transfer matrices are symmetric.

use crate::linalg::{place_on_legs, Matrix};
use crate::reps::{GlModule, GlWeight};
use crate::scalars::{rat_int, Rational};
use crate::yangian::TensorChain;
use crate::{Error, Result};
use num_traits::Zero;
use std::collections::HashMap;

fn shifted_weight(w: &GlWeight, a: usize, b: usize) -> GlWeight {
    let mut out = w.0.clone();
    out[a - 1] += 1;
    out[b - 1] -= 1;
    GlWeight(out)
}

fn joint_weight(w1: &GlWeight, w2: &GlWeight) -> GlWeight {
    GlWeight(w1.0.iter().zip(&w2.0).map(|(x, y)| x + y).collect())
}

struct UnknownTable {
    index: HashMap<(usize, usize), usize>,
    pairs: Vec<(usize, usize)>,
}

impl UnknownTable {
    fn get(&self, row: usize, col: usize) -> Option<usize> {
        self.index.get(&(row, col)).copied()
    }

    fn len(&self) -> usize {
        self.pairs.len()
    }
}

fn block_unknowns(weights: &[GlWeight], symmetric: bool) -> UnknownTable {
    let mut index = HashMap::new();
    let mut pairs = Vec::new();
    for i in 0..weights.len() {
        for j in 0..weights.len() {
            if weights[i] != weights[j] {
                continue;
            }
            if symmetric {
                let key = (i.min(j), i.max(j));
                if let Some(&idx) = index.get(&key) {
                    index.insert((i, j), idx);
                    continue;
                }
                let idx = pairs.len();
                pairs.push(key);
                index.insert(key, idx);
                index.insert((i, j), idx);
            } else {
                let idx = pairs.len();
                pairs.push((i, j));
                index.insert((i, j), idx);
            }
        }
    }
    UnknownTable { index, pairs }
}

fn solve_unique(
    rows: Vec<Vec<Rational>>,
    table: &UnknownTable,
    normal_at: (usize, usize),
    dim: usize,
    context: &str,
) -> Result<Matrix<Rational>> {
    let n_unknowns = table.len();
    let mut system = Matrix::zeros(rows.len().max(1), n_unknowns);
    for (r, row) in rows.iter().enumerate() {
        for (c, v) in row.iter().enumerate() {
            if !v.is_zero() {
                system.set(r, c, v.clone());
            }
        }
    }
    let kernel = system.nullspace();
    if kernel.len() != 1 {
        return Err(Error::DegenerateAt {
            at: context.to_string(),
            detail: format!("solution space has dimension {}", kernel.len()),
        });
    }
    let solution = &kernel[0];
    let norm_idx = table.get(normal_at.0, normal_at.1).expect("normalization entry is an unknown");
    let pivot = solution[norm_idx].clone();
    if pivot.is_zero() {
        return Err(Error::DegenerateAt {
            at: context.to_string(),
            detail: "vanishing highest coefficient prevents normalization".to_string(),
        });
    }
    let mut out = Matrix::zeros(dim, dim);
    for i in 0..dim {
        for j in 0..dim {
            if let Some(idx) = table.get(i, j) {
                out.set(i, j, solution[idx].clone() / pivot.clone());
            }
        }
    }
    Ok(out)
}

/// Unique symmetric bilinear form with `S(e_ab w1, w2) = S(w1, e_ba w2)`
/// and value one on the highest vector, as a Gram matrix in the module
/// basis.
pub fn shapovalov_gram(module: &GlModule) -> Result<Matrix<Rational>> {
    let d = module.dim();
    let n = module.n_gl();
    let weights = module.basis_weights();
    let table = block_unknowns(weights, true);
    let mut rows = Vec::new();
    for a in 1..=n {
        for b in 1..=n {
            if a == b {
                continue;
            }
            let e_ab = module.generator(a, b);
            let e_ba = module.generator(b, a);
            for p in 0..d {
                for q in 0..d {
                    if weights[q] != shifted_weight(&weights[p], a, b) {
                        continue;
                    }
                    let mut row = vec![rat_int(0); table.len()];
                    let mut nontrivial = false;
                    for k in 0..d {
                        let left = e_ab.at(k, p);
                        if !left.is_zero() {
                            if let Some(idx) = table.get(k, q) {
                                row[idx] = row[idx].clone() + left.clone();
                                nontrivial = true;
                            }
                        }
                        let right = e_ba.at(k, q);
                        if !right.is_zero() {
                            if let Some(idx) = table.get(p, k) {
                                row[idx] = row[idx].clone() - right.clone();
                                nontrivial = true;
                            }
                        }
                    }
                    if nontrivial {
                        rows.push(row);
                    }
                }
            }
        }
    }
    let hw = module.hwv_index();
    solve_unique(rows, &table, (hw, hw), d, module.label())
}

/// Unique operator on the tensor product of two highest weight modules
/// commuting with the diagonal action, intertwining the evaluation
/// coproducts at spectral parameter `u`, and fixing the product of
/// highest vectors.
pub fn intertwiner_r(
    left: &GlModule,
    right: &GlModule,
    u: &Rational,
) -> Result<Matrix<Rational>> {
    if left.n_gl() != right.n_gl() {
        return Err(Error::MismatchedN { left: left.n_gl(), right: right.n_gl() });
    }
    let n = left.n_gl();
    let dl = left.dim();
    let dr = right.dim();
    let d = dl * dr;
    let weights: Vec<GlWeight> = (0..d)
        .map(|f| joint_weight(left.basis_weight(f / dr), right.basis_weight(f % dr)))
        .collect();
    let table = block_unknowns(&weights, false);
    let identity_l = Matrix::<Rational>::identity(dl);
    let identity_r = Matrix::<Rational>::identity(dr);

    let mut relations: Vec<Matrix<Rational>> = Vec::new();
    let mut opposite: Vec<Matrix<Rational>> = Vec::new();
    for a in 1..=n {
        for b in 1..=n {
            if a != b {
                let diag = left
                    .generator(a, b)
                    .kron(&identity_r)
                    .add(&identity_l.kron(right.generator(a, b)));
                relations.push(diag.clone());
                opposite.push(diag);
            }
            let mut m_left = left.generator(a, b).kron(&identity_r).scaled(u);
            let mut m_right = m_left.clone();
            for c in 1..=n {
                m_left = m_left.add(&left.generator(a, c).kron(right.generator(c, b)));
                m_right = m_right.add(&left.generator(c, b).kron(right.generator(a, c)));
            }
            relations.push(m_left);
            opposite.push(m_right);
        }
    }

    let mut rows = Vec::new();
    for (m_l, m_r) in relations.iter().zip(&opposite) {
        for p in 0..d {
            for q in 0..d {
                let mut row = vec![rat_int(0); table.len()];
                let mut nontrivial = false;
                for k in 0..d {
                    let from_right = m_l.at(k, q);
                    if !from_right.is_zero() {
                        if let Some(idx) = table.get(p, k) {
                            row[idx] = row[idx].clone() + from_right.clone();
                            nontrivial = true;
                        }
                    }
                    let from_left = m_r.at(p, k);
                    if !from_left.is_zero() {
                        if let Some(idx) = table.get(k, q) {
                            row[idx] = row[idx].clone() - from_left.clone();
                            nontrivial = true;
                        }
                    }
                }
                if nontrivial {
                    rows.push(row);
                }
            }
        }
    }
    let hw = left.hwv_index() * dr + right.hwv_index();
    let context = format!("{} with {} at {}", left.label(), right.label(), u);
    solve_unique(rows, &table, (hw, hw), d, &context)
}

/// Ordered product of pairwise intertwiners
/// `prod_{i<j} R^(ij)(z_i - z_j)` over the chain, leftmost factor first.
pub fn chain_r(chain: &TensorChain) -> Result<Matrix<Rational>> {
    let dims = chain.site_dims();
    let d = chain.dim();
    let mut acc = Matrix::<Rational>::identity(d);
    for i in 0..chain.len() {
        for j in i + 1..chain.len() {
            let arg = chain.z()[i].clone() - chain.z()[j].clone();
            let r = intertwiner_r(&chain.modules()[i], &chain.modules()[j], &arg)?;
            acc = acc.matmul(&place_on_legs(&dims, &[i, j], &r));
        }
    }
    Ok(acc)
}

/// Tensor product of the single module Gram matrices.
pub fn chain_gram(chain: &TensorChain) -> Result<Matrix<Rational>> {
    let mut acc = Matrix::<Rational>::identity(1);
    for module in chain.modules() {
        acc = acc.kron(&shapovalov_gram(module)?);
    }
    Ok(acc)
}

/// Gram matrix of the deformed form `S(w1, R w2)` built from the tensor
/// Gram and the chain intertwiner product.
pub fn deformed_gram(chain: &TensorChain) -> Result<Matrix<Rational>> {
    Ok(chain_gram(chain)?.matmul(&chain_r(chain)?))
}

/// Determinants of the leading principal minors, in increasing size.
pub fn leading_principal_minors(m: &Matrix<Rational>) -> Vec<Rational> {
    (1..=m.rows())
        .map(|k| {
            let sub = Matrix::from_fn(k, k, |i, j| m.at(i, j).clone());
            sub.det()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rmatrix::swap_sides;
    use crate::scalars::rat;

    #[test]
    fn vector_representation_gram_is_the_identity() {
        for n in 2..=4 {
            let gram = shapovalov_gram(&GlModule::vector_rep(n)).unwrap();
            assert_eq!(gram, Matrix::identity(n), "orthonormal standard basis");
        }
    }

    #[test]
    fn wedge_representation_gram_is_the_identity() {
        let gram = shapovalov_gram(&GlModule::wedge_rep(4, 2).unwrap()).unwrap();
        assert_eq!(gram, Matrix::identity(6), "wedge basis stays orthonormal");
    }

    #[test]
    fn vector_vector_intertwiner_is_the_normalized_rational_r() {
        let module = GlModule::vector_rep(3);
        let u = rat(5, 3);
        let got = intertwiner_r(&module, &module, &u).unwrap();
        let expected = crate::rmatrix::rational_r::<Rational>(3, &u)
            .scaled(&(rat_int(1) / (u.clone() + rat_int(1))));
        assert_eq!(got, expected, "(u + flip)/(u + 1) on two vector modules");
    }

    #[test]
    fn vector_intertwiner_fails_at_the_pole() {
        let module = GlModule::vector_rep(2);
        match intertwiner_r(&module, &module, &rat_int(-1)) {
            Err(Error::DegenerateAt { .. }) => {}
            other => panic!("expected DegenerateAt, got {other:?}"),
        }
    }

    #[test]
    fn intertwiner_is_self_adjoint_for_the_tensor_gram() {
        let left = GlModule::wedge_rep(3, 2).unwrap();
        let right = GlModule::vector_rep(3);
        let u = rat(7, 2);
        let r = intertwiner_r(&left, &right, &u).unwrap();
        let gram = shapovalov_gram(&left)
            .unwrap()
            .kron(&shapovalov_gram(&right).unwrap());
        assert_eq!(
            r.transpose().matmul(&gram),
            gram.matmul(&r),
            "adjoint of the intertwiner is itself"
        );
    }

    #[test]
    fn swapped_intertwiner_inverts_the_original() {
        let left = GlModule::vector_rep(2);
        let right = GlModule::wedge_rep(2, 1).unwrap();
        let u = rat(3, 4);
        let r_lm = intertwiner_r(&left, &right, &u).unwrap();
        let r_ml = intertwiner_r(&right, &left, &(-u.clone())).unwrap();
        let flipped = swap_sides(&r_ml, right.dim(), left.dim());
        assert_eq!(
            r_lm.matmul(&flipped),
            Matrix::identity(left.dim() * right.dim()),
            "inverse relation between the two orders"
        );
    }

    #[test]
    fn wedge_intertwiners_match_shifted_reduced_fused_matrices() {
        use crate::rmatrix::{reduced_fused_r, WedgeSide};
        let wedge = GlModule::wedge_rep(3, 2).unwrap();
        let vector = GlModule::vector_rep(3);
        let u = rat(5, 3);
        let wedge_first = intertwiner_r(&wedge, &vector, &u).unwrap();
        let expected = reduced_fused_r::<Rational>(
            3,
            2,
            WedgeSide::WedgeThenVector,
            &(u.clone() + rat_int(1)),
        )
        .unwrap()
        .scaled(&(rat_int(1) / (u.clone() + rat_int(2))));
        assert_eq!(wedge_first, expected, "wedge before vector case");

        let vector_first = intertwiner_r(&vector, &wedge, &u).unwrap();
        let expected = reduced_fused_r::<Rational>(
            3,
            2,
            WedgeSide::VectorThenWedge,
            &(u.clone() - rat_int(1)),
        )
        .unwrap()
        .scaled(&(rat_int(1) / (u.clone() + rat_int(1))));
        assert_eq!(vector_first, expected, "vector before wedge case");
    }

    #[test]
    fn transfer_matrix_is_symmetric_for_the_deformed_gram() {
        use crate::yangian::{transfer_matrix, TwistMatrix};
        let chain = TensorChain::new(
            vec![GlModule::vector_rep(3), GlModule::wedge_rep(3, 2).unwrap()],
            vec![rat_int(0), rat(7, 3)],
        )
        .unwrap();
        let gram = deformed_gram(&chain).unwrap();
        let mut q = Matrix::<Rational>::identity(3);
        q.set(0, 1, rat_int(1));
        q.set(1, 0, rat_int(1));
        q.set(1, 2, rat(1, 2));
        q.set(2, 1, rat(1, 2));
        q.set(2, 2, rat_int(3));
        let twist = TwistMatrix::full(q).unwrap();
        for k in 1..=2 {
            let t = transfer_matrix(&chain, &twist, k, &rat(9, 5)).unwrap();
            assert_eq!(
                t.transpose().matmul(&gram),
                gram.matmul(&t),
                "symmetry fails for k = {k}"
            );
        }
    }

    #[test]
    fn deformed_gram_of_a_two_site_chain_is_symmetric() {
        let chain = TensorChain::new(
            vec![GlModule::vector_rep(2), GlModule::wedge_rep(2, 1).unwrap()],
            vec![rat_int(0), rat_int(3)],
        )
        .unwrap();
        let gram = deformed_gram(&chain).unwrap();
        assert_eq!(gram, gram.transpose(), "deformed form stays symmetric");
    }
}
