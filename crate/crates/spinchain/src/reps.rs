//! Finite dimensional `gl(N)` modules with explicit generator matrices.
//!
//! A module stores the action of every generator `e_ab` in a fixed weight
//! graded basis, the weight of each basis vector, and the position of the
//! highest weight vector. Generators satisfy
//! `[e_ab, e_cd] = delta_bc e_ad - delta_ad e_cb`.

use itertools::Itertools;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::linalg::{apply_on_legs, unit_vector, vec_is_zero, Matrix};
use crate::scalars::{rat_int, Rational};
use crate::{Error, Result};

/// Integral `gl(N)` weight, one entry per diagonal generator.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GlWeight(pub Vec<i64>);

impl GlWeight {
    pub fn zero(n: usize) -> Self {
        GlWeight(vec![0; n])
    }

    pub fn add(&self, other: &GlWeight) -> GlWeight {
        GlWeight(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// Weight moved by the generator `e_ab`: adds `eps_a - eps_b`.
    pub fn raised_by(&self, a: usize, b: usize) -> GlWeight {
        let mut w = self.0.clone();
        w[a - 1] += 1;
        w[b - 1] -= 1;
        GlWeight(w)
    }
}

impl std::fmt::Display for GlWeight {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({})", self.0.iter().join(","))
    }
}

/// A `gl(N)` module in an explicit basis.
#[derive(Debug, Clone)]
pub struct GlModule {
    n_gl: usize,
    dim: usize,
    /// Generator matrices indexed by `(a-1) * N + (b-1)`.
    gens: Vec<Matrix<Rational>>,
    basis_weights: Vec<GlWeight>,
    hwv_index: usize,
    label: String,
}

impl GlModule {
    pub fn n_gl(&self) -> usize {
        self.n_gl
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Action of `e_ab`, with 1-based `a, b`.
    pub fn generator(&self, a: usize, b: usize) -> &Matrix<Rational> {
        assert!(a >= 1 && a <= self.n_gl && b >= 1 && b <= self.n_gl, "generator out of range");
        &self.gens[(a - 1) * self.n_gl + (b - 1)]
    }

    pub fn basis_weight(&self, idx: usize) -> &GlWeight {
        &self.basis_weights[idx]
    }

    pub fn basis_weights(&self) -> &[GlWeight] {
        &self.basis_weights
    }

    pub fn hwv_index(&self) -> usize {
        self.hwv_index
    }

    pub fn highest_weight(&self) -> &GlWeight {
        &self.basis_weights[self.hwv_index]
    }

    /// The defining vector representation on `C^N`.
    pub fn vector_rep(n: usize) -> GlModule {
        assert!(n >= 1, "gl(0) has no vector representation");
        let mut gens = Vec::with_capacity(n * n);
        for a in 1..=n {
            for b in 1..=n {
                gens.push(crate::linalg::elementary(n, a, b));
            }
        }
        let basis_weights = (0..n)
            .map(|c| {
                let mut w = vec![0; n];
                w[c] = 1;
                GlWeight(w)
            })
            .collect();
        GlModule {
            n_gl: n,
            dim: n,
            gens,
            basis_weights,
            hwv_index: 0,
            label: "vector".into(),
        }
    }

    /// The exterior power of the vector representation, with basis indexed by
    /// ascending index sets.
    pub fn wedge_rep(n: usize, k: usize) -> Result<GlModule> {
        if k > n || k == 0 {
            return Err(Error::InvalidRank { n_gl: n, rank: k });
        }
        let basis: Vec<Vec<usize>> = (1..=n).combinations(k).collect();
        let index_of = |set: &[usize]| basis.iter().position(|s| s == set);
        let dim = basis.len();
        let mut gens = Vec::with_capacity(n * n);
        for a in 1..=n {
            for b in 1..=n {
                let mut m = Matrix::zeros(dim, dim);
                for (col, set) in basis.iter().enumerate() {
                    let Some(pos) = set.iter().position(|&x| x == b) else { continue };
                    if a == b {
                        m.add_at(col, col, rat_int(1));
                        continue;
                    }
                    if set.contains(&a) {
                        continue;
                    }
                    let mut word: Vec<usize> = set.clone();
                    word[pos] = a;
                    let sign = sort_sign(&mut word);
                    let row = index_of(&word).expect("sorted word is a basis element");
                    m.add_at(row, col, rat_int(sign));
                }
                gens.push(m);
            }
        }
        let basis_weights = basis
            .iter()
            .map(|set| {
                let mut w = vec![0; n];
                for &x in set {
                    w[x - 1] = 1;
                }
                GlWeight(w)
            })
            .collect();
        Ok(GlModule {
            n_gl: n,
            dim,
            gens,
            basis_weights,
            hwv_index: 0,
            label: format!("wedge^{k}"),
        })
    }

    /// The irreducible module with the given highest weight partition,
    /// realised as the cyclic span of a singular vector inside a tensor power
    /// of the vector representation.
    pub fn irrep_from_partition(n: usize, lambda: &[i64]) -> Result<GlModule> {
        if lambda.len() > n
            || lambda.iter().any(|&x| x < 0)
            || lambda.windows(2).any(|w| w[0] < w[1])
        {
            return Err(Error::DimensionMismatch(format!(
                "not a partition with at most {n} parts: {lambda:?}"
            )));
        }
        let mut weight = lambda.to_vec();
        weight.resize(n, 0);
        let boxes: usize = lambda.iter().map(|&x| x as usize).sum();
        let label = format!("irrep{:?}", lambda);
        if boxes == 0 {
            return Ok(GlModule {
                n_gl: n,
                dim: 1,
                gens: vec![Matrix::zeros(1, 1); n * n],
                basis_weights: vec![GlWeight::zero(n)],
                hwv_index: 0,
                label,
            });
        }
        let dims = vec![n; boxes];
        let total: usize = dims.iter().product();
        let target = GlWeight(weight);
        let word_weight = |mut flat: usize| -> GlWeight {
            let mut w = vec![0i64; n];
            for _ in 0..boxes {
                w[flat % n] += 1;
                flat /= n;
            }
            GlWeight(w)
        };
        let hv = {
            let slot: Vec<usize> =
                (0..total).filter(|&f| word_weight(f) == target).collect();
            if slot.is_empty() {
                return Err(Error::NoHighestWeightVector(target.to_string()));
            }
            let mut rows: Vec<Vec<Rational>> = Vec::new();
            for a in 1..n {
                let e = crate::linalg::elementary::<Rational>(n, a, a + 1);
                let mut images: Vec<Vec<Rational>> = Vec::with_capacity(slot.len());
                for &f in &slot {
                    let mut full = vec![Rational::zero(); total];
                    for leg in 0..boxes {
                        let img = apply_on_legs(
                            &dims,
                            &[leg],
                            &e,
                            &unit_vector::<Rational>(total, f),
                        );
                        full = crate::linalg::vec_add(&full, &img);
                    }
                    images.push(full);
                }
                for r in 0..total {
                    let row: Vec<Rational> =
                        images.iter().map(|img| img[r].clone()).collect();
                    if row.iter().any(|v| !v.is_zero()) {
                        rows.push(row);
                    }
                }
            }
            let constraint = if rows.is_empty() {
                Matrix::zeros(1, slot.len())
            } else {
                Matrix::from_rows(rows)
            };
            let kernel = constraint.nullspace();
            let Some(coords) = kernel.first() else {
                return Err(Error::NoHighestWeightVector(target.to_string()));
            };
            let mut v = vec![Rational::zero(); total];
            for (ci, &f) in slot.iter().enumerate() {
                v[f] = coords[ci].clone();
            }
            v
        };

        // Lowering closure from the singular vector.
        let lowerings: Vec<Matrix<Rational>> = (1..n)
            .map(|a| {
                let e = crate::linalg::elementary::<Rational>(n, a + 1, a);
                let mut sum = Matrix::zeros(total, total);
                for leg in 0..boxes {
                    sum = sum.add(&crate::linalg::place_on_legs(&dims, &[leg], &e));
                }
                sum
            })
            .collect();
        let mut basis_vectors: Vec<Vec<Rational>> = vec![hv.clone()];
        let mut weights: Vec<GlWeight> = vec![target.clone()];
        let mut echelon: Vec<Vec<Rational>> = Vec::new();
        let mut echelon_pivots: Vec<usize> = Vec::new();
        reduce_and_insert(&mut echelon, &mut echelon_pivots, hv.clone());
        let mut head = 0;
        while head < basis_vectors.len() {
            let current = basis_vectors[head].clone();
            let wcur = weights[head].clone();
            for (ai, low) in lowerings.iter().enumerate() {
                let img = low.apply(&current);
                if vec_is_zero(&img) {
                    continue;
                }
                if reduce_and_insert(&mut echelon, &mut echelon_pivots, img.clone()) {
                    basis_vectors.push(img);
                    weights.push(wcur.raised_by(ai + 2, ai + 1));
                }
            }
            head += 1;
        }

        // Weight graded order: sort by weight, descending lexicographically.
        let mut order: Vec<usize> = (0..basis_vectors.len()).collect();
        order.sort_by(|&i, &j| weights[j].cmp(&weights[i]).then(i.cmp(&j)));
        let basis_vectors: Vec<Vec<Rational>> =
            order.iter().map(|&i| basis_vectors[i].clone()).collect();
        let weights: Vec<GlWeight> = order.iter().map(|&i| weights[i].clone()).collect();
        let dim = basis_vectors.len();
        let hwv_index = 0;

        let basis_matrix = Matrix::from_fn(total, dim, |i, j| basis_vectors[j][i].clone());
        let mut gens = Vec::with_capacity(n * n);
        for a in 1..=n {
            for b in 1..=n {
                let e = crate::linalg::elementary::<Rational>(n, a, b);
                let mut images = Matrix::zeros(total, dim);
                for (j, bv) in basis_vectors.iter().enumerate() {
                    let mut img = vec![Rational::zero(); total];
                    for leg in 0..boxes {
                        img = crate::linalg::vec_add(&img, &apply_on_legs(&dims, &[leg], &e, bv));
                    }
                    for i in 0..total {
                        images.set(i, j, img[i].clone());
                    }
                }
                let coords = basis_matrix
                    .solve(&images)
                    .expect("generator image stays inside the cyclic span");
                gens.push(coords);
            }
        }
        Ok(GlModule {
            n_gl: n,
            dim,
            gens,
            basis_weights: weights,
            hwv_index,
            label,
        })
    }
}

fn sort_sign(word: &mut [usize]) -> i64 {
    let mut sign = 1i64;
    for i in 1..word.len() {
        let mut j = i;
        while j > 0 && word[j - 1] > word[j] {
            word.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    sign
}

/// Inserts a vector into a growing echelon basis; returns false if dependent.
fn reduce_and_insert(
    echelon: &mut Vec<Vec<Rational>>,
    pivots: &mut Vec<usize>,
    mut v: Vec<Rational>,
) -> bool {
    for (row, &p) in echelon.iter().zip(pivots.iter()) {
        if !v[p].is_zero() {
            let f = v[p].clone();
            for i in 0..v.len() {
                let delta = row[i].clone() * f.clone();
                v[i] = v[i].clone() - delta;
            }
        }
    }
    let Some(p) = v.iter().position(|x| !x.is_zero()) else {
        return false;
    };
    let inv = Rational::from_integer(1.into()) / v[p].clone();
    for x in v.iter_mut() {
        *x = x.clone() * inv.clone();
    }
    echelon.push(v);
    pivots.push(p);
    true
}

/// Sum of `e_ab` over the listed modules acting on their tensor product.
pub fn tensor_generator(modules: &[&GlModule], a: usize, b: usize) -> Result<Matrix<Rational>> {
    let n = check_same_n(modules)?;
    assert!(a >= 1 && a <= n && b >= 1 && b <= n, "generator out of range");
    let dims: Vec<usize> = modules.iter().map(|m| m.dim()).collect();
    let total: usize = dims.iter().product();
    let mut out = Matrix::zeros(total, total);
    for (leg, m) in modules.iter().enumerate() {
        out = out.add(&crate::linalg::place_on_legs(&dims, &[leg], m.generator(a, b)));
    }
    Ok(out)
}

/// Weight of a product basis vector of the tensor product.
pub fn tensor_basis_weight(modules: &[&GlModule], mut flat: usize) -> GlWeight {
    let n = modules.first().map_or(0, |m| m.n_gl());
    let mut w = GlWeight::zero(n);
    for m in modules.iter().rev() {
        let idx = flat % m.dim();
        flat /= m.dim();
        w = w.add(m.basis_weight(idx));
    }
    w
}

/// Basis of the singular space of the given weight inside a tensor product:
/// vectors of that weight annihilated by all raising generators.
pub fn singular_space(modules: &[&GlModule], weight: &GlWeight) -> Result<Vec<Vec<Rational>>> {
    let n = check_same_n(modules)?;
    if weight.0.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "weight {weight} does not match gl({n})"
        )));
    }
    let dims: Vec<usize> = modules.iter().map(|m| m.dim()).collect();
    let total: usize = dims.iter().product();
    let slot: Vec<usize> =
        (0..total).filter(|&f| &tensor_basis_weight(modules, f) == weight).collect();
    if slot.is_empty() {
        return Ok(Vec::new());
    }
    let mut rows: Vec<Vec<Rational>> = Vec::new();
    for a in 1..n {
        let raise = tensor_generator(modules, a, a + 1)?;
        for r in 0..total {
            let mut row = vec![Rational::zero(); slot.len()];
            let mut nonzero = false;
            for (ci, &f) in slot.iter().enumerate() {
                let v = raise.at(r, f);
                if !v.is_zero() {
                    row[ci] = v.clone();
                    nonzero = true;
                }
            }
            if nonzero {
                rows.push(row);
            }
        }
    }
    let kernel = if rows.is_empty() {
        Matrix::zeros(1, slot.len()).nullspace()
    } else {
        Matrix::from_rows(rows).nullspace()
    };
    Ok(kernel
        .into_iter()
        .map(|coords| {
            let mut v = vec![Rational::zero(); total];
            for (ci, &f) in slot.iter().enumerate() {
                v[f] = coords[ci].clone();
            }
            v
        })
        .collect())
}

fn check_same_n(modules: &[&GlModule]) -> Result<usize> {
    let mut n = None;
    for m in modules {
        match n {
            None => n = Some(m.n_gl()),
            Some(k) if k != m.n_gl() => {
                return Err(Error::MismatchedN { left: k, right: m.n_gl() })
            }
            _ => {}
        }
    }
    n.ok_or_else(|| Error::DimensionMismatch("empty module list".into()))
}

/// Dimension of the irreducible with highest weight `lambda` by the Weyl
/// formula, used as an independent oracle for module construction.
pub fn weyl_dimension(n: usize, lambda: &[i64]) -> usize {
    let mut l = lambda.to_vec();
    l.resize(n, 0);
    let mut num = Rational::from_integer(1.into());
    for a in 0..n {
        for b in a + 1..n {
            let d = rat_int(l[a] - l[b] + (b as i64) - (a as i64));
            let e = rat_int((b as i64) - (a as i64));
            num = num * d / e;
        }
    }
    assert!(num.is_integer() && num.is_positive(), "Weyl dimension must be a positive integer");
    num.to_integer().to_usize().expect("dimension fits in usize")
}
