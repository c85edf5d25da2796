//! Gaudin models on inhomogeneous chains.
//!
//! The central object is a differential operator pencil whose
//! coefficients are the commuting Gaudin transfer matrices. This module
//! builds the pencil from current operators, evaluates the associated
//! weight functions by a direct sum and by a rank recursion, checks the
//! Gaudin Bethe equations, and exposes the classical and dynamical
//! Hamiltonians recovered from the pencil coefficients.

use crate::bethe_xxx::{
    bethe_weight, clearing_factor, is_off_diagonal, BetheConfig, BetheRoots, EigenpairCheck,
    EigenpairReport,
};
use crate::diffop::{DiffOp, Jet, MatrixJet, ScalarJet};
use crate::linalg::{place_on_legs, vec_add, vec_is_zero, vec_max_abs, vec_scaled, vec_sub, Matrix};
use crate::reps::GlModule;
use crate::scalars::{rat_int, sample_points, Poly, Rational, Scalar};
use crate::yangian::{matrix_laurent_at_infinity, DynamicalExpansion, TensorChain};
use crate::{Error, Result};
use itertools::Itertools;
use num_traits::Zero;

/// A Gaudin spectral problem: chain, diagonal twist entries and level
/// counts.
#[derive(Debug, Clone)]
pub struct GaudinProblem {
    chain: TensorChain,
    k_diag: Vec<Rational>,
    config: BetheConfig,
}

impl GaudinProblem {
    pub fn new(chain: TensorChain, k_diag: Vec<Rational>, config: BetheConfig) -> Result<Self> {
        let n = chain.n_gl();
        if k_diag.len() != n {
            return Err(Error::MismatchedN { left: n, right: k_diag.len() });
        }
        if config.n_gl() != n {
            return Err(Error::MismatchedN { left: n, right: config.n_gl() });
        }
        Ok(Self { chain, k_diag, config })
    }

    pub fn chain(&self) -> &TensorChain {
        &self.chain
    }

    pub fn k_diag(&self) -> &[Rational] {
        &self.k_diag
    }

    pub fn k_matrix(&self) -> Matrix<Rational> {
        let n = self.k_diag.len();
        Matrix::from_fn(n, n, |i, j| {
            if i == j {
                self.k_diag[i].clone()
            } else {
                rat_int(0)
            }
        })
    }

    pub fn config(&self) -> &BetheConfig {
        &self.config
    }

    pub fn is_untwisted(&self) -> bool {
        self.k_diag.iter().all(Zero::is_zero)
    }

    /// Highest weight component `Lambda^a_j` of site `j` (both 1-based).
    pub fn site_weight(&self, a: usize, j: usize) -> i64 {
        self.chain.modules()[j - 1].highest_weight().0[a - 1]
    }
}

/// Current operator `L_ab(u)` on the chain, acting as
/// `sum_i e_ba^(i) / (u - z_i)`.
pub fn current_entry<S: Scalar>(
    chain: &TensorChain,
    a: usize,
    b: usize,
    u: &S,
) -> Result<Matrix<S>> {
    let dims = chain.site_dims();
    let d = chain.dim();
    let mut acc = Matrix::zeros(d, d);
    for (i, z) in chain.z().iter().enumerate() {
        let den = u.clone() - S::from_rational(z);
        if den.is_zero() {
            return Err(Error::PoleAtSample(format!("{u}")));
        }
        let gen = Matrix::<S>::cast_from(chain.modules()[i].generator(b, a));
        acc = acc.add(&place_on_legs(&dims, &[i], &gen).scaled(&(S::one() / den)));
    }
    Ok(acc)
}

/// Taylor jet of `L_ab` at `u0`.
pub fn current_jet<S: Scalar>(
    chain: &TensorChain,
    a: usize,
    b: usize,
    u0: &S,
    order: usize,
) -> Result<MatrixJet<S>> {
    let dims = chain.site_dims();
    let d = chain.dim();
    let mut acc = MatrixJet::zero(d, order);
    for (i, z) in chain.z().iter().enumerate() {
        let pole = ScalarJet::reciprocal_linear(u0, &S::from_rational(z), order)?;
        let gen = Matrix::<S>::cast_from(chain.modules()[i].generator(b, a));
        acc = acc.add(&MatrixJet::constant(place_on_legs(&dims, &[i], &gen), order).scale_by(&pole));
    }
    Ok(acc)
}

fn permutation_sign(perm: &[usize]) -> i64 {
    let mut sign = 1i64;
    for i in 0..perm.len() {
        for j in i + 1..perm.len() {
            if perm[i] > perm[j] {
                sign = -sign;
            }
        }
    }
    sign
}

/// Differential operator pencil of the model at base point `u0`:
/// the symmetrized sum over row and column permutations of ordered
/// products of the first order factors
/// `F_cd = delta_cd d/du - K_cd - L_cd(u)`. Entry `j` of the result is
/// the jet coefficient of `(d/du)^j`; the transfer matrices appear as
/// `G_k = (-1)^k` times coefficient `N - k`.
pub fn gaudin_pencil<S: Scalar>(
    chain: &TensorChain,
    k_matrix: &Matrix<Rational>,
    u0: &S,
    order: usize,
) -> Result<DiffOp<MatrixJet<S>>> {
    let n = chain.n_gl();
    let d = chain.dim();
    let jet_order = order + n;
    let mut factors: Vec<Vec<DiffOp<MatrixJet<S>>>> = Vec::with_capacity(n);
    for c in 1..=n {
        let mut row = Vec::with_capacity(n);
        for e in 1..=n {
            let mut order0 = current_jet(chain, c, e, u0, jet_order)?.neg();
            let k_entry = S::from_rational(k_matrix.at(c - 1, e - 1));
            order0 = order0.add(&MatrixJet::constant(
                Matrix::identity(d).scaled(&(-k_entry)),
                jet_order,
            ));
            let order1 = if c == e {
                MatrixJet::constant(Matrix::identity(d), jet_order)
            } else {
                MatrixJet::zero(d, jet_order)
            };
            row.push(DiffOp::from_coeffs(vec![order0, order1]));
        }
        factors.push(row);
    }

    let perms: Vec<Vec<usize>> = (0..n).permutations(n).collect();
    let mut total: Option<DiffOp<MatrixJet<S>>> = None;
    for sigma in &perms {
        let s_sign = permutation_sign(sigma);
        for tau in &perms {
            let sign = s_sign * permutation_sign(tau);
            let mut product = factors[sigma[n - 1]][tau[n - 1]].clone();
            for p in (0..n - 1).rev() {
                product = factors[sigma[p]][tau[p]].compose(&product);
            }
            let signed = if sign < 0 { product.neg() } else { product };
            total = Some(match total {
                Some(acc) => acc.add(&signed),
                None => signed,
            });
        }
    }
    let inv_fact = S::one() / S::from_rational(&crate::yangian::factorial(n));
    let pencil = total.expect("at least one permutation pair");
    Ok(DiffOp::from_coeffs(
        pencil.coeffs().iter().map(|j| j.scaled(&inv_fact)).collect(),
    ))
}

/// Transfer matrices `G_0(u), .., G_N(u)` extracted from the pencil.
pub fn gaudin_transfer_all<S: Scalar>(
    chain: &TensorChain,
    k_matrix: &Matrix<Rational>,
    u: &S,
) -> Result<Vec<Matrix<S>>> {
    let n = chain.n_gl();
    let pencil = gaudin_pencil(chain, k_matrix, u, 0)?;
    let mut out = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let coeff = pencil.coeffs()[n - k].value().clone();
        out.push(if k % 2 == 1 { coeff.scaled(&-S::one()) } else { coeff });
    }
    Ok(out)
}

pub fn gaudin_transfer<S: Scalar>(
    chain: &TensorChain,
    k_matrix: &Matrix<Rational>,
    k: usize,
    u: &S,
) -> Result<Matrix<S>> {
    let n = chain.n_gl();
    if k > n {
        return Err(Error::InvalidRank { n_gl: n, rank: k });
    }
    Ok(gaudin_transfer_all(chain, k_matrix, u)?.swap_remove(k))
}

/// Lowering currents presented through entries; the weight function
/// constructions consume this interface for chains and for reduced
/// currents alike.
pub trait Currents<S: Scalar> {
    fn rank(&self) -> usize;
    fn dim(&self) -> usize;
    fn entry(&self, a: usize, b: usize, u: &S) -> Result<Matrix<S>>;
}

/// Chain currents viewed through the weight function interface.
pub struct ChainCurrents<'a> {
    chain: &'a TensorChain,
}

impl<'a> ChainCurrents<'a> {
    pub fn new(chain: &'a TensorChain) -> Self {
        Self { chain }
    }
}

impl<S: Scalar> Currents<S> for ChainCurrents<'_> {
    fn rank(&self) -> usize {
        self.chain.n_gl()
    }

    fn dim(&self) -> usize {
        self.chain.dim()
    }

    fn entry(&self, a: usize, b: usize, u: &S) -> Result<Matrix<S>> {
        current_entry(self.chain, a, b, u)
    }
}

/// Rank `N-1` currents on auxiliary copies of `C^{N-1}` at the first
/// level variables, followed by the parent space:
/// `L'_ab(u) = 1 (x) L_{a+1,b+1}(u) + sum_i E_ba^(W_i) / (u - x_i)`.
struct ReducedCurrents<'a, S: Scalar> {
    parent: &'a dyn Currents<S>,
    x: Vec<S>,
}

impl<S: Scalar> Currents<S> for ReducedCurrents<'_, S> {
    fn rank(&self) -> usize {
        self.parent.rank() - 1
    }

    fn dim(&self) -> usize {
        self.rank().pow(self.x.len() as u32) * self.parent.dim()
    }

    fn entry(&self, a: usize, b: usize, u: &S) -> Result<Matrix<S>> {
        let m = self.rank();
        let r = self.x.len();
        let pd = self.parent.dim();
        let mut dims = vec![m; r];
        dims.push(pd);
        let mut acc = place_on_legs(&dims, &[r], &self.parent.entry(a + 1, b + 1, u)?);
        for (i, x) in self.x.iter().enumerate() {
            let den = u.clone() - x.clone();
            if den.is_zero() {
                return Err(Error::CoincidentRoots(
                    "variable collides with an adjacent lower level variable".into(),
                ));
            }
            let placed = place_on_legs(&dims, &[i], &crate::linalg::elementary::<S>(m, b, a));
            acc = acc.add(&placed.scaled(&(S::one() / den)));
        }
        Ok(acc)
    }
}

fn factorial_usize(n: usize) -> i64 {
    (1..=n as i64).product::<i64>().max(1)
}

/// Arrays `(m_ab)` of string multiplicities: `m_ab` strings span levels
/// `a..b-1`, and each level `c` must absorb exactly `xi^c` strings.
fn string_arrays(n: usize, xi: &[usize]) -> (Vec<(usize, usize)>, Vec<Vec<usize>>) {
    let pairs: Vec<(usize, usize)> = (1..n).flat_map(|a| (a + 1..=n).map(move |b| (a, b))).collect();
    let mut out = Vec::new();
    let mut current = vec![0usize; pairs.len()];
    let mut loads = vec![0usize; xi.len()];
    fn recurse(
        pairs: &[(usize, usize)],
        idx: usize,
        xi: &[usize],
        loads: &mut Vec<usize>,
        current: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if idx == pairs.len() {
            if loads == xi {
                out.push(current.clone());
            }
            return;
        }
        let (a, b) = pairs[idx];
        let cap = (a..b).map(|c| xi[c - 1] - loads[c - 1]).min().unwrap_or(0);
        for m in 0..=cap {
            for c in a..b {
                loads[c - 1] += m;
            }
            current[idx] = m;
            recurse(pairs, idx + 1, xi, loads, current, out);
            for c in a..b {
                loads[c - 1] -= m;
            }
        }
        current[idx] = 0;
    }
    recurse(&pairs, 0, xi, &mut loads, &mut current, &mut out);
    (pairs, out)
}

/// Offset of the variables consumed on level `c` by pairs preceding
/// `pair_idx` in lexicographic order.
fn consumed_before(pairs: &[(usize, usize)], m: &[usize], pair_idx: usize, c: usize) -> usize {
    pairs[..pair_idx]
        .iter()
        .zip(m)
        .filter(|((_, s), _)| *s > c)
        .map(|(_, &count)| count)
        .sum()
}

fn weight_sum<S: Scalar>(
    currents: &dyn Currents<S>,
    xi: &[usize],
    levels: &[Vec<S>],
    start: &[S],
) -> Result<Vec<S>> {
    let n = currents.rank();
    let (pairs, arrays) = string_arrays(n, xi);
    let perms_per_level: Vec<Vec<Vec<usize>>> = xi
        .iter()
        .map(|&count| (0..count).permutations(count).collect())
        .collect();
    let mut result = vec![S::zero(); start.len()];
    for sym in perms_per_level.iter().map(|ps| ps.iter()).multi_cartesian_product() {
        let var = |c: usize, j: usize| -> &S { &levels[c - 1][sym[c - 1][j - 1]] };
        for m in &arrays {
            let mut coeff = S::one();
            let mut factors: Vec<(usize, usize, S)> = Vec::new();
            let mut degenerate = false;
            'array: for (pair_idx, &(a, b)) in pairs.iter().enumerate() {
                coeff = coeff / S::from_int(factorial_usize(m[pair_idx]));
                for i in 1..=m[pair_idx] {
                    let top = consumed_before(&pairs, m, pair_idx, a) + i;
                    factors.push((a, b, var(a, top).clone()));
                    for c in a..=b.saturating_sub(2) {
                        let hi = consumed_before(&pairs, m, pair_idx, c + 1) + i;
                        let lo = consumed_before(&pairs, m, pair_idx, c) + i;
                        let den = var(c + 1, hi).clone() - var(c, lo).clone();
                        if den.is_zero() {
                            degenerate = true;
                            break 'array;
                        }
                        coeff = coeff / den;
                    }
                }
            }
            if degenerate {
                return Err(Error::CoincidentRoots(
                    "string coefficient hits a coinciding adjacent pair".into(),
                ));
            }
            let mut term = start.to_vec();
            for (a, b, value) in factors.iter().rev() {
                term = currents.entry(*a, *b, value)?.apply(&term);
            }
            result = vec_add(&result, &vec_scaled(&term, &coeff));
        }
    }
    Ok(result)
}

/// Weight function value on the product of highest vectors, without the
/// polynomial clearing factors.
pub fn gaudin_weight_function_raw<S: Scalar>(
    chain: &TensorChain,
    config: &BetheConfig,
    roots: &BetheRoots<S>,
) -> Result<Vec<S>> {
    check_shapes(chain, config, roots)?;
    if config.total() == 0 {
        return Ok(chain.highest_vector());
    }
    let currents = ChainCurrents::new(chain);
    let start = chain.highest_vector::<S>();
    weight_sum(&currents, config.levels(), roots.levels(), &start)
}

/// Weight function multiplied by the polynomial clearing factors, the
/// Gaudin analogue of the cleared Bethe vector.
pub fn gaudin_weight_function<S: Scalar>(
    chain: &TensorChain,
    config: &BetheConfig,
    roots: &BetheRoots<S>,
) -> Result<Vec<S>> {
    let raw = gaudin_weight_function_raw(chain, config, roots)?;
    Ok(vec_scaled(&raw, &clearing_factor(chain, roots)))
}

fn gaudin_recursion_step<S: Scalar>(
    currents: &dyn Currents<S>,
    xi: &[usize],
    levels: &[Vec<S>],
    start: &[S],
) -> Result<Vec<S>> {
    if xi.is_empty() {
        return Ok(start.to_vec());
    }
    let r = xi[0];
    let t1 = &levels[0];
    if xi.len() == 1 {
        let mut w = start.to_vec();
        for i in (0..r).rev() {
            w = currents.entry(1, 2, &t1[i])?.apply(&w);
        }
        return Ok(w);
    }
    let m = currents.rank() - 1;
    let reduced = ReducedCurrents { parent: currents, x: t1.clone() };
    let wd = m.pow(r as u32);
    let pd = start.len();
    let mut lifted = vec![S::zero(); wd * pd];
    lifted[..pd].clone_from_slice(start);
    let inner = gaudin_recursion_step(&reduced, &xi[1..], &levels[1..], &lifted)?;
    if r == 0 {
        return Ok(inner);
    }
    let mut result = vec![S::zero(); pd];
    for assignment in (0..r).map(|_| 1..=m).multi_cartesian_product() {
        let mut block_index = 0;
        for &a in &assignment {
            block_index = block_index * m + (a - 1);
        }
        let g = &inner[block_index * pd..(block_index + 1) * pd];
        if vec_is_zero(g) {
            continue;
        }
        let mut h = g.to_vec();
        for i in (0..r).rev() {
            h = currents.entry(1, assignment[i] + 1, &t1[i])?.apply(&h);
        }
        result = vec_add(&result, &h);
    }
    Ok(result)
}

/// Weight function via the rank recursion; agrees with
/// `gaudin_weight_function` and carries the same clearing factors.
pub fn gaudin_weight_recursive<S: Scalar>(
    chain: &TensorChain,
    config: &BetheConfig,
    roots: &BetheRoots<S>,
) -> Result<Vec<S>> {
    check_shapes(chain, config, roots)?;
    if config.total() == 0 {
        return Ok(chain.highest_vector());
    }
    let currents = ChainCurrents::new(chain);
    let start = chain.highest_vector::<S>();
    let value = gaudin_recursion_step(&currents, config.levels(), roots.levels(), &start)?;
    Ok(vec_scaled(&value, &clearing_factor(chain, roots)))
}

fn check_shapes<S: Scalar>(
    chain: &TensorChain,
    config: &BetheConfig,
    roots: &BetheRoots<S>,
) -> Result<()> {
    if config.n_gl() != chain.n_gl() {
        return Err(Error::MismatchedN { left: chain.n_gl(), right: config.n_gl() });
    }
    if !roots.matches(config) {
        return Err(Error::DimensionMismatch(
            "root shape does not match the level counts".into(),
        ));
    }
    Ok(())
}

/// Residuals of the Gaudin Bethe equations, one per variable in
/// lexicographic order.
pub fn gaudin_bae_residual<S: Scalar>(
    problem: &GaudinProblem,
    roots: &BetheRoots<S>,
) -> Result<Vec<S>> {
    check_shapes(problem.chain(), problem.config(), roots)?;
    let n_levels = problem.config().levels().len();
    let mut residuals = Vec::with_capacity(problem.config().total());
    let recip = |den: S| -> Result<S> {
        if den.is_zero() {
            Err(Error::CoincidentRoots("vanishing denominator in the Bethe equations".into()))
        } else {
            Ok(S::one() / den)
        }
    };
    for a in 1..=n_levels {
        let level = roots.level(a);
        for i in 0..level.len() {
            let t = &level[i];
            let mut acc = S::from_rational(&problem.k_diag()[a - 1])
                - S::from_rational(&problem.k_diag()[a]);
            for (j, z) in problem.chain().z().iter().enumerate() {
                let diff = problem.site_weight(a, j + 1) - problem.site_weight(a + 1, j + 1);
                let r = recip(t.clone() - S::from_rational(z))?;
                acc = acc + r * S::from_int(diff);
            }
            for s in roots.level(a - 1) {
                acc = acc + recip(t.clone() - s.clone())?;
            }
            for (j, s) in level.iter().enumerate() {
                if j != i {
                    acc = acc - recip(t.clone() - s.clone())? * S::from_int(2);
                }
            }
            for s in roots.level(a + 1) {
                acc = acc + recip(t.clone() - s.clone())?;
            }
            residuals.push(acc);
        }
    }
    Ok(residuals)
}

/// Scalar differential operator whose coefficients are the claimed
/// eigenvalues: the ordered product over `a = 1..N` of
/// `d/du - K_a - sum_i Lambda^a_i/(u-z_i) - sum_i 1/(u-t^{a-1}_i)
///  + sum_i 1/(u-t^a_i)`.
pub fn master_operator<S: Scalar>(
    problem: &GaudinProblem,
    roots: &BetheRoots<S>,
    u0: &S,
    order: usize,
) -> Result<DiffOp<ScalarJet<S>>> {
    let n = problem.chain().n_gl();
    let jet_order = order + n;
    let mut factors = Vec::with_capacity(n);
    for a in 1..=n {
        let mut order0 = ScalarJet::constant(-S::from_rational(&problem.k_diag()[a - 1]), jet_order);
        for (j, z) in problem.chain().z().iter().enumerate() {
            let pole = ScalarJet::reciprocal_linear(u0, &S::from_rational(z), jet_order)?;
            order0 = order0.add(&pole.scaled(&(-S::from_int(problem.site_weight(a, j + 1)))));
        }
        for s in roots.level(a - 1) {
            order0 = order0.add(&ScalarJet::reciprocal_linear(u0, s, jet_order)?.neg());
        }
        for s in roots.level(a) {
            order0 = order0.add(&ScalarJet::reciprocal_linear(u0, s, jet_order)?);
        }
        factors.push(DiffOp::from_coeffs(vec![
            order0,
            ScalarJet::constant(S::one(), jet_order),
        ]));
    }
    let mut product = factors[n - 1].clone();
    for a in (0..n - 1).rev() {
        product = factors[a].compose(&product);
    }
    Ok(product)
}

/// Claimed eigenvalue `Z_k(u)` of `G_k(u)` at a Bethe root.
pub fn gaudin_eigenvalue_z<S: Scalar>(
    problem: &GaudinProblem,
    roots: &BetheRoots<S>,
    k: usize,
    u: &S,
) -> Result<S> {
    let n = problem.chain().n_gl();
    if k > n {
        return Err(Error::InvalidRank { n_gl: n, rank: k });
    }
    let master = master_operator(problem, roots, u, 0)?;
    let value = master.coeffs()[n - k].value().clone();
    Ok(if k % 2 == 1 { -value } else { value })
}

/// Checks the eigenvalue identity for every `k` at the given samples,
/// plus the weight and, for the untwisted model, singularity of the
/// weight function vector.
pub fn verify_gaudin_eigenpair<S: Scalar>(
    problem: &GaudinProblem,
    roots: &BetheRoots<S>,
    u_samples: &[S],
) -> Result<EigenpairReport<S>> {
    if !is_off_diagonal(roots) {
        return Err(Error::NotOffDiagonal(
            "coinciding variables within a level or between adjacent levels".into(),
        ));
    }
    let chain = problem.chain();
    let vector = gaudin_weight_function(chain, problem.config(), roots)?;
    let norm = vec_max_abs(&vector);
    if norm == 0.0 {
        return Err(Error::ZeroBetheVector);
    }

    let expected_weight = bethe_weight(chain, problem.config());
    let weight_ok = vector
        .iter()
        .enumerate()
        .all(|(idx, c)| c.is_zero() || chain.basis_weight(idx) == expected_weight);

    let singular_residual = if problem.is_untwisted() {
        let mut worst: f64 = 0.0;
        for a in 1..chain.n_gl() {
            let raise = Matrix::<S>::cast_from(&chain.global_generator(a, a + 1));
            worst = worst.max(vec_max_abs(&raise.apply(&vector)) / norm);
        }
        Some(worst)
    } else {
        None
    };

    let bae = gaudin_bae_residual(problem, roots)?;
    let max_bae_residual = bae.iter().map(S::abs_f64).fold(0.0, f64::max);

    let k_matrix = problem.k_matrix();
    let mut checks = Vec::new();
    let mut max_rel: f64 = 0.0;
    for u in u_samples {
        let transfers = gaudin_transfer_all(chain, &k_matrix, u)?;
        for k in 1..=chain.n_gl() {
            let eigenvalue = gaudin_eigenvalue_z(problem, roots, k, u)?;
            let lhs = transfers[k].apply(&vector);
            let rhs = vec_scaled(&vector, &eigenvalue);
            let residual = vec_max_abs(&vec_sub(&lhs, &rhs)) / norm;
            max_rel = max_rel.max(residual);
            checks.push(EigenpairCheck {
                k,
                u: u.clone(),
                eigenvalue,
                relative_residual: residual,
            });
        }
    }
    Ok(EigenpairReport {
        checks,
        max_relative_residual: max_rel,
        max_bae_residual,
        vector_norm: norm,
        weight_ok,
        singular_residual,
    })
}

/// Quadratic Gaudin Hamiltonian attached to site `i` (1-based):
/// `H_i = sum_a K_a e_aa^(i) + sum_ab sum_{j != i} e_ab^(i) e_ba^(j) / (z_i - z_j)`.
pub fn gaudin_hamiltonian(
    chain: &TensorChain,
    k_diag: &[Rational],
    i: usize,
) -> Result<Matrix<Rational>> {
    let n = chain.n_gl();
    let dims = chain.site_dims();
    let d = chain.dim();
    let site = i - 1;
    let mut acc = Matrix::zeros(d, d);
    for a in 1..=n {
        let gen = chain.modules()[site].generator(a, a);
        acc = acc.add(&place_on_legs(&dims, &[site], gen).scaled(&k_diag[a - 1]));
    }
    for j in 0..chain.len() {
        if j == site {
            continue;
        }
        let dz = chain.z()[site].clone() - chain.z()[j].clone();
        if dz.is_zero() {
            return Err(Error::CoincidentEvaluationPoints(format!(
                "sites {} and {} share an evaluation point",
                site + 1,
                j + 1
            )));
        }
        let inv = rat_int(1) / dz;
        for a in 1..=n {
            for b in 1..=n {
                let left = place_on_legs(&dims, &[site], chain.modules()[site].generator(a, b));
                let right = place_on_legs(&dims, &[j], chain.modules()[j].generator(b, a));
                acc = acc.add(&left.matmul(&right).scaled(&inv));
            }
        }
    }
    Ok(acc)
}

/// Rational dynamical Hamiltonian
/// `G_a = sum_i z_i e_aa^(i) + sum_{b != a} (e_ab e_ba - e_aa)/(K_a - K_b)`.
pub fn dynamical_hamiltonian_g(
    chain: &TensorChain,
    k_diag: &[Rational],
    a: usize,
) -> Result<Matrix<Rational>> {
    let n = chain.n_gl();
    let mut acc = weighted_diagonal(chain, a);
    for b in 1..=n {
        if b == a {
            continue;
        }
        let dk = k_diag[a - 1].clone() - k_diag[b - 1].clone();
        if dk.is_zero() {
            return Err(Error::DegenerateTwist(format!(
                "entries {} and {} of the twist coincide",
                a, b
            )));
        }
        let eab = chain.global_generator(a, b);
        let eba = chain.global_generator(b, a);
        let eaa = chain.global_generator(a, a);
        let combo = eab.matmul(&eba).sub(&eaa).scaled(&(rat_int(1) / dk));
        acc = acc.add(&combo);
    }
    Ok(acc)
}

/// Trigonometric dynamical Hamiltonian
/// `X_a = -(e_aa)^2/2 + sum_i z_i e_aa^(i) + sum_b sum_{i<j} e_ab^(i) e_ba^(j)
///  + sum_{b != a} K_b/(K_a - K_b) (e_ab e_ba - e_aa)`.
pub fn dynamical_hamiltonian_x(
    chain: &TensorChain,
    k_diag: &[Rational],
    a: usize,
) -> Result<Matrix<Rational>> {
    let n = chain.n_gl();
    let dims = chain.site_dims();
    let eaa = chain.global_generator(a, a);
    let mut acc = eaa.matmul(&eaa).scaled(&crate::scalars::rat(-1, 2));
    acc = acc.add(&weighted_diagonal(chain, a));
    for b in 1..=n {
        for i in 0..chain.len() {
            for j in i + 1..chain.len() {
                let left = place_on_legs(&dims, &[i], chain.modules()[i].generator(a, b));
                let right = place_on_legs(&dims, &[j], chain.modules()[j].generator(b, a));
                acc = acc.add(&left.matmul(&right));
            }
        }
    }
    for b in 1..=n {
        if b == a {
            continue;
        }
        let dk = k_diag[a - 1].clone() - k_diag[b - 1].clone();
        if dk.is_zero() {
            return Err(Error::DegenerateTwist(format!(
                "entries {} and {} of the twist coincide",
                a, b
            )));
        }
        let eab = chain.global_generator(a, b);
        let eba = chain.global_generator(b, a);
        let gaa = chain.global_generator(a, a);
        let combo = eab
            .matmul(&eba)
            .sub(&gaa)
            .scaled(&(k_diag[b - 1].clone() / dk));
        acc = acc.add(&combo);
    }
    Ok(acc)
}

fn weighted_diagonal(chain: &TensorChain, a: usize) -> Matrix<Rational> {
    let dims = chain.site_dims();
    let d = chain.dim();
    let mut acc = Matrix::zeros(d, d);
    for i in 0..chain.len() {
        let gen = chain.modules()[i].generator(a, a);
        acc = acc.add(&place_on_legs(&dims, &[i], gen).scaled(&chain.z()[i]));
    }
    acc
}

/// First Casimir operator `sum_a e_aa` on a single module.
pub fn casimir_c1(module: &GlModule) -> Matrix<Rational> {
    let n = module.n_gl();
    let d = module.dim();
    let mut acc = Matrix::zeros(d, d);
    for a in 1..=n {
        acc = acc.add(module.generator(a, a));
    }
    acc
}

/// Second Casimir operator
/// `sum_{a<b} (e_aa e_bb - e_ab e_ba + e_aa)` on a single module.
pub fn casimir_c2(module: &GlModule) -> Matrix<Rational> {
    let n = module.n_gl();
    let d = module.dim();
    let mut acc = Matrix::zeros(d, d);
    for a in 1..=n {
        for b in a + 1..=n {
            let term = module
                .generator(a, a)
                .matmul(module.generator(b, b))
                .sub(&module.generator(a, b).matmul(module.generator(b, a)))
                .add(module.generator(a, a));
            acc = acc.add(&term);
        }
    }
    acc
}

/// Denominator used when interpolating pencil coefficients in `u`; the
/// power is generous so derivative terms never overflow it.
pub fn gaudin_denominator(chain: &TensorChain) -> Poly<Rational> {
    let mut roots = Vec::new();
    for z in chain.z() {
        for _ in 0..2 * chain.n_gl() {
            roots.push(z.clone());
        }
    }
    crate::scalars::poly_from_roots(&roots)
}

/// Expands `sum_k (-1)^k G_k(u) x^{N-k} / prod_a (x - K_a)` through
/// order two at large `u`.
pub fn gaudin_dynamical_expansion(
    chain: &TensorChain,
    k_diag: &[Rational],
    x: &Rational,
) -> Result<DynamicalExpansion> {
    let n = chain.n_gl();
    let d = chain.dim();
    for k in k_diag {
        if x == k {
            return Err(Error::PoleAtSample(format!("{x}")));
        }
    }
    let k_matrix = Matrix::from_fn(n, n, |i, j| {
        if i == j {
            k_diag[i].clone()
        } else {
            rat_int(0)
        }
    });
    let den = gaudin_denominator(chain);
    let excluded = chain.z().to_vec();
    let stacked = |u: &Rational| -> Result<Matrix<Rational>> {
        let transfers = gaudin_transfer_all(chain, &k_matrix, u)?;
        let mut out = Matrix::zeros((n + 1) * d, d);
        for (k, t) in transfers.iter().enumerate() {
            for i in 0..d {
                for j in 0..d {
                    out.set(k * d + i, j, t.at(i, j).clone());
                }
            }
        }
        Ok(out)
    };
    let laurent = matrix_laurent_at_infinity(stacked, &den, 2, 907, &excluded)?;
    let mut x_den = rat_int(1);
    for k in k_diag {
        x_den = x_den * (x.clone() - k.clone());
    }
    let mut orders = [Matrix::zeros(d, d), Matrix::zeros(d, d), Matrix::zeros(d, d)];
    for k in 0..=n {
        let mut x_factor = rat_int(1);
        for _ in 0..n - k {
            x_factor = x_factor * x.clone();
        }
        x_factor = x_factor / x_den.clone();
        if k % 2 == 1 {
            x_factor = -x_factor;
        }
        for (m, target) in orders.iter_mut().enumerate() {
            let mut block = Matrix::zeros(d, d);
            for i in 0..d {
                for j in 0..d {
                    block.set(i, j, laurent[m].at(k * d + i, j).clone());
                }
            }
            *target = target.add(&block.scaled(&x_factor));
        }
    }
    let [order0, order1, order2] = orders;
    Ok(DynamicalExpansion { order0, order1, order2 })
}

/// Exact Laurent data of `G_2` at the evaluation point `z_i`: the
/// coefficient of `(u - z_i)^{-2}`, expected to be `C_2^(i)`, and the
/// coefficient of `(u - z_i)^{-1}`, expected to be
/// `C_1^(i)(tr K + sum_{j != i} C_1^(j)/(z_i - z_j)) - H_i`.
pub fn g2_residues_at_site(
    chain: &TensorChain,
    k_diag: &[Rational],
    i: usize,
) -> Result<(Matrix<Rational>, Matrix<Rational>)> {
    let n = chain.n_gl();
    let d = chain.dim();
    let k_matrix = Matrix::from_fn(n, n, |r, c| {
        if r == c {
            k_diag[r].clone()
        } else {
            rat_int(0)
        }
    });
    let zi = chain.z()[i - 1].clone();
    let mut den_roots = Vec::new();
    for z in chain.z() {
        den_roots.push(z.clone());
        den_roots.push(z.clone());
    }
    let den = crate::scalars::poly_from_roots(&den_roots);
    let deg = den.degree().unwrap_or(0);
    let excluded: Vec<Rational> = chain.z().to_vec();
    let points = sample_points(53 + i as u64, deg + 3, &excluded);
    let mut values = Vec::with_capacity(points.len());
    for p in &points {
        values.push(gaudin_transfer(chain, &k_matrix, 2, p)?);
    }
    let rest_roots: Vec<Rational> = chain
        .z()
        .iter()
        .filter(|z| **z != zi)
        .flat_map(|z| [z.clone(), z.clone()])
        .collect();
    let rest = crate::scalars::poly_from_roots(&rest_roots);
    let rest_at = rest.eval(&zi);
    let rest_dot_at = rest.derivative().eval(&zi);
    let mut second = Matrix::zeros(d, d);
    let mut first = Matrix::zeros(d, d);
    for r in 0..d {
        for c in 0..d {
            let ys: Vec<Rational> = values
                .iter()
                .zip(&points)
                .map(|(m, p)| m.at(r, c).clone() * den.eval(p))
                .collect();
            let num = crate::scalars::interpolate_points(&points[..=deg], &ys[..=deg]);
            for extra in deg + 1..points.len() {
                if num.eval(&points[extra]) != ys[extra] {
                    return Err(Error::DegreeBoundExceeded { bound: deg });
                }
            }
            let p_at = num.eval(&zi);
            let p_dot_at = num.derivative().eval(&zi);
            second.set(r, c, p_at.clone() / rest_at.clone());
            first.set(
                r,
                c,
                p_dot_at / rest_at.clone()
                    - p_at * rest_dot_at.clone() / (rest_at.clone() * rest_at.clone()),
            );
        }
    }
    Ok((second, first))
}
