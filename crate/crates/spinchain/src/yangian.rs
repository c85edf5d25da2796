//! Monodromy and transfer matrices for inhomogeneous XXX-type chains.
//!
//! A chain is a tensor product of evaluation modules `M_1(z_1) x .. x M_n(z_n)`.
//! Its monodromy acts entrywise as `T_ab(u) = [T^(n)(u) .. T^(1)(u)]_ab`
//! with single site blocks `T^(i)_cd(u) = delta_cd + e_dc^(i) / (u - z_i)`.
//! Transfer matrices `T_{k,Q}(u)` trace the fused monodromy on the `k`-th
//! exterior power against a twist `Q`, and assemble into a difference
//! operator pencil whose coefficients alternate in sign.

use crate::linalg::{
    apply_first_group, apply_on_legs, apply_on_legs_matrix, partial_trace_first, place_on_legs,
    Matrix,
};
use crate::reps::{GlModule, GlWeight};
use crate::rmatrix::{wedge_inclusion, wedge_power_matrix, wedge_projection};
use crate::scalars::{
    interpolate_points, laurent_at_infinity, rat_int, sample_points, Poly, Rational, Scalar,
};
use crate::{Error, Result};
use itertools::Itertools;
use num_traits::Zero;

/// An ordered tensor product of evaluation modules.
#[derive(Debug, Clone)]
pub struct TensorChain {
    modules: Vec<GlModule>,
    z: Vec<Rational>,
}

impl TensorChain {
    pub fn new(modules: Vec<GlModule>, z: Vec<Rational>) -> Result<Self> {
        if modules.is_empty() {
            return Err(Error::DimensionMismatch("a chain needs at least one module".into()));
        }
        if modules.len() != z.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} modules but {} evaluation points",
                modules.len(),
                z.len()
            )));
        }
        let n = modules[0].n_gl();
        for m in &modules {
            if m.n_gl() != n {
                return Err(Error::MismatchedN { left: n, right: m.n_gl() });
            }
        }
        Ok(Self { modules, z })
    }

    pub fn n_gl(&self) -> usize {
        self.modules[0].n_gl()
    }

    pub fn len(&self) -> usize {
        self.modules.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn modules(&self) -> &[GlModule] {
        &self.modules
    }

    pub fn module_refs(&self) -> Vec<&GlModule> {
        self.modules.iter().collect()
    }

    pub fn z(&self) -> &[Rational] {
        &self.z
    }

    pub fn site_dims(&self) -> Vec<usize> {
        self.modules.iter().map(GlModule::dim).collect()
    }

    pub fn dim(&self) -> usize {
        self.site_dims().iter().product()
    }

    /// Highest weights of the site modules, in site order.
    pub fn site_highest_weights(&self) -> Vec<&GlWeight> {
        self.modules.iter().map(GlModule::highest_weight).collect()
    }

    /// Flat index of the tensor product of the site highest vectors.
    pub fn highest_flat_index(&self) -> usize {
        let mut flat = 0;
        for m in &self.modules {
            flat = flat * m.dim() + m.hwv_index();
        }
        flat
    }

    pub fn highest_vector<S: Scalar>(&self) -> Vec<S> {
        crate::linalg::unit_vector(self.dim(), self.highest_flat_index())
    }

    /// Weight of a product basis vector.
    pub fn basis_weight(&self, mut flat: usize) -> GlWeight {
        let mut w = GlWeight::zero(self.n_gl());
        for m in self.modules.iter().rev() {
            let idx = flat % m.dim();
            flat /= m.dim();
            w = w.add(m.basis_weight(idx));
        }
        w
    }

    /// The same chain with sites and evaluation points reversed.
    pub fn reversed(&self) -> TensorChain {
        TensorChain {
            modules: self.modules.iter().rev().cloned().collect(),
            z: self.z.iter().rev().cloned().collect(),
        }
    }

    /// Sum of `e_ab` over all sites.
    pub fn global_generator(&self, a: usize, b: usize) -> Matrix<Rational> {
        crate::reps::tensor_generator(&self.module_refs(), a, b)
            .expect("chain modules share one gl rank")
    }

    fn check_no_pole<S: Scalar>(&self, u: &S) -> Result<()> {
        for zi in &self.z {
            let d = u.clone() - S::from_rational(zi);
            if d.is_negligible(u.abs_f64() + zi.abs_f64()) {
                return Err(Error::PoleAtEvaluationPoint { point: format!("{u}"), shift: 0 });
            }
        }
        Ok(())
    }
}

/// Twist matrix entering transfer matrices and Bethe equations.
#[derive(Debug, Clone, PartialEq)]
pub struct TwistMatrix {
    mat: Matrix<Rational>,
}

impl TwistMatrix {
    pub fn identity(n: usize) -> Self {
        Self { mat: Matrix::identity(n) }
    }

    pub fn diagonal(entries: Vec<Rational>) -> Self {
        let n = entries.len();
        let mut m = Matrix::zeros(n, n);
        for (i, e) in entries.into_iter().enumerate() {
            m.set(i, i, e);
        }
        Self { mat: m }
    }

    pub fn full(mat: Matrix<Rational>) -> Result<Self> {
        if mat.rows() != mat.cols() {
            return Err(Error::DimensionMismatch("twist must be square".into()));
        }
        Ok(Self { mat })
    }

    pub fn n(&self) -> usize {
        self.mat.rows()
    }

    pub fn matrix(&self) -> &Matrix<Rational> {
        &self.mat
    }

    pub fn transposed(&self) -> Self {
        Self { mat: self.mat.transpose() }
    }

    pub fn is_identity(&self) -> bool {
        self.mat == Matrix::identity(self.n())
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.n()).all(|i| {
            (0..self.n()).all(|j| i == j || self.mat.at(i, j).is_zero())
        })
    }

    pub fn diagonal_entries(&self) -> Option<Vec<Rational>> {
        self.is_diagonal().then(|| (0..self.n()).map(|i| self.mat.at(i, i).clone()).collect())
    }

    /// Requires pairwise distinct diagonal entries.
    pub fn distinct_diagonal(&self) -> Result<Vec<Rational>> {
        let d = self.diagonal_entries().ok_or_else(|| {
            Error::DegenerateTwist("a diagonal twist is required here".into())
        })?;
        for i in 0..d.len() {
            for j in i + 1..d.len() {
                if d[i] == d[j] {
                    return Err(Error::DegenerateTwist(format!(
                        "equal diagonal entries at positions {i} and {j}"
                    )));
                }
            }
        }
        Ok(d)
    }
}

/// All monodromy entries `T_ab(u)` as an `N x N` array of chain operators.
pub fn chain_t_blocks<S: Scalar>(chain: &TensorChain, u: &S) -> Result<Vec<Vec<Matrix<S>>>> {
    chain.check_no_pole(u)?;
    let n = chain.n_gl();
    let dims = chain.site_dims();
    let cd = chain.dim();
    let site_block = |site: usize| -> Vec<Vec<Matrix<S>>> {
        let inv = S::one() / (u.clone() - S::from_rational(&chain.z[site]));
        let mut blocks = Vec::with_capacity(n);
        for c in 1..=n {
            let mut row = Vec::with_capacity(n);
            for d in 1..=n {
                let e = Matrix::<S>::cast_from(chain.modules[site].generator(d, c));
                let placed = place_on_legs(&dims, &[site], &e).scaled(&inv);
                let block = if c == d { placed.add(&Matrix::identity(cd)) } else { placed };
                row.push(block);
            }
            blocks.push(row);
        }
        blocks
    };
    let mut acc = site_block(chain.len() - 1);
    for site in (0..chain.len() - 1).rev() {
        let b = site_block(site);
        acc = block_matmul(&acc, &b);
    }
    Ok(acc)
}

pub(crate) fn block_matmul<S: Scalar>(
    a: &[Vec<Matrix<S>>],
    b: &[Vec<Matrix<S>>],
) -> Vec<Vec<Matrix<S>>> {
    let n = a.len();
    let dim = a[0][0].rows();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut row = Vec::with_capacity(n);
        for j in 0..n {
            let mut acc = Matrix::zeros(dim, dim);
            for k in 0..n {
                acc = acc.add(&a[i][k].matmul(&b[k][j]));
            }
            row.push(acc);
        }
        out.push(row);
    }
    out
}

/// Single monodromy entry `T_ab(u)` as a chain operator (1-based `a, b`).
pub fn chain_t_entry<S: Scalar>(
    chain: &TensorChain,
    a: usize,
    b: usize,
    u: &S,
) -> Result<Matrix<S>> {
    let n = chain.n_gl();
    if a < 1 || a > n || b < 1 || b > n {
        return Err(Error::InvalidRank { n_gl: n, rank: a.max(b) });
    }
    let blocks = chain_t_blocks(chain, u)?;
    Ok(blocks[a - 1][b - 1].clone())
}

/// Applies the monodromy `T^(aux_leg, chain)(u)` to a vector on the tensor
/// product with factor dimensions `aux_dims ++ site_dims`; the designated
/// auxiliary leg must have dimension `N`.
pub fn apply_monodromy_on_aux<S: Scalar>(
    chain: &TensorChain,
    aux_dims: &[usize],
    aux_leg: usize,
    u: &S,
    v: Vec<S>,
) -> Result<Vec<S>> {
    chain.check_no_pole(u)?;
    let n = chain.n_gl();
    assert_eq!(aux_dims[aux_leg], n, "auxiliary leg must carry the vector representation");
    let mut dims = aux_dims.to_vec();
    dims.extend(chain.site_dims());
    let mut v = v;
    for site in 0..chain.len() {
        let op = site_factor_two_leg(chain, site, u);
        v = apply_on_legs(&dims, &[aux_leg, aux_dims.len() + site], &op, &v);
    }
    Ok(v)
}

/// Two-leg matrix of `T^(site)` on (auxiliary vector space, site module).
fn site_factor_two_leg<S: Scalar>(chain: &TensorChain, site: usize, u: &S) -> Matrix<S> {
    let n = chain.n_gl();
    let d = chain.modules[site].dim();
    let inv = S::one() / (u.clone() - S::from_rational(&chain.z[site]));
    let mut op = Matrix::identity(n * d);
    for c in 1..=n {
        for dd in 1..=n {
            let e = crate::linalg::elementary::<S>(n, c, dd);
            let g = Matrix::<S>::cast_from(chain.modules[site].generator(dd, c));
            op = op.add(&e.kron(&g).scaled(&inv));
        }
    }
    op
}

/// Fused monodromy on `Wedge^k C^N x chain`, the ordered product
/// `T^(k)(u) T^(k-1)(u-1) .. T^(1)(u-k+1)` restricted to the wedge.
pub fn chain_t_wedge<S: Scalar>(chain: &TensorChain, k: usize, u: &S) -> Result<Matrix<S>> {
    let n = chain.n_gl();
    if k == 0 || k > n {
        return Err(Error::InvalidRank { n_gl: n, rank: k });
    }
    let cd = chain.dim();
    let mut dims = vec![n; k];
    dims.extend(chain.site_dims());
    let incl = Matrix::<S>::cast_from(&wedge_inclusion(n, k)?);
    let proj = Matrix::<S>::cast_from(&wedge_projection(n, k)?);
    let mut rect = apply_first_group(&incl, cd, &Matrix::identity(incl.cols() * cd));
    for p in 1..=k {
        let arg = u.clone() + S::from_int(p as i64 - k as i64);
        chain.check_no_pole(&arg).map_err(|_| Error::PoleAtEvaluationPoint {
            point: format!("{u}"),
            shift: p as i64 - k as i64,
        })?;
        for site in 0..chain.len() {
            let op = site_factor_two_leg(chain, site, &arg);
            rect = apply_on_legs_matrix(&dims, &[p - 1, k + site], &op, &rect);
        }
    }
    let small = apply_first_group(&proj, cd, &rect);
    let recon = apply_first_group(&incl, cd, &small);
    let defect = recon.sub(&rect).max_abs();
    let ok = if S::EXACT { defect == 0.0 } else { defect <= 1e-9 * rect.max_abs().max(1.0) };
    if !ok {
        return Err(Error::NotInvariant(format!(
            "fused monodromy defect magnitude {defect:e} on wedge rank {k}"
        )));
    }
    Ok(small)
}

/// Transfer matrix `T_{k,Q}(u)`: weighted trace of the fused monodromy over
/// the exterior power, with `T_{0,Q} = 1`.
pub fn transfer_matrix<S: Scalar>(
    chain: &TensorChain,
    q: &TwistMatrix,
    k: usize,
    u: &S,
) -> Result<Matrix<S>> {
    let n = chain.n_gl();
    if q.n() != n {
        return Err(Error::MismatchedN { left: n, right: q.n() });
    }
    if k == 0 {
        return Ok(Matrix::identity(chain.dim()));
    }
    if k > n {
        return Err(Error::InvalidRank { n_gl: n, rank: k });
    }
    let qk = wedge_power_matrix(&Matrix::<S>::cast_from(q.matrix()), k)?;
    let full = chain_t_wedge(chain, k, u)?;
    Ok(partial_trace_first(qk.rows(), chain.dim(), &full, &qk))
}

/// Quantum determinant via the column ordered permutation sum
/// `sum_tau sign(tau) T_{1,tau(1)}(u) .. T_{N,tau(N)}(u-N+1)`.
pub fn qdet<S: Scalar>(chain: &TensorChain, u: &S) -> Result<Matrix<S>> {
    let n = chain.n_gl();
    let sigma: Vec<usize> = (1..=n).collect();
    qdet_with_ordering(chain, u, &sigma, false)
}

/// Quantum determinant for an arbitrary row permutation `sigma`, in either
/// the ascending or the reversed factor ordering.
pub fn qdet_with_ordering<S: Scalar>(
    chain: &TensorChain,
    u: &S,
    sigma: &[usize],
    reversed: bool,
) -> Result<Matrix<S>> {
    let n = chain.n_gl();
    assert_eq!(sigma.len(), n, "sigma must be a permutation of 1..=N");
    let cd = chain.dim();
    let mut blocks_at_shift = Vec::with_capacity(n);
    for p in 0..n {
        let arg = u.clone() - S::from_int(p as i64);
        let blocks = chain_t_blocks(chain, &arg).map_err(|_| Error::PoleAtEvaluationPoint {
            point: format!("{u}"),
            shift: -(p as i64),
        })?;
        blocks_at_shift.push(blocks);
    }
    let sigma0: Vec<usize> = sigma.iter().map(|&s| s - 1).collect();
    let sign_sigma = permutation_sign_usize(&sigma0);
    let mut acc = Matrix::zeros(cd, cd);
    for tau in (0..n).permutations(n) {
        let sign = sign_sigma * permutation_sign_usize(&tau);
        let mut prod = Matrix::identity(cd);
        if !reversed {
            for p in 0..n {
                prod = prod.matmul(&blocks_at_shift[p][sigma0[p]][tau[p]]);
            }
        } else {
            for p in (0..n).rev() {
                prod = prod.matmul(&blocks_at_shift[p][tau[p]][sigma0[p]]);
            }
        }
        let signed = prod.scaled(&S::from_int(sign));
        acc = acc.add(&signed);
    }
    Ok(acc)
}

fn permutation_sign_usize(perm: &[usize]) -> i64 {
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

/// Modified transfer matrix
/// `S_{k,Q}(u) = (N-k)!^{-1} sum_l (-1)^{k-l} (N-l)!/(k-l)! T_{l,Q}(u)`.
pub fn modified_transfer<S: Scalar>(
    chain: &TensorChain,
    q: &TwistMatrix,
    k: usize,
    u: &S,
) -> Result<Matrix<S>> {
    let n = chain.n_gl();
    if k > n {
        return Err(Error::InvalidRank { n_gl: n, rank: k });
    }
    let cd = chain.dim();
    let mut acc = Matrix::zeros(cd, cd);
    for l in 0..=k {
        let mut c = factorial(n - l) / (factorial(k - l) * factorial(n - k));
        if (k - l) % 2 == 1 {
            c = -c;
        }
        let term = transfer_matrix(chain, q, l, u)?;
        acc = acc.add(&term.scaled(&S::from_rational(&c)));
    }
    Ok(acc)
}

pub(crate) fn factorial(n: usize) -> Rational {
    let mut acc = rat_int(1);
    for i in 1..=n as i64 {
        acc = acc * rat_int(i);
    }
    acc
}

/// Kinds of operator pencils produced by transfer matrix families.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PencilKind {
    /// Coefficients of powers of the shift `exp(-d/du)`.
    Shift,
    /// Coefficients of descending powers of `d/du`.
    Differential,
}

/// Operator pencil `sum_k coefficients[k] X^k` (shift) or
/// `sum_k coefficients[k] (d/du)^{N-k}` (differential); the leading
/// coefficient is the identity.
#[derive(Debug, Clone)]
pub struct OperatorPencil<S> {
    pub coefficients: Vec<Matrix<S>>,
    pub kind: PencilKind,
}

/// Difference operator pencil with coefficients `(-1)^k T_{k,Q}(u)`.
pub fn difference_operator<S: Scalar>(
    chain: &TensorChain,
    q: &TwistMatrix,
    u: &S,
) -> Result<OperatorPencil<S>> {
    let n = chain.n_gl();
    let mut coefficients = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let mut t = transfer_matrix(chain, q, k, u)?;
        if k % 2 == 1 {
            t = t.scaled(&(-S::one()));
        }
        coefficients.push(t);
    }
    Ok(OperatorPencil { coefficients, kind: PencilKind::Shift })
}

/// Laurent coefficients at `u = infinity` of a matrix valued rational
/// function with declared denominator, via exact interpolation.
pub fn matrix_laurent_at_infinity(
    eval: impl Fn(&Rational) -> Result<Matrix<Rational>>,
    den: &Poly<Rational>,
    order: usize,
    seed: u64,
    excluded: &[Rational],
) -> Result<Vec<Matrix<Rational>>> {
    let deg = den.degree().unwrap_or(0);
    let points = sample_points(seed, deg + 3, excluded);
    let mut values = Vec::with_capacity(points.len());
    for p in &points {
        values.push(eval(p)?);
    }
    let rows = values[0].rows();
    let cols = values[0].cols();
    let xs: Vec<Rational> = points.clone();
    let den_vals: Vec<Rational> = points.iter().map(|p| den.eval(p)).collect();
    let mut out = vec![Matrix::zeros(rows, cols); order + 1];
    for i in 0..rows {
        for j in 0..cols {
            let ys: Vec<Rational> = values
                .iter()
                .zip(&den_vals)
                .map(|(m, d)| m.at(i, j).clone() * d.clone())
                .collect();
            let num = interpolate_points(&xs[..=deg], &ys[..=deg]);
            for extra in deg + 1..xs.len() {
                if num.eval(&xs[extra]) != ys[extra] {
                    return Err(Error::DegreeBoundExceeded { bound: deg });
                }
            }
            let laurent = laurent_at_infinity(&num, den, order)?;
            for (m, c) in laurent.into_iter().enumerate() {
                out[m].set(i, j, c);
            }
        }
    }
    Ok(out)
}

/// Denominator `prod_i prod_{j=0..k-1} (u - j - z_i)` of `T_{k,Q}(u)`.
pub fn transfer_denominator(chain: &TensorChain, k: usize) -> Poly<Rational> {
    let mut factors = Vec::new();
    for zi in chain.z() {
        for j in 0..k as i64 {
            factors.push(zi.clone() + rat_int(j));
        }
    }
    crate::scalars::poly_from_roots(&factors)
}

/// Points to avoid when sampling transfer matrices in `u`.
pub fn transfer_excluded_points(chain: &TensorChain) -> Vec<Rational> {
    let n = chain.n_gl() as i64;
    let mut ex = Vec::new();
    for zi in chain.z() {
        for j in 0..n {
            let p = zi.clone() + rat_int(j);
            if !ex.contains(&p) {
                ex.push(p);
            }
        }
    }
    ex
}

/// First orders of the large-`u` expansion of the twisted transfer family,
/// organised as a generating function in an auxiliary variable `x`.
#[derive(Debug, Clone)]
pub struct DynamicalExpansion {
    pub order0: Matrix<Rational>,
    pub order1: Matrix<Rational>,
    pub order2: Matrix<Rational>,
}

/// Expands `sum_k (-1)^k T_{k,K}(u) x^{N-k} / prod_a (x - K_a)` through
/// order `u^{-2}`; requires a diagonal twist with distinct entries and
/// `x` away from them.
pub fn xxx_dynamical_expansion(
    chain: &TensorChain,
    twist: &TwistMatrix,
    x: &Rational,
) -> Result<DynamicalExpansion> {
    let n = chain.n_gl();
    let kd = twist.distinct_diagonal()?;
    if kd.iter().any(|ka| ka == x) {
        return Err(Error::PoleAtSample(format!("{x}")));
    }
    let mut denom_x = rat_int(1);
    for ka in &kd {
        denom_x = denom_x * (x.clone() - ka.clone());
    }
    let excluded = transfer_excluded_points(chain);
    let cd = chain.dim();
    let mut orders = vec![Matrix::<Rational>::zeros(cd, cd); 3];
    for k in 0..=n {
        let den = transfer_denominator(chain, k);
        let laurent = matrix_laurent_at_infinity(
            |u| transfer_matrix(chain, twist, k, u),
            &den,
            2,
            101 + k as u64,
            &excluded,
        )?;
        let mut xfac = rat_int(1);
        for _ in 0..n - k {
            xfac = xfac * x.clone();
        }
        if k % 2 == 1 {
            xfac = -xfac;
        }
        xfac = xfac / denom_x.clone();
        for m in 0..3 {
            orders[m] = orders[m].add(&laurent[m].scaled(&xfac));
        }
    }
    let order2 = orders.pop().expect("three orders");
    let order1 = orders.pop().expect("three orders");
    let order0 = orders.pop().expect("three orders");
    Ok(DynamicalExpansion { order0, order1, order2 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::rat;

    fn single_site_gl2() -> TensorChain {
        TensorChain::new(vec![GlModule::vector_rep(2)], vec![rat_int(0)]).unwrap()
    }

    #[test]
    fn single_site_monodromy_entries_match_the_evaluation_formula() {
        let chain = single_site_gl2();
        let u = rat(5, 2);
        let t12 = chain_t_entry(&chain, 1, 2, &u).unwrap();
        let expected = crate::linalg::elementary::<Rational>(2, 2, 1)
            .scaled(&(rat_int(1) / u.clone()));
        assert_eq!(t12, expected, "T_12(u) = e_21 / (u - z)");
        let t11 = chain_t_entry(&chain, 1, 1, &u).unwrap();
        let expected = Matrix::identity(2).add(
            &crate::linalg::elementary::<Rational>(2, 1, 1).scaled(&(rat_int(1) / u)),
        );
        assert_eq!(t11, expected, "T_11(u) = 1 + e_11 / (u - z)");
    }

    #[test]
    fn monodromy_evaluation_at_an_inhomogeneity_is_rejected() {
        let chain = single_site_gl2();
        match chain_t_entry(&chain, 1, 1, &rat_int(0)) {
            Err(Error::PoleAtEvaluationPoint { .. }) => {}
            other => panic!("expected PoleAtEvaluationPoint, got {other:?}"),
        }
    }

    #[test]
    fn quantum_determinant_of_a_single_vector_site_is_the_known_scalar() {
        let chain = single_site_gl2();
        let u = rat(7, 3);
        let q = qdet(&chain, &u).unwrap();
        let scalar = (u.clone() + rat_int(1)) / u.clone();
        assert_eq!(q, Matrix::identity(2).scaled(&scalar), "qdet = (u - z + 1)/(u - z)");
    }

    #[test]
    fn top_transfer_matrix_is_the_twist_determinant_times_qdet() {
        let module = GlModule::vector_rep(2);
        let chain =
            TensorChain::new(vec![module.clone(), module], vec![rat_int(0), rat_int(3)]).unwrap();
        let q = TwistMatrix::diagonal(vec![rat_int(2), rat(1, 3)]);
        let u = rat(9, 4);
        let t2 = transfer_matrix(&chain, &q, 2, &u).unwrap();
        let qd = qdet(&chain, &u).unwrap();
        assert_eq!(t2, qd.scaled(&q.matrix().det()), "top transfer is det(Q) qdet");
    }

    #[test]
    fn zeroth_transfer_matrix_is_the_identity_and_pencil_leads_with_it() {
        let chain = single_site_gl2();
        let q = TwistMatrix::identity(2);
        let u = rat(1, 3);
        assert_eq!(transfer_matrix(&chain, &q, 0, &u).unwrap(), Matrix::identity(2));
        let pencil = difference_operator(&chain, &q, &u).unwrap();
        assert_eq!(pencil.coefficients.len(), 3);
        assert_eq!(pencil.coefficients[0], Matrix::identity(2));
        assert_eq!(pencil.kind, PencilKind::Shift);
    }

    #[test]
    fn monodromy_approaches_the_identity_at_large_argument() {
        let module = GlModule::vector_rep(3);
        let chain =
            TensorChain::new(vec![module.clone(), module], vec![rat_int(1), rat_int(-2)]).unwrap();
        let den = transfer_denominator(&chain, 1);
        let excluded = transfer_excluded_points(&chain);
        for (a, b) in [(1, 1), (1, 2), (3, 2)] {
            let laurent = matrix_laurent_at_infinity(
                |u| chain_t_entry(&chain, a, b, u),
                &den,
                0,
                17,
                &excluded,
            )
            .unwrap();
            let expected = if a == b {
                Matrix::identity(chain.dim())
            } else {
                Matrix::zeros(chain.dim(), chain.dim())
            };
            assert_eq!(laurent[0], expected, "leading term of T_{a}{b}");
        }
    }

    #[test]
    fn modified_transfer_lowest_cases_follow_the_alternating_sum() {
        let chain = single_site_gl2();
        let q = TwistMatrix::diagonal(vec![rat_int(1), rat_int(2)]);
        let u = rat(11, 5);
        let s0 = modified_transfer(&chain, &q, 0, &u).unwrap();
        assert_eq!(s0, Matrix::identity(2), "S_0 = 1");
        let s1 = modified_transfer(&chain, &q, 1, &u).unwrap();
        let t1 = transfer_matrix(&chain, &q, 1, &u).unwrap();
        assert_eq!(s1, t1.sub(&Matrix::identity(2).scaled(&rat_int(2))), "S_1 = T_1 - N");
    }
}
