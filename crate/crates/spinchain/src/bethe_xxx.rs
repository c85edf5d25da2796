//! Bethe vectors for XXX-type chains.
//!
//! Two independent constructions of the universal weight function are
//! provided: a trace formula over an auxiliary tensor power of the vector
//! representation, and a rank recursion through reduced monodromies.
//! Besides the vectors themselves, this module evaluates the Bethe
//! equations, the eigenvalue factors `X^a(u)` and the factorized
//! difference operator built from them, and verifies transfer matrix
//! eigenpairs.

use crate::linalg::{
    apply_on_legs, elementary, vec_add, vec_is_zero, vec_max_abs, vec_scaled, Matrix,
};
use crate::rmatrix::rational_r;
use crate::scalars::Scalar;
use crate::yangian::{
    apply_monodromy_on_aux, block_matmul, chain_t_blocks, transfer_matrix, TensorChain,
    TwistMatrix,
};
use crate::{Error, Result};
use itertools::Itertools;

/// Occupation numbers `(xi^1, .., xi^{N-1})` of the Bethe levels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BetheConfig {
    xi: Vec<usize>,
}

impl BetheConfig {
    pub fn new(n_gl: usize, xi: Vec<usize>) -> Result<Self> {
        if n_gl < 2 || xi.len() != n_gl - 1 {
            return Err(Error::DimensionMismatch(format!(
                "expected {} level counts for gl({n_gl}), got {}",
                n_gl.saturating_sub(1),
                xi.len()
            )));
        }
        Ok(Self { xi })
    }

    pub fn n_gl(&self) -> usize {
        self.xi.len() + 1
    }

    pub fn levels(&self) -> &[usize] {
        &self.xi
    }

    /// `xi^a` with the conventions `xi^0 = xi^N = 0`.
    pub fn level_count(&self, a: usize) -> usize {
        if a == 0 || a > self.xi.len() {
            0
        } else {
            self.xi[a - 1]
        }
    }

    pub fn total(&self) -> usize {
        self.xi.iter().sum()
    }

    /// Number of variables on levels below `a` (1-based), `xi^{<a}`.
    pub fn prefix(&self, a: usize) -> usize {
        self.xi[..a - 1].iter().sum()
    }

    /// Level (1-based) of the `p`-th variable in lexicographic order
    /// (0-based `p`).
    pub fn level_of_position(&self, p: usize) -> usize {
        let mut acc = 0;
        for (idx, &count) in self.xi.iter().enumerate() {
            acc += count;
            if p < acc {
                return idx + 1;
            }
        }
        panic!("position {p} out of range for |xi| = {}", self.total());
    }
}

/// Bethe variables grouped by level.
#[derive(Debug, Clone, PartialEq)]
pub struct BetheRoots<S> {
    levels: Vec<Vec<S>>,
}

impl<S: Scalar> BetheRoots<S> {
    pub fn new(levels: Vec<Vec<S>>) -> Self {
        Self { levels }
    }

    pub fn from_flat(config: &BetheConfig, flat: &[S]) -> Result<Self> {
        if flat.len() != config.total() {
            return Err(Error::DimensionMismatch(format!(
                "{} variables for |xi| = {}",
                flat.len(),
                config.total()
            )));
        }
        let mut levels = Vec::with_capacity(config.levels().len());
        let mut pos = 0;
        for &count in config.levels() {
            levels.push(flat[pos..pos + count].to_vec());
            pos += count;
        }
        Ok(Self { levels })
    }

    pub fn levels(&self) -> &[Vec<S>] {
        &self.levels
    }

    /// Variables of level `a` (1-based); empty outside `1..N-1`.
    pub fn level(&self, a: usize) -> &[S] {
        if a == 0 || a > self.levels.len() {
            &[]
        } else {
            &self.levels[a - 1]
        }
    }

    pub fn flat(&self) -> Vec<S> {
        self.levels.iter().flatten().cloned().collect()
    }

    pub fn matches(&self, config: &BetheConfig) -> bool {
        self.levels.len() == config.levels().len()
            && self.levels.iter().zip(config.levels()).all(|(l, &c)| l.len() == c)
    }

    /// Sorts each level by magnitude for canonical reporting.
    pub fn canonical(&self) -> Self {
        let mut levels = self.levels.clone();
        for level in &mut levels {
            level.sort_by(|x, y| {
                x.abs_f64()
                    .partial_cmp(&y.abs_f64())
                    .unwrap_or(std::cmp::Ordering::Equal)
                    .then_with(|| format!("{x}").cmp(&format!("{y}")))
            });
        }
        Self { levels }
    }
}

/// True when no two variables coincide within a level or between
/// adjacent levels.
pub fn is_off_diagonal<S: Scalar>(roots: &BetheRoots<S>) -> bool {
    let sep = |x: &S, y: &S| {
        let d = x.clone() - y.clone();
        if S::EXACT {
            !d.is_zero()
        } else {
            d.abs_f64() > 1e-8
        }
    };
    let levels = roots.levels();
    for level in levels {
        for i in 0..level.len() {
            for j in i + 1..level.len() {
                if !sep(&level[i], &level[j]) {
                    return false;
                }
            }
        }
    }
    for a in 0..levels.len().saturating_sub(1) {
        for x in &levels[a] {
            for y in &levels[a + 1] {
                if !sep(x, y) {
                    return false;
                }
            }
        }
    }
    true
}

/// An XXX spectral problem: chain, diagonal twist and level counts.
#[derive(Debug, Clone)]
pub struct BetheProblem {
    chain: TensorChain,
    twist: TwistMatrix,
    config: BetheConfig,
}

impl BetheProblem {
    pub fn new(chain: TensorChain, twist: TwistMatrix, config: BetheConfig) -> Result<Self> {
        let n = chain.n_gl();
        if twist.n() != n {
            return Err(Error::MismatchedN { left: n, right: twist.n() });
        }
        if config.n_gl() != n {
            return Err(Error::MismatchedN { left: n, right: config.n_gl() });
        }
        twist.diagonal_entries().ok_or_else(|| {
            Error::DegenerateTwist("Bethe equations require a diagonal twist".into())
        })?;
        Ok(Self { chain, twist, config })
    }

    pub fn chain(&self) -> &TensorChain {
        &self.chain
    }

    pub fn twist(&self) -> &TwistMatrix {
        &self.twist
    }

    pub fn config(&self) -> &BetheConfig {
        &self.config
    }

    /// Highest weight component `Lambda^a_j` of site `j` (both 1-based).
    pub fn site_weight(&self, a: usize, j: usize) -> i64 {
        self.chain.modules()[j - 1].highest_weight().0[a - 1]
    }
}

fn coincident<S: Scalar>(d: &S, what: &str) -> Result<S> {
    if d.is_zero() {
        Err(Error::CoincidentRoots(what.to_string()))
    } else {
        Ok(d.clone())
    }
}

/// Normalization factors turning the auxiliary trace into the Bethe
/// expression: within-level `1/(t^a_j - t^a_i + 1)` and cross-level
/// `1/(t^b_j - t^a_i)` over all level pairs `a < b`.
fn trace_normalization<S: Scalar>(roots: &BetheRoots<S>) -> Result<S> {
    let levels = roots.levels();
    let mut scale = S::one();
    for level in levels {
        for i in 0..level.len() {
            for j in i + 1..level.len() {
                let d = level[j].clone() - level[i].clone() + S::one();
                scale = scale
                    / coincident(&d, "within-level separation t_j - t_i = -1")?;
            }
        }
    }
    for a in 0..levels.len() {
        for b in a + 1..levels.len() {
            for x in &levels[a] {
                for y in &levels[b] {
                    let d = y.clone() - x.clone();
                    scale = scale / coincident(&d, "cross-level coincidence t^b_j = t^a_i")?;
                }
            }
        }
    }
    Ok(scale)
}

/// Polynomial clearing factors of the universal weight function:
/// `prod (t^a_i - z_j)` over all variables and sites, and
/// `prod (t^{a+1}_j - t^a_i)` over adjacent levels.
pub fn clearing_factor<S: Scalar>(chain: &TensorChain, roots: &BetheRoots<S>) -> S {
    let mut scale = S::one();
    for level in roots.levels() {
        for t in level {
            for z in chain.z() {
                scale = scale * (t.clone() - S::from_rational(z));
            }
        }
    }
    let levels = roots.levels();
    for a in 0..levels.len().saturating_sub(1) {
        for x in &levels[a] {
            for y in &levels[a + 1] {
                scale = scale * (y.clone() - x.clone());
            }
        }
    }
    scale
}

/// Applies the auxiliary trace construction to the product of highest
/// vectors, returning the normalized Bethe expression value (without the
/// polynomial clearing factors).
pub fn bethe_vector_normalized<S: Scalar>(
    chain: &TensorChain,
    config: &BetheConfig,
    roots: &BetheRoots<S>,
) -> Result<Vec<S>> {
    check_shapes(chain, config, roots)?;
    if config.total() == 0 {
        return Ok(chain.highest_vector());
    }
    let n = chain.n_gl();
    let total = config.total();
    let cd = chain.dim();
    let ts = roots.flat();
    let mut dims = vec![n; total];
    dims.extend(chain.site_dims());
    let aux_dim: usize = n.pow(total as u32);

    let mut start_aux = 0;
    for p in 0..total {
        start_aux = start_aux * n + config.level_of_position(p);
    }
    let mut w = vec![S::zero(); aux_dim * cd];
    let hw = chain.highest_flat_index();
    w[start_aux * cd + hw] = S::one();

    let pairs: Vec<(usize, usize)> = (0..total)
        .flat_map(|p| (p + 1..total).map(move |q| (p, q)))
        .collect();
    for &(p, q) in pairs.iter().rev() {
        let arg = ts[q].clone() - ts[p].clone();
        let r = rational_r::<S>(n, &arg);
        w = apply_on_legs(&dims, &[p, q], &r, &w);
    }
    for p in (0..total).rev() {
        w = apply_monodromy_on_aux(chain, &vec![n; total], p, &ts[p], w)?;
    }

    let mut out_aux = 0;
    for p in 0..total {
        out_aux = out_aux * n + (config.level_of_position(p) - 1);
    }
    let raw: Vec<S> = w[out_aux * cd..(out_aux + 1) * cd].to_vec();
    let scale = trace_normalization(roots)?;
    Ok(vec_scaled(&raw, &scale))
}

/// Universal weight function via the auxiliary trace: the normalized
/// Bethe expression multiplied by the polynomial clearing factors.
pub fn bethe_vector_trace<S: Scalar>(
    chain: &TensorChain,
    config: &BetheConfig,
    roots: &BetheRoots<S>,
) -> Result<Vec<S>> {
    let normalized = bethe_vector_normalized(chain, config, roots)?;
    Ok(vec_scaled(&normalized, &clearing_factor(chain, roots)))
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

/// Monodromy entries presented as an array of operator blocks; the rank
/// recursion consumes this interface for both full chains and reduced
/// monodromies.
pub trait Monodromy<S: Scalar> {
    fn rank(&self) -> usize;
    fn dim(&self) -> usize;
    fn blocks(&self, u: &S) -> Result<Vec<Vec<Matrix<S>>>>;
}

/// Chain monodromy viewed through the recursion interface.
pub struct ChainMonodromy<'a> {
    chain: &'a TensorChain,
}

impl<'a> ChainMonodromy<'a> {
    pub fn new(chain: &'a TensorChain) -> Self {
        Self { chain }
    }
}

impl<S: Scalar> Monodromy<S> for ChainMonodromy<'_> {
    fn rank(&self) -> usize {
        self.chain.n_gl()
    }

    fn dim(&self) -> usize {
        self.chain.dim()
    }

    fn blocks(&self, u: &S) -> Result<Vec<Vec<Matrix<S>>>> {
        chain_t_blocks(self.chain, u)
    }
}

/// Rank `N-1` monodromy on auxiliary copies of `C^{N-1}` at the first
/// level variables, followed by the parent quantum space.
struct ReducedMonodromy<'a, S: Scalar> {
    parent: &'a dyn Monodromy<S>,
    x: Vec<S>,
}

impl<S: Scalar> Monodromy<S> for ReducedMonodromy<'_, S> {
    fn rank(&self) -> usize {
        self.parent.rank() - 1
    }

    fn dim(&self) -> usize {
        self.rank().pow(self.x.len() as u32) * self.parent.dim()
    }

    fn blocks(&self, u: &S) -> Result<Vec<Vec<Matrix<S>>>> {
        let m = self.rank();
        let r = self.x.len();
        let pd = self.parent.dim();
        let parent_blocks = self.parent.blocks(u)?;
        let mut dims = vec![m; r];
        dims.push(pd);
        let head = Matrix::<S>::identity(m.pow(r as u32));
        let mut acc: Vec<Vec<Matrix<S>>> = (0..m)
            .map(|c| {
                (0..m)
                    .map(|d| head.kron(&parent_blocks[c + 1][d + 1]))
                    .collect()
            })
            .collect();
        for site in (0..r).rev() {
            let inv = {
                let d = u.clone() - self.x[site].clone();
                S::one()
                    / coincident(&d, "variable collides with an adjacent lower level variable")?
            };
            let site_block: Vec<Vec<Matrix<S>>> = (1..=m)
                .map(|c| {
                    (1..=m)
                        .map(|d| {
                            let placed = crate::linalg::place_on_legs(
                                &dims,
                                &[site],
                                &elementary::<S>(m, d, c),
                            )
                            .scaled(&inv);
                            if c == d {
                                placed.add(&Matrix::identity(placed.rows()))
                            } else {
                                placed
                            }
                        })
                        .collect()
                })
                .collect();
            acc = block_matmul(&acc, &site_block);
        }
        Ok(acc)
    }
}

fn recursion_step<S: Scalar>(
    mono: &dyn Monodromy<S>,
    xi: &[usize],
    levels: &[Vec<S>],
    start: &[S],
) -> Result<Vec<S>> {
    if xi.is_empty() {
        return Ok(start.to_vec());
    }
    let r = xi[0];
    let t1 = &levels[0];
    let blocks_at: Vec<Vec<Vec<Matrix<S>>>> =
        t1.iter().map(|u| mono.blocks(u)).collect::<Result<_>>()?;
    if xi.len() == 1 {
        let mut w = start.to_vec();
        for i in (0..r).rev() {
            w = blocks_at[i][0][1].apply(&w);
        }
        return Ok(w);
    }
    let m = mono.rank() - 1;
    let reduced = ReducedMonodromy { parent: mono, x: t1.clone() };
    let wd = m.pow(r as u32);
    let pd = start.len();
    let mut lifted = vec![S::zero(); wd * pd];
    lifted[..pd].clone_from_slice(start);
    let inner = recursion_step(&reduced, &xi[1..], &levels[1..], &lifted)?;
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
            h = blocks_at[i][0][assignment[i]].apply(&h);
        }
        result = vec_add(&result, &h);
    }
    Ok(result)
}

/// Universal weight function via the rank recursion; agrees with
/// `bethe_vector_trace` and carries the same clearing factors.
pub fn bethe_vector_recursive<S: Scalar>(
    chain: &TensorChain,
    config: &BetheConfig,
    roots: &BetheRoots<S>,
) -> Result<Vec<S>> {
    check_shapes(chain, config, roots)?;
    if config.total() == 0 {
        return Ok(chain.highest_vector());
    }
    let mono = ChainMonodromy::new(chain);
    let start = chain.highest_vector::<S>();
    let value = recursion_step(&mono, config.levels(), roots.levels(), &start)?;
    Ok(vec_scaled(&value, &clearing_factor(chain, roots)))
}

/// Residuals of the polynomial Bethe equations, one per variable in
/// lexicographic order; all zero exactly at a solution.
pub fn bae_residual<S: Scalar>(problem: &BetheProblem, roots: &BetheRoots<S>) -> Result<Vec<S>> {
    check_shapes(problem.chain(), problem.config(), roots)?;
    let q = problem
        .twist()
        .diagonal_entries()
        .expect("problem construction enforces a diagonal twist");
    let n_levels = problem.config().levels().len();
    let mut residuals = Vec::with_capacity(problem.config().total());
    for a in 1..=n_levels {
        let level = roots.level(a);
        for i in 0..level.len() {
            let t = &level[i];
            let mut lhs = S::from_rational(&q[a - 1]);
            let mut rhs = S::from_rational(&q[a]);
            for (j, z) in problem.chain().z().iter().enumerate() {
                let base = t.clone() - S::from_rational(z);
                lhs = lhs * (base.clone() + S::from_int(problem.site_weight(a, j + 1)));
                rhs = rhs * (base + S::from_int(problem.site_weight(a + 1, j + 1)));
            }
            for s in roots.level(a - 1) {
                let base = t.clone() - s.clone();
                lhs = lhs * (base.clone() + S::one());
                rhs = rhs * base;
            }
            for (j, s) in level.iter().enumerate() {
                if j != i {
                    let base = t.clone() - s.clone();
                    lhs = lhs * (base.clone() - S::one());
                    rhs = rhs * (base + S::one());
                }
            }
            for s in roots.level(a + 1) {
                let base = t.clone() - s.clone();
                lhs = lhs * base.clone();
                rhs = rhs * (base - S::one());
            }
            residuals.push(lhs - rhs);
        }
    }
    Ok(residuals)
}

/// Eigenvalue factor
/// `X^a(u) = Q_a prod (u-z+Lambda^a)/(u-z) prod (u-t^{a-1}+1)/(u-t^{a-1})
///  prod (u-t^a-1)/(u-t^a)`.
pub fn eigenvalue_x<S: Scalar>(
    problem: &BetheProblem,
    roots: &BetheRoots<S>,
    a: usize,
    u: &S,
) -> Result<S> {
    let n = problem.chain().n_gl();
    if a < 1 || a > n {
        return Err(Error::InvalidRank { n_gl: n, rank: a });
    }
    let q = problem.twist().diagonal_entries().expect("diagonal twist");
    let mut value = S::from_rational(&q[a - 1]);
    let div = |num: S, den: S, value: S| -> Result<S> {
        if den.is_zero() || (!S::EXACT && den.is_negligible(1.0)) {
            Err(Error::PoleAtSample(format!("{u}")))
        } else {
            Ok(value * num / den)
        }
    };
    for (j, z) in problem.chain().z().iter().enumerate() {
        let base = u.clone() - S::from_rational(z);
        value = div(
            base.clone() + S::from_int(problem.site_weight(a, j + 1)),
            base,
            value,
        )?;
    }
    for s in roots.level(a - 1) {
        let base = u.clone() - s.clone();
        value = div(base.clone() + S::one(), base, value)?;
    }
    for s in roots.level(a) {
        let base = u.clone() - s.clone();
        value = div(base.clone() - S::one(), base, value)?;
    }
    Ok(value)
}

/// Coefficients of the factorized difference operator
/// `prod_a (1 - X^a(u) exp(-d/du))`: entry `k` equals
/// `(-1)^k sum_{a_1<..<a_k} prod_r X^{a_r}(u-r+1)`.
pub fn fundamental_difference_operator<S: Scalar>(
    problem: &BetheProblem,
    roots: &BetheRoots<S>,
    u: &S,
) -> Result<Vec<S>> {
    let n = problem.chain().n_gl();
    let mut coefficients = vec![S::zero(); n + 1];
    coefficients[0] = S::one();
    for k in 1..=n {
        let mut acc = S::zero();
        for combo in (1..=n).combinations(k) {
            let mut term = S::one();
            for (r, &a) in combo.iter().enumerate() {
                let arg = u.clone() - S::from_int(r as i64);
                term = term * eigenvalue_x(problem, roots, a, &arg)?;
            }
            acc = acc + term;
        }
        if k % 2 == 1 {
            acc = -acc;
        }
        coefficients[k] = acc;
    }
    Ok(coefficients)
}

/// Transfer eigenvalue `sum_{a_1<..<a_k} prod_r X^{a_r}(u-r+1)`.
pub fn transfer_eigenvalue<S: Scalar>(
    problem: &BetheProblem,
    roots: &BetheRoots<S>,
    k: usize,
    u: &S,
) -> Result<S> {
    let coeffs = fundamental_difference_operator(problem, roots, u)?;
    let value = coeffs[k].clone();
    Ok(if k % 2 == 1 { -value } else { value })
}

/// One verified sample of an eigenpair claim.
#[derive(Debug, Clone)]
pub struct EigenpairCheck<S> {
    pub k: usize,
    pub u: S,
    pub eigenvalue: S,
    pub relative_residual: f64,
}

/// Outcome of checking a Bethe root against every transfer matrix.
#[derive(Debug, Clone)]
pub struct EigenpairReport<S> {
    pub checks: Vec<EigenpairCheck<S>>,
    pub max_relative_residual: f64,
    pub max_bae_residual: f64,
    pub vector_norm: f64,
    pub weight_ok: bool,
    pub singular_residual: Option<f64>,
}

impl<S> EigenpairReport<S> {
    pub fn passes(&self, tol: f64) -> bool {
        self.max_relative_residual <= tol
            && self.max_bae_residual <= tol
            && self.weight_ok
            && self.singular_residual.map_or(true, |r| r <= tol)
    }
}

/// Expected weight of the Bethe vector:
/// `(sum Lambda^1 - xi^1, sum Lambda^2 + xi^1 - xi^2, ..)`.
pub fn bethe_weight(chain: &TensorChain, config: &BetheConfig) -> crate::reps::GlWeight {
    let n = chain.n_gl();
    let mut w = vec![0i64; n];
    for module in chain.modules() {
        for (a, entry) in w.iter_mut().enumerate() {
            *entry += module.highest_weight().0[a];
        }
    }
    for (a, entry) in w.iter_mut().enumerate() {
        let xi_above = config.level_count(a) as i64;
        let xi_here = config.level_count(a + 1) as i64;
        *entry += xi_above - xi_here;
    }
    crate::reps::GlWeight(w)
}

/// Checks the eigenvalue identity for every `k` at the given samples,
/// plus the weight and, for the identity twist, the singularity of the
/// Bethe vector.
pub fn verify_eigenpair<S: Scalar>(
    problem: &BetheProblem,
    roots: &BetheRoots<S>,
    u_samples: &[S],
) -> Result<EigenpairReport<S>> {
    if !is_off_diagonal(roots) {
        return Err(Error::NotOffDiagonal(
            "coinciding variables within a level or between adjacent levels".into(),
        ));
    }
    let chain = problem.chain();
    let vector = bethe_vector_trace(chain, problem.config(), roots)?;
    let norm = vec_max_abs(&vector);
    if norm == 0.0 {
        return Err(Error::ZeroBetheVector);
    }

    let expected_weight = bethe_weight(chain, problem.config());
    let weight_ok = vector.iter().enumerate().all(|(idx, c)| {
        c.is_zero() || chain.basis_weight(idx) == expected_weight
    });

    let singular_residual = if problem.twist().is_identity() {
        let mut worst: f64 = 0.0;
        for a in 1..chain.n_gl() {
            let raise = Matrix::<S>::cast_from(&chain.global_generator(a, a + 1));
            worst = worst.max(vec_max_abs(&raise.apply(&vector)) / norm);
        }
        Some(worst)
    } else {
        None
    };

    let bae = bae_residual(problem, roots)?;
    let max_bae_residual = bae.iter().map(S::abs_f64).fold(0.0, f64::max);

    let mut checks = Vec::new();
    let mut max_rel: f64 = 0.0;
    for k in 1..=chain.n_gl() {
        for u in u_samples {
            let transfer = transfer_matrix(chain, problem.twist(), k, u)?;
            let eigenvalue = transfer_eigenvalue(problem, roots, k, u)?;
            let lhs = transfer.apply(&vector);
            let rhs = vec_scaled(&vector, &eigenvalue);
            let residual = vec_max_abs(&crate::linalg::vec_sub(&lhs, &rhs)) / norm;
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

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reps::GlModule;
    use crate::scalars::{rat, rat_int, Rational};
    use crate::yangian::chain_t_entry;

    fn vector_chain(n: usize, z: &[i64]) -> TensorChain {
        let module = GlModule::vector_rep(n);
        TensorChain::new(
            vec![module; z.len()],
            z.iter().map(|&p| rat_int(p)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn empty_configuration_returns_the_highest_vector() {
        let chain = vector_chain(3, &[0, 2]);
        let config = BetheConfig::new(3, vec![0, 0]).unwrap();
        let roots = BetheRoots::<Rational>::new(vec![vec![], vec![]]);
        let v = bethe_vector_trace(&chain, &config, &roots).unwrap();
        assert_eq!(v, chain.highest_vector::<Rational>());
    }

    #[test]
    fn rank_two_vector_is_a_product_of_creation_entries() {
        let chain = vector_chain(2, &[0, 3]);
        let config = BetheConfig::new(2, vec![2]).unwrap();
        let t = vec![rat(7, 2), rat(-5, 3)];
        let roots = BetheRoots::new(vec![t.clone()]);
        let got = bethe_vector_trace(&chain, &config, &roots).unwrap();
        let b1 = chain_t_entry(&chain, 1, 2, &t[0]).unwrap();
        let b2 = chain_t_entry(&chain, 1, 2, &t[1]).unwrap();
        let mut expected = b1.matmul(&b2).apply(&chain.highest_vector());
        for ti in &t {
            for z in chain.z() {
                expected = vec_scaled(&expected, &(ti.clone() - z.clone()));
            }
        }
        assert_eq!(got, expected, "rank 2 weight function is the creation product");
    }

    #[test]
    fn rank_three_vector_matches_the_two_term_closed_form() {
        let chain = vector_chain(3, &[0, 2]);
        let config = BetheConfig::new(3, vec![1, 1]).unwrap();
        let t1 = rat(5, 2);
        let t2 = rat(-3, 1);
        let roots = BetheRoots::new(vec![vec![t1.clone()], vec![t2.clone()]]);
        let got = bethe_vector_trace(&chain, &config, &roots).unwrap();
        let v = chain.highest_vector::<Rational>();
        let term1 = chain_t_entry(&chain, 1, 2, &t1)
            .unwrap()
            .matmul(&chain_t_entry(&chain, 2, 3, &t2).unwrap())
            .apply(&v);
        let term2 = chain_t_entry(&chain, 1, 3, &t1)
            .unwrap()
            .matmul(&chain_t_entry(&chain, 2, 2, &t2).unwrap())
            .apply(&v);
        let gap = t2.clone() - t1.clone();
        let mut expected = vec_add(&term1, &vec_scaled(&term2, &(rat_int(1) / gap.clone())));
        let scale = (t1.clone() - rat_int(0))
            * (t1.clone() - rat_int(2))
            * (t2.clone() - rat_int(0))
            * (t2.clone() - rat_int(2))
            * gap;
        expected = vec_scaled(&expected, &scale);
        assert_eq!(got, expected, "two-term closed form with clearing factors");
    }

    #[test]
    fn recursion_agrees_with_the_trace_construction_at_rank_three() {
        let chain = vector_chain(3, &[0, 2]);
        let config = BetheConfig::new(3, vec![1, 1]).unwrap();
        let roots = BetheRoots::new(vec![vec![rat(9, 4)], vec![rat(-7, 5)]]);
        let trace = bethe_vector_trace(&chain, &config, &roots).unwrap();
        let rec = bethe_vector_recursive(&chain, &config, &roots).unwrap();
        assert_eq!(trace, rec, "recursion and trace must coincide");
    }

    #[test]
    fn coinciding_adjacent_levels_are_rejected() {
        let chain = vector_chain(3, &[0, 2]);
        let config = BetheConfig::new(3, vec![1, 1]).unwrap();
        let roots = BetheRoots::new(vec![vec![rat(1, 2)], vec![rat(1, 2)]]);
        match bethe_vector_trace(&chain, &config, &roots) {
            Err(Error::CoincidentRoots(_)) => {}
            other => panic!("expected CoincidentRoots, got {other:?}"),
        }
    }

    #[test]
    fn closed_form_root_solves_the_polynomial_bethe_equations() {
        let chain = vector_chain(2, &[0, 3]);
        let config = BetheConfig::new(2, vec![1]).unwrap();
        let problem =
            BetheProblem::new(chain, TwistMatrix::identity(2), config).unwrap();
        let root = BetheRoots::new(vec![vec![rat_int(1)]]);
        let res = bae_residual(&problem, &root).unwrap();
        assert_eq!(res, vec![rat_int(0)], "t = (z2 - 1)/2 solves the system");
        let off = BetheRoots::new(vec![vec![rat_int(2)]]);
        let res = bae_residual(&problem, &off).unwrap();
        assert_ne!(res[0], rat_int(0), "a non-root leaves a nonzero residual");
    }

    #[test]
    fn eigenvalue_factors_multiply_into_the_quantum_determinant_value() {
        let chain = vector_chain(2, &[0, 3]);
        let config = BetheConfig::new(2, vec![1]).unwrap();
        let problem =
            BetheProblem::new(chain, TwistMatrix::identity(2), config).unwrap();
        let roots = BetheRoots::new(vec![vec![rat_int(1)]]);
        let u = rat(17, 3);
        let coeffs = fundamental_difference_operator(&problem, &roots, &u).unwrap();
        assert_eq!(coeffs[0], rat_int(1));
        let top = if problem.chain().n_gl() % 2 == 0 {
            coeffs[2].clone()
        } else {
            -coeffs[2].clone()
        };
        let mut qdet_value = rat_int(1);
        for a in 1..=2i64 {
            for (j, z) in problem.chain().z().iter().enumerate() {
                let base = u.clone() - rat_int(a - 1) - z.clone();
                let lam = problem.site_weight(a as usize, j + 1);
                qdet_value = qdet_value * (base.clone() + rat_int(lam)) / base;
            }
        }
        assert_eq!(top, qdet_value, "top coefficient reproduces the qdet eigenvalue");
    }

    #[test]
    fn off_diagonality_flags_level_and_adjacent_collisions() {
        let ok = BetheRoots::new(vec![vec![rat_int(1), rat_int(2)], vec![rat_int(5)]]);
        assert!(is_off_diagonal(&ok));
        let within = BetheRoots::new(vec![vec![rat_int(1), rat_int(1)], vec![rat_int(5)]]);
        assert!(!is_off_diagonal(&within));
        let adjacent = BetheRoots::new(vec![vec![rat_int(1), rat_int(2)], vec![rat_int(2)]]);
        assert!(!is_off_diagonal(&adjacent));
    }
}
