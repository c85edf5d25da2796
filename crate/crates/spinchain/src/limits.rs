//! Degeneration of the chain model into the Gaudin model.
//!
//! Rescaling the spectral parameter, the evaluation points, and the Bethe
//! variables by a common scale, while deforming the twist to `1 + scale * K`,
//! turns every chain object into its Gaudin counterpart at a designated
//! series order.  The expansions here are computed in exact rational
//! arithmetic, either by interpolating the scaled object at sampled scales
//! with a known denominator, or by direct series division when the object is
//! an explicit product of linear factors.  Only the deformed Gram limit is
//! numeric, since the two-point operators behind it are solved pointwise.

use crate::bethe_xxx::{bethe_vector_normalized, BetheConfig, BetheRoots};
use crate::forms::{chain_gram, deformed_gram};
use crate::gaudin::{
    current_entry, gaudin_bae_residual, gaudin_transfer, gaudin_weight_function_raw,
    master_operator, GaudinProblem,
};
use crate::linalg::Matrix;
use crate::scalars::{
    interpolate_with_known_denominator, rat_int, sample_points, series_div, Poly, Rational,
    RationalFunctionSample, Scalar,
};
use crate::yangian::{
    chain_t_entry, factorial, modified_transfer, transfer_matrix, TensorChain, TwistMatrix,
};
use crate::{Error, Result};
use itertools::Itertools;
use num_traits::{One, Zero};

/// Data for the scaling checks: a chain with its coupling, a variable
/// assignment per level, and a generic spectral sample point.
///
/// The variables do not have to solve any equations; every identity below
/// holds for generic values.
pub struct LimitProblem {
    gaudin: GaudinProblem,
    roots: BetheRoots<Rational>,
    u: Rational,
}

impl LimitProblem {
    pub fn new(
        chain: TensorChain,
        k_diag: Vec<Rational>,
        config: BetheConfig,
        roots: BetheRoots<Rational>,
        u: Rational,
    ) -> Result<Self> {
        let gaudin = GaudinProblem::new(chain, k_diag, config)?;
        if !roots.matches(gaudin.config()) {
            return Err(Error::DimensionMismatch(
                "root shape does not match the level counts".into(),
            ));
        }
        if gaudin.chain().z().contains(&u) {
            return Err(Error::PoleAtSample(format!("{u}")));
        }
        Ok(Self { gaudin, roots, u })
    }

    pub fn chain(&self) -> &TensorChain {
        self.gaudin.chain()
    }

    pub fn config(&self) -> &BetheConfig {
        self.gaudin.config()
    }

    pub fn k_diag(&self) -> &[Rational] {
        self.gaudin.k_diag()
    }

    pub fn roots(&self) -> &BetheRoots<Rational> {
        &self.roots
    }

    pub fn u(&self) -> &Rational {
        &self.u
    }

    pub fn gaudin(&self) -> &GaudinProblem {
        &self.gaudin
    }

    fn scaled_chain(&self, eps: &Rational) -> Result<TensorChain> {
        let z = self.chain().z().iter().map(|v| v / eps).collect();
        TensorChain::new(self.chain().modules().to_vec(), z)
    }

    fn scaled_twist(&self, eps: &Rational) -> TwistMatrix {
        let entries =
            self.k_diag().iter().map(|k| Rational::one() + eps * k).collect();
        TwistMatrix::diagonal(entries)
    }

    fn scaled_roots(&self, eps: &Rational) -> BetheRoots<Rational> {
        BetheRoots::new(
            self.roots
                .levels()
                .iter()
                .map(|level| level.iter().map(|t| t / eps).collect())
                .collect(),
        )
    }
}

/// Selector of the scaled chain object whose series is requested.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LimitObject {
    /// One operator entry of the chain monodromy.
    MonodromyEntry { a: usize, b: usize },
    /// Modified transfer matrix of the given rank.
    ModifiedTransfer { k: usize },
    /// Matrix coefficient of the m-th derivative in the alternating
    /// transfer sum with scaled shift operators.
    DifferenceCoefficient { m: usize },
    /// The normalized weight function at scaled variables.
    WeightFunction,
    /// Multiplicative Bethe equation ratio for one variable.
    EquationRatio { a: usize, i: usize },
    /// Scalar coefficient of the m-th derivative in the factorized
    /// eigenvalue operator with scaled shift operators.
    FactorizedCoefficient { m: usize },
}

impl LimitObject {
    fn label(&self) -> String {
        match self {
            LimitObject::MonodromyEntry { a, b } => format!("monodromy entry ({a};{b})"),
            LimitObject::ModifiedTransfer { k } => format!("modified transfer rank {k}"),
            LimitObject::DifferenceCoefficient { m } => {
                format!("difference operator coefficient of order {m}")
            }
            LimitObject::WeightFunction => "weight function".into(),
            LimitObject::EquationRatio { a, i } => format!("equation ratio ({a};{i})"),
            LimitObject::FactorizedCoefficient { m } => {
                format!("factorized operator coefficient of order {m}")
            }
        }
    }
}

/// Exact series coefficients of a scaled object, ascending in the scale.
///
/// Vector values are stored as single column matrices and scalar values as
/// one by one matrices.
#[derive(Debug, Clone)]
pub struct EpsExpansion {
    pub label: String,
    pub orders: Vec<Matrix<Rational>>,
}

/// Outcome of one scaling identity.
#[derive(Debug, Clone)]
pub struct LimitCheck {
    pub name: String,
    pub max_abs_error: f64,
    pub pass: bool,
}

impl LimitCheck {
    fn exact(name: String, max_abs_error: f64) -> Self {
        Self { name, pass: max_abs_error == 0.0, max_abs_error }
    }
}

fn collect_samples(
    seed: u64,
    excluded: &[Rational],
    want: usize,
    mut f: impl FnMut(&Rational) -> Result<Matrix<Rational>>,
) -> Result<(Vec<Rational>, Vec<Matrix<Rational>>)> {
    let mut excl = excluded.to_vec();
    excl.push(Rational::zero());
    let pool = sample_points(seed, 2 * want + 8, &excl);
    let mut points = Vec::with_capacity(want);
    let mut values = Vec::with_capacity(want);
    let mut last_err = None;
    for p in &pool {
        if points.len() == want {
            break;
        }
        match f(p) {
            Ok(v) => {
                points.push(p.clone());
                values.push(v);
            }
            Err(e) => last_err = Some(e),
        }
    }
    if points.len() < want {
        return Err(last_err.unwrap_or_else(|| {
            Error::DimensionMismatch("not enough usable scale samples".into())
        }));
    }
    Ok((points, values))
}

/// Entrywise series of a sampled matrix function with a declared
/// denominator polynomial in the scale.
fn matrix_series(
    points: &[Rational],
    values: &[Matrix<Rational>],
    den: &Poly<Rational>,
    bound: usize,
    order: usize,
) -> Result<Vec<Matrix<Rational>>> {
    let rows = values[0].rows();
    let cols = values[0].cols();
    let den_at: Vec<Rational> = points.iter().map(|p| den.eval(p)).collect();
    let mut orders = vec![Matrix::zeros(rows, cols); order + 1];
    for r in 0..rows {
        for c in 0..cols {
            let sample = RationalFunctionSample {
                points: points.to_vec(),
                values: values.iter().map(|v| v.at(r, c).clone()).collect(),
                denominator_at_points: den_at.clone(),
                denominator_degree: den.degree().unwrap_or(0),
                numerator_degree_bound: bound,
            };
            let num = interpolate_with_known_denominator(&sample)?;
            let series = series_div(&num, den, order)?;
            for (m, coeff) in series.into_iter().enumerate() {
                orders[m].set(r, c, coeff);
            }
        }
    }
    Ok(orders)
}

/// Denominator `prod_i prod_{j=1..shifts} (u - z_i - j eps)` collecting the
/// poles of the shifted monodromy arguments.
fn shifted_argument_denominator(problem: &LimitProblem, shifts: usize) -> Poly<Rational> {
    let mut den = Poly::one();
    for z in problem.chain().z() {
        for j in 1..=shifts {
            let c0 = problem.u() - z;
            den = den.mul(&Poly::from_coeffs(vec![c0, rat_int(-(j as i64))]));
        }
    }
    den
}

fn transfer_pole_exclusions(problem: &LimitProblem, shifts: usize) -> Vec<Rational> {
    let mut excl = Vec::new();
    for z in problem.chain().z() {
        for j in 1..=shifts {
            excl.push((problem.u() - z) / rat_int(j as i64));
        }
    }
    excl
}

fn linear(c0: Rational, c1: Rational) -> Poly<Rational> {
    Poly::from_coeffs(vec![c0, c1])
}

/// Series of a product of linear numerator factors over a product of
/// linear denominator factors.
fn product_ratio_series(
    num_factors: &[Poly<Rational>],
    den_factors: &[Poly<Rational>],
    order: usize,
) -> Result<Vec<Rational>> {
    let mut num = Poly::one();
    for f in num_factors {
        num = num.mul(f);
    }
    let mut den = Poly::one();
    for f in den_factors {
        den = den.mul(f);
    }
    series_div(&num, &den, order)
}

fn equation_ratio_series(
    problem: &LimitProblem,
    a: usize,
    i: usize,
    order: usize,
) -> Result<Vec<Rational>> {
    let levels = problem.config().levels().len();
    if a < 1 || a > levels {
        return Err(Error::InvalidRank { n_gl: problem.chain().n_gl(), rank: a });
    }
    let level = problem.roots().level(a);
    if i >= level.len() {
        return Err(Error::DimensionMismatch(format!(
            "variable index {i} out of range for level {a}"
        )));
    }
    let t = &level[i];
    let gaudin = problem.gaudin();
    let mut num = vec![linear(Rational::one(), problem.k_diag()[a - 1].clone())];
    let mut den = vec![linear(Rational::one(), problem.k_diag()[a].clone())];
    for (j, z) in problem.chain().z().iter().enumerate() {
        num.push(linear(t - z, rat_int(gaudin.site_weight(a, j + 1))));
        den.push(linear(t - z, rat_int(gaudin.site_weight(a + 1, j + 1))));
    }
    for s in problem.roots().level(a - 1) {
        num.push(linear(t - s, Rational::one()));
        den.push(linear(t - s, Rational::zero()));
    }
    for (j, s) in level.iter().enumerate() {
        if j != i {
            num.push(linear(t - s, -Rational::one()));
            den.push(linear(t - s, Rational::one()));
        }
    }
    for s in problem.roots().level(a + 1) {
        num.push(linear(t - s, Rational::zero()));
        den.push(linear(t - s, -Rational::one()));
    }
    product_ratio_series(&num, &den, order)
}

/// Series of the elementary eigenvalue ratio `X^a` at the scaled argument
/// shifted down by `c` steps.
fn eigenvalue_factor_series(
    problem: &LimitProblem,
    a: usize,
    c: i64,
    order: usize,
) -> Result<Vec<Rational>> {
    let gaudin = problem.gaudin();
    let mut num = vec![linear(Rational::one(), problem.k_diag()[a - 1].clone())];
    let mut den = vec![Poly::one()];
    for (j, z) in problem.chain().z().iter().enumerate() {
        num.push(linear(problem.u() - z, rat_int(gaudin.site_weight(a, j + 1) - c)));
        den.push(linear(problem.u() - z, rat_int(-c)));
    }
    for s in problem.roots().level(a - 1) {
        num.push(linear(problem.u() - s, rat_int(1 - c)));
        den.push(linear(problem.u() - s, rat_int(-c)));
    }
    for s in problem.roots().level(a) {
        num.push(linear(problem.u() - s, rat_int(-1 - c)));
        den.push(linear(problem.u() - s, rat_int(-c)));
    }
    product_ratio_series(&num, &den, order)
}

fn series_add(acc: &mut [Rational], term: &[Rational]) {
    for (a, t) in acc.iter_mut().zip(term) {
        *a = a.clone() + t.clone();
    }
}

fn series_scaled(series: &[Rational], c: &Rational) -> Vec<Rational> {
    series.iter().map(|v| v * c).collect()
}

/// Series of the alternating sums over ordered tuples of the elementary
/// eigenvalue ratios, weighted for the m-th derivative coefficient.
fn factorized_coefficient_series(
    problem: &LimitProblem,
    m: usize,
    order: usize,
) -> Result<Vec<Rational>> {
    let n = problem.chain().n_gl();
    let mut acc = vec![Rational::zero(); order + 1];
    if m == 0 {
        acc[0] = Rational::one();
    }
    for k in 1..=n {
        let mut level_sum = vec![Rational::zero(); order + 1];
        for combo in (1..=n).combinations(k) {
            let mut term = vec![Rational::zero(); order + 1];
            term[0] = Rational::one();
            for (r, &a) in combo.iter().enumerate() {
                let factor = eigenvalue_factor_series(problem, a, r as i64, order)?;
                let mut next = vec![Rational::zero(); order + 1];
                for p in 0..=order {
                    for q in 0..=order - p {
                        next[p + q] =
                            next[p + q].clone() + term[p].clone() * factor[q].clone();
                    }
                }
                term = next;
            }
            series_add(&mut level_sum, &term);
        }
        let mut weight = rat_int((-(k as i64)).pow(m as u32));
        if k % 2 == 1 {
            weight = -weight;
        }
        series_add(&mut acc, &series_scaled(&level_sum, &weight));
    }
    Ok(acc)
}

fn scalar_orders(series: Vec<Rational>) -> Vec<Matrix<Rational>> {
    series
        .into_iter()
        .map(|c| Matrix::from_fn(1, 1, |_, _| c.clone()))
        .collect()
}

fn column(values: &[Rational]) -> Matrix<Rational> {
    Matrix::from_fn(values.len(), 1, |r, _| values[r].clone())
}

/// Exact series of the selected scaled object in the scale parameter,
/// through the requested order.
pub fn eps_expand(
    problem: &LimitProblem,
    object: &LimitObject,
    order: usize,
    seed: u64,
) -> Result<EpsExpansion> {
    let n_sites = problem.chain().len();
    let n = problem.chain().n_gl();
    let label = object.label();
    let orders = match object {
        LimitObject::MonodromyEntry { a, b } => {
            let bound = n_sites + 2;
            let (points, values) = collect_samples(seed, &[], bound + 3, |eps| {
                let chain = problem.scaled_chain(eps)?;
                chain_t_entry(&chain, *a, *b, &(problem.u() / eps))
            })?;
            matrix_series(&points, &values, &Poly::one(), bound, order)?
        }
        LimitObject::ModifiedTransfer { k } => {
            let shifts = k.saturating_sub(1);
            let den = shifted_argument_denominator(problem, shifts);
            let bound = n_sites * k + k + 2;
            let excl = transfer_pole_exclusions(problem, shifts);
            let (points, values) = collect_samples(seed, &excl, bound + 3, |eps| {
                let chain = problem.scaled_chain(eps)?;
                let twist = problem.scaled_twist(eps);
                modified_transfer(&chain, &twist, *k, &(problem.u() / eps))
            })?;
            matrix_series(&points, &values, &den, bound, order)?
        }
        LimitObject::DifferenceCoefficient { m } => {
            let shifts = n.saturating_sub(1);
            let den = shifted_argument_denominator(problem, shifts);
            let bound = n_sites * n + n + 2;
            let excl = transfer_pole_exclusions(problem, shifts);
            let m = *m;
            let (points, values) = collect_samples(seed, &excl, bound + 3, |eps| {
                let chain = problem.scaled_chain(eps)?;
                let twist = problem.scaled_twist(eps);
                let dim = chain.dim();
                let mut acc: Matrix<Rational> = Matrix::zeros(dim, dim);
                for k in 0..=n {
                    if m > 0 && k == 0 {
                        continue;
                    }
                    let mut weight = rat_int((-(k as i64)).pow(m as u32));
                    if k % 2 == 1 {
                        weight = -weight;
                    }
                    let term = transfer_matrix(&chain, &twist, k, &(problem.u() / eps))?;
                    acc = acc.add(&term.scaled(&weight));
                }
                Ok(acc)
            })?;
            matrix_series(&points, &values, &den, bound, order)?
        }
        LimitObject::WeightFunction => {
            let total = problem.config().total();
            let bound = total * (total.saturating_sub(1)) / 2 + n_sites * total + 2;
            let mut den = Poly::one();
            let mut excl = Vec::new();
            for level in problem.roots().levels() {
                for i in 0..level.len() {
                    for j in i + 1..level.len() {
                        den = den.mul(&linear(&level[j] - &level[i], Rational::one()));
                        excl.push(&level[i] - &level[j]);
                        excl.push(&level[j] - &level[i]);
                    }
                }
            }
            let (points, values) = collect_samples(seed, &excl, bound + 3, |eps| {
                let chain = problem.scaled_chain(eps)?;
                let roots = problem.scaled_roots(eps);
                let v = bethe_vector_normalized(&chain, problem.config(), &roots)?;
                Ok(column(&v))
            })?;
            matrix_series(&points, &values, &den, bound, order)?
        }
        LimitObject::EquationRatio { a, i } => {
            scalar_orders(equation_ratio_series(problem, *a, *i, order)?)
        }
        LimitObject::FactorizedCoefficient { m } => {
            scalar_orders(factorized_coefficient_series(problem, *m, order)?)
        }
    };
    Ok(EpsExpansion { label, orders })
}

fn max_abs_update(acc: &mut f64, diff: &Matrix<Rational>) {
    let v = diff.max_abs();
    if v > *acc {
        *acc = v;
    }
}

/// The scaled monodromy entries start with the identity at order zero and
/// the current operator at order one.
pub fn monodromy_limit(problem: &LimitProblem, seed: u64) -> Result<LimitCheck> {
    let n = problem.chain().n_gl();
    let dim = problem.chain().dim();
    let mut err = 0.0;
    for a in 1..=n {
        for b in 1..=n {
            let exp = eps_expand(problem, &LimitObject::MonodromyEntry { a, b }, 1, seed)?;
            let order0 = if a == b {
                Matrix::identity(dim)
            } else {
                Matrix::zeros(dim, dim)
            };
            max_abs_update(&mut err, &exp.orders[0].sub(&order0));
            let current = current_entry(problem.chain(), a, b, problem.u())?;
            max_abs_update(&mut err, &exp.orders[1].sub(&current));
        }
    }
    Ok(LimitCheck::exact("monodromy_limit".into(), err))
}

/// The scaled modified transfer matrix of rank `k` vanishes below order
/// `k` and reproduces the Gaudin transfer matrix at order `k`.
pub fn modified_transfer_limit(
    problem: &LimitProblem,
    k: usize,
    seed: u64,
) -> Result<LimitCheck> {
    let exp = eps_expand(problem, &LimitObject::ModifiedTransfer { k }, k, seed)?;
    let mut err = 0.0;
    for m in 0..k {
        max_abs_update(&mut err, &exp.orders[m]);
    }
    let target = gaudin_transfer(problem.chain(), &problem.gaudin().k_matrix(), k, problem.u())?;
    max_abs_update(&mut err, &exp.orders[k].sub(&target));
    Ok(LimitCheck::exact(format!("modified_transfer_limit k={k}"), err))
}

/// The alternating transfer sum with scaled shifts matches the Gaudin
/// operator pencil coefficient by coefficient at order `N`.
pub fn difference_operator_limit(problem: &LimitProblem, seed: u64) -> Result<LimitCheck> {
    let n = problem.chain().n_gl();
    let k_matrix = problem.gaudin().k_matrix();
    let mut err = 0.0;
    for m in 0..=n {
        let exp =
            eps_expand(problem, &LimitObject::DifferenceCoefficient { m }, n - m, seed)?;
        for j in 0..n - m {
            max_abs_update(&mut err, &exp.orders[j]);
        }
        let mut target = gaudin_transfer(problem.chain(), &k_matrix, n - m, problem.u())?
            .scaled(&Rational::from_rational(&factorial(m)));
        if (n - m) % 2 == 1 {
            target = target.scaled(&-Rational::one());
        }
        max_abs_update(&mut err, &exp.orders[n - m].sub(&target));
    }
    Ok(LimitCheck::exact("difference_operator_limit".into(), err))
}

/// The normalized weight function at scaled variables vanishes below the
/// total variable count and reproduces the Gaudin weight function there.
pub fn weight_function_limit(problem: &LimitProblem, seed: u64) -> Result<LimitCheck> {
    let total = problem.config().total();
    let exp = eps_expand(problem, &LimitObject::WeightFunction, total, seed)?;
    let mut err = 0.0;
    for m in 0..total {
        max_abs_update(&mut err, &exp.orders[m]);
    }
    let target =
        gaudin_weight_function_raw(problem.chain(), problem.config(), problem.roots())?;
    max_abs_update(&mut err, &exp.orders[total].sub(&column(&target)));
    Ok(LimitCheck::exact("weight_function_limit".into(), err))
}

/// Every Bethe equation ratio expands as one plus the scale times the
/// additive Gaudin equation expression.
pub fn equation_ratio_limit(problem: &LimitProblem) -> Result<LimitCheck> {
    let residuals = gaudin_bae_residual(problem.gaudin(), problem.roots())?;
    let config = problem.config();
    let mut err: f64 = 0.0;
    for a in 1..=config.levels().len() {
        for i in 0..config.level_count(a) {
            let series = equation_ratio_series(problem, a, i, 1)?;
            let d0 = series[0].clone() - Rational::one();
            let d1 = series[1].clone() - residuals[config.prefix(a) + i].clone();
            err = err.max(d0.abs_f64()).max(d1.abs_f64());
        }
    }
    Ok(LimitCheck::exact("equation_ratio_limit".into(), err))
}

/// The factorized eigenvalue operator with scaled shifts matches the
/// composed first order Gaudin factors at order `N`, coefficient by
/// coefficient in the derivative.
pub fn factorized_operator_limit(problem: &LimitProblem) -> Result<LimitCheck> {
    let n = problem.chain().n_gl();
    let master = master_operator(problem.gaudin(), problem.roots(), problem.u(), 0)?;
    let mut err: f64 = 0.0;
    for m in 0..=n {
        let series = factorized_coefficient_series(problem, m, n - m)?;
        for coeff in series.iter().take(n - m) {
            err = err.max(coeff.abs_f64());
        }
        let target = master.coeffs()[m].value().clone() * factorial(m);
        err = err.max((series[n - m].clone() - target).abs_f64());
    }
    Ok(LimitCheck::exact("factorized_operator_limit".into(), err))
}

/// The deformed Gram matrix at scaled points approaches the plain tensor
/// product of the site Gram matrices.
///
/// The rate is linear in the scale, so two rounds of step halving
/// extrapolation at `eps`, `eps/2`, `eps/4` bring the deviation well below
/// the tolerance while every Gram matrix is still computed exactly.
pub fn gram_limit(chain: &TensorChain, eps: &Rational, tol: f64) -> Result<LimitCheck> {
    let two = rat_int(2);
    let gram_at = |e: &Rational| -> Result<Matrix<Rational>> {
        let z = chain.z().iter().map(|v| v / e).collect();
        let scaled = TensorChain::new(chain.modules().to_vec(), z)?;
        deformed_gram(&scaled)
    };
    let s1 = gram_at(eps)?;
    let s2 = gram_at(&(eps / &two))?;
    let s4 = gram_at(&(eps / (&two * &two)))?;
    let first = s2.scaled(&two).sub(&s1);
    let second = s4.scaled(&two).sub(&s2);
    let extrapolated = second
        .scaled(&rat_int(4))
        .sub(&first)
        .scaled(&(Rational::one() / rat_int(3)));
    let target = chain_gram(chain)?;
    let err = extrapolated.sub(&target).max_abs();
    Ok(LimitCheck { name: "gram_limit".into(), max_abs_error: err, pass: err <= tol })
}

/// Runs every scaling identity for the given problem and returns one
/// check per identity.
pub fn limit_suite(problem: &LimitProblem, seed: u64) -> Result<Vec<LimitCheck>> {
    let n = problem.chain().n_gl();
    let mut checks = Vec::new();
    checks.push(monodromy_limit(problem, seed)?);
    for k in 1..=n {
        checks.push(modified_transfer_limit(problem, k, seed)?);
    }
    checks.push(difference_operator_limit(problem, seed)?);
    checks.push(weight_function_limit(problem, seed)?);
    if problem.config().total() > 0 {
        checks.push(equation_ratio_limit(problem)?);
    }
    checks.push(factorized_operator_limit(problem)?);
    checks.push(gram_limit(problem.chain(), &crate::scalars::rat(1, 10000), 1e-8)?);
    Ok(checks)
}
