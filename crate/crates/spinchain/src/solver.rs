//! Numerical search for Bethe roots.
//!
//! Damped Newton iteration with analytic Jacobians runs from a batch of
//! seeded random starting points. Converged points are filtered for
//! admissibility, deduplicated, and reported together with how many
//! starts reached each solution.

use crate::bethe_xxx::{is_off_diagonal, BetheProblem, BetheRoots};
use crate::gaudin::GaudinProblem;
use crate::linalg::Matrix;
use crate::scalars::{ComplexScalar, Scalar};
use crate::{Error, Result};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Knobs for the multi-start Newton search.
#[derive(Debug, Clone)]
pub struct SolverOptions {
    pub seed: u64,
    pub starts: usize,
    pub max_iter: usize,
    pub tol: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { seed: 7, starts: 20, max_iter: 200, tol: 1e-10 }
    }
}

/// Deduplicated solutions with per-solution basin sizes.
#[derive(Debug, Clone)]
pub struct SolveOutcome {
    pub solutions: Vec<BetheRoots<ComplexScalar>>,
    pub basin_counts: Vec<usize>,
    pub attempts: usize,
    pub converged: usize,
}

struct Evaluation {
    residuals: Vec<ComplexScalar>,
    jacobian: Matrix<ComplexScalar>,
    scales: Vec<f64>,
}

impl Evaluation {
    fn scaled_norm(&self) -> f64 {
        self.residuals
            .iter()
            .zip(&self.scales)
            .map(|(r, s)| r.abs_f64() / (1.0 + s))
            .fold(0.0, f64::max)
    }
}

trait ResidualSystem {
    fn len(&self) -> usize;
    fn evaluate(&self, x: &[ComplexScalar]) -> Option<Evaluation>;
}

/// One linear factor `t_p - base + shift` where the base is either a
/// fixed number or another unknown.
#[derive(Clone)]
enum FactorBase {
    Constant(ComplexScalar),
    Variable(usize),
}

#[derive(Clone)]
struct LinearFactor {
    base: FactorBase,
    shift: ComplexScalar,
}

impl LinearFactor {
    fn value(&self, own: ComplexScalar, x: &[ComplexScalar]) -> ComplexScalar {
        let base = match &self.base {
            FactorBase::Constant(c) => *c,
            FactorBase::Variable(q) => x[*q],
        };
        own - base + self.shift
    }
}

struct ProductTerm {
    coefficient: ComplexScalar,
    own: usize,
    factors: Vec<LinearFactor>,
}

impl ProductTerm {
    /// Value of the whole product and its gradient entries, using
    /// leave-one-out partial products.
    fn accumulate(
        &self,
        x: &[ComplexScalar],
        residual: &mut ComplexScalar,
        row: &mut [ComplexScalar],
        scale: &mut f64,
    ) {
        let own = x[self.own];
        let values: Vec<ComplexScalar> =
            self.factors.iter().map(|f| f.value(own, x)).collect();
        let m = values.len();
        let mut prefix = vec![ComplexScalar::new(1.0, 0.0); m + 1];
        for k in 0..m {
            prefix[k + 1] = prefix[k] * values[k];
        }
        let mut suffix = vec![ComplexScalar::new(1.0, 0.0); m + 1];
        for k in (0..m).rev() {
            suffix[k] = suffix[k + 1] * values[k];
        }
        let total = self.coefficient * prefix[m];
        *residual = *residual + total;
        *scale += total.abs_f64();
        for k in 0..m {
            let loo = self.coefficient * prefix[k] * suffix[k + 1];
            row[self.own] = row[self.own] + loo;
            if let FactorBase::Variable(q) = self.factors[k].base {
                row[q] = row[q] - loo;
            }
        }
    }
}

/// A square system whose equations are sums of products of linear
/// factors.
struct PolynomialSystem {
    equations: Vec<Vec<ProductTerm>>,
}

impl ResidualSystem for PolynomialSystem {
    fn len(&self) -> usize {
        self.equations.len()
    }

    fn evaluate(&self, x: &[ComplexScalar]) -> Option<Evaluation> {
        let m = self.len();
        let mut residuals = vec![ComplexScalar::new(0.0, 0.0); m];
        let mut jacobian: Matrix<ComplexScalar> = Matrix::zeros(m, m);
        let mut scales = vec![0.0; m];
        for (e, terms) in self.equations.iter().enumerate() {
            let mut row = vec![ComplexScalar::new(0.0, 0.0); m];
            for term in terms {
                term.accumulate(x, &mut residuals[e], &mut row, &mut scales[e]);
            }
            for (c, v) in row.into_iter().enumerate() {
                jacobian.set(e, c, v);
            }
        }
        Some(Evaluation { residuals, jacobian, scales })
    }
}

/// Polynomial Bethe equations of an inhomogeneous chain with a diagonal
/// twist, one pair of products per variable.
fn chain_bethe_system(problem: &BetheProblem) -> Result<PolynomialSystem> {
    let config = problem.config();
    let q_diag = problem
        .twist()
        .diagonal_entries()
        .ok_or_else(|| Error::DegenerateTwist("diagonal twist required".into()))?;
    let z: Vec<ComplexScalar> = problem
        .chain()
        .z()
        .iter()
        .map(ComplexScalar::from_rational)
        .collect();
    let level_count = config.levels().len();
    let mut equations = Vec::with_capacity(config.total());
    for a in 1..=level_count {
        for i in 0..config.level_count(a) {
            let own = config.prefix(a) + i;
            let build = |weight_level: usize, shifts: [i64; 3], sign: f64| -> ProductTerm {
                let mut factors = Vec::new();
                for (j, zj) in z.iter().enumerate() {
                    let weight = problem.site_weight(weight_level, j + 1);
                    factors.push(LinearFactor {
                        base: FactorBase::Constant(*zj),
                        shift: ComplexScalar::from_int(weight),
                    });
                }
                for j in 0..config.level_count(a - 1) {
                    factors.push(LinearFactor {
                        base: FactorBase::Variable(config.prefix(a - 1) + j),
                        shift: ComplexScalar::from_int(shifts[0]),
                    });
                }
                for j in 0..config.level_count(a) {
                    if j != i {
                        factors.push(LinearFactor {
                            base: FactorBase::Variable(config.prefix(a) + j),
                            shift: ComplexScalar::from_int(shifts[1]),
                        });
                    }
                }
                for j in 0..config.level_count(a + 1) {
                    factors.push(LinearFactor {
                        base: FactorBase::Variable(config.prefix(a + 1) + j),
                        shift: ComplexScalar::from_int(shifts[2]),
                    });
                }
                let coefficient = ComplexScalar::new(sign, 0.0)
                    * ComplexScalar::from_rational(&q_diag[weight_level - 1]);
                ProductTerm { coefficient, own, factors }
            };
            equations.push(vec![build(a, [1, -1, 0], 1.0), build(a + 1, [0, 1, -1], -1.0)]);
        }
    }
    Ok(PolynomialSystem { equations })
}

/// Gaudin Bethe equations with all denominators cleared, so the search
/// space has no flat directions toward infinity.
fn gaudin_bethe_system(problem: &GaudinProblem) -> PolynomialSystem {
    let config = problem.config();
    let z: Vec<ComplexScalar> = problem
        .chain()
        .z()
        .iter()
        .map(ComplexScalar::from_rational)
        .collect();
    let level_count = config.levels().len();
    let mut equations = Vec::with_capacity(config.total());
    for a in 1..=level_count {
        for i in 0..config.level_count(a) {
            let own = config.prefix(a) + i;
            let mut poles: Vec<(f64, FactorBase)> = Vec::new();
            for (j, zj) in z.iter().enumerate() {
                let diff = problem.site_weight(a, j + 1) - problem.site_weight(a + 1, j + 1);
                if diff != 0 {
                    poles.push((diff as f64, FactorBase::Constant(*zj)));
                }
            }
            for j in 0..config.level_count(a - 1) {
                poles.push((1.0, FactorBase::Variable(config.prefix(a - 1) + j)));
            }
            for j in 0..config.level_count(a) {
                if j != i {
                    poles.push((-2.0, FactorBase::Variable(config.prefix(a) + j)));
                }
            }
            for j in 0..config.level_count(a + 1) {
                poles.push((1.0, FactorBase::Variable(config.prefix(a + 1) + j)));
            }
            let gap = ComplexScalar::from_rational(&problem.k_diag()[a])
                - ComplexScalar::from_rational(&problem.k_diag()[a - 1]);
            let zero_shift = ComplexScalar::new(0.0, 0.0);
            let mut terms = Vec::new();
            for (k, (coefficient, _)) in poles.iter().enumerate() {
                let factors: Vec<LinearFactor> = poles
                    .iter()
                    .enumerate()
                    .filter(|(l, _)| *l != k)
                    .map(|(_, (_, base))| LinearFactor { base: base.clone(), shift: zero_shift })
                    .collect();
                terms.push(ProductTerm {
                    coefficient: ComplexScalar::new(*coefficient, 0.0),
                    own,
                    factors,
                });
            }
            terms.push(ProductTerm {
                coefficient: -gap,
                own,
                factors: poles
                    .iter()
                    .map(|(_, base)| LinearFactor { base: base.clone(), shift: zero_shift })
                    .collect(),
            });
            equations.push(terms);
        }
    }
    PolynomialSystem { equations }
}

const NEWTON_RESIDUAL_TOL: f64 = 1e-12;
const ESCAPE_RADIUS: f64 = 1e8;

fn newton_descent(
    system: &dyn ResidualSystem,
    mut x: Vec<ComplexScalar>,
    max_iter: usize,
) -> Option<Vec<ComplexScalar>> {
    let mut eval = system.evaluate(&x)?;
    for _ in 0..max_iter {
        let norm = eval.scaled_norm();
        if norm < NEWTON_RESIDUAL_TOL {
            return Some(x);
        }
        let delta = eval.jacobian.solve_vec(&eval.residuals)?;
        let mut lambda = 1.0;
        let mut improved = None;
        for _ in 0..30 {
            let trial: Vec<ComplexScalar> = x
                .iter()
                .zip(&delta)
                .map(|(xi, di)| *xi - ComplexScalar::new(lambda, 0.0) * *di)
                .collect();
            if trial.iter().any(|v| !v.re.is_finite() || !v.im.is_finite())
                || trial.iter().any(|v| v.abs_f64() > ESCAPE_RADIUS)
            {
                lambda /= 2.0;
                continue;
            }
            if let Some(trial_eval) = system.evaluate(&trial) {
                if trial_eval.scaled_norm() < norm {
                    improved = Some((trial, trial_eval));
                    break;
                }
            }
            lambda /= 2.0;
        }
        match improved {
            Some((next_x, next_eval)) => {
                x = next_x;
                eval = next_eval;
            }
            None => return None,
        }
    }
    if eval.scaled_norm() < NEWTON_RESIDUAL_TOL { Some(x) } else { None }
}

fn same_solution(a: &BetheRoots<ComplexScalar>, b: &BetheRoots<ComplexScalar>) -> bool {
    let radius = 1e-6;
    for (la, lb) in a.levels().iter().zip(b.levels()) {
        if la.len() != lb.len() {
            return false;
        }
        let mut used = vec![false; lb.len()];
        for root in la {
            let mut matched = false;
            for (j, other) in lb.iter().enumerate() {
                if !used[j] && (*root - *other).abs_f64() < radius {
                    used[j] = true;
                    matched = true;
                    break;
                }
            }
            if !matched {
                return false;
            }
        }
    }
    true
}

fn solution_sort_key(roots: &BetheRoots<ComplexScalar>) -> Vec<(f64, f64)> {
    roots.canonical().flat().iter().map(|v| (v.re, v.im)).collect()
}

fn run_multistart(
    system: &dyn ResidualSystem,
    config: &crate::bethe_xxx::BetheConfig,
    z: &[ComplexScalar],
    excluded: &[ComplexScalar],
    opts: &SolverOptions,
) -> SolveOutcome {
    let total = config.total();
    if total == 0 {
        let empty = BetheRoots::new(vec![Vec::new(); config.levels().len()]);
        return SolveOutcome {
            solutions: vec![empty],
            basin_counts: vec![opts.starts],
            attempts: opts.starts,
            converged: opts.starts,
        };
    }
    let center = if z.is_empty() {
        ComplexScalar::new(0.0, 0.0)
    } else {
        z.iter().copied().fold(ComplexScalar::new(0.0, 0.0), |acc, v| acc + v)
            / ComplexScalar::new(z.len() as f64, 0.0)
    };
    let spread = z.iter().map(|v| (*v - center).abs_f64()).fold(1.0, f64::max);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut solutions: Vec<BetheRoots<ComplexScalar>> = Vec::new();
    let mut counts: Vec<usize> = Vec::new();
    let mut converged = 0;
    for _ in 0..opts.starts {
        let mut x = Vec::with_capacity(total);
        for p in 0..total {
            let level = config.level_of_position(p);
            let re: f64 = rng.gen_range(-1.0..1.0);
            let im: f64 = rng.gen_range(-1.0..1.0);
            x.push(
                center
                    + ComplexScalar::new(0.31 * level as f64, 0.0)
                    + ComplexScalar::new(1.5 * spread * re, 1.5 * spread * im),
            );
        }
        let Some(found) = newton_descent(system, x, opts.max_iter) else {
            continue;
        };
        let Ok(roots) = BetheRoots::from_flat(config, &found) else {
            continue;
        };
        if !is_off_diagonal(&roots) {
            continue;
        }
        if found
            .iter()
            .any(|t| excluded.iter().any(|e| (*t - *e).abs_f64() < 1e-8))
        {
            continue;
        }
        let Some(final_eval) = system.evaluate(&found) else {
            continue;
        };
        if final_eval.scaled_norm() > opts.tol {
            continue;
        }
        converged += 1;
        match solutions.iter().position(|s| same_solution(s, &roots)) {
            Some(idx) => counts[idx] += 1,
            None => {
                solutions.push(roots.canonical());
                counts.push(1);
            }
        }
    }
    let mut order: Vec<usize> = (0..solutions.len()).collect();
    order.sort_by(|&i, &j| {
        let ka = solution_sort_key(&solutions[i]);
        let kb = solution_sort_key(&solutions[j]);
        ka.iter()
            .zip(&kb)
            .map(|(a, b)| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)))
            .find(|c| !c.is_eq())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    SolveOutcome {
        solutions: order.iter().map(|&i| solutions[i].clone()).collect(),
        basin_counts: order.iter().map(|&i| counts[i]).collect(),
        attempts: opts.starts,
        converged,
    }
}

/// Multi-start Newton search on the polynomial Bethe equations of
/// an inhomogeneous chain with a diagonal twist.
pub fn solve_chain_bae(problem: &BetheProblem, opts: &SolverOptions) -> Result<SolveOutcome> {
    let system = chain_bethe_system(problem)?;
    let z: Vec<ComplexScalar> =
        problem.chain().z().iter().map(ComplexScalar::from_rational).collect();
    Ok(run_multistart(&system, problem.config(), &z, &[], opts))
}

/// Multi-start Newton search on the Gaudin Bethe equations.  Roots
/// sitting on an evaluation point are discarded because the original
/// rational equations are singular there.
pub fn solve_gaudin_bae(problem: &GaudinProblem, opts: &SolverOptions) -> Result<SolveOutcome> {
    let system = gaudin_bethe_system(problem);
    let z: Vec<ComplexScalar> =
        problem.chain().z().iter().map(ComplexScalar::from_rational).collect();
    Ok(run_multistart(&system, problem.config(), &z, &z, opts))
}

/// All complex roots of a polynomial given by ascending coefficients,
/// found by simultaneous Durand-Kerner iteration.
pub fn polynomial_roots(coeffs: &[ComplexScalar]) -> Result<Vec<ComplexScalar>> {
    let mut monic: Vec<ComplexScalar> = coeffs.to_vec();
    while let Some(last) = monic.last() {
        if last.abs_f64() < 1e-300 {
            monic.pop();
        } else {
            break;
        }
    }
    if monic.len() <= 1 {
        return Ok(Vec::new());
    }
    let lead = *monic.last().expect("nonempty after trim");
    for c in &mut monic {
        *c = *c / lead;
    }
    let degree = monic.len() - 1;
    let eval = |x: ComplexScalar| -> ComplexScalar {
        let mut acc = ComplexScalar::new(0.0, 0.0);
        for c in monic.iter().rev() {
            acc = acc * x + *c;
        }
        acc
    };
    let radius = 1.0
        + monic[..degree]
            .iter()
            .map(ComplexScalar::abs_f64)
            .fold(0.0, f64::max);
    let seed = ComplexScalar::new(0.4, 0.9);
    let mut roots: Vec<ComplexScalar> = (0..degree)
        .map(|k| ComplexScalar::new(radius, 0.0) * seed.powu(k as u32 + 1))
        .collect();
    let max_iter = 1000;
    for _ in 0..max_iter {
        let mut shift = 0.0_f64;
        let snapshot = roots.clone();
        for k in 0..degree {
            let mut den = ComplexScalar::new(1.0, 0.0);
            for (j, other) in snapshot.iter().enumerate() {
                if j != k {
                    den = den * (snapshot[k] - *other);
                }
            }
            if den.abs_f64() < 1e-300 {
                den = ComplexScalar::new(1e-300, 0.0);
            }
            let step = eval(snapshot[k]) / den;
            roots[k] = snapshot[k] - step;
            shift = shift.max(step.abs_f64() / (1.0 + snapshot[k].abs_f64()));
        }
        if shift < 1e-14 {
            return Ok(roots);
        }
    }
    let worst = roots.iter().map(|r| eval(*r).abs_f64()).fold(0.0, f64::max);
    if worst < 1e-8 {
        Ok(roots)
    } else {
        Err(Error::NoConvergence { max_iter, best: worst })
    }
}
