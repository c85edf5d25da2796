use spinchain::bethe_xxx::{BetheConfig, BetheProblem};
use spinchain::gaudin::GaudinProblem;
use spinchain::reps::GlModule;
use spinchain::scalars::{rat_int, ComplexScalar};
use spinchain::solver::{solve_chain_bae, solve_gaudin_bae, SolveOutcome, SolverOptions};
use spinchain::yangian::{TensorChain, TwistMatrix};

fn vector_chain(n: usize, z: &[i64]) -> TensorChain {
    let module = GlModule::vector_rep(n);
    TensorChain::new(vec![module; z.len()], z.iter().map(|&p| rat_int(p)).collect()).unwrap()
}

fn basin_of(outcome: &SolveOutcome, target: f64) -> usize {
    outcome
        .solutions
        .iter()
        .zip(&outcome.basin_counts)
        .filter(|(roots, _)| {
            let t = &roots.flat()[0];
            (t - ComplexScalar::new(target, 0.0)).norm() < 1e-8
        })
        .map(|(_, count)| *count)
        .sum()
}

fn assert_same_outcome(a: &SolveOutcome, b: &SolveOutcome) {
    assert_eq!(a.attempts, b.attempts, "attempt counts drifted between reruns");
    assert_eq!(a.converged, b.converged, "convergence counts drifted between reruns");
    assert_eq!(a.basin_counts, b.basin_counts, "basin counts drifted between reruns");
    assert_eq!(a.solutions.len(), b.solutions.len(), "solution counts drifted");
    for (x, y) in a.solutions.iter().zip(&b.solutions) {
        assert_eq!(x.flat(), y.flat(), "root values drifted between reruns");
    }
}

#[test]
fn chain_solver_recovers_the_closed_form_root_from_most_starts() {
    let chain = vector_chain(2, &[0, 3]);
    let config = BetheConfig::new(2, vec![1]).unwrap();
    let problem = BetheProblem::new(chain, TwistMatrix::identity(2), config).unwrap();
    let opts = SolverOptions { seed: 7, starts: 20, ..SolverOptions::default() };
    let outcome = solve_chain_bae(&problem, &opts).unwrap();
    assert_eq!(outcome.attempts, 20, "every start must be attempted");
    let basin = basin_of(&outcome, 1.0);
    assert!(basin >= 18, "root t = 1 reached from only {basin} of 20 starts");

    let rerun = solve_chain_bae(&problem, &opts).unwrap();
    assert_same_outcome(&outcome, &rerun);

    let other_seed = SolverOptions { seed: 99, starts: 20, ..SolverOptions::default() };
    let fresh = solve_chain_bae(&problem, &other_seed).unwrap();
    assert!(basin_of(&fresh, 1.0) >= 18, "root must also be found under a different seed");
}

#[test]
fn gaudin_solver_recovers_the_closed_form_root_from_most_starts() {
    let chain = vector_chain(2, &[0, 1]);
    let config = BetheConfig::new(2, vec![1]).unwrap();
    let problem =
        GaudinProblem::new(chain, vec![rat_int(0), rat_int(0)], config).unwrap();
    let opts = SolverOptions { seed: 7, starts: 20, ..SolverOptions::default() };
    let outcome = solve_gaudin_bae(&problem, &opts).unwrap();
    assert_eq!(outcome.attempts, 20, "every start must be attempted");
    let basin = basin_of(&outcome, 0.5);
    assert!(basin >= 18, "root t = 1/2 reached from only {basin} of 20 starts");

    let rerun = solve_gaudin_bae(&problem, &opts).unwrap();
    assert_same_outcome(&outcome, &rerun);

    let other_seed = SolverOptions { seed: 99, starts: 20, ..SolverOptions::default() };
    let fresh = solve_gaudin_bae(&problem, &other_seed).unwrap();
    assert!(basin_of(&fresh, 0.5) >= 18, "root must also be found under a different seed");
}

#[test]
fn gaudin_solver_tracks_the_reciprocal_twist_root() {
    let chain = vector_chain(2, &[0]);
    let config = BetheConfig::new(2, vec![1]).unwrap();
    let kappa = 3i64;
    let problem = GaudinProblem::new(
        chain,
        vec![rat_int(0), rat_int(kappa)],
        config,
    )
    .unwrap();
    let opts = SolverOptions { seed: 5, starts: 20, ..SolverOptions::default() };
    let outcome = solve_gaudin_bae(&problem, &opts).unwrap();
    let basin = basin_of(&outcome, 1.0 / kappa as f64);
    assert!(basin >= 18, "root t = 1/3 reached from only {basin} of 20 starts");
    let max_residual = outcome
        .solutions
        .iter()
        .map(|roots| {
            spinchain::gaudin::gaudin_bae_residual(&problem, roots)
                .unwrap()
                .iter()
                .map(|r| r.norm())
                .fold(0.0, f64::max)
        })
        .fold(0.0, f64::max);
    assert!(max_residual < 1e-10, "reported roots leave residual {max_residual}");
}
