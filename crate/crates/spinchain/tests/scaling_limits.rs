use spinchain::bethe_xxx::{BetheConfig, BetheRoots};
use spinchain::limits::{limit_suite, LimitCheck, LimitProblem};
use spinchain::reps::GlModule;
use spinchain::scalars::{rat, rat_int};
use spinchain::yangian::TensorChain;

fn assert_suite(checks: &[LimitCheck], n: usize) {
    let mut expected = vec!["monodromy_limit".to_string()];
    for k in 1..=n {
        expected.push(format!("modified_transfer_limit k={k}"));
    }
    expected.extend(
        [
            "difference_operator_limit",
            "weight_function_limit",
            "equation_ratio_limit",
            "factorized_operator_limit",
            "gram_limit",
        ]
        .map(String::from),
    );
    let names: Vec<String> = checks.iter().map(|c| c.name.clone()).collect();
    assert_eq!(names, expected, "suite composition changed");
    for check in checks {
        if check.name == "gram_limit" {
            assert!(check.pass, "{} deviates by {}", check.name, check.max_abs_error);
            assert!(
                check.max_abs_error <= 1e-8,
                "{} deviates by {}",
                check.name,
                check.max_abs_error
            );
        } else {
            assert_eq!(
                check.max_abs_error, 0.0,
                "{} must hold exactly, got {}",
                check.name, check.max_abs_error
            );
            assert!(check.pass, "{} reported failure", check.name);
        }
    }
}

#[test]
fn suite_is_exact_on_a_rank_two_problem_with_twist() {
    let chain = TensorChain::new(
        vec![GlModule::vector_rep(2), GlModule::vector_rep(2)],
        vec![rat_int(0), rat_int(1)],
    )
    .unwrap();
    let config = BetheConfig::new(2, vec![1]).unwrap();
    let roots = BetheRoots::new(vec![vec![rat(5, 7)]]);
    let problem = LimitProblem::new(
        chain,
        vec![rat(1, 3), rat_int(-2)],
        config,
        roots,
        rat(9, 4),
    )
    .unwrap();
    let checks = limit_suite(&problem, 4500).unwrap();
    assert_suite(&checks, 2);
}

#[test]
fn suite_is_exact_on_a_rank_three_problem() {
    let chain = TensorChain::new(
        vec![GlModule::vector_rep(3), GlModule::vector_rep(3)],
        vec![rat_int(0), rat_int(2)],
    )
    .unwrap();
    let config = BetheConfig::new(3, vec![1, 1]).unwrap();
    let roots = BetheRoots::new(vec![vec![rat(5, 7)], vec![rat(9, 4)]]);
    let problem = LimitProblem::new(
        chain,
        vec![rat(1, 2), rat_int(-1), rat_int(2)],
        config,
        roots,
        rat(7, 3),
    )
    .unwrap();
    let checks = limit_suite(&problem, 4510).unwrap();
    assert_suite(&checks, 3);
}

#[test]
fn suite_is_exact_with_a_wedge_module_on_the_chain() {
    let chain = TensorChain::new(
        vec![GlModule::vector_rep(3), GlModule::wedge_rep(3, 2).unwrap()],
        vec![rat_int(0), rat_int(2)],
    )
    .unwrap();
    let config = BetheConfig::new(3, vec![1, 1]).unwrap();
    let roots = BetheRoots::new(vec![vec![rat(5, 7)], vec![rat(9, 4)]]);
    let problem = LimitProblem::new(
        chain,
        vec![rat(1, 4), rat_int(1), rat(-3, 2)],
        config,
        roots,
        rat(9, 4),
    )
    .unwrap();
    let checks = limit_suite(&problem, 4520).unwrap();
    assert_suite(&checks, 3);
}

#[test]
fn scaled_variables_may_sit_on_different_levels_of_a_longer_chain() {
    let chain = TensorChain::new(
        vec![GlModule::vector_rep(2); 3],
        vec![rat_int(0), rat_int(1), rat_int(-2)],
    )
    .unwrap();
    let config = BetheConfig::new(2, vec![2]).unwrap();
    let roots = BetheRoots::new(vec![vec![rat(5, 7), rat(-4, 3)]]);
    let problem = LimitProblem::new(
        chain,
        vec![rat_int(0), rat(5, 3)],
        config,
        roots,
        rat(11, 5),
    )
    .unwrap();
    let checks = limit_suite(&problem, 4530).unwrap();
    assert_suite(&checks, 2);
}
