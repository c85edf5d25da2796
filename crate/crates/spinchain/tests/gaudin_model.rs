use num_traits::Zero;
use spinchain::bethe_xxx::{BetheConfig, BetheRoots};
use spinchain::diffop::{DiffOp, MatrixJet};
use spinchain::gaudin::{
    casimir_c1, casimir_c2, current_jet, dynamical_hamiltonian_g, dynamical_hamiltonian_x,
    g2_residues_at_site, gaudin_dynamical_expansion, gaudin_eigenvalue_z, gaudin_hamiltonian,
    gaudin_transfer, gaudin_transfer_all, gaudin_weight_function, gaudin_weight_recursive,
    GaudinProblem,
};
use spinchain::linalg::{apply_first_group, elementary, place_on_legs, Matrix};
use spinchain::reps::GlModule;
use spinchain::rmatrix::antisymmetrizer;
use spinchain::scalars::{rat, rat_int, sample_points, Rational};
use spinchain::yangian::{xxx_dynamical_expansion, TensorChain, TwistMatrix};

fn vector_chain(n: usize, z: &[(i64, i64)]) -> TensorChain {
    let module = GlModule::vector_rep(n);
    let points = z.iter().map(|&(p, q)| rat(p, q)).collect();
    TensorChain::new(vec![module; z.len()], points).unwrap()
}

fn full_matrix(n: usize, seed: u64) -> Matrix<Rational> {
    let entries = sample_points(seed, n * n, &[]);
    Matrix::from_fn(n, n, |i, j| entries[i * n + j].clone())
}

fn diag_matrix(entries: &[Rational]) -> Matrix<Rational> {
    let n = entries.len();
    Matrix::from_fn(n, n, |i, j| if i == j { entries[i].clone() } else { rat_int(0) })
}

fn identity_scaled(d: usize, c: &Rational) -> Matrix<Rational> {
    Matrix::identity(d).scaled(c)
}

#[test]
fn weight_function_sum_and_recursion_agree() {
    let cases: Vec<(TensorChain, Vec<usize>, Vec<Vec<Rational>>)> = vec![
        (vector_chain(2, &[(0, 1), (2, 1)]), vec![2], vec![vec![rat(5, 7), rat(9, 4)]]),
        (
            vector_chain(3, &[(0, 1), (2, 1)]),
            vec![1, 1],
            vec![vec![rat(5, 7)], vec![rat(9, 4)]],
        ),
        (
            vector_chain(3, &[(0, 1), (2, 1)]),
            vec![2, 1],
            vec![vec![rat(5, 7), rat(-3, 2)], vec![rat(9, 4)]],
        ),
        (
            vector_chain(4, &[(0, 1), (2, 1)]),
            vec![1, 1, 1],
            vec![vec![rat(5, 7)], vec![rat(9, 4)], vec![rat(-3, 2)]],
        ),
        (
            TensorChain::new(
                vec![GlModule::wedge_rep(3, 2).unwrap(), GlModule::vector_rep(3)],
                vec![rat_int(0), rat_int(2)],
            )
            .unwrap(),
            vec![1, 1],
            vec![vec![rat(5, 7)], vec![rat(9, 4)]],
        ),
    ];
    for (chain, xi, levels) in cases {
        let config = BetheConfig::new(chain.n_gl(), xi.clone()).unwrap();
        let roots = BetheRoots::new(levels);
        let direct = gaudin_weight_function(&chain, &config, &roots).unwrap();
        let recursive = gaudin_weight_recursive(&chain, &config, &roots).unwrap();
        assert_eq!(direct, recursive, "sum and recursion differ for levels {xi:?}");
        assert!(
            direct.iter().any(|c| !c.is_zero()),
            "weight function vanished for levels {xi:?}"
        );
    }
}

#[test]
fn first_transfer_coefficient_is_scalar_on_weight_vectors() {
    let chain = vector_chain(3, &[(0, 1), (2, 1)]);
    let config = BetheConfig::new(3, vec![1, 1]).unwrap();
    let k_diag = vec![rat_int(2), rat(-1, 3), rat(1, 2)];
    let problem = GaudinProblem::new(chain.clone(), k_diag.clone(), config.clone()).unwrap();
    let roots = BetheRoots::new(vec![vec![rat(5, 7)], vec![rat(9, 4)]]);
    let w = gaudin_weight_function(&chain, &config, &roots).unwrap();
    assert!(w.iter().any(|c| !c.is_zero()), "weight vector must not vanish");
    let k_matrix = diag_matrix(&k_diag);
    for u in [rat(7, 3), rat(-5, 2)] {
        let lhs = gaudin_transfer(&chain, &k_matrix, 1, &u).unwrap().apply(&w);
        let scalar = gaudin_eigenvalue_z(&problem, &roots, 1, &u).unwrap();
        let rhs: Vec<Rational> = w.iter().map(|c| c.clone() * scalar.clone()).collect();
        assert_eq!(lhs, rhs, "first coefficient acts by a scalar at u = {u}");
    }
}

#[test]
fn transfer_coefficients_commute_at_rational_points() {
    let cases = [
        (vector_chain(2, &[(0, 1), (1, 1)]), full_matrix(2, 3100)),
        (vector_chain(3, &[(0, 1), (2, 1)]), full_matrix(3, 3110)),
    ];
    for (chain, k_matrix) in cases {
        let n = chain.n_gl();
        let sites = chain.len();
        let excluded = chain.z().to_vec();
        let max_pts = n * sites + 1;
        let us = sample_points(3120 + n as u64, max_pts, &excluded);
        let vs = sample_points(3130 + n as u64, max_pts, &excluded);
        let at_u: Vec<Vec<Matrix<Rational>>> = us
            .iter()
            .map(|u| gaudin_transfer_all(&chain, &k_matrix, u).unwrap())
            .collect();
        let at_v: Vec<Vec<Matrix<Rational>>> = vs
            .iter()
            .map(|v| gaudin_transfer_all(&chain, &k_matrix, v).unwrap())
            .collect();
        for k in 1..=n {
            for l in k..=n {
                for tu in at_u.iter().take(k * sites + 1) {
                    for tv in at_v.iter().take(l * sites + 1) {
                        assert!(
                            tu[k].commutator(&tv[l]).is_zero(),
                            "coefficients {k} and {l} fail to commute for gl({n})"
                        );
                    }
                }
            }
        }
    }
}

#[test]
fn pencil_factorizes_through_the_antisymmetrizer() {
    let cases = [
        (vector_chain(2, &[(0, 1), (1, 1)]), full_matrix(2, 3200), rat(9, 4)),
        (vector_chain(3, &[(1, 2)]), full_matrix(3, 3210), rat(7, 3)),
    ];
    for (chain, k_matrix, u0) in cases {
        let n = chain.n_gl();
        let d = chain.dim();
        let mut dims = vec![n; n];
        dims.push(d);
        let total: usize = dims.iter().product();
        let jet_order = n;

        let mut factors = Vec::with_capacity(n);
        for c in 0..n {
            let mut order0 = vec![Matrix::<Rational>::zeros(total, total); jet_order + 1];
            for a in 1..=n {
                for b in 1..=n {
                    let unit = elementary::<Rational>(n, a, b);
                    let jet = current_jet(&chain, a, b, &u0, jet_order).unwrap();
                    for (m, coeff) in jet.coeffs().iter().enumerate() {
                        if coeff.is_zero() {
                            continue;
                        }
                        order0[m] =
                            order0[m].sub(&place_on_legs(&dims, &[c, n], &unit.kron(coeff)));
                    }
                }
            }
            order0[0] = order0[0].sub(&place_on_legs(&dims, &[c], &k_matrix));
            factors.push(DiffOp::from_coeffs(vec![
                MatrixJet::from_coeffs(order0),
                MatrixJet::constant(Matrix::identity(total), jet_order),
            ]));
        }
        let mut product = factors[n - 1].clone();
        for c in (0..n - 1).rev() {
            product = factors[c].compose(&product);
        }

        let anti = apply_first_group(&antisymmetrizer(n, n), d, &Matrix::identity(total));
        let transfers = gaudin_transfer_all(&chain, &k_matrix, &u0).unwrap();
        for j in 0..=n {
            let k = n - j;
            let mut lhs = anti.matmul(&place_on_legs(&dims, &[n], &transfers[k]));
            if k % 2 == 1 {
                lhs = lhs.scaled(&rat_int(-1));
            }
            let rhs = product.coeffs()[j].value().matmul(&anti);
            assert_eq!(lhs, rhs, "order {j} coefficient differs for gl({n})");
        }
    }
}

#[test]
fn oracle_eigenpairs_pass_every_coefficient_check() {
    let chain = vector_chain(2, &[(0, 1), (1, 1)]);
    let config = BetheConfig::new(2, vec![1]).unwrap();
    let problem = GaudinProblem::new(chain, vec![rat_int(0), rat_int(0)], config).unwrap();
    let roots = BetheRoots::new(vec![vec![rat(1, 2)]]);
    let samples = [rat(9, 4), rat(-5, 3), rat(7, 2), rat(1, 5), rat_int(-3)];
    let report = verify_exact(&problem, &roots, &samples);
    assert_eq!(report.singular_residual, Some(0.0), "midpoint vector must be singular");

    let single = vector_chain(2, &[(0, 1)]);
    let twisted = GaudinProblem::new(
        single,
        vec![rat_int(0), rat_int(3)],
        BetheConfig::new(2, vec![1]).unwrap(),
    )
    .unwrap();
    let twisted_roots = BetheRoots::new(vec![vec![rat(1, 3)]]);
    let twisted_samples = [rat(9, 4), rat(-5, 3), rat(1, 5)];
    let report = verify_exact(&twisted, &twisted_roots, &twisted_samples);
    assert_eq!(report.singular_residual, None, "twisted reports skip the singular check");

    let rank_three = vector_chain(3, &[(0, 1), (1, 1)]);
    let wedge_config = BetheConfig::new(3, vec![1, 0]).unwrap();
    let wedge_problem = GaudinProblem::new(
        rank_three,
        vec![rat_int(0); 3],
        wedge_config,
    )
    .unwrap();
    let wedge_roots = BetheRoots::new(vec![vec![rat(1, 2)], vec![]]);
    let report = verify_exact(&wedge_problem, &wedge_roots, &samples);
    assert_eq!(report.singular_residual, Some(0.0), "rank three vector must be singular");
}

fn verify_exact(
    problem: &GaudinProblem,
    roots: &BetheRoots<Rational>,
    samples: &[Rational],
) -> spinchain::bethe_xxx::EigenpairReport<Rational> {
    let report = spinchain::gaudin::verify_gaudin_eigenpair(problem, roots, samples).unwrap();
    assert_eq!(report.max_bae_residual, 0.0, "roots must solve the equations exactly");
    assert_eq!(report.max_relative_residual, 0.0, "eigenvalue identity must be exact");
    assert!(report.weight_ok, "vector must sit in the predicted weight space");
    report
}

#[test]
fn large_argument_expansion_recovers_the_rational_dynamical_hamiltonians() {
    let cases = [
        (vector_chain(2, &[(0, 1), (1, 1)]), vec![rat_int(2), rat(-1, 3)]),
        (vector_chain(2, &[(5, 1)]), vec![rat_int(2), rat(-1, 3)]),
        (vector_chain(3, &[(0, 1), (2, 1)]), vec![rat_int(1), rat(-1, 2), rat_int(3)]),
    ];
    for (chain, k_diag) in cases {
        let n = chain.n_gl();
        let d = chain.dim();
        for x in [rat(5, 7), rat_int(-2)] {
            let expansion = gaudin_dynamical_expansion(&chain, &k_diag, &x).unwrap();
            assert_eq!(expansion.order0, Matrix::identity(d), "constant term is the identity");

            let mut first = Matrix::zeros(d, d);
            let mut second = Matrix::zeros(d, d);
            for a in 1..=n {
                let pole = rat_int(1) / (x.clone() - k_diag[a - 1].clone());
                let eaa = chain.global_generator(a, a);
                first = first.sub(&eaa.scaled(&pole));
                let mut inner = dynamical_hamiltonian_g(&chain, &k_diag, a).unwrap();
                for b in 1..=n {
                    if b == a {
                        continue;
                    }
                    let dk = k_diag[a - 1].clone() - k_diag[b - 1].clone();
                    let ebb = chain.global_generator(b, b);
                    inner = inner.sub(&eaa.matmul(&ebb).scaled(&(rat_int(1) / dk)));
                }
                second = second.sub(&inner.scaled(&pole));
            }
            assert_eq!(expansion.order1, first, "first order term for gl({n}) at x = {x}");
            assert_eq!(expansion.order2, second, "second order term for gl({n}) at x = {x}");
        }
    }
}

#[test]
fn large_argument_expansion_recovers_the_trigonometric_dynamical_hamiltonians() {
    let cases = [
        (vector_chain(2, &[(0, 1), (1, 1)]), vec![rat_int(2), rat(-1, 3)]),
        (vector_chain(2, &[(5, 1)]), vec![rat_int(2), rat(-1, 3)]),
        (vector_chain(3, &[(0, 1), (2, 1)]), vec![rat_int(1), rat(-1, 2), rat_int(3)]),
    ];
    for (chain, k_diag) in cases {
        let n = chain.n_gl();
        let d = chain.dim();
        let twist = TwistMatrix::diagonal(k_diag.clone());
        for x in [rat(5, 7), rat_int(-2)] {
            let expansion = xxx_dynamical_expansion(&chain, &twist, &x).unwrap();
            assert_eq!(expansion.order0, Matrix::identity(d), "constant term is the identity");

            let mut first = Matrix::zeros(d, d);
            let mut second = Matrix::zeros(d, d);
            for a in 1..=n {
                let weight = k_diag[a - 1].clone() / (x.clone() - k_diag[a - 1].clone());
                let eaa = chain.global_generator(a, a);
                first = first.sub(&eaa.scaled(&weight));
                let mut inner = dynamical_hamiltonian_x(&chain, &k_diag, a).unwrap();
                inner = inner.add(&eaa.matmul(&eaa).scaled(&rat(1, 2)));
                for b in 1..=n {
                    if b == a {
                        continue;
                    }
                    let dk = k_diag[a - 1].clone() - k_diag[b - 1].clone();
                    let ebb = chain.global_generator(b, b);
                    inner = inner
                        .sub(&eaa.matmul(&ebb).scaled(&(k_diag[b - 1].clone() / dk)));
                }
                second = second.sub(&inner.scaled(&weight));
            }
            assert_eq!(expansion.order1, first, "first order term for gl({n}) at x = {x}");
            assert_eq!(expansion.order2, second, "second order term for gl({n}) at x = {x}");
        }
    }
}

#[test]
fn second_transfer_coefficient_expands_in_casimirs_and_hamiltonians() {
    let cases = [
        (vector_chain(2, &[(0, 1), (1, 1)]), vec![rat_int(2), rat(-1, 3)]),
        (vector_chain(3, &[(0, 1), (2, 1)]), vec![rat_int(1), rat(-1, 2), rat_int(3)]),
    ];
    for (chain, k_diag) in cases {
        let n = chain.n_gl();
        let d = chain.dim();
        let dims = chain.site_dims();
        let k_matrix = diag_matrix(&k_diag);
        let trace_k: Rational = k_diag.iter().cloned().sum();
        let mut trace_k_wedge = rat_int(0);
        for a in 0..n {
            for b in a + 1..n {
                trace_k_wedge = trace_k_wedge + k_diag[a].clone() * k_diag[b].clone();
            }
        }

        let c1: Vec<Matrix<Rational>> = (0..chain.len())
            .map(|i| place_on_legs(&dims, &[i], &casimir_c1(&chain.modules()[i])))
            .collect();
        let c2: Vec<Matrix<Rational>> = (0..chain.len())
            .map(|i| place_on_legs(&dims, &[i], &casimir_c2(&chain.modules()[i])))
            .collect();
        let residues: Vec<(Matrix<Rational>, Matrix<Rational>)> = (0..chain.len())
            .map(|i| {
                let mut paired = identity_scaled(d, &trace_k);
                for j in 0..chain.len() {
                    if j == i {
                        continue;
                    }
                    let dz = chain.z()[i].clone() - chain.z()[j].clone();
                    paired = paired.add(&c1[j].scaled(&(rat_int(1) / dz)));
                }
                let h = gaudin_hamiltonian(&chain, &k_diag, i + 1).unwrap();
                (c2[i].clone(), c1[i].matmul(&paired).sub(&h))
            })
            .collect();

        for u in [rat(9, 4), rat(-5, 3), rat_int(7)] {
            let mut expected = identity_scaled(d, &trace_k_wedge);
            for (i, (double, single)) in residues.iter().enumerate() {
                let du = u.clone() - chain.z()[i].clone();
                expected = expected.add(&single.scaled(&(rat_int(1) / du.clone())));
                expected = expected.add(&double.scaled(&(rat_int(1) / (du.clone() * du))));
            }
            let g2 = gaudin_transfer(&chain, &k_matrix, 2, &u).unwrap();
            assert_eq!(g2, expected, "pole expansion of the second coefficient for gl({n})");
        }

        for i in 0..chain.len() {
            let (second, first) = g2_residues_at_site(&chain, &k_diag, i + 1).unwrap();
            assert_eq!(second, residues[i].0, "double pole at site {} for gl({n})", i + 1);
            assert_eq!(first, residues[i].1, "simple pole at site {} for gl({n})", i + 1);
        }
    }
}
