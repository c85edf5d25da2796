use num_traits::Zero;
use spinchain::forms::{
    chain_gram, deformed_gram, intertwiner_r, leading_principal_minors, shapovalov_gram,
};
use spinchain::gaudin::gaudin_transfer_all;
use spinchain::linalg::Matrix;
use spinchain::reps::GlModule;
use spinchain::rmatrix::fused_r;
use spinchain::scalars::{rat, rat_int, sample_points, Rational};
use spinchain::yangian::{transfer_matrix, TensorChain, TwistMatrix};

fn two_site_chain(modules: [GlModule; 2], z: [Rational; 2]) -> TensorChain {
    TensorChain::new(modules.to_vec(), z.to_vec()).unwrap()
}

fn symmetric_matrix(entries: &[&[(i64, i64)]]) -> Matrix<Rational> {
    let n = entries.len();
    Matrix::from_fn(n, n, |i, j| {
        let (p, q) = if i <= j { entries[i][j - i] } else { entries[j][i - j] };
        rat(p, q)
    })
}

#[test]
fn vector_and_wedge_grams_are_the_identity() {
    for n in 2..=4 {
        let gram = shapovalov_gram(&GlModule::vector_rep(n)).unwrap();
        assert_eq!(gram, Matrix::identity(n), "vector basis of gl({n}) is orthonormal");
    }
    for (n, k) in [(3usize, 2usize), (4, 2), (4, 3)] {
        let module = GlModule::wedge_rep(n, k).unwrap();
        let gram = shapovalov_gram(&module).unwrap();
        assert_eq!(
            gram,
            Matrix::identity(module.dim()),
            "wedge basis of rank {k} for gl({n}) is orthonormal"
        );
    }
}

#[test]
fn symmetric_twist_makes_the_transfer_family_self_adjoint() {
    let cases = [
        (
            two_site_chain(
                [GlModule::vector_rep(2), GlModule::vector_rep(2)],
                [rat_int(0), rat_int(3)],
            ),
            symmetric_matrix(&[&[(2, 1), (1, 2)], &[(-1, 1)]]),
        ),
        (
            two_site_chain(
                [GlModule::vector_rep(3), GlModule::wedge_rep(3, 2).unwrap()],
                [rat_int(0), rat(7, 3)],
            ),
            symmetric_matrix(&[&[(1, 1), (1, 2), (0, 1)], &[(-2, 1), (1, 3)], &[(3, 1)]]),
        ),
    ];
    for (chain, q) in cases {
        let n = chain.n_gl();
        let gram = deformed_gram(&chain).unwrap();
        assert_eq!(gram, gram.transpose(), "deformed form must be symmetric for gl({n})");
        let twist = TwistMatrix::full(q).unwrap();
        for u in [rat(9, 5), rat(-7, 4)] {
            for k in 1..=n {
                let t = transfer_matrix(&chain, &twist, k, &u).unwrap();
                assert_eq!(
                    t.transpose().matmul(&gram),
                    gram.matmul(&t),
                    "transfer of rank {k} is not self adjoint for gl({n}) at u = {u}"
                );
            }
        }
    }
}

#[test]
fn symmetric_gaudin_matrix_makes_the_coefficients_self_adjoint() {
    let cases = [
        (
            two_site_chain(
                [GlModule::vector_rep(2), GlModule::vector_rep(2)],
                [rat_int(0), rat_int(1)],
            ),
            symmetric_matrix(&[&[(1, 1), (1, 3)], &[(-2, 1)]]),
        ),
        (
            two_site_chain(
                [GlModule::vector_rep(3), GlModule::wedge_rep(3, 2).unwrap()],
                [rat_int(0), rat_int(2)],
            ),
            symmetric_matrix(&[&[(0, 1), (1, 2), (-1, 1)], &[(2, 1), (1, 4)], &[(1, 1)]]),
        ),
    ];
    for (chain, k_matrix) in cases {
        let n = chain.n_gl();
        let gram = chain_gram(&chain).unwrap();
        for u in [rat(9, 4), rat(-5, 3)] {
            let transfers = gaudin_transfer_all(&chain, &k_matrix, &u).unwrap();
            for (k, g) in transfers.iter().enumerate().skip(1) {
                assert_eq!(
                    g.transpose().matmul(&gram),
                    gram.matmul(g),
                    "coefficient {k} is not self adjoint for gl({n}) at u = {u}"
                );
            }
        }
    }
}

#[test]
fn spread_evaluation_points_give_a_positive_definite_deformed_form() {
    let chains = [
        TensorChain::new(
            vec![GlModule::vector_rep(2); 2],
            vec![rat_int(3), rat_int(0)],
        )
        .unwrap(),
        TensorChain::new(
            vec![GlModule::vector_rep(3); 3],
            vec![rat_int(4), rat_int(2), rat_int(0)],
        )
        .unwrap(),
        TensorChain::new(
            vec![GlModule::vector_rep(3), GlModule::wedge_rep(3, 2).unwrap()],
            vec![rat_int(3), rat_int(0)],
        )
        .unwrap(),
    ];
    for chain in chains {
        let gram = deformed_gram(&chain).unwrap();
        assert_eq!(gram, gram.transpose(), "deformed form must be symmetric");
        let minors = leading_principal_minors(&gram);
        for (i, minor) in minors.iter().enumerate() {
            assert!(
                *minor > rat_int(0),
                "principal minor {} is {minor} on a chain of dimension {}",
                i + 1,
                chain.dim()
            );
        }
    }
}

#[test]
fn wedge_intertwiners_match_the_normalized_fused_matrices() {
    let mut integers: Vec<Rational> = (-10..=10).map(rat_int).collect();
    integers.extend((-10..=10).map(|p| rat(2 * p + 1, 2)));
    let cases = [(2usize, 1usize, 1usize), (3, 2, 1), (3, 1, 2), (3, 2, 2), (4, 2, 3)];
    for (case, &(n, l, m)) in cases.iter().enumerate() {
        let left = GlModule::wedge_rep(n, l).unwrap();
        let right = GlModule::wedge_rep(n, m).unwrap();
        for (draw, u) in sample_points(4400 + 17 * case as u64, 2, &integers)
            .into_iter()
            .enumerate()
        {
            let got = intertwiner_r(&left, &right, &u).unwrap();
            let v = u.clone() + rat_int(l as i64) - rat_int(m as i64);
            let mut scale =
                (v.clone() + rat_int(m.saturating_sub(l) as i64)) / (v.clone() + rat_int(m as i64));
            for i in 0..l {
                for j in 0..m {
                    let factor = v.clone() + rat_int(j as i64) - rat_int(i as i64);
                    assert!(!factor.is_zero(), "draw hit a pole of the closed form");
                    scale = scale / factor;
                }
            }
            let expected = fused_r::<Rational>(n, l, m, &v).unwrap().scaled(&scale);
            assert_eq!(
                got, expected,
                "closed form differs for ranks ({l}, {m}) in gl({n}) on draw {draw}"
            );
        }
    }
}
