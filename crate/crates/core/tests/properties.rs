mod common;

use ebnull::channel::{canonical_complement, eb_check};
use ebnull::mixed_unitary::traceless_complement_range;
use ebnull::nullspace::{channel_nullspace, synthesize_annihilator};
use ebnull::privacy::{constant_diagonal_algebra, example_family, kraus_partition, offdiag_annihilation_check};
use ebnull::{io, random, CMatrix, Channel, EbVerdict, Tolerance};
use proptest::prelude::*;

fn tol() -> Tolerance {
    Tolerance::default()
}

/// Random channel from an isometry `V: ℂ^n → ℂ^m ⊗ ℂ^k` cut into Kraus blocks.
fn random_channel(seed: u64, n: usize, m: usize, k: usize) -> Channel {
    let mut rng = random::rng(seed);
    let g = random::ginibre(&mut rng, m * k, n);
    let q = g.qr().q();
    let kraus = (0..k).map(|i| q.rows(i * m, m).into_owned()).collect();
    Channel::from_kraus(kraus, &tol()).unwrap()
}

fn config() -> ProptestConfig {
    ProptestConfig::with_cases(48)
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn choi_matches_definition(seed in any::<u64>(), n in 1usize..4, m in 1usize..4, k in 1usize..4) {
        let phi = random_channel(seed, n, m, k);
        prop_assert!((phi.choi() - common::choi(phi.kraus())).norm() < 1e-12);
        prop_assert!(common::min_eigenvalue(&phi.choi()) > -1e-12);
        prop_assert!(phi.choi_rank(&tol()) <= k);
    }

    #[test]
    fn nullspace_is_self_adjoint_traceless_and_annihilated(seed in any::<u64>(), n in 2usize..4, k in 1usize..4) {
        let phi = random_channel(seed, n, n, k);
        let kernel = channel_nullspace(&phi, &tol());
        prop_assert!(kernel.is_self_adjoint() && kernel.is_traceless());
        prop_assert_eq!(kernel.dim(), common::kernel(phi.kraus()).len());
        for b in kernel.basis() {
            prop_assert!(common::apply(phi.kraus(), b).norm() < 1e-9);
            prop_assert!(b.trace().norm() < 1e-9);
            prop_assert!((b - b.adjoint()).norm() < 1e-9);
        }
    }

    #[test]
    fn complement_is_a_channel_matching_definition(seed in any::<u64>(), n in 2usize..4, k in 1usize..5) {
        let phi = random_channel(seed, n, n, k);
        let comp = canonical_complement(&phi, &tol()).unwrap();
        prop_assert!(common::trace_preservation(comp.kraus()) < 1e-9);
        prop_assert_eq!(comp.n_out(), phi.choi_rank(&tol()));
        // Input Kraus already minimal.
        if phi.kraus().len() == comp.n_out() {
            prop_assert!((comp.choi() - common::complement_choi(phi.kraus())).norm() < 1e-10);
        }
    }

    #[test]
    fn complement_range_splits_hermitian_space(seed in any::<u64>(), n in 2usize..4, k in 2usize..4) {
        let phi = random_channel(seed, n, n, k);
        let (s, t) = traceless_complement_range(&phi, &tol()).unwrap();
        let d = s.n();
        prop_assert_eq!(s.dim() + t.dim(), d * d);
        for a in s.basis() {
            for b in t.basis() {
                prop_assert!((a.adjoint() * b).trace().norm() < 1e-9);
            }
        }
        // The identity is never in S (Φ^C is trace preserving), so T ≠ 0.
        prop_assert!(t.dim() >= 1);
    }

    #[test]
    fn synthesis_round_trip(seed in any::<u64>(), n in 2usize..5, frac in 0.0f64..1.0) {
        let mut rng = random::rng(seed);
        let dim = 1 + ((n * n - 2) as f64 * frac) as usize;
        let target = random::traceless_subspace(&mut rng, n, dim, &tol());
        let (phi, recipe) = synthesize_annihilator(&target, seed, &tol()).unwrap();
        let found = channel_nullspace(&phi, &tol());
        prop_assert_eq!(found.dim(), dim);
        prop_assert!(found.span_distance(&target) <= 1e-7);
        prop_assert_eq!(eb_check(&phi, &tol()).verdict, EbVerdict::EntanglementBreaking);
        for f in &recipe.povm {
            prop_assert!(common::min_eigenvalue(f) > -1e-12);
        }
    }

    #[test]
    fn channel_json_round_trip_is_idempotent(seed in any::<u64>(), n in 1usize..4, k in 1usize..4) {
        let phi = random_channel(seed, n, n, k);
        let once = io::channel_to_json(&io::channel_from_json(&io::channel_to_json(&phi), &tol()).unwrap());
        let twice = io::channel_to_json(&io::channel_from_json(&once, &tol()).unwrap());
        prop_assert_eq!(once, twice);
    }

    #[test]
    fn partition_invariants_on_example_family(seed in any::<u64>(), r in 1usize..4, s in 1usize..4) {
        let phi = example_family(r, s, seed).unwrap();
        let part = kraus_partition(&phi, &tol()).unwrap();
        prop_assert_eq!(part.classes.len(), r);
        let n = r * s;
        let mut sum = CMatrix::zeros(n, n);
        for q in &part.q {
            prop_assert!((q * q - q).norm() < 1e-9);
            sum += q;
        }
        prop_assert!((sum - CMatrix::identity(n, n)).norm() < 1e-9);
        prop_assert!(part.lemma_residual <= 1e-8);
        prop_assert!(offdiag_annihilation_check(&phi, &part, &tol()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn constant_diagonal_bases_have_constant_diagonals(choice in 0usize..6) {
        let partitions: [&[(usize, usize)]; 6] = [
            &[(1, 1), (1, 1)],
            &[(2, 2)],
            &[(3, 2)],
            &[(3, 3)],
            &[(1, 1), (1, 1), (1, 1), (1, 1)],
            &[(2, 1), (1, 1)],
        ];
        let part = partitions[choice];
        let r: usize = part.iter().map(|&(a, b)| a * b).sum();
        let cd = constant_diagonal_algebra(r, part, &tol()).unwrap();
        for a in &cd.basis {
            let mean = a.trace() / ebnull::C64::new(r as f64, 0.0);
            for x in 0..r {
                prop_assert!((a[(x, x)] - mean).norm() <= 1e-9);
            }
        }
        // Closed under multiplication: products stay in the span.
        let span = ebnull::operator::orthonormalize(r, &cd.basis, &tol()).unwrap();
        for a in &cd.basis {
            for b in &cd.basis {
                prop_assert!(span.distance(&(a * b)) < 1e-9);
            }
        }
    }
}
