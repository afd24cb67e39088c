use num_complex::Complex64;
use proptest::prelude::*;

use qeraser::channels::{asymptotic_state, DensityMatrix, SchurChannel};
use qeraser::correction::{eraser_scenario, run_correction, screen_pattern};
use qeraser::decomposition::{decompose_qubit, flat_search, reconstruction_residual, SearchConfig};
use qeraser::dilation::{build_dilation, gram_matrix};
use qeraser::infometrics::{bounds_report, entropy_exchange, entropy_production_check, majorization_check};
use qeraser::numerics::{
    hermitian_eig, partial_trace_env, partial_trace_sys, schur_product, unitary_completion, von_neumann_entropy,
    ComplexMatrix,
};
use qeraser::sampling::{
    random_correlation, random_correlation_of_rank, random_hermitian, random_pure_state, random_state, random_unit_vector,
    random_unitary, rng_from_seed,
};
use rand::Rng;

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        failure_persistence: None,
        ..ProptestConfig::default()
    }
}

proptest! {
    #![proptest_config(config(1000))]

    #[test]
    fn eig_reconstructs_hermitian(seed in any::<u64>(), d in 1usize..=8) {
        let mut rng = rng_from_seed(seed);
        let a = random_hermitian(d, &mut rng);
        let eig = hermitian_eig(&a).unwrap();
        prop_assert!(eig.reconstruct().frobenius_distance(&a) <= 1e-10 * a.frobenius_norm().max(1.0));
        prop_assert!(eig.eigenvalues.windows(2).all(|w| w[0] >= w[1]));
        let v = &eig.eigenvectors;
        prop_assert!((&v.adjoint() * v).max_abs_diff(&ComplexMatrix::identity(d)) <= 1e-10);
    }

    #[test]
    fn majorization_holds(seed in any::<u64>(), d in 1usize..=6) {
        let mut rng = rng_from_seed(seed);
        prop_assert!(majorization_check(&random_state(d, &mut rng)));
    }
}

proptest! {
    #![proptest_config(config(200))]

    #[test]
    fn schur_product_of_psd_is_psd(seed in any::<u64>(), d in 1usize..=6) {
        let mut rng = rng_from_seed(seed);
        let a = random_state(d, &mut rng);
        let b = random_state(d, &mut rng);
        let c = schur_product(a.matrix(), b.matrix()).unwrap();
        prop_assert!(hermitian_eig(&c).unwrap().min_eigenvalue() >= -1e-12);
    }

    #[test]
    fn partial_traces_preserve_trace(seed in any::<u64>(), ds in 1usize..=4, de in 1usize..=4) {
        let mut rng = rng_from_seed(seed);
        let joint = random_state(ds * de, &mut rng);
        let env = partial_trace_env(joint.matrix(), ds, de).unwrap();
        let sys = partial_trace_sys(joint.matrix(), ds, de).unwrap();
        prop_assert!((env.trace().re - 1.0).abs() <= 1e-12);
        prop_assert!((sys.trace().re - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn completion_is_unitary(seed in any::<u64>(), n in 1usize..=6, extra in 0usize..=3) {
        let mut rng = rng_from_seed(seed);
        let u = random_unitary(n + extra, &mut rng);
        let given: Vec<_> = (0..n).map(|j| u.column(j)).collect();
        let full = unitary_completion(&given, n + extra).unwrap();
        prop_assert!((&full.adjoint() * &full).max_abs_diff(&ComplexMatrix::identity(n + extra)) <= 1e-10);
        for (j, col) in given.iter().enumerate() {
            let got = full.column(j);
            prop_assert!(got.iter().zip(col).all(|(a, b)| (a - b).norm() <= 1e-12));
        }
    }

    #[test]
    fn entropy_is_unitarily_invariant(seed in any::<u64>(), d in 1usize..=6) {
        let mut rng = rng_from_seed(seed);
        let rho = random_state(d, &mut rng);
        let u = random_unitary(d, &mut rng);
        let s0 = von_neumann_entropy(rho.matrix()).unwrap();
        let s1 = von_neumann_entropy(&u.conjugate(rho.matrix()).hermitian_part()).unwrap();
        prop_assert!((s0 - s1).abs() <= 1e-9);
        prop_assert!(s0 >= -1e-12 && s0 <= (d as f64).log2() + 1e-9);
    }

    #[test]
    fn channel_output_is_a_state_with_same_diagonal(seed in any::<u64>(), d in 1usize..=6, rank in 1usize..=6) {
        let mut rng = rng_from_seed(seed);
        let ch = SchurChannel::new(random_correlation_of_rank(d, rank.min(d), &mut rng));
        let rho = random_state(d, &mut rng);
        let out = ch.apply_schrodinger(&rho).unwrap();
        prop_assert!((out.matrix().trace().re - 1.0).abs() <= 1e-12);
        for (a, b) in out.populations().iter().zip(rho.populations()) {
            prop_assert!((a - b).abs() <= 1e-15);
        }
        // classical states are fixed points
        let diag = asymptotic_state(&rho);
        prop_assert!(ch.apply_schrodinger(&diag).unwrap().matrix().max_abs_diff(diag.matrix()) <= 1e-15);
    }

    #[test]
    fn choi_is_psd_and_maps_to_jamiolkowski(seed in any::<u64>(), d in 1usize..=5) {
        let mut rng = rng_from_seed(seed);
        let ch = SchurChannel::new(random_correlation(d, &mut rng));
        let choi = ch.choi_operator();
        prop_assert!(hermitian_eig(&choi).unwrap().min_eigenvalue() >= -1e-10);
        // R_J[(l,k),(k',l')] = R_C[(k,k'),(l,l')]: swap of the first and third indices
        let jam = ch.jamiolkowski_operator();
        let n = d;
        let mut max_gap: f64 = 0.0;
        for k in 0..n { for kp in 0..n { for l in 0..n { for lp in 0..n {
            let c = choi[(k * n + kp, l * n + lp)];
            let j = jam[(l * n + kp, k * n + lp)];
            max_gap = max_gap.max((c - j).norm());
        }}}}
        prop_assert!(max_gap <= 1e-15);
    }

    #[test]
    fn iteration_is_a_semigroup(seed in any::<u64>(), d in 2usize..=5, n in 0u32..20, m in 0u32..20) {
        let mut rng = rng_from_seed(seed);
        let ch = SchurChannel::new(random_correlation(d, &mut rng));
        let rho = random_state(d, &mut rng);
        let both = ch.iterate(&rho, n + m).unwrap();
        let split = ch.iterate(&ch.iterate(&rho, n).unwrap(), m).unwrap();
        prop_assert!(both.matrix().max_abs_diff(split.matrix()) <= 1e-12);
        for k in 0..d {
            for l in 0..d {
                let expected = ch.xi().get(l, k).norm().powi((n + m) as i32) * rho.matrix()[(k, l)].norm();
                prop_assert!((both.matrix()[(k, l)].norm() - expected).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn mixtures_of_channels_mix_outputs(seed in any::<u64>(), d in 1usize..=5, lambda in 0.0f64..=1.0) {
        let mut rng = rng_from_seed(seed);
        let a = SchurChannel::new(random_correlation(d, &mut rng));
        let b = SchurChannel::new(random_correlation(d, &mut rng));
        let rho = random_state(d, &mut rng);
        let mix = SchurChannel::mixture(&a, &b, lambda).unwrap();
        let lhs = mix.apply_schrodinger(&rho).unwrap();
        let rhs = &a.apply_schrodinger(&rho).unwrap().matrix().scale_real(lambda)
            + &b.apply_schrodinger(&rho).unwrap().matrix().scale_real(1.0 - lambda);
        prop_assert!(lhs.matrix().max_abs_diff(&rhs) <= 1e-14);
    }

    #[test]
    fn dilation_reproduces_channel(seed in any::<u64>(), d in 1usize..=5, rank in 1usize..=5) {
        let mut rng = rng_from_seed(seed);
        let xi = random_correlation_of_rank(d, rank.min(d), &mut rng);
        let ch = SchurChannel::new(xi.clone());
        let dil = build_dilation(&ch).unwrap();
        let rho = random_state(d, &mut rng);
        let reduced = dil.reduced_system(&rho).unwrap();
        prop_assert!(reduced.matrix().frobenius_distance(ch.apply_schrodinger(&rho).unwrap().matrix()) <= 1e-9);
        prop_assert!(dil.unitarity_deviation() <= 1e-10);
        prop_assert!(dil.column_deviation() <= 1e-10);
        prop_assert!(gram_matrix(dil.env_vectors()).max_abs_diff(xi.matrix()) <= 1e-10);
        prop_assert_eq!(dil.dim_env(), rank.min(d).max(2));
    }

    #[test]
    fn exchange_entropy_bounds_production(seed in any::<u64>(), d in 1usize..=5) {
        let mut rng = rng_from_seed(seed);
        let ch = SchurChannel::new(random_correlation(d, &mut rng));
        let rho = random_state(d, &mut rng);
        prop_assert!(entropy_production_check(&ch, &rho).unwrap().satisfied);
    }

    #[test]
    fn qubit_closed_form_is_minimal_and_recovers(seed in any::<u64>()) {
        let mut rng = rng_from_seed(seed);
        let xi = random_correlation(2, &mut rng);
        let ch = SchurChannel::new(xi.clone());
        let dec = decompose_qubit(&xi).unwrap();
        let report = bounds_report(&ch, Some(&dec)).unwrap();
        prop_assert!((report.h_p.unwrap() - report.s_xi_over_d).abs() <= 1e-9);
        prop_assert_eq!(report.orthogonal_family, Some(true));
        let rho = random_pure_state(2, &mut rng);
        let run = run_correction(&ch, &dec, &rho).unwrap();
        prop_assert!(run.residual <= 1e-10);
        let probs = run.probabilities();
        for (p, w) in probs.iter().zip(dec.weights()) {
            prop_assert!((p - w).abs() <= 1e-12);
        }
        prop_assert!(run.uncorrected.matrix().max_abs_diff(ch.apply_schrodinger(&rho).unwrap().matrix()) <= 1e-12);
    }

    #[test]
    fn eraser_restores_any_state(seed in any::<u64>(), d in 2usize..=6) {
        let mut rng = rng_from_seed(seed);
        let scenario = eraser_scenario(d).unwrap();
        let rho = random_state(d, &mut rng);
        let run = scenario.run(&rho).unwrap();
        prop_assert!(run.residual <= 1e-10);
        for p in run.probabilities() {
            prop_assert!((p - 1.0 / d as f64).abs() <= 1e-12);
        }
    }
}

proptest! {
    #![proptest_config(config(40))]

    #[test]
    fn search_reproduces_channel_and_respects_floor(seed in any::<u64>(), d in 2usize..=3) {
        let mut rng = rng_from_seed(seed);
        let xi = random_correlation(d, &mut rng);
        let ch = SchurChannel::new(xi.clone());
        let dec = flat_search(&xi, &SearchConfig { seed, ..SearchConfig::default() }).unwrap();
        prop_assert!(reconstruction_residual(&xi, &dec) <= 1e-8);
        let obs = random_hermitian(d, &mut rng);
        prop_assert!(dec.apply_heisenberg(&obs).unwrap().max_abs_diff(&ch.apply_heisenberg(&obs).unwrap()) <= 1e-8);
        let rho = random_state(d, &mut rng);
        prop_assert!(
            dec.apply_schrodinger(&rho).unwrap().matrix().max_abs_diff(ch.apply_schrodinger(&rho).unwrap().matrix()) <= 1e-8
        );
        let report = bounds_report(&ch, Some(&dec)).unwrap();
        prop_assert_eq!(report.lower_bound_satisfied, Some(true));
        prop_assert!(run_correction(&ch, &dec, &rho).unwrap().residual <= 1e-8);
    }
}

#[test]
fn search_is_deterministic_across_thread_counts() {
    let mut rng = rng_from_seed(99);
    let xi = random_correlation(3, &mut rng);
    let cfg = SearchConfig {
        seed: 5,
        ..SearchConfig::default()
    };
    let runs: Vec<_> = [1, 2, 4]
        .into_iter()
        .map(|threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| flat_search(&xi, &cfg).unwrap())
        })
        .collect();
    assert_eq!(runs[0], runs[1]);
    assert_eq!(runs[0], runs[2]);
}

#[test]
fn output_entropy_grows_under_iteration() {
    let mut rng = rng_from_seed(3);
    for _ in 0..50 {
        let d = rng.random_range(2..=5);
        let ch = SchurChannel::new(random_correlation(d, &mut rng));
        assert!(ch.complete());
        let rho = random_pure_state(d, &mut rng);
        let ex = entropy_exchange(&ch, &rho).unwrap();
        let mut previous = 0.0;
        for n in 0..=30 {
            let s = ch.iterate(&rho, n).unwrap().entropy().unwrap();
            assert!(s >= previous - 1e-10, "n={n}: {s} < {previous}");
            previous = s;
        }
        // one application: S(E(ρ)) − S(ρ) ≤ S_ex(ρ), and S(ρ) = 0 here
        assert!(ch.apply_schrodinger(&rho).unwrap().entropy().unwrap() <= ex + 1e-9);
    }
}

#[test]
fn maximal_exchange_entropy_is_spectral_entropy() {
    let mut rng = rng_from_seed(4);
    for d in 1..=6 {
        for _ in 0..20 {
            let ch = SchurChannel::new(random_correlation(d, &mut rng));
            let r = bounds_report(&ch, None).unwrap();
            assert!((r.s_ex_maximal - r.s_xi_over_d).abs() <= 1e-10);
        }
    }
}

#[test]
fn visibility_dichotomy_for_flat_input() {
    for d in 2..=5 {
        let scenario = eraser_scenario(d).unwrap();
        let rho = DensityMatrix::flat_superposition(d);
        let run = scenario.run(&rho).unwrap();
        assert!((screen_pattern(&rho, 360).unwrap().visibility - 1.0).abs() <= 1e-9);
        assert!(screen_pattern(&run.uncorrected, 360).unwrap().visibility.abs() <= 1e-9);
        for r in &run.records {
            assert!((screen_pattern(&r.corrected_state, 360).unwrap().visibility - 1.0).abs() <= 1e-9);
        }
        // the which-way reading leaves no fringes to restore
        for r in scenario.which_way(&rho).unwrap() {
            assert!(screen_pattern(&r.conditional_state, 360).unwrap().visibility.abs() <= 1e-9);
        }
    }
}

#[test]
fn rank_one_xi_is_a_unitary_channel() {
    let mut rng = rng_from_seed(17);
    let u: Vec<Complex64> = random_unit_vector(3, &mut rng)
        .iter()
        .map(|z| z / z.norm())
        .collect();
    let xi = qeraser::validate_correlation(&ComplexMatrix::outer(&u, &u)).unwrap();
    let dec = flat_search(&xi, &SearchConfig::default()).unwrap();
    assert!(reconstruction_residual(&xi, &dec) <= 1e-8);
    assert!(dec.entropy() <= 1e-4, "H = {}", dec.entropy());
}
