use proptest::prelude::*;
use specsketch::*;

fn c16() -> (Laplacian, ExactSpectrum) {
    let lap = laplacian(&cycle_graph(16), LaplacianKind::Combinatorial).unwrap();
    let s = dense_eigendecomposition(&lap).unwrap();
    (lap, s)
}

#[test]
fn full_threshold_counts_everything_in_expectation() {
    let (lap, s) = c16();
    let counter = OpCounter::new();
    let mut total = 0.0;
    let seeds = 300;
    for seed in 0..seeds {
        let mut probe = CountProbe::new(&lap, FilterMode::Exact(&s), 4, seed, &counter).unwrap();
        total += probe.count(lap.lambda_max_bound()).unwrap();
    }
    let mean = total / seeds as f64;
    // ||R||_F^2 has mean N and variance 2N/d
    let se = (2.0 * 16.0 / 4.0 / seeds as f64).sqrt();
    assert!((mean - 16.0).abs() < 4.0 * se, "mean {mean}");
}

#[test]
fn cycle_c16_count_between_eigenvalues() {
    let (lap, s) = c16();
    let lambda = 0.5 * (s.lambda(5) + s.lambda(6));
    let want = true_count(&s, lambda) as f64;
    // C_16 eigenvalues pair up (2 - 2 cos(2 pi j / 16) for j and 16 - j), so a
    // threshold between the 5th and 6th smallest sits above 5 of them
    assert_eq!(want, 5.0);
    let counter = OpCounter::new();
    let mut total = 0.0;
    for seed in 0..200 {
        let mut probe = CountProbe::new(&lap, FilterMode::Exact(&s), 5, seed, &counter).unwrap();
        total += probe.count(lambda).unwrap();
    }
    assert!((total / 200.0 - want).abs() < 0.5);

    // the polynomial probe at m = 500 agrees as well
    let mut total = 0.0;
    for seed in 0..200 {
        total += eigencount(&lap, lambda, 5, 500, seed).unwrap();
    }
    assert!((total / 200.0 - want).abs() < 0.5, "{}", total / 200.0);
}

#[test]
fn zero_threshold_counts_components() {
    let g = Graph::from_edges(9, [(0, 1, 1.0), (1, 2, 1.0), (3, 4, 1.0), (4, 5, 1.0), (6, 7, 1.0), (7, 8, 1.0)])
        .unwrap();
    let lap = laplacian(&g, LaplacianKind::Combinatorial).unwrap();
    let s = dense_eigendecomposition(&lap).unwrap();
    let counter = OpCounter::new();
    let mut total = 0.0;
    for seed in 0..400 {
        let mut probe = CountProbe::new(&lap, FilterMode::Exact(&s), 3, seed, &counter).unwrap();
        total += probe.count(0.0).unwrap();
    }
    let se = (2.0 * 3.0 / 3.0 / 400.0f64).sqrt();
    assert!((total / 400.0 - 3.0).abs() < 4.0 * se);
}

#[test]
fn fast_search_on_c64_takes_few_iterations() {
    let lap = laplacian(&cycle_graph(64), LaplacianKind::Combinatorial).unwrap();
    let s = dense_eigendecomposition(&lap).unwrap();
    let seeds = 20;
    let mut iterations = 0;
    for seed in 0..seeds {
        let est = estimate_lambda_k_fast(&lap, 32, 32, 500, 10, seed).unwrap();
        assert!(est.converged, "seed {seed}: {est:?}");
        iterations += est.iterations;
        // the count is stochastic, so the oracle count at the returned lambda is only
        // close to k (C_64 counts step by 2)
        assert!(true_count(&s, est.lambda_est).abs_diff(32) <= 5, "seed {seed}");
    }
    let mean = iterations as f64 / seeds as f64;
    assert!(mean <= 4.0, "mean iterations {mean}");
}

#[test]
fn unconverged_fast_search_returns_its_closest_probe() {
    let lap = sensor(300, 3);
    let mut seen = 0;
    for seed in 0..20 {
        let est = estimate_lambda_k_fast(&lap, 20, 20, 200, 2, seed).unwrap();
        if est.converged {
            continue;
        }
        seen += 1;
        let best = est.history.iter().map(|r| (r.count - 20.0).abs()).fold(f64::INFINITY, f64::min);
        let picked = est.history.iter().find(|r| r.lambda == est.lambda_est).unwrap();
        assert_eq!(picked.count, est.count_est);
        assert_eq!((picked.count - 20.0).abs(), best, "seed {seed}");
    }
    assert!(seen > 0);
}

#[test]
fn dichotomy_on_c64() {
    let lap = laplacian(&cycle_graph(64), LaplacianKind::Combinatorial).unwrap();
    let s = dense_eigendecomposition(&lap).unwrap();
    let counter = OpCounter::new();
    // odd k: oracle counts on C_64 are odd below the top eigenvalue
    let mut hits = 0;
    for seed in 0..20 {
        let mut probe = CountProbe::new(&lap, FilterMode::Exact(&s), 33, seed, &counter)
            .unwrap()
            .fresh_signals(true);
        let est = dichotomy_search(&mut probe, 33, 1e-3, 64).unwrap();
        assert_eq!(est.history[0].lambda, lap.lambda_max_bound() / 2.0);
        if true_count(&s, est.lambda_est) == 33 {
            hits += 1;
        }
    }
    assert!(hits >= 10, "{hits} of 20");
}

#[test]
fn dichotomy_interval_stopping_rule() {
    let lap = laplacian(&cycle_graph(100), LaplacianKind::Normalized).unwrap();
    let est = estimate_lambda_k_dichotomy(&lap, 5, 5, 200, 0.1, 7).unwrap();
    let last = est.history.last().unwrap();
    assert!(est.converged || last.lambda_ub - last.lambda_lb < 0.1 * 0.5 * (last.lambda_ub + last.lambda_lb));
    // a converged probe leaves the bracket as it was
    let halving = if est.converged { est.history.len() - 1 } else { est.history.len() };
    for w in est.history[..halving].windows(2) {
        assert!(w[1].lambda_ub - w[1].lambda_lb <= 0.5 * (w[0].lambda_ub - w[0].lambda_lb) + 1e-15);
    }
}

fn sensor(n: usize, seed: u64) -> Laplacian {
    let cloud = uniform_cloud(n, 2, seed).unwrap();
    let g = build_knn_graph(&cloud, 8, Kernel::Binary, None).unwrap();
    laplacian(&g, LaplacianKind::Normalized).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn exact_counts_are_monotone(seed in 0u64..10_000, a in 0.0f64..2.0, b in 0.0f64..2.0) {
        let lap = sensor(60, 1);
        let s = dense_eigendecomposition(&lap).unwrap();
        let counter = OpCounter::new();
        let mut probe = CountProbe::new(&lap, FilterMode::Exact(&s), 4, seed, &counter).unwrap();
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(probe.count(lo).unwrap() <= probe.count(hi).unwrap() + 1e-12);
    }

    #[test]
    fn fast_search_brackets_stay_valid(
        seed in 0u64..10_000,
        k in 1usize..40,
        graph_seed in 0u64..4,
        interpolation in prop_oneof![
            Just(Interpolation::Local),
            Just(Interpolation::Bracket),
            Just(Interpolation::PowerLaw)
        ],
    ) {
        let lap = sensor(120, graph_seed);
        let counter = OpCounter::new();
        let mode = FilterMode::Chebyshev { order: 120, damping: Damping::Jackson };
        let mut probe = CountProbe::new(&lap, mode, k, seed, &counter).unwrap();
        let est = fast_search(&mut probe, k, 10, interpolation).unwrap();
        prop_assert!(est.iterations <= 10);
        prop_assert!(est.lambda_est >= 0.0 && est.lambda_est <= lap.lambda_max_bound());
        for p in &est.history {
            prop_assert!(p.lambda_lb <= p.lambda_ub);
            prop_assert!(p.count_lb <= k as f64 && k as f64 <= p.count_ub);
            prop_assert!(p.lambda >= 0.0 && p.lambda <= lap.lambda_max_bound());
        }
        // every probe except possibly a converged last one lands inside the brackets
        for w in est.history.windows(2) {
            prop_assert!(w[0].lambda_lb <= w[1].lambda && w[1].lambda <= w[0].lambda_ub);
        }
        prop_assert_eq!(probe.probes(), est.iterations as u64);
        prop_assert_eq!(counter.snapshot().matvecs, (120 * k * est.iterations) as u64);
    }
}
