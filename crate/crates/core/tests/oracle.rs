use std::f64::consts::PI;

use faer::Mat;
use specsketch::*;

fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v
}

fn reconstruction_error(lap: &Laplacian, s: &ExactSpectrum) -> f64 {
    let u = s.eigenvectors();
    let lambda = Mat::<f64>::from_fn(s.len(), s.len(), |i, j| {
        if i == j {
            s.eigenvalues()[i]
        } else {
            0.0
        }
    });
    let rebuilt = u * &lambda * u.transpose();
    let dense = oracle::dense_matrix(lap);
    (&rebuilt - &dense).norm_l2() / dense.norm_l2()
}

#[test]
fn complete_graph_k4_normalized() {
    let lap = laplacian(&complete_graph(4), LaplacianKind::Normalized).unwrap();
    let s = dense_eigendecomposition(&lap).unwrap();
    // K_n normalized: {0, n/(n-1) with multiplicity n-1}
    let want = [0.0, 4.0 / 3.0, 4.0 / 3.0, 4.0 / 3.0];
    for (a, b) in s.eigenvalues().iter().zip(want) {
        assert!((a - b).abs() < 1e-12, "{a} vs {b}");
    }
}

#[test]
fn cycle_c8_matches_circulant_spectrum() {
    let lap = laplacian(&cycle_graph(8), LaplacianKind::Combinatorial).unwrap();
    let s = dense_eigendecomposition(&lap).unwrap();
    let closed = sorted((0..8).map(|j| 2.0 - 2.0 * (2.0 * PI * j as f64 / 8.0).cos()).collect());
    for (a, b) in s.eigenvalues().iter().zip(&closed) {
        assert!((a - b).abs() < 1e-12);
    }
    // counting against a brute-force scan of the closed form
    for &lambda in &[1.0, 0.5, 2.0, 3.999, 4.0] {
        let brute = closed.iter().filter(|&&v| v <= lambda + 1e-12).count();
        assert_eq!(true_count(&s, lambda), brute, "lambda = {lambda}");
    }
    assert_eq!(true_count(&s, -1.0), 0);
    assert_eq!(true_count(&s, s.lambda(8)), 8);
    assert!(lap.lambda_max_bound() >= s.lambda(8));
}

#[test]
fn zero_eigenvalue_multiplicity_is_component_count() {
    let g = Graph::from_edges(7, [(0, 1, 1.0), (1, 2, 2.0), (3, 4, 1.0), (5, 6, 0.5)]).unwrap();
    let lap = laplacian(&g, LaplacianKind::Combinatorial).unwrap();
    let s = dense_eigendecomposition(&lap).unwrap();
    let zeros = s.eigenvalues().iter().filter(|v| v.abs() < 1e-10).count();
    assert_eq!(zeros, g.n_components());
    assert_eq!(zeros, 3);

    let (sbm, _) = generate_sbm(&SbmParams {
        n: 120,
        classes: 3,
        eps: 0.2,
        avg_degree: 10.0,
        seed: 2,
    })
    .unwrap();
    assert_eq!(sbm.n_components(), 1);
    let s = dense_eigendecomposition(&laplacian(&sbm, LaplacianKind::Combinatorial).unwrap()).unwrap();
    assert_eq!(s.eigenvalues().iter().filter(|v| v.abs() < 1e-10).count(), 1);
}

#[test]
fn decomposition_is_self_consistent() {
    let cloud = uniform_cloud(150, 2, 4).unwrap();
    let g = build_knn_graph(&cloud, 6, Kernel::Gaussian, None).unwrap();
    for kind in [LaplacianKind::Combinatorial, LaplacianKind::Normalized] {
        let lap = laplacian(&g, kind).unwrap();
        let s = dense_eigendecomposition(&lap).unwrap();
        assert!(reconstruction_error(&lap, &s) < 1e-8);
        assert!(orthonormality_error(s.eigenvectors()) < 1e-10);
        assert!(s.eigenvalues().windows(2).all(|w| w[0] <= w[1]));
    }
}

#[test]
fn normalized_spectrum_within_zero_two() {
    let cloud = uniform_cloud(50, 3, 8).unwrap();
    let g = build_knn_graph(&cloud, 5, Kernel::Binary, None).unwrap();
    let s = dense_eigendecomposition(&laplacian(&g, LaplacianKind::Normalized).unwrap()).unwrap();
    assert!(s.eigenvalues()[0] > -1e-12);
    assert!(s.lambda(50) < 2.0 + 1e-12);
}

#[test]
fn lambda_max_bound_dominates_oracle() {
    let mut graphs = vec![cycle_graph(8), path_graph(30), complete_graph(12)];
    for seed in 0..4 {
        let cloud = uniform_cloud(100 + 100 * seed as usize, 2, seed).unwrap();
        graphs.push(build_knn_graph(&cloud, 8, Kernel::Gaussian, None).unwrap());
        graphs.push(
            generate_sbm(&SbmParams {
                n: 200 + 100 * seed as usize,
                classes: 4,
                eps: 0.1,
                avg_degree: 12.0,
                seed,
            })
            .unwrap()
            .0,
        );
    }
    for g in &graphs {
        let lap = laplacian(g, LaplacianKind::Combinatorial).unwrap();
        let s = dense_eigendecomposition(&lap).unwrap();
        let top = s.lambda(s.len());
        assert!(lap.lambda_max_bound() >= top, "{} < {top}", lap.lambda_max_bound());
        assert!(lap.lambda_max_bound() <= 1.02 * top + 1e-12);
    }
}

#[test]
fn cap_can_be_overridden_explicitly() {
    let lap = laplacian(&cycle_graph(30), LaplacianKind::Normalized).unwrap();
    assert!(matches!(
        dense_eigendecomposition_with_cap(&lap, 20),
        Err(Error::OracleCap { n: 30, cap: 20 })
    ));
    assert!(dense_eigendecomposition_with_cap(&lap, 30).is_ok());
}
