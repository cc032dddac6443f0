use std::path::Path;

use proptest::prelude::*;
use specsketch::*;

fn families(seed: u64) -> Vec<(&'static str, Graph)> {
    let sbm = SbmParams {
        n: 240,
        classes: 4,
        eps: 0.1,
        avg_degree: 10.0,
        seed,
    };
    let cloud = uniform_cloud(200, 2, seed).unwrap();
    let roll = generate_swissroll(200, 1.0, 4.0, seed).unwrap();
    vec![
        ("sbm", generate_sbm(&sbm).unwrap().0),
        ("sensor", build_knn_graph(&cloud, 6, Kernel::Binary, None).unwrap()),
        ("gaussian", build_knn_graph(&cloud, 6, Kernel::Gaussian, None).unwrap()),
        ("swissroll", build_knn_graph(&roll, 10, Kernel::Binary, None).unwrap()),
        ("cycle", cycle_graph(50)),
        ("path", path_graph(50)),
    ]
}

#[test]
fn generated_graphs_are_valid() {
    for seed in 0..3 {
        for (name, g) in families(seed) {
            g.validate().unwrap_or_else(|e| panic!("{name}: {e}"));
        }
    }
}

#[test]
fn lambda_max_estimate_bounds_the_spectrum() {
    for seed in 0..3 {
        for (name, g) in families(seed) {
            let lap = laplacian(&g, LaplacianKind::Combinatorial).unwrap();
            let s = dense_eigendecomposition(&lap).unwrap();
            let top = s.lambda(s.len());
            let est = estimate_lambda_max(&lap, 1e-6);
            assert!(est >= top - 1e-12, "{name}: estimate {est} below {top}");
            assert!(lap.lambda_max_bound() >= top - 1e-12, "{name}");
        }
    }
}

#[test]
fn sbm_depends_only_on_its_parameters() {
    let p = SbmParams {
        n: 500,
        classes: 5,
        eps: 0.2,
        avg_degree: 12.0,
        seed: 9,
    };
    let (a, la) = generate_sbm(&p).unwrap();
    let (b, lb) = generate_sbm(&p).unwrap();
    assert_eq!(la, lb);
    assert_eq!(a.edges().collect::<Vec<_>>(), b.edges().collect::<Vec<_>>());
    let (c, _) = generate_sbm(&SbmParams { seed: 10, ..p }).unwrap();
    assert_ne!(a.edges().collect::<Vec<_>>(), c.edges().collect::<Vec<_>>());
}

#[test]
fn sbm_average_degree_is_close_to_target() {
    let p = SbmParams {
        n: 4000,
        classes: 10,
        eps: 0.1,
        avg_degree: 16.0,
        seed: 2,
    };
    let (g, labels) = generate_sbm(&p).unwrap();
    let mean_degree = 2.0 * g.n_edges() as f64 / 4000.0;
    assert!((mean_degree - 16.0).abs() < 0.5, "{mean_degree}");
    let (mut intra, mut inter) = (0usize, 0usize);
    for (i, j, _) in g.edges() {
        if labels[i] == labels[j] {
            intra += 1;
        } else {
            inter += 1;
        }
    }
    // q/p = eps with 9 times as many inter-class pairs as intra-class ones
    let ratio = inter as f64 / intra as f64;
    let expected = 0.1 * (4000.0 - 400.0) / (400.0 - 1.0);
    assert!((ratio / expected - 1.0).abs() < 0.1, "{ratio} vs {expected}");
}

#[test]
fn writers_round_trip_through_loader() {
    let dir = tempfile::tempdir().unwrap();
    for (name, g) in families(1) {
        for (ext, format) in [("mtx", GraphFormat::MatrixMarket), ("edges", GraphFormat::EdgeList)] {
            let path = dir.path().join(format!("{name}.{ext}"));
            let file = std::fs::File::create(&path).unwrap();
            let mut w = std::io::BufWriter::new(file);
            match format {
                GraphFormat::MatrixMarket => write_matrix_market(&g, &mut w).unwrap(),
                GraphFormat::EdgeList => write_edge_list(&g, &mut w).unwrap(),
            }
            drop(w);
            assert_eq!(GraphFormat::from_path(&path), format);
            let loaded = load_graph(&path, format).unwrap();
            assert!(loaded.warnings.is_empty(), "{name}.{ext}: {:?}", loaded.warnings);
            let back = loaded.graph;
            assert_eq!(back.n_vertices(), g.n_vertices(), "{name}.{ext}");
            assert_eq!(back.edges().collect::<Vec<_>>(), g.edges().collect::<Vec<_>>(), "{name}.{ext}");
        }
    }
}

#[test]
fn loader_reports_dropped_entries() {
    let text = "%%MatrixMarket matrix coordinate real general\n3 3 5\n1 2 1.5\n2 1 1.5\n2 2 4\n2 3 0\n3 1 2\n";
    let loaded = read_matrix_market(text.as_bytes(), Path::new("inline.mtx")).unwrap();
    assert_eq!(loaded.graph.n_edges(), 2);
    assert_eq!(loaded.graph.weight(0, 1), 1.5);
    assert_eq!(loaded.graph.weight(2, 0), 2.0);
    // diagonal, zero weight, and (3, 1) listed without (1, 3) in a general file
    let w = &loaded.warnings;
    assert_eq!(w.len(), 3, "{w:?}");
    assert!(w.contains(&LoadWarning::DiagonalDropped { count: 1 }), "{w:?}");
    assert!(w.contains(&LoadWarning::ZeroWeightDropped { count: 1 }), "{w:?}");
    assert!(w.contains(&LoadWarning::Asymmetric { pairs: 1 }), "{w:?}");
}

#[test]
fn loader_rejects_bad_input() {
    let cases = [
        "%%MatrixMarket matrix coordinate real symmetric\n2 2 1\n1 3 1\n",
        "%%MatrixMarket matrix coordinate real symmetric\n2 2 1\n1 2 -1\n",
        "%%MatrixMarket matrix coordinate real symmetric\n2 3 1\n1 2 1\n",
        "%%MatrixMarket matrix coordinate real symmetric\n2 2 2\n1 2 1\n",
        "%%MatrixMarket matrix array real general\n2 2\n0\n1\n1\n0\n",
    ];
    for text in cases {
        assert!(read_matrix_market(text.as_bytes(), Path::new("bad.mtx")).is_err(), "{text:?}");
    }
    assert!(read_edge_list("0 1 abc\n".as_bytes(), Path::new("bad.edges")).is_err());
    assert!(load_graph(Path::new("/nonexistent/graph.mtx"), GraphFormat::MatrixMarket).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn quadratic_form_is_edge_sum(
        edges in prop::collection::vec((0usize..30, 0usize..30, 0.1f64..5.0), 1..80),
        x in prop::collection::vec(-3.0f64..3.0, 30),
    ) {
        let edges: Vec<_> = edges.into_iter().filter(|(i, j, _)| i != j).collect();
        prop_assume!(!edges.is_empty());
        let g = Graph::from_edges(30, edges).unwrap();
        let lap = laplacian(&g, LaplacianKind::Combinatorial).unwrap();
        let direct: f64 = g.edges().map(|(i, j, w)| w * (x[i] - x[j]).powi(2)).sum();
        let q = lap.quadratic_form(&x);
        prop_assert!(q >= -1e-12);
        prop_assert!((q - direct).abs() <= 1e-9 * (1.0 + direct));
    }

    #[test]
    fn knn_graph_is_symmetric_with_min_degree_k(seed in 0u64..500, k in 1usize..8) {
        let cloud = uniform_cloud(60, 2, seed).unwrap();
        let g = build_knn_graph(&cloud, k, Kernel::Binary, None).unwrap();
        g.validate().unwrap();
        prop_assert!(g.degrees().iter().all(|&d| d >= k as f64));
    }
}
