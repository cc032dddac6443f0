use std::time::Instant;

use anyhow::{Context, Result};
use faer::Mat;
use specsketch::eigencount::{DICHOTOMY_MAX_ITER, MIN_RELATIVE_CUTOFF};
use specsketch::io::{
    load_embedding, load_partition, write_embedding, write_partition, write_point_cloud,
};
use specsketch::{
    adjusted_rand, approximate_eigenspace, build_knn_graph, dense_eigendecomposition,
    dichotomy_search, fast_search, ideal_lowpass, kmeans, laplacian, load_graph, mean_energy,
    modularity, orthonormality_error, true_count, uniform_cloud, write_edge_list,
    write_matrix_market, CountProbe, Damping, EigenspaceApprox, EigenspaceOptions,
    ExactSpectrum, FilterMode, GraphFormat, Interpolation, KMeansOptions, Kernel, Laplacian,
    LaplacianKind, LambdaMode, OpCounter, Orthonormalization, Partition,
};

use crate::args::{
    BenchArgs, ClusterArgs, Command, DampingArg, EmbedArgs, EmbeddingSource, InterpolationArg,
    LambdaMethod, LambdakArgs, MetricsArgs, OracleArgs, OrthArg, Regime, SearchArgs,
    SearchMethod, SpectralArgs, SynthArgs,
};
use crate::report::{write_history, LambdaReport, OutDir, Report};
use crate::source::{self, Source};
use crate::UsageError;

/// Eigenvalues this close to zero (relative to lambda_max) count as zero.
const ZERO_EIGENVALUE_TOL: f64 = 1e-10;

pub fn run(cmd: &Command, seed: u64, config: serde_json::Value) -> Result<Report> {
    let report = Report::new(cmd.name(), config);
    match cmd {
        Command::Synth(a) => synth(a, seed, report),
        Command::Embed(a) => embed(a, seed, report),
        Command::Lambdak(a) => lambdak(a, seed, report),
        Command::Cluster(a) => cluster(a, seed, report),
        Command::Oracle(a) => oracle(a, seed, report),
        Command::Bench(a) => bench(a, seed, report),
        Command::Metrics(a) => metrics(a, report),
    }
}

fn interpolation(a: InterpolationArg) -> Interpolation {
    match a {
        InterpolationArg::PowerLaw => Interpolation::PowerLaw,
        InterpolationArg::Local => Interpolation::Local,
        InterpolationArg::Bracket => Interpolation::Bracket,
    }
}

fn damping(a: DampingArg) -> Damping {
    match a {
        DampingArg::Jackson => Damping::Jackson,
        DampingArg::None => Damping::None,
    }
}

fn lambda_mode(a: &SpectralArgs) -> Result<LambdaMode> {
    let search: &SearchArgs = &a.search;
    Ok(match (a.lambda_method, a.lambda) {
        (LambdaMethod::Fixed, Some(lambda)) => LambdaMode::Fixed { lambda },
        (LambdaMethod::Fixed, None) => {
            return Err(UsageError::msg("--lambda-method fixed needs --lambda").into())
        }
        (_, Some(_)) => {
            return Err(UsageError::msg("--lambda only applies with --lambda-method fixed").into())
        }
        (LambdaMethod::Fast, None) => LambdaMode::Fast {
            max_iter: search.max_iter,
            interpolation: interpolation(search.interpolation),
        },
        (LambdaMethod::Dichotomy, None) => LambdaMode::Dichotomy {
            eps: search.dichotomy_eps,
        },
        (LambdaMethod::Oracle, None) => LambdaMode::Oracle,
    })
}

fn eigen_options(a: &SpectralArgs, seed: u64) -> Result<EigenspaceOptions> {
    let mut o = EigenspaceOptions::new(a.k);
    o.d = a.d;
    o.order = a.order;
    o.damping = damping(a.damping);
    o.seed = seed;
    o.lambda = lambda_mode(a)?;
    o.exact_filter = a.exact_filter;
    o.orthonormalization = match a.orthonormalization {
        OrthArg::Svd => Orthonormalization::Svd,
        OrthArg::Qr => Orthonormalization::Qr,
    };
    Ok(o)
}

fn method_name(mode: LambdaMode) -> &'static str {
    match mode {
        LambdaMode::Fast { .. } => "fast",
        LambdaMode::Dichotomy { .. } => "dichotomy",
        LambdaMode::Oracle => "oracle",
        LambdaMode::Fixed { .. } => "fixed",
    }
}

fn timed<T>(report: &mut Report, stage: &'static str, f: impl FnOnce() -> Result<T>) -> Result<T> {
    let started = Instant::now();
    let out = f()?;
    report.timings.insert(stage, started.elapsed().as_secs_f64());
    Ok(out)
}

fn load_source(
    graph: &crate::args::GraphArgs,
    seed: u64,
    report: &mut Report,
) -> Result<Source> {
    let src = timed(report, "load", || source::load(graph, seed))?;
    report.graph = Some(src.summary());
    report.warnings.extend(src.warnings.iter().cloned());
    Ok(src)
}

fn oracle_spectrum(lap: &Laplacian, report: &mut Report) -> Result<ExactSpectrum> {
    timed(report, "oracle", || {
        dense_eigendecomposition(lap).context("dense eigendecomposition")
    })
}

/// Shared by `embed` and `cluster`.
fn sketch(
    a: &SpectralArgs,
    src: &Source,
    seed: u64,
    evaluate: bool,
    report: &mut Report,
) -> Result<(EigenspaceApprox, Option<ExactSpectrum>)> {
    let opts = eigen_options(a, seed)?;
    let needs_oracle = evaluate || opts.exact_filter || opts.lambda == LambdaMode::Oracle;
    let spectrum = if needs_oracle {
        Some(oracle_spectrum(&src.laplacian, report)?)
    } else {
        None
    };
    let approx = approximate_eigenspace(&src.laplacian, &opts, spectrum.as_ref())?;
    let dg = &approx.diagnostics;
    report.timings.insert("lambda", approx.timings.lambda);
    report.timings.insert("filter", approx.timings.filter);
    report
        .timings
        .insert("orthonormalization", approx.timings.orthonormalization);
    report.ops.insert("lambda", dg.lambda.ops);
    report.ops.insert("filter", dg.filter_ops);
    report.ops.insert("orthonormalization", dg.svd_ops);
    report.ops.insert("total", dg.total_ops);
    report.lambda = Some(LambdaReport {
        method: method_name(opts.lambda),
        value: approx.lambda_k_used,
        iterations: dg.lambda.iterations,
        converged: dg.lambda.converged,
        history: dg.lambda.history.clone(),
    });
    if !dg.lambda.converged {
        report
            .warnings
            .push(format!("lambda_k search did not converge in {} probes", dg.lambda.iterations));
    }
    report.metrics.insert(
        "orthonormality_error".into(),
        orthonormality_error(approx.basis.as_ref()),
    );
    if let Some(s) = &spectrum {
        let k = a.k;
        report.metrics.insert(
            "mean_energy".into(),
            mean_energy(approx.basis.as_ref(), s.leading(k))?,
        );
        report.metrics.insert("lambda_k_oracle".into(), s.lambda(k));
        if k < s.len() {
            report.metrics.insert("lambda_k1_oracle".into(), s.lambda(k + 1));
        }
        report.metrics.insert(
            "true_count_at_lambda".into(),
            true_count(s, approx.lambda_k_used) as f64,
        );
    }
    Ok((approx, spectrum))
}

fn synth(a: &SynthArgs, seed: u64, mut report: Report) -> Result<Report> {
    if a.graph.synth.is_none() {
        return Err(UsageError::msg("synth needs --synth").into());
    }
    let src = load_source(&a.graph, seed, &mut report)?;
    let mut out = OutDir::create(&a.out)?;
    if a.edge_list {
        out.write("graph.edges", |w| Ok(write_edge_list(&src.graph, w)?))?;
    } else {
        out.write("graph.mtx", |w| Ok(write_matrix_market(&src.graph, w)?))?;
    }
    if let Some(labels) = &src.labels {
        out.write("labels.csv", |w| Ok(write_partition(labels, w)?))?;
    }
    if let Some(cloud) = &src.cloud {
        out.write("points.csv", |w| Ok(write_point_cloud(cloud, w)?))?;
    }
    out.finish(report)
}

fn embed(a: &EmbedArgs, seed: u64, mut report: Report) -> Result<Report> {
    let src = load_source(&a.graph, seed, &mut report)?;
    let (approx, _) = sketch(&a.spectral, &src, seed, a.evaluate, &mut report)?;
    let mut out = OutDir::create(&a.out)?;
    out.write("embedding.csv", |w| Ok(write_embedding(approx.basis.as_ref(), w)?))?;
    if !a.spectral.exact_filter {
        let lmax = src.laplacian.lambda_max_bound();
        // the filter the pipeline applied; cutoffs at or above lambda_max skip filtering
        if approx.lambda_k_used < lmax {
            let filter = ideal_lowpass(
                approx.lambda_k_used.max(MIN_RELATIVE_CUTOFF * lmax),
                lmax,
                a.spectral.order,
                damping(a.spectral.damping),
            )?;
            out.write("filter_coefficients.csv", |w| {
                let mut csv = csv::Writer::from_writer(w);
                csv.write_record(["j", "coefficient"])?;
                for (j, c) in filter.coeffs().iter().enumerate() {
                    csv.write_record([j.to_string(), c.to_string()])?;
                }
                csv.flush()?;
                Ok(())
            })?;
        }
    }
    if let Some(l) = &report.lambda {
        if !l.history.is_empty() {
            let history = l.history.clone();
            out.write("lambda_history.csv", |w| write_history(&history, w))?;
        }
    }
    out.finish(report)
}

fn lambdak(a: &LambdakArgs, seed: u64, mut report: Report) -> Result<Report> {
    let src = load_source(&a.graph, seed, &mut report)?;
    let lap = &src.laplacian;
    let d = a.d.unwrap_or(a.k);
    let counter = OpCounter::new();
    let mode = FilterMode::Chebyshev {
        order: a.order,
        damping: Damping::Jackson,
    };
    let est = timed(&mut report, "lambda", || {
        let mut probe = CountProbe::new(lap, mode, d, seed, &counter)?.fresh_signals(a.fresh_signals);
        Ok(match a.method {
            SearchMethod::Fast => fast_search(
                &mut probe,
                a.k,
                a.search.max_iter,
                interpolation(a.search.interpolation),
            )?,
            SearchMethod::Dichotomy => {
                dichotomy_search(&mut probe, a.k, a.search.dichotomy_eps, DICHOTOMY_MAX_ITER)?
            }
        })
    })?;
    report.ops.insert("lambda", counter.snapshot());
    report.metrics.insert("count_est".into(), est.count_est);
    if !est.converged {
        report
            .warnings
            .push(format!("search stopped after {} probes without count k", est.iterations));
    }
    if a.evaluate {
        let s = oracle_spectrum(lap, &mut report)?;
        let count = true_count(&s, est.lambda_est);
        report.metrics.insert("lambda_k_oracle".into(), s.lambda(a.k));
        report.metrics.insert("true_count_at_lambda".into(), count as f64);
        report
            .metrics
            .insert("squared_count_deviation".into(), (count as f64 - a.k as f64).powi(2));
    }
    let mut out = OutDir::create(&a.out)?;
    out.write("lambda_history.csv", |w| write_history(&est.history, w))?;
    report.lambda = Some(LambdaReport {
        method: match a.method {
            SearchMethod::Fast => "fast",
            SearchMethod::Dichotomy => "dichotomy",
        },
        value: est.lambda_est,
        iterations: est.iterations,
        converged: est.converged,
        history: est.history,
    });
    out.finish(report)
}

fn cluster(a: &ClusterArgs, seed: u64, mut report: Report) -> Result<Report> {
    let src = load_source(&a.graph, seed, &mut report)?;
    let k = a.spectral.k;
    let embedding: Mat<f64> = match a.embedding {
        EmbeddingSource::Sketch => sketch(&a.spectral, &src, seed, false, &mut report)?.0.basis,
        EmbeddingSource::Oracle => {
            let s = oracle_spectrum(&src.laplacian, &mut report)?;
            if k > s.len() {
                return Err(UsageError::msg(format!("k = {k} exceeds N = {}", s.len())).into());
            }
            s.leading(k).to_owned()
        }
    };
    let opts = KMeansOptions {
        max_iter: a.kmeans_max_iter,
        restarts: a.restarts,
    };
    let result = timed(&mut report, "kmeans", || {
        Ok(kmeans(embedding.as_ref(), k, seed, opts)?)
    })?;
    let partition = result.partition;
    report.metrics.insert("wcss".into(), result.wcss);
    report.metrics.insert("kmeans_iterations".into(), result.iterations as f64);
    report
        .metrics
        .insert("empty_clusters".into(), partition.empty_clusters() as f64);
    if src.graph.n_edges() > 0 {
        report
            .metrics
            .insert("modularity".into(), modularity(&src.graph, &partition)?);
    }
    let truth = match (&a.labels, &src.labels) {
        (Some(path), _) => Some(load_partition(path).map_err(UsageError::from)?),
        (None, Some(labels)) => Some(labels.clone()),
        (None, None) => None,
    };
    if let Some(truth) = truth {
        report
            .metrics
            .insert("ari".into(), adjusted_rand(&partition, &truth).map_err(UsageError::from)?);
        report
            .metrics
            .insert("modularity_reference".into(), modularity(&src.graph, &truth)?);
    }
    let mut out = OutDir::create(&a.out)?;
    out.write("partition.csv", |w| Ok(write_partition(&partition, w)?))?;
    out.write("embedding.csv", |w| Ok(write_embedding(embedding.as_ref(), w)?))?;
    out.finish(report)
}

fn oracle(a: &OracleArgs, seed: u64, mut report: Report) -> Result<Report> {
    let src = load_source(&a.graph, seed, &mut report)?;
    let s = oracle_spectrum(&src.laplacian, &mut report)?;
    if let Some(k) = a.k {
        if k == 0 || k > s.len() {
            return Err(UsageError::msg(format!("need 1 <= k <= N = {}", s.len())).into());
        }
    }
    let top = s.lambda(s.len());
    let zero_tol = ZERO_EIGENVALUE_TOL * top.max(1.0);
    report.metrics.insert("lambda_max".into(), top);
    report.metrics.insert(
        "zero_eigenvalues".into(),
        s.eigenvalues().iter().filter(|v| v.abs() <= zero_tol).count() as f64,
    );
    let mut out = OutDir::create(&a.out)?;
    out.write("eigenvalues.csv", |w| {
        let mut csv = csv::Writer::from_writer(w);
        csv.write_record(["index", "eigenvalue"])?;
        for (i, v) in s.eigenvalues().iter().enumerate() {
            csv.write_record([(i + 1).to_string(), v.to_string()])?;
        }
        csv.flush()?;
        Ok(())
    })?;
    if let Some(k) = a.k {
        out.write("eigenvectors.csv", |w| Ok(write_embedding(s.leading(k), w)?))?;
    }
    out.finish(report)
}

fn bench_sizes(a: &BenchArgs) -> Result<Vec<(usize, usize)>> {
    let mut sizes = Vec::new();
    if a.regime == Regime::FixedN {
        for &k in &a.ks {
            sizes.push((a.n_max, k));
        }
    } else {
        if a.n_min < 2 || a.n_min > a.n_max || a.per_decade == 0 {
            return Err(
                UsageError::msg("need 2 <= --n-min <= --n-max and --per-decade >= 1").into(),
            );
        }
        let mut step = 0;
        loop {
            let n = (a.n_min as f64 * 10f64.powf(step as f64 / a.per_decade as f64)).round() as usize;
            if n > a.n_max {
                break;
            }
            let k = match a.regime {
                Regime::LogN => (n as f64).ln().round() as usize,
                _ => (n as f64).sqrt().round() as usize,
            };
            sizes.push((n, k.max(1)));
            step += 1;
        }
    }
    for &(n, k) in &sizes {
        if k == 0 || k >= n || a.knn >= n {
            return Err(UsageError::msg(format!("k = {k} and knn = {} must be below N = {n}", a.knn)).into());
        }
    }
    Ok(sizes)
}

fn bench(a: &BenchArgs, seed: u64, mut report: Report) -> Result<Report> {
    #[derive(serde::Serialize)]
    struct Row {
        regime: Regime,
        n: usize,
        k: usize,
        edges: usize,
        order: usize,
        lambda_iterations: usize,
        lambda_block_products: u64,
        lambda_matvecs: u64,
        filter_block_products: u64,
        filter_matvecs: u64,
        svd_cubic: u64,
        total_matvecs: u64,
        seconds: f64,
    }
    let sizes = bench_sizes(a)?;
    let mut rows = Vec::new();
    let started = Instant::now();
    for (n, k) in sizes {
        let cloud = uniform_cloud(n, a.dim, seed)?;
        let g = build_knn_graph(&cloud, a.knn, Kernel::Binary, None)?;
        let lap = laplacian(&g, LaplacianKind::Normalized)?;
        let mut opts = EigenspaceOptions::new(k);
        opts.order = a.order;
        opts.seed = seed;
        let t = Instant::now();
        let approx = approximate_eigenspace(&lap, &opts, None)?;
        let seconds = t.elapsed().as_secs_f64();
        let dg = &approx.diagnostics;
        log::info!("bench N = {n}, k = {k}: {seconds:.2} s");
        rows.push(Row {
            regime: a.regime,
            n,
            k,
            edges: g.n_edges(),
            order: a.order,
            lambda_iterations: dg.lambda.iterations,
            lambda_block_products: dg.lambda.ops.block_products,
            lambda_matvecs: dg.lambda.ops.matvecs,
            filter_block_products: dg.filter_ops.block_products,
            filter_matvecs: dg.filter_ops.matvecs,
            svd_cubic: dg.svd_ops.svd_cubic,
            total_matvecs: dg.total_ops.matvecs,
            seconds,
        });
    }
    report.timings.insert("total", started.elapsed().as_secs_f64());
    let mut out = OutDir::create(&a.out)?;
    out.write("bench.csv", |w| {
        let mut csv = csv::Writer::from_writer(w);
        for r in &rows {
            csv.serialize(r)?;
        }
        csv.flush()?;
        Ok(())
    })?;
    out.finish(report)
}

fn metrics(a: &MetricsArgs, mut report: Report) -> Result<Report> {
    let nothing = a.reference.is_none() && a.graph.is_none() && a.reference_embedding.is_none();
    if nothing {
        return Err(UsageError::msg(
            "nothing to compute: give --partition with --reference or --graph, or --embedding with --reference-embedding",
        )
        .into());
    }
    if let Some(path) = &a.partition {
        let p: Partition = load_partition(path).map_err(UsageError::from)?;
        if let Some(reference) = &a.reference {
            let r = load_partition(reference).map_err(UsageError::from)?;
            report
                .metrics
                .insert("ari".into(), adjusted_rand(&p, &r).map_err(UsageError::from)?);
        }
        if let Some(graph) = &a.graph {
            let loaded = load_graph(graph, GraphFormat::from_path(graph)).map_err(UsageError::from)?;
            report.metrics.insert(
                "modularity".into(),
                modularity(&loaded.graph, &p).map_err(UsageError::from)?,
            );
        }
    }
    if let (Some(b), Some(u)) = (&a.embedding, &a.reference_embedding) {
        let b = load_embedding(b).map_err(UsageError::from)?;
        let u = load_embedding(u).map_err(UsageError::from)?;
        report.metrics.insert(
            "mean_energy".into(),
            mean_energy(b.as_ref(), u.as_ref()).map_err(UsageError::from)?,
        );
        report
            .metrics
            .insert("orthonormality_error".into(), orthonormality_error(b.as_ref()));
    }
    let out = OutDir::create(&a.out)?;
    let report = out.finish(report)?;
    println!("{}", serde_json::to_string_pretty(&report.metrics)?);
    Ok(report)
}
