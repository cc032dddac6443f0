use anyhow::{Context, Result};
use serde::Serialize;
use specsketch::{
    build_knn_graph, cycle_graph, generate_sbm, generate_swissroll, laplacian, load_graph,
    path_graph, uniform_cloud, Graph, GraphFormat, Kernel, Laplacian, LaplacianKind, Partition,
    PointCloud, SbmParams,
};

use crate::args::{Family, FormatArg, GraphArgs, KernelArg, LaplacianArg};
use crate::UsageError;

/// A graph plus whatever its generator knows about it.
pub struct Source {
    pub graph: Graph,
    pub laplacian: Laplacian,
    pub labels: Option<Partition>,
    pub cloud: Option<PointCloud>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Serialize)]
pub struct GraphSummary {
    pub n: usize,
    pub edges: usize,
    pub components: usize,
    pub total_weight: f64,
    pub laplacian: LaplacianKind,
    pub lambda_max_bound: f64,
}

impl Source {
    pub fn summary(&self) -> GraphSummary {
        GraphSummary {
            n: self.graph.n_vertices(),
            edges: self.graph.n_edges(),
            components: self.graph.n_components(),
            total_weight: self.graph.total_weight(),
            laplacian: self.laplacian.kind(),
            lambda_max_bound: self.laplacian.lambda_max_bound(),
        }
    }
}

pub fn load(args: &GraphArgs, seed: u64) -> Result<Source> {
    let mut warnings = Vec::new();
    let (graph, labels, cloud) = match (&args.input, args.synth) {
        (Some(path), _) => {
            let format = match args.format {
                Some(FormatArg::Mtx) => GraphFormat::MatrixMarket,
                Some(FormatArg::Edges) => GraphFormat::EdgeList,
                None => GraphFormat::from_path(path),
            };
            let loaded = load_graph(path, format)
                .map_err(UsageError::from)
                .with_context(|| format!("reading graph {}", path.display()))?;
            for w in &loaded.warnings {
                log::warn!("{}: {w}", path.display());
                warnings.push(w.to_string());
            }
            (loaded.graph, None, None)
        }
        (None, Some(family)) => synthesize(args, family, args.graph_seed.unwrap_or(seed))?,
        (None, None) => return Err(UsageError::msg("either --input or --synth is required").into()),
    };
    let kind = match args.laplacian {
        LaplacianArg::Normalized => LaplacianKind::Normalized,
        LaplacianArg::Combinatorial => LaplacianKind::Combinatorial,
    };
    let lap = laplacian(&graph, kind).map_err(UsageError::from)?;
    if graph.n_components() > 1 {
        let msg = format!(
            "graph has {} connected components; eigenvalue 0 is repeated",
            graph.n_components()
        );
        log::warn!("{msg}");
        warnings.push(msg);
    }
    Ok(Source {
        graph,
        laplacian: lap,
        labels,
        cloud,
        warnings,
    })
}

fn synthesize(
    args: &GraphArgs,
    family: Family,
    seed: u64,
) -> Result<(Graph, Option<Partition>, Option<PointCloud>)> {
    let kernel = match args.kernel {
        KernelArg::Binary => Kernel::Binary,
        KernelArg::Gaussian => Kernel::Gaussian,
    };
    let knn = |cloud: PointCloud| -> Result<_> {
        let g = build_knn_graph(&cloud, args.knn, kernel, args.sigma).map_err(UsageError::from)?;
        Ok((g, None, Some(cloud)))
    };
    match family {
        Family::Sbm => {
            let params = SbmParams {
                n: args.n,
                classes: args.classes,
                eps: args.eps,
                avg_degree: args.avg_degree,
                seed,
            };
            let (g, labels) = generate_sbm(&params).map_err(UsageError::from)?;
            let p = Partition::new(labels, args.classes).map_err(UsageError::from)?;
            Ok((g, Some(p), None))
        }
        Family::Sensor => knn(uniform_cloud(args.n, 2, seed).map_err(UsageError::from)?),
        Family::Swissroll => knn(
            generate_swissroll(args.n, args.roll_a, args.roll_b, seed).map_err(UsageError::from)?,
        ),
        Family::Cycle => Ok((checked_n(args.n, 3, cycle_graph)?, None, None)),
        Family::Path => Ok((checked_n(args.n, 2, path_graph)?, None, None)),
    }
}

fn checked_n(n: usize, min: usize, make: fn(usize) -> Graph) -> Result<Graph> {
    if n < min {
        return Err(UsageError::msg(format!("--n must be at least {min}")).into());
    }
    Ok(make(n))
}
