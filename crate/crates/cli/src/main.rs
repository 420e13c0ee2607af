use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use graphdr::io::{load_csv, read_graph, read_layout, write_atomic, write_graph, write_layout, write_svg, Coloring, LabelColumn};
use graphdr::pipeline::{
    assess, embed, relate, run_pipeline, EmbedConfig, InitKind, Method, PathCostConfig, PipelineConfig,
    QualityConfig, QualityMetric, Recipe, RelateConfig, Transform,
};
use graphdr::{DataMatrix, Error, ErrorKind, Metric};
use serde::de::DeserializeOwned;

/// Relationship graphs, layouts and quality metrics for high-dimensional data.
#[derive(Parser)]
#[command(name = "graphdr", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a relationship graph from a CSV file.
    Relate(RelateArgs),
    /// Lay out a relationship graph.
    Embed(EmbedArgs),
    /// Score a layout.
    Quality(QualityArgs),
    /// Draw a layout as SVG.
    Render(RenderArgs),
    /// Run relate, embed and quality from a TOML config.
    Pipeline(PipelineArgs),
}

#[derive(Args)]
struct DataArgs {
    /// Input CSV.
    #[arg(long)]
    input: PathBuf,
    /// The CSV has no header row.
    #[arg(long)]
    no_header: bool,
    /// Name or zero-based index of an integer label column.
    #[arg(long)]
    label_column: Option<String>,
}

impl DataArgs {
    fn load(&self) -> graphdr::Result<DataMatrix> {
        let label = self.label_column.as_ref().map(|s| s.parse::<LabelColumn>().unwrap());
        load_csv(&self.input, !self.no_header, label.as_ref())
    }
}

/// Parses a value by its config-file name.
fn named<T: DeserializeOwned>(s: &str) -> Result<T, String> {
    serde_json::from_value(serde_json::Value::String(s.to_string())).map_err(|e| e.to_string())
}

#[derive(Args)]
struct RelateArgs {
    #[command(flatten)]
    data: DataArgs,
    /// complete, knn, snn, tsne or umap.
    #[arg(long, value_parser = named::<Recipe>)]
    recipe: Recipe,
    /// euclidean or cosine.
    #[arg(long, default_value = "euclidean", value_parser = named::<Metric>)]
    metric: Metric,
    /// Neighbors per item for knn and snn.
    #[arg(long, default_value_t = 10)]
    k: usize,
    #[arg(long, default_value_t = 10.0)]
    perplexity: f64,
    /// UMAP neighborhood size, counting the item itself.
    #[arg(long, default_value_t = 10)]
    n_neighbors: usize,
    /// t-SNE probabilities below this are dropped.
    #[arg(long, default_value = "1e-8")]
    prune_epsilon: f64,
    /// similarity_flip, geodesic, mst_backbone or strengthen_backbone; repeatable, applied in order.
    #[arg(long = "transform", value_parser = named::<Transform>)]
    transforms: Vec<Transform>,
    /// Factor used by strengthen_backbone.
    #[arg(long, default_value_t = 2.0)]
    backbone_factor: f64,
    /// Output edge list.
    #[arg(long, short)]
    out: PathBuf,
}

#[derive(Args)]
struct EmbedArgs {
    /// Edge-list graph.
    #[arg(long)]
    graph: PathBuf,
    /// none, pca, mds, sammon, sne, tsne, spring or negative_sampling.
    #[arg(long, value_parser = named::<Method>)]
    method: Method,
    /// Data CSV, required by none, pca and --init pca.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    no_header: bool,
    #[arg(long)]
    label_column: Option<String>,
    #[arg(long, default_value_t = 2)]
    dim: usize,
    /// random or pca.
    #[arg(long, default_value = "random", value_parser = named::<InitKind>)]
    init: InitKind,
    /// [default: tsne/sne 1000, sammon 500, spring 50, negative_sampling 500]
    #[arg(long)]
    iterations: Option<usize>,
    /// [default: tsne/sne 200, others 1]
    #[arg(long)]
    learning_rate: Option<f64>,
    /// Early exaggeration for tsne/sne [default: 12]
    #[arg(long)]
    exaggeration_factor: Option<f64>,
    /// Iterations with exaggeration for tsne/sne [default: 250]
    #[arg(long)]
    exaggeration_iterations: Option<usize>,
    /// Negatives per positive sample [default: 5]
    #[arg(long)]
    negative_samples: Option<usize>,
    /// Barnes-Hut opening angle in (0, 1]; exact repulsion if omitted.
    #[arg(long)]
    theta: Option<f64>,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Output layout CSV.
    #[arg(long, short)]
    out: PathBuf,
}

#[derive(Args)]
struct QualityArgs {
    /// Layout CSV.
    #[arg(long)]
    layout: PathBuf,
    /// Relationship graph, for faithfulness and centralities.
    #[arg(long)]
    graph: Option<PathBuf>,
    /// Data CSV, for stress and neighborhood metrics.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    no_header: bool,
    #[arg(long)]
    label_column: Option<String>,
    /// faithfulness, stress, neighborhood_preservation, trustworthiness, neighbor_hit, closeness or betweenness; repeatable.
    #[arg(long = "measure", required = true, value_parser = named::<QualityMetric>)]
    metrics: Vec<QualityMetric>,
    /// Distance used for stress.
    #[arg(long, default_value = "euclidean", value_parser = named::<Metric>)]
    metric: Metric,
    /// Shape-graph and neighborhood size.
    #[arg(long, default_value_t = 10)]
    k: usize,
    /// hops, weight or one_minus_weight.
    #[arg(long, default_value = "hops", value_parser = named::<PathCostConfig>)]
    path_cost: PathCostConfig,
    /// Output JSON; printed to stdout if omitted.
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RenderArgs {
    #[arg(long)]
    layout: PathBuf,
    /// Data CSV holding labels to color by.
    #[arg(long, requires = "label_column")]
    input: Option<PathBuf>,
    #[arg(long)]
    no_header: bool,
    #[arg(long)]
    label_column: Option<String>,
    /// Report JSON holding per-node scores to color by.
    #[arg(long, requires = "score", conflicts_with = "input")]
    report: Option<PathBuf>,
    /// Name of the per-node score in the report, e.g. closeness.
    #[arg(long)]
    score: Option<String>,
    #[arg(long, short)]
    out: PathBuf,
}

#[derive(Args)]
struct PipelineArgs {
    /// TOML config.
    config: PathBuf,
    /// Force single-threaded, bit-reproducible execution.
    #[arg(long)]
    sequential: bool,
}

fn optional_data(input: &Option<PathBuf>, no_header: bool, label_column: &Option<String>) -> graphdr::Result<Option<DataMatrix>> {
    input
        .as_ref()
        .map(|p| {
            DataArgs {
                input: p.clone(),
                no_header,
                label_column: label_column.clone(),
            }
            .load()
        })
        .transpose()
}

fn run(cli: Cli) -> graphdr::Result<()> {
    match cli.command {
        Command::Relate(a) => {
            let data = a.data.load()?;
            let config = RelateConfig {
                recipe: a.recipe,
                k: a.k,
                perplexity: a.perplexity,
                n_neighbors: a.n_neighbors,
                prune_epsilon: a.prune_epsilon,
                transforms: a.transforms,
                backbone_factor: a.backbone_factor,
            };
            let g = relate(&data, &config, a.metric)?;
            log::info!("{} vertices, {} edges", g.n_vertices(), g.n_edges());
            write_graph(&g, &a.out)
        }
        Command::Embed(a) => {
            let g = read_graph(&a.graph)?;
            let data = optional_data(&a.input, a.no_header, &a.label_column)?;
            let mut config = EmbedConfig::new(a.method);
            config.dim = a.dim;
            config.init = a.init;
            config.iterations = a.iterations;
            config.learning_rate = a.learning_rate;
            config.exaggeration_factor = a.exaggeration_factor;
            config.exaggeration_iterations = a.exaggeration_iterations;
            config.negative_samples = a.negative_samples;
            config.theta = a.theta;
            config.resolve();
            if let Some(p) = config.params(a.seed) {
                p.validate().map_err(|e| Error::Config(e.to_string()))?;
            }
            let layout = embed(data.as_ref(), &g, &config, a.seed)?;
            write_layout(&layout, &a.out)
        }
        Command::Quality(a) => {
            let layout = read_layout(&a.layout, None)?;
            let data = optional_data(&a.input, a.no_header, &a.label_column)?;
            let graph = a.graph.as_ref().map(|p| read_graph(p)).transpose()?;
            let needs_graph = a.metrics.iter().any(|m| {
                matches!(m, QualityMetric::Faithfulness | QualityMetric::Closeness | QualityMetric::Betweenness)
            });
            let graph = match graph {
                Some(g) => g,
                None if needs_graph => return Err(Error::Config("--graph is required for faithfulness and centralities".into())),
                // placeholder for metrics that never look at the graph
                None => graphdr::RelationGraph::new(layout.n_points(), graphdr::Semantics::Similarity, std::iter::empty())?,
            };
            let config = QualityConfig {
                metrics: a.metrics,
                k: a.k,
                path_cost: a.path_cost,
            };
            let report = assess(data.as_ref(), &graph, &layout, &config, a.metric)?;
            let json = serde_json::json!({ "metrics": report.scalars, "per_node": report.per_node });
            let text = serde_json::to_string_pretty(&json).expect("report serializes") + "\n";
            match &a.out {
                Some(p) => write_atomic(p, text.as_bytes()),
                None => {
                    print!("{text}");
                    Ok(())
                }
            }
        }
        Command::Render(a) => {
            let layout = read_layout(&a.layout, None)?;
            let data = optional_data(&a.input, a.no_header, &a.label_column)?;
            let scores = match (&a.report, &a.score) {
                (Some(p), Some(name)) => {
                    let text = std::fs::read_to_string(p).map_err(|e| Error::Config(format!("{}: {e}", p.display())))?;
                    let v: serde_json::Value =
                        serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", p.display())))?;
                    let scores: Vec<f64> = serde_json::from_value(v["per_node"][name].clone())
                        .map_err(|_| Error::Config(format!("report has no per-node score '{name}'")))?;
                    Some(scores)
                }
                _ => None,
            };
            let coloring = match (&data, &scores) {
                (Some(d), _) => Coloring::Labels(d.labels().ok_or_else(|| Error::Config("no labels loaded".into()))?),
                (None, Some(s)) => Coloring::Scores(s),
                (None, None) => Coloring::Uniform,
            };
            write_svg(&layout, coloring, &a.out)
        }
        Command::Pipeline(a) => {
            let mut config = PipelineConfig::load(&a.config)?;
            config.sequential |= a.sequential;
            let out = run_pipeline(config)?;
            for (name, value) in &out.report.metrics {
                println!("{name}\t{value}");
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e.kind() {
                ErrorKind::Config => 2,
                ErrorKind::Data => 3,
                ErrorKind::Numeric => 4,
            })
        }
    }
}
