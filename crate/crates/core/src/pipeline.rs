//! Declarative relate → embed → quality runs driven by a TOML file.
//!
//! ```toml
//! input = "data/digits.csv"
//! label_column = "class"
//!
//! [relate]
//! recipe = "tsne"
//! perplexity = 10.0
//!
//! [embed]
//! method = "tsne"
//!
//! [quality]
//! metrics = ["faithfulness", "neighbor_hit"]
//!
//! [output]
//! report = "out/report.json"
//! ```
//!
//! Unset optional values are filled in by [`PipelineConfig::resolve`] and
//! the resolved config is echoed into the report.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::embed::{
    classical_mds, negative_sampling_embed, pca_init, sammon_embed, sne_embed, spring_layout, tsne_embed,
    EmbedParams, Exaggeration, Init, Repulsion,
};
use crate::error::{Error, Result};
use crate::graphalg::{CentralityKind, PathCost};
use crate::io::{load_csv, write_atomic, write_graph, write_layout, write_svg, Coloring, LabelColumn};
use crate::quality::{
    centrality_overlay, faithfulness, neighbor_hit, neighborhood_preservation, shape_graph, stress, trustworthiness,
};
use crate::relate::{
    backbone_strengthen, geodesic_complete_graph, knn_graph, mst_backbone, pairwise_distance_graph,
    similarity_flip, snn_reweight, tsne_probability_graph, umap_fuzzy_graph, DEFAULT_PRUNE_EPSILON,
};
use crate::types::{
    distance_matrix, matrix_from_graph, DataMatrix, Layout, Metric, QualityReport, RelationGraph, Semantics,
};

pub const DEFAULT_SEED: u64 = 42;

fn default_seed() -> u64 {
    DEFAULT_SEED
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    pub input: PathBuf,
    #[serde(default = "default_true")]
    pub has_header: bool,
    /// Header name or zero-based index of an integer label column.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label_column: Option<String>,
    #[serde(default)]
    pub metric: Metric,
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Run on a single thread.
    #[serde(default)]
    pub sequential: bool,
    pub relate: RelateConfig,
    pub embed: EmbedConfig,
    #[serde(default)]
    pub quality: QualityConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Recipe {
    /// Complete graph of pairwise distances.
    Complete,
    Knn,
    Snn,
    Tsne,
    Umap,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Transform {
    SimilarityFlip,
    Geodesic,
    /// Replace the graph by its minimum spanning tree.
    MstBackbone,
    /// Strengthen minimum-spanning-tree edges by `backbone_factor`.
    StrengthenBackbone,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RelateConfig {
    pub recipe: Recipe,
    #[serde(default = "RelateConfig::default_k")]
    pub k: usize,
    #[serde(default = "RelateConfig::default_perplexity")]
    pub perplexity: f64,
    #[serde(default = "RelateConfig::default_k")]
    pub n_neighbors: usize,
    #[serde(default = "RelateConfig::default_prune")]
    pub prune_epsilon: f64,
    #[serde(default)]
    pub transforms: Vec<Transform>,
    #[serde(default = "RelateConfig::default_backbone")]
    pub backbone_factor: f64,
}

impl RelateConfig {
    fn default_k() -> usize {
        10
    }
    fn default_perplexity() -> f64 {
        10.0
    }
    fn default_prune() -> f64 {
        DEFAULT_PRUNE_EPSILON
    }
    fn default_backbone() -> f64 {
        2.0
    }

    pub fn new(recipe: Recipe) -> Self {
        Self {
            recipe,
            k: Self::default_k(),
            perplexity: Self::default_perplexity(),
            n_neighbors: Self::default_k(),
            prune_epsilon: Self::default_prune(),
            transforms: Vec::new(),
            backbone_factor: Self::default_backbone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// The input data are the layout (2 or 3 columns).
    None,
    Pca,
    Mds,
    Sammon,
    Sne,
    Tsne,
    Spring,
    NegativeSampling,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitKind {
    #[default]
    Random,
    Pca,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EmbedConfig {
    pub method: Method,
    #[serde(default = "EmbedConfig::default_dim")]
    pub dim: usize,
    #[serde(default)]
    pub init: InitKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub iterations: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub learning_rate: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exaggeration_factor: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exaggeration_iterations: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub negative_samples: Option<usize>,
    /// Barnes-Hut opening angle; exact repulsion when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
}

impl EmbedConfig {
    fn default_dim() -> usize {
        2
    }

    pub fn new(method: Method) -> Self {
        Self {
            method,
            dim: 2,
            init: InitKind::Random,
            iterations: None,
            learning_rate: None,
            exaggeration_factor: None,
            exaggeration_iterations: None,
            negative_samples: None,
            theta: None,
        }
    }

    fn method_defaults(&self) -> Option<EmbedParams> {
        match self.method {
            Method::None | Method::Pca | Method::Mds => None,
            Method::Sammon => Some(EmbedParams::sammon()),
            Method::Sne | Method::Tsne => Some(EmbedParams::tsne()),
            Method::Spring => Some(EmbedParams::spring()),
            Method::NegativeSampling => Some(EmbedParams::negative_sampling()),
        }
    }

    pub fn resolve(&mut self) {
        if let Some(d) = self.method_defaults() {
            self.iterations.get_or_insert(d.iterations);
            self.learning_rate.get_or_insert(d.learning_rate);
            if matches!(self.method, Method::Sne | Method::Tsne) {
                self.exaggeration_factor.get_or_insert(d.early_exaggeration.factor);
                self.exaggeration_iterations.get_or_insert(d.early_exaggeration.duration);
            }
            if self.method == Method::NegativeSampling {
                self.negative_samples.get_or_insert(d.negative_samples);
            }
        }
    }

    /// Parameters for an iterative method; `init` is set by the caller.
    pub fn params(&self, seed: u64) -> Option<EmbedParams> {
        let mut p = self.method_defaults()?;
        p.dim = self.dim;
        p.seed = seed;
        if let Some(v) = self.iterations {
            p.iterations = v;
        }
        if let Some(v) = self.learning_rate {
            p.learning_rate = v;
        }
        p.early_exaggeration = Exaggeration {
            factor: self.exaggeration_factor.unwrap_or(p.early_exaggeration.factor),
            duration: self.exaggeration_iterations.unwrap_or(p.early_exaggeration.duration),
        };
        if let Some(v) = self.negative_samples {
            p.negative_samples = v;
        }
        if let Some(theta) = self.theta {
            p.repulsion = Repulsion::BarnesHut { theta };
        }
        Some(p)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QualityMetric {
    /// Jaccard index between the relationship graph and the layout's shape graph.
    Faithfulness,
    Stress,
    NeighborhoodPreservation,
    Trustworthiness,
    NeighborHit,
    Closeness,
    Betweenness,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PathCostConfig {
    #[default]
    Hops,
    Weight,
    OneMinusWeight,
}

impl From<PathCostConfig> for PathCost {
    fn from(c: PathCostConfig) -> Self {
        match c {
            PathCostConfig::Hops => PathCost::Hops,
            PathCostConfig::Weight => PathCost::Weight,
            PathCostConfig::OneMinusWeight => PathCost::OneMinusWeight,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QualityConfig {
    #[serde(default)]
    pub metrics: Vec<QualityMetric>,
    /// Neighborhood size for the shape graph and neighborhood metrics.
    #[serde(default = "QualityConfig::default_k")]
    pub k: usize,
    #[serde(default)]
    pub path_cost: PathCostConfig,
}

impl QualityConfig {
    fn default_k() -> usize {
        10
    }
}

impl Default for QualityConfig {
    fn default() -> Self {
        Self {
            metrics: Vec::new(),
            k: Self::default_k(),
            path_cost: PathCostConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SvgColor {
    #[default]
    Labels,
    Closeness,
    Betweenness,
    None,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub graph: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub layout: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub svg: Option<PathBuf>,
    #[serde(default)]
    pub color: SvgColor,
}

impl PipelineConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    /// Fills method-dependent defaults and checks cross-field constraints.
    pub fn resolve(mut self) -> Result<Self> {
        self.embed.resolve();
        if !(self.embed.dim == 2 || self.embed.dim == 3) {
            return Err(Error::Config("embed.dim must be 2 or 3".into()));
        }
        if let Some(p) = self.embed.params(self.seed) {
            p.validate().map_err(|e| Error::Config(e.to_string()))?;
        }
        let needs_colors = self.output.svg.is_some();
        let c = self.output.color;
        if needs_colors && c == SvgColor::Labels && self.label_column.is_none() {
            self.output.color = SvgColor::None;
        }
        Ok(self)
    }
}

/// Contents of the report JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub config: PipelineConfig,
    pub metrics: BTreeMap<String, f64>,
    pub per_node: BTreeMap<String, Vec<f64>>,
    pub timings_ms: BTreeMap<String, f64>,
}

impl Report {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

#[derive(Debug, Clone)]
pub struct PipelineOutput {
    pub data: DataMatrix,
    pub graph: RelationGraph,
    pub layout: Layout,
    pub report: Report,
}

/// Builds the relationship graph of `config` from `data`.
pub fn relate(data: &DataMatrix, config: &RelateConfig, metric: Metric) -> Result<RelationGraph> {
    let mut g = match config.recipe {
        Recipe::Complete => pairwise_distance_graph(data, metric)?,
        Recipe::Knn => knn_graph(data, config.k, metric)?,
        Recipe::Snn => snn_reweight(data, config.k, metric)?,
        Recipe::Tsne => tsne_probability_graph(data, config.perplexity, config.prune_epsilon, metric)?,
        Recipe::Umap => umap_fuzzy_graph(data, config.n_neighbors, metric)?,
    };
    for t in &config.transforms {
        g = match t {
            Transform::SimilarityFlip => similarity_flip(&g)?,
            Transform::Geodesic => geodesic_complete_graph(&g)?,
            Transform::MstBackbone => mst_backbone(&g)?,
            Transform::StrengthenBackbone => backbone_strengthen(&g, &mst_backbone(&g)?, config.backbone_factor)?,
        };
    }
    Ok(g)
}

fn require_semantics(g: &RelationGraph, ok: &[Semantics], method: &str) -> Result<()> {
    if !ok.contains(&g.semantics()) {
        return Err(Error::Config(format!(
            "{method} cannot use a {} graph",
            g.semantics()
        )));
    }
    Ok(())
}

fn need_data<'a>(data: Option<&'a DataMatrix>, what: &str) -> Result<&'a DataMatrix> {
    data.ok_or_else(|| Error::Config(format!("{what} needs the input data")))
}

/// Maps `g` to a layout. `data` is needed by `none`, `pca` and PCA
/// initialization.
pub fn embed(data: Option<&DataMatrix>, g: &RelationGraph, config: &EmbedConfig, seed: u64) -> Result<Layout> {
    let dim = config.dim;
    let affinity = [Semantics::Similarity, Semantics::Probability];
    let graph_init = || -> Result<Init> {
        Ok(match config.init {
            InitKind::Random => Init::Random,
            InitKind::Pca => Init::Pca(pca_init(need_data(data, "PCA initialization")?, dim)?),
        })
    };
    match config.method {
        Method::None => {
            let data = need_data(data, "method 'none'")?;
            if !(data.n_cols() == 2 || data.n_cols() == 3) {
                return Err(Error::invalid("method 'none' needs 2- or 3-column data"));
            }
            Layout::new(data.n_rows(), data.n_cols(), data.values().to_vec())
        }
        Method::Pca => pca_init(need_data(data, "method 'pca'")?, dim),
        Method::Mds => classical_mds(&dissimilarities(g)?, dim),
        Method::Sammon => {
            let d = dissimilarities(g)?;
            let init = match config.init {
                InitKind::Random => Init::Random,
                InitKind::Pca => Init::Pca(classical_mds(&d, dim)?),
            };
            sammon_embed(&d, &config.params(seed).unwrap().with_init(init))
        }
        Method::Sne | Method::Tsne => {
            require_semantics(g, &affinity, "SNE")?;
            let p = config.params(seed).unwrap().with_init(graph_init()?);
            if config.method == Method::Sne {
                sne_embed(g, &p)
            } else {
                tsne_embed(g, &p)
            }
        }
        Method::Spring => {
            require_semantics(g, &affinity, "spring layout")?;
            spring_layout(g, &config.params(seed).unwrap().with_init(graph_init()?))
        }
        Method::NegativeSampling => {
            require_semantics(g, &affinity, "negative sampling")?;
            negative_sampling_embed(g, &config.params(seed).unwrap().with_init(graph_init()?))
        }
    }
}

fn dissimilarities(g: &RelationGraph) -> Result<crate::types::DistanceMatrix> {
    if g.semantics() != Semantics::Dissimilarity || !g.is_complete() {
        return Err(Error::Config(
            "MDS and Sammon need a complete dissimilarity graph (recipe 'complete' or the geodesic transform)".into(),
        ));
    }
    matrix_from_graph(g)
}

/// Evaluates the requested metrics of a layout.
pub fn assess(
    data: Option<&DataMatrix>,
    g: &RelationGraph,
    layout: &Layout,
    config: &QualityConfig,
    metric: Metric,
) -> Result<QualityReport> {
    let mut report = QualityReport::new();
    let k = config.k;
    for m in &config.metrics {
        match m {
            QualityMetric::Faithfulness => {
                report.insert_scalar("faithfulness", faithfulness(g, &shape_graph(layout, k)?)?);
            }
            QualityMetric::Stress => {
                report.insert_scalar("stress", stress(layout, &distance_matrix(need_data(data, "stress")?, metric)?)?);
            }
            QualityMetric::NeighborhoodPreservation => {
                report.insert_scalar("neighborhood_preservation", neighborhood_preservation(need_data(data, "neighborhood preservation")?, layout, k)?);
            }
            QualityMetric::Trustworthiness => {
                report.insert_scalar("trustworthiness", trustworthiness(need_data(data, "trustworthiness")?, layout, k)?);
            }
            QualityMetric::NeighborHit => {
                report.insert_scalar("neighbor_hit", neighbor_hit(layout, need_data(data, "neighbor hit")?.labels(), k)?);
            }
            QualityMetric::Closeness => {
                centrality_overlay(g, CentralityKind::Closeness, config.path_cost.into(), &mut report)?;
            }
            QualityMetric::Betweenness => {
                centrality_overlay(g, CentralityKind::Betweenness, config.path_cost.into(), &mut report)?;
            }
        }
    }
    Ok(report)
}

fn timed<T>(timings: &mut BTreeMap<String, f64>, stage: &'static str, f: impl FnOnce() -> Result<T>) -> Result<T> {
    let start = Instant::now();
    let out = f().map_err(|e| e.in_stage(stage))?;
    timings.insert(stage.to_string(), start.elapsed().as_secs_f64() * 1e3);
    Ok(out)
}

/// Runs the configured stages and writes the requested artifacts.
pub fn run_pipeline(config: PipelineConfig) -> Result<PipelineOutput> {
    let config = config.resolve()?;
    if config.sequential {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .map_err(|e| Error::Config(format!("cannot build thread pool: {e}")))?;
        pool.install(|| run_stages(config))
    } else {
        run_stages(config)
    }
}

fn run_stages(config: PipelineConfig) -> Result<PipelineOutput> {
    let mut timings = BTreeMap::new();
    let label = config.label_column.as_ref().map(|s| s.parse::<LabelColumn>().unwrap());
    let data = timed(&mut timings, "load", || load_csv(&config.input, config.has_header, label.as_ref()))?;
    let graph = timed(&mut timings, "relate", || relate(&data, &config.relate, config.metric))?;
    let layout = timed(&mut timings, "embed", || embed(Some(&data), &graph, &config.embed, config.seed))?;
    let mut quality = timed(&mut timings, "quality", || {
        assess(Some(&data), &graph, &layout, &config.quality, config.metric)
    })?;
    timed(&mut timings, "output", || {
        let out = &config.output;
        if let Some(p) = &out.graph {
            write_graph(&graph, p)?;
        }
        if let Some(p) = &out.layout {
            write_layout(&layout, p)?;
        }
        if let Some(p) = &out.svg {
            let cost = config.quality.path_cost.into();
            let scores;
            let coloring = match out.color {
                SvgColor::None => Coloring::Uniform,
                SvgColor::Labels => Coloring::Labels(
                    data.labels()
                        .ok_or_else(|| Error::Config("svg colored by labels but no label column".into()))?,
                ),
                SvgColor::Closeness | SvgColor::Betweenness => {
                    let (kind, name) = if out.color == SvgColor::Closeness {
                        (CentralityKind::Closeness, "closeness")
                    } else {
                        (CentralityKind::Betweenness, "betweenness")
                    };
                    scores = match quality.per_node.get(name) {
                        Some(v) => v.clone(),
                        None => centrality_overlay(&graph, kind, cost, &mut quality)?,
                    };
                    Coloring::Scores(&scores)
                }
            };
            write_svg(&layout, coloring, p)?;
        }
        Ok(())
    })?;
    let report = Report {
        config,
        metrics: quality.scalars,
        per_node: quality.per_node,
        timings_ms: timings,
    };
    if let Some(p) = &report.config.output.report {
        write_atomic(p, report.to_json().as_bytes()).map_err(|e| e.in_stage("output"))?;
    }
    Ok(PipelineOutput {
        data,
        graph,
        layout,
        report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_names_are_config_errors() {
        let bad = "input = \"x.csv\"\n[relate]\nrecipe = \"louvain\"\n[embed]\nmethod = \"tsne\"\n";
        let e = PipelineConfig::from_toml(bad).unwrap_err();
        assert_eq!(e.kind(), crate::error::ErrorKind::Config);
        let extra = "input = \"x.csv\"\ncolour = 1\n[relate]\nrecipe = \"knn\"\n[embed]\nmethod = \"tsne\"\n";
        assert!(PipelineConfig::from_toml(extra).is_err());
    }

    #[test]
    fn resolve_fills_method_defaults() {
        let c = PipelineConfig::from_toml("input = \"x.csv\"\n[relate]\nrecipe = \"tsne\"\n[embed]\nmethod = \"tsne\"\n")
            .unwrap()
            .resolve()
            .unwrap();
        assert_eq!(c.seed, 42);
        assert_eq!(c.embed.iterations, Some(1000));
        assert_eq!(c.embed.exaggeration_factor, Some(12.0));
        assert_eq!(c.embed.negative_samples, None);
        assert_eq!(c.relate.prune_epsilon, 1e-8);
        let again = PipelineConfig::from_toml(&toml::to_string(&c).unwrap()).unwrap().resolve().unwrap();
        assert_eq!(again, c);
    }
}
