//! The experiment document: `graph`, `system`, `analysis` and `run` blocks.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use skewchain::{ChainMode, ChainParams, DirectedGraph, Error, Grid, StateBox, SwitchedSystem, VectorField};

pub fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub graph: GraphBlock,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub system: Option<SystemBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub analysis: Option<AnalysisBlock>,
    #[serde(default)]
    pub run: RunBlock,
}

/// Exactly one of `complete`, `cycle`, `vertices` + `edges`, or `file`.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphBlock {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub complete: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cycle: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertices: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edges: Option<Vec<[usize; 2]>>,
    /// JSON document or edge list, relative to the config file.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub file: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemBlock {
    #[serde(rename = "box")]
    pub bounds: Vec<[f64; 2]>,
    pub h: f64,
    #[serde(default = "default_substeps")]
    pub substeps: usize,
    /// One entry per vertex.
    pub fields: Vec<FieldSpec>,
    #[serde(default)]
    pub clamp: bool,
}

fn default_substeps() -> usize {
    10
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FieldSpec {
    /// Scalar expression in `x` (one-dimensional systems).
    Expression(String),
    /// One expression per component in `x1..xd`.
    Components(Vec<String>),
    Polynomial { polynomial: Vec<f64> },
    Linear { matrix: Vec<Vec<f64>>, offset: Vec<f64> },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisBlock {
    pub grid: Vec<usize>,
    pub eps: f64,
    #[serde(default = "one")]
    pub m: usize,
    #[serde(default = "free")]
    pub mode: ChainMode,
    #[serde(default = "one")]
    pub q: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub work_limit: Option<usize>,
    /// Intervals `[lo, hi]` (one-dimensional boxes) to report Hausdorff distances against.
    #[serde(default)]
    pub reference_intervals: Vec<[f64; 2]>,
}

fn one() -> usize {
    1
}

fn free() -> ChainMode {
    ChainMode::Free
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunBlock {
    /// Subcommand to run when none is given on the command line.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub command: Option<String>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub simulate: Option<SimulateBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metric: Option<MetricBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stitch: Option<StitchBlock>,
}

impl Default for RunBlock {
    fn default() -> Self {
        Self {
            command: None,
            seed: 0,
            tolerance: default_tolerance(),
            out: None,
            simulate: None,
            metric: None,
            stitch: None,
        }
    }
}

fn default_tolerance() -> f64 {
    1e-10
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateBlock {
    #[serde(default)]
    pub x0: Vec<f64>,
    #[serde(default)]
    pub signal: String,
    #[serde(default)]
    pub t_end: f64,
    #[serde(default = "default_sample_dt")]
    pub sample_dt: f64,
}

impl Default for SimulateBlock {
    fn default() -> Self {
        Self {
            x0: Vec::new(),
            signal: String::new(),
            t_end: 0.0,
            sample_dt: default_sample_dt(),
        }
    }
}

fn default_sample_dt() -> f64 {
    0.1
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum MetricKind {
    /// Between two symbolic sequences.
    Omega,
    /// Between two switching signals.
    Delta,
    /// Between two (state, signal) pairs.
    Product,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricBlock {
    pub kind: MetricKind,
    pub a: String,
    pub b: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub xa: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub xb: Option<Vec<f64>>,
    /// Also compare the sequence metric with the metric of the embedded signals.
    #[serde(default)]
    pub isometry: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StitchBlock {
    #[serde(default = "default_links")]
    pub links: usize,
    #[serde(default = "default_window")]
    pub window: usize,
    /// Largest link duration, in cells.
    #[serde(default = "default_max_cells")]
    pub max_cells: usize,
    /// Step size; falls back to `system.h`, then 0.1.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h: Option<f64>,
}

impl Default for StitchBlock {
    fn default() -> Self {
        Self {
            links: default_links(),
            window: default_window(),
            max_cells: default_max_cells(),
            h: None,
        }
    }
}

fn default_links() -> usize {
    3
}

fn default_window() -> usize {
    5
}

fn default_max_cells() -> usize {
    6
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let mut cfg: Self = toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        // resolve graph files against the config's directory so outputs are self-describing
        if let Some(file) = &cfg.graph.file {
            if file.is_relative() {
                let base = path.parent().unwrap_or(Path::new("."));
                cfg.graph.file = Some(base.join(file));
            }
        }
        cfg.check()?;
        Ok(cfg)
    }

    fn check(&self) -> Result<()> {
        if !(self.run.tolerance > 0.0) {
            return Err(invalid("run.tolerance must be positive").into());
        }
        if let Some(s) = &self.system {
            if let Ok(g) = self.raw_graph() {
                if s.fields.len() != g.vertex_count() {
                    return Err(invalid(format!(
                        "system has {} fields but the graph has {} vertices",
                        s.fields.len(),
                        g.vertex_count()
                    ))
                    .into());
                }
            }
        }
        Ok(())
    }

    /// The graph as written, without the degree check.
    pub fn raw_graph(&self) -> Result<DirectedGraph> {
        let b = &self.graph;
        let sources = [b.complete.is_some(), b.cycle.is_some(), b.vertices.is_some(), b.file.is_some()];
        if sources.iter().filter(|&&s| s).count() != 1 {
            return Err(invalid("graph block needs exactly one of complete, cycle, vertices, file").into());
        }
        if b.edges.is_some() && b.vertices.is_none() {
            return Err(invalid("graph.edges requires graph.vertices").into());
        }
        let g = if let Some(n) = b.complete {
            DirectedGraph::complete(n)?
        } else if let Some(n) = b.cycle {
            DirectedGraph::cycle(n)?
        } else if let Some(n) = b.vertices {
            let edges: Vec<(usize, usize)> = b.edges.iter().flatten().map(|e| (e[0], e[1])).collect();
            DirectedGraph::new(n, &edges)?
        } else {
            let path = b.file.as_ref().expect("checked above");
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            DirectedGraph::parse(&text)?
        };
        Ok(match &b.labels {
            Some(labels) => g.with_labels(labels.clone())?,
            None => g,
        })
    }

    pub fn graph(&self) -> Result<DirectedGraph> {
        let g = self.raw_graph()?;
        g.ensure_valid()?;
        Ok(g)
    }

    pub fn system_block(&self) -> Result<&SystemBlock> {
        self.system.as_ref().ok_or_else(|| invalid("missing [system] block").into())
    }

    pub fn system(&self, g: &DirectedGraph) -> Result<SwitchedSystem> {
        let s = self.system_block()?;
        let bounds: Vec<(f64, f64)> = s.bounds.iter().map(|b| (b[0], b[1])).collect();
        let bounds = StateBox::new(&bounds)?;
        let d = bounds.dimension();
        let fields = s
            .fields
            .iter()
            .enumerate()
            .map(|(i, spec)| {
                let field = match spec {
                    FieldSpec::Expression(e) if d == 1 => VectorField::expressions(&[e]),
                    FieldSpec::Expression(_) => {
                        return Err(invalid(format!("field {i}: give {d} component expressions")))
                    }
                    FieldSpec::Components(c) => VectorField::expressions(c),
                    FieldSpec::Polynomial { polynomial } => VectorField::polynomial(polynomial.clone()),
                    FieldSpec::Linear { matrix, offset } => VectorField::linear(matrix.clone(), offset.clone()),
                };
                field.map_err(|e| invalid(format!("field {i}: {e}")))
            })
            .collect::<std::result::Result<Vec<_>, _>>()?;
        Ok(SwitchedSystem::new(g, bounds, s.h, s.substeps, fields)?.with_clamp(s.clamp))
    }

    pub fn analysis_block(&self) -> Result<&AnalysisBlock> {
        self.analysis.as_ref().ok_or_else(|| invalid("missing [analysis] block").into())
    }

    pub fn grid(&self, sys: &SwitchedSystem) -> Result<Grid> {
        Ok(Grid::new(sys.bounds().clone(), &self.analysis_block()?.grid)?)
    }

    pub fn chain_params(&self) -> Result<ChainParams> {
        let a = self.analysis_block()?;
        let mut p = ChainParams::new(a.eps, a.m, a.mode).with_offsets(a.q);
        if let Some(limit) = a.work_limit {
            p = p.with_work_limit(limit);
        }
        Ok(p)
    }

    /// The resolved document as TOML, for provenance headers.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configs always serialize")
    }
}
