//! Experiment configuration files: the true system, excitation protocol,
//! fit orders and classification thresholds. TOML is the primary format;
//! JSON files with the same shape are accepted.

use serde::{Deserialize, Serialize};

use crate::estimate::{BlaProtocol, Excitation};
use crate::signals::{PhaseLaw, PowerSpectrum, SignalClass, SpectrumBand};
use crate::systems::{
    build_custom, build_ff_fb_parallel, build_lfr, build_parallel_ff, build_single_branch,
    build_symmetric_fffb, build_symmetric_fffb_two_nl, BlockGraph, Branch, BranchElement, Edge,
    Node, RationalTF, StaticNl, StructureInfo,
};
use crate::{Error, Result};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub seed: u64,
    pub system: SystemConfig,
    pub setpoints: SetpointsConfig,
    pub excitation: ExcitationConfig,
    pub fit: FitConfig,
    #[serde(default)]
    pub classify: ClassifyConfig,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SetpointsConfig {
    Range { from: f64, to: f64, step: f64 },
    List { list: Vec<f64> },
}

impl SetpointsConfig {
    pub fn values(&self) -> Vec<f64> {
        match self {
            SetpointsConfig::Range { from, to, step } => {
                let mut v = Vec::new();
                if *step > 0.0 {
                    let n = ((to - from) / step + 0.5).floor() as i64;
                    for k in 0..=n.max(0) {
                        v.push(from + k as f64 * step);
                    }
                }
                v
            }
            SetpointsConfig::List { list } => list.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExcitationKind {
    Multisine,
    Gaussian,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum WarmupConfig {
    Fixed(usize),
    Keyword(String),
}

impl Default for WarmupConfig {
    fn default() -> Self {
        WarmupConfig::Keyword("auto".into())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BinsConfig {
    Range { from: usize, to: usize },
    List { list: Vec<usize> },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExcitationConfig {
    pub kind: ExcitationKind,
    pub eps: f64,
    #[serde(default = "default_class")]
    pub class: SignalClass,
    /// Record length N (one multisine period).
    pub samples: usize,
    #[serde(default = "default_records")]
    pub records: usize,
    #[serde(default = "default_phase_law")]
    pub phase_law: PhaseLaw,
    #[serde(default)]
    pub noise_std: f64,
    #[serde(default)]
    pub warmup: WarmupConfig,
    /// Piecewise-constant density; flat unit density when omitted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spectrum: Option<SpectrumConfig>,
    /// Excited/analysis bins; every in-band bin when omitted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bins: Option<BinsConfig>,
}

fn default_class() -> SignalClass {
    SignalClass::StdBounded
}

fn default_records() -> usize {
    8
}

fn default_phase_law() -> PhaseLaw {
    PhaseLaw::Uniform
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectrumConfig {
    pub bands: Vec<SpectrumBand>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FitConfig {
    pub nb: usize,
    pub na: usize,
    #[serde(default)]
    pub delay: usize,
    #[serde(default)]
    pub order_scan: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClassifyConfig {
    #[serde(default = "default_tol_fixed")]
    pub tol_fixed: f64,
    #[serde(default = "default_tol_move")]
    pub tol_move: f64,
    #[serde(default = "default_oracle_tol_fixed")]
    pub oracle_tol_fixed: f64,
    #[serde(default = "default_oracle_tol_move")]
    pub oracle_tol_move: f64,
}

fn default_tol_fixed() -> f64 {
    crate::rootlocus::DEFAULT_TOL_FIXED
}

fn default_tol_move() -> f64 {
    crate::rootlocus::DEFAULT_TOL_MOVE
}

fn default_oracle_tol_fixed() -> f64 {
    crate::rootlocus::ORACLE_TOL_FIXED
}

fn default_oracle_tol_move() -> f64 {
    crate::rootlocus::ORACLE_TOL_MOVE
}

impl Default for ClassifyConfig {
    fn default() -> Self {
        ClassifyConfig {
            tol_fixed: default_tol_fixed(),
            tol_move: default_tol_move(),
            oracle_tol_fixed: default_oracle_tol_fixed(),
            oracle_tol_move: default_oracle_tol_move(),
        }
    }
}

// ---------------------------------------------------------------------------
// System description
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TopologyKind {
    SingleBranch,
    ParallelFf,
    FfFbParallel,
    Lfr,
    SymmetricFffb,
    Custom,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SystemConfig {
    pub topology: TopologyKind,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub ff: Vec<BranchConfig>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub fb: Vec<BranchConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lfr: Option<LfrConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub symmetric: Option<SymmetricConfig>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub nodes: Vec<NodeConfig>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub edges: Vec<EdgeConfig>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BranchConfig {
    pub elements: Vec<ElementConfig>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ElementConfig {
    Linear(TfConfig),
    Nl(NlConfig),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TfConfig {
    pub num: Vec<f64>,
    pub den: Vec<f64>,
    #[serde(default)]
    pub delay: usize,
}

impl TfConfig {
    pub fn build(&self) -> Result<RationalTF> {
        RationalTF::new(self.num.clone(), self.den.clone(), self.delay)
    }

    fn from_tf(tf: &RationalTF) -> TfConfig {
        TfConfig { num: tf.num.clone(), den: tf.den.clone(), delay: tf.delay }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NlConfig {
    Poly { poly: Vec<f64> },
    Piecewise { breakpoints: Vec<f64>, segments: Vec<Vec<f64>> },
}

impl NlConfig {
    pub fn build(&self) -> Result<StaticNl> {
        match self {
            NlConfig::Poly { poly } => StaticNl::polynomial(poly.clone()),
            NlConfig::Piecewise { breakpoints, segments } => {
                StaticNl::piecewise(breakpoints.clone(), segments.clone())
            }
        }
    }

    fn from_nl(nl: &StaticNl) -> NlConfig {
        match nl {
            StaticNl::Polynomial(c) => NlConfig::Poly { poly: c.clone() },
            StaticNl::Piecewise { breakpoints, segments } => NlConfig::Piecewise {
                breakpoints: breakpoints.clone(),
                segments: segments.clone(),
            },
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LfrConfig {
    pub g1: TfConfig,
    pub g2: TfConfig,
    pub g3: TfConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g4: Option<TfConfig>,
    pub f: NlConfig,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SymmetricConfig {
    pub g1: TfConfig,
    pub g2: TfConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f: Option<NlConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f1: Option<NlConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f2: Option<NlConfig>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NodeConfig {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub linear: Option<TfConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nl: Option<NlConfig>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EdgeConfig {
    pub from: String,
    pub to: String,
    #[serde(default = "default_sign")]
    pub sign: f64,
}

fn default_sign() -> f64 {
    1.0
}

fn branch_from_config(cfg: &BranchConfig) -> Result<Branch> {
    cfg.elements
        .iter()
        .map(|e| match e {
            ElementConfig::Linear(tf) => Ok(BranchElement::Linear(tf.build()?)),
            ElementConfig::Nl(nl) => Ok(BranchElement::Nonlinear(nl.build()?)),
        })
        .collect()
}

fn branch_to_config(graph: &BlockGraph, ids: &[usize]) -> BranchConfig {
    BranchConfig {
        elements: ids
            .iter()
            .map(|&id| match &graph.nodes()[id] {
                Node::Linear(g) => ElementConfig::Linear(TfConfig::from_tf(g)),
                Node::Nonlinear(f) => ElementConfig::Nl(NlConfig::from_nl(f)),
                _ => unreachable!("branch ids point at blocks"),
            })
            .collect(),
    }
}

impl SystemConfig {
    /// Build the block graph this description denotes.
    pub fn build(&self) -> Result<BlockGraph> {
        match self.topology {
            TopologyKind::SingleBranch => {
                let [branch] = self.ff.as_slice() else {
                    return Err(Error::Config(
                        "single_branch takes exactly one [[system.ff]] branch".into(),
                    ));
                };
                build_single_branch(branch_from_config(branch)?)
            }
            TopologyKind::ParallelFf => {
                let branches: Vec<Branch> =
                    self.ff.iter().map(branch_from_config).collect::<Result<_>>()?;
                build_parallel_ff(branches)
            }
            TopologyKind::FfFbParallel => {
                let ff: Vec<Branch> =
                    self.ff.iter().map(branch_from_config).collect::<Result<_>>()?;
                let fb: Vec<Branch> =
                    self.fb.iter().map(branch_from_config).collect::<Result<_>>()?;
                build_ff_fb_parallel(ff, fb)
            }
            TopologyKind::Lfr => {
                let lfr = self
                    .lfr
                    .as_ref()
                    .ok_or_else(|| Error::Config("lfr topology needs [system.lfr]".into()))?;
                let g4 = lfr.g4.as_ref().map(|g| g.build()).transpose()?;
                build_lfr(lfr.g1.build()?, lfr.g2.build()?, lfr.g3.build()?, g4, lfr.f.build()?)
            }
            TopologyKind::SymmetricFffb => {
                let sym = self.symmetric.as_ref().ok_or_else(|| {
                    Error::Config("symmetric_fffb topology needs [system.symmetric]".into())
                })?;
                match (&sym.f, &sym.f1, &sym.f2) {
                    (Some(f), None, None) => {
                        build_symmetric_fffb(sym.g1.build()?, sym.g2.build()?, f.build()?)
                    }
                    (None, Some(f1), Some(f2)) => build_symmetric_fffb_two_nl(
                        sym.g1.build()?,
                        sym.g2.build()?,
                        f1.build()?,
                        f2.build()?,
                    ),
                    _ => Err(Error::Config(
                        "symmetric_fffb needs either f (single nonlinearity) or f1+f2".into(),
                    )),
                }
            }
            TopologyKind::Custom => {
                let mut nodes = Vec::new();
                for nc in &self.nodes {
                    let node = match (&nc.kind, &nc.linear, &nc.nl) {
                        (Some(k), None, None) => match k.as_str() {
                            "input" => Node::Input,
                            "output" => Node::Output,
                            "sum" => Node::Sum,
                            other => {
                                return Err(Error::Config(format!(
                                    "unknown node kind '{other}' (input|output|sum)"
                                )))
                            }
                        },
                        (None, Some(tf), None) => Node::Linear(tf.build()?),
                        (None, None, Some(nl)) => Node::Nonlinear(nl.build()?),
                        _ => {
                            return Err(Error::Config(format!(
                                "node '{}' must set exactly one of kind/linear/nl",
                                nc.name
                            )))
                        }
                    };
                    nodes.push((nc.name.clone(), node));
                }
                let index_of = |name: &str| -> Result<usize> {
                    nodes
                        .iter()
                        .position(|(n, _)| n == name)
                        .ok_or_else(|| Error::Config(format!("edge references unknown node '{name}'")))
                };
                let mut edges = Vec::new();
                for ec in &self.edges {
                    if ec.sign != 1.0 && ec.sign != -1.0 {
                        return Err(Error::Config(format!(
                            "edge {} -> {}: sign must be 1 or -1",
                            ec.from, ec.to
                        )));
                    }
                    edges.push(Edge { from: index_of(&ec.from)?, to: index_of(&ec.to)?, sign: ec.sign });
                }
                build_custom(nodes, edges)
            }
        }
    }

    /// Describe a graph back into config form (inverse of [`Self::build`]).
    pub fn from_graph(graph: &BlockGraph) -> SystemConfig {
        let mut cfg = SystemConfig {
            topology: TopologyKind::Custom,
            ff: Vec::new(),
            fb: Vec::new(),
            lfr: None,
            symmetric: None,
            nodes: Vec::new(),
            edges: Vec::new(),
        };
        let tf_at = |id: usize| match &graph.nodes()[id] {
            Node::Linear(g) => TfConfig::from_tf(g),
            _ => unreachable!(),
        };
        let nl_at = |id: usize| match &graph.nodes()[id] {
            Node::Nonlinear(f) => NlConfig::from_nl(f),
            _ => unreachable!(),
        };
        match graph.structure() {
            StructureInfo::SingleBranch { elements } => {
                cfg.topology = TopologyKind::SingleBranch;
                cfg.ff.push(branch_to_config(graph, elements));
            }
            StructureInfo::ParallelFf { branches } => {
                cfg.topology = TopologyKind::ParallelFf;
                cfg.ff = branches.iter().map(|b| branch_to_config(graph, b)).collect();
            }
            StructureInfo::FfFbParallel { ff, fb } => {
                cfg.topology = TopologyKind::FfFbParallel;
                cfg.ff = ff.iter().map(|b| branch_to_config(graph, b)).collect();
                cfg.fb = fb.iter().map(|b| branch_to_config(graph, b)).collect();
            }
            StructureInfo::Lfr { g1, g2, g3, g4, f } => {
                cfg.topology = TopologyKind::Lfr;
                cfg.lfr = Some(LfrConfig {
                    g1: tf_at(*g1),
                    g2: tf_at(*g2),
                    g3: tf_at(*g3),
                    g4: g4.map(tf_at),
                    f: nl_at(*f),
                });
            }
            StructureInfo::SymmetricSingleNl { g1, g2, f } => {
                cfg.topology = TopologyKind::SymmetricFffb;
                cfg.symmetric = Some(SymmetricConfig {
                    g1: tf_at(*g1),
                    g2: tf_at(*g2),
                    f: Some(nl_at(*f)),
                    f1: None,
                    f2: None,
                });
            }
            StructureInfo::SymmetricTwoNl { g1, g2, f1, f2 } => {
                cfg.topology = TopologyKind::SymmetricFffb;
                cfg.symmetric = Some(SymmetricConfig {
                    g1: tf_at(*g1),
                    g2: tf_at(*g2),
                    f: None,
                    f1: Some(nl_at(*f1)),
                    f2: Some(nl_at(*f2)),
                });
            }
            StructureInfo::Custom => {
                for id in 0..graph.nodes().len() {
                    let name = graph.node_name(id).to_string();
                    let nc = match &graph.nodes()[id] {
                        Node::Input => NodeConfig { name, kind: Some("input".into()), linear: None, nl: None },
                        Node::Output => NodeConfig { name, kind: Some("output".into()), linear: None, nl: None },
                        Node::Sum => NodeConfig { name, kind: Some("sum".into()), linear: None, nl: None },
                        Node::Linear(g) => NodeConfig {
                            name,
                            kind: None,
                            linear: Some(TfConfig::from_tf(g)),
                            nl: None,
                        },
                        Node::Nonlinear(f) => NodeConfig {
                            name,
                            kind: None,
                            linear: None,
                            nl: Some(NlConfig::from_nl(f)),
                        },
                    };
                    cfg.nodes.push(nc);
                }
                cfg.edges = graph
                    .edges()
                    .iter()
                    .map(|e| EdgeConfig {
                        from: graph.node_name(e.from).to_string(),
                        to: graph.node_name(e.to).to_string(),
                        sign: e.sign,
                    })
                    .collect();
            }
        }
        cfg
    }
}

impl ExperimentConfig {
    /// Parse from TOML (default) or JSON (`.json` extension) text.
    pub fn parse(text: &str, json: bool) -> Result<Self> {
        let cfg: ExperimentConfig = if json {
            serde_json::from_str(text)
                .map_err(|e| Error::Config(format!("JSON parse error: {e}")))?
        } else {
            toml::from_str(text).map_err(|e| Error::Config(format!("TOML parse error: {e}")))?
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Load and validate a config file; format chosen by extension.
    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let json = path.extension().map(|e| e == "json").unwrap_or(false);
        Self::parse(&text, json)
    }

    pub fn setpoint_values(&self) -> Vec<f64> {
        self.setpoints.values()
    }

    pub fn spectrum(&self) -> Result<PowerSpectrum> {
        match &self.excitation.spectrum {
            Some(s) => PowerSpectrum::new(s.bands.clone()),
            None => Ok(PowerSpectrum::flat(1.0)),
        }
    }

    /// Analysis/excitation bins: explicit list, range, or every in-band bin.
    pub fn bins(&self) -> Result<Vec<usize>> {
        let n = self.excitation.samples;
        let spectrum = self.spectrum()?;
        let bins: Vec<usize> = match &self.excitation.bins {
            Some(BinsConfig::Range { from, to }) => (*from..=*to).collect(),
            Some(BinsConfig::List { list }) => list.clone(),
            None => (1..n / 2)
                .filter(|&k| spectrum.value_at(k as f64 / n as f64) > 0.0)
                .collect(),
        };
        if bins.is_empty() {
            return Err(Error::Config("no analysis bins selected".into()));
        }
        if bins.iter().any(|&k| k == 0 || k >= n / 2) {
            return Err(Error::Config(format!("bins must lie in 1..{}", n / 2)));
        }
        Ok(bins)
    }

    pub fn warmup(&self) -> Result<Option<usize>> {
        match &self.excitation.warmup {
            WarmupConfig::Fixed(n) => Ok(Some(*n)),
            WarmupConfig::Keyword(k) if k == "auto" => Ok(None),
            WarmupConfig::Keyword(k) => {
                Err(Error::Config(format!("warmup must be an integer or \"auto\", got '{k}'")))
            }
        }
    }

    /// Assemble the sweep protocol (after any CLI overrides are applied to
    /// the config itself).
    pub fn protocol(&self) -> Result<BlaProtocol> {
        let spectrum = self.spectrum()?;
        let bins = self.bins()?;
        let n = self.excitation.samples;
        let excitation = match self.excitation.kind {
            ExcitationKind::Multisine => Excitation::Multisine {
                n,
                bins,
                spectrum,
                phase_law: self.excitation.phase_law,
            },
            ExcitationKind::Gaussian => Excitation::Gaussian { n, spectrum, bins },
        };
        Ok(BlaProtocol {
            excitation,
            eps: self.excitation.eps,
            class: self.excitation.class,
            records: self.excitation.records,
            warmup: self.warmup()?,
            noise_std: self.excitation.noise_std,
            nb: self.fit.nb,
            na: self.fit.na,
            delay: self.fit.delay,
            seed: self.seed,
        })
    }

    pub fn graph(&self) -> Result<BlockGraph> {
        self.system.build()
    }

    pub fn validate(&self) -> Result<()> {
        let sp = self.setpoint_values();
        if sp.is_empty() {
            return Err(Error::Config("setpoint list is empty".into()));
        }
        if !(self.excitation.eps > 0.0) {
            return Err(Error::Config("excitation eps must be positive".into()));
        }
        if self.excitation.samples < 4 || self.excitation.samples % 2 != 0 {
            return Err(Error::Config("excitation samples must be even and >= 4".into()));
        }
        if self.excitation.records == 0 {
            return Err(Error::Config("excitation records must be >= 1".into()));
        }
        if self.excitation.noise_std < 0.0 {
            return Err(Error::Config("noise_std must be >= 0".into()));
        }
        if self.classify.tol_fixed >= self.classify.tol_move {
            return Err(Error::Config("classify.tol_fixed must be below tol_move".into()));
        }
        if self.classify.oracle_tol_fixed >= self.classify.oracle_tol_move {
            return Err(Error::Config("classify.oracle_tol_fixed must be below oracle_tol_move".into()));
        }
        self.bins()?;
        self.warmup()?;
        let graph = self.graph()?;
        let violations = graph.validate();
        if !violations.is_empty() {
            let msgs: Vec<String> = violations.iter().map(|v| v.to_string()).collect();
            return Err(Error::Config(format!("system graph invalid: {}", msgs.join("; "))));
        }
        Ok(())
    }

    /// Hash of the canonical (JSON) serialization, for report provenance.
    pub fn canonical_hash(&self) -> String {
        use sha2::{Digest, Sha256};
        let bytes = serde_json::to_vec(self).expect("config serializes");
        let mut hasher = Sha256::new();
        hasher.update(&bytes);
        let out = hasher.finalize();
        out.iter().map(|b| format!("{b:02x}")).collect()
    }
}
