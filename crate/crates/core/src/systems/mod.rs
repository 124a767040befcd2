//! Block-oriented nonlinear systems: graphs of linear blocks, static
//! nonlinearities and sum junctions, with DC operating-point solving and
//! per-sample difference-equation simulation.

pub mod nl;
pub mod tf;

pub use nl::{NlCase, StaticNl};
pub use tf::RationalTF;

use serde::Serialize;

use crate::signals::Signal;
use crate::{Error, Result};

/// Overflow guard: a trajectory exceeding this magnitude is declared unstable.
pub const OVERFLOW_GUARD: f64 = 1e9;

/// A node in a block graph.
#[derive(Debug, Clone)]
pub enum Node {
    Input,
    Output,
    Sum,
    Linear(RationalTF),
    Nonlinear(StaticNl),
}

/// A signed directed edge (sign −1 models subtraction at sum junctions).
#[derive(Debug, Clone, Copy)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub sign: f64,
}

/// Declared interconnection family of a graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Topology {
    SingleBranch,
    ParallelFf { n: usize },
    FfFbParallel { n_ff: usize, n_fb: usize },
    Lfr,
    SymmetricFffb,
    Custom,
}

/// Node-level layout recorded by the builders, consumed by the linearizer.
#[derive(Debug, Clone)]
pub enum StructureInfo {
    /// Node ids of the chain elements, input to output.
    SingleBranch { elements: Vec<usize> },
    /// Per-branch element node ids.
    ParallelFf { branches: Vec<Vec<usize>> },
    /// Feed-forward and feedback branch element node ids.
    FfFbParallel { ff: Vec<Vec<usize>>, fb: Vec<Vec<usize>> },
    /// The four linear slots (g4 optional) and the nonlinearity.
    Lfr { g1: usize, g2: usize, g3: usize, g4: Option<usize>, f: usize },
    /// Plain feed-forward g1, feedback g2, middle-branch nonlinearity.
    SymmetricSingleNl { g1: usize, g2: usize, f: usize },
    /// Nonlinear branches f1→g1 (feed-forward) and f2→g2 (feedback).
    SymmetricTwoNl { g1: usize, g2: usize, f1: usize, f2: usize },
    Custom,
}

/// An element of a series branch.
#[derive(Debug, Clone)]
pub enum BranchElement {
    Linear(RationalTF),
    Nonlinear(StaticNl),
}

/// A series chain of linear blocks and static nonlinearities.
pub type Branch = Vec<BranchElement>;

/// Wiener branch: linear dynamics followed by a static nonlinearity.
pub fn wiener(g: RationalTF, f: StaticNl) -> Branch {
    vec![BranchElement::Linear(g), BranchElement::Nonlinear(f)]
}

/// Hammerstein branch: static nonlinearity followed by linear dynamics.
pub fn hammerstein(f: StaticNl, g: RationalTF) -> Branch {
    vec![BranchElement::Nonlinear(f), BranchElement::Linear(g)]
}

/// Wiener-Hammerstein branch: nonlinearity sandwiched between two blocks.
pub fn wiener_hammerstein(g1: RationalTF, f: StaticNl, g2: RationalTF) -> Branch {
    vec![BranchElement::Linear(g1), BranchElement::Nonlinear(f), BranchElement::Linear(g2)]
}

/// Structural problems reported by [`BlockGraph::validate`].
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    AlgebraicLoop { cycle: Vec<String> },
    UnstableBlock { name: String },
    Disconnected { name: String },
    BadDegree { name: String, detail: String },
    TagMismatch { detail: String },
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::AlgebraicLoop { cycle } => {
                write!(f, "algebraic loop through [{}]", cycle.join(" -> "))
            }
            Violation::UnstableBlock { name } => {
                write!(f, "linear block '{name}' has poles on or outside the unit circle")
            }
            Violation::Disconnected { name } => {
                write!(f, "node '{name}' is not on any input-to-output path")
            }
            Violation::BadDegree { name, detail } => write!(f, "node '{name}': {detail}"),
            Violation::TagMismatch { detail } => write!(f, "topology tag mismatch: {detail}"),
        }
    }
}

/// DC operating point of a graph driven by a constant input `r_dc`.
#[derive(Debug, Clone, Serialize)]
pub struct OperatingPoint {
    pub r_dc: f64,
    /// DC output value of every node, indexed by node id.
    pub node_values: Vec<f64>,
    /// Input DC seen by each nonlinearity.
    pub nl_inputs: Vec<NlSetpoint>,
    pub y_dc: f64,
    pub converged: bool,
    pub residual: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct NlSetpoint {
    pub node: usize,
    pub name: String,
    pub u_dc: f64,
}

/// A directed interconnection of blocks with one input and one output.
#[derive(Debug, Clone)]
pub struct BlockGraph {
    nodes: Vec<Node>,
    names: Vec<String>,
    edges: Vec<Edge>,
    input: usize,
    output: usize,
    structure: StructureInfo,
}

// ---------------------------------------------------------------------------
// Builders
// ---------------------------------------------------------------------------

struct GraphAssembler {
    nodes: Vec<Node>,
    names: Vec<String>,
    edges: Vec<Edge>,
}

impl GraphAssembler {
    fn new() -> Self {
        GraphAssembler { nodes: Vec::new(), names: Vec::new(), edges: Vec::new() }
    }

    fn add(&mut self, name: impl Into<String>, node: Node) -> usize {
        self.nodes.push(node);
        self.names.push(name.into());
        self.nodes.len() - 1
    }

    fn connect(&mut self, from: usize, to: usize) {
        self.edges.push(Edge { from, to, sign: 1.0 });
    }

    fn connect_neg(&mut self, from: usize, to: usize) {
        self.edges.push(Edge { from, to, sign: -1.0 });
    }

    /// Append a branch chain starting at `from`; returns the last node id and
    /// the ids of the chain elements.
    fn chain(&mut self, from: usize, prefix: &str, branch: &Branch) -> (usize, Vec<usize>) {
        let mut prev = from;
        let mut ids = Vec::with_capacity(branch.len());
        for (i, el) in branch.iter().enumerate() {
            let id = match el {
                BranchElement::Linear(g) => {
                    self.add(format!("{prefix}.G{}", i + 1), Node::Linear(g.clone()))
                }
                BranchElement::Nonlinear(f) => {
                    self.add(format!("{prefix}.f{}", i + 1), Node::Nonlinear(f.clone()))
                }
            };
            self.connect(prev, id);
            ids.push(id);
            prev = id;
        }
        (prev, ids)
    }

    fn finish(self, input: usize, output: usize, structure: StructureInfo) -> BlockGraph {
        BlockGraph {
            nodes: self.nodes,
            names: self.names,
            edges: self.edges,
            input,
            output,
            structure,
        }
    }
}

/// Single-branch cascade (Wiener, Hammerstein, Wiener-Hammerstein, ...).
pub fn build_single_branch(branch: Branch) -> Result<BlockGraph> {
    if branch.is_empty() {
        return Err(Error::Graph("single-branch system needs at least one element".into()));
    }
    let mut a = GraphAssembler::new();
    let input = a.add("input", Node::Input);
    let (last, elements) = a.chain(input, "b", &branch);
    let output = a.add("output", Node::Output);
    a.connect(last, output);
    Ok(a.finish(input, output, StructureInfo::SingleBranch { elements }))
}

/// Wiener system: G then f.
pub fn build_wiener(g: RationalTF, f: StaticNl) -> Result<BlockGraph> {
    build_single_branch(wiener(g, f))
}

/// Hammerstein system: f then G.
pub fn build_hammerstein(f: StaticNl, g: RationalTF) -> Result<BlockGraph> {
    build_single_branch(hammerstein(f, g))
}

/// Wiener-Hammerstein system: G1, f, G2.
pub fn build_wiener_hammerstein(g1: RationalTF, f: StaticNl, g2: RationalTF) -> Result<BlockGraph> {
    build_single_branch(wiener_hammerstein(g1, f, g2))
}

/// Parallel feed-forward system: branches summed at the output.
pub fn build_parallel_ff(branches: Vec<Branch>) -> Result<BlockGraph> {
    if branches.len() < 2 {
        return Err(Error::Graph("parallel feed-forward system needs >= 2 branches".into()));
    }
    if branches.iter().any(|b| b.is_empty()) {
        return Err(Error::Graph("empty branch in parallel feed-forward system".into()));
    }
    let mut a = GraphAssembler::new();
    let input = a.add("input", Node::Input);
    let sum = a.add("sum_out", Node::Sum);
    let mut branch_ids = Vec::new();
    for (i, b) in branches.iter().enumerate() {
        let (last, ids) = a.chain(input, &format!("ff{}", i + 1), b);
        a.connect(last, sum);
        branch_ids.push(ids);
    }
    let output = a.add("output", Node::Output);
    a.connect(sum, output);
    Ok(a.finish(input, output, StructureInfo::ParallelFf { branches: branch_ids }))
}

/// Parallel feed-forward / parallel feedback system. Feedback branch outputs
/// are subtracted from the reference at the error junction.
pub fn build_ff_fb_parallel(ff: Vec<Branch>, fb: Vec<Branch>) -> Result<BlockGraph> {
    if ff.is_empty() {
        return Err(Error::Graph("feed-forward/feedback system needs >= 1 FF branch".into()));
    }
    if ff.iter().chain(fb.iter()).any(|b| b.is_empty()) {
        return Err(Error::Graph("empty branch in feed-forward/feedback system".into()));
    }
    let mut a = GraphAssembler::new();
    let input = a.add("input", Node::Input);
    let err_sum = a.add("sum_err", Node::Sum);
    a.connect(input, err_sum);
    let out_sum = a.add("sum_out", Node::Sum);
    let mut ff_ids = Vec::new();
    for (i, b) in ff.iter().enumerate() {
        let (last, ids) = a.chain(err_sum, &format!("ff{}", i + 1), b);
        a.connect(last, out_sum);
        ff_ids.push(ids);
    }
    let mut fb_ids = Vec::new();
    for (j, b) in fb.iter().enumerate() {
        let (last, ids) = a.chain(out_sum, &format!("fb{}", j + 1), b);
        a.connect_neg(last, err_sum);
        fb_ids.push(ids);
    }
    let output = a.add("output", Node::Output);
    a.connect(out_sum, output);
    Ok(a.finish(input, output, StructureInfo::FfFbParallel { ff: ff_ids, fb: fb_ids }))
}

/// Linear fractional representation: one static nonlinearity in a four-block
/// linear frame. `g4` is the optional direct parallel path.
pub fn build_lfr(
    g1: RationalTF,
    g2: RationalTF,
    g3: RationalTF,
    g4: Option<RationalTF>,
    f: StaticNl,
) -> Result<BlockGraph> {
    let mut a = GraphAssembler::new();
    let input = a.add("input", Node::Input);
    let n_g1 = a.add("G1", Node::Linear(g1));
    a.connect(input, n_g1);
    let sum_w = a.add("sum_w", Node::Sum);
    a.connect(n_g1, sum_w);
    let n_f = a.add("f", Node::Nonlinear(f));
    a.connect(sum_w, n_f);
    let n_g3 = a.add("G3", Node::Linear(g3));
    a.connect(n_f, n_g3);
    a.connect_neg(n_g3, sum_w);
    let n_g2 = a.add("G2", Node::Linear(g2));
    a.connect(n_f, n_g2);
    let sum_y = a.add("sum_y", Node::Sum);
    a.connect(n_g2, sum_y);
    let n_g4 = match g4 {
        Some(g) => {
            let id = a.add("G4", Node::Linear(g));
            a.connect(input, id);
            a.connect(id, sum_y);
            Some(id)
        }
        None => None,
    };
    let output = a.add("output", Node::Output);
    a.connect(sum_y, output);
    Ok(a.finish(
        input,
        output,
        StructureInfo::Lfr { g1: n_g1, g2: n_g2, g3: n_g3, g4: n_g4, f: n_f },
    ))
}

/// Symmetric feed-forward/feedback structure with a single nonlinear block:
/// y = G1·u + f(u − G2·y).
pub fn build_symmetric_fffb(g1: RationalTF, g2: RationalTF, f: StaticNl) -> Result<BlockGraph> {
    let mut a = GraphAssembler::new();
    let input = a.add("input", Node::Input);
    let n_g1 = a.add("G1", Node::Linear(g1));
    a.connect(input, n_g1);
    let sum_m = a.add("sum_mid", Node::Sum);
    a.connect(input, sum_m);
    let n_f = a.add("f", Node::Nonlinear(f));
    a.connect(sum_m, n_f);
    let sum_y = a.add("sum_out", Node::Sum);
    a.connect(n_g1, sum_y);
    a.connect(n_f, sum_y);
    let n_g2 = a.add("G2", Node::Linear(g2));
    a.connect(sum_y, n_g2);
    a.connect_neg(n_g2, sum_m);
    let output = a.add("output", Node::Output);
    a.connect(sum_y, output);
    Ok(a.finish(
        input,
        output,
        StructureInfo::SymmetricSingleNl { g1: n_g1, g2: n_g2, f: n_f },
    ))
}

/// Symmetric feed-forward/feedback structure with two nonlinear and two
/// linear blocks: y = u + G1·f1(u) − G2·f2(y).
pub fn build_symmetric_fffb_two_nl(
    g1: RationalTF,
    g2: RationalTF,
    f1: StaticNl,
    f2: StaticNl,
) -> Result<BlockGraph> {
    let mut a = GraphAssembler::new();
    let input = a.add("input", Node::Input);
    let sum_y = a.add("sum_out", Node::Sum);
    a.connect(input, sum_y);
    let n_f1 = a.add("f1", Node::Nonlinear(f1));
    a.connect(input, n_f1);
    let n_g1 = a.add("G1", Node::Linear(g1));
    a.connect(n_f1, n_g1);
    a.connect(n_g1, sum_y);
    let n_f2 = a.add("f2", Node::Nonlinear(f2));
    a.connect(sum_y, n_f2);
    let n_g2 = a.add("G2", Node::Linear(g2));
    a.connect(n_f2, n_g2);
    a.connect_neg(n_g2, sum_y);
    let output = a.add("output", Node::Output);
    a.connect(sum_y, output);
    Ok(a.finish(
        input,
        output,
        StructureInfo::SymmetricTwoNl { g1: n_g1, g2: n_g2, f1: n_f1, f2: n_f2 },
    ))
}

/// Free-form graph from explicit nodes and edges (config `custom` topology).
pub fn build_custom(named_nodes: Vec<(String, Node)>, edges: Vec<Edge>) -> Result<BlockGraph> {
    let mut input = None;
    let mut output = None;
    for (i, (_, node)) in named_nodes.iter().enumerate() {
        match node {
            Node::Input => {
                if input.replace(i).is_some() {
                    return Err(Error::Graph("more than one input node".into()));
                }
            }
            Node::Output => {
                if output.replace(i).is_some() {
                    return Err(Error::Graph("more than one output node".into()));
                }
            }
            _ => {}
        }
    }
    let (input, output) = match (input, output) {
        (Some(i), Some(o)) => (i, o),
        _ => return Err(Error::Graph("graph needs exactly one input and one output".into())),
    };
    let n = named_nodes.len();
    if edges.iter().any(|e| e.from >= n || e.to >= n) {
        return Err(Error::Graph("edge references unknown node".into()));
    }
    let (names, nodes) = named_nodes.into_iter().unzip();
    Ok(BlockGraph { nodes, names, edges, input, output, structure: StructureInfo::Custom })
}

// ---------------------------------------------------------------------------
// Graph queries, validation
// ---------------------------------------------------------------------------

impl BlockGraph {
    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node_name(&self, id: usize) -> &str {
        &self.names[id]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn input_id(&self) -> usize {
        self.input
    }

    pub fn output_id(&self) -> usize {
        self.output
    }

    pub fn structure(&self) -> &StructureInfo {
        &self.structure
    }

    pub fn topology(&self) -> Topology {
        match &self.structure {
            StructureInfo::SingleBranch { .. } => Topology::SingleBranch,
            StructureInfo::ParallelFf { branches } => Topology::ParallelFf { n: branches.len() },
            StructureInfo::FfFbParallel { ff, fb } => {
                Topology::FfFbParallel { n_ff: ff.len(), n_fb: fb.len() }
            }
            StructureInfo::Lfr { .. } => Topology::Lfr,
            StructureInfo::SymmetricSingleNl { .. } | StructureInfo::SymmetricTwoNl { .. } => {
                Topology::SymmetricFffb
            }
            StructureInfo::Custom => Topology::Custom,
        }
    }

    /// Signed predecessor lists, indexed by node id.
    pub fn preds(&self) -> Vec<Vec<(usize, f64)>> {
        let mut p = vec![Vec::new(); self.nodes.len()];
        for e in &self.edges {
            p[e.to].push((e.from, e.sign));
        }
        p
    }

    fn successors(&self) -> Vec<Vec<usize>> {
        let mut s = vec![Vec::new(); self.nodes.len()];
        for e in &self.edges {
            s[e.from].push(e.to);
        }
        s
    }

    /// True when evaluating `id` at sample t needs its input at sample t.
    fn is_instantaneous(&self, id: usize) -> bool {
        match &self.nodes[id] {
            Node::Linear(g) => g.delay == 0,
            _ => true,
        }
    }

    /// Per-sample evaluation order; `Err` carries the cyclic node set.
    fn eval_order(&self) -> std::result::Result<Vec<usize>, Vec<usize>> {
        self.topo_order(|to| self.is_instantaneous(to))
    }

    /// Kahn topological sort over edges selected by `edge_active(to)`.
    fn topo_order(
        &self,
        edge_active: impl Fn(usize) -> bool,
    ) -> std::result::Result<Vec<usize>, Vec<usize>> {
        let n = self.nodes.len();
        let mut indeg = vec![0usize; n];
        let mut succ: Vec<Vec<usize>> = vec![Vec::new(); n];
        for e in &self.edges {
            if edge_active(e.to) {
                indeg[e.to] += 1;
                succ[e.from].push(e.to);
            }
        }
        let mut queue: Vec<usize> = (0..n).filter(|&i| indeg[i] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(id) = queue.pop() {
            order.push(id);
            for &nx in &succ[id] {
                indeg[nx] -= 1;
                if indeg[nx] == 0 {
                    queue.push(nx);
                }
            }
        }
        if order.len() == n {
            Ok(order)
        } else {
            Err((0..n).filter(|&i| indeg[i] > 0).collect())
        }
    }

    /// Extract one cycle (as node names) from a cyclic leftover set.
    fn name_cycle(&self, leftover: &[usize]) -> Vec<String> {
        let succ = self.successors();
        let in_left = |i: usize| leftover.contains(&i);
        let start = leftover[0];
        let mut seen = vec![start];
        let mut path = vec![start];
        let mut cur = start;
        loop {
            let next = succ[cur].iter().copied().find(|&s| in_left(s));
            let Some(next) = next else { break };
            if let Some(pos) = seen.iter().position(|&s| s == next) {
                path = seen[pos..].to_vec();
                path.push(next);
                break;
            }
            seen.push(next);
            cur = next;
        }
        path.iter().map(|&i| self.names[i].clone()).collect()
    }

    /// Diagnostic structural check; returns all violations found.
    pub fn validate(&self) -> Vec<Violation> {
        let mut v = Vec::new();
        let preds = self.preds();

        for (i, node) in self.nodes.iter().enumerate() {
            let indeg = preds[i].len();
            let (ok, detail) = match node {
                Node::Input => (indeg == 0, "input node cannot have incoming edges"),
                Node::Output => (indeg == 1, "output node needs exactly one incoming edge"),
                Node::Sum => (indeg >= 1, "sum node needs at least one incoming edge"),
                Node::Linear(_) | Node::Nonlinear(_) => {
                    (indeg == 1, "block needs exactly one incoming edge")
                }
            };
            if !ok {
                v.push(Violation::BadDegree {
                    name: self.names[i].clone(),
                    detail: format!("{detail} (has {indeg})"),
                });
            }
        }

        if let Err(leftover) = self.eval_order() {
            v.push(Violation::AlgebraicLoop { cycle: self.name_cycle(&leftover) });
        }

        for (i, node) in self.nodes.iter().enumerate() {
            if let Node::Linear(g) = node {
                if !g.is_stable() {
                    v.push(Violation::UnstableBlock { name: self.names[i].clone() });
                }
            }
        }

        let fwd = reach(self.nodes.len(), self.edges.iter().map(|e| (e.from, e.to)), self.input);
        let bwd = reach(self.nodes.len(), self.edges.iter().map(|e| (e.to, e.from)), self.output);
        for i in 0..self.nodes.len() {
            if !(fwd[i] && bwd[i]) {
                v.push(Violation::Disconnected { name: self.names[i].clone() });
            }
        }

        if let Some(detail) = self.check_structure() {
            v.push(Violation::TagMismatch { detail });
        }
        v
    }

    /// Verify the recorded structure info matches the actual node kinds.
    fn check_structure(&self) -> Option<String> {
        let ok_linear = |id: usize| matches!(self.nodes.get(id), Some(Node::Linear(_)));
        let ok_nl = |id: usize| matches!(self.nodes.get(id), Some(Node::Nonlinear(_)));
        let ok_block = |id: usize| ok_linear(id) || ok_nl(id);
        match &self.structure {
            StructureInfo::SingleBranch { elements } => {
                if elements.is_empty() || !elements.iter().all(|&e| ok_block(e)) {
                    return Some("single-branch element list invalid".into());
                }
            }
            StructureInfo::ParallelFf { branches } => {
                if branches.len() < 2 || !branches.iter().flatten().all(|&e| ok_block(e)) {
                    return Some("parallel branch lists invalid".into());
                }
            }
            StructureInfo::FfFbParallel { ff, fb } => {
                if ff.is_empty() || !ff.iter().chain(fb).flatten().all(|&e| ok_block(e)) {
                    return Some("feed-forward/feedback branch lists invalid".into());
                }
            }
            StructureInfo::Lfr { g1, g2, g3, g4, f } => {
                let mut ok = ok_linear(*g1) && ok_linear(*g2) && ok_linear(*g3) && ok_nl(*f);
                if let Some(g4) = g4 {
                    ok &= ok_linear(*g4);
                }
                if !ok {
                    return Some("LFR slot assignment invalid".into());
                }
            }
            StructureInfo::SymmetricSingleNl { g1, g2, f } => {
                if !(ok_linear(*g1) && ok_linear(*g2) && ok_nl(*f)) {
                    return Some("symmetric structure slots invalid".into());
                }
            }
            StructureInfo::SymmetricTwoNl { g1, g2, f1, f2 } => {
                if !(ok_linear(*g1) && ok_linear(*g2) && ok_nl(*f1) && ok_nl(*f2)) {
                    return Some("symmetric structure slots invalid".into());
                }
            }
            StructureInfo::Custom => {}
        }
        None
    }

    /// Default settling length: ten times the slowest block time constant
    /// plus accumulated pure delay, capped at 1e5 samples.
    pub fn default_warmup(&self) -> usize {
        let mut max_pole = 0.0f64;
        let mut delays = 0usize;
        for node in &self.nodes {
            if let Node::Linear(g) = node {
                for p in g.poles() {
                    max_pole = max_pole.max(p.norm());
                }
                delays += g.delay;
            }
        }
        let tc = if max_pole >= 1.0 { 1e5 } else { (10.0 / (1.0 - max_pole)).ceil() };
        ((tc as usize) + delays + 8).min(100_000)
    }
}

fn reach(n: usize, edges: impl Iterator<Item = (usize, usize)>, start: usize) -> Vec<bool> {
    let mut succ: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (a, b) in edges {
        succ[a].push(b);
    }
    let mut seen = vec![false; n];
    let mut stack = vec![start];
    seen[start] = true;
    while let Some(i) = stack.pop() {
        for &j in &succ[i] {
            if !seen[j] {
                seen[j] = true;
                stack.push(j);
            }
        }
    }
    seen
}

// ---------------------------------------------------------------------------
// DC operating point
// ---------------------------------------------------------------------------

/// Node DC response with its derivative w.r.t. a seed value (dual numbers).
fn dc_eval(node: &Node, u: f64, du: f64, r_dc: f64) -> Result<(f64, f64)> {
    match node {
        Node::Input => Ok((r_dc, 0.0)),
        Node::Output | Node::Sum => Ok((u, du)),
        Node::Linear(g) => {
            let k = g
                .dc_gain()
                .ok_or_else(|| Error::Config("DC gain undefined: denominator sums to zero".into()))?;
            Ok((k * u, k * du))
        }
        Node::Nonlinear(f) => {
            let (dl, dr) = f.derivative_limits(u);
            Ok((f.eval(u), 0.5 * (dl + dr) * du))
        }
    }
}

impl BlockGraph {
    /// Solve the DC operating point for constant input `r_dc`.
    ///
    /// Acyclic graphs are solved by direct propagation (residual exactly 0).
    /// Graphs whose cycles all pass through one node use Newton iteration on
    /// that node's scalar fixed-point residual, with a damped fixed-point
    /// fallback. Remaining cases use damped Gauss-Seidel sweeps.
    pub fn solve_setpoint(&self, r_dc: f64) -> Result<OperatingPoint> {
        const TOL: f64 = 1e-12;
        const BUDGET: usize = 200;
        let preds = self.preds();

        match self.topo_order(|_| true) {
            Ok(order) => {
                let mut values = vec![0.0; self.nodes.len()];
                for &id in &order {
                    let u: f64 = preds[id].iter().map(|&(p, s)| s * values[p]).sum();
                    values[id] = dc_eval(&self.nodes[id], u, 0.0, r_dc)?.0;
                }
                Ok(self.finish_op(r_dc, values, 0.0, 0))
            }
            Err(cyclic) => self.solve_setpoint_cyclic(r_dc, &cyclic, &preds, TOL, BUDGET),
        }
    }

    fn solve_setpoint_cyclic(
        &self,
        r_dc: f64,
        cyclic: &[usize],
        preds: &[Vec<(usize, f64)>],
        tol: f64,
        budget: usize,
    ) -> Result<OperatingPoint> {
        // Find a cut node whose assumed output makes the graph acyclic.
        let cut = cyclic
            .iter()
            .copied()
            .find_map(|c| self.topo_order(|to| to != c).ok().map(|order| (c, order)));
        let Some((cut, order)) = cut else {
            return self.solve_setpoint_sweeps(r_dc, preds, tol, budget);
        };

        // Propagate assuming values[cut] = v; the residual is the cut node's
        // implied output minus v, with its derivative carried alongside. The
        // implied value is formed after the sweep: the cut is ordered as a
        // source, so its predecessors are only final once the sweep is done.
        let propagate = |v: f64| -> Result<(f64, f64, Vec<f64>)> {
            let mut values = vec![0.0; self.nodes.len()];
            let mut dvalues = vec![0.0; self.nodes.len()];
            values[cut] = v;
            dvalues[cut] = 1.0;
            for &id in &order {
                if id == cut {
                    continue;
                }
                let u: f64 = preds[id].iter().map(|&(p, s)| s * values[p]).sum();
                let du: f64 = preds[id].iter().map(|&(p, s)| s * dvalues[p]).sum();
                (values[id], dvalues[id]) = dc_eval(&self.nodes[id], u, du, r_dc)?;
            }
            let u: f64 = preds[cut].iter().map(|&(p, s)| s * values[p]).sum();
            let du: f64 = preds[cut].iter().map(|&(p, s)| s * dvalues[p]).sum();
            let (implied, dimplied) = dc_eval(&self.nodes[cut], u, du, r_dc)?;
            Ok((implied - v, dimplied - 1.0, values))
        };

        let mut v = 0.0;
        let (mut r, mut dr, mut values) = propagate(v)?;
        let mut iters = 0usize;
        while r.abs() > tol && iters < budget / 2 {
            if !r.is_finite() || dr.abs() < 1e-14 {
                break;
            }
            let v_next = v - r / dr;
            if !v_next.is_finite() {
                break;
            }
            v = v_next;
            let out = propagate(v)?;
            (r, dr, values) = out;
            iters += 1;
        }
        let mut lambda = 1.0;
        while r.abs() > tol && iters < budget {
            let v_next = v + lambda * r;
            let out = propagate(v_next)?;
            if out.0.is_finite() && out.0.abs() < r.abs() {
                v = v_next;
                (r, _, values) = out;
                lambda = (lambda * 1.5).min(1.0);
            } else {
                lambda *= 0.5;
                if lambda < 1e-8 {
                    break;
                }
            }
            iters += 1;
        }
        if !(r.abs() <= tol) {
            return Err(Error::SetpointNoConvergence {
                r_dc,
                detail: format!(
                    "residual {:.3e} after {iters} iterations at loop node '{}'",
                    r, self.names[cut]
                ),
            });
        }
        Ok(self.finish_op(r_dc, values, r.abs(), iters))
    }

    /// Damped Gauss-Seidel over all node values (multi-loop fallback).
    fn solve_setpoint_sweeps(
        &self,
        r_dc: f64,
        preds: &[Vec<(usize, f64)>],
        tol: f64,
        budget: usize,
    ) -> Result<OperatingPoint> {
        let order = self.eval_order().map_err(|left| {
            Error::Graph(format!(
                "algebraic loop through [{}]",
                self.name_cycle(&left).join(" -> ")
            ))
        })?;
        let mut values = vec![0.0; self.nodes.len()];
        let lambda = 0.5;
        let mut max_delta = f64::INFINITY;
        let mut iters = 0usize;
        while max_delta > tol && iters < budget {
            max_delta = 0.0;
            for &id in &order {
                let u: f64 = preds[id].iter().map(|&(p, s)| s * values[p]).sum();
                let target = dc_eval(&self.nodes[id], u, 0.0, r_dc)?.0;
                let next = values[id] + lambda * (target - values[id]);
                max_delta = max_delta.max((next - values[id]).abs());
                values[id] = next;
            }
            iters += 1;
        }
        let mut residual = 0.0f64;
        for &id in &order {
            let u: f64 = preds[id].iter().map(|&(p, s)| s * values[p]).sum();
            let target = dc_eval(&self.nodes[id], u, 0.0, r_dc)?.0;
            residual = residual.max((target - values[id]).abs());
        }
        if residual > tol * 10.0 {
            return Err(Error::SetpointNoConvergence {
                r_dc,
                detail: format!("sweep residual {residual:.3e} after {iters} sweeps"),
            });
        }
        Ok(self.finish_op(r_dc, values, residual, iters))
    }

    fn finish_op(
        &self,
        r_dc: f64,
        values: Vec<f64>,
        residual: f64,
        iterations: usize,
    ) -> OperatingPoint {
        let preds = self.preds();
        let nl_inputs = self
            .nodes
            .iter()
            .enumerate()
            .filter(|(_, n)| matches!(n, Node::Nonlinear(_)))
            .map(|(id, _)| NlSetpoint {
                node: id,
                name: self.names[id].clone(),
                u_dc: preds[id].iter().map(|&(p, s)| s * values[p]).sum(),
            })
            .collect();
        OperatingPoint {
            r_dc,
            y_dc: values[self.output],
            node_values: values,
            nl_inputs,
            converged: true,
            residual,
            iterations,
        }
    }
}

// ---------------------------------------------------------------------------
// Simulation
// ---------------------------------------------------------------------------

/// Fixed-size ring buffer of past values; `get(1)` is the most recent push.
struct Ring {
    buf: Vec<f64>,
    head: usize,
}

impl Ring {
    fn filled(len: usize, v: f64) -> Self {
        Ring { buf: vec![v; len], head: 0 }
    }

    #[inline]
    fn get(&self, lag: usize) -> f64 {
        let n = self.buf.len();
        self.buf[(self.head + n - (lag - 1)) % n]
    }

    #[inline]
    fn push(&mut self, v: f64) {
        if self.buf.is_empty() {
            return;
        }
        self.head = (self.head + 1) % self.buf.len();
        self.buf[self.head] = v;
    }
}

struct LinearState {
    node: usize,
    b: Vec<f64>,
    a: Vec<f64>,
    delay: usize,
    u_hist: Ring,
    y_hist: Ring,
}

impl BlockGraph {
    /// Simulate the graph over `input`, discarding the first `warmup` output
    /// samples. Internal state starts at the operating point of `input.dc`,
    /// so a zero-AC input yields the DC steady state immediately.
    pub fn simulate(&self, input: &Signal, warmup: usize) -> Result<Signal> {
        if input.samples.len() < warmup {
            return Err(Error::Config(format!(
                "input shorter ({}) than warmup ({warmup})",
                input.samples.len()
            )));
        }
        let op = self.solve_setpoint(input.dc)?;
        let order = self.eval_order().map_err(|left| {
            Error::Graph(format!(
                "algebraic loop through [{}]",
                self.name_cycle(&left).join(" -> ")
            ))
        })?;
        let preds = self.preds();

        // Per-linear-node difference-equation state, initialized at DC.
        let mut lin_states: Vec<LinearState> = Vec::new();
        let mut lin_index = vec![usize::MAX; self.nodes.len()];
        for (id, node) in self.nodes.iter().enumerate() {
            if let Node::Linear(g) = node {
                let u_dc: f64 = preds[id].iter().map(|&(p, s)| s * op.node_values[p]).sum();
                let y_dc = op.node_values[id];
                let nb = g.num.len() - 1;
                let na = g.den.len() - 1;
                lin_index[id] = lin_states.len();
                lin_states.push(LinearState {
                    node: id,
                    b: g.num.clone(),
                    a: g.den.clone(),
                    delay: g.delay,
                    u_hist: Ring::filled(g.delay + nb, u_dc),
                    y_hist: Ring::filled(na, y_dc),
                });
            }
        }

        let n = input.samples.len();
        let mut out = vec![0.0; self.nodes.len()];
        let mut result = Vec::with_capacity(n - warmup);
        for t in 0..n {
            for &id in &order {
                let val = match &self.nodes[id] {
                    Node::Input => input.samples[t],
                    Node::Output | Node::Sum => {
                        preds[id].iter().map(|&(p, s)| s * out[p]).sum()
                    }
                    Node::Nonlinear(f) => {
                        let u: f64 = preds[id].iter().map(|&(p, s)| s * out[p]).sum();
                        f.eval(u)
                    }
                    Node::Linear(_) => {
                        let st = &lin_states[lin_index[id]];
                        let mut acc = 0.0;
                        for (i, &bi) in st.b.iter().enumerate() {
                            let lag = st.delay + i;
                            if lag == 0 {
                                let u_now: f64 =
                                    preds[id].iter().map(|&(p, s)| s * out[p]).sum();
                                acc += bi * u_now;
                            } else {
                                acc += bi * st.u_hist.get(lag);
                            }
                        }
                        for (k, &ak) in st.a.iter().enumerate().skip(1) {
                            acc -= ak * st.y_hist.get(k);
                        }
                        acc
                    }
                };
                if !val.is_finite() || val.abs() > OVERFLOW_GUARD {
                    return Err(Error::UnstableTrajectory {
                        sample: t,
                        value: val,
                        guard: OVERFLOW_GUARD,
                    });
                }
                out[id] = val;
            }
            for st in &mut lin_states {
                let u_now: f64 = preds[st.node].iter().map(|&(p, s)| s * out[p]).sum();
                st.u_hist.push(u_now);
                st.y_hist.push(out[st.node]);
            }
            if t >= warmup {
                result.push(out[self.output]);
            }
        }
        Ok(Signal { samples: result, dc: op.y_dc, eps: input.eps, class: input.class })
    }
}
