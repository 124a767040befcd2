//! Analytic small-signal linearization of block graphs.
//!
//! Every nonlinearity is replaced by its local slope at the operating point
//! and the surrounding linear dynamics are composed by exact polynomial
//! arithmetic, following the closed forms for each interconnection family:
//! series chains multiply, parallel branches sum over the common denominator,
//! and loops close as F/(1 + F·B). The composed rational is reported
//! uncancelled so structurally fixed factors (e.g. feedback poles showing up
//! as zeros of the closed loop) stay visible to the locus analysis.

use serde::Serialize;

use crate::poly::RationalPoly;
use crate::systems::{
    BlockGraph, NlCase, Node, OperatingPoint, RationalTF, StaticNl, StructureInfo,
};
use crate::{Error, Result};

/// Small-signal gain limit of a static nonlinearity under vanishing
/// random excitation. Infinite for a value discontinuity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SlopeValue {
    Finite(f64),
    Infinite,
}

/// Local linearization data of a static nonlinearity at one point.
///
/// `eps_lin` is the vanishing-variance limit (mean of one-sided derivatives
/// at a corner, infinite at a jump); `delta_lin` is the vanishing-peak limit,
/// which only exists where the function is differentiable.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct LocalSlope {
    pub left: f64,
    pub right: f64,
    pub eps_lin: SlopeValue,
    pub delta_lin: Option<f64>,
    pub case: NlCase,
}

/// Classify a nonlinearity at `u_dc` and compute its local slopes.
pub fn nl_slope(nl: &StaticNl, u_dc: f64) -> LocalSlope {
    let (left, right) = nl.derivative_limits(u_dc);
    match nl.case_at(u_dc) {
        NlCase::Jump => LocalSlope {
            left,
            right,
            eps_lin: SlopeValue::Infinite,
            delta_lin: None,
            case: NlCase::Jump,
        },
        NlCase::Corner => LocalSlope {
            left,
            right,
            eps_lin: SlopeValue::Finite(0.5 * (left + right)),
            delta_lin: None,
            case: NlCase::Corner,
        },
        NlCase::Smooth => LocalSlope {
            left,
            right,
            eps_lin: SlopeValue::Finite(left),
            delta_lin: Some(left),
            case: NlCase::Smooth,
        },
    }
}

/// The linearized model of a graph at one setpoint.
#[derive(Debug, Clone, Serialize)]
pub struct LinearizedModel {
    pub tf: RationalTF,
    /// Per-branch slope products on the feed-forward side (γ values).
    pub ff_gains: Vec<f64>,
    /// Per-branch slope products on the feedback side (β values).
    pub fb_gains: Vec<f64>,
    /// The vanishing-peak linearization equals `tf` (true whenever the
    /// composition succeeded: it requires every nonlinearity to be smooth).
    pub delta_valid: bool,
    pub setpoint: OperatingPoint,
}

impl LinearizedModel {
    /// JSON export: coefficients, roots and branch gains.
    pub fn export_json(&self) -> serde_json::Value {
        let fmt = |roots: Vec<num_complex::Complex64>| -> Vec<serde_json::Value> {
            roots
                .iter()
                .map(|r| serde_json::json!({ "re": r.re, "im": r.im }))
                .collect()
        };
        serde_json::json!({
            "num": self.tf.num,
            "den": self.tf.den,
            "delay": self.tf.delay,
            "poles": fmt(self.tf.poles()),
            "zeros": fmt(self.tf.zeros()),
            "ff_gains": self.ff_gains,
            "fb_gains": self.fb_gains,
            "r_dc": self.setpoint.r_dc,
            "y_dc": self.setpoint.y_dc,
        })
    }
}

/// Smooth-slope lookup for every nonlinearity at the operating point.
/// Errors when any nonlinearity is not smooth there (the composition
/// theorems require differentiability).
fn smooth_slopes(graph: &BlockGraph, op: &OperatingPoint) -> Result<Vec<f64>> {
    let mut slopes = vec![f64::NAN; graph.nodes().len()];
    for nl_op in &op.nl_inputs {
        let Node::Nonlinear(f) = &graph.nodes()[nl_op.node] else {
            return Err(Error::LinearizationInvalid(format!(
                "operating point references non-nonlinear node {}",
                nl_op.node
            )));
        };
        let slope = nl_slope(f, nl_op.u_dc);
        match (slope.case, slope.eps_lin) {
            (NlCase::Smooth, SlopeValue::Finite(s)) => slopes[nl_op.node] = s,
            (case, _) => {
                return Err(Error::LinearizationInvalid(format!(
                    "'{}' is not smooth at u_dc = {} ({case:?}): local linear \
                     replacement is not defined for composition",
                    nl_op.name, nl_op.u_dc
                )))
            }
        }
    }
    Ok(slopes)
}

/// Series composition of one branch; returns (rational, slope product).
fn branch_rational(graph: &BlockGraph, ids: &[usize], slopes: &[f64]) -> (RationalPoly, f64) {
    let mut rp = RationalPoly::one();
    let mut gain = 1.0;
    for &id in ids {
        match &graph.nodes()[id] {
            Node::Linear(g) => rp = rp.series(&g.as_rational_poly()),
            Node::Nonlinear(_) => {
                rp = rp.scaled(slopes[id]);
                gain *= slopes[id];
            }
            _ => {}
        }
    }
    (rp, gain)
}

fn parallel_fold(parts: &[RationalPoly]) -> RationalPoly {
    let mut it = parts.iter();
    let first = it.next().cloned().unwrap_or_else(RationalPoly::zero);
    it.fold(first, |acc, p| acc.parallel(p))
}

fn node_tf(graph: &BlockGraph, id: usize) -> &RationalTF {
    match &graph.nodes()[id] {
        Node::Linear(g) => g,
        _ => unreachable!("structure info points at a linear node"),
    }
}

/// Compose the exact rational linearization of `graph` at `op`.
///
/// Structured families use their closed forms directly, so no spurious
/// common factors appear and no cancellation is performed. Custom graphs go
/// through generic signal-flow propagation followed by exact common-root
/// cancellation (tolerance 1e-10), which removes only the duplicate factors
/// that traversal itself introduces.
pub fn linearize_graph(graph: &BlockGraph, op: &OperatingPoint) -> Result<LinearizedModel> {
    if !op.converged {
        return Err(Error::LinearizationInvalid("operating point did not converge".into()));
    }
    let slopes = smooth_slopes(graph, op)?;

    let mut ff_gains = Vec::new();
    let mut fb_gains = Vec::new();
    let rp = match graph.structure() {
        StructureInfo::SingleBranch { elements } => {
            let (rp, gain) = branch_rational(graph, elements, &slopes);
            ff_gains.push(gain);
            rp
        }
        StructureInfo::ParallelFf { branches } => {
            let parts: Vec<RationalPoly> = branches
                .iter()
                .map(|b| {
                    let (rp, gain) = branch_rational(graph, b, &slopes);
                    ff_gains.push(gain);
                    rp
                })
                .collect();
            parallel_fold(&parts)
        }
        StructureInfo::FfFbParallel { ff, fb } => {
            let ff_parts: Vec<RationalPoly> = ff
                .iter()
                .map(|b| {
                    let (rp, gain) = branch_rational(graph, b, &slopes);
                    ff_gains.push(gain);
                    rp
                })
                .collect();
            let forward = parallel_fold(&ff_parts);
            if fb.is_empty() {
                forward
            } else {
                let fb_parts: Vec<RationalPoly> = fb
                    .iter()
                    .map(|b| {
                        let (rp, gain) = branch_rational(graph, b, &slopes);
                        fb_gains.push(gain);
                        rp
                    })
                    .collect();
                forward.feedback(&parallel_fold(&fb_parts))
            }
        }
        StructureInfo::Lfr { g1, g2, g3, g4, f } => {
            let beta = slopes[*f];
            ff_gains.push(beta);
            let through = node_tf(graph, *g1)
                .as_rational_poly()
                .series(&node_tf(graph, *g2).as_rational_poly())
                .scaled(beta);
            // 1 + β·G3, kept over A3 so the loop poles stay factored.
            let loop_factor = RationalPoly::one()
                .parallel(&node_tf(graph, *g3).as_rational_poly().scaled(beta));
            let inner = through.series(&loop_factor.recip());
            match g4 {
                Some(g4) => node_tf(graph, *g4).as_rational_poly().parallel(&inner),
                None => inner,
            }
        }
        StructureInfo::SymmetricSingleNl { g1, g2, f } => {
            let gamma = slopes[*f];
            ff_gains.push(gamma);
            let num = node_tf(graph, *g1)
                .as_rational_poly()
                .parallel(&RationalPoly::constant(gamma));
            let den = RationalPoly::one()
                .parallel(&node_tf(graph, *g2).as_rational_poly().scaled(gamma));
            num.series(&den.recip())
        }
        StructureInfo::SymmetricTwoNl { g1, g2, f1, f2 } => {
            let (gamma1, gamma2) = (slopes[*f1], slopes[*f2]);
            ff_gains.push(gamma1);
            fb_gains.push(gamma2);
            let num = RationalPoly::one()
                .parallel(&node_tf(graph, *g1).as_rational_poly().scaled(gamma1));
            let den = RationalPoly::one()
                .parallel(&node_tf(graph, *g2).as_rational_poly().scaled(gamma2));
            num.series(&den.recip())
        }
        StructureInfo::Custom => propagate_generic(graph, &slopes)?.cancel_common_roots(1e-10),
    };

    let tf = RationalTF::from_rational_poly(&rp)?;
    Ok(LinearizedModel {
        tf,
        ff_gains,
        fb_gains,
        delta_valid: true,
        setpoint: op.clone(),
    })
}

/// Per-step simplification tolerance inside generic traversal. Traversal
/// duplicates denominator factors at every junction; cancelling them while
/// they are still fresh keeps multiplicities low (repeated roots would split
/// by far more than this once the polynomial degree grows).
const GENERIC_SIMPLIFY_TOL: f64 = 1e-7;

/// Generic signal-flow reduction with at most one loop-cut node: every node's
/// transfer from the input is tracked as the affine pair α + β·X, where X is
/// the unknown transfer of the cut node.
fn propagate_generic(graph: &BlockGraph, slopes: &[f64]) -> Result<RationalPoly> {
    let preds = graph.preds();
    let n = graph.nodes().len();

    let full_order = graph_topo(graph, None);
    let (cut, order) = match full_order {
        Ok(order) => (None, order),
        Err(cyclic) => {
            let found = cyclic
                .iter()
                .copied()
                .find_map(|c| graph_topo(graph, Some(c)).ok().map(|o| (c, o)));
            match found {
                Some((c, o)) => (Some(c), o),
                None => {
                    return Err(Error::LinearizationInvalid(
                        "custom graph has multiple independent loops; generic \
                         linearization handles a single loop-cut node"
                            .into(),
                    ))
                }
            }
        }
    };

    let par = |a: &RationalPoly, b: &RationalPoly| {
        a.parallel(b).cancel_common_roots(GENERIC_SIMPLIFY_TOL)
    };
    let ser = |a: &RationalPoly, b: &RationalPoly| {
        a.series(b).cancel_common_roots(GENERIC_SIMPLIFY_TOL)
    };
    let fold_preds = |id: usize, parts: &[RationalPoly]| -> RationalPoly {
        preds[id]
            .iter()
            .map(|&(p, s)| if s == 1.0 { parts[p].clone() } else { parts[p].scaled(s) })
            .reduce(|acc, rp| par(&acc, &rp))
            .unwrap_or_else(RationalPoly::zero)
    };

    let mut alpha = vec![RationalPoly::zero(); n];
    let mut beta = vec![RationalPoly::zero(); n];
    if let Some(c) = cut {
        beta[c] = RationalPoly::one();
    }
    let eval_pair = |id: usize, alpha: &[RationalPoly], beta: &[RationalPoly]| {
        let ua = fold_preds(id, alpha);
        let ub = fold_preds(id, beta);
        match &graph.nodes()[id] {
            Node::Input => (RationalPoly::one(), RationalPoly::zero()),
            Node::Output | Node::Sum => (ua, ub),
            Node::Nonlinear(_) => (ua.scaled(slopes[id]), ub.scaled(slopes[id])),
            Node::Linear(g) => {
                let rp = g.as_rational_poly();
                (ser(&ua, &rp), ser(&ub, &rp))
            }
        }
    };

    for &id in &order {
        if Some(id) == cut {
            continue;
        }
        let (a, b) = eval_pair(id, &alpha, &beta);
        alpha[id] = a;
        beta[id] = b;
    }

    let out = graph.output_id();
    match cut {
        None => Ok(alpha[out].clone()),
        Some(c) => {
            let (ac, bc) = eval_pair(c, &alpha, &beta);
            // X = α_c / (1 − β_c)
            let denom = RationalPoly::one().parallel(&bc.scaled(-1.0));
            let x = ser(&ac, &denom.recip());
            Ok(par(&alpha[out], &ser(&beta[out], &x)))
        }
    }
}

/// Topological order of the full dependency graph, optionally treating one
/// node as a source (its in-edges ignored).
fn graph_topo(
    graph: &BlockGraph,
    cut: Option<usize>,
) -> std::result::Result<Vec<usize>, Vec<usize>> {
    let n = graph.nodes().len();
    let mut indeg = vec![0usize; n];
    let mut succ: Vec<Vec<usize>> = vec![Vec::new(); n];
    for e in graph.edges() {
        if Some(e.to) != cut {
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

/// Branch-gain matrix of a parallel feed-forward system: entry (k, i) is the
/// slope product of branch i at setpoint k.
#[derive(Debug, Clone, Serialize)]
pub struct BranchGainMatrix {
    pub setpoints: Vec<f64>,
    /// Row per setpoint, column per branch.
    pub gains: Vec<Vec<f64>>,
}

impl BranchGainMatrix {
    pub fn n_setpoints(&self) -> usize {
        self.gains.len()
    }

    pub fn n_branches(&self) -> usize {
        self.gains.first().map(|r| r.len()).unwrap_or(0)
    }

    /// Numerical rank via singular values (relative threshold on σ₁).
    pub fn rank(&self, rel_tol: f64) -> usize {
        let m = self.n_setpoints();
        let n = self.n_branches();
        if m == 0 || n == 0 {
            return 0;
        }
        let mat = nalgebra::DMatrix::from_fn(m, n, |r, c| self.gains[r][c]);
        let sv = mat.singular_values();
        let s1 = sv[0];
        sv.iter().filter(|&&s| s > rel_tol * s1).count()
    }
}

/// Compute the branch-gain matrix over `setpoints` for a parallel
/// feed-forward graph.
pub fn branch_gain_matrix(graph: &BlockGraph, setpoints: &[f64]) -> Result<BranchGainMatrix> {
    let StructureInfo::ParallelFf { branches } = graph.structure() else {
        return Err(Error::LinearizationInvalid(
            "branch-gain matrix is defined for parallel feed-forward graphs".into(),
        ));
    };
    let mut gains = Vec::with_capacity(setpoints.len());
    for &r_dc in setpoints {
        let op = graph.solve_setpoint(r_dc)?;
        let slopes = smooth_slopes(graph, &op)?;
        gains.push(
            branches
                .iter()
                .map(|b| branch_rational(graph, b, &slopes).1)
                .collect::<Vec<f64>>(),
        );
    }
    Ok(BranchGainMatrix { setpoints: setpoints.to_vec(), gains })
}
