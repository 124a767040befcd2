//! Root extraction, locus tracking across setpoints, fixed/moving
//! classification, and the branch-counting rank tests.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::estimate::FrfEstimate;
use crate::systems::RationalTF;
use crate::{Error, Result};

/// Roots below this magnitude are treated as structural delay zeros and kept
/// out of the movement vote.
pub const ORIGIN_TOL: f64 = 1e-8;

/// Default z-plane dispersion thresholds for the fixed/moving split of
/// noisy, estimated loci.
pub const DEFAULT_TOL_FIXED: f64 = 0.01;
pub const DEFAULT_TOL_MOVE: f64 = 0.05;

/// Thresholds for analytic (noise-free) loci, where "fixed" means pinned to
/// numerical precision and any genuine setpoint dependence counts as moving.
pub const ORACLE_TOL_FIXED: f64 = 1e-8;
pub const ORACLE_TOL_MOVE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RootKind {
    Pole,
    Zero,
}

/// Poles and zeros of one model, tagged with its setpoint.
#[derive(Debug, Clone, Serialize)]
pub struct RootSet {
    /// Setpoint the model belongs to (NaN outside a sweep).
    pub setpoint: f64,
    pub poles: Vec<Complex64>,
    pub zeros: Vec<Complex64>,
    /// Ratio of leading z-domain coefficients.
    pub gain: f64,
}

/// Extract poles, zeros and gain of a rational model. Zeros include one
/// origin root per delay sample.
pub fn roots(tf: &RationalTF) -> RootSet {
    roots_at(tf, f64::NAN)
}

/// [`roots`] tagged with the setpoint it was computed at.
pub fn roots_at(tf: &RationalTF, setpoint: f64) -> RootSet {
    let lead = |c: &[f64]| -> f64 {
        let max = c.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if max == 0.0 {
            return 0.0;
        }
        c[c.iter().position(|v| v.abs() > 1e-14 * max).unwrap()]
    };
    RootSet {
        setpoint,
        poles: tf.poles(),
        zeros: tf.zeros(),
        gain: lead(&tf.num) / lead(&tf.den),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TrackLabel {
    Fixed,
    Moving,
    Ambiguous,
}

/// One root followed across the setpoint sweep. `points[k]` is the matched
/// root at setpoint k, or `None` where the track has a gap (model order
/// changes).
#[derive(Debug, Clone, Serialize)]
pub struct RootTrack {
    pub kind: RootKind,
    pub points: Vec<Option<Complex64>>,
    /// Max pairwise distance between present points.
    pub dispersion: f64,
    pub label: TrackLabel,
}

impl RootTrack {
    fn compute_dispersion(points: &[Option<Complex64>]) -> f64 {
        let present: Vec<Complex64> = points.iter().flatten().copied().collect();
        let mut d = 0.0f64;
        for i in 0..present.len() {
            for j in i + 1..present.len() {
                d = d.max((present[i] - present[j]).norm());
            }
        }
        d
    }

    fn label_for(dispersion: f64, tol_fixed: f64, tol_move: f64) -> TrackLabel {
        if dispersion < tol_fixed {
            TrackLabel::Fixed
        } else if dispersion > tol_move {
            TrackLabel::Moving
        } else {
            TrackLabel::Ambiguous
        }
    }

    /// Mean location of present points.
    pub fn centroid(&self) -> Complex64 {
        let present: Vec<Complex64> = self.points.iter().flatten().copied().collect();
        present.iter().sum::<Complex64>() / present.len().max(1) as f64
    }

    /// True when every present point sits at the origin (delay zeros).
    pub fn is_structural_origin(&self) -> bool {
        self.points.iter().flatten().all(|p| p.norm() < ORIGIN_TOL)
    }
}

/// Match roots across consecutive setpoints by greedy nearest-neighbor
/// pairing. Unmatched roots open new tracks; tracks without a match get a
/// gap marker. Labels use the default thresholds; [`classify`] re-labels.
pub fn track_roots(rootsets: &[RootSet], kind: RootKind) -> Vec<RootTrack> {
    let m = rootsets.len();
    let lists: Vec<&[Complex64]> = rootsets
        .iter()
        .map(|rs| match kind {
            RootKind::Pole => rs.poles.as_slice(),
            RootKind::Zero => rs.zeros.as_slice(),
        })
        .collect();

    struct Open {
        points: Vec<Option<Complex64>>,
        last: Complex64,
    }
    let mut open: Vec<Open> = Vec::new();
    for (s, roots) in lists.iter().enumerate() {
        // Greedy global pairing of open tracks to this setpoint's roots.
        let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
        for (ti, t) in open.iter().enumerate() {
            for (rj, r) in roots.iter().enumerate() {
                pairs.push(((t.last - r).norm(), ti, rj));
            }
        }
        pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
        let mut track_used = vec![false; open.len()];
        let mut root_used = vec![false; roots.len()];
        for &(_, ti, rj) in &pairs {
            if track_used[ti] || root_used[rj] {
                continue;
            }
            track_used[ti] = true;
            root_used[rj] = true;
            open[ti].points.push(Some(roots[rj]));
            open[ti].last = roots[rj];
        }
        for (ti, used) in track_used.iter().enumerate() {
            if !used {
                open[ti].points.push(None);
            }
        }
        for (rj, used) in root_used.iter().enumerate() {
            if !used {
                let mut points = vec![None; s];
                points.push(Some(roots[rj]));
                open.push(Open { points, last: roots[rj] });
            }
        }
    }
    open.into_iter()
        .map(|t| {
            debug_assert_eq!(t.points.len(), m);
            let dispersion = RootTrack::compute_dispersion(&t.points);
            RootTrack {
                kind,
                points: t.points,
                dispersion,
                label: RootTrack::label_for(dispersion, DEFAULT_TOL_FIXED, DEFAULT_TOL_MOVE),
            }
        })
        .collect()
}

/// Aggregate movement class of one root kind.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RootClass {
    AllFixed,
    Mixed,
    AllMove,
}

/// Per-kind classes plus the labeled tracks behind them.
#[derive(Debug, Clone, Serialize)]
pub struct LocusClassification {
    pub pole_class: RootClass,
    pub zero_class: RootClass,
    pub tracks: Vec<RootTrack>,
    pub ambiguous_count: usize,
}

/// Label every track by its dispersion (strictly below `tol_fixed` = fixed,
/// strictly above `tol_move` = moving, ambiguous otherwise) and derive the
/// per-kind class. Ambiguous tracks and structural origin zeros are excluded
/// from the vote but counted/retained.
pub fn classify(
    tracks: &[RootTrack],
    tol_fixed: f64,
    tol_move: f64,
) -> Result<LocusClassification> {
    if tol_fixed >= tol_move {
        return Err(Error::Config(format!(
            "tol_fixed ({tol_fixed}) must be below tol_move ({tol_move})"
        )));
    }
    let relabeled: Vec<RootTrack> = tracks
        .iter()
        .map(|t| RootTrack {
            kind: t.kind,
            points: t.points.clone(),
            dispersion: t.dispersion,
            label: RootTrack::label_for(t.dispersion, tol_fixed, tol_move),
        })
        .collect();
    let ambiguous_count =
        relabeled.iter().filter(|t| t.label == TrackLabel::Ambiguous).count();

    let class_of = |kind: RootKind| -> Result<RootClass> {
        let voting: Vec<&RootTrack> = relabeled
            .iter()
            .filter(|t| t.kind == kind && !t.is_structural_origin())
            .collect();
        if voting.is_empty() {
            // No informative roots of this kind: nothing can move.
            return Ok(RootClass::AllFixed);
        }
        let fixed = voting.iter().filter(|t| t.label == TrackLabel::Fixed).count();
        let moving = voting.iter().filter(|t| t.label == TrackLabel::Moving).count();
        match (fixed, moving) {
            (0, 0) => Err(Error::Indeterminate(format!(
                "all {} tracks are ambiguous at tolerances ({tol_fixed}, {tol_move})",
                if kind == RootKind::Pole { "pole" } else { "zero" },
            ))),
            (_, 0) => Ok(RootClass::AllFixed),
            (0, _) => Ok(RootClass::AllMove),
            _ => Ok(RootClass::Mixed),
        }
    };
    Ok(LocusClassification {
        pole_class: class_of(RootKind::Pole)?,
        zero_class: class_of(RootKind::Zero)?,
        tracks: relabeled,
        ambiguous_count,
    })
}

/// Convenience: track and classify poles and zeros of a model sweep.
pub fn classify_rootsets(
    rootsets: &[RootSet],
    tol_fixed: f64,
    tol_move: f64,
) -> Result<LocusClassification> {
    if rootsets.len() < 2 {
        return Err(Error::Config("classification needs at least two setpoints".into()));
    }
    let mut tracks = track_roots(rootsets, RootKind::Pole);
    tracks.extend(track_roots(rootsets, RootKind::Zero));
    classify(&tracks, tol_fixed, tol_move)
}

/// Outcome of a numerical rank probe.
#[derive(Debug, Clone, Serialize)]
pub struct RankReport {
    pub rank: usize,
    pub singular_values: Vec<f64>,
    /// Threshold a singular value had to clear.
    pub threshold: f64,
}

fn svd_rank(columns: Vec<Vec<Complex64>>, noise_floor: Option<f64>) -> RankReport {
    let m = columns.len();
    let k = columns[0].len();
    let mat = DMatrix::from_fn(k, m, |r, c| columns[c][r]);
    let sv = mat.singular_values();
    let singular_values: Vec<f64> = sv.iter().copied().collect();
    let s1 = singular_values.first().copied().unwrap_or(0.0);
    let mut threshold = 1e-6 * s1;
    if let Some(nf) = noise_floor {
        threshold = threshold.max(nf);
    }
    let rank = singular_values.iter().filter(|&&s| s > threshold).count();
    RankReport { rank, singular_values, threshold }
}

fn common_bins(frfs: &[FrfEstimate]) -> Result<usize> {
    let Some(first) = frfs.first() else {
        return Err(Error::Estimation("no FRF estimates given".into()));
    };
    if frfs.len() < 2 {
        return Err(Error::Estimation("rank tests need >= 2 setpoints".into()));
    }
    for f in frfs {
        if f.bins != first.bins || f.period != first.period {
            return Err(Error::Estimation("FRF estimates use different bin grids".into()));
        }
    }
    Ok(first.bins.len())
}

/// Noise floor for the rank threshold: three times the worst column's
/// standard error, from the per-bin variances when available.
fn frf_noise_floor(frfs: &[FrfEstimate], invert: bool) -> Option<f64> {
    let mut worst: f64 = 0.0;
    for f in frfs {
        let var = f.var_g.as_ref()?;
        let sum: f64 = var
            .iter()
            .zip(&f.g_hat)
            .map(|(&v, g)| {
                let v = v / f.m as f64;
                if invert {
                    // var(1/G) ≈ var(G)/|G|⁴ to first order.
                    v / g.norm_sqr().powi(2)
                } else {
                    v
                }
            })
            .sum();
        worst = worst.max(sum.sqrt());
    }
    Some(3.0 * worst)
}

/// Count parallel feed-forward branches: the numerical rank of the matrix
/// whose columns are the FRFs at the different setpoints.
pub fn rank_branches(frfs: &[FrfEstimate]) -> Result<RankReport> {
    common_bins(frfs)?;
    let cols = frfs.iter().map(|f| f.g_hat.clone()).collect();
    Ok(svd_rank(cols, frf_noise_floor(frfs, false)))
}

/// Count feedback branches under the single-feed-forward-branch hypothesis:
/// rank of the element-wise inverted FRF matrix (equals n_FB + 1).
pub fn rank_feedback(frfs: &[FrfEstimate]) -> Result<RankReport> {
    common_bins(frfs)?;
    let mut cols = Vec::with_capacity(frfs.len());
    for f in frfs {
        let mut col = Vec::with_capacity(f.g_hat.len());
        for (i, g) in f.g_hat.iter().enumerate() {
            if g.norm() < 1e-12 {
                return Err(Error::Estimation(format!(
                    "FRF magnitude below 1e-12 at bin {}: cannot invert",
                    f.bins[i]
                )));
            }
            col.push(Complex64::new(1.0, 0.0) / g);
        }
        cols.push(col);
    }
    Ok(svd_rank(cols, frf_noise_floor(frfs, true)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::demo;
    use crate::linearize::linearize_graph;
    use crate::systems::{
        build_ff_fb_parallel, build_parallel_ff, build_wiener, wiener, BlockGraph, StaticNl,
    };
    use approx::assert_relative_eq;

    fn analytic_frfs(graph: &BlockGraph, setpoints: &[f64], n: usize, upper: usize) -> Vec<FrfEstimate> {
        let bins: Vec<usize> = (1..=upper).collect();
        setpoints
            .iter()
            .map(|&r| {
                let op = graph.solve_setpoint(r).unwrap();
                let m = linearize_graph(graph, &op).unwrap();
                FrfEstimate::from_model(&m.tf, n, &bins)
            })
            .collect()
    }

    fn analytic_rootsets(graph: &BlockGraph, setpoints: &[f64]) -> Vec<RootSet> {
        setpoints
            .iter()
            .map(|&r| {
                let op = graph.solve_setpoint(r).unwrap();
                let m = linearize_graph(graph, &op).unwrap();
                roots_at(&m.tf, r)
            })
            .collect()
    }

    #[test]
    fn roots_of_demo_blocks() {
        let rs = roots(&demo::g1());
        assert_eq!(rs.poles.len(), 1);
        assert_relative_eq!(rs.poles[0].re, 0.9, epsilon = 1e-12);
        assert_relative_eq!(rs.zeros[0].re, -2.0 / 3.0, epsilon = 1e-12);
        assert_relative_eq!(rs.gain, 0.15, epsilon = 1e-14);

        let rs3 = roots(&demo::g3());
        assert_eq!(rs3.zeros.len(), 2);
        assert!(rs3.zeros.iter().any(|z| (z.re + 0.75).abs() < 1e-12));
        assert!(rs3.zeros.iter().any(|z| z.norm() < ORIGIN_TOL));
        assert_relative_eq!(rs3.poles[0].re, 0.72, epsilon = 1e-12);
    }

    #[test]
    fn identical_rootsets_have_zero_dispersion() {
        let rs: Vec<RootSet> = (0..5)
            .map(|k| RootSet {
                setpoint: k as f64,
                poles: vec![Complex64::new(0.9, 0.0), Complex64::new(0.5, 0.2)],
                zeros: vec![],
                gain: 1.0,
            })
            .collect();
        let tracks = track_roots(&rs, RootKind::Pole);
        assert_eq!(tracks.len(), 2);
        for t in &tracks {
            assert_eq!(t.dispersion, 0.0);
            assert_eq!(t.label, TrackLabel::Fixed);
        }
    }

    #[test]
    fn drifting_root_yields_single_moving_track() {
        let rs: Vec<RootSet> = (0..11)
            .map(|k| RootSet {
                setpoint: k as f64 * 0.1,
                poles: vec![
                    Complex64::new(0.9 - 0.01 * k as f64, 0.0),
                    Complex64::new(0.3, 0.0),
                ],
                zeros: vec![],
                gain: 1.0,
            })
            .collect();
        let tracks = track_roots(&rs, RootKind::Pole);
        assert_eq!(tracks.len(), 2);
        let moving: Vec<&RootTrack> =
            tracks.iter().filter(|t| t.dispersion > 1e-6).collect();
        assert_eq!(moving.len(), 1);
        assert_relative_eq!(moving[0].dispersion, 0.1, epsilon = 1e-12);
    }

    #[test]
    fn conjugate_pair_gives_mirror_tracks() {
        let rs: Vec<RootSet> = (0..4)
            .map(|k| {
                let p = Complex64::new(0.5 + 0.02 * k as f64, 0.4);
                RootSet {
                    setpoint: k as f64,
                    poles: vec![p, p.conj()],
                    zeros: vec![],
                    gain: 1.0,
                }
            })
            .collect();
        let tracks = track_roots(&rs, RootKind::Pole);
        assert_eq!(tracks.len(), 2);
        for (a, b) in tracks[0].points.iter().zip(&tracks[1].points) {
            let (a, b) = (a.unwrap(), b.unwrap());
            assert_relative_eq!(a.re, b.re, epsilon = 1e-14);
            assert_relative_eq!(a.im, -b.im, epsilon = 1e-14);
        }
    }

    #[test]
    fn gap_markers_on_order_change() {
        let mut rs: Vec<RootSet> = (0..4)
            .map(|k| RootSet {
                setpoint: k as f64,
                poles: vec![Complex64::new(0.8, 0.0)],
                zeros: vec![],
                gain: 1.0,
            })
            .collect();
        rs[2].poles.push(Complex64::new(-0.4, 0.0));
        let tracks = track_roots(&rs, RootKind::Pole);
        assert_eq!(tracks.len(), 2);
        let newcomer = tracks.iter().find(|t| t.points[0].is_none()).unwrap();
        assert_eq!(newcomer.points[2], Some(Complex64::new(-0.4, 0.0)));
        assert_eq!(newcomer.points[3], None);
    }

    #[test]
    fn boundary_dispersion_is_ambiguous() {
        let track = RootTrack {
            kind: RootKind::Pole,
            points: vec![
                Some(Complex64::new(0.0, 0.0)),
                Some(Complex64::new(DEFAULT_TOL_FIXED, 0.0)),
            ],
            dispersion: DEFAULT_TOL_FIXED,
            label: TrackLabel::Ambiguous,
        };
        let moving = RootTrack {
            kind: RootKind::Zero,
            points: vec![
                Some(Complex64::new(0.5, 0.0)),
                Some(Complex64::new(0.8, 0.0)),
            ],
            dispersion: 0.3,
            label: TrackLabel::Moving,
        };
        let c = classify(
            &[track, moving],
            DEFAULT_TOL_FIXED,
            DEFAULT_TOL_MOVE,
        )
        .unwrap_err();
        assert!(matches!(c, Error::Indeterminate(_)));
    }

    #[test]
    fn demo_loci_classify_all_move_mixed() {
        let graph = demo::demo_graph();
        let setpoints: Vec<f64> = (0..=10).map(|k| k as f64 * 0.1).collect();
        let rootsets = analytic_rootsets(&graph, &setpoints);
        let c = classify_rootsets(&rootsets, ORACLE_TOL_FIXED, ORACLE_TOL_MOVE).unwrap();
        assert_eq!(c.pole_class, RootClass::AllMove);
        assert_eq!(c.zero_class, RootClass::Mixed);
        let fixed_zero = c
            .tracks
            .iter()
            .find(|t| t.kind == RootKind::Zero && t.label == TrackLabel::Fixed)
            .expect("no fixed zero track");
        assert_relative_eq!(fixed_zero.centroid().re, 0.72, epsilon = 1e-9);
        assert!(fixed_zero.dispersion < 1e-9);
    }

    #[test]
    fn single_branch_loci_classify_all_fixed() {
        let graph = build_wiener(demo::g1(), demo::f1()).unwrap();
        let setpoints = [0.0, 0.1, 0.2, 0.3];
        let rootsets = analytic_rootsets(&graph, &setpoints);
        let c = classify_rootsets(&rootsets, DEFAULT_TOL_FIXED, DEFAULT_TOL_MOVE).unwrap();
        assert_eq!(c.pole_class, RootClass::AllFixed);
        assert_eq!(c.zero_class, RootClass::AllFixed);
    }

    #[test]
    fn classification_invariant_to_setpoint_order_and_conjugation() {
        let base: Vec<RootSet> = (0..6)
            .map(|k| RootSet {
                setpoint: k as f64,
                poles: vec![
                    Complex64::new(0.9, 0.0),
                    Complex64::new(0.2 + 0.03 * k as f64, 0.45),
                    Complex64::new(0.2 + 0.03 * k as f64, -0.45),
                ],
                zeros: vec![Complex64::new(-0.5, 0.0)],
                gain: 1.0,
            })
            .collect();
        let reference =
            classify_rootsets(&base, DEFAULT_TOL_FIXED, DEFAULT_TOL_MOVE).unwrap();

        let mut permuted = base.clone();
        permuted.swap(0, 5);
        permuted.swap(1, 3);
        let p = classify_rootsets(&permuted, DEFAULT_TOL_FIXED, DEFAULT_TOL_MOVE).unwrap();
        assert_eq!(p.pole_class, reference.pole_class);
        assert_eq!(p.zero_class, reference.zero_class);

        let conjugated: Vec<RootSet> = base
            .iter()
            .map(|rs| RootSet {
                setpoint: rs.setpoint,
                poles: rs.poles.iter().map(|p| p.conj()).collect(),
                zeros: rs.zeros.iter().map(|z| z.conj()).collect(),
                gain: rs.gain,
            })
            .collect();
        let c = classify_rootsets(&conjugated, DEFAULT_TOL_FIXED, DEFAULT_TOL_MOVE).unwrap();
        assert_eq!(c.pole_class, reference.pole_class);
        assert_eq!(c.zero_class, reference.zero_class);
    }

    #[test]
    fn rank_of_three_branch_parallel_is_three() {
        let g_a = demo::g1();
        let g_b = demo::g2();
        let g_c = crate::systems::RationalTF::new(vec![0.2, 0.15], vec![1.0, -0.72], 0).unwrap();
        let graph = build_parallel_ff(vec![
            wiener(g_a, demo::f1()),
            wiener(g_b, demo::f2()),
            wiener(g_c, demo::f3()),
        ])
        .unwrap();
        let setpoints: Vec<f64> = (0..6).map(|k| k as f64 * 0.2).collect();
        let frfs = analytic_frfs(&graph, &setpoints, 512, 128);
        let report = rank_branches(&frfs).unwrap();
        assert_eq!(report.rank, 3, "singular values {:?}", report.singular_values);
        let ratio = report.singular_values[2] / report.singular_values[3];
        assert!(ratio > 1e3, "σ3/σ4 = {ratio}");
    }

    #[test]
    fn rank_of_single_branch_is_one() {
        let graph = build_wiener(demo::g1(), demo::f1()).unwrap();
        let setpoints = [0.0, 0.2, 0.4, 0.6];
        let frfs = analytic_frfs(&graph, &setpoints, 512, 128);
        assert_eq!(rank_branches(&frfs).unwrap().rank, 1);
    }

    #[test]
    fn identical_frfs_rank_one() {
        let frf = FrfEstimate::from_model(&demo::g1(), 256, &(1..=64).collect::<Vec<_>>());
        let frfs = vec![frf.clone(), frf.clone(), frf];
        assert_eq!(rank_branches(&frfs).unwrap().rank, 1);
    }

    #[test]
    fn inverse_rank_counts_feedback_branches() {
        // One (delayed) feed-forward branch, one Wiener feedback branch:
        // 1/G spans {1/(γF), G_fb} across setpoints: rank 2.
        let ff = wiener(demo::g3(), demo::f1());
        let fb = vec![wiener(demo::g2(), demo::f3())];
        let graph = build_ff_fb_parallel(vec![ff.clone()], fb).unwrap();
        let setpoints: Vec<f64> = (0..5).map(|k| 0.1 + 0.2 * k as f64).collect();
        let frfs = analytic_frfs(&graph, &setpoints, 512, 100);
        assert_eq!(rank_feedback(&frfs).unwrap().rank, 2);

        // Two feedback branches: rank 3.
        let fb2 = vec![
            wiener(demo::g2(), demo::f3()),
            vec![
                crate::systems::BranchElement::Linear(demo::g1()),
                crate::systems::BranchElement::Nonlinear(
                    StaticNl::polynomial(vec![0.0, 1.0, 0.3, 0.2]).unwrap(),
                ),
            ],
        ];
        let graph2 = build_ff_fb_parallel(vec![ff], fb2).unwrap();
        let frfs2 = analytic_frfs(&graph2, &setpoints, 512, 100);
        assert_eq!(rank_feedback(&frfs2).unwrap().rank, 3);

        // Open loop: rank 1.
        let open = build_wiener(demo::g1(), demo::f1()).unwrap();
        let frfs3 = analytic_frfs(&open, &setpoints, 512, 100);
        assert_eq!(rank_feedback(&frfs3).unwrap().rank, 1);
    }
}
