//! The verdict engine: map an observed (pole class, zero class) pair to the
//! block-oriented structure families that could produce it and those that
//! provably cannot.
//!
//! The screen is one-directional: a compatible family is merely not ruled
//! out. Every verdict carries that disclaimer explicitly.

use serde::Serialize;

use crate::rootlocus::RootClass;
use crate::{Error, Result};

/// Structure families covered by the decision table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    SingleBranch,
    ParallelFf,
    FfFbParallel,
    LfrG4Zero,
    LfrG4Nonzero,
    SymmetricFffb,
    CascadeAugmented,
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Family::SingleBranch => "single_branch",
            Family::ParallelFf => "parallel_ff",
            Family::FfFbParallel => "ff_fb_parallel",
            Family::LfrG4Zero => "lfr_g4_zero",
            Family::LfrG4Nonzero => "lfr_g4_nonzero",
            Family::SymmetricFffb => "symmetric_fffb",
            Family::CascadeAugmented => "cascade_augmented",
        };
        f.write_str(s)
    }
}

/// A candidate structure with the counts that decide its locus behavior:
/// branch counts, pole/zero counts per side, nonlinearity count.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum StructureDescriptor {
    /// Cascade of linear blocks and static nonlinearities.
    SingleBranch { n_p: usize, n_z: usize, n_nl: usize },
    /// n_ff >= 2 parallel single-branch paths, no feedback.
    ParallelFf { n_ff: usize, n_pff: usize, n_zff: usize, n_nl: usize },
    /// Parallel feed-forward around parallel feedback.
    FfFbParallel {
        n_ff: usize,
        n_fb: usize,
        n_pff: usize,
        n_pfb: usize,
        n_zff: usize,
        n_zfb: usize,
        n_nl: usize,
    },
    /// One nonlinearity in a linear frame, no direct parallel path.
    LfrG4Zero { n_p_frame: usize, n_p_loop: usize },
    /// Same with a nonzero direct path.
    LfrG4Nonzero { n_p_frame: usize, n_p_loop: usize },
    /// Symmetric structure: nonlinear middle path, linear feed-forward and
    /// feedback blocks.
    SymmetricFffb { n_pff: usize, n_pfb: usize, n_nl: usize },
    /// A base structure in series with a single-branch pre/post filter that
    /// adds fixed poles and zeros.
    CascadeAugmented { base: Box<StructureDescriptor>, n_p_added: usize, n_z_added: usize },
}

impl StructureDescriptor {
    pub fn family(&self) -> Family {
        match self {
            StructureDescriptor::SingleBranch { .. } => Family::SingleBranch,
            StructureDescriptor::ParallelFf { .. } => Family::ParallelFf,
            StructureDescriptor::FfFbParallel { .. } => Family::FfFbParallel,
            StructureDescriptor::LfrG4Zero { .. } => Family::LfrG4Zero,
            StructureDescriptor::LfrG4Nonzero { .. } => Family::LfrG4Nonzero,
            StructureDescriptor::SymmetricFffb { .. } => Family::SymmetricFffb,
            StructureDescriptor::CascadeAugmented { .. } => Family::CascadeAugmented,
        }
    }
}

/// Structural laws used in verdict explanations.
mod law {
    pub const CASCADE: &str =
        "cascade law: a single-branch cascade only rescales with the setpoint; \
         every pole and zero stays in place";
    pub const PARALLEL: &str =
        "parallel law: summing feed-forward branches keeps the poles (the union \
         of branch poles) fixed while the zeros move with the branch gains";
    pub const LOOP_POLES: &str =
        "loop law (poles): with any feedback branch every closed-loop pole moves \
         with the setpoint; without feedback none do — partially moving poles are \
         impossible in this family";
    pub const LOOP_ZEROS: &str =
        "loop law (zeros): a single feed-forward branch pins all zeros (its own \
         zeros plus the feedback poles); several branches over pole-free feedback \
         move all zeros; several branches over feedback with poles mix fixed \
         feedback-pole zeros with moving ones";
    pub const FRAME_NO_DIRECT: &str =
        "frame law (no direct path): the frame blocks pin all zeros and part of \
         the poles; the loop poles move";
    pub const FRAME_DIRECT: &str =
        "frame law (direct path): the direct path makes every zero move while \
         frame poles stay fixed and loop poles move";
    pub const SYMMETRIC: &str =
        "symmetric law: feed-forward block poles stay fixed poles, feedback block \
         poles stay fixed zeros, and one moving root appears on each side";
    pub const AUGMENT: &str =
        "augmentation law: a series single-branch filter adds setpoint-independent \
         poles and zeros to the base structure";
}

fn degenerate(msg: &str) -> Error {
    Error::Config(format!("degenerate structure: {msg}"))
}

/// The (pole class, zero class) pair a structure family produces under
/// setpoint changes, assuming smooth nonlinearities and generically
/// different branches.
pub fn predict_classes(desc: &StructureDescriptor) -> Result<(RootClass, RootClass)> {
    use RootClass::*;
    match desc {
        StructureDescriptor::SingleBranch { .. } => Ok((AllFixed, AllFixed)),
        StructureDescriptor::ParallelFf { n_ff, n_pff, n_zff, n_nl } => {
            if *n_ff < 2 {
                return Err(degenerate("parallel feed-forward needs >= 2 branches"));
            }
            if *n_nl == 0 {
                return Err(degenerate("no nonlinearity: the system is linear and nothing moves"));
            }
            if n_pff + n_zff == 0 {
                return Err(degenerate(
                    "static parallel branches collapse into one gain; no zeros exist to move",
                ));
            }
            Ok((AllFixed, AllMove))
        }
        StructureDescriptor::FfFbParallel { n_ff, n_fb, n_pff, n_pfb, n_zff, n_nl, .. } => {
            if *n_ff == 0 {
                return Err(degenerate("needs at least one feed-forward branch"));
            }
            if *n_fb == 0 {
                return Err(degenerate(
                    "without feedback this is a single-branch or parallel feed-forward system",
                ));
            }
            if *n_nl == 0 {
                return Err(degenerate("no nonlinearity: the system is linear and nothing moves"));
            }
            if *n_pfb > 0 && *n_fb == 0 {
                return Err(degenerate("feedback poles require a feedback branch"));
            }
            let poles = AllMove; // n_fb >= 1
            let zeros = if *n_ff == 1 {
                AllFixed
            } else if *n_pfb == 0 {
                AllMove
            } else if n_pff + n_zff >= 1 {
                Mixed
            } else {
                return Err(degenerate(
                    "mixed zeros need at least one dynamic feed-forward branch",
                ));
            };
            Ok((poles, zeros))
        }
        StructureDescriptor::LfrG4Zero { n_p_frame, n_p_loop } => {
            if *n_p_loop == 0 {
                return Err(degenerate("the loop block must be dynamic for poles to move"));
            }
            if *n_p_frame == 0 {
                return Err(degenerate("frame poles are needed for the fixed-pole part"));
            }
            Ok((Mixed, AllFixed))
        }
        StructureDescriptor::LfrG4Nonzero { n_p_frame, n_p_loop } => {
            if *n_p_loop == 0 {
                return Err(degenerate("the loop block must be dynamic for poles to move"));
            }
            if *n_p_frame == 0 {
                return Err(degenerate("frame poles are needed for the fixed-pole part"));
            }
            Ok((Mixed, AllMove))
        }
        StructureDescriptor::SymmetricFffb { n_pff, n_pfb, n_nl } => {
            if *n_nl == 0 {
                return Err(degenerate("no nonlinearity: the system is linear and nothing moves"));
            }
            if *n_pff == 0 || *n_pfb == 0 {
                return Err(degenerate(
                    "both the feed-forward and feedback blocks must be dynamic",
                ));
            }
            Ok((Mixed, Mixed))
        }
        StructureDescriptor::CascadeAugmented { base, n_p_added, n_z_added } => {
            let (bp, bz) = predict_classes(base)?;
            if *n_p_added == 0 && *n_z_added == 0 {
                return Err(degenerate("augmentation filter adds no dynamics"));
            }
            let combine = |class: RootClass, added: usize| match (class, added) {
                (AllFixed, _) => AllFixed,
                (c, 0) => c,
                (AllMove, _) => Mixed,
                (Mixed, _) => Mixed,
            };
            Ok((combine(bp, *n_p_added), combine(bz, *n_z_added)))
        }
    }
}

/// A compatible family template with the parameter constraints that realize
/// the observed cell.
#[derive(Debug, Clone, Serialize)]
pub struct CandidateStructure {
    pub family: Family,
    pub constraints: String,
}

/// An excluded family with the structural law it would violate.
#[derive(Debug, Clone, Serialize)]
pub struct Exclusion {
    pub family: Family,
    pub rule: String,
}

/// Outcome of the table lookup for one observed class pair.
#[derive(Debug, Clone, Serialize)]
pub struct Verdict {
    pub observed: (RootClass, RootClass),
    pub compatible: Vec<CandidateStructure>,
    pub excluded: Vec<Exclusion>,
    /// Table cell id; the starred ids mark cells no feed-forward/feedback
    /// parallel structure can realize.
    pub table_cell: String,
    pub disclaimer: &'static str,
}

/// Fixed wording: the screen gives necessary conditions only.
pub const DISCLAIMER: &str =
    "necessary-condition screen only: a compatible structure is not guaranteed \
     to reproduce the observed nonlinear behavior";

/// Representative class pair of each core family (its canonical template).
fn family_classes(family: Family) -> (RootClass, RootClass) {
    use RootClass::*;
    match family {
        Family::SingleBranch => (AllFixed, AllFixed),
        Family::ParallelFf => (AllFixed, AllMove),
        Family::FfFbParallel => (AllMove, AllFixed), // varies; handled per cell
        Family::LfrG4Zero => (Mixed, AllFixed),
        Family::LfrG4Nonzero => (Mixed, AllMove),
        Family::SymmetricFffb => (Mixed, Mixed),
        Family::CascadeAugmented => (AllFixed, Mixed),
    }
}

fn exclusion_rule(family: Family) -> &'static str {
    match family {
        Family::SingleBranch => law::CASCADE,
        Family::ParallelFf => law::PARALLEL,
        Family::FfFbParallel => law::LOOP_POLES,
        Family::LfrG4Zero => law::FRAME_NO_DIRECT,
        Family::LfrG4Nonzero => law::FRAME_DIRECT,
        Family::SymmetricFffb => law::SYMMETRIC,
        Family::CascadeAugmented => law::AUGMENT,
    }
}

/// Complete table lookup: the compatible templates for the observed pair and
/// the exclusions (with the law each would violate) for everything else.
pub fn candidates(observed: (RootClass, RootClass)) -> Verdict {
    use RootClass::*;
    let mut compatible: Vec<CandidateStructure> = Vec::new();
    let push = |v: &mut Vec<CandidateStructure>, family: Family, constraints: &str| {
        v.push(CandidateStructure { family, constraints: constraints.to_string() });
    };

    let table_cell = match observed {
        (AllFixed, AllFixed) => {
            push(&mut compatible, Family::SingleBranch, "any cascade of blocks");
            "single branch"
        }
        (AllFixed, AllMove) => {
            push(
                &mut compatible,
                Family::ParallelFf,
                "n_ff >= 2 dynamic branches, no feedback poles",
            );
            "parallel FF, no poles in FB"
        }
        (AllFixed, Mixed) => {
            push(
                &mut compatible,
                Family::CascadeAugmented,
                "parallel feed-forward base in series with a single-branch filter \
                 contributing the fixed roots",
            );
            "2*"
        }
        (AllMove, AllFixed) => {
            push(
                &mut compatible,
                Family::FfFbParallel,
                "n_ff = 1, n_fb >= 1: zeros are the branch zeros plus feedback poles",
            );
            "single branch FF, poles in FB"
        }
        (AllMove, Mixed) => {
            push(
                &mut compatible,
                Family::FfFbParallel,
                "n_ff >= 2 with at least one dynamic branch, feedback with poles \
                 (n_pfb >= 1)",
            );
            "multi branch FF, poles in FB"
        }
        (AllMove, AllMove) => {
            push(
                &mut compatible,
                Family::FfFbParallel,
                "n_ff >= 2, feedback without poles (n_pfb = 0)",
            );
            "multi branch FF, no poles in FB"
        }
        (Mixed, AllFixed) => {
            push(
                &mut compatible,
                Family::LfrG4Zero,
                "dynamic loop block, dynamic frame, no direct path",
            );
            "1*"
        }
        (Mixed, AllMove) => {
            push(
                &mut compatible,
                Family::LfrG4Nonzero,
                "dynamic loop block, dynamic frame, nonzero direct path",
            );
            "4*"
        }
        (Mixed, Mixed) => {
            push(
                &mut compatible,
                Family::SymmetricFffb,
                "dynamic blocks on both the feed-forward and feedback sides",
            );
            "3*"
        }
    };

    let compat_families: Vec<Family> = compatible.iter().map(|c| c.family).collect();
    let mut excluded = Vec::new();
    for family in [
        Family::SingleBranch,
        Family::ParallelFf,
        Family::FfFbParallel,
        Family::LfrG4Zero,
        Family::LfrG4Nonzero,
        Family::SymmetricFffb,
    ] {
        if compat_families.contains(&family) {
            continue;
        }
        // The feed-forward/feedback family spans three cells; its exclusion
        // rule depends on which side disagrees.
        let rule = if family == Family::FfFbParallel {
            if observed.0 == Mixed {
                law::LOOP_POLES
            } else if observed.0 == AllFixed {
                law::LOOP_POLES
            } else {
                law::LOOP_ZEROS
            }
        } else {
            let _ = family_classes(family);
            exclusion_rule(family)
        };
        excluded.push(Exclusion { family, rule: rule.to_string() });
    }
    Verdict {
        observed,
        compatible,
        excluded,
        table_cell: table_cell.to_string(),
        disclaimer: DISCLAIMER,
    }
}

/// Check one descriptor against an observation; the explanation names the
/// deciding law.
pub fn is_consistent(
    desc: &StructureDescriptor,
    observed: (RootClass, RootClass),
) -> Result<(bool, String)> {
    let predicted = predict_classes(desc)?;
    let deciding = match desc.family() {
        Family::SingleBranch => law::CASCADE,
        Family::ParallelFf => law::PARALLEL,
        Family::FfFbParallel => {
            if predicted.0 != observed.0 {
                law::LOOP_POLES
            } else {
                law::LOOP_ZEROS
            }
        }
        Family::LfrG4Zero => law::FRAME_NO_DIRECT,
        Family::LfrG4Nonzero => law::FRAME_DIRECT,
        Family::SymmetricFffb => law::SYMMETRIC,
        Family::CascadeAugmented => law::AUGMENT,
    };
    if predicted == observed {
        Ok((true, format!("predicts {predicted:?}; {deciding}")))
    } else {
        Ok((false, format!("predicts {predicted:?}, observed {observed:?}; {deciding}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::demo;
    use crate::linearize::linearize_graph;
    use crate::rootlocus::{classify_rootsets, roots_at, ORACLE_TOL_FIXED, ORACLE_TOL_MOVE};
    use crate::systems::{
        build_ff_fb_parallel, build_lfr, build_parallel_ff, build_symmetric_fffb,
        build_wiener, wiener, BlockGraph, BranchElement, RationalTF, StaticNl,
    };
    use RootClass::*;

    fn analytic_classes(graph: &BlockGraph, setpoints: &[f64]) -> (RootClass, RootClass) {
        let rootsets: Vec<_> = setpoints
            .iter()
            .map(|&r| {
                let op = graph.solve_setpoint(r).unwrap();
                let m = linearize_graph(graph, &op).unwrap();
                roots_at(&m.tf, r)
            })
            .collect();
        let c = classify_rootsets(&rootsets, ORACLE_TOL_FIXED, ORACLE_TOL_MOVE).unwrap();
        (c.pole_class, c.zero_class)
    }

    #[test]
    fn predictions_per_family() {
        assert_eq!(
            predict_classes(&StructureDescriptor::SingleBranch { n_p: 2, n_z: 1, n_nl: 1 })
                .unwrap(),
            (AllFixed, AllFixed)
        );
        assert_eq!(
            predict_classes(&StructureDescriptor::FfFbParallel {
                n_ff: 2,
                n_fb: 1,
                n_pff: 2,
                n_pfb: 1,
                n_zff: 2,
                n_zfb: 1,
                n_nl: 3,
            })
            .unwrap(),
            (AllMove, Mixed)
        );
        assert_eq!(
            predict_classes(&StructureDescriptor::LfrG4Zero { n_p_frame: 2, n_p_loop: 1 })
                .unwrap(),
            (Mixed, AllFixed)
        );
        assert_eq!(
            predict_classes(&StructureDescriptor::SymmetricFffb {
                n_pff: 1,
                n_pfb: 1,
                n_nl: 1
            })
            .unwrap(),
            (Mixed, Mixed)
        );
    }

    #[test]
    fn degenerate_descriptors_rejected() {
        // A theorem-level requirement: mixed zeros need a dynamic FF branch.
        assert!(predict_classes(&StructureDescriptor::FfFbParallel {
            n_ff: 2,
            n_fb: 1,
            n_pff: 0,
            n_pfb: 1,
            n_zff: 0,
            n_zfb: 0,
            n_nl: 2,
        })
        .is_err());
        assert!(predict_classes(&StructureDescriptor::ParallelFf {
            n_ff: 1,
            n_pff: 1,
            n_zff: 0,
            n_nl: 1
        })
        .is_err());
        assert!(
            predict_classes(&StructureDescriptor::LfrG4Zero { n_p_frame: 2, n_p_loop: 0 })
                .is_err()
        );
    }

    #[test]
    fn verdict_for_demo_observation() {
        let v = candidates((AllMove, Mixed));
        assert_eq!(v.table_cell, "multi branch FF, poles in FB");
        assert!(v.compatible.iter().any(|c| c.family == Family::FfFbParallel));
        assert!(v.excluded.iter().any(|e| e.family == Family::SingleBranch));
        assert!(v.excluded.iter().any(|e| e.family == Family::ParallelFf));
        assert!(!v.disclaimer.is_empty());
    }

    #[test]
    fn verdict_for_all_fixed() {
        let v = candidates((AllFixed, AllFixed));
        assert_eq!(v.compatible.len(), 1);
        assert_eq!(v.compatible[0].family, Family::SingleBranch);
        for fam in [
            Family::FfFbParallel,
            Family::LfrG4Zero,
            Family::LfrG4Nonzero,
            Family::SymmetricFffb,
        ] {
            assert!(v.excluded.iter().any(|e| e.family == fam), "{fam} not excluded");
        }
    }

    #[test]
    fn verdict_for_mixed_mixed_offers_symmetric() {
        let v = candidates((Mixed, Mixed));
        assert_eq!(v.table_cell, "3*");
        assert!(v.compatible.iter().any(|c| c.family == Family::SymmetricFffb));
    }

    #[test]
    fn starred_cell_without_core_family_offers_cascade() {
        let v = candidates((AllFixed, Mixed));
        assert_eq!(v.table_cell, "2*");
        assert_eq!(v.compatible.len(), 1);
        assert_eq!(v.compatible[0].family, Family::CascadeAugmented);
    }

    #[test]
    fn table_is_total_and_partitions_families() {
        let classes = [AllFixed, Mixed, AllMove];
        for &p in &classes {
            for &z in &classes {
                let v = candidates((p, z));
                assert!(!v.compatible.is_empty(), "({p:?},{z:?}) has no candidates");
                let core = [
                    Family::SingleBranch,
                    Family::ParallelFf,
                    Family::FfFbParallel,
                    Family::LfrG4Zero,
                    Family::LfrG4Nonzero,
                    Family::SymmetricFffb,
                ];
                for fam in core {
                    let in_compat = v.compatible.iter().any(|c| c.family == fam);
                    let in_excl = v.excluded.iter().any(|e| e.family == fam);
                    assert!(
                        in_compat ^ in_excl,
                        "({p:?},{z:?}): {fam} in compatible={in_compat}, excluded={in_excl}"
                    );
                }
            }
        }
    }

    #[test]
    fn consistency_explanations() {
        let sb = StructureDescriptor::SingleBranch { n_p: 1, n_z: 1, n_nl: 1 };
        let (ok, why) = is_consistent(&sb, (AllFixed, AllMove)).unwrap();
        assert!(!ok);
        assert!(why.contains("cascade law"), "{why}");

        let fffb = StructureDescriptor::FfFbParallel {
            n_ff: 1,
            n_fb: 1,
            n_pff: 1,
            n_pfb: 1,
            n_zff: 1,
            n_zfb: 0,
            n_nl: 1,
        };
        let (ok, _) = is_consistent(&fffb, (AllMove, AllFixed)).unwrap();
        assert!(ok);

        let lfr = StructureDescriptor::LfrG4Nonzero { n_p_frame: 2, n_p_loop: 1 };
        let (ok, _) = is_consistent(&lfr, (Mixed, AllMove)).unwrap();
        assert!(ok);
    }

    #[test]
    fn soundness_on_generated_systems() {
        // For concrete members of each family, the analytically observed
        // classes must keep the generating family among the candidates.
        let delay_gain = RationalTF::pure_delay(1);
        let cases: Vec<(Family, BlockGraph)> = vec![
            (Family::SingleBranch, build_wiener(demo::g1(), demo::f1()).unwrap()),
            (
                Family::ParallelFf,
                build_parallel_ff(vec![
                    wiener(demo::g1(), demo::f1()),
                    wiener(demo::g2(), demo::f2()),
                ])
                .unwrap(),
            ),
            (Family::FfFbParallel, demo::demo_graph()),
            (
                Family::FfFbParallel,
                build_ff_fb_parallel(
                    vec![wiener(demo::g1(), demo::f1())],
                    vec![wiener(demo::g3(), demo::f3())],
                )
                .unwrap(),
            ),
            (
                Family::FfFbParallel,
                // Static (pole-free) feedback: a delayed nonlinear gain.
                build_ff_fb_parallel(
                    vec![wiener(demo::g1(), demo::f1()), wiener(demo::g2(), demo::f2())],
                    vec![vec![
                        BranchElement::Linear(delay_gain.clone()),
                        BranchElement::Nonlinear(
                            StaticNl::polynomial(vec![0.0, 0.4, 0.1, 0.1]).unwrap(),
                        ),
                    ]],
                )
                .unwrap(),
            ),
            (
                Family::LfrG4Zero,
                build_lfr(demo::g1(), demo::g2(), demo::g3(), None, demo::f1()).unwrap(),
            ),
            (
                Family::LfrG4Nonzero,
                build_lfr(
                    demo::g1(),
                    demo::g2(),
                    demo::g3(),
                    Some(RationalTF::new(vec![0.3, 0.1], vec![1.0, -0.5], 0).unwrap()),
                    demo::f1(),
                )
                .unwrap(),
            ),
            (
                Family::SymmetricFffb,
                build_symmetric_fffb(demo::g1(), demo::g3(), demo::f2()).unwrap(),
            ),
        ];
        let setpoints: Vec<f64> = (0..6).map(|k| 0.05 + 0.15 * k as f64).collect();
        for (family, graph) in cases {
            let observed = analytic_classes(&graph, &setpoints);
            let v = candidates(observed);
            assert!(
                v.compatible.iter().any(|c| c.family == family),
                "{family} not in candidates for its own observation {observed:?}"
            );
        }
    }
}
