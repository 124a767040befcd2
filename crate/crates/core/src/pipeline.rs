//! End-to-end experiment pipeline: solve setpoints, simulate, estimate,
//! fit, track roots, classify and judge — plus the analytic-oracle and
//! rank-probe variants. Produces the report and the machine-readable
//! CSV/JSON output files.

use std::io::Write;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::discriminate::{candidates, Verdict};
use crate::estimate::{bla_at_setpoint, order_scan, FrfEstimate, OrderScan, SetpointBla};
use crate::linearize::{linearize_graph, LinearizedModel};
use crate::rootlocus::{
    classify_rootsets, rank_branches, rank_feedback, roots_at, LocusClassification, RankReport,
    RootSet,
};
use crate::{Error, Result};

/// Execution options supplied by the CLI.
#[derive(Debug, Clone)]
pub struct RunOptions {
    pub out_dir: PathBuf,
    /// Concurrent setpoint workers (1 = sequential).
    pub jobs: usize,
    pub seed_override: Option<u64>,
    pub eps_override: Option<f64>,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { out_dir: PathBuf::from("."), jobs: 1, seed_override: None, eps_override: None }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Provenance {
    pub config_hash: String,
    pub seed: u64,
    pub version: &'static str,
}

#[derive(Debug, Clone, Serialize)]
pub struct SetpointReport {
    pub index: usize,
    pub r_dc: f64,
    pub y_dc: f64,
    pub dc_residual: f64,
    pub fit_num: Vec<f64>,
    pub fit_den: Vec<f64>,
    pub fit_delay: usize,
    pub fit_residual: f64,
    pub fit_iterations: usize,
    pub fit_converged: bool,
    pub poles: Vec<[f64; 2]>,
    pub zeros: Vec<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub order_scan: Option<OrderScan>,
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleSetpoint {
    pub index: usize,
    pub r_dc: f64,
    pub num: Vec<f64>,
    pub den: Vec<f64>,
    pub poles: Vec<[f64; 2]>,
    pub zeros: Vec<[f64; 2]>,
    pub ff_gains: Vec<f64>,
    pub fb_gains: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleSection {
    pub loci: Vec<OracleSetpoint>,
    pub classification: LocusClassification,
    pub verdict: Verdict,
    /// Per setpoint: worst fitted-vs-analytic root distance (when fitted
    /// models exist).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub root_errors: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_root_error: Option<f64>,
}

/// The full experiment report; serialization of this struct is `report.json`.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub provenance: Provenance,
    pub setpoints: Vec<SetpointReport>,
    pub classification: LocusClassification,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle_error: Option<String>,
}

fn apply_overrides(config: &ExperimentConfig, opts: &RunOptions) -> ExperimentConfig {
    let mut cfg = config.clone();
    if let Some(seed) = opts.seed_override {
        cfg.seed = seed;
    }
    if let Some(eps) = opts.eps_override {
        cfg.excitation.eps = eps;
    }
    cfg
}

fn roots_to_pairs(roots: &[Complex64]) -> Vec<[f64; 2]> {
    roots.iter().map(|r| [r.re, r.im]).collect()
}

/// Greedy minimal-distance pairing between two root multisets; returns the
/// worst matched distance (or the size mismatch as infinity).
pub fn max_root_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
    for (i, ra) in a.iter().enumerate() {
        for (j, rb) in b.iter().enumerate() {
            pairs.push(((ra - rb).norm(), i, j));
        }
    }
    pairs.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap_or(std::cmp::Ordering::Equal));
    let mut used_a = vec![false; a.len()];
    let mut used_b = vec![false; b.len()];
    let mut worst = 0.0f64;
    for (d, i, j) in pairs {
        if used_a[i] || used_b[j] {
            continue;
        }
        used_a[i] = true;
        used_b[j] = true;
        worst = worst.max(d);
    }
    worst
}

/// Run per-setpoint estimation, optionally across worker threads. Results
/// are merged by setpoint index, so the outcome is order-independent.
fn sweep(
    config: &ExperimentConfig,
    setpoints: &[f64],
    jobs: usize,
) -> Result<Vec<SetpointBla>> {
    let graph = config.graph()?;
    let protocol = config.protocol()?;
    if jobs <= 1 || setpoints.len() <= 1 {
        return setpoints
            .iter()
            .enumerate()
            .map(|(i, &r)| bla_at_setpoint(&graph, i, r, &protocol))
            .collect();
    }
    let jobs = jobs.min(setpoints.len());
    let mut slots: Vec<Option<Result<SetpointBla>>> = Vec::new();
    slots.resize_with(setpoints.len(), || None);
    let slot_refs = std::sync::Mutex::new(&mut slots);
    std::thread::scope(|scope| {
        for worker in 0..jobs {
            let graph = &graph;
            let protocol = &protocol;
            let slot_refs = &slot_refs;
            scope.spawn(move || {
                for (i, &r) in setpoints.iter().enumerate().skip(worker).step_by(jobs) {
                    let out = bla_at_setpoint(graph, i, r, protocol);
                    slot_refs.lock().unwrap()[i] = Some(out);
                }
            });
        }
    });
    slots
        .into_iter()
        .map(|s| s.expect("every setpoint slot filled"))
        .collect()
}

/// Analytic loci for every setpoint.
fn oracle_models(
    config: &ExperimentConfig,
    setpoints: &[f64],
) -> Result<Vec<LinearizedModel>> {
    let graph = config.graph()?;
    setpoints
        .iter()
        .enumerate()
        .map(|(i, &r)| {
            let op = graph.solve_setpoint(r).map_err(|e| e.at_setpoint(i, r))?;
            linearize_graph(&graph, &op).map_err(|e| e.at_setpoint(i, r))
        })
        .collect()
}

fn oracle_section(
    config: &ExperimentConfig,
    setpoints: &[f64],
    fitted: Option<&[SetpointBla]>,
) -> Result<OracleSection> {
    let models = oracle_models(config, setpoints)?;
    let rootsets: Vec<RootSet> = models
        .iter()
        .zip(setpoints)
        .map(|(m, &r)| roots_at(&m.tf, r))
        .collect();
    let classification = classify_rootsets(
        &rootsets,
        config.classify.oracle_tol_fixed,
        config.classify.oracle_tol_move,
    )?;
    let verdict = candidates((classification.pole_class, classification.zero_class));
    let loci = models
        .iter()
        .enumerate()
        .map(|(i, m)| OracleSetpoint {
            index: i,
            r_dc: setpoints[i],
            num: m.tf.num.clone(),
            den: m.tf.den.clone(),
            poles: roots_to_pairs(&m.tf.poles()),
            zeros: roots_to_pairs(&m.tf.zeros()),
            ff_gains: m.ff_gains.clone(),
            fb_gains: m.fb_gains.clone(),
        })
        .collect();
    let root_errors = fitted.map(|fits| {
        fits.iter()
            .zip(&models)
            .map(|(f, m)| {
                let dp = max_root_distance(&f.fit.model.poles(), &m.tf.poles());
                let dz = max_root_distance(&f.fit.model.zeros(), &m.tf.zeros());
                dp.max(dz)
            })
            .collect::<Vec<f64>>()
    });
    let max_root_error =
        root_errors.as_ref().map(|e| e.iter().fold(0.0f64, |m, &v| m.max(v)));
    Ok(OracleSection { loci, classification, verdict, root_errors, max_root_error })
}

/// Full pipeline: sweep, fit, track, classify, judge; returns the report.
pub fn run(config: &ExperimentConfig, opts: &RunOptions) -> Result<Report> {
    let cfg = apply_overrides(config, opts);
    cfg.validate()?;
    let setpoints = cfg.setpoint_values();
    let results = sweep(&cfg, &setpoints, opts.jobs)?;

    let rootsets: Vec<RootSet> = results
        .iter()
        .zip(&setpoints)
        .map(|(s, &r)| roots_at(&s.fit.model, r))
        .collect();
    let classification =
        classify_rootsets(&rootsets, cfg.classify.tol_fixed, cfg.classify.tol_move)?;
    let verdict = candidates((classification.pole_class, classification.zero_class));

    let mut setpoint_reports = Vec::with_capacity(results.len());
    for (i, s) in results.iter().enumerate() {
        let scan = if cfg.fit.order_scan {
            Some(order_scan(&s.frf, cfg.fit.nb, cfg.fit.na, cfg.fit.delay)?)
        } else {
            None
        };
        setpoint_reports.push(SetpointReport {
            index: i,
            r_dc: setpoints[i],
            y_dc: s.op.y_dc,
            dc_residual: s.op.residual,
            fit_num: s.fit.model.num.clone(),
            fit_den: s.fit.model.den.clone(),
            fit_delay: s.fit.model.delay,
            fit_residual: s.fit.residual,
            fit_iterations: s.fit.iterations,
            fit_converged: s.fit.converged,
            poles: roots_to_pairs(&s.fit.model.poles()),
            zeros: roots_to_pairs(&s.fit.model.zeros()),
            order_scan: scan,
        });
    }

    let (oracle, oracle_error) = match oracle_section(&cfg, &setpoints, Some(&results)) {
        Ok(section) => (Some(section), None),
        Err(e) => (None, Some(e.to_string())),
    };

    let report = Report {
        provenance: Provenance {
            config_hash: cfg.canonical_hash(),
            seed: cfg.seed,
            version: env!("CARGO_PKG_VERSION"),
        },
        setpoints: setpoint_reports,
        classification,
        verdict,
        oracle,
        oracle_error,
    };
    write_run_outputs(&cfg, &report, &results, &opts.out_dir)?;
    Ok(report)
}

/// Analytic loci only (no simulation); writes `oracle_loci.csv`.
pub fn oracle(config: &ExperimentConfig, opts: &RunOptions) -> Result<OracleSection> {
    let cfg = apply_overrides(config, opts);
    cfg.validate()?;
    let setpoints = cfg.setpoint_values();
    let section = oracle_section(&cfg, &setpoints, None)?;
    std::fs::create_dir_all(&opts.out_dir)?;
    let mut f = std::fs::File::create(opts.out_dir.join("oracle_loci.csv"))?;
    write_loci_csv(&mut f, &section.classification, &setpoints)?;
    let mut j = std::fs::File::create(opts.out_dir.join("oracle.json"))?;
    serde_json::to_writer_pretty(&mut j, &section)
        .map_err(|e| Error::Io(std::io::Error::other(e)))?;
    j.write_all(b"\n")?;
    Ok(section)
}

/// Branch-count report of both rank probes.
#[derive(Debug, Clone, Serialize)]
pub struct RankOutput {
    pub branch: RankReport,
    /// Element-wise-inverse probe; `None` with the reason when the FRF
    /// cannot be inverted.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub feedback: Option<RankReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub feedback_error: Option<String>,
}

/// Run the estimation sweep and both rank tests; writes `rank.json`.
pub fn rank(config: &ExperimentConfig, opts: &RunOptions) -> Result<RankOutput> {
    let cfg = apply_overrides(config, opts);
    cfg.validate()?;
    let setpoints = cfg.setpoint_values();
    let results = sweep(&cfg, &setpoints, opts.jobs)?;
    let frfs: Vec<FrfEstimate> = results.into_iter().map(|s| s.frf).collect();
    let branch = rank_branches(&frfs)?;
    let (feedback, feedback_error) = match rank_feedback(&frfs) {
        Ok(r) => (Some(r), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let out = RankOutput { branch, feedback, feedback_error };
    std::fs::create_dir_all(&opts.out_dir)?;
    let mut j = std::fs::File::create(opts.out_dir.join("rank.json"))?;
    serde_json::to_writer_pretty(&mut j, &out).map_err(|e| Error::Io(std::io::Error::other(e)))?;
    j.write_all(b"\n")?;
    Ok(out)
}

// ---------------------------------------------------------------------------
// Output files
// ---------------------------------------------------------------------------

fn write_run_outputs(
    cfg: &ExperimentConfig,
    report: &Report,
    results: &[SetpointBla],
    out_dir: &Path,
) -> Result<()> {
    std::fs::create_dir_all(out_dir)?;

    let mut f = std::fs::File::create(out_dir.join("report.json"))?;
    serde_json::to_writer_pretty(&mut f, report)
        .map_err(|e| Error::Io(std::io::Error::other(e)))?;
    f.write_all(b"\n")?;

    let setpoints = cfg.setpoint_values();
    let mut f = std::fs::File::create(out_dir.join("loci.csv"))?;
    write_loci_csv(&mut f, &report.classification, &setpoints)?;

    let mut f = std::fs::File::create(out_dir.join("frf.csv"))?;
    writeln!(f, "setpoint_index,r_dc,bin,frequency,re_g,im_g,var_g")?;
    for (i, s) in results.iter().enumerate() {
        for (bi, &bin) in s.frf.bins.iter().enumerate() {
            let var = s.frf.var_g.as_ref().map(|v| v[bi]);
            let g = s.frf.g_hat[bi];
            match var {
                Some(v) => writeln!(
                    f,
                    "{i},{:.16e},{bin},{:.16e},{:.16e},{:.16e},{:.16e}",
                    setpoints[i],
                    s.frf.frequency(bi),
                    g.re,
                    g.im,
                    v
                )?,
                None => writeln!(
                    f,
                    "{i},{:.16e},{bin},{:.16e},{:.16e},{:.16e},",
                    setpoints[i],
                    s.frf.frequency(bi),
                    g.re,
                    g.im
                )?,
            }
        }
    }
    Ok(())
}

/// Long-form loci table, one row per (track, setpoint) with a gnuplot recipe
/// in the header comment.
pub fn write_loci_csv<W: Write>(
    w: &mut W,
    classification: &LocusClassification,
    setpoints: &[f64],
) -> Result<()> {
    writeln!(w, "# root loci across setpoints; re/im are z-plane coordinates")?;
    writeln!(
        w,
        "# gnuplot: plot '< grep pole loci.csv' u 4:5 w p pt 2, '< grep zero loci.csv' u 4:5 w p pt 6"
    )?;
    writeln!(w, "setpoint,kind,track_id,re,im,dispersion,label")?;
    for (tid, t) in classification.tracks.iter().enumerate() {
        let kind = match t.kind {
            crate::rootlocus::RootKind::Pole => "pole",
            crate::rootlocus::RootKind::Zero => "zero",
        };
        let label = match t.label {
            crate::rootlocus::TrackLabel::Fixed => "fixed",
            crate::rootlocus::TrackLabel::Moving => "moving",
            crate::rootlocus::TrackLabel::Ambiguous => "ambiguous",
        };
        for (si, point) in t.points.iter().enumerate() {
            if let Some(p) = point {
                writeln!(
                    w,
                    "{:.16e},{kind},{tid},{:.16e},{:.16e},{:.16e},{label}",
                    setpoints[si], p.re, p.im, t.dispersion
                )?;
            }
        }
    }
    Ok(())
}
