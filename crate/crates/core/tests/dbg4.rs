use blalocus::config::ExperimentConfig;
use blalocus::estimate::{bla_at_setpoint, fit_rational};
use blalocus::linearize::linearize_graph;

#[test]
fn dbg_frf_error_vs_fit_error() {
    let text = std::fs::read_to_string("/tmp/v.toml").unwrap();
    let cfg = ExperimentConfig::parse(&text, false).unwrap();
    let graph = cfg.graph().unwrap();
    let protocol = cfg.protocol().unwrap();
    for (i, r) in [(3usize, 0.3f64), (4, 0.4), (5, 0.5)] {
        let sp = bla_at_setpoint(&graph, i, r, &protocol).unwrap();
        let op = graph.solve_setpoint(r).unwrap();
        let oracle = linearize_graph(&graph, &op).unwrap();
        let mut max_rel = 0.0f64;
        let mut sum_rel = 0.0f64;
        for (bi, &k) in sp.frf.bins.iter().enumerate() {
            let truth = oracle.tf.response_at(k as f64 / sp.frf.period as f64);
            let rel = (sp.frf.g_hat[bi] - truth).norm() / truth.norm();
            max_rel = max_rel.max(rel);
            sum_rel += rel;
        }
        // variance stats
        let var = sp.frf.var_g.as_ref().unwrap();
        let mut v: Vec<f64> = var.clone(); v.sort_by(|a,b| a.partial_cmp(b).unwrap());
        let med = v[v.len()/2]; let vmin = v[0];
        println!("r={r}: FRF rel err mean={:.2e} max={:.2e}; var med={:.2e} min={:.2e} ratio={:.1e}",
            sum_rel / sp.frf.bins.len() as f64, max_rel, med, vmin, med/vmin.max(1e-300));
        // fit with weights (as pipeline) vs unweighted
        let fit_w = fit_rational(&sp.frf, 3, 4, 0).unwrap();
        let mut frf_nw = sp.frf.clone();
        frf_nw.var_g = None;
        let fit_nw = fit_rational(&frf_nw, 3, 4, 0).unwrap();
        let z_of = |m: &blalocus::systems::RationalTF| {
            let mut zs = m.zeros();
            zs.sort_by(|a,b| (a.re-0.72).abs().partial_cmp(&(b.re-0.72).abs()).unwrap());
            zs[0]
        };
        println!("   weighted:  zero72={:.4}{:+.4}i  iters={} conv={}", z_of(&fit_w.model).re, z_of(&fit_w.model).im, fit_w.iterations, fit_w.converged);
        println!("   unweighted: zero72={:.4}{:+.4}i  iters={} conv={}", z_of(&fit_nw.model).re, z_of(&fit_nw.model).im, fit_nw.iterations, fit_nw.converged);
    }
}
