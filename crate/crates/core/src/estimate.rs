//! Empirical best-linear-approximation machinery: nonparametric FRF
//! estimation over realizations, the static cross-moment gain, and
//! weighted rational fitting of the averaged FRF.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::dft;
use crate::signals::{
    generate_gaussian, generate_multisine, scale_to_class, MultisineSpec, PhaseLaw,
    PowerSpectrum, Signal, SignalClass,
};
use crate::systems::{BlockGraph, OperatingPoint, RationalTF};
use crate::{Error, Result};

/// Nonparametric FRF estimate at excited bins, averaged over realizations.
#[derive(Debug, Clone, Serialize)]
pub struct FrfEstimate {
    /// Record length the bins refer to (f_k = k / period).
    pub period: usize,
    pub bins: Vec<usize>,
    /// Mean of Y(k)/U(k) over realizations.
    pub g_hat: Vec<Complex64>,
    /// Per-bin sample variance across realizations (needs >= 2 records).
    pub var_g: Option<Vec<f64>>,
    /// Non-coherent output power proxy: var_g(k) · mean|U(k)|².
    pub y_s_level: Option<Vec<f64>>,
    /// Realization count.
    pub m: usize,
}

impl FrfEstimate {
    pub fn frequency(&self, idx: usize) -> f64 {
        self.bins[idx] as f64 / self.period as f64
    }

    /// Build an estimate directly from an analytic model (no variance).
    pub fn from_model(tf: &RationalTF, period: usize, bins: &[usize]) -> FrfEstimate {
        let g_hat = bins.iter().map(|&k| tf.response_at(k as f64 / period as f64)).collect();
        FrfEstimate {
            period,
            bins: bins.to_vec(),
            g_hat,
            var_g: None,
            y_s_level: None,
            m: 1,
        }
    }
}

/// Estimate the FRF from (input, output) record pairs.
///
/// Records must be periodic with a common length; DC (the sample mean) is
/// removed from each record before transforming. Per realization the ratio
/// Y(k)/U(k) is formed at each requested bin; the estimate is the mean and
/// the variance across realizations is the stochastic-distortion level.
pub fn estimate_frf(records: &[(Signal, Signal)], bins: &[usize]) -> Result<FrfEstimate> {
    let Some((first_u, _)) = records.first() else {
        return Err(Error::Estimation("no records".into()));
    };
    let n = first_u.samples.len();
    if bins.is_empty() {
        return Err(Error::Estimation("no bins requested".into()));
    }
    if bins.iter().any(|&k| k == 0 || k >= n / 2) {
        return Err(Error::Estimation(format!("bins must lie in 1..{}", n / 2)));
    }
    let mut per_rec: Vec<Vec<Complex64>> = Vec::with_capacity(records.len());
    let mut u_pow = vec![0.0f64; bins.len()];
    for (ri, (u, y)) in records.iter().enumerate() {
        if u.samples.len() != n || y.samples.len() != n {
            return Err(Error::Estimation(format!(
                "record {ri} length differs from {n}"
            )));
        }
        let demean = |s: &Signal| -> Vec<f64> {
            let mean = s.samples.iter().sum::<f64>() / n as f64;
            s.samples.iter().map(|&v| v - mean).collect()
        };
        let uc = dft::coefficients(&demean(u));
        let yc = dft::coefficients(&demean(y));
        let mut g = Vec::with_capacity(bins.len());
        for (bi, &k) in bins.iter().enumerate() {
            if uc[k].norm() < 1e-12 {
                return Err(Error::Estimation(format!(
                    "input spectrum below 1e-12 at requested bin {k} (record {ri})"
                )));
            }
            u_pow[bi] += uc[k].norm_sqr() / records.len() as f64;
            g.push(yc[k] / uc[k]);
        }
        per_rec.push(g);
    }
    let m = per_rec.len();
    let g_hat: Vec<Complex64> = (0..bins.len())
        .map(|bi| per_rec.iter().map(|g| g[bi]).sum::<Complex64>() / m as f64)
        .collect();
    let (var_g, y_s_level) = if m >= 2 {
        let var: Vec<f64> = (0..bins.len())
            .map(|bi| {
                per_rec.iter().map(|g| (g[bi] - g_hat[bi]).norm_sqr()).sum::<f64>()
                    / (m - 1) as f64
            })
            .collect();
        let ys = var.iter().zip(&u_pow).map(|(v, p)| v * p).collect();
        (Some(var), Some(ys))
    } else {
        (None, None)
    };
    Ok(FrfEstimate { period: n, bins: bins.to_vec(), g_hat, var_g, y_s_level, m })
}

/// Static best-linear gain: the cross-moment ratio E{y·u}/E{u²} with sample
/// means removed from both records.
pub fn bussgang_gain(u: &Signal, y: &Signal) -> Result<f64> {
    if u.samples.len() != y.samples.len() || u.samples.is_empty() {
        return Err(Error::Estimation("records empty or of different length".into()));
    }
    let n = u.samples.len() as f64;
    let um = u.samples.iter().sum::<f64>() / n;
    let ym = y.samples.iter().sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for (&us, &ys) in u.samples.iter().zip(&y.samples) {
        num += (ys - ym) * (us - um);
        den += (us - um) * (us - um);
    }
    if den < 1e-300 {
        return Err(Error::Estimation("zero AC input power".into()));
    }
    Ok(num / den)
}

/// Result of a rational-model fit.
#[derive(Debug, Clone, Serialize)]
pub struct FitResult {
    pub model: RationalTF,
    /// Weighted squared error at the last iterate.
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
}

fn unit_circle(k: usize, n: usize) -> Complex64 {
    Complex64::from_polar(1.0, std::f64::consts::TAU * k as f64 / n as f64)
}

fn eval_poly_zinv(coeffs: &[f64], zinv: Complex64) -> Complex64 {
    coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * zinv + c)
}

struct FitProblem {
    zinv: Vec<Complex64>,
    g: Vec<Complex64>,
    sqrt_w: Vec<f64>,
    nb: usize,
    na: usize,
    delay: usize,
}

impl FitProblem {
    fn params(&self) -> usize {
        self.nb + 1 + self.na
    }

    fn split(&self, theta: &DVector<f64>) -> (Vec<f64>, Vec<f64>) {
        let b = theta.iter().take(self.nb + 1).copied().collect();
        let mut a = vec![1.0];
        a.extend(theta.iter().skip(self.nb + 1).copied());
        (b, a)
    }

    /// Weighted residual vector of the true error G − B z^{-d} / A.
    fn residual(&self, b: &[f64], a: &[f64]) -> Result<DVector<f64>> {
        let mut r = DVector::zeros(2 * self.g.len());
        for (i, (&zi, &gk)) in self.zinv.iter().zip(&self.g).enumerate() {
            let av = eval_poly_zinv(a, zi);
            if av.norm() < 1e-12 {
                return Err(Error::Fit("denominator vanishes on the unit circle".into()));
            }
            let model = eval_poly_zinv(b, zi) * zi.powi(self.delay as i32) / av;
            let e = (gk - model) * self.sqrt_w[i];
            r[2 * i] = e.re;
            r[2 * i + 1] = e.im;
        }
        Ok(r)
    }

    /// Jacobian of the weighted residual w.r.t. [b0..b_nb, a1..a_na].
    fn jacobian(&self, b: &[f64], a: &[f64]) -> DMatrix<f64> {
        let p = self.params();
        let mut j = DMatrix::zeros(2 * self.g.len(), p);
        for (i, &zi) in self.zinv.iter().enumerate() {
            let av = eval_poly_zinv(a, zi);
            let bv = eval_poly_zinv(b, zi) * zi.powi(self.delay as i32);
            let w = self.sqrt_w[i];
            for col in 0..=self.nb {
                let d = -zi.powi((col + self.delay) as i32) / av * w;
                j[(2 * i, col)] = d.re;
                j[(2 * i + 1, col)] = d.im;
            }
            for col in 1..=self.na {
                let d = bv * zi.powi(col as i32) / (av * av) * w;
                j[(2 * i, self.nb + col)] = d.re;
                j[(2 * i + 1, self.nb + col)] = d.im;
            }
        }
        j
    }
}

/// Fit `B(z⁻¹)·z^(-delay) / A(z⁻¹)` to an FRF estimate by weighted least
/// squares: iterative denominator re-linearization to get close, then damped
/// Gauss-Newton on the true residual. Weights are 1/max(var_G, floor); bins
/// with unavailable variance weigh equally.
pub fn fit_rational(frf: &FrfEstimate, nb: usize, na: usize, delay: usize) -> Result<FitResult> {
    let k = frf.bins.len();
    if k < nb + na + 1 {
        return Err(Error::Fit(format!(
            "{k} bins cannot identify nb={nb}, na={na} (need >= {})",
            nb + na + 1
        )));
    }
    if frf.g_hat.iter().any(|g| !g.re.is_finite() || !g.im.is_finite()) {
        return Err(Error::Fit("FRF contains non-finite values".into()));
    }
    let g_max_sq = frf.g_hat.iter().map(|g| g.norm_sqr()).fold(0.0f64, f64::max);
    let floor = 1e-12 * g_max_sq.max(1e-300);
    let sqrt_w: Vec<f64> = match &frf.var_g {
        Some(var) => var.iter().map(|&v| (1.0 / v.max(floor)).sqrt()).collect(),
        None => vec![1.0; k],
    };
    let prob = FitProblem {
        zinv: frf
            .bins
            .iter()
            .map(|&b| Complex64::new(1.0, 0.0) / unit_circle(b, frf.period))
            .collect(),
        g: frf.g_hat.clone(),
        sqrt_w,
        nb,
        na,
        delay,
    };
    let p = prob.params();

    // Denominator-relinearized weighted linear least squares:
    // minimize Σ w_k |A(z_k)G_k − B(z_k)z^{-d}|² / |A_prev(z_k)|².
    let mut a_prev = vec![1.0];
    let mut theta = DVector::zeros(p);
    let mut iterations = 0usize;
    for _ in 0..20 {
        let mut mat = DMatrix::zeros(2 * k, p);
        let mut rhs = DVector::zeros(2 * k);
        for (i, (&zi, &gk)) in prob.zinv.iter().zip(&prob.g).enumerate() {
            let scale = prob.sqrt_w[i] / eval_poly_zinv(&a_prev, zi).norm().max(1e-12);
            for col in 0..=nb {
                let v = zi.powi((col + delay) as i32) * scale;
                mat[(2 * i, col)] = v.re;
                mat[(2 * i + 1, col)] = v.im;
            }
            for col in 1..=na {
                let v = -gk * zi.powi(col as i32) * scale;
                mat[(2 * i, nb + col)] = v.re;
                mat[(2 * i + 1, nb + col)] = v.im;
            }
            let r = gk * scale;
            rhs[2 * i] = r.re;
            rhs[2 * i + 1] = r.im;
        }
        let svd = mat.svd(true, true);
        let s1 = svd.singular_values[0];
        let rank = svd.singular_values.iter().filter(|&&s| s > 1e-12 * s1).count();
        if rank < p {
            return Err(Error::Fit(format!(
                "rank-deficient normal equations (rank {rank} of {p}): order too high \
                 for the excited bins"
            )));
        }
        let sol = svd
            .solve(&rhs, 1e-12 * s1)
            .map_err(|e| Error::Fit(format!("least-squares solve failed: {e}")))?;
        iterations += 1;
        let delta = (&sol - &theta).norm();
        let scale = sol.norm().max(1e-300);
        theta = sol;
        let (_, a) = prob.split(&theta);
        a_prev = a;
        if delta / scale < 1e-12 {
            break;
        }
    }

    refine(&prob, theta, iterations)
}

/// Refine an existing model against an FRF estimate by damped Gauss-Newton
/// only (no re-linearization phase). Orders and delay come from the model.
pub fn fit_rational_from(frf: &FrfEstimate, initial: &RationalTF) -> Result<FitResult> {
    let nb = initial.num.len() - 1;
    let na = initial.den.len() - 1;
    let k = frf.bins.len();
    if k < nb + na + 1 {
        return Err(Error::Fit(format!(
            "{k} bins cannot identify nb={nb}, na={na} (need >= {})",
            nb + na + 1
        )));
    }
    let g_max_sq = frf.g_hat.iter().map(|g| g.norm_sqr()).fold(0.0f64, f64::max);
    let floor = 1e-12 * g_max_sq.max(1e-300);
    let sqrt_w: Vec<f64> = match &frf.var_g {
        Some(var) => var.iter().map(|&v| (1.0 / v.max(floor)).sqrt()).collect(),
        None => vec![1.0; k],
    };
    let prob = FitProblem {
        zinv: frf
            .bins
            .iter()
            .map(|&b| Complex64::new(1.0, 0.0) / unit_circle(b, frf.period))
            .collect(),
        g: frf.g_hat.clone(),
        sqrt_w,
        nb,
        na,
        delay: initial.delay,
    };
    let mut theta = DVector::zeros(prob.params());
    for (i, &b) in initial.num.iter().enumerate() {
        theta[i] = b;
    }
    for (j, &a) in initial.den.iter().enumerate().skip(1) {
        theta[nb + j] = a;
    }
    refine(&prob, theta, 0)
}

/// Damped Gauss-Newton on the true weighted residual.
fn refine(prob: &FitProblem, mut theta: DVector<f64>, mut iterations: usize) -> Result<FitResult> {
    let p = prob.params();
    let (mut b, mut a) = prob.split(&theta);
    let mut r = prob.residual(&b, &a)?;
    let mut cost = r.norm_squared();
    let mut lambda = 1e-6;
    let mut converged = false;
    while iterations < 100 {
        iterations += 1;
        let j = prob.jacobian(&b, &a);
        let jtj = j.transpose() * &j;
        let jtr = j.transpose() * &r;
        let mut step_ok = false;
        for _ in 0..12 {
            let mut damped = jtj.clone();
            for d in 0..p {
                damped[(d, d)] += lambda * jtj[(d, d)].max(1e-30);
            }
            let Some(delta) = damped.clone().lu().solve(&(-&jtr)) else {
                lambda *= 10.0;
                continue;
            };
            let trial = &theta + &delta;
            let (tb, ta) = prob.split(&trial);
            match prob.residual(&tb, &ta) {
                Ok(tr) => {
                    let tcost = tr.norm_squared();
                    if tcost.is_finite() && tcost <= cost {
                        let rel_change = (cost - tcost) / cost.max(1e-300);
                        theta = trial;
                        b = tb;
                        a = ta;
                        r = tr;
                        cost = tcost;
                        lambda = (lambda * 0.3).max(1e-12);
                        step_ok = true;
                        if rel_change < 1e-10 {
                            converged = true;
                        }
                        break;
                    }
                    lambda *= 10.0;
                }
                Err(_) => lambda *= 10.0,
            }
        }
        if !step_ok {
            converged = cost.is_finite();
            break;
        }
        if converged {
            break;
        }
    }
    if !cost.is_finite() {
        return Err(Error::Fit("non-finite residual".into()));
    }
    let model = RationalTF::new(b, a, prob.delay)?;
    Ok(FitResult { model, residual: cost, iterations, converged })
}

/// One row of an order scan.
#[derive(Debug, Clone, Serialize)]
pub struct OrderScanEntry {
    pub nb: usize,
    pub na: usize,
    pub residual: f64,
    /// A pole and zero of this fit coincide within 1e-3.
    pub near_cancelling_pair: bool,
}

/// Fit at (nb, na), (nb+1, na+1), (nb+2, na+2) and flag likely overmodeling:
/// increased orders whose extra roots show up as near-cancelling pole/zero
/// pairs corrupt locus classification.
#[derive(Debug, Clone, Serialize)]
pub struct OrderScan {
    pub entries: Vec<OrderScanEntry>,
    pub overmodeling_suspected: bool,
}

pub fn order_scan(frf: &FrfEstimate, nb: usize, na: usize, delay: usize) -> Result<OrderScan> {
    let mut entries = Vec::new();
    let mut suspected = false;
    for extra in 0..3 {
        let fit = match fit_rational(frf, nb + extra, na + extra, delay) {
            Ok(fit) => fit,
            // Unidentifiable extra parameters on clean data: the strongest
            // overmodeling signal there is.
            Err(Error::Fit(_)) if extra > 0 => {
                suspected = true;
                entries.push(OrderScanEntry {
                    nb: nb + extra,
                    na: na + extra,
                    residual: f64::NAN,
                    near_cancelling_pair: true,
                });
                continue;
            }
            Err(e) => return Err(e),
        };
        let poles = fit.model.poles();
        let zeros = fit.model.zeros();
        let near = poles
            .iter()
            .any(|p| zeros.iter().any(|z| (p - z).norm() < 1e-3));
        if extra > 0 && near {
            suspected = true;
        }
        entries.push(OrderScanEntry {
            nb: nb + extra,
            na: na + extra,
            residual: fit.residual,
            near_cancelling_pair: near,
        });
    }
    Ok(OrderScan { entries, overmodeling_suspected: suspected })
}

/// Excitation recipe for a setpoint sweep.
#[derive(Debug, Clone)]
pub enum Excitation {
    Multisine { n: usize, bins: Vec<usize>, spectrum: PowerSpectrum, phase_law: PhaseLaw },
    Gaussian { n: usize, spectrum: PowerSpectrum, bins: Vec<usize> },
}

impl Excitation {
    pub fn record_len(&self) -> usize {
        match self {
            Excitation::Multisine { n, .. } | Excitation::Gaussian { n, .. } => *n,
        }
    }

    pub fn bins(&self) -> &[usize] {
        match self {
            Excitation::Multisine { bins, .. } | Excitation::Gaussian { bins, .. } => bins,
        }
    }
}

/// Full sweep protocol: excitation, amplitude class, averaging and fit orders.
#[derive(Debug, Clone)]
pub struct BlaProtocol {
    pub excitation: Excitation,
    pub eps: f64,
    pub class: SignalClass,
    /// Realizations per setpoint.
    pub records: usize,
    /// Settling samples discarded before each record; `None` = graph default.
    pub warmup: Option<usize>,
    /// Additive Gaussian noise std on the output (0 = noise-free).
    pub noise_std: f64,
    pub nb: usize,
    pub na: usize,
    pub delay: usize,
    pub seed: u64,
}

/// One setpoint's empirical linearization.
#[derive(Debug, Clone, Serialize)]
pub struct SetpointBla {
    pub op: OperatingPoint,
    pub frf: FrfEstimate,
    pub fit: FitResult,
}

/// splitmix64 step: decorrelates derived seeds across setpoints/records.
pub fn derive_seed(base: u64, stream: u64) -> u64 {
    let mut z = base ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Simulate records and estimate one setpoint's BLA.
pub fn bla_at_setpoint(
    graph: &BlockGraph,
    sp_index: usize,
    r_dc: f64,
    protocol: &BlaProtocol,
) -> Result<SetpointBla> {
    let inner = || -> Result<SetpointBla> {
        let op = graph.solve_setpoint(r_dc)?;
        let warmup = protocol.warmup.unwrap_or_else(|| graph.default_warmup());
        let mut records = Vec::with_capacity(protocol.records);
        for rec in 0..protocol.records {
            let stream = ((sp_index as u64) << 32) | rec as u64;
            let seed = derive_seed(protocol.seed, stream);
            let (u_rec, input) = match &protocol.excitation {
                Excitation::Multisine { n, bins, spectrum, phase_law } => {
                    let spec = MultisineSpec {
                        n: *n,
                        bins: bins.clone(),
                        spectrum: spectrum.clone(),
                        phase_law: *phase_law,
                        seed,
                    };
                    let period = scale_to_class(
                        &generate_multisine(&spec)?,
                        protocol.eps,
                        protocol.class,
                    )?
                    .with_dc(r_dc);
                    let total = warmup + n;
                    let samples: Vec<f64> =
                        (0..total).map(|t| period.samples[t % n]).collect();
                    let u_rec: Vec<f64> =
                        (0..*n).map(|t| period.samples[(warmup + t) % n]).collect();
                    (
                        u_rec,
                        Signal {
                            samples,
                            dc: r_dc,
                            eps: period.eps,
                            class: period.class,
                        },
                    )
                }
                Excitation::Gaussian { n, spectrum, .. } => {
                    let sig = scale_to_class(
                        &generate_gaussian(spectrum, warmup + n, seed)?,
                        protocol.eps,
                        protocol.class,
                    )?
                    .with_dc(r_dc);
                    let u_rec = sig.samples[warmup..].to_vec();
                    (u_rec, sig)
                }
            };
            let mut y = graph.simulate(&input, warmup)?;
            if protocol.noise_std > 0.0 {
                let mut rng =
                    ChaCha8Rng::seed_from_u64(derive_seed(protocol.seed, stream | (1 << 63)));
                for s in &mut y.samples {
                    *s += protocol.noise_std * rng.sample::<f64, _>(StandardNormal);
                }
            }
            let u_sig = Signal { samples: u_rec, dc: r_dc, eps: protocol.eps, class: protocol.class };
            records.push((u_sig, y));
        }
        let frf = estimate_frf(&records, protocol.excitation.bins())?;
        let fit = fit_rational(&frf, protocol.nb, protocol.na, protocol.delay)?;
        Ok(SetpointBla { op, frf, fit })
    };
    inner().map_err(|e| e.at_setpoint(sp_index, r_dc))
}

/// Sweep the setpoint list: solve DC, simulate realizations, estimate the
/// FRF and fit a rational model at each setpoint. Deterministic in the seed.
pub fn bla_at_setpoints(
    graph: &BlockGraph,
    setpoints: &[f64],
    protocol: &BlaProtocol,
) -> Result<Vec<SetpointBla>> {
    setpoints
        .iter()
        .enumerate()
        .map(|(i, &r_dc)| bla_at_setpoint(graph, i, r_dc, protocol))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::demo;
    use crate::systems::{build_single_branch, build_wiener, BranchElement};
    use approx::assert_relative_eq;

    fn multisine_excitation(n: usize, upper: usize) -> Excitation {
        Excitation::Multisine {
            n,
            bins: (1..=upper).collect(),
            spectrum: PowerSpectrum::flat(1.0),
            phase_law: PhaseLaw::Uniform,
        }
    }

    fn default_protocol(n: usize, upper: usize, records: usize) -> BlaProtocol {
        BlaProtocol {
            excitation: multisine_excitation(n, upper),
            eps: 0.01,
            class: SignalClass::StdBounded,
            records,
            warmup: None,
            noise_std: 0.0,
            nb: 1,
            na: 1,
            delay: 0,
            seed: 42,
        }
    }

    #[test]
    fn noiseless_linear_frf_is_exact() {
        let graph = build_single_branch(vec![BranchElement::Linear(demo::g1())]).unwrap();
        let mut protocol = default_protocol(256, 100, 3);
        protocol.warmup = Some(4000); // settle to machine precision
        let sp = bla_at_setpoint(&graph, 0, 0.0, &protocol).unwrap();
        let tf = demo::g1();
        let mut max_err = 0.0f64;
        let mut max_var = 0.0f64;
        for (i, &k) in sp.frf.bins.iter().enumerate() {
            let truth = tf.response_at(k as f64 / 256.0);
            max_err = max_err.max((sp.frf.g_hat[i] - truth).norm());
            max_var = max_var.max(sp.frf.var_g.as_ref().unwrap()[i]);
        }
        assert!(max_err < 1e-11, "FRF error {max_err}");
        assert!(max_var < 1e-22, "variance {max_var} not ~0 for a linear system");
    }

    #[test]
    fn nonlinear_system_has_positive_variance() {
        let graph = demo::demo_graph();
        let protocol = default_protocol(512, 128, 8);
        let sp = bla_at_setpoint(&graph, 0, 0.4, &protocol).unwrap();
        let var = sp.frf.var_g.unwrap();
        assert!(var.iter().all(|&v| v > 0.0), "expected stochastic distortion variance");
    }

    #[test]
    fn single_record_has_no_variance() {
        let graph = build_single_branch(vec![BranchElement::Linear(demo::g1())]).unwrap();
        let protocol = default_protocol(256, 64, 1);
        let sp = bla_at_setpoint(&graph, 0, 0.0, &protocol).unwrap();
        assert_eq!(sp.frf.m, 1);
        assert!(sp.frf.var_g.is_none());
        assert!(sp.frf.y_s_level.is_none());
    }

    #[test]
    fn frf_invariant_under_common_time_shift() {
        // Shifting input and output together rotates U and Y by the same
        // phase, which cancels in Y/U.
        let graph = build_wiener(demo::g1(), demo::f2()).unwrap();
        let protocol = default_protocol(256, 64, 2);
        let n = 256;
        let mut records = Vec::new();
        let mut shifted = Vec::new();
        for rec in 0..2 {
            let spec = MultisineSpec {
                n,
                bins: (1..=64).collect(),
                spectrum: PowerSpectrum::flat(1.0),
                phase_law: PhaseLaw::Uniform,
                seed: derive_seed(7, rec),
            };
            let period = scale_to_class(
                &generate_multisine(&spec).unwrap(),
                protocol.eps,
                protocol.class,
            )
            .unwrap()
            .with_dc(0.2);
            let warmup = 4 * n;
            let samples: Vec<f64> = (0..warmup + 2 * n).map(|t| period.samples[t % n]).collect();
            let input = Signal { samples, dc: 0.2, eps: period.eps, class: period.class };
            let y = graph.simulate(&input, warmup).unwrap();
            let u_rec: Vec<f64> = (0..n).map(|t| period.samples[(warmup + t) % n]).collect();
            let mk = |v: Vec<f64>| Signal {
                samples: v,
                dc: 0.2,
                eps: protocol.eps,
                class: protocol.class,
            };
            // Steady state is periodic: a circular shift of the window is a
            // common time shift of both records.
            let s = 37;
            let u_shift: Vec<f64> = (0..n).map(|t| u_rec[(t + s) % n]).collect();
            let y_shift: Vec<f64> = (0..n).map(|t| y.samples[(t + s) % n]).collect();
            records.push((mk(u_rec), mk(y.samples[..n].to_vec())));
            shifted.push((mk(u_shift), mk(y_shift)));
        }
        let bins: Vec<usize> = (1..=64).collect();
        let a = estimate_frf(&records, &bins).unwrap();
        let b = estimate_frf(&shifted, &bins).unwrap();
        for (ga, gb) in a.g_hat.iter().zip(&b.g_hat) {
            assert!((ga - gb).norm() < 1e-9 * ga.norm().max(1e-6), "{ga} vs {gb}");
        }
    }

    #[test]
    fn bussgang_linear_gain() {
        let u = Signal {
            samples: (0..1000).map(|i| (i as f64 * 0.37).sin()).collect(),
            dc: 0.0,
            eps: 1.0,
            class: SignalClass::Riemann,
        };
        let y = Signal {
            samples: u.samples.iter().map(|&v| 3.0 * v).collect(),
            ..u.clone()
        };
        assert_relative_eq!(bussgang_gain(&u, &y).unwrap(), 3.0, epsilon = 1e-12);
    }

    #[test]
    fn bussgang_rejects_constant_input() {
        let u = Signal { samples: vec![1.0; 10], dc: 1.0, eps: 0.0, class: SignalClass::Riemann };
        assert!(bussgang_gain(&u, &u.clone()).is_err());
    }

    #[test]
    fn static_cascade_gain_is_slope_product() {
        // Two smooth nonlinearities sandwiched between static gains: the
        // measured small-signal gain approaches the product of local slopes
        // and gains.
        let (k1, k2, k3) = (2.0, 0.5, 1.5);
        let f1 = demo::f1();
        let f2 = demo::f2();
        let u_dc = 0.3;
        let graph = build_single_branch(vec![
            BranchElement::Linear(RationalTF::gain(k1)),
            BranchElement::Nonlinear(f1.clone()),
            BranchElement::Linear(RationalTF::gain(k2)),
            BranchElement::Nonlinear(f2.clone()),
            BranchElement::Linear(RationalTF::gain(k3)),
        ])
        .unwrap();
        let eps = 1e-3;
        let noise = generate_gaussian(&PowerSpectrum::flat(1.0), 100_000, 3).unwrap();
        let u = scale_to_class(&noise, eps, SignalClass::StdBounded).unwrap().with_dc(u_dc);
        let y = graph.simulate(&u, 0).unwrap();
        let measured = bussgang_gain(&u, &y).unwrap();
        let x1 = k1 * u_dc;
        let s1 = f1.derivative_limits(x1).0;
        let x2 = k2 * f1.eval(x1);
        let s2 = f2.derivative_limits(x2).0;
        let expected = k1 * s1 * k2 * s2 * k3;
        assert!(
            (measured - expected).abs() < 0.01 * expected.abs(),
            "measured {measured}, expected {expected}"
        );
    }

    #[test]
    fn fit_recovers_exact_first_order_model() {
        let tf = demo::g1();
        let bins: Vec<usize> = (1..=64).collect();
        let frf = FrfEstimate::from_model(&tf, 256, &bins);
        let fit = fit_rational(&frf, 1, 1, 0).unwrap();
        assert!(fit.converged);
        assert_relative_eq!(fit.model.num[0], 0.15, epsilon = 1e-8);
        assert_relative_eq!(fit.model.num[1], 0.1, epsilon = 1e-8);
        assert_relative_eq!(fit.model.den[1], -0.9, epsilon = 1e-8);
        assert!(fit.residual < 1e-16);
    }

    #[test]
    fn fit_recovers_closed_loop_oracle_roots() {
        let graph = demo::demo_graph();
        let op = graph.solve_setpoint(0.5).unwrap();
        let oracle = crate::linearize::linearize_graph(&graph, &op).unwrap();
        let bins: Vec<usize> = (1..=256).collect();
        let frf = FrfEstimate::from_model(&oracle.tf, 1024, &bins);
        let fit = fit_rational(&frf, 3, 4, 0).unwrap();
        let mut want_p = oracle.tf.poles();
        let mut got_p = fit.model.poles();
        let mut want_z = oracle.tf.zeros();
        let mut got_z = fit.model.zeros();
        crate::poly::sort_roots(&mut want_p);
        crate::poly::sort_roots(&mut got_p);
        crate::poly::sort_roots(&mut want_z);
        crate::poly::sort_roots(&mut got_z);
        assert_eq!(got_p.len(), want_p.len());
        for (g, w) in got_p.iter().zip(&want_p).chain(got_z.iter().zip(&want_z)) {
            assert!((g - w).norm() < 1e-6, "root {g} vs oracle {w}");
        }
    }

    #[test]
    fn fit_constant_model() {
        let frf = FrfEstimate {
            period: 64,
            bins: (1..=16).collect(),
            g_hat: vec![Complex64::new(2.5, 0.0); 16],
            var_g: None,
            y_s_level: None,
            m: 1,
        };
        let fit = fit_rational(&frf, 0, 0, 0).unwrap();
        assert_relative_eq!(fit.model.num[0], 2.5, epsilon = 1e-10);
        assert!(fit.residual < 1e-18);
    }

    #[test]
    fn fit_rejects_too_few_bins() {
        let tf = demo::g1();
        let frf = FrfEstimate::from_model(&tf, 64, &[1, 2, 3]);
        assert!(fit_rational(&frf, 2, 2, 0).is_err());
    }

    #[test]
    fn order_scan_flags_overmodeling() {
        let tf = demo::g1();
        let bins: Vec<usize> = (1..=64).collect();
        let frf = FrfEstimate::from_model(&tf, 256, &bins);
        let scan = order_scan(&frf, 1, 1, 0).unwrap();
        assert_eq!(scan.entries.len(), 3);
        assert!(
            scan.overmodeling_suspected,
            "over-ordered exact fits should show near-cancelling pairs: {:?}",
            scan.entries
        );
    }

    #[test]
    fn sweep_is_deterministic() {
        let graph = demo::demo_graph();
        let protocol = default_protocol(256, 64, 2);
        let a = bla_at_setpoints(&graph, &[0.0, 0.5], &protocol).unwrap();
        let b = bla_at_setpoints(&graph, &[0.0, 0.5], &protocol).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.fit.model.num, y.fit.model.num);
            assert_eq!(x.fit.model.den, y.fit.model.den);
        }
    }
}
