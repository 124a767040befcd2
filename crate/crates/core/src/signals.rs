//! Excitation signals: random-phase multisines, spectrally shaped Gaussian
//! noise, and amplitude-class scaling around DC setpoints.
//!
//! Frequencies are normalized (sample rate 1): a length-N record has bins at
//! f = k/N, k = 0..N-1, and real signals live on f ∈ [0, 0.5).

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::dft;
use crate::{Error, Result};

/// One piecewise-constant band of a power spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumBand {
    pub f_lo: f64,
    pub f_hi: f64,
    pub power: f64,
}

/// A piecewise-constant power spectral density on [0, 0.5).
///
/// `value_at(f)` is the band power for the band containing f (bands are
/// half-open `[f_lo, f_hi)`), zero between bands.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerSpectrum {
    bands: Vec<SpectrumBand>,
}

impl PowerSpectrum {
    pub fn new(mut bands: Vec<SpectrumBand>) -> Result<Self> {
        if bands.is_empty() {
            return Err(Error::Signal("power spectrum needs at least one band".into()));
        }
        bands.sort_by(|a, b| a.f_lo.partial_cmp(&b.f_lo).unwrap());
        for b in &bands {
            if !(0.0 <= b.f_lo && b.f_lo < b.f_hi && b.f_hi <= 0.5) {
                return Err(Error::Signal(format!(
                    "band [{}, {}) outside 0 <= f_lo < f_hi <= 0.5",
                    b.f_lo, b.f_hi
                )));
            }
            if b.power < 0.0 || !b.power.is_finite() {
                return Err(Error::Signal("band power must be finite and >= 0".into()));
            }
        }
        if bands.windows(2).any(|w| w[0].f_hi > w[1].f_lo) {
            return Err(Error::Signal("power spectrum bands overlap".into()));
        }
        if bands.iter().all(|b| b.power == 0.0) {
            return Err(Error::Signal("power spectrum has no band with positive power".into()));
        }
        Ok(PowerSpectrum { bands })
    }

    /// Flat density over the whole band [0, 0.5).
    pub fn flat(power: f64) -> Self {
        PowerSpectrum::new(vec![SpectrumBand { f_lo: 0.0, f_hi: 0.5, power }]).unwrap()
    }

    /// Flat density up to `f_cut`, zero above.
    pub fn lowpass(f_cut: f64, power: f64) -> Result<Self> {
        PowerSpectrum::new(vec![SpectrumBand { f_lo: 0.0, f_hi: f_cut, power }])
    }

    pub fn bands(&self) -> &[SpectrumBand] {
        &self.bands
    }

    /// Density at frequency f (piecewise constant, zero between bands).
    pub fn value_at(&self, f: f64) -> f64 {
        self.bands
            .iter()
            .find(|b| b.f_lo <= f && f < b.f_hi)
            .map(|b| b.power)
            .unwrap_or(0.0)
    }

    /// One-sided integral of the density over [f1, f2].
    pub fn integral(&self, f1: f64, f2: f64) -> f64 {
        self.bands
            .iter()
            .map(|b| {
                let lo = b.f_lo.max(f1);
                let hi = b.f_hi.min(f2);
                if hi > lo { (hi - lo) * b.power } else { 0.0 }
            })
            .sum()
    }
}

/// Phase distribution of a random-phase multisine. Both satisfy
/// `E{e^{jφ}} = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhaseLaw {
    /// Uniform on [0, 2π).
    Uniform,
    /// Binary on {0, π}.
    Binary,
}

impl PhaseLaw {
    pub fn draw(self, rng: &mut impl Rng) -> f64 {
        match self {
            PhaseLaw::Uniform => rng.gen::<f64>() * std::f64::consts::TAU,
            PhaseLaw::Binary => {
                if rng.gen::<bool>() {
                    std::f64::consts::PI
                } else {
                    0.0
                }
            }
        }
    }
}

/// Specification of a periodic random-phase multisine.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MultisineSpec {
    /// Samples per period (even).
    pub n: usize,
    /// Excited bins, each in 1..N/2.
    pub bins: Vec<usize>,
    pub spectrum: PowerSpectrum,
    pub phase_law: PhaseLaw,
    pub seed: u64,
}

impl MultisineSpec {
    /// Excite every bin whose frequency carries positive spectral power.
    pub fn full_band(n: usize, spectrum: PowerSpectrum, phase_law: PhaseLaw, seed: u64) -> Self {
        let bins = (1..n / 2).filter(|&k| spectrum.value_at(k as f64 / n as f64) > 0.0).collect();
        MultisineSpec { n, bins, spectrum, phase_law, seed }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 || self.n % 2 != 0 {
            return Err(Error::Signal(format!("period N={} must be positive and even", self.n)));
        }
        if self.bins.is_empty() {
            return Err(Error::Signal("multisine needs a nonempty excited-bin set".into()));
        }
        for &k in &self.bins {
            if k == 0 || k >= self.n / 2 {
                return Err(Error::Signal(format!("excited bin {k} outside 1..{}", self.n / 2)));
            }
            if self.spectrum.value_at(k as f64 / self.n as f64) <= 0.0 {
                return Err(Error::Signal(format!("excited bin {k} has zero spectral power")));
            }
        }
        Ok(())
    }
}

/// Amplitude class of a signal around its DC setpoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignalClass {
    /// Band powers follow a target spectrum; amplitude not pinned.
    Riemann,
    /// Standard deviation of the AC part equals `eps`.
    StdBounded,
    /// Peak magnitude of the AC part equals `eps`.
    PeakBounded,
}

/// A sampled real signal with its DC setpoint and amplitude scale.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Signal {
    pub samples: Vec<f64>,
    /// Setpoint offset contained in `samples`.
    pub dc: f64,
    /// Amplitude scale: std for `StdBounded`, peak for `PeakBounded`,
    /// measured std for `Riemann`.
    pub eps: f64,
    pub class: SignalClass,
}

impl Signal {
    /// AC part: samples minus the DC setpoint.
    pub fn ac(&self) -> Vec<f64> {
        self.samples.iter().map(|&s| s - self.dc).collect()
    }

    /// Mean-removed standard deviation of the AC part (population form).
    pub fn ac_std(&self) -> f64 {
        let ac = self.ac();
        let n = ac.len() as f64;
        let mean = ac.iter().sum::<f64>() / n;
        (ac.iter().map(|&v| (v - mean).powi(2)).sum::<f64>() / n).sqrt()
    }

    /// Peak magnitude of the AC part.
    pub fn ac_peak(&self) -> f64 {
        self.ac().iter().fold(0.0f64, |m, &v| m.max(v.abs()))
    }

    /// Shift the signal to a new DC setpoint.
    pub fn with_dc(mut self, dc: f64) -> Signal {
        let shift = dc - self.dc;
        for s in &mut self.samples {
            *s += shift;
        }
        self.dc = dc;
        self
    }

    /// Two-column CSV (index, value), 17 significant digits.
    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "index,value")?;
        for (i, s) in self.samples.iter().enumerate() {
            writeln!(w, "{i},{s:.16e}")?;
        }
        Ok(())
    }
}

/// Synthesize a multisine with explicit phases (one per excited bin, in the
/// order of `spec.bins`). `u(t) = Σ_k U_k e^{j2πkt/N}` over ±k with
/// `|U_k| = sqrt(S_U(k/N)/N)`; bins outside the excited set are exactly zero.
pub fn multisine_with_phases(spec: &MultisineSpec, phases: &[f64]) -> Result<Signal> {
    spec.validate()?;
    if phases.len() != spec.bins.len() {
        return Err(Error::Signal(format!(
            "{} phases supplied for {} excited bins",
            phases.len(),
            spec.bins.len()
        )));
    }
    let n = spec.n;
    let mut coeffs = vec![Complex64::new(0.0, 0.0); n];
    for (&k, &phi) in spec.bins.iter().zip(phases) {
        let amp = (spec.spectrum.value_at(k as f64 / n as f64)).sqrt() / (n as f64).sqrt();
        let u = Complex64::from_polar(amp, phi);
        coeffs[k] = u;
        coeffs[n - k] = u.conj();
    }
    let samples: Vec<f64> = dft::idft_sum(&coeffs).iter().map(|c| c.re).collect();
    let mut sig = Signal { samples, dc: 0.0, eps: 0.0, class: SignalClass::Riemann };
    sig.eps = sig.ac_std();
    Ok(sig)
}

/// Generate one period of a random-phase multisine. Deterministic in the
/// spec's seed; the amplitude spectrum is seed-independent.
pub fn generate_multisine(spec: &MultisineSpec) -> Result<Signal> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let phases: Vec<f64> = spec.bins.iter().map(|_| spec.phase_law.draw(&mut rng)).collect();
    multisine_with_phases(spec, &phases)
}

/// Shaping-filter length for Gaussian generation.
const MAX_FIR_LEN: usize = 1024;
/// Band edges are pulled inward by this many design bins so the windowed
/// filter's transition stays inside the spectrum's support.
const EDGE_SHRINK_BINS: f64 = 6.0;

/// FIR realization of sqrt(S_U): frequency sampling on an L-point grid,
/// linear-phase rotation, 4-term Blackman-Harris window (−92 dB sidelobes).
/// Band edges are shrunk by the window transition half-width so out-of-band
/// leakage stays at the window floor; for very short filters where the
/// shrink removes everything it is dropped.
fn shaping_filter(spectrum: &PowerSpectrum, len: usize) -> Vec<f64> {
    let l = len;
    let sample = |shrink: f64| -> Vec<f64> {
        (0..l)
            .map(|k| {
                let f = if k <= l / 2 { k as f64 / l as f64 } else { (l - k) as f64 / l as f64 };
                let band = spectrum
                    .bands()
                    .iter()
                    .find(|b| b.f_lo <= f && f < b.f_hi && b.power > 0.0);
                match band {
                    Some(b) if f - shrink >= b.f_lo && f + shrink <= b.f_hi => b.power.sqrt(),
                    Some(b) if shrink == 0.0 => b.power.sqrt(),
                    _ => 0.0,
                }
            })
            .collect()
    };
    let mut mags = sample(EDGE_SHRINK_BINS / l as f64);
    if mags.iter().all(|m| *m == 0.0) {
        mags = sample(0.0);
    }
    let coeffs: Vec<Complex64> = mags.iter().map(|&m| Complex64::new(m / l as f64, 0.0)).collect();
    let ideal = dft::idft_sum(&coeffs);
    (0..l)
        .map(|m| {
            let src = (m + l - l / 2) % l; // rotate to causal linear phase
            let x = m as f64 / (l - 1).max(1) as f64 * std::f64::consts::TAU;
            let w = 0.35875 - 0.48829 * x.cos() + 0.14128 * (2.0 * x).cos()
                - 0.01168 * (3.0 * x).cos();
            ideal[src].re * w
        })
        .collect()
}

/// Generate `n` samples of zero-mean Gaussian noise with power spectrum
/// `spectrum`: unit white noise through the shaping FIR, with the first
/// filter-length samples discarded as warm-up.
pub fn generate_gaussian(spectrum: &PowerSpectrum, n: usize, seed: u64) -> Result<Signal> {
    if n < 2 {
        return Err(Error::Signal(format!("record length {n} < 2")));
    }
    let l = n.min(MAX_FIR_LEN);
    let h = shaping_filter(spectrum, l);
    if h.iter().all(|c| *c == 0.0) {
        return Err(Error::Signal("spectrum has no representable power at this length".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let white: Vec<f64> = (0..n + l).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
    let samples: Vec<f64> = (0..n)
        .map(|t| h.iter().enumerate().map(|(m, &hm)| hm * white[l + t - m]).sum())
        .collect();
    let mut sig = Signal { samples, dc: 0.0, eps: 0.0, class: SignalClass::Riemann };
    sig.eps = sig.ac_std();
    Ok(sig)
}

/// Rescale the AC part so the class invariant holds exactly: std = eps for
/// `StdBounded`, peak = eps for `PeakBounded`. The DC setpoint is unchanged.
/// Idempotent: re-applying with the same eps leaves samples bit-identical.
pub fn scale_to_class(signal: &Signal, eps: f64, class: SignalClass) -> Result<Signal> {
    if eps <= 0.0 || !eps.is_finite() {
        return Err(Error::Signal(format!("target amplitude {eps} must be positive")));
    }
    let measure = match class {
        SignalClass::StdBounded => signal.ac_std(),
        SignalClass::PeakBounded => signal.ac_peak(),
        SignalClass::Riemann => {
            return Err(Error::Signal("scale_to_class targets an amplitude class".into()))
        }
    };
    if measure < 1e-300 {
        return Err(Error::Signal("constant signal: zero AC energy, cannot rescale".into()));
    }
    let factor = eps / measure;
    let samples = if (factor - 1.0).abs() < 1e-12 {
        signal.samples.clone()
    } else {
        signal.samples.iter().map(|&s| signal.dc + factor * (s - signal.dc)).collect()
    };
    Ok(Signal { samples, dc: signal.dc, eps, class })
}

/// Per-band comparison of empirical bin power against the spectrum integral.
#[derive(Debug, Clone, Serialize)]
pub struct BandCheck {
    pub f_lo: f64,
    pub f_hi: f64,
    /// Σ |U_k|² over the band's positive-frequency bins.
    pub empirical: f64,
    /// ∫ S_U(f) df over the band.
    pub target: f64,
    /// Relative deviation (absolute when the target is zero).
    pub deviation: f64,
}

/// Check Riemann equivalence of a signal against a power spectrum: per band,
/// the summed bin power of the AC part is compared with the spectrum
/// integral. Deviations are reported, not judged.
pub fn check_riemann_equivalence(
    signal: &Signal,
    spectrum: &PowerSpectrum,
    bands: &[(f64, f64)],
) -> Result<Vec<BandCheck>> {
    let n = signal.samples.len();
    for &(f1, f2) in bands {
        if !(0.0 < f1 && f1 < f2 && f2 < 0.5) {
            return Err(Error::Signal(format!(
                "band ({f1}, {f2}) outside the representable range (0, 0.5)"
            )));
        }
    }
    let coeffs = dft::coefficients(&signal.ac());
    Ok(bands
        .iter()
        .map(|&(f1, f2)| {
            let k1 = ((f1 * n as f64).floor() as usize).max(1);
            let k2 = ((f2 * n as f64).floor() as usize).min(n / 2 - 1);
            let empirical: f64 = (k1..=k2).map(|k| coeffs[k].norm_sqr()).sum();
            let target = spectrum.integral(f1, f2);
            let deviation =
                if target > 0.0 { (empirical - target) / target } else { empirical };
            BandCheck { f_lo: f1, f_hi: f2, empirical, target, deviation }
        })
        .collect())
}
