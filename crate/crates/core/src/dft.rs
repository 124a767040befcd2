//! Thin DFT helpers over rustfft, in the `U_k = X_k / N` coefficient
//! convention used throughout the crate.

use num_complex::Complex64;
use rustfft::FftPlanner;

/// Unnormalized forward DFT of a real sequence.
pub(crate) fn dft(x: &[f64]) -> Vec<Complex64> {
    let mut buf: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(x.len()).process(&mut buf);
    buf
}

/// Unnormalized inverse DFT: `x[t] = Σ_k c[k] e^{+j2πkt/N}` (no 1/N factor).
pub(crate) fn idft_sum(c: &[Complex64]) -> Vec<Complex64> {
    let mut buf = c.to_vec();
    FftPlanner::new().plan_fft_inverse(c.len()).process(&mut buf);
    buf
}

/// Fourier coefficients `U_k = (1/N) Σ_t x[t] e^{-j2πkt/N}`.
pub(crate) fn coefficients(x: &[f64]) -> Vec<Complex64> {
    let n = x.len() as f64;
    dft(x).into_iter().map(|c| c / n).collect()
}
