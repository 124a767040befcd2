//! Discrete-time rational transfer functions in z⁻¹.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::poly;
use crate::{Error, Result};

/// A rational transfer function `z^(-delay) · B(z⁻¹)/A(z⁻¹)`.
///
/// Coefficients are stored in ascending powers of z⁻¹ and the denominator is
/// normalized so `den[0] == 1`. The sample delay is kept explicit rather than
/// folded into the numerator so that delay-induced roots at the origin stay
/// distinguishable from structural zeros.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RationalTF {
    pub num: Vec<f64>,
    pub den: Vec<f64>,
    #[serde(default)]
    pub delay: usize,
}

impl RationalTF {
    pub fn new(num: Vec<f64>, den: Vec<f64>, delay: usize) -> Result<Self> {
        // Canonical degree: drop trailing coefficients that are numerically
        // zero, so arithmetic residue never masquerades as an origin root.
        let num = trim_trailing(num);
        let den = trim_trailing(den);
        if num.is_empty() || num.iter().all(|c| *c == 0.0) {
            return Err(Error::Config("transfer function numerator is zero".into()));
        }
        if den.is_empty() || den[0] == 0.0 {
            return Err(Error::Config(
                "transfer function denominator must start with a nonzero a0".into(),
            ));
        }
        let a0 = den[0];
        let num = if a0 == 1.0 { num } else { poly::scale(&num, 1.0 / a0) };
        let den = if a0 == 1.0 { den } else { poly::scale(&den, 1.0 / a0) };
        Ok(RationalTF { num, den, delay })
    }

    /// A static gain.
    pub fn gain(g: f64) -> Self {
        RationalTF { num: vec![g], den: vec![1.0], delay: 0 }
    }

    /// A pure `z^(-d)` delay.
    pub fn pure_delay(d: usize) -> Self {
        RationalTF { num: vec![1.0], den: vec![1.0], delay: d }
    }

    pub fn num_order(&self) -> usize {
        self.num.len().saturating_sub(1)
    }

    pub fn den_order(&self) -> usize {
        self.den.len().saturating_sub(1)
    }

    /// Evaluate at a complex `z`, delay included.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        let base = poly::eval(&self.num, z) / poly::eval(&self.den, z);
        if self.delay == 0 {
            base
        } else {
            base * z.powi(-(self.delay as i32))
        }
    }

    /// Frequency response at normalized frequency `f` (cycles/sample).
    pub fn response_at(&self, f: f64) -> Complex64 {
        self.eval(Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * f))
    }

    /// DC gain `B(1)/A(1)`; `None` when the denominator vanishes at z = 1.
    pub fn dc_gain(&self) -> Option<f64> {
        let a1 = poly::eval_at_one(&self.den);
        if a1.abs() < 1e-300 {
            None
        } else {
            Some(poly::eval_at_one(&self.num) / a1)
        }
    }

    /// Poles: roots of the denominator in the z plane.
    pub fn poles(&self) -> Vec<Complex64> {
        poly::roots(&self.den)
    }

    /// Zeros: roots of the numerator plus one origin zero per delay sample.
    pub fn zeros(&self) -> Vec<Complex64> {
        let mut z = poly::roots(&self.num);
        z.extend(std::iter::repeat(Complex64::new(0.0, 0.0)).take(self.delay));
        z
    }

    /// All poles strictly inside the unit circle.
    pub fn is_stable(&self) -> bool {
        self.poles().iter().all(|p| p.norm() < 1.0)
    }

    /// Numerator with the delay folded in as leading z⁻¹ zeros.
    pub fn num_with_delay(&self) -> Vec<f64> {
        poly::shift(&self.num, self.delay)
    }

    /// View as a [`poly::RationalPoly`] with the delay folded into the numerator.
    pub fn as_rational_poly(&self) -> poly::RationalPoly {
        poly::RationalPoly::new(self.num_with_delay(), self.den.clone())
    }

    /// Rebuild from a composed rational, re-normalizing `a0` to 1.
    pub fn from_rational_poly(rp: &poly::RationalPoly) -> Result<Self> {
        RationalTF::new(rp.num.clone(), rp.den.clone(), 0)
    }
}

fn trim_trailing(mut coeffs: Vec<f64>) -> Vec<f64> {
    let max_mag = coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    let tol = max_mag * 1e-12;
    while coeffs.len() > 1 && coeffs.last().map(|c| c.abs() <= tol) == Some(true) {
        coeffs.pop();
    }
    coeffs
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn g1() -> RationalTF {
        RationalTF::new(vec![0.15, 0.1], vec![1.0, -0.9], 0).unwrap()
    }

    fn g3() -> RationalTF {
        RationalTF::new(vec![0.2, 0.15], vec![1.0, -0.72], 1).unwrap()
    }

    #[test]
    fn dc_gain_is_coefficient_ratio() {
        assert_relative_eq!(g1().dc_gain().unwrap(), 0.25 / 0.1, epsilon = 1e-12);
    }

    #[test]
    fn delay_contributes_origin_zeros() {
        let z = g3().zeros();
        assert_eq!(z.len(), 2);
        assert!(z.iter().any(|r| (r.re + 0.75).abs() < 1e-12));
        assert!(z.iter().any(|r| r.norm() < 1e-14));
        let p = g3().poles();
        assert_eq!(p.len(), 1);
        assert_relative_eq!(p[0].re, 0.72, epsilon = 1e-12);
    }

    #[test]
    fn denominator_normalized() {
        let tf = RationalTF::new(vec![2.0], vec![2.0, -1.0], 0).unwrap();
        assert_eq!(tf.den, vec![1.0, -0.5]);
        assert_eq!(tf.num, vec![1.0]);
    }

    #[test]
    fn eval_includes_delay() {
        let z = Complex64::new(0.0, 1.0); // e^{jπ/2}
        let no_delay = RationalTF::new(vec![0.2, 0.15], vec![1.0, -0.72], 0).unwrap();
        let with_delay = g3();
        let ratio = with_delay.eval(z) / no_delay.eval(z);
        assert_relative_eq!(ratio.re, 0.0, epsilon = 1e-12);
        assert_relative_eq!(ratio.im, -1.0, epsilon = 1e-12);
    }

    #[test]
    fn zero_numerator_rejected() {
        assert!(RationalTF::new(vec![0.0, 0.0], vec![1.0], 0).is_err());
    }

    #[test]
    fn stability_check() {
        assert!(g1().is_stable());
        let unstable = RationalTF::new(vec![1.0], vec![1.0, -1.1], 0).unwrap();
        assert!(!unstable.is_stable());
    }
}
