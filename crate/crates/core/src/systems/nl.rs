//! Static nonlinearities: polynomials and piecewise polynomials.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Smoothness of a static nonlinearity at a specific point.
///
/// `Jump`: the value itself is discontinuous. `Corner`: continuous but the
/// left and right derivatives differ. `Smooth`: continuous and differentiable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NlCase {
    Jump,
    Corner,
    Smooth,
}

/// A static nonlinearity y = f(u).
///
/// `Polynomial` is everywhere smooth by construction. `Piecewise` glues
/// per-segment polynomials at sorted breakpoints; segment `i` covers
/// `(bp[i-1], bp[i]]` (left-continuous at breakpoints), segment `m` covers
/// `(bp[m-1], ∞)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum StaticNl {
    Polynomial(Vec<f64>),
    Piecewise { breakpoints: Vec<f64>, segments: Vec<Vec<f64>> },
}

fn poly_eval(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

fn poly_deriv_eval(coeffs: &[f64], x: f64) -> f64 {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .rev()
        .fold(0.0, |acc, (k, &c)| acc * x + k as f64 * c)
}

/// Matching tolerance for "x sits exactly on a breakpoint".
const BP_TOL: f64 = 1e-12;

impl StaticNl {
    pub fn polynomial(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::Config("polynomial nonlinearity needs coefficients".into()));
        }
        Ok(StaticNl::Polynomial(coeffs))
    }

    pub fn piecewise(breakpoints: Vec<f64>, segments: Vec<Vec<f64>>) -> Result<Self> {
        if segments.len() != breakpoints.len() + 1 {
            return Err(Error::Config(format!(
                "piecewise nonlinearity needs {} segments for {} breakpoints, got {}",
                breakpoints.len() + 1,
                breakpoints.len(),
                segments.len()
            )));
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config("breakpoints must be strictly increasing".into()));
        }
        if segments.iter().any(|s| s.is_empty()) {
            return Err(Error::Config("piecewise segment without coefficients".into()));
        }
        Ok(StaticNl::Piecewise { breakpoints, segments })
    }

    /// |x|, the canonical corner nonlinearity.
    pub fn abs_value() -> Self {
        StaticNl::piecewise(vec![0.0], vec![vec![0.0, -1.0], vec![0.0, 1.0]]).unwrap()
    }

    /// Evaluate (left-continuous at breakpoints).
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            StaticNl::Polynomial(c) => poly_eval(c, x),
            StaticNl::Piecewise { breakpoints, segments } => {
                poly_eval(&segments[segment_index(breakpoints, x)], x)
            }
        }
    }

    /// Left and right limits of f at x.
    pub fn value_limits(&self, x: f64) -> (f64, f64) {
        match self {
            StaticNl::Polynomial(c) => {
                let v = poly_eval(c, x);
                (v, v)
            }
            StaticNl::Piecewise { breakpoints, segments } => {
                let (li, ri) = side_indices(breakpoints, x);
                (poly_eval(&segments[li], x), poly_eval(&segments[ri], x))
            }
        }
    }

    /// Left and right derivatives of f at x.
    pub fn derivative_limits(&self, x: f64) -> (f64, f64) {
        match self {
            StaticNl::Polynomial(c) => {
                let d = poly_deriv_eval(c, x);
                (d, d)
            }
            StaticNl::Piecewise { breakpoints, segments } => {
                let (li, ri) = side_indices(breakpoints, x);
                (poly_deriv_eval(&segments[li], x), poly_deriv_eval(&segments[ri], x))
            }
        }
    }

    /// Smoothness case at x.
    pub fn case_at(&self, x: f64) -> NlCase {
        let (vl, vr) = self.value_limits(x);
        if (vl - vr).abs() > BP_TOL {
            return NlCase::Jump;
        }
        let (dl, dr) = self.derivative_limits(x);
        if (dl - dr).abs() > BP_TOL {
            NlCase::Corner
        } else {
            NlCase::Smooth
        }
    }

    /// Per-breakpoint smoothness classification (empty for polynomials).
    pub fn breakpoint_cases(&self) -> Vec<(f64, NlCase)> {
        match self {
            StaticNl::Polynomial(_) => Vec::new(),
            StaticNl::Piecewise { breakpoints, .. } => {
                breakpoints.iter().map(|&bp| (bp, self.case_at(bp))).collect()
            }
        }
    }
}

fn segment_index(breakpoints: &[f64], x: f64) -> usize {
    // Segment i covers (bp[i-1], bp[i]]: count breakpoints strictly below x.
    breakpoints.partition_point(|bp| *bp < x)
}

fn side_indices(breakpoints: &[f64], x: f64) -> (usize, usize) {
    match breakpoints.iter().position(|bp| (x - bp).abs() <= BP_TOL) {
        Some(i) => (i, i + 1),
        None => {
            let i = segment_index(breakpoints, x);
            (i, i)
        }
    }
}
