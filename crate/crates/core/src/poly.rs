//! Polynomial and rational-function arithmetic in powers of z⁻¹.
//!
//! Coefficient vectors are stored in ascending powers of z⁻¹:
//! `[c0, c1, c2]` means `c0 + c1·z⁻¹ + c2·z⁻²`. All composition is exact
//! convolution/addition; no coefficient is ever dropped implicitly, so the
//! factored structure of composed transfer functions survives (a requirement
//! for reading fixed zeros off closed-loop numerators).

use nalgebra::DMatrix;
use num_complex::Complex64;

/// Multiply two coefficient vectors (polynomial product = convolution).
pub fn mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, &ai) in a.iter().enumerate() {
        for (j, &bj) in b.iter().enumerate() {
            out[i + j] += ai * bj;
        }
    }
    out
}

/// Add two coefficient vectors, padding the shorter with zeros.
pub fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    let n = a.len().max(b.len());
    let mut out = vec![0.0; n];
    for (i, &ai) in a.iter().enumerate() {
        out[i] += ai;
    }
    for (i, &bi) in b.iter().enumerate() {
        out[i] += bi;
    }
    out
}

/// Scale a coefficient vector by a constant.
pub fn scale(a: &[f64], s: f64) -> Vec<f64> {
    a.iter().map(|&c| c * s).collect()
}

/// Multiply by z⁻ᵈ: prepend `d` zero coefficients.
pub fn shift(a: &[f64], d: usize) -> Vec<f64> {
    let mut out = vec![0.0; d];
    out.extend_from_slice(a);
    out
}

/// Evaluate the polynomial at a complex `z` (as a function of z⁻¹).
pub fn eval(coeffs: &[f64], z: Complex64) -> Complex64 {
    // Horner in z⁻¹.
    let zinv = Complex64::new(1.0, 0.0) / z;
    let mut acc = Complex64::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        acc = acc * zinv + c;
    }
    acc
}

/// Sum of coefficients = value at z = 1 (DC).
pub fn eval_at_one(coeffs: &[f64]) -> f64 {
    coeffs.iter().sum()
}

/// Roots of the polynomial in the z plane.
///
/// The z⁻¹ coefficient vector `[c0, .., cd]` maps to the z-domain polynomial
/// `c0·z^d + c1·z^(d-1) + … + cd`; its roots are computed as eigenvalues of
/// the companion matrix of the monic form. Leading z-domain zeros (vanishing
/// `c0`) reduce the degree — those roots sit at infinity and are not reported.
/// An (effectively) zero polynomial yields an empty root set.
pub fn roots(coeffs: &[f64]) -> Vec<Complex64> {
    let max_mag = coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    if max_mag == 0.0 {
        return Vec::new();
    }
    let tol = max_mag * 1e-14;
    // Trim z-domain leading zeros (front of the z⁻¹ vector) and trailing
    // zeros (pure roots at z = 0 beyond the last nonzero coefficient).
    let first = coeffs.iter().position(|c| c.abs() > tol).unwrap();
    let last = coeffs.iter().rposition(|c| c.abs() > tol).unwrap();
    let trailing_zeros = coeffs.len() - 1 - last;
    let core = &coeffs[first..=last];
    let deg = core.len() - 1;

    let mut out: Vec<Complex64> = vec![Complex64::new(0.0, 0.0); trailing_zeros];
    if deg == 0 {
        return out;
    }
    // Companion matrix of z^deg + (c1/c0) z^(deg-1) + ... + (cdeg/c0).
    let lead = core[0];
    let mut comp = DMatrix::<f64>::zeros(deg, deg);
    for i in 1..deg {
        comp[(i, i - 1)] = 1.0;
    }
    for i in 0..deg {
        comp[(i, deg - 1)] = -core[deg - i] / lead;
    }
    out.extend(comp.complex_eigenvalues().iter().copied());
    out
}

/// Reconstruct a real-coefficient monic polynomial (z⁻¹ form, ascending) from
/// its z-plane roots. Complex roots must come in conjugate pairs.
pub fn from_roots(roots: &[Complex64]) -> Vec<f64> {
    // Product of (1 - r·z⁻¹) factors, accumulated in complex arithmetic.
    let mut acc = vec![Complex64::new(1.0, 0.0)];
    for &r in roots {
        let mut next = vec![Complex64::new(0.0, 0.0); acc.len() + 1];
        for (i, &c) in acc.iter().enumerate() {
            next[i] += c;
            next[i + 1] -= c * r;
        }
        acc = next;
    }
    acc.iter().map(|c| c.re).collect()
}

/// Sort key for root lists: by real part, then imaginary part.
pub fn sort_roots(roots: &mut [Complex64]) {
    roots.sort_by(|a, b| {
        (a.re, a.im)
            .partial_cmp(&(b.re, b.im))
            .unwrap_or(std::cmp::Ordering::Equal)
    });
}

/// A rational function num/den in z⁻¹ with the delay folded into `num`.
///
/// Used as the working representation while composing linearized graphs;
/// the public-facing [`crate::systems::RationalTF`] keeps the delay explicit.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalPoly {
    pub num: Vec<f64>,
    pub den: Vec<f64>,
}

impl RationalPoly {
    pub fn new(num: Vec<f64>, den: Vec<f64>) -> Self {
        RationalPoly { num, den }
    }

    /// The constant 1.
    pub fn one() -> Self {
        RationalPoly { num: vec![1.0], den: vec![1.0] }
    }

    /// The constant 0.
    pub fn zero() -> Self {
        RationalPoly { num: vec![0.0], den: vec![1.0] }
    }

    /// Reciprocal: swap numerator and denominator.
    pub fn recip(&self) -> RationalPoly {
        RationalPoly { num: self.den.clone(), den: self.num.clone() }
    }

    /// A constant gain.
    pub fn constant(g: f64) -> Self {
        RationalPoly { num: vec![g], den: vec![1.0] }
    }

    pub fn is_zero(&self) -> bool {
        self.num.iter().all(|c| *c == 0.0)
    }

    /// Series connection: product of the two rationals.
    pub fn series(&self, other: &RationalPoly) -> RationalPoly {
        RationalPoly { num: mul(&self.num, &other.num), den: mul(&self.den, &other.den) }
    }

    /// Parallel connection: sum over the common denominator, uncancelled.
    pub fn parallel(&self, other: &RationalPoly) -> RationalPoly {
        RationalPoly {
            num: add(&mul(&self.num, &other.den), &mul(&other.num, &self.den)),
            den: mul(&self.den, &other.den),
        }
    }

    pub fn scaled(&self, s: f64) -> RationalPoly {
        RationalPoly { num: scale(&self.num, s), den: self.den.clone() }
    }

    /// Negative-feedback closure `self / (1 + self·fb)`, uncancelled.
    pub fn feedback(&self, fb: &RationalPoly) -> RationalPoly {
        let num = mul(&self.num, &fb.den);
        let den = add(&mul(&self.den, &fb.den), &mul(&self.num, &fb.num));
        RationalPoly { num, den }
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        eval(&self.num, z) / eval(&self.den, z)
    }

    /// Remove num/den root pairs that coincide within `tol` (exact common
    /// factors introduced by generic graph traversal). Reconstruction keeps
    /// the original leading gains.
    pub fn cancel_common_roots(&self, tol: f64) -> RationalPoly {
        let mut zs = roots(&self.num);
        let mut ps = roots(&self.den);
        let mut cancelled = false;
        let mut zi = 0;
        while zi < zs.len() {
            if let Some(pi) = ps.iter().position(|p| (p - zs[zi]).norm() < tol) {
                ps.remove(pi);
                zs.remove(zi);
                cancelled = true;
            } else {
                zi += 1;
            }
        }
        if !cancelled {
            return self.clone();
        }
        let num_gain = leading_gain(&self.num);
        let den_gain = leading_gain(&self.den);
        let num = scale(&from_roots(&zs), num_gain);
        let den = scale(&from_roots(&ps), den_gain);
        RationalPoly { num, den }
    }
}

fn leading_gain(coeffs: &[f64]) -> f64 {
    let max_mag = coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    if max_mag == 0.0 {
        return 0.0;
    }
    let tol = max_mag * 1e-14;
    coeffs[coeffs.iter().position(|c| c.abs() > tol).unwrap()]
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn mul_matches_hand_expansion() {
        // (1 - 0.9 z⁻¹)(1 - 0.77 z⁻¹) = 1 - 1.67 z⁻¹ + 0.693 z⁻²
        let p = mul(&[1.0, -0.9], &[1.0, -0.77]);
        assert_relative_eq!(p[0], 1.0);
        assert_relative_eq!(p[1], -1.67);
        assert_relative_eq!(p[2], 0.693, epsilon = 1e-15);
    }

    #[test]
    fn linear_factor_root() {
        // 1 - 0.9 z⁻¹ → root at z = 0.9
        let r = roots(&[1.0, -0.9]);
        assert_eq!(r.len(), 1);
        assert_relative_eq!(r[0].re, 0.9, epsilon = 1e-12);
        assert_relative_eq!(r[0].im, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn numerator_root_of_g1() {
        // 0.15 + 0.1 z⁻¹ → root at z = -2/3
        let r = roots(&[0.15, 0.1]);
        assert_eq!(r.len(), 1);
        assert_relative_eq!(r[0].re, -2.0 / 3.0, epsilon = 1e-12);
    }

    #[test]
    fn trailing_zero_coefficients_are_origin_roots() {
        // z⁻¹ factor written out: 0.2 z⁻¹ + 0.15 z⁻² has roots {-0.75} only
        // (leading z-domain zero drops), while 1 - 0.5 z⁻¹ + 0 z⁻² … no:
        // trailing zeros in z⁻¹ form mean roots at the origin.
        let r = roots(&[1.0, -0.5, 0.0]);
        assert_eq!(r.len(), 2);
        let mut r = r;
        sort_roots(&mut r);
        assert_relative_eq!(r[0].norm(), 0.0, epsilon = 1e-14);
        assert_relative_eq!(r[1].re, 0.5, epsilon = 1e-12);
    }

    #[test]
    fn leading_zero_drops_degree() {
        let r = roots(&[0.0, 0.2, 0.15]);
        assert_eq!(r.len(), 1);
        assert_relative_eq!(r[0].re, -0.75, epsilon = 1e-12);
    }

    #[test]
    fn zero_polynomial_has_no_roots() {
        assert!(roots(&[0.0, 0.0]).is_empty());
        assert!(roots(&[]).is_empty());
    }

    #[test]
    fn quadratic_conjugate_pair() {
        // (1 - r e^{jθ} z⁻¹)(1 - r e^{-jθ} z⁻¹), r=0.8, θ=π/3
        let (r, th) = (0.8, std::f64::consts::FRAC_PI_3);
        let p = vec![1.0, -2.0 * r * th.cos(), r * r];
        let mut rs = roots(&p);
        sort_roots(&mut rs);
        assert_eq!(rs.len(), 2);
        assert_relative_eq!(rs[0].re, r * th.cos(), epsilon = 1e-12);
        assert_relative_eq!(rs[0].im.abs(), r * th.sin(), epsilon = 1e-12);
        assert_eq!(rs[0].im, -rs[1].im);
    }

    #[test]
    fn feedback_assembles_closed_loop_polynomials() {
        // F = 1/(1 - 0.5 z⁻¹), B = 0.3 → F/(1+FB): den = (1 - 0.5 z⁻¹) + 0.3
        let f = RationalPoly::new(vec![1.0], vec![1.0, -0.5]);
        let b = RationalPoly::constant(0.3);
        let cl = f.feedback(&b);
        assert_eq!(cl.num, vec![1.0]);
        assert_eq!(cl.den, vec![1.3, -0.5]);
    }

    #[test]
    fn cancel_removes_exact_common_factor() {
        // (1-0.9z⁻¹)(0.15+0.1z⁻¹) / (1-0.9z⁻¹)(1-0.77z⁻¹)
        let num = mul(&[1.0, -0.9], &[0.15, 0.1]);
        let den = mul(&[1.0, -0.9], &[1.0, -0.77]);
        let r = RationalPoly::new(num, den).cancel_common_roots(1e-10);
        let mut zr = roots(&r.num);
        let mut pr = roots(&r.den);
        sort_roots(&mut zr);
        sort_roots(&mut pr);
        assert_eq!(zr.len(), 1);
        assert_eq!(pr.len(), 1);
        assert_relative_eq!(zr[0].re, -2.0 / 3.0, epsilon = 1e-10);
        assert_relative_eq!(pr[0].re, 0.77, epsilon = 1e-10);
        // Gains preserved: evaluate both forms away from the cancelled root.
        let z = Complex64::new(0.3, 1.1);
        let orig = RationalPoly::new(
            mul(&[1.0, -0.9], &[0.15, 0.1]),
            mul(&[1.0, -0.9], &[1.0, -0.77]),
        );
        let a = orig.eval(z);
        let b = r.eval(z);
        assert_relative_eq!(a.re, b.re, epsilon = 1e-10);
        assert_relative_eq!(a.im, b.im, epsilon = 1e-10);
    }

    proptest! {
        // roots ∘ from_roots is the identity for well-separated roots.
        #[test]
        fn roots_from_roots_roundtrip(seed in 0u64..500) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let n_real = rng.gen_range(0..=4usize);
            let n_pairs = rng.gen_range(0..=2usize);
            let mut rs: Vec<Complex64> = Vec::new();
            let mut tries = 0;
            while rs.len() < n_real + 2 * n_pairs {
                let cand = if rs.len() < n_real {
                    Complex64::new(rng.gen_range(-0.95..0.95), 0.0)
                } else {
                    Complex64::new(rng.gen_range(-0.9..0.9), rng.gen_range(0.05..0.9))
                };
                tries += 1;
                if tries > 200 { break; }
                let sep = rs.iter().all(|r| (r - cand).norm() > 0.08
                    && (r - cand.conj()).norm() > 0.08);
                if sep && cand.norm() > 0.05 {
                    if cand.im == 0.0 {
                        rs.push(cand);
                    } else {
                        rs.push(cand);
                        rs.push(cand.conj());
                    }
                }
            }
            prop_assume!(rs.len() <= 8);
            let p = from_roots(&rs);
            let mut got = roots(&p);
            sort_roots(&mut got);
            sort_roots(&mut rs);
            prop_assert_eq!(got.len(), rs.len());
            for (g, w) in got.iter().zip(rs.iter()) {
                prop_assert!((g - w).norm() < 1e-8, "root {} vs {}", g, w);
            }
        }
    }
}
