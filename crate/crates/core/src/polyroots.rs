//! Complex polynomials, simultaneous root finding and unit-disk stability.
//!
//! Roots are found with the Aberth–Ehrlich iteration started from points
//! equally spaced on a circle enclosing every root. The iteration is run in
//! Gauss–Seidel order (each update is used immediately), so results are a
//! deterministic function of the coefficients.

use std::f64::consts::TAU;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub const DEFAULT_TOL: f64 = 1e-12;
pub const DEFAULT_MAX_ITER: usize = 200;
pub const DEFAULT_MARGIN_TOL: f64 = 1e-9;

/// Angular offset of the starting circle. Keeps the starting points off the
/// real axis so real-coefficient inputs do not stall on a symmetry line.
const START_PHASE: f64 = 0.4;

/// Polynomial with complex coefficients stored in ascending degree order.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexPolynomial {
    coeffs: Vec<Complex64>,
}

impl ComplexPolynomial {
    /// Builds a polynomial, dropping trailing zero coefficients. The zero
    /// polynomial is kept as a single zero coefficient.
    pub fn new(mut coeffs: Vec<Complex64>) -> Self {
        while coeffs.len() > 1 && coeffs.last().is_some_and(|c| *c == Complex64::new(0.0, 0.0)) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(Complex64::new(0.0, 0.0));
        }
        Self { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    /// `leading * prod (z - r)` expanded into coefficients.
    pub fn from_roots(leading: Complex64, roots: &[Complex64]) -> Self {
        let mut coeffs = vec![leading];
        for &r in roots {
            let mut next = vec![Complex64::new(0.0, 0.0); coeffs.len() + 1];
            for (d, &c) in coeffs.iter().enumerate() {
                next[d + 1] += c;
                next[d] -= c * r;
            }
            coeffs = next;
        }
        Self::new(coeffs)
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn leading(&self) -> Complex64 {
        self.coeffs[self.degree()]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0] == Complex64::new(0.0, 0.0)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    /// Value and first derivative by Horner's scheme.
    fn eval_with_derivative(&self, z: Complex64) -> (Complex64, Complex64) {
        let mut p = Complex64::new(0.0, 0.0);
        let mut dp = Complex64::new(0.0, 0.0);
        for &c in self.coeffs.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    }

    /// `sum |c_d| |z|^d`, the magnitude scale of rounding error in `eval(z)`.
    fn abs_scale(&self, z: Complex64) -> f64 {
        let r = z.norm();
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * r + c.norm())
    }

    /// Residual scale used for the convergence contract: `sum |c_d| max(1,|z|)^d`.
    fn residual_scale(&self, z: Complex64) -> f64 {
        let r = z.norm().max(1.0);
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * r + c.norm())
    }
}

impl fmt::Display for ComplexPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (d, c) in self.coeffs.iter().enumerate().rev() {
            if *c == Complex64::new(0.0, 0.0) && self.degree() > 0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match d {
                0 => write!(f, "({c})")?,
                1 => write!(f, "({c})z")?,
                _ => write!(f, "({c})z^{d}")?,
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RootSet {
    pub roots: Vec<Complex64>,
    /// `|p(root)|` for each root, same order.
    pub residuals: Vec<f64>,
    pub max_modulus: f64,
}

impl RootSet {
    /// Roots whose modulus is within `tol` of `radius`.
    pub fn roots_near_modulus(&self, radius: f64, tol: f64) -> Vec<Complex64> {
        self.roots
            .iter()
            .copied()
            .filter(|r| (r.norm() - radius).abs() <= tol)
            .collect()
    }
}

/// Finds all roots of `p` (with multiplicity).
///
/// On success every residual satisfies `|p(r)| <= tol * sum |c_d| max(1,|r|)^d`.
pub fn find_roots(p: &ComplexPolynomial, tol: f64, max_iter: usize) -> Result<RootSet> {
    if p.is_zero() || p.degree() == 0 {
        return Err(Error::invalid("root finding needs a polynomial of degree >= 1"));
    }
    if !(tol > 0.0) {
        return Err(Error::invalid(format!("tolerance must be positive, got {tol}")));
    }
    if p.coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
        return Err(Error::invalid("polynomial has non-finite coefficients"));
    }

    let n = p.degree();
    let lead = p.leading();
    let monic = ComplexPolynomial {
        coeffs: p.coeffs.iter().map(|&c| c / lead).collect(),
    };

    if n == 1 {
        let root = -monic.coeffs[0];
        return finish(p, vec![root], tol, 0);
    }

    // Cauchy bound: every root lies in |z| <= 1 + max |c_d / c_n|.
    let radius = 1.0 + monic.coeffs[..n].iter().map(|c| c.norm()).fold(0.0, f64::max);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(radius, TAU * k as f64 / n as f64 + START_PHASE))
        .collect();
    let mut done = vec![false; n];

    let mut iterations = 0;
    while iterations < max_iter && done.iter().any(|d| !d) {
        iterations += 1;
        for i in 0..n {
            if done[i] {
                continue;
            }
            let zi = z[i];
            let (val, der) = monic.eval_with_derivative(zi);
            if val.norm() <= 4.0 * f64::EPSILON * monic.abs_scale(zi) {
                done[i] = true;
                continue;
            }
            let repulsion: Complex64 = z
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, &zj)| (zi - zj).inv())
                .sum();
            let denom = der - val * repulsion;
            let step = if denom.norm() > 0.0 {
                val / denom
            } else {
                // Degenerate direction; nudge off the critical point.
                Complex64::from_polar(f64::EPSILON.sqrt() * (1.0 + zi.norm()), i as f64)
            };
            z[i] = zi - step;
            if step.norm() <= 2.0 * f64::EPSILON * z[i].norm() {
                done[i] = true;
            }
        }
    }

    finish(p, z, tol, iterations)
}

fn finish(p: &ComplexPolynomial, roots: Vec<Complex64>, tol: f64, iterations: usize) -> Result<RootSet> {
    let residuals: Vec<f64> = roots.iter().map(|&r| p.eval(r).norm()).collect();
    let ok = roots
        .iter()
        .zip(&residuals)
        .all(|(&r, &res)| res.is_finite() && res <= tol * p.residual_scale(r));
    if !ok {
        let max_residual = residuals.iter().copied().fold(0.0, f64::max);
        return Err(Error::NoConvergence {
            iterations,
            best: roots,
            residuals,
            max_residual,
        });
    }
    let max_modulus = roots.iter().map(|r| r.norm()).fold(0.0, f64::max);
    Ok(RootSet {
        roots,
        residuals,
        max_modulus,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchurClass {
    Stable,
    Marginal,
    Unstable,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchurVerdict {
    pub class: SchurClass,
    pub max_modulus: f64,
}

/// Classifies `p` by its largest root modulus relative to the unit circle.
pub fn is_schur_stable(p: &ComplexPolynomial, margin_tol: f64) -> Result<SchurVerdict> {
    if margin_tol < 0.0 {
        return Err(Error::invalid(format!("margin must be nonnegative, got {margin_tol}")));
    }
    let roots = find_roots(p, DEFAULT_TOL, DEFAULT_MAX_ITER)?;
    Ok(SchurVerdict {
        class: classify_modulus(roots.max_modulus, margin_tol),
        max_modulus: roots.max_modulus,
    })
}

pub(crate) fn classify_modulus(max_modulus: f64, margin_tol: f64) -> SchurClass {
    if max_modulus < 1.0 - margin_tol {
        SchurClass::Stable
    } else if max_modulus <= 1.0 + margin_tol {
        SchurClass::Marginal
    } else {
        SchurClass::Unstable
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn trailing_zeros_are_dropped() {
        let p = ComplexPolynomial::new(vec![c(1.0, 0.0), c(2.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        assert_eq!(p.degree(), 1);
        assert_eq!(p.leading(), c(2.0, 0.0));
        assert!(ComplexPolynomial::new(vec![]).is_zero());
    }

    #[test]
    fn eval_matches_stored_coefficients() {
        let p = ComplexPolynomial::new(vec![c(1.0, 1.0), c(0.0, -2.0), c(3.0, 0.0)]);
        let z = c(0.5, -0.25);
        let direct = c(1.0, 1.0) + c(0.0, -2.0) * z + c(3.0, 0.0) * z * z;
        assert!((p.eval(z) - direct).norm() < 1e-15);
    }

    #[test]
    fn difference_of_squares() {
        let p = ComplexPolynomial::from_real(&[-1.0, 0.0, 1.0]);
        let rs = find_roots(&p, DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
        let mut re: Vec<f64> = rs.roots.iter().map(|r| r.re).collect();
        re.sort_by(f64::total_cmp);
        assert!((re[0] + 1.0).abs() < 1e-12 && (re[1] - 1.0).abs() < 1e-12);
        assert!((rs.max_modulus - 1.0).abs() < 1e-12);
    }

    #[test]
    fn linear_root_has_modulus_sqrt_mu() {
        // nu + 2i: single root -2i
        let p = ComplexPolynomial::new(vec![c(0.0, 2.0), c(1.0, 0.0)]);
        let rs = find_roots(&p, DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
        assert_eq!(rs.roots.len(), 1);
        assert!((rs.max_modulus - 2.0).abs() < 1e-15);
    }

    #[test]
    fn degree_zero_is_rejected() {
        let p = ComplexPolynomial::from_real(&[3.0]);
        assert!(matches!(find_roots(&p, 1e-12, 10), Err(Error::InvalidArgument(_))));
        assert!(matches!(is_schur_stable(&p, 1e-9), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn non_convergence_reports_best_iterate() {
        let p = ComplexPolynomial::from_roots(c(1.0, 0.0), &[c(0.3, 0.1), c(-0.7, 0.2), c(0.1, -0.9), c(0.5, 0.5)]);
        match find_roots(&p, 1e-12, 1) {
            Err(Error::NoConvergence {
                iterations,
                best,
                residuals,
                ..
            }) => {
                assert_eq!(iterations, 1);
                assert_eq!(best.len(), 4);
                assert_eq!(residuals.len(), 4);
            }
            other => panic!("expected non-convergence, got {other:?}"),
        }
    }

    #[test]
    fn schur_classes() {
        let stable = ComplexPolynomial::from_real(&[0.5, 1.0]);
        let v = is_schur_stable(&stable, DEFAULT_MARGIN_TOL).unwrap();
        assert_eq!(v.class, SchurClass::Stable);
        assert!((v.max_modulus - 0.5).abs() < 1e-15);

        let marginal = ComplexPolynomial::from_real(&[-1.0, 1.0]);
        let v = is_schur_stable(&marginal, DEFAULT_MARGIN_TOL).unwrap();
        assert_eq!(v.class, SchurClass::Marginal);
        assert!((v.max_modulus - 1.0).abs() < 1e-15);

        let unstable = ComplexPolynomial::from_real(&[-2.0, 0.0, 1.0]);
        assert_eq!(
            is_schur_stable(&unstable, DEFAULT_MARGIN_TOL).unwrap().class,
            SchurClass::Unstable
        );
    }

    #[test]
    fn repeated_root_converges() {
        let p = ComplexPolynomial::from_roots(c(1.0, 0.0), &[c(0.5, 0.0), c(0.5, 0.0), c(-0.2, 0.3)]);
        let rs = find_roots(&p, DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
        assert!((rs.max_modulus - 0.5).abs() < 1e-6);
    }
}
