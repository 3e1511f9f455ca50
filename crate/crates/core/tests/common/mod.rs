//! Test-only oracles, independent of the library's numeric paths.
#![allow(dead_code)]

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use cyclestab::ControlGains;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

type Mat = Vec<Vec<Complex64>>;

fn matmul(a: &Mat, b: &Mat) -> Mat {
    let n = a.len();
    let mut c = vec![vec![Complex64::new(0.0, 0.0); n]; n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i][k];
            for j in 0..n {
                c[i][j] += aik * b[k][j];
            }
        }
    }
    c
}

fn frobenius(a: &Mat) -> f64 {
    a.iter().flatten().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Companion matrix of the polynomial with ascending coefficients `coeffs`.
pub fn companion(coeffs: &[Complex64]) -> Mat {
    let n = coeffs.len() - 1;
    let lead = coeffs[n];
    let mut m = vec![vec![Complex64::new(0.0, 0.0); n]; n];
    for i in 0..n - 1 {
        m[i][i + 1] = Complex64::new(1.0, 0.0);
    }
    for j in 0..n {
        m[n - 1][j] = -coeffs[j] / lead;
    }
    m
}

/// Spectral radius by power iteration on the companion matrix, run as
/// repeated squaring: `rho = lim ||A^(2^k)||^(1/2^k)`, with the matrix
/// renormalized after every squaring and the scale tracked in log space.
pub fn companion_spectral_radius(coeffs: &[Complex64]) -> f64 {
    let mut m = companion(coeffs);
    let s = frobenius(&m);
    if s == 0.0 {
        return 0.0;
    }
    m.iter_mut().flatten().for_each(|z| *z /= s);
    let mut log_norm = s.ln();
    let mut power = 1.0f64;
    for _ in 0..48 {
        m = matmul(&m, &m);
        let s = frobenius(&m);
        if s == 0.0 {
            return 0.0;
        }
        m.iter_mut().flatten().for_each(|z| *z /= s);
        log_norm = 2.0 * log_norm + s.ln();
        power *= 2.0;
    }
    (log_norm / power).exp()
}

pub fn random_complex(rng: &mut impl Rng, scale: f64) -> Complex64 {
    Complex64::new(rng.gen_range(-scale..scale), rng.gen_range(-scale..scale))
}

/// Random admissible gains: strengths uniform in (-0.95, 0.95).
pub fn random_gains(rng: &mut impl Rng, n: usize) -> ControlGains {
    let eps: Vec<f64> = (0..n - 1).map(|_| rng.gen_range(-0.95..0.95)).collect();
    ControlGains::from_strengths(&eps)
}

/// Logistic cycle multiplier in closed form.
pub fn logistic_multiplier_closed_form(h: f64) -> f64 {
    4.0 + 2.0 * h - h * h
}
