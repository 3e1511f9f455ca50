//! Control-gain representations.
//!
//! A delayed-feedback law with strengths `eps_1..eps_{N-1}` is equivalent to
//! the closed-loop weights `a_1..a_N` with
//! `a_1 = 1 - eps_1`, `a_j = eps_{j-1} - eps_j`, `a_N = eps_{N-1}`, so the
//! weights always sum to one. [`ControlGains`] keeps both forms.

use crate::error::{Error, Result};

/// Tolerance on `sum a_j = 1` accepted by [`ControlGains::from_weights`].
pub const NORMALIZATION_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct ControlGains {
    a: Vec<f64>,
    eps: Vec<f64>,
}

impl ControlGains {
    /// Optimal weights `a_j = (2(N-j)+1)/N^2` and strengths
    /// `eps_j = (N-j)^2/N^2`. Both are single correctly-rounded quotients of
    /// integers.
    pub fn optimal(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("horizon N must be at least 1"));
        }
        let n2 = (n * n) as f64;
        let a = (1..=n).map(|j| (2 * (n - j) + 1) as f64 / n2).collect();
        let eps = (1..n).map(|j| ((n - j) * (n - j)) as f64 / n2).collect();
        Ok(Self { a, eps })
    }

    /// Gains from feedback strengths. Never fails; admissibility is a flag.
    pub fn from_strengths(eps: &[f64]) -> Self {
        let n = eps.len() + 1;
        let mut a = Vec::with_capacity(n);
        if eps.is_empty() {
            a.push(1.0);
        } else {
            a.push(1.0 - eps[0]);
            a.extend(eps.windows(2).map(|w| w[0] - w[1]));
            a.push(eps[eps.len() - 1]);
        }
        Self { a, eps: eps.to_vec() }
    }

    /// Gains from closed-loop weights; `eps_j = sum_{k>j} a_k`.
    pub fn from_weights(a: &[f64]) -> Result<Self> {
        if a.is_empty() {
            return Err(Error::invalid("weights must be nonempty"));
        }
        let sum: f64 = a.iter().sum();
        if !sum.is_finite() || (sum - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::invalid(format!("weights must sum to 1, got sum = {sum:.17e}")));
        }
        let mut eps = vec![0.0; a.len() - 1];
        let mut tail = 0.0;
        for j in (0..a.len() - 1).rev() {
            tail += a[j + 1];
            eps[j] = tail;
        }
        Ok(Self { a: a.to_vec(), eps })
    }

    /// Number of closed-loop weights `N`.
    pub fn horizon(&self) -> usize {
        self.a.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.a
    }

    pub fn strengths(&self) -> &[f64] {
        &self.eps
    }

    /// Number of past states the control reads, `2(N-1)`.
    pub fn prehistory_depth(&self) -> usize {
        2 * (self.horizon() - 1)
    }

    /// All strengths strictly inside (-1, 1).
    pub fn is_admissible(&self) -> bool {
        self.eps.iter().all(|e| e.abs() < 1.0)
    }

    pub fn weight_sum(&self) -> f64 {
        self.a.iter().sum()
    }

    pub fn gamma(&self) -> Vec<f64> {
        a_to_gamma(&self.a)
    }
}

pub fn eps_to_a(eps: &[f64]) -> ControlGains {
    ControlGains::from_strengths(eps)
}

pub fn a_to_eps(a: &[f64]) -> Result<ControlGains> {
    ControlGains::from_weights(a)
}

pub fn optimal_gains(n: usize) -> Result<ControlGains> {
    ControlGains::optimal(n)
}

/// Alternating tail sums `gamma_s = sum_{j>=s} (-1)^{s+j} a_j`, the
/// coefficients of `C(t)/cos t = gamma_1 + 2 sum_{s>=2} gamma_s cos 2(s-1)t`.
pub fn a_to_gamma(a: &[f64]) -> Vec<f64> {
    let mut gamma = vec![0.0; a.len()];
    let mut acc = 0.0;
    for s in (0..a.len()).rev() {
        acc = a[s] - acc;
        gamma[s] = acc;
    }
    gamma
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HorizonPlan {
    pub mu_star_abs: f64,
    /// Number of closed-loop weights needed.
    pub n0: usize,
    /// Prehistory depth `2(n0 - 1)`.
    pub n_star: usize,
    pub no_control_required: bool,
}

/// Smallest `N0` with `sqrt(|mu*|) < N0`; the optimal gains for that horizon
/// tolerate multipliers down to `-N0^2`.
pub fn min_horizon(mu_star_abs: f64) -> Result<HorizonPlan> {
    if !mu_star_abs.is_finite() || mu_star_abs <= 0.0 {
        return Err(Error::invalid(format!(
            "|mu*| must be positive and finite, got {mu_star_abs}"
        )));
    }
    if mu_star_abs <= 1.0 {
        return Ok(HorizonPlan {
            mu_star_abs,
            n0: 1,
            n_star: 0,
            no_control_required: true,
        });
    }
    let root = mu_star_abs.sqrt();
    let mut n0 = root.floor() as usize + 1;
    // guard against sqrt rounding just below an integer
    while (n0 as f64) <= root {
        n0 += 1;
    }
    while n0 > 1 && ((n0 - 1) as f64) > root {
        n0 -= 1;
    }
    Ok(HorizonPlan {
        mu_star_abs,
        n0,
        n_star: 2 * (n0 - 1),
        no_control_required: false,
    })
}
