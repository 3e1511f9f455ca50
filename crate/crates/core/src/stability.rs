//! Critical multipliers of the controlled 2-cycle.
//!
//! With closed-loop weights `a_1..a_N` and cycle multiplier `mu < 0`, the
//! cycle is stable when every root of
//!
//! ```text
//! f(nu) = nu^(2N-1) + k (a_1 nu^(2N-2) + a_2 nu^(2N-4) + ... + a_N),  k = i sqrt|mu|
//! ```
//!
//! lies in the open unit disk. The first `|mu|` at which a root leaves the
//! disk is `mu*`. It is computed two ways: by sweeping `|mu|` and finding
//! roots, and from the curve `t -> q(t)^2` with
//! `q(t) = sum a_j e^{-i(2j-1)t} = C(t) - i S(t)`, whose crossings of the
//! negative real axis at `-r` put a root on the unit circle at `|mu| = 1/r`.
//!
//! Only transversal crossings count. At the optimal gains `C` has double
//! zeros inside `(0, pi/2)` for `N >= 3`; there the roots touch the circle
//! and return inside, so those points are reported as tangencies and do not
//! set `mu*`.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gains::{a_to_gamma, ControlGains};
use crate::polyroots::{self, ComplexPolynomial, RootSet};

pub const MIN_RESOLUTION: usize = 1000;
/// Sample count per axis of the coarse `|mu|` sweep.
pub const SWEEP_STEPS: usize = 1000;
/// A root counts as outside the disk once its modulus exceeds `1 + EXIT_MARGIN`.
pub const EXIT_MARGIN: f64 = 1e-9;
/// Crossings are polished to this width in `t`.
pub const CROSSING_TOL: f64 = 1e-12;
/// `|Im q^2|` below this at a local minimum marks a tangency.
pub const TANGENCY_TOL: f64 = 1e-10;
/// Grid resolution used by [`brute_force_j_min`] for each `J` evaluation.
pub const BRUTE_FORCE_RESOLUTION: usize = 2000;
pub const BRUTE_FORCE_BOX: (f64, f64) = (-1.0, 2.0);
const BRUTE_FORCE_ROUNDS: usize = 2;
const SWEEP_CHUNK: usize = 64;

/// The conjugate pair `C(t) = sum a_j cos(2j-1)t`, `S(t) = sum a_j sin(2j-1)t`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigPair {
    gains: ControlGains,
    gamma: Vec<f64>,
}

impl TrigPair {
    pub fn new(gains: &ControlGains) -> Self {
        Self {
            gamma: a_to_gamma(gains.weights()),
            gains: gains.clone(),
        }
    }

    pub fn gains(&self) -> &ControlGains {
        &self.gains
    }

    pub fn cos_part(&self, t: f64) -> f64 {
        self.weighted(t, f64::cos)
    }

    pub fn sin_part(&self, t: f64) -> f64 {
        self.weighted(t, f64::sin)
    }

    fn weighted(&self, t: f64, trig: fn(f64) -> f64) -> f64 {
        self.gains
            .weights()
            .iter()
            .enumerate()
            .map(|(j, a)| a * trig((2 * j + 1) as f64 * t))
            .sum()
    }

    /// `q(t) = sum a_j e^{-i(2j-1)t}`.
    pub fn symbol(&self, t: f64) -> Complex64 {
        Complex64::new(self.cos_part(t), -self.sin_part(t))
    }

    /// `C(t)/cos t = gamma_1 + 2 sum_{s>=2} gamma_s cos 2(s-1)t`. Smooth at
    /// `pi/2`, where `C` itself always vanishes.
    pub fn reduced_cos_part(&self, t: f64) -> f64 {
        let tail: f64 = self.gamma[1..]
            .iter()
            .enumerate()
            .map(|(k, g)| g * ((2 * (k + 1)) as f64 * t).cos())
            .sum();
        self.gamma[0] + 2.0 * tail
    }

    fn abs_weight_sum(&self) -> f64 {
        self.gains.weights().iter().map(|a| a.abs()).sum()
    }
}

/// Which square root of `mu` is used for `k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Plus,
    Minus,
}

/// Characteristic polynomial with `k = +i sqrt|mu|`.
pub fn char_poly(gains: &ControlGains, mu: f64) -> Result<ComplexPolynomial> {
    char_poly_branch(gains, mu, Branch::Plus)
}

pub fn char_poly_branch(gains: &ControlGains, mu: f64, branch: Branch) -> Result<ComplexPolynomial> {
    if !(mu < 0.0) || !mu.is_finite() {
        return Err(Error::invalid(format!(
            "multiplier must be negative and finite, got {mu}"
        )));
    }
    let n = gains.horizon();
    let sign = match branch {
        Branch::Plus => 1.0,
        Branch::Minus => -1.0,
    };
    let k = Complex64::new(0.0, sign * (-mu).sqrt());
    let degree = 2 * n - 1;
    let mut coeffs = vec![Complex64::new(0.0, 0.0); degree + 1];
    coeffs[degree] = Complex64::new(1.0, 0.0);
    for (j, &a) in gains.weights().iter().enumerate() {
        coeffs[degree - 1 - 2 * j] = k * a;
    }
    Ok(ComplexPolynomial::new(coeffs))
}

fn roots_at(gains: &ControlGains, m: f64) -> Result<RootSet> {
    let p = char_poly(gains, -m)?;
    polyroots::find_roots(&p, polyroots::DEFAULT_TOL, polyroots::DEFAULT_MAX_ITER).map_err(|e| {
        Error::RootsAtMultiplier {
            mu: -m,
            source: Box::new(e),
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    RootSweep,
    Hodograph,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::RootSweep => "root_sweep",
            Method::Hodograph => "hodograph",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Witness {
    /// Roots on (or just past) the unit circle at multiplier `mu`.
    Roots { mu: f64, roots: Vec<Complex64> },
    /// Crossing of the negative real axis at parameter `t` with value `omega`.
    Crossing { t: f64, omega: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tangency {
    pub t: f64,
    pub omega: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityReport {
    pub mu_star_abs: f64,
    pub method: Method,
    pub witness: Witness,
    /// No exit was found below the sweep limit; `mu_star_abs` is that limit.
    pub censored: bool,
    /// Points where the curve touches the negative real axis without crossing.
    pub tangencies: Vec<Tangency>,
    pub gains: ControlGains,
}

/// Default sweep limit `4 N^2`, four times the best attainable `mu*`.
pub fn default_mu_max(gains: &ControlGains) -> f64 {
    let n = gains.horizon() as f64;
    4.0 * n * n
}

/// Smallest `|mu|` in `(0, mu_max]` at which a root leaves the unit disk,
/// located by an increasing sweep with step `mu_max / 1000` and then
/// bisection to width `tol`.
pub fn mu_star_by_sweep(gains: &ControlGains, mu_max: f64, tol: f64) -> Result<StabilityReport> {
    if !(mu_max > 0.0) || !mu_max.is_finite() {
        return Err(Error::invalid(format!("mu_max must be positive, got {mu_max}")));
    }
    if !(tol > 0.0) {
        return Err(Error::invalid(format!("tolerance must be positive, got {tol}")));
    }
    let step = mu_max / SWEEP_STEPS as f64;
    let exits = |m: f64| -> Result<(bool, RootSet)> {
        let rs = roots_at(gains, m)?;
        Ok((rs.max_modulus > 1.0 + EXIT_MARGIN, rs))
    };

    let mut first_exit = None;
    let mut start = 1;
    while start <= SWEEP_STEPS && first_exit.is_none() {
        let end = (start + SWEEP_CHUNK).min(SWEEP_STEPS + 1);
        let flags: Vec<bool> = (start..end)
            .into_par_iter()
            .map(|i| exits(i as f64 * step).map(|(out, _)| out))
            .collect::<Result<_>>()?;
        first_exit = flags.iter().position(|&f| f).map(|k| start + k);
        start = end;
    }

    let Some(i) = first_exit else {
        let rs = roots_at(gains, mu_max)?;
        let top = rs.roots_near_modulus(rs.max_modulus, 1e-9);
        return Ok(StabilityReport {
            mu_star_abs: mu_max,
            method: Method::RootSweep,
            witness: Witness::Roots {
                mu: -mu_max,
                roots: top,
            },
            censored: true,
            tangencies: Vec::new(),
            gains: gains.clone(),
        });
    };

    let mut lo = (i - 1) as f64 * step;
    let mut hi = i as f64 * step;
    let (_, mut hi_roots) = exits(hi)?;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let (out, rs) = exits(mid)?;
        if out {
            hi = mid;
            hi_roots = rs;
        } else {
            lo = mid;
        }
    }
    let critical = hi_roots.roots_near_modulus(1.0, 1e-6);
    Ok(StabilityReport {
        mu_star_abs: 0.5 * (lo + hi),
        method: Method::RootSweep,
        witness: Witness::Roots {
            mu: -hi,
            roots: critical,
        },
        censored: false,
        tangencies: Vec::new(),
        gains: gains.clone(),
    })
}

/// Real parts of `q(t)^2` at the transversal zeros of `Im q(t)^2` in
/// `[0, pi]`, as `(t, Re)` pairs in increasing `t`.
pub fn axis_crossings(gains: &ControlGains, resolution: usize) -> Result<Vec<(f64, f64)>> {
    Ok(hodograph_scan(gains, resolution)?.0)
}

fn check_resolution(resolution: usize) -> Result<()> {
    if resolution < MIN_RESOLUTION {
        return Err(Error::invalid(format!(
            "resolution must be at least {MIN_RESOLUTION}, got {resolution}"
        )));
    }
    Ok(())
}

#[allow(clippy::type_complexity)]
fn hodograph_scan(gains: &ControlGains, resolution: usize) -> Result<(Vec<(f64, f64)>, Vec<Tangency>)> {
    check_resolution(resolution)?;
    let pair = TrigPair::new(gains);
    let im_sq = |t: f64| {
        let q = pair.symbol(t);
        2.0 * q.re * q.im
    };
    let ts: Vec<f64> = (0..=resolution).map(|i| PI * i as f64 / resolution as f64).collect();
    let vals: Vec<f64> = ts.iter().map(|&t| im_sq(t)).collect();
    let scale = pair.abs_weight_sum();
    let floor = 8.0 * gains.horizon() as f64 * f64::EPSILON * scale * scale;

    let crossings = sign_change_brackets(&ts, &vals, floor)
        .into_iter()
        .map(|(lo, hi)| {
            let t = bisect_sign(im_sq, lo, hi, CROSSING_TOL);
            (t, pair.symbol(t).powi(2).re)
        })
        .collect();

    let mut tangencies = Vec::new();
    for i in 1..vals.len() - 1 {
        let (l, m, r) = (vals[i - 1], vals[i], vals[i + 1]);
        let same_side = (l > floor && r > floor) || (l < -floor && r < -floor);
        if !same_side || m.abs() > l.abs() || m.abs() > r.abs() {
            continue;
        }
        let t = golden_min(|t| im_sq(t).abs(), ts[i - 1], ts[i + 1], CROSSING_TOL);
        let q2 = pair.symbol(t).powi(2);
        if q2.im.abs() < TANGENCY_TOL && q2.re < 0.0 {
            tangencies.push(Tangency { t, omega: q2.re });
        }
    }
    Ok((crossings, tangencies))
}

/// `mu*` as `-1 / (most negative real part at an axis crossing)`.
pub fn mu_star_by_hodograph(gains: &ControlGains, resolution: usize) -> Result<StabilityReport> {
    let (crossings, tangencies) = hodograph_scan(gains, resolution)?;
    let (t, omega) = crossings
        .iter()
        .copied()
        .filter(|&(_, re)| re < 0.0)
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .ok_or_else(|| {
            Error::Consistency(format!(
                "no crossing of the negative real axis for weights {:?}; the minimum over crossings must be negative",
                gains.weights()
            ))
        })?;
    Ok(StabilityReport {
        mu_star_abs: -1.0 / omega,
        method: Method::Hodograph,
        witness: Witness::Crossing { t, omega },
        censored: false,
        tangencies,
        gains: gains.clone(),
    })
}

/// Minimum of the real parts at the axis crossings, with its parameter.
pub fn min_omega(gains: &ControlGains, resolution: usize) -> Result<(f64, f64)> {
    let report = mu_star_by_hodograph(gains, resolution)?;
    match report.witness {
        Witness::Crossing { t, omega } => Ok((t, omega)),
        Witness::Roots { .. } => unreachable!("hodograph reports crossings"),
    }
}

/// `max |S(t)|` over the sign changes of `C` in `(0, pi/2]`, `pi/2` included.
pub fn j_value(gains: &ControlGains, resolution: usize) -> Result<f64> {
    check_resolution(resolution)?;
    let pair = TrigPair::new(gains);
    Ok(j_value_unchecked(&pair, resolution))
}

fn j_value_unchecked(pair: &TrigPair, resolution: usize) -> f64 {
    let g = |t: f64| pair.reduced_cos_part(t);
    let ts: Vec<f64> = (1..=resolution)
        .map(|i| FRAC_PI_2 * i as f64 / resolution as f64)
        .collect();
    let vals: Vec<f64> = ts.iter().map(|&t| g(t)).collect();
    let gamma_scale: f64 = pair.gamma.iter().map(|x| x.abs()).sum();
    let floor = 16.0 * pair.gamma.len() as f64 * f64::EPSILON * gamma_scale;
    sign_change_brackets(&ts, &vals, floor)
        .into_iter()
        .map(|(lo, hi)| pair.sin_part(bisect_sign(g, lo, hi, CROSSING_TOL)).abs())
        .fold(pair.sin_part(FRAC_PI_2).abs(), f64::max)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BruteForceResult {
    pub best_j: f64,
    pub best_a: Vec<f64>,
}

/// Grid search for the weights minimizing [`j_value`].
///
/// The free coordinates `a_1..a_{N-1}` run over a uniform grid of
/// `grid_density` points per axis in `[-1, 2]`, with `a_N = 1 - sum` kept in
/// the same box. Two refinement rounds follow, each on a box ten times
/// narrower centred on the incumbent. Ties break by value, then by the
/// weights in lexicographic order, so the result does not depend on the
/// thread schedule.
pub fn brute_force_j_min(n: usize, grid_density: usize) -> Result<BruteForceResult> {
    if !(1..=4).contains(&n) {
        return Err(Error::invalid(format!("brute force supports N in 1..=4, got {n}")));
    }
    if n == 1 {
        let gains = ControlGains::from_strengths(&[]);
        return Ok(BruteForceResult {
            best_j: j_value_unchecked(&TrigPair::new(&gains), BRUTE_FORCE_RESOLUTION),
            best_a: vec![1.0],
        });
    }
    if grid_density < 2 {
        return Err(Error::invalid(format!(
            "grid density must be at least 2, got {grid_density}"
        )));
    }
    let free = n - 1;
    let (box_lo, box_hi) = BRUTE_FORCE_BOX;
    let mut lo = vec![box_lo; free];
    let mut hi = vec![box_hi; free];
    let mut best: Option<(f64, Vec<f64>)> = None;

    for round in 0..=BRUTE_FORCE_ROUNDS {
        if round > 0 {
            let (_, a) = best.as_ref().expect("incumbent exists after first round");
            for k in 0..free {
                let half = (hi[k] - lo[k]) / 20.0;
                lo[k] = (a[k] - half).max(box_lo);
                hi[k] = (a[k] + half).min(box_hi);
            }
        }
        let total = grid_density.pow(free as u32);
        let round_best = (0..total)
            .into_par_iter()
            .filter_map(|mut idx| {
                let mut a = Vec::with_capacity(n);
                for k in 0..free {
                    let i = idx % grid_density;
                    idx /= grid_density;
                    a.push(lo[k] + (hi[k] - lo[k]) * i as f64 / (grid_density - 1) as f64);
                }
                let last = 1.0 - a.iter().sum::<f64>();
                if !(box_lo..=box_hi).contains(&last) {
                    return None;
                }
                a.push(last);
                let gains = ControlGains::from_weights(&a).ok()?;
                Some((j_value_unchecked(&TrigPair::new(&gains), BRUTE_FORCE_RESOLUTION), a))
            })
            .min_by(cmp_candidates);
        best = match (best, round_best) {
            (Some(b), Some(r)) => Some(std::cmp::min_by(b, r, cmp_candidates)),
            (b, r) => b.or(r),
        };
    }
    let (best_j, best_a) = best.ok_or_else(|| Error::Consistency("empty brute-force grid".into()))?;
    Ok(BruteForceResult { best_j, best_a })
}

fn cmp_candidates(x: &(f64, Vec<f64>), y: &(f64, Vec<f64>)) -> std::cmp::Ordering {
    x.0.total_cmp(&y.0).then_with(|| {
        x.1.iter()
            .zip(&y.1)
            .map(|(p, q)| p.total_cmp(q))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    })
}

/// `C0(t) - (sin Nt / (N sin t))^2 cos t` for the optimal weights.
pub fn fejer_identity_residual(n: usize, t: f64) -> Result<f64> {
    let gains = ControlGains::optimal(n)?;
    let s = t.sin();
    if !t.is_finite() || s.abs() < 1e-12 {
        return Err(Error::invalid(format!("sin t vanishes at t = {t}")));
    }
    let kernel = (n as f64 * t).sin() / (n as f64 * s);
    Ok(TrigPair::new(&gains).cos_part(t) - kernel * kernel * t.cos())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HodographSample {
    pub t: f64,
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HodographCurve {
    pub samples: Vec<HodographSample>,
    pub resolution: usize,
}

/// Uniform samples of `q(t)^2` over `[0, 2 pi]`, endpoints included.
pub fn hodograph_curve(gains: &ControlGains, resolution: usize) -> Result<HodographCurve> {
    hodograph_window(gains, 0.0, TAU, resolution)
}

/// Uniform samples of `q(t)^2` over `[t_start, t_end]`, endpoints included.
pub fn hodograph_window(gains: &ControlGains, t_start: f64, t_end: f64, resolution: usize) -> Result<HodographCurve> {
    if resolution < 2 {
        return Err(Error::invalid(format!(
            "resolution must be at least 2, got {resolution}"
        )));
    }
    if !(t_start.is_finite() && t_end.is_finite() && t_start < t_end) {
        return Err(Error::invalid(format!("bad window [{t_start}, {t_end}]")));
    }
    let pair = TrigPair::new(gains);
    let span = t_end - t_start;
    let samples = (0..resolution)
        .map(|i| {
            let t = if i + 1 == resolution {
                t_end
            } else {
                t_start + span * i as f64 / (resolution - 1) as f64
            };
            let w = pair.symbol(t).powi(2);
            HodographSample { t, x: w.re, y: w.im }
        })
        .collect();
    Ok(HodographCurve { samples, resolution })
}

/// Brackets `(t_prev, t_next)` around sign changes of sampled values,
/// ignoring samples with magnitude at or below `floor`.
fn sign_change_brackets(ts: &[f64], vals: &[f64], floor: f64) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    let mut last: Option<(f64, bool)> = None;
    for (&t, &v) in ts.iter().zip(vals) {
        if v.abs() <= floor {
            continue;
        }
        let positive = v > 0.0;
        if let Some((t_prev, was_positive)) = last {
            if was_positive != positive {
                out.push((t_prev, t));
            }
        }
        last = Some((t, positive));
    }
    out
}

fn bisect_sign(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let lo_positive = f(lo) > 0.0;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let v = f(mid);
        if v == 0.0 {
            return mid;
        }
        if (v > 0.0) == lo_positive {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}
