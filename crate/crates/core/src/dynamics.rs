//! Open- and closed-loop simulation of scalar maps near a 2-cycle.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::gains::ControlGains;

pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// `f(eta1) = eta2`, `f(eta2) = eta1` must hold to this tolerance.
pub const CYCLE_CONSISTENCY_TOL: f64 = 1e-10;

/// A parameterized scalar map on a closed interval.
///
/// When the model carries an analytic 2-cycle, [`MapModel::apply`] maps the
/// two stored cycle points exactly onto each other. Rounding in the plain
/// formula would otherwise move a trajectory started on the cycle off it by
/// an ulp per step, since a floating-point 2-cycle generally does not exist.
#[derive(Clone)]
pub struct MapModel {
    id: String,
    h: f64,
    f: ScalarFn,
    df: ScalarFn,
    domain: (f64, f64),
    cycle: Option<(f64, f64)>,
}

impl fmt::Debug for MapModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MapModel")
            .field("id", &self.id)
            .field("h", &self.h)
            .field("domain", &self.domain)
            .field("cycle", &self.cycle)
            .finish_non_exhaustive()
    }
}

impl MapModel {
    /// `f_h(x) = h x (1 - x)` on `[0, 1]`.
    pub fn logistic(h: f64) -> Result<Self> {
        if !(0.0..=4.0).contains(&h) {
            return Err(Error::invalid(format!(
                "logistic parameter must lie in [0, 4], got {h}"
            )));
        }
        let cycle = (h > 3.0).then(|| {
            let disc = (h * h - 2.0 * h - 3.0).sqrt();
            ((1.0 + h - disc) / (2.0 * h), (1.0 + h + disc) / (2.0 * h))
        });
        Ok(Self {
            id: "logistic".into(),
            h,
            f: Arc::new(move |x| h * x * (1.0 - x)),
            df: Arc::new(move |x| h * (1.0 - 2.0 * x)),
            domain: (0.0, 1.0),
            cycle,
        })
    }

    pub fn custom(
        id: impl Into<String>,
        h: f64,
        f: ScalarFn,
        df: ScalarFn,
        domain: (f64, f64),
        cycle: Option<(f64, f64)>,
    ) -> Result<Self> {
        if !(domain.0 < domain.1) {
            return Err(Error::invalid(format!("empty domain [{}, {}]", domain.0, domain.1)));
        }
        if let Some((e1, e2)) = cycle {
            if e1 == e2 {
                return Err(Error::invalid("cycle points must be distinct"));
            }
            let err = (f(e1) - e2).abs().max((f(e2) - e1).abs());
            if !(err <= CYCLE_CONSISTENCY_TOL) {
                return Err(Error::invalid(format!(
                    "({e1}, {e2}) is not a 2-cycle of the map (error {err:e})"
                )));
            }
        }
        Ok(Self {
            id: id.into(),
            h,
            f,
            df,
            domain,
            cycle,
        })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn parameter(&self) -> f64 {
        self.h
    }

    pub fn domain(&self) -> (f64, f64) {
        self.domain
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.domain.0 && x <= self.domain.1
    }

    pub fn analytic_cycle(&self) -> Option<(f64, f64)> {
        self.cycle
    }

    pub fn apply(&self, x: f64) -> f64 {
        if let Some((e1, e2)) = self.cycle {
            if x == e1 {
                return e2;
            }
            if x == e2 {
                return e1;
            }
        }
        (self.f)(x)
    }

    pub fn derivative(&self, x: f64) -> f64 {
        (self.df)(x)
    }

    /// Distance from `x` to the nearer analytic cycle point.
    pub fn distance_to_cycle(&self, x: f64) -> Option<f64> {
        self.cycle.map(|(e1, e2)| (x - e1).abs().min((x - e2).abs()))
    }
}

/// `f'(eta1) f'(eta2)`.
pub fn multiplier(map: &MapModel, cycle: (f64, f64)) -> f64 {
    map.derivative(cycle.0) * map.derivative(cycle.1)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub states: Vec<f64>,
    /// `controls[n]` is the correction added to `f(x_n)` to produce
    /// `x_{n+1}`; zero for seed steps and for the final state.
    pub controls: Vec<f64>,
    pub map_id: String,
    pub h: f64,
    pub gains: ControlGains,
    pub seed_len: usize,
    /// Index of the first state outside the map's domain; the run stops there.
    pub escaped_at: Option<usize>,
}

impl Trajectory {
    pub fn escaped(&self) -> bool {
        self.escaped_at.is_some()
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }
}

/// History of `len` states obtained by iterating the open-loop map from `x0`.
pub fn open_loop_seed(map: &MapModel, x0: f64, len: usize) -> Result<Vec<f64>> {
    if !map.contains(x0) {
        return Err(Error::invalid(format!(
            "x0 = {x0} lies outside the map domain {:?}",
            map.domain()
        )));
    }
    let mut seed = Vec::with_capacity(len);
    let mut x = x0;
    for _ in 0..len {
        seed.push(x);
        x = map.apply(x);
    }
    Ok(seed)
}

/// Plain iteration `x_{n+1} = f(x_n)` for `steps` steps.
pub fn simulate_open(map: &MapModel, x0: f64, steps: usize) -> Result<Trajectory> {
    simulate_closed(map, &ControlGains::from_strengths(&[]), &[x0], steps)
}

/// Closed-loop iteration with the delayed-feedback correction
/// `u_n = -sum_j eps_j (f(x_{n-2j+2}) - f(x_{n-2j}))`, `x_{n+1} = f(x_n) + u_n`,
/// equal to `x_{n+1} = sum_j a_j f(x_{n-2(j-1)})`. Written as differences,
/// the correction is exactly zero on a synchronized history.
///
/// `seed` supplies `x_0..x_{2N-2}`.
pub fn simulate_closed(map: &MapModel, gains: &ControlGains, seed: &[f64], steps: usize) -> Result<Trajectory> {
    let need = 2 * gains.horizon() - 1;
    if seed.len() != need {
        return Err(Error::invalid(format!(
            "seed must hold exactly {need} states for N = {}, got {}",
            gains.horizon(),
            seed.len()
        )));
    }
    if let Some(x) = seed.iter().find(|&&x| !map.contains(x)) {
        return Err(Error::invalid(format!(
            "seed state {x} lies outside the map domain {:?}",
            map.domain()
        )));
    }
    if steps == 0 {
        return Err(Error::invalid("steps must be at least 1"));
    }

    let total = need + steps;
    let mut states = Vec::with_capacity(total);
    let mut images = Vec::with_capacity(total);
    let mut controls = Vec::with_capacity(total);
    for &x in seed {
        states.push(x);
        images.push(map.apply(x));
        controls.push(0.0);
    }
    let eps = gains.strengths();
    let mut escaped_at = None;
    for n in need - 1..total - 1 {
        let u: f64 = -eps
            .iter()
            .enumerate()
            .map(|(k, e)| e * (images[n - 2 * k] - images[n - 2 * k - 2]))
            .sum::<f64>();
        let next = images[n] + u;
        controls[n] = u;
        states.push(next);
        controls.push(0.0);
        if !next.is_finite() || !map.contains(next) {
            escaped_at = Some(n + 1);
            break;
        }
        images.push(map.apply(next));
    }

    Ok(Trajectory {
        states,
        controls,
        map_id: map.id().to_string(),
        h: map.parameter(),
        gains: gains.clone(),
        seed_len: need,
        escaped_at,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CycleEstimate {
    pub eta1: f64,
    pub eta2: f64,
    /// `max(|f(eta1) - eta2|, |f(eta2) - eta1|)`.
    pub residual: f64,
    pub multiplier: f64,
    /// Largest spread within a parity class over the tail.
    pub spread: f64,
    pub converged: bool,
}

/// Looks for a 2-cycle in the last `tail` states, grouping them by parity
/// of the time index.
pub fn detect_cycle2(map: &MapModel, traj: &Trajectory, tail: usize, tol: f64) -> Result<CycleEstimate> {
    if tail < 4 {
        return Err(Error::invalid(format!("tail must be at least 4, got {tail}")));
    }
    if tail > traj.len() {
        return Err(Error::invalid(format!(
            "tail {tail} exceeds trajectory length {}",
            traj.len()
        )));
    }
    let start = traj.len() - tail;
    // (min, max, sum of offsets from the class's first state, count)
    let mut classes = [(f64::INFINITY, f64::NEG_INFINITY, 0.0, 0usize); 2];
    let anchors = [traj.states[start + (start % 2)], traj.states[start + 1 - (start % 2)]];
    for (i, &x) in traj.states.iter().enumerate().skip(start) {
        let c = &mut classes[i % 2];
        c.0 = c.0.min(x);
        c.1 = c.1.max(x);
        c.2 += x - anchors[i % 2];
        c.3 += 1;
    }
    let spread = classes.iter().map(|c| c.1 - c.0).fold(0.0, f64::max);
    let m0 = anchors[0] + classes[0].2 / classes[0].3 as f64;
    let m1 = anchors[1] + classes[1].2 / classes[1].3 as f64;
    let (eta1, eta2) = if m0 <= m1 { (m0, m1) } else { (m1, m0) };
    let residual = ((map.f)(eta1) - eta2).abs().max(((map.f)(eta2) - eta1).abs());
    let converged = !traj.escaped() && spread.is_finite() && spread < tol && eta2 - eta1 > tol;
    Ok(CycleEstimate {
        eta1,
        eta2,
        residual,
        multiplier: multiplier(map, (eta1, eta2)),
        spread,
        converged,
    })
}

/// Dominant growth factor per double step of the linearized recurrence
///
/// ```text
/// v_m     = mu (a_1 u_m + ... + a_N u_{m-N+1})
/// u_{m+1} =    (a_1 v_m + ... + a_N v_{m-N+1})
/// ```
///
/// i.e. the derivative product split as `f'(eta1) = mu`, `f'(eta2) = 1`.
/// The estimate is the least-squares slope of `log |state|` over the second
/// half of the run. Returns `f64::INFINITY` if the state overflows.
pub fn linearized_growth(gains: &ControlGains, mu: f64, steps: usize) -> Result<f64> {
    if steps < 100 {
        return Err(Error::invalid(format!("steps must be at least 100, got {steps}")));
    }
    if !mu.is_finite() {
        return Err(Error::invalid(format!("multiplier must be finite, got {mu}")));
    }
    let a = gains.weights();
    let n = a.len();
    // u[k] = u_{m-k}, v[k] = v_{m-1-k}
    let mut u: Vec<f64> = (0..n).map(|k| 1.0 / (k as f64 + 1.0)).collect();
    let mut v: Vec<f64> = (0..n).map(|k| 0.5 - 0.1 * k as f64).collect();
    let mut log_scale = 0.0;
    let mut samples = Vec::with_capacity(steps / 2 + 1);

    for m in 0..steps {
        let v_new = mu * a.iter().zip(&u).map(|(a, u)| a * u).sum::<f64>();
        v.rotate_right(1);
        v[0] = v_new;
        let u_new: f64 = a.iter().zip(&v).map(|(a, v)| a * v).sum();
        u.rotate_right(1);
        u[0] = u_new;

        let norm = u.iter().chain(&v).map(|x| x * x).sum::<f64>().sqrt();
        if !norm.is_finite() {
            return Ok(f64::INFINITY);
        }
        if norm == 0.0 {
            return Ok(0.0);
        }
        if m >= steps / 2 {
            samples.push(log_scale + norm.ln());
        }
        u.iter_mut().chain(v.iter_mut()).for_each(|x| *x /= norm);
        log_scale += norm.ln();
    }

    let count = samples.len() as f64;
    let mean_x = (count - 1.0) / 2.0;
    let mean_y = samples.iter().sum::<f64>() / count;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (i, y) in samples.iter().enumerate() {
        let dx = i as f64 - mean_x;
        sxy += dx * (y - mean_y);
        sxx += dx * dx;
    }
    Ok((sxy / sxx).exp())
}
