//! Command implementations behind the `cyclestab` binary.
//!
//! Every command produces one CSV table. With an output path the table goes
//! to that file and a human-readable summary to the console; without one the
//! table goes to the console followed by the summary as `# ` comment lines.
//! Floats in CSV are written with 17 significant digits.

pub mod config;

use std::f64::consts::{FRAC_PI_2, PI};
use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;

use thiserror::Error;

pub use config::{Command, ConfigError, ExperimentConfig, SeedPolicy};

use crate::dynamics::{self, MapModel};
use crate::error::Error;
use crate::gains::{self, ControlGains};
use crate::stability::{self, Witness};

/// Relative disagreement between the two `mu*` methods treated as a fault.
pub const METHOD_AGREEMENT_TOL: f64 = 1e-3;
/// Bisection width used by the sweep in CLI runs.
pub const SWEEP_TOL: f64 = 1e-10;
/// Convergence is judged over this many final states.
pub const CONVERGENCE_TAIL: usize = 100;
pub const CONVERGENCE_TOL: f64 = 1e-6;
const VERIFY_RESOLUTION: usize = 100_000;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Core(#[from] Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("console: {0}")]
    Console(#[from] io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Core(Error::InvalidArgument(_)) => 2,
            CliError::Core(_) => 1,
            CliError::Io { .. } | CliError::Console(_) => 3,
        }
    }
}

/// Formats a float with 17 significant digits.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

struct Report {
    csv: String,
    summary: Vec<String>,
    exit_code: i32,
}

impl Report {
    fn new(header: &str) -> Self {
        Self {
            csv: format!("{header}\n"),
            summary: Vec::new(),
            exit_code: 0,
        }
    }

    fn row(&mut self, fields: &[String]) {
        self.csv.push_str(&fields.join(","));
        self.csv.push('\n');
    }

    fn say(&mut self, line: impl Into<String>) {
        self.summary.push(line.into());
    }
}

/// Runs the configured command, returning the process exit code.
pub fn run(cfg: &ExperimentConfig, console: &mut dyn Write) -> Result<i32, CliError> {
    cfg.validate()?;
    let report = match cfg.command.expect("validated") {
        Command::Design => design(cfg.n)?,
        Command::Stability => stability_report(cfg)?,
        Command::Hodograph => hodograph(cfg)?,
        Command::Simulate => simulate(cfg)?,
        Command::Verify => verify(cfg.n)?,
    };
    match &cfg.output_path {
        Some(path) => {
            fs::write(path, &report.csv).map_err(|source| CliError::Io {
                path: path.clone(),
                source,
            })?;
            for line in &report.summary {
                writeln!(console, "{line}")?;
            }
        }
        None => {
            console.write_all(report.csv.as_bytes())?;
            for line in &report.summary {
                writeln!(console, "# {line}")?;
            }
        }
    }
    Ok(report.exit_code)
}

fn gains_for(cfg: &ExperimentConfig) -> Result<ControlGains, Error> {
    match &cfg.eps {
        Some(eps) => Ok(gains::eps_to_a(eps)),
        None => gains::optimal_gains(cfg.n),
    }
}

fn design(n: usize) -> Result<Report, Error> {
    let g = gains::optimal_gains(n)?;
    let gamma = g.gamma();
    let mut r = Report::new("j,a_j,eps_j,gamma_j");
    for (j, (&a, &gm)) in g.weights().iter().zip(&gamma).enumerate() {
        let eps = g.strengths().get(j).map(|&e| num(e)).unwrap_or_default();
        r.row(&[(j + 1).to_string(), num(a), eps, num(gm)]);
    }
    r.say(format!("optimal gains for N = {n}"));
    r.say(format!(
        "predicted |mu*| = {}, prehistory depth N* = {}",
        n * n,
        g.prehistory_depth()
    ));
    r.say(format!("{:>3} {:>12} {:>12} {:>12}", "j", "a_j", "eps_j", "gamma_j"));
    for (j, (&a, &gm)) in g.weights().iter().zip(&gamma).enumerate() {
        let eps = g
            .strengths()
            .get(j)
            .map(|e| format!("{e:12.9}"))
            .unwrap_or_else(|| format!("{:>12}", "-"));
        r.say(format!("{:>3} {a:12.9} {eps} {gm:12.9}", j + 1));
    }
    Ok(r)
}

fn stability_report(cfg: &ExperimentConfig) -> Result<Report, Error> {
    let g = gains_for(cfg)?;
    let sweep = stability::mu_star_by_sweep(&g, stability::default_mu_max(&g), SWEEP_TOL)?;
    let hodo = stability::mu_star_by_hodograph(&g, cfg.resolution)?;
    let mut r = Report::new("method,mu_star_abs,censored,witness_t,witness_omega,witness_root_re,witness_root_im");
    for rep in [&sweep, &hodo] {
        let mut fields = vec![
            rep.method.name().to_string(),
            num(rep.mu_star_abs),
            rep.censored.to_string(),
        ];
        match &rep.witness {
            Witness::Crossing { t, omega } => fields.extend([num(*t), num(*omega), String::new(), String::new()]),
            Witness::Roots { roots, .. } => {
                fields.extend([String::new(), String::new()]);
                match roots.first() {
                    Some(z) => fields.extend([num(z.re), num(z.im)]),
                    None => fields.extend([String::new(), String::new()]),
                }
            }
        }
        r.row(&fields);
    }
    let rel = (sweep.mu_star_abs - hodo.mu_star_abs).abs() / hodo.mu_star_abs;
    r.say(format!("weights a = {:?}", g.weights()));
    r.say(format!(
        "mu* (root sweep) = {:.10}{}",
        sweep.mu_star_abs,
        if sweep.censored {
            " (censored at sweep limit)"
        } else {
            ""
        }
    ));
    r.say(format!("mu* (hodograph)  = {:.10}", hodo.mu_star_abs));
    r.say(format!("relative difference = {rel:.3e}"));
    for tan in &hodo.tangencies {
        r.say(format!(
            "tangency at t = {:.10}: touches at |mu| = {:.10} without exit",
            tan.t,
            -1.0 / tan.omega
        ));
    }
    if !(rel <= METHOD_AGREEMENT_TOL) {
        r.say(format!(
            "FAIL: methods disagree beyond {METHOD_AGREEMENT_TOL:e} relative"
        ));
        r.exit_code = 1;
    }
    Ok(r)
}

fn hodograph(cfg: &ExperimentConfig) -> Result<Report, Error> {
    let g = gains_for(cfg)?;
    let curve = stability::hodograph_window(&g, cfg.t_min, cfg.t_max, cfg.resolution)?;
    let mut r = Report::new("t,x,y");
    for s in &curve.samples {
        r.row(&[num(s.t), num(s.x), num(s.y)]);
    }
    r.say(format!(
        "{} samples of (sum a_j e^(-i(2j-1)t))^2 for t in [{}, {}]",
        curve.samples.len(),
        cfg.t_min,
        cfg.t_max
    ));
    Ok(r)
}

fn simulate(cfg: &ExperimentConfig) -> Result<Report, Error> {
    let map = MapModel::logistic(cfg.h)?;
    let g = gains_for(cfg)?;
    let seed = match &cfg.seed_policy {
        SeedPolicy::OpenLoopFill => dynamics::open_loop_seed(&map, cfg.x0, 2 * g.horizon() - 1)?,
        SeedPolicy::Explicit(seed) => seed.clone(),
    };
    let traj = dynamics::simulate_closed(&map, &g, &seed, cfg.steps)?;
    let mut r = Report::new("n,x,u");
    for (n, (x, u)) in traj.states.iter().zip(&traj.controls).enumerate() {
        r.row(&[n.to_string(), num(*x), num(*u)]);
    }
    let tail = CONVERGENCE_TAIL.min(traj.len());
    let mut line = format!("escaped={}", traj.escaped());
    if tail >= 4 {
        let est = dynamics::detect_cycle2(&map, &traj, tail, CONVERGENCE_TOL)?;
        line = format!(
            "converged={} eta1={} eta2={} residual={} multiplier={} spread={} {line}",
            est.converged,
            num(est.eta1),
            num(est.eta2),
            num(est.residual),
            num(est.multiplier),
            num(est.spread)
        );
    }
    if let Some(cycle) = map.analytic_cycle() {
        let worst = traj
            .states
            .iter()
            .skip(cfg.burn_in)
            .filter_map(|&x| map.distance_to_cycle(x))
            .fold(0.0, f64::max);
        line.push_str(&format!(
            " analytic_eta1={} analytic_eta2={} max_dist_after_burn_in={}",
            num(cycle.0),
            num(cycle.1),
            num(worst)
        ));
    }
    r.say(line);
    Ok(r)
}

struct VerifyRow {
    j: f64,
    sweep: f64,
    hodograph: f64,
    failures: Vec<String>,
}

fn verify_one(n: usize) -> Result<VerifyRow, Error> {
    let g = gains::optimal_gains(n)?;
    let target = (n * n) as f64;
    let mut failures = Vec::new();

    let j = stability::j_value(&g, VERIFY_RESOLUTION)?;
    if (j - 1.0 / n as f64).abs() > 1e-8 {
        failures.push(format!("J = {j} != 1/N"));
    }
    let sweep = stability::mu_star_by_sweep(&g, stability::default_mu_max(&g), SWEEP_TOL)?.mu_star_abs;
    let hodo = stability::mu_star_by_hodograph(&g, VERIFY_RESOLUTION)?.mu_star_abs;
    if ((sweep - target) / target).abs() > 1e-4 {
        failures.push(format!("sweep mu* = {sweep} != N^2"));
    }
    if ((hodo - target) / target).abs() > 1e-4 {
        failures.push(format!("hodograph mu* = {hodo} != N^2"));
    }
    if ((sweep - hodo) / hodo).abs() > METHOD_AGREEMENT_TOL {
        failures.push("methods disagree".into());
    }
    for k in 1..20 {
        let t = PI * k as f64 / 20.0;
        let res = stability::fejer_identity_residual(n, t)?;
        if res.abs() > 1e-10 {
            failures.push(format!("Fejer identity residual {res:e} at t = {t}"));
            break;
        }
    }
    let s_half = stability::TrigPair::new(&g).sin_part(FRAC_PI_2).abs();
    let gamma1 = g.gamma()[0];
    if (s_half - gamma1.abs()).abs() > 1e-12 {
        failures.push(format!("|S(pi/2)| = {s_half} != |gamma_1| = {gamma1}"));
    }
    if (gamma1 - 1.0 / n as f64).abs() > 1e-12 {
        failures.push(format!("gamma_1 = {gamma1} != 1/N"));
    }
    Ok(VerifyRow {
        j,
        sweep,
        hodograph: hodo,
        failures,
    })
}

fn verify(n_max: usize) -> Result<Report, Error> {
    let mut r = Report::new("N,J,mu_star_sweep,mu_star_hodograph,status");
    let mut failed = Vec::new();
    for n in 1..=n_max {
        let row = verify_one(n)?;
        let status = if row.failures.is_empty() { "pass" } else { "fail" };
        r.row(&[
            n.to_string(),
            num(row.j),
            num(row.sweep),
            num(row.hodograph),
            status.into(),
        ]);
        r.say(format!(
            "N = {n:>2}  J = {:.12}  mu*(sweep) = {:.8}  mu*(hodograph) = {:.8}  {status}",
            row.j, row.sweep, row.hodograph
        ));
        for f in row.failures {
            failed.push(format!("N = {n}: {f}"));
        }
    }
    if failed.is_empty() {
        r.say("all checks passed");
    } else {
        for f in &failed {
            r.say(format!("FAIL {f}"));
        }
        r.exit_code = 1;
    }
    Ok(r)
}
