//! Flat `key = value` experiment configuration.
//!
//! ```text
//! # comments start with '#'
//! command = simulate
//! map = logistic
//! h = 3.95
//! N = 2
//! eps = 0.25
//! x0 = 0.3
//! steps = 20000
//! burn_in = 10000
//! resolution = 10000
//! out = trajectory.csv
//! seed_policy = open-loop-fill
//! ```

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`, got {text:?}")]
    Syntax { line: usize, text: String },
    #[error("line {line}: unknown key {key:?}")]
    UnknownKey { line: usize, key: String },
    #[error("bad value for {key}: {value:?} ({reason})")]
    BadValue { key: String, value: String, reason: String },
    #[error("invalid configuration: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    Design,
    Stability,
    Hodograph,
    Simulate,
    Verify,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Design => "design",
            Command::Stability => "stability",
            Command::Hodograph => "hodograph",
            Command::Simulate => "simulate",
            Command::Verify => "verify",
        }
    }
}

impl FromStr for Command {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "design" => Ok(Command::Design),
            "stability" => Ok(Command::Stability),
            "hodograph" => Ok(Command::Hodograph),
            "simulate" => Ok(Command::Simulate),
            "verify" => Ok(Command::Verify),
            _ => Err(format!("unknown command {s:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SeedPolicy {
    /// Iterate the open-loop map from `x0` to fill the history.
    OpenLoopFill,
    Explicit(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub command: Option<Command>,
    pub map_id: String,
    pub h: f64,
    pub n: usize,
    /// Feedback strengths; when present they override `n` (`N = len + 1`).
    pub eps: Option<Vec<f64>>,
    pub x0: f64,
    pub steps: usize,
    pub burn_in: usize,
    pub resolution: usize,
    pub output_path: Option<PathBuf>,
    pub seed_policy: SeedPolicy,
    pub t_min: f64,
    pub t_max: f64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            command: None,
            map_id: "logistic".into(),
            h: 3.95,
            n: 2,
            eps: None,
            x0: 0.3,
            steps: 20_000,
            burn_in: 10_000,
            resolution: 10_000,
            output_path: None,
            seed_policy: SeedPolicy::OpenLoopFill,
            t_min: 0.0,
            t_max: std::f64::consts::TAU,
        }
    }
}

fn parse_list(key: &str, value: &str) -> Result<Vec<f64>, ConfigError> {
    let value = value.trim();
    if value.is_empty() || value == "none" {
        return Ok(Vec::new());
    }
    value.split(',').map(|s| parse_num(key, s.trim())).collect()
}

fn parse_num<T: FromStr>(key: &str, value: &str) -> Result<T, ConfigError>
where
    T::Err: fmt::Display,
{
    value.parse().map_err(|e: T::Err| ConfigError::BadValue {
        key: key.into(),
        value: value.into(),
        reason: e.to_string(),
    })
}

fn join(xs: &[f64]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = Self::default();
        let mut explicit_seed = None;
        let mut explicit_policy = false;
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(ConfigError::Syntax {
                    line: i + 1,
                    text: raw.into(),
                });
            };
            let (key, value) = (key.trim(), value.trim());
            match key {
                "command" => {
                    cfg.command = Some(value.parse().map_err(|reason| ConfigError::BadValue {
                        key: key.into(),
                        value: value.into(),
                        reason,
                    })?)
                }
                "map" => cfg.map_id = value.to_string(),
                "h" => cfg.h = parse_num(key, value)?,
                "N" => cfg.n = parse_num(key, value)?,
                "eps" => cfg.eps = Some(parse_list(key, value)?),
                "x0" => cfg.x0 = parse_num(key, value)?,
                "steps" => cfg.steps = parse_num(key, value)?,
                "burn_in" => cfg.burn_in = parse_num(key, value)?,
                "resolution" => cfg.resolution = parse_num(key, value)?,
                "out" => cfg.output_path = Some(PathBuf::from(value)),
                "t_min" => cfg.t_min = parse_num(key, value)?,
                "t_max" => cfg.t_max = parse_num(key, value)?,
                "seed_policy" => match value {
                    "open-loop-fill" => explicit_policy = false,
                    "explicit" => explicit_policy = true,
                    _ => {
                        return Err(ConfigError::BadValue {
                            key: key.into(),
                            value: value.into(),
                            reason: "expected open-loop-fill or explicit".into(),
                        })
                    }
                },
                "seed" => explicit_seed = Some(parse_list(key, value)?),
                _ => {
                    return Err(ConfigError::UnknownKey {
                        line: i + 1,
                        key: key.into(),
                    })
                }
            }
        }
        cfg.seed_policy = match (explicit_policy, explicit_seed) {
            (true, Some(seed)) => SeedPolicy::Explicit(seed),
            (true, None) => return Err(ConfigError::Invalid("seed_policy = explicit needs a seed list".into())),
            (false, _) => SeedPolicy::OpenLoopFill,
        };
        if let Some(eps) = &cfg.eps {
            cfg.n = eps.len() + 1;
        }
        Ok(cfg)
    }

    /// Checks the cross-field invariants for the selected command.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let cmd = self
            .command
            .ok_or_else(|| ConfigError::Invalid("no command given".into()))?;
        if self.n == 0 {
            return Err(ConfigError::Invalid("N must be at least 1".into()));
        }
        if let Some(eps) = &self.eps {
            if eps.len() + 1 != self.n {
                return Err(ConfigError::Invalid(format!(
                    "{} strengths given but N = {}",
                    eps.len(),
                    self.n
                )));
            }
            if eps.iter().any(|e| !e.is_finite()) {
                return Err(ConfigError::Invalid("strengths must be finite".into()));
            }
        }
        match cmd {
            Command::Simulate => {
                if self.map_id != "logistic" {
                    return Err(ConfigError::Invalid(format!(
                        "unknown map {:?}; available: logistic",
                        self.map_id
                    )));
                }
                if self.steps <= self.burn_in {
                    return Err(ConfigError::Invalid(format!(
                        "steps ({}) must exceed burn_in ({})",
                        self.steps, self.burn_in
                    )));
                }
            }
            Command::Stability if self.resolution < crate::stability::MIN_RESOLUTION => {
                return Err(ConfigError::Invalid(format!(
                    "resolution must be at least {} for stability",
                    crate::stability::MIN_RESOLUTION
                )));
            }
            Command::Hodograph if self.resolution < 2 || !(self.t_min < self.t_max) => {
                return Err(ConfigError::Invalid(
                    "hodograph needs resolution >= 2 and t_min < t_max".into(),
                ));
            }
            Command::Verify if self.n > 10 => {
                return Err(ConfigError::Invalid(format!("verify supports N <= 10, got {}", self.n)));
            }
            _ => {}
        }
        Ok(())
    }
}

impl fmt::Display for ExperimentConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(cmd) = self.command {
            writeln!(f, "command = {}", cmd.name())?;
        }
        writeln!(f, "map = {}", self.map_id)?;
        writeln!(f, "h = {}", self.h)?;
        writeln!(f, "N = {}", self.n)?;
        if let Some(eps) = &self.eps {
            writeln!(
                f,
                "eps = {}",
                if eps.is_empty() { "none".to_string() } else { join(eps) }
            )?;
        }
        writeln!(f, "x0 = {}", self.x0)?;
        writeln!(f, "steps = {}", self.steps)?;
        writeln!(f, "burn_in = {}", self.burn_in)?;
        writeln!(f, "resolution = {}", self.resolution)?;
        writeln!(f, "t_min = {}", self.t_min)?;
        writeln!(f, "t_max = {}", self.t_max)?;
        if let Some(out) = &self.output_path {
            writeln!(f, "out = {}", out.display())?;
        }
        match &self.seed_policy {
            SeedPolicy::OpenLoopFill => writeln!(f, "seed_policy = open-loop-fill"),
            SeedPolicy::Explicit(seed) => {
                writeln!(f, "seed_policy = explicit")?;
                writeln!(f, "seed = {}", join(seed))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_documented_example() {
        let cfg = ExperimentConfig::parse(
            "# stabilized run\ncommand = simulate\nmap = logistic\nh = 3.95\neps = 0.25\nx0 = 0.3\nsteps = 20000\nburn_in = 10000\nout = run.csv\n",
        )
        .unwrap();
        assert_eq!(cfg.command, Some(Command::Simulate));
        assert_eq!(cfg.n, 2);
        assert_eq!(cfg.eps, Some(vec![0.25]));
        assert_eq!(cfg.output_path, Some(PathBuf::from("run.csv")));
        cfg.validate().unwrap();
    }

    #[test]
    fn empty_eps_means_no_control() {
        let cfg = ExperimentConfig::parse("eps = none").unwrap();
        assert_eq!(cfg.eps, Some(vec![]));
        assert_eq!(cfg.n, 1);
    }

    #[test]
    fn errors_are_specific() {
        assert!(matches!(
            ExperimentConfig::parse("h 3"),
            Err(ConfigError::Syntax { line: 1, .. })
        ));
        assert!(matches!(
            ExperimentConfig::parse("\nfoo = 1"),
            Err(ConfigError::UnknownKey { line: 2, .. })
        ));
        assert!(matches!(
            ExperimentConfig::parse("h = x"),
            Err(ConfigError::BadValue { .. })
        ));
        assert!(matches!(
            ExperimentConfig::parse("seed_policy = explicit"),
            Err(ConfigError::Invalid(_))
        ));
    }

    #[test]
    fn validation_rules() {
        let mut cfg = ExperimentConfig {
            command: Some(Command::Simulate),
            ..Default::default()
        };
        cfg.validate().unwrap();
        cfg.burn_in = cfg.steps;
        assert!(cfg.validate().is_err());
        let cfg = ExperimentConfig {
            command: Some(Command::Design),
            n: 0,
            ..Default::default()
        };
        assert!(cfg.validate().is_err());
        let cfg = ExperimentConfig {
            command: Some(Command::Verify),
            n: 11,
            ..Default::default()
        };
        assert!(cfg.validate().is_err());
        assert!(ExperimentConfig::default().validate().is_err());
    }

    #[test]
    fn explicit_seed_round_trip() {
        let text = "command = simulate\nseed_policy = explicit\nseed = 0.1,0.2,0.30000000000000004\neps = 0.25\n";
        let cfg = ExperimentConfig::parse(text).unwrap();
        assert_eq!(
            cfg.seed_policy,
            SeedPolicy::Explicit(vec![0.1, 0.2, 0.30000000000000004])
        );
        let again = ExperimentConfig::parse(&cfg.to_string()).unwrap();
        assert_eq!(cfg, again);
        assert_eq!(cfg.to_string(), again.to_string());
    }
}
