//! Flat `key = value` experiment configuration.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use reactive_paths::{ConditioningMethod, GridSpec, SaddleModel2D, WallModel1D, XiSampler};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub message: String,
}

impl ConfigError {
    fn at(line: usize, message: impl Into<String>) -> Self {
        Self {
            line: Some(line),
            message: message.into(),
        }
    }

    pub(crate) fn new(message: impl Into<String>) -> Self {
        Self {
            line: None,
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(line) => write!(f, "config line {line}: {}", self.message),
            None => write!(f, "config: {}", self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    Th2Convergence,
    Th3Convergence,
    Th4Convergence,
    EquivalenceRatios,
    IsometryIdentity,
    ConvolutionCheck,
    SaddleExit,
    CfCheck,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 8] = [
        ExperimentKind::Th2Convergence,
        ExperimentKind::Th3Convergence,
        ExperimentKind::Th4Convergence,
        ExperimentKind::EquivalenceRatios,
        ExperimentKind::IsometryIdentity,
        ExperimentKind::ConvolutionCheck,
        ExperimentKind::SaddleExit,
        ExperimentKind::CfCheck,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Th2Convergence => "th2-convergence",
            ExperimentKind::Th3Convergence => "th3-convergence",
            ExperimentKind::Th4Convergence => "th4-convergence",
            ExperimentKind::EquivalenceRatios => "equivalence-ratios",
            ExperimentKind::IsometryIdentity => "isometry-identity",
            ExperimentKind::ConvolutionCheck => "convolution-check",
            ExperimentKind::SaddleExit => "saddle-exit",
            ExperimentKind::CfCheck => "cf-check",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown experiment '{s}'"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MethodKind {
    HTransform,
    Rejection,
}

impl FromStr for MethodKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "htransform" => Ok(MethodKind::HTransform),
            "rejection" => Ok(MethodKind::Rejection),
            _ => Err(format!(
                "unknown method '{s}' (expected htransform or rejection)"
            )),
        }
    }
}

impl fmt::Display for MethodKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MethodKind::HTransform => "htransform",
            MethodKind::Rejection => "rejection",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub lambda: f64,
    pub mu: f64,
    /// Start of the unstable coordinate (`x1` for the saddle).
    pub x0: f64,
    pub q_minus: f64,
    pub q_plus: f64,
    pub alpha: f64,
    pub xi: XiSampler,
    pub eps_list: Vec<f64>,
    pub samples: usize,
    pub seed: u64,
    pub workers: usize,
    pub out_dir: PathBuf,
    pub n_steps: u32,
    pub bridge_correction: bool,
    pub method: MethodKind,
    pub dt: f64,
    pub max_paths: u64,
    /// Adds a rejection-vs-h-transform comparison to exit-time experiments.
    pub cross_check: bool,
}

impl ExperimentConfig {
    /// Defaults matching the reference runs of each experiment.
    pub fn defaults(experiment: ExperimentKind) -> Self {
        let mut c = Self {
            experiment,
            lambda: 1.0,
            mu: 1.0,
            x0: -0.25,
            q_minus: -1.0,
            q_plus: 0.5,
            alpha: 0.0,
            xi: XiSampler::StandardNormal,
            eps_list: vec![0.5, 0.35, 0.25],
            samples: 10_000,
            seed: 1,
            workers: 1,
            out_dir: PathBuf::from("results"),
            n_steps: 1000,
            bridge_correction: true,
            method: MethodKind::HTransform,
            dt: 1e-4,
            max_paths: 1_000_000,
            cross_check: false,
        };
        match experiment {
            ExperimentKind::Th3Convergence => {
                c.x0 = -0.5;
                c.q_plus = 0.0;
                c.eps_list = vec![0.4, 0.2, 0.1, 0.05];
                c.samples = 100_000;
            }
            ExperimentKind::Th4Convergence => c.x0 = 0.0,
            ExperimentKind::EquivalenceRatios => {
                c.x0 = -0.3;
                c.q_minus = -0.6;
                c.eps_list = vec![0.5, 0.4, 0.3];
                c.samples = 100_000;
            }
            ExperimentKind::IsometryIdentity => {
                c.x0 = -0.3;
                c.eps_list = vec![0.4];
                c.samples = 100_000;
            }
            ExperimentKind::ConvolutionCheck => {
                c.x0 = -0.5;
                c.eps_list = vec![0.3];
                c.samples = 20_000;
            }
            ExperimentKind::SaddleExit => {
                c.mu = 0.25;
                c.alpha = 0.5;
                c.dt = 1e-3;
            }
            ExperimentKind::CfCheck => c.dt = 1e-3,
            ExperimentKind::Th2Convergence => {}
        }
        c
    }

    /// Applies `key = value` lines; `#` starts a comment.
    pub fn apply_text(&mut self, text: &str) -> Result<(), ConfigError> {
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content.split_once('=').ok_or_else(|| {
                ConfigError::at(line, format!("expected key = value, got '{content}'"))
            })?;
            self.set(key.trim(), value.trim())
                .map_err(|m| ConfigError::at(line, m))?;
        }
        Ok(())
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        fn num<T: FromStr>(key: &str, v: &str) -> Result<T, String> {
            v.parse()
                .map_err(|_| format!("invalid value '{v}' for {key}"))
        }
        match key {
            "experiment" => {
                let kind: ExperimentKind = value.parse()?;
                if kind != self.experiment {
                    return Err(format!(
                        "config is for '{kind}' but '{}' was requested",
                        self.experiment
                    ));
                }
            }
            "lambda" => self.lambda = num(key, value)?,
            "mu" => self.mu = num(key, value)?,
            "x0" | "x1" => self.x0 = num(key, value)?,
            "q_minus" => self.q_minus = num(key, value)?,
            "q_plus" => self.q_plus = num(key, value)?,
            "alpha" => self.alpha = num(key, value)?,
            "xi" => {
                self.xi = value
                    .parse()
                    .map_err(|e: reactive_paths::Error| e.to_string())?
            }
            "eps" | "eps_list" => self.eps_list = parse_eps_list(value)?,
            "samples" => self.samples = num(key, value)?,
            "seed" => self.seed = num(key, value)?,
            "workers" => self.workers = num(key, value)?,
            "out" | "out_dir" => self.out_dir = PathBuf::from(value),
            "n_steps" => self.n_steps = num(key, value)?,
            "bridge_correction" => self.bridge_correction = num(key, value)?,
            "method" => self.method = value.parse()?,
            "dt" => self.dt = num(key, value)?,
            "max_paths" => self.max_paths = num(key, value)?,
            "cross_check" => self.cross_check = num(key, value)?,
            _ => return Err(format!("unknown key '{key}'")),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.eps_list.is_empty() {
            return Err(ConfigError::new("eps list is empty"));
        }
        if self.eps_list.windows(2).any(|w| w[1] >= w[0]) {
            return Err(ConfigError::new("eps list must be strictly decreasing"));
        }
        if self.samples < 1000 {
            return Err(ConfigError::new(format!(
                "samples must be at least 1000, got {}",
                self.samples
            )));
        }
        if self.workers == 0 {
            return Err(ConfigError::new("workers must be at least 1"));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(ConfigError::new("dt must be positive"));
        }
        if self.max_paths == 0 {
            return Err(ConfigError::new("max_paths must be positive"));
        }
        GridSpec::new(self.n_steps, self.bridge_correction)
            .map_err(|e| ConfigError::new(e.to_string()))?;
        for &eps in &self.eps_list {
            if self.experiment == ExperimentKind::SaddleExit
                || self.experiment == ExperimentKind::CfCheck
            {
                self.saddle(eps)?;
            } else {
                self.model(eps)?;
            }
        }
        Ok(())
    }

    pub fn model(&self, eps: f64) -> Result<WallModel1D, ConfigError> {
        WallModel1D::new(self.lambda, eps, self.x0, self.q_minus, self.q_plus)
            .map_err(|e| ConfigError::new(e.to_string()))
    }

    pub fn saddle(&self, eps: f64) -> Result<SaddleModel2D, ConfigError> {
        SaddleModel2D::new(
            self.lambda,
            self.mu,
            eps,
            self.x0,
            self.alpha,
            self.xi,
            self.q_minus,
            self.q_plus,
        )
        .map_err(|e| ConfigError::new(e.to_string()))
    }

    pub fn grid(&self) -> GridSpec {
        GridSpec {
            n_steps: self.n_steps,
            bridge_correction: self.bridge_correction,
        }
    }

    pub fn conditioning(&self) -> ConditioningMethod {
        match self.method {
            MethodKind::HTransform => ConditioningMethod::HTransform { dt: self.dt },
            MethodKind::Rejection => ConditioningMethod::Rejection {
                grid: self.grid(),
                max_paths: self.max_paths,
            },
        }
    }

    /// Every setting that influences results, one `key=value` per line in a
    /// fixed order. Output directory and worker count are excluded.
    pub fn canonical(&self) -> String {
        let eps: Vec<String> = self.eps_list.iter().map(|e| format!("{e:?}")).collect();
        [
            format!("experiment={}", self.experiment),
            format!("lambda={:?}", self.lambda),
            format!("mu={:?}", self.mu),
            format!("x0={:?}", self.x0),
            format!("q_minus={:?}", self.q_minus),
            format!("q_plus={:?}", self.q_plus),
            format!("alpha={:?}", self.alpha),
            format!("xi={}", self.xi),
            format!("eps={}", eps.join(",")),
            format!("samples={}", self.samples),
            format!("seed={}", self.seed),
            format!("n_steps={}", self.n_steps),
            format!("bridge_correction={}", self.bridge_correction),
            format!("method={}", self.method),
            format!("dt={:?}", self.dt),
            format!("max_paths={}", self.max_paths),
            format!("cross_check={}", self.cross_check),
        ]
        .join("\n")
            + "\n"
    }
}

pub fn parse_eps_list(value: &str) -> Result<Vec<f64>, String> {
    value
        .split(',')
        .map(|s| {
            let s = s.trim();
            s.parse::<f64>()
                .ok()
                .filter(|e| *e > 0.0 && e.is_finite())
                .ok_or_else(|| format!("invalid eps value '{s}'"))
        })
        .collect()
}
