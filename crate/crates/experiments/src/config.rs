//! Experiment configuration: ids, `key = value` files, and list parsing.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use inexact_core::krylov::CriterionKind;
use inexact_core::problems::transmission::{DnOrdering, InnerGuess};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ExperimentId {
    ScalarDirect,
    ScalarAdaptive,
    LinearNested,
    ScalarNested,
    Picard,
    TransmissionError,
    TransmissionIters,
    TransmissionEfficiency,
}

impl ExperimentId {
    pub const ALL: [ExperimentId; 8] = [
        ExperimentId::ScalarDirect,
        ExperimentId::ScalarAdaptive,
        ExperimentId::LinearNested,
        ExperimentId::ScalarNested,
        ExperimentId::Picard,
        ExperimentId::TransmissionError,
        ExperimentId::TransmissionIters,
        ExperimentId::TransmissionEfficiency,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentId::ScalarDirect => "scalar-direct",
            ExperimentId::ScalarAdaptive => "scalar-adaptive",
            ExperimentId::LinearNested => "linear-nested",
            ExperimentId::ScalarNested => "scalar-nested",
            ExperimentId::Picard => "picard",
            ExperimentId::TransmissionError => "transmission-error",
            ExperimentId::TransmissionIters => "transmission-iters",
            ExperimentId::TransmissionEfficiency => "transmission-efficiency",
        }
    }
}

impl fmt::Display for ExperimentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentId {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ExperimentId::ALL
            .into_iter()
            .find(|id| id.name() == s)
            .ok_or_else(|| ConfigError::UnknownExperiment(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Csv,
    Markdown,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("unknown experiment id `{0}` (expected one of: {ids})", ids = id_list())]
    UnknownExperiment(String),
    #[error("no experiment selected")]
    MissingExperiment,
    #[error("line {line}: expected `key = value`")]
    MissingEquals { line: usize },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: key `{key}` given twice")]
    DuplicateKey { line: usize, key: String },
    #[error("{key}: {message}")]
    InvalidValue { key: String, message: String },
    #[error("invalid number `{0}`")]
    InvalidNumber(String),
    #[error("empty list")]
    EmptyList,
}

fn id_list() -> String {
    ExperimentId::ALL
        .iter()
        .map(|id| id.name())
        .collect::<Vec<_>>()
        .join(", ")
}

/// Parses a number, also accepting a fraction `p/q` such as `1/10`.
pub fn parse_number(s: &str) -> Result<f64, ConfigError> {
    let s = s.trim();
    let bad = || ConfigError::InvalidNumber(s.to_string());
    let value = match s.split_once('/') {
        Some((num, den)) => {
            let num: f64 = num.trim().parse().map_err(|_| bad())?;
            let den: f64 = den.trim().parse().map_err(|_| bad())?;
            num / den
        }
        None => s.parse().map_err(|_| bad())?,
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(bad())
    }
}

/// Parses a comma- or whitespace-separated list of numbers.
pub fn parse_list(s: &str) -> Result<Vec<f64>, ConfigError> {
    let values = s
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(parse_number)
        .collect::<Result<Vec<_>, _>>()?;
    if values.is_empty() {
        return Err(ConfigError::EmptyList);
    }
    Ok(values)
}

pub fn parse_criterion(s: &str) -> Result<CriterionKind, ConfigError> {
    match s.trim() {
        "rel" => Ok(CriterionKind::RelativeToInitialResidual),
        "relb" => Ok(CriterionKind::RelativeToRhs),
        "abs" => Ok(CriterionKind::Absolute),
        other => Err(ConfigError::InvalidValue {
            key: "criterion".into(),
            message: format!("expected rel, relb or abs, got `{other}`"),
        }),
    }
}

pub fn criterion_name(kind: CriterionKind) -> &'static str {
    match kind {
        CriterionKind::RelativeToInitialResidual => "rel",
        CriterionKind::RelativeToRhs => "relb",
        CriterionKind::Absolute => "abs",
    }
}

fn parse_inner_guess(s: &str) -> Result<InnerGuess, ConfigError> {
    match s.trim() {
        "previous" => Ok(InnerGuess::Previous),
        "zero" => Ok(InnerGuess::Zero),
        other => Err(ConfigError::InvalidValue {
            key: "inner-guess".into(),
            message: format!("expected previous or zero, got `{other}`"),
        }),
    }
}

fn parse_ordering(s: &str) -> Result<DnOrdering, ConfigError> {
    match s.trim() {
        "lagged" => Ok(DnOrdering::Lagged),
        "sequential" => Ok(DnOrdering::Sequential),
        other => Err(ConfigError::InvalidValue {
            key: "ordering".into(),
            message: format!("expected lagged or sequential, got `{other}`"),
        }),
    }
}

fn parse_format(s: &str) -> Result<OutputFormat, ConfigError> {
    match s.trim() {
        "csv" => Ok(OutputFormat::Csv),
        "md" | "markdown" => Ok(OutputFormat::Markdown),
        other => Err(ConfigError::InvalidValue {
            key: "format".into(),
            message: format!("expected csv or md, got `{other}`"),
        }),
    }
}

fn parse_bool(key: &str, s: &str) -> Result<bool, ConfigError> {
    match s.trim() {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        other => Err(ConfigError::InvalidValue {
            key: key.into(),
            message: format!("expected true or false, got `{other}`"),
        }),
    }
}

/// Partially specified settings, from a config file or from flags.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Settings {
    pub experiment: Option<ExperimentId>,
    pub tol: Option<Vec<f64>>,
    pub tau: Option<Vec<f64>>,
    pub dx: Option<Vec<f64>>,
    pub gamma: Option<Vec<f64>>,
    pub eps: Option<Vec<f64>>,
    pub alpha: Option<Vec<f64>>,
    pub beta: Option<Vec<f64>>,
    pub criterion: Option<CriterionKind>,
    pub inner_guess: Option<InnerGuess>,
    pub ordering: Option<DnOrdering>,
    pub format: Option<OutputFormat>,
    pub out: Option<PathBuf>,
    pub max_iter: Option<usize>,
    pub timing: Option<bool>,
}

impl Settings {
    /// Applies one `key = value` pair.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let list = |v: &str| {
            parse_list(v).map_err(|e| ConfigError::InvalidValue {
                key: key.to_string(),
                message: e.to_string(),
            })
        };
        match key {
            "experiment" => self.experiment = Some(value.trim().parse()?),
            "tol" => self.tol = Some(list(value)?),
            "tau" => self.tau = Some(list(value)?),
            "dx" => self.dx = Some(list(value)?),
            "gamma" => self.gamma = Some(list(value)?),
            "eps" => self.eps = Some(list(value)?),
            "alpha" => self.alpha = Some(list(value)?),
            "beta" => self.beta = Some(list(value)?),
            "criterion" => self.criterion = Some(parse_criterion(value)?),
            "inner-guess" | "inner_guess" => self.inner_guess = Some(parse_inner_guess(value)?),
            "ordering" => self.ordering = Some(parse_ordering(value)?),
            "format" => self.format = Some(parse_format(value)?),
            "out" => self.out = Some(PathBuf::from(value.trim())),
            "max-iter" | "max_iter" => {
                let n = value
                    .trim()
                    .parse()
                    .map_err(|_| ConfigError::InvalidValue {
                        key: key.to_string(),
                        message: format!("expected a positive integer, got `{}`", value.trim()),
                    })?;
                self.max_iter = Some(n);
            }
            "timing" => self.timing = Some(parse_bool(key, value)?),
            _ => {
                return Err(ConfigError::UnknownKey {
                    line: 0,
                    key: key.to_string(),
                })
            }
        }
        Ok(())
    }

    /// Fields set in `over` replace those in `self`.
    pub fn overridden_by(self, over: Settings) -> Settings {
        Settings {
            experiment: over.experiment.or(self.experiment),
            tol: over.tol.or(self.tol),
            tau: over.tau.or(self.tau),
            dx: over.dx.or(self.dx),
            gamma: over.gamma.or(self.gamma),
            eps: over.eps.or(self.eps),
            alpha: over.alpha.or(self.alpha),
            beta: over.beta.or(self.beta),
            criterion: over.criterion.or(self.criterion),
            inner_guess: over.inner_guess.or(self.inner_guess),
            ordering: over.ordering.or(self.ordering),
            format: over.format.or(self.format),
            out: over.out.or(self.out),
            max_iter: over.max_iter.or(self.max_iter),
            timing: over.timing.or(self.timing),
        }
    }

    /// Validates and resolves into a runnable configuration.
    pub fn resolve(self) -> Result<ExperimentConfig, ConfigError> {
        let experiment = self.experiment.ok_or(ConfigError::MissingExperiment)?;
        let positive = |key: &str, values: &Option<Vec<f64>>| -> Result<(), ConfigError> {
            if let Some(vs) = values {
                if let Some(v) = vs.iter().find(|v| !(**v > 0.0)) {
                    return Err(ConfigError::InvalidValue {
                        key: key.to_string(),
                        message: format!("values must be positive, got {v}"),
                    });
                }
            }
            Ok(())
        };
        positive("tol", &self.tol)?;
        positive("tau", &self.tau)?;
        positive("dx", &self.dx)?;
        positive("gamma", &self.gamma)?;
        if let Some(dx) = &self.dx {
            for &d in dx {
                let inv = 1.0 / d;
                if (inv - inv.round()).abs() > 1e-9 * inv || inv.round() < 2.0 {
                    return Err(ConfigError::InvalidValue {
                        key: "dx".into(),
                        message: format!("1/dx must be an integer of at least 2, got dx = {d}"),
                    });
                }
            }
        }
        for (key, values) in [
            ("eps", &self.eps),
            ("alpha", &self.alpha),
            ("beta", &self.beta),
        ] {
            if let Some(v) = values.iter().flatten().find(|v| !(**v >= 0.0)) {
                return Err(ConfigError::InvalidValue {
                    key: key.into(),
                    message: format!("values must be non-negative, got {v}"),
                });
            }
        }
        if self.max_iter == Some(0) {
            return Err(ConfigError::InvalidValue {
                key: "max-iter".into(),
                message: "must be at least 1".into(),
            });
        }
        Ok(ExperimentConfig {
            experiment,
            tol: self.tol,
            tau: self.tau,
            dx: self.dx,
            gamma: self.gamma,
            eps: self.eps,
            alpha: self.alpha,
            beta: self.beta,
            criterion: self.criterion,
            inner_guess: self.inner_guess.unwrap_or(InnerGuess::Previous),
            ordering: self.ordering.unwrap_or(DnOrdering::Lagged),
            format: self.format.unwrap_or_default(),
            out: self.out,
            max_iter: self.max_iter,
            timing: self.timing.unwrap_or(false),
        })
    }
}

/// Parses a `key = value` file. `#` starts a comment; blank lines are ignored.
pub fn parse_config(text: &str) -> Result<Settings, ConfigError> {
    let mut settings = Settings::default();
    let mut seen: Vec<String> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or(ConfigError::MissingEquals { line: line_no })?;
        let key = key.trim().replace('_', "-");
        if seen.contains(&key) {
            return Err(ConfigError::DuplicateKey { line: line_no, key });
        }
        settings.set(&key, value).map_err(|e| match e {
            ConfigError::UnknownKey { key, .. } => ConfigError::UnknownKey { line: line_no, key },
            other => other,
        })?;
        seen.push(key);
    }
    Ok(settings)
}

/// Fully resolved experiment settings. Grid fields left as `None` take the
/// experiment's defaults.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: ExperimentId,
    pub tol: Option<Vec<f64>>,
    pub tau: Option<Vec<f64>>,
    pub dx: Option<Vec<f64>>,
    pub gamma: Option<Vec<f64>>,
    pub eps: Option<Vec<f64>>,
    pub alpha: Option<Vec<f64>>,
    pub beta: Option<Vec<f64>>,
    pub criterion: Option<CriterionKind>,
    pub inner_guess: InnerGuess,
    pub ordering: DnOrdering,
    pub format: OutputFormat,
    pub out: Option<PathBuf>,
    pub max_iter: Option<usize>,
    pub timing: bool,
}

impl ExperimentConfig {
    pub fn new(experiment: ExperimentId) -> Self {
        Settings {
            experiment: Some(experiment),
            ..Settings::default()
        }
        .resolve()
        .expect("defaults are valid")
    }

    /// `key=value` pairs of every explicitly set field, for report headers.
    pub fn echo(&self) -> Vec<(String, String)> {
        let list = |v: &Vec<f64>| {
            v.iter()
                .map(|x| format!("{x:e}"))
                .collect::<Vec<_>>()
                .join(",")
        };
        let mut out = vec![("experiment".to_string(), self.experiment.to_string())];
        for (key, values) in [
            ("tol", &self.tol),
            ("tau", &self.tau),
            ("dx", &self.dx),
            ("gamma", &self.gamma),
            ("eps", &self.eps),
            ("alpha", &self.alpha),
            ("beta", &self.beta),
        ] {
            if let Some(v) = values {
                out.push((key.to_string(), list(v)));
            }
        }
        if let Some(c) = self.criterion {
            out.push(("criterion".into(), criterion_name(c).into()));
        }
        out.push((
            "inner-guess".into(),
            match self.inner_guess {
                InnerGuess::Previous => "previous",
                InnerGuess::Zero => "zero",
            }
            .into(),
        ));
        out.push((
            "ordering".into(),
            match self.ordering {
                DnOrdering::Lagged => "lagged",
                DnOrdering::Sequential => "sequential",
            }
            .into(),
        ));
        if let Some(m) = self.max_iter {
            out.push(("max-iter".into(), m.to_string()));
        }
        out
    }
}
