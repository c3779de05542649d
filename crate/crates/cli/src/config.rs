//! Run configuration for the grid subcommands: a flat `key=value` file
//! overridden by command-line flags, falling back to per-shell defaults.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use stark_core::siegert::DEFAULT_H_PER_N;
use stark_core::{ParabolicState, SolverOptions};

use crate::args::{parse_state, Format, RunArgs};
use crate::error::CliError;

pub const DEFAULT_STEPS: usize = 20;

/// Values read from a `--config` file. Unset keys stay `None`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ConfigFile {
    pub state: Option<ParabolicState>,
    pub fmin: Option<f64>,
    pub fmax: Option<f64>,
    pub steps: Option<usize>,
    pub order: Option<u8>,
    pub tol: Option<f64>,
    pub h_per_n: Option<f64>,
    pub refinements: Option<u32>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub strict: Option<bool>,
}

fn bad(line: usize, msg: impl std::fmt::Display) -> CliError {
    CliError::usage(format!("config line {line}: {msg}"))
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut cfg = ConfigFile::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let lineno = i + 1;
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| bad(lineno, "expected key=value"))?;
            let (key, value) = (key.trim(), value.trim());
            fn num<T: std::str::FromStr>(v: &str, l: usize) -> Result<T, CliError>
            where
                T::Err: std::fmt::Display,
            {
                v.parse().map_err(|e| bad(l, format!("{v:?}: {e}")))
            }
            match key {
                "state" => cfg.state = Some(parse_state(value).map_err(|e| bad(lineno, e))?),
                "fmin" => cfg.fmin = Some(num(value, lineno)?),
                "fmax" => cfg.fmax = Some(num(value, lineno)?),
                "steps" => cfg.steps = Some(num(value, lineno)?),
                "order" => cfg.order = Some(num(value, lineno)?),
                "tol" => cfg.tol = Some(num(value, lineno)?),
                "h_per_n" => cfg.h_per_n = Some(num(value, lineno)?),
                "refinements" => cfg.refinements = Some(num(value, lineno)?),
                "out" => cfg.out = Some(PathBuf::from(value)),
                "format" => {
                    cfg.format = Some(Format::parse(value).ok_or_else(|| bad(lineno, format!("unknown format {value:?}")))?)
                }
                "strict" => cfg.strict = Some(num(value, lineno)?),
                other => return Err(bad(lineno, format!("unknown key {other:?}"))),
            }
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|source| CliError::File {
            path: path.to_owned(),
            source,
        })?;
        Self::parse(&text)
    }
}

/// Default field range for shell `n`: `[0, 0.1]`, `[0, 0.01]`, then
/// `[0, 1/(20 n⁴)]`.
pub fn default_field_max(n: u32) -> f64 {
    match n {
        1 => 0.1,
        2 => 0.01,
        _ => 1.0 / (20.0 * f64::from(n).powi(4)),
    }
}

/// Fully resolved settings of one `scan` or `bench` run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    #[serde(serialize_with = "state_string")]
    pub state: ParabolicState,
    pub fmin: f64,
    pub fmax: f64,
    pub steps: usize,
    pub order: u8,
    pub tol: f64,
    pub h_per_n: f64,
    pub refinements: u32,
    #[serde(skip)]
    pub out: Option<PathBuf>,
    #[serde(skip)]
    pub format: Format,
    #[serde(skip)]
    pub strict: bool,
}

fn state_string<S: serde::Serializer>(s: &ParabolicState, ser: S) -> Result<S::Ok, S::Error> {
    ser.serialize_str(&format!("{},{},{}", s.n1, s.n2, s.m))
}

impl RunConfig {
    /// Flags over file over defaults. `fallback_state` stands in when neither
    /// names a state.
    pub fn resolve(
        args: &RunArgs,
        strict: bool,
        fallback_state: Option<ParabolicState>,
    ) -> Result<Self, CliError> {
        let file = match &args.config {
            Some(path) => ConfigFile::load(path)?,
            None => ConfigFile::default(),
        };
        let state = args
            .state
            .or(file.state)
            .or(fallback_state)
            .ok_or_else(|| CliError::usage("no state given (use --state n1,n2,m)"))?;
        let defaults = SolverOptions::default();
        let cfg = RunConfig {
            state,
            fmin: args.fmin.or(file.fmin).unwrap_or(0.0),
            fmax: args
                .fmax
                .or(file.fmax)
                .unwrap_or_else(|| default_field_max(state.principal())),
            steps: args.steps.or(file.steps).unwrap_or(DEFAULT_STEPS),
            order: args.order.or(file.order).unwrap_or(2),
            tol: args.solver.tol.or(file.tol).unwrap_or(defaults.tol),
            h_per_n: args.solver.h_per_n.or(file.h_per_n).unwrap_or(DEFAULT_H_PER_N),
            refinements: args
                .solver
                .refinements
                .or(file.refinements)
                .unwrap_or(defaults.refinements),
            out: args.out.clone().or(file.out),
            format: args.format.or(file.format).unwrap_or(Format::Csv),
            strict: strict || file.strict.unwrap_or(false),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.steps < 1 {
            return Err(CliError::usage("steps must be at least 1"));
        }
        if !(self.fmin >= 0.0 && self.fmax >= self.fmin && self.fmax.is_finite()) {
            return Err(CliError::usage(format!(
                "field range must satisfy 0 <= fmin <= fmax, got [{}, {}]",
                self.fmin, self.fmax
            )));
        }
        if !matches!(self.order, 1 | 2) {
            return Err(CliError::usage(format!("order must be 1 or 2, got {}", self.order)));
        }
        if !(self.tol > 0.0) {
            return Err(CliError::usage("tol must be positive"));
        }
        Ok(())
    }

    /// `steps + 1` evenly spaced fields from `fmin` to `fmax`.
    pub fn fields(&self) -> Vec<f64> {
        let span = self.fmax - self.fmin;
        (0..=self.steps)
            .map(|i| {
                if i == self.steps {
                    self.fmax
                } else {
                    self.fmin + span * i as f64 / self.steps as f64
                }
            })
            .collect()
    }

    pub fn solver_options(&self) -> SolverOptions {
        SolverOptions {
            tol: self.tol,
            h_per_n: self.h_per_n,
            refinements: self.refinements,
            ..SolverOptions::default()
        }
    }

    /// `key=value` lines echoed into output headers; output location and
    /// format are left out so that equal runs give equal files.
    pub fn echo(&self) -> Vec<String> {
        let s = self.state;
        vec![
            format!("state={},{},{}", s.n1, s.n2, s.m),
            format!("fmin={}", self.fmin),
            format!("fmax={}", self.fmax),
            format!("steps={}", self.steps),
            format!("order={}", self.order),
            format!("tol={}", self.tol),
            format!("h_per_n={}", self.h_per_n),
            format!("refinements={}", self.refinements),
        ]
    }
}
