//! Run configuration: defaults, a flat `key = value` file, then flag
//! overrides.

use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::asymptotics::{Model, SweepConfig, DEFAULT_GRID};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub p: Option<f64>,
    pub grid: Vec<f64>,
    pub sweep: SweepConfig,
    pub model: Model,
    /// Rows with smaller `p` are left out of the extrapolation fit.
    pub min_p: f64,
    pub antipodal_guess: (f64, f64),
    pub root_tol: f64,
    pub out: Option<PathBuf>,
    pub format: Format,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            p: None,
            grid: DEFAULT_GRID.to_vec(),
            sweep: SweepConfig::default(),
            model: Model::default(),
            min_p: 0.0,
            antipodal_guess: (0.5, 0.5),
            root_tol: 1e-10,
            out: None,
            format: Format::default(),
        }
    }
}

fn num<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::InvalidInput(format!("{key}: cannot parse '{value}'")))
}

fn list(key: &str, value: &str) -> Result<Vec<f64>> {
    value.split(',').map(|v| num(key, v)).collect()
}

fn pair(key: &str, value: &str) -> Result<(f64, f64)> {
    match list(key, value)?.as_slice() {
        [a, b] => Ok((*a, *b)),
        _ => Err(Error::InvalidInput(format!("{key}: expected two comma-separated numbers"))),
    }
}

impl RunConfig {
    /// Set one key. Keys are the long flag names.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let solver = &mut self.sweep.solver;
        match key {
            "p" => self.p = Some(num(key, value)?),
            "grid" => self.grid = list(key, value)?,
            "rtol" => solver.shot.tolerances.rtol = num(key, value)?,
            "atol" => solver.shot.tolerances.atol = num(key, value)?,
            "event-tol" => solver.shot.event_tol = num(key, value)?,
            "quad-tol" => solver.quad_rel_tol = num(key, value)?,
            "series-radius" => solver.shot.series_radius = num(key, value)?,
            "max-steps" => solver.shot.max_steps = num(key, value)?,
            "shoot" => solver.shoot_magnitude = num(key, value)?,
            "neg-window" => self.sweep.negative_window = num(key, value)?,
            "pos-window" => self.sweep.positive_window = Some(pair(key, value)?),
            "sample-step" => self.sweep.sample_step = num(key, value)?,
            "green-band" => self.sweep.green_band = pair(key, value)?,
            "min-p" => self.min_p = num(key, value)?,
            "model" => {
                self.model = match value.trim() {
                    "log-corrected" => Model::LogCorrected,
                    "inverse" => Model::Inverse,
                    other => return Err(Error::InvalidInput(format!("model: unknown '{other}'"))),
                }
            }
            "guess" => self.antipodal_guess = pair(key, value)?,
            "root-tol" => self.root_tol = num(key, value)?,
            "out" => self.out = Some(PathBuf::from(value.trim())),
            "format" => {
                self.format = match value.trim() {
                    "csv" => Format::Csv,
                    "json" => Format::Json,
                    other => return Err(Error::InvalidInput(format!("format: unknown '{other}'"))),
                }
            }
            other => return Err(Error::InvalidInput(format!("unknown config key '{other}'"))),
        }
        Ok(())
    }

    /// Apply a config file body: `key = value` lines, `#` comments.
    pub fn apply_file(&mut self, text: &str) -> Result<()> {
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::InvalidInput(format!("line {}: expected key = value", n + 1)))?;
            self.set(k.trim(), v)?;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        self.sweep.solver.shot.validate()?;
        let s = &self.sweep;
        if !(s.solver.quad_rel_tol > 0.0) || !(s.solver.shoot_magnitude > 0.0) {
            return Err(Error::InvalidInput("quadrature tolerance and shooting magnitude must be positive".into()));
        }
        if !(s.sample_step > 0.0) || !(s.negative_window > 0.0) || !(self.root_tol > 0.0) {
            return Err(Error::InvalidInput("window sizes and tolerances must be positive".into()));
        }
        if let Some(p) = self.p {
            if !(p > 1.0) || !p.is_finite() {
                return Err(Error::InvalidInput(format!("p must exceed 1, got {p}")));
            }
        }
        if self.grid.is_empty() || self.grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidInput("grid must be nonempty and strictly increasing".into()));
        }
        if self.grid.iter().any(|&p| !(p > 1.0)) {
            return Err(Error::InvalidInput("grid exponents must exceed 1".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_then_override() {
        let mut c = RunConfig::default();
        c.apply_file("# sweep\ngrid = 10, 20,40,80\nrtol=1e-9 # tighter\n\nformat = json\n")
            .unwrap();
        assert_eq!(c.grid, vec![10.0, 20.0, 40.0, 80.0]);
        assert_eq!(c.sweep.solver.shot.tolerances.rtol, 1e-9);
        assert_eq!(c.format, Format::Json);
        c.set("rtol", "1e-10").unwrap();
        assert_eq!(c.sweep.solver.shot.tolerances.rtol, 1e-10);
        c.validate().unwrap();
    }

    #[test]
    fn bad_input_rejected() {
        let mut c = RunConfig::default();
        assert!(c.apply_file("nonsense").is_err());
        assert!(c.set("colour", "red").is_err());
        assert!(c.set("p", "abc").is_err());
        c.set("grid", "40,20").unwrap();
        assert!(c.validate().is_err());
        let mut c = RunConfig::default();
        c.set("p", "0.5").unwrap();
        assert!(c.validate().is_err());
        let mut c = RunConfig::default();
        c.set("atol", "-1").unwrap();
        assert!(c.validate().is_err());
    }
}
