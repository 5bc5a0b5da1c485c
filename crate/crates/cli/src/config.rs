//! `key = value` run configuration.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Serialize;
use siegel_renorm::{Precision, PyramidOptions, Real};

use crate::error::CliError;

#[derive(Clone, Debug, Serialize)]
pub struct Config {
    pub precision: Precision,
    pub epsilon_bar: f64,
    pub out_dir: PathBuf,
    /// Overrides of [`PyramidOptions`]; unset fields take the per-precision default.
    pub residual_tol: Option<f64>,
    pub chop_tol: Option<f64>,
    pub nodes_z: Option<usize>,
    pub nodes_w: Option<usize>,
    pub jet_degree: Option<usize>,
    pub margin: Option<f64>,
    pub v_radius: Option<f64>,
    /// Stopping tolerance of the 1D fixed point.
    pub fixed_point_tol: f64,
    /// Level at which `chi(1)` is measured for the displacement constants.
    pub chi_level: usize,
    pub threads: Option<usize>,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            precision: Precision::Double,
            epsilon_bar: 0.125,
            out_dir: PathBuf::from("out"),
            residual_tol: None,
            chop_tol: None,
            nodes_z: None,
            nodes_w: None,
            jet_degree: None,
            margin: None,
            v_radius: None,
            fixed_point_tol: 1e-7,
            chi_level: 5,
            threads: None,
        }
    }
}

fn parse<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, CliError> {
    v.parse()
        .map_err(|_| CliError::Config(format!("bad value for {key}: {v:?}")))
}

impl Config {
    pub fn from_text(text: &str) -> Result<Self, CliError> {
        let mut map = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("line {}: expected key = value", i + 1)))?;
            map.insert(k.trim().to_string(), v.trim().to_string());
        }
        let mut c = Config::default();
        for (k, v) in &map {
            c.set(k, v)?;
        }
        c.validate()?;
        Ok(c)
    }

    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::from_text(&text)
    }

    pub fn set(&mut self, key: &str, v: &str) -> Result<(), CliError> {
        match key {
            "precision" => self.precision = parse(key, v)?,
            "epsilon_bar" => self.epsilon_bar = parse(key, v)?,
            "out_dir" => self.out_dir = PathBuf::from(v),
            "residual_tol" => self.residual_tol = Some(parse(key, v)?),
            "chop_tol" => self.chop_tol = Some(parse(key, v)?),
            "nodes_z" => self.nodes_z = Some(parse(key, v)?),
            "nodes_w" => self.nodes_w = Some(parse(key, v)?),
            "jet_degree" => self.jet_degree = Some(parse(key, v)?),
            "margin" => self.margin = Some(parse(key, v)?),
            "v_radius" => self.v_radius = Some(parse(key, v)?),
            "fixed_point_tol" => self.fixed_point_tol = parse(key, v)?,
            "chi_level" => self.chi_level = parse(key, v)?,
            "threads" => self.threads = Some(parse(key, v)?),
            _ => return Err(CliError::Config(format!("unknown key {key:?}"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let positive = [
            ("epsilon_bar", Some(self.epsilon_bar)),
            ("residual_tol", self.residual_tol),
            ("chop_tol", self.chop_tol),
            ("margin", self.margin),
            ("v_radius", self.v_radius),
            ("fixed_point_tol", Some(self.fixed_point_tol)),
        ];
        for (k, v) in positive {
            if let Some(v) = v {
                if !(v > 0.0 && v.is_finite()) {
                    return Err(CliError::Config(format!("{k} must be positive, got {v}")));
                }
            }
        }
        if self.threads == Some(0) {
            return Err(CliError::Config("threads must be at least 1".into()));
        }
        Ok(())
    }

    pub fn pyramid_options<T: Real>(&self) -> PyramidOptions {
        let mut o = PyramidOptions::for_scalar::<T>();
        if let Some(v) = self.residual_tol {
            o.residual_tol = v;
        }
        if let Some(v) = self.chop_tol {
            o.chop_tol = v;
        }
        if let Some(v) = self.nodes_z {
            o.nodes_z = v;
        }
        if let Some(v) = self.nodes_w {
            o.nodes_w = v;
        }
        if let Some(v) = self.jet_degree {
            o.jet_degree = v;
        }
        if let Some(v) = self.margin {
            o.margin = v;
        }
        if let Some(v) = self.v_radius {
            o.v_radius = v;
        }
        o
    }
}
