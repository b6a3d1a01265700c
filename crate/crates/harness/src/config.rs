//! Experiment configuration: a TOML file whose keys every CLI flag can
//! override.
//!
//! ```toml
//! [grid]
//! dim = 3
//! points = 64
//! box = 1.0
//! levels = [32, 64, 128]
//!
//! [run]
//! seed = 7
//! tol = 1e-10
//! trials = 10000
//! recipe = "manufactured-M0.3"
//! out = "out"
//! ```

use crate::recipes::Recipe;
use dirac_beltrami::clifford::{MAX_DIM, MIN_DIM};
use dirac_beltrami::gridfield::{GridSpec, GRID_MAX_DIM, GRID_MIN_DIM};
use serde::Deserialize;
use std::path::{Path, PathBuf};

pub const DEFAULT_SEED: u64 = 20_240_601;
pub const DEFAULT_TRIALS: usize = 10_000;
/// Largest dimension exercised by the algebra suite.
pub const ALGEBRA_MAX_DIM: usize = 6;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config {0}: {1}")]
    Read(PathBuf, std::io::Error),
    #[error("invalid config {0}: {1}")]
    Parse(PathBuf, toml::de::Error),
    #[error("{0}")]
    Invalid(String),
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub dim: Option<usize>,
    pub points: Option<usize>,
    #[serde(rename = "box")]
    pub box_length: Option<f64>,
    pub levels: Option<Vec<usize>>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    pub seed: Option<u64>,
    pub tol: Option<f64>,
    pub trials: Option<usize>,
    pub recipe: Option<String>,
    pub out: Option<PathBuf>,
}

/// Contents of a config file; every key is optional.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(default)]
    pub grid: GridSection,
    #[serde(default)]
    pub run: RunSection,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Read(path.to_path_buf(), e))?;
        toml::from_str(&text).map_err(|e| ConfigError::Parse(path.to_path_buf(), e))
    }

    /// `other`'s keys take precedence.
    pub fn overlay(self, other: ConfigFile) -> ConfigFile {
        ConfigFile {
            grid: GridSection {
                dim: other.grid.dim.or(self.grid.dim),
                points: other.grid.points.or(self.grid.points),
                box_length: other.grid.box_length.or(self.grid.box_length),
                levels: other.grid.levels.or(self.grid.levels),
            },
            run: RunSection {
                seed: other.run.seed.or(self.run.seed),
                tol: other.run.tol.or(self.run.tol),
                trials: other.run.trials.or(self.run.trials),
                recipe: other.run.recipe.or(self.run.recipe),
                out: other.run.out.or(self.run.out),
            },
        }
    }
}

/// Validated parameters for one command.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    /// `None` runs every supported dimension.
    pub dim: Option<usize>,
    pub points: Option<usize>,
    pub box_length: f64,
    pub levels: Option<Vec<usize>>,
    pub seed: u64,
    pub tol: f64,
    pub trials: usize,
    pub recipe: Recipe,
    pub out: PathBuf,
}

fn check_points(n: usize) -> Result<(), ConfigError> {
    if n < 4 || !n.is_power_of_two() {
        return Err(ConfigError::Invalid(format!("grid size {n} is not a power of two ≥ 4")));
    }
    Ok(())
}

impl ExperimentConfig {
    fn resolve(file: ConfigFile, dim_range: (usize, usize)) -> Result<Self, ConfigError> {
        let g = file.grid;
        let r = file.run;
        if let Some(d) = g.dim {
            if d < dim_range.0 || d > dim_range.1 {
                return Err(ConfigError::Invalid(format!("dimension {d} outside [{}, {}]", dim_range.0, dim_range.1)));
            }
        }
        if let Some(n) = g.points {
            check_points(n)?;
        }
        if let Some(levels) = &g.levels {
            if levels.is_empty() {
                return Err(ConfigError::Invalid("empty refinement levels".into()));
            }
            for &n in levels {
                check_points(n)?;
            }
        }
        let box_length = g.box_length.unwrap_or(1.0);
        if !(box_length > 0.0 && box_length.is_finite()) {
            return Err(ConfigError::Invalid(format!("box length {box_length} is not positive")));
        }
        let tol = r.tol.unwrap_or(dirac_beltrami::solver::DEFAULT_TOL);
        if !(tol > 0.0 && tol < 1.0) {
            return Err(ConfigError::Invalid(format!("tolerance {tol} outside (0, 1)")));
        }
        let recipe = match r.recipe {
            Some(s) => s.parse::<Recipe>().map_err(ConfigError::Invalid)?,
            None => Recipe::Manufactured(0.3),
        };
        Ok(ExperimentConfig {
            dim: g.dim,
            points: g.points,
            box_length,
            levels: g.levels,
            seed: r.seed.unwrap_or(DEFAULT_SEED),
            tol,
            trials: r.trials.unwrap_or(DEFAULT_TRIALS),
            recipe,
            out: r.out.unwrap_or_else(|| PathBuf::from("out")),
        })
    }

    /// Parameters for the algebra suites: `n ∈ [2, 6]`.
    pub fn for_algebra(file: ConfigFile) -> Result<Self, ConfigError> {
        const { assert!(MIN_DIM <= 2 && ALGEBRA_MAX_DIM <= MAX_DIM) };
        Self::resolve(file, (MIN_DIM, ALGEBRA_MAX_DIM))
    }

    /// Parameters for grid commands: `n ∈ [2, 4]`.
    pub fn for_grid(file: ConfigFile) -> Result<Self, ConfigError> {
        Self::resolve(file, (GRID_MIN_DIM, GRID_MAX_DIM))
    }

    pub fn algebra_dims(&self) -> Vec<usize> {
        match self.dim {
            Some(d) => vec![d],
            None => (MIN_DIM..=ALGEBRA_MAX_DIM).collect(),
        }
    }

    pub fn grid(&self, default_dim: usize, default_points: usize) -> Result<GridSpec, ConfigError> {
        GridSpec::new(self.dim.unwrap_or(default_dim), self.points.unwrap_or(default_points), self.box_length)
            .map_err(|e| ConfigError::Invalid(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> ConfigFile {
        toml::from_str(text).unwrap()
    }

    #[test]
    fn file_values_and_overrides() {
        let file = parse("[grid]\ndim = 3\npoints = 32\n[run]\nseed = 5\nrecipe = \"checkerboard-M0.6\"\n");
        let cli = ConfigFile { run: RunSection { seed: Some(9), ..Default::default() }, ..Default::default() };
        let cfg = ExperimentConfig::for_grid(file.overlay(cli)).unwrap();
        assert_eq!(cfg.dim, Some(3));
        assert_eq!(cfg.points, Some(32));
        assert_eq!(cfg.seed, 9);
        assert_eq!(cfg.recipe, Recipe::Checkerboard(0.6));
    }

    #[test]
    fn rejects_bad_values() {
        assert!(ExperimentConfig::for_grid(parse("[grid]\npoints = 48\n")).is_err());
        assert!(ExperimentConfig::for_grid(parse("[grid]\ndim = 5\n")).is_err());
        assert!(ExperimentConfig::for_algebra(parse("[grid]\ndim = 5\n")).is_ok());
        assert!(ExperimentConfig::for_algebra(parse("[grid]\ndim = 7\n")).is_err());
        assert!(ExperimentConfig::for_grid(parse("[grid]\nlevels = [32, 100]\n")).is_err());
        assert!(ExperimentConfig::for_grid(parse("[run]\ntol = 0\n")).is_err());
        assert!(toml::from_str::<ConfigFile>("[grid]\nsize = 3\n").is_err());
    }
}
