//! Run configuration: defaults, an optional TOML file, then environment and
//! command-line overrides (later sources win).

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::singularity::SingularityConfig;

pub const ENV_PRECISION: &str = "GWASYM_PRECISION";
pub const ENV_CACHE_DIR: &str = "GWASYM_CACHE_DIR";

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub precision_bits: u32,
    pub d_exact: usize,
    pub d_float: usize,
    pub z_init: f64,
    pub taylor_order: usize,
    /// Expansion terms `N`.
    pub terms: usize,
    /// Allowed gap between the two `x₀` estimates.
    pub cross_tol: f64,
    /// Threshold for the `d`-th root gaps at the end of the table.
    pub root_gap_threshold: f64,
    pub cache_dir: PathBuf,
    pub out_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            precision_bits: 256,
            d_exact: 200,
            d_float: 5000,
            z_init: -30.0,
            taylor_order: 30,
            terms: 8,
            cross_tol: 1e-8,
            root_gap_threshold: 1e-2,
            cache_dir: PathBuf::from("gwasym-cache"),
            out_dir: PathBuf::from("gwasym-out"),
        }
    }
}

/// Keys accepted in a config file; all optional.
#[derive(Clone, Debug, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ConfigOverrides {
    pub precision_bits: Option<u32>,
    pub d_exact: Option<usize>,
    pub d_float: Option<usize>,
    pub z_init: Option<f64>,
    pub taylor_order: Option<usize>,
    pub terms: Option<usize>,
    pub cross_tol: Option<f64>,
    pub root_gap_threshold: Option<f64>,
    pub cache_dir: Option<PathBuf>,
    pub out_dir: Option<PathBuf>,
}

impl ConfigOverrides {
    pub fn from_toml_str(s: &str) -> Result<ConfigOverrides> {
        toml::from_str(s).map_err(|e| Error::Parse(format!("config: {e}")))
    }

    pub fn from_file(path: &Path) -> Result<ConfigOverrides> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    /// Values from `GWASYM_PRECISION` and `GWASYM_CACHE_DIR`.
    pub fn from_env() -> Result<ConfigOverrides> {
        let mut o = ConfigOverrides::default();
        if let Ok(p) = std::env::var(ENV_PRECISION) {
            o.precision_bits = Some(
                p.trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("{ENV_PRECISION}={p} is not an integer")))?,
            );
        }
        if let Ok(dir) = std::env::var(ENV_CACHE_DIR) {
            o.cache_dir = Some(PathBuf::from(dir));
        }
        Ok(o)
    }
}

impl RunConfig {
    pub fn apply(&mut self, o: &ConfigOverrides) {
        macro_rules! take {
            ($($f:ident),*) => {
                $(if let Some(v) = &o.$f { self.$f = v.clone(); })*
            };
        }
        take!(
            precision_bits,
            d_exact,
            d_float,
            z_init,
            taylor_order,
            terms,
            cross_tol,
            root_gap_threshold,
            cache_dir,
            out_dir
        );
    }

    pub fn validate(&self) -> Result<()> {
        if self.precision_bits < 64 {
            return Err(Error::InvalidArgument(format!(
                "precision must be at least 64 bits, got {}",
                self.precision_bits
            )));
        }
        if self.d_exact == 0 || self.d_exact > self.d_float {
            return Err(Error::InvalidArgument(format!(
                "need 1 <= d_exact <= d_float, got {} and {}",
                self.d_exact, self.d_float
            )));
        }
        if self.terms < 4 {
            return Err(Error::InvalidArgument(format!(
                "expansion terms must be at least 4, got {}",
                self.terms
            )));
        }
        if self.taylor_order < 4 {
            return Err(Error::InvalidArgument("Taylor order must be at least 4".into()));
        }
        if self.z_init > -5.0 {
            return Err(Error::InvalidArgument(format!(
                "z_init must be <= -5, got {}",
                self.z_init
            )));
        }
        Ok(())
    }

    /// Truncation orders for the series estimate of `x₀`: five evenly
    /// spaced values ending at `d_float`.
    pub fn series_d_list(&self) -> Vec<usize> {
        let step = (self.d_float / 5).max(1);
        (1..=5).map(|i| i * step).collect()
    }

    pub fn singularity(&self) -> SingularityConfig {
        SingularityConfig {
            precision_bits: self.precision_bits,
            z_init: self.z_init,
            taylor_order: self.taylor_order,
            terms: self.terms,
            local_order: None,
            series_d_list: self.series_d_list(),
            cross_tol: self.cross_tol,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let c = RunConfig::default();
        c.validate().unwrap();
        assert_eq!(c.series_d_list(), vec![1000, 2000, 3000, 4000, 5000]);
    }

    #[test]
    fn file_overrides_apply() {
        let o = ConfigOverrides::from_toml_str("precision_bits = 128\nterms = 6\n").unwrap();
        let mut c = RunConfig::default();
        c.apply(&o);
        assert_eq!(c.precision_bits, 128);
        assert_eq!(c.terms, 6);
        assert_eq!(c.d_float, 5000);
    }

    #[test]
    fn later_overrides_win() {
        let file = ConfigOverrides::from_toml_str("precision_bits = 128").unwrap();
        let flags = ConfigOverrides {
            precision_bits: Some(192),
            ..Default::default()
        };
        let mut c = RunConfig::default();
        c.apply(&file);
        c.apply(&flags);
        assert_eq!(c.precision_bits, 192);
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(ConfigOverrides::from_toml_str("precison = 3").is_err());
    }

    #[test]
    fn invalid_configs() {
        let bad = [
            RunConfig {
                precision_bits: 32,
                ..Default::default()
            },
            RunConfig {
                d_exact: 6000,
                ..Default::default()
            },
            RunConfig {
                terms: 3,
                ..Default::default()
            },
            RunConfig {
                z_init: 0.0,
                ..Default::default()
            },
        ];
        for c in bad {
            assert!(c.validate().is_err());
        }
    }
}
