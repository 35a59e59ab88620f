//! Run configuration, read from a TOML file and overridden by flags.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use singmod::DiscriminantPair;

pub const CACHE_ENV: &str = "SINGMOD_CACHE_DIR";

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
    Table,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub pairs: Vec<(i64, i64)>,
    pub m_max: u64,
    pub p_max: u64,
    pub tolerances: BTreeMap<String, f64>,
    pub cache_dir: Option<PathBuf>,
    pub output_format: OutputFormat,
    pub parallelism: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            pairs: vec![(-3, -4), (-4, -7), (-3, -8), (-7, -8)],
            m_max: 8,
            p_max: 500,
            tolerances: BTreeMap::from([("gkz".to_string(), 1e-6), ("petersson".to_string(), 1e-8)]),
            cache_dir: None,
            output_format: OutputFormat::Json,
            parallelism: None,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let cfg: Self = toml::from_str(&text)?;
        Ok(cfg)
    }

    pub fn validate(&self) -> anyhow::Result<Vec<DiscriminantPair>> {
        for (name, &t) in &self.tolerances {
            anyhow::ensure!(t > 0.0 && t.is_finite(), "tolerance {name} must be positive, got {t}");
        }
        anyhow::ensure!(!self.pairs.is_empty(), "at least one discriminant pair is required");
        self.pairs.iter().map(|&(a, b)| Ok(DiscriminantPair::new(a, b)?)).collect()
    }

    pub fn tolerance(&self, name: &str, default: f64) -> f64 {
        self.tolerances.get(name).copied().unwrap_or(default)
    }

    /// Flag, then environment, then config file.
    pub fn resolve_cache_dir(&self, flag: Option<PathBuf>) -> Option<PathBuf> {
        flag.or_else(|| std::env::var_os(CACHE_ENV).map(PathBuf::from)).or_else(|| self.cache_dir.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_validates() {
        let cfg: RunConfig = toml::from_str(
            "pairs = [[-3, -4]]\nm_max = 3\noutput_format = \"csv\"\n[tolerances]\ngkz = 1e-7\n",
        )
        .unwrap();
        assert_eq!(cfg.pairs, vec![(-3, -4)]);
        assert_eq!(cfg.output_format, OutputFormat::Csv);
        assert_eq!(cfg.tolerance("gkz", 1.0), 1e-7);
        assert_eq!(cfg.validate().unwrap().len(), 1);
        assert_eq!(RunConfig::default().validate().unwrap().len(), 4);

        let bad: RunConfig = toml::from_str("pairs = [[-3, -12]]").unwrap();
        assert!(bad.validate().is_err());
        let neg: RunConfig = toml::from_str("[tolerances]\ngkz = -1.0").unwrap();
        assert!(neg.validate().is_err());
        assert!(toml::from_str::<RunConfig>("bogus = 1").is_err());
    }
}
