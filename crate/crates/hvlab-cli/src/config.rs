//! Structured run configuration.
//!
//! A config file is TOML with one optional table per experiment plus an
//! optional top-level `seed` shared by all of them. Command-line flags
//! override file values; file values override built-in defaults. The seed
//! has no built-in default: every run must state one, on the command line
//! or in the file.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::Deserialize;

/// One experiment's section in the config file. All keys are optional;
/// unknown keys are rejected so typos surface as usage errors.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Section {
    pub seed: Option<u64>,
    pub n: Option<u64>,
    pub angles: Option<[f64; 4]>,
    pub tol: Option<f64>,
    pub steps: Option<u64>,
    pub theta: Option<f64>,
    pub events_out: Option<String>,
}

/// Section names the binary actually reads.
const KNOWN_SECTIONS: [&str; 14] = [
    "bell-boolean",
    "bell-vector",
    "sweep",
    "hom",
    "swap",
    "ks-square",
    "ks-rotations",
    "ks-search",
    "ghz-table",
    "ghz-instructions",
    "ghz-pipeline",
    "demo-card",
    "demo-plane-rotation",
    "demo-filtering-order",
];

#[derive(Debug, Clone, Default, Deserialize)]
pub struct FileConfig {
    pub seed: Option<u64>,
    #[serde(flatten)]
    pub sections: BTreeMap<String, Section>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config file {}", path.display()))?;
        let cfg: FileConfig = toml::from_str(&text)
            .with_context(|| format!("invalid config file {}", path.display()))?;
        for name in cfg.sections.keys() {
            if !KNOWN_SECTIONS.contains(&name.as_str()) {
                bail!(
                    "unknown experiment section [{name}] in {}",
                    path.display()
                );
            }
        }
        Ok(cfg)
    }

    /// The section for one experiment, or an empty one.
    pub fn section(&self, experiment: &str) -> Section {
        self.sections.get(experiment).cloned().unwrap_or_default()
    }
}

/// Flag values that can override any section.
#[derive(Debug, Clone, Copy, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub n: Option<u64>,
    pub angles: Option<[f64; 4]>,
}

/// The resolved parameters for one run.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub seed: u64,
    pub n: Option<u64>,
    pub angles: Option<[f64; 4]>,
    pub section: Section,
}

/// Merges flags over the file section over defaults and validates.
pub fn resolve(
    experiment: &str,
    file: &FileConfig,
    flags: Overrides,
    default_n: Option<u64>,
) -> Result<Resolved> {
    let section = file.section(experiment);
    let seed = flags
        .seed
        .or(section.seed)
        .or(file.seed)
        .ok_or_else(|| anyhow::anyhow!("a seed is required: pass --seed or set one in the config file"))?;
    let n = flags.n.or(section.n).or(default_n);
    if let Some(0) = n {
        bail!("size parameter must be at least 1");
    }
    if let Some(0) = section.steps {
        bail!("steps must be at least 1");
    }
    Ok(Resolved {
        seed,
        n,
        angles: flags.angles.or(section.angles),
        section,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file_which_overrides_defaults() {
        let file: FileConfig = toml::from_str(
            "seed = 5\n[bell-vector]\nn = 700\nangles = [0.0, 0.1, 0.2, 0.3]\n",
        )
        .unwrap();
        let r = resolve("bell-vector", &file, Overrides::default(), Some(100)).unwrap();
        assert_eq!((r.seed, r.n), (5, Some(700)));
        let flags = Overrides {
            seed: Some(9),
            n: Some(50),
            angles: None,
        };
        let r = resolve("bell-vector", &file, flags, Some(100)).unwrap();
        assert_eq!((r.seed, r.n), (9, Some(50)));
        assert_eq!(r.angles, Some([0.0, 0.1, 0.2, 0.3]));
        // A different experiment falls back to the top-level seed.
        let r = resolve("hom", &file, Overrides::default(), Some(100)).unwrap();
        assert_eq!((r.seed, r.n), (5, Some(100)));
    }

    #[test]
    fn missing_seed_is_an_error() {
        let file = FileConfig::default();
        let err = resolve("hom", &file, Overrides::default(), None).unwrap_err();
        assert!(err.to_string().contains("seed"));
    }

    #[test]
    fn zero_size_is_rejected() {
        let file = FileConfig::default();
        let flags = Overrides {
            seed: Some(1),
            n: Some(0),
            angles: None,
        };
        assert!(resolve("hom", &file, flags, None).is_err());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let res: Result<FileConfig, toml::de::Error> = toml::from_str("[hom]\nwindows = 3\n");
        assert!(res.is_err());
    }

    #[test]
    fn unknown_section_names_are_rejected_on_load() {
        let path = std::env::temp_dir().join("hvlab-bad-section.toml");
        std::fs::write(&path, "[bell-vektor]\nn = 10\n").unwrap();
        let err = FileConfig::load(&path).unwrap_err();
        assert!(err.to_string().contains("bell-vektor"));
        std::fs::remove_file(&path).ok();
    }
}
