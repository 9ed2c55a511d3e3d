//! Run configuration: TOML file with one section per experiment, merged
//! with command-line overrides.  Unknown keys are rejected so typos fail
//! loudly.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// Flat per-experiment settings; every field optional so that the file,
/// the flags, and the defaults can be merged in that order.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Section {
    pub space: Option<String>,
    pub dim: Option<usize>,
    pub breakpoints: Option<Vec<f64>>,
    pub starts_high: Option<bool>,
    pub eps: Option<f64>,
    pub times: Option<Vec<f64>>,
    pub paths: Option<u64>,
    pub dt: Option<f64>,
    pub h: Option<f64>,
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    pub out: Option<PathBuf>,
    pub strict_hitting: Option<bool>,
    pub dump_paths: Option<bool>,
    // sandwich extras
    pub a: Option<f64>,
    pub separation: Option<f64>,
    pub t: Option<f64>,
    pub big_t: Option<f64>,
    // green extras
    pub sweep: Option<Vec<f64>>,
    pub eps1: Option<f64>,
    pub eps2: Option<f64>,
    pub horizon: Option<f64>,
    // lil extras
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    // probe extras for simulate
    pub probe_center: Option<Vec<f64>>,
    pub probe_eps: Option<f64>,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub simulate: Option<Section>,
    pub fluctuation: Option<Section>,
    #[serde(rename = "verify-sandwich")]
    pub verify_sandwich: Option<Section>,
    pub lil: Option<Section>,
    #[serde(rename = "green-compare")]
    pub green_compare: Option<Section>,
    pub excess: Option<Section>,
    pub constants: Option<Section>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<ConfigFile> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config file {}", path.display()))?;
        let parsed: ConfigFile = toml::from_str(&text)
            .with_context(|| format!("cannot parse config file {}", path.display()))?;
        Ok(parsed)
    }

    pub fn section(&self, name: &str) -> Section {
        let picked = match name {
            "simulate" => &self.simulate,
            "fluctuation" => &self.fluctuation,
            "verify-sandwich" => &self.verify_sandwich,
            "lil" => &self.lil,
            "green-compare" => &self.green_compare,
            "excess" => &self.excess,
            "constants" => &self.constants,
            _ => &None,
        };
        picked.clone().unwrap_or_default()
    }
}

impl Section {
    /// Overlay `self` (flags) on top of `base` (file): flags win.
    pub fn over(self, base: Section) -> Section {
        macro_rules! pick {
            ($field:ident) => {
                self.$field.or(base.$field)
            };
        }
        Section {
            space: pick!(space),
            dim: pick!(dim),
            breakpoints: pick!(breakpoints),
            starts_high: pick!(starts_high),
            eps: pick!(eps),
            times: pick!(times),
            paths: pick!(paths),
            dt: pick!(dt),
            h: pick!(h),
            seed: pick!(seed),
            workers: pick!(workers),
            out: pick!(out),
            strict_hitting: pick!(strict_hitting),
            dump_paths: pick!(dump_paths),
            a: pick!(a),
            separation: pick!(separation),
            t: pick!(t),
            big_t: pick!(big_t),
            sweep: pick!(sweep),
            eps1: pick!(eps1),
            eps2: pick!(eps2),
            horizon: pick!(horizon),
            alpha: pick!(alpha),
            beta: pick!(beta),
            probe_center: pick!(probe_center),
            probe_eps: pick!(probe_eps),
        }
    }

    pub fn eps_or_default(&self) -> f64 {
        self.eps.unwrap_or(1.0)
    }

    /// Default time step `1e-3 * eps^2`.
    pub fn dt_or_default(&self) -> f64 {
        let eps = self.eps_or_default();
        self.dt.unwrap_or(1e-3 * eps * eps)
    }

    /// Default cell size `eps / 8`.
    pub fn h_or_default(&self) -> f64 {
        self.h.unwrap_or(self.eps_or_default() / 8.0)
    }

    pub fn validate_positive(&self) -> Result<()> {
        if let Some(eps) = self.eps {
            if !(eps > 0.0) {
                bail!("eps must be strictly positive, got {eps}");
            }
        }
        if let Some(dt) = self.dt {
            if !(dt > 0.0) {
                bail!("dt must be strictly positive, got {dt}");
            }
        }
        if let Some(h) = self.h {
            if !(h > 0.0) {
                bail!("h must be strictly positive, got {h}");
            }
        }
        if let Some(ts) = &self.times {
            if ts.is_empty() {
                bail!("times must not be empty");
            }
            if ts.windows(2).any(|w| w[0] >= w[1]) {
                bail!("times must be strictly ascending");
            }
        }
        Ok(())
    }
}

/// Short content digest identifying a fully merged configuration.  Output
/// location and worker count do not affect results, so they stay out of
/// the digest.
pub fn config_digest(section: &Section, experiment: &str) -> String {
    let mut canonical_section = section.clone();
    canonical_section.out = None;
    canonical_section.workers = None;
    let canonical =
        serde_json::to_string(&(experiment, &canonical_section)).expect("section serializes");
    let hash = Sha256::digest(canonical.as_bytes());
    hash.iter().take(6).map(|b| format!("{b:02x}")).collect()
}

/// Parse a comma-separated list of reals.
pub fn parse_list(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .with_context(|| format!("bad number `{p}` in list"))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_then_flag_precedence() {
        let file: ConfigFile = toml::from_str(
            r#"
            [simulate]
            dim = 3
            eps = 1.0
            seed = 7
        "#,
        )
        .unwrap();
        let flags = Section {
            eps: Some(2.0),
            ..Default::default()
        };
        let merged = flags.over(file.section("simulate"));
        assert_eq!(merged.eps, Some(2.0));
        assert_eq!(merged.dim, Some(3));
        assert_eq!(merged.seed, Some(7));
    }

    #[test]
    fn unknown_keys_rejected_with_name() {
        let err = toml::from_str::<ConfigFile>(
            r#"
            [simulate]
            epsilon = 1.0
        "#,
        )
        .unwrap_err();
        assert!(err.to_string().contains("epsilon"), "{err}");
    }

    #[test]
    fn defaults_follow_eps() {
        let s = Section {
            eps: Some(2.0),
            ..Default::default()
        };
        assert_eq!(s.dt_or_default(), 4e-3);
        assert_eq!(s.h_or_default(), 0.25);
    }

    #[test]
    fn digest_distinguishes_configs() {
        let a = Section {
            seed: Some(1),
            ..Default::default()
        };
        let b = Section {
            seed: Some(2),
            ..Default::default()
        };
        assert_ne!(config_digest(&a, "simulate"), config_digest(&b, "simulate"));
        assert_eq!(config_digest(&a, "simulate"), config_digest(&a, "simulate"));
    }

    #[test]
    fn list_parsing() {
        assert_eq!(parse_list("1, 2.5,10").unwrap(), vec![1.0, 2.5, 10.0]);
        assert!(parse_list("1,x").is_err());
    }
}
