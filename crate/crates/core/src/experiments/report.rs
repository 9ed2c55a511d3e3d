//! Flat result records for persistence: one record per (experiment, time
//! point), serialized as JSON lines with CSV mirrors.  Wall-clock timing
//! deliberately stays out of the records so reruns are byte-identical.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::experiments::ensemble::EnsembleResult;
use crate::experiments::fit::FitResult;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub experiment: String,
    pub space: String,
    pub eps: f64,
    pub t: f64,
    pub mean: f64,
    pub stderr: f64,
    pub grid_band: f64,
    pub step_band: f64,
    pub n: u64,
    pub dt: f64,
    pub h: f64,
    pub seed: u64,
    pub config_digest: String,
}

impl ResultRecord {
    pub fn from_ensemble(
        experiment: &str,
        result: &EnsembleResult,
        config_digest: &str,
    ) -> Vec<ResultRecord> {
        let spec = &result.spec;
        result
            .spec
            .times
            .iter()
            .enumerate()
            .map(|(j, &t)| ResultRecord {
                experiment: experiment.to_string(),
                space: spec.space.label(),
                eps: spec.eps,
                t,
                mean: result.means[j],
                stderr: result.stderrs[j],
                grid_band: result.bias[j].grid_band,
                step_band: result.bias[j].step_band,
                n: spec.n_paths,
                dt: spec.dt,
                h: spec.h,
                seed: spec.seed,
                config_digest: config_digest.to_string(),
            })
            .collect()
    }

    pub const CSV_HEADER: &'static str =
        "experiment,space,eps,t,mean,stderr,grid_band,step_band,n,dt,h,seed,config_digest";

    pub fn to_csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            csv_quote(&self.experiment),
            csv_quote(&self.space),
            self.eps,
            self.t,
            self.mean,
            self.stderr,
            self.grid_band,
            self.step_band,
            self.n,
            self.dt,
            self.h,
            self.seed,
            self.config_digest
        )
    }
}

fn csv_quote(s: &str) -> String {
    if s.contains(',') || s.contains('"') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitRecord {
    pub experiment: String,
    pub model: String,
    pub a: f64,
    pub a_stderr: f64,
    pub b: f64,
    pub residual_norm: f64,
    pub config_digest: String,
}

impl FitRecord {
    pub fn from_fit(experiment: &str, fit: &FitResult, config_digest: &str) -> FitRecord {
        FitRecord {
            experiment: experiment.to_string(),
            model: format!("{:?}", fit.model),
            a: fit.a,
            a_stderr: fit.a_stderr(),
            b: fit.b,
            residual_norm: fit.residual_norm,
            config_digest: config_digest.to_string(),
        }
    }
}

/// Serialize records as JSON lines.
pub fn to_jsonl<T: Serialize>(records: &[T]) -> Result<String> {
    let mut out = String::new();
    for r in records {
        out.push_str(&serde_json::to_string(r).expect("record serialization cannot fail"));
        out.push('\n');
    }
    Ok(out)
}

/// Parse JSON lines back into records.
pub fn from_jsonl<T: for<'de> Deserialize<'de>>(text: &str) -> Result<Vec<T>> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            serde_json::from_str(l).map_err(|e| {
                crate::error::Error::invalid("jsonl", format!("bad record: {e}"))
            })
        })
        .collect()
}
