//! Subcommand implementations. Each command parses its inputs, runs the
//! core computation, and emits one report through [`crate::report`].

pub mod assoc_cmd;
pub mod flat_cmd;
pub mod hm_cmd;
pub mod loja_cmd;
pub mod reproduce_cmd;
pub mod series_cmd;
pub mod weights_cmd;

use crate::parse;
use carleman_core::math;
use carleman_core::weights::WeightSequence;
use serde_json::{json, Value};
use std::path::PathBuf;

/// Weight-sequence selection, shared by most verbs.
#[derive(clap::Args, Debug)]
#[group(required = true, multiple = false)]
pub struct SeqOpt {
    /// Gevrey-type weights alpha,beta (1,0 gives M_j = j!)
    #[arg(long, value_name = "A,B")]
    pub gevrey: Option<String>,
    /// Explicit weights M_0,M_1,... (M_0 must be 1, ratios nondecreasing)
    #[arg(long, value_name = "V,...")]
    pub explicit: Option<String>,
    /// Explicit weights as natural logs ln M_0, ln M_1, ...
    #[arg(long, value_name = "L,...")]
    pub explicit_log: Option<String>,
}

impl SeqOpt {
    /// Builds the sequence and its config echo.
    pub fn build(&self) -> Result<(WeightSequence, Value), String> {
        if let Some(s) = &self.gevrey {
            let (alpha, beta) = parse::gevrey_pair(s)?;
            let m = WeightSequence::gevrey(alpha, beta).map_err(|e| e.to_string())?;
            let echo = json!({"kind": "gevrey", "alpha": alpha, "beta": beta});
            return Ok((m, echo));
        }
        if let Some(s) = &self.explicit {
            let values = parse::f64_list(s)?;
            let m = WeightSequence::explicit(&values).map_err(|e| e.to_string())?;
            let echo = json!({"kind": "explicit", "values": values});
            return Ok((m, echo));
        }
        let s = self.explicit_log.as_ref().expect("clap group guarantees one");
        let values = parse::f64_list(s)?;
        let m = WeightSequence::from_log_values(&values).map_err(|e| e.to_string())?;
        let echo = json!({"kind": "explicit-log", "log_values": values});
        Ok((m, echo))
    }

    /// Floor below which hm evaluation is refused: configured floor, raised
    /// to keep Gevrey minimizer indices under the weight-table ceiling.
    pub fn safe_t_floor(&self, configured: f64) -> f64 {
        match &self.gevrey {
            Some(s) => match parse::gevrey_pair(s) {
                Ok((alpha, _)) => configured.max(2.0 * math::powf(2.0, -33.0 * alpha)),
                Err(_) => configured,
            },
            None => configured,
        }
    }
}

/// Report/CSV destinations.
#[derive(clap::Args, Debug)]
pub struct OutOpt {
    /// Write the JSON report to FILE instead of stdout
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
    /// Write the command's side table as CSV to FILE
    #[arg(long, value_name = "FILE")]
    pub csv: Option<PathBuf>,
}

impl OutOpt {
    pub fn emitter(&self) -> crate::report::Emitter {
        crate::report::Emitter::new(self.out.clone(), self.csv.clone())
    }
}

/// A one-dimensional evaluation grid in t.
#[derive(clap::Args, Debug)]
pub struct TGridOpt {
    /// Lower end of the t grid
    #[arg(long, value_name = "T", default_value = "1e-3")]
    pub t_from: String,
    /// Upper end of the t grid
    #[arg(long, value_name = "T", default_value = "1")]
    pub t_to: String,
    /// Number of t grid points
    #[arg(long, value_name = "N", default_value_t = 200)]
    pub t_count: usize,
    /// Spacing of the t grid: log or linear
    #[arg(long, value_name = "log|linear", default_value = "log")]
    pub t_spacing: String,
}

impl TGridOpt {
    pub fn build(&self, floor: f64) -> Result<(Vec<f64>, Value), String> {
        let from = parse::f64_value(&self.t_from)?;
        let to = parse::f64_value(&self.t_to)?;
        if !(from > 0.0) || !(to > from) {
            return Err(format!("need 0 < t-from < t-to, got {from} and {to}"));
        }
        if from < floor {
            return Err(format!(
                "t-from {from} below the evaluation floor {floor}; raise --t-from or lower --t-floor"
            ));
        }
        if self.t_count < 2 {
            return Err("t-count must be at least 2".into());
        }
        let n = self.t_count;
        let grid: Vec<f64> = match self.t_spacing.as_str() {
            "log" => {
                let (la, lb) = (math::ln(from), math::ln(to));
                (0..n)
                    .map(|i| math::exp(la + (lb - la) * i as f64 / (n - 1) as f64))
                    .collect()
            }
            "linear" => (0..n)
                .map(|i| from + (to - from) * i as f64 / (n - 1) as f64)
                .collect(),
            other => return Err(format!("unknown spacing {other:?} (use log or linear)")),
        };
        let echo = json!({
            "from": from,
            "to": to,
            "count": n,
            "spacing": self.t_spacing,
        });
        Ok((grid, echo))
    }
}
