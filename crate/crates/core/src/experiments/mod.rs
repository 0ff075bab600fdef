//! Replicated attack experiments and their CSV/SVG outputs.
//!
//! Every stochastic step draws from a stream keyed by (master seed, experiment,
//! setting, role, replicate, ...), so results do not depend on thread scheduling and
//! rows are emitted in a fixed order. Wall-clock times go to `timing.csv`, keeping
//! `results.csv` byte-identical across runs with the same seed.

mod config;
mod runs;
pub mod svg;

use std::fmt::Write as _;
use std::path::Path;

pub use config::{
    BenchConfig, DiagnosticThresholds, ObfuscateConfig, ScenarioConfig, SingleAttackConfig, TwoBallsSetting, TABLE1_PUBLISHED,
    TABLE1_SETTINGS,
};
pub use runs::{
    run_attack, run_bench, run_calibrate, run_curve, run_obfuscate, run_table1, AttackOutput, BenchOutput, BenchRow, CalibrationOutput,
    CalibrationRow, CurveOutput, CurveSummaryRow, ObfuscateOutput, ObfuscateRow, SettingSummary, Table1Output,
};

use crate::error::{Error, Result};
use crate::inference::AttackReport;
use crate::strategies::ExitObservationSet;

/// One attack in a replicated experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    /// 1-based setting index.
    pub setting: usize,
    pub strategy: &'static str,
    pub replicate: usize,
    pub n: usize,
    pub posterior_mse: f64,
    pub bias2: f64,
    pub variance: f64,
    /// Mean squared perturbation of the `n` observed exits.
    pub sp_mean: f64,
    pub max_rhat: f64,
    pub min_ess: f64,
    /// Seconds; written to `timing.csv`, not `results.csv`.
    pub wall_time: f64,
}

pub const RESULTS_HEADER: &str = "setting,strategy,replicate,n,posterior_mse,bias2,variance,sp_mean,max_rhat,min_ess";

impl ResultRow {
    pub fn new(setting: usize, replicate: usize, obs: &ExitObservationSet, report: &AttackReport) -> Self {
        let (max_rhat, min_ess) = report
            .samples
            .as_ref()
            .map_or((1.0, f64::INFINITY), |s| (s.max_rhat(), s.min_ess()));
        ResultRow {
            setting,
            strategy: obs.strategy.tag(),
            replicate,
            n: obs.len(),
            posterior_mse: report.posterior_mse,
            bias2: report.mse_decomposition.bias2,
            variance: report.mse_decomposition.variance,
            sp_mean: obs.sps.iter().sum::<f64>() / obs.len() as f64,
            max_rhat,
            min_ess,
            wall_time: report.wall_time,
        }
    }

    fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{}",
            self.setting,
            self.strategy,
            self.replicate,
            self.n,
            self.posterior_mse,
            self.bias2,
            self.variance,
            self.sp_mean,
            self.max_rhat,
            self.min_ess
        )
    }
}

pub fn results_csv(rows: &[ResultRow]) -> String {
    let mut s = String::from(RESULTS_HEADER);
    s.push('\n');
    for r in rows {
        s.push_str(&r.csv_line());
        s.push('\n');
    }
    s
}

pub fn timing_csv(rows: &[ResultRow]) -> String {
    let mut s = String::from("setting,strategy,replicate,n,wall_time\n");
    for r in rows {
        let _ = writeln!(s, "{},{},{},{},{}", r.setting, r.strategy, r.replicate, r.n, r.wall_time);
    }
    s
}

/// Empirical quantile with linear interpolation between order statistics (type 7).
pub fn quantile(values: &[f64], p: f64) -> f64 {
    assert!(!values.is_empty() && (0.0..=1.0).contains(&p));
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let h = (v.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(v.len() - 1);
    v[lo] + (h - lo as f64) * (v[hi] - v[lo])
}

pub fn median(values: &[f64]) -> f64 {
    quantile(values, 0.5)
}

/// Rows whose chains breach the thresholds.
pub fn diagnostic_breaches<'a>(rows: &'a [ResultRow], t: &DiagnosticThresholds) -> Vec<&'a ResultRow> {
    rows.iter()
        .filter(|r| !(r.max_rhat < t.max_rhat) || !(r.min_ess > t.min_ess))
        .collect()
}

/// `Err(Diagnostics)` naming the first breaches, if any.
pub fn check_diagnostics(rows: &[ResultRow], t: &DiagnosticThresholds) -> Result<()> {
    let bad = diagnostic_breaches(rows, t);
    if bad.is_empty() {
        return Ok(());
    }
    let listed: Vec<String> = bad
        .iter()
        .take(5)
        .map(|r| {
            format!(
                "setting {} {} replicate {} n {} (rhat {:.3}, ess {:.0})",
                r.setting, r.strategy, r.replicate, r.n, r.max_rhat, r.min_ess
            )
        })
        .collect();
    Err(Error::Diagnostics(format!(
        "{} of {} attacks breach rhat < {} / ess > {}: {}",
        bad.len(),
        rows.len(),
        t.max_rhat,
        t.min_ess,
        listed.join("; ")
    )))
}

pub(crate) fn write_file(dir: &Path, name: &str, contents: &str) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let path = dir.join(name);
    std::fs::write(&path, contents).map_err(|e| Error::io(path, e))
}
