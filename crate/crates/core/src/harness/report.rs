use std::path::Path;

use serde::Serialize;

use crate::error::Result;
use crate::metrics::MetricsReport;
use crate::solver::{RecoveryReport, Variant};

use super::{ExperimentConfig, TrialParams};

/// One (seed, variant) trial.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RawRow {
    pub seed: u64,
    pub variant: Variant,
    pub tau: f64,
    pub epsilon: f64,
    pub iterations: Option<usize>,
    pub converged: Option<bool>,
    pub flips_estimated: Option<usize>,
    pub flips_true: Option<usize>,
    pub metrics: Option<MetricsReport>,
    pub error: Option<String>,
}

impl RawRow {
    pub(crate) fn new(
        seed: u64,
        variant: Variant,
        params: TrialParams,
        flips_true: Option<usize>,
        outcome: Result<(RecoveryReport, MetricsReport)>,
    ) -> Self {
        let mut row = RawRow {
            seed,
            variant,
            tau: params.tau,
            epsilon: params.epsilon,
            iterations: None,
            converged: None,
            flips_estimated: None,
            flips_true,
            metrics: None,
            error: None,
        };
        match outcome {
            Ok((report, metrics)) => {
                row.iterations = Some(report.iterations);
                row.converged = Some(report.converged);
                row.flips_estimated = Some(report.lambda.flips());
                row.metrics = Some(metrics);
            }
            Err(e) => row.error = Some(e.to_string()),
        }
        row
    }
}

/// Per-variant summary over the successful trials.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Aggregate {
    pub variant: Variant,
    pub params: TrialParams,
    pub trials: usize,
    pub failures: usize,
    /// MAE, MSE, PER, HE, AE medians; `None` when every trial failed.
    pub median: Option<[f64; 5]>,
    pub mean: Option<[f64; 5]>,
}

/// Median of a non-empty sample; the mean of the middle pair for even sizes.
pub(crate) fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

fn aggregate(variant: Variant, params: TrialParams, rows: &[RawRow]) -> Aggregate {
    let mine: Vec<&RawRow> = rows.iter().filter(|r| r.variant == variant).collect();
    let ok: Vec<[f64; 5]> = mine
        .iter()
        .filter_map(|r| r.metrics.map(|m| m.values()))
        .collect();
    let (median_row, mean_row) = if ok.is_empty() {
        (None, None)
    } else {
        let mut med = [0.0; 5];
        let mut mean = [0.0; 5];
        for j in 0..5 {
            let mut column: Vec<f64> = ok.iter().map(|v| v[j]).collect();
            mean[j] = column.iter().sum::<f64>() / column.len() as f64;
            med[j] = median(&mut column);
        }
        (Some(med), Some(mean))
    };
    Aggregate {
        variant,
        params,
        trials: mine.len(),
        failures: mine.len() - ok.len(),
        median: median_row,
        mean: mean_row,
    }
}

/// Aggregated results in comparison-table form: one
/// column per variant, one row per metric.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultTable {
    pub aggregates: Vec<Aggregate>,
    pub raw: Vec<RawRow>,
}

fn fmt_opt<T: ToString>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

impl ResultTable {
    pub(crate) fn new(params: Vec<(Variant, TrialParams)>, raw: Vec<RawRow>) -> Self {
        let aggregates = params
            .into_iter()
            .map(|(v, p)| aggregate(v, p, &raw))
            .collect();
        ResultTable { aggregates, raw }
    }

    pub fn variants(&self) -> Vec<Variant> {
        self.aggregates.iter().map(|a| a.variant).collect()
    }

    /// Median of `metric` (`"MAE"`, `"MSE"`, `"PER"`, `"HE"` or `"AE"`) for
    /// `variant`.
    pub fn median(&self, variant: Variant, metric: &str) -> Option<f64> {
        let j = MetricsReport::NAMES
            .iter()
            .position(|n| n.eq_ignore_ascii_case(metric))?;
        self.aggregates
            .iter()
            .find(|a| a.variant == variant)?
            .median
            .map(|m| m[j])
    }

    /// Medians: header `metric,<variant>...`, rows MAE, MSE, PER, HE, AE.
    /// Cells of all-failed variants are empty.
    pub fn table_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["metric".to_string()];
        header.extend(self.aggregates.iter().map(|a| a.variant.name()));
        w.write_record(&header)?;
        for (j, name) in MetricsReport::NAMES.iter().enumerate() {
            let mut record = vec![name.to_string()];
            record.extend(self.aggregates.iter().map(|a| fmt_opt(a.median.map(|m| m[j]))));
            w.write_record(&record)?;
        }
        Ok(String::from_utf8(w.into_inner().map_err(|e| e.into_error())?).expect("csv is utf-8"))
    }

    /// One line per trial.
    pub fn raw_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record([
            "seed", "variant", "tau", "epsilon", "iterations", "converged", "flips_estimated",
            "flips_true", "mae", "mse", "per", "he", "ae", "error",
        ])?;
        for r in &self.raw {
            let metrics = r.metrics.map(|m| m.values());
            let mut record = vec![
                r.seed.to_string(),
                r.variant.name(),
                r.tau.to_string(),
                r.epsilon.to_string(),
                fmt_opt(r.iterations),
                fmt_opt(r.converged),
                fmt_opt(r.flips_estimated),
                fmt_opt(r.flips_true),
            ];
            record.extend((0..5).map(|j| fmt_opt(metrics.map(|m| m[j]))));
            record.push(r.error.clone().unwrap_or_default());
            w.write_record(&record)?;
        }
        Ok(String::from_utf8(w.into_inner().map_err(|e| e.into_error())?).expect("csv is utf-8"))
    }

    /// Configuration, tuned parameters, aggregates and raw rows as JSON.
    pub fn report_json(&self, cfg: &ExperimentConfig) -> Result<String> {
        #[derive(Serialize)]
        struct Report<'a> {
            tool: &'static str,
            version: &'static str,
            config: &'a ExperimentConfig,
            aggregates: &'a [Aggregate],
            raw: &'a [RawRow],
        }
        Ok(serde_json::to_string_pretty(&Report {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            config: cfg,
            aggregates: &self.aggregates,
            raw: &self.raw,
        })?)
    }

    /// Writes `table.csv`, `raw.csv` and `report.json` into `dir`.
    pub fn write(&self, dir: &Path, cfg: &ExperimentConfig) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("table.csv"), self.table_csv()?)?;
        std::fs::write(dir.join("raw.csv"), self.raw_csv()?)?;
        std::fs::write(dir.join("report.json"), self.report_json(cfg)?)?;
        Ok(())
    }
}
