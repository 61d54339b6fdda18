//! CSV and JSON report output.

use crate::error::{Error, Result};

use super::{ExperimentReport, Knee, SweepPoint};

/// CSV column order, matching [`SweepPoint`]'s fields.
pub const COLUMNS: &[&str] = &[
    "kind",
    "labels",
    "n",
    "eps",
    "g",
    "k",
    "redundancy",
    "depth",
    "trials",
    "bits_source",
    "bits_per_symbol",
    "h_measured",
    "m_measured",
    "collisions_mean",
    "collisions_sd",
    "unshared_collisions_mean",
    "unresolved_mean",
    "unresolved_sd",
    "promotions_mean",
    "resolution_rate",
    "resolution_rate_sd",
    "predicted_collisions",
    "predicted_collisions_unshared",
    "predicted_k_star",
    "coded_bits_mean",
    "predicted_coded_bits",
    "overhead_factor",
    "overhead_factor_sd",
    "predicted_overhead_factor",
    "threshold_k",
    "threshold_overhead_factor",
];

fn csv_error(e: impl std::fmt::Display) -> Error {
    Error::Format(format!("csv: {e}"))
}

fn write_rows<T: serde::Serialize>(preamble: String, rows: &[T]) -> Result<String> {
    let mut w = csv::Writer::from_writer(preamble.into_bytes());
    for r in rows {
        w.serialize(r).map_err(csv_error)?;
    }
    let bytes = w.into_inner().map_err(csv_error)?;
    String::from_utf8(bytes).map_err(csv_error)
}

impl ExperimentReport {
    fn preamble(&self, what: &str) -> Result<String> {
        let config = serde_json::to_string(&self.config).map_err(|e| Error::Format(e.to_string()))?;
        Ok(format!(
            "# {what}: kind={} rng={} seed={}\n# config: {config}\n",
            self.kind.name(),
            self.rng,
            self.config.seed
        ))
    }

    /// One row per sweep point. Comment lines start with `#`; empty cells
    /// do not apply to the sweep kind.
    pub fn to_csv(&self) -> Result<String> {
        let mut pre = self.preamble("sweep points")?;
        pre.push_str(&format!("# columns: {}\n", COLUMNS.join(" ")));
        pre.push_str("# sd columns are per-trial standard deviations; rates are fractions of nodes\n");
        write_rows(pre, &self.points)
    }

    /// One row per (labels, n, ε) group: empirical and predicted knees.
    pub fn knees_csv(&self) -> Result<String> {
        write_rows(self.preamble("knees")?, &self.knees)
    }

    /// Config echo, points and knees; per-trial arrays with `full`.
    pub fn to_json(&self, full: bool) -> Result<String> {
        let mut copy = self.clone();
        if !full {
            copy.trials.clear();
        }
        serde_json::to_string_pretty(&copy).map_err(|e| Error::Format(e.to_string()))
    }
}

/// Reads back the rows written by [`ExperimentReport::to_csv`].
pub fn read_points_csv(text: &str) -> Result<Vec<SweepPoint>> {
    read_rows(text)
}

pub fn read_knees_csv(text: &str) -> Result<Vec<Knee>> {
    read_rows(text)
}

fn read_rows<T: serde::de::DeserializeOwned>(text: &str) -> Result<Vec<T>> {
    csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes())
        .deserialize()
        .collect::<std::result::Result<Vec<T>, _>>()
        .map_err(csv_error)
}
