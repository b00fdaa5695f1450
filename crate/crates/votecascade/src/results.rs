//! Aggregated results and their CSV forms.

use std::path::Path;

use crate::error::{HarnessError, Result};

pub const CSV_COLUMNS: [&str; 10] =
    ["algorithm", "n_voters", "budget_fraction", "delta", "noise", "round", "mean", "std", "time_mean_s", "time_std_s"];

/// Coordinates of one result cell.
#[derive(Debug, Clone, PartialEq)]
pub struct CellKey {
    pub algorithm: String,
    pub n_voters: usize,
    pub budget_fraction: f64,
    pub delta: f64,
    /// Noise specification as written in configs.
    pub noise: String,
    /// 1-based.
    pub round: usize,
}

/// Mean and standard deviation of the normalized change in margin, and of
/// the seed-selection time, for one cell.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub key: CellKey,
    pub mean: f64,
    pub std: f64,
    pub time_mean_s: f64,
    pub time_std_s: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ResultTable {
    pub rows: Vec<ResultRow>,
}

fn round3(x: f64) -> f64 {
    // Parse the printed value so the result matches what the CSV holds.
    format!("{x:.3}").parse().expect("formatted float parses")
}

impl ResultTable {
    /// The row for `algorithm` at the given coordinates.
    pub fn find(
        &self,
        algorithm: &str,
        n_voters: usize,
        budget_fraction: f64,
        delta: f64,
        noise: &str,
        round: usize,
    ) -> Option<&ResultRow> {
        self.rows.iter().find(|r| {
            let k = &r.key;
            k.algorithm == algorithm
                && k.n_voters == n_voters
                && k.budget_fraction == budget_fraction
                && k.delta == delta
                && k.noise == noise
                && k.round == round
        })
    }

    /// The table as it reads back from CSV: mean and std at three decimals.
    pub fn rounded(&self) -> ResultTable {
        let rows =
            self.rows.iter().map(|r| ResultRow { mean: round3(r.mean), std: round3(r.std), ..r.clone() }).collect();
        ResultTable { rows }
    }

    /// CSV with a header; mean and std at three decimals, everything else at
    /// full precision.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let csv_err = |e: csv::Error| HarnessError::config(format!("CSV encoding failed: {e}"));
        w.write_record(CSV_COLUMNS).map_err(csv_err)?;
        for r in &self.rows {
            let k = &r.key;
            w.write_record([
                k.algorithm.clone(),
                k.n_voters.to_string(),
                k.budget_fraction.to_string(),
                k.delta.to_string(),
                k.noise.clone(),
                k.round.to_string(),
                format!("{:.3}", r.mean),
                format!("{:.3}", r.std),
                r.time_mean_s.to_string(),
                r.time_std_s.to_string(),
            ])
            .map_err(csv_err)?;
        }
        let bytes = w.into_inner().map_err(|e| HarnessError::config(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("CSV output is UTF-8"))
    }

    pub fn from_csv(text: &str, path: &Path) -> Result<Self> {
        let mut reader = csv::Reader::from_reader(text.as_bytes());
        let headers = reader.headers().map_err(|e| HarnessError::parse(path, 1, e.to_string()))?;
        if headers.iter().ne(CSV_COLUMNS) {
            return Err(HarnessError::parse(path, 1, "unexpected header"));
        }
        let mut rows = Vec::new();
        for (i, record) in reader.records().enumerate() {
            let line = i + 2;
            let rec = record.map_err(|e| HarnessError::parse(path, line, e.to_string()))?;
            let field = |j: usize| rec.get(j).unwrap_or("");
            fn num<T: std::str::FromStr>(path: &Path, line: usize, s: &str, col: &str) -> Result<T> {
                s.parse().map_err(|_| HarnessError::parse(path, line, format!("invalid {col} `{s}`")))
            }
            rows.push(ResultRow {
                key: CellKey {
                    algorithm: field(0).to_string(),
                    n_voters: num(path, line, field(1), CSV_COLUMNS[1])?,
                    budget_fraction: num(path, line, field(2), CSV_COLUMNS[2])?,
                    delta: num(path, line, field(3), CSV_COLUMNS[3])?,
                    noise: field(4).to_string(),
                    round: num(path, line, field(5), CSV_COLUMNS[5])?,
                },
                mean: num(path, line, field(6), CSV_COLUMNS[6])?,
                std: num(path, line, field(7), CSV_COLUMNS[7])?,
                time_mean_s: num(path, line, field(8), CSV_COLUMNS[8])?,
                time_std_s: num(path, line, field(9), CSV_COLUMNS[9])?,
            });
        }
        Ok(ResultTable { rows })
    }

    /// Long format for plotting: one `statistic,value` pair per line.
    pub fn to_plot_data(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let csv_err = |e: csv::Error| HarnessError::config(format!("CSV encoding failed: {e}"));
        w.write_record(["algorithm", "n_voters", "budget_fraction", "delta", "noise", "round", "statistic", "value"])
            .map_err(csv_err)?;
        for r in &self.rows {
            let k = &r.key;
            for (stat, value) in [
                ("normalized_dmov_mean", r.mean),
                ("normalized_dmov_std", r.std),
                ("time_mean_s", r.time_mean_s),
                ("time_std_s", r.time_std_s),
            ] {
                w.write_record([
                    k.algorithm.clone(),
                    k.n_voters.to_string(),
                    k.budget_fraction.to_string(),
                    k.delta.to_string(),
                    k.noise.clone(),
                    k.round.to_string(),
                    stat.to_string(),
                    value.to_string(),
                ])
                .map_err(csv_err)?;
            }
        }
        let bytes = w.into_inner().map_err(|e| HarnessError::config(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("CSV output is UTF-8"))
    }
}

pub fn emit_csv(table: &ResultTable, path: &Path) -> Result<()> {
    if table.rows.is_empty() {
        return Err(HarnessError::config("refusing to write an empty result table"));
    }
    crate::formats::write_file(path, &table.to_csv()?)
}

pub fn emit_plot_data(table: &ResultTable, path: &Path) -> Result<()> {
    if table.rows.is_empty() {
        return Err(HarnessError::config("refusing to write an empty result table"));
    }
    crate::formats::write_file(path, &table.to_plot_data()?)
}

pub fn read_csv(path: &Path) -> Result<ResultTable> {
    ResultTable::from_csv(&crate::formats::read_file(path)?, path)
}
