//! Reading cause-effect pair files.
//!
//! A pair file is a UTF-8 CSV with a header row; the two named columns are
//! read as categorical variables. Distinct values map to level indices in
//! lexicographic (byte) order of the strings, which keeps the encoding
//! deterministic across runs and platforms. Rows with a missing value in
//! either column (empty or "NA") are dropped and counted. Continuous
//! columns can be discretized at evenly spaced empirical quantiles first.
//!
//! A pair collection is a directory with a `pairs.csv` manifest (columns
//! `file,x_column,y_column,truth,description`) plus one CSV per pair.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::{Direction, Error, PairedSample, Result};

/// One entry of a pair collection.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairFile {
    pub path: PathBuf,
    pub x_column: String,
    pub y_column: String,
    /// Declared true direction, when known.
    pub truth: Option<Direction>,
    pub description: String,
}

/// What happened while reading a pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestReport {
    pub rows_read: usize,
    pub rows_dropped: usize,
}

fn csv_err(path: &Path, source: csv::Error) -> Error {
    Error::Csv {
        path: path.display().to_string(),
        source,
    }
}

fn is_missing(field: &str) -> bool {
    let t = field.trim();
    t.is_empty() || t == "NA"
}

/// Raw string columns after listwise deletion of missing rows.
fn read_columns(file: &PairFile) -> Result<(Vec<String>, Vec<String>, IngestReport)> {
    if file.x_column == file.y_column {
        return Err(Error::InvalidConfig(format!(
            "x and y columns are both {:?}",
            file.x_column
        )));
    }
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(&file.path)
        .map_err(|e| csv_err(&file.path, e))?;
    let headers = reader.headers().map_err(|e| csv_err(&file.path, e))?;
    let find = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::MissingColumn(name.to_string()))
    };
    let xi = find(&file.x_column)?;
    let yi = find(&file.y_column)?;

    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut rows_read = 0;
    let mut rows_dropped = 0;
    for record in reader.records() {
        let record = record.map_err(|e| csv_err(&file.path, e))?;
        rows_read += 1;
        let x = record.get(xi).unwrap_or("");
        let y = record.get(yi).unwrap_or("");
        if is_missing(x) || is_missing(y) {
            rows_dropped += 1;
            continue;
        }
        xs.push(x.trim().to_string());
        ys.push(y.trim().to_string());
    }
    if xs.is_empty() {
        return Err(Error::EmptyInput(file.path.display().to_string()));
    }
    Ok((
        xs,
        ys,
        IngestReport {
            rows_read,
            rows_dropped,
        },
    ))
}

/// Levels in lexicographic order of the distinct strings; a pure function
/// of the value multiset.
fn encode_levels(values: &[String]) -> (Vec<usize>, Vec<String>) {
    let mut index: BTreeMap<&str, usize> = BTreeMap::new();
    for v in values {
        index.entry(v.as_str()).or_default();
    }
    let labels: Vec<String> = index.keys().map(|s| s.to_string()).collect();
    for (i, label) in labels.iter().enumerate() {
        *index.get_mut(label.as_str()).unwrap() = i;
    }
    let codes = values.iter().map(|v| index[v.as_str()]).collect();
    (codes, labels)
}

fn parse_numeric(column: &str, values: &[String]) -> Result<Vec<f64>> {
    values
        .iter()
        .enumerate()
        .map(|(row, v)| {
            v.parse::<f64>().map_err(|_| Error::NonNumericColumn {
                column: column.to_string(),
                row: row + 1,
                value: v.clone(),
            })
        })
        .collect()
}

fn check_level_gate(column: &str, levels: usize) -> Result<()> {
    if levels < 3 {
        return Err(Error::TooFewLevels {
            column: column.to_string(),
            got: levels,
        });
    }
    Ok(())
}

/// Read a pair as categorical columns. Enforces the causal gate of at least
/// 3 distinct observed levels per column.
pub fn read_pair(file: &PairFile) -> Result<(PairedSample, IngestReport)> {
    read_pair_discretized(file, None, None)
}

/// Columns with more distinct numeric values than this are refused unless
/// the caller asks for discretization.
const CONTINUOUS_GATE: usize = 12;

/// Read a pair, optionally discretizing a numeric column into the given
/// number of quantile bins first (bin labels `q1..qK`).
pub fn read_pair_discretized(
    file: &PairFile,
    x_bins: Option<usize>,
    y_bins: Option<usize>,
) -> Result<(PairedSample, IngestReport)> {
    let (xs, ys, report) = read_columns(file)?;
    let encode = |column: &str, raw: &[String], bins: Option<usize>| -> Result<(Vec<usize>, Vec<String>)> {
        match bins {
            None => {
                let (codes, labels) = encode_levels(raw);
                if labels.len() > CONTINUOUS_GATE
                    && raw.iter().all(|v| v.parse::<f64>().is_ok())
                {
                    return Err(Error::ColumnLooksContinuous {
                        column: column.to_string(),
                        distinct: labels.len(),
                    });
                }
                Ok((codes, labels))
            }
            Some(b) => {
                let numeric = parse_numeric(column, raw)?;
                let codes = discretize(&numeric, b)?;
                let labels = (1..=b).map(|k| format!("q{k}")).collect();
                Ok((codes, labels))
            }
        }
    };
    let (x, x_labels) = encode(&file.x_column, &xs, x_bins)?;
    let (y, y_labels) = encode(&file.y_column, &ys, y_bins)?;
    check_level_gate(&file.x_column, distinct_count(&x))?;
    check_level_gate(&file.y_column, distinct_count(&y))?;
    let sample = PairedSample::with_labels(x, y, x_labels, y_labels)?;
    Ok((sample, report))
}

fn distinct_count(codes: &[usize]) -> usize {
    let mut seen = std::collections::BTreeSet::new();
    for &c in codes {
        seen.insert(c);
    }
    seen.len()
}

/// Bin values at the k/bins empirical quantiles (linear interpolation
/// between order statistics). A value lands in bin j when
/// `q_{j-1} < v <= q_j`, so ties at a cut point go to the lower bin.
/// Monotone: v <= w implies bin(v) <= bin(w).
pub fn discretize(values: &[f64], bins: usize) -> Result<Vec<usize>> {
    if bins < 2 {
        return Err(Error::InvalidConfig(format!(
            "need at least 2 bins, got {bins}"
        )));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteParameter("values"));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut distinct = sorted.clone();
    distinct.dedup();
    if distinct.len() < bins {
        return Err(Error::TooFewDistinctValues {
            bins,
            distinct: distinct.len(),
        });
    }
    let n = sorted.len();
    let cuts: Vec<f64> = (1..bins)
        .map(|k| {
            let h = (n - 1) as f64 * k as f64 / bins as f64;
            let lo = h.floor() as usize;
            let frac = h - lo as f64;
            if frac == 0.0 {
                sorted[lo]
            } else {
                sorted[lo] + frac * (sorted[lo + 1] - sorted[lo])
            }
        })
        .collect();
    for w in cuts.windows(2) {
        if w[1] <= w[0] {
            let at = cuts.iter().position(|&c| c == w[0]).unwrap_or(0);
            return Err(Error::CollapsedQuantiles { lo: at + 1, hi: at + 2 });
        }
    }
    Ok(values
        .iter()
        .map(|&v| cuts.partition_point(|&q| q < v))
        .collect())
}

/// Read a pair-collection manifest: `pairs.csv` in `dir` with columns
/// `file,x_column,y_column,truth,description`.
pub fn read_manifest(dir: &Path) -> Result<Vec<PairFile>> {
    let manifest = dir.join("pairs.csv");
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(&manifest)
        .map_err(|e| csv_err(&manifest, e))?;
    let headers = reader.headers().map_err(|e| csv_err(&manifest, e))?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Manifest(format!("{}: missing column {name:?}", manifest.display())))
    };
    let file_i = col("file")?;
    let x_i = col("x_column")?;
    let y_i = col("y_column")?;
    let truth_i = col("truth")?;
    let desc_i = col("description")?;

    let mut pairs = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record = record.map_err(|e| csv_err(&manifest, e))?;
        let field = |i: usize| record.get(i).unwrap_or("").trim().to_string();
        let truth_raw = field(truth_i);
        let truth = if truth_raw.is_empty() {
            None
        } else {
            Some(truth_raw.parse::<Direction>().map_err(|_| {
                Error::Manifest(format!(
                    "{} row {}: bad truth value {:?}",
                    manifest.display(),
                    row + 1,
                    truth_raw
                ))
            })?)
        };
        let name = field(file_i);
        if name.is_empty() {
            return Err(Error::Manifest(format!(
                "{} row {}: empty file name",
                manifest.display(),
                row + 1
            )));
        }
        pairs.push(PairFile {
            path: dir.join(name),
            x_column: field(x_i),
            y_column: field(y_i),
            truth,
            description: field(desc_i),
        });
    }
    if pairs.is_empty() {
        return Err(Error::Manifest(format!(
            "{}: no pairs listed",
            manifest.display()
        )));
    }
    Ok(pairs)
}

/// Write a sample back out as a two-column CSV using its level names.
pub fn write_pair(
    path: &Path,
    sample: &PairedSample,
    x_column: &str,
    y_column: &str,
) -> Result<()> {
    let mut writer = csv::Writer::from_path(path).map_err(|e| csv_err(path, e))?;
    writer
        .write_record([x_column, y_column])
        .map_err(|e| csv_err(path, e))?;
    for (&xi, &yi) in sample.x().iter().zip(sample.y()) {
        writer
            .write_record([&sample.x_labels()[xi], &sample.y_labels()[yi]])
            .map_err(|e| csv_err(path, e))?;
    }
    writer.flush().map_err(|e| Error::Io {
        path: path.display().to_string(),
        source: e,
    })?;
    Ok(())
}
