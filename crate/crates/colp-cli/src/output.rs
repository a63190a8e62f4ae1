//! Run records and human-readable output.
//!
//! Every command emits a line-oriented JSON record stream: a `meta` line
//! echoing the full resolved configuration, one line per item (replication,
//! pair, or verdict), a `summary` line with aggregates, and a `footer`
//! carrying the wall time. Everything except the footer is a pure function
//! of the configuration, so two runs with the same arguments produce
//! byte-identical bodies.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use colp_core::{rng::RNG_ALGORITHM, Error, Result};
use serde::Serialize;

#[derive(Serialize)]
struct MetaRecord<'a, C: Serialize> {
    record: &'static str,
    tool: &'static str,
    version: &'static str,
    rng: &'static str,
    command: &'a str,
    config: &'a C,
}

#[derive(Serialize)]
struct FooterRecord {
    record: &'static str,
    wall_time_ms: u128,
}

/// Collects the JSON lines of one run and writes them at the end.
pub struct RunRecord {
    lines: Vec<String>,
    started: Instant,
    out: Option<PathBuf>,
}

impl RunRecord {
    pub fn start<C: Serialize>(command: &str, config: &C, out: Option<PathBuf>) -> Result<Self> {
        let mut record = Self {
            lines: Vec::new(),
            started: Instant::now(),
            out,
        };
        record.push(&MetaRecord {
            record: "meta",
            tool: "colp",
            version: env!("CARGO_PKG_VERSION"),
            rng: RNG_ALGORITHM,
            command,
            config,
        })?;
        Ok(record)
    }

    pub fn push<T: Serialize>(&mut self, item: &T) -> Result<()> {
        let line = serde_json::to_string(item)
            .map_err(|e| Error::InvalidConfig(format!("record serialization failed: {e}")))?;
        self.lines.push(line);
        Ok(())
    }

    /// Append the footer and write the stream to `--out`, when given.
    pub fn finish(mut self) -> Result<()> {
        let footer = FooterRecord {
            record: "footer",
            wall_time_ms: self.started.elapsed().as_millis(),
        };
        self.push(&footer)?;
        if let Some(path) = &self.out {
            let mut file = std::fs::File::create(path).map_err(|e| Error::Io {
                path: path.display().to_string(),
                source: e,
            })?;
            for line in &self.lines {
                writeln!(file, "{line}").map_err(|e| Error::Io {
                    path: path.display().to_string(),
                    source: e,
                })?;
            }
        }
        Ok(())
    }
}

/// Aligned text table on stdout.
pub fn print_table(headers: &[&str], rows: &[Vec<String>]) {
    let mut widths: Vec<usize> = headers.iter().map(|h| h.len()).collect();
    for row in rows {
        for (i, cell) in row.iter().enumerate() {
            widths[i] = widths[i].max(cell.len());
        }
    }
    let line = |cells: Vec<&str>| {
        let joined: Vec<String> = cells
            .iter()
            .enumerate()
            .map(|(i, c)| format!("{:<width$}", c, width = widths[i]))
            .collect();
        println!("{}", joined.join("  ").trim_end());
    };
    line(headers.to_vec());
    let rules: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
    println!("{}", rules.join("  "));
    for row in rows {
        line(row.iter().map(String::as_str).collect());
    }
}

/// One row of plot-ready data.
pub struct PlotRow {
    pub x: String,
    pub accuracy: f64,
    pub se: f64,
    pub mean_tau: Option<f64>,
}

/// Tab-separated plot data: `x  accuracy  se  mean_tau` (tau blank when not
/// applicable).
pub fn write_plot_data(path: &Path, rows: &[PlotRow]) -> Result<()> {
    let mut out = String::from("x\taccuracy\tse\tmean_tau\n");
    for row in rows {
        let tau = row.mean_tau.map(|t| t.to_string()).unwrap_or_default();
        out.push_str(&format!("{}\t{}\t{}\t{}\n", row.x, row.accuracy, row.se, tau));
    }
    std::fs::write(path, out).map_err(|e| Error::Io {
        path: path.display().to_string(),
        source: e,
    })
}
