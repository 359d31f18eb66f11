//! Deterministic CSV and JSON writers and the run manifest.
//!
//! Numbers are written in Rust's shortest round-trip form, so every value
//! reads back bit-exact and the text does not depend on locale. Missing
//! values are empty fields.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::ConfigEcho;
use crate::engine::{ObservableSeries, Record, SimulationConfig};
use crate::entropy::HorizonReport;
use crate::error::{Error, Result};
use crate::experiments::JumpPoint;

/// A CSV column of an observable series.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Column {
    N,
    Coherence,
    PopUp,
    PopDown,
    SVn,
    SSh,
    SShCum,
    SKs,
}

impl Column {
    pub const ALL: [Column; 8] = [
        Column::N,
        Column::Coherence,
        Column::PopUp,
        Column::PopDown,
        Column::SVn,
        Column::SSh,
        Column::SShCum,
        Column::SKs,
    ];

    pub fn header(&self) -> &'static str {
        match self {
            Column::N => "n",
            Column::Coherence => "coherence",
            Column::PopUp => "pop_up",
            Column::PopDown => "pop_down",
            Column::SVn => "s_vn",
            Column::SSh => "s_sh",
            Column::SShCum => "s_sh_cum",
            Column::SKs => "s_ks",
        }
    }

    fn write(&self, out: &mut String, r: &Record) {
        let opt = |out: &mut String, v: Option<f64>| {
            if let Some(v) = v {
                write!(out, "{v}").unwrap();
            }
        };
        match self {
            Column::N => write!(out, "{}", r.n).unwrap(),
            Column::Coherence => write!(out, "{}", r.coherence).unwrap(),
            Column::PopUp => write!(out, "{}", r.p_up).unwrap(),
            Column::PopDown => write!(out, "{}", r.p_down).unwrap(),
            Column::SVn => opt(out, r.s_vn),
            Column::SSh => opt(out, r.s_sh),
            Column::SShCum => opt(out, r.s_sh_cum),
            Column::SKs => opt(out, r.s_ks),
        }
    }
}

pub const SERIES_HEADER: &str = "n,coherence,pop_up,pop_down,s_vn,s_sh,s_sh_cum,s_ks";

/// The series as CSV with the standard header.
pub fn series_csv(series: &ObservableSeries) -> String {
    series_csv_columns(series, &Column::ALL)
}

pub fn series_csv_columns(series: &ObservableSeries, columns: &[Column]) -> String {
    let mut out = String::new();
    let header: Vec<_> = columns.iter().map(Column::header).collect();
    out.push_str(&header.join(","));
    out.push('\n');
    for r in &series.records {
        for (i, c) in columns.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            c.write(&mut out, r);
        }
        out.push('\n');
    }
    out
}

pub fn jump_csv(points: &[JumpPoint]) -> String {
    let mut out = String::from("theta,amplitude\n");
    for p in points {
        writeln!(out, "{},{}", p.theta, p.amplitude).unwrap();
    }
    out
}

/// Predicted and observed horizons of one chaotic run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HorizonJson {
    pub lambda_plus: f64,
    pub lyapunov: f64,
    pub sin_gamma: f64,
    pub n_box: f64,
    pub n_star: f64,
    pub observed_horizon: Option<usize>,
    pub s_max: f64,
    pub determinant: f64,
}

impl HorizonJson {
    pub fn new(report: &HorizonReport, observed: Option<usize>, determinant: f64) -> Self {
        HorizonJson {
            lambda_plus: report.lambda_plus,
            lyapunov: report.lyapunov,
            sin_gamma: report.sin_gamma,
            n_box: report.n_box,
            n_star: report.n_star,
            observed_horizon: observed,
            s_max: report.s_max,
            determinant,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("plain struct serializes");
        s.push('\n');
        s
    }
}

/// Sweep coordinate of an output, when it came from a sweep.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepPoint {
    pub param: String,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OutputEntry {
    pub file: String,
    pub sha256: String,
    pub config: ConfigEcho,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepPoint>,
    /// Misalignment angles of a jump scan; each run uses `config` with the
    /// initial state rotated by the angle.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub thetas: Option<Vec<f64>>,
}

/// Everything needed to regenerate the files of one command.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunManifest {
    pub version: String,
    pub command: String,
    pub seed: u64,
    pub outputs: Vec<OutputEntry>,
}

pub const MANIFEST_FILE: &str = "manifest.json";

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Output directory that records every file it writes into a manifest.
pub struct OutputDir {
    root: PathBuf,
    manifest: RunManifest,
}

impl OutputDir {
    pub fn create(root: &Path, command: &str, seed: u64) -> Result<Self> {
        fs::create_dir_all(root).map_err(|source| Error::Io {
            context: format!("creating {}", root.display()),
            source,
        })?;
        Ok(OutputDir {
            root: root.to_path_buf(),
            manifest: RunManifest {
                version: env!("CARGO_PKG_VERSION").to_string(),
                command: command.to_string(),
                seed,
                outputs: Vec::new(),
            },
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    fn write_raw(&self, name: &str, text: &str) -> Result<()> {
        let path = self.root.join(name);
        fs::write(&path, text).map_err(|source| Error::Io {
            context: format!("writing {}", path.display()),
            source,
        })
    }

    /// Writes a data file and lists it in the manifest.
    pub fn write(
        &mut self,
        name: &str,
        text: &str,
        cfg: &SimulationConfig,
        sweep: Option<SweepPoint>,
        thetas: Option<Vec<f64>>,
    ) -> Result<()> {
        self.write_raw(name, text)?;
        self.manifest.outputs.push(OutputEntry {
            file: name.to_string(),
            sha256: sha256_hex(text.as_bytes()),
            config: ConfigEcho::from(cfg),
            sweep,
            thetas,
        });
        Ok(())
    }

    /// Writes a file that is not a data output (plot scripts).
    pub fn write_companion(&self, name: &str, text: &str) -> Result<()> {
        self.write_raw(name, text)
    }

    pub fn manifest(&self) -> &RunManifest {
        &self.manifest
    }

    pub fn finish(self) -> Result<RunManifest> {
        let mut json = serde_json::to_string_pretty(&self.manifest)?;
        json.push('\n');
        self.write_raw(MANIFEST_FILE, &json)?;
        Ok(self.manifest)
    }
}

/// Gnuplot script plotting `columns` of `csv` against its first column.
pub fn gnuplot_script(csv: &str, title: &str, columns: &[&str]) -> String {
    let mut out = String::new();
    writeln!(out, "set datafile separator ','").unwrap();
    writeln!(out, "set key autotitle columnhead").unwrap();
    writeln!(out, "set title '{title}'").unwrap();
    let plots: Vec<String> = columns
        .iter()
        .map(|c| format!("'{csv}' using 1:'{c}' with lines"))
        .collect();
    writeln!(out, "plot {}", plots.join(", \\\n     ")).unwrap();
    writeln!(out, "pause mouse close").unwrap();
    out
}
