//! File formats: `t,x,y` CSV trajectories, JSON datasets and metric files.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufReader, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::metric::LocationMetric;
use crate::symbols::SymbolTrajectory;
use crate::trajectory::{Sample, TimedTrajectory};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrajectoryFormat {
    Csv,
    Json,
}

impl TrajectoryFormat {
    pub fn from_path(path: &Path) -> Option<Self> {
        match path.extension()?.to_str()?.to_ascii_lowercase().as_str() {
            "csv" => Some(Self::Csv),
            "json" => Some(Self::Json),
            _ => None,
        }
    }
}

/// Parses `t,x,y` rows with an optional header line.
pub fn parse_csv<R: Read>(reader: R) -> Result<TimedTrajectory> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(reader);
    let mut samples = Vec::new();
    for (row, record) in rdr.records().enumerate() {
        let record = record.map_err(|e| Error::Parse {
            line: e.position().map_or(0, |p| p.line()),
            msg: e.to_string(),
        })?;
        let line = record.position().map_or(row as u64 + 1, |p| p.line());
        if record.len() != 3 {
            return Err(Error::Parse {
                line,
                msg: format!("expected 3 fields t,x,y, found {}", record.len()),
            });
        }
        let parsed: Vec<Option<f64>> = record.iter().map(|f| f.parse().ok()).collect();
        match parsed[..] {
            [Some(t), Some(x), Some(y)] => samples.push(Sample { t, p: Point::new(x, y) }),
            _ if row == 0 && parsed.iter().all(Option::is_none) => continue,
            _ => {
                return Err(Error::Parse {
                    line,
                    msg: format!("non-numeric field in {:?}", record.iter().collect::<Vec<_>>()),
                })
            }
        }
    }
    TimedTrajectory::from_raw(samples)
}

pub fn write_csv<W: Write>(traj: &TimedTrajectory, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["t", "x", "y"]).map_err(csv_io)?;
    for s in traj.samples() {
        w.write_record([s.t.to_string(), s.p.x.to_string(), s.p.y.to_string()])
            .map_err(csv_io)?;
    }
    w.flush()?;
    Ok(())
}

fn csv_io(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

/// Loads a single timed trajectory. A JSON file must hold exactly one
/// timed trajectory in dataset form.
pub fn load_timed_trajectory(path: &Path, format: TrajectoryFormat) -> Result<TimedTrajectory> {
    let file = File::open(path)?;
    match format {
        TrajectoryFormat::Csv => parse_csv(BufReader::new(file)),
        TrajectoryFormat::Json => match Dataset::from_reader(BufReader::new(file))? {
            Dataset::Timed(mut items) if items.len() == 1 => Ok(items.remove(0).1),
            Dataset::Timed(items) => Err(Error::Validation(format!(
                "expected one trajectory in {}, found {}",
                path.display(),
                items.len()
            ))),
            Dataset::Symbolic(_) => Err(Error::Config(format!(
                "{} holds symbol trajectories, not timed samples",
                path.display()
            ))),
        },
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct DatasetFile {
    trajectories: Vec<RecordFile>,
}

#[derive(Debug, Serialize, Deserialize)]
struct RecordFile {
    id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    samples: Option<Vec<[f64; 3]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    symbols: Option<Vec<String>>,
}

/// A named collection of trajectories of a single kind.
#[derive(Debug, Clone, PartialEq)]
pub enum Dataset {
    Timed(Vec<(String, TimedTrajectory)>),
    Symbolic(Vec<(String, SymbolTrajectory)>),
}

impl Dataset {
    pub fn len(&self) -> usize {
        match self {
            Dataset::Timed(v) => v.len(),
            Dataset::Symbolic(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn ids(&self) -> Vec<String> {
        match self {
            Dataset::Timed(v) => v.iter().map(|(id, _)| id.clone()).collect(),
            Dataset::Symbolic(v) => v.iter().map(|(id, _)| id.clone()).collect(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Dataset::Timed(_) => "timed",
            Dataset::Symbolic(_) => "symbolic",
        }
    }

    /// Concatenates two datasets of the same kind.
    pub fn extend(&mut self, other: Dataset) -> Result<()> {
        match (self, other) {
            (Dataset::Timed(a), Dataset::Timed(b)) => a.extend(b),
            (Dataset::Symbolic(a), Dataset::Symbolic(b)) => a.extend(b),
            (a, b) => {
                return Err(Error::Config(format!(
                    "cannot mix {} and {} trajectories",
                    a.kind(),
                    b.kind()
                )))
            }
        }
        Ok(())
    }

    pub fn from_reader<R: Read>(reader: R) -> Result<Self> {
        let file: DatasetFile = serde_json::from_reader(reader)?;
        let mut timed = Vec::new();
        let mut symbolic = Vec::new();
        for rec in file.trajectories {
            match (rec.samples, rec.symbols) {
                (Some(samples), None) => {
                    let traj = TimedTrajectory::from_raw(
                        samples
                            .into_iter()
                            .map(|[t, x, y]| Sample { t, p: Point::new(x, y) })
                            .collect(),
                    )
                    .map_err(|e| Error::Validation(format!("trajectory {:?}: {e}", rec.id)))?;
                    timed.push((rec.id, traj));
                }
                (None, Some(symbols)) => {
                    let traj = SymbolTrajectory::new(symbols)
                        .map_err(|e| Error::Validation(format!("trajectory {:?}: {e}", rec.id)))?;
                    symbolic.push((rec.id, traj));
                }
                _ => {
                    return Err(Error::Validation(format!(
                        "trajectory {:?} must have exactly one of `samples` or `symbols`",
                        rec.id
                    )))
                }
            }
        }
        match (timed.is_empty(), symbolic.is_empty()) {
            (_, true) => Ok(Dataset::Timed(timed)),
            (true, false) => Ok(Dataset::Symbolic(symbolic)),
            (false, false) => Err(Error::Validation(
                "dataset mixes timed and symbolic trajectories".into(),
            )),
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        match TrajectoryFormat::from_path(path) {
            Some(TrajectoryFormat::Csv) => {
                let id = path
                    .file_stem()
                    .map_or_else(|| "0".into(), |s| s.to_string_lossy().into_owned());
                Ok(Dataset::Timed(vec![(id, load_timed_trajectory(path, TrajectoryFormat::Csv)?)]))
            }
            _ => Self::from_reader(BufReader::new(File::open(path)?)),
        }
    }

    pub fn to_writer<W: Write>(&self, writer: W) -> Result<()> {
        let trajectories = match self {
            Dataset::Timed(v) => v
                .iter()
                .map(|(id, t)| RecordFile {
                    id: id.clone(),
                    samples: Some(t.samples().iter().map(|s| [s.t, s.p.x, s.p.y]).collect()),
                    symbols: None,
                })
                .collect(),
            Dataset::Symbolic(v) => v
                .iter()
                .map(|(id, s)| RecordFile {
                    id: id.clone(),
                    samples: None,
                    symbols: Some(s.symbols().to_vec()),
                })
                .collect(),
        };
        serde_json::to_writer_pretty(writer, &DatasetFile { trajectories })?;
        Ok(())
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum MetricFile {
    Locations { locations: BTreeMap<String, [f64; 2]> },
    Matrix { matrix: MatrixFile },
}

#[derive(Debug, Serialize, Deserialize)]
struct MatrixFile {
    symbols: Vec<String>,
    d: Vec<Vec<f64>>,
}

/// Reads a metric file; matrix mode is rejected unless it is a metric.
pub fn read_metric<R: Read>(reader: R) -> Result<LocationMetric> {
    match serde_json::from_reader(reader)? {
        MetricFile::Locations { locations } => LocationMetric::from_coordinates(
            locations.into_iter().map(|(s, [x, y])| (s, Point::new(x, y))),
        ),
        MetricFile::Matrix { matrix } => LocationMetric::from_matrix(matrix.symbols, matrix.d),
    }
}

pub fn load_metric(path: &Path) -> Result<LocationMetric> {
    read_metric(BufReader::new(File::open(path)?))
}

pub fn write_metric<W: Write>(metric: &LocationMetric, writer: W) -> Result<()> {
    let file = match metric.coordinates() {
        Some(points) => MetricFile::Locations {
            locations: metric
                .symbols()
                .iter()
                .zip(points)
                .map(|(s, p)| (s.clone(), [p.x, p.y]))
                .collect(),
        },
        None => {
            let n = metric.len();
            MetricFile::Matrix {
                matrix: MatrixFile {
                    symbols: metric.symbols().to_vec(),
                    d: (0..n).map(|a| (0..n).map(|b| metric.d(a, b)).collect()).collect(),
                },
            }
        }
    };
    serde_json::to_writer_pretty(writer, &file)?;
    Ok(())
}
