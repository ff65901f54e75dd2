//! Distances between labeled locations.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::geometry::Point;

#[derive(Debug, Clone, PartialEq)]
enum Mode {
    Coordinates(Vec<Point>),
    Matrix(Vec<Vec<f64>>),
}

/// A metric over a finite alphabet of location symbols, given either by
/// planar coordinates (Euclidean distance) or by an explicit matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct LocationMetric {
    symbols: Vec<String>,
    index: HashMap<String, usize>,
    mode: Mode,
}

/// One violated metric axiom, named by the symbols that witness it.
#[derive(Debug, Clone, PartialEq)]
pub enum MetricViolation {
    NonFinite { a: String, b: String },
    NonZeroSelf { a: String, value: f64 },
    Negative { a: String, b: String, value: f64 },
    Asymmetric { a: String, b: String },
    /// `d(a, c) > d(a, b) + d(b, c)`.
    Triangle { a: String, b: String, c: String },
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct MetricReport {
    pub violations: Vec<MetricViolation>,
}

impl MetricReport {
    pub fn is_metric(&self) -> bool {
        self.violations.is_empty()
    }
}

fn build_index(symbols: &[String]) -> Result<HashMap<String, usize>> {
    let mut index = HashMap::with_capacity(symbols.len());
    for (i, s) in symbols.iter().enumerate() {
        if index.insert(s.clone(), i).is_some() {
            return Err(Error::Validation(format!("duplicate symbol {s:?}")));
        }
    }
    Ok(index)
}

impl LocationMetric {
    pub fn from_coordinates<S: Into<String>>(
        locations: impl IntoIterator<Item = (S, Point)>,
    ) -> Result<Self> {
        let (symbols, points): (Vec<String>, Vec<Point>) =
            locations.into_iter().map(|(s, p)| (s.into(), p)).unzip();
        if let Some(i) = points.iter().position(|p| !p.is_finite()) {
            return Err(Error::Validation(format!(
                "location {:?} has non-finite coordinates",
                symbols[i]
            )));
        }
        let index = build_index(&symbols)?;
        Ok(Self {
            symbols,
            index,
            mode: Mode::Coordinates(points),
        })
    }

    /// Builds a matrix-mode metric without checking the axioms.
    pub fn from_matrix_unchecked(symbols: Vec<String>, d: Vec<Vec<f64>>) -> Result<Self> {
        if d.len() != symbols.len() || d.iter().any(|row| row.len() != symbols.len()) {
            return Err(Error::Validation(format!(
                "distance matrix must be {0}x{0}",
                symbols.len()
            )));
        }
        let index = build_index(&symbols)?;
        Ok(Self {
            symbols,
            index,
            mode: Mode::Matrix(d),
        })
    }

    /// Builds a matrix-mode metric and rejects it unless every axiom holds.
    pub fn from_matrix(symbols: Vec<String>, d: Vec<Vec<f64>>) -> Result<Self> {
        let m = Self::from_matrix_unchecked(symbols, d)?;
        let report = m.validate();
        if let Some(v) = report.violations.first() {
            return Err(Error::Validation(format!(
                "not a metric ({} violations, first: {v:?})",
                report.violations.len()
            )));
        }
        Ok(m)
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn index_of(&self, symbol: &str) -> Option<usize> {
        self.index.get(symbol).copied()
    }

    pub fn coordinates(&self) -> Option<&[Point]> {
        match &self.mode {
            Mode::Coordinates(p) => Some(p),
            Mode::Matrix(_) => None,
        }
    }

    /// Distance between symbols by index.
    #[inline]
    pub fn d(&self, a: usize, b: usize) -> f64 {
        match &self.mode {
            Mode::Coordinates(p) => p[a].dist(&p[b]),
            Mode::Matrix(m) => m[a][b],
        }
    }

    /// Distance between symbols by name.
    pub fn dist(&self, a: &str, b: &str) -> Result<f64> {
        let lookup = |s: &str| {
            self.index_of(s)
                .ok_or_else(|| Error::Validation(format!("unknown symbol {s:?}")))
        };
        Ok(self.d(lookup(a)?, lookup(b)?))
    }

    /// Checks every metric axiom. Coordinate mode always passes.
    pub fn validate(&self) -> MetricReport {
        let mut report = MetricReport::default();
        let Mode::Matrix(m) = &self.mode else {
            return report;
        };
        let n = self.symbols.len();
        let name = |i: usize| self.symbols[i].clone();
        let scale = m
            .iter()
            .flatten()
            .filter(|v| v.is_finite())
            .fold(0.0f64, |a, &v| a.max(v.abs()));
        let tol = 1e-12 * scale.max(1.0);
        for a in 0..n {
            for b in 0..n {
                let v = m[a][b];
                if !v.is_finite() {
                    report.violations.push(MetricViolation::NonFinite { a: name(a), b: name(b) });
                    continue;
                }
                if a == b && v != 0.0 {
                    report.violations.push(MetricViolation::NonZeroSelf { a: name(a), value: v });
                }
                if v < 0.0 {
                    report.violations.push(MetricViolation::Negative { a: name(a), b: name(b), value: v });
                }
                if a < b && v != m[b][a] {
                    report.violations.push(MetricViolation::Asymmetric { a: name(a), b: name(b) });
                }
            }
        }
        for a in 0..n {
            for c in 0..n {
                for b in 0..n {
                    if m[a][c] > m[a][b] + m[b][c] + tol {
                        report.violations.push(MetricViolation::Triangle {
                            a: name(a),
                            b: name(b),
                            c: name(c),
                        });
                    }
                }
            }
        }
        report
    }
}
