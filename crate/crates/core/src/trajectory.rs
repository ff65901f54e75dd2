//! Time-stamped trajectories with timestamps normalized to `[0, 1]`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Point, PolyCurve};

/// How an entity is assumed to move between consecutive samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpeedModel {
    /// Affine motion in time along each segment.
    ConstantSpeed,
    /// Arbitrary non-negative speed along each segment.
    VaryingSpeed,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub t: f64,
    pub p: Point,
}

/// A trajectory sampled at strictly increasing times, first at 0 and last at 1.
#[derive(Debug, Clone, PartialEq)]
pub struct TimedTrajectory {
    samples: Vec<Sample>,
}

impl TimedTrajectory {
    /// Sorts by time and maps the time range affinely onto `[0, 1]`.
    pub fn from_raw(mut samples: Vec<Sample>) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::Validation(format!(
                "a trajectory needs at least 2 samples, got {}",
                samples.len()
            )));
        }
        for (i, s) in samples.iter().enumerate() {
            if !s.t.is_finite() || !s.p.is_finite() {
                return Err(Error::Validation(format!("sample {i} is not finite")));
            }
        }
        samples.sort_by(|a, b| a.t.total_cmp(&b.t));
        if let Some(w) = samples.windows(2).find(|w| w[0].t == w[1].t) {
            return Err(Error::Validation(format!("duplicate timestamp {}", w[0].t)));
        }
        let t0 = samples[0].t;
        let span = samples[samples.len() - 1].t - t0;
        for s in &mut samples {
            s.t = (s.t - t0) / span;
        }
        let last = samples.len() - 1;
        samples[0].t = 0.0;
        samples[last].t = 1.0;
        if samples.windows(2).any(|w| w[0].t >= w[1].t) {
            return Err(Error::Validation(
                "timestamps collapse after normalization".into(),
            ));
        }
        Ok(Self { samples })
    }

    pub fn from_txy(rows: &[(f64, f64, f64)]) -> Result<Self> {
        Self::from_raw(
            rows.iter()
                .map(|&(t, x, y)| Sample { t, p: Point::new(x, y) })
                .collect(),
        )
    }

    /// Samples `points` at uniform times `i / (len - 1)`.
    pub fn uniform(points: &[Point]) -> Result<Self> {
        let n = points.len().saturating_sub(1).max(1) as f64;
        Self::from_raw(
            points
                .iter()
                .enumerate()
                .map(|(i, &p)| Sample { t: i as f64 / n, p })
                .collect(),
        )
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn times(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.t).collect()
    }

    pub fn points(&self) -> Vec<Point> {
        self.samples.iter().map(|s| s.p).collect()
    }

    /// The polygonal curve through the sample locations.
    pub fn curve(&self) -> PolyCurve {
        PolyCurve::new(self.points()).expect("validated samples form a curve")
    }
}
