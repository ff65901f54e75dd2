//! A single entry point over every distance the toolkit offers.

use serde::{Deserialize, Serialize};

use crate::editdist::{insertion_first_edit_distance, metric_edit_distance_capped, plain_edit_distance};
use crate::error::{Error, Result};
use crate::frechet::{discrete_frechet, frechet_distance, SearchMode};
use crate::metric::LocationMetric;
use crate::shingles::jaccard_distance;
use crate::symbols::SymbolTrajectory;
use crate::timewindow::{dtw, tw_discrete_frechet, tw_dtw, tw_frechet_distance};
use crate::trajectory::{SpeedModel, TimedTrajectory};

/// A distance together with its parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "measure", rename_all = "kebab-case")]
pub enum Measure {
    DiscreteFrechet,
    Frechet { mode: SearchMode },
    TwFrechet { sigma: f64, speed: SpeedModel, mode: SearchMode },
    Dtw,
    TwDiscreteFrechet { sigma: f64 },
    TwDtw { sigma: f64 },
    Edit,
    MetricEdit {
        #[serde(skip)]
        metric: Option<LocationMetric>,
        cap: usize,
    },
    MetricEditInsertfirst {
        #[serde(skip)]
        metric: Option<LocationMetric>,
    },
    Jaccard { w: usize },
}

impl Measure {
    pub fn name(&self) -> &'static str {
        match self {
            Measure::DiscreteFrechet => "discrete-frechet",
            Measure::Frechet { .. } => "frechet",
            Measure::TwFrechet { .. } => "tw-frechet",
            Measure::Dtw => "dtw",
            Measure::TwDiscreteFrechet { .. } => "tw-discrete-frechet",
            Measure::TwDtw { .. } => "tw-dtw",
            Measure::Edit => "edit",
            Measure::MetricEdit { .. } => "metric-edit",
            Measure::MetricEditInsertfirst { .. } => "metric-edit-insertfirst",
            Measure::Jaccard { .. } => "jaccard",
        }
    }

    /// Whether the measure compares timed trajectories (as opposed to symbol strings).
    pub fn is_timed(&self) -> bool {
        matches!(
            self,
            Measure::DiscreteFrechet
                | Measure::Frechet { .. }
                | Measure::TwFrechet { .. }
                | Measure::Dtw
                | Measure::TwDiscreteFrechet { .. }
                | Measure::TwDtw { .. }
        )
    }

    pub fn timed(&self, a: &TimedTrajectory, b: &TimedTrajectory) -> Result<f64> {
        match self {
            Measure::DiscreteFrechet => Ok(discrete_frechet(&a.curve(), &b.curve())),
            Measure::Frechet { mode } => frechet_distance(&a.curve(), &b.curve(), *mode),
            Measure::TwFrechet { sigma, speed, mode } => tw_frechet_distance(a, b, *sigma, *speed, *mode),
            Measure::Dtw => Ok(dtw(&a.curve(), &b.curve())),
            Measure::TwDiscreteFrechet { sigma } => Ok(tw_discrete_frechet(a, b, *sigma).value),
            Measure::TwDtw { sigma } => Ok(tw_dtw(a, b, *sigma).value),
            _ => Err(Error::Config(format!(
                "measure {} needs symbol trajectories, got timed samples",
                self.name()
            ))),
        }
    }

    pub fn symbolic(&self, a: &SymbolTrajectory, b: &SymbolTrajectory) -> Result<f64> {
        let need_metric = || Error::Config(format!("measure {} needs a metric file", self.name()));
        match self {
            Measure::Edit => Ok(plain_edit_distance(a, b) as f64),
            Measure::MetricEdit { metric, cap } => {
                metric_edit_distance_capped(a, b, metric.as_ref().ok_or_else(need_metric)?, *cap)
            }
            Measure::MetricEditInsertfirst { metric } => {
                insertion_first_edit_distance(a, b, metric.as_ref().ok_or_else(need_metric)?)
            }
            Measure::Jaccard { w } => jaccard_distance(a, b, *w),
            _ => Err(Error::Config(format!(
                "measure {} needs timed trajectories, got symbol strings",
                self.name()
            ))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kind_mismatch_is_config_error() {
        let s = SymbolTrajectory::from_chars("ab").unwrap();
        assert!(matches!(Measure::Dtw.symbolic(&s, &s), Err(Error::Config(_))));
        let t = TimedTrajectory::from_txy(&[(0.0, 0.0, 0.0), (1.0, 1.0, 1.0)]).unwrap();
        assert!(matches!(Measure::Edit.timed(&t, &t), Err(Error::Config(_))));
        let m = Measure::MetricEdit { metric: None, cap: 12 };
        assert!(matches!(m.symbolic(&s, &s), Err(Error::Config(_))));
    }
}
