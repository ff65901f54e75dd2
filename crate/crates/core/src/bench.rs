//! Timing sweeps and the small statistics used to read them.

use std::time::{Duration, Instant};

use rand::Rng;
use rand::SeedableRng;
use rand::rngs::StdRng;
use serde::Serialize;

use crate::editdist::metric_edit_distance_capped;
use crate::frechet::discrete_frechet;
use crate::geometry::{Point, PolyCurve};
use crate::metric::LocationMetric;
use crate::symbols::SymbolTrajectory;
use crate::timewindow::tw_discrete_frechet;
use crate::trajectory::TimedTrajectory;

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let (mx, my) = (mean(&lx), mean(&ly));
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

pub fn pearson(xs: &[f64], ys: &[f64]) -> f64 {
    let (mx, my) = (mean(xs), mean(ys));
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    sxy / (sxx * syy).sqrt()
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Fastest of `repeats` runs of `f`.
pub fn time_min<T>(repeats: usize, mut f: impl FnMut() -> T) -> Duration {
    (0..repeats.max(1))
        .map(|_| {
            let start = Instant::now();
            std::hint::black_box(f());
            start.elapsed()
        })
        .min()
        .unwrap_or_default()
}

/// Planar random walk with unit-variance steps.
pub fn random_walk<R: Rng>(n: usize, rng: &mut R) -> Vec<Point> {
    let mut p = Point::new(0.0, 0.0);
    (0..n)
        .map(|_| {
            p = Point::new(p.x + rng.gen_range(-1.0..1.0), p.y + rng.gen_range(-1.0..1.0));
            p
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingReport {
    pub measure: &'static str,
    pub sizes: Vec<usize>,
    pub seconds: Vec<f64>,
    pub slope: f64,
}

pub fn discrete_frechet_scaling(sizes: &[usize], repeats: usize, seed: u64) -> ScalingReport {
    let mut rng = StdRng::seed_from_u64(seed);
    let seconds: Vec<f64> = sizes
        .iter()
        .map(|&n| {
            let a = PolyCurve::new(random_walk(n, &mut rng)).expect("finite walk");
            let b = PolyCurve::new(random_walk(n, &mut rng)).expect("finite walk");
            time_min(repeats, || discrete_frechet(&a, &b)).as_secs_f64()
        })
        .collect();
    let xs: Vec<f64> = sizes.iter().map(|&n| n as f64).collect();
    ScalingReport {
        measure: "discrete-frechet",
        slope: loglog_slope(&xs, &seconds),
        sizes: sizes.to_vec(),
        seconds,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellCorrelationReport {
    pub measure: &'static str,
    pub n: usize,
    pub sigmas: Vec<f64>,
    pub cells: Vec<usize>,
    pub seconds: Vec<f64>,
    pub pearson: f64,
}

/// Times the windowed discrete Fréchet DP across `sigmas` on one pair of
/// length-`n` trajectories sampled at jittered times in `[0, 1]`.
pub fn tw_cell_correlation(n: usize, sigmas: &[f64], repeats: usize, seed: u64) -> CellCorrelationReport {
    let mut rng = StdRng::seed_from_u64(seed);
    let timed = |rng: &mut StdRng| {
        let mut ts: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..1.0)).collect();
        ts.sort_by(f64::total_cmp);
        let pts = random_walk(n, rng);
        let rows: Vec<(f64, f64, f64)> = ts.iter().zip(&pts).map(|(&t, p)| (t, p.x, p.y)).collect();
        TimedTrajectory::from_txy(&rows).expect("distinct sorted times")
    };
    let (a, b) = (timed(&mut rng), timed(&mut rng));
    let mut cells = Vec::new();
    let mut seconds = Vec::new();
    for &s in sigmas {
        cells.push(tw_discrete_frechet(&a, &b, s).cells);
        seconds.push(time_min(repeats, || tw_discrete_frechet(&a, &b, s)).as_secs_f64());
    }
    let cx: Vec<f64> = cells.iter().map(|&c| c as f64).collect();
    CellCorrelationReport {
        measure: "tw-discrete-frechet",
        n,
        sigmas: sigmas.to_vec(),
        pearson: pearson(&cx, &seconds),
        cells,
        seconds,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EditGrowthReport {
    pub sizes: Vec<usize>,
    pub seconds: Vec<f64>,
    /// Observed time ratio between consecutive sizes.
    pub observed_ratio: Vec<f64>,
    /// Ratio predicted by `n^6 * 2n` growth.
    pub model_ratio: Vec<f64>,
}

/// Times the full metric edit DP on random strings over a 6-location planar alphabet.
pub fn metric_edit_growth(sizes: &[usize], repeats: usize, seed: u64) -> EditGrowthReport {
    let mut rng = StdRng::seed_from_u64(seed);
    let names: Vec<String> = (0..6).map(|i| format!("p{i}")).collect();
    let metric = LocationMetric::from_coordinates(
        names.iter().map(|s| (s.clone(), Point::new(rng.gen_range(0.0..5.0), rng.gen_range(0.0..5.0)))),
    )
    .expect("finite coordinates");
    let seconds: Vec<f64> = sizes
        .iter()
        .map(|&n| {
            let mut word = || {
                SymbolTrajectory::new((0..n).map(|_| names[rng.gen_range(0..names.len())].clone())).expect("nonempty")
            };
            let (a, b) = (word(), word());
            time_min(repeats, || metric_edit_distance_capped(&a, &b, &metric, n)).as_secs_f64()
        })
        .collect();
    let model = |n: usize| (n as f64).powi(6) * 2.0 * n as f64;
    EditGrowthReport {
        observed_ratio: seconds.windows(2).map(|w| w[1] / w[0]).collect(),
        model_ratio: sizes.windows(2).map(|w| model(w[1]) / model(w[0])).collect(),
        sizes: sizes.to_vec(),
        seconds,
    }
}
