//! Time-window Fréchet distance under the constant- and varying-speed
//! models, and time-windowed discrete Fréchet and DTW.
//!
//! Constant speed: positions are affine in time on each segment, so the
//! band `|t - t'| <= sigma` is a convex strip in every cell. A cell's free
//! region is convex, hence so is its intersection with the strip, and the
//! usual edge-interval propagation stays exact once every edge interval is
//! clipped to the strip.

use crate::error::{Error, Result};
use crate::frechet::{
    bisect, critical_values, endpoint_floor, intersect, resolve_tol, search_candidates,
    FreeSpaceDiagram, SearchMode,
};
use crate::geometry::{Point, PolyCurve};
use crate::trajectory::{SpeedModel, TimedTrajectory};

/// Closed time window in normalized units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeWindow {
    sigma: f64,
}

impl TimeWindow {
    pub fn new(sigma: f64) -> Result<Self> {
        if !(sigma >= 0.0) || sigma.is_infinite() {
            return Err(Error::Argument(format!("sigma must be finite and >= 0, got {sigma}")));
        }
        Ok(Self { sigma })
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }
}

/// Vertex pairs allowed under the varying-speed model. For each vertex `i`
/// of the first trajectory the partners form a contiguous index range.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidPairs {
    ranges: Vec<(usize, usize)>,
    m: usize,
}

impl ValidPairs {
    /// Inclusive partner range of vertex `i`.
    pub fn range(&self, i: usize) -> (usize, usize) {
        self.ranges[i]
    }

    pub fn ranges(&self) -> &[(usize, usize)] {
        &self.ranges
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        let (lo, hi) = self.ranges[i];
        lo <= j && j <= hi
    }

    /// Number of valid vertex pairs, reported as `C(n, m, sigma)`.
    pub fn pair_count(&self) -> usize {
        self.ranges.iter().map(|(lo, hi)| hi - lo + 1).sum()
    }

    /// A cell is valid when all four of its corner pairs are.
    pub fn cell_valid(&self, i: usize, j: usize) -> bool {
        let (a, b) = (self.ranges[i], self.ranges[i + 1]);
        a.0.max(b.0) <= j && j < a.1.min(b.1)
    }

    pub fn valid_cell_count(&self) -> usize {
        self.ranges
            .windows(2)
            .map(|w| w[0].1.min(w[1].1).saturating_sub(w[0].0.max(w[1].0)))
            .sum()
    }

    pub fn pairs(&self) -> Vec<(usize, usize)> {
        self.ranges
            .iter()
            .enumerate()
            .flat_map(|(i, &(lo, hi))| (lo..=hi).map(move |j| (i, j)))
            .collect()
    }

    pub fn max_j(&self) -> usize {
        self.m
    }
}

/// Pairs `(i, j)` with `|t_i - t'_j| <= sigma`, extended on each side by the
/// first partner outside the window.
pub fn valid_pairs_varying_speed(a: &TimedTrajectory, b: &TimedTrajectory, sigma: f64) -> ValidPairs {
    let tb = b.times();
    let m = tb.len() - 1;
    let ranges: Vec<(usize, usize)> = a
        .times()
        .iter()
        .map(|&t| {
            let p = tb.partition_point(|&x| x < t - sigma);
            let q = tb.partition_point(|&x| x <= t + sigma);
            (p.saturating_sub(1), q.min(m))
        })
        .collect();
    debug_assert!(ranges.windows(2).all(|w| w[0].0 <= w[1].0 && w[0].1 <= w[1].1));
    ValidPairs { ranges, m }
}

/// Where the time-window constraint cuts the free-space diagram.
#[derive(Debug, Clone)]
pub enum ValidityMask {
    /// Edge intervals are clipped to the band `|t - t'| <= sigma`.
    ConstantSpeed { sigma: f64, ta: Vec<f64>, tb: Vec<f64> },
    /// Whole cells are admitted or rejected.
    VaryingSpeed(ValidPairs),
}

impl ValidityMask {
    pub fn new(a: &TimedTrajectory, b: &TimedTrajectory, sigma: f64, model: SpeedModel) -> Self {
        match model {
            SpeedModel::ConstantSpeed => ValidityMask::ConstantSpeed {
                sigma,
                ta: a.times(),
                tb: b.times(),
            },
            SpeedModel::VaryingSpeed => ValidityMask::VaryingSpeed(valid_pairs_varying_speed(a, b, sigma)),
        }
    }

    /// Band clip, in segment parameters, of the edge at vertex time `t` over
    /// the segment spanning `[s0, s1]`.
    fn clip(sigma: f64, t: f64, s0: f64, s1: f64) -> (f64, f64) {
        let span = s1 - s0;
        let lo = if (t - s0).abs() <= sigma {
            f64::NEG_INFINITY
        } else {
            (t - sigma - s0) / span
        };
        let hi = if (t - s1).abs() <= sigma {
            f64::INFINITY
        } else {
            (t + sigma - s0) / span
        };
        (lo, hi)
    }

    fn apply(&self, fsd: &mut FreeSpaceDiagram) {
        if let ValidityMask::ConstantSpeed { sigma, ta, tb } = self {
            let (n, m) = fsd.dims();
            for i in 0..=n {
                for j in 0..m {
                    let (lo, hi) = Self::clip(*sigma, ta[i], tb[j], tb[j + 1]);
                    let e = fsd.vertical_mut(i, j);
                    *e = intersect(*e, lo, hi);
                }
            }
            for j in 0..=m {
                for i in 0..n {
                    let (lo, hi) = Self::clip(*sigma, tb[j], ta[i], ta[i + 1]);
                    let e = fsd.horizontal_mut(i, j);
                    *e = intersect(*e, lo, hi);
                }
            }
        }
    }

    fn decide(&self, a: &PolyCurve, b: &PolyCurve, eps: f64) -> bool {
        if eps < 0.0 {
            return false;
        }
        let mut fsd = FreeSpaceDiagram::new(a, b, eps);
        self.apply(&mut fsd);
        match self {
            ValidityMask::ConstantSpeed { .. } => fsd.is_reachable(),
            ValidityMask::VaryingSpeed(vp) => fsd.reachable_with(|i, j| vp.cell_valid(i, j)),
        }
    }

    /// Points on each segment where the band boundary crosses it.
    fn band_points(sigma: f64, own: &[f64], other_t: &[f64], other: &[Point]) -> Vec<Point> {
        let mut out = Vec::new();
        for &t in own {
            for s in [t - sigma, t + sigma] {
                let j = other_t.partition_point(|&x| x <= s);
                if j == 0 || j >= other_t.len() {
                    continue;
                }
                let (s0, s1) = (other_t[j - 1], other_t[j]);
                out.push(other[j - 1].lerp(&other[j], (s - s0) / (s1 - s0)));
            }
        }
        out
    }

    fn extra_candidates(&self, a: &[Point], b: &[Point]) -> Vec<f64> {
        let ValidityMask::ConstantSpeed { sigma, ta, tb } = self else {
            return Vec::new();
        };
        let mut out = Vec::new();
        for (pts, own, other_t, other) in [(a, ta, tb, b), (b, tb, ta, a)] {
            for q in Self::band_points(*sigma, own, other_t, other) {
                out.extend(pts.iter().map(|p| p.dist(&q)));
            }
        }
        out
    }
}

pub fn tw_frechet_decision(
    a: &TimedTrajectory,
    b: &TimedTrajectory,
    sigma: f64,
    eps: f64,
    model: SpeedModel,
) -> bool {
    ValidityMask::new(a, b, sigma, model).decide(&a.curve(), &b.curve(), eps)
}

/// Smallest `eps` accepted by the windowed decision, or `+inf` if none is.
pub fn tw_frechet_distance(
    a: &TimedTrajectory,
    b: &TimedTrajectory,
    sigma: f64,
    model: SpeedModel,
    mode: SearchMode,
) -> Result<f64> {
    TimeWindow::new(sigma)?;
    let (ca, cb) = (a.curve(), b.curve());
    let mask = ValidityMask::new(a, b, sigma, model);
    let decide = |eps: f64| mask.decide(&ca, &cb, eps);
    Ok(match mode {
        SearchMode::ExactCritical => {
            let mut cands = critical_values(&ca, &cb);
            cands.extend(mask.extra_candidates(ca.vertices(), cb.vertices()));
            search_candidates(cands, decide)
        }
        SearchMode::Bisect { tol } => {
            let tol = resolve_tol(tol, &ca, &cb)?;
            let hi = ca
                .vertices()
                .iter()
                .flat_map(|p| cb.vertices().iter().map(move |q| p.dist(q)))
                .fold(0.0, f64::max);
            if !decide(hi) {
                return Ok(f64::INFINITY);
            }
            bisect(endpoint_floor(&ca, &cb), hi, tol, decide)
        }
    })
}

pub fn dtw(a: &PolyCurve, b: &PolyCurve) -> f64 {
    dtw_with(a.vertices(), b.vertices(), |p, q| p.dist(q))
}

/// Dynamic time warping under an arbitrary element distance.
pub fn dtw_with<T>(a: &[T], b: &[T], dist: impl Fn(&T, &T) -> f64) -> f64 {
    let m = b.len();
    let mut prev = vec![f64::INFINITY; m];
    let mut cur = vec![0.0; m];
    for (i, x) in a.iter().enumerate() {
        for j in 0..m {
            let best = match (i, j) {
                (0, 0) => 0.0,
                (0, _) => cur[j - 1],
                (_, 0) => prev[0],
                _ => prev[j - 1].min(prev[j]).min(cur[j - 1]),
            };
            cur[j] = dist(x, &b[j]) + best;
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[m - 1]
}

/// DTW restricted to the Sakoe-Chiba band `|i - j| <= w`.
pub fn dtw_sakoe_chiba(a: &PolyCurve, b: &PolyCurve, w: usize) -> f64 {
    let (av, bv) = (a.vertices(), b.vertices());
    let (n, m) = (av.len(), bv.len());
    let mut d = vec![vec![f64::INFINITY; m + 1]; n + 1];
    d[0][0] = 0.0;
    for i in 1..=n {
        for j in i.saturating_sub(w).max(1)..=(i + w).min(m) {
            d[i][j] = av[i - 1].dist(&bv[j - 1]) + d[i - 1][j - 1].min(d[i - 1][j]).min(d[i][j - 1]);
        }
    }
    d[n][m]
}

/// Value of a windowed DP together with the number of cells it evaluated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowedDp {
    pub value: f64,
    pub cells: usize,
}

fn windowed_dp(
    a: &TimedTrajectory,
    b: &TimedTrajectory,
    sigma: f64,
    combine: impl Fn(f64, f64) -> f64,
) -> WindowedDp {
    let vp = valid_pairs_varying_speed(a, b, sigma);
    let (ap, bp) = (a.points(), b.points());
    let mut cells = 0;
    let mut prev: Vec<f64> = Vec::new();
    let mut prev_lo = 0;
    for (i, p) in ap.iter().enumerate() {
        let (lo, hi) = vp.range(i);
        let get = |row: &[f64], j: usize| {
            j.checked_sub(prev_lo)
                .and_then(|k| row.get(k).copied())
                .unwrap_or(f64::INFINITY)
        };
        let mut cur = Vec::with_capacity(hi - lo + 1);
        for j in lo..=hi {
            let d = p.dist(&bp[j]);
            let best = if i == 0 && j == 0 {
                None
            } else {
                let left = if j > lo { cur[j - 1 - lo] } else { f64::INFINITY };
                let diag = if j > 0 { get(&prev, j - 1) } else { f64::INFINITY };
                Some(get(&prev, j).min(diag).min(left))
            };
            cur.push(match best {
                None => d,
                Some(b) if b.is_finite() => combine(d, b),
                Some(_) => f64::INFINITY,
            });
        }
        cells += cur.len();
        prev = cur;
        prev_lo = lo;
    }
    let value = *prev.last().expect("last row covers the final vertex");
    WindowedDp { value, cells }
}

/// Discrete Fréchet over valid vertex pairs only; `+inf` if they do not connect.
pub fn tw_discrete_frechet(a: &TimedTrajectory, b: &TimedTrajectory, sigma: f64) -> WindowedDp {
    windowed_dp(a, b, sigma, f64::max)
}

/// DTW over valid vertex pairs only; `+inf` if they do not connect.
pub fn tw_dtw(a: &TimedTrajectory, b: &TimedTrajectory, sigma: f64) -> WindowedDp {
    windowed_dp(a, b, sigma, |d, best| d + best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frechet::{discrete_frechet, frechet_decision, frechet_distance};
    use proptest::prelude::*;

    fn uniform(xy: &[(f64, f64)]) -> TimedTrajectory {
        let pts: Vec<Point> = xy.iter().copied().map(Point::from).collect();
        TimedTrajectory::uniform(&pts).unwrap()
    }

    fn arb_timed(max: usize) -> impl Strategy<Value = TimedTrajectory> {
        prop::collection::vec((0.0..1.0f64, -5.0..5.0f64, -5.0..5.0f64), 2..=max).prop_filter_map(
            "distinct times",
            |rows| TimedTrajectory::from_txy(&rows).ok(),
        )
    }

    /// Direct evaluation of the three pairing clauses.
    fn pair_ok(ta: &[f64], tb: &[f64], i: usize, j: usize, s: f64) -> bool {
        let t = ta[i];
        (t - tb[j]).abs() <= s
            || (tb[j] < t - s && j + 1 < tb.len() && tb[j + 1] >= t - s)
            || (tb[j] > t + s && j >= 1 && tb[j - 1] <= t + s)
    }

    #[test]
    fn sigma_zero_uniform_pairs_neighbors() {
        let a = uniform(&[(0.0, 0.0), (1.0, 0.0), (2.0, 0.0), (3.0, 0.0), (4.0, 0.0)]);
        let vp = valid_pairs_varying_speed(&a, &a, 0.0);
        for i in 0..5 {
            assert_eq!(vp.range(i), (i.saturating_sub(1), (i + 1).min(4)));
        }
        assert!(vp.pair_count() >= 4);
    }

    #[test]
    fn large_sigma_admits_everything() {
        let a = uniform(&[(0.0, 0.0), (1.0, 0.0), (2.0, 0.0)]);
        let b = uniform(&[(0.0, 0.0), (1.0, 1.0), (2.0, 0.0), (3.0, 1.0)]);
        let vp = valid_pairs_varying_speed(&a, &b, 1.0);
        assert_eq!(vp.pair_count(), 12);
        assert_eq!(vp.valid_cell_count(), 6);
    }

    #[test]
    fn identical_trajectories() {
        let a = uniform(&[(0.0, 0.0), (1.0, 2.0), (3.0, 1.0)]);
        for model in [SpeedModel::ConstantSpeed, SpeedModel::VaryingSpeed] {
            assert!(tw_frechet_decision(&a, &a, 0.05, 0.0, model));
            let d = tw_frechet_distance(&a, &a, 0.05, model, SearchMode::ExactCritical).unwrap();
            assert_eq!(d, 0.0);
        }
    }

    #[test]
    fn parallel_segments_with_full_window() {
        let a = uniform(&[(0.0, 0.0), (1.0, 0.0)]);
        let b = uniform(&[(0.0, 1.0), (1.0, 1.0)]);
        assert!(tw_frechet_decision(&a, &b, 1.0, 1.0, SpeedModel::ConstantSpeed));
        assert!(!tw_frechet_decision(&a, &b, 1.0, 0.999, SpeedModel::ConstantSpeed));
    }

    #[test]
    fn band_forces_time_alignment() {
        // Same path, but b lingers near the start: without a window the
        // distance is 0, with a tight window it is not.
        let a = TimedTrajectory::from_txy(&[(0.0, 0.0, 0.0), (1.0, 10.0, 0.0)]).unwrap();
        let b = TimedTrajectory::from_txy(&[(0.0, 0.0, 0.0), (0.8, 1.0, 0.0), (1.0, 10.0, 0.0)]).unwrap();
        let free = frechet_distance(&a.curve(), &b.curve(), SearchMode::ExactCritical).unwrap();
        let tight = tw_frechet_distance(&a, &b, 0.0, SpeedModel::ConstantSpeed, SearchMode::ExactCritical)
            .unwrap();
        assert_eq!(free, 0.0);
        assert!((tight - 7.0).abs() < 1e-9, "{tight}");
    }

    #[test]
    fn dtw_basics() {
        let a = PolyCurve::from_xy(&[(0.0, 0.0)]).unwrap();
        let b = PolyCurve::from_xy(&[(3.0, 4.0)]).unwrap();
        assert_eq!(dtw(&a, &b), 5.0);
        let c = PolyCurve::from_xy(&[(0.0, 0.0), (1.0, 1.0), (2.0, 0.0)]).unwrap();
        assert_eq!(dtw(&c, &c), 0.0);
    }

    #[test]
    fn disconnected_window_is_infinite() {
        let a = TimedTrajectory::from_txy(&[(0.0, 0.0, 0.0), (0.1, 1.0, 0.0), (0.2, 2.0, 0.0), (1.0, 3.0, 0.0)])
            .unwrap();
        let b = TimedTrajectory::from_txy(&[(0.0, 0.0, 0.0), (0.8, 1.0, 0.0), (0.9, 2.0, 0.0), (1.0, 3.0, 0.0)])
            .unwrap();
        let d = tw_frechet_distance(&a, &b, 0.0, SpeedModel::VaryingSpeed, SearchMode::default()).unwrap();
        assert!(d.is_infinite());
    }

    fn brute_dtw(a: &[Point], b: &[Point]) -> f64 {
        fn go(a: &[Point], b: &[Point], i: usize, j: usize) -> f64 {
            let d = a[i].dist(&b[j]);
            if i + 1 == a.len() && j + 1 == b.len() {
                return d;
            }
            let mut best = f64::INFINITY;
            if i + 1 < a.len() {
                best = best.min(go(a, b, i + 1, j));
            }
            if j + 1 < b.len() {
                best = best.min(go(a, b, i, j + 1));
            }
            if i + 1 < a.len() && j + 1 < b.len() {
                best = best.min(go(a, b, i + 1, j + 1));
            }
            d + best
        }
        go(a, b, 0, 0)
    }

    proptest! {
        #[test]
        fn pair_ranges_match_clauses(a in arb_timed(7), b in arb_timed(7), s in 0.0..0.6f64) {
            let vp = valid_pairs_varying_speed(&a, &b, s);
            let (ta, tb) = (a.times(), b.times());
            for i in 0..ta.len() {
                for j in 0..tb.len() {
                    prop_assert_eq!(vp.contains(i, j), pair_ok(&ta, &tb, i, j, s), "({}, {})", i, j);
                }
            }
            for w in vp.ranges().windows(2) {
                prop_assert!(w[0].0 <= w[1].0 && w[0].1 <= w[1].1);
            }
            prop_assert!(vp.pair_count() >= ta.len() - 1);
        }

        #[test]
        fn dtw_matches_enumeration(
            a in prop::collection::vec((-5.0..5.0f64, -5.0..5.0f64), 1..=6),
            b in prop::collection::vec((-5.0..5.0f64, -5.0..5.0f64), 1..=6),
        ) {
            let (a, b) = (PolyCurve::from_xy(&a).unwrap(), PolyCurve::from_xy(&b).unwrap());
            let got = dtw(&a, &b);
            let want = brute_dtw(a.vertices(), b.vertices());
            prop_assert!((got - want).abs() <= 1e-9 * want.max(1.0));
        }

        #[test]
        fn full_window_matches_unconstrained(a in arb_timed(5), b in arb_timed(5), e in 0.0..8.0f64) {
            let free = frechet_decision(&a.curve(), &b.curve(), e);
            for model in [SpeedModel::ConstantSpeed, SpeedModel::VaryingSpeed] {
                prop_assert_eq!(tw_frechet_decision(&a, &b, 1.0, e, model), free);
            }
            prop_assert_eq!(tw_discrete_frechet(&a, &b, 1.0).value, discrete_frechet(&a.curve(), &b.curve()));
            prop_assert_eq!(tw_dtw(&a, &b, 1.0).value, dtw(&a.curve(), &b.curve()));
        }

        #[test]
        fn windowed_values_shrink_with_sigma(a in arb_timed(6), b in arb_timed(6), s in 0.0..0.5f64, ds in 0.0..0.5f64) {
            let f = |x| tw_discrete_frechet(&a, &b, x).value;
            let g = |x| tw_dtw(&a, &b, x).value;
            prop_assert!(f(s) >= f(s + ds));
            prop_assert!(g(s) >= g(s + ds));
            prop_assert!(f(s) >= discrete_frechet(&a.curve(), &b.curve()));
            prop_assert!(g(s) >= dtw(&a.curve(), &b.curve()) - 1e-9);
            for model in [SpeedModel::ConstantSpeed, SpeedModel::VaryingSpeed] {
                let t = |x| tw_frechet_distance(&a, &b, x, model, SearchMode::ExactCritical).unwrap();
                prop_assert!(t(s) >= t(s + ds) * (1.0 - 1e-9));
            }
        }

        #[test]
        fn constant_speed_matches_time_sampling(a in arb_timed(4), b in arb_timed(4), s in 0.0..0.3f64) {
            let k = 120;
            let at = |t: &TimedTrajectory, x: f64| {
                let ts = t.times();
                let j = ts.partition_point(|&v| v <= x).clamp(1, ts.len() - 1);
                let ps = t.points();
                ps[j - 1].lerp(&ps[j], (x - ts[j - 1]) / (ts[j] - ts[j - 1]))
            };
            let sa: Vec<Point> = (0..=k).map(|i| at(&a, i as f64 / k as f64)).collect();
            let sb: Vec<Point> = (0..=k).map(|i| at(&b, i as f64 / k as f64)).collect();
            let band = (s * k as f64).floor() as usize;
            let mut d = vec![vec![f64::INFINITY; k + 1]; k + 1];
            for i in 0..=k {
                for j in i.saturating_sub(band)..=(i + band).min(k) {
                    let best = if i == 0 && j == 0 {
                        0.0
                    } else {
                        let mut v = f64::INFINITY;
                        if i > 0 { v = v.min(d[i - 1][j]); }
                        if j > 0 { v = v.min(d[i][j - 1]); }
                        if i > 0 && j > 0 { v = v.min(d[i - 1][j - 1]); }
                        v
                    };
                    d[i][j] = best.max(sa[i].dist(&sb[j]));
                }
            }
            let step = sa.windows(2).chain(sb.windows(2)).map(|w| w[0].dist(&w[1])).fold(0.0, f64::max);
            let got = tw_frechet_distance(&a, &b, s, SpeedModel::ConstantSpeed, SearchMode::ExactCritical).unwrap();
            prop_assert!((got - d[k][k]).abs() <= 3.0 * step + 1e-9, "{} vs {}", got, d[k][k]);
        }

        #[test]
        fn exact_matches_bisect(a in arb_timed(5), b in arb_timed(5), s in 0.0..0.4f64) {
            for model in [SpeedModel::ConstantSpeed, SpeedModel::VaryingSpeed] {
                let ex = tw_frechet_distance(&a, &b, s, model, SearchMode::ExactCritical).unwrap();
                let bi = tw_frechet_distance(&a, &b, s, model, SearchMode::default()).unwrap();
                if ex.is_infinite() || bi.is_infinite() {
                    prop_assert_eq!(ex, bi);
                } else {
                    prop_assert!((ex - bi).abs() <= 1e-7 * ex.max(1.0), "{:?}: {} vs {}", model, ex, bi);
                }
            }
        }

        #[test]
        fn sakoe_chiba_band(
            a in prop::collection::vec((-5.0..5.0f64, -5.0..5.0f64), 8),
            b in prop::collection::vec((-5.0..5.0f64, -5.0..5.0f64), 8),
            w in 1usize..5,
        ) {
            let (ta, tb) = (uniform(&a), uniform(&b));
            let n = (a.len() - 1) as f64;
            let sigma = (w as f64 - 0.5) / n;
            let vp = valid_pairs_varying_speed(&ta, &tb, sigma);
            for i in 0..a.len() {
                for j in 0..b.len() {
                    prop_assert_eq!(vp.contains(i, j), i.abs_diff(j) <= w);
                }
            }
            let want = dtw_sakoe_chiba(&ta.curve(), &tb.curve(), w);
            let got = tw_dtw(&ta, &tb, sigma).value;
            prop_assert!((got - want).abs() <= 1e-9 * want.max(1.0));
        }
    }
}
