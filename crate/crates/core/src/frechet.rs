//! Continuous Fréchet distance through the free-space diagram, and the
//! discrete Fréchet distance through its coupling recurrence.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{diameter, point_segment_dist, Point, PolyCurve};

/// A closed subinterval `[lo, hi]` of `[0, 1]`, or `None` when empty.
pub type Interval = Option<(f64, f64)>;

/// Free intervals on the four edges of one cell of the diagram.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FreeSpaceCell {
    pub left: Interval,
    pub bottom: Interval,
    pub right: Interval,
    pub top: Interval,
}

/// How a distance is extracted from the decision procedure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SearchMode {
    /// Binary search over the finite set of critical values.
    ExactCritical,
    /// Bisection down to `tol`; `None` uses `1e-9` times the input diameter.
    Bisect { tol: Option<f64> },
}

impl Default for SearchMode {
    fn default() -> Self {
        SearchMode::Bisect { tol: None }
    }
}

/// Parameters `u` in `[0, 1]` with `|a + u (b - a) - p| <= eps`. Ends are
/// snapped to 0 or 1 whenever the segment endpoint itself is within `eps`,
/// so corner membership never depends on rounding in the quadratic.
pub fn segment_disk(p: &Point, a: &Point, b: &Point, eps: f64) -> Interval {
    let start_in = a.dist(p) <= eps;
    let end_in = b.dist(p) <= eps;
    let (dx, dy) = (b.x - a.x, b.y - a.y);
    let (fx, fy) = (a.x - p.x, a.y - p.y);
    let qa = dx * dx + dy * dy;
    if qa == 0.0 {
        return start_in.then_some((0.0, 1.0));
    }
    let qb = 2.0 * (fx * dx + fy * dy);
    let qc = fx * fx + fy * fy - eps * eps;
    let disc = qb * qb - 4.0 * qa * qc;
    let (mut lo, mut hi) = if disc < 0.0 {
        (f64::INFINITY, f64::NEG_INFINITY)
    } else {
        let s = disc.sqrt();
        ((-qb - s) / (2.0 * qa), (-qb + s) / (2.0 * qa))
    };
    lo = lo.max(0.0);
    hi = hi.min(1.0);
    if start_in {
        lo = 0.0;
        hi = hi.max(0.0);
    }
    if end_in {
        hi = 1.0;
        lo = lo.min(1.0);
    }
    (lo <= hi).then_some((lo, hi))
}

pub(crate) fn intersect(a: Interval, lo: f64, hi: f64) -> Interval {
    let (alo, ahi) = a?;
    let (l, h) = (alo.max(lo), ahi.min(hi));
    (l <= h).then_some((l, h))
}

pub fn free_space_cell(seg_a: (Point, Point), seg_b: (Point, Point), eps: f64) -> FreeSpaceCell {
    FreeSpaceCell {
        left: segment_disk(&seg_a.0, &seg_b.0, &seg_b.1, eps),
        right: segment_disk(&seg_a.1, &seg_b.0, &seg_b.1, eps),
        bottom: segment_disk(&seg_b.0, &seg_a.0, &seg_a.1, eps),
        top: segment_disk(&seg_b.1, &seg_a.0, &seg_a.1, eps),
    }
}

/// Edge intervals of the `n x m` diagram of two curves with at least one
/// segment each. The x axis runs along the first curve.
#[derive(Debug, Clone)]
pub struct FreeSpaceDiagram {
    n: usize,
    m: usize,
    eps: f64,
    /// Edge `x = i` over segment `j` of the second curve, at `i * m + j`.
    vert: Vec<Interval>,
    /// Edge `y = j` over segment `i` of the first curve, at `j * n + i`.
    horiz: Vec<Interval>,
}

impl FreeSpaceDiagram {
    pub fn new(a: &PolyCurve, b: &PolyCurve, eps: f64) -> Self {
        let (av, bv) = (a.vertices(), b.vertices());
        let (n, m) = (a.segments(), b.segments());
        assert!(n >= 1 && m >= 1, "diagram needs a segment on each curve");
        let mut vert = Vec::with_capacity((n + 1) * m);
        for p in av {
            for w in bv.windows(2) {
                vert.push(segment_disk(p, &w[0], &w[1], eps));
            }
        }
        let mut horiz = Vec::with_capacity(n * (m + 1));
        for q in bv {
            for w in av.windows(2) {
                horiz.push(segment_disk(q, &w[0], &w[1], eps));
            }
        }
        Self { n, m, eps, vert, horiz }
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.n, self.m)
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn vertical(&self, i: usize, j: usize) -> Interval {
        self.vert[i * self.m + j]
    }

    pub fn horizontal(&self, i: usize, j: usize) -> Interval {
        self.horiz[j * self.n + i]
    }

    pub(crate) fn vertical_mut(&mut self, i: usize, j: usize) -> &mut Interval {
        &mut self.vert[i * self.m + j]
    }

    pub(crate) fn horizontal_mut(&mut self, i: usize, j: usize) -> &mut Interval {
        &mut self.horiz[j * self.n + i]
    }

    pub fn cell(&self, i: usize, j: usize) -> FreeSpaceCell {
        FreeSpaceCell {
            left: self.vertical(i, j),
            right: self.vertical(i + 1, j),
            bottom: self.horizontal(i, j),
            top: self.horizontal(i, j + 1),
        }
    }

    /// Whether a monotone path joins `(0, 0)` to `(n, m)`.
    pub fn is_reachable(&self) -> bool {
        self.reachable_with(|_, _| true)
    }

    /// Reachability where cells rejected by `valid` may only be crossed at a
    /// corner, never through their interior.
    pub(crate) fn reachable_with(&self, valid: impl Fn(usize, usize) -> bool) -> bool {
        let (n, m) = (self.n, self.m);
        let starts_at_zero = |iv: Interval| matches!(iv, Some((lo, _)) if lo == 0.0);
        let ends_at_one = |iv: Interval| matches!(iv, Some((_, hi)) if hi == 1.0);

        let mut left = vec![None; m];
        let mut open = true;
        for (j, slot) in left.iter_mut().enumerate() {
            let v = self.vertical(0, j);
            open = open && valid(0, j) && starts_at_zero(v);
            if !open {
                break;
            }
            *slot = v;
            open = ends_at_one(v);
        }

        let mut bottom_open = true;
        let mut last_top = None;
        let mut right = vec![None; m];
        for i in 0..n {
            let h = self.horizontal(i, 0);
            bottom_open = bottom_open && valid(i, 0) && starts_at_zero(h);
            let mut bottom = if bottom_open { h } else { None };
            bottom_open = bottom_open && ends_at_one(h);
            for j in 0..m {
                let l = left[j];
                let (r, t) = if valid(i, j) {
                    let v = self.vertical(i + 1, j);
                    let h = self.horizontal(i, j + 1);
                    let r = match (bottom, l) {
                        (Some(_), _) => v,
                        (None, Some((llo, _))) => intersect(v, llo, 1.0),
                        _ => None,
                    };
                    let t = match (l, bottom) {
                        (Some(_), _) => h,
                        (None, Some((blo, _))) => intersect(h, blo, 1.0),
                        _ => None,
                    };
                    (r, t)
                } else {
                    let r = (ends_at_one(bottom) && starts_at_zero(self.vertical(i + 1, j)))
                        .then_some((0.0, 0.0));
                    let t = (ends_at_one(l) && starts_at_zero(self.horizontal(i, j + 1)))
                        .then_some((0.0, 0.0));
                    (r, t)
                };
                right[j] = r;
                bottom = t;
            }
            last_top = bottom;
            std::mem::swap(&mut left, &mut right);
        }
        ends_at_one(left[m - 1]) || ends_at_one(last_top)
    }
}

fn point_curve_max(p: &Point, c: &PolyCurve) -> f64 {
    c.vertices().iter().map(|q| p.dist(q)).fold(0.0, f64::max)
}

/// Distance when one curve is a single point: the farthest point of the
/// other curve, always attained at a vertex.
pub(crate) fn degenerate_distance(a: &PolyCurve, b: &PolyCurve) -> Option<f64> {
    if a.len() == 1 {
        Some(point_curve_max(&a.vertices()[0], b))
    } else if b.len() == 1 {
        Some(point_curve_max(&b.vertices()[0], a))
    } else {
        None
    }
}

pub fn frechet_decision(a: &PolyCurve, b: &PolyCurve, eps: f64) -> bool {
    if eps < 0.0 {
        return false;
    }
    match degenerate_distance(a, b) {
        Some(d) => d <= eps,
        None => FreeSpaceDiagram::new(a, b, eps).is_reachable(),
    }
}

/// Point on segment `c`-`d` equidistant from `p` and `q`, if any.
fn bisector_on_segment(p: &Point, q: &Point, c: &Point, d: &Point) -> Option<Point> {
    let (wx, wy) = (q.x - p.x, q.y - p.y);
    let (dx, dy) = (d.x - c.x, d.y - c.y);
    let denom = dx * wx + dy * wy;
    if denom == 0.0 {
        return None;
    }
    let (mx, my) = ((p.x + q.x) / 2.0, (p.y + q.y) / 2.0);
    let u = ((mx - c.x) * wx + (my - c.y) * wy) / denom;
    (0.0..=1.0).contains(&u).then(|| c.lerp(d, u))
}

/// Every value at which the free space of two curves can change shape.
pub(crate) fn critical_values(a: &PolyCurve, b: &PolyCurve) -> Vec<f64> {
    let (av, bv) = (a.vertices(), b.vertices());
    let mut out = vec![av[0].dist(&bv[0]), av[av.len() - 1].dist(&bv[bv.len() - 1])];
    for (xs, ys) in [(av, bv), (bv, av)] {
        for p in xs {
            for q in ys {
                out.push(p.dist(q));
            }
            for w in ys.windows(2) {
                out.push(point_segment_dist(p, &w[0], &w[1]));
            }
        }
        for (k, p) in xs.iter().enumerate() {
            for q in &xs[k + 1..] {
                for w in ys.windows(2) {
                    if let Some(x) = bisector_on_segment(p, q, &w[0], &w[1]) {
                        out.push(x.dist(p));
                    }
                }
            }
        }
    }
    out
}

/// Smallest candidate accepted by `decide`, or `+inf` if none is.
pub(crate) fn search_candidates(mut cands: Vec<f64>, decide: impl Fn(f64) -> bool) -> f64 {
    cands.retain(|c| c.is_finite() && *c >= 0.0);
    cands.sort_by(f64::total_cmp);
    cands.dedup();
    let slack = |c: f64| c * (1.0 + 1e-10);
    match cands.last() {
        Some(&c) if decide(slack(c)) => {}
        _ => return f64::INFINITY,
    }
    let (mut lo, mut hi) = (0, cands.len() - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if decide(slack(cands[mid])) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    cands[lo]
}

/// Bisection on `[lo, hi]` where `hi` is known to be accepted.
pub(crate) fn bisect(mut lo: f64, mut hi: f64, tol: f64, decide: impl Fn(f64) -> bool) -> f64 {
    if decide(lo) {
        return lo;
    }
    while hi - lo > tol {
        let mid = lo + (hi - lo) / 2.0;
        if mid <= lo || mid >= hi {
            break;
        }
        if decide(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

pub(crate) fn resolve_tol(tol: Option<f64>, a: &PolyCurve, b: &PolyCurve) -> Result<f64> {
    match tol {
        Some(t) if t > 0.0 && t.is_finite() => Ok(t),
        Some(t) => Err(Error::Argument(format!("tolerance must be positive, got {t}"))),
        None => Ok((1e-9 * diameter(a.vertices(), b.vertices())).max(f64::MIN_POSITIVE)),
    }
}

pub(crate) fn endpoint_floor(a: &PolyCurve, b: &PolyCurve) -> f64 {
    let (av, bv) = (a.vertices(), b.vertices());
    av[0]
        .dist(&bv[0])
        .max(av[av.len() - 1].dist(&bv[bv.len() - 1]))
}

pub fn frechet_distance(a: &PolyCurve, b: &PolyCurve, mode: SearchMode) -> Result<f64> {
    if let SearchMode::Bisect { tol } = mode {
        resolve_tol(tol, a, b)?;
    }
    if let Some(d) = degenerate_distance(a, b) {
        return Ok(d);
    }
    let decide = |eps: f64| FreeSpaceDiagram::new(a, b, eps).is_reachable();
    Ok(match mode {
        SearchMode::ExactCritical => search_candidates(critical_values(a, b), decide),
        SearchMode::Bisect { tol } => {
            let tol = resolve_tol(tol, a, b)?;
            bisect(endpoint_floor(a, b), discrete_frechet(a, b), tol, decide)
        }
    })
}

/// A monotone sequence of index pairs from `(0, 0)` to `(n, m)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Coupling {
    pub pairs: Vec<(usize, usize)>,
}

impl Coupling {
    /// Checks the endpoints and that every step advances one or both indices by one.
    pub fn is_valid(&self, n: usize, m: usize) -> bool {
        self.pairs.first() == Some(&(0, 0))
            && self.pairs.last() == Some(&(n, m))
            && self.pairs.windows(2).all(|w| {
                let (di, dj) = (w[1].0.wrapping_sub(w[0].0), w[1].1.wrapping_sub(w[0].1));
                matches!((di, dj), (1, 0) | (0, 1) | (1, 1))
            })
    }

    pub fn width(&self, a: &[Point], b: &[Point]) -> f64 {
        self.pairs
            .iter()
            .map(|&(i, j)| a[i].dist(&b[j]))
            .fold(0.0, f64::max)
    }
}

pub fn discrete_frechet(a: &PolyCurve, b: &PolyCurve) -> f64 {
    discrete_frechet_points(a.vertices(), b.vertices())
}

pub(crate) fn discrete_frechet_points(a: &[Point], b: &[Point]) -> f64 {
    let m = b.len();
    let mut prev = vec![0.0; m];
    let mut cur = vec![0.0; m];
    for (i, p) in a.iter().enumerate() {
        for j in 0..m {
            let d = p.dist(&b[j]);
            cur[j] = match (i, j) {
                (0, 0) => d,
                (0, _) => d.max(cur[j - 1]),
                (_, 0) => d.max(prev[0]),
                _ => d.max(prev[j].min(prev[j - 1]).min(cur[j - 1])),
            };
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[m - 1]
}

/// Discrete Fréchet distance together with a coupling attaining it.
pub fn discrete_frechet_coupling(a: &PolyCurve, b: &PolyCurve) -> (f64, Coupling) {
    let (av, bv) = (a.vertices(), b.vertices());
    let (n, m) = (av.len(), bv.len());
    let mut dp = vec![0.0; n * m];
    for i in 0..n {
        for j in 0..m {
            let d = av[i].dist(&bv[j]);
            dp[i * m + j] = match (i, j) {
                (0, 0) => d,
                (0, _) => d.max(dp[j - 1]),
                (_, 0) => d.max(dp[(i - 1) * m]),
                _ => d.max(
                    dp[(i - 1) * m + j - 1]
                        .min(dp[(i - 1) * m + j])
                        .min(dp[i * m + j - 1]),
                ),
            };
        }
    }
    let (mut i, mut j) = (n - 1, m - 1);
    let mut pairs = vec![(i, j)];
    while (i, j) != (0, 0) {
        (i, j) = if i == 0 {
            (0, j - 1)
        } else if j == 0 {
            (i - 1, 0)
        } else {
            [(i - 1, j - 1), (i - 1, j), (i, j - 1)]
                .into_iter()
                .min_by(|x, y| dp[x.0 * m + x.1].total_cmp(&dp[y.0 * m + y.1]))
                .unwrap()
        };
        pairs.push((i, j));
    }
    pairs.reverse();
    (dp[n * m - 1], Coupling { pairs })
}
