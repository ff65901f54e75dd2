//! Edit distances on symbol trajectories: unit-cost insert/delete, and the
//! metric-based variant whose costs are detour lengths in the location metric.
//!
//! Every string is implicitly framed by virtual endpoints `S` and `T` that
//! lie infinitely far from all locations. Costs next to them are evaluated
//! with the infinite terms cancelled, so `S` contributes nothing and a run
//! that would leave `S T` adjacent costs `+inf`.

pub mod oracle;

use crate::error::{Error, Result};
use crate::metric::LocationMetric;
use crate::symbols::SymbolTrajectory;

/// Default symbol cap for [`metric_edit_distance`].
pub const DEFAULT_FULL_DP_CAP: usize = 12;

/// A position in a padded string.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sym {
    Start,
    End,
    Loc(usize),
}

/// Insertion and deletion costs derived from a location metric.
#[derive(Debug, Clone, Copy)]
pub struct EditCostModel<'a> {
    metric: &'a LocationMetric,
}

impl<'a> EditCostModel<'a> {
    pub fn new(metric: &'a LocationMetric) -> Self {
        Self { metric }
    }

    pub fn metric(&self) -> &'a LocationMetric {
        self.metric
    }

    /// Cost of inserting `z` between `x` and `y`.
    pub fn ins(&self, x: Sym, y: Sym, z: usize) -> f64 {
        self.run_cost(x, y, z, z, 0.0)
    }

    /// Cost of deleting `z` from between `x` and `y`; equal to [`Self::ins`].
    pub fn del(&self, x: Sym, y: Sym, z: usize) -> f64 {
        self.ins(x, y, z)
    }

    /// Cost of inserting or deleting the whole run `seq` between `x` and `y`.
    pub fn seq_cost(&self, x: Sym, y: Sym, seq: &[usize]) -> f64 {
        match seq {
            [] => 0.0,
            [first, .., last] | [first @ last] => {
                let inner = seq.windows(2).map(|w| self.metric.d(w[0], w[1])).sum();
                self.run_cost(x, y, *first, *last, inner)
            }
        }
    }

    /// `d(x, first) + inner + d(last, y) - d(x, y)` with endpoint cancellation.
    fn run_cost(&self, x: Sym, y: Sym, first: usize, last: usize, inner: f64) -> f64 {
        let d = |a, b| self.metric.d(a, b);
        let c = match (x, y) {
            (Sym::Loc(x), Sym::Loc(y)) => d(x, first) + inner + d(last, y) - d(x, y),
            (Sym::Start, Sym::Loc(y)) => inner + d(last, y),
            (Sym::Loc(x), Sym::End) => d(x, first) + inner,
            _ => return f64::INFINITY,
        };
        c.max(0.0)
    }
}

pub(crate) fn encode(metric: &LocationMetric, s: &SymbolTrajectory) -> Result<Vec<usize>> {
    s.symbols()
        .iter()
        .map(|x| {
            metric
                .index_of(x)
                .ok_or_else(|| Error::Validation(format!("symbol {x:?} is not in the metric")))
        })
        .collect()
}

/// Number of unit insertions and deletions turning `a` into `b`.
pub fn plain_edit_distance(a: &SymbolTrajectory, b: &SymbolTrajectory) -> usize {
    plain_edit_distance_slices(a.symbols(), b.symbols())
}

pub fn plain_edit_distance_slices<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0; b.len() + 1];
    for (i, x) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, y) in b.iter().enumerate() {
            cur[j + 1] = if x == y {
                prev[j]
            } else {
                prev[j + 1].min(cur[j]) + 1
            };
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// Total cost of deleting `seq` from between `x` and `y`, whatever the order.
pub fn seq_delete_cost(x: &str, y: &str, seq: &[&str], metric: &LocationMetric) -> Result<f64> {
    let mut path = 0.0;
    let mut prev = x;
    for z in seq.iter().copied().chain(std::iter::once(y)) {
        path += metric.dist(prev, z)?;
        prev = z;
    }
    Ok(path - metric.dist(x, y)?)
}

/// Metric-based edit distance with operations in any order.
pub fn metric_edit_distance(
    a: &SymbolTrajectory,
    b: &SymbolTrajectory,
    metric: &LocationMetric,
) -> Result<f64> {
    metric_edit_distance_capped(a, b, metric, DEFAULT_FULL_DP_CAP)
}

pub fn metric_edit_distance_capped(
    a: &SymbolTrajectory,
    b: &SymbolTrajectory,
    metric: &LocationMetric,
    cap: usize,
) -> Result<f64> {
    if a.len() > cap || b.len() > cap {
        return Err(Error::SizeGuard(format!(
            "full edit DP runs in O(n^3 m^3 (n + m)); lengths {} and {} exceed the cap of {cap}",
            a.len(),
            b.len()
        )));
    }
    let (src, dst) = (encode(metric, a)?, encode(metric, b)?);
    Ok(FullDp::new(EditCostModel::new(metric), &src, &dst).solve())
}

/// `F(k, l, i, j)`: least cost to turn `b_k .. b_l` into `b_k a_i .. a_j b_l`,
/// where `b` is the padded source and `a` the target (1-based, `j = i - 1`
/// meaning an empty target range).
struct FullDp<'a> {
    cost: EditCostModel<'a>,
    src: &'a [usize],
    dst: &'a [usize],
    src_prefix: Vec<f64>,
    dst_prefix: Vec<f64>,
    table: Vec<f64>,
}

impl<'a> FullDp<'a> {
    fn new(cost: EditCostModel<'a>, src: &'a [usize], dst: &'a [usize]) -> Self {
        let prefix = |s: &[usize]| {
            let mut p = vec![0.0; s.len() + 1];
            for t in 1..s.len() {
                p[t + 1] = p[t] + cost.metric.d(s[t - 1], s[t]);
            }
            p
        };
        let (m, n) = (src.len(), dst.len());
        Self {
            cost,
            src,
            dst,
            src_prefix: prefix(src),
            dst_prefix: prefix(dst),
            table: vec![f64::NAN; (m + 2) * (m + 2) * (n + 2) * (n + 2)],
        }
    }

    fn idx(&self, k: usize, l: usize, i: usize, j: usize) -> usize {
        let (m2, n2) = (self.src.len() + 2, self.dst.len() + 2);
        ((k * m2 + l) * n2 + i) * n2 + j
    }

    fn f(&self, k: usize, l: usize, i: usize, j: usize) -> f64 {
        if j + 1 == i {
            self.src_run(self.b(k), self.b(l), k + 1, l - 1)
        } else {
            self.table[self.idx(k, l, i, j)]
        }
    }

    fn b(&self, x: usize) -> Sym {
        match x {
            0 => Sym::Start,
            x if x == self.src.len() + 1 => Sym::End,
            x => Sym::Loc(self.src[x - 1]),
        }
    }

    fn a(&self, y: usize) -> Sym {
        Sym::Loc(self.dst[y - 1])
    }

    /// Run cost of source symbols `x0 ..= x1` between `p` and `q`.
    fn src_run(&self, p: Sym, q: Sym, x0: usize, x1: usize) -> f64 {
        if x0 > x1 {
            return 0.0;
        }
        let inner = self.src_prefix[x1] - self.src_prefix[x0];
        self.cost.run_cost(p, q, self.src[x0 - 1], self.src[x1 - 1], inner)
    }

    /// Run cost of target symbols `y0 ..= y1` between `p` and `q`.
    fn dst_run(&self, p: Sym, q: Sym, y0: usize, y1: usize) -> f64 {
        if y0 > y1 {
            return 0.0;
        }
        let inner = self.dst_prefix[y1] - self.dst_prefix[y0];
        self.cost.run_cost(p, q, self.dst[y0 - 1], self.dst[y1 - 1], inner)
    }

    fn cell(&self, k: usize, l: usize, i: usize, j: usize) -> f64 {
        if l == k + 1 {
            return self.dst_run(self.b(k), self.b(l), i, j);
        }
        let mut best = f64::INFINITY;
        let mut consider = |v: f64| {
            if v < best {
                best = v;
            }
        };
        for l2 in k + 1..l {
            consider(self.f(k, l2, i, j) + self.src_run(self.a(j), self.b(l), l2, l - 1));
        }
        for k2 in k + 1..l {
            consider(self.f(k2, l, i, j) + self.src_run(self.b(k), self.a(i), k + 1, k2));
        }
        for l2 in k + 1..l {
            for i2 in i - 1..=j {
                let left = self.f(k, l2, i, i2);
                if !left.is_finite() {
                    continue;
                }
                let p = if i2 >= i { self.a(i2) } else { self.b(k) };
                for j2 in i2 + 1..=j + 1 {
                    let q = if j2 <= j { self.a(j2) } else { self.b(l) };
                    consider(
                        left + self.f(l2, l, j2, j)
                            + self.src_run(p, q, l2, l2)
                            + self.dst_run(p, q, i2 + 1, j2 - 1),
                    );
                }
            }
        }
        for x in k + 1..l {
            for y in i..=j {
                if self.src[x - 1] == self.dst[y - 1] {
                    consider(self.f(k, x, i, y - 1) + self.f(x, l, y + 1, j));
                }
            }
        }
        best
    }

    fn solve(mut self) -> f64 {
        let (m, n) = (self.src.len(), self.dst.len());
        for span in 1..=m + 1 {
            for k in 0..=m + 1 - span {
                let l = k + span;
                for len in 1..=n {
                    for i in 1..=n + 1 - len {
                        let j = i + len - 1;
                        let v = self.cell(k, l, i, j);
                        let at = self.idx(k, l, i, j);
                        self.table[at] = v;
                    }
                }
            }
        }
        self.f(0, m + 1, 1, n)
    }
}

/// Metric-based edit distance where every insertion precedes every deletion.
///
/// State `(i, j, last, next)`: the intermediate string has been fixed up to
/// `a_i` and `b_j`; `last` says whether its final element so far is `a_i`
/// (0) or `b_j` (1), and `next` whether the element after it is `a_{i+1}`
/// (0) or `b_{j+1}` (1). Insertions sweep left to right, so an inserted
/// `a_i` sees the intermediate predecessor on its left and `b_{j+1}` on its
/// right; deletions also sweep left to right, so a deleted `b_j` sees `a_i`
/// on its left and the intermediate successor on its right.
pub fn insertion_first_edit_distance(
    a: &SymbolTrajectory,
    b: &SymbolTrajectory,
    metric: &LocationMetric,
) -> Result<f64> {
    let (src, dst) = (encode(metric, a)?, encode(metric, b)?);
    Ok(insertion_first_indices(EditCostModel::new(metric), &src, &dst))
}

pub(crate) fn insertion_first_indices(cost: EditCostModel<'_>, src: &[usize], dst: &[usize]) -> f64 {
    let (m, n) = (src.len(), dst.len());
    let bs = |x: usize| match x {
        0 => Sym::Start,
        x if x > m => Sym::End,
        x => Sym::Loc(src[x - 1]),
    };
    let as_ = |y: usize| match y {
        0 => Sym::Start,
        y if y > n => Sym::End,
        y => Sym::Loc(dst[y - 1]),
    };
    let inf = f64::INFINITY;
    // dp[i][j][last][next]
    let mut dp = vec![[[inf; 2]; 2]; (n + 1) * (m + 1)];
    let at = |i: usize, j: usize| i * (m + 1) + j;
    let next_ok = |i: usize, j: usize, next: usize| match next {
        0 => i < n || j == m,
        _ => j < m && !(i == n && j == m),
    };
    for next in 0..2 {
        if next_ok(0, 0, next) {
            dp[at(0, 0)][0][next] = 0.0;
        }
    }
    for i in 0..=n {
        for j in 0..=m {
            for last in 0..2 {
                for next in 0..2 {
                    let here = dp[at(i, j)][last][next];
                    if !here.is_finite() || (i == n && j == m) {
                        continue;
                    }
                    let prev = if last == 0 { as_(i) } else { bs(j) };
                    if next == 0 {
                        let c = here + cost.ins(prev, bs(j + 1), dst[i]);
                        for nn in 0..2 {
                            if next_ok(i + 1, j, nn) {
                                let slot = &mut dp[at(i + 1, j)][0][nn];
                                *slot = slot.min(c);
                            }
                        }
                    } else {
                        for nn in 0..2 {
                            if !next_ok(i, j + 1, nn) {
                                continue;
                            }
                            let succ = if nn == 0 { as_(i + 1) } else { bs(j + 2) };
                            let c = here + cost.del(as_(i), succ, src[j]);
                            let slot = &mut dp[at(i, j + 1)][1][nn];
                            *slot = slot.min(c);
                        }
                    }
                }
            }
        }
    }
    let end = dp[at(n, m)];
    end[0][0].min(end[1][0])
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::geometry::Point;
    use proptest::prelude::*;

    pub(crate) fn planar(pts: &[(&str, f64, f64)]) -> LocationMetric {
        LocationMetric::from_coordinates(pts.iter().map(|&(s, x, y)| (s, Point::new(x, y)))).unwrap()
    }

    pub(crate) fn s(x: &str) -> SymbolTrajectory {
        SymbolTrajectory::from_chars(x).unwrap()
    }

    fn lcs(a: &[char], b: &[char]) -> usize {
        if a.is_empty() || b.is_empty() {
            return 0;
        }
        if a[0] == b[0] {
            1 + lcs(&a[1..], &b[1..])
        } else {
            lcs(&a[1..], b).max(lcs(a, &b[1..]))
        }
    }

    /// Interleaving form of the insertion-first cost: twice the path length
    /// of the intermediate string minus both input path lengths.
    fn interleaving_oracle(m: &LocationMetric, a: &[usize], b: &[usize]) -> f64 {
        let len = |s: &[usize]| s.windows(2).map(|w| m.d(w[0], w[1])).sum::<f64>();
        let (n, k) = (a.len(), b.len());
        // best[i][j][from_a]: shortest path over interleavings of a[..i], b[..j] ending in a or b
        let mut best = vec![vec![[f64::INFINITY; 2]; k + 1]; n + 1];
        for i in 0..=n {
            for j in 0..=k {
                for last in 0..2 {
                    let (ok, cur) = match last {
                        0 if i > 0 => (true, a[i - 1]),
                        1 if j > 0 => (true, b[j - 1]),
                        _ => (false, 0),
                    };
                    if !ok {
                        continue;
                    }
                    let (pi, pj) = if last == 0 { (i - 1, j) } else { (i, j - 1) };
                    if pi == 0 && pj == 0 {
                        best[i][j][last] = 0.0;
                        continue;
                    }
                    let mut v = f64::INFINITY;
                    if pi > 0 {
                        v = v.min(best[pi][pj][0] + m.d(a[pi - 1], cur));
                    }
                    if pj > 0 {
                        v = v.min(best[pi][pj][1] + m.d(b[pj - 1], cur));
                    }
                    best[i][j][last] = v;
                }
            }
        }
        let inter = best[n][k][0].min(best[n][k][1]);
        2.0 * inter - len(a) - len(b)
    }

    fn grid_metric() -> LocationMetric {
        planar(&[("a", 0.0, 0.0), ("b", 1.0, 0.0), ("c", 1.0, 1.0), ("d", 0.0, 2.0)])
    }

    fn arb_word(max: usize) -> impl Strategy<Value = String> {
        prop::collection::vec(prop::sample::select(vec!['a', 'b', 'c', 'd']), 1..=max)
            .prop_map(|v| v.into_iter().collect())
    }

    #[test]
    fn plain_examples() {
        assert_eq!(plain_edit_distance(&s("abc"), &s("abc")), 0);
        assert_eq!(plain_edit_distance(&s("abc"), &s("adc")), 2);
    }

    #[test]
    fn seq_cost_examples() {
        let m = planar(&[("x", 0.0, 0.0), ("y", 2.0, 0.0), ("z", 1.0, 1.0), ("w", 1.0, 0.0)]);
        assert!((seq_delete_cost("x", "y", &["z"], &m).unwrap() - (2.0 * 2f64.sqrt() - 2.0)).abs() < 1e-12);
        assert_eq!(seq_delete_cost("x", "y", &["w"], &m).unwrap(), 0.0);
        assert_eq!(seq_delete_cost("x", "y", &["w", "w", "w"], &m).unwrap(), 0.0);
    }

    #[test]
    fn endpoint_cancellation() {
        let m = planar(&[("x", 0.0, 0.0), ("y", 3.0, 4.0)]);
        let c = EditCostModel::new(&m);
        assert_eq!(c.ins(Sym::Start, Sym::Loc(1), 0), 5.0);
        assert_eq!(c.del(Sym::Loc(0), Sym::End, 1), 5.0);
        assert!(c.ins(Sym::Start, Sym::End, 0).is_infinite());
    }

    #[test]
    fn identity_is_zero() {
        let m = grid_metric();
        for w in ["a", "abc", "dcba", "abab"] {
            assert_eq!(metric_edit_distance(&s(w), &s(w), &m).unwrap(), 0.0);
            assert_eq!(insertion_first_edit_distance(&s(w), &s(w), &m).unwrap(), 0.0);
        }
    }

    #[test]
    fn single_symbol_swap() {
        let m = planar(&[("a", 0.0, 0.0), ("b", 3.0, 4.0)]);
        // Insert a next to b, then delete b: 2 d(a, b).
        assert_eq!(metric_edit_distance(&s("b"), &s("a"), &m).unwrap(), 10.0);
    }

    #[test]
    fn substitution_in_the_middle() {
        let (a, b, c, d) = ((0.0, 0.0), (1.0, 1.0), (2.0, 0.0), (1.0, -1.0));
        let m = planar(&[("a", a.0, a.1), ("b", b.0, b.1), ("c", c.0, c.1), ("d", d.0, d.1)]);
        let dd = |p: &str, q: &str| m.dist(p, q).unwrap();
        let insert_first = dd("a", "b") + 2.0 * dd("b", "d") + dd("d", "c") - dd("a", "d") - dd("b", "c");
        let delete_first = dd("a", "b") + dd("b", "c") + dd("a", "d") + dd("d", "c") - 2.0 * dd("a", "c");
        let got = metric_edit_distance(&s("abc"), &s("adc"), &m).unwrap();
        assert!((got - insert_first.min(delete_first)).abs() < 1e-12, "{got}");
        assert!((got - (4.0 * 2f64.sqrt() - 4.0)).abs() < 1e-12);
    }

    #[test]
    fn size_guard() {
        let m = grid_metric();
        let long = s("abcdabcdabcda");
        assert!(matches!(metric_edit_distance(&long, &s("a"), &m), Err(Error::SizeGuard(_))));
        assert!(insertion_first_edit_distance(&long, &s("a"), &m).is_ok());
    }

    #[test]
    fn unknown_symbol() {
        let m = grid_metric();
        assert!(matches!(metric_edit_distance(&s("az"), &s("a"), &m), Err(Error::Validation(_))));
    }

    fn counterexample_metric() -> LocationMetric {
        planar(&[
            ("a", 0.0, 0.0),
            ("b", 0.0, 1.0),
            ("c", 1.0, 0.0),
            ("d", 2.0, 1.0),
            ("e", 2.0, 0.0),
        ])
    }

    #[test]
    fn insertion_first_breaks_triangle() {
        let m = counterexample_metric();
        let di = |x: &str, y: &str| insertion_first_edit_distance(&s(x), &s(y), &m).unwrap();
        let (a, b, c) = ("ae", "ace", "abde");
        assert!(di(b, a).abs() < 1e-12);
        assert!((di(a, c) - 2.0).abs() < 1e-12);
        assert!((di(b, c) - (4.0 * 2f64.sqrt() - 2.0)).abs() < 1e-12);
        assert!(di(b, c) > di(b, a) + di(a, c));
        // The full DP on the same triple respects the triangle inequality.
        let df = |x: &str, y: &str| metric_edit_distance(&s(x), &s(y), &m).unwrap();
        assert!(df(b, c) <= df(b, a) + df(a, c) + 1e-12);
    }

    #[test]
    fn acde_variant_is_tight() {
        let m = counterexample_metric();
        let di = |x: &str, y: &str| insertion_first_edit_distance(&s(x), &s(y), &m).unwrap();
        let (lhs, rhs) = (di("ace", "acde"), di("ace", "ae") + di("ae", "acde"));
        assert!((lhs - rhs).abs() < 1e-12 && (lhs - 2f64.sqrt()).abs() < 1e-12);
    }

    /// Applies single deletions of `seq` (indices into it) in `order`.
    pub(crate) fn stepwise_delete(m: &LocationMetric, x: usize, y: usize, seq: &[usize], order: &[usize]) -> f64 {
        let c = EditCostModel::new(m);
        let mut alive: Vec<Option<usize>> = seq.iter().copied().map(Some).collect();
        let mut total = 0.0;
        for &k in order {
            let left = alive[..k].iter().rev().flatten().next().copied().unwrap_or(x);
            let right = alive[k + 1..].iter().flatten().next().copied().unwrap_or(y);
            total += c.del(Sym::Loc(left), Sym::Loc(right), seq[k]);
            alive[k] = None;
        }
        total
    }

    pub(crate) fn permutations(k: usize) -> Vec<Vec<usize>> {
        if k == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for p in permutations(k - 1) {
            for pos in 0..=p.len() {
                let mut q = p.clone();
                q.insert(pos, k - 1);
                out.push(q);
            }
        }
        out
    }

    proptest! {
        #[test]
        fn deletion_order_is_irrelevant(
            pts in prop::collection::vec((-4.0..4.0f64, -4.0..4.0f64), 6),
            seq in prop::collection::vec(2usize..6, 1..=4),
        ) {
            let names: Vec<String> = (0..6).map(|i| format!("p{i}")).collect();
            let m = LocationMetric::from_coordinates(names.iter().zip(&pts).map(|(n, p)| (n.clone(), Point::new(p.0, p.1)))).unwrap();
            let refs: Vec<&str> = seq.iter().map(|&i| names[i].as_str()).collect();
            let closed = seq_delete_cost("p0", "p1", &refs, &m).unwrap();
            let seq_cost = EditCostModel::new(&m).seq_cost(Sym::Loc(0), Sym::Loc(1), &seq);
            prop_assert!((closed - seq_cost).abs() < 1e-9);
            for order in permutations(seq.len()) {
                let total = stepwise_delete(&m, 0, 1, &seq, &order);
                prop_assert!((total - closed).abs() < 1e-9, "{:?}: {} vs {}", order, total, closed);
            }
        }

        #[test]
        fn full_dp_triangle(a in arb_word(4), b in arb_word(4), c in arb_word(4)) {
            let m = grid_metric();
            let d = |x: &str, y: &str| metric_edit_distance(&s(x), &s(y), &m).unwrap();
            prop_assert!(d(&a, &c) <= d(&a, &b) + d(&b, &c) + 1e-9);
        }

        #[test]
        fn plain_matches_lcs(a in arb_word(6), b in arb_word(6)) {
            let (ca, cb): (Vec<char>, Vec<char>) = (a.chars().collect(), b.chars().collect());
            prop_assert_eq!(plain_edit_distance(&s(&a), &s(&b)), ca.len() + cb.len() - 2 * lcs(&ca, &cb));
        }

        #[test]
        fn insertion_first_matches_interleaving(a in arb_word(6), b in arb_word(6)) {
            let m = grid_metric();
            let got = insertion_first_edit_distance(&s(&a), &s(&b), &m).unwrap();
            let (ea, eb) = (encode(&m, &s(&a)).unwrap(), encode(&m, &s(&b)).unwrap());
            let want = interleaving_oracle(&m, &ea, &eb);
            prop_assert!((got - want).abs() < 1e-9, "{} vs {}", got, want);
        }

        #[test]
        fn full_dp_is_symmetric(a in arb_word(5), b in arb_word(5)) {
            let m = grid_metric();
            let ab = metric_edit_distance(&s(&a), &s(&b), &m).unwrap();
            let ba = metric_edit_distance(&s(&b), &s(&a), &m).unwrap();
            prop_assert!((ab - ba).abs() < 1e-9);
        }

        #[test]
        fn full_dp_below_insertion_first(a in arb_word(5), b in arb_word(5)) {
            let m = grid_metric();
            let full = metric_edit_distance(&s(&a), &s(&b), &m).unwrap();
            let first = insertion_first_edit_distance(&s(&a), &s(&b), &m).unwrap();
            prop_assert!(full <= first + 1e-9);
        }
    }
}
