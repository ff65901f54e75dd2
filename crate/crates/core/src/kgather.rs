//! k-gather clustering: every cluster holds at least `k` trajectories and the
//! largest member-to-center distance is minimized.
//!
//! [`kgather_approx`] is the greedy-cover plus max-flow 2-approximation;
//! [`kgather_exact`] enumerates center sets and serves as an oracle on small inputs.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::flow::FlowNetwork;
use crate::io::Dataset;
use crate::measure::Measure;

pub const DEFAULT_EXACT_CAP: usize = 16;

/// Symmetric matrix of nonnegative distances with a zero diagonal.
/// Entries may be `+inf` for pairs whose distance is undefined or unbounded.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    d: Vec<f64>,
}

impl DistanceMatrix {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        if let Some(i) = rows.iter().position(|r| r.len() != n) {
            return Err(Error::Validation(format!("row {i} has {} entries, expected {n}", rows[i].len())));
        }
        let dm = Self {
            n,
            d: rows.into_iter().flatten().collect(),
        };
        dm.validate()?;
        Ok(dm)
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> f64) -> Result<Self> {
        let mut d = vec![0.0; n * n];
        for i in 0..n {
            for j in i + 1..n {
                let v = f(i, j);
                d[i * n + j] = v;
                d[j * n + i] = v;
            }
        }
        let dm = Self { n, d };
        dm.validate()?;
        Ok(dm)
    }

    fn validate(&self) -> Result<()> {
        for i in 0..self.n {
            if self.get(i, i) != 0.0 {
                return Err(Error::Validation(format!("diagonal entry {i} is {}", self.get(i, i))));
            }
            for j in 0..self.n {
                let v = self.get(i, j);
                if v.is_nan() || v < 0.0 {
                    return Err(Error::Validation(format!("entry ({i},{j}) = {v} is not a distance")));
                }
                if v != self.get(j, i) {
                    return Err(Error::Validation(format!("entries ({i},{j}) and ({j},{i}) differ")));
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.d[i * self.n + j]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.d.chunks(self.n.max(1)).take(self.n).map(<[f64]>::to_vec).collect()
    }

    /// Distinct finite off-diagonal values plus zero, ascending.
    pub fn candidates(&self) -> Vec<f64> {
        let mut c: Vec<f64> = std::iter::once(0.0)
            .chain(self.d.iter().copied().filter(|v| v.is_finite()))
            .collect();
        c.sort_by(f64::total_cmp);
        c.dedup();
        c
    }
}

/// Distances between every pair of dataset entries, computed in parallel.
pub fn pairwise_distances(dataset: &Dataset, measure: &Measure) -> Result<DistanceMatrix> {
    let n = dataset.len();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let values: Vec<f64> = match dataset {
        Dataset::Timed(items) => {
            if !measure.is_timed() {
                return Err(Error::Config(format!("measure {} needs symbol trajectories", measure.name())));
            }
            pairs
                .par_iter()
                .map(|&(i, j)| measure.timed(&items[i].1, &items[j].1))
                .collect::<Result<_>>()?
        }
        Dataset::Symbolic(items) => {
            if measure.is_timed() {
                return Err(Error::Config(format!("measure {} needs timed trajectories", measure.name())));
            }
            pairs
                .par_iter()
                .map(|&(i, j)| measure.symbolic(&items[i].1, &items[j].1))
                .collect::<Result<_>>()?
        }
    };
    let mut d = vec![0.0; n * n];
    for (&(i, j), &v) in pairs.iter().zip(&values) {
        d[i * n + j] = v;
        d[j * n + i] = v;
    }
    let dm = DistanceMatrix { n, d };
    dm.validate()?;
    Ok(dm)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Cluster {
    pub center: usize,
    pub members: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Clustering {
    pub radius: f64,
    pub clusters: Vec<Cluster>,
}

impl Clustering {
    fn from_assignment(dm: &DistanceMatrix, centers: &[usize], owner: &[usize]) -> Self {
        let mut clusters: Vec<Cluster> = centers
            .iter()
            .map(|&c| Cluster {
                center: c,
                members: Vec::new(),
            })
            .collect();
        let mut radius: f64 = 0.0;
        for (v, &o) in owner.iter().enumerate() {
            clusters[o].members.push(v);
            radius = radius.max(dm.get(v, centers[o]));
        }
        Clustering { radius, clusters }
    }

    /// Checks the partition, size, center-membership and radius invariants.
    pub fn validate(&self, dm: &DistanceMatrix, k: usize) -> Result<()> {
        let mut seen = vec![false; dm.len()];
        let mut radius: f64 = 0.0;
        for c in &self.clusters {
            if c.members.len() < k {
                return Err(Error::Validation(format!("cluster at {} has {} < {k} members", c.center, c.members.len())));
            }
            if !c.members.contains(&c.center) {
                return Err(Error::Validation(format!("center {} is not a member of its cluster", c.center)));
            }
            for &v in &c.members {
                if v >= dm.len() || std::mem::replace(&mut seen[v], true) {
                    return Err(Error::Validation(format!("member {v} is out of range or repeated")));
                }
                radius = radius.max(dm.get(v, c.center));
            }
        }
        if let Some(v) = seen.iter().position(|s| !s) {
            return Err(Error::Validation(format!("point {v} is not in any cluster")));
        }
        if radius != self.radius {
            return Err(Error::Validation(format!("reported radius {} but true radius is {radius}", self.radius)));
        }
        Ok(())
    }
}

fn check_k(n: usize, k: usize) -> Result<()> {
    if k == 0 || n < k {
        return Err(Error::Argument(format!("k-gather needs 1 <= k <= n, got k = {k}, n = {n}")));
    }
    Ok(())
}

/// Every point has at least `k - 1` others within `r`.
pub fn dense_enough(dm: &DistanceMatrix, k: usize, r: f64) -> bool {
    (0..dm.len()).all(|i| (0..dm.len()).filter(|&j| dm.get(i, j) <= r).count() >= k)
}

/// Greedy cover: the lowest-index uncovered point becomes a center and covers
/// everything within `r`. Chosen centers are pairwise more than `r` apart.
pub fn greedy_centers(dm: &DistanceMatrix, r: f64) -> Vec<usize> {
    let mut covered = vec![false; dm.len()];
    let mut centers = Vec::new();
    while let Some(v) = covered.iter().position(|c| !c) {
        centers.push(v);
        for (u, c) in covered.iter_mut().enumerate() {
            if dm.get(v, u) <= r {
                *c = true;
            }
        }
    }
    centers
}

/// Builds the center-to-point flow and returns, per point, the index into
/// `centers` that the flow routed it to.
///
/// `quota` units leave the source toward each center; arcs to points in
/// `excluded` are omitted.
fn route(dm: &DistanceMatrix, centers: &[usize], r: f64, quota: usize, excluded: &[bool]) -> Option<Vec<Option<usize>>> {
    let n = dm.len();
    let (s, t) = (centers.len() + n, centers.len() + n + 1);
    let mut g = FlowNetwork::new(t + 1);
    let mut arcs = Vec::new();
    for (ci, &c) in centers.iter().enumerate() {
        g.add_edge(s, ci, quota as i64);
        for v in (0..n).filter(|&v| !excluded[v] && dm.get(c, v) <= r) {
            arcs.push((ci, v, g.add_edge(ci, centers.len() + v, 1)));
        }
    }
    for v in 0..n {
        g.add_edge(centers.len() + v, t, 1);
    }
    if g.max_flow(s, t) != (quota * centers.len()) as i64 {
        return None;
    }
    let mut owner = vec![None; n];
    for (ci, v, e) in arcs {
        if g.flow(e) > 0 {
            owner[v] = Some(ci);
        }
    }
    Some(owner)
}

/// Gives every unrouted point the nearest center within `r`, lowest index on ties.
fn attach_leftovers(dm: &DistanceMatrix, centers: &[usize], r: f64, owner: Vec<Option<usize>>) -> Option<Vec<usize>> {
    owner
        .into_iter()
        .enumerate()
        .map(|(v, o)| {
            o.or_else(|| {
                (0..centers.len())
                    .filter(|&ci| dm.get(v, centers[ci]) <= r)
                    .min_by(|&x, &y| dm.get(v, centers[x]).total_cmp(&dm.get(v, centers[y])))
            })
        })
        .collect()
}

/// Radius-`r` feasibility test of the approximation; returns a clustering
/// whose true radius is at most `r` when it succeeds.
pub fn kgather_feasible(dm: &DistanceMatrix, k: usize, r: f64) -> Option<Clustering> {
    if k == 0 || dm.len() < k || !dense_enough(dm, k, r) {
        return None;
    }
    let centers = greedy_centers(dm, r);
    let owner = route(dm, &centers, r, k, &vec![false; dm.len()])?;
    let owner = attach_leftovers(dm, &centers, r, owner)?;
    Some(Clustering::from_assignment(dm, &centers, &owner))
}

/// Radii the approximation tries: every finite distance and its double.
///
/// Feasibility is guaranteed from twice the optimum upward, and the optimum is
/// itself a matrix entry, so including doubled entries keeps the search result
/// within a factor of two.
pub fn approx_candidates(dm: &DistanceMatrix) -> Vec<f64> {
    let base = dm.candidates();
    let mut c: Vec<f64> = base.iter().flat_map(|&v| [v, 2.0 * v]).collect();
    c.sort_by(f64::total_cmp);
    c.dedup();
    c
}

/// Binary search for the smallest radius the feasibility test accepts.
pub fn kgather_approx(dm: &DistanceMatrix, k: usize) -> Result<Clustering> {
    check_k(dm.len(), k)?;
    let cand = approx_candidates(dm);
    let mut best = kgather_feasible(dm, k, *cand.last().unwrap_or(&0.0))
        .ok_or_else(|| Error::Domain("no finite radius admits a k-gather clustering".into()))?;
    let (mut lo, mut hi) = (0usize, cand.len() - 1);
    if let Some(c) = kgather_feasible(dm, k, cand[0]) {
        return Ok(c);
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        match kgather_feasible(dm, k, cand[mid]) {
            Some(c) => {
                best = c;
                hi = mid;
            }
            None => lo = mid,
        }
    }
    Ok(best)
}

/// Clustering with the given centers at radius `r`, if one exists.
///
/// Each center keeps itself and needs `k - 1` further points within `r`;
/// every other point must lie within `r` of some center.
pub fn clustering_for_centers(dm: &DistanceMatrix, centers: &[usize], k: usize, r: f64) -> Option<Clustering> {
    let mut is_center = vec![false; dm.len()];
    for &c in centers {
        is_center[c] = true;
    }
    let mut owner = route(dm, centers, r, k - 1, &is_center)?;
    for (ci, &c) in centers.iter().enumerate() {
        owner[c] = Some(ci);
    }
    let owner = attach_leftovers(dm, centers, r, owner)?;
    Some(Clustering::from_assignment(dm, centers, &owner))
}

/// Optimal k-gather by enumerating every center set of size at most `n / k`.
pub fn kgather_exact(dm: &DistanceMatrix, k: usize) -> Result<Clustering> {
    kgather_exact_capped(dm, k, DEFAULT_EXACT_CAP)
}

pub fn kgather_exact_capped(dm: &DistanceMatrix, k: usize, cap: usize) -> Result<Clustering> {
    let n = dm.len();
    check_k(n, k)?;
    if n > cap {
        return Err(Error::SizeGuard(format!("exact k-gather enumerates 2^n center sets; n = {n} exceeds cap {cap}")));
    }
    let cand = dm.candidates();
    let mut best: Option<Clustering> = None;
    for mask in 1u32..(1u32 << n) {
        let size = mask.count_ones() as usize;
        if size * k > n {
            continue;
        }
        let centers: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
        let floor = (0..n)
            .map(|v| centers.iter().map(|&c| dm.get(v, c)).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max);
        let bound = best.as_ref().map_or(f64::INFINITY, |b| b.radius);
        if !(floor < bound) {
            continue;
        }
        let start = cand.partition_point(|&c| c < floor);
        let end = cand.partition_point(|&c| c < bound);
        if start >= end {
            continue;
        }
        let Some(mut found) = clustering_for_centers(dm, &centers, k, cand[end - 1]) else {
            continue;
        };
        let (mut lo, mut hi) = (start, end - 1);
        while lo < hi {
            let mid = lo + (hi - lo) / 2;
            match clustering_for_centers(dm, &centers, k, cand[mid]) {
                Some(c) => {
                    found = c;
                    hi = mid;
                }
                None => lo = mid + 1,
            }
        }
        best = Some(found);
    }
    best.ok_or_else(|| Error::Domain("no finite radius admits a k-gather clustering".into()))
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::symbols::SymbolTrajectory;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    pub(crate) fn random_planar(n: usize, seed: u64) -> DistanceMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pts: Vec<(f64, f64)> = (0..n).map(|_| (rng.gen_range(0.0..10.0), rng.gen_range(0.0..10.0))).collect();
        DistanceMatrix::from_fn(n, |i, j| ((pts[i].0 - pts[j].0).powi(2) + (pts[i].1 - pts[j].1).powi(2)).sqrt()).unwrap()
    }

    /// Whether each center can take `k` distinct points within `r`, by backtracking.
    fn assign_brute(dm: &DistanceMatrix, centers: &[usize], k: usize, r: f64) -> bool {
        fn go(dm: &DistanceMatrix, centers: &[usize], k: usize, r: f64, slot: usize, from: usize, used: &mut [bool]) -> bool {
            if slot == centers.len() * k {
                return true;
            }
            let c = centers[slot / k];
            let first = if slot % k == 0 { 0 } else { from };
            for v in first..dm.len() {
                if !used[v] && dm.get(c, v) <= r {
                    used[v] = true;
                    if go(dm, centers, k, r, slot + 1, v + 1, used) {
                        return true;
                    }
                    used[v] = false;
                }
            }
            false
        }
        go(dm, centers, k, r, 0, 0, &mut vec![false; dm.len()])
    }

    #[test]
    fn matrix_validation() {
        assert!(DistanceMatrix::new(vec![vec![0.0, 1.0], vec![2.0, 0.0]]).is_err());
        assert!(DistanceMatrix::new(vec![vec![1.0]]).is_err());
        assert!(DistanceMatrix::new(vec![vec![0.0, -1.0], vec![-1.0, 0.0]]).is_err());
        assert!(DistanceMatrix::new(vec![vec![0.0, f64::NAN], vec![f64::NAN, 0.0]]).is_err());
        assert!(DistanceMatrix::new(vec![vec![0.0, f64::INFINITY], vec![f64::INFINITY, 0.0]]).is_ok());
    }

    #[test]
    fn pairwise_small_cases() {
        let one = Dataset::Symbolic(vec![("a".into(), SymbolTrajectory::from_chars("ab").unwrap())]);
        assert_eq!(pairwise_distances(&one, &Measure::Edit).unwrap().rows(), vec![vec![0.0]]);
        let words = ["abc", "abd", "bca", "aaaa", "cd"];
        let ds = Dataset::Symbolic(
            words.iter().map(|w| (w.to_string(), SymbolTrajectory::from_chars(w).unwrap())).collect(),
        );
        let dm = pairwise_distances(&ds, &Measure::Edit).unwrap();
        for i in 0..5 {
            for j in 0..5 {
                let (a, b) = (SymbolTrajectory::from_chars(words[i]).unwrap(), SymbolTrajectory::from_chars(words[j]).unwrap());
                assert_eq!(dm.get(i, j), Measure::Edit.symbolic(&a, &b).unwrap());
            }
        }
        assert!(matches!(pairwise_distances(&ds, &Measure::Dtw), Err(Error::Config(_))));
    }

    #[test]
    fn trivial_instances() {
        let zero = DistanceMatrix::from_fn(3, |_, _| 0.0).unwrap();
        let c = kgather_feasible(&zero, 3, 0.0).unwrap();
        assert_eq!((c.radius, c.clusters.len()), (0.0, 1));
        assert_eq!(kgather_approx(&zero, 3).unwrap().radius, 0.0);

        let blocks = DistanceMatrix::from_fn(6, |i, j| if i / 3 == j / 3 { 1.0 } else { 100.0 }).unwrap();
        let c = kgather_feasible(&blocks, 3, 1.0).unwrap();
        assert_eq!(c.clusters.len(), 2);
        c.validate(&blocks, 3).unwrap();
        assert_eq!(kgather_exact(&blocks, 3).unwrap().radius, 1.0);

        let line = DistanceMatrix::from_fn(3, |i, j| (i as f64 - j as f64).abs()).unwrap();
        let c = kgather_approx(&line, 3).unwrap();
        assert_eq!(c.clusters.len(), 1);
        assert_eq!(c.clusters[0].center, 0);
        let e = kgather_exact(&line, 3).unwrap();
        assert_eq!((e.radius, e.clusters[0].center), (1.0, 1));

        assert!(matches!(kgather_approx(&line, 4), Err(Error::Argument(_))));
        assert!(matches!(kgather_approx(&line, 0), Err(Error::Argument(_))));
        assert!(matches!(kgather_exact(&random_planar(17, 1), 2), Err(Error::SizeGuard(_))));
    }

    #[test]
    fn infinite_distances() {
        let dm = DistanceMatrix::from_fn(4, |i, j| if i / 2 == j / 2 { 2.0 } else { f64::INFINITY }).unwrap();
        assert_eq!(kgather_approx(&dm, 2).unwrap().radius, 2.0);
        assert!(matches!(kgather_approx(&dm, 3), Err(Error::Domain(_))));
        assert!(matches!(kgather_exact(&dm, 3), Err(Error::Domain(_))));
    }

    #[test]
    fn flow_matches_brute_assignment() {
        for seed in 0..50 {
            let dm = random_planar(8, seed);
            for k in 2..=3 {
                for &r in &dm.candidates() {
                    if !dense_enough(&dm, k, r) {
                        assert!(kgather_feasible(&dm, k, r).is_none());
                        continue;
                    }
                    let centers = greedy_centers(&dm, r);
                    let flow = kgather_feasible(&dm, k, r);
                    assert_eq!(flow.is_some(), assign_brute(&dm, &centers, k, r), "seed {seed} k {k} r {r}");
                    if let Some(c) = flow {
                        c.validate(&dm, k).unwrap();
                        assert!(c.radius <= r);
                    }
                }
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]
        #[test]
        fn approx_within_factor_two(n in 2usize..=9, k in 1usize..=3, seed in any::<u64>()) {
            prop_assume!(k <= n);
            let dm = random_planar(n, seed);
            let a = kgather_approx(&dm, k).unwrap();
            let e = kgather_exact(&dm, k).unwrap();
            a.validate(&dm, k).unwrap();
            e.validate(&dm, k).unwrap();
            prop_assert!(e.radius <= a.radius);
            prop_assert!(a.radius <= 2.0 * e.radius);
            for &r in approx_candidates(&dm).iter().filter(|&&r| r >= 2.0 * e.radius) {
                prop_assert!(kgather_feasible(&dm, k, r).is_some());
            }
        }

        #[test]
        fn exact_is_minimal(n in 2usize..=6, k in 1usize..=3, seed in any::<u64>()) {
            prop_assume!(k <= n);
            let dm = random_planar(n, seed);
            let e = kgather_exact(&dm, k).unwrap();
            // No owner function over all points does better.
            let mut best = f64::INFINITY;
            let total = n.pow(n as u32);
            for code in 0..total {
                let owner: Vec<usize> = (0..n).scan(code, |c, _| { let d = *c % n; *c /= n; Some(d) }).collect();
                if (0..n).any(|v| owner[v] != v && owner[owner[v]] != owner[v]) { continue; }
                let centers: Vec<usize> = (0..n).filter(|&v| owner[v] == v).collect();
                if centers.iter().any(|&c| owner.iter().filter(|&&o| o == c).count() < k) { continue; }
                best = best.min((0..n).map(|v| dm.get(v, owner[v])).fold(0.0, f64::max));
            }
            prop_assert_eq!(e.radius, best);
        }
    }
}
