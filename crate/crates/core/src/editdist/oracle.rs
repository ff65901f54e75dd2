//! Least-cost search over the edit graph, used to check the dynamic programs.
//!
//! Nodes are strings; an edge is one insertion or one deletion priced by the
//! detour rule. Only feasible for strings of a handful of symbols.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};

use crate::error::{Error, Result};
use crate::metric::LocationMetric;
use crate::symbols::SymbolTrajectory;

use super::encode;

/// Which intermediate strings the search may visit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleScope {
    /// Interleavings of a subsequence of the source with a subsequence of
    /// the target; insertions draw only from target symbols.
    Interleavings,
    /// Any string over the whole alphabet up to `max_len` symbols.
    Unrestricted { max_len: usize },
}

#[derive(PartialEq)]
struct Entry(f64, Vec<usize>);

impl Eq for Entry {}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then_with(|| other.1.cmp(&self.1))
    }
}

/// Detour cost of `z` between padded neighbours; `None` marks an endpoint.
fn detour(m: &LocationMetric, left: Option<usize>, right: Option<usize>, z: usize) -> f64 {
    let c = match (left, right) {
        (None, None) => return f64::INFINITY,
        (Some(x), None) => m.d(x, z),
        (None, Some(y)) => m.d(z, y),
        (Some(x), Some(y)) => m.d(x, z) + m.d(z, y) - m.d(x, y),
    };
    c.max(0.0)
}

/// Whether `s` splits into a subsequence of `a` interleaved with one of `b`.
fn is_interleaving(s: &[usize], a: &[usize], b: &[usize]) -> bool {
    fn go(
        s: &[usize],
        a: &[usize],
        b: &[usize],
        p: usize,
        i: usize,
        j: usize,
        memo: &mut HashMap<(usize, usize, usize), bool>,
    ) -> bool {
        if p == s.len() {
            return true;
        }
        if let Some(&v) = memo.get(&(p, i, j)) {
            return v;
        }
        let via_a = a[i..]
            .iter()
            .position(|&x| x == s[p])
            .is_some_and(|o| go(s, a, b, p + 1, i + o + 1, j, memo));
        let v = via_a
            || b[j..]
                .iter()
                .position(|&x| x == s[p])
                .is_some_and(|o| go(s, a, b, p + 1, i, j + o + 1, memo));
        memo.insert((p, i, j), v);
        v
    }
    go(s, a, b, 0, 0, 0, &mut HashMap::new())
}

pub fn edit_graph_distance(
    a: &SymbolTrajectory,
    b: &SymbolTrajectory,
    metric: &LocationMetric,
    scope: OracleScope,
) -> Result<f64> {
    let (src, dst) = (encode(metric, a)?, encode(metric, b)?);
    if src.len() + dst.len() > 10 {
        return Err(Error::SizeGuard(format!(
            "edit-graph search is exponential; {} + {} symbols is too many",
            src.len(),
            dst.len()
        )));
    }
    let mut alphabet: Vec<usize> = match scope {
        OracleScope::Interleavings => dst.clone(),
        OracleScope::Unrestricted { .. } => (0..metric.len()).collect(),
    };
    alphabet.sort_unstable();
    alphabet.dedup();
    let max_len = match scope {
        OracleScope::Interleavings => src.len() + dst.len(),
        OracleScope::Unrestricted { max_len } => max_len.max(src.len()).max(dst.len()),
    };
    let admissible = |s: &[usize]| match scope {
        OracleScope::Interleavings => is_interleaving(s, &src, &dst),
        OracleScope::Unrestricted { .. } => s.len() <= max_len,
    };

    let mut dist: HashMap<Vec<usize>, f64> = HashMap::new();
    let mut heap = BinaryHeap::new();
    dist.insert(src.clone(), 0.0);
    heap.push(Entry(0.0, src.clone()));
    while let Some(Entry(d, s)) = heap.pop() {
        if s == dst {
            return Ok(d);
        }
        if dist.get(&s).is_some_and(|&best| d > best) {
            continue;
        }
        let mut relax = |t: Vec<usize>, c: f64, heap: &mut BinaryHeap<Entry>| {
            if !c.is_finite() {
                return;
            }
            let nd = d + c;
            if dist.get(&t).is_none_or(|&old| nd < old) {
                dist.insert(t.clone(), nd);
                heap.push(Entry(nd, t));
            }
        };
        for p in 0..s.len() {
            let left = p.checked_sub(1).map(|q| s[q]);
            let right = s.get(p + 1).copied();
            let mut t = s.clone();
            let z = t.remove(p);
            if !t.is_empty() && admissible(&t) {
                relax(t, detour(metric, left, right, z), &mut heap);
            }
        }
        if s.len() < max_len {
            for p in 0..=s.len() {
                let left = p.checked_sub(1).map(|q| s[q]);
                let right = s.get(p).copied();
                for &z in &alphabet {
                    let mut t = s.clone();
                    t.insert(p, z);
                    if admissible(&t) {
                        relax(t, detour(metric, left, right, z), &mut heap);
                    }
                }
            }
        }
    }
    Ok(f64::INFINITY)
}
