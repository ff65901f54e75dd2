//! w-shingles of symbol strings and the Jaccard distance between their sets.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::symbols::SymbolTrajectory;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShingleSet {
    w: usize,
    shingles: BTreeSet<Vec<String>>,
}

impl ShingleSet {
    pub fn w(&self) -> usize {
        self.w
    }

    pub fn len(&self) -> usize {
        self.shingles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.shingles.is_empty()
    }

    pub fn contains(&self, shingle: &[String]) -> bool {
        self.shingles.contains(shingle)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Vec<String>> {
        self.shingles.iter()
    }
}

pub fn shingle_set(s: &SymbolTrajectory, w: usize) -> Result<ShingleSet> {
    if w == 0 {
        return Err(Error::Argument("shingle width must be at least 1".into()));
    }
    Ok(ShingleSet {
        w,
        shingles: s.symbols().windows(w).map(<[String]>::to_vec).collect(),
    })
}

/// `1 - |A ∩ B| / |A ∪ B|` for two shingle sets of equal width.
pub fn jaccard_of_sets(a: &ShingleSet, b: &ShingleSet) -> Result<f64> {
    if a.w != b.w {
        return Err(Error::Argument(format!("shingle widths differ: {} vs {}", a.w, b.w)));
    }
    let inter = a.shingles.intersection(&b.shingles).count();
    let union = a.len() + b.len() - inter;
    if union == 0 {
        return Err(Error::UndefinedDistance(format!(
            "both strings are shorter than the shingle width {}",
            a.w
        )));
    }
    Ok(1.0 - inter as f64 / union as f64)
}

pub fn jaccard_distance(a: &SymbolTrajectory, b: &SymbolTrajectory, w: usize) -> Result<f64> {
    jaccard_of_sets(&shingle_set(a, w)?, &shingle_set(b, w)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn s(x: &str) -> SymbolTrajectory {
        SymbolTrajectory::from_chars(x).unwrap()
    }

    fn keys(set: &ShingleSet) -> Vec<String> {
        set.iter().map(|v| v.concat()).collect()
    }

    #[test]
    fn windows_and_dedup() {
        assert_eq!(keys(&shingle_set(&s("abcd"), 2).unwrap()), ["ab", "bc", "cd"]);
        assert_eq!(keys(&shingle_set(&s("aaaa"), 2).unwrap()), ["aa"]);
        assert!(shingle_set(&s("ab"), 3).unwrap().is_empty());
        assert!(matches!(shingle_set(&s("ab"), 0), Err(Error::Argument(_))));
    }

    #[test]
    fn distances() {
        assert_eq!(jaccard_distance(&s("abc"), &s("abc"), 2).unwrap(), 0.0);
        assert_eq!(jaccard_distance(&s("abc"), &s("xyz"), 2).unwrap(), 1.0);
        assert!((jaccard_distance(&s("abc"), &s("abd"), 2).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert!(matches!(
            jaccard_distance(&s("a"), &s("b"), 2),
            Err(Error::UndefinedDistance(_))
        ));
        assert_eq!(jaccard_distance(&s("a"), &s("bc"), 2).unwrap(), 1.0);
    }

    fn word() -> impl Strategy<Value = String> {
        "[abcd]{2,8}"
    }

    proptest! {
        #[test]
        fn metric_axioms(a in word(), b in word(), c in word(), w in 1usize..3) {
            let d = |x: &str, y: &str| jaccard_distance(&s(x), &s(y), w).unwrap();
            prop_assert!((0.0..=1.0).contains(&d(&a, &b)));
            prop_assert_eq!(d(&a, &a), 0.0);
            prop_assert_eq!(d(&a, &b), d(&b, &a));
            prop_assert!(d(&a, &c) <= d(&a, &b) + d(&b, &c) + 1e-12);
        }

        #[test]
        fn window_count(a in "[abcdefgh]{0,10}", w in 1usize..4) {
            if a.is_empty() { return Ok(()); }
            let set = shingle_set(&s(&a), w).unwrap();
            prop_assert!(set.len() <= a.len().saturating_sub(w - 1));
            prop_assert!(set.iter().all(|x| x.len() == w));
        }
    }
}
