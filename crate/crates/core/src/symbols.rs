//! String representations of trajectories over a labeled planar decomposition.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::trajectory::TimedTrajectory;

/// A trajectory written as the sequence of location symbols it visits.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SymbolTrajectory {
    symbols: Vec<String>,
}

impl SymbolTrajectory {
    pub fn new<S: Into<String>>(symbols: impl IntoIterator<Item = S>) -> Result<Self> {
        let symbols: Vec<String> = symbols.into_iter().map(Into::into).collect();
        if symbols.is_empty() {
            return Err(Error::Validation("symbol trajectory is empty".into()));
        }
        Ok(Self { symbols })
    }

    /// One symbol per character, e.g. `"abc"` becomes `[a, b, c]`.
    pub fn from_chars(s: &str) -> Result<Self> {
        Self::new(s.chars().map(String::from))
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
}

impl std::fmt::Display for SymbolTrajectory {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.symbols.join(" "))
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Layout {
    Grid {
        origin: Point,
        cell: f64,
        cols: usize,
        rows: usize,
    },
    Regions {
        polygons: Vec<Vec<Point>>,
    },
}

/// Labeled convex regions covering an axis-aligned bounding box.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanarDecomposition {
    labels: Vec<String>,
    min: Point,
    max: Point,
    layout: Layout,
}

fn cross(o: &Point, a: &Point, b: &Point) -> f64 {
    (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)
}

fn signed_area(poly: &[Point]) -> f64 {
    let n = poly.len();
    (0..n)
        .map(|i| {
            let (p, q) = (poly[i], poly[(i + 1) % n]);
            p.x * q.y - q.x * p.y
        })
        .sum::<f64>()
        / 2.0
}

/// True when the interiors of two convex counter-clockwise polygons overlap.
fn interiors_overlap(a: &[Point], b: &[Point], tol: f64) -> bool {
    for poly in [a, b] {
        let n = poly.len();
        for i in 0..n {
            let (p, q) = (poly[i], poly[(i + 1) % n]);
            let len = p.dist(&q);
            let side = |r: &Point| cross(&p, &q, r) / len;
            let a_min = a.iter().map(side).fold(f64::INFINITY, f64::min);
            let a_max = a.iter().map(side).fold(f64::NEG_INFINITY, f64::max);
            let b_min = b.iter().map(side).fold(f64::INFINITY, f64::min);
            let b_max = b.iter().map(side).fold(f64::NEG_INFINITY, f64::max);
            if a_max <= b_min + tol || b_max <= a_min + tol {
                return false;
            }
        }
    }
    true
}

impl PlanarDecomposition {
    /// A `cols x rows` grid of square cells labeled `c{col}_{row}`.
    pub fn grid(origin: Point, cell: f64, cols: usize, rows: usize) -> Result<Self> {
        let labels = (0..rows)
            .flat_map(|r| (0..cols).map(move |c| format!("c{c}_{r}")))
            .collect();
        Self::grid_with_labels(origin, cell, cols, rows, labels)
    }

    /// Grid with explicit labels in row-major order (row 0 at the bottom).
    pub fn grid_with_labels(
        origin: Point,
        cell: f64,
        cols: usize,
        rows: usize,
        labels: Vec<String>,
    ) -> Result<Self> {
        if !(cell > 0.0 && cell.is_finite()) || !origin.is_finite() {
            return Err(Error::Validation("grid cell size must be positive and finite".into()));
        }
        if cols == 0 || rows == 0 {
            return Err(Error::Validation("grid needs at least one cell".into()));
        }
        if labels.len() != cols * rows {
            return Err(Error::Validation(format!(
                "expected {} labels, got {}",
                cols * rows,
                labels.len()
            )));
        }
        check_unique(&labels)?;
        Ok(Self {
            labels,
            min: origin,
            max: Point::new(origin.x + cell * cols as f64, origin.y + cell * rows as f64),
            layout: Layout::Grid { origin, cell, cols, rows },
        })
    }

    /// Explicit convex polygons that must tile the box `[min, max]`.
    pub fn regions(min: Point, max: Point, regions: Vec<(String, Vec<Point>)>) -> Result<Self> {
        if !(max.x > min.x && max.y > min.y) {
            return Err(Error::Validation("bounding box is empty".into()));
        }
        let scale = (max.x - min.x).max(max.y - min.y);
        let tol = 1e-9 * scale;
        let mut labels = Vec::with_capacity(regions.len());
        let mut polygons = Vec::with_capacity(regions.len());
        let mut total = 0.0;
        for (label, mut poly) in regions {
            if poly.len() < 3 {
                return Err(Error::Validation(format!("region {label:?} has fewer than 3 vertices")));
            }
            if signed_area(&poly) < 0.0 {
                poly.reverse();
            }
            let n = poly.len();
            let convex = (0..n).all(|i| cross(&poly[i], &poly[(i + 1) % n], &poly[(i + 2) % n]) >= -tol * scale);
            if !convex {
                return Err(Error::Validation(format!("region {label:?} is not convex")));
            }
            if poly.iter().any(|p| {
                p.x < min.x - tol || p.x > max.x + tol || p.y < min.y - tol || p.y > max.y + tol
            }) {
                return Err(Error::Validation(format!("region {label:?} leaves the bounding box")));
            }
            total += signed_area(&poly);
            labels.push(label);
            polygons.push(poly);
        }
        check_unique(&labels)?;
        for i in 0..polygons.len() {
            for j in i + 1..polygons.len() {
                if interiors_overlap(&polygons[i], &polygons[j], tol) {
                    return Err(Error::Validation(format!(
                        "regions {:?} and {:?} overlap",
                        labels[i], labels[j]
                    )));
                }
            }
        }
        let box_area = (max.x - min.x) * (max.y - min.y);
        if (total - box_area).abs() > 1e-9 * box_area {
            return Err(Error::Validation(format!(
                "regions cover area {total} of a {box_area} bounding box"
            )));
        }
        Ok(Self {
            labels,
            min,
            max,
            layout: Layout::Regions { polygons },
        })
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Length of the shortest region edge.
    pub fn shortest_edge(&self) -> f64 {
        match &self.layout {
            Layout::Grid { cell, .. } => *cell,
            Layout::Regions { polygons } => polygons
                .iter()
                .flat_map(|p| (0..p.len()).map(move |i| p[i].dist(&p[(i + 1) % p.len()])))
                .filter(|&l| l > 0.0)
                .fold(f64::INFINITY, f64::min),
        }
    }

    /// Index of the region containing `p`.
    pub fn locate(&self, p: &Point) -> Result<usize> {
        if p.x < self.min.x || p.x > self.max.x || p.y < self.min.y || p.y > self.max.y {
            return Err(Error::Domain(format!(
                "point ({}, {}) lies outside the decomposition extent",
                p.x, p.y
            )));
        }
        match &self.layout {
            Layout::Grid { origin, cell, cols, rows } => {
                let c = (((p.x - origin.x) / cell).floor() as usize).min(cols - 1);
                let r = (((p.y - origin.y) / cell).floor() as usize).min(rows - 1);
                Ok(r * cols + c)
            }
            Layout::Regions { polygons } => {
                let scale = (self.max.x - self.min.x).max(self.max.y - self.min.y);
                let tol = 1e-9 * scale * scale;
                polygons
                    .iter()
                    .position(|poly| {
                        let n = poly.len();
                        (0..n).all(|i| cross(&poly[i], &poly[(i + 1) % n], p) >= -tol)
                    })
                    .ok_or_else(|| {
                        Error::Domain(format!("point ({}, {}) is in no region", p.x, p.y))
                    })
            }
        }
    }

    /// Maps a trajectory to the sequence of region labels it visits.
    ///
    /// Each segment is sub-sampled with spacing at most `step` (default:
    /// 1/100 of the shortest region edge); consecutive repeats collapse.
    pub fn map_to_string(
        &self,
        traj: &TimedTrajectory,
        step: Option<f64>,
    ) -> Result<SymbolTrajectory> {
        let step = step.unwrap_or(self.shortest_edge() / 100.0);
        if !(step > 0.0 && step.is_finite()) {
            return Err(Error::Argument(format!("sampling step must be positive, got {step}")));
        }
        let points = traj.points();
        let mut out: Vec<usize> = Vec::new();
        let mut push = |idx: usize| {
            if out.last() != Some(&idx) {
                out.push(idx);
            }
        };
        push(self.locate(&points[0])?);
        for w in points.windows(2) {
            let k = (w[0].dist(&w[1]) / step).ceil().max(1.0) as usize;
            for s in 1..=k {
                push(self.locate(&w[0].lerp(&w[1], s as f64 / k as f64))?);
            }
        }
        SymbolTrajectory::new(out.into_iter().map(|i| self.labels[i].clone()))
    }
}

fn check_unique(labels: &[String]) -> Result<()> {
    let mut seen = HashSet::new();
    for l in labels {
        if !seen.insert(l) {
            return Err(Error::Validation(format!("duplicate region label {l:?}")));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn abc_grid() -> PlanarDecomposition {
        PlanarDecomposition::grid_with_labels(
            Point::new(0.0, 0.0),
            1.0,
            3,
            1,
            vec!["A".into(), "B".into(), "C".into()],
        )
        .unwrap()
    }

    fn traj(pts: &[(f64, f64)]) -> TimedTrajectory {
        TimedTrajectory::uniform(&pts.iter().map(|&p| p.into()).collect::<Vec<_>>()).unwrap()
    }

    fn joined(s: &SymbolTrajectory) -> String {
        s.symbols().concat()
    }

    #[test]
    fn single_cell() {
        let s = abc_grid().map_to_string(&traj(&[(0.2, 0.2), (0.8, 0.7)]), None).unwrap();
        assert_eq!(joined(&s), "A");
    }

    #[test]
    fn straight_crossing() {
        let s = abc_grid().map_to_string(&traj(&[(0.1, 0.5), (2.9, 0.5)]), None).unwrap();
        assert_eq!(joined(&s), "ABC");
    }

    #[test]
    fn reentry_is_kept() {
        let s = abc_grid()
            .map_to_string(&traj(&[(0.5, 0.5), (1.5, 0.5), (0.5, 0.5)]), None)
            .unwrap();
        assert_eq!(joined(&s), "ABA");
    }

    #[test]
    fn outside_extent_is_domain_error() {
        let err = abc_grid().map_to_string(&traj(&[(0.5, 0.5), (3.5, 0.5)]), None);
        assert!(matches!(err, Err(Error::Domain(_))));
    }

    #[test]
    fn polygon_regions() {
        let tri = |l: &str, pts: &[(f64, f64)]| {
            (l.to_string(), pts.iter().map(|&p| p.into()).collect::<Vec<Point>>())
        };
        let dec = PlanarDecomposition::regions(
            Point::new(0.0, 0.0),
            Point::new(1.0, 1.0),
            vec![
                tri("L", &[(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)]),
                tri("U", &[(1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]),
            ],
        )
        .unwrap();
        let s = dec.map_to_string(&traj(&[(0.1, 0.1), (0.9, 0.9)]), None).unwrap();
        assert_eq!(joined(&s), "LU");
    }

    #[test]
    fn regions_must_cover_box() {
        let r = PlanarDecomposition::regions(
            Point::new(0.0, 0.0),
            Point::new(1.0, 1.0),
            vec![(
                "L".into(),
                vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(0.0, 1.0)],
            )],
        );
        assert!(r.is_err());
    }
}
