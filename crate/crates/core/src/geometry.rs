//! Planar points and polygonal curves.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn dist(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn lerp(&self, other: &Point, t: f64) -> Point {
        Point::new(
            self.x + (other.x - self.x) * t,
            self.y + (other.y - self.y) * t,
        )
    }
}

impl From<(f64, f64)> for Point {
    fn from((x, y): (f64, f64)) -> Self {
        Point::new(x, y)
    }
}

/// A polygonal curve given by its vertex sequence. A curve with `n + 1`
/// vertices is parameterized over `[0, n]`, affine on each `[i, i + 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyCurve {
    vertices: Vec<Point>,
}

impl PolyCurve {
    pub fn new(vertices: Vec<Point>) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::Validation("a curve needs at least one vertex".into()));
        }
        if let Some(i) = vertices.iter().position(|p| !p.is_finite()) {
            return Err(Error::Validation(format!("vertex {i} is not finite")));
        }
        Ok(Self { vertices })
    }

    pub fn from_xy(coords: &[(f64, f64)]) -> Result<Self> {
        Self::new(coords.iter().copied().map(Point::from).collect())
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Number of segments, `n` for a curve on `[0, n]`.
    pub fn segments(&self) -> usize {
        self.vertices.len() - 1
    }

    /// Point `A(s)` for `s` in `[0, n]`.
    pub fn at(&self, s: f64) -> Point {
        let n = self.segments();
        if n == 0 {
            return self.vertices[0];
        }
        let s = s.clamp(0.0, n as f64);
        let i = (s.floor() as usize).min(n - 1);
        self.vertices[i].lerp(&self.vertices[i + 1], s - i as f64)
    }

    pub fn longest_edge(&self) -> f64 {
        self.vertices
            .windows(2)
            .map(|w| w[0].dist(&w[1]))
            .fold(0.0, f64::max)
    }
}

/// Largest distance between any two vertices drawn from either curve.
pub fn diameter(a: &[Point], b: &[Point]) -> f64 {
    let all: Vec<&Point> = a.iter().chain(b.iter()).collect();
    let mut best = 0.0f64;
    for (i, p) in all.iter().enumerate() {
        for q in &all[i + 1..] {
            best = best.max(p.dist(q));
        }
    }
    best
}

/// Closest distance from `p` to the segment `a`-`b`.
pub fn point_segment_dist(p: &Point, a: &Point, b: &Point) -> f64 {
    let (dx, dy) = (b.x - a.x, b.y - a.y);
    let len2 = dx * dx + dy * dy;
    if len2 == 0.0 {
        return p.dist(a);
    }
    let t = (((p.x - a.x) * dx + (p.y - a.y) * dy) / len2).clamp(0.0, 1.0);
    p.dist(&a.lerp(b, t))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_empty_and_nan() {
        assert!(PolyCurve::new(vec![]).is_err());
        assert!(PolyCurve::new(vec![Point::new(f64::NAN, 0.0)]).is_err());
    }

    #[test]
    fn affine_parameterization() {
        let c = PolyCurve::from_xy(&[(0.0, 0.0), (2.0, 0.0), (2.0, 2.0)]).unwrap();
        assert_eq!(c.at(0.5), Point::new(1.0, 0.0));
        assert_eq!(c.at(1.5), Point::new(2.0, 1.0));
        assert_eq!(c.at(2.0), Point::new(2.0, 2.0));
        assert_eq!(c.longest_edge(), 2.0);
    }

    #[test]
    fn segment_distance() {
        let a = Point::new(0.0, 0.0);
        let b = Point::new(2.0, 0.0);
        assert_eq!(point_segment_dist(&Point::new(1.0, 1.0), &a, &b), 1.0);
        assert_eq!(point_segment_dist(&Point::new(3.0, 0.0), &a, &b), 1.0);
    }
}
