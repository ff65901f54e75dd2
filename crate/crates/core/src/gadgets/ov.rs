//! Orthogonal-vectors instances encoded as a pair of planar point sequences
//! whose discrete Fréchet distance separates yes- from no-instances.

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::frechet::discrete_frechet_points;
use crate::geometry::{Point, PolyCurve};

/// Largest `|P| * |Q|` the verifier will run the quadratic DP on.
pub const OV_DP_GUARD: usize = 10_000_000;
/// Largest dimension for exhaustive coupling enumeration.
pub const COUPLING_MAX_D: usize = 8;

/// Upper threshold for yes-instances.
pub const YES_BOUND: f64 = 1.0;
/// Lower threshold for no-instances.
pub const NO_BOUND: f64 = 1.61;
const TOL: f64 = 1e-9;

/// The twelve fixed points the curves are assembled from.
/// Suffix `o`/`e` is the parity of the coordinate index that uses the point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GadgetPointSet {
    pub b0o: Point,
    pub b0e: Point,
    pub b1o: Point,
    pub b1e: Point,
    pub a0o: Point,
    pub a0e: Point,
    pub a1o: Point,
    pub a1e: Point,
    pub s: Point,
    pub w1: Point,
    pub w2: Point,
    pub x1: Point,
    pub x2: Point,
}

impl Default for GadgetPointSet {
    fn default() -> Self {
        let p = Point::new;
        Self {
            b0o: p(0.0, 1.61),
            b0e: p(0.0, -1.61),
            b1o: p(-1.305, 0.66),
            b1e: p(-1.305, -0.66),
            a0o: p(-0.305, 0.66),
            a0e: p(-0.305, -0.66),
            a1o: p(0.305, 0.66),
            a1e: p(0.305, -0.66),
            s: p(0.555, 0.0),
            w1: p(-0.445, 0.0),
            w2: p(0.445, 0.0),
            x1: p(-0.88, 0.90),
            x2: p(1.445, 0.0),
        }
    }
}

impl GadgetPointSet {
    /// Point for bit `bit` at 0-based coordinate `k`; `side_a` picks the `a` family.
    pub fn coordinate(&self, side_a: bool, bit: bool, k: usize) -> Point {
        let odd = k % 2 == 0;
        match (side_a, bit, odd) {
            (true, false, true) => self.a0o,
            (true, false, false) => self.a0e,
            (true, true, true) => self.a1o,
            (true, true, false) => self.a1e,
            (false, false, true) => self.b0o,
            (false, false, false) => self.b0e,
            (false, true, true) => self.b1o,
            (false, true, false) => self.b1e,
        }
    }

    pub fn named(&self) -> Vec<(&'static str, Point)> {
        vec![
            ("b0o", self.b0o),
            ("b0e", self.b0e),
            ("b1o", self.b1o),
            ("b1e", self.b1e),
            ("a0o", self.a0o),
            ("a0e", self.a0e),
            ("a1o", self.a1o),
            ("a1e", self.a1e),
            ("s", self.s),
            ("w1", self.w1),
            ("w2", self.w2),
            ("x1", self.x1),
            ("x2", self.x2),
        ]
    }

    fn by_name(&self, name: &str) -> Point {
        self.named().into_iter().find(|(n, _)| *n == name).map(|(_, p)| p).expect("known point name")
    }
}

/// A stated distance between two gadget points next to its recomputed value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistanceClaim {
    pub a: &'static str,
    pub b: &'static str,
    pub stated: f64,
    pub computed: f64,
    pub tolerance: f64,
    /// The claim is a bound (`computed >= stated`) rather than an approximation.
    pub lower_bound: bool,
    pub holds: bool,
}

/// Two-decimal claims are checked to within 0.01; the exact thresholds 1 and
/// 1.61 are checked to within 1e-9.
pub fn distance_claims(pts: &GadgetPointSet) -> Vec<DistanceClaim> {
    const R: f64 = 0.01;
    let table: &[(&str, &str, f64, f64, bool)] = &[
        ("a0o", "b0o", 1.0, TOL, false),
        ("a0o", "b1o", 1.0, TOL, false),
        ("a0e", "b0e", 1.0, TOL, false),
        ("a0e", "b1e", 1.0, TOL, false),
        ("a1o", "b1o", 1.61, TOL, false),
        ("a1e", "b1e", 1.61, TOL, false),
        ("a1o", "b0e", 1.65, R, false),
        ("a0o", "b1e", 1.65, R, false),
        ("x1", "b0e", 2.66, R, false),
        ("x1", "b1e", 1.61, R, false),
        ("x1", "w2", 1.61, R, false),
        ("x1", "b0o", 1.13, R, false),
        ("x1", "b1o", 0.49, R, false),
        ("s", "b0o", 1.70, R, false),
        ("s", "b1o", 1.97, R, false),
        ("x2", "w1", 1.89, R, false),
        ("a0o", "w1", 0.67, R, false),
        ("w2", "s", 0.11, R, false),
        ("w2", "x2", 1.0, TOL, false),
        ("w1", "s", 1.0, TOL, false),
        ("w1", "a1o", 1.0, R, false),
        ("a0e", "w2", 1.0, R, false),
        ("x1", "b1e", 1.61, 0.0, true),
        ("x1", "w2", 1.61, 0.0, true),
    ];
    table
        .iter()
        .map(|&(a, b, stated, tolerance, lower_bound)| {
            let computed = pts.by_name(a).dist(&pts.by_name(b));
            let holds = if lower_bound {
                computed >= stated - TOL
            } else {
                (computed - stated).abs() <= tolerance
            };
            DistanceClaim {
                a,
                b,
                stated,
                computed,
                tolerance,
                lower_bound,
                holds,
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OVInstance {
    pub u: Vec<Vec<bool>>,
    pub v: Vec<Vec<bool>>,
    /// Dimension before padding.
    pub original_dim: usize,
}

impl OVInstance {
    /// Pads an odd dimension with a zero coordinate.
    pub fn new(u: Vec<Vec<bool>>, v: Vec<Vec<bool>>) -> Result<Self> {
        let d = u.first().or(v.first()).map_or(0, Vec::len);
        if u.is_empty() || v.is_empty() || d == 0 {
            return Err(Error::Validation("OV instance needs nonempty vector sets of positive dimension".into()));
        }
        if u.iter().chain(&v).any(|x| x.len() != d) {
            return Err(Error::Validation(format!("all OV vectors must have dimension {d}")));
        }
        let pad = |mut x: Vec<bool>| {
            if d % 2 == 1 {
                x.push(false);
            }
            x
        };
        Ok(Self {
            u: u.into_iter().map(pad).collect(),
            v: v.into_iter().map(pad).collect(),
            original_dim: d,
        })
    }

    pub fn from_bits(u: &[&str], v: &[&str]) -> Result<Self> {
        let parse = |s: &&str| -> Result<Vec<bool>> {
            s.chars()
                .map(|c| match c {
                    '0' => Ok(false),
                    '1' => Ok(true),
                    _ => Err(Error::Validation(format!("bit vector {s:?} has a non-binary entry"))),
                })
                .collect()
        };
        Self::new(u.iter().map(parse).collect::<Result<_>>()?, v.iter().map(parse).collect::<Result<_>>()?)
    }

    pub fn random<R: Rng>(n: usize, d: usize, rng: &mut R) -> Result<Self> {
        let mut draw = || (0..n).map(|_| (0..d).map(|_| rng.gen_bool(0.5)).collect()).collect();
        let u = draw();
        let v = draw();
        Self::new(u, v)
    }

    pub fn dim(&self) -> usize {
        self.u[0].len()
    }

    /// Vectors per side; both sides must have the same count for the curve lengths to hold.
    pub fn n(&self) -> usize {
        self.u.len()
    }

    pub fn orthogonal_pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (i, a) in self.u.iter().enumerate() {
            for (j, b) in self.v.iter().enumerate() {
                if a.iter().zip(b).all(|(x, y)| !(x & y)) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    pub fn has_orthogonal_pair(&self) -> bool {
        !self.orthogonal_pairs().is_empty()
    }
}

pub fn vector_gadget(pts: &GadgetPointSet, bits: &[bool], side_a: bool) -> Vec<Point> {
    bits.iter().enumerate().map(|(k, &b)| pts.coordinate(side_a, b, k)).collect()
}

fn ov_points(inst: &OVInstance, pts: &GadgetPointSet) -> (Vec<Point>, Vec<Point>) {
    let d = inst.dim();
    let w: Vec<Point> = (0..d * (inst.v.len().saturating_sub(1)))
        .map(|k| if k % 2 == 0 { pts.a0o } else { pts.a0e })
        .collect();
    let mut p = w.clone();
    p.push(pts.x1);
    for u in &inst.u {
        p.push(pts.s);
        p.extend(vector_gadget(pts, u, true));
    }
    p.push(pts.s);
    p.push(pts.x2);
    p.extend(w);
    let mut q = Vec::new();
    for v in &inst.v {
        q.push(pts.w1);
        q.extend(vector_gadget(pts, v, false));
        q.push(pts.w2);
    }
    (p, q)
}

pub fn build_ov_curves(inst: &OVInstance) -> (PolyCurve, PolyCurve) {
    let (p, q) = ov_points(inst, &GadgetPointSet::default());
    (PolyCurve::new(p).expect("gadget points are finite"), PolyCurve::new(q).expect("gadget points are finite"))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OvReport {
    pub n: usize,
    pub dim: usize,
    pub p_len: usize,
    pub q_len: usize,
    pub has_orthogonal_pair: bool,
    pub d_f: f64,
    pub consistent: bool,
}

pub fn verify_ov_gadget(inst: &OVInstance) -> Result<OvReport> {
    let (p, q) = ov_points(inst, &GadgetPointSet::default());
    if p.len().saturating_mul(q.len()) > OV_DP_GUARD {
        return Err(Error::SizeGuard(format!(
            "discrete Fréchet DP on {} x {} points exceeds the guard of {OV_DP_GUARD}",
            p.len(),
            q.len()
        )));
    }
    let d_f = discrete_frechet_points(&p, &q);
    let has = inst.has_orthogonal_pair();
    let consistent = if has { d_f <= YES_BOUND + TOL } else { d_f >= NO_BOUND - TOL };
    Ok(OvReport {
        n: inst.n(),
        dim: inst.dim(),
        p_len: p.len(),
        q_len: q.len(),
        has_orthogonal_pair: has,
        d_f,
        consistent,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CouplingReport {
    pub dim: usize,
    pub orthogonal: bool,
    pub couplings: usize,
    pub parallel_width: f64,
    pub min_nonparallel_width: f64,
    pub holds: bool,
}

/// Enumerates every coupling of the two vector gadgets.
pub fn check_parallel_coupling_lemma(u: &[bool], v: &[bool]) -> Result<CouplingReport> {
    let d = u.len();
    if d != v.len() || d == 0 || d % 2 == 1 {
        return Err(Error::Argument("vectors must share a positive even dimension".into()));
    }
    if d > COUPLING_MAX_D {
        return Err(Error::SizeGuard(format!(
            "coupling enumeration is exponential; dimension {d} exceeds {COUPLING_MAX_D}"
        )));
    }
    let pts = GadgetPointSet::default();
    let (a, b) = (vector_gadget(&pts, u, true), vector_gadget(&pts, v, false));

    struct Walk<'a> {
        a: &'a [Point],
        b: &'a [Point],
        count: usize,
        parallel: f64,
        nonparallel: f64,
    }
    fn go(w: &mut Walk, i: usize, j: usize, width: f64, diagonal_only: bool) {
        let width = width.max(w.a[i].dist(&w.b[j]));
        let last = w.a.len() - 1;
        if i == last && j == last {
            w.count += 1;
            if diagonal_only {
                w.parallel = width;
            } else {
                w.nonparallel = w.nonparallel.min(width);
            }
            return;
        }
        if i < last && j < last {
            go(w, i + 1, j + 1, width, diagonal_only);
        }
        if i < last {
            go(w, i + 1, j, width, false);
        }
        if j < last {
            go(w, i, j + 1, width, false);
        }
    }
    let mut w = Walk {
        a: &a,
        b: &b,
        count: 0,
        parallel: f64::NAN,
        nonparallel: f64::INFINITY,
    };
    go(&mut w, 0, 0, 0.0, true);
    let orthogonal = u.iter().zip(v).all(|(x, y)| !(x & y));
    let parallel_ok = if orthogonal { w.parallel <= YES_BOUND + TOL } else { w.parallel >= NO_BOUND - TOL };
    Ok(CouplingReport {
        dim: d,
        orthogonal,
        couplings: w.count,
        parallel_width: w.parallel,
        min_nonparallel_width: w.nonparallel,
        holds: parallel_ok && w.nonparallel > NO_BOUND,
    })
}
