//! 3SAT formulas encoded as symbol trajectories on a strip of cells, so that
//! a radius-5 k-gather clustering exists exactly when the formula is satisfiable.

use std::collections::HashMap;
use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use crate::editdist::{metric_edit_distance, plain_edit_distance};
use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::io::Dataset;
use crate::kgather::{kgather_approx, Cluster, Clustering, DistanceMatrix};
use crate::metric::LocationMetric;
use crate::shingles::jaccard_distance;
use crate::symbols::SymbolTrajectory;

/// Largest variable count for brute-force satisfiability.
pub const SAT_BRUTE_FORCE_MAX_VARS: usize = 12;
/// Smallest `k` for which the neighbor-count argument goes through.
pub const HARDNESS_MIN_K: usize = 14;
pub const TARGET_RADIUS: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Literal {
    /// 0-based variable index.
    pub var: usize,
    pub positive: bool,
}

impl Literal {
    pub fn from_dimacs(x: i64) -> Option<Self> {
        (x != 0).then(|| Literal {
            var: x.unsigned_abs() as usize - 1,
            positive: x > 0,
        })
    }

    pub fn to_dimacs(self) -> i64 {
        let v = self.var as i64 + 1;
        if self.positive {
            v
        } else {
            -v
        }
    }
}

/// 3-CNF formula where each clause has three distinct variables, each
/// variable occurs at most three times and each literal in at most two clauses.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CNFFormula {
    n: usize,
    clauses: Vec<[Literal; 3]>,
}

impl CNFFormula {
    pub fn new(n: usize, clauses: Vec<Vec<Literal>>) -> Result<Self> {
        let mut out = Vec::with_capacity(clauses.len());
        let mut var_uses = vec![0usize; n];
        let mut lit_uses: HashMap<Literal, usize> = HashMap::new();
        for (ci, c) in clauses.into_iter().enumerate() {
            let c: [Literal; 3] = c
                .try_into()
                .map_err(|c: Vec<Literal>| Error::Validation(format!("clause {} has {} literals, expected 3", ci + 1, c.len())))?;
            for (x, l) in c.iter().enumerate() {
                if l.var >= n {
                    return Err(Error::Validation(format!("clause {} uses variable {} but n = {n}", ci + 1, l.var + 1)));
                }
                if c[..x].iter().any(|o| o.var == l.var) {
                    return Err(Error::Validation(format!("clause {} repeats variable {}", ci + 1, l.var + 1)));
                }
                var_uses[l.var] += 1;
                *lit_uses.entry(*l).or_default() += 1;
            }
            out.push(c);
        }
        if let Some(v) = var_uses.iter().position(|&u| u > 3) {
            return Err(Error::Validation(format!("variable {} occurs {} times (at most 3)", v + 1, var_uses[v])));
        }
        if let Some((l, u)) = lit_uses.iter().find(|(_, &u)| u > 2) {
            return Err(Error::Validation(format!("literal {} occurs in {u} clauses (at most 2)", l.to_dimacs())));
        }
        Ok(Self { n, clauses: out })
    }

    pub fn parse_dimacs(text: &str) -> Result<Self> {
        let mut header: Option<(usize, usize)> = None;
        let mut clauses = Vec::new();
        let mut current = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx as u64 + 1;
            let t = raw.trim();
            if t.is_empty() || t.starts_with('c') || t.starts_with('%') {
                continue;
            }
            if let Some(rest) = t.strip_prefix('p') {
                let f: Vec<&str> = rest.split_whitespace().collect();
                match f[..] {
                    ["cnf", n, m] => {
                        let parse = |s: &str| s.parse::<usize>().map_err(|e| Error::Parse { line, msg: format!("bad header count {s:?}: {e}") });
                        header = Some((parse(n)?, parse(m)?));
                    }
                    _ => return Err(Error::Parse { line, msg: format!("expected `p cnf <vars> <clauses>`, got {t:?}") }),
                }
                continue;
            }
            let Some((n, _)) = header else {
                return Err(Error::Parse { line, msg: "clause before the `p cnf` header".into() });
            };
            for tok in t.split_whitespace() {
                let x: i64 = tok.parse().map_err(|_| Error::Parse { line, msg: format!("bad literal {tok:?}") })?;
                match Literal::from_dimacs(x) {
                    None => clauses.push(std::mem::take(&mut current)),
                    Some(l) if l.var >= n => {
                        return Err(Error::Parse { line, msg: format!("literal {x} exceeds the {n} declared variables") })
                    }
                    Some(l) => current.push(l),
                }
            }
        }
        let Some((n, m)) = header else {
            return Err(Error::Parse { line: 0, msg: "missing `p cnf` header".into() });
        };
        if !current.is_empty() {
            clauses.push(current);
        }
        if clauses.len() != m {
            return Err(Error::Validation(format!("header declares {m} clauses, found {}", clauses.len())));
        }
        Self::new(n, clauses)
    }

    pub fn to_dimacs(&self) -> String {
        let mut s = format!("p cnf {} {}\n", self.n, self.clauses.len());
        for c in &self.clauses {
            s.push_str(&format!("{} {} {} 0\n", c[0].to_dimacs(), c[1].to_dimacs(), c[2].to_dimacs()));
        }
        s
    }

    /// Rejection-samples a valid formula; with `all_literals` every literal
    /// of every variable occurs at least once.
    pub fn random<R: Rng>(n: usize, m: usize, all_literals: bool, rng: &mut R) -> Result<Self> {
        if n < 3 || m == 0 {
            return Err(Error::Argument("random formulas need n >= 3 and m >= 1".into()));
        }
        let vars: Vec<usize> = (0..n).collect();
        for _ in 0..100_000 {
            let clauses: Vec<Vec<Literal>> = (0..m)
                .map(|_| {
                    vars.choose_multiple(rng, 3)
                        .map(|&var| Literal { var, positive: rng.gen() })
                        .collect()
                })
                .collect();
            if let Ok(f) = Self::new(n, clauses) {
                if !all_literals || f.all_literals_occur() {
                    return Ok(f);
                }
            }
        }
        Err(Error::Domain(format!("no valid formula found with n = {n}, m = {m}")))
    }

    pub fn num_vars(&self) -> usize {
        self.n
    }

    pub fn clauses(&self) -> &[[Literal; 3]] {
        &self.clauses
    }

    pub fn occurs(&self, l: Literal) -> bool {
        self.clauses.iter().any(|c| c.contains(&l))
    }

    pub fn all_literals_occur(&self) -> bool {
        (0..self.n).all(|var| [true, false].iter().all(|&positive| self.occurs(Literal { var, positive })))
    }

    pub fn satisfied_by(&self, assignment: &[bool]) -> bool {
        self.clauses.iter().all(|c| c.iter().any(|l| assignment[l.var] == l.positive))
    }

    pub fn satisfying_assignments(&self) -> Result<Vec<Vec<bool>>> {
        if self.n > SAT_BRUTE_FORCE_MAX_VARS {
            return Err(Error::SizeGuard(format!(
                "brute-force SAT over 2^{} assignments exceeds the cap of {SAT_BRUTE_FORCE_MAX_VARS} variables",
                self.n
            )));
        }
        Ok((0u32..1 << self.n)
            .map(|bits| (0..self.n).map(|i| bits >> i & 1 == 1).collect::<Vec<bool>>())
            .filter(|a| self.satisfied_by(a))
            .collect())
    }
}

impl fmt::Display for CNFFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_dimacs())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CellShape {
    Straight,
    Top,
    Bottom,
}

impl CellShape {
    fn edit_cost(self, other: CellShape) -> usize {
        match (self, other) {
            (a, b) if a == b => 0,
            (CellShape::Straight, _) | (_, CellShape::Straight) => 1,
            _ => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Role {
    Variable { var: usize, value: bool },
    Supplement { var: usize, copy: usize },
    Clause { clause: usize, copy: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct GadgetTrajectory {
    pub id: String,
    pub role: Role,
    pub shapes: Vec<CellShape>,
    pub symbols: SymbolTrajectory,
}

/// Face symbols of 1-based cell `c`: left and right rectangles, top and bottom triangles.
pub fn face_names(c: usize) -> [String; 4] {
    [format!("L{c}"), format!("R{c}"), format!("T{c}"), format!("B{c}")]
}

fn cell_symbols(c: usize, shape: CellShape) -> Vec<String> {
    let [l, r, t, b] = face_names(c);
    match shape {
        CellShape::Straight => vec![l, r],
        CellShape::Top => vec![l, t, r],
        CellShape::Bottom => vec![l, b, r],
    }
}

fn encode(shapes: &[CellShape]) -> SymbolTrajectory {
    let symbols: Vec<String> = shapes.iter().enumerate().flat_map(|(i, &s)| cell_symbols(i + 1, s)).collect();
    SymbolTrajectory::new(symbols).expect("gadget strings are nonempty")
}

/// Face centers: consecutive rectangles are 1 apart and each triangle is 1
/// from both rectangles of its cell.
pub fn face_coordinates(n: usize) -> Vec<(String, Point)> {
    let h = 3f64.sqrt() / 2.0;
    let mut out = Vec::new();
    for c in 1..=4 * n {
        let x = 2.0 * (c - 1) as f64;
        let [l, r, t, b] = face_names(c);
        out.push((l, Point::new(x, 0.0)));
        out.push((r, Point::new(x + 1.0, 0.0)));
        out.push((t, Point::new(x + 0.5, h)));
        if c > 3 * n {
            out.push((b, Point::new(x + 0.5, -h)));
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct SatGadget {
    pub formula: CNFFormula,
    pub k: usize,
    pub trajectories: Vec<GadgetTrajectory>,
    pub metric: LocationMetric,
    pub warnings: Vec<String>,
}

pub fn build_sat_gadget(f: &CNFFormula, k: usize) -> Result<SatGadget> {
    if k < 4 {
        return Err(Error::Argument(format!("gadget needs k >= 4, got {k}")));
    }
    let n = f.num_vars();
    if n == 0 {
        return Err(Error::Argument("formula has no variables".into()));
    }
    let mut warnings = Vec::new();
    if k < HARDNESS_MIN_K {
        warnings.push(format!("k = {k} is below {HARDNESS_MIN_K}; the neighbor-count argument does not apply"));
    }
    let markers = |var: usize| {
        let mut s = vec![CellShape::Straight; 4 * n];
        s[3 * var..3 * var + 3].fill(CellShape::Top);
        s
    };
    let mut trajectories = Vec::new();
    let mut push = |id: String, role: Role, shapes: Vec<CellShape>| {
        trajectories.push(GadgetTrajectory {
            id,
            role,
            symbols: encode(&shapes),
            shapes,
        })
    };
    for var in 0..n {
        for value in [true, false] {
            let mut s = markers(var);
            s[3 * n + var] = if value { CellShape::Top } else { CellShape::Bottom };
            push(format!("x{}={}", var + 1, if value { "T" } else { "F" }), Role::Variable { var, value }, s);
        }
        for copy in 0..k - 3 {
            push(format!("x{}-sup{}", var + 1, copy + 1), Role::Supplement { var, copy }, markers(var));
        }
    }
    for (ci, c) in f.clauses().iter().enumerate() {
        let mut s = vec![CellShape::Straight; 4 * n];
        for l in c {
            s[3 * n + l.var] = if l.positive { CellShape::Top } else { CellShape::Bottom };
        }
        for copy in 0..3 {
            push(format!("C{}-{}", ci + 1, copy + 1), Role::Clause { clause: ci, copy }, s.clone());
        }
    }
    Ok(SatGadget {
        formula: f.clone(),
        k,
        trajectories,
        metric: LocationMetric::from_coordinates(face_coordinates(n))?,
        warnings,
    })
}

impl SatGadget {
    pub fn expected_count(&self) -> usize {
        let n = self.formula.num_vars();
        2 * n + (self.k - 3) * n + 3 * self.formula.clauses().len()
    }

    pub fn dataset(&self) -> Dataset {
        Dataset::Symbolic(self.trajectories.iter().map(|t| (t.id.clone(), t.symbols.clone())).collect())
    }

    fn index_of(&self, role: Role) -> usize {
        self.trajectories.iter().position(|t| t.role == role).expect("role exists in gadget")
    }

    pub fn edit_matrix(&self) -> DistanceMatrix {
        let t = &self.trajectories;
        DistanceMatrix::from_fn(t.len(), |i, j| plain_edit_distance(&t[i].symbols, &t[j].symbols) as f64)
            .expect("edit distances form a valid matrix")
    }

    /// The clustering a satisfying assignment induces, or `None` when some
    /// chosen literal occurs in no clause.
    pub fn forward_clustering(&self, assignment: &[bool], dm: &DistanceMatrix) -> Option<Clustering> {
        let f = &self.formula;
        let n = f.num_vars();
        let mut clusters = Vec::with_capacity(n);
        let mut taken = vec![0usize; f.clauses().len()];
        for (var, &value) in assignment.iter().enumerate() {
            let center = self.index_of(Role::Variable { var, value });
            let mut members = vec![center, self.index_of(Role::Variable { var, value: !value })];
            members.extend((0..self.k - 3).map(|copy| self.index_of(Role::Supplement { var, copy })));
            let lit = Literal { var, positive: value };
            let ci = (0..f.clauses().len()).find(|&ci| f.clauses()[ci].contains(&lit) && taken[ci] < 3)?;
            members.push(self.index_of(Role::Clause { clause: ci, copy: taken[ci] }));
            taken[ci] += 1;
            clusters.push(Cluster { center, members });
        }
        for (ci, c) in f.clauses().iter().enumerate() {
            let var = c.iter().find(|l| assignment[l.var] == l.positive)?.var;
            for copy in taken[ci]..3 {
                clusters[var].members.push(self.index_of(Role::Clause { clause: ci, copy }));
            }
        }
        let mut radius: f64 = 0.0;
        for c in &mut clusters {
            c.members.sort_unstable();
            for &v in &c.members {
                radius = radius.max(dm.get(v, c.center));
            }
        }
        Some(Clustering { radius, clusters })
    }

    /// Metric edit distance computed cell by cell: each cell is compared
    /// exactly between the rectangle anchors of its neighbours and the costs are summed.
    pub fn anchored_metric_distance(&self, a: usize, b: usize, cache: &mut HashMap<(usize, CellShape, CellShape), f64>) -> Result<f64> {
        let cells = self.trajectories[a].shapes.len();
        let mut total = 0.0;
        for (c, (&sa, &sb)) in self.trajectories[a].shapes.iter().zip(&self.trajectories[b].shapes).enumerate() {
            if sa == sb {
                continue;
            }
            let key = (c, sa, sb);
            if let Some(&v) = cache.get(&key) {
                total += v;
                continue;
            }
            let window = |shape: CellShape| {
                let mut w = Vec::new();
                if c > 0 {
                    w.push(face_names(c)[1].clone());
                }
                w.extend(cell_symbols(c + 1, shape));
                if c + 1 < cells {
                    w.push(face_names(c + 2)[0].clone());
                }
                SymbolTrajectory::new(w).expect("window is nonempty")
            };
            let v = metric_edit_distance(&window(sa), &window(sb), &self.metric)?;
            cache.insert(key, v);
            total += v;
        }
        Ok(total)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistanceCheck {
    pub name: &'static str,
    pub expected: f64,
    pub pairs: usize,
    pub min: f64,
    pub max: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NeighborCheck {
    pub role: &'static str,
    /// `"<="` or `"="`.
    pub relation: &'static str,
    pub bound: usize,
    pub min_observed: usize,
    pub max_observed: usize,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ForwardCheck {
    pub assignment: Vec<bool>,
    pub applicable: bool,
    pub valid: bool,
    pub radius: Option<f64>,
    pub min_cluster_size: Option<usize>,
    pub jaccard_radius: Option<f64>,
    pub metric_radius: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricCellCosts {
    pub detour_vs_straight: f64,
    pub bottom_vs_straight: f64,
    pub top_vs_bottom: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SatReport {
    pub n: usize,
    pub m: usize,
    pub k: usize,
    pub warnings: Vec<String>,
    pub trajectories: usize,
    pub expected_trajectories: usize,
    pub count_ok: bool,
    pub all_literals_occur: bool,
    pub distance_checks: Vec<DistanceCheck>,
    pub neighbor_checks: Vec<NeighborCheck>,
    pub structure_ok: bool,
    pub satisfiable: bool,
    pub satisfying_assignments: usize,
    pub forward: Vec<ForwardCheck>,
    pub forward_ok: bool,
    pub jaccard_formula: f64,
    pub jaccard_max_discrepancy: Option<f64>,
    pub metric_cell_costs: MetricCellCosts,
    pub metric_ok: bool,
    pub approx_radius: f64,
}

pub fn verify_sat_gadget(f: &CNFFormula, k: usize) -> Result<SatReport> {
    let g = build_sat_gadget(f, k)?;
    let n = f.num_vars();
    let t = &g.trajectories;
    let dm = g.edit_matrix();

    let mut checks: Vec<(&'static str, f64, Vec<f64>)> = vec![
        ("supplement-variable", 1.0, vec![]),
        ("true-false", 2.0, vec![]),
        ("literal-match", 5.0, vec![]),
        ("literal-mismatch", 7.0, vec![]),
    ];
    for (i, ti) in t.iter().enumerate() {
        for (j, tj) in t.iter().enumerate() {
            let slot = match (ti.role, tj.role) {
                (Role::Supplement { var: a, .. }, Role::Variable { var: b, .. }) if a == b => Some(0),
                (Role::Variable { var: a, value: true }, Role::Variable { var: b, value: false }) if a == b => Some(1),
                (Role::Variable { var, value }, Role::Clause { clause, .. }) => {
                    let c = &f.clauses()[clause];
                    if c.contains(&Literal { var, positive: value }) {
                        Some(2)
                    } else if c.contains(&Literal { var, positive: !value }) {
                        Some(3)
                    } else {
                        None
                    }
                }
                _ => None,
            };
            if let Some(s) = slot {
                checks[s].2.push(dm.get(i, j));
            }
        }
    }
    let distance_checks: Vec<DistanceCheck> = checks
        .into_iter()
        .map(|(name, expected, v)| {
            let min = v.iter().copied().fold(f64::INFINITY, f64::min);
            let max = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            DistanceCheck {
                name,
                expected,
                pairs: v.len(),
                min,
                max,
                holds: v.iter().all(|&x| x == expected),
            }
        })
        .collect();

    let neighbors: Vec<usize> = (0..t.len())
        .map(|i| (0..t.len()).filter(|&j| j != i && dm.get(i, j) <= TARGET_RADIUS).count())
        .collect();
    let group = |role: &'static str, relation: &'static str, bound: usize, pick: fn(&Role) -> bool| {
        let obs: Vec<usize> = (0..t.len()).filter(|&i| pick(&t[i].role)).map(|i| neighbors[i]).collect();
        let (lo, hi) = (obs.iter().copied().min().unwrap_or(0), obs.iter().copied().max().unwrap_or(0));
        NeighborCheck {
            role,
            relation,
            bound,
            min_observed: lo,
            max_observed: hi,
            holds: if relation == "=" { obs.iter().all(|&x| x == bound) } else { hi <= bound },
        }
    };
    let neighbor_checks = vec![
        group("variable", "<=", k + 6, |r| matches!(r, Role::Variable { .. })),
        group("clause", "<=", 12, |r| matches!(r, Role::Clause { .. })),
        group("supplement", "=", k - 2, |r| matches!(r, Role::Supplement { .. })),
    ];
    let count_ok = t.len() == g.expected_count();
    let structure_ok = count_ok
        && distance_checks.iter().all(|c| c.holds)
        && neighbor_checks.iter().all(|c| c.holds);

    let sat = f.satisfying_assignments()?;
    let jaccard_formula = 15.0 / (8.0 * n as f64 + 10.0);
    let mut cache = HashMap::new();
    let mut forward = Vec::with_capacity(sat.len());
    for a in &sat {
        let Some(c) = g.forward_clustering(a, &dm) else {
            forward.push(ForwardCheck {
                assignment: a.clone(),
                applicable: false,
                valid: false,
                radius: None,
                min_cluster_size: None,
                jaccard_radius: None,
                metric_radius: None,
            });
            continue;
        };
        let mut jac: f64 = 0.0;
        let mut met: f64 = 0.0;
        for cl in &c.clusters {
            for &v in &cl.members {
                jac = jac.max(jaccard_distance(&t[v].symbols, &t[cl.center].symbols, 2)?);
                met = met.max(g.anchored_metric_distance(v, cl.center, &mut cache)?);
            }
        }
        forward.push(ForwardCheck {
            assignment: a.clone(),
            applicable: true,
            valid: c.validate(&dm, k).is_ok(),
            radius: Some(c.radius),
            min_cluster_size: c.clusters.iter().map(|x| x.members.len()).min(),
            jaccard_radius: Some(jac),
            metric_radius: Some(met),
        });
    }
    let forward_ok = forward.iter().all(|x| x.applicable && x.valid && x.radius == Some(TARGET_RADIUS));
    let jaccard_max_discrepancy = forward
        .iter()
        .filter_map(|x| x.jaccard_radius)
        .map(|r| (r - jaccard_formula).abs())
        .reduce(f64::max);

    let cell_cost = |c: usize, a: CellShape, b: CellShape| -> Result<f64> {
        let mut probe = g.clone();
        probe.trajectories.clear();
        for s in [a, b] {
            let mut shapes = vec![CellShape::Straight; 4 * n];
            shapes[c] = s;
            probe.trajectories.push(GadgetTrajectory {
                id: String::new(),
                role: Role::Supplement { var: 0, copy: 0 },
                symbols: encode(&shapes),
                shapes,
            });
        }
        probe.anchored_metric_distance(0, 1, &mut HashMap::new())
    };
    let last = 3 * n;
    let metric_cell_costs = MetricCellCosts {
        detour_vs_straight: cell_cost(0, CellShape::Top, CellShape::Straight)?,
        bottom_vs_straight: cell_cost(last, CellShape::Bottom, CellShape::Straight)?,
        top_vs_bottom: cell_cost(last, CellShape::Top, CellShape::Bottom)?,
    };
    let cost_matches = |x: f64, want: f64| (x - want).abs() <= 1e-9;
    let metric_ok = cost_matches(metric_cell_costs.detour_vs_straight, 1.0)
        && cost_matches(metric_cell_costs.bottom_vs_straight, 1.0)
        && cost_matches(metric_cell_costs.top_vs_bottom, 2.0)
        && forward.iter().filter_map(|x| x.metric_radius).all(|r| cost_matches(r, TARGET_RADIUS));

    let approx_radius = kgather_approx(&dm, k)?.radius;
    Ok(SatReport {
        n,
        m: f.clauses().len(),
        k,
        warnings: g.warnings.clone(),
        trajectories: t.len(),
        expected_trajectories: g.expected_count(),
        count_ok,
        all_literals_occur: f.all_literals_occur(),
        distance_checks,
        neighbor_checks,
        structure_ok,
        satisfiable: !sat.is_empty(),
        satisfying_assignments: sat.len(),
        forward,
        forward_ok,
        jaccard_formula,
        jaccard_max_discrepancy,
        metric_cell_costs,
        metric_ok,
        approx_radius,
    })
}

/// Edit distance between two shape vectors without building strings.
pub fn shape_distance(a: &[CellShape], b: &[CellShape]) -> usize {
    a.iter().zip(b).map(|(&x, &y)| x.edit_cost(y)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn lit(x: i64) -> Literal {
        Literal::from_dimacs(x).unwrap()
    }

    fn formula(n: usize, clauses: &[[i64; 3]]) -> CNFFormula {
        CNFFormula::new(n, clauses.iter().map(|c| c.iter().map(|&x| lit(x)).collect()).collect()).unwrap()
    }

    #[test]
    fn dimacs_round_trip() {
        let text = "c example\np cnf 4 2\n1 -2 3 0\n-1 2\n4 0\n";
        let f = CNFFormula::parse_dimacs(text).unwrap();
        assert_eq!(f.num_vars(), 4);
        assert_eq!(f.clauses()[1], [lit(-1), lit(2), lit(4)]);
        assert_eq!(CNFFormula::parse_dimacs(&f.to_dimacs()).unwrap(), f);
        assert!(matches!(CNFFormula::parse_dimacs("1 2 3 0\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(CNFFormula::parse_dimacs("p cnf 3 1\n1 2 x 0\n"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(CNFFormula::parse_dimacs("p cnf 3 2\n1 2 3 0\n"), Err(Error::Validation(_))));
    }

    #[test]
    fn occurrence_limits() {
        let bad = |n: usize, c: &[[i64; 3]]| CNFFormula::new(n, c.iter().map(|c| c.iter().map(|&x| lit(x)).collect()).collect());
        assert!(bad(3, &[[1, 1, 2]]).is_err());
        assert!(bad(4, &[[1, 2, 3], [1, 2, 4], [1, 3, 4]]).is_err());
        assert!(bad(5, &[[1, 2, 3], [-1, 2, 4], [-1, 3, 5], [1, 4, 5]]).is_err());
        assert!(CNFFormula::new(3, vec![vec![lit(1), lit(2)]]).is_err());
        assert!(bad(4, &[[1, 2, 3], [-1, -2, 4]]).is_ok());
    }

    #[test]
    fn brute_force_sat() {
        let f = formula(3, &[[1, 2, 3], [-1, -2, -3]]);
        assert_eq!(f.satisfying_assignments().unwrap().len(), 6);
        let big = CNFFormula::new(13, vec![]).unwrap();
        assert!(matches!(big.satisfying_assignments(), Err(Error::SizeGuard(_))));
    }

    #[test]
    fn counts_and_pair_distances() {
        let f = formula(3, &[[1, 2, 3]]);
        let g = build_sat_gadget(&f, 14).unwrap();
        assert_eq!(g.trajectories.len(), 2 * 3 + 11 * 3 + 3);
        assert_eq!(g.trajectories.len(), g.expected_count());
        let dm = g.edit_matrix();
        let id = |r| g.index_of(r);
        let t1 = id(Role::Variable { var: 0, value: true });
        let f1 = id(Role::Variable { var: 0, value: false });
        let c = id(Role::Clause { clause: 0, copy: 0 });
        assert_eq!(dm.get(t1, f1), 2.0);
        assert_eq!(dm.get(t1, c), 5.0);
        assert_eq!(dm.get(f1, c), 7.0);
        for i in 0..g.trajectories.len() {
            for j in 0..g.trajectories.len() {
                assert_eq!(dm.get(i, j), shape_distance(&g.trajectories[i].shapes, &g.trajectories[j].shapes) as f64);
            }
        }
        assert!(build_sat_gadget(&f, 3).is_err());
        assert_eq!(build_sat_gadget(&f, 6).unwrap().warnings.len(), 1);
    }

    #[test]
    fn small_gadget_count() {
        let f = CNFFormula::new(1, vec![]).unwrap();
        let g = build_sat_gadget(&f, 14).unwrap();
        assert_eq!(g.trajectories.len(), 2 + 11);
    }

    #[test]
    fn metric_geometry() {
        let g = build_sat_gadget(&formula(3, &[[1, -2, 3]]), 14).unwrap();
        let d = |a: &str, b: &str| g.metric.dist(a, b).unwrap();
        assert!((d("T1", "L1") - 1.0).abs() < 1e-12 && (d("T1", "R1") - 1.0).abs() < 1e-12);
        assert!((d("B10", "R10") - 1.0).abs() < 1e-12);
        assert!((d("R1", "L2") - 1.0).abs() < 1e-12);
    }

    #[test]
    fn satisfiable_report() {
        let f = formula(3, &[[1, 2, 3], [-1, -2, -3]]);
        let r = verify_sat_gadget(&f, 14).unwrap();
        assert!(r.count_ok && r.structure_ok && r.all_literals_occur, "{r:#?}");
        assert!(r.satisfiable && r.forward_ok);
        assert!(r.forward.iter().all(|x| x.min_cluster_size.unwrap() >= 14));
        assert!(r.jaccard_max_discrepancy.unwrap() < 1e-12);
        assert!(r.metric_ok, "{:?}", r.metric_cell_costs);
        assert!(r.approx_radius <= 10.0);
    }

    #[test]
    fn missing_literal_blocks_forward_construction() {
        let f = formula(3, &[[1, 2, 3]]);
        let r = verify_sat_gadget(&f, 14).unwrap();
        assert!(!r.all_literals_occur);
        assert!(r.forward.iter().any(|x| !x.applicable));
        assert!(r.forward.iter().filter(|x| x.applicable).all(|x| x.valid && x.radius == Some(5.0)));
    }

    #[test]
    fn random_formulas_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..20 {
            let f = CNFFormula::random(4, 3, true, &mut rng).unwrap();
            assert!(f.all_literals_occur());
            assert_eq!(CNFFormula::parse_dimacs(&f.to_dimacs()).unwrap(), f);
        }
        assert!(CNFFormula::random(2, 1, false, &mut rng).is_err());
    }
}
