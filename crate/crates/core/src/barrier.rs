//! Gap analysis for disjointness gadgets F, G: {0,1}^d → M.
//!
//! A gadget separates disjoint pairs (S ∩ T = ∅) from intersecting ones by
//! distance. Over any metric the separation ratio is at most 3: restricting
//! to one coordinate gives F′, G′ with three disjoint pairs and one
//! intersecting pair, and the triangle inequality bounds the latter by the
//! sum of the former.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::metric::{distance_value, ExactPoint, NormKind, ScaledMagnitude};

/// A finite metric given by its full distance matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistanceTable {
    rows: Vec<Vec<BigInt>>,
}

impl DistanceTable {
    /// Accepts square, symmetric, non-negative tables with zero diagonal.
    /// The triangle inequality is checked separately by [`check_triangle`].
    pub fn new(rows: Vec<Vec<BigInt>>) -> Result<Self> {
        let n = rows.len();
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidMetric(format!(
                    "row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            if !row[i].is_zero() {
                return Err(Error::InvalidMetric(format!("nonzero diagonal at {i}")));
            }
            for (j, v) in row.iter().enumerate() {
                if v.is_negative() {
                    return Err(Error::InvalidMetric(format!("negative distance at ({i}, {j})")));
                }
                if *v != rows[j][i] {
                    return Err(Error::InvalidMetric(format!("asymmetric at ({i}, {j})")));
                }
            }
        }
        Ok(Self { rows })
    }

    pub fn from_i64(rows: &[&[i64]]) -> Result<Self> {
        Self::new(
            rows.iter()
                .map(|r| r.iter().map(|&v| BigInt::from(v)).collect())
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.rows[i][j]
    }

    pub fn rows(&self) -> &[Vec<BigInt>] {
        &self.rows
    }
}

/// The metric space a gadget maps into.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Space {
    Explicit(DistanceTable),
    /// ℓ∞ points with a shared denominator.
    LInf { scale: u64, points: Vec<ExactPoint> },
}

impl Space {
    pub fn len(&self) -> usize {
        match self {
            Space::Explicit(t) => t.len(),
            Space::LInf { points, .. } => points.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn scale(&self) -> u64 {
        match self {
            Space::Explicit(_) => 1,
            Space::LInf { scale, .. } => *scale,
        }
    }

    /// Distance numerator between two point identifiers.
    pub fn distance(&self, i: usize, j: usize) -> Result<BigInt> {
        match self {
            Space::Explicit(t) => Ok(t.get(i, j).clone()),
            Space::LInf { points, .. } => distance_value(&points[i], &points[j], NormKind::LInf),
        }
    }
}

/// `d(a, c) > d(a, b) + d(b, c)` for the returned `(a, b, c)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct TriangleViolation {
    pub a: usize,
    pub b: usize,
    pub c: usize,
}

/// First ordered triple (lexicographic) violating the triangle inequality,
/// or `None` for a metric. Norm-induced spaces are metrics by construction.
pub fn check_triangle(space: &Space) -> Option<TriangleViolation> {
    let Space::Explicit(t) = space else {
        return None;
    };
    let n = t.len();
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                if t.get(a, c) > &(t.get(a, b) + t.get(b, c)) {
                    return Some(TriangleViolation { a, b, c });
                }
            }
        }
    }
    None
}

/// F and G as tables indexed by the bitmask of S (bit i ↔ element i+1),
/// each entry a point identifier of `space`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GadgetTables {
    pub d: usize,
    pub f: Vec<usize>,
    pub g: Vec<usize>,
    pub space: Space,
}

impl GadgetTables {
    pub fn new(d: usize, f: Vec<usize>, g: Vec<usize>, space: Space) -> Result<Self> {
        if d == 0 || d >= usize::BITS as usize {
            return Err(Error::Parameter(format!("gadget dimension {d} out of range")));
        }
        for (name, table) in [("F", &f), ("G", &g)] {
            if table.len() != 1 << d {
                return Err(Error::DimensionMismatch {
                    expected: 1 << d,
                    found: table.len(),
                });
            }
            if let Some(bad) = table.iter().find(|&&p| p >= space.len()) {
                return Err(Error::Malformed(format!(
                    "{name} maps to point {bad}, but the space has {} points",
                    space.len()
                )));
            }
        }
        if let Space::LInf { points, .. } = &space {
            if let Some(first) = points.first() {
                if let Some(bad) = points.iter().find(|p| p.dim() != first.dim()) {
                    return Err(Error::DimensionMismatch {
                        expected: first.dim(),
                        found: bad.dim(),
                    });
                }
            }
        }
        Ok(Self { d, f, g, space })
    }

    /// The gadget with F and G exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            d: self.d,
            f: self.g.clone(),
            g: self.f.clone(),
            space: self.space.clone(),
        }
    }
}

/// Exact separation ratio no_min / yes_max.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Gap {
    Ratio(BigRational),
    /// yes_max = 0 < no_min.
    Infinite,
    /// yes_max = no_min = 0.
    NoGap,
}

impl Gap {
    fn from_values(yes_max: &BigInt, no_min: &BigInt) -> Self {
        match (yes_max.is_zero(), no_min.is_zero()) {
            (true, true) => Gap::NoGap,
            (true, false) => Gap::Infinite,
            _ => Gap::Ratio(BigRational::new(no_min.clone(), yes_max.clone())),
        }
    }

    /// Whether the gap exceeds the bound 3.
    pub fn exceeds_three(&self) -> bool {
        match self {
            Gap::Ratio(q) => *q > BigRational::from_integer(3.into()),
            Gap::Infinite => true,
            Gap::NoGap => false,
        }
    }

    fn rank(&self) -> u8 {
        match self {
            Gap::NoGap => 0,
            Gap::Ratio(_) => 1,
            Gap::Infinite => 2,
        }
    }
}

impl PartialOrd for Gap {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Gap {
    /// NO_GAP < every ratio < INFINITE.
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Gap::Ratio(a), Gap::Ratio(b)) => a.cmp(b),
            _ => self.rank().cmp(&other.rank()),
        }
    }
}

impl fmt::Display for Gap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gap::Ratio(q) => write!(f, "{q}"),
            Gap::Infinite => f.write_str("INFINITE"),
            Gap::NoGap => f.write_str("NO_GAP"),
        }
    }
}

/// A pair of bitmasks (S, T).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct SetPair {
    pub s: usize,
    pub t: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GapReport {
    /// Largest distance over disjoint pairs, and the first pair attaining it.
    pub yes_max: ScaledMagnitude,
    pub yes_witness: SetPair,
    /// Smallest distance over intersecting pairs, and the first attaining it.
    pub no_min: ScaledMagnitude,
    pub no_witness: SetPair,
    pub gap: Gap,
}

/// Enumerates all 4^d pairs (S, T) in row-major order of the bitmasks.
pub fn gadget_gap(g: &GadgetTables) -> Result<GapReport> {
    gadget_gap_with(g, &Budget::from_env())
}

pub fn gadget_gap_with(g: &GadgetTables, budget: &Budget) -> Result<GapReport> {
    budget.check_bits("gadget pair enumeration", g.d, budget.gadget_d)?;
    let size = 1usize << g.d;
    let mut yes: Option<(BigInt, SetPair)> = None;
    let mut no: Option<(BigInt, SetPair)> = None;
    for s in 0..size {
        for t in 0..size {
            let dist = g.space.distance(g.f[s], g.g[t])?;
            let pair = SetPair { s, t };
            if s & t == 0 {
                if yes.as_ref().is_none_or(|(m, _)| dist > *m) {
                    yes = Some((dist, pair));
                }
            } else if no.as_ref().is_none_or(|(m, _)| dist < *m) {
                no = Some((dist, pair));
            }
        }
    }
    let (yes_value, yes_witness) = yes.expect("S = T = ∅ is disjoint");
    let (no_value, no_witness) = no.expect("d ≥ 1 admits an intersecting pair");
    let scale = g.space.scale();
    Ok(GapReport {
        gap: Gap::from_values(&yes_value, &no_value),
        yes_max: ScaledMagnitude::new(yes_value, scale, 1)?,
        yes_witness,
        no_min: ScaledMagnitude::new(no_value, scale, 1)?,
        no_witness,
    })
}

/// One-coordinate restriction F′(b) = F(b·{i}), G′(b) = G(b·{i}), as point
/// identifiers, with the four distances of the bounding chain
/// D(F′(1), G′(1)) ≤ D(F′(1), G′(0)) + D(G′(0), F′(0)) + D(F′(0), G′(1)).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Restriction {
    pub coordinate: usize,
    pub f0: usize,
    pub f1: usize,
    pub g0: usize,
    pub g1: usize,
    pub d_f1_g1: BigInt,
    pub d_f1_g0: BigInt,
    pub d_f0_g0: BigInt,
    pub d_f0_g1: BigInt,
}

impl Restriction {
    fn build(g: &GadgetTables, coordinate: usize) -> Result<Self> {
        let bit = 1usize << coordinate;
        let (f0, f1, g0, g1) = (g.f[0], g.f[bit], g.g[0], g.g[bit]);
        Ok(Self {
            coordinate,
            f0,
            f1,
            g0,
            g1,
            d_f1_g1: g.space.distance(f1, g1)?,
            d_f1_g0: g.space.distance(f1, g0)?,
            d_f0_g0: g.space.distance(f0, g0)?,
            d_f0_g1: g.space.distance(f0, g1)?,
        })
    }

    /// Whether the chain inequality holds for these four points.
    pub fn chain_holds(&self) -> bool {
        self.d_f1_g1 <= &self.d_f1_g0 + &self.d_f0_g0 + &self.d_f0_g1
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BarrierCertificate {
    pub report: GapReport,
    /// gap ≤ 3 (or no gap at all).
    pub holds: bool,
    /// Present only when the bound fails; on a genuine metric this signals a
    /// bug, and the chain inequality of the restriction will be violated.
    pub counterexample: Option<Restriction>,
}

/// Certifies gap ≤ 3 for a gadget over a metric space.
pub fn verify_barrier(g: &GadgetTables) -> Result<BarrierCertificate> {
    verify_barrier_with(g, &Budget::from_env())
}

pub fn verify_barrier_with(g: &GadgetTables, budget: &Budget) -> Result<BarrierCertificate> {
    if let Some(v) = check_triangle(&g.space) {
        return Err(Error::InvalidMetric(format!(
            "triangle inequality fails: d({a},{c}) > d({a},{b}) + d({b},{c})",
            a = v.a,
            b = v.b,
            c = v.c
        )));
    }
    let report = gadget_gap_with(g, budget)?;
    let holds = !report.gap.exceeds_three();
    let counterexample = if holds {
        None
    } else {
        let w = report.no_witness;
        let coordinate = (w.s & w.t).trailing_zeros() as usize;
        Some(Restriction::build(g, coordinate)?)
    };
    Ok(BarrierCertificate {
        report,
        holds,
        counterexample,
    })
}

/// Outcome of an exhaustive gadget search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchReport {
    pub best: GapReport,
    pub gadget: GadgetTables,
    pub assignments: u64,
    /// Assignments whose gap exceeded 3; zero over any metric.
    pub exceeding_three: u64,
}

/// Cartesian power of the grid, in lexicographic order.
fn grid_points(grid: &[i64], ambient_dim: usize) -> Result<Vec<ExactPoint>> {
    let mut points: Vec<Vec<i64>> = vec![Vec::new()];
    for _ in 0..ambient_dim {
        points = points
            .into_iter()
            .flat_map(|p| {
                grid.iter().map(move |&v| {
                    let mut q = p.clone();
                    q.push(v);
                    q
                })
            })
            .collect();
    }
    points.iter().map(|p| ExactPoint::from_i64(p)).collect()
}

/// Exhaustive search over every F, G assignment of points of
/// `grid^ambient_dim` (ℓ∞, coordinates over `scale`), maximizing the gap.
/// Ties keep the first assignment in enumeration order, where F(0) varies
/// fastest and G(2^d − 1) slowest.
pub fn search_best_gadget(
    d: usize,
    grid: &[i64],
    scale: u64,
    ambient_dim: usize,
    budget: &Budget,
) -> Result<SearchReport> {
    if grid.is_empty() || ambient_dim == 0 {
        return Err(Error::Parameter("empty grid or zero ambient dimension".into()));
    }
    budget.check_bits("gadget search", d, budget.gadget_d)?;
    let points = grid_points(grid, ambient_dim)?;
    let slots = 2usize
        .checked_shl(d as u32)
        .ok_or_else(|| Error::Parameter("gadget dimension too large".into()))?;
    let total = (points.len() as u128).checked_pow(slots as u32);
    if total.is_none_or(|t| t > budget.search_assignments as u128) {
        return Err(Error::OverBudget {
            what: "gadget search",
            requested: match total {
                Some(t) => format!("{t} assignments"),
                None => format!("{}^{slots} assignments", points.len()),
            },
            cap: format!("{} assignments", budget.search_assignments),
        });
    }
    let total = total.expect("checked") as u64;

    let np = points.len();
    let mut dist = vec![0u64; np * np];
    for i in 0..np {
        for j in 0..np {
            dist[i * np + j] = distance_value(&points[i], &points[j], NormKind::LInf)?
                .try_into()
                .map_err(|_| Error::Parameter("grid distances exceed 64 bits".into()))?;
        }
    }
    let size = 1usize << d;
    let pairs = (0..size).flat_map(|s| (0..size).map(move |t| (s, t)));
    let (disjoint, intersecting): (Vec<(usize, usize)>, Vec<_>) = pairs.partition(|(s, t)| s & t == 0);

    // (yes_max, no_min) compared as gaps without building rationals.
    let better = |(y1, n1): (u64, u64), (y0, n0): (u64, u64)| -> bool {
        let rank = |y: u64, n: u64| match (y, n) {
            (0, 0) => 0,
            (0, _) => 2,
            _ => 1,
        };
        let (r1, r0) = (rank(y1, n1), rank(y0, n0));
        if r1 != r0 {
            return r1 > r0;
        }
        r1 == 1 && (n1 as u128) * (y0 as u128) > (n0 as u128) * (y1 as u128)
    };
    let exceeds = |(y, n): (u64, u64)| (y == 0 && n > 0) || n > 3 * y;

    let mut assign = vec![0usize; slots];
    let mut best: Option<((u64, u64), Vec<usize>)> = None;
    let mut exceeding_three = 0u64;
    loop {
        let (f, g) = assign.split_at(size);
        let yes = disjoint
            .iter()
            .map(|&(s, t)| dist[f[s] * np + g[t]])
            .max()
            .unwrap_or(0);
        let no = intersecting
            .iter()
            .map(|&(s, t)| dist[f[s] * np + g[t]])
            .min()
            .unwrap_or(0);
        exceeding_three += u64::from(exceeds((yes, no)));
        if best.as_ref().is_none_or(|(b, _)| better((yes, no), *b)) {
            best = Some(((yes, no), assign.clone()));
        }
        let Some(pos) = assign.iter().position(|&a| a + 1 < np) else {
            break;
        };
        assign[pos] += 1;
        assign[..pos].iter_mut().for_each(|a| *a = 0);
    }
    let (_, winner) = best.expect("at least one assignment");
    let gadget = GadgetTables::new(
        d,
        winner[..size].to_vec(),
        winner[size..].to_vec(),
        Space::LInf { scale, points },
    )?;
    Ok(SearchReport {
        best: gadget_gap_with(&gadget, budget)?,
        gadget,
        assignments: total,
        exceeding_three,
    })
}

/// JSON form of a gadget: `{"d", "f", "g", "space"}` where the space is
/// `{"kind": "linf", "scale", "points"}` or `{"kind": "explicit",
/// "distances"}`, integers as decimal strings.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GadgetRecord {
    pub d: usize,
    pub f: Vec<usize>,
    pub g: Vec<usize>,
    pub space: SpaceRecord,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum SpaceRecord {
    Linf { scale: u64, points: Vec<Vec<String>> },
    Explicit { distances: Vec<Vec<String>> },
}

fn parse_ints(rows: &[Vec<String>]) -> Result<Vec<Vec<BigInt>>> {
    rows.iter()
        .map(|r| {
            r.iter()
                .map(|v| {
                    v.parse::<BigInt>()
                        .map_err(|_| Error::Malformed(format!("bad integer '{v}'")))
                })
                .collect()
        })
        .collect()
}

fn int_strings<'a>(rows: impl Iterator<Item = &'a [BigInt]>) -> Vec<Vec<String>> {
    rows.map(|r| r.iter().map(BigInt::to_string).collect()).collect()
}

impl GadgetTables {
    pub fn from_json(text: &str) -> Result<Self> {
        let record: GadgetRecord = serde_json::from_str(text)?;
        let space = match record.space {
            SpaceRecord::Linf { scale, points } => {
                if scale == 0 {
                    return Err(Error::Malformed("scale must be positive".into()));
                }
                Space::LInf {
                    scale,
                    points: parse_ints(&points)?
                        .into_iter()
                        .map(ExactPoint::new)
                        .collect::<Result<_>>()?,
                }
            }
            SpaceRecord::Explicit { distances } => {
                Space::Explicit(DistanceTable::new(parse_ints(&distances)?)?)
            }
        };
        Self::new(record.d, record.f, record.g, space)
    }

    pub fn to_json(&self) -> Result<String> {
        let space = match &self.space {
            Space::LInf { scale, points } => SpaceRecord::Linf {
                scale: *scale,
                points: int_strings(points.iter().map(ExactPoint::coords)),
            },
            Space::Explicit(t) => SpaceRecord::Explicit {
                distances: int_strings(t.rows().iter().map(Vec::as_slice)),
            },
        };
        let record = GadgetRecord {
            d: self.d,
            f: self.f.clone(),
            g: self.g.clone(),
            space,
        };
        Ok(serde_json::to_string_pretty(&record)? + "\n")
    }
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;

    fn line(values: &[i64]) -> Vec<ExactPoint> {
        values.iter().map(|&v| ExactPoint::from_i64(&[v]).unwrap()).collect()
    }

    /// F = {0↦2/3, 1↦0}, G = {0↦1/3, 1↦1} on the line.
    fn fg_gadget() -> GadgetTables {
        GadgetTables::new(
            1,
            vec![2, 0],
            vec![1, 3],
            Space::LInf {
                scale: 3,
                points: line(&[0, 1, 2, 3]),
            },
        )
        .unwrap()
    }

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn triangle_checks() {
        let eq = Space::Explicit(DistanceTable::from_i64(&[&[0, 1, 1], &[1, 0, 1], &[1, 1, 0]]).unwrap());
        assert_eq!(check_triangle(&eq), None);
        let bad = Space::Explicit(DistanceTable::from_i64(&[&[0, 1, 3], &[1, 0, 1], &[3, 1, 0]]).unwrap());
        assert_eq!(check_triangle(&bad), Some(TriangleViolation { a: 0, b: 1, c: 2 }));
        assert!(DistanceTable::from_i64(&[&[0, 1], &[2, 0]]).is_err());
        assert!(DistanceTable::from_i64(&[&[0, -1], &[-1, 0]]).is_err());
        assert!(DistanceTable::from_i64(&[&[1]]).is_err());
        assert_eq!(check_triangle(&fg_gadget().space), None);
    }

    #[test]
    fn fg_gadget_has_gap_three() {
        let report = gadget_gap(&fg_gadget()).unwrap();
        assert_eq!(report.yes_max.value, 1.into());
        assert_eq!(report.no_min.value, 3.into());
        assert_eq!(report.no_witness, SetPair { s: 1, t: 1 });
        assert_eq!(report.gap, Gap::Ratio(q(3, 1)));
        let cert = verify_barrier(&fg_gadget()).unwrap();
        assert!(cert.holds && cert.counterexample.is_none());
    }

    #[test]
    fn constant_gadget_has_no_gap() {
        let g = GadgetTables::new(2, vec![0; 4], vec![0; 4], Space::LInf { scale: 1, points: line(&[5]) })
            .unwrap();
        let report = gadget_gap(&g).unwrap();
        assert_eq!(report.gap, Gap::NoGap);
        assert!(verify_barrier(&g).unwrap().holds);
    }

    #[test]
    fn product_gadget_keeps_gap_three() {
        // Coordinate i of F(S) is f(bit i of S), likewise for G.
        let f = [2i64, 0];
        let g = [1i64, 3];
        let mut points = Vec::new();
        let (mut ft, mut gt) = (Vec::new(), Vec::new());
        for s in 0..4usize {
            ft.push(points.len());
            points.push(ExactPoint::from_i64(&[f[s & 1], f[s >> 1]]).unwrap());
        }
        for t in 0..4usize {
            gt.push(points.len());
            points.push(ExactPoint::from_i64(&[g[t & 1], g[t >> 1]]).unwrap());
        }
        let gadget = GadgetTables::new(2, ft, gt, Space::LInf { scale: 3, points }).unwrap();
        assert_eq!(gadget_gap(&gadget).unwrap().gap, Gap::Ratio(q(3, 1)));
    }

    #[test]
    fn invalid_metric_is_rejected_before_the_bound() {
        // d(0,1) = d(1,2) = d(2,3) = 1 but d(0,3) = 5: F′ = (1, 0), G′ = (2, 3)
        // would separate with gap 5.
        let t = DistanceTable::from_i64(&[
            &[0, 1, 1, 5],
            &[1, 0, 1, 1],
            &[1, 1, 0, 1],
            &[5, 1, 1, 0],
        ])
        .unwrap();
        let g = GadgetTables::new(1, vec![1, 0], vec![2, 3], Space::Explicit(t)).unwrap();
        assert_eq!(gadget_gap(&g).unwrap().gap, Gap::Ratio(q(5, 1)));
        assert!(matches!(verify_barrier(&g), Err(Error::InvalidMetric(_))));
    }

    #[test]
    fn counterexample_is_built_when_the_bound_fails() {
        let t = DistanceTable::from_i64(&[
            &[0, 1, 1, 5],
            &[1, 0, 1, 1],
            &[1, 1, 0, 1],
            &[5, 1, 1, 0],
        ])
        .unwrap();
        let g = GadgetTables::new(1, vec![1, 0], vec![2, 3], Space::Explicit(t)).unwrap();
        let cert = verify_barrier_with_unchecked(&g);
        let r = cert.counterexample.unwrap();
        assert!(!cert.holds);
        assert_eq!((r.f0, r.f1, r.g0, r.g1), (1, 0, 2, 3));
        assert!(!r.chain_holds());
    }

    fn verify_barrier_with_unchecked(g: &GadgetTables) -> BarrierCertificate {
        let report = gadget_gap(g).unwrap();
        let w = report.no_witness;
        BarrierCertificate {
            holds: false,
            counterexample: Some(Restriction::build(g, (w.s & w.t).trailing_zeros() as usize).unwrap()),
            report,
        }
    }

    #[test]
    fn search_examples() {
        let budget = Budget::default();
        let best = search_best_gadget(1, &[0, 1, 2, 3], 3, 1, &budget).unwrap();
        assert_eq!(best.assignments, 256);
        assert_eq!(best.best.gap, Gap::Ratio(q(3, 1)));
        assert_eq!(best.exceeding_three, 0);

        let two = search_best_gadget(1, &[0, 1], 1, 1, &budget).unwrap();
        assert_eq!(two.assignments, 16);
        assert!(matches!(two.best.gap, Gap::NoGap) || two.best.gap == Gap::Ratio(q(1, 1)));

        let far = search_best_gadget(1, &[0, 3], 3, 1, &budget).unwrap();
        assert_eq!(far.best.gap, Gap::Ratio(q(1, 1)));

        let tight = Budget {
            search_assignments: 100,
            ..Budget::default()
        };
        assert!(matches!(
            search_best_gadget(1, &[0, 1, 2, 3], 3, 1, &tight),
            Err(Error::OverBudget { .. })
        ));
    }

    #[test]
    fn json_round_trip() {
        let g = fg_gadget();
        let text = g.to_json().unwrap();
        assert_eq!(GadgetTables::from_json(&text).unwrap(), g);
        let t = DistanceTable::from_i64(&[&[0, 2], &[2, 0]]).unwrap();
        let e = GadgetTables::new(1, vec![0, 1], vec![1, 0], Space::Explicit(t)).unwrap();
        assert_eq!(GadgetTables::from_json(&e.to_json().unwrap()).unwrap(), e);
        assert!(GadgetTables::from_json(r#"{"d":1,"f":[0,0],"g":[0,0],"space":{"kind":"linf","scale":1,"points":[["0"]]},"x":1}"#).is_err());
        assert!(GadgetTables::from_json(r#"{"d":1,"f":[0,4],"g":[0,0],"space":{"kind":"linf","scale":1,"points":[["0"]]}}"#).is_err());
    }

    fn random_gadget() -> impl Strategy<Value = GadgetTables> {
        (1usize..=3, 1usize..=3).prop_flat_map(|(d, dim)| {
            let n = 1usize << d;
            prop::collection::vec(prop::collection::vec(0i64..=9, dim), 2 * n).prop_map(move |pts| {
                let points: Vec<_> = pts.iter().map(|p| ExactPoint::from_i64(p).unwrap()).collect();
                GadgetTables::new(d, (0..n).collect(), (n..2 * n).collect(), Space::LInf { scale: 1, points })
                    .unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn random_gadgets_respect_the_bound(g in random_gadget()) {
            let cert = verify_barrier(&g).unwrap();
            prop_assert!(cert.holds);
        }

        #[test]
        fn swapping_sides_preserves_the_gap(g in random_gadget()) {
            prop_assert_eq!(gadget_gap(&g).unwrap().gap, gadget_gap(&g.swapped()).unwrap().gap);
        }

        #[test]
        fn scaling_preserves_the_gap(g in random_gadget(), k in 1i64..7) {
            let Space::LInf { scale, points } = &g.space else { unreachable!() };
            let scaled: Vec<_> = points
                .iter()
                .map(|p| ExactPoint::new(p.coords().iter().map(|c| c * k).collect()).unwrap())
                .collect();
            let h = GadgetTables::new(g.d, g.f.clone(), g.g.clone(), Space::LInf { scale: *scale, points: scaled }).unwrap();
            let (a, b) = (gadget_gap(&g).unwrap(), gadget_gap(&h).unwrap());
            prop_assert_eq!(a.gap, b.gap);
            prop_assert_eq!(b.yes_max.value, a.yes_max.value * k);
            prop_assert_eq!(b.no_min.value, a.no_min.value * k);
        }
    }

    #[test]
    fn gap_ordering() {
        assert!(Gap::NoGap < Gap::Ratio(q(1, 2)));
        assert!(Gap::Ratio(q(3, 1)) < Gap::Infinite);
        assert!(Gap::Infinite.exceeds_three());
        assert!(!Gap::Ratio(q(3, 1)).exceeds_three());
        assert_eq!(Gap::Ratio(q(3, 1)).to_string(), "3");
    }
}
