//! Decision procedures: nearest-neighbour structures, closest-pair engines
//! and the meet-in-the-middle {0,1}-coefficient lattice solver.

use std::collections::HashMap;
use std::ops::AddAssign;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use serde::Serialize;

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::instances::{BcpInstance, GapParams, Label, Lattice01Instance};
use crate::metric::{distance_value, ExactPoint, Gamma, GapThresholds, NormKind};
use crate::oracles::Witness;
use crate::reductions::reduce_lattice01_to_bcp_with;

/// Operation counts of one run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize)]
pub struct CostCounters {
    pub distance_evals: u64,
    pub structure_builds: u64,
    pub structure_queries: u64,
    pub candidates_materialized: u64,
}

impl CostCounters {
    pub fn merge(&mut self, other: &CostCounters) {
        self.distance_evals += other.distance_evals;
        self.structure_builds += other.structure_builds;
        self.structure_queries += other.structure_queries;
        self.candidates_materialized += other.candidates_materialized;
    }

    /// Value of a counter by its CSV column name.
    pub fn get(&self, name: &str) -> Option<u64> {
        match name {
            "distance_evals" => Some(self.distance_evals),
            "structure_builds" => Some(self.structure_builds),
            "structure_queries" => Some(self.structure_queries),
            "candidates_materialized" => Some(self.candidates_materialized),
            _ => None,
        }
    }
}

impl AddAssign for CostCounters {
    fn add_assign(&mut self, rhs: Self) {
        self.merge(&rhs);
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AnnStrategy {
    Linear,
    Grid,
}

impl FromStr for AnnStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "linear" => Ok(Self::Linear),
            "grid" => Ok(Self::Grid),
            other => Err(Error::Parameter(format!("unknown ANN strategy '{other}'"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Payload {
    Linear,
    Grid {
        side: BigInt,
        cells: HashMap<Vec<BigInt>, Vec<usize>>,
    },
}

/// An immutable nearest-neighbour structure over a point set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnnStructure {
    points: Vec<ExactPoint>,
    p: NormKind,
    payload: Payload,
}

fn cell_of(point: &ExactPoint, side: &BigInt) -> Vec<BigInt> {
    point.coords().iter().map(|c| c.div_floor(side)).collect()
}

/// Builds a structure. `cell_side` is required by (and only used for) the
/// grid strategy, which also requires ℓ∞.
pub fn ann_build(
    points: Vec<ExactPoint>,
    p: NormKind,
    strategy: AnnStrategy,
    cell_side: Option<&BigInt>,
    counters: &mut CostCounters,
) -> Result<AnnStructure> {
    let Some(first) = points.first() else {
        return Err(Error::Parameter("cannot build over an empty point list".into()));
    };
    let dim = first.dim();
    if let Some(bad) = points.iter().find(|q| q.dim() != dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: bad.dim(),
        });
    }
    let payload = match strategy {
        AnnStrategy::Linear => Payload::Linear,
        AnnStrategy::Grid => {
            if p != NormKind::LInf {
                return Err(Error::Unsupported(format!(
                    "grid strategy needs p = inf, got p = {}",
                    p.as_str()
                )));
            }
            let side = cell_side
                .filter(|s| *s > &BigInt::from(0))
                .ok_or_else(|| Error::Parameter("grid strategy needs a positive cell side".into()))?
                .clone();
            let mut cells: HashMap<Vec<BigInt>, Vec<usize>> = HashMap::new();
            for (i, q) in points.iter().enumerate() {
                cells.entry(cell_of(q, &side)).or_default().push(i);
            }
            Payload::Grid { side, cells }
        }
    };
    counters.structure_builds += 1;
    Ok(AnnStructure { points, p, payload })
}

impl AnnStructure {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points[0].dim()
    }

    pub fn strategy(&self) -> AnnStrategy {
        match self.payload {
            Payload::Linear => AnnStrategy::Linear,
            Payload::Grid { .. } => AnnStrategy::Grid,
        }
    }

    /// Occupied grid cells in sorted order (empty for the linear strategy).
    pub fn cells(&self) -> Vec<Vec<BigInt>> {
        let mut cells: Vec<_> = match &self.payload {
            Payload::Linear => Vec::new(),
            Payload::Grid { cells, .. } => cells.keys().cloned().collect(),
        };
        cells.sort();
        cells
    }

    pub fn query(
        &self,
        q: &ExactPoint,
        r: &BigInt,
        gamma: &Gamma,
        counters: &mut CostCounters,
    ) -> Result<Label> {
        self.query_with_stats(q, r, gamma, counters).map(|(label, _)| label)
    }

    /// Answers the query and reports how many grid cells were inspected.
    ///
    /// Both strategies answer YES only after an exact check of distance ≤ r,
    /// so every instance is decided exactly; `gamma` only matters to callers
    /// that classify the promise.
    pub fn query_with_stats(
        &self,
        q: &ExactPoint,
        r: &BigInt,
        _gamma: &Gamma,
        counters: &mut CostCounters,
    ) -> Result<(Label, u64)> {
        if q.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: q.dim(),
            });
        }
        counters.structure_queries += 1;
        let bound = r.pow(self.p.power());
        let mut hit = |i: usize| -> Result<bool> {
            counters.distance_evals += 1;
            Ok(distance_value(&self.points[i], q, self.p)? <= bound)
        };
        match &self.payload {
            Payload::Linear => {
                for i in 0..self.points.len() {
                    if hit(i)? {
                        return Ok((Label::Yes, 0));
                    }
                }
                Ok((Label::No, 0))
            }
            Payload::Grid { side, cells } => {
                if side != r {
                    return Err(Error::Parameter(format!(
                        "grid built with cell side {side} queried with r = {r}"
                    )));
                }
                let home = cell_of(q, side);
                let one = BigInt::from(1);
                let near = |cell: &[BigInt]| {
                    cell.iter()
                        .zip(&home)
                        .all(|(c, h)| (c - h).magnitude() <= one.magnitude())
                };
                // Probe the 3^d neighbourhood, or walk the occupied cells
                // when there are fewer of those.
                let neighbourhood = 3u64.checked_pow(home.len() as u32);
                let mut inspected = 0u64;
                if neighbourhood.is_some_and(|n| n <= cells.len() as u64) {
                    let mut offset = vec![-1i8; home.len()];
                    loop {
                        inspected += 1;
                        let cell: Vec<BigInt> =
                            home.iter().zip(&offset).map(|(h, o)| h + *o).collect();
                        for &i in cells.get(&cell).into_iter().flatten() {
                            if hit(i)? {
                                return Ok((Label::Yes, inspected));
                            }
                        }
                        let Some(pos) = offset.iter().position(|&o| o < 1) else {
                            break;
                        };
                        offset[pos] += 1;
                        offset[..pos].iter_mut().for_each(|o| *o = -1);
                    }
                } else {
                    let mut occupied: Vec<_> = cells.iter().filter(|(c, _)| near(c)).collect();
                    occupied.sort();
                    for (_, members) in occupied {
                        inspected += 1;
                        for &i in members {
                            if hit(i)? {
                                return Ok((Label::Yes, inspected));
                            }
                        }
                    }
                }
                Ok((Label::No, inspected))
            }
        }
    }
}

/// A built nearest-neighbour index.
pub trait AnnIndex {
    fn query(
        &self,
        q: &ExactPoint,
        r: &BigInt,
        gamma: &Gamma,
        counters: &mut CostCounters,
    ) -> Result<Label>;
}

/// Anything that builds nearest-neighbour indices for a radius/gap setting.
pub trait AnnFactory {
    type Index: AnnIndex;

    fn build(
        &self,
        points: &[ExactPoint],
        params: &GapParams,
        counters: &mut CostCounters,
    ) -> Result<Self::Index>;
}

impl AnnIndex for AnnStructure {
    fn query(
        &self,
        q: &ExactPoint,
        r: &BigInt,
        gamma: &Gamma,
        counters: &mut CostCounters,
    ) -> Result<Label> {
        AnnStructure::query(self, q, r, gamma, counters)
    }
}

impl AnnFactory for AnnStrategy {
    type Index = AnnStructure;

    fn build(
        &self,
        points: &[ExactPoint],
        params: &GapParams,
        counters: &mut CostCounters,
    ) -> Result<AnnStructure> {
        ann_build(points.to_vec(), params.p, *self, Some(&params.r), counters)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum BcpStrategy {
    #[default]
    Brute,
    Pruned,
}

impl FromStr for BcpStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "brute" => Ok(Self::Brute),
            "pruned" => Ok(Self::Pruned),
            other => Err(Error::Parameter(format!("unknown closest-pair strategy '{other}'"))),
        }
    }
}

/// Answer of a solver, with an optional certificate and its counts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolveOutcome {
    pub label: Label,
    pub witness: Option<Witness>,
    pub counters: CostCounters,
}

impl SolveOutcome {
    fn no(counters: CostCounters) -> Self {
        Self {
            label: Label::No,
            witness: None,
            counters,
        }
    }

    fn yes(witness: Witness, counters: CostCounters) -> Self {
        Self {
            label: Label::Yes,
            witness: Some(witness),
            counters,
        }
    }
}

/// Closest pair: YES with a pair at distance ≤ r if one exists, else NO.
///
/// BRUTE scans A × B row-major and stops at the first close pair. PRUNED
/// (ℓ∞ only) sorts B by first coordinate and for each a scans only the b
/// whose first coordinate is within ⌈γr⌉ of a's.
pub fn bcp_solve(inst: &BcpInstance, strategy: BcpStrategy) -> Result<SolveOutcome> {
    inst.validate()?;
    let thresholds = inst.params.thresholds();
    let mut counters = CostCounters::default();
    match strategy {
        BcpStrategy::Brute => {
            for (i, a) in inst.a.iter().enumerate() {
                for (j, b) in inst.b.iter().enumerate() {
                    counters.distance_evals += 1;
                    if thresholds.is_yes(&distance_value(a, b, inst.params.p)?) {
                        return Ok(SolveOutcome::yes(Witness::Pair { a: i, b: j }, counters));
                    }
                }
            }
            Ok(SolveOutcome::no(counters))
        }
        BcpStrategy::Pruned => {
            if inst.params.p != NormKind::LInf {
                return Err(Error::Unsupported(format!(
                    "pruned closest pair needs p = inf, got p = {}",
                    inst.params.p.as_str()
                )));
            }
            if inst.dim() == 0 {
                return bcp_solve(inst, BcpStrategy::Brute);
            }
            pruned(inst, &thresholds, counters)
        }
    }
}

fn pruned(
    inst: &BcpInstance,
    thresholds: &GapThresholds,
    mut counters: CostCounters,
) -> Result<SolveOutcome> {
    let window = inst.params.gamma.ceil_times(&inst.params.r);
    let mut order: Vec<usize> = (0..inst.b.len()).collect();
    order.sort_by(|&x, &y| inst.b[x].coords()[0].cmp(&inst.b[y].coords()[0]));
    let key = |j: usize| &inst.b[j].coords()[0];
    for (i, a) in inst.a.iter().enumerate() {
        let lo = &a.coords()[0] - &window;
        let hi = &a.coords()[0] + &window;
        let start = order.partition_point(|&j| *key(j) < lo);
        for &j in order[start..].iter().take_while(|&&j| *key(j) <= hi) {
            counters.distance_evals += 1;
            if thresholds.is_yes(&distance_value(a, &inst.b[j], NormKind::LInf)?) {
                return Ok(SolveOutcome::yes(Witness::Pair { a: i, b: j }, counters));
            }
        }
    }
    Ok(SolveOutcome::no(counters))
}

/// Meet-in-the-middle solver for SVP/CVP with {0,1} coefficients.
///
/// Materializes the half-basis combination lists, solves the resulting
/// closest-pair instances with `backend` and ORs the answers. A YES carries
/// the coefficient vector of the close pair.
pub fn svp01_mitm(inst: &Lattice01Instance, backend: BcpStrategy) -> Result<SolveOutcome> {
    svp01_mitm_with(inst, backend, &Budget::from_env())
}

pub fn svp01_mitm_with(
    inst: &Lattice01Instance,
    backend: BcpStrategy,
    budget: &Budget,
) -> Result<SolveOutcome> {
    inst.validate()?;
    if inst.rank() == 1 && !inst.is_cvp() {
        let mut counters = CostCounters {
            candidates_materialized: 1,
            distance_evals: 1,
            ..Default::default()
        };
        let norm = inst.evaluate(&[1])?;
        counters.structure_queries = 0;
        return Ok(if inst.params.thresholds().is_yes(&norm) {
            SolveOutcome::yes(Witness::Coefficients(vec![1]), counters)
        } else {
            SolveOutcome::no(counters)
        });
    }
    let reduction = reduce_lattice01_to_bcp_with(inst, budget)?;
    let mut counters = CostCounters {
        candidates_materialized: reduction
            .instances
            .iter()
            .map(|b| (b.a.len() + b.b.len()) as u64)
            .sum(),
        ..Default::default()
    };
    for (k, bcp) in reduction.instances.iter().enumerate() {
        let outcome = bcp_solve(bcp, backend)?;
        counters.merge(&outcome.counters);
        if let Some(Witness::Pair { a, b }) = outcome.witness {
            let alpha = reduction.lift_coefficients(k, a, b)?;
            return Ok(SolveOutcome::yes(Witness::Coefficients(alpha), counters));
        }
    }
    Ok(SolveOutcome::no(counters))
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;
    use crate::instances::{generate, BcpGen, GenSpec, LatticeGen};
    use crate::metric::GapSide;
    use crate::oracles::{oracle_closest_pair, oracle_lattice01};

    fn pt(c: &[i64]) -> ExactPoint {
        ExactPoint::from_i64(c).unwrap()
    }

    fn gamma(n: i64, d: i64) -> Gamma {
        Gamma::from_ratio(n, d).unwrap()
    }

    #[test]
    fn linear_and_grid_builds() {
        let mut c = CostCounters::default();
        let pts: Vec<_> = (0..5).map(|i| pt(&[i, i])).collect();
        let s = ann_build(pts, NormKind::L1, AnnStrategy::Linear, None, &mut c).unwrap();
        assert_eq!(s.len(), 5);
        let two = BigInt::from(2);
        let g = ann_build(
            vec![pt(&[0, 0]), pt(&[3, 3])],
            NormKind::LInf,
            AnnStrategy::Grid,
            Some(&two),
            &mut c,
        )
        .unwrap();
        let cells: Vec<Vec<BigInt>> = vec![vec![0.into(), 0.into()], vec![1.into(), 1.into()]];
        assert_eq!(g.cells(), cells);
        assert_eq!(c.structure_builds, 2);
        assert!(matches!(
            ann_build(vec![pt(&[0])], NormKind::L1, AnnStrategy::Grid, Some(&two), &mut c),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn grid_floors_negative_coordinates() {
        let mut c = CostCounters::default();
        let g = ann_build(vec![pt(&[-1])], NormKind::LInf, AnnStrategy::Grid, Some(&2.into()), &mut c)
            .unwrap();
        assert_eq!(g.cells(), vec![vec![BigInt::from(-1)]]);
    }

    #[test]
    fn linear_query_boundaries() {
        let mut c = CostCounters::default();
        let s = ann_build(vec![pt(&[0, 3])], NormKind::LInf, AnnStrategy::Linear, None, &mut c)
            .unwrap();
        let q = pt(&[1, 1]);
        assert_eq!(s.query(&q, &2.into(), &gamma(2, 1), &mut c).unwrap(), Label::Yes);
        assert_eq!(s.query(&q, &1.into(), &gamma(2, 1), &mut c).unwrap(), Label::No);
        assert!(s.query(&pt(&[1]), &1.into(), &gamma(2, 1), &mut c).is_err());
    }

    #[test]
    fn grid_rejects_mismatched_radius() {
        let mut c = CostCounters::default();
        let g = ann_build(vec![pt(&[0])], NormKind::LInf, AnnStrategy::Grid, Some(&2.into()), &mut c)
            .unwrap();
        assert!(g.query(&pt(&[0]), &3.into(), &gamma(2, 1), &mut c).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(300))]

        #[test]
        fn grid_matches_linear(
            d in 1usize..=6,
            r in 1i64..6,
            raw in prop::collection::vec(prop::collection::vec(-20i64..20, 6), 1..20),
            q in prop::collection::vec(-20i64..20, 6),
        ) {
            let pts: Vec<_> = raw.iter().map(|p| pt(&p[..d])).collect();
            let q = pt(&q[..d]);
            let r = BigInt::from(r);
            let g2 = gamma(2, 1);
            let mut c = CostCounters::default();
            let lin = ann_build(pts.clone(), NormKind::LInf, AnnStrategy::Linear, None, &mut c).unwrap();
            let grid = ann_build(pts.clone(), NormKind::LInf, AnnStrategy::Grid, Some(&r), &mut c).unwrap();
            let (gl, inspected) = grid.query_with_stats(&q, &r, &g2, &mut c).unwrap();
            prop_assert_eq!(lin.query(&q, &r, &g2, &mut c).unwrap(), gl);
            prop_assert!(inspected <= 3u64.pow(d as u32));
            let exact = pts.iter().any(|p| distance_value(p, &q, NormKind::LInf).unwrap() <= r);
            prop_assert_eq!(gl == Label::Yes, exact);
        }
    }

    #[test]
    fn identical_singletons_are_close() {
        let params = GapParams::new(NormKind::LInf, 1, 7, gamma(2, 1)).unwrap();
        let inst = BcpInstance::new(params, vec![pt(&[5, 5])], vec![pt(&[5, 5])]).unwrap();
        for s in [BcpStrategy::Brute, BcpStrategy::Pruned] {
            assert_eq!(bcp_solve(&inst, s).unwrap().label, Label::Yes);
        }
    }

    #[test]
    fn planted_bcp_brute_and_pruned() {
        for seed in 0..5 {
            for label in [crate::instances::Label::Yes, crate::instances::Label::No] {
                let spec = GenSpec::Bcp(BcpGen::new(64, 4, NormKind::LInf, label));
                let inst = match generate(&spec, seed).unwrap() {
                    crate::instances::Instance::Bcp(b) => b,
                    _ => unreachable!(),
                };
                let brute = bcp_solve(&inst, BcpStrategy::Brute).unwrap();
                let pruned = bcp_solve(&inst, BcpStrategy::Pruned).unwrap();
                let oracle = oracle_closest_pair(&inst);
                let expected = if oracle.label == GapSide::Yes { Label::Yes } else { Label::No };
                assert_eq!((brute.label, pruned.label), (expected, expected));
                if expected == Label::No {
                    assert_eq!(brute.counters.distance_evals, 64 * 64);
                    assert!(pruned.counters.distance_evals <= brute.counters.distance_evals);
                }
            }
        }
        let params = GapParams::new(NormKind::L1, 1, 1, gamma(2, 1)).unwrap();
        let inst = BcpInstance::new(params, vec![pt(&[0])], vec![pt(&[9])]).unwrap();
        assert!(bcp_solve(&inst, BcpStrategy::Pruned).is_err());
    }

    fn lattice(rows: &[&[i64]], r: i64, g: Gamma) -> Lattice01Instance {
        Lattice01Instance::new(
            GapParams::new(NormKind::LInf, 1, r, g).unwrap(),
            rows.iter().map(|r| pt(r)).collect(),
            None,
        )
        .unwrap()
    }

    #[test]
    fn mitm_examples() {
        let yes = lattice(&[&[2, 0], &[-1, 3]], 2, gamma(3, 2));
        let out = svp01_mitm(&yes, BcpStrategy::Brute).unwrap();
        assert_eq!(out.label, Label::Yes);
        let Some(Witness::Coefficients(alpha)) = out.witness else { panic!() };
        assert!(yes.evaluate(&alpha).unwrap() <= 2.into());
        assert_eq!(out.counters.candidates_materialized, 6);

        let no = lattice(&[&[4, 0], &[0, 4]], 1, gamma(3, 1));
        assert_eq!(svp01_mitm(&no, BcpStrategy::Pruned).unwrap().label, Label::No);

        let single = lattice(&[&[3]], 3, gamma(2, 1));
        assert_eq!(svp01_mitm(&single, BcpStrategy::Brute).unwrap().label, Label::Yes);
        let single = lattice(&[&[3]], 2, gamma(2, 1));
        assert_eq!(svp01_mitm(&single, BcpStrategy::Brute).unwrap().label, Label::No);
    }

    #[test]
    fn mitm_planted_counter_and_oracle() {
        for seed in 0..10 {
            for (label, cvp) in [
                (crate::instances::Label::Yes, false),
                (crate::instances::Label::No, false),
                (crate::instances::Label::Yes, true),
                (crate::instances::Label::No, true),
            ] {
                let mut g = LatticeGen::new(8, NormKind::LInf, label);
                g.cvp = cvp;
                let inst = match generate(&GenSpec::Lattice01(g), seed).unwrap() {
                    crate::instances::Instance::Lattice01(l) => l,
                    _ => unreachable!(),
                };
                let out = svp01_mitm(&inst, BcpStrategy::Brute).unwrap();
                let oracle = oracle_lattice01(&inst).unwrap();
                assert_eq!(out.label == Label::Yes, oracle.label == GapSide::Yes);
                let expected = if cvp { 32 } else { 62 };
                assert_eq!(out.counters.candidates_materialized, expected);
                if let Some(Witness::Coefficients(alpha)) = &out.witness {
                    assert!(inst.params.thresholds().is_yes(&inst.evaluate(alpha).unwrap()));
                }
            }
        }
    }

    #[test]
    fn counters_merge() {
        let mut a = CostCounters {
            distance_evals: 1,
            structure_builds: 2,
            structure_queries: 3,
            candidates_materialized: 4,
        };
        a += a;
        assert_eq!(a.get("candidates_materialized"), Some(8));
        assert_eq!(a.get("nope"), None);
    }
}
