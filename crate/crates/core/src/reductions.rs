//! Instance transformations between the problems, each with provenance so
//! that answers and witnesses map back to the source instance.

use std::fmt;
use std::str::FromStr;

use fixedbitset::FixedBitSet;
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::instances::{
    BcpInstance, CnfInstance, GapParams, Instance, Lattice01Instance, Literal, OvInstance,
    SetFamilyInstance,
};
use crate::metric::{ExactPoint, Gamma, NormKind};
use crate::solvers::{AnnFactory, AnnIndex, CostCounters};

/// How the answers of the produced instances combine.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Recombination {
    Or,
    And,
    Single,
}

/// The source object a produced point or set stands for.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    /// {0,1} coefficients over the whole basis (zero outside the half).
    Coefficients(Vec<u8>),
    /// Values of the variables `first_var..first_var + values.len()`.
    PartialAssignment { first_var: usize, values: Vec<bool> },
    /// Index into the corresponding side of the source instance.
    SetIndex(usize),
}

/// Provenance of one produced instance. For closest-pair outputs `a`/`b` are
/// the A/B sides; for set families they are the supersets/subsets.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Provenance {
    pub a: Vec<Source>,
    pub b: Vec<Source>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionOutput<I> {
    pub instances: Vec<I>,
    pub recombination: Recombination,
    pub provenance: Vec<Provenance>,
}

impl<I> ReductionOutput<I> {
    /// Coefficient vector of a produced pair (A-index, B-index) of instance
    /// `k`, for lattice reductions.
    pub fn lift_coefficients(&self, k: usize, a: usize, b: usize) -> Result<Vec<u8>> {
        let prov = self.provenance.get(k).ok_or_else(|| out_of_range("instance", k))?;
        match (prov.a.get(a), prov.b.get(b)) {
            (Some(Source::Coefficients(x)), Some(Source::Coefficients(y))) => {
                Ok(x.iter().zip(y).map(|(p, q)| p + q).collect())
            }
            _ => Err(Error::Parameter(format!(
                "pair ({a}, {b}) has no coefficient provenance"
            ))),
        }
    }

    /// Full assignment of a containment pair (superset index, subset index),
    /// for the split-and-list reduction.
    pub fn lift_assignment(&self, k: usize, superset: usize, subset: usize) -> Result<Vec<bool>> {
        let prov = self.provenance.get(k).ok_or_else(|| out_of_range("instance", k))?;
        let mut parts = [prov.a.get(superset), prov.b.get(subset)];
        parts.sort_by_key(|s| match s {
            Some(Source::PartialAssignment { first_var, .. }) => *first_var,
            _ => usize::MAX,
        });
        let mut assignment = Vec::new();
        for part in parts {
            match part {
                Some(Source::PartialAssignment { values, .. }) => assignment.extend(values),
                _ => {
                    return Err(Error::Parameter(format!(
                        "pair ({superset}, {subset}) has no assignment provenance"
                    )))
                }
            }
        }
        Ok(assignment)
    }
}

fn out_of_range(what: &str, i: usize) -> Error {
    Error::Parameter(format!("{what} index {i} out of range"))
}

/// All {0,1} combinations of `vectors`, index = coefficient mask (bit i
/// selects vectors[i]); entry 0 is the origin.
fn subset_sums(vectors: &[ExactPoint], dim: usize) -> Result<Vec<ExactPoint>> {
    let mut sums = Vec::with_capacity(1 << vectors.len());
    sums.push(ExactPoint::zero(dim)?);
    for mask in 1usize..(1 << vectors.len()) {
        let low = mask.trailing_zeros() as usize;
        let next = sums[mask & (mask - 1)].add(&vectors[low])?;
        sums.push(next);
    }
    Ok(sums)
}

fn mask_coefficients(mask: usize, offset: usize, len: usize, n: usize) -> Vec<u8> {
    let mut alpha = vec![0u8; n];
    for (i, a) in alpha[offset..offset + len].iter_mut().enumerate() {
        *a = ((mask >> i) & 1) as u8;
    }
    alpha
}

/// Meet-in-the-middle split of a {0,1}-coefficient lattice instance into
/// closest-pair instances.
///
/// The basis splits into the first ⌈n/2⌉ vectors and the rest. A₀ holds
/// every {0,1} combination of the first half, B₀ the negated combinations of
/// the second half, A₁ = A₀∖{0} and B₁ = B₀∖{0}. For SVP the outputs are
/// (A₀, B₁) and (A₁, B₀), OR-combined: their difference sets together cover
/// every nonzero {0,1} combination. For CVP the single output is
/// (A₀, B₀ + t).
pub fn reduce_lattice01_to_bcp(inst: &Lattice01Instance) -> Result<ReductionOutput<BcpInstance>> {
    reduce_lattice01_to_bcp_with(inst, &Budget::from_env())
}

pub fn reduce_lattice01_to_bcp_with(
    inst: &Lattice01Instance,
    budget: &Budget,
) -> Result<ReductionOutput<BcpInstance>> {
    let n = inst.rank();
    budget.check_bits("meet-in-the-middle", n, budget.mitm_bits)?;
    if n == 1 && !inst.is_cvp() {
        return Err(Error::Unsupported(
            "rank-1 SVP has a single candidate b₁; answer it directly".into(),
        ));
    }
    let dim = inst.dim();
    let half = n.div_ceil(2);
    let (first, second) = inst.basis.split_at(half);

    let a0 = subset_sums(first, dim)?;
    let b0: Vec<ExactPoint> = subset_sums(second, dim)?.iter().map(ExactPoint::neg).collect();
    let a_src: Vec<Source> = (0..a0.len())
        .map(|m| Source::Coefficients(mask_coefficients(m, 0, half, n)))
        .collect();
    let b_src: Vec<Source> = (0..b0.len())
        .map(|m| Source::Coefficients(mask_coefficients(m, half, n - half, n)))
        .collect();
    let params = inst.params.clone();

    if let Some(t) = &inst.target {
        let shifted = b0.iter().map(|b| b.add(t)).collect::<Result<Vec<_>>>()?;
        return Ok(ReductionOutput {
            instances: vec![BcpInstance::new(params, a0, shifted)?],
            recombination: Recombination::Single,
            provenance: vec![Provenance { a: a_src, b: b_src }],
        });
    }

    let first_pair = BcpInstance::new(params.clone(), a0.clone(), b0[1..].to_vec())?;
    let second_pair = BcpInstance::new(params, a0[1..].to_vec(), b0)?;
    Ok(ReductionOutput {
        instances: vec![first_pair, second_pair],
        recombination: Recombination::Or,
        provenance: vec![
            Provenance {
                a: a_src.clone(),
                b: b_src[1..].to_vec(),
            },
            Provenance {
                a: a_src[1..].to_vec(),
                b: b_src,
            },
        ],
    })
}

/// Which side receives which coordinate table in the subset-query embedding.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum EmbeddingOrientation {
    /// Supersets get f (0 ↦ 0, 1 ↦ 2/3), subsets get g (0 ↦ 1/3, 1 ↦ 1):
    /// distance 1/3 exactly when the subset is contained in the superset.
    #[default]
    Corrected,
    /// Supersets get g and subsets get f: distance 1/3 exactly when the
    /// superset is contained in the subset.
    Literal,
}

impl FromStr for EmbeddingOrientation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "corrected" => Ok(Self::Corrected),
            "literal" => Ok(Self::Literal),
            other => Err(Error::Parameter(format!("unknown orientation '{other}'"))),
        }
    }
}

// f and g scaled by 3.
const F_TABLE: [i64; 2] = [0, 2];
const G_TABLE: [i64; 2] = [1, 3];

fn embed_set(set: &FixedBitSet, d: usize, table: [i64; 2]) -> Result<ExactPoint> {
    ExactPoint::from_i64(
        &(0..d)
            .map(|c| table[usize::from(set.contains(c))])
            .collect::<Vec<_>>(),
    )
}

/// ℓ∞ embedding of a subset query instance into closest pair at scale 3.
///
/// A holds the supersets, B the subsets, so index pairs carry over
/// unchanged. With the default orientation every cross distance is exactly
/// 1/3 (numerator 1) when the subset is contained in the superset and exactly
/// 1 (numerator 3) otherwise; r = 1/3 and γ = 3.
pub fn embed_subsetquery_to_bcp(
    inst: &SetFamilyInstance,
    orientation: EmbeddingOrientation,
) -> Result<BcpInstance> {
    inst.validate()?;
    let (sup_table, sub_table) = match orientation {
        EmbeddingOrientation::Corrected => (F_TABLE, G_TABLE),
        EmbeddingOrientation::Literal => (G_TABLE, F_TABLE),
    };
    let a = inst
        .supersets
        .iter()
        .map(|s| embed_set(s, inst.d, sup_table))
        .collect::<Result<_>>()?;
    let b = inst
        .subsets
        .iter()
        .map(|t| embed_set(t, inst.d, sub_table))
        .collect::<Result<_>>()?;
    let params = GapParams::new(NormKind::LInf, 3, 1, Gamma::integer(3)?)?;
    BcpInstance::new(params, a, b)
}

fn block_assignment(mask: usize, len: usize) -> Vec<bool> {
    // first variable of the block is the most significant bit
    (0..len).map(|i| (mask >> (len - 1 - i)) & 1 == 1).collect()
}

fn unsatisfied(clauses: &[Vec<Literal>], first_var: usize, values: &[bool], d: usize) -> FixedBitSet {
    let mut u = FixedBitSet::with_capacity(d);
    let block = first_var..first_var + values.len();
    for (ci, clause) in clauses.iter().enumerate() {
        let sat = clause
            .iter()
            .any(|l| block.contains(&l.var()) && l.satisfied_by(values[l.var() - first_var]));
        if !sat {
            u.insert(ci);
        }
    }
    u
}

/// Split-and-list: CNF satisfiability as a bichromatic subset query.
///
/// Variables split into the first ⌈n/2⌉ and the rest. A left assignment `a`
/// becomes the superset [m]∖U_L(a) and a right assignment `b` the subset
/// U_R(b), where U collects the clauses the partial assignment leaves
/// unsatisfied. The formula is satisfiable iff some subset is contained in
/// some superset. A formula with no clauses gets one padding element that
/// every superset contains and no subset does.
pub fn reduce_ksat_to_bisq(inst: &CnfInstance) -> Result<ReductionOutput<SetFamilyInstance>> {
    reduce_ksat_to_bisq_with(inst, &Budget::from_env())
}

pub fn reduce_ksat_to_bisq_with(
    inst: &CnfInstance,
    budget: &Budget,
) -> Result<ReductionOutput<SetFamilyInstance>> {
    inst.validate()?;
    let n = inst.num_vars;
    budget.check_bits("split-and-list", n, 2 * budget.oracle_bits)?;
    let left = n.div_ceil(2);
    let right = n - left;
    let m = inst.clauses.len();
    let d = m.max(1);

    let mut supersets = Vec::with_capacity(1 << left);
    let mut a_src = Vec::with_capacity(1 << left);
    for mask in 0..1usize << left {
        let values = block_assignment(mask, left);
        let mut s = unsatisfied(&inst.clauses, 0, &values, d);
        s.toggle_range(..);
        supersets.push(s);
        a_src.push(Source::PartialAssignment {
            first_var: 0,
            values,
        });
    }
    let mut subsets = Vec::with_capacity(1 << right);
    let mut b_src = Vec::with_capacity(1 << right);
    for mask in 0..1usize << right {
        let values = block_assignment(mask, right);
        subsets.push(unsatisfied(&inst.clauses, left, &values, d));
        b_src.push(Source::PartialAssignment {
            first_var: left,
            values,
        });
    }
    let family = SetFamilyInstance {
        d,
        supersets,
        subsets,
    };
    family.validate()?;
    Ok(ReductionOutput {
        instances: vec![family],
        recombination: Recombination::Single,
        provenance: vec![Provenance { a: a_src, b: b_src }],
    })
}

fn complement(bits: &FixedBitSet) -> FixedBitSet {
    let mut c = bits.clone();
    c.toggle_range(..);
    c
}

/// OV → BSQ: ⟨a, b⟩ = 0 iff supp(b) ⊆ [d]∖supp(a). A-side vectors become
/// complemented supersets, B-side vectors become subsets.
pub fn ov_to_bsq(inst: &OvInstance) -> SetFamilyInstance {
    SetFamilyInstance {
        d: inst.d,
        supersets: inst.a.iter().map(complement).collect(),
        subsets: inst.b.clone(),
    }
}

/// BSQ → OV, the inverse complementation.
pub fn bsq_to_ov(inst: &SetFamilyInstance) -> OvInstance {
    OvInstance {
        d: inst.d,
        a: inst.supersets.iter().map(complement).collect(),
        b: inst.subsets.clone(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConversionDirection {
    OvToBsq,
    BsqToOv,
}

pub fn convert_ov_bsq(direction: ConversionDirection, instance: &Instance) -> Result<Instance> {
    match (direction, instance) {
        (ConversionDirection::OvToBsq, Instance::Ov(ov)) => {
            ov.validate()?;
            Ok(ov_to_bsq(ov).into())
        }
        (ConversionDirection::BsqToOv, Instance::SubsetQuery(sq)) => {
            sq.validate()?;
            Ok(bsq_to_ov(sq).into())
        }
        (dir, other) => Err(Error::Parameter(format!(
            "{dir:?} cannot convert a '{}' instance",
            other.kind()
        ))),
    }
}

/// Result of deciding closest pair through batched nearest-neighbour
/// structures.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BatchedOutcome {
    pub label: crate::instances::Label,
    pub batches: usize,
    pub counters: CostCounters,
}

/// Closest pair from any ANN structure: A is cut into ⌈|A|/ℓ⌉ batches of at
/// most ℓ points, one structure is built per batch, and every B point
/// queries every structure. YES iff some query answers YES.
pub fn solve_bcp_via_ann<F: AnnFactory>(
    inst: &BcpInstance,
    factory: &F,
    ell: usize,
) -> Result<BatchedOutcome> {
    if ell == 0 || ell > inst.a.len() {
        return Err(Error::Parameter(format!(
            "batch size ℓ = {ell} outside 1..={}",
            inst.a.len()
        )));
    }
    let mut counters = CostCounters::default();
    let structures = inst
        .a
        .chunks(ell)
        .map(|batch| factory.build(batch, &inst.params, &mut counters))
        .collect::<Result<Vec<_>>>()?;
    let mut found = false;
    for q in &inst.b {
        for s in &structures {
            let answer = s.query(q, &inst.params.r, &inst.params.gamma, &mut counters)?;
            found |= answer == crate::instances::Label::Yes;
        }
    }
    Ok(BatchedOutcome {
        label: if found {
            crate::instances::Label::Yes
        } else {
            crate::instances::Label::No
        },
        batches: structures.len(),
        counters,
    })
}

/// `coefficient · base^exponent`, kept symbolic because rational exponents
/// make the value irrational in general.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CostTerm {
    pub coefficient: BigUint,
    pub base: u64,
    pub exponent: BigRational,
}

impl CostTerm {
    pub fn log2(&self) -> f64 {
        let coeff = self.coefficient.bits() as f64 - 1.0
            + (self.coefficient.to_f64().unwrap_or(f64::INFINITY)
                / 2f64.powi(self.coefficient.bits() as i32 - 1))
            .log2();
        coeff + self.exponent.to_f64().unwrap_or(0.0) * (self.base as f64).log2()
    }
}

impl fmt::Display for CostTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} * {}^({})", self.coefficient, self.base, self.exponent)
    }
}

/// A batch size strictly inside (N^{δ′/δ}, N^{(1−δ′)/(C−1)}).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BatchChoice {
    pub ell: u64,
    pub lower_exponent: BigRational,
    pub upper_exponent: BigRational,
    /// N · ℓ^{C−1}
    pub preprocessing: CostTerm,
    /// N² · ℓ^{−δ}
    pub query: CostTerm,
}

fn parts(e: &BigRational) -> Result<(u32, u32)> {
    let num = e.numer().to_u32();
    let den = e.denom().to_u32();
    match (num, den) {
        (Some(n), Some(d)) if n <= 4096 && d <= 4096 => Ok((n, d)),
        _ => Err(Error::Parameter(format!(
            "exponent {e} too large for exact evaluation"
        ))),
    }
}

/// ⌊N^{a/b}⌋ exactly.
fn floor_rational_power(n: &BigUint, a: u32, b: u32) -> BigUint {
    n.pow(a).nth_root(b)
}

/// Smallest integer batch size strictly between N^{δ′/δ} and
/// N^{(1−δ′)/(C−1)}, with the two cost expressions it induces.
///
/// Requires C > 1, 0 < δ < 1, 0 < δ′ < 1 and δ′/(1−δ′) < δ/(C−1); the
/// last condition is exactly δ′/δ < (1−δ′)/(C−1), i.e. a non-empty real
/// interval. All comparisons are exact integer comparisons of N^a against
/// ℓ^b.
pub fn select_batch_size(
    n: u64,
    c: &BigRational,
    delta: &BigRational,
    delta_prime: &BigRational,
) -> Result<BatchChoice> {
    let one = BigRational::one();
    if n == 0 {
        return Err(Error::Parameter("N must be positive".into()));
    }
    if *c <= one {
        return Err(Error::Parameter(format!("C = {c} must exceed 1")));
    }
    for (name, v) in [("δ", delta), ("δ′", delta_prime)] {
        if !v.is_positive() || *v >= one {
            return Err(Error::Parameter(format!("{name} = {v} must lie in (0, 1)")));
        }
    }
    let lhs = delta_prime / (&one - delta_prime);
    let rhs = delta / (c - &one);
    if lhs >= rhs {
        return Err(Error::Infeasible(format!(
            "δ′/(1−δ′) = {lhs} is not below δ/(C−1) = {rhs}"
        )));
    }
    let lower_exponent = delta_prime / delta;
    let upper_exponent = (&one - delta_prime) / (c - &one);
    let (a1, b1) = parts(&lower_exponent)?;
    let (a2, b2) = parts(&upper_exponent)?;
    if (a1.max(a2) as u64) * 64 > 1 << 20 {
        return Err(Error::Parameter("exponents too large for exact evaluation".into()));
    }
    let big_n = BigUint::from(n);
    let ell = floor_rational_power(&big_n, a1, b1) + 1u32;
    if ell.pow(b2) >= big_n.pow(a2) {
        return Err(Error::Infeasible(format!(
            "no integer strictly between {n}^({lower_exponent}) and {n}^({upper_exponent})"
        )));
    }
    let ell = ell
        .to_u64()
        .ok_or_else(|| Error::Parameter("batch size exceeds 64 bits".into()))?;
    Ok(BatchChoice {
        ell,
        preprocessing: CostTerm {
            coefficient: big_n.clone(),
            base: ell,
            exponent: c - &one,
        },
        query: CostTerm {
            coefficient: &big_n * &big_n,
            base: ell,
            exponent: -delta.clone(),
        },
        lower_exponent,
        upper_exponent,
    })
}

/// Parses `a/b` or an integer into an exact rational.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || Error::Parameter(format!("bad rational '{s}'"));
    let int = |t: &str| t.trim().parse::<BigInt>().map_err(|_| bad());
    match s.split_once('/') {
        Some((num, den)) => {
            let den = int(den)?;
            if den.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(int(num)?, den))
        }
        None => Ok(BigRational::from_integer(int(s)?)),
    }
}
