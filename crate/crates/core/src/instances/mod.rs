//! Problem instances, their canonical JSON encoding, and seeded generators.

mod format;
mod generate;

pub use format::{parse_instance, serialize_instance};
pub use generate::{
    generate, generate_bcp, generate_cnf, generate_lattice01, generate_subset_query, BcpGen, CnfGen,
    GenSpec, Label, LatticeGen, SubsetQueryGen,
};

use std::fmt;

use fixedbitset::FixedBitSet;
use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::metric::{ExactPoint, Gamma, GapThresholds, NormKind, ScaledMagnitude};

/// Radius, gap and norm shared by the geometric promise problems.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GapParams {
    pub p: NormKind,
    /// Instance-wide denominator of every coordinate and of `r`.
    pub scale: u64,
    /// Radius numerator (never squared; ℓ₂ comparisons square it).
    pub r: BigInt,
    pub gamma: Gamma,
}

impl GapParams {
    pub fn new(p: NormKind, scale: u64, r: impl Into<BigInt>, gamma: Gamma) -> Result<Self> {
        let params = Self {
            p,
            scale,
            r: r.into(),
            gamma,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if self.scale == 0 {
            return Err(Error::Invariant("scale must be positive".into()));
        }
        if !self.r.is_positive() {
            return Err(Error::Invariant("radius must be positive".into()));
        }
        Ok(())
    }

    pub fn radius(&self) -> ScaledMagnitude {
        ScaledMagnitude::radius(&self.r, self.scale, self.p).expect("validated radius")
    }

    pub fn thresholds(&self) -> GapThresholds {
        GapThresholds::new(&self.r, &self.gamma, self.p)
    }

    pub fn magnitude(&self, value: BigInt) -> ScaledMagnitude {
        ScaledMagnitude::new(value, self.scale, self.p.power()).expect("non-negative distance")
    }
}

/// Approximate nearest neighbour: data points preprocessed once, then queried.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnnInstance {
    pub params: GapParams,
    pub data: Vec<ExactPoint>,
    pub queries: Vec<ExactPoint>,
}

/// Bichromatic closest pair. The two sides may differ in size.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BcpInstance {
    pub params: GapParams,
    pub a: Vec<ExactPoint>,
    pub b: Vec<ExactPoint>,
}

/// SVP with {0,1} coefficients, or CVP with {0,1} coefficients when a target
/// is present.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lattice01Instance {
    pub params: GapParams,
    pub basis: Vec<ExactPoint>,
    pub target: Option<ExactPoint>,
}

/// Bichromatic subset query: is some subset contained in some superset?
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SetFamilyInstance {
    pub d: usize,
    pub supersets: Vec<FixedBitSet>,
    pub subsets: Vec<FixedBitSet>,
}

/// Orthogonal vectors over {0,1}^d.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OvInstance {
    pub d: usize,
    pub a: Vec<FixedBitSet>,
    pub b: Vec<FixedBitSet>,
}

/// A signed, 1-based DIMACS-style literal.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Literal(i32);

impl Literal {
    pub fn new(value: i32) -> Result<Self> {
        if value == 0 {
            return Err(Error::Invariant("literal 0 is not a variable".into()));
        }
        Ok(Self(value))
    }

    pub fn positive(var: usize) -> Self {
        Self(var as i32 + 1)
    }

    pub fn negative(var: usize) -> Self {
        Self(-(var as i32 + 1))
    }

    /// Zero-based variable index.
    pub fn var(self) -> usize {
        self.0.unsigned_abs() as usize - 1
    }

    pub fn is_positive(self) -> bool {
        self.0 > 0
    }

    pub fn value(self) -> i32 {
        self.0
    }

    pub fn satisfied_by(self, value: bool) -> bool {
        value == self.is_positive()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CnfInstance {
    pub num_vars: usize,
    pub width: usize,
    pub clauses: Vec<Vec<Literal>>,
}

impl CnfInstance {
    pub fn from_dimacs(num_vars: usize, width: usize, clauses: &[&[i32]]) -> Result<Self> {
        let clauses = clauses
            .iter()
            .map(|c| c.iter().map(|&l| Literal::new(l)).collect())
            .collect::<Result<_>>()?;
        let inst = Self {
            num_vars,
            width,
            clauses,
        };
        inst.validate()?;
        Ok(inst)
    }

    pub fn validate(&self) -> Result<()> {
        for (i, clause) in self.clauses.iter().enumerate() {
            if clause.len() > self.width {
                return Err(Error::Invariant(format!(
                    "clause {i} has width {} > k = {}",
                    clause.len(),
                    self.width
                )));
            }
            if let Some(l) = clause.iter().find(|l| l.var() >= self.num_vars) {
                return Err(Error::Invariant(format!(
                    "clause {i} references variable {} outside [{}]",
                    l.var() + 1,
                    self.num_vars
                )));
            }
        }
        Ok(())
    }

    /// Whether a full assignment satisfies every clause.
    pub fn is_satisfied_by(&self, assignment: &[bool]) -> bool {
        self.clauses
            .iter()
            .all(|c| c.iter().any(|l| l.satisfied_by(assignment[l.var()])))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Instance {
    Ann(AnnInstance),
    Bcp(BcpInstance),
    Lattice01(Lattice01Instance),
    SubsetQuery(SetFamilyInstance),
    Ov(OvInstance),
    Cnf(CnfInstance),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum InstanceKind {
    Ann,
    Bcp,
    Lattice01,
    SubsetQuery,
    Ov,
    Cnf,
}

impl InstanceKind {
    pub fn as_str(self) -> &'static str {
        match self {
            InstanceKind::Ann => "ann",
            InstanceKind::Bcp => "bcp",
            InstanceKind::Lattice01 => "lattice01",
            InstanceKind::SubsetQuery => "subsetquery",
            InstanceKind::Ov => "ov",
            InstanceKind::Cnf => "cnf",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "ann" => InstanceKind::Ann,
            "bcp" => InstanceKind::Bcp,
            "lattice01" => InstanceKind::Lattice01,
            "subsetquery" => InstanceKind::SubsetQuery,
            "ov" => InstanceKind::Ov,
            "cnf" => InstanceKind::Cnf,
            other => return Err(Error::Malformed(format!("unknown kind '{other}'"))),
        })
    }
}

impl fmt::Display for InstanceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Instance {
    pub fn kind(&self) -> InstanceKind {
        match self {
            Instance::Ann(_) => InstanceKind::Ann,
            Instance::Bcp(_) => InstanceKind::Bcp,
            Instance::Lattice01(_) => InstanceKind::Lattice01,
            Instance::SubsetQuery(_) => InstanceKind::SubsetQuery,
            Instance::Ov(_) => InstanceKind::Ov,
            Instance::Cnf(_) => InstanceKind::Cnf,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Instance::Ann(i) => i.validate(),
            Instance::Bcp(i) => i.validate(),
            Instance::Lattice01(i) => i.validate(),
            Instance::SubsetQuery(i) => i.validate(),
            Instance::Ov(i) => i.validate(),
            Instance::Cnf(i) => i.validate(),
        }
    }
}

macro_rules! instance_from {
    ($($variant:ident($ty:ty)),*) => {
        $(impl From<$ty> for Instance {
            fn from(inst: $ty) -> Self {
                Instance::$variant(inst)
            }
        })*
    };
}

instance_from!(
    Ann(AnnInstance),
    Bcp(BcpInstance),
    Lattice01(Lattice01Instance),
    SubsetQuery(SetFamilyInstance),
    Ov(OvInstance),
    Cnf(CnfInstance)
);

fn check_points<'a>(
    what: &str,
    points: impl IntoIterator<Item = &'a ExactPoint>,
    dim: usize,
) -> Result<()> {
    for (i, p) in points.into_iter().enumerate() {
        if p.dim() != dim {
            return Err(Error::Malformed(format!(
                "dimension mismatch: {what}[{i}] has dimension {}, expected {dim}",
                p.dim()
            )));
        }
    }
    Ok(())
}

fn non_empty(what: &str, len: usize) -> Result<()> {
    if len == 0 {
        return Err(Error::Invariant(format!("{what} must be non-empty")));
    }
    Ok(())
}

impl AnnInstance {
    pub fn dim(&self) -> usize {
        self.data[0].dim()
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        non_empty("data points", self.data.len())?;
        let dim = self.dim();
        check_points("data", &self.data, dim)?;
        check_points("queries", &self.queries, dim)
    }
}

impl BcpInstance {
    pub fn new(params: GapParams, a: Vec<ExactPoint>, b: Vec<ExactPoint>) -> Result<Self> {
        let inst = Self { params, a, b };
        inst.validate()?;
        Ok(inst)
    }

    pub fn dim(&self) -> usize {
        self.a[0].dim()
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        non_empty("A", self.a.len())?;
        non_empty("B", self.b.len())?;
        let dim = self.dim();
        check_points("A", &self.a, dim)?;
        check_points("B", &self.b, dim)
    }

    /// The same instance with sides exchanged.
    pub fn transposed(&self) -> Self {
        Self {
            params: self.params.clone(),
            a: self.b.clone(),
            b: self.a.clone(),
        }
    }
}

impl Lattice01Instance {
    pub fn new(
        params: GapParams,
        basis: Vec<ExactPoint>,
        target: Option<ExactPoint>,
    ) -> Result<Self> {
        let inst = Self {
            params,
            basis,
            target,
        };
        inst.validate()?;
        Ok(inst)
    }

    /// Rank of the lattice (number of basis vectors).
    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn dim(&self) -> usize {
        self.basis[0].dim()
    }

    pub fn is_cvp(&self) -> bool {
        self.target.is_some()
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        non_empty("basis", self.basis.len())?;
        let dim = self.dim();
        check_points("basis", &self.basis, dim)?;
        check_points("target", &self.target, dim)?;
        let rank = exact_rank(&self.basis);
        if rank < self.basis.len() {
            return Err(Error::DependentBasis {
                rank,
                n: self.basis.len(),
            });
        }
        Ok(())
    }

    /// Σ αᵢ bᵢ for a {0,1} coefficient vector.
    pub fn combination(&self, alpha: &[u8]) -> Result<ExactPoint> {
        if alpha.len() != self.rank() {
            return Err(Error::DimensionMismatch {
                expected: self.rank(),
                found: alpha.len(),
            });
        }
        let mut acc = ExactPoint::zero(self.dim())?;
        for (b, _) in self.basis.iter().zip(alpha).filter(|(_, &a)| a == 1) {
            acc = acc.add(b)?;
        }
        Ok(acc)
    }

    /// ‖Σ αᵢ bᵢ − t‖_p (t = 0 for SVP) as a raw numerator.
    pub fn evaluate(&self, alpha: &[u8]) -> Result<BigInt> {
        let v = self.combination(alpha)?;
        let origin = ExactPoint::zero(self.dim())?;
        crate::metric::distance_value(&v, self.target.as_ref().unwrap_or(&origin), self.params.p)
    }
}

fn check_sets(what: &str, sets: &[FixedBitSet], d: usize) -> Result<()> {
    for (i, s) in sets.iter().enumerate() {
        if s.len() != d {
            return Err(Error::Malformed(format!(
                "dimension mismatch: {what}[{i}] has length {}, expected {d}",
                s.len()
            )));
        }
    }
    Ok(())
}

impl SetFamilyInstance {
    pub fn validate(&self) -> Result<()> {
        if self.d == 0 {
            return Err(Error::Invariant("universe size d must be ≥ 1".into()));
        }
        non_empty("supersets", self.supersets.len())?;
        non_empty("subsets", self.subsets.len())?;
        check_sets("supersets", &self.supersets, self.d)?;
        check_sets("subsets", &self.subsets, self.d)
    }
}

impl OvInstance {
    pub fn validate(&self) -> Result<()> {
        if self.d == 0 {
            return Err(Error::Invariant("dimension d must be ≥ 1".into()));
        }
        non_empty("A", self.a.len())?;
        non_empty("B", self.b.len())?;
        check_sets("A", &self.a, self.d)?;
        check_sets("B", &self.b, self.d)
    }
}

/// Bit string text: character `i` is `1` iff element `i + 1` is present.
pub fn bits_to_string(bits: &FixedBitSet) -> String {
    (0..bits.len())
        .map(|i| if bits.contains(i) { '1' } else { '0' })
        .collect()
}

pub fn bits_from_str(s: &str) -> Result<FixedBitSet> {
    let mut bits = FixedBitSet::with_capacity(s.len());
    for (i, ch) in s.chars().enumerate() {
        match ch {
            '1' => bits.insert(i),
            '0' => {}
            other => {
                return Err(Error::Malformed(format!(
                    "bit strings use 0/1, found '{other}'"
                )))
            }
        }
    }
    Ok(bits)
}

/// Rank over the rationals by fraction-free (Bareiss) elimination.
pub fn exact_rank(rows: &[ExactPoint]) -> usize {
    let mut m: Vec<Vec<BigInt>> = rows.iter().map(|r| r.coords().to_vec()).collect();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    let mut prev_pivot = BigInt::from(1);
    for col in 0..cols {
        let Some(pivot_row) = (rank..m.len()).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(rank, pivot_row);
        let pivot = m[rank][col].clone();
        #[allow(clippy::needless_range_loop)]
        for r in rank + 1..m.len() {
            let factor = m[r][col].clone();
            for c in col..cols {
                let v = (&pivot * &m[r][c] - &factor * &m[rank][c]) / &prev_pivot;
                m[r][c] = v;
            }
        }
        prev_pivot = pivot;
        rank += 1;
        if rank == m.len() {
            break;
        }
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(rows: &[&[i64]]) -> Vec<ExactPoint> {
        rows.iter().map(|r| ExactPoint::from_i64(r).unwrap()).collect()
    }

    #[test]
    fn rank_of_small_matrices() {
        assert_eq!(exact_rank(&pts(&[&[1, 0], &[2, 0]])), 1);
        assert_eq!(exact_rank(&pts(&[&[2, 0], &[-1, 3]])), 2);
        assert_eq!(exact_rank(&pts(&[&[1, 2, 3], &[4, 5, 6], &[7, 8, 9]])), 2);
        assert_eq!(exact_rank(&pts(&[&[0, 0, 5], &[0, 3, 1], &[2, 1, 1]])), 3);
        assert_eq!(exact_rank(&pts(&[&[0, 0]])), 0);
    }

    #[test]
    fn dependent_basis_rejected() {
        let params = GapParams::new(NormKind::LInf, 1, 1, Gamma::integer(2).unwrap()).unwrap();
        let err = Lattice01Instance::new(params, pts(&[&[1, 0], &[2, 0]]), None).unwrap_err();
        assert!(matches!(err, Error::DependentBasis { rank: 1, n: 2 }));
    }

    #[test]
    fn literal_indexing() {
        let l = Literal::new(-3).unwrap();
        assert_eq!(l.var(), 2);
        assert!(!l.is_positive());
        assert!(l.satisfied_by(false));
        assert_eq!(Literal::positive(0).value(), 1);
        assert!(Literal::new(0).is_err());
    }

    #[test]
    fn cnf_invariants() {
        assert!(CnfInstance::from_dimacs(2, 2, &[&[1, -2]]).is_ok());
        assert!(CnfInstance::from_dimacs(2, 1, &[&[1, -2]]).is_err());
        assert!(CnfInstance::from_dimacs(1, 2, &[&[1, -2]]).is_err());
    }

    #[test]
    fn bit_string_text() {
        let b = bits_from_str("101").unwrap();
        assert!(b.contains(0) && !b.contains(1) && b.contains(2));
        assert_eq!(bits_to_string(&b), "101");
        assert!(bits_from_str("1x").is_err());
    }
}
