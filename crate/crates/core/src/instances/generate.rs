//! Seeded generators for planted instances.
//!
//! The distributions are artifact choices; what is guaranteed is the label.
//! YES instances carry a planted witness that is re-evaluated exactly, NO
//! instances are re-checked by the brute-force oracle, and a generator that
//! cannot certify the requested label fails instead of returning it.

use std::fmt;
use std::str::FromStr;

use fixedbitset::FixedBitSet;
use num_bigint::BigInt;
use num_integer::Roots;
use num_traits::ToPrimitive;

use super::*;
use crate::budget::Budget;
use crate::oracles::{oracle_closest_pair, oracle_lattice01_with, oracle_subset_query};
use crate::rng::SeededRng;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Label {
    Yes,
    No,
}

impl Label {
    pub fn as_str(self) -> &'static str {
        match self {
            Label::Yes => "YES",
            Label::No => "NO",
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Label {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "yes" => Ok(Label::Yes),
            "no" => Ok(Label::No),
            other => Err(Error::Parameter(format!("label must be yes or no, got '{other}'"))),
        }
    }
}

/// Parameters for {0,1}-coefficient lattice instances.
#[derive(Clone, Debug)]
pub struct LatticeGen {
    pub n: usize,
    /// Ambient dimension; defaults to `n` when `None`.
    pub dim: Option<usize>,
    pub p: NormKind,
    pub r: u64,
    pub gamma: Gamma,
    pub label: Label,
    /// Emit a CVP instance with a target point.
    pub cvp: bool,
    /// Bound on the free basis entries.
    pub spread: u64,
    pub max_attempts: u32,
}

impl LatticeGen {
    pub fn new(n: usize, p: NormKind, label: Label) -> Self {
        Self {
            n,
            dim: None,
            p,
            r: 4,
            gamma: Gamma::integer(2).expect("2 > 1"),
            label,
            cvp: false,
            spread: 4,
            max_attempts: 64,
        }
    }
}

/// Parameters for bichromatic closest pair instances.
#[derive(Clone, Debug)]
pub struct BcpGen {
    pub n_a: usize,
    pub n_b: usize,
    pub dim: usize,
    pub p: NormKind,
    pub r: u64,
    pub gamma: Gamma,
    pub label: Label,
    /// Coordinates are drawn from `[0, coord_bound]`.
    pub coord_bound: u64,
    pub max_attempts: u32,
}

impl BcpGen {
    pub fn new(n: usize, dim: usize, p: NormKind, label: Label) -> Self {
        Self {
            n_a: n,
            n_b: n,
            dim,
            p,
            r: 4,
            gamma: Gamma::integer(2).expect("2 > 1"),
            label,
            coord_bound: 64,
            max_attempts: 1000,
        }
    }
}

/// Parameters for bichromatic subset query instances.
#[derive(Clone, Debug)]
pub struct SubsetQueryGen {
    pub n_super: usize,
    pub n_sub: usize,
    pub d: usize,
    pub label: Label,
    /// Each element joins a set with probability `density.0 / density.1`.
    pub density: (u64, u64),
    pub max_attempts: u32,
}

impl SubsetQueryGen {
    pub fn new(n: usize, d: usize, label: Label) -> Self {
        Self {
            n_super: n,
            n_sub: n,
            d,
            label,
            density: (1, 2),
            max_attempts: 10_000,
        }
    }
}

/// Uniform random k-CNF: each clause draws k distinct variables (fewer when
/// n < k) with independent random signs.
#[derive(Clone, Debug)]
pub struct CnfGen {
    pub n: usize,
    pub m: usize,
    pub k: usize,
}

#[derive(Clone, Debug)]
pub enum GenSpec {
    Lattice01(LatticeGen),
    Bcp(BcpGen),
    SubsetQuery(SubsetQueryGen),
    Cnf(CnfGen),
}

pub fn generate(spec: &GenSpec, seed: u64) -> Result<Instance> {
    Ok(match spec {
        GenSpec::Lattice01(g) => generate_lattice01(g, seed)?.into(),
        GenSpec::Bcp(g) => generate_bcp(g, seed)?.into(),
        GenSpec::SubsetQuery(g) => generate_subset_query(g, seed)?.into(),
        GenSpec::Cnf(g) => generate_cnf(g, seed)?.into(),
    })
}

fn big(v: i64) -> BigInt {
    BigInt::from(v)
}

/// A random nonzero-or-zero vector with ‖v‖_p ≤ r.
fn short_vector(rng: &mut SeededRng, dim: usize, r: u64, p: NormKind, nonzero: bool) -> Vec<i64> {
    let r = r as i64;
    let mut order: Vec<usize> = (0..dim).collect();
    rng.shuffle(&mut order);
    let mut v = vec![0i64; dim];
    let mut remaining = match p {
        NormKind::L2 => r * r,
        _ => r,
    };
    for &c in &order {
        let bound = match p {
            NormKind::LInf => r,
            NormKind::L1 => remaining,
            NormKind::L2 => remaining.sqrt(),
        };
        let x = rng.range_inclusive(-bound, bound);
        v[c] = x;
        match p {
            NormKind::L1 => remaining -= x.abs(),
            NormKind::L2 => remaining -= x * x,
            NormKind::LInf => {}
        }
    }
    if nonzero && v.iter().all(|&x| x == 0) {
        let c = rng.index(dim);
        v[c] = if rng.chance(1, 2) { 1 } else { -1 };
    }
    v
}

/// A basis that is triangular up to a coordinate permutation: vector j has a
/// pivot of magnitude ≥ `pivot_min` on its own coordinate, free entries on
/// the coordinates of earlier vectors and on the extra coordinates, and zeros
/// on the pivots of later vectors. Any nonzero combination with coefficients
/// in {−1,0,1} therefore has a coordinate of magnitude ≥ `pivot_min`.
fn staircase_basis(
    rng: &mut SeededRng,
    n: usize,
    dim: usize,
    pivot_min: u64,
    spread: u64,
) -> Vec<Vec<i64>> {
    let mut perm: Vec<usize> = (0..dim).collect();
    rng.shuffle(&mut perm);
    let s = spread as i64;
    (0..n)
        .map(|j| {
            let mut v = vec![0i64; dim];
            for &c in &perm[..j] {
                v[c] = rng.range_inclusive(-s, s);
            }
            let pivot = (pivot_min + rng.below(spread + 1)) as i64;
            v[perm[j]] = if rng.chance(1, 2) { pivot } else { -pivot };
            for &c in &perm[n..] {
                v[c] = rng.range_inclusive(-s, s);
            }
            v
        })
        .collect()
}

fn to_points(rows: &[Vec<i64>]) -> Result<Vec<ExactPoint>> {
    rows.iter().map(|r| ExactPoint::from_i64(r)).collect()
}

fn random_alpha(rng: &mut SeededRng, n: usize, nonzero: bool) -> Vec<u8> {
    loop {
        let alpha: Vec<u8> = (0..n).map(|_| rng.below(2) as u8).collect();
        if !nonzero || alpha.contains(&1) {
            return alpha;
        }
    }
}

fn add_into(acc: &mut [i64], v: &[i64], sign: i64) {
    for (a, x) in acc.iter_mut().zip(v) {
        *a += sign * x;
    }
}

/// Planted {0,1}-coefficient SVP/CVP instance.
///
/// NO instances use a staircase basis whose pivots exceed γr (twice that for
/// CVP, with the target offset by a vector of ℓ∞ norm ⌈γr⌉ from a lattice
/// point), and are re-checked by the oracle. YES instances overwrite one basis
/// vector so that a random α* lands within r (of the target).
pub fn generate_lattice01(g: &LatticeGen, seed: u64) -> Result<Lattice01Instance> {
    let n = g.n;
    let dim = g.dim.unwrap_or(n);
    if n == 0 {
        return Err(Error::Parameter("lattice rank must be ≥ 1".into()));
    }
    if dim < n {
        return Err(Error::Parameter(format!("dimension {dim} < rank {n}")));
    }
    if g.r == 0 {
        return Err(Error::Parameter("radius must be positive".into()));
    }
    let params = GapParams::new(g.p, 1, g.r, g.gamma.clone())?;
    let far = g
        .gamma
        .ceil_times(&big(g.r as i64))
        .to_u64()
        .ok_or_else(|| Error::Parameter("γr too large".into()))?;
    let mut rng = SeededRng::new(seed);
    let budget = Budget::from_env();
    if g.label == Label::No && n > budget.oracle_bits as usize {
        return Err(Error::Infeasible(format!(
            "NO labels are certified by exhaustive enumeration; n = {n} exceeds the oracle cap {}",
            budget.oracle_bits
        )));
    }

    for _ in 0..g.max_attempts {
        let (basis, target) = match (g.label, g.cvp) {
            (Label::No, false) => (staircase_basis(&mut rng, n, dim, far, g.spread), None),
            (Label::No, true) => {
                let basis = staircase_basis(&mut rng, n, dim, 2 * far, g.spread);
                let beta = random_alpha(&mut rng, n, false);
                let w = far as i64;
                let mut t: Vec<i64> = (0..dim).map(|_| rng.range_inclusive(-w, w)).collect();
                let c = rng.index(dim);
                t[c] = if rng.chance(1, 2) { w } else { -w };
                for (b, _) in basis.iter().zip(&beta).filter(|(_, &x)| x == 1) {
                    add_into(&mut t, b, 1);
                }
                (basis, Some(t))
            }
            (Label::Yes, false) => {
                let mut basis = staircase_basis(&mut rng, n, dim, 1, g.spread);
                let alpha = random_alpha(&mut rng, n, true);
                let support: Vec<usize> = (0..n).filter(|&i| alpha[i] == 1).collect();
                let k = support[rng.index(support.len())];
                let mut planted = short_vector(&mut rng, dim, g.r, g.p, true);
                for &i in support.iter().filter(|&&i| i != k) {
                    add_into(&mut planted, &basis[i], -1);
                }
                basis[k] = planted;
                (basis, None)
            }
            (Label::Yes, true) => {
                let basis = staircase_basis(&mut rng, n, dim, 1, g.spread);
                let alpha = random_alpha(&mut rng, n, false);
                let mut t = short_vector(&mut rng, dim, g.r, g.p, false);
                for (b, _) in basis.iter().zip(&alpha).filter(|(_, &x)| x == 1) {
                    add_into(&mut t, b, 1);
                }
                (basis, Some(t))
            }
        };
        let basis = to_points(&basis)?;
        if exact_rank(&basis) < n {
            continue;
        }
        let target = target.map(|t| ExactPoint::from_i64(&t)).transpose()?;
        let inst = Lattice01Instance::new(params.clone(), basis, target)?;
        let certified = match g.label {
            Label::Yes => true,
            Label::No => {
                oracle_lattice01_with(&inst, &budget)?.label == crate::metric::GapSide::No
            }
        };
        if certified {
            return Ok(inst);
        }
    }
    Err(Error::Infeasible(format!(
        "no certified {} lattice instance after {} attempts",
        g.label, g.max_attempts
    )))
}

fn random_point(rng: &mut SeededRng, dim: usize, bound: u64) -> Vec<i64> {
    (0..dim).map(|_| rng.below(bound + 1) as i64).collect()
}

/// Planted closest-pair instance. YES instances move one B point within r of
/// an A point; NO instances reject any B point closer than γr to A.
pub fn generate_bcp(g: &BcpGen, seed: u64) -> Result<BcpInstance> {
    if g.n_a == 0 || g.n_b == 0 || g.dim == 0 {
        return Err(Error::Parameter("sizes and dimension must be ≥ 1".into()));
    }
    let params = GapParams::new(g.p, 1, g.r, g.gamma.clone())?;
    let thresholds = params.thresholds();
    let mut rng = SeededRng::new(seed);
    let a = to_points(
        &(0..g.n_a)
            .map(|_| random_point(&mut rng, g.dim, g.coord_bound))
            .collect::<Vec<_>>(),
    )?;
    let mut b = Vec::with_capacity(g.n_b);
    match g.label {
        Label::Yes => {
            for _ in 0..g.n_b {
                b.push(ExactPoint::from_i64(&random_point(&mut rng, g.dim, g.coord_bound))?);
            }
            let i = rng.index(g.n_a);
            let j = rng.index(g.n_b);
            let offset = ExactPoint::from_i64(&short_vector(&mut rng, g.dim, g.r, g.p, false))?;
            b[j] = a[i].add(&offset)?;
        }
        Label::No => {
            for _ in 0..g.n_b {
                let mut accepted = None;
                for _ in 0..g.max_attempts {
                    let q = ExactPoint::from_i64(&random_point(&mut rng, g.dim, g.coord_bound))?;
                    let far = a.iter().all(|x| {
                        let d = crate::metric::distance_value(x, &q, g.p).expect("same dim");
                        thresholds.classify(&d) == crate::metric::GapSide::No
                    });
                    if far {
                        accepted = Some(q);
                        break;
                    }
                }
                b.push(accepted.ok_or_else(|| {
                    Error::Infeasible(format!(
                        "no point at distance ≥ γr from A after {} draws",
                        g.max_attempts
                    ))
                })?);
            }
        }
    }
    let inst = BcpInstance::new(params, a, b)?;
    let want = match g.label {
        Label::Yes => crate::metric::GapSide::Yes,
        Label::No => crate::metric::GapSide::No,
    };
    if oracle_closest_pair(&inst).label != want {
        return Err(Error::Infeasible("oracle rejected the planted label".into()));
    }
    Ok(inst)
}

fn random_set(rng: &mut SeededRng, d: usize, density: (u64, u64)) -> FixedBitSet {
    let mut s = FixedBitSet::with_capacity(d);
    for i in 0..d {
        if rng.chance(density.0, density.1) {
            s.insert(i);
        }
    }
    s
}

/// Planted subset query instance. YES plants a random subset of one
/// superset; NO resamples any subset contained in some superset.
pub fn generate_subset_query(g: &SubsetQueryGen, seed: u64) -> Result<SetFamilyInstance> {
    if g.n_super == 0 || g.n_sub == 0 || g.d == 0 {
        return Err(Error::Parameter("family sizes and d must be ≥ 1".into()));
    }
    if g.density.1 == 0 || g.density.0 > g.density.1 {
        return Err(Error::Parameter("density must be a probability".into()));
    }
    let mut rng = SeededRng::new(seed);
    let infeasible = || {
        Error::Infeasible(format!(
            "no certified {} subset query instance after {} draws",
            g.label, g.max_attempts
        ))
    };
    let mut supersets = Vec::with_capacity(g.n_super);
    for _ in 0..g.n_super {
        let mut s = random_set(&mut rng, g.d, g.density);
        if g.label == Label::No {
            let mut tries = 0;
            while s.count_ones(..) == g.d {
                tries += 1;
                if tries > g.max_attempts {
                    return Err(infeasible());
                }
                s = random_set(&mut rng, g.d, g.density);
            }
        }
        supersets.push(s);
    }
    let mut subsets = Vec::with_capacity(g.n_sub);
    for _ in 0..g.n_sub {
        let mut t = random_set(&mut rng, g.d, g.density);
        if g.label == Label::No {
            let mut tries = 0;
            while supersets.iter().any(|s| t.is_subset(s)) {
                tries += 1;
                if tries > g.max_attempts {
                    return Err(infeasible());
                }
                t = random_set(&mut rng, g.d, g.density);
            }
        }
        subsets.push(t);
    }
    if g.label == Label::Yes {
        let i = rng.index(g.n_sub);
        let j = rng.index(g.n_super);
        let mut t = FixedBitSet::with_capacity(g.d);
        for e in supersets[j].ones() {
            if rng.chance(1, 2) {
                t.insert(e);
            }
        }
        subsets[i] = t;
    }
    let inst = SetFamilyInstance {
        d: g.d,
        supersets,
        subsets,
    };
    inst.validate()?;
    let yes = oracle_subset_query(&inst).label == crate::metric::GapSide::Yes;
    if yes != (g.label == Label::Yes) {
        return Err(infeasible());
    }
    Ok(inst)
}

pub fn generate_cnf(g: &CnfGen, seed: u64) -> Result<CnfInstance> {
    let mut rng = SeededRng::new(seed);
    let width = g.k.min(g.n);
    let mut vars: Vec<usize> = (0..g.n).collect();
    let clauses = (0..g.m)
        .map(|_| {
            // partial Fisher–Yates: first `width` entries become the clause
            for i in 0..width {
                let j = i + rng.index(g.n - i);
                vars.swap(i, j);
            }
            vars[..width]
                .iter()
                .map(|&v| {
                    if rng.chance(1, 2) {
                        Literal::positive(v)
                    } else {
                        Literal::negative(v)
                    }
                })
                .collect()
        })
        .collect();
    let inst = CnfInstance {
        num_vars: g.n,
        width: g.k,
        clauses,
    };
    inst.validate()?;
    Ok(inst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::GapSide;
    use crate::oracles::oracle_lattice01;

    #[test]
    fn lattice_yes_example_is_certified() {
        let g = LatticeGen::new(2, NormKind::LInf, Label::Yes);
        let inst = generate_lattice01(&g, 7).unwrap();
        let verdict = oracle_lattice01(&inst).unwrap();
        assert_eq!(verdict.label, GapSide::Yes);
        assert!(verdict.exact_min.unwrap().value <= inst.params.r);
    }

    #[test]
    fn subset_query_no_example() {
        let inst = generate_subset_query(&SubsetQueryGen::new(4, 6, Label::No), 1).unwrap();
        for t in &inst.subsets {
            for s in &inst.supersets {
                assert!(!t.is_subset(s));
            }
        }
    }

    #[test]
    fn cnf_example_shape() {
        let inst = generate_cnf(&CnfGen { n: 10, m: 30, k: 3 }, 3).unwrap();
        assert_eq!(inst.clauses.len(), 30);
        for c in &inst.clauses {
            assert!(c.len() <= 3);
            let mut vars: Vec<usize> = c.iter().map(|l| l.var()).collect();
            vars.dedup();
            assert_eq!(vars.len(), c.len());
        }
    }

    #[test]
    fn labels_hold_at_small_sizes() {
        for seed in 0..40u64 {
            for p in NormKind::ALL {
                for n in [1usize, 3, 6, 9] {
                    for cvp in [false, true] {
                        for label in [Label::Yes, Label::No] {
                            let g = LatticeGen {
                                cvp,
                                dim: Some(n + (seed % 3) as usize),
                                ..LatticeGen::new(n, p, label)
                            };
                            let inst = generate_lattice01(&g, seed).unwrap();
                            let want = if label == Label::Yes { GapSide::Yes } else { GapSide::No };
                            assert_eq!(oracle_lattice01(&inst).unwrap().label, want);
                        }
                    }
                }
            }
            for label in [Label::Yes, Label::No] {
                let sets = generate_subset_query(&SubsetQueryGen::new(10, 10, label), seed).unwrap();
                let want = if label == Label::Yes { GapSide::Yes } else { GapSide::No };
                assert_eq!(oracle_subset_query(&sets).label, want);
            }
        }
    }

    #[test]
    fn generation_is_reproducible() {
        let g = GenSpec::Lattice01(LatticeGen::new(6, NormKind::L2, Label::No));
        assert_eq!(generate(&g, 11).unwrap(), generate(&g, 11).unwrap());
        let g = GenSpec::Bcp(BcpGen::new(16, 3, NormKind::LInf, Label::No));
        assert_eq!(generate(&g, 5).unwrap(), generate(&g, 5).unwrap());
        assert_ne!(generate(&g, 5).unwrap(), generate(&g, 6).unwrap());
    }

    #[test]
    fn impossible_no_instance_fails_loudly() {
        // Every point of [0,1]^1 is within γr of every other.
        let g = BcpGen {
            coord_bound: 1,
            max_attempts: 10,
            ..BcpGen::new(3, 1, NormKind::LInf, Label::No)
        };
        assert!(matches!(generate_bcp(&g, 0), Err(Error::Infeasible(_))));
        let g = SubsetQueryGen {
            density: (1, 1),
            max_attempts: 5,
            ..SubsetQueryGen::new(2, 3, Label::No)
        };
        assert!(matches!(generate_subset_query(&g, 0), Err(Error::Infeasible(_))));
    }
}
