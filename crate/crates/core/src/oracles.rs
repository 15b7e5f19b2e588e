//! Brute-force ground truth for every problem.
//!
//! These are deliberately naive: full enumeration, no pruning, lowest-index
//! tie-breaking. Everything else in the crate is checked against them.

use num_bigint::BigInt;
use serde::Serialize;

use crate::budget::Budget;
use crate::error::Result;
use crate::instances::{BcpInstance, CnfInstance, Lattice01Instance, SetFamilyInstance};
use crate::metric::{distance_value, GapSide, ScaledMagnitude};

/// A certificate for a YES (or promise-violating) answer.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Witness {
    /// Indices into A and B.
    Pair { a: usize, b: usize },
    /// {0,1} coefficient vector over the basis.
    Coefficients(Vec<u8>),
    /// Truth values of x₁..xₙ.
    Assignment(Vec<bool>),
    /// `subsets[subset] ⊆ supersets[superset]`.
    Containment { subset: usize, superset: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleVerdict {
    pub label: GapSide,
    pub witness: Option<Witness>,
    /// Exact optimum, for the geometric problems.
    pub exact_min: Option<ScaledMagnitude>,
    /// Number of candidates examined.
    pub enumerated: u64,
}

/// Minimum over all |A|·|B| cross pairs; the witness is the lowest
/// row-major minimizing pair.
pub fn oracle_closest_pair(inst: &BcpInstance) -> OracleVerdict {
    let p = inst.params.p;
    let mut best: Option<(BigInt, usize, usize)> = None;
    for (i, a) in inst.a.iter().enumerate() {
        for (j, b) in inst.b.iter().enumerate() {
            let d = distance_value(a, b, p).expect("validated dimensions");
            if best.as_ref().is_none_or(|(m, _, _)| d < *m) {
                best = Some((d, i, j));
            }
        }
    }
    let (min, i, j) = best.expect("non-empty sides");
    let label = inst.params.thresholds().classify(&min);
    OracleVerdict {
        label,
        witness: (label != GapSide::No).then_some(Witness::Pair { a: i, b: j }),
        exact_min: Some(inst.params.magnitude(min)),
        enumerated: (inst.a.len() * inst.b.len()) as u64,
    }
}

pub fn oracle_lattice01(inst: &Lattice01Instance) -> Result<OracleVerdict> {
    oracle_lattice01_with(inst, &Budget::from_env())
}

/// Exhaustive minimum of ‖Σαᵢbᵢ − t‖ over α ∈ {0,1}ⁿ (nonzero α only when
/// there is no target).
///
/// Candidates are visited in Gray-code order; the witness is the
/// lexicographically least minimizing α (α₁ most significant).
pub fn oracle_lattice01_with(inst: &Lattice01Instance, budget: &Budget) -> Result<OracleVerdict> {
    let n = inst.rank();
    budget.check_bits("lattice oracle", n, budget.oracle_bits)?;
    let (min, key) = gray_min_words(inst).unwrap_or_else(|| gray_min_big(inst));
    let label = inst.params.thresholds().classify(&min);
    let alpha = (0..n).map(|j| ((key >> (n - 1 - j)) & 1) as u8).collect();
    let total = 1u64 << n;
    Ok(OracleVerdict {
        label,
        witness: (label != GapSide::No).then_some(Witness::Coefficients(alpha)),
        exact_min: Some(inst.params.magnitude(min)),
        enumerated: if inst.is_cvp() { total } else { total - 1 },
    })
}

// Bit (n-1-j) of the Gray code holds αⱼ, so the code itself is the
// lexicographic key.
fn gray_min_words(inst: &Lattice01Instance) -> Option<(BigInt, u64)> {
    let n = inst.rank();
    let p = inst.params.p;
    let basis: Vec<&[i64]> = inst
        .basis
        .iter()
        .map(|b| b.words())
        .collect::<Option<_>>()?;
    let target: Vec<i128> = match &inst.target {
        Some(t) => t.words()?.iter().map(|&x| x as i128).collect(),
        None => vec![0; inst.dim()],
    };
    let mut sum = vec![0i128; inst.dim()];
    let norm = |sum: &[i128]| -> Option<i128> {
        let mut acc = 0i128;
        for (s, t) in sum.iter().zip(&target) {
            let d = s.checked_sub(*t)?.checked_abs()?;
            acc = match p {
                crate::metric::NormKind::L1 => acc.checked_add(d)?,
                crate::metric::NormKind::L2 => acc.checked_add(d.checked_mul(d)?)?,
                crate::metric::NormKind::LInf => acc.max(d),
            };
        }
        Some(acc)
    };
    let mut best: Option<(i128, u64)> = None;
    if inst.is_cvp() {
        best = Some((norm(&sum)?, 0));
    }
    let mut code = 0u64;
    for step in 1..(1u64 << n) {
        let bit = step.trailing_zeros() as usize;
        code ^= 1 << bit;
        let j = n - 1 - bit;
        let adding = code & (1 << bit) != 0;
        for (s, &x) in sum.iter_mut().zip(basis[j]) {
            *s = if adding {
                s.checked_add(x as i128)?
            } else {
                s.checked_sub(x as i128)?
            };
        }
        let d = norm(&sum)?;
        if best.is_none_or(|(m, k)| d < m || (d == m && code < k)) {
            best = Some((d, code));
        }
    }
    best.map(|(d, k)| (BigInt::from(d), k))
}

fn gray_min_big(inst: &Lattice01Instance) -> (BigInt, u64) {
    let n = inst.rank();
    let origin = crate::metric::ExactPoint::zero(inst.dim()).expect("dim ≥ 1");
    let target = inst.target.clone().unwrap_or(origin.clone());
    let mut sum = origin;
    let mut best: Option<(BigInt, u64)> = inst
        .is_cvp()
        .then(|| (distance_value(&sum, &target, inst.params.p).expect("dims"), 0));
    let mut code = 0u64;
    for step in 1..(1u64 << n) {
        let bit = step.trailing_zeros() as usize;
        code ^= 1 << bit;
        let b = &inst.basis[n - 1 - bit];
        sum = if code & (1 << bit) != 0 {
            sum.add(b)
        } else {
            sum.sub(b)
        }
        .expect("dims");
        let d = distance_value(&sum, &target, inst.params.p).expect("dims");
        if best
            .as_ref()
            .is_none_or(|(m, k)| d < *m || (d == *m && code < *k))
        {
            best = Some((d, code));
        }
    }
    best.expect("at least one candidate")
}

/// Scans all (subset, superset) pairs row-major by subset; YES with the
/// first containment found.
pub fn oracle_subset_query(inst: &SetFamilyInstance) -> OracleVerdict {
    let mut witness = None;
    for (i, t) in inst.subsets.iter().enumerate() {
        for (j, s) in inst.supersets.iter().enumerate() {
            if witness.is_none() && t.is_subset(s) {
                witness = Some(Witness::Containment {
                    subset: i,
                    superset: j,
                });
            }
        }
    }
    OracleVerdict {
        label: if witness.is_some() {
            GapSide::Yes
        } else {
            GapSide::No
        },
        witness,
        exact_min: None,
        enumerated: (inst.subsets.len() * inst.supersets.len()) as u64,
    }
}

pub fn oracle_sat(inst: &CnfInstance) -> Result<OracleVerdict> {
    oracle_sat_with(inst, &Budget::from_env())
}

/// Tries all 2ⁿ assignments in lexicographic order (x₁ most significant) and
/// reports the least satisfying one.
pub fn oracle_sat_with(inst: &CnfInstance, budget: &Budget) -> Result<OracleVerdict> {
    let n = inst.num_vars;
    budget.check_bits("SAT oracle", n, budget.oracle_bits)?;
    // Per clause: the code bits that satisfy it when set / when clear.
    let masks: Vec<(u64, u64)> = inst
        .clauses
        .iter()
        .map(|c| {
            c.iter().fold((0, 0), |(pos, neg), l| {
                let bit = 1u64 << (n - 1 - l.var());
                if l.is_positive() {
                    (pos | bit, neg)
                } else {
                    (pos, neg | bit)
                }
            })
        })
        .collect();
    let mut first = None;
    for code in 0..(1u64 << n) {
        if first.is_none()
            && masks
                .iter()
                .all(|&(pos, neg)| code & pos != 0 || !code & neg != 0)
        {
            first = Some(code);
        }
    }
    let witness =
        first.map(|code| Witness::Assignment((0..n).map(|j| (code >> (n - 1 - j)) & 1 == 1).collect()));
    Ok(OracleVerdict {
        label: if witness.is_some() {
            GapSide::Yes
        } else {
            GapSide::No
        },
        witness,
        exact_min: None,
        enumerated: 1u64 << n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::instances::{bits_from_str, GapParams};
    use crate::metric::{ExactPoint, Gamma, NormKind};

    fn pt(c: &[i64]) -> ExactPoint {
        ExactPoint::from_i64(c).unwrap()
    }

    fn params(p: NormKind, r: i64, gamma: Gamma) -> GapParams {
        GapParams::new(p, 1, r, gamma).unwrap()
    }

    fn lattice(rows: &[&[i64]], target: Option<&[i64]>, p: NormKind, r: i64) -> Lattice01Instance {
        Lattice01Instance::new(
            params(p, r, Gamma::integer(3).unwrap()),
            rows.iter().map(|r| pt(r)).collect(),
            target.map(pt),
        )
        .unwrap()
    }

    #[test]
    fn closest_pair_examples() {
        let inst = BcpInstance::new(
            params(NormKind::LInf, 2, Gamma::from_ratio(3, 2).unwrap()),
            vec![pt(&[0, 3])],
            vec![pt(&[1, 1])],
        )
        .unwrap();
        let v = oracle_closest_pair(&inst);
        assert_eq!(v.label, GapSide::Yes);
        assert_eq!(v.exact_min.unwrap().value, 2.into());
        assert_eq!(v.witness, Some(Witness::Pair { a: 0, b: 0 }));

        let same = BcpInstance::new(
            params(NormKind::L2, 1, Gamma::integer(2).unwrap()),
            vec![pt(&[0, 0])],
            vec![pt(&[0, 0])],
        )
        .unwrap();
        let v = oracle_closest_pair(&same);
        assert_eq!((v.label, v.exact_min.unwrap().value), (GapSide::Yes, 0.into()));
    }

    #[test]
    fn closest_pair_lowest_index_tie() {
        let inst = BcpInstance::new(
            params(NormKind::L1, 1, Gamma::integer(2).unwrap()),
            vec![pt(&[5]), pt(&[0]), pt(&[2])],
            vec![pt(&[1]), pt(&[3])],
        )
        .unwrap();
        // (1,0), (2,0) and (2,1) all realize distance 1.
        let v = oracle_closest_pair(&inst);
        assert_eq!(v.witness, Some(Witness::Pair { a: 1, b: 0 }));
        assert_eq!(v.enumerated, 6);
    }

    #[test]
    fn lattice_examples() {
        let v = oracle_lattice01(&lattice(&[&[2, 0], &[-1, 3]], None, NormKind::LInf, 2)).unwrap();
        assert_eq!(v.exact_min.unwrap().value, 2.into());
        assert_eq!(v.witness, Some(Witness::Coefficients(vec![1, 0])));
        assert_eq!(v.enumerated, 3);

        let v = oracle_lattice01(&lattice(&[&[5]], None, NormKind::LInf, 5)).unwrap();
        assert_eq!(v.exact_min.unwrap().value, 5.into());
        assert_eq!(v.witness, Some(Witness::Coefficients(vec![1])));

        let cvp = lattice(&[&[4, 0], &[0, 4]], Some(&[1, 1]), NormKind::LInf, 1);
        let v = oracle_lattice01(&cvp).unwrap();
        assert_eq!(v.exact_min.unwrap().value, 1.into());
        assert_eq!(v.witness, Some(Witness::Coefficients(vec![0, 0])));
        assert_eq!(v.enumerated, 4);
    }

    #[test]
    fn lattice_no_side_has_no_witness() {
        let v = oracle_lattice01(&lattice(&[&[4, 0], &[0, 4]], None, NormKind::LInf, 1)).unwrap();
        assert_eq!(v.label, GapSide::No);
        assert_eq!(v.witness, None);
        assert_eq!(v.exact_min.unwrap().value, 4.into());
    }

    #[test]
    fn lattice_big_path_matches_word_path() {
        let huge: BigInt = BigInt::from(i64::MAX) * 4;
        let inst = Lattice01Instance::new(
            params(NormKind::L2, 1, Gamma::integer(2).unwrap()),
            vec![
                ExactPoint::new(vec![huge.clone(), 0.into()]).unwrap(),
                ExactPoint::new(vec![-huge.clone() + 1, 1.into()]).unwrap(),
            ],
            None,
        )
        .unwrap();
        let v = oracle_lattice01(&inst).unwrap();
        // b₁ + b₂ = (1, 1) with squared norm 2.
        assert_eq!(v.exact_min.unwrap().value, 2.into());
        assert_eq!(v.witness, Some(Witness::Coefficients(vec![1, 1])));
    }

    #[test]
    fn lattice_refuses_over_budget() {
        let rows: Vec<Vec<i64>> = (0..5)
            .map(|i| (0..5).map(|j| i64::from(i == j)).collect())
            .collect();
        let inst = Lattice01Instance::new(
            params(NormKind::L1, 1, Gamma::integer(2).unwrap()),
            rows.iter().map(|r| pt(r)).collect(),
            None,
        )
        .unwrap();
        let tight = Budget {
            oracle_bits: 4,
            ..Budget::default()
        };
        assert!(matches!(
            oracle_lattice01_with(&inst, &tight),
            Err(Error::OverBudget { .. })
        ));
    }

    fn family(supersets: &[&str], subsets: &[&str]) -> SetFamilyInstance {
        SetFamilyInstance {
            d: supersets[0].len(),
            supersets: supersets.iter().map(|s| bits_from_str(s).unwrap()).collect(),
            subsets: subsets.iter().map(|s| bits_from_str(s).unwrap()).collect(),
        }
    }

    #[test]
    fn subset_query_examples() {
        let v = oracle_subset_query(&family(&["101"], &["100"]));
        assert_eq!(v.label, GapSide::Yes);
        assert_eq!(v.witness, Some(Witness::Containment { subset: 0, superset: 0 }));
        assert_eq!(oracle_subset_query(&family(&["101"], &["010"])).label, GapSide::No);
        assert_eq!(oracle_subset_query(&family(&["000", "010"], &["000"])).label, GapSide::Yes);
        let v = oracle_subset_query(&family(&["110", "011"], &["001", "010"]));
        assert_eq!(v.witness, Some(Witness::Containment { subset: 0, superset: 1 }));
        assert_eq!(v.enumerated, 4);
    }

    #[test]
    fn sat_examples() {
        let xor = CnfInstance::from_dimacs(2, 2, &[&[1, 2], &[-1, -2]]).unwrap();
        let v = oracle_sat(&xor).unwrap();
        assert_eq!(v.witness, Some(Witness::Assignment(vec![false, true])));
        assert_eq!(v.enumerated, 4);
        let contradiction = CnfInstance::from_dimacs(1, 1, &[&[1], &[-1]]).unwrap();
        assert_eq!(oracle_sat(&contradiction).unwrap().label, GapSide::No);
        let empty = CnfInstance::from_dimacs(3, 3, &[]).unwrap();
        assert_eq!(
            oracle_sat(&empty).unwrap().witness,
            Some(Witness::Assignment(vec![false; 3]))
        );
        let empty_clause = CnfInstance::from_dimacs(2, 2, &[&[]]).unwrap();
        assert_eq!(oracle_sat(&empty_clause).unwrap().label, GapSide::No);
    }

    #[test]
    fn sat_witness_satisfies() {
        let cnf = CnfInstance::from_dimacs(4, 3, &[&[1, -2, 3], &[-1, 4], &[2, -4], &[-3]]).unwrap();
        match oracle_sat(&cnf).unwrap().witness {
            Some(Witness::Assignment(a)) => assert!(cnf.is_satisfied_by(&a)),
            other => panic!("expected assignment, got {other:?}"),
        }
    }
}
