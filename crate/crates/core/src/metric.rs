//! Exact geometry over integer numerators.
//!
//! Every coordinate is an arbitrary-precision integer read against one
//! instance-wide positive denominator (the scale). Distances are exact:
//! ℓ₁ and ℓ∞ magnitudes are carried as-is and ℓ₂ magnitudes are always
//! carried squared, so a gap decision never touches a floating-point value.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// The supported ℓ_p norms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NormKind {
    L1,
    L2,
    LInf,
}

impl NormKind {
    /// 2 for ℓ₂ (squared representation), 1 otherwise.
    pub fn power(self) -> u32 {
        match self {
            NormKind::L2 => 2,
            _ => 1,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            NormKind::L1 => "1",
            NormKind::L2 => "2",
            NormKind::LInf => "inf",
        }
    }

    pub const ALL: [NormKind; 3] = [NormKind::L1, NormKind::L2, NormKind::LInf];
}

impl fmt::Display for NormKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for NormKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "1" | "l1" => Ok(NormKind::L1),
            "2" | "l2" => Ok(NormKind::L2),
            "inf" | "linf" | "infinity" | "∞" => Ok(NormKind::LInf),
            other => Err(Error::Parameter(format!(
                "unknown norm '{other}' (expected 1, 2 or inf)"
            ))),
        }
    }
}

/// A point with integer numerators. The denominator lives on the owning
/// instance.
///
/// When every coordinate fits in an `i64` a machine-word copy is kept next to
/// the big integers; distance evaluation uses it with checked `i128`
/// arithmetic and falls back to big integers on overflow.
#[derive(Clone)]
pub struct ExactPoint {
    coords: Vec<BigInt>,
    words: Option<Vec<i64>>,
}

impl ExactPoint {
    pub fn new(coords: Vec<BigInt>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::Invariant("points need dimension ≥ 1".into()));
        }
        let words = coords.iter().map(|c| c.to_i64()).collect();
        Ok(Self { coords, words })
    }

    pub fn from_i64(coords: &[i64]) -> Result<Self> {
        Self::new(coords.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero(dim: usize) -> Result<Self> {
        Self::new(vec![BigInt::zero(); dim])
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[BigInt] {
        &self.coords
    }

    pub(crate) fn words(&self) -> Option<&[i64]> {
        self.words.as_deref()
    }

    pub fn into_coords(self) -> Vec<BigInt> {
        self.coords
    }

    fn zip_with(&self, other: &Self, op: impl Fn(&BigInt, &BigInt) -> BigInt) -> Result<Self> {
        check_dims(self, other)?;
        Self::new(
            self.coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| op(a, b))
                .collect(),
        )
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn neg(&self) -> Self {
        Self::new(self.coords.iter().map(|c| -c).collect()).expect("dimension preserved")
    }

    /// Norm of the point itself, i.e. its distance to the origin.
    pub fn norm(&self, p: NormKind) -> BigInt {
        let zero = ExactPoint::zero(self.dim()).expect("dim ≥ 1");
        distance_value(self, &zero, p).expect("same dimension")
    }
}

impl PartialEq for ExactPoint {
    fn eq(&self, other: &Self) -> bool {
        self.coords == other.coords
    }
}

impl Eq for ExactPoint {}

impl Hash for ExactPoint {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.coords.hash(state);
    }
}

impl PartialOrd for ExactPoint {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExactPoint {
    fn cmp(&self, other: &Self) -> Ordering {
        self.coords.cmp(&other.coords)
    }
}

impl fmt::Debug for ExactPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// A non-negative distance or radius numerator with its denominator and
/// power (2 for squared ℓ₂ values).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ScaledMagnitude {
    pub value: BigInt,
    pub scale: u64,
    pub power: u32,
}

impl ScaledMagnitude {
    pub fn new(value: BigInt, scale: u64, power: u32) -> Result<Self> {
        if value.is_negative() {
            return Err(Error::Invariant("magnitudes are non-negative".into()));
        }
        if scale == 0 {
            return Err(Error::Invariant("scale must be positive".into()));
        }
        if !(1..=2).contains(&power) {
            return Err(Error::Invariant("power must be 1 or 2".into()));
        }
        Ok(Self {
            value,
            scale,
            power,
        })
    }

    /// The magnitude representing radius `r` under norm `p`: `r` for ℓ₁ and
    /// ℓ∞, `r²` for ℓ₂.
    pub fn radius(r: &BigInt, scale: u64, p: NormKind) -> Result<Self> {
        Self::new(r.pow(p.power()), scale, p.power())
    }

    pub fn with_scale(mut self, scale: u64) -> Result<Self> {
        if scale == 0 {
            return Err(Error::Invariant("scale must be positive".into()));
        }
        self.scale = scale;
        Ok(self)
    }

    /// The magnitude as an exact rational `value / scale^power`.
    pub fn to_rational(&self) -> BigRational {
        BigRational::new(self.value.clone(), BigInt::from(self.scale).pow(self.power))
    }

    /// Exact comparison; scales are cross-multiplied, powers must agree.
    pub fn try_cmp(&self, other: &Self) -> Result<Ordering> {
        if self.power != other.power {
            return Err(Error::Parameter(format!(
                "cannot compare power-{} and power-{} magnitudes",
                self.power, other.power
            )));
        }
        if self.scale == other.scale {
            return Ok(self.value.cmp(&other.value));
        }
        let lhs = &self.value * BigInt::from(other.scale).pow(self.power);
        let rhs = &other.value * BigInt::from(self.scale).pow(self.power);
        Ok(lhs.cmp(&rhs))
    }
}

impl fmt::Display for ScaledMagnitude {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.scale, self.power) {
            (1, 1) => write!(f, "{}", self.value),
            (1, _) => write!(f, "{} (squared)", self.value),
            (s, 1) => write!(f, "{}/{}", self.value, s),
            (s, _) => write!(f, "{}/{}^2 (squared)", self.value, s),
        }
    }
}

/// Approximation factor γ, an exact rational strictly greater than one.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Gamma(BigRational);

impl Gamma {
    pub fn new(value: BigRational) -> Result<Self> {
        if value <= BigRational::one() {
            return Err(Error::Parameter(format!("gamma must exceed 1, got {value}")));
        }
        Ok(Self(value))
    }

    pub fn from_ratio(num: i64, den: i64) -> Result<Self> {
        if den == 0 {
            return Err(Error::Parameter("gamma denominator is zero".into()));
        }
        Self::new(BigRational::new(num.into(), den.into()))
    }

    pub fn integer(value: i64) -> Result<Self> {
        Self::from_ratio(value, 1)
    }

    pub fn value(&self) -> &BigRational {
        &self.0
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    /// Smallest integer `k` with `k ≥ γ·r`.
    pub fn ceil_times(&self, r: &BigInt) -> BigInt {
        (&self.0 * BigRational::from_integer(r.clone()))
            .ceil()
            .to_integer()
    }
}

impl FromStr for Gamma {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let parse = |t: &str| {
            t.trim()
                .parse::<BigInt>()
                .map_err(|_| Error::Parameter(format!("bad rational '{s}'")))
        };
        let value = match s.split_once('/') {
            Some((n, d)) => {
                let d = parse(d)?;
                if d.is_zero() {
                    return Err(Error::Parameter("gamma denominator is zero".into()));
                }
                BigRational::new(parse(n)?, d)
            }
            None => BigRational::from_integer(parse(s)?),
        };
        Gamma::new(value)
    }
}

impl fmt::Display for Gamma {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Which side of a promise gap a distance falls on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GapSide {
    Yes,
    No,
    PromiseViolation,
}

impl GapSide {
    pub fn as_str(self) -> &'static str {
        match self {
            GapSide::Yes => "YES",
            GapSide::No => "NO",
            GapSide::PromiseViolation => "PROMISE_VIOLATION",
        }
    }
}

impl fmt::Display for GapSide {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

fn check_dims(a: &ExactPoint, b: &ExactPoint) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    Ok(())
}

fn distance_words(a: &[i64], b: &[i64], p: NormKind) -> Option<i128> {
    let mut diffs = a.iter().zip(b).map(|(&x, &y)| (x as i128 - y as i128).abs());
    match p {
        NormKind::L1 => diffs.try_fold(0i128, |acc, d| acc.checked_add(d)),
        NormKind::L2 => diffs.try_fold(0i128, |acc, d| acc.checked_add(d.checked_mul(d)?)),
        NormKind::LInf => Some(diffs.max().unwrap_or(0)),
    }
}

fn distance_big(a: &[BigInt], b: &[BigInt], p: NormKind) -> BigInt {
    let diffs = a.iter().zip(b).map(|(x, y)| (x - y).abs());
    match p {
        NormKind::L1 => diffs.sum(),
        NormKind::L2 => diffs.map(|d| &d * &d).sum(),
        NormKind::LInf => diffs.max().unwrap_or_default(),
    }
}

/// Exact distance numerator: Σ|aᵢ−bᵢ| for ℓ₁, Σ(aᵢ−bᵢ)² for ℓ₂, max|aᵢ−bᵢ|
/// for ℓ∞.
pub fn distance_value(a: &ExactPoint, b: &ExactPoint, p: NormKind) -> Result<BigInt> {
    check_dims(a, b)?;
    if let (Some(x), Some(y)) = (a.words(), b.words()) {
        if let Some(v) = distance_words(x, y, p) {
            return Ok(BigInt::from(v));
        }
    }
    Ok(distance_big(&a.coords, &b.coords, p))
}

/// Distance between two points as a unit-scale magnitude. Callers holding an
/// instance rescale with [`ScaledMagnitude::with_scale`].
pub fn distance(a: &ExactPoint, b: &ExactPoint, p: NormKind) -> Result<ScaledMagnitude> {
    ScaledMagnitude::new(distance_value(a, b, p)?, 1, p.power())
}

/// Places `dist` relative to the promise gap `[r, γr]`.
///
/// YES when `dist ≤ r`, NO when `dist ≥ γ·r` (`γ²·r` for squared
/// magnitudes), PROMISE_VIOLATION strictly in between.
pub fn classify_gap(
    dist: &ScaledMagnitude,
    r: &ScaledMagnitude,
    gamma: &BigRational,
) -> Result<GapSide> {
    if *gamma <= BigRational::one() {
        return Err(Error::Parameter(format!("gamma must exceed 1, got {gamma}")));
    }
    if dist.try_cmp(r)? != Ordering::Greater {
        return Ok(GapSide::Yes);
    }
    let (num, den) = (gamma.numer().pow(r.power), gamma.denom().pow(r.power));
    // dist/s_d^k ≥ (num/den)·r/s_r^k
    let s_d = BigInt::from(dist.scale).pow(dist.power);
    let s_r = BigInt::from(r.scale).pow(r.power);
    let lhs = &dist.value * den * s_r;
    let rhs = num * &r.value * s_d;
    Ok(if lhs >= rhs {
        GapSide::No
    } else {
        GapSide::PromiseViolation
    })
}

/// Precomputed gap thresholds for a fixed (r, γ, p), for hot loops where all
/// distances share the instance scale.
#[derive(Clone, Debug)]
pub struct GapThresholds {
    yes_max: BigInt,
    no_num: BigInt,
    no_den: BigInt,
}

impl GapThresholds {
    pub fn new(r: &BigInt, gamma: &Gamma, p: NormKind) -> Self {
        let k = p.power();
        Self {
            yes_max: r.pow(k),
            no_num: gamma.numer().pow(k) * r.pow(k),
            no_den: gamma.denom().pow(k),
        }
    }

    pub fn is_yes(&self, dist: &BigInt) -> bool {
        dist <= &self.yes_max
    }

    pub fn classify(&self, dist: &BigInt) -> GapSide {
        if self.is_yes(dist) {
            GapSide::Yes
        } else if dist * &self.no_den >= self.no_num {
            GapSide::No
        } else {
            GapSide::PromiseViolation
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pt(c: &[i64]) -> ExactPoint {
        ExactPoint::from_i64(c).unwrap()
    }

    fn mag(v: i64) -> ScaledMagnitude {
        ScaledMagnitude::new(v.into(), 1, 1).unwrap()
    }

    #[test]
    fn distance_examples() {
        let (a, b) = (pt(&[0, 3]), pt(&[1, 1]));
        assert_eq!(distance_value(&a, &b, NormKind::LInf).unwrap(), 2.into());
        assert_eq!(distance_value(&a, &b, NormKind::L1).unwrap(), 3.into());
        assert_eq!(distance_value(&a, &a, NormKind::L2).unwrap(), 0.into());
        assert_eq!(distance_value(&a, &b, NormKind::L2).unwrap(), 5.into());
    }

    #[test]
    fn distance_rejects_dimension_mismatch() {
        let err = distance(&pt(&[1]), &pt(&[1, 2]), NormKind::L1).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { .. }));
    }

    #[test]
    fn word_overflow_falls_back_to_big_integers() {
        let a = pt(&[i64::MAX, i64::MIN]);
        let b = pt(&[i64::MIN, i64::MAX]);
        let span = BigInt::from(i64::MAX) - BigInt::from(i64::MIN);
        assert_eq!(distance_value(&a, &b, NormKind::L2).unwrap(), &span * &span * 2);
        assert_eq!(distance_value(&a, &b, NormKind::L1).unwrap(), &span * 2);
        let huge = ExactPoint::new(vec![BigInt::from(10).pow(40)]).unwrap();
        let one = pt(&[1]);
        assert_eq!(
            distance_value(&huge, &one, NormKind::LInf).unwrap(),
            BigInt::from(10).pow(40) - 1
        );
    }

    #[test]
    fn classify_examples() {
        let three = BigRational::from_integer(3.into());
        let r = mag(1);
        assert_eq!(classify_gap(&mag(1), &r, &three).unwrap(), GapSide::Yes);
        assert_eq!(classify_gap(&mag(3), &r, &three).unwrap(), GapSide::No);
        assert_eq!(
            classify_gap(&mag(2), &r, &three).unwrap(),
            GapSide::PromiseViolation
        );
        assert!(classify_gap(&mag(2), &r, &BigRational::one()).is_err());
    }

    #[test]
    fn classify_squares_gamma_for_l2() {
        // r = 2 → r² = 4; γ = 3/2 → NO threshold γ²r² = 9.
        let r = ScaledMagnitude::radius(&2.into(), 1, NormKind::L2).unwrap();
        let gamma = BigRational::new(3.into(), 2.into());
        let sq = |v: i64| ScaledMagnitude::new(v.into(), 1, 2).unwrap();
        assert_eq!(classify_gap(&sq(4), &r, &gamma).unwrap(), GapSide::Yes);
        assert_eq!(classify_gap(&sq(8), &r, &gamma).unwrap(), GapSide::PromiseViolation);
        assert_eq!(classify_gap(&sq(9), &r, &gamma).unwrap(), GapSide::No);
        let th = GapThresholds::new(&2.into(), &Gamma::from_ratio(3, 2).unwrap(), NormKind::L2);
        assert_eq!(th.classify(&8.into()), GapSide::PromiseViolation);
        assert_eq!(th.classify(&9.into()), GapSide::No);
    }

    #[test]
    fn classify_cross_scales() {
        // 1/3 against r = 1/3 expressed at scale 6 (2/6).
        let dist = ScaledMagnitude::new(1.into(), 3, 1).unwrap();
        let r = ScaledMagnitude::new(2.into(), 6, 1).unwrap();
        let three = BigRational::from_integer(3.into());
        assert_eq!(classify_gap(&dist, &r, &three).unwrap(), GapSide::Yes);
        let far = ScaledMagnitude::new(1.into(), 1, 1).unwrap();
        assert_eq!(classify_gap(&far, &r, &three).unwrap(), GapSide::No);
        let squared = ScaledMagnitude::new(1.into(), 1, 2).unwrap();
        assert!(classify_gap(&squared, &r, &three).is_err());
    }

    #[test]
    fn gamma_parsing() {
        assert_eq!("3/2".parse::<Gamma>().unwrap(), Gamma::from_ratio(3, 2).unwrap());
        assert!("1".parse::<Gamma>().is_err());
        assert!("2/0".parse::<Gamma>().is_err());
        assert_eq!(Gamma::from_ratio(3, 2).unwrap().ceil_times(&3.into()), 5.into());
    }

    fn point_strategy(dim: usize) -> impl Strategy<Value = Vec<i64>> {
        proptest::collection::vec(-1000i64..1000, dim)
    }

    proptest! {
        #[test]
        fn symmetric(a in point_strategy(4), b in point_strategy(4)) {
            let (a, b) = (pt(&a), pt(&b));
            for p in NormKind::ALL {
                prop_assert_eq!(distance_value(&a, &b, p).unwrap(), distance_value(&b, &a, p).unwrap());
            }
        }

        #[test]
        fn triangle_inequality(a in point_strategy(3), b in point_strategy(3), c in point_strategy(3)) {
            let (a, b, c) = (pt(&a), pt(&b), pt(&c));
            for p in [NormKind::L1, NormKind::LInf] {
                let ac = distance_value(&a, &c, p).unwrap();
                let ab = distance_value(&a, &b, p).unwrap();
                let bc = distance_value(&b, &c, p).unwrap();
                prop_assert!(ac <= ab + bc);
            }
            // Squared form: √ac ≤ √ab + √bc  ⇔  ac ≤ ab + bc or (ac−ab−bc)² ≤ 4·ab·bc.
            let ac = distance_value(&a, &c, NormKind::L2).unwrap();
            let ab = distance_value(&a, &b, NormKind::L2).unwrap();
            let bc = distance_value(&b, &c, NormKind::L2).unwrap();
            let excess = &ac - &ab - &bc;
            prop_assert!(excess <= BigInt::zero() || &excess * &excess <= BigInt::from(4) * &ab * &bc);
        }

        #[test]
        fn chebyshev_below_manhattan(a in point_strategy(5), b in point_strategy(5)) {
            let (a, b) = (pt(&a), pt(&b));
            prop_assert!(distance_value(&a, &b, NormKind::LInf).unwrap() <= distance_value(&a, &b, NormKind::L1).unwrap());
        }

        #[test]
        fn word_path_matches_big_path(a in point_strategy(4), b in point_strategy(4)) {
            let (a, b) = (pt(&a), pt(&b));
            for p in NormKind::ALL {
                prop_assert_eq!(distance_value(&a, &b, p).unwrap(), distance_big(a.coords(), b.coords(), p));
            }
        }
    }
}
