//! Exact arithmetic on the circle group and on finite tori.
//!
//! A point of the circle is stored as a number of turns `t` in `[0, 1)`, so
//! `e^{2πit}` is the corresponding unit complex number. The group product of
//! the circle becomes addition of turns mod 1, and `z^n` becomes `n·t mod 1`.
//! Every root of unity is therefore an exact rational.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rational::{format_ratio, parse_ratio, ratio_str};

/// A point of the circle as a reduced fraction of a turn, `0 <= num < den`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RationalAngle {
    num: BigInt,
    den: BigInt,
}

impl RationalAngle {
    /// The identity `0/1`.
    pub fn zero() -> Self {
        RationalAngle {
            num: BigInt::zero(),
            den: BigInt::one(),
        }
    }

    /// Reduced representative of `p/q mod 1`.
    pub fn new(p: impl Into<BigInt>, q: impl Into<BigInt>) -> Result<Self> {
        let (p, q) = (p.into(), q.into());
        if q.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        Ok(Self::normalize(p, q))
    }

    pub fn from_ratio(r: &BigRational) -> Self {
        Self::normalize(r.numer().clone(), r.denom().clone())
    }

    // q != 0
    fn normalize(p: BigInt, q: BigInt) -> Self {
        let (p, q) = if q.is_negative() { (-p, -q) } else { (p, q) };
        let p = p.mod_floor(&q);
        let g = p.gcd(&q);
        if g.is_one() {
            RationalAngle { num: p, den: q }
        } else {
            RationalAngle {
                num: p / &g,
                den: q / &g,
            }
        }
    }

    pub fn numer(&self) -> &BigInt {
        &self.num
    }

    pub fn denom(&self) -> &BigInt {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn to_ratio(&self) -> BigRational {
        BigRational::new_raw(self.num.clone(), self.den.clone())
    }

    /// Group product of the circle: `(a + b) mod 1`.
    pub fn mul(&self, other: &Self) -> Self {
        if self.den == other.den {
            return Self::normalize(&self.num + &other.num, self.den.clone());
        }
        Self::normalize(&self.num * &other.den + &other.num * &self.den, &self.den * &other.den)
    }

    /// Group inverse: `-a mod 1`.
    pub fn inv(&self) -> Self {
        if self.num.is_zero() {
            return self.clone();
        }
        RationalAngle {
            num: &self.den - &self.num,
            den: self.den.clone(),
        }
    }

    /// `z ↦ z^n`, i.e. `n·a mod 1`. Negative and zero exponents are allowed.
    pub fn pow(&self, n: &BigInt) -> Self {
        Self::normalize(&self.num * n, self.den.clone())
    }

    /// Canonical `n`-th root: the angle `a/n` in `[0, 1/n)`.
    pub fn root(&self, n: &BigInt) -> Result<Self> {
        if !n.is_positive() {
            return Err(Error::Precondition(format!("root index must be positive, got {n}")));
        }
        Ok(Self::normalize(self.num.clone(), &self.den * n))
    }

    /// Divides the angle by a nonzero integer: the unique `w` with
    /// `w = a/d mod 1` taken from the representative `a` in `[0, 1)`.
    /// For `d > 0` this is [`root`](Self::root).
    pub fn div_int(&self, d: &BigInt) -> Result<Self> {
        if d.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        Ok(Self::normalize(self.num.clone(), &self.den * d))
    }

    /// Order of this element in the circle group (its reduced denominator).
    pub fn order(&self) -> &BigInt {
        &self.den
    }
}

/// Shortest-arc distance in turns, in `[0, 1/2]`.
pub fn circle_dist(a: &RationalAngle, b: &RationalAngle) -> BigRational {
    let diff = (a.to_ratio() - b.to_ratio()).abs();
    let other = BigRational::one() - &diff;
    if diff <= other {
        diff
    } else {
        other
    }
}

impl fmt::Debug for RationalAngle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl fmt::Display for RationalAngle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl FromStr for RationalAngle {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(Self::from_ratio(&parse_ratio(s)?))
    }
}

impl PartialOrd for RationalAngle {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Orders by turn value in `[0, 1)`.
impl Ord for RationalAngle {
    fn cmp(&self, other: &Self) -> Ordering {
        (&self.num * &other.den).cmp(&(&other.num * &self.den))
    }
}

impl Serialize for RationalAngle {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for RationalAngle {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        ratio_str::deserialize(d).map(|r| RationalAngle::from_ratio(&r))
    }
}

/// A point of the torus `T^k`, `k >= 1`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct TorusPoint {
    coords: Vec<RationalAngle>,
}

impl TorusPoint {
    pub fn new(coords: Vec<RationalAngle>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::Precondition("torus point needs at least one coordinate".into()));
        }
        Ok(TorusPoint { coords })
    }

    pub fn identity(dim: usize) -> Self {
        assert!(dim >= 1, "torus dimension must be at least 1");
        TorusPoint {
            coords: vec![RationalAngle::zero(); dim],
        }
    }

    /// Parses a list of `"p/q"` strings.
    pub fn parse<S: AsRef<str>>(coords: &[S]) -> Result<Self> {
        let coords = coords
            .iter()
            .map(|s| s.as_ref().parse())
            .collect::<Result<Vec<RationalAngle>>>()?;
        Self::new(coords)
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[RationalAngle] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<RationalAngle> {
        self.coords
    }

    pub fn is_identity(&self) -> bool {
        self.coords.iter().all(RationalAngle::is_zero)
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(())
    }

    /// Componentwise group product.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        Ok(TorusPoint {
            coords: self.coords.iter().zip(&other.coords).map(|(a, b)| a.mul(b)).collect(),
        })
    }

    pub fn inv(&self) -> Self {
        TorusPoint {
            coords: self.coords.iter().map(RationalAngle::inv).collect(),
        }
    }

    /// Max-over-coordinates circle distance; bounded by 1/2.
    pub fn dist(&self, other: &Self) -> Result<BigRational> {
        self.check_dim(other)?;
        Ok(self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| circle_dist(a, b))
            .max()
            .unwrap_or_else(BigRational::zero))
    }

    pub fn dist_to_identity(&self) -> BigRational {
        self.coords
            .iter()
            .map(|a| circle_dist(a, &RationalAngle::zero()))
            .max()
            .unwrap_or_else(BigRational::zero)
    }
}

impl fmt::Debug for TorusPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.coords).finish()
    }
}

impl<'de> Deserialize<'de> for TorusPoint {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let coords = Vec::<RationalAngle>::deserialize(d)?;
        TorusPoint::new(coords).map_err(serde::de::Error::custom)
    }
}

/// Open arc of the circle: points strictly closer than `halfwidth` to `center`.
/// A halfwidth of exactly 1/2 is the whole circle.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Arc {
    center: RationalAngle,
    #[serde(with = "ratio_str")]
    halfwidth: BigRational,
}

impl Arc {
    pub fn new(center: RationalAngle, halfwidth: BigRational) -> Result<Self> {
        if !halfwidth.is_positive() {
            return Err(Error::InvalidArc(format!(
                "halfwidth must be positive, got {}",
                format_ratio(&halfwidth)
            )));
        }
        if halfwidth > half() {
            return Err(Error::InvalidArc(format!(
                "halfwidth must be at most 1/2, got {}",
                format_ratio(&halfwidth)
            )));
        }
        Ok(Arc { center, halfwidth })
    }

    pub fn full() -> Self {
        Arc {
            center: RationalAngle::zero(),
            halfwidth: half(),
        }
    }

    pub fn center(&self) -> &RationalAngle {
        &self.center
    }

    pub fn halfwidth(&self) -> &BigRational {
        &self.halfwidth
    }

    pub fn is_full(&self) -> bool {
        self.halfwidth == half()
    }

    pub fn contains(&self, a: &RationalAngle) -> bool {
        self.is_full() || circle_dist(&self.center, a) < self.halfwidth
    }
}

impl<'de> Deserialize<'de> for Arc {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Raw {
            center: RationalAngle,
            #[serde(with = "ratio_str")]
            halfwidth: BigRational,
        }
        let raw = Raw::deserialize(d)?;
        Arc::new(raw.center, raw.halfwidth).map_err(serde::de::Error::custom)
    }
}

pub fn arc_contains(arc: &Arc, a: &RationalAngle) -> bool {
    arc.contains(a)
}

/// Product of open arcs, an open subset of `T^k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct ArcProduct {
    arcs: Vec<Arc>,
}

impl ArcProduct {
    pub fn new(arcs: Vec<Arc>) -> Result<Self> {
        if arcs.is_empty() {
            return Err(Error::InvalidArc("arc product needs at least one arc".into()));
        }
        Ok(ArcProduct { arcs })
    }

    pub fn dim(&self) -> usize {
        self.arcs.len()
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn contains(&self, z: &TorusPoint) -> bool {
        z.dim() == self.dim() && self.arcs.iter().zip(z.coords()).all(|(arc, a)| arc.contains(a))
    }
}

impl<'de> Deserialize<'de> for ArcProduct {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Many(Vec<Arc>),
            One(Arc),
        }
        let arcs = match Raw::deserialize(d)? {
            Raw::Many(arcs) => arcs,
            Raw::One(arc) => vec![arc],
        };
        ArcProduct::new(arcs).map_err(serde::de::Error::custom)
    }
}

fn half() -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(2))
}
