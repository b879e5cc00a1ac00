//! Dense root-of-unity families and the right-inverse sections of power maps.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::circle::{RationalAngle, TorusPoint};
use crate::endo::{EndoMap, Permutation};
use crate::error::{Error, Result};

/// `{z : z^(base^level) = 1}`, the `base^level` evenly spaced points `j/base^level`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootFamily {
    base: BigInt,
    level: u32,
}

impl RootFamily {
    pub fn new(base: impl Into<BigInt>, level: u32) -> Result<Self> {
        let base = base.into();
        if base < BigInt::from(2) {
            return Err(Error::Precondition(format!(
                "family base must be at least 2, got {base}"
            )));
        }
        if level < 1 {
            return Err(Error::Precondition("family level must be at least 1".into()));
        }
        Ok(RootFamily { base, level })
    }

    pub fn base(&self) -> &BigInt {
        &self.base
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    /// Number of points, `base^level`.
    pub fn order(&self) -> BigInt {
        Pow::pow(&self.base, self.level)
    }

    pub fn contains(&self, a: &RationalAngle) -> bool {
        self.order().is_multiple_of(a.denom())
    }

    /// Consecutive gap between points, `1/base^level`.
    pub fn gap(&self) -> BigRational {
        BigRational::new(BigInt::one(), self.order())
    }

    /// Points in increasing order.
    pub fn iter(&self) -> impl Iterator<Item = RationalAngle> {
        let order = self.order();
        num_iter_range(BigInt::zero(), order.clone())
            .map(move |j| RationalAngle::new(j, order.clone()).expect("positive order"))
    }
}

fn num_iter_range(start: BigInt, end: BigInt) -> impl Iterator<Item = BigInt> {
    std::iter::successors(Some(start), |j| Some(j + 1u32)).take_while(move |j| *j < end)
}

pub fn root_family_points(base: impl Into<BigInt>, level: u32) -> Result<Vec<RationalAngle>> {
    Ok(RootFamily::new(base, level)?.iter().collect())
}

/// Smallest level whose gap `base^-level` is strictly below `eps`.
pub fn density_level(base: impl Into<BigInt>, eps: &BigRational) -> Result<u32> {
    let base = base.into();
    if base < BigInt::from(2) {
        return Err(Error::Precondition(format!(
            "family base must be at least 2, got {base}"
        )));
    }
    if !eps.is_positive() {
        return Err(Error::Precondition("eps must be positive".into()));
    }
    let mut level = 1;
    let mut order = base.clone();
    while BigRational::new(BigInt::one(), order.clone()) >= *eps {
        level += 1;
        order *= &base;
    }
    Ok(level)
}

/// Outcome of iterating a power map on a root of unity.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CollapseCheck {
    /// `f^r(z)` is the identity for every `r` in `[level, horizon]`.
    pub holds: bool,
    /// Least `r` with `f^r(z)` equal to the identity, if reached by the horizon.
    pub first_zero: Option<u64>,
}

/// Iterates `z ↦ z^n` on `z ∈ F_level^n` and checks it sits at the identity
/// for every `r` from `level` up to `horizon`.
pub fn forward_collapse_check(n: &BigInt, z: &RationalAngle, level: u32, horizon: u64) -> Result<CollapseCheck> {
    let family = RootFamily::new(n.clone(), level)?;
    if !family.contains(z) {
        return Err(Error::Precondition(format!(
            "{z} has order {} which does not divide {n}^{level}",
            z.order()
        )));
    }
    if horizon < u64::from(level) {
        return Err(Error::Precondition(format!("horizon {horizon} is below level {level}")));
    }
    let mut a = z.clone();
    let mut first_zero = None;
    let mut holds = true;
    for r in 0..=horizon {
        if a.is_zero() && first_zero.is_none() {
            first_zero = Some(r);
        }
        if r >= u64::from(level) && !a.is_zero() {
            holds = false;
        }
        a = a.pow(n);
    }
    Ok(CollapseCheck { holds, first_zero })
}

/// `t ↦ t / n^r`, the section of `r` iterations of `z ↦ z^n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PsiCircle {
    divisor: BigInt,
}

impl PsiCircle {
    /// Requires `|n| >= 2`; a negative base divides by the signed power.
    pub fn new(n: &BigInt, r: u64) -> Result<Self> {
        if n.abs() < BigInt::from(2) {
            return Err(Error::Precondition(format!(
                "power map base must satisfy |n| >= 2, got {n}"
            )));
        }
        let r = u32::try_from(r).map_err(|_| Error::Precondition(format!("iteration {r} too large")))?;
        Ok(PsiCircle {
            divisor: Pow::pow(n, r),
        })
    }

    pub fn divisor(&self) -> &BigInt {
        &self.divisor
    }

    pub fn apply(&self, t: &RationalAngle) -> RationalAngle {
        t.div_int(&self.divisor).expect("nonzero divisor")
    }
}

pub fn psi_circle(n: &BigInt, r: u64) -> Result<PsiCircle> {
    PsiCircle::new(n, r)
}

/// Exact right inverse of `n` iterations of a permutation-power map.
///
/// Coordinate `i` of `f^n(w)` is `w_{σ^-n(i)}` raised to
/// `P_i = m_{σ^-(n-1)(i)} ⋯ m_{σ^-1(i)} m_i`, so the section puts
/// `z_i^(1/P_i)` at position `σ^-n(i)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PsiPermPower {
    /// `source[j] = i` where `j = σ^-n(i)`.
    source: Vec<usize>,
    /// `divisor[j] = P_i` for the same `i`.
    divisor: Vec<BigInt>,
}

impl PsiPermPower {
    pub fn new(sigma: &Permutation, m: &[BigInt], n: u64) -> Result<Self> {
        let k = sigma.len();
        if m.len() != k {
            return Err(Error::DimensionMismatch {
                expected: k,
                found: m.len(),
            });
        }
        if let Some(i) = m.iter().position(Zero::is_zero) {
            return Err(Error::Precondition(format!(
                "exponent m_{} is zero; the map has no right inverse",
                i + 1
            )));
        }
        let inv = sigma.inverse();
        let mut source = vec![0; k];
        let mut divisor = vec![BigInt::one(); k];
        for i in 0..k {
            let mut idx = i;
            let mut prod = BigInt::one();
            for _ in 0..n {
                prod *= &m[idx];
                idx = inv.apply(idx);
            }
            source[idx] = i;
            divisor[idx] = prod;
        }
        Ok(PsiPermPower { source, divisor })
    }

    pub fn dim(&self) -> usize {
        self.source.len()
    }

    /// The exponent products `P`, indexed by target position.
    pub fn divisors(&self) -> &[BigInt] {
        &self.divisor
    }

    pub fn apply(&self, z: &TorusPoint) -> Result<TorusPoint> {
        if z.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: z.dim(),
            });
        }
        let c = z.coords();
        TorusPoint::new(
            self.source
                .iter()
                .zip(&self.divisor)
                .map(|(&i, d)| c[i].div_int(d).expect("nonzero divisor"))
                .collect(),
        )
    }
}

/// Section of `n` iterations of a permutation-power map.
pub fn psi_perm_power(f: &EndoMap, n: u64) -> Result<PsiPermPower> {
    match f {
        EndoMap::PermPower { sigma, m } => PsiPermPower::new(sigma, m, n),
        _ => Err(Error::Precondition("section requires a permutation-power map".into())),
    }
}
