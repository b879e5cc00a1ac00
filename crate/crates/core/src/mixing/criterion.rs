//! Finite-horizon check of the semigroup mixing criterion.
//!
//! Given dense sample sets `F`, `H` and sections `ψ_n`, the criterion asks for
//!
//! * (i) `φ^n(h) → e` for `h ∈ H`,
//! * (ii) `ψ_n(f) → e` for `f ∈ F`,
//! * (iii) `φ^n(ψ_n(f)) → f` for `f ∈ F`.
//!
//! A finite run cannot prove a limit. Each condition records the exact
//! distance at every `n` in `1..=horizon` and passes when the trace is
//! consistent with convergence: identically zero from some index on, or (for
//! conditions judged against a tolerance) strictly below the tolerance on the
//! final quarter of the horizon.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circle::{RationalAngle, TorusPoint};
use crate::endo::EndoMap;
use crate::error::{Error, Result};
use crate::mixing::classify::orbit_gcds_by_index;
use crate::mixing::roots::{PsiCircle, PsiPermPower};
use crate::rational::ratio_str;

/// A dynamical system together with its candidate sections.
pub trait CriterionSystem: Sync {
    type Point: Clone + PartialEq + Send + Sync;

    /// Rejects samples that do not belong to the space.
    fn validate(&self, p: &Self::Point) -> Result<()>;
    fn identity(&self) -> Self::Point;
    fn step(&self, p: &Self::Point) -> Self::Point;
    fn distance(&self, a: &Self::Point, b: &Self::Point) -> BigRational;
    /// `ψ_n(p)`.
    fn section(&self, n: u64, p: &Self::Point) -> Self::Point;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConvergenceRule {
    /// Trace must be exactly zero from some index on.
    ExactZero,
    /// Exactly zero from some index on, or below tolerance on the final quarter.
    BelowTolerance,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TraceStatus {
    ConsistentWithConvergence,
    NotConsistentWithConvergence,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TracePoint {
    pub n: u64,
    #[serde(with = "ratio_str")]
    pub distance: BigRational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleTrace {
    pub sample: usize,
    /// First index from which every recorded distance is exactly zero.
    pub zero_from: Option<u64>,
    pub pass: bool,
    pub values: Vec<TracePoint>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub rule: ConvergenceRule,
    pub pass: bool,
    pub status: TraceStatus,
    /// Largest per-sample `zero_from`, when every sample settles at zero.
    pub zero_from: Option<u64>,
    pub traces: Vec<SampleTrace>,
}

impl ConditionReport {
    /// Every recorded distance is exactly zero.
    pub fn all_zero(&self) -> bool {
        self.traces
            .iter()
            .all(|t| t.values.iter().all(|v| v.distance.is_zero()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CriterionReport {
    pub horizon: u64,
    #[serde(with = "ratio_str")]
    pub tolerance: BigRational,
    /// Witnesses come from an exact construction; conditions (i) and (iii)
    /// are then judged by [`ConvergenceRule::ExactZero`].
    pub exact_witnesses: bool,
    pub cond_i: ConditionReport,
    pub cond_ii: ConditionReport,
    pub cond_iii: ConditionReport,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CriterionOptions {
    pub horizon: u64,
    pub tolerance: BigRational,
    pub exact_witnesses: bool,
}

impl CriterionOptions {
    pub fn exact(horizon: u64, tolerance: BigRational) -> Self {
        CriterionOptions {
            horizon,
            tolerance,
            exact_witnesses: true,
        }
    }
}

/// First index of the final quarter of `1..=horizon`.
fn tail_start(horizon: u64) -> u64 {
    horizon - (horizon / 4).max(1) + 1
}

fn judge(sample: usize, values: Vec<TracePoint>, rule: ConvergenceRule, opts: &CriterionOptions) -> SampleTrace {
    let zero_from = match values.iter().rposition(|v| !v.distance.is_zero()) {
        None => values.first().map(|v| v.n),
        Some(last) => values.get(last + 1).map(|v| v.n),
    };
    let tail = tail_start(opts.horizon);
    let pass = zero_from.is_some()
        || (rule == ConvergenceRule::BelowTolerance
            && values
                .iter()
                .filter(|v| v.n >= tail)
                .all(|v| v.distance < opts.tolerance));
    SampleTrace {
        sample,
        zero_from,
        pass,
        values,
    }
}

fn condition(traces: Vec<SampleTrace>, rule: ConvergenceRule) -> ConditionReport {
    let pass = traces.iter().all(|t| t.pass);
    let zero_from = traces
        .iter()
        .map(|t| t.zero_from)
        .try_fold(0, |acc, z| z.map(|z| acc.max(z)));
    ConditionReport {
        rule,
        pass,
        status: if pass {
            TraceStatus::ConsistentWithConvergence
        } else {
            TraceStatus::NotConsistentWithConvergence
        },
        zero_from,
        traces,
    }
}

/// Evaluates conditions (i)–(iii) at every `n ≤ horizon` on each sample.
pub fn criterion_check<S: CriterionSystem>(
    system: &S,
    f_samples: &[S::Point],
    h_samples: &[S::Point],
    opts: &CriterionOptions,
) -> Result<CriterionReport> {
    if opts.horizon == 0 {
        return Err(Error::Precondition("horizon must be positive".into()));
    }
    if !opts.tolerance.is_positive() {
        return Err(Error::Precondition("tolerance must be positive".into()));
    }
    if f_samples.is_empty() || h_samples.is_empty() {
        return Err(Error::Precondition(
            "criterion needs at least one F and one H sample".into(),
        ));
    }
    for p in f_samples.iter().chain(h_samples) {
        system.validate(p)?;
    }
    let horizon = opts.horizon;
    let e = system.identity();
    let exact_rule = if opts.exact_witnesses {
        ConvergenceRule::ExactZero
    } else {
        ConvergenceRule::BelowTolerance
    };

    let cond_i: Vec<SampleTrace> = h_samples
        .par_iter()
        .enumerate()
        .map(|(idx, h)| {
            let mut cur = h.clone();
            let values = (1..=horizon)
                .map(|n| {
                    cur = system.step(&cur);
                    TracePoint {
                        n,
                        distance: system.distance(&cur, &e),
                    }
                })
                .collect();
            judge(idx, values, exact_rule, opts)
        })
        .collect();

    let (cond_ii, cond_iii): (Vec<SampleTrace>, Vec<SampleTrace>) = f_samples
        .par_iter()
        .enumerate()
        .map(|(idx, f)| {
            let mut near_e = Vec::with_capacity(horizon as usize);
            let mut recovered = Vec::with_capacity(horizon as usize);
            for n in 1..=horizon {
                let lifted = system.section(n, f);
                near_e.push(TracePoint {
                    n,
                    distance: system.distance(&lifted, &e),
                });
                let mut cur = lifted;
                for _ in 0..n {
                    cur = system.step(&cur);
                }
                recovered.push(TracePoint {
                    n,
                    distance: system.distance(&cur, f),
                });
            }
            (
                judge(idx, near_e, ConvergenceRule::BelowTolerance, opts),
                judge(idx, recovered, exact_rule, opts),
            )
        })
        .unzip();

    let cond_i = condition(cond_i, exact_rule);
    let cond_ii = condition(cond_ii, ConvergenceRule::BelowTolerance);
    let cond_iii = condition(cond_iii, exact_rule);
    let pass = cond_i.pass && cond_ii.pass && cond_iii.pass;
    Ok(CriterionReport {
        horizon,
        tolerance: opts.tolerance.clone(),
        exact_witnesses: opts.exact_witnesses,
        cond_i,
        cond_ii,
        cond_iii,
        pass,
    })
}

/// Sections available for torus maps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TorusSection {
    /// `t ↦ t / base^n` on every coordinate.
    CircleRoots { base: BigInt },
    /// Exact right inverse of a permutation-power map.
    PermRoots,
}

/// A torus endomorphism paired with a section family.
#[derive(Clone, Debug)]
pub struct TorusCriterion {
    map: EndoMap,
    section: TorusSection,
}

impl TorusCriterion {
    /// Circle power map (or any map) with the `base`-adic root sections.
    pub fn with_circle_roots(map: EndoMap, base: BigInt) -> Result<Self> {
        PsiCircle::new(&base, 0)?;
        Ok(TorusCriterion {
            map,
            section: TorusSection::CircleRoots { base },
        })
    }

    /// Permutation-power map with its exact right-inverse sections.
    pub fn with_perm_roots(map: EndoMap) -> Result<Self> {
        match &map {
            EndoMap::PermPower { sigma, m } => {
                PsiPermPower::new(sigma, m, 0)?;
            }
            _ => return Err(Error::Precondition("perm-power sections need a perm-power map".into())),
        }
        Ok(TorusCriterion {
            map,
            section: TorusSection::PermRoots,
        })
    }

    pub fn map(&self) -> &EndoMap {
        &self.map
    }
}

impl CriterionSystem for TorusCriterion {
    type Point = TorusPoint;

    fn validate(&self, p: &TorusPoint) -> Result<()> {
        if p.dim() != self.map.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.map.dim(),
                found: p.dim(),
            });
        }
        Ok(())
    }

    fn identity(&self) -> TorusPoint {
        TorusPoint::identity(self.map.dim())
    }

    fn step(&self, p: &TorusPoint) -> TorusPoint {
        self.map.apply(p).expect("validated dimension")
    }

    fn distance(&self, a: &TorusPoint, b: &TorusPoint) -> BigRational {
        a.dist(b).expect("validated dimension")
    }

    fn section(&self, n: u64, p: &TorusPoint) -> TorusPoint {
        match (&self.section, &self.map) {
            (TorusSection::CircleRoots { base }, _) => {
                let psi = PsiCircle::new(base, n).expect("validated base");
                TorusPoint::new(p.coords().iter().map(|a| psi.apply(a)).collect()).expect("nonempty")
            }
            (TorusSection::PermRoots, EndoMap::PermPower { sigma, m }) => PsiPermPower::new(sigma, m, n)
                .and_then(|psi| psi.apply(p))
                .expect("validated exponents"),
            (TorusSection::PermRoots, _) => unreachable!("checked at construction"),
        }
    }
}

/// A few nonzero points of each level `1..=max_level` of the `base`-adic
/// root family: `j/base^level` for `j ∈ {1, ⌊(order-1)/2⌋, order-1}`.
pub fn circle_root_samples(base: &BigInt, max_level: u32) -> Result<Vec<TorusPoint>> {
    let base = base.abs();
    if base < BigInt::from(2) {
        return Err(Error::Precondition(format!(
            "family base must be at least 2, got {base}"
        )));
    }
    let mut out: Vec<TorusPoint> = Vec::new();
    let mut order = BigInt::from(1);
    for _ in 0..max_level {
        order *= &base;
        let one = BigInt::from(1);
        let mut js = vec![one.clone(), (&order - &one) / 2, &order - &one];
        js.dedup();
        for j in js {
            let p = TorusPoint::new(vec![RationalAngle::new(j, order.clone())?])?;
            if !p.is_identity() && !out.contains(&p) {
                out.push(p);
            }
        }
    }
    Ok(out)
}

/// Points of `F^{s_1}_L × ⋯ × F^{s_k}_L` for `L = 1..=max_level`, where `s_i`
/// is the exponent gcd over the orbit of `i`. Three points per level.
pub fn orbit_root_samples(map: &EndoMap, max_level: u32) -> Result<Vec<TorusPoint>> {
    let EndoMap::PermPower { sigma, m } = map else {
        return Err(Error::Precondition("orbit families need a perm-power map".into()));
    };
    let gcds = orbit_gcds_by_index(sigma, m)?;
    if let Some(i) = gcds.iter().position(|s| s.abs() < BigInt::from(2)) {
        return Err(Error::Precondition(format!(
            "orbit gcd at index {} is {}; the family needs gcd >= 2",
            i + 1,
            gcds[i]
        )));
    }
    let mut out = Vec::new();
    for level in 1..=max_level {
        for variant in 0u32..3 {
            let coords = gcds
                .iter()
                .enumerate()
                .map(|(i, s)| {
                    let order = num_traits::Pow::pow(&s.abs(), level);
                    let j = BigInt::from(1 + variant + i as u32 * 2);
                    RationalAngle::new(j, order)
                })
                .collect::<Result<Vec<_>>>()?;
            let p = TorusPoint::new(coords)?;
            if !out.contains(&p) {
                out.push(p);
            }
        }
    }
    Ok(out)
}
