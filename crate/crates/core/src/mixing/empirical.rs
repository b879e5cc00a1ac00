//! Search for witnesses of `f^n(U) ∩ V ≠ ∅` over arc products.
//!
//! Two deterministic searches run for each `n`:
//!
//! 1. *forward grid*: the interior grid of `U` (each arc cut into
//!    `resolution` equal pieces) is pushed forward step by step and the
//!    lexicographically first image landing in `V` is the witness;
//! 2. *section lift*: when the map has an exact right inverse `ψ_n`
//!    (circle powers, permutation powers with nonzero exponents) and the
//!    forward grid found nothing, each grid point `h` is corrected to
//!    `h · ψ_n(c · f^n(h)^{-1})` with `c` the centre of `V`, so that its image
//!    is exactly `c`; the first corrected point still inside `U` is the witness.
//!
//! Every witness is re-checked by an independent iteration before it is
//! reported. A missing witness means "not found at this resolution", never
//! "the intersection is empty".

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circle::{Arc, ArcProduct, RationalAngle, TorusPoint};
use crate::endo::EndoMap;
use crate::error::{Error, Result};
use crate::mixing::roots::{PsiCircle, PsiPermPower};

/// Grids larger than this are refused.
pub const MAX_GRID_POINTS: usize = 1 << 22;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessMethod {
    ForwardGrid,
    SectionLift,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Hit {
    WitnessFound {
        n: u64,
        method: WitnessMethod,
        witness: TorusPoint,
        image: TorusPoint,
    },
    NotFoundAtThisResolution {
        n: u64,
    },
}

impl Hit {
    pub fn n(&self) -> u64 {
        match self {
            Hit::WitnessFound { n, .. } | Hit::NotFoundAtThisResolution { n } => *n,
        }
    }

    pub fn witness(&self) -> Option<&TorusPoint> {
        match self {
            Hit::WitnessFound { witness, .. } => Some(witness),
            Hit::NotFoundAtThisResolution { .. } => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MixingReport {
    pub u: ArcProduct,
    pub v: ArcProduct,
    pub n_max: u64,
    pub resolution: u64,
    /// One entry per `n` in `1..=n_max`.
    pub hits: Vec<Hit>,
    /// Least `N` with a witness for every `n` in `(N, n_max]`.
    pub first_stable_n: Option<u64>,
    /// Covering bound for circle power maps, when it applies.
    pub analytic_cover_n: Option<u64>,
    /// Least `N` such that for every `n` in `[N, n_max]` each target
    /// `j/resolution` of the circle has an exact `f^n`-preimage in `U`
    /// (circle power maps only).
    pub grid_cover_n: Option<u64>,
}

impl MixingReport {
    fn new(f: &EndoMap, u: ArcProduct, v: ArcProduct, n_max: u64, resolution: u64, hits: Vec<Hit>) -> Result<Self> {
        for hit in &hits {
            if let Hit::WitnessFound { n, witness, image, .. } = hit {
                let check = f.iterate_via_matrix(witness, *n)?;
                if !u.contains(witness) || check != *image || !v.contains(&check) {
                    return Err(Error::Precondition(format!("witness for n = {n} failed revalidation")));
                }
            }
        }
        let first_stable_n = match hits.last() {
            Some(Hit::WitnessFound { .. }) => Some(hits.iter().rev().find(|h| h.witness().is_none()).map_or(0, Hit::n)),
            _ => None,
        };
        let analytic_cover_n = match (f, u.arcs()) {
            (EndoMap::CirclePower { n }, [arc]) if n.abs() >= BigInt::from(2) => analytic_cover_n(n, arc).ok(),
            _ => None,
        };
        let grid_cover_n = match (f, u.arcs()) {
            (EndoMap::CirclePower { n }, [arc]) if n.abs() >= BigInt::from(2) => {
                grid_cover_n(n, arc, n_max, resolution).ok().flatten()
            }
            _ => None,
        };
        Ok(MixingReport {
            u,
            v,
            n_max,
            resolution,
            hits,
            first_stable_n,
            analytic_cover_n,
            grid_cover_n,
        })
    }

    pub fn witnessed(&self, n: u64) -> bool {
        self.hits.iter().any(|h| h.n() == n && h.witness().is_some())
    }
}

/// Interior points `center + halfwidth·(2j - s)/s`, `j = 1..s-1`, in increasing offset.
pub fn arc_grid(arc: &Arc, resolution: u64) -> Vec<RationalAngle> {
    let s = BigInt::from(resolution);
    (1..resolution)
        .map(|j| {
            let offset = arc.halfwidth() * BigRational::new(BigInt::from(2 * j) - &s, s.clone());
            arc.center().mul(&RationalAngle::from_ratio(&offset))
        })
        .collect()
}

/// Lexicographic product of the per-arc grids (last axis varies fastest).
pub fn grid_points(u: &ArcProduct, resolution: u64) -> Result<Vec<TorusPoint>> {
    if resolution < 2 {
        return Err(Error::Precondition(format!(
            "resolution must be at least 2, got {resolution}"
        )));
    }
    let per_axis = (resolution - 1) as usize;
    let total = u
        .arcs()
        .iter()
        .try_fold(1usize, |acc, _| acc.checked_mul(per_axis))
        .filter(|&t| t <= MAX_GRID_POINTS)
        .ok_or_else(|| {
            Error::Precondition(format!(
                "grid of {per_axis}^{} points exceeds the limit of {MAX_GRID_POINTS}",
                u.dim()
            ))
        })?;
    let axes: Vec<Vec<RationalAngle>> = u.arcs().iter().map(|a| arc_grid(a, resolution)).collect();
    let d = axes.len();
    (0..total)
        .map(|mut idx| {
            let mut coords = vec![RationalAngle::zero(); d];
            for axis in (0..d).rev() {
                coords[axis] = axes[axis][idx % per_axis].clone();
                idx /= per_axis;
            }
            TorusPoint::new(coords)
        })
        .collect()
}

enum Section<'a> {
    Circle(&'a BigInt),
    Perm(&'a crate::endo::Permutation, &'a [BigInt]),
}

impl Section<'_> {
    fn for_map(f: &EndoMap) -> Option<Section<'_>> {
        match f {
            EndoMap::CirclePower { n } if n.abs() >= BigInt::from(2) => Some(Section::Circle(n)),
            EndoMap::PermPower { sigma, m } if m.iter().all(|x| !num_traits::Zero::is_zero(x)) => {
                Some(Section::Perm(sigma, m))
            }
            _ => None,
        }
    }

    fn lift(&self, n: u64, p: &TorusPoint) -> Result<TorusPoint> {
        match self {
            Section::Circle(base) => {
                let psi = PsiCircle::new(base, n)?;
                TorusPoint::new(p.coords().iter().map(|a| psi.apply(a)).collect())
            }
            Section::Perm(sigma, m) => PsiPermPower::new(sigma, m, n)?.apply(p),
        }
    }
}

/// Searches for `z ∈ U` with `f^n(z) ∈ V` for every `n` in `1..=n_max`.
pub fn empirical_mixing(
    f: &EndoMap,
    u: &ArcProduct,
    v: &ArcProduct,
    n_max: u64,
    resolution: u64,
) -> Result<MixingReport> {
    let k = f.dim();
    for set in [u, v] {
        if set.dim() != k {
            return Err(Error::DimensionMismatch {
                expected: k,
                found: set.dim(),
            });
        }
    }
    if n_max < 1 {
        return Err(Error::Precondition("n_max must be at least 1".into()));
    }
    let grid = grid_points(u, resolution)?;
    let target = TorusPoint::new(v.arcs().iter().map(|a| a.center().clone()).collect())?;
    let section = Section::for_map(f);

    let mut images = grid.clone();
    let mut hits = Vec::with_capacity(n_max as usize);
    for n in 1..=n_max {
        images = images.par_iter().map(|p| f.apply(p)).collect::<Result<Vec<_>>>()?;
        if let Some(idx) = images.par_iter().position_first(|p| v.contains(p)) {
            hits.push(Hit::WitnessFound {
                n,
                method: WitnessMethod::ForwardGrid,
                witness: grid[idx].clone(),
                image: images[idx].clone(),
            });
            continue;
        }
        let lifted = match &section {
            Some(section) => grid
                .par_iter()
                .zip(images.par_iter())
                .map(|(h, fh)| -> Result<Option<TorusPoint>> {
                    let correction = section.lift(n, &target.mul(&fh.inv())?)?;
                    let z = h.mul(&correction)?;
                    Ok(u.contains(&z).then_some(z))
                })
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .flatten()
                .next(),
            None => None,
        };
        match lifted {
            Some(z) => {
                let image = f.iterate(&z, n)?;
                hits.push(Hit::WitnessFound {
                    n,
                    method: WitnessMethod::SectionLift,
                    witness: z,
                    image,
                });
            }
            None => hits.push(Hit::NotFoundAtThisResolution { n }),
        }
    }
    MixingReport::new(f, u.clone(), v.clone(), n_max, resolution, hits)
}

/// Least `r` with `|n|^r · halfwidth >= 1`: from then on the `r`-th image of
/// the arc has length at least 2, so it is the whole circle. A full-circle arc
/// gives 0.
pub fn analytic_cover_n(n: &BigInt, arc: &Arc) -> Result<u64> {
    let base = n.abs();
    if base < BigInt::from(2) {
        return Err(Error::Precondition(format!(
            "power map base must satisfy |n| >= 2, got {n}"
        )));
    }
    if arc.is_full() {
        return Ok(0);
    }
    let mut r = 0;
    let mut stretch = BigRational::one();
    while &stretch * arc.halfwidth() < BigRational::one() {
        stretch *= BigRational::from_integer(base.clone());
        r += 1;
    }
    Ok(r)
}

/// Whether `t ↦ n^r·t` maps some point of `arc` onto `target`.
///
/// The preimages are `(target' + j)/|n|^r` with `target' = ±target`; only the
/// three nearest the centre of the arc can lie in it.
pub fn has_preimage_in(n: &BigInt, r: u64, arc: &Arc, target: &RationalAngle) -> bool {
    if arc.is_full() {
        return true;
    }
    let big = num_traits::Pow::pow(&n.abs(), r);
    let t = if n.is_negative() && r % 2 == 1 {
        target.inv()
    } else {
        target.clone()
    };
    let t = t.to_ratio();
    let near = (arc.center().to_ratio() * BigRational::from_integer(big.clone()) - &t)
        .round()
        .to_integer();
    [-1, 0, 1].into_iter().any(|d| {
        let j = &near + BigInt::from(d);
        let z =
            RationalAngle::from_ratio(&((&t + BigRational::from_integer(j)) / BigRational::from_integer(big.clone())));
        arc.contains(&z)
    })
}

/// Least `N` such that for every `r` in `[N, n_max]` all targets `j/resolution`
/// have a preimage in `arc` under `t ↦ n^r·t`; `None` when coverage fails at `n_max`.
pub fn grid_cover_n(n: &BigInt, arc: &Arc, n_max: u64, resolution: u64) -> Result<Option<u64>> {
    if n.abs() < BigInt::from(2) {
        return Err(Error::Precondition(format!(
            "power map base must satisfy |n| >= 2, got {n}"
        )));
    }
    if resolution < 1 {
        return Err(Error::Precondition("resolution must be positive".into()));
    }
    let targets = (0..resolution)
        .map(|j| RationalAngle::new(j, resolution))
        .collect::<Result<Vec<_>>>()?;
    let covered = |r: u64| targets.par_iter().all(|t| has_preimage_in(n, r, arc, t));
    let mut first = None;
    for r in (0..=n_max).rev() {
        if !covered(r) {
            break;
        }
        first = Some(r);
    }
    Ok(first)
}
