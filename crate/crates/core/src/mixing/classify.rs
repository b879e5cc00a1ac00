//! Verdicts for the map families whose mixing behaviour is settled exactly.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::endo::{EndoMap, ExponentMatrix, Permutation};
use crate::error::{Error, Result};
use crate::rational::{int_str, int_vec_str};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum MixingVerdict {
    /// `z ↦ z^n` with `|n| >= 2`.
    MixingByCirclePower {
        #[serde(with = "int_str")]
        n: BigInt,
    },
    /// Every σ-orbit has exponent gcd above 1; gcds listed per orbit.
    #[serde(rename = "mixing_by_prop2")]
    MixingByOrbitGcd {
        #[serde(with = "int_vec_str")]
        orbit_gcds: Vec<BigInt>,
    },
    /// Identity permutation with every exponent at least 2.
    MixingByProduct,
    NonMixingIdentity,
    /// All rows of the exponent matrix agree, so the range lies in the diagonal.
    NonMixingDiagonal,
    Unknown {
        reason: String,
    },
}

impl MixingVerdict {
    pub fn is_mixing(&self) -> bool {
        matches!(
            self,
            MixingVerdict::MixingByCirclePower { .. }
                | MixingVerdict::MixingByOrbitGcd { .. }
                | MixingVerdict::MixingByProduct
        )
    }

    pub fn is_non_mixing(&self) -> bool {
        matches!(
            self,
            MixingVerdict::NonMixingIdentity | MixingVerdict::NonMixingDiagonal
        )
    }

    fn unknown(reason: impl Into<String>) -> Self {
        MixingVerdict::Unknown { reason: reason.into() }
    }
}

/// gcd of the exponents over the σ-orbit of each index.
pub fn orbit_gcds_by_index(sigma: &Permutation, m: &[BigInt]) -> Result<Vec<BigInt>> {
    if m.len() != sigma.len() {
        return Err(Error::DimensionMismatch {
            expected: sigma.len(),
            found: m.len(),
        });
    }
    let mut out = vec![BigInt::zero(); m.len()];
    for cycle in sigma.cycles() {
        let g = cycle.iter().fold(BigInt::zero(), |g, &j| g.gcd(&m[j]));
        for &j in &cycle {
            out[j] = g.clone();
        }
    }
    Ok(out)
}

pub fn classify_perm_power(sigma: &Permutation, m: &[BigInt]) -> MixingVerdict {
    if m.len() != sigma.len() {
        return MixingVerdict::unknown(format!(
            "exponent list has {} entries for a permutation of {} points",
            m.len(),
            sigma.len()
        ));
    }
    let two = BigInt::from(2);
    if let Some(i) = m.iter().position(|mi| *mi < two) {
        return MixingVerdict::unknown(format!(
            "exponent m_{} = {} is below 2; the orbit-gcd test needs every exponent >= 2",
            i + 1,
            m[i]
        ));
    }
    if sigma.is_identity() {
        return MixingVerdict::MixingByProduct;
    }
    let gcds: Vec<BigInt> = sigma
        .cycles()
        .iter()
        .map(|cycle| cycle.iter().fold(BigInt::zero(), |g, &j| g.gcd(&m[j])))
        .collect();
    if let Some(c) = gcds.iter().position(One::is_one) {
        let orbit: Vec<usize> = sigma.cycles()[c].iter().map(|i| i + 1).collect();
        return MixingVerdict::unknown(format!(
            "exponent gcd over orbit {orbit:?} is 1; the orbit-gcd test is sufficient, not necessary"
        ));
    }
    MixingVerdict::MixingByOrbitGcd { orbit_gcds: gcds }
}

/// Recognises the all-rows-equal obstruction. Needs dimension at least 2.
pub fn detect_diagonal_degenerate(a: &ExponentMatrix) -> Result<MixingVerdict> {
    if a.dim() < 2 {
        return Err(Error::Precondition(
            "diagonal obstruction needs dimension at least 2".into(),
        ));
    }
    if a.rows_all_equal() {
        Ok(MixingVerdict::NonMixingDiagonal)
    } else {
        Ok(MixingVerdict::unknown("rows of the exponent matrix differ"))
    }
}

fn classify_circle_power(n: &BigInt) -> MixingVerdict {
    if n.abs() >= BigInt::from(2) {
        MixingVerdict::MixingByCirclePower { n: n.clone() }
    } else if n.is_one() {
        MixingVerdict::NonMixingIdentity
    } else if n.is_zero() {
        MixingVerdict::unknown("z^0 is the constant map to the identity, not an epimorphism")
    } else {
        MixingVerdict::unknown("z^-1 is an isometry of the circle and falls outside the power-map result")
    }
}

/// Dispatches on the map family.
pub fn classify_map(f: &EndoMap) -> MixingVerdict {
    match f {
        EndoMap::CirclePower { n } => classify_circle_power(n),
        EndoMap::PermPower { sigma, m } => classify_perm_power(sigma, m),
        EndoMap::ExponentMatrix(a) if a.dim() == 1 => classify_circle_power(a.get(0, 0)),
        EndoMap::ExponentMatrix(a) => {
            detect_diagonal_degenerate(a).unwrap_or_else(|e| MixingVerdict::unknown(e.to_string()))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| x.into()).collect()
    }

    fn five_cycle() -> Permutation {
        Permutation::from_cycles_one_based(5, &[vec![1, 3, 5, 2, 4]]).unwrap()
    }

    #[test]
    fn perm_power_verdicts() {
        assert_eq!(
            classify_perm_power(&five_cycle(), &ints(&[2, 2, 2, 2, 2])),
            MixingVerdict::MixingByOrbitGcd { orbit_gcds: ints(&[2]) }
        );
        assert_eq!(
            classify_perm_power(&Permutation::identity(3), &ints(&[2, 3, 4])),
            MixingVerdict::MixingByProduct
        );
        let swap = Permutation::new(vec![1, 0]).unwrap();
        assert!(matches!(
            classify_perm_power(&swap, &ints(&[2, 3])),
            MixingVerdict::Unknown { .. }
        ));
        assert!(matches!(
            classify_perm_power(&five_cycle(), &ints(&[2, 2, 1, 2, 2])),
            MixingVerdict::Unknown { .. }
        ));
        assert!(matches!(
            classify_perm_power(&swap, &ints(&[2])),
            MixingVerdict::Unknown { .. }
        ));
        let two_cycles = Permutation::from_cycles_one_based(4, &[vec![1, 2], vec![3, 4]]).unwrap();
        assert_eq!(
            classify_perm_power(&two_cycles, &ints(&[4, 6, 9, 15])),
            MixingVerdict::MixingByOrbitGcd {
                orbit_gcds: ints(&[2, 3])
            }
        );
    }

    #[test]
    fn per_index_gcds() {
        let two_cycles = Permutation::from_cycles_one_based(4, &[vec![1, 3], vec![2, 4]]).unwrap();
        assert_eq!(
            orbit_gcds_by_index(&two_cycles, &ints(&[4, 9, 6, 15])).unwrap(),
            ints(&[2, 3, 2, 3])
        );
    }

    #[test]
    fn diagonal_detector() {
        let a = ExponentMatrix::from_i64(&[&[1, 2], &[1, 2]]).unwrap();
        assert_eq!(
            detect_diagonal_degenerate(&a).unwrap(),
            MixingVerdict::NonMixingDiagonal
        );
        let b = ExponentMatrix::from_i64(&[&[2, 0], &[0, 2]]).unwrap();
        assert!(matches!(
            detect_diagonal_degenerate(&b).unwrap(),
            MixingVerdict::Unknown { .. }
        ));
        let c = ExponentMatrix::from_i64(&[&[3, 3, 3], &[3, 3, 3], &[3, 3, 3]]).unwrap();
        assert_eq!(
            detect_diagonal_degenerate(&c).unwrap(),
            MixingVerdict::NonMixingDiagonal
        );
        assert!(detect_diagonal_degenerate(&ExponentMatrix::from_i64(&[&[2]]).unwrap()).is_err());
    }

    #[test]
    fn map_dispatch() {
        assert!(classify_map(&EndoMap::circle_power(2)).is_mixing());
        assert!(classify_map(&EndoMap::circle_power(-3)).is_mixing());
        assert_eq!(
            classify_map(&EndoMap::circle_power(1)),
            MixingVerdict::NonMixingIdentity
        );
        assert!(matches!(
            classify_map(&EndoMap::circle_power(0)),
            MixingVerdict::Unknown { .. }
        ));
        assert!(matches!(
            classify_map(&EndoMap::circle_power(-1)),
            MixingVerdict::Unknown { .. }
        ));
        let one = EndoMap::matrix(ExponentMatrix::from_i64(&[&[1]]).unwrap());
        assert_eq!(classify_map(&one), MixingVerdict::NonMixingIdentity);
    }

    #[test]
    fn wire_format() {
        let v = MixingVerdict::MixingByOrbitGcd { orbit_gcds: ints(&[2]) };
        let s = serde_json::to_string(&v).unwrap();
        assert_eq!(s, r#"{"verdict":"mixing_by_prop2","orbit_gcds":["2"]}"#);
        assert_eq!(serde_json::from_str::<MixingVerdict>(&s).unwrap(), v);
        assert_eq!(
            serde_json::to_string(&MixingVerdict::NonMixingDiagonal).unwrap(),
            r#"{"verdict":"non_mixing_diagonal"}"#
        );
    }
}
