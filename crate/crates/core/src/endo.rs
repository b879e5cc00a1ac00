//! Continuous endomorphisms of `T^k` in monomial normal form.
//!
//! Every such map is `z ↦ (∏_j z_j^{A[i][j]})_i` for an integer matrix `A`.
//! In turn coordinates this is the linear map `v ↦ A·v mod 1`, and
//! composition of maps is matrix multiplication.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::circle::{RationalAngle, TorusPoint};
use crate::error::{Error, Result};
use crate::rational::{int_mat_str, int_str, int_vec_str};

/// A bijection of `{0, …, k-1}` stored as its forward image table.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Permutation {
    image: Vec<usize>,
}

impl Permutation {
    pub fn new(image: Vec<usize>) -> Result<Self> {
        let k = image.len();
        if k == 0 {
            return Err(Error::InvalidPermutation("empty permutation".into()));
        }
        let mut seen = vec![false; k];
        for &i in &image {
            if i >= k {
                return Err(Error::InvalidPermutation(format!("index {i} out of range 0..{k}")));
            }
            if std::mem::replace(&mut seen[i], true) {
                return Err(Error::InvalidPermutation(format!("index {i} appears twice")));
            }
        }
        Ok(Permutation { image })
    }

    pub fn identity(k: usize) -> Self {
        Permutation {
            image: (0..k).collect(),
        }
    }

    /// Builds a permutation of `{0, …, k-1}` from 1-indexed cycle notation,
    /// e.g. `[[1, 3, 5, 2, 4]]` sends 1→3→5→2→4→1.
    pub fn from_cycles_one_based(k: usize, cycles: &[Vec<usize>]) -> Result<Self> {
        let mut image: Vec<usize> = (0..k).collect();
        let mut touched = vec![false; k];
        for cycle in cycles {
            for &i in cycle {
                if i == 0 || i > k {
                    return Err(Error::InvalidPermutation(format!(
                        "cycle entry {i} out of range 1..={k}"
                    )));
                }
                if std::mem::replace(&mut touched[i - 1], true) {
                    return Err(Error::InvalidPermutation(format!(
                        "cycle entry {i} appears more than once"
                    )));
                }
            }
            for (pos, &i) in cycle.iter().enumerate() {
                image[i - 1] = cycle[(pos + 1) % cycle.len()] - 1;
            }
        }
        Permutation::new(image)
    }

    pub fn len(&self) -> usize {
        self.image.len()
    }

    pub fn is_empty(&self) -> bool {
        self.image.is_empty()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.image[i]
    }

    pub fn image(&self) -> &[usize] {
        &self.image
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.image.len()];
        for (i, &j) in self.image.iter().enumerate() {
            inv[j] = i;
        }
        Permutation { image: inv }
    }

    pub fn is_identity(&self) -> bool {
        self.image.iter().enumerate().all(|(i, &j)| i == j)
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        Permutation {
            image: other.image.iter().map(|&j| self.image[j]).collect(),
        }
    }

    /// `σ^r` for `r >= 0`.
    pub fn pow(&self, r: u64) -> Permutation {
        self.cycles()
            .iter()
            .fold(Permutation::identity(self.len()), |mut acc, cycle| {
                let len = cycle.len();
                let shift = (r % len as u64) as usize;
                for (pos, &i) in cycle.iter().enumerate() {
                    acc.image[i] = cycle[(pos + shift) % len];
                }
                acc
            })
    }

    /// Cycle decomposition: cycles sorted by their least element, each
    /// starting at it.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.image.len()];
        let mut out = Vec::new();
        for start in 0..self.image.len() {
            if seen[start] {
                continue;
            }
            let mut cycle = vec![start];
            seen[start] = true;
            let mut i = self.image[start];
            while i != start {
                seen[i] = true;
                cycle.push(i);
                i = self.image[i];
            }
            out.push(cycle);
        }
        out
    }

    /// 1-indexed cycle notation, fixed points omitted.
    pub fn to_cycles_one_based(&self) -> Vec<Vec<usize>> {
        self.cycles()
            .into_iter()
            .filter(|c| c.len() > 1)
            .map(|c| c.into_iter().map(|i| i + 1).collect())
            .collect()
    }
}

pub fn orbit_cycles(sigma: &Permutation) -> Vec<Vec<usize>> {
    sigma.cycles()
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Permutation{:?}", self.image)
    }
}

/// Square matrix of unbounded integers.
#[derive(Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct ExponentMatrix {
    #[serde(with = "int_mat_str")]
    rows: Vec<Vec<BigInt>>,
}

impl<'de> Deserialize<'de> for ExponentMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        ExponentMatrix::new(int_mat_str::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}

impl ExponentMatrix {
    pub fn new(rows: Vec<Vec<BigInt>>) -> Result<Self> {
        let k = rows.len();
        if k == 0 {
            return Err(Error::InvalidMatrix("empty matrix".into()));
        }
        if let Some(bad) = rows.iter().position(|r| r.len() != k) {
            return Err(Error::InvalidMatrix(format!(
                "not square: row {bad} has {} entries, expected {k}",
                rows[bad].len()
            )));
        }
        Ok(ExponentMatrix { rows })
    }

    pub fn from_i64(rows: &[&[i64]]) -> Result<Self> {
        Self::new(
            rows.iter()
                .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
                .collect(),
        )
    }

    pub fn identity(k: usize) -> Self {
        let rows = (0..k)
            .map(|i| {
                (0..k)
                    .map(|j| if i == j { BigInt::one() } else { BigInt::zero() })
                    .collect()
            })
            .collect();
        ExponentMatrix { rows }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<BigInt>] {
        &self.rows
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.rows[i][j]
    }

    pub fn mul(&self, other: &ExponentMatrix) -> Result<ExponentMatrix> {
        let k = self.dim();
        if other.dim() != k {
            return Err(Error::DimensionMismatch {
                expected: k,
                found: other.dim(),
            });
        }
        let rows = (0..k)
            .map(|i| {
                (0..k)
                    .map(|j| {
                        let mut acc = BigInt::zero();
                        for (l, a) in self.rows[i].iter().enumerate() {
                            if !a.is_zero() && !other.rows[l][j].is_zero() {
                                acc += a * &other.rows[l][j];
                            }
                        }
                        acc
                    })
                    .collect()
            })
            .collect();
        Ok(ExponentMatrix { rows })
    }

    /// `A^r` by square-and-multiply.
    pub fn pow(&self, mut r: u64) -> ExponentMatrix {
        let mut result = ExponentMatrix::identity(self.dim());
        let mut base = self.clone();
        while r > 0 {
            if r & 1 == 1 {
                result = result.mul(&base).expect("same dimension");
            }
            r >>= 1;
            if r > 0 {
                base = base.mul(&base).expect("same dimension");
            }
        }
        result
    }

    /// `v ↦ A·v mod 1` on turn coordinates.
    pub fn apply(&self, z: &TorusPoint) -> Result<TorusPoint> {
        if z.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: z.dim(),
            });
        }
        let coords = self
            .rows
            .iter()
            .map(|row| linear_combination(row, z.coords()))
            .collect();
        TorusPoint::new(coords)
    }

    pub fn rows_all_equal(&self) -> bool {
        self.rows.windows(2).all(|w| w[0] == w[1])
    }
}

/// `Σ_j c_j · z_j mod 1` over a common denominator.
fn linear_combination(coeffs: &[BigInt], z: &[RationalAngle]) -> RationalAngle {
    let mut lcm = BigInt::one();
    for (c, a) in coeffs.iter().zip(z) {
        if !c.is_zero() && !a.is_zero() {
            lcm = lcm.lcm(a.denom());
        }
    }
    let mut num = BigInt::zero();
    for (c, a) in coeffs.iter().zip(z) {
        if !c.is_zero() && !a.is_zero() {
            num += c * a.numer() * (&lcm / a.denom());
        }
    }
    RationalAngle::new(num, lcm).expect("positive denominator")
}

impl fmt::Debug for ExponentMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list()
            .entries(
                self.rows
                    .iter()
                    .map(|r| r.iter().map(|x| x.to_string()).collect::<Vec<_>>()),
            )
            .finish()
    }
}

/// A continuous endomorphism of `T^k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EndoMap {
    /// `z ↦ z^n` on the circle.
    CirclePower {
        n: BigInt,
    },
    /// Coordinate `i` of the image is `z_{σ⁻¹(i)}^{m_i}`.
    PermPower {
        sigma: Permutation,
        m: Vec<BigInt>,
    },
    ExponentMatrix(ExponentMatrix),
}

impl EndoMap {
    pub fn circle_power(n: impl Into<BigInt>) -> Self {
        EndoMap::CirclePower { n: n.into() }
    }

    pub fn perm_power(sigma: Permutation, m: Vec<BigInt>) -> Result<Self> {
        if m.len() != sigma.len() {
            return Err(Error::DimensionMismatch {
                expected: sigma.len(),
                found: m.len(),
            });
        }
        Ok(EndoMap::PermPower { sigma, m })
    }

    pub fn matrix(a: ExponentMatrix) -> Self {
        EndoMap::ExponentMatrix(a)
    }

    pub fn dim(&self) -> usize {
        match self {
            EndoMap::CirclePower { .. } => 1,
            EndoMap::PermPower { sigma, .. } => sigma.len(),
            EndoMap::ExponentMatrix(a) => a.dim(),
        }
    }

    pub fn as_matrix(&self) -> ExponentMatrix {
        match self {
            EndoMap::CirclePower { n } => ExponentMatrix {
                rows: vec![vec![n.clone()]],
            },
            EndoMap::PermPower { sigma, m } => {
                let k = sigma.len();
                let inv = sigma.inverse();
                let mut a = ExponentMatrix {
                    rows: vec![vec![BigInt::zero(); k]; k],
                };
                for (i, mi) in m.iter().enumerate() {
                    a.rows[i][inv.apply(i)] = mi.clone();
                }
                a
            }
            EndoMap::ExponentMatrix(a) => a.clone(),
        }
    }

    fn check_dim(&self, z: &TorusPoint) -> Result<()> {
        if z.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: z.dim(),
            });
        }
        Ok(())
    }

    pub fn apply(&self, z: &TorusPoint) -> Result<TorusPoint> {
        self.check_dim(z)?;
        match self {
            EndoMap::CirclePower { n } => TorusPoint::new(vec![z.coords()[0].pow(n)]),
            EndoMap::PermPower { sigma, m } => {
                let inv = sigma.inverse();
                let c = z.coords();
                TorusPoint::new(m.iter().enumerate().map(|(i, mi)| c[inv.apply(i)].pow(mi)).collect())
            }
            EndoMap::ExponentMatrix(a) => a.apply(z),
        }
    }

    /// `f^r(z)` by applying `f` step by step; angles stay reduced mod 1.
    pub fn iterate(&self, z: &TorusPoint, r: u64) -> Result<TorusPoint> {
        self.check_dim(z)?;
        let mut cur = z.clone();
        match self {
            EndoMap::CirclePower { n } => {
                let mut a = cur.coords()[0].clone();
                for _ in 0..r {
                    if a.is_zero() {
                        break;
                    }
                    a = a.pow(n);
                }
                cur = TorusPoint::new(vec![a])?;
            }
            EndoMap::PermPower { sigma, m } => {
                let inv = sigma.inverse();
                let mut c = cur.into_coords();
                for _ in 0..r {
                    c = m.iter().enumerate().map(|(i, mi)| c[inv.apply(i)].pow(mi)).collect();
                }
                cur = TorusPoint::new(c)?;
            }
            EndoMap::ExponentMatrix(a) => {
                for _ in 0..r {
                    cur = a.apply(&cur)?;
                }
            }
        }
        Ok(cur)
    }

    /// `f^r(z)` through the exponent matrix `A^r`.
    pub fn iterate_via_matrix(&self, z: &TorusPoint, r: u64) -> Result<TorusPoint> {
        self.check_dim(z)?;
        self.as_matrix().pow(r).apply(z)
    }

    /// `self ∘ other` as an exponent matrix map.
    pub fn compose(&self, other: &EndoMap) -> Result<EndoMap> {
        Ok(EndoMap::ExponentMatrix(self.as_matrix().mul(&other.as_matrix())?))
    }
}

pub fn as_matrix(f: &EndoMap) -> ExponentMatrix {
    f.as_matrix()
}

pub fn matrix_power(a: &ExponentMatrix, r: u64) -> ExponentMatrix {
    a.pow(r)
}

/// JSON document describing a map, as read by the command line.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum MapSpec {
    CirclePower {
        #[serde(with = "int_str")]
        n: BigInt,
    },
    PermPower {
        /// 1-indexed cycles; indices not mentioned are fixed.
        sigma_cycles: Vec<Vec<usize>>,
        #[serde(with = "int_vec_str")]
        m: Vec<BigInt>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        dim: Option<usize>,
    },
    Matrix {
        #[serde(rename = "A", with = "int_mat_str")]
        a: Vec<Vec<BigInt>>,
    },
}

impl MapSpec {
    /// Validates the document and builds the map.
    pub fn build(&self) -> Result<EndoMap> {
        match self {
            MapSpec::CirclePower { n } => Ok(EndoMap::circle_power(n.clone())),
            MapSpec::PermPower { sigma_cycles, m, dim } => {
                let k = m.len();
                if let Some(d) = dim {
                    if *d != k {
                        return Err(Error::DimensionMismatch { expected: *d, found: k });
                    }
                }
                if k == 0 {
                    return Err(Error::InvalidPermutation("exponent list is empty".into()));
                }
                let sigma = Permutation::from_cycles_one_based(k, sigma_cycles)?;
                EndoMap::perm_power(sigma, m.clone())
            }
            MapSpec::Matrix { a } => Ok(EndoMap::ExponentMatrix(ExponentMatrix::new(a.clone())?)),
        }
    }

    pub fn from_map(f: &EndoMap) -> Self {
        match f {
            EndoMap::CirclePower { n } => MapSpec::CirclePower { n: n.clone() },
            EndoMap::PermPower { sigma, m } => MapSpec::PermPower {
                sigma_cycles: sigma.to_cycles_one_based(),
                m: m.clone(),
                dim: None,
            },
            EndoMap::ExponentMatrix(a) => MapSpec::Matrix { a: a.rows.clone() },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| x.into()).collect()
    }

    fn pt(c: &[&str]) -> TorusPoint {
        TorusPoint::parse(c).unwrap()
    }

    fn five_cycle() -> Permutation {
        Permutation::from_cycles_one_based(5, &[vec![1, 3, 5, 2, 4]]).unwrap()
    }

    #[test]
    fn permutation_validation() {
        assert!(Permutation::new(vec![0, 0]).is_err());
        assert!(Permutation::new(vec![0, 2]).is_err());
        assert!(Permutation::new(vec![]).is_err());
        assert!(Permutation::from_cycles_one_based(3, &[vec![1, 4]]).is_err());
        assert!(Permutation::from_cycles_one_based(3, &[vec![1, 2], vec![2, 3]]).is_err());
        assert!(Permutation::from_cycles_one_based(3, &[vec![0, 1]]).is_err());
    }

    #[test]
    fn cycle_notation() {
        let s = five_cycle();
        // 1→3→5→2→4→1, 0-indexed
        assert_eq!(s.image(), &[2, 3, 4, 0, 1]);
        assert_eq!(s.inverse().image(), &[3, 4, 0, 1, 2]);
        assert_eq!(s.to_cycles_one_based(), vec![vec![1, 3, 5, 2, 4]]);
        assert_eq!(s.compose(&s.inverse()), Permutation::identity(5));
        assert_eq!(s.pow(5), Permutation::identity(5));
        assert_eq!(s.pow(2), s.compose(&s));
    }

    #[test]
    fn orbit_cycles_examples() {
        assert_eq!(orbit_cycles(&Permutation::identity(3)), vec![vec![0], vec![1], vec![2]]);
        assert_eq!(orbit_cycles(&five_cycle()), vec![vec![0, 2, 4, 1, 3]]);
        let t = Permutation::new(vec![1, 0, 2, 3]).unwrap();
        assert_eq!(orbit_cycles(&t), vec![vec![0, 1], vec![2], vec![3]]);
    }

    #[test]
    fn as_matrix_examples() {
        assert_eq!(
            EndoMap::circle_power(2).as_matrix(),
            ExponentMatrix::from_i64(&[&[2]]).unwrap()
        );
        let swap = EndoMap::perm_power(Permutation::new(vec![1, 0]).unwrap(), ints(&[2, 3])).unwrap();
        assert_eq!(swap.as_matrix(), ExponentMatrix::from_i64(&[&[0, 2], &[3, 0]]).unwrap());
        let diag = EndoMap::perm_power(Permutation::identity(3), ints(&[4, 5, 6])).unwrap();
        assert_eq!(
            diag.as_matrix(),
            ExponentMatrix::from_i64(&[&[4, 0, 0], &[0, 5, 0], &[0, 0, 6]]).unwrap()
        );
    }

    #[test]
    fn apply_examples() {
        assert_eq!(EndoMap::circle_power(2).apply(&pt(&["1/8"])).unwrap(), pt(&["1/4"]));
        let f = EndoMap::perm_power(five_cycle(), ints(&[2, 3, 5, 7, 11])).unwrap();
        assert_eq!(f.apply(&TorusPoint::identity(5)).unwrap(), TorusPoint::identity(5));
        // first coordinate is z_4^{m_1}
        let z = pt(&["0/1", "0/1", "0/1", "1/7", "0/1"]);
        assert_eq!(f.apply(&z).unwrap().coords()[0], "2/7".parse().unwrap());
        assert_eq!(f.apply(&z).unwrap(), f.as_matrix().apply(&z).unwrap());
        assert!(matches!(
            f.apply(&pt(&["1/2"])),
            Err(Error::DimensionMismatch { expected: 5, found: 1 })
        ));
    }

    #[test]
    fn matrix_power_examples() {
        let two = ExponentMatrix::from_i64(&[&[2]]).unwrap();
        assert_eq!(two.pow(5), ExponentMatrix::from_i64(&[&[32]]).unwrap());
        let a = ExponentMatrix::from_i64(&[&[0, 2], &[3, 0]]).unwrap();
        assert_eq!(a.pow(0), ExponentMatrix::identity(2));
        assert_eq!(a.pow(2), ExponentMatrix::from_i64(&[&[6, 0], &[0, 6]]).unwrap());
    }

    #[test]
    fn iterate_examples() {
        let f = EndoMap::circle_power(2);
        assert_eq!(f.iterate(&pt(&["1/8"]), 3).unwrap(), pt(&["0/1"]));
        assert_eq!(f.iterate(&pt(&["3/7"]), 0).unwrap(), pt(&["3/7"]));
        // second coordinate of f^3 carries m_3·m_5·m_2 on z_1
        let g = EndoMap::perm_power(five_cycle(), ints(&[2, 3, 5, 7, 11])).unwrap();
        let cube = g.as_matrix().pow(3);
        assert_eq!(cube.get(1, 0), &BigInt::from(5 * 11 * 3));
        assert_eq!(cube.rows()[1].iter().filter(|x| !x.is_zero()).count(), 1);
    }

    #[test]
    fn non_square_matrices_are_rejected() {
        assert!(ExponentMatrix::new(vec![ints(&[1, 2]), ints(&[3])]).is_err());
        assert!(ExponentMatrix::new(vec![]).is_err());
    }

    #[test]
    fn map_spec_documents() {
        let spec: MapSpec =
            serde_json::from_str(r#"{"type":"perm_power","sigma_cycles":[[1,3,5,2,4]],"m":[2,"3",5,7,11]}"#).unwrap();
        let f = spec.build().unwrap();
        assert_eq!(f, EndoMap::perm_power(five_cycle(), ints(&[2, 3, 5, 7, 11])).unwrap());
        let big: MapSpec =
            serde_json::from_str(r#"{"type":"circle_power","n":"123456789012345678901234567890"}"#).unwrap();
        assert_eq!(
            serde_json::to_string(&big).unwrap(),
            r#"{"type":"circle_power","n":"123456789012345678901234567890"}"#
        );
        let m: MapSpec = serde_json::from_str(r#"{"type":"matrix","A":[[1,2],[1,2]]}"#).unwrap();
        assert_eq!(
            serde_json::to_string(&m).unwrap(),
            r#"{"type":"matrix","A":[["1","2"],["1","2"]]}"#
        );
        let bad: MapSpec = serde_json::from_str(r#"{"type":"matrix","A":[[1,2],[1]]}"#).unwrap();
        assert!(bad.build().is_err());
        let bad: MapSpec =
            serde_json::from_str(r#"{"type":"perm_power","sigma_cycles":[[1,2]],"m":[2,2],"dim":3}"#).unwrap();
        assert!(bad.build().is_err());
        assert!(serde_json::from_str::<MapSpec>(r#"{"type":"circle_power","n":1.5}"#).is_err());
        assert!(serde_json::from_str::<MapSpec>(r#"{"type":"rotation","n":1}"#).is_err());
    }

    fn small_map() -> impl Strategy<Value = EndoMap> {
        let circle = (-6i64..7).prop_map(EndoMap::circle_power);
        let perm = (1usize..5).prop_flat_map(|k| {
            (
                Just((0..k).collect::<Vec<usize>>()).prop_shuffle(),
                proptest::collection::vec(-4i64..5, k),
            )
                .prop_map(|(img, m)| EndoMap::perm_power(Permutation::new(img).unwrap(), ints(&m)).unwrap())
        });
        let mat = (1usize..4).prop_flat_map(|k| {
            proptest::collection::vec(proptest::collection::vec(-3i64..4, k), k).prop_map(|rows| {
                EndoMap::ExponentMatrix(ExponentMatrix::new(rows.into_iter().map(|r| ints(&r)).collect()).unwrap())
            })
        });
        prop_oneof![circle, perm, mat]
    }

    fn point_for(k: usize) -> impl Strategy<Value = TorusPoint> {
        proptest::collection::vec((any::<i32>(), 1i64..500), k).prop_map(|c| {
            TorusPoint::new(c.into_iter().map(|(p, q)| RationalAngle::new(p, q).unwrap()).collect()).unwrap()
        })
    }

    fn map_and_points() -> impl Strategy<Value = (EndoMap, TorusPoint, TorusPoint)> {
        small_map().prop_flat_map(|f| {
            let k = f.dim();
            (Just(f), point_for(k), point_for(k))
        })
    }

    proptest! {
        #[test]
        fn both_iteration_routes_agree((f, z, _) in map_and_points(), r in 0u64..31) {
            prop_assert_eq!(f.iterate(&z, r).unwrap(), f.iterate_via_matrix(&z, r).unwrap());
        }

        #[test]
        fn apply_is_a_homomorphism((f, z, w) in map_and_points()) {
            let lhs = f.apply(&z.mul(&w).unwrap()).unwrap();
            let rhs = f.apply(&z).unwrap().mul(&f.apply(&w).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn iterates_compose((f, z, _) in map_and_points(), r in 0u64..21, s in 0u64..21) {
            let inner = f.iterate(&z, s).unwrap();
            prop_assert_eq!(f.iterate(&z, r + s).unwrap(), f.iterate(&inner, r).unwrap());
        }

        #[test]
        fn composition_is_matrix_product((f, z, _) in map_and_points()) {
            let ff = f.compose(&f).unwrap();
            prop_assert_eq!(ff.apply(&z).unwrap(), f.apply(&f.apply(&z).unwrap()).unwrap());
        }

        #[test]
        fn diagonal_perm_power_matches_circle_power(n in -5i64..6, k in 1usize..4, r in 0u64..12,
                                                    c in proptest::collection::vec((any::<i32>(), 1i64..300), 3)) {
            let f = EndoMap::perm_power(Permutation::identity(k), ints(&vec![n; k])).unwrap();
            let z = TorusPoint::new(c[..k].iter().map(|&(p, q)| RationalAngle::new(p, q).unwrap()).collect()).unwrap();
            let g = EndoMap::circle_power(n);
            let fz = f.iterate(&z, r).unwrap();
            for (j, a) in z.coords().iter().enumerate() {
                let single = TorusPoint::new(vec![a.clone()]).unwrap();
                let gz = g.iterate(&single, r).unwrap();
                prop_assert_eq!(&fz.coords()[j], &gz.coords()[0]);
            }
        }

        #[test]
        fn cycles_partition(img in (1usize..9).prop_flat_map(|k| Just((0..k).collect::<Vec<usize>>()).prop_shuffle())) {
            let s = Permutation::new(img).unwrap();
            let cycles = orbit_cycles(&s);
            let mut all: Vec<usize> = cycles.iter().flatten().copied().collect();
            all.sort_unstable();
            prop_assert_eq!(all, (0..s.len()).collect::<Vec<_>>());
            for c in &cycles {
                prop_assert_eq!(c[0], *c.iter().min().unwrap());
                for (pos, &i) in c.iter().enumerate() {
                    prop_assert_eq!(s.apply(i), c[(pos + 1) % c.len()]);
                }
            }
            prop_assert!(cycles.windows(2).all(|w| w[0][0] < w[1][0]));
        }
    }
}
