//! Exact dynamics of mixing endomorphisms on tori.
//!
//! Points of the circle are reduced fractions of a turn, so roots of unity
//! and every iterate of a monomial endomorphism are computed exactly with
//! big integers. On top of that arithmetic the crate builds
//!
//! * the endomorphisms themselves ([`endo`]): circle powers, permutation-power
//!   maps and general integer exponent matrices;
//! * mixing witnesses and checkers ([`mixing`]): root-of-unity families,
//!   right-inverse sections, a finite-horizon check of the semigroup mixing
//!   criterion, a classifier for permutation-power maps, and a grid search
//!   for `f^n(U) ∩ V ≠ ∅`;
//! * the shift extension of an endomorphism to the countable product of a
//!   base group ([`product`]).

pub mod circle;
pub mod endo;
pub mod error;
pub mod mixing;
pub mod product;
pub mod rational;

pub use circle::{arc_contains, circle_dist, Arc, ArcProduct, RationalAngle, TorusPoint};
pub use endo::{as_matrix, matrix_power, orbit_cycles, EndoMap, ExponentMatrix, MapSpec, Permutation};
pub use error::{Error, Result};
pub use mixing::{
    analytic_cover_n, classify_map, criterion_check, empirical_mixing, CriterionOptions, CriterionReport,
    CriterionSystem, MixingReport, MixingVerdict,
};
pub use product::{torus_shift, BaseGroup, FiniteSupportSeq, ShiftExtension, ShrinkBound, TorusBase, TorusShift};
