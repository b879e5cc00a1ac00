//! Fixed inputs shared by the benchmarks.

use num_bigint::BigInt;
use num_rational::BigRational;
use torusmix_core::{Arc, ArcProduct, EndoMap, Permutation, RationalAngle, TorusPoint};

/// σ = (1,3,5,2,4) on five coordinates with exponents `m`.
pub fn five_cycle(m: [i64; 5]) -> EndoMap {
    let sigma = Permutation::from_cycles_one_based(5, &[vec![1, 3, 5, 2, 4]]).expect("valid cycle");
    EndoMap::perm_power(sigma, m.iter().map(|&x| BigInt::from(x)).collect()).expect("five exponents")
}

pub fn point(coords: &[&str]) -> TorusPoint {
    TorusPoint::parse(coords).expect("valid point")
}

/// `dim` copies of the arc around 0 with halfwidth `1/den`.
pub fn arcs_at_zero(dim: usize, den: i64) -> ArcProduct {
    let hw = BigRational::new(1.into(), den.into());
    let arc = Arc::new(RationalAngle::zero(), hw).expect("valid arc");
    ArcProduct::new(vec![arc; dim]).expect("nonempty")
}
