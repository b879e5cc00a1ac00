//! Text forms for exact numbers.
//!
//! Rationals always cross a text boundary as `"p/q"` in lowest terms (the
//! integer zero is `"0/1"`), and big integers as decimal strings. JSON number
//! literals are accepted on input when they fit a machine word.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::de::{self, Visitor};
use serde::{Deserializer, Serializer};

use crate::error::{Error, Result};

/// Formats a rational as `p/q`, keeping the denominator even when it is 1.
pub fn format_ratio(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parses `p/q` or a bare integer `p`. The result is reduced.
pub fn parse_ratio(s: &str) -> Result<BigRational> {
    let bad = || Error::Parse {
        what: "rational",
        input: s.to_string(),
    };
    let s = s.trim();
    let (p, q) = match s.split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (s, "1"),
    };
    let p: BigInt = p.parse().map_err(|_| bad())?;
    let q: BigInt = q.parse().map_err(|_| bad())?;
    if q.is_zero() {
        return Err(Error::ZeroDenominator);
    }
    Ok(BigRational::new(p, q))
}

pub fn parse_int(s: &str) -> Result<BigInt> {
    s.trim().parse().map_err(|_| Error::Parse {
        what: "integer",
        input: s.to_string(),
    })
}

/// `1 / 2^k` as an exact rational.
pub fn half_pow(k: u64) -> BigRational {
    BigRational::new(BigInt::one(), BigInt::one() << k)
}

/// serde adapter for `BigRational` fields as `"p/q"` strings.
pub mod ratio_str {
    use super::*;

    pub fn serialize<S: Serializer>(r: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_ratio(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<BigRational, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = BigRational;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a rational string \"p/q\" or an integer")
            }
            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<BigRational, E> {
                parse_ratio(v).map_err(E::custom)
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<BigRational, E> {
                Ok(BigRational::from_integer(v.into()))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<BigRational, E> {
                Ok(BigRational::from_integer(v.into()))
            }
        }
        d.deserialize_any(V)
    }
}

/// serde adapter for `BigInt` fields as decimal strings (numbers accepted on input).
pub mod int_str {
    use super::*;

    pub fn serialize<S: Serializer>(n: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&n.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<BigInt, D::Error> {
        d.deserialize_any(IntVisitor)
    }

    pub(crate) struct IntVisitor;

    impl Visitor<'_> for IntVisitor {
        type Value = BigInt;
        fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
            f.write_str("an integer or a decimal integer string")
        }
        fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<BigInt, E> {
            parse_int(v).map_err(E::custom)
        }
        fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<BigInt, E> {
            Ok(v.into())
        }
        fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<BigInt, E> {
            Ok(v.into())
        }
    }
}

/// Same as [`int_str`] for `Vec<BigInt>`.
pub mod int_vec_str {
    use super::*;
    use serde::de::SeqAccess;
    use serde::ser::SerializeSeq;

    pub fn serialize<S: Serializer>(v: &[BigInt], s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for n in v {
            seq.serialize_element(&n.to_string())?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<BigInt>, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = Vec<BigInt>;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a list of integers")
            }
            fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> std::result::Result<Vec<BigInt>, A::Error> {
                let mut out = Vec::new();
                while let Some(Wrapped(n)) = seq.next_element()? {
                    out.push(n);
                }
                Ok(out)
            }
        }
        d.deserialize_seq(V)
    }

    struct Wrapped(BigInt);

    impl<'de> serde::Deserialize<'de> for Wrapped {
        fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
            d.deserialize_any(int_str::IntVisitor).map(Wrapped)
        }
    }
}

/// Same as [`int_str`] for square matrices stored row-major.
pub mod int_mat_str {
    use super::*;
    use serde::ser::SerializeSeq;
    use serde::Deserialize;

    pub fn serialize<S: Serializer>(m: &[Vec<BigInt>], s: S) -> std::result::Result<S::Ok, S::Error> {
        struct Row<'a>(&'a [BigInt]);
        impl serde::Serialize for Row<'_> {
            fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                int_vec_str::serialize(self.0, s)
            }
        }
        let mut seq = s.serialize_seq(Some(m.len()))?;
        for row in m {
            seq.serialize_element(&Row(row))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Vec<BigInt>>, D::Error> {
        struct Row(Vec<BigInt>);
        impl<'de> Deserialize<'de> for Row {
            fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
                int_vec_str::deserialize(d).map(Row)
            }
        }
        let rows: Vec<Row> = Vec::deserialize(d)?;
        Ok(rows.into_iter().map(|r| r.0).collect())
    }
}
