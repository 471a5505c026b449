//! Serde helpers: integers as JSON numbers when they fit in i64 (strings
//! otherwise), rationals as [numerator, denominator].

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::de::{self, SeqAccess, Visitor};
use serde::ser::SerializeTuple;
use serde::{Deserializer, Serializer};

pub fn serialize_bigint<S: Serializer>(x: &BigInt, s: S) -> Result<S::Ok, S::Error> {
    match x.to_i64() {
        Some(v) => s.serialize_i64(v),
        None => s.serialize_str(&x.to_string()),
    }
}

struct BigIntVisitor;

impl<'de> Visitor<'de> for BigIntVisitor {
    type Value = BigInt;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        write!(f, "an integer or a decimal string")
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> Result<BigInt, E> {
        Ok(v.into())
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> Result<BigInt, E> {
        Ok(v.into())
    }

    fn visit_str<E: de::Error>(self, v: &str) -> Result<BigInt, E> {
        v.parse().map_err(|_| E::custom(format!("bad integer {v:?}")))
    }
}

pub fn deserialize_bigint<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
    d.deserialize_any(BigIntVisitor)
}

pub mod bigint {
    pub use super::deserialize_bigint as deserialize;
    pub use super::serialize_bigint as serialize;
}

pub mod rational {
    use super::*;

    struct Wrap<'a>(&'a BigInt);

    impl serde::Serialize for Wrap<'_> {
        fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
            serialize_bigint(self.0, s)
        }
    }

    struct Owned(BigInt);

    impl<'de> serde::Deserialize<'de> for Owned {
        fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
            deserialize_bigint(d).map(Owned)
        }
    }

    pub fn serialize<S: Serializer>(x: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        let mut t = s.serialize_tuple(2)?;
        t.serialize_element(&Wrap(x.numer()))?;
        t.serialize_element(&Wrap(x.denom()))?;
        t.end()
    }

    struct RatVisitor;

    impl<'de> Visitor<'de> for RatVisitor {
        type Value = BigRational;

        fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
            write!(f, "a [numerator, denominator] pair")
        }

        fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> Result<BigRational, A::Error> {
            let n: Owned = seq.next_element()?.ok_or_else(|| de::Error::invalid_length(0, &self))?;
            let d: Owned = seq.next_element()?.ok_or_else(|| de::Error::invalid_length(1, &self))?;
            if d.0 == BigInt::from(0) {
                return Err(de::Error::custom("zero denominator"));
            }
            Ok(BigRational::new(n.0, d.0))
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        d.deserialize_tuple(2, RatVisitor)
    }
}

pub mod rational_pair {
    use super::*;
    use serde::{Deserialize, Serialize};

    #[derive(Serialize, Deserialize)]
    struct R(#[serde(with = "super::rational")] BigRational);

    pub fn serialize<S: Serializer>(x: &[BigRational; 2], s: S) -> Result<S::Ok, S::Error> {
        [R(x[0].clone()), R(x[1].clone())].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<[BigRational; 2], D::Error> {
        let [R(a), R(b)] = <[R; 2]>::deserialize(d)?;
        Ok([a, b])
    }
}

pub mod int_pair {
    use super::*;
    use serde::{Deserialize, Serialize};

    #[derive(Serialize, Deserialize)]
    struct I(#[serde(with = "super::bigint")] BigInt);

    pub fn serialize<S: Serializer>(x: &[BigInt; 2], s: S) -> Result<S::Ok, S::Error> {
        [I(x[0].clone()), I(x[1].clone())].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<[BigInt; 2], D::Error> {
        let [I(a), I(b)] = <[I; 2]>::deserialize(d)?;
        Ok([a, b])
    }
}
