//! Exact rational arithmetic for counting identities.
//!
//! Every quantity in the identities is an integer or a half-integer, so
//! `Ratio<i64>` is exact. Serialized as `{"num": .., "den": ..}`.

use num_rational::Ratio;
use serde::ser::SerializeStruct;
use serde::Serializer;

pub type Rational = Ratio<i64>;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(n)
}

/// `n / 2`.
pub fn half(n: i64) -> Rational {
    Rational::new(n, 2)
}

pub fn frac<S: Serializer>(value: &Rational, s: S) -> Result<S::Ok, S::Error> {
    let mut st = s.serialize_struct("Rational", 2)?;
    st.serialize_field("num", value.numer())?;
    st.serialize_field("den", value.denom())?;
    st.end()
}
