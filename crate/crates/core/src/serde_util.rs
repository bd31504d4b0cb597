//! Serde adapters for exact numbers, written as decimal strings.

pub(crate) mod rational {
    use num_rational::BigRational;
    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(x)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        let text = String::deserialize(d)?;
        crate::lattice::parse_rational_str(&text)
            .ok_or_else(|| D::Error::custom(format!("invalid rational {text:?}")))
    }
}
