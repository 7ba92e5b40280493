//! Serialize exact integers as decimal strings.

macro_rules! decimal_module {
    ($name:ident, $ty:ty) => {
        pub mod $name {
            use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

            pub fn serialize<S: Serializer>(value: &$ty, s: S) -> Result<S::Ok, S::Error> {
                s.collect_str(value)
            }

            pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<$ty, D::Error> {
                let text = String::deserialize(d)?;
                text.parse()
                    .map_err(|_| D::Error::custom(format!("not a decimal integer: {text:?}")))
            }
        }
    };
}

decimal_module!(biguint, num_bigint::BigUint);
decimal_module!(bigint, num_bigint::BigInt);
decimal_module!(u128, u128);

/// `BigRational` as `"num/den"`.
pub mod rational {
    use num_bigint::BigInt;
    use num_rational::BigRational;
    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(value: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(&format_args!("{}/{}", value.numer(), value.denom()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        let text = String::deserialize(d)?;
        let bad = || D::Error::custom(format!("not a rational: {text:?}"));
        let (n, m) = text.split_once('/').ok_or_else(bad)?;
        let n: BigInt = n.parse().map_err(|_| bad())?;
        let m: BigInt = m.parse().map_err(|_| bad())?;
        if m == BigInt::from(0) {
            return Err(bad());
        }
        Ok(BigRational::new(n, m))
    }
}

#[cfg(test)]
mod tests {
    use num_bigint::{BigInt, BigUint};
    use serde::{Deserialize, Serialize};

    #[derive(Serialize, Deserialize, PartialEq, Debug)]
    struct Row {
        #[serde(with = "super::bigint")]
        a: BigInt,
        #[serde(with = "super::biguint")]
        b: BigUint,
    }

    #[test]
    fn round_trip_as_strings() {
        let row = Row {
            a: "-123456789012345678901234567890".parse().unwrap(),
            b: BigUint::from(7u8),
        };
        let json = serde_json::to_string(&row).unwrap();
        assert_eq!(json, r#"{"a":"-123456789012345678901234567890","b":"7"}"#);
        assert_eq!(serde_json::from_str::<Row>(&json).unwrap(), row);
        assert!(serde_json::from_str::<Row>(r#"{"a":"x","b":"7"}"#).is_err());
    }
}
