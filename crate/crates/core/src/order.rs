use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

/// A diamond order `m` with `2m` a nonnegative integer.
///
/// Parses from `"3"`, `"2.5"` or `"5/2"`; displays as `"3"` or `"2.5"`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Order {
    halves: u32,
}

impl Order {
    pub const ZERO: Order = Order { halves: 0 };

    pub const fn from_halves(halves: u32) -> Order {
        Order { halves }
    }

    pub const fn integer(n: u32) -> Order {
        Order { halves: 2 * n }
    }

    /// The value `2m`.
    pub const fn halves(self) -> u32 {
        self.halves
    }

    /// `n = floor(m)`.
    pub const fn floor(self) -> u32 {
        self.halves / 2
    }

    pub const fn is_integer(self) -> bool {
        self.halves % 2 == 0
    }

    /// The order one shuffle step later, `m + 1/2`.
    pub const fn next(self) -> Order {
        Order { halves: self.halves + 1 }
    }

    pub fn as_f64(self) -> f64 {
        f64::from(self.halves) / 2.0
    }

    /// All orders `0, 1/2, ..., self`.
    pub fn up_to(self) -> impl Iterator<Item = Order> {
        (0..=self.halves).map(Order::from_halves)
    }
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.halves / 2)
        } else {
            write!(f, "{}.5", self.halves / 2)
        }
    }
}

impl FromStr for Order {
    type Err = Error;

    fn from_str(s: &str) -> Result<Order, Error> {
        let s = s.trim();
        let bad = || Error::InvalidOrder(format!("{s:?} is not a nonnegative half-integer"));
        if let Some((num, den)) = s.split_once('/') {
            let num: u32 = num.trim().parse().map_err(|_| bad())?;
            return match den.trim() {
                "1" => Ok(Order::integer(num)),
                "2" => Ok(Order::from_halves(num)),
                _ => Err(bad()),
            };
        }
        if let Some((whole, frac)) = s.split_once('.') {
            let whole: u32 = if whole.is_empty() { 0 } else { whole.parse().map_err(|_| bad())? };
            let frac = frac.trim_end_matches('0');
            return match frac {
                "" => Ok(Order::integer(whole)),
                "5" => Ok(Order::from_halves(2 * whole + 1)),
                _ => Err(bad()),
            };
        }
        let n: u32 = s.parse().map_err(|_| bad())?;
        Ok(Order::integer(n))
    }
}

impl TryFrom<f64> for Order {
    type Error = Error;

    fn try_from(m: f64) -> Result<Order, Error> {
        let twice = 2.0 * m;
        if twice.is_nan() || twice < 0.0 || twice.fract() != 0.0 || twice > f64::from(u32::MAX) {
            return Err(Error::InvalidOrder(format!("{m} is not a nonnegative half-integer")));
        }
        Ok(Order::from_halves(twice as u32))
    }
}

// Serialized as a JSON number (3 or 2.5), which is exact for half-integers.
impl Serialize for Order {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        if self.is_integer() {
            serializer.serialize_u32(self.floor())
        } else {
            serializer.serialize_f64(self.as_f64())
        }
    }
}

impl<'de> Deserialize<'de> for Order {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Order, D::Error> {
        let m = f64::deserialize(deserializer)?;
        Order::try_from(m).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_all_spellings() {
        assert_eq!("3".parse::<Order>().unwrap(), Order::integer(3));
        assert_eq!("2.5".parse::<Order>().unwrap(), Order::from_halves(5));
        assert_eq!("5/2".parse::<Order>().unwrap(), Order::from_halves(5));
        assert_eq!("0.5".parse::<Order>().unwrap(), Order::from_halves(1));
        assert_eq!("4.0".parse::<Order>().unwrap(), Order::integer(4));
        assert!("2.25".parse::<Order>().is_err());
        assert!("-1".parse::<Order>().is_err());
        assert!("1/3".parse::<Order>().is_err());
    }

    #[test]
    fn display_round_trips() {
        for h in 0..20 {
            let m = Order::from_halves(h);
            assert_eq!(m.to_string().parse::<Order>().unwrap(), m);
        }
    }

    #[test]
    fn float_conversion() {
        assert_eq!(Order::try_from(2.5).unwrap(), Order::from_halves(5));
        assert!(Order::try_from(-0.5).is_err());
        assert!(Order::try_from(f64::NAN).is_err());
        assert!(Order::try_from(0.3).is_err());
    }
}
