//! Scalar types usable as positions of a leveled point.
//!
//! Positions must form a dense linear order with exact equality, so the
//! trait is implemented for the exact rational types of `num-rational`
//! (`Ratio<i64>`, `Ratio<i128>`, `BigRational`) and not for floats.

use std::fmt::{Debug, Display};
use std::hash::Hash;
use std::str::FromStr;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{Num, Signed};

/// An exact, densely ordered position type.
pub trait Level: Clone + Ord + Hash + Debug + Num + Send + Sync + 'static {
    fn from_int(i: i64) -> Self;

    /// A value strictly between `self` and `other` when they differ.
    fn midpoint(&self, other: &Self) -> Self {
        (self.clone() + other.clone()) / (Self::one() + Self::one())
    }

    /// `"p/q"` with `q > 0`; integers keep the `/1`.
    fn to_fraction_string(&self) -> String;

    /// Accepts `"p/q"` or a bare integer `"p"`.
    fn parse_fraction(s: &str) -> Option<Self>;
}

impl<T> Level for Ratio<T>
where
    T: Clone + Integer + Signed + Hash + Debug + Display + FromStr + From<i64> + Send + Sync + 'static,
{
    fn from_int(i: i64) -> Self {
        Ratio::from_integer(T::from(i))
    }

    fn to_fraction_string(&self) -> String {
        format!("{}/{}", self.numer(), self.denom())
    }

    fn parse_fraction(s: &str) -> Option<Self> {
        let s = s.trim();
        match s.split_once('/') {
            Some((p, q)) => {
                let p: T = p.trim().parse().ok()?;
                let q: T = q.trim().parse().ok()?;
                if q.is_zero() {
                    return None;
                }
                Some(Ratio::new(p, q))
            }
            None => s.parse::<T>().ok().map(Ratio::from_integer),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    type R = Ratio<i64>;

    #[test]
    fn fraction_strings_round_trip() {
        let q = R::new(-4, 2);
        assert_eq!(q.to_fraction_string(), "-2/1");
        assert_eq!(R::parse_fraction("-2/1"), Some(q));
        assert_eq!(R::parse_fraction("3/6"), Some(R::new(1, 2)));
        assert_eq!(R::parse_fraction("7"), Some(R::from_int(7)));
        assert_eq!(R::parse_fraction("1/0"), None);
        assert_eq!(R::parse_fraction("x"), None);
    }

    #[test]
    fn midpoint_is_strictly_between() {
        let a = R::from_int(1);
        let b = R::from_int(2);
        let m = a.midpoint(&b);
        assert!(a < m && m < b);
        let big = Ratio::<BigInt>::from_int(5).midpoint(&Ratio::from_int(6));
        assert_eq!(big.to_fraction_string(), "11/2");
    }
}
