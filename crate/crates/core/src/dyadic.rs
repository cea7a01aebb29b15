//! Exact rationals whose denominator is a power of two.
//!
//! Every closed form in the pattern-counting layer lives in `2^-l Z`, so a
//! numerator and a shift are enough to compare them exactly.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

/// `num / 2^shift`, kept in lowest terms (odd numerator or zero shift).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Dyadic {
    num: i128,
    shift: u32,
}

impl Dyadic {
    pub const ZERO: Dyadic = Dyadic { num: 0, shift: 0 };

    pub fn new(num: i128, shift: u32) -> Self {
        let mut d = Dyadic { num, shift };
        d.normalize();
        d
    }

    pub fn from_int(n: i128) -> Self {
        Dyadic { num: n, shift: 0 }
    }

    fn normalize(&mut self) {
        if self.num == 0 {
            self.shift = 0;
            return;
        }
        let tz = self.num.trailing_zeros().min(self.shift);
        self.num >>= tz;
        self.shift -= tz;
    }

    pub fn numer(&self) -> i128 {
        self.num
    }

    pub fn denom(&self) -> u128 {
        1u128 << self.shift
    }

    pub fn shift(&self) -> u32 {
        self.shift
    }

    pub fn is_integer(&self) -> bool {
        self.shift == 0
    }

    pub fn abs(self) -> Self {
        Dyadic {
            num: self.num.abs(),
            shift: self.shift,
        }
    }

    pub fn to_f64(self) -> f64 {
        self.num as f64 / (1u128 << self.shift) as f64
    }

    /// Rewrites both operands over the larger power of two.
    fn aligned(self, other: Self) -> (i128, i128, u32) {
        let s = self.shift.max(other.shift);
        (
            self.num << (s - self.shift),
            other.num << (s - other.shift),
            s,
        )
    }
}

impl From<i64> for Dyadic {
    fn from(n: i64) -> Self {
        Dyadic::from_int(n as i128)
    }
}

impl Add for Dyadic {
    type Output = Dyadic;
    fn add(self, rhs: Dyadic) -> Dyadic {
        let (a, b, s) = self.aligned(rhs);
        Dyadic::new(a + b, s)
    }
}

impl Sub for Dyadic {
    type Output = Dyadic;
    fn sub(self, rhs: Dyadic) -> Dyadic {
        let (a, b, s) = self.aligned(rhs);
        Dyadic::new(a - b, s)
    }
}

impl Neg for Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        Dyadic {
            num: -self.num,
            shift: self.shift,
        }
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let (a, b, _) = self.aligned(*other);
        a.cmp(&b)
    }
}

/// Exact decimal expansion (always terminates for a dyadic rational).
impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.shift == 0 {
            return write!(f, "{}", self.num);
        }
        let neg = self.num < 0;
        let mag = self.num.unsigned_abs();
        let int = mag >> self.shift;
        let mut frac = mag & ((1u128 << self.shift) - 1);
        let mut digits = String::new();
        while frac != 0 {
            frac *= 10;
            digits.push(char::from(b'0' + (frac >> self.shift) as u8));
            frac &= (1u128 << self.shift) - 1;
        }
        if neg {
            write!(f, "-")?;
        }
        write!(f, "{int}.{digits}")
    }
}

impl Serialize for Dyadic {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("Rational", 2)?;
        st.serialize_field("num", &(self.num as i64))?;
        st.serialize_field("den", &(self.denom() as u64))?;
        st.end()
    }
}
