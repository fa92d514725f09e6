//! Half-integer spin labels stored as twice their value.
//!
//! Selection rules (integer-sum and triangle conditions) are exact integer
//! arithmetic on `2j`, so no spin is ever represented as a float.

use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Spin or magnetic quantum number `j`, stored as `2j`.
///
/// Spin labels are non-negative; magnetic quantum numbers reuse the same
/// type with a sign.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Half {
    twice: i32,
}

impl Half {
    pub const ZERO: Half = Half { twice: 0 };
    pub const HALF: Half = Half { twice: 1 };
    pub const ONE: Half = Half { twice: 2 };

    /// Builds from twice the value, so `Half::new(3)` is `3/2`.
    pub const fn new(twice: i32) -> Half {
        Half { twice }
    }

    /// Builds from an integer spin.
    pub const fn from_int(n: i32) -> Half {
        Half { twice: 2 * n }
    }

    pub const fn twice(self) -> i32 {
        self.twice
    }

    pub fn to_f64(self) -> f64 {
        f64::from(self.twice) / 2.0
    }

    /// Multiplicity `d_j = 2j + 1`.
    pub const fn dim(self) -> i32 {
        self.twice + 1
    }

    pub const fn is_integer(self) -> bool {
        self.twice % 2 == 0
    }

    pub const fn abs(self) -> Half {
        Half { twice: self.twice.abs() }
    }

    /// `j(j+1)`, the SU(2) Casimir eigenvalue.
    pub fn casimir(self) -> f64 {
        let t = f64::from(self.twice);
        t * (t + 2.0) / 4.0
    }

    /// All values `0, 1/2, 1, …, j_max` in ascending order.
    pub fn ladder(j_max: Half) -> impl Iterator<Item = Half> {
        (0..=j_max.twice).map(Half::new)
    }
}

impl Add for Half {
    type Output = Half;
    fn add(self, rhs: Half) -> Half {
        Half { twice: self.twice + rhs.twice }
    }
}

impl Sub for Half {
    type Output = Half;
    fn sub(self, rhs: Half) -> Half {
        Half { twice: self.twice - rhs.twice }
    }
}

impl Neg for Half {
    type Output = Half;
    fn neg(self) -> Half {
        Half { twice: -self.twice }
    }
}

impl fmt::Display for Half {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.twice % 2 == 0 {
            write!(f, "{}", self.twice / 2)
        } else {
            write!(f, "{}/2", self.twice)
        }
    }
}

impl fmt::Debug for Half {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Accepts `"2"`, `"3/2"` and exact decimal halves like `"1.5"`.
impl FromStr for Half {
    type Err = String;

    fn from_str(s: &str) -> Result<Half, String> {
        let s = s.trim();
        if let Some((num, den)) = s.split_once('/') {
            let num: i32 = num.trim().parse().map_err(|_| format!("bad spin `{s}`"))?;
            let den: i32 = den.trim().parse().map_err(|_| format!("bad spin `{s}`"))?;
            return match den {
                1 => Ok(Half::from_int(num)),
                2 => Ok(Half::new(num)),
                _ => Err(format!("spin denominator must be 1 or 2 in `{s}`")),
            };
        }
        if let Ok(n) = s.parse::<i32>() {
            return Ok(Half::from_int(n));
        }
        let x: f64 = s.parse().map_err(|_| format!("bad spin `{s}`"))?;
        let twice = x * 2.0;
        if twice.fract() != 0.0 {
            return Err(format!("spin `{s}` is not a half-integer"));
        }
        Ok(Half::new(twice as i32))
    }
}
