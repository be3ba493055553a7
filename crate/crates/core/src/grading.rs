use std::fmt;
use std::ops::{Add, Sub};
use std::str::FromStr;

use num_rational::Rational64;
use num_traits::{ToPrimitive, Zero};
use serde::{Serialize, Serializer};

/// An exact rational Maslov grading.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Grading(Rational64);

impl Grading {
    pub fn new(numer: i64, denom: i64) -> Self {
        Self(Rational64::new(numer, denom))
    }

    pub fn int(n: i64) -> Self {
        Self(Rational64::from_integer(n))
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn ceil_i64(&self) -> i64 {
        self.0.ceil().to_integer()
    }

    pub fn floor_i64(&self) -> i64 {
        self.0.floor().to_integer()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }
}

impl From<i64> for Grading {
    fn from(n: i64) -> Self {
        Self::int(n)
    }
}

impl Add for Grading {
    type Output = Grading;

    fn add(self, rhs: Grading) -> Grading {
        Grading(self.0 + rhs.0)
    }
}

impl Add<i64> for Grading {
    type Output = Grading;

    fn add(self, rhs: i64) -> Grading {
        Grading(self.0 + rhs)
    }
}

impl Sub for Grading {
    type Output = Grading;

    fn sub(self, rhs: Grading) -> Grading {
        Grading(self.0 - rhs.0)
    }
}

impl Sub<i64> for Grading {
    type Output = Grading;

    fn sub(self, rhs: i64) -> Grading {
        Grading(self.0 - rhs)
    }
}

impl fmt::Display for Grading {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Debug for Grading {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid grading {0:?}: expected an integer or p/q")]
pub struct ParseGradingError(pub String);

impl FromStr for Grading {
    type Err = ParseGradingError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseGradingError(s.to_string());
        match s.split_once('/') {
            Some((p, q)) => {
                let p: i64 = p.trim().parse().map_err(|_| err())?;
                let q: i64 = q.trim().parse().map_err(|_| err())?;
                if q == 0 {
                    return Err(err());
                }
                Ok(Grading::new(p, q))
            }
            None => s.trim().parse::<i64>().map(Grading::int).map_err(|_| err()),
        }
    }
}

impl Serialize for Grading {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}
