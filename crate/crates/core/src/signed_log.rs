//! `(sign, log|x|)` arithmetic for quantities that overflow doubles, such as
//! `det(λ - H)` at large `N`.

use std::cmp::Ordering;
use std::ops::{Mul, Neg};

use crate::scalar::Real;

/// `sign · exp(log_mag)`; `log_mag` is meaningless when `sign == 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignedLog<T> {
    pub sign: i8,
    pub log_mag: T,
}

impl<T: Real> SignedLog<T> {
    pub fn zero() -> Self {
        Self {
            sign: 0,
            log_mag: T::neg_infinity(),
        }
    }

    pub fn one() -> Self {
        Self {
            sign: 1,
            log_mag: T::zero(),
        }
    }

    pub fn new(sign: i8, log_mag: T) -> Self {
        if sign == 0 || log_mag == T::neg_infinity() {
            Self::zero()
        } else {
            Self {
                sign: sign.signum(),
                log_mag,
            }
        }
    }

    pub fn from_value(x: T) -> Self {
        if x == T::zero() {
            Self::zero()
        } else {
            Self::new(if x > T::zero() { 1 } else { -1 }, x.abs().ln())
        }
    }

    pub fn is_zero(&self) -> bool {
        self.sign == 0
    }

    pub fn is_finite(&self) -> bool {
        self.sign == 0 || self.log_mag.is_finite()
    }

    /// Back to a plain float (may overflow to ±inf or underflow to 0).
    pub fn value(&self) -> T {
        match self.sign {
            0 => T::zero(),
            s => T::from_i8(s).unwrap() * self.log_mag.exp(),
        }
    }

    /// `self · exp(-shift)` as a plain float.
    pub fn value_shifted(&self, shift: T) -> T {
        match self.sign {
            0 => T::zero(),
            s => T::from_i8(s).unwrap() * (self.log_mag - shift).exp(),
        }
    }

    pub fn sqrt(&self) -> Option<Self> {
        match self.sign {
            0 => Some(Self::zero()),
            1 => Some(Self::new(1, self.log_mag * T::lit(0.5))),
            _ => None,
        }
    }

    /// Sum via the max-shifted exponential.
    pub fn add(self, other: Self) -> Self {
        if self.sign == 0 {
            return other;
        }
        if other.sign == 0 {
            return self;
        }
        let (hi, lo) = if self.log_mag >= other.log_mag {
            (self, other)
        } else {
            (other, self)
        };
        let ratio = (lo.log_mag - hi.log_mag).exp();
        let t = if hi.sign == lo.sign {
            T::one() + ratio
        } else {
            T::one() - ratio
        };
        if t == T::zero() {
            return Self::zero();
        }
        Self::new(hi.sign, hi.log_mag + t.ln())
    }

    /// Compares magnitudes.
    pub fn cmp_magnitude(&self, other: &Self) -> Ordering {
        match (self.sign == 0, other.sign == 0) {
            (true, true) => Ordering::Equal,
            (true, false) => Ordering::Less,
            (false, true) => Ordering::Greater,
            _ => self
                .log_mag
                .partial_cmp(&other.log_mag)
                .unwrap_or(Ordering::Equal),
        }
    }
}

impl<T: Real> Mul for SignedLog<T> {
    type Output = Self;

    fn mul(self, rhs: Self) -> Self {
        if self.sign == 0 || rhs.sign == 0 {
            return Self::zero();
        }
        Self {
            sign: self.sign * rhs.sign,
            log_mag: self.log_mag + rhs.log_mag,
        }
    }
}

impl<T: Real> Neg for SignedLog<T> {
    type Output = Self;

    fn neg(self) -> Self {
        Self {
            sign: -self.sign,
            log_mag: self.log_mag,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn zero_handling() {
        let z = SignedLog::<f64>::zero();
        let x = SignedLog::from_value(-3.0);
        assert_eq!(z.add(x), x);
        assert!((z * x).is_zero());
        assert!(x.add(-x).is_zero());
        assert_eq!(SignedLog::from_value(0.0), z);
    }

    #[test]
    fn huge_magnitudes_stay_finite() {
        let a = SignedLog::<f64>::new(1, 2000.0);
        let b = SignedLog::<f64>::new(-1, 1999.0);
        let c = a.add(b);
        assert_eq!(c.sign, 1);
        assert!((c.log_mag - (2000.0 + (1.0 - (-1.0f64).exp()).ln())).abs() < 1e-12);
        assert!((a * a).log_mag == 4000.0);
    }

    proptest! {
        #[test]
        fn matches_plain_arithmetic(x in -1e3f64..1e3, y in -1e3f64..1e3) {
            let sx = SignedLog::from_value(x);
            let sy = SignedLog::from_value(y);
            let prod = (sx * sy).value();
            prop_assert!((prod - x * y).abs() <= 1e-12 * (x * y).abs().max(1e-300));
            let sum = sx.add(sy).value();
            prop_assert!((sum - (x + y)).abs() <= 1e-12 * (x.abs() + y.abs()));
        }
    }
}
