//! Exact rational affine rules `x ↦ (mul·x + add) / div` on the naturals.
//!
//! Compositions and inverses of integer affine maps stay in this family. A
//! rule is only ever applied on a domain where the quotient is an exact
//! natural number; callers intersect with [`AffineRule::valid_points`].

use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AffineRule {
    mul: i128,
    add: i128,
    div: i128,
}

const COEFF_CAP: i128 = 1 << 62;

impl AffineRule {
    pub const IDENTITY: AffineRule = AffineRule { mul: 1, add: 0, div: 1 };

    /// `x ↦ (mul·x + add) / div`, normalized. Requires `mul ≥ 1`, `div ≥ 1`.
    pub fn new(mul: i128, add: i128, div: i128) -> Result<Self> {
        if mul < 1 || div < 1 {
            return Err(Error::malformed(format!(
                "affine rule needs positive multiplier and divisor, got ({mul}x + {add})/{div}"
            )));
        }
        let g = mul.gcd(&add).gcd(&div);
        let rule = AffineRule { mul: mul / g, add: add / g, div: div / g };
        for c in [rule.mul, rule.add.abs(), rule.div] {
            if c > COEFF_CAP {
                return Err(Error::Resource {
                    what: "affine coefficient",
                    value: u64::try_from(c).unwrap_or(u64::MAX),
                    cap: COEFF_CAP as u64,
                });
            }
        }
        Ok(rule)
    }

    /// Integer rule `x ↦ a·x + b`.
    pub fn integer(a: u64, b: i64) -> Result<Self> {
        Self::new(a as i128, b as i128, 1)
    }

    pub fn mul(&self) -> i128 {
        self.mul
    }

    pub fn add(&self) -> i128 {
        self.add
    }

    pub fn div(&self) -> i128 {
        self.div
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::IDENTITY
    }

    /// True for `x ↦ x + b`.
    pub fn is_translation(&self) -> bool {
        self.mul == 1 && self.div == 1
    }

    /// Exact value at `x`, or `None` if it is fractional or negative.
    pub fn apply(&self, x: u64) -> Option<u64> {
        let num = self.mul * x as i128 + self.add;
        if num < 0 || num % self.div != 0 {
            return None;
        }
        u64::try_from(num / self.div).ok()
    }

    /// `self ∘ inner`: apply `inner` first.
    pub fn after(&self, inner: &AffineRule) -> Result<Self> {
        // (m1·((m2 x + a2)/d2) + a1)/d1 = (m1 m2 x + m1 a2 + a1 d2)/(d1 d2)
        let mul = checked(self.mul.checked_mul(inner.mul))?;
        let add = checked(
            self.mul
                .checked_mul(inner.add)
                .and_then(|t| self.add.checked_mul(inner.div).and_then(|u| t.checked_add(u))),
        )?;
        let div = checked(self.div.checked_mul(inner.div))?;
        Self::new(mul, add, div)
    }

    pub fn inverse(&self) -> Self {
        // y = (m x + a)/d  ⇔  x = (d y − a)/m
        Self::new(self.div, -self.add, self.mul).expect("inverse of a valid rule is valid")
    }

    /// Smallest `x ≥ 0` with `self.apply(x) ≥ 0`, ignoring integrality.
    pub(crate) fn nonnegative_from(&self) -> u64 {
        if self.add >= 0 {
            0
        } else {
            // m x + a ≥ 0  ⇔  x ≥ ceil(−a / m)
            u64::try_from(Integer::div_ceil(&-self.add, &self.mul)).unwrap_or(u64::MAX)
        }
    }
}

fn checked(v: Option<i128>) -> Result<i128> {
    v.ok_or(Error::Resource { what: "affine coefficient", value: u64::MAX, cap: COEFF_CAP as u64 })
}

impl fmt::Display for AffineRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lin = if self.mul == 1 { "x".to_string() } else { format!("{}x", self.mul) };
        let body = match self.add.cmp(&0) {
            std::cmp::Ordering::Equal => lin,
            std::cmp::Ordering::Greater => format!("{lin}+{}", self.add),
            std::cmp::Ordering::Less => format!("{lin}-{}", -self.add),
        };
        if self.div == 1 {
            write!(f, "x ↦ {body}")
        } else {
            write!(f, "x ↦ ({body})/{}", self.div)
        }
    }
}
