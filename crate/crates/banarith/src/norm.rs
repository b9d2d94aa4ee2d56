//! Rigorous enclosures of norm values.
//!
//! A [`NormValue`] is a closed rational interval `[lower, upper]` with
//! `0 <= lower <= upper`. Exactly computable norms carry `lower == upper`;
//! quantities that would need transcendental constants (tail masses,
//! `e^{1/r}` bounds) are enclosed.

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::rat::{serde_rat, Rat};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormValue {
    #[serde(with = "serde_rat")]
    lower: Rat,
    #[serde(with = "serde_rat")]
    upper: Rat,
}

impl NormValue {
    pub fn new(lower: Rat, upper: Rat) -> Result<Self, Error> {
        if lower < Rat::zero() || lower > upper {
            return Err(Error::Validation(format!(
                "norm enclosure needs 0 <= lower <= upper, got [{lower}, {upper}]"
            )));
        }
        Ok(NormValue { lower, upper })
    }

    pub fn exact(v: Rat) -> Self {
        assert!(v >= Rat::zero(), "norms are non-negative");
        NormValue { lower: v.clone(), upper: v }
    }

    pub fn zero() -> Self {
        NormValue::exact(Rat::zero())
    }

    /// Enclosure `[0, u]` for a quantity only known from above (tails).
    pub fn upper_bound(u: Rat) -> Self {
        assert!(u >= Rat::zero());
        NormValue { lower: Rat::zero(), upper: u }
    }

    pub fn lower(&self) -> &Rat {
        &self.lower
    }

    pub fn upper(&self) -> &Rat {
        &self.upper
    }

    pub fn is_exact(&self) -> bool {
        self.lower == self.upper
    }

    pub fn width(&self) -> Rat {
        &self.upper - &self.lower
    }

    pub fn contains(&self, v: &Rat) -> bool {
        self.lower <= *v && *v <= self.upper
    }

    pub fn add(&self, other: &NormValue) -> NormValue {
        NormValue {
            lower: &self.lower + &other.lower,
            upper: &self.upper + &other.upper,
        }
    }

    /// Interval product; valid because both operands are non-negative.
    pub fn mul(&self, other: &NormValue) -> NormValue {
        NormValue {
            lower: &self.lower * &other.lower,
            upper: &self.upper * &other.upper,
        }
    }

    /// Scale by a positive rational (the `M_r` re-norming `r * ||.||`).
    pub fn scale(&self, r: &Rat) -> Result<NormValue, Error> {
        if *r <= Rat::zero() {
            return Err(Error::Domain(format!("scaling factor must be positive, got {r}")));
        }
        Ok(NormValue { lower: &self.lower * r, upper: &self.upper * r })
    }

    /// Scale by a non-negative rational (internal bound arithmetic).
    pub fn mul_rat(&self, r: &Rat) -> NormValue {
        assert!(*r >= Rat::zero(), "norm bounds scale by non-negative factors");
        NormValue { lower: &self.lower * r, upper: &self.upper * r }
    }

    /// Enclosure of `max(a, b)`.
    pub fn join_max(&self, other: &NormValue) -> NormValue {
        NormValue {
            lower: self.lower.clone().max(other.lower.clone()),
            upper: self.upper.clone().max(other.upper.clone()),
        }
    }
}

/// Scales a norm enclosure: the re-normed module `M_r` carries `r * ||m||`.
pub fn scale_norm(x: &NormValue, r: &Rat) -> Result<NormValue, Error> {
    x.scale(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{rat, rat_int};

    #[test]
    fn scale_norm_examples() {
        // (3, r=2) -> 6; (0, r=7) -> 0; (1/4, r=1/2) -> 1/8
        assert_eq!(scale_norm(&NormValue::exact(rat_int(3)), &rat_int(2)).unwrap(), NormValue::exact(rat_int(6)));
        assert_eq!(scale_norm(&NormValue::zero(), &rat_int(7)).unwrap(), NormValue::zero());
        assert_eq!(scale_norm(&NormValue::exact(rat(1, 4)), &rat(1, 2)).unwrap(), NormValue::exact(rat(1, 8)));
        assert!(scale_norm(&NormValue::zero(), &rat_int(0)).is_err());
        assert!(scale_norm(&NormValue::zero(), &rat_int(-2)).is_err());
    }

    #[test]
    fn scale_round_trips_exactly() {
        let x = NormValue::new(rat(1, 3), rat(1, 2)).unwrap();
        let r = rat(7, 5);
        let back = scale_norm(&scale_norm(&x, &r).unwrap(), &r.recip()).unwrap();
        assert_eq!(back, x);
    }

    #[test]
    fn invalid_enclosures_rejected() {
        assert!(NormValue::new(rat_int(2), rat_int(1)).is_err());
        assert!(NormValue::new(rat_int(-1), rat_int(1)).is_err());
    }
}
