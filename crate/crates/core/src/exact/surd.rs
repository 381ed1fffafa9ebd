use std::fmt;

use num::bigint::BigInt;
use num::{One, Signed, ToPrimitive, Zero};

use super::{fmt_q, to_f64, Q};

/// A number `coeff * sqrt(radicand)` with rational parts.
///
/// Euclidean volumes of hyperplane sections of rational polytopes live in
/// such quadratic extensions: the section is computed in a rational frame
/// and the frame's Gram determinant contributes the square root.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Surd {
    pub coeff: Q,
    pub radicand: Q,
}

impl Surd {
    pub fn rational(x: Q) -> Self {
        Surd { coeff: x, radicand: Q::one() }.normalized()
    }

    /// `coeff * sqrt(radicand)`, with the radicand reduced to a square-free integer.
    pub fn new(coeff: Q, radicand: Q) -> Self {
        assert!(!radicand.is_negative(), "negative radicand");
        Surd { coeff, radicand }.normalized()
    }

    fn normalized(self) -> Self {
        if self.coeff.is_zero() || self.radicand.is_zero() {
            return Surd { coeff: Q::zero(), radicand: Q::one() };
        }
        // sqrt(a/b) = sqrt(a*b)/b
        let den = self.radicand.denom().clone();
        let mut n: BigInt = self.radicand.numer() * &den;
        let mut outside = BigInt::one();
        let mut f = BigInt::from(2);
        // trial division is fine for the small radicands that occur here
        let limit = BigInt::from(1_000_000);
        while &f * &f <= n && f <= limit {
            let sq = &f * &f;
            while (&n % &sq).is_zero() {
                n /= &sq;
                outside *= &f;
            }
            f += 1;
        }
        Surd {
            coeff: self.coeff * Q::new(outside, den),
            radicand: Q::from_integer(n),
        }
    }

    pub fn mul(&self, other: &Surd) -> Surd {
        Surd::new(&self.coeff * &other.coeff, &self.radicand * &other.radicand)
    }

    pub fn scale(&self, k: &Q) -> Surd {
        Surd::new(&self.coeff * k, self.radicand.clone())
    }

    /// Exact square, always rational.
    pub fn squared(&self) -> Q {
        &self.coeff * &self.coeff * &self.radicand
    }

    pub fn to_f64(&self) -> f64 {
        to_f64(&self.coeff) * self.radicand.to_f64().unwrap_or(f64::NAN).sqrt()
    }

    pub fn as_rational(&self) -> Option<&Q> {
        self.radicand.is_one().then_some(&self.coeff)
    }
}

impl fmt::Display for Surd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.radicand.is_one() {
            write!(f, "{}", fmt_q(&self.coeff))
        } else if self.coeff.is_one() {
            write!(f, "sqrt({})", fmt_q(&self.radicand))
        } else {
            write!(f, "{}*sqrt({})", fmt_q(&self.coeff), fmt_q(&self.radicand))
        }
    }
}

impl serde::Serialize for Surd {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}
