//! Coefficient rings for basis decompositions.
//!
//! Every coefficient the decompositions produce is a finite sum
//! `Σ q_m X^m` with dyadic rationals `q_m` and `X = 2^-α`. Floating types
//! evaluate such sums directly; [`AlphaPoly`] keeps them symbolic so that
//! reconstruction checks are exact.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::dyadic::DyadicScalar;

pub trait Coeff:
    Clone
    + PartialEq
    + fmt::Debug
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn from_dyadic(q: DyadicScalar) -> Self;
    /// `2^(m α)`.
    fn two_pow_alpha(m: i32, alpha: f64) -> Self;
    fn to_f64(&self, alpha: f64) -> f64;
    /// Whether the coefficient may be dropped from a combination.
    fn is_negligible(&self) -> bool;

    fn half() -> Self {
        Self::from_dyadic(DyadicScalar::mesh(1))
    }
}

macro_rules! float_coeff {
    ($t:ty, $floor:expr) => {
        impl Coeff for $t {
            fn zero() -> Self {
                0.0
            }
            fn one() -> Self {
                1.0
            }
            fn from_dyadic(q: DyadicScalar) -> Self {
                q.to_f64() as $t
            }
            fn two_pow_alpha(m: i32, alpha: f64) -> Self {
                (m as f64 * alpha).exp2() as $t
            }
            fn to_f64(&self, _alpha: f64) -> f64 {
                *self as f64
            }
            fn is_negligible(&self) -> bool {
                self.abs() <= $floor
            }
        }
    };
}

float_coeff!(f64, 1e-13);
float_coeff!(f32, 1e-6);

/// Exact dyadic rational `mant * 2^exp`, canonical with `mant` odd or zero.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Dyadic {
    mant: i128,
    exp: i32,
}

fn shl(m: i128, s: u32) -> i128 {
    assert!(
        m == 0 || (s < 126 && m.unsigned_abs().leading_zeros() > s + 1),
        "dyadic mantissa overflow"
    );
    m << s
}

impl Dyadic {
    pub const ZERO: Self = Self { mant: 0, exp: 0 };

    pub fn new(mut mant: i128, mut exp: i32) -> Self {
        if mant == 0 {
            return Self::ZERO;
        }
        let tz = mant.trailing_zeros();
        mant >>= tz;
        exp += tz as i32;
        Self { mant, exp }
    }

    pub fn mantissa(self) -> i128 {
        self.mant
    }

    pub fn exponent(self) -> i32 {
        self.exp
    }

    pub fn is_zero(self) -> bool {
        self.mant == 0
    }

    pub fn to_f64(self) -> f64 {
        self.mant as f64 * (self.exp as f64).exp2()
    }
}

impl From<DyadicScalar> for Dyadic {
    fn from(q: DyadicScalar) -> Self {
        Self::new(q.numerator() as i128, -(q.level() as i32))
    }
}

impl Add for Dyadic {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        if self.is_zero() {
            return rhs;
        }
        if rhs.is_zero() {
            return self;
        }
        let e = self.exp.min(rhs.exp);
        let a = shl(self.mant, (self.exp - e) as u32);
        let b = shl(rhs.mant, (rhs.exp - e) as u32);
        Self::new(a.checked_add(b).expect("dyadic mantissa overflow"), e)
    }
}

impl Neg for Dyadic {
    type Output = Self;
    fn neg(self) -> Self {
        Self { mant: -self.mant, ..self }
    }
}

impl Sub for Dyadic {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Mul for Dyadic {
    type Output = Self;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn mul(self, rhs: Self) -> Self {
        Self::new(
            self.mant.checked_mul(rhs.mant).expect("dyadic mantissa overflow"),
            self.exp + rhs.exp,
        )
    }
}

impl fmt::Debug for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exp >= 0 {
            write!(f, "{}", shl(self.mant, self.exp as u32))
        } else {
            write!(f, "{}/2^{}", self.mant, -self.exp)
        }
    }
}

/// `Σ q_m X^m` over integer `m`, with `X = 2^-α` kept symbolic.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct AlphaPoly {
    terms: BTreeMap<i32, Dyadic>,
}

impl AlphaPoly {
    /// `q X^m`.
    pub fn monomial(q: Dyadic, m: i32) -> Self {
        let mut terms = BTreeMap::new();
        if !q.is_zero() {
            terms.insert(m, q);
        }
        Self { terms }
    }

    pub fn terms(&self) -> impl Iterator<Item = (i32, Dyadic)> + '_ {
        self.terms.iter().map(|(&m, &q)| (m, q))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn accumulate(&mut self, m: i32, q: Dyadic) {
        let sum = self.terms.get(&m).copied().unwrap_or(Dyadic::ZERO) + q;
        if sum.is_zero() {
            self.terms.remove(&m);
        } else {
            self.terms.insert(m, sum);
        }
    }
}

impl Add for AlphaPoly {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        for (m, q) in rhs.terms {
            self.accumulate(m, q);
        }
        self
    }
}

impl Neg for AlphaPoly {
    type Output = Self;
    fn neg(self) -> Self {
        Self { terms: self.terms.into_iter().map(|(m, q)| (m, -q)).collect() }
    }
}

impl Sub for AlphaPoly {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Mul for AlphaPoly {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let mut out = Self::default();
        for (&a, &p) in &self.terms {
            for (&b, &q) in &rhs.terms {
                out.accumulate(a + b, p * q);
            }
        }
        out
    }
}

impl Coeff for AlphaPoly {
    fn zero() -> Self {
        Self::default()
    }
    fn one() -> Self {
        Self::monomial(Dyadic::new(1, 0), 0)
    }
    fn from_dyadic(q: DyadicScalar) -> Self {
        Self::monomial(q.into(), 0)
    }
    fn two_pow_alpha(m: i32, _alpha: f64) -> Self {
        Self::monomial(Dyadic::new(1, 0), -m)
    }
    fn to_f64(&self, alpha: f64) -> f64 {
        self.terms.iter().map(|(&m, q)| q.to_f64() * (-(m as f64) * alpha).exp2()).sum()
    }
    fn is_negligible(&self) -> bool {
        self.is_zero()
    }
}

impl fmt::Debug for AlphaPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for AlphaPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, q)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{q}·X^{m}")?;
        }
        Ok(())
    }
}
