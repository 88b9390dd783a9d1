//! Numeric abstraction shared by every module.
//!
//! Floating-point scalars compare with small absolute tolerances; rational
//! scalars compare exactly, so dyadic fixtures can be checked with zero slack.

use std::fmt::{Debug, Display};

use num_integer::{Integer, Roots};
use num_rational::Ratio;
use num_traits::{Bounded, CheckedMul, FromPrimitive, Num, NumCast, PrimInt, Signed, ToPrimitive};

/// Scalar type the geometry, welfare and voting code is written against.
pub trait Scalar:
    Copy
    + Debug
    + Display
    + PartialOrd
    + Num
    + Signed
    + FromPrimitive
    + ToPrimitive
    + Send
    + Sync
    + 'static
{
    /// Absolute tolerance for distance ties (farthest vertex, peripheral test, tree sides).
    fn tie_tolerance() -> Self;

    /// Threshold a utility gain must exceed to count as a strict improvement.
    fn gain_tolerance() -> Self;

    fn floor(self) -> Self;

    /// Square root, `None` when it is not representable.
    fn checked_sqrt(self) -> Option<Self>;

    /// Converts a float literal. Exact for every dyadic rational that fits the type.
    fn from_f64_exact(value: f64) -> Option<Self>;

    fn is_finite_value(self) -> bool;

    /// Converts a literal, panicking on NaN or infinity.
    fn lit(value: f64) -> Self {
        Self::from_f64_exact(value).unwrap_or_else(|| panic!("literal {value} is not representable"))
    }

    fn count(n: usize) -> Self {
        Self::from_usize(n).expect("count fits the scalar type")
    }

    fn half() -> Self {
        Self::one() / (Self::one() + Self::one())
    }

    fn max_of(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    fn min_of(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    /// Lossy view used for reporting.
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

macro_rules! float_scalar {
    ($t:ty, $tie:expr, $gain:expr) => {
        impl Scalar for $t {
            fn tie_tolerance() -> Self {
                $tie
            }

            fn gain_tolerance() -> Self {
                $gain
            }

            fn floor(self) -> Self {
                <$t>::floor(self)
            }

            fn checked_sqrt(self) -> Option<Self> {
                (self >= 0.0).then(|| <$t>::sqrt(self))
            }

            fn from_f64_exact(value: f64) -> Option<Self> {
                value.is_finite().then_some(value as $t)
            }

            fn is_finite_value(self) -> bool {
                <$t>::is_finite(self)
            }
        }
    };
}

float_scalar!(f64, 1e-9, 1e-12);
float_scalar!(f32, 1e-5, 1e-6);

macro_rules! rational_scalar {
    ($int:ty) => {
        impl Scalar for Ratio<$int> {
            fn tie_tolerance() -> Self {
                Self::from_integer(0)
            }

            fn gain_tolerance() -> Self {
                Self::from_integer(0)
            }

            fn floor(self) -> Self {
                Ratio::floor(&self)
            }

            fn checked_sqrt(self) -> Option<Self> {
                if self < Self::from_integer(0) {
                    return None;
                }
                let numer = exact_isqrt(*self.numer())?;
                let denom = exact_isqrt(*self.denom())?;
                Some(Ratio::new(numer, denom))
            }

            fn from_f64_exact(value: f64) -> Option<Self> {
                dyadic_ratio::<$int>(value)
            }

            fn is_finite_value(self) -> bool {
                true
            }
        }
    };
}

rational_scalar!(i64);
rational_scalar!(i128);

fn exact_isqrt<T: PrimInt + Roots>(value: T) -> Option<T> {
    let root = Roots::sqrt(&value);
    (root * root == value).then_some(root)
}

/// Decomposes a finite float into `mantissa * 2^exponent` and builds the ratio.
fn dyadic_ratio<T>(value: f64) -> Option<Ratio<T>>
where
    T: PrimInt + Integer + Signed + Bounded + NumCast + CheckedMul + Clone,
    Ratio<T>: FromPrimitive,
{
    if !value.is_finite() {
        return None;
    }
    if value == 0.0 {
        return Some(Ratio::from_integer(T::zero()));
    }
    let (mantissa, exponent, sign) = num_traits::float::FloatCore::integer_decode(value);
    let shift = mantissa.trailing_zeros();
    let mantissa = T::from(mantissa >> shift)?;
    let exponent = exponent as i32 + shift as i32;
    let numer = if sign < 0 { T::zero() - mantissa } else { mantissa };
    let bits = (std::mem::size_of::<T>() * 8 - 2) as u32;
    if exponent >= 0 {
        if exponent as u32 >= bits {
            return None;
        }
        let scaled = numer.checked_mul(&(T::one() << exponent as usize))?;
        return Some(Ratio::from_integer(scaled));
    }
    let denom_shift = (-exponent) as u32;
    if denom_shift >= bits {
        // Too fine for the integer width; the approximating conversion is the fallback.
        return <Ratio<T> as FromPrimitive>::from_f64(value);
    }
    Some(Ratio::new(numer, T::one() << denom_shift as usize))
}
