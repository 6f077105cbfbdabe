//! Exact rational scalars used throughout the combinatorial core.

use alloc::string::{String, ToString};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

/// Arbitrary-precision rational. Always stored reduced with positive denominator.
pub type Rat = BigRational;

pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn zero() -> Rat {
    Rat::zero()
}

/// Parses `"p"` or `"p/q"` with optional sign; denominators must be nonzero.
pub fn parse_rat(s: &str) -> Result<Rat, String> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), Some(d.trim())),
        None => (s, None),
    };
    let n: BigInt = num
        .parse()
        .map_err(|_| alloc::format!("invalid rational {s:?}"))?;
    let d: BigInt = match den {
        Some(d) => d
            .parse()
            .map_err(|_| alloc::format!("invalid rational {s:?}"))?,
        None => BigInt::from(1),
    };
    if d.is_zero() {
        return Err(alloc::format!("zero denominator in {s:?}"));
    }
    Ok(Rat::new(n, d))
}

/// Canonical text form: reduced, `"p"` when integral, else `"p/q"` with q > 0.
pub fn format_rat(r: &Rat) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        alloc::format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn rat_to_f64(r: &Rat) -> f64 {
    r.to_f64().expect("rational out of f64 range")
}

/// Positive gcd of two rationals: the largest rational dividing both exactly.
pub fn rat_gcd(a: &Rat, b: &Rat) -> Rat {
    use num_integer::Integer;
    if a.is_zero() {
        return b.abs();
    }
    if b.is_zero() {
        return a.abs();
    }
    let num = a.numer().gcd(b.numer());
    let den = a.denom().lcm(b.denom());
    Rat::new(num, den)
}
