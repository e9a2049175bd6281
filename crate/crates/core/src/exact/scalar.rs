use std::fmt;
use std::ops::Neg;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, One, Signed, Zero};

/// Coefficient type usable in [`Poly`](super::Poly), [`TruncSeries`](super::TruncSeries)
/// and the dense solver.
///
/// Anything that is a `num_traits::Num` with negation qualifies, so `f64`
/// works for experiments, but every identity checked by this crate is exact
/// and is run over [`Scalar`].
pub trait Coeff: Num + Clone + Neg<Output = Self> + fmt::Debug + fmt::Display + Send + Sync + 'static {
    /// Canonical text used in reports and cache files.
    fn to_canonical(&self) -> String {
        self.to_string()
    }
}

impl<T> Coeff for T where T: Num + Clone + Neg<Output = T> + fmt::Debug + fmt::Display + Send + Sync + 'static {}

/// Exact rational scalar. Always reduced, denominator positive.
pub type Scalar = BigRational;

pub fn int(n: i64) -> Scalar {
    Scalar::from_integer(BigInt::from(n))
}

pub fn frac(n: i64, d: i64) -> Scalar {
    Scalar::new(BigInt::from(n), BigInt::from(d))
}

/// `"p/q"` form, with `"p/1"` for integers; this is the serialized form.
pub fn scalar_to_string(s: &Scalar) -> String {
    format!("{}/{}", s.numer(), s.denom())
}

pub fn parse_scalar(text: &str) -> Option<Scalar> {
    let t = text.trim();
    if let Some((p, q)) = t.split_once('/') {
        let p: BigInt = p.trim().parse().ok()?;
        let q: BigInt = q.trim().parse().ok()?;
        if q.is_zero() {
            return None;
        }
        Some(Scalar::new(p, q))
    } else {
        let p: BigInt = t.parse().ok()?;
        Some(Scalar::from_integer(p))
    }
}

pub fn is_integer(s: &Scalar) -> bool {
    s.denom().is_one()
}

/// Short human form: integers without `/1`.
pub fn scalar_short(s: &Scalar) -> String {
    if is_integer(s) {
        s.numer().to_string()
    } else {
        format!("{}/{}", s.numer(), s.denom())
    }
}

pub fn binomial(n: i64, k: i64) -> Scalar {
    if k < 0 || (n >= 0 && k > n) {
        return Scalar::zero();
    }
    let mut acc = Scalar::one();
    for i in 0..k {
        acc = acc * int(n - i) / int(i + 1);
    }
    acc
}

pub fn factorial(n: u32) -> Scalar {
    (1..=n as i64).fold(Scalar::one(), |a, k| a * int(k))
}

pub fn sign(k: i64) -> Scalar {
    if k.rem_euclid(2) == 0 {
        Scalar::one()
    } else {
        -Scalar::one()
    }
}

pub fn abs(s: &Scalar) -> Scalar {
    s.abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_form_is_reduced() {
        let s = frac(6, -4);
        assert_eq!(scalar_to_string(&s), "-3/2");
        assert_eq!(scalar_to_string(&Scalar::zero()), "0/1");
        assert_eq!(parse_scalar("-3/2"), Some(s));
        assert_eq!(parse_scalar("7"), Some(int(7)));
        assert_eq!(parse_scalar("1/0"), None);
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), int(10));
        assert_eq!(binomial(3, 4), int(0));
        assert_eq!(binomial(-2, 2), int(3));
    }
}
