use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use super::poly::{Monomial, Poly};
use super::scalar::Coeff;
use super::var::Var;
use super::ExactError;

/// Truncated Laurent series in one distinguished variable with polynomial
/// coefficients. Every stored exponent is `< order`; results of arithmetic
/// are exact modulo `var^order`.
#[derive(Clone, PartialEq, Eq)]
pub struct TruncSeries<C: Coeff> {
    var: Var,
    order: i32,
    coeffs: BTreeMap<i32, Poly<C>>,
}

impl<C: Coeff> TruncSeries<C> {
    pub fn zero(var: Var, order: i32) -> Self {
        TruncSeries { var, order, coeffs: BTreeMap::new() }
    }

    pub fn one(var: Var, order: i32) -> Self {
        Self::monomial(var, order, 0, Poly::one())
    }

    /// `c · var^k` (dropped if `k >= order`).
    pub fn monomial(var: Var, order: i32, k: i32, c: Poly<C>) -> Self {
        let mut s = Self::zero(var, order);
        s.add_coeff(k, c);
        s
    }

    /// Reads a polynomial as a series in `var`.
    pub fn from_poly(p: &Poly<C>, var: Var, order: i32) -> Self {
        let mut s = Self::zero(var, order);
        for (k, c) in p.by_powers_of(var) {
            s.add_coeff(k as i32, c);
        }
        s
    }

    pub fn from_coeffs(var: Var, order: i32, coeffs: impl IntoIterator<Item = (i32, Poly<C>)>) -> Self {
        let mut s = Self::zero(var, order);
        for (k, c) in coeffs {
            s.add_coeff(k, c);
        }
        s
    }

    pub fn var(&self) -> Var {
        self.var
    }

    pub fn order(&self) -> i32 {
        self.order
    }

    pub fn add_coeff(&mut self, k: i32, c: Poly<C>) {
        if k >= self.order || c.is_zero() {
            return;
        }
        let e = self.coeffs.entry(k).or_default();
        *e += c;
        if e.is_zero() {
            self.coeffs.remove(&k);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn low_degree(&self) -> Option<i32> {
        self.coeffs.keys().next().copied()
    }

    pub fn coeffs(&self) -> impl Iterator<Item = (i32, &Poly<C>)> {
        self.coeffs.iter().map(|(k, c)| (*k, c))
    }

    pub fn coefficient_of(&self, k: i32) -> Result<Poly<C>, ExactError> {
        if k >= self.order {
            return Err(ExactError::BeyondTruncation { requested: k, order: self.order });
        }
        Ok(self.coeffs.get(&k).cloned().unwrap_or_default())
    }

    pub fn truncate(&self, order: i32) -> Self {
        let order = order.min(self.order);
        TruncSeries {
            var: self.var,
            order,
            coeffs: self.coeffs.range(..order).map(|(k, c)| (*k, c.clone())).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check_var(other);
        let mut out = self.truncate(self.order.min(other.order));
        for (k, c) in &other.coeffs {
            out.add_coeff(*k, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        TruncSeries {
            var: self.var,
            order: self.order,
            coeffs: self.coeffs.iter().map(|(k, c)| (*k, -c)).collect(),
        }
    }

    pub fn scale(&self, p: &Poly<C>) -> Self {
        let mut out = Self::zero(self.var, self.order);
        for (k, c) in &self.coeffs {
            out.add_coeff(*k, c * p);
        }
        out
    }

    /// Multiplies by `var^k`; the truncation order shifts along.
    pub fn shift(&self, k: i32) -> Self {
        TruncSeries {
            var: self.var,
            order: self.order + k,
            coeffs: self.coeffs.iter().map(|(e, c)| (*e + k, c.clone())).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.check_var(other);
        // a valid to order Na with low degree la, b valid to Nb with low lb:
        // product valid to min(Na + lb, Nb + la)
        let la = self.low_degree().unwrap_or(self.order);
        let lb = other.low_degree().unwrap_or(other.order);
        let order = (self.order + lb).min(other.order + la);
        let mut out = Self::zero(self.var, order);
        for (i, a) in &self.coeffs {
            for (j, b) in &other.coeffs {
                if i + j < order {
                    out.add_coeff(i + j, a * b);
                }
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(self.var, self.order);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Substitutes `var -> c · var^k` (k ≥ 1) for a constant `c`.
    pub fn compose_monomial(&self, c: &C, k: i32) -> Self {
        assert!(k >= 1);
        let mut out = Self::zero(self.var, self.order.saturating_mul(k));
        for (e, p) in &self.coeffs {
            let mut f = C::one();
            for _ in 0..e.unsigned_abs() {
                f = f * c.clone();
            }
            if *e < 0 {
                f = C::one() / f;
            }
            out.add_coeff(e * k, p.scale(&f));
        }
        out
    }

    /// Converts back to a polynomial; only valid for nonnegative support.
    pub fn to_poly(&self) -> Poly<C> {
        let mut out = Poly::new();
        for (k, c) in &self.coeffs {
            assert!(*k >= 0, "negative power in to_poly");
            out += c.mul_monomial(&Monomial::var_pow(self.var, *k as u32), &C::one());
        }
        out
    }

    fn check_var(&self, other: &Self) {
        assert_eq!(self.var, other.var, "series in different variables");
    }
}

/// Inverse of a series whose lowest coefficient is a nonzero constant.
pub fn series_invert<C: Coeff>(s: &TruncSeries<C>) -> Result<TruncSeries<C>, ExactError> {
    let low = s.low_degree().ok_or(ExactError::NotInvertible)?;
    let lead = s.coeffs[&low].as_constant().filter(|c| !c.is_zero()).ok_or(ExactError::NotInvertible)?;
    let inv_lead = C::one() / lead;
    // s = var^low · u with u = 1 + ..., u known to order N = order - low
    let n = s.order - low;
    let mut u: Vec<Poly<C>> = (0..n).map(|k| s.coeffs.get(&(k + low)).cloned().unwrap_or_default().scale(&inv_lead)).collect();
    if u.is_empty() {
        u.push(Poly::one());
    }
    let mut t: Vec<Poly<C>> = Vec::with_capacity(n as usize);
    for k in 0..n as usize {
        if k == 0 {
            t.push(Poly::one());
            continue;
        }
        let mut acc = Poly::new();
        for j in 1..=k {
            if u[j].is_zero() {
                continue;
            }
            acc -= &u[j] * &t[k - j];
        }
        t.push(acc);
    }
    let mut out = TruncSeries::zero(s.var, n - low);
    for (k, c) in t.into_iter().enumerate() {
        out.add_coeff(k as i32 - low, c.scale(&inv_lead));
    }
    Ok(out)
}

impl<C: Coeff> fmt::Debug for TruncSeries<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .map(|(k, c)| format!("({})*{}^{}", c, self.var, k))
            .collect();
        write!(f, "{} + O({}^{})", parts.join(" + "), self.var, self.order)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::scalar::{int, Scalar};

    type Q = Poly<Scalar>;

    fn tau() -> Var {
        Var::new("tau")
    }

    #[test]
    fn geometric_series() {
        let s = TruncSeries::from_poly(&(Q::one() - Q::var(tau())), tau(), 4);
        let inv = series_invert(&s).unwrap();
        for k in 0..4 {
            assert_eq!(inv.coefficient_of(k).unwrap(), Q::one());
        }
        assert!(inv.coefficient_of(4).is_err());
        let one = series_invert(&TruncSeries::<Scalar>::one(tau(), 5)).unwrap();
        assert_eq!(one, TruncSeries::one(tau(), 5));
    }

    #[test]
    fn invert_quadratic() {
        let a = Q::named("a");
        let b = Q::named("b");
        let t = Q::var(tau());
        let p = &(&Q::one() - &(&t * &a)) - &(&t.pow(2) * &b);
        let s = TruncSeries::from_poly(&p, tau(), 3);
        let inv = series_invert(&s).unwrap();
        assert_eq!(inv.coefficient_of(1).unwrap(), a);
        assert_eq!(inv.coefficient_of(2).unwrap(), &a.pow(2) + &b);
        let back = inv.mul(&s);
        assert_eq!(back, TruncSeries::one(tau(), 3));
    }

    #[test]
    fn laurent_access_and_nonunit() {
        let z = Var::new("z");
        let s = TruncSeries::from_coeffs(z, 3, [(-1, Q::one()), (0, Q::constant(int(5)))]);
        assert_eq!(s.coefficient_of(-1).unwrap(), Q::one());
        let bad = TruncSeries::monomial(z, 3, 0, Q::named("a"));
        assert!(matches!(series_invert(&bad), Err(ExactError::NotInvertible)));
    }

    #[test]
    fn invert_with_pole() {
        let z = Var::new("z");
        // z + z^2 -> z^{-1} (1 - z + z^2 - ...)
        let s = TruncSeries::from_coeffs(z, 6, [(1, Q::one()), (2, Q::one())]);
        let inv = series_invert(&s).unwrap();
        assert_eq!(inv.coefficient_of(-1).unwrap(), Q::one());
        assert_eq!(inv.coefficient_of(0).unwrap(), -Q::one());
        let prod = inv.mul(&s);
        assert_eq!(prod.coefficient_of(0).unwrap(), Q::one());
        for k in 1..prod.order() {
            assert!(prod.coefficient_of(k).unwrap().is_zero());
        }
    }
}
