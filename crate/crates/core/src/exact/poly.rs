use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_traits::{One, Zero};
use smallvec::SmallVec;

use super::scalar::{scalar_to_string, Coeff, Scalar};
use super::var::Var;

/// Sparse commutative monomial: `(variable, exponent)` pairs sorted by variable,
/// exponents strictly positive.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Monomial(SmallVec<[(Var, u32); 4]>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(SmallVec::new())
    }

    pub fn var(v: Var) -> Self {
        Self::var_pow(v, 1)
    }

    pub fn var_pow(v: Var, e: u32) -> Self {
        if e == 0 {
            return Self::one();
        }
        let mut s = SmallVec::new();
        s.push((v, e));
        Monomial(s)
    }

    pub fn from_pairs(mut pairs: Vec<(Var, u32)>) -> Self {
        pairs.sort();
        let mut out: SmallVec<[(Var, u32); 4]> = SmallVec::new();
        for (v, e) in pairs {
            if e == 0 {
                continue;
            }
            match out.last_mut() {
                Some(last) if last.0 == v => last.1 += e,
                _ => out.push((v, e)),
            }
        }
        Monomial(out)
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn pairs(&self) -> &[(Var, u32)] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|p| p.1).sum()
    }

    pub fn degree_in(&self, v: Var) -> u32 {
        self.0.iter().find(|p| p.0 == v).map(|p| p.1).unwrap_or(0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let (a, b) = (&self.0, &other.0);
        let mut out = SmallVec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((a[i].0, a[i].1 + b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Monomial(out)
    }

    /// Removes `v` entirely, returning its exponent and the rest.
    pub fn split_off(&self, v: Var) -> (u32, Monomial) {
        let mut rest = self.0.clone();
        let mut e = 0;
        if let Some(pos) = rest.iter().position(|p| p.0 == v) {
            e = rest[pos].1;
            rest.remove(pos);
        }
        (e, Monomial(rest))
    }

    fn named(&self) -> Vec<(String, u32)> {
        let mut v: Vec<(String, u32)> = self.0.iter().map(|(x, e)| (x.name().to_string(), *e)).collect();
        v.sort();
        v
    }

    /// Graded-lexicographic comparison by variable name (higher degree first).
    pub fn grlex_cmp(&self, other: &Monomial) -> Ordering {
        other
            .degree()
            .cmp(&self.degree())
            .then_with(|| {
                let (a, b) = (self.named(), other.named());
                // lex: compare exponent vectors over the union of names, larger exponent first
                let mut i = 0;
                let mut j = 0;
                while i < a.len() || j < b.len() {
                    match (a.get(i), b.get(j)) {
                        (Some(x), Some(y)) => match x.0.cmp(&y.0) {
                            Ordering::Less => return Ordering::Less,
                            Ordering::Greater => return Ordering::Greater,
                            Ordering::Equal => {
                                if x.1 != y.1 {
                                    return y.1.cmp(&x.1);
                                }
                                i += 1;
                                j += 1;
                            }
                        },
                        (Some(_), None) => return Ordering::Less,
                        (None, Some(_)) => return Ordering::Greater,
                        (None, None) => break,
                    }
                }
                Ordering::Equal
            })
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self
            .named()
            .into_iter()
            .map(|(n, e)| if e == 1 { n } else { format!("{}^{}", n, e) })
            .collect();
        write!(f, "{}", parts.join("*"))
    }
}

/// Sparse multivariate polynomial with coefficients in `C`.
#[derive(Clone, PartialEq, Eq)]
pub struct Poly<C: Coeff> {
    terms: BTreeMap<Monomial, C>,
}

impl<C: Coeff> Poly<C> {
    pub fn new() -> Self {
        Poly { terms: BTreeMap::new() }
    }

    pub fn constant(c: C) -> Self {
        Self::term(Monomial::one(), c)
    }

    pub fn var(v: Var) -> Self {
        Self::term(Monomial::var(v), C::one())
    }

    pub fn named(name: &str) -> Self {
        Self::var(Var::new(name))
    }

    pub fn term(m: Monomial, c: C) -> Self {
        let mut p = Self::new();
        p.add_term(m, c);
        p
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial, C)>) -> Self {
        let mut p = Self::new();
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn add_term(&mut self, m: Monomial, c: C) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = e.get().clone() + c;
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &C)> {
        self.terms.iter()
    }

    pub fn into_terms(self) -> impl Iterator<Item = (Monomial, C)> {
        self.terms.into_iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, m: &Monomial) -> C {
        self.terms.get(m).cloned().unwrap_or_else(C::zero)
    }

    pub fn constant_term(&self) -> C {
        self.coeff(&Monomial::one())
    }

    /// `Some(c)` if the polynomial is a constant.
    pub fn as_constant(&self) -> Option<C> {
        match self.terms.len() {
            0 => Some(C::zero()),
            1 if self.terms.contains_key(&Monomial::one()) => Some(self.constant_term()),
            _ => None,
        }
    }

    pub fn scale(&self, c: &C) -> Self {
        if c.is_zero() {
            return Self::new();
        }
        Poly {
            terms: self.terms.iter().map(|(m, x)| (m.clone(), x.clone() * c.clone())).collect(),
        }
    }

    pub fn mul_monomial(&self, mono: &Monomial, c: &C) -> Self {
        if c.is_zero() {
            return Self::new();
        }
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(m, x)| (m.mul(mono), x.clone() * c.clone()))
                .collect(),
        }
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.degree()).max()
    }

    pub fn degree_in(&self, v: Var) -> u32 {
        self.terms.keys().map(|m| m.degree_in(v)).max().unwrap_or(0)
    }

    /// Sum of `weight(var) * exp` maximised over terms; `None` for zero.
    pub fn weighted_degree(&self, weight: impl Fn(Var) -> i64) -> Option<i64> {
        self.terms
            .keys()
            .map(|m| m.pairs().iter().map(|(v, e)| weight(*v) * *e as i64).sum())
            .max()
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(|m| m.degree());
        match degs.next() {
            None => true,
            Some(d) => degs.all(|e| e == d),
        }
    }

    pub fn homogeneous_part(&self, d: u32) -> Self {
        Poly {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() == d)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn vars(&self) -> Vec<Var> {
        let mut vs: Vec<Var> = self.terms.keys().flat_map(|m| m.pairs().iter().map(|p| p.0)).collect();
        vs.sort();
        vs.dedup();
        vs
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    pub fn derivative(&self, v: Var) -> Self {
        let mut out = Self::new();
        for (m, c) in &self.terms {
            let (e, rest) = m.split_off(v);
            if e == 0 {
                continue;
            }
            let mut k = C::zero();
            for _ in 0..e {
                k = k + C::one();
            }
            out.add_term(rest.mul(&Monomial::var_pow(v, e - 1)), c.clone() * k);
        }
        out
    }

    /// Collects the polynomial as `Σ_k coeff_k · v^k`.
    pub fn by_powers_of(&self, v: Var) -> BTreeMap<u32, Poly<C>> {
        let mut out: BTreeMap<u32, Poly<C>> = BTreeMap::new();
        for (m, c) in &self.terms {
            let (e, rest) = m.split_off(v);
            out.entry(e).or_default().add_term(rest, c.clone());
        }
        out
    }

    pub fn coeff_of_power(&self, v: Var, k: u32) -> Poly<C> {
        let mut out = Poly::new();
        for (m, c) in &self.terms {
            let (e, rest) = m.split_off(v);
            if e == k {
                out.add_term(rest, c.clone());
            }
        }
        out
    }

    /// Simultaneous substitution of variables by polynomials.
    pub fn substitute(&self, subs: &dyn Fn(Var) -> Option<Poly<C>>) -> Self {
        let mut cache: BTreeMap<(Var, u32), Poly<C>> = BTreeMap::new();
        let mut out = Self::new();
        for (m, c) in &self.terms {
            let mut acc = Poly::constant(c.clone());
            let mut kept: Vec<(Var, u32)> = Vec::new();
            for &(v, e) in m.pairs() {
                match subs(v) {
                    Some(p) => {
                        let pw = cache.entry((v, e)).or_insert_with(|| p.pow(e)).clone();
                        acc = &acc * &pw;
                    }
                    None => kept.push((v, e)),
                }
            }
            let keep = Monomial::from_pairs(kept);
            for (m2, c2) in acc.terms {
                out.add_term(m2.mul(&keep), c2);
            }
        }
        out
    }

    pub fn substitute_map(&self, map: &BTreeMap<Var, Poly<C>>) -> Self {
        self.substitute(&|v| map.get(&v).cloned())
    }

    pub fn map_coeffs<D: Coeff>(&self, f: impl Fn(&C) -> D) -> Poly<D> {
        Poly::from_terms(self.terms.iter().map(|(m, c)| (m.clone(), f(c))))
    }

    pub fn filter_terms(&self, keep: impl Fn(&Monomial) -> bool) -> Self {
        Poly {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| keep(m))
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Terms in canonical order (graded-lex by variable name).
    pub fn sorted_terms(&self) -> Vec<(&Monomial, &C)> {
        let mut v: Vec<(&Monomial, &C)> = self.terms.iter().collect();
        v.sort_by(|a, b| a.0.grlex_cmp(b.0));
        v
    }

    pub fn render(&self, coeff: impl Fn(&C) -> String) -> String {
        if self.terms.is_empty() {
            return coeff(&C::zero());
        }
        self.sorted_terms()
            .into_iter()
            .map(|(m, c)| {
                if m.is_one() {
                    coeff(c)
                } else {
                    format!("{}*{}", coeff(c), m)
                }
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

impl Poly<Scalar> {
    /// Canonical text: graded-lex term order, coefficients as `p/q`.
    pub fn canonical_string(&self) -> String {
        self.render(scalar_to_string)
    }

    /// Inverse of [`canonical_string`](Self::canonical_string).
    pub fn parse_canonical(text: &str) -> Option<Self> {
        let mut out = Poly::new();
        for term in text.split(" + ") {
            let (c, rest) = match term.split_once('*') {
                Some((c, r)) => (c, Some(r)),
                None => (term, None),
            };
            let c = super::scalar::parse_scalar(c)?;
            let mut pairs = Vec::new();
            if let Some(r) = rest {
                for f in r.split('*') {
                    let (name, e) = match f.rsplit_once('^') {
                        Some((n, e)) => (n, e.parse().ok()?),
                        None => (f, 1u32),
                    };
                    if name.is_empty() {
                        return None;
                    }
                    pairs.push((Var::new(name), e));
                }
            }
            out.add_term(Monomial::from_pairs(pairs), c);
        }
        Some(out)
    }

    pub fn eval(&self, point: &dyn Fn(Var) -> Scalar) -> Scalar {
        let mut acc = Scalar::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for &(v, e) in m.pairs() {
                let x = point(v);
                for _ in 0..e {
                    t *= x.clone();
                }
            }
            acc += t;
        }
        acc
    }
}

impl<C: Coeff> fmt::Debug for Poly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl<C: Coeff> fmt::Display for Poly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = self.render(|c| {
            let t = c.to_string();
            if t.contains(['+', '-', '/']) && t.len() > 1 {
                format!("({})", t)
            } else {
                t
            }
        });
        write!(f, "{}", s)
    }
}

impl<C: Coeff> Default for Poly<C> {
    fn default() -> Self {
        Poly::new()
    }
}

impl<C: Coeff> Zero for Poly<C> {
    fn zero() -> Self {
        Poly::new()
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl<C: Coeff> One for Poly<C> {
    fn one() -> Self {
        Poly::constant(C::one())
    }
}

impl<C: Coeff> From<C> for Poly<C> {
    fn from(c: C) -> Self {
        Poly::constant(c)
    }
}

impl<'a, C: Coeff> Add<&'a Poly<C>> for &'a Poly<C> {
    type Output = Poly<C>;
    fn add(self, rhs: &Poly<C>) -> Poly<C> {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl<C: Coeff> Add for Poly<C> {
    type Output = Poly<C>;
    fn add(mut self, rhs: Poly<C>) -> Poly<C> {
        if self.terms.len() < rhs.terms.len() {
            let mut r = rhs;
            r += &self;
            return r;
        }
        for (m, c) in rhs.terms {
            self.add_term(m, c);
        }
        self
    }
}

impl<C: Coeff> AddAssign<&Poly<C>> for Poly<C> {
    fn add_assign(&mut self, rhs: &Poly<C>) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), c.clone());
        }
    }
}

impl<C: Coeff> AddAssign for Poly<C> {
    fn add_assign(&mut self, rhs: Poly<C>) {
        for (m, c) in rhs.terms {
            self.add_term(m, c);
        }
    }
}

impl<C: Coeff> SubAssign<&Poly<C>> for Poly<C> {
    fn sub_assign(&mut self, rhs: &Poly<C>) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), -c.clone());
        }
    }
}

impl<C: Coeff> SubAssign for Poly<C> {
    fn sub_assign(&mut self, rhs: Poly<C>) {
        for (m, c) in rhs.terms {
            self.add_term(m, -c);
        }
    }
}

impl<'a, C: Coeff> Sub<&'a Poly<C>> for &'a Poly<C> {
    type Output = Poly<C>;
    fn sub(self, rhs: &Poly<C>) -> Poly<C> {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl<C: Coeff> Sub for Poly<C> {
    type Output = Poly<C>;
    fn sub(mut self, rhs: Poly<C>) -> Poly<C> {
        self -= rhs;
        self
    }
}

impl<C: Coeff> Neg for Poly<C> {
    type Output = Poly<C>;
    fn neg(self) -> Poly<C> {
        Poly {
            terms: self.terms.into_iter().map(|(m, c)| (m, -c)).collect(),
        }
    }
}

impl<C: Coeff> Neg for &Poly<C> {
    type Output = Poly<C>;
    fn neg(self) -> Poly<C> {
        -(self.clone())
    }
}

impl<'a, C: Coeff> Mul<&'a Poly<C>> for &'a Poly<C> {
    type Output = Poly<C>;
    fn mul(self, rhs: &Poly<C>) -> Poly<C> {
        if self.terms.is_empty() || rhs.terms.is_empty() {
            return Poly::new();
        }
        let mut acc: std::collections::HashMap<Monomial, C> =
            std::collections::HashMap::with_capacity(self.terms.len() * rhs.terms.len());
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                let m = ma.mul(mb);
                let c = ca.clone() * cb.clone();
                match acc.get_mut(&m) {
                    Some(x) => *x = x.clone() + c,
                    None => {
                        acc.insert(m, c);
                    }
                }
            }
        }
        Poly {
            terms: acc.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
        }
    }
}

impl<C: Coeff> Mul for Poly<C> {
    type Output = Poly<C>;
    fn mul(self, rhs: Poly<C>) -> Poly<C> {
        &self * &rhs
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::scalar::{frac, int};

    type Q = Poly<Scalar>;

    #[test]
    fn arithmetic_basics() {
        let x = Q::named("x");
        let y = Q::named("y");
        let p = &(&x + &y) * &(&x - &y);
        let q = &x.pow(2) - &y.pow(2);
        assert_eq!(p, q);
        assert!((&p - &q).is_zero());
        assert_eq!(p.total_degree(), Some(2));
    }

    #[test]
    fn canonical_order_is_graded_lex() {
        let x = Q::named("x");
        let y = Q::named("y");
        let p = &(&y + &x.pow(2)) + &Q::constant(frac(1, 2));
        assert_eq!(p.canonical_string(), "1/1*x^2 + 1/1*y + 1/2");
        assert_eq!(Q::parse_canonical(&p.canonical_string()), Some(p));
        let q = &Q::named("E(1,2)") * &Q::named("w(1)").scale(&frac(-3, 4));
        assert_eq!(Q::parse_canonical(&q.canonical_string()), Some(q));
        assert_eq!(Q::parse_canonical("0/1"), Some(Q::zero()));
    }

    #[test]
    fn substitution_and_derivative() {
        let x = Var::new("x");
        let y = Var::new("y");
        let p = &Q::var(x).pow(3) + &Q::var(y);
        let d = p.derivative(x);
        assert_eq!(d, Q::var(x).pow(2).scale(&int(3)));
        let s = p.substitute(&|v| if v == x { Some(&Q::var(y) + &Q::one()) } else { None });
        let expect = &(&Q::var(y) + &Q::one()).pow(3) + &Q::var(y);
        assert_eq!(s, expect);
    }

    #[test]
    fn works_over_floats() {
        let x: Poly<f64> = Poly::named("x");
        let p = &(&x + &Poly::constant(1.0)) * &(&x - &Poly::constant(1.0));
        assert_eq!(p.coeff(&Monomial::one()), -1.0);
    }
}
