//! Ordered-generator associative algebras and normal ordering by straightening.
//!
//! A presentation lists generators `g_0 < g_1 < …` and, for each pair
//! `a > b` that does not commute, a rewrite `g_a g_b = g_b g_a + R_{ab}`.
//! Elements are finite sums of sorted monomials with polynomial coefficients;
//! central parameters (ζ, ħ) live in the coefficients.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;
use std::time::Instant;

use num_traits::{One, Zero};
use parking_lot::RwLock;
use smallvec::SmallVec;

use crate::exact::{scalar_to_string, Monomial, QPoly, Scalar, Var};
use crate::report::VerificationReport;

/// Sorted run list of `(generator, exponent)`, exponents nonzero.
pub type Mono = SmallVec<[(u32, i32); 4]>;

const DEPTH_LIMIT: u32 = 4000;
const MEMO_CAP: usize = 400_000;
pub const DEFAULT_SYM_CAP: u32 = 8;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PbwError {
    #[error("unknown generator {0}")]
    UnknownGenerator(String),
    #[error("rewrite for ({0}, {1}) does not lower the filtration degree")]
    NonDecreasing(String, String),
    #[error("central generator {0} has a nonzero commutator")]
    CentralViolation(String),
    #[error("negative power of non-invertible generator {0}")]
    NotInvertible(String),
    #[error("non-terminating rewrite: {0}")]
    NonTerminating(String),
    #[error("symmetrization degree cap: degree {degree} exceeds {cap}")]
    SymmetrizationCap { degree: u32, cap: u32 },
    #[error("malformed presentation data: {0}")]
    Malformed(String),
}

/// Element: sorted monomial → coefficient, no zero coefficients.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct PBWElement {
    terms: BTreeMap<Mono, QPoly>,
}

impl PBWElement {
    pub fn zero() -> Self {
        PBWElement::default()
    }

    pub fn one() -> Self {
        Self::scalar(QPoly::one())
    }

    pub fn scalar(c: QPoly) -> Self {
        let mut e = Self::zero();
        e.add_term(Mono::new(), c);
        e
    }

    pub fn constant(c: Scalar) -> Self {
        Self::scalar(QPoly::constant(c))
    }

    pub fn mono(m: &[(u32, i32)]) -> Self {
        let mut e = Self::zero();
        e.add_term(m.iter().copied().collect(), QPoly::one());
        e
    }

    pub fn gen(i: usize) -> Self {
        Self::gen_pow(i, 1)
    }

    pub fn gen_pow(i: usize, e: i32) -> Self {
        if e == 0 {
            return Self::one();
        }
        Self::mono(&[(i as u32, e)])
    }

    pub fn add_term(&mut self, m: Mono, c: QPoly) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add_scaled(&mut self, other: &PBWElement, c: &QPoly) {
        for (m, d) in &other.terms {
            self.add_term(m.clone(), d * c);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Mono, &QPoly)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: &[(u32, i32)]) -> QPoly {
        let key: Mono = m.iter().copied().collect();
        self.terms.get(&key).cloned().unwrap_or_default()
    }

    /// The coefficient of the empty monomial.
    pub fn scalar_part(&self) -> QPoly {
        self.coeff(&[])
    }

    pub fn as_scalar(&self) -> Option<QPoly> {
        if self.terms.keys().all(|m| m.is_empty()) {
            Some(self.scalar_part())
        } else {
            None
        }
    }

    pub fn scale(&self, c: &QPoly) -> Self {
        let mut out = Self::zero();
        out.add_scaled(self, c);
        out
    }

    pub fn scale_scalar(&self, c: &Scalar) -> Self {
        self.scale(&QPoly::constant(c.clone()))
    }

    pub fn map_coeffs(&self, f: impl Fn(&QPoly) -> QPoly) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            out.add_term(m.clone(), f(c));
        }
        out
    }

    /// Keeps the terms whose monomial satisfies `keep`.
    pub fn filter(&self, keep: impl Fn(&Mono) -> bool) -> Self {
        PBWElement { terms: self.terms.iter().filter(|(m, _)| keep(m)).map(|(m, c)| (m.clone(), c.clone())).collect() }
    }

    pub fn uses_generator(&self, g: usize) -> bool {
        self.terms.keys().any(|m| m.iter().any(|&(a, _)| a as usize == g))
    }

    pub fn render(&self, labels: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        self.terms
            .iter()
            .map(|(m, c)| {
                let cs = if c.as_constant().is_some() { c.canonical_string() } else { format!("({})", c.canonical_string()) };
                if m.is_empty() {
                    cs
                } else {
                    format!("{}*{}", cs, mono_string(m, labels))
                }
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

pub fn mono_string(m: &[(u32, i32)], labels: &[String]) -> String {
    m.iter()
        .map(|&(g, e)| if e == 1 { labels[g as usize].clone() } else { format!("{}^{}", labels[g as usize], e) })
        .collect::<Vec<_>>()
        .join("*")
}

impl fmt::Debug for PBWElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(m, c)| {
                let ms: Vec<String> = m.iter().map(|(g, e)| format!("g{}^{}", g, e)).collect();
                format!("({})*[{}]", c, ms.join(" "))
            })
            .collect();
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

impl std::ops::Add<&PBWElement> for &PBWElement {
    type Output = PBWElement;
    fn add(self, rhs: &PBWElement) -> PBWElement {
        let mut out = self.clone();
        out.add_scaled(rhs, &QPoly::one());
        out
    }
}

impl std::ops::Sub<&PBWElement> for &PBWElement {
    type Output = PBWElement;
    fn sub(self, rhs: &PBWElement) -> PBWElement {
        let mut out = self.clone();
        out.add_scaled(rhs, &-QPoly::one());
        out
    }
}

impl std::ops::Neg for &PBWElement {
    type Output = PBWElement;
    fn neg(self) -> PBWElement {
        self.scale(&-QPoly::one())
    }
}

impl std::ops::AddAssign<&PBWElement> for PBWElement {
    fn add_assign(&mut self, rhs: &PBWElement) {
        self.add_scaled(rhs, &QPoly::one());
    }
}

impl std::ops::SubAssign<&PBWElement> for PBWElement {
    fn sub_assign(&mut self, rhs: &PBWElement) {
        self.add_scaled(rhs, &-QPoly::one());
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Generator {
    pub label: String,
    /// Filtration (Kazhdan) degree; positive.
    pub degree: i64,
    pub t_weight: i64,
    pub central: bool,
    pub invertible: bool,
}

impl Generator {
    pub fn new(label: impl Into<String>, degree: i64) -> Self {
        Generator { label: label.into(), degree, t_weight: 0, central: false, invertible: false }
    }

    pub fn weight(mut self, w: i64) -> Self {
        self.t_weight = w;
        self
    }

    pub fn central(mut self) -> Self {
        self.central = true;
        self
    }

    pub fn invertible(mut self) -> Self {
        self.invertible = true;
        self
    }
}

/// Collects generators and commutators before validation.
#[derive(Default)]
pub struct PBWBuilder {
    gens: Vec<Generator>,
    commutators: BTreeMap<(usize, usize), PBWElement>,
    coeff_degrees: BTreeMap<Var, i64>,
}

impl PBWBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn generator(&mut self, g: Generator) -> usize {
        self.gens.push(g);
        self.gens.len() - 1
    }

    pub fn coeff_degree(&mut self, v: Var, d: i64) {
        self.coeff_degrees.insert(v, d);
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.gens.iter().position(|g| g.label == label)
    }

    /// Declares `[g_a, g_b] = c`. Later declarations for the same pair replace earlier ones.
    pub fn commutator(&mut self, a: usize, b: usize, c: PBWElement) {
        assert_ne!(a, b, "self-commutator");
        if a > b {
            self.commutators.insert((a, b), c);
        } else {
            self.commutators.insert((b, a), -&c);
        }
    }

    pub fn build(self) -> Result<PBWPresentation, PbwError> {
        PBWPresentation::from_parts(self.gens, self.commutators, self.coeff_degrees)
    }
}

type PairKey = (u32, i32, u32, i32);

pub struct PBWPresentation {
    gens: Vec<Generator>,
    labels: Vec<String>,
    index: HashMap<String, usize>,
    /// `rewrite[a][b]` for `a > b`: `g_a g_b - g_b g_a`.
    rewrite: Vec<Vec<Option<Arc<PBWElement>>>>,
    coeff_degrees: BTreeMap<Var, i64>,
    pair_memo: RwLock<HashMap<PairKey, Arc<PBWElement>>>,
    mono_memo: RwLock<HashMap<(Mono, Mono), Arc<PBWElement>>>,
}

impl Clone for PBWPresentation {
    fn clone(&self) -> Self {
        PBWPresentation {
            gens: self.gens.clone(),
            labels: self.labels.clone(),
            index: self.index.clone(),
            rewrite: self.rewrite.clone(),
            coeff_degrees: self.coeff_degrees.clone(),
            pair_memo: RwLock::new(HashMap::new()),
            mono_memo: RwLock::new(HashMap::new()),
        }
    }
}

impl fmt::Debug for PBWPresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PBWPresentation({} generators)", self.gens.len())
    }
}

fn abs_degree(gens: &[Generator], m: &[(u32, i32)]) -> i64 {
    m.iter().map(|&(g, e)| gens[g as usize].degree * e.abs() as i64).sum()
}

impl PBWPresentation {
    fn from_parts(
        gens: Vec<Generator>,
        commutators: BTreeMap<(usize, usize), PBWElement>,
        coeff_degrees: BTreeMap<Var, i64>,
    ) -> Result<Self, PbwError> {
        let n = gens.len();
        let mut rewrite = vec![vec![None; n]; n];
        for ((a, b), c) in commutators {
            if a >= n || b >= n {
                return Err(PbwError::Malformed(format!("pair ({}, {}) out of range", a, b)));
            }
            if c.is_zero() {
                continue;
            }
            if gens[a].central || gens[b].central {
                let g = if gens[a].central { a } else { b };
                return Err(PbwError::CentralViolation(gens[g].label.clone()));
            }
            let bound = gens[a].degree + gens[b].degree;
            for (m, _) in c.terms() {
                for &(g, e) in m.iter() {
                    if g as usize >= n {
                        return Err(PbwError::Malformed(format!("generator index {}", g)));
                    }
                    if e < 0 && !gens[g as usize].invertible {
                        return Err(PbwError::NotInvertible(gens[g as usize].label.clone()));
                    }
                }
                if abs_degree(&gens, m) >= bound {
                    return Err(PbwError::NonDecreasing(gens[a].label.clone(), gens[b].label.clone()));
                }
            }
            rewrite[a][b] = Some(Arc::new(c));
        }
        let labels: Vec<String> = gens.iter().map(|g| g.label.clone()).collect();
        Ok(PBWPresentation {
            index: labels.iter().enumerate().map(|(i, l)| (l.clone(), i)).collect(),
            labels,
            gens,
            rewrite,
            coeff_degrees,
            pair_memo: RwLock::new(HashMap::new()),
            mono_memo: RwLock::new(HashMap::new()),
        })
    }

    pub fn num_generators(&self) -> usize {
        self.gens.len()
    }

    pub fn generators(&self) -> &[Generator] {
        &self.gens
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    pub fn gen(&self, label: &str) -> PBWElement {
        PBWElement::gen(self.index_of(label).unwrap_or_else(|| panic!("unknown generator {}", label)))
    }

    pub fn coeff_degrees(&self) -> &BTreeMap<Var, i64> {
        &self.coeff_degrees
    }

    /// `[g_a, g_b]` from the table (zero if they commute).
    pub fn table_commutator(&self, a: usize, b: usize) -> PBWElement {
        if a == b {
            PBWElement::zero()
        } else if a > b {
            self.rewrite[a][b].as_deref().cloned().unwrap_or_default()
        } else {
            -&self.rewrite[b][a].as_deref().cloned().unwrap_or_default()
        }
    }

    fn commutes(&self, a: u32, b: u32) -> bool {
        let (a, b) = if a > b { (a, b) } else { (b, a) };
        self.rewrite[a as usize][b as usize].is_none()
    }

    pub fn render(&self, e: &PBWElement) -> String {
        e.render(&self.labels)
    }

    pub fn clear_memo(&self) {
        self.pair_memo.write().clear();
        self.mono_memo.write().clear();
    }

    pub fn mul(&self, x: &PBWElement, y: &PBWElement) -> PBWElement {
        self.mul_d(x, y, 0)
    }

    pub fn mul3(&self, x: &PBWElement, y: &PBWElement, z: &PBWElement) -> PBWElement {
        self.mul(&self.mul(x, y), z)
    }

    pub fn product(&self, factors: &[PBWElement]) -> PBWElement {
        factors.iter().fold(PBWElement::one(), |acc, f| self.mul(&acc, f))
    }

    pub fn pow(&self, x: &PBWElement, e: u32) -> PBWElement {
        let mut acc = PBWElement::one();
        for _ in 0..e {
            acc = self.mul(&acc, x);
        }
        acc
    }

    pub fn commutator(&self, x: &PBWElement, y: &PBWElement) -> PBWElement {
        &self.mul(x, y) - &self.mul(y, x)
    }

    /// Normal form of a word; a panic inside straightening (depth guard)
    /// is converted into [`PbwError::NonTerminating`].
    pub fn normal_order(&self, word: &[(usize, i32)]) -> Result<PBWElement, PbwError> {
        for &(g, e) in word {
            if g >= self.gens.len() {
                return Err(PbwError::UnknownGenerator(format!("#{}", g)));
            }
            if e < 0 && !self.gens[g].invertible {
                return Err(PbwError::NotInvertible(self.labels[g].clone()));
            }
        }
        let run = || {
            word.iter().fold(PBWElement::one(), |acc, &(g, e)| self.mul(&acc, &PBWElement::gen_pow(g, e)))
        };
        std::panic::catch_unwind(std::panic::AssertUnwindSafe(run)).map_err(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "straightening aborted".into());
            PbwError::NonTerminating(msg)
        })
    }

    pub fn normal_order_labels(&self, word: &[&str]) -> Result<PBWElement, PbwError> {
        let w: Result<Vec<(usize, i32)>, PbwError> = word
            .iter()
            .map(|l| self.index_of(l).map(|i| (i, 1)).ok_or_else(|| PbwError::UnknownGenerator(l.to_string())))
            .collect();
        self.normal_order(&w?)
    }

    fn mul_d(&self, x: &PBWElement, y: &PBWElement, depth: u32) -> PBWElement {
        let mut out = PBWElement::zero();
        for (m1, c1) in &x.terms {
            for (m2, c2) in &y.terms {
                let c = c1 * c2;
                let p = self.mul_mono(m1, m2, depth);
                out.add_scaled(&p, &c);
            }
        }
        out
    }

    fn mul_mono(&self, m1: &[(u32, i32)], m2: &[(u32, i32)], depth: u32) -> PBWElement {
        if m1.is_empty() {
            return PBWElement::mono(m2);
        }
        if m2.is_empty() {
            return PBWElement::mono(m1);
        }
        let (a, p) = m1[m1.len() - 1];
        let (b, q) = m2[0];
        let u = &m1[..m1.len() - 1];
        let v = &m2[1..];
        if a < b {
            let mut m: Mono = m1.iter().copied().collect();
            m.extend(m2.iter().copied());
            return PBWElement::mono(&m);
        }
        if a == b {
            let mut m: Mono = u.iter().copied().collect();
            if p + q != 0 {
                m.push((a, p + q));
            }
            m.extend(v.iter().copied());
            return PBWElement::mono(&m);
        }
        let key: (Mono, Mono) = (m1.iter().copied().collect(), m2.iter().copied().collect());
        if let Some(r) = self.mono_memo.read().get(&key) {
            return (**r).clone();
        }
        if depth > DEPTH_LIMIT {
            panic!(
                "non-terminating rewrite: depth {} while straightening {} * {}",
                depth,
                mono_string(m1, &self.labels),
                mono_string(m2, &self.labels)
            );
        }
        let res = if self.commutes(a, b) {
            let left = self.mul_mono(u, &[(b, q)], depth + 1);
            let right = self.mul_mono(&[(a, p)], v, depth + 1);
            self.mul_d(&left, &right, depth + 1)
        } else {
            let pr = self.pair(a, p, b, q, depth + 1);
            let left = self.mul_d(&PBWElement::mono(u), &pr, depth + 1);
            self.mul_d(&left, &PBWElement::mono(v), depth + 1)
        };
        let mut memo = self.mono_memo.write();
        if memo.len() > MEMO_CAP {
            memo.clear();
        }
        memo.insert(key, Arc::new(res.clone()));
        res
    }

    /// `g_a^p · g_b^q` for `a > b`, normal-ordered.
    fn pair(&self, a: u32, p: i32, b: u32, q: i32, depth: u32) -> PBWElement {
        let key = (a, p, b, q);
        if let Some(r) = self.pair_memo.read().get(&key) {
            return (**r).clone();
        }
        let res = if self.commutes(a, b) {
            PBWElement::mono(&[(b, q), (a, p)])
        } else if p.abs() > 1 {
            let s = p.signum();
            let rest = self.pair(a, p - s, b, q, depth + 1);
            self.mul_d(&PBWElement::gen_pow(a as usize, s), &rest, depth + 1)
        } else if q.abs() > 1 {
            let t = q.signum();
            let first = self.pair(a, p, b, t, depth + 1);
            self.mul_d(&first, &PBWElement::gen_pow(b as usize, q - t), depth + 1)
        } else {
            let r = self.rewrite[a as usize][b as usize].as_deref().expect("noncommuting pair has a rewrite");
            let ga = PBWElement::gen_pow(a as usize, p);
            let gb = PBWElement::gen_pow(b as usize, q);
            match (p, q) {
                (1, 1) => &PBWElement::mono(&[(b, 1), (a, 1)]) + r,
                (1, -1) => {
                    // a b^{-1} = b^{-1} a - b^{-1} R b^{-1}
                    let t = self.mul_d(&self.mul_d(&gb, r, depth + 1), &gb, depth + 1);
                    &PBWElement::mono(&[(b, -1), (a, 1)]) - &t
                }
                (-1, 1) => {
                    // a^{-1} b = b a^{-1} - a^{-1} R a^{-1}
                    let t = self.mul_d(&self.mul_d(&ga, r, depth + 1), &ga, depth + 1);
                    &PBWElement::mono(&[(b, 1), (a, -1)]) - &t
                }
                _ => panic!(
                    "non-terminating rewrite: two inverted noncommuting generators {} and {}",
                    self.labels[a as usize], self.labels[b as usize]
                ),
            }
        };
        self.pair_memo.write().insert(key, Arc::new(res.clone()));
        res
    }

    /// Filtration degree: max over terms of generator degrees plus the
    /// degree of the coefficient monomial in the declared coefficient variables.
    pub fn filtration_degree(&self, e: &PBWElement) -> Option<i64> {
        e.terms
            .iter()
            .map(|(m, c)| {
                let g: i64 = m.iter().map(|&(g, k)| self.gens[g as usize].degree * k as i64).sum();
                let cd = c.weighted_degree(|v| self.coeff_degrees.get(&v).copied().unwrap_or(0)).unwrap_or(0);
                g + cd
            })
            .max()
    }

    /// The terms of maximal filtration degree.
    pub fn top_part(&self, e: &PBWElement) -> PBWElement {
        let Some(d) = self.filtration_degree(e) else { return PBWElement::zero() };
        let mut out = PBWElement::zero();
        for (m, c) in &e.terms {
            let g: i64 = m.iter().map(|&(g, k)| self.gens[g as usize].degree * k as i64).sum();
            let top = c.filter_terms(|mono| {
                let cd: i64 =
                    mono.pairs().iter().map(|&(v, k)| self.coeff_degrees.get(&v).copied().unwrap_or(0) * k as i64).sum();
                g + cd == d
            });
            out.add_term(m.clone(), top);
        }
        out
    }

    /// Commutative image: generator `g` becomes the variable `vars[g]`.
    pub fn to_commutative(&self, e: &PBWElement, vars: &[Var]) -> QPoly {
        let mut out = QPoly::zero();
        for (m, c) in &e.terms {
            let pairs: Vec<(Var, u32)> = m
                .iter()
                .map(|&(g, k)| {
                    assert!(k > 0, "negative power has no commutative image");
                    (vars[g as usize], k as u32)
                })
                .collect();
            out += c.mul_monomial(&Monomial::from_pairs(pairs), &Scalar::one());
        }
        out
    }

    /// Symmetrization of a commutative monomial `Π g^e`: the average of all orderings.
    pub fn symmetrize_mono(&self, mono: &[(usize, u32)], cap: u32) -> Result<PBWElement, PbwError> {
        let mut ms: BTreeMap<usize, u32> = BTreeMap::new();
        for &(g, e) in mono {
            if g >= self.gens.len() {
                return Err(PbwError::UnknownGenerator(format!("#{}", g)));
            }
            if e > 0 {
                *ms.entry(g).or_insert(0) += e;
            }
        }
        let degree: u32 = ms.values().sum();
        if degree > cap {
            return Err(PbwError::SymmetrizationCap { degree, cap });
        }
        let mut memo = HashMap::new();
        Ok(self.sym_rec(&ms, &mut memo))
    }

    fn sym_rec(&self, ms: &BTreeMap<usize, u32>, memo: &mut HashMap<Vec<(usize, u32)>, PBWElement>) -> PBWElement {
        let k: u32 = ms.values().sum();
        if k <= 1 || ms.len() == 1 {
            let m: Mono = ms.iter().filter(|(_, e)| **e > 0).map(|(g, e)| (*g as u32, *e as i32)).collect();
            return PBWElement::mono(&m);
        }
        let key: Vec<(usize, u32)> = ms.iter().map(|(g, e)| (*g, *e)).collect();
        if let Some(r) = memo.get(&key) {
            return r.clone();
        }
        // Sym(μ) = Σ_g (e_g / k) g · Sym(μ - g)
        let mut out = PBWElement::zero();
        for (&g, &e) in ms {
            let mut rest = ms.clone();
            if e == 1 {
                rest.remove(&g);
            } else {
                rest.insert(g, e - 1);
            }
            let tail = self.sym_rec(&rest, memo);
            let prod = self.mul(&PBWElement::gen(g), &tail);
            out.add_scaled(&prod, &QPoly::constant(Scalar::new((e as i64).into(), (k as i64).into())));
        }
        memo.insert(key, out.clone());
        out
    }

    /// Linear extension of symmetrization to a polynomial; variables mapped by
    /// `gen_of` become generators, the rest stay in the coefficients.
    pub fn symmetrize_poly(&self, p: &QPoly, gen_of: &dyn Fn(Var) -> Option<usize>, cap: u32) -> Result<PBWElement, PbwError> {
        let mut out = PBWElement::zero();
        for (m, c) in p.terms() {
            let mut gens = Vec::new();
            let mut rest = Vec::new();
            for &(v, e) in m.pairs() {
                match gen_of(v) {
                    Some(g) => gens.push((g, e)),
                    None => rest.push((v, e)),
                }
            }
            let s = self.symmetrize_mono(&gens, cap)?;
            out.add_scaled(&s, &QPoly::term(Monomial::from_pairs(rest), c.clone()));
        }
        Ok(out)
    }

    /// Substitutes coefficient variables throughout an element.
    pub fn specialize_element(e: &PBWElement, subs: &BTreeMap<Var, QPoly>) -> PBWElement {
        e.map_coeffs(|c| c.substitute_map(subs))
    }

    /// Presentation with coefficient variables substituted in every rewrite.
    pub fn specialize(&self, subs: &BTreeMap<Var, QPoly>) -> Result<PBWPresentation, PbwError> {
        let mut commutators = BTreeMap::new();
        for a in 0..self.gens.len() {
            for b in 0..a {
                if let Some(r) = &self.rewrite[a][b] {
                    commutators.insert((a, b), Self::specialize_element(r, subs));
                }
            }
        }
        let mut degs = self.coeff_degrees.clone();
        for v in subs.keys() {
            degs.remove(v);
        }
        Self::from_parts(self.gens.clone(), commutators, degs)
    }

    /// Letters used by the diamond check: every generator, plus the inverse
    /// of every invertible one.
    fn letters(&self) -> Vec<(u32, i32)> {
        let mut out = Vec::new();
        for (i, g) in self.gens.iter().enumerate() {
            out.push((i as u32, 1));
            if g.invertible {
                out.push((i as u32, -1));
            }
        }
        out
    }

    /// Diamond check on all overlaps `a·b·c` with `a > b > c` (generator order),
    /// comparing `(ab)c` with `a(bc)`; for invertible `b` also `a·b·b⁻¹` style overlaps.
    /// Triples are only formed when `max_word_len ≥ 3`.
    pub fn consistency_check(&self, max_word_len: usize) -> VerificationReport {
        let mut rep = VerificationReport::new("pbw-consistency").param("generators", self.gens.len());
        let started = Instant::now();
        let mut witness = None;
        let mut count = 0usize;
        if max_word_len >= 3 {
            let letters = self.letters();
            let mut triples: Vec<[(u32, i32); 3]> = Vec::new();
            for &x in &letters {
                for &y in &letters {
                    for &z in &letters {
                        let strict = x.0 > y.0 && y.0 > z.0;
                        let inv_mid = (x.0 > y.0 && y.0 == z.0 && y.1 == -z.1) || (x.0 == y.0 && x.1 == -y.1 && y.0 > z.0);
                        if strict || inv_mid {
                            triples.push([x, y, z]);
                        }
                    }
                }
            }
            for t in triples {
                // only noncommuting configurations can fail
                if self.commutes(t[0].0, t[1].0) && self.commutes(t[1].0, t[2].0) && self.commutes(t[0].0, t[2].0) {
                    continue;
                }
                count += 1;
                let [x, y, z] = t.map(|(g, e)| PBWElement::gen_pow(g as usize, e));
                let res = std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| {
                    let l = self.mul(&self.mul(&x, &y), &z);
                    let r = self.mul(&x, &self.mul(&y, &z));
                    &l - &r
                }));
                match res {
                    Ok(d) if d.is_zero() => {}
                    Ok(d) => {
                        witness = Some(format!(
                            "triple ({}, {}, {}): (ab)c - a(bc) = {}",
                            mono_string(&[t[0]], &self.labels),
                            mono_string(&[t[1]], &self.labels),
                            mono_string(&[t[2]], &self.labels),
                            self.render(&d)
                        ));
                        break;
                    }
                    Err(_) => {
                        witness = Some(format!("straightening aborted on triple {:?}", t));
                        break;
                    }
                }
            }
        }
        let ok = witness.is_none();
        rep.record(format!("diamond[{} overlaps]", count), "PBW criterion via overlap ambiguities", ok, witness, started);
        rep
    }

    /// Canonical JSON form (sorted keys, scalars as `p/q`).
    pub fn to_json(&self) -> serde_json::Value {
        let gens: Vec<serde_json::Value> = self
            .gens
            .iter()
            .map(|g| {
                serde_json::json!({
                    "label": g.label, "degree": g.degree, "t_weight": g.t_weight,
                    "central": g.central, "invertible": g.invertible
                })
            })
            .collect();
        let mut rewrites = serde_json::Map::new();
        for a in 0..self.gens.len() {
            for b in 0..a {
                if let Some(r) = &self.rewrite[a][b] {
                    rewrites.insert(format!("{}|{}", a, b), element_to_json(r));
                }
            }
        }
        let degs: serde_json::Map<String, serde_json::Value> =
            self.coeff_degrees.iter().map(|(v, d)| (v.name().to_string(), (*d).into())).collect();
        crate::report::sort_keys(serde_json::json!({
            "generators": gens, "rewrites": rewrites, "coeff_degrees": degs
        }))
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self, PbwError> {
        let bad = |s: &str| PbwError::Malformed(s.to_string());
        let mut b = PBWBuilder::new();
        for g in v["generators"].as_array().ok_or_else(|| bad("generators"))? {
            b.generator(Generator {
                label: g["label"].as_str().ok_or_else(|| bad("label"))?.to_string(),
                degree: g["degree"].as_i64().ok_or_else(|| bad("degree"))?,
                t_weight: g["t_weight"].as_i64().ok_or_else(|| bad("t_weight"))?,
                central: g["central"].as_bool().ok_or_else(|| bad("central"))?,
                invertible: g["invertible"].as_bool().ok_or_else(|| bad("invertible"))?,
            });
        }
        for (k, e) in v["rewrites"].as_object().ok_or_else(|| bad("rewrites"))? {
            let (a, c) = k.split_once('|').ok_or_else(|| bad("rewrite key"))?;
            let a: usize = a.parse().map_err(|_| bad("rewrite key"))?;
            let c: usize = c.parse().map_err(|_| bad("rewrite key"))?;
            b.commutator(a, c, element_from_json(e)?);
        }
        if let Some(d) = v["coeff_degrees"].as_object() {
            for (name, deg) in d {
                b.coeff_degree(Var::new(name), deg.as_i64().ok_or_else(|| bad("coeff degree"))?);
            }
        }
        b.build()
    }
}

pub fn element_to_json(e: &PBWElement) -> serde_json::Value {
    let terms: Vec<serde_json::Value> = e
        .terms()
        .map(|(m, c)| {
            let mono: Vec<[i64; 2]> = m.iter().map(|&(g, k)| [g as i64, k as i64]).collect();
            serde_json::json!({ "coeff": c.canonical_string(), "mono": mono })
        })
        .collect();
    serde_json::Value::Array(terms)
}

pub fn element_from_json(v: &serde_json::Value) -> Result<PBWElement, PbwError> {
    let bad = |s: &str| PbwError::Malformed(s.to_string());
    let mut out = PBWElement::zero();
    for t in v.as_array().ok_or_else(|| bad("element"))? {
        let c = QPoly::parse_canonical(t["coeff"].as_str().ok_or_else(|| bad("coeff"))?).ok_or_else(|| bad("coeff"))?;
        let mut m = Mono::new();
        for p in t["mono"].as_array().ok_or_else(|| bad("mono"))? {
            let g = p[0].as_u64().ok_or_else(|| bad("mono"))? as u32;
            let k = p[1].as_i64().ok_or_else(|| bad("mono"))? as i32;
            m.push((g, k));
        }
        out.add_term(m, c);
    }
    Ok(out)
}

/// `U(g)` for a matrix Lie algebra, generators in basis order, degree 2.
pub fn enveloping(lie: &crate::liedata::LieAlgebraData) -> PBWPresentation {
    let order: Vec<usize> = (0..lie.dim()).collect();
    enveloping_ordered(lie, &order)
}

/// `U(g)` with the basis element `order[p]` as generator `p`.
pub fn enveloping_ordered(lie: &crate::liedata::LieAlgebraData, order: &[usize]) -> PBWPresentation {
    let mut pos = vec![0; lie.dim()];
    let mut b = PBWBuilder::new();
    for (p, &i) in order.iter().enumerate() {
        pos[i] = p;
        b.generator(Generator::new(lie.label(i).to_string(), 2));
    }
    for i in 0..lie.dim() {
        for j in 0..i {
            let mut c = PBWElement::zero();
            for (k, x) in lie.bracket(i, j) {
                c.add_scaled(&PBWElement::gen(pos[*k]), &QPoly::constant(x.clone()));
            }
            b.commutator(pos[i], pos[j], c);
        }
    }
    b.build().expect("enveloping algebra presentation")
}

/// Rewrites `e` (an element of `src`) in `dst`, matching generators by label.
pub fn transport(src: &PBWPresentation, e: &PBWElement, dst: &PBWPresentation) -> Result<PBWElement, PbwError> {
    let map: Vec<Option<usize>> = src.labels().iter().map(|l| dst.index_of(l)).collect();
    let mut out = PBWElement::zero();
    for (m, c) in e.terms() {
        let mut word = Vec::with_capacity(m.len());
        for &(g, k) in m.iter() {
            let t = map[g as usize].ok_or_else(|| PbwError::UnknownGenerator(src.labels()[g as usize].clone()))?;
            word.push((t, k));
        }
        out.add_scaled(&dst.normal_order(&word)?, c);
    }
    Ok(out)
}

/// Algebra map out of a presentation: images of generators, of inverses
/// (for invertible generators), and of coefficient variables. Variables
/// without an image stay in the coefficients.
#[derive(Clone, Debug, Default)]
pub struct AlgebraMap {
    pub images: Vec<PBWElement>,
    pub inverse_images: Vec<Option<PBWElement>>,
    pub coeff_images: BTreeMap<Var, PBWElement>,
}

impl AlgebraMap {
    pub fn new(images: Vec<PBWElement>) -> Self {
        let k = images.len();
        AlgebraMap { images, inverse_images: vec![None; k], coeff_images: BTreeMap::new() }
    }

    /// Image of `e` in `dst`. Coefficient images are multiplied on the left.
    pub fn apply(&self, dst: &PBWPresentation, e: &PBWElement) -> Result<PBWElement, PbwError> {
        let mut out = PBWElement::zero();
        for (m, c) in e.terms() {
            let mut word = PBWElement::one();
            for &(g, k) in m.iter() {
                let g = g as usize;
                let base = if k > 0 {
                    self.images.get(g)
                } else {
                    self.inverse_images.get(g).and_then(|x| x.as_ref())
                }
                .ok_or_else(|| PbwError::UnknownGenerator(format!("no image for #{}^{}", g, k)))?;
                let p = dst.pow(base, k.unsigned_abs());
                word = dst.mul(&word, &p);
            }
            out += &dst.mul(&self.map_coeff(dst, c), &word);
        }
        Ok(out)
    }

    pub fn map_coeff(&self, dst: &PBWPresentation, c: &QPoly) -> PBWElement {
        if self.coeff_images.is_empty() {
            return PBWElement::scalar(c.clone());
        }
        let mut out = PBWElement::zero();
        for (mono, x) in c.terms() {
            let mut keep = Vec::new();
            let mut acc = PBWElement::one();
            for &(v, e) in mono.pairs() {
                match self.coeff_images.get(&v) {
                    Some(img) => acc = dst.mul(&acc, &dst.pow(img, e)),
                    None => keep.push((v, e)),
                }
            }
            out.add_scaled(&acc, &QPoly::term(Monomial::from_pairs(keep), x.clone()));
        }
        out
    }
}

/// Multinomial helper used when checking symmetrization by brute force.
pub fn brute_symmetrize(p: &PBWPresentation, word: &[usize]) -> PBWElement {
    fn perms(v: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
        if k == v.len() {
            out.push(v.clone());
            return;
        }
        for i in k..v.len() {
            v.swap(k, i);
            perms(v, k + 1, out);
            v.swap(k, i);
        }
    }
    let mut all = Vec::new();
    perms(&mut word.to_vec(), 0, &mut all);
    let n = all.len() as i64;
    let mut out = PBWElement::zero();
    for w in all {
        let e = p.product(&w.iter().map(|&g| PBWElement::gen(g)).collect::<Vec<_>>());
        out += &e;
    }
    out.scale_scalar(&Scalar::new(1.into(), n.into()))
}

pub fn scalar_json(s: &Scalar) -> serde_json::Value {
    scalar_to_string(s).into()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::int;
    use crate::liedata::{build_lie, LieKind};

    fn half() -> Scalar {
        Scalar::new(1.into(), 2.into())
    }

    fn gl2() -> PBWPresentation {
        enveloping(&build_lie(LieKind::Gl, 2).unwrap())
    }

    #[test]
    fn gl2_straightening() {
        let u = gl2();
        let e = u.normal_order_labels(&["E(2,1)", "E(1,2)"]).unwrap();
        let expect = &(&u.mul(&u.gen("E(1,2)"), &u.gen("E(2,1)")) - &u.gen("E(1,1)")) + &u.gen("E(2,2)");
        assert_eq!(e, expect);
        let ordered = u.normal_order_labels(&["E(1,1)", "E(1,2)"]).unwrap();
        assert_eq!(ordered.num_terms(), 1);
    }

    #[test]
    fn structure_constant_roundtrip() {
        let lie = build_lie(LieKind::Gl, 3).unwrap();
        let u = enveloping(&lie);
        for i in 1..=3 {
            for j in 1..=3 {
                for k in 1..=3 {
                    for l in 1..=3 {
                        let c = u.commutator(&u.gen(&format!("E({},{})", i, j)), &u.gen(&format!("E({},{})", k, l)));
                        let mut expect = PBWElement::zero();
                        if j == k {
                            expect += &u.gen(&format!("E({},{})", i, l));
                        }
                        if l == i {
                            expect -= &u.gen(&format!("E({},{})", k, j));
                        }
                        assert_eq!(c, expect);
                    }
                }
            }
        }
    }

    #[test]
    fn symmetrize_small() {
        let u = gl2();
        let a = u.index_of("E(1,2)").unwrap();
        let b = u.index_of("E(2,1)").unwrap();
        let s = u.symmetrize_mono(&[(a, 1), (b, 1)], 8).unwrap();
        let expect = &u.mul(&u.gen("E(1,2)"), &u.gen("E(2,1)"))
            + &(&u.gen("E(2,2)") - &u.gen("E(1,1)")).scale_scalar(&half());
        assert_eq!(s, expect);
        assert_eq!(s, brute_symmetrize(&u, &[a, b]));
        let w = [a, b, b, 0, a];
        let mono: Vec<(usize, u32)> = w.iter().map(|&g| (g, 1)).collect();
        assert_eq!(u.symmetrize_mono(&mono, 8).unwrap(), brute_symmetrize(&u, &w));
        assert!(matches!(u.symmetrize_mono(&[(a, 9)], 8), Err(PbwError::SymmetrizationCap { .. })));
    }

    #[test]
    fn weyl_with_inverse() {
        let mut b = PBWBuilder::new();
        let z = b.generator(Generator::new("z", 1).invertible());
        let d = b.generator(Generator::new("d", 1));
        let hb = QPoly::named("hbar").pow(2);
        // ∂ z = z ∂ + ħ²
        b.commutator(d, z, PBWElement::scalar(hb.clone()));
        let w = b.build().unwrap();
        let zi = PBWElement::gen_pow(z, -1);
        let c = w.commutator(&PBWElement::gen(d), &zi);
        assert_eq!(c, PBWElement::gen_pow(z, -2).scale(&-hb.clone()));
        assert_eq!(w.mul(&PBWElement::gen(z), &zi), PBWElement::one());
        assert!(w.consistency_check(3).all_pass());
    }

    #[test]
    fn corrupted_presentation_fails_diamond() {
        let lie = build_lie(LieKind::Gl, 2).unwrap();
        let mut b = PBWBuilder::new();
        for l in lie.labels() {
            b.generator(Generator::new(l.clone(), 2));
        }
        for i in 0..4 {
            for j in 0..i {
                let mut c = PBWElement::zero();
                for (k, x) in lie.bracket(i, j) {
                    c.add_scaled(&PBWElement::gen(*k), &QPoly::constant(x.clone()));
                }
                b.commutator(i, j, c);
            }
        }
        // [E(1,1), E(1,2)] = 2 E(1,2) breaks Jacobi on (E(1,1), E(1,2), E(2,1))
        b.commutator(1, 0, PBWElement::gen(1).scale_scalar(&int(-2)));
        let p = b.build().unwrap();
        let r = p.consistency_check(3);
        assert!(!r.all_pass());
        assert!(r.entries[0].witness.as_ref().unwrap().contains("triple"));
    }

    #[test]
    fn json_roundtrip() {
        let u = gl2();
        let j = u.to_json();
        let back = PBWPresentation::from_json(&j).unwrap();
        assert_eq!(back.to_json(), j);
    }

    #[test]
    fn degree_invariant_enforced() {
        let mut b = PBWBuilder::new();
        let x = b.generator(Generator::new("x", 1));
        let y = b.generator(Generator::new("y", 1));
        b.commutator(y, x, PBWElement::gen_pow(x, 2));
        assert!(matches!(b.build(), Err(PbwError::NonDecreasing(..))));
    }
}
