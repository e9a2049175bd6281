//! Infinitesimal Cherednik algebras of gl_n and sp_2n, universal in the
//! deformation coefficients (ζ_j as central coefficient variables).

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::exact::{QPoly, Scalar, Var};
use crate::liedata::LieKind;
use crate::pairings::{compute_pairings_capped, zeta_var, DeformationParam, PairingError, PairingTable, DEFAULT_JMAX_CAP};
use crate::pbw::{Generator, PBWBuilder, PBWElement, PBWPresentation, PbwError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CherednikError {
    #[error(transparent)]
    Pairing(#[from] PairingError),
    #[error(transparent)]
    Pbw(#[from] PbwError),
    #[error("expected {expected} parameters, got {got}")]
    Length { expected: usize, got: usize },
    #[error("unsupported kind {0}")]
    Kind(String),
    #[error("length m must be at least {0}")]
    Range(usize),
}

#[derive(Clone, Debug)]
pub struct CherednikAlgebra {
    pub kind: LieKind,
    pub n: usize,
    pub m: usize,
    pub presentation: PBWPresentation,
    pub table: PairingTable,
    pub zeta: DeformationParam,
    /// Generator indices of `y_1..` (gl: n of them, sp: 2n).
    pub y: Vec<usize>,
    /// Generator indices of `x_1..x_n` (gl only).
    pub x: Vec<usize>,
}

/// Deliberate defects for negative controls.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Corruption {
    None,
    /// `[A, x_1]` for the first basis element acting on `x_1` is doubled.
    ActionOnX,
    /// The constant term of `[y, x]` (resp. `[y, y']`) is dropped from the leading pairing.
    DropLeadingPairing,
}

/// Position of the V-block generators in the PBW order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VOrder {
    /// g, y, x
    YThenX,
    /// g, x, y: the y's end up rightmost, as needed by the projection to the degree-0 quotient.
    XThenY,
}

pub fn build_universal(kind: LieKind, n: usize, m: usize) -> Result<CherednikAlgebra, CherednikError> {
    let zeta = DeformationParam::universal(kind, n, m);
    build_with_param(kind, n, m, &zeta, Corruption::None)
}

/// `H_ζ` for an explicit parameter of length at most `m` (coefficients may be symbolic).
pub fn build_with_param(
    kind: LieKind,
    n: usize,
    m: usize,
    zeta: &DeformationParam,
    corruption: Corruption,
) -> Result<CherednikAlgebra, CherednikError> {
    build_ordered(kind, n, m, zeta, corruption, VOrder::YThenX)
}

pub fn build_ordered(
    kind: LieKind,
    n: usize,
    m: usize,
    zeta: &DeformationParam,
    corruption: Corruption,
    order: VOrder,
) -> Result<CherednikAlgebra, CherednikError> {
    if kind == LieKind::Sl {
        return Err(CherednikError::Kind("sl".into()));
    }
    if kind == LieKind::Gl && m < 1 {
        return Err(CherednikError::Range(1));
    }
    let table = compute_pairings_capped(kind, n, m, m.max(DEFAULT_JMAX_CAP))?;
    let lie = table.lie.clone();
    let vdeg = if kind == LieKind::Sp { 2 * m as i64 + 1 } else { m as i64 + 1 };
    let mut b = PBWBuilder::new();
    for l in lie.labels() {
        b.generator(Generator::new(l.clone(), 2));
    }
    let d = lie.matrix_dim();
    let mut y = Vec::new();
    let mut x = Vec::new();
    let push_x = |b: &mut PBWBuilder, x: &mut Vec<usize>| {
        if kind == LieKind::Gl {
            for i in 1..=n {
                x.push(b.generator(Generator::new(format!("x({})", i), vdeg).weight(-1)));
            }
        }
    };
    if order == VOrder::XThenY {
        push_x(&mut b, &mut x);
    }
    for i in 1..=d {
        let w = match kind {
            LieKind::Sp if i > n => -1,
            _ => 1,
        };
        y.push(b.generator(Generator::new(format!("y({})", i), vdeg).weight(w)));
    }
    if order == VOrder::YThenX {
        push_x(&mut b, &mut x);
    }
    let univ = DeformationParam::universal_count(kind, m);
    let zdeg = |i: usize| if kind == LieKind::Sp { 4 * (m as i64 - i as i64) } else { 2 * (m as i64 - i as i64) };
    for i in 0..univ.max(zeta.coeffs.len()) {
        b.coeff_degree(zeta_var(i), zdeg(i));
    }
    // Lie bracket
    for i in 0..lie.dim() {
        for j in 0..i {
            let mut c = PBWElement::zero();
            for (k, s) in lie.bracket(i, j) {
                c.add_scaled(&PBWElement::gen(*k), &QPoly::constant(s.clone()));
            }
            b.commutator(i, j, c);
        }
    }
    // g-action on V and V*
    for a in 0..lie.dim() {
        for k in 0..d {
            let mut c = PBWElement::zero();
            for (i, s) in lie.act_vector(a, k) {
                c.add_scaled(&PBWElement::gen(y[i]), &QPoly::constant(s));
            }
            b.commutator(a, y[k], c);
        }
        for k in 0..x.len() {
            let mut c = PBWElement::zero();
            for (j, s) in lie.act_covector(a, k) {
                c.add_scaled(&PBWElement::gen(x[j]), &QPoly::constant(s));
            }
            if corruption == Corruption::ActionOnX && a == 0 && k == 0 {
                c = c.scale_scalar(&Scalar::from_integer(2.into()));
            }
            b.commutator(a, x[k], c);
        }
    }
    // deformed bracket; the enveloping algebra of g sits in the first generators
    let u = crate::pbw::enveloping(&lie);
    let lookup = |lab: &str| lie.index_of(lab);
    let pair_value = |i: usize, l: usize| -> Result<PBWElement, CherednikError> {
        let mut out = PBWElement::zero();
        for (j, c) in zeta.coeffs.iter().enumerate() {
            if c.is_zero() || j > m {
                continue;
            }
            if corruption == Corruption::DropLeadingPairing && j == m {
                continue;
            }
            let r = table.r_sym_in(&u, j, i, l, &lookup)?;
            out.add_scaled(&r, c);
        }
        Ok(out)
    };
    match kind {
        LieKind::Gl => {
            for i in 0..n {
                for l in 0..n {
                    // [y_i, x_l] = ζ(y_i, x_l)
                    b.commutator(y[i], x[l], pair_value(i, l)?);
                }
            }
        }
        _ => {
            for a in 0..d {
                for c in 0..a {
                    b.commutator(y[a], y[c], pair_value(a, c)?);
                }
            }
        }
    }
    let presentation = b.build()?;
    Ok(CherednikAlgebra { kind, n, m, presentation, table, zeta: zeta.clone(), y, x })
}

impl CherednikAlgebra {
    pub fn p(&self) -> &PBWPresentation {
        &self.presentation
    }

    pub fn g_dim(&self) -> usize {
        self.table.lie.dim()
    }

    /// Symbolic ζ variables of the universal algebra.
    pub fn zeta_vars(&self) -> Vec<Var> {
        (0..DeformationParam::universal_count(self.kind, self.m)).map(zeta_var).collect()
    }

    pub fn gen(&self, label: &str) -> PBWElement {
        self.presentation.gen(label)
    }

    pub fn all_generators(&self) -> Vec<PBWElement> {
        (0..self.presentation.num_generators()).map(PBWElement::gen).collect()
    }

    /// `ζ_j ↦ c_j` for the symbolic coefficients.
    pub fn specialize(&self, c: &[Scalar]) -> Result<CherednikAlgebra, CherednikError> {
        let vars = self.zeta_vars();
        if c.len() != vars.len() {
            return Err(CherednikError::Length { expected: vars.len(), got: c.len() });
        }
        let subs: BTreeMap<Var, QPoly> = vars.iter().zip(c).map(|(v, s)| (*v, QPoly::constant(s.clone()))).collect();
        let presentation = self.presentation.specialize(&subs)?;
        Ok(CherednikAlgebra { presentation, zeta: self.zeta.specialize(&subs), ..self.clone() })
    }

    pub fn filtration_degree(&self, e: &PBWElement) -> Option<i64> {
        self.presentation.filtration_degree(e)
    }

    /// Commutative image with generators named by label (y/x and g-coordinates).
    pub fn symbol_vars(&self) -> Vec<Var> {
        self.presentation.labels().iter().map(|l| Var::new(l)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::int;

    #[test]
    fn h2_gl1_bracket() {
        let h = build_universal(LieKind::Gl, 1, 2).unwrap();
        let p = h.p();
        let c = p.commutator(&h.gen("y(1)"), &h.gen("x(1)"));
        // ζ_0 + Sym(3 a²) = ζ_0 + 3 E(1,1)²
        let a = h.gen("E(1,1)");
        let expect = &PBWElement::scalar(QPoly::var(zeta_var(0))) + &p.mul(&a, &a).scale_scalar(&int(3));
        assert_eq!(c, expect);
        assert_eq!(p.commutator(&a, &h.gen("y(1)")), h.gen("y(1)"));
        assert_eq!(p.commutator(&a, &h.gen("x(1)")), -&h.gen("x(1)"));
    }

    #[test]
    fn small_consistency() {
        for (kind, n, m) in [(LieKind::Gl, 1, 2), (LieKind::Gl, 2, 1), (LieKind::Sp, 1, 1)] {
            let h = build_universal(kind, n, m).unwrap();
            let r = h.p().consistency_check(3);
            assert!(r.all_pass(), "{:?} {} {}: {}", kind, n, m, r.to_text());
        }
    }

    #[test]
    fn corrupted_action_fails() {
        let z = DeformationParam::universal(LieKind::Gl, 2, 2);
        let h = build_with_param(LieKind::Gl, 2, 2, &z, Corruption::ActionOnX).unwrap();
        assert!(!h.p().consistency_check(3).all_pass());
    }

    #[test]
    fn specialize_and_degrees() {
        let h = build_universal(LieKind::Gl, 1, 3).unwrap();
        assert!(h.specialize(&[int(1)]).is_err());
        let s = h.specialize(&[int(1), int(2)]).unwrap();
        assert!(s.p().consistency_check(3).all_pass());
        let yx = h.p().mul(&h.gen("y(1)"), &h.gen("x(1)"));
        assert_eq!(h.filtration_degree(&yx), Some(8));
        let z0 = PBWElement::scalar(QPoly::var(zeta_var(0)));
        assert_eq!(h.filtration_degree(&z0), Some(6));
        let c = h.p().commutator(&h.gen("x(1)"), &h.gen("y(1)"));
        assert_eq!(h.filtration_degree(&c), Some(6));
    }

    #[test]
    fn sp_m1_weyl_like() {
        // ζ_0 r_0: [y_i, y_j] is the scalar ζ_0 ω(y_i, y_j) plus the r_2 part
        let z = DeformationParam::new(LieKind::Sp, 1, vec![QPoly::var(zeta_var(0))]);
        let h = build_with_param(LieKind::Sp, 1, 1, &z, Corruption::None).unwrap();
        let c = h.p().commutator(&h.gen("y(2)"), &h.gen("y(1)"));
        assert_eq!(c.as_scalar(), Some(QPoly::var(zeta_var(0)).scale(&int(-1))));
        assert!(h.p().consistency_check(3).all_pass());
    }
}
