//! Classical limits: the Poisson algebra on `S(g ⊕ V ⊕ V*)[ζ]` (resp.
//! `S(sp ⊕ V)[ζ]`), the elements τ_k, the residue series c(t) and
//! Poisson-centrality checks.

use std::collections::BTreeMap;
use std::time::Instant;

use num_traits::{One, Zero};

use crate::exact::{char_coeffs, int, rank, series_invert, QPoly, QSeries, Scalar, Var};
use crate::liedata::LieKind;
use crate::pbw::{PBWElement, PBWPresentation};
use crate::pairings::{compute_pairings_capped, zeta_var, DeformationParam, PairingError, PairingTable, DEFAULT_JMAX_CAP};
use crate::report::VerificationReport;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PoissonError {
    #[error(transparent)]
    Pairing(#[from] PairingError),
    #[error("k = {k} out of range 1..={n}")]
    KOutOfRange { k: usize, n: usize },
    #[error("residue convention mismatch: {0}")]
    ResidueConvention(String),
    #[error("unsupported kind {0}")]
    Kind(String),
}

/// Expansion region for the kernel `1/(1 - t^{-1} z)` (resp. `1/(1 - t^{-2} z²)`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    /// `|z| > |t|`: kernel `= -Σ_{k≥1} (t/z)^k`.
    OuterZ,
    /// `|z| < |t|`: kernel `= Σ_{k≥0} (z/t)^k`.
    InnerZ,
}

/// The convention selected by the shape assertion and the centrality test at
/// (gl, n=1, m=2); see `select_region`.
pub const RESIDUE_REGION: Region = Region::OuterZ;

pub struct PoissonContext {
    pub kind: LieKind,
    pub n: usize,
    pub m: usize,
    pub table: PairingTable,
    pub zeta: DeformationParam,
    /// g-coordinates, then y's, then x's (gl).
    pub vars: Vec<Var>,
    pub g_vars: Vec<Var>,
    pub y_vars: Vec<Var>,
    pub x_vars: Vec<Var>,
    /// `{vars[a], vars[b]}`.
    table_br: Vec<Vec<QPoly>>,
    index: BTreeMap<Var, usize>,
}

pub fn build_context(kind: LieKind, n: usize, m: usize) -> Result<PoissonContext, PoissonError> {
    let zeta = DeformationParam::universal(kind, n, m);
    build_context_with(kind, n, m, &zeta)
}

pub fn build_context_with(kind: LieKind, n: usize, m: usize, zeta: &DeformationParam) -> Result<PoissonContext, PoissonError> {
    if kind == LieKind::Sl {
        return Err(PoissonError::Kind("sl".into()));
    }
    let table = compute_pairings_capped(kind, n, m, m.max(DEFAULT_JMAX_CAP))?;
    let lie = &table.lie;
    let g_vars = lie.coordinate_vars();
    let d = lie.matrix_dim();
    let y_vars: Vec<Var> = (1..=d).map(|i| Var::new(&format!("y({})", i))).collect();
    let x_vars: Vec<Var> = if kind == LieKind::Gl { (1..=n).map(|i| Var::new(&format!("x({})", i))).collect() } else { Vec::new() };
    let mut vars = g_vars.clone();
    vars.extend(&y_vars);
    vars.extend(&x_vars);
    let nv = vars.len();
    let mut br = vec![vec![QPoly::zero(); nv]; nv];
    let gd = lie.dim();
    let yo = gd;
    let xo = gd + d;
    let mut set = |a: usize, b: usize, v: QPoly| {
        br[b][a] = -&v;
        br[a][b] = v;
    };
    for a in 0..gd {
        for b in 0..gd {
            if a < b {
                let mut v = QPoly::zero();
                for (k, c) in lie.bracket(a, b) {
                    v += QPoly::var(g_vars[*k]).scale(c);
                }
                set(a, b, v);
            }
        }
        for k in 0..d {
            let mut v = QPoly::zero();
            for (i, c) in lie.act_vector(a, k) {
                v += QPoly::var(y_vars[i]).scale(&c);
            }
            set(a, yo + k, v);
        }
        for k in 0..x_vars.len() {
            let mut v = QPoly::zero();
            for (j, c) in lie.act_covector(a, k) {
                v += QPoly::var(x_vars[j]).scale(&c);
            }
            set(a, xo + k, v);
        }
    }
    match kind {
        LieKind::Gl => {
            for i in 0..n {
                for l in 0..n {
                    set(yo + i, xo + l, zeta.pairing_value(&table, i, l));
                }
            }
        }
        _ => {
            for a in 0..d {
                for b in 0..a {
                    set(yo + a, yo + b, zeta.pairing_value(&table, a, b));
                }
            }
        }
    }
    let index = vars.iter().enumerate().map(|(i, v)| (*v, i)).collect();
    Ok(PoissonContext { kind, n, m, table, zeta: zeta.clone(), vars, g_vars, y_vars, x_vars, table_br: br, index })
}

impl PoissonContext {
    pub fn generator_bracket(&self, a: usize, b: usize) -> &QPoly {
        &self.table_br[a][b]
    }

    /// Leibniz extension of the generator table.
    pub fn bracket(&self, f: &QPoly, g: &QPoly) -> QPoly {
        let fd: Vec<(usize, QPoly)> = self.partials(f);
        if fd.is_empty() {
            return QPoly::zero();
        }
        let gd: Vec<(usize, QPoly)> = self.partials(g);
        let mut out = QPoly::zero();
        for (a, da) in &fd {
            for (b, db) in &gd {
                let t = &self.table_br[*a][*b];
                if t.is_zero() {
                    continue;
                }
                out += &(da * db) * t;
            }
        }
        out
    }

    fn partials(&self, f: &QPoly) -> Vec<(usize, QPoly)> {
        f.vars()
            .into_iter()
            .filter_map(|v| self.index.get(&v).map(|&i| (i, f.derivative(v))))
            .filter(|(_, d)| !d.is_zero())
            .collect()
    }

    /// `{f, vars[a]}` for a single generator.
    pub fn bracket_with_generator(&self, f: &QPoly, a: usize) -> QPoly {
        let mut out = QPoly::zero();
        for (b, db) in self.partials(f) {
            let t = &self.table_br[b][a];
            if !t.is_zero() {
                out += &db * t;
            }
        }
        out
    }

    /// Jacobi on all generator triples; first failure is returned.
    pub fn check_jacobi(&self) -> Result<(), String> {
        let nv = self.vars.len();
        for a in 0..nv {
            for b in (a + 1)..nv {
                for c in (b + 1)..nv {
                    let va = QPoly::var(self.vars[a]);
                    let vb = QPoly::var(self.vars[b]);
                    let vc = QPoly::var(self.vars[c]);
                    let s = &(&self.bracket(&va, &self.table_br[b][c]) + &self.bracket(&vb, &self.table_br[c][a]))
                        + &self.bracket(&vc, &self.table_br[a][b]);
                    if !s.is_zero() {
                        return Err(format!(
                            "({}, {}, {}): {}",
                            self.vars[a],
                            self.vars[b],
                            self.vars[c],
                            s.canonical_string()
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    /// `Q̃_k`: coefficient of `z^k` (gl) or `z^{2k}` (sp) in `det(1 + zA)` for the generic element of q.
    pub fn q_tilde(&self, k: usize) -> QPoly {
        let a = self.table.lie.generic_matrix();
        let idx = if self.kind == LieKind::Sp { 2 * k } else { k };
        char_coeffs(&a, idx).pop().unwrap()
    }

    /// `y_i^*` with `ω(y_i, y_i^*) = 1`: `(-1)^{i+1} y_{2n+1-i}` (1-based i).
    pub fn y_star(&self, i: usize) -> QPoly {
        let d = 2 * self.n;
        let s = if (i + 1) % 2 == 0 { int(1) } else { int(-1) };
        QPoly::var(self.y_vars[d - i]).scale(&s)
    }

    pub fn tau(&self, k: usize) -> Result<QPoly, PoissonError> {
        if k == 0 || k > self.n {
            return Err(PoissonError::KOutOfRange { k, n: self.n });
        }
        let q = self.q_tilde(k);
        let mut out = QPoly::zero();
        match self.kind {
            LieKind::Gl => {
                for i in 0..self.n {
                    let b = self.bracket(&q, &QPoly::var(self.y_vars[i]));
                    out += &QPoly::var(self.x_vars[i]) * &b;
                }
            }
            _ => {
                for i in 1..=2 * self.n {
                    let b = self.bracket(&q, &QPoly::var(self.y_vars[i - 1]));
                    out += &b * &self.y_star(i);
                }
            }
        }
        Ok(out)
    }

    pub fn c_series(&self) -> Result<Vec<QPoly>, PoissonError> {
        c_series_region(self, RESIDUE_REGION)
    }

    /// `τ_k + c_k`.
    pub fn central_candidate(&self, k: usize) -> Result<CentralCandidate, PoissonError> {
        let tau_k = self.tau(k)?;
        let c = self.c_series()?;
        let c_k = c[k - 1].clone();
        let sum = &tau_k + &c_k;
        Ok(CentralCandidate { tau_k, c_k, sum })
    }

    /// `{p, v}` for every generator `v`; pass iff all vanish.
    pub fn verify_central(&self, p: &QPoly, label: &str) -> VerificationReport {
        let mut rep = VerificationReport::new("poisson-central")
            .param("kind", self.kind)
            .param("n", self.n)
            .param("m", self.m)
            .param("element", label);
        let started = Instant::now();
        let mut witness = None;
        for a in 0..self.vars.len() {
            let b = self.bracket_with_generator(p, a);
            if !b.is_zero() {
                witness = Some(format!("{{{}, {}}} = {}", label, self.vars[a], b.canonical_string()));
                break;
            }
        }
        rep.record(label.to_string(), "Poisson centre generators", witness.is_none(), witness, started);
        rep
    }
}

#[derive(Clone, Debug)]
pub struct CentralCandidate {
    pub tau_k: QPoly,
    pub c_k: QPoly,
    pub sum: QPoly,
}

pub fn t_var() -> Var {
    Var::new("t")
}

fn z_var() -> Var {
    Var::new("z")
}

/// `c(t)` from the residue formula in the given region; returns `c_1..c_n`.
pub fn c_series_region(ctx: &PoissonContext, region: Region) -> Result<Vec<QPoly>, PoissonError> {
    let n = ctx.n;
    let m = ctx.m;
    let sp = ctx.kind == LieKind::Sp;
    let step = if sp { 2 } else { 1 };
    let a = ctx.table.lie.generic_matrix();
    let d = a.rows();
    // det(1 - zA) as a polynomial in z, degree d
    let e = char_coeffs(&a, d);
    let z = z_var();
    let t = t_var();
    let order = (step * (n + m + 2) + 2) as i32;
    let det_z = QSeries::from_coeffs(z, order, e.iter().enumerate().map(|(k, c)| (k as i32, if k % 2 == 0 { c.clone() } else { -c })));
    let inv = series_invert(&det_z).expect("unit constant term");
    // ζ(z^{-step})
    let mut zeta_series = QSeries::zero(z, order);
    for (j, c) in ctx.zeta.coeffs.iter().enumerate() {
        zeta_series.add_coeff(-((step * j) as i32), c.clone());
    }
    let f = zeta_series.mul(&inv);
    let det_t: QPoly = e
        .iter()
        .enumerate()
        .map(|(k, c)| {
            let s = if k % 2 == 0 { c.clone() } else { -c };
            &s * &QPoly::var(t).pow(k as u32)
        })
        .fold(QPoly::zero(), |acc, x| &acc + &x);
    let prefactor = if sp { int(2) } else { int(1) };
    // residue as a Laurent polynomial in t: exponent -> coefficient
    let mut res: BTreeMap<i32, QPoly> = BTreeMap::new();
    match region {
        Region::OuterZ => {
            // -Σ_{k≥1} t^{step k} [z^{step k}] F, truncated where t-degree exceeds step·n
            let kmax = n as i32 + 1;
            for k in 1..=kmax {
                let c = f.coefficient_of(step as i32 * k).map_err(|e| PoissonError::ResidueConvention(e.to_string()))?;
                res.insert(step as i32 * k, -c);
            }
        }
        Region::InnerZ => {
            for k in 0..=(m as i32 + 1) {
                let c = f.coefficient_of(-(step as i32) * k).map_err(|e| PoissonError::ResidueConvention(e.to_string()))?;
                res.insert(-(step as i32) * k, c);
            }
        }
    }
    // multiply by prefactor · det(1 - tA)
    let mut prod: BTreeMap<i32, QPoly> = BTreeMap::new();
    for (k, c) in &res {
        for (j, dc) in det_t.by_powers_of(t) {
            let e = k + j as i32;
            let v = &(c * &dc).scale(&prefactor);
            let entry = prod.entry(e).or_default();
            *entry += v.clone();
        }
    }
    prod.retain(|_, v| !v.is_zero());
    let top = (step * n) as i32;
    // in the outer region the residue starts at t^step, and the constant 1 of c(t) is the normalisation
    if region == Region::OuterZ {
        prod.retain(|&e, _| e <= top);
    }
    if let Some((&low, _)) = prod.iter().next() {
        if low < 0 {
            return Err(PoissonError::ResidueConvention(format!("negative power t^{} in c(t)", low)));
        }
    }
    if let Some(c0) = prod.get(&0) {
        return Err(PoissonError::ResidueConvention(format!("constant term {} besides the leading 1", c0.canonical_string())));
    }
    if let Some((&hi, _)) = prod.iter().next_back() {
        if hi > top {
            return Err(PoissonError::ResidueConvention(format!("t-degree {} exceeds {}", hi, top)));
        }
    }
    let mut out = Vec::new();
    for i in 1..=n {
        if sp {
            if let Some(odd) = prod.get(&(2 * i as i32 - 1)) {
                return Err(PoissonError::ResidueConvention(format!("odd power in sp c(t): {}", odd.canonical_string())));
            }
            out.push(prod.get(&(2 * i as i32)).cloned().unwrap_or_default());
        } else {
            let c = prod.get(&(i as i32)).cloned().unwrap_or_default();
            out.push(if i % 2 == 0 { c } else { -c });
        }
    }
    Ok(out)
}

/// Truncation sanity: the discarded high powers in the outer region must
/// cancel exactly, which holds when `det(1-tA) F(t)` is `ζ(t^{-1})`. Returns
/// the first non-cancelling power.
pub fn outer_region_tail(ctx: &PoissonContext) -> Option<i32> {
    let n = ctx.n;
    let step = if ctx.kind == LieKind::Sp { 2 } else { 1 };
    let a = ctx.table.lie.generic_matrix();
    let d = a.rows();
    let e = char_coeffs(&a, d);
    let z = z_var();
    let extra = 3;
    let order = (step * (n + ctx.m + extra) + 2) as i32;
    let det_z = QSeries::from_coeffs(z, order, e.iter().enumerate().map(|(k, c)| (k as i32, if k % 2 == 0 { c.clone() } else { -c })));
    let inv = series_invert(&det_z).unwrap();
    let mut zs = QSeries::zero(z, order);
    for (j, c) in ctx.zeta.coeffs.iter().enumerate() {
        zs.add_coeff(-((step * j) as i32), c.clone());
    }
    let f = zs.mul(&inv);
    let top = step * n;
    for target in (top + 1)..(top + step * extra) {
        let mut acc = QPoly::zero();
        for (k, c) in e.iter().enumerate() {
            if k > target || target - k == 0 {
                continue;
            }
            let fk = f.coefficient_of((target - k) as i32).unwrap();
            let s = if k % 2 == 0 { c.clone() } else { -c };
            acc += &s * &fk;
        }
        if !acc.is_zero() {
            return Some(target as i32);
        }
    }
    None
}

/// Selection procedure for the residue region: a region is admissible when
/// the shape assertion holds and `τ_1 + c_1` is central at (gl, n=1, m=2).
pub fn select_region() -> Result<Region, String> {
    let ctx = build_context(LieKind::Gl, 1, 2).map_err(|e| e.to_string())?;
    let mut admissible = Vec::new();
    for region in [Region::OuterZ, Region::InnerZ] {
        let Ok(c) = c_series_region(&ctx, region) else { continue };
        let p = &ctx.tau(1).map_err(|e| e.to_string())? + &c[0];
        if ctx.verify_central(&p, "tau_1 + c_1").all_pass() {
            admissible.push(region);
        }
    }
    match admissible.as_slice() {
        [r] => Ok(*r),
        other => Err(format!("expected exactly one admissible region, found {:?}", other)),
    }
}

/// Rank of the Jacobian of `polys` in `vars` at a rational point.
pub fn jacobian_rank(polys: &[QPoly], vars: &[Var], point: &BTreeMap<Var, Scalar>) -> usize {
    let rows: Vec<Vec<Scalar>> = polys
        .iter()
        .map(|p| {
            vars.iter()
                .map(|v| p.derivative(*v).eval(&|w| point.get(&w).cloned().unwrap_or_else(Scalar::zero)))
                .collect()
        })
        .collect();
    rank(&rows)
}

/// The commutator of two generators in `h` has filtration degree at most
/// `deg a + deg b - 2`, and its part in that degree is the Poisson bracket.
pub fn verify_gr_compat(ctx: &PoissonContext, h: &PBWPresentation) -> Result<(), String> {
    let vars: Vec<Var> = h.labels().iter().map(|l| Var::new(l)).collect();
    let gens = h.generators();
    for a in 0..gens.len() {
        for b in (a + 1)..gens.len() {
            let c = h.commutator(&PBWElement::gen(a), &PBWElement::gen(b));
            let d = gens[a].degree + gens[b].degree - 2;
            let top = match h.filtration_degree(&c) {
                Some(f) if f > d => return Err(format!("[{}, {}] has degree {} > {}", vars[a], vars[b], f, d)),
                Some(f) if f == d => h.to_commutative(&h.top_part(&c), &vars),
                _ => QPoly::new(),
            };
            let want = ctx.bracket(&QPoly::var(vars[a]), &QPoly::var(vars[b]));
            if top != want {
                return Err(format!("gr[{}, {}] - {{{}, {}}} = {}", vars[a], vars[b], vars[a], vars[b], (&top - &want).canonical_string()));
            }
        }
    }
    Ok(())
}

/// Full centrality suite: Jacobi, gr-compatibility against a Cherednik
/// algebra (when given), τ_k + c_k central for all k, τ_1 alone not central,
/// and algebraic independence of the generators at a sample point.
pub fn poisson_suite(kind: LieKind, n: usize, m: usize) -> VerificationReport {
    let mut rep = VerificationReport::new("poisson").param("kind", kind).param("n", n).param("m", m).param(
        "residue_region",
        match RESIDUE_REGION {
            Region::OuterZ => "|z|>|t|",
            Region::InnerZ => "|z|<|t|",
        },
    );
    let ctx = match build_context(kind, n, m) {
        Ok(c) => c,
        Err(e) => {
            rep.check("build", "Poisson algebra", || Err(e.to_string()));
            return rep;
        }
    };
    rep.check("jacobi", "classical PBW: Jacobi on generators", || ctx.check_jacobi());
    rep.check("gr-compat", "top symbol of [u, v] in H_m equals {u, v}", || {
        let h = crate::cherednik::build_universal(kind, n, m).map_err(|e| e.to_string())?;
        verify_gr_compat(&ctx, &h.presentation)
    });
    let cs = ctx.c_series();
    rep.check("c-shape", "shape of c(t)", || cs.as_ref().map(|_| ()).map_err(|e| e.to_string()));
    let Ok(cs) = cs else { return rep };
    let mut gens = Vec::new();
    for k in 1..=n {
        let tau = ctx.tau(k).unwrap();
        let sum = &tau + &cs[k - 1];
        let sub = ctx.verify_central(&sum, &format!("tau_{} + c_{}", k, k));
        for e in sub.entries {
            rep.entries.push(e);
        }
        gens.push(sum);
    }
    if m >= 1 {
        let tau1 = ctx.tau(1).unwrap();
        let sub = ctx.verify_central(&tau1, "tau_1");
        rep.check("tau_1 alone not central (control)", "c_k is a nontrivial correction", || {
            if sub.all_pass() {
                Err("tau_1 commutes with every generator".into())
            } else {
                Ok(())
            }
        });
    }
    // independence of ζ_j, τ_k + c_k
    let zvars: Vec<Var> = (0..DeformationParam::universal_count(kind, m)).map(zeta_var).collect();
    let mut all: Vec<QPoly> = zvars.iter().map(|v| QPoly::var(*v)).collect();
    all.extend(gens.iter().cloned());
    let mut vars = ctx.vars.clone();
    vars.extend(&zvars);
    let point: BTreeMap<Var, Scalar> =
        vars.iter().enumerate().map(|(i, v)| (*v, crate::exact::frac(((i * 7 + 3) % 11) as i64 + 1, ((i * 5) % 7 + 2) as i64))).collect();
    let r = jacobian_rank(&all, &vars, &point);
    rep.check("independence", "free generators (Jacobian rank)", || {
        if r == all.len() {
            Ok(())
        } else {
            Err(format!("rank {} < {}", r, all.len()))
        }
    });
    rep
}

impl PoissonContext {
    pub fn one() -> QPoly {
        QPoly::one()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn n1_m2_bracket() {
        let ctx = build_context(LieKind::Gl, 1, 2).unwrap();
        let y = QPoly::named("y(1)");
        let x = QPoly::named("x(1)");
        let a = QPoly::named("E(1,1)");
        let expect = &QPoly::var(zeta_var(0)) + &a.pow(2).scale(&int(3));
        assert_eq!(ctx.bracket(&y, &x), expect);
        assert!(ctx.bracket(&y, &y).is_zero());
        assert_eq!(ctx.bracket(&a, &y), y);
    }

    #[test]
    fn region_selection() {
        assert_eq!(select_region(), Ok(RESIDUE_REGION));
    }

    #[test]
    fn n1_m1_central() {
        let r = poisson_suite(LieKind::Gl, 1, 1);
        assert!(r.all_pass(), "{}", r.to_text());
    }

    #[test]
    fn sp_small_central() {
        let r = poisson_suite(LieKind::Sp, 1, 1);
        assert!(r.all_pass(), "{}", r.to_text());
    }

    #[test]
    fn tau1_gl() {
        let ctx = build_context(LieKind::Gl, 2, 1).unwrap();
        let t = ctx.tau(1).unwrap();
        let expect = &(&QPoly::named("x(1)") * &QPoly::named("y(1)")) + &(&QPoly::named("x(2)") * &QPoly::named("y(2)"));
        assert_eq!(t, expect);
        assert!(ctx.tau(3).is_err());
    }
}
