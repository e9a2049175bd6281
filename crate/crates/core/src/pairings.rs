//! The invariant pairings α_j (gl) and β_2j (sp) read off the generating
//! functions `(x, (1-τA)^{-1} y) det(1-τA)^{-1}` and
//! `ω(x, (1-τ²A²)^{-1} y) det(1-τA)^{-1}`, their symmetrizations, and the
//! twists acting on deformation parameters.

use std::collections::{BTreeMap, HashMap};
use std::time::Instant;

use num_traits::{One, Zero};

use crate::exact::{
    binomial, char_coeffs, int, series_invert, solve_linear_poly, Matrix, Monomial, QPoly, QSeries, Scalar, TruncSeries,
    Var,
};
use crate::liedata::{build_lie, symplectic_form, LieAlgebraData, LieKind};
use crate::pbw::{PBWElement, PBWPresentation, PbwError};
use crate::report::VerificationReport;

pub const DEFAULT_JMAX_CAP: usize = 6;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PairingError {
    #[error("jmax {jmax} exceeds cap {cap}")]
    Cap { jmax: usize, cap: usize },
    #[error("unsupported kind {0}")]
    Kind(String),
    #[error("rank must be positive")]
    Rank,
    #[error("not length m: leading coefficient is zero")]
    NotLengthM,
    #[error("leading coefficient must be a nonzero constant")]
    SymbolicLeading,
    #[error("re-expansion not expressible in the pairing basis")]
    NotInSpan,
    #[error(transparent)]
    Pbw(#[from] PbwError),
}

/// Pairing values. For gl, `get(j, i, l) = α_j(y_i, x_l)`; for sp,
/// `get(j, i, l) = β_2j(y_i, y_l)`. Indices are 0-based.
#[derive(Clone, Debug, PartialEq)]
pub struct PairingTable {
    pub kind: LieKind,
    pub n: usize,
    pub jmax: usize,
    pub lie: LieAlgebraData,
    values: BTreeMap<(usize, usize, usize), QPoly>,
}

pub fn tau_var() -> Var {
    Var::new("tau")
}

pub fn compute_pairings(kind: LieKind, n: usize, jmax: usize) -> Result<PairingTable, PairingError> {
    compute_pairings_capped(kind, n, jmax, DEFAULT_JMAX_CAP)
}

pub fn compute_pairings_capped(kind: LieKind, n: usize, jmax: usize, cap: usize) -> Result<PairingTable, PairingError> {
    if jmax > cap {
        return Err(PairingError::Cap { jmax, cap });
    }
    if n == 0 {
        return Err(PairingError::Rank);
    }
    let lie = match kind {
        LieKind::Gl => build_lie(LieKind::Gl, n),
        LieKind::Sp => build_lie(LieKind::Sp, n),
        LieKind::Sl => return Err(PairingError::Kind("sl".into())),
    }
    .map_err(|_| PairingError::Rank)?;
    let a = lie.generic_matrix();
    let d = a.rows();
    let tau = tau_var();
    // τ-degree needed: j for gl, 2j for sp
    let top = if kind == LieKind::Sp { 2 * jmax } else { jmax };
    let order = top as i32 + 1;
    // det(1 - τA) = Σ (-1)^k e_k τ^k, inverted as a series
    let e = char_coeffs(&a, top);
    let det = QSeries::from_coeffs(
        tau,
        order,
        e.iter().enumerate().map(|(k, c)| (k as i32, if k % 2 == 0 { c.clone() } else { -c })),
    );
    let hinv = series_invert(&det).expect("det(1 - τA) has constant term 1");
    let h: Vec<QPoly> = (0..=top).map(|k| hinv.coefficient_of(k as i32).unwrap()).collect();
    let powers = a.powers(top);
    let mut values = BTreeMap::new();
    match kind {
        LieKind::Gl => {
            for j in 0..=jmax {
                for i in 0..d {
                    for l in 0..d {
                        // x_l(A^k y_i) = (A^k)_{l i}
                        let mut acc = QPoly::zero();
                        for k in 0..=j {
                            let ent = &powers[k][(l, i)];
                            if !ent.is_zero() {
                                acc += ent * &h[j - k];
                            }
                        }
                        values.insert((j, i, l), acc);
                    }
                }
            }
        }
        _ => {
            let jform = symplectic_form(d).map(|x| QPoly::constant(x.clone()));
            let jp: Vec<Matrix<QPoly>> = powers.iter().map(|p| jform.matmul(p)).collect();
            for j in 0..=jmax {
                for i in 0..d {
                    for l in 0..d {
                        // τ^{2j} coefficient of ω(y_i, (1-τ²A²)^{-1} y_l) det(1-τA)^{-1}
                        let mut acc = QPoly::zero();
                        for k in 0..=j {
                            let ent = &jp[2 * k][(i, l)];
                            if !ent.is_zero() {
                                acc += ent * &h[2 * j - 2 * k];
                            }
                        }
                        values.insert((j, i, l), acc);
                    }
                }
            }
        }
    }
    Ok(PairingTable { kind, n, jmax, lie, values })
}

impl PairingTable {
    pub fn get(&self, j: usize, i: usize, l: usize) -> &QPoly {
        &self.values[&(j, i, l)]
    }

    /// Dimension of the vector representation (n or 2n).
    pub fn vdim(&self) -> usize {
        self.lie.matrix_dim()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&(usize, usize, usize), &QPoly)> {
        self.values.iter()
    }

    /// Odd τ-powers of the sp generating function; all must vanish.
    pub fn sp_odd_part(&self, j: usize, i: usize, l: usize) -> QPoly {
        assert_eq!(self.kind, LieKind::Sp);
        let a = self.lie.generic_matrix();
        let d = a.rows();
        let top = 2 * j + 1;
        let e = char_coeffs(&a, top);
        let det = QSeries::from_coeffs(
            tau_var(),
            top as i32 + 1,
            e.iter().enumerate().map(|(k, c)| (k as i32, if k % 2 == 0 { c.clone() } else { -c })),
        );
        let hinv = series_invert(&det).unwrap();
        let jform = symplectic_form(d).map(|x| QPoly::constant(x.clone()));
        let powers = a.powers(top);
        let mut acc = QPoly::zero();
        for k in 0..=j {
            let ent = jform.matmul(&powers[2 * k])[(i, l)].clone();
            acc += &ent * &hinv.coefficient_of((top - 2 * k) as i32).unwrap();
        }
        acc
    }

    /// Symmetrization of the pairing value into `U(g)`; `u` must be the
    /// enveloping algebra of `self.lie` (generators labelled by basis labels).
    pub fn r_sym(&self, u: &PBWPresentation, j: usize, i: usize, l: usize) -> Result<PBWElement, PairingError> {
        self.r_sym_in(u, j, i, l, &|lab| u.index_of(lab))
    }

    /// As [`r_sym`](Self::r_sym) into an algebra containing `g`, with a label lookup.
    pub fn r_sym_in(
        &self,
        u: &PBWPresentation,
        j: usize,
        i: usize,
        l: usize,
        lookup: &dyn Fn(&str) -> Option<usize>,
    ) -> Result<PBWElement, PairingError> {
        let gen_of = |v: Var| lookup(&v.name());
        Ok(u.symmetrize_poly(self.get(j, i, l), &gen_of, crate::pbw::DEFAULT_SYM_CAP)?)
    }

    /// `{a, f}` for the adjoint action of basis element `a` on `f ∈ S(g)`.
    pub fn ad_action(&self, a: usize, f: &QPoly) -> QPoly {
        let vars = self.lie.coordinate_vars();
        let mut out = QPoly::zero();
        for (b, v) in vars.iter().enumerate() {
            let df = f.derivative(*v);
            if df.is_zero() {
                continue;
            }
            let mut br = QPoly::zero();
            for (k, c) in self.lie.bracket(a, b) {
                br += QPoly::var(vars[*k]).scale(c);
            }
            out += &df * &br;
        }
        out
    }

    /// Invariance defect of the j-th pairing under basis element `a` at `(i, l)`:
    /// `a·P(y_i, x_l) - P(a y_i, x_l) - P(y_i, a x_l)` (gl), and the analogue
    /// with `P(y_i, a y_l)` for sp.
    pub fn invariance_defect(&self, j: usize, a: usize, i: usize, l: usize) -> QPoly {
        // accumulated term by term; the pairings at sp_6, j = 4 are large
        let vars = self.lie.coordinate_vars();
        let index: HashMap<Var, usize> = vars.iter().enumerate().map(|(b, v)| (*v, b)).collect();
        let mut acc: HashMap<Monomial, Scalar> = HashMap::new();
        let mut add = |m: Monomial, c: Scalar| {
            *acc.entry(m).or_insert_with(Scalar::zero) += c;
        };
        for (mono, c) in self.get(j, i, l).terms() {
            for (pos, &(v, e)) in mono.pairs().iter().enumerate() {
                let Some(&b) = index.get(&v) else { continue };
                for (k, ck) in self.lie.bracket(a, b) {
                    let mut pairs: Vec<(Var, u32)> = mono.pairs().to_vec();
                    pairs[pos].1 -= 1;
                    pairs.push((vars[*k], 1));
                    add(Monomial::from_pairs(pairs), c.clone() * ck.clone() * Scalar::from_integer(e.into()));
                }
            }
        }
        for (k, ck) in self.lie.act_vector(a, i) {
            for (mono, c) in self.get(j, k, l).terms() {
                add(mono.clone(), -(c.clone() * ck.clone()));
            }
        }
        let second = if self.kind == LieKind::Gl { self.lie.act_covector(a, l) } else { self.lie.act_vector(a, l) };
        for (k, ck) in second {
            for (mono, c) in self.get(j, i, k).terms() {
                add(mono.clone(), -(c.clone() * ck.clone()));
            }
        }
        QPoly::from_terms(acc.into_iter().filter(|(_, c)| !c.is_zero()))
    }

    pub fn to_json(&self) -> serde_json::Value {
        let vals: serde_json::Map<String, serde_json::Value> = self
            .values
            .iter()
            .map(|((j, i, l), p)| (format!("{}|{}|{}", j, i, l), p.canonical_string().into()))
            .collect();
        crate::report::sort_keys(serde_json::json!({
            "kind": self.kind.name(), "n": self.n, "jmax": self.jmax, "values": vals
        }))
    }

    pub fn from_json(v: &serde_json::Value) -> Option<Self> {
        let kind = LieKind::parse(v["kind"].as_str()?)?;
        let n = v["n"].as_u64()? as usize;
        let jmax = v["jmax"].as_u64()? as usize;
        let lie = build_lie(kind, n).ok()?;
        let mut values = BTreeMap::new();
        for (k, p) in v["values"].as_object()? {
            let mut it = k.split('|').map(|s| s.parse::<usize>());
            let key = (it.next()?.ok()?, it.next()?.ok()?, it.next()?.ok()?);
            values.insert(key, QPoly::parse_canonical(p.as_str()?)?);
        }
        Some(PairingTable { kind, n, jmax, lie, values })
    }
}

/// Deformation parameter `ζ = Σ ζ_j r_j` (gl) or `Σ ζ_j r_2j` (sp).
#[derive(Clone, Debug, PartialEq)]
pub struct DeformationParam {
    pub kind: LieKind,
    pub n: usize,
    /// `coeffs[j] = ζ_j`, j = 0..=m.
    pub coeffs: Vec<QPoly>,
}

pub fn zeta_var(j: usize) -> Var {
    Var::new(&format!("zeta({})", j))
}

impl DeformationParam {
    pub fn new(kind: LieKind, n: usize, coeffs: Vec<QPoly>) -> Self {
        DeformationParam { kind, n, coeffs }
    }

    pub fn from_scalars(kind: LieKind, n: usize, c: &[Scalar]) -> Self {
        Self::new(kind, n, c.iter().map(|x| QPoly::constant(x.clone())).collect())
    }

    /// Universal length-m parameter: ζ_m = 1, symbolic ζ_j for j ≤ m - s
    /// (s = 2 for gl, 1 for sp).
    pub fn universal(kind: LieKind, n: usize, m: usize) -> Self {
        let s = if kind == LieKind::Sp { 1 } else { 2 };
        let mut coeffs = vec![QPoly::zero(); m + 1];
        for (j, c) in coeffs.iter_mut().enumerate() {
            if j == m {
                *c = QPoly::one();
            } else if j + s <= m {
                *c = QPoly::var(zeta_var(j));
            }
        }
        Self::new(kind, n, coeffs)
    }

    /// Number of symbolic ζ_j in the universal parameter.
    pub fn universal_count(kind: LieKind, m: usize) -> usize {
        let s = if kind == LieKind::Sp { 1 } else { 2 };
        (m + 1).saturating_sub(s)
    }

    /// `l(ζ) = min{k : ζ_{>k} = 0}`, -1 for ζ = 0.
    pub fn length(&self) -> i64 {
        self.coeffs.iter().rposition(|c| !c.is_zero()).map(|k| k as i64).unwrap_or(-1)
    }

    pub fn coeff(&self, j: usize) -> QPoly {
        self.coeffs.get(j).cloned().unwrap_or_default()
    }

    /// `ζ(w) = Σ ζ_j w^j`.
    pub fn as_poly(&self, w: Var) -> QPoly {
        let mut out = QPoly::zero();
        for (j, c) in self.coeffs.iter().enumerate() {
            out += c * &QPoly::var(w).pow(j as u32);
        }
        out
    }

    /// Evaluates the deformation on `(y_i, x_l)` (gl) or `(y_i, y_l)` (sp) as an element of `S(g)[ζ]`.
    pub fn pairing_value(&self, table: &PairingTable, i: usize, l: usize) -> QPoly {
        let mut out = QPoly::zero();
        for (j, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                out += c * table.get(j, i, l);
            }
        }
        out
    }

    pub fn specialize(&self, subs: &BTreeMap<Var, QPoly>) -> Self {
        Self::new(self.kind, self.n, self.coeffs.iter().map(|c| c.substitute_map(subs)).collect())
    }
}

/// `ζ^-`: flips the signs of odd-index coefficients.
pub fn zeta_sign(z: &DeformationParam) -> DeformationParam {
    let coeffs = z.coeffs.iter().enumerate().map(|(j, c)| if j % 2 == 1 { -c } else { c.clone() }).collect();
    DeformationParam::new(z.kind, z.n, coeffs)
}

/// θ-scaling of all coefficients (rescaling of the V*-generators).
pub fn theta_scale(z: &DeformationParam, theta: &Scalar) -> DeformationParam {
    DeformationParam::new(z.kind, z.n, z.coeffs.iter().map(|c| c.scale(theta)).collect())
}

/// Matrix `M` with `α_j(A + λ I) = Σ_i M[j][i] α_i(A)`, found by a linear
/// solve against the computed table (all components at once).
pub fn twist_matrix(table: &PairingTable, lambda: &Scalar) -> Result<Vec<Vec<Scalar>>, PairingError> {
    let d = table.vdim();
    let lie = &table.lie;
    let vars = lie.coordinate_vars();
    // var(E(k,k)) -> var(E(k,k)) + λ
    let shift: BTreeMap<Var, QPoly> = (1..=d)
        .filter_map(|k| lie.index_of(&format!("E({},{})", k, k)))
        .map(|b| (vars[b], &QPoly::var(vars[b]) + &QPoly::constant(lambda.clone())))
        .collect();
    let tag = |p: &QPoly, i: usize, l: usize| -> QPoly {
        // mark each component with a fresh variable so one solve covers all (i, l)
        p * &QPoly::var(Var::new(&format!("comp({},{})", i, l)))
    };
    let mut out = Vec::new();
    for j in 0..=table.jmax {
        let mut rhs = QPoly::zero();
        for i in 0..d {
            for l in 0..d {
                rhs += tag(&table.get(j, i, l).substitute_map(&shift), i, l);
            }
        }
        let cols: Vec<QPoly> = (0..=table.jmax)
            .map(|k| {
                let mut c = QPoly::zero();
                for i in 0..d {
                    for l in 0..d {
                        c += tag(table.get(k, i, l), i, l);
                    }
                }
                c
            })
            .collect();
        out.push(solve_linear_poly(&cols, &rhs).map_err(|_| PairingError::NotInSpan)?);
    }
    Ok(out)
}

/// `φ_λ(ζ)`: `ζ ↦ ζ ∘ φ_λ`, with `φ_λ(A) = A + λ tr A`, re-expanded in the pairing basis.
pub fn phi_lambda(z: &DeformationParam, lambda: &Scalar) -> Result<DeformationParam, PairingError> {
    if z.kind == LieKind::Sp || lambda.is_zero() {
        // sp has no centre, so the twist is trivial there
        return Ok(z.clone());
    }
    let m = z.coeffs.len().saturating_sub(1);
    let table = compute_pairings_capped(z.kind, z.n, m, m.max(DEFAULT_JMAX_CAP))?;
    let t = twist_matrix(&table, lambda)?;
    let mut coeffs = vec![QPoly::zero(); m + 1];
    for (j, c) in z.coeffs.iter().enumerate() {
        for (i, x) in t[j].iter().enumerate() {
            if !x.is_zero() {
                coeffs[i] += c.scale(x);
            }
        }
    }
    Ok(DeformationParam::new(z.kind, z.n, coeffs))
}

/// Scales `ζ_m` to 1 and twists by `λ = -ζ_{m-1}/(n+m)` so that `ζ'_{m-1} = 0`.
pub fn normalize_length_m(z: &DeformationParam) -> Result<(DeformationParam, Scalar), PairingError> {
    let m = z.coeffs.len().checked_sub(1).ok_or(PairingError::NotLengthM)?;
    let lead = &z.coeffs[m];
    if lead.is_zero() {
        return Err(PairingError::NotLengthM);
    }
    let lead = lead.as_constant().ok_or(PairingError::SymbolicLeading)?;
    let scaled = theta_scale(z, &(Scalar::one() / lead));
    if z.kind == LieKind::Sp || m == 0 {
        return Ok((scaled, Scalar::zero()));
    }
    let prev = scaled.coeffs[m - 1].as_constant().ok_or(PairingError::SymbolicLeading)?;
    let lambda = -prev / int((z.n + m) as i64);
    let out = phi_lambda(&scaled, &lambda)?;
    if !out.coeffs[m - 1].is_zero() {
        return Err(PairingError::NotInSpan);
    }
    Ok((out, lambda))
}

/// Checks `Σ α_i(A + sI) τ^i = (1 - sτ)^{-n-1} Σ α_i(A) (τ/(1 - sτ))^i` through
/// order `τ^m` with formal `s`, and its consequence `∂α_m/∂I = (n+m) α_{m-1}`.
pub fn verify_expansion_identity(n: usize, m: usize) -> VerificationReport {
    let mut rep = VerificationReport::new("expansion-identity").param("n", n).param("m", m);
    let table = match compute_pairings_capped(LieKind::Gl, n, m, m.max(DEFAULT_JMAX_CAP)) {
        Ok(t) => t,
        Err(e) => {
            rep.check("build", "pairing table", || Err(e.to_string()));
            return rep;
        }
    };
    verify_expansion_on(&table, &mut rep);
    rep
}

pub(crate) fn verify_expansion_on(table: &PairingTable, rep: &mut VerificationReport) {
    let n = table.n;
    let m = table.jmax;
    let s = Var::new("s");
    let tau = tau_var();
    let lie = &table.lie;
    let vars = lie.coordinate_vars();
    let diag: Vec<Var> = (1..=n).map(|k| vars[lie.index_of(&format!("E({},{})", k, k)).unwrap()]).collect();
    let shift: BTreeMap<Var, QPoly> = diag.iter().map(|v| (*v, &QPoly::var(*v) + &QPoly::var(s))).collect();
    let order = m as i32 + 1;
    let one_minus = TruncSeries::from_coeffs(tau, order, [(0, QPoly::one()), (1, -QPoly::var(s))]);
    let inv = series_invert(&one_minus).unwrap();
    let pre = inv.pow((n + 1) as u32);
    let arg = inv.shift(1).truncate(order);
    for i in 0..n {
        for l in 0..n {
            let started = Instant::now();
            let mut rhs = QSeries::zero(tau, order);
            let mut argp = QSeries::one(tau, order);
            for k in 0..=m {
                rhs = rhs.add(&argp.scale(table.get(k, i, l)));
                argp = argp.mul(&arg).truncate(order);
            }
            let rhs = rhs.mul(&pre).truncate(order);
            let mut witness = None;
            for j in 0..=m {
                let lhs = table.get(j, i, l).substitute_map(&shift);
                let r = rhs.coefficient_of(j as i32).unwrap();
                if lhs != r {
                    witness = Some(format!("tau^{}: {}", j, (&lhs - &r).canonical_string()));
                    break;
                }
            }
            rep.record(
                format!("series[{},{}]", i + 1, l + 1),
                "shift of the pairing generating function by sI",
                witness.is_none(),
                witness,
                started,
            );
            let started = Instant::now();
            if m >= 1 {
                let mut d = QPoly::zero();
                for v in &diag {
                    d += table.get(m, i, l).derivative(*v);
                }
                let expect = table.get(m - 1, i, l).scale(&int((n + m) as i64));
                let ok = d == expect;
                let w = (!ok).then(|| (&d - &expect).canonical_string());
                rep.record(format!("d/dI[{},{}]", i + 1, l + 1), "derivative along I_n of alpha_m", ok, w, started);
            }
        }
    }
}

/// Evaluates the pairing on a concrete matrix (test helper and oracle input).
pub fn eval_at(p: &QPoly, lie: &LieAlgebraData, a: &Matrix<Scalar>) -> Scalar {
    let vars = lie.coordinate_vars();
    // coordinate of b at A is tr(b A)
    let vals: BTreeMap<Var, Scalar> = (0..lie.dim()).map(|b| (vars[b], lie.mat(b).matmul(a).trace())).collect();
    p.eval(&|v| vals.get(&v).cloned().unwrap_or_else(Scalar::zero))
}

/// `binom(n+j, j-i)`: the closed-form twist coefficients (oracle for tests).
pub fn twist_closed_form(n: usize, j: usize, i: usize, lambda: &Scalar) -> Scalar {
    if i > j {
        return Scalar::zero();
    }
    let mut p = Scalar::one();
    for _ in 0..(j - i) {
        p *= lambda.clone();
    }
    binomial((n + j) as i64, (j - i) as i64) * p
}

/// Sanity of a pairing table: base pairing, the linear pairing (gl), the
/// `n = 1` closed form, g-invariance of every pairing, vanishing odd part
/// (sp) and the shift identity (gl).
pub fn pairings_suite(kind: LieKind, n: usize, jmax: usize) -> VerificationReport {
    pairings_suite_with(kind, n, jmax, false)
}

/// `corrupt` perturbs the top pairing at `(0, 0)` by 1 before checking.
pub fn pairings_suite_with(kind: LieKind, n: usize, jmax: usize, corrupt: bool) -> VerificationReport {
    match compute_pairings(kind, n, jmax) {
        Ok(t) => pairings_suite_on(t, corrupt),
        Err(e) => {
            let mut rep = VerificationReport::new("pairings").param("kind", kind).param("n", n).param("jmax", jmax);
            rep.check("build", "pairing table", || Err(e.to_string()));
            rep
        }
    }
}

/// The suite on an already computed (for instance cached) table.
pub fn pairings_suite_on(mut table: PairingTable, corrupt: bool) -> VerificationReport {
    let (kind, n, jmax) = (table.kind, table.n, table.jmax);
    let mut rep = VerificationReport::new("pairings").param("kind", kind).param("n", n).param("jmax", jmax);
    if corrupt {
        let v = table.values.get_mut(&(jmax, 0, 0)).unwrap();
        *v += QPoly::one();
    }
    let d = table.vdim();
    let named = |i: usize, l: usize| QPoly::named(&format!("E({},{})", i + 1, l + 1));
    if kind == LieKind::Gl {
        rep.check("alpha0", "α_0(y_i, x_l) = δ_il", || {
            for i in 0..d {
                for l in 0..d {
                    let want = if i == l { QPoly::one() } else { QPoly::zero() };
                    if table.get(0, i, l) != &want {
                        return Err(format!("({}, {}): {}", i + 1, l + 1, table.get(0, i, l)));
                    }
                }
            }
            Ok(())
        });
        if jmax >= 1 {
            rep.check("alpha1", "α_1(y_i, x_l) = a_li + δ_il tr A", || {
                for i in 0..d {
                    for l in 0..d {
                        let mut want = named(i, l);
                        if i == l {
                            for k in 0..d {
                                want += named(k, k);
                            }
                        }
                        if table.get(1, i, l) != &want {
                            return Err(format!("({}, {}): {}", i + 1, l + 1, (table.get(1, i, l) - &want).canonical_string()));
                        }
                    }
                }
                Ok(())
            });
        }
        if n == 1 {
            rep.check("n1-closed-form", "α_j = (j+1) a^j for gl_1", || {
                for j in 0..=jmax {
                    let want = named(0, 0).pow(j as u32).scale(&int(j as i64 + 1));
                    if table.get(j, 0, 0) != &want {
                        return Err(format!("j = {}", j));
                    }
                }
                Ok(())
            });
        }
    } else {
        let form = symplectic_form(d);
        rep.check("beta0", "β_0 = ω", || {
            for i in 0..d {
                for l in 0..d {
                    if table.get(0, i, l) != &QPoly::constant(form[(i, l)].clone()) {
                        return Err(format!("({}, {})", i + 1, l + 1));
                    }
                }
            }
            Ok(())
        });
        for j in 0..jmax.min(2) {
            rep.check(format!("odd-part[{}]", 2 * j + 1), "odd τ-powers of the sp generating function vanish", || {
                for i in 0..d {
                    for l in 0..d {
                        let r = table.sp_odd_part(j, i, l);
                        if !r.is_zero() {
                            return Err(format!("({}, {}): {}", i + 1, l + 1, r.canonical_string()));
                        }
                    }
                }
                Ok(())
            });
        }
    }
    let gens = table.lie.generating_subset();
    for j in 0..=jmax {
        // a representation of g is killed by g once it is killed by generators
        rep.check(format!("invariance[{}]", j), "g-invariance of the pairing (on Lie generators)", || {
            for &a in &gens {
                for i in 0..d {
                    for l in 0..d {
                        let r = table.invariance_defect(j, a, i, l);
                        if !r.is_zero() {
                            return Err(format!("{} at ({}, {}): {}", table.lie.labels()[a], i + 1, l + 1, r.canonical_string()));
                        }
                    }
                }
            }
            Ok(())
        });
    }
    if kind == LieKind::Gl {
        verify_expansion_on(&table, &mut rep);
    }
    rep
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::frac;

    #[test]
    fn alpha_zero_and_one() {
        for n in 1..=3 {
            let t = compute_pairings(LieKind::Gl, n, 2).unwrap();
            for i in 0..n {
                for l in 0..n {
                    let d = if i == l { QPoly::one() } else { QPoly::zero() };
                    assert_eq!(t.get(0, i, l), &d);
                    let mut expect = QPoly::named(&format!("E({},{})", i + 1, l + 1));
                    if i == l {
                        for k in 1..=n {
                            expect += QPoly::named(&format!("E({},{})", k, k));
                        }
                    }
                    assert_eq!(t.get(1, i, l), &expect, "n={} i={} l={}", n, i, l);
                }
            }
        }
    }

    #[test]
    fn n1_closed_form() {
        let t = compute_pairings(LieKind::Gl, 1, 5).unwrap();
        let a = QPoly::named("E(1,1)");
        for j in 0..=5 {
            assert_eq!(t.get(j, 0, 0), &a.pow(j as u32).scale(&int(j as i64 + 1)));
        }
    }

    #[test]
    fn invariance_small() {
        for (kind, n, j) in [(LieKind::Gl, 2, 3), (LieKind::Sp, 1, 3), (LieKind::Sp, 2, 2)] {
            let t = compute_pairings(kind, n, j).unwrap();
            for jj in 0..=j {
                for a in 0..t.lie.dim() {
                    for i in 0..t.vdim() {
                        for l in 0..t.vdim() {
                            assert!(t.invariance_defect(jj, a, i, l).is_zero(), "{:?} j={} a={} ({},{})", kind, jj, a, i, l);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn termwise_defect_matches_derivative_form() {
        let t = compute_pairings(LieKind::Sp, 2, 2).unwrap();
        let mut broken = t.clone();
        *broken.values.get_mut(&(2, 0, 1)).unwrap() += QPoly::named("E(1,1)").pow(2);
        for a in 0..t.lie.dim() {
            let slow = |tab: &PairingTable| {
                let mut out = tab.ad_action(a, tab.get(2, 0, 1));
                for (k, c) in tab.lie.act_vector(a, 0) {
                    out -= tab.get(2, k, 1).scale(&c);
                }
                for (k, c) in tab.lie.act_vector(a, 1) {
                    out -= tab.get(2, 0, k).scale(&c);
                }
                out
            };
            assert_eq!(t.invariance_defect(2, a, 0, 1), slow(&t));
            assert_eq!(broken.invariance_defect(2, a, 0, 1), slow(&broken));
        }
    }

    #[test]
    fn sp_base_and_parity() {
        let t = compute_pairings(LieKind::Sp, 1, 2).unwrap();
        let j = symplectic_form(2);
        for i in 0..2 {
            for l in 0..2 {
                assert_eq!(t.get(0, i, l).as_constant().unwrap_or_else(Scalar::zero), j[(i, l)]);
                for jj in 0..2 {
                    assert!(t.sp_odd_part(jj, i, l).is_zero());
                }
            }
        }
    }

    #[test]
    fn twist_matches_closed_form() {
        let t = compute_pairings(LieKind::Gl, 2, 3).unwrap();
        let lam = frac(2, 3);
        let m = twist_matrix(&t, &lam).unwrap();
        for j in 0..=3 {
            for i in 0..=3 {
                assert_eq!(m[j][i], twist_closed_form(2, j, i, &lam));
            }
        }
    }

    #[test]
    fn phi_and_sign() {
        let z = DeformationParam::from_scalars(LieKind::Gl, 1, &[int(1), int(5), int(1)]);
        assert_eq!(phi_lambda(&z, &Scalar::zero()).unwrap(), z);
        assert_eq!(zeta_sign(&zeta_sign(&z)), z);
        let lam = frac(1, 2);
        let p = phi_lambda(&z, &lam).unwrap();
        // ζ_1 + 3λ ζ_2
        assert_eq!(p.coeffs[1], QPoly::constant(int(5) + int(3) * lam.clone()));
        let (nz, l) = normalize_length_m(&z).unwrap();
        assert_eq!(l, frac(-5, 3));
        assert!(nz.coeffs[1].is_zero());
        assert_eq!(nz.coeffs[2], QPoly::one());
        let zero_lead = DeformationParam::from_scalars(LieKind::Gl, 1, &[int(1), int(0)]);
        assert_eq!(normalize_length_m(&zero_lead), Err(PairingError::NotLengthM));
    }

    #[test]
    fn expansion_identity_small() {
        let r = verify_expansion_identity(2, 2);
        assert!(r.all_pass(), "{}", r.to_text());
    }

    #[test]
    fn json_roundtrip() {
        let t = compute_pairings(LieKind::Gl, 2, 2).unwrap();
        let back = PairingTable::from_json(&t.to_json()).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn cap_enforced() {
        assert!(matches!(compute_pairings(LieKind::Gl, 1, 7), Err(PairingError::Cap { .. })));
    }
}
