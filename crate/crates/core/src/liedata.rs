//! Structure data for gl_n, sl_N and sp_2N realised as matrix Lie algebras,
//! together with the 1-block nilpotents, their centralizers and the
//! Slodowy-slice matrices.

use std::collections::HashMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::exact::{char_coeffs, complete_coeffs, int, nullspace, rank, solve_linear, Matrix, QPoly, Scalar, Var};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LieKind {
    Gl,
    Sl,
    Sp,
}

impl LieKind {
    pub fn name(self) -> &'static str {
        match self {
            LieKind::Gl => "gl",
            LieKind::Sl => "sl",
            LieKind::Sp => "sp",
        }
    }

    pub fn parse(s: &str) -> Option<LieKind> {
        match s {
            "gl" => Some(LieKind::Gl),
            "sl" => Some(LieKind::Sl),
            "sp" => Some(LieKind::Sp),
            _ => None,
        }
    }
}

impl fmt::Display for LieKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LieError {
    #[error("parameter out of range: {0}")]
    Range(String),
    #[error("matrix is not in the algebra")]
    NotMember,
}

/// `E_{ij}` in an `d × d` matrix algebra, 1-based.
pub fn unit(d: usize, i: usize, j: usize) -> Matrix<Scalar> {
    let mut m = Matrix::zeros(d, d);
    m[(i - 1, j - 1)] = Scalar::one();
    m
}

/// Antidiagonal symplectic form `J_{ij} = (-1)^j δ_{i+j, 2N+1}`.
pub fn symplectic_form(n2: usize) -> Matrix<Scalar> {
    Matrix::from_fn(n2, n2, |i, j| {
        let (i, j) = (i + 1, j + 1);
        if i + j == n2 + 1 {
            if j % 2 == 0 {
                int(1)
            } else {
                int(-1)
            }
        } else {
            Scalar::zero()
        }
    })
}

/// `U_{k,l} = E_{kl} + (-1)^{k+l+1} E_{2N+1-l, 2N+1-k}` in `sp_2N` (d = 2N).
pub fn sp_unit(d: usize, k: usize, l: usize) -> Matrix<Scalar> {
    let mut m = unit(d, k, l);
    let sgn = if (k + l + 1) % 2 == 0 { int(1) } else { int(-1) };
    let (a, b) = (d + 1 - l, d + 1 - k);
    let v = m[(a - 1, b - 1)].clone() + sgn;
    m[(a - 1, b - 1)] = v;
    m
}

pub fn is_sp_member(m: &Matrix<Scalar>) -> bool {
    let d = m.rows();
    if d % 2 != 0 {
        return false;
    }
    for i in 1..=d {
        for j in 1..=d {
            let s = if (i + j + 1) % 2 == 0 { int(1) } else { int(-1) };
            if m[(d - j, d - i)] != s * m[(i - 1, j - 1)].clone() {
                return false;
            }
        }
    }
    true
}

/// Matrix Lie algebra with a fixed ordered basis.
#[derive(Clone)]
pub struct LieAlgebraData {
    pub kind: LieKind,
    /// `n` of gl_n, `N` of sl_N, `N` of sp_2N.
    pub size: usize,
    labels: Vec<String>,
    mats: Vec<Matrix<Scalar>>,
    duals: Vec<Matrix<Scalar>>,
    bracket: Vec<Vec<Vec<(usize, Scalar)>>>,
    form: Vec<Vec<Scalar>>,
    index: HashMap<String, usize>,
}

impl fmt::Debug for LieAlgebraData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}_{}(dim {})", self.kind, self.matrix_dim(), self.dim())
    }
}

impl PartialEq for LieAlgebraData {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind && self.size == other.size
    }
}

pub fn build_lie(kind: LieKind, n: usize) -> Result<LieAlgebraData, LieError> {
    if n == 0 || (kind == LieKind::Sl && n < 2) {
        return Err(LieError::Range(format!("{}_{} needs a positive size", kind, n)));
    }
    let mut labels = Vec::new();
    let mut mats = Vec::new();
    match kind {
        LieKind::Gl => {
            for i in 1..=n {
                for j in 1..=n {
                    labels.push(format!("E({},{})", i, j));
                    mats.push(unit(n, i, j));
                }
            }
        }
        LieKind::Sl => {
            for i in 1..=n {
                for j in 1..=n {
                    if i != j {
                        labels.push(format!("E({},{})", i, j));
                        mats.push(unit(n, i, j));
                    } else if i < n {
                        labels.push(format!("H({})", i));
                        mats.push(unit(n, i, i).sub(&unit(n, i + 1, i + 1)));
                    }
                }
            }
        }
        LieKind::Sp => {
            let d = 2 * n;
            for k in 1..=d {
                for l in 1..=d {
                    if k + l <= d + 1 {
                        labels.push(format!("U({},{})", k, l));
                        mats.push(sp_unit(d, k, l));
                    }
                }
            }
        }
    }
    let dim = mats.len();
    let mut lie = LieAlgebraData {
        kind,
        size: n,
        index: labels.iter().enumerate().map(|(i, l)| (l.clone(), i)).collect(),
        labels,
        mats,
        duals: Vec::new(),
        bracket: Vec::new(),
        form: Vec::new(),
    };
    lie.form = (0..dim)
        .map(|a| (0..dim).map(|b| lie.mats[a].matmul(&lie.mats[b]).trace()).collect())
        .collect();
    // dual basis: b^v = Σ_c (G^{-1})_{c b} mat_c
    let mut duals = Vec::with_capacity(dim);
    for b in 0..dim {
        let rhs: Vec<Scalar> = (0..dim).map(|c| if c == b { Scalar::one() } else { Scalar::zero() }).collect();
        let coeffs = solve_linear(&lie.form, &rhs).expect("trace form is nondegenerate");
        let mut m = Matrix::zeros(lie.matrix_dim(), lie.matrix_dim());
        for (c, x) in coeffs.iter().enumerate() {
            if !x.is_zero() {
                m = m.add(&lie.mats[c].scale(x));
            }
        }
        duals.push(m);
    }
    lie.duals = duals;
    let mut bracket = vec![vec![Vec::new(); dim]; dim];
    for a in 0..dim {
        for b in 0..dim {
            let c = lie.mats[a].commutator(&lie.mats[b]);
            let coords = lie.coords(&c).expect("algebra closed under bracket");
            bracket[a][b] = coords.into_iter().enumerate().filter(|(_, x)| !x.is_zero()).collect();
        }
    }
    lie.bracket = bracket;
    Ok(lie)
}

impl LieAlgebraData {
    pub fn dim(&self) -> usize {
        self.mats.len()
    }

    pub fn matrix_dim(&self) -> usize {
        match self.kind {
            LieKind::Sp => 2 * self.size,
            _ => self.size,
        }
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    pub fn mat(&self, i: usize) -> &Matrix<Scalar> {
        &self.mats[i]
    }

    pub fn dual(&self, i: usize) -> &Matrix<Scalar> {
        &self.duals[i]
    }

    pub fn trace_form(&self, a: usize, b: usize) -> &Scalar {
        &self.form[a][b]
    }

    /// Structure constants: `[b_a, b_b] = Σ c_k b_k`.
    pub fn bracket(&self, a: usize, b: usize) -> &[(usize, Scalar)] {
        &self.bracket[a][b]
    }

    /// Coordinates of a matrix in the basis, `None` if it is not in the algebra.
    pub fn coords(&self, m: &Matrix<Scalar>) -> Option<Vec<Scalar>> {
        let d = self.matrix_dim();
        if m.rows() != d || m.cols() != d {
            return None;
        }
        let mut out = vec![Scalar::zero(); self.dim()];
        match self.kind {
            LieKind::Gl => {
                for i in 0..d {
                    for j in 0..d {
                        out[i * d + j] = m[(i, j)].clone();
                    }
                }
            }
            LieKind::Sl => {
                if !m.trace().is_zero() {
                    return None;
                }
                let mut partial = Scalar::zero();
                for i in 1..=d {
                    for j in 1..=d {
                        if i != j {
                            out[self.index[&format!("E({},{})", i, j)]] = m[(i - 1, j - 1)].clone();
                        }
                    }
                    if i < d {
                        partial += m[(i - 1, i - 1)].clone();
                        out[self.index[&format!("H({})", i)]] = partial.clone();
                    }
                }
            }
            LieKind::Sp => {
                if !is_sp_member(m) {
                    return None;
                }
                for k in 1..=d {
                    for l in 1..=d {
                        if k + l <= d + 1 {
                            let mut v = m[(k - 1, l - 1)].clone();
                            if k + l == d + 1 {
                                v /= int(2);
                            }
                            out[self.index[&format!("U({},{})", k, l)]] = v;
                        }
                    }
                }
            }
        }
        Some(out)
    }

    pub fn from_coords(&self, c: &[Scalar]) -> Matrix<Scalar> {
        let d = self.matrix_dim();
        let mut m = Matrix::zeros(d, d);
        for (i, x) in c.iter().enumerate() {
            if !x.is_zero() {
                m = m.add(&self.mats[i].scale(x));
            }
        }
        m
    }

    /// Basis elements generating the whole algebra under brackets. Candidates
    /// closest to the diagonal come first, so root vectors of small height are
    /// preferred; the closure is computed exactly, whatever the basis.
    pub fn generating_subset(&self) -> Vec<usize> {
        let dim = self.dim();
        let height = |b: usize| {
            let m = &self.mats[b];
            let mut h = usize::MAX;
            for r in 0..m.rows() {
                for c in 0..m.cols() {
                    if r != c && !m[(r, c)].is_zero() {
                        h = h.min(r.abs_diff(c));
                    }
                }
            }
            h
        };
        let mut order: Vec<usize> = (0..dim).collect();
        order.sort_by_key(|&b| (height(b), b));
        let unit = |i: usize| -> Vec<Scalar> { (0..dim).map(|k| if k == i { Scalar::one() } else { Scalar::zero() }).collect() };
        let br = |u: &[Scalar], v: &[Scalar]| -> Vec<Scalar> {
            let mut out = vec![Scalar::zero(); dim];
            for (a, x) in u.iter().enumerate().filter(|(_, x)| !x.is_zero()) {
                for (b, y) in v.iter().enumerate().filter(|(_, y)| !y.is_zero()) {
                    for (k, c) in self.bracket(a, b) {
                        out[*k] += x.clone() * y.clone() * c.clone();
                    }
                }
            }
            out
        };
        let mut chosen = Vec::new();
        let mut span: Vec<Vec<Scalar>> = Vec::new();
        for b in order {
            if rank(&[span.clone(), vec![unit(b)]].concat()) == span.len() {
                continue;
            }
            chosen.push(b);
            span.push(unit(b));
            // close under brackets
            let mut i = 0;
            while i < span.len() {
                for j in 0..span.len() {
                    let w = br(&span[i], &span[j]);
                    if rank(&[span.clone(), vec![w.clone()]].concat()) > span.len() {
                        span.push(w);
                    }
                }
                i += 1;
            }
            if span.len() == dim {
                break;
            }
        }
        chosen
    }

    /// Exhaustive Jacobi check on basis triples; returns the first failing triple.
    pub fn check_jacobi(&self) -> Result<(), (usize, usize, usize)> {
        let dim = self.dim();
        let br = |a: usize, v: &[Scalar]| -> Vec<Scalar> {
            let mut out = vec![Scalar::zero(); dim];
            for (b, x) in v.iter().enumerate() {
                if x.is_zero() {
                    continue;
                }
                for (k, c) in self.bracket(a, b) {
                    out[*k] += x.clone() * c.clone();
                }
            }
            out
        };
        let basis = |i: usize| -> Vec<Scalar> { (0..dim).map(|k| if k == i { Scalar::one() } else { Scalar::zero() }).collect() };
        let bb = |a: usize, b: usize| -> Vec<Scalar> { br(a, &basis(b)) };
        for a in 0..dim {
            for b in 0..dim {
                let bc_ab = bb(a, b);
                for c in 0..dim {
                    // [a,[b,c]] + [b,[c,a]] + [c,[a,b]]
                    let t1 = br(a, &bb(b, c));
                    let t2 = br(b, &bb(c, a));
                    let t3 = br(c, &bc_ab);
                    if (0..dim).any(|k| !(t1[k].clone() + t2[k].clone() + t3[k].clone()).is_zero()) {
                        return Err((a, b, c));
                    }
                }
            }
        }
        Ok(())
    }

    /// Action of basis element `b` on the standard basis vector `e_k`:
    /// the k-th column, as `(i, coeff)` pairs.
    pub fn act_vector(&self, b: usize, k: usize) -> Vec<(usize, Scalar)> {
        let m = &self.mats[b];
        (0..m.rows()).filter(|&i| !m[(i, k)].is_zero()).map(|i| (i, m[(i, k)].clone())).collect()
    }

    /// Action on the dual basis vector `x_k`: `b(x_k) = -Σ_j b_{kj} x_j`.
    pub fn act_covector(&self, b: usize, k: usize) -> Vec<(usize, Scalar)> {
        let m = &self.mats[b];
        (0..m.cols()).filter(|&j| !m[(k, j)].is_zero()).map(|j| (j, -m[(k, j)].clone())).collect()
    }

    /// Coordinate variables, one per basis element, named by label.
    pub fn coordinate_vars(&self) -> Vec<Var> {
        self.labels.iter().map(|l| Var::new(l)).collect()
    }

    /// The generic element `A = Σ_b var(b) · b^∨`, so that the coordinate of
    /// `b` on `A` is `tr(b A) = var(b)`; this realises `S(g) ≅ C[g]`.
    pub fn generic_matrix(&self) -> Matrix<QPoly> {
        self.generic_matrix_with(&self.coordinate_vars())
    }

    pub fn generic_matrix_with(&self, vars: &[Var]) -> Matrix<QPoly> {
        crate::exact::generic_matrix(&self.duals, vars)
    }

    /// Polynomial matrix `Σ_b c_b · mat(b)` for polynomial coefficients.
    pub fn poly_matrix(&self, coeffs: &[QPoly]) -> Matrix<QPoly> {
        let d = self.matrix_dim();
        let mut out: Matrix<QPoly> = Matrix::zeros(d, d);
        for (b, c) in coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let m = &self.mats[b];
            for i in 0..d {
                for j in 0..d {
                    if !m[(i, j)].is_zero() {
                        out[(i, j)] = out[(i, j)].clone() + c.scale(&m[(i, j)]);
                    }
                }
            }
        }
        out
    }

    /// Coordinates of a polynomial matrix lying in the algebra (entrywise linear).
    pub fn poly_coords(&self, m: &Matrix<QPoly>) -> Option<Vec<QPoly>> {
        // coordinates are linear functionals of the entries; probe with unit matrices
        let d = self.matrix_dim();
        let mut out = vec![QPoly::zero(); self.dim()];
        let mut rebuilt: Matrix<QPoly> = Matrix::zeros(d, d);
        for i in 0..d {
            for j in 0..d {
                let e = &m[(i, j)];
                if e.is_zero() {
                    continue;
                }
                let c = self.linear_coords_of_unit(i, j);
                for (k, x) in c {
                    out[k] = out[k].clone() + e.scale(&x);
                }
            }
        }
        for (b, c) in out.iter().enumerate() {
            let mb = &self.mats[b];
            for i in 0..d {
                for j in 0..d {
                    if !mb[(i, j)].is_zero() && !c.is_zero() {
                        rebuilt[(i, j)] = rebuilt[(i, j)].clone() + c.scale(&mb[(i, j)]);
                    }
                }
            }
        }
        if &rebuilt == m {
            Some(out)
        } else {
            None
        }
    }

    /// The coordinate functionals evaluated on the matrix unit E_{i+1,j+1}
    /// (treating the coordinate map as a linear map on all matrices).
    fn linear_coords_of_unit(&self, i: usize, j: usize) -> Vec<(usize, Scalar)> {
        let d = self.matrix_dim();
        let mut out = Vec::new();
        match self.kind {
            LieKind::Gl => out.push((i * d + j, Scalar::one())),
            LieKind::Sl => {
                if i != j {
                    out.push((self.index[&format!("E({},{})", i + 1, j + 1)], Scalar::one()));
                } else {
                    for k in (i + 1)..d {
                        out.push((self.index[&format!("H({})", k)], Scalar::one()));
                    }
                }
            }
            LieKind::Sp => {
                let (k, l) = (i + 1, j + 1);
                if k + l <= d + 1 {
                    let v = if k + l == d + 1 { Scalar::new(1.into(), 2.into()) } else { Scalar::one() };
                    out.push((self.index[&format!("U({},{})", k, l)], v));
                }
            }
        }
        out
    }

    /// Matrix of `ad(x)` in this basis (columns are images of basis vectors).
    pub fn ad_matrix(&self, x: &Matrix<Scalar>) -> Vec<Vec<Scalar>> {
        let dim = self.dim();
        let cols: Vec<Vec<Scalar>> = (0..dim)
            .map(|b| self.coords(&x.commutator(&self.mats[b])).expect("ad preserves the algebra"))
            .collect();
        (0..dim).map(|r| (0..dim).map(|c| cols[c][r].clone()).collect()).collect()
    }
}

/// Jacobson–Morozov triple.
#[derive(Clone, Debug)]
pub struct SL2Triple {
    pub e: Matrix<Scalar>,
    pub h: Matrix<Scalar>,
    pub f: Matrix<Scalar>,
}

impl SL2Triple {
    pub fn check(&self) -> bool {
        self.h.commutator(&self.e) == self.e.scale(&int(2))
            && self.h.commutator(&self.f) == self.f.scale(&int(-2))
            && self.e.commutator(&self.f) == self.h
    }
}

fn check_range(kind: LieKind, n: usize, m: usize) -> Result<(), LieError> {
    match kind {
        LieKind::Gl | LieKind::Sl if m < 2 => Err(LieError::Range(format!("sl needs m >= 2, got m = {}", m))),
        LieKind::Sp if m < 1 => Err(LieError::Range("sp needs m >= 1".into())),
        _ if n < 1 => Err(LieError::Range("n must be positive".into())),
        _ => Ok(()),
    }
}

/// Ambient algebra for the 1-block nilpotent: `sl_{n+m}` or `sp_{2n+2m}`.
pub fn ambient(kind: LieKind, n: usize, m: usize) -> Result<LieAlgebraData, LieError> {
    check_range(kind, n, m)?;
    match kind {
        LieKind::Sp => build_lie(LieKind::Sp, n + m),
        _ => build_lie(LieKind::Sl, n + m),
    }
}

/// The 1-block nilpotent `e_m` of Jordan type `(1,…,1,m)` in `sl_{n+m}`
/// (resp. `(1,…,1,2m)` in `sp_{2n+2m}`) with its standard triple.
pub fn one_block_nilpotent(kind: LieKind, n: usize, m: usize) -> Result<SL2Triple, LieError> {
    check_range(kind, n, m)?;
    let (d, len) = match kind {
        LieKind::Sp => (2 * (n + m), 2 * m),
        _ => (n + m, m),
    };
    let mut e = Matrix::zeros(d, d);
    let mut h = Matrix::zeros(d, d);
    let mut f = Matrix::zeros(d, d);
    for j in 1..len {
        e = e.add(&unit(d, n + j, n + j + 1));
        f = f.add(&unit(d, n + j + 1, n + j).scale(&int((j * (len - j)) as i64)));
    }
    for j in 1..=len {
        h = h.add(&unit(d, n + j, n + j).scale(&int(len as i64 + 1 - 2 * j as i64)));
    }
    let t = SL2Triple { e, h, f };
    assert!(t.check(), "sl2 relations");
    debug_assert_eq!(jordan_type(&t.e), {
        let mut v = vec![1; d - len];
        v.push(len);
        v
    });
    Ok(t)
}

/// Jordan block sizes of a nilpotent matrix, sorted ascending.
pub fn jordan_type(e: &Matrix<Scalar>) -> Vec<usize> {
    let d = e.rows();
    let rank_of = |m: &Matrix<Scalar>| {
        let rows: Vec<Vec<Scalar>> = (0..d).map(|i| m.row(i).to_vec()).collect();
        crate::exact::rank(&rows)
    };
    // r_k = rank(e^k); number of blocks of size ≥ k is r_{k-1} - r_k
    let mut ranks = vec![d];
    let mut p = Matrix::identity(d);
    loop {
        p = p.matmul(e);
        let r = rank_of(&p);
        ranks.push(r);
        if r == 0 || ranks.len() > d + 1 {
            break;
        }
    }
    let mut out = Vec::new();
    for k in 1..ranks.len() {
        let at_least_k = ranks[k - 1] - ranks[k];
        let at_least_k1 = if k + 1 < ranks.len() { ranks[k] - ranks[k + 1] } else { 0 };
        for _ in 0..(at_least_k - at_least_k1) {
            out.push(k);
        }
    }
    out.sort();
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CentralizerPart {
    /// `q = z_χ(0)`, i.e. gl_n or sp_2n.
    Q,
    VPlus,
    VMinus,
    Xi,
}

#[derive(Clone, Debug)]
pub struct CentralizerElement {
    pub label: String,
    pub part: CentralizerPart,
    pub mat: Matrix<Scalar>,
    pub h_weight: i64,
    pub t_weight: Scalar,
}

/// Basis of `z_χ = ker ad(e_m)` adapted to `q ⊕ V ⊕ (V*) ⊕ C^k`.
#[derive(Clone, Debug)]
pub struct CentralizerBasis {
    pub kind: LieKind,
    pub n: usize,
    pub m: usize,
    pub triple: SL2Triple,
    /// `T_{n,m}` (gl) or `I'_n` (sp), embedded.
    pub t: Matrix<Scalar>,
    pub elements: Vec<CentralizerElement>,
}

impl CentralizerBasis {
    pub fn dim(&self) -> usize {
        self.elements.len()
    }

    pub fn part(&self, p: CentralizerPart) -> impl Iterator<Item = &CentralizerElement> {
        self.elements.iter().filter(move |e| e.part == p)
    }

    pub fn get(&self, label: &str) -> Option<&CentralizerElement> {
        self.elements.iter().find(|e| e.label == label)
    }
}

fn eigen_weight(x: &Matrix<Scalar>, v: &Matrix<Scalar>) -> Option<Scalar> {
    let c = x.commutator(v);
    let d = v.rows();
    for i in 0..d {
        for j in 0..d {
            if !v[(i, j)].is_zero() {
                let w = c[(i, j)].clone() / v[(i, j)].clone();
                return if c == v.scale(&w) { Some(w) } else { None };
            }
        }
    }
    None
}

/// The embedding of `q` into the ambient algebra: gl_n as the upper-left
/// block corrected by `I_n ↦ T_{n,m}`, sp_2n via the four corner blocks.
pub fn embed_q(kind: LieKind, n: usize, m: usize, a: &Matrix<Scalar>) -> Matrix<Scalar> {
    match kind {
        LieKind::Sp => {
            let d = 2 * (n + m);
            let idx = |i: usize| if i < n { i } else { i + 2 * m };
            let mut out = Matrix::zeros(d, d);
            for i in 0..2 * n {
                for j in 0..2 * n {
                    out[(idx(i), idx(j))] = a[(i, j)].clone();
                }
            }
            out
        }
        _ => {
            let d = n + m;
            let tr = a.trace() / int(d as i64);
            Matrix::from_fn(d, d, |i, j| {
                let base = if i < n && j < n { a[(i, j)].clone() } else { Scalar::zero() };
                if i == j {
                    base - tr.clone()
                } else {
                    base
                }
            })
        }
    }
}

pub fn t_element(kind: LieKind, n: usize, m: usize) -> Matrix<Scalar> {
    match kind {
        LieKind::Sp => {
            let d = 2 * (n + m);
            Matrix::from_fn(d, d, |i, j| {
                if i != j {
                    Scalar::zero()
                } else if i < n {
                    int(1)
                } else if i >= n + 2 * m {
                    int(-1)
                } else {
                    Scalar::zero()
                }
            })
        }
        _ => embed_q(kind, n, m, &Matrix::identity(n)),
    }
}

pub fn centralizer_basis(kind: LieKind, n: usize, m: usize) -> Result<CentralizerBasis, LieError> {
    let triple = one_block_nilpotent(kind, n, m)?;
    let t = t_element(kind, n, m);
    let mut raw: Vec<(String, CentralizerPart, Matrix<Scalar>)> = Vec::new();
    match kind {
        LieKind::Sp => {
            let q = build_lie(LieKind::Sp, n)?;
            for b in 0..q.dim() {
                raw.push((q.label(b).to_string(), CentralizerPart::Q, embed_q(kind, n, m, q.mat(b))));
            }
            let d = 2 * (n + m);
            for i in 1..=n {
                let s = if (n + i + 1) % 2 == 0 { int(1) } else { int(-1) };
                let y = unit(d, i, n + 2 * m).add(&unit(d, n + 1, 2 * n + 2 * m + 1 - i).scale(&s));
                raw.push((format!("y({})", i), CentralizerPart::VPlus, y));
            }
            for i in 1..=n {
                let s = if (i + 1) % 2 == 0 { int(1) } else { int(-1) };
                let y = unit(d, n + 2 * m + i, n + 2 * m).add(&unit(d, n + 1, n + 1 - i).scale(&s));
                raw.push((format!("y({})", n + i), CentralizerPart::VMinus, y));
            }
            let powers = triple.e.powers(2 * m);
            for j in 0..m {
                raw.push((format!("xi({})", j), CentralizerPart::Xi, powers[2 * (m - j) - 1].clone()));
            }
        }
        _ => {
            let q = build_lie(LieKind::Gl, n)?;
            for b in 0..q.dim() {
                raw.push((q.label(b).to_string(), CentralizerPart::Q, embed_q(kind, n, m, q.mat(b))));
            }
            let d = n + m;
            for i in 1..=n {
                raw.push((format!("y({})", i), CentralizerPart::VPlus, unit(d, i, n + m)));
            }
            for i in 1..=n {
                raw.push((format!("x({})", i), CentralizerPart::VMinus, unit(d, n + 1, i)));
            }
            let powers = triple.e.powers(m);
            for k in 0..m.saturating_sub(1) {
                raw.push((format!("xi({})", k), CentralizerPart::Xi, powers[m - 1 - k].clone()));
            }
        }
    }
    let mut elements = Vec::with_capacity(raw.len());
    for (label, part, mat) in raw {
        assert!(triple.e.commutator(&mat).is_zero(), "{} does not centralise e", label);
        let h_weight = eigen_weight(&triple.h, &mat).expect("ad h eigenvector");
        let t_weight = eigen_weight(&t, &mat).unwrap_or_else(Scalar::zero);
        let hw: i64 = h_weight.to_integer().try_into().expect("small weight");
        elements.push(CentralizerElement { label, part, mat, h_weight: hw, t_weight });
    }
    Ok(CentralizerBasis { kind, n, m, triple, t, elements })
}

/// Dimension of `ker ad(e_m)` computed directly as a null space on the ambient algebra.
pub fn centralizer_dim_bruteforce(kind: LieKind, n: usize, m: usize) -> Result<usize, LieError> {
    let g = ambient(kind, n, m)?;
    let triple = one_block_nilpotent(kind, n, m)?;
    let ad = g.ad_matrix(&triple.e);
    Ok(nullspace(&ad, g.dim()).len())
}

/// Symbolic Slodowy-slice matrix with its blocks and coordinate names.
#[derive(Clone, Debug)]
pub struct SliceMatrix {
    pub kind: LieKind,
    pub n: usize,
    pub m: usize,
    pub x: Matrix<QPoly>,
    /// upper-left `n × n` (gl) or the `sp_2n` corner part (sp), as its own matrix.
    pub x1: Matrix<QPoly>,
    /// lower-right `m × m` (gl) or centred `2m × 2m` (sp) block.
    pub x2: Matrix<QPoly>,
    pub x1_vars: Vec<Var>,
    pub u_vars: Vec<Var>,
    pub v_vars: Vec<Var>,
    pub w_vars: Vec<Var>,
}

impl SliceMatrix {
    pub fn all_vars(&self) -> Vec<Var> {
        let mut v = self.x1_vars.clone();
        v.extend(&self.u_vars);
        v.extend(&self.v_vars);
        v.extend(&self.w_vars);
        v
    }
}

fn const_matrix(m: &Matrix<Scalar>) -> Matrix<QPoly> {
    m.map(|x| QPoly::constant(x.clone()))
}

fn add_scaled(acc: &mut Matrix<QPoly>, m: &Matrix<Scalar>, c: &QPoly) {
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            if !m[(i, j)].is_zero() {
                acc[(i, j)] = acc[(i, j)].clone() + c.scale(&m[(i, j)]);
            }
        }
    }
}

pub fn slice_matrix(kind: LieKind, n: usize, m: usize) -> Result<SliceMatrix, LieError> {
    let triple = one_block_nilpotent(kind, n, m)?;
    match kind {
        LieKind::Sp => {
            let d = 2 * (n + m);
            let q = build_lie(LieKind::Sp, n)?;
            let x1_vars: Vec<Var> = (0..q.dim()).map(|b| Var::new(&format!("x{}", &q.label(b)[1..]))).collect();
            let x1 = q.poly_matrix(&x1_vars.iter().map(|v| QPoly::var(*v)).collect::<Vec<_>>());
            let mut x = const_matrix(&triple.e);
            let idx = |i: usize| if i < n { i } else { i + 2 * m };
            for i in 0..2 * n {
                for j in 0..2 * n {
                    x[(idx(i), idx(j))] = x[(idx(i), idx(j))].clone() + x1[(i, j)].clone();
                }
            }
            let v_vars: Vec<Var> = (1..=2 * n).map(|i| Var::new(&format!("v({})", i))).collect();
            for i in 1..=n {
                add_scaled(&mut x, &sp_unit(d, i, n + 1), &QPoly::var(v_vars[i - 1]));
                add_scaled(&mut x, &sp_unit(d, n + 2 * m + i, n + 1), &QPoly::var(v_vars[n + i - 1]));
            }
            let w_vars: Vec<Var> = (1..=m).map(|k| Var::new(&format!("w({})", k))).collect();
            let fp = triple.f.powers(2 * m);
            let mut x2 = const_matrix(&triple.e);
            for k in 1..=m {
                add_scaled(&mut x, &fp[2 * k - 1], &QPoly::var(w_vars[k - 1]));
                add_scaled(&mut x2, &fp[2 * k - 1], &QPoly::var(w_vars[k - 1]));
            }
            let x2 = Matrix::from_fn(2 * m, 2 * m, |i, j| x2[(n + i, n + j)].clone());
            Ok(SliceMatrix { kind, n, m, x, x1, x2, x1_vars, u_vars: Vec::new(), v_vars, w_vars })
        }
        _ => {
            let d = n + m;
            let mut x = const_matrix(&triple.e);
            let mut x1_vars = Vec::new();
            let mut trace = QPoly::zero();
            for i in 1..=n {
                for j in 1..=n {
                    let v = Var::new(&format!("x({},{})", i, j));
                    x1_vars.push(v);
                    x[(i - 1, j - 1)] = QPoly::var(v);
                    if i == j {
                        trace += QPoly::var(v);
                    }
                }
            }
            let u_vars: Vec<Var> = (1..=n).map(|i| Var::new(&format!("u({})", i))).collect();
            let v_vars: Vec<Var> = (1..=n).map(|i| Var::new(&format!("v({})", i))).collect();
            for i in 1..=n {
                x[(i - 1, n)] = QPoly::var(u_vars[i - 1]);
                x[(n + m - 1, i - 1)] = QPoly::var(v_vars[i - 1]);
            }
            let w_vars: Vec<Var> = (1..m).map(|k| Var::new(&format!("w({})", k))).collect();
            let fp = triple.f.powers(m);
            for k in 1..m {
                add_scaled(&mut x, &fp[k], &QPoly::var(w_vars[k - 1]));
            }
            let shift = trace.scale(&Scalar::new((-1).into(), (m as i64).into()));
            for j in n..d {
                x[(j, j)] = x[(j, j)].clone() + shift.clone();
            }
            let x1 = Matrix::from_fn(n, n, |i, j| x[(i, j)].clone());
            let x2 = Matrix::from_fn(m, m, |i, j| x[(n + i, n + j)].clone());
            Ok(SliceMatrix { kind, n, m, x, x1, x2, x1_vars, u_vars, v_vars, w_vars })
        }
    }
}

/// Invariants of a square symbolic matrix.
#[derive(Clone, Debug)]
pub struct CharInvariants {
    /// `F̃_k = tr Λ^k`: coefficient of `z^k` in `det(1 + zX)`, index 0..=kmax.
    pub f: Vec<QPoly>,
    /// `tr S^k`: coefficient of `z^k` in `det(1 - zX)^{-1}`, index 0..=kmax.
    pub s: Vec<QPoly>,
}

pub fn char_invariants(x: &Matrix<QPoly>, kmax: usize) -> CharInvariants {
    CharInvariants { f: char_coeffs(x, kmax), s: complete_coeffs(x, kmax) }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generating_subsets() {
        let gl = build_lie(LieKind::Gl, 3).unwrap();
        // E_12, E_21, E_23, E_32 and one diagonal element
        assert_eq!(gl.generating_subset().len(), 5);
        for n in 1..=3 {
            let sp = build_lie(LieKind::Sp, n).unwrap();
            let g = sp.generating_subset();
            assert!(g.len() <= 2 * n + 1, "sp_{}: {:?}", 2 * n, g);
        }
    }

    #[test]
    fn gl2_bracket() {
        let g = build_lie(LieKind::Gl, 2).unwrap();
        let e21 = g.index_of("E(2,1)").unwrap();
        let e12 = g.index_of("E(1,2)").unwrap();
        let br = g.bracket(e21, e12);
        let expect: Vec<(usize, Scalar)> =
            vec![(g.index_of("E(1,1)").unwrap(), int(-1)), (g.index_of("E(2,2)").unwrap(), int(1))];
        assert_eq!(br, &expect[..]);
    }

    #[test]
    fn dimensions_and_jacobi() {
        for n in 1..=3 {
            let g = build_lie(LieKind::Gl, n).unwrap();
            assert_eq!(g.dim(), n * n);
            assert!(g.check_jacobi().is_ok());
        }
        let sl3 = build_lie(LieKind::Sl, 3).unwrap();
        assert_eq!(sl3.dim(), 8);
        assert!(sl3.check_jacobi().is_ok());
        for a in 0..8 {
            for b in 0..8 {
                assert!(sl3.mat(a).commutator(sl3.mat(b)).trace().is_zero());
            }
        }
        for n in 1..=2 {
            let sp = build_lie(LieKind::Sp, n).unwrap();
            assert_eq!(sp.dim(), n * (2 * n + 1));
            assert!(sp.check_jacobi().is_ok());
            for b in 0..sp.dim() {
                assert!(is_sp_member(sp.mat(b)));
            }
        }
    }

    #[test]
    fn sp2_is_sl2() {
        // three-dimensional, perfect, with a rank-one Cartan
        let sp = build_lie(LieKind::Sp, 1).unwrap();
        assert_eq!(sp.dim(), 3);
        let rows: Vec<Vec<Scalar>> = (0..3)
            .flat_map(|a| (0..3).map(move |b| (a, b)))
            .map(|(a, b)| {
                let mut v = vec![Scalar::zero(); 3];
                for (k, c) in sp.bracket(a, b) {
                    v[*k] = c.clone();
                }
                v
            })
            .collect();
        assert_eq!(crate::exact::rank(&rows), 3);
    }

    #[test]
    fn dual_basis_pairs_to_identity() {
        for (kind, n) in [(LieKind::Gl, 2), (LieKind::Sl, 3), (LieKind::Sp, 2)] {
            let g = build_lie(kind, n).unwrap();
            for a in 0..g.dim() {
                for b in 0..g.dim() {
                    let t = g.mat(a).matmul(g.dual(b)).trace();
                    assert_eq!(t, if a == b { int(1) } else { int(0) });
                }
            }
        }
    }

    #[test]
    fn one_block_examples() {
        let t = one_block_nilpotent(LieKind::Sl, 1, 2).unwrap();
        assert_eq!(t.e, unit(3, 2, 3));
        assert_eq!(t.h, unit(3, 2, 2).sub(&unit(3, 3, 3)));
        assert_eq!(t.f, unit(3, 3, 2));
        let s = one_block_nilpotent(LieKind::Sp, 1, 1).unwrap();
        assert_eq!(s.e, unit(4, 2, 3));
        assert!(s.check());
        assert!(one_block_nilpotent(LieKind::Sl, 1, 1).is_err());
        assert_eq!(jordan_type(&one_block_nilpotent(LieKind::Sl, 2, 3).unwrap().e), vec![1, 1, 3]);
        assert_eq!(jordan_type(&one_block_nilpotent(LieKind::Sp, 1, 2).unwrap().e), vec![1, 1, 4]);
    }

    #[test]
    fn centralizer_dimensions() {
        let c = centralizer_basis(LieKind::Sl, 2, 2).unwrap();
        assert_eq!(c.dim(), 9);
        assert_eq!(centralizer_dim_bruteforce(LieKind::Sl, 2, 2).unwrap(), 9);
        let s = centralizer_basis(LieKind::Sp, 1, 1).unwrap();
        assert_eq!(s.dim(), 3 + 2 + 1);
        assert_eq!(centralizer_dim_bruteforce(LieKind::Sp, 1, 1).unwrap(), 6);
    }

    #[test]
    fn xi_basis_for_n1_m3() {
        let c = centralizer_basis(LieKind::Sl, 1, 3).unwrap();
        // xi(m-2) = E_{n+1,n+2} + E_{n+2,n+3}
        assert_eq!(c.get("xi(1)").unwrap().mat, unit(4, 2, 3).add(&unit(4, 3, 4)));
        assert_eq!(c.get("xi(0)").unwrap().mat, unit(4, 2, 4));
        let t = &c.t;
        assert!(t.trace().is_zero());
        assert_eq!(t[(0, 0)], Scalar::new(3.into(), 4.into()));
        assert_eq!(t[(1, 1)], Scalar::new((-1).into(), 4.into()));
    }

    #[test]
    fn slice_commutes_with_f() {
        for (kind, n, m) in [(LieKind::Sl, 2, 2), (LieKind::Sl, 1, 3), (LieKind::Sp, 1, 1), (LieKind::Sp, 1, 2)] {
            let s = slice_matrix(kind, n, m).unwrap();
            let t = one_block_nilpotent(kind, n, m).unwrap();
            let y = s.x.sub(&const_matrix(&t.e));
            let f = const_matrix(&t.f);
            assert!(y.commutator(&f).is_zero(), "{:?} {} {}", kind, n, m);
        }
    }

    #[test]
    fn slice_shape_n1_m2() {
        let s = slice_matrix(LieKind::Sl, 1, 2).unwrap();
        let x = &s.x;
        let xv = QPoly::named("x(1,1)");
        assert_eq!(x[(0, 0)], xv);
        assert_eq!(x[(0, 1)], QPoly::named("u(1)"));
        assert!(x[(0, 2)].is_zero());
        assert!(x[(1, 0)].is_zero());
        assert_eq!(x[(1, 2)], QPoly::one());
        assert_eq!(x[(2, 0)], QPoly::named("v(1)"));
        assert_eq!(x[(1, 1)], xv.scale(&Scalar::new((-1).into(), 2.into())));
        assert_eq!(x[(2, 1)], QPoly::named("w(1)"));
        assert!(x.trace().is_zero());
    }

    #[test]
    fn sp_slice_dimension() {
        let s = slice_matrix(LieKind::Sp, 1, 1).unwrap();
        assert_eq!(s.all_vars().len(), 4 + 2);
        // the spec counts q-coordinates as one per sp_2 basis element
        assert_eq!(s.x1_vars.len(), 3);
        let g = build_lie(LieKind::Sp, 2).unwrap();
        assert!(g.poly_coords(&s.x).is_some());
    }

    #[test]
    fn diag_char_invariants() {
        let d = Matrix::from_rows(vec![
            vec![QPoly::constant(int(1)), QPoly::zero()],
            vec![QPoly::zero(), QPoly::constant(int(2))],
        ]);
        let c = char_invariants(&d, 2);
        assert_eq!(c.f[1].as_constant(), Some(int(3)));
        assert_eq!(c.f[2].as_constant(), Some(int(2)));
        assert_eq!(c.s[2].as_constant(), Some(int(7)));
        // Σ_j (-1)^j trS^{2-j} trΛ^j = 7 - 9 + 2
        let e = &(&c.s[2] - &(&c.s[1] * &c.f[1])) + &c.f[2];
        assert!(e.is_zero());
    }
}
