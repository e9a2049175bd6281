use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use super::poly::Poly;
use super::scalar::{Coeff, Scalar};
use super::var::Var;
use super::ExactError;

/// Minimal ring interface for dense matrices.
pub trait Ring:
    Clone + PartialEq + Zero + One + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Neg<Output = Self>
{
}

impl<T> Ring for T where
    T: Clone + PartialEq + Zero + One + Add<Output = T> + Sub<Output = T> + Mul<Output = T> + Neg<Output = T>
{
}

/// Dense square-or-rectangular matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Ring> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        let r = rows.len();
        let c = rows.first().map(|x| x.len()).unwrap_or(0);
        assert!(rows.iter().all(|x| x.len() == c), "ragged rows");
        Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn map<U: Ring>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn scale(&self, c: &T) -> Self {
        self.map(|x| x.clone() * c.clone())
    }

    pub fn trace(&self) -> T {
        assert!(self.is_square());
        (0..self.rows).fold(T::zero(), |acc, i| acc + self[(i, i)].clone())
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "shape mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if b.is_zero() {
                        continue;
                    }
                    let v = out[(i, j)].clone() + a.clone() * b.clone();
                    out[(i, j)] = v;
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a.clone() + b.clone()).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a.clone() - b.clone()).collect(),
        }
    }

    pub fn commutator(&self, other: &Self) -> Self {
        self.matmul(other).sub(&other.matmul(self))
    }

    pub fn apply(&self, v: &[T]) -> Vec<T> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| (0..self.cols).fold(T::zero(), |acc, j| acc + self[(i, j)].clone() * v[j].clone()))
            .collect()
    }

    /// `[I, A, A², …, A^k]`.
    pub fn powers(&self, k: usize) -> Vec<Self> {
        let mut out = vec![Self::identity(self.rows)];
        for i in 0..k {
            let next = out[i].matmul(self);
            out.push(next);
        }
        out
    }
}

impl<T> std::ops::Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

impl<T: fmt::Display> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[")?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self.data[i * self.cols + j].to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

/// Coefficients `e_1..e_k` of `det(1 + zA) = Σ e_j z^j`, by Newton's identities
/// on the power traces (characteristic zero).
pub fn char_coeffs<C: Coeff>(a: &Matrix<Poly<C>>, k: usize) -> Vec<Poly<C>> {
    let powers = a.powers(k);
    let p: Vec<Poly<C>> = powers.iter().map(|m| m.trace()).collect();
    let mut e = vec![Poly::one()];
    for j in 1..=k {
        // j e_j = Σ_{i=1}^j (-1)^{i-1} e_{j-i} p_i
        let mut acc = Poly::new();
        for i in 1..=j {
            let t = &e[j - i] * &p[i];
            if i % 2 == 1 {
                acc += t;
            } else {
                acc -= t;
            }
        }
        let mut jj = C::zero();
        for _ in 0..j {
            jj = jj + C::one();
        }
        e.push(acc.scale(&(C::one() / jj)));
    }
    e
}

/// `h_0..h_k`, the complete symmetric functions of the eigenvalues
/// (`det(1 - zA)^{-1} = Σ h_j z^j`).
pub fn complete_coeffs<C: Coeff>(a: &Matrix<Poly<C>>, k: usize) -> Vec<Poly<C>> {
    let e = char_coeffs(a, k);
    let mut h: Vec<Poly<C>> = vec![Poly::one()];
    for j in 1..=k {
        // Σ_{i=0}^j (-1)^i e_i h_{j-i} = 0
        let mut acc = Poly::new();
        for i in 1..=j {
            let t = &e[i] * &h[j - i];
            if i % 2 == 1 {
                acc += t;
            } else {
                acc -= t;
            }
        }
        h.push(acc);
    }
    h
}

/// Rational Gaussian elimination. Square or overdetermined; the latter is
/// checked for consistency.
pub fn solve_linear(a: &[Vec<Scalar>], b: &[Scalar]) -> Result<Vec<Scalar>, ExactError> {
    solve_linear_generic(a, b)
}

pub fn solve_linear_generic<C: Coeff>(a: &[Vec<C>], b: &[C]) -> Result<Vec<C>, ExactError> {
    let rows = a.len();
    assert_eq!(rows, b.len(), "rhs length mismatch");
    let cols = a.first().map(|r| r.len()).unwrap_or(0);
    let mut m: Vec<Vec<C>> = a
        .iter()
        .zip(b)
        .map(|(r, x)| {
            let mut r = r.clone();
            r.push(x.clone());
            r
        })
        .collect();
    let pivots = row_reduce(&mut m, cols);
    let rank = pivots.len();
    for row in m.iter().skip(rank) {
        if !row[cols].is_zero() {
            return Err(ExactError::Inconsistent { rank, rows, cols });
        }
    }
    if rank < cols {
        return Err(ExactError::Singular { rank, rows, cols });
    }
    let mut x = vec![C::zero(); cols];
    for (r, &c) in pivots.iter().enumerate() {
        x[c] = m[r][cols].clone();
    }
    Ok(x)
}

/// Reduced row echelon form in place over the first `cols` columns; returns pivot columns.
pub fn row_reduce<C: Coeff>(m: &mut [Vec<C>], cols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r >= m.len() {
            break;
        }
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = C::one() / m[r][c].clone();
        for x in m[r].iter_mut() {
            *x = x.clone() * inv.clone();
        }
        for i in 0..m.len() {
            if i == r || m[i][c].is_zero() {
                continue;
            }
            let f = m[i][c].clone();
            let width = m[i].len();
            for j in c..width {
                let v = m[r][j].clone() * f.clone();
                m[i][j] = m[i][j].clone() - v;
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(a: &[Vec<Scalar>]) -> usize {
    let cols = a.first().map(|r| r.len()).unwrap_or(0);
    let mut m = a.to_vec();
    row_reduce(&mut m, cols).len()
}

/// Basis of `{x : A x = 0}`.
pub fn nullspace(a: &[Vec<Scalar>], cols: usize) -> Vec<Vec<Scalar>> {
    let mut m = a.to_vec();
    let pivots = row_reduce(&mut m, cols);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Scalar::zero(); cols];
            v[f] = Scalar::one();
            for (r, &p) in pivots.iter().enumerate() {
                v[p] = -m[r][f].clone();
            }
            v
        })
        .collect()
}

/// Solves a linear system whose unknowns are scalar coefficients and whose
/// equations are polynomial identities: `Σ_j x_j · cols[j] = rhs` coefficientwise.
pub fn solve_linear_poly(cols: &[Poly<Scalar>], rhs: &Poly<Scalar>) -> Result<Vec<Scalar>, ExactError> {
    let mut monos: Vec<_> = cols.iter().flat_map(|p| p.terms().map(|(m, _)| m.clone())).collect();
    monos.extend(rhs.terms().map(|(m, _)| m.clone()));
    monos.sort();
    monos.dedup();
    let a: Vec<Vec<Scalar>> = monos.iter().map(|m| cols.iter().map(|p| p.coeff(m)).collect()).collect();
    let b: Vec<Scalar> = monos.iter().map(|m| rhs.coeff(m)).collect();
    solve_linear(&a, &b)
}

/// Generic matrix `Σ_b var(b) · mat(b)` over polynomial coordinates.
pub fn generic_matrix(basis: &[Matrix<Scalar>], vars: &[Var]) -> Matrix<Poly<Scalar>> {
    assert_eq!(basis.len(), vars.len());
    let n = basis.first().map(|m| m.rows()).unwrap_or(0);
    let mut out: Matrix<Poly<Scalar>> = Matrix::zeros(n, n);
    for (b, v) in basis.iter().zip(vars) {
        let x: Poly<Scalar> = Poly::var(*v);
        for i in 0..n {
            for j in 0..n {
                if !b[(i, j)].is_zero() {
                    let t = out[(i, j)].clone() + x.scale(&b[(i, j)]);
                    out[(i, j)] = t;
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::scalar::{frac, int};

    #[test]
    fn diag_solve() {
        let a = vec![vec![int(2), int(0)], vec![int(0), int(4)]];
        let x = solve_linear(&a, &[int(1), int(1)]).unwrap();
        assert_eq!(x, vec![frac(1, 2), frac(1, 4)]);
        let id = vec![vec![int(1), int(0)], vec![int(0), int(1)]];
        assert_eq!(solve_linear(&id, &[int(3), int(-7)]).unwrap(), vec![int(3), int(-7)]);
    }

    #[test]
    fn singular_and_inconsistent() {
        let a = vec![vec![int(1), int(2)], vec![int(2), int(4)]];
        match solve_linear(&a, &[int(1), int(2)]) {
            Err(ExactError::Singular { rank, .. }) => assert_eq!(rank, 1),
            other => panic!("{:?}", other),
        }
        let over = vec![vec![int(1)], vec![int(1)]];
        assert!(matches!(solve_linear(&over, &[int(1), int(2)]), Err(ExactError::Inconsistent { .. })));
        assert_eq!(solve_linear(&over, &[int(5), int(5)]).unwrap(), vec![int(5)]);
    }

    #[test]
    fn char_invariants_of_diag() {
        let d = Matrix::from_rows(vec![
            vec![Poly::constant(int(1)), Poly::zero()],
            vec![Poly::zero(), Poly::constant(int(2))],
        ]);
        let e = char_coeffs(&d, 2);
        assert_eq!(e[1].as_constant(), Some(int(3)));
        assert_eq!(e[2].as_constant(), Some(int(2)));
        let h = complete_coeffs(&d, 2);
        assert_eq!(h[2].as_constant(), Some(int(7)));
    }

    #[test]
    fn nullspace_basis() {
        let a = vec![vec![int(1), int(1), int(0)]];
        let ns = nullspace(&a, 3);
        assert_eq!(ns.len(), 2);
        for v in ns {
            assert!((v[0].clone() + v[1].clone()).is_zero());
        }
    }
}
