//! Scalars and dense self-adjoint matrices over ℝ, ℂ and ℍ.
//!
//! Every entry is stored as a [`Quaternion`]; real and complex matrices simply
//! keep the unused imaginary components at zero, which the
//! [`DivisionAlgebra`] tag enforces.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DivisionAlgebra {
    Real,
    Complex,
    Quaternion,
}

impl DivisionAlgebra {
    pub const ALL: [DivisionAlgebra; 3] = [Self::Real, Self::Complex, Self::Quaternion];

    /// Number of real components per entry.
    pub fn components(self) -> usize {
        match self {
            Self::Real => 1,
            Self::Complex => 2,
            Self::Quaternion => 4,
        }
    }

    /// Divisor applied to i.i.d. unit-variance components so that an entry
    /// has unit second absolute moment.
    pub fn normalization(self) -> f64 {
        (self.components() as f64).sqrt()
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Real => "real",
            Self::Complex => "complex",
            Self::Quaternion => "quaternion",
        }
    }
}

impl fmt::Display for DivisionAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// `re + i·i + j·j + k·k` with `i² = j² = k² = ijk = −1`.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Quaternion<T> {
    pub re: T,
    pub i: T,
    pub j: T,
    pub k: T,
}

impl<T: Real> Quaternion<T> {
    pub fn new(re: T, i: T, j: T, k: T) -> Self {
        Self { re, i, j, k }
    }

    pub fn zero() -> Self {
        Self::real(T::zero())
    }

    pub fn real(re: T) -> Self {
        Self::new(re, T::zero(), T::zero(), T::zero())
    }

    pub fn complex(re: T, im: T) -> Self {
        Self::new(re, im, T::zero(), T::zero())
    }

    pub fn conj(self) -> Self {
        Self::new(self.re, -self.i, -self.j, -self.k)
    }

    pub fn norm_sqr(self) -> T {
        self.re * self.re + self.i * self.i + self.j * self.j + self.k * self.k
    }

    pub fn abs(self) -> T {
        self.norm_sqr().sqrt()
    }

    pub fn scale(self, s: T) -> Self {
        Self::new(self.re * s, self.i * s, self.j * s, self.k * s)
    }

    /// Smallest algebra containing this value.
    pub fn algebra(self) -> DivisionAlgebra {
        if !self.j.is_zero() || !self.k.is_zero() {
            DivisionAlgebra::Quaternion
        } else if !self.i.is_zero() {
            DivisionAlgebra::Complex
        } else {
            DivisionAlgebra::Real
        }
    }

    pub fn is_real(self) -> bool {
        self.algebra() == DivisionAlgebra::Real
    }

    /// Writes `q = a + b·j` with `a, b ∈ ℂ`.
    pub fn symplectic_parts(self) -> (Complex<T>, Complex<T>) {
        (Complex::new(self.re, self.i), Complex::new(self.j, self.k))
    }

    pub fn to_complex(self) -> Complex<T> {
        Complex::new(self.re, self.i)
    }
}

impl<T: Real> Add for Quaternion<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.re + o.re, self.i + o.i, self.j + o.j, self.k + o.k)
    }
}

impl<T: Real> Sub for Quaternion<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.re - o.re, self.i - o.i, self.j - o.j, self.k - o.k)
    }
}

impl<T: Real> Neg for Quaternion<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.re, -self.i, -self.j, -self.k)
    }
}

impl<T: Real> Mul for Quaternion<T> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let (a1, b1, c1, d1) = (self.re, self.i, self.j, self.k);
        let (a2, b2, c2, d2) = (o.re, o.i, o.j, o.k);
        Self::new(
            a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
            a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
            a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
            a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
        )
    }
}

/// Row-major rectangular matrix of algebra-tagged entries.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix<T> {
    rows: usize,
    cols: usize,
    algebra: DivisionAlgebra,
    data: Vec<Quaternion<T>>,
}

impl<T: Real> DenseMatrix<T> {
    pub fn from_fn(
        rows: usize,
        cols: usize,
        algebra: DivisionAlgebra,
        mut f: impl FnMut(usize, usize) -> Quaternion<T>,
    ) -> Result<Self> {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                let v = f(r, c);
                if v.algebra().components() > algebra.components() {
                    return Err(Error::Invariant(format!(
                        "entry ({r},{c}) = {v:?} does not lie in {algebra}"
                    )));
                }
                data.push(v);
            }
        }
        Ok(Self {
            rows,
            cols,
            algebra,
            data,
        })
    }

    pub fn from_rows(algebra: DivisionAlgebra, rows: &[Vec<Quaternion<T>>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        Self::from_fn(rows.len(), cols, algebra, |r, c| rows[r][c])
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let q: Vec<Vec<_>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| Quaternion::real(T::of(x))).collect())
            .collect();
        Self::from_rows(DivisionAlgebra::Real, &q)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn algebra(&self) -> DivisionAlgebra {
        self.algebra
    }

    pub fn get(&self, r: usize, c: usize) -> Quaternion<T> {
        self.data[r * self.cols + c]
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// `result[i][j] = conj(input[j][i])`.
    pub fn conjugate_transpose(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::Dimension(format!(
                "conjugate transpose needs a square matrix, got {}x{}",
                self.rows, self.cols
            )));
        }
        Self::from_fn(self.cols, self.rows, self.algebra, |r, c| self.get(c, r).conj())
    }

    /// First entry breaking self-adjointness, if any.
    fn hermitian_violation(&self) -> Option<String> {
        if !self.is_square() {
            return Some(format!("{}x{} is not square", self.rows, self.cols));
        }
        for r in 0..self.rows {
            if !self.get(r, r).is_real() {
                return Some(format!("diagonal entry {r} has imaginary components"));
            }
            for c in (r + 1)..self.cols {
                if self.get(r, c) != self.get(c, r).conj() {
                    return Some(format!("entry ({r},{c}) is not the conjugate of ({c},{r})"));
                }
            }
        }
        None
    }
}

/// Dense self-adjoint matrix. Construction checks `m[i][j] = conj(m[j][i])`
/// exactly.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix<T> {
    dense: DenseMatrix<T>,
}

impl<T: Real> HermitianMatrix<T> {
    pub fn new(dense: DenseMatrix<T>) -> Result<Self> {
        match dense.hermitian_violation() {
            Some(msg) => Err(Error::Invariant(msg)),
            None => Ok(Self { dense }),
        }
    }

    /// Builds a matrix from its upper triangle (`i <= j`); the lower triangle
    /// is the conjugate mirror and the diagonal keeps only its real part.
    pub fn from_upper(
        n: usize,
        algebra: DivisionAlgebra,
        mut upper: impl FnMut(usize, usize) -> Quaternion<T>,
    ) -> Result<Self> {
        let mut data = vec![Quaternion::zero(); n * n];
        for i in 0..n {
            for j in i..n {
                let v = upper(i, j);
                if v.algebra().components() > algebra.components() {
                    return Err(Error::Invariant(format!(
                        "entry ({i},{j}) = {v:?} does not lie in {algebra}"
                    )));
                }
                if i == j {
                    data[i * n + i] = Quaternion::real(v.re);
                } else {
                    data[i * n + j] = v;
                    data[j * n + i] = v.conj();
                }
            }
        }
        Ok(Self {
            dense: DenseMatrix {
                rows: n,
                cols: n,
                algebra,
                data,
            },
        })
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        Self::new(DenseMatrix::from_real_rows(rows)?)
    }

    pub fn identity(n: usize) -> Self {
        Self::from_upper(n, DivisionAlgebra::Real, |i, j| {
            Quaternion::real(if i == j { T::one() } else { T::zero() })
        })
        .expect("identity is real symmetric")
    }

    pub fn zeros(n: usize, algebra: DivisionAlgebra) -> Self {
        Self::from_upper(n, algebra, |_, _| Quaternion::zero()).expect("zero is self-adjoint")
    }

    pub fn dim(&self) -> usize {
        self.dense.rows
    }

    pub fn algebra(&self) -> DivisionAlgebra {
        self.dense.algebra
    }

    pub fn get(&self, r: usize, c: usize) -> Quaternion<T> {
        self.dense.get(r, c)
    }

    pub fn as_dense(&self) -> &DenseMatrix<T> {
        &self.dense
    }

    pub fn into_dense(self) -> DenseMatrix<T> {
        self.dense
    }

    pub fn trace(&self) -> T {
        (0..self.dim()).fold(T::zero(), |acc, i| acc + self.get(i, i).re)
    }

    /// Same matrix with a wider algebra tag.
    pub fn promote(&self, algebra: DivisionAlgebra) -> Result<Self> {
        if algebra.components() < self.algebra().components() {
            return Err(Error::AlgebraMismatch {
                expected: algebra,
                found: self.algebra(),
            });
        }
        let mut dense = self.dense.clone();
        dense.algebra = algebra;
        Ok(Self { dense })
    }

    /// Entrywise sum; the result lives in the wider of the two algebras.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::Parameter(format!(
                "cannot add {0}x{0} and {1}x{1} matrices",
                self.dim(),
                other.dim()
            )));
        }
        let algebra = if self.algebra().components() >= other.algebra().components() {
            self.algebra()
        } else {
            other.algebra()
        };
        Self::from_upper(self.dim(), algebra, |i, j| self.get(i, j) + other.get(i, j))
    }

    pub fn scale(&self, s: T) -> Self {
        Self::from_upper(self.dim(), self.algebra(), |i, j| self.get(i, j).scale(s))
            .expect("scaling keeps the algebra")
    }

    pub fn to_real_matrix(&self) -> Result<DMatrix<T>> {
        if self.algebra() != DivisionAlgebra::Real {
            return Err(Error::AlgebraMismatch {
                expected: DivisionAlgebra::Real,
                found: self.algebra(),
            });
        }
        let n = self.dim();
        Ok(DMatrix::from_fn(n, n, |r, c| self.get(r, c).re))
    }

    pub fn to_complex_matrix(&self) -> Result<DMatrix<Complex<T>>> {
        if self.algebra() == DivisionAlgebra::Quaternion {
            return Err(Error::AlgebraMismatch {
                expected: DivisionAlgebra::Complex,
                found: self.algebra(),
            });
        }
        let n = self.dim();
        Ok(DMatrix::from_fn(n, n, |r, c| self.get(r, c).to_complex()))
    }

    /// See [`complex_embed`].
    pub fn complex_embed(&self) -> Result<Self> {
        complex_embed(&self.dense)
    }
}

/// Maps a quaternion self-adjoint `N×N` matrix to a complex Hermitian `2N×2N`
/// matrix. Entry `q = a + b·j` (with `a, b ∈ ℂ`) becomes the block
/// `[[a, b], [−b̄, ā]]`; every eigenvalue of the input appears twice in the
/// output.
pub fn complex_embed<T: Real>(m: &DenseMatrix<T>) -> Result<HermitianMatrix<T>> {
    if m.algebra() != DivisionAlgebra::Quaternion {
        return Err(Error::AlgebraMismatch {
            expected: DivisionAlgebra::Quaternion,
            found: m.algebra(),
        });
    }
    if !m.is_square() {
        return Err(Error::Dimension(format!(
            "complex embedding needs a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let embedded = DenseMatrix::from_fn(2 * m.rows(), 2 * m.cols(), DivisionAlgebra::Complex, |r, c| {
        let (a, b) = m.get(r / 2, c / 2).symplectic_parts();
        let z = match (r % 2, c % 2) {
            (0, 0) => a,
            (0, 1) => b,
            (1, 0) => -b.conj(),
            _ => a.conj(),
        };
        Quaternion::complex(z.re, z.im)
    })?;
    HermitianMatrix::new(embedded)
}
