//! Dense complex linear algebra for 2x2 and 4x4 matrices.
//!
//! Everything here is fixed-size: two-qubit density operators are 4x4 and
//! single-qubit marginals are 2x2. The Hermitian eigensolver is a cyclic
//! complex Jacobi iteration, which at this size is both simple and accurate
//! to a few ulps.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;
use thiserror::Error;

pub type Complex = Complex64;

/// Bloch vectors and other real 3-vectors.
pub type RealVector3 = [f64; 3];

/// Two-qubit correlation matrices `T_ij = Tr[rho (sigma_i ⊗ sigma_j)]`.
pub type RealMatrix3 = [[f64; 3]; 3];

/// Default tolerance on `max |H - H†|` for matrices treated as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-9;

/// Eigenvalues above `-CLAMP_TOL` are clamped to zero by [`hermitian_sqrt`].
pub const CLAMP_TOL: f64 = 1e-10;

const MAX_SWEEPS: usize = 64;

const ZERO: Complex = Complex::new(0.0, 0.0);
const ONE: Complex = Complex::new(1.0, 0.0);
const I: Complex = Complex::new(0.0, 1.0);

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QmatError {
    #[error("matrix is not Hermitian: max |H - H†| entry is {deviation:e} (tolerance {tol:e})")]
    NotHermitian { deviation: f64, tol: f64 },
    #[error("matrix has eigenvalue {eigenvalue:e} below -{tol:e}")]
    NegativeEigenvalue { eigenvalue: f64, tol: f64 },
    #[error("matrix has a non-finite entry")]
    NonFinite,
}

/// Dense 2x2 complex matrix, row-major.
#[derive(Clone, Copy, PartialEq)]
pub struct ComplexMatrix2(pub [[Complex; 2]; 2]);

/// Dense 4x4 complex matrix, row-major, in the computational basis
/// `|00>, |01>, |10>, |11>`.
#[derive(Clone, Copy, PartialEq)]
pub struct ComplexMatrix4(pub [[Complex; 4]; 4]);

impl ComplexMatrix2 {
    pub fn zeros() -> Self {
        Self([[ZERO; 2]; 2])
    }

    pub fn identity() -> Self {
        Self([[ONE, ZERO], [ZERO, ONE]])
    }

    pub fn trace(&self) -> Complex {
        self.0[0][0] + self.0[1][1]
    }

    pub fn scale(&self, k: Complex) -> Self {
        let mut out = *self;
        out.0.iter_mut().flatten().for_each(|z| *z *= k);
        out
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.0
            .iter()
            .flatten()
            .zip(other.0.iter().flatten())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

impl Add for ComplexMatrix2 {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let mut out = self;
        for i in 0..2 {
            for j in 0..2 {
                out.0[i][j] += rhs.0[i][j];
            }
        }
        out
    }
}

impl Sub for ComplexMatrix2 {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        let mut out = self;
        for i in 0..2 {
            for j in 0..2 {
                out.0[i][j] -= rhs.0[i][j];
            }
        }
        out
    }
}

impl fmt::Debug for ComplexMatrix2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.0.iter()).finish()
    }
}

impl ComplexMatrix4 {
    pub fn zeros() -> Self {
        Self([[ZERO; 4]; 4])
    }

    pub fn identity() -> Self {
        Self::from_diagonal([1.0; 4])
    }

    pub fn from_diagonal(d: [f64; 4]) -> Self {
        let mut m = Self::zeros();
        for (i, &x) in d.iter().enumerate() {
            m.0[i][i] = Complex::new(x, 0.0);
        }
        m
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros();
        for i in 0..4 {
            for j in 0..4 {
                out.0[i][j] = self.0[j][i].conj();
            }
        }
        out
    }

    /// Entrywise complex conjugate (not the adjoint).
    pub fn conj(&self) -> Self {
        let mut out = *self;
        out.0.iter_mut().flatten().for_each(|z| *z = z.conj());
        out
    }

    pub fn trace(&self) -> Complex {
        (0..4).map(|i| self.0[i][i]).sum()
    }

    pub fn scale(&self, k: Complex) -> Self {
        let mut out = *self;
        out.0.iter_mut().flatten().for_each(|z| *z *= k);
        out
    }

    /// `max_ij |A_ij - B_ij|`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.0
            .iter()
            .flatten()
            .zip(other.0.iter().flatten())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `max_ij |H_ij - conj(H_ji)|`.
    pub fn hermiticity_deviation(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    /// `(H + H†) / 2`.
    pub fn hermitian_part(&self) -> Self {
        let mut out = *self;
        for i in 0..4 {
            out.0[i][i] = Complex::new(self.0[i][i].re, 0.0);
            for j in (i + 1)..4 {
                let z = (self.0[i][j] + self.0[j][i].conj()) * 0.5;
                out.0[i][j] = z;
                out.0[j][i] = z.conj();
            }
        }
        out
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flatten().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Kronecker product `a ⊗ b`; the first factor acts on qubit A.
    pub fn kron(a: &ComplexMatrix2, b: &ComplexMatrix2) -> Self {
        let mut out = Self::zeros();
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    for l in 0..2 {
                        out.0[2 * i + k][2 * j + l] = a.0[i][j] * b.0[k][l];
                    }
                }
            }
        }
        out
    }
}

impl Index<(usize, usize)> for ComplexMatrix4 {
    type Output = Complex;
    fn index(&self, (i, j): (usize, usize)) -> &Complex {
        &self.0[i][j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix4 {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex {
        &mut self.0[i][j]
    }
}

impl Add for ComplexMatrix4 {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let mut out = self;
        for i in 0..4 {
            for j in 0..4 {
                out.0[i][j] += rhs.0[i][j];
            }
        }
        out
    }
}

impl Sub for ComplexMatrix4 {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        let mut out = self;
        for i in 0..4 {
            for j in 0..4 {
                out.0[i][j] -= rhs.0[i][j];
            }
        }
        out
    }
}

impl Neg for ComplexMatrix4 {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale(-ONE)
    }
}

impl Mul for ComplexMatrix4 {
    type Output = Self;
    #[allow(clippy::op_ref)]
    fn mul(self, rhs: Self) -> Self {
        &self * &rhs
    }
}

impl<'a> Mul<&'a ComplexMatrix4> for &'a ComplexMatrix4 {
    type Output = ComplexMatrix4;
    fn mul(self, rhs: &ComplexMatrix4) -> ComplexMatrix4 {
        let mut out = ComplexMatrix4::zeros();
        for i in 0..4 {
            for k in 0..4 {
                let a = self.0[i][k];
                if a == ZERO {
                    continue;
                }
                for j in 0..4 {
                    out.0[i][j] += a * rhs.0[k][j];
                }
            }
        }
        out
    }
}

impl fmt::Debug for ComplexMatrix4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.0.iter()).finish()
    }
}

/// Eigen-decomposition of a Hermitian 4x4 matrix.
///
/// `values` are sorted in decreasing order; column `k` of `vectors` is the
/// unit eigenvector belonging to `values[k]`.
#[derive(Debug, Clone, Copy)]
pub struct HermitianEigen {
    pub values: [f64; 4],
    pub vectors: ComplexMatrix4,
}

fn check_hermitian(h: &ComplexMatrix4, tol: f64) -> Result<(), QmatError> {
    if !h.is_finite() {
        return Err(QmatError::NonFinite);
    }
    let deviation = h.hermiticity_deviation();
    if deviation > tol {
        return Err(QmatError::NotHermitian { deviation, tol });
    }
    Ok(())
}

/// Off-diagonal Frobenius mass `sum_{i != j} |a_ij|^2`.
fn off_diagonal(a: &ComplexMatrix4) -> f64 {
    let mut s = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            if i != j {
                s += a.0[i][j].norm_sqr();
            }
        }
    }
    s
}

/// Cyclic Jacobi sweeps on the Hermitian part of `h`. When `vectors` is
/// given, the accumulated unitary is multiplied into it.
fn jacobi(h: &ComplexMatrix4, mut vectors: Option<&mut ComplexMatrix4>) -> [f64; 4] {
    let mut a = h.hermitian_part();
    let total: f64 = a.0.iter().flatten().map(|z| z.norm_sqr()).sum();
    if total == 0.0 {
        return [0.0; 4];
    }
    let threshold = (1e-15 * 1e-15) * total;

    for _ in 0..MAX_SWEEPS {
        if off_diagonal(&a) <= threshold {
            break;
        }
        for p in 0..3 {
            for q in (p + 1)..4 {
                let apq = a.0[p][q];
                let g = apq.norm();
                if g == 0.0 {
                    continue;
                }
                let phase = apq / g;
                let app = a.0[p][p].re;
                let aqq = a.0[q][q].re;
                let theta = (aqq - app) / (2.0 * g);
                let t = if theta.is_finite() && theta.abs() < 1e150 {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                } else {
                    0.5 / theta
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;

                // U = I except U_pp = c, U_pq = s, U_qp = -s e*, U_qq = c e*.
                let e_conj = phase.conj();
                let u_qp = -e_conj * s;
                let u_qq = e_conj * c;

                // A <- A U (columns p, q).
                for row in a.0.iter_mut() {
                    let x = row[p];
                    let y = row[q];
                    row[p] = x * c + y * u_qp;
                    row[q] = x * s + y * u_qq;
                }
                // A <- U† A (rows p, q).
                let (rp, rq) = (a.0[p], a.0[q]);
                for k in 0..4 {
                    a.0[p][k] = rp[k] * c + rq[k] * u_qp.conj();
                    a.0[q][k] = rp[k] * s + rq[k] * u_qq.conj();
                }
                a.0[p][q] = ZERO;
                a.0[q][p] = ZERO;
                a.0[p][p].im = 0.0;
                a.0[q][q].im = 0.0;

                if let Some(v) = vectors.as_deref_mut() {
                    for row in v.0.iter_mut() {
                        let x = row[p];
                        let y = row[q];
                        row[p] = x * c + y * u_qp;
                        row[q] = x * s + y * u_qq;
                    }
                }
            }
        }
    }
    [a.0[0][0].re, a.0[1][1].re, a.0[2][2].re, a.0[3][3].re]
}

/// Indices that sort `values` in decreasing order, ties kept in input order.
fn descending_order(values: &[f64; 4]) -> [usize; 4] {
    let mut idx = [0, 1, 2, 3];
    idx.sort_by(|&i, &j| values[j].total_cmp(&values[i]));
    idx
}

/// Eigenvalues and eigenvectors of a Hermitian matrix.
pub fn hermitian_eigen(h: &ComplexMatrix4, tol: f64) -> Result<HermitianEigen, QmatError> {
    check_hermitian(h, tol)?;
    let mut v = ComplexMatrix4::identity();
    let raw = jacobi(h, Some(&mut v));
    let order = descending_order(&raw);
    let mut values = [0.0; 4];
    let mut vectors = ComplexMatrix4::zeros();
    for (k, &src) in order.iter().enumerate() {
        values[k] = raw[src];
        for row in 0..4 {
            vectors.0[row][k] = v.0[row][src];
        }
    }
    Ok(HermitianEigen { values, vectors })
}

/// Eigenvalues of a Hermitian matrix in decreasing order.
pub fn hermitian_eigenvalues(h: &ComplexMatrix4, tol: f64) -> Result<[f64; 4], QmatError> {
    check_hermitian(h, tol)?;
    let raw = jacobi(h, None);
    let order = descending_order(&raw);
    Ok(order.map(|i| raw[i]))
}

/// Schatten 1-norm `sum_i |lambda_i|` of a Hermitian matrix.
pub fn trace_norm_hermitian(m: &ComplexMatrix4, tol: f64) -> Result<f64, QmatError> {
    Ok(hermitian_eigenvalues(m, tol)?.iter().map(|x| x.abs()).sum())
}

/// Positive square root of a positive semidefinite Hermitian matrix.
///
/// Eigenvalues in `[-tol, 0)` are treated as round-off and clamped to zero;
/// anything more negative is rejected.
pub fn hermitian_sqrt(h: &ComplexMatrix4, tol: f64) -> Result<ComplexMatrix4, QmatError> {
    let eig = hermitian_eigen(h, tol)?;
    let min = eig.values[3];
    if min < -tol {
        return Err(QmatError::NegativeEigenvalue { eigenvalue: min, tol });
    }
    let roots = eig.values.map(|x| x.max(0.0).sqrt());
    let v = &eig.vectors;
    let mut s = ComplexMatrix4::zeros();
    for i in 0..4 {
        for j in 0..4 {
            s.0[i][j] = (0..4).map(|k| v.0[i][k] * roots[k] * v.0[j][k].conj()).sum();
        }
    }
    Ok(s.hermitian_part())
}

/// The subsystem that is traced out.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    A,
    B,
}

/// Partial trace over `traced`, returning the reduced state of the other qubit.
pub fn partial_trace(m: &ComplexMatrix4, traced: Subsystem) -> ComplexMatrix2 {
    let mut out = ComplexMatrix2::zeros();
    for i in 0..2 {
        for j in 0..2 {
            out.0[i][j] = match traced {
                Subsystem::B => m.0[2 * i][2 * j] + m.0[2 * i + 1][2 * j + 1],
                Subsystem::A => m.0[i][j] + m.0[2 + i][2 + j],
            };
        }
    }
    out
}

/// Single-qubit Pauli operators; `I` is the identity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    /// `0 -> I`, `1 -> X`, `2 -> Y`, `3 -> Z`.
    pub fn from_index(i: usize) -> Option<Pauli> {
        Self::ALL.get(i).copied()
    }

    pub fn matrix(self) -> ComplexMatrix2 {
        match self {
            Pauli::I => ComplexMatrix2::identity(),
            Pauli::X => ComplexMatrix2([[ZERO, ONE], [ONE, ZERO]]),
            Pauli::Y => ComplexMatrix2([[ZERO, -I], [I, ZERO]]),
            Pauli::Z => ComplexMatrix2([[ONE, ZERO], [ZERO, -ONE]]),
        }
    }
}

/// `sigma_a ⊗ sigma_b`.
pub fn pauli_tensor(a: Pauli, b: Pauli) -> ComplexMatrix4 {
    ComplexMatrix4::kron(&a.matrix(), &b.matrix())
}

/// `Tr(rho * op)`.
pub fn expectation(rho: &ComplexMatrix4, op: &ComplexMatrix4) -> Complex {
    let mut s = ZERO;
    for i in 0..4 {
        for k in 0..4 {
            s += rho.0[i][k] * op.0[k][i];
        }
    }
    s
}
