//! Dense complex linear algebra for small Hermitian problems.
//!
//! Everything in this module is sized for the 6x6 (and smaller) matrices of
//! the qubit-qutrit battery: Kronecker products, a cyclic Jacobi
//! eigendecomposition for complex Hermitian matrices, functions of Hermitian
//! matrices via spectral calculus, the trace norm, and the partial transpose
//! over the qubit factor of a 2x3 bipartition.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Default absolute tolerance for Hermiticity checks on matrix entries.
pub const HERMITICITY_TOL: f64 = 1e-10;

/// Sweep budget for the cyclic Jacobi eigensolver.
pub const JACOBI_SWEEP_BUDGET: usize = 100;

/// Convergence threshold: off-diagonal Frobenius norm relative to the full
/// Frobenius norm of the input.
pub const JACOBI_REL_OFF_NORM: f64 = 1e-13;

/// Dense row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex64::ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::ONE;
        }
        m
    }

    /// Build from a closure over (row, col).
    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    /// Square matrix with the given real diagonal.
    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = Complex64::new(d, 0.0);
        }
        m
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

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn trace(&self) -> Complex64 {
        debug_assert!(self.is_square());
        (0..self.rows).map(|i| self[(i, i)]).sum()
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a + b)
            .collect();
        Self {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a - b)
            .collect();
        Self {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a * factor).collect(),
        }
    }

    pub fn scale_real(&self, factor: f64) -> Self {
        self.scale(Complex64::new(factor, 0.0))
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "dimension mismatch in matmul");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == Complex64::ZERO {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    /// U * self * U^dagger.
    pub fn conjugate_by(&self, u: &Self) -> Self {
        u.matmul(self).matmul(&u.dagger())
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise |a - b|.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Max `|M[i][j] - conj(M[j][i])|` over all entries.
    pub fn hermiticity_deviation(&self) -> f64 {
        debug_assert!(self.is_square());
        let mut dev: f64 = 0.0;
        for i in 0..self.rows {
            for j in i..self.cols {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        dev
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.is_square() && self.hermiticity_deviation() <= tol
    }

    /// (M + M^dagger) / 2.
    pub fn symmetrized(&self) -> Self {
        self.add(&self.dagger()).scale_real(0.5)
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Eigenvalues (ascending) and the unitary of column eigenvectors of a
/// Hermitian matrix.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl EigenSystem {
    /// Reassemble V f(Lambda) V^dagger.
    pub fn apply(&self, f: impl Fn(f64) -> Complex64) -> ComplexMatrix {
        let n = self.eigenvalues.len();
        let v = &self.eigenvectors;
        let mut out = ComplexMatrix::zeros(n, n);
        for k in 0..n {
            let fk = f(self.eigenvalues[k]);
            if fk == Complex64::ZERO {
                continue;
            }
            for i in 0..n {
                let vik = v[(i, k)];
                for j in 0..n {
                    out[(i, j)] += fk * vik * v[(j, k)].conj();
                }
            }
        }
        out
    }
}

/// Kronecker product a (x) b.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(a.rows() * b.rows(), a.cols() * b.cols());
    for ia in 0..a.rows() {
        for ja in 0..a.cols() {
            let f = a[(ia, ja)];
            if f == Complex64::ZERO {
                continue;
            }
            for ib in 0..b.rows() {
                for jb in 0..b.cols() {
                    out[(ia * b.rows() + ib, ja * b.cols() + jb)] = f * b[(ib, jb)];
                }
            }
        }
    }
    out
}

/// Eigendecomposition of a complex Hermitian matrix by cyclic Jacobi
/// rotations.
///
/// The input must be Hermitian within `tol` (entrywise); it is symmetrized
/// before the sweeps. Eigenvalues are sorted ascending with ties kept in
/// original column order.
pub fn hermitian_eig(m: &ComplexMatrix, tol: f64) -> Result<EigenSystem> {
    if !m.is_square() {
        return Err(Error::WrongDimension {
            expected_rows: m.rows(),
            expected_cols: m.rows(),
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let deviation = m.hermiticity_deviation();
    if deviation > tol {
        return Err(Error::NotHermitian {
            deviation,
            tolerance: tol,
        });
    }

    let n = m.rows();
    let mut a = m.symmetrized();
    let mut v = ComplexMatrix::identity(n);

    let full_norm = a.frobenius_norm();
    let threshold = JACOBI_REL_OFF_NORM * full_norm;

    let mut converged = full_norm == 0.0 || off_diagonal_norm(&a) <= threshold;
    let mut sweeps = 0;
    while !converged {
        if sweeps == JACOBI_SWEEP_BUDGET {
            return Err(Error::NoConvergence {
                sweeps,
                off_norm: off_diagonal_norm(&a),
            });
        }
        for p in 0..n {
            for q in (p + 1)..n {
                jacobi_rotate(&mut a, &mut v, p, q);
            }
        }
        sweeps += 1;
        converged = off_diagonal_norm(&a) <= threshold;
    }

    // Stable ascending sort of (eigenvalue, column).
    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    order.sort_by(|&i, &j| diag[i].partial_cmp(&diag[j]).unwrap().then(i.cmp(&j)));

    let eigenvalues: Vec<f64> = order.iter().map(|&i| diag[i]).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, n, |i, j| v[(i, order[j])]);

    Ok(EigenSystem {
        eigenvalues,
        eigenvectors,
    })
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.rows();
    let mut sum = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                sum += a[(i, j)].norm_sqr();
            }
        }
    }
    sum.sqrt()
}

/// One complex Jacobi rotation zeroing a[(p, q)].
///
/// The pivot is phased real with diag(1, e^{-i arg}) and then rotated with
/// the classic stable tangent formula; the combined unitary is accumulated
/// into `v`.
fn jacobi_rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let r = apq.norm();
    if r == 0.0 {
        return;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let phase = apq / r; // e^{i phi}

    let tau = (aqq - app) / (2.0 * r);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    // R = I except R[p][p] = c, R[p][q] = s, R[q][p] = -s conj(phase),
    // R[q][q] = c conj(phase); A <- R^dagger A R, V <- V R.
    let ph = phase.conj();
    let n = a.rows();

    for i in 0..n {
        let aip = a[(i, p)];
        let aiq = a[(i, q)];
        a[(i, p)] = aip * c - aiq * s * ph;
        a[(i, q)] = aip * s + aiq * c * ph;
    }
    for j in 0..n {
        let apj = a[(p, j)];
        let aqj = a[(q, j)];
        a[(p, j)] = apj * c - aqj * s * ph.conj();
        a[(q, j)] = apj * s + aqj * c * ph.conj();
    }
    for i in 0..n {
        let vip = v[(i, p)];
        let viq = v[(i, q)];
        v[(i, p)] = vip * c - viq * s * ph;
        v[(i, q)] = vip * s + viq * c * ph;
    }

    // Kill rotation round-off exactly where the rotation is exact.
    a[(p, q)] = Complex64::ZERO;
    a[(q, p)] = Complex64::ZERO;
    a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);
}

/// V f(Lambda) V^dagger for a Hermitian matrix.
///
/// For a real-valued `f` the result is Hermitian; for f = exp(-i lambda t)
/// it is unitary.
pub fn hermitian_func(m: &ComplexMatrix, f: impl Fn(f64) -> Complex64) -> Result<ComplexMatrix> {
    let eig = hermitian_eig(m, HERMITICITY_TOL)?;
    Ok(eig.apply(f))
}

/// Trace norm of a Hermitian matrix: sum of |eigenvalue|.
pub fn trace_norm(m: &ComplexMatrix) -> Result<f64> {
    let eig = hermitian_eig(m, HERMITICITY_TOL)?;
    Ok(eig.eigenvalues.iter().map(|l| l.abs()).sum())
}

/// Partial transpose over the qubit factor of a 6x6 matrix indexed as
/// row = 3*a + b with qubit a in {0,1} and qutrit b in {0,1,2}.
///
/// out[(a', b), (a, b')] = in[(a, b), (a', b')]; the operation is an entry
/// permutation, so the trace is preserved exactly.
pub fn partial_transpose_qubit(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    if m.rows() != 6 || m.cols() != 6 {
        return Err(Error::WrongDimension {
            expected_rows: 6,
            expected_cols: 6,
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let mut out = ComplexMatrix::zeros(6, 6);
    for a in 0..2 {
        for ap in 0..2 {
            for b in 0..3 {
                for bp in 0..3 {
                    out[(3 * ap + b, 3 * a + bp)] = m[(3 * a + b, 3 * ap + bp)];
                }
            }
        }
    }
    Ok(out)
}
