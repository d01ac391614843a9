//! Dense complex matrix primitives.
//!
//! Matrices are plain [`nalgebra::DMatrix`] values over `Complex64`. Storage is
//! column-major, which makes [`vec_op`] a copy of the backing slice.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
pub use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

pub type ComplexMatrix = DMatrix<C64>;
pub type StateVector = DVector<C64>;

/// Numerical thresholds used across the crate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerance {
    /// Absolute threshold for "is zero" tests on O(1) quantities.
    pub zero_abs: f64,
    /// Singular values below `rank_rel * sigma_max` count as zero.
    pub rank_rel: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self { zero_abs: 1e-9, rank_rel: 1e-12 }
    }
}

impl Tolerance {
    pub fn new(zero_abs: f64, rank_rel: f64) -> Result<Self> {
        if !(zero_abs >= 0.0 && rank_rel >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "tolerances must be non-negative, got zero_abs={zero_abs}, rank_rel={rank_rel}"
            )));
        }
        Ok(Self { zero_abs, rank_rel })
    }

    pub fn with_zero_abs(self, zero_abs: f64) -> Self {
        Self { zero_abs, ..self }
    }

    /// `zero_abs` scaled by `max(1, scale)`.
    pub fn scaled(&self, scale: f64) -> f64 {
        self.zero_abs * scale.max(1.0)
    }
}

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Primitive `d`-th root of unity `e^{2πi/d}`.
pub fn omega(d: usize) -> C64 {
    C64::from_polar(1.0, 2.0 * PI / d as f64)
}

pub fn identity(d: usize) -> ComplexMatrix {
    ComplexMatrix::identity(d, d)
}

/// Largest entry modulus, `‖M‖_max`.
pub fn max_abs(m: &ComplexMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `‖A − B‖_max`; panics on shape mismatch.
pub fn max_abs_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub fn is_finite(m: &ComplexMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

pub(crate) fn ensure_square(m: &ComplexMatrix) -> Result<usize> {
    if m.is_square() {
        Ok(m.nrows())
    } else {
        Err(Error::NotSquare { rows: m.nrows(), cols: m.ncols() })
    }
}

/// The von Neumann measurement map: keeps the diagonal, zeros the rest.
pub fn delta_map(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    ensure_square(m)?;
    Ok(ComplexMatrix::from_diagonal(&m.diagonal()))
}

/// Stacks the columns of `a` top to bottom.
pub fn vec_op(a: &ComplexMatrix) -> StateVector {
    StateVector::from_column_slice(a.as_slice())
}

/// Inverse of [`vec_op`] for a `rows × cols` target.
pub fn unvec(v: &StateVector, rows: usize, cols: usize) -> Result<ComplexMatrix> {
    if v.len() != rows * cols {
        return Err(Error::Shape(format!("cannot reshape length {} into {rows}x{cols}", v.len())));
    }
    Ok(ComplexMatrix::from_column_slice(rows, cols, v.as_slice()))
}

/// The maximally entangled state `vec(I_d)/√d`.
pub fn max_entangled(d: usize) -> StateVector {
    vec_op(&identity(d)) / C64::from(d as f64).sqrt()
}

/// Kronecker product `A ⊗ B`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

/// Unitary DFT matrix, `F[j,k] = ω^{jk}/√d`.
pub fn fourier_matrix(d: usize) -> ComplexMatrix {
    let w = 2.0 * PI / d as f64;
    let s = 1.0 / (d as f64).sqrt();
    ComplexMatrix::from_fn(d, d, |j, k| {
        // reduce jk mod d before taking the angle so large d stays exact
        C64::from_polar(s, w * ((j * k) % d) as f64)
    })
}

/// Cyclic shift `X|k⟩ = |k+1 mod d⟩`.
pub fn gen_pauli_x(d: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(d, d, |i, j| if i == (j + 1) % d { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) })
}

/// Clock `Z|k⟩ = ω^k|k⟩`.
pub fn gen_pauli_z(d: usize) -> ComplexMatrix {
    let w = 2.0 * PI / d as f64;
    let diag = StateVector::from_fn(d, |k, _| C64::from_polar(1.0, w * k as f64));
    ComplexMatrix::from_diagonal(&diag)
}

/// `X^a Z^b` with exponents taken mod `d`.
pub fn gen_pauli(d: usize, a: usize, b: usize) -> ComplexMatrix {
    matrix_power(&gen_pauli_x(d), a % d) * matrix_power(&gen_pauli_z(d), b % d)
}

pub fn matrix_power(m: &ComplexMatrix, k: usize) -> ComplexMatrix {
    let mut out = identity(m.nrows());
    for _ in 0..k {
        out = &out * m;
    }
    out
}

/// Hilbert–Schmidt inner product `Tr(B* A)`.
pub fn hs_inner(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<C64> {
    if a.shape() != b.shape() {
        return Err(Error::Shape(format!("hs_inner of {:?} and {:?}", a.shape(), b.shape())));
    }
    Ok(a.iter().zip(b.iter()).map(|(x, y)| y.conj() * x).sum())
}

pub fn hs_norm(a: &ComplexMatrix) -> f64 {
    a.norm()
}

/// `‖WW* − I_d‖_max` for a `d×r` matrix.
pub fn coisometry_defect(w: &ComplexMatrix) -> f64 {
    let d = w.nrows();
    max_abs_diff(&(w * w.adjoint()), &identity(d))
}

/// Whether `WW* = I_d` within `tol.zero_abs`. A `d×r` matrix with `r < d` can
/// never be a co-isometry and is reported as an error.
pub fn is_coisometry(w: &ComplexMatrix, tol: &Tolerance) -> Result<bool> {
    if w.ncols() < w.nrows() {
        return Err(Error::TooFewColumns { rows: w.nrows(), cols: w.ncols() });
    }
    Ok(coisometry_defect(w) <= tol.zero_abs)
}

pub fn unitary_defect(u: &ComplexMatrix) -> f64 {
    if !u.is_square() {
        return f64::INFINITY;
    }
    max_abs_diff(&(u.adjoint() * u), &identity(u.nrows()))
}

pub fn is_unitary(u: &ComplexMatrix, tol: &Tolerance) -> bool {
    unitary_defect(u) <= tol.zero_abs
}

pub fn singular_values(m: &ComplexMatrix) -> Vec<f64> {
    if m.is_empty() {
        return Vec::new();
    }
    let mut s: Vec<f64> = m.singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Number of singular values above `tol.rank_rel × σ_max`.
pub fn numerical_rank(m: &ComplexMatrix, tol: &Tolerance) -> usize {
    let s = singular_values(m);
    let Some(&smax) = s.first() else { return 0 };
    if smax == 0.0 {
        return 0;
    }
    s.iter().filter(|&&x| x > tol.rank_rel * smax).count()
}

/// Eigen-decomposition of a Hermitian matrix; eigenvalues ascending.
pub fn hermitian_eigen(h: &ComplexMatrix) -> (Vec<f64>, ComplexMatrix) {
    let herm = (h + h.adjoint()) * C64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(herm);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = ComplexMatrix::from_columns(
        &order.iter().map(|&i| eig.eigenvectors.column(i).into_owned()).collect::<Vec<_>>(),
    );
    (values, vectors)
}

/// Polar retraction onto the co-isometries: `(WW*)^{-1/2} W`. Returns `None`
/// when `WW*` is numerically singular.
pub fn polar_coisometry(w: &ComplexMatrix) -> Option<ComplexMatrix> {
    let gram = w * w.adjoint();
    let (vals, vecs) = hermitian_eigen(&gram);
    let top = vals.last().copied().unwrap_or(0.0);
    // NaN-safe: a NaN eigenvalue fails the comparison
    let well_conditioned = vals[0] > 1e-12 * top.max(1e-300) && vals.iter().all(|v| v.is_finite());
    if !well_conditioned {
        return None;
    }
    let inv_sqrt = StateVector::from_iterator(vals.len(), vals.iter().map(|&v| C64::new(1.0 / v.sqrt(), 0.0)));
    let root = &vecs * ComplexMatrix::from_diagonal(&inv_sqrt) * vecs.adjoint();
    Some(root * w)
}

/// A unitary whose first column is the unit vector `v` (Householder reflector
/// with a phase fix on the first column).
pub fn complete_to_unitary(v: &StateVector) -> ComplexMatrix {
    let d = v.len();
    let n = v.norm();
    let v = v / C64::new(n, 0.0);
    let phase = if v[0].norm() > 0.0 { v[0] / v[0].norm() } else { C64::new(1.0, 0.0) };
    let mut u = v.clone();
    u[0] += phase;
    let uu = u.norm_squared();
    let mut h = identity(d) - (&u * u.adjoint()) * C64::new(2.0 / uu, 0.0);
    // H v = -phase e_0, so H e_0 = -conj(phase) v; rescale column 0 to get v.
    let fix = -phase;
    for z in h.column_mut(0).iter_mut() {
        *z *= fix;
    }
    h
}

pub fn is_permutation_matrix(p: &ComplexMatrix, tol: &Tolerance) -> bool {
    if !p.is_square() {
        return false;
    }
    let d = p.nrows();
    let is_one = |z: &C64| (z - C64::new(1.0, 0.0)).norm() <= tol.zero_abs;
    let is_zero = |z: &C64| z.norm() <= tol.zero_abs;
    if !p.iter().all(|z| is_one(z) || is_zero(z)) {
        return false;
    }
    (0..d).all(|i| p.row(i).iter().filter(|z| is_one(z)).count() == 1)
        && (0..d).all(|j| p.column(j).iter().filter(|z| is_one(z)).count() == 1)
}

/// Permutation matrix with `P[sigma[j], j] = 1`, i.e. `P|j⟩ = |sigma(j)⟩`.
pub fn permutation_matrix(sigma: &[usize]) -> ComplexMatrix {
    let d = sigma.len();
    let mut p = ComplexMatrix::zeros(d, d);
    for (j, &i) in sigma.iter().enumerate() {
        p[(i, j)] = C64::new(1.0, 0.0);
    }
    p
}

/// Whether `m` is diagonal within `tol` (scaled by its size).
pub fn is_diagonal(m: &ComplexMatrix, tol: f64) -> bool {
    off_diagonal_max(m) <= tol
}

pub fn off_diagonal_max(m: &ComplexMatrix) -> f64 {
    let mut worst = 0.0f64;
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            if i != j {
                worst = worst.max(m[(i, j)].norm());
            }
        }
    }
    worst
}

pub fn diagonal_max(m: &ComplexMatrix) -> f64 {
    m.diagonal().iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Entrywise complex conjugate.
pub fn conj(v: &StateVector) -> StateVector {
    v.map(|z| z.conj())
}
