//! Unitary similarity to a zero-diagonal matrix.
//!
//! Every trace-zero `M` is unitarily similar to a matrix with zero diagonal.
//! The construction is greedy: find a unit `v` with `v* M v = 0`, complete it
//! to a unitary, and recurse on the compression of `M` to `v^⊥` (which again
//! has trace zero).
//!
//! A vector with `v* M v = 0` comes from the diagonal entries of the current
//! compression. They sum to zero, so zero lies on a segment between two of
//! them or inside a triangle of three. Inside the span of two orthonormal
//! vectors the numerical range is an ellipse containing both endpoint values,
//! so every point of the segment between them is reached; [`mix_to_target`]
//! solves that two-dimensional problem in closed form up to a bisection.

use crate::certs::StateSet;
use crate::error::{Error, Result};
use crate::matrix::{
    complete_to_unitary, ensure_square, identity, max_abs, ComplexMatrix, StateVector, Tolerance, C64,
};

use super::{verify_oneway_certificate, Certificate};

/// A unitary `V` with `Δ(V* M V) = 0` for trace-zero `M`.
pub fn fillmore_zero_diagonal(m: &ComplexMatrix, tol: &Tolerance) -> Result<ComplexMatrix> {
    let d = ensure_square(m)?;
    let scale = max_abs(m).max(1.0);
    let trace = m.trace();
    if trace.norm() > tol.zero_abs * scale * d as f64 {
        return Err(Error::NonzeroTrace { trace: trace.norm() });
    }
    let centered = m - identity(d) * (trace / d as f64);
    let mut basis = identity(d);
    for start in 0..d.saturating_sub(1) {
        let q = basis.columns(start, d - start).into_owned();
        let compressed = q.adjoint() * &centered * &q;
        let x = zero_value_vector(&compressed, scale);
        let rotated = &q * complete_to_unitary(&x);
        basis.columns_mut(start, d - start).copy_from(&rotated);
    }
    Ok(basis)
}

/// Certificate for a pair of orthogonal states: `W = V` from
/// [`fillmore_zero_diagonal`] applied to `M_2* M_1`.
pub fn two_state_certificate(m1: &ComplexMatrix, m2: &ComplexMatrix, tol: &Tolerance) -> Result<Certificate> {
    let set = StateSet::new(vec![m1.clone(), m2.clone()])?;
    let product = m2.adjoint() * m1;
    let overlap = product.trace().norm();
    if overlap > tol.zero_abs * max_abs(&product).max(1.0) * set.dim() as f64 {
        return Err(Error::NotOrthogonal { i: 0, j: 1, overlap });
    }
    let v = fillmore_zero_diagonal(&product, tol)?;
    let report = verify_oneway_certificate(&set, &v, tol)?;
    if !report.accepted {
        return Err(Error::CertificateRejected { residual: report.residual, defect: report.coisometry_defect });
    }
    Ok(Certificate { r: v.ncols(), w: v, residual: report.residual })
}

/// Unit vector `x` with `x* C x ≈ Tr(C)/n` for square `C` of size `n ≥ 1`.
fn zero_value_vector(c: &ComplexMatrix, scale: f64) -> StateVector {
    let n = c.nrows();
    let mean = c.trace() / n as f64;
    let a: Vec<C64> = (0..n).map(|k| c[(k, k)] - mean).collect();
    let shifted = c - identity(n) * mean;
    let eps = 1e-14 * scale;
    let unit = |k: usize| StateVector::from_fn(n, |i, _| if i == k { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) });

    if let Some(k) = (0..n).filter(|&k| a[k].norm() <= eps).min_by(|&i, &j| a[i].norm().total_cmp(&a[j].norm())) {
        return unit(k);
    }

    // Pairs whose segment passes through zero, largest magnitudes first.
    let mut pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    pairs.sort_by(|&(i, j), &(k, l)| (a[k].norm() + a[l].norm()).total_cmp(&(a[i].norm() + a[j].norm())));
    for &(i, j) in &pairs {
        let cross = (a[i].conj() * a[j]).im;
        let dot = (a[i].conj() * a[j]).re;
        if dot < 0.0 && cross.abs() <= 1e-12 * a[i].norm() * a[j].norm() {
            let t = a[i].norm() / (a[i].norm() + a[j].norm());
            return mix_to_target(&shifted, &unit(i), &unit(j), t);
        }
    }

    // Otherwise zero is inside a triangle; take the most interior one.
    let mut best: Option<(f64, usize, usize, usize, [f64; 3])> = None;
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                if let Some(bary) = barycentric_of_origin(a[i], a[j], a[k]) {
                    let margin = bary.iter().copied().fold(f64::INFINITY, f64::min);
                    if best.is_none_or(|b| margin > b.0) {
                        best = Some((margin, i, j, k, bary));
                    }
                }
            }
        }
    }
    match best {
        Some((_, i, j, k, [alpha, beta, _])) => {
            // p = (α a_i + β a_j)/(α+β) lies on [a_i, a_j] opposite a_k.
            let t = beta / (alpha + beta);
            let u = mix_to_target(&shifted, &unit(i), &unit(j), t);
            let p = u.dotc(&(&shifted * &u));
            let s = p.norm() / (p.norm() + a[k].norm());
            mix_to_target(&shifted, &u, &unit(k), s)
        }
        // Only reachable through rounding when all entries are ~0 or collinear.
        None => unit(0),
    }
}

/// Barycentric coordinates of 0 in triangle `(p, q, r)` if it lies inside.
fn barycentric_of_origin(p: C64, q: C64, r: C64) -> Option<[f64; 3]> {
    let cross = |u: C64, v: C64| u.re * v.im - u.im * v.re;
    let area = cross(q - p, r - p);
    if area.abs() < 1e-300 {
        return None;
    }
    let alpha = cross(q, r) / area;
    let beta = cross(r, p) / area;
    let gamma = cross(p, q) / area;
    (alpha >= 0.0 && beta >= 0.0 && gamma >= 0.0).then_some([alpha, beta, gamma])
}

/// For orthonormal `u1, u2` with values `a = u1* C u1`, `b = u2* C u2`, returns
/// a unit `x` in their span with `x* C x = (1 − t) a + t b`.
fn mix_to_target(c: &ComplexMatrix, u1: &StateVector, u2: &StateVector, t: f64) -> StateVector {
    let cu1 = c * u1;
    let cu2 = c * u2;
    let a = u1.dotc(&cu1);
    let b = u2.dotc(&cu2);
    let delta = b - a;
    if delta.norm() == 0.0 {
        return u1.clone();
    }
    // x = cos θ u1 + e^{iφ} sin θ u2 gives
    // x* C x = a + sin²θ δ + sin θ cos θ (e^{iφ} β + e^{-iφ} γ).
    let beta = u1.dotc(&cu2) / delta;
    let gamma = u2.dotc(&cu1) / delta;
    let z = beta - gamma.conj();
    let phi = if z.norm() > 0.0 { -z.arg() } else { 0.0 };
    let e = C64::from_polar(1.0, phi);
    let kappa = (e * beta + e.conj() * gamma).re;
    // h(θ) = sin²θ + κ sin θ cos θ runs from 0 to 1 on [0, π/2].
    let h = |theta: f64| theta.sin().powi(2) + kappa * theta.sin() * theta.cos();
    let (mut lo, mut hi) = (0.0f64, std::f64::consts::FRAC_PI_2);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if h(mid) < t {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-17 {
            break;
        }
    }
    let theta = 0.5 * (lo + hi);
    let x = u1 * C64::new(theta.cos(), 0.0) + u2 * (e * theta.sin());
    let norm = x.norm();
    x / C64::new(norm, 0.0)
}
