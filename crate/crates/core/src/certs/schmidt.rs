use crate::certs::StateSet;
use crate::error::{Error, Result};
use crate::matrix::{fourier_matrix, max_abs, max_abs_diff, unitary_defect, ComplexMatrix, Tolerance};
use crate::random::{gaussian_complex, rng};

/// Joint factorization `M_k = U D_k V` with shared unitaries and complex
/// diagonals (a weak Schmidt decomposition of every state at once).
#[derive(Clone, Debug, PartialEq)]
pub struct SchmidtDecomposition {
    pub u: ComplexMatrix,
    pub diagonals: Vec<ComplexMatrix>,
    pub v: ComplexMatrix,
    /// `max_k ‖M_k − U D_k V‖_max`.
    pub residual: f64,
}

const ATTEMPTS: usize = 8;

/// Randomized search: the SVD `T = U Σ V` of a random combination
/// `T = M_1 + Σ c_k M_k` is essentially unique when the singular values are
/// distinct, and then every `U* M_k V*` must be diagonal if any joint
/// decomposition exists. `None` only means the search failed.
pub fn simultaneous_schmidt(set: &StateSet, tol: &Tolerance, seed: u64) -> Option<SchmidtDecomposition> {
    let ms = set.matrices();
    let scale = ms.iter().map(max_abs).fold(0.0, f64::max);
    let bound = tol.scaled(scale);
    let mut g = rng(seed);
    for _ in 0..ATTEMPTS {
        let mut t = ms[0].clone();
        for m in &ms[1..] {
            t += m * gaussian_complex(&mut g);
        }
        let svd = t.svd(true, true);
        let (Some(u), Some(v)) = (svd.u, svd.v_t) else { continue };
        let diagonals: Vec<ComplexMatrix> =
            ms.iter().map(|m| ComplexMatrix::from_diagonal(&(u.adjoint() * m * v.adjoint()).diagonal())).collect();
        let residual = ms.iter().zip(&diagonals).map(|(m, dk)| max_abs_diff(m, &(&u * dk * &v))).fold(0.0, f64::max);
        if residual <= bound {
            return Some(SchmidtDecomposition { u, diagonals, v, residual });
        }
    }
    None
}

/// `W = V* F`: conjugating by `V` diagonalizes every `M_j* M_i`, and the
/// Fourier matrix turns diagonals into circulants whose diagonal is the
/// (vanishing) normalized trace.
pub fn schmidt_to_certificate(v: &ComplexMatrix, tol: &Tolerance) -> Result<ComplexMatrix> {
    let defect = unitary_defect(v);
    if defect > tol.zero_abs {
        return Err(Error::NotUnitary(defect));
    }
    Ok(v.adjoint() * fourier_matrix(v.nrows()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certs::verify_oneway_certificate;
    use crate::matrix::{gen_pauli_x, gen_pauli_z, identity, is_diagonal, matrix_power, C64};

    #[test]
    fn diagonal_family_needs_no_rotation() {
        let tol = Tolerance::default();
        let s = StateSet::new(vec![identity(2), gen_pauli_z(2)]).unwrap();
        let dec = simultaneous_schmidt(&s, &tol, 0).unwrap();
        assert!(dec.residual < 1e-12);
        assert!(unitary_defect(&dec.u) < 1e-12 && unitary_defect(&dec.v) < 1e-12);
        for dk in &dec.diagonals {
            assert!(is_diagonal(dk, 0.0));
        }
    }

    #[test]
    fn shift_powers_decompose() {
        let tol = Tolerance::default();
        let x = gen_pauli_x(3);
        let s = StateSet::new((0..3).map(|k| matrix_power(&x, k)).collect()).unwrap();
        let dec = simultaneous_schmidt(&s, &tol, 1).unwrap();
        assert!(dec.residual < 1e-10);
        // relative to D_0 (the identity's factor), each D_k carries the
        // eigenvalues of X^k: cube roots of unity
        let d0 = &dec.diagonals[0];
        for dk in &dec.diagonals {
            for (z, z0) in dk.diagonal().iter().zip(d0.diagonal().iter()) {
                assert!((z.norm() - 1.0).abs() < 1e-10);
                assert!(((z / z0).powu(3) - C64::new(1.0, 0.0)).norm() < 1e-9);
            }
        }
        let w = schmidt_to_certificate(&dec.v, &tol).unwrap();
        assert!(verify_oneway_certificate(&s, &w, &tol).unwrap().accepted);
    }

    #[test]
    fn any_two_unitaries_decompose() {
        // B* A = V* Λ V gives A = (B V*) Λ V and B = (B V*) I V.
        let tol = Tolerance::default();
        let s = StateSet::new(vec![gen_pauli_x(2), gen_pauli_z(2)]).unwrap();
        let dec = simultaneous_schmidt(&s, &tol, 0).unwrap();
        assert!(dec.residual < 1e-10);
    }

    #[test]
    fn noncommuting_family_with_identity_is_not_found() {
        // With I in the family, I = U D_0 V forces every M_k = U (D_k D_0^{-1}) U*,
        // so all members would commute; X and Z do not.
        let tol = Tolerance::default();
        let (x, z) = (gen_pauli_x(2), gen_pauli_z(2));
        assert!(max_abs_diff(&(&x * &z), &(&z * &x)) > 1.0);
        let s = StateSet::new(vec![identity(2), x, z]).unwrap();
        for seed in 0..5 {
            assert!(simultaneous_schmidt(&s, &tol, seed).is_none());
        }
    }

    #[test]
    fn identity_v_gives_hadamard() {
        let tol = Tolerance::default();
        let w = schmidt_to_certificate(&identity(2), &tol).unwrap();
        assert!(max_abs_diff(&w, &fourier_matrix(2)) < 1e-15);
        let s = StateSet::new(vec![identity(3), gen_pauli_z(3)]).unwrap();
        let w = schmidt_to_certificate(&identity(3), &tol).unwrap();
        assert!(verify_oneway_certificate(&s, &w, &tol).unwrap().accepted);
        assert!(matches!(schmidt_to_certificate(&(identity(2) * C64::new(2.0, 0.0)), &tol), Err(Error::NotUnitary(_))));
    }
}
