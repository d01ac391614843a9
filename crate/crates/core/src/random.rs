//! Seeded samplers for test families and randomized searches.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::matrix::{ComplexMatrix, StateVector, C64};

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent per-task seed derived from a base seed (splitmix64 finalizer).
pub fn derive_seed(base: u64, index: u64) -> u64 {
    let mut z = base ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn gaussian_complex<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Ginibre matrix: i.i.d. standard complex Gaussian entries.
pub fn gaussian_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| gaussian_complex(rng))
}

pub fn gaussian_vector<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> StateVector {
    StateVector::from_fn(dim, |_, _| gaussian_complex(rng))
}

pub fn unit_vector<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> StateVector {
    let v = gaussian_vector(dim, rng);
    let n = v.norm();
    v / C64::new(n, 0.0)
}

/// Haar-distributed unitary via QR of a Ginibre matrix with the phases of
/// `R`'s diagonal absorbed into `Q`.
pub fn haar_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> ComplexMatrix {
    let qr = gaussian_matrix(d, d, rng).qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..d {
        let rjj = r[(j, j)];
        let phase = if rjj.norm() > 0.0 { rjj / rjj.norm() } else { C64::new(1.0, 0.0) };
        for z in q.column_mut(j).iter_mut() {
            *z *= phase;
        }
    }
    q
}

/// Haar-random `d×r` co-isometry: the first `d` rows of an `r×r` Haar unitary.
pub fn haar_coisometry<R: Rng + ?Sized>(d: usize, r: usize, rng: &mut R) -> ComplexMatrix {
    haar_unitary(r, rng).rows(0, d).into_owned()
}

/// Diagonal unitary with uniformly random phases.
pub fn random_phase_diagonal<R: Rng + ?Sized>(d: usize, rng: &mut R) -> ComplexMatrix {
    let diag = StateVector::from_fn(d, |_, _| C64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU)));
    ComplexMatrix::from_diagonal(&diag)
}

/// Uniform random permutation of `0..d` (Fisher–Yates).
pub fn random_permutation<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Vec<usize> {
    let mut p: Vec<usize> = (0..d).collect();
    for i in (1..d).rev() {
        let j = rng.random_range(0..=i);
        p.swap(i, j);
    }
    p
}

/// Two Ginibre matrices made Hilbert–Schmidt orthogonal by one Gram–Schmidt
/// step and scaled so that `Tr(M* M) = d` (unit-norm states).
pub fn orthogonal_pair<R: Rng + ?Sized>(d: usize, rng: &mut R) -> (ComplexMatrix, ComplexMatrix) {
    let a = gaussian_matrix(d, d, rng);
    let b = gaussian_matrix(d, d, rng);
    let m1 = normalize_state(&a);
    let proj = m1.dotc(&b) / C64::new(m1.norm_squared(), 0.0);
    let m2 = normalize_state(&(b - &m1 * proj));
    (m1, m2)
}

/// Scales `m` so that `(I ⊗ m)|Φ⟩` is a unit vector, i.e. `‖m‖_HS² = d`.
pub fn normalize_state(m: &ComplexMatrix) -> ComplexMatrix {
    let d = m.nrows() as f64;
    m * C64::new(d.sqrt() / m.norm(), 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{coisometry_defect, hs_inner, unitary_defect};

    #[test]
    fn haar_samples_are_unitary() {
        let mut g = rng(1);
        for d in 1..7 {
            assert!(unitary_defect(&haar_unitary(d, &mut g)) < 1e-13);
            assert!(coisometry_defect(&haar_coisometry(d, d + 2, &mut g)) < 1e-13);
        }
    }

    #[test]
    fn pairs_are_orthogonal_and_normalized() {
        let mut g = rng(7);
        let (a, b) = orthogonal_pair(4, &mut g);
        assert!(hs_inner(&a, &b).unwrap().norm() < 1e-13);
        assert!((a.norm_squared() - 4.0).abs() < 1e-12);
        assert!((b.norm_squared() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn seeds_are_reproducible_and_spread() {
        assert_eq!(gaussian_matrix(2, 2, &mut rng(3)), gaussian_matrix(2, 2, &mut rng(3)));
        assert_ne!(derive_seed(0, 0), derive_seed(0, 1));
        let mut p = random_permutation(9, &mut rng(4));
        p.sort();
        assert_eq!(p, (0..9).collect::<Vec<_>>());
    }
}
