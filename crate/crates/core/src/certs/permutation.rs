use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{delta_map, identity, is_permutation_matrix, max_abs, ComplexMatrix, Tolerance};

/// A `d×d` array over `1..=d` with no repeated symbol in any row or column.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatinSquare {
    pub d: usize,
    pub cells: Vec<Vec<usize>>,
}

impl LatinSquare {
    pub fn is_valid(&self) -> bool {
        let d = self.d;
        let is_perm = |it: &mut dyn Iterator<Item = usize>| {
            let mut seen = vec![false; d];
            let mut count = 0;
            for v in it {
                if v == 0 || v > d || seen[v - 1] {
                    return false;
                }
                seen[v - 1] = true;
                count += 1;
            }
            count == d
        };
        self.cells.len() == d
            && self.cells.iter().all(|row| row.len() == d)
            && (0..d).all(|i| is_perm(&mut self.cells[i].iter().copied()))
            && (0..d).all(|j| is_perm(&mut self.cells.iter().map(|row| row[j])))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PermutationAnalysis {
    pub distinguishable: bool,
    /// `I_d` when the family is distinguishable.
    #[serde(skip)]
    pub certificate: Option<ComplexMatrix>,
    /// Present when the family is distinguishable and has exactly `d` members.
    pub latin: Option<LatinSquare>,
}

/// For permutation matrices, one-way LOCC, global discrimination and
/// `Δ(P_j* P_i) = 0` all coincide; the identity is then a certificate.
pub fn permutation_analysis(perms: &[ComplexMatrix], tol: &Tolerance) -> Result<PermutationAnalysis> {
    let first = perms.first().ok_or(Error::EmptySet)?;
    let d = first.nrows();
    for (k, p) in perms.iter().enumerate() {
        if p.shape() != (d, d) || !is_permutation_matrix(p, tol) {
            return Err(Error::NotPermutation(k));
        }
    }
    let n = perms.len();
    let mut distinguishable = true;
    'outer: for i in 0..n {
        for j in 0..n {
            if i != j && max_abs(&delta_map(&(perms[j].adjoint() * &perms[i]))?) > tol.zero_abs {
                distinguishable = false;
                break 'outer;
            }
        }
    }
    if !distinguishable {
        return Ok(PermutationAnalysis { distinguishable, certificate: None, latin: None });
    }
    let latin = (n == d).then(|| {
        let mut cells = vec![vec![0usize; d]; d];
        for (k, p) in perms.iter().enumerate() {
            for (i, row) in cells.iter_mut().enumerate() {
                for (j, cell) in row.iter_mut().enumerate() {
                    if (p[(i, j)].re - 1.0).abs() <= tol.zero_abs {
                        *cell = k + 1;
                    }
                }
            }
        }
        LatinSquare { d, cells }
    });
    Ok(PermutationAnalysis { distinguishable, certificate: Some(identity(d)), latin })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{gen_pauli_x, matrix_power, permutation_matrix};

    #[test]
    fn qubit_swap_pair() {
        let tol = Tolerance::default();
        let a = permutation_analysis(&[identity(2), gen_pauli_x(2)], &tol).unwrap();
        assert!(a.distinguishable);
        assert_eq!(a.certificate, Some(identity(2)));
        assert_eq!(a.latin.unwrap().cells, vec![vec![1, 2], vec![2, 1]]);
    }

    #[test]
    fn cyclic_shifts_give_cyclic_square() {
        let tol = Tolerance::default();
        let x = gen_pauli_x(3);
        let fam: Vec<_> = (0..3).map(|k| matrix_power(&x, k)).collect();
        let a = permutation_analysis(&fam, &tol).unwrap();
        let l = a.latin.unwrap();
        assert!(l.is_valid());
        // X^k maps |j> to |j+k>, so cell (i, j) holds k + 1 with k = i - j mod 3
        assert_eq!(l.cells, vec![vec![1, 3, 2], vec![2, 1, 3], vec![3, 2, 1]]);
    }

    #[test]
    fn repeated_permutation_is_not_distinguishable() {
        let tol = Tolerance::default();
        let a = permutation_analysis(&[identity(2), identity(2)], &tol).unwrap();
        assert!(!a.distinguishable);
        assert!(a.certificate.is_none() && a.latin.is_none());
    }

    #[test]
    fn fewer_than_d_members_has_no_square() {
        let tol = Tolerance::default();
        let a = permutation_analysis(&[identity(4), gen_pauli_x(4)], &tol).unwrap();
        assert!(a.distinguishable);
        assert!(a.latin.is_none());
    }

    #[test]
    fn rejects_non_permutations() {
        let tol = Tolerance::default();
        let mut bad = identity(2);
        bad[(0, 1)] = bad[(0, 0)];
        assert!(matches!(permutation_analysis(&[identity(2), bad], &tol), Err(Error::NotPermutation(1))));
        assert!(permutation_analysis(&[permutation_matrix(&[1, 0]), permutation_matrix(&[2, 0, 1])], &tol).is_err());
    }

    #[test]
    fn latin_validation_catches_repeats() {
        let ok = LatinSquare { d: 2, cells: vec![vec![1, 2], vec![2, 1]] };
        assert!(ok.is_valid());
        let bad_col = LatinSquare { d: 2, cells: vec![vec![1, 2], vec![1, 2]] };
        assert!(!bad_col.is_valid());
        let out_of_range = LatinSquare { d: 2, cells: vec![vec![1, 3], vec![3, 1]] };
        assert!(!out_of_range.is_valid());
    }
}
