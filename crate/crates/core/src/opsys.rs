//! Operator systems spanned by the products `M_j* M_i`, separating vectors,
//! algebra detection and unambiguous discrimination.
//!
//! A vector `v` separates a span `S` when `A v = 0` forces `A = 0` for every
//! `A ∈ S`. For a basis `B_1..B_s` this is exactly `rank [B_1 v | … | B_s v] = s`,
//! a condition that fails only on a proper algebraic subset of vectors, so a
//! handful of Gaussian trials decide it with overwhelming probability. When
//! `dim S > d` no vector can separate and the answer is a theorem.

use serde::{Deserialize, Serialize};

use crate::certs::StateSet;
use crate::error::{Error, Result};
use crate::json;
use crate::matrix::{
    diagonal_max, ensure_square, hermitian_eigen, identity, max_abs, numerical_rank, unvec, vec_op, ComplexMatrix,
    StateVector, Tolerance, C64,
};
use crate::random::{derive_seed, gaussian_vector, rng};

pub const DEFAULT_TRIALS: usize = 16;

/// Where a basis element came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Generator {
    Identity,
    /// `M_j* M_i`
    Product {
        i: usize,
        j: usize,
    },
    /// The `k`-th matrix of an explicitly supplied list.
    Given(usize),
}

/// A self-adjoint unital span with a Hilbert–Schmidt orthonormal basis.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorSystem {
    d: usize,
    basis: Vec<ComplexMatrix>,
    generators: Vec<Generator>,
}

impl OperatorSystem {
    /// Orthonormalizes `I_d` followed by `mats` (modified Gram–Schmidt, two
    /// passes) and drops members that are dependent at `tol.rank_rel`.
    pub fn from_generators(d: usize, mats: &[ComplexMatrix], tol: &Tolerance) -> Result<Self> {
        let tagged: Vec<(Generator, ComplexMatrix)> =
            mats.iter().enumerate().map(|(k, m)| (Generator::Given(k), m.clone())).collect();
        Self::build(d, tagged, tol)
    }

    fn build(d: usize, tagged: Vec<(Generator, ComplexMatrix)>, tol: &Tolerance) -> Result<Self> {
        let mut sys = Self { d, basis: Vec::new(), generators: Vec::new() };
        let all = std::iter::once((Generator::Identity, identity(d))).chain(tagged);
        for (generator, m) in all {
            if m.shape() != (d, d) {
                return Err(Error::Shape(format!("generator is {}x{}, expected {d}x{d}", m.nrows(), m.ncols())));
            }
            let size = m.norm();
            if size == 0.0 {
                continue;
            }
            let mut v = m;
            for _ in 0..2 {
                for b in &sys.basis {
                    let coef = b.dotc(&v);
                    v -= b * coef;
                }
            }
            let rest = v.norm();
            if rest > tol.rank_rel.max(1e-10) * size {
                sys.basis.push(v / C64::new(rest, 0.0));
                sys.generators.push(generator);
            }
        }
        Ok(sys)
    }

    pub fn ambient_dim(&self) -> usize {
        self.d
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[ComplexMatrix] {
        &self.basis
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    /// Orthogonal projection onto the span.
    pub fn project(&self, a: &ComplexMatrix) -> ComplexMatrix {
        let mut p = ComplexMatrix::zeros(self.d, self.d);
        for b in &self.basis {
            p += b * b.dotc(a);
        }
        p
    }

    /// Hilbert–Schmidt distance from `a` to the span.
    pub fn residual(&self, a: &ComplexMatrix) -> f64 {
        (a - self.project(a)).norm()
    }

    /// Largest distance from `B*` to the span over basis elements `B`.
    pub fn adjoint_residual(&self) -> f64 {
        self.basis.iter().map(|b| self.residual(&b.adjoint())).fold(0.0, f64::max)
    }

    pub fn identity_residual(&self) -> f64 {
        self.residual(&identity(self.d))
    }

    /// `max |G − I|` for the basis Gram matrix `G`.
    pub fn gram_defect(&self) -> f64 {
        let s = self.dim();
        let mut worst = 0.0f64;
        for a in 0..s {
            for b in 0..s {
                let g = self.basis[a].dotc(&self.basis[b]);
                let target = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((g - C64::new(target, 0.0)).norm());
            }
        }
        worst
    }

    /// Random element `Σ c_k B_k` with Gaussian coefficients.
    pub fn sample<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> ComplexMatrix {
        let coeffs = gaussian_vector(self.dim(), rng);
        let mut a = ComplexMatrix::zeros(self.d, self.d);
        for (b, c) in self.basis.iter().zip(coeffs.iter()) {
            a += b * *c;
        }
        a
    }
}

/// Span of `{I} ∪ {M_j* M_i : all i, j}`.
pub fn span_products(set: &StateSet, tol: &Tolerance) -> OperatorSystem {
    let ms = set.matrices();
    let mut tagged = Vec::with_capacity(ms.len() * ms.len());
    for j in 0..ms.len() {
        for i in 0..ms.len() {
            tagged.push((Generator::Product { i, j }, ms[j].adjoint() * &ms[i]));
        }
    }
    OperatorSystem::build(set.dim(), tagged, tol).expect("state set members are d x d")
}

/// Whether every product of basis elements lies in the span.
pub fn is_multiplicatively_closed(sys: &OperatorSystem, tol: &Tolerance) -> bool {
    closure_residual(sys) <= tol.zero_abs
}

/// Largest distance from `B_a B_b` to the span.
pub fn closure_residual(sys: &OperatorSystem) -> f64 {
    let mut worst = 0.0f64;
    for a in sys.basis() {
        for b in sys.basis() {
            worst = worst.max(sys.residual(&(a * b)));
        }
    }
    worst
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoneReason {
    /// `dim > d`: an injective map `A ↦ A v` into `C^d` cannot exist.
    DimensionBound,
    /// Every trial vector was rank deficient.
    TrialsExhausted,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum SeparatingSearch {
    Found {
        #[serde(with = "json::vector")]
        vector: StateVector,
    },
    ProbablyNone {
        max_rank: usize,
        reason: NoneReason,
    },
}

impl SeparatingSearch {
    pub fn vector(&self) -> Option<&StateVector> {
        match self {
            Self::Found { vector } => Some(vector),
            Self::ProbablyNone { .. } => None,
        }
    }
}

/// `rank [B_1 v | … | B_s v]`.
pub fn image_rank(mats: &[ComplexMatrix], v: &StateVector, tol: &Tolerance) -> usize {
    if mats.is_empty() {
        return 0;
    }
    let cols: Vec<StateVector> = mats.iter().map(|b| b * v).collect();
    numerical_rank(&ComplexMatrix::from_columns(&cols), tol)
}

/// Tries the normalized all-ones vector, then `trials` Gaussian vectors.
pub fn separating_vector_search(sys: &OperatorSystem, trials: usize, seed: u64, tol: &Tolerance) -> SeparatingSearch {
    let d = sys.ambient_dim();
    let s = sys.dim();
    if s > d {
        return SeparatingSearch::ProbablyNone { max_rank: d, reason: NoneReason::DimensionBound };
    }
    let ones = StateVector::from_element(d, C64::new(1.0 / (d as f64).sqrt(), 0.0));
    let randoms = (0..trials).map(|t| {
        let v = gaussian_vector(d, &mut rng(derive_seed(seed, t as u64)));
        let n = v.norm();
        v / C64::new(n, 0.0)
    });
    let mut max_rank = 0;
    for v in std::iter::once(ones).chain(randoms) {
        let rank = image_rank(sys.basis(), &v, tol);
        if rank == s {
            return SeparatingSearch::Found { vector: v };
        }
        max_rank = max_rank.max(rank);
    }
    SeparatingSearch::ProbablyNone { max_rank, reason: NoneReason::TrialsExhausted }
}

/// Multiplicities and block sizes of `⊕_i (I_{k_i} ⊗ M_{n_i})`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockStructure {
    /// `(k_i, n_i)` pairs.
    pub blocks: Vec<(usize, usize)>,
}

impl BlockStructure {
    pub fn new(blocks: Vec<(usize, usize)>) -> Result<Self> {
        if blocks.is_empty() || blocks.iter().any(|&(k, n)| k == 0 || n == 0) {
            return Err(Error::InvalidArgument("block multiplicities and sizes must be positive".into()));
        }
        Ok(Self { blocks })
    }

    /// `Σ k_i n_i`.
    pub fn ambient_dim(&self) -> usize {
        self.blocks.iter().map(|(k, n)| k * n).sum()
    }

    /// `Σ n_i²`.
    pub fn algebra_dim(&self) -> usize {
        self.blocks.iter().map(|(_, n)| n * n).sum()
    }

    /// The algebra itself, as an operator system on `C^{Σ k_i n_i}`, using the
    /// matrix units of each block.
    pub fn algebra(&self, tol: &Tolerance) -> OperatorSystem {
        let d = self.ambient_dim();
        let mut mats = Vec::new();
        let mut offset = 0;
        for &(k, n) in &self.blocks {
            for a in 0..n {
                for b in 0..n {
                    let mut m = ComplexMatrix::zeros(d, d);
                    for copy in 0..k {
                        m[(offset + copy * n + a, offset + copy * n + b)] = C64::new(1.0, 0.0);
                    }
                    mats.push(m);
                }
            }
            offset += k * n;
        }
        OperatorSystem::from_generators(d, &mats, tol).expect("block units are d x d")
    }
}

/// `⊕(I_{k_i} ⊗ M_{n_i})` has a separating vector iff `k_i ≥ n_i` for all `i`.
pub fn block_structure_has_separating_vector(b: &BlockStructure) -> bool {
    b.blocks.iter().all(|&(k, n)| k >= n)
}

/// Whether `Δ(W* X W) = (Tr X / d) Δ(W* W)`.
pub fn theorem_delta_membership(x: &ComplexMatrix, w: &ComplexMatrix, tol: &Tolerance) -> Result<bool> {
    Ok(delta_membership_defect(x, w)? <= tol.scaled(max_abs(x)))
}

pub fn delta_membership_defect(x: &ComplexMatrix, w: &ComplexMatrix) -> Result<f64> {
    let d = ensure_square(x)?;
    if w.nrows() != d {
        return Err(Error::Shape(format!("X is {d}x{d} but W has {} rows", w.nrows())));
    }
    let scale = x.trace() / d as f64;
    let mut worst = 0.0f64;
    for col in w.column_iter() {
        let lhs = col.dotc(&(x * col));
        let rhs = scale * col.norm_squared();
        worst = worst.max((lhs - rhs).norm());
    }
    Ok(worst)
}

/// Basis of `{X : Δ(W* X W) = (Tr X / d) Δ(W* W)}`, computed as the kernel of
/// the linear map `X ↦ diag(W* X W) − (Tr X / d) diag(W* W)` on `C^{d²}`.
pub fn delta_membership_basis(w: &ComplexMatrix, tol: &Tolerance) -> Vec<ComplexMatrix> {
    let d = w.nrows();
    let r = w.ncols();
    let gram: Vec<f64> = w.column_iter().map(|c| c.norm_squared()).collect();
    // Row k acts on vec(X): (W* X W)_kk = Σ_{a,b} conj(W[a,k]) X[a,b] W[b,k].
    let mut map = ComplexMatrix::zeros(r, d * d);
    for k in 0..r {
        for b in 0..d {
            for a in 0..d {
                let mut entry = w[(a, k)].conj() * w[(b, k)];
                if a == b {
                    entry -= C64::new(gram[k] / d as f64, 0.0);
                }
                map[(k, a + b * d)] = entry;
            }
        }
    }
    let normal = map.adjoint() * &map;
    let (vals, vecs) = hermitian_eigen(&normal);
    let top = vals.last().copied().unwrap_or(0.0).max(1.0);
    vals.iter()
        .enumerate()
        .filter(|(_, &v)| v <= tol.zero_abs * top)
        .map(|(i, _)| unvec(&vecs.column(i).into_owned(), d, d).expect("d*d entries"))
        .collect()
}

/// The column `k` of `W` at the first index where `(W* W)[k,k] > 0`; separates
/// every C*-subalgebra of the Δ-membership system, with
/// `‖A v‖² = (c/d) Tr(A* A)` where `c = (W* W)[k,k]`.
pub fn delta_separating_vector(w: &ComplexMatrix, tol: &Tolerance) -> Result<(usize, StateVector)> {
    if diagonal_max(&(w.adjoint() * w)) == 0.0 {
        return Err(Error::ZeroMatrix);
    }
    let threshold = tol.zero_abs * tol.zero_abs;
    w.column_iter()
        .enumerate()
        .find(|(_, c)| c.norm_squared() > threshold)
        .map(|(k, c)| (k, c.into_owned()))
        .ok_or(Error::ZeroMatrix)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum Unambiguous {
    Found {
        #[serde(with = "json::vector")]
        vector: StateVector,
    },
    ProbablyNone {
        max_rank: usize,
    },
}

/// Looks for `φ` making `{M_i φ}` linearly independent, trying the standard
/// basis, then the columns of `known` (e.g. a certificate), then Gaussian
/// vectors.
pub fn unambiguous_check(
    set: &StateSet,
    known: Option<&ComplexMatrix>,
    trials: usize,
    seed: u64,
    tol: &Tolerance,
) -> Unambiguous {
    let d = set.dim();
    let n = set.len();
    if n > d {
        let max_rank = (0..d).map(|k| image_rank(set.matrices(), &basis_vector(d, k), tol)).max().unwrap_or(0);
        return Unambiguous::ProbablyNone { max_rank };
    }
    let standard = (0..d).map(|k| basis_vector(d, k));
    let columns = known.into_iter().flat_map(|w| w.column_iter().map(|c| c.into_owned()).collect::<Vec<_>>());
    let randoms = (0..trials).map(|t| gaussian_vector(d, &mut rng(derive_seed(seed, t as u64))));
    let mut max_rank = 0;
    for v in standard.chain(columns).chain(randoms) {
        let norm = v.norm();
        if norm == 0.0 {
            continue;
        }
        let v = v / C64::new(norm, 0.0);
        let rank = image_rank(set.matrices(), &v, tol);
        if rank == n {
            return Unambiguous::Found { vector: v };
        }
        max_rank = max_rank.max(rank);
    }
    Unambiguous::ProbablyNone { max_rank }
}

fn basis_vector(d: usize, k: usize) -> StateVector {
    StateVector::from_fn(d, |i, _| if i == k { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) })
}

/// `vec` of every basis element as columns; handy for rank checks.
pub fn basis_matrix(sys: &OperatorSystem) -> ComplexMatrix {
    let cols: Vec<StateVector> = sys.basis().iter().map(vec_op).collect();
    ComplexMatrix::from_columns(&cols)
}
