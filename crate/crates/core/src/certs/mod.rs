//! One-way LOCC certificates.
//!
//! A [`StateSet`] `{M_i}` describes the states `(I ⊗ M_i)|Φ⟩`. A certificate
//! is a `d×r` co-isometry `W` for which every diagonal entry of
//! `W* M_j* M_i W` vanishes when `i ≠ j`; equivalently, an
//! [`AliceMeasurement`] `{m_k, |φ_k⟩}` with `Σ m_k |φ_k⟩⟨φ_k| = I` and
//! `⟨φ_k| M_j* M_i |φ_k⟩ = 0`.

mod fillmore;
mod permutation;
mod schmidt;

pub use fillmore::{fillmore_zero_diagonal, two_state_certificate};
pub use permutation::{permutation_analysis, LatinSquare, PermutationAnalysis};
pub use schmidt::{schmidt_to_certificate, simultaneous_schmidt, SchmidtDecomposition};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::json;
use crate::matrix::{coisometry_defect, identity, max_abs, max_abs_diff, ComplexMatrix, StateVector, Tolerance, C64};

/// An ordered family of `d×d` matrices `M_i`, one per state.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "StateSetJson", into = "StateSetJson")]
pub struct StateSet {
    d: usize,
    matrices: Vec<ComplexMatrix>,
    labels: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct StateSetJson {
    d: usize,
    #[serde(with = "json::matrices")]
    matrices: Vec<ComplexMatrix>,
    #[serde(default)]
    labels: Vec<String>,
}

impl TryFrom<StateSetJson> for StateSet {
    type Error = Error;

    fn try_from(j: StateSetJson) -> Result<Self> {
        let set = StateSet::with_labels(j.matrices, j.labels)?;
        if set.d != j.d {
            return Err(Error::Encoding(format!("declared d = {} but matrices are {}x{}", j.d, set.d, set.d)));
        }
        Ok(set)
    }
}

impl From<StateSet> for StateSetJson {
    fn from(s: StateSet) -> Self {
        Self { d: s.d, matrices: s.matrices, labels: s.labels }
    }
}

impl StateSet {
    pub fn new(matrices: Vec<ComplexMatrix>) -> Result<Self> {
        Self::with_labels(matrices, Vec::new())
    }

    pub fn with_labels(matrices: Vec<ComplexMatrix>, labels: Vec<String>) -> Result<Self> {
        let first = matrices.first().ok_or(Error::EmptySet)?;
        let d = first.nrows();
        if d == 0 {
            return Err(Error::Shape("states must have d >= 1".into()));
        }
        for (i, m) in matrices.iter().enumerate() {
            if m.shape() != (d, d) {
                return Err(Error::Shape(format!("matrix {i} is {}x{}, expected {d}x{d}", m.nrows(), m.ncols())));
            }
        }
        if !labels.is_empty() && labels.len() != matrices.len() {
            return Err(Error::Shape(format!("{} labels for {} matrices", labels.len(), matrices.len())));
        }
        Ok(Self { d, matrices, labels })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.matrices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.matrices.is_empty()
    }

    pub fn matrices(&self) -> &[ComplexMatrix] {
        &self.matrices
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// `‖M_i‖_max²` maximised over the set; the natural scale of `M_j* M_i`.
    pub(crate) fn product_scale(&self) -> f64 {
        self.matrices.iter().map(max_abs).fold(0.0, f64::max).powi(2) * self.d as f64
    }

    /// All ordered pairs `(i, j)` with `i < j`.
    pub(crate) fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.len();
        (0..n).flat_map(move |i| (i + 1..n).map(move |j| (i, j)))
    }
}

/// A `d×r` co-isometry together with the residual it achieves on the set it
/// was evaluated against.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub r: usize,
    #[serde(rename = "W", with = "json::matrix")]
    pub w: ComplexMatrix,
    pub residual: f64,
}

impl Certificate {
    /// Evaluates `w` on `set` and records the residual; no acceptance test.
    pub fn evaluate(set: &StateSet, w: ComplexMatrix) -> Result<Self> {
        let residual = diagonal_residual(set, &w)?;
        Ok(Self { r: w.ncols(), w, residual })
    }
}

/// Outcome of [`verify_oneway_certificate`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    /// `max |(W* M_j* M_i W)[k,k]|` over `i ≠ j` and all `k`.
    pub residual: f64,
    /// `‖WW* − I_d‖_max`.
    pub coisometry_defect: f64,
    pub coisometric: bool,
    pub diagonal_ok: bool,
    pub accepted: bool,
}

/// `true` iff the states are pairwise orthogonal, the necessary and
/// sufficient condition for perfect discrimination by global operations.
pub fn verify_arbitrary(set: &StateSet, tol: &Tolerance) -> bool {
    first_overlap(set, tol).is_none()
}

/// The first pair `(i, j, |Tr(M_j* M_i)|)` that violates orthogonality.
pub fn first_overlap(set: &StateSet, tol: &Tolerance) -> Option<(usize, usize, f64)> {
    let ms = set.matrices();
    let bound = tol.scaled(set.product_scale());
    set.pairs().find_map(|(i, j)| {
        let overlap = ms[i].dotc(&ms[j]).norm();
        (overlap > bound).then_some((i, j, overlap))
    })
}

/// Largest modulus of a diagonal entry of `W* M_j* M_i W` over `i ≠ j`.
pub fn diagonal_residual(set: &StateSet, w: &ComplexMatrix) -> Result<f64> {
    if w.nrows() != set.dim() {
        return Err(Error::Shape(format!("W has {} rows, states have d = {}", w.nrows(), set.dim())));
    }
    let images: Vec<ComplexMatrix> = set.matrices().iter().map(|m| m * w).collect();
    let mut worst = 0.0f64;
    for (i, j) in set.pairs() {
        for k in 0..w.ncols() {
            let entry = images[j].column(k).dotc(&images[i].column(k));
            worst = worst.max(entry.norm());
        }
    }
    Ok(worst)
}

pub fn verify_oneway_certificate(set: &StateSet, w: &ComplexMatrix, tol: &Tolerance) -> Result<VerificationReport> {
    if w.nrows() != set.dim() {
        return Err(Error::Shape(format!("W has {} rows, states have d = {}", w.nrows(), set.dim())));
    }
    if w.ncols() < w.nrows() {
        return Err(Error::TooFewColumns { rows: w.nrows(), cols: w.ncols() });
    }
    let residual = diagonal_residual(set, w)?;
    let defect = coisometry_defect(w);
    let coisometric = defect <= tol.zero_abs;
    let diagonal_ok = residual <= tol.scaled(set.product_scale());
    Ok(VerificationReport {
        residual,
        coisometry_defect: defect,
        coisometric,
        diagonal_ok,
        accepted: coisometric && diagonal_ok,
    })
}

/// Alice's rank-one measurement `{m_k |φ_k⟩⟨φ_k|}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AliceMeasurement {
    pub weights: Vec<f64>,
    #[serde(with = "json::vectors")]
    pub vectors: Vec<StateVector>,
}

impl AliceMeasurement {
    pub fn new(weights: Vec<f64>, vectors: Vec<StateVector>) -> Result<Self> {
        if weights.len() != vectors.len() || weights.is_empty() {
            return Err(Error::Shape(format!("{} weights for {} vectors", weights.len(), vectors.len())));
        }
        let d = vectors[0].len();
        if vectors.iter().any(|v| v.len() != d) {
            return Err(Error::Shape("measurement vectors have different dimensions".into()));
        }
        if weights.iter().any(|&m| !(m > 0.0 && m.is_finite())) {
            return Err(Error::InvalidArgument("weights must be positive".into()));
        }
        Ok(Self { weights, vectors })
    }

    pub fn dim(&self) -> usize {
        self.vectors[0].len()
    }

    /// `‖Σ m_k |φ_k⟩⟨φ_k| − I‖_max`, with each `φ_k` taken as given.
    pub fn completeness_defect(&self) -> f64 {
        let d = self.dim();
        let mut sum = ComplexMatrix::zeros(d, d);
        for (m, v) in self.weights.iter().zip(&self.vectors) {
            sum += (v * v.adjoint()) * C64::new(*m, 0.0);
        }
        max_abs_diff(&sum, &identity(d))
    }

    pub fn unit_defect(&self) -> f64 {
        self.vectors.iter().map(|v| (v.norm() - 1.0).abs()).fold(0.0, f64::max)
    }
}

/// `W = Σ_k √m_k |φ_k⟩⟨k|`.
pub fn alice_to_w(alice: &AliceMeasurement, tol: &Tolerance) -> Result<ComplexMatrix> {
    let defect = alice.completeness_defect().max(alice.unit_defect());
    if defect > tol.zero_abs {
        return Err(Error::Incomplete(defect));
    }
    let cols: Vec<StateVector> =
        alice.weights.iter().zip(&alice.vectors).map(|(m, v)| v * C64::new(m.sqrt(), 0.0)).collect();
    Ok(ComplexMatrix::from_columns(&cols))
}

/// Reads Alice's measurement off the columns of a co-isometry; zero columns
/// are dropped.
pub fn w_to_alice(w: &ComplexMatrix, tol: &Tolerance) -> Result<AliceMeasurement> {
    if w.ncols() < w.nrows() {
        return Err(Error::TooFewColumns { rows: w.nrows(), cols: w.ncols() });
    }
    let defect = coisometry_defect(w);
    if defect > tol.zero_abs {
        return Err(Error::Incomplete(defect));
    }
    let mut weights = Vec::new();
    let mut vectors = Vec::new();
    for col in w.column_iter() {
        let m = col.norm_squared();
        if m > tol.zero_abs * tol.zero_abs {
            weights.push(m);
            vectors.push(col.into_owned() / C64::new(m.sqrt(), 0.0));
        }
    }
    AliceMeasurement::new(weights, vectors)
}
