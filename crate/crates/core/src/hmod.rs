//! Module inner products over the diagonal algebra and the orthogonality
//! bounds they imply.
//!
//! `⟨X, Y⟩_W = Δ(W* Y* X W)` takes values in the diagonal `r×r` matrices. A
//! certificate `W` for `{M_i}` is precisely a co-isometry making the family
//! pairwise orthogonal in this inner product.

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{
    delta_map, gen_pauli_z, identity, is_unitary, matrix_power, max_abs, numerical_rank, ComplexMatrix, Tolerance, C64,
};
use crate::random::{derive_seed, rng};

/// Beyond this many columns genericity is checked on sampled subsets.
pub const EXHAUSTIVE_COLUMNS: usize = 12;
pub const SAMPLED_SUBSETS: usize = 200;

#[derive(Clone, Debug, PartialEq)]
pub struct ModuleContext {
    pub w: ComplexMatrix,
    pub tol: Tolerance,
}

impl ModuleContext {
    pub fn new(w: ComplexMatrix, tol: Tolerance) -> Result<Self> {
        if w.ncols() < w.nrows() {
            return Err(Error::TooFewColumns { rows: w.nrows(), cols: w.ncols() });
        }
        Ok(Self { w, tol })
    }

    /// `W = I_d`.
    pub fn standard(d: usize, tol: Tolerance) -> Self {
        Self { w: identity(d), tol }
    }

    pub fn dim(&self) -> usize {
        self.w.nrows()
    }
}

/// `Δ(W* Y* X W)`.
pub fn module_inner(x: &ComplexMatrix, y: &ComplexMatrix, ctx: &ModuleContext) -> Result<ComplexMatrix> {
    let d = ctx.dim();
    if x.shape() != (d, d) || y.shape() != (d, d) {
        return Err(Error::Shape(format!(
            "module inner product needs {d}x{d} operands, got {:?} and {:?}",
            x.shape(),
            y.shape()
        )));
    }
    let xw = x * &ctx.w;
    let yw = y * &ctx.w;
    delta_map(&(yw.adjoint() * xw))
}

fn is_zero_module_value(v: &ComplexMatrix, scale: f64, tol: &Tolerance) -> bool {
    max_abs(v) <= tol.scaled(scale)
}

/// `Some(D)` with `U = V D` for an invertible diagonal `D`, else `None`.
pub fn equivalence_check(u: &ComplexMatrix, v: &ComplexMatrix, tol: &Tolerance) -> Option<ComplexMatrix> {
    if u.shape() != v.shape() || !u.is_square() {
        return None;
    }
    let bound = tol.scaled(max_abs(u).max(max_abs(v)));
    let mut diag = Vec::with_capacity(u.ncols());
    for (uc, vc) in u.column_iter().zip(v.column_iter()) {
        let vv = vc.norm_squared();
        let coef = if vv > 0.0 {
            vc.dotc(&uc) / vv
        } else if uc.norm() <= bound {
            C64::new(1.0, 0.0)
        } else {
            return None;
        };
        if coef.norm() <= bound || (uc - vc * coef).iter().any(|z| z.norm() > bound) {
            return None;
        }
        diag.push(coef);
    }
    Some(ComplexMatrix::from_diagonal(&nalgebra::DVector::from_vec(diag)))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilyReport {
    pub orthogonal: bool,
    /// First pair `(i, j)` with `⟨U_i, U_j⟩ ≠ 0`.
    pub failing_pair: Option<(usize, usize)>,
    pub n: usize,
    pub d: usize,
    pub within_bound: bool,
    /// `n·d`, the size of the expanded family `{U_k Z^i}`.
    pub expansion_size: usize,
    /// `max |Tr(B_b* B_a)|` over distinct expanded members.
    pub expansion_max_overlap: f64,
}

/// Checks pairwise module orthogonality of a unitary family and materializes
/// the expansion `{U_k D_i}` with `D_i = Z^i`, whose `n·d` members are then
/// pairwise Hilbert–Schmidt orthogonal, forcing `n ≤ d`.
pub fn check_orthogonal_family(us: &[ComplexMatrix], ctx: &ModuleContext) -> Result<FamilyReport> {
    let d = ctx.dim();
    let tol = &ctx.tol;
    for (k, u) in us.iter().enumerate() {
        if u.shape() != (d, d) {
            return Err(Error::Shape(format!("member {k} is not {d}x{d}")));
        }
        if !is_unitary(u, tol) {
            return Err(Error::InvalidArgument(format!("member {k} is not unitary")));
        }
    }
    let n = us.len();
    let mut failing_pair = None;
    'pairs: for i in 0..n {
        for j in i + 1..n {
            if !is_zero_module_value(&module_inner(&us[i], &us[j], ctx)?, 1.0, tol) {
                failing_pair = Some((i, j));
                break 'pairs;
            }
        }
    }
    let orthogonal = failing_pair.is_none();
    let z = gen_pauli_z(d);
    let diagonals: Vec<ComplexMatrix> = (0..d).map(|i| matrix_power(&z, i)).collect();
    let expanded: Vec<ComplexMatrix> = us.iter().flat_map(|u| diagonals.iter().map(move |di| u * di)).collect();
    let mut worst = 0.0f64;
    for a in 0..expanded.len() {
        for b in a + 1..expanded.len() {
            worst = worst.max(expanded[b].dotc(&expanded[a]).norm());
        }
    }
    Ok(FamilyReport {
        orthogonal,
        failing_pair,
        n,
        d,
        within_bound: n <= d,
        expansion_size: expanded.len(),
        expansion_max_overlap: worst,
    })
}

/// Whether every `d` columns of `W` are linearly independent. Exhaustive up to
/// [`EXHAUSTIVE_COLUMNS`] columns, otherwise [`SAMPLED_SUBSETS`] seeded random
/// subsets.
pub fn genericity_check(w: &ComplexMatrix, tol: &Tolerance, seed: u64) -> bool {
    let d = w.nrows();
    let r = w.ncols();
    if r < d {
        return false;
    }
    let full_rank = |cols: &[usize]| {
        let sub = w.select_columns(cols);
        numerical_rank(&sub, tol) == d
    };
    if r <= EXHAUSTIVE_COLUMNS {
        (0..r).combinations(d).all(|cols| full_rank(&cols))
    } else {
        (0..SAMPLED_SUBSETS).all(|t| {
            let mut g = rng(derive_seed(seed, t as u64));
            let mut cols = rand::seq::index::sample(&mut g, r, d).into_vec();
            cols.sort_unstable();
            full_rank(&cols)
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub orthogonal: bool,
    pub generic: bool,
    pub n: usize,
    pub d: usize,
    pub ranks: Vec<usize>,
    pub sum_ranks: usize,
    pub bound: usize,
    /// `bound − sum_ranks`; only asserted non-negative when the preconditions hold.
    pub slack: i64,
    /// `Some(true)` when the preconditions hold and the bound is satisfied.
    pub holds: Option<bool>,
}

/// `Σ rank(M_k) ≤ d²` for families orthogonal under `⟨·,·⟩_W` with generic `W`.
pub fn rank_bound_check(ms: &[ComplexMatrix], ctx: &ModuleContext, seed: u64) -> Result<BoundReport> {
    let d = ctx.dim();
    let tol = &ctx.tol;
    let scale = ms.iter().map(max_abs).fold(0.0, f64::max).powi(2) * d as f64;
    let mut orthogonal = true;
    'pairs: for i in 0..ms.len() {
        for j in i + 1..ms.len() {
            if !is_zero_module_value(&module_inner(&ms[i], &ms[j], ctx)?, scale, tol) {
                orthogonal = false;
                break 'pairs;
            }
        }
    }
    let generic = genericity_check(&ctx.w, tol, seed);
    let ranks: Vec<usize> = ms.iter().map(|m| numerical_rank(m, tol)).collect();
    let sum_ranks = ranks.iter().sum();
    let bound = d * d;
    let holds = (orthogonal && generic).then_some(sum_ranks <= bound);
    Ok(BoundReport {
        orthogonal,
        generic,
        n: ms.len(),
        d,
        ranks,
        sum_ranks,
        bound,
        slack: bound as i64 - sum_ranks as i64,
        holds,
    })
}
