//! Numerical feasibility search for a certificate.
//!
//! Minimizes `f(W) = Σ_{i≠j} Σ_k |(W* M_j* M_i W)[k,k]|²` over the manifold of
//! `d×r` co-isometries `{W : WW* = I_d}` by Riemannian gradient descent:
//!
//! - Euclidean gradient, column `k`: `Σ_{i≠j} 2 (conj(g) A w_k + g A* w_k)`
//!   with `A = M_j* M_i` and `g = w_k* A w_k`.
//! - Tangent projection: `ξ = G − herm(G W*) W`.
//! - Retraction: polar factor `(WW*)^{-1/2} W`.
//! - Step: Barzilai–Borwein guess, then Armijo backtracking, so the objective
//!   never increases.
//!
//! Structured constructions are tried first; numerical restarts run in
//! parallel with per-restart seeds and the winner is chosen deterministically.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::certs::{
    fillmore_zero_diagonal, first_overlap, schmidt_to_certificate, simultaneous_schmidt, verify_oneway_certificate,
    Certificate, StateSet,
};
use crate::error::{Error, Result};
use crate::matrix::{
    coisometry_defect, fourier_matrix, hermitian_eigen, identity, polar_coisometry, ComplexMatrix, Tolerance, C64,
};
use crate::random::{derive_seed, haar_coisometry, rng};

#[derive(Clone, Debug, PartialEq)]
pub struct SearchConfig {
    /// Fixed number of columns; `None` tries `d, d+1, …, 2d`.
    pub r: Option<usize>,
    pub restarts: usize,
    pub max_iters: usize,
    /// Initial step length.
    pub step: f64,
    /// Largest objective value accepted as a solution.
    pub accept_residual: f64,
    pub seed: u64,
    pub tol: Tolerance,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            r: None,
            restarts: 32,
            max_iters: 2000,
            step: 0.1,
            accept_residual: 1e-8,
            seed: 0,
            tol: Tolerance::default(),
        }
    }
}

/// How a certificate was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Construction {
    /// `W = I`, which covers every distinguishable permutation family.
    Identity,
    SchmidtFourier,
    Fillmore,
    HermitianEigenbasis,
    NumericSearch,
    None,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchStatus {
    Found,
    NotFound,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    pub status: SearchStatus,
    pub certificate: Option<Certificate>,
    pub construction: Construction,
    /// Objective per iteration of the selected restart (empty for structured hits).
    pub objective_trace: Vec<f64>,
    pub restarts_used: usize,
    /// Lowest objective reached over every restart and every `r`.
    pub best_objective: f64,
    /// Largest `‖WW* − I‖_max` seen at any accepted iterate.
    pub max_coisometry_defect: f64,
    /// The `r` values that were tried numerically.
    pub r_tried: Vec<usize>,
}

/// Sum of squared diagonal violations over ordered pairs `i ≠ j`.
pub fn objective(w: &ComplexMatrix, set: &StateSet) -> Result<f64> {
    check_shape(w, set)?;
    let images: Vec<ComplexMatrix> = set.matrices().iter().map(|m| m * w).collect();
    let mut total = 0.0;
    for (i, j) in set.pairs() {
        for k in 0..w.ncols() {
            total += images[j].column(k).dotc(&images[i].column(k)).norm_sqr();
        }
    }
    Ok(2.0 * total)
}

/// Euclidean gradient with respect to the real inner product `Re Tr(G* dW)`.
pub fn gradient(w: &ComplexMatrix, set: &StateSet) -> Result<ComplexMatrix> {
    check_shape(w, set)?;
    Ok(objective_and_gradient(w, set).1)
}

fn check_shape(w: &ComplexMatrix, set: &StateSet) -> Result<()> {
    if w.nrows() != set.dim() {
        return Err(Error::Shape(format!("W has {} rows, states have d = {}", w.nrows(), set.dim())));
    }
    Ok(())
}

fn objective_and_gradient(w: &ComplexMatrix, set: &StateSet) -> (f64, ComplexMatrix) {
    let ms = set.matrices();
    let images: Vec<ComplexMatrix> = ms.iter().map(|m| m * w).collect();
    let adjoints: Vec<ComplexMatrix> = ms.iter().map(|m| m.adjoint()).collect();
    let mut total = 0.0;
    let mut grad = ComplexMatrix::zeros(w.nrows(), w.ncols());
    for (i, j) in set.pairs() {
        // g_k = (M_j w_k)* (M_i w_k); the (j, i) term is its conjugate and
        // contributes the same gradient, hence the factor 4.
        let back_i = &adjoints[j] * &images[i];
        let back_j = &adjoints[i] * &images[j];
        for k in 0..w.ncols() {
            let g = images[j].column(k).dotc(&images[i].column(k));
            total += g.norm_sqr();
            let update = back_i.column(k) * (g.conj() * 4.0) + back_j.column(k) * (g * 4.0);
            let mut col = grad.column_mut(k);
            col += update;
        }
    }
    (2.0 * total, grad)
}

/// Projection of an ambient direction onto the tangent space at `w`.
pub fn tangent_projection(w: &ComplexMatrix, g: &ComplexMatrix) -> ComplexMatrix {
    let gw = g * w.adjoint();
    let herm = (&gw + gw.adjoint()) * C64::new(0.5, 0.0);
    g - herm * w
}

fn real_inner(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    a.dotc(b).re
}

/// Candidate certificates from the structured constructions, in trial order.
pub fn structured_candidates(set: &StateSet, tol: &Tolerance, seed: u64) -> Vec<(Construction, ComplexMatrix)> {
    let d = set.dim();
    let mut out = vec![(Construction::Identity, identity(d)), (Construction::SchmidtFourier, fourier_matrix(d))];
    if let Some(dec) = simultaneous_schmidt(set, tol, seed) {
        if let Ok(w) = schmidt_to_certificate(&dec.v, tol) {
            out.push((Construction::SchmidtFourier, w));
        }
    }
    if set.len() == 2 {
        let ms = set.matrices();
        if let Ok(v) = fillmore_zero_diagonal(&(ms[1].adjoint() * &ms[0]), tol) {
            out.push((Construction::Fillmore, v));
        }
    }
    let ms = set.matrices();
    for (i, j) in set.pairs() {
        let (_, vecs) = hermitian_eigen(&(ms[j].adjoint() * &ms[i]));
        out.push((Construction::HermitianEigenbasis, vecs));
    }
    out
}

struct Descent {
    w: ComplexMatrix,
    objective: f64,
    trace: Vec<f64>,
    max_defect: f64,
}

fn descend(set: &StateSet, start: ComplexMatrix, cfg: &SearchConfig, stop_at: f64, reseed: u64) -> Descent {
    let mut g = rng(reseed);
    let (d, r) = (start.nrows(), start.ncols());
    let mut w = start;
    let (mut f, grad) = objective_and_gradient(&w, set);
    let mut xi = tangent_projection(&w, &grad);
    let mut step = cfg.step;
    let mut trace = vec![f];
    let mut max_defect = coisometry_defect(&w);
    for _ in 0..cfg.max_iters {
        if f <= stop_at {
            break;
        }
        let slope = real_inner(&xi, &xi);
        if slope == 0.0 {
            break;
        }
        let mut t = step;
        let mut accepted = None;
        for _ in 0..60 {
            let trial = &w - &xi * C64::new(t, 0.0);
            let Some(next) = polar_coisometry(&trial) else {
                t *= 0.5;
                continue;
            };
            let f_next = objective_and_gradient(&next, set).0;
            if f_next <= f - 1e-4 * t * slope {
                accepted = Some((next, f_next));
                break;
            }
            t *= 0.5;
        }
        let Some((next, f_next)) = accepted else {
            if f > 1e-3 {
                // stuck far from a solution: jump to a fresh random point
                w = haar_coisometry(d, r, &mut g);
                let (f_new, grad) = objective_and_gradient(&w, set);
                if f_new < f {
                    f = f_new;
                    xi = tangent_projection(&w, &grad);
                    step = cfg.step;
                    trace.push(f);
                    continue;
                }
            }
            break;
        };
        let (_, grad_next) = objective_and_gradient(&next, set);
        let xi_next = tangent_projection(&next, &grad_next);
        // Barzilai–Borwein length for the next trial step
        let s = &next - &w;
        let y = &xi_next - &xi;
        let sy = real_inner(&s, &y).abs();
        step = if sy > 0.0 { (real_inner(&s, &s) / sy).clamp(1e-8, 1e3) } else { (2.0 * t).min(1e3) };
        w = next;
        f = f_next;
        xi = xi_next;
        max_defect = max_defect.max(coisometry_defect(&w));
        debug_assert!(coisometry_defect(&w) <= 1e-10);
        trace.push(f);
    }
    Descent { w, objective: f, trace, max_defect }
}

/// Runs the structured constructions, then the numerical search.
pub fn search_certificate(set: &StateSet, cfg: &SearchConfig) -> Result<SearchResult> {
    let tol = &cfg.tol;
    if let Some((i, j, overlap)) = first_overlap(set, tol) {
        return Err(Error::ImpossibleByTraceTest { i, j, overlap });
    }
    if let Some(r) = cfg.r {
        if r < set.dim() {
            return Err(Error::TooFewColumns { rows: set.dim(), cols: r });
        }
    }
    for (construction, w) in structured_candidates(set, tol, cfg.seed) {
        if cfg.r.is_some_and(|r| r != w.ncols()) {
            continue;
        }
        let report = verify_oneway_certificate(set, &w, tol)?;
        if report.accepted {
            let best_objective = objective(&w, set)?;
            return Ok(SearchResult {
                status: SearchStatus::Found,
                certificate: Some(Certificate { r: w.ncols(), w, residual: report.residual }),
                construction,
                objective_trace: Vec::new(),
                restarts_used: 0,
                best_objective,
                max_coisometry_defect: report.coisometry_defect,
                r_tried: Vec::new(),
            });
        }
    }
    numeric_search(set, cfg)
}

/// Numerical search only, skipping the structured constructions.
pub fn numeric_search(set: &StateSet, cfg: &SearchConfig) -> Result<SearchResult> {
    let tol = &cfg.tol;
    let d = set.dim();
    let schedule: Vec<usize> = match cfg.r {
        Some(r) => vec![r],
        None => (d..=2 * d).collect(),
    };
    // Stop once the verifier would accept with margin.
    let verify_bound = tol.scaled(set.product_scale());
    let stop_at = (0.1 * verify_bound).powi(2).min(cfg.accept_residual);
    let mut best_objective = f64::INFINITY;
    let mut max_defect = 0.0f64;
    let mut restarts_used = 0;
    let mut fallback_trace = Vec::new();
    for (slot, &r) in schedule.iter().enumerate() {
        let runs: Vec<Descent> = (0..cfg.restarts)
            .into_par_iter()
            .map(|k| {
                let seed = derive_seed(cfg.seed, (slot * cfg.restarts + k) as u64);
                let start = haar_coisometry(d, r, &mut rng(seed));
                descend(set, start, cfg, stop_at, derive_seed(seed, u64::MAX))
            })
            .collect();
        restarts_used += runs.len();
        max_defect = runs.iter().map(|run| run.max_defect).fold(max_defect, f64::max);
        // lowest objective, ties to the lowest restart index
        let Some((_, winner)) =
            runs.iter().enumerate().min_by(|(ia, a), (ib, b)| a.objective.total_cmp(&b.objective).then(ia.cmp(ib)))
        else {
            continue;
        };
        if winner.objective < best_objective {
            best_objective = winner.objective;
            fallback_trace = winner.trace.clone();
        }
        if winner.objective <= cfg.accept_residual {
            let report = verify_oneway_certificate(set, &winner.w, tol)?;
            if report.accepted {
                return Ok(SearchResult {
                    status: SearchStatus::Found,
                    certificate: Some(Certificate { r, w: winner.w.clone(), residual: report.residual }),
                    construction: Construction::NumericSearch,
                    objective_trace: winner.trace.clone(),
                    restarts_used,
                    best_objective: winner.objective,
                    max_coisometry_defect: max_defect,
                    r_tried: schedule[..=slot].to_vec(),
                });
            }
        }
    }
    Ok(SearchResult {
        status: SearchStatus::NotFound,
        certificate: None,
        construction: Construction::None,
        objective_trace: fallback_trace,
        restarts_used,
        best_objective,
        max_coisometry_defect: max_defect,
        r_tried: schedule,
    })
}
