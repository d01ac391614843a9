//! Family generators and the end-to-end analysis pipeline.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::certs::{
    first_overlap, permutation_analysis, verify_oneway_certificate, Certificate, LatinSquare, StateSet,
};
use crate::error::{Error, Result};
use crate::hmod::{check_orthogonal_family, rank_bound_check, BoundReport, FamilyReport, ModuleContext};
use crate::matrix::{
    c, gen_pauli, gen_pauli_x, gen_pauli_z, is_permutation_matrix, is_unitary, matrix_power, permutation_matrix,
    ComplexMatrix, Tolerance,
};
use crate::opsys::{
    is_multiplicatively_closed, separating_vector_search, span_products, SeparatingSearch, DEFAULT_TRIALS,
};
use crate::random::{haar_unitary, orthogonal_pair, random_permutation, rng, SeededRng};
use crate::search::{search_certificate, structured_candidates, Construction, SearchConfig, SearchStatus};
use crate::simproto::{build_protocol, exact_success, simulate, SimulationReport};

/// Built-in state families.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    /// `{X^k : 0 ≤ k < d}`.
    PaulisX,
    /// `{Z^k : 0 ≤ k < d}`.
    PaulisZ,
    /// All `d²` products `X^a Z^b`.
    PaulisAll,
    /// Powers of a random `d`-cycle.
    PermutationsCyclic,
    /// `n` Haar-random unitaries.
    RandomUnitary,
    /// Two Hilbert–Schmidt orthogonal Gaussian matrices.
    RandomOrthogonalPair,
}

impl Family {
    pub const ALL: [Family; 6] = [
        Family::PaulisX,
        Family::PaulisZ,
        Family::PaulisAll,
        Family::PermutationsCyclic,
        Family::RandomUnitary,
        Family::RandomOrthogonalPair,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::PaulisX => "paulis-x",
            Family::PaulisZ => "paulis-z",
            Family::PaulisAll => "paulis-all",
            Family::PermutationsCyclic => "permutations-cyclic",
            Family::RandomUnitary => "random-unitary",
            Family::RandomOrthogonalPair => "random-orthogonal-pair",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown family '{s}'")))
    }
}

/// Powers `P^0, …, P^{d−1}` of a uniformly random `d`-cycle `P`.
pub fn cyclic_permutations(d: usize, rng: &mut SeededRng) -> Vec<ComplexMatrix> {
    let order = random_permutation(d, rng);
    let mut sigma = vec![0; d];
    for t in 0..d {
        sigma[order[t]] = order[(t + 1) % d];
    }
    let p = permutation_matrix(&sigma);
    (0..d).map(|k| matrix_power(&p, k)).collect()
}

/// `M_k = U D_k V` with Haar `U`, `V` and diagonals that are orthogonal in
/// trace inner product, scaled so `Tr(M_k* M_k) = d`.
pub fn schmidt_family(d: usize, n: usize, rng: &mut SeededRng) -> Result<Vec<ComplexMatrix>> {
    if n == 0 || n > d {
        return Err(Error::InvalidArgument(format!("need 1 ≤ n ≤ d, got n = {n}, d = {d}")));
    }
    let u = haar_unitary(d, rng);
    let v = haar_unitary(d, rng);
    // orthonormal columns of a Haar unitary are orthogonal diagonals
    let q = haar_unitary(d, rng);
    let scale = c((d as f64).sqrt(), 0.0);
    Ok((0..n)
        .map(|k| {
            let diag = ComplexMatrix::from_diagonal(&(q.column(k) * scale));
            &u * diag * &v
        })
        .collect())
}

/// Generates a named family; `n` only matters for `random-unitary`.
pub fn generate(family: Family, d: usize, n: Option<usize>, seed: u64) -> Result<StateSet> {
    if d == 0 {
        return Err(Error::InvalidArgument("d must be at least 1".into()));
    }
    let mut g = rng(seed);
    let (matrices, labels): (Vec<ComplexMatrix>, Vec<String>) = match family {
        Family::PaulisX => {
            let x = gen_pauli_x(d);
            (0..d).map(|k| (matrix_power(&x, k), format!("X^{k}"))).unzip()
        }
        Family::PaulisZ => {
            let z = gen_pauli_z(d);
            (0..d).map(|k| (matrix_power(&z, k), format!("Z^{k}"))).unzip()
        }
        Family::PaulisAll => (0..d)
            .flat_map(|a| (0..d).map(move |b| (a, b)))
            .map(|(a, b)| (gen_pauli(d, a, b), format!("X^{a}Z^{b}")))
            .unzip(),
        Family::PermutationsCyclic => {
            cyclic_permutations(d, &mut g).into_iter().enumerate().map(|(k, p)| (p, format!("P^{k}"))).unzip()
        }
        Family::RandomUnitary => {
            let n = n.unwrap_or(2);
            (0..n).map(|k| (haar_unitary(d, &mut g), format!("U{k}"))).unzip()
        }
        Family::RandomOrthogonalPair => {
            let (a, b) = orthogonal_pair(d, &mut g);
            (vec![a, b], vec!["M0".into(), "M1".into()])
        }
    };
    StateSet::with_labels(matrices, labels)
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct AnalysisOptions {
    pub seed: u64,
    pub tol: Tolerance,
    /// Fall back to numerical search when no structured construction works.
    pub search: Option<SearchConfig>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OperatorSystemSummary {
    pub dim: usize,
    pub ambient_dim: usize,
    pub algebra: bool,
    pub separating_vector: SeparatingSearch,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    /// Present when every state is unitary.
    pub family: Option<FamilyReport>,
    pub rank: Option<BoundReport>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub d: usize,
    pub n: usize,
    /// Passes the necessary trace test `Tr(M_j* M_i) = 0`.
    pub arbitrary_distinguishable: bool,
    pub certificate: Option<Certificate>,
    pub construction_used: Construction,
    /// Success probability of the protocol built from the certificate.
    pub exact_success: Option<f64>,
    pub latin_square: Option<LatinSquare>,
    pub operator_system: OperatorSystemSummary,
    pub bounds: Bounds,
    pub notes: Vec<String>,
}

impl AnalysisReport {
    /// 0 when a certificate was found, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.certificate.is_some() {
            0
        } else {
            1
        }
    }
}

/// Trace test, structured constructions (optionally numerical search),
/// operator-system structure and module bounds, deterministic in the seed.
pub fn analyze(set: &StateSet, opts: &AnalysisOptions) -> Result<AnalysisReport> {
    let tol = &opts.tol;
    let (d, n) = (set.dim(), set.len());
    let mut notes = Vec::new();
    let overlap = first_overlap(set, tol);
    if let Some((i, j, o)) = overlap {
        notes.push(format!("states {i} and {j} overlap (|Tr(M_j* M_i)| = {o:.3e}); no measurement can separate them"));
    }

    let mut latin_square = None;
    if set.matrices().iter().all(|m| is_permutation_matrix(m, tol)) {
        let pa = permutation_analysis(set.matrices(), tol)?;
        if !pa.distinguishable {
            notes.push("permutation family: some pair agrees on a basis vector".into());
        }
        latin_square = pa.latin;
    }

    let (mut certificate, mut construction_used) = (None, Construction::None);
    if overlap.is_none() {
        for (construction, w) in structured_candidates(set, tol, opts.seed) {
            let report = verify_oneway_certificate(set, &w, tol)?;
            if report.accepted {
                certificate = Some(Certificate { r: w.ncols(), w, residual: report.residual });
                construction_used = construction;
                break;
            }
        }
        if certificate.is_none() {
            if let Some(cfg) = &opts.search {
                let cfg = SearchConfig { seed: opts.seed, tol: *tol, ..cfg.clone() };
                let res = search_certificate(set, &cfg)?;
                if res.status == SearchStatus::Found {
                    certificate = res.certificate;
                    construction_used = res.construction;
                } else {
                    notes.push(format!("numerical search found nothing (best objective {:.3e})", res.best_objective));
                }
            }
        }
    }
    let exact = match &certificate {
        Some(cert) => Some(exact_success(set, &build_protocol(set, cert, tol)?)?),
        None => None,
    };

    let sys = span_products(set, tol);
    let separating_vector = separating_vector_search(&sys, DEFAULT_TRIALS, opts.seed, tol);
    if sys.dim() > d {
        notes.push(format!("span of products has dimension {} > d = {d}: no separating vector", sys.dim()));
    }
    let operator_system = OperatorSystemSummary {
        dim: sys.dim(),
        ambient_dim: sys.ambient_dim(),
        algebra: is_multiplicatively_closed(&sys, tol),
        separating_vector,
    };

    let ctx = match &certificate {
        Some(cert) => ModuleContext::new(cert.w.clone(), *tol)?,
        None => ModuleContext::standard(d, *tol),
    };
    let all_unitary = set.matrices().iter().all(|m| is_unitary(m, tol));
    let family = if all_unitary { Some(check_orthogonal_family(set.matrices(), &ctx)?) } else { None };
    if all_unitary && n > d {
        notes.push(format!("{n} unitary states exceed the bound n ≤ d = {d}: no certificate exists"));
    }
    let rank = rank_bound_check(set.matrices(), &ctx, opts.seed).ok();

    Ok(AnalysisReport {
        d,
        n,
        arbitrary_distinguishable: overlap.is_none(),
        certificate,
        construction_used,
        exact_success: exact,
        latin_square,
        operator_system,
        bounds: Bounds { family, rank },
        notes,
    })
}

/// Builds the protocol for `cert` and samples it.
pub fn simulate_certificate(
    set: &StateSet,
    cert: &Certificate,
    trials: u64,
    seed: u64,
    tol: &Tolerance,
) -> Result<SimulationReport> {
    simulate(set, &build_protocol(set, cert, tol)?, trials, seed)
}

/// Adds small random noise to one matrix, for robustness experiments.
pub fn perturb(m: &ComplexMatrix, scale: f64, rng: &mut SeededRng) -> ComplexMatrix {
    m.map(|z| z + c(rng.random_range(-scale..scale), rng.random_range(-scale..scale)))
}
