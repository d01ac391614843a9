//! Executable one-way protocols built from certificates.
//!
//! States are `|ψ_i⟩ = vec(M_i)/√d` on `C^d ⊗ C^d`, Alice holding the first
//! factor. With column-stacking `(A ⊗ B) vec(M) = vec(B M Aᵀ)`, so for
//! Hermitian `A`
//!
//! ```text
//! ⟨ψ|(A ⊗ B)|ψ⟩ = d⁻¹ Tr(M* B M Ā)
//! ```
//!
//! and no `d²`-dimensional vector is ever formed. If Alice measures the
//! physical vector `a`, Bob is left with `d⁻¹ M ā ā* M*`. Certificate
//! columns therefore reach Alice conjugated: she measures `φ̄_k` and Bob sees
//! `M_i φ_k`, which the certificate makes pairwise orthogonal.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::certs::{verify_oneway_certificate, w_to_alice, AliceMeasurement, Certificate, StateSet};
use crate::error::{Error, Result};
use crate::json;
use crate::matrix::{hermitian_eigen, identity, max_abs_diff, ComplexMatrix, StateVector, C64};
use crate::random::{derive_seed, rng};

const COMPLETENESS_TOL: f64 = 1e-9;
const PSD_TOL: f64 = 1e-10;
const BATCH: u64 = 8192;

/// Alice's rank-one measurement (physical vectors) and, for each of her
/// outcomes, Bob's effects: one per state label, then an inconclusive one.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Protocol {
    pub alice: AliceMeasurement,
    #[serde(with = "json::matrix_lists")]
    pub bob: Vec<Vec<ComplexMatrix>>,
}

impl Protocol {
    /// Checks completeness on both sides and positivity of Bob's effects.
    pub fn new(alice: AliceMeasurement, bob: Vec<Vec<ComplexMatrix>>) -> Result<Self> {
        let d = alice.dim();
        let defect = alice.completeness_defect().max(alice.unit_defect());
        if defect > COMPLETENESS_TOL {
            return Err(Error::InvalidProtocol(format!("Alice's measurement is incomplete by {defect:e}")));
        }
        if bob.len() != alice.weights.len() {
            return Err(Error::InvalidProtocol(format!(
                "{} Bob measurements for {} Alice outcomes",
                bob.len(),
                alice.weights.len()
            )));
        }
        let labels = bob.first().map_or(0, Vec::len);
        for (k, effects) in bob.iter().enumerate() {
            if effects.len() != labels || labels == 0 {
                return Err(Error::InvalidProtocol(format!("Bob's measurement {k} has {} effects", effects.len())));
            }
            let mut sum = ComplexMatrix::zeros(d, d);
            for e in effects {
                if e.shape() != (d, d) {
                    return Err(Error::InvalidProtocol(format!("effect of shape {:?} for d = {d}", e.shape())));
                }
                let min = hermitian_eigen(e).0.into_iter().fold(f64::INFINITY, f64::min);
                if min < -PSD_TOL || max_abs_diff(e, &e.adjoint()) > COMPLETENESS_TOL {
                    return Err(Error::InvalidProtocol(format!("effect in measurement {k} is not positive")));
                }
                sum += e;
            }
            let defect = max_abs_diff(&sum, &identity(d));
            if defect > COMPLETENESS_TOL {
                return Err(Error::InvalidProtocol(format!("Bob's measurement {k} is incomplete by {defect:e}")));
            }
        }
        Ok(Self { alice, bob })
    }

    pub fn dim(&self) -> usize {
        self.alice.dim()
    }

    /// Number of conclusive labels Bob can announce.
    pub fn labels(&self) -> usize {
        self.bob[0].len() - 1
    }
}

/// `d⁻¹ M_i |φ̄⟩⟨φ̄| M_i*` for each state, where `φ` is Alice's physical vector.
pub fn bob_residual_states(set: &StateSet, phi: &StateVector) -> Vec<ComplexMatrix> {
    let scale = C64::new(1.0 / set.dim() as f64, 0.0);
    let bar = phi.conjugate();
    set.matrices()
        .iter()
        .map(|m| {
            let v = m * &bar;
            (&v * v.adjoint()) * scale
        })
        .collect()
}

/// Alice measures the conjugated certificate columns; Bob projects onto the
/// orthogonal vectors `M_i φ_k` and sends any leftover weight to the
/// inconclusive label.
pub fn build_protocol(set: &StateSet, cert: &Certificate, tol: &crate::Tolerance) -> Result<Protocol> {
    let report = verify_oneway_certificate(set, &cert.w, tol)?;
    if !report.accepted {
        return Err(Error::CertificateRejected { residual: report.residual, defect: report.coisometry_defect });
    }
    let columns = w_to_alice(&cert.w, tol)?;
    let d = set.dim();
    let mut bob = Vec::with_capacity(columns.vectors.len());
    for phi in &columns.vectors {
        let mut effects = Vec::with_capacity(set.len() + 1);
        let mut remainder = identity(d);
        for m in set.matrices() {
            let v = m * phi;
            let norm_sq = v.norm_squared();
            // a state that never produces this outcome needs no effect
            let p = if norm_sq > tol.zero_abs * tol.zero_abs {
                (&v * v.adjoint()) / C64::new(norm_sq, 0.0)
            } else {
                ComplexMatrix::zeros(d, d)
            };
            remainder -= &p;
            effects.push(p);
        }
        effects.push(clamp_psd(&remainder));
        bob.push(effects);
    }
    let physical = columns.vectors.iter().map(|v| v.conjugate()).collect();
    Protocol::new(AliceMeasurement::new(columns.weights, physical)?, bob)
}

fn clamp_psd(m: &ComplexMatrix) -> ComplexMatrix {
    let (vals, vecs) = hermitian_eigen(m);
    let clamped = StateVector::from_iterator(vals.len(), vals.into_iter().map(|x| C64::new(x.max(0.0), 0.0)));
    &vecs * ComplexMatrix::from_diagonal(&clamped) * vecs.adjoint()
}

/// `p[i][k]` = probability Alice sees `k` on state `i`, and `q[i][k][j]` =
/// probability Bob then announces `j` (last index inconclusive).
struct Tables {
    alice: Vec<Vec<f64>>,
    bob: Vec<Vec<Vec<f64>>>,
}

fn tables(set: &StateSet, protocol: &Protocol) -> Result<Tables> {
    let d = set.dim();
    if protocol.dim() != d {
        return Err(Error::Shape(format!("protocol acts on d = {}, states on d = {d}", protocol.dim())));
    }
    if protocol.labels() != set.len() {
        return Err(Error::Shape(format!("protocol has {} labels for {} states", protocol.labels(), set.len())));
    }
    let mut alice = Vec::with_capacity(set.len());
    let mut bob = Vec::with_capacity(set.len());
    for m in set.matrices() {
        let mut pk = Vec::new();
        let mut qk = Vec::new();
        for (weight, a) in protocol.alice.weights.iter().zip(&protocol.alice.vectors) {
            let v = m * a.conjugate();
            pk.push(weight * v.norm_squared() / d as f64);
            let norm_sq = v.norm_squared();
            let row = protocol.bob[qk.len()]
                .iter()
                .map(|e| if norm_sq > 0.0 { (v.dotc(&(e * &v))).re.max(0.0) / norm_sq } else { 0.0 })
                .collect();
            qk.push(row);
        }
        alice.push(pk);
        bob.push(qk);
    }
    Ok(Tables { alice, bob })
}

/// `n⁻¹ Σ_i Σ_k ⟨ψ_i|(A_k ⊗ B_{k,i})|ψ_i⟩`.
pub fn exact_success(set: &StateSet, protocol: &Protocol) -> Result<f64> {
    let t = tables(set, protocol)?;
    let total: f64 = (0..set.len()).map(|i| t.alice[i].iter().zip(&t.bob[i]).map(|(p, q)| p * q[i]).sum::<f64>()).sum();
    // rounding can push a perfect protocol a few ulps past 1
    Ok((total / set.len() as f64).clamp(0.0, 1.0))
}

/// Probability of the joint outcome `(k, j)` computed directly on the
/// `d²`-dimensional state; used to check the trace reduction.
pub fn joint_probability_direct(m: &ComplexMatrix, a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    let d = m.nrows();
    let psi = crate::matrix::vec_op(m) / C64::new((d as f64).sqrt(), 0.0);
    let op = crate::matrix::kron(a, b);
    psi.dotc(&(op * &psi)).re
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimulationReport {
    pub trials: u64,
    pub success_count: u64,
    /// `confusion[i][j]`: state `i` prepared, label `j` announced.
    pub confusion: Vec<Vec<u64>>,
    /// Inconclusive announcements per prepared state.
    pub inconclusive: Vec<u64>,
    pub exact_success: f64,
}

impl SimulationReport {
    fn empty(n: usize, exact_success: f64) -> Self {
        Self { trials: 0, success_count: 0, confusion: vec![vec![0; n]; n], inconclusive: vec![0; n], exact_success }
    }

    /// Combines counts from independent batches; associative and commutative.
    pub fn merge(mut self, other: &Self) -> Self {
        self.trials += other.trials;
        self.success_count += other.success_count;
        for (row, o) in self.confusion.iter_mut().zip(&other.confusion) {
            for (x, y) in row.iter_mut().zip(o) {
                *x += y;
            }
        }
        for (x, y) in self.inconclusive.iter_mut().zip(&other.inconclusive) {
            *x += y;
        }
        self
    }

    pub fn frequency(&self) -> f64 {
        self.success_count as f64 / self.trials as f64
    }

    /// Trials allocated to each prepared state.
    pub fn per_state(&self) -> Vec<u64> {
        self.confusion.iter().zip(&self.inconclusive).map(|(row, inc)| row.iter().sum::<u64>() + inc).collect()
    }

    /// `√(p(1−p)/trials)` for the exact success probability.
    pub fn standard_error(&self) -> f64 {
        let p = self.exact_success;
        (p * (1.0 - p) / self.trials as f64).sqrt()
    }
}

/// Monte-Carlo run: pick a state uniformly, sample Alice's outcome, then
/// Bob's. Trials are split into fixed batches with derived seeds, so the
/// report depends only on `seed`.
pub fn simulate(set: &StateSet, protocol: &Protocol, trials: u64, seed: u64) -> Result<SimulationReport> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    let t = tables(set, protocol)?;
    let n = set.len();
    let exact = exact_success(set, protocol)?;
    let alice: Vec<WeightedIndex<f64>> = t
        .alice
        .iter()
        .map(|p| WeightedIndex::new(p).map_err(|e| Error::InvalidProtocol(format!("Alice's outcome weights: {e}"))))
        .collect::<Result<_>>()?;
    // rows for impossible outcomes stay `None`
    let bob: Vec<Vec<Option<WeightedIndex<f64>>>> =
        t.bob.iter().map(|qk| qk.iter().map(|q| WeightedIndex::new(q).ok()).collect()).collect();
    let batches = trials.div_ceil(BATCH);
    let report = (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut g = rng(derive_seed(seed, b));
            let count = BATCH.min(trials - b * BATCH);
            let mut rep = SimulationReport::empty(n, exact);
            rep.trials = count;
            for _ in 0..count {
                let i = rand::Rng::random_range(&mut g, 0..n);
                let k = alice[i].sample(&mut g);
                let j = bob[i][k].as_ref().map_or(n, |dist| dist.sample(&mut g));
                if j == n {
                    rep.inconclusive[i] += 1;
                } else {
                    rep.confusion[i][j] += 1;
                    if i == j {
                        rep.success_count += 1;
                    }
                }
            }
            rep
        })
        .reduce(|| SimulationReport::empty(n, exact), |a, b| a.merge(&b));
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{fourier_matrix, gen_pauli_x, gen_pauli_z, Tolerance};
    use crate::random::{gaussian_matrix, haar_unitary, normalize_state, orthogonal_pair, unit_vector};
    use proptest::prelude::*;

    fn set(ms: Vec<ComplexMatrix>) -> StateSet {
        StateSet::new(ms).unwrap()
    }

    fn cert(s: &StateSet, w: ComplexMatrix) -> Certificate {
        Certificate::evaluate(s, w).unwrap()
    }

    fn bell() -> (StateSet, Protocol) {
        let s = set(vec![identity(2), gen_pauli_x(2)]);
        let p = build_protocol(&s, &cert(&s, identity(2)), &Tolerance::default()).unwrap();
        (s, p)
    }

    /// Alice in the standard basis, Bob announcing label 0 on |k⟩ and label 1
    /// otherwise; on {I, Z} both states look identical to Bob.
    fn wrong_basis() -> (StateSet, Protocol) {
        let s = set(vec![identity(2), gen_pauli_z(2)]);
        let e = |k: usize| StateVector::from_fn(2, |i, _| if i == k { C64::new(1.0, 0.0) } else { C64::default() });
        let alice = AliceMeasurement::new(vec![1.0, 1.0], vec![e(0), e(1)]).unwrap();
        let bob = (0..2)
            .map(|k| {
                let p = e(k) * e(k).adjoint();
                vec![p.clone(), identity(2) - p, ComplexMatrix::zeros(2, 2)]
            })
            .collect();
        (s, Protocol::new(alice, bob).unwrap())
    }

    #[test]
    fn residual_states_for_bell_pair() {
        let s = set(vec![identity(2), gen_pauli_x(2)]);
        let phi = StateVector::from_vec(vec![C64::new(1.0, 0.0), C64::default()]);
        let states = bob_residual_states(&s, &phi);
        assert_eq!(states[0][(0, 0)], C64::new(0.5, 0.0));
        assert_eq!(states[1][(1, 1)], C64::new(0.5, 0.0));
        assert!(states[0].dotc(&states[1]).norm() == 0.0);
    }

    #[test]
    fn residual_state_of_identity_is_the_conjugate_projector() {
        let phi = unit_vector(3, &mut rng(1));
        let states = bob_residual_states(&set(vec![identity(3)]), &phi);
        let bar = phi.conjugate();
        let expected = (&bar * bar.adjoint()) / C64::new(3.0, 0.0);
        assert!(max_abs_diff(&states[0], &expected) < 1e-15);
        assert!((states[0].trace().re - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn residual_orthogonality_matches_certificate_condition() {
        let mut g = rng(4);
        let s = set(vec![haar_unitary(3, &mut g), haar_unitary(3, &mut g)]);
        let phi = unit_vector(3, &mut g);
        let states = bob_residual_states(&s, &phi);
        let bar = phi.conjugate();
        let overlap = bar.dotc(&(s.matrices()[1].adjoint() * &s.matrices()[0] * &bar));
        let trace = states[0].dotc(&states[1]).re;
        assert!((trace - overlap.norm_sqr() / 9.0).abs() < 1e-14);
    }

    #[test]
    fn bell_protocol_measures_standard_basis() {
        let (s, p) = bell();
        for (k, effects) in p.bob.iter().enumerate() {
            // outcome k leaves Bob with |k⟩ for the first state
            assert_eq!(effects[0][(k, k)], C64::new(1.0, 0.0));
            assert_eq!(effects[1][(1 - k, 1 - k)], C64::new(1.0, 0.0));
            assert!(effects[2].iter().all(|z| z.norm() < 1e-15));
        }
        assert!((exact_success(&s, &p).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn hadamard_protocol_for_clock_pair() {
        let s = set(vec![identity(2), gen_pauli_z(2)]);
        let p = build_protocol(&s, &cert(&s, fourier_matrix(2)), &Tolerance::default()).unwrap();
        assert!(p.alice.completeness_defect() < 1e-12);
        assert!((exact_success(&s, &p).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn conjugation_is_applied_once() {
        // For a generic complex pair the conjugated certificate is not one, so
        // measuring the raw columns must lose information.
        let tol = Tolerance::default();
        let (m1, m2) = orthogonal_pair(3, &mut rng(2));
        let c = crate::certs::two_state_certificate(&m1, &m2, &tol).unwrap();
        let s = set(vec![m1, m2]);
        let p = build_protocol(&s, &c, &tol).unwrap();
        for ((a, col), m) in p.alice.vectors.iter().zip(c.w.column_iter()).zip(&p.alice.weights) {
            assert!((a.conjugate() - col / C64::new(m.sqrt(), 0.0)).norm() < 1e-12);
        }
        assert!((exact_success(&s, &p).unwrap() - 1.0).abs() < 1e-12);
        let raw: Vec<StateVector> = p.alice.vectors.iter().map(|v| v.conjugate()).collect();
        let unconjugated = Protocol::new(AliceMeasurement::new(p.alice.weights.clone(), raw).unwrap(), p.bob).unwrap();
        assert!(exact_success(&s, &unconjugated).unwrap() < 1.0 - 1e-3);
    }

    #[test]
    fn single_state_is_trivial() {
        let s = set(vec![identity(2)]);
        let p = build_protocol(&s, &cert(&s, identity(2)), &Tolerance::default()).unwrap();
        assert_eq!(p.labels(), 1);
        assert!((exact_success(&s, &p).unwrap() - 1.0).abs() < 1e-15);
        let rep = simulate(&s, &p, 100, 0).unwrap();
        assert_eq!(rep.success_count, 100);
    }

    #[test]
    fn rejected_certificate_builds_nothing() {
        let s = set(vec![identity(2), gen_pauli_z(2)]);
        let err = build_protocol(&s, &cert(&s, identity(2)), &Tolerance::default()).unwrap_err();
        assert!(matches!(err, Error::CertificateRejected { .. }));
    }

    #[test]
    fn wrong_basis_gives_one_half() {
        let (s, p) = wrong_basis();
        assert!((exact_success(&s, &p).unwrap() - 0.5).abs() < 1e-15);
        let rep = simulate(&s, &p, 100_000, 3).unwrap();
        assert!((rep.frequency() - 0.5).abs() <= 3.0 * rep.standard_error());
    }

    #[test]
    fn trace_reduction_matches_direct_computation() {
        let mut g = rng(8);
        for d in 1..=4 {
            for _ in 0..5 {
                let m = normalize_state(&gaussian_matrix(d, d, &mut g));
                let a_vec = unit_vector(d, &mut g);
                let a = &a_vec * a_vec.adjoint();
                let x = gaussian_matrix(d, d, &mut g);
                let b = &x * x.adjoint();
                let reduced = (m.adjoint() * &b * &m * a.conjugate()).trace().re / d as f64;
                let direct = joint_probability_direct(&m, &a, &b);
                assert!((reduced - direct).abs() < 1e-10, "d={d}: {reduced} vs {direct}");
            }
        }
    }

    #[test]
    fn invalid_protocols_are_rejected() {
        let e0 = StateVector::from_vec(vec![C64::new(1.0, 0.0), C64::default()]);
        let incomplete = AliceMeasurement::new(vec![1.0], vec![e0.clone()]).unwrap();
        assert!(Protocol::new(incomplete, vec![vec![identity(2)]]).is_err());
        let (_, good) = bell();
        let mut bad = good.bob.clone();
        bad[0][2] = identity(2) * C64::new(-0.5, 0.0);
        assert!(Protocol::new(good.alice.clone(), bad).is_err());
        let mut short = good.bob.clone();
        short[1].pop();
        assert!(Protocol::new(good.alice, short).is_err());
    }

    #[test]
    fn simulation_counts_are_consistent() {
        let (s, p) = bell();
        let rep = simulate(&s, &p, 100_000, 1).unwrap();
        assert_eq!(rep.trials, 100_000);
        assert_eq!(rep.success_count, 100_000);
        assert_eq!(rep.per_state().iter().sum::<u64>(), rep.trials);
        let one = simulate(&s, &p, 1, 1).unwrap();
        assert_eq!(one.trials, 1);
        assert_eq!(one.per_state().iter().sum::<u64>(), 1);
        assert!(simulate(&s, &p, 0, 1).is_err());
        assert_eq!(simulate(&s, &p, 20_000, 5).unwrap(), simulate(&s, &p, 20_000, 5).unwrap());
    }

    #[test]
    fn merge_is_associative() {
        let (s, p) = wrong_basis();
        let a = simulate(&s, &p, 100, 1).unwrap();
        let b = simulate(&s, &p, 200, 2).unwrap();
        let c = simulate(&s, &p, 300, 3).unwrap();
        let left = a.clone().merge(&b).merge(&c);
        let right = a.merge(&b.merge(&c));
        assert_eq!(left, right);
        assert_eq!(left.trials, 600);
    }

    #[test]
    fn protocol_json_round_trip() {
        let (_, p) = bell();
        let text = serde_json::to_string(&p).unwrap();
        let back: Protocol = serde_json::from_str(&text).unwrap();
        assert_eq!(back, p);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]
        #[test]
        fn accepted_certificates_give_perfect_protocols(seed in any::<u64>(), d in 2usize..=5) {
            let tol = Tolerance::default();
            let (m1, m2) = orthogonal_pair(d, &mut rng(seed));
            let s = set(vec![m1, m2]);
            let c = crate::certs::two_state_certificate(&s.matrices()[0], &s.matrices()[1], &tol).unwrap();
            let p = build_protocol(&s, &c, &tol).unwrap();
            prop_assert!((exact_success(&s, &p).unwrap() - 1.0).abs() < 1e-8);
        }
    }
}
