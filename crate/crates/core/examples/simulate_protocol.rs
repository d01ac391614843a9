//! Monte-Carlo runs of a certified protocol and of a deliberately wrong one.

use locc::certs::{two_state_certificate, AliceMeasurement, StateSet};
use locc::matrix::{c, gen_pauli_z, identity, ComplexMatrix, StateVector};
use locc::random::{orthogonal_pair, rng};
use locc::simproto::{build_protocol, exact_success, simulate, Protocol};
use locc::Tolerance;

fn main() -> locc::Result<()> {
    let tol = Tolerance::default();
    let (m1, m2) = orthogonal_pair(5, &mut rng(4));
    let cert = two_state_certificate(&m1, &m2, &tol)?;
    let set = StateSet::new(vec![m1, m2])?;
    let protocol = build_protocol(&set, &cert, &tol)?;
    let report = simulate(&set, &protocol, 100_000, 7)?;
    println!("certified pair: exact {}, simulated {:.5}", report.exact_success, report.frequency());
    println!("  confusion {:?}, inconclusive {:?}", report.confusion, report.inconclusive);

    // Alice in the standard basis on {I, Z}: Bob learns nothing
    let set = StateSet::new(vec![identity(2), gen_pauli_z(2)])?;
    let e = |k: usize| StateVector::from_fn(2, |i, _| if i == k { c(1.0, 0.0) } else { c(0.0, 0.0) });
    let alice = AliceMeasurement::new(vec![1.0, 1.0], vec![e(0), e(1)])?;
    let bob = (0..2)
        .map(|k| {
            let p = e(k) * e(k).adjoint();
            vec![p.clone(), identity(2) - p, ComplexMatrix::zeros(2, 2)]
        })
        .collect();
    let wrong = Protocol::new(alice, bob)?;
    let report = simulate(&set, &wrong, 100_000, 7)?;
    println!(
        "wrong basis: exact {}, simulated {:.4} (standard error {:.4})",
        exact_success(&set, &wrong)?,
        report.frequency(),
        report.standard_error()
    );
    Ok(())
}
