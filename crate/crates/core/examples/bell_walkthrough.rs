//! Two Bell states, `(I ⊗ I)|Φ⟩` and `(I ⊗ X)|Φ⟩`: Alice measures in the
//! standard basis, tells Bob her outcome, and Bob reads off which state it was.

use locc::analysis::{analyze, AnalysisOptions};
use locc::certs::StateSet;
use locc::matrix::{gen_pauli_x, identity};
use locc::simproto::{bob_residual_states, build_protocol, simulate};
use locc::Tolerance;

fn main() -> locc::Result<()> {
    let set = StateSet::with_labels(vec![identity(2), gen_pauli_x(2)], vec!["psi1".into(), "psi2".into()])?;
    let report = analyze(&set, &AnalysisOptions::default())?;
    let cert = report.certificate.expect("the Bell pair is distinguishable");
    println!("construction: {:?}, residual {:e}", report.construction_used, cert.residual);

    let protocol = build_protocol(&set, &cert, &Tolerance::default())?;
    for (k, phi) in protocol.alice.vectors.iter().enumerate() {
        println!("Alice outcome {k}: measures {:?}", phi.iter().map(|z| z.re).collect::<Vec<_>>());
        for (label, state) in set.labels().iter().zip(bob_residual_states(&set, phi)) {
            let diag: Vec<f64> = state.diagonal().iter().map(|z| z.re).collect();
            println!("  Bob holds (unnormalized) diag {diag:?} if the state was {label}");
        }
    }

    let sim = simulate(&set, &protocol, 100_000, 1)?;
    println!("exact success {}, simulated {}/{}", sim.exact_success, sim.success_count, sim.trials);
    Ok(())
}
