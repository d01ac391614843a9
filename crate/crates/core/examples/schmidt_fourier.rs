//! Families with a simultaneous Schmidt decomposition `M_k = U D_k V` are
//! certified by `W = V* F` with `F` the Fourier matrix.

use locc::analysis::schmidt_family;
use locc::certs::{schmidt_to_certificate, simultaneous_schmidt, verify_oneway_certificate, StateSet};
use locc::matrix::{fourier_matrix, gen_pauli_z, identity};
use locc::random::rng;
use locc::Tolerance;

fn main() -> locc::Result<()> {
    let tol = Tolerance::default();

    // diagonal family: V = I, so the certificate is F itself
    let clock = StateSet::new(vec![identity(3), gen_pauli_z(3)])?;
    let report = verify_oneway_certificate(&clock, &fourier_matrix(3), &tol)?;
    println!("{{I, Z}} with W = F: accepted {}, residual {:e}", report.accepted, report.residual);

    let set = StateSet::new(schmidt_family(5, 4, &mut rng(2))?)?;
    let dec = simultaneous_schmidt(&set, &tol, 0).expect("random combination separates the family");
    println!("joint decomposition residual {:e}", dec.residual);
    let w = schmidt_to_certificate(&dec.v, &tol)?;
    let report = verify_oneway_certificate(&set, &w, &tol)?;
    println!("W = V* F: accepted {}, residual {:e}", report.accepted, report.residual);
    Ok(())
}
