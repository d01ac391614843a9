//! Every trace-zero matrix is unitarily similar to one with zero diagonal,
//! which makes any two orthogonal states distinguishable.

use locc::certs::{fillmore_zero_diagonal, two_state_certificate};
use locc::matrix::{c, diagonal_max, identity, unitary_defect};
use locc::random::{gaussian_matrix, orthogonal_pair, rng};
use locc::Tolerance;

fn main() -> locc::Result<()> {
    let tol = Tolerance::default();
    let mut g = rng(3);

    let x = gaussian_matrix(6, 6, &mut g);
    let m = &x - identity(6) * (x.trace() / c(6.0, 0.0));
    let v = fillmore_zero_diagonal(&m, &tol)?;
    println!("unitary defect {:e}", unitary_defect(&v));
    println!("largest diagonal entry of V* M V: {:e}", diagonal_max(&(v.adjoint() * &m * &v)));

    let (m1, m2) = orthogonal_pair(4, &mut g);
    let cert = two_state_certificate(&m1, &m2, &tol)?;
    println!("orthogonal pair in d = 4: certificate with r = {}, residual {:e}", cert.r, cert.residual);
    Ok(())
}
