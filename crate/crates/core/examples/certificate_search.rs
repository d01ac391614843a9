//! Numerical search on a family whose certificate is hidden behind a random
//! unitary, and on the four qubit Paulis, which have none.

use locc::analysis::{generate, Family};
use locc::certs::StateSet;
use locc::matrix::{gen_pauli_x, matrix_power, ComplexMatrix};
use locc::random::{gaussian_vector, haar_unitary, normalize_state, rng};
use locc::search::{search_certificate, SearchConfig};

fn main() -> locc::Result<()> {
    let d = 3;
    let mut g = rng(17);
    let b = haar_unitary(d, &mut g);
    let x = gen_pauli_x(d);
    let hidden = StateSet::new(
        (0..d)
            .map(|k| {
                let diag = ComplexMatrix::from_diagonal(&gaussian_vector(d, &mut g));
                normalize_state(&(matrix_power(&x, k) * diag * b.adjoint()))
            })
            .collect(),
    )?;
    let res = search_certificate(&hidden, &SearchConfig { restarts: 8, seed: 1, ..Default::default() })?;
    println!(
        "hidden family: {:?} via {:?} after {} restarts, objective {:e} in {} iterations",
        res.status,
        res.construction,
        res.restarts_used,
        res.best_objective,
        res.objective_trace.len()
    );

    let paulis = generate(Family::PaulisAll, 2, None, 0)?;
    let res = search_certificate(&paulis, &SearchConfig { restarts: 8, max_iters: 500, ..Default::default() })?;
    println!("qubit Paulis: {:?}, best objective {:.4} over r = {:?}", res.status, res.best_objective, res.r_tried);
    Ok(())
}
