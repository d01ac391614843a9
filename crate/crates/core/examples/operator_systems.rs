//! The span of the products `M_j* M_i`: its dimension, whether it is an
//! algebra, and whether it has a separating vector.

use locc::analysis::{generate, Family};
use locc::certs::StateSet;
use locc::matrix::{gen_pauli_x, gen_pauli_z, matrix_power};
use locc::opsys::{is_multiplicatively_closed, separating_vector_search, span_products, DEFAULT_TRIALS};
use locc::Tolerance;

fn main() -> locc::Result<()> {
    let tol = Tolerance::default();

    let shifts = generate(Family::PaulisX, 4, None, 0)?;
    let sys = span_products(&shifts, &tol);
    println!("shifts, d = 4: dim {}, algebra {}", sys.dim(), is_multiplicatively_closed(&sys, &tol));
    if let Some(v) = separating_vector_search(&sys, DEFAULT_TRIALS, 0, &tol).vector() {
        let moduli: Vec<String> = v.iter().map(|z| format!("{:.3}", z.norm())).collect();
        println!("  separating vector with entry moduli [{}]", moduli.join(", "));
    }

    for d in 3..=6 {
        let x = gen_pauli_x(d);
        let mut ms: Vec<_> = (1..d).map(|i| matrix_power(&x, i)).collect();
        ms.push(gen_pauli_z(d));
        let sys = span_products(&StateSet::new(ms)?, &tol);
        let sep = serde_json::to_string(&separating_vector_search(&sys, DEFAULT_TRIALS, 0, &tol))?;
        println!("shifts plus clock, d = {d}: dim {} (3d-2 = {}), {sep}", sys.dim(), 3 * d - 2);
    }
    Ok(())
}
