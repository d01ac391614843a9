//! Orthogonality in the Hilbert module over the diagonal algebra: at most `d`
//! orthogonal unitaries, and ranks of an orthogonal family sum to at most `d²`.

use locc::hmod::{check_orthogonal_family, module_inner, rank_bound_check, ModuleContext};
use locc::matrix::{gen_pauli, gen_pauli_x, matrix_power, max_abs};
use locc::Tolerance;

fn main() -> locc::Result<()> {
    let d = 4;
    let ctx = ModuleContext::standard(d, Tolerance::default());
    let x = gen_pauli_x(d);
    let shifts: Vec<_> = (0..d).map(|k| matrix_power(&x, k)).collect();

    let report = check_orthogonal_family(&shifts, &ctx)?;
    println!(
        "shifts: orthogonal {}, n = {}, expanded to {} matrices with max overlap {:e}",
        report.orthogonal, report.n, report.expansion_size, report.expansion_max_overlap
    );
    let bound = rank_bound_check(&shifts, &ctx, 0)?;
    println!("ranks {:?} sum to {} of at most {}", bound.ranks, bound.sum_ranks, bound.bound);

    // one more Pauli breaks orthogonality somewhere
    let mut extra = shifts.clone();
    extra.push(gen_pauli(d, 1, 1));
    let report = check_orthogonal_family(&extra, &ctx)?;
    let (i, j) = report.failing_pair.expect("n > d cannot be orthogonal");
    let overlap = module_inner(&extra[i], &extra[j], &ctx)?;
    println!("with X Z added: pair ({i}, {j}) has module inner product of size {:e}", max_abs(&overlap));
    Ok(())
}
