//! Permutation families: distinguishable exactly when no two permutations
//! agree anywhere, and then the family is a Latin square.

use locc::analysis::cyclic_permutations;
use locc::certs::permutation_analysis;
use locc::random::rng;
use locc::Tolerance;

fn main() -> locc::Result<()> {
    let tol = Tolerance::default();
    let mut g = rng(5);
    for d in [3, 5] {
        let perms = cyclic_permutations(d, &mut g);
        let pa = permutation_analysis(&perms, &tol)?;
        println!("d = {d}: distinguishable = {}", pa.distinguishable);
        if let Some(square) = pa.latin {
            for row in &square.cells {
                println!("  {row:?}");
            }
            println!("  valid Latin square: {}", square.is_valid());
        }
    }

    // a repeated permutation agrees with itself everywhere
    let mut perms = cyclic_permutations(4, &mut g);
    perms[1] = perms[0].clone();
    let pa = permutation_analysis(&perms[..2], &tol)?;
    println!("colliding pair: distinguishable = {}", pa.distinguishable);
    Ok(())
}
