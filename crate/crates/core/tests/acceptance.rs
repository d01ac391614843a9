//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use locc::analysis::{analyze, cyclic_permutations, generate, schmidt_family, AnalysisOptions, Family};
use locc::certs::{fillmore_zero_diagonal, permutation_analysis, verify_oneway_certificate, Certificate, StateSet};
use locc::hmod::{check_orthogonal_family, rank_bound_check, ModuleContext};
use locc::matrix::{
    c, gen_pauli, gen_pauli_x, gen_pauli_z, identity, matrix_power, max_abs, permutation_matrix, unitary_defect,
};
use locc::opsys::{
    is_multiplicatively_closed, separating_vector_search, span_products, NoneReason, SeparatingSearch, DEFAULT_TRIALS,
};
use locc::random::{
    derive_seed, gaussian_matrix, haar_coisometry, haar_unitary, normalize_state, orthogonal_pair, random_permutation,
    random_phase_diagonal, rng,
};
use locc::search::{gradient, numeric_search, objective, search_certificate, Construction, SearchConfig, SearchStatus};
use locc::simproto::{build_protocol, exact_success, simulate};
use locc::{ComplexMatrix, Tolerance};

struct Outcome {
    pass: bool,
    detail: String,
}

type Criterion = (&'static str, fn() -> Outcome);

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn tol() -> Tolerance {
    Tolerance::default()
}

fn set(ms: Vec<ComplexMatrix>) -> StateSet {
    StateSet::new(ms).expect("valid state set")
}

fn bell_walkthrough() -> Outcome {
    let start = Instant::now();
    let s = set(vec![identity(2), gen_pauli_x(2)]);
    let rep = analyze(&s, &AnalysisOptions::default()).unwrap();
    let elapsed = start.elapsed().as_secs_f64();
    let Some(cert) = rep.certificate else {
        return outcome(false, "no certificate");
    };
    let p = rep.exact_success.unwrap();
    outcome(
        cert.residual <= 1e-12 && (p - 1.0).abs() <= 1e-10 && elapsed < 1.0,
        format!("residual {:.1e}, exact success {p}, {elapsed:.3}s", cert.residual),
    )
}

fn latin_squares() -> Outcome {
    let mut g = rng(2);
    let (mut valid, mut rejected) = (0, 0);
    for t in 0..50 {
        let d = 2 + t % 7;
        let mut ps = cyclic_permutations(d, &mut g);
        let rep = analyze(&set(ps.clone()), &AnalysisOptions { seed: t as u64, ..Default::default() }).unwrap();
        if rep.certificate.is_some() && rep.latin_square.is_some_and(|l| l.is_valid()) {
            valid += 1;
        }
        // make the last member agree with the identity on basis vector 0
        let last = ps.pop().unwrap();
        let mut sigma: Vec<usize> = (0..d).map(|j| (0..d).find(|&i| last[(i, j)].re > 0.5).unwrap()).collect();
        let hit = sigma.iter().position(|&x| x == 0).unwrap();
        sigma.swap(0, hit);
        ps.push(permutation_matrix(&sigma));
        let pa = permutation_analysis(&ps, &tol()).unwrap();
        let rep = analyze(&set(ps), &AnalysisOptions::default()).unwrap();
        if !pa.distinguishable && !rep.arbitrary_distinguishable && rep.certificate.is_none() {
            rejected += 1;
        }
    }
    outcome(valid == 50 && rejected == 50, format!("{valid}/50 valid Latin squares, {rejected}/50 perturbed rejected"))
}

fn schmidt_path() -> Outcome {
    let mut g = rng(3);
    let (mut ok, mut slowest) = (0, 0.0f64);
    for t in 0..100 {
        let d = 2 + t % 5;
        let n = 1 + (t / 5) % d;
        let s = set(schmidt_family(d, n, &mut g).unwrap());
        let start = Instant::now();
        let rep = analyze(&s, &AnalysisOptions { seed: t as u64, ..Default::default() }).unwrap();
        slowest = slowest.max(start.elapsed().as_secs_f64());
        if rep.certificate.is_some_and(|c| c.residual <= 1e-8) {
            ok += 1;
        }
    }
    outcome(ok >= 95 && slowest < 5.0, format!("{ok}/100 recovered, slowest family {slowest:.3}s"))
}

fn zero_diagonal_similarity() -> Outcome {
    let mut g = rng(4);
    let (mut ok, mut total, mut worst) = (0, 0, 0.0f64);
    for d in 2..=8 {
        for _ in 0..1000 {
            let x = gaussian_matrix(d, d, &mut g);
            let m = &x - identity(d) * (x.trace() / c(d as f64, 0.0));
            total += 1;
            let Ok(v) = fillmore_zero_diagonal(&m, &tol()) else { continue };
            let diag = (v.adjoint() * &m * &v).diagonal().iter().map(|z| z.norm()).fold(0.0, f64::max);
            let scaled = diag / max_abs(&m).max(1.0);
            worst = worst.max(scaled);
            if unitary_defect(&v) <= 1e-10 && scaled <= 1e-8 {
                ok += 1;
            }
        }
    }
    outcome(ok == total, format!("{ok}/{total}, worst scaled diagonal {worst:.1e}"))
}

fn orthogonal_pairs() -> Outcome {
    let mut g = rng(5);
    let mut ok = 0;
    for t in 0..500 {
        let d = 2 + t % 7;
        let (m1, m2) = orthogonal_pair(d, &mut g);
        let res = search_certificate(&set(vec![m1, m2]), &SearchConfig::default()).unwrap();
        if res.status == SearchStatus::Found && res.construction == Construction::Fillmore {
            ok += 1;
        }
    }
    outcome(ok == 500, format!("{ok}/500 found via Fillmore"))
}

fn dimension_count() -> Outcome {
    let mut dims = Vec::new();
    let mut pass = true;
    for d in 3..=6 {
        let x = gen_pauli_x(d);
        let mut ms: Vec<_> = (1..d).map(|i| matrix_power(&x, i)).collect();
        ms.push(gen_pauli_z(d));
        let sys = span_products(&set(ms), &tol());
        dims.push(sys.dim());
        let short_circuit = matches!(
            separating_vector_search(&sys, DEFAULT_TRIALS, 0, &tol()),
            SeparatingSearch::ProbablyNone { reason: NoneReason::DimensionBound, .. }
        );
        pass &= sys.dim() == 3 * d - 2 && short_circuit;
    }
    outcome(pass, format!("dimensions {dims:?} for d = 3..6 (expected 3d-2)"))
}

fn closed_unitary_families() -> Outcome {
    let mut g = rng(7);
    let mut ok = 0;
    for t in 0..50 {
        let d = 2 + t % 5;
        let a = haar_unitary(d, &mut g);
        let b = haar_unitary(d, &mut g);
        let x = gen_pauli_x(d);
        let s = set((0..d).map(|k| &a * matrix_power(&x, k) * &b).collect());
        let certified = verify_oneway_certificate(&s, &b.adjoint(), &tol()).unwrap().accepted;
        let sys = span_products(&s, &tol());
        let separating = separating_vector_search(&sys, DEFAULT_TRIALS, t as u64, &tol());
        if certified
            && sys.dim() == d
            && is_multiplicatively_closed(&sys, &tol())
            && matches!(separating, SeparatingSearch::Found { .. })
        {
            ok += 1;
        }
    }
    outcome(ok == 50, format!("{ok}/50 closed with a separating vector"))
}

fn bound_saturation() -> Outcome {
    let mut saturated = true;
    let mut worst = 0.0f64;
    for d in 2..=8 {
        let x = gen_pauli_x(d);
        let us: Vec<_> = (0..d).map(|k| matrix_power(&x, k)).collect();
        let rep = check_orthogonal_family(&us, &ModuleContext::standard(d, tol())).unwrap();
        worst = worst.max(rep.expansion_max_overlap);
        saturated &= rep.orthogonal && rep.n == d && rep.within_bound && rep.expansion_size == d * d;
    }
    saturated &= worst <= 1e-10;

    // adversarial: d+1 candidates built to be as orthogonal as possible
    let mut counterexamples = 0;
    for t in 0..1000u64 {
        let mut g = rng(derive_seed(8, t));
        let d = 2 + (t % 3) as usize;
        let w = if t % 2 == 0 { identity(d) } else { haar_coisometry(d, d + (t as usize / 2) % (d + 1), &mut g) };
        let ctx = ModuleContext::new(w, tol()).unwrap();
        let us: Vec<ComplexMatrix> = match t % 3 {
            0 => (0..=d).map(|_| haar_unitary(d, &mut g)).collect(),
            1 => {
                let x = gen_pauli_x(d);
                let mut us: Vec<_> = (0..d).map(|k| matrix_power(&x, k) * random_phase_diagonal(d, &mut g)).collect();
                us.push(gen_pauli_z(d) * haar_unitary(d, &mut g));
                us
            }
            _ => {
                let picks = random_permutation(d * d, &mut g);
                picks[..=d].iter().map(|&p| gen_pauli(d, p / d, p % d)).collect()
            }
        };
        if check_orthogonal_family(&us, &ctx).unwrap().orthogonal {
            counterexamples += 1;
        }
    }
    outcome(
        saturated && counterexamples == 0,
        format!("n = d saturated for d = 2..8 (max expansion overlap {worst:.1e}); {counterexamples} counterexamples in 1000 attempts"),
    )
}

fn rank_bound() -> Outcome {
    let mut g = rng(9);
    let mut ok = 0;
    for t in 0..100 {
        let d = 2 + t % 4;
        let w = haar_unitary(d, &mut g);
        let x = gen_pauli_x(d);
        // members sharing a shift use disjoint diagonal supports
        let mut ms = Vec::new();
        for k in 0..d {
            let order = random_permutation(d, &mut g);
            let mut rest = &order[..];
            while !rest.is_empty() {
                let take = 1 + random_permutation(rest.len(), &mut g)[0];
                let (chunk, tail) = rest.split_at(take);
                let diag = ComplexMatrix::from_fn(d, d, |i, j| {
                    if i == j && chunk.contains(&i) {
                        locc::random::gaussian_complex(&mut g) + c(0.1, 0.0)
                    } else {
                        c(0.0, 0.0)
                    }
                });
                ms.push(normalize_state(&(matrix_power(&x, k) * diag * w.adjoint())));
                rest = tail;
            }
        }
        let ctx = ModuleContext::new(w, tol()).unwrap();
        let rep = rank_bound_check(&ms, &ctx, t as u64).unwrap();
        if rep.holds == Some(true) {
            ok += 1;
        }
    }
    let mut equality = true;
    for d in 2..=5 {
        let a = haar_unitary(d, &mut g);
        let b = haar_unitary(d, &mut g);
        let x = gen_pauli_x(d);
        let us: Vec<_> = (0..d).map(|k| &a * matrix_power(&x, k) * &b).collect();
        let ctx = ModuleContext::new(b.adjoint(), tol()).unwrap();
        let rep = rank_bound_check(&us, &ctx, 0).unwrap();
        equality &= rep.holds == Some(true) && rep.sum_ranks == d * d;
    }
    outcome(ok == 100 && equality, format!("{ok}/100 within the bound; unitary n = d families saturate: {equality}"))
}

fn search_numerics() -> Outcome {
    let mut g = rng(10);
    let mut worst_rel = 0.0f64;
    for t in 0..50 {
        let d = 2 + t % 3;
        let r = d + t % (7 - d);
        let n = 2 + t % 3;
        let s = set((0..n).map(|_| normalize_state(&gaussian_matrix(d, d, &mut g))).collect());
        let w = haar_coisometry(d, r, &mut g);
        let analytic = gradient(&w, &s).unwrap();
        let h = 1e-6;
        let mut numeric = ComplexMatrix::zeros(d, r);
        for a in 0..d {
            for b in 0..r {
                for (unit, part) in [(c(1.0, 0.0), c(1.0, 0.0)), (c(0.0, 1.0), c(0.0, 1.0))] {
                    let mut plus = w.clone();
                    plus[(a, b)] += unit * h;
                    let mut minus = w.clone();
                    minus[(a, b)] -= unit * h;
                    let slope = (objective(&plus, &s).unwrap() - objective(&minus, &s).unwrap()) / (2.0 * h);
                    numeric[(a, b)] += part * slope;
                }
            }
        }
        worst_rel = worst_rel.max((&numeric - &analytic).norm() / analytic.norm());
    }

    // numerical search on a planted instance plus the qubit Paulis
    let d = 3;
    let b = haar_unitary(d, &mut g);
    let x = gen_pauli_x(d);
    let planted = set((0..d)
        .map(|k| {
            let diag = ComplexMatrix::from_diagonal(&locc::random::gaussian_vector(d, &mut g));
            normalize_state(&(matrix_power(&x, k) * diag * b.adjoint()))
        })
        .collect());
    let found = numeric_search(&planted, &SearchConfig { r: Some(d), restarts: 8, ..Default::default() }).unwrap();
    let paulis = generate(Family::PaulisAll, 2, None, 0).unwrap();
    let missing = search_certificate(&paulis, &SearchConfig::default()).unwrap();
    let defect = found.max_coisometry_defect.max(missing.max_coisometry_defect);
    outcome(
        worst_rel <= 1e-5 && defect <= 1e-10 && found.status == SearchStatus::Found && missing.status == SearchStatus::NotFound,
        format!(
            "gradient relative error {worst_rel:.1e}, max co-isometry defect {defect:.1e}, planted {:?}, Paulis {:?} (best objective {:.3})",
            found.status, missing.status, missing.best_objective
        ),
    )
}

fn certified_sets() -> Vec<StateSet> {
    let mut g = rng(11);
    let mut sets = vec![set(vec![identity(2), gen_pauli_x(2)])];
    for d in 2..=7 {
        sets.push(generate(Family::PaulisX, d, None, 0).unwrap());
    }
    for d in [3, 4] {
        sets.push(generate(Family::PaulisZ, d, None, 0).unwrap());
    }
    for d in 3..=5 {
        sets.push(set(cyclic_permutations(d, &mut g)));
    }
    for d in 2..=5 {
        let (a, b) = orthogonal_pair(d, &mut g);
        sets.push(set(vec![a, b]));
    }
    for (d, n) in [(3, 2), (4, 3), (5, 5), (6, 4)] {
        sets.push(set(schmidt_family(d, n, &mut g).unwrap()));
    }
    sets
}

fn monte_carlo() -> Outcome {
    let sets = certified_sets();
    let mut worst_z = 0.0f64;
    let mut pass = sets.len() == 20;
    for (t, s) in sets.iter().enumerate() {
        let rep = analyze(s, &AnalysisOptions { seed: t as u64, ..Default::default() }).unwrap();
        let Some(cert): Option<Certificate> = rep.certificate else {
            pass = false;
            continue;
        };
        let protocol = build_protocol(s, &cert, &tol()).unwrap();
        let p = exact_success(s, &protocol).unwrap();
        for seed in 0..10 {
            let sim = simulate(s, &protocol, 100_000, seed).unwrap();
            let gap = (sim.frequency() - p).abs();
            let sigma = sim.standard_error();
            // written so that a NaN sigma counts as a failure
            let within = gap <= 5.0 * sigma;
            if !within {
                pass = false;
            }
            if sigma > 0.0 {
                worst_z = worst_z.max(gap / sigma);
            }
        }
    }
    outcome(pass, format!("{} certified sets x 10 seeds x 1e5 trials, worst deviation {worst_z:.2} sigma", sets.len()))
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("Bell walkthrough", bell_walkthrough),
        ("permutation families and Latin squares", latin_squares),
        ("simultaneous Schmidt path", schmidt_path),
        ("zero-diagonal unitary similarity", zero_diagonal_similarity),
        ("orthogonal pairs via Fillmore", orthogonal_pairs),
        ("operator system dimension count", dimension_count),
        ("algebra and separating vector for d unitaries", closed_unitary_families),
        ("orthogonal unitary bound n <= d", bound_saturation),
        ("rank bound", rank_bound),
        ("search engine numerics", search_numerics),
        ("Monte Carlo consistency", monte_carlo),
    ];
    let mut failures = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| outcome(false, "panicked"));
        if !result.pass {
            failures += 1;
        }
        println!(
            "criterion {:>2} {} {name}: {} [{:.2}s]",
            k + 1,
            if result.pass { "PASS" } else { "FAIL" },
            result.detail,
            start.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {}/{} criteria passed", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
