//! Acceptance checks, one PASS/FAIL line each. Run with
//! `cargo test -p shiftaut-cli --test acceptance --release`.

use std::collections::BTreeMap;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rand::Rng;

use shiftaut::corpus::{random_hn_element, random_sync_transducer, seeded};
use shiftaut::counting::{bell, count_foldings_g_n_2, enumerate_foldings, EnumerationMethod};
use shiftaut::decomposition::{decompose, verify};
use shiftaut::graph_aut::{
    enumerate_automorphisms, is_permutation_induced, transducer_from_automorphism, verify_embedding, DEFAULT_AUT_CAP,
};
use shiftaut::subgroup::{subgroup_automaton, subgroup_closure, DEFAULT_SUBGROUP_CAP};
use shiftaut::{Automaton, ElementOrder, LocalRule, Perm, Transducer};

type Check = Result<String, String>;
type Criterion = (&'static str, Duration, fn() -> Check);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn involution() -> Transducer {
    Transducer::from_rows(
        3,
        &[
            (vec![0, 1, 2], vec![2, 0, 1]),
            (vec![0, 1, 2], vec![2, 1, 0]),
            (vec![1, 0, 2], vec![1, 2, 0]),
        ],
    )
    .unwrap()
}

fn foldings(n: usize, m: usize) -> Result<Vec<Automaton>, String> {
    let g = Automaton::de_bruijn(n, m).map_err(err)?;
    enumerate_foldings(&g, EnumerationMethod::Lattice)
        .map_err(err)?
        .iter()
        .map(|p| g.quotient(p).map_err(err))
        .collect()
}

fn fold_counts_through_cli() -> Check {
    let expected = [
        "1",
        "5",
        "192",
        "78721",
        "519338423",
        "82833228599906",
        "429768478195109381814",
    ];
    for (i, want) in expected.iter().enumerate() {
        let n = (i + 1).to_string();
        let out = Command::new(env!("CARGO_BIN_EXE_shiftaut"))
            .args(["fold-count", &n, "2"])
            .output()
            .map_err(err)?;
        let got = String::from_utf8_lossy(&out.stdout).trim().to_string();
        ensure(out.status.success() && got == *want, || format!("n={n}: got {got:?}, want {want}"))?;
    }
    Ok("n = 1..7 exact".into())
}

fn brute_force_counts() -> Check {
    let mut seen = Vec::new();
    for (n, m, want) in [(2, 2, 5usize), (3, 2, 192), (2, 3, 30), (2, 4, 1247)] {
        let g = Automaton::de_bruijn(n, m).map_err(err)?;
        let got = enumerate_foldings(&g, EnumerationMethod::Lattice).map_err(err)?.len();
        ensure(got == want, || format!("G({n},{m}): {got} foldings, want {want}"))?;
        if m == 2 {
            let formula = count_foldings_g_n_2(n).map_err(err)?;
            ensure(formula == got.into(), || format!("G({n},2): formula gives {formula}"))?;
        }
        seen.push(format!("G({n},{m})={got}"));
    }
    Ok(seen.join(" "))
}

fn bell_foldings() -> Check {
    for n in 2..=6 {
        let g = Automaton::de_bruijn(n, 1).map_err(err)?;
        for method in [EnumerationMethod::Exhaustive, EnumerationMethod::Lattice] {
            let got = enumerate_foldings(&g, method).map_err(err)?.len();
            ensure(bell(n) == got.into(), || format!("G({n},1): {got} foldings, Bell = {}", bell(n)))?;
        }
    }
    Ok("n = 2..6, both enumeration methods".into())
}

fn automorphism_groups() -> Check {
    let mut sizes = Vec::new();
    for (n, m) in [(2, 2), (2, 3), (3, 2)] {
        let g = Automaton::de_bruijn(n, m).map_err(err)?;
        let all = enumerate_automorphisms(&g, DEFAULT_AUT_CAP).map_err(err)?;
        let factorial: usize = (1..=n).product();
        ensure(all.len() == factorial, || format!("G({n},{m}): {} automorphisms", all.len()))?;
        for phi in &all {
            ensure(is_permutation_induced(&g, phi).map_err(err)?.is_some(), || {
                format!("G({n},{m}): automorphism not induced by a letter permutation")
            })?;
        }
        sizes.push(all.len());
    }
    let a = involution().base().clone();
    let all = enumerate_automorphisms(&a, DEFAULT_AUT_CAP).map_err(err)?;
    let mut induced = 0;
    for phi in &all {
        induced += usize::from(is_permutation_induced(&a, phi).map_err(err)?.is_some());
    }
    ensure(all.len() == 6 && induced < 6, || format!("{} automorphisms, {induced} induced", all.len()))?;
    Ok(format!("de Bruijn groups {sizes:?}; 3-state example: 6 automorphisms, {} not induced", 6 - induced))
}

fn binary_group() -> Check {
    let mut machines = 0;
    for m in [2, 3] {
        for a in foldings(2, m)? {
            for phi in enumerate_automorphisms(&a, DEFAULT_AUT_CAP).map_err(err)? {
                let h = transducer_from_automorphism(&a, &phi).map_err(err)?.weak_minimize();
                ensure(h.state_count() == 1, || format!("H(A,φ) kept {} states", h.state_count()))?;
                machines += 1;
            }
        }
    }
    let id = Transducer::identity(2).map_err(err)?;
    let flip = Transducer::single_state(&Perm::new(vec![1, 0]).map_err(err)?).map_err(err)?;
    let g = subgroup_closure(&[id.clone(), flip.clone()], DEFAULT_SUBGROUP_CAP).map_err(err)?;
    ensure(g.len() == 2, || format!("closure has {} elements", g.len()))?;
    ensure(flip.product_min(&flip).map_err(err)?.is_identity(), || "flip squared is not the identity".into())?;
    ensure(!flip.is_identity(), || "flip is trivial".into())?;
    Ok(format!("{machines} machines collapse to one state; single states form C2"))
}

fn embeddings() -> Check {
    let mut pairs = 0;
    for (n, m) in [(2, 2), (3, 2)] {
        for a in foldings(n, m)? {
            let all = enumerate_automorphisms(&a, DEFAULT_AUT_CAP).map_err(err)?;
            for phi in &all {
                for psi in &all {
                    ensure(verify_embedding(&a, phi, psi).map_err(err)?, || {
                        format!("embedding fails on a {}-state folding of G({n},{m})", a.state_count())
                    })?;
                    pairs += 1;
                }
            }
        }
    }
    Ok(format!("{pairs} automorphism pairs"))
}

fn check_decomposition(t: &Transducer) -> Result<usize, String> {
    let f = decompose(t).map_err(err)?;
    let size = f.original.state_count();
    ensure(f.inverse_factors.len() < size.max(1), || {
        format!("{} factors for {size} states", f.inverse_factors.len())
    })?;
    ensure(f.remainder.state_count() == 1, || "remainder has several states".into())?;
    ensure(verify(&f).map_err(err)?.ok(), || "verification failed".into())?;
    for h in &f.inverse_factors {
        match h.order().map_err(err)? {
            ElementOrder::Finite(k) if k <= 2 => {}
            other => return Err(format!("factor of order {other:?}")),
        }
    }
    Ok(size)
}

fn decompositions() -> Check {
    check_decomposition(&involution())?;
    let mut rng = seeded(0xdec0);
    let mut sizes = BTreeMap::new();
    for _ in 0..120 {
        let factors = rng.gen_range(1..=4);
        let t = random_hn_element(&mut rng, 3, 2, factors).map_err(err)?;
        *sizes.entry(check_decomposition(&t)?).or_insert(0) += 1;
    }
    Ok(format!("worked example + 120 random elements, states {sizes:?}"))
}

/// Half elements of H_n, half arbitrary synchronous machines.
fn corpus_machine<R: Rng>(rng: &mut R, i: usize) -> Result<Transducer, String> {
    let n = 2 + i % 2;
    if i % 4 < 2 {
        random_hn_element(rng, n, 2, 1 + i % 3).map_err(err)
    } else {
        random_sync_transducer(rng, n, 1 + i % 3).map_err(err)
    }
}

fn sync_bound() -> Check {
    let mut rng = seeded(8);
    for i in 0..500 {
        let t = corpus_machine(&mut rng, i)?;
        let u = corpus_machine(&mut rng, i)?;
        let (kt, ku) = (t.sync_level().unwrap(), u.sync_level().unwrap());
        for product in [t.product_raw(&u).map_err(err)?, t.product_min(&u).map_err(err)?] {
            let k = product.sync_level().ok_or("product does not synchronize")?;
            ensure(k <= kt + ku, || format!("pair {i}: level {k} > {kt} + {ku}"))?;
        }
    }
    Ok("500 pairs, 0 violations".into())
}

fn rule_homomorphism() -> Check {
    let mut rng = seeded(9);
    for i in 0..200 {
        let t = corpus_machine(&mut rng, i)?;
        let u = corpus_machine(&mut rng, i)?;
        let composed = LocalRule::from_transducer(&t)
            .and_then(|f| f.compose(&LocalRule::from_transducer(&u)?))
            .map_err(err)?;
        let product = LocalRule::from_transducer(&t.product_min(&u).map_err(err)?).map_err(err)?;
        ensure(product.same_map(&composed), || format!("pair {i}: window maps differ"))?;
    }
    Ok("200 pairs, 0 violations".into())
}

fn shift_commutation() -> Check {
    let mut rng = seeded(10);
    for i in 0..200 {
        let t = corpus_machine(&mut rng, i)?;
        let n = t.alphabet_size();
        let word: Vec<usize> = (0..rng.gen_range(1..=9)).map(|_| rng.gen_range(0..n)).collect();
        let mut rotated = word.clone();
        rotated.rotate_left(1);
        let mut image = t.apply_periodic(&word).map_err(err)?;
        image.rotate_left(1);
        ensure(image == t.apply_periodic(&rotated).map_err(err)?, || format!("pair {i}: {word:?}"))?;
    }
    Ok("200 pairs, 0 violations".into())
}

fn subgroup_reconstruction() -> Check {
    let mut groups = vec![vec![involution()]];
    for a in foldings(3, 2)? {
        if groups.len() == 4 {
            break;
        }
        let machines: Vec<Transducer> = enumerate_automorphisms(&a, DEFAULT_AUT_CAP)
            .map_err(err)?
            .iter()
            .map(|phi| transducer_from_automorphism(&a, phi).map(|t| t.minimal()))
            .collect::<Result<_, _>>()
            .map_err(err)?;
        if a.state_count() == 3 && machines.iter().any(|t| t.state_count() > 1) {
            groups.push(machines);
        }
    }
    ensure(groups.len() == 4, || "not enough folding groups".into())?;
    let mut orders = Vec::new();
    for gens in &groups {
        let g = subgroup_closure(gens, DEFAULT_SUBGROUP_CAP).map_err(err)?;
        let ag = subgroup_automaton(&g).map_err(err)?;
        ag.check(&g).map_err(err)?;
        for (h, phi) in g.elements.iter().zip(&ag.embedding) {
            let back = transducer_from_automorphism(&ag.automaton, phi).map_err(err)?.weak_minimize();
            ensure(back.equal_omega(h), || "weak minimal form differs from the element".into())?;
        }
        orders.push((g.len(), ag.automaton.state_count()));
    }
    Ok(format!("(order, |A(G)|) = {orders:?}"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("AC1 folding formula", Duration::from_secs(10), fold_counts_through_cli),
        ("AC2 brute-force folding counts", Duration::from_secs(300), brute_force_counts),
        ("AC3 G(n,1) foldings are Bell numbers", Duration::MAX, bell_foldings),
        ("AC4 automorphism groups", Duration::from_secs(10), automorphism_groups),
        ("AC5 binary automorphisms and C2", Duration::from_secs(60), binary_group),
        ("AC6 embedding into H_n", Duration::from_secs(120), embeddings),
        ("AC7 decomposition", Duration::from_secs(300), decompositions),
        ("AC8 product synchronization bound", Duration::MAX, sync_bound),
        ("AC9 rule composition homomorphism", Duration::MAX, rule_homomorphism),
        ("AC10 shift commutation", Duration::MAX, shift_commutation),
        ("AC11 finite subgroup reconstruction", Duration::from_secs(60), subgroup_reconstruction),
    ];
    let mut failed = 0;
    for (name, limit, check) in criteria {
        let start = Instant::now();
        let result = check();
        let elapsed = start.elapsed();
        let verdict = match result {
            Ok(detail) if elapsed <= limit => format!("PASS {name} ({:.2?}): {detail}", elapsed),
            Ok(detail) => format!("FAIL {name} ({elapsed:.2?} over {limit:?}): {detail}"),
            Err(e) => format!("FAIL {name} ({elapsed:.2?}): {e}"),
        };
        if verdict.starts_with("FAIL") {
            failed += 1;
        }
        println!("{verdict}");
    }
    println!("{} of 11 criteria passed", 11 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
