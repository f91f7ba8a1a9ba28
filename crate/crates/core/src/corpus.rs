//! Seeded generators of random foldings, group elements and sliding block
//! codes, for tests and benchmarks.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::automaton::Automaton;
use crate::counting::congruence_closure;
use crate::error::{Error, Result};
use crate::graph_aut::{enumerate_automorphisms, transducer_from_automorphism, DigraphAutomorphism, DEFAULT_AUT_CAP};
use crate::rule::LocalRule;
use crate::transducer::Transducer;

/// The generator every corpus function expects; equal seeds give equal corpora.
pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A folding of `G(n, m)` obtained by closing a few random state merges.
/// Merges that would collapse everything are usually skipped, so most
/// results have more than one state.
pub fn random_folding<R: Rng>(rng: &mut R, n: usize, m: usize) -> Result<Automaton> {
    let g = Automaton::de_bruijn(n, m)?;
    let states = g.state_count();
    let mut pairs = Vec::new();
    let mut current = crate::partition::StatePartition::discrete(states);
    for _ in 0..rng.gen_range(0..=states) {
        let pair = (rng.gen_range(0..states), rng.gen_range(0..states));
        pairs.push(pair);
        let next = congruence_closure(&g, &pairs)?;
        if next.class_count() == 1 && states > 1 && rng.gen_bool(0.9) {
            pairs.pop();
            continue;
        }
        current = next;
    }
    g.quotient(&current)
}

/// A random automorphism of the underlying digraph of `a`.
pub fn random_automorphism<R: Rng>(rng: &mut R, a: &Automaton) -> Result<DigraphAutomorphism> {
    let all = enumerate_automorphisms(a, DEFAULT_AUT_CAP)?;
    all.choose(rng).cloned().ok_or_else(|| Error::Invariant("automorphism group is empty".into()))
}

/// A minimal element of `H_n`: the product of `factors` machines `H(A, φ)`
/// over random foldings `A` of `G(n, m)`.
pub fn random_hn_element<R: Rng>(rng: &mut R, n: usize, m: usize, factors: usize) -> Result<Transducer> {
    let mut t = Transducer::identity(n)?;
    for _ in 0..factors {
        let a = random_folding(rng, n, m)?;
        let phi = random_automorphism(rng, &a)?;
        t = t.product_min(&transducer_from_automorphism(&a, &phi)?)?;
    }
    Ok(t)
}

/// A rule with a uniformly random table.
pub fn random_rule<R: Rng>(rng: &mut R, n: usize, window: usize) -> Result<LocalRule> {
    let size = crate::automaton::checked_power(n, window, crate::automaton::DEFAULT_STATE_CAP, "rule table")?;
    LocalRule::new(n, window, (0..size).map(|_| rng.gen_range(0..n)).collect())
}

/// The minimal synchronous transducer of a random rule.
pub fn random_sync_transducer<R: Rng>(rng: &mut R, n: usize, window: usize) -> Result<Transducer> {
    Ok(random_rule(rng, n, window)?.to_transducer()?.minimal())
}
