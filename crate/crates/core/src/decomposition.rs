//! Torsion decomposition of elements of `H_n`.
//!
//! Each step picks two states `p`, `q` with identical transition rows, finds
//! a vertex-fixing automorphism `τ` of a term `B_i` of the synchronizing
//! sequence of the inverse's automaton that turns the outputs at `q` into
//! those at `p`, and multiplies by `H(B_i, τ)`. The product has `p` and `q`
//! ω-equivalent, so minimizing removes at least one state.

use std::collections::{HashSet, VecDeque};

use crate::automaton::Automaton;
use crate::error::{Error, Result};
use crate::graph_aut::{
    involution_factors, transducer_from_automorphism, vertex_fixing_from_letters, Digraph, DigraphAutomorphism,
};
use crate::perm::Perm;
use crate::transducer::{ElementOrder, Transducer};

/// Visited-graph budget for [`is_amalgamation`].
pub const DEFAULT_AMALGAMATION_CAP: usize = 100_000;

/// One reduction step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecompositionStep {
    /// States with identical transition rows, `p < q`.
    pub pair: (usize, usize),
    /// Maps the outputs at `q` to the outputs at `p`.
    pub alpha: Perm,
    /// Index of the synchronizing-sequence term carrying the automorphism.
    pub level: usize,
    /// That term, `B_i`.
    pub base: Automaton,
    /// State of `B_i` containing `q`.
    pub vertex: usize,
    /// Vertex-fixing automorphisms of `B_i` whose product realizes `alpha`
    /// at `vertex` (one entry unless split into involutions).
    pub automorphisms: Vec<DigraphAutomorphism>,
    /// Minimal forms of `H(B_i, τ)` for each automorphism, in order.
    pub factors: Vec<Transducer>,
    /// The input times all factors, minimized.
    pub reduced: Transducer,
}

/// `original = remainder ⨾ inverse_factors[0] ⨾ inverse_factors[1] ⨾ …`
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    pub original: Transducer,
    pub remainder: Transducer,
    pub inverse_factors: Vec<Transducer>,
    pub steps: Vec<DecompositionStep>,
}

impl Factorization {
    /// Multiplies the remainder by the factors in order.
    pub fn product(&self) -> Result<Transducer> {
        self.inverse_factors
            .iter()
            .try_fold(self.remainder.clone(), |acc, f| acc.product_min(f))
    }
}

/// Lexicographically least pair of distinct states with identical rows.
pub fn find_collapsible_pair(t: &Transducer) -> Result<(usize, usize)> {
    if t.state_count() < 2 {
        return Err(Error::SingleState);
    }
    t.base()
        .row_equal_pairs()
        .into_iter()
        .next()
        .ok_or(Error::NotSynchronizing)
}

/// The permutation `α` with `α(λ(x, q)) = λ(x, p)` for every letter `x`.
pub fn alignment_permutation(t: &Transducer, p: usize, q: usize) -> Result<Perm> {
    let n = t.alphabet_size();
    if t.output_row(p) == t.output_row(q) {
        return Err(Error::EqualOutputRows { p, q });
    }
    let mut alpha = vec![usize::MAX; n];
    for x in 0..n {
        let from = t.output(q, x);
        if alpha[from] != usize::MAX {
            return Err(Error::NotInvertible { state: q });
        }
        alpha[from] = t.output(p, x);
    }
    Perm::new(alpha).map_err(|_| Error::NotInvertible { state: p })
}

/// A located factor: term index, term, vertex, automorphism and `H(B_i, τ)`.
#[derive(Debug, Clone)]
pub struct FoundFactor {
    pub level: usize,
    pub base: Automaton,
    pub vertex: usize,
    pub automorphism: DigraphAutomorphism,
    pub machine: Transducer,
}

/// Scans the synchronizing sequence of the inverse's automaton for the first
/// term where `p` and `q` stay apart and every cycle of `α` consists of
/// parallel edges at the state of `q`.
pub fn find_factor(t: &Transducer, p: usize, q: usize, alpha: &Perm) -> Result<FoundFactor> {
    let inverse = t.invert()?;
    let seq = inverse.base().sync_sequence();
    let cycles = alpha.cycles();
    for (level, term) in seq.terms.iter().enumerate() {
        let cp = term.partition.class_of(p);
        let cq = term.partition.class_of(q);
        if cp == cq {
            break;
        }
        let b = &term.automaton;
        let parallel = cycles
            .iter()
            .all(|c| c.iter().all(|&x| b.delta(cq, x) == b.delta(cq, c[0])));
        if parallel {
            let automorphism = vertex_fixing_from_letters(b, cq, alpha)?;
            let machine = transducer_from_automorphism(b, &automorphism)?;
            return Ok(FoundFactor { level, base: b.clone(), vertex: cq, automorphism, machine });
        }
    }
    Err(Error::Invariant(format!("no term carries the alignment of states {p} and {q}")))
}

fn step_with(t: &Transducer, split: bool) -> Result<DecompositionStep> {
    let (p, q) = find_collapsible_pair(t)?;
    let alpha = alignment_permutation(t, p, q)?;
    let found = find_factor(t, p, q, &alpha)?;
    let automorphisms = if split {
        involution_factors(&found.base, &found.automorphism)?
    } else {
        vec![found.automorphism.clone()]
    };
    let mut factors = Vec::with_capacity(automorphisms.len());
    let mut reduced = t.clone();
    for tau in &automorphisms {
        let h = transducer_from_automorphism(&found.base, tau)?;
        reduced = reduced.product_min(&h)?;
        factors.push(h.minimal());
    }
    if reduced.state_count() >= t.state_count() {
        return Err(Error::Invariant(format!(
            "step on {} states did not shrink (got {})",
            t.state_count(),
            reduced.state_count()
        )));
    }
    Ok(DecompositionStep {
        pair: (p, q),
        alpha,
        level: found.level,
        base: found.base,
        vertex: found.vertex,
        automorphisms,
        factors,
        reduced,
    })
}

/// One reduction step on a minimal element with more than one state.
pub fn decompose_step(t: &Transducer) -> Result<DecompositionStep> {
    step_with(t, false)
}

fn decompose_with(t: &Transducer, split: bool) -> Result<Factorization> {
    if !t.is_in_hn() {
        return Err(Error::NotInHn);
    }
    let original = t.minimal();
    let mut current = original.clone();
    let mut steps = Vec::new();
    while current.state_count() > 1 {
        let step = step_with(&current, split)?;
        current = step.reduced.clone();
        steps.push(step);
    }
    let mut inverse_factors = Vec::new();
    for step in steps.iter().rev() {
        for f in step.factors.iter().rev() {
            inverse_factors.push(f.invert()?.minimal());
        }
    }
    Ok(Factorization { original, remainder: current, inverse_factors, steps })
}

/// Writes `t` as a single-state remainder times finite-order factors.
pub fn decompose(t: &Transducer) -> Result<Factorization> {
    decompose_with(t, false)
}

/// As [`decompose`], with every factor of order at most 2.
pub fn decompose_involutions(t: &Transducer) -> Result<Factorization> {
    decompose_with(t, true)
}

/// Outcome of [`verify`], one flag per check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Verification {
    pub reconstructs: bool,
    pub factors_finite: bool,
    pub amalgamations: bool,
}

impl Verification {
    pub fn ok(&self) -> bool {
        self.reconstructs && self.factors_finite && self.amalgamations
    }
}

/// Re-multiplies the factorization and re-checks factor orders and that each
/// factor's digraph is an amalgamation of the original's.
pub fn verify(f: &Factorization) -> Result<Verification> {
    let reconstructs = f.remainder.state_count() == 1 && f.product()?.equal_omega(&f.original);
    let mut factors_finite = true;
    for h in &f.inverse_factors {
        if !matches!(h.order()?, ElementOrder::Finite(_)) {
            factors_finite = false;
        }
    }
    let source = Digraph::from_automaton(f.original.base());
    let mut amalgamations = true;
    for step in &f.steps {
        if !is_amalgamation(&Digraph::from_automaton(&step.base), &source, DEFAULT_AMALGAMATION_CAP)? {
            amalgamations = false;
        }
    }
    Ok(Verification { reconstructs, factors_finite, amalgamations })
}

/// Whether `target` arises from `source` by repeatedly identifying two
/// amalgamable vertices, up to isomorphism.
pub fn is_amalgamation(target: &Digraph, source: &Digraph, cap: usize) -> Result<bool> {
    if target.vertex_count() > source.vertex_count() {
        return Ok(false);
    }
    let goal = target.canonical_form();
    let start = source.canonical_form();
    if start == goal {
        return Ok(true);
    }
    let mut seen: HashSet<Vec<usize>> = HashSet::from([start]);
    let mut queue = VecDeque::from([source.clone()]);
    while let Some(g) = queue.pop_front() {
        for (u, v) in g.amalgamable_pairs() {
            let merged = g.amalgamate(u, v);
            let key = merged.canonical_form();
            if key == goal {
                return Ok(true);
            }
            if merged.vertex_count() > target.vertex_count() && seen.insert(key) {
                if seen.len() > cap {
                    return Err(Error::CapExceeded { what: "amalgamation search", cap });
                }
                queue.push_back(merged);
            }
        }
    }
    Ok(false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transducer::tests::nonpermaut_machine;

    #[test]
    fn pair_and_alignment() {
        let t = nonpermaut_machine();
        assert_eq!(find_collapsible_pair(&t).unwrap(), (0, 1));
        assert_eq!(alignment_permutation(&t, 0, 1).unwrap(), Perm::transposition(3, 0, 1));
        let one = Transducer::identity(3).unwrap();
        assert_eq!(find_collapsible_pair(&one), Err(Error::SingleState));
        let twin = Transducer::from_rows(2, &[(vec![0, 1], vec![0, 1]), (vec![0, 1], vec![0, 1])]).unwrap();
        assert_eq!(alignment_permutation(&twin, 0, 1), Err(Error::EqualOutputRows { p: 0, q: 1 }));
    }

    #[test]
    fn single_step_on_the_three_state_machine() {
        let t = nonpermaut_machine();
        let step = decompose_step(&t).unwrap();
        assert!(step.reduced.state_count() <= 2);
        assert_eq!(step.factors.len(), 1);
        assert_eq!(step.factors[0].state_count(), 2);
        assert!(step.reduced.base().sync_level().unwrap() <= t.base().sync_level().unwrap());
        assert!(t.base().is_collapse_equivalent(step.reduced.base(), 1000).unwrap());
        // the raw core keeps every state, paired with its class in B_i
        let h = transducer_from_automorphism(&step.base, &step.automorphisms[0]).unwrap();
        let core = t.product_raw(&h).unwrap().core().unwrap();
        assert_eq!(core.state_count(), t.state_count());
    }

    #[test]
    fn three_factor_decomposition() {
        let t = nonpermaut_machine();
        let f = decompose(&t).unwrap();
        assert_eq!(f.remainder.state_count(), 1);
        assert_eq!(f.inverse_factors.len(), 2);
        assert!(f.inverse_factors.iter().all(|h| h.state_count() == 2));
        assert!(f.inverse_factors.iter().all(|h| h.order().unwrap() == ElementOrder::Finite(2)));
        assert!(verify(&f).unwrap().ok());
        let inv = decompose_involutions(&t).unwrap();
        assert_eq!(inv.inverse_factors, f.inverse_factors);
    }

    #[test]
    fn worked_example_factors_multiply_back() {
        // single-state t, then P, then Q, as displayed in the worked example
        let t = Transducer::single_state(&Perm::new(vec![2, 1, 0]).unwrap()).unwrap();
        let p = Transducer::from_rows(3, &[(vec![1, 0, 0], vec![0, 1, 2]), (vec![1, 0, 0], vec![0, 2, 1])]).unwrap();
        let q = Transducer::from_rows(3, &[(vec![1, 1, 0], vec![1, 0, 2]), (vec![1, 1, 0], vec![0, 1, 2])]).unwrap();
        assert!(p.is_in_hn() && q.is_in_hn());
        let product = t.product_min(&p).unwrap().product_min(&q).unwrap();
        assert_eq!(product.state_count(), 3);
        assert!(product.equal_omega(&nonpermaut_machine()));
    }

    #[test]
    fn single_state_inputs() {
        let rho = Transducer::single_state(&Perm::new(vec![1, 2, 0]).unwrap()).unwrap();
        let f = decompose(&rho).unwrap();
        assert!(f.inverse_factors.is_empty());
        assert_eq!(f.remainder, rho);
        assert!(verify(&f).unwrap().ok());
        assert!(decompose_involutions(&rho).unwrap().inverse_factors.is_empty());
        assert_eq!(decompose(&Transducer::shift(2).unwrap()), Err(Error::NotInHn));
    }

    #[test]
    fn amalgamations() {
        let g22 = Digraph::from_automaton(&Automaton::de_bruijn(2, 2).unwrap());
        let g21 = Digraph::from_automaton(&Automaton::de_bruijn(2, 1).unwrap());
        assert!(is_amalgamation(&g22, &g22, 100).unwrap());
        assert!(is_amalgamation(&g21, &g22, 100).unwrap());
        assert!(!is_amalgamation(&g22, &g21, 100).unwrap());
    }
}
