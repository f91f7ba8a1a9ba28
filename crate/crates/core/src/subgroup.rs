//! Finite subgroups of `H_n` and the automaton `A(G)` on which such a
//! subgroup acts by digraph automorphisms.
//!
//! For a word `Γ` and a word of states `P = p_1 … p_m`, the dual reading
//! feeds `Γ` through a chain of copies of `H` started at `p_1, …, p_m`; the
//! `i`-th copy ends in a state `o_i` and passes its output on. For elements
//! of a finite subgroup and `|Γ|` at least the largest synchronizing level,
//! the end-state word does not depend on `P` and is periodic.

use std::collections::{BTreeSet, HashMap};

use crate::automaton::{checked_power, Automaton, DEFAULT_STATE_CAP};
use crate::canonical::CanonicalKey;
use crate::error::{Error, Result};
use crate::graph_aut::DigraphAutomorphism;
use crate::partition::StatePartition;
use crate::perm::Perm;
use crate::transducer::Transducer;

/// Default bound on subgroup size.
pub const DEFAULT_SUBGROUP_CAP: usize = 512;
/// Bound on the number of dual-reading steps explored by [`w_word`].
pub const W_WORD_STEPS: usize = 4096;

/// End states `o_1 … o_{|P|}` of the dual reading of `gamma` through `states`.
pub fn dual_read(h: &Transducer, gamma: &[usize], states: &[usize]) -> Result<Vec<usize>> {
    if gamma.is_empty() {
        return Err(Error::EmptyWord);
    }
    let n = h.alphabet_size();
    if let Some(&x) = gamma.iter().find(|&&x| x >= n) {
        return Err(Error::LetterOutOfRange { letter: x, n });
    }
    if let Some(&p) = states.iter().find(|&&p| p >= h.state_count()) {
        return Err(Error::TargetOutOfRange { state: p, letter: 0, target: p, states: h.state_count() });
    }
    let mut word = gamma.to_vec();
    let mut out = Vec::with_capacity(states.len());
    for &p in states {
        let (next, end) = h.run(p, &word);
        out.push(end);
        word = next;
    }
    Ok(out)
}

/// The periodic word `W(Γ, H)`: follows every possible state choice at once,
/// requires each end state to be forced, and returns the least pure period
/// of the resulting sequence.
pub fn w_word(h: &Transducer, gamma: &[usize]) -> Result<Vec<usize>> {
    let k = h.sync_level().ok_or(Error::NotSynchronizing)?;
    if gamma.len() < k || gamma.is_empty() {
        return Err(Error::WordTooShort { len: gamma.len(), level: k.max(1) });
    }
    let mut frontier: BTreeSet<Vec<usize>> = BTreeSet::from([gamma.to_vec()]);
    let mut first_seen: HashMap<BTreeSet<Vec<usize>>, usize> = HashMap::new();
    let mut forced: Vec<usize> = Vec::new();
    let (start, cycle) = loop {
        if let Some(&i) = first_seen.get(&frontier) {
            break (i, forced.len() - i);
        }
        if forced.len() >= W_WORD_STEPS {
            return Err(Error::NotPeriodic(format!("no repetition within {W_WORD_STEPS} steps")));
        }
        first_seen.insert(frontier.clone(), forced.len());
        let mut ends = BTreeSet::new();
        let mut next = BTreeSet::new();
        for word in &frontier {
            for p in 0..h.state_count() {
                let (out, end) = h.run(p, word);
                ends.insert(end);
                next.insert(out);
            }
        }
        if ends.len() != 1 {
            return Err(Error::ChoiceDependent(format!(
                "step {} reaches states {ends:?}",
                forced.len() + 1
            )));
        }
        forced.push(*ends.iter().next().expect("one end state"));
        frontier = next;
    };
    // forced[i] for i >= start repeats with period `cycle`; extend to check
    // pure periods, which must divide `cycle`.
    let horizon = start + 2 * cycle;
    let at = |i: usize| if i < forced.len() { forced[i] } else { forced[start + (i - start) % cycle] };
    for d in (1..=cycle).filter(|d| cycle % d == 0) {
        if (0..horizon).all(|i| at(i) == at(i + d)) {
            return Ok((0..d).map(at).collect());
        }
    }
    Err(Error::NotPeriodic(format!("end states of {gamma:?} are only eventually periodic")))
}

/// A finite subgroup of `H_n` given by its minimal elements.
#[derive(Debug, Clone)]
pub struct SubgroupClosure {
    pub generators: Vec<Transducer>,
    /// Minimal representatives; the identity comes first.
    pub elements: Vec<Transducer>,
    /// Largest minimal synchronizing level among the elements.
    pub level: usize,
    keys: HashMap<CanonicalKey, usize>,
}

impl SubgroupClosure {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Index of the element ω-equal to `t`, if any.
    pub fn index_of(&self, t: &Transducer) -> Option<usize> {
        self.keys.get(&t.omega_key()).copied()
    }

    /// `table[i][j]` is the index of `elements[i] ⨾ elements[j]`.
    pub fn multiplication_table(&self) -> Result<Vec<Vec<usize>>> {
        self.elements
            .iter()
            .map(|a| {
                self.elements
                    .iter()
                    .map(|b| {
                        self.index_of(&a.product_min(b)?)
                            .ok_or_else(|| Error::Invariant("closure is not closed".into()))
                    })
                    .collect()
            })
            .collect()
    }
}

/// Closes the generators under products and inverses.
pub fn subgroup_closure(generators: &[Transducer], cap: usize) -> Result<SubgroupClosure> {
    let n = match generators.first() {
        Some(g) => g.alphabet_size(),
        None => return Err(Error::Invariant("no generators given".into())),
    };
    let mut gens = Vec::with_capacity(generators.len() * 2);
    for g in generators {
        if g.alphabet_size() != n {
            return Err(Error::AlphabetMismatch { left: n, right: g.alphabet_size() });
        }
        if !g.is_in_hn() {
            return Err(Error::NotInHn);
        }
        let m = g.minimal();
        gens.push(m.invert()?.minimal());
        gens.push(m);
    }
    let identity = Transducer::identity(n)?;
    let mut keys = HashMap::from([(identity.canonical_key(), 0)]);
    let mut elements = vec![identity];
    let mut head = 0;
    while head < elements.len() {
        let current = elements[head].clone();
        head += 1;
        for g in &gens {
            let product = current.product_min(g)?;
            let key = product.canonical_key();
            if let std::collections::hash_map::Entry::Vacant(slot) = keys.entry(key) {
                if elements.len() >= cap {
                    return Err(Error::CapExceeded { what: "subgroup closure", cap });
                }
                slot.insert(elements.len());
                elements.push(product);
            }
        }
    }
    let level = elements
        .iter()
        .map(|e| e.sync_level().ok_or(Error::NotSynchronizing))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .max()
        .unwrap_or(0);
    Ok(SubgroupClosure { generators: generators.to_vec(), elements, level, keys })
}

/// `A(G)` together with the automorphism `φ_H` for every element.
#[derive(Debug, Clone)]
pub struct SubgroupAutomaton {
    pub automaton: Automaton,
    /// Word length `k` whose classes are the states.
    pub level: usize,
    /// Class of each word of length `k`, by lexicographic rank.
    pub word_classes: StatePartition,
    /// `embedding[i]` belongs to `elements[i]` of the closure.
    pub embedding: Vec<DigraphAutomorphism>,
}

impl SubgroupAutomaton {
    /// Checks that `H ↦ φ_H` recovers each element, is injective and
    /// respects products.
    pub fn check(&self, g: &SubgroupClosure) -> Result<()> {
        for (i, (e, phi)) in g.elements.iter().zip(&self.embedding).enumerate() {
            let back = crate::graph_aut::transducer_from_automorphism(&self.automaton, phi)?;
            if !back.equal_omega(e) {
                return Err(Error::Invariant(format!("element {i} is not recovered")));
            }
            if self.embedding[..i].contains(phi) {
                return Err(Error::Invariant(format!("element {i} shares its automorphism")));
            }
        }
        let table = g.multiplication_table()?;
        for (i, row) in table.iter().enumerate() {
            for (j, &l) in row.iter().enumerate() {
                if self.embedding[i].then(&self.embedding[j]) != self.embedding[l] {
                    return Err(Error::Invariant(format!("product of {i} and {j} is not respected")));
                }
            }
        }
        Ok(())
    }
}

fn word_of(n: usize, len: usize, rank: usize) -> Vec<usize> {
    crate::automaton::index_word(n, len, rank)
}

fn rank_of(n: usize, word: &[usize]) -> usize {
    crate::automaton::word_index(n, word)
}

/// Builds `A(G)` on the classes of `Γ ∼ Δ ⇔ W(Γ, H) = W(Δ, H)` for all `H`,
/// and the automorphisms `φ_H`. Every well-definedness condition is checked.
pub fn subgroup_automaton(g: &SubgroupClosure) -> Result<SubgroupAutomaton> {
    let n = g.elements[0].alphabet_size();
    let k = g.level;
    let words = checked_power(n, k, DEFAULT_STATE_CAP, "word classes")?;
    let labels: Vec<Vec<Vec<usize>>> = if k == 0 {
        vec![Vec::new()]
    } else {
        (0..words)
            .map(|r| {
                let gamma = word_of(n, k, r);
                g.elements.iter().map(|h| w_word(h, &gamma)).collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?
    };
    let classes = StatePartition::from_labels(labels);
    let m = classes.class_count();

    // transitions [γ] --x--> [suffix(γ) x]
    let mut delta = vec![usize::MAX; m * n];
    for r in 0..words {
        let c = classes.class_of(r);
        for x in 0..n {
            let target = if k == 0 { 0 } else { classes.class_of((r * n + x) % words) };
            let slot = &mut delta[c * n + x];
            if *slot == usize::MAX {
                *slot = target;
            } else if *slot != target {
                return Err(Error::IllDefined(format!("transition of class {c} on {x}")));
            }
        }
    }
    let automaton = Automaton::new(n, m, delta)?;

    let mut embedding = Vec::with_capacity(g.len());
    for h in &g.elements {
        let mut vertex = vec![usize::MAX; m];
        let mut edge_letter = vec![usize::MAX; m * n];
        let forced = h.base().forced_states(k);
        for r in 0..words {
            let c = classes.class_of(r);
            let gamma = word_of(n, k, r);
            for p in 0..h.state_count() {
                let image = if k == 0 { 0 } else { classes.class_of(rank_of(n, &h.run(p, &gamma).0)) };
                if vertex[c] == usize::MAX {
                    vertex[c] = image;
                } else if vertex[c] != image {
                    return Err(Error::IllDefined(format!("vertex image of class {c}")));
                }
            }
            let q = forced[r];
            for x in 0..n {
                let y = h.output(q, x);
                let slot = &mut edge_letter[c * n + x];
                if *slot == usize::MAX {
                    *slot = y;
                } else if *slot != y {
                    return Err(Error::IllDefined(format!("edge image at class {c} on {x}")));
                }
            }
        }
        let vertex = Perm::new(vertex).map_err(|e| Error::IllDefined(e.to_string()))?;
        let phi = DigraphAutomorphism::new(&automaton, vertex, edge_letter)
            .map_err(|e| Error::IllDefined(e.to_string()))?;
        embedding.push(phi);
    }
    Ok(SubgroupAutomaton { automaton, level: k, word_classes: classes, embedding })
}
