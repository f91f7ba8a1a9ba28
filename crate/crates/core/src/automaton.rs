//! Complete deterministic automata over `X_n = {0, …, n-1}`: de Bruijn graphs,
//! foldings and quotients, synchronizing sequences, cores and canonical forms.

use std::collections::{HashSet, VecDeque};

use crate::canonical::{self, CanonicalKey};
use crate::error::{Error, Result};
use crate::partition::StatePartition;

/// Largest state count `de_bruijn` will build.
pub const DEFAULT_STATE_CAP: usize = 1 << 20;

/// Visited-automaton budget for [`Automaton::is_collapse_equivalent`].
pub const DEFAULT_COLLAPSE_CAP: usize = 1_000_000;

/// A complete deterministic automaton. States are `0..state_count`, letters
/// `0..alphabet_size`, and `delta[q * n + x]` is the target of `(q, x)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Automaton {
    n: usize,
    states: usize,
    delta: Vec<usize>,
}

/// One term of a synchronizing sequence: the automaton and, for every state
/// of the original automaton, the state of this term containing it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SyncTerm {
    pub automaton: Automaton,
    pub partition: StatePartition,
}

/// The sequence `A_0 = A, A_1, …` obtained by repeatedly merging states with
/// identical transition rows, stopped at the first term that does not shrink.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SyncSequence {
    pub terms: Vec<SyncTerm>,
}

impl SyncSequence {
    /// Index of the last (stable) term.
    pub fn stabilization_index(&self) -> usize {
        self.terms.len() - 1
    }

    pub fn class_counts(&self) -> Vec<usize> {
        self.terms.iter().map(|t| t.automaton.state_count()).collect()
    }

    /// First index whose term has a single state.
    pub fn level(&self) -> Option<usize> {
        self.terms.iter().position(|t| t.automaton.state_count() == 1)
    }
}

/// Lexicographic rank of a word over `X_n`.
pub fn word_index(n: usize, word: &[usize]) -> usize {
    word.iter().fold(0, |acc, &x| acc * n + x)
}

/// Inverse of [`word_index`] for words of length `len`.
pub fn index_word(n: usize, len: usize, mut index: usize) -> Vec<usize> {
    let mut word = vec![0; len];
    for slot in word.iter_mut().rev() {
        *slot = index % n;
        index /= n;
    }
    word
}

pub(crate) fn checked_power(n: usize, m: usize, cap: usize, what: &'static str) -> Result<usize> {
    let size = (n as u128).checked_pow(m as u32).unwrap_or(u128::MAX);
    if size > cap as u128 {
        return Err(Error::SizeCap { what, size, cap: cap as u128 });
    }
    Ok(size as usize)
}

impl Automaton {
    pub fn new(n: usize, states: usize, delta: Vec<usize>) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidAlphabet(n));
        }
        if states == 0 {
            return Err(Error::NoStates);
        }
        if delta.len() != n * states {
            return Err(Error::TableLength { expected: n * states, found: delta.len() });
        }
        if let Some(i) = delta.iter().position(|&t| t >= states) {
            return Err(Error::TargetOutOfRange {
                state: i / n,
                letter: i % n,
                target: delta[i],
                states,
            });
        }
        Ok(Automaton { n, states, delta })
    }

    /// Builds an automaton from one transition row per state.
    pub fn from_rows(n: usize, rows: &[Vec<usize>]) -> Result<Self> {
        if let Some(bad) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::TableLength { expected: n, found: bad.len() });
        }
        Self::new(n, rows.len(), rows.concat())
    }

    /// The single-state automaton over `X_n`.
    pub fn trivial(n: usize) -> Result<Self> {
        Self::new(n, 1, vec![0; n])
    }

    /// The de Bruijn graph `G(n, m)`: states are the words of length `m` in
    /// lexicographic order and reading `x` from `a_1…a_m` leads to `a_2…a_m x`.
    pub fn de_bruijn(n: usize, m: usize) -> Result<Self> {
        Self::de_bruijn_capped(n, m, DEFAULT_STATE_CAP)
    }

    pub fn de_bruijn_capped(n: usize, m: usize, cap: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidAlphabet(n));
        }
        if m == 0 {
            return Err(Error::EmptyWindow);
        }
        let states = checked_power(n, m, cap, "de Bruijn graph")?;
        let delta = (0..states)
            .flat_map(|w| (0..n).map(move |x| (w * n + x) % states))
            .collect();
        Ok(Automaton { n, states, delta })
    }

    pub fn alphabet_size(&self) -> usize {
        self.n
    }

    pub fn state_count(&self) -> usize {
        self.states
    }

    pub fn delta(&self, q: usize, x: usize) -> usize {
        self.delta[q * self.n + x]
    }

    pub fn row(&self, q: usize) -> &[usize] {
        &self.delta[q * self.n..(q + 1) * self.n]
    }

    pub fn table(&self) -> &[usize] {
        &self.delta
    }

    /// State reached from `q` after reading `word`.
    pub fn read(&self, q: usize, word: &[usize]) -> usize {
        word.iter().fold(q, |s, &x| self.delta(s, x))
    }

    fn check_partition(&self, p: &StatePartition) -> Result<()> {
        if p.len() != self.states {
            return Err(Error::PartitionMismatch { expected: self.states, found: p.len() });
        }
        Ok(())
    }

    /// True iff equivalent states move to equivalent states under every letter.
    pub fn is_folding(&self, p: &StatePartition) -> Result<bool> {
        self.check_partition(p)?;
        let mut rep = vec![usize::MAX; p.class_count()];
        for q in 0..self.states {
            let c = p.class_of(q);
            if rep[c] == usize::MAX {
                rep[c] = q;
                continue;
            }
            let r = rep[c];
            if (0..self.n).any(|x| !p.same_class(self.delta(q, x), self.delta(r, x))) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// The folded automaton `A/≡`.
    pub fn quotient(&self, p: &StatePartition) -> Result<Automaton> {
        if !self.is_folding(p)? {
            return Err(Error::NotFolding);
        }
        Ok(self.quotient_unchecked(p))
    }

    pub(crate) fn quotient_unchecked(&self, p: &StatePartition) -> Automaton {
        let mut delta = vec![0; p.class_count() * self.n];
        let mut done = vec![false; p.class_count()];
        for q in 0..self.states {
            let c = p.class_of(q);
            if !done[c] {
                done[c] = true;
                for x in 0..self.n {
                    delta[c * self.n + x] = p.class_of(self.delta(q, x));
                }
            }
        }
        Automaton { n: self.n, states: p.class_count(), delta }
    }

    /// States grouped by identical transition rows.
    pub fn row_partition(&self) -> StatePartition {
        StatePartition::from_labels((0..self.states).map(|q| self.row(q)))
    }

    pub fn sync_sequence(&self) -> SyncSequence {
        let mut terms = vec![SyncTerm {
            automaton: self.clone(),
            partition: StatePartition::discrete(self.states),
        }];
        loop {
            let last = terms.last().unwrap();
            let rows = last.automaton.row_partition();
            if rows.class_count() == last.automaton.state_count() {
                break;
            }
            // quotient the original directly so class and state numbers agree
            let partition = last.partition.compose(&rows);
            let automaton = self.quotient_unchecked(&partition);
            terms.push(SyncTerm { automaton, partition });
        }
        SyncSequence { terms }
    }

    /// Minimal synchronizing level, or `None` if not strongly synchronizing.
    pub fn sync_level(&self) -> Option<usize> {
        // Same answer as sync_sequence().level() without keeping the terms.
        let mut current = self.clone();
        let mut level = 0;
        loop {
            if current.states == 1 {
                return Some(level);
            }
            let rows = current.row_partition();
            if rows.class_count() == current.states {
                return None;
            }
            current = current.quotient_unchecked(&rows);
            level += 1;
        }
    }

    pub fn is_strongly_synchronizing(&self) -> bool {
        self.sync_level().is_some()
    }

    fn require_level(&self) -> Result<usize> {
        self.sync_level().ok_or(Error::NotSynchronizing)
    }

    /// The state forced by `word`, checked from every start state.
    pub fn sync_map(&self, word: &[usize]) -> Result<usize> {
        let k = self.require_level()?;
        if word.len() < k {
            return Err(Error::WordTooShort { len: word.len(), level: k });
        }
        if let Some(&x) = word.iter().find(|&&x| x >= self.n) {
            return Err(Error::LetterOutOfRange { letter: x, n: self.n });
        }
        let target = self.read(0, word);
        if (1..self.states).any(|q| self.read(q, word) != target) {
            return Err(Error::Invariant(format!("word {word:?} does not force a state")));
        }
        Ok(target)
    }

    /// States reached by reading each word of length `len` from state 0,
    /// indexed by lexicographic word rank. This is `𝔰_len` when `len` is at
    /// least the synchronizing level.
    pub fn forced_states(&self, len: usize) -> Vec<usize> {
        let mut layer = vec![0usize];
        for _ in 0..len {
            layer = layer
                .iter()
                .flat_map(|&q| (0..self.n).map(move |x| (q, x)))
                .map(|(q, x)| self.delta(q, x))
                .collect();
        }
        layer
    }

    /// States reachable after exactly `len` steps from anywhere.
    fn image_after(&self, len: usize) -> Vec<usize> {
        let mut current: Vec<bool> = vec![true; self.states];
        for _ in 0..len {
            let mut next = vec![false; self.states];
            for q in (0..self.states).filter(|&q| current[q]) {
                for &t in self.row(q) {
                    next[t] = true;
                }
            }
            current = next;
        }
        (0..self.states).filter(|&q| current[q]).collect()
    }

    /// Sub-automaton induced on a transition-closed set of states, listed in
    /// the order given. Returns `None` if the set is not closed.
    pub(crate) fn restrict(&self, keep: &[usize]) -> Option<Automaton> {
        let mut new_index = vec![usize::MAX; self.states];
        for (i, &q) in keep.iter().enumerate() {
            new_index[q] = i;
        }
        let mut delta = Vec::with_capacity(keep.len() * self.n);
        for &q in keep {
            for &t in self.row(q) {
                if new_index[t] == usize::MAX {
                    return None;
                }
                delta.push(new_index[t]);
            }
        }
        Some(Automaton { n: self.n, states: keep.len(), delta })
    }

    /// The core and the injection from its states into the states of `self`.
    pub fn core_of(&self) -> Result<(Automaton, Vec<usize>)> {
        let k = self.require_level()?;
        let image = self.image_after(k);
        let core = self
            .restrict(&image)
            .ok_or_else(|| Error::Invariant("image of the synchronizing map is not closed".into()))?;
        Ok((core, image))
    }

    /// Strongly synchronizing and equal to its own core.
    pub fn is_core(&self) -> bool {
        match self.sync_level() {
            Some(k) => self.image_after(k).len() == self.states,
            None => false,
        }
    }

    /// The folding `≡` of `G(n, k)` with `G(n, k)/≡ ≅ self`, where `k` is the
    /// synchronizing level (at least 1; a one-state automaton also sits at
    /// level 1).
    pub fn folding_from_sync(&self) -> Result<StatePartition> {
        let k = self.require_level()?.max(1);
        self.folding_at_level(k)
    }

    /// As [`Self::folding_from_sync`] for an explicit level `≥` the minimal one.
    pub fn folding_at_level(&self, level: usize) -> Result<StatePartition> {
        let k = self.require_level()?;
        if level < k || level == 0 {
            return Err(Error::WordTooShort { len: level, level: k.max(1) });
        }
        if !self.is_core() {
            return Err(Error::NotCore);
        }
        checked_power(self.n, level, DEFAULT_STATE_CAP, "de Bruijn graph")?;
        Ok(StatePartition::from_labels(self.forced_states(level)))
    }

    pub fn canonical_form(&self) -> CanonicalKey {
        canonical::encode(self.n, self.states, &self.delta, None)
    }

    pub fn is_isomorphic(&self, other: &Automaton) -> bool {
        self.n == other.n && self.states == other.states && self.canonical_form() == other.canonical_form()
    }

    /// Whether some sequence of single-pair merges of row-equal states turns
    /// `self` into an automaton isomorphic to `target`. `cap` bounds the
    /// number of distinct automata visited.
    pub fn is_collapse_equivalent(&self, target: &Automaton, cap: usize) -> Result<bool> {
        if self.n != target.n || target.states > self.states {
            return Ok(false);
        }
        let goal = target.canonical_form();
        let start_key = self.canonical_form();
        if start_key == goal {
            return Ok(true);
        }
        let mut seen: HashSet<CanonicalKey> = HashSet::from([start_key]);
        let mut queue = VecDeque::from([self.clone()]);
        while let Some(a) = queue.pop_front() {
            for (p, q) in a.row_equal_pairs() {
                let merged = a.merge_pair(p, q);
                let key = merged.canonical_form();
                if key == goal {
                    return Ok(true);
                }
                if merged.states > target.states && seen.insert(key) {
                    if seen.len() > cap {
                        return Err(Error::CapExceeded { what: "collapse-equivalence search", cap });
                    }
                    queue.push_back(merged);
                }
            }
        }
        Ok(false)
    }

    /// Pairs `p < q` of distinct states with identical transition rows.
    pub fn row_equal_pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for p in 0..self.states {
            for q in p + 1..self.states {
                if self.row(p) == self.row(q) {
                    out.push((p, q));
                }
            }
        }
        out
    }

    /// Identifies two states with identical rows.
    pub(crate) fn merge_pair(&self, p: usize, q: usize) -> Automaton {
        let part = StatePartition::from_labels((0..self.states).map(|s| if s == q { p } else { s }));
        self.quotient_unchecked(&part)
    }
}
