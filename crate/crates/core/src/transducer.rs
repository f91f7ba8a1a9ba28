//! Synchronous transducers: one output letter per input letter.

use crate::automaton::Automaton;
use crate::canonical::{self, CanonicalKey};
use crate::error::{Error, Result};
use crate::partition::StatePartition;
use crate::perm::Perm;

/// Iteration budget for [`Transducer::order`].
pub const DEFAULT_ORDER_ITERATIONS: usize = 1_000;
/// State-count budget for intermediate powers in [`Transducer::order`].
pub const DEFAULT_ORDER_STATES: usize = 10_000;

/// A synchronous transducer: an automaton plus an output letter for every
/// transition. `lambda[q * n + x]` is the letter written when reading `x` in `q`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Transducer {
    base: Automaton,
    lambda: Vec<usize>,
}

/// Result of an order computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ElementOrder {
    Finite(usize),
    ExceedsCap,
}

impl ElementOrder {
    pub fn finite(self) -> Option<usize> {
        match self {
            ElementOrder::Finite(k) => Some(k),
            ElementOrder::ExceedsCap => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OrderCaps {
    pub iterations: usize,
    pub states: usize,
}

impl Default for OrderCaps {
    fn default() -> Self {
        OrderCaps { iterations: DEFAULT_ORDER_ITERATIONS, states: DEFAULT_ORDER_STATES }
    }
}

impl Transducer {
    pub fn new(base: Automaton, lambda: Vec<usize>) -> Result<Self> {
        let n = base.alphabet_size();
        if lambda.len() != base.table().len() {
            return Err(Error::TableLength { expected: base.table().len(), found: lambda.len() });
        }
        if let Some(&y) = lambda.iter().find(|&&y| y >= n) {
            return Err(Error::LetterOutOfRange { letter: y, n });
        }
        Ok(Transducer { base, lambda })
    }

    /// One `(transitions, outputs)` row pair per state.
    pub fn from_rows(n: usize, rows: &[(Vec<usize>, Vec<usize>)]) -> Result<Self> {
        let delta: Vec<Vec<usize>> = rows.iter().map(|r| r.0.clone()).collect();
        let base = Automaton::from_rows(n, &delta)?;
        if let Some(bad) = rows.iter().find(|r| r.1.len() != n) {
            return Err(Error::TableLength { expected: n, found: bad.1.len() });
        }
        Self::new(base, rows.iter().flat_map(|r| r.1.iter().copied()).collect())
    }

    /// Transducer with `base` as automaton and the identity output everywhere.
    pub fn with_identity_outputs(base: Automaton) -> Self {
        let n = base.alphabet_size();
        let lambda = (0..base.table().len()).map(|i| i % n).collect();
        Transducer { base, lambda }
    }

    /// The one-state identity transducer.
    pub fn identity(n: usize) -> Result<Self> {
        Ok(Self::with_identity_outputs(Automaton::trivial(n)?))
    }

    /// The shift: state `i` writes `i` and moves to the state named by the input.
    pub fn shift(n: usize) -> Result<Self> {
        let base = Automaton::de_bruijn(n, 1)?;
        let lambda = (0..n * n).map(|i| i / n).collect();
        Ok(Transducer { base, lambda })
    }

    /// One-state transducer writing `perm(x)` on input `x`.
    pub fn single_state(perm: &Perm) -> Result<Self> {
        let base = Automaton::trivial(perm.len())?;
        Ok(Transducer { base, lambda: perm.as_slice().to_vec() })
    }

    pub fn base(&self) -> &Automaton {
        &self.base
    }

    pub fn alphabet_size(&self) -> usize {
        self.base.alphabet_size()
    }

    pub fn state_count(&self) -> usize {
        self.base.state_count()
    }

    pub fn delta(&self, q: usize, x: usize) -> usize {
        self.base.delta(q, x)
    }

    pub fn output(&self, q: usize, x: usize) -> usize {
        self.lambda[q * self.alphabet_size() + x]
    }

    pub fn output_row(&self, q: usize) -> &[usize] {
        let n = self.alphabet_size();
        &self.lambda[q * n..(q + 1) * n]
    }

    pub fn output_table(&self) -> &[usize] {
        &self.lambda
    }

    /// Output word and final state when reading `word` from `q`.
    pub fn run(&self, mut q: usize, word: &[usize]) -> (Vec<usize>, usize) {
        let mut out = Vec::with_capacity(word.len());
        for &x in word {
            out.push(self.output(q, x));
            q = self.delta(q, x);
        }
        (out, q)
    }

    pub fn sync_level(&self) -> Option<usize> {
        self.base.sync_level()
    }

    fn check_alphabet(&self, other: &Transducer) -> Result<()> {
        if self.alphabet_size() != other.alphabet_size() {
            return Err(Error::AlphabetMismatch {
                left: self.alphabet_size(),
                right: other.alphabet_size(),
            });
        }
        Ok(())
    }

    /// Unreduced product: `self` reads first and its output feeds `other`.
    /// State `(p, q)` is numbered `p * |other| + q`.
    pub fn product_raw(&self, other: &Transducer) -> Result<Transducer> {
        self.check_alphabet(other)?;
        let n = self.alphabet_size();
        let m = other.state_count();
        let states = self.state_count() * m;
        let mut delta = Vec::with_capacity(states * n);
        let mut lambda = Vec::with_capacity(states * n);
        for p in 0..self.state_count() {
            for q in 0..m {
                for x in 0..n {
                    let y = self.output(p, x);
                    delta.push(self.delta(p, x) * m + other.delta(q, y));
                    lambda.push(other.output(q, y));
                }
            }
        }
        Ok(Transducer { base: Automaton::new(n, states, delta)?, lambda })
    }

    /// Restriction to the core of the underlying automaton.
    pub fn core(&self) -> Result<Transducer> {
        let (base, inj) = self.base.core_of()?;
        let lambda = inj.iter().flat_map(|&q| self.output_row(q).iter().copied()).collect();
        Ok(Transducer { base, lambda })
    }

    /// The ω-equivalence partition: states agreeing on every input word.
    pub fn omega_partition(&self) -> StatePartition {
        let n = self.alphabet_size();
        let mut part = StatePartition::from_labels((0..self.state_count()).map(|q| self.output_row(q)));
        loop {
            let next = StatePartition::from_labels((0..self.state_count()).map(|q| {
                let mut sig = Vec::with_capacity(n + 1);
                sig.push(part.class_of(q));
                sig.extend((0..n).map(|x| part.class_of(self.delta(q, x))));
                sig
            }));
            if next.class_count() == part.class_count() {
                return part;
            }
            part = next;
        }
    }

    /// Quotient by a partition that is a folding of the base and respects outputs.
    pub(crate) fn quotient_unchecked(&self, part: &StatePartition) -> Transducer {
        let base = self.base.quotient_unchecked(part);
        let n = self.alphabet_size();
        let mut lambda = vec![0; part.class_count() * n];
        for q in (0..self.state_count()).rev() {
            let c = part.class_of(q);
            lambda[c * n..(c + 1) * n].copy_from_slice(self.output_row(q));
        }
        Transducer { base, lambda }
    }

    /// Identifies ω-equivalent states (Moore partition refinement).
    pub fn weak_minimize(&self) -> Transducer {
        let part = self.omega_partition();
        if part.is_discrete() {
            return self.clone();
        }
        self.quotient_unchecked(&part)
    }

    /// The weakly minimal core representative, or the weakly minimal machine
    /// when the base is not strongly synchronizing.
    pub fn minimal(&self) -> Transducer {
        match self.core() {
            Ok(core) => core.weak_minimize(),
            Err(_) => self.weak_minimize(),
        }
    }

    /// The monoid product: `weak_minimize(core(product_raw(self, other)))`.
    pub fn product_min(&self, other: &Transducer) -> Result<Transducer> {
        self.check_alphabet(other)?;
        if !self.base.is_strongly_synchronizing() || !other.base.is_strongly_synchronizing() {
            return Err(Error::NotSynchronizing);
        }
        // Shrinking the operands first keeps the raw product small and
        // does not change the ω-class of the result.
        let left = self.minimal();
        let right = other.minimal();
        Ok(left.product_raw(&right)?.core()?.weak_minimize())
    }

    pub fn is_invertible(&self) -> bool {
        let n = self.alphabet_size();
        (0..self.state_count()).all(|q| {
            let mut seen = vec![false; n];
            self.output_row(q).iter().all(|&y| !std::mem::replace(&mut seen[y], true))
        })
    }

    /// Swaps inputs and outputs on every transition.
    pub fn invert(&self) -> Result<Transducer> {
        let n = self.alphabet_size();
        let mut delta = vec![usize::MAX; self.lambda.len()];
        let mut lambda = vec![usize::MAX; self.lambda.len()];
        for q in 0..self.state_count() {
            for x in 0..n {
                let y = self.output(q, x);
                if lambda[q * n + y] != usize::MAX {
                    return Err(Error::NotInvertible { state: q });
                }
                lambda[q * n + y] = x;
                delta[q * n + y] = self.delta(q, x);
            }
        }
        Ok(Transducer { base: Automaton::new(n, self.state_count(), delta)?, lambda })
    }

    /// Synchronizing levels of the machine and of its inverse.
    pub fn bisync_levels(&self) -> Option<(usize, usize)> {
        let inv = self.invert().ok()?;
        Some((self.sync_level()?, inv.sync_level()?))
    }

    /// Invertible, bisynchronizing, and core once ω-equivalent states are merged.
    pub fn is_in_hn(&self) -> bool {
        self.bisync_levels().is_some() && self.weak_minimize().base.is_core()
    }

    /// Canonical key of this exact machine (transitions and outputs).
    pub fn canonical_key(&self) -> CanonicalKey {
        canonical::encode(
            self.alphabet_size(),
            self.state_count(),
            self.base.table(),
            Some(&self.lambda),
        )
    }

    /// Key identifying the ω-class: the canonical key of [`Self::minimal`].
    pub fn omega_key(&self) -> CanonicalKey {
        self.minimal().canonical_key()
    }

    pub fn equal_omega(&self, other: &Transducer) -> bool {
        self.alphabet_size() == other.alphabet_size() && self.omega_key() == other.omega_key()
    }

    /// True if the machine induces the identity map.
    pub fn is_identity(&self) -> bool {
        let n = self.alphabet_size();
        self.lambda.iter().enumerate().all(|(i, &y)| y == i % n)
            || {
                let m = self.minimal();
                m.state_count() == 1 && m.output_row(0).iter().enumerate().all(|(x, &y)| x == y)
            }
    }

    /// The output period of the induced shift map on the periodic sequence
    /// with period `period`.
    pub fn apply_periodic(&self, period: &[usize]) -> Result<Vec<usize>> {
        if period.is_empty() {
            return Err(Error::EmptyWord);
        }
        let n = self.alphabet_size();
        if let Some(&x) = period.iter().find(|&&x| x >= n) {
            return Err(Error::LetterOutOfRange { letter: x, n });
        }
        let k = self.sync_level().ok_or(Error::NotSynchronizing)?;
        let reps = k.div_ceil(period.len());
        let q = (0..reps).fold(0, |q, _| self.base.read(q, period));
        Ok(self.run(q, period).0)
    }

    /// Least `k ≥ 1` with `selfᵏ` the identity, using the default caps.
    pub fn order(&self) -> Result<ElementOrder> {
        self.order_with(OrderCaps::default())
    }

    pub fn order_with(&self, caps: OrderCaps) -> Result<ElementOrder> {
        if !self.is_in_hn() {
            return Err(Error::NotInHn);
        }
        let base = self.minimal();
        let mut power = base.clone();
        for k in 1..=caps.iterations {
            if power.is_identity() {
                return Ok(ElementOrder::Finite(k));
            }
            power = power.product_min(&base)?;
            if power.state_count() > caps.states {
                return Ok(ElementOrder::ExceedsCap);
            }
        }
        Ok(ElementOrder::ExceedsCap)
    }

    /// `self` raised to a non-negative power under [`Self::product_min`].
    pub fn power(&self, exp: usize) -> Result<Transducer> {
        let mut acc = Transducer::identity(self.alphabet_size())?;
        for _ in 0..exp {
            acc = acc.product_min(self)?;
        }
        Ok(acc)
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    /// The machine obtained by gluing the three-state folding of G(3,2) to
    /// itself along the vertex swap q0 ↔ q2.
    pub(crate) fn nonpermaut_machine() -> Transducer {
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

    /// The inversion example pair.
    fn inversion_pair() -> (Transducer, Transducer) {
        let t = Transducer::from_rows(
            3,
            &[
                (vec![1, 2, 0], vec![1, 2, 0]),
                (vec![2, 1, 0], vec![2, 1, 0]),
                (vec![2, 1, 0], vec![2, 0, 1]),
            ],
        )
        .unwrap();
        let inv = Transducer::from_rows(
            3,
            &[
                (vec![0, 1, 2], vec![2, 0, 1]),
                (vec![0, 1, 2], vec![2, 1, 0]),
                (vec![1, 0, 2], vec![1, 2, 0]),
            ],
        )
        .unwrap();
        (t, inv)
    }

    fn perm(v: &[usize]) -> Perm {
        Perm::new(v.to_vec()).unwrap()
    }

    #[test]
    fn shift_machine() {
        let s = Transducer::shift(2).unwrap();
        assert_eq!(s.output_row(0), &[0, 0]);
        assert_eq!(s.output_row(1), &[1, 1]);
        assert_eq!(s.delta(0, 1), 1);
        assert_eq!(s.sync_level(), Some(1));
        assert!(!s.is_invertible());
        assert!(!s.is_in_hn());
        assert_eq!(Transducer::shift(3).unwrap().apply_periodic(&[0, 1, 2]).unwrap(), vec![2, 0, 1]);
        assert_eq!(s.apply_periodic(&[0, 1]).unwrap(), vec![1, 0]);
    }

    #[test]
    fn single_state_machines() {
        let id = Transducer::single_state(&Perm::identity(2)).unwrap();
        assert!(id.is_identity());
        let t = Transducer::single_state(&perm(&[2, 1, 0])).unwrap();
        assert_eq!(t.output_row(0), &[2, 1, 0]);
        assert!(t.is_in_hn());
        assert_eq!(t.bisync_levels(), Some((0, 0)));
        let c3 = Transducer::single_state(&perm(&[1, 2, 0])).unwrap();
        assert_eq!(c3.order().unwrap(), ElementOrder::Finite(3));
        assert_eq!(c3.invert().unwrap(), Transducer::single_state(&perm(&[2, 0, 1])).unwrap());
    }

    #[test]
    fn inversion_matches_worked_example() {
        let (t, inv) = inversion_pair();
        assert_eq!(t.invert().unwrap(), inv);
        assert_eq!(inv.invert().unwrap(), t);
        assert_eq!(Transducer::shift(2).unwrap().invert(), Err(Error::NotInvertible { state: 0 }));
    }

    #[test]
    fn products() {
        let h = nonpermaut_machine();
        let id = Transducer::identity(3).unwrap();
        let raw = id.product_raw(&h).unwrap();
        assert_eq!(raw, h);
        assert!(h.product_min(&h).unwrap().is_identity());
        assert!(h.product_min(&h.invert().unwrap()).unwrap().is_identity());
        assert!(h.product_min(&id).unwrap().equal_omega(&h));
        let two = Transducer::identity(2).unwrap();
        assert_eq!(
            h.product_raw(&two),
            Err(Error::AlphabetMismatch { left: 3, right: 2 })
        );
    }

    #[test]
    fn minimization() {
        let h = nonpermaut_machine();
        assert_eq!(h.weak_minimize(), h);
        let doubled = Transducer::with_identity_outputs(Automaton::de_bruijn(2, 1).unwrap());
        let m = doubled.weak_minimize();
        assert_eq!(m.state_count(), 1);
        assert!(m.is_identity());
    }

    #[test]
    fn membership_and_levels() {
        let h = nonpermaut_machine();
        assert!(h.is_in_hn());
        assert_eq!(h.bisync_levels(), Some((2, 2)));
        assert_eq!(h.order().unwrap(), ElementOrder::Finite(2));
        assert_eq!(Transducer::identity(2).unwrap().order().unwrap(), ElementOrder::Finite(1));
        assert_eq!(Transducer::shift(2).unwrap().order(), Err(Error::NotInHn));
    }

    #[test]
    fn omega_equality() {
        let h = nonpermaut_machine();
        // rename states 0 -> 1 -> 2 -> 0
        let rename = [1, 2, 0];
        let mut rows = vec![(vec![], vec![]); 3];
        for q in 0..3 {
            rows[rename[q]] = (
                h.base().row(q).iter().map(|&t| rename[t]).collect(),
                h.output_row(q).to_vec(),
            );
        }
        let renamed = Transducer::from_rows(3, &rows).unwrap();
        assert!(h.equal_omega(&renamed));
        let flip = Transducer::single_state(&perm(&[1, 0])).unwrap();
        assert!(!flip.equal_omega(&Transducer::identity(2).unwrap()));
    }

    #[test]
    fn apply_periodic_identity_and_errors() {
        let id = Transducer::identity(3).unwrap();
        assert_eq!(id.apply_periodic(&[2, 0, 1, 1]).unwrap(), vec![2, 0, 1, 1]);
        assert_eq!(id.apply_periodic(&[]), Err(Error::EmptyWord));
        assert_eq!(id.apply_periodic(&[3]), Err(Error::LetterOutOfRange { letter: 3, n: 3 }));
    }
}
