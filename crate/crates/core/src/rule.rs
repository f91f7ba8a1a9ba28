//! Local rules of sliding block codes and their transducer counterparts.

use crate::automaton::{checked_power, Automaton, DEFAULT_STATE_CAP};
use crate::error::{Error, Result};
use crate::transducer::Transducer;

/// A map `X_nᵐ → X_n`. Entry `table[i]` is the image of the window word of
/// lexicographic rank `i`; the rightmost window letter is the current one.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LocalRule {
    n: usize,
    window: usize,
    table: Vec<usize>,
}

impl LocalRule {
    pub fn new(n: usize, window: usize, table: Vec<usize>) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidAlphabet(n));
        }
        if window == 0 {
            return Err(Error::EmptyWindow);
        }
        let size = checked_power(n, window, DEFAULT_STATE_CAP, "rule table")?;
        if table.len() != size {
            return Err(Error::TableLength { expected: size, found: table.len() });
        }
        if let Some(&y) = table.iter().find(|&&y| y >= n) {
            return Err(Error::LetterOutOfRange { letter: y, n });
        }
        Ok(LocalRule { n, window, table })
    }

    /// Builds the table by evaluating `f` on every window word.
    pub fn from_fn(n: usize, window: usize, mut f: impl FnMut(&[usize]) -> usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidAlphabet(n));
        }
        if window == 0 {
            return Err(Error::EmptyWindow);
        }
        let size = checked_power(n, window, DEFAULT_STATE_CAP, "rule table")?;
        let mut word = vec![0; window];
        let table = (0..size)
            .map(|i| {
                let mut rest = i;
                for slot in word.iter_mut().rev() {
                    *slot = rest % n;
                    rest /= n;
                }
                f(&word)
            })
            .collect();
        Self::new(n, window, table)
    }

    /// The window-1 identity rule.
    pub fn identity(n: usize) -> Result<Self> {
        Self::new(n, 1, (0..n).collect())
    }

    /// The shift: `x_{-1} x_0 ↦ x_{-1}`.
    pub fn shift(n: usize) -> Result<Self> {
        Self::new(n, 2, (0..n * n).map(|i| i / n).collect())
    }

    pub fn alphabet_size(&self) -> usize {
        self.n
    }

    pub fn window(&self) -> usize {
        self.window
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }

    /// Image of a single window word.
    pub fn eval(&self, word: &[usize]) -> usize {
        debug_assert_eq!(word.len(), self.window);
        self.table[word.iter().fold(0, |acc, &x| acc * self.n + x)]
    }

    /// Slides the window over `input`, producing `|input| - window + 1` letters.
    pub fn apply_windows(&self, input: &[usize]) -> Result<Vec<usize>> {
        if input.len() < self.window {
            return Err(Error::WordTooShort { len: input.len(), level: self.window });
        }
        if let Some(&x) = input.iter().find(|&&x| x >= self.n) {
            return Err(Error::LetterOutOfRange { letter: x, n: self.n });
        }
        Ok(input.windows(self.window).map(|w| self.eval(w)).collect())
    }

    fn permutive_on(&self, index: impl Fn(usize, usize) -> usize) -> bool {
        let blocks = self.table.len() / self.n;
        (0..blocks).all(|a| {
            let mut seen = vec![false; self.n];
            (0..self.n).all(|x| !std::mem::replace(&mut seen[self.table[index(a, x)]], true))
        })
    }

    /// `x ↦ f(a x)` is a permutation for every block `a`.
    pub fn is_right_permutive(&self) -> bool {
        self.permutive_on(|a, x| a * self.n + x)
    }

    /// `x ↦ f(x a)` is a permutation for every block `a`.
    pub fn is_left_permutive(&self) -> bool {
        let blocks = self.table.len() / self.n;
        self.permutive_on(|a, x| x * blocks + a)
    }

    /// The same map on a window `k` letters wider, ignoring the extra
    /// leftmost letters.
    pub fn extend(&self, k: usize) -> Result<LocalRule> {
        let window = self.window + k;
        let size = checked_power(self.n, window, DEFAULT_STATE_CAP, "rule table")?;
        let base = self.table.len();
        Ok(LocalRule {
            n: self.n,
            window,
            table: (0..size).map(|i| self.table[i % base]).collect(),
        })
    }

    /// The rule of `self` followed by `then`, with window `l + m - 1`.
    pub fn compose(&self, then: &LocalRule) -> Result<LocalRule> {
        if self.n != then.n {
            return Err(Error::AlphabetMismatch { left: self.n, right: then.n });
        }
        let window = self.window + then.window - 1;
        Self::from_fn(self.n, window, |a| {
            let mid: Vec<usize> = a.windows(self.window).map(|w| self.eval(w)).collect();
            then.eval(&mid)
        })
    }

    /// True if both rules define the same map on sequences.
    pub fn same_map(&self, other: &LocalRule) -> bool {
        if self.n != other.n {
            return false;
        }
        let window = self.window.max(other.window);
        match (self.extend(window - self.window), other.extend(window - other.window)) {
            (Ok(a), Ok(b)) => a.table == b.table,
            _ => false,
        }
    }

    /// The transducer on `G(n, m - 1)` that remembers the last `m - 1`
    /// letters and writes the rule's value on the window ending at the input.
    /// Window-1 rules are first widened to window 2.
    pub fn to_transducer(&self) -> Result<Transducer> {
        if self.window == 1 {
            return self.extend(1)?.to_transducer();
        }
        let base = Automaton::de_bruijn(self.n, self.window - 1)?;
        Transducer::new(base, self.table.clone())
    }

    /// The rule with window `k + 1` induced by a strongly synchronizing
    /// transducer of level `k`: forced state from the first `k` letters, then
    /// the output on the last.
    pub fn from_transducer(t: &Transducer) -> Result<LocalRule> {
        let k = t.sync_level().ok_or(Error::NotSynchronizing)?;
        let n = t.alphabet_size();
        checked_power(n, k + 1, DEFAULT_STATE_CAP, "rule table")?;
        let forced = t.base().forced_states(k);
        let table = forced
            .iter()
            .flat_map(|&q| t.output_row(q).iter().copied())
            .collect();
        Ok(LocalRule { n, window: k + 1, table })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::Perm;

    fn permutive_bijective() -> LocalRule {
        LocalRule::new(3, 2, vec![0, 1, 2, 0, 1, 2, 1, 0, 2]).unwrap()
    }

    fn permutive_collapsing() -> LocalRule {
        LocalRule::new(3, 2, vec![0, 2, 1, 0, 2, 1, 1, 0, 2]).unwrap()
    }

    #[test]
    fn windows() {
        let s = LocalRule::shift(2).unwrap();
        assert_eq!(s.apply_windows(&[0, 1]).unwrap(), vec![0]);
        let id = LocalRule::identity(3).unwrap();
        assert_eq!(id.apply_windows(&[2, 0, 1]).unwrap(), vec![2, 0, 1]);
        assert_eq!(permutive_bijective().apply_windows(&[2, 0]).unwrap(), vec![1]);
        assert_eq!(s.apply_windows(&[1]), Err(Error::WordTooShort { len: 1, level: 2 }));
    }

    #[test]
    fn permutivity() {
        assert!(permutive_bijective().is_right_permutive());
        assert!(!permutive_bijective().is_left_permutive());
        assert!(permutive_collapsing().is_right_permutive());
        let id = LocalRule::identity(2).unwrap();
        assert!(id.is_right_permutive() && id.is_left_permutive());
        assert!(!LocalRule::shift(2).unwrap().is_right_permutive());
        assert!(LocalRule::shift(2).unwrap().is_left_permutive());
        // the two fixed points 1^∞ and 2^∞ share an image
        let f = permutive_collapsing();
        assert_eq!(f.apply_windows(&[1, 1, 1]).unwrap(), f.apply_windows(&[2, 2, 2]).unwrap());
    }

    #[test]
    fn extension() {
        let g = permutive_bijective();
        assert_eq!(g.extend(0).unwrap(), g);
        let s = LocalRule::shift(2).unwrap();
        assert_eq!(s.extend(1).unwrap().apply_windows(&[0, 1, 0]).unwrap(), vec![1]);
        let wide = g.extend(2).unwrap();
        let x = [2, 0, 1, 1, 2, 2, 0, 0, 1];
        assert_eq!(wide.apply_windows(&x).unwrap(), g.apply_windows(&x).unwrap()[2..]);
    }

    #[test]
    fn composition() {
        let f = permutive_collapsing();
        assert_eq!(f.compose(&LocalRule::identity(3).unwrap()).unwrap(), f);
        let s = LocalRule::shift(3).unwrap();
        let ss = s.compose(&s).unwrap();
        assert_eq!(ss.window(), 3);
        assert_eq!(ss.apply_windows(&[2, 0, 1]).unwrap(), vec![2]);
        assert!(f.compose(&permutive_bijective()).unwrap().is_right_permutive());
        assert_eq!(
            f.compose(&LocalRule::identity(2).unwrap()),
            Err(Error::AlphabetMismatch { left: 3, right: 2 })
        );
    }

    #[test]
    fn transducer_bridge() {
        let s = LocalRule::shift(3).unwrap();
        let t = s.to_transducer().unwrap();
        assert!(t.equal_omega(&Transducer::shift(3).unwrap()));
        assert_eq!(LocalRule::from_transducer(&Transducer::shift(3).unwrap()).unwrap(), s);

        let id = LocalRule::identity(2).unwrap();
        assert!(id.to_transducer().unwrap().minimal().is_identity());
        let back = LocalRule::from_transducer(&Transducer::identity(2).unwrap()).unwrap();
        assert_eq!(back, id);

        let flip = Transducer::single_state(&Perm::new(vec![1, 0]).unwrap()).unwrap();
        assert_eq!(LocalRule::from_transducer(&flip).unwrap().table(), &[1, 0]);
    }

    #[test]
    fn same_map_across_windows() {
        let g = permutive_bijective();
        assert!(g.same_map(&g.extend(2).unwrap()));
        assert!(!g.same_map(&permutive_collapsing()));
    }
}
