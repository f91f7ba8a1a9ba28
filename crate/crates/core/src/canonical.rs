//! Renumbering-invariant encodings of automata and transducers.

/// Canonical encoding of a machine up to state renaming.
///
/// Two machines have equal keys iff they are isomorphic as labeled machines
/// (transitions, and outputs when present).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalKey(Vec<u32>);

impl CanonicalKey {
    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        self.0.iter().flat_map(|w| w.to_le_bytes()).collect()
    }
}

/// Breadth-first renumbering from every possible root, keeping the least
/// encoding. States left unreached after a search are handled by branching
/// over every candidate restart, so the result is invariant even for machines
/// that are not strongly connected.
pub(crate) fn encode(n: usize, states: usize, delta: &[usize], output: Option<&[usize]>) -> CanonicalKey {
    let mut best: Option<Vec<u32>> = None;
    let search = Search { n, states, delta, output };
    for root in 0..states {
        let mut st = State::new(states, n, output.is_some());
        st.visit(root);
        search.run(st, &mut best);
    }
    let mut key = vec![n as u32, states as u32, u32::from(output.is_some())];
    key.extend(best.unwrap_or_default());
    CanonicalKey(key)
}

struct Search<'a> {
    n: usize,
    states: usize,
    delta: &'a [usize],
    output: Option<&'a [usize]>,
}

#[derive(Clone)]
struct State {
    new_index: Vec<u32>,
    order: Vec<usize>,
    head: usize,
    encoding: Vec<u32>,
}

impl State {
    fn new(states: usize, n: usize, labeled: bool) -> Self {
        State {
            new_index: vec![u32::MAX; states],
            order: Vec::with_capacity(states),
            head: 0,
            encoding: Vec::with_capacity(states * n * if labeled { 2 } else { 1 }),
        }
    }

    fn visit(&mut self, q: usize) -> u32 {
        if self.new_index[q] == u32::MAX {
            self.new_index[q] = self.order.len() as u32;
            self.order.push(q);
        }
        self.new_index[q]
    }
}

impl Search<'_> {
    fn run(&self, mut st: State, best: &mut Option<Vec<u32>>) {
        while st.head < st.order.len() {
            let q = st.order[st.head];
            st.head += 1;
            for x in 0..self.n {
                let t = self.delta[q * self.n + x];
                let idx = st.visit(t);
                st.encoding.push(idx);
                if let Some(out) = self.output {
                    st.encoding.push(out[q * self.n + x] as u32);
                }
            }
            // prune: a strictly worse prefix can never win
            if let Some(b) = best.as_ref() {
                let len = st.encoding.len();
                if st.encoding[..] > b[..len] {
                    return;
                }
            }
        }
        if st.order.len() == self.states {
            if best.as_ref().is_none_or(|b| st.encoding < *b) {
                *best = Some(st.encoding);
            }
            return;
        }
        for r in 0..self.states {
            if st.new_index[r] == u32::MAX {
                let mut branch = st.clone();
                branch.visit(r);
                self.run(branch, best);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn invariant_under_renaming() {
        // 0 -> 1 -> 2 -> 0 on letter 0, loops on letter 1
        let delta = [1, 0, 2, 1, 0, 2];
        // swap states 0 and 1
        let renamed = [2, 0, 0, 1, 1, 2];
        assert_eq!(encode(2, 3, &delta, None), encode(2, 3, &renamed, None));
    }

    #[test]
    fn disconnected_machines_are_handled() {
        let a = [0, 0, 1, 1];
        let b = [1, 1, 0, 0]; // not isomorphic: swaps
        assert_ne!(encode(2, 2, &a, None), encode(2, 2, &b, None));
        let c = [0, 1, 1, 0, 2, 2];
        let d = [0, 0, 1, 2, 2, 1];
        assert_eq!(encode(2, 3, &c, None), encode(2, 3, &d, None));
    }

    #[test]
    fn outputs_distinguish() {
        let delta = [0, 0];
        assert_ne!(encode(2, 1, &delta, Some(&[0, 1])), encode(2, 1, &delta, Some(&[1, 0])));
    }
}
