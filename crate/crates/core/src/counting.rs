//! Exact folding counts: Bell numbers, set partitions, the signed sums
//! behind the closed formula for `G(n, 2)`, and brute-force enumeration of
//! foldings for cross-checks.

use std::collections::{BTreeSet, HashSet, VecDeque};

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

use crate::automaton::Automaton;
use crate::error::{Error, Result};
use crate::partition::{StatePartition, UnionFind};

/// Largest ground set [`set_partitions`] will enumerate.
pub const SET_PARTITION_CAP: usize = 12;
/// Largest alphabet accepted by [`count_foldings_g_n_2`].
pub const FOLD_COUNT_CAP: usize = 12;
/// Default bound on the number of foldings held by the lattice method.
pub const DEFAULT_LATTICE_CAP: usize = 1_000_000;

/// Bell numbers `B(0), …, B(k)` from `B(m) = Σ_{j=1}^{m} C(m-1, j-1) B(m-j)`.
pub fn bell_numbers(k: usize) -> Vec<BigUint> {
    let mut bell: Vec<BigUint> = vec![BigUint::one()];
    for m in 1..=k {
        // row m-1 of Pascal's triangle
        let mut binom = BigUint::one();
        let mut sum = BigUint::zero();
        for j in 1..=m {
            sum += &binom * &bell[m - j];
            binom = binom * BigUint::from(m - j) / BigUint::from(j);
        }
        bell.push(sum);
    }
    bell
}

pub fn bell(k: usize) -> BigUint {
    bell_numbers(k).pop().expect("nonempty")
}

/// Set partitions of `{0, …, k-1}` as restricted growth strings in
/// lexicographic order.
#[derive(Debug, Clone)]
pub struct SetPartitions {
    rgs: Vec<usize>,
    maxima: Vec<usize>,
    done: bool,
}

impl Iterator for SetPartitions {
    type Item = StatePartition;

    fn next(&mut self) -> Option<StatePartition> {
        if self.done {
            return None;
        }
        let current = StatePartition::new(self.rgs.clone()).expect("restricted growth string");
        // advance: rightmost position that can grow
        let k = self.rgs.len();
        match (1..k).rev().find(|&i| self.rgs[i] <= self.maxima[i - 1]) {
            Some(i) => {
                self.rgs[i] += 1;
                let top = self.maxima[i - 1].max(self.rgs[i]);
                self.maxima[i] = top;
                for j in i + 1..k {
                    self.rgs[j] = 0;
                    self.maxima[j] = top;
                }
            }
            None => self.done = true,
        }
        Some(current)
    }
}

pub fn set_partitions(k: usize) -> Result<SetPartitions> {
    if k > SET_PARTITION_CAP {
        return Err(Error::SizeCap {
            what: "set partition enumeration",
            size: k as u128,
            cap: SET_PARTITION_CAP as u128,
        });
    }
    Ok(SetPartitions { rgs: vec![0; k], maxima: vec![0; k], done: false })
}

/// Integer partitions of `t` as non-increasing part lists.
fn integer_partitions(t: usize) -> Vec<Vec<usize>> {
    fn go(rest: usize, max: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest == 0 {
            out.push(current.clone());
            return;
        }
        for part in (1..=rest.min(max)).rev() {
            current.push(part);
            go(rest - part, part, current, out);
            current.pop();
        }
    }
    let mut out = Vec::new();
    go(t, t, &mut Vec::new(), &mut out);
    out
}

fn factorials(k: usize) -> Vec<BigUint> {
    let mut f = vec![BigUint::one()];
    for i in 1..=k {
        let next = &f[i - 1] * BigUint::from(i);
        f.push(next);
    }
    f
}

/// Number of set partitions of a `t`-set whose block sizes are `parts`.
fn block_type_count(parts: &[usize], fact: &[BigUint]) -> BigUint {
    let t: usize = parts.iter().sum();
    let mut denom = BigUint::one();
    for &p in parts {
        denom *= &fact[p];
    }
    let mut i = 0;
    while i < parts.len() {
        let run = parts[i..].iter().take_while(|&&p| p == parts[i]).count();
        denom *= &fact[run];
        i += run;
    }
    &fact[t] / denom
}

/// `R(s, t) = Σ_ρ (-1)^{|ρ|-1} (|ρ|-1)! Π_{C ∈ ρ} B(|C| s)` over set
/// partitions `ρ` of a `t`-set, summed by block type.
pub fn moebius_r(s: usize, t: usize) -> BigInt {
    let bells = bell_numbers(s * t);
    let fact = factorials(t);
    moebius_r_with(s, t, &bells, &fact)
}

fn moebius_r_with(s: usize, t: usize, bells: &[BigUint], fact: &[BigUint]) -> BigInt {
    let mut total = BigInt::zero();
    for parts in integer_partitions(t) {
        let blocks = parts.len();
        let mut term = block_type_count(&parts, fact) * &fact[blocks - 1];
        for &p in &parts {
            term *= &bells[p * s];
        }
        let term = BigInt::from(term);
        if blocks % 2 == 1 {
            total += term;
        } else {
            total -= term;
        }
    }
    total
}

/// Number of foldings of `G(n, 2)`: `Σ_π Π_{A ∈ π} R(|π|, |A|)` over set
/// partitions `π` of the alphabet, summed by block type.
pub fn count_foldings_g_n_2(n: usize) -> Result<BigUint> {
    if n == 0 || n > FOLD_COUNT_CAP {
        return Err(Error::SizeCap { what: "folding count alphabet", size: n as u128, cap: FOLD_COUNT_CAP as u128 });
    }
    let bells = bell_numbers(n * n);
    let fact = factorials(n);
    let mut r_cache = vec![vec![None; n + 1]; n + 1];
    let mut total = BigInt::zero();
    for parts in integer_partitions(n) {
        let s = parts.len();
        let mut term = BigInt::from(block_type_count(&parts, &fact));
        for &t in &parts {
            let r: &BigInt = r_cache[s][t].get_or_insert_with(|| moebius_r_with(s, t, &bells, &fact));
            term *= r;
        }
        total += term;
    }
    total
        .to_biguint()
        .ok_or_else(|| Error::Invariant("folding count came out negative".into()))
}

/// Least folding containing every given pair: union-find where each merge
/// of `p` and `q` also queues the successor pairs `(δ(p,x), δ(q,x))`.
pub fn congruence_closure(a: &Automaton, pairs: &[(usize, usize)]) -> Result<StatePartition> {
    let mut uf = UnionFind::new(a.state_count());
    close_into(a, &mut uf, pairs)?;
    Ok(uf.partition())
}

fn close_into(a: &Automaton, uf: &mut UnionFind, pairs: &[(usize, usize)]) -> Result<()> {
    let m = a.state_count();
    if let Some(&(p, q)) = pairs.iter().find(|&&(p, q)| p >= m || q >= m) {
        return Err(Error::TargetOutOfRange { state: p, letter: 0, target: q, states: m });
    }
    let mut pending: Vec<(usize, usize)> = pairs.to_vec();
    while let Some((p, q)) = pending.pop() {
        if uf.union(p, q) {
            for x in 0..a.alphabet_size() {
                pending.push((a.delta(p, x), a.delta(q, x)));
            }
        }
    }
    Ok(())
}

/// Least folding coarser than both arguments.
pub fn join(a: &Automaton, left: &StatePartition, right: &StatePartition) -> Result<StatePartition> {
    let mut uf = UnionFind::from_partition(left);
    let pairs: Vec<(usize, usize)> = right
        .blocks()
        .iter()
        .flat_map(|b| b.windows(2).map(|w| (w[0], w[1])).collect::<Vec<_>>())
        .collect();
    close_into(a, &mut uf, &pairs)?;
    Ok(uf.partition())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnumerationMethod {
    /// Filter every set partition of the states.
    Exhaustive,
    /// Close the principal congruences under joins.
    Lattice,
}

/// All foldings of `a`, sorted by class table.
pub fn enumerate_foldings(a: &Automaton, method: EnumerationMethod) -> Result<Vec<StatePartition>> {
    enumerate_foldings_capped(a, method, DEFAULT_LATTICE_CAP)
}

pub fn enumerate_foldings_capped(
    a: &Automaton,
    method: EnumerationMethod,
    cap: usize,
) -> Result<Vec<StatePartition>> {
    match method {
        EnumerationMethod::Exhaustive => {
            let mut out = Vec::new();
            for p in set_partitions(a.state_count())? {
                if a.is_folding(&p)? {
                    out.push(p);
                }
            }
            out.sort();
            Ok(out)
        }
        EnumerationMethod::Lattice => lattice_foldings(a, cap),
    }
}

fn lattice_foldings(a: &Automaton, cap: usize) -> Result<Vec<StatePartition>> {
    let m = a.state_count();
    let mut principal: BTreeSet<StatePartition> = BTreeSet::new();
    for p in 0..m {
        for q in p + 1..m {
            principal.insert(congruence_closure(a, &[(p, q)])?);
        }
    }
    let principal: Vec<StatePartition> = principal.into_iter().collect();
    let mut seen: HashSet<StatePartition> = HashSet::new();
    let mut queue = VecDeque::new();
    for p in std::iter::once(StatePartition::discrete(m)).chain(principal.iter().cloned()) {
        if seen.insert(p.clone()) {
            queue.push_back(p);
        }
    }
    while let Some(current) = queue.pop_front() {
        for p in &principal {
            if p.refines(&current) {
                continue;
            }
            let joined = join(a, &current, p)?;
            if !seen.contains(&joined) {
                if seen.len() >= cap {
                    return Err(Error::CapExceeded { what: "folding lattice", cap });
                }
                seen.insert(joined.clone());
                queue.push_back(joined);
            }
        }
    }
    let mut out: Vec<StatePartition> = seen.into_iter().collect();
    out.sort();
    Ok(out)
}
