//! Automorphisms of the unlabeled multi-digraph underlying an automaton, and
//! the transducers they induce.

use std::collections::BTreeMap;

use crate::automaton::Automaton;
use crate::error::{Error, Result};
use crate::perm::{lcm, Perm};
use crate::transducer::Transducer;

/// Default bound on the number of automorphisms enumerated.
pub const DEFAULT_AUT_CAP: usize = 10_000;

/// A digraph automorphism of `G_A`. Edges are the pairs `(q, x)`; edge
/// `(q, x)` is sent to `(vertex(q), edge_letter[q * n + x])`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DigraphAutomorphism {
    vertex: Perm,
    edge_letter: Vec<usize>,
    n: usize,
}

impl DigraphAutomorphism {
    /// Validates source, target and bijectivity conditions against `a`.
    pub fn new(a: &Automaton, vertex: Perm, edge_letter: Vec<usize>) -> Result<Self> {
        let n = a.alphabet_size();
        let m = a.state_count();
        if vertex.len() != m {
            return Err(Error::InvalidAutomorphism(format!(
                "vertex map has {} entries, automaton has {m} states",
                vertex.len()
            )));
        }
        if edge_letter.len() != m * n {
            return Err(Error::InvalidAutomorphism(format!(
                "edge map has {} entries, expected {}",
                edge_letter.len(),
                m * n
            )));
        }
        for q in 0..m {
            let row = &edge_letter[q * n..(q + 1) * n];
            if Perm::new(row.to_vec()).is_err() {
                return Err(Error::InvalidAutomorphism(format!("edges at vertex {q} are not a bijection")));
            }
            let image = vertex.apply(q);
            for x in 0..n {
                if a.delta(image, row[x]) != vertex.apply(a.delta(q, x)) {
                    return Err(Error::InvalidAutomorphism(format!(
                        "edge ({q}, {x}) is not sent to an edge with the image target"
                    )));
                }
            }
        }
        Ok(DigraphAutomorphism { vertex, edge_letter, n })
    }

    pub fn identity(a: &Automaton) -> Self {
        let n = a.alphabet_size();
        DigraphAutomorphism {
            vertex: Perm::identity(a.state_count()),
            edge_letter: (0..a.table().len()).map(|i| i % n).collect(),
            n,
        }
    }

    pub fn vertex_perm(&self) -> &Perm {
        &self.vertex
    }

    pub fn edge_table(&self) -> &[usize] {
        &self.edge_letter
    }

    /// Image of edge `(q, x)` as `(vertex, letter)`.
    pub fn image_edge(&self, q: usize, x: usize) -> (usize, usize) {
        (self.vertex.apply(q), self.edge_letter[q * self.n + x])
    }

    /// `self` first, then `other`.
    pub fn then(&self, other: &DigraphAutomorphism) -> DigraphAutomorphism {
        let n = self.n;
        let edge_letter = (0..self.edge_letter.len())
            .map(|i| {
                let (q1, y1) = self.image_edge(i / n, i % n);
                other.edge_letter[q1 * n + y1]
            })
            .collect();
        DigraphAutomorphism { vertex: self.vertex.then(&other.vertex), edge_letter, n }
    }

    pub fn inverse(&self) -> DigraphAutomorphism {
        let n = self.n;
        let mut edge_letter = vec![0; self.edge_letter.len()];
        for i in 0..self.edge_letter.len() {
            let (q1, y1) = self.image_edge(i / n, i % n);
            edge_letter[q1 * n + y1] = i % n;
        }
        DigraphAutomorphism { vertex: self.vertex.inverse(), edge_letter, n }
    }

    pub fn is_identity(&self) -> bool {
        self.vertex.is_identity() && self.edge_letter.iter().enumerate().all(|(i, &y)| y == i % self.n)
    }

    pub fn is_vertex_fixing(&self) -> bool {
        self.vertex.is_identity()
    }

    /// Letter permutation applied to the edges at a fixed vertex.
    pub fn letter_perm_at(&self, q: usize) -> Perm {
        Perm::new(self.edge_letter[q * self.n..(q + 1) * self.n].to_vec())
            .expect("validated automorphism")
    }

    /// Order as a permutation of the edge set.
    pub fn order(&self) -> usize {
        let n = self.n;
        let edges = self.edge_letter.len();
        let as_perm: Vec<usize> = (0..edges)
            .map(|i| {
                let (q, y) = self.image_edge(i / n, i % n);
                q * n + y
            })
            .collect();
        let edge_order = Perm::new(as_perm).expect("validated automorphism").order();
        lcm(edge_order, self.vertex.order())
    }
}

/// Number of edges from each vertex to each vertex.
fn count_matrix(a: &Automaton) -> Vec<usize> {
    let m = a.state_count();
    let mut c = vec![0; m * m];
    for q in 0..m {
        for &r in a.row(q) {
            c[q * m + r] += 1;
        }
    }
    c
}

fn factorial(k: usize) -> u128 {
    (1..=k as u128).product()
}

/// One parallel class: source vertex, its letters, the target letters and
/// every bijection between them.
type Slot = (usize, Vec<usize>, Vec<usize>, Vec<Perm>);

/// All automorphisms of `G_A`, sorted by (vertex map, edge map).
pub fn enumerate_automorphisms(a: &Automaton, cap: usize) -> Result<Vec<DigraphAutomorphism>> {
    let m = a.state_count();
    let n = a.alphabet_size();
    let c = count_matrix(a);
    // vertex invariants: sorted out-count row and in-count column
    let sig: Vec<(Vec<usize>, Vec<usize>)> = (0..m)
        .map(|q| {
            let mut out: Vec<usize> = (0..m).map(|r| c[q * m + r]).collect();
            let mut inn: Vec<usize> = (0..m).map(|r| c[r * m + q]).collect();
            out.sort_unstable();
            inn.sort_unstable();
            (out, inn)
        })
        .collect();

    let mut vertex_maps = Vec::new();
    let mut current = Vec::with_capacity(m);
    let mut used = vec![false; m];
    extend_vertex_map(&c, &sig, m, cap, &mut current, &mut used, &mut vertex_maps);

    // letters grouped by target, per vertex
    let classes: Vec<BTreeMap<usize, Vec<usize>>> = (0..m)
        .map(|q| {
            let mut by_target: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
            for x in 0..n {
                by_target.entry(a.delta(q, x)).or_default().push(x);
            }
            by_target
        })
        .collect();
    let per_vertex_map: u128 = classes
        .iter()
        .flat_map(|cl| cl.values().map(|v| factorial(v.len())))
        .try_fold(1u128, |acc, f| acc.checked_mul(f))
        .unwrap_or(u128::MAX);
    let total = (vertex_maps.len() as u128).saturating_mul(per_vertex_map);
    if total > cap as u128 {
        return Err(Error::CapExceeded { what: "automorphism enumeration", cap });
    }

    let mut out = Vec::with_capacity(total as usize);
    for sigma in vertex_maps {
        let mut slots: Vec<Slot> = Vec::new();
        for (q, cl) in classes.iter().enumerate() {
            for (&r, letters) in cl {
                let target_letters = classes[sigma[q]][&sigma[r]].clone();
                slots.push((q, letters.clone(), target_letters, Perm::all(letters.len())));
            }
        }
        let mut choice = vec![0usize; slots.len()];
        'odometer: loop {
            let mut edge_letter = vec![0; m * n];
            for (s, (q, src, dst, perms)) in slots.iter().enumerate() {
                let p = &perms[choice[s]];
                for (i, &x) in src.iter().enumerate() {
                    edge_letter[q * n + x] = dst[p.apply(i)];
                }
            }
            out.push(DigraphAutomorphism {
                vertex: Perm::new(sigma.clone()).expect("bijection"),
                edge_letter,
                n,
            });
            let mut s = slots.len();
            loop {
                if s == 0 {
                    break 'odometer;
                }
                s -= 1;
                choice[s] += 1;
                if choice[s] < slots[s].3.len() {
                    break;
                }
                choice[s] = 0;
            }
        }
    }
    out.sort();
    Ok(out)
}

fn extend_vertex_map(
    c: &[usize],
    sig: &[(Vec<usize>, Vec<usize>)],
    m: usize,
    cap: usize,
    current: &mut Vec<usize>,
    used: &mut [bool],
    out: &mut Vec<Vec<usize>>,
) {
    let q = current.len();
    if out.len() > cap {
        return;
    }
    if q == m {
        out.push(current.clone());
        return;
    }
    for image in 0..m {
        if used[image] || sig[image] != sig[q] {
            continue;
        }
        let consistent = (0..q).all(|p| {
            c[p * m + q] == c[current[p] * m + image] && c[q * m + p] == c[image * m + current[p]]
        }) && c[q * m + q] == c[image * m + image];
        if !consistent {
            continue;
        }
        used[image] = true;
        current.push(image);
        extend_vertex_map(c, sig, m, cap, current, used, out);
        current.pop();
        used[image] = false;
    }
}

/// The automorphism induced by permuting the alphabet with `rho`, if `rho`
/// permutes the word classes of the strongly synchronizing core automaton `a`.
pub fn automorphism_from_alphabet_perm(a: &Automaton, rho: &Perm) -> Result<Option<DigraphAutomorphism>> {
    let n = a.alphabet_size();
    if rho.len() != n {
        return Err(Error::AlphabetMismatch { left: n, right: rho.len() });
    }
    let k = a.sync_level().ok_or(Error::NotSynchronizing)?.max(1);
    if !a.is_core() {
        return Err(Error::NotCore);
    }
    let forced = a.forced_states(k);
    let m = a.state_count();
    let mut vertex = vec![usize::MAX; m];
    for (w, &q) in forced.iter().enumerate() {
        // apply rho letterwise to the word of rank w
        let mut rank = 0;
        let mut place = 1;
        let mut rest = w;
        for _ in 0..k {
            rank += rho.apply(rest % n) * place;
            place *= n;
            rest /= n;
        }
        let image = forced[rank];
        if vertex[q] == usize::MAX {
            vertex[q] = image;
        } else if vertex[q] != image {
            return Ok(None);
        }
    }
    let Ok(vertex) = Perm::new(vertex) else {
        return Ok(None);
    };
    let edge_letter = (0..m * n).map(|i| rho.apply(i % n)).collect();
    Ok(DigraphAutomorphism::new(a, vertex, edge_letter).ok())
}

/// The transducer `H(A, φ)`: automaton `a`, and reading `x` at `p` writes
/// the letter of the image edge.
pub fn transducer_from_automorphism(a: &Automaton, phi: &DigraphAutomorphism) -> Result<Transducer> {
    DigraphAutomorphism::new(a, phi.vertex.clone(), phi.edge_letter.clone())?;
    Transducer::new(a.clone(), phi.edge_letter.clone())
}

/// The alphabet permutation inducing `phi`, if the minimal form of `H(A, φ)`
/// has a single state.
pub fn is_permutation_induced(a: &Automaton, phi: &DigraphAutomorphism) -> Result<Option<Perm>> {
    let h = transducer_from_automorphism(a, phi)?.minimal();
    if h.state_count() != 1 {
        return Ok(None);
    }
    Ok(Some(Perm::new(h.output_row(0).to_vec())?))
}

/// Checks that `φ ↦ H(A, φ)` is multiplicative on the pair and does not send
/// a nontrivial automorphism to the identity.
pub fn verify_embedding(a: &Automaton, phi: &DigraphAutomorphism, psi: &DigraphAutomorphism) -> Result<bool> {
    let h_phi = transducer_from_automorphism(a, phi)?;
    let h_psi = transducer_from_automorphism(a, psi)?;
    let h_both = transducer_from_automorphism(a, &phi.then(psi))?;
    let product = h_phi.product_min(&h_psi)?;
    let multiplicative = h_both.equal_omega(&product);
    let faithful = phi.is_identity() || !h_phi.is_identity();
    Ok(multiplicative && faithful)
}

/// Splits a vertex-fixing automorphism into transpositions of parallel
/// edges whose product, left to right, is `phi`.
pub fn involution_factors(a: &Automaton, phi: &DigraphAutomorphism) -> Result<Vec<DigraphAutomorphism>> {
    if let Some(q) = (0..a.state_count()).find(|&q| phi.vertex.apply(q) != q) {
        return Err(Error::MovesVertex(q));
    }
    let n = a.alphabet_size();
    let mut out = Vec::new();
    for q in 0..a.state_count() {
        for cycle in phi.letter_perm_at(q).cycles() {
            for &c in &cycle[1..] {
                let mut factor = DigraphAutomorphism::identity(a);
                factor.edge_letter.swap(q * n + cycle[0], q * n + c);
                out.push(DigraphAutomorphism::new(a, factor.vertex, factor.edge_letter)?);
            }
        }
    }
    Ok(out)
}

/// The automorphism fixing every vertex and permuting the letters at vertex
/// `q` by `alpha`. Fails if `alpha` moves a letter to a non-parallel edge.
pub fn vertex_fixing_from_letters(a: &Automaton, q: usize, alpha: &Perm) -> Result<DigraphAutomorphism> {
    let n = a.alphabet_size();
    let mut edge_letter: Vec<usize> = (0..a.table().len()).map(|i| i % n).collect();
    for x in 0..n {
        edge_letter[q * n + x] = alpha.apply(x);
    }
    DigraphAutomorphism::new(a, Perm::identity(a.state_count()), edge_letter)
}

/// The unlabeled multi-digraph `G_A`: edge multiplicities between vertices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Digraph {
    vertices: usize,
    counts: Vec<usize>,
}

impl Digraph {
    pub fn from_automaton(a: &Automaton) -> Self {
        Digraph { vertices: a.state_count(), counts: count_matrix(a) }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices
    }

    /// Number of edges from `u` to `v`.
    pub fn count(&self, u: usize, v: usize) -> usize {
        self.counts[u * self.vertices + v]
    }

    fn row(&self, u: usize) -> &[usize] {
        &self.counts[u * self.vertices..(u + 1) * self.vertices]
    }

    /// Pairs `u < v` with identical out-edge counts towards every vertex.
    pub fn amalgamable_pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for u in 0..self.vertices {
            for v in u + 1..self.vertices {
                if self.row(u) == self.row(v) {
                    out.push((u, v));
                }
            }
        }
        out
    }

    /// Identifies two amalgamable vertices: the merged vertex keeps the
    /// common out-edges and receives the in-edges of both.
    pub fn amalgamate(&self, u: usize, v: usize) -> Digraph {
        let (keep, drop) = if u < v { (u, v) } else { (v, u) };
        let index = |w: usize| match w.cmp(&drop) {
            std::cmp::Ordering::Less => w,
            std::cmp::Ordering::Equal => keep,
            std::cmp::Ordering::Greater => w - 1,
        };
        let m = self.vertices - 1;
        let mut counts = vec![0; m * m];
        for a in (0..self.vertices).filter(|&a| a != drop) {
            for b in 0..self.vertices {
                counts[index(a) * m + index(b)] += self.count(a, b);
            }
        }
        Digraph { vertices: m, counts }
    }

    /// Isomorphism-invariant encoding: least adjacency matrix over the leaves
    /// of an individualization-refinement search.
    pub fn canonical_form(&self) -> Vec<usize> {
        let mut best: Option<Vec<usize>> = None;
        self.search(vec![0; self.vertices], &mut best);
        let mut key = vec![self.vertices];
        key.extend(best.unwrap_or_default());
        key
    }

    pub fn is_isomorphic(&self, other: &Digraph) -> bool {
        self.vertices == other.vertices && self.canonical_form() == other.canonical_form()
    }

    fn refine(&self, mut colour: Vec<usize>) -> Vec<usize> {
        let m = self.vertices;
        let mut classes = distinct(&colour);
        loop {
            type Sig = (usize, Vec<(usize, usize)>, Vec<(usize, usize)>);
            let sigs: Vec<Sig> = (0..m)
                .map(|v| {
                    let mut out: Vec<(usize, usize)> =
                        (0..m).filter(|&w| self.count(v, w) > 0).map(|w| (colour[w], self.count(v, w))).collect();
                    let mut inn: Vec<(usize, usize)> =
                        (0..m).filter(|&w| self.count(w, v) > 0).map(|w| (colour[w], self.count(w, v))).collect();
                    out.sort_unstable();
                    inn.sort_unstable();
                    (colour[v], out, inn)
                })
                .collect();
            let mut sorted = sigs.clone();
            sorted.sort();
            sorted.dedup();
            colour = sigs.iter().map(|s| sorted.binary_search(s).expect("present")).collect();
            if sorted.len() == classes {
                return colour;
            }
            classes = sorted.len();
        }
    }

    fn search(&self, colour: Vec<usize>, best: &mut Option<Vec<usize>>) {
        let m = self.vertices;
        let colour = self.refine(colour);
        let mut size = vec![0usize; m];
        for &c in &colour {
            size[c] += 1;
        }
        let Some(cell) = (0..m).find(|&c| size[c] > 1) else {
            let mut matrix = vec![0; m * m];
            for u in 0..m {
                for v in 0..m {
                    matrix[colour[u] * m + colour[v]] = self.count(u, v);
                }
            }
            if best.as_ref().is_none_or(|b| matrix < *b) {
                *best = Some(matrix);
            }
            return;
        };
        for v in (0..m).filter(|&v| colour[v] == cell) {
            let split = (0..m)
                .map(|u| 2 * colour[u] + usize::from(colour[u] == cell && u != v))
                .collect();
            self.search(split, best);
        }
    }
}

fn distinct(colour: &[usize]) -> usize {
    let mut c = colour.to_vec();
    c.sort_unstable();
    c.dedup();
    c.len()
}
