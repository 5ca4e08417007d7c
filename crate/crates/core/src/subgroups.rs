//! Finitely generated subgroups of free groups as Stallings automata:
//! ranks, membership, intersections, double-coset sums, the rank-1
//! Hanna Neumann and SHNC verifiers, and strictly-reducible certification.

use crate::error::Error;
use crate::graphs::{fold, pullback, GraphMorphism, SerreGraph};
use crate::presentations::{normal_closure_membership, NcVerdict};
use crate::words::{cyclic_reduce, syllable_decomposition, Alphabet, Letter, Word};

/// Folded based core graph canonically representing a subgroup of the
/// free group on `alphabet`.
#[derive(Debug, Clone)]
pub struct StallingsAutomaton {
    pub graph: SerreGraph,
    pub basepoint: usize,
    pub alphabet: Alphabet,
    /// A generating set (the input for `from_generators`, a spanning-tree
    /// basis for derived automata).
    pub generators: Vec<Word>,
}

impl StallingsAutomaton {
    pub fn from_generators(alphabet: &Alphabet, words: &[Word]) -> StallingsAutomaton {
        let mut g = SerreGraph::new(1);
        for w in words {
            // A loop of fresh vertices spelling the word from the base.
            let mut prev = 0;
            for (i, &l) in w.letters().iter().enumerate() {
                let next = if i + 1 == w.len() { 0 } else { g.add_vertex() };
                g.add_edge(prev, next, Some(l));
                prev = next;
            }
        }
        let (folded, _, base) = fold(&g, 0);
        let (cored, _, _, base) = folded.core(base);
        debug_assert!(cored.is_folded());
        StallingsAutomaton {
            graph: cored,
            basepoint: base,
            alphabet: alphabet.clone(),
            generators: words.to_vec(),
        }
    }

    /// d(U) = E − V + 1 of the core graph.
    pub fn rank(&self) -> i64 {
        self.graph.num_edges() as i64 - self.graph.num_vertices() as i64 + 1
    }

    /// d̄(U) = max{0, d(U) − 1}.
    pub fn dbar(&self) -> i64 {
        (self.rank() - 1).max(0)
    }

    /// True iff `w` reads a closed basepoint loop.
    pub fn membership(&self, w: &Word) -> bool {
        let mut v = self.basepoint;
        for &l in w.letters() {
            match self.graph.dart_with_label(v, l) {
                Some(d) => v = self.graph.dst(d),
                None => return false,
            }
        }
        v == self.basepoint
    }

    /// BFS spanning tree: parent dart per vertex plus tree-edge flags.
    fn spanning_tree(&self) -> (Vec<Option<usize>>, Vec<bool>) {
        let g = &self.graph;
        let mut parent: Vec<Option<usize>> = vec![None; g.num_vertices()];
        let mut seen = vec![false; g.num_vertices()];
        seen[self.basepoint] = true;
        let mut queue = std::collections::VecDeque::from([self.basepoint]);
        let mut tree = vec![false; g.num_edges()];
        while let Some(v) = queue.pop_front() {
            for d in g.darts_at(v) {
                let w = g.dst(d);
                if !seen[w] {
                    seen[w] = true;
                    parent[w] = Some(d);
                    tree[g.orbit(d)] = true;
                    queue.push_back(w);
                }
            }
        }
        (parent, tree)
    }

    fn tree_path_letters(&self, parent: &[Option<usize>], mut v: usize) -> Vec<Letter> {
        let g = &self.graph;
        let mut rev = Vec::new();
        while let Some(d) = parent[v] {
            rev.push(g.label(d).expect("labeled automaton"));
            v = g.src(d);
        }
        rev.reverse();
        rev
    }

    /// Free basis with respect to a spanning tree of the core graph.
    pub fn basis(&self) -> Vec<Word> {
        let g = &self.graph;
        let (parent, tree) = self.spanning_tree();
        let mut out = Vec::new();
        for e in 0..g.num_edges() {
            if tree[e] {
                continue;
            }
            let d = 2 * e;
            let mut letters = self.tree_path_letters(&parent, g.src(d));
            letters.push(g.label(d).expect("labeled automaton"));
            let mut back = self.tree_path_letters(&parent, g.dst(d));
            back.reverse();
            letters.extend(back.into_iter().map(Letter::inverse));
            out.push(crate::words::free_reduce(letters));
        }
        out
    }

    /// Express an accepted word as a product of `basis()` elements: the
    /// sequence of (basis index, inverted) crossings of non-tree edges
    /// along the accepting loop. The product freely reduces back to `w`,
    /// which callers can (and tests do) verify independently.
    pub fn express_in_basis(&self, w: &Word) -> Option<Vec<(usize, bool)>> {
        let g = &self.graph;
        let (_, tree) = self.spanning_tree();
        let nontree_index: Vec<Option<usize>> = {
            let mut next = 0;
            (0..g.num_edges())
                .map(|e| {
                    if tree[e] {
                        None
                    } else {
                        next += 1;
                        Some(next - 1)
                    }
                })
                .collect()
        };
        let mut v = self.basepoint;
        let mut out = Vec::new();
        for &l in w.letters() {
            let d = g.dart_with_label(v, l)?;
            if let Some(i) = nontree_index[g.orbit(d)] {
                out.push((i, d % 2 == 1));
            }
            v = g.dst(d);
        }
        if v == self.basepoint {
            Some(out)
        } else {
            None
        }
    }
}

/// The connected component of `v`, with vertex and dart maps.
fn component_subgraph(g: &SerreGraph, v: usize) -> (SerreGraph, usize) {
    let (comp, _) = g.components();
    let target = comp[v];
    let mut vmap = vec![None; g.num_vertices()];
    let mut out = SerreGraph::new(0);
    for u in 0..g.num_vertices() {
        if comp[u] == target {
            vmap[u] = Some(out.add_vertex());
        }
    }
    for e in 0..g.num_edges() {
        let d = 2 * e;
        if comp[g.src(d)] == target {
            out.add_edge(vmap[g.src(d)].unwrap(), vmap[g.dst(d)].unwrap(), g.label(d));
        }
    }
    (out, vmap[v].unwrap())
}

/// Iteratively delete all vertices of degree ≤ 1 (no basepoint exception):
/// what remains is the disjoint union of the cyclic cores.
fn unbased_core(g: &SerreGraph) -> SerreGraph {
    let mut alive_v = vec![true; g.num_vertices()];
    let mut alive_d = vec![true; g.num_darts()];
    loop {
        let mut changed = false;
        for v in 0..g.num_vertices() {
            if !alive_v[v] {
                continue;
            }
            let incident: Vec<usize> =
                g.darts().filter(|&d| alive_d[d] && g.src(d) == v).collect();
            if incident.len() <= 1 {
                alive_v[v] = false;
                for d in incident {
                    alive_d[d] = false;
                    alive_d[d ^ 1] = false;
                }
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let mut vmap = vec![None; g.num_vertices()];
    let mut out = SerreGraph::new(0);
    for v in 0..g.num_vertices() {
        if alive_v[v] {
            vmap[v] = Some(out.add_vertex());
        }
    }
    for e in 0..g.num_edges() {
        let d = 2 * e;
        if alive_d[d] {
            out.add_edge(vmap[g.src(d)].unwrap(), vmap[g.dst(d)].unwrap(), g.label(d));
        }
    }
    out
}

pub fn intersect(u: &StallingsAutomaton, w: &StallingsAutomaton) -> Result<StallingsAutomaton, Error> {
    if u.alphabet.names() != w.alphabet.names() {
        return Err(Error::Input("intersection needs a common alphabet".into()));
    }
    let fu = GraphMorphism::to_rose(&u.graph, &u.alphabet)?;
    let fw = GraphMorphism::to_rose(&w.graph, &w.alphabet)?;
    let (p, pu, pw) = pullback(&fu, &fw);
    let base = (0..p.num_vertices())
        .find(|&v| pu.vertex_map[v] == u.basepoint && pw.vertex_map[v] == w.basepoint)
        .expect("pullback contains the basepoint pair");
    let (comp, base) = component_subgraph(&p, base);
    let (cored, _, _, base) = comp.core(base);
    debug_assert!(cored.is_folded());
    let mut auto = StallingsAutomaton {
        graph: cored,
        basepoint: base,
        alphabet: u.alphabet.clone(),
        generators: Vec::new(),
    };
    auto.generators = auto.basis();
    Ok(auto)
}

/// Σ over components of the full core pullback of b₁; the per-component
/// list keeps only positive entries (trivial intersections contribute 0),
/// sorted descending.
pub fn double_coset_sum(
    u: &StallingsAutomaton,
    w: &StallingsAutomaton,
) -> Result<(i64, Vec<i64>), Error> {
    if u.alphabet.names() != w.alphabet.names() {
        return Err(Error::Input("double cosets need a common alphabet".into()));
    }
    let cu = unbased_core(&u.graph);
    let cw = unbased_core(&w.graph);
    let fu = GraphMorphism::to_rose(&cu, &u.alphabet)?;
    let fw = GraphMorphism::to_rose(&cw, &w.alphabet)?;
    let (p, _, _) = pullback(&fu, &fw);
    let (per_component, total) = p.betti1();
    let mut ranks: Vec<i64> = per_component.into_iter().filter(|&b| b > 0).collect();
    ranks.sort_unstable_by(|a, b| b.cmp(a));
    Ok((total, ranks))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Containment {
    Inside,
    Outside,
    Unknown,
}

/// Report for the rank-1 Hanna Neumann bound Σ d(xUx⁻¹ ∩ W) ≤ bound.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HNReport {
    pub sum: i64,
    pub ranks: Vec<i64>,
    pub containment: Containment,
    pub bound: i64,
    pub holds: bool,
    /// Set when containment is Unknown and the larger bound d(U) was used.
    pub flagged: bool,
}

pub fn hn_verdict(
    u: &StallingsAutomaton,
    w: &StallingsAutomaton,
    w_generators: &[Word],
    budget: u64,
) -> Result<HNReport, Error> {
    if budget == 0 {
        return Err(Error::Config("oracle budget must be positive".into()));
    }
    let (sum, ranks) = double_coset_sum(u, w)?;
    let mut containment = Containment::Inside;
    for gen in &u.generators {
        match normal_closure_membership(&u.alphabet, w_generators, gen, budget)? {
            NcVerdict::Yes(_) => {}
            NcVerdict::No(_) => {
                containment = Containment::Outside;
                break;
            }
            NcVerdict::Unknown => containment = Containment::Unknown,
        }
    }
    let bound = match containment {
        Containment::Outside => u.dbar(),
        Containment::Inside | Containment::Unknown => u.rank(),
    };
    Ok(HNReport {
        sum,
        ranks,
        containment,
        bound,
        holds: sum <= bound,
        flagged: containment == Containment::Unknown,
    })
}

/// Report for the strengthened bound Σ d̄(xUx⁻¹ ∩ W) ≤ d̄(U)·d̄(W).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShncReport {
    pub sum: i64,
    pub bound: i64,
    pub holds: bool,
}

pub fn shnc_check(u: &StallingsAutomaton, w: &StallingsAutomaton) -> Result<ShncReport, Error> {
    let (_, ranks) = double_coset_sum(u, w)?;
    let sum: i64 = ranks.iter().map(|&b| (b - 1).max(0)).sum();
    let bound = u.dbar() * w.dbar();
    Ok(ShncReport { sum, bound, holds: sum <= bound })
}

/// Subgroup file format: a `basis: a b` line naming the free basis, then
/// one `gen: <word>` line per generator. `#` starts a comment.
pub fn parse_subgroup(text: &str) -> Result<StallingsAutomaton, Error> {
    let mut alphabet: Option<Alphabet> = None;
    let mut gens: Vec<Word> = Vec::new();
    for raw in text.lines() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix("basis:") {
            if alphabet.is_some() {
                return Err(Error::Parse("duplicate basis line".into()));
            }
            alphabet = Some(Alphabet::new(rest.split_whitespace())?);
        } else if let Some(rest) = line.strip_prefix("gen:") {
            let a = alphabet
                .as_ref()
                .ok_or_else(|| Error::Parse("gen line before basis line".into()))?;
            gens.push(Word::parse(a, rest)?);
        } else {
            return Err(Error::Parse(format!("unrecognized subgroup line: {line}")));
        }
    }
    let alphabet = alphabet.ok_or_else(|| Error::Parse("missing basis line".into()))?;
    Ok(StallingsAutomaton::from_generators(&alphabet, &gens))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StrictlyReducible {
    Certified,
    /// Failing condition (1, 2 or 3) and the 1-based relator index.
    Refuted { condition: u8, index: usize },
    /// The oracle could not decide nontriviality at this relator.
    Unknown { index: usize },
}

/// Certify the ordered family (r₁, …, rₙ) over X₀ ∪ {x₁ < … < xₙ}:
/// (1) rᵢ uses only X_{i-1} ∪ {xᵢ}; (2) rᵢ alternates xᵢ-powers with
/// words nontrivial in the previous quotient; (3) rᵢ is not a proper
/// power. Relators are cyclically reduced before testing.
pub fn verify_strictly_reducible(
    alphabet: &Alphabet,
    x0: &[usize],
    xs: &[usize],
    rs: &[Word],
    budget: u64,
) -> Result<StrictlyReducible, Error> {
    if xs.len() != rs.len() {
        return Err(Error::Input("one relator per ordered generator required".into()));
    }
    let mut staged: Vec<usize> = x0.to_vec();
    staged.sort_unstable();
    for (i, &x) in xs.iter().enumerate() {
        if staged.contains(&x) {
            return Err(Error::Input("ordered generators must be fresh".into()));
        }
        let index = i + 1;
        let r = &rs[i];
        // Condition (1): support inside X_{i-1} ∪ {x_i}.
        if r.support().iter().any(|&g| g != x && !staged.contains(&g)) {
            return Ok(StrictlyReducible::Refuted { condition: 1, index });
        }
        let (cyc, _) = cyclic_reduce(r);
        if cyc.is_empty() {
            return Ok(StrictlyReducible::Refuted { condition: 2, index });
        }
        // Condition (2): alternation of x_i-powers with stable words …
        let syllables = match syllable_decomposition(&cyc, x) {
            Ok(s) => s,
            Err(_) => return Ok(StrictlyReducible::Refuted { condition: 2, index }),
        };
        // … each stable word nontrivial in G_i = ⟨X_{i-1} | r_1…r_{i-1}⟩.
        for syl in &syllables {
            let b = &syl.stable_part;
            if b.is_empty() {
                return Ok(StrictlyReducible::Refuted { condition: 2, index });
            }
            if i == 0 {
                continue; // no relators yet: free, nonempty ⇒ nontrivial
            }
            match normal_closure_membership(alphabet, &rs[..i], b, budget)? {
                NcVerdict::No(_) => {}
                NcVerdict::Yes(_) => {
                    return Ok(StrictlyReducible::Refuted { condition: 2, index })
                }
                NcVerdict::Unknown => return Ok(StrictlyReducible::Unknown { index }),
            }
        }
        // Condition (3): not a proper power.
        if !cyc.is_primitive()? {
            return Ok(StrictlyReducible::Refuted { condition: 3, index });
        }
        staged.push(x);
        staged.sort_unstable();
    }
    Ok(StrictlyReducible::Certified)
}
