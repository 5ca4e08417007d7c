//! Combinatorial two-complexes: a Serre graph together with immersed
//! attaching cycles, the reduction/collapse calculus, staggering search,
//! smallness certification and Magnus bases.

use crate::error::Error;
use crate::graphs::{parse_graph, NamedGraph, SerreGraph};
use crate::presentations::Presentation;
use crate::words::cyclic_reduce;
use std::collections::HashSet;

/// A two-complex `(Γ, λ)`: one attaching cycle per two-cell, recorded as
/// a closed immersed dart path in the graph.
#[derive(Debug, Clone)]
pub struct TwoComplex {
    pub graph: SerreGraph,
    pub cells: Vec<Vec<usize>>,
}

impl TwoComplex {
    pub fn new(graph: SerreGraph, cells: Vec<Vec<usize>>) -> Result<Self, Error> {
        for (i, path) in cells.iter().enumerate() {
            if path.is_empty() {
                return Err(Error::Degenerate(format!("cell {} has an empty attaching path", i)));
            }
            let n = path.len();
            for k in 0..n {
                let d = path[k];
                let e = path[(k + 1) % n];
                if d >= graph.num_darts() || e >= graph.num_darts() {
                    return Err(Error::Input(format!("cell {} references a missing dart", i)));
                }
                if graph.dst(d) != graph.src(e) {
                    return Err(Error::Input(format!("cell {} attaching path is not closed", i)));
                }
                if e == graph.inverse(d) && !(n == 1) {
                    return Err(Error::Input(format!(
                        "cell {} attaching path backtracks and is not an immersion",
                        i
                    )));
                }
            }
            // A length-1 path e with e = inverse(e) cannot occur (the
            // involution is fixed-point-free), so length 1 is always fine.
        }
        Ok(TwoComplex { graph, cells })
    }

    pub fn num_cells(&self) -> usize {
        self.cells.len()
    }

    /// V - E + F.
    pub fn euler_char(&self) -> i64 {
        self.graph.euler_char() + self.cells.len() as i64
    }

    /// All (cell, position) traversals of an edge orbit.
    pub fn traversals(&self, orbit: usize) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (c, path) in self.cells.iter().enumerate() {
            for (pos, &d) in path.iter().enumerate() {
                if self.graph.orbit(d) == orbit {
                    out.push((c, pos));
                }
            }
        }
        out
    }
}

/// Classification of one edge with respect to the attaching cycles.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeClass {
    /// Traversed at least twice, always by the same cell.
    Reducing,
    /// Traversed exactly once in total.
    Collapsing,
    /// Not traversed at all.
    Free,
    /// Traversed by at least two distinct cells.
    Neither,
}

impl EdgeClass {
    pub fn allows_reduction(self) -> bool {
        matches!(self, EdgeClass::Reducing | EdgeClass::Collapsing)
    }
}

/// Classify an edge orbit against a subset of the cells (`None` = all).
pub fn classify_edge_in(x: &TwoComplex, orbit: usize, cells: Option<&[usize]>) -> EdgeClass {
    let mut count = 0usize;
    let mut owner: Option<usize> = None;
    let mut multi = false;
    for (c, path) in x.cells.iter().enumerate() {
        if let Some(sel) = cells {
            if !sel.contains(&c) {
                continue;
            }
        }
        for &d in path {
            if x.graph.orbit(d) == orbit {
                count += 1;
                match owner {
                    None => owner = Some(c),
                    Some(o) if o != c => multi = true,
                    _ => {}
                }
            }
        }
    }
    if count == 0 {
        EdgeClass::Free
    } else if count == 1 {
        EdgeClass::Collapsing
    } else if multi {
        EdgeClass::Neither
    } else {
        EdgeClass::Reducing
    }
}

pub fn classify_edge(x: &TwoComplex, orbit: usize) -> EdgeClass {
    classify_edge_in(x, orbit, None)
}

/// Reduction along `orbit`: remove the edge and the unique cell that
/// traverses it. Preserves the Euler characteristic.
pub fn reduce(x: &TwoComplex, orbit: usize) -> Result<TwoComplex, Error> {
    let class = classify_edge(x, orbit);
    if !class.allows_reduction() {
        return Err(Error::Precondition(format!(
            "edge {} is not reducing (class {:?})",
            orbit, class
        )));
    }
    let traversals = x.traversals(orbit);
    let owner = traversals[0].0;
    debug_assert!(traversals.iter().all(|&(c, _)| c == owner), "reducing edge has one owner");
    let mut graph = SerreGraph::new(x.graph.num_vertices());
    let mut dart_map = vec![usize::MAX; x.graph.num_darts()];
    for e in 0..x.graph.num_edges() {
        if e == orbit {
            continue;
        }
        let d = 2 * e;
        let nd = graph.add_edge(x.graph.src(d), x.graph.dst(d), x.graph.label(d));
        dart_map[d] = nd;
        dart_map[d ^ 1] = nd ^ 1;
    }
    let cells: Vec<Vec<usize>> = x
        .cells
        .iter()
        .enumerate()
        .filter(|&(c, _)| c != owner)
        .map(|(_, path)| path.iter().map(|&d| dart_map[d]).collect())
        .collect();
    let out = TwoComplex::new(graph, cells)?;
    assert_eq!(out.euler_char(), x.euler_char(), "reduction must preserve Euler characteristic");
    Ok(out)
}

/// Outcome of a quantified predicate over subcomplexes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SubcomplexVerdict {
    True,
    /// Witnessing cell subset (its induced subcomplex fails the predicate).
    False(Vec<usize>),
    BudgetExceeded,
}

pub const DEFAULT_SUBSET_CAP: u64 = 1 << 20;

fn for_each_cell_subset(
    num_cells: usize,
    min_cells: u32,
    cap: u64,
    mut pred: impl FnMut(&[usize]) -> bool,
) -> SubcomplexVerdict {
    // Untraversed extra edges never change edge classes, so ranging over
    // cell subsets with their induced edge sets is exhaustive.
    if num_cells >= 63 {
        return SubcomplexVerdict::BudgetExceeded;
    }
    let total: u64 = 1u64 << num_cells;
    let mut explored = 0u64;
    for mask in 1..total {
        if mask.count_ones() < min_cells {
            continue;
        }
        explored += 1;
        if explored > cap {
            return SubcomplexVerdict::BudgetExceeded;
        }
        let subset: Vec<usize> = (0..num_cells).filter(|&c| mask & (1 << c) != 0).collect();
        if !pred(&subset) {
            return SubcomplexVerdict::False(subset);
        }
    }
    SubcomplexVerdict::True
}

/// Every subcomplex with at least one two-cell has a reducing edge.
pub fn is_reducible(x: &TwoComplex, cap: u64) -> SubcomplexVerdict {
    for_each_cell_subset(x.num_cells(), 1, cap, |subset| {
        (0..x.graph.num_edges())
            .any(|e| classify_edge_in(x, e, Some(subset)).allows_reduction())
    })
}

/// Every subcomplex with at least one two-cell has a collapsing edge.
pub fn is_collapsible(x: &TwoComplex, cap: u64) -> SubcomplexVerdict {
    for_each_cell_subset(x.num_cells(), 1, cap, |subset| {
        (0..x.graph.num_edges())
            .any(|e| classify_edge_in(x, e, Some(subset)) == EdgeClass::Collapsing)
    })
}

/// Every subcomplex with at least two two-cells has reducing edges for at
/// least two distinct cells.
pub fn is_bireducible(x: &TwoComplex, cap: u64) -> SubcomplexVerdict {
    for_each_cell_subset(x.num_cells(), 2, cap, |subset| {
        let mut owners: HashSet<usize> = HashSet::new();
        for e in 0..x.graph.num_edges() {
            if classify_edge_in(x, e, Some(subset)).allows_reduction() {
                // The owner is the unique traversing cell within the subset.
                let owner = x
                    .traversals(e)
                    .into_iter()
                    .map(|(c, _)| c)
                    .find(|c| subset.contains(c))
                    .expect("reducing edge is traversed within the subset");
                owners.insert(owner);
            }
        }
        owners.len() >= 2
    })
}

/// A staggering: total order on the cells plus an ordered edge subset such
/// that every cell traverses an ordered edge and min/max edges strictly
/// increase along the cell order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Staggering {
    /// Cells in increasing order.
    pub cell_order: Vec<usize>,
    /// Ordered edge orbits, increasing.
    pub edge_order: Vec<usize>,
}

/// Check the two staggering conditions for the given data.
pub fn verify_staggering(x: &TwoComplex, s: &Staggering) -> bool {
    if s.cell_order.len() != x.num_cells() {
        return false;
    }
    let mut sorted = s.cell_order.clone();
    sorted.sort_unstable();
    if sorted != (0..x.num_cells()).collect::<Vec<_>>() {
        return false;
    }
    let rank_of = |orbit: usize| s.edge_order.iter().position(|&e| e == orbit);
    let mut prev: Option<(usize, usize)> = None;
    for &c in &s.cell_order {
        let ranks: Vec<usize> =
            x.cells[c].iter().filter_map(|&d| rank_of(x.graph.orbit(d))).collect();
        if ranks.is_empty() {
            return false; // condition (1): traverses an ordered edge
        }
        let lo = *ranks.iter().min().unwrap();
        let hi = *ranks.iter().max().unwrap();
        if let Some((plo, phi)) = prev {
            if lo <= plo || hi <= phi {
                return false; // condition (2): min and max strictly increase
            }
        }
        prev = Some((lo, hi));
    }
    true
}

/// Exhaustive backtracking search for a staggering. `None` means no
/// staggering exists.
pub fn find_staggering(x: &TwoComplex) -> Option<Staggering> {
    if x.num_cells() == 0 {
        return Some(Staggering { cell_order: Vec::new(), edge_order: Vec::new() });
    }
    let num_edges = x.graph.num_edges();
    // Backtrack over ordered sequences of distinct edge orbits; the cell
    // order is then forced by sorting min-ranks.
    fn try_order(x: &TwoComplex, chosen: &mut Vec<usize>, num_edges: usize) -> Option<Staggering> {
        if !chosen.is_empty() {
            if let Some(s) = cell_order_for(x, chosen) {
                return Some(s);
            }
        }
        if chosen.len() == num_edges {
            return None;
        }
        for e in 0..num_edges {
            if chosen.contains(&e) {
                continue;
            }
            chosen.push(e);
            if let Some(s) = try_order(x, chosen, num_edges) {
                return Some(s);
            }
            chosen.pop();
        }
        None
    }
    fn cell_order_for(x: &TwoComplex, edge_order: &[usize]) -> Option<Staggering> {
        let rank_of = |orbit: usize| edge_order.iter().position(|&e| e == orbit);
        let mut keyed: Vec<(usize, usize, usize)> = Vec::new(); // (min, max, cell)
        for c in 0..x.num_cells() {
            let ranks: Vec<usize> =
                x.cells[c].iter().filter_map(|&d| rank_of(x.graph.orbit(d))).collect();
            let lo = *ranks.iter().min()?;
            let hi = *ranks.iter().max()?;
            keyed.push((lo, hi, c));
        }
        keyed.sort_unstable();
        // Min-ranks must be injective and max-ranks strictly increasing.
        for w in keyed.windows(2) {
            if w[0].0 == w[1].0 || w[0].1 >= w[1].1 {
                return None;
            }
        }
        let s = Staggering {
            cell_order: keyed.into_iter().map(|(_, _, c)| c).collect(),
            edge_order: edge_order.to_vec(),
        };
        debug_assert!(verify_staggering(x, &s));
        Some(s)
    }
    let mut chosen = Vec::new();
    let found = try_order(x, &mut chosen, num_edges);
    if let Some(ref s) = found {
        assert!(verify_staggering(x, s), "staggering certificate must re-validate");
    }
    found
}

/// Three-valued proper-power detection.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProperPowers {
    No,
    Yes(usize),
    Unknown,
}

fn cycle_is_primitive(path: &[usize]) -> bool {
    let n = path.len();
    (1..n).all(|p| n % p != 0 || (0..n).any(|i| path[i] != path[(i + p) % n]))
}

/// When `X` is bireducible, primitivity of every attaching cycle decides
/// proper powers exactly; otherwise only imprimitivity is conclusive.
pub fn has_proper_powers(x: &TwoComplex, cap: u64) -> ProperPowers {
    for (c, path) in x.cells.iter().enumerate() {
        if !cycle_is_primitive(path) {
            return ProperPowers::Yes(c);
        }
    }
    match is_bireducible(x, cap) {
        SubcomplexVerdict::True => ProperPowers::No,
        _ => ProperPowers::Unknown,
    }
}

/// A subgraph given by edge orbits (vertices are the incident ones).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subgraph {
    pub edges: Vec<usize>,
}

impl Subgraph {
    pub fn vertices(&self, g: &SerreGraph) -> Vec<usize> {
        let mut vs: Vec<usize> = self
            .edges
            .iter()
            .flat_map(|&e| [g.src(2 * e), g.dst(2 * e)])
            .collect();
        vs.sort_unstable();
        vs.dedup();
        vs
    }

    pub fn is_connected(&self, g: &SerreGraph) -> bool {
        let vs = self.vertices(g);
        if vs.len() <= 1 {
            return true;
        }
        let mut reached: HashSet<usize> = HashSet::new();
        let mut stack = vec![vs[0]];
        reached.insert(vs[0]);
        while let Some(v) = stack.pop() {
            for &e in &self.edges {
                for d in [2 * e, 2 * e + 1] {
                    if g.src(d) == v && !reached.contains(&g.dst(d)) {
                        reached.insert(g.dst(d));
                        stack.push(g.dst(d));
                    }
                }
            }
        }
        vs.iter().all(|v| reached.contains(v))
    }
}

/// Every subcomplex containing `lambda` is a graph or admits a reduction
/// containing `lambda`.
pub fn is_small(x: &TwoComplex, lambda: &Subgraph, cap: u64) -> Result<SubcomplexVerdict, Error> {
    if !lambda.is_connected(&x.graph) {
        return Err(Error::Input("smallness requires a connected subgraph".into()));
    }
    Ok(for_each_cell_subset(x.num_cells(), 1, cap, |subset| {
        (0..x.graph.num_edges()).any(|e| {
            !lambda.edges.contains(&e) && classify_edge_in(x, e, Some(subset)).allows_reduction()
        })
    }))
}

/// Free basis of `π₁(Λ)` with respect to a spanning tree: one loop per
/// non-tree edge, returned as based dart paths in the ambient graph.
#[derive(Debug, Clone)]
pub struct MagnusBasis {
    pub basepoint: usize,
    pub loops: Vec<Vec<usize>>,
}

pub fn magnus_subgroup(x: &TwoComplex, lambda: &Subgraph, cap: u64) -> Result<MagnusBasis, Error> {
    match is_small(x, lambda, cap)? {
        SubcomplexVerdict::True => {}
        v => {
            return Err(Error::Precondition(format!(
                "subgraph is not certified small: {:?}",
                v
            )))
        }
    }
    let g = &x.graph;
    let vs = lambda.vertices(g);
    if vs.is_empty() {
        return Err(Error::Input("empty subgraph".into()));
    }
    let base = vs[0];
    // Spanning tree by BFS over lambda's edges.
    let mut parent_dart: Vec<Option<usize>> = vec![None; g.num_vertices()];
    let mut seen: HashSet<usize> = HashSet::new();
    let mut queue = std::collections::VecDeque::new();
    seen.insert(base);
    queue.push_back(base);
    let mut tree_edges: HashSet<usize> = HashSet::new();
    while let Some(v) = queue.pop_front() {
        for &e in &lambda.edges {
            for d in [2 * e, 2 * e + 1] {
                if g.src(d) == v && !seen.contains(&g.dst(d)) {
                    seen.insert(g.dst(d));
                    parent_dart[g.dst(d)] = Some(d);
                    tree_edges.insert(e);
                    queue.push_back(g.dst(d));
                }
            }
        }
    }
    let path_to = |mut v: usize| -> Vec<usize> {
        let mut rev = Vec::new();
        while let Some(d) = parent_dart[v] {
            rev.push(d);
            v = g.src(d);
        }
        rev.reverse();
        rev
    };
    let mut loops = Vec::new();
    for &e in &lambda.edges {
        if tree_edges.contains(&e) {
            continue;
        }
        let d = 2 * e;
        let mut path = path_to(g.src(d));
        path.push(d);
        let back: Vec<usize> = path_to(g.dst(d)).into_iter().rev().map(|t| t ^ 1).collect();
        path.extend(back);
        loops.push(path);
    }
    Ok(MagnusBasis { basepoint: base, loops })
}

/// Presentation complex: one vertex, a labeled loop per generator, one
/// cell per relator (cyclically reduced).
pub fn presentation_complex(p: &Presentation) -> Result<TwoComplex, Error> {
    let graph = SerreGraph::rose(&p.alphabet);
    let mut cells = Vec::new();
    for r in &p.relators {
        let (c, _) = cyclic_reduce(r);
        if c.is_empty() {
            return Err(Error::Degenerate("relator is trivial after cyclic reduction".into()));
        }
        cells.push(
            c.letters()
                .iter()
                .map(|l| 2 * l.gen + usize::from(l.inv))
                .collect(),
        );
    }
    TwoComplex::new(graph, cells)
}

/// A complex text file: a graph section plus `cell <name>: <path>` lines.
#[derive(Debug, Clone)]
pub struct NamedComplex {
    pub complex: TwoComplex,
    pub named_graph: NamedGraph,
    pub cell_names: Vec<String>,
}

pub fn parse_complex(text: &str) -> Result<NamedComplex, Error> {
    let mut graph_lines = String::new();
    let mut cell_lines: Vec<(String, String)> = Vec::new();
    for raw in text.lines() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix("cell ") {
            let (name, path) = rest
                .split_once(':')
                .ok_or_else(|| Error::Parse(format!("cell line needs a colon: {:?}", line)))?;
            cell_lines.push((name.trim().to_string(), path.trim().to_string()));
        } else {
            graph_lines.push_str(line);
            graph_lines.push('\n');
        }
    }
    let named_graph = parse_graph(&graph_lines)?;
    let mut cells = Vec::new();
    let mut cell_names = Vec::new();
    for (name, path) in cell_lines {
        let mut darts = Vec::new();
        for tok in path.split_whitespace() {
            let (base, inv) = match tok.strip_suffix("^-1") {
                Some(b) => (b, true),
                None => (tok, false),
            };
            let e = named_graph
                .edge(base)
                .ok_or_else(|| Error::Parse(format!("unknown edge {:?} in cell {:?}", base, name)))?;
            darts.push(2 * e + usize::from(inv));
        }
        cells.push(darts);
        cell_names.push(name);
    }
    let complex = TwoComplex::new(named_graph.graph.clone(), cells)?;
    Ok(NamedComplex { complex, named_graph, cell_names })
}
