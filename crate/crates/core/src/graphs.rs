//! Serre graphs (directed darts with a fixed-point-free inverse
//! involution), combinatorial morphisms, immersion testing, Stallings
//! folding and fiber products.

use crate::error::Error;
use crate::words::{Alphabet, Letter};
use std::collections::HashMap;

/// A graph given by paired directed darts. Dart `2i` and `2i + 1` are
/// mutually inverse; an "edge" always means such an orbit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SerreGraph {
    num_vertices: usize,
    dart_src: Vec<usize>,
    dart_label: Vec<Option<Letter>>,
}

impl SerreGraph {
    pub fn new(num_vertices: usize) -> Self {
        SerreGraph { num_vertices, dart_src: Vec::new(), dart_label: Vec::new() }
    }

    /// Rose with one vertex and one labeled loop per generator.
    pub fn rose(alphabet: &Alphabet) -> Self {
        let mut g = SerreGraph::new(1);
        for gen in 0..alphabet.len() {
            g.add_edge(0, 0, Some(Letter::new(gen, false)));
        }
        g
    }

    pub fn add_vertex(&mut self) -> usize {
        self.num_vertices += 1;
        self.num_vertices - 1
    }

    /// Add an edge orbit; returns the positive dart (labels on the
    /// inverse dart are negated automatically).
    pub fn add_edge(&mut self, src: usize, dst: usize, label: Option<Letter>) -> usize {
        assert!(src < self.num_vertices && dst < self.num_vertices);
        let d = self.dart_src.len();
        self.dart_src.push(src);
        self.dart_src.push(dst);
        self.dart_label.push(label);
        self.dart_label.push(label.map(Letter::inverse));
        d
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn num_darts(&self) -> usize {
        self.dart_src.len()
    }

    /// Number of edge orbits.
    pub fn num_edges(&self) -> usize {
        self.dart_src.len() / 2
    }

    pub fn inverse(&self, dart: usize) -> usize {
        dart ^ 1
    }

    pub fn src(&self, dart: usize) -> usize {
        self.dart_src[dart]
    }

    pub fn dst(&self, dart: usize) -> usize {
        self.dart_src[dart ^ 1]
    }

    pub fn label(&self, dart: usize) -> Option<Letter> {
        self.dart_label[dart]
    }

    /// Edge orbit index of a dart.
    pub fn orbit(&self, dart: usize) -> usize {
        dart / 2
    }

    pub fn darts(&self) -> impl Iterator<Item = usize> {
        0..self.dart_src.len()
    }

    pub fn darts_at(&self, v: usize) -> Vec<usize> {
        self.darts().filter(|&d| self.dart_src[d] == v).collect()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.darts().filter(|&d| self.dart_src[d] == v).count()
    }

    /// V - E with edges counted as involution orbits.
    pub fn euler_char(&self) -> i64 {
        self.num_vertices as i64 - self.num_edges() as i64
    }

    /// Component id per vertex plus component count.
    pub fn components(&self) -> (Vec<usize>, usize) {
        let mut comp = vec![usize::MAX; self.num_vertices];
        let mut count = 0;
        for start in 0..self.num_vertices {
            if comp[start] != usize::MAX {
                continue;
            }
            let mut stack = vec![start];
            comp[start] = count;
            while let Some(v) = stack.pop() {
                for d in self.darts_at(v) {
                    let w = self.dst(d);
                    if comp[w] == usize::MAX {
                        comp[w] = count;
                        stack.push(w);
                    }
                }
            }
            count += 1;
        }
        (comp, count)
    }

    /// First Betti number `E - V + 1` of every component, plus the total.
    pub fn betti1(&self) -> (Vec<i64>, i64) {
        let (comp, count) = self.components();
        let mut v_of = vec![0i64; count];
        let mut e_of = vec![0i64; count];
        for v in 0..self.num_vertices {
            v_of[comp[v]] += 1;
        }
        for orbit in 0..self.num_edges() {
            e_of[comp[self.src(2 * orbit)]] += 1;
        }
        let per: Vec<i64> = (0..count).map(|c| e_of[c] - v_of[c] + 1).collect();
        let total = per.iter().sum();
        (per, total)
    }

    pub fn is_connected(&self) -> bool {
        self.num_vertices <= 1 || self.components().1 == 1
    }

    /// No two distinct darts at a vertex carry the same label.
    pub fn is_folded(&self) -> bool {
        let mut seen: HashMap<(usize, Letter), usize> = HashMap::new();
        for d in self.darts() {
            if let Some(l) = self.dart_label[d] {
                if seen.insert((self.dart_src[d], l), d).is_some() {
                    return false;
                }
            }
        }
        true
    }

    /// Unique outgoing dart at `v` with label `l`, if any (requires folded
    /// to be unique; returns the first otherwise).
    pub fn dart_with_label(&self, v: usize, l: Letter) -> Option<usize> {
        self.darts().find(|&d| self.dart_src[d] == v && self.dart_label[d] == Some(l))
    }

    /// Iteratively delete degree-1 vertices other than `basepoint`.
    /// Returns the core graph plus vertex and dart maps from `self`.
    pub fn core(&self, basepoint: usize) -> (SerreGraph, Vec<Option<usize>>, Vec<Option<usize>>, usize) {
        let mut alive_v = vec![true; self.num_vertices];
        let mut alive_d = vec![true; self.num_darts()];
        loop {
            let mut changed = false;
            for v in 0..self.num_vertices {
                if v == basepoint || !alive_v[v] {
                    continue;
                }
                let incident: Vec<usize> =
                    self.darts().filter(|&d| alive_d[d] && self.dart_src[d] == v).collect();
                if incident.len() == 1 {
                    let d = incident[0];
                    alive_d[d] = false;
                    alive_d[d ^ 1] = false;
                    alive_v[v] = false;
                    changed = true;
                } else if incident.is_empty() {
                    alive_v[v] = false;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        let mut vmap = vec![None; self.num_vertices];
        let mut next = 0;
        for v in 0..self.num_vertices {
            if alive_v[v] {
                vmap[v] = Some(next);
                next += 1;
            }
        }
        let mut out = SerreGraph::new(next);
        let mut dmap = vec![None; self.num_darts()];
        for orbit in 0..self.num_edges() {
            let d = 2 * orbit;
            if alive_d[d] {
                let nd = out.add_edge(
                    vmap[self.src(d)].unwrap(),
                    vmap[self.dst(d)].unwrap(),
                    self.dart_label[d],
                );
                dmap[d] = Some(nd);
                dmap[d ^ 1] = Some(nd ^ 1);
            }
        }
        let base = vmap[basepoint].expect("basepoint survives coring");
        (out, vmap, dmap, base)
    }
}

/// A combinatorial map of Serre graphs: commutes with source, target and
/// inverse, and preserves labels where both sides carry them.
#[derive(Debug, Clone)]
pub struct GraphMorphism {
    pub domain: SerreGraph,
    pub codomain: SerreGraph,
    pub vertex_map: Vec<usize>,
    pub dart_map: Vec<usize>,
}

impl GraphMorphism {
    pub fn new(
        domain: SerreGraph,
        codomain: SerreGraph,
        vertex_map: Vec<usize>,
        dart_map: Vec<usize>,
    ) -> Result<Self, Error> {
        let m = GraphMorphism { domain, codomain, vertex_map, dart_map };
        m.validate()?;
        Ok(m)
    }

    pub fn identity(g: &SerreGraph) -> Self {
        GraphMorphism {
            domain: g.clone(),
            codomain: g.clone(),
            vertex_map: (0..g.num_vertices()).collect(),
            dart_map: (0..g.num_darts()).collect(),
        }
    }

    /// Canonical map of a labeled graph to the rose on its alphabet.
    pub fn to_rose(g: &SerreGraph, alphabet: &Alphabet) -> Result<Self, Error> {
        let rose = SerreGraph::rose(alphabet);
        let mut dart_map = Vec::with_capacity(g.num_darts());
        for d in g.darts() {
            let l = g
                .label(d)
                .ok_or_else(|| Error::Precondition("unlabeled dart in labeled graph".into()))?;
            // Rose dart for generator gen: 2*gen is the positive loop dart.
            dart_map.push(2 * l.gen + usize::from(l.inv));
        }
        GraphMorphism::new(g.clone(), rose, vec![0; g.num_vertices()], dart_map)
    }

    pub fn validate(&self) -> Result<(), Error> {
        if self.vertex_map.len() != self.domain.num_vertices()
            || self.dart_map.len() != self.domain.num_darts()
        {
            return Err(Error::Precondition("morphism map sizes".into()));
        }
        for d in self.domain.darts() {
            let fd = self.dart_map[d];
            if fd >= self.codomain.num_darts() {
                return Err(Error::Precondition("dart image out of range".into()));
            }
            if self.dart_map[d ^ 1] != fd ^ 1 {
                return Err(Error::Precondition("morphism does not commute with inverse".into()));
            }
            if self.vertex_map[self.domain.src(d)] != self.codomain.src(fd) {
                return Err(Error::Precondition("morphism does not commute with source".into()));
            }
            if let (Some(a), Some(b)) = (self.domain.label(d), self.codomain.label(fd)) {
                if a != b {
                    return Err(Error::Precondition("morphism does not preserve labels".into()));
                }
            }
        }
        Ok(())
    }

    /// Locally injective: no vertex has two distinct darts with one image.
    pub fn is_immersion(&self) -> bool {
        let mut seen: HashMap<(usize, usize), usize> = HashMap::new();
        for d in self.domain.darts() {
            if seen.insert((self.domain.src(d), self.dart_map[d]), d).is_some() {
                return false;
            }
        }
        true
    }

    pub fn compose(&self, outer: &GraphMorphism) -> Result<GraphMorphism, Error> {
        GraphMorphism::new(
            self.domain.clone(),
            outer.codomain.clone(),
            self.vertex_map.iter().map(|&v| outer.vertex_map[v]).collect(),
            self.dart_map.iter().map(|&d| outer.dart_map[d]).collect(),
        )
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra.max(rb)] = ra.min(rb);
        true
    }
}

/// Stallings folding of a labeled graph. Returns the folded graph, the
/// quotient morphism and the image of `basepoint`.
pub fn fold(g: &SerreGraph, basepoint: usize) -> (SerreGraph, GraphMorphism, usize) {
    let mut vuf = UnionFind::new(g.num_vertices());
    let mut duf = UnionFind::new(g.num_darts());
    loop {
        // Find two live dart classes with equal source class and label.
        let mut key_to_dart: HashMap<(usize, Option<Letter>), usize> = HashMap::new();
        let mut merge: Option<(usize, usize)> = None;
        for d in g.darts() {
            if duf.find(d) != d {
                continue;
            }
            let key = (vuf.find(g.src(d)), g.label(d));
            if let Some(&e) = key_to_dart.get(&key) {
                merge = Some((d, e));
                break;
            }
            key_to_dart.insert(key, d);
        }
        let Some((d, e)) = merge else { break };
        duf.union(d, e);
        duf.union(d ^ 1, e ^ 1);
        vuf.union(g.dst(d), g.dst(e));
    }
    // Compress vertex classes.
    let mut vmap = vec![usize::MAX; g.num_vertices()];
    let mut next_v = 0;
    for v in 0..g.num_vertices() {
        if vuf.find(v) == v {
            vmap[v] = next_v;
            next_v += 1;
        }
    }
    for v in 0..g.num_vertices() {
        let r = vuf.find(v);
        vmap[v] = vmap[r];
    }
    // Compress dart classes into inverse pairs.
    let mut folded = SerreGraph::new(next_v);
    let mut dmap = vec![usize::MAX; g.num_darts()];
    for d in g.darts() {
        if duf.find(d) != d {
            continue;
        }
        let dinv = duf.find(d ^ 1);
        assert_ne!(d, dinv, "involution fixed point produced by folding");
        if dinv < d {
            continue; // orbit handled from the other side
        }
        let nd = folded.add_edge(vmap[g.src(d)], vmap[g.dst(d)], g.label(d));
        dmap[d] = nd;
        dmap[dinv] = nd ^ 1;
    }
    for d in g.darts() {
        let r = duf.find(d);
        dmap[d] = dmap[r];
    }
    let quotient = GraphMorphism {
        domain: g.clone(),
        codomain: folded.clone(),
        vertex_map: vmap.clone(),
        dart_map: dmap,
    };
    debug_assert!(quotient.validate().is_ok());
    debug_assert!(quotient.codomain.is_folded());
    let base = vmap[basepoint];
    (folded, quotient, base)
}

/// Fiber product of `f: A -> C` and `g: B -> C`. Returns the pullback
/// graph with both projections.
pub fn pullback(f: &GraphMorphism, g: &GraphMorphism) -> (SerreGraph, GraphMorphism, GraphMorphism) {
    assert_eq!(f.codomain, g.codomain, "pullback requires a common codomain");
    let a = &f.domain;
    let b = &g.domain;
    let mut vert_index: HashMap<(usize, usize), usize> = HashMap::new();
    let mut p = SerreGraph::new(0);
    let mut pa_v = Vec::new();
    let mut pb_v = Vec::new();
    for va in 0..a.num_vertices() {
        for vb in 0..b.num_vertices() {
            if f.vertex_map[va] == g.vertex_map[vb] {
                vert_index.insert((va, vb), p.add_vertex());
                pa_v.push(va);
                pb_v.push(vb);
            }
        }
    }
    let mut pa_d = Vec::new();
    let mut pb_d = Vec::new();
    for da in a.darts().step_by(1) {
        if da % 2 != 0 {
            continue; // one dart per orbit; the inverse pair comes for free
        }
        for db in b.darts() {
            if f.dart_map[da] != g.dart_map[db] {
                continue;
            }
            let src = vert_index[&(a.src(da), b.src(db))];
            let dst = vert_index[&(a.dst(da), b.dst(db))];
            let label = a.label(da).or_else(|| b.label(db));
            p.add_edge(src, dst, label);
            pa_d.push(da);
            pa_d.push(da ^ 1);
            pb_d.push(db);
            pb_d.push(db ^ 1);
        }
    }
    let proj_a = GraphMorphism {
        domain: p.clone(),
        codomain: a.clone(),
        vertex_map: pa_v,
        dart_map: pa_d,
    };
    let proj_b = GraphMorphism {
        domain: p.clone(),
        codomain: b.clone(),
        vertex_map: pb_v,
        dart_map: pb_d,
    };
    debug_assert!(proj_a.validate().is_ok());
    debug_assert!(proj_b.validate().is_ok());
    (p, proj_a, proj_b)
}

/// BFS code of a connected folded labeled graph from a fixed start vertex.
/// Folded means transitions are deterministic, so the code characterises
/// the based labeled isomorphism type.
fn bfs_code_from(g: &SerreGraph, start: usize) -> Vec<(usize, Letter, usize)> {
    let mut order: HashMap<usize, usize> = HashMap::new();
    let mut queue = std::collections::VecDeque::new();
    order.insert(start, 0);
    queue.push_back(start);
    let mut code = Vec::new();
    while let Some(v) = queue.pop_front() {
        let mut outs: Vec<(Letter, usize)> = g
            .darts_at(v)
            .into_iter()
            .map(|d| (g.label(d).expect("canonical code needs labels"), g.dst(d)))
            .collect();
        outs.sort();
        let vi = order[&v];
        for (l, w) in outs {
            let next = order.len();
            let wi = *order.entry(w).or_insert_with(|| {
                queue.push_back(w);
                next
            });
            code.push((vi, l, wi));
        }
    }
    code
}

/// Canonical code for a connected folded labeled graph: minimal BFS code
/// over all start vertices, or from the basepoint when one is fixed.
pub fn canonical_code(g: &SerreGraph, basepoint: Option<usize>) -> Vec<(usize, Letter, usize)> {
    assert!(g.is_folded(), "canonical code requires a folded graph");
    match basepoint {
        Some(b) => bfs_code_from(g, b),
        None => (0..g.num_vertices())
            .map(|v| bfs_code_from(g, v))
            .min()
            .unwrap_or_default(),
    }
}

/// Labeled isomorphism for folded graphs (basepoint-respecting when given).
pub fn labeled_isomorphic(
    a: &SerreGraph,
    base_a: Option<usize>,
    b: &SerreGraph,
    base_b: Option<usize>,
) -> bool {
    if a.num_vertices() != b.num_vertices() || a.num_edges() != b.num_edges() {
        return false;
    }
    if a.num_vertices() == 0 {
        return true;
    }
    match (base_a, base_b) {
        (Some(x), Some(y)) => {
            a.is_connected()
                && b.is_connected()
                && bfs_code_from(a, x) == bfs_code_from(b, y)
        }
        _ => {
            if a.is_connected() && b.is_connected() {
                return canonical_code(a, None) == canonical_code(b, None);
            }
            // Componentwise multiset comparison.
            let comps = |g: &SerreGraph| -> Vec<Vec<(usize, Letter, usize)>> {
                let (comp, count) = g.components();
                let mut codes = Vec::new();
                for c in 0..count {
                    let verts: Vec<usize> =
                        (0..g.num_vertices()).filter(|&v| comp[v] == c).collect();
                    codes.push(verts.iter().map(|&v| bfs_code_from(g, v)).min().unwrap());
                }
                codes.sort();
                codes
            };
            comps(a) == comps(b)
        }
    }
}

/// A graph with human-readable vertex/edge names, as read from the graph
/// text format.
#[derive(Debug, Clone)]
pub struct NamedGraph {
    pub graph: SerreGraph,
    pub vertex_names: Vec<String>,
    pub edge_names: Vec<String>,
    pub alphabet: Alphabet,
}

impl NamedGraph {
    pub fn vertex(&self, name: &str) -> Option<usize> {
        self.vertex_names.iter().position(|n| n == name)
    }

    pub fn edge(&self, name: &str) -> Option<usize> {
        self.edge_names.iter().position(|n| n == name)
    }
}

/// Parse `vertex <name>` and `edge <name> <src> <dst> [label]` lines.
/// Inverse darts are implicit. Generators are collected from labels in
/// order of first appearance; a leading `basis: ...` line may pin the
/// alphabet explicitly.
pub fn parse_graph(text: &str) -> Result<NamedGraph, Error> {
    let mut vertex_names: Vec<String> = Vec::new();
    let mut edges: Vec<(String, String, String, Option<String>)> = Vec::new();
    let mut basis: Vec<String> = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        match parts.next().unwrap() {
            "basis:" => basis.extend(parts.map(str::to_string)),
            "vertex" => {
                let name = parts
                    .next()
                    .ok_or_else(|| Error::Parse(format!("line {}: vertex needs a name", lineno + 1)))?;
                if vertex_names.iter().any(|n| n == name) {
                    return Err(Error::Parse(format!("line {}: duplicate vertex {:?}", lineno + 1, name)));
                }
                vertex_names.push(name.to_string());
            }
            "edge" => {
                let mut next = |what: &str| {
                    parts
                        .next()
                        .map(str::to_string)
                        .ok_or_else(|| Error::Parse(format!("line {}: edge needs {}", lineno + 1, what)))
                };
                let name = next("a name")?;
                let src = next("a source")?;
                let dst = next("a target")?;
                let label = parts.next().map(str::to_string);
                edges.push((name, src, dst, label));
            }
            other => {
                return Err(Error::Parse(format!("line {}: unknown directive {:?}", lineno + 1, other)));
            }
        }
    }
    let mut gen_names: Vec<String> = basis;
    for (_, _, _, label) in &edges {
        if let Some(l) = label {
            let name = l.strip_suffix("^-1").unwrap_or(l);
            if !gen_names.iter().any(|n| n == name) {
                gen_names.push(name.to_string());
            }
        }
    }
    let alphabet = Alphabet::new(gen_names)?;
    let mut graph = SerreGraph::new(vertex_names.len());
    let mut edge_names = Vec::new();
    for (name, src, dst, label) in edges {
        let src = vertex_names
            .iter()
            .position(|n| *n == src)
            .ok_or_else(|| Error::Parse(format!("unknown vertex {:?}", src)))?;
        let dst = vertex_names
            .iter()
            .position(|n| *n == dst)
            .ok_or_else(|| Error::Parse(format!("unknown vertex {:?}", dst)))?;
        let letter = match &label {
            None => None,
            Some(l) => {
                let (base, inv) = match l.strip_suffix("^-1") {
                    Some(b) => (b, true),
                    None => (l.as_str(), false),
                };
                let gen = alphabet
                    .id(base)
                    .ok_or_else(|| Error::Parse(format!("unknown label {:?}", l)))?;
                Some(Letter::new(gen, inv))
            }
        };
        if edge_names.iter().any(|n: &String| *n == name) {
            return Err(Error::Parse(format!("duplicate edge {:?}", name)));
        }
        graph.add_edge(src, dst, letter);
        edge_names.push(name);
    }
    Ok(NamedGraph { graph, vertex_names, edge_names, alphabet })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ab() -> Alphabet {
        Alphabet::new(["a", "b"]).unwrap()
    }

    #[test]
    fn euler_and_betti() {
        let g = SerreGraph::new(1);
        assert_eq!(g.euler_char(), 1);
        assert_eq!(g.betti1().1, 0);

        let rose2 = SerreGraph::rose(&ab());
        assert_eq!(rose2.euler_char(), -1);
        assert_eq!(rose2.betti1().1, 2);

        let mut cycle4 = SerreGraph::new(4);
        for i in 0..4 {
            cycle4.add_edge(i, (i + 1) % 4, None);
        }
        assert_eq!(cycle4.euler_char(), 0);
        assert_eq!(cycle4.betti1().1, 1);
    }

    #[test]
    fn immersion_examples() {
        let rose2 = SerreGraph::rose(&ab());
        assert!(GraphMorphism::identity(&rose2).is_immersion());

        // Two parallel a-loops collapsing onto one loop: not an immersion.
        let mut twoloops = SerreGraph::new(1);
        twoloops.add_edge(0, 0, Some(Letter::new(0, false)));
        twoloops.add_edge(0, 0, Some(Letter::new(0, false)));
        let rose1 = SerreGraph::rose(&Alphabet::new(["a"]).unwrap());
        let m = GraphMorphism::new(twoloops, rose1.clone(), vec![0], vec![0, 1, 0, 1]).unwrap();
        assert!(!m.is_immersion());

        // 4-cycle double-covering a 2-cycle.
        let mut c4 = SerreGraph::new(4);
        for i in 0..4 {
            c4.add_edge(i, (i + 1) % 4, None);
        }
        let mut c2 = SerreGraph::new(2);
        c2.add_edge(0, 1, None);
        c2.add_edge(1, 0, None);
        let m = GraphMorphism::new(
            c4,
            c2,
            vec![0, 1, 0, 1],
            vec![0, 1, 2, 3, 0, 1, 2, 3],
        )
        .unwrap();
        assert!(m.is_immersion());
    }

    #[test]
    fn fold_wedge_of_equal_loops() {
        let mut g = SerreGraph::new(1);
        g.add_edge(0, 0, Some(Letter::new(0, false)));
        g.add_edge(0, 0, Some(Letter::new(0, false)));
        let (folded, q, base) = fold(&g, 0);
        assert_eq!(folded.num_vertices(), 1);
        assert_eq!(folded.num_edges(), 1);
        assert_eq!(base, 0);
        assert!(q.validate().is_ok());
        assert!(folded.is_folded());
    }

    #[test]
    fn fold_already_folded_is_identity_shape() {
        let rose2 = SerreGraph::rose(&ab());
        let (folded, _, _) = fold(&rose2, 0);
        assert!(labeled_isomorphic(&folded, Some(0), &rose2, Some(0)));
    }

    #[test]
    fn fold_shared_prefix() {
        // Open paths spelling a b a^-1 and a b from one base vertex. The
        // shared ab prefix folds together, leaving base, the merged a- and
        // ab-endpoints, and the tail vertex of the trailing a^-1.
        let alphabet = ab();
        let mut g = SerreGraph::new(1);
        let base = 0;
        let attach = |g: &mut SerreGraph, word: &[Letter]| {
            let mut v = base;
            for &l in word {
                let w = g.add_vertex();
                let (s, t, lab) = if l.inv { (w, v, l.inverse()) } else { (v, w, l) };
                g.add_edge(s, t, Some(lab));
                v = w;
            }
        };
        let a = Letter::new(alphabet.id("a").unwrap(), false);
        let b = Letter::new(alphabet.id("b").unwrap(), false);
        attach(&mut g, &[a, b, a.inverse()]);
        attach(&mut g, &[a, b]);
        let (folded, q, _) = fold(&g, 0);
        assert!(folded.is_folded());
        assert_eq!(folded.num_vertices(), 4);
        assert_eq!(folded.num_edges(), 3);
        assert!(q.validate().is_ok());

        // The same words attached as loops generate the whole free group:
        // everything folds down to the rose.
        let mut g2 = SerreGraph::new(1);
        let attach_loop = |g: &mut SerreGraph, word: &[Letter]| {
            let mut v = base;
            for (i, &l) in word.iter().enumerate() {
                let w = if i + 1 == word.len() { base } else { g.add_vertex() };
                let (s, t, lab) = if l.inv { (w, v, l.inverse()) } else { (v, w, l) };
                g.add_edge(s, t, Some(lab));
                v = w;
            }
        };
        attach_loop(&mut g2, &[a, b, a.inverse()]);
        attach_loop(&mut g2, &[a, b]);
        let (folded2, _, _) = fold(&g2, 0);
        assert!(labeled_isomorphic(&folded2, Some(0), &SerreGraph::rose(&alphabet), Some(0)));
    }

    #[test]
    fn pullback_of_identity_is_diagonal() {
        let rose2 = SerreGraph::rose(&ab());
        let id = GraphMorphism::identity(&rose2);
        let (p, pa, pb) = pullback(&id, &id);
        assert_eq!(p.num_vertices(), 1);
        assert_eq!(p.num_edges(), 2);
        assert!(pa.validate().is_ok() && pb.validate().is_ok());
    }

    #[test]
    fn pullback_disjoint_labels() {
        let alphabet = ab();
        let mut la = SerreGraph::new(1);
        la.add_edge(0, 0, Some(Letter::new(0, false)));
        let mut lb = SerreGraph::new(1);
        lb.add_edge(0, 0, Some(Letter::new(1, false)));
        let f = GraphMorphism::to_rose(&la, &alphabet).unwrap();
        let g = GraphMorphism::to_rose(&lb, &alphabet).unwrap();
        let (p, _, _) = pullback(&f, &g);
        assert_eq!(p.num_vertices(), 1);
        assert_eq!(p.num_edges(), 0);
    }

    #[test]
    fn pullback_double_cover_with_itself() {
        // 2-cycle double cover of rose{a} pulled back with itself:
        // two disjoint 2-cycles.
        let alphabet = Alphabet::new(["a"]).unwrap();
        let mut c2 = SerreGraph::new(2);
        c2.add_edge(0, 1, Some(Letter::new(0, false)));
        c2.add_edge(1, 0, Some(Letter::new(0, false)));
        let f = GraphMorphism::to_rose(&c2, &alphabet).unwrap();
        let (p, _, _) = pullback(&f, &f);
        assert_eq!(p.num_vertices(), 4);
        assert_eq!(p.num_edges(), 4);
        assert_eq!(p.components().1, 2);
        let (per, _) = p.betti1();
        assert_eq!(per, vec![1, 1]);
    }

    #[test]
    fn pullback_projections_are_immersions() {
        let alphabet = ab();
        let mut g1 = SerreGraph::new(2);
        g1.add_edge(0, 1, Some(Letter::new(0, false)));
        g1.add_edge(1, 0, Some(Letter::new(0, false)));
        g1.add_edge(0, 0, Some(Letter::new(1, false)));
        let f = GraphMorphism::to_rose(&g1, &alphabet).unwrap();
        assert!(f.is_immersion());
        let (_, pa, pb) = pullback(&f, &f);
        assert!(pa.is_immersion());
        assert!(pb.is_immersion());
    }

    #[test]
    fn core_examples() {
        // Path of length 3, basepoint at one end -> just the basepoint.
        let mut path = SerreGraph::new(4);
        for i in 0..3 {
            path.add_edge(i, i + 1, None);
        }
        let (core, _, _, base) = path.core(0);
        assert_eq!(core.num_vertices(), 1);
        assert_eq!(core.num_edges(), 0);
        assert_eq!(base, 0);

        // Cycle with a tail, basepoint on the cycle -> the cycle.
        let mut g = SerreGraph::new(4);
        g.add_edge(0, 1, None);
        g.add_edge(1, 2, None);
        g.add_edge(2, 0, None);
        g.add_edge(0, 3, None);
        let (core, _, _, _) = g.core(0);
        assert_eq!(core.num_vertices(), 3);
        assert_eq!(core.num_edges(), 3);

        // Theta graph: no degree-1 vertices.
        let mut theta = SerreGraph::new(2);
        theta.add_edge(0, 1, None);
        theta.add_edge(0, 1, None);
        theta.add_edge(0, 1, None);
        let (core, _, _, _) = theta.core(0);
        assert_eq!(core.num_vertices(), 2);
        assert_eq!(core.num_edges(), 3);
    }

    #[test]
    fn parse_graph_format() {
        let text = "vertex p\nvertex q\nedge e1 p q a\nedge e2 q p b^-1\nedge e3 p p\n";
        let named = parse_graph(text).unwrap();
        assert_eq!(named.graph.num_vertices(), 2);
        assert_eq!(named.graph.num_edges(), 3);
        assert_eq!(named.alphabet.names(), &["a".to_string(), "b".to_string()]);
        assert_eq!(named.graph.label(2), Some(Letter::new(1, true)));
        assert_eq!(named.graph.label(4), None);
    }

    #[test]
    fn composite_of_immersions_is_immersion() {
        // Enumerated tiny case: double cover composed with inclusion.
        let alphabet = Alphabet::new(["a"]).unwrap();
        let mut c2 = SerreGraph::new(2);
        c2.add_edge(0, 1, Some(Letter::new(0, false)));
        c2.add_edge(1, 0, Some(Letter::new(0, false)));
        let f = GraphMorphism::to_rose(&c2, &alphabet).unwrap();
        let (p, pa, _) = pullback(&f, &f);
        assert!(p.num_vertices() > 0);
        let comp = pa.compose(&f).unwrap();
        assert!(comp.is_immersion());
    }
}
