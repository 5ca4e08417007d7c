//! Bounded enumeration of immersions over a two-complex's graph,
//! pullback cycles, non-positive-immersion scans, and the bireducible
//! pullback inequality checker.

use crate::complexes::{is_bireducible, is_collapsible, has_proper_powers, ProperPowers, SubcomplexVerdict, TwoComplex};
use crate::error::Error;
use crate::graphs::{canonical_code, SerreGraph};
use crate::homology;
use crate::words::{cyclic_reduce, free_reduce, Letter, Word};
use std::collections::BTreeSet;

/// An immersion Θ ↬ Γ, encoded as a folded graph whose dart labels name
/// Γ-darts: label (gen = Γ-orbit, inv = direction).
#[derive(Debug, Clone)]
pub struct Immersion {
    pub theta: SerreGraph,
    /// Θ-vertex → Γ-vertex.
    pub vertex_map: Vec<usize>,
}

impl Immersion {
    /// Γ-dart image of a Θ-dart.
    pub fn image_dart(&self, d: usize) -> usize {
        let l = self.theta.label(d).expect("immersion darts carry Γ-dart labels");
        2 * l.gen + usize::from(l.inv)
    }

    pub fn identity(gamma: &SerreGraph) -> Immersion {
        let mut theta = SerreGraph::new(gamma.num_vertices());
        for e in 0..gamma.num_edges() {
            let d = 2 * e;
            theta.add_edge(gamma.src(d), gamma.dst(d), Some(Letter::new(e, false)));
        }
        Immersion { theta, vertex_map: (0..gamma.num_vertices()).collect() }
    }
}

fn partial_injections(from: usize, to: usize) -> Vec<Vec<Option<usize>>> {
    let mut out = Vec::new();
    let mut current: Vec<Option<usize>> = Vec::with_capacity(from);
    fn recurse(
        pos: usize,
        from: usize,
        to: usize,
        used: &mut Vec<bool>,
        current: &mut Vec<Option<usize>>,
        out: &mut Vec<Vec<Option<usize>>>,
    ) {
        if pos == from {
            out.push(current.clone());
            return;
        }
        current.push(None);
        recurse(pos + 1, from, to, used, current, out);
        current.pop();
        for b in 0..to {
            if !used[b] {
                used[b] = true;
                current.push(Some(b));
                recurse(pos + 1, from, to, used, current, out);
                current.pop();
                used[b] = false;
            }
        }
    }
    let mut used = vec![false; to];
    recurse(0, from, to, &mut used, &mut current, &mut out);
    out
}

/// All connected immersions over `gamma` with at most `max_v` vertices,
/// one per isomorphism class, in deterministic canonical order.
pub fn enumerate_graph_immersions(gamma: &SerreGraph, max_v: usize) -> Vec<Immersion> {
    type Key = (Vec<(usize, Letter, usize)>, Vec<usize>);
    let mut seen: BTreeSet<Key> = BTreeSet::new();
    let mut found: Vec<(usize, Key, Immersion)> = Vec::new();
    for n in 1..=max_v {
        // Vertex images: all maps [n] → V(Γ).
        let gv = gamma.num_vertices();
        let mut omega = vec![0usize; n];
        'vmaps: loop {
            // Per Γ-orbit e, the e-edges of Θ form a partial injection
            // from the fiber over src(e) to the fiber over dst(e).
            let fibers: Vec<(Vec<usize>, Vec<usize>)> = (0..gamma.num_edges())
                .map(|e| {
                    let s = gamma.src(2 * e);
                    let t = gamma.dst(2 * e);
                    (
                        (0..n).filter(|&v| omega[v] == s).collect(),
                        (0..n).filter(|&v| omega[v] == t).collect(),
                    )
                })
                .collect();
            let choices: Vec<Vec<Vec<Option<usize>>>> = fibers
                .iter()
                .map(|(a, b)| partial_injections(a.len(), b.len()))
                .collect();
            let mut pick = vec![0usize; gamma.num_edges()];
            'configs: loop {
                let mut theta = SerreGraph::new(n);
                for e in 0..gamma.num_edges() {
                    let (a, b) = &fibers[e];
                    for (ai, img) in choices[e][pick[e]].iter().enumerate() {
                        if let Some(bi) = img {
                            theta.add_edge(a[ai], b[*bi], Some(Letter::new(e, false)));
                        }
                    }
                }
                if theta.is_connected() {
                    debug_assert!(theta.is_folded());
                    let code = canonical_code(&theta, None);
                    // Edgeless graphs need the vertex image to tell
                    // immersions over distinct Γ-vertices apart.
                    let extra = if theta.num_edges() == 0 { omega.clone() } else { Vec::new() };
                    let key = (code, extra);
                    if seen.insert(key.clone()) {
                        found.push((n, key, Immersion { theta, vertex_map: omega.clone() }));
                    }
                }
                // Advance the per-orbit configuration odometer.
                let mut pos = gamma.num_edges();
                loop {
                    if pos == 0 {
                        break 'configs;
                    }
                    pos -= 1;
                    pick[pos] += 1;
                    if pick[pos] < choices[pos].len() {
                        continue 'configs;
                    }
                    pick[pos] = 0;
                }
            }
            // Advance the vertex-image odometer.
            let mut pos = n;
            loop {
                if pos == 0 {
                    break 'vmaps;
                }
                pos -= 1;
                omega[pos] += 1;
                if omega[pos] < gv {
                    continue 'vmaps;
                }
                omega[pos] = 0;
            }
        }
    }
    found.sort_by(|a, b| (a.0, &a.1).cmp(&(b.0, &b.1)));
    found.into_iter().map(|(_, _, imm)| imm).collect()
}

/// A cycle of the pullback Θ ×_Γ 𝕊: a closed Θ-dart path covering the
/// attaching cycle of cell `cell` an integral number of times.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PullbackCycle {
    pub cell: usize,
    pub darts: Vec<usize>,
}

/// The cycles 𝕊′ of the pullback; arc components are excluded.
pub fn pullback_cycles(imm: &Immersion, x: &TwoComplex) -> Vec<PullbackCycle> {
    let theta = &imm.theta;
    let mut out = Vec::new();
    for (c, path) in x.cells.iter().enumerate() {
        let m = path.len();
        // States (i, v): about to traverse p[i] starting at v over src(p[i]).
        let step = |i: usize, v: usize| -> Option<(usize, usize)> {
            theta
                .darts_at(v)
                .into_iter()
                .find(|&d| imm.image_dart(d) == path[i])
                .map(|d| ((i + 1) % m, theta.dst(d)))
        };
        let dart_of = |i: usize, v: usize| -> Option<usize> {
            theta.darts_at(v).into_iter().find(|&d| imm.image_dart(d) == path[i])
        };
        let mut visited: BTreeSet<(usize, usize)> = BTreeSet::new();
        for i0 in 0..m {
            for v0 in 0..theta.num_vertices() {
                if imm.vertex_map[v0] != x.graph.src(path[i0]) || visited.contains(&(i0, v0)) {
                    continue;
                }
                // Walk forward; lex-order iteration discovers each cycle
                // at its minimal state.
                let mut trail = vec![(i0, v0)];
                let mut darts = Vec::new();
                let mut closed = false;
                let (mut i, mut v) = (i0, v0);
                loop {
                    match step(i, v) {
                        Some((ni, nv)) => {
                            darts.push(dart_of(i, v).unwrap());
                            if (ni, nv) == (i0, v0) {
                                closed = true;
                                break;
                            }
                            if trail.contains(&(ni, nv)) || visited.contains(&(ni, nv)) {
                                break; // joins an arc handled elsewhere
                            }
                            trail.push((ni, nv));
                            i = ni;
                            v = nv;
                        }
                        None => break,
                    }
                }
                visited.extend(trail.iter().copied());
                if closed {
                    debug_assert_eq!(darts.len() % m, 0, "cycles cover the cell integrally");
                    out.push(PullbackCycle { cell: c, darts });
                }
            }
        }
    }
    out
}

/// π₁-status of a finite two-complex, by greedy Tietze simplification
/// (for Trivial) and abelianization (for certified Nontrivial).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pi1Status {
    Trivial,
    Nontrivial,
    Unknown,
}

pub fn pi1_status(y: &TwoComplex) -> Pi1Status {
    // Presentation on the non-tree edges of a spanning tree.
    let g = &y.graph;
    let mut parent: Vec<Option<usize>> = vec![None; g.num_vertices()];
    let mut seen = vec![false; g.num_vertices()];
    let mut tree = vec![false; g.num_edges()];
    for root in 0..g.num_vertices() {
        if seen[root] {
            continue;
        }
        seen[root] = true;
        let mut queue = std::collections::VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            for d in g.darts_at(v) {
                if !seen[g.dst(d)] {
                    seen[g.dst(d)] = true;
                    parent[g.dst(d)] = Some(d);
                    tree[g.orbit(d)] = true;
                    queue.push_back(g.dst(d));
                }
            }
        }
    }
    let gen_index: Vec<Option<usize>> = {
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
    let mut num_gens = gen_index.iter().filter(|i| i.is_some()).count();
    let mut relators: Vec<Word> = y
        .cells
        .iter()
        .map(|path| {
            free_reduce(path.iter().filter_map(|&d| {
                gen_index[g.orbit(d)].map(|i| Letter::new(i, d % 2 == 1))
            }))
        })
        .collect();

    // Greedy Tietze: eliminate a generator that occurs exactly once in
    // some relator, substituting its expression everywhere else.
    let mut alive: Vec<bool> = vec![true; num_gens];
    loop {
        relators = relators
            .iter()
            .map(|r| cyclic_reduce(r).0.as_word())
            .filter(|r| !r.is_empty())
            .collect();
        let mut eliminated = false;
        'search: for ri in 0..relators.len() {
            for target in 0..alive.len() {
                if !alive[target] {
                    continue;
                }
                let count = relators[ri]
                    .letters()
                    .iter()
                    .filter(|l| l.gen == target)
                    .count();
                if count != 1 {
                    continue;
                }
                // r = u g^ε v  ⇒  g^ε = u⁻¹ v⁻¹.
                let pos = relators[ri]
                    .letters()
                    .iter()
                    .position(|l| l.gen == target)
                    .unwrap();
                let occ = relators[ri].letters()[pos];
                let u = Word::from_letters(relators[ri].letters()[..pos].to_vec());
                let v = Word::from_letters(relators[ri].letters()[pos + 1..].to_vec());
                let expr_pos = u.inverse().concat(&v.inverse()); // value of g^ε
                let expr = if occ.inv { expr_pos.inverse() } else { expr_pos };
                let rels: Vec<Word> = relators
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != ri)
                    .map(|(_, r)| {
                        free_reduce(r.letters().iter().flat_map(|&l| {
                            if l.gen == target {
                                let body =
                                    if l.inv { expr.inverse() } else { expr.clone() };
                                body.letters().to_vec()
                            } else {
                                vec![l]
                            }
                        }))
                    })
                    .collect();
                relators = rels;
                alive[target] = false;
                num_gens -= 1;
                eliminated = true;
                break 'search;
            }
        }
        if !eliminated {
            break;
        }
    }
    if num_gens == 0 {
        return Pi1Status::Trivial;
    }
    if relators.is_empty() {
        return Pi1Status::Nontrivial; // free of positive rank
    }
    // Abelianization: nonzero cokernel certifies nontriviality.
    let gens: Vec<usize> = (0..alive.len()).filter(|&i| alive[i]).collect();
    let mat: homology::Matrix = gens
        .iter()
        .map(|&gidx| {
            relators
                .iter()
                .map(|r| num_bigint::BigInt::from(r.exponent_sum(gidx)))
                .collect()
        })
        .collect();
    let snf = homology::smith_normal_form(&mat);
    let free_rank = gens.len() - snf.rank;
    let has_torsion = snf.diag.iter().any(|d| *d > num_bigint::BigInt::from(1));
    if free_rank > 0 || has_torsion {
        Pi1Status::Nontrivial
    } else {
        Pi1Status::Unknown
    }
}

/// One record of a scan: a complex Y = (Θ, selected cycles).
#[derive(Debug, Clone)]
pub struct ScanRecord {
    pub immersion: usize,
    pub cycle_mask: u64,
    pub vertices: usize,
    pub edges: usize,
    pub cells: usize,
    pub chi: i64,
    pub b1: usize,
    pub b2: usize,
    pub pi1: Pi1Status,
}

#[derive(Debug, Clone)]
pub struct ScanReport {
    pub records: Vec<ScanRecord>,
    /// Indices into `records` of certified violations.
    pub violations: Vec<usize>,
    /// Indices into `records` of undecided potential violations.
    pub potential_violations: Vec<usize>,
    pub max_vertices: usize,
    pub immersions: usize,
    pub truncated: bool,
}

pub const CYCLE_SUBSET_CAP: usize = 16;
pub const RECORD_CAP: usize = 100_000;

fn make_record(
    imm_idx: usize,
    mask: u64,
    y: &TwoComplex,
) -> ScanRecord {
    let h = homology::homology(y);
    let chi = y.euler_char();
    assert_eq!(
        h.b0 as i64 - h.b1 as i64 + h.b2 as i64,
        chi,
        "Euler–Poincaré must hold on every record"
    );
    let pi1 = pi1_status(y);
    ScanRecord {
        immersion: imm_idx,
        cycle_mask: mask,
        vertices: y.graph.num_vertices(),
        edges: y.graph.num_edges(),
        cells: y.num_cells(),
        chi,
        b1: h.b1,
        b2: h.b2,
        pi1,
    }
}

fn scan(x: &TwoComplex, max_v: usize, classify: impl Fn(&ScanRecord, &TwoComplex) -> Verdict) -> ScanReport {
    let immersions = enumerate_graph_immersions(&x.graph, max_v);
    let mut report = ScanReport {
        records: Vec::new(),
        violations: Vec::new(),
        potential_violations: Vec::new(),
        max_vertices: max_v,
        immersions: immersions.len(),
        truncated: false,
    };
    'outer: for (imm_idx, imm) in immersions.iter().enumerate() {
        let cycles = pullback_cycles(imm, x);
        let usable = cycles.len().min(CYCLE_SUBSET_CAP);
        if cycles.len() > CYCLE_SUBSET_CAP {
            report.truncated = true;
        }
        for mask in 0..(1u64 << usable) {
            if report.records.len() >= RECORD_CAP {
                report.truncated = true;
                break 'outer;
            }
            let selected: Vec<Vec<usize>> = (0..usable)
                .filter(|i| mask & (1 << i) != 0)
                .map(|i| cycles[i].darts.clone())
                .collect();
            let y = TwoComplex::new(imm.theta.clone(), selected)
                .expect("pullback cycles are immersed closed paths");
            let record = make_record(imm_idx, mask, &y);
            let verdict = classify(&record, &y);
            let idx = report.records.len();
            report.records.push(record);
            match verdict {
                Verdict::Ok => {}
                Verdict::Violation => report.violations.push(idx),
                Verdict::Potential => report.potential_violations.push(idx),
            }
        }
    }
    report
}

enum Verdict {
    Ok,
    Violation,
    Potential,
}

/// Non-positive immersions: χ(Y) ≤ 0 or π₁(Y) trivial for every Y.
pub fn npi_scan(x: &TwoComplex, max_v: usize) -> ScanReport {
    scan(x, max_v, |r, _| {
        if r.chi < 1 {
            Verdict::Ok
        } else {
            match r.pi1 {
                Pi1Status::Trivial => Verdict::Ok,
                Pi1Status::Nontrivial => Verdict::Violation,
                Pi1Status::Unknown => Verdict::Potential,
            }
        }
    })
}

/// Weak non-positive immersions: χ(Y) ≤ 1 for every Y (no π₁ escape, so
/// any χ ≥ 2 record is a certified violation).
pub fn wnpi_scan(x: &TwoComplex, max_v: usize) -> ScanReport {
    scan(x, max_v, |r, _| if r.chi >= 2 { Verdict::Violation } else { Verdict::Ok })
}

/// Split a complex into wedge pieces: trim untraversed whiskers, then
/// split at cut vertices whenever no cell crosses the cut.
fn wedge_pieces(y: &TwoComplex) -> Vec<TwoComplex> {
    // Trim: drop untraversed edges with an endpoint of degree 1.
    let mut current = y.clone();
    loop {
        let traversed: Vec<bool> = {
            let mut t = vec![false; current.graph.num_edges()];
            for path in &current.cells {
                for &d in path {
                    t[current.graph.orbit(d)] = true;
                }
            }
            t
        };
        let removable = (0..current.graph.num_edges()).find(|&e| {
            !traversed[e]
                && (current.graph.degree(current.graph.src(2 * e)) == 1
                    || current.graph.degree(current.graph.dst(2 * e)) == 1)
        });
        match removable {
            Some(e) => {
                let mut g = SerreGraph::new(current.graph.num_vertices());
                let mut dmap = vec![usize::MAX; current.graph.num_darts()];
                for f in 0..current.graph.num_edges() {
                    if f == e {
                        continue;
                    }
                    let d = 2 * f;
                    let nd = g.add_edge(
                        current.graph.src(d),
                        current.graph.dst(d),
                        current.graph.label(d),
                    );
                    dmap[d] = nd;
                    dmap[d ^ 1] = nd ^ 1;
                }
                let cells = current
                    .cells
                    .iter()
                    .map(|p| p.iter().map(|&d| dmap[d]).collect())
                    .collect();
                current = TwoComplex::new(g, cells).expect("trim preserves cells");
            }
            None => break,
        }
    }
    // Drop isolated vertices: whisker trees collapse to points, which
    // contribute nothing to a wedge decomposition.
    {
        let g = &current.graph;
        let keep: Vec<bool> = (0..g.num_vertices()).map(|v| g.degree(v) > 0).collect();
        if keep.iter().any(|k| !k) {
            let mut vmap = vec![usize::MAX; g.num_vertices()];
            let mut ng = SerreGraph::new(0);
            for v in 0..g.num_vertices() {
                if keep[v] {
                    vmap[v] = ng.add_vertex();
                }
            }
            let mut dmap = vec![usize::MAX; g.num_darts()];
            for e in 0..g.num_edges() {
                let d = 2 * e;
                let nd = ng.add_edge(vmap[g.src(d)], vmap[g.dst(d)], g.label(d));
                dmap[d] = nd;
                dmap[d ^ 1] = nd ^ 1;
            }
            let cells = current
                .cells
                .iter()
                .map(|p| p.iter().map(|&d| dmap[d]).collect())
                .collect();
            current = TwoComplex::new(ng, cells).expect("compaction preserves cells");
        }
        if current.graph.num_vertices() == 0 {
            return Vec::new();
        }
    }
    // Split at a cut vertex if every cell stays within one side.
    for v in 0..current.graph.num_vertices() {
        // Group edges by connectivity avoiding v.
        let g = &current.graph;
        let ne = g.num_edges();
        if ne == 0 {
            continue;
        }
        let mut group: Vec<usize> = (0..ne).collect();
        fn find(group: &mut Vec<usize>, e: usize) -> usize {
            if group[e] != e {
                let root = find(group, group[e]);
                group[e] = root;
            }
            group[e]
        }
        for u in 0..g.num_vertices() {
            if u == v {
                continue;
            }
            let incident: Vec<usize> =
                g.darts_at(u).into_iter().map(|d| g.orbit(d)).collect();
            for w in incident.windows(2) {
                let (a, b) = (find(&mut group, w[0]), find(&mut group, w[1]));
                group[a] = b;
            }
        }
        let mut roots: Vec<usize> = (0..ne).map(|e| find(&mut group, e)).collect();
        let mut distinct = roots.clone();
        distinct.sort_unstable();
        distinct.dedup();
        if distinct.len() < 2 {
            continue;
        }
        let cells_confined = current.cells.iter().all(|p| {
            let mut rs: Vec<usize> = p.iter().map(|&d| roots[g.orbit(d)]).collect();
            rs.sort_unstable();
            rs.dedup();
            rs.len() <= 1
        });
        if !cells_confined {
            continue;
        }
        // Build one piece per edge group (with its incident vertices).
        let mut pieces = Vec::new();
        for &root in &distinct {
            let mut vmap = vec![None; g.num_vertices()];
            let mut piece = SerreGraph::new(0);
            let mut dmap = vec![usize::MAX; g.num_darts()];
            for e in 0..ne {
                if roots[e] != root {
                    continue;
                }
                let d = 2 * e;
                for end in [g.src(d), g.dst(d)] {
                    if vmap[end].is_none() {
                        vmap[end] = Some(piece.add_vertex());
                    }
                }
                let nd = piece.add_edge(vmap[g.src(d)].unwrap(), vmap[g.dst(d)].unwrap(), g.label(d));
                dmap[d] = nd;
                dmap[d ^ 1] = nd ^ 1;
            }
            let cells: Vec<Vec<usize>> = current
                .cells
                .iter()
                .filter(|p| !p.is_empty() && roots[g.orbit(p[0])] == root)
                .map(|p| p.iter().map(|&d| dmap[d]).collect())
                .collect();
            let piece = TwoComplex::new(piece, cells).expect("split preserves cells");
            pieces.extend(wedge_pieces(&piece));
        }
        roots.clear();
        return pieces;
    }
    vec![current]
}

/// A piece is C-like when its graph is a single cycle and every cell
/// attaches along a power of that cycle.
fn is_c_like(piece: &TwoComplex) -> bool {
    let g = &piece.graph;
    if g.num_vertices() == 0 || g.num_edges() != g.num_vertices() || !g.is_connected() {
        return false;
    }
    if (0..g.num_vertices()).any(|v| g.degree(v) != 2) {
        return false;
    }
    // The cycle through dart 0 (degree 2 everywhere forces a single cycle).
    let mut cycle = Vec::new();
    let start = 0;
    let mut d = g.darts_at(g.src(start))[0];
    loop {
        cycle.push(d);
        let next = g
            .darts_at(g.dst(d))
            .into_iter()
            .find(|&n| n != g.inverse(d))
            .unwrap_or_else(|| g.inverse(d));
        if g.dst(d) == g.src(cycle[0]) && cycle.len() == g.num_edges() {
            break;
        }
        d = next;
        if cycle.len() > g.num_edges() {
            return false;
        }
    }
    let forward = cycle.clone();
    let backward: Vec<usize> = cycle.iter().rev().map(|&d| g.inverse(d)).collect();
    piece.cells.iter().all(|path| {
        let n = path.len();
        let m = forward.len();
        if n % m != 0 {
            return false;
        }
        [&forward, &backward].iter().any(|dir| {
            (0..m).any(|rot| (0..n).all(|i| path[i] == dir[(i + rot) % m]))
        })
    })
}

/// NTPI: every wedge piece of every enumerated Y is C-like or has χ ≤ 0;
/// failures are potential violations (homotopy type is not decided).
pub fn ntpi_scan(x: &TwoComplex, max_v: usize) -> ScanReport {
    scan(x, max_v, |_, y| {
        let witnessed = wedge_pieces(y)
            .iter()
            .all(|p| is_c_like(p) || p.euler_char() <= 0);
        if witnessed {
            Verdict::Ok
        } else {
            Verdict::Potential
        }
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PullbackCheck {
    Holds,
    Violation { immersion: usize },
    BudgetExceeded,
}

/// Theorem check for bireducible complexes with primitive attaching maps:
/// every Θ satisfies collapsible-or-(π₀(𝕊′) ≤ −χ(Θ)).
pub fn bireducible_pullback_check(
    x: &TwoComplex,
    max_v: usize,
    cap: u64,
) -> Result<PullbackCheck, Error> {
    if is_bireducible(x, cap) != SubcomplexVerdict::True {
        return Err(Error::Precondition("complex is not certified bireducible".into()));
    }
    if has_proper_powers(x, cap) != ProperPowers::No {
        return Err(Error::Precondition(
            "attaching maps are not certified free of proper powers".into(),
        ));
    }
    let immersions = enumerate_graph_immersions(&x.graph, max_v);
    let mut budget_hit = false;
    for (idx, imm) in immersions.iter().enumerate() {
        let cycles = pullback_cycles(imm, x);
        let chi_theta = imm.theta.euler_char();
        if (cycles.len() as i64) <= -chi_theta {
            continue;
        }
        let y = TwoComplex::new(
            imm.theta.clone(),
            cycles.iter().map(|c| c.darts.clone()).collect(),
        )
        .expect("pullback cycles are immersed closed paths");
        match is_collapsible(&y, cap) {
            SubcomplexVerdict::True => {}
            SubcomplexVerdict::False(_) => return Ok(PullbackCheck::Violation { immersion: idx }),
            SubcomplexVerdict::BudgetExceeded => budget_hit = true,
        }
    }
    if budget_hit {
        Ok(PullbackCheck::BudgetExceeded)
    } else {
        Ok(PullbackCheck::Holds)
    }
}
