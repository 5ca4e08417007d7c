//! Integer cellular homology of two-complexes via Smith normal form,
//! with exact arbitrary-precision arithmetic.

use crate::complexes::TwoComplex;
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

pub type Matrix = Vec<Vec<BigInt>>;

pub fn zeros(rows: usize, cols: usize) -> Matrix {
    vec![vec![BigInt::zero(); cols]; rows]
}

pub fn identity(n: usize) -> Matrix {
    let mut m = zeros(n, n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = BigInt::one();
    }
    m
}

pub fn mat_mul(a: &Matrix, b: &Matrix) -> Matrix {
    let rows = a.len();
    let inner = if rows > 0 { a[0].len() } else { 0 };
    let cols = if b.is_empty() { 0 } else { b[0].len() };
    let mut out = zeros(rows, cols);
    for i in 0..rows {
        for k in 0..inner {
            if a[i][k].is_zero() {
                continue;
            }
            for j in 0..cols {
                let prod = &a[i][k] * &b[k][j];
                out[i][j] += prod;
            }
        }
    }
    out
}

/// U · M · V = S with S diagonal, divisibility chain d₁ | d₂ | …, and
/// U, V unimodular. The factorization is re-verified before returning.
#[derive(Debug, Clone)]
pub struct Snf {
    pub s: Matrix,
    pub u: Matrix,
    pub v: Matrix,
    pub rank: usize,
    pub diag: Vec<BigInt>,
}

pub fn smith_normal_form(m: &Matrix) -> Snf {
    let rows = m.len();
    let cols = if rows > 0 { m[0].len() } else { 0 };
    let mut s = m.clone();
    let mut u = identity(rows);
    let mut v = identity(cols);

    let mut t = 0usize;
    'outer: while t < rows.min(cols) {
        // Pick the smallest-magnitude nonzero entry in the trailing block
        // as the pivot; magnitudes strictly decrease under remaindering,
        // so the inner loop terminates.
        let mut pivot: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if !s[i][j].is_zero()
                    && pivot.map_or(true, |(pi, pj)| s[i][j].abs() < s[pi][pj].abs())
                {
                    pivot = Some((i, j));
                }
            }
        }
        let (pi, pj) = match pivot {
            Some(p) => p,
            None => break,
        };
        s.swap(t, pi);
        u.swap(t, pi);
        for row in s.iter_mut() {
            row.swap(t, pj);
        }
        for row in v.iter_mut() {
            row.swap(t, pj);
        }

        for i in t + 1..rows {
            if !s[i][t].is_zero() {
                let q = &s[i][t] / &s[t][t];
                for j in 0..cols {
                    let d = &q * &s[t][j];
                    s[i][j] -= d;
                }
                for j in 0..rows {
                    let d = &q * &u[t][j];
                    u[i][j] -= d;
                }
                if !s[i][t].is_zero() {
                    continue 'outer; // smaller remainder becomes the pivot
                }
            }
        }
        for j in t + 1..cols {
            if !s[t][j].is_zero() {
                let q = &s[t][j] / &s[t][t];
                for i in 0..rows {
                    let d = &q * &s[i][t];
                    s[i][j] -= d;
                }
                for i in 0..cols {
                    let d = &q * &v[i][t];
                    v[i][j] -= d;
                }
                if !s[t][j].is_zero() {
                    continue 'outer;
                }
            }
        }
        // Enforce the divisibility chain: fold a bad entry into column t.
        for i in t + 1..rows {
            for j in t + 1..cols {
                if !(&s[i][j] % &s[t][t]).is_zero() {
                    for r in 0..rows {
                        let add = s[r][j].clone();
                        s[r][t] += add;
                    }
                    for r in 0..cols {
                        let add = v[r][j].clone();
                        v[r][t] += add;
                    }
                    continue 'outer;
                }
            }
        }
        if s[t][t].is_negative() {
            for j in 0..cols {
                s[t][j] = -s[t][j].clone();
            }
            for j in 0..rows {
                u[t][j] = -u[t][j].clone();
            }
        }
        t += 1;
    }

    let rank = t;
    let diag: Vec<BigInt> = (0..rank).map(|i| s[i][i].clone()).collect();
    // Re-verify the factorization and the divisibility chain exactly.
    assert_eq!(mat_mul(&mat_mul(&u, m), &v), s, "U·M·V = S must hold");
    for w in diag.windows(2) {
        assert!((&w[1] % &w[0]).is_zero(), "divisibility chain violated");
    }
    for (i, row) in s.iter().enumerate() {
        for (j, e) in row.iter().enumerate() {
            assert!(i == j && i < rank || e.is_zero(), "S must be diagonal");
        }
    }
    Snf { s, u, v, rank, diag }
}

/// Solve M x = b over the integers, if possible.
pub fn solve(m: &Matrix, b: &[BigInt]) -> Option<Vec<BigInt>> {
    let rows = m.len();
    let cols = if rows > 0 { m[0].len() } else { 0 };
    assert_eq!(b.len(), rows);
    let snf = smith_normal_form(m);
    let ub: Vec<BigInt> = (0..rows)
        .map(|i| (0..rows).map(|j| &snf.u[i][j] * &b[j]).sum())
        .collect();
    let mut y = vec![BigInt::zero(); cols];
    for (i, ubi) in ub.iter().enumerate() {
        if i < snf.rank {
            if !(ubi % &snf.diag[i]).is_zero() {
                return None;
            }
            y[i] = ubi / &snf.diag[i];
        } else if !ubi.is_zero() {
            return None;
        }
    }
    let x: Vec<BigInt> = (0..cols)
        .map(|i| (0..cols).map(|j| &snf.v[i][j] * &y[j]).sum())
        .collect();
    Some(x)
}

/// Cellular chain complex of a two-complex.
#[derive(Debug, Clone)]
pub struct ChainComplex2 {
    /// edges × cells; entry = net signed traversal count.
    pub d2: Matrix,
    /// vertices × edges; entry = target − source incidence.
    pub d1: Matrix,
}

pub fn boundary_matrices(x: &TwoComplex) -> ChainComplex2 {
    let g = &x.graph;
    let mut d2 = zeros(g.num_edges(), x.num_cells());
    for (c, path) in x.cells.iter().enumerate() {
        for &d in path {
            let e = g.orbit(d);
            if d % 2 == 0 {
                d2[e][c] += 1;
            } else {
                d2[e][c] -= 1;
            }
        }
    }
    let mut d1 = zeros(g.num_vertices(), g.num_edges());
    for e in 0..g.num_edges() {
        d1[g.dst(2 * e)][e] += 1;
        d1[g.src(2 * e)][e] -= 1;
    }
    let prod = mat_mul(&d1, &d2);
    assert!(
        prod.iter().all(|row| row.iter().all(Zero::is_zero)),
        "∂₁·∂₂ = 0 must hold"
    );
    ChainComplex2 { d2, d1 }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HomologySummary {
    pub b0: usize,
    pub b1: usize,
    pub b2: usize,
    /// Invariant factors > 1 of the torsion of H₁.
    pub torsion: Vec<BigInt>,
}

pub fn homology(x: &TwoComplex) -> HomologySummary {
    let cc = boundary_matrices(x);
    let s1 = smith_normal_form(&cc.d1);
    let s2 = smith_normal_form(&cc.d2);
    let v = x.graph.num_vertices();
    let e = x.graph.num_edges();
    let f = x.num_cells();
    let b0 = v - s1.rank;
    let b1 = e - s1.rank - s2.rank;
    let b2 = f - s2.rank;
    // H₁ torsion: im ∂₂ ⊆ ker ∂₁ and ker ∂₁ is a direct summand of the
    // edge lattice, so the invariant factors of ∂₂ are exactly those of
    // the quotient ker ∂₁ / im ∂₂.
    let torsion: Vec<BigInt> = s2.diag.iter().filter(|d| **d > BigInt::one()).cloned().collect();
    let (_, components) = x.graph.components();
    assert_eq!(b0, components, "b₀ must count components");
    assert_eq!(
        b0 as i64 - b1 as i64 + b2 as i64,
        x.euler_char(),
        "Euler–Poincaré identity must hold"
    );
    HomologySummary { b0, b1, b2, torsion }
}

/// Pure report for the rational Betti inequality b₂ ≤ max(b₁ − 1, 0).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BettiInequalityReport {
    pub b1: usize,
    pub b2: usize,
    pub satisfies: bool,
    /// Caller-supplied hypothesis flag, echoed verbatim.
    pub hypothesis_note: String,
}

pub fn betti_inequality_report(x: &TwoComplex, hypothesis_note: &str) -> BettiInequalityReport {
    let h = homology(x);
    BettiInequalityReport {
        b1: h.b1,
        b2: h.b2,
        satisfies: (h.b2 as i64) <= (h.b1 as i64) - 1,
        hypothesis_note: hypothesis_note.to_string(),
    }
}
