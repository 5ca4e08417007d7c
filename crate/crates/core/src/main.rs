//! Command-line entry point: every library operation on files, with
//! deterministic machine-readable reports.
//!
//! Exit codes: 0 property holds / computation succeeded; 1 property
//! refuted (witness printed); 2 Unknown or budget exceeded; 64 usage
//! error; 65 parse error.

use clap::{Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::process::exit;

use cgtk::complexes::{
    self, presentation_complex, ProperPowers, Subgraph, SubcomplexVerdict, TwoComplex,
};
use cgtk::error::Error;
use cgtk::graphs::{canonical_code, fold, SerreGraph};
use cgtk::homology;
use cgtk::immersions::{self, PullbackCheck, ScanReport};
use cgtk::presentations::{
    self, coxeter_chibar, hierarchy, normal_closure_membership, parse_coxeter,
    parse_presentation, serialize_presentation, CoxeterVerdict, NcVerdict, Presentation,
};
use cgtk::subgroups::{
    self, hn_verdict, parse_subgroup, shnc_check, verify_strictly_reducible, Containment,
    StallingsAutomaton, StrictlyReducible,
};
use cgtk::words::{Alphabet, Letter, Word};

/// Default caps may be overridden by CGTK_CAP, CGTK_BUDGET and
/// CGTK_MAX_VERTICES.
fn env_u64(name: &str, default: u64) -> u64 {
    std::env::var(name)
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(default)
}

#[derive(Parser)]
#[command(name = "cgtk", version, about = "Subgroup graphs, two-complexes and their checkable inequalities")]
struct Cli {
    /// Emit sorted key=value records instead of prose.
    #[arg(long, global = true)]
    records: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Rank of a subgroup file.
    Rank { file: String },
    /// Membership of a word in a subgroup.
    Member {
        file: String,
        #[arg(long)]
        word: String,
    },
    /// Intersection of two subgroups, with a basis.
    Intersect { u: String, w: String },
    /// Rank-1 Hanna Neumann verdict for a pair of subgroup files.
    HannaNeumann {
        u: String,
        w: String,
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Strengthened Hanna Neumann inequality for a pair of subgroups.
    Shnc { u: String, w: String },
    /// Structural predicates of a two-complex or presentation file.
    Check {
        kind: CheckKind,
        file: String,
        #[arg(long)]
        cap: Option<u64>,
    },
    /// Free basis of the Magnus subgroup of a small subgraph.
    Magnus {
        file: String,
        /// Edge names spanning the subgraph.
        #[arg(long, num_args = 1.., value_delimiter = ' ')]
        subgraph: Vec<String>,
        #[arg(long)]
        cap: Option<u64>,
    },
    /// Integer cellular homology of a complex.
    Homology { file: String },
    /// Non-positive-immersion scan up to a vertex bound.
    NpiScan {
        file: String,
        #[arg(long)]
        max_vertices: Option<usize>,
        /// Scan for the weak property (χ ≤ 1) instead.
        #[arg(long)]
        weak: bool,
    },
    /// Non-positive-tower-immersion scan up to a vertex bound.
    NtpiScan {
        file: String,
        #[arg(long)]
        max_vertices: Option<usize>,
    },
    /// Collapsible-or-component-bound check over all immersions.
    PullbackCheck {
        file: String,
        #[arg(long)]
        max_vertices: Option<usize>,
        #[arg(long)]
        cap: Option<u64>,
    },
    /// Moldavanskii hierarchy of a one-relator presentation.
    Hierarchy {
        file: String,
        #[arg(long)]
        depth: Option<usize>,
    },
    /// Normal-closure membership oracle.
    NcMember {
        file: String,
        #[arg(long)]
        word: String,
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Coxeter diagram subset scan for positive χ̄.
    Coxeter {
        file: String,
        #[arg(long)]
        cap: Option<u64>,
    },
    /// Randomized invariant suites, deterministic in the seed.
    Suite {
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum CheckKind {
    Staggered,
    Reducible,
    Collapsible,
    Bireducible,
    ProperPowers,
}

/// Accumulated key/value report plus the final verdict line.
struct Report {
    fields: Vec<(String, String)>,
    verdict: String,
}

impl Report {
    fn new() -> Self {
        Report { fields: Vec::new(), verdict: String::from("ok") }
    }

    fn push(&mut self, key: impl Into<String>, value: impl ToString) {
        self.fields.push((key.into(), value.to_string()));
    }

    fn emit(mut self, records: bool) {
        if records {
            self.fields.sort();
            for (k, v) in &self.fields {
                println!("{k}={v}");
            }
            println!("summary.verdict={}", self.verdict);
        } else {
            for (k, v) in &self.fields {
                println!("{k}: {v}");
            }
            println!("verdict: {}", self.verdict);
        }
    }
}

fn read(path: &str) -> Result<String, Error> {
    std::fs::read_to_string(path).map_err(Error::Io)
}

/// Load a two-complex from a `.pres` or complex file, with edge names.
fn load_complex(path: &str) -> Result<(TwoComplex, Vec<String>), Error> {
    let text = read(path)?;
    if path.ends_with(".pres") {
        let p = parse_presentation(&text)?;
        let x = presentation_complex(&p)?;
        Ok((x, p.alphabet.names().to_vec()))
    } else {
        let named = complexes::parse_complex(&text)?;
        Ok((named.complex, named.named_graph.edge_names.clone()))
    }
}

fn load_subgroup(path: &str) -> Result<StallingsAutomaton, Error> {
    parse_subgroup(&read(path)?)
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 64,
            };
            let _ = e.print();
            exit(code);
        }
    };
    match dispatch(cli.command, cli.records) {
        Ok(code) => exit(code),
        Err(e) => {
            eprintln!("error: {e}");
            let code = match e {
                Error::Parse(_) | Error::Alphabet(_) | Error::Io(_) => 65,
                Error::Precondition(_) => 2,
                _ => 64,
            };
            exit(code);
        }
    }
}

fn dispatch(cmd: Command, records: bool) -> Result<i32, Error> {
    let mut report = Report::new();
    let code = match cmd {
        Command::Rank { file } => {
            let u = load_subgroup(&file)?;
            report.push("summary.rank", u.rank());
            report.push("summary.dbar", u.dbar());
            report.push("graph.vertices", u.graph.num_vertices());
            report.push("graph.edges", u.graph.num_edges());
            0
        }
        Command::Member { file, word } => {
            let u = load_subgroup(&file)?;
            let w = Word::parse(&u.alphabet, &word)?;
            let inside = u.membership(&w);
            report.push("member.word", w.display(&u.alphabet));
            report.push("member.result", inside);
            report.verdict = if inside { "member".into() } else { "non-member".into() };
            i32::from(!inside)
        }
        Command::Intersect { u, w } => {
            let u = load_subgroup(&u)?;
            let w = load_subgroup(&w)?;
            let i = subgroups::intersect(&u, &w)?;
            report.push("summary.rank", i.rank());
            for (n, b) in i.generators.iter().enumerate() {
                report.push(format!("basis.{n}"), b.display(&i.alphabet));
            }
            0
        }
        Command::HannaNeumann { u, w, budget } => {
            let budget = budget.unwrap_or_else(|| env_u64("CGTK_BUDGET", 1000));
            let u = load_subgroup(&u)?;
            let w = load_subgroup(&w)?;
            let gens = w.generators.clone();
            let r = hn_verdict(&u, &w, &gens, budget)?;
            report.push("summary.sum", r.sum);
            report.push("summary.bound", r.bound);
            report.push(
                "summary.containment",
                match r.containment {
                    Containment::Inside => "inside",
                    Containment::Outside => "outside",
                    Containment::Unknown => "unknown",
                },
            );
            report.push("summary.flagged", r.flagged);
            for (n, rank) in r.ranks.iter().enumerate() {
                report.push(format!("component.{n}.rank"), rank);
            }
            report.verdict = if r.holds { "holds".into() } else { "refuted".into() };
            i32::from(!r.holds)
        }
        Command::Shnc { u, w } => {
            let u = load_subgroup(&u)?;
            let w = load_subgroup(&w)?;
            let r = shnc_check(&u, &w)?;
            report.push("summary.sum", r.sum);
            report.push("summary.bound", r.bound);
            report.verdict = if r.holds { "holds".into() } else { "refuted".into() };
            i32::from(!r.holds)
        }
        Command::Check { kind, file, cap } => {
            let cap = cap.unwrap_or_else(|| env_u64("CGTK_CAP", complexes::DEFAULT_SUBSET_CAP));
            let (x, edge_names) = load_complex(&file)?;
            match kind {
                CheckKind::Staggered => match complexes::find_staggering(&x) {
                    Some(s) => {
                        let edges: Vec<&str> =
                            s.edge_order.iter().map(|&e| edge_names[e].as_str()).collect();
                        report.push("staggering.edge_order", edges.join(" "));
                        let cells: Vec<String> =
                            s.cell_order.iter().map(|c| c.to_string()).collect();
                        report.push("staggering.cell_order", cells.join(" "));
                        report.verdict = "staggered".into();
                        0
                    }
                    None => {
                        report.verdict = "not-staggered".into();
                        1
                    }
                },
                CheckKind::Reducible
                | CheckKind::Collapsible
                | CheckKind::Bireducible => {
                    let v = match kind {
                        CheckKind::Reducible => complexes::is_reducible(&x, cap),
                        CheckKind::Collapsible => complexes::is_collapsible(&x, cap),
                        _ => complexes::is_bireducible(&x, cap),
                    };
                    match v {
                        SubcomplexVerdict::True => {
                            report.verdict = "holds".into();
                            0
                        }
                        SubcomplexVerdict::False(cells) => {
                            let w: Vec<String> =
                                cells.iter().map(|c| c.to_string()).collect();
                            report.push("witness.cells", w.join(" "));
                            report.verdict = "refuted".into();
                            1
                        }
                        SubcomplexVerdict::BudgetExceeded => {
                            report.verdict = "budget-exceeded".into();
                            2
                        }
                    }
                }
                CheckKind::ProperPowers => match complexes::has_proper_powers(&x, cap) {
                    ProperPowers::No => {
                        report.verdict = "no-proper-powers".into();
                        0
                    }
                    ProperPowers::Yes(cell) => {
                        report.push("witness.cell", cell);
                        report.verdict = "proper-power".into();
                        1
                    }
                    ProperPowers::Unknown => {
                        report.verdict = "unknown".into();
                        2
                    }
                },
            }
        }
        Command::Magnus { file, subgraph, cap } => {
            let cap = cap.unwrap_or_else(|| env_u64("CGTK_CAP", complexes::DEFAULT_SUBSET_CAP));
            let (x, edge_names) = load_complex(&file)?;
            let mut edges = Vec::new();
            for name in &subgraph {
                let e = edge_names
                    .iter()
                    .position(|n| n == name)
                    .ok_or_else(|| Error::Input(format!("unknown edge {name:?}")))?;
                edges.push(e);
            }
            let basis = complexes::magnus_subgroup(&x, &Subgraph { edges }, cap)?;
            report.push("magnus.basepoint", basis.basepoint);
            report.push("magnus.rank", basis.loops.len());
            for (n, l) in basis.loops.iter().enumerate() {
                let path: Vec<String> = l
                    .iter()
                    .map(|&d| {
                        let name = &edge_names[x.graph.orbit(d)];
                        if d % 2 == 0 { name.clone() } else { format!("{name}^-1") }
                    })
                    .collect();
                report.push(format!("magnus.loop.{n}"), path.join(" "));
            }
            0
        }
        Command::Homology { file } => {
            let (x, _) = load_complex(&file)?;
            let h = homology::homology(&x);
            report.push("homology.b0", h.b0);
            report.push("homology.b1", h.b1);
            report.push("homology.b2", h.b2);
            let torsion: Vec<String> = h.torsion.iter().map(|t| t.to_string()).collect();
            report.push("homology.torsion", torsion.join(" "));
            report.push("homology.chi", x.euler_char());
            report.push(
                "homology.euler_poincare",
                h.b0 as i64 - h.b1 as i64 + h.b2 as i64 == x.euler_char(),
            );
            0
        }
        Command::NpiScan { file, max_vertices, weak } => {
            let max_v = max_vertices.unwrap_or_else(|| env_u64("CGTK_MAX_VERTICES", 5) as usize);
            let (x, _) = load_complex(&file)?;
            let scan = if weak {
                immersions::wnpi_scan(&x, max_v)
            } else {
                immersions::npi_scan(&x, max_v)
            };
            scan_report(&mut report, &scan)
        }
        Command::NtpiScan { file, max_vertices } => {
            let max_v = max_vertices.unwrap_or_else(|| env_u64("CGTK_MAX_VERTICES", 5) as usize);
            let (x, _) = load_complex(&file)?;
            let scan = immersions::ntpi_scan(&x, max_v);
            scan_report(&mut report, &scan)
        }
        Command::PullbackCheck { file, max_vertices, cap } => {
            let max_v = max_vertices.unwrap_or_else(|| env_u64("CGTK_MAX_VERTICES", 5) as usize);
            let cap = cap.unwrap_or_else(|| env_u64("CGTK_CAP", complexes::DEFAULT_SUBSET_CAP));
            let (x, _) = load_complex(&file)?;
            match immersions::bireducible_pullback_check(&x, max_v, cap)? {
                PullbackCheck::Holds => {
                    report.verdict = "holds".into();
                    0
                }
                PullbackCheck::Violation { immersion } => {
                    report.push("witness.immersion", immersion);
                    report.verdict = "refuted".into();
                    1
                }
                PullbackCheck::BudgetExceeded => {
                    report.verdict = "budget-exceeded".into();
                    2
                }
            }
        }
        Command::Hierarchy { file, depth } => {
            let depth = depth.unwrap_or_else(|| env_u64("CGTK_DEPTH", 16) as usize);
            let p = parse_presentation(&read(&file)?)?;
            let h = hierarchy(&p, depth)?;
            report.push("hierarchy.steps", h.steps.len());
            report.push("hierarchy.terminal", h.terminal);
            for (n, step) in h.steps.iter().enumerate() {
                report.push(format!("step.{n}.stable_letter"), &step.stable_letter);
                report.push(
                    format!("step.{n}.child"),
                    serialize_presentation(&step.child).replace('\n', "; "),
                );
            }
            report.verdict = if h.terminal { "terminal".into() } else { "depth-capped".into() };
            if h.terminal { 0 } else { 2 }
        }
        Command::NcMember { file, word, budget } => {
            let budget = budget.unwrap_or_else(|| env_u64("CGTK_BUDGET", 1000));
            let p = parse_presentation(&read(&file)?)?;
            let w = Word::parse(&p.alphabet, &word)?;
            match normal_closure_membership(&p.alphabet, &p.relators, &w, budget)? {
                NcVerdict::Yes(factors) => {
                    report.push("certificate.factors", factors.len());
                    for (n, f) in factors.iter().enumerate() {
                        report.push(
                            format!("certificate.factor.{n}"),
                            format!(
                                "{} r{}{}",
                                f.conjugator.display(&p.alphabet),
                                f.relator_index,
                                if f.inverted { "^-1" } else { "" }
                            ),
                        );
                    }
                    report.verdict = "member".into();
                    0
                }
                NcVerdict::No(witness) => {
                    report.push("witness", format!("{witness:?}"));
                    report.verdict = "non-member".into();
                    1
                }
                NcVerdict::Unknown => {
                    report.verdict = "unknown".into();
                    2
                }
            }
        }
        Command::Coxeter { file, cap } => {
            let cap = cap.unwrap_or_else(|| env_u64("CGTK_CAP", complexes::DEFAULT_SUBSET_CAP));
            let d = parse_coxeter(&read(&file)?)?;
            match presentations::coxeter_coherence_predicate(&d, cap) {
                CoxeterVerdict::AllNonpositive => {
                    report.verdict = "all-nonpositive".into();
                    0
                }
                CoxeterVerdict::Witness(subset) => {
                    let names: Vec<&str> =
                        subset.iter().map(|&v| d.names[v].as_str()).collect();
                    report.push("witness.vertices", names.join(" "));
                    report.push("witness.chibar", coxeter_chibar(&d, &subset)?);
                    report.verdict = "witness".into();
                    1
                }
                CoxeterVerdict::BudgetExceeded => {
                    report.verdict = "budget-exceeded".into();
                    2
                }
            }
        }
        Command::Suite { seed } => {
            return Ok(run_suites(seed, records));
        }
    };
    report.emit(records);
    Ok(code)
}

fn scan_report(report: &mut Report, scan: &ScanReport) -> i32 {
    report.push("scan.records", scan.records.len());
    report.push("scan.immersions", scan.immersions);
    report.push("scan.max_vertices", scan.max_vertices);
    report.push("scan.truncated", scan.truncated);
    report.push("scan.violations", scan.violations.len());
    report.push("scan.potential_violations", scan.potential_violations.len());
    for (n, &i) in scan.violations.iter().enumerate() {
        let r = &scan.records[i];
        report.push(
            format!("violation.{n}"),
            format!(
                "immersion={} mask={} chi={} b1={} b2={}",
                r.immersion, r.cycle_mask, r.chi, r.b1, r.b2
            ),
        );
    }
    for (n, &i) in scan.potential_violations.iter().enumerate() {
        let r = &scan.records[i];
        report.push(
            format!("potential.{n}"),
            format!("immersion={} mask={} chi={}", r.immersion, r.cycle_mask, r.chi),
        );
    }
    if !scan.violations.is_empty() {
        report.verdict = "refuted".into();
        1
    } else if !scan.potential_violations.is_empty() || scan.truncated {
        report.verdict = "undecided".into();
        2
    } else {
        report.verdict = "holds".into();
        0
    }
}

// ---------------------------------------------------------------------
// Randomized suites. All randomness flows from the single seed so that
// failures replay exactly; output is byte-stable for a fixed seed.
// ---------------------------------------------------------------------

fn random_reduced_word(rng: &mut ChaCha8Rng, gens: usize, max_len: usize) -> Word {
    loop {
        let len = rng.gen_range(1..=max_len);
        let mut letters: Vec<Letter> = Vec::with_capacity(len);
        for _ in 0..len {
            let l = Letter::new(rng.gen_range(0..gens), rng.gen_bool(0.5));
            if letters.last().is_some_and(|p| p.is_inverse_of(l)) {
                continue;
            }
            letters.push(l);
        }
        let w = Word::from_letters(letters);
        if !w.is_empty() {
            return w;
        }
    }
}

fn random_cyclically_reduced(rng: &mut ChaCha8Rng, gens: usize, max_len: usize) -> Word {
    loop {
        let w = random_reduced_word(rng, gens, max_len);
        let (cyc, _) = cgtk::words::cyclic_reduce(&w);
        if !cyc.is_empty() {
            return cyc.as_word();
        }
    }
}

fn random_subgroup(rng: &mut ChaCha8Rng, alphabet: &Alphabet, max_gens: usize) -> StallingsAutomaton {
    let n = rng.gen_range(1..=max_gens);
    let gens: Vec<Word> = (0..n)
        .map(|_| random_reduced_word(rng, alphabet.len(), 6))
        .collect();
    StallingsAutomaton::from_generators(alphabet, &gens)
}

fn random_complex(rng: &mut ChaCha8Rng, max_gens: usize, max_cells: usize) -> TwoComplex {
    let names = ["a", "b", "c"];
    let gens = rng.gen_range(1..=max_gens);
    let alphabet = Alphabet::new(names[..gens].iter().copied()).unwrap();
    let cells = rng.gen_range(0..=max_cells);
    let relators: Vec<Word> = (0..cells)
        .map(|_| random_cyclically_reduced(rng, gens, 6))
        .collect();
    presentation_complex(&Presentation { alphabet, relators }).unwrap()
}

/// A cyclic word certified strictly reducible as the pair (r, b) over
/// X₀ = {a}: alternating b-powers with nonempty a-powers.
fn random_strictly_reducible(rng: &mut ChaCha8Rng, alphabet: &Alphabet) -> Word {
    loop {
        let syllables = rng.gen_range(1..=2);
        let mut letters = Vec::new();
        for _ in 0..syllables {
            let e = if rng.gen_bool(0.5) { 1i32 } else { -1 };
            let p = if rng.gen_bool(0.5) { 1i32 } else { 2 } * if rng.gen_bool(0.5) { 1 } else { -1 };
            for _ in 0..e.abs() {
                letters.push(Letter::new(1, e < 0));
            }
            for _ in 0..p.abs() {
                letters.push(Letter::new(0, p < 0));
            }
        }
        let w = cgtk::words::free_reduce(letters);
        let (cyc, _) = cgtk::words::cyclic_reduce(&w);
        let w = cyc.as_word();
        if w.is_empty() {
            continue;
        }
        if matches!(
            verify_strictly_reducible(alphabet, &[0], &[1], std::slice::from_ref(&w), 50),
            Ok(StrictlyReducible::Certified)
        ) {
            return w;
        }
    }
}

fn run_suites(seed: u64, records: bool) -> i32 {
    let mut report = Report::new();
    let mut failed = false;

    // Hanna Neumann: random U, cyclic W on a primitive word or a
    // certified strictly reducible relator.
    {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(1));
        let alphabet = Alphabet::new(["a", "b"]).unwrap();
        let mut passes = 0usize;
        for i in 0..100 {
            let u = random_subgroup(&mut rng, &alphabet, 3);
            let w_word = if i % 4 == 3 {
                random_strictly_reducible(&mut rng, &alphabet)
            } else {
                loop {
                    let w = random_cyclically_reduced(&mut rng, 2, 6);
                    let (cyc, _) = cgtk::words::cyclic_reduce(&w);
                    if cyc.is_primitive().unwrap_or(false) {
                        break w;
                    }
                }
            };
            let w = StallingsAutomaton::from_generators(&alphabet, &[w_word.clone()]);
            let r = hn_verdict(&u, &w, &[w_word.clone()], 200).expect("positive budget");
            if r.holds {
                passes += 1;
            } else {
                failed = true;
                report.push(
                    format!("suite.hn.failure.{i}"),
                    serialize_instance(&alphabet, &u.generators, &[w_word]),
                );
            }
        }
        report.push("suite.hn.pass", passes);
    }

    // SHNC on random pairs.
    {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(2));
        let alphabet = Alphabet::new(["a", "b"]).unwrap();
        let mut passes = 0usize;
        for i in 0..100 {
            let u = random_subgroup(&mut rng, &alphabet, 3);
            let w = random_subgroup(&mut rng, &alphabet, 3);
            let r = shnc_check(&u, &w).expect("common alphabet");
            if r.holds {
                passes += 1;
            } else {
                failed = true;
                report.push(
                    format!("suite.shnc.failure.{i}"),
                    serialize_instance(&alphabet, &u.generators, &w.generators),
                );
            }
        }
        report.push("suite.shnc.pass", passes);
    }

    // Fold confluence: the same wedge of words folded from shuffled
    // edge insertion orders gives label-isomorphic results.
    {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(3));
        let alphabet = Alphabet::new(["a", "b"]).unwrap();
        let mut passes = 0usize;
        for i in 0..30 {
            let n = rng.gen_range(1..=3);
            let words: Vec<Word> = (0..n).map(|_| random_reduced_word(&mut rng, 2, 6)).collect();
            let mut reference: Option<Vec<(usize, Letter, usize)>> = None;
            let mut ok = true;
            for _ in 0..5 {
                // Edge list of the wedge, inserted in a shuffled order.
                let mut edges: Vec<(usize, usize, Letter)> = Vec::new();
                let mut next = 1usize;
                for w in &words {
                    let mut prev = 0usize;
                    for (k, &l) in w.letters().iter().enumerate() {
                        let to = if k + 1 == w.len() { 0 } else { next };
                        if k + 1 != w.len() {
                            next += 1;
                        }
                        edges.push((prev, to, l));
                        prev = to;
                    }
                }
                for k in (1..edges.len()).rev() {
                    edges.swap(k, rng.gen_range(0..=k));
                }
                let mut g = SerreGraph::new(next);
                for &(s, t, l) in &edges {
                    g.add_edge(s, t, Some(l));
                }
                let (folded, _, base) = fold(&g, 0);
                let code = canonical_code(&folded, Some(base));
                match &reference {
                    None => reference = Some(code),
                    Some(r) => ok &= *r == code,
                }
            }
            if ok {
                passes += 1;
            } else {
                failed = true;
                report.push(
                    format!("suite.fold.failure.{i}"),
                    serialize_instance(&alphabet, &words, &[]),
                );
            }
        }
        report.push("suite.fold.pass", passes);
    }

    // Euler–Poincaré on random complexes.
    {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(4));
        let mut passes = 0usize;
        for i in 0..100 {
            let x = random_complex(&mut rng, 3, 3);
            let h = homology::homology(&x);
            if h.b0 as i64 - h.b1 as i64 + h.b2 as i64 == x.euler_char() {
                passes += 1;
            } else {
                failed = true;
                report.push(format!("suite.euler.failure.{i}"), format!("{x:?}"));
            }
        }
        report.push("suite.euler.pass", passes);
    }

    // Implication chain on random complexes: staggered ⇒ bireducible ⇒
    // reducible, collapsible ⇒ reducible.
    {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(5));
        let cap = complexes::DEFAULT_SUBSET_CAP;
        let mut passes = 0usize;
        for i in 0..100 {
            let x = random_complex(&mut rng, 3, 3);
            let reducible = complexes::is_reducible(&x, cap) == SubcomplexVerdict::True;
            let bireducible = complexes::is_bireducible(&x, cap) == SubcomplexVerdict::True;
            let collapsible = complexes::is_collapsible(&x, cap) == SubcomplexVerdict::True;
            let staggered = complexes::find_staggering(&x).is_some();
            let ok = (!staggered || bireducible)
                && (!bireducible || reducible)
                && (!collapsible || reducible);
            if ok {
                passes += 1;
            } else {
                failed = true;
                report.push(format!("suite.chain.failure.{i}"), format!("{x:?}"));
            }
        }
        report.push("suite.chain.pass", passes);
    }

    report.push("suite.seed", seed);
    report.verdict = if failed { "refuted".into() } else { "pass".into() };
    report.emit(records);
    i32::from(failed)
}

fn serialize_instance(alphabet: &Alphabet, u: &[Word], w: &[Word]) -> String {
    let us: Vec<String> = u.iter().map(|g| g.display(alphabet)).collect();
    let ws: Vec<String> = w.iter().map(|g| g.display(alphabet)).collect();
    format!("U=<{}> W=<{}>", us.join(", "), ws.join(", "))
}
