//! Free-group word calculus: free and cyclic reduction, primitivity,
//! exponent sums and syllable decompositions over a fixed alphabet.

use crate::error::Error;
use std::fmt;

/// A finite generating alphabet. Generator ids are dense `0..len`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet {
    names: Vec<String>,
}

impl Alphabet {
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Result<Self, Error> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        for (i, n) in names.iter().enumerate() {
            if n.is_empty() || n.contains(|c: char| c.is_whitespace() || c == '^') {
                return Err(Error::Alphabet(format!("bad generator name {:?}", n)));
            }
            if names[..i].contains(n) {
                return Err(Error::Alphabet(format!("duplicate generator {:?}", n)));
            }
        }
        Ok(Alphabet { names })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, id: usize) -> &str {
        &self.names[id]
    }

    pub fn id(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }
}

/// A signed generator occurrence. Ordering is shortlex-compatible:
/// positive letters sort before their inverses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter {
    pub gen: usize,
    pub inv: bool,
}

impl Letter {
    pub fn new(gen: usize, inv: bool) -> Self {
        Letter { gen, inv }
    }

    pub fn inverse(self) -> Self {
        Letter { gen: self.gen, inv: !self.inv }
    }

    pub fn is_inverse_of(self, other: Letter) -> bool {
        self.gen == other.gen && self.inv != other.inv
    }
}

/// A freely reduced word.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Word {
    letters: Vec<Letter>,
}

/// Freely reduce a raw letter sequence.
pub fn free_reduce(raw: impl IntoIterator<Item = Letter>) -> Word {
    let mut stack: Vec<Letter> = Vec::new();
    for l in raw {
        match stack.last() {
            Some(&top) if top.is_inverse_of(l) => {
                stack.pop();
            }
            _ => stack.push(l),
        }
    }
    Word { letters: stack }
}

impl Word {
    pub fn empty() -> Self {
        Word { letters: Vec::new() }
    }

    pub fn from_letters(raw: impl IntoIterator<Item = Letter>) -> Self {
        free_reduce(raw)
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn inverse(&self) -> Word {
        Word { letters: self.letters.iter().rev().map(|l| l.inverse()).collect() }
    }

    pub fn concat(&self, other: &Word) -> Word {
        free_reduce(self.letters.iter().chain(other.letters.iter()).copied())
    }

    /// Signed count of occurrences of generator `gen`.
    pub fn exponent_sum(&self, gen: usize) -> i64 {
        self.letters
            .iter()
            .filter(|l| l.gen == gen)
            .map(|l| if l.inv { -1i64 } else { 1 })
            .sum()
    }

    /// Generators that actually occur.
    pub fn support(&self) -> Vec<usize> {
        let mut seen: Vec<usize> = self.letters.iter().map(|l| l.gen).collect();
        seen.sort_unstable();
        seen.dedup();
        seen
    }

    /// Parse whitespace-separated tokens `g`, `g^-1`, `g^k` over `alphabet`.
    pub fn parse(alphabet: &Alphabet, text: &str) -> Result<Word, Error> {
        let mut raw = Vec::new();
        for tok in text.split_whitespace() {
            if tok == "1" {
                continue; // empty-word token
            }
            let (name, exp) = match tok.split_once('^') {
                None => (tok, 1i64),
                Some((n, e)) => {
                    let e: i64 = e
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad exponent in token {:?}", tok)))?;
                    if e == 0 {
                        return Err(Error::Parse(format!("zero exponent in token {:?}", tok)));
                    }
                    (n, e)
                }
            };
            let gen = alphabet
                .id(name)
                .ok_or_else(|| Error::Alphabet(format!("unknown generator {:?}", name)))?;
            let letter = Letter::new(gen, exp < 0);
            for _ in 0..exp.unsigned_abs() {
                raw.push(letter);
            }
        }
        Ok(free_reduce(raw))
    }

    /// Render in the `g g^-1 g^k` token syntax, run-length compressed.
    pub fn display(&self, alphabet: &Alphabet) -> String {
        let mut out: Vec<String> = Vec::new();
        let mut i = 0;
        while i < self.letters.len() {
            let l = self.letters[i];
            let mut j = i;
            while j < self.letters.len() && self.letters[j] == l {
                j += 1;
            }
            let k = (j - i) as i64 * if l.inv { -1 } else { 1 };
            if k == 1 {
                out.push(alphabet.name(l.gen).to_string());
            } else {
                out.push(format!("{}^{}", alphabet.name(l.gen), k));
            }
            i = j;
        }
        if out.is_empty() {
            "1".to_string()
        } else {
            out.join(" ")
        }
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "1");
        }
        for l in &self.letters {
            write!(f, "{}{}", if l.inv { "-" } else { "+" }, l.gen)?;
        }
        Ok(())
    }
}

/// A cyclically reduced word stored in its lexicographically least rotation.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CyclicWord {
    letters: Vec<Letter>,
}

fn least_rotation(letters: &[Letter]) -> Vec<Letter> {
    if letters.is_empty() {
        return Vec::new();
    }
    let n = letters.len();
    let mut best = 0usize;
    for cand in 1..n {
        for k in 0..n {
            let a = letters[(best + k) % n];
            let b = letters[(cand + k) % n];
            if b < a {
                best = cand;
                break;
            }
            if a < b {
                break;
            }
        }
    }
    (0..n).map(|k| letters[(best + k) % n]).collect()
}

impl CyclicWord {
    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// A `Word` spelling the canonical rotation.
    pub fn as_word(&self) -> Word {
        Word { letters: self.letters.clone() }
    }

    pub fn display(&self, alphabet: &Alphabet) -> String {
        self.as_word().display(alphabet)
    }

    /// Whether the canonical-rotation spelling is a proper power, with the
    /// primitive root and maximal exponent.
    pub fn primitive_decomposition(&self) -> Result<(bool, CyclicWord, usize), Error> {
        if self.letters.is_empty() {
            return Err(Error::Degenerate("empty cyclic word".into()));
        }
        let n = self.letters.len();
        for p in 1..=n {
            if n % p != 0 {
                continue;
            }
            if (0..n).all(|i| self.letters[i] == self.letters[(i + p) % n]) {
                let root = CyclicWord { letters: least_rotation(&self.letters[..p]) };
                return Ok((p == n, root, n / p));
            }
        }
        unreachable!("period n always works");
    }

    pub fn is_primitive(&self) -> Result<bool, Error> {
        Ok(self.primitive_decomposition()?.0)
    }
}

/// Cyclically reduce `w`, returning `(c, conj)` with `w = conj c conj^-1`
/// after free reduction.
pub fn cyclic_reduce(w: &Word) -> (CyclicWord, Word) {
    let mut letters = w.letters.clone();
    let mut conj: Vec<Letter> = Vec::new();
    while letters.len() >= 2 && letters[0].is_inverse_of(*letters.last().unwrap()) {
        conj.push(letters[0]);
        letters.remove(0);
        letters.pop();
    }
    // Re-rotate to the canonical rotation, folding the offset into conj.
    let canon = least_rotation(&letters);
    let n = letters.len();
    if n > 0 {
        let offset = (0..n)
            .find(|&r| (0..n).all(|k| letters[(r + k) % n] == canon[k]))
            .unwrap();
        conj.extend_from_slice(&letters[..offset]);
    }
    (CyclicWord { letters: canon }, Word { letters: conj })
}

/// One alternating block of a syllable decomposition: a word over the
/// complement alphabet followed by a nonzero power of the singled-out
/// generator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Syllable {
    pub stable_part: Word,
    pub power_part: Word,
}

/// Decompose a cyclically reduced word as `a_1 b_1 ... a_s b_s` with each
/// `a_i` over the complement of `x` and each `b_i` a nonzero power of `x`,
/// up to rotation. `s` is minimal because runs are taken maximal.
pub fn syllable_decomposition(w: &CyclicWord, x: usize) -> Result<Vec<Syllable>, Error> {
    let letters = w.letters();
    if letters.is_empty() {
        return Err(Error::Degenerate("empty cyclic word".into()));
    }
    let has_x = letters.iter().any(|l| l.gen == x);
    let has_other = letters.iter().any(|l| l.gen != x);
    if !has_x || !has_other {
        return Err(Error::NoAlternation);
    }
    let n = letters.len();
    // Rotate so position 0 starts a maximal non-x run.
    let start = (0..n)
        .find(|&i| letters[i].gen != x && letters[(i + n - 1) % n].gen == x)
        .unwrap();
    let rotated: Vec<Letter> = (0..n).map(|k| letters[(start + k) % n]).collect();
    let mut syllables = Vec::new();
    let mut i = 0;
    while i < n {
        let mut a = Vec::new();
        while i < n && rotated[i].gen != x {
            a.push(rotated[i]);
            i += 1;
        }
        let mut b = Vec::new();
        while i < n && rotated[i].gen == x {
            b.push(rotated[i]);
            i += 1;
        }
        debug_assert!(!a.is_empty() && !b.is_empty());
        syllables.push(Syllable {
            stable_part: Word { letters: a },
            power_part: Word { letters: b },
        });
    }
    Ok(syllables)
}
