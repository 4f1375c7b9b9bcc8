//! Reduced words in a free group and the boundary words they converge to.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A generator or inverse generator. Generator `g` is `2g`, its inverse `2g+1`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Letter(pub u8);

impl Letter {
    pub fn generator(g: u8) -> Self {
        Letter(2 * g)
    }

    pub fn inverse(self) -> Self {
        Letter(self.0 ^ 1)
    }

    pub fn is_inverse_of(self, other: Letter) -> bool {
        self.0 ^ 1 == other.0
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn to_char(self) -> char {
        let base = b'a' + self.0 / 2;
        if self.0 & 1 == 0 {
            base as char
        } else {
            base.to_ascii_uppercase() as char
        }
    }

    pub fn from_char(c: char) -> Option<Self> {
        if c.is_ascii_lowercase() {
            Some(Letter((c as u8 - b'a') * 2))
        } else if c.is_ascii_uppercase() {
            Some(Letter((c as u8 - b'A') * 2 + 1))
        } else {
            None
        }
    }
}

impl fmt::Debug for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_char())
    }
}

/// A freely reduced word. The empty word is the identity / the basepoint.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ReducedWord {
    letters: Vec<Letter>,
}

impl ReducedWord {
    pub fn identity() -> Self {
        Self::default()
    }

    /// Checked constructor: rejects adjacent inverse pairs.
    pub fn new(letters: Vec<Letter>) -> Result<Self> {
        if letters.windows(2).any(|w| w[0].is_inverse_of(w[1])) {
            return Err(Error::Parse(format!(
                "word {} is not reduced",
                letters.iter().map(|l| l.to_char()).collect::<String>()
            )));
        }
        Ok(Self { letters })
    }

    /// Free reduction of an arbitrary letter sequence.
    pub fn reduce(letters: impl IntoIterator<Item = Letter>) -> Self {
        let mut out: Vec<Letter> = Vec::new();
        for l in letters {
            if out.last().is_some_and(|&p| p.is_inverse_of(l)) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Self { letters: out }
    }

    pub(crate) fn from_reduced_unchecked(letters: Vec<Letter>) -> Self {
        Self { letters }
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

    pub fn first(&self) -> Option<Letter> {
        self.letters.first().copied()
    }

    pub fn last(&self) -> Option<Letter> {
        self.letters.last().copied()
    }

    pub fn inverse(&self) -> Self {
        Self {
            letters: self.letters.iter().rev().map(|l| l.inverse()).collect(),
        }
    }

    pub fn mul(&self, other: &ReducedWord) -> Self {
        Self::reduce(self.letters.iter().chain(other.letters.iter()).copied())
    }

    pub fn prefix(&self, n: usize) -> Self {
        Self {
            letters: self.letters[..n.min(self.len())].to_vec(),
        }
    }

    /// Length of the common prefix.
    pub fn common_prefix(&self, other: &ReducedWord) -> usize {
        self.letters
            .iter()
            .zip(&other.letters)
            .take_while(|(a, b)| a == b)
            .count()
    }

    pub fn is_prefix_of(&self, other: &ReducedWord) -> bool {
        self.len() <= other.len() && self.common_prefix(other) == self.len()
    }

    /// Cyclic reduction: strip matching inverse letters from both ends.
    /// Returns the conjugator `w` and the cyclically reduced core `u` with
    /// `self = w u w⁻¹`.
    pub fn cyclic_reduction(&self) -> (ReducedWord, ReducedWord) {
        let l = &self.letters;
        let mut i = 0;
        while i < l.len() / 2 && l[i].is_inverse_of(l[l.len() - 1 - i]) {
            i += 1;
        }
        (
            Self {
                letters: l[..i].to_vec(),
            },
            Self {
                letters: l[i..l.len() - i].to_vec(),
            },
        )
    }

    /// Max letter index + 1 needed to spell this word, i.e. the minimal rank.
    pub fn min_rank(&self) -> u8 {
        self.letters.iter().map(|l| l.0 / 2 + 1).max().unwrap_or(0)
    }
}

impl fmt::Display for ReducedWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "e");
        }
        for l in &self.letters {
            write!(f, "{}", l.to_char())?;
        }
        Ok(())
    }
}

impl fmt::Debug for ReducedWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

fn parse_letters(s: &str) -> Result<Vec<Letter>> {
    s.chars()
        .map(|c| Letter::from_char(c).ok_or_else(|| Error::Parse(format!("bad letter {c:?}"))))
        .collect()
}

impl FromStr for ReducedWord {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() || s == "e" || s == "1" {
            return Ok(Self::identity());
        }
        Self::new(parse_letters(s)?)
    }
}

/// A point of the tree boundary: an infinite reduced word given as a finite
/// prefix followed by a repeating cycle. An empty cycle means the word is
/// only known to `prefix.len()` letters (a truncated boundary point).
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BoundaryWord {
    prefix: Vec<Letter>,
    cycle: Vec<Letter>,
}

impl BoundaryWord {
    pub fn new(prefix: Vec<Letter>, cycle: Vec<Letter>) -> Result<Self> {
        let all: Vec<Letter> = prefix.iter().chain(cycle.iter()).copied().collect();
        if all.windows(2).any(|w| w[0].is_inverse_of(w[1])) {
            return Err(Error::Parse("boundary word is not reduced".into()));
        }
        if cycle.len() > 0 && cycle[cycle.len() - 1].is_inverse_of(cycle[0]) {
            return Err(Error::Parse(
                "boundary cycle is not cyclically reduced".into(),
            ));
        }
        Ok(Self { prefix, cycle })
    }

    /// Truncated boundary point known to `prefix.len()` letters.
    pub fn truncated(prefix: Vec<Letter>) -> Result<Self> {
        Self::new(prefix, Vec::new())
    }

    /// `w ℓ ℓ ℓ …` where `ℓ` is the last letter of `w`: the canonical ray
    /// extension of the geodesic from the identity to `w`.
    pub fn extend_word(w: &ReducedWord) -> Result<Self> {
        let last = w
            .last()
            .ok_or_else(|| Error::Domain("the identity has no boundary direction".into()))?;
        Ok(Self {
            prefix: w.letters().to_vec(),
            cycle: vec![last],
        })
    }

    /// `ℓ ℓ ℓ …`.
    pub fn constant(l: Letter) -> Self {
        Self {
            prefix: Vec::new(),
            cycle: vec![l],
        }
    }

    pub fn prefix_letters(&self) -> &[Letter] {
        &self.prefix
    }

    pub fn cycle_letters(&self) -> &[Letter] {
        &self.cycle
    }

    pub fn is_infinite(&self) -> bool {
        !self.cycle.is_empty()
    }

    /// Number of known letters (`None` = all of them).
    pub fn known_depth(&self) -> Option<usize> {
        if self.cycle.is_empty() {
            Some(self.prefix.len())
        } else {
            None
        }
    }

    pub fn letter(&self, i: usize) -> Option<Letter> {
        if i < self.prefix.len() {
            Some(self.prefix[i])
        } else if self.cycle.is_empty() {
            None
        } else {
            Some(self.cycle[(i - self.prefix.len()) % self.cycle.len()])
        }
    }

    pub fn require_depth(&self, depth: usize) -> Result<()> {
        match self.known_depth() {
            Some(avail) if avail < depth => Err(Error::InsufficientDepth {
                required: depth,
                available: avail,
            }),
            _ => Ok(()),
        }
    }

    /// First `n` letters as a word.
    pub fn head(&self, n: usize) -> Result<ReducedWord> {
        self.require_depth(n)?;
        Ok(ReducedWord::from_reduced_unchecked(
            (0..n).map(|i| self.letter(i).unwrap()).collect(),
        ))
    }

    /// Common prefix length with another boundary point. Equal points have an
    /// infinite common prefix and yield [`Error::InfiniteProduct`].
    pub fn common_prefix(&self, other: &BoundaryWord) -> Result<usize> {
        let bound = match (self.known_depth(), other.known_depth()) {
            (None, None) => {
                let p = self.prefix.len().max(other.prefix.len());
                p + lcm(self.cycle.len(), other.cycle.len())
            }
            (Some(a), Some(b)) => a.min(b),
            (Some(a), None) | (None, Some(a)) => a,
        };
        for i in 0..bound {
            if self.letter(i) != other.letter(i) {
                return Ok(i);
            }
        }
        match (self.known_depth(), other.known_depth()) {
            (None, None) => Err(Error::InfiniteProduct),
            (a, b) => {
                let avail = a.unwrap_or(usize::MAX).min(b.unwrap_or(usize::MAX));
                Err(Error::InsufficientDepth {
                    required: avail + 1,
                    available: avail,
                })
            }
        }
    }

    /// Common prefix with a finite word, capped at the word's length.
    pub fn match_length(&self, w: &ReducedWord) -> Result<usize> {
        for (i, &l) in w.letters().iter().enumerate() {
            match self.letter(i) {
                Some(b) if b == l => continue,
                Some(_) => return Ok(i),
                None => {
                    return Err(Error::InsufficientDepth {
                        required: i + 1,
                        available: i,
                    })
                }
            }
        }
        Ok(w.len())
    }

    /// Left action `γ·b`.
    pub fn act(&self, g: &ReducedWord) -> BoundaryWord {
        let mut prefix = self.prefix.clone();
        if !self.cycle.is_empty() {
            // Unroll enough of the cycle that cancellation never reaches it.
            let mut i = 0;
            while prefix.len() < g.len() + 1 {
                prefix.push(self.cycle[i % self.cycle.len()]);
                i += 1;
            }
            let mut cycle = self.cycle.clone();
            cycle.rotate_left(i % self.cycle.len());
            let reduced = ReducedWord::reduce(g.letters().iter().copied().chain(prefix));
            return BoundaryWord {
                prefix: reduced.letters,
                cycle,
            };
        }
        let reduced = ReducedWord::reduce(g.letters().iter().copied().chain(prefix));
        BoundaryWord {
            prefix: reduced.letters,
            cycle: Vec::new(),
        }
    }
}

fn lcm(a: usize, b: usize) -> usize {
    num_integer::lcm(a.max(1), b.max(1))
}

impl fmt::Display for BoundaryWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.prefix {
            write!(f, "{}", l.to_char())?;
        }
        if !self.cycle.is_empty() {
            write!(f, "(")?;
            for l in &self.cycle {
                write!(f, "{}", l.to_char())?;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl fmt::Debug for BoundaryWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// `"ab(b)"` is `abbb…`; `"ab"` without parentheses is a truncated point.
impl FromStr for BoundaryWord {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s.find('(') {
            Some(i) => {
                let rest = s[i + 1..]
                    .strip_suffix(')')
                    .ok_or_else(|| Error::Parse(format!("unterminated cycle in {s:?}")))?;
                let cycle = parse_letters(rest)?;
                if cycle.is_empty() {
                    return Err(Error::Parse("empty cycle".into()));
                }
                Self::new(parse_letters(&s[..i])?, cycle)
            }
            None => Self::truncated(parse_letters(s)?),
        }
    }
}

/// Number of reduced words of length `n` in `F_k`.
pub fn sphere_size(rank: u8, n: usize) -> u128 {
    if n == 0 {
        return 1;
    }
    let m = 2 * rank as u128 - 1;
    2 * rank as u128 * m.pow(n as u32 - 1)
}

/// Position of a reduced word among the reduced words of its length, in
/// lexicographic order (`a < A < b < B < …`).
pub fn word_index(rank: u8, letters: &[Letter]) -> usize {
    let m = 2 * rank as usize - 1;
    let mut idx = 0usize;
    for (i, &l) in letters.iter().enumerate() {
        let digit = if i == 0 {
            l.index()
        } else {
            let forbidden = letters[i - 1].inverse().index();
            if l.index() > forbidden {
                l.index() - 1
            } else {
                l.index()
            }
        };
        idx = idx * if i == 0 { 1 } else { m } + digit;
    }
    idx
}

/// Inverse of [`word_index`].
pub fn word_at(rank: u8, n: usize, mut idx: usize) -> ReducedWord {
    let m = 2 * rank as usize - 1;
    let mut digits = vec![0usize; n];
    for i in (1..n).rev() {
        digits[i] = idx % m;
        idx /= m;
    }
    if n > 0 {
        digits[0] = idx;
    }
    let mut letters: Vec<Letter> = Vec::with_capacity(n);
    for (i, &d) in digits.iter().enumerate() {
        let l = if i == 0 {
            d
        } else {
            let forbidden = letters[i - 1].inverse().index();
            if d >= forbidden {
                d + 1
            } else {
                d
            }
        };
        letters.push(Letter(l as u8));
    }
    ReducedWord::from_reduced_unchecked(letters)
}

/// Visit every reduced continuation of `start` by `extra` letters, in
/// lexicographic order. The callback receives the full letter buffer.
pub fn for_each_extension(rank: u8, start: &[Letter], extra: usize, f: &mut dyn FnMut(&[Letter])) {
    let mut buf: Vec<Letter> = start.to_vec();
    extend_rec(rank, &mut buf, extra, f);
}

fn extend_rec(rank: u8, buf: &mut Vec<Letter>, extra: usize, f: &mut dyn FnMut(&[Letter])) {
    if extra == 0 {
        f(buf);
        return;
    }
    let forbidden = buf.last().map(|l| l.inverse());
    for l in 0..2 * rank {
        let l = Letter(l);
        if Some(l) == forbidden {
            continue;
        }
        buf.push(l);
        extend_rec(rank, buf, extra - 1, f);
        buf.pop();
    }
}

/// All reduced words of length `n`, lexicographically ordered.
pub fn words_of_length(rank: u8, n: usize) -> Vec<ReducedWord> {
    let mut out = Vec::with_capacity(sphere_size(rank, n) as usize);
    for_each_extension(rank, &[], n, &mut |w| {
        out.push(ReducedWord::from_reduced_unchecked(w.to_vec()))
    });
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> ReducedWord {
        s.parse().unwrap()
    }

    fn b(s: &str) -> BoundaryWord {
        s.parse().unwrap()
    }

    #[test]
    fn parse_and_reduce() {
        assert_eq!(w("aB").to_string(), "aB");
        assert!("aA".parse::<ReducedWord>().is_err());
        assert_eq!(
            ReducedWord::reduce(
                w("abA")
                    .letters()
                    .iter()
                    .copied()
                    .chain(w("aB").letters().iter().copied())
            ),
            w("a")
        );
        assert_eq!(w("ab").mul(&w("ab").inverse()), ReducedWord::identity());
        assert!("aB(b)".parse::<BoundaryWord>().is_err());
        assert!("(aA)".parse::<BoundaryWord>().is_err());
    }

    #[test]
    fn index_roundtrip_is_lexicographic() {
        for n in 1..5 {
            let ws = words_of_length(2, n);
            assert_eq!(ws.len() as u128, sphere_size(2, n));
            for (i, x) in ws.iter().enumerate() {
                assert_eq!(word_index(2, x.letters()), i);
                assert_eq!(&word_at(2, n, i), x);
            }
            let mut sorted = ws.clone();
            sorted.sort();
            assert_eq!(sorted, ws);
        }
    }

    #[test]
    fn boundary_prefixes() {
        assert_eq!(b("(a)").common_prefix(&b("a(b)")).unwrap(), 1);
        assert_eq!(
            b("(ab)").common_prefix(&b("ab(ab)")).unwrap_err(),
            Error::InfiniteProduct
        );
        assert!(matches!(
            b("aba").common_prefix(&b("ab(a)")),
            Err(Error::InsufficientDepth { .. })
        ));
        assert_eq!(b("(ab)").match_length(&w("ab")).unwrap(), 2);
        assert_eq!(b("(b)").match_length(&w("ab")).unwrap(), 0);
    }

    #[test]
    fn action_on_boundary() {
        let x = b("ab(b)");
        assert_eq!(x.act(&w("B")).to_string(), "Bab(b)");
        assert_eq!(
            x.act(&w("A")).common_prefix(&b("(b)")).unwrap_err(),
            Error::InfiniteProduct
        );
        let y = b("(ab)").act(&w("BA"));
        assert_eq!(
            y.common_prefix(&b("(ab)")).unwrap_err(),
            Error::InfiniteProduct
        );
    }

    #[test]
    fn cyclic_reduction_splits_conjugator() {
        let (c, u) = w("abA").cyclic_reduction();
        assert_eq!(c, w("a"));
        assert_eq!(u, w("b"));
        let (c, u) = w("ab").cyclic_reduction();
        assert!(c.is_empty());
        assert_eq!(u, w("ab"));
    }
}
