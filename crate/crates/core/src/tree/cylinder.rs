use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::model::TreeModel;
use super::word::{for_each_extension, word_index, BoundaryWord, Letter, ReducedWord};
use crate::error::{domain, Error, Result};
use crate::exact::ExactScalar;

/// `C(w)`: boundary words beginning with the nonempty reduced word `w`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Cylinder {
    prefix: ReducedWord,
}

impl Cylinder {
    pub fn new(prefix: ReducedWord) -> Result<Self> {
        if prefix.is_empty() {
            return domain("cylinder prefix must be nonempty");
        }
        Ok(Self { prefix })
    }

    pub fn prefix(&self) -> &ReducedWord {
        &self.prefix
    }

    pub fn depth(&self) -> usize {
        self.prefix.len()
    }

    pub fn measure(&self, model: &TreeModel) -> Result<ExactScalar> {
        model.cylinder_measure(&self.prefix)
    }

    pub fn contains(&self, b: &BoundaryWord) -> Result<bool> {
        Ok(b.match_length(&self.prefix)? == self.prefix.len())
    }
}

/// A finite disjoint union of cylinders, kept as a sorted antichain of
/// prefixes with complete sibling families merged into their parent.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CylinderSet {
    rank: u8,
    prefixes: Vec<ReducedWord>,
}

impl CylinderSet {
    pub fn new(rank: u8, prefixes: Vec<ReducedWord>) -> Result<Self> {
        for p in &prefixes {
            if p.is_empty() {
                return domain("cylinder prefix must be nonempty");
            }
            if p.min_rank() > rank {
                return domain(format!("prefix {p} uses generators beyond rank {rank}"));
            }
        }
        let mut s = Self { rank, prefixes };
        s.normalize();
        Ok(s)
    }

    pub fn empty(rank: u8) -> Self {
        Self {
            rank,
            prefixes: Vec::new(),
        }
    }

    pub fn whole(rank: u8) -> Self {
        let prefixes = (0..2 * rank).map(|l| ReducedWord::from_reduced_unchecked(vec![Letter(l)]));
        Self {
            rank,
            prefixes: prefixes.collect(),
        }
    }

    pub fn cylinder(rank: u8, prefix: ReducedWord) -> Result<Self> {
        Self::new(rank, vec![prefix])
    }

    pub fn rank(&self) -> u8 {
        self.rank
    }

    pub fn prefixes(&self) -> &[ReducedWord] {
        &self.prefixes
    }

    pub fn is_empty(&self) -> bool {
        self.prefixes.is_empty()
    }

    pub fn is_whole(&self) -> bool {
        self.prefixes.len() == 2 * self.rank as usize && self.depth() == 1
    }

    /// Deepest prefix length (0 for the empty set).
    pub fn depth(&self) -> usize {
        self.prefixes.iter().map(|p| p.len()).max().unwrap_or(0)
    }

    fn normalize(&mut self) {
        self.prefixes.sort();
        self.prefixes.dedup();
        let all = std::mem::take(&mut self.prefixes);
        let kept: Vec<ReducedWord> = all
            .iter()
            .filter(|p| !all.iter().any(|q| q.len() < p.len() && q.is_prefix_of(p)))
            .cloned()
            .collect();
        self.prefixes = kept;
        // Merge complete sibling families bottom-up.
        let m = 2 * self.rank as usize - 1;
        loop {
            let mut merged = false;
            let mut out: Vec<ReducedWord> = Vec::with_capacity(self.prefixes.len());
            let mut i = 0;
            while i < self.prefixes.len() {
                let p = &self.prefixes[i];
                if p.len() >= 2 {
                    let parent = p.prefix(p.len() - 1);
                    let j = self.prefixes[i..]
                        .iter()
                        .take_while(|q| q.len() == p.len() && parent.is_prefix_of(q))
                        .count();
                    if j == m {
                        out.push(parent);
                        i += j;
                        merged = true;
                        continue;
                    }
                }
                out.push(p.clone());
                i += 1;
            }
            out.sort();
            self.prefixes = out;
            if !merged {
                break;
            }
        }
    }

    /// Membership of a boundary word; errors if the word is too shallow to
    /// decide.
    pub fn contains(&self, b: &BoundaryWord) -> Result<bool> {
        for p in &self.prefixes {
            if b.match_length(p)? == p.len() {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// Membership of the cylinder `C(cell)`, which must be at least as deep
    /// as the set.
    pub fn contains_cell(&self, cell: &[Letter]) -> bool {
        debug_assert!(cell.len() >= self.depth());
        self.prefixes.iter().any(|p| cell.starts_with(p.letters()))
    }

    /// Indicator of the set on the depth-`n` cylinder partition, indexed by
    /// [`word_index`].
    pub fn indicator(&self, n: usize) -> Result<Vec<bool>> {
        if n < self.depth() || n == 0 {
            return domain(format!(
                "cannot resolve a depth-{} set at depth {n}",
                self.depth()
            ));
        }
        let size = super::word::sphere_size(self.rank, n) as usize;
        let mut out = vec![false; size];
        for p in &self.prefixes {
            for_each_extension(self.rank, p.letters(), n - p.len(), &mut |w| {
                out[word_index(self.rank, w)] = true;
            });
        }
        Ok(out)
    }

    fn from_indicator(rank: u8, n: usize, ind: &[bool]) -> Self {
        let mut prefixes = Vec::new();
        for_each_extension(rank, &[], n, &mut |w| {
            if ind[word_index(rank, w)] {
                prefixes.push(ReducedWord::from_reduced_unchecked(w.to_vec()));
            }
        });
        let mut s = Self { rank, prefixes };
        s.normalize();
        s
    }

    fn check_rank(&self, other: &Self) -> Result<()> {
        if self.rank != other.rank {
            return domain("cylinder sets over different ranks");
        }
        Ok(())
    }

    fn combine(&self, other: &Self, op: impl Fn(bool, bool) -> bool) -> Result<Self> {
        self.check_rank(other)?;
        let n = self.depth().max(other.depth()).max(1);
        let (a, b) = (self.indicator(n)?, other.indicator(n)?);
        let c: Vec<bool> = a.iter().zip(&b).map(|(&x, &y)| op(x, y)).collect();
        Ok(Self::from_indicator(self.rank, n, &c))
    }

    pub fn intersection(&self, other: &Self) -> Result<Self> {
        self.combine(other, |x, y| x && y)
    }

    pub fn union(&self, other: &Self) -> Result<Self> {
        self.combine(other, |x, y| x || y)
    }

    pub fn complement(&self) -> Self {
        self.combine(&Self::empty(self.rank), |x, _| !x).unwrap()
    }

    /// Exact `ν_p` of the set.
    pub fn measure(&self, model: &TreeModel) -> Result<ExactScalar> {
        if model.rank() != self.rank {
            return domain("set rank does not match the model");
        }
        Ok(self
            .prefixes
            .iter()
            .map(|p| model.depth_measure(p.len()))
            .sum())
    }

    /// `U(a) = {b : σ_p(b, U) < e^{−a}}`. A point outside `C(w)` that agrees
    /// with `w` for `j` letters sits at visual distance `e^{−j·edge}` from it,
    /// so `C(w)(a) = C(w[..⌊a/edge⌋+1])`.
    pub fn thicken(&self, a: f64, model: &TreeModel) -> Result<Self> {
        if !(a > 0.0) {
            return domain(format!("thickening parameter must be positive, got {a}"));
        }
        let keep = (a / model.edge_f64()).floor() as usize + 1;
        let prefixes = self
            .prefixes
            .iter()
            .map(|p| p.prefix(p.len().min(keep)))
            .collect();
        Self::new(self.rank, prefixes)
    }
}

impl fmt::Display for CylinderSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.prefixes.is_empty() {
            return write!(f, "∅");
        }
        let parts: Vec<String> = self.prefixes.iter().map(|p| p.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

impl fmt::Debug for CylinderSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CylinderSet({self})")
    }
}

/// Parses the set grammar for a given rank: comma-separated prefixes,
/// `*` for the whole boundary, `-` for the empty set, a leading `!` for the
/// complement of what follows.
pub fn parse_cylinder_set(rank: u8, s: &str) -> Result<CylinderSet> {
    let s = s.trim();
    if let Some(rest) = s.strip_prefix('!') {
        return Ok(parse_cylinder_set(rank, rest)?.complement());
    }
    match s {
        "*" | "all" => return Ok(CylinderSet::whole(rank)),
        "-" | "" | "none" => return Ok(CylinderSet::empty(rank)),
        _ => {}
    }
    let mut prefixes = Vec::new();
    for part in s.split(',') {
        let w = ReducedWord::from_str(part.trim())?;
        if w.is_empty() {
            return Err(Error::Parse(format!("empty prefix in set {s:?}")));
        }
        prefixes.push(w);
    }
    CylinderSet::new(rank, prefixes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::visual_distance;
    use crate::tree::model::random_word;
    use crate::tree::TreePoint;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn set(s: &str) -> CylinderSet {
        parse_cylinder_set(2, s).unwrap()
    }

    #[test]
    fn normalization_merges_siblings() {
        assert_eq!(set("aa,ab,aB"), set("a"));
        assert_eq!(set("a,ab"), set("a"));
        assert!(set("a,A,b,B").is_whole());
        assert_eq!(set("!a"), set("A,b,B"));
        assert!(set("!*").is_empty());
    }

    #[test]
    fn thicken_examples() {
        let m = TreeModel::free(2).unwrap();
        assert_eq!(set("a").thicken(1.5, &m).unwrap(), set("a"));
        assert_eq!(set("ab").thicken(0.5, &m).unwrap(), set("a"));
        assert_eq!(set("abba").thicken(2.0, &m).unwrap(), set("abb"));
        assert!(set("-").thicken(1.0, &m).unwrap().is_empty());
        // Nested a: the thickenings decrease to U itself.
        let u = set("abA,bb");
        let mut prev = u.thicken(0.1, &m).unwrap();
        for a in [0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 4.0] {
            let next = u.thicken(a, &m).unwrap();
            assert_eq!(next.intersection(&prev).unwrap(), next);
            prev = next;
        }
        assert_eq!(prev, u);
    }

    #[test]
    fn thicken_matches_visual_distance() {
        let m = TreeModel::free(2).unwrap();
        let e = TreePoint::vertex(ReducedWord::identity());
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..300 {
            let w = random_word(2, 1 + (rand::Rng::gen_range(&mut rng, 0..4)), &mut rng);
            let u = CylinderSet::cylinder(2, w.clone()).unwrap();
            let a = rand::Rng::gen_range(&mut rng, 0.05..5.0);
            let th = u.thicken(a, &m).unwrap();
            for cell in super::super::word::words_of_length(2, 6) {
                let b = BoundaryWord::extend_word(&cell).unwrap();
                // Outside C(w), every point of C(w) is at the same σ-distance from b.
                let inside = u.contains(&b).unwrap();
                let target = BoundaryWord::extend_word(&w).unwrap();
                let dist = if inside {
                    0.0
                } else {
                    visual_distance(&m, &b, &target, &e).unwrap()
                };
                assert_eq!(
                    th.contains(&b).unwrap(),
                    dist < (-a).exp(),
                    "w={w} a={a} b={b}"
                );
            }
        }
    }

    #[test]
    fn set_algebra_and_measure() {
        let m = TreeModel::free(2).unwrap();
        let u = set("a,bA");
        let v = set("ab,b");
        assert_eq!(u.intersection(&v).unwrap(), set("ab,bA"));
        let total = u.measure(&m).unwrap() + u.complement().measure(&m).unwrap();
        assert_eq!(total, ExactScalar::one());
        assert_eq!(set("a").measure(&m).unwrap(), ExactScalar::ratio(1, 4));
        assert_eq!(set("ab").measure(&m).unwrap(), ExactScalar::ratio(1, 12));
        assert!(matches!(
            u.contains(&"b".parse().unwrap()),
            Err(Error::InsufficientDepth { .. })
        ));
    }
}
