//! Counting reduced words with prescribed ends through powers of the
//! letter-adjacency matrix.

use super::word::{Letter, ReducedWord};
use crate::error::{domain, Result};

/// The set of letters allowed at one end of a word.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LetterConstraint {
    mask: u32,
}

impl LetterConstraint {
    pub fn any(rank: u8) -> Self {
        Self {
            mask: (1u32 << (2 * rank)) - 1,
        }
    }

    pub fn letter(l: Letter) -> Self {
        Self { mask: 1 << l.0 }
    }

    pub fn from_letters(ls: impl IntoIterator<Item = Letter>) -> Self {
        Self {
            mask: ls.into_iter().fold(0, |m, l| m | 1 << l.0),
        }
    }

    pub fn allows(&self, l: Letter) -> bool {
        self.mask >> l.0 & 1 == 1
    }
}

type Matrix = Vec<Vec<u128>>;

/// `M[i][j] = 1` unless letter `j` is the inverse of letter `i`.
pub fn transfer_matrix(rank: u8) -> Vec<Vec<u128>> {
    let n = 2 * rank as usize;
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| u128::from(!Letter(i as u8).is_inverse_of(Letter(j as u8))))
                .collect()
        })
        .collect()
}

fn mat_mul(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    let n = a.len();
    let mut c = vec![vec![0u128; n]; n];
    for i in 0..n {
        for k in 0..n {
            if a[i][k] == 0 {
                continue;
            }
            for j in 0..n {
                let t = a[i][k]
                    .checked_mul(b[k][j])
                    .and_then(|t| c[i][j].checked_add(t));
                match t {
                    Some(t) => c[i][j] = t,
                    None => return domain("word count overflows 128 bits"),
                }
            }
        }
    }
    Ok(c)
}

fn mat_pow(rank: u8, mut e: usize) -> Result<Matrix> {
    let n = 2 * rank as usize;
    let mut result: Matrix = (0..n)
        .map(|i| (0..n).map(|j| u128::from(i == j)).collect())
        .collect();
    let mut base = transfer_matrix(rank);
    while e > 0 {
        if e & 1 == 1 {
            result = mat_mul(&result, &base)?;
        }
        e >>= 1;
        if e > 0 {
            base = mat_mul(&base, &base)?;
        }
    }
    Ok(result)
}

/// Number of reduced words of length `n ≥ 1` whose first letter satisfies
/// `first` and whose last letter satisfies `last`: `Σ (M^{n−1})[f][l]`.
pub fn transfer_matrix_count(
    rank: u8,
    first: LetterConstraint,
    last: LetterConstraint,
    n: usize,
) -> Result<u128> {
    if n == 0 {
        return domain("word length must be at least 1");
    }
    let p = mat_pow(rank, n - 1)?;
    let mut total = 0u128;
    for (f, row) in p.iter().enumerate() {
        if !first.allows(Letter(f as u8)) {
            continue;
        }
        for (l, &v) in row.iter().enumerate() {
            if last.allows(Letter(l as u8)) {
                total += v;
            }
        }
    }
    Ok(total)
}

/// Number of reduced words of length `n` that begin with `prefix` and end
/// with `suffix`.
pub fn count_prefix_suffix(
    rank: u8,
    prefix: &ReducedWord,
    suffix: &ReducedWord,
    n: usize,
) -> Result<u128> {
    let (u, v) = (prefix.letters(), suffix.letters());
    if u.len() + v.len() <= n {
        return match (u.last(), v.first()) {
            (None, None) => Ok(super::word::sphere_size(rank, n)),
            (Some(&a), None) => {
                if n == u.len() {
                    return Ok(1);
                }
                let nexts = LetterConstraint::from_letters(
                    (0..2 * rank).map(Letter).filter(|l| !l.is_inverse_of(a)),
                );
                transfer_matrix_count(rank, nexts, LetterConstraint::any(rank), n - u.len())
            }
            (None, Some(&b)) => {
                if n == v.len() {
                    return Ok(1);
                }
                let prevs = LetterConstraint::from_letters(
                    (0..2 * rank).map(Letter).filter(|l| !l.is_inverse_of(b)),
                );
                transfer_matrix_count(rank, LetterConstraint::any(rank), prevs, n - v.len())
            }
            (Some(&a), Some(&b)) => {
                let gap = n - u.len() - v.len();
                Ok(mat_pow(rank, gap + 1)?[a.index()][b.index()])
            }
        };
    }
    // Prefix and suffix overlap: the word is determined, check consistency.
    if u.len() > n || v.len() > n {
        return Ok(0);
    }
    let mut letters = u.to_vec();
    letters.extend_from_slice(&v[u.len() + v.len() - n..]);
    let overlap_ok = v[..u.len() + v.len() - n] == u[n - v.len()..];
    let reduced = letters.windows(2).all(|w| !w[0].is_inverse_of(w[1]));
    Ok(u128::from(overlap_ok && reduced))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::word::{sphere_size, words_of_length};

    fn l(c: char) -> Letter {
        Letter::from_char(c).unwrap()
    }

    #[test]
    fn examples() {
        let (b, a_inv) = (
            LetterConstraint::letter(l('b')),
            LetterConstraint::letter(l('A')),
        );
        assert_eq!(transfer_matrix_count(2, b, a_inv, 1).unwrap(), 0);
        assert_eq!(transfer_matrix_count(2, b, a_inv, 2).unwrap(), 1);
        assert_eq!(transfer_matrix_count(2, b, a_inv, 3).unwrap(), 2);
        assert_eq!(transfer_matrix_count(2, b, a_inv, 4).unwrap(), 7);
        assert!(transfer_matrix_count(2, b, a_inv, 0).is_err());
    }

    #[test]
    fn matches_enumeration() {
        for rank in 1..=3u8 {
            for n in 1..=6 {
                let words = words_of_length(rank, n);
                assert_eq!(
                    transfer_matrix_count(
                        rank,
                        LetterConstraint::any(rank),
                        LetterConstraint::any(rank),
                        n
                    )
                    .unwrap(),
                    sphere_size(rank, n)
                );
                for f in 0..2 * rank {
                    for g in 0..2 * rank {
                        let brute = words
                            .iter()
                            .filter(|w| w.first() == Some(Letter(f)) && w.last() == Some(Letter(g)))
                            .count() as u128;
                        let c = transfer_matrix_count(
                            rank,
                            LetterConstraint::letter(Letter(f)),
                            LetterConstraint::letter(Letter(g)),
                            n,
                        )
                        .unwrap();
                        assert_eq!(c, brute);
                    }
                }
            }
        }
    }

    #[test]
    fn prefix_suffix_matches_enumeration() {
        let samples = ["", "a", "ab", "bA", "aBa", "BB"];
        for n in 0..=6 {
            let words = words_of_length(2, n);
            for p in samples {
                for s in samples {
                    let (p, s): (ReducedWord, ReducedWord) =
                        (p.parse().unwrap(), s.parse().unwrap());
                    let brute = words
                        .iter()
                        .filter(|w| {
                            w.letters().starts_with(p.letters())
                                && w.letters().ends_with(s.letters())
                        })
                        .count() as u128;
                    assert_eq!(
                        count_prefix_suffix(2, &p, &s, n).unwrap(),
                        brute,
                        "{p} {s} {n}"
                    );
                }
            }
        }
    }
}
