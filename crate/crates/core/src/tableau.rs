//! One-row semistandard tableaux (elements of the symmetric-power crystal `B_k`)
//! and ordered tensor words built from them.

use std::fmt;

use crate::error::{Error, Result};

/// An element of `B_k` over the alphabet `{1..n}`, stored as letter counts.
///
/// `counts[i]` is the multiplicity of letter `i + 1`; the capacity `k` is the
/// total. The row word is implied and always weakly increasing.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Tableau {
    counts: Vec<u32>,
}

impl Tableau {
    /// The empty tableau over `{1..n}`. Only used as an internal sentinel.
    pub fn empty(n: usize) -> Self {
        Tableau { counts: vec![0; n] }
    }

    pub fn from_counts(counts: Vec<u32>) -> Self {
        Tableau { counts }
    }

    /// `letter^k`, the tableau filled with a single repeated letter.
    pub fn uniform(n: usize, letter: usize, k: usize) -> Result<Self> {
        check_letter(letter, n)?;
        let mut counts = vec![0; n];
        counts[letter - 1] = k as u32;
        Ok(Tableau { counts })
    }

    pub fn from_letters(n: usize, letters: &[usize]) -> Result<Self> {
        let mut counts = vec![0; n];
        for &l in letters {
            check_letter(l, n)?;
            counts[l - 1] += 1;
        }
        Ok(Tableau { counts })
    }

    /// Parses a row such as `"2233"`. Alphabets beyond 9 letters use
    /// comma-separated integers (`"3,10,10"`).
    pub fn parse(s: &str, n: usize) -> Result<Self> {
        let s = s.trim();
        let letters: Vec<usize> = if s.contains(',') {
            s.split(',')
                .map(|t| {
                    t.trim()
                        .parse::<usize>()
                        .map_err(|_| Error::Parse(format!("bad letter {t:?} in {s:?}")))
                })
                .collect::<Result<_>>()?
        } else {
            s.chars()
                .map(|c| {
                    c.to_digit(10)
                        .map(|d| d as usize)
                        .ok_or_else(|| Error::Parse(format!("bad letter {c:?} in {s:?}")))
                })
                .collect::<Result<_>>()?
        };
        if letters.is_empty() {
            return Err(Error::Parse("empty tableau".into()));
        }
        if letters.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::Parse(format!("row {s:?} is not weakly increasing")));
        }
        Tableau::from_letters(n, &letters)
    }

    /// Alphabet size.
    pub fn n(&self) -> usize {
        self.counts.len()
    }

    /// Capacity `k` (number of boxes).
    pub fn len(&self) -> usize {
        self.counts.iter().map(|&c| c as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.iter().all(|&c| c == 0)
    }

    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    /// Multiplicity of `letter` (1-based). Out-of-range letters count zero.
    pub fn count(&self, letter: usize) -> u32 {
        if letter == 0 {
            return 0;
        }
        self.counts.get(letter - 1).copied().unwrap_or(0)
    }

    /// The row word, weakly increasing.
    pub fn letters(&self) -> Vec<usize> {
        self.counts
            .iter()
            .enumerate()
            .flat_map(|(i, &c)| std::iter::repeat_n(i + 1, c as usize))
            .collect()
    }

    pub fn min_letter(&self) -> Option<usize> {
        self.counts.iter().position(|&c| c > 0).map(|i| i + 1)
    }

    /// True if every box carries `letter`.
    pub fn is_uniform(&self, letter: usize) -> bool {
        self.len() == self.count(letter) as usize
    }

    /// Adds `by` to every letter and re-embeds in the alphabet `{1..n}`.
    pub fn shifted(&self, by: usize, n: usize) -> Result<Self> {
        let letters: Vec<usize> = self.letters().into_iter().map(|l| l + by).collect();
        Tableau::from_letters(n, &letters)
    }
}

fn check_letter(letter: usize, n: usize) -> Result<()> {
    if letter == 0 || letter > n {
        Err(Error::LetterOutOfRange { letter, n })
    } else {
        Ok(())
    }
}

pub(crate) fn write_letters(
    f: &mut fmt::Formatter<'_>,
    letters: &[usize],
    n: usize,
) -> fmt::Result {
    if n <= 9 {
        for l in letters {
            write!(f, "{l}")?;
        }
        Ok(())
    } else {
        let parts: Vec<String> = letters.iter().map(|l| l.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

impl fmt::Display for Tableau {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_letters(f, &self.letters(), self.n())
    }
}

/// An ordered tensor product `b_1 ⊗ b_2 ⊗ ... ⊗ b_N` in display order.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct TensorWord {
    factors: Vec<Tableau>,
}

impl TensorWord {
    pub fn new(factors: Vec<Tableau>) -> Result<Self> {
        if let Some(first) = factors.first() {
            let n = first.n();
            for f in &factors {
                if f.n() != n {
                    return Err(Error::Alphabet {
                        left: n,
                        right: f.n(),
                    });
                }
                if f.is_empty() {
                    return Err(Error::Parse("empty factor in tensor word".into()));
                }
            }
        }
        Ok(TensorWord { factors })
    }

    /// Parses `"1*2*13*2"`.
    pub fn parse(s: &str, n: usize) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(TensorWord::default());
        }
        let factors = s
            .split('*')
            .map(|t| Tableau::parse(t, n))
            .collect::<Result<Vec<_>>>()?;
        TensorWord::new(factors)
    }

    /// `letter^{k_1} ⊗ letter^{k_2} ⊗ ...` for the given capacities.
    pub fn uniform(n: usize, letter: usize, shape: &[usize]) -> Result<Self> {
        let factors = shape
            .iter()
            .map(|&k| Tableau::uniform(n, letter, k))
            .collect::<Result<Vec<_>>>()?;
        TensorWord::new(factors)
    }

    pub fn factors(&self) -> &[Tableau] {
        &self.factors
    }

    pub fn into_factors(self) -> Vec<Tableau> {
        self.factors
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn shape(&self) -> Vec<usize> {
        self.factors.iter().map(Tableau::len).collect()
    }

    /// Alphabet size, if the word is nonempty.
    pub fn n(&self) -> Option<usize> {
        self.factors.first().map(Tableau::n)
    }

    pub fn shifted(&self, by: usize, n: usize) -> Result<Self> {
        let factors = self
            .factors
            .iter()
            .map(|t| t.shifted(by, n))
            .collect::<Result<Vec<_>>>()?;
        TensorWord::new(factors)
    }
}

impl fmt::Display for TensorWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, t) in self.factors.iter().enumerate() {
            if i > 0 {
                write!(f, "*")?;
            }
            write!(f, "{t}")?;
        }
        Ok(())
    }
}

/// All elements of `B_k` over `{1..n}` in lexicographic order of their rows.
pub fn all_tableaux(n: usize, k: usize) -> Vec<Tableau> {
    fn rec(n: usize, pos: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Tableau>) {
        if pos + 1 == n {
            cur.push(left);
            out.push(Tableau::from_counts(cur.clone()));
            cur.pop();
            return;
        }
        for c in (0..=left).rev() {
            cur.push(c);
            rec(n, pos + 1, left - c, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if n == 0 {
        return out;
    }
    rec(n, 0, k as u32, &mut Vec::with_capacity(n), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display() {
        let t = Tableau::parse("2233", 4).unwrap();
        assert_eq!(t.counts(), &[0, 2, 2, 0]);
        assert_eq!(t.len(), 4);
        assert_eq!(t.to_string(), "2233");
        assert!(Tableau::parse("32", 4).is_err());
        assert!(Tableau::parse("5", 4).is_err());
        assert!(Tableau::parse("", 4).is_err());
    }

    #[test]
    fn wide_alphabet_uses_commas() {
        let t = Tableau::parse("3,10,10", 12).unwrap();
        assert_eq!(t.count(10), 2);
        assert_eq!(t.to_string(), "3,10,10");
    }

    #[test]
    fn tensor_word_round_trip() {
        let w = TensorWord::parse("1*2*13*2", 3).unwrap();
        assert_eq!(w.len(), 4);
        assert_eq!(w.shape(), vec![1, 1, 2, 1]);
        assert_eq!(w.to_string(), "1*2*13*2");
        assert!(TensorWord::parse("", 3).unwrap().is_empty());
    }

    #[test]
    fn all_tableaux_counts_are_binomial() {
        // |B_k| = C(n + k - 1, k)
        assert_eq!(all_tableaux(3, 2).len(), 6);
        assert_eq!(all_tableaux(4, 3).len(), 20);
        assert_eq!(all_tableaux(1, 5).len(), 1);
        let v = all_tableaux(3, 2);
        assert_eq!(v[0].to_string(), "11");
        assert_eq!(v[5].to_string(), "33");
    }

    #[test]
    fn shift_moves_letters_up() {
        let t = Tableau::parse("12", 2).unwrap();
        assert_eq!(t.shifted(2, 4).unwrap().to_string(), "34");
    }
}
