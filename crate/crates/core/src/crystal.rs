//! Combinatorial R matrix and energy function on `B_k ⊗ B_l`, computed with
//! the winding/unwinding dot-pairing rule, plus the affine extension.
//!
//! Picture `x ⊗ y` as two columns of dots, row `i` holding `x_i` (left) and
//! `y_i` (right) dots, letter 1 at the top. Each right dot is joined to the
//! lowest free left dot strictly above it; if none exists the line wraps
//! around to the lowest free left dot overall (a winding pair). Unpaired left
//! dots then slide to the right column. The energy is the number of winding
//! pairs.

use std::fmt;

use crate::error::{Error, Result};
use crate::tableau::{Tableau, TensorWord};

/// Image of `x ⊗ y` under the combinatorial R matrix: `x ⊗ y ≃ left ⊗ right`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RImage {
    /// Capacity `|y|`.
    pub left: Tableau,
    /// Capacity `|x|`.
    pub right: Tableau,
    /// Number of winding pairs.
    pub energy: usize,
}

fn check_alphabet(x: &Tableau, y: &Tableau) -> Result<()> {
    if x.n() != y.n() {
        return Err(Error::Alphabet {
            left: x.n(),
            right: y.n(),
        });
    }
    Ok(())
}

/// Runs the pairing rule for `|x| >= |y|`, joining right dots in the given
/// order of letters. `order` must be a permutation of the right column.
fn pair_dots(x: &Tableau, y: &Tableau, order: impl IntoIterator<Item = usize>) -> RImage {
    let n = x.n();
    let mut free: Vec<u32> = x.counts().to_vec();
    let mut paired = vec![0u32; n];
    let mut winding = 0;
    for j in order {
        // lowest free left dot strictly above row j
        let above = (0..j - 1).rev().find(|&i| free[i] > 0);
        let partner = match above {
            Some(i) => i,
            None => {
                winding += 1;
                (0..n)
                    .rev()
                    .find(|&i| free[i] > 0)
                    .expect("left column has at least as many dots as the right")
            }
        };
        free[partner] -= 1;
        paired[partner] += 1;
    }
    let right: Vec<u32> = y.counts().iter().zip(&free).map(|(a, b)| a + b).collect();
    RImage {
        left: Tableau::from_counts(paired),
        right: Tableau::from_counts(right),
        energy: winding,
    }
}

fn descending_letters(y: &Tableau) -> Vec<usize> {
    let mut v = y.letters();
    v.reverse();
    v
}

/// The pairing rule with an explicit order of right-column dots, for
/// `|x| >= |y|`. The result does not depend on the order; this entry point
/// exists so that claim can be checked.
pub fn r_matrix_with_order(x: &Tableau, y: &Tableau, order: &[usize]) -> Result<RImage> {
    check_alphabet(x, y)?;
    if x.len() < y.len() {
        return Err(Error::Length(format!(
            "explicit pairing order needs |x| >= |y|, got {} < {}",
            x.len(),
            y.len()
        )));
    }
    let mut sorted = order.to_vec();
    sorted.sort_unstable();
    if sorted != y.letters() {
        return Err(Error::Length(
            "pairing order is not a permutation of the right column".into(),
        ));
    }
    Ok(pair_dots(x, y, order.iter().copied()))
}

/// Combinatorial R matrix `B_k ⊗ B_l → B_l ⊗ B_k` with its energy.
///
/// For `k >= l` the pairing rule applies directly, right dots taken from the
/// largest letter down. For `k < l` the map is the inverse of the `l >= k`
/// rule: the preimage `u ⊗ v` must have `x ⊆ u` (the paired dots) and
/// `v ⊆ y`, so it is found by scanning sub-multisets of `y`.
pub fn r_matrix(x: &Tableau, y: &Tableau) -> Result<RImage> {
    check_alphabet(x, y)?;
    let (k, l) = (x.len(), y.len());
    if k >= l {
        return Ok(pair_dots(x, y, descending_letters(y)));
    }
    let n = x.n();
    let mut found: Option<RImage> = None;
    for v in sub_multisets(y.counts(), k) {
        let u: Vec<u32> = (0..n)
            .map(|i| x.counts()[i] + y.counts()[i] - v[i])
            .collect();
        let u = Tableau::from_counts(u);
        let v = Tableau::from_counts(v);
        let img = pair_dots(&u, &v, descending_letters(&v));
        if &img.left == x && &img.right == y {
            debug_assert!(found.is_none(), "R matrix preimage is not unique");
            found = Some(RImage {
                left: u,
                right: v,
                energy: img.energy,
            });
            if !cfg!(debug_assertions) {
                break;
            }
        }
    }
    Ok(found.expect("combinatorial R matrix is a bijection"))
}

/// Every count vector `v <= counts` (componentwise) with `|v| = size`.
fn sub_multisets(counts: &[u32], size: usize) -> Vec<Vec<u32>> {
    fn rec(counts: &[u32], pos: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if pos == counts.len() {
            if left == 0 {
                out.push(cur.clone());
            }
            return;
        }
        let rest: u32 = counts[pos + 1..].iter().sum();
        let lo = left.saturating_sub(rest);
        let hi = counts[pos].min(left);
        for c in lo..=hi {
            cur.push(c);
            rec(counts, pos + 1, left - c, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(
        counts,
        0,
        size as u32,
        &mut Vec::with_capacity(counts.len()),
        &mut out,
    );
    out
}

/// Energy `H(x ⊗ y)`, the number of winding pairs.
pub fn energy(x: &Tableau, y: &Tableau) -> Result<usize> {
    Ok(r_matrix(x, y)?.energy)
}

/// `min(|x|, |y|) - H(x ⊗ y)`.
pub fn unwinding_number(x: &Tableau, y: &Tableau) -> Result<usize> {
    Ok(x.len().min(y.len()) - energy(x, y)?)
}

/// A tableau together with an integer mode, an element `b[d]` of the affinization.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct AffineFactor {
    pub tableau: Tableau,
    pub mode: i64,
}

impl AffineFactor {
    pub fn new(tableau: Tableau, mode: i64) -> Self {
        AffineFactor { tableau, mode }
    }

    /// Parses `"2233[5]"`.
    pub fn parse(s: &str, n: usize) -> Result<Self> {
        let s = s.trim();
        let open = s
            .find('[')
            .ok_or_else(|| Error::Parse(format!("missing mode in {s:?}")))?;
        if !s.ends_with(']') {
            return Err(Error::Parse(format!("missing ']' in {s:?}")));
        }
        let tableau = Tableau::parse(&s[..open], n)?;
        let mode = s[open + 1..s.len() - 1]
            .trim()
            .parse::<i64>()
            .map_err(|_| Error::Parse(format!("bad mode in {s:?}")))?;
        Ok(AffineFactor { tableau, mode })
    }
}

impl fmt::Display for AffineFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{}]", self.tableau, self.mode)
    }
}

/// Affine R matrix: `b[d] ⊗ b'[d'] ≃ b̃'[d' - H] ⊗ b̃[d + H]`.
pub fn affine_r(a: &AffineFactor, b: &AffineFactor) -> Result<(AffineFactor, AffineFactor)> {
    let img = r_matrix(&a.tableau, &b.tableau)?;
    let h = img.energy as i64;
    Ok((
        AffineFactor::new(img.left, b.mode - h),
        AffineFactor::new(img.right, a.mode + h),
    ))
}

/// Total letter content of a word; the zero vector of length `n` for the empty word.
pub fn weight(w: &TensorWord, n: usize) -> Vec<u32> {
    let mut total = vec![0u32; n];
    for f in w.factors() {
        for (t, c) in total.iter_mut().zip(f.counts()) {
            *t += c;
        }
    }
    total
}

/// Highest-weight test for a path.
///
/// Factors are read left to right and each row from its largest letter to its
/// smallest; the path is highest iff every prefix of that reading contains at
/// least as many `i` as `i + 1`. Reading each row backwards is what makes a
/// lone row such as `123` non-highest.
pub fn is_highest(w: &TensorWord) -> bool {
    let Some(n) = w.n() else { return true };
    let mut seen = vec![0u32; n + 1];
    for f in w.factors() {
        for l in f.letters().into_iter().rev() {
            seen[l] += 1;
            if l > 1 && seen[l] > seen[l - 1] {
                return false;
            }
        }
    }
    true
}

/// Applies R at adjacent positions `i, i + 1` of a word.
pub fn apply_r_at(w: &TensorWord, i: usize) -> Result<TensorWord> {
    let f = w.factors();
    if i + 1 >= f.len() {
        return Err(Error::Length(format!(
            "no adjacent pair at {i} in a word of length {}",
            f.len()
        )));
    }
    let img = r_matrix(&f[i], &f[i + 1])?;
    let mut out = f.to_vec();
    out[i] = img.left;
    out[i + 1] = img.right;
    TensorWord::new(out)
}

/// Moves the factors of `w` into the capacity order `target` by adjacent R
/// moves (stable assignment among equal capacities). By Yang–Baxter the
/// result does not depend on the chosen sequence of moves.
pub fn reorder_to_shape(w: &TensorWord, target: &[usize]) -> Result<TensorWord> {
    let mut caps = w.shape();
    let mut sorted_a = caps.clone();
    let mut sorted_b = target.to_vec();
    sorted_a.sort_unstable();
    sorted_b.sort_unstable();
    if sorted_a != sorted_b {
        return Err(Error::Length(format!(
            "shape {:?} is not a rearrangement of {:?}",
            caps, target
        )));
    }
    let mut factors = w.factors().to_vec();
    for (pos, &want) in target.iter().enumerate() {
        let from = (pos..caps.len())
            .find(|&j| caps[j] == want)
            .expect("capacity multisets agree");
        for j in (pos..from).rev() {
            let img = r_matrix(&factors[j], &factors[j + 1])?;
            factors[j] = img.left;
            factors[j + 1] = img.right;
            caps.swap(j, j + 1);
        }
    }
    TensorWord::new(factors)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tableau::all_tableaux;

    fn t(s: &str, n: usize) -> Tableau {
        Tableau::parse(s, n).unwrap()
    }

    /// Brute-force inverse over all of `B_l × B_k`, independent of the
    /// sub-multiset search used by `r_matrix`.
    fn inverse_by_enumeration(x: &Tableau, y: &Tableau) -> RImage {
        let n = x.n();
        let mut hits = Vec::new();
        for u in all_tableaux(n, y.len()) {
            for v in all_tableaux(n, x.len()) {
                let img = pair_dots(&u, &v, descending_letters(&v));
                if &img.left == x && &img.right == y {
                    hits.push(RImage {
                        left: u.clone(),
                        right: v,
                        energy: img.energy,
                    });
                }
            }
        }
        assert_eq!(hits.len(), 1);
        hits.pop().unwrap()
    }

    #[test]
    fn worked_example_1344_234() {
        let img = r_matrix(&t("1344", 4), &t("234", 4)).unwrap();
        assert_eq!(img.left.to_string(), "134");
        assert_eq!(img.right.to_string(), "2344");
        assert_eq!(img.energy, 1);
    }

    #[test]
    fn repeated_letter_is_all_winding() {
        let img = r_matrix(&t("22", 3), &t("22", 3)).unwrap();
        assert_eq!(
            (img.left.to_string(), img.right.to_string(), img.energy),
            ("22".into(), "22".into(), 2)
        );
        for k in 1..5 {
            for l in 1..5 {
                let x = Tableau::uniform(4, 3, k).unwrap();
                let y = Tableau::uniform(4, 3, l).unwrap();
                let img = r_matrix(&x, &y).unwrap();
                assert_eq!(img.left, y);
                assert_eq!(img.right, x);
                assert_eq!(img.energy, k.min(l));
            }
        }
    }

    #[test]
    fn small_hand_cases() {
        let img = r_matrix(&t("23", 3), &t("1", 3)).unwrap();
        assert_eq!(
            (img.left.to_string(), img.right.to_string(), img.energy),
            ("3".into(), "12".into(), 1)
        );
        assert_eq!(energy(&t("2233", 4), &t("4", 4)).unwrap(), 0);
        assert_eq!(energy(&t("3", 3), &t("3", 3)).unwrap(), 1);
    }

    #[test]
    fn short_left_factor_matches_enumeration() {
        let x = t("222", 4);
        let y = t("2233", 4);
        let img = r_matrix(&x, &y).unwrap();
        let oracle = inverse_by_enumeration(&x, &y);
        assert_eq!(img, oracle);
        assert_eq!(img.energy, 1);
        assert_eq!(img.left.to_string(), "2222");
        assert_eq!(img.right.to_string(), "233");
    }

    #[test]
    fn inverse_agrees_with_enumeration_exhaustively() {
        for n in 1..=3 {
            for k in 1..=2 {
                for l in k + 1..=3 {
                    for x in all_tableaux(n, k) {
                        for y in all_tableaux(n, l) {
                            assert_eq!(r_matrix(&x, &y).unwrap(), inverse_by_enumeration(&x, &y));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn unwinding_examples() {
        assert_eq!(unwinding_number(&t("244", 5), &t("2335", 5)).unwrap(), 2);
        assert_eq!(
            unwinding_number(&t("22223345", 6), &t("22333346", 6)).unwrap(),
            6
        );
        assert_eq!(unwinding_number(&t("222", 3), &t("22", 3)).unwrap(), 0);
    }

    #[test]
    fn affine_examples() {
        let a = AffineFactor::parse("2[1]", 3).unwrap();
        let b = AffineFactor::parse("23[2]", 3).unwrap();
        let (l, r) = affine_r(&a, &b).unwrap();
        assert_eq!(format!("{l}*{r}"), "22[2]*3[1]");
        let (a2, b2) = affine_r(&l, &r).unwrap();
        assert_eq!((a2, b2), (a, b));

        // the single-letter case: H = min(k, l)
        let x = AffineFactor::new(Tableau::uniform(3, 3, 3).unwrap(), 7);
        let y = AffineFactor::new(Tableau::uniform(3, 3, 2).unwrap(), 4);
        let (l, r) = affine_r(&x, &y).unwrap();
        assert_eq!(
            (l.tableau.len(), l.mode, r.tableau.len(), r.mode),
            (2, 2, 3, 9)
        );

        let z = AffineFactor::new(t("13", 3), 0);
        let (l, r) = affine_r(&z, &z).unwrap();
        let h = energy(&z.tableau, &z.tableau).unwrap() as i64;
        assert_eq!((l.tableau.clone(), l.mode), (z.tableau.clone(), -h));
        assert_eq!((r.tableau, r.mode), (z.tableau, h));
    }

    #[test]
    fn weight_and_highest() {
        let w = TensorWord::parse("1*2*13*2", 3).unwrap();
        assert_eq!(weight(&w, 3), vec![2, 2, 1]);
        assert_eq!(weight(&TensorWord::default(), 3), vec![0, 0, 0]);
        assert!(is_highest(&w));
        assert!(!is_highest(&TensorWord::parse("2*1", 2).unwrap()));
        assert!(!is_highest(&TensorWord::parse("123", 3).unwrap()));
        assert!(is_highest(&TensorWord::parse("1*12", 2).unwrap()));
        assert!(!is_highest(&TensorWord::parse("12*1", 2).unwrap()));
    }

    #[test]
    fn pairing_order_is_irrelevant_on_example() {
        let x = t("1344", 4);
        let y = t("234", 4);
        for order in [[2, 3, 4], [3, 2, 4], [4, 2, 3], [2, 4, 3]] {
            let img = r_matrix_with_order(&x, &y, &order).unwrap();
            assert_eq!(img, r_matrix(&x, &y).unwrap());
        }
        assert!(r_matrix_with_order(&x, &y, &[2, 3]).is_err());
    }

    #[test]
    fn alphabet_mismatch_is_an_error() {
        assert!(matches!(
            r_matrix(&t("1", 2), &t("1", 3)),
            Err(Error::Alphabet { .. })
        ));
    }

    #[test]
    fn reorder_matches_single_swap() {
        let w = TensorWord::parse("1344*234", 4).unwrap();
        let r = reorder_to_shape(&w, &[3, 4]).unwrap();
        assert_eq!(r.to_string(), "134*2344");
        assert!(reorder_to_shape(&w, &[3, 3]).is_err());
    }
}
