//! Permutations, pattern containment and the bijection between ordered trees
//! with `n + 1` leaves and 132-avoiding permutations of size `n`.
//!
//! `phi` labels the internal nodes `n, n-1, ..., 1` in pre-order and reads the
//! labels in order (left subtree, node, right subtree). Every node then
//! carries the largest label of its subtree and its subtree occupies the
//! window of entries `<= label` around it, which is what `r_tilde` extracts.
//! A subtree is a caterpillar exactly when that window avoids 231.

use std::fmt;
use std::str::FromStr;

use itertools::Itertools;
use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::tree::{self, BinaryTree, OrderedTree};

pub const DEFAULT_AV132_CAP: usize = 12;
/// Largest size for which Av_n(132) is listed by filtering all of S_n.
const FILTER_LIMIT: usize = 8;

/// A permutation of `1..=n` in one-line notation.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn new(entries: Vec<usize>) -> Result<Self> {
        let n = entries.len();
        let mut seen = vec![false; n + 1];
        for &e in &entries {
            if e == 0 || e > n || seen[e] {
                return Err(Error::InvalidPermutation(format!(
                    "{entries:?} is not a rearrangement of 1..={n}"
                )));
            }
            seen[e] = true;
        }
        Ok(Permutation(entries))
    }

    pub fn identity(n: usize) -> Self {
        Permutation((1..=n).collect())
    }

    /// Relabel distinct values `1..=len` keeping their relative order.
    pub fn normalize(values: &[usize]) -> Self {
        let mut order: Vec<usize> = (0..values.len()).collect();
        order.sort_by_key(|&i| values[i]);
        let mut out = vec![0; values.len()];
        for (rank, &i) in order.iter().enumerate() {
            out[i] = rank + 1;
        }
        Permutation(out)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn entries(&self) -> &[usize] {
        &self.0
    }

    pub fn reverse(&self) -> Self {
        Permutation(self.0.iter().rev().copied().collect())
    }

    /// 0-based position of the entry `value`.
    pub fn position_of(&self, value: usize) -> Option<usize> {
        self.0.iter().position(|&v| v == value)
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0.iter().join(" "))
    }
}

impl FromStr for Permutation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let entries = s
            .split_whitespace()
            .map(|tok| {
                tok.parse::<usize>()
                    .map_err(|_| Error::InvalidPermutation(format!("bad entry {tok:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Permutation::new(entries)
    }
}

/// 0-based positions `(i, j, k)` of an occurrence of 132
/// (`p_i < p_k < p_j`), if any. Linear scan from the right with a stack.
pub fn find_132(p: &Permutation) -> Option<[usize; 3]> {
    let e = p.entries();
    let mut stack: Vec<usize> = Vec::new();
    // best "2" so far, with the position of the "3" that dominates it
    let mut third: Option<(usize, usize)> = None;
    for i in (0..e.len()).rev() {
        if let Some((j, k)) = third {
            if e[i] < e[k] {
                return Some([i, j, k]);
            }
        }
        while let Some(&top) = stack.last() {
            if e[top] >= e[i] {
                break;
            }
            stack.pop();
            if third.is_none_or(|(_, k)| e[top] > e[k]) {
                third = Some((i, top));
            }
        }
        stack.push(i);
    }
    None
}

/// 0-based positions of an occurrence of 231 (`p_k < p_i < p_j`), if any.
/// 231 read backwards is 132.
pub fn find_231(p: &Permutation) -> Option<[usize; 3]> {
    let n = p.len();
    find_132(&p.reverse()).map(|[i, j, k]| [n - 1 - k, n - 1 - j, n - 1 - i])
}

/// Positions of some occurrence of `pattern` in `p`, by pruned backtracking.
pub fn find_pattern(p: &Permutation, pattern: &Permutation) -> Option<Vec<usize>> {
    fn extend(p: &[usize], pat: &[usize], chosen: &mut Vec<usize>) -> bool {
        let t = chosen.len();
        if t == pat.len() {
            return true;
        }
        let start = chosen.last().map_or(0, |&c| c + 1);
        // leave room for the remaining pattern entries
        let end = p.len() + t + 1 - pat.len();
        for pos in start..end {
            let fits = chosen
                .iter()
                .enumerate()
                .all(|(s, &c)| (pat[s] < pat[t]) == (p[c] < p[pos]));
            if fits {
                chosen.push(pos);
                if extend(p, pat, chosen) {
                    return true;
                }
                chosen.pop();
            }
        }
        false
    }
    if pattern.len() > p.len() {
        return None;
    }
    let mut chosen = Vec::with_capacity(pattern.len());
    extend(p.entries(), pattern.entries(), &mut chosen).then_some(chosen)
}

/// Classical containment: some subsequence of `p` is order-isomorphic to
/// `pattern`. 132 and 231 use the linear deciders.
pub fn contains_pattern(p: &Permutation, pattern: &Permutation) -> bool {
    match pattern.entries() {
        [1, 3, 2] => find_132(p).is_some(),
        [2, 3, 1] => find_231(p).is_some(),
        _ => find_pattern(p, pattern).is_some(),
    }
}

pub fn avoids_132(p: &Permutation) -> bool {
    find_132(p).is_none()
}

pub fn avoids_231(p: &Permutation) -> bool {
    find_231(p).is_none()
}

fn require_av132(p: &Permutation) -> Result<()> {
    match find_132(p) {
        Some(w) => Err(Error::NotAv132 {
            positions: w.map(|i| i + 1),
        }),
        None => Ok(()),
    }
}

/// The bijection from ordered trees of size `n + 1` onto Av_n(132).
pub fn phi(t: &OrderedTree) -> Result<Permutation> {
    // labels are handed out in pre-order, written out in in-order
    fn walk(t: &OrderedTree, next_label: &mut usize, out: &mut [usize], offset: usize) {
        if let Some((l, r)) = t.children() {
            let at = offset + l.size() - 1;
            out[at] = *next_label;
            *next_label -= 1;
            walk(l, next_label, out, offset);
            walk(r, next_label, out, at + 1);
        }
    }
    let n = t.size();
    if n < 2 {
        return Err(Error::SizeTooSmall { size: n, min: 1 });
    }
    let mut next_label = n - 1;
    let mut out = vec![0; n - 1];
    walk(t, &mut next_label, &mut out, 0);
    Ok(Permutation(out))
}

/// Inverse of [`phi`].
pub fn phi_inverse(p: &Permutation) -> Result<OrderedTree> {
    require_av132(p)?;
    fn build(e: &[usize]) -> OrderedTree {
        match e.iter().enumerate().max_by_key(|&(_, v)| *v) {
            None => OrderedTree::Leaf,
            Some((i, _)) => OrderedTree::join(build(&e[..i]), build(&e[i + 1..])),
        }
    }
    Ok(build(p.entries()))
}

/// 0-based inclusive window of entries `<= p[index]` reachable from `index`
/// without crossing a larger entry.
pub fn r_window(p: &Permutation, index: usize) -> Result<(usize, usize)> {
    let e = p.entries();
    if index >= e.len() {
        return Err(Error::IndexOutOfRange {
            index: index + 1,
            len: e.len(),
        });
    }
    let v = e[index];
    let mut lo = index;
    while lo > 0 && e[lo - 1] <= v {
        lo -= 1;
    }
    let mut hi = index;
    while hi + 1 < e.len() && e[hi + 1] <= v {
        hi += 1;
    }
    Ok((lo, hi))
}

/// The window of [`r_window`] at 1-based position `i`, renumbered to `1..=m`.
pub fn r_tilde(p: &Permutation, i: usize) -> Result<Permutation> {
    if i == 0 {
        return Err(Error::IndexOutOfRange {
            index: 0,
            len: p.len(),
        });
    }
    let (lo, hi) = r_window(p, i - 1)?;
    Ok(Permutation::normalize(&p.entries()[lo..=hi]))
}

/// `r_tilde` at every position of a source permutation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtractionFamily {
    pub source: Permutation,
    /// `(i, r_tilde(source, i))` for 1-based `i`.
    pub members: Vec<(usize, Permutation)>,
}

impl ExtractionFamily {
    pub fn new(source: &Permutation) -> Self {
        let members = (1..=source.len())
            .map(|i| (i, r_tilde(source, i).expect("index in range")))
            .collect();
        ExtractionFamily {
            source: source.clone(),
            members,
        }
    }

    /// The member extracted around the entry with the given value.
    pub fn for_value(&self, value: usize) -> Option<&Permutation> {
        let pos = self.source.position_of(value)?;
        Some(&self.members[pos].1)
    }
}

/// Size of the biggest 231-avoiding member of the extraction family of a
/// 132-avoiding permutation: `gamma(phi_inverse(p)) - 1`.
pub fn gamma_from_perm(p: &Permutation) -> Result<usize> {
    require_av132(p)?;
    Ok(ExtractionFamily::new(p)
        .members
        .iter()
        .filter(|(_, m)| avoids_231(m))
        .map(|(_, m)| m.len())
        .max()
        .unwrap_or(0))
}

/// All of Av_n(132): filtering S_n for small `n`, otherwise the image of
/// the ordered trees of size `n + 1`.
pub fn av132(n: usize) -> Result<Vec<Permutation>> {
    av132_capped(n, DEFAULT_AV132_CAP)
}

pub fn av132_capped(n: usize, cap: usize) -> Result<Vec<Permutation>> {
    if n > cap {
        return Err(Error::CapExceeded { n, cap });
    }
    if n == 0 {
        return Ok(vec![Permutation(Vec::new())]);
    }
    let mut out: Vec<Permutation> = if n <= FILTER_LIMIT {
        (1..=n)
            .permutations(n)
            .map(Permutation)
            .filter(avoids_132)
            .collect()
    } else {
        tree::enumerate_ordered_capped(n + 1, cap + 1)?
            .map(|t| phi(&t))
            .collect::<Result<_>>()?
    };
    out.sort();
    Ok(out)
}

/// Whether every extraction of size > 1 contains 231, i.e. the tree
/// `phi_inverse(p)` has no caterpillar subtree with more than two leaves.
pub fn all_rtilde_contain_231(p: &Permutation) -> bool {
    ExtractionFamily::new(p)
        .members
        .iter()
        .all(|(_, m)| m.len() <= 1 || !avoids_231(m))
}

/// Number of p in Av_n(132) for which [`all_rtilde_contain_231`] holds,
/// by exhaustive filtering.
pub fn count_all_rtilde_contain_231(n: usize) -> Result<BigInt> {
    count_all_rtilde_contain_231_capped(n, DEFAULT_AV132_CAP)
}

pub fn count_all_rtilde_contain_231_capped(n: usize, cap: usize) -> Result<BigInt> {
    let count = av132_capped(n, cap)?
        .iter()
        .filter(|p| all_rtilde_contain_231(p))
        .count();
    Ok(BigInt::from(count))
}

/// Both existing neighbours of position `i` (0-based) are larger.
pub fn is_valley(p: &Permutation, i: usize) -> bool {
    let e = p.entries();
    let left = i == 0 || e[i - 1] > e[i];
    let right = i + 1 >= e.len() || e[i + 1] > e[i];
    left && right
}

/// Some interior entry exceeds both of its neighbours.
pub fn has_peak(p: &Permutation) -> bool {
    p.entries().windows(3).any(|w| w[0] < w[1] && w[1] > w[2])
}

/// Every entry is a valley or its extraction contains a peak.
pub fn valley_or_peak_condition(p: &Permutation) -> bool {
    (0..p.len()).all(|i| is_valley(p, i) || has_peak(&r_tilde(p, i + 1).expect("index in range")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counts;

    fn perm(s: &str) -> Permutation {
        s.parse().unwrap()
    }

    fn brute_132(p: &Permutation) -> bool {
        let e = p.entries();
        (0..e.len())
            .array_combinations()
            .any(|[i, j, k]| e[i] < e[k] && e[k] < e[j])
    }

    #[test]
    fn construction() {
        assert!(Permutation::new(vec![2, 1, 3]).is_ok());
        assert!(matches!(
            Permutation::new(vec![2, 2, 3]),
            Err(Error::InvalidPermutation(_))
        ));
        assert!(matches!(
            Permutation::new(vec![0, 1]),
            Err(Error::InvalidPermutation(_))
        ));
        assert!("1 x".parse::<Permutation>().is_err());
        assert_eq!(perm("4 5 3 1 2 6 8 7").to_string(), "4 5 3 1 2 6 8 7");
        assert_eq!(Permutation::normalize(&[40, 7, 12]), perm("3 1 2"));
    }

    #[test]
    fn length_three_deciders() {
        assert!(contains_pattern(&perm("2 3 1"), &perm("2 3 1")));
        assert!(!contains_pattern(&perm("1 2 3"), &perm("2 3 1")));
        assert_eq!(find_132(&perm("1 3 2")), Some([0, 1, 2]));
        assert_eq!(find_231(&perm("2 3 1")), Some([0, 1, 2]));
        // this worked example of an extraction family is not itself 132-avoiding
        let sample = perm("4 5 3 1 2 6 8 7");
        let [i, j, k] = find_132(&sample).unwrap();
        let e = sample.entries();
        assert!(i < j && j < k && e[i] < e[k] && e[k] < e[j]);
        for n in 0..=7 {
            for p in (1..=n).permutations(n).map(Permutation) {
                assert_eq!(avoids_132(&p), !brute_132(&p), "{p}");
                assert_eq!(
                    avoids_231(&p),
                    find_pattern(&p, &perm("2 3 1")).is_none(),
                    "{p}"
                );
            }
        }
        let count = (1..=6)
            .permutations(6)
            .map(Permutation)
            .filter(avoids_132)
            .count();
        assert_eq!(count, 132);
    }

    #[test]
    fn generic_patterns() {
        let p = perm("3 1 4 2 5");
        assert_eq!(find_pattern(&p, &perm("2 1 3")), Some(vec![0, 1, 2]));
        assert!(contains_pattern(&p, &perm("1 2 3")));
        assert!(!contains_pattern(&p, &perm("3 2 1")));
        assert!(contains_pattern(&p, &perm("1")));
        assert!(!contains_pattern(&perm("1 2"), &perm("1 2 3")));
        let w = find_pattern(&p, &perm("3 1 4 2")).unwrap();
        assert_eq!(
            Permutation::normalize(&w.iter().map(|&i| p.entries()[i]).collect::<Vec<_>>()),
            perm("3 1 4 2")
        );
    }

    #[test]
    fn worked_extraction_family() {
        let sample = perm("4 5 3 1 2 6 8 7");
        let family = ExtractionFamily::new(&sample);
        let expect = [
            (4, "1"),
            (5, "4 5 3 1 2"),
            (3, "3 1 2"),
            (1, "1"),
            (2, "1 2"),
            (6, "4 5 3 1 2 6"),
            (8, "4 5 3 1 2 6 8 7"),
            (7, "1"),
        ];
        for (value, extracted) in expect {
            assert_eq!(
                family.for_value(value).unwrap(),
                &perm(extracted),
                "r~({value})"
            );
        }
        assert_eq!(r_tilde(&sample, 2).unwrap(), perm("4 5 3 1 2"));
        assert!(matches!(
            r_tilde(&sample, 9),
            Err(Error::IndexOutOfRange { .. })
        ));
        assert!(matches!(
            r_tilde(&sample, 0),
            Err(Error::IndexOutOfRange { .. })
        ));
        assert!(matches!(gamma_from_perm(&sample), Err(Error::NotAv132 { .. })));
        let biggest = family
            .members
            .iter()
            .filter(|(_, m)| avoids_231(m))
            .map(|(_, m)| m.len())
            .max();
        assert_eq!(biggest, Some(3));
    }

    #[test]
    fn phi_small_cases() {
        assert_eq!(phi(&OrderedTree::cherry()).unwrap(), perm("1"));
        assert_eq!(phi(&OrderedTree::left_comb(3)).unwrap(), perm("1 2"));
        assert_eq!(
            phi(&OrderedTree::left_comb(3).mirror()).unwrap(),
            perm("2 1")
        );
        assert!(matches!(
            phi(&OrderedTree::Leaf),
            Err(Error::SizeTooSmall { .. })
        ));
        assert_eq!(phi_inverse(&perm("1")).unwrap(), OrderedTree::cherry());
        assert_eq!(gamma_from_perm(&perm("1")).unwrap(), 1);
        assert!(matches!(
            phi_inverse(&perm("1 3 2")),
            Err(Error::NotAv132 {
                positions: [1, 2, 3]
            })
        ));
    }

    #[test]
    fn av132_listing() {
        for n in 0..=9 {
            let list = av132(n).unwrap();
            assert_eq!(BigInt::from(list.len()), counts::catalan(n + 1), "n = {n}");
            assert!(list.iter().all(avoids_132));
        }
        assert!(matches!(av132(13), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn round_trip_av7() {
        let list = av132(7).unwrap();
        assert_eq!(list.len(), 429);
        for p in list {
            let t = phi_inverse(&p).unwrap();
            assert_eq!(t.size(), 8);
            assert_eq!(phi(&t).unwrap(), p);
        }
    }

    #[test]
    fn rtilde_count_prefix() {
        let expected = [1, 0, 1, 2, 6, 16, 45];
        for (n, &e) in (1..).zip(expected.iter()) {
            assert_eq!(
                count_all_rtilde_contain_231(n).unwrap(),
                BigInt::from(e),
                "n = {n}"
            );
        }
    }

    #[test]
    fn valleys_and_peaks() {
        let p = perm("2 1 3");
        assert!(is_valley(&p, 1));
        assert!(!is_valley(&p, 0));
        assert!(is_valley(&perm("1"), 0));
        assert!(has_peak(&perm("1 3 2")));
        assert!(!has_peak(&perm("3 1 2")));
    }
}
