//! Index combinatorics over `[n] = {1, …, n}`.
//!
//! Every N×N matrix in the crate is indexed by [`subsets`] in lexicographic
//! order, so `rank`/`unrank` are the bridge between labels and positions.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CombinatError {
    #[error("arity {m} out of range for n = {n}")]
    ArityOutOfRange { n: usize, m: usize },
    #[error("invalid index set {elems:?} for n = {n}")]
    InvalidIndexSet { elems: Vec<usize>, n: usize },
    #[error("rank {rank} out of range for {m}-subsets of [{n}]")]
    RankOutOfRange { rank: usize, n: usize, m: usize },
    #[error("cannot parse index set {0:?}")]
    Parse(String),
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc = 1usize;
    for i in 1..=k {
        acc = acc * (n - k + i) / i;
    }
    acc
}

/// A strictly increasing tuple of labels from `[n]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IndexSet(Vec<usize>);

impl IndexSet {
    /// Validates that `elems` is strictly increasing inside `[1, n]`.
    pub fn new(elems: Vec<usize>, n: usize) -> Result<Self, CombinatError> {
        let increasing = elems.windows(2).all(|w| w[0] < w[1]);
        let in_range = elems.iter().all(|&e| (1..=n).contains(&e));
        if increasing && in_range {
            Ok(IndexSet(elems))
        } else {
            Err(CombinatError::InvalidIndexSet { elems, n })
        }
    }

    /// Sorts and deduplicates-checks arbitrary labels.
    pub fn from_unsorted(mut elems: Vec<usize>, n: usize) -> Result<Self, CombinatError> {
        elems.sort_unstable();
        Self::new(elems, n)
    }

    pub fn elems(&self) -> &[usize] {
        &self.0
    }

    pub fn arity(&self) -> usize {
        self.0.len()
    }

    pub fn contains(&self, e: usize) -> bool {
        self.0.binary_search(&e).is_ok()
    }

    pub fn is_disjoint(&self, other: &IndexSet) -> bool {
        self.0.iter().all(|e| !other.contains(*e))
    }

    /// Compact label: digits run together when `n ≤ 9`, comma-separated otherwise.
    pub fn label(&self, n: usize) -> String {
        format_label(&self.0, n)
    }

    /// Inverse of [`IndexSet::label`]; commas are always accepted.
    pub fn parse(text: &str, n: usize) -> Result<Self, CombinatError> {
        let elems = parse_label(text)?;
        Self::new(elems, n).map_err(|_| CombinatError::Parse(text.to_string()))
    }
}

pub(crate) fn format_label(elems: &[usize], n: usize) -> String {
    let parts: Vec<String> = elems.iter().map(usize::to_string).collect();
    if n <= 9 {
        parts.concat()
    } else {
        parts.join(",")
    }
}

fn parse_label(text: &str) -> Result<Vec<usize>, CombinatError> {
    let fail = || CombinatError::Parse(text.to_string());
    let text = text.trim().trim_start_matches('(').trim_end_matches(')');
    if text.is_empty() {
        return Err(fail());
    }
    if text.contains(',') {
        text.split(',')
            .map(|p| p.trim().parse::<usize>().map_err(|_| fail()))
            .collect()
    } else {
        text.chars()
            .map(|c| c.to_digit(10).map(|d| d as usize).ok_or_else(fail))
            .collect()
    }
}

/// A 2-subset `{lo < hi}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pair {
    lo: usize,
    hi: usize,
}

impl Pair {
    pub fn new(a: usize, b: usize, n: usize) -> Result<Self, CombinatError> {
        if a < b && a >= 1 && b <= n {
            Ok(Pair { lo: a, hi: b })
        } else {
            Err(CombinatError::InvalidIndexSet {
                elems: vec![a, b],
                n,
            })
        }
    }

    /// The pair `{a, b}` in ascending order together with the sign picked up
    /// by `e_a ∧ e_b = sign · e_lo ∧ e_hi`. `None` when `a == b`.
    pub fn oriented(a: usize, b: usize) -> Option<(Pair, i8)> {
        match a.cmp(&b) {
            std::cmp::Ordering::Less => Some((Pair { lo: a, hi: b }, 1)),
            std::cmp::Ordering::Greater => Some((Pair { lo: b, hi: a }, -1)),
            std::cmp::Ordering::Equal => None,
        }
    }

    pub fn lo(self) -> usize {
        self.lo
    }

    pub fn hi(self) -> usize {
        self.hi
    }

    pub fn elems(self) -> [usize; 2] {
        [self.lo, self.hi]
    }

    pub fn contains(self, e: usize) -> bool {
        self.lo == e || self.hi == e
    }

    pub fn meets(self, other: Pair) -> bool {
        other.contains(self.lo) || other.contains(self.hi)
    }

    /// The other element of the pair.
    pub fn partner(self, e: usize) -> Option<usize> {
        if self.lo == e {
            Some(self.hi)
        } else if self.hi == e {
            Some(self.lo)
        } else {
            None
        }
    }

    /// `self ∖ {from} ∪ {to}` when `from ∈ self` and `to ∉ self`.
    pub fn substitute(self, from: usize, to: usize) -> Option<Pair> {
        let keep = self.partner(from)?;
        if keep == to {
            return None;
        }
        Pair::oriented(keep, to).map(|(p, _)| p)
    }

    /// `self ⊔ other` as a Quad, if disjoint.
    pub fn union(self, other: Pair) -> Option<Quad> {
        if self.meets(other) {
            return None;
        }
        let mut e = [self.lo, self.hi, other.lo, other.hi];
        e.sort_unstable();
        Some(Quad(e))
    }

    /// Position in the lex order of `subsets(n, 2)`.
    pub fn rank(self, n: usize) -> usize {
        // Pairs with first element a < lo contribute (n - a) each.
        let before: usize = (1..self.lo).map(|a| n - a).sum();
        before + (self.hi - self.lo - 1)
    }

    pub fn unrank(rank: usize, n: usize) -> Result<Pair, CombinatError> {
        let set = unrank(rank, n, 2)?;
        Ok(Pair {
            lo: set.0[0],
            hi: set.0[1],
        })
    }

    pub fn label(self, n: usize) -> String {
        format_label(&self.elems(), n)
    }

    pub fn parse(text: &str, n: usize) -> Result<Pair, CombinatError> {
        Pair::try_from(IndexSet::parse(text, n)?)
    }
}

impl TryFrom<IndexSet> for Pair {
    type Error = CombinatError;
    fn try_from(set: IndexSet) -> Result<Self, Self::Error> {
        match set.0[..] {
            [lo, hi] => Ok(Pair { lo, hi }),
            _ => Err(CombinatError::InvalidIndexSet {
                elems: set.0,
                n: 0,
            }),
        }
    }
}

impl From<Pair> for IndexSet {
    fn from(p: Pair) -> Self {
        IndexSet(vec![p.lo, p.hi])
    }
}

impl fmt::Display for Pair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.lo, self.hi)
    }
}

/// A 4-subset in ascending order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Quad([usize; 4]);

impl Quad {
    pub fn new(elems: [usize; 4], n: usize) -> Result<Self, CombinatError> {
        IndexSet::new(elems.to_vec(), n)?;
        Ok(Quad(elems))
    }

    pub fn elems(self) -> [usize; 4] {
        self.0
    }

    pub fn contains(self, e: usize) -> bool {
        self.0.contains(&e)
    }

    pub fn contains_pair(self, p: Pair) -> bool {
        self.contains(p.lo) && self.contains(p.hi)
    }

    /// The six 2-subsets in lex order.
    pub fn pairs(self) -> [Pair; 6] {
        let [a, b, c, d] = self.0;
        [(a, b), (a, c), (a, d), (b, c), (b, d), (c, d)].map(|(lo, hi)| Pair { lo, hi })
    }

    /// `self ∖ p` for a pair inside the quad.
    pub fn complement(self, p: Pair) -> Option<Pair> {
        if !self.contains_pair(p) {
            return None;
        }
        let mut rest = self.0.iter().copied().filter(|&e| !p.contains(e));
        let lo = rest.next()?;
        let hi = rest.next()?;
        Some(Pair { lo, hi })
    }

    pub fn rank(self, n: usize) -> usize {
        rank_elems(&self.0, n)
    }

    pub fn unrank(rank: usize, n: usize) -> Result<Quad, CombinatError> {
        let set = unrank(rank, n, 4)?;
        Ok(Quad([set.0[0], set.0[1], set.0[2], set.0[3]]))
    }

    pub fn label(self, n: usize) -> String {
        format_label(&self.0, n)
    }

    pub fn parse(text: &str, n: usize) -> Result<Quad, CombinatError> {
        Quad::try_from(IndexSet::parse(text, n)?)
    }
}

impl TryFrom<IndexSet> for Quad {
    type Error = CombinatError;
    fn try_from(set: IndexSet) -> Result<Self, Self::Error> {
        match set.0[..] {
            [a, b, c, d] => Ok(Quad([a, b, c, d])),
            _ => Err(CombinatError::InvalidIndexSet {
                elems: set.0,
                n: 0,
            }),
        }
    }
}

impl From<Quad> for IndexSet {
    fn from(q: Quad) -> Self {
        IndexSet(q.0.to_vec())
    }
}

impl fmt::Display for Quad {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = self.0;
        write!(f, "({a},{b},{c},{d})")
    }
}

/// All `m`-subsets of `[n]` in lexicographic order.
pub fn subsets(n: usize, m: usize) -> Result<Vec<IndexSet>, CombinatError> {
    if m > n {
        return Err(CombinatError::ArityOutOfRange { n, m });
    }
    let mut out = Vec::with_capacity(binomial(n, m));
    let mut cur: Vec<usize> = (1..=m).collect();
    loop {
        out.push(IndexSet(cur.clone()));
        // Rightmost position that can still be advanced.
        let Some(pos) = (0..m).rev().find(|&p| cur[p] < n - (m - 1 - p)) else {
            break;
        };
        cur[pos] += 1;
        for q in pos + 1..m {
            cur[q] = cur[q - 1] + 1;
        }
    }
    Ok(out)
}

pub fn pairs(n: usize) -> Vec<Pair> {
    (1..=n)
        .flat_map(|lo| (lo + 1..=n).map(move |hi| Pair { lo, hi }))
        .collect()
}

pub fn quads(n: usize) -> Vec<Quad> {
    if n < 4 {
        return Vec::new();
    }
    subsets(n, 4)
        .expect("4 <= n")
        .into_iter()
        .map(|s| Quad([s.0[0], s.0[1], s.0[2], s.0[3]]))
        .collect()
}

fn rank_elems(elems: &[usize], n: usize) -> usize {
    let m = elems.len();
    let mut rank = 0;
    let mut prev = 0;
    for (t, &c) in elems.iter().enumerate() {
        for v in prev + 1..c {
            rank += binomial(n - v, m - t - 1);
        }
        prev = c;
    }
    rank
}

/// Position of `set` within `subsets(n, set.arity())`.
pub fn rank(set: &IndexSet, n: usize) -> Result<usize, CombinatError> {
    IndexSet::new(set.0.clone(), n)?;
    Ok(rank_elems(&set.0, n))
}

pub fn unrank(rank: usize, n: usize, m: usize) -> Result<IndexSet, CombinatError> {
    if m > n {
        return Err(CombinatError::ArityOutOfRange { n, m });
    }
    if rank >= binomial(n, m) {
        return Err(CombinatError::RankOutOfRange { rank, n, m });
    }
    let mut rest = rank;
    let mut elems = Vec::with_capacity(m);
    let mut v = 1;
    for t in 0..m {
        loop {
            let block = binomial(n - v, m - t - 1);
            if rest < block {
                elems.push(v);
                v += 1;
                break;
            }
            rest -= block;
            v += 1;
        }
    }
    Ok(IndexSet(elems))
}

/// Sign of the permutation `(i_1, …, i_v, j_1, …, j_u)`, or `0` when the
/// sets overlap. Computed by counting inversions across the two blocks.
pub fn sign_concat(i: &[usize], j: &[usize]) -> i8 {
    if i.iter().any(|e| j.contains(e)) {
        return 0;
    }
    let inversions: usize = i
        .iter()
        .map(|&a| j.iter().filter(|&&b| b < a).count())
        .sum();
    if inversions.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

pub fn sign_pairs(a: Pair, b: Pair) -> i8 {
    sign_concat(&a.elems(), &b.elems())
}

/// One unordered split `H = B ⊔ D` of a quad; `b` holds the smaller element.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairPartition {
    pub b: Pair,
    pub d: Pair,
    pub sign: i8,
}

/// The three splits of `h` into two pairs, ordered by their first pair:
/// `{h1h2 | h3h4}`, `{h1h3 | h2h4}`, `{h1h4 | h2h3}`.
pub fn pair_partitions(h: Quad) -> [PairPartition; 3] {
    let [a, b, c, d] = h.0;
    [((a, b), (c, d)), ((a, c), (b, d)), ((a, d), (b, c))].map(|((p, q), (r, s))| {
        let b = Pair { lo: p, hi: q };
        let d = Pair { lo: r, hi: s };
        PairPartition {
            b,
            d,
            sign: sign_pairs(b, d),
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tuples(sets: &[IndexSet]) -> Vec<Vec<usize>> {
        sets.iter().map(|s| s.elems().to_vec()).collect()
    }

    #[test]
    fn subsets_in_lex_order() {
        assert_eq!(
            tuples(&subsets(4, 2).unwrap()),
            vec![
                vec![1, 2],
                vec![1, 3],
                vec![1, 4],
                vec![2, 3],
                vec![2, 4],
                vec![3, 4]
            ]
        );
        assert_eq!(tuples(&subsets(3, 3).unwrap()), vec![vec![1, 2, 3]]);
        let s54 = subsets(5, 4).unwrap();
        assert_eq!(s54.len(), 5);
        assert_eq!(s54[0].elems(), &[1, 2, 3, 4]);
        assert_eq!(s54[4].elems(), &[2, 3, 4, 5]);
        assert_eq!(subsets(3, 0).unwrap().len(), 1);
        assert_eq!(
            subsets(3, 4),
            Err(CombinatError::ArityOutOfRange { n: 3, m: 4 })
        );
    }

    #[test]
    fn ranks() {
        let p12 = IndexSet::new(vec![1, 2], 4).unwrap();
        let p34 = IndexSet::new(vec![3, 4], 4).unwrap();
        assert_eq!(rank(&p12, 4).unwrap(), 0);
        assert_eq!(rank(&p34, 4).unwrap(), 5);
        assert_eq!(unrank(3, 4, 2).unwrap().elems(), &[2, 3]);
        assert!(unrank(6, 4, 2).is_err());
        assert!(rank(&IndexSet(vec![2, 1]), 4).is_err());
    }

    #[test]
    fn rank_matches_enumeration() {
        for n in 0..=8 {
            for m in 0..=n {
                for (pos, set) in subsets(n, m).unwrap().iter().enumerate() {
                    assert_eq!(rank(set, n).unwrap(), pos);
                    assert_eq!(&unrank(pos, n, m).unwrap(), set);
                }
            }
        }
        for n in 2..=9 {
            for (pos, p) in pairs(n).into_iter().enumerate() {
                assert_eq!(p.rank(n), pos);
                assert_eq!(Pair::unrank(pos, n).unwrap(), p);
            }
            for (pos, q) in quads(n).into_iter().enumerate() {
                assert_eq!(q.rank(n), pos);
            }
        }
    }

    #[test]
    fn concatenation_signs() {
        assert_eq!(sign_concat(&[1, 2], &[3, 4]), 1);
        assert_eq!(sign_concat(&[1, 3], &[2, 4]), -1);
        assert_eq!(sign_concat(&[1, 2], &[2, 3]), 0);
        assert_eq!(sign_concat(&[], &[2, 3]), 1);
    }

    #[test]
    fn partitions_of_quads() {
        let signs = |h: [usize; 4]| -> Vec<(String, i8)> {
            pair_partitions(Quad::new(h, 9).unwrap())
                .iter()
                .map(|p| (format!("{}|{}", p.b.label(9), p.d.label(9)), p.sign))
                .collect()
        };
        assert_eq!(
            signs([1, 2, 3, 4]),
            vec![("12|34".into(), 1), ("13|24".into(), -1), ("14|23".into(), 1)]
        );
        assert_eq!(
            signs([1, 2, 4, 6]),
            vec![("12|46".into(), 1), ("14|26".into(), -1), ("16|24".into(), 1)]
        );
        for h in quads(7) {
            for part in pair_partitions(h) {
                assert_eq!(part.b.union(part.d), Some(h));
                assert_eq!(sign_pairs(part.b, part.d), sign_pairs(part.d, part.b));
            }
        }
    }

    #[test]
    fn labels() {
        let s = IndexSet::new(vec![1, 3], 4).unwrap();
        assert_eq!(s.label(4), "13");
        assert_eq!(s.label(12), "1,3");
        assert_eq!(IndexSet::parse("1234", 4).unwrap().elems(), &[1, 2, 3, 4]);
        assert_eq!(IndexSet::parse("1,10", 12).unwrap().elems(), &[1, 10]);
        assert!(IndexSet::parse("21", 4).is_err());
        assert!(IndexSet::parse("15", 4).is_err());
        assert!(IndexSet::parse("", 4).is_err());
        assert_eq!(Pair::parse("24", 4).unwrap(), Pair::new(2, 4, 4).unwrap());
        assert!(Pair::parse("234", 4).is_err());
    }

    #[test]
    fn pair_helpers() {
        let p = Pair::new(1, 3, 5).unwrap();
        assert_eq!(p.substitute(1, 2), Some(Pair::new(2, 3, 5).unwrap()));
        assert_eq!(p.substitute(1, 3), None);
        assert_eq!(p.substitute(4, 5), None);
        assert_eq!(Pair::oriented(4, 2), Some((Pair::new(2, 4, 5).unwrap(), -1)));
        let q = Quad::new([1, 2, 4, 6], 7).unwrap();
        assert_eq!(q.complement(Pair::new(2, 6, 7).unwrap()), Some(Pair::new(1, 4, 7).unwrap()));
        assert_eq!(q.complement(Pair::new(3, 6, 7).unwrap()), None);
    }
}
