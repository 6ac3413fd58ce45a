//! Small index sets over `0..32`, stored as bitmasks.
//!
//! Internally indices are 0-based. JSON uses the 1-based labels of the
//! mathematical notation, so `{0, 2}` serializes as `[1, 3]`.

use std::fmt;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub const MAX_INDEX: usize = 32;

#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IdxSet(u32);

impl IdxSet {
    pub const EMPTY: IdxSet = IdxSet(0);

    pub fn from_bits(bits: u32) -> Self {
        IdxSet(bits)
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    /// `{0, .., n-1}`.
    pub fn full(n: usize) -> Self {
        assert!(n <= MAX_INDEX);
        if n == MAX_INDEX {
            IdxSet(u32::MAX)
        } else {
            IdxSet((1u32 << n) - 1)
        }
    }

    pub fn single(i: usize) -> Self {
        assert!(i < MAX_INDEX);
        IdxSet(1 << i)
    }

    pub fn contains(self, i: usize) -> bool {
        i < MAX_INDEX && self.0 >> i & 1 == 1
    }

    pub fn insert(&mut self, i: usize) {
        assert!(i < MAX_INDEX);
        self.0 |= 1 << i;
    }

    pub fn with(mut self, i: usize) -> Self {
        self.insert(i);
        self
    }

    pub fn without(self, i: usize) -> Self {
        IdxSet(self.0 & !(1 << i))
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn union(self, other: IdxSet) -> IdxSet {
        IdxSet(self.0 | other.0)
    }

    pub fn intersection(self, other: IdxSet) -> IdxSet {
        IdxSet(self.0 & other.0)
    }

    pub fn difference(self, other: IdxSet) -> IdxSet {
        IdxSet(self.0 & !other.0)
    }

    pub fn is_subset(self, other: IdxSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_disjoint(self, other: IdxSet) -> bool {
        self.0 & other.0 == 0
    }

    /// Complement inside `{0, .., n-1}`.
    pub fn complement(self, n: usize) -> IdxSet {
        IdxSet(!self.0 & IdxSet::full(n).0)
    }

    pub fn min(self) -> Option<usize> {
        (self.0 != 0).then(|| self.0.trailing_zeros() as usize)
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let i = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(i)
            }
        })
    }

    pub fn to_vec(self) -> Vec<usize> {
        self.iter().collect()
    }

    /// All subsets of `{0, .., n-1}` in increasing bit order.
    pub fn all_subsets(n: usize) -> impl Iterator<Item = IdxSet> {
        assert!(n < MAX_INDEX);
        (0u32..1 << n).map(IdxSet)
    }

    /// Subsets of `self`, including the empty set and `self`.
    pub fn subsets(self) -> impl Iterator<Item = IdxSet> {
        let full = self.0;
        let mut cur = Some(0u32);
        std::iter::from_fn(move || {
            let c = cur?;
            cur = if c == full {
                None
            } else {
                Some((c.wrapping_sub(full)) & full)
            };
            Some(IdxSet(c))
        })
    }
}

impl FromIterator<usize> for IdxSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut s = IdxSet::EMPTY;
        for i in iter {
            s.insert(i);
        }
        s
    }
}

impl fmt::Debug for IdxSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, i) in self.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", i + 1)?;
        }
        write!(f, "}}")
    }
}

impl fmt::Display for IdxSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl Serialize for IdxSet {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let v: Vec<usize> = self.iter().map(|i| i + 1).collect();
        v.serialize(s)
    }
}

impl<'de> Deserialize<'de> for IdxSet {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = Vec::<usize>::deserialize(d)?;
        let mut s = IdxSet::EMPTY;
        for i in v {
            if i == 0 || i > MAX_INDEX {
                return Err(D::Error::custom(format!(
                    "index {i} out of range 1..={MAX_INDEX}"
                )));
            }
            s.insert(i - 1);
        }
        Ok(s)
    }
}

/// Serde adapter writing a 0-based index as its 1-based label.
pub mod one_based {
    use super::*;

    pub fn serialize<S: Serializer>(i: &usize, s: S) -> Result<S::Ok, S::Error> {
        (i + 1).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<usize, D::Error> {
        let i = usize::deserialize(d)?;
        if i == 0 {
            return Err(D::Error::custom("labels are 1-based"));
        }
        Ok(i - 1)
    }
}

/// Serde adapter for a sequence of 0-based indices.
pub mod one_based_vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[usize], s: S) -> Result<S::Ok, S::Error> {
        let w: Vec<usize> = v.iter().map(|i| i + 1).collect();
        w.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<usize>, D::Error> {
        let v = Vec::<usize>::deserialize(d)?;
        v.into_iter()
            .map(|i| {
                i.checked_sub(1)
                    .ok_or_else(|| D::Error::custom("labels are 1-based"))
            })
            .collect()
    }
}

/// All set partitions of `{0, .., n-1}`, blocks ordered by their minima.
pub fn set_partitions(n: usize) -> Vec<Vec<IdxSet>> {
    fn go(i: usize, n: usize, cur: &mut Vec<IdxSet>, out: &mut Vec<Vec<IdxSet>>) {
        if i == n {
            out.push(cur.clone());
            return;
        }
        for b in 0..cur.len() {
            cur[b].insert(i);
            go(i + 1, n, cur, out);
            cur[b] = cur[b].without(i);
        }
        cur.push(IdxSet::single(i));
        go(i + 1, n, cur, out);
        cur.pop();
    }
    let mut out = Vec::new();
    go(0, n, &mut Vec::new(), &mut out);
    out
}

/// All ordered triples of distinct elements of `labels`.
pub fn ordered_triples(labels: &[usize]) -> Vec<[usize; 3]> {
    let mut out = Vec::new();
    for &a in labels {
        for &b in labels {
            for &c in labels {
                if a != b && a != c && b != c {
                    out.push([a, b, c]);
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bell_numbers() {
        let counts: Vec<usize> = (0..=6).map(|n| set_partitions(n).len()).collect();
        assert_eq!(counts, vec![1, 1, 2, 5, 15, 52, 203]);
    }

    #[test]
    fn subsets_enumeration() {
        let s: IdxSet = [1, 3, 4].into_iter().collect();
        let subs: Vec<IdxSet> = s.subsets().collect();
        assert_eq!(subs.len(), 8);
        assert!(subs.iter().all(|t| t.is_subset(s)));
        assert_eq!(IdxSet::EMPTY.subsets().count(), 1);
    }

    #[test]
    fn json_is_one_based() {
        let s: IdxSet = [0, 2].into_iter().collect();
        assert_eq!(serde_json::to_string(&s).unwrap(), "[1,3]");
        let back: IdxSet = serde_json::from_str("[1,3]").unwrap();
        assert_eq!(back, s);
        assert!(serde_json::from_str::<IdxSet>("[0]").is_err());
        assert_eq!(format!("{s}"), "{1,3}");
    }

    #[test]
    fn complement_and_min() {
        let s: IdxSet = [1, 2].into_iter().collect();
        assert_eq!(s.complement(4).to_vec(), vec![0, 3]);
        assert_eq!(s.min(), Some(1));
        assert_eq!(IdxSet::EMPTY.min(), None);
        assert_eq!(ordered_triples(&[0, 1, 2, 3]).len(), 24);
    }
}
