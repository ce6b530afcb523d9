//! Partitions inside the `r × s` box.
//!
//! These index the Schubert basis of `H*(Gr(r, r+s))`. Every partition is
//! stored zero-padded to exactly `r` parts so that equality, hashing and
//! complementation never have to deal with ragged lengths.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The box dimensions `(r, s)` of the Grassmannian `Gr(r, r+s)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BoxContext {
    r: usize,
    s: usize,
}

impl BoxContext {
    pub fn new(r: usize, s: usize) -> Result<Self> {
        if r == 0 || s == 0 {
            return Err(Error::InvalidContext { r, s });
        }
        Ok(Self { r, s })
    }

    #[inline]
    pub fn r(&self) -> usize {
        self.r
    }

    #[inline]
    pub fn s(&self) -> usize {
        self.s
    }

    /// `r + s`, the dimension of the ambient vector space.
    #[inline]
    pub fn n(&self) -> usize {
        self.r + self.s
    }

    /// `rs`, the dimension of the Grassmannian.
    #[inline]
    pub fn dim(&self) -> usize {
        self.r * self.s
    }

    /// Number of Schubert classes, `binomial(r+s, r)`.
    pub fn basis_count(&self) -> usize {
        binomial(self.n(), self.r)
    }

    /// The box with the roles of `r` and `s` exchanged.
    pub fn dual(&self) -> Self {
        Self { r: self.s, s: self.r }
    }

    /// The empty partition, labelling the unit class.
    pub fn empty(&self) -> Partition {
        Partition { parts: vec![0; self.r] }
    }

    /// The full box `(s, …, s)`, labelling the point class.
    pub fn full(&self) -> Partition {
        Partition { parts: vec![self.s; self.r] }
    }

    /// The single row `(k, 0, …, 0)`.
    pub fn row(&self, k: usize) -> Result<Partition> {
        let mut parts = vec![0; self.r];
        parts[0] = k;
        Partition::new(*self, parts)
    }

    /// The single column `(1, …, 1)`.
    pub fn column(&self) -> Partition {
        Partition { parts: vec![1; self.r] }
    }

    pub fn contains(&self, a: &Partition) -> bool {
        a.parts.len() == self.r
            && a.parts.first().is_none_or(|&p| p <= self.s)
            && a.parts.windows(2).all(|w| w[0] >= w[1])
    }

    pub fn partitions(&self) -> Vec<Partition> {
        enumerate_partitions(*self)
    }
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// A weakly decreasing tuple `s ≥ a_1 ≥ … ≥ a_r ≥ 0`.
///
/// Ordering is graded: first by size, then lexicographically on the padded
/// tuple. This is the canonical order used for every serialized output.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Partition {
    parts: Vec<usize>,
}

impl Partition {
    /// Builds a partition from exactly `r` parts, validated against `ctx`.
    pub fn new(ctx: BoxContext, parts: Vec<usize>) -> Result<Self> {
        let p = Self { parts };
        if !ctx.contains(&p) {
            return Err(Error::InvalidPartition {
                parts: p.parts,
                r: ctx.r,
                s: ctx.s,
            });
        }
        Ok(p)
    }

    /// Accepts up to `r` parts and pads with zeros.
    pub fn from_loose(ctx: BoxContext, parts: &[usize]) -> Result<Self> {
        if parts.len() > ctx.r {
            return Err(Error::InvalidPartition {
                parts: parts.to_vec(),
                r: ctx.r,
                s: ctx.s,
            });
        }
        let mut padded = parts.to_vec();
        padded.resize(ctx.r, 0);
        Self::new(ctx, padded)
    }

    #[inline]
    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.iter().all(|&p| p == 0)
    }

    /// `|a| = Σ a_i`.
    pub fn size(&self) -> usize {
        self.parts.iter().sum()
    }

    /// `a^c = (s − a_r, …, s − a_1)`.
    pub fn complement(&self, ctx: BoxContext) -> Result<Partition> {
        if !ctx.contains(self) {
            return Err(Error::InvalidPartition {
                parts: self.parts.clone(),
                r: ctx.r,
                s: ctx.s,
            });
        }
        Ok(self.complement_unchecked(ctx.s))
    }

    pub(crate) fn complement_unchecked(&self, s: usize) -> Partition {
        Partition {
            parts: self.parts.iter().rev().map(|&p| s - p).collect(),
        }
    }

    pub(crate) fn from_parts_unchecked(parts: Vec<usize>) -> Self {
        Self { parts }
    }
}

impl Ord for Partition {
    fn cmp(&self, other: &Self) -> Ordering {
        self.size()
            .cmp(&other.size())
            .then_with(|| self.parts.cmp(&other.parts))
    }
}

impl PartialOrd for Partition {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, p) in self.parts.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}

impl Serialize for Partition {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.parts.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Partition {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let parts = Vec::<usize>::deserialize(deserializer)?;
        if !parts.windows(2).all(|w| w[0] >= w[1]) {
            return Err(serde::de::Error::custom(format!(
                "partition {parts:?} is not weakly decreasing"
            )));
        }
        Ok(Partition { parts })
    }
}

/// Every partition in the box, in canonical (graded) order.
pub fn enumerate_partitions(ctx: BoxContext) -> Vec<Partition> {
    let mut out = Vec::with_capacity(ctx.basis_count());
    let mut current = Vec::with_capacity(ctx.r);
    fill(ctx.r, ctx.s, &mut current, &mut out);
    out.sort();
    out
}

fn fill(r: usize, bound: usize, current: &mut Vec<usize>, out: &mut Vec<Partition>) {
    if current.len() == r {
        out.push(Partition::from_parts_unchecked(current.clone()));
        return;
    }
    for p in 0..=bound {
        current.push(p);
        fill(r, p, current, out);
        current.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(r: usize, s: usize) -> BoxContext {
        BoxContext::new(r, s).unwrap()
    }

    fn p(c: BoxContext, parts: &[usize]) -> Partition {
        Partition::from_loose(c, parts).unwrap()
    }

    /// Every tuple in `[0, s]^r` that is weakly decreasing.
    fn brute_force(c: BoxContext) -> Vec<Vec<usize>> {
        let total = (c.s + 1).pow(c.r as u32);
        let mut out = Vec::new();
        for mut code in 0..total {
            let mut t = Vec::with_capacity(c.r);
            for _ in 0..c.r {
                t.push(code % (c.s + 1));
                code /= c.s + 1;
            }
            if t.windows(2).all(|w| w[0] >= w[1]) {
                out.push(t);
            }
        }
        out
    }

    #[test]
    fn rejects_empty_box() {
        assert!(BoxContext::new(0, 3).is_err());
        assert!(BoxContext::new(2, 0).is_err());
    }

    #[test]
    fn enumerate_small_boxes() {
        let c = ctx(1, 1);
        let all = enumerate_partitions(c);
        assert_eq!(all, vec![p(c, &[0]), p(c, &[1])]);

        let c = ctx(2, 2);
        let all: Vec<Vec<usize>> = enumerate_partitions(c).iter().map(|a| a.parts().to_vec()).collect();
        assert_eq!(
            all,
            vec![vec![0, 0], vec![1, 0], vec![1, 1], vec![2, 0], vec![2, 1], vec![2, 2]]
        );

        assert_eq!(enumerate_partitions(ctx(2, 3)).len(), 10);
    }

    #[test]
    fn enumeration_matches_brute_force() {
        for r in 1..=4 {
            for s in 1..=4 {
                let c = ctx(r, s);
                let mut expected = brute_force(c);
                expected.sort();
                let mut got: Vec<Vec<usize>> =
                    enumerate_partitions(c).iter().map(|a| a.parts().to_vec()).collect();
                assert_eq!(got.len(), c.basis_count());
                got.sort();
                assert_eq!(got, expected, "r={r} s={s}");
            }
        }
    }

    #[test]
    fn complement_examples() {
        let c = ctx(2, 2);
        assert_eq!(p(c, &[]).complement(c).unwrap(), p(c, &[2, 2]));
        let c = ctx(2, 3);
        assert_eq!(p(c, &[2, 1]).complement(c).unwrap(), p(c, &[2, 1]));
        let c = ctx(1, 1);
        assert_eq!(p(c, &[1]).complement(c).unwrap(), p(c, &[0]));
    }

    #[test]
    fn complement_rejects_foreign_partition() {
        let big = ctx(2, 3);
        let small = ctx(2, 2);
        let a = p(big, &[3, 1]);
        assert!(a.complement(small).is_err());
    }

    #[test]
    fn invalid_partitions_rejected() {
        let c = ctx(2, 2);
        assert!(Partition::new(c, vec![1, 2]).is_err());
        assert!(Partition::new(c, vec![3, 0]).is_err());
        assert!(Partition::new(c, vec![1]).is_err());
        assert!(Partition::from_loose(c, &[1, 1, 1]).is_err());
    }

    #[test]
    fn sizes() {
        let c = ctx(3, 3);
        assert_eq!(p(c, &[]).size(), 0);
        assert_eq!(p(c, &[2, 1]).size(), 3);
        let c = ctx(2, 2);
        for a in c.partitions() {
            assert_eq!(a.size() + a.complement(c).unwrap().size(), c.dim());
        }
    }

    #[test]
    fn serializes_padded() {
        let c = ctx(3, 2);
        let a = p(c, &[2, 1]);
        assert_eq!(serde_json::to_string(&a).unwrap(), "[2,1,0]");
        let back: Partition = serde_json::from_str("[2,1,0]").unwrap();
        assert_eq!(back, a);
        assert!(serde_json::from_str::<Partition>("[1,2]").is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn complement_is_an_involution(r in 1usize..5, s in 1usize..5, pick in 0usize..1000) {
                let c = ctx(r, s);
                let all = c.partitions();
                let a = &all[pick % all.len()];
                let ac = a.complement(c).unwrap();
                prop_assert!(c.contains(&ac));
                prop_assert_eq!(ac.size(), c.dim() - a.size());
                prop_assert_eq!(&ac.complement(c).unwrap(), a);
            }
        }
    }
}
