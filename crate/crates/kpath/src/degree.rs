//! Degree monoids. Only `ℕ^k` is implemented; the [`DegreeMonoid`] trait is
//! the seam where another weakly quasi-lattice ordered pair could plug in.

use std::fmt;

use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::error::{Error, Result};

/// An element of `ℕ^k`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Degree(SmallVec<[u32; 2]>);

impl Degree {
    pub fn new(coords: impl IntoIterator<Item = u32>) -> Self {
        Degree(coords.into_iter().collect())
    }

    pub fn zero(k: usize) -> Self {
        Degree(SmallVec::from_elem(0, k))
    }

    /// The `i`-th standard generator of `ℕ^k`.
    pub fn unit(k: usize, i: usize) -> Self {
        let mut d = Self::zero(k);
        d.0[i] = 1;
        d
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[u32] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }

    fn check(&self, other: &Degree) -> Result<()> {
        if self.rank() != other.rank() {
            return Err(Error::RankMismatch {
                left: self.rank(),
                right: other.rank(),
            });
        }
        Ok(())
    }

    pub fn leq(&self, other: &Degree) -> Result<bool> {
        self.check(other)?;
        Ok(self.0.iter().zip(&other.0).all(|(a, b)| a <= b))
    }

    /// Coordinatewise maximum. Always present in `ℕ^k`.
    pub fn lub(&self, other: &Degree) -> Result<Degree> {
        self.check(other)?;
        Ok(Degree(self.0.iter().zip(&other.0).map(|(a, b)| *a.max(b)).collect()))
    }

    pub fn add(&self, other: &Degree) -> Result<Degree> {
        self.check(other)?;
        Ok(Degree(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect()))
    }

    /// `self - other`, defined when `other ≤ self`.
    pub fn sub(&self, other: &Degree) -> Result<Degree> {
        if !other.leq(self)? {
            return Err(Error::DegreeNotBelow {
                p: other.clone(),
                q: self.clone(),
            });
        }
        Ok(Degree(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect()))
    }

    /// Every degree `p` with `0 ≤ p ≤ self`, in lexicographic order.
    pub fn below(&self) -> Vec<Degree> {
        let mut out = vec![Degree(SmallVec::new())];
        for &c in self.0.iter() {
            let mut next = Vec::with_capacity(out.len() * (c as usize + 1));
            for p in &out {
                for v in 0..=c {
                    let mut q = p.clone();
                    q.0.push(v);
                    next.push(q);
                }
            }
            out = next;
        }
        out
    }

    /// The difference `self - other` in `ℤ^k`.
    pub fn diff(&self, other: &Degree) -> Result<GroupDegree> {
        self.check(other)?;
        Ok(GroupDegree(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| *a as i64 - *b as i64)
                .collect(),
        ))
    }

    /// Parses `"2,1"` or `"(2,1)"`.
    pub fn parse(s: &str) -> Result<Degree> {
        let t = s.trim().trim_start_matches(['(', '[']).trim_end_matches([')', ']']);
        let coords: std::result::Result<SmallVec<[u32; 2]>, _> =
            t.split(',').map(|c| c.trim().parse::<u32>()).collect();
        match coords {
            Ok(c) if !c.is_empty() => Ok(Degree(c)),
            _ => Err(Error::Parse {
                line: 0,
                message: format!("not a degree: {s:?}"),
            }),
        }
    }
}

impl fmt::Debug for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// An element `q = m - n` of the group completion `ℤ^k`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GroupDegree(SmallVec<[i64; 2]>);

impl GroupDegree {
    pub fn new(coords: impl IntoIterator<Item = i64>) -> Self {
        GroupDegree(coords.into_iter().collect())
    }

    pub fn zero(k: usize) -> Self {
        GroupDegree(SmallVec::from_elem(0, k))
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    pub fn add(&self, other: &GroupDegree) -> GroupDegree {
        GroupDegree(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn neg(&self) -> GroupDegree {
        GroupDegree(self.0.iter().map(|a| -a).collect())
    }
}

impl fmt::Debug for GroupDegree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for GroupDegree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// The operations a degree monoid `P` must provide.
pub trait DegreeMonoid {
    type Elem: Clone + Eq;

    fn unit(&self) -> Self::Elem;
    fn add(&self, p: &Self::Elem, q: &Self::Elem) -> Result<Self::Elem>;
    fn leq(&self, p: &Self::Elem, q: &Self::Elem) -> Result<bool>;
    /// Least common upper bound, `None` when `p` and `q` have no common upper bound.
    fn lub(&self, p: &Self::Elem, q: &Self::Elem) -> Result<Option<Self::Elem>>;
}

/// `ℕ^k` under addition.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NatK {
    pub rank: usize,
}

impl DegreeMonoid for NatK {
    type Elem = Degree;

    fn unit(&self) -> Degree {
        Degree::zero(self.rank)
    }

    fn add(&self, p: &Degree, q: &Degree) -> Result<Degree> {
        p.add(q)
    }

    fn leq(&self, p: &Degree, q: &Degree) -> Result<bool> {
        p.leq(q)
    }

    fn lub(&self, p: &Degree, q: &Degree) -> Result<Option<Degree>> {
        p.lub(q).map(Some)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn d(c: &[u32]) -> Degree {
        Degree::new(c.iter().copied())
    }

    #[test]
    fn order_examples() {
        assert!(d(&[0, 0]).leq(&d(&[3, 1])).unwrap());
        assert!(!d(&[1, 0]).leq(&d(&[0, 1])).unwrap());
        assert!(d(&[1, 1]).leq(&d(&[1, 1])).unwrap());
    }

    #[test]
    fn lub_examples() {
        assert_eq!(d(&[1, 0]).lub(&d(&[0, 1])).unwrap(), d(&[1, 1]));
        assert_eq!(d(&[2, 3]).lub(&d(&[2, 3])).unwrap(), d(&[2, 3]));
        assert_eq!(Degree::zero(2).lub(&d(&[5, 0])).unwrap(), d(&[5, 0]));
    }

    #[test]
    fn rank_mismatch_is_an_error() {
        assert!(matches!(d(&[1]).leq(&d(&[1, 0])), Err(Error::RankMismatch { .. })));
        assert!(d(&[1]).lub(&d(&[1, 0])).is_err());
    }

    #[test]
    fn below_lists_the_box() {
        let b = d(&[1, 2]).below();
        assert_eq!(b.len(), 6);
        assert_eq!(b[0], d(&[0, 0]));
        assert_eq!(b[5], d(&[1, 2]));
    }

    #[test]
    fn parse_forms() {
        assert_eq!(Degree::parse("2,1").unwrap(), d(&[2, 1]));
        assert_eq!(Degree::parse("(0,3)").unwrap(), d(&[0, 3]));
        assert!(Degree::parse("x").is_err());
    }

    #[test]
    fn no_nontrivial_units() {
        let m = NatK { rank: 2 };
        for p in d(&[2, 2]).below() {
            for q in d(&[2, 2]).below() {
                if m.add(&p, &q).unwrap() == m.unit() {
                    assert!(p.is_zero() && q.is_zero());
                }
            }
        }
    }

    #[test]
    fn lub_is_least_on_a_box() {
        let all = d(&[3, 3]).below();
        for p in &all {
            for q in &all {
                let l = p.lub(q).unwrap();
                assert_eq!(l, q.lub(p).unwrap());
                assert!(p.leq(&l).unwrap() && q.leq(&l).unwrap());
                for r in &all {
                    if p.leq(r).unwrap() && q.leq(r).unwrap() {
                        assert!(l.leq(r).unwrap());
                    }
                }
            }
        }
    }

    proptest! {
        #[test]
        fn add_is_associative_and_cancellative(a in prop::collection::vec(0u32..50, 3),
                                               b in prop::collection::vec(0u32..50, 3),
                                               c in prop::collection::vec(0u32..50, 3)) {
            let (a, b, c) = (d(&a), d(&b), d(&c));
            prop_assert_eq!(a.add(&b).unwrap().add(&c).unwrap(), a.add(&b.add(&c).unwrap()).unwrap());
            let ab = a.add(&b).unwrap();
            prop_assert_eq!(ab.sub(&a).unwrap(), b.clone());
            if a.add(&b).unwrap() == a.add(&c).unwrap() {
                prop_assert_eq!(b, c);
            }
        }

        #[test]
        fn diff_matches_sub(a in prop::collection::vec(0u32..20, 2), b in prop::collection::vec(0u32..20, 2)) {
            let (a, b) = (d(&a), d(&b));
            let s = a.add(&b).unwrap();
            let q = s.diff(&b).unwrap();
            prop_assert_eq!(q.coords().iter().map(|&x| x as u32).collect::<Vec<_>>(), a.coords().to_vec());
            prop_assert!(s.diff(&s).unwrap().is_zero());
        }
    }
}
