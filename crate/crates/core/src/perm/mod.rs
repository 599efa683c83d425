//! Permutations, point subsets and permutation groups.
//!
//! Points are stored 0-based. Everything that is parsed or printed uses the
//! usual 1-based point labels.

mod group;
pub mod io;
pub mod order84;

use std::fmt;

use smallvec::SmallVec;

use crate::error::{Error, Result};

pub use group::{cyclic_group, normalizer_of_cyclic, verify_normalizes, PermutationGroup, ELEMENT_CAP};

/// A permutation of `{0, .., degree - 1}` acting on the right: `x^p = p.apply(x)`.
///
/// Products follow the same convention, `p.compose(q)` applies `p` first.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<u32>,
}

impl Permutation {
    pub fn identity(degree: usize) -> Self {
        Permutation {
            images: (0..degree as u32).collect(),
        }
    }

    /// Builds a permutation from 0-based images, checking bijectivity.
    pub fn from_images(images: Vec<u32>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &x in &images {
            let x = x as usize;
            if x >= n {
                return Err(Error::PointOutOfRange {
                    point: x + 1,
                    degree: n,
                });
            }
            if seen[x] {
                return Err(Error::NotBijection(format!("image {} repeated", x + 1)));
            }
            seen[x] = true;
        }
        Ok(Permutation { images })
    }

    pub(crate) fn from_images_unchecked(images: Vec<u32>) -> Self {
        debug_assert!(Permutation::from_images(images.clone()).is_ok());
        Permutation { images }
    }

    /// Parses cycle notation `(1,2,4)(3,5)` or a 1-based image list `2 4 5 1 3`.
    ///
    /// In cycle notation points not mentioned are fixed. The identity may be
    /// written `()`.
    pub fn parse(text: &str, degree: usize) -> Result<Self> {
        let text = text.trim();
        if text.starts_with('(') {
            parse_cycles(text, degree)
        } else {
            let mut images = Vec::with_capacity(degree);
            for tok in text.split(|c: char| c.is_whitespace() || c == ',') {
                if tok.is_empty() {
                    continue;
                }
                let p: usize = tok
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad point {tok:?}")))?;
                if p == 0 || p > degree {
                    return Err(Error::PointOutOfRange { point: p, degree });
                }
                images.push((p - 1) as u32);
            }
            if images.len() != degree {
                return Err(Error::NotBijection(format!(
                    "image list has {} entries, expected {degree}",
                    images.len()
                )));
            }
            Permutation::from_images(images)
        }
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    #[inline]
    pub fn apply(&self, x: usize) -> usize {
        self.images[x] as usize
    }

    pub fn images(&self) -> &[u32] {
        &self.images
    }

    /// `self` followed by `other`.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        debug_assert_eq!(self.degree(), other.degree());
        Permutation {
            images: self.images.iter().map(|&x| other.images[x as usize]).collect(),
        }
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0u32; self.images.len()];
        for (i, &x) in self.images.iter().enumerate() {
            inv[x as usize] = i as u32;
        }
        Permutation { images: inv }
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &x)| i as u32 == x)
    }

    pub fn smallest_moved_point(&self) -> Option<usize> {
        self.images
            .iter()
            .enumerate()
            .find(|&(i, &x)| i as u32 != x)
            .map(|(i, _)| i)
    }

    pub fn order(&self) -> u64 {
        let mut seen = vec![false; self.degree()];
        let mut lcm = 1u64;
        for start in 0..self.degree() {
            if seen[start] {
                continue;
            }
            let mut len = 0u64;
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                x = self.apply(x);
                len += 1;
            }
            lcm = lcm / gcd(lcm, len) * len;
        }
        lcm
    }

    /// Disjoint cycles of length at least two, 0-based, each starting at its
    /// smallest point.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.degree()];
        let mut out = Vec::new();
        for start in 0..self.degree() {
            if seen[start] || self.apply(start) == start {
                seen[start] = true;
                continue;
            }
            let mut cycle = Vec::new();
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                cycle.push(x);
                x = self.apply(x);
            }
            out.push(cycle);
        }
        out
    }

    /// Extends (or keeps) the permutation to a larger degree by fixing new points.
    pub fn extend_to(&self, degree: usize) -> Permutation {
        assert!(degree >= self.degree());
        let mut images = self.images.clone();
        images.extend(self.degree() as u32..degree as u32);
        Permutation { images }
    }
}

impl fmt::Display for Permutation {
    /// Cycle notation with 1-based points; the identity prints as `()`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return f.write_str("()");
        }
        for c in cycles {
            f.write_str("(")?;
            for (i, x) in c.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{}", x + 1)?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Permutation({self})")
    }
}

fn parse_cycles(text: &str, degree: usize) -> Result<Permutation> {
    let mut images: Vec<Option<u32>> = vec![None; degree];
    let mut used = vec![false; degree];
    let mut rest = text;
    while !rest.is_empty() {
        rest = rest.trim_start();
        if rest.is_empty() {
            break;
        }
        let Some(body) = rest.strip_prefix('(') else {
            return Err(Error::Parse(format!("expected '(' in {text:?}")));
        };
        let close = body
            .find(')')
            .ok_or_else(|| Error::Parse(format!("unclosed cycle in {text:?}")))?;
        let inner = &body[..close];
        rest = &body[close + 1..];
        let mut cycle = Vec::new();
        for tok in inner.split(|c: char| c == ',' || c.is_whitespace()) {
            if tok.is_empty() {
                continue;
            }
            let p: usize = tok
                .parse()
                .map_err(|_| Error::Parse(format!("bad point {tok:?}")))?;
            if p == 0 || p > degree {
                return Err(Error::PointOutOfRange { point: p, degree });
            }
            if used[p - 1] {
                return Err(Error::DuplicatePoint(p));
            }
            used[p - 1] = true;
            cycle.push(p - 1);
        }
        for (i, &x) in cycle.iter().enumerate() {
            images[x] = Some(cycle[(i + 1) % cycle.len()] as u32);
        }
    }
    let images = images
        .into_iter()
        .enumerate()
        .map(|(i, x)| x.unwrap_or(i as u32))
        .collect();
    Permutation::from_images(images)
}

pub(crate) fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// A sorted set of distinct points (0-based), e.g. a block or a t-subset.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PointSubset {
    points: SmallVec<[u16; 8]>,
}

impl PointSubset {
    /// Sorts the given 0-based points and checks range and distinctness.
    pub fn new(points: impl IntoIterator<Item = usize>, degree: usize) -> Result<Self> {
        let mut pts: SmallVec<[u16; 8]> = SmallVec::new();
        for p in points {
            if p >= degree {
                return Err(Error::PointOutOfRange {
                    point: p + 1,
                    degree,
                });
            }
            pts.push(p as u16);
        }
        pts.sort_unstable();
        if let Some(w) = pts.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicatePoint(w[0] as usize + 1));
        }
        Ok(PointSubset { points: pts })
    }

    /// Same as [`PointSubset::new`] but with 1-based labels.
    pub fn from_one_based(points: &[usize], degree: usize) -> Result<Self> {
        let mut zero = Vec::with_capacity(points.len());
        for &p in points {
            if p == 0 || p > degree {
                return Err(Error::PointOutOfRange { point: p, degree });
            }
            zero.push(p - 1);
        }
        PointSubset::new(zero, degree)
    }

    pub(crate) fn from_sorted_unchecked(points: &[u16]) -> Self {
        debug_assert!(points.windows(2).all(|w| w[0] < w[1]));
        PointSubset {
            points: SmallVec::from_slice(points),
        }
    }

    /// Points set in a `u128` mask (requires all points < 128).
    pub fn from_mask(mut mask: u128) -> Self {
        let mut pts = SmallVec::new();
        while mask != 0 {
            let p = mask.trailing_zeros() as u16;
            pts.push(p);
            mask &= mask - 1;
        }
        PointSubset { points: pts }
    }

    pub fn points(&self) -> &[u16] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn contains(&self, p: usize) -> bool {
        self.points.binary_search(&(p as u16)).is_ok()
    }

    pub fn is_subset_of(&self, other: &PointSubset) -> bool {
        self.points.iter().all(|&p| other.contains(p as usize))
    }

    pub fn intersection_len(&self, other: &PointSubset) -> usize {
        self.points.iter().filter(|&&p| other.contains(p as usize)).count()
    }

    /// Mask form; panics if a point is 128 or larger.
    pub fn mask(&self) -> u128 {
        self.points.iter().fold(0u128, |m, &p| {
            assert!(p < 128, "point {} does not fit a 128-bit mask", p + 1);
            m | (1u128 << p)
        })
    }

    /// Image under `g`, re-sorted.
    pub fn image(&self, g: &Permutation) -> PointSubset {
        let mut pts: SmallVec<[u16; 8]> = self.points.iter().map(|&p| g.apply(p as usize) as u16).collect();
        pts.sort_unstable();
        PointSubset { points: pts }
    }

    /// Points as 1-based labels.
    pub fn one_based(&self) -> Vec<usize> {
        self.points.iter().map(|&p| p as usize + 1).collect()
    }

    /// All `t`-subsets of this set in lexicographic order.
    pub fn subsets(&self, t: usize) -> Vec<PointSubset> {
        let mut out = Vec::new();
        for_each_combination(self.points.len(), t, |idx| {
            let pts: SmallVec<[u16; 8]> = idx.iter().map(|&i| self.points[i]).collect();
            out.push(PointSubset { points: pts });
        });
        out
    }
}

impl fmt::Display for PointSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, p) in self.points.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}", p + 1)?;
        }
        f.write_str("}")
    }
}

impl fmt::Debug for PointSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Calls `f` with every increasing index tuple of length `k` from `0..n`.
pub fn for_each_combination(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] != i + n - k {
                break;
            }
            if i == 0 {
                return;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut r: u128 = 1;
    for i in 0..k {
        r = r * (n - i) as u128 / (i + 1) as u128;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_cycle_notation() {
        let p = Permutation::parse("(1,2,3)(4,5,6,7)", 7).unwrap();
        let one_based: Vec<u32> = p.images().iter().map(|x| x + 1).collect();
        assert_eq!(one_based, vec![2, 3, 1, 5, 6, 7, 4]);
    }

    #[test]
    fn parse_image_list_identity() {
        let p = Permutation::parse("1 2 3 4 5 6 7", 7).unwrap();
        assert!(p.is_identity());
    }

    #[test]
    fn parse_transposition() {
        let p = Permutation::parse("(2,3)", 3).unwrap();
        assert_eq!(p.images(), &[0, 2, 1]);
        assert_eq!(p.to_string(), "(2,3)");
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(
            Permutation::parse("(1,2,1)", 3),
            Err(Error::DuplicatePoint(1))
        ));
        assert!(matches!(
            Permutation::parse("(1,4)", 3),
            Err(Error::PointOutOfRange { point: 4, .. })
        ));
        assert!(matches!(
            Permutation::parse("1 1 2", 3),
            Err(Error::NotBijection(_))
        ));
        assert!(Permutation::parse("1 2", 3).is_err());
        assert!(Permutation::parse("(1,2", 3).is_err());
        assert!(Permutation::parse("()", 3).unwrap().is_identity());
    }

    #[test]
    fn compose_inverse_is_identity() {
        let p = Permutation::parse("(1,5,2)(3,4)", 6).unwrap();
        assert!(p.compose(&p.inverse()).is_identity());
        assert_eq!(p.order(), 6);
        let q = Permutation::parse("(1,2)", 6).unwrap();
        // p first, then q
        assert_eq!(p.compose(&q).apply(0), 4);
        assert_eq!(p.compose(&q).apply(1), 1);
    }

    #[test]
    fn subset_basics() {
        let s = PointSubset::from_one_based(&[4, 1, 2], 7).unwrap();
        assert_eq!(s.one_based(), vec![1, 2, 4]);
        assert_eq!(s.to_string(), "{1,2,4}");
        assert_eq!(PointSubset::from_mask(s.mask()), s);
        assert_eq!(s.subsets(2).len(), 3);
        assert!(PointSubset::from_one_based(&[1, 1], 7).is_err());
        assert!(PointSubset::from_one_based(&[8], 7).is_err());
    }

    #[test]
    fn combinations_count() {
        let mut n = 0;
        for_each_combination(7, 3, |_| n += 1);
        assert_eq!(n, 35);
        assert_eq!(binomial(91, 6), 666_563_898);
        let mut n = 0;
        for_each_combination(3, 0, |_| n += 1);
        assert_eq!(n, 1);
    }
}
