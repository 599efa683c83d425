//! Orbit representatives of t-subsets and of good k-subsets.
//!
//! Generation is an orderly depth-first search over increasing point
//! sequences `s_1 < s_2 < ...`, with subsets held as 128-bit masks. Two prunes
//! are applied to every partial set `S`:
//!
//! * (P1) some `g` has `sorted(S^g) < S`: every prefix of a lex-minimal set is
//!   lex-minimal among its own images, so no completion of `S` is minimal.
//! * (P2) some `g` has `|S ∩ S^g| >= t` and `|S ∪ S^g| > k`: any completion
//!   `K` would need `K^g = K` to avoid covering a t-subset twice, but then
//!   `K ⊇ S ∪ S^g` is too large.
//!
//! For sets of equal size, `A < B` lexicographically (as sorted sequences)
//! iff the smallest element of `A △ B` lies in `A`.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use rayon::prelude::*;

use crate::error::{format_err, Error, Result};
use crate::perm::{PermutationGroup, PointSubset};

/// Largest degree supported by the mask representation.
pub const MAX_DEGREE: usize = 128;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitRep {
    /// Lex-minimal member of the orbit.
    pub rep: PointSubset,
    pub orbit_size: u64,
    /// Position in lex order of representatives, from 0.
    pub index: usize,
}

#[derive(Clone, Debug)]
pub struct GoodOrbitSet {
    pub v: usize,
    pub k: usize,
    pub t: usize,
    pub reps: Vec<OrbitRep>,
    /// Free-form name of the prescribed group (e.g. its file name).
    pub group_id: String,
}

impl GoodOrbitSet {
    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }

    /// Map from representative mask to orbit index.
    pub fn index_map(&self) -> HashMap<u128, u32> {
        self.reps
            .iter()
            .map(|r| (r.rep.mask(), r.index as u32))
            .collect()
    }
}

/// Group elements as a flat table of point images, for mask arithmetic.
pub struct ElementTable {
    v: usize,
    images: Vec<u8>,
    order: usize,
}

impl ElementTable {
    pub fn new(group: &PermutationGroup) -> Result<Self> {
        let v = group.degree();
        if v > MAX_DEGREE {
            return Err(Error::Parameters(format!(
                "degree {v} exceeds the supported maximum {MAX_DEGREE}"
            )));
        }
        let elems = group.elements()?;
        let mut images = Vec::with_capacity(elems.len() * v);
        for g in elems {
            images.extend(g.images().iter().map(|&x| x as u8));
        }
        Ok(ElementTable {
            v,
            images,
            order: elems.len(),
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn image_point(&self, g: usize, p: usize) -> usize {
        self.images[g * self.v + p] as usize
    }

    #[inline]
    pub fn image_mask(&self, g: usize, mut mask: u128) -> u128 {
        let row = &self.images[g * self.v..(g + 1) * self.v];
        let mut out = 0u128;
        while mask != 0 {
            let p = mask.trailing_zeros() as usize;
            out |= 1u128 << row[p];
            mask &= mask - 1;
        }
        out
    }

    /// Lex-minimal image of `mask`.
    pub fn lex_min(&self, mask: u128) -> u128 {
        let mut best = mask;
        for g in 0..self.order {
            let img = self.image_mask(g, mask);
            if lex_less(img, best) {
                best = img;
            }
        }
        best
    }
}

/// `a < b` as sorted sequences, for masks of equal popcount.
#[inline]
pub fn lex_less(a: u128, b: u128) -> bool {
    let x = a ^ b;
    x != 0 && a & x & x.wrapping_neg() != 0
}

#[derive(Clone, Copy, Debug)]
pub struct SearchOptions {
    /// Keep only good orbits for this `t`.
    pub good_for: Option<usize>,
    /// Apply prune (P2); only meaningful with `good_for`.
    pub stabilizer_prune: bool,
}

struct Search<'a> {
    table: &'a ElementTable,
    v: usize,
    k: usize,
    opts: SearchOptions,
}

impl Search<'_> {
    /// Extends `set` by `next`, writing images into `out`; false if pruned.
    fn extend(&self, set: u128, imgs: &[u128], next: usize, out: &mut [u128]) -> bool {
        let new = set | (1u128 << next);
        let size = new.count_ones() as usize;
        for g in 0..self.table.order {
            let img = imgs[g] | (1u128 << self.table.image_point(g, next));
            if lex_less(img, new) {
                return false;
            }
            if let (Some(t), true) = (self.opts.good_for, self.opts.stabilizer_prune) {
                if (new & img).count_ones() as usize >= t && (new | img).count_ones() as usize > self.k {
                    return false;
                }
            }
            out[g] = img;
        }
        debug_assert_eq!(size, new.count_ones() as usize);
        true
    }

    fn leaf(&self, set: u128, imgs: &[u128]) -> Option<(u128, u64)> {
        let mut stab = 0u64;
        for &img in imgs {
            if img == set {
                stab += 1;
            } else if let Some(t) = self.opts.good_for {
                if (set & img).count_ones() as usize >= t {
                    return None;
                }
            }
        }
        Some((set, self.table.order as u64 / stab))
    }

    fn dfs(&self, set: u128, last: Option<usize>, stack: &mut [Vec<u128>], depth: usize, out: &mut Vec<(u128, u64)>) {
        let start = last.map_or(0, |p| p + 1);
        let remaining = self.k - depth;
        if self.v < remaining {
            return;
        }
        let (cur, rest) = stack.split_at_mut(1);
        for next in start..=self.v - remaining {
            if !self.extend(set, &cur[0], next, &mut rest[0]) {
                continue;
            }
            let new = set | (1u128 << next);
            if depth + 1 == self.k {
                if let Some(leaf) = self.leaf(new, &rest[0]) {
                    out.push(leaf);
                }
            } else {
                self.dfs(new, Some(next), rest, depth + 1, out);
            }
        }
    }

    /// Surviving partial sets of size `depth` (with their images), in lex order.
    fn prefixes(&self, depth: usize) -> Vec<(u128, usize, Vec<u128>)> {
        let mut level = vec![(0u128, usize::MAX, vec![0u128; self.table.order])];
        for d in 0..depth {
            let mut next_level = Vec::new();
            for (set, last, imgs) in level {
                let start = if last == usize::MAX { 0 } else { last + 1 };
                for next in start..=self.v - (self.k - d) {
                    let mut out = vec![0u128; self.table.order];
                    if self.extend(set, &imgs, next, &mut out) {
                        next_level.push((set | (1u128 << next), next, out));
                    }
                }
            }
            level = next_level;
        }
        level
    }

    fn run(&self) -> Vec<(u128, u64)> {
        let n = self.table.order;
        let shard_depth = if self.k >= 4 { 2 } else { 0 };
        let prefixes = self.prefixes(shard_depth);
        let shards: Vec<Vec<(u128, u64)>> = prefixes
            .into_par_iter()
            .map(|(set, last, imgs)| {
                let mut stack = vec![vec![0u128; n]; self.k - shard_depth + 1];
                stack[0] = imgs;
                let mut out = Vec::new();
                let last = if last == usize::MAX { None } else { Some(last) };
                if shard_depth == self.k {
                    out.extend(self.leaf(set, &stack[0]));
                } else {
                    self.dfs(set, last, &mut stack, shard_depth, &mut out);
                }
                out
            })
            .collect();
        shards.into_iter().flatten().collect()
    }
}

fn check_group(group: &PermutationGroup, v: usize) -> Result<()> {
    if group.degree() != v {
        return Err(Error::DegreeMismatch {
            left: group.degree(),
            right: v,
        });
    }
    if v > MAX_DEGREE {
        return Err(Error::Parameters(format!(
            "degree {v} exceeds the supported maximum {MAX_DEGREE}"
        )));
    }
    Ok(())
}

/// Lex-minimal orbit representatives of k-subsets with orbit sizes.
pub fn orderly_orbits(group: &PermutationGroup, v: usize, k: usize, opts: SearchOptions) -> Result<Vec<(u128, u64)>> {
    check_group(group, v)?;
    if k > v {
        return Err(Error::Parameters(format!("subset size {k} exceeds v = {v}")));
    }
    let table = ElementTable::new(group)?;
    let search = Search {
        table: &table,
        v,
        k,
        opts,
    };
    Ok(search.run())
}

fn to_reps(found: Vec<(u128, u64)>) -> Vec<OrbitRep> {
    found
        .into_iter()
        .enumerate()
        .map(|(index, (mask, orbit_size))| OrbitRep {
            rep: PointSubset::from_mask(mask),
            orbit_size,
            index,
        })
        .collect()
}

/// One representative per orbit on t-subsets.
pub fn t_orbit_reps(group: &PermutationGroup, v: usize, t: usize) -> Result<Vec<OrbitRep>> {
    if t == 0 || t >= v {
        return Err(Error::Parameters(format!("need 1 <= t < v, got t = {t}, v = {v}")));
    }
    let opts = SearchOptions {
        good_for: None,
        stabilizer_prune: false,
    };
    Ok(to_reps(orderly_orbits(group, v, t, opts)?))
}

/// Number of orbits on k-subsets, good or not.
pub fn count_k_orbits(group: &PermutationGroup, v: usize, k: usize) -> Result<u64> {
    let opts = SearchOptions {
        good_for: None,
        stabilizer_prune: false,
    };
    Ok(orderly_orbits(group, v, k, opts)?.len() as u64)
}

/// True iff no two distinct blocks of the orbit of `block` share `t` points.
pub fn is_good_orbit(group: &PermutationGroup, block: &PointSubset, t: usize) -> Result<bool> {
    if block.len() <= t {
        return Err(Error::Parameters(format!(
            "block size {} must exceed t = {t}",
            block.len()
        )));
    }
    let elems = group.elements()?;
    Ok(elems.iter().all(|g| {
        let img = block.image(g);
        img == *block || block.intersection_len(&img) < t
    }))
}

fn check_params(v: usize, k: usize, t: usize) -> Result<()> {
    if !(1 <= t && t < k && k < v) {
        return Err(Error::Parameters(format!(
            "need 1 <= t < k < v, got v = {v}, k = {k}, t = {t}"
        )));
    }
    Ok(())
}

/// Good k-orbit representatives in lex order.
pub fn good_k_orbit_reps(group: &PermutationGroup, v: usize, k: usize, t: usize) -> Result<GoodOrbitSet> {
    good_k_orbit_reps_with(group, v, k, t, true)
}

/// As [`good_k_orbit_reps`], optionally without prune (P2).
pub fn good_k_orbit_reps_with(
    group: &PermutationGroup,
    v: usize,
    k: usize,
    t: usize,
    stabilizer_prune: bool,
) -> Result<GoodOrbitSet> {
    check_params(v, k, t)?;
    let opts = SearchOptions {
        good_for: Some(t),
        stabilizer_prune,
    };
    let reps = to_reps(orderly_orbits(group, v, k, opts)?);
    Ok(GoodOrbitSet {
        v,
        k,
        t,
        reps,
        group_id: String::new(),
    })
}

/// Parsed orbit file.
#[derive(Clone, Debug, PartialEq)]
pub struct OrbitFile {
    pub v: usize,
    pub k: usize,
    pub t: usize,
    pub group: String,
    pub reps: Vec<OrbitRep>,
    /// Additional `key=value` header tokens.
    pub extra: BTreeMap<String, String>,
}

impl OrbitFile {
    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(self.reps.len() * 24 + 64);
        write!(
            out,
            "{} {} {} group={} count={}",
            self.v,
            self.k,
            self.t,
            self.group,
            self.reps.len()
        )
        .unwrap();
        for (key, value) in &self.extra {
            write!(out, " {key}={value}").unwrap();
        }
        out.push('\n');
        for r in &self.reps {
            for p in r.rep.points() {
                write!(out, "{} ", p + 1).unwrap();
            }
            writeln!(out, "size={}", r.orbit_size).unwrap();
        }
        out
    }

    pub fn parse(text: &str) -> Result<OrbitFile> {
        let mut lines = text.lines().enumerate();
        let (_, header) = lines.next().ok_or_else(|| format_err(1, "empty orbit file"))?;
        let toks: Vec<&str> = header.split_whitespace().collect();
        if toks.len() < 5 {
            return Err(format_err(1, "expected 'v k t group=<g> count=<n>'"));
        }
        let num = |s: &str| s.parse::<usize>().map_err(|_| format_err(1, format!("bad number {s:?}")));
        let (v, k, t) = (num(toks[0])?, num(toks[1])?, num(toks[2])?);
        let mut group = None;
        let mut count = None;
        let mut extra = BTreeMap::new();
        for tok in &toks[3..] {
            let (key, value) = tok
                .split_once('=')
                .ok_or_else(|| format_err(1, format!("bad header token {tok:?}")))?;
            match key {
                "group" => group = Some(value.to_string()),
                "count" => count = Some(num(value)?),
                _ => {
                    extra.insert(key.to_string(), value.to_string());
                }
            }
        }
        let group = group.ok_or_else(|| format_err(1, "missing group="))?;
        let count = count.ok_or_else(|| format_err(1, "missing count="))?;
        let mut reps = Vec::with_capacity(count);
        for (n, line) in lines {
            if line.trim().is_empty() {
                continue;
            }
            let mut points = Vec::new();
            let mut size = None;
            for tok in line.split_whitespace() {
                if let Some(s) = tok.strip_prefix("size=") {
                    size = Some(s.parse::<u64>().map_err(|_| format_err(n + 1, "bad size"))?);
                } else {
                    points.push(tok.parse::<usize>().map_err(|_| format_err(n + 1, format!("bad point {tok:?}")))?);
                }
            }
            let rep = PointSubset::from_one_based(&points, v).map_err(|e| format_err(n + 1, e.to_string()))?;
            if rep.len() != k {
                return Err(format_err(n + 1, format!("expected {k} points")));
            }
            let orbit_size = size.ok_or_else(|| format_err(n + 1, "missing size="))?;
            reps.push(OrbitRep {
                rep,
                orbit_size,
                index: reps.len(),
            });
        }
        if reps.len() != count {
            return Err(format_err(1, format!("header says {count} orbits, found {}", reps.len())));
        }
        Ok(OrbitFile {
            v,
            k,
            t,
            group,
            reps,
            extra,
        })
    }
}
