//! Block designs: expansion from orbits, Steiner verification, canonical
//! forms and isomorphism classification.

mod canon;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use rayon::prelude::*;

use crate::error::{format_err, Error, Result};
use crate::orbitgen::GoodOrbitSet;
use crate::perm::{binomial, for_each_combination, Permutation, PermutationGroup, PointSubset};

pub use canon::{canonical_form, canonical_form_with_budget, CanonicalForm, DEFAULT_BUDGET};

/// A uniform block design on points `0..v`. Blocks are kept sorted.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Design {
    v: usize,
    k: usize,
    blocks: Vec<PointSubset>,
}

impl Design {
    pub fn new(v: usize, mut blocks: Vec<PointSubset>) -> Result<Design> {
        let k = blocks.first().map_or(0, |b| b.len());
        for b in &blocks {
            if b.len() != k {
                return Err(Error::Parameters(format!("block {b} has size {} instead of {k}", b.len())));
            }
            if let Some(&p) = b.points().last() {
                if p as usize >= v {
                    return Err(Error::PointOutOfRange {
                        point: p as usize + 1,
                        degree: v,
                    });
                }
            }
        }
        blocks.sort();
        if let Some(w) = blocks.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateBlock(w[0].to_string()));
        }
        Ok(Design { v, k, blocks })
    }

    pub fn v(&self) -> usize {
        self.v
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn b(&self) -> usize {
        self.blocks.len()
    }

    pub fn blocks(&self) -> &[PointSubset] {
        &self.blocks
    }

    /// The design with every point `x` renamed to `p(x)`.
    pub fn relabel(&self, p: &Permutation) -> Design {
        let mut blocks: Vec<PointSubset> = self.blocks.iter().map(|b| b.image(p)).collect();
        blocks.sort();
        Design {
            v: self.v,
            k: self.k,
            blocks,
        }
    }

    /// Whether `p` maps the block set onto itself.
    pub fn is_automorphism(&self, p: &Permutation) -> bool {
        p.degree() == self.v && self.relabel(p).blocks == self.blocks
    }

    /// Header `v=<v> b=<b> k=<k>`, then one block per line with 1-based points.
    pub fn to_text(&self) -> String {
        let mut out = format!("v={} b={} k={}\n", self.v, self.b(), self.k);
        for b in &self.blocks {
            let pts: Vec<String> = b.one_based().iter().map(|p| p.to_string()).collect();
            out.push_str(&pts.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str) -> Result<Design> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or_else(|| format_err(1, "empty design file"))?;
        let mut fields = BTreeMap::new();
        for tok in header.split_whitespace() {
            let (key, val) = tok
                .split_once('=')
                .ok_or_else(|| format_err(1, format!("expected key=value, got {tok:?}")))?;
            let val: usize = val.parse().map_err(|_| format_err(1, format!("bad number in {tok:?}")))?;
            fields.insert(key, val);
        }
        let get = |key: &str| fields.get(key).copied().ok_or_else(|| format_err(1, format!("missing {key}=")));
        let (v, b, k) = (get("v")?, get("b")?, get("k")?);
        let mut blocks = Vec::with_capacity(b);
        for (n, line) in lines {
            let pts = line
                .split_whitespace()
                .map(|t| t.parse::<usize>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|_| format_err(n + 1, "expected point numbers"))?;
            if pts.len() != k {
                return Err(format_err(n + 1, format!("block has {} points, expected {k}", pts.len())));
            }
            blocks.push(PointSubset::from_one_based(&pts, v).map_err(|e| format_err(n + 1, e.to_string()))?);
        }
        if blocks.len() != b {
            return Err(format_err(1, format!("header says b={b} but found {} blocks", blocks.len())));
        }
        Design::new(v, blocks)
    }

    /// The block list as a nested list literal, 1-based, readable by GAP.
    pub fn to_gap(&self) -> String {
        let mut out = String::from("[\n");
        for (i, b) in self.blocks.iter().enumerate() {
            let pts: Vec<String> = b.one_based().iter().map(|p| p.to_string()).collect();
            write!(out, "  [ {} ]", pts.join(", ")).unwrap();
            out.push_str(if i + 1 < self.blocks.len() { ",\n" } else { "\n" });
        }
        out.push_str("]\n");
        out
    }

    /// Reads a nested list literal as written by [`Design::to_gap`].
    pub fn parse_gap(text: &str, v: usize) -> Result<Design> {
        let body = text.trim();
        let inner = body
            .strip_prefix('[')
            .and_then(|s| s.strip_suffix(']'))
            .ok_or_else(|| format_err(1, "expected an outer list"))?;
        let mut blocks = Vec::new();
        let mut rest = inner;
        while let Some(start) = rest.find('[') {
            let end = rest[start..]
                .find(']')
                .ok_or_else(|| format_err(1, "unterminated block"))?
                + start;
            let pts = rest[start + 1..end]
                .split(',')
                .map(|t| t.trim().parse::<usize>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|_| format_err(1, "expected point numbers"))?;
            blocks.push(PointSubset::from_one_based(&pts, v)?);
            rest = &rest[end + 1..];
        }
        Design::new(v, blocks)
    }
}

/// Union of the full orbits of the chosen k-orbit representatives.
pub fn expand(indices: &BTreeSet<u32>, k_orbits: &GoodOrbitSet, group: &PermutationGroup) -> Result<Design> {
    let mut blocks = Vec::new();
    let mut expected = 0u64;
    for &j in indices {
        let r = k_orbits
            .reps
            .get(j as usize)
            .ok_or_else(|| Error::Parameters(format!("k-orbit index {j} out of range")))?;
        let orbit = group.orbit_of_subset(&r.rep);
        expected += orbit.len() as u64;
        blocks.extend(orbit);
    }
    let d = Design::new(k_orbits.v, blocks)?;
    debug_assert_eq!(d.b() as u64, expected);
    Ok(d)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SteinerReport {
    pub t: usize,
    pub pass: bool,
    /// Number of t-subsets not covered exactly once.
    pub violation_count: u64,
    /// The first (at most 10) violating t-subsets in lex order, with their cover counts.
    pub violations: Vec<(PointSubset, u32)>,
    /// Blocks per point, when it is the same for every point.
    pub replication: Option<usize>,
}

pub const MAX_REPORTED_VIOLATIONS: usize = 10;

fn colex_rank(points: &[usize]) -> usize {
    points
        .iter()
        .enumerate()
        .map(|(i, &p)| binomial(p as u64, i as u64 + 1) as usize)
        .sum()
}

/// Checks that every t-subset of the points lies in exactly one block.
pub fn verify_steiner(d: &Design, t: usize) -> Result<SteinerReport> {
    let total = binomial(d.v as u64, t as u64);
    if total > 1 << 32 {
        return Err(Error::Parameters(format!("C({}, {t}) t-subsets is too many to tabulate", d.v)));
    }
    let mut counts = vec![0u32; total as usize];
    let mut buf = Vec::with_capacity(t);
    for b in &d.blocks {
        let pts = b.points();
        for_each_combination(pts.len(), t, |idx| {
            buf.clear();
            buf.extend(idx.iter().map(|&i| pts[i] as usize));
            counts[colex_rank(&buf)] += 1;
        });
    }
    let mut violations = Vec::new();
    let mut violation_count = 0u64;
    for_each_combination(d.v, t, |idx| {
        let c = counts[colex_rank(idx)];
        if c != 1 {
            violation_count += 1;
            if violations.len() < MAX_REPORTED_VIOLATIONS {
                violations.push((PointSubset::from_sorted_unchecked(&idx.iter().map(|&p| p as u16).collect::<Vec<_>>()), c));
            }
        }
    });
    let mut per_point = vec![0usize; d.v];
    for b in &d.blocks {
        for &p in b.points() {
            per_point[p as usize] += 1;
        }
    }
    let replication = match per_point.split_first() {
        Some((&r, rest)) if rest.iter().all(|&x| x == r) => Some(r),
        None => Some(0),
        _ => None,
    };
    Ok(SteinerReport {
        t,
        pass: violation_count == 0,
        violation_count,
        violations,
        replication,
    })
}

/// One isomorphism class of designs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IsoClass {
    /// The first input design in this class.
    pub representative: Design,
    pub certificate: Vec<u8>,
    pub aut_order: u128,
    /// Indices into the classified list, ascending.
    pub members: Vec<usize>,
}

impl IsoClass {
    pub fn multiplicity(&self) -> usize {
        self.members.len()
    }
}

/// Groups designs by canonical certificate, sorted by certificate.
pub fn classify(designs: &[Design], budget: u64) -> Result<Vec<IsoClass>> {
    if let Some(d) = designs.iter().find(|d| (d.v, d.k) != (designs[0].v, designs[0].k)) {
        return Err(Error::Parameters(format!(
            "designs differ in parameters: ({}, {}) vs ({}, {})",
            designs[0].v, designs[0].k, d.v, d.k
        )));
    }
    let forms: Vec<CanonicalForm> = designs
        .par_iter()
        .map(|d| canonical_form_with_budget(d, budget))
        .collect::<Result<_>>()?;
    let mut classes: BTreeMap<Vec<u8>, IsoClass> = BTreeMap::new();
    for (i, (d, f)) in designs.iter().zip(forms).enumerate() {
        classes
            .entry(f.certificate.clone())
            .or_insert_with(|| IsoClass {
                representative: d.clone(),
                certificate: f.certificate,
                aut_order: f.aut_order,
                members: Vec::new(),
            })
            .members
            .push(i);
    }
    Ok(classes.into_values().collect())
}
