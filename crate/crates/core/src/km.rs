//! Kramer-Mesner matrix restricted to good orbits.
//!
//! Rows are t-subset orbits `T_i`, columns good k-subset orbits `K_j`. With
//! `b_ji` the number of t-subsets of a fixed `K ∈ K_j` lying in `T_i`, the
//! double count of incident (t-subset, block) pairs gives
//! `a_ij · |T_i| = b_ji · |K_j|`. Only the representative of `K_j` is ever
//! looked at.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use rayon::prelude::*;

use crate::error::{format_err, Error, Result};
use crate::orbitgen::{GoodOrbitSet, OrbitRep};
use crate::perm::{binomial, for_each_combination, PermutationGroup, PointSubset};

/// Maps every t-subset (as a mask) to the index of its orbit.
pub struct TOrbitLookup {
    t: usize,
    map: HashMap<u128, u32>,
}

impl TOrbitLookup {
    pub fn new(group: &PermutationGroup, t_orbits: &[OrbitRep]) -> Self {
        let mut map = HashMap::new();
        let t = t_orbits.first().map_or(0, |r| r.rep.len());
        for r in t_orbits {
            for s in group.orbit_of_subset(&r.rep) {
                map.insert(s.mask(), r.index as u32);
            }
        }
        TOrbitLookup { t, map }
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn index_of(&self, subset: &PointSubset) -> Option<u32> {
        self.map.get(&subset.mask()).copied()
    }
}

/// `b_ji` for block `block`: t-orbit index -> number of t-subsets of the block in it.
pub fn count_b(block: &PointSubset, lookup: &TOrbitLookup) -> Result<BTreeMap<u32, u32>> {
    let mut counts = BTreeMap::new();
    let pts = block.points();
    let mut missing = None;
    for_each_combination(pts.len(), lookup.t(), |idx| {
        let mask = idx.iter().fold(0u128, |m, &i| m | (1u128 << pts[i]));
        match lookup.map.get(&mask) {
            Some(&i) => *counts.entry(i).or_insert(0) += 1,
            None => missing = Some(mask),
        }
    });
    if let Some(mask) = missing {
        return Err(Error::OrbitNotFound(format!(
            "t-subset {} has no orbit",
            PointSubset::from_mask(mask)
        )));
    }
    Ok(counts)
}

/// Sparse 0/1 matrix in column-major form, plus orbit sizes of the columns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KmMatrix {
    pub m: usize,
    pub v: usize,
    pub k: usize,
    pub t: usize,
    /// `|K_j|` per column.
    pub sizes: Vec<u64>,
    col_ptr: Vec<usize>,
    rows: Vec<u32>,
}

impl KmMatrix {
    pub fn from_columns(m: usize, v: usize, k: usize, t: usize, columns: Vec<(u64, Vec<u32>)>) -> Result<Self> {
        let mut col_ptr = Vec::with_capacity(columns.len() + 1);
        col_ptr.push(0);
        let mut rows = Vec::new();
        let mut sizes = Vec::with_capacity(columns.len());
        for (j, (size, mut col)) in columns.into_iter().enumerate() {
            col.sort_unstable();
            if col.windows(2).any(|w| w[0] == w[1]) || col.last().is_some_and(|&r| r as usize >= m) {
                return Err(Error::Parameters(format!("column {j} has repeated or out of range rows")));
            }
            rows.extend_from_slice(&col);
            col_ptr.push(rows.len());
            sizes.push(size);
        }
        Ok(KmMatrix {
            m,
            v,
            k,
            t,
            sizes,
            col_ptr,
            rows,
        })
    }

    pub fn n(&self) -> usize {
        self.sizes.len()
    }

    /// Sorted row indices with `a_ij = 1`.
    pub fn column(&self, j: usize) -> &[u32] {
        &self.rows[self.col_ptr[j]..self.col_ptr[j + 1]]
    }

    pub fn nonzeros(&self) -> usize {
        self.rows.len()
    }

    pub fn to_text(&self, extra: &BTreeMap<String, String>) -> String {
        let mut out = String::with_capacity(self.rows.len() * 4 + self.n() * 16);
        write!(out, "{} {} {} {} {}", self.m, self.n(), self.v, self.k, self.t).unwrap();
        for (key, value) in extra {
            write!(out, " {key}={value}").unwrap();
        }
        out.push('\n');
        for j in 0..self.n() {
            write!(out, "{j} {} :", self.sizes[j]).unwrap();
            for r in self.column(j) {
                write!(out, " {r}").unwrap();
            }
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str) -> Result<(KmMatrix, BTreeMap<String, String>)> {
        let mut lines = text.lines().enumerate();
        let (_, header) = lines.next().ok_or_else(|| format_err(1, "empty KM file"))?;
        let toks: Vec<&str> = header.split_whitespace().collect();
        if toks.len() < 5 {
            return Err(format_err(1, "expected 'm n v k t'"));
        }
        let num = |line: usize, s: &str| s.parse::<usize>().map_err(|_| format_err(line, format!("bad number {s:?}")));
        let (m, n, v, k, t) = (
            num(1, toks[0])?,
            num(1, toks[1])?,
            num(1, toks[2])?,
            num(1, toks[3])?,
            num(1, toks[4])?,
        );
        let mut extra = BTreeMap::new();
        for tok in &toks[5..] {
            let (key, value) = tok
                .split_once('=')
                .ok_or_else(|| format_err(1, format!("bad header token {tok:?}")))?;
            extra.insert(key.to_string(), value.to_string());
        }
        let mut columns = Vec::with_capacity(n);
        for (ln, line) in lines {
            if line.trim().is_empty() {
                continue;
            }
            let (head, body) = line
                .split_once(':')
                .ok_or_else(|| format_err(ln + 1, "missing ':'"))?;
            let head: Vec<&str> = head.split_whitespace().collect();
            if head.len() != 2 {
                return Err(format_err(ln + 1, "expected 'j size_j :'"));
            }
            if num(ln + 1, head[0])? != columns.len() {
                return Err(format_err(ln + 1, "column index out of sequence"));
            }
            let size = num(ln + 1, head[1])? as u64;
            let rows = body
                .split_whitespace()
                .map(|s| num(ln + 1, s).map(|r| r as u32))
                .collect::<Result<Vec<u32>>>()?;
            columns.push((size, rows));
        }
        if columns.len() != n {
            return Err(format_err(1, format!("header says {n} columns, found {}", columns.len())));
        }
        let matrix = KmMatrix::from_columns(m, v, k, t, columns).map_err(|e| format_err(1, e.to_string()))?;
        Ok((matrix, extra))
    }
}

/// Kramer-Mesner instance together with the orbits it was built from.
#[derive(Clone, Debug)]
pub struct KmInstance {
    pub t_orbits: Vec<OrbitRep>,
    pub k_orbits: GoodOrbitSet,
    pub matrix: KmMatrix,
}

impl KmInstance {
    pub fn m(&self) -> usize {
        self.matrix.m
    }

    pub fn n(&self) -> usize {
        self.matrix.n()
    }

    pub fn column(&self, j: usize) -> &[u32] {
        self.matrix.column(j)
    }

    /// Checks `Σ_i a_ij |T_i| = |K_j| C(k,t)` for column `j`.
    pub fn column_weight_holds(&self, j: usize) -> bool {
        let lhs: u128 = self
            .column(j)
            .iter()
            .map(|&i| self.t_orbits[i as usize].orbit_size as u128)
            .sum();
        let k = self.k_orbits.k as u64;
        let t = self.k_orbits.t as u64;
        lhs == self.k_orbits.reps[j].orbit_size as u128 * binomial(k, t)
    }
}

/// Builds the 0/1 Kramer-Mesner matrix over good orbits.
pub fn build_km(group: &PermutationGroup, t_orbits: Vec<OrbitRep>, k_orbits: GoodOrbitSet) -> Result<KmInstance> {
    let lookup = TOrbitLookup::new(group, &t_orbits);
    let columns: Vec<(u64, Vec<u32>)> = k_orbits
        .reps
        .par_iter()
        .map(|kr| {
            let b = count_b(&kr.rep, &lookup)?;
            let mut rows = Vec::with_capacity(b.len());
            for (&i, &bji) in &b {
                let t_size = t_orbits[i as usize].orbit_size;
                let numerator = bji as u64 * kr.orbit_size;
                if !numerator.is_multiple_of(t_size) || numerator / t_size > 1 {
                    return Err(Error::BadEntry {
                        row: i as usize,
                        column: kr.index,
                        numerator,
                        denominator: t_size,
                    });
                }
                rows.push(i);
            }
            Ok((kr.orbit_size, rows))
        })
        .collect::<Result<_>>()?;
    let matrix = KmMatrix::from_columns(t_orbits.len(), k_orbits.v, k_orbits.k, k_orbits.t, columns)?;
    Ok(KmInstance {
        t_orbits,
        k_orbits,
        matrix,
    })
}
