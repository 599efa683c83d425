//! Canonical labeling by individualization and refinement on the
//! point/block incidence graph.
//!
//! Vertices `0..v` are points and `v..v+b` blocks. An ordered partition
//! names each cell by its start position, so cell ids are label-invariant.
//! Refinement splits cells by neighbor counts into splitter cells until the
//! partition is equitable, and hashes what it did into a trace value. At a
//! discrete partition the point positions give a relabeling and the
//! certificate is the relabeled block list. The canonical leaf is the one
//! with the smallest (trace, certificate). Leaves with equal certificates
//! yield automorphisms, which prune the tree.

use std::collections::VecDeque;

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::perm::{Permutation, PermutationGroup};

use super::Design;

/// Search-tree node cap used by [`canonical_form`].
pub const DEFAULT_BUDGET: u64 = 10_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CanonicalForm {
    /// `v` and `b` as big-endian u16, then the sorted relabeled blocks, each
    /// point as a big-endian u16.
    pub certificate: Vec<u8>,
    /// Order of the automorphism group acting on points.
    pub aut_order: u128,
    /// Automorphisms found during the search; they generate the full group.
    pub generators: Vec<Permutation>,
    /// Point relabeling that produces the certificate.
    pub labeling: Permutation,
    pub nodes: u64,
}

impl CanonicalForm {
    /// The canonically labeled design.
    pub fn canonical_design(&self, d: &Design) -> Design {
        d.relabel(&self.labeling)
    }
}

pub fn canonical_form(d: &Design) -> Result<CanonicalForm> {
    canonical_form_with_budget(d, DEFAULT_BUDGET)
}

pub fn canonical_form_with_budget(d: &Design, budget: u64) -> Result<CanonicalForm> {
    let mut s = Search::new(d, budget);
    let mut part = Partition::unit(s.v, s.n);
    let initial: Vec<u32> = part.cell_starts().collect();
    let mut trace = vec![s.refine(&mut part, &initial)];
    let mut prefix = Vec::new();
    s.dfs(&part, &mut prefix, &mut trace)?;
    let best = s.best.take().expect("search reaches at least one leaf");
    let generators: Vec<Permutation> = s
        .autos
        .iter()
        .map(|a| Permutation::from_images_unchecked(a[..s.v].to_vec()))
        .collect();
    let aut_order = PermutationGroup::new(s.v.max(1), generators.clone())?.order();
    Ok(CanonicalForm {
        certificate: best.cert,
        aut_order,
        generators,
        labeling: Permutation::from_images_unchecked(best.lab),
        nodes: s.nodes,
    })
}

/// Ordered partition of the vertices. `lab` lists the vertices cell by cell;
/// a cell is named by the position of its first vertex.
#[derive(Clone)]
struct Partition {
    lab: Vec<u32>,
    cell_of: Vec<u32>,
    /// Cell length, valid at cell starts.
    len: Vec<u32>,
}

impl Partition {
    /// Points in one cell, blocks in another.
    fn unit(v: usize, n: usize) -> Self {
        let mut len = vec![0u32; n];
        let mut cell_of = vec![0u32; n];
        if v > 0 {
            len[0] = v as u32;
        }
        if n > v {
            len[v] = (n - v) as u32;
            cell_of[v..].fill(v as u32);
        }
        Partition {
            lab: (0..n as u32).collect(),
            cell_of,
            len,
        }
    }

    fn cell_starts(&self) -> impl Iterator<Item = u32> + '_ {
        let mut i = 0usize;
        std::iter::from_fn(move || {
            (i < self.lab.len()).then(|| {
                let c = i as u32;
                i += self.len[i] as usize;
                c
            })
        })
    }

    /// First smallest non-singleton cell.
    fn target_cell(&self) -> Option<u32> {
        let mut best: Option<u32> = None;
        for c in self.cell_starts() {
            let l = self.len[c as usize];
            if l > 1 && best.is_none_or(|b| l < self.len[b as usize]) {
                best = Some(c);
            }
        }
        best
    }

    fn members(&self, c: u32) -> &[u32] {
        &self.lab[c as usize..(c + self.len[c as usize]) as usize]
    }

    /// Splits `x` off the front of its cell.
    fn individualize(&mut self, x: u32) -> u32 {
        let c = self.cell_of[x as usize] as usize;
        let l = self.len[c] as usize;
        let i = self.lab[c..c + l].iter().position(|&y| y == x).expect("vertex in its cell") + c;
        self.lab.swap(c, i);
        self.len[c] = 1;
        self.len[c + 1] = (l - 1) as u32;
        for &y in &self.lab[c + 1..c + l] {
            self.cell_of[y as usize] = (c + 1) as u32;
        }
        c as u32
    }
}

struct Leaf {
    /// Refinement invariants along the path; compared before `cert`.
    trace: Vec<u64>,
    cert: Vec<u8>,
    /// Point -> canonical position.
    lab: Vec<u32>,
    path: Vec<u32>,
}

struct Search<'a> {
    d: &'a Design,
    v: usize,
    n: usize,
    adj_ptr: Vec<usize>,
    adj: Vec<u32>,
    block_index: HashMap<Vec<u16>, u32>,
    first: Option<Leaf>,
    best: Option<Leaf>,
    /// Automorphisms on all `n` vertices.
    autos: Vec<Vec<u32>>,
    nodes: u64,
    budget: u64,
    // scratch for refinement
    count: Vec<u32>,
    in_queue: Vec<bool>,
}

impl<'a> Search<'a> {
    fn new(d: &'a Design, budget: u64) -> Self {
        let v = d.v();
        let b = d.b();
        let n = v + b;
        let mut point_blocks: Vec<Vec<u32>> = vec![Vec::new(); v];
        for (j, blk) in d.blocks().iter().enumerate() {
            for &p in blk.points() {
                point_blocks[p as usize].push((v + j) as u32);
            }
        }
        let mut adj_ptr = vec![0];
        let mut adj = Vec::new();
        for pb in &point_blocks {
            adj.extend_from_slice(pb);
            adj_ptr.push(adj.len());
        }
        for blk in d.blocks() {
            adj.extend(blk.points().iter().map(|&p| p as u32));
            adj_ptr.push(adj.len());
        }
        let block_index = d
            .blocks()
            .iter()
            .enumerate()
            .map(|(j, blk)| (blk.points().to_vec(), (v + j) as u32))
            .collect();
        Search {
            d,
            v,
            n,
            adj_ptr,
            adj,
            block_index,
            first: None,
            best: None,
            autos: Vec::new(),
            nodes: 0,
            budget,
            count: vec![0; n],
            in_queue: vec![false; n],
        }
    }

    /// Refines `p` to an equitable partition, starting from the splitter
    /// cells `queue`. Each cell is split by the number of neighbors its
    /// vertices have in a splitter; fragments are ordered by that count, so
    /// the result depends only on the input partition. Returns a hash of the
    /// splits performed, which is label-invariant.
    fn refine(&mut self, p: &mut Partition, queue: &[u32]) -> u64 {
        let mut hash = Fnv::default();
        let mut queue: VecDeque<u32> = queue.iter().copied().collect();
        for &w in &queue {
            self.in_queue[w as usize] = true;
        }
        let mut touched: Vec<u32> = Vec::new();
        let mut touched_cells: Vec<u32> = Vec::new();
        while let Some(w) = queue.pop_front() {
            self.in_queue[w as usize] = false;
            hash.word(w);
            for i in w as usize..(w + p.len[w as usize]) as usize {
                let x = p.lab[i] as usize;
                for j in self.adj_ptr[x]..self.adj_ptr[x + 1] {
                    let y = self.adj[j] as usize;
                    if self.count[y] == 0 {
                        touched.push(y as u32);
                    }
                    self.count[y] += 1;
                }
            }
            touched_cells.clear();
            touched_cells.extend(touched.iter().map(|&y| p.cell_of[y as usize]));
            touched_cells.sort_unstable();
            touched_cells.dedup();
            for &c in &touched_cells {
                let (start, l) = (c as usize, p.len[c as usize] as usize);
                if l == 1 {
                    continue;
                }
                let count = &self.count;
                let cell = &mut p.lab[start..start + l];
                cell.sort_unstable_by_key(|&x| count[x as usize]);
                if count[cell[0] as usize] == count[cell[l - 1] as usize] {
                    continue;
                }
                hash.word(c);
                let was_queued = self.in_queue[start];
                let mut fragments: Vec<(usize, usize)> = Vec::new();
                let mut f = 0;
                for i in 1..=l {
                    if i == l || count[cell[i] as usize] != count[cell[f] as usize] {
                        hash.word(count[cell[f] as usize]);
                        hash.word((i - f) as u32);
                        fragments.push((start + f, i - f));
                        f = i;
                    }
                }
                for &(fs, fl) in &fragments {
                    p.len[fs] = fl as u32;
                    for &x in &p.lab[fs..fs + fl] {
                        p.cell_of[x as usize] = fs as u32;
                    }
                }
                // Hopcroft: unless the whole cell was pending, the largest
                // fragment need not split anything further.
                let skip = if was_queued {
                    Some(start)
                } else {
                    fragments.iter().rev().max_by_key(|&&(_, fl)| fl).map(|&(fs, _)| fs)
                };
                for &(fs, _) in &fragments {
                    if Some(fs) != skip && !self.in_queue[fs] {
                        self.in_queue[fs] = true;
                        queue.push_back(fs as u32);
                    }
                }
            }
            for &y in &touched {
                self.count[y as usize] = 0;
            }
            touched.clear();
        }
        hash.0
    }

    fn leaf(&self, p: &Partition, path: &[u32], trace: &[u64]) -> Leaf {
        let lab: Vec<u32> = p.cell_of[..self.v].to_vec();
        let mut blocks: Vec<Vec<u16>> = self
            .d
            .blocks()
            .iter()
            .map(|blk| {
                let mut b: Vec<u16> = blk.points().iter().map(|&p| lab[p as usize] as u16).collect();
                b.sort_unstable();
                b
            })
            .collect();
        blocks.sort_unstable();
        let mut cert = Vec::with_capacity(4 + 2 * self.d.b() * self.d.k());
        cert.extend_from_slice(&(self.v as u16).to_be_bytes());
        cert.extend_from_slice(&(self.d.b() as u16).to_be_bytes());
        for b in &blocks {
            for &p in b {
                cert.extend_from_slice(&p.to_be_bytes());
            }
        }
        Leaf {
            trace: trace.to_vec(),
            cert,
            lab,
            path: path.to_vec(),
        }
    }

    /// The automorphism taking leaf `from` to leaf `to`, on all vertices.
    fn automorphism(&self, from: &Leaf, to: &Leaf) -> Vec<u32> {
        let mut inv_to = vec![0u32; self.v];
        for (x, &l) in to.lab.iter().enumerate() {
            inv_to[l as usize] = x as u32;
        }
        let mut a: Vec<u32> = from.lab.iter().map(|&l| inv_to[l as usize]).collect();
        for blk in self.d.blocks() {
            let mut img: Vec<u16> = blk.points().iter().map(|&p| a[p as usize] as u16).collect();
            img.sort_unstable();
            a.push(self.block_index[&img]);
        }
        a
    }

    /// Orbit ids of the group generated by the known automorphisms that fix
    /// every vertex of `prefix`.
    fn orbits_fixing(&self, prefix: &[u32]) -> Vec<u32> {
        let mut parent: Vec<u32> = (0..self.n as u32).collect();
        fn find(p: &mut [u32], mut x: u32) -> u32 {
            while p[x as usize] != x {
                p[x as usize] = p[p[x as usize] as usize];
                x = p[x as usize];
            }
            x
        }
        for a in &self.autos {
            if prefix.iter().all(|&x| a[x as usize] == x) {
                for (x, &y) in a.iter().enumerate() {
                    let (rx, ry) = (find(&mut parent, x as u32), find(&mut parent, y));
                    if rx != ry {
                        parent[rx.max(ry) as usize] = rx.min(ry);
                    }
                }
            }
        }
        (0..self.n as u32).map(|x| find(&mut parent, x)).collect()
    }

    /// Returns `Some(level)` to abandon everything below depth `level`.
    /// `trace` already holds this node's invariant.
    fn dfs(&mut self, part: &Partition, prefix: &mut Vec<u32>, trace: &mut Vec<u64>) -> Result<Option<usize>> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(Error::BudgetExceeded(self.budget));
        }
        let depth = prefix.len();
        if let (Some(first), Some(best)) = (&self.first, &self.best) {
            // Keep nodes that may hold a leaf at least as good as the best,
            // and nodes on the first leaf's trace, which may yield automorphisms.
            let on_first = first.trace.get(..trace.len()) == Some(&trace[..]);
            let beats_best = trace[..] <= best.trace[..trace.len().min(best.trace.len())];
            if !on_first && !beats_best {
                return Ok(None);
            }
        }
        let Some(target) = part.target_cell() else {
            return Ok(self.visit_leaf(part, prefix, trace));
        };
        let mut members: Vec<u32> = part.members(target).to_vec();
        members.sort_unstable();
        let mut explored: Vec<u32> = Vec::new();
        for &x in &members {
            if !explored.is_empty() {
                let orbit = self.orbits_fixing(prefix);
                if explored.iter().any(|&y| orbit[y as usize] == orbit[x as usize]) {
                    continue;
                }
            }
            explored.push(x);
            let mut child = part.clone();
            let single = child.individualize(x);
            trace.push(self.refine(&mut child, &[single]));
            prefix.push(x);
            let r = self.dfs(&child, prefix, trace);
            prefix.pop();
            trace.pop();
            if let Some(level) = r? {
                if level < depth {
                    return Ok(Some(level));
                }
            }
        }
        Ok(None)
    }

    fn visit_leaf(&mut self, part: &Partition, prefix: &[u32], trace: &[u64]) -> Option<usize> {
        let leaf = self.leaf(part, prefix, trace);
        let (Some(first), Some(best)) = (&self.first, &self.best) else {
            self.best = Some(Leaf {
                trace: leaf.trace.clone(),
                cert: leaf.cert.clone(),
                lab: leaf.lab.clone(),
                path: leaf.path.clone(),
            });
            self.first = Some(leaf);
            return None;
        };
        let matched = [first, best]
            .into_iter()
            .find(|r| r.cert == leaf.cert)
            .map(|r| (self.automorphism(r, &leaf), common_prefix(&r.path, &leaf.path)));
        if let Some((a, back)) = matched {
            if a.iter().enumerate().any(|(x, &y)| x as u32 != y) {
                self.autos.push(a);
            }
            return Some(back);
        }
        if (&leaf.trace, &leaf.cert) < (&best.trace, &best.cert) {
            self.best = Some(leaf);
        }
        None
    }
}

/// FNV-1a over 32-bit words; stable across builds, unlike the std hasher.
struct Fnv(u64);

impl Default for Fnv {
    fn default() -> Self {
        Fnv(0xcbf2_9ce4_8422_2325)
    }
}

impl Fnv {
    fn word(&mut self, w: u32) {
        for b in w.to_le_bytes() {
            self.0 ^= b as u64;
            self.0 = self.0.wrapping_mul(0x0100_0000_01b3);
        }
    }
}

fn common_prefix(a: &[u32], b: &[u32]) -> usize {
    a.iter().zip(b).take_while(|(x, y)| x == y).count()
}
