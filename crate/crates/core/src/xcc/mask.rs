//! Exact cover search over bitmasks, for problems with at most 128 primary
//! items.
//!
//! Each search node holds the list of options still compatible with the
//! partial solution, as primary-item masks. A child list is one sequential
//! filter pass over its parent. Branching follows the same rule as the
//! linked engine (fewest compatible options, lowest item id), options are
//! tried in id order and nodes are counted the same way, so both engines
//! report identical solution sequences and node counts.

use std::ops::{BitAnd, BitOr, BitXor};
use std::time::Instant;

use super::dlx::{LimitKind, SolveLimits, SolveMode, SolveStats};
use super::{Solution, XccProblem, NO_COLOR};

pub(super) trait Bits:
    Copy + Eq + Default + BitAnd<Output = Self> + BitOr<Output = Self> + BitXor<Output = Self> + Send + Sync
{
    const BITS: usize;
    fn bit(i: usize) -> Self;
    fn is_zero(self) -> bool;
    fn lowest(self) -> usize;
    fn clear_lowest(self) -> Self;
}

macro_rules! impl_bits {
    ($t:ty) => {
        impl Bits for $t {
            const BITS: usize = <$t>::BITS as usize;
            #[inline]
            fn bit(i: usize) -> Self {
                1 << i
            }
            #[inline]
            fn is_zero(self) -> bool {
                self == 0
            }
            #[inline]
            fn lowest(self) -> usize {
                self.trailing_zeros() as usize
            }
            #[inline]
            fn clear_lowest(self) -> Self {
                self & (self - 1)
            }
        }
    };
}

impl_bits!(u64);
impl_bits!(u128);

/// Marker in `xcolor` for a secondary item the branching option leaves alone.
const ABSENT: u32 = u32::MAX - 1;

struct Level<B> {
    ids: Vec<u32>,
    masks: Vec<B>,
}

impl<B> Default for Level<B> {
    fn default() -> Self {
        Level {
            ids: Vec::new(),
            masks: Vec::new(),
        }
    }
}

struct Search<'a, B, F> {
    p: &'a XccProblem,
    masks: Vec<B>,
    has_sec: Vec<bool>,
    /// Color the current branching option gives each secondary item, or `ABSENT`.
    xcolor: Vec<u32>,
    pool: Vec<Level<B>>,
    chosen: Vec<u32>,
    stats: SolveStats,
    mode: SolveMode,
    max_nodes: u64,
    max_solutions: u64,
    max_seconds: Option<f64>,
    start: Instant,
    stop: bool,
    on_solution: F,
}

pub(super) fn solve_masks<B: Bits, F: FnMut(&Solution)>(
    p: &XccProblem,
    mode: SolveMode,
    limits: SolveLimits,
    on_solution: F,
) -> SolveStats {
    assert!(p.primary_items().len() <= B::BITS);
    let start = Instant::now();
    let n = p.num_options();
    let masks: Vec<B> = (0..n)
        .map(|o| {
            p.option_primary(o)
                .iter()
                .fold(B::default(), |m, &i| m | B::bit(i as usize))
        })
        .collect();
    let has_sec = (0..n).map(|o| p.sec_ptr[o] != p.sec_ptr[o + 1]).collect();
    let full = (0..p.primary_items().len()).fold(B::default(), |m, i| m | B::bit(i));
    let mut s = Search {
        p,
        masks,
        has_sec,
        xcolor: vec![ABSENT; p.secondary_items().len()],
        pool: Vec::new(),
        chosen: Vec::new(),
        stats: SolveStats {
            nodes: 1,
            solutions: 0,
            elapsed: 0.0,
            limit_hit: None,
        },
        mode,
        max_nodes: limits.max_nodes.unwrap_or(u64::MAX),
        max_solutions: match mode {
            SolveMode::First => 1.min(limits.max_solutions.unwrap_or(1)),
            _ => limits.max_solutions.unwrap_or(u64::MAX),
        },
        max_seconds: limits.max_seconds,
        start,
        stop: false,
        on_solution,
    };
    let root = Level {
        ids: (0..n as u32).collect(),
        masks: s.masks.clone(),
    };
    s.node(full, &root, 0);
    s.stats.elapsed = start.elapsed().as_secs_f64();
    s.stats
}

impl<B: Bits, F: FnMut(&Solution)> Search<'_, B, F> {
    fn emit(&mut self) {
        self.stats.solutions += 1;
        if self.mode != SolveMode::Count {
            let mut ids = self.chosen.clone();
            ids.sort_unstable();
            (self.on_solution)(&Solution { option_ids: ids });
        }
        if self.stats.solutions >= self.max_solutions {
            if self.mode != SolveMode::First {
                self.stats.limit_hit = Some(LimitKind::Solutions);
            }
            self.stop = true;
        }
    }

    fn choose(&self, remaining: B, level: &Level<B>) -> (usize, u32) {
        let mut counts = [0u32; 128];
        for &m in &level.masks {
            let mut m = m;
            while !m.is_zero() {
                counts[m.lowest()] += 1;
                m = m.clear_lowest();
            }
        }
        let mut best = (usize::MAX, u32::MAX);
        let mut r = remaining;
        while !r.is_zero() {
            let i = r.lowest();
            if counts[i] < best.1 {
                best = (i, counts[i]);
                if counts[i] == 0 {
                    break;
                }
            }
            r = r.clear_lowest();
        }
        best
    }

    fn node(&mut self, remaining: B, level: &Level<B>, depth: usize) {
        if remaining.is_zero() {
            self.emit();
            return;
        }
        let (item, count) = self.choose(remaining, level);
        if count == 0 {
            return;
        }
        let bit = B::bit(item);
        if self.pool.len() <= depth {
            self.pool.resize_with(depth + 1, Level::default);
        }
        let mut child = std::mem::take(&mut self.pool[depth]);
        for idx in 0..level.ids.len() {
            if (level.masks[idx] & bit).is_zero() {
                continue;
            }
            if self.stats.nodes >= self.max_nodes {
                self.stats.limit_hit = Some(LimitKind::Nodes);
                self.stop = true;
                break;
            }
            self.stats.nodes += 1;
            if self.stats.nodes & 0xfff == 0 {
                if let Some(secs) = self.max_seconds {
                    if self.start.elapsed().as_secs_f64() >= secs {
                        self.stats.limit_hit = Some(LimitKind::Time);
                        self.stop = true;
                        break;
                    }
                }
            }
            let x = level.ids[idx];
            self.filter(level, x, &mut child);
            self.chosen.push(x);
            self.node(remaining ^ level.masks[idx], &child, depth + 1);
            self.chosen.pop();
            if self.stop {
                break;
            }
        }
        self.pool[depth] = child;
    }

    /// Options of `level` compatible with choosing option `x`.
    fn filter(&mut self, level: &Level<B>, x: u32, out: &mut Level<B>) {
        out.ids.clear();
        out.masks.clear();
        let xmask = self.masks[x as usize];
        let x_sec = self.has_sec[x as usize];
        if x_sec {
            for &[s, c] in self.p.sec_slice(x as usize) {
                self.xcolor[s as usize] = c;
            }
        }
        for (&y, &m) in level.ids.iter().zip(&level.masks) {
            if !(m & xmask).is_zero() {
                continue;
            }
            if x_sec && self.has_sec[y as usize] && !self.sec_compatible(y) {
                continue;
            }
            out.ids.push(y);
            out.masks.push(m);
        }
        if x_sec {
            for &[s, _] in self.p.sec_slice(x as usize) {
                self.xcolor[s as usize] = ABSENT;
            }
        }
    }

    #[inline]
    fn sec_compatible(&self, y: u32) -> bool {
        self.p.sec_slice(y as usize).iter().all(|&[s, c]| {
            let xc = self.xcolor[s as usize];
            xc == ABSENT || (xc == c && c != NO_COLOR)
        })
    }
}
