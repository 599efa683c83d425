//! Dancing links for exact cover with colors, iterative.

use std::time::Instant;

use super::{Solution, XccProblem};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolveMode {
    /// Visit every solution and pass each one to the callback.
    Enumerate,
    /// Count solutions without materializing them.
    Count,
    /// Stop after the first solution.
    First,
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SolveLimits {
    pub max_nodes: Option<u64>,
    pub max_seconds: Option<f64>,
    pub max_solutions: Option<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LimitKind {
    Nodes,
    Time,
    Solutions,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolveStats {
    /// Search-tree nodes: the root plus one per option tried.
    pub nodes: u64,
    pub solutions: u64,
    pub elapsed: f64,
    /// Set when the search stopped early because of a limit.
    pub limit_hit: Option<LimitKind>,
}

impl SolveStats {
    pub fn complete(&self) -> bool {
        self.limit_hit.is_none()
    }
}

/// Node layout: indices `0..=n` are item headers (0 is unused), followed by
/// spacers and option nodes. A spacer's `top` is minus the id of the option
/// that follows it. Item `n + 1` heads the list of active secondary items.
struct Links {
    n1: usize,
    llink: Vec<u32>,
    rlink: Vec<u32>,
    len: Vec<u32>,
    top: Vec<i32>,
    ulink: Vec<u32>,
    dlink: Vec<u32>,
    /// 0 for none, `c + 1` for color `c`, -1 once purified.
    color: Vec<i32>,
}

impl Links {
    fn new(p: &XccProblem) -> Links {
        let n1 = p.primary_items().len();
        let n = n1 + p.secondary_items().len();
        let mut llink = vec![0u32; n + 2];
        let mut rlink = vec![0u32; n + 2];
        let link_ring = |llink: &mut Vec<u32>, rlink: &mut Vec<u32>, head: usize, range: std::ops::Range<usize>| {
            let mut prev = head;
            for i in range {
                llink[i] = prev as u32;
                rlink[prev] = i as u32;
                prev = i;
            }
            rlink[prev] = head as u32;
            llink[head] = prev as u32;
        };
        link_ring(&mut llink, &mut rlink, 0, 1..n1 + 1);
        link_ring(&mut llink, &mut rlink, n + 1, n1 + 1..n + 1);

        let total = n + 2 + p.size() + p.num_options();
        let mut top = Vec::with_capacity(total);
        let mut ulink = Vec::with_capacity(total);
        let mut dlink = Vec::with_capacity(total);
        let mut color = Vec::with_capacity(total);
        for i in 0..=n {
            top.push(0);
            ulink.push(i as u32);
            dlink.push(i as u32);
            color.push(0);
        }
        let mut len = vec![0u32; n + 1];
        // first spacer
        let mut spacer = top.len();
        top.push(0);
        ulink.push(0);
        dlink.push(0);
        color.push(0);
        for o in 0..p.num_options() {
            let first = top.len();
            let entries = p
                .option_primary(o)
                .iter()
                .map(|&i| (1 + i as usize, 0))
                .chain(p.option_secondary(o).map(|s| {
                    (1 + n1 + s.item as usize, s.color.map_or(0, |c| c as i32 + 1))
                }));
            for (item, c) in entries {
                let node = top.len() as u32;
                let last = ulink[item];
                top.push(item as i32);
                ulink.push(last);
                dlink.push(item as u32);
                color.push(c);
                dlink[last as usize] = node;
                ulink[item] = node;
                len[item] += 1;
            }
            dlink[spacer] = (top.len() - 1) as u32;
            spacer = top.len();
            top.push(-(o as i32 + 1));
            ulink.push(first as u32);
            dlink.push(0);
            color.push(0);
        }
        Links {
            n1,
            llink,
            rlink,
            len,
            top,
            ulink,
            dlink,
            color,
        }
    }

    #[inline]
    fn hide(&mut self, p: usize) {
        let mut q = p + 1;
        while q != p {
            let x = self.top[q];
            if x <= 0 {
                q = self.ulink[q] as usize;
            } else {
                if self.color[q] >= 0 {
                    let (u, d) = (self.ulink[q], self.dlink[q]);
                    self.dlink[u as usize] = d;
                    self.ulink[d as usize] = u;
                    self.len[x as usize] -= 1;
                }
                q += 1;
            }
        }
    }

    #[inline]
    fn unhide(&mut self, p: usize) {
        let mut q = p - 1;
        while q != p {
            let x = self.top[q];
            if x <= 0 {
                q = self.dlink[q] as usize;
            } else {
                if self.color[q] >= 0 {
                    let (u, d) = (self.ulink[q], self.dlink[q]);
                    self.dlink[u as usize] = q as u32;
                    self.ulink[d as usize] = q as u32;
                    self.len[x as usize] += 1;
                }
                q -= 1;
            }
        }
    }

    fn cover(&mut self, i: usize) {
        let mut p = self.dlink[i] as usize;
        while p != i {
            self.hide(p);
            p = self.dlink[p] as usize;
        }
        let (l, r) = (self.llink[i], self.rlink[i]);
        self.rlink[l as usize] = r;
        self.llink[r as usize] = l;
    }

    fn uncover(&mut self, i: usize) {
        let (l, r) = (self.llink[i], self.rlink[i]);
        self.rlink[l as usize] = i as u32;
        self.llink[r as usize] = i as u32;
        let mut p = self.ulink[i] as usize;
        while p != i {
            self.unhide(p);
            p = self.ulink[p] as usize;
        }
    }

    fn purify(&mut self, p: usize) {
        let c = self.color[p];
        let i = self.top[p] as usize;
        let mut q = self.dlink[i] as usize;
        while q != i {
            if self.color[q] == c {
                if q != p {
                    self.color[q] = -1;
                }
            } else {
                self.hide(q);
            }
            q = self.dlink[q] as usize;
        }
    }

    fn unpurify(&mut self, p: usize) {
        let c = self.color[p];
        let i = self.top[p] as usize;
        let mut q = self.ulink[i] as usize;
        while q != i {
            if self.color[q] < 0 {
                self.color[q] = c;
            } else if q != p {
                self.unhide(q);
            }
            q = self.ulink[q] as usize;
        }
    }

    #[inline]
    fn commit(&mut self, p: usize, j: usize) {
        if self.color[p] == 0 {
            self.cover(j);
        } else if self.color[p] > 0 {
            self.purify(p);
        }
    }

    #[inline]
    fn uncommit(&mut self, p: usize, j: usize) {
        if self.color[p] == 0 {
            self.uncover(j);
        } else if self.color[p] > 0 {
            self.unpurify(p);
        }
    }

    /// Active primary item with the fewest options; ties go to the lowest id
    /// because the list stays in id order.
    fn choose(&self) -> usize {
        let mut best = usize::MAX;
        let mut best_len = u32::MAX;
        let mut i = self.rlink[0] as usize;
        while i != 0 {
            let l = self.len[i];
            if l < best_len {
                best = i;
                best_len = l;
                if l == 0 {
                    break;
                }
            }
            i = self.rlink[i] as usize;
        }
        best
    }

    fn option_of(&self, mut p: usize) -> u32 {
        while self.top[p] > 0 {
            p -= 1;
        }
        (-self.top[p]) as u32
    }
}

pub(super) fn solve_links<F: FnMut(&Solution)>(
    p: &XccProblem,
    mode: SolveMode,
    limits: SolveLimits,
    mut on_solution: F,
) -> SolveStats {
    let start = Instant::now();
    let mut dl = Links::new(p);
    debug_assert!(dl.n1 == p.primary_items().len());
    let mut stats = SolveStats {
        nodes: 1,
        solutions: 0,
        elapsed: 0.0,
        limit_hit: None,
    };
    let max_nodes = limits.max_nodes.unwrap_or(u64::MAX);
    let max_solutions = match mode {
        SolveMode::First => 1.min(limits.max_solutions.unwrap_or(1)),
        _ => limits.max_solutions.unwrap_or(u64::MAX),
    };

    enum Step {
        Enter,
        Try,
        Back,
    }
    let mut x: Vec<usize> = Vec::new();
    let mut items: Vec<usize> = Vec::new();
    let mut step = Step::Enter;
    'search: loop {
        match step {
            Step::Enter => {
                if dl.rlink[0] == 0 {
                    stats.solutions += 1;
                    if mode != SolveMode::Count {
                        let mut ids: Vec<u32> = x.iter().map(|&q| dl.option_of(q)).collect();
                        ids.sort_unstable();
                        on_solution(&Solution { option_ids: ids });
                    }
                    if stats.solutions >= max_solutions {
                        if mode != SolveMode::First {
                            stats.limit_hit = Some(LimitKind::Solutions);
                        }
                        break 'search;
                    }
                    step = Step::Back;
                    continue;
                }
                let i = dl.choose();
                dl.cover(i);
                items.push(i);
                x.push(dl.dlink[i] as usize);
                step = Step::Try;
            }
            Step::Try => {
                let l = x.len() - 1;
                let i = items[l];
                let xl = x[l];
                if xl == i {
                    dl.uncover(i);
                    x.pop();
                    items.pop();
                    step = Step::Back;
                    continue;
                }
                if stats.nodes >= max_nodes {
                    stats.limit_hit = Some(LimitKind::Nodes);
                    break 'search;
                }
                stats.nodes += 1;
                if stats.nodes & 0xfff == 0 {
                    if let Some(secs) = limits.max_seconds {
                        if start.elapsed().as_secs_f64() >= secs {
                            stats.limit_hit = Some(LimitKind::Time);
                            break 'search;
                        }
                    }
                }
                let mut q = xl + 1;
                while q != xl {
                    let j = dl.top[q];
                    if j <= 0 {
                        q = dl.ulink[q] as usize;
                    } else {
                        dl.commit(q, j as usize);
                        q += 1;
                    }
                }
                step = Step::Enter;
            }
            Step::Back => {
                let Some(l) = x.len().checked_sub(1) else {
                    break 'search;
                };
                let xl = x[l];
                let mut q = xl - 1;
                while q != xl {
                    let j = dl.top[q];
                    if j <= 0 {
                        q = dl.dlink[q] as usize;
                    } else {
                        dl.uncommit(q, j as usize);
                        q -= 1;
                    }
                }
                x[l] = dl.dlink[xl] as usize;
                step = Step::Try;
            }
        }
    }
    stats.elapsed = start.elapsed().as_secs_f64();
    stats
}
