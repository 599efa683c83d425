//! Exact cover with colors.
//!
//! A problem has primary items, which every solution covers exactly once, and
//! secondary items, which may be left uncovered or covered by several options
//! as long as all of them give the item the same color. An uncolored
//! secondary item is covered at most once. Color 0 is an ordinary color.

mod dlx;
mod mask;

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::error::{format_err, Error, Result};

pub use dlx::{LimitKind, SolveLimits, SolveMode, SolveStats};

const NO_COLOR: u32 = u32::MAX;

/// A secondary item occurrence within an option.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SecondaryUse {
    pub item: u32,
    pub color: Option<u32>,
}

/// Items and options, stored compactly.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct XccProblem {
    primary: Vec<String>,
    secondary: Vec<String>,
    prim_ptr: Vec<usize>,
    prim: Vec<u32>,
    sec_ptr: Vec<usize>,
    sec: Vec<[u32; 2]>,
}

fn check_name(name: &str) -> Result<()> {
    if name.is_empty() || name.contains(|c: char| c.is_whitespace() || c == ':' || c == '|') {
        return Err(Error::Parameters(format!("invalid item name {name:?}")));
    }
    Ok(())
}

impl XccProblem {
    pub fn new(primary: Vec<String>, secondary: Vec<String>) -> Result<Self> {
        let mut seen = std::collections::HashSet::new();
        for name in primary.iter().chain(&secondary) {
            check_name(name)?;
            if !seen.insert(name.as_str()) {
                return Err(Error::Parameters(format!("item {name:?} declared twice")));
            }
        }
        Ok(XccProblem {
            primary,
            secondary,
            prim_ptr: vec![0],
            prim: Vec::new(),
            sec_ptr: vec![0],
            sec: Vec::new(),
        })
    }

    /// Appends an option and returns its id.
    pub fn add_option(&mut self, primary: &[u32], secondary: &[SecondaryUse]) -> Result<usize> {
        let id = self.num_options();
        if primary.is_empty() {
            return Err(Error::Parameters(format!("option {id} covers no primary item")));
        }
        let mut seen_p = std::collections::HashSet::new();
        for &i in primary {
            if i as usize >= self.primary.len() || !seen_p.insert(i) {
                return Err(Error::Parameters(format!("option {id}: bad or repeated primary item {i}")));
            }
        }
        let mut seen_s = std::collections::HashSet::new();
        for s in secondary {
            if s.item as usize >= self.secondary.len() || !seen_s.insert(s.item) {
                return Err(Error::Parameters(format!(
                    "option {id}: bad or repeated secondary item {}",
                    s.item
                )));
            }
            if s.color == Some(NO_COLOR) {
                return Err(Error::Parameters(format!("option {id}: color out of range")));
            }
        }
        self.prim.extend_from_slice(primary);
        self.prim_ptr.push(self.prim.len());
        self.sec
            .extend(secondary.iter().map(|s| [s.item, s.color.unwrap_or(NO_COLOR)]));
        self.sec_ptr.push(self.sec.len());
        Ok(id)
    }

    pub fn primary_items(&self) -> &[String] {
        &self.primary
    }

    pub fn secondary_items(&self) -> &[String] {
        &self.secondary
    }

    pub fn num_options(&self) -> usize {
        self.prim_ptr.len() - 1
    }

    pub fn option_primary(&self, i: usize) -> &[u32] {
        &self.prim[self.prim_ptr[i]..self.prim_ptr[i + 1]]
    }

    pub fn option_secondary(&self, i: usize) -> impl Iterator<Item = SecondaryUse> + '_ {
        self.sec[self.sec_ptr[i]..self.sec_ptr[i + 1]]
            .iter()
            .map(|&[item, c]| SecondaryUse {
                item,
                color: (c != NO_COLOR).then_some(c),
            })
    }

    fn sec_slice(&self, i: usize) -> &[[u32; 2]] {
        &self.sec[self.sec_ptr[i]..self.sec_ptr[i + 1]]
    }

    /// Total number of item occurrences over all options.
    pub fn size(&self) -> usize {
        self.prim.len() + self.sec.len()
    }

    /// Text form: the item line (`primaries | secondaries`), then one option
    /// per line with tokens `item` or `item:color`.
    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(self.size() * 6 + self.num_options());
        out.push_str(&self.primary.join(" "));
        if !self.secondary.is_empty() {
            out.push_str(" | ");
            out.push_str(&self.secondary.join(" "));
        }
        out.push('\n');
        for o in 0..self.num_options() {
            let mut first = true;
            for &i in self.option_primary(o) {
                if !first {
                    out.push(' ');
                }
                first = false;
                out.push_str(&self.primary[i as usize]);
            }
            for s in self.option_secondary(o) {
                out.push(' ');
                out.push_str(&self.secondary[s.item as usize]);
                if let Some(c) = s.color {
                    write!(out, ":{c}").unwrap();
                }
            }
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str) -> Result<XccProblem> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim_start().starts_with('#'));
        let (n0, header) = lines.next().ok_or_else(|| format_err(1, "missing item line"))?;
        let lines = lines.filter(|(_, l)| !l.trim().is_empty());
        let (prim_part, sec_part) = match header.split_once('|') {
            Some((a, b)) => (a, b),
            None => (header, ""),
        };
        let primary: Vec<String> = prim_part.split_whitespace().map(String::from).collect();
        let secondary: Vec<String> = sec_part.split_whitespace().map(String::from).collect();
        let mut p = XccProblem::new(primary, secondary).map_err(|e| format_err(n0 + 1, e.to_string()))?;
        let mut names: HashMap<&str, (bool, u32)> = HashMap::new();
        for (i, n) in p.primary.iter().enumerate() {
            names.insert(n, (true, i as u32));
        }
        for (i, n) in p.secondary.iter().enumerate() {
            names.insert(n, (false, i as u32));
        }
        let mut options = Vec::new();
        for (n, line) in lines {
            let mut prim = Vec::new();
            let mut sec = Vec::new();
            for tok in line.split_whitespace() {
                let (name, color) = match tok.split_once(':') {
                    Some((name, c)) => {
                        let c: u32 = c
                            .parse()
                            .ok()
                            .filter(|&c| c != NO_COLOR)
                            .ok_or_else(|| format_err(n + 1, format!("malformed color in {tok:?}")))?;
                        (name, Some(c))
                    }
                    None => (tok, None),
                };
                match names.get(name) {
                    None => return Err(format_err(n + 1, format!("unknown item {name:?}"))),
                    Some(&(true, i)) => {
                        if color.is_some() {
                            return Err(format_err(n + 1, format!("primary item {name:?} cannot have a color")));
                        }
                        prim.push(i);
                    }
                    Some(&(false, i)) => sec.push(SecondaryUse { item: i, color }),
                }
            }
            options.push((n, prim, sec));
        }
        for (n, prim, sec) in options {
            p.add_option(&prim, &sec).map_err(|e| format_err(n + 1, e.to_string()))?;
        }
        Ok(p)
    }
}

/// Search implementation. Both visit the same nodes in the same order.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Engine {
    /// Bitmask search when there are at most 128 primary items, otherwise
    /// dancing links.
    #[default]
    Auto,
    /// Dancing links.
    Links,
    /// Filtered option lists over bitmasks; falls back to dancing links
    /// above 128 primary items.
    Bitmask,
}

/// Searches for solutions with the default engine. In `Enumerate` and
/// `First` modes `on_solution` sees each solution; in `Count` mode it is
/// never called.
pub fn solve<F: FnMut(&Solution)>(p: &XccProblem, mode: SolveMode, limits: SolveLimits, on_solution: F) -> SolveStats {
    solve_with(p, Engine::Auto, mode, limits, on_solution)
}

pub fn solve_with<F: FnMut(&Solution)>(
    p: &XccProblem,
    engine: Engine,
    mode: SolveMode,
    limits: SolveLimits,
    on_solution: F,
) -> SolveStats {
    let n1 = p.primary_items().len();
    match engine {
        Engine::Links => dlx::solve_links(p, mode, limits, on_solution),
        _ if n1 <= 64 => mask::solve_masks::<u64, F>(p, mode, limits, on_solution),
        _ if n1 <= 128 => mask::solve_masks::<u128, F>(p, mode, limits, on_solution),
        _ => dlx::solve_links(p, mode, limits, on_solution),
    }
}

/// A set of options, sorted by id.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Solution {
    pub option_ids: Vec<u32>,
}

/// Re-checks a solution against the problem alone.
pub fn verify_solution(p: &XccProblem, sol: &Solution) -> std::result::Result<(), String> {
    let mut prim = vec![0u32; p.primary_items().len()];
    let mut sec: Vec<Vec<Option<u32>>> = vec![Vec::new(); p.secondary_items().len()];
    for &o in &sol.option_ids {
        let o = o as usize;
        if o >= p.num_options() {
            return Err(format!("option {o} does not exist"));
        }
        for &i in p.option_primary(o) {
            prim[i as usize] += 1;
        }
        for s in p.option_secondary(o) {
            sec[s.item as usize].push(s.color);
        }
    }
    if let Some((i, &c)) = prim.iter().enumerate().find(|(_, &c)| c != 1) {
        return Err(format!("primary item {} covered {c} times", p.primary_items()[i]));
    }
    for (i, colors) in sec.iter().enumerate() {
        if colors.len() > 1 && (colors[0].is_none() || colors.iter().any(|c| *c != colors[0])) {
            return Err(format!("secondary item {} has conflicting uses {colors:?}", p.secondary_items()[i]));
        }
    }
    Ok(())
}
