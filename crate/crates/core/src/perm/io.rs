//! Group file format.
//!
//! ```text
//! # comment
//! degree 7
//! (1,2,3,4,5,6,7)
//! (2,3,5)(4,7,6)
//! ```

use std::fmt::Write as _;

use crate::error::{format_err, Result};
use crate::perm::{Permutation, PermutationGroup};

pub fn parse_group(text: &str) -> Result<PermutationGroup> {
    let mut degree = None;
    let mut gens = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        match degree {
            None => {
                let v = line
                    .strip_prefix("degree")
                    .map(str::trim)
                    .and_then(|s| s.parse::<usize>().ok())
                    .filter(|&v| v > 0)
                    .ok_or_else(|| format_err(n + 1, "expected 'degree <v>'"))?;
                degree = Some(v);
            }
            Some(v) => {
                let p = Permutation::parse(line, v).map_err(|e| format_err(n + 1, e.to_string()))?;
                gens.push(p);
            }
        }
    }
    let degree = degree.ok_or_else(|| format_err(1, "missing degree line"))?;
    PermutationGroup::new(degree, gens)
}

pub fn write_group(group: &PermutationGroup, comments: &[&str]) -> String {
    let mut out = String::new();
    for c in comments {
        writeln!(out, "# {c}").unwrap();
    }
    writeln!(out, "degree {}", group.degree()).unwrap();
    for g in group.generators() {
        writeln!(out, "{g}").unwrap();
    }
    out
}
