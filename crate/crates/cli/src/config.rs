//! `key = value` job configuration.
//!
//! ```text
//! # Cyclic Steiner triple systems on 13 points
//! name = sts13
//! v = 13
//! k = 3
//! t = 2
//! group = cyclic
//! normalizer = cyclic
//! encoding = a,b,c
//! output_dir = out/sts13
//! ```
//!
//! Relative paths are resolved against the directory of the config file.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use kmsteiner_core::perm::binomial;
use kmsteiner_core::symbreak::{EncodingKind, RepOrder};
use kmsteiner_core::xcc::SolveMode;

/// Where a permutation group comes from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GroupSource {
    Trivial,
    Cyclic,
    /// `C_v ⋊ Aut(C_v)`, only meaningful as a normalizer.
    CyclicNormalizer,
    /// `G_i` of the fifteen groups of order 84 (1-based).
    Order84(usize),
    /// Normalizer of `G_i` in `S_91`.
    Order84Normalizer(usize),
    /// The prescribed group itself.
    SameAsGroup,
    File(PathBuf),
}

#[derive(Clone, Debug)]
pub struct JobConfig {
    pub name: String,
    pub v: usize,
    pub k: usize,
    pub t: usize,
    pub group: GroupSource,
    pub normalizer: Option<GroupSource>,
    pub encodings: Vec<EncodingKind>,
    pub rep_order: RepOrder,
    pub solve_mode: SolveMode,
    pub node_cap: Option<u64>,
    pub time_cap: Option<f64>,
    pub budget: u64,
    pub output_dir: PathBuf,
}

impl JobConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::parse(&text, base).with_context(|| format!("in config {}", path.display()))
    }

    pub fn parse(text: &str, base: &Path) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| anyhow!("line {}: expected key = value", n + 1))?;
            let key = key.trim().to_string();
            if map.insert(key.clone(), value.trim().to_string()).is_some() {
                bail!("line {}: key {key:?} given twice", n + 1);
            }
        }
        let mut take = |key: &str| map.remove(key);
        let num = |key: &str, v: Option<String>| -> Result<Option<u64>> {
            v.map(|s| s.parse::<u64>().map_err(|_| anyhow!("{key}: expected an integer, got {s:?}")))
                .transpose()
        };
        let v = num("v", take("v"))?.ok_or_else(|| anyhow!("missing key v"))? as usize;
        let k = num("k", take("k"))?.ok_or_else(|| anyhow!("missing key k"))? as usize;
        let t = num("t", take("t"))?.unwrap_or(2) as usize;
        let resolve = |p: &str| base.join(p);

        let group = match (take("group"), take("group_file")) {
            (Some(_), Some(_)) => bail!("give either group or group_file, not both"),
            (None, Some(f)) => GroupSource::File(resolve(&f)),
            (Some(spec), None) => parse_group_spec(&spec, false, &resolve)?,
            (None, None) => GroupSource::Trivial,
        };
        let normalizer = match (take("normalizer"), take("normalizer_file")) {
            (Some(_), Some(_)) => bail!("give either normalizer or normalizer_file, not both"),
            (None, Some(f)) => Some(GroupSource::File(resolve(&f))),
            (Some(spec), None) => Some(parse_group_spec(&spec, true, &resolve)?),
            (None, None) => None,
        };
        let normalizer = match (normalizer, &group) {
            (Some(GroupSource::CyclicNormalizer), _) | (Some(GroupSource::Cyclic), GroupSource::Cyclic) => {
                Some(GroupSource::CyclicNormalizer)
            }
            (Some(GroupSource::Order84(i)), _) => Some(GroupSource::Order84Normalizer(i)),
            (other, _) => other,
        };

        let encodings = match take("encoding") {
            Some(s) => parse_encodings(&s)?,
            None => vec![EncodingKind::A],
        };
        let rep_order = take("rep_order").map(|s| s.parse()).transpose()?.unwrap_or_default();
        let solve_mode = match take("solve_mode").as_deref() {
            None | Some("enumerate") => SolveMode::Enumerate,
            Some("count") => SolveMode::Count,
            Some("first") => SolveMode::First,
            Some(other) => bail!("solve_mode: expected enumerate, count or first, got {other:?}"),
        };
        let node_cap = num("node_cap", take("node_cap"))?;
        let time_cap = take("time_cap")
            .map(|s| s.parse::<f64>().map_err(|_| anyhow!("time_cap: expected seconds, got {s:?}")))
            .transpose()?;
        let budget = num("budget", take("budget"))?.unwrap_or(kmsteiner_core::designs::DEFAULT_BUDGET);
        let name = take("name").unwrap_or_else(|| format!("s{t}_{k}_{v}"));
        let output_dir = resolve(&take("output_dir").unwrap_or_else(|| format!("out/{name}")));
        if let Some(key) = map.keys().next() {
            bail!("unknown key {key:?}");
        }
        let cfg = JobConfig {
            name,
            v,
            k,
            t,
            group,
            normalizer,
            encodings,
            rep_order,
            solve_mode,
            node_cap,
            time_cap,
            budget,
            output_dir,
        };
        cfg.check_admissible()?;
        Ok(cfg)
    }

    /// Necessary divisibility conditions for a Steiner system: for every
    /// `0 ≤ i < t`, `C(k-i, t-i)` divides `C(v-i, t-i)`.
    pub fn check_admissible(&self) -> Result<()> {
        let (v, k, t) = (self.v, self.k, self.t);
        if !(1 <= t && t < k && k < v) {
            bail!("inadmissible parameters: need 1 <= t < k < v, got t={t} k={k} v={v}");
        }
        let mut violated = Vec::new();
        for i in (0..t).rev() {
            let num = binomial((v - i) as u64, (t - i) as u64);
            let den = binomial((k - i) as u64, (t - i) as u64);
            if !num.is_multiple_of(den) {
                violated.push(divisibility_name(v, k, t, i, den, num));
            }
        }
        if !violated.is_empty() {
            bail!("inadmissible parameters S({t},{k},{v}): {}", violated.join("; "));
        }
        Ok(())
    }
}

fn divisibility_name(v: usize, k: usize, t: usize, i: usize, den: u128, num: u128) -> String {
    if t == 2 && i == 1 {
        format!("(k-1) | (v-1) fails: {} does not divide {}", k - 1, v - 1)
    } else if t == 2 && i == 0 {
        format!("k(k-1) | v(v-1) fails: {} does not divide {}", k * (k - 1), v * (v - 1))
    } else {
        format!("C({},{}) | C({},{}) fails: {den} does not divide {num}", k - i, t - i, v - i, t - i)
    }
}

fn parse_group_spec(spec: &str, is_normalizer: bool, resolve: &dyn Fn(&str) -> PathBuf) -> Result<GroupSource> {
    let lower = spec.to_ascii_lowercase();
    if let Some(i) = lower.strip_prefix("order84:") {
        let i: usize = i
            .trim_start_matches('g')
            .parse()
            .ok()
            .filter(|i| (1..=15).contains(i))
            .ok_or_else(|| anyhow!("order84:<i> needs i in 1..=15, got {spec:?}"))?;
        return Ok(GroupSource::Order84(i));
    }
    Ok(match lower.as_str() {
        "trivial" => GroupSource::Trivial,
        "cyclic" => GroupSource::Cyclic,
        "cyclic-normalizer" => GroupSource::CyclicNormalizer,
        "group" | "same" if is_normalizer => GroupSource::SameAsGroup,
        _ => GroupSource::File(resolve(spec)),
    })
}

pub fn parse_encodings(s: &str) -> Result<Vec<EncodingKind>> {
    if s.trim().eq_ignore_ascii_case("all") {
        return Ok(EncodingKind::ALL.to_vec());
    }
    let mut out: Vec<EncodingKind> = s
        .split(',')
        .map(|x| x.parse::<EncodingKind>().map_err(|e| anyhow!("encoding: {e}")))
        .collect::<Result<_>>()?;
    out.sort();
    out.dedup();
    Ok(out)
}
