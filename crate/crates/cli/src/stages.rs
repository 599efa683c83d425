//! Pipeline stages. Each reads the artifacts of the previous stage from the
//! output directory and writes its own.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;
use std::fs;

use anyhow::{anyhow, bail, Context, Result};
use kmsteiner_core::designs::{classify, expand, verify_steiner, Design};
use kmsteiner_core::km::{build_km, KmInstance, KmMatrix};
use kmsteiner_core::orbitgen::{good_k_orbit_reps, t_orbit_reps, GoodOrbitSet, OrbitFile};
use kmsteiner_core::perm::PermutationGroup;
use kmsteiner_core::symbreak::{encode, parse_copy_map, EncodingKind, NormalizerClasses};
use kmsteiner_core::xcc::{solve, LimitKind, SolveLimits, SolveMode, XccProblem};
use kmsteiner_core::Error as CoreError;
use sha2::{Digest, Sha256};

use crate::artifacts::{self as art, OutputDir};
use crate::config::{GroupSource, JobConfig};
use crate::groups;

/// How a stage ended when it did not fail.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Done,
    /// A node, time or canonical-form budget stopped the stage early.
    CapHit(String),
}

impl Outcome {
    fn and(self, other: Outcome) -> Outcome {
        match self {
            Outcome::Done => other,
            hit => hit,
        }
    }
}

pub struct Job {
    pub cfg: JobConfig,
    pub out: OutputDir,
    group: Option<PermutationGroup>,
    normalizer: Option<PermutationGroup>,
}

impl Job {
    pub fn new(cfg: JobConfig) -> Result<Self> {
        let out = OutputDir::new(&cfg.output_dir)?;
        Ok(Job {
            cfg,
            out,
            group: None,
            normalizer: None,
        })
    }

    pub fn group(&mut self) -> Result<&PermutationGroup> {
        if self.group.is_none() {
            self.group = Some(groups::load(&self.cfg.group, self.cfg.v, None)?);
        }
        Ok(self.group.as_ref().unwrap())
    }

    pub fn group_label(&self) -> String {
        match &self.cfg.group {
            GroupSource::Trivial => "trivial".into(),
            GroupSource::Cyclic => format!("C{}", self.cfg.v),
            GroupSource::Order84(i) => format!("G{i}"),
            GroupSource::File(p) => p
                .file_stem()
                .map(|s| s.to_string_lossy().replace(char::is_whitespace, "_"))
                .unwrap_or_else(|| "file".into()),
            other => format!("{other:?}"),
        }
    }

    fn orbits_fp(&mut self) -> Result<String> {
        let (v, k, t) = (self.cfg.v, self.cfg.k, self.cfg.t);
        Ok(art::orbits_fp(v, k, t, self.group()?))
    }

    fn normalizer(&mut self) -> Result<PermutationGroup> {
        if let Some(n) = &self.normalizer {
            return Ok(n.clone());
        }
        let source = self
            .cfg
            .normalizer
            .clone()
            .ok_or_else(|| anyhow!("encodings b and c need a normalizer in the configuration"))?;
        let v = self.cfg.v;
        let n = groups::load_normalizer(&source, v, self.group()?)?;
        self.normalizer = Some(n.clone());
        Ok(n)
    }

    /// Fingerprint that the encoding of `kind` depends on.
    fn encoding_fp(&mut self, kind: EncodingKind) -> Result<String> {
        let ofp = self.orbits_fp()?;
        let upstream = match kind {
            EncodingKind::A => ofp,
            _ => {
                let n = self.normalizer()?;
                art::classes_fp(&ofp, &n, self.cfg.rep_order)
            }
        };
        Ok(art::encoding_fp(&upstream, kind))
    }

    pub fn orbits(&mut self) -> Result<Outcome> {
        let (v, k, t) = (self.cfg.v, self.cfg.k, self.cfg.t);
        let fp = self.orbits_fp()?;
        let label = self.group_label();
        let g = self.group()?.clone();
        log::info!("group {label}: order {}", g.order());
        let t_reps = t_orbit_reps(&g, v, t)?;
        log::info!("{} orbits on {t}-subsets", t_reps.len());
        let good = good_k_orbit_reps(&g, v, k, t)?;
        log::info!("{} good orbits on {k}-subsets", good.len());
        let extra = BTreeMap::from([("fp".to_string(), fp)]);
        let file = |k, reps| OrbitFile {
            v,
            k,
            t,
            group: label.clone(),
            reps,
            extra: extra.clone(),
        };
        self.out.write(art::T_ORBITS, &file(t, t_reps).to_text())?;
        self.out.write(art::K_ORBITS, &file(k, good.reps).to_text())?;
        Ok(Outcome::Done)
    }

    fn read_orbits(&mut self, fp: &str) -> Result<(OrbitFile, GoodOrbitSet)> {
        let t_file = OrbitFile::parse(&self.out.read_checked(art::T_ORBITS, "orbits", fp)?)?;
        let k_file = OrbitFile::parse(&self.out.read_checked(art::K_ORBITS, "orbits", fp)?)?;
        let good = GoodOrbitSet {
            v: k_file.v,
            k: k_file.k,
            t: k_file.t,
            reps: k_file.reps,
            group_id: k_file.group,
        };
        Ok((t_file, good))
    }

    pub fn km(&mut self) -> Result<Outcome> {
        let fp = self.orbits_fp()?;
        let (t_file, good) = self.read_orbits(&fp)?;
        let km = build_km(self.group()?, t_file.reps, good)?;
        log::info!("Kramer-Mesner matrix {} x {}, {} nonzeros", km.m(), km.n(), km.matrix.nonzeros());
        let extra = BTreeMap::from([("fp".to_string(), fp)]);
        self.out.write(art::KM, &km.matrix.to_text(&extra))?;
        Ok(Outcome::Done)
    }

    fn read_km(&mut self) -> Result<KmInstance> {
        let fp = self.orbits_fp()?;
        let (t_file, good) = self.read_orbits(&fp)?;
        let (matrix, _) = KmMatrix::parse(&self.out.read_checked(art::KM, "km", &fp)?)?;
        if matrix.m != t_file.reps.len() || matrix.n() != good.len() {
            bail!("{} does not match the orbit files", self.out.path(art::KM).display());
        }
        Ok(KmInstance {
            t_orbits: t_file.reps,
            k_orbits: good,
            matrix,
        })
    }

    /// Normalizer classes, reusing `classes.txt` when it is current.
    fn classes(&mut self, km: &KmInstance) -> Result<NormalizerClasses> {
        let ofp = self.orbits_fp()?;
        let n = self.normalizer()?;
        let fp = art::classes_fp(&ofp, &n, self.cfg.rep_order);
        if self.out.is_current(art::CLASSES, &fp) {
            let classes = NormalizerClasses::parse(&self.out.read(art::CLASSES, "encode")?)?;
            if classes.class_of.len() == km.n() {
                return Ok(classes);
            }
        }
        log::info!("normalizer of order {}", n.order());
        let classes =
            kmsteiner_core::symbreak::normalizer_classes(&n, &km.k_orbits, self.group()?)?.reordered(self.cfg.rep_order);
        log::info!("{} normalizer classes", classes.len());
        self.out.write(art::CLASSES, &art::stamp(&classes.to_text(), &fp))?;
        Ok(classes)
    }

    pub fn encode(&mut self) -> Result<Outcome> {
        let km = self.read_km()?;
        let kinds = self.cfg.encodings.clone();
        let classes = if kinds.iter().any(|&k| k != EncodingKind::A) {
            Some(self.classes(&km)?)
        } else {
            None
        };
        for kind in kinds {
            let fp = self.encoding_fp(kind)?;
            let enc = encode(&km, classes.as_ref(), kind)?;
            let p = &enc.problem;
            log::info!(
                "encoding {kind}: {}+{} items, {} options",
                p.primary_items().len(),
                p.secondary_items().len(),
                p.num_options()
            );
            let header = format!("# fp={fp} kind={kind}\n");
            self.out.write(&art::problem_file(kind), &(header.clone() + &p.to_text()))?;
            self.out.write(&art::copy_map_file(kind), &(header + &enc.copy_map_text()))?;
        }
        Ok(Outcome::Done)
    }

    pub fn solve(&mut self) -> Result<Outcome> {
        let mut outcome = Outcome::Done;
        for kind in self.cfg.encodings.clone() {
            let fp = self.encoding_fp(kind)?;
            let text = self.out.read_checked(&art::problem_file(kind), "encode", &fp)?;
            let p = XccProblem::parse(&text)?;
            let limits = SolveLimits {
                max_nodes: self.cfg.node_cap,
                max_seconds: self.cfg.time_cap,
                max_solutions: None,
            };
            let mode = self.cfg.solve_mode;
            let mut lines = String::new();
            let stats = solve(&p, mode, limits, |s| {
                let ids: Vec<String> = s.option_ids.iter().map(u32::to_string).collect();
                lines.push_str(&ids.join(" "));
                lines.push('\n');
            });
            let limit = match stats.limit_hit {
                None => "none",
                Some(LimitKind::Nodes) => "nodes",
                Some(LimitKind::Time) => "time",
                Some(LimitKind::Solutions) => "solutions",
            };
            log::info!(
                "encoding {kind}: {} solutions, {} nodes, {:.3} s, limit {limit}",
                stats.solutions,
                stats.nodes,
                stats.elapsed
            );
            let mode_name = match mode {
                SolveMode::Enumerate => "enumerate",
                SolveMode::Count => "count",
                SolveMode::First => "first",
            };
            let header = format!(
                "solutions kind={kind} mode={mode_name} count={} nodes={} limit={limit} fp={fp}\n",
                stats.solutions, stats.nodes
            );
            self.out.write(&art::solutions_file(kind), &(header + &lines))?;
            let stats_line = format!(
                "stats kind={kind} items={}+{} options={} solutions={} nodes={} seconds={:.3} limit={limit} fp={fp}\n",
                p.primary_items().len(),
                p.secondary_items().len(),
                p.num_options(),
                stats.solutions,
                stats.nodes,
                stats.elapsed
            );
            self.out.write(&art::stats_file(kind), &stats_line)?;
            if stats.limit_hit.is_some() {
                outcome = outcome.and(Outcome::CapHit(format!("solver for encoding {kind} stopped at the {limit} limit")));
            }
        }
        Ok(outcome)
    }

    pub fn classify(&mut self) -> Result<Outcome> {
        let km = self.read_km()?;
        let g = self.group()?.clone();
        let t = self.cfg.t;
        for kind in self.cfg.encodings.clone() {
            let fp = self.encoding_fp(kind)?;
            let sol_text = self.out.read_checked(&art::solutions_file(kind), "solve", &fp)?;
            let header = header_tokens(&sol_text);
            if header.get("mode").map(String::as_str) == Some("count") {
                bail!("solutions for encoding {kind} were counted, not enumerated; set solve_mode = enumerate");
            }
            let map_text = self.out.read_checked(&art::copy_map_file(kind), "encode", &fp)?;
            let copies: HashMap<u32, u32> = parse_copy_map(map_text.split_once('\n').map_or("", |x| x.1))?
                .into_iter()
                .collect();
            let n = km.n() as u32;
            let mut designs = Vec::new();
            for (ln, line) in sol_text.lines().enumerate().skip(1) {
                let mut orbits = BTreeSet::new();
                for tok in line.split_whitespace() {
                    let o: u32 = tok.parse().map_err(|_| anyhow!("line {}: bad option id {tok:?}", ln + 1))?;
                    let j = if o < n { Some(o) } else { copies.get(&o).copied() };
                    orbits.insert(j.ok_or_else(|| anyhow!("line {}: unknown option {o}", ln + 1))?);
                }
                let d = expand(&orbits, &km.k_orbits, &g)?;
                let report = verify_steiner(&d, t)?;
                if !report.pass {
                    bail!(
                        "solution on line {} of {} is not a Steiner system: {} t-subsets covered wrongly",
                        ln + 1,
                        art::solutions_file(kind),
                        report.violation_count
                    );
                }
                designs.push(d);
            }
            let classes = match classify(&designs, self.cfg.budget) {
                Ok(c) => c,
                Err(CoreError::BudgetExceeded(b)) => {
                    return Ok(Outcome::CapHit(format!("canonical form search exceeded the budget of {b} nodes")))
                }
                Err(e) => return Err(e.into()),
            };
            log::info!("encoding {kind}: {} designs in {} isomorphism classes", designs.len(), classes.len());
            let dir = art::designs_dir(kind);
            if self.out.path(&dir).exists() {
                fs::remove_dir_all(self.out.path(&dir)).context("clearing old designs")?;
            }
            let mut report = format!(
                "classification kind={kind} designs={} classes={} fp={fp}\n",
                designs.len(),
                classes.len()
            );
            for (i, c) in classes.iter().enumerate() {
                let name = format!("D{}", i + 1);
                self.out.write(&format!("{dir}/{name}.txt"), &c.representative.to_text())?;
                self.out.write(&format!("{dir}/{name}.g"), &c.representative.to_gap())?;
                let cert = hex::encode(&Sha256::digest(&c.certificate)[..8]);
                let members: Vec<String> = c.members.iter().map(|m| (m + 1).to_string()).collect();
                writeln!(
                    report,
                    "{name} aut={} multiplicity={} certificate={cert} solutions={}",
                    c.aut_order,
                    c.multiplicity(),
                    members.join(",")
                )?;
            }
            self.out.write(&art::classification_file(kind), &report)?;
        }
        Ok(Outcome::Done)
    }

    pub fn report(&mut self) -> Result<String> {
        let label = self.group_label();
        let mut text = String::new();
        let orbits = self
            .out
            .read(art::K_ORBITS, "orbits")
            .ok()
            .and_then(|t| header_tokens(&t).get("count").cloned())
            .unwrap_or_else(|| "-".into());
        let norm_order = match self.cfg.normalizer.is_some() {
            true => self.normalizer()?.order().to_string(),
            false => "-".into(),
        };
        let reps = self
            .out
            .read(art::CLASSES, "encode")
            .ok()
            .and_then(|t| header_tokens(&t).get("reps").cloned())
            .unwrap_or_else(|| "-".into());
        let designs = self
            .cfg
            .encodings
            .iter()
            .rev()
            .find_map(|&k| self.out.read(&art::classification_file(k), "classify").ok())
            .and_then(|t| header_tokens(&t).get("classes").cloned())
            .unwrap_or_else(|| "-".into());
        let rows = vec![vec![label.clone(), orbits, norm_order, reps, designs]];
        text.push_str(&render_table(&["group", "orbits", "|N|", "|𝒩|", "designs"], &rows));
        text.push('\n');

        let mut rows = Vec::new();
        for &kind in &self.cfg.encodings {
            let Ok(stats) = self.out.read(&art::stats_file(kind), "solve") else {
                continue;
            };
            let tok = header_tokens(&stats);
            let get = |k: &str| tok.get(k).cloned().unwrap_or_else(|| "-".into());
            let mut sols = get("solutions");
            if get("limit") != "none" {
                sols.push_str(" (capped)");
            }
            rows.push(vec![
                label.clone(),
                kind.to_string(),
                get("items"),
                get("options"),
                sols,
                get("nodes"),
                get("seconds"),
            ]);
        }
        if !rows.is_empty() {
            text.push_str(&render_table(
                &["group", "method", "items", "options", "solutions", "nodes", "seconds"],
                &rows,
            ));
        }
        self.out.write(art::REPORT, &text)?;
        Ok(text)
    }

    /// All stages in order, skipping those whose outputs are current.
    pub fn run(&mut self) -> Result<(Outcome, String)> {
        let ofp = self.orbits_fp()?;
        if self.out.is_current(art::T_ORBITS, &ofp) && self.out.is_current(art::K_ORBITS, &ofp) {
            log::info!("orbits are up to date");
        } else {
            self.orbits()?;
        }
        if self.out.is_current(art::KM, &ofp) {
            log::info!("Kramer-Mesner matrix is up to date");
        } else {
            self.km()?;
        }
        self.encode()?;
        let mut outcome = self.solve()?;
        if outcome == Outcome::Done && self.cfg.solve_mode == SolveMode::Enumerate {
            outcome = self.classify()?;
        }
        let report = self.report()?;
        Ok((outcome, report))
    }
}

/// `key=value` tokens of the first line.
pub fn header_tokens(text: &str) -> BTreeMap<String, String> {
    text.lines()
        .next()
        .unwrap_or("")
        .split_whitespace()
        .filter_map(|t| t.split_once('='))
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect()
}

/// Right-aligned columns except the first.
pub fn render_table(headers: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = headers.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: Vec<&str>| {
        let mut s = String::new();
        for (i, (cell, w)) in cells.iter().zip(&widths).enumerate() {
            let pad = w - cell.chars().count();
            if i == 0 {
                s.push_str(cell);
                s.push_str(&" ".repeat(pad));
            } else {
                s.push_str("  ");
                s.push_str(&" ".repeat(pad));
                s.push_str(cell);
            }
        }
        s.trim_end().to_string() + "\n"
    };
    let mut out = line(headers.to_vec());
    out.push_str(&line(widths.iter().map(|&w| "-".repeat(w)).collect::<Vec<_>>().iter().map(String::as_str).collect()));
    for row in rows {
        out.push_str(&line(row.iter().map(String::as_str).collect()));
    }
    out
}

/// Loads a design file in either the block-list or the list-of-lists format.
pub fn load_design(path: &std::path::Path, v: Option<usize>) -> Result<Design> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    if text.trim_start().starts_with('[') {
        let v = v.ok_or_else(|| anyhow!("list-of-lists design files need --v"))?;
        Ok(Design::parse_gap(&text, v)?)
    } else {
        Ok(Design::parse(&text)?)
    }
}
