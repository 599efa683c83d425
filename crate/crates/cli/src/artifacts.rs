//! Artifact names, parameter fingerprints and header stamping.
//!
//! Every artifact records the fingerprint of the inputs it was built from in
//! a `fp=<hex>` header token. A stage recomputes the fingerprint from the
//! current configuration and refuses inputs that carry a different one.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use kmsteiner_core::perm::io::write_group;
use kmsteiner_core::perm::PermutationGroup;
use kmsteiner_core::symbreak::{EncodingKind, RepOrder};
use sha2::{Digest, Sha256};

pub const T_ORBITS: &str = "t_orbits.txt";
pub const K_ORBITS: &str = "k_orbits.txt";
pub const KM: &str = "km.txt";
pub const CLASSES: &str = "classes.txt";
pub const REPORT: &str = "report.txt";

pub fn problem_file(kind: EncodingKind) -> String {
    format!("problem_{kind}.xcc")
}

pub fn copy_map_file(kind: EncodingKind) -> String {
    format!("copymap_{kind}.txt")
}

pub fn solutions_file(kind: EncodingKind) -> String {
    format!("solutions_{kind}.txt")
}

pub fn stats_file(kind: EncodingKind) -> String {
    format!("stats_{kind}.txt")
}

pub fn classification_file(kind: EncodingKind) -> String {
    format!("classification_{kind}.txt")
}

pub fn designs_dir(kind: EncodingKind) -> String {
    format!("designs_{kind}")
}

/// First 16 hex digits of the SHA-256 of the parts, each terminated by a newline.
pub fn fingerprint(parts: &[&str]) -> String {
    let mut h = Sha256::new();
    for p in parts {
        h.update(p.as_bytes());
        h.update(b"\n");
    }
    hex::encode(&h.finalize()[..8])
}

/// Fingerprint of the orbit and KM stages.
pub fn orbits_fp(v: usize, k: usize, t: usize, group: &PermutationGroup) -> String {
    fingerprint(&["orbits", &format!("{v} {k} {t}"), &write_group(group, &[])])
}

/// Fingerprint of the normalizer classes.
pub fn classes_fp(orbits_fp: &str, normalizer: &PermutationGroup, order: RepOrder) -> String {
    fingerprint(&["classes", orbits_fp, &write_group(normalizer, &[]), &order.to_string()])
}

/// Fingerprint of an encoded problem; `upstream` is the classes fingerprint
/// for kinds b and c and the orbit fingerprint for kind a.
pub fn encoding_fp(upstream: &str, kind: EncodingKind) -> String {
    fingerprint(&["encoding", upstream, &kind.to_string()])
}

/// Inserts ` fp=<fp>` at the end of the first line.
pub fn stamp(text: &str, fp: &str) -> String {
    match text.split_once('\n') {
        Some((head, rest)) => format!("{head} fp={fp}\n{rest}"),
        None => format!("{text} fp={fp}\n"),
    }
}

/// Value of the `fp=` token on the first line.
pub fn read_fp(text: &str) -> Option<&str> {
    text.lines()
        .next()?
        .split_whitespace()
        .find_map(|t| t.strip_prefix("fp="))
}

/// Removes the `fp=` token from the first line, for parsers that do not
/// accept extra header tokens.
pub fn unstamp(text: &str) -> String {
    let (head, rest) = text.split_once('\n').unwrap_or((text, ""));
    let head: Vec<&str> = head.split_whitespace().filter(|t| !t.starts_with("fp=")).collect();
    format!("{}\n{rest}", head.join(" "))
}

pub struct OutputDir {
    pub root: PathBuf,
}

impl OutputDir {
    pub fn new(root: &Path) -> Result<Self> {
        fs::create_dir_all(root).with_context(|| format!("creating {}", root.display()))?;
        Ok(OutputDir { root: root.to_path_buf() })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    pub fn exists(&self, name: &str) -> bool {
        self.path(name).exists()
    }

    pub fn write(&self, name: &str, contents: &str) -> Result<()> {
        let path = self.path(name);
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir)?;
        }
        // write then rename, so an interrupted stage never leaves a truncated artifact
        let tmp = path.with_extension("partial");
        fs::write(&tmp, contents).with_context(|| format!("writing {}", tmp.display()))?;
        fs::rename(&tmp, &path).with_context(|| format!("writing {}", path.display()))?;
        log::info!("wrote {}", path.display());
        Ok(())
    }

    pub fn read(&self, name: &str, stage: &str) -> Result<String> {
        let path = self.path(name);
        if !path.exists() {
            bail!("{} is missing; run `kmsteiner {stage}` first", path.display());
        }
        fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))
    }

    /// Reads an artifact and checks its fingerprint.
    pub fn read_checked(&self, name: &str, stage: &str, fp: &str) -> Result<String> {
        let text = self.read(name, stage)?;
        match read_fp(&text) {
            Some(found) if found == fp => Ok(text),
            Some(found) => bail!(
                "parameter fingerprint mismatch in {}: file has {found}, configuration gives {fp}; rerun `kmsteiner {stage}`",
                self.path(name).display()
            ),
            None => bail!("{} has no parameter fingerprint", self.path(name).display()),
        }
    }

    /// True if the artifact exists and carries fingerprint `fp`.
    pub fn is_current(&self, name: &str, fp: &str) -> bool {
        fs::read_to_string(self.path(name))
            .map(|t| read_fp(&t) == Some(fp))
            .unwrap_or(false)
    }
}
