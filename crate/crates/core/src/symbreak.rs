//! Symmetry breaking with the normalizer of the prescribed group.
//!
//! Every `π ∈ N(G)` maps G-invariant designs to G-invariant designs, so it
//! permutes the good k-orbits. Orbits in the same N-class are interchangeable
//! as the *first* orbit of a design, and a search only has to start from one
//! representative per class. Three encodings of the exact cover problem are
//! produced:
//!
//! * `A`: the plain Kramer-Mesner system.
//! * `B`: a copy of each representative column that also covers the extra
//!   primary item `N-hit`, so every solution uses exactly one copy.
//! * `C`: as `B`, plus one secondary item per representative except the last.
//!   Options from class `i` give item `s{i}` color 1; the copy of
//!   representative `j` gives every `s{i}` with `i < j` color 0. A solution
//!   using the copy of `j` therefore contains no orbit from an earlier class.

use std::collections::BTreeSet;
use std::fmt;
use std::fmt::Write as _;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{format_err, Error, Result};
use crate::km::KmInstance;
use crate::orbitgen::{ElementTable, GoodOrbitSet};
use crate::perm::{verify_normalizes, Permutation, PermutationGroup, PointSubset};
use crate::xcc::{SecondaryUse, Solution, XccProblem};

/// Name of the primary item that forces one copy-option into each solution.
pub const N_HIT: &str = "N-hit";

/// Order of the representatives in 𝒩. Solution counts of encoding `C`
/// depend on it; the classified designs do not.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum RepOrder {
    /// Largest class first, ties by smallest orbit index.
    #[default]
    SizeDesc,
    /// Ascending smallest orbit index.
    Index,
}

impl fmt::Display for RepOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RepOrder::SizeDesc => "size",
            RepOrder::Index => "index",
        })
    }
}

impl FromStr for RepOrder {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "size" | "size-desc" => Ok(RepOrder::SizeDesc),
            "index" => Ok(RepOrder::Index),
            _ => Err(Error::Parameters(format!("unknown representative order {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalizerClasses {
    /// Class id of each k-orbit.
    pub class_of: Vec<u32>,
    /// The representatives 𝒩, in order; position = class id. Each is the
    /// smallest k-orbit index of its class.
    pub reps: Vec<u32>,
}

impl NormalizerClasses {
    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }

    /// Every orbit in its own class, as when `N = G`.
    pub fn singletons(n: usize) -> Self {
        NormalizerClasses {
            class_of: (0..n as u32).collect(),
            reps: (0..n as u32).collect(),
        }
    }

    fn from_roots(mut root: impl FnMut(u32) -> u32, n: usize) -> Self {
        // Roots are class minima, so classes come out in ascending rep order.
        let mut class_of = vec![u32::MAX; n];
        let mut reps = Vec::new();
        for j in 0..n as u32 {
            let r = root(j);
            if r == j {
                class_of[j as usize] = reps.len() as u32;
                reps.push(j);
            } else {
                class_of[j as usize] = class_of[r as usize];
            }
        }
        NormalizerClasses { class_of, reps }
    }

    pub fn class_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.reps.len()];
        for &c in &self.class_of {
            sizes[c as usize] += 1;
        }
        sizes
    }

    /// The same classes with representatives in the given order.
    pub fn reordered(&self, order: RepOrder) -> Self {
        let sizes = self.class_sizes();
        let mut ids: Vec<usize> = (0..self.reps.len()).collect();
        match order {
            RepOrder::Index => ids.sort_by_key(|&c| self.reps[c]),
            RepOrder::SizeDesc => ids.sort_by_key(|&c| (std::cmp::Reverse(sizes[c]), self.reps[c])),
        }
        let mut new_id = vec![0u32; ids.len()];
        for (pos, &c) in ids.iter().enumerate() {
            new_id[c] = pos as u32;
        }
        NormalizerClasses {
            class_of: self.class_of.iter().map(|&c| new_id[c as usize]).collect(),
            reps: ids.iter().map(|&c| self.reps[c]).collect(),
        }
    }

    /// Header `classes n=<orbits> reps=<classes>`, one line `rep <j>` per
    /// representative in order, then the class id of each orbit, one per line.
    pub fn to_text(&self) -> String {
        let mut out = format!("classes n={} reps={}\n", self.class_of.len(), self.reps.len());
        for r in &self.reps {
            writeln!(out, "rep {r}").unwrap();
        }
        for c in &self.class_of {
            writeln!(out, "{c}").unwrap();
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| format_err(1, "empty classes file"))?;
        let field = |key: &str| {
            header
                .split_whitespace()
                .find_map(|t| t.strip_prefix(key))
                .and_then(|x| x.parse::<usize>().ok())
                .filter(|_| header.starts_with("classes "))
                .ok_or_else(|| format_err(1, "expected 'classes n=<n> reps=<r>'"))
        };
        let (n, r) = (field("n=")?, field("reps=")?);
        let mut reps = Vec::with_capacity(r);
        let mut class_of = Vec::with_capacity(n);
        for (i, line) in lines.enumerate() {
            let line = line.trim();
            if let Some(j) = line.strip_prefix("rep ") {
                if !class_of.is_empty() {
                    return Err(format_err(i + 2, "rep lines must precede class ids"));
                }
                reps.push(j.trim().parse::<u32>().map_err(|_| format_err(i + 2, "expected 'rep <j>'"))?);
            } else {
                let c = line.parse::<u32>().map_err(|_| format_err(i + 2, "expected a class id"))?;
                if c as usize >= r {
                    return Err(format_err(i + 2, format!("class id {c} out of range")));
                }
                class_of.push(c);
            }
        }
        if reps.len() != r || class_of.len() != n {
            return Err(format_err(
                1,
                format!("expected {r} reps and {n} orbits, found {} and {}", reps.len(), class_of.len()),
            ));
        }
        let mut first = vec![u32::MAX; r];
        for (j, &c) in class_of.iter().enumerate().rev() {
            first[c as usize] = j as u32;
        }
        if first != reps {
            return Err(format_err(1, "each rep must be the smallest orbit of its class"));
        }
        Ok(NormalizerClasses { class_of, reps })
    }
}

fn find(parent: &mut [u32], mut x: u32) -> u32 {
    while parent[x as usize] != x {
        let p = parent[x as usize];
        parent[x as usize] = parent[p as usize];
        x = p;
    }
    x
}

fn union_min(parent: &mut [u32], a: u32, b: u32) {
    let (ra, rb) = (find(parent, a), find(parent, b));
    if ra != rb {
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        parent[hi as usize] = lo;
    }
}

fn permute_mask(p: &Permutation, mut mask: u128) -> u128 {
    let imgs = p.images();
    let mut out = 0u128;
    while mask != 0 {
        let x = mask.trailing_zeros() as usize;
        out |= 1u128 << imgs[x];
        mask &= mask - 1;
    }
    out
}

/// Generators of `N` that are independent modulo `G`. Elements of `G` fix
/// every G-orbit, so only these act on the k-orbits.
pub fn generators_mod(n: &PermutationGroup, g: &PermutationGroup) -> Result<Vec<Permutation>> {
    let mut kept = Vec::new();
    let mut current = g.clone();
    for p in n.generators() {
        if !current.contains(p) {
            kept.push(p.clone());
            let mut gens = current.generators().to_vec();
            gens.push(p.clone());
            current = PermutationGroup::new(g.degree(), gens)?;
        }
    }
    Ok(kept)
}

/// Partitions the good k-orbits into N-classes by union-find over generator
/// images, with representatives in the default order.
pub fn normalizer_classes(
    n: &PermutationGroup,
    k_orbits: &GoodOrbitSet,
    g: &PermutationGroup,
) -> Result<NormalizerClasses> {
    if n.degree() != g.degree() {
        return Err(Error::DegreeMismatch {
            left: n.degree(),
            right: g.degree(),
        });
    }
    if !verify_normalizes(n, g)? {
        return Err(Error::Parameters("the given group does not normalize G".into()));
    }
    let gens = generators_mod(n, g)?;
    let count = k_orbits.len();
    if gens.is_empty() {
        return Ok(NormalizerClasses::singletons(count));
    }
    let table = ElementTable::new(g)?;
    let index = k_orbits.index_map();
    let images: Vec<Vec<u32>> = k_orbits
        .reps
        .par_iter()
        .map(|r| {
            let mask = r.rep.mask();
            gens.iter()
                .map(|p| {
                    let img = table.lex_min(permute_mask(p, mask));
                    index.get(&img).copied().ok_or_else(|| {
                        Error::OrbitNotFound(format!(
                            "image {} of orbit {} is not a good orbit",
                            PointSubset::from_mask(img),
                            r.rep
                        ))
                    })
                })
                .collect::<Result<Vec<u32>>>()
        })
        .collect::<Result<_>>()?;
    let mut parent: Vec<u32> = (0..count as u32).collect();
    for (j, imgs) in images.iter().enumerate() {
        for &i in imgs {
            union_min(&mut parent, j as u32, i);
        }
    }
    Ok(NormalizerClasses::from_roots(|j| find(&mut parent, j), count).reordered(RepOrder::default()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EncodingKind {
    A,
    B,
    C,
}

impl EncodingKind {
    pub const ALL: [EncodingKind; 3] = [EncodingKind::A, EncodingKind::B, EncodingKind::C];
}

impl EncodingKind {
    pub fn letter(self) -> char {
        match self {
            EncodingKind::A => 'a',
            EncodingKind::B => 'b',
            EncodingKind::C => 'c',
        }
    }
}

impl fmt::Display for EncodingKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

impl FromStr for EncodingKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "a" => Ok(EncodingKind::A),
            "b" => Ok(EncodingKind::B),
            "c" => Ok(EncodingKind::C),
            _ => Err(Error::Parameters(format!("unknown encoding {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Encoding {
    pub kind: EncodingKind,
    pub problem: XccProblem,
    /// `(option id, k-orbit index)` for each copy-option, ascending.
    pub copy_map: Vec<(u32, u32)>,
}

impl Encoding {
    /// Number of options that are original columns.
    pub fn originals(&self) -> usize {
        self.problem.num_options() - self.copy_map.len()
    }

    /// k-orbit index of any option.
    pub fn orbit_of_option(&self, option: u32) -> u32 {
        let base = self.originals() as u32;
        if option < base {
            option
        } else {
            self.copy_map[(option - base) as usize].1
        }
    }

    /// One line `copy <option_id> = orbit <j>` per copy-option.
    pub fn copy_map_text(&self) -> String {
        copy_map_to_text(&self.copy_map)
    }
}

pub fn copy_map_to_text(map: &[(u32, u32)]) -> String {
    let mut out = String::new();
    for (o, j) in map {
        writeln!(out, "copy {o} = orbit {j}").unwrap();
    }
    out
}

pub fn parse_copy_map(text: &str) -> Result<Vec<(u32, u32)>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        let parsed = match toks.as_slice() {
            ["copy", o, "=", "orbit", j] => o.parse().ok().zip(j.parse().ok()),
            _ => None,
        };
        out.push(parsed.ok_or_else(|| format_err(i + 1, "expected 'copy <option> = orbit <j>'"))?);
    }
    Ok(out)
}

/// Builds the exact cover problem of the requested kind.
pub fn encode(km: &KmInstance, classes: Option<&NormalizerClasses>, kind: EncodingKind) -> Result<Encoding> {
    let m = km.m();
    let n = km.n();
    let classes = match (kind, classes) {
        (EncodingKind::A, _) => None,
        (_, Some(c)) => {
            if c.class_of.len() != n {
                return Err(Error::Parameters(format!(
                    "classes cover {} orbits but the matrix has {n} columns",
                    c.class_of.len()
                )));
            }
            Some(c)
        }
        (_, None) => return Err(Error::MissingClasses(kind.letter())),
    };
    let mut primary: Vec<String> = (0..m).map(|i| format!("T{i}")).collect();
    if classes.is_some() {
        primary.push(N_HIT.to_string());
    }
    let n_sec = match (kind, classes) {
        (EncodingKind::C, Some(c)) => c.len().saturating_sub(1),
        _ => 0,
    };
    let secondary: Vec<String> = (0..n_sec).map(|i| format!("s{i}")).collect();
    let mut problem = XccProblem::new(primary, secondary)?;

    let class_color = |j: usize| -> Option<SecondaryUse> {
        let c = classes?.class_of[j] as usize;
        (c < n_sec).then_some(SecondaryUse {
            item: c as u32,
            color: Some(1),
        })
    };
    for j in 0..n {
        let sec: Vec<SecondaryUse> = class_color(j).into_iter().collect();
        problem.add_option(km.column(j), &sec)?;
    }
    let mut copy_map = Vec::new();
    if let Some(c) = classes {
        let hit = m as u32;
        let mut rows = Vec::with_capacity(km.matrix.k + 1);
        let mut sec = Vec::new();
        for (ci, &r) in c.reps.iter().enumerate() {
            rows.clear();
            rows.extend_from_slice(km.column(r as usize));
            rows.push(hit);
            sec.clear();
            if kind == EncodingKind::C {
                sec.extend((0..ci.min(n_sec)).map(|i| SecondaryUse {
                    item: i as u32,
                    color: Some(0),
                }));
                sec.extend(class_color(r as usize));
            }
            let id = problem.add_option(&rows, &sec)?;
            copy_map.push((id as u32, r));
        }
    }
    Ok(Encoding {
        kind,
        problem,
        copy_map,
    })
}

/// Maps a solution back to the set of k-orbit indices it selects.
pub fn decode_solution(sol: &Solution, enc: &Encoding) -> BTreeSet<u32> {
    sol.option_ids.iter().map(|&o| enc.orbit_of_option(o)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::km::build_km;
    use crate::orbitgen::{good_k_orbit_reps, t_orbit_reps};
    use crate::perm::{cyclic_group, normalizer_of_cyclic};
    use crate::xcc::{solve, verify_solution, SolveLimits, SolveMode};

    fn sts13() -> (PermutationGroup, KmInstance) {
        let g = cyclic_group(13).unwrap();
        let t = t_orbit_reps(&g, 13, 2).unwrap();
        let k = good_k_orbit_reps(&g, 13, 3, 2).unwrap();
        let km = build_km(&g, t, k).unwrap();
        (g, km)
    }

    fn solutions(enc: &Encoding) -> Vec<Solution> {
        let mut out = Vec::new();
        solve(&enc.problem, SolveMode::Enumerate, SolveLimits::default(), |s| out.push(s.clone()));
        out
    }

    #[test]
    fn trivial_normalizer_gives_singletons() {
        let (g, km) = sts13();
        let c = normalizer_classes(&g, &km.k_orbits, &g).unwrap();
        assert_eq!(c, NormalizerClasses::singletons(km.n()));
    }

    #[test]
    fn classes_are_unions_of_images() {
        let (g, km) = sts13();
        let n = normalizer_of_cyclic(13).unwrap();
        let c = normalizer_classes(&n, &km.k_orbits, &g).unwrap();
        assert!(c.len() < km.n());
        for (j, &cl) in c.class_of.iter().enumerate() {
            assert!(c.reps[cl as usize] as usize <= j);
        }
        let sizes = c.class_sizes();
        assert!(sizes.windows(2).all(|w| w[0] >= w[1]));
        let by_index = c.reordered(RepOrder::Index);
        assert!(by_index.reps.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(by_index.reordered(RepOrder::SizeDesc), c);
        assert_eq!(NormalizerClasses::parse(&by_index.to_text()).unwrap(), by_index);
        // Closed under the full normalizer, checked element by element.
        for r in &km.k_orbits.reps {
            for p in n.elements().unwrap() {
                let img = g.lex_min_rep(&r.rep.image(p)).unwrap();
                let i = km.k_orbits.reps.iter().position(|x| x.rep == img).unwrap();
                assert_eq!(c.class_of[i], c.class_of[r.index]);
            }
        }
        assert_eq!(NormalizerClasses::parse(&c.to_text()).unwrap(), c);
    }

    #[test]
    fn encodings_shapes_and_solutions() {
        let (g, km) = sts13();
        let n = normalizer_of_cyclic(13).unwrap();
        let classes = normalizer_classes(&n, &km.k_orbits, &g).unwrap();
        assert!(encode(&km, None, EncodingKind::B).is_err());
        let a = encode(&km, None, EncodingKind::A).unwrap();
        let b = encode(&km, Some(&classes), EncodingKind::B).unwrap();
        let c = encode(&km, Some(&classes), EncodingKind::C).unwrap();
        assert_eq!(a.problem.primary_items().len(), km.m());
        assert!(a.problem.secondary_items().is_empty() && a.copy_map.is_empty());
        assert_eq!(b.problem.primary_items().len(), km.m() + 1);
        assert_eq!(b.problem.num_options(), km.n() + classes.len());
        assert_eq!(c.problem.secondary_items().len(), classes.len() - 1);
        assert_eq!(c.problem.num_options(), b.problem.num_options());
        for j in 0..km.n() {
            assert_eq!(a.problem.option_primary(j), km.column(j));
        }
        let (sa, sb, sc) = (solutions(&a), solutions(&b), solutions(&c));
        assert!(sc.len() <= sb.len() && sb.len() <= sa.len());
        assert!(!sc.is_empty());
        for s in sb.iter().chain(&sc) {
            assert!(s.option_ids.iter().any(|&o| o as usize >= km.n()));
        }
        for s in &sc {
            verify_solution(&c.problem, s).unwrap();
        }
        let decoded_a: BTreeSet<BTreeSet<u32>> = sa.iter().map(|s| decode_solution(s, &a)).collect();
        for (sols, enc) in [(&sb, &b), (&sc, &c)] {
            for s in sols {
                assert!(decoded_a.contains(&decode_solution(s, enc)));
            }
        }
        assert_eq!(parse_copy_map(&b.copy_map_text()).unwrap(), b.copy_map);
    }

    #[test]
    fn copy_map_rejects_garbage() {
        assert!(parse_copy_map("copy 3 orbit 2\n").is_err());
        assert_eq!(parse_copy_map("copy 3 = orbit 2\n").unwrap(), vec![(3, 2)]);
    }
}
