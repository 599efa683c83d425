//! Groups of order 84 acting on 91 = 7 + 84 points.
//!
//! Every group of order 84 has a normal Sylow 7-subgroup, hence is a
//! semidirect product `C_7 ⋊_phi H` with `|H| = 12`. We build these from the
//! five groups of order 12 and every homomorphism `phi: H -> (Z/7)^*`, then
//! let the result act on the 7 right cosets of `H` and regularly on its own
//! 84 elements.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::perm::{Permutation, PermutationGroup};

/// The five groups of order 12.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OrderTwelve {
    C12,
    C6xC2,
    D12,
    A4,
    Dic3,
}

impl OrderTwelve {
    pub const ALL: [OrderTwelve; 5] = [
        OrderTwelve::C12,
        OrderTwelve::C6xC2,
        OrderTwelve::D12,
        OrderTwelve::A4,
        OrderTwelve::Dic3,
    ];

    pub fn name(self) -> &'static str {
        match self {
            OrderTwelve::C12 => "C12",
            OrderTwelve::C6xC2 => "C6xC2",
            OrderTwelve::D12 => "D12",
            OrderTwelve::A4 => "A4",
            OrderTwelve::Dic3 => "Dic3",
        }
    }

    /// Faithful permutation generators of small degree.
    pub fn generators(self) -> (usize, Vec<Permutation>) {
        let (deg, gens): (usize, &[&str]) = match self {
            OrderTwelve::C12 => (12, &["(1,2,3,4,5,6,7,8,9,10,11,12)"]),
            OrderTwelve::C6xC2 => (8, &["(1,2,3,4,5,6)", "(7,8)"]),
            OrderTwelve::D12 => (6, &["(1,2,3,4,5,6)", "(2,6)(3,5)"]),
            OrderTwelve::A4 => (4, &["(1,2,3)", "(1,2)(3,4)"]),
            // x = (1,2,3) is inverted by y = (1,2)(4,5,6,7) and y^2 is central
            OrderTwelve::Dic3 => (7, &["(1,2,3)", "(1,2)(4,5,6,7)"]),
        };
        let gens = gens
            .iter()
            .map(|s| Permutation::parse(s, deg).expect("static generator"))
            .collect();
        (deg, gens)
    }

    pub fn group(self) -> PermutationGroup {
        let (deg, gens) = self.generators();
        PermutationGroup::new(deg, gens).expect("static group")
    }
}

impl FromStr for OrderTwelve {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        OrderTwelve::ALL
            .into_iter()
            .find(|h| h.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Parameters(format!("unknown group of order 12: {s:?}")))
    }
}

impl fmt::Display for OrderTwelve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A finite group given by its multiplication table. Elements are `0..n`.
#[derive(Clone, Debug)]
pub struct CayleyTable {
    n: usize,
    mul: Vec<u16>,
    identity: usize,
}

impl CayleyTable {
    /// Table of the group generated by `gens`; element 0 is the identity and
    /// the remaining elements appear in breadth-first order over the generators.
    pub fn from_generators(degree: usize, gens: &[Permutation]) -> (CayleyTable, Vec<Permutation>) {
        let id = Permutation::identity(degree);
        let mut elems = vec![id.clone()];
        let mut index: HashMap<Permutation, usize> = HashMap::from([(id, 0)]);
        let mut i = 0;
        while i < elems.len() {
            for g in gens {
                let y = elems[i].compose(g);
                if !index.contains_key(&y) {
                    index.insert(y.clone(), elems.len());
                    elems.push(y);
                }
            }
            i += 1;
        }
        let n = elems.len();
        let mut mul = vec![0u16; n * n];
        for a in 0..n {
            for b in 0..n {
                mul[a * n + b] = index[&elems[a].compose(&elems[b])] as u16;
            }
        }
        (CayleyTable { n, mul, identity: 0 }, elems)
    }

    fn from_fn(n: usize, identity: usize, f: impl Fn(usize, usize) -> usize) -> CayleyTable {
        let mut mul = vec![0u16; n * n];
        for a in 0..n {
            for b in 0..n {
                mul[a * n + b] = f(a, b) as u16;
            }
        }
        CayleyTable { n, mul, identity }
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a * self.n + b] as usize
    }

    pub fn inv(&self, a: usize) -> usize {
        (0..self.n).find(|&b| self.mul(a, b) == self.identity).expect("group table")
    }

    pub fn element_order(&self, a: usize) -> usize {
        let mut x = a;
        let mut k = 1;
        while x != self.identity {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    /// Sorted elements of the subgroup generated by `gens`.
    pub fn closure(&self, gens: &[usize]) -> Vec<usize> {
        let mut seen = vec![false; self.n];
        seen[self.identity] = true;
        let mut out = vec![self.identity];
        let mut i = 0;
        while i < out.len() {
            for &g in gens {
                let y = self.mul(out[i], g);
                if !seen[y] {
                    seen[y] = true;
                    out.push(y);
                }
            }
            i += 1;
        }
        out.sort_unstable();
        out
    }

    /// A smallest generating set, found by trying sets of size 1, 2, 3, ... in
    /// lexicographic order.
    pub fn min_generating_set(&self) -> Vec<usize> {
        if self.n == 1 {
            return Vec::new();
        }
        for size in 1..=self.n {
            let mut found = None;
            crate::perm::for_each_combination(self.n, size, |idx| {
                if found.is_none() && self.closure(idx).len() == self.n {
                    found = Some(idx.to_vec());
                }
            });
            if let Some(g) = found {
                return g;
            }
        }
        unreachable!("the whole group generates itself")
    }

    /// Sorted counts of element orders, a cheap isomorphism invariant.
    pub fn order_profile(&self) -> Vec<usize> {
        let mut p: Vec<usize> = (0..self.n).map(|a| self.element_order(a)).collect();
        p.sort_unstable();
        p
    }

    /// Isomorphisms `self -> other` as element maps. Stops after the first if
    /// `first_only`.
    pub fn isomorphisms(&self, other: &CayleyTable, first_only: bool) -> Vec<Vec<usize>> {
        if self.n != other.n {
            return Vec::new();
        }
        let gens = self.min_generating_set();
        let orders: Vec<usize> = gens.iter().map(|&g| self.element_order(g)).collect();
        let candidates: Vec<Vec<usize>> = orders
            .iter()
            .map(|&o| (0..other.n).filter(|&b| other.element_order(b) == o).collect())
            .collect();
        let mut out = Vec::new();
        let mut choice = vec![0usize; gens.len()];
        if candidates.iter().any(|c| c.is_empty()) {
            return out;
        }
        loop {
            let images: Vec<usize> = choice.iter().zip(&candidates).map(|(&i, c)| c[i]).collect();
            if let Some(map) = self.extend_hom(&gens, &images, other) {
                out.push(map);
                if first_only {
                    return out;
                }
            }
            // odometer
            let mut pos = 0;
            loop {
                if pos == choice.len() {
                    return out;
                }
                choice[pos] += 1;
                if choice[pos] < candidates[pos].len() {
                    break;
                }
                choice[pos] = 0;
                pos += 1;
            }
        }
    }

    /// Extends `gens[i] -> images[i]` to a bijective homomorphism, if possible.
    fn extend_hom(&self, gens: &[usize], images: &[usize], other: &CayleyTable) -> Option<Vec<usize>> {
        const UNSET: usize = usize::MAX;
        let mut map = vec![UNSET; self.n];
        map[self.identity] = other.identity;
        let mut queue = VecDeque::from([self.identity]);
        while let Some(x) = queue.pop_front() {
            for (&g, &h) in gens.iter().zip(images) {
                let y = self.mul(x, g);
                let fy = other.mul(map[x], h);
                if map[y] == UNSET {
                    map[y] = fy;
                    queue.push_back(y);
                } else if map[y] != fy {
                    return None;
                }
            }
        }
        let mut hit = vec![false; other.n];
        for &y in &map {
            if y == UNSET || hit[y] {
                return None;
            }
            hit[y] = true;
        }
        Some(map)
    }

    pub fn is_isomorphic(&self, other: &CayleyTable) -> bool {
        self.order_profile() == other.order_profile() && !self.isomorphisms(other, true).is_empty()
    }

    pub fn automorphisms(&self) -> Vec<Vec<usize>> {
        self.isomorphisms(self, false)
    }

    /// All subgroups of order `m` generated by at most two elements.
    pub fn two_generated_subgroups(&self, m: usize) -> Vec<Vec<usize>> {
        let mut found: BTreeSet<Vec<usize>> = BTreeSet::new();
        for a in 0..self.n {
            if !m.is_multiple_of(self.element_order(a)) {
                continue;
            }
            for b in a..self.n {
                if !m.is_multiple_of(self.element_order(b)) {
                    continue;
                }
                let s = self.closure(&[a, b]);
                if s.len() == m {
                    found.insert(s);
                }
            }
        }
        found.into_iter().collect()
    }

    pub fn conjugate_subgroup(&self, s: &[usize], g: usize) -> Vec<usize> {
        let gi = self.inv(g);
        let mut c: Vec<usize> = s.iter().map(|&x| self.mul(self.mul(gi, x), g)).collect();
        c.sort_unstable();
        c
    }

    /// Number of conjugacy classes among the given subgroups.
    pub fn conjugacy_class_count(&self, subgroups: &[Vec<usize>]) -> usize {
        let mut class_of: HashMap<&Vec<usize>, usize> = HashMap::new();
        let mut classes = 0;
        for s in subgroups {
            if class_of.contains_key(s) {
                continue;
            }
            for g in 0..self.n {
                let c = self.conjugate_subgroup(s, g);
                if let Some(k) = subgroups.iter().find(|x| **x == c) {
                    class_of.insert(k, classes);
                }
            }
            classes += 1;
        }
        classes
    }
}

/// Published classification data for the fifteen groups of order 84, indexed
/// by small-group id minus one.
#[derive(Clone, Copy, Debug)]
pub struct Order84Reference {
    pub id: usize,
    pub structure: &'static str,
    pub good_orbits: u64,
    pub normalizer_order: u128,
    pub normalizer_reps: u64,
    pub designs: usize,
}

pub const ORDER84_REFERENCE: [Order84Reference; 15] = [
    Order84Reference { id: 1, structure: "C7 : C12", good_orbits: 703_591, normalizer_order: 7_056, normalizer_reps: 8_509, designs: 8 },
    Order84Reference { id: 2, structure: "C4 x (C7 : C3)", good_orbits: 637_595, normalizer_order: 7_056, normalizer_reps: 7_697, designs: 8 },
    Order84Reference { id: 3, structure: "C7 x (C3 : C4)", good_orbits: 757_275, normalizer_order: 42_336, normalizer_reps: 8_985, designs: 0 },
    Order84Reference { id: 4, structure: "C3 x (C7 : C4)", good_orbits: 883_955, normalizer_order: 14_112, normalizer_reps: 5_443, designs: 0 },
    Order84Reference { id: 5, structure: "C21 : C4", good_orbits: 1_279_623, normalizer_order: 42_336, normalizer_reps: 2_697, designs: 0 },
    Order84Reference { id: 6, structure: "C84", good_orbits: 1_011_339, normalizer_order: 14_112, normalizer_reps: 35_765, designs: 0 },
    Order84Reference { id: 7, structure: "C2 x (C7 : C6)", good_orbits: 30_191, normalizer_order: 7_056, normalizer_reps: 406, designs: 0 },
    Order84Reference { id: 8, structure: "S3 x D14", good_orbits: 2_443, normalizer_order: 21_168, normalizer_reps: 23, designs: 0 },
    Order84Reference { id: 9, structure: "C2 x C2 x (C7 : C3)", good_orbits: 378_903, normalizer_order: 21_168, normalizer_reps: 1_593, designs: 2 },
    Order84Reference { id: 10, structure: "C7 x A4", good_orbits: 409_764, normalizer_order: 84_672, normalizer_reps: 2_018, designs: 0 },
    Order84Reference { id: 11, structure: "(C14 x C2) : C3", good_orbits: 577_269, normalizer_order: 42_336, normalizer_reps: 1_184, designs: 6 },
    Order84Reference { id: 12, structure: "C6 x D14", good_orbits: 61_021, normalizer_order: 14_112, normalizer_reps: 444, designs: 0 },
    Order84Reference { id: 13, structure: "C14 x S3", good_orbits: 278_489, normalizer_order: 42_336, normalizer_reps: 2_184, designs: 0 },
    Order84Reference { id: 14, structure: "D84", good_orbits: 4_265, normalizer_order: 42_336, normalizer_reps: 94, designs: 0 },
    Order84Reference { id: 15, structure: "C42 x C2", good_orbits: 666_585, normalizer_order: 42_336, normalizer_reps: 7_162, designs: 0 },
];

/// `C_7 ⋊_phi H` with its multiplication table and its action on 91 points.
#[derive(Clone, Debug)]
pub struct Order84Group {
    pub h: OrderTwelve,
    /// Images of the generators of `H` in the units mod 7.
    pub phi: Vec<u32>,
    pub table: CayleyTable,
    /// Element `(c, h)` has index `c * 12 + h`, with `h` indexing `H`'s elements.
    complement: Vec<usize>,
    /// Indices of the generators `(1, e), (0, h_1), ...`.
    generators: Vec<usize>,
    /// Right coset of the complement containing each element, numbered 0..7.
    coset_of: Vec<usize>,
    pub group: PermutationGroup,
}

impl Order84Group {
    /// Small-group id (1..=15) of the isomorphism type, from the kernel of `phi`.
    pub fn small_group_id(&self) -> usize {
        let image: BTreeSet<u32> = self.phi_values().into_iter().collect();
        let image_order = image.len();
        match (self.h, image_order) {
            (OrderTwelve::C12, 1) => 6,
            (OrderTwelve::C12, 2) => 4,
            (OrderTwelve::C12, 3) => 2,
            (OrderTwelve::C12, 6) => 1,
            (OrderTwelve::C6xC2, 1) => 15,
            (OrderTwelve::C6xC2, 2) => 12,
            (OrderTwelve::C6xC2, 3) => 9,
            (OrderTwelve::C6xC2, 6) => 7,
            (OrderTwelve::D12, 1) => 13,
            // the rotation of order 6 acts trivially: C42 extended by an inversion
            (OrderTwelve::D12, 2) if self.phi[0] == 1 => 14,
            (OrderTwelve::D12, 2) => 8,
            (OrderTwelve::A4, 1) => 10,
            (OrderTwelve::A4, 3) => 11,
            (OrderTwelve::Dic3, 1) => 3,
            (OrderTwelve::Dic3, 2) => 5,
            _ => unreachable!("homomorphism images are checked at construction"),
        }
    }

    pub fn reference(&self) -> &'static Order84Reference {
        &ORDER84_REFERENCE[self.small_group_id() - 1]
    }

    fn phi_values(&self) -> Vec<u32> {
        let (deg, gens) = self.h.generators();
        extend_phi(deg, &gens, &self.phi).expect("validated")
    }

    /// Normalizer of the 91-point action in `S_91`.
    ///
    /// The two orbits have different sizes, so the normalizer acts on each.
    /// On the regular orbit it is the holomorph of the group; every element
    /// induces an automorphism `a`, and `a` lifts to the coset orbit because
    /// all subgroups of order 12 are conjugate. The kernel of the map to
    /// `Aut` is the left regular action times the centralizer on 7 points.
    pub fn normalizer(&self) -> Result<PermutationGroup> {
        let n = self.table.order();
        let mut gens: Vec<Permutation> = Vec::new();
        // left multiplications centralize the right regular action
        for &g in &self.generators {
            gens.push(self.point_map(|c| c, |x| self.table.mul(g, x)));
        }
        for sigma in self.coset_centralizer() {
            gens.push(self.point_map(|c| sigma[c], |x| x));
        }
        let h_set: Vec<usize> = self.complement.clone();
        let mut norm = PermutationGroup::new(91, gens.clone())?;
        for alpha in self.table.automorphisms() {
            let mut image: Vec<usize> = h_set.iter().map(|&x| alpha[x]).collect();
            image.sort_unstable();
            // alpha(H) = y^-1 H y
            let y = (0..n)
                .find(|&y| self.table.conjugate_subgroup(&h_set, y) == image)
                .ok_or_else(|| Error::Parameters("complement image is not conjugate to the complement".into()))?;
            let mut sigma = [usize::MAX; 7];
            for (x, &ax) in alpha.iter().enumerate().take(n) {
                let target = self.coset_of[self.table.mul(y, ax)];
                let c = self.coset_of[x];
                debug_assert!(sigma[c] == usize::MAX || sigma[c] == target);
                sigma[c] = target;
            }
            let pi = self.point_map(|c| sigma[c], |x| alpha[x]);
            if !norm.contains(&pi) {
                gens.push(pi);
                norm = PermutationGroup::new(91, gens.clone())?;
            }
        }
        Ok(norm)
    }

    fn point_map(&self, on_cosets: impl Fn(usize) -> usize, on_elements: impl Fn(usize) -> usize) -> Permutation {
        let mut images = Vec::with_capacity(91);
        for c in 0..7 {
            images.push(on_cosets(c) as u32);
        }
        for x in 0..self.table.order() {
            images.push((7 + on_elements(x)) as u32);
        }
        Permutation::from_images(images).expect("bijective point map")
    }

    /// Permutations of the 7 cosets commuting with the coset action.
    fn coset_centralizer(&self) -> Vec<Vec<usize>> {
        let actions: Vec<Vec<usize>> = self
            .generators
            .iter()
            .map(|&g| {
                let mut a = vec![0; 7];
                for x in 0..self.table.order() {
                    a[self.coset_of[x]] = self.coset_of[self.table.mul(x, g)];
                }
                a
            })
            .collect();
        let mut out = Vec::new();
        let mut perm: Vec<usize> = (0..7).collect();
        loop {
            let identity = perm.iter().enumerate().all(|(i, &x)| i == x);
            if !identity && actions.iter().all(|a| (0..7).all(|c| perm[a[c]] == a[perm[c]])) {
                out.push(perm.clone());
            }
            if !next_permutation(&mut perm) {
                break;
            }
        }
        out
    }
}

fn next_permutation(p: &mut [usize]) -> bool {
    let Some(i) = (1..p.len()).rev().find(|&i| p[i - 1] < p[i]) else {
        return false;
    };
    let j = (i..p.len()).rev().find(|&j| p[j] > p[i - 1]).unwrap();
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// Values of `phi` on every element of `H` (in [`CayleyTable::from_generators`]
/// order), or an error if the generator images do not define a homomorphism.
fn extend_phi(degree: usize, gens: &[Permutation], phi: &[u32]) -> Result<Vec<u32>> {
    if phi.len() != gens.len() {
        return Err(Error::InvalidHomomorphism(format!(
            "{} generator images given, H has {} generators",
            phi.len(),
            gens.len()
        )));
    }
    if let Some(&bad) = phi.iter().find(|&&a| a == 0 || a >= 7) {
        return Err(Error::InvalidHomomorphism(format!("{bad} is not a unit mod 7")));
    }
    let (table, elems) = CayleyTable::from_generators(degree, gens);
    let gen_index: Vec<usize> = gens.iter().map(|g| elems.iter().position(|e| e == g).unwrap()).collect();
    let mut val = vec![0u32; table.order()];
    val[table.identity()] = 1;
    let mut queue = VecDeque::from([table.identity()]);
    while let Some(x) = queue.pop_front() {
        for (&g, &a) in gen_index.iter().zip(phi) {
            let y = table.mul(x, g);
            let v = val[x] * a % 7;
            if val[y] == 0 {
                val[y] = v;
                queue.push_back(y);
            } else if val[y] != v {
                return Err(Error::InvalidHomomorphism(format!(
                    "relations violated by generator images {phi:?}"
                )));
            }
        }
    }
    Ok(val)
}

/// Builds `C_7 ⋊_phi H` and its action on 91 points.
pub fn build_order84(h: OrderTwelve, phi: &[u32]) -> Result<Order84Group> {
    let (deg, hgens) = h.generators();
    let phi_val = extend_phi(deg, &hgens, phi).map_err(|e| match e {
        Error::InvalidHomomorphism(m) => Error::InvalidHomomorphism(format!("{h}: {m}")),
        other => other,
    })?;
    let (htab, helems) = CayleyTable::from_generators(deg, &hgens);
    let m = htab.order();
    debug_assert_eq!(m, 12);
    let n = 7 * m;
    let table = CayleyTable::from_fn(n, 0, |a, b| {
        let (c1, h1) = (a / m, a % m);
        let (c2, h2) = (b / m, b % m);
        let c = (c1 as u32 + phi_val[h1] * c2 as u32) % 7;
        c as usize * m + htab.mul(h1, h2)
    });
    let complement: Vec<usize> = (0..m).collect();
    let mut generators = vec![m]; // (1, e)
    for g in &hgens {
        generators.push(helems.iter().position(|e| e == g).unwrap());
    }

    // right cosets H x, numbered by their smallest element
    let mut coset_key = vec![0usize; n];
    for (x, key) in coset_key.iter_mut().enumerate() {
        *key = complement.iter().map(|&hh| table.mul(hh, x)).min().unwrap();
    }
    let mut keys: Vec<usize> = coset_key.clone();
    keys.sort_unstable();
    keys.dedup();
    debug_assert_eq!(keys.len(), 7);
    let coset_of: Vec<usize> = coset_key.iter().map(|k| keys.binary_search(k).unwrap()).collect();

    let mut perms = Vec::new();
    for &g in &generators {
        let mut images = Vec::with_capacity(91);
        let mut on_cosets = vec![0u32; 7];
        for x in 0..n {
            on_cosets[coset_of[x]] = coset_of[table.mul(x, g)] as u32;
        }
        images.extend(on_cosets);
        for x in 0..n {
            images.push((7 + table.mul(x, g)) as u32);
        }
        perms.push(Permutation::from_images(images)?);
    }
    let group = PermutationGroup::new(91, perms)?;
    Ok(Order84Group {
        h,
        phi: phi.to_vec(),
        table,
        complement,
        generators,
        coset_of,
        group,
    })
}

/// The 91-point permutation group `C_7 ⋊_phi H`.
pub fn build_order84_group(h: OrderTwelve, phi: &[u32]) -> Result<PermutationGroup> {
    Ok(build_order84(h, phi)?.group)
}

/// Every valid `(H, phi)`, in the order `H` in [`OrderTwelve::ALL`], then
/// generator images in lexicographic order.
pub fn enumerate_order84() -> Vec<Order84Group> {
    let mut out = Vec::new();
    for h in OrderTwelve::ALL {
        let r = h.generators().1.len();
        for idx in 0..6usize.pow(r as u32) {
            let phi: Vec<u32> = (0..r)
                .map(|i| 1 + (idx / 6usize.pow((r - 1 - i) as u32) % 6) as u32)
                .collect();
            if let Ok(g) = build_order84(h, &phi) {
                out.push(g);
            }
        }
    }
    out
}

/// Isomorphism classes among `groups` (by brute-force isomorphism search),
/// each class listed by indices into `groups`.
pub fn isomorphism_classes(groups: &[Order84Group]) -> Vec<Vec<usize>> {
    let profiles: Vec<Vec<usize>> = groups.iter().map(|g| g.table.order_profile()).collect();
    let mut classes: Vec<Vec<usize>> = Vec::new();
    'next: for i in 0..groups.len() {
        for class in classes.iter_mut() {
            let j = class[0];
            if profiles[i] == profiles[j] && !groups[j].table.isomorphisms(&groups[i].table, true).is_empty() {
                class.push(i);
                continue 'next;
            }
        }
        classes.push(vec![i]);
    }
    classes
}

/// One representative per isomorphism type, sorted by small-group id, so that
/// entry `i` is `G_{i+1}`.
pub fn order84_groups() -> Vec<Order84Group> {
    let all = enumerate_order84();
    let classes = isomorphism_classes(&all);
    let mut reps: Vec<Order84Group> = classes.iter().map(|c| all[c[0]].clone()).collect();
    reps.sort_by_key(|g| g.small_group_id());
    reps
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_twelve_groups() {
        for h in OrderTwelve::ALL {
            assert_eq!(h.group().order(), 12, "{h}");
            assert_eq!(h.name().parse::<OrderTwelve>().unwrap(), h);
        }
        let profiles: BTreeSet<Vec<usize>> = OrderTwelve::ALL
            .iter()
            .map(|h| {
                let (d, g) = h.generators();
                CayleyTable::from_generators(d, &g).0.order_profile()
            })
            .collect();
        assert_eq!(profiles.len(), 5);
        assert!("Q8".parse::<OrderTwelve>().is_err());
    }

    #[test]
    fn homomorphism_validation() {
        // A4 has no quotient of order 2
        assert!(matches!(
            build_order84(OrderTwelve::A4, &[1, 6]),
            Err(Error::InvalidHomomorphism(_))
        ));
        assert!(build_order84(OrderTwelve::C12, &[0]).is_err());
        assert!(build_order84(OrderTwelve::C12, &[3, 3]).is_err());
        assert_eq!(enumerate_order84().len(), 27);
    }

    #[test]
    fn semidirect_c12_faithful() {
        // 3 has order 6 mod 7
        let g = build_order84(OrderTwelve::C12, &[3]).unwrap();
        assert_eq!(g.group.order(), 84);
        let sizes: Vec<usize> = g.group.point_orbits().iter().map(|o| o.len()).collect();
        assert_eq!(sizes, vec![7, 84]);
        assert_eq!(g.small_group_id(), 1);
        assert_eq!(g.table.min_generating_set().len(), 2);
    }

    #[test]
    fn direct_product_with_a4() {
        let g = build_order84(OrderTwelve::A4, &[1, 1]).unwrap();
        assert_eq!(g.small_group_id(), 10);
        assert_eq!(g.group.order(), 84);
        // C7 x A4 has elements of order 21 but none of order 42
        let prof = g.table.order_profile();
        assert!(prof.contains(&21) && !prof.contains(&42));
    }

    #[test]
    fn cyclic_84_has_element_of_order_84() {
        let g = build_order84(OrderTwelve::C12, &[1]).unwrap();
        assert_eq!(g.small_group_id(), 6);
        assert!(g.table.order_profile().contains(&84));
    }

    #[test]
    fn next_permutation_counts() {
        let mut p: Vec<usize> = (0..5).collect();
        let mut n = 1;
        while next_permutation(&mut p) {
            n += 1;
        }
        assert_eq!(n, 120);
    }
}

