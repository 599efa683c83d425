use std::collections::{BTreeSet, HashSet, VecDeque};
use std::fmt;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::perm::{Permutation, PointSubset};

/// Largest group whose elements we are willing to list explicitly.
pub const ELEMENT_CAP: usize = 1_000_000;

/// One level of a stabilizer chain.
#[derive(Clone, Debug)]
struct Level {
    base: usize,
    gens: Vec<Permutation>,
    /// `transversal[x]` maps `base` to `x`, for `x` in the basic orbit.
    transversal: Vec<Option<Permutation>>,
    orbit: Vec<usize>,
}

impl Level {
    fn new(base: usize, degree: usize) -> Self {
        let mut level = Level {
            base,
            gens: Vec::new(),
            transversal: vec![None; degree],
            orbit: Vec::new(),
        };
        level.recompute(degree);
        level
    }

    fn recompute(&mut self, degree: usize) {
        self.transversal = vec![None; degree];
        self.transversal[self.base] = Some(Permutation::identity(degree));
        self.orbit = vec![self.base];
        let mut i = 0;
        while i < self.orbit.len() {
            let beta = self.orbit[i];
            for s in &self.gens {
                let gamma = s.apply(beta);
                if self.transversal[gamma].is_none() {
                    let u = self.transversal[beta].as_ref().unwrap().compose(s);
                    self.transversal[gamma] = Some(u);
                    self.orbit.push(gamma);
                }
            }
            i += 1;
        }
    }
}

/// Stabilizer chain from the deterministic Schreier-Sims algorithm.
#[derive(Clone, Debug)]
struct StabChain {
    degree: usize,
    levels: Vec<Level>,
}

impl StabChain {
    fn build(degree: usize, generators: &[Permutation]) -> StabChain {
        let mut chain = StabChain {
            degree,
            levels: Vec::new(),
        };
        let gens: Vec<&Permutation> = generators.iter().filter(|g| !g.is_identity()).collect();
        for g in &gens {
            if chain.levels.iter().all(|l| g.apply(l.base) == l.base) {
                let b = g.smallest_moved_point().unwrap();
                chain.levels.push(Level::new(b, degree));
            }
        }
        for l in 0..chain.levels.len() {
            let fixed: Vec<usize> = chain.levels[..l].iter().map(|lv| lv.base).collect();
            chain.levels[l].gens = gens
                .iter()
                .filter(|g| fixed.iter().all(|&b| g.apply(b) == b))
                .map(|g| (*g).clone())
                .collect();
            chain.levels[l].recompute(degree);
        }

        let mut i = chain.levels.len();
        'outer: while i > 0 {
            let lvl = i - 1;
            let orbit = chain.levels[lvl].orbit.clone();
            let gens = chain.levels[lvl].gens.clone();
            for &beta in &orbit {
                for s in &gens {
                    let u_beta = chain.levels[lvl].transversal[beta].as_ref().unwrap();
                    let gamma = s.apply(beta);
                    let u_gamma = chain.levels[lvl].transversal[gamma].as_ref().unwrap();
                    let schreier = u_beta.compose(s).compose(&u_gamma.inverse());
                    if schreier.is_identity() {
                        continue;
                    }
                    let (h, j) = chain.strip(schreier, lvl + 1);
                    if j < chain.levels.len() || !h.is_identity() {
                        if j == chain.levels.len() {
                            let b = h.smallest_moved_point().unwrap();
                            chain.levels.push(Level::new(b, degree));
                        }
                        for l in lvl + 1..=j {
                            chain.levels[l].gens.push(h.clone());
                            chain.levels[l].recompute(degree);
                        }
                        i = j + 1;
                        continue 'outer;
                    }
                }
            }
            i -= 1;
        }
        chain
    }

    /// Sifts `g` through the levels starting at `from`. Returns the residue and
    /// the index of the level where sifting stopped (`levels.len()` if it went
    /// all the way through).
    fn strip(&self, g: Permutation, from: usize) -> (Permutation, usize) {
        let mut h = g;
        for (j, level) in self.levels.iter().enumerate().skip(from) {
            let beta = h.apply(level.base);
            match &level.transversal[beta] {
                None => return (h, j),
                Some(u) => h = h.compose(&u.inverse()),
            }
        }
        (h, self.levels.len())
    }

    fn order(&self) -> u128 {
        self.levels.iter().map(|l| l.orbit.len() as u128).product()
    }

    fn contains(&self, g: &Permutation) -> bool {
        if g.degree() != self.degree {
            return false;
        }
        let (h, j) = self.strip(g.clone(), 0);
        j == self.levels.len() && h.is_identity()
    }
}

/// A permutation group given by generators. The stabilizer chain and the
/// element list are computed lazily and cached.
pub struct PermutationGroup {
    degree: usize,
    generators: Vec<Permutation>,
    chain: OnceLock<StabChain>,
    elements: OnceLock<Vec<Permutation>>,
}

impl Clone for PermutationGroup {
    fn clone(&self) -> Self {
        PermutationGroup {
            degree: self.degree,
            generators: self.generators.clone(),
            chain: self.chain.clone(),
            elements: self.elements.clone(),
        }
    }
}

impl fmt::Debug for PermutationGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PermutationGroup")
            .field("degree", &self.degree)
            .field("generators", &self.generators)
            .finish()
    }
}

impl PermutationGroup {
    /// An empty generator list is taken to mean the trivial group.
    pub fn new(degree: usize, generators: Vec<Permutation>) -> Result<Self> {
        if degree == 0 {
            return Err(Error::Parameters("degree must be positive".into()));
        }
        for g in &generators {
            if g.degree() != degree {
                return Err(Error::DegreeMismatch {
                    left: degree,
                    right: g.degree(),
                });
            }
        }
        let generators = if generators.is_empty() {
            vec![Permutation::identity(degree)]
        } else {
            generators
        };
        Ok(PermutationGroup {
            degree,
            generators,
            chain: OnceLock::new(),
            elements: OnceLock::new(),
        })
    }

    pub fn trivial(degree: usize) -> Self {
        PermutationGroup::new(degree, Vec::new()).expect("positive degree")
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generators(&self) -> &[Permutation] {
        &self.generators
    }

    fn chain(&self) -> &StabChain {
        self.chain
            .get_or_init(|| StabChain::build(self.degree, &self.generators))
    }

    pub fn order(&self) -> u128 {
        self.chain().order()
    }

    /// Base points of the stabilizer chain (0-based).
    pub fn base(&self) -> Vec<usize> {
        self.chain().levels.iter().map(|l| l.base).collect()
    }

    pub fn contains(&self, g: &Permutation) -> bool {
        self.chain().contains(g)
    }

    /// All elements, listed as products of transversal elements.
    pub fn elements(&self) -> Result<&[Permutation]> {
        let order = self.order();
        if order > ELEMENT_CAP as u128 {
            return Err(Error::GroupTooLarge {
                order,
                cap: ELEMENT_CAP,
            });
        }
        Ok(self.elements.get_or_init(|| {
            let chain = self.chain();
            let mut elems = vec![Permutation::identity(self.degree)];
            for level in chain.levels.iter().rev() {
                let mut next = Vec::with_capacity(elems.len() * level.orbit.len());
                for e in &elems {
                    for &x in &level.orbit {
                        next.push(e.compose(level.transversal[x].as_ref().unwrap()));
                    }
                }
                elems = next;
            }
            elems
        }))
    }

    /// Orbits of the group on points, each sorted, ordered by smallest point.
    pub fn point_orbits(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.degree];
        let mut orbits = Vec::new();
        for start in 0..self.degree {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            let mut orbit = vec![start];
            let mut i = 0;
            while i < orbit.len() {
                let x = orbit[i];
                for g in &self.generators {
                    let y = g.apply(x);
                    if !seen[y] {
                        seen[y] = true;
                        orbit.push(y);
                    }
                }
                i += 1;
            }
            orbit.sort_unstable();
            orbits.push(orbit);
        }
        orbits
    }

    /// Closure of `{s}` under the generators.
    pub fn orbit_of_subset(&self, s: &PointSubset) -> BTreeSet<PointSubset> {
        let mut seen = HashSet::new();
        seen.insert(s.clone());
        let mut queue = VecDeque::from([s.clone()]);
        while let Some(x) = queue.pop_front() {
            for g in &self.generators {
                let y = x.image(g);
                if seen.insert(y.clone()) {
                    queue.push_back(y);
                }
            }
        }
        seen.into_iter().collect()
    }

    /// Lexicographically smallest member of the orbit of `s`.
    pub fn lex_min_rep(&self, s: &PointSubset) -> Result<PointSubset> {
        let elems = self.elements()?;
        Ok(elems.iter().map(|g| s.image(g)).min().expect("non-empty group"))
    }
}

/// `<x -> x+1 mod v>` on points `1..v`.
pub fn cyclic_group(v: usize) -> Result<PermutationGroup> {
    if v < 2 {
        return Err(Error::Parameters(format!("cyclic group needs v >= 2, got {v}")));
    }
    let shift = Permutation::from_images_unchecked((0..v).map(|x| ((x + 1) % v) as u32).collect());
    PermutationGroup::new(v, vec![shift])
}

/// `C_v ⋊ Aut(C_v)`: the shift plus multiplications by a generating set of
/// the unit group mod `v`, with residue `r` living on point `r + 1`.
pub fn normalizer_of_cyclic(v: usize) -> Result<PermutationGroup> {
    let c = cyclic_group(v)?;
    let mut gens = c.generators().to_vec();
    let units: Vec<usize> = (1..v).filter(|&a| crate::perm::gcd(a as u64, v as u64) == 1).collect();
    let mut generated: BTreeSet<usize> = BTreeSet::from([1 % v]);
    for &a in &units {
        if generated.contains(&a) {
            continue;
        }
        gens.push(Permutation::from_images_unchecked(
            (0..v).map(|x| ((x * a) % v) as u32).collect(),
        ));
        // close the multiplicative subgroup generated so far
        let mut frontier: Vec<usize> = generated.iter().copied().collect();
        generated.insert(a);
        frontier.push(a);
        while let Some(x) = frontier.pop() {
            let current: Vec<usize> = generated.iter().copied().collect();
            for y in current {
                let z = x * y % v;
                if generated.insert(z) {
                    frontier.push(z);
                }
            }
        }
    }
    PermutationGroup::new(v, gens)
}

/// True iff conjugating every generator of `g` by every generator of `n`
/// stays inside `g`.
pub fn verify_normalizes(n: &PermutationGroup, g: &PermutationGroup) -> Result<bool> {
    if n.degree() != g.degree() {
        return Err(Error::DegreeMismatch {
            left: n.degree(),
            right: g.degree(),
        });
    }
    for x in n.generators() {
        let xi = x.inverse();
        for y in g.generators() {
            if !g.contains(&xi.compose(y).compose(x)) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
