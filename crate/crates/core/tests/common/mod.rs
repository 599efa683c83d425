//! Brute-force oracles shared by the integration tests and the acceptance
//! harness. They work on plain vectors and use none of the library's
//! algorithms, so agreement with the library is evidence of correctness.

#![allow(dead_code)]

use std::collections::BTreeSet;

use kmsteiner_core::xcc::XccProblem;

/// Points `0..v`, blocks as sorted vectors.
pub type Blocks = Vec<Vec<usize>>;

pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for x in start..n {
            if n - x < k - cur.len() {
                break;
            }
            cur.push(x);
            rec(x + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Every t-subset of `0..v` lies in exactly one block.
pub fn is_steiner(v: usize, t: usize, blocks: &Blocks) -> bool {
    combinations(v, t)
        .iter()
        .all(|s| blocks.iter().filter(|b| s.iter().all(|x| b.contains(x))).count() == 1)
}

/// Steiner systems S(t, k, v) on `0..v`, found by enumerating every set of
/// `b` distinct k-subsets. Candidates that already share a t-subset are
/// skipped as soon as they are formed, which does not change the result.
pub fn all_steiner_systems(v: usize, k: usize, t: usize) -> Vec<Blocks> {
    let subsets = combinations(v, k);
    let tsets = combinations(v, t);
    let index = |s: &[usize]| tsets.iter().position(|x| x.as_slice() == s).unwrap();
    let covers: Vec<u128> = subsets
        .iter()
        .map(|b| {
            combinations(k, t)
                .iter()
                .map(|c| c.iter().map(|&i| b[i]).collect::<Vec<_>>())
                .fold(0u128, |m, s| m | 1u128 << index(&s))
        })
        .collect();
    let b = tsets.len() / combinations(k, t).len();
    let full: u128 = if tsets.len() == 128 { u128::MAX } else { (1u128 << tsets.len()) - 1 };
    let mut out = Vec::new();
    let mut chosen = Vec::new();
    fn rec(
        start: usize,
        covered: u128,
        b: usize,
        full: u128,
        covers: &[u128],
        chosen: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if chosen.len() == b {
            if covered == full {
                out.push(chosen.clone());
            }
            return;
        }
        for i in start..covers.len() {
            if covers[i] & covered == 0 {
                chosen.push(i);
                rec(i + 1, covered | covers[i], b, full, covers, chosen, out);
                chosen.pop();
            }
        }
    }
    rec(0, 0, b, full, &covers, &mut chosen, &mut out);
    out.into_iter()
        .map(|ids| ids.iter().map(|&i| subsets[i].clone()).collect())
        .collect()
}

/// Applies `perm` to every block and returns the sorted block list.
pub fn relabel(blocks: &Blocks, perm: &[usize]) -> Blocks {
    let mut out: Blocks = blocks
        .iter()
        .map(|b| {
            let mut x: Vec<usize> = b.iter().map(|&p| perm[p]).collect();
            x.sort_unstable();
            x
        })
        .collect();
    out.sort();
    out
}

/// Calls `f` on every permutation of `0..n` (Heap's algorithm).
pub fn for_each_permutation(n: usize, mut f: impl FnMut(&[usize])) {
    let mut a: Vec<usize> = (0..n).collect();
    let mut c = vec![0usize; n];
    f(&a);
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                a.swap(0, i);
            } else {
                a.swap(c[i], i);
            }
            f(&a);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

/// Order of the automorphism group, by trying all `v!` point permutations.
pub fn brute_force_aut_order(v: usize, blocks: &Blocks) -> u64 {
    let mut sorted = blocks.clone();
    sorted.sort();
    let mut count = 0;
    for_each_permutation(v, |p| {
        if relabel(&sorted, p) == sorted {
            count += 1;
        }
    });
    count
}

/// Whether two designs on `0..v` are isomorphic, by backtracking over point
/// maps and checking that every block whose points are all mapped lands on
/// a block.
pub fn isomorphic(v: usize, a: &Blocks, b: &Blocks) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let target: BTreeSet<Vec<usize>> = b.iter().cloned().collect();
    let mut map = vec![usize::MAX; v];
    let mut used = vec![false; v];
    fn consistent(a: &Blocks, target: &BTreeSet<Vec<usize>>, map: &[usize], point: usize) -> bool {
        a.iter().filter(|blk| blk.contains(&point)).all(|blk| {
            if blk.iter().any(|&p| map[p] == usize::MAX) {
                return true;
            }
            let mut img: Vec<usize> = blk.iter().map(|&p| map[p]).collect();
            img.sort_unstable();
            target.contains(&img)
        })
    }
    fn rec(x: usize, v: usize, a: &Blocks, target: &BTreeSet<Vec<usize>>, map: &mut [usize], used: &mut [bool]) -> bool {
        if x == v {
            return true;
        }
        for y in 0..v {
            if used[y] {
                continue;
            }
            map[x] = y;
            used[y] = true;
            if consistent(a, target, map, x) && rec(x + 1, v, a, target, map, used) {
                return true;
            }
            used[y] = false;
        }
        map[x] = usize::MAX;
        false
    }
    rec(0, v, a, &target, &mut map, &mut used)
}

/// Number of isomorphism classes among `designs`, by pairwise testing.
pub fn iso_class_count(v: usize, designs: &[Blocks]) -> usize {
    let mut reps: Vec<&Blocks> = Vec::new();
    for d in designs {
        if !reps.iter().any(|r| isomorphic(v, r, d)) {
            reps.push(d);
        }
    }
    reps.len()
}

/// Steiner systems on `Z_v` invariant under `x -> x + 1`, by enumerating all
/// unions of translate-orbits of k-subsets.
pub fn cyclic_steiner_systems(v: usize, k: usize, t: usize) -> (usize, Vec<Blocks>) {
    let mut seen = BTreeSet::new();
    let mut orbits: Vec<Blocks> = Vec::new();
    for s in combinations(v, k) {
        if seen.contains(&s) {
            continue;
        }
        let mut orbit = BTreeSet::new();
        for shift in 0..v {
            let mut img: Vec<usize> = s.iter().map(|&p| (p + shift) % v).collect();
            img.sort_unstable();
            orbit.insert(img);
        }
        seen.extend(orbit.iter().cloned());
        orbits.push(orbit.into_iter().collect());
    }
    // an orbit is usable only if it covers no t-subset twice
    let good: Vec<Blocks> = orbits
        .into_iter()
        .filter(|o| {
            let mut cover = BTreeSet::new();
            o.iter().all(|b| {
                combinations(k, t)
                    .iter()
                    .all(|c| cover.insert(c.iter().map(|&i| b[i]).collect::<Vec<_>>()))
            })
        })
        .collect();
    let mut out = Vec::new();
    let n = good.len();
    assert!(n < 32, "too many orbits for subset enumeration");
    let need = combinations(v, t).len();
    let weight = combinations(k, t).len();
    for mask in 0u32..(1 << n) {
        let total: usize = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| good[i].len() * weight).sum();
        if total != need {
            continue;
        }
        let mut blocks: Blocks = (0..n)
            .filter(|i| mask >> i & 1 == 1)
            .flat_map(|i| good[i].iter().cloned())
            .collect();
        blocks.sort();
        if is_steiner(v, t, &blocks) {
            out.push(blocks);
        }
    }
    (n, out)
}

/// Exact cover solutions by enumerating option subsets, each checked against
/// the definition: every primary item exactly once, every secondary item
/// either unused or used with one common color by all its options.
pub fn xcc_solutions(p: &XccProblem) -> BTreeSet<Vec<u32>> {
    let n = p.num_options();
    let np = p.primary_items().len();
    let ns = p.secondary_items().len();
    let prim: Vec<Vec<u32>> = (0..n).map(|o| p.option_primary(o).to_vec()).collect();
    let sec: Vec<Vec<(u32, Option<u32>)>> = (0..n)
        .map(|o| p.option_secondary(o).map(|s| (s.item, s.color)).collect())
        .collect();
    let check = |ids: &[usize]| {
        let mut cover = vec![0; np];
        for &o in ids {
            for &i in &prim[o] {
                cover[i as usize] += 1;
            }
        }
        if cover.iter().any(|&c| c != 1) {
            return false;
        }
        (0..ns as u32).all(|s| {
            let uses: Vec<Option<u32>> = ids
                .iter()
                .flat_map(|&o| sec[o].iter().filter(|(x, _)| *x == s).map(|(_, c)| *c))
                .collect();
            uses.len() <= 1 || (uses[0].is_some() && uses.iter().all(|c| *c == uses[0]))
        })
    };
    let mut out = BTreeSet::new();
    // subsets whose primary items are pairwise disjoint, grown in index order
    fn rec(
        start: usize,
        used: &mut Vec<bool>,
        ids: &mut Vec<usize>,
        prim: &[Vec<u32>],
        check: &dyn Fn(&[usize]) -> bool,
        out: &mut BTreeSet<Vec<u32>>,
    ) {
        if check(ids) {
            out.insert(ids.iter().map(|&o| o as u32).collect());
        }
        for o in start..prim.len() {
            if prim[o].iter().any(|&i| used[i as usize]) {
                continue;
            }
            for &i in &prim[o] {
                used[i as usize] = true;
            }
            ids.push(o);
            rec(o + 1, used, ids, prim, check, out);
            ids.pop();
            for &i in &prim[o] {
                used[i as usize] = false;
            }
        }
    }
    rec(0, &mut vec![false; np], &mut Vec::new(), &prim, &check, &mut out);
    out
}

/// Random XCC instance with up to `max_items` items and `max_options`
/// options; colors are drawn from `0..max_colors` or left out.
pub fn random_xcc(rng: &mut impl rand::Rng, max_items: usize, max_options: usize, max_colors: u32) -> XccProblem {
    use kmsteiner_core::xcc::SecondaryUse;
    let np = rng.gen_range(0..=max_items.min(10));
    let ns = rng.gen_range(0..=(max_items - np).min(5));
    let mut p = XccProblem::new(
        (0..np).map(|i| format!("p{i}")).collect(),
        (0..ns).map(|i| format!("s{i}")).collect(),
    )
    .unwrap();
    if np == 0 {
        return p;
    }
    let n = rng.gen_range(0..=max_options);
    for _ in 0..n {
        let mut prim: Vec<u32> = (0..np as u32).filter(|_| rng.gen_bool(0.3)).collect();
        if prim.is_empty() {
            prim.push(rng.gen_range(0..np as u32));
        }
        let mut sec = Vec::new();
        for item in 0..ns as u32 {
            if rng.gen_bool(0.3) {
                let color = if rng.gen_bool(0.7) { Some(rng.gen_range(0..max_colors)) } else { None };
                sec.push(SecondaryUse { item, color });
            }
        }
        p.add_option(&prim, &sec).unwrap();
    }
    p
}
