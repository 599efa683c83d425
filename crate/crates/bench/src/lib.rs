//! Instances shared by the benchmarks.

use kmsteiner_core::designs::{expand, Design};
use kmsteiner_core::km::{build_km, KmInstance};
use kmsteiner_core::orbitgen::{good_k_orbit_reps, t_orbit_reps};
use kmsteiner_core::perm::PermutationGroup;
use kmsteiner_core::symbreak::{decode_solution, encode, EncodingKind};
use kmsteiner_core::xcc::{solve, SolveLimits, SolveMode};

pub fn km_instance(g: &PermutationGroup, v: usize, k: usize, t: usize) -> KmInstance {
    let t_orbits = t_orbit_reps(g, v, t).expect("t-orbits");
    let good = good_k_orbit_reps(g, v, k, t).expect("good orbits");
    build_km(g, t_orbits, good).expect("KM matrix")
}

/// The first design found for `km`, expanded under `g`.
pub fn first_design(km: &KmInstance, g: &PermutationGroup) -> Design {
    let enc = encode(km, None, EncodingKind::A).expect("encoding");
    let mut found = None;
    solve(&enc.problem, SolveMode::First, SolveLimits::default(), |s| {
        found = Some(expand(&decode_solution(s, &enc), &km.k_orbits, g).expect("expansion"));
    });
    found.expect("instance has a solution")
}
