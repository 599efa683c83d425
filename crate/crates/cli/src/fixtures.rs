//! Writes the group files and job configurations shipped under `fixtures/`.

use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use kmsteiner_core::perm::io::write_group;
use kmsteiner_core::perm::order84::{order84_groups, OrderTwelve};
use kmsteiner_core::perm::{cyclic_group, normalizer_of_cyclic, verify_normalizes};

/// Encodings compared in the benchmark configurations.
const BENCHMARKED: [usize; 4] = [1, 2, 9, 11];

fn write(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    log::info!("wrote {}", path.display());
    Ok(())
}

pub fn generate(root: &Path) -> Result<()> {
    let groups = root.join("groups");
    let configs = root.join("configs");

    for v in [7usize, 13, 19, 91] {
        let g = cyclic_group(v)?;
        let n = normalizer_of_cyclic(v)?;
        write(&groups.join(format!("C{v}.txt")), &write_group(&g, &[&format!("cyclic group x -> x+1 mod {v}")]))?;
        write(
            &groups.join(format!("C{v}_normalizer.txt")),
            &write_group(&n, &[&format!("normalizer of C{v} in S{v}: x -> ax+b mod {v}, order {}", n.order())]),
        )?;
    }
    for h in OrderTwelve::ALL {
        let g = h.group();
        write(
            &groups.join("order12").join(format!("{}.txt", h.name())),
            &write_group(&g, &[&format!("{}, order {}", h.name(), g.order())]),
        )?;
    }
    for g in order84_groups() {
        let id = g.small_group_id();
        let r = g.reference();
        let n = g.normalizer()?;
        assert!(verify_normalizes(&n, &g.group)?);
        let phi: Vec<String> = g.phi.iter().map(u32::to_string).collect();
        write(
            &groups.join(format!("G{id:02}.txt")),
            &write_group(
                &g.group,
                &[
                    &format!("G{id} = {}, order {}", r.structure, g.group.order()),
                    &format!("C7 : {} with generator images {} in the units mod 7", g.h.name(), phi.join(",")),
                    "points 1..7: cosets of the complement, points 8..91: regular action",
                ],
            ),
        )?;
        write(
            &groups.join(format!("G{id:02}_normalizer.txt")),
            &write_group(
                &n,
                &[
                    &format!("normalizer of G{id} in S91, order {}", n.order()),
                    "derived from the automorphisms of G; checked with verify_normalizes",
                ],
            ),
        )?;
        let encoding = if BENCHMARKED.contains(&id) { "a,b,c" } else { "c" };
        write(
            &configs.join(format!("G{id:02}.cfg")),
            &format!(
                "# S(2,6,91) designs invariant under G{id} = {}\nname = G{id:02}\nv = 91\nk = 6\nt = 2\n\
                 group_file = ../groups/G{id:02}.txt\nnormalizer_file = ../groups/G{id:02}_normalizer.txt\n\
                 encoding = {encoding}\noutput_dir = ../../out/G{id:02}\n",
                r.structure
            ),
        )?;
    }

    let small = [
        ("fano", "# Fano plane, no prescribed symmetry", 7, 3, 2, None, "a"),
        ("sts13", "# cyclic Steiner triple systems on 13 points", 13, 3, 2, Some("C13"), "a,b,c"),
        ("sts19", "# cyclic Steiner triple systems on 19 points", 19, 3, 2, Some("C19"), "a,b,c"),
        ("s3_4_8", "# Steiner quadruple system on 8 points", 8, 4, 3, None, "a"),
        ("c91", "# cyclic S(2,6,91) designs", 91, 6, 2, Some("C91"), "a,b"),
    ];
    for (name, comment, v, k, t, group, encoding) in small {
        let mut text = format!("{comment}\nname = {name}\nv = {v}\nk = {k}\nt = {t}\n");
        match group {
            Some(g) => text.push_str(&format!(
                "group_file = ../groups/{g}.txt\nnormalizer_file = ../groups/{g}_normalizer.txt\n"
            )),
            None => text.push_str("group = trivial\n"),
        }
        text.push_str(&format!("encoding = {encoding}\noutput_dir = ../../out/{name}\n"));
        write(&configs.join(format!("{name}.cfg")), &text)?;
    }
    Ok(())
}
