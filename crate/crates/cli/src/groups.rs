use std::fs;

use anyhow::{bail, Context, Result};
use kmsteiner_core::perm::io::parse_group;
use kmsteiner_core::perm::order84::{order84_groups, Order84Group};
use kmsteiner_core::perm::{cyclic_group, normalizer_of_cyclic, verify_normalizes, PermutationGroup};

use crate::config::GroupSource;

/// `G_i` for `i` in 1..=15.
pub fn order84(i: usize) -> Result<Order84Group> {
    let mut all = order84_groups();
    if !(1..=all.len()).contains(&i) {
        bail!("there is no group G{i} of order 84");
    }
    Ok(all.swap_remove(i - 1))
}

pub fn load(source: &GroupSource, v: usize, group: Option<&PermutationGroup>) -> Result<PermutationGroup> {
    let g = match source {
        GroupSource::Trivial => PermutationGroup::trivial(v),
        GroupSource::Cyclic => cyclic_group(v)?,
        GroupSource::CyclicNormalizer => normalizer_of_cyclic(v)?,
        GroupSource::Order84(i) => order84(*i)?.group,
        GroupSource::Order84Normalizer(i) => order84(*i)?.normalizer()?,
        GroupSource::SameAsGroup => match group {
            Some(g) => g.clone(),
            None => bail!("normalizer = group used for the prescribed group itself"),
        },
        GroupSource::File(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading group file {}", path.display()))?;
            parse_group(&text).with_context(|| format!("in group file {}", path.display()))?
        }
    };
    if g.degree() != v {
        bail!("group has degree {} but v = {v}", g.degree());
    }
    Ok(g)
}

/// Loads the normalizer and checks that it normalizes `group` and contains it.
pub fn load_normalizer(source: &GroupSource, v: usize, group: &PermutationGroup) -> Result<PermutationGroup> {
    let n = load(source, v, Some(group))?;
    if !verify_normalizes(&n, group)? {
        bail!("the normalizer does not normalize the prescribed group");
    }
    if let Some(g) = group.generators().iter().find(|g| !n.contains(g)) {
        bail!("the normalizer does not contain the group generator {g}");
    }
    Ok(n)
}
