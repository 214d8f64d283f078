//! Shared setup for the criterion benches.

use std::collections::BTreeMap;

use kripke_blend::blended::BlendedModel;
use kripke_blend::frames::fork;
use kripke_blend::universes::Universe;

/// The fork with `V_3` at both end-nodes, constructed eagerly at rank 3.
pub fn fork_v3_model() -> BlendedModel {
    let mut universes = BTreeMap::new();
    universes.insert(1usize, Universe::build_vk(3, 10_000).unwrap());
    universes.insert(2usize, Universe::build_vk(3, 10_000).unwrap());
    BlendedModel::construct(fork(), universes, 3, 1_000_000).unwrap()
}
