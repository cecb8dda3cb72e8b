//! Rooted graphs, spidernets and comb products.

mod comb;
mod rooted;
mod spidernet;

pub use comb::{comb_ball, comb_ball_graphs, comb_power, comb_product, SparseCoord};
pub use rooted::{OmegaProfile, RootedGraph};
pub use spidernet::{build_spidernet, SpidernetSpec};
