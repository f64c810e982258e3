//! Exact homological algebra over Q or F_p.

mod complex;
pub mod json;
mod map;
mod octa;
mod ops;
pub mod random;
pub mod transfer;

pub use complex::{ChainComplex, HomologyProfile};
pub use map::ChainMap;
pub use octa::{
    cone_postcompose, cone_precompose, fiber_projection, octahedral_comparison,
    octahedral_connecting,
};
pub use ops::{
    block_map, block_map_graded, cone, cone_inclusion, cone_of_square, cone_projection, equalizer_total,
    hom_complex, homology_splitting, induces_homology_iso, is_quasi_iso, post_compose,
    pre_compose, quasi_inverse, HomLayout,
};

/// Diagnostics for a complex: empty iff d² = 0 and shapes agree.
pub fn validate_complex(c: &ChainComplex) -> Vec<String> {
    c.validate()
}

pub fn shift(c: &ChainComplex, k: i32) -> ChainComplex {
    c.shift(k)
}

pub fn homology(c: &ChainComplex) -> HomologyProfile {
    c.homology()
}
