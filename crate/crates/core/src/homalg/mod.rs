//! Hom and Ext between factorizations, isomorphism testing, direct-sum
//! decomposition, Smith form over `k[[t]]` and syzygies of presentations.

mod hom;

pub use hom::{
    annihilator_power, ext1, hom_degree_pairs, hom_space, stable_hom, ExtSpace, HomDegree, MapPair, StableDegree,
    StableHom, STABILITY_MARGIN,
};

mod iso;

pub use iso::{is_isomorphic, is_isomorphic_seeded, IsoVerdict, Refutation, ISO_TRIALS};

mod decompose;

pub use decompose::{decompose, is_indecomposable, name_of, Decomposition, DecompositionSummary, Piece};

mod smith;

pub use smith::{decompose_artinian, smith_over_dvr};

mod syzygy;

pub use syzygy::{complete_factorization, syzygy_module, syzygy_module_pow, Syzygy};

mod ar;

pub use ar::almost_split_middle;
