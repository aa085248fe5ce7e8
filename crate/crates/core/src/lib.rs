pub mod error;
pub mod field;
pub mod linalg;
pub mod series;
pub mod mf;
pub mod homalg;
pub mod poly;
pub mod catalog;
pub mod approx;
pub mod semigroup;
