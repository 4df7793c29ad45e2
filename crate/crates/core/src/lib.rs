//! Executable Schreier-type families, combinatorial norms, domination
//! constants and finite-depth domination certificates, all in exact rational
//! arithmetic.
pub mod acceptance;
pub mod domination;
pub mod families;
pub mod lp;
pub mod norms;
pub mod ordinal;
pub mod polytope;
pub mod spreading;
pub mod surd;
pub mod transfer;
