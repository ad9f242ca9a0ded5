//! Exact arithmetic with monomials ζ_N^e·c^q and matrices built from them,
//! the Galois actions σ_a and τ, and the endomorphisms α and β.

mod endo;
mod galois;
mod matrix;
mod mono;

pub use endo::{
    alpha_matrix, beta_matrix, big_alpha, big_beta, conjugation_relation_holds, verify_twisted_lefschetz,
    Endomorphisms, Twist,
};
pub use galois::GaloisElt;
pub use matrix::{MatrixDump, MonoMatrix};
pub use mono::{CycMono, RootOfUnity};
