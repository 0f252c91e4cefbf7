//! Real polynomial Gramians through their block-Toeplitz bilinear representation.
//!
//! A degree-`2P` polynomial Gramian `G(t) = X(t)^H X(t)` with real `N x N`
//! coefficients is represented by a pair `({W_k}, {R_p})` of `2P` symmetric
//! `d x d` matrices and `P + 1` real `d x N` matrices satisfying a
//! block-Toeplitz constraint `W R = 0`. This crate constructs such
//! representations, maps them to complex spectral factors and back, decides
//! whether a factor's Gramian admits a real spectral factor, and estimates
//! local dimensions of the representation strata numerically.
//!
//! Start with the `examples/` directory: each example is a runnable walk
//! through one capability (generation, canonicalization, classification, the
//! skew matrix equation, and the dimension scan). The `polygram` binary wraps
//! the same capabilities as subcommands.

pub mod cli;
pub mod conjecture;
pub mod factor;
pub mod hrep;
pub mod numeric;
pub mod polymat;
pub mod tol;

pub use hrep::HRep;
pub use polymat::{GramPoly, PolyMatrix};
pub use tol::Tolerances;
