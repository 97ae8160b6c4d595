//! Finite-structure duality engine.
//!
//! The crate mechanises alter-ego constructions for finite total structures:
//! homomorphism enumeration, unary clones, the maximal-relation search over
//! carrier-map preimages, an entailment decision procedure, executable
//! checkers for the duality / co-duality / strong-duality hypotheses, and
//! brute-force verification of the induced dual adjunction on depth-bounded
//! test families. A catalog supplies the standard worked examples
//! (two-element lattice and semilattice bases, De Morgan, Stone, Kleene,
//! periodic shift algebras, small shift semilattices).

pub mod catalog;
pub mod clone;
pub mod error;
pub mod hom;
pub mod io;
mod iter_util;
pub mod limits;
pub mod par;
pub mod piggyback;
pub mod reduct;
pub mod relation;
pub mod signature;
pub mod structure;
pub mod term;
pub mod verify;

pub use error::{Error, Result};
pub use hom::Hom;
pub use limits::{Limits, SearchCfg, SearchOrder};
pub use reduct::ReductSpec;
pub use relation::Relation;
pub use signature::Signature;
pub use structure::FiniteStructure;
pub use term::Term;
