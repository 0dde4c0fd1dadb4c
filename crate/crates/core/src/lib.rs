//! Exact-arithmetic invariants of the Ekedahl-Oort and Newton
//! stratifications of the unitary moduli space of signature (3, 2).
//!
//! The crate computes, with no floating point anywhere:
//!
//! * coset representatives, lengths and stratum dimensions on the
//!   Ekedahl-Oort side ([`weyl`]);
//! * admissible Newton polygons, their partial order and p-ranks
//!   ([`polygons`]);
//! * final sequences and Harashita's generic first slope ([`finalseq`]);
//! * mod-p Dieudonné modules with semilinear F and V, canonical
//!   filtrations, eta vectors and de Jong-Oort minimal modules ([`modp`]);
//! * integral p-adic Dieudonné modules with exact slope computations two
//!   independent ways ([`crystal`]);
//! * the rule engine that assembles all of the above into the full
//!   interaction table between the two stratifications ([`strata`]).

pub mod crystal;
pub mod error;
pub mod finalseq;
pub mod gf;
pub mod intmat;
pub mod linalg;
pub mod modp;
pub mod polygons;
pub mod rat;
pub mod strata;
pub mod weyl;

pub use error::{Error, Result};
pub use rat::Rat;
