//! Canonical p-dimensions of split simple algebraic groups.
//!
//! The library computes cd_p(G) two independent ways and demands they
//! agree: closed formulas driven by the degrees of the basic polynomial
//! invariants mod p, and a direct computation of the characteristic-map
//! image inside the mod-p Chow ring of the complete flag variety,
//! realized on the Schubert basis through the Chevalley formula.

pub mod budget;
pub mod cache;
pub mod cdim;
pub mod charmap;
pub mod error;
pub mod polyalg;
pub mod rootsys;
pub mod weyl;

pub use budget::Budget;
pub use error::{CoreError, Result};
pub use rootsys::{Family, GroupSpec, Isogeny, RootSystem};
