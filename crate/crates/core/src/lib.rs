//! Cylindrical graph constructions and their dual exponential graphs.
//!
//! The crate is organised bottom-up: [`perm`] supplies twists, [`graph`] the labeled
//! multigraphs, [`hom`] a backtracking homomorphism engine, [`cylinder`] the cylinder
//! algebra, [`construct`] the product `G ⊠ C` and exponential `[C, H]`, [`duality`]
//! the retraction/section machinery, and [`catalog`] the named constructions.

pub mod battery;
pub mod catalog;
pub mod construct;
pub mod cylinder;
pub mod duality;
pub mod error;
pub mod graph;
pub mod hom;
pub mod iso;
pub mod perm;

pub use error::{Error, Result};
pub use graph::{Graph, Label};
pub use perm::{Perm, PermGroup};
