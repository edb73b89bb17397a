//! Finite ordered structures with added operations: extensions of partial operations,
//! superamalgamation, the free join-semilattice with a closure operation, Fraïssé chains
//! and a decision procedure for universal sentences.

pub mod amalgam;
pub mod error;
pub mod fraisse;
pub mod freealg;
pub mod io;
pub mod logic;
pub mod order;
pub mod partial_ext;
pub mod sample;

pub use error::{Error, Result};
pub use order::{Embedding, FinitePoset, OpTable, Operation, Order, OrderedStructure, StructureKind};
pub use partial_ext::{PartialOp, PropertySpec, UnaryCase};
