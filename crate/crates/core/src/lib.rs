//! Labelled-disk Garside groupoids.
//!
//! Objects are decompositions of a disk into labelled regions, morphisms are
//! generated by arc rotations. The crate implements the presentation, word
//! reversing, Garside normal forms and the finite lattices of simples.

pub mod disk;
pub mod engine;
pub mod error;
pub mod lattice;
pub mod oracle;
pub mod presentation;

pub use disk::{enumerate_objects, fan, ArcId, DiskObject, Labelling};
pub use engine::{Engine, EngineConfig, GroupoidElement};
pub use error::{Error, Result};
pub use lattice::{interval, tamari, verify_lattice, IntervalLattice, Poset, TamariOrder};
pub use oracle::{oracle_equal, OracleCaps, Verdict};
pub use presentation::{Move, ObjId, Presentation, RelationKind, Word};
