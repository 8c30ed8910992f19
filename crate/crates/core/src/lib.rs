//! Grassmann graphs over finite fields: construction, verification,
//! decomposition, and rigidity testing of isometric embeddings.
//!
//! The crate is organized in layers:
//!
//! - [`gf`]: finite fields GF(p^e) and field homomorphisms;
//! - [`linalg`]: matrices, RREF-canonical subspaces, quotients, annihilators;
//! - [`grassmann`]: the Grassmann graph Γ_k(V) — enumeration, adjacency,
//!   distance, stars/tops/lines, maximal cliques, duality, automorphisms;
//! - [`semilinear`]: semilinear maps, m-embeddings, induced Grassmannian
//!   maps, constructive recovery of a semilinear map from its point map;
//! - [`embeddings`]: embeddings of one Grassmann graph in another as
//!   explicit tables — constructors, the verifier, the decomposer, duality
//!   transforms, and the rigidity checker;
//! - [`io`]: deterministic plain-text file formats;
//! - [`catalog`]: seeded random instance generators;
//! - [`selftest`]: the acceptance checks behind `cargo test` and the CLI.

pub mod catalog;
pub mod embeddings;
pub mod error;
pub mod gf;
pub mod grassmann;
pub mod io;
pub mod linalg;
pub mod selftest;
pub mod semilinear;

pub use embeddings::{
    check_l_rigidity, construct_balanced, construct_type_a, construct_type_b, decompose, descend,
    dualize_codomain, dualize_domain, feasibility, verify, BalancedFlavor, Decomposition,
    DecompositionKind, EmbeddingType, FeasibilityReport, RigidityReport, VerificationReport,
};
pub use error::{Error, Result};
pub use gf::{Field, FieldHom};
pub use grassmann::{CliqueDescriptor, CliqueKind, GrassmannGraph, GrassmannMap};
pub use linalg::{Matrix, QuotientStructure, Subspace};
pub use semilinear::{PointMap, SemilinearMap};

