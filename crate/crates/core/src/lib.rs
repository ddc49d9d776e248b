//! Definable matchings with small defect in bipartite graphs whose edges are
//! partial definable bijections, and the embedding algebra built on them.

pub mod affine;
pub mod coverage;
mod error;
pub mod graph;
pub mod instances;
pub mod iso;
pub mod matching;
pub mod oracle;
pub mod semigroup;
pub mod set;
pub mod universe;

pub use affine::AffineRule;
pub use coverage::{k_for_target, match_with_defect, y_chain_certificate, CoverageOptions, CoverageReport, NmReading, Variant};
pub use error::{Error, Result};
pub use graph::{Clause, GraphSpec, NiceGraph, Side, ValidationReport, Violation};
pub use iso::{compose, enumerate_pseudogroup, realize, IsoWord, Letter, PartialIso};
pub use matching::{
    aug_start_set, covered, eliminate, flip_family, validate_matching, Component, GeneratingSequence, Part,
    SymbolicMatching,
};
pub use oracle::ExplicitGraph;
pub use set::{DefSet, Periodic, SetOp, SetSpec, Size};
pub use universe::{Backend, GeneratorJson, GeneratorSpec, Limits, Universe, UniverseSpec};
pub use semigroup::{
    cancel, check_leq_0, check_leq_m, compose_witness, find_embedding, sum_witness, tarski_verdict, two_from_k, verify_witness,
    EmbeddingWitness, SearchBounds, TaggedUniverse, TarskiVerdict,
};
