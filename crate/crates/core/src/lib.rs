//! Exact classification of signed graphs whose form `2I + A(G)` is positive
//! definite, by reduction to simply laced Dynkin diagrams (A, D, E) under the
//! t-move calculus, with unimodular congruence certificates.
//!
//! The crate is organised bottom-up:
//!
//! - [`graph`], [`linalg`], [`switching`], [`canon`]: signed graphs, exact
//!   Gram-matrix algebra, switching and canonical forms;
//! - [`moves`]: t- and t'-moves, transcripts and certificates;
//! - [`certificates`]: cycle-parity and forbidden induced subgraph witnesses
//!   of non-positivity, and the miner for minimal forbidden trees;
//! - [`reducer`]: ADE recognition and reduction;
//! - [`topology`]: positive braids, Seifert forms, checkerboard plane graphs;
//! - [`oracle`]: brute-force enumerators and independent checks.

pub mod canon;
pub mod certificates;
pub mod enumerate;
pub mod graph;
pub mod linalg;
pub mod moves;
pub mod oracle;
pub mod par;
pub mod reducer;
pub mod switching;
pub mod topology;

pub use graph::{ParseError, Sign, SignedGraph, VertexId};
pub use linalg::{definiteness, gram_matrix, inertia, DefinitenessReport, GramMatrix, Inertia, IntMatrix, Verdict};
pub use moves::{
    apply_transcript, certificate, t_move, t_prime_move, verify_certificate, CongruenceCertificate, MoveRecord,
    ReductionTranscript,
};
pub use par::Exec;
pub use reducer::{classify, recognize_ade, reduce_to_ade, AdeFamily, AdeType, ReduceMode, ReductionResult};
