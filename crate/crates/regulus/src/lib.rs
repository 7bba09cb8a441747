//! Extraction of regular subgraphs from graphs and uniform multi-hypergraphs.
//!
//! The crate is organized around three extraction strategies plus the shared
//! machinery they rely on:
//!
//! * degree-window regularization of graphs whose degrees already sit inside
//!   a bounded ratio ([`nearreg`]),
//! * matching-chain decompositions that trade average degree for
//!   almost-regularity ([`almostreg`]),
//! * sunflower-based extraction of regular sub-hypergraphs ([`hyper`]),
//!
//! with [`pipeline`] dispatching between them on dense-degree-class splits,
//! [`oracle`] providing exact reference searches that certify every
//! randomized result, and [`construct`] generating the extremal instances
//! used to probe the limits of extraction.
//!
//! All randomness flows through caller-supplied seeded generators; a run is
//! reproducible from `(input, config, seed)`.

pub mod almostreg;
pub mod config;
pub mod construct;
pub mod graph;
pub mod hyper;
pub mod matching;
pub mod nearreg;
pub mod oracle;
pub mod pipeline;

mod error;

pub use config::{ConstantsConfig, SearchBudget};
pub use error::{Error, Result};
pub use graph::{BipartiteGraph, DegreeSummary, Graph, SubgraphWitness};
