//! Incremental influence maximization over growing social networks.
//!
//! The engine keeps two collections of reverse-reachable (RR) sets up to
//! date as nodes and edges arrive, and solves MAX-k coverage over one of
//! them with a family of threshold-greedy threads. See the crate README for
//! an overview of the modules.

pub mod coverage;
pub mod diffusion;
pub mod engine;
pub mod error;
pub mod graph;
pub mod hardness;
pub mod harness;
pub mod oracle;
pub mod random;
pub mod rr;
pub mod stream;

pub use engine::{Engine, EngineConfig, QueryAnswer};
pub use error::{EngineError, GraphError, ParseError, RunError, SampleError};
pub use harness::{run, Maintainer, RunOptions, RunReport};
pub use graph::{EdgeParam, InfluenceGraph, Model, NodeId};
pub use random::RandomSource;
pub use rr::{augment_rr, sample_rr, RRSet};
pub use stream::{parse_stream, render_stream, UpdateEvent};
