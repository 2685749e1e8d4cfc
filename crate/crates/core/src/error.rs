use thiserror::Error;

use crate::graph::NodeId;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GraphError {
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
    #[error("edge ({0}, {1}) already present")]
    DuplicateEdge(NodeId, NodeId),
    #[error("self-loop on node {0}")]
    SelfLoop(NodeId),
    #[error("incoming LT weight at node {node} would reach {sum}, above 1")]
    LtWeightOverflow { node: NodeId, sum: f64 },
    #[error("edge ({0}, {1}) not present")]
    UnknownEdge(NodeId, NodeId),
    #[error("edge parameter {0} outside (0, 1]")]
    BadParam(f64),
    #[error("unknown diffusion model `{0}`")]
    UnknownModel(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SampleError {
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
    #[error("RR set rooted at {root} is stale: edge ({u}, {v}) {reason}")]
    StaleSet {
        root: NodeId,
        u: NodeId,
        v: NodeId,
        reason: &'static str,
    },
    #[error("RR set was sampled under a different diffusion model")]
    ModelMismatch,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CoverageError {
    #[error("epsilon {0} outside the admissible range")]
    BadEpsilon(f64),
    #[error("seed budget k must be at least 1")]
    BadBudget,
    #[error("node {0} already present")]
    DuplicateNode(u32),
    #[error("unknown node {0}")]
    UnknownNode(u32),
    #[error("coverage edge ({0}, {1}) already present")]
    DuplicateEdge(u32, u32),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EngineError {
    #[error("bad configuration: {0}")]
    BadConfig(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Sample(#[from] SampleError),
    #[error(transparent)]
    Coverage(#[from] CoverageError),
    #[error("graph has no nodes")]
    EmptyGraph,
    #[error("edge deletion is not supported by the incremental engine")]
    DeletionUnsupported,
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("unknown mode `{0}`")]
    UnknownMode(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("graph has no nodes")]
    EmptyGraph,
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
    #[error("{0} candidate subsets exceed the brute-force limit")]
    TooLarge(u128),
    #[error("trial count must be at least 1")]
    NoTrials,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HardnessError {
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("epoch {0} out of range")]
    BadEpoch(usize),
    #[error("seed {0} out of range")]
    BadSeed(usize),
}

impl From<SampleError> for OracleError {
    fn from(e: SampleError) -> Self {
        match e {
            SampleError::UnknownNode(v) => OracleError::UnknownNode(v),
            // Fresh samples never carry a memo.
            other => unreachable!("fresh sample failed: {other}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {reason}")]
pub struct ParseError {
    pub line: usize,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("event {event}: {source}")]
pub struct RunError {
    /// 1-based position of the failing event in the stream.
    pub event: usize,
    pub source: EngineError,
}
