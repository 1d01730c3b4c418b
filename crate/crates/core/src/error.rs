//! Error type shared by every module of the crate.

/// Errors reported by graph, potential, and measure operations.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A vertex identifier was empty or contained whitespace.
    #[error("invalid vertex identifier {0:?}: must be nonempty and whitespace-free")]
    InvalidVertexId(String),
    /// The same vertex identifier appeared twice in a vertex list.
    #[error("duplicate vertex identifier {0:?}")]
    DuplicateVertex(String),
    /// An edge or word referred to a vertex that is not in the graph.
    #[error("unknown vertex {0:?}")]
    UnknownVertex(String),
    /// Pruning vertices of in- or out-degree zero emptied the graph.
    #[error("graph is empty after pruning vertices of in/out-degree zero")]
    EmptyGraph,
    /// An operation that needs a strongly connected graph got one that is not.
    #[error("graph is not topologically transitive (not strongly connected)")]
    NotTransitive,
    /// A cyclic-class index was outside 0..p.
    #[error("class index {index} out of range for period {period}")]
    ClassIndex {
        /// Requested index.
        index: usize,
        /// Period of the graph.
        period: usize,
    },
    /// A word contained a forbidden transition.
    #[error("word {0:?} is not admissible: missing edge {1:?} -> {2:?}")]
    InadmissibleWord(String, String, String),
    /// A word and an operation disagreed about sidedness or anchoring.
    #[error("{0}")]
    SidednessMismatch(String),
    /// Two objects built over different graphs were combined.
    #[error("objects were built over different graphs")]
    GraphMismatch,
    /// A potential table was missing an admissible window word.
    #[error("potential table has no entry for admissible window word {0:?}")]
    MissingTableEntry(String),
    /// A potential table key was not admissible, or a value was not finite.
    #[error("{0}")]
    InvalidPotential(String),
    /// A word was too short for the requested evaluation.
    #[error("word covers coordinates {have_from}..={have_to} but coordinates {need_from}..={need_to} are required (length >= {required_len})")]
    WordTooShort {
        /// First coordinate the word determines.
        have_from: i64,
        /// Last coordinate the word determines.
        have_to: i64,
        /// First coordinate the evaluation reads.
        need_from: i64,
        /// Last coordinate the evaluation reads.
        need_to: i64,
        /// Word length that would make the evaluation defined.
        required_len: usize,
    },
    /// An iterative solver ran out of its iteration budget.
    #[error("solver did not reach residual {tolerance:e} within {max_iterations} iterations (last residual {last_residual:e})")]
    NoConvergence {
        /// Residual target.
        tolerance: f64,
        /// Iteration cap.
        max_iterations: usize,
        /// Residual when the cap was hit.
        last_residual: f64,
    },
    /// The correlation-threshold search found no admissible k (non-mixing input).
    #[error("no k <= {cap} satisfies the e^(+/-delta) condition for every cylinder pair; the chain does not appear to be mixing")]
    NotMixing {
        /// Largest k that was probed.
        cap: usize,
    },
    /// A scalar parameter was outside its admissible range.
    #[error("{0}")]
    InvalidParameter(String),
    /// Inputs that must be nested (successive truncations) were not.
    #[error("{0}")]
    NotNested(String),
    /// A measure was not supported on the graph of the potential it was paired with.
    #[error("{0}")]
    SupportMismatch(String),
    /// Malformed input file.
    #[error("{0}")]
    Format(String),
    /// Underlying I/O failure.
    #[error(transparent)]
    Io(#[from] std::io::Error),
    /// Underlying JSON failure.
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Convenience alias used across the crate.
pub type Result<T> = std::result::Result<T, Error>;
