use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("order relation has a cycle between `{0}` and `{1}`")]
    CycleDetected(String, String),
    #[error("declared bottom `{bottom}` is not below `{element}`")]
    BottomNotLeast { bottom: String, element: String },
    #[error("duplicate element `{0}`")]
    DuplicateElement(String),
    #[error("unknown element `{0}`")]
    UnknownElement(String),
    #[error("poset is not pointed: {0}")]
    NotPointed(String),
    #[error("domain mismatch: {0}")]
    DomainMismatch(String),
    #[error("map is not monotone: {0}")]
    NotMonotone(String),
    #[error("map is not strict: {0}")]
    NotStrict(String),
    #[error("not an embedding-projection pair: {0}")]
    NotAnEpPair(String),
    #[error("size {size} exceeds cap {cap}")]
    SizeCapExceeded { size: usize, cap: usize },
    #[error("construction exceeds element cap {0}")]
    ElementCapExceeded(usize),
    #[error("syntax error at {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("variance error: {0}")]
    Variance(String),
    #[error("unknown constant `{0}`")]
    UnknownConstant(String),
    #[error("backend mismatch: {0}")]
    BackendMismatch(String),
    #[error("not covariant: {0}")]
    NotCovariant(String),
    #[error("terminal sequence did not stabilize")]
    NotStabilized,
    #[error("depth mismatch: source row ends at column {source_depth}, target row at {target_depth}")]
    DepthMismatch { source_depth: usize, target_depth: usize },
    #[error("value sets differ")]
    ValueSetMismatch,
    #[error("not an equivalence: {0}")]
    NotEquivalence(String),
    #[error("pair ({left}, {right}) violates clause {clause}")]
    NotABisimulation { left: String, right: String, clause: String },
    #[error("coalgebras live over different functor instances")]
    InstanceMismatch,
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("io: {0}")]
    Io(String),
    #[error("json: {0}")]
    Json(String),
}

impl Error {
    /// Stable machine-readable name, used in CLI error reports.
    pub fn code(&self) -> &'static str {
        match self {
            Error::CycleDetected(..) => "CycleDetected",
            Error::BottomNotLeast { .. } => "BottomNotLeast",
            Error::DuplicateElement(_) => "DuplicateElement",
            Error::UnknownElement(_) => "UnknownElement",
            Error::NotPointed(_) => "NotPointed",
            Error::DomainMismatch(_) => "DomainMismatch",
            Error::NotMonotone(_) => "NotMonotone",
            Error::NotStrict(_) => "NotStrict",
            Error::NotAnEpPair(_) => "NotAnEpPair",
            Error::SizeCapExceeded { .. } => "SizeCapExceeded",
            Error::ElementCapExceeded(_) => "ElementCapExceeded",
            Error::Syntax { .. } => "SyntaxError",
            Error::Variance(_) => "VarianceError",
            Error::UnknownConstant(_) => "UnknownConstant",
            Error::BackendMismatch(_) => "BackendMismatch",
            Error::NotCovariant(_) => "NotCovariant",
            Error::NotStabilized => "NotStabilized",
            Error::DepthMismatch { .. } => "DepthMismatch",
            Error::ValueSetMismatch => "ValueSetMismatch",
            Error::NotEquivalence(_) => "NotEquivalence",
            Error::NotABisimulation { .. } => "NotABisimulation",
            Error::InstanceMismatch => "InstanceMismatch",
            Error::Invalid(_) => "InvalidInput",
            Error::Io(_) => "IoError",
            Error::Json(_) => "JsonError",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}
