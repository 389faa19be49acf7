use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("duplicate element `{0}`")]
    DuplicateElement(String),
    #[error("malformed operation table: {0}")]
    MalformedTable(String),
    #[error("bad parameter: {0}")]
    BadParameter(String),
    #[error("carrier of size {size} exceeds the configured cap of {cap}")]
    CarrierTooLarge { size: usize, cap: usize },
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("duplicate variable `{0}`")]
    DuplicateVariable(String),
    #[error("magma has no identity element")]
    NoIdentity,
    #[error("configurations disagree on shared variable `{0}`")]
    OverlapMismatch(String),
    #[error("enumeration of {requested} configurations exceeds the cap of {cap}")]
    EnumerationCapExceeded { requested: u128, cap: u64 },
    #[error("unbound variable `{0}` in transition rule")]
    UnboundVariable(String),
    #[error("arity mismatch: {0}")]
    ArityMismatch(String),
    #[error("domain is not closed under the transition: {from} maps to {to}")]
    DomainNotClosed { from: String, to: String },
    #[error("configuration {0} lies outside the system's domain")]
    OutOfDomain(String),
    #[error("variable sets differ: {0}")]
    VarSetMismatch(String),
    #[error("systems are defined over different magmas")]
    MagmaMismatch,
    #[error("star set is not closed under the coupled transition: {from} maps to {to}")]
    ClosureViolation { from: String, to: String },
    #[error("bad gluing map: {0}")]
    BadGluing(String),
    #[error("factor search needs {candidates} candidates, over the cap of {cap}")]
    SearchInfeasible { candidates: u128, cap: u64 },
    #[error("classical model too large to encode: {0}")]
    EncodingTooLarge(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("unknown strategy `{0}`")]
    UnknownStrategy(String),
}
