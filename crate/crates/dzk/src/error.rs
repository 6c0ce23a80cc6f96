use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("{0} is not a supported prime modulus (need 3 <= q < 2^61, q prime)")]
    BadModulus(u64),
    #[error("prime range start {0} out of bounds")]
    BadPrimeRange(u64),
    #[error("operands live in different fields (q={0} vs q={1})")]
    ModulusMismatch(u64, u64),
    #[error("inverse of zero")]
    InverseOfZero,
    #[error("interpolation nodes must be distinct")]
    RepeatedNode,
    #[error("arity mismatch: expected {expected}, got {got}")]
    Arity { expected: usize, got: usize },
    #[error("exponent {got} exceeds individual degree bound {bound}")]
    DegreeBound { bound: usize, got: usize },
    #[error("degree {degree} does not fit in {len} coefficients")]
    DegreeTooLarge { degree: usize, len: usize },
    #[error("{vars} variables is too many to enumerate (max {max})")]
    TooManyVars { vars: usize, max: usize },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NetError {
    #[error("graph is disconnected")]
    Disconnected,
    #[error("bad edge ({0}, {1})")]
    BadEdge(usize, usize),
    #[error("empty network")]
    Empty,
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum InstanceError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Net(#[from] NetError),
    #[error("individual degree {d} must be below the node count {n}")]
    DegreeNotBelowN { d: usize, n: usize },
    #[error("security parameter t={0} too small")]
    BadT(usize),
    #[error("zero-knowledge run needs at least 2 nodes")]
    TooFewNodes,
    #[error("field too small: q={q} must exceed {need}")]
    FieldTooSmall { q: u64, need: u64 },
    #[error("{0}")]
    Invalid(String),
}
