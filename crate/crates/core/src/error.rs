use thiserror::Error;

/// Crate-wide error type.
///
/// Construction and analysis routines return `Result<T>`; the variants are
/// deliberately fine-grained so callers (in particular the CLI) can separate
/// bad input from violated internal invariants.
#[derive(Debug, Error)]
pub enum Error {
    #[error("division by zero")]
    ZeroDivide,

    #[error("operands belong to different fields")]
    FieldMismatch,

    #[error("polynomial is not irreducible: {0}")]
    NotIrreducible(String),

    #[error("enumeration guard exceeded: {0} elements")]
    SizeGuard(u128),

    #[error("no subfield relation between the given fields")]
    NoSubfield,

    #[error("series precision is insufficient to decide the result (prec {0})")]
    InsufficientPrecision(i64),

    #[error("result valuation cannot be certified at the working precision")]
    IndeterminatePrecision,

    #[error("residue does not lift: {0}")]
    NonSimpleRoot(String),

    #[error("no root in the residue field: {0}")]
    NoResidueRoot(String),

    #[error("curve is geometrically reducible: {0}")]
    GeometricallyReducible(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("function has a pole at the evaluation point {0}")]
    PoleAtPoint(String),

    #[error("function has a pole outside the divisor support: {0}")]
    PoleOutsideSupport(String),

    #[error("a basis function has a pole at a designated split point: {0}")]
    PoleAtSplitPoint(String),

    #[error("point-count cross-check failed: {0}")]
    CountMismatch(String),

    #[error("subspace meets the geometric kernel: {0}")]
    ConditionIViolated(String),

    #[error("Weil bound violated: genus {genus}, points {points}, q {q}")]
    WeilViolated { genus: i64, points: i64, q: u128 },

    #[error("zeta numerator fit is inconsistent: {0}")]
    FitInconsistent(String),

    #[error("search budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("oracle recount disagrees with the analytic count: {0}")]
    OracleMismatch(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
