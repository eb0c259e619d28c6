use thiserror::Error;

/// Every failure the library can report. Variant names mirror the error
/// kinds exposed on the command line.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("characteristic {0} is not prime")]
    NotPrime(u32),
    #[error("modulus is reducible over GF({0})")]
    ReducibleModulus(u32),
    #[error("bad modulus: {0}")]
    BadModulus(String),
    #[error("field of size {p}^{t} exceeds the supported 2^20 elements")]
    FieldTooLarge { p: u32, t: u32 },
    #[error("no tabulated modulus for GF({p}^{t})")]
    NoTabulatedModulus { p: u32, t: u32 },
    #[error("division by zero")]
    DivideByZero,
    #[error("operands live on different tower levels ({0} vs {1})")]
    LevelMismatch(usize, usize),
    #[error("no tower level {0}")]
    NoSuchLevel(usize),
    #[error("subfield degree {delta} does not divide {t}")]
    BadSubfield { delta: u32, t: u32 },
    #[error("elements do not form a basis: {0}")]
    NotABasis(String),

    #[error("division by the zero polynomial")]
    DivideByZeroPoly,
    #[error("duplicate interpolation point {0}")]
    DuplicatePoint(u32),
    #[error("singular system: {0}")]
    Singular(String),

    #[error("{survivors} surviving symbols cannot determine a dimension-{k} codeword")]
    TooManyErasures { survivors: usize, k: usize },
    #[error("surviving symbols are not consistent with any codeword")]
    Inconsistent,
    #[error("bad code parameters: {0}")]
    BadParams(String),

    #[error("subgroup order {m} does not divide {order}")]
    OrderNotDividing { m: u64, order: u64 },
    #[error("kernel has {found} roots, expected {expected}")]
    WrongKernelSize { found: usize, expected: usize },
    #[error("two classes share the constant {0}")]
    DuplicateConstants(u32),
    #[error("inner coefficients do not sum to zero")]
    CoeffSumNonzero,
    #[error("kernel is not closed under multiplication by GF(q^{0})")]
    ClosureFailure(u32),
    #[error("polynomial is not good on the point set: {0}")]
    NotGoodOnSet(String),
    #[error("requested {requested} classes but only {available} complete classes exist")]
    InsufficientClasses { requested: usize, available: usize },

    #[error("invalid failure pattern: {0}")]
    InvalidFailure(String),
    #[error("{m} failed racks exceed the tolerable {max}")]
    TooManyFailedRacks { m: usize, max: usize },
    #[error("insufficient helpers: {0}")]
    InsufficientHelpers(String),
    #[error("repair precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("repair basis does not span the field")]
    BasisDegenerate,

    #[error("config line {line}: {msg}")]
    Config { line: usize, msg: String },
}

impl Error {
    /// Stable upper-case name of the error kind.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NotPrime(_) => "NOT_PRIME",
            Error::ReducibleModulus(_) => "REDUCIBLE_MODULUS",
            Error::BadModulus(_) => "BAD_MODULUS",
            Error::FieldTooLarge { .. } => "FIELD_TOO_LARGE",
            Error::NoTabulatedModulus { .. } => "NO_TABULATED_MODULUS",
            Error::DivideByZero => "DIVIDE_BY_ZERO",
            Error::LevelMismatch(..) => "LEVEL_MISMATCH",
            Error::NoSuchLevel(_) => "NO_SUCH_LEVEL",
            Error::BadSubfield { .. } => "BAD_SUBFIELD",
            Error::NotABasis(_) => "NOT_A_BASIS",
            Error::DivideByZeroPoly => "DIVIDE_BY_ZERO_POLY",
            Error::DuplicatePoint(_) => "DUPLICATE_POINT",
            Error::Singular(_) => "SINGULAR",
            Error::TooManyErasures { .. } => "TOO_MANY_ERASURES",
            Error::Inconsistent => "INCONSISTENT",
            Error::BadParams(_) => "BAD_PARAMS",
            Error::OrderNotDividing { .. } => "ORDER_NOT_DIVIDING",
            Error::WrongKernelSize { .. } => "WRONG_KERNEL_SIZE",
            Error::DuplicateConstants(_) => "DUPLICATE_CONSTANTS",
            Error::CoeffSumNonzero => "COEFF_SUM_NONZERO",
            Error::ClosureFailure(_) => "CLOSURE_FAILURE",
            Error::NotGoodOnSet(_) => "NOT_GOOD_ON_SET",
            Error::InsufficientClasses { .. } => "INSUFFICIENT_CLASSES",
            Error::InvalidFailure(_) => "INVALID_FAILURE",
            Error::TooManyFailedRacks { .. } => "TOO_MANY_FAILED_RACKS",
            Error::InsufficientHelpers(_) => "INSUFFICIENT_HELPERS",
            Error::PreconditionFailed(_) => "PRECONDITION_FAILED",
            Error::BasisDegenerate => "BASIS_DEGENERATE",
            Error::Config { .. } => "CONFIG",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
