use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("pole at |z| = {modulus} lies on the wrong side of the unit circle for a {direction} expansion")]
    PoleOnWrongSide { modulus: f64, direction: &'static str },

    #[error("rational function grows at infinity; no expansion in negative powers exists")]
    NotProperAtInfinity,

    #[error("root finder did not converge: {0}")]
    ConvergenceFailure(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("maturity index {index} has zero return variance")]
    DegenerateMaturity { index: usize },

    #[error("singular linear system: {0}")]
    SingularSystem(String),

    #[error("fitted denominator root at |z| = {modulus} lies inside the unit-circle guard band")]
    UnstableFit { modulus: f64 },

    #[error("correlation function has a pole at |z| = {modulus}, on the unit circle")]
    PoleOnCircle { modulus: f64 },

    #[error("correlation function has a pole at |z| = {modulus}, inside the unit disk")]
    PoleInsideDisk { modulus: f64 },

    #[error("C(0) = {value}, expected 1")]
    NotNormalized { value: f64 },

    #[error("symbol has a zero or pole at |z| = {modulus}, on the unit circle")]
    RootOnCircle { modulus: f64 },

    #[error("symbol is not positive on the unit circle (min = {min})")]
    NonPositiveSymbol { min: f64 },

    #[error("symbol was built from coefficients only; a rational form is required")]
    NotRational,

    #[error("factorization product identity violated: max error {max_error:e}")]
    ProductIdentityViolated { max_error: f64 },

    #[error("truncation {requested} exceeds the {available} coefficients available")]
    TruncationTooShort { requested: usize, available: usize },

    #[error("singular Toeplitz matrix: {0}")]
    SingularMatrix(String),

    #[error("variance must be positive (index {index}, value {value})")]
    NonPositiveVariance { index: usize, value: f64 },

    #[error("net position sums to zero; cannot rescale to one")]
    ZeroNetPosition,

    #[error("line {line}: {message}")]
    ParseError { line: usize, message: String },

    #[error("tenors are not strictly increasing for date {date}")]
    NonMonotoneTenors { date: String },

    #[error("date {date} appears more than once")]
    DuplicateDate { date: String },

    #[error("input contains no curves")]
    EmptyInput,

    #[error("grid point {months} months is outside the quoted tenor range [{min}, {max}] years")]
    GridOutOfRange { months: f64, min: f64, max: f64 },

    #[error("need at least {needed} dates, got {got}")]
    InsufficientDates { needed: usize, got: usize },

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
