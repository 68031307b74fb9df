use num_complex::Complex64;
use thiserror::Error;

/// Failures raised by the numerical routines of this crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid expanding map: {0}")]
    InvalidMap(String),
    #[error("letter {letter} is out of range for a degree {degree} map")]
    InvalidLetter { letter: u32, degree: u32 },
    #[error("inverse branch {branch} failed to converge at x = {x} after {iterations} iterations")]
    BranchNonConvergence { branch: u32, x: f64, iterations: usize },
    #[error("quadrature under-resolved: tail estimate {tail:e} exceeds {tolerance:e} with {nodes} nodes")]
    UnderResolved { tail: f64, tolerance: f64, nodes: usize },
    #[error("sphere quadrature too coarse: completeness residual {residual:e}")]
    InsufficientQuadrature { residual: f64 },
    #[error("eigensolver failed on a {dim}x{dim} matrix")]
    EigenNonConvergence { dim: usize },
    #[error("singular value decomposition failed on a {rows}x{cols} matrix")]
    SvdNonConvergence { rows: usize, cols: usize },
    #[error("trivial block lost its unit eigenvalue (nearest {nearest}, distance {distance:e})")]
    MissingUnitEigenvalue { nearest: Complex64, distance: f64 },
    #[error("leading eigenvalue {value} is not simple or not isolated (gap {gap:e})")]
    DegenerateLeading { value: Complex64, gap: f64 },
    #[error("invariant density is not positive (minimum {min:e}, imaginary part {imag:e})")]
    NonPositiveDensity { min: f64, imag: f64 },
    #[error("threshold {threshold} is not above the trusted floor {floor}")]
    BelowFloor { threshold: f64, floor: f64 },
    #[error("length mismatch: {left} versus {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("kappa {kappa} must lie strictly between 1 and e_min = {e_min}")]
    KappaOutOfRange { kappa: f64, e_min: f64 },
    #[error("cloud accuracy {accuracy:e} exceeds half the box size {delta:e}")]
    UnderResolvedCloud { accuracy: f64, delta: f64 },
    #[error("box size {delta:e} is smaller than twice the cell side {cell:e}")]
    CellTooCoarse { delta: f64, cell: f64 },
    #[error("enumeration needs {required} points, budget is {budget}")]
    BudgetExceeded { required: u128, budget: u128 },
    #[error("dimension fit needs at least 5 box sizes spanning 1.5 decades, got {count} spanning {decades:.2}")]
    InsufficientRange { count: usize, decades: f64 },
    #[error("volumes must be positive and non-decreasing in the box size")]
    NonMonotoneVolumes,
    #[error("cocycle group does not match the requested operation: {0}")]
    GroupMismatch(String),
    #[error("matrix cache: {0}")]
    CacheFormat(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
