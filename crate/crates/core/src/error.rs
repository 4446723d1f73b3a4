use thiserror::Error;

/// Errors raised anywhere in the contact pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid knot vector: {0}")]
    InvalidKnots(String),
    #[error("parameter {value} outside the domain [{lo}, {hi}]")]
    OutOfDomain { value: f64, lo: f64, hi: f64 },
    #[error("knot multiplicity overflow at {value}: {multiplicity} > {max}")]
    MultiplicityOverflow { value: f64, multiplicity: usize, max: usize },
    #[error("degree {0} too small for this operation (need at least 2)")]
    DegreeTooSmall(usize),
    #[error("non-positive weight function {0} (invalid weights)")]
    NonPositiveWeight(f64),
    #[error("non-positive Jacobian determinant {det} at parameter {point:?}")]
    SingularJacobian { det: f64, point: Vec<f64> },
    #[error("invalid face id: {0}")]
    InvalidFace(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("contradictory constraints on dof {dof}: {first} vs {second}")]
    ContradictoryConstraint { dof: usize, first: f64, second: f64 },
    #[error("element inversion: deformation gradient determinant {0} <= 0")]
    ElementInversion(f64),
    #[error("degenerate multiplier basis function {0}: zero measure")]
    DegenerateMultiplier(usize),
    #[error("singular matrix: zero pivot at column {0}")]
    SingularMatrix(usize),
    #[error("stiffness singular on free dofs: constraint deficiency")]
    ConstraintDeficiency,
    #[error("active constraint rows are rank deficient: {0:?}")]
    RankDeficientActiveSet(Vec<usize>),
    #[error("active-set iteration cap {0} reached without convergence")]
    ActiveSetNotConverged(usize),
    #[error("Newton iteration failed to converge in load step {step} (residual {residual:e})")]
    NewtonDiverged { step: usize, residual: f64 },
    #[error("step halving exhausted in load step {0}")]
    StepHalvingExhausted(usize),
    #[error("geometry mismatch: {0}")]
    GeometryMismatch(String),
    #[error("eigensolve failed: {0}")]
    Eigensolve(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
