use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("metric not positive definite")]
    NotPositiveDefinite,
    #[error("metric volume factor sqrt(det g) is not representable in this backend")]
    IrrationalVolume,
    #[error("cannot contract scalar")]
    ContractScalar,
    #[error("degree mismatch: expected {expected}, got {got}")]
    DegreeMismatch { expected: usize, got: usize },
    #[error("not a G2 three-form")]
    NotG2,
    #[error("projection inconsistent: {0}")]
    ProjectionInconsistent(&'static str),
    #[error("torsion cross-check failed")]
    TorsionCrossCheck,
    #[error("degenerate ansatz: parameters must be strictly positive")]
    DegenerateAnsatz,
    #[error("wrong number of ansatz parameters: expected {expected}, got {got}")]
    ParameterCount { expected: usize, got: usize },
    #[error("velocity leaves ansatz family")]
    LeavesAnsatz,
    #[error("frame algebra violates d^2 = 0 on e^{0}")]
    NotClosed(usize),
    #[error("parameter a must be positive")]
    NonPositiveScale,
    #[error("outside solution lifespan: t = {t} not in ({t_min}, {t_max})")]
    OutsideLifespan { t: f64, t_min: f64, t_max: f64 },
    #[error("insufficient resolution: {got} samples in the fitting decade, need {need}")]
    InsufficientResolution { got: usize, need: usize },
    #[error("invalid initial state")]
    InvalidInitialState,
    #[error("invalid integration settings: {0}")]
    InvalidSettings(&'static str),
    #[error("square root not representable in this backend")]
    NoExactRoot,
    #[error("empty grid")]
    EmptyGrid,
}

pub type Result<T> = std::result::Result<T, Error>;
