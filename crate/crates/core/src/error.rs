use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("radius {0} exceeds the injectivity radius 1/2")]
    OutOfInjectivityRadius(f64),
    #[error("empty sampling request")]
    EmptyRequest,
    #[error("point ({0}, {1}) is not strictly inside the unit disk")]
    OutsideDisk(f64, f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("jacobian determinant {0} is not positive")]
    Orientation(f64),
    #[error("jacobian is singular")]
    Degenerate,
    #[error("beltrami coefficient modulus {0} left the diffeomorphism regime")]
    LeftDiffeoRegime(f64),
    #[error("degenerate fit: {0}")]
    DegenerateFit(String),
    #[error("family has {have} domains, need at least {need}")]
    InsufficientFamily { have: usize, need: usize },
    #[error("incomplete permutation: {0}")]
    IncompletePermutation(String),
    #[error("probe lies inside domain {0}")]
    NotInS(i64),
    #[error("broken chain: {0}")]
    BrokenChain(String),
    #[error("no sample landed outside the domains after {0} draws")]
    SamplingFailed(usize),
    #[error("family construction failed: {0}")]
    ConstructionFailed(String),
    #[error("rotation vector is rationally dependent: {0}")]
    RationallyDependent(String),
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
