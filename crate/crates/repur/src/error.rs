use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("grid is invalid: {0}")]
    InvalidGrid(String),

    #[error("density has (near-)zero mass and cannot be normalized")]
    ZeroMass,

    #[error("norm order must be positive, got {0}")]
    NonPositiveOrder(f64),

    #[error("transform grid requires a power-of-two sample count, got {0}")]
    PowerOfTwoRequired(usize),

    #[error("conjugate grid too coarse: {edge_mass:.3e} of the transformed mass sits in the outer bins")]
    GridTooCoarse { edge_mass: f64 },

    #[error("index out of range: {0}")]
    OutOfRange(String),

    #[error("entropy-power tower holds {got} entries but {needed} are required")]
    InsufficientTower { needed: usize, got: usize },

    #[error("entropy power N_{{1+{k}Δ}} = {value} is not finite and positive")]
    NonFinitePower { k: usize, value: f64 },

    #[error("reconstruction order {0} unsupported (must be 2, 3 or 4)")]
    OrderUnsupported(usize),

    #[error("degenerate tail fit: slope {slope:.4} outside the admissible range")]
    DegenerateFit { slope: f64 },

    #[error("tail fit failed to converge after {0} iterations")]
    NoConvergence(usize),

    #[error("insufficient tail data: {0}")]
    InsufficientTail(String),

    #[error("tail splice failed: {0}")]
    SpliceFailure(String),

    #[error("malformed CSV input: {0}")]
    CsvFormat(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
