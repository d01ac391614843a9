use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("expected a square matrix, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("a co-isometry needs at least as many columns as rows, got {rows}x{cols}")]
    TooFewColumns { rows: usize, cols: usize },

    #[error("trace {trace:e} is not zero within tolerance")]
    NonzeroTrace { trace: f64 },

    #[error("states {i} and {j} are not orthogonal: |Tr(M_j* M_i)| = {overlap:e}")]
    NotOrthogonal { i: usize, j: usize, overlap: f64 },

    #[error("impossible by trace test: states {i} and {j} overlap (|Tr(M_j* M_i)| = {overlap:e})")]
    ImpossibleByTraceTest { i: usize, j: usize, overlap: f64 },

    #[error("matrix {0} is not a permutation matrix")]
    NotPermutation(usize),

    #[error("matrix is not unitary (defect {0:e})")]
    NotUnitary(f64),

    #[error("measurement is not complete (defect {0:e})")]
    Incomplete(f64),

    #[error("certificate rejected: diagonal residual {residual:e}, co-isometry defect {defect:e}")]
    CertificateRejected { residual: f64, defect: f64 },

    #[error("the state set is empty")]
    EmptySet,

    #[error("matrix is zero")]
    ZeroMatrix,

    #[error("invalid protocol: {0}")]
    InvalidProtocol(String),

    #[error("invalid encoding: {0}")]
    Encoding(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit status: 1 for a negative answer about valid input,
    /// 2 for input that could not be used.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::ImpossibleByTraceTest { .. } | Error::CertificateRejected { .. } | Error::NotOrthogonal { .. } => 1,
            _ => 2,
        }
    }
}
