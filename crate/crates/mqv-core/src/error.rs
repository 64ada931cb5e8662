use thiserror::Error;

/// Errors shared by all modules of the crate.
#[derive(Debug, Clone, Error)]
pub enum CoreError {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("mixed exact/float modes: {0}")]
    ModeMismatch(String),

    #[error("operation requires exact mode: {0}")]
    ExactModeRequired(String),

    #[error("operation requires float mode: {0}")]
    FloatModeRequired(String),

    #[error("division by zero")]
    DivisionByZero,

    #[error("singular factor at arrow `{arrow}`: det(1 + x_h x_hbar) = 0")]
    SingularFactor { arrow: String },

    #[error("singular loop map at arrow `{arrow}`")]
    SingularLoop { arrow: String },

    #[error("vertex `{vertex}` carries a loop; operation only applies at loop-free vertices")]
    LoopAtVertex { vertex: String },

    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),

    #[error("unknown arrow `{0}`")]
    UnknownArrow(String),

    #[error("contract violation: {0}")]
    ContractViolation(String),

    #[error("reflected dimension vector has a negative entry at `{vertex}`; the moduli space is empty")]
    EmptyDimension { vertex: String },

    #[error("tau is not surjective at vertex `{vertex}` (required when q_i = 1; holds at stable points with theta_i <= 0)")]
    TauNotSurjective { vertex: String },

    #[error("sigma is not injective at vertex `{vertex}`; contradicts stability of the input")]
    StabilityViolation { vertex: String },

    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, CoreError>;
