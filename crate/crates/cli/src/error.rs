use thiserror::Error;

pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_BOUND_UNDEFINED: i32 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0} [ConfigError]")]
    Config(String),

    #[error("{0} [{}]", .0.name())]
    Core(#[from] leaky_core::Error),

    #[error("i/o error: {0} [IoError]")]
    Io(#[from] std::io::Error),

    /// The chord-arc constant vanished; the direct bound is undefined.
    #[error("bound undefined: {0} [BoundUndefined]")]
    ZeroConstant(String),

    #[error("self-test failed: {0} [SelfTestFailed]")]
    SelfTest(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use leaky_core::Error as E;
        match self {
            CliError::Config(_) | CliError::Io(_) => EXIT_CONFIG,
            CliError::Core(E::Domain(_) | E::DegenerateCurve(_) | E::InvalidGraph(_)) => EXIT_CONFIG,
            CliError::Core(E::Assembly(_) | E::Convergence { .. } | E::ExtensionFailure { .. }) => EXIT_NUMERICAL,
            CliError::Core(E::BoundUndefined(_) | E::GraphBoundUnavailable { .. }) => EXIT_BOUND_UNDEFINED,
            CliError::ZeroConstant(_) => EXIT_BOUND_UNDEFINED,
            CliError::SelfTest(_) => EXIT_NUMERICAL,
        }
    }
}
