use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("argument {theta} outside the domain of psi (floor {floor})")]
    DomainError { theta: f64, floor: f64 },
    #[error("roots of psi(s) = {q} are not simple (separation {separation:.3e})")]
    DegenerateRoots { q: f64, separation: f64 },
    #[error("psi(s) = {q} has no real root above the domain floor")]
    PhiUndefined { q: f64 },
    #[error("psi'(Phi({q})) vanishes: tangent root")]
    TangentRoot { q: f64 },
    #[error("exponent {exponent:.1} exceeds the overflow guard")]
    OverflowRisk { exponent: f64 },
    #[error("complex residue {imag:.3e} in a real-valued evaluation")]
    ComplexResidue { imag: f64 },
    #[error("root polishing failed at q = {q}")]
    RootPolish { q: f64 },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("theta coincides with Phi(r)")]
    DegenerateTheta,
    #[error("no root: {0}")]
    NoRoot(String),
    #[error("scan exhausted: {0}")]
    ScanExhausted(String),
    #[error("barriers do not satisfy the first-order conditions (max residual {0:.3e})")]
    StaleBarriers(f64),
    #[error("r - Psi(1) = {r_tilde} >= 0: the call stopping region is a half-line")]
    BarrierRegime { r_tilde: f64 },
    #[error("assumption failed: {0}")]
    Assumption(String),
    #[error("config: {0}")]
    Config(String),
    #[error("io: {0}")]
    Io(String),
}

impl Error {
    /// Stable machine-readable tag used in CLI error payloads and FFI codes.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidModel(_) => "InvalidModel",
            Error::DomainError { .. } => "DomainError",
            Error::DegenerateRoots { .. } => "DegenerateRoots",
            Error::PhiUndefined { .. } => "PhiUndefined",
            Error::TangentRoot { .. } => "TangentRoot",
            Error::OverflowRisk { .. } => "OverflowRisk",
            Error::ComplexResidue { .. } => "ComplexResidue",
            Error::RootPolish { .. } => "RootPolish",
            Error::Precondition(_) => "PreconditionError",
            Error::DegenerateTheta => "DegenerateTheta",
            Error::NoRoot(_) => "NoRoot",
            Error::ScanExhausted(_) => "ScanExhausted",
            Error::StaleBarriers(_) => "StaleBarriers",
            Error::BarrierRegime { .. } => "BarrierRegime",
            Error::Assumption(_) => "AssumptionFailed",
            Error::Config(_) => "ConfigError",
            Error::Io(_) => "IoError",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
