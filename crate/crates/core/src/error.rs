use thiserror::Error;

/// Errors raised by the exact engine, the closed-form evaluators and the
/// numeric oracle.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CtError {
    #[error("Gamma has a pole at {0}")]
    Pole(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("result carries a net factor sqrt(pi)^{0}, not rational")]
    NonRational(i64),
    #[error("denominator factor `{factor}` has degree {degree} in x{var}; only affine factors are supported")]
    NonAffine { factor: String, var: usize, degree: u32 },
    #[error("denominator factor `{factor}` vanishes identically at x{var} = 0")]
    ZeroConstant { factor: String, var: usize },
    #[error("constant term still depends on x{0} after all extractions")]
    ResidualVariable(usize),
    #[error("invalid extraction order: {0}")]
    Order(String),
    #[error("quadrature configuration: {0}")]
    Config(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, CtError>;
