use thiserror::Error;

/// Failures raised by the numerical routes.
///
/// Every variant names the module it originated in so front ends can report
/// where a computation broke down.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("{module}: domain error: {msg}")]
    Domain { module: &'static str, msg: String },

    #[error("{module}: precondition violated: {msg}")]
    Precondition { module: &'static str, msg: String },

    #[error("{module}: index {index} exceeds truncation order {order}")]
    Range {
        module: &'static str,
        index: usize,
        order: usize,
    },

    #[error("{module}: value left the representable range at N = {n}")]
    Overflow { module: &'static str, n: usize },

    #[error(
        "asymptotics: quadrature failure, imaginary residue {residue:e} exceeds {bound:e} relative"
    )]
    Quadrature { residue: f64, bound: f64 },

    #[error("{module}: numerical degeneracy: {msg}")]
    Degenerate { module: &'static str, msg: String },

    #[error(
        "montecarlo: determinant product has imaginary residue {imag:e} against real part {real:e}"
    )]
    ImaginaryResidue { real: f64, imag: f64 },
}

impl Error {
    pub fn module(&self) -> &'static str {
        match self {
            Error::Domain { module, .. }
            | Error::Precondition { module, .. }
            | Error::Range { module, .. }
            | Error::Overflow { module, .. }
            | Error::Degenerate { module, .. } => module,
            Error::Quadrature { .. } => "asymptotics",
            Error::ImaginaryResidue { .. } => "montecarlo",
        }
    }

    /// True for failures of the arithmetic itself, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Overflow { .. }
                | Error::Quadrature { .. }
                | Error::Degenerate { .. }
                | Error::ImaginaryResidue { .. }
        )
    }

    pub(crate) fn domain(module: &'static str, msg: impl Into<String>) -> Self {
        Error::Domain {
            module,
            msg: msg.into(),
        }
    }

    pub(crate) fn precondition(module: &'static str, msg: impl Into<String>) -> Self {
        Error::Precondition {
            module,
            msg: msg.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
