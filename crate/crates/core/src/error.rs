use num_complex::Complex64;

/// Library-wide result type.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Construction or argument validation failure.
    #[error("invalid {what}: {why}")]
    Invalid { what: &'static str, why: String },

    /// Evaluation requested too close to a lattice pole of the
    /// Weierstrass p-function; carries the nearest lattice point.
    #[error("wp pole: z within {dist:.3e} of lattice point {near}")]
    Pole { near: Complex64, dist: f64 },

    /// An exponential stage term exceeds the f64 range on the requested
    /// domain; names the offending stage/term.
    #[error("term overflow: stage {stage} term {term} has exponent {exponent:.1} (> {limit:.0}) on |z| <= {radius}")]
    TermOverflow {
        stage: usize,
        term: usize,
        exponent: f64,
        limit: f64,
        radius: f64,
    },

    /// Adaptive quadrature hit its refinement cap before reaching the
    /// requested tolerance.
    #[error("quadrature did not converge: {0}")]
    NonConverged(String),

    /// The alpha doubling search exhausted its cap; carries the trajectory
    /// of the last failing condition over the ladder.
    #[error("alpha search infeasible: {0}")]
    Infeasible(String),

    /// Runge approximation could not be verified below tolerance before
    /// the degree cap; carries the best achieved sup-norms.
    #[error("runge approximation failed: best sup-norms inner={inner:.3e} discs={discs:?}")]
    RungeFailed { inner: f64, discs: Vec<f64> },

    /// Re-verification of a persisted run found mismatched fields.
    #[error("verification mismatch in fields: {0:?}")]
    VerifyMismatch(Vec<String>),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn invalid(what: &'static str, why: impl Into<String>) -> Self {
        Error::Invalid {
            what,
            why: why.into(),
        }
    }

    /// Process exit code per the CLI contract: 2 config, 3 infeasible,
    /// 4 verification mismatch, 1 anything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Invalid { .. } | Error::Json(_) => 2,
            Error::Infeasible(_) | Error::TermOverflow { .. } | Error::RungeFailed { .. } => 3,
            Error::VerifyMismatch(_) => 4,
            _ => 1,
        }
    }
}
