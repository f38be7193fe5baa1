//! Error type shared across the crate.

use std::path::PathBuf;

/// Everything that can go wrong in this crate.
///
/// Variants are split between *data* problems (the input series or file is
/// unusable) and *configuration* problems (a parameter outside the supported
/// range). [`Error::is_data_error`] exposes that split so callers such as the
/// CLI can map the two classes to distinct exit codes.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Input file does not exist or could not be opened.
    #[error("file not found: {path}: {source}")]
    FileNotFound {
        path: PathBuf,
        source: std::io::Error,
    },

    /// A field of the input file did not parse as a finite real number.
    #[error("parse error at line {line}: {token:?} is not a finite number")]
    ParseError { line: usize, token: String },

    /// The input contained no data rows.
    #[error("empty series")]
    EmptySeries,

    /// The series is too short for the requested computation.
    #[error("series too short: n = {n}, need n >= {min}")]
    SeriesTooShort { n: usize, min: usize },

    /// The interior sum of squares c is zero (constant or near-empty series);
    /// the estimator is undefined.
    #[error("degenerate series: interior sum of squares is zero")]
    DegenerateSeries,

    /// The closed-form root computation failed to identify a real root.
    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    /// A scalar argument is outside its mathematical domain.
    #[error("domain error: {0}")]
    DomainError(String),

    /// An innovation or simulation specification violates its invariants.
    #[error("invalid specification: {0}")]
    InvalidSpec(String),

    /// Only the 1%, 5% and 10% levels have built-in critical value surfaces.
    #[error("unsupported level: {0} (built-in surfaces cover 0.01, 0.05, 0.10)")]
    UnsupportedLevel(f64),

    /// Built-in surfaces are fitted for n >= 20 and refuse extrapolation below.
    #[error("length out of range: n = {n}, built-in surfaces require n >= {min}")]
    LengthOutOfRange { n: usize, min: usize },

    /// The response-surface design matrix is singular or underdetermined.
    #[error("singular design: {0}")]
    SingularDesign(String),

    /// The Dickey-Fuller regressor is constant; the regression is undefined.
    #[error("singular regression: lagged regressor is constant")]
    SingularRegression,

    /// Residuals have zero variance; autocorrelations and bootstrap draws are
    /// undefined.
    #[error("degenerate residuals: zero variance")]
    DegenerateResiduals,

    /// The portmanteau test needs at least two lags (one degree of freedom)
    /// and more residuals than lags.
    #[error("too few lags or residuals: lags = {lags}, residuals = {m}")]
    TooFewLags { lags: usize, m: usize },

    /// The pivotal statistic is undefined because the residual variance is
    /// exactly zero while rho-hat is not 1.
    #[error("pivotal statistic undefined: residual variance is zero")]
    TauUndefined,

    /// A Wiener functional that is positive with probability one came out
    /// zero; this signals an RNG or discretization fault upstream.
    #[error("degenerate Wiener functional (A or A_mu is zero)")]
    DegenerateFunctional,
}

impl Error {
    /// True for errors caused by the input data (unreadable, unparsable, or
    /// statistically unusable series); false for unsupported or inconsistent
    /// configuration. The CLI maps data errors to exit code 2 and
    /// configuration errors to exit code 3.
    pub fn is_data_error(&self) -> bool {
        match self {
            Error::FileNotFound { .. }
            | Error::ParseError { .. }
            | Error::EmptySeries
            | Error::SeriesTooShort { .. }
            | Error::DegenerateSeries
            | Error::NumericalFailure(_)
            | Error::SingularRegression
            | Error::DegenerateResiduals
            | Error::TauUndefined
            | Error::LengthOutOfRange { .. }
            | Error::DegenerateFunctional => true,
            Error::DomainError(_)
            | Error::InvalidSpec(_)
            | Error::UnsupportedLevel(_)
            | Error::SingularDesign(_)
            | Error::TooFewLags { .. } => false,
        }
    }

    /// Short machine-readable tag for the variant, stable across versions.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::FileNotFound { .. } => "FileNotFound",
            Error::ParseError { .. } => "ParseError",
            Error::EmptySeries => "EmptySeries",
            Error::SeriesTooShort { .. } => "SeriesTooShort",
            Error::DegenerateSeries => "DegenerateSeries",
            Error::NumericalFailure(_) => "NumericalFailure",
            Error::DomainError(_) => "DomainError",
            Error::InvalidSpec(_) => "InvalidSpec",
            Error::UnsupportedLevel(_) => "UnsupportedLevel",
            Error::LengthOutOfRange { .. } => "LengthOutOfRange",
            Error::SingularDesign(_) => "SingularDesign",
            Error::SingularRegression => "SingularRegression",
            Error::DegenerateResiduals => "DegenerateResiduals",
            Error::TooFewLags { .. } => "TooFewLags",
            Error::TauUndefined => "TauUndefined",
            Error::DegenerateFunctional => "DegenerateFunctional",
        }
    }
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
