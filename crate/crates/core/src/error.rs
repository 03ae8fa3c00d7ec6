use thiserror::Error;

#[derive(Clone, Debug, Error, PartialEq)]
pub enum DqError {
    #[error("dual quaternion has a vanishing primal part")]
    ZeroPrimal,
    #[error("linear factor violates the Study condition: dual scalar part is {0}")]
    NonzeroDualScalar(f64),
    #[error("linear factor t - h with h = 0 has no axis")]
    DegenerateLinear,
    #[error("line direction must be a finite nonzero vector")]
    ZeroDirection,
    #[error("Plücker condition violated: direction · moment = {0}")]
    PlueckerCondition(f64),
}

#[derive(Clone, Debug, Error, PartialEq)]
pub enum DesignError {
    #[error("parameter {0} must be finite")]
    NotFinite(&'static str),
    #[error("q1 and q2 must not vanish simultaneously")]
    VanishingOffsets,
    #[error("b and c must not vanish simultaneously")]
    VanishingDarboux,
    #[error(
        "b² + c² − 4(q1² + q2²) = {condition} vanishes: the degenerate branch needs (z, z3), not (z1, z2)"
    )]
    ExpectedDegenerate { condition: f64 },
    #[error(
        "b² + c² − 4(q1² + q2²) = {condition} does not vanish: the generic branch needs (z1, z2), not (z, z3)"
    )]
    ExpectedGeneric { condition: f64 },
}

#[derive(Clone, Debug, Error, PartialEq)]
pub enum FactorError {
    #[error(transparent)]
    Design(#[from] DesignError),
    #[error("division by {factor} left a remainder of magnitude {residual:e}")]
    Remainder { factor: &'static str, residual: f64 },
    #[error("quotient left after dividing off P2 is not a monic linear polynomial")]
    NotLinear,
    #[error("factor {factor} is not a rotation: {source}")]
    Axis { factor: &'static str, source: DqError },
    #[error("P1·P2·P3·P4² differs from (t² + 1)·M by {residual:e}")]
    VerificationFailure { residual: f64 },
}

#[derive(Clone, Debug, Error, PartialEq)]
pub enum ModeError {
    #[error("second assembly mode needs b² + c² − 4(q1² + q2²) = 0, got {condition}")]
    NoSecondAssembly { condition: f64 },
    #[error("b − 2·z3 vanishes: rotation branch of the second assembly is undefined")]
    SingularRotationBranch,
    #[error("driving parameter v3 = 0 is a pole of v4 = (v3² − 1)/(2 v3)")]
    CurvePole,
    #[error("the special rotation modes need b ≠ 0")]
    ZeroB,
    #[error("unknown branch `{0}`")]
    UnknownBranch(String),
}

/// Why a sample along a mode curve produced no configuration.
#[derive(Clone, Copy, Debug, Error, PartialEq)]
pub enum SampleSkip {
    #[error("indeterminate 0/0 at a formula pole")]
    Indeterminate,
    #[error("no real configuration (discriminant {0:e})")]
    Complex(f64),
}

/// Reading or validating a linkage or trajectory file.
#[derive(Debug, Error)]
pub enum FileError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("malformed CSV: {0}")]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Design(#[from] DesignError),
    #[error(transparent)]
    Factor(#[from] FactorError),
    #[error(transparent)]
    Axis(#[from] DqError),
    #[error(transparent)]
    Mode(#[from] ModeError),
    #[error("{0}")]
    Invalid(String),
    /// Well-formed content that fails a consistency check.
    #[error("{0}")]
    Mismatch(String),
}
