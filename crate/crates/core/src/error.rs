use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("gcd undefined for two zero polynomials")]
    GcdUndefined,
    #[error("{0} requires exact scalars")]
    ExactRequired(&'static str),
    #[error("evaluation at pole")]
    EvaluationAtPole,
    #[error("order of zero function")]
    OrderOfZero,
    #[error("not on moment level set")]
    NotOnLevelSet,
    #[error("pole of Higgs field at marked point {0}")]
    PoleOfHiggsField(usize),
    #[error("not tangent to level set")]
    NotTangent,
    #[error("stable locus required")]
    StableLocusRequired,
    #[error("sampling failed after {0} attempts")]
    SamplingFailed(usize),
    #[error("quasiparabolic line at marked point {0} is zero")]
    ZeroLine(usize),
    #[error("residues are not strongly parabolic")]
    NotStronglyParabolic,
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
