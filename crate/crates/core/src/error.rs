use alloc::string::String;

/// Failure modes of the numerical routines.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("symbol is not strictly convex on [{a}, {b}] (inf f'' = {inf_d2f})")]
    Convexity { a: f64, b: f64, inf_d2f: f64 },
    #[error("phase is not strictly concave at p0 (psi'' = {0})")]
    Concavity(f64),
    #[error("velocity {v} outside [{lo}, {hi}]")]
    Range { v: f64, lo: f64, hi: f64 },
    #[error("accuracy target not reached: {0}")]
    Accuracy(String),
    #[error("phase derivative vanishes or changes sign on [{p1}, {p2}]")]
    StationaryPointInBand { p1: f64, p2: f64 },
    #[error("degenerate band: velocity variance {0} is not positive")]
    DegenerateBand(f64),
    #[error("sampled field is empty (mass {0})")]
    EmptyField(f64),
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn domain(msg: &str) -> Error {
    Error::Domain(String::from(msg))
}
