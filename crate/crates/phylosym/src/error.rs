use core::fmt;

/// Errors shared across the crate.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A size/order request exceeded a configured capacity bound.
    Capacity {
        what: &'static str,
        requested: usize,
        max: usize,
    },
    /// A series was built to a smaller order than the operation needs.
    OrderTooSmall { needed: usize, have: usize },
    /// Two trees of different sizes were compared where sizes must match.
    SizeMismatch { left: usize, right: usize },
    /// Leaf labels are not exactly the interval 1..=n.
    InvalidLabels { n: usize, detail: &'static str },
    /// A distribution has zero variance, so Gaussian diagnostics are undefined.
    DegenerateDistribution { n: usize },
    /// The continued-square-root evaluation hit a negative radicand; the
    /// argument lies outside the convergence region. Root finders use this
    /// as a bracket signal.
    PastSingularity { z: f64, radicand: f64 },
    /// A root-finding bracket did not enclose a sign change.
    Bracket { lo: f64, hi: f64 },
    /// Two step sizes of a numerical derivative disagreed beyond tolerance.
    Precision { what: &'static str, disagreement: f64 },
    /// A fitting window holds too few points.
    WindowTooSmall { points: usize, min: usize },
    /// An unranking was asked for a rank at or beyond the object count.
    RankOutOfRange { n: usize },
    /// Text could not be parsed as a tree or a sequence file.
    Parse { pos: usize, expected: &'static str },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Capacity {
                what,
                requested,
                max,
            } => write!(f, "{what}: requested {requested}, capacity {max}"),
            Error::OrderTooSmall { needed, have } => {
                write!(f, "series order {have} too small, need {needed}")
            }
            Error::SizeMismatch { left, right } => {
                write!(f, "tree sizes differ: {left} vs {right}")
            }
            Error::InvalidLabels { n, detail } => {
                write!(f, "leaf labels are not exactly 1..={n}: {detail}")
            }
            Error::DegenerateDistribution { n } => {
                write!(f, "distribution at n={n} has zero variance")
            }
            Error::PastSingularity { z, radicand } => {
                write!(f, "negative radicand {radicand:e} at z={z}: past the singularity")
            }
            Error::Bracket { lo, hi } => {
                write!(f, "no sign change on bracket [{lo}, {hi}]")
            }
            Error::Precision { what, disagreement } => {
                write!(f, "{what}: step sizes disagree by {disagreement:e}")
            }
            Error::WindowTooSmall { points, min } => {
                write!(f, "fit window has {points} points, need at least {min}")
            }
            Error::RankOutOfRange { n } => {
                write!(f, "rank exceeds the object count at size {n}")
            }
            Error::Parse { pos, expected } => {
                write!(f, "parse error at byte {pos}: expected {expected}")
            }
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
