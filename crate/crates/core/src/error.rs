use num_complex::Complex64;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: &'static str },

    #[error("{what} is outside the domain of the function (got {value})")]
    Domain { what: &'static str, value: f64 },

    #[error("floating-point overflow in {0}")]
    Overflow(&'static str),

    #[error("invalid problem: {0}")]
    InvalidProblem(&'static str),

    #[error("singular step: diagonal 1 + λ·w vanishes for h = {step}, λ = {lambda}")]
    SingularStep { step: f64, lambda: Complex64 },

    #[error("degenerate fit: {0}")]
    DegenerateFit(&'static str),

    #[error("{what} did not converge (last relative change {change:e})")]
    NonConvergence { what: &'static str, change: f64 },

    #[error("out of asymptotic regime: {0}")]
    OutOfRegime(&'static str),

    #[error("grid too coarse: survival increases by {increase:e} at index {index}")]
    GridTooCoarse { index: usize, increase: f64 },

    #[error("normalization error: {0}")]
    Normalization(&'static str),

    #[error("insufficient points: {found} in window, need at least {needed}")]
    InsufficientPoints { found: usize, needed: usize },

    #[error("no finite vanishing time: {0}")]
    NoVanishing(&'static str),

    #[error("boundary leakage: field at the wall is {ratio:e} of the maximum at t = {time}")]
    BoundaryLeakage { ratio: f64, time: f64 },

    #[error("nonphysical negative density {min:e} at t = {time}")]
    Negativity { min: f64, time: f64 },

    #[error("step resolution: boundary amplitude changes by {change:e} under step halving")]
    StepResolution { change: f64 },
}
