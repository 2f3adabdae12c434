use alloc::string::String;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("non-finite argument {0}")]
    Domain(f64),

    /// Quadrature did not settle; carries the two last estimates.
    #[error("quadrature did not converge at t = {t}: {coarse} vs {fine}")]
    Accuracy { t: f64, coarse: f64, fine: f64 },

    #[error("adaptive integration did not reach tolerance (error estimate {error:e})")]
    Integration { error: f64 },

    #[error("oracle returned a non-finite value at {at}")]
    Oracle { at: f64 },

    #[error("tilted sampler envelope failed at tilt {tilt}: acceptance rate {rate:e}")]
    Envelope { tilt: f64, rate: f64 },

    #[error("threshold {w} is outside the reachable range ({lo}, {hi})")]
    InfeasibleThreshold { w: f64, lo: f64, hi: f64 },

    #[error("direction row has zero norm after {attempts} attempts")]
    ZeroNorm { attempts: u32 },

    #[error("curvature of Λ∘√ is indeterminate; no ordering verdict")]
    Indeterminate,

    #[error("ordering violated at {at}: residual {residual:e} ({expected})")]
    Verdict { at: f64, residual: f64, expected: &'static str },
}
