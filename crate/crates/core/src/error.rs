use thiserror::Error;

/// Everything that can go wrong inside the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("wave vector must be finite and nonzero, got {0:?}")]
    ZeroWaveVector([f64; 3]),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("box mismatch: amplitudes use {amplitudes:?}, grid uses {grid:?}")]
    BoxMismatch { amplitudes: [f64; 3], grid: [f64; 3] },

    #[error("harmonic {n:?} (and its negative) must satisfy |n_i| < N_i/2 on a grid of {dims:?}")]
    OutOfBand { n: [i64; 3], dims: [usize; 3] },

    #[error("zero harmonic n = (0,0,0) cannot carry a mode")]
    ZeroHarmonic,

    #[error("shape mismatch: expected {expected} samples, got {got}")]
    ShapeMismatch { expected: usize, got: usize },

    #[error("field is not physical: upper block must be real and lower block imaginary (deviation {0:e})")]
    NonPhysical(f64),

    #[error("time samples must be uniform and strictly increasing")]
    NonUniformSampling,

    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },

    #[error("boosts act on analytic mode sets; raw grid samples cannot be boosted")]
    RawGridBoost,

    #[error("operator {0} has no image under the potential substitution")]
    NoPotentialImage(String),

    #[error("state cannot evaluate operator {0}")]
    UnsupportedState(String),

    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    /// Stable snake_case tag, used in machine-readable error lines.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::ZeroWaveVector(_) => "zero_wave_vector",
            Error::InvalidGrid(_) => "invalid_grid",
            Error::BoxMismatch { .. } => "box_mismatch",
            Error::OutOfBand { .. } => "out_of_band",
            Error::ZeroHarmonic => "zero_harmonic",
            Error::ShapeMismatch { .. } => "shape_mismatch",
            Error::NonPhysical(_) => "non_physical",
            Error::NonUniformSampling => "non_uniform_sampling",
            Error::TooFewSamples { .. } => "too_few_samples",
            Error::RawGridBoost => "raw_grid_boost",
            Error::NoPotentialImage(_) => "no_potential_image",
            Error::UnsupportedState(_) => "unsupported_state",
            Error::Format(_) => "format",
            Error::Io(_) => "io",
        }
    }
}
