use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid size {0}: expected a power of two, at least {1}")]
    InvalidSize(usize, usize),

    #[error("mask with {taps} taps is longer than the signal ({len} samples)")]
    MaskTooLong { taps: usize, len: usize },

    #[error("mask center {center} is outside its {taps} taps")]
    MaskCenter { center: usize, taps: usize },

    #[error("qubit {index} out of range for a {qubits}-qubit state")]
    QubitOutOfRange { index: usize, qubits: usize },

    #[error("gate target {0} is also listed as a control")]
    TargetIsControl(usize),

    #[error("a circuit needs at least one qubit")]
    NoQubits,

    #[error("{0} qubits exceeds the state-vector ceiling of {max}", max = crate::qsim::MAX_QUBITS)]
    TooManyQubits(usize),

    #[error("state of {state} qubits cannot be combined with a {other}-qubit operand")]
    QubitMismatch { state: usize, other: usize },

    #[error("cannot normalize an all-zero amplitude vector")]
    ZeroNorm,

    #[error("amplitudes have squared norm {0}, expected 1")]
    NotNormalized(f64),

    #[error("prefix {0} has zero probability; conditional distribution is undefined")]
    ZeroProbabilityPrefix(usize),

    #[error("prefix {prefix} out of range ({count} prefixes)")]
    PrefixOutOfRange { prefix: usize, count: usize },

    #[error("shots must be at least 1")]
    NoShots,

    #[error("image width {0} is not a power of two (enable padding to process it)")]
    WidthNotPowerOfTwo(usize),

    #[error("pixel buffer holds {got} values, expected {expected}")]
    PixelCount { expected: usize, got: usize },
}
