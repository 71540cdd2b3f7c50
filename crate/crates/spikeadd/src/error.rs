//! Error types shared across the crate.

use thiserror::Error;

use crate::hw::ViolationReport;

#[derive(Debug, Error)]
pub enum Error {
    #[error("value {value} does not fit in {width} bits")]
    ValueOutOfRange { value: String, width: u32 },

    #[error("unknown port `{0}`")]
    UnknownPort(String),

    #[error("bit {bit} out of range for port `{port}` of width {width}")]
    BitOutOfRange { port: String, bit: u32, width: u32 },

    #[error("spurious spike on port `{port}`: neuron {neuron} fired at step {step}, expected output only at step {expected}")]
    SpuriousSpike {
        port: String,
        neuron: u32,
        step: u32,
        expected: u32,
    },

    #[error("delay plan needs a path of {required} steps but at most {available} are realizable with {relay_layers} relay layer(s)")]
    DelayOverflow {
        required: u32,
        available: u32,
        relay_layers: u32,
    },

    #[error("weight {weight} is not representable as mantissa x 2^exponent within the hardware limits")]
    WeightOverflow { weight: i64 },

    #[error("bias {bias} exceeds the hardware bias limit of {limit}")]
    BiasOverflow { bias: i64, limit: i64 },

    #[error("exhaustive verification at {requested} bits exceeds the cap of {cap} bits")]
    CapExceeded { requested: u32, cap: u32 },

    #[error("bit width must be at least 1")]
    ZeroBitWidth,

    #[error("synaptic delay must be at least 1")]
    ZeroDelay,

    #[error("synapse references missing neuron {0}")]
    DanglingNeuron(u32),

    #[error("step {step} is outside the record horizon {horizon}")]
    StepOutOfRange { step: u32, horizon: u32 },

    #[error("circuit violates hardware constraints:\n{0}")]
    Constraint(ViolationReport),

    #[error("{0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
