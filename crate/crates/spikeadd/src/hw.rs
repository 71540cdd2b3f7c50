//! Loihi 2-style hardware limits: synaptic delay caps, weight
//! mantissa/exponent precision, bias precision, and per-core neuron
//! capacity (which halves for every extra bit of synaptic delay).

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::circuit::Circuit;
use crate::error::{Error, Result};

/// Mantissa magnitude expressible with the default 8 bits of weight
/// precision. The bound is inclusive: +/-128 is representable, which is
/// what lets a 16-bit adder place its largest weight (2^15 = 128 * 2^8)
/// into the second synapse group.
pub const DEFAULT_MANTISSA_MAGNITUDE: i64 = 128;

/// Environment variable naming a JSON hardware config to load by default.
pub const HW_CONFIG_ENV: &str = "SPIKEADD_HW_CONFIG";

/// Parameter set of a Loihi 2-like target.
///
/// Every limit is overridable; the defaults reproduce the documented caps
/// of the stock chip: 63-step synaptic delays, 8-bit weight mantissas with
/// one extra synapse group at exponent 8, and 8192 neurons per core before
/// delay-driven capacity halving.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct HardwareModel {
    /// Largest representable synaptic delay, in time steps.
    pub max_delay: u32,
    /// Bits of precision in a weight mantissa.
    pub weight_mantissa_bits: u32,
    /// Largest usable weight exponent. Exponents come in multiples of 8
    /// (one per synapse group), so the default of 8 allows exactly two
    /// groups and nothing beyond.
    pub max_weight_exponent: u32,
    /// Largest usable bias magnitude.
    pub bias_limit: i64,
    /// Neurons per core when no synaptic delays are used.
    pub neurons_per_core_base: u64,
    /// Whether each additional delay bit halves the neuron capacity.
    pub delay_bits_halving: bool,
}

impl Default for HardwareModel {
    fn default() -> Self {
        HardwareModel {
            max_delay: 63,
            weight_mantissa_bits: 8,
            max_weight_exponent: 8,
            bias_limit: 64,
            neurons_per_core_base: 8192,
            delay_bits_halving: true,
        }
    }
}

impl HardwareModel {
    /// Largest mantissa magnitude (inclusive) under this model.
    pub fn mantissa_magnitude(&self) -> i64 {
        1i64 << (self.weight_mantissa_bits - 1)
    }

    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    /// Loads the model named by `SPIKEADD_HW_CONFIG`, or the default.
    pub fn from_env() -> Result<Self> {
        match std::env::var_os(HW_CONFIG_ENV) {
            Some(path) => Self::from_json_file(Path::new(&path)),
            None => Ok(Self::default()),
        }
    }
}

/// Splits a weight into `(mantissa, exponent)` with the smallest exponent
/// in {0, 8, ..., max_weight_exponent} such that the weight divides evenly
/// and the mantissa fits the hardware precision.
pub fn quantize_weight(weight: i64, hw: &HardwareModel) -> Result<(i64, u32)> {
    let limit = hw.mantissa_magnitude();
    let mut exponent = 0u32;
    loop {
        let shifted = weight >> exponent;
        if (shifted << exponent) == weight && shifted.abs() <= limit {
            return Ok((shifted, exponent));
        }
        exponent += 8;
        if exponent > hw.max_weight_exponent {
            return Err(Error::WeightOverflow { weight });
        }
    }
}

/// Which hardware limit a circuit element overran.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LimitKind {
    DelayExceeded,
    WeightOverflow,
    BiasExceeded,
}

impl fmt::Display for LimitKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LimitKind::DelayExceeded => write!(f, "delay exceeded"),
            LimitKind::WeightOverflow => write!(f, "weight overflow"),
            LimitKind::BiasExceeded => write!(f, "bias exceeded"),
        }
    }
}

/// One violated limit on one circuit element.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    /// `synapse:<index>` or `neuron:<id>`.
    pub element: String,
    pub limit: LimitKind,
    pub required: i64,
    pub allowed: i64,
}

/// Every limit violation found in a circuit; empty iff deployable.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ViolationReport {
    pub violations: Vec<Violation>,
}

impl ViolationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn len(&self) -> usize {
        self.violations.len()
    }

    pub fn has(&self, limit: LimitKind) -> bool {
        self.violations.iter().any(|v| v.limit == limit)
    }
}

impl fmt::Display for ViolationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "no violations");
        }
        for v in &self.violations {
            writeln!(
                f,
                "{}: {} (required {}, allowed {})",
                v.element, v.limit, v.required, v.allowed
            )?;
        }
        Ok(())
    }
}

/// Checks every synapse delay, every effective weight, and every bias
/// against the model. Violations are data, not errors.
pub fn validate(circuit: &Circuit, hw: &HardwareModel) -> ViolationReport {
    let mut report = ViolationReport::default();
    for (index, synapse) in circuit.synapses().iter().enumerate() {
        if synapse.delay > hw.max_delay {
            report.violations.push(Violation {
                element: format!("synapse:{index}"),
                limit: LimitKind::DelayExceeded,
                required: synapse.delay as i64,
                allowed: hw.max_delay as i64,
            });
        }
        let weight = synapse.weight();
        if quantize_weight(weight, hw).is_err() {
            report.violations.push(Violation {
                element: format!("synapse:{index}"),
                limit: LimitKind::WeightOverflow,
                required: weight,
                allowed: hw.mantissa_magnitude() << hw.max_weight_exponent,
            });
        }
    }
    for neuron in circuit.neurons() {
        if neuron.bias.abs() > hw.bias_limit {
            report.violations.push(Violation {
                element: format!("neuron:{}", neuron.id),
                limit: LimitKind::BiasExceeded,
                required: neuron.bias,
                allowed: hw.bias_limit,
            });
        }
    }
    report
}

/// Bits needed to represent delays up to `max_delay`.
pub fn delay_bits(max_delay: u32) -> u32 {
    let mut bits = 0;
    while (1u64 << bits) < max_delay as u64 + 1 {
        bits += 1;
    }
    bits
}

/// Neuron capacity of one core for a circuit whose largest delay is
/// `max_delay_used`.
pub fn core_capacity(hw: &HardwareModel, max_delay_used: u32) -> u64 {
    if !hw.delay_bits_halving {
        return hw.neurons_per_core_base;
    }
    let bits = delay_bits(max_delay_used);
    (hw.neurons_per_core_base >> bits).max(1)
}

/// Fraction of one core's neuron capacity the circuit occupies. Capacity
/// halves for every bit of synaptic delay the circuit needs, so usage
/// jumps whenever the maximum delay crosses a power of two.
pub fn core_usage(circuit: &Circuit, hw: &HardwareModel) -> f64 {
    let capacity = core_capacity(hw, circuit.max_delay());
    circuit.neuron_count() as f64 / capacity as f64
}

/// Failures tolerated before the width search gives up. Wide enough that
/// none of the adder families can sneak back into validity past it.
const SEARCH_MISS_WINDOW: u32 = 64;
const SEARCH_HARD_LIMIT: u32 = 4096;

/// Largest bit width at which the adder kind builds and validates under
/// the model, found by searching over widths rather than read from a table.
pub fn max_supported_bits(kind: crate::adders::AdderKind, hw: &HardwareModel) -> u32 {
    max_supported_bits_with(&crate::adders::AdderConfig::new(kind, 1), hw)
}

/// Width search for an arbitrary build configuration (relay layers,
/// per-neuron thresholds). The `bits` field of the template is ignored.
pub fn max_supported_bits_with(
    template: &crate::adders::AdderConfig,
    hw: &HardwareModel,
) -> u32 {
    let mut best = 0;
    let mut misses = 0;
    for bits in 1..=SEARCH_HARD_LIMIT {
        if template.with_bits(bits).build(hw).is_ok() {
            best = bits;
            misses = 0;
        } else {
            misses += 1;
            if misses >= SEARCH_MISS_WINDOW {
                break;
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{CircuitBuilder, Source};

    #[test]
    fn quantize_small_weight_stays_in_base_group() {
        let hw = HardwareModel::default();
        assert_eq!(quantize_weight(1 << 5, &hw).unwrap(), (32, 0));
    }

    #[test]
    fn quantize_large_weight_moves_to_second_group() {
        let hw = HardwareModel::default();
        assert_eq!(quantize_weight(1 << 12, &hw).unwrap(), (16, 8));
        assert_eq!(quantize_weight(1 << 15, &hw).unwrap(), (128, 8));
        assert_eq!(quantize_weight(-(1 << 15), &hw).unwrap(), (-128, 8));
    }

    #[test]
    fn quantize_rejects_weights_beyond_two_groups() {
        let hw = HardwareModel::default();
        assert!(matches!(
            quantize_weight(1 << 16, &hw),
            Err(Error::WeightOverflow { weight }) if weight == 1 << 16
        ));
    }

    #[test]
    fn quantize_prefers_smallest_exponent() {
        let hw = HardwareModel::default();
        assert_eq!(quantize_weight(-2, &hw).unwrap(), (-2, 0));
        assert_eq!(quantize_weight(128, &hw).unwrap(), (128, 0));
        // 256 does not fit an 8-bit mantissa at exponent 0.
        assert_eq!(quantize_weight(256, &hw).unwrap(), (1, 8));
    }

    #[test]
    fn validate_flags_bias_beyond_limit() {
        let mut cb = CircuitBuilder::new();
        cb.add_neuron(1, 1 << 20);
        let circuit = cb.build().unwrap();
        let report = validate(&circuit, &HardwareModel::default());
        assert_eq!(report.len(), 1);
        assert!(report.has(LimitKind::BiasExceeded));
    }

    #[test]
    fn validate_flags_overlong_delay() {
        let mut cb = CircuitBuilder::new();
        let a = cb.add_neuron(1, 0);
        let b = cb.add_neuron(1, 0);
        cb.connect(crate::circuit::Source::Neuron(a), b, 1, 64);
        let circuit = cb.build().unwrap();
        let report = validate(&circuit, &HardwareModel::default());
        assert!(report.has(LimitKind::DelayExceeded));
    }

    #[test]
    fn validated_weights_requantize_exactly() {
        let hw = HardwareModel::default();
        let mut cb = CircuitBuilder::new();
        let a = cb.add_neuron(1, 0);
        let b = cb.add_neuron(1, 0);
        for weight in [1, -2, 64, 1 << 9, 1 << 15, -(1 << 13)] {
            cb.connect(Source::Neuron(a), b, weight, 1);
        }
        let circuit = cb.build().unwrap();
        assert!(validate(&circuit, &hw).is_empty());
        for synapse in circuit.synapses() {
            let (m, e) = quantize_weight(synapse.weight(), &hw).unwrap();
            assert_eq!(m << e, synapse.weight());
        }
    }

    #[test]
    fn validate_passes_the_largest_buildable_adders() {
        let hw = HardwareModel::default();
        for config in [
            crate::adders::AdderConfig::new(crate::adders::AdderKind::Dcta2, 16),
            crate::adders::AdderConfig::new(crate::adders::AdderKind::Sequential, 62),
            crate::adders::AdderConfig::new(crate::adders::AdderKind::Dcta3, 42),
        ] {
            let adder = config.build_unvalidated(&hw).unwrap();
            assert!(validate(&adder.circuit, &hw).is_empty());
        }
    }

    #[test]
    fn validate_reports_sequential_delay_overflow_past_the_cap() {
        let hw = HardwareModel::default();
        let adder = crate::adders::AdderConfig::new(crate::adders::AdderKind::Sequential, 63)
            .build_unvalidated(&hw)
            .unwrap();
        let report = validate(&adder.circuit, &hw);
        assert!(!report.is_empty());
        assert!(report.has(LimitKind::DelayExceeded));
        assert!(!report.has(LimitKind::WeightOverflow));
    }

    #[test]
    fn delay_bits_follow_ceil_log2() {
        assert_eq!(delay_bits(0), 0);
        assert_eq!(delay_bits(1), 1);
        assert_eq!(delay_bits(2), 2);
        assert_eq!(delay_bits(3), 2);
        assert_eq!(delay_bits(4), 3);
        assert_eq!(delay_bits(63), 6);
        assert_eq!(delay_bits(64), 7);
    }

    #[test]
    fn capacity_examples_from_halving_rule() {
        let hw = HardwareModel::default();
        assert_eq!(core_capacity(&hw, 1), 4096);
        assert_eq!(core_capacity(&hw, 63), 128);
    }

    #[test]
    fn capacity_without_halving_is_flat() {
        let hw = HardwareModel {
            delay_bits_halving: false,
            ..HardwareModel::default()
        };
        assert_eq!(core_capacity(&hw, 63), 8192);
    }

    #[test]
    fn hardware_model_round_trips_through_json() {
        let hw = HardwareModel::default();
        let text = serde_json::to_string(&hw).unwrap();
        let back: HardwareModel = serde_json::from_str(&text).unwrap();
        assert_eq!(hw, back);
        // Partial configs fall back to defaults per field.
        let partial: HardwareModel = serde_json::from_str(r#"{"max_delay": 7}"#).unwrap();
        assert_eq!(partial.max_delay, 7);
        assert_eq!(partial.bias_limit, 64);
    }
}
