//! Binary, LSB-first spike encoding of unsigned integers.
//!
//! Bit `i` of an operand maps to bit slot `i` of an input port; a spike
//! means 1, silence means 0. All adders read and emit this encoding, and
//! overflow surfaces as the spiking of the most significant carry, exposed
//! on a dedicated single-bit output port.

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::sim::{InputSchedule, SpikeRecord};

/// Fixed-width bit pattern, least significant bit at index 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitVector {
    bits: Vec<bool>,
}

impl BitVector {
    pub fn width(&self) -> u32 {
        self.bits.len() as u32
    }

    pub fn bit(&self, index: u32) -> bool {
        self.bits[index as usize]
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    /// Indices of the set bits.
    pub fn ones(&self) -> impl Iterator<Item = u32> + '_ {
        self.bits
            .iter()
            .enumerate()
            .filter(|(_, b)| **b)
            .map(|(i, _)| i as u32)
    }

    pub fn to_biguint(&self) -> BigUint {
        let mut value = BigUint::zero();
        for i in self.ones() {
            value |= BigUint::one() << i;
        }
        value
    }

    /// Adds one spike per set bit to `schedule`, on `port` at `step`.
    pub fn schedule_into(&self, schedule: &mut InputSchedule, step: u32, port: &str) {
        for bit in self.ones() {
            schedule.spike(step, port, bit);
        }
    }
}

/// Binary expansion of `value` into `width` bits, LSB first.
pub fn encode_uint(value: &BigUint, width: u32) -> Result<BitVector> {
    if width == 0 {
        return Err(Error::ZeroBitWidth);
    }
    if value.bits() > width as u64 {
        return Err(Error::ValueOutOfRange {
            value: value.to_string(),
            width,
        });
    }
    let bits = (0..width).map(|i| value.bit(i as u64)).collect();
    Ok(BitVector { bits })
}

/// Reads the value on `sum_port` at `step` without any discipline check.
/// Intended for pipelined streams where several results share one record.
pub fn decode_output_at(
    record: &SpikeRecord,
    sum_port: &str,
    overflow_port: &str,
    step: u32,
) -> Result<(BigUint, bool)> {
    let sum_bits = record.port_bits(sum_port, step)?;
    let mut value = BigUint::zero();
    for (i, fired) in sum_bits.iter().enumerate() {
        if *fired {
            value |= BigUint::one() << i;
        }
    }
    let overflow_step = step.checked_sub(1).ok_or(Error::StepOutOfRange {
        step: 0,
        horizon: record.horizon(),
    })?;
    let overflow = record
        .port_bits(overflow_port, overflow_step)?
        .iter()
        .any(|b| *b);
    Ok((value, overflow))
}

/// Decodes a single addition: the sum read off `sum_port` at
/// `expected_step` and the overflow flag read off `overflow_port` one step
/// earlier (the most significant carry is synchronized one step before the
/// sums in every adder this crate builds).
///
/// Errors with [`Error::SpuriousSpike`] if any sum-port neuron fired at a
/// step other than `expected_step`; a well-formed adder produces all of
/// its output spikes at exactly one step.
pub fn decode_output(
    record: &SpikeRecord,
    sum_port: &str,
    overflow_port: &str,
    expected_step: u32,
) -> Result<(BigUint, bool)> {
    let ids = record
        .output_ports()
        .get(sum_port)
        .ok_or_else(|| Error::UnknownPort(sum_port.to_string()))?
        .clone();
    for event in record.events() {
        if event.step != expected_step && ids.contains(&event.neuron) {
            return Err(Error::SpuriousSpike {
                port: sum_port.to_string(),
                neuron: event.neuron,
                step: event.step,
                expected: expected_step,
            });
        }
    }
    decode_output_at(record, sum_port, overflow_port, expected_step)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::CircuitBuilder;
    use crate::sim;

    fn uint(v: u64) -> BigUint {
        BigUint::from(v)
    }

    #[test]
    fn encode_zero_is_all_zero_bits() {
        let bv = encode_uint(&uint(0), 4).unwrap();
        assert_eq!(bv.bits(), &[false, false, false, false]);
    }

    #[test]
    fn encode_five_in_four_bits() {
        let bv = encode_uint(&uint(5), 4).unwrap();
        assert_eq!(bv.bits(), &[true, false, true, false]);
    }

    #[test]
    fn encode_worst_case_operand_at_eight_bits() {
        let bv = encode_uint(&uint(127), 8).unwrap();
        assert_eq!(
            bv.bits(),
            &[true, true, true, true, true, true, true, false]
        );
    }

    #[test]
    fn encode_rejects_out_of_range_values() {
        assert!(matches!(
            encode_uint(&uint(16), 4),
            Err(Error::ValueOutOfRange { .. })
        ));
        // 2^n - 1 is the largest accepted value.
        assert!(encode_uint(&uint(15), 4).is_ok());
    }

    /// Builds a record by driving output neurons directly from input bits.
    fn synthetic_record(sum_width: u32, sum_spikes: &[u32], overflow: bool) -> SpikeRecord {
        let mut cb = CircuitBuilder::new();
        let mut sum_ids = Vec::new();
        for _ in 0..sum_width {
            sum_ids.push(cb.add_neuron(1, 0));
        }
        let ovf = cb.add_neuron(1, 0);
        cb.add_input_port("drive", sum_width + 1);
        for (i, id) in sum_ids.iter().enumerate() {
            cb.connect(
                crate::circuit::Source::Input {
                    port: "drive".into(),
                    bit: i as u32,
                },
                *id,
                1,
                2,
            );
        }
        cb.connect(
            crate::circuit::Source::Input {
                port: "drive".into(),
                bit: sum_width,
            },
            ovf,
            1,
            1,
        );
        cb.set_output_port("sum", sum_ids);
        cb.set_output_port("overflow", vec![ovf]);
        let circuit = cb.build().unwrap();
        let mut schedule = InputSchedule::new();
        for bit in sum_spikes {
            schedule.spike(0, "drive", *bit);
        }
        if overflow {
            schedule.spike(0, "drive", sum_width);
        }
        sim::run(&circuit, &schedule, 3).unwrap()
    }

    #[test]
    fn decode_sums_fired_bits() {
        let record = synthetic_record(4, &[1, 2], false);
        let (value, overflow) = decode_output(&record, "sum", "overflow", 2).unwrap();
        assert_eq!(value, uint(6));
        assert!(!overflow);
    }

    #[test]
    fn decode_overflow_with_zero_sum() {
        let record = synthetic_record(1, &[], true);
        let (value, overflow) = decode_output(&record, "sum", "overflow", 2).unwrap();
        assert_eq!(value, uint(0));
        assert!(overflow);
    }

    #[test]
    fn decode_eight_bit_worst_case_result() {
        let record = synthetic_record(8, &[1, 2, 3, 4, 5, 6, 7], false);
        let (value, overflow) = decode_output(&record, "sum", "overflow", 2).unwrap();
        assert_eq!(value, uint(254));
        assert!(!overflow);
    }

    #[test]
    fn decode_rejects_spurious_spikes() {
        // Drive a sum neuron at step 1 while expecting output at step 2.
        let mut cb = CircuitBuilder::new();
        let s0 = cb.add_neuron(1, 0);
        let ovf = cb.add_neuron(1, 0);
        cb.add_input_port("drive", 1);
        for delay in [1, 2] {
            cb.connect(
                crate::circuit::Source::Input {
                    port: "drive".into(),
                    bit: 0,
                },
                s0,
                1,
                delay,
            );
        }
        cb.set_output_port("sum", vec![s0]);
        cb.set_output_port("overflow", vec![ovf]);
        let circuit = cb.build().unwrap();
        let mut schedule = InputSchedule::new();
        schedule.spike(0, "drive", 0);
        let record = sim::run(&circuit, &schedule, 3).unwrap();
        assert!(matches!(
            decode_output(&record, "sum", "overflow", 2),
            Err(Error::SpuriousSpike { step: 1, .. })
        ));
    }

    #[test]
    fn round_trip_exhaustive_up_to_twelve_bits() {
        for width in 1..=12u32 {
            for v in 0u64..(1 << width) {
                let bv = encode_uint(&uint(v), width).unwrap();
                assert_eq!(bv.to_biguint(), uint(v));
            }
        }
    }
}
