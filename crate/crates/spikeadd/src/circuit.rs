//! Immutable netlists of threshold-gate neurons and delayed weighted synapses.
//!
//! A [`Circuit`] is a pure description: neurons with integer thresholds and
//! biases, synapses with integer weights (stored as mantissa x 2^exponent)
//! and integer delays of at least one time step, plus named input and output
//! ports. All arithmetic is exact signed integer arithmetic; there is no
//! floating point anywhere in the simulation path.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense index of a neuron within its circuit.
pub type NeuronId = u32;

/// A fully-decaying integrate-and-fire neuron, i.e. a threshold gate.
///
/// The membrane carries no state between steps: the neuron fires at step `t`
/// iff the sum of synaptic weights arriving at `t` plus `bias` reaches
/// `threshold`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Neuron {
    pub id: NeuronId,
    pub threshold: i64,
    pub bias: i64,
}

impl Neuron {
    /// Firing rule: weighted input sum plus bias meets the threshold.
    pub fn fires(&self, input_sum: i64) -> bool {
        input_sum + self.bias >= self.threshold
    }
}

/// Either a neuron or one bit slot of a named input port.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    Neuron(NeuronId),
    Input { port: String, bit: u32 },
}

/// A delayed weighted connection. The effective weight is
/// `mantissa * 2^exponent`, matching the hardware representation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Synapse {
    pub pre: Source,
    pub post: NeuronId,
    pub mantissa: i64,
    pub exponent: u32,
    pub delay: u32,
}

impl Synapse {
    pub fn weight(&self) -> i64 {
        self.mantissa << self.exponent
    }
}

/// Immutable spiking circuit. Construct one through [`CircuitBuilder`] or by
/// deserializing the JSON schema; once built it can be shared freely across
/// concurrent simulation runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    neurons: Vec<Neuron>,
    synapses: Vec<Synapse>,
    ports: Ports,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Ports {
    /// Input port name -> number of bit slots.
    pub inputs: BTreeMap<String, u32>,
    /// Output port name -> neuron ids, least significant first.
    pub outputs: BTreeMap<String, Vec<NeuronId>>,
}

impl Circuit {
    pub fn neurons(&self) -> &[Neuron] {
        &self.neurons
    }

    pub fn synapses(&self) -> &[Synapse] {
        &self.synapses
    }

    pub fn ports(&self) -> &Ports {
        &self.ports
    }

    pub fn neuron_count(&self) -> usize {
        self.neurons.len()
    }

    pub fn synapse_count(&self) -> usize {
        self.synapses.len()
    }

    /// Width of a named input port.
    pub fn input_width(&self, port: &str) -> Result<u32> {
        self.ports
            .inputs
            .get(port)
            .copied()
            .ok_or_else(|| Error::UnknownPort(port.to_string()))
    }

    /// Neurons behind a named output port.
    pub fn output_port(&self, port: &str) -> Result<&[NeuronId]> {
        self.ports
            .outputs
            .get(port)
            .map(|v| v.as_slice())
            .ok_or_else(|| Error::UnknownPort(port.to_string()))
    }

    /// Largest synaptic delay in the circuit, 0 if there are no synapses.
    pub fn max_delay(&self) -> u32 {
        self.synapses.iter().map(|s| s.delay).max().unwrap_or(0)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let circuit: Circuit = serde_json::from_str(text)?;
        circuit.check()?;
        Ok(circuit)
    }

    /// Structural sanity: dense ids, endpoints exist, delays >= 1.
    fn check(&self) -> Result<()> {
        for (idx, neuron) in self.neurons.iter().enumerate() {
            if neuron.id as usize != idx {
                return Err(Error::DanglingNeuron(neuron.id));
            }
        }
        let n = self.neurons.len() as u32;
        for synapse in &self.synapses {
            if synapse.delay == 0 {
                return Err(Error::ZeroDelay);
            }
            if synapse.post >= n {
                return Err(Error::DanglingNeuron(synapse.post));
            }
            match &synapse.pre {
                Source::Neuron(id) if *id >= n => return Err(Error::DanglingNeuron(*id)),
                Source::Input { port, bit } => {
                    let width = self.input_width(port)?;
                    if *bit >= width {
                        return Err(Error::BitOutOfRange {
                            port: port.clone(),
                            bit: *bit,
                            width,
                        });
                    }
                }
                _ => {}
            }
        }
        for ids in self.ports.outputs.values() {
            for id in ids {
                if *id >= n {
                    return Err(Error::DanglingNeuron(*id));
                }
            }
        }
        Ok(())
    }
}

/// Splits a weight into the canonical `(mantissa, exponent)` storage form:
/// the smallest exponent in {0, 8, 16, ...} whose mantissa magnitude stays
/// within 8 bits. Weights too large for that form are stored raw with
/// exponent 0 and flagged later by hardware validation.
pub fn canonical_weight_split(weight: i64) -> (i64, u32) {
    let mut exponent = 0u32;
    let mut mantissa = weight;
    while exponent < 8
        && mantissa.abs() > crate::hw::DEFAULT_MANTISSA_MAGNITUDE
        && mantissa % 256 == 0
    {
        mantissa /= 256;
        exponent += 8;
    }
    if mantissa.abs() > crate::hw::DEFAULT_MANTISSA_MAGNITUDE {
        (weight, 0)
    } else {
        (mantissa, exponent)
    }
}

/// Mutable staging area for building a [`Circuit`].
#[derive(Debug, Default)]
pub struct CircuitBuilder {
    neurons: Vec<Neuron>,
    synapses: Vec<Synapse>,
    ports: Ports,
}

impl CircuitBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_neuron(&mut self, threshold: i64, bias: i64) -> NeuronId {
        let id = self.neurons.len() as NeuronId;
        self.neurons.push(Neuron {
            id,
            threshold,
            bias,
        });
        id
    }

    pub fn add_input_port(&mut self, name: &str, width: u32) {
        self.ports.inputs.insert(name.to_string(), width);
    }

    pub fn set_output_port(&mut self, name: &str, ids: Vec<NeuronId>) {
        self.ports.outputs.insert(name.to_string(), ids);
    }

    /// Adds a synapse with the canonical mantissa/exponent split of `weight`.
    pub fn connect(&mut self, pre: Source, post: NeuronId, weight: i64, delay: u32) {
        let (mantissa, exponent) = canonical_weight_split(weight);
        self.synapses.push(Synapse {
            pre,
            post,
            mantissa,
            exponent,
            delay,
        });
    }

    /// Adds a synapse with an explicit mantissa/exponent split.
    pub fn connect_quantized(&mut self, synapse: Synapse) {
        self.synapses.push(synapse);
    }

    /// Like [`connect`](Self::connect), but splits delays longer than
    /// `max_delay` into a chain of relay neurons (threshold 1, weight 1).
    /// Each relay forwards a spike in the same step it arrives, so a chain
    /// with segment delays summing to `delay` preserves timing exactly. At
    /// most `relay_budget` relays may be spent on one connection.
    pub fn connect_with_relays(
        &mut self,
        pre: Source,
        post: NeuronId,
        weight: i64,
        delay: u32,
        max_delay: u32,
        relay_budget: u32,
    ) -> Result<u32> {
        if delay <= max_delay {
            self.connect(pre, post, weight, delay);
            return Ok(0);
        }
        let relays_needed = delay.div_ceil(max_delay) - 1;
        if relays_needed > relay_budget {
            return Err(Error::DelayOverflow {
                required: delay,
                available: max_delay * (relay_budget + 1),
                relay_layers: relay_budget,
            });
        }
        let mut remaining = delay;
        let mut source = pre;
        for _ in 0..relays_needed {
            let relay = self.add_neuron(1, 0);
            self.connect(source, relay, 1, max_delay);
            remaining -= max_delay;
            source = Source::Neuron(relay);
        }
        self.connect(source, post, weight, remaining);
        Ok(relays_needed)
    }

    pub fn neuron_count(&self) -> usize {
        self.neurons.len()
    }

    pub fn build(self) -> Result<Circuit> {
        let circuit = Circuit {
            neurons: self.neurons,
            synapses: self.synapses,
            ports: self.ports,
        };
        circuit.check()?;
        Ok(circuit)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    #[allow(clippy::identity_op)]
    fn firing_rule_matches_threshold_gate_cases() {
        let carry = Neuron {
            id: 0,
            threshold: 2,
            bias: 0,
        };
        assert!(carry.fires(1 + 1));

        let sum = Neuron {
            id: 1,
            threshold: 1,
            bias: 0,
        };
        assert!(!sum.fires(0));

        let parallel_carry = Neuron {
            id: 2,
            threshold: 4,
            bias: 0,
        };
        assert!(parallel_carry.fires(1 + 1 + 0 + 2));
    }

    #[test]
    fn builder_rejects_dangling_endpoints() {
        let mut cb = CircuitBuilder::new();
        let a = cb.add_neuron(1, 0);
        cb.connect(Source::Neuron(a), 7, 1, 1);
        assert!(matches!(cb.build(), Err(Error::DanglingNeuron(7))));
    }

    #[test]
    fn builder_rejects_zero_delay() {
        let mut cb = CircuitBuilder::new();
        let a = cb.add_neuron(1, 0);
        let b = cb.add_neuron(1, 0);
        cb.connect(Source::Neuron(a), b, 1, 0);
        assert!(matches!(cb.build(), Err(Error::ZeroDelay)));
    }

    #[test]
    fn builder_rejects_out_of_range_input_bit() {
        let mut cb = CircuitBuilder::new();
        let a = cb.add_neuron(1, 0);
        cb.add_input_port("x", 2);
        cb.connect(
            Source::Input {
                port: "x".into(),
                bit: 5,
            },
            a,
            1,
            1,
        );
        assert!(matches!(cb.build(), Err(Error::BitOutOfRange { .. })));
    }

    #[test]
    fn canonical_split_uses_second_group_for_large_powers() {
        assert_eq!(canonical_weight_split(1), (1, 0));
        assert_eq!(canonical_weight_split(-2), (-2, 0));
        assert_eq!(canonical_weight_split(1 << 5), (32, 0));
        assert_eq!(canonical_weight_split(1 << 12), (16, 8));
        assert_eq!(canonical_weight_split(1 << 15), (128, 8));
        // Too big for two 8-bit groups: stored raw, caught by validation.
        assert_eq!(canonical_weight_split(1 << 16), (1 << 16, 0));
    }

    #[test]
    fn json_round_trip_preserves_circuit() {
        let mut cb = CircuitBuilder::new();
        let a = cb.add_neuron(2, 0);
        let b = cb.add_neuron(1, -1);
        cb.add_input_port("x", 1);
        cb.connect(
            Source::Input {
                port: "x".into(),
                bit: 0,
            },
            a,
            1,
            1,
        );
        cb.connect(Source::Neuron(a), b, -2, 3);
        cb.set_output_port("out", vec![b]);
        let circuit = cb.build().unwrap();
        let text = circuit.to_json().unwrap();
        let back = Circuit::from_json(&text).unwrap();
        assert_eq!(circuit, back);
    }

    #[test]
    fn relay_splitting_respects_budget() {
        let mut cb = CircuitBuilder::new();
        let target = cb.add_neuron(1, 0);
        cb.add_input_port("x", 1);
        let pre = Source::Input {
            port: "x".into(),
            bit: 0,
        };
        // 100 steps with a 63-step cap needs one relay.
        let used = cb
            .connect_with_relays(pre.clone(), target, 1, 100, 63, 1)
            .unwrap();
        assert_eq!(used, 1);
        // 127 steps would need two.
        let err = cb.connect_with_relays(pre, target, 1, 127, 63, 1);
        assert!(matches!(err, Err(Error::DelayOverflow { .. })));
    }
}
