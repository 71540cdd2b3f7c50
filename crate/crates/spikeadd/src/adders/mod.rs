//! Generators for the three spiking binary adders.
//!
//! All three designs share the same interface: two `n`-bit input ports
//! (`x`, `y`), an `n`-bit `sum` output port, and a single-bit `overflow`
//! port wired to the most significant carry neuron. They differ in how the
//! carries are computed:
//!
//! * [`Sequential`](AdderKind::Sequential) ripples the carry one position
//!   per time step and synchronizes everything with synaptic delays;
//!   latency grows linearly with the bit width.
//! * [`Dcta2`](AdderKind::Dcta2) computes every carry in a single neuron
//!   with exponentially growing weights; depth 2, constant latency.
//! * [`Dcta3`](AdderKind::Dcta3) splits the bits into roughly-sqrt(n)
//!   groups, derives generate/propagate signals per group, and combines
//!   them into carries; depth 3, constant latency, smaller weights.
//!
//! Every builder emits synchronized outputs: all sum spikes land on one
//! step, and the overflow neuron fires exactly one step earlier.

mod dcta2;
mod dcta3;
mod sequential;

pub use dcta3::{partition_groups, GroupPartition};

use std::fmt;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, CircuitBuilder, NeuronId, Source};
use crate::encoding::{self, encode_uint};
use crate::error::{Error, Result};
use crate::hw::{self, HardwareModel};
use crate::sim::{InputSchedule, Simulator, SpikeRecord};

pub const PORT_X: &str = "x";
pub const PORT_Y: &str = "y";
pub const PORT_SUM: &str = "sum";
pub const PORT_OVERFLOW: &str = "overflow";
pub const PORT_CARRY: &str = "carry";
pub const PORT_GENERATE: &str = "generate";
pub const PORT_PROPAGATE: &str = "propagate";

/// The three adder circuit families.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, clap::ValueEnum,
)]
#[serde(rename_all = "lowercase")]
pub enum AdderKind {
    Sequential,
    Dcta2,
    Dcta3,
}

impl AdderKind {
    pub const ALL: [AdderKind; 3] = [AdderKind::Sequential, AdderKind::Dcta2, AdderKind::Dcta3];

    pub fn name(&self) -> &'static str {
        match self {
            AdderKind::Sequential => "sequential",
            AdderKind::Dcta2 => "dcta2",
            AdderKind::Dcta3 => "dcta3",
        }
    }
}

impl fmt::Display for AdderKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for AdderKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "sequential" => Ok(AdderKind::Sequential),
            "dcta2" => Ok(AdderKind::Dcta2),
            "dcta3" => Ok(AdderKind::Dcta3),
            other => Err(format!("unknown adder kind `{other}`")),
        }
    }
}

/// What to build: an adder kind, a bit width, and build options.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdderConfig {
    pub kind: AdderKind,
    pub bits: u32,
    /// Layers of relay neurons available to the sequential adder for
    /// stretching synaptic delays beyond the hardware cap. Ignored by the
    /// parallel adders.
    pub relay_layers: u32,
    /// Give every neuron its own exact threshold instead of sharing one
    /// threshold per group with bias offsets. Only affects the DCTA3
    /// builder, where it trades the bias limit for the weight limit.
    pub per_neuron_thresholds: bool,
}

impl AdderConfig {
    pub fn new(kind: AdderKind, bits: u32) -> Self {
        AdderConfig {
            kind,
            bits,
            relay_layers: 0,
            per_neuron_thresholds: false,
        }
    }

    pub fn relay_layers(mut self, layers: u32) -> Self {
        self.relay_layers = layers;
        self
    }

    pub fn per_neuron_thresholds(mut self, enabled: bool) -> Self {
        self.per_neuron_thresholds = enabled;
        self
    }

    pub fn with_bits(&self, bits: u32) -> Self {
        AdderConfig {
            bits,
            ..self.clone()
        }
    }

    /// Builds the circuit and checks it against the hardware model.
    /// The first violated limit is returned as a typed error.
    pub fn build(&self, hw: &HardwareModel) -> Result<AdderDescriptor> {
        let descriptor = self.build_unvalidated(hw)?;
        let report = hw::validate(&descriptor.circuit, hw);
        if let Some(violation) = report.violations.first() {
            return Err(match violation.limit {
                hw::LimitKind::DelayExceeded => Error::DelayOverflow {
                    required: violation.required as u32,
                    available: hw.max_delay * (self.relay_layers + 1),
                    relay_layers: self.relay_layers,
                },
                hw::LimitKind::WeightOverflow => Error::WeightOverflow {
                    weight: violation.required,
                },
                hw::LimitKind::BiasExceeded => Error::BiasOverflow {
                    bias: violation.required,
                    limit: violation.allowed,
                },
            });
        }
        Ok(descriptor)
    }

    /// Builds the circuit without hardware validation, so that
    /// out-of-range configurations can still be inspected and fed to
    /// [`hw::validate`]. Construction itself can still fail, e.g. when a
    /// relay budget cannot realize a delay plan.
    pub fn build_unvalidated(&self, hw: &HardwareModel) -> Result<AdderDescriptor> {
        if self.bits == 0 {
            return Err(Error::ZeroBitWidth);
        }
        match self.kind {
            AdderKind::Sequential => sequential::construct(self.bits, self.relay_layers, hw),
            AdderKind::Dcta2 => dcta2::construct(self.bits),
            AdderKind::Dcta3 => dcta3::construct(self.bits, self.per_neuron_thresholds),
        }
    }
}

/// A built adder: its circuit, ports, and timing metadata.
#[derive(Debug, Clone, Serialize)]
pub struct AdderDescriptor {
    pub kind: AdderKind,
    #[serde(rename = "n")]
    pub bits: u32,
    /// Steps from input injection to the synchronized sum spikes.
    pub latency: u32,
    pub relay_layers: u32,
    pub per_neuron_thresholds: bool,
    pub circuit: Circuit,
    #[serde(skip)]
    pub partition: Option<GroupPartition>,
}

impl AdderDescriptor {
    /// Input schedule that injects the two operands at step `t0`.
    pub fn schedule_inputs(&self, x: &BigUint, y: &BigUint, t0: u32) -> Result<InputSchedule> {
        let mut schedule = InputSchedule::new();
        encode_uint(x, self.bits)?.schedule_into(&mut schedule, t0, PORT_X);
        encode_uint(y, self.bits)?.schedule_into(&mut schedule, t0, PORT_Y);
        Ok(schedule)
    }

    /// Step at which the sum port fires for operands injected at `t0`.
    pub fn output_step(&self, t0: u32) -> u32 {
        t0 + self.latency
    }

    /// Smallest horizon covering an addition injected at `t0`.
    pub fn horizon(&self, t0: u32) -> u32 {
        self.output_step(t0) + 1
    }

    /// Runs one addition end to end and decodes `(sum mod 2^n, overflow)`.
    pub fn add(&self, x: &BigUint, y: &BigUint) -> Result<(BigUint, bool)> {
        self.add_with(&Simulator::new(&self.circuit), x, y)
    }

    /// Like [`add`](Self::add) but reuses a prepared simulator, which is
    /// worth it when running many additions on the same circuit. The
    /// simulator must have been built from this descriptor's circuit.
    pub fn add_with(&self, sim: &Simulator, x: &BigUint, y: &BigUint) -> Result<(BigUint, bool)> {
        let record = self.run_with(sim, x, y, 0)?;
        self.decode(&record, 0)
    }

    /// Runs one addition injected at `t0` and returns the raw record.
    pub fn run_with(
        &self,
        sim: &Simulator,
        x: &BigUint,
        y: &BigUint,
        t0: u32,
    ) -> Result<SpikeRecord> {
        let schedule = self.schedule_inputs(x, y, t0)?;
        sim.run(&schedule, self.horizon(t0))
    }

    /// Strictly decodes the result of an addition injected at `t0`.
    pub fn decode(&self, record: &SpikeRecord, t0: u32) -> Result<(BigUint, bool)> {
        encoding::decode_output(record, PORT_SUM, PORT_OVERFLOW, self.output_step(t0))
    }

    /// Closed-form resource counts for this adder's configuration.
    pub fn theoretical(&self) -> Resources {
        theoretical_resources(self.kind, self.bits)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Published time/neuron/synapse figures for one adder at one bit width.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Resources {
    pub time_steps: u32,
    pub neurons: u64,
    pub synapses: u64,
    /// False when the synapse count comes from the constructed partition
    /// rather than the closed form (DCTA3 at non-square widths).
    pub closed_form: bool,
}

/// Closed-form resource counts:
///
/// | adder      | time  | neurons | synapses            |
/// |------------|-------|---------|---------------------|
/// | sequential | n + 1 | 2n      | 7n - 2              |
/// | dcta2      | 2     | 2n      | n^2 + 5n - 1        |
/// | dcta3      | 3     | 4n      | 3n*sqrt(n) + 7n - 1 |
///
/// The DCTA3 synapse formula is exact only for perfect-square `n`; for
/// other widths the exact count of the constructed partition is returned
/// and `closed_form` is false.
pub fn theoretical_resources(kind: AdderKind, bits: u32) -> Resources {
    assert!(bits >= 1, "adders need at least one bit");
    let n = bits as u64;
    match kind {
        AdderKind::Sequential => Resources {
            time_steps: bits + 1,
            neurons: 2 * n,
            synapses: 7 * n - 2,
            closed_form: true,
        },
        AdderKind::Dcta2 => Resources {
            time_steps: 2,
            neurons: 2 * n,
            synapses: n * n + 5 * n - 1,
            closed_form: true,
        },
        AdderKind::Dcta3 => {
            let partition = partition_groups(bits);
            let mut synapses = 4 * n - 1;
            for (group, size) in partition.group_sizes().iter().enumerate() {
                let s = *size as u64;
                // Generate and propagate trees over the group's inputs.
                synapses += 2 * s * (s + 1);
                // Carries: own generate/propagate plus one pair per less
                // significant group.
                synapses += s * 2 * (group as u64 + 1);
            }
            let root = partition.group_count() as u64;
            let closed_form = root * root == n;
            Resources {
                time_steps: 3,
                neurons: 4 * n,
                synapses,
                closed_form,
            }
        }
    }
}

/// How a builder realizes long synaptic delays.
#[derive(Debug, Clone, Copy)]
pub(crate) enum DelayPolicy {
    /// Emit the planned delay as-is; validation flags anything overlong.
    Direct,
    /// Split delays longer than `max_delay` through relay neurons, at most
    /// `budget` relays per connection.
    Relays { max_delay: u32, budget: u32 },
}

impl DelayPolicy {
    pub(crate) fn connect(
        &self,
        cb: &mut CircuitBuilder,
        pre: Source,
        post: NeuronId,
        weight: i64,
        delay: u32,
    ) -> Result<()> {
        match self {
            DelayPolicy::Direct => {
                cb.connect(pre, post, weight, delay);
                Ok(())
            }
            DelayPolicy::Relays { max_delay, budget } => {
                cb.connect_with_relays(pre, post, weight, delay, *max_delay, *budget)?;
                Ok(())
            }
        }
    }
}

/// Adds the `n` sum gates shared by every adder design.
///
/// Sum neuron `i` has threshold 1 and receives weight +1 from `x[i]`,
/// `y[i]` and the carry into position `i`, and weight -2 from the carry
/// out of position `i`; position 0 has no carry-in. The supplied delay
/// plan must make all arrivals for one sum land on the same step.
pub(crate) fn attach_sum_gates(
    cb: &mut CircuitBuilder,
    n: u32,
    carries: &[NeuronId],
    policy: DelayPolicy,
    input_delay: impl Fn(u32) -> u32,
    carry_in_delay: impl Fn(u32) -> u32,
    carry_out_delay: impl Fn(u32) -> u32,
) -> Result<Vec<NeuronId>> {
    assert_eq!(carries.len(), n as usize);
    let mut sums = Vec::with_capacity(n as usize);
    for bit in 0..n {
        let sum = cb.add_neuron(1, 0);
        for port in [PORT_X, PORT_Y] {
            policy.connect(
                cb,
                Source::Input {
                    port: port.to_string(),
                    bit,
                },
                sum,
                1,
                input_delay(bit),
            )?;
        }
        if bit > 0 {
            policy.connect(
                cb,
                Source::Neuron(carries[bit as usize - 1]),
                sum,
                1,
                carry_in_delay(bit),
            )?;
        }
        policy.connect(
            cb,
            Source::Neuron(carries[bit as usize]),
            sum,
            -2,
            carry_out_delay(bit),
        )?;
        sums.push(sum);
    }
    Ok(sums)
}

/// Convenience wrappers using the supplied hardware model.
pub fn build_sequential(
    bits: u32,
    relay_layers: u32,
    hw: &HardwareModel,
) -> Result<AdderDescriptor> {
    AdderConfig::new(AdderKind::Sequential, bits)
        .relay_layers(relay_layers)
        .build(hw)
}

pub fn build_dcta2(bits: u32, hw: &HardwareModel) -> Result<AdderDescriptor> {
    AdderConfig::new(AdderKind::Dcta2, bits).build(hw)
}

pub fn build_dcta3(bits: u32, hw: &HardwareModel) -> Result<AdderDescriptor> {
    AdderConfig::new(AdderKind::Dcta3, bits).build(hw)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::{self, InputSchedule};

    /// Drives one sum gate through all interesting carry combinations.
    /// Stub neurons stand in for the carry chain, fired from extra ports.
    #[test]
    fn sum_gate_truth_table() {
        let n = 2u32;
        let mut cb = CircuitBuilder::new();
        cb.add_input_port(PORT_X, n);
        cb.add_input_port(PORT_Y, n);
        cb.add_input_port("carry_drive", n);
        let mut carries = Vec::new();
        for bit in 0..n {
            let stub = cb.add_neuron(1, 0);
            cb.connect(
                Source::Input {
                    port: "carry_drive".into(),
                    bit,
                },
                stub,
                1,
                1,
            );
            carries.push(stub);
        }
        // Stubs fire at step 1; sums must see everything at step 2.
        let sums = attach_sum_gates(
            &mut cb,
            n,
            &carries,
            DelayPolicy::Direct,
            |_| 2,
            |_| 1,
            |_| 1,
        )
        .unwrap();
        let observed = sums[1];
        cb.set_output_port(PORT_SUM, sums);
        let circuit = cb.build().unwrap();

        // (x1, y1, carry_in, carry_out) -> sum bit 1 fires?
        let cases = [
            ((1, 0, 0, 0), true),  // one input alone
            ((1, 1, 0, 1), false), // 1 + 1 - 2 = 0
            ((1, 1, 1, 1), true),  // all three plus carry out: 1
        ];
        for ((x1, y1, cin, cout), expected) in cases {
            let mut schedule = InputSchedule::new();
            if x1 == 1 {
                schedule.spike(0, PORT_X, 1);
            }
            if y1 == 1 {
                schedule.spike(0, PORT_Y, 1);
            }
            if cin == 1 {
                schedule.spike(0, "carry_drive", 0);
            }
            if cout == 1 {
                schedule.spike(0, "carry_drive", 1);
            }
            let record = sim::run(&circuit, &schedule, 3).unwrap();
            assert_eq!(
                record.fired(2, observed),
                expected,
                "case ({x1}, {y1}, {cin}, {cout})"
            );
        }
    }

    #[test]
    fn resource_formula_examples() {
        let r = theoretical_resources(AdderKind::Sequential, 8);
        assert_eq!((r.time_steps, r.neurons, r.synapses), (9, 16, 54));
        let r = theoretical_resources(AdderKind::Dcta2, 16);
        assert_eq!((r.time_steps, r.neurons, r.synapses), (2, 32, 335));
        let r = theoretical_resources(AdderKind::Dcta3, 25);
        assert_eq!((r.time_steps, r.neurons, r.synapses), (3, 100, 549));
        assert!(r.closed_form);
    }

    #[test]
    fn kind_names_round_trip() {
        for kind in AdderKind::ALL {
            assert_eq!(kind.name().parse::<AdderKind>().unwrap(), kind);
        }
        assert!("ripple".parse::<AdderKind>().is_err());
    }
}
