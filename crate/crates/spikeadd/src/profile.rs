//! End-to-end instrumentation of a single addition.
//!
//! The adder under test is wrapped in an I/O harness of 3n relay neurons:
//! one n-neuron group per operand to produce the input spikes and one
//! n-neuron group to collect the sums, which adds one step on each side of
//! the computation. All counters (spikes, synaptic events) include the
//! harness activity; a synaptic event is one delivery of one spike across
//! one synapse, i.e. spikes weighted by fan-out.

use num_bigint::BigUint;
use num_traits::One;
use serde::Serialize;

use crate::adders::{AdderDescriptor, AdderKind, PORT_OVERFLOW, PORT_SUM, PORT_X, PORT_Y};
use crate::circuit::{Circuit, CircuitBuilder, NeuronId, Source};
use crate::error::{Error, Result};
use crate::hw::{self, HardwareModel};
use crate::sim::Simulator;
use crate::verify::reference_add;

/// Output port of the harness's readout group.
pub const PORT_SUM_OUT: &str = "sum_out";

/// The operand that maximizes spike activity when added to itself:
/// `2^(n-1) - 1`, i.e. all bits but the top one set.
pub fn worst_case_operand(bits: u32) -> BigUint {
    (BigUint::one() << (bits - 1)) - BigUint::one()
}

/// Counters for one profiled addition.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProfileReport {
    pub adder: AdderKind,
    #[serde(rename = "n")]
    pub bits: u32,
    pub x: String,
    pub y: String,
    /// Adder latency plus the two I/O steps.
    pub total_steps: u32,
    /// Firing events in the harnessed run, input and output included.
    pub spikes: u64,
    /// Spike deliveries across synapses (spikes times fan-out).
    pub synaptic_events: u64,
    /// Neuron count including the 3n-neuron harness.
    pub neurons: u64,
    /// Synapse count of the adder circuit under test.
    pub synapses: u64,
    /// Core occupancy of the bare adder circuit.
    pub core_fraction: f64,
    pub result: String,
    pub overflow: bool,
    /// Whether the decoded result matched the integer reference.
    pub passed: bool,
    pub note: Option<String>,
}

pub const PROFILE_CSV_HEADER: &str =
    "adder,n,x,y,total_steps,spikes,synaptic_events,neurons,synapses,core_fraction,result,overflow,passed";

impl ProfileReport {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.adder,
            self.bits,
            self.x,
            self.y,
            self.total_steps,
            self.spikes,
            self.synaptic_events,
            self.neurons,
            self.synapses,
            self.core_fraction,
            self.result,
            self.overflow,
            self.passed
        )
    }
}

/// An adder wrapped in its 3n-neuron I/O harness.
#[derive(Debug, Clone)]
pub struct Harness {
    pub circuit: Circuit,
    /// Step at which the readout group fires, counting injection as 0.
    pub sum_step: u32,
    /// Step at which the overflow port fires.
    pub overflow_step: u32,
    pub horizon: u32,
}

/// Wraps the adder with input and readout relay groups. The relays shift
/// the adder's own timeline one step late, so the readout fires at
/// `latency + 2`.
pub fn harness(descriptor: &AdderDescriptor) -> Result<Harness> {
    let base = &descriptor.circuit;
    let n = descriptor.bits;
    let mut cb = CircuitBuilder::new();
    for neuron in base.neurons() {
        cb.add_neuron(neuron.threshold, neuron.bias);
    }
    let relay_group = |cb: &mut CircuitBuilder| -> Vec<NeuronId> {
        (0..n).map(|_| cb.add_neuron(1, 0)).collect()
    };
    let x_relays = relay_group(&mut cb);
    let y_relays = relay_group(&mut cb);
    let out_relays = relay_group(&mut cb);

    cb.add_input_port(PORT_X, n);
    cb.add_input_port(PORT_Y, n);
    for bit in 0..n {
        for (port, relays) in [(PORT_X, &x_relays), (PORT_Y, &y_relays)] {
            cb.connect(
                Source::Input {
                    port: port.to_string(),
                    bit,
                },
                relays[bit as usize],
                1,
                1,
            );
        }
    }

    // The adder's own synapses, with input-port sources rerouted through
    // the input relays.
    for synapse in base.synapses() {
        let pre = match &synapse.pre {
            Source::Input { port, bit } => {
                let relays = match port.as_str() {
                    PORT_X => &x_relays,
                    PORT_Y => &y_relays,
                    other => return Err(Error::UnknownPort(other.to_string())),
                };
                Source::Neuron(relays[*bit as usize])
            }
            Source::Neuron(id) => Source::Neuron(*id),
        };
        let mut copy = synapse.clone();
        copy.pre = pre;
        cb.connect_quantized(copy);
    }

    for (bit, sum_id) in base.output_port(PORT_SUM)?.iter().enumerate() {
        cb.connect(Source::Neuron(*sum_id), out_relays[bit], 1, 1);
    }

    for (name, ids) in &base.ports().outputs {
        cb.set_output_port(name, ids.clone());
    }
    cb.set_output_port(PORT_SUM_OUT, out_relays);

    let sum_step = descriptor.latency + 2;
    Ok(Harness {
        circuit: cb.build()?,
        sum_step,
        overflow_step: descriptor.latency,
        horizon: sum_step + 1,
    })
}

/// Runs one addition through the harnessed adder and reports all counters.
/// A result disagreeing with the integer reference, or any off-schedule
/// output spike, marks the report as failed rather than erroring.
pub fn profile(
    descriptor: &AdderDescriptor,
    x: &BigUint,
    y: &BigUint,
    hw: &HardwareModel,
) -> Result<ProfileReport> {
    let harnessed = harness(descriptor)?;
    let sim = Simulator::new(&harnessed.circuit);
    let mut schedule = crate::sim::InputSchedule::new();
    crate::encoding::encode_uint(x, descriptor.bits)?.schedule_into(&mut schedule, 0, PORT_X);
    crate::encoding::encode_uint(y, descriptor.bits)?.schedule_into(&mut schedule, 0, PORT_Y);
    let record = sim.run(&schedule, harnessed.horizon)?;

    let out_degrees = sim.out_degrees();
    let spikes = record.events().len() as u64;
    let synaptic_events: u64 = record
        .events()
        .iter()
        .map(|e| out_degrees[e.neuron as usize] as u64)
        .sum();

    let mut note = None;
    let mut value = BigUint::from(0u32);
    for (bit, fired) in record
        .port_bits(PORT_SUM_OUT, harnessed.sum_step)?
        .iter()
        .enumerate()
    {
        if *fired {
            value |= BigUint::one() << bit;
        }
    }
    let readout_ids = record.output_ports()[PORT_SUM_OUT].clone();
    for event in record.events() {
        if event.step != harnessed.sum_step && readout_ids.contains(&event.neuron) {
            note = Some(format!(
                "spurious readout spike: neuron {} at step {}",
                event.neuron, event.step
            ));
        }
    }
    let overflow = record
        .port_bits(PORT_OVERFLOW, harnessed.overflow_step)?
        .iter()
        .any(|b| *b);

    let (expected, expected_overflow) = reference_add(x, y, descriptor.bits)?;
    let passed = note.is_none() && value == expected && overflow == expected_overflow;

    Ok(ProfileReport {
        adder: descriptor.kind,
        bits: descriptor.bits,
        x: x.to_string(),
        y: y.to_string(),
        total_steps: descriptor.latency + 2,
        spikes,
        synaptic_events,
        neurons: harnessed.circuit.neuron_count() as u64,
        synapses: descriptor.circuit.synapse_count() as u64,
        core_fraction: hw::core_usage(&descriptor.circuit, hw),
        result: value.to_string(),
        overflow,
        passed,
        note,
    })
}
