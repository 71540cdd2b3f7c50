//! Cycle-exact, deterministic simulation of threshold-gate circuits.
//!
//! The only state carried between steps is the set of in-flight delayed
//! spikes; membrane sums are rebuilt from scratch every step. A spike
//! emitted at step `s` over a synapse with delay `d` arrives at `s + d`,
//! and a neuron fires at step `t` iff the weights arriving at `t` plus its
//! bias reach its threshold. Identical inputs therefore always produce
//! identical spike records.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::io::Write;

use crate::circuit::{Circuit, NeuronId, Source};
use crate::error::{Error, Result};

/// Spikes to inject on input ports, as `(step, port, bit)` triples.
/// Duplicate entries collapse to a single spike.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct InputSchedule {
    spikes: BTreeSet<(u32, String, u32)>,
}

impl InputSchedule {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn spike(&mut self, step: u32, port: &str, bit: u32) -> &mut Self {
        self.spikes.insert((step, port.to_string(), bit));
        self
    }

    /// Merges another schedule, shifting every spike by `offset` steps.
    pub fn merge_shifted(&mut self, other: &InputSchedule, offset: u32) {
        for (step, port, bit) in &other.spikes {
            self.spikes.insert((*step + offset, port.clone(), *bit));
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, &str, u32)> {
        self.spikes.iter().map(|(s, p, b)| (*s, p.as_str(), *b))
    }

    pub fn is_empty(&self) -> bool {
        self.spikes.is_empty()
    }
}

/// One firing event.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct SpikeEvent {
    pub step: u32,
    pub neuron: NeuronId,
}

/// The full deterministic history of a run: which neuron fired at which
/// step, plus the output port map of the circuit that produced it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpikeRecord {
    horizon: u32,
    events: Vec<SpikeEvent>,
    output_ports: BTreeMap<String, Vec<NeuronId>>,
}

impl SpikeRecord {
    pub fn horizon(&self) -> u32 {
        self.horizon
    }

    /// All events, sorted by `(step, neuron)`.
    pub fn events(&self) -> &[SpikeEvent] {
        &self.events
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn fired(&self, step: u32, neuron: NeuronId) -> bool {
        self.events
            .binary_search(&SpikeEvent { step, neuron })
            .is_ok()
    }

    /// Events of a single step.
    pub fn fired_at(&self, step: u32) -> &[SpikeEvent] {
        let lo = self.events.partition_point(|e| e.step < step);
        let hi = self.events.partition_point(|e| e.step <= step);
        &self.events[lo..hi]
    }

    /// Steps at which a given neuron fired.
    pub fn steps_of(&self, neuron: NeuronId) -> Vec<u32> {
        self.events
            .iter()
            .filter(|e| e.neuron == neuron)
            .map(|e| e.step)
            .collect()
    }

    /// Per-step view of a named output port: one bit per port position.
    pub fn port_bits(&self, port: &str, step: u32) -> Result<Vec<bool>> {
        if step >= self.horizon {
            return Err(Error::StepOutOfRange {
                step,
                horizon: self.horizon,
            });
        }
        let ids = self
            .output_ports
            .get(port)
            .ok_or_else(|| Error::UnknownPort(port.to_string()))?;
        Ok(ids.iter().map(|id| self.fired(step, *id)).collect())
    }

    /// Steps at which any neuron of the port fired.
    pub fn port_activity(&self, port: &str) -> Result<Vec<u32>> {
        let ids = self
            .output_ports
            .get(port)
            .ok_or_else(|| Error::UnknownPort(port.to_string()))?;
        let mut steps: Vec<u32> = self
            .events
            .iter()
            .filter(|e| ids.contains(&e.neuron))
            .map(|e| e.step)
            .collect();
        steps.sort_unstable();
        steps.dedup();
        Ok(steps)
    }

    pub fn output_ports(&self) -> &BTreeMap<String, Vec<NeuronId>> {
        &self.output_ports
    }

    /// Writes the record as CSV with columns `step,neuron_id`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "step,neuron_id")?;
        for event in &self.events {
            writeln!(out, "{},{}", event.step, event.neuron)?;
        }
        Ok(())
    }
}

/// Resolved synapse end: target, effective weight, delay.
type Edge = (NeuronId, i64, u32);

/// Pre-resolved adjacency for one circuit, reusable across many runs.
pub struct Simulator<'c> {
    circuit: &'c Circuit,
    /// Outgoing edges per neuron.
    neuron_out: Vec<Vec<Edge>>,
    /// Outgoing edges per input bit.
    input_out: HashMap<(String, u32), Vec<Edge>>,
    /// Neurons that fire on bias alone, with no synaptic input.
    self_firing: Vec<NeuronId>,
    ring_len: usize,
}

impl<'c> Simulator<'c> {
    pub fn new(circuit: &'c Circuit) -> Self {
        let n = circuit.neuron_count();
        let mut neuron_out: Vec<Vec<Edge>> = vec![Vec::new(); n];
        let mut input_out: HashMap<(String, u32), Vec<Edge>> = HashMap::new();
        for synapse in circuit.synapses() {
            let edge = (synapse.post, synapse.weight(), synapse.delay);
            match &synapse.pre {
                Source::Neuron(id) => neuron_out[*id as usize].push(edge),
                Source::Input { port, bit } => input_out
                    .entry((port.clone(), *bit))
                    .or_default()
                    .push(edge),
            }
        }
        let self_firing = circuit
            .neurons()
            .iter()
            .filter(|nr| nr.bias >= nr.threshold)
            .map(|nr| nr.id)
            .collect();
        let ring_len = circuit.max_delay() as usize + 1;
        Simulator {
            circuit,
            neuron_out,
            input_out,
            self_firing,
            ring_len,
        }
    }

    pub fn circuit(&self) -> &Circuit {
        self.circuit
    }

    /// Out-degree of each neuron, used for synaptic event accounting.
    pub fn out_degrees(&self) -> Vec<usize> {
        self.neuron_out.iter().map(Vec::len).collect()
    }

    /// Starts an incremental run. The returned [`Run`] owns all mutable
    /// state (delay lines, step counter) and is tied to this simulator,
    /// so it can only ever be advanced against the circuit it came from.
    pub fn begin(&self, schedule: &InputSchedule, horizon: u32) -> Result<Run<'_, 'c>> {
        // Group injections by emission step, validating ports up front.
        let mut injections: BTreeMap<u32, Vec<(String, u32)>> = BTreeMap::new();
        for (step, port, bit) in schedule.iter() {
            let width = self.circuit.input_width(port)?;
            if bit >= width {
                return Err(Error::BitOutOfRange {
                    port: port.to_string(),
                    bit,
                    width,
                });
            }
            injections
                .entry(step)
                .or_default()
                .push((port.to_string(), bit));
        }
        let n = self.circuit.neuron_count();
        Ok(Run {
            sim: self,
            injections,
            horizon,
            step: 0,
            ring: vec![Vec::new(); self.ring_len],
            sums: vec![0i64; n],
            dirty: vec![false; n],
            touched: Vec::new(),
            fired: Vec::new(),
            events: Vec::new(),
        })
    }

    /// Runs the circuit for steps `0..horizon` and records every firing.
    pub fn run(&self, schedule: &InputSchedule, horizon: u32) -> Result<SpikeRecord> {
        let mut run = self.begin(schedule, horizon)?;
        while run.step().is_some() {}
        Ok(run.finish())
    }
}

/// One in-flight simulation: the delay lines and the step counter. The
/// only state carried from step to step is the in-flight spikes; membrane
/// sums are cleared as part of every step.
pub struct Run<'s, 'c> {
    sim: &'s Simulator<'c>,
    injections: BTreeMap<u32, Vec<(String, u32)>>,
    horizon: u32,
    step: u32,
    ring: Vec<Vec<(NeuronId, i64)>>,
    sums: Vec<i64>,
    dirty: Vec<bool>,
    touched: Vec<NeuronId>,
    fired: Vec<NeuronId>,
    events: Vec<SpikeEvent>,
}

impl Run<'_, '_> {
    /// The step index the next call to [`step`](Self::step) will execute.
    pub fn next_step(&self) -> u32 {
        self.step
    }

    /// Executes one time step: applies the spikes arriving now, fires
    /// every neuron whose arrivals plus bias reach its threshold, clears
    /// all membrane sums, and queues the fired spikes on their synapses.
    /// Returns the sorted fired set, or `None` past the horizon.
    pub fn step(&mut self) -> Option<&[NeuronId]> {
        if self.step >= self.horizon {
            return None;
        }
        let step = self.step;
        let ring_len = self.ring.len();
        let neurons = self.sim.circuit.neurons();

        let slot = step as usize % ring_len;
        for (id, weight) in self.ring[slot].drain(..) {
            if !self.dirty[id as usize] {
                self.dirty[id as usize] = true;
                self.touched.push(id);
            }
            self.sums[id as usize] += weight;
        }

        self.fired.clear();
        for &id in &self.touched {
            if neurons[id as usize].fires(self.sums[id as usize]) {
                self.fired.push(id);
            }
        }
        for &id in &self.sim.self_firing {
            if !self.dirty[id as usize] {
                self.fired.push(id);
            }
        }
        for &id in &self.touched {
            self.sums[id as usize] = 0;
            self.dirty[id as usize] = false;
        }
        self.touched.clear();
        self.fired.sort_unstable();

        for &id in &self.fired {
            self.events.push(SpikeEvent { step, neuron: id });
            for &(post, weight, delay) in &self.sim.neuron_out[id as usize] {
                let arrival = step + delay;
                if arrival < self.horizon {
                    self.ring[arrival as usize % ring_len].push((post, weight));
                }
            }
        }

        if let Some(emitted) = self.injections.get(&step) {
            for (port, bit) in emitted {
                if let Some(edges) = self.sim.input_out.get(&(port.clone(), *bit)) {
                    for &(post, weight, delay) in edges {
                        let arrival = step + delay;
                        if arrival < self.horizon {
                            self.ring[arrival as usize % ring_len].push((post, weight));
                        }
                    }
                }
            }
        }

        self.step += 1;
        Some(&self.fired)
    }

    /// Closes the run and returns the accumulated record.
    pub fn finish(self) -> SpikeRecord {
        SpikeRecord {
            horizon: self.step,
            events: self.events,
            output_ports: self.sim.circuit.ports().outputs.clone(),
        }
    }
}

/// One-shot convenience wrapper around [`Simulator::run`].
pub fn run(circuit: &Circuit, schedule: &InputSchedule, horizon: u32) -> Result<SpikeRecord> {
    Simulator::new(circuit).run(schedule, horizon)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::CircuitBuilder;

    fn single_neuron_circuit(delay: u32) -> Circuit {
        let mut cb = CircuitBuilder::new();
        let a = cb.add_neuron(1, 0);
        cb.add_input_port("in", 1);
        cb.connect(
            Source::Input {
                port: "in".into(),
                bit: 0,
            },
            a,
            1,
            delay,
        );
        cb.set_output_port("out", vec![a]);
        cb.build().unwrap()
    }

    #[test]
    fn single_hop_propagation_fires_after_delay_one() {
        let circuit = single_neuron_circuit(1);
        let mut schedule = InputSchedule::new();
        schedule.spike(0, "in", 0);
        let record = run(&circuit, &schedule, 4).unwrap();
        assert_eq!(record.steps_of(0), vec![1]);
    }

    #[test]
    fn delay_five_arrives_at_step_five() {
        let circuit = single_neuron_circuit(5);
        let mut schedule = InputSchedule::new();
        schedule.spike(0, "in", 0);
        let record = run(&circuit, &schedule, 8).unwrap();
        assert_eq!(record.steps_of(0), vec![5]);
    }

    #[test]
    fn negative_weight_suppresses_firing() {
        let mut cb = CircuitBuilder::new();
        let a = cb.add_neuron(1, 0);
        cb.add_input_port("in", 2);
        cb.connect(
            Source::Input {
                port: "in".into(),
                bit: 0,
            },
            a,
            1,
            1,
        );
        cb.connect(
            Source::Input {
                port: "in".into(),
                bit: 1,
            },
            a,
            -2,
            1,
        );
        let circuit = cb.build().unwrap();
        let mut schedule = InputSchedule::new();
        schedule.spike(0, "in", 0).spike(0, "in", 1);
        let record = run(&circuit, &schedule, 3).unwrap();
        assert!(record.is_empty());
    }

    #[test]
    fn empty_schedule_without_positive_bias_stays_silent() {
        let circuit = single_neuron_circuit(1);
        let record = run(&circuit, &InputSchedule::new(), 10).unwrap();
        assert!(record.is_empty());
    }

    #[test]
    fn bias_at_threshold_fires_every_step() {
        let mut cb = CircuitBuilder::new();
        let a = cb.add_neuron(1, 1);
        cb.set_output_port("out", vec![a]);
        let circuit = cb.build().unwrap();
        let record = run(&circuit, &InputSchedule::new(), 3).unwrap();
        assert_eq!(record.steps_of(0), vec![0, 1, 2]);
    }

    #[test]
    fn unknown_port_is_rejected() {
        let circuit = single_neuron_circuit(1);
        let mut schedule = InputSchedule::new();
        schedule.spike(0, "nope", 0);
        assert!(matches!(
            run(&circuit, &schedule, 2),
            Err(Error::UnknownPort(_))
        ));
    }

    #[test]
    fn identical_inputs_yield_identical_records() {
        let circuit = single_neuron_circuit(2);
        let mut schedule = InputSchedule::new();
        schedule.spike(0, "in", 0).spike(3, "in", 0);
        let a = run(&circuit, &schedule, 10).unwrap();
        let b = run(&circuit, &schedule, 10).unwrap();
        assert_eq!(a, b);
        let mut csv_a = Vec::new();
        let mut csv_b = Vec::new();
        a.write_csv(&mut csv_a).unwrap();
        b.write_csv(&mut csv_b).unwrap();
        assert_eq!(csv_a, csv_b);
    }

    #[test]
    fn stepping_api_walks_the_wavefront() {
        // A three-relay chain: the spike front advances one neuron per
        // step, and nothing else ever fires.
        let mut cb = CircuitBuilder::new();
        let a = cb.add_neuron(1, 0);
        let b = cb.add_neuron(1, 0);
        let c = cb.add_neuron(1, 0);
        cb.add_input_port("in", 1);
        cb.connect(
            Source::Input {
                port: "in".into(),
                bit: 0,
            },
            a,
            1,
            1,
        );
        cb.connect(Source::Neuron(a), b, 1, 1);
        cb.connect(Source::Neuron(b), c, 1, 1);
        cb.set_output_port("out", vec![c]);
        let circuit = cb.build().unwrap();

        let sim = Simulator::new(&circuit);
        let mut schedule = InputSchedule::new();
        schedule.spike(0, "in", 0);
        let mut run = sim.begin(&schedule, 5).unwrap();
        let mut waves = Vec::new();
        while let Some(fired) = run.step() {
            waves.push(fired.to_vec());
        }
        assert_eq!(
            waves,
            vec![vec![], vec![a], vec![b], vec![c], vec![]]
        );
        let record = run.finish();
        assert_eq!(record.horizon(), 5);
        assert_eq!(record.events().len(), 3);
    }

    #[test]
    fn spike_record_csv_format() {
        let circuit = single_neuron_circuit(1);
        let mut schedule = InputSchedule::new();
        schedule.spike(0, "in", 0);
        let record = run(&circuit, &schedule, 3).unwrap();
        let mut csv = Vec::new();
        record.write_csv(&mut csv).unwrap();
        assert_eq!(String::from_utf8(csv).unwrap(), "step,neuron_id\n1,0\n");
    }
}
