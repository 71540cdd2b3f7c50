//! Build a small threshold-gate circuit by hand, run it, and dump the
//! spike record.
//!
//! ```sh
//! cargo run -p spikeadd --example run_simulator
//! ```

use spikeadd::circuit::{CircuitBuilder, Source};
use spikeadd::sim::{self, InputSchedule};

fn main() -> spikeadd::Result<()> {
    // A gate that fires when at least two of its three inputs spike,
    // and a follower that vetoes it with an inhibitory synapse.
    let mut cb = CircuitBuilder::new();
    let majority = cb.add_neuron(2, 0);
    let follower = cb.add_neuron(1, 0);
    cb.add_input_port("in", 3);
    for bit in 0..3 {
        cb.connect(
            Source::Input {
                port: "in".into(),
                bit,
            },
            majority,
            1,
            1,
        );
    }
    cb.connect(Source::Neuron(majority), follower, 1, 2);
    cb.connect(
        Source::Input {
            port: "in".into(),
            bit: 0,
        },
        follower,
        -2,
        3,
    );
    cb.set_output_port("out", vec![majority, follower]);
    let circuit = cb.build()?;

    println!("circuit JSON:\n{}\n", circuit.to_json()?);

    // Two of three inputs spike at step 0: the majority gate fires at 1.
    // Its spike reaches the follower at step 3, where the inhibitory
    // synapse from input 0 cancels it.
    let mut schedule = InputSchedule::new();
    schedule.spike(0, "in", 0).spike(0, "in", 1);
    let record = sim::run(&circuit, &schedule, 6)?;

    println!("spike record (step,neuron_id):");
    let mut csv = Vec::new();
    record.write_csv(&mut csv)?;
    print!("{}", String::from_utf8_lossy(&csv));

    // The same inputs always produce the same record.
    assert_eq!(record, sim::run(&circuit, &schedule, 6)?);
    println!("\nsecond run is identical, as it must be");
    Ok(())
}
