//! Stream several additions through one adder circuit, one step apart.
//!
//! Membrane sums fully decay every step, so back-to-back inputs never
//! bleed into each other: each addition rides its own wavefront through
//! the pipeline and the results come out one step apart.
//!
//! ```sh
//! cargo run -p spikeadd --example pipelined_additions
//! ```

use num_bigint::BigUint;
use spikeadd::adders::{build_dcta2, PORT_OVERFLOW, PORT_SUM};
use spikeadd::encoding::decode_output_at;
use spikeadd::hw::HardwareModel;
use spikeadd::sim::Simulator;

fn main() -> spikeadd::Result<()> {
    let hw = HardwareModel::default();
    let adder = build_dcta2(8, &hw)?;
    let sim = Simulator::new(&adder.circuit);

    let pairs: [(u32, u32); 4] = [(100, 55), (200, 99), (1, 1), (250, 10)];

    // Inject pair k at step k.
    let mut schedule = adder.schedule_inputs(
        &BigUint::from(pairs[0].0),
        &BigUint::from(pairs[0].1),
        0,
    )?;
    for (t0, (x, y)) in pairs.iter().enumerate().skip(1) {
        let shifted =
            adder.schedule_inputs(&BigUint::from(*x), &BigUint::from(*y), t0 as u32)?;
        schedule.merge_shifted(&shifted, 0);
    }

    let last_start = pairs.len() as u32 - 1;
    let record = sim.run(&schedule, adder.horizon(last_start))?;

    println!("four additions injected one step apart into one dcta2 circuit:");
    for (t0, (x, y)) in pairs.iter().enumerate() {
        let step = adder.output_step(t0 as u32);
        let (sum, overflow) = decode_output_at(&record, PORT_SUM, PORT_OVERFLOW, step)?;
        println!(
            "  injected at {t0}: {x} + {y} = {sum} (overflow {overflow}), read at step {step}"
        );
        assert_eq!(sum, BigUint::from((x + y) % 256));
        assert_eq!(overflow, x + y >= 256);
    }
    println!(
        "\n{} spikes total across the interleaved runs",
        record.events().len()
    );
    Ok(())
}
