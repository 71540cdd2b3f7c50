//! Profile single additions and sweep the three adders across widths,
//! printing the same CSV the `sweep` subcommand writes.
//!
//! ```sh
//! cargo run -p spikeadd --example profile_and_sweep
//! ```

use spikeadd::adders::{AdderConfig, AdderKind};
use spikeadd::hw::HardwareModel;
use spikeadd::profile::{profile, worst_case_operand, PROFILE_CSV_HEADER};

fn main() -> spikeadd::Result<()> {
    let hw = HardwareModel::default();

    // One addition, fully instrumented. The worst-case operand
    // 2^(n-1) - 1 added to itself maximizes spike activity.
    let adder = AdderConfig::new(AdderKind::Dcta2, 8).build(&hw)?;
    let w = worst_case_operand(8);
    let report = profile(&adder, &w, &w, &hw)?;
    println!(
        "dcta2 n=8 worst case: {} total steps, {} spikes, {} synaptic events",
        report.total_steps, report.spikes, report.synaptic_events
    );
    println!(
        "harness included: {} neurons; adder alone: {} synapses\n",
        report.neurons, report.synapses
    );

    // A small sweep. Latency is linear for the sequential adder and
    // constant for the parallel ones; synaptic events grow fastest for
    // dcta2.
    println!("{PROFILE_CSV_HEADER}");
    for kind in AdderKind::ALL {
        for bits in [4u32, 8, 12, 16] {
            let adder = AdderConfig::new(kind, bits).build(&hw)?;
            let w = worst_case_operand(bits);
            let report = profile(&adder, &w, &w, &hw)?;
            println!("{}", report.csv_row());
        }
    }
    Ok(())
}
