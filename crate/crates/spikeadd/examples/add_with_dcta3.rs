//! Add numbers on the depth-3 parallel adder, inspect its group
//! structure and generate/propagate signals, and switch to per-neuron
//! thresholds to push past the 42-bit bias limit.
//!
//! ```sh
//! cargo run -p spikeadd --example add_with_dcta3
//! ```

use num_bigint::BigUint;
use spikeadd::adders::{
    build_dcta3, partition_groups, AdderConfig, AdderKind, PORT_GENERATE, PORT_PROPAGATE,
};
use spikeadd::hw::HardwareModel;
use spikeadd::sim::Simulator;

fn main() -> spikeadd::Result<()> {
    let hw = HardwareModel::default();

    let partition = partition_groups(16);
    println!("16 bits split into groups of {:?}", partition.group_sizes());

    let adder = build_dcta3(16, &hw)?;
    println!(
        "16-bit dcta3: {} neurons, {} synapses, latency {}",
        adder.circuit.neuron_count(),
        adder.circuit.synapse_count(),
        adder.latency
    );

    // Watch the intermediate signals for one addition: generate means the
    // group's own bits produce a carry at that position, propagate means
    // an incoming carry would ripple through it.
    let sim = Simulator::new(&adder.circuit);
    let x = BigUint::from(0xeeeeu32);
    let y = BigUint::from(0x1111u32);
    let record = adder.run_with(&sim, &x, &y, 0)?;
    let bits = |port| -> spikeadd::Result<String> {
        Ok(record
            .port_bits(port, 1)?
            .iter()
            .map(|b| if *b { '1' } else { '0' })
            .collect())
    };
    println!("x = 0xeeee, y = 0x1111 (bit 0 first):");
    println!("  generate:  {}", bits(PORT_GENERATE)?);
    println!("  propagate: {}", bits(PORT_PROPAGATE)?);
    let (sum, overflow) = adder.decode(&record, 0)?;
    println!("  sum = {sum:#x} (overflow: {overflow})");

    // Shared thresholds with bias offsets stop at 42 bits.
    match build_dcta3(43, &hw) {
        Err(e) => println!("43 bits with shared thresholds: {e}"),
        Ok(_) => unreachable!(),
    }

    // Exact per-neuron thresholds lift the bias limit; the weight
    // precision then allows up to 16 groups of 16 bits.
    let wide = AdderConfig::new(AdderKind::Dcta3, 49)
        .per_neuron_thresholds(true)
        .build(&hw)?;
    let x = BigUint::from(1u64) << 48;
    let y = BigUint::from(12_345u32);
    let (sum, overflow) = wide.add(&x, &y)?;
    println!("49-bit per-neuron-threshold dcta3: 2^48 + 12345 = {sum} (overflow: {overflow})");
    Ok(())
}
