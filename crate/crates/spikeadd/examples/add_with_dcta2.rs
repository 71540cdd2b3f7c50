//! Add numbers on the depth-2 parallel adder and look at how its
//! exponentially growing weights map onto the two synapse groups.
//!
//! ```sh
//! cargo run -p spikeadd --example add_with_dcta2
//! ```

use num_bigint::BigUint;
use spikeadd::adders::build_dcta2;
use spikeadd::hw::HardwareModel;

fn main() -> spikeadd::Result<()> {
    let hw = HardwareModel::default();
    let adder = build_dcta2(16, &hw)?;
    println!(
        "16-bit dcta2: {} neurons, {} synapses, latency {} steps regardless of width",
        adder.circuit.neuron_count(),
        adder.circuit.synapse_count(),
        adder.latency
    );

    let (sum, overflow) = adder.add(&BigUint::from(65_535u32), &BigUint::from(65_535u32))?;
    println!("65535 + 65535 = {sum} (overflow: {overflow})");

    // Weights double per bit position. The first eight fit one synapse
    // group; the rest move to a second group with the exponent raised by
    // eight.
    let mut by_exponent = std::collections::BTreeMap::new();
    for synapse in adder.circuit.synapses() {
        *by_exponent.entry(synapse.exponent).or_insert(0u32) += 1;
    }
    for (exponent, count) in by_exponent {
        println!("synapse group at weight exponent {exponent}: {count} synapses");
    }

    // One more bit would need weight 2^16, which neither group can hold.
    match build_dcta2(17, &hw) {
        Err(e) => println!("17 bits: {e}"),
        Ok(_) => unreachable!(),
    }
    Ok(())
}
