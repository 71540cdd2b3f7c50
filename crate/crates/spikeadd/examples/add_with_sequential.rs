//! Add numbers on the sequential (ripple-carry style) adder, including a
//! width beyond the hardware delay cap via relay neurons.
//!
//! ```sh
//! cargo run -p spikeadd --example add_with_sequential
//! ```

use num_bigint::BigUint;
use spikeadd::adders::build_sequential;
use spikeadd::hw::HardwareModel;

fn main() -> spikeadd::Result<()> {
    let hw = HardwareModel::default();

    let adder = build_sequential(16, 0, &hw)?;
    println!(
        "16-bit sequential adder: {} neurons, {} synapses, {} steps of latency",
        adder.circuit.neuron_count(),
        adder.circuit.synapse_count(),
        adder.latency
    );
    let (sum, overflow) = adder.add(&BigUint::from(40_000u32), &BigUint::from(30_000u32))?;
    println!("40000 + 30000 = {sum} (overflow: {overflow})");

    // 63 bits is not buildable without relays: the input-to-sum synapses
    // would need 64-step delays against the 63-step cap.
    match build_sequential(63, 0, &hw) {
        Err(e) => println!("63 bits without relays: {e}"),
        Ok(_) => unreachable!(),
    }

    // One relay layer stretches every overlong delay through a relay
    // neuron, at the cost of one extra latency step.
    let wide = build_sequential(100, 1, &hw)?;
    println!(
        "100-bit adder with one relay layer: {} neurons, latency {}",
        wide.circuit.neuron_count(),
        wide.latency
    );
    let x = BigUint::parse_bytes(b"633825300114114700748351602687", 10).unwrap();
    let y = BigUint::from(1u8);
    let (sum, overflow) = wide.add(&x, &y)?;
    println!("2^99 - 1 + 1 = {sum} (overflow: {overflow})");
    Ok(())
}
