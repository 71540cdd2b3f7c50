//! Serialize an adder to JSON, reload the bare circuit, and run it —
//! the wire format is the interchange point for other tools.
//!
//! ```sh
//! cargo run -p spikeadd --example export_and_reload
//! ```

use num_bigint::BigUint;
use spikeadd::adders::build_dcta3;
use spikeadd::hw::HardwareModel;
use spikeadd::{decode_output, encode_uint, Circuit, InputSchedule};

fn main() -> spikeadd::Result<()> {
    let hw = HardwareModel::default();
    let adder = build_dcta3(9, &hw)?;

    // The descriptor JSON wraps the circuit schema with kind, width and
    // timing metadata; this is what `spikeadd export-circuit` writes.
    let text = adder.to_json()?;
    println!("descriptor is {} bytes of JSON", text.len());

    // Anything that can read the circuit schema can re-run the adder.
    let value: serde_json::Value = serde_json::from_str(&text)?;
    let circuit = Circuit::from_json(&value["circuit"].to_string())?;

    let mut schedule = InputSchedule::new();
    encode_uint(&BigUint::from(300u32), 9)?.schedule_into(&mut schedule, 0, "x");
    encode_uint(&BigUint::from(211u32), 9)?.schedule_into(&mut schedule, 0, "y");
    let record = spikeadd::sim::run(&circuit, &schedule, 4)?;
    let (sum, overflow) = decode_output(&record, "sum", "overflow", 3)?;
    println!("reloaded circuit computes 300 + 211 = {sum} (overflow: {overflow})");
    assert_eq!(sum, BigUint::from(511u32));
    Ok(())
}
