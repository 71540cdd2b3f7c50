//! Explore the hardware constraint model: weight quantization, circuit
//! validation, supported-width search and per-core neuron capacity.
//!
//! ```sh
//! cargo run -p spikeadd --example hardware_limits
//! ```

use spikeadd::adders::{AdderConfig, AdderKind};
use spikeadd::hw::{self, HardwareModel};

fn main() -> spikeadd::Result<()> {
    let hw = HardwareModel::default();
    println!("default hardware model:\n{}\n", serde_json::to_string_pretty(&hw)?);

    // Weights are stored as mantissa * 2^exponent. The second synapse
    // group raises the exponent by eight.
    for weight in [1i64, -2, 32, 1 << 12, 1 << 15] {
        let (mantissa, exponent) = hw::quantize_weight(weight, &hw)?;
        println!("weight {weight:>6} -> mantissa {mantissa:>4} * 2^{exponent}");
    }
    println!(
        "weight {:>6} -> {}",
        1i64 << 16,
        hw::quantize_weight(1 << 16, &hw).unwrap_err()
    );

    // Validation reports violations as data instead of failing.
    let too_wide = AdderConfig::new(AdderKind::Sequential, 70).build_unvalidated(&hw)?;
    let report = hw::validate(&too_wide.circuit, &hw);
    println!(
        "\n70-bit sequential adder without relays: {} delay violations, e.g.\n  {}",
        report.len(),
        report.violations[0].element
    );

    // The supported widths come from searching over builds, and land on
    // 62 / 16 / 42 under the defaults.
    println!();
    for kind in AdderKind::ALL {
        println!(
            "{kind:>10}: up to {} bits",
            hw::max_supported_bits(kind, &hw)
        );
    }

    // Core capacity halves per delay bit, so usage jumps at powers of two
    // of the maximum synaptic delay.
    println!("\nsequential adder core usage (capacity halves at delay 2, 4, 8, ...):");
    for bits in [1u32, 3, 4, 7, 8, 31, 32, 62] {
        let adder = AdderConfig::new(AdderKind::Sequential, bits).build(&hw)?;
        println!(
            "  n = {bits:>2}: max delay {:>2}, usage {:.5}",
            adder.circuit.max_delay(),
            hw::core_usage(&adder.circuit, &hw)
        );
    }
    Ok(())
}
