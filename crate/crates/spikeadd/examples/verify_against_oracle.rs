//! Verify the adder circuits against plain big-integer arithmetic:
//! exhaustively at small widths, with seeded random operands at the
//! range boundaries.
//!
//! ```sh
//! cargo run -p spikeadd --example verify_against_oracle
//! ```

use spikeadd::adders::{AdderConfig, AdderKind};
use spikeadd::hw::HardwareModel;
use spikeadd::verify::{verify_exhaustive, verify_random};

fn main() -> spikeadd::Result<()> {
    let hw = HardwareModel::default();

    // Every operand pair up to 4 bits, for every adder.
    for kind in AdderKind::ALL {
        for bits in 1..=4u32 {
            let report = verify_exhaustive(&AdderConfig::new(kind, bits), &hw)?;
            println!(
                "{kind:>10} n={bits}: {} exhaustive trials, {} failures",
                report.trials,
                report.failures.len()
            );
            assert!(report.passed());
        }
    }

    // Seeded random pairs at each adder's maximum width. The stream is
    // reproducible: same seed, same pairs, same report.
    println!();
    for (kind, bits) in [
        (AdderKind::Sequential, 62),
        (AdderKind::Dcta2, 16),
        (AdderKind::Dcta3, 42),
    ] {
        let report = verify_random(&AdderConfig::new(kind, bits), &hw, 2_000, 42)?;
        println!(
            "{kind:>10} n={bits}: {} random trials (seed 42), {} failures",
            report.trials,
            report.failures.len()
        );
        assert!(report.passed());
    }

    // Reports serialize to JSON; the CLI's `verify --out` writes these.
    let report = verify_random(&AdderConfig::new(AdderKind::Dcta2, 8), &hw, 3, 7)?;
    println!("\nsample JSON report:\n{}", report.to_json()?);
    Ok(())
}
