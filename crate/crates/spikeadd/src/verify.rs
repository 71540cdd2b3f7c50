//! Ground truth and systematic verification of the adder circuits.
//!
//! The reference adder is plain big-integer arithmetic and never touches
//! the simulator, so disagreement always means a circuit bug. Exhaustive
//! mode sweeps every operand pair at small widths; random mode draws
//! reproducible pairs from a seeded ChaCha8 stream and always includes the
//! boundary pairs (0, 0), (2^n - 1, 2^n - 1) and the worst-case operand
//! added to itself.

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::adders::AdderConfig;
use crate::error::{Error, Result};
use crate::hw::HardwareModel;
use crate::profile::worst_case_operand;
use crate::sim::Simulator;

/// Widths above this are refused in exhaustive mode (2^(2n) runs).
pub const DEFAULT_EXHAUSTIVE_CAP: u32 = 8;

/// Exact integer addition truncated to `bits`, with the overflow flag.
pub fn reference_add(x: &BigUint, y: &BigUint, bits: u32) -> Result<(BigUint, bool)> {
    if bits == 0 {
        return Err(Error::ZeroBitWidth);
    }
    let modulus = BigUint::one() << bits;
    for operand in [x, y] {
        if *operand >= modulus {
            return Err(Error::ValueOutOfRange {
                value: operand.to_string(),
                width: bits,
            });
        }
    }
    let total = x + y;
    let overflow = total >= modulus;
    Ok((total % modulus, overflow))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum VerifyMode {
    Exhaustive,
    Random,
}

/// One operand pair where the circuit disagreed with the reference.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Failure {
    pub x: String,
    pub y: String,
    pub expected: String,
    pub expected_overflow: bool,
    pub got: String,
    pub got_overflow: bool,
    /// Simulation-level problem (e.g. a spurious output spike), if any.
    pub note: Option<String>,
}

/// Outcome of one verification sweep.
#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub kind: crate::adders::AdderKind,
    #[serde(rename = "n")]
    pub bits: u32,
    pub mode: VerifyMode,
    pub trials: u64,
    pub failures: Vec<Failure>,
    pub seed: Option<u64>,
    pub relay_layers: u32,
    pub per_neuron_thresholds: bool,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

fn check_pair(
    config: &AdderConfig,
    descriptor: &crate::adders::AdderDescriptor,
    sim: &Simulator,
    x: &BigUint,
    y: &BigUint,
) -> Option<Failure> {
    let (expected, expected_overflow) =
        reference_add(x, y, config.bits).expect("operands in range");
    match descriptor.add_with(sim, x, y) {
        Ok((got, got_overflow)) => {
            if got == expected && got_overflow == expected_overflow {
                None
            } else {
                Some(Failure {
                    x: x.to_string(),
                    y: y.to_string(),
                    expected: expected.to_string(),
                    expected_overflow,
                    got: got.to_string(),
                    got_overflow,
                    note: None,
                })
            }
        }
        Err(err) => Some(Failure {
            x: x.to_string(),
            y: y.to_string(),
            expected: expected.to_string(),
            expected_overflow,
            got: String::new(),
            got_overflow: false,
            note: Some(err.to_string()),
        }),
    }
}

fn run_pairs(
    config: &AdderConfig,
    hw: &HardwareModel,
    mode: VerifyMode,
    seed: Option<u64>,
    pairs: Vec<(BigUint, BigUint)>,
) -> Result<VerificationReport> {
    let descriptor = config.build(hw)?;
    let sim = Simulator::new(&descriptor.circuit);
    let failures: Vec<Failure> = pairs
        .par_iter()
        .filter_map(|(x, y)| check_pair(config, &descriptor, &sim, x, y))
        .collect();
    Ok(VerificationReport {
        kind: config.kind,
        bits: config.bits,
        mode,
        trials: pairs.len() as u64,
        failures,
        seed,
        relay_layers: config.relay_layers,
        per_neuron_thresholds: config.per_neuron_thresholds,
    })
}

/// Simulates every one of the 2^(2n) operand pairs and compares against
/// [`reference_add`]. Refuses widths above `cap`.
pub fn verify_exhaustive_capped(
    config: &AdderConfig,
    hw: &HardwareModel,
    cap: u32,
) -> Result<VerificationReport> {
    if config.bits > cap {
        return Err(Error::CapExceeded {
            requested: config.bits,
            cap,
        });
    }
    let range = 1u64 << config.bits;
    let mut pairs = Vec::with_capacity((range * range) as usize);
    for x in 0..range {
        for y in 0..range {
            pairs.push((BigUint::from(x), BigUint::from(y)));
        }
    }
    run_pairs(config, hw, VerifyMode::Exhaustive, None, pairs)
}

/// [`verify_exhaustive_capped`] at the default cap.
pub fn verify_exhaustive(config: &AdderConfig, hw: &HardwareModel) -> Result<VerificationReport> {
    verify_exhaustive_capped(config, hw, DEFAULT_EXHAUSTIVE_CAP)
}

/// Draws one `bits`-wide operand from the stream: `ceil(bits / 64)` words,
/// least significant first, masked down to `bits`.
fn draw_operand(rng: &mut ChaCha8Rng, bits: u32) -> BigUint {
    let words = (bits as usize).div_ceil(64);
    let mut bytes = Vec::with_capacity(words * 8);
    for _ in 0..words {
        bytes.extend_from_slice(&rng.next_u64().to_le_bytes());
    }
    let mut value = BigUint::from_bytes_le(&bytes);
    value %= BigUint::one() << bits;
    value
}

/// Verifies `trials` reproducible pseudo-random pairs plus the three
/// boundary pairs. The pair stream is pinned: ChaCha8 seeded with `seed`,
/// x drawn before y, so reports are portable across runs and machines.
pub fn verify_random(
    config: &AdderConfig,
    hw: &HardwareModel,
    trials: u64,
    seed: u64,
) -> Result<VerificationReport> {
    let max = (BigUint::one() << config.bits) - BigUint::one();
    let worst = worst_case_operand(config.bits);
    let mut pairs = vec![
        (BigUint::zero(), BigUint::zero()),
        (max.clone(), max),
        (worst.clone(), worst),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..trials {
        let x = draw_operand(&mut rng, config.bits);
        let y = draw_operand(&mut rng, config.bits);
        pairs.push((x, y));
    }
    run_pairs(config, hw, VerifyMode::Random, Some(seed), pairs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adders::AdderKind;

    fn hw() -> HardwareModel {
        HardwareModel::default()
    }

    fn uint(v: u64) -> BigUint {
        BigUint::from(v)
    }

    #[test]
    fn reference_add_examples() {
        assert_eq!(
            reference_add(&uint(127), &uint(127), 8).unwrap(),
            (uint(254), false)
        );
        assert_eq!(reference_add(&uint(1), &uint(1), 1).unwrap(), (uint(0), true));
        assert_eq!(reference_add(&uint(0), &uint(0), 4).unwrap(), (uint(0), false));
    }

    #[test]
    fn reference_add_rejects_out_of_range_operands() {
        assert!(matches!(
            reference_add(&uint(4), &uint(0), 2),
            Err(Error::ValueOutOfRange { .. })
        ));
    }

    #[test]
    fn exhaustive_small_widths_have_no_failures() {
        let report =
            verify_exhaustive(&AdderConfig::new(AdderKind::Dcta2, 3), &hw()).unwrap();
        assert_eq!(report.trials, 64);
        assert!(report.passed());

        let report =
            verify_exhaustive(&AdderConfig::new(AdderKind::Sequential, 1), &hw()).unwrap();
        assert_eq!(report.trials, 4);
        assert!(report.passed());

        let report =
            verify_exhaustive(&AdderConfig::new(AdderKind::Dcta3, 4), &hw()).unwrap();
        assert_eq!(report.trials, 256);
        assert!(report.passed());
    }

    #[test]
    fn exhaustive_cap_is_enforced() {
        assert!(matches!(
            verify_exhaustive(&AdderConfig::new(AdderKind::Dcta2, 9), &hw()),
            Err(Error::CapExceeded {
                requested: 9,
                cap: 8
            })
        ));
    }

    #[test]
    fn random_mode_is_reproducible() {
        let config = AdderConfig::new(AdderKind::Dcta2, 12);
        let a = verify_random(&config, &hw(), 50, 7).unwrap();
        let b = verify_random(&config, &hw(), 50, 7).unwrap();
        assert_eq!(a.to_json().unwrap(), b.to_json().unwrap());
        assert!(a.passed());
        // Boundary pairs ride along on top of the requested trials.
        assert_eq!(a.trials, 53);
    }

    #[test]
    fn seed_changes_the_pair_stream() {
        let mut rng_a = ChaCha8Rng::seed_from_u64(1);
        let mut rng_b = ChaCha8Rng::seed_from_u64(2);
        assert_ne!(draw_operand(&mut rng_a, 64), draw_operand(&mut rng_b, 64));
    }
}
