//! Depth-2 parallel adder: every carry in a single threshold gate.
//!
//! Carry neuron `i` receives weight `2^j` from `x[j]` and `y[j]` for all
//! `j <= i` against threshold `2^(i+1)`, so all carries fire one step after
//! injection and the sums one step later. The exponential weights are what
//! bounds the width: with 8-bit mantissas and one extra synapse group at
//! exponent 8, weights up to `2^15` are representable, i.e. 16 bits.

use crate::circuit::{CircuitBuilder, Source};
use crate::error::{Error, Result};

use super::{
    attach_sum_gates, AdderDescriptor, AdderKind, DelayPolicy, PORT_CARRY, PORT_OVERFLOW,
    PORT_SUM, PORT_X, PORT_Y,
};

pub(super) fn construct(n: u32) -> Result<AdderDescriptor> {
    let mut cb = CircuitBuilder::new();
    cb.add_input_port(PORT_X, n);
    cb.add_input_port(PORT_Y, n);

    let mut carries = Vec::with_capacity(n as usize);
    for bit in 0..n {
        let threshold = 1i64
            .checked_shl(bit + 1)
            .ok_or(Error::WeightOverflow { weight: i64::MAX })?;
        let carry = cb.add_neuron(threshold, 0);
        for j in 0..=bit {
            let weight = 1i64
                .checked_shl(j)
                .ok_or(Error::WeightOverflow { weight: i64::MAX })?;
            for port in [PORT_X, PORT_Y] {
                cb.connect(
                    Source::Input {
                        port: port.to_string(),
                        bit: j,
                    },
                    carry,
                    weight,
                    1,
                );
            }
        }
        carries.push(carry);
    }

    let sums = attach_sum_gates(
        &mut cb,
        n,
        &carries,
        DelayPolicy::Direct,
        |_bit| 2,
        |_bit| 1,
        |_bit| 1,
    )?;

    cb.set_output_port(PORT_SUM, sums);
    cb.set_output_port(PORT_OVERFLOW, vec![carries[n as usize - 1]]);
    cb.set_output_port(PORT_CARRY, carries);

    Ok(AdderDescriptor {
        kind: AdderKind::Dcta2,
        bits: n,
        latency: 2,
        relay_layers: 0,
        per_neuron_thresholds: false,
        circuit: cb.build()?,
        partition: None,
    })
}
