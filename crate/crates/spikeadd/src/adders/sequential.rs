//! Ripple-carry style adder: one carry neuron per bit, one step per bit.
//!
//! Carry neuron `i` (threshold 2) receives `x[i]`, `y[i]` and the previous
//! carry, so it fires at step `t0 + i + 1`. Input and carry spikes are
//! re-synchronized onto the sum gates with synaptic delays so that every
//! sum fires at `t0 + n + 1`. The longest delay in that plan is `n + 1`,
//! which caps the width at 62 bits under the 63-step hardware delay limit.
//! Each layer of relay neurons stretches the realizable delays by another
//! hardware cap's worth of steps and adds one step of latency.

use crate::circuit::{CircuitBuilder, Source};
use crate::error::Result;
use crate::hw::HardwareModel;

use super::{
    attach_sum_gates, AdderDescriptor, AdderKind, DelayPolicy, PORT_CARRY, PORT_OVERFLOW,
    PORT_SUM, PORT_X, PORT_Y,
};

pub(super) fn construct(
    n: u32,
    relay_layers: u32,
    hw: &HardwareModel,
) -> Result<AdderDescriptor> {
    let policy = if relay_layers == 0 {
        DelayPolicy::Direct
    } else {
        DelayPolicy::Relays {
            max_delay: hw.max_delay,
            budget: relay_layers,
        }
    };
    let latency = n + 1 + relay_layers;

    let mut cb = CircuitBuilder::new();
    cb.add_input_port(PORT_X, n);
    cb.add_input_port(PORT_Y, n);

    // Carry chain: carry i fires at t0 + i + 1.
    let mut carries = Vec::with_capacity(n as usize);
    for bit in 0..n {
        let carry = cb.add_neuron(2, 0);
        for port in [PORT_X, PORT_Y] {
            policy.connect(
                &mut cb,
                Source::Input {
                    port: port.to_string(),
                    bit,
                },
                carry,
                1,
                bit + 1,
            )?;
        }
        if bit > 0 {
            policy.connect(&mut cb, Source::Neuron(carries[bit as usize - 1]), carry, 1, 1)?;
        }
        carries.push(carry);
    }

    // Sums all fire at t0 + latency; delays count back from there.
    let sums = attach_sum_gates(
        &mut cb,
        n,
        &carries,
        policy,
        |_bit| latency,
        |bit| latency - bit,
        |bit| latency - bit - 1,
    )?;

    // The most significant carry fires at t0 + n. With relay layers the
    // sums land later, so forward the carry through a relay to keep the
    // overflow port synchronized one step before the sum port.
    let overflow = if relay_layers == 0 {
        carries[n as usize - 1]
    } else {
        let relay = cb.add_neuron(1, 0);
        policy.connect(
            &mut cb,
            Source::Neuron(carries[n as usize - 1]),
            relay,
            1,
            relay_layers,
        )?;
        relay
    };

    cb.set_output_port(PORT_SUM, sums);
    cb.set_output_port(PORT_OVERFLOW, vec![overflow]);
    cb.set_output_port(PORT_CARRY, carries);

    Ok(AdderDescriptor {
        kind: AdderKind::Sequential,
        bits: n,
        latency,
        relay_layers,
        per_neuron_thresholds: false,
        circuit: cb.build()?,
        partition: None,
    })
}
