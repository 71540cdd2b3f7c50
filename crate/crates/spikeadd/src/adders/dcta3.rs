//! Depth-3 parallel adder: grouped generate/propagate signals, then carries.
//!
//! The bits are split into roughly-sqrt(n) groups. Within group `i`, the
//! generate signal at position `j` behaves exactly like a depth-2 carry
//! over the group's own bits (weights `2^k`, threshold `2^(j+1)`); the
//! propagate signal is the same gate with the threshold lowered by one, so
//! it also fires when an incoming carry at the group's least significant
//! position would ripple out at `j`. The true carry then combines weight
//! `2^i` from its own generate/propagate pair with weight `2^k` from the
//! most significant pair of every lower group `k` against threshold
//! `2^(i+1)`.
//!
//! Hardware realization of the per-position thresholds is selectable: the
//! default keeps one shared threshold per (group, signal) family and
//! offsets each neuron with a bias, which caps the width at 42 bits under
//! the default bias precision; per-neuron thresholds lift that cap and
//! leave the weight precision as the limit (16 groups of 16 bits).

use serde::Serialize;

use crate::circuit::{CircuitBuilder, NeuronId, Source};
use crate::error::{Error, Result};

use super::{
    attach_sum_gates, AdderDescriptor, AdderKind, DelayPolicy, PORT_CARRY, PORT_GENERATE,
    PORT_OVERFLOW, PORT_PROPAGATE, PORT_SUM, PORT_X, PORT_Y,
};

/// How the bits of a DCTA3 adder are split into groups, least significant
/// group first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GroupPartition {
    sizes: Vec<u32>,
    offsets: Vec<u32>,
}

impl GroupPartition {
    pub fn group_sizes(&self) -> &[u32] {
        &self.sizes
    }

    pub fn group_count(&self) -> usize {
        self.sizes.len()
    }

    pub fn total_bits(&self) -> u32 {
        self.offsets.last().copied().unwrap_or(0) + self.sizes.last().copied().unwrap_or(0)
    }

    /// First global bit of a group.
    pub fn offset(&self, group: usize) -> u32 {
        self.offsets[group]
    }

    /// Group holding a global bit index.
    pub fn group_of(&self, bit: u32) -> usize {
        self.offsets.partition_point(|o| *o <= bit) - 1
    }

    /// Position of a global bit within its group.
    pub fn index_in_group(&self, bit: u32) -> u32 {
        bit - self.offsets[self.group_of(bit)]
    }

    /// Global index of a group's most significant bit.
    pub fn msb_of(&self, group: usize) -> u32 {
        self.offsets[group] + self.sizes[group] - 1
    }
}

fn isqrt_ceil(n: u32) -> u32 {
    let mut root = (n as f64).sqrt() as u32;
    while root * root < n {
        root += 1;
    }
    while root > 1 && (root - 1) * (root - 1) >= n {
        root -= 1;
    }
    root
}

/// Splits `n` bits into groups of `ceil(n / ceil(sqrt(n)))` bits, with the
/// most significant group holding any remainder. Least significant bits go
/// to group 0.
pub fn partition_groups(n: u32) -> GroupPartition {
    assert!(n >= 1, "partition requires at least one bit");
    let root = isqrt_ceil(n);
    let group_size = n.div_ceil(root);
    let count = n.div_ceil(group_size);
    let mut sizes = vec![group_size; count as usize];
    let remainder = n - group_size * (count - 1);
    *sizes.last_mut().unwrap() = remainder;
    let mut offsets = Vec::with_capacity(sizes.len());
    let mut offset = 0;
    for size in &sizes {
        offsets.push(offset);
        offset += size;
    }
    GroupPartition { sizes, offsets }
}

pub(super) fn construct(n: u32, per_neuron_thresholds: bool) -> Result<AdderDescriptor> {
    let partition = partition_groups(n);
    let mut cb = CircuitBuilder::new();
    cb.add_input_port(PORT_X, n);
    cb.add_input_port(PORT_Y, n);

    let shl = |exp: u32| -> Result<i64> {
        1i64
            .checked_shl(exp)
            .ok_or(Error::WeightOverflow { weight: i64::MAX })
    };

    // Generate and propagate neurons, indexed [group][position].
    let mut gens: Vec<Vec<NeuronId>> = Vec::with_capacity(partition.group_count());
    let mut props: Vec<Vec<NeuronId>> = Vec::with_capacity(partition.group_count());
    for (group, &size) in partition.group_sizes().iter().enumerate() {
        // One shared threshold per (group, signal) family, offset per
        // neuron through the bias; or exact per-neuron thresholds.
        let shared = shl(size)?;
        let mut gen_row = Vec::with_capacity(size as usize);
        let mut prop_row = Vec::with_capacity(size as usize);
        for j in 0..size {
            let exact = shl(j + 1)?;
            let (gen, prop) = if per_neuron_thresholds {
                (cb.add_neuron(exact, 0), cb.add_neuron(exact - 1, 0))
            } else {
                (
                    cb.add_neuron(shared, shared - exact),
                    cb.add_neuron(shared, shared - exact + 1),
                )
            };
            for k in 0..=j {
                let weight = shl(k)?;
                let bit = partition.offset(group) + k;
                for port in [PORT_X, PORT_Y] {
                    let source = Source::Input {
                        port: port.to_string(),
                        bit,
                    };
                    cb.connect(source.clone(), gen, weight, 1);
                    cb.connect(source, prop, weight, 1);
                }
            }
            gen_row.push(gen);
            prop_row.push(prop);
        }
        gens.push(gen_row);
        props.push(prop_row);
    }

    // Carries in global bit order.
    let mut carries = Vec::with_capacity(n as usize);
    for bit in 0..n {
        let group = partition.group_of(bit);
        let j = partition.index_in_group(bit) as usize;
        let carry = cb.add_neuron(shl(group as u32 + 1)?, 0);
        let own_weight = shl(group as u32)?;
        cb.connect(Source::Neuron(gens[group][j]), carry, own_weight, 1);
        cb.connect(Source::Neuron(props[group][j]), carry, own_weight, 1);
        for lower in 0..group {
            let weight = shl(lower as u32)?;
            let msb = *gens[lower].last().unwrap();
            let msb_prop = *props[lower].last().unwrap();
            cb.connect(Source::Neuron(msb), carry, weight, 1);
            cb.connect(Source::Neuron(msb_prop), carry, weight, 1);
        }
        carries.push(carry);
    }

    let sums = attach_sum_gates(
        &mut cb,
        n,
        &carries,
        DelayPolicy::Direct,
        |_bit| 3,
        |_bit| 1,
        |_bit| 1,
    )?;

    let gen_port: Vec<NeuronId> = gens.iter().flatten().copied().collect();
    let prop_port: Vec<NeuronId> = props.iter().flatten().copied().collect();
    cb.set_output_port(PORT_SUM, sums);
    cb.set_output_port(PORT_OVERFLOW, vec![carries[n as usize - 1]]);
    cb.set_output_port(PORT_CARRY, carries);
    cb.set_output_port(PORT_GENERATE, gen_port);
    cb.set_output_port(PORT_PROPAGATE, prop_port);

    Ok(AdderDescriptor {
        kind: AdderKind::Dcta3,
        bits: n,
        latency: 3,
        relay_layers: 0,
        per_neuron_thresholds,
        circuit: cb.build()?,
        partition: Some(partition),
    })
}
