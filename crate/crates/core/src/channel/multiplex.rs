//! Splitting a fast-fading channel into parallel sub-channels by main-channel
//! state, with one sub-codeword per state interval.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::{ChannelError, FadingDistribution, StatePartition};
use crate::numeric::compensated_sum;

/// Interval layout, per-interval power levels and planned sub-block lengths.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiplexPlan {
    pub partition: StatePartition,
    pub gamma: Vec<f64>,
    pub power: f64,
    pub n: usize,
    /// Shortfall margin `n^{3/4}` subtracted from each `p_i n`.
    pub margin: f64,
    /// Planned sub-block lengths `floor(max(0, p_i n - n^{3/4}))`.
    pub lengths: Vec<usize>,
}

/// Equal-probability intervals of `h_t` with power `gamma[i]` on interval `i`.
pub fn demultiplex_plan(
    h_t: &FadingDistribution,
    d: usize,
    power: f64,
    gamma: &[f64],
    n: usize,
) -> Result<MultiplexPlan, ChannelError> {
    let partition = StatePartition::equal_probability(h_t, d)?;
    plan_from_partition(partition, power, gamma, n)
}

pub fn plan_from_partition(
    partition: StatePartition,
    power: f64,
    gamma: &[f64],
    n: usize,
) -> Result<MultiplexPlan, ChannelError> {
    let d = partition.len();
    if gamma.len() != d {
        return Err(ChannelError::LengthMismatch { expected: d, actual: gamma.len() });
    }
    if gamma.iter().any(|g| !(g.is_finite() && *g >= 0.0)) {
        return Err(ChannelError::InvalidParameter("power levels must be finite and non-negative".into()));
    }
    let average = compensated_sum(partition.probs.iter().zip(gamma).map(|(p, g)| p * g));
    if average > power * (1.0 + 1e-12) {
        return Err(ChannelError::PowerViolation { average, limit: power });
    }
    let margin = (n as f64).powf(0.75);
    let lengths = partition.probs.iter().map(|p| (p * n as f64 - margin).max(0.0).floor() as usize).collect();
    Ok(MultiplexPlan { partition, gamma: gamma.to_vec(), power, n, margin, lengths })
}

/// One block of multiplexed transmission.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiplexRecord {
    /// Transmitted symbol per slot; padding slots carry 0.
    pub x: Vec<f64>,
    /// Main-receiver output `h_t x + noise` per slot.
    pub y: Vec<f64>,
    /// Interval index of each slot's state.
    pub interval: Vec<usize>,
    /// `N_i`: slots whose state fell in interval `i`.
    pub usage: Vec<usize>,
    /// Planned lengths `n_i`.
    pub planned: Vec<usize>,
    /// Symbols of sub-codeword `i` actually sent, `min(N_i, n_i)`.
    pub sent: Vec<usize>,
    /// Sub-codeword symbols never sent, `sum (n_i - N_i)^+`.
    pub unsent: usize,
    /// Slots that carried no information, `sum (N_i - n_i)^+`.
    pub padding: usize,
}

impl MultiplexRecord {
    /// Slot and symbol accounting both balance.
    pub fn conserves(&self) -> bool {
        let sent: usize = self.sent.iter().sum();
        let planned: usize = self.planned.iter().sum();
        sent + self.padding == self.x.len() && sent + self.unsent == planned
    }

    /// Received value for each position of each sub-codeword; `None` for
    /// symbols that were never sent.
    pub fn demultiplex(&self) -> Vec<Vec<Option<f64>>> {
        let mut out: Vec<Vec<Option<f64>>> = self.planned.iter().map(|&len| vec![None; len]).collect();
        let mut next = vec![0usize; self.planned.len()];
        for (slot, &i) in self.interval.iter().enumerate() {
            if next[i] < self.planned[i] {
                out[i][next[i]] = Some(self.y[slot]);
                next[i] += 1;
            }
        }
        out
    }
}

/// Sends, at each slot, the next unsent symbol of the sub-codeword whose
/// interval contains that slot's main-channel gain.
pub fn multiplex_transmit<R: Rng + ?Sized>(
    plan: &MultiplexPlan,
    sub_codewords: &[Vec<f64>],
    h_t: &[f64],
    noise_var: f64,
    rng: &mut R,
) -> Result<MultiplexRecord, ChannelError> {
    let d = plan.partition.len();
    if sub_codewords.len() != d {
        return Err(ChannelError::LengthMismatch { expected: d, actual: sub_codewords.len() });
    }
    for (cw, &len) in sub_codewords.iter().zip(&plan.lengths) {
        if cw.len() != len {
            return Err(ChannelError::LengthMismatch { expected: len, actual: cw.len() });
        }
    }
    if !(noise_var.is_finite() && noise_var >= 0.0) {
        return Err(ChannelError::InvalidParameter(format!("noise variance {noise_var}")));
    }
    let sd = noise_var.sqrt();
    let mut x = Vec::with_capacity(h_t.len());
    let mut y = Vec::with_capacity(h_t.len());
    let mut interval = Vec::with_capacity(h_t.len());
    let mut usage = vec![0usize; d];
    let mut sent = vec![0usize; d];
    let mut padding = 0;
    for &h in h_t {
        let i = plan.partition.locate(h);
        usage[i] += 1;
        interval.push(i);
        let symbol = if sent[i] < plan.lengths[i] {
            sent[i] += 1;
            sub_codewords[i][sent[i] - 1]
        } else {
            padding += 1;
            0.0
        };
        x.push(symbol);
        let noise = if sd > 0.0 { sd * rng.sample::<f64, _>(StandardNormal) } else { 0.0 };
        y.push(h * symbol + noise);
    }
    let unsent = plan.lengths.iter().zip(&sent).map(|(n, s)| n - s).sum();
    Ok(MultiplexRecord { x, y, interval, usage, planned: plan.lengths.clone(), sent, unsent, padding })
}
