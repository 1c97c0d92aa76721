//! Exact information measures on small discrete tables.
//!
//! All logarithms are base 2 with `0 log 0 = 0`. Tables are dense and
//! probabilities stay in the linear domain; sums are compensated and summed
//! in index order, so results are bit-stable.

mod instance;
mod table;

pub use instance::{ExactInstance, InstanceSpec, LeakageReport, MaskCheck, MAX_STATE_SPACE};
pub use table::{ChannelTable, JointLaw, JointTable, TypicalSetMask};

use serde::{Deserialize, Serialize};

use crate::numeric::CompensatedSum;

/// Absolute stopping tolerance for the capacity gap.
pub const BA_TOLERANCE: f64 = 1e-9;
pub const BA_MAX_ITERATIONS: usize = 100_000;
/// Largest input alphabet for the semantic-leakage maximization.
pub const MAX_MESSAGES: usize = 256;
/// Tolerance on normalization and uniformity checks.
pub const PROB_TOL: f64 = 1e-12;

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum LeakageError {
    #[error("invalid table: {0}")]
    InvalidTable(String),
    #[error("first marginal is not uniform (deviation {deviation:e})")]
    NonUniform { deviation: f64 },
    #[error("order alpha must lie in [1, inf], got {0}")]
    InvalidOrder(f64),
    #[error("mask claims epsilon {claimed} but removes {actual} from some row")]
    MaskViolation { claimed: f64, actual: f64 },
    #[error("mask shape {mask:?} does not match table {table:?}")]
    MaskShape { mask: (usize, usize), table: (usize, usize) },
    #[error("Blahut-Arimoto did not converge in {iterations} iterations (gap {gap:e})")]
    NotConverged { iterations: usize, gap: f64 },
    #[error("{what} needs {entries} entries, over the limit {limit}")]
    TooLarge { what: String, entries: u128, limit: u64 },
    #[error("unsupported instance: {0}")]
    Unsupported(String),
}

/// `I_alpha(M'; Z) = log|M'| - H_alpha(M'|Z)` with Arimoto's conditional
/// entropy, for a joint table whose row marginal is uniform.
pub fn alpha_mutual_information(joint: &JointTable, alpha: f64) -> Result<f64, LeakageError> {
    restricted_alpha_information(joint, &TypicalSetMask::full(joint), alpha)
}

/// `I_alpha^T`: the same with `P(m', z)` replaced by `P(m', z) 1_T(m', z)`.
///
/// `alpha = 1` is the Shannon limit; on a mask that removes positive mass
/// the limit is `-inf`, since the restricted norms then sum to less than 1.
pub fn restricted_alpha_information(joint: &JointTable, mask: &TypicalSetMask, alpha: f64) -> Result<f64, LeakageError> {
    if !(alpha >= 1.0) {
        return Err(LeakageError::InvalidOrder(alpha));
    }
    joint.check_uniform_rows()?;
    mask.validate(joint)?;
    let log_rows = (joint.rows() as f64).log2();
    let (rows, cols) = (joint.rows(), joint.cols());
    if alpha == 1.0 {
        if mask.removes_mass(joint) {
            return Ok(f64::NEG_INFINITY);
        }
        let row_m = joint.row_marginal();
        let col_m = joint.col_marginal();
        let mut acc = CompensatedSum::new();
        for r in 0..rows {
            for c in 0..cols {
                let p = joint.get(r, c);
                if p > 0.0 {
                    acc.add(p * (p / (row_m[r] * col_m[c])).log2());
                }
            }
        }
        return Ok(acc.value());
    }
    let mut total = CompensatedSum::new();
    for c in 0..cols {
        let column = (0..rows).map(|r| if mask.keeps(r, c) { joint.get(r, c) } else { 0.0 });
        total.add(alpha_norm(column, alpha));
    }
    let s = total.value();
    if s <= 0.0 {
        return Ok(f64::NEG_INFINITY);
    }
    if alpha.is_infinite() {
        Ok(log_rows + s.log2())
    } else {
        Ok(log_rows + alpha / (alpha - 1.0) * s.log2())
    }
}

/// `||v||_alpha`, scaled by the maximum to stay finite for large `alpha`.
fn alpha_norm<I: Iterator<Item = f64> + Clone>(v: I, alpha: f64) -> f64 {
    let max = v.clone().fold(0.0, f64::max);
    if max == 0.0 || alpha.is_infinite() {
        return max;
    }
    max * crate::numeric::compensated_sum(v.map(|x| (x / max).powf(alpha))).powf(1.0 / alpha)
}

/// `I_inf^T = log sum_z max_m' P_T(z | m')`.
pub fn restricted_max_information(joint: &JointTable, mask: &TypicalSetMask) -> Result<f64, LeakageError> {
    restricted_alpha_information(joint, mask, f64::INFINITY)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderingReport {
    pub alphas: Vec<f64>,
    pub values: Vec<f64>,
    /// First adjacent pair `(alpha_i, alpha_{i+1})` that decreases by more
    /// than the slack.
    pub violation: Option<(f64, f64)>,
    pub pass: bool,
}

/// Evaluates `I_alpha^T` over an increasing grid and checks it never drops
/// by more than `slack`.
pub fn renyi_ordering_check(
    joint: &JointTable,
    mask: &TypicalSetMask,
    alphas: &[f64],
    slack: f64,
) -> Result<OrderingReport, LeakageError> {
    if alphas.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(LeakageError::InvalidTable("alpha grid must increase".into()));
    }
    let values: Vec<f64> =
        alphas.iter().map(|&a| restricted_alpha_information(joint, mask, a)).collect::<Result<_, _>>()?;
    let violation = values
        .windows(2)
        .zip(alphas.windows(2))
        .find(|(v, _)| v[1] < v[0] - slack)
        .map(|(_, a)| (a[0], a[1]));
    Ok(OrderingReport { alphas: alphas.to_vec(), pass: violation.is_none(), values, violation })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapacityResult {
    /// `I(p*; W)`, a lower bound on capacity.
    pub capacity: f64,
    /// `max_x D(W_x || q*)`, an upper bound on capacity.
    pub upper: f64,
    pub input: Vec<f64>,
    pub iterations: usize,
}

/// Blahut-Arimoto iteration until the upper and lower capacity bounds are
/// within `tol`.
pub fn blahut_arimoto(channel: &ChannelTable, tol: f64, max_iterations: usize) -> Result<CapacityResult, LeakageError> {
    let (rows, cols) = (channel.rows(), channel.cols());
    let mut p = vec![1.0 / rows as f64; rows];
    let mut q = vec![0.0; cols];
    let mut d = vec![0.0; rows];
    let mut gap = f64::INFINITY;
    for iteration in 0..max_iterations {
        q.iter_mut().for_each(|x| *x = 0.0);
        for (r, &pr) in p.iter().enumerate() {
            for (qc, &w) in q.iter_mut().zip(channel.row(r)) {
                *qc += pr * w;
            }
        }
        for (r, dr) in d.iter_mut().enumerate() {
            let mut acc = CompensatedSum::new();
            for (&w, &qc) in channel.row(r).iter().zip(&q) {
                if w > 0.0 {
                    acc.add(w * (w / qc).log2());
                }
            }
            *dr = acc.value();
        }
        let lower = crate::numeric::compensated_sum(p.iter().zip(&d).map(|(a, b)| a * b));
        let upper = d.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        gap = upper - lower;
        if gap < tol {
            return Ok(CapacityResult { capacity: lower.max(0.0), upper: upper.max(0.0), input: p, iterations: iteration });
        }
        let dmax = upper;
        let weights: Vec<f64> = p.iter().zip(&d).map(|(pr, dr)| pr * (dr - dmax).exp2()).collect();
        let z: f64 = weights.iter().sum();
        p = weights.into_iter().map(|w| w / z).collect();
    }
    Err(LeakageError::NotConverged { iterations: max_iterations, gap })
}

/// `max_{P_M} I(M; Z, S)`: the capacity of the induced channel
/// `M -> (Z, S)`.
pub fn semantic_leakage_exact(channel: &ChannelTable) -> Result<CapacityResult, LeakageError> {
    if channel.rows() > MAX_MESSAGES {
        return Err(LeakageError::TooLarge {
            what: "message alphabet".into(),
            entries: channel.rows() as u128,
            limit: MAX_MESSAGES as u64,
        });
    }
    blahut_arimoto(channel, BA_TOLERANCE, BA_MAX_ITERATIONS)
}

/// One-shot leakage bound `(1/ln 2) 2^{(-b + I)/2} + eps * k`.
pub fn one_shot_bound(b: usize, info: f64, epsilon: f64, k: usize) -> f64 {
    if info == f64::NEG_INFINITY {
        return epsilon * k as f64;
    }
    std::f64::consts::LOG2_E * (0.5 * (info - b as f64)).exp2() + epsilon * k as f64
}
