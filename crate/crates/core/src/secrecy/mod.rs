//! Closed-form rates and bounds: point-to-point capacities, the per-symbol
//! leakage rate `xi`, the finite-length leakage bound, typical-set
//! schedules and the rate planner.
//!
//! Rates are in bits per channel symbol. Fading expectations go through
//! [`FadingDistribution::expect_between`], which is exact on atoms and
//! adaptive quadrature on Rayleigh laws.

mod plan;
mod typical;

pub use plan::{
    plan, BoundRow, ChannelClass, EpsilonSchedule, PlanOptions, PowerAllocation, RatePlan, SeedOverhead,
    DEFAULT_GAMMA_LEVELS, DEFAULT_RAYLEIGH_STATES, MAX_EXHAUSTIVE_GRID,
};
pub use typical::{estimate_k_star, typical_set_params, KStar, TypicalSetSpec, K_STAR_SAMPLES};

use serde::{Deserialize, Serialize};

use crate::channel::{ChannelError, ChannelModel, Csit, FadingDistribution, WiretapChannel};
use crate::leakage::{blahut_arimoto, ChannelTable, LeakageError, BA_MAX_ITERATIONS, BA_TOLERANCE};
use crate::numeric::{compensated_sum, log2_sum_exp2};

/// Relative tolerance on quadrature-derived rates.
pub const RATE_TOL: f64 = 1e-6;
/// Relative slack allowed on the average-power constraint.
pub const POWER_TOL: f64 = 1e-9;

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum SecrecyError {
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("power allocation averages {average} over the limit {limit}")]
    PowerViolation { average: f64, limit: f64 },
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Leakage(#[from] LeakageError),
}

/// `0.5 log2(1 + snr)`, accurate for small `snr`.
pub(crate) fn half_log1p(snr: f64) -> f64 {
    0.5 * snr.ln_1p() * std::f64::consts::LOG2_E
}

/// Gain law and noise variance of a real channel; AWGN is unit gain.
pub(crate) fn gain_law(channel: &ChannelModel) -> Option<(FadingDistribution, f64)> {
    match channel {
        ChannelModel::Dmc(_) => None,
        ChannelModel::Awgn { noise_var, .. } => Some((FadingDistribution::Constant { h: 1.0 }, *noise_var)),
        ChannelModel::FastFading { fading, noise_var, .. } => Some((fading.clone(), *noise_var)),
    }
}

/// Point-to-point capacity at constant input power.
pub fn capacity(channel: &ChannelModel) -> Result<f64, SecrecyError> {
    match channel {
        ChannelModel::Dmc(d) => {
            let table = ChannelTable::new(d.inputs(), d.outputs(), (0..d.inputs()).flat_map(|x| d.row(x).to_vec()).collect())?;
            Ok(blahut_arimoto(&table, BA_TOLERANCE, BA_MAX_ITERATIONS)?.capacity)
        }
        ChannelModel::Awgn { noise_var, power } => Ok(0.5 * (1.0 + power / noise_var).log2()),
        ChannelModel::FastFading { fading, noise_var, power, .. } => {
            let snr = power / noise_var;
            Ok(fading.expect(|h| half_log1p(h * h * snr)))
        }
    }
}

/// `log2` of `(1/ln 2) 2^{-(n/2)(R_C - R_n - I/n)} + eps n R_n`.
pub fn log2_leakage_bound(r_c: f64, r_n: f64, n: f64, i_eps_max: f64, epsilon: f64) -> f64 {
    log2_leakage_bound_log_eps(r_c, r_n, n, i_eps_max, epsilon.log2())
}

/// [`log2_leakage_bound`] with the smoothing given as `log2 eps`, for
/// schedules that underflow.
pub fn log2_leakage_bound_log_eps(r_c: f64, r_n: f64, n: f64, i_eps_max: f64, log2_epsilon: f64) -> f64 {
    let main = std::f64::consts::LOG2_E.log2() - 0.5 * (n * (r_c - r_n) - i_eps_max);
    let scale = n * r_n;
    let tail = if scale > 0.0 { log2_epsilon + scale.log2() } else { f64::NEG_INFINITY };
    log2_sum_exp2(&[main, tail])
}

/// Finite-length leakage bound for a code of rate `r_c` carrying `n r_n`
/// message bits, given the smooth max-information `i_eps_max` (bits over
/// the whole block) and its smoothing `epsilon`.
pub fn leakage_bound(r_c: f64, r_n: f64, n: f64, i_eps_max: f64, epsilon: f64) -> f64 {
    log2_leakage_bound(r_c, r_n, n, i_eps_max, epsilon).exp2()
}

/// Per-symbol leakage rate `xi` of the eavesdropper channel.
///
/// DMC and AWGN eavesdroppers give `C_E`. Fading eavesdroppers average
/// `0.5 log2(1 + gamma h^2 / sigma^2)` over the states the transmitter can
/// see: none (constant power `P`), the main gain, or both gains.
pub fn xi_bound(wiretap: &WiretapChannel, allocation: Option<&PowerAllocation>) -> Result<f64, SecrecyError> {
    match (&wiretap.eve, allocation) {
        (ChannelModel::Dmc(_), None) | (ChannelModel::Awgn { .. }, None) => capacity(&wiretap.eve),
        (ChannelModel::Dmc(_), Some(_)) => {
            Err(SecrecyError::Unsupported("power allocation on a discrete channel".into()))
        }
        _ => {
            let alloc = resolve_allocation(wiretap, allocation)?;
            Ok(alloc.eve_rate(wiretap)?)
        }
    }
}

/// `0.5 E[log2(1 + gamma H_T^2 / sigma_T^2)]` under an allocation: the rate
/// the main channel supports when power follows `gamma`.
pub fn main_rate(wiretap: &WiretapChannel, allocation: Option<&PowerAllocation>) -> Result<f64, SecrecyError> {
    match (&wiretap.main, allocation) {
        (ChannelModel::Dmc(_), None) | (ChannelModel::Awgn { .. }, None) => capacity(&wiretap.main),
        (ChannelModel::Dmc(_), Some(_)) => {
            Err(SecrecyError::Unsupported("power allocation on a discrete channel".into()))
        }
        _ => {
            let alloc = resolve_allocation(wiretap, allocation)?;
            Ok(alloc.main_rate(wiretap)?)
        }
    }
}

/// Main rate minus `xi` at one allocation.
pub fn secrecy_rate(wiretap: &WiretapChannel, allocation: Option<&PowerAllocation>) -> Result<f64, SecrecyError> {
    Ok(main_rate(wiretap, allocation)? - xi_bound(wiretap, allocation)?)
}

/// Checks an allocation against the CSIT class and the power limit, and
/// defaults a missing one to constant power.
fn resolve_allocation(wiretap: &WiretapChannel, allocation: Option<&PowerAllocation>) -> Result<PowerAllocation, SecrecyError> {
    let power = wiretap.eve.power().expect("real channel");
    let csit = wiretap.csit();
    let alloc = match allocation {
        Some(a) => a.clone(),
        None if csit == Csit::None => PowerAllocation::Constant { gamma: power },
        None => {
            return Err(SecrecyError::InvalidParameter(format!(
                "{csit:?} CSIT needs an explicit power allocation"
            )))
        }
    };
    match (&alloc, csit) {
        (PowerAllocation::Constant { .. }, _) => {}
        (PowerAllocation::MainStates { .. }, Csit::Partial | Csit::Full) => {}
        (PowerAllocation::JointStates { .. }, Csit::Full) => {}
        (a, c) => {
            return Err(SecrecyError::Unsupported(format!(
                "a {} allocation needs more state knowledge than {c:?} CSIT provides",
                a.kind()
            )))
        }
    }
    let average = alloc.average_power(wiretap)?;
    if average > power * (1.0 + POWER_TOL) {
        return Err(SecrecyError::PowerViolation { average, limit: power });
    }
    Ok(alloc)
}

/// `(1/2n) sum log2(1 + h_i^2 P / sigma^2)`: the log-volume ratio of the
/// output ellipsoid to the noise ball. Heuristic upper bound on the
/// eavesdropper's rate that converges to `C_E`.
pub fn sphere_pack_rate(h: &[f64], power: f64, noise_var: f64) -> f64 {
    if h.is_empty() {
        return 0.0;
    }
    let snr = power / noise_var;
    compensated_sum(h.iter().map(|g| half_log1p(g * g * snr))) / h.len() as f64
}

/// Costs of reusing one hash seed across `eta` blocks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeedRecycleBounds {
    /// `1 - (1 - p_e)^eta`: probability some block of the session fails.
    pub reliability: f64,
    /// Joint leakage is at most this multiple of the single-block leakage.
    pub leakage_factor: f64,
    /// `R_s / (1 + c_seed / eta)`, with the seed costing `c_seed n` symbols.
    pub effective_rate: f64,
}

pub fn seed_recycle_bounds(p_e: f64, eta: u64, c_seed: f64, r_s: f64) -> Result<SeedRecycleBounds, SecrecyError> {
    if !(0.0..=1.0).contains(&p_e) {
        return Err(SecrecyError::InvalidParameter(format!("error probability {p_e} outside [0, 1]")));
    }
    if eta == 0 {
        return Err(SecrecyError::InvalidParameter("eta must be at least 1".into()));
    }
    if !(c_seed.is_finite() && c_seed > 1.0) {
        return Err(SecrecyError::InvalidParameter(format!("seed cost c_seed must exceed 1, got {c_seed}")));
    }
    let eta_f = eta as f64;
    // 1 - (1-p)^eta without cancellation for small p.
    let reliability = -(eta_f * (-p_e).ln_1p()).exp_m1();
    Ok(SeedRecycleBounds { reliability, leakage_factor: eta_f, effective_rate: r_s / (1.0 + c_seed / eta_f) })
}
