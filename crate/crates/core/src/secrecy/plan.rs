//! Power allocations over fading states and the rate planner.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::{
    capacity, gain_law, half_log1p, log2_leakage_bound_log_eps, main_rate, seed_recycle_bounds, xi_bound, SecrecyError,
    POWER_TOL, RATE_TOL,
};
use crate::channel::{ChannelModel, Csit, Dmc, FadingDistribution, StatePartition, WiretapChannel};

/// Power levels per state in the allocation grid.
pub const DEFAULT_GAMMA_LEVELS: usize = 64;
/// Equal-probability intervals used for a Rayleigh gain.
pub const DEFAULT_RAYLEIGH_STATES: usize = 4;
/// Grids with at most this many points are searched exhaustively.
pub const MAX_EXHAUSTIVE_GRID: u128 = 1 << 25;
/// Grid points per unit of the power limit; keeps `P` itself on the grid.
const LEVELS_PER_POWER: f64 = 16.0;

/// Transmit power as a step function of the gains the transmitter sees.
///
/// Boundaries partition the gain axis as in [`StatePartition`]; the
/// probabilities of the intervals come from the channel's own law.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PowerAllocation {
    Constant {
        gamma: f64,
    },
    /// `gamma[i]` while the main gain is in interval `i`.
    MainStates {
        boundaries: Vec<f64>,
        gamma: Vec<f64>,
    },
    /// `gamma[i * d_E + j]` while the main gain is in interval `i` and the
    /// eavesdropper gain in interval `j`.
    JointStates {
        main_boundaries: Vec<f64>,
        eve_boundaries: Vec<f64>,
        gamma: Vec<f64>,
    },
}

/// One cell of an allocation: gain intervals, their probabilities, power.
struct Cell {
    main: (f64, f64),
    p_main: f64,
    eve: (f64, f64),
    p_eve: f64,
    gamma: f64,
}

fn interval(part: &StatePartition, i: usize) -> (f64, f64) {
    let d = part.len();
    let lo = if i == 0 { f64::NEG_INFINITY } else { part.boundaries[i] };
    let hi = if i == d - 1 { f64::INFINITY } else { part.boundaries[i + 1] };
    (lo, hi)
}

const WHOLE_AXIS: (f64, f64) = (f64::NEG_INFINITY, f64::INFINITY);

fn laws(wiretap: &WiretapChannel) -> Result<((FadingDistribution, f64), (FadingDistribution, f64)), SecrecyError> {
    match (gain_law(&wiretap.main), gain_law(&wiretap.eve)) {
        (Some(m), Some(e)) => Ok((m, e)),
        _ => Err(SecrecyError::Unsupported("power allocation on a discrete channel".into())),
    }
}

impl PowerAllocation {
    pub fn kind(&self) -> &'static str {
        match self {
            PowerAllocation::Constant { .. } => "constant",
            PowerAllocation::MainStates { .. } => "main-state",
            PowerAllocation::JointStates { .. } => "joint-state",
        }
    }

    fn cells(&self, wiretap: &WiretapChannel) -> Result<Vec<Cell>, SecrecyError> {
        let ((main_law, _), (eve_law, _)) = laws(wiretap)?;
        let check = |gamma: &[f64], expected: usize| -> Result<(), SecrecyError> {
            if gamma.len() != expected {
                return Err(SecrecyError::InvalidParameter(format!(
                    "allocation has {} levels for {expected} states",
                    gamma.len()
                )));
            }
            if let Some(g) = gamma.iter().find(|g| !(g.is_finite() && **g >= 0.0)) {
                return Err(SecrecyError::InvalidParameter(format!("power level {g} is not a non-negative number")));
            }
            Ok(())
        };
        match self {
            PowerAllocation::Constant { gamma } => {
                check(&[*gamma], 1)?;
                Ok(vec![Cell { main: WHOLE_AXIS, p_main: 1.0, eve: WHOLE_AXIS, p_eve: 1.0, gamma: *gamma }])
            }
            PowerAllocation::MainStates { boundaries, gamma } => {
                let part = StatePartition::from_boundaries(&main_law, boundaries.clone())?;
                check(gamma, part.len())?;
                Ok((0..part.len())
                    .map(|i| Cell {
                        main: interval(&part, i),
                        p_main: part.probs[i],
                        eve: WHOLE_AXIS,
                        p_eve: 1.0,
                        gamma: gamma[i],
                    })
                    .collect())
            }
            PowerAllocation::JointStates { main_boundaries, eve_boundaries, gamma } => {
                let pm = StatePartition::from_boundaries(&main_law, main_boundaries.clone())?;
                let pe = StatePartition::from_boundaries(&eve_law, eve_boundaries.clone())?;
                check(gamma, pm.len() * pe.len())?;
                let mut cells = Vec::with_capacity(gamma.len());
                for i in 0..pm.len() {
                    for j in 0..pe.len() {
                        cells.push(Cell {
                            main: interval(&pm, i),
                            p_main: pm.probs[i],
                            eve: interval(&pe, j),
                            p_eve: pe.probs[j],
                            gamma: gamma[i * pe.len() + j],
                        });
                    }
                }
                Ok(cells)
            }
        }
    }

    /// `E[gamma]` with the two gains independent.
    pub fn average_power(&self, wiretap: &WiretapChannel) -> Result<f64, SecrecyError> {
        let cells = self.cells(wiretap)?;
        Ok(crate::numeric::compensated_sum(cells.iter().map(|c| c.p_main * c.p_eve * c.gamma)))
    }

    pub(super) fn main_rate(&self, wiretap: &WiretapChannel) -> Result<f64, SecrecyError> {
        let ((law, noise_var), _) = laws(wiretap)?;
        let cells = self.cells(wiretap)?;
        Ok(crate::numeric::compensated_sum(cells.iter().map(|c| {
            let snr = c.gamma / noise_var;
            c.p_eve * law.expect_between(|h| half_log1p(h * h * snr), c.main.0, c.main.1)
        })))
    }

    pub(super) fn eve_rate(&self, wiretap: &WiretapChannel) -> Result<f64, SecrecyError> {
        let (_, (law, noise_var)) = laws(wiretap)?;
        let cells = self.cells(wiretap)?;
        Ok(crate::numeric::compensated_sum(cells.iter().map(|c| {
            let snr = c.gamma / noise_var;
            c.p_main * law.expect_between(|h| half_log1p(h * h * snr), c.eve.0, c.eve.1)
        })))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChannelClass {
    Dmc,
    Awgn,
    FadingNoCsit,
    FadingPartialCsit,
    FadingFullCsit,
}

impl ChannelClass {
    pub fn of(wiretap: &WiretapChannel) -> Self {
        match (&wiretap.main, &wiretap.eve) {
            (ChannelModel::Dmc(_), _) | (_, ChannelModel::Dmc(_)) => ChannelClass::Dmc,
            (ChannelModel::Awgn { .. }, ChannelModel::Awgn { .. }) => ChannelClass::Awgn,
            _ => match wiretap.csit() {
                Csit::None => ChannelClass::FadingNoCsit,
                Csit::Partial => ChannelClass::FadingPartialCsit,
                Csit::Full => ChannelClass::FadingFullCsit,
            },
        }
    }
}

/// Smoothing schedule `eps_n = a exp(-c n^beta)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EpsilonSchedule {
    pub a: f64,
    pub c: f64,
    pub beta: f64,
}

impl Default for EpsilonSchedule {
    fn default() -> Self {
        Self { a: 1.0, c: 0.01, beta: 1.0 }
    }
}

impl EpsilonSchedule {
    pub fn at(&self, n: f64) -> f64 {
        self.a * (-self.c * n.powf(self.beta)).exp()
    }

    pub fn log2_at(&self, n: f64) -> f64 {
        self.a.log2() - self.c * n.powf(self.beta) * std::f64::consts::LOG2_E
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PlanOptions {
    /// Block lengths for the finite-length bound table.
    pub n_grid: Vec<u64>,
    pub epsilon: EpsilonSchedule,
    /// Additive allowance on `xi` for the sublinear terms that the
    /// asymptotic bound drops. Zero reports the asymptotic value.
    pub slack: f64,
    /// Blocks per hash seed.
    pub eta: u64,
    /// Seed length in units of the block length.
    pub c_seed: f64,
    /// Per-block error probability fed to the seed-recycling bound.
    pub p_e: f64,
    pub gamma_levels: usize,
    /// Top of the power grid; defaults to `(levels - 1) P / 16`.
    pub gamma_max: Option<f64>,
    pub main_states: Option<usize>,
    pub eve_states: Option<usize>,
    /// Skips the grid search.
    pub allocation: Option<PowerAllocation>,
}

impl Default for PlanOptions {
    fn default() -> Self {
        Self {
            n_grid: vec![10, 100, 1_000, 10_000],
            epsilon: EpsilonSchedule::default(),
            slack: 0.0,
            eta: 1,
            c_seed: 2.0,
            p_e: 0.0,
            gamma_levels: DEFAULT_GAMMA_LEVELS,
            gamma_max: None,
            main_states: None,
            eve_states: None,
            allocation: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundRow {
    pub n: u64,
    /// Message bits `floor(n R_s)`.
    pub k: u64,
    pub epsilon: f64,
    pub log2_bound: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeedOverhead {
    pub eta: u64,
    pub c_seed: f64,
    pub effective_rate: f64,
    pub session_error_bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatePlan {
    pub class: ChannelClass,
    /// Code rate over the main channel.
    pub r_c: f64,
    pub xi: f64,
    pub slack: f64,
    /// Target secure rate.
    pub r_s: f64,
    /// `(R_C - xi - slack)^+`; feasible targets lie strictly below it.
    pub r_s_sup: f64,
    pub margin: f64,
    pub feasible: bool,
    pub c_t: f64,
    pub c_e: f64,
    /// Rate the main channel supports under `allocation`.
    pub main_rate: f64,
    /// The code rate exceeds what the main channel supports.
    pub rate_exceeds_main: bool,
    pub allocation: Option<PowerAllocation>,
    pub average_power: Option<f64>,
    pub epsilon_schedule: EpsilonSchedule,
    pub bound_table: Vec<BoundRow>,
    pub seed_overhead: SeedOverhead,
    /// The plan runs at a capacity-approaching code rate on a channel class
    /// whose secrecy capacity the scheme reaches.
    pub achieves_secrecy_capacity: bool,
}

/// Plans a secure rate on `wiretap`.
///
/// `r_c = None` takes a code at the main channel's rate under the chosen
/// allocation. With partial or full CSIT and no explicit allocation, the
/// allocation maximizing main rate minus `xi` is searched on a power grid.
pub fn plan(wiretap: &WiretapChannel, r_c: Option<f64>, r_s: f64, opts: &PlanOptions) -> Result<RatePlan, SecrecyError> {
    let bad = |msg: String| Err(SecrecyError::InvalidParameter(msg));
    if !(r_s.is_finite() && r_s >= 0.0) {
        return bad(format!("target rate {r_s} must be a non-negative number"));
    }
    if let Some(r) = r_c {
        if !(r.is_finite() && r >= 0.0) {
            return bad(format!("code rate {r} must be a non-negative number"));
        }
    }
    if !(opts.slack.is_finite() && opts.slack >= 0.0) {
        return bad(format!("slack {} must be non-negative", opts.slack));
    }
    let eps = opts.epsilon;
    if !(eps.a >= 0.0 && eps.c >= 0.0 && eps.beta > 0.0 && eps.a.is_finite() && eps.c.is_finite()) {
        return bad(format!("invalid epsilon schedule {eps:?}"));
    }
    if opts.n_grid.contains(&0) {
        return bad("block lengths in n_grid must be positive".into());
    }
    let seed = seed_recycle_bounds(opts.p_e, opts.eta, opts.c_seed, r_s)?;

    let class = ChannelClass::of(wiretap);
    let c_t = capacity(&wiretap.main)?;
    let c_e = capacity(&wiretap.eve)?;
    let searched = opts.allocation.is_none()
        && matches!(class, ChannelClass::FadingPartialCsit | ChannelClass::FadingFullCsit);
    let allocation = match (&opts.allocation, class) {
        (Some(a), _) => Some(a.clone()),
        (None, ChannelClass::FadingPartialCsit) => Some(optimize_allocation(wiretap, false, opts)?),
        (None, ChannelClass::FadingFullCsit) => Some(optimize_allocation(wiretap, true, opts)?),
        (None, _) => None,
    };
    let xi = xi_bound(wiretap, allocation.as_ref())?;
    let supported = main_rate(wiretap, allocation.as_ref())?;
    let average_power = allocation.as_ref().map(|a| a.average_power(wiretap)).transpose()?;
    let r_c = r_c.unwrap_or(supported);
    let r_s_sup = (r_c - xi - opts.slack).max(0.0);
    let at_capacity = (r_c - supported).abs() <= RATE_TOL * supported.max(1.0);
    let hypotheses = match (class, &wiretap.main, &wiretap.eve) {
        (ChannelClass::Dmc, ChannelModel::Dmc(t), ChannelModel::Dmc(e)) => {
            t.is_weakly_symmetric() && e.is_weakly_symmetric() && is_degraded(t, e)
        }
        (ChannelClass::Awgn, _, _) => true,
        (ChannelClass::FadingFullCsit, _, _) => searched,
        _ => false,
    };
    let bound_table = opts
        .n_grid
        .iter()
        .map(|&n| {
            let nf = n as f64;
            let epsilon = eps.at(nf);
            let log2_bound = log2_leakage_bound_log_eps(r_c, r_s, nf, nf * (xi + opts.slack), eps.log2_at(nf));
            BoundRow { n, k: (nf * r_s).floor() as u64, epsilon, log2_bound, bound: log2_bound.exp2() }
        })
        .collect();
    Ok(RatePlan {
        class,
        r_c,
        xi,
        slack: opts.slack,
        r_s,
        r_s_sup,
        margin: r_s_sup - r_s,
        feasible: r_s < r_s_sup,
        c_t,
        c_e,
        main_rate: supported,
        rate_exceeds_main: r_c > supported * (1.0 + RATE_TOL),
        allocation,
        average_power,
        epsilon_schedule: eps,
        bound_table,
        seed_overhead: SeedOverhead {
            eta: opts.eta,
            c_seed: opts.c_seed,
            effective_rate: seed.effective_rate,
            session_error_bound: seed.reliability,
        },
        achieves_secrecy_capacity: at_capacity && hypotheses,
    })
}

/// Whether `eve` is a degraded version of `main`: `eve = main * Q` for a
/// stochastic `Q`. Decided exactly for binary symmetric pairs and for an
/// invertible square `main`; anything else is reported as not degraded.
fn is_degraded(main: &Dmc, eve: &Dmc) -> bool {
    if let (Some(pt), Some(pe)) = (main.bsc_crossover(), eve.bsc_crossover()) {
        return (pe - 0.5).abs() <= (pt - 0.5).abs();
    }
    let k = main.inputs();
    if main.outputs() != k {
        return false;
    }
    let Some(q) = solve(main.rows(), eve.rows()) else { return false };
    q.iter().flatten().all(|&v| v >= -1e-9)
}

/// Solves `a q = b` by Gauss-Jordan elimination with partial pivoting.
fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<Vec<f64>>) -> Option<Vec<Vec<f64>>> {
    let k = a.len();
    for col in 0..k {
        let pivot = (col..k).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col].abs() < 1e-12 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        let inv = 1.0 / a[col][col];
        a[col].iter_mut().for_each(|v| *v *= inv);
        b[col].iter_mut().for_each(|v| *v *= inv);
        for row in 0..k {
            if row != col && a[row][col] != 0.0 {
                let f = a[row][col];
                let (ar, br) = (a[col].clone(), b[col].clone());
                a[row].iter_mut().zip(&ar).for_each(|(v, p)| *v -= f * p);
                b[row].iter_mut().zip(&br).for_each(|(v, p)| *v -= f * p);
            }
        }
    }
    Some(b)
}

fn default_partition(law: &FadingDistribution, d: Option<usize>) -> Result<StatePartition, SecrecyError> {
    let d = d.unwrap_or(match law {
        FadingDistribution::Rayleigh { .. } => DEFAULT_RAYLEIGH_STATES,
        FadingDistribution::Discrete { atoms } => atoms.len(),
        FadingDistribution::Constant { .. } => 1,
    });
    Ok(StatePartition::equal_probability(law, d)?)
}

/// Grid search for the allocation maximizing main rate minus `xi`.
fn optimize_allocation(wiretap: &WiretapChannel, full: bool, opts: &PlanOptions) -> Result<PowerAllocation, SecrecyError> {
    let ((main_law, main_var), (eve_law, eve_var)) = laws(wiretap)?;
    let power = wiretap.eve.power().expect("real channel");
    let levels = opts.gamma_levels;
    if levels < 2 {
        return Err(SecrecyError::InvalidParameter("gamma grid needs at least 2 levels".into()));
    }
    let top = opts.gamma_max.unwrap_or((levels - 1) as f64 * power / LEVELS_PER_POWER);
    if !(top.is_finite() && top > 0.0) {
        return Err(SecrecyError::InvalidParameter(format!("gamma_max {top} must be positive")));
    }
    let grid: Vec<f64> = (0..levels).map(|l| top * l as f64 / (levels - 1) as f64).collect();
    let pm = default_partition(&main_law, opts.main_states)?;
    let pe = if full { default_partition(&eve_law, opts.eve_states)? } else { StatePartition::equal_probability(&eve_law, 1)? };
    let rate_table = |law: &FadingDistribution, var: f64, part: &StatePartition| -> Vec<Vec<f64>> {
        (0..part.len())
            .map(|i| {
                let (lo, hi) = interval(part, i);
                grid.iter()
                    .map(|g| {
                        let snr = g / var;
                        law.expect_between(|h| half_log1p(h * h * snr), lo, hi)
                    })
                    .collect()
            })
            .collect()
    };
    let a = rate_table(&main_law, main_var, &pm);
    let b = rate_table(&eve_law, eve_var, &pe);

    // Partial solution: states are main intervals, eve averaged out.
    let b_all: Vec<f64> = (0..levels).map(|l| b.iter().map(|row| row[l]).sum()).collect();
    let obj_p: Vec<Vec<f64>> =
        (0..pm.len()).map(|i| (0..levels).map(|l| a[i][l] - pm.probs[i] * b_all[l]).collect()).collect();
    let cost_p: Vec<Vec<f64>> = pm.probs.iter().map(|p| grid.iter().map(|g| p * g).collect()).collect();
    let partial = search(&obj_p, &cost_p, power, &[]);
    if !full {
        return Ok(PowerAllocation::MainStates {
            boundaries: pm.boundaries.clone(),
            gamma: partial.iter().map(|&l| grid[l]).collect(),
        });
    }
    let de = pe.len();
    let mut obj = Vec::new();
    let mut cost = Vec::new();
    for i in 0..pm.len() {
        for j in 0..de {
            obj.push((0..levels).map(|l| pe.probs[j] * a[i][l] - pm.probs[i] * b[j][l]).collect::<Vec<_>>());
            cost.push(grid.iter().map(|g| pm.probs[i] * pe.probs[j] * g).collect::<Vec<_>>());
        }
    }
    let lifted: Vec<usize> = (0..pm.len() * de).map(|s| partial[s / de]).collect();
    let joint = search(&obj, &cost, power, &[lifted]);
    Ok(PowerAllocation::JointStates {
        main_boundaries: pm.boundaries.clone(),
        eve_boundaries: pe.boundaries.clone(),
        gamma: joint.iter().map(|&l| grid[l]).collect(),
    })
}

fn total(table: &[Vec<f64>], choice: &[usize]) -> f64 {
    table.iter().zip(choice).map(|(row, &l)| row[l]).sum()
}

/// Maximizes `sum_s obj[s][l_s]` subject to `sum_s cost[s][l_s] <= budget`,
/// where each `cost[s]` is non-decreasing and `cost[s][0] = 0`.
///
/// Exhaustive branch and bound when the grid is small enough, otherwise a
/// Lagrangian relaxation polished by coordinate ascent, started from the
/// best of the relaxation and `starts`.
fn search(obj: &[Vec<f64>], cost: &[Vec<f64>], budget: f64, starts: &[Vec<usize>]) -> Vec<usize> {
    let limit = budget * (1.0 + POWER_TOL);
    let states = obj.len();
    let levels = obj.first().map_or(1, |r| r.len());
    let size = (levels as u128).checked_pow(states as u32);
    if size.is_some_and(|s| s <= MAX_EXHAUSTIVE_GRID) {
        return exhaustive(obj, cost, limit);
    }
    let pick = |lambda: f64| -> Vec<usize> {
        (0..states)
            .map(|s| {
                let mut best = 0;
                for l in 1..levels {
                    if obj[s][l] - lambda * cost[s][l] > obj[s][best] - lambda * cost[s][best] {
                        best = l;
                    }
                }
                best
            })
            .collect()
    };
    let mut hi = 1.0;
    while total(cost, &pick(hi)) > limit {
        hi *= 2.0;
        if hi > 1e300 {
            break;
        }
    }
    let mut choice = pick(0.0);
    if total(cost, &choice) > limit {
        let mut lo = 0.0;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if total(cost, &pick(mid)) > limit {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        choice = pick(hi);
        if total(cost, &choice) > limit {
            choice = vec![0; states];
        }
    }
    for s in starts {
        if total(cost, s) <= limit && total(obj, s) > total(obj, &choice) {
            choice = s.clone();
        }
    }
    // Coordinate ascent; each accepted move strictly increases the objective.
    for _ in 0..10_000 {
        let mut moved = false;
        for s in 0..states {
            let base_cost = total(cost, &choice) - cost[s][choice[s]];
            let mut best = choice[s];
            for l in 0..levels {
                if base_cost + cost[s][l] <= limit && obj[s][l] > obj[s][best] {
                    best = l;
                }
            }
            if best != choice[s] {
                choice[s] = best;
                moved = true;
            }
        }
        if !moved {
            break;
        }
    }
    choice
}

fn exhaustive(obj: &[Vec<f64>], cost: &[Vec<f64>], limit: f64) -> Vec<usize> {
    let states = obj.len();
    let mut suffix = vec![0.0; states + 1];
    for s in (0..states).rev() {
        suffix[s] = suffix[s + 1] + obj[s].iter().copied().fold(f64::NEG_INFINITY, f64::max);
    }
    struct Search<'a> {
        obj: &'a [Vec<f64>],
        cost: &'a [Vec<f64>],
        suffix: Vec<f64>,
        limit: f64,
        current: Vec<usize>,
        best: Vec<usize>,
        best_value: f64,
    }
    impl Search<'_> {
        fn go(&mut self, s: usize, spent: f64, value: f64) {
            if s == self.obj.len() {
                if value > self.best_value {
                    self.best_value = value;
                    self.best.clone_from(&self.current);
                }
                return;
            }
            if value + self.suffix[s] <= self.best_value {
                return;
            }
            for l in 0..self.obj[s].len() {
                let c = spent + self.cost[s][l];
                if c > self.limit {
                    break;
                }
                self.current[s] = l;
                self.go(s + 1, c, value + self.obj[s][l]);
            }
        }
    }
    let mut st = Search {
        obj,
        cost,
        suffix,
        limit,
        current: vec![0; states],
        best: vec![0; states],
        best_value: f64::NEG_INFINITY,
    };
    st.go(0, 0.0, 0.0);
    st.best
}

impl fmt::Display for RatePlan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "channel class        {:?}", self.class)?;
        writeln!(f, "C_T                  {:.6}", self.c_t)?;
        writeln!(f, "C_E                  {:.6}", self.c_e)?;
        writeln!(f, "main rate            {:.6}", self.main_rate)?;
        writeln!(f, "R_C                  {:.6}", self.r_c)?;
        writeln!(f, "xi                   {:.6}", self.xi)?;
        if self.slack > 0.0 {
            writeln!(f, "slack                {:.6}", self.slack)?;
        }
        writeln!(f, "feasible R_s         [0, {:.6})", self.r_s_sup)?;
        writeln!(f, "target R_s           {:.6}", self.r_s)?;
        writeln!(f, "margin               {:+.6}", self.margin)?;
        writeln!(f, "verdict              {}", if self.feasible { "feasible" } else { "infeasible" })?;
        if let Some(p) = self.average_power {
            writeln!(f, "average power        {p:.6}")?;
        }
        if self.rate_exceeds_main {
            writeln!(f, "warning              code rate exceeds the main channel rate")?;
        }
        writeln!(f, "secrecy capacity     {}", if self.achieves_secrecy_capacity { "achieved" } else { "not claimed" })?;
        let s = &self.seed_overhead;
        writeln!(f, "seed reuse           eta = {}, c_seed = {}, effective rate {:.6}", s.eta, s.c_seed, s.effective_rate)?;
        let e = &self.epsilon_schedule;
        writeln!(f, "epsilon schedule     {} exp(-{} n^{})", e.a, e.c, e.beta)?;
        writeln!(f)?;
        writeln!(f, "{:>10} {:>10} {:>14} {:>14} {:>14}", "n", "k", "epsilon", "log2 bound", "bound")?;
        for r in &self.bound_table {
            writeln!(f, "{:>10} {:>10} {:>14.6e} {:>14.6} {:>14.6e}", r.n, r.k, r.epsilon, r.log2_bound, r.bound)?;
        }
        Ok(())
    }
}
