//! Fading-gain laws and their partitions into state intervals.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::ChannelError;
use crate::numeric::{compensated_sum, integrate};

/// Rayleigh support is cut where the upper tail mass is this small
/// (the `1 - 1e-12` quantile) when building intervals.
pub const RAYLEIGH_TAIL_MASS: f64 = 1e-12;

/// Relative tolerance of the adaptive quadrature behind expectations.
pub const QUAD_REL_TOL: f64 = 1e-10;

/// Law of the nonnegative real gain `|H|`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "dist", rename_all = "snake_case", deny_unknown_fields)]
pub enum FadingDistribution {
    /// Density `h / s^2 * exp(-h^2 / (2 s^2))`.
    Rayleigh { scale: f64 },
    /// Finite support; atoms are `(value, probability)` sorted by value.
    Discrete { atoms: Vec<(f64, f64)> },
    Constant { h: f64 },
}

impl FadingDistribution {
    pub fn rayleigh(scale: f64) -> Result<Self, ChannelError> {
        if !(scale.is_finite() && scale > 0.0) {
            return Err(ChannelError::InvalidParameter(format!("Rayleigh scale must be positive, got {scale}")));
        }
        Ok(FadingDistribution::Rayleigh { scale })
    }

    pub fn discrete(mut atoms: Vec<(f64, f64)>) -> Result<Self, ChannelError> {
        if atoms.is_empty() {
            return Err(ChannelError::InvalidParameter("discrete fading needs at least one atom".into()));
        }
        for &(v, p) in &atoms {
            if !(v.is_finite() && v >= 0.0) || !(p.is_finite() && p >= 0.0) {
                return Err(ChannelError::InvalidParameter(format!("bad atom ({v}, {p})")));
            }
        }
        let total = compensated_sum(atoms.iter().map(|a| a.1));
        if (total - 1.0).abs() > 1e-12 {
            return Err(ChannelError::InvalidParameter(format!("atom probabilities sum to {total}")));
        }
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        Ok(FadingDistribution::Discrete { atoms })
    }

    pub fn constant(h: f64) -> Result<Self, ChannelError> {
        if !(h.is_finite() && h >= 0.0) {
            return Err(ChannelError::InvalidParameter(format!("constant gain must be non-negative, got {h}")));
        }
        Ok(FadingDistribution::Constant { h })
    }

    /// Re-checks the invariants of a deserialized value.
    pub fn validated(self) -> Result<Self, ChannelError> {
        match self {
            FadingDistribution::Rayleigh { scale } => Self::rayleigh(scale),
            FadingDistribution::Discrete { atoms } => Self::discrete(atoms),
            FadingDistribution::Constant { h } => Self::constant(h),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            FadingDistribution::Rayleigh { .. } => self.quantile(rng.random::<f64>()),
            FadingDistribution::Discrete { atoms } => {
                let u: f64 = rng.random();
                let mut cum = 0.0;
                for &(v, p) in atoms {
                    cum += p;
                    if u < cum {
                        return v;
                    }
                }
                atoms.last().expect("nonempty").0
            }
            FadingDistribution::Constant { h } => *h,
        }
    }

    pub fn cdf(&self, h: f64) -> f64 {
        match self {
            FadingDistribution::Rayleigh { scale } => {
                if h <= 0.0 {
                    0.0
                } else {
                    -(-h * h / (2.0 * scale * scale)).exp_m1()
                }
            }
            FadingDistribution::Discrete { atoms } => {
                compensated_sum(atoms.iter().filter(|a| a.0 <= h).map(|a| a.1)).min(1.0)
            }
            FadingDistribution::Constant { h: c } => {
                if h >= *c {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    /// Smallest `h` with `cdf(h) >= u`.
    pub fn quantile(&self, u: f64) -> f64 {
        let u = u.clamp(0.0, 1.0);
        match self {
            FadingDistribution::Rayleigh { scale } => scale * (-2.0 * (-u).ln_1p()).sqrt(),
            FadingDistribution::Discrete { atoms } => {
                let mut cum = 0.0;
                for &(v, p) in atoms {
                    cum += p;
                    if cum >= u {
                        return v;
                    }
                }
                atoms.last().expect("nonempty").0
            }
            FadingDistribution::Constant { h } => *h,
        }
    }

    pub fn support_min(&self) -> f64 {
        match self {
            FadingDistribution::Rayleigh { .. } => 0.0,
            FadingDistribution::Discrete { atoms } => atoms[0].0,
            FadingDistribution::Constant { h } => *h,
        }
    }

    /// Largest support point, with Rayleigh cut per [`RAYLEIGH_TAIL_MASS`].
    pub fn support_max(&self) -> f64 {
        match self {
            FadingDistribution::Rayleigh { scale } => scale * (-2.0 * RAYLEIGH_TAIL_MASS.ln()).sqrt(),
            FadingDistribution::Discrete { atoms } => atoms.last().expect("nonempty").0,
            FadingDistribution::Constant { h } => *h,
        }
    }

    pub fn second_moment(&self) -> f64 {
        match self {
            FadingDistribution::Rayleigh { scale } => 2.0 * scale * scale,
            FadingDistribution::Discrete { atoms } => compensated_sum(atoms.iter().map(|&(v, p)| p * v * v)),
            FadingDistribution::Constant { h } => h * h,
        }
    }

    /// `E[f(H)]`.
    pub fn expect<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.expect_between(f, f64::NEG_INFINITY, f64::INFINITY)
    }

    /// `E[f(H) 1{a <= H < b}]`.
    pub fn expect_between<F: Fn(f64) -> f64>(&self, f: F, a: f64, b: f64) -> f64 {
        match self {
            FadingDistribution::Rayleigh { scale } => {
                let s2 = scale * scale;
                // Tail beyond 9.5 scales carries mass below 1e-19.
                let lo = a.max(0.0);
                let hi = b.min(9.5 * scale);
                if hi <= lo {
                    return 0.0;
                }
                let pdf = |h: f64| h / s2 * (-h * h / (2.0 * s2)).exp();
                // Split at the mode so each piece is unimodal-ish.
                let mut cuts = vec![lo];
                for c in [*scale, 3.0 * scale] {
                    if c > lo && c < hi {
                        cuts.push(c);
                    }
                }
                cuts.push(hi);
                compensated_sum(
                    cuts.windows(2).map(|w| integrate(|h| f(h) * pdf(h), w[0], w[1], QUAD_REL_TOL, 1e-300)),
                )
            }
            FadingDistribution::Discrete { atoms } => {
                compensated_sum(atoms.iter().filter(|x| x.0 >= a && x.0 < b).map(|&(v, p)| p * f(v)))
            }
            FadingDistribution::Constant { h } => {
                if *h >= a && *h < b {
                    f(*h)
                } else {
                    0.0
                }
            }
        }
    }
}

/// A partition of the gain axis into `d` intervals `[b_i, b_{i+1})`.
///
/// Gains below `b_0` belong to the first interval and gains at or above
/// `b_d` to the last, so the intervals always cover the whole support and
/// `probs` sums to one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatePartition {
    pub boundaries: Vec<f64>,
    pub probs: Vec<f64>,
}

impl StatePartition {
    /// Equal-probability intervals. Rayleigh boundaries are the `i/d`
    /// quantiles with the last cut per [`RAYLEIGH_TAIL_MASS`]; discrete
    /// atoms are grouped by cumulative probability.
    pub fn equal_probability(dist: &FadingDistribution, d: usize) -> Result<Self, ChannelError> {
        if d == 0 {
            return Err(ChannelError::InvalidParameter("interval count d must be at least 1".into()));
        }
        match dist {
            FadingDistribution::Rayleigh { .. } => {
                let mut boundaries: Vec<f64> = (0..d).map(|i| dist.quantile(i as f64 / d as f64)).collect();
                boundaries.push(dist.support_max());
                Self::from_boundaries(dist, boundaries)
            }
            FadingDistribution::Discrete { atoms } => {
                let groups = if d == atoms.len() {
                    (0..d).collect::<Vec<_>>()
                } else {
                    let mut cum = 0.0;
                    atoms
                        .iter()
                        .map(|&(_, p)| {
                            let g = ((cum * d as f64 + 1e-9).floor() as usize).min(d - 1);
                            cum += p;
                            g
                        })
                        .collect()
                };
                let mut boundaries = vec![0.0f64.min(atoms[0].0)];
                for g in 1..d {
                    match groups.iter().position(|&x| x == g) {
                        Some(idx) => boundaries.push(atoms[idx].0),
                        None => {
                            return Err(ChannelError::InvalidParameter(format!(
                                "cannot split {} atoms into {d} nonempty intervals",
                                atoms.len()
                            )))
                        }
                    }
                }
                boundaries.push(dist.support_max());
                Self::from_boundaries(dist, boundaries)
            }
            FadingDistribution::Constant { h } => {
                if d != 1 {
                    return Err(ChannelError::InvalidParameter("constant gain admits only d = 1".into()));
                }
                Self::from_boundaries(dist, vec![0.0, *h])
            }
        }
    }

    /// Explicit boundaries; they must be increasing and span the support.
    pub fn from_boundaries(dist: &FadingDistribution, boundaries: Vec<f64>) -> Result<Self, ChannelError> {
        if boundaries.len() < 2 {
            return Err(ChannelError::InvalidParameter("need at least two boundaries".into()));
        }
        // Interior boundaries increase strictly; the closing one may coincide
        // with the last interior boundary (a top interval holding one atom).
        let d = boundaries.len() - 1;
        let strict = boundaries[..d].windows(2).all(|w| w[0] < w[1]);
        if !strict || boundaries[d] < boundaries[d - 1] {
            return Err(ChannelError::InvalidParameter(format!("boundaries must increase: {boundaries:?}")));
        }
        let first = boundaries[0];
        let last = *boundaries.last().expect("nonempty");
        if first > dist.support_min() || last < dist.support_max() * (1.0 - 1e-12) {
            return Err(ChannelError::Coverage { lo: first, hi: last });
        }
        let mut probs = Vec::with_capacity(d);
        for i in 0..d {
            let lo = if i == 0 { f64::NEG_INFINITY } else { boundaries[i] };
            let hi = if i == d - 1 { f64::INFINITY } else { boundaries[i + 1] };
            probs.push(dist.expect_between(|_| 1.0, lo, hi).max(0.0));
        }
        if let FadingDistribution::Rayleigh { .. } = dist {
            // Closed form beats quadrature for plain interval masses.
            probs = (0..d)
                .map(|i| {
                    let lo = if i == 0 { 0.0 } else { dist.cdf(boundaries[i]) };
                    let hi = if i == d - 1 { 1.0 } else { dist.cdf(boundaries[i + 1]) };
                    hi - lo
                })
                .collect();
        }
        Ok(Self { boundaries, probs })
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// Interval index of gain `h`.
    pub fn locate(&self, h: f64) -> usize {
        let d = self.len();
        // Interval i holds [b_i, b_{i+1}); count interior boundaries <= h.
        self.boundaries[1..d].iter().take_while(|&&b| b <= h).count()
    }

    /// `E[f(H) 1{H in interval i}]` under `dist`.
    pub fn expect_in<F: Fn(f64) -> f64>(&self, dist: &FadingDistribution, i: usize, f: F) -> f64 {
        let d = self.len();
        let lo = if i == 0 { f64::NEG_INFINITY } else { self.boundaries[i] };
        let hi = if i == d - 1 { f64::INFINITY } else { self.boundaries[i + 1] };
        dist.expect_between(f, lo, hi)
    }
}
