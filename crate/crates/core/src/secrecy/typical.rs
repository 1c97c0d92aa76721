//! Typical-set parameters for the fading eavesdropper.
//!
//! Three events on `(x^n, h^n, z^n)`:
//!
//! * output power: `(1/n) sum z_i^2 / (sigma^2 + h_i^2 P) - 1 <= delta`;
//! * noise: `|z - x h|^2 >= n sigma^2 (1 - delta')`;
//! * ergodic: `|(1/n) sum log2(1 + h_i^2 SNR) - E log2(1 + H^2 SNR)| <= delta''`.
//!
//! Their failure probabilities are at most `2 exp(-n c delta^2)`,
//! `exp(-n delta'^2 / 4)` and `2 exp(-n c delta''^2)` with `c = 1/(4 K*)`,
//! where `K*` is the larger of the Sung constants
//! `2 (E W^4)^{1/2} E exp(a |W|)` of the two averaged variables.

use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::SecrecyError;
use crate::channel::FadingDistribution;
use crate::rng::{substream, Purpose};

/// Monte Carlo samples behind each Sung constant.
pub const K_STAR_SAMPLES: u64 = 1_000_000;

/// Monte Carlo estimate of `K*` with delta-method standard errors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KStar {
    /// Constant of `W = (x H + U)^2 / (sigma^2 + H^2 P)` with `x^2 = P`.
    pub k_out: f64,
    pub k_out_stderr: f64,
    /// Constant of `W = log2(1 + H^2 SNR)`.
    pub k_erg: f64,
    pub k_erg_stderr: f64,
    pub value: f64,
    pub stderr: f64,
    pub samples: u64,
}

impl KStar {
    /// A known constant, for callers that bound `K*` analytically.
    pub fn exact(value: f64) -> Self {
        Self { k_out: value, k_out_stderr: 0.0, k_erg: value, k_erg_stderr: 0.0, value, stderr: 0.0, samples: 0 }
    }

    /// Upper end of a two-sided `z`-sigma interval.
    pub fn upper(&self, z: f64) -> f64 {
        self.value + z * self.stderr
    }
}

/// `2 sqrt(E W^4) E exp(a W)` for non-negative samples `W`.
fn sung_constant(samples: u64, a: f64, mut draw: impl FnMut() -> f64) -> (f64, f64) {
    let mut w4 = Vec::with_capacity(samples as usize);
    let mut ew = Vec::with_capacity(samples as usize);
    for _ in 0..samples {
        let w = draw();
        w4.push(w.powi(4));
        ew.push((a * w.abs()).exp());
    }
    let n = samples as f64;
    let m4 = crate::numeric::compensated_sum(w4.iter().copied()) / n;
    let me = crate::numeric::compensated_sum(ew.iter().copied()) / n;
    let k = 2.0 * m4.sqrt() * me;
    // d log K = dm4 / (2 m4) + dme / me.
    let g: Vec<f64> = w4.iter().zip(&ew).map(|(a, b)| a / (2.0 * m4) + b / me).collect();
    let gm = crate::numeric::compensated_sum(g.iter().copied()) / n;
    let var = crate::numeric::compensated_sum(g.iter().map(|x| (x - gm) * (x - gm))) / (n - 1.0).max(1.0);
    (k, k * (var / n).sqrt())
}

/// Estimates `K*` with tilts `a_out` (output power event) and `a_erg`
/// (ergodic event).
pub fn estimate_k_star(
    fading: &FadingDistribution,
    power: f64,
    noise_var: f64,
    a_out: f64,
    a_erg: f64,
    samples: u64,
    seed: u64,
) -> Result<KStar, SecrecyError> {
    if samples < 2 {
        return Err(SecrecyError::InvalidParameter("K* estimation needs at least 2 samples".into()));
    }
    if !(power > 0.0 && noise_var > 0.0 && power.is_finite() && noise_var.is_finite()) {
        return Err(SecrecyError::InvalidParameter("power and noise variance must be positive".into()));
    }
    let noise = Normal::new(0.0, noise_var.sqrt()).expect("positive variance");
    let x = power.sqrt();
    let mut rng = substream(seed, Purpose::Sample, 0);
    let (k_out, k_out_stderr) = sung_constant(samples, a_out, || {
        let h = fading.sample(&mut rng);
        let u = noise.sample(&mut rng);
        let z = x * h + u;
        z * z / (noise_var + h * h * power)
    });
    let snr = power / noise_var;
    let mut rng = substream(seed, Purpose::Sample, 1);
    let (k_erg, k_erg_stderr) = sung_constant(samples, a_erg, || {
        let h = fading.sample(&mut rng);
        (h * h * snr).ln_1p() * std::f64::consts::LOG2_E
    });
    let (value, stderr) = if k_out >= k_erg { (k_out, k_out_stderr) } else { (k_erg, k_erg_stderr) };
    Ok(KStar { k_out, k_out_stderr, k_erg, k_erg_stderr, value, stderr, samples })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TypicalSetSpec {
    pub n: u64,
    pub delta: f64,
    pub delta_prime: f64,
    pub delta_second: f64,
    pub power: f64,
    pub noise_var: f64,
    /// `E log2(1 + H^2 SNR)`, the centre of the ergodic event.
    pub ergodic_mean: f64,
    pub k_star: KStar,
    /// `1 / (4 K*)`.
    pub c: f64,
    pub eps1: f64,
    pub eps2: f64,
    pub eps3: f64,
    pub eps: f64,
    /// Some probability bound is at least 1, so the guarantee is empty.
    pub vacuous: bool,
}

fn check_slacks(n: u64, deltas: [f64; 3]) -> Result<(), SecrecyError> {
    if n == 0 {
        return Err(SecrecyError::InvalidParameter("block length must be positive".into()));
    }
    if let Some(d) = deltas.iter().find(|d| !(d.is_finite() && **d > 0.0)) {
        return Err(SecrecyError::InvalidParameter(format!("typicality slack {d} must be positive")));
    }
    Ok(())
}

impl TypicalSetSpec {
    /// Assembles the bounds for a given `K*`.
    pub fn with_k_star(
        n: u64,
        deltas: [f64; 3],
        fading: &FadingDistribution,
        power: f64,
        noise_var: f64,
        k_star: KStar,
    ) -> Result<Self, SecrecyError> {
        check_slacks(n, deltas)?;
        if !(k_star.value.is_finite() && k_star.value > 0.0) {
            return Err(SecrecyError::InvalidParameter(format!("K* = {} must be positive", k_star.value)));
        }
        let [delta, delta_prime, delta_second] = deltas;
        let nf = n as f64;
        let c = 1.0 / (4.0 * k_star.value);
        let eps1 = 2.0 * (-nf * c * delta * delta).exp();
        let eps2 = (-nf * delta_prime * delta_prime / 4.0).exp();
        let eps3 = 2.0 * (-nf * c * delta_second * delta_second).exp();
        let eps = eps1 + eps2 + eps3;
        let snr = power / noise_var;
        let ergodic_mean = fading.expect(|h| (h * h * snr).ln_1p() * std::f64::consts::LOG2_E);
        Ok(Self {
            n,
            delta,
            delta_prime,
            delta_second,
            power,
            noise_var,
            ergodic_mean,
            k_star,
            c,
            eps1,
            eps2,
            eps3,
            eps,
            vacuous: eps1 >= 1.0 || eps2 >= 1.0 || eps3 >= 1.0 || eps >= 1.0,
        })
    }
}

/// Typical-set bounds at block length `n` for slacks
/// `[delta, delta', delta'']`, with `K*` estimated from
/// [`K_STAR_SAMPLES`] draws using tilts `a = delta` and `a = delta''`.
pub fn typical_set_params(
    n: u64,
    deltas: [f64; 3],
    fading: &FadingDistribution,
    power: f64,
    noise_var: f64,
    seed: u64,
) -> Result<TypicalSetSpec, SecrecyError> {
    check_slacks(n, deltas)?;
    let k = estimate_k_star(fading, power, noise_var, deltas[0], deltas[2], K_STAR_SAMPLES, seed)?;
    TypicalSetSpec::with_k_star(n, deltas, fading, power, noise_var, k)
}
