//! Monte Carlo experiments: code error rates, typical-set frequencies,
//! fading expectations and parameter sweeps with CSV/JSON emission.
//!
//! Trials are grouped in blocks of [`TRIAL_BLOCK`]; block `b` draws from
//! its own substream, so every estimate depends only on the seed and never
//! on how blocks are spread over threads.

use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use rand::Rng;
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::channel::{transmit, ChannelError, ChannelModel, ChannelSpec, FadingDistribution};
use crate::codec::{CodecError, Pipeline, SessionOptions};
use crate::ecc::{CodeKind, CodeSpec, EccError};
use crate::gf::BitString;
use crate::rng::{derive_seed, substream, Purpose};
use crate::secrecy::{half_log1p, log2_leakage_bound_log_eps, SecrecyError, TypicalSetSpec};

/// Trials drawn from one substream.
pub const TRIAL_BLOCK: u64 = 4096;
/// Codes with at most this many information bits get per-message estimates.
pub const PER_MESSAGE_MAX_BITS: usize = 4;
/// Fewest trials accepted by the error-rate estimators.
pub const MIN_ERROR_TRIALS: u64 = 100;
/// Fewest trials accepted by the typicality estimator.
pub const MIN_TYPICALITY_TRIALS: u64 = 1000;

#[derive(Debug, thiserror::Error)]
pub enum SimError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("output: {0}")]
    Io(String),
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Ecc(#[from] EccError),
    #[error(transparent)]
    Codec(#[from] CodecError),
    #[error(transparent)]
    Secrecy(#[from] SecrecyError),
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> SimError {
    SimError::Io(format!("{}: {e}", path.display()))
}

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
    pub trials: u64,
}

impl Estimate {
    pub fn exact(value: f64) -> Self {
        Self { mean: value, stderr: 0.0, trials: 0 }
    }

    fn bernoulli(hits: u64, trials: u64) -> Self {
        let (mean, stderr) = crate::numeric::bernoulli_stderr(hits, trials);
        Self { mean, stderr, trials }
    }

    /// `|mean - value| <= z * stderr`.
    pub fn agrees_with(&self, value: f64, z: f64) -> bool {
        (self.mean - value).abs() <= z * self.stderr
    }
}

/// Welford accumulator; blocks merge with the pairwise update.
#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    fn merge(self, other: Self) -> Self {
        if self.n == 0 {
            return other;
        }
        if other.n == 0 {
            return self;
        }
        let n = self.n + other.n;
        let d = other.mean - self.mean;
        let w = other.n as f64 / n as f64;
        Self { n, mean: self.mean + d * w, m2: self.m2 + other.m2 + d * d * self.n as f64 * w }
    }

    fn estimate(&self) -> Estimate {
        let var = if self.n > 1 { self.m2 / (self.n - 1) as f64 } else { 0.0 };
        Estimate { mean: self.mean, stderr: (var / self.n as f64).sqrt(), trials: self.n }
    }
}

/// Runs `f(rng, count)` on consecutive blocks of `trials` and returns the
/// per-block results in block order. Block `b` uses stream `base + b`.
fn blocked<T: Send>(
    trials: u64,
    seed: u64,
    purpose: Purpose,
    base: u64,
    f: impl Fn(&mut ChaCha20Rng, u64) -> T + Sync,
) -> Vec<T> {
    let blocks = trials.div_ceil(TRIAL_BLOCK);
    (0..blocks)
        .into_par_iter()
        .map(|b| {
            let count = TRIAL_BLOCK.min(trials - b * TRIAL_BLOCK);
            f(&mut substream(seed, purpose, base + b), count)
        })
        .collect()
}

/// Block error estimate for a code on a channel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorEstimate {
    /// Largest per-message estimate, or the uniform-message average when
    /// messages were not enumerated.
    pub worst: Estimate,
    pub worst_message: Option<BitString>,
    /// One entry per message when `l <= PER_MESSAGE_MAX_BITS`.
    pub per_message: Vec<(BitString, Estimate)>,
    /// Whether `worst` is a maximum over every message.
    pub enumerated: bool,
}

fn code_trial(code: &CodeSpec, channel: &ChannelModel, m: &BitString, rng: &mut ChaCha20Rng) -> Result<bool, SimError> {
    let x = code.encode(m)?;
    let y = transmit(channel, &x, rng)?;
    Ok(code.decode(&y.z, y.h.as_deref())? != *m)
}

/// Monte Carlo estimate of the maximal block error probability of `code`
/// on `channel`, with `trials` trials per message when messages are
/// enumerated and `trials` uniformly drawn messages otherwise.
pub fn estimate_error_probability(
    code: &CodeSpec,
    channel: &ChannelModel,
    trials: u64,
    seed: u64,
) -> Result<ErrorEstimate, SimError> {
    if trials < MIN_ERROR_TRIALS {
        return Err(SimError::InvalidParameter(format!("need at least {MIN_ERROR_TRIALS} trials, got {trials}")));
    }
    let l = code.l();
    if l <= PER_MESSAGE_MAX_BITS {
        let blocks = trials.div_ceil(TRIAL_BLOCK);
        let mut per_message = Vec::with_capacity(1 << l);
        for (j, m) in BitString::all(l).enumerate() {
            let counts = blocked(trials, seed, Purpose::Trial, j as u64 * blocks, |rng, count| {
                (0..count).try_fold(0u64, |acc, _| Ok::<_, SimError>(acc + code_trial(code, channel, &m, rng)? as u64))
            });
            let hits = counts.into_iter().sum::<Result<u64, _>>()?;
            per_message.push((m, Estimate::bernoulli(hits, trials)));
        }
        let (worst_message, worst) = per_message
            .iter()
            .max_by(|a, b| a.1.mean.total_cmp(&b.1.mean))
            .map(|(m, e)| (m.clone(), *e))
            .expect("at least one message");
        return Ok(ErrorEstimate { worst, worst_message: Some(worst_message), per_message, enumerated: true });
    }
    let counts = blocked(trials, seed, Purpose::Trial, 0, |rng, count| {
        (0..count).try_fold(0u64, |acc, _| {
            let m = BitString::random(l, rng);
            Ok::<_, SimError>(acc + code_trial(code, channel, &m, rng)? as u64)
        })
    });
    let hits = counts.into_iter().sum::<Result<u64, _>>()?;
    Ok(ErrorEstimate { worst: Estimate::bernoulli(hits, trials), worst_message: None, per_message: vec![], enumerated: false })
}

/// Message and pseudo-message error rates of the full pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PipelineErrorEstimate {
    pub message_error: Estimate,
    pub pseudo_error: Estimate,
}

/// One single-message session per trial, trial `t` being session `t`;
/// messages are uniform unless `message` fixes one.
pub fn estimate_pipeline_error(
    pipeline: &Pipeline,
    message: Option<&BitString>,
    trials: u64,
) -> Result<PipelineErrorEstimate, SimError> {
    if trials < MIN_ERROR_TRIALS {
        return Err(SimError::InvalidParameter(format!("need at least {MIN_ERROR_TRIALS} trials, got {trials}")));
    }
    let k = pipeline.params().k();
    if let Some(m) = message {
        if m.len() != k {
            return Err(SimError::InvalidParameter(format!("message has {} bits, expected {k}", m.len())));
        }
    }
    let seed = pipeline.config().seed;
    let opts = SessionOptions::default();
    let blocks = trials.div_ceil(TRIAL_BLOCK);
    let counts: Vec<Result<(u64, u64), SimError>> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let (mut msg, mut pseudo) = (0u64, 0u64);
            for t in b * TRIAL_BLOCK..trials.min((b + 1) * TRIAL_BLOCK) {
                let m = match message {
                    Some(m) => m.clone(),
                    None => BitString::random(k, &mut substream(seed, Purpose::Message, t)),
                };
                let r = pipeline.run_session(std::slice::from_ref(&m), t, &opts)?;
                msg += r.messages[0].error as u64;
                pseudo += r.messages[0].pseudo_error as u64;
            }
            Ok((msg, pseudo))
        })
        .collect();
    let (mut msg, mut pseudo) = (0, 0);
    for c in counts {
        let (a, b) = c?;
        msg += a;
        pseudo += b;
    }
    Ok(PipelineErrorEstimate {
        message_error: Estimate::bernoulli(msg, trials),
        pseudo_error: Estimate::bernoulli(pseudo, trials),
    })
}

/// Empirical membership frequency of one typical set against `1 - eps`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SetCheck {
    pub estimate: Estimate,
    /// `1 - eps` for this set (may be negative when the bound is vacuous).
    pub bound: f64,
    /// `estimate >= bound - 4 stderr`.
    pub pass: bool,
}

impl SetCheck {
    fn new(hits: u64, trials: u64, eps: f64) -> Self {
        let estimate = Estimate::bernoulli(hits, trials);
        let bound = 1.0 - eps;
        Self { estimate, bound, pass: estimate.mean >= bound - 4.0 * estimate.stderr }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TypicalityEstimate {
    pub output_power: SetCheck,
    pub noise: SetCheck,
    pub ergodic: SetCheck,
    pub joint: SetCheck,
}

impl TypicalityEstimate {
    pub fn pass(&self) -> bool {
        self.output_power.pass && self.noise.pass && self.ergodic.pass && self.joint.pass
    }
}

/// Frequencies with which `(h^n, z^n)` lands in each typical set when
/// `codeword` is sent over the fading `channel`.
pub fn estimate_typicality(
    spec: &TypicalSetSpec,
    channel: &ChannelModel,
    codeword: &[f64],
    trials: u64,
    seed: u64,
) -> Result<TypicalityEstimate, SimError> {
    let ChannelModel::FastFading { fading, noise_var, power, .. } = channel else {
        return Err(SimError::InvalidParameter("typicality needs a fading channel".into()));
    };
    if trials < MIN_TYPICALITY_TRIALS {
        return Err(SimError::InvalidParameter(format!(
            "need at least {MIN_TYPICALITY_TRIALS} trials, got {trials}"
        )));
    }
    if codeword.len() as u64 != spec.n {
        return Err(SimError::InvalidParameter(format!("codeword has {} symbols, expected {}", codeword.len(), spec.n)));
    }
    if spec.noise_var != *noise_var || spec.power != *power {
        return Err(SimError::InvalidParameter("typical-set spec and channel disagree on power or noise".into()));
    }
    let (sigma2, p) = (*noise_var, *power);
    let sd = sigma2.sqrt();
    let snr = p / sigma2;
    let nf = spec.n as f64;
    let counts = blocked(trials, seed, Purpose::Trial, 0, |rng, count| {
        let mut c = [0u64; 4];
        for _ in 0..count {
            let (mut out, mut noise, mut erg) = (0.0, 0.0, 0.0);
            for &x in codeword {
                let h = fading.sample(rng);
                let u: f64 = sd * rng.sample::<f64, _>(StandardNormal);
                let z = h * x + u;
                out += z * z / (sigma2 + h * h * p);
                noise += u * u;
                erg += (h * h * snr).ln_1p() * std::f64::consts::LOG2_E;
            }
            let in_out = out / nf - 1.0 <= spec.delta;
            let in_noise = noise >= nf * sigma2 * (1.0 - spec.delta_prime);
            let in_erg = (erg / nf - spec.ergodic_mean).abs() <= spec.delta_second;
            c[0] += in_out as u64;
            c[1] += in_noise as u64;
            c[2] += in_erg as u64;
            c[3] += (in_out && in_noise && in_erg) as u64;
        }
        c
    });
    let c = counts.into_iter().fold([0u64; 4], |a, b| [a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]]);
    Ok(TypicalityEstimate {
        output_power: SetCheck::new(c[0], trials, spec.eps1),
        noise: SetCheck::new(c[1], trials, spec.eps2),
        ergodic: SetCheck::new(c[2], trials, spec.eps3),
        joint: SetCheck::new(c[3], trials, spec.eps),
    })
}

/// Sample mean and standard error of `f(H)` over `trials` draws of `H`.
pub fn monte_carlo_expectation(
    f: impl Fn(f64) -> f64 + Sync,
    dist: &FadingDistribution,
    trials: u64,
    seed: u64,
) -> Result<Estimate, SimError> {
    if trials == 0 {
        return Err(SimError::InvalidParameter("need at least one trial".into()));
    }
    let parts = blocked(trials, seed, Purpose::Sample, 0, |rng, count| {
        let mut m = Moments::default();
        for _ in 0..count {
            m.push(f(dist.sample(rng)));
        }
        m
    });
    Ok(parts.into_iter().fold(Moments::default(), Moments::merge).estimate())
}

/// What one sweep cell computes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Experiment {
    /// `log2` of the finite-length leakage bound with `I = n xi` and
    /// smoothing `eps_a exp(-eps_c n^eps_beta)`; the reference column is
    /// the exponential term alone.
    LeakageBound { n: f64, r_c: f64, r_n: f64, xi: f64, eps_a: f64, eps_c: f64, eps_beta: f64 },
    /// Worst-case block error of `code` on `channel`; the reference column
    /// is the exact value when the code supports it.
    ErrorProbability { code: CodeSpec, channel: ChannelSpec },
    /// `E[0.5 log2(1 + H^2 P / sigma^2)]` by Monte Carlo, quadrature as
    /// reference.
    FadingRate { channel: ChannelSpec },
}

fn set_channel_param(channel: &mut ChannelSpec, name: &str, value: f64) -> Option<()> {
    match (channel, name) {
        (ChannelSpec::Bsc { p }, "p") => *p = value,
        (ChannelSpec::Awgn { sigma2, .. } | ChannelSpec::Fading { sigma2, .. }, "sigma2") => *sigma2 = value,
        (ChannelSpec::Awgn { power, .. } | ChannelSpec::Fading { power, .. }, "power") => *power = value,
        (ChannelSpec::Fading { scale: Some(s), .. }, "scale") => *s = value,
        (ChannelSpec::Fading { h: Some(h), .. }, "h") => *h = value,
        _ => return None,
    }
    Some(())
}

fn as_count(name: &str, value: f64) -> Result<usize, SimError> {
    if value.fract() != 0.0 || value < 1.0 || value > u32::MAX as f64 {
        return Err(SimError::InvalidParameter(format!("{name} = {value} must be a positive integer")));
    }
    Ok(value as usize)
}

impl Experiment {
    /// Parameter names an axis may sweep.
    pub fn parameters(&self) -> Vec<&'static str> {
        match self {
            Experiment::LeakageBound { .. } => vec!["n", "r_c", "r_n", "xi", "eps_a", "eps_c", "eps_beta"],
            Experiment::ErrorProbability { code, channel } => {
                let mut names = match code.kind() {
                    CodeKind::Identity { .. } => vec!["l"],
                    CodeKind::Repetition { .. } => vec!["rho", "l"],
                    CodeKind::Hamming74 { .. } => vec!["blocks"],
                };
                names.extend(channel_parameters(channel));
                names
            }
            Experiment::FadingRate { channel } => channel_parameters(channel),
        }
    }

    /// Copy with parameter `name` set to `value`.
    pub fn with(&self, name: &str, value: f64) -> Result<Self, SimError> {
        let mut e = self.clone();
        let unknown = || SimError::InvalidParameter(format!("parameter `{name}` is not swept by this experiment"));
        match &mut e {
            Experiment::LeakageBound { n, r_c, r_n, xi, eps_a, eps_c, eps_beta } => {
                let slot = match name {
                    "n" => n,
                    "r_c" => r_c,
                    "r_n" => r_n,
                    "xi" => xi,
                    "eps_a" => eps_a,
                    "eps_c" => eps_c,
                    "eps_beta" => eps_beta,
                    _ => return Err(unknown()),
                };
                *slot = value;
            }
            Experiment::ErrorProbability { code, channel } => {
                let power = code.power_limit();
                let resized = match (code.kind(), name) {
                    (CodeKind::Identity { .. }, "l") => Some(CodeSpec::identity(as_count(name, value)?)?),
                    (CodeKind::Repetition { l, .. }, "rho") => Some(CodeSpec::repetition(as_count(name, value)?, l)?),
                    (CodeKind::Repetition { rho, .. }, "l") => Some(CodeSpec::repetition(rho, as_count(name, value)?)?),
                    (CodeKind::Hamming74 { .. }, "blocks") => Some(CodeSpec::hamming74(as_count(name, value)?)?),
                    _ => None,
                };
                match resized {
                    Some(c) => *code = if let Some(p) = power { c.bpsk(p)? } else { c },
                    None => set_channel_param(channel, name, value).ok_or_else(unknown)?,
                }
            }
            Experiment::FadingRate { channel } => set_channel_param(channel, name, value).ok_or_else(unknown)?,
        }
        Ok(e)
    }

    fn evaluate(&self, trials: u64, seed: u64) -> Result<(Estimate, Option<f64>), SimError> {
        match self {
            Experiment::LeakageBound { n, r_c, r_n, xi, eps_a, eps_c, eps_beta } => {
                if !(*n > 0.0 && *eps_a > 0.0) {
                    return Err(SimError::InvalidParameter("leakage sweep needs n > 0 and eps_a > 0".into()));
                }
                let log2_eps = eps_a.log2() - eps_c * n.powf(*eps_beta) * std::f64::consts::LOG2_E;
                let bound = log2_leakage_bound_log_eps(*r_c, *r_n, *n, n * xi, log2_eps);
                let main = std::f64::consts::LOG2_E.log2() - 0.5 * n * (r_c - r_n - xi);
                Ok((Estimate::exact(bound), Some(main)))
            }
            Experiment::ErrorProbability { code, channel } => {
                let model = ChannelModel::try_from(channel.clone())?;
                let code = code.for_channel(&model)?;
                let est = estimate_error_probability(&code, &model, trials, seed)?;
                let exact = code.error_probability_exact(&model).ok();
                Ok((est.worst, exact))
            }
            Experiment::FadingRate { channel } => {
                let model = ChannelModel::try_from(channel.clone())?;
                let ChannelModel::FastFading { fading, noise_var, power, .. } = &model else {
                    return Err(SimError::InvalidParameter("fading_rate needs a fading channel".into()));
                };
                let snr = power / noise_var;
                let est = monte_carlo_expectation(|h| half_log1p(h * h * snr), fading, trials, seed)?;
                Ok((est, Some(fading.expect(|h| half_log1p(h * h * snr)))))
            }
        }
    }
}

fn channel_parameters(channel: &ChannelSpec) -> Vec<&'static str> {
    match channel {
        ChannelSpec::Bsc { .. } => vec!["p"],
        ChannelSpec::Dmc { .. } => vec![],
        ChannelSpec::Awgn { .. } => vec!["sigma2", "power"],
        ChannelSpec::Fading { scale, h, .. } => {
            let mut v = vec!["sigma2", "power"];
            if scale.is_some() {
                v.push("scale");
            }
            if h.is_some() {
                v.push("h");
            }
            v
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub name: String,
    pub values: Vec<f64>,
}

fn default_trials() -> u64 {
    10_000
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    /// Cartesian grid; the last axis varies fastest.
    #[serde(default)]
    pub axes: Vec<Axis>,
    #[serde(default = "default_trials")]
    pub trials: u64,
    #[serde(default)]
    pub seed: u64,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), SimError> {
        if self.trials == 0 {
            return Err(SimError::InvalidParameter("trials must be at least 1".into()));
        }
        let known = self.experiment.parameters();
        for (i, axis) in self.axes.iter().enumerate() {
            if !known.contains(&axis.name.as_str()) {
                return Err(SimError::InvalidParameter(format!(
                    "axis `{}` is not a parameter of this experiment (expected one of {})",
                    axis.name,
                    known.join(", ")
                )));
            }
            if self.axes[..i].iter().any(|a| a.name == axis.name) {
                return Err(SimError::InvalidParameter(format!("axis `{}` appears twice", axis.name)));
            }
            if axis.values.is_empty() {
                return Err(SimError::InvalidParameter(format!("axis `{}` has no values", axis.name)));
            }
        }
        Ok(())
    }

    /// Lowercase hex SHA-256 of the config's JSON form.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        hex::encode(Sha256::digest(json.as_bytes()))
    }

    fn cell_count(&self) -> usize {
        self.axes.iter().map(|a| a.values.len()).product()
    }

    /// Axis values of cell `index`, last axis fastest.
    fn cell_key(&self, mut index: usize) -> Vec<f64> {
        let mut key = vec![0.0; self.axes.len()];
        for (slot, axis) in key.iter_mut().zip(&self.axes).rev() {
            *slot = axis.values[index % axis.values.len()];
            index /= axis.values.len();
        }
        key
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellResult {
    pub key: Vec<f64>,
    pub estimate: Estimate,
    pub reference: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub config_hash: String,
    pub seed: u64,
    pub git_describe: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub metadata: Metadata,
    pub axes: Vec<String>,
    pub cells: Vec<CellResult>,
}

/// `git describe` of the source tree this library was built from.
pub fn git_describe() -> String {
    std::process::Command::new("git")
        .args(["describe", "--always", "--dirty", "--tags"])
        .current_dir(env!("CARGO_MANIFEST_DIR"))
        .output()
        .ok()
        .filter(|o| o.status.success())
        .and_then(|o| String::from_utf8(o.stdout).ok())
        .map(|s| s.trim().to_string())
        .filter(|s| !s.is_empty())
        .unwrap_or_else(|| "unknown".into())
}

#[derive(Serialize, Deserialize)]
struct Marker {
    config_hash: String,
    index: usize,
    cell: CellResult,
}

pub const CSV_FILE: &str = "sweep.csv";
pub const JSON_FILE: &str = "sweep.json";
pub const CELL_DIR: &str = "cells";

fn marker_path(out: &Path, index: usize) -> PathBuf {
    out.join(CELL_DIR).join(format!("cell-{index:06}.json"))
}

fn read_marker(path: &Path, hash: &str, index: usize) -> Option<CellResult> {
    let text = fs::read_to_string(path).ok()?;
    let m: Marker = serde_json::from_str(&text).ok()?;
    (m.config_hash == hash && m.index == index).then_some(m.cell)
}

/// Evaluates every cell of the grid. With `out`, completed cells are
/// recorded under `out/cells/` and reused by a rerun of the same config,
/// and the result is written to `out/sweep.csv` and `out/sweep.json`.
pub fn run_sweep(config: &ExperimentConfig, out: Option<&Path>) -> Result<ExperimentResult, SimError> {
    config.validate()?;
    let hash = config.hash();
    if let Some(dir) = out {
        let cells = dir.join(CELL_DIR);
        fs::create_dir_all(&cells).map_err(|e| io_err(&cells, e))?;
    }
    let cells: Vec<Result<CellResult, SimError>> = (0..config.cell_count())
        .into_par_iter()
        .map(|index| {
            if let Some(done) = out.and_then(|d| read_marker(&marker_path(d, index), &hash, index)) {
                return Ok(done);
            }
            let key = config.cell_key(index);
            let mut exp = config.experiment.clone();
            for (axis, &v) in config.axes.iter().zip(&key) {
                exp = exp.with(&axis.name, v)?;
            }
            let (estimate, reference) = exp.evaluate(config.trials, derive_seed(config.seed, index as u64))?;
            let cell = CellResult { key, estimate, reference };
            if let Some(dir) = out {
                let path = marker_path(dir, index);
                let marker = Marker { config_hash: hash.clone(), index, cell: cell.clone() };
                let text = serde_json::to_string(&marker).expect("marker serializes");
                fs::write(&path, text).map_err(|e| io_err(&path, e))?;
            }
            Ok(cell)
        })
        .collect();
    let result = ExperimentResult {
        metadata: Metadata { config_hash: hash, seed: config.seed, git_describe: git_describe() },
        axes: config.axes.iter().map(|a| a.name.clone()).collect(),
        cells: cells.into_iter().collect::<Result<_, _>>()?,
    };
    if let Some(dir) = out {
        let csv_path = dir.join(CSV_FILE);
        let file = fs::File::create(&csv_path).map_err(|e| io_err(&csv_path, e))?;
        write_csv(&result, file).map_err(|e| io_err(&csv_path, e))?;
        let json_path = dir.join(JSON_FILE);
        let json = serde_json::to_string_pretty(&result).expect("result serializes");
        fs::write(&json_path, json + "\n").map_err(|e| io_err(&json_path, e))?;
    }
    Ok(result)
}

/// Columns after the axis keys.
pub const VALUE_COLUMNS: [&str; 4] = ["estimate", "stderr", "trials", "reference"];

/// One header row, axis columns first, then [`VALUE_COLUMNS`]. Floats use
/// the shortest representation that parses back to the same value.
pub fn write_csv<W: Write>(result: &ExperimentResult, writer: W) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(writer);
    let header: Vec<&str> = result.axes.iter().map(String::as_str).chain(VALUE_COLUMNS).collect();
    w.write_record(&header)?;
    for cell in &result.cells {
        let mut row: Vec<String> = cell.key.iter().map(|v| v.to_string()).collect();
        row.push(cell.estimate.mean.to_string());
        row.push(cell.estimate.stderr.to_string());
        row.push(cell.estimate.trials.to_string());
        row.push(cell.reference.map(|r| r.to_string()).unwrap_or_default());
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Inverse of [`write_csv`]: the axis names and the cells.
pub fn read_csv<R: Read>(reader: R) -> Result<(Vec<String>, Vec<CellResult>), SimError> {
    let bad = |e: &dyn std::fmt::Display| SimError::Io(format!("csv: {e}"));
    let mut r = csv::Reader::from_reader(reader);
    let header: Vec<String> = r.headers().map_err(|e| bad(&e))?.iter().map(String::from).collect();
    let axes_len = header.len().checked_sub(VALUE_COLUMNS.len()).ok_or_else(|| bad(&"short header"))?;
    if header[axes_len..] != VALUE_COLUMNS {
        return Err(bad(&"value columns do not match the schema"));
    }
    let float = |s: &str| s.parse::<f64>().map_err(|e| bad(&e));
    let mut cells = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| bad(&e))?;
        let key = rec.iter().take(axes_len).map(float).collect::<Result<_, _>>()?;
        let estimate = Estimate {
            mean: float(&rec[axes_len])?,
            stderr: float(&rec[axes_len + 1])?,
            trials: rec[axes_len + 2].parse().map_err(|e| bad(&e))?,
        };
        let reference = match &rec[axes_len + 3] {
            "" => None,
            s => Some(float(s)?),
        };
        cells.push(CellResult { key, estimate, reference });
    }
    Ok((header[..axes_len].to_vec(), cells))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn moments_merge_matches_single_pass() {
        let xs: Vec<f64> = (0..1000).map(|i| ((i * 37) % 101) as f64 / 7.0).collect();
        let mut one = Moments::default();
        xs.iter().for_each(|&x| one.push(x));
        let (mut a, mut b) = (Moments::default(), Moments::default());
        xs[..313].iter().for_each(|&x| a.push(x));
        xs[313..].iter().for_each(|&x| b.push(x));
        let m = a.merge(b);
        assert!((m.mean - one.mean).abs() < 1e-12);
        assert!((m.m2 - one.m2).abs() < 1e-9 * one.m2);
    }

    #[test]
    fn cell_keys_run_last_axis_fastest() {
        let cfg = ExperimentConfig {
            experiment: Experiment::LeakageBound {
                n: 1.0,
                r_c: 0.5,
                r_n: 0.1,
                xi: 0.1,
                eps_a: 1.0,
                eps_c: 0.0,
                eps_beta: 1.0,
            },
            axes: vec![
                Axis { name: "n".into(), values: vec![1.0, 2.0] },
                Axis { name: "xi".into(), values: vec![0.0, 0.1, 0.2] },
            ],
            trials: 1,
            seed: 0,
        };
        assert_eq!(cfg.cell_count(), 6);
        assert_eq!(cfg.cell_key(0), vec![1.0, 0.0]);
        assert_eq!(cfg.cell_key(4), vec![2.0, 0.1]);
    }
}
