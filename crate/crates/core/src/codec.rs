//! End-to-end wiretap pipeline: hash inversion, channel coding, transmission
//! to both receivers, decoding and hashing back, plus multi-message sessions
//! that reuse one seed.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::channel::{transmit, ChannelError, ChannelModel, OutputRecord, Symbols, WiretapChannel};
use crate::ecc::{Alphabet, CodeSpec, EccError};
use crate::gf::BitString;
use crate::rng::{self, Purpose};
use crate::uhf::{HashSeed, RandomPad, SsUhf, UhfError, WiretapParams};

#[derive(Debug, thiserror::Error)]
pub enum CodecError {
    #[error("configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Uhf(#[from] UhfError),
    #[error(transparent)]
    Ecc(#[from] EccError),
    #[error(transparent)]
    Channel(#[from] ChannelError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    pub params: WiretapParams,
    pub code: CodeSpec,
    pub wiretap: WiretapChannel,
    pub seed: u64,
}

/// A validated configuration with its hash family instantiated.
#[derive(Debug, Clone)]
pub struct Pipeline {
    config: PipelineConfig,
    family: SsUhf,
}

fn accepts(code: &CodeSpec, channel: &ChannelModel) -> Result<(), CodecError> {
    match (code.alphabet(), channel) {
        (Alphabet::Binary, ChannelModel::Dmc(d)) if d.inputs() >= 2 => Ok(()),
        (Alphabet::Real, ChannelModel::Awgn { power, .. } | ChannelModel::FastFading { power, .. }) => {
            let p = code.power_limit().expect("real code has a power level");
            if p > power * (1.0 + 1e-12) {
                Err(CodecError::Config(format!("code power {p} exceeds channel limit {power}")))
            } else {
                Ok(())
            }
        }
        _ => Err(CodecError::Config(format!("code {code} cannot drive this channel"))),
    }
}

impl Pipeline {
    pub fn new(config: PipelineConfig) -> Result<Self, CodecError> {
        let p = config.params;
        if config.code.l() != p.l() || config.code.n() != p.n() {
            return Err(CodecError::Config(format!(
                "code {} has (n, l) = ({}, {}) but params ask for ({}, {})",
                config.code,
                config.code.n(),
                config.code.l(),
                p.n(),
                p.l()
            )));
        }
        accepts(&config.code, &config.wiretap.main)?;
        accepts(&config.code, &config.wiretap.eve)?;
        let family = SsUhf::new(p)?;
        Ok(Self { config, family })
    }

    pub fn config(&self) -> &PipelineConfig {
        &self.config
    }

    pub fn params(&self) -> WiretapParams {
        self.config.params
    }

    pub fn family(&self) -> &SsUhf {
        &self.family
    }

    pub fn code(&self) -> &CodeSpec {
        &self.config.code
    }

    /// Pseudo-message `phi_s(m, pad)` for `m`.
    pub fn preprocess(&self, seed: &HashSeed, m: &BitString, pad: &RandomPad) -> Result<BitString, CodecError> {
        Ok(self.family.hash_invert(seed, m, pad)?)
    }

    /// Codeword for `m`: the encoded pseudo-message.
    pub fn wiretap_encode(&self, seed: &HashSeed, m: &BitString, pad: &RandomPad) -> Result<Symbols, CodecError> {
        let m_prime = self.preprocess(seed, m, pad)?;
        Ok(self.config.code.encode(&m_prime)?)
    }

    /// Message estimate from a main-channel output; the receiver knows its
    /// own fading gains when the channel has them.
    pub fn wiretap_decode(&self, seed: &HashSeed, y: &Symbols, gains: Option<&[f64]>) -> Result<BitString, CodecError> {
        let m_prime_hat = self.config.code.decode(y, gains)?;
        Ok(self.family.hash_forward(seed, &m_prime_hat)?)
    }

    /// Sends `messages` under one freshly drawn seed, each over its own
    /// independent instance of both channels.
    ///
    /// All randomness comes from substreams indexed by `session` and the
    /// message position, so equal `(config.seed, session)` give equal records.
    pub fn run_session(
        &self,
        messages: &[BitString],
        session: u64,
        options: &SessionOptions,
    ) -> Result<SessionRecord, CodecError> {
        if messages.is_empty() {
            return Err(CodecError::Config("a session needs at least one message".into()));
        }
        if messages.len() as u64 > rng::MAX_SESSION_LEN {
            return Err(CodecError::Config(format!("at most {} messages per session", rng::MAX_SESSION_LEN)));
        }
        if let Some(p) = options.inject_error {
            if !(0.0..=1.0).contains(&p) {
                return Err(CodecError::Config(format!("injected error probability {p} outside [0, 1]")));
            }
        }
        let base = self.config.seed;
        let seed = self.family.sample_seed(&mut rng::substream(base, Purpose::HashSeed, session));
        let mut records = Vec::with_capacity(messages.len());
        for (i, m) in messages.iter().enumerate() {
            let slot = rng::session_slot(session, i as u64);
            let pad = self.family.sample_pad(&mut rng::substream(base, Purpose::Pad, slot));
            let m_prime = self.preprocess(&seed, m, &pad)?;
            let x = self.config.code.encode(&m_prime)?;
            let mut chan = rng::substream(base, Purpose::Channel, slot);
            let y = transmit(&self.config.wiretap.main, &x, &mut chan)?;
            let z = transmit(&self.config.wiretap.eve, &x, &mut chan)?;
            let m_prime_hat = self.config.code.decode(&y.z, y.h.as_deref())?;
            let mut m_hat = self.family.hash_forward(&seed, &m_prime_hat)?;
            let mut injected = false;
            if let Some(p) = options.inject_error {
                if rng::substream(base, Purpose::Inject, slot).random_bool(p) {
                    let msb = m_hat.len() - 1;
                    let first = m_hat.bit(msb);
                    m_hat.set_bit(msb, !first);
                    injected = true;
                }
            }
            records.push(MessageRecord {
                pseudo_error: m_prime_hat != m_prime,
                error: m_hat != *m,
                m: m.clone(),
                pad,
                m_prime,
                x,
                y,
                z,
                m_prime_hat,
                m_hat,
                injected,
            });
        }
        let session_error = records.iter().any(|r| r.error);
        Ok(SessionRecord { seed, eta: messages.len(), messages: records, session_error })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SessionOptions {
    /// Independently per message, corrupt the decoded message with this
    /// probability (flipping its first bit) after normal decoding.
    pub inject_error: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MessageRecord {
    pub m: BitString,
    pub pad: RandomPad,
    pub m_prime: BitString,
    pub x: Symbols,
    /// Main receiver output.
    pub y: OutputRecord,
    /// Eavesdropper output.
    pub z: OutputRecord,
    pub m_prime_hat: BitString,
    pub m_hat: BitString,
    pub pseudo_error: bool,
    pub error: bool,
    pub injected: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionRecord {
    pub seed: HashSeed,
    pub eta: usize,
    pub messages: Vec<MessageRecord>,
    pub session_error: bool,
}

impl SessionRecord {
    /// Every length agrees with `params`.
    pub fn is_consistent(&self, params: WiretapParams) -> bool {
        self.eta == self.messages.len()
            && self.seed.s().len() == params.l()
            && self.messages.iter().all(|r| {
                r.m.len() == params.k()
                    && r.pad.0.len() == params.b()
                    && r.m_prime.len() == params.l()
                    && r.m_prime_hat.len() == params.l()
                    && r.m_hat.len() == params.k()
                    && r.x.len() == params.n()
                    && r.y.z.len() == params.n()
                    && r.z.z.len() == params.n()
            })
    }
}

/// Growth of a quantity with block length `n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum Growth {
    /// `value` for every `n`.
    Constant { value: f64 },
    /// `a * ln(n)`.
    Logarithmic { a: f64 },
    /// `a * n^gamma`, `gamma > 0`.
    Polynomial { a: f64, gamma: f64 },
}

/// A probability schedule in `n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum Decay {
    Zero,
    /// `a * n^{-beta}`.
    Polynomial { a: f64, beta: f64 },
    /// `a * exp(-c n^beta)`.
    Exponential { a: f64, c: f64, beta: f64 },
}

impl Growth {
    pub fn at(&self, n: f64) -> f64 {
        match *self {
            Growth::Constant { value } => value,
            Growth::Logarithmic { a } => (a * n.ln()).max(1.0),
            Growth::Polynomial { a, gamma } => (a * n.powf(gamma)).max(1.0),
        }
    }

    /// Polynomial order, with logarithms as order 0 but unbounded.
    fn order(&self) -> (f64, bool) {
        match *self {
            Growth::Constant { .. } => (0.0, false),
            Growth::Logarithmic { .. } => (0.0, true),
            Growth::Polynomial { gamma, .. } => (gamma, true),
        }
    }
}

impl Decay {
    pub fn at(&self, n: f64) -> f64 {
        match *self {
            Decay::Zero => 0.0,
            Decay::Polynomial { a, beta } => (a * n.powf(-beta)).min(1.0),
            Decay::Exponential { a, c, beta } => (a * (-c * n.powf(beta)).exp()).min(1.0),
        }
    }

    /// Whether `n^order * log(n) * self -> 0`.
    fn beats(&self, order: f64) -> bool {
        match *self {
            Decay::Zero => true,
            Decay::Exponential { c, beta, .. } => c > 0.0 && beta > 0.0,
            Decay::Polynomial { a, beta } => a == 0.0 || beta > order,
        }
    }
}

/// Which of the three asymptotic conditions on the session length hold,
/// with the finite-`n` quantities behind them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EtaRequirements {
    pub n: f64,
    pub eta: f64,
    /// `eta -> infinity`: the seed's share of channel uses vanishes.
    pub rate_loss_vanishes: bool,
    /// `(1 - p_e)^eta -> 1`.
    pub reliability_loss_vanishes: bool,
    /// `eta` subexponential and `eps * eta * n -> 0`.
    pub security_loss_vanishes: bool,
    /// `c / (eta + c)` at this `n`.
    pub rate_loss: f64,
    /// `1 - (1 - p_e)^eta` at this `n`.
    pub reliability_loss: f64,
    /// `eps * eta * n` at this `n`.
    pub security_term: f64,
}

pub fn eta_requirements(eta: Growth, p_e: Decay, eps: Decay, c_seed: f64, n: f64) -> EtaRequirements {
    let (order, unbounded) = eta.order();
    let e = eta.at(n);
    let p = p_e.at(n);
    EtaRequirements {
        n,
        eta: e,
        rate_loss_vanishes: unbounded,
        reliability_loss_vanishes: p_e.beats(order),
        security_loss_vanishes: eps.beats(order + 1.0),
        rate_loss: c_seed / (e + c_seed),
        reliability_loss: 1.0 - (1.0 - p).powf(e),
        security_term: eps.at(n) * e * n,
    }
}
