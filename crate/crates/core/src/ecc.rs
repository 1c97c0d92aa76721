//! Error-correcting codes wrapped by the wiretap preprocessor.
//!
//! Binary codes emit symbols in `{0, 1}`; their BPSK mapping sends bit 1 to
//! `+sqrt(P)` and bit 0 to `-sqrt(P)`, so every codeword has average power
//! exactly `P`. Codeword positions follow the MSB-first order of the
//! pseudo-message.

use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{ChannelError, ChannelModel, Symbols};
use crate::gf::BitString;
use crate::numeric::CompensatedSum;

/// Largest output space `|Y|^n` that exact error computation will enumerate.
pub const MAX_ENUMERATED_OUTPUTS: u64 = 1 << 20;
/// Largest `l` for which an explicit codebook is built.
pub const MAX_CODEBOOK_BITS: usize = 20;

#[derive(Debug, thiserror::Error)]
pub enum EccError {
    #[error("invalid code description: {0}")]
    InvalidSpec(String),
    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("symbol type does not match the code alphabet")]
    Alphabet,
    #[error("output space of {outputs} sequences exceeds the enumeration limit {limit}; use Monte Carlo instead")]
    TooLargeToEnumerate { outputs: u128, limit: u64 },
    #[error("codebook for l = {l} exceeds the explicit limit {max}")]
    CodebookTooLarge { l: usize, max: usize },
    #[error("codeword for message {message} has average power {average} > {limit}")]
    PowerViolation { message: String, average: f64, limit: f64 },
    #[error("codewords for {a} and {b} coincide")]
    NotInjective { a: String, b: String },
    #[error(transparent)]
    Channel(#[from] ChannelError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Alphabet {
    Binary,
    Real,
}

/// Structure of the binary code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CodeKind {
    /// `l` bits sent as they are.
    Identity { l: usize },
    /// Each of `l` bits repeated `rho` times in a row.
    Repetition { rho: usize, l: usize },
    /// `blocks` independent Hamming(7,4) blocks.
    Hamming74 { blocks: usize },
}

/// A concrete code: binary structure plus an optional BPSK power level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CodeSpec {
    kind: CodeKind,
    bpsk_power: Option<f64>,
}

/// Systematic generator rows: data bit `i` contributes `HAMMING_PARITY[i]`
/// to parity bits (p1, p2, p3), MSB = p1.
const HAMMING_PARITY: [u8; 4] = [0b110, 0b101, 0b011, 0b111];

fn hamming_encode_nibble(d: u8) -> u8 {
    let mut parity = 0;
    for (i, p) in HAMMING_PARITY.iter().enumerate() {
        if d >> (3 - i) & 1 == 1 {
            parity ^= p;
        }
    }
    (d << 3) | parity
}

/// Syndrome of a 7-bit word (MSB = position 0) to the single-bit error
/// pattern that produces it.
fn hamming_syndrome_table() -> [u8; 8] {
    let syndrome = |w: u8| {
        let d = w >> 3;
        (hamming_encode_nibble(d) ^ w) & 0b111
    };
    let mut table = [0u8; 8];
    for pos in 0..7 {
        let e = 1u8 << (6 - pos);
        table[syndrome(e) as usize] = e;
    }
    debug_assert!(table.iter().skip(1).all(|&e| e != 0));
    table
}

fn hamming_decode_word(w: u8, table: &[u8; 8]) -> u8 {
    let s = (hamming_encode_nibble(w >> 3) ^ w) & 0b111;
    (w ^ table[s as usize]) >> 3
}

impl CodeSpec {
    pub fn identity(l: usize) -> Result<Self, EccError> {
        if l == 0 {
            return Err(EccError::InvalidSpec("identity code needs l >= 1".into()));
        }
        Ok(Self { kind: CodeKind::Identity { l }, bpsk_power: None })
    }

    pub fn repetition(rho: usize, l: usize) -> Result<Self, EccError> {
        if rho == 0 || l == 0 {
            return Err(EccError::InvalidSpec("repetition code needs rho >= 1 and l >= 1".into()));
        }
        Ok(Self { kind: CodeKind::Repetition { rho, l }, bpsk_power: None })
    }

    pub fn hamming74(blocks: usize) -> Result<Self, EccError> {
        if blocks == 0 {
            return Err(EccError::InvalidSpec("Hamming code needs at least one block".into()));
        }
        Ok(Self { kind: CodeKind::Hamming74 { blocks }, bpsk_power: None })
    }

    /// Real-alphabet version sending `+-sqrt(power)`.
    pub fn bpsk(self, power: f64) -> Result<Self, EccError> {
        if !(power.is_finite() && power > 0.0) {
            return Err(EccError::InvalidSpec(format!("BPSK power must be positive, got {power}")));
        }
        Ok(Self { bpsk_power: Some(power), ..self })
    }

    /// Binary structure without the real mapping.
    pub fn binary(self) -> Self {
        Self { bpsk_power: None, ..self }
    }

    /// The same code family resized to carry `l` information bits.
    pub fn with_info_bits(self, l: usize) -> Result<Self, EccError> {
        let resized = match self.kind {
            CodeKind::Identity { .. } => Self::identity(l)?,
            CodeKind::Repetition { rho, .. } => Self::repetition(rho, l)?,
            CodeKind::Hamming74 { .. } => {
                if l % 4 != 0 {
                    return Err(EccError::InvalidSpec(format!("Hamming(7,4) blocks carry 4 bits; l = {l}")));
                }
                Self::hamming74(l / 4)?
            }
        };
        Ok(Self { bpsk_power: self.bpsk_power, ..resized })
    }

    /// Maps to BPSK with the channel's power when the channel is real-valued.
    pub fn for_channel(self, channel: &ChannelModel) -> Result<Self, EccError> {
        match channel.power() {
            Some(p) => self.binary().bpsk(p),
            None => Ok(self.binary()),
        }
    }

    pub fn kind(&self) -> CodeKind {
        self.kind
    }

    /// Information bits per codeword.
    pub fn l(&self) -> usize {
        match self.kind {
            CodeKind::Identity { l } | CodeKind::Repetition { l, .. } => l,
            CodeKind::Hamming74 { blocks } => 4 * blocks,
        }
    }

    /// Block length in channel uses.
    pub fn n(&self) -> usize {
        match self.kind {
            CodeKind::Identity { l } => l,
            CodeKind::Repetition { rho, l } => rho * l,
            CodeKind::Hamming74 { blocks } => 7 * blocks,
        }
    }

    /// Exact rate `l / n`.
    pub fn rate(&self) -> Ratio<u64> {
        Ratio::new(self.l() as u64, self.n() as u64)
    }

    pub fn alphabet(&self) -> Alphabet {
        if self.bpsk_power.is_some() {
            Alphabet::Real
        } else {
            Alphabet::Binary
        }
    }

    pub fn power_limit(&self) -> Option<f64> {
        self.bpsk_power
    }

    fn binary_codeword(&self, m: &[bool]) -> Vec<bool> {
        match self.kind {
            CodeKind::Identity { .. } => m.to_vec(),
            CodeKind::Repetition { rho, .. } => m.iter().flat_map(|&b| std::iter::repeat_n(b, rho)).collect(),
            CodeKind::Hamming74 { .. } => m
                .chunks(4)
                .flat_map(|c| {
                    let d = c.iter().fold(0u8, |acc, &b| (acc << 1) | b as u8);
                    let w = hamming_encode_nibble(d);
                    (0..7).map(move |i| w >> (6 - i) & 1 == 1)
                })
                .collect(),
        }
    }

    /// Deterministic codeword for `m_prime`.
    pub fn encode(&self, m_prime: &BitString) -> Result<Symbols, EccError> {
        if m_prime.len() != self.l() {
            return Err(EccError::LengthMismatch { expected: self.l(), actual: m_prime.len() });
        }
        let bits = self.binary_codeword(&m_prime.to_msb_bits());
        Ok(match self.bpsk_power {
            None => Symbols::Discrete(bits.into_iter().map(u32::from).collect()),
            Some(p) => {
                let a = p.sqrt();
                Symbols::Real(bits.into_iter().map(|b| if b { a } else { -a }).collect())
            }
        })
    }

    /// Decodes a channel output of length `n`; always returns some message.
    ///
    /// Discrete outputs are hard decisions, any nonzero symbol read as 1.
    /// Real outputs are decoded by maximum correlation, which is maximum
    /// likelihood for BPSK in Gaussian noise; fading gains, when given,
    /// weight each position. Ties resolve to bit 0.
    pub fn decode(&self, y: &Symbols, gains: Option<&[f64]>) -> Result<BitString, EccError> {
        if y.len() != self.n() {
            return Err(EccError::LengthMismatch { expected: self.n(), actual: y.len() });
        }
        if let Some(h) = gains {
            if h.len() != self.n() {
                return Err(EccError::LengthMismatch { expected: self.n(), actual: h.len() });
            }
        }
        let soft: Vec<f64> = match y {
            Symbols::Discrete(v) => v.iter().map(|&s| if s != 0 { 1.0 } else { -1.0 }).collect(),
            Symbols::Real(v) => match gains {
                Some(h) => v.iter().zip(h).map(|(a, g)| a * g).collect(),
                None => v.clone(),
            },
        };
        Ok(BitString::from_msb_bits(&self.decode_soft(&soft)))
    }

    /// Decoding on per-position scores, positive favouring bit 1.
    fn decode_soft(&self, soft: &[f64]) -> Vec<bool> {
        match self.kind {
            CodeKind::Identity { .. } => soft.iter().map(|&s| s > 0.0).collect(),
            CodeKind::Repetition { rho, .. } => soft.chunks(rho).map(|c| c.iter().sum::<f64>() > 0.0).collect(),
            CodeKind::Hamming74 { .. } => soft
                .chunks(7)
                .flat_map(|c| {
                    let d = if self.bpsk_power.is_none() {
                        let w = c.iter().fold(0u8, |acc, &s| (acc << 1) | (s > 0.0) as u8);
                        hamming_decode_word(w, &HAMMING_SYNDROMES)
                    } else {
                        hamming_correlation_decode(c)
                    };
                    (0..4).map(move |i| d >> (3 - i) & 1 == 1)
                })
                .collect(),
        }
    }

    /// Maximum over messages of the exact decoding error probability on a
    /// discrete channel, by enumerating every output sequence.
    pub fn error_probability_exact(&self, channel: &ChannelModel) -> Result<f64, EccError> {
        let ChannelModel::Dmc(dmc) = channel else {
            return Err(EccError::Alphabet);
        };
        if self.alphabet() != Alphabet::Binary || dmc.inputs() < 2 {
            return Err(EccError::Alphabet);
        }
        let n = self.n();
        let outputs = (dmc.outputs() as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
        if outputs > MAX_ENUMERATED_OUTPUTS as u128 {
            return Err(EccError::TooLargeToEnumerate { outputs, limit: MAX_ENUMERATED_OUTPUTS });
        }
        if self.l() > MAX_CODEBOOK_BITS {
            return Err(EccError::CodebookTooLarge { l: self.l(), max: MAX_CODEBOOK_BITS });
        }
        let q = dmc.outputs() as u64;
        let ys: Vec<Vec<u32>> = (0..outputs as u64)
            .map(|mut idx| {
                let mut y = vec![0u32; n];
                for slot in y.iter_mut().rev() {
                    *slot = (idx % q) as u32;
                    idx /= q;
                }
                y
            })
            .collect();
        let decoded: Vec<BitString> = ys
            .par_iter()
            .map(|y| self.decode(&Symbols::Discrete(y.clone()), None).expect("length n"))
            .collect();
        let errors: Vec<f64> = BitString::all(self.l())
            .collect::<Vec<_>>()
            .par_iter()
            .map(|m| {
                let x = self.encode(m).expect("length l");
                let x = x.as_discrete().expect("binary code");
                let mut acc = CompensatedSum::new();
                for (y, m_hat) in ys.iter().zip(&decoded) {
                    if m_hat != m {
                        acc.add(y.iter().zip(x).map(|(&yi, &xi)| dmc.prob(xi as usize, yi as usize)).product());
                    }
                }
                acc.value().clamp(0.0, 1.0)
            })
            .collect();
        Ok(errors.into_iter().fold(0.0, f64::max))
    }
}

static HAMMING_SYNDROMES: std::sync::LazyLock<[u8; 8]> = std::sync::LazyLock::new(hamming_syndrome_table);

fn hamming_correlation_decode(scores: &[f64]) -> u8 {
    let mut best = (f64::NEG_INFINITY, 0u8);
    for d in 0..16u8 {
        let w = hamming_encode_nibble(d);
        let corr: f64 = scores.iter().enumerate().map(|(i, s)| if w >> (6 - i) & 1 == 1 { *s } else { -*s }).sum();
        if corr > best.0 {
            best = (corr, d);
        }
    }
    best.1
}

impl fmt::Display for CodeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(p) = self.bpsk_power {
            write!(f, "bpsk:{p}:")?;
        }
        match self.kind {
            CodeKind::Identity { l } => write!(f, "identity:{l}"),
            CodeKind::Repetition { rho, l: 1 } => write!(f, "repetition:{rho}"),
            CodeKind::Repetition { rho, l } => write!(f, "repetition:{rho}:{l}"),
            CodeKind::Hamming74 { blocks: 1 } => write!(f, "hamming74"),
            CodeKind::Hamming74 { blocks } => write!(f, "hamming74:{blocks}"),
        }
    }
}

/// Names: `identity:L`, `repetition:R[:L]`, `hamming74[:BLOCKS]`, each
/// optionally prefixed by `bpsk:P:`.
impl FromStr for CodeSpec {
    type Err = EccError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || EccError::InvalidSpec(format!("unrecognised code {s:?}"));
        let parts: Vec<&str> = s.trim().split(':').collect();
        let num = |p: &str| p.parse::<usize>().map_err(|_| bad());
        match parts.as_slice() {
            ["bpsk", p, rest @ ..] if !rest.is_empty() => {
                let power: f64 = p.parse().map_err(|_| bad())?;
                rest.join(":").parse::<CodeSpec>()?.bpsk(power)
            }
            ["identity", l] => Self::identity(num(l)?),
            ["repetition", r] => Self::repetition(num(r)?, 1),
            ["repetition", r, l] => Self::repetition(num(r)?, num(l)?),
            ["hamming74"] => Self::hamming74(1),
            ["hamming74", b] => Self::hamming74(num(b)?),
            _ => Err(bad()),
        }
    }
}

impl Serialize for CodeSpec {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for CodeSpec {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Explicit table of all `2^l` codewords, indexed by the message's integer
/// value; built only after checking injectivity and the power limit.
#[derive(Debug, Clone)]
pub struct Codebook {
    pub spec: CodeSpec,
    pub words: Vec<Symbols>,
}

impl Codebook {
    pub fn build(spec: CodeSpec) -> Result<Self, EccError> {
        let l = spec.l();
        if l > MAX_CODEBOOK_BITS {
            return Err(EccError::CodebookTooLarge { l, max: MAX_CODEBOOK_BITS });
        }
        let words: Vec<Symbols> = BitString::all(l).map(|m| spec.encode(&m)).collect::<Result<_, _>>()?;
        if let Some(limit) = spec.power_limit() {
            for (i, w) in words.iter().enumerate() {
                let v = w.as_real().expect("real alphabet");
                let average = v.iter().map(|a| a * a).sum::<f64>() / v.len() as f64;
                if average > limit * (1.0 + 1e-12) {
                    let message = BitString::from_u64(i as u64, l).expect("fits").to_string();
                    return Err(EccError::PowerViolation { message, average, limit });
                }
            }
        }
        let mut keys: Vec<(Vec<u64>, usize)> = words
            .iter()
            .enumerate()
            .map(|(i, w)| {
                let key = match w {
                    Symbols::Discrete(v) => v.iter().map(|&s| s as u64).collect(),
                    Symbols::Real(v) => v.iter().map(|a| a.to_bits()).collect(),
                };
                (key, i)
            })
            .collect();
        keys.sort();
        if let Some(pair) = keys.windows(2).find(|p| p[0].0 == p[1].0) {
            let name = |i: usize| BitString::from_u64(i as u64, l).expect("fits").to_string();
            return Err(EccError::NotInjective { a: name(pair[0].1), b: name(pair[1].1) });
        }
        Ok(Self { spec, words })
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bits(s: &str) -> BitString {
        s.parse().unwrap()
    }

    #[test]
    fn names_round_trip() {
        for name in ["identity:8", "repetition:3", "repetition:3:4", "hamming74", "hamming74:2", "bpsk:1:repetition:3"] {
            let c: CodeSpec = name.parse().unwrap();
            assert_eq!(c.to_string(), name);
        }
        assert!("hamming".parse::<CodeSpec>().is_err());
        assert!("repetition:0".parse::<CodeSpec>().is_err());
        assert!("bpsk:-1:identity:2".parse::<CodeSpec>().is_err());
    }

    #[test]
    fn rates_are_exact() {
        assert_eq!(CodeSpec::hamming74(3).unwrap().rate(), Ratio::new(4, 7));
        assert_eq!(CodeSpec::repetition(3, 2).unwrap().rate(), Ratio::new(1, 3));
    }

    #[test]
    fn repetition_examples() {
        let c = CodeSpec::repetition(3, 1).unwrap();
        assert_eq!(c.encode(&bits("1")).unwrap(), Symbols::Discrete(vec![1, 1, 1]));
        assert_eq!(c.decode(&Symbols::Discrete(vec![1, 1, 0]), None).unwrap(), bits("1"));
        let r = c.bpsk(1.0).unwrap();
        assert_eq!(r.encode(&bits("1")).unwrap(), Symbols::Real(vec![1.0, 1.0, 1.0]));
    }

    #[test]
    fn hamming_syndromes_cover_all_positions() {
        let mut seen: Vec<u8> = HAMMING_SYNDROMES.iter().skip(1).copied().collect();
        seen.sort();
        assert_eq!(seen, (0..7).map(|p| 1u8 << p).collect::<Vec<_>>());
    }

    #[test]
    fn resizing_keeps_family() {
        let h = CodeSpec::hamming74(1).unwrap().with_info_bits(8).unwrap();
        assert_eq!((h.l(), h.n()), (8, 14));
        assert!(CodeSpec::hamming74(1).unwrap().with_info_bits(6).is_err());
        let r = CodeSpec::repetition(3, 1).unwrap().bpsk(2.0).unwrap().with_info_bits(2).unwrap();
        assert_eq!((r.n(), r.power_limit()), (6, Some(2.0)));
    }

    #[test]
    fn enumeration_limit_is_enforced() {
        let c = CodeSpec::identity(21).unwrap();
        let err = c.error_probability_exact(&ChannelModel::bsc(0.1).unwrap());
        assert!(matches!(err, Err(EccError::TooLargeToEnumerate { .. })));
        let awgn = ChannelModel::awgn(1.0, 1.0).unwrap();
        assert!(matches!(c.error_probability_exact(&awgn), Err(EccError::Alphabet)));
    }
}
