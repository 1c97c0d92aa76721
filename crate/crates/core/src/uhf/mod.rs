//! The seeded invertible hash family `f_{s,t}(m') = [(s * m') + t]_k` over
//! GF(2^l), with even inverses `phi_{s,t,r}(m) = s^{-1} * ((m || r) + t)`.
//!
//! Seeds range over `s != 0`, `t` arbitrary, so the family has
//! `(2^l - 1) * 2^l` members.

mod verify;

use std::fmt;
use std::sync::Arc;

use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gf::{BitString, FieldContext, FieldError};

pub use verify::{pseudo_message_distribution, verify_family, Property, VerificationReport, MAX_EXHAUSTIVE_L};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum UhfError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("seed component s must be nonzero")]
    ZeroSeed,
    #[error("exhaustive mode supports l <= {max}, got l = {l}")]
    TooLargeForExhaustive { l: usize, max: usize },
    #[error("invalid message distribution: {0}")]
    Distribution(String),
}

/// Block length, message bits and pseudo-message bits; `b = l - k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawParams", into = "RawParams")]
pub struct WiretapParams {
    n: usize,
    k: usize,
    l: usize,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawParams {
    n: usize,
    k: usize,
    l: usize,
}

impl TryFrom<RawParams> for WiretapParams {
    type Error = UhfError;
    fn try_from(r: RawParams) -> Result<Self, UhfError> {
        WiretapParams::new(r.n, r.k, r.l)
    }
}

impl From<WiretapParams> for RawParams {
    fn from(p: WiretapParams) -> Self {
        RawParams { n: p.n, k: p.k, l: p.l }
    }
}

impl WiretapParams {
    pub fn new(n: usize, k: usize, l: usize) -> Result<Self, UhfError> {
        if n == 0 {
            return Err(UhfError::InvalidParams("block length n must be positive".into()));
        }
        if k == 0 || k >= l {
            return Err(UhfError::InvalidParams(format!("need 1 <= k < l, got k = {k}, l = {l}")));
        }
        Ok(Self { n, k, l })
    }

    /// `l = round(n * code_rate)`, `k = round(n * message_rate)`.
    pub fn from_rates(n: usize, code_rate: f64, message_rate: f64) -> Result<Self, UhfError> {
        if !(code_rate.is_finite() && message_rate.is_finite()) || code_rate < 0.0 || message_rate < 0.0 {
            return Err(UhfError::InvalidParams("rates must be finite and non-negative".into()));
        }
        let l = (n as f64 * code_rate).round() as usize;
        let k = (n as f64 * message_rate).round() as usize;
        Self::new(n, k, l)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn b(&self) -> usize {
        self.l - self.k
    }
}

/// A member `(s, t)` of the family, with `s^{-1}` cached.
///
/// Deserialization recomputes the inverse in the default field of degree
/// `len(s)`.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawSeed")]
pub struct HashSeed {
    s: BitString,
    t: BitString,
    #[serde(skip)]
    s_inv: BitString,
}

impl fmt::Debug for HashSeed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "HashSeed(s={:?}, t={:?})", self.s, self.t)
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSeed {
    s: BitString,
    t: BitString,
}

impl TryFrom<RawSeed> for HashSeed {
    type Error = UhfError;

    fn try_from(raw: RawSeed) -> Result<Self, UhfError> {
        let field = FieldContext::for_degree(raw.s.len())?;
        if raw.t.len() != raw.s.len() {
            return Err(FieldError::LengthMismatch { expected: raw.s.len(), actual: raw.t.len() }.into());
        }
        if raw.s.is_zero() {
            return Err(UhfError::ZeroSeed);
        }
        let s_inv = field.inv_bits(&raw.s)?;
        Ok(HashSeed { s: raw.s, t: raw.t, s_inv })
    }
}

impl HashSeed {
    pub fn s(&self) -> &BitString {
        &self.s
    }

    pub fn t(&self) -> &BitString {
        &self.t
    }
}

/// Uniform `b`-bit pad selecting one preimage.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RandomPad(pub BitString);

/// Interface the codec needs from a preprocessing hash family.
pub trait InvertibleHashFamily: Send + Sync {
    type Seed: Clone + fmt::Debug + Send + Sync + Serialize;

    fn params(&self) -> WiretapParams;
    fn sample_seed(&self, rng: &mut dyn RngCore) -> Self::Seed;
    fn sample_pad(&self, rng: &mut dyn RngCore) -> RandomPad {
        RandomPad(BitString::random(self.params().b(), rng))
    }
    fn hash(&self, seed: &Self::Seed, m_prime: &BitString) -> Result<BitString, UhfError>;
    fn invert(&self, seed: &Self::Seed, m: &BitString, pad: &RandomPad) -> Result<BitString, UhfError>;
}

/// The family over the field chosen for `params.l()`.
#[derive(Debug, Clone)]
pub struct SsUhf {
    params: WiretapParams,
    field: Arc<FieldContext>,
}

impl SsUhf {
    pub fn new(params: WiretapParams) -> Result<Self, UhfError> {
        Ok(Self { params, field: FieldContext::for_degree(params.l)? })
    }

    pub fn with_field(params: WiretapParams, field: Arc<FieldContext>) -> Result<Self, UhfError> {
        if field.degree() != params.l {
            return Err(UhfError::InvalidParams(format!(
                "field degree {} does not match l = {}",
                field.degree(),
                params.l
            )));
        }
        Ok(Self { params, field })
    }

    pub fn params(&self) -> WiretapParams {
        self.params
    }

    pub fn field(&self) -> &Arc<FieldContext> {
        &self.field
    }

    pub fn seed(&self, s: BitString, t: BitString) -> Result<HashSeed, UhfError> {
        if s.is_zero() {
            if s.len() != self.params.l {
                return Err(FieldError::LengthMismatch { expected: self.params.l, actual: s.len() }.into());
            }
            return Err(UhfError::ZeroSeed);
        }
        let s_inv = self.field.inv_bits(&s)?;
        if t.len() != self.params.l {
            return Err(FieldError::LengthMismatch { expected: self.params.l, actual: t.len() }.into());
        }
        Ok(HashSeed { s, t, s_inv })
    }

    /// Seed with integer components, for small `l`.
    pub fn seed_from_u64(&self, s: u64, t: u64) -> Result<HashSeed, UhfError> {
        let l = self.params.l;
        self.seed(BitString::from_u64(s, l)?, BitString::from_u64(t, l)?)
    }

    /// `(2^l - 1) * 2^l`, when it fits.
    pub fn seed_count(&self) -> Option<u128> {
        let l = self.params.l as u32;
        if l > 63 {
            return None;
        }
        Some(((1u128 << l) - 1) << l)
    }

    /// Seed number `i` in the order `s = i / 2^l + 1`, `t = i mod 2^l`.
    pub fn seed_by_index(&self, i: u64) -> Result<HashSeed, UhfError> {
        let l = self.params.l;
        if l >= 32 {
            return Err(UhfError::TooLargeForExhaustive { l, max: 31 });
        }
        self.seed_from_u64((i >> l) + 1, i & ((1 << l) - 1))
    }

    /// Rejection sampling of `s` until nonzero; exactly uniform.
    pub fn sample_seed<R: Rng + ?Sized>(&self, rng: &mut R) -> HashSeed {
        let l = self.params.l;
        let s = loop {
            let s = BitString::random(l, rng);
            if !s.is_zero() {
                break s;
            }
        };
        let t = BitString::random(l, rng);
        self.seed(s, t).expect("sampled seed is valid")
    }

    pub fn sample_pad<R: Rng + ?Sized>(&self, rng: &mut R) -> RandomPad {
        RandomPad(BitString::random(self.params.b(), rng))
    }

    pub fn hash_forward(&self, seed: &HashSeed, m_prime: &BitString) -> Result<BitString, UhfError> {
        let prod = self.field.mul_bits(&seed.s, m_prime)?;
        Ok(prod.xor(&seed.t)?.truncate_msb(self.params.k)?)
    }

    pub fn hash_invert(&self, seed: &HashSeed, m: &BitString, pad: &RandomPad) -> Result<BitString, UhfError> {
        if m.len() != self.params.k {
            return Err(FieldError::LengthMismatch { expected: self.params.k, actual: m.len() }.into());
        }
        if pad.0.len() != self.params.b() {
            return Err(FieldError::LengthMismatch { expected: self.params.b(), actual: pad.0.len() }.into());
        }
        let shifted = m.concat(&pad.0).xor(&seed.t)?;
        Ok(self.field.mul_bits(&seed.s_inv, &shifted)?)
    }
}

impl InvertibleHashFamily for SsUhf {
    type Seed = HashSeed;

    fn params(&self) -> WiretapParams {
        self.params
    }

    fn sample_seed(&self, rng: &mut dyn RngCore) -> HashSeed {
        SsUhf::sample_seed(self, rng)
    }

    fn hash(&self, seed: &HashSeed, m_prime: &BitString) -> Result<BitString, UhfError> {
        self.hash_forward(seed, m_prime)
    }

    fn invert(&self, seed: &HashSeed, m: &BitString, pad: &RandomPad) -> Result<BitString, UhfError> {
        self.hash_invert(seed, m, pad)
    }
}
