//! Channel models: discrete memoryless, AWGN, and real fast fading with
//! receiver-side state.
//!
//! Fading outputs carry the gains alongside `z`; both receivers know their
//! own channel state.

mod fading;
mod multiplex;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use fading::{FadingDistribution, StatePartition, QUAD_REL_TOL, RAYLEIGH_TAIL_MASS};
pub use multiplex::{demultiplex_plan, multiplex_transmit, plan_from_partition, MultiplexPlan, MultiplexRecord};

use crate::numeric::compensated_sum;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChannelError {
    #[error("invalid channel parameter: {0}")]
    InvalidParameter(String),
    #[error("average power {average} exceeds the limit {limit}")]
    PowerViolation { average: f64, limit: f64 },
    #[error("input alphabet mismatch: {0}")]
    Alphabet(String),
    #[error("fading channels need the gain sequence h^n")]
    MissingGains,
    #[error("gain sequence given for a channel without fading")]
    UnexpectedGains,
    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("intervals [{lo}, {hi}] do not cover the fading support")]
    Coverage { lo: f64, hi: f64 },
}

/// Channel input or output sequence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Symbols {
    Discrete(Vec<u32>),
    Real(Vec<f64>),
}

impl Symbols {
    pub fn len(&self) -> usize {
        match self {
            Symbols::Discrete(v) => v.len(),
            Symbols::Real(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn as_discrete(&self) -> Option<&[u32]> {
        match self {
            Symbols::Discrete(v) => Some(v),
            Symbols::Real(_) => None,
        }
    }

    pub fn as_real(&self) -> Option<&[f64]> {
        match self {
            Symbols::Real(v) => Some(v),
            Symbols::Discrete(_) => None,
        }
    }
}

/// Row-stochastic transition matrix `W(z|x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dmc {
    inputs: usize,
    outputs: usize,
    w: Vec<f64>,
}

impl Dmc {
    pub fn new(matrix: Vec<Vec<f64>>) -> Result<Self, ChannelError> {
        let inputs = matrix.len();
        let outputs = matrix.first().map_or(0, |r| r.len());
        if inputs == 0 || outputs == 0 {
            return Err(ChannelError::InvalidParameter("empty transition matrix".into()));
        }
        for (x, row) in matrix.iter().enumerate() {
            if row.len() != outputs {
                return Err(ChannelError::InvalidParameter(format!("row {x} has {} entries", row.len())));
            }
            if row.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
                return Err(ChannelError::InvalidParameter(format!("row {x} has a negative or non-finite entry")));
            }
            let s = compensated_sum(row.iter().copied());
            if (s - 1.0).abs() > 1e-12 {
                return Err(ChannelError::InvalidParameter(format!("row {x} sums to {s}")));
            }
        }
        Ok(Self { inputs, outputs, w: matrix.into_iter().flatten().collect() })
    }

    pub fn bsc(p: f64) -> Result<Self, ChannelError> {
        if !(0.0..=1.0).contains(&p) {
            return Err(ChannelError::InvalidParameter(format!("crossover probability {p} outside [0, 1]")));
        }
        Self::new(vec![vec![1.0 - p, p], vec![p, 1.0 - p]])
    }

    pub fn inputs(&self) -> usize {
        self.inputs
    }

    pub fn outputs(&self) -> usize {
        self.outputs
    }

    pub fn prob(&self, x: usize, z: usize) -> f64 {
        self.w[x * self.outputs + z]
    }

    pub fn row(&self, x: usize) -> &[f64] {
        &self.w[x * self.outputs..(x + 1) * self.outputs]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.inputs).map(|x| self.row(x).to_vec()).collect()
    }

    /// Crossover probability, when this is a binary symmetric channel.
    pub fn bsc_crossover(&self) -> Option<f64> {
        if self.inputs == 2 && self.outputs == 2 && self.prob(0, 1) == self.prob(1, 0) {
            Some(self.prob(0, 1))
        } else {
            None
        }
    }

    /// Rows are permutations of each other and column sums are equal.
    pub fn is_weakly_symmetric(&self) -> bool {
        let mut first = self.row(0).to_vec();
        first.sort_by(f64::total_cmp);
        let rows_ok = (1..self.inputs).all(|x| {
            let mut r = self.row(x).to_vec();
            r.sort_by(f64::total_cmp);
            r.iter().zip(&first).all(|(a, b)| (a - b).abs() <= 1e-12)
        });
        let col = |z: usize| compensated_sum((0..self.inputs).map(|x| self.prob(x, z)));
        let c0 = col(0);
        rows_ok && (1..self.outputs).all(|z| (col(z) - c0).abs() <= 1e-12)
    }

    fn sample_output<R: Rng + ?Sized>(&self, x: usize, rng: &mut R) -> u32 {
        let u: f64 = rng.random();
        let mut cum = 0.0;
        for (z, &p) in self.row(x).iter().enumerate() {
            cum += p;
            if u < cum {
                return z as u32;
            }
        }
        // Rounding left u above the last partial sum; pick the last
        // positive-probability output.
        self.row(x).iter().rposition(|&p| p > 0.0).expect("row sums to one") as u32
    }
}

/// What the transmitter knows about the channel states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Csit {
    #[default]
    None,
    Partial,
    Full,
}

/// Dominating measure of the output alphabet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReferenceMeasure {
    Counting,
    Lebesgue,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ChannelSpec", into = "ChannelSpec")]
pub enum ChannelModel {
    Dmc(Dmc),
    Awgn { noise_var: f64, power: f64 },
    FastFading { fading: FadingDistribution, noise_var: f64, power: f64, csit: Csit },
}

fn check_positive(name: &str, v: f64) -> Result<(), ChannelError> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(ChannelError::InvalidParameter(format!("{name} must be positive, got {v}")))
    }
}

impl ChannelModel {
    pub fn bsc(p: f64) -> Result<Self, ChannelError> {
        Ok(ChannelModel::Dmc(Dmc::bsc(p)?))
    }

    pub fn awgn(noise_var: f64, power: f64) -> Result<Self, ChannelError> {
        check_positive("noise variance", noise_var)?;
        check_positive("power", power)?;
        Ok(ChannelModel::Awgn { noise_var, power })
    }

    pub fn fading(fading: FadingDistribution, noise_var: f64, power: f64, csit: Csit) -> Result<Self, ChannelError> {
        check_positive("noise variance", noise_var)?;
        check_positive("power", power)?;
        Ok(ChannelModel::FastFading { fading: fading.validated()?, noise_var, power, csit })
    }

    pub fn reference_measure(&self) -> ReferenceMeasure {
        match self {
            ChannelModel::Dmc(_) => ReferenceMeasure::Counting,
            _ => ReferenceMeasure::Lebesgue,
        }
    }

    pub fn is_real(&self) -> bool {
        !matches!(self, ChannelModel::Dmc(_))
    }

    pub fn power(&self) -> Option<f64> {
        match self {
            ChannelModel::Dmc(_) => None,
            ChannelModel::Awgn { power, .. } | ChannelModel::FastFading { power, .. } => Some(*power),
        }
    }

    pub fn noise_var(&self) -> Option<f64> {
        match self {
            ChannelModel::Dmc(_) => None,
            ChannelModel::Awgn { noise_var, .. } | ChannelModel::FastFading { noise_var, .. } => Some(*noise_var),
        }
    }

    fn check_input(&self, x: &Symbols) -> Result<(), ChannelError> {
        match (self, x) {
            (ChannelModel::Dmc(d), Symbols::Discrete(v)) => {
                if let Some(bad) = v.iter().find(|&&s| s as usize >= d.inputs) {
                    return Err(ChannelError::Alphabet(format!("input symbol {bad} outside 0..{}", d.inputs)));
                }
                Ok(())
            }
            (ChannelModel::Dmc(_), Symbols::Real(_)) => {
                Err(ChannelError::Alphabet("discrete channel given real-valued input".into()))
            }
            (_, Symbols::Discrete(_)) => Err(ChannelError::Alphabet("real channel given discrete input".into())),
            (_, Symbols::Real(v)) => {
                let limit = self.power().expect("real channel");
                let average = compensated_sum(v.iter().map(|a| a * a)) / v.len().max(1) as f64;
                if average > limit * (1.0 + 1e-12) {
                    return Err(ChannelError::PowerViolation { average, limit });
                }
                Ok(())
            }
        }
    }
}

/// Channel output together with the receiver's state information.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputRecord {
    pub z: Symbols,
    pub h: Option<Vec<f64>>,
}

/// Memoryless use of `channel` on every symbol of `x`.
pub fn transmit<R: Rng + ?Sized>(channel: &ChannelModel, x: &Symbols, rng: &mut R) -> Result<OutputRecord, ChannelError> {
    channel.check_input(x)?;
    match (channel, x) {
        (ChannelModel::Dmc(d), Symbols::Discrete(v)) => {
            let z = v.iter().map(|&s| d.sample_output(s as usize, rng)).collect();
            Ok(OutputRecord { z: Symbols::Discrete(z), h: None })
        }
        (ChannelModel::Awgn { noise_var, .. }, Symbols::Real(v)) => {
            let sd = noise_var.sqrt();
            let z = v.iter().map(|&a| a + sd * rng.sample::<f64, _>(StandardNormal)).collect();
            Ok(OutputRecord { z: Symbols::Real(z), h: None })
        }
        (ChannelModel::FastFading { fading, noise_var, .. }, Symbols::Real(v)) => {
            let sd = noise_var.sqrt();
            let mut h = Vec::with_capacity(v.len());
            let mut z = Vec::with_capacity(v.len());
            for &a in v {
                let g = fading.sample(rng);
                h.push(g);
                z.push(g * a + sd * rng.sample::<f64, _>(StandardNormal));
            }
            Ok(OutputRecord { z: Symbols::Real(z), h: Some(h) })
        }
        _ => unreachable!("input checked against channel"),
    }
}

/// Natural log of the product density of `z` given `x` (and `h` for fading).
pub fn log_transition_density(
    channel: &ChannelModel,
    z: &Symbols,
    x: &Symbols,
    h: Option<&[f64]>,
) -> Result<f64, ChannelError> {
    if z.len() != x.len() {
        return Err(ChannelError::LengthMismatch { expected: x.len(), actual: z.len() });
    }
    let gauss = |diff: f64, var: f64| -0.5 * (2.0 * std::f64::consts::PI * var).ln() - diff * diff / (2.0 * var);
    match (channel, z, x) {
        (ChannelModel::Dmc(d), Symbols::Discrete(zs), Symbols::Discrete(xs)) => {
            if h.is_some() {
                return Err(ChannelError::UnexpectedGains);
            }
            let mut acc = crate::numeric::CompensatedSum::new();
            for (&zi, &xi) in zs.iter().zip(xs) {
                if xi as usize >= d.inputs || zi as usize >= d.outputs {
                    return Err(ChannelError::Alphabet(format!("symbol pair ({xi}, {zi}) outside the alphabet")));
                }
                acc.add(d.prob(xi as usize, zi as usize).ln());
            }
            Ok(acc.value())
        }
        (ChannelModel::Awgn { noise_var, .. }, Symbols::Real(zs), Symbols::Real(xs)) => {
            if h.is_some() {
                return Err(ChannelError::UnexpectedGains);
            }
            Ok(compensated_sum(zs.iter().zip(xs).map(|(&zi, &xi)| gauss(zi - xi, *noise_var))))
        }
        (ChannelModel::FastFading { noise_var, .. }, Symbols::Real(zs), Symbols::Real(xs)) => {
            let h = h.ok_or(ChannelError::MissingGains)?;
            if h.len() != xs.len() {
                return Err(ChannelError::LengthMismatch { expected: xs.len(), actual: h.len() });
            }
            Ok(compensated_sum(
                zs.iter().zip(xs).zip(h).map(|((&zi, &xi), &hi)| gauss(zi - hi * xi, *noise_var)),
            ))
        }
        _ => Err(ChannelError::Alphabet("symbol types do not match the channel".into())),
    }
}

pub fn transition_density(
    channel: &ChannelModel,
    z: &Symbols,
    x: &Symbols,
    h: Option<&[f64]>,
) -> Result<f64, ChannelError> {
    Ok(log_transition_density(channel, z, x, h)?.exp())
}

/// Main channel `T` to the receiver and eavesdropper channel `E`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WiretapChannel {
    pub main: ChannelModel,
    pub eve: ChannelModel,
}

impl WiretapChannel {
    pub fn new(main: ChannelModel, eve: ChannelModel) -> Result<Self, ChannelError> {
        match (&main, &eve) {
            (ChannelModel::Dmc(a), ChannelModel::Dmc(b)) if a.inputs != b.inputs => {
                return Err(ChannelError::Alphabet(format!(
                    "main channel has {} inputs, eavesdropper {}",
                    a.inputs, b.inputs
                )))
            }
            (ChannelModel::Dmc(_), ChannelModel::Dmc(_)) => {}
            (a, b) if a.is_real() && b.is_real() => {
                if a.power() != b.power() {
                    return Err(ChannelError::Alphabet("main and eavesdropper power limits differ".into()));
                }
            }
            _ => return Err(ChannelError::Alphabet("one channel is discrete, the other real".into())),
        }
        Ok(Self { main, eve })
    }

    /// The transmitter's state knowledge, taken from the eavesdropper model.
    pub fn csit(&self) -> Csit {
        match (&self.main, &self.eve) {
            (_, ChannelModel::FastFading { csit, .. }) => *csit,
            (ChannelModel::FastFading { csit, .. }, _) => *csit,
            _ => Csit::None,
        }
    }
}

/// Configuration form of a channel, e.g. `{type = "bsc", p = 0.1}` or
/// `{type = "fading", dist = "rayleigh", scale = 1.0, sigma2 = 1.0,
/// power = 1.0, csit = "none"}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ChannelSpec {
    Bsc {
        p: f64,
    },
    Dmc {
        matrix: Vec<Vec<f64>>,
    },
    Awgn {
        sigma2: f64,
        power: f64,
    },
    Fading {
        dist: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        scale: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        atoms: Option<Vec<(f64, f64)>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        h: Option<f64>,
        sigma2: f64,
        power: f64,
        #[serde(default)]
        csit: Csit,
    },
}

impl TryFrom<ChannelSpec> for ChannelModel {
    type Error = ChannelError;

    fn try_from(spec: ChannelSpec) -> Result<Self, ChannelError> {
        match spec {
            ChannelSpec::Bsc { p } => ChannelModel::bsc(p),
            ChannelSpec::Dmc { matrix } => Ok(ChannelModel::Dmc(Dmc::new(matrix)?)),
            ChannelSpec::Awgn { sigma2, power } => ChannelModel::awgn(sigma2, power),
            ChannelSpec::Fading { dist, scale, atoms, h, sigma2, power, csit } => {
                let extra = |what: &str| {
                    ChannelError::InvalidParameter(format!("field `{what}` does not apply to dist = \"{dist}\""))
                };
                let missing = |what: &str| ChannelError::InvalidParameter(format!("dist = \"{dist}\" needs `{what}`"));
                let fading = match dist.as_str() {
                    "rayleigh" => {
                        if atoms.is_some() {
                            return Err(extra("atoms"));
                        }
                        if h.is_some() {
                            return Err(extra("h"));
                        }
                        FadingDistribution::rayleigh(scale.ok_or_else(|| missing("scale"))?)?
                    }
                    "discrete" => {
                        if scale.is_some() {
                            return Err(extra("scale"));
                        }
                        if h.is_some() {
                            return Err(extra("h"));
                        }
                        FadingDistribution::discrete(atoms.ok_or_else(|| missing("atoms"))?)?
                    }
                    "constant" => {
                        if scale.is_some() {
                            return Err(extra("scale"));
                        }
                        if atoms.is_some() {
                            return Err(extra("atoms"));
                        }
                        FadingDistribution::constant(h.ok_or_else(|| missing("h"))?)?
                    }
                    other => {
                        return Err(ChannelError::InvalidParameter(format!(
                            "unknown fading distribution \"{other}\" (expected rayleigh, discrete or constant)"
                        )))
                    }
                };
                ChannelModel::fading(fading, sigma2, power, csit)
            }
        }
    }
}

impl From<ChannelModel> for ChannelSpec {
    fn from(model: ChannelModel) -> Self {
        match model {
            ChannelModel::Dmc(d) => match d.bsc_crossover() {
                Some(p) => ChannelSpec::Bsc { p },
                None => ChannelSpec::Dmc { matrix: d.rows() },
            },
            ChannelModel::Awgn { noise_var, power } => ChannelSpec::Awgn { sigma2: noise_var, power },
            ChannelModel::FastFading { fading, noise_var, power, csit } => {
                let (dist, scale, atoms, h) = match fading {
                    FadingDistribution::Rayleigh { scale } => ("rayleigh", Some(scale), None, None),
                    FadingDistribution::Discrete { atoms } => ("discrete", None, Some(atoms), None),
                    FadingDistribution::Constant { h } => ("constant", None, None, Some(h)),
                };
                ChannelSpec::Fading { dist: dist.into(), scale, atoms, h, sigma2: noise_var, power, csit }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn rng() -> ChaCha20Rng {
        ChaCha20Rng::seed_from_u64(17)
    }

    #[test]
    fn bsc_zero_is_identity() {
        let ch = ChannelModel::bsc(0.0).unwrap();
        let x = Symbols::Discrete(vec![0, 1, 1, 0, 1]);
        assert_eq!(transmit(&ch, &x, &mut rng()).unwrap().z, x);
    }

    #[test]
    fn awgn_vanishing_noise() {
        let ch = ChannelModel::awgn(1e-12, 1.0).unwrap();
        let x = vec![1.0, -1.0, 0.5, -0.25];
        let out = transmit(&ch, &Symbols::Real(x.clone()), &mut rng()).unwrap();
        for (z, x) in out.z.as_real().unwrap().iter().zip(&x) {
            assert!((z - x).abs() < 1e-4);
        }
    }

    #[test]
    fn awgn_moments() {
        let ch = ChannelModel::awgn(0.7, 1.0).unwrap();
        let n = 100_000;
        let out = transmit(&ch, &Symbols::Real(vec![0.8; n]), &mut rng()).unwrap();
        let z = out.z.as_real().unwrap();
        let mean = z.iter().sum::<f64>() / n as f64;
        let var = z.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        assert!((mean - 0.8).abs() < 4.0 * (0.7 / n as f64).sqrt());
        // Var of the sample variance of a normal is 2 sigma^4 / (n - 1).
        assert!((var - 0.7).abs() < 4.0 * (2.0 * 0.49 / (n - 1) as f64).sqrt());
    }

    #[test]
    fn power_violation_rejected() {
        let ch = ChannelModel::awgn(1.0, 1.0).unwrap();
        let err = transmit(&ch, &Symbols::Real(vec![1.0, 1.5]), &mut rng()).unwrap_err();
        assert!(matches!(err, ChannelError::PowerViolation { .. }));
    }

    #[test]
    fn density_examples() {
        let p = 0.1;
        let bsc = ChannelModel::bsc(p).unwrap();
        let d = transition_density(&bsc, &Symbols::Discrete(vec![0, 0, 1]), &Symbols::Discrete(vec![0, 0, 0]), None)
            .unwrap();
        assert!((d - p * (1.0 - p) * (1.0 - p)).abs() < 1e-15);

        let awgn = ChannelModel::awgn(0.5, 1.0).unwrap();
        let d = transition_density(&awgn, &Symbols::Real(vec![0.3]), &Symbols::Real(vec![0.3]), None).unwrap();
        assert!((d - 1.0 / (2.0 * std::f64::consts::PI * 0.5).sqrt()).abs() < 1e-15);

        let fad = ChannelModel::fading(FadingDistribution::rayleigh(1.0).unwrap(), 1.0, 1.0, Csit::None).unwrap();
        let d = transition_density(&fad, &Symbols::Real(vec![2.0]), &Symbols::Real(vec![1.0]), Some(&[2.0])).unwrap();
        assert!((d - 1.0 / (2.0 * std::f64::consts::PI).sqrt()).abs() < 1e-15);
        assert_eq!(
            transition_density(&fad, &Symbols::Real(vec![2.0]), &Symbols::Real(vec![1.0]), None),
            Err(ChannelError::MissingGains)
        );
    }

    #[test]
    fn log_density_survives_long_blocks() {
        let awgn = ChannelModel::awgn(1.0, 1.0).unwrap();
        let n = 5000;
        let ld = log_transition_density(&awgn, &Symbols::Real(vec![1.0; n]), &Symbols::Real(vec![0.0; n]), None).unwrap();
        let expected = n as f64 * (-0.5 * (2.0 * std::f64::consts::PI).ln() - 0.5);
        assert!((ld - expected).abs() < 1e-8 * expected.abs());
    }

    #[test]
    fn dmc_rows_sum_to_one() {
        let d = Dmc::new(vec![vec![0.5, 0.25, 0.25], vec![0.1, 0.1, 0.8]]).unwrap();
        for x in 0..2 {
            assert!((d.row(x).iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
        assert!(Dmc::new(vec![vec![0.5, 0.4]]).is_err());
        assert!(Dmc::bsc(0.2).unwrap().is_weakly_symmetric());
        assert!(!d.is_weakly_symmetric());
    }

    #[test]
    fn config_forms_parse() {
        let bsc: ChannelModel = serde_json::from_str(r#"{"type":"bsc","p":0.1}"#).unwrap();
        assert_eq!(bsc, ChannelModel::bsc(0.1).unwrap());
        let fad: ChannelModel = serde_json::from_str(
            r#"{"type":"fading","dist":"rayleigh","scale":1.0,"sigma2":1.0,"power":1.0,"csit":"none"}"#,
        )
        .unwrap();
        assert!(matches!(fad, ChannelModel::FastFading { csit: Csit::None, .. }));
        assert!(serde_json::from_str::<ChannelModel>(r#"{"type":"bsc","p":0.1,"q":1}"#).is_err());
        assert!(serde_json::from_str::<ChannelModel>(r#"{"type":"awgn","sigma2":0.0,"power":1.0}"#).is_err());
        assert!(serde_json::from_str::<ChannelModel>(
            r#"{"type":"fading","dist":"rayleigh","sigma2":1.0,"power":1.0}"#
        )
        .is_err());
        let round: ChannelModel = serde_json::from_str(&serde_json::to_string(&fad).unwrap()).unwrap();
        assert_eq!(round, fad);
    }

    #[test]
    fn wiretap_compatibility() {
        assert!(WiretapChannel::new(ChannelModel::bsc(0.1).unwrap(), ChannelModel::awgn(1.0, 1.0).unwrap()).is_err());
        let three = ChannelModel::Dmc(Dmc::new(vec![vec![1.0, 0.0]; 3]).unwrap());
        assert!(WiretapChannel::new(ChannelModel::bsc(0.1).unwrap(), three).is_err());
        assert!(WiretapChannel::new(ChannelModel::bsc(0.1).unwrap(), ChannelModel::bsc(0.2).unwrap()).is_ok());
    }
}
