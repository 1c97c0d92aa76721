//! Exact joint laws of the whole scheme on tiny discrete instances.

use serde::{Deserialize, Serialize};

use super::table::Axis;
use super::{
    alpha_mutual_information, one_shot_bound, renyi_ordering_check, restricted_alpha_information,
    semantic_leakage_exact, ChannelTable, JointLaw, JointTable, LeakageError, TypicalSetMask,
};
use crate::channel::{ChannelModel, Dmc};
use crate::ecc::{Alphabet, CodeSpec};
use crate::gf::BitString;
use crate::numeric::CompensatedSum;
use crate::uhf::{RandomPad, SsUhf, WiretapParams};

/// Cap on the number of entries any enumerated table may have.
pub const MAX_STATE_SPACE: u64 = 1 << 24;
/// Largest `l` whose seed set is enumerated.
const MAX_L: usize = 8;
/// Slack on every bound comparison.
const SLACK: f64 = 1e-9;

/// Message bits, code and eavesdropper channel of one instance; `n` and
/// `l` come from the code.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceSpec {
    pub k: usize,
    pub code: CodeSpec,
    pub eve: ChannelModel,
}

impl InstanceSpec {
    pub fn name(&self) -> String {
        let eve = match &self.eve {
            ChannelModel::Dmc(d) => match d.bsc_crossover() {
                Some(p) => format!("bsc({p})"),
                None => format!("dmc({}x{})", d.inputs(), d.outputs()),
            },
            _ => "real".into(),
        };
        format!("k={} code={} eve={}", self.k, self.code, eve)
    }
}

/// Precomputed transition and preimage tables for exhaustive evaluation.
#[derive(Debug, Clone)]
pub struct ExactInstance {
    spec: InstanceSpec,
    params: WiretapParams,
    dmc: Dmc,
    /// `|Z|^n`.
    outputs: usize,
    /// `W^n(z | x(m'))`, row `m'`.
    w_out: Vec<f64>,
    codewords: Vec<Vec<u32>>,
    seeds: usize,
    /// `phi_s(m, r)` as an integer, indexed `[(s * 2^k + m) * 2^b + r]`.
    preimage: Vec<u32>,
}

fn too_large(what: &str, entries: u128) -> LeakageError {
    LeakageError::TooLarge { what: what.into(), entries, limit: MAX_STATE_SPACE }
}

fn bits_of(v: usize, len: usize) -> BitString {
    BitString::from_u64(v as u64, len).expect("index fits")
}

impl ExactInstance {
    pub fn new(spec: InstanceSpec) -> Result<Self, LeakageError> {
        let code = spec.code;
        if code.alphabet() != Alphabet::Binary {
            return Err(LeakageError::Unsupported("exact evaluation needs a binary code".into()));
        }
        let ChannelModel::Dmc(dmc) = &spec.eve else {
            return Err(LeakageError::Unsupported("exact evaluation needs a discrete eavesdropper channel".into()));
        };
        let (n, l) = (code.n(), code.l());
        if l > MAX_L {
            return Err(LeakageError::Unsupported(format!("l = {l} exceeds {MAX_L}")));
        }
        let params = WiretapParams::new(n, spec.k, l).map_err(|e| LeakageError::Unsupported(e.to_string()))?;
        let outputs = (dmc.outputs() as u128).pow(n as u32);
        let seeds = ((1usize << l) - 1) << l;
        let seed_cols = outputs * seeds as u128;
        if seed_cols * (1u128 << spec.k) > MAX_STATE_SPACE as u128 {
            return Err(too_large("message channel", seed_cols << spec.k));
        }
        let outputs = outputs as usize;
        let family = SsUhf::new(params).map_err(|e| LeakageError::Unsupported(e.to_string()))?;
        let codewords: Vec<Vec<u32>> = BitString::all(l)
            .map(|m| code.encode(&m).map(|x| x.as_discrete().expect("binary").to_vec()))
            .collect::<Result<_, _>>()
            .map_err(|e| LeakageError::Unsupported(e.to_string()))?;
        let q = dmc.outputs();
        let mut w_out = Vec::with_capacity(codewords.len() * outputs);
        for x in &codewords {
            for z in 0..outputs {
                let mut prob = 1.0;
                let mut rest = z;
                for &xi in x.iter().rev() {
                    prob *= dmc.prob(xi as usize, rest % q);
                    rest /= q;
                }
                w_out.push(prob);
            }
        }
        let (k, b) = (spec.k, params.b());
        let mut preimage = Vec::with_capacity(seeds << l);
        for s in 0..seeds {
            let seed = family.seed_by_index(s as u64).expect("enumerable seed");
            for m in 0..1usize << k {
                for r in 0..1usize << b {
                    let mp = family
                        .hash_invert(&seed, &bits_of(m, k), &RandomPad(bits_of(r, b)))
                        .expect("lengths match");
                    preimage.push(mp.to_u64().expect("l <= 8") as u32);
                }
            }
        }
        Ok(Self { dmc: dmc.clone(), spec, params, outputs, w_out, codewords, seeds, preimage })
    }

    pub fn spec(&self) -> &InstanceSpec {
        &self.spec
    }

    pub fn params(&self) -> WiretapParams {
        self.params
    }

    pub fn outputs(&self) -> usize {
        self.outputs
    }

    pub fn seed_count(&self) -> usize {
        self.seeds
    }

    fn w(&self, m_prime: usize) -> &[f64] {
        &self.w_out[m_prime * self.outputs..(m_prime + 1) * self.outputs]
    }

    fn preimages(&self, s: usize, m: usize) -> &[u32] {
        let per = 1usize << self.params.b();
        let start = (s * (1 << self.params.k()) + m) * per;
        &self.preimage[start..start + per]
    }

    fn z_labels(&self, count: usize) -> Vec<String> {
        let q = self.dmc.outputs();
        let n = self.params.n();
        (0..count)
            .map(|z| {
                let mut digits = vec![0usize; n];
                let mut rest = z;
                for d in digits.iter_mut().rev() {
                    *d = rest % q;
                    rest /= q;
                }
                digits.iter().map(|d| d.to_string()).collect()
            })
            .collect()
    }

    /// Joint law of the uniform pseudo-message and the eavesdropper output.
    pub fn pseudo_joint(&self) -> JointTable {
        let l = self.params.l();
        let scale = (-(l as f64)).exp2();
        let p = self.w_out.iter().map(|w| w * scale).collect();
        JointTable::new(1 << l, self.outputs, p)
            .expect("rows are distributions")
            .with_labels((0..1 << l).map(|m| bits_of(m, l).to_string()).collect(), self.z_labels(self.outputs))
    }

    /// The induced channel `M -> (S, Z)`, column `s * |Z|^n + z`.
    pub fn message_channel(&self) -> ChannelTable {
        let k = self.params.k();
        let pad_weight = (-(self.params.b() as f64)).exp2();
        let seed_weight = 1.0 / self.seeds as f64;
        let cols = self.seeds * self.outputs;
        let mut w = vec![0.0; (1 << k) * cols];
        for m in 0..1usize << k {
            for s in 0..self.seeds {
                let row = &mut w[m * cols + s * self.outputs..m * cols + (s + 1) * self.outputs];
                for &mp in self.preimages(s, m) {
                    for (cell, &p) in row.iter_mut().zip(self.w(mp as usize)) {
                        *cell += p;
                    }
                }
                row.iter_mut().for_each(|c| *c *= pad_weight * seed_weight);
            }
        }
        ChannelTable::new(1 << k, cols, w).expect("rows are distributions")
    }

    /// Channel `(M_1..M_eta) -> (S, Z_1..Z_eta)`: one seed shared by `eta`
    /// independent uses.
    pub fn recycled_channel(&self, eta: usize) -> Result<ChannelTable, LeakageError> {
        let k = self.params.k();
        let rows = 1u128 << (k * eta);
        let per_seed = (self.outputs as u128).pow(eta as u32);
        let cols = per_seed * self.seeds as u128;
        if rows * cols > MAX_STATE_SPACE as u128 || eta == 0 {
            return Err(too_large("recycled channel", rows * cols));
        }
        let single = self.message_channel();
        let (rows, cols, per_seed) = (rows as usize, cols as usize, per_seed as usize);
        let scale = self.seeds as f64;
        let mut w = vec![0.0; rows * cols];
        for row in 0..rows {
            let ms: Vec<usize> = (0..eta).map(|i| (row >> (k * (eta - 1 - i))) & ((1 << k) - 1)).collect();
            for s in 0..self.seeds {
                // Conditional on s each use is W(z | m, s) = |S| * W((s, z) | m).
                let parts: Vec<&[f64]> =
                    ms.iter().map(|&m| &single.row(m)[s * self.outputs..(s + 1) * self.outputs]).collect();
                for zi in 0..per_seed {
                    let mut rest = zi;
                    let mut prob = 1.0 / scale;
                    for part in parts.iter().rev() {
                        prob *= part[rest % self.outputs] * scale;
                        rest /= self.outputs;
                    }
                    w[row * cols + s * per_seed + zi] = prob;
                }
            }
        }
        ChannelTable::new(rows, cols, w)
    }

    /// Exact law of `(M, S, M', Z)` under message law `p_m`.
    pub fn joint_law(&self, p_m: &[f64]) -> Result<JointLaw, LeakageError> {
        let (k, l) = (self.params.k(), self.params.l());
        if p_m.len() != 1 << k {
            return Err(LeakageError::InvalidTable(format!("message law of length {}", p_m.len())));
        }
        let size = (1u128 << k) * self.seeds as u128 * (1u128 << l) * self.outputs as u128;
        if size > MAX_STATE_SPACE as u128 {
            return Err(too_large("joint law", size));
        }
        let pad_weight = (-(self.params.b() as f64)).exp2();
        let mp_count = 1usize << l;
        let mut p = vec![0.0; size as usize];
        for (m, &pm) in p_m.iter().enumerate() {
            for s in 0..self.seeds {
                for &mp in self.preimages(s, m) {
                    let base = ((m * self.seeds + s) * mp_count + mp as usize) * self.outputs;
                    let weight = pm * pad_weight / self.seeds as f64;
                    for (cell, &w) in p[base..base + self.outputs].iter_mut().zip(self.w(mp as usize)) {
                        *cell = weight * w;
                    }
                }
            }
        }
        let axes = vec![
            Axis { name: "m".into(), labels: (0..1 << k).map(|m| bits_of(m, k).to_string()).collect() },
            Axis { name: "s".into(), labels: (0..self.seeds).map(|s| s.to_string()).collect() },
            Axis { name: "m_prime".into(), labels: (0..mp_count).map(|m| bits_of(m, l).to_string()).collect() },
            Axis { name: "z".into(), labels: self.z_labels(self.outputs) },
        ];
        JointLaw::new(axes, p)
    }

    /// Keeps `(m', z)` when `z` differs from the codeword of `m'` in at most
    /// `radius` positions.
    pub fn hamming_ball_mask(&self, joint: &JointTable, radius: usize) -> TypicalSetMask {
        let q = self.dmc.outputs();
        TypicalSetMask::from_predicate(joint, |mp, z| {
            let mut rest = z;
            let mut dist = 0;
            for &xi in self.codewords[mp].iter().rev() {
                dist += usize::from(rest % q != xi as usize);
                rest /= q;
            }
            dist <= radius
        })
    }

    /// Three masks with positive removed mass where the instance allows:
    /// a Hamming ball of radius `n - 1` and two trimmed tails.
    pub fn standard_masks(&self, joint: &JointTable) -> Vec<(String, TypicalSetMask)> {
        let n = self.params.n();
        vec![
            (format!("hamming_ball_{}", n.saturating_sub(1)), self.hamming_ball_mask(joint, n.saturating_sub(1))),
            ("trim_0.05".into(), TypicalSetMask::trim_smallest(joint, 0.05)),
            ("trim_0.2".into(), TypicalSetMask::trim_smallest(joint, 0.2)),
        ]
    }

    /// Exact leakage against the one-shot bounds, for `eps = 0` and for each
    /// mask in `masks`, plus the order check on each mask.
    pub fn evaluate(&self, masks: &[(String, TypicalSetMask)], alphas: &[f64]) -> Result<LeakageReport, LeakageError> {
        let (k, b) = (self.params.k(), self.params.b());
        let joint = self.pseudo_joint();
        let leak = semantic_leakage_exact(&self.message_channel())?;
        let i2 = alpha_mutual_information(&joint, 2.0)?;
        let iinf = alpha_mutual_information(&joint, f64::INFINITY)?;
        let bound_i2 = one_shot_bound(b, i2, 0.0, k);
        let bound_iinf = one_shot_bound(b, iinf, 0.0, k);
        let full = TypicalSetMask::full(&joint);
        let mut ordering_pass = renyi_ordering_check(&joint, &full, alphas, SLACK)?.pass;
        let mut checks = Vec::new();
        for (name, mask) in masks {
            let i2_t = restricted_alpha_information(&joint, mask, 2.0)?;
            let bound = one_shot_bound(b, i2_t, mask.epsilon, k);
            let order = renyi_ordering_check(&joint, mask, alphas, SLACK)?;
            ordering_pass &= order.pass;
            checks.push(MaskCheck {
                name: name.clone(),
                epsilon: mask.epsilon,
                i2: i2_t,
                bound,
                pass: leak.upper <= bound + SLACK,
                ordering: order.values,
            });
        }
        let pass = leak.upper <= bound_i2 + SLACK
            && bound_i2 <= bound_iinf + SLACK
            && checks.iter().all(|c| c.pass)
            && ordering_pass;
        Ok(LeakageReport {
            instance: self.spec.name(),
            k,
            l: self.params.l(),
            n: self.params.n(),
            b,
            leakage_exact: leak.capacity,
            leakage_upper: leak.upper,
            i2,
            iinf,
            bound_i2,
            bound_iinf,
            epsilon_term: 0.0,
            masks: checks,
            alphas: alphas.to_vec(),
            ordering_pass,
            pass,
        })
    }

    /// Marginal law of `M'` under `p_m`, summed straight from the preimage
    /// table.
    pub fn pseudo_message_marginal(&self, p_m: &[f64]) -> Vec<f64> {
        let mut acc = vec![CompensatedSum::new(); 1 << self.params.l()];
        let w = (-(self.params.b() as f64)).exp2() / self.seeds as f64;
        for (m, &pm) in p_m.iter().enumerate() {
            for s in 0..self.seeds {
                for &mp in self.preimages(s, m) {
                    acc[mp as usize].add(pm * w);
                }
            }
        }
        acc.iter().map(CompensatedSum::value).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaskCheck {
    pub name: String,
    pub epsilon: f64,
    #[serde(rename = "I2_T")]
    pub i2: f64,
    pub bound: f64,
    /// `I_alpha^T` over the report's alpha grid.
    pub ordering: Vec<f64>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeakageReport {
    pub instance: String,
    pub k: usize,
    pub l: usize,
    pub n: usize,
    pub b: usize,
    pub leakage_exact: f64,
    pub leakage_upper: f64,
    #[serde(rename = "I2")]
    pub i2: f64,
    #[serde(rename = "Iinf")]
    pub iinf: f64,
    #[serde(rename = "bound_I2")]
    pub bound_i2: f64,
    #[serde(rename = "bound_Iinf")]
    pub bound_iinf: f64,
    pub epsilon_term: f64,
    pub masks: Vec<MaskCheck>,
    pub alphas: Vec<f64>,
    pub ordering_pass: bool,
    pub pass: bool,
}
