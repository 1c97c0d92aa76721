//! Exhaustive counting checks over the whole family for small `l`.
//!
//! Every enumeration is split by an outer index and merged by a total order
//! on (count, index), so the report does not depend on how work is divided.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{RandomPad, SsUhf, UhfError, WiretapParams};
use crate::gf::BitString;
use crate::numeric::CompensatedSum;

/// Largest `l` accepted by the exhaustive verifiers.
pub const MAX_EXHAUSTIVE_L: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Property {
    Universal,
    Uniform,
    Regular,
    Invertible,
    EvenlyInvertible,
}

impl Property {
    pub const ALL: [Property; 5] = [
        Property::Universal,
        Property::Uniform,
        Property::Regular,
        Property::Invertible,
        Property::EvenlyInvertible,
    ];
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Property::Universal => "universal",
            Property::Uniform => "uniform",
            Property::Regular => "regular",
            Property::Invertible => "invertible",
            Property::EvenlyInvertible => "evenly_invertible",
        };
        f.write_str(s)
    }
}

/// Outcome of one exhaustive check.
///
/// `bound` is the defining count: an upper bound for `universal`, the exact
/// required count for `uniform`, `regular` and `evenly_invertible`, and the
/// allowed number of failures (zero) for `invertible`. `worst_count` is the
/// count furthest from compliance, attained at `witness`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub property: Property,
    pub l: usize,
    pub k: usize,
    pub bound: u64,
    pub worst_count: u64,
    pub witness: Option<BTreeMap<String, String>>,
    pub pass: bool,
}

/// Forward and inverse tables over every seed, indexed as in
/// [`SsUhf::seed_by_index`].
struct Tables {
    l: usize,
    k: usize,
    seeds: usize,
    /// `fwd[i * 2^l + m']`
    fwd: Vec<u8>,
    /// `inv[(i * 2^k + m) * 2^b + r]`
    inv: Vec<u8>,
}

impl Tables {
    fn build(params: WiretapParams) -> Result<Self, UhfError> {
        let (l, k, b) = (params.l(), params.k(), params.b());
        if l > MAX_EXHAUSTIVE_L {
            return Err(UhfError::TooLargeForExhaustive { l, max: MAX_EXHAUSTIVE_L });
        }
        let family = SsUhf::new(params)?;
        let seeds = family.seed_count().expect("small l") as usize;
        let per_seed: Vec<(Vec<u8>, Vec<u8>)> = (0..seeds)
            .into_par_iter()
            .map(|i| {
                let seed = family.seed_by_index(i as u64).expect("index in range");
                let fwd = BitString::all(l)
                    .map(|mp| value(&family.hash_forward(&seed, &mp).expect("lengths match")))
                    .collect();
                let mut inv = Vec::with_capacity(1 << l);
                for m in BitString::all(k) {
                    for r in BitString::all(b) {
                        let p = family.hash_invert(&seed, &m, &RandomPad(r)).expect("lengths match");
                        inv.push(value(&p));
                    }
                }
                (fwd, inv)
            })
            .collect();
        let mut fwd = Vec::with_capacity(seeds << l);
        let mut inv = Vec::with_capacity(seeds << l);
        for (f, i) in per_seed {
            fwd.extend(f);
            inv.extend(i);
        }
        Ok(Self { l, k, seeds, fwd, inv })
    }

    fn f(&self, seed: usize, mp: usize) -> usize {
        self.fwd[(seed << self.l) + mp] as usize
    }

    fn phi(&self, seed: usize, m: usize, r: usize) -> usize {
        self.inv[(((seed << self.k) + m) << (self.l - self.k)) + r] as usize
    }

    fn seed_label(&self, seed: usize) -> [(String, String); 2] {
        let l = self.l;
        [("s".into(), bits(((seed >> l) + 1) as u64, l)), ("t".into(), bits((seed & ((1 << l) - 1)) as u64, l))]
    }
}

fn value(x: &BitString) -> u8 {
    x.to_u64().expect("short string") as u8
}

fn bits(v: u64, len: usize) -> String {
    BitString::from_u64(v, len).expect("fits").to_string()
}

/// Candidate worst case: ordering key first, then smallest index wins ties.
#[derive(Clone, Copy)]
struct Worst {
    badness: u64,
    count: u64,
    index: usize,
}

fn merge(a: Worst, b: Worst) -> Worst {
    if (b.badness, std::cmp::Reverse(b.index)) > (a.badness, std::cmp::Reverse(a.index)) {
        b
    } else {
        a
    }
}

fn scan<F>(range: usize, f: F) -> Worst
where
    F: Fn(usize) -> Worst + Sync + Send,
{
    (0..range)
        .into_par_iter()
        .map(f)
        .reduce(|| Worst { badness: 0, count: 0, index: usize::MAX }, merge)
}

fn scan_sum<F>(range: usize, f: F) -> u64
where
    F: Fn(usize) -> u64 + Sync + Send,
{
    (0..range).into_par_iter().map(f).sum()
}

/// Checks one defining property of the family by full enumeration.
pub fn verify_family(params: WiretapParams, property: Property) -> Result<VerificationReport, UhfError> {
    let t = Tables::build(params)?;
    let (l, k) = (params.l(), params.k());
    let n_mp = 1usize << l;
    let n_m = 1usize << k;
    let n_r = 1usize << (l - k);
    let seeds = t.seeds;
    let per_message = (seeds / n_m) as u64;
    let mut witness = BTreeMap::new();

    let (bound, worst_count, pass) = match property {
        Property::Universal => {
            let bound = per_message;
            let w = scan(n_mp * n_mp, |idx| {
                let (a, b) = (idx / n_mp, idx % n_mp);
                if a >= b {
                    return Worst { badness: 0, count: 0, index: usize::MAX };
                }
                let c = (0..seeds).filter(|&s| t.f(s, a) == t.f(s, b)).count() as u64;
                Worst { badness: c, count: c, index: idx }
            });
            witness.insert("m_prime_1".into(), bits((w.index / n_mp) as u64, l));
            witness.insert("m_prime_2".into(), bits((w.index % n_mp) as u64, l));
            (bound, w.count, w.count <= bound)
        }
        Property::Uniform => {
            let bound = per_message;
            let w = scan(n_mp, |mp| {
                let mut counts = vec![0u64; n_m];
                for s in 0..seeds {
                    counts[t.f(s, mp)] += 1;
                }
                counts
                    .iter()
                    .enumerate()
                    .map(|(m, &c)| Worst { badness: c.abs_diff(bound), count: c, index: mp * n_m + m })
                    .fold(Worst { badness: 0, count: 0, index: usize::MAX }, merge)
            });
            witness.insert("m_prime".into(), bits((w.index / n_m) as u64, l));
            witness.insert("m".into(), bits((w.index % n_m) as u64, k));
            (bound, w.count, w.badness == 0)
        }
        Property::Regular => {
            let bound = n_r as u64;
            let w = scan(seeds, |s| {
                let mut counts = vec![0u64; n_m];
                for mp in 0..n_mp {
                    counts[t.f(s, mp)] += 1;
                }
                counts
                    .iter()
                    .enumerate()
                    .map(|(m, &c)| Worst { badness: c.abs_diff(bound), count: c, index: s * n_m + m })
                    .fold(Worst { badness: 0, count: 0, index: usize::MAX }, merge)
            });
            witness.extend(t.seed_label(w.index / n_m));
            witness.insert("m".into(), bits((w.index % n_m) as u64, k));
            (bound, w.count, w.badness == 0)
        }
        Property::Invertible => {
            let failures = scan_sum(seeds, |s| {
                let mut bad = 0;
                for m in 0..n_m {
                    for r in 0..n_r {
                        if t.f(s, t.phi(s, m, r)) != m {
                            bad += 1;
                        }
                    }
                }
                bad
            });
            let first = (0..seeds * n_m * n_r).find(|&idx| {
                let (s, rest) = (idx / (n_m * n_r), idx % (n_m * n_r));
                t.f(s, t.phi(s, rest / n_r, rest % n_r)) != rest / n_r
            });
            match first {
                Some(idx) => {
                    let (s, rest) = (idx / (n_m * n_r), idx % (n_m * n_r));
                    witness.extend(t.seed_label(s));
                    witness.insert("m".into(), bits((rest / n_r) as u64, k));
                    witness.insert("pad".into(), bits((rest % n_r) as u64, l - k));
                }
                None => {
                    witness.clear();
                }
            }
            (0, failures, failures == 0)
        }
        Property::EvenlyInvertible => {
            // For each (seed, m) the pad sweep must hit every preimage of m
            // exactly once; badness counts preimages missed.
            let bound = n_r as u64;
            let w = scan(seeds * n_m, |idx| {
                let (s, m) = (idx / n_m, idx % n_m);
                let mut hits = vec![0u32; n_mp];
                for r in 0..n_r {
                    hits[t.phi(s, m, r)] += 1;
                }
                let exact = (0..n_mp).filter(|&mp| t.f(s, mp) == m && hits[mp] == 1).count() as u64;
                Worst { badness: bound - exact.min(bound), count: exact, index: idx }
            });
            let worst = if w.index == usize::MAX { Worst { badness: 0, count: bound, index: 0 } } else { w };
            witness.extend(t.seed_label(worst.index / n_m));
            witness.insert("m".into(), bits((worst.index % n_m) as u64, k));
            (bound, worst.count, worst.badness == 0)
        }
    };

    Ok(VerificationReport {
        property,
        l,
        k,
        bound,
        worst_count,
        witness: if witness.is_empty() { None } else { Some(witness) },
        pass,
    })
}

/// Exact law of `M' = phi_{S,R}(M)` for uniform seed and pad.
///
/// Counts of `(seed, pad)` pairs mapping each `m` to each `m'` are integers,
/// so the only rounding is in the final weighted sums.
pub fn pseudo_message_distribution(params: WiretapParams, message_dist: &[f64]) -> Result<Vec<f64>, UhfError> {
    let (l, k) = (params.l(), params.k());
    if message_dist.len() != 1 << k {
        return Err(UhfError::Distribution(format!(
            "expected {} probabilities, got {}",
            1usize << k,
            message_dist.len()
        )));
    }
    if message_dist.iter().any(|p| !p.is_finite() || *p < 0.0) {
        return Err(UhfError::Distribution("probabilities must be finite and non-negative".into()));
    }
    let total: f64 = crate::numeric::compensated_sum(message_dist.iter().copied());
    if (total - 1.0).abs() > 1e-12 {
        return Err(UhfError::Distribution(format!("probabilities sum to {total}, not 1")));
    }
    let t = Tables::build(params)?;
    let n_mp = 1usize << l;
    let n_m = 1usize << k;
    let n_r = 1usize << (l - k);
    let mut counts = vec![0u64; n_m * n_mp];
    for s in 0..t.seeds {
        for m in 0..n_m {
            for r in 0..n_r {
                counts[m * n_mp + t.phi(s, m, r)] += 1;
            }
        }
    }
    let per_message = (t.seeds * n_r) as f64;
    Ok((0..n_mp)
        .map(|mp| {
            let mut acc = CompensatedSum::new();
            for (m, &p) in message_dist.iter().enumerate() {
                acc.add(p * counts[m * n_mp + mp] as f64 / per_message);
            }
            acc.value()
        })
        .collect())
}
