//! Config documents: typed sections, built-in presets and dotted
//! `key=value` overrides.

use serde::{Deserialize, Serialize};
use toml::Value;
use wiretap_core::channel::{ChannelModel, ChannelSpec, WiretapChannel};
use wiretap_core::ecc::CodeSpec;
use wiretap_core::gf::BitString;
use wiretap_core::secrecy::PlanOptions;
use wiretap_core::sim::ExperimentConfig;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub seed: Option<u64>,
    pub wiretap: Option<WiretapSection>,
    /// Code name, e.g. `"repetition:3:2"` or `"hamming74"`.
    pub code: Option<CodeSpec>,
    pub params: Option<ParamsSection>,
    pub plan: Option<PlanSection>,
    pub simulate: Option<SimulateSection>,
    pub leakage: Option<LeakageSection>,
    pub sweep: Option<ExperimentConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WiretapSection {
    pub main: ChannelSpec,
    pub eve: ChannelSpec,
}

impl WiretapSection {
    pub fn build(&self) -> Result<WiretapChannel, String> {
        let main = ChannelModel::try_from(self.main.clone()).map_err(|e| format!("wiretap.main: {e}"))?;
        let eve = ChannelModel::try_from(self.eve.clone()).map_err(|e| format!("wiretap.eve: {e}"))?;
        WiretapChannel::new(main, eve).map_err(|e| format!("wiretap: {e}"))
    }
}

/// Message bits; `n` and `l` come from the code.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsSection {
    pub k: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanSection {
    /// Code rate; the main-channel rate when absent.
    pub r_c: Option<f64>,
    /// Target secrecy rate.
    pub r_s: f64,
    #[serde(default)]
    pub options: PlanOptions,
}

fn default_trials() -> u64 {
    10_000
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateSection {
    #[serde(default = "default_trials")]
    pub trials: u64,
    /// Fixed message; uniform messages when absent.
    pub message: Option<BitString>,
}

impl Default for SimulateSection {
    fn default() -> Self {
        Self { trials: default_trials(), message: None }
    }
}

fn default_alphas() -> Vec<f64> {
    vec![1.0, 1.5, 2.0, 4.0, 16.0, f64::INFINITY]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LeakageSection {
    /// Rényi orders for the ordering check; `inf` is allowed.
    #[serde(default = "default_alphas")]
    pub alphas: Vec<f64>,
    /// Also check a session reusing one seed this many times.
    pub recycle_eta: Option<usize>,
}

impl Default for LeakageSection {
    fn default() -> Self {
        Self { alphas: default_alphas(), recycle_eta: None }
    }
}

pub const PRESETS: [&str; 4] = ["tiny-bsc", "degraded-bsc", "awgn-basic", "rayleigh-nocsit"];

pub fn preset(name: &str) -> Option<&'static str> {
    Some(match name {
        "tiny-bsc" => TINY_BSC,
        "degraded-bsc" => DEGRADED_BSC,
        "awgn-basic" => AWGN_BASIC,
        "rayleigh-nocsit" => RAYLEIGH_NOCSIT,
        _ => return None,
    })
}

const TINY_BSC: &str = r#"
code = "identity:3"

[wiretap]
main = { type = "bsc", p = 0.01 }
eve = { type = "bsc", p = 0.1 }

[params]
k = 1

[plan]
r_s = 0.2

[simulate]
trials = 10000

[leakage]
recycle_eta = 2

[sweep]
trials = 1
experiment = { kind = "leakage_bound", n = 10.0, r_c = 0.6, r_n = 0.2, xi = 0.3, eps_a = 1.0, eps_c = 0.01, eps_beta = 1.0 }
axes = [{ name = "n", values = [10.0, 100.0, 1000.0, 10000.0] }]
"#;

const DEGRADED_BSC: &str = r#"
code = "hamming74"

[wiretap]
main = { type = "bsc", p = 0.05 }
eve = { type = "bsc", p = 0.2 }

[params]
k = 2

[plan]
r_s = 0.38

[simulate]
trials = 20000

[sweep]
trials = 20000
experiment = { kind = "error_probability", code = "hamming74", channel = { type = "bsc", p = 0.05 } }
axes = [{ name = "p", values = [0.01, 0.05, 0.1, 0.2] }]
"#;

const AWGN_BASIC: &str = r#"
code = "repetition:3:2"

[wiretap]
main = { type = "awgn", sigma2 = 1.0, power = 3.0 }
eve = { type = "awgn", sigma2 = 3.0, power = 3.0 }

[params]
k = 1

[plan]
r_s = 0.4

[simulate]
trials = 20000

[sweep]
trials = 20000
experiment = { kind = "error_probability", code = "repetition:3", channel = { type = "awgn", sigma2 = 1.0, power = 1.0 } }
axes = [{ name = "sigma2", values = [0.25, 0.5, 1.0, 2.0] }]
"#;

const RAYLEIGH_NOCSIT: &str = r#"
code = "repetition:5:2"

[wiretap]
main = { type = "fading", dist = "rayleigh", scale = 1.0, sigma2 = 0.5, power = 1.0, csit = "none" }
eve = { type = "fading", dist = "rayleigh", scale = 0.5, sigma2 = 1.0, power = 1.0, csit = "none" }

[params]
k = 1

[plan]
r_s = 0.3

[simulate]
trials = 20000

[sweep]
trials = 100000
experiment = { kind = "fading_rate", channel = { type = "fading", dist = "rayleigh", scale = 1.0, sigma2 = 1.0, power = 1.0, csit = "none" } }
axes = [{ name = "power", values = [0.5, 1.0, 2.0, 4.0] }]
"#;

/// Parses `text` strictly; errors carry the TOML line and key.
pub fn parse(text: &str, origin: &str) -> Result<Value, String> {
    let value: Value = toml::from_str(text).map_err(|e| format!("{origin}: {e}"))?;
    // Typed parse for the diagnostics; overrides are applied to `value`.
    toml::from_str::<Config>(text).map_err(|e| format!("{origin}: {e}"))?;
    Ok(value)
}

/// Sets the dotted `key` to `raw`, read as a TOML value when it parses as
/// one and as a string otherwise.
pub fn apply_override(doc: &mut Value, assignment: &str) -> Result<(), String> {
    let (key, raw) = assignment
        .split_once('=')
        .ok_or_else(|| format!("override `{assignment}` is not of the form key=value"))?;
    let key = key.trim();
    let parts: Vec<&str> = key.split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(format!("override key `{key}` has an empty component"));
    }
    let value = parse_value(raw.trim());
    let mut table = doc.as_table_mut().ok_or("config root is not a table")?;
    for (i, part) in parts.iter().enumerate() {
        if i + 1 == parts.len() {
            table.insert(part.to_string(), value);
            return Ok(());
        }
        let next = table.entry(part.to_string()).or_insert_with(|| Value::Table(Default::default()));
        table = next
            .as_table_mut()
            .ok_or_else(|| format!("override key `{key}`: `{}` is not a table", parts[..=i].join(".")))?;
    }
    unreachable!("loop returns on the last component")
}

fn parse_value(raw: &str) -> Value {
    let wrapped = format!("v = {raw}");
    match toml::from_str::<toml::Table>(&wrapped) {
        Ok(mut t) => t.remove("v").expect("key present"),
        Err(_) => Value::String(raw.to_string()),
    }
}

pub fn finish(doc: Value) -> Result<Config, String> {
    doc.try_into::<Config>().map_err(|e| format!("config after overrides: {e}"))
}
