//! `wiretap`: verify the hash family, plan rates, simulate the pipeline,
//! evaluate exact leakage and run sweeps.
//!
//! Exit codes: 0 success, 1 domain failure (infeasible plan, violated
//! bound or invariant), 2 usage or configuration error.

mod config;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use sha2::{Digest, Sha256};
use wiretap_core::codec::{Pipeline, PipelineConfig};
use wiretap_core::leakage::{semantic_leakage_exact, ExactInstance, InstanceSpec};
use wiretap_core::secrecy::plan;
use wiretap_core::sim::{self, estimate_error_probability, estimate_pipeline_error, run_sweep, Metadata};
use wiretap_core::uhf::{verify_family, Property, WiretapParams, MAX_EXHAUSTIVE_L};

use config::Config;

#[derive(Debug, Parser)]
#[command(name = "wiretap", version, about = "Seeded-hash wiretap coding toolkit")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// TOML config file with sections wiretap, code, params, plan, simulate, leakage, sweep.
    #[arg(long, global = true, env = "WIRETAP_CONFIG", value_name = "FILE")]
    config: Option<PathBuf>,
    /// Built-in config: tiny-bsc, degraded-bsc, awgn-basic or rayleigh-nocsit; a config file is layered on top.
    #[arg(long, global = true, env = "WIRETAP_PRESET", value_name = "NAME")]
    preset: Option<String>,
    /// Override a config value by dotted key, e.g. --set wiretap.eve.p=0.2 (repeatable, applied in order).
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Random seed; overrides the config's `seed`.
    #[arg(long, global = true, env = "WIRETAP_SEED")]
    seed: Option<u64>,
    /// Directory for artifacts, created if missing.
    #[arg(long, global = true, env = "WIRETAP_OUT", value_name = "DIR", default_value = "wiretap-out")]
    out: PathBuf,
    /// Also write the command's JSON report to this path.
    #[arg(long, global = true, value_name = "FILE")]
    json: Option<PathBuf>,
    /// Monte Carlo trials; overrides simulate.trials or sweep.trials.
    #[arg(long, global = true, env = "WIRETAP_TRIALS")]
    trials: Option<u64>,
    /// Suppress the human-readable report on stdout.
    #[arg(long, short, global = true)]
    quiet: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Exhaustively check the five hash-family properties at small (l, k).
    VerifyUhf(VerifyArgs),
    /// Plan code and secrecy rates for the configured wiretap channel.
    Plan,
    /// Estimate pipeline and code error rates by Monte Carlo.
    Simulate,
    /// Exact leakage of a small instance against its one-shot bounds.
    Leakage,
    /// Evaluate the configured parameter grid and write CSV and JSON.
    Sweep,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// Pseudo-message bits (field degree), at most 6.
    #[arg(long)]
    l: usize,
    /// Message bits, 1 <= k < l.
    #[arg(long)]
    k: usize,
}

/// A failed command: exit status and message.
struct Failure(u8, String);

fn usage(msg: impl Into<String>) -> Failure {
    Failure(2, msg.into())
}

fn domain(msg: impl Into<String>) -> Failure {
    Failure(1, msg.into())
}

fn load_config(common: &Common) -> Result<Config, Failure> {
    let mut doc = toml::Value::Table(Default::default());
    if let Some(name) = &common.preset {
        let text = config::preset(name).ok_or_else(|| {
            usage(format!("unknown preset `{name}` (expected one of {})", config::PRESETS.join(", ")))
        })?;
        doc = config::parse(text, &format!("preset {name}")).map_err(usage)?;
    }
    if let Some(path) = &common.config {
        let text = fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
        let file = config::parse(&text, &path.display().to_string()).map_err(usage)?;
        merge(&mut doc, file);
    }
    for s in &common.set {
        config::apply_override(&mut doc, s).map_err(usage)?;
    }
    let mut cfg = config::finish(doc).map_err(usage)?;
    if let Some(seed) = common.seed {
        cfg.seed = Some(seed);
    }
    Ok(cfg)
}

/// Recursive table merge, `top` winning.
fn merge(base: &mut toml::Value, top: toml::Value) {
    match (base, top) {
        (toml::Value::Table(b), toml::Value::Table(t)) => {
            for (k, v) in t {
                match b.get_mut(&k) {
                    Some(slot) if slot.is_table() && v.is_table() => merge(slot, v),
                    _ => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (b, t) => *b = t,
    }
}

fn required<'a, T>(section: &'a Option<T>, name: &str) -> Result<&'a T, Failure> {
    section.as_ref().ok_or_else(|| usage(format!("config has no `{name}` section (use --config, --preset or --set)")))
}

/// Artifact envelope: the report plus provenance.
#[derive(Serialize)]
struct Artifact<'a, T: Serialize> {
    command: &'a str,
    metadata: Metadata,
    report: T,
}

/// Provenance over the command's effective inputs.
fn metadata<C: Serialize>(inputs: &C, seed: Option<u64>) -> Metadata {
    let json = serde_json::to_string(inputs).expect("inputs serialize");
    Metadata {
        config_hash: hex::encode(Sha256::digest(json.as_bytes())),
        seed: seed.unwrap_or(0),
        git_describe: sim::git_describe(),
    }
}

fn write_artifact<T: Serialize>(common: &Common, command: &str, meta: Metadata, report: T) -> Result<(), Failure> {
    let artifact = Artifact { command, metadata: meta, report };
    let text = serde_json::to_string_pretty(&artifact).expect("report serializes") + "\n";
    fs::create_dir_all(&common.out).map_err(|e| usage(format!("{}: {e}", common.out.display())))?;
    let path = common.out.join(format!("{command}.json"));
    write_file(&path, &text)?;
    if let Some(extra) = &common.json {
        write_file(extra, &text)?;
    }
    Ok(())
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| usage(format!("{}: {e}", parent.display())))?;
    }
    fs::write(path, text).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn say(common: &Common, text: impl std::fmt::Display) {
    if !common.quiet {
        println!("{text}");
    }
}

fn cmd_verify(common: &Common, args: &VerifyArgs) -> Result<(), Failure> {
    if args.l > MAX_EXHAUSTIVE_L {
        return Err(usage(format!("exhaustive verification needs l <= {MAX_EXHAUSTIVE_L}, got {}", args.l)));
    }
    let params = WiretapParams::new(args.l, args.k, args.l).map_err(|e| usage(e.to_string()))?;
    let mut reports = Vec::new();
    for p in Property::ALL {
        let r = verify_family(params, p).map_err(|e| usage(e.to_string()))?;
        say(
            common,
            format!(
                "{:<18} {}  count {} vs bound {}",
                r.property.to_string(),
                if r.pass { "PASS" } else { "FAIL" },
                r.worst_count,
                r.bound
            ),
        );
        reports.push(r);
    }
    let pass = reports.iter().all(|r| r.pass);
    let inputs = serde_json::json!({ "l": args.l, "k": args.k });
    write_artifact(common, "verify-uhf", metadata(&inputs, None), &reports)?;
    if pass {
        Ok(())
    } else {
        Err(domain(format!("hash family fails at l = {}, k = {}", args.l, args.k)))
    }
}

fn cmd_plan(common: &Common, cfg: &Config) -> Result<(), Failure> {
    let wiretap = required(&cfg.wiretap, "wiretap")?.build().map_err(usage)?;
    let section = required(&cfg.plan, "plan")?;
    let p = plan(&wiretap, section.r_c, section.r_s, &section.options).map_err(|e| usage(e.to_string()))?;
    say(common, &p);
    write_artifact(common, "plan", metadata(cfg, cfg.seed), &p)?;
    if p.feasible {
        Ok(())
    } else {
        Err(domain(format!("R_s = {} is not below the achievable supremum {}", p.r_s, p.r_s_sup)))
    }
}

fn pipeline(cfg: &Config) -> Result<Pipeline, Failure> {
    let wiretap = required(&cfg.wiretap, "wiretap")?.build().map_err(usage)?;
    let code = required(&cfg.code, "code")?.for_channel(&wiretap.main).map_err(|e| usage(e.to_string()))?;
    let k = required(&cfg.params, "params")?.k;
    let params = WiretapParams::new(code.n(), k, code.l()).map_err(|e| usage(e.to_string()))?;
    Pipeline::new(PipelineConfig { params, code, wiretap, seed: cfg.seed.unwrap_or(0) }).map_err(|e| usage(e.to_string()))
}

#[derive(Serialize)]
struct SimulateReport {
    trials: u64,
    message_error: sim::Estimate,
    pseudo_error: sim::Estimate,
    code_error: sim::ErrorEstimate,
    code_error_exact: Option<f64>,
    /// Message error at most pseudo-message error plus four standard errors.
    reliability_preserved: bool,
}

fn cmd_simulate(common: &Common, cfg: &Config) -> Result<(), Failure> {
    let section = cfg.simulate.clone().unwrap_or_default();
    let trials = common.trials.unwrap_or(section.trials);
    if trials < sim::MIN_ERROR_TRIALS {
        return Err(usage(format!("--trials must be at least {}, got {trials}", sim::MIN_ERROR_TRIALS)));
    }
    let p = pipeline(cfg)?;
    let est = estimate_pipeline_error(&p, section.message.as_ref(), trials).map_err(|e| usage(e.to_string()))?;
    let main = &p.config().wiretap.main;
    let code_error = estimate_error_probability(p.code(), main, trials, p.config().seed)
        .map_err(|e| usage(e.to_string()))?;
    let report = SimulateReport {
        trials,
        message_error: est.message_error,
        pseudo_error: est.pseudo_error,
        code_error_exact: p.code().error_probability_exact(main).ok(),
        code_error,
        reliability_preserved: est.message_error.mean
            <= est.pseudo_error.mean + 4.0 * est.pseudo_error.stderr.max(est.message_error.stderr),
    };
    say(
        common,
        format!(
            "trials {trials}\nmessage error        {:.6} +- {:.6}\npseudo-message error {:.6} +- {:.6}\nworst code error     {:.6} +- {:.6}{}",
            report.message_error.mean,
            report.message_error.stderr,
            report.pseudo_error.mean,
            report.pseudo_error.stderr,
            report.code_error.worst.mean,
            report.code_error.worst.stderr,
            report.code_error_exact.map(|e| format!(" (exact {e:.6})")).unwrap_or_default()
        ),
    );
    let ok = report.reliability_preserved;
    write_artifact(common, "simulate", metadata(cfg, cfg.seed), &report)?;
    if ok {
        Ok(())
    } else {
        Err(domain("message error exceeds pseudo-message error"))
    }
}

#[derive(Serialize)]
struct RecycleReport {
    eta: usize,
    joint_leakage: f64,
    single_leakage: f64,
    /// Joint leakage at most `eta` times the single-use leakage.
    pass: bool,
}

#[derive(Serialize)]
struct LeakageOutput {
    #[serde(flatten)]
    report: wiretap_core::leakage::LeakageReport,
    recycle: Option<RecycleReport>,
}

fn cmd_leakage(common: &Common, cfg: &Config) -> Result<(), Failure> {
    let section = cfg.leakage.clone().unwrap_or_default();
    let wiretap = required(&cfg.wiretap, "wiretap")?.build().map_err(usage)?;
    let code = *required(&cfg.code, "code")?;
    let k = required(&cfg.params, "params")?.k;
    let inst = ExactInstance::new(InstanceSpec { k, code, eve: wiretap.eve }).map_err(|e| usage(e.to_string()))?;
    let masks = inst.standard_masks(&inst.pseudo_joint());
    let report = inst.evaluate(&masks, &section.alphas).map_err(|e| usage(e.to_string()))?;
    say(
        common,
        format!(
            "{}\nleakage {:.9} (upper {:.9})\nI2 bound {:.9}  Iinf bound {:.9}\nmasks {}  ordering {}",
            report.instance,
            report.leakage_exact,
            report.leakage_upper,
            report.bound_i2,
            report.bound_iinf,
            report.masks.iter().map(|m| format!("{}={}", m.name, if m.pass { "ok" } else { "VIOLATED" })).collect::<Vec<_>>().join(" "),
            if report.ordering_pass { "ok" } else { "VIOLATED" }
        ),
    );
    let recycle = match section.recycle_eta {
        None => None,
        Some(eta) => {
            let joint = inst.recycled_channel(eta).map_err(|e| usage(e.to_string()))?;
            let joint = semantic_leakage_exact(&joint).map_err(|e| usage(e.to_string()))?;
            let single = semantic_leakage_exact(&inst.message_channel()).map_err(|e| usage(e.to_string()))?;
            let pass = joint.capacity <= eta as f64 * single.upper + 1e-9;
            say(common, format!("eta {eta}: joint leakage {:.9} vs {eta} x {:.9}", joint.capacity, single.upper));
            Some(RecycleReport { eta, joint_leakage: joint.capacity, single_leakage: single.upper, pass })
        }
    };
    let ok = report.pass && recycle.as_ref().is_none_or(|r| r.pass);
    write_artifact(common, "leakage", metadata(cfg, cfg.seed), &LeakageOutput { report, recycle })?;
    if ok {
        Ok(())
    } else {
        Err(domain("a leakage bound is violated"))
    }
}

fn cmd_sweep(common: &Common, cfg: &Config) -> Result<(), Failure> {
    let mut sweep = required(&cfg.sweep, "sweep")?.clone();
    if let Some(seed) = cfg.seed {
        sweep.seed = seed;
    }
    if let Some(t) = common.trials {
        sweep.trials = t;
    }
    sweep.validate().map_err(|e| usage(e.to_string()))?;
    let dir = &common.out;
    let result = run_sweep(&sweep, Some(dir)).map_err(|e| match e {
        sim::SimError::InvalidParameter(m) => usage(m),
        other => domain(other.to_string()),
    })?;
    let mut table = Vec::new();
    sim::write_csv(&result, &mut table).expect("in-memory write");
    say(common, String::from_utf8_lossy(&table));
    if let Some(extra) = &common.json {
        let text = fs::read_to_string(dir.join(sim::JSON_FILE)).map_err(|e| usage(e.to_string()))?;
        write_file(extra, &text)?;
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<(), Failure> {
    if let Command::VerifyUhf(args) = &cli.command {
        return cmd_verify(&cli.common, args);
    }
    let cfg = load_config(&cli.common)?;
    match &cli.command {
        Command::VerifyUhf(_) => unreachable!("handled above"),
        Command::Plan => cmd_plan(&cli.common, &cfg),
        Command::Simulate => cmd_simulate(&cli.common, &cfg),
        Command::Leakage => cmd_leakage(&cli.common, &cfg),
        Command::Sweep => cmd_sweep(&cli.common, &cfg),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure(code, msg)) => {
            eprintln!("wiretap: {msg}");
            ExitCode::from(code)
        }
    }
}
