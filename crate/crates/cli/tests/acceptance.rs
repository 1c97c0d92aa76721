//! End-to-end acceptance suite: twelve criteria, each printed as one
//! PASS/FAIL line. Run with `cargo test -p wiretap-cli --test acceptance
//! -- --nocapture` to see the report.

use std::collections::{BTreeMap, HashSet};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use wiretap_core::channel::{transmit, ChannelModel, Csit, FadingDistribution, StatePartition, WiretapChannel};
use wiretap_core::codec::{Pipeline, PipelineConfig, SessionOptions};
use wiretap_core::ecc::CodeSpec;
use wiretap_core::gf::BitString;
use wiretap_core::leakage::{blahut_arimoto, semantic_leakage_exact, ChannelTable, ExactInstance, InstanceSpec};
use wiretap_core::numeric::binary_entropy;
use wiretap_core::secrecy::{capacity, plan, typical_set_params, xi_bound, PlanOptions, PowerAllocation};
use wiretap_core::sim::{
    estimate_pipeline_error, estimate_typicality, monte_carlo_expectation, run_sweep, Axis, Experiment,
    ExperimentConfig,
};
use wiretap_core::uhf::{pseudo_message_distribution, verify_family, Property, RandomPad, WiretapParams};

const SLACK: f64 = 1e-9;
const ALPHAS: [f64; 6] = [1.0, 1.5, 2.0, 4.0, 16.0, f64::INFINITY];

type Outcome = Result<String, String>;

fn check(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within_budget(start: Instant, budget: Duration) -> Result<(), String> {
    let t = start.elapsed();
    check(t < budget, || format!("took {t:.1?}, budget {budget:?}"))
}

/// `|freq - p| <= 4 sigma` for a Bernoulli frequency.
fn within_four_sigma(hits: u64, trials: u64, p: f64) -> bool {
    let sigma = (p * (1.0 - p) / trials as f64).sqrt();
    (hits as f64 / trials as f64 - p).abs() <= 4.0 * sigma
}

fn bsc(p: f64) -> ChannelModel {
    ChannelModel::bsc(p).unwrap()
}

fn pipeline(k: usize, code: CodeSpec, main: ChannelModel, eve: ChannelModel, seed: u64) -> Pipeline {
    Pipeline::new(PipelineConfig {
        params: WiretapParams::new(code.n(), k, code.l()).unwrap(),
        code,
        wiretap: WiretapChannel::new(main, eve).unwrap(),
        seed,
    })
    .unwrap()
}

fn hash_family_exhaustive() -> Outcome {
    let start = Instant::now();
    let mut cases = 0;
    for l in 2..=6 {
        for k in 1..l {
            let params = WiretapParams::new(l, k, l).unwrap();
            for p in Property::ALL {
                let r = verify_family(params, p).map_err(|e| e.to_string())?;
                check(r.pass, || format!("{p} fails at l={l} k={k}: {} vs {}", r.worst_count, r.bound))?;
                cases += 1;
            }
        }
    }
    within_budget(start, Duration::from_secs(30))?;
    Ok(format!("{cases} property checks over 1 <= k < l <= 6 in {:.1?}", start.elapsed()))
}

fn pseudo_message_uniformity() -> Outcome {
    let mut rng = ChaCha20Rng::seed_from_u64(2);
    let mut worst = 0f64;
    for (l, k) in [(2, 1), (3, 1), (3, 2), (4, 2)] {
        let params = WiretapParams::new(l, k, l).unwrap();
        for trial in 0..20 {
            let mut law: Vec<f64> = (0..1 << k).map(|_| rng.random::<f64>()).collect();
            if trial == 0 {
                // Degenerate law: a point mass.
                law.iter_mut().enumerate().for_each(|(i, p)| *p = f64::from(u8::from(i == 0)));
            }
            let total: f64 = law.iter().sum();
            law.iter_mut().for_each(|p| *p /= total);
            let marginal = pseudo_message_distribution(params, &law).map_err(|e| e.to_string())?;
            let u = (-(l as f64)).exp2();
            worst = marginal.iter().fold(worst, |w, p| w.max((p - u).abs()));
        }
    }
    check(worst < 1e-12, || format!("max deviation {worst:e}"))?;
    Ok(format!("80 laws, max deviation {worst:.1e}"))
}

fn tiny_instances() -> Vec<ExactInstance> {
    let configs = [(1, "identity:2"), (1, "identity:3"), (2, "identity:3"), (1, "identity:4"), (2, "identity:4"), (1, "repetition:2:2")];
    let mut out = Vec::new();
    for (k, code) in configs {
        for p in [0.05, 0.1, 0.2, 0.5] {
            out.push(ExactInstance::new(InstanceSpec { k, code: code.parse().unwrap(), eve: bsc(p) }).unwrap());
        }
    }
    out
}

fn leakage_bounds_hold() -> Outcome {
    let start = Instant::now();
    let instances = tiny_instances();
    for inst in &instances {
        let masks = inst.standard_masks(&inst.pseudo_joint());
        let r = inst.evaluate(&masks, &ALPHAS).map_err(|e| e.to_string())?;
        let name = &r.instance;
        check(r.leakage_upper <= r.bound_i2 + SLACK, || format!("{name}: leakage {} > I2 bound {}", r.leakage_upper, r.bound_i2))?;
        check(r.bound_i2 <= r.bound_iinf + SLACK, || format!("{name}: I2 bound {} > Iinf bound {}", r.bound_i2, r.bound_iinf))?;
        check(r.masks.len() == 3, || format!("{name}: {} masks", r.masks.len()))?;
        for m in &r.masks {
            check(r.leakage_upper <= m.bound + SLACK, || format!("{name}/{}: leakage {} > {}", m.name, r.leakage_upper, m.bound))?;
        }
    }
    within_budget(start, Duration::from_secs(120))?;
    Ok(format!("{} instances, 3 masks each, in {:.1?}", instances.len(), start.elapsed()))
}

fn renyi_ordering() -> Outcome {
    let instances = tiny_instances();
    let mut sequences = 0;
    for inst in &instances {
        let masks = inst.standard_masks(&inst.pseudo_joint());
        let r = inst.evaluate(&masks, &ALPHAS).map_err(|e| e.to_string())?;
        for m in &r.masks {
            let ok = m.ordering.windows(2).all(|w| w[0] <= w[1] + SLACK);
            check(ok, || format!("{}/{}: {:?}", r.instance, m.name, m.ordering))?;
            sequences += 1;
        }
        check(r.ordering_pass, || format!("{}: unrestricted ordering fails", r.instance))?;
    }
    Ok(format!("{sequences} restricted sequences non-decreasing"))
}

fn exponential_decay() -> Outcome {
    let (r_c, r_n, xi) = (0.6, 0.2, 0.3);
    let g = r_c - r_n - xi;
    let config = ExperimentConfig {
        experiment: Experiment::LeakageBound { n: 100.0, r_c, r_n, xi, eps_a: 1.0, eps_c: 0.01, eps_beta: 1.0 },
        axes: vec![Axis { name: "n".into(), values: vec![1e2, 1e3, 1e4] }],
        trials: 1,
        seed: 0,
    };
    let result = run_sweep(&config, None).map_err(|e| e.to_string())?;
    let mut detail = Vec::new();
    for w in result.cells.windows(2) {
        let dn = w[1].key[0] - w[0].key[0];
        let slope = (w[1].reference.unwrap() - w[0].reference.unwrap()) / dn;
        check((slope + g / 2.0).abs() < 1e-6, || format!("dominant-term slope {slope} vs {}", -g / 2.0))?;
        check(w[1].estimate.mean < w[0].estimate.mean, || format!("bound grows from n={} to n={}", w[0].key[0], w[1].key[0]))?;
        detail.push(format!("{slope:.9}"));
    }
    Ok(format!("slopes {} vs -g/2 = {}", detail.join(", "), -g / 2.0))
}

fn capacity_formulas() -> Outcome {
    let start = Instant::now();
    let awgn = capacity(&ChannelModel::awgn(1.0, 3.0).unwrap()).map_err(|e| e.to_string())?;
    check(awgn == 1.0, || format!("AWGN capacity {awgn}"))?;
    let p = 0.11;
    let c = capacity(&bsc(p)).map_err(|e| e.to_string())?;
    let table = ChannelTable::new(2, 2, vec![1.0 - p, p, p, 1.0 - p]).map_err(|e| e.to_string())?;
    let ba = blahut_arimoto(&table, 1e-12, 10_000).map_err(|e| e.to_string())?;
    let closed = 1.0 - binary_entropy(p);
    check((closed - ba.capacity).abs() < 1e-8, || format!("BSC: 1 - h = {closed}, Blahut-Arimoto {}", ba.capacity))?;
    check((c - ba.capacity).abs() < 1e-8, || format!("BSC capacity {c} vs Blahut-Arimoto {}", ba.capacity))?;
    let dist = FadingDistribution::rayleigh(1.0).unwrap();
    let (sigma2, power) = (1.0, 1.0);
    let fading = ChannelModel::fading(dist.clone(), sigma2, power, Csit::None).unwrap();
    let quad = capacity(&fading).map_err(|e| e.to_string())?;
    let snr = power / sigma2;
    let mc = monte_carlo_expectation(|h| 0.5 * (h * h * snr).ln_1p() / std::f64::consts::LN_2, &dist, 1_000_000, 6)
        .map_err(|e| e.to_string())?;
    check((quad - mc.mean).abs() < 1e-2, || format!("Rayleigh quadrature {quad} vs Monte Carlo {}", mc.mean))?;
    within_budget(start, Duration::from_secs(60))?;
    Ok(format!("BSC {c:.10}, Rayleigh {quad:.6} vs MC {:.6}", mc.mean))
}

fn xi_consistency() -> Outcome {
    let w = WiretapChannel::new(bsc(0.05), bsc(0.2)).unwrap();
    let xi = xi_bound(&w, None).map_err(|e| e.to_string())?;
    let c_e = capacity(&w.eve).map_err(|e| e.to_string())?;
    check(xi == c_e, || format!("DMC xi {xi} vs C_E {c_e}"))?;
    let w = WiretapChannel::new(ChannelModel::awgn(1.0, 2.0).unwrap(), ChannelModel::awgn(2.0, 2.0).unwrap()).unwrap();
    let xi = xi_bound(&w, None).map_err(|e| e.to_string())?;
    let c_e = capacity(&w.eve).map_err(|e| e.to_string())?;
    check(xi == c_e, || format!("AWGN xi {xi} vs C_E {c_e}"))?;

    let fading = |d: FadingDistribution, sigma2: f64, power: f64, csit: Csit| ChannelModel::fading(d, sigma2, power, csit).unwrap();
    let rayleigh = FadingDistribution::rayleigh(1.0).unwrap();
    let atoms = FadingDistribution::discrete(vec![(0.0, 0.5), (2f64.sqrt(), 0.5)]).unwrap();
    let w = WiretapChannel::new(fading(rayleigh.clone(), 1.0, 1.0, Csit::None), fading(atoms, 1.0, 1.0, Csit::None)).unwrap();
    let two_atom = xi_bound(&w, None).map_err(|e| e.to_string())?;
    check((two_atom - 0.25 * 3f64.log2()).abs() < 1e-10, || format!("two-atom xi {two_atom}"))?;

    let power = 2.0;
    let eve = FadingDistribution::rayleigh(0.8).unwrap();
    let pair = |csit| WiretapChannel::new(fading(rayleigh.clone(), 1.0, power, csit), fading(eve.clone(), 1.0, power, csit)).unwrap();
    let none = xi_bound(&pair(Csit::None), None).map_err(|e| e.to_string())?;
    let mut worst = 0f64;
    for d in [1, 3, 8] {
        let part = StatePartition::equal_probability(&rayleigh, d).map_err(|e| e.to_string())?;
        let alloc = PowerAllocation::MainStates { boundaries: part.boundaries, gamma: vec![power; d] };
        let partial = xi_bound(&pair(Csit::Partial), Some(&alloc)).map_err(|e| e.to_string())?;
        worst = worst.max((partial - none).abs());
    }
    check(worst < 1e-8, || format!("partial vs no-CSIT gap {worst:e}"))?;
    Ok(format!("two-atom {two_atom:.12}, partial/no-CSIT gap {worst:.1e}"))
}

fn typicality_empirics() -> Outcome {
    let start = Instant::now();
    let (n, sigma2, power) = (100u64, 1.0, 1.0);
    let dist = FadingDistribution::rayleigh(1.0).unwrap();
    let spec = typical_set_params(n, [0.5, 0.5, 0.5], &dist, power, sigma2, 8).map_err(|e| e.to_string())?;
    let channel = ChannelModel::fading(dist, sigma2, power, Csit::None).unwrap();
    let x: Vec<f64> = (0..n).map(|i| if i % 3 == 0 { -power.sqrt() } else { power.sqrt() }).collect();
    let t = estimate_typicality(&spec, &channel, &x, 10_000, 8).map_err(|e| e.to_string())?;
    for (name, s) in [("P_out", &t.output_power), ("P_noise", &t.noise), ("P_erg", &t.ergodic), ("T_n", &t.joint)] {
        check(s.pass, || format!("{name}: {} +- {} below {}", s.estimate.mean, s.estimate.stderr, s.bound))?;
    }
    within_budget(start, Duration::from_secs(120))?;
    Ok(format!(
        "P_out {:.4}>={:.4} P_noise {:.4}>={:.4} P_erg {:.4}>={:.4} T_n {:.4}>={:.4}",
        t.output_power.estimate.mean,
        t.output_power.bound,
        t.noise.estimate.mean,
        t.noise.bound,
        t.ergodic.estimate.mean,
        t.ergodic.bound,
        t.joint.estimate.mean,
        t.joint.bound
    ))
}

fn seed_recycling() -> Outcome {
    let p = pipeline(1, CodeSpec::identity(3).unwrap(), bsc(0.0), bsc(0.5), 9);
    let sessions = 100_000u64;
    let opts = SessionOptions { inject_error: Some(0.1) };
    let mut detail = Vec::new();
    for eta in [2usize, 5] {
        let msgs: Vec<BitString> = (0..eta).map(|i| BitString::from_u64((i % 2) as u64, 1).unwrap()).collect();
        let mut failed = 0u64;
        for s in 0..sessions {
            failed += p.run_session(&msgs, s, &opts).map_err(|e| e.to_string())?.session_error as u64;
        }
        let expect = 1.0 - 0.9f64.powi(eta as i32);
        check(within_four_sigma(failed, sessions, expect), || format!("eta {eta}: {failed}/{sessions} vs {expect}"))?;
        detail.push(format!("eta {eta}: {:.4} vs {expect:.4}", failed as f64 / sessions as f64));
    }
    for (k, code) in [(1, "identity:2"), (1, "identity:3"), (1, "repetition:2:2")] {
        for q in [0.05, 0.2] {
            let inst = ExactInstance::new(InstanceSpec { k, code: code.parse().unwrap(), eve: bsc(q) }).unwrap();
            let single = semantic_leakage_exact(&inst.message_channel()).map_err(|e| e.to_string())?;
            let joint = semantic_leakage_exact(&inst.recycled_channel(2).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
            check(joint.upper <= 2.0 * single.capacity + SLACK, || {
                format!("{code} BSC({q}): joint {} > 2 x {}", joint.upper, single.capacity)
            })?;
        }
    }
    Ok(detail.join(", ") + "; eta = 2 joint leakage within 2x on 6 instances")
}

fn degraded_planner() -> Outcome {
    let w = WiretapChannel::new(bsc(0.05), bsc(0.2)).unwrap();
    let c_t = 1.0 - binary_entropy(0.05);
    let c_e = 1.0 - binary_entropy(0.2);
    let sup = plan(&w, None, 0.0, &PlanOptions::default()).map_err(|e| e.to_string())?.r_s_sup;
    check((sup - (c_t - c_e)).abs() < 1e-6, || format!("planner sup {sup} vs C_T - C_E {}", c_t - c_e))?;
    let r_s = c_t - c_e - 0.05;
    let p = plan(&w, None, r_s, &PlanOptions::default()).map_err(|e| e.to_string())?;
    check(p.feasible, || format!("R_s = {r_s} infeasible"))?;
    // Hamming(7,4): n = 7, l = 4, and the largest k with k / n <= R_s.
    let code: CodeSpec = "hamming74".parse().unwrap();
    let k = (r_s * code.n() as f64).floor() as usize;
    check(k >= 1 && k < code.l(), || format!("k = {k}"))?;
    let inst = ExactInstance::new(InstanceSpec { k, code, eve: bsc(0.2) }).map_err(|e| e.to_string())?;
    let r = inst.evaluate(&inst.standard_masks(&inst.pseudo_joint()), &ALPHAS).map_err(|e| e.to_string())?;
    check(r.pass && r.n == 7, || format!("bound checks fail: {r:?}"))?;
    let pipe = pipeline(k, code, bsc(0.05), bsc(0.2), 10);
    let est = estimate_pipeline_error(&pipe, None, 20_000).map_err(|e| e.to_string())?;
    let (me, pe) = (est.message_error, est.pseudo_error);
    check(me.mean <= pe.mean + 4.0 * pe.stderr.max(me.stderr), || format!("message error {} vs {}", me.mean, pe.mean))?;
    Ok(format!("sup {sup:.9}, k = {k} at n = 7, leakage {:.6} <= {:.6}", r.leakage_upper, r.bound_i2))
}

fn reliability_preserved() -> Outcome {
    let mut rng = ChaCha20Rng::seed_from_u64(11);
    let mut words = 0u64;
    for l in 2..=6 {
        for k in 1..l {
            let p = pipeline(k, CodeSpec::identity(l).unwrap(), bsc(0.0), bsc(0.5), 0);
            let family = p.family();
            for i in 0..family.seed_count().unwrap() as u64 {
                let seed = family.seed_by_index(i).unwrap();
                for m in BitString::all(k) {
                    let mut seen = HashSet::new();
                    for pad in BitString::all(l - k) {
                        let x = p.wiretap_encode(&seed, &m, &RandomPad(pad)).map_err(|e| e.to_string())?;
                        let y = transmit(&p.config().wiretap.main, &x, &mut rng).map_err(|e| e.to_string())?;
                        let m_hat = p.wiretap_decode(&seed, &y.z, None).map_err(|e| e.to_string())?;
                        check(m_hat == m && seen.insert(format!("{x:?}")), || format!("l={l} k={k} seed #{i} m={m}"))?;
                        words += 1;
                    }
                }
            }
        }
    }
    let p = pipeline(1, CodeSpec::repetition(3, 2).unwrap(), bsc(0.1), bsc(0.3), 11);
    let est = estimate_pipeline_error(&p, None, 100_000).map_err(|e| e.to_string())?;
    let (me, pe) = (est.message_error, est.pseudo_error);
    let sigma = pe.stderr;
    check(me.mean <= pe.mean + 4.0 * sigma, || format!("message error {} vs pseudo {} + 4 x {sigma}", me.mean, pe.mean))?;
    Ok(format!("{words} noiseless round trips; rep-3 BSC(0.1) message {:.5} <= pseudo {:.5}", me.mean, pe.mean))
}

fn read_tree(root: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for entry in std::fs::read_dir(&dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else {
                let rel = path.strip_prefix(root).unwrap().display().to_string();
                out.insert(rel, std::fs::read(&path).unwrap());
            }
        }
    }
    out
}

fn cli_determinism() -> Outcome {
    let runs: [&[&str]; 7] = [
        &["verify-uhf", "--l", "4", "--k", "2"],
        &["--preset", "tiny-bsc", "plan"],
        &["--preset", "rayleigh-nocsit", "plan"],
        &["--preset", "tiny-bsc", "leakage"],
        &["--preset", "degraded-bsc", "simulate", "--trials", "5000"],
        &["--preset", "degraded-bsc", "sweep", "--trials", "2000"],
        &["--preset", "rayleigh-nocsit", "sweep", "--trials", "20000"],
    ];
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut files = 0;
    for (i, args) in runs.iter().enumerate() {
        let mut trees = Vec::new();
        let mut stdouts = Vec::new();
        for rep in 0..2 {
            let out = tmp.path().join(format!("run{i}-{rep}"));
            let o = Command::new(env!("CARGO_BIN_EXE_wiretap"))
                .args(*args)
                .args(["--seed", "7", "--out"])
                .arg(&out)
                .output()
                .map_err(|e| e.to_string())?;
            check(o.status.success(), || format!("{args:?}: {}", String::from_utf8_lossy(&o.stderr)))?;
            trees.push(read_tree(&out));
            stdouts.push(o.stdout);
        }
        check(!trees[0].is_empty(), || format!("{args:?} wrote no artifacts"))?;
        check(trees[0] == trees[1], || format!("{args:?}: artifacts differ between runs"))?;
        check(stdouts[0] == stdouts[1], || format!("{args:?}: output differs between runs"))?;
        files += trees[0].len();
    }
    Ok(format!("{} invocations, {files} artifacts byte-identical", runs.len()))
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("hash family properties, exhaustive", hash_family_exhaustive),
        ("pseudo-message uniformity", pseudo_message_uniformity),
        ("one-shot leakage bounds", leakage_bounds_hold),
        ("Renyi ordering", renyi_ordering),
        ("exponential leakage decay", exponential_decay),
        ("capacity formulas", capacity_formulas),
        ("xi consistency", xi_consistency),
        ("typicality empirics", typicality_empirics),
        ("seed recycling", seed_recycling),
        ("degraded BSC planner", degraded_planner),
        ("reliability preservation", reliability_preserved),
        ("CLI determinism", cli_determinism),
    ];
    let mut failed = Vec::new();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let t = start.elapsed();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} [{t:.1?}]", i + 1),
            Err(why) => {
                println!("FAIL {:>2} {name}: {why} [{t:.1?}]", i + 1);
                failed.push(i + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failing criteria: {failed:?}");
}
