use std::fs;

use wiretap_core::channel::{ChannelModel, ChannelSpec, Csit, FadingDistribution};
use wiretap_core::ecc::CodeSpec;
use wiretap_core::secrecy::{KStar, TypicalSetSpec};
use wiretap_core::sim::{
    estimate_error_probability, estimate_typicality, monte_carlo_expectation, read_csv, run_sweep, write_csv, Axis,
    Experiment, ExperimentConfig, CELL_DIR, CSV_FILE, JSON_FILE,
};

fn within_4_sigma(mean: f64, stderr: f64, truth: f64) -> bool {
    (mean - truth).abs() <= 4.0 * stderr
}

#[test]
fn repetition_three_error_matches_binomial() {
    let code = CodeSpec::repetition(3, 1).unwrap();
    let bsc = ChannelModel::bsc(0.1).unwrap();
    let est = estimate_error_probability(&code, &bsc, 1_000_000, 7).unwrap();
    // Two or three of three flips.
    let p: f64 = 0.1;
    let exact = 3.0 * p * p * (1.0 - p) + p.powi(3);
    assert!((exact - 0.028).abs() < 1e-15);
    assert!(est.enumerated);
    assert_eq!(est.per_message.len(), 2);
    for (_, e) in &est.per_message {
        assert!(within_4_sigma(e.mean, e.stderr, exact), "{e:?}");
    }
    assert!(est.worst.mean >= est.per_message[0].1.mean.min(est.per_message[1].1.mean));
}

#[test]
fn noiseless_and_coin_flip_channels() {
    let code = CodeSpec::identity(3).unwrap();
    let est = estimate_error_probability(&code, &ChannelModel::bsc(0.0).unwrap(), 1000, 1).unwrap();
    assert_eq!(est.worst.mean, 0.0);
    assert_eq!(est.worst.stderr, 0.0);
    let est = estimate_error_probability(&CodeSpec::identity(1).unwrap(), &ChannelModel::bsc(0.5).unwrap(), 100_000, 2)
        .unwrap();
    for (_, e) in &est.per_message {
        assert!(within_4_sigma(e.mean, e.stderr, 0.5));
    }
    assert!(estimate_error_probability(&code, &ChannelModel::bsc(0.0).unwrap(), 99, 1).is_err());
}

#[test]
fn large_codes_sample_messages() {
    let code = CodeSpec::hamming74(2).unwrap();
    let p: f64 = 0.05;
    let est = estimate_error_probability(&code, &ChannelModel::bsc(p).unwrap(), 200_000, 3).unwrap();
    assert!(!est.enumerated && est.per_message.is_empty());
    // A block decodes iff at most one of its 7 bits flips.
    let block_ok = (1.0 - p).powi(7) + 7.0 * p * (1.0 - p).powi(6);
    assert!(within_4_sigma(est.worst.mean, est.worst.stderr, 1.0 - block_ok * block_ok));
}

#[test]
fn estimates_do_not_depend_on_thread_count() {
    let code = CodeSpec::repetition(3, 2).unwrap();
    let bsc = ChannelModel::bsc(0.2).unwrap();
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| estimate_error_probability(&code, &bsc, 20_000, 11).unwrap())
    };
    assert_eq!(run(1), run(4));
    let dist = FadingDistribution::rayleigh(1.0).unwrap();
    let mc = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| monte_carlo_expectation(|h| h.sqrt(), &dist, 50_000, 5).unwrap())
    };
    assert_eq!(mc(1), mc(3));
}

fn rayleigh_spec(n: u64, k_star: f64, dist: &FadingDistribution) -> TypicalSetSpec {
    TypicalSetSpec::with_k_star(n, [0.5, 0.5, 0.5], dist, 1.0, 1.0, KStar::exact(k_star)).unwrap()
}

#[test]
fn typical_sets_hold_their_bounds() {
    let dist = FadingDistribution::rayleigh(1.0).unwrap();
    let channel = ChannelModel::fading(dist.clone(), 1.0, 1.0, Csit::None).unwrap();
    let spec = rayleigh_spec(100, 20.0, &dist);
    assert!((spec.eps2 - (-6.25f64).exp()).abs() < 1e-15);
    let x: Vec<f64> = (0..100).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
    let t = estimate_typicality(&spec, &channel, &x, 10_000, 4).unwrap();
    assert!(t.pass(), "{t:?}");
    assert!(t.noise.estimate.mean >= 1.0 - (-6.25f64).exp() - 4.0 * t.noise.estimate.stderr);
    assert!(t.joint.estimate.mean <= t.noise.estimate.mean.min(t.output_power.estimate.mean));
}

#[test]
fn constant_gain_is_always_ergodic() {
    let dist = FadingDistribution::constant(1.3).unwrap();
    let channel = ChannelModel::fading(dist.clone(), 1.0, 1.0, Csit::None).unwrap();
    let spec = TypicalSetSpec::with_k_star(50, [0.5, 0.5, 0.1], &dist, 1.0, 1.0, KStar::exact(10.0)).unwrap();
    let t = estimate_typicality(&spec, &channel, &[1.0; 50], 2000, 9).unwrap();
    assert_eq!(t.ergodic.estimate.mean, 1.0);
    assert!(estimate_typicality(&spec, &channel, &[1.0; 49], 2000, 9).is_err());
    assert!(estimate_typicality(&spec, &channel, &[1.0; 50], 999, 9).is_err());
    assert!(estimate_typicality(&spec, &ChannelModel::awgn(1.0, 1.0).unwrap(), &[1.0; 50], 2000, 9).is_err());
}

/// Composite Simpson of `f(h)` against the Rayleigh(1) density on [0, 40].
fn rayleigh_simpson(f: impl Fn(f64) -> f64) -> f64 {
    let steps = 200_000;
    let width = 40.0 / steps as f64;
    let g = |h: f64| f(h) * h * (-h * h / 2.0).exp();
    let inner: f64 = (1..steps).map(|i| g(i as f64 * width) * if i % 2 == 1 { 4.0 } else { 2.0 }).sum();
    (g(0.0) + inner + g(40.0)) * width / 3.0
}

#[test]
fn monte_carlo_expectations_match_closed_forms() {
    let dist = FadingDistribution::rayleigh(1.0).unwrap();
    let f = |h: f64| (1.0 + h * h).log2();
    let mc = monte_carlo_expectation(f, &dist, 1_000_000, 3).unwrap();
    assert!((mc.mean - rayleigh_simpson(f)).abs() < 1e-2);
    assert_eq!(mc.trials, 1_000_000);
    let second = monte_carlo_expectation(|h| h * h, &dist, 200_000, 4).unwrap();
    assert!(within_4_sigma(second.mean, second.stderr, 2.0), "{second:?}");
    let constant = monte_carlo_expectation(|_| 0.75, &dist, 10_000, 5).unwrap();
    assert_eq!(constant.mean, 0.75);
    assert_eq!(constant.stderr, 0.0);
}

fn leakage_config(ns: Vec<f64>) -> ExperimentConfig {
    ExperimentConfig {
        experiment: Experiment::LeakageBound {
            n: 10.0,
            r_c: 0.6,
            r_n: 0.2,
            xi: 0.3,
            eps_a: 1.0,
            eps_c: 0.01,
            eps_beta: 1.0,
        },
        axes: vec![Axis { name: "n".into(), values: ns }],
        trials: 1,
        seed: 42,
    }
}

#[test]
fn leakage_sweep_is_linear_in_n() {
    let ns: Vec<f64> = (1..=100).map(|i| 10.0 * i as f64).collect();
    let r = run_sweep(&leakage_config(ns.clone()), None).unwrap();
    assert_eq!(r.cells.len(), 100);
    let gap = 0.6 - 0.2 - 0.3;
    for w in r.cells.windows(2) {
        let dn = w[1].key[0] - w[0].key[0];
        let slope = (w[1].reference.unwrap() - w[0].reference.unwrap()) / dn;
        assert!((slope + gap / 2.0).abs() < 1e-6, "slope {slope}");
        assert!(w[1].estimate.mean >= w[1].reference.unwrap());
    }
}

#[test]
fn one_cell_sweep_is_one_experiment() {
    let cfg = ExperimentConfig {
        experiment: Experiment::ErrorProbability {
            code: CodeSpec::repetition(3, 1).unwrap(),
            channel: ChannelSpec::Bsc { p: 0.1 },
        },
        axes: vec![],
        trials: 5000,
        seed: 3,
    };
    let r = run_sweep(&cfg, None).unwrap();
    assert_eq!(r.cells.len(), 1);
    let direct = estimate_error_probability(
        &CodeSpec::repetition(3, 1).unwrap(),
        &ChannelModel::bsc(0.1).unwrap(),
        5000,
        wiretap_core::rng::derive_seed(3, 0),
    )
    .unwrap();
    assert_eq!(r.cells[0].estimate, direct.worst);
    assert!((r.cells[0].reference.unwrap() - 0.028).abs() < 1e-12);
}

fn grid_config() -> ExperimentConfig {
    ExperimentConfig {
        experiment: Experiment::ErrorProbability {
            code: CodeSpec::repetition(3, 1).unwrap(),
            channel: ChannelSpec::Bsc { p: 0.1 },
        },
        axes: vec![
            Axis { name: "rho".into(), values: vec![1.0, 3.0, 5.0] },
            Axis { name: "p".into(), values: vec![0.01, 0.1, 0.3] },
        ],
        trials: 2000,
        seed: 17,
    }
}

#[test]
fn sweep_artifacts_are_reproducible_and_round_trip() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let cfg = grid_config();
    let ra = run_sweep(&cfg, Some(a.path())).unwrap();
    run_sweep(&cfg, Some(b.path())).unwrap();
    for f in [CSV_FILE, JSON_FILE] {
        assert_eq!(fs::read(a.path().join(f)).unwrap(), fs::read(b.path().join(f)).unwrap());
    }
    let text = fs::read_to_string(a.path().join(CSV_FILE)).unwrap();
    assert!(text.starts_with("rho,p,estimate,stderr,trials,reference\n"));
    let (axes, cells) = read_csv(text.as_bytes()).unwrap();
    assert_eq!(axes, ra.axes);
    assert_eq!(cells, ra.cells);
    let mut again = Vec::new();
    write_csv(&ra, &mut again).unwrap();
    assert_eq!(again, text.as_bytes());
    assert_eq!(ra.metadata.seed, 17);
    assert_eq!(ra.metadata.config_hash.len(), 64);
    assert_eq!(ra.cells[0].key, vec![1.0, 0.01]);
    assert_eq!(ra.cells[5].key, vec![3.0, 0.3]);
}

#[test]
fn sweep_resumes_from_completed_cells() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = grid_config();
    let first = run_sweep(&cfg, Some(dir.path())).unwrap();
    let cells = dir.path().join(CELL_DIR);
    assert_eq!(fs::read_dir(&cells).unwrap().count(), 9);
    // A marker is trusted as written: tamper with one to see it reused.
    let marker = cells.join("cell-000004.json");
    let text = fs::read_to_string(&marker).unwrap();
    let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
    v["cell"]["estimate"]["mean"] = serde_json::json!(0.5);
    fs::write(&marker, v.to_string()).unwrap();
    fs::remove_file(cells.join("cell-000007.json")).unwrap();
    let resumed = run_sweep(&cfg, Some(dir.path())).unwrap();
    assert_eq!(resumed.cells[4].estimate.mean, 0.5);
    assert_eq!(resumed.cells[7], first.cells[7]);
    // A different config ignores stale markers.
    let mut other = cfg.clone();
    other.seed = 18;
    let fresh = run_sweep(&other, Some(dir.path())).unwrap();
    assert_ne!(fresh.cells[4].estimate.mean, 0.5);
}

#[test]
fn invalid_sweeps_are_rejected() {
    let mut cfg = grid_config();
    cfg.axes.push(Axis { name: "sigma2".into(), values: vec![1.0] });
    assert!(run_sweep(&cfg, None).is_err());
    let mut cfg = grid_config();
    cfg.trials = 0;
    assert!(run_sweep(&cfg, None).is_err());
    let mut cfg = grid_config();
    cfg.axes[1].name = "rho".into();
    assert!(run_sweep(&cfg, None).is_err());
    let mut cfg = grid_config();
    cfg.axes[0].values = vec![2.5];
    assert!(run_sweep(&cfg, None).is_err());
}

#[test]
fn fading_rate_sweep_tracks_quadrature() {
    let cfg = ExperimentConfig {
        experiment: Experiment::FadingRate {
            channel: ChannelSpec::Fading {
                dist: "rayleigh".into(),
                scale: Some(1.0),
                atoms: None,
                h: None,
                sigma2: 1.0,
                power: 1.0,
                csit: Csit::None,
            },
        },
        axes: vec![Axis { name: "power".into(), values: vec![0.5, 2.0] }],
        trials: 100_000,
        seed: 1,
    };
    let r = run_sweep(&cfg, None).unwrap();
    for c in &r.cells {
        assert!(within_4_sigma(c.estimate.mean, c.estimate.stderr, c.reference.unwrap()), "{c:?}");
    }
}
