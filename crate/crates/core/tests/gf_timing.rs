//! Kept in its own binary so no other test competes for the CPU.
//!
//! Batches at `l` and `2l` alternate, so background load lands on both
//! sides of each ratio alike.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use std::hint::black_box;
use std::time::Instant;
use wiretap_core::gf::{select_modulus, BitString, FieldContext, MulBackend};
use wiretap_core::uhf::{SsUhf, WiretapParams};

const INPUTS: usize = 64;
const BATCHES: usize = 201;
/// Batches this short are rarely preempted, so the median sees clean runs.
const BATCH_NS: f64 = 50_000.0;

/// Mean nanoseconds per call of `op` over `reps` calls cycling through `inputs`.
fn batch_ns(inputs: &[BitString], reps: usize, op: &impl Fn(&BitString, &BitString)) -> f64 {
    let start = Instant::now();
    for i in 0..reps {
        let j = i % (inputs.len() - 1);
        op(black_box(&inputs[j]), black_box(&inputs[j + 1]));
    }
    start.elapsed().as_nanos() as f64 / reps as f64
}

/// Calls per batch so one batch takes about `BATCH_NS`.
fn calibrate(inputs: &[BitString], op: &impl Fn(&BitString, &BitString)) -> usize {
    let per_call = (0..5).map(|_| batch_ns(inputs, 16, op)).fold(f64::INFINITY, f64::min);
    ((BATCH_NS / per_call) as usize).max(1)
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    v[v.len() / 2]
}

/// Median time at `2l` over median time at `l`, from interleaved batches.
fn doubling_ratio(l: usize, op_l: impl Fn(&BitString, &BitString), op_2l: impl Fn(&BitString, &BitString)) -> f64 {
    let mut rng = ChaCha20Rng::seed_from_u64(l as u64);
    let xs: Vec<BitString> = (0..INPUTS).map(|_| BitString::random(l, &mut rng)).collect();
    let ys: Vec<BitString> = (0..INPUTS).map(|_| BitString::random(2 * l, &mut rng)).collect();
    let (reps_l, reps_2l) = (calibrate(&xs, &op_l), calibrate(&ys, &op_2l));
    let (mut a, mut b) = (Vec::new(), Vec::new());
    for _ in 0..BATCHES {
        a.push(batch_ns(&xs, reps_l, &op_l));
        b.push(batch_ns(&ys, reps_2l, &op_2l));
    }
    median(b) / median(a)
}

/// Best of three readings; scheduler noise only ever inflates a sample.
fn best_of_three(mut reading: impl FnMut() -> f64) -> f64 {
    (0..3).map(|_| reading()).fold(f64::INFINITY, f64::min)
}

fn backends() -> Vec<MulBackend> {
    let mut b = vec![MulBackend::Schoolbook];
    if MulBackend::hardware_available() {
        b.push(MulBackend::Hardware);
    }
    b
}

#[test]
fn doubling_degree_costs_at_most_five_times() {
    for backend in backends() {
        for l in [256, 512, 1024, 2048] {
            let f = FieldContext::with_backend(select_modulus(l), backend).unwrap();
            let g = FieldContext::with_backend(select_modulus(2 * l), backend).unwrap();
            let ratio = best_of_three(|| {
                doubling_ratio(
                    l,
                    |a, b| {
                        black_box(f.mul_bits(a, b).unwrap());
                    },
                    |a, b| {
                        black_box(g.mul_bits(a, b).unwrap());
                    },
                )
            });
            println!("mul {backend:?} l={l}: ratio {ratio:.2}");
            assert!(ratio <= 5.0, "{backend:?}: mul at {} is {ratio:.2}x mul at {l}", 2 * l);
        }
    }
}

#[test]
fn hash_forward_doubling_costs_at_most_five_times() {
    for backend in backends() {
        for l in [256, 512, 1024, 2048] {
            let family = |l: usize| {
                let field = FieldContext::with_backend(select_modulus(l), backend).unwrap();
                SsUhf::with_field(WiretapParams::new(l, l / 2, l).unwrap(), field).unwrap()
            };
            let (h, h2) = (family(l), family(2 * l));
            let mut rng = ChaCha20Rng::seed_from_u64(7);
            let (s, s2) = (h.sample_seed(&mut rng), h2.sample_seed(&mut rng));
            let ratio = best_of_three(|| {
                doubling_ratio(
                    l,
                    |m, _| {
                        black_box(h.hash_forward(&s, m).unwrap());
                    },
                    |m, _| {
                        black_box(h2.hash_forward(&s2, m).unwrap());
                    },
                )
            });
            println!("hash_forward {backend:?} l={l}: ratio {ratio:.2}");
            assert!(ratio <= 5.0, "{backend:?}: hash at {} is {ratio:.2}x hash at {l}", 2 * l);
        }
    }
}
