use proptest::prelude::*;
use wiretap_core::channel::ChannelModel;
use wiretap_core::leakage::{
    alpha_mutual_information, renyi_ordering_check, restricted_alpha_information, restricted_max_information,
    semantic_leakage_exact, ChannelTable, ExactInstance, InstanceSpec, JointTable, TypicalSetMask,
};
use wiretap_core::numeric::binary_entropy;
use wiretap_core::uhf::pseudo_message_distribution;

fn bsc_word(x: u32, z: u32, n: u32, p: f64) -> f64 {
    let d = (x ^ z).count_ones() as i32;
    p.powi(d) * (1.0 - p).powi(n as i32 - d)
}

/// Uniform input over `{000, 111}` through BSC(0.1)^3.
fn repetition_table() -> JointTable {
    let p: Vec<f64> = [0b000u32, 0b111]
        .iter()
        .flat_map(|&x| (0..8u32).map(move |z| 0.5 * bsc_word(x, z, 3, 0.1)))
        .collect();
    JointTable::new(2, 8, p).unwrap()
}

#[test]
fn max_information_of_repetition_codebook() {
    let t = repetition_table();
    // Oracle: sum over outputs of the larger codeword likelihood.
    let sum: f64 = (0..8u32).map(|z| bsc_word(0, z, 3, 0.1).max(bsc_word(7, z, 3, 0.1))).sum();
    assert!((sum - 1.944).abs() < 1e-12);
    let iinf = alpha_mutual_information(&t, f64::INFINITY).unwrap();
    assert!((iinf - sum.log2()).abs() < 1e-12);
    assert!((iinf - 0.9590).abs() < 5e-5);
    let full = TypicalSetMask::full(&t);
    assert_eq!(restricted_max_information(&t, &full).unwrap(), iinf);
}

#[test]
fn distance_three_mask_recomputed_by_enumeration() {
    let t = repetition_table();
    let codeword = [0b000u32, 0b111];
    let mask = TypicalSetMask::from_predicate(&t, |r, z| (codeword[r] ^ z as u32).count_ones() < 3);
    assert!((mask.epsilon - 1e-3).abs() < 1e-15);
    let oracle: f64 = (0..8u32)
        .map(|z| {
            codeword
                .iter()
                .map(|&x| if (x ^ z).count_ones() < 3 { bsc_word(x, z, 3, 0.1) } else { 0.0 })
                .fold(0.0, f64::max)
        })
        .sum::<f64>()
        .log2();
    assert!((restricted_max_information(&t, &mask).unwrap() - oracle).abs() < 1e-12);
}

#[test]
fn zero_cell_removal_changes_nothing() {
    let p = vec![0.5, 0.0, 0.25, 0.25];
    let t = JointTable::new(2, 2, p).unwrap();
    let mask = TypicalSetMask::from_predicate(&t, |r, c| !(r == 0 && c == 1));
    assert_eq!(mask.epsilon, 0.0);
    for a in [1.0, 2.0, f64::INFINITY] {
        let full = alpha_mutual_information(&t, a).unwrap();
        assert!((restricted_alpha_information(&t, &mask, a).unwrap() - full).abs() < 1e-15);
    }
}

#[test]
fn ordering_on_repetition_instance() {
    let t = repetition_table();
    let grid = [1.0, 2.0, 4.0, f64::INFINITY];
    let r = renyi_ordering_check(&t, &TypicalSetMask::full(&t), &grid, 1e-9).unwrap();
    assert!(r.pass, "{:?}", r.values);
    assert!(r.values.windows(2).all(|w| w[0] < w[1]));
    let ind = JointTable::new(2, 2, vec![0.25; 4]).unwrap();
    let r = renyi_ordering_check(&ind, &TypicalSetMask::full(&ind), &grid, 0.0).unwrap();
    assert!(r.values.iter().all(|v| v.abs() < 1e-15));
}

#[test]
fn effective_bsc_capacity() {
    let ch = ChannelTable::new(2, 2, vec![0.8, 0.2, 0.2, 0.8]).unwrap();
    let r = semantic_leakage_exact(&ch).unwrap();
    assert!((r.capacity - (1.0 - binary_entropy(0.2))).abs() < 1e-8);
    assert!((r.capacity - 0.2781).abs() < 1e-4);
    let noiseless = ChannelTable::new(4, 4, (0..16).map(|i| if i % 5 == 0 { 1.0 } else { 0.0 }).collect()).unwrap();
    let r = semantic_leakage_exact(&noiseless).unwrap();
    assert!((r.capacity - 2.0).abs() < 1e-9);
    assert!(r.input.iter().all(|p| (p - 0.25).abs() < 1e-9));
}

fn instance(k: usize, code: &str, p: f64) -> ExactInstance {
    ExactInstance::new(InstanceSpec { k, code: code.parse().unwrap(), eve: ChannelModel::bsc(p).unwrap() }).unwrap()
}

#[test]
fn pseudo_message_marginal_matches_hash_layer() {
    let e = instance(2, "identity:4", 0.1);
    for law in [vec![0.25; 4], vec![0.7, 0.1, 0.1, 0.1], vec![1.0, 0.0, 0.0, 0.0]] {
        let joint = e.joint_law(&law).unwrap();
        let from_joint = joint.marginal1(joint.axis("m_prime").unwrap()).unwrap();
        let from_hash = pseudo_message_distribution(e.params(), &law).unwrap();
        for (a, b) in from_joint.iter().zip(&from_hash) {
            assert!((a - b).abs() < 1e-14);
            assert!((a - 1.0 / 16.0).abs() < 1e-14);
        }
        for (a, b) in e.pseudo_message_marginal(&law).iter().zip(&from_joint) {
            assert!((a - b).abs() < 1e-15);
        }
    }
}

#[test]
fn joint_law_marginal_is_the_pseudo_joint() {
    let e = instance(1, "repetition:2:2", 0.2);
    let law = e.joint_law(&[0.5, 0.5]).unwrap();
    let t = law.marginal(&[2], &[3]).unwrap();
    let direct = e.pseudo_joint();
    for r in 0..t.rows() {
        for c in 0..t.cols() {
            assert!((t.get(r, c) - direct.get(r, c)).abs() < 1e-15);
        }
    }
}

#[test]
fn message_channel_matches_joint_law() {
    let e = instance(1, "identity:3", 0.1);
    let law = e.joint_law(&[0.5, 0.5]).unwrap();
    let msz = law.marginal(&[0], &[1, 3]).unwrap().conditional();
    let ch = e.message_channel();
    for r in 0..2 {
        for (a, b) in msz.row(r).iter().zip(ch.row(r)) {
            assert!((a - b).abs() < 1e-15);
        }
    }
}

#[test]
fn bounds_hold_on_small_instances() {
    let alphas = [1.0, 1.5, 2.0, 4.0, 16.0, f64::INFINITY];
    for (k, code) in [(1, "identity:2"), (1, "identity:3"), (2, "identity:3")] {
        for p in [0.05, 0.2] {
            let e = instance(k, code, p);
            let masks = e.standard_masks(&e.pseudo_joint());
            let report = e.evaluate(&masks, &alphas).unwrap();
            assert!(report.pass, "{report:?}");
            assert!(report.masks.iter().any(|m| m.epsilon > 0.0));
        }
    }
}

#[test]
fn recycled_leakage_at_most_twice_single() {
    for p in [0.05, 0.2] {
        let e = instance(1, "identity:3", p);
        let single = semantic_leakage_exact(&e.message_channel()).unwrap();
        let pair = semantic_leakage_exact(&e.recycled_channel(2).unwrap()).unwrap();
        assert!(pair.upper <= 2.0 * single.upper + 1e-9, "{} vs {}", pair.upper, single.upper);
        // A second use cannot reveal less than the first.
        assert!(pair.capacity + 1e-9 >= single.capacity);
        let one = e.recycled_channel(1).unwrap();
        let direct = e.message_channel();
        for r in 0..2 {
            assert!(one.row(r).iter().zip(direct.row(r)).all(|(a, b)| (a - b).abs() < 1e-15));
        }
    }
}

#[test]
fn state_explosion_is_refused() {
    let e = instance(1, "identity:6", 0.1);
    assert!(e.recycled_channel(3).is_err());
}

fn arb_joint() -> impl Strategy<Value = (usize, usize, Vec<f64>)> {
    (1usize..4, 1usize..6).prop_flat_map(|(rb, cols)| {
        let rows = 1 << rb;
        (Just(rows), Just(cols), prop::collection::vec(prop::collection::vec(0.001f64..1.0, cols), rows))
            .prop_map(|(rows, cols, w)| {
                let mut p = Vec::new();
                for row in w {
                    let s: f64 = row.iter().sum();
                    p.extend(row.iter().map(|x| x / s / rows as f64));
                }
                (rows, cols, p)
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn max_information_monotone_in_mask((rows, cols, p) in arb_joint(), seed_a in any::<u64>(), seed_b in any::<u64>()) {
        let t = JointTable::new(rows, cols, p).unwrap();
        let small = TypicalSetMask::from_predicate(&t, |r, c| (seed_a >> ((r * cols + c) % 64)) & 1 == 1);
        let extra = TypicalSetMask::from_predicate(&t, |r, c| (seed_b >> ((r * cols + c) % 64)) & 1 == 1);
        let big = small.union(&extra);
        let mut big = big;
        big.epsilon = TypicalSetMask::from_predicate(&t, |r, c| big.keeps(r, c)).epsilon;
        prop_assert!(small.is_subset_of(&big));
        let a = restricted_max_information(&t, &small).unwrap();
        let b = restricted_max_information(&t, &big).unwrap();
        prop_assert!(a <= b + 1e-12);
    }

    #[test]
    fn alpha_information_monotone_in_order((rows, cols, p) in arb_joint(), budget in 0.0f64..0.5) {
        let t = JointTable::new(rows, cols, p).unwrap();
        let grid = [1.0, 1.25, 1.5, 2.0, 3.0, 4.0, 8.0, 16.0, 64.0, f64::INFINITY];
        for mask in [TypicalSetMask::full(&t), TypicalSetMask::trim_smallest(&t, budget)] {
            let r = renyi_ordering_check(&t, &mask, &grid, 1e-9).unwrap();
            prop_assert!(r.pass, "{:?}", r.values);
        }
        let i1 = alpha_mutual_information(&t, 1.0).unwrap();
        prop_assert!(i1 >= -1e-12 && i1 <= (rows as f64).log2() + 1e-12);
    }
}
