use polar_detect::channel::{random_filler_block, transmit, ChannelParams};
use polar_detect::decoders::{bp_decode, fastssc_build_tree, fastssc_decode, sc_decode, scl_decode};
use polar_detect::detection::{metric_fs, metric_ls, metric_re, FastSscDetector};
use polar_detect::seed::{self, Stream};
use polar_detect::sim::{random_message, second_stage};
use polar_detect::PolarCode;
use proptest::prelude::*;

const OPERATING_DB: f64 = 4.29;

fn code() -> PolarCode {
    PolarCode::build(256, 24, 16, 0.5).unwrap()
}

/// Probability that a true block outscores a filler block (ties count half).
fn auc(pos: &[f64], neg: &[f64]) -> f64 {
    let mut all: Vec<(f64, bool)> = pos.iter().map(|&v| (v, true)).chain(neg.iter().map(|&v| (v, false))).collect();
    all.sort_by(|a, b| a.0.total_cmp(&b.0));
    // average ranks over ties
    let mut rank_sum = 0.0;
    let mut i = 0;
    while i < all.len() {
        let mut j = i;
        while j < all.len() && all[j].0 == all[i].0 {
            j += 1;
        }
        let avg = (i + j + 1) as f64 / 2.0;
        rank_sum += avg * all[i..j].iter().filter(|x| x.1).count() as f64;
        i = j;
    }
    let (p, n) = (pos.len() as f64, neg.len() as f64);
    (rank_sum - p * (p + 1.0) / 2.0) / (p * n)
}

#[test]
fn fastssc_metric_separates_codewords_from_fillers() {
    let code = code();
    let tree = fastssc_build_tree(&code);
    let t_max = tree.contributing_leaves(false);
    let params = ChannelParams::new(OPERATING_DB, code.info_rate()).unwrap();
    let mut det = FastSscDetector::new(tree);
    let (mut pos, mut neg) = (vec![Vec::new(); t_max], vec![Vec::new(); t_max]);
    for i in 0..5_000u64 {
        let u = random_message(&code, &mut seed::rng(seed::derive(3, Stream::Message, i)));
        let llrs = transmit(&code.encode(&u).unwrap(), &params, seed::derive(3, Stream::Noise, i));
        for (t, v) in det.trace(&llrs, false, t_max).into_iter().enumerate() {
            pos[t].push(v);
        }
        let filler = random_filler_block(code.len(), &params, seed::derive(3, Stream::Filler, i));
        for (t, v) in det.trace(&filler, false, t_max).into_iter().enumerate() {
            neg[t].push(v);
        }
    }
    let aucs: Vec<f64> = (0..t_max).map(|t| auc(&pos[t], &neg[t])).collect();
    println!("AUC by t: {aucs:.4?}");
    assert!(aucs.iter().all(|&a| a > 0.5));
    // increasing up to Monte-Carlo noise
    for w in aucs.windows(2) {
        assert!(w[1] > w[0] - 0.005, "{aucs:?}");
    }
    assert!(aucs[t_max - 1] > aucs[0] + 0.1);
}

#[test]
fn all_filler_sets_rarely_pass_the_crc() {
    let code = code();
    let params = ChannelParams::new(OPERATING_DB, code.info_rate()).unwrap();
    let (sets, b, list) = (1_500u64, 44usize, 2usize);
    let mut alarms = 0;
    for s in 0..sets {
        let blocks: Vec<Vec<f64>> = (0..b as u64)
            .map(|i| random_filler_block(code.len(), &params, seed::derive2(11, Stream::Filler, s, i)))
            .collect();
        if second_stage(&code, &blocks, list).unwrap().is_some() {
            alarms += 1;
        }
    }
    // at most B * L CRC checks per set, each passing with probability 2^-16
    let bound = 1.0 - (1.0 - 2f64.powi(-16)).powi((b * list) as i32);
    let rate = alarms as f64 / sets as f64;
    println!("false alarms: {alarms}/{sets} = {rate:.2e} (bound {bound:.2e})");
    let expected = bound * sets as f64;
    assert!((alarms as f64) <= expected + 4.0 * expected.sqrt() + 3.0);
}

#[test]
fn noiseless_blocks_decode_after_minimum_effort() {
    let code = code();
    let tree = fastssc_build_tree(&code);
    let params = ChannelParams::noiseless(code.info_rate());
    for i in 0..20u64 {
        let u = random_message(&code, &mut seed::rng(i));
        let x = code.encode(&u).unwrap();
        let llrs = transmit(&x, &params, i);
        assert_eq!(sc_decode(&code, &llrs), u);
        assert_eq!(fastssc_decode(&tree, &llrs), u);
        assert_eq!(scl_decode(&code, &llrs, 2, true).unwrap(), Some(u.clone()));
        let bp = bp_decode(&code, &llrs, 1);
        assert_eq!(bp.x_hat, x);
        assert_eq!(bp.u_hat, u);
    }
}

#[test]
fn metric_ranking_ignores_llr_scale() {
    let code = code();
    let params = ChannelParams::new(2.0, code.info_rate()).unwrap();
    let mut det = FastSscDetector::new(fastssc_build_tree(&code));
    for i in 0..50u64 {
        let u = random_message(&code, &mut seed::rng(i));
        let llrs = transmit(&code.encode(&u).unwrap(), &params, i);
        let scaled: Vec<f64> = llrs.iter().map(|v| v * 4.5).collect();
        let (a, b) = (bp_decode(&code, &llrs, 6).state, bp_decode(&code, &scaled, 6).state);
        assert_eq!(metric_ls(&a).unwrap().value, metric_ls(&b).unwrap().value);
        assert_eq!(metric_fs(&a, &code).unwrap().value, metric_fs(&b, &code).unwrap().value);
        assert_eq!(metric_re(&a, &code).unwrap().value, metric_re(&b, &code).unwrap().value);
        let (ta, tb) = (det.trace(&llrs, true, 19), det.trace(&scaled, true, 19));
        for (x, y) in ta.iter().zip(&tb) {
            assert!((x * 4.5 - y).abs() <= 1e-9 * y.abs().max(1.0));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn bp_metrics_stay_in_range(llrs in prop::collection::vec(-30.0f64..30.0, 256), iters in 2usize..12) {
        let code = code();
        let state = bp_decode(&code, &llrs, iters).state;
        let ls = metric_ls(&state).unwrap().value;
        let fs = metric_fs(&state, &code).unwrap().value;
        let re = metric_re(&state, &code).unwrap().value;
        prop_assert!((0.0..=256.0).contains(&ls));
        prop_assert!((0.0..=code.frozen_set().len() as f64).contains(&fs));
        prop_assert!((0.0..=256.0).contains(&re));
        prop_assert_eq!(ls.fract(), 0.0);
    }

    #[test]
    fn fastssc_trace_is_finite(llrs in prop::collection::vec(-1e6f64..1e6, 256)) {
        let code = code();
        let tree = fastssc_build_tree(&code);
        let mut det = FastSscDetector::new(tree.clone());
        let trace = det.trace(&llrs, true, usize::MAX);
        prop_assert_eq!(trace.len(), tree.contributing_leaves(true));
        prop_assert!(trace.iter().all(|v| v.is_finite()));
    }
}
