use gldpc::channel::{snr_to_sigma, transmit_awgn, trial_rng, ChannelSpec, SnrConvention};
use gldpc::component::ComponentCode;
use gldpc::concat::{run_concatenated_trial, ConcatenatedSystem, OuterCodeModel};
use gldpc::cycles::girth_of;
use gldpc::decoder::{spc_update, BpDecoder};
use gldpc::density::{de_check_mix, DeEnsemble};
use gldpc::graph::{design_rate, expand_full_parity, gc_count, place_gc_nodes, GldpcCode};
use gldpc::qc::{girth_condition_holds, QcProfile};
use gldpc::TannerGraph;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn small_code(lift: usize, row: &[usize], nu: f64, seed: u64) -> GldpcCode {
    let h = QcProfile::two_row(lift, row).unwrap().expand();
    let g = TannerGraph::from_parity(&h);
    let p = place_gc_nodes(&g, nu, seed).unwrap();
    GldpcCode::new(g, p, ComponentCode::hamming_6_3()).unwrap()
}

fn distinct_row(lift: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    rand::seq::index::sample(rng, lift - 1, 5).into_iter().map(|x| x + 1).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn full_parity_row_count_and_rate_bound(nu in 0.0f64..=1.0, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let row = distinct_row(13, &mut rng);
        let h = QcProfile::two_row(13, &row).unwrap().expand();
        let g = TannerGraph::from_parity(&h);
        let p = place_gc_nodes(&g, nu, seed).unwrap();
        let comp = ComponentCode::hamming_6_3();
        let full = expand_full_parity(&g, &p, &comp).unwrap();
        prop_assert_eq!(full.rows(), p.n_spc() + 3 * p.n_gc());
        prop_assert_eq!(p.n_gc(), gc_count(nu, 26));
        let design = design_rate(2, 6, p.nu_actual(), 3);
        let rank = full.rank();
        let actual = (78 - rank) as f64 / 78.0;
        prop_assert!(actual >= design - 1e-12);
        prop_assert_eq!(rank == full.rows(), (actual - design).abs() < 1e-12);
    }

    #[test]
    fn placement_is_deterministic(nu in 0.0f64..=1.0, seed in any::<u64>()) {
        let h = QcProfile::two_row(13, &[1, 3, 9, 5, 2]).unwrap().expand();
        let g = TannerGraph::from_parity(&h);
        prop_assert_eq!(place_gc_nodes(&g, nu, seed).unwrap(), place_gc_nodes(&g, nu, seed).unwrap());
    }

    #[test]
    fn girth_condition_matches_cycle_search(seed in any::<u64>(), target in prop::sample::select(vec![6usize, 8, 10, 12])) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let lift = [7usize, 11, 13, 17][rng.random_range(0..4)];
        let k = rng.random_range(3..=5);
        let row: Vec<usize> = (1..k).map(|_| rng.random_range(0..lift)).collect();
        let p = QcProfile::two_row(lift, &row).unwrap();
        prop_assert_eq!(girth_of(&p.expand()) >= target, girth_condition_holds(&p, target));
    }

    #[test]
    fn spc_output_sign_is_product_of_signs(x in prop::collection::vec(-20.0f64..20.0, 3..8)) {
        let j = 0;
        let out = spc_update(&x, j);
        let sign: f64 = x[1..].iter().map(|v| v.signum()).product();
        if x[1..].iter().all(|v| *v != 0.0) {
            prop_assert!(out * sign >= 0.0);
            prop_assert!(out.abs() <= x[1..].iter().fold(f64::INFINITY, |m, v| m.min(v.abs())) + 1e-9);
        }
    }

    #[test]
    fn check_mix_monotone_in_x(nu in 0.0f64..=1.0, a in 0.0f64..=1.0, b in 0.0f64..=1.0) {
        let ens = DeEnsemble::new(2, 6, nu, ComponentCode::hamming_6_3()).unwrap();
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(de_check_mix(lo, &ens).unwrap() <= de_check_mix(hi, &ens).unwrap() + 1e-15);
    }
}

#[test]
fn converged_frames_have_zero_syndrome() {
    let code = small_code(83, &[8, 64, 14, 29, 66], 0.75, 2);
    let mut dec = BpDecoder::new(&code);
    let sigma = snr_to_sigma(1.5, SnrConvention::EbN0, code.rate(), 2).unwrap();
    let mut converged = 0;
    for t in 0..200 {
        let mut rng = trial_rng(11, 0, t);
        let llr = transmit_awgn(&vec![0; code.n()], sigma, &mut rng);
        let out = dec.decode(&llr, 20);
        if out.converged {
            converged += 1;
            assert!(code.h_full.mul_vec(&out.hard_bits).unwrap().iter().all(|&b| b == 0));
        }
    }
    assert!(converged > 0);
}

#[test]
fn first_iteration_is_local() {
    let code = small_code(13, &[1, 3, 9, 5, 2], 0.5, 4);
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..20 {
        let llr: Vec<f64> = (0..code.n()).map(|_| rng.random_range(-4.0..4.0)).collect();
        let v = rng.random_range(0..code.n());
        let mut bumped = llr.clone();
        bumped[v] += rng.random_range(-3.0..3.0);
        let mut dec = BpDecoder::new(&code);
        let (_, a) = dec.decode_traced(&llr, 1);
        let (_, b) = dec.decode_traced(&bumped, 1);
        // after one iteration only variables sharing a check with v (or v
        // itself) may change their hard decision
        let mut reach = vec![v];
        for &c in code.graph.var_checks(v) {
            reach.extend_from_slice(code.graph.check_vars(c));
        }
        for i in 0..code.n() {
            if !reach.contains(&i) {
                assert_eq!(a[0][i], b[0][i]);
            }
        }
    }
}

#[test]
fn concatenated_bler_not_above_inner() {
    let code = small_code(83, &[8, 64, 14, 29, 66], 0.75, 0);
    let mut dec = BpDecoder::new(&code);
    let ch = ChannelSpec::awgn(snr_to_sigma(1.0, SnrConvention::EbN0, code.rate(), 2).unwrap()).unwrap();
    let inner = ConcatenatedSystem::new(&code, None, 10);
    let outer = ConcatenatedSystem::new(&code, OuterCodeModel::new(83, 40, 20).ok(), 10);
    let (mut fi, mut fo) = (0, 0);
    for t in 0..300 {
        let a = run_concatenated_trial(&inner, &mut dec, ch, (2, 0, t));
        let b = run_concatenated_trial(&outer, &mut dec, ch, (2, 0, t));
        assert!(!a.success || b.success);
        fi += !a.success as usize;
        fo += !b.success as usize;
    }
    assert!(fo <= fi);
}
