use std::sync::Arc;

use dzk::algebra::{hypercube_sum, PrimeModulus, SparsePoly};
use dzk::analysis::{
    complexity_audit, estimate_tv, soundness_rate, to_csv, to_json, tv_noise, tv_to_uniform, wilson, SlotRow,
    SlotTv,
};
use dzk::netsim::{random_connected, Transcript};
use dzk::sumcheck::{distributed_plain_sumcheck, HonestProver, PlainSumcheck, SumcheckInstance};
use dzk::zk::{zk_schedule_rounds, zk_sumcheck};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn instance(q: u64, nv: usize, seed: u64) -> SumcheckInstance {
    let m = PrimeModulus::new(q).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let net = random_connected(6, 0.4, &mut rng);
    let f = SparsePoly::random(nv, 2, 5, m, &mut rng);
    let a = hypercube_sum(&f).unwrap();
    SumcheckInstance::new(net, Arc::new(f), a, 2).unwrap()
}

#[test]
fn tv_extremes() {
    let a: Vec<u64> = (0..100).map(|i| i % 7).collect();
    assert_eq!(estimate_tv(&a, &a, 7).unwrap().tv, 0.0);
    let b: Vec<u64> = (0..50).map(|i| 10 + i % 3).collect();
    assert!((estimate_tv(&a, &b, 101).unwrap().tv - 1.0).abs() < 1e-12);
    assert!(estimate_tv(&[], &a, 7).is_err());
}

#[test]
fn uniform_sample_is_close_to_uniform() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let a: Vec<u64> = (0..10_000).map(|_| rng.gen_range(0..101)).collect();
    let r = tv_to_uniform(&a, 101).unwrap();
    assert!(r.tv <= 0.1, "{}", r.tv);
    // the estimate sits at the predicted noise level
    assert!(r.tv < 2.0 * r.noise && r.tv > 0.5 * r.noise);
}

#[test]
fn tv_matches_hand_computation() {
    // p = (1/2, 1/2, 0), q = (1/4, 1/4, 1/2)
    let a = [0, 1];
    let b = [0, 1, 2, 2];
    assert!((estimate_tv(&a, &b, 3).unwrap().tv - 0.5).abs() < 1e-12);
}

#[test]
fn tv_is_a_metric() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..50 {
        let draw = |rng: &mut ChaCha8Rng| -> Vec<u64> {
            let len = rng.gen_range(1..40);
            let top = rng.gen_range(1..6);
            (0..len).map(|_| rng.gen_range(0..top)).collect()
        };
        let (x, y, z) = (draw(&mut rng), draw(&mut rng), draw(&mut rng));
        let tv = |a: &[u64], b: &[u64]| estimate_tv(a, b, 7).unwrap().tv;
        assert!((tv(&x, &y) - tv(&y, &x)).abs() < 1e-12);
        assert!(tv(&x, &z) <= tv(&x, &y) + tv(&y, &z) + 1e-12);
    }
}

#[test]
fn noise_model_scaling() {
    let base = tv_noise(101, 20_000, 20_000);
    assert!((base - 0.0401).abs() < 1e-3);
    assert!((tv_noise(101, 80_000, 80_000) - base / 2.0).abs() < 1e-12);
}

#[test]
fn wilson_interval_contains_rate() {
    let (lo, hi) = wilson(0, 100);
    assert_eq!(lo, 0.0);
    assert!(hi > 0.03 && hi < 0.04);
    let (lo, hi) = wilson(50, 100);
    assert!(lo < 0.5 && hi > 0.5);
    assert!((0.5 - lo - (hi - 0.5)).abs() < 1e-12);
    assert_eq!(wilson(0, 0), (0.0, 1.0));
}

#[test]
fn soundness_rate_is_reproducible() {
    let trial = |s: u64| s.is_multiple_of(4);
    let a = soundness_rate(2000, 7, 0.3, 0.0, trial);
    let b = soundness_rate(2000, 7, 0.3, 0.0, trial);
    assert_eq!(a, b);
    assert!(a.rate > 0.2 && a.rate < 0.3);
    assert!(a.lo <= a.rate && a.rate <= a.hi);
}

#[test]
fn empty_protocol_costs_nothing() {
    let t = Transcript::new(PrimeModulus::new(101).unwrap(), 3);
    let r = complexity_audit(&t, Some(0), Some(0));
    assert_eq!(r.rounds, 0);
    assert_eq!(r.max_prover_bits, 0);
    assert!(r.pass);
}

#[test]
fn audit_counts_schedule() {
    let inst = instance(10007, 4, 1);
    let t = zk_sumcheck(&inst, &mut HonestProver, 3);
    let r = complexity_audit(&t, Some(zk_schedule_rounds(4, 0)), None);
    assert_eq!(r.rounds, 4 * 4 + 5);
    assert!(r.pass);
    let t = distributed_plain_sumcheck(&inst, &mut HonestProver, 3);
    let r = complexity_audit(&t, None, None);
    assert_eq!(r.rounds, PlainSumcheck::schedule_rounds(4, 0));
    assert!(!complexity_audit(&t, Some(r.rounds - 1), None).pass);
}

#[test]
fn bits_grow_with_field_size() {
    let small = complexity_audit(&distributed_plain_sumcheck(&instance(251, 3, 2), &mut HonestProver, 1), None, None);
    let big = complexity_audit(&distributed_plain_sumcheck(&instance(65_521, 3, 2), &mut HonestProver, 1), None, None);
    assert_eq!(big.max_prover_bits, 2 * small.max_prover_bits);
}

#[test]
fn reports_export() {
    let r = estimate_tv(&[1, 2, 3], &[1, 2, 2], 5).unwrap();
    let json: serde_json::Value = serde_json::from_str(&to_json(&r)).unwrap();
    assert_eq!(json["q"], 5);
    assert!(json["tv"].is_f64());
    let rows = [SlotRow::from(&SlotTv { node: 0, slot: 2, report: r })];
    let csv = to_csv(&rows).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "node,slot,q,samples,tv,noise,threshold,pass");
    assert!(lines.next().unwrap().starts_with("0,2,5,3,"));
}
