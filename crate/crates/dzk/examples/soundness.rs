//! Acceptance rates of cheating provers with Wilson intervals.

use std::sync::Arc;

use dzk::algebra::{hypercube_sum, PrimeModulus, SparsePoly};
use dzk::analysis::{soundness_rate, to_json};
use dzk::netsim::random_connected;
use dzk::sumcheck::{AdaptiveProver, GarbageProver, SumcheckInstance};
use dzk::zk::{zk_sumcheck, OneBadCopyProver, RcViolatorProver};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let m = PrimeModulus::new(10007).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let net = random_connected(5, 0.4, &mut rng);
    let f = SparsePoly::random(4, 2, 6, m, &mut rng);
    let truth = hypercube_sum(&f).unwrap();
    let gap = 17;
    let t = 2;
    let lie = SumcheckInstance::new(net.clone(), Arc::new(f.clone()), m.add(truth, gap), t).unwrap();
    let bound = 8.0 / 10007.0 + 1.0 / t as f64;
    let trials = 2000;

    let r = soundness_rate(trials, 1, bound, 0.02, |s| zk_sumcheck(&lie, &mut AdaptiveProver::new(s), s).all_accept());
    println!("adaptive: {}", to_json(&r));
    let r = soundness_rate(trials, 2, bound, 0.02, |s| zk_sumcheck(&lie, &mut GarbageProver::new(s), s).all_accept());
    println!("garbage: rate {:.4}", r.rate);
    let r = soundness_rate(trials, 3, 0.25, 0.02, |s| {
        zk_sumcheck(&lie, &mut OneBadCopyProver { modulus: m, gap, bad_copy: 0 }, s).all_accept()
    });
    println!("one bad copy: rate {:.4} (1/t^2 = 0.25)", r.rate);

    let honest_claim = SumcheckInstance::new(net, Arc::new(f), truth, t).unwrap();
    let r = soundness_rate(trials, 4, 0.75, 0.02, |s| {
        zk_sumcheck(&honest_claim, &mut RcViolatorProver { modulus: m, node: 2, bad_copy: 1 }, s).all_accept()
    });
    println!("broken mask relation: rate {:.4}", r.rate);
}
