//! Distributed Sumcheck without masking on a random network, next to the
//! centralized verifier.

use std::sync::Arc;

use dzk::algebra::{hypercube_sum, PrimeModulus, SparsePoly};
use dzk::netsim::random_connected;
use dzk::sumcheck::{centralized_sumcheck, distributed_plain_sumcheck, AdaptiveProver, HonestProver, SumcheckInstance};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let m = PrimeModulus::new(10007).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let net = random_connected(6, 0.4, &mut rng);
    let f = SparsePoly::random(4, 2, 8, m, &mut rng);
    let sum = hypercube_sum(&f).unwrap();
    println!("f has {} monomials, true sum {sum}", f.len());

    let inst = SumcheckInstance::new(net, Arc::new(f), sum, 2).unwrap();
    let central = centralized_sumcheck(&inst, &mut HonestProver, 7);
    let tx = distributed_plain_sumcheck(&inst, &mut HonestProver, 7);
    println!("honest: central {} distributed {} in {} rounds", central.accept, tx.all_accept(), tx.num_rounds());

    let mut lie = inst.clone();
    lie.a = m.add(sum, 1);
    let tx = distributed_plain_sumcheck(&lie, &mut AdaptiveProver::new(7), 7);
    println!("false claim with adaptive prover: accept {:?}", tx.accept);
}
