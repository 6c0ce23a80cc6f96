//! Zero-knowledge distributed Sumcheck: an honest run, the round schedule and
//! what a single node gets to see.

use std::sync::Arc;

use dzk::algebra::{hypercube_sum, PrimeModulus, SparsePoly};
use dzk::analysis::complexity_audit;
use dzk::netsim::{extract_view, random_connected};
use dzk::sumcheck::{HonestProver, SumcheckInstance};
use dzk::zk::{zk_schedule_rounds, zk_sumcheck};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let m = PrimeModulus::new(10007).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let net = random_connected(7, 0.3, &mut rng);
    let f = SparsePoly::random(5, 2, 10, m, &mut rng);
    let a = hypercube_sum(&f).unwrap();
    let inst = SumcheckInstance::new(net, Arc::new(f), a, 3).unwrap();

    let tx = zk_sumcheck(&inst, &mut HonestProver, 11);
    let audit = complexity_audit(&tx, Some(zk_schedule_rounds(5, 0)), None);
    println!("all accept: {}", tx.all_accept());
    println!("rounds {} (schedule {}), largest prover message {} bits", audit.rounds, zk_schedule_rounds(5, 0), audit.max_prover_bits);
    println!("kept copies per stage: {:?}", tx.challenges.kept);

    let view = extract_view(&tx, 3);
    println!("node 3 received {} field elements over {} rounds", view.len(), view.rounds.len());
}
