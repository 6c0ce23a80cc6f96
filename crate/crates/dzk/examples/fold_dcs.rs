//! Fold-DCS on a sparse polynomial: levels, padding and the distributed mode.

use dzk::algebra::{hypercube_sum, PrimeModulus, SparsePoly};
use dzk::netsim::Network;
use dzk::roundopt::{fold_dcs, fold_dcs_bound, fold_dcs_honest, ShiftDcs};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let m = PrimeModulus::new(10007).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let f = SparsePoly::random(6, 2, 12, m, &mut rng);
    let a = hypercube_sum(&f).unwrap();

    let out = fold_dcs_honest(&f, a, 9, None).unwrap();
    println!("6 variables padded by {}, accept {}", out.pad, out.accept);
    for l in &out.trace.levels {
        println!("  round {} claim {} with {} challenges", l.round, l.claim, l.challenges.len());
    }

    let dist = fold_dcs_honest(&f, a, 9, Some(&Network::cycle(8))).unwrap();
    println!("distributed on C8: accept {} in {} rounds", dist.accept, dist.transcript.unwrap().num_rounds());

    let bad = m.add(a, 5);
    let cheat = fold_dcs(&f, bad, 9, &mut ShiftDcs::new(&f, bad), None).unwrap();
    println!("shifted claim accepted: {} (bound {:.5})", cheat.accept, fold_dcs_bound(&f));
}
