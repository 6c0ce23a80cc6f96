//! Round-compressed non-colorability on bounded-degree graphs and how the
//! round count grows with n.

use dzk::netsim::Network;
use dzk::roundopt::{band_graph, constdeg_noncolor, constdeg_noncolor_with, ConstdegPlan};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    for (name, g) in [("C5", Network::cycle(5)), ("C6", Network::cycle(6))] {
        let out = constdeg_noncolor(&g, 2, 1).unwrap();
        println!("{name}, k = 2: accept {} in {} rounds", out.all_accept(), out.rounds);
    }
    let masked = constdeg_noncolor_with(&Network::cycle(7), 2, 1, true).unwrap();
    println!("C7 masked: accept {} in {} rounds", masked.all_accept(), masked.rounds);

    let mut rng = ChaCha8Rng::seed_from_u64(6);
    println!("n  ell  t  rounds  n/log2 n");
    for n in [16, 32, 64] {
        let net = band_graph(n, 4, 4, n / 4, &mut rng);
        let out = constdeg_noncolor(&net, 2, n as u64).unwrap();
        let plan = ConstdegPlan::new(n, 2);
        println!("{n:<3}{:<5}{:<3}{:<8}{:.1}", plan.ell, plan.t, out.rounds, n as f64 / (n as f64).log2());
    }
}
