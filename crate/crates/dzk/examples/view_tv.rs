//! Real versus simulated views, slot by slot.
//!
//! `cargo run --release --example view_tv -- [runs]`

use std::sync::Arc;

use dzk::algebra::{hypercube_sum, PrimeModulus, SparsePoly};
use dzk::analysis::{to_csv, tv_noise, view_slot_tv, SlotRow};
use dzk::netsim::{extract_views, random_connected};
use dzk::seeds::derive_seed;
use dzk::sumcheck::{HonestProver, QueryMode, SumcheckInstance};
use dzk::zk::{simulate_views, zk_sumcheck};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

fn main() {
    let runs: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(2000);
    let m = PrimeModulus::new(101).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let net = random_connected(6, 0.4, &mut rng);
    let f = SparsePoly::random(3, 2, 5, m, &mut rng);
    let a = hypercube_sum(&f).unwrap();
    let inst = SumcheckInstance::new(net, Arc::new(f), a, 2).unwrap();

    let real: Vec<_> = (0..runs).into_par_iter().map(|i| extract_views(&zk_sumcheck(&inst, &mut HonestProver, derive_seed(1, i)))).collect();
    let sim: Vec<_> = (0..runs).into_par_iter().map(|i| simulate_views(&inst, derive_seed(2, i), QueryMode::Honest)).collect();
    let slots = view_slot_tv(&real, &sim, 101).unwrap();
    let max = slots.iter().map(|s| s.report.tv).fold(0.0, f64::max);
    println!("{} slots, max TV {max:.4}, noise level {:.4}", slots.len(), tv_noise(101, runs as usize, runs as usize));

    let rows: Vec<SlotRow> = slots.iter().take(5).map(SlotRow::from).collect();
    print!("{}", to_csv(&rows).unwrap());
}
