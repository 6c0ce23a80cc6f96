//! Proving that a graph has no proper k-coloring.
//!
//! `cargo run --example noncolor -- [k]`

use dzk::coloring::{count_colorings, noncolor_protocol};
use dzk::netsim::Network;

fn main() {
    let k: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(3);
    let graphs = [("K4", Network::complete(4)), ("K3", Network::complete(3)), ("C5", Network::cycle(5))];
    for (name, g) in graphs {
        let colorings = count_colorings(&g, k).unwrap();
        let out = noncolor_protocol(&g, k, 2, 5).unwrap();
        println!("{name}: {colorings} proper {k}-colorings, q = {}, verdicts {:?}", out.q, out.accept);
    }
}
