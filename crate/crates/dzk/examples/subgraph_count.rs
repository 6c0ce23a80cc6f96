//! Counting pattern copies: the cube sum of the pattern polynomial is
//! |Aut(H)| times the count, and the protocol checks a claimed count.

use dzk::algebra::hypercube_sum;
use dzk::netsim::random_graph;
use dzk::subgraph::{build_pattern_poly, count_copies, default_field, subgraph_protocol, PatternGraph};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let net = loop {
        let g = random_graph(8, 0.5, &mut rng);
        if g.is_connected() {
            break g;
        }
    };
    let patterns = [
        ("triangle", PatternGraph::clique(3)),
        ("path on 3 nodes", PatternGraph::new(3, &[(0, 1), (1, 2)], false).unwrap()),
        ("induced path on 3 nodes", PatternGraph::new(3, &[(0, 1), (1, 2)], true).unwrap()),
    ];
    for (name, h) in patterns {
        let count = count_copies(&net, &h);
        let m = default_field(net.n(), h.k()).unwrap();
        let sum = hypercube_sum(&build_pattern_poly(&net, &h, m)).unwrap();
        let honest = subgraph_protocol(&net, &h, count, 2, 1).unwrap().all_accept();
        let wrong = subgraph_protocol(&net, &h, count + 1, 2, 1).unwrap().all_accept();
        println!("{name}: {count} copies, aut {}, cube sum {sum}; claim {count} -> {honest}, claim {} -> {wrong}", h.aut(), count + 1);
    }
}
