use dzk::algebra::{hypercube_sum, id_bits, interpolate, mle_eval, Oracle, PrimeModulus};
use dzk::netsim::{build_tree, random_connected, random_graph, Network};
use dzk::subgraph::*;
use dzk::sumcheck::ConstantShiftProver;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn brute_injective(net: &Network, h: &PatternGraph) -> u64 {
    // independent of the library: plain nested enumeration over k-tuples
    let n = net.n();
    let k = h.k();
    let mut total = 0;
    let mut idx = vec![0usize; k];
    loop {
        let distinct = (0..k).all(|i| (i + 1..k).all(|j| idx[i] != idx[j]));
        if distinct {
            let ok = (0..k).all(|i| {
                (i + 1..k).all(|j| {
                    let e = h.edges().contains(&(i, j));
                    let g = net.has_edge(idx[i], idx[j]);
                    if h.induced() {
                        e == g
                    } else {
                        !e || g
                    }
                })
            });
            total += ok as u64;
        }
        let mut p = 0;
        loop {
            if p == k {
                return total;
            }
            idx[p] += 1;
            if idx[p] < n {
                break;
            }
            idx[p] = 0;
            p += 1;
        }
    }
}

#[test]
fn automorphism_counts() {
    assert_eq!(PatternGraph::clique(3).aut(), 6);
    assert_eq!(count_aut(&PatternGraph::new(3, &[(0, 1), (1, 2)], false).unwrap()), 2);
    assert_eq!(count_aut(&PatternGraph::new(4, &[(0, 1), (1, 2), (2, 3), (0, 3)], false).unwrap()), 8);
    assert_eq!(PatternGraph::new(4, &[], false).unwrap().aut(), 24);
    assert!(PatternGraph::new(9, &[], false).is_err());
}

#[test]
fn pattern_file_roundtrip() {
    let h = PatternGraph::parse("3 2\ninduced 1\n0 1\n1 2\n").unwrap();
    assert!(h.induced());
    assert_eq!(h.aut(), 2);
    assert_eq!(PatternGraph::parse(&h.to_text()).unwrap(), h);
    assert!(PatternGraph::parse("3 1\n0 1\n").is_err());
    assert!(PatternGraph::parse("3 1\ninduced 2\n0 1\n").is_err());
}

#[test]
fn cube_sum_is_aut_times_count() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let patterns = vec![
        PatternGraph::new(2, &[(0, 1)], false).unwrap(),
        PatternGraph::new(2, &[], true).unwrap(),
        PatternGraph::clique(3),
        PatternGraph::new(3, &[(0, 1), (1, 2)], false).unwrap(),
        PatternGraph::new(3, &[(0, 1), (1, 2)], true).unwrap(),
        PatternGraph::new(3, &[(0, 1)], true).unwrap(),
        PatternGraph::new(3, &[], true).unwrap(),
    ];
    for trial in 0..12 {
        let n = 3 + trial % 6;
        let g = random_graph(n, 0.5, &mut rng);
        for h in &patterns {
            let m = default_field(n, h.k()).unwrap();
            let f = build_pattern_poly(&g, h, m);
            let inj = brute_injective(&g, h);
            assert_eq!(hypercube_sum(&f).unwrap(), inj % m.q(), "n={n} {h:?}");
            assert_eq!(count_copies(&g, h) * h.aut(), inj);
        }
    }
}

#[test]
fn triangle_references() {
    let m = PrimeModulus::new(10007).unwrap();
    let k3 = PatternGraph::clique(3);
    assert_eq!(hypercube_sum(&build_pattern_poly(&Network::complete(3), &k3, m)).unwrap(), 6);
    assert_eq!(hypercube_sum(&build_pattern_poly(&Network::complete(4), &k3, m)).unwrap() / 6, 4);
    assert_eq!(count_copies(&Network::complete(4), &k3), 4);
}

#[test]
fn mle_aggregation() {
    let m = PrimeModulus::new(10007).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let g = random_connected(7, 0.4, &mut rng);
    let tree = build_tree(&g).unwrap();
    let table = adjacency_table(&g);
    let b = id_bits(7);
    for (u, v) in [(0usize, 1usize), (2, 5), (3, 3)] {
        let x: Vec<u64> = (0..b).map(|j| ((u >> (b - 1 - j)) & 1) as u64).collect();
        let y: Vec<u64> = (0..b).map(|j| ((v >> (b - 1 - j)) & 1) as u64).collect();
        let (root, _, ok) = eval_mle_distributed(m, &g, &tree, &x, &y, &mut |_, _| {});
        assert_eq!(root, g.has_edge(u, v) as u64);
        assert!(ok.iter().all(|&o| o));
    }
    for _ in 0..20 {
        let x: Vec<u64> = (0..b).map(|_| m.random(&mut rng)).collect();
        let y: Vec<u64> = (0..b).map(|_| m.random(&mut rng)).collect();
        let (root, _, _) = eval_mle_distributed(m, &g, &tree, &x, &y, &mut |_, _| {});
        let mut pt = x.clone();
        pt.extend(&y);
        assert_eq!(root, mle_eval(m, &table, &pt).unwrap());
        let (_, _, ok) = eval_mle_distributed(m, &g, &tree, &x, &y, &mut |v, s| {
            if v == 4 {
                *s = m.add(*s, 3)
            }
        });
        assert!(!ok.iter().all(|&o| o));
    }
    let empty = Network::new(4, &[]).unwrap();
    let t4 = dzk::netsim::SpanningTree::from_parents(&Network::complete(4), vec![0, 0, 0, 0]).unwrap();
    let (root, parts, _) = eval_mle_distributed(m, &empty, &t4, &[5, 6], &[7, 8], &mut |_, _| {});
    assert_eq!(root, 0);
    assert!(parts.iter().all(|&p| p == 0));
}

#[test]
fn adjacency_extension_is_multilinear() {
    let m = PrimeModulus::new(10007).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let g = random_connected(8, 0.4, &mut rng);
    let table = adjacency_table(&g);
    for _ in 0..100 {
        let p: Vec<u64> = (0..table.arity()).map(|_| m.random(&mut rng)).collect();
        let j = rng.gen_range(0..p.len());
        let at = |v: u64| {
            let mut q = p.clone();
            q[j] = v;
            mle_eval(m, &table, &q).unwrap()
        };
        // second finite difference vanishes along a line
        let (a, b, c) = (at(0), at(1), at(2));
        assert_eq!(m.add(a, c), m.mul(2, b));
    }
}

#[test]
fn clique_pattern_degree_is_k_minus_1() {
    let m = PrimeModulus::new(10007).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let g = random_connected(6, 0.6, &mut rng);
    let f = build_pattern_poly(&g, &PatternGraph::clique(3), m);
    assert_eq!(f.degree(), 2);
    for _ in 0..20 {
        let p: Vec<u64> = (0..f.num_vars()).map(|_| m.random(&mut rng)).collect();
        let j = rng.gen_range(0..p.len());
        let xs: Vec<u64> = (0..5).collect();
        let ys: Vec<u64> = xs
            .iter()
            .map(|&v| {
                let mut q = p.clone();
                q[j] = v;
                f.eval(&q)
            })
            .collect();
        let poly = interpolate(m, &xs, &ys).unwrap();
        assert!(poly.degree().is_none_or(|d| d <= 2));
    }
}

#[test]
fn protocol_verdicts() {
    let k4 = Network::complete(4);
    let k3 = PatternGraph::clique(3);
    for seed in 0..3 {
        assert!(subgraph_protocol(&k4, &k3, 4, 2, seed).unwrap().all_accept());
        assert!(!subgraph_protocol(&k4, &k3, 5, 2, seed).unwrap().all_accept());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let g = random_connected(6, 0.5, &mut rng);
    let k2 = PatternGraph::new(2, &[(0, 1)], false).unwrap();
    let out = subgraph_protocol(&g, &k2, g.edges().len() as u64, 2, 9).unwrap();
    assert!(out.all_accept());
    let mut cheat = ConstantShiftProver { delta: 1 };
    let out = subgraph_with(&g, &k2, g.edges().len() as u64, 2, 9, None, &mut cheat).unwrap();
    assert!(!out.all_accept());
}
