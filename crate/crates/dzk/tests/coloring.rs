use dzk::algebra::{hypercube_sum, Oracle, PrimeModulus};
use dzk::coloring::*;
use dzk::netsim::{build_tree, Network};
use dzk::sumcheck::AdaptiveProver;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn brute_colorings(net: &Network, k: usize) -> u64 {
    let n = net.n();
    let mut count = 0;
    let total = (k as u64).pow(n as u32);
    for mut code in 0..total {
        let mut col = vec![0; n];
        for c in col.iter_mut() {
            *c = (code % k as u64) as usize;
            code /= k as u64;
        }
        if net.edges().iter().all(|&(u, v)| col[u] != col[v]) {
            count += 1;
        }
    }
    count
}

#[test]
fn cube_sum_counts_colorings() {
    let m = PrimeModulus::new(1_000_003).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let graphs = vec![
        Network::complete(3),
        Network::complete(4),
        Network::cycle(4),
        Network::cycle(5),
        Network::path(4),
        dzk::netsim::random_connected(5, 0.5, &mut rng),
    ];
    for g in &graphs {
        for k in 2..=3 {
            if g.n() * k > 16 {
                continue;
            }
            let o = arithmetize(g, k, m).unwrap();
            let want = brute_colorings(g, k);
            assert_eq!(hypercube_sum(&o).unwrap(), want % m.q(), "{g:?} k={k}");
            assert_eq!(count_colorings(g, k).unwrap(), want);
            assert_eq!(is_colorable(g, k), want > 0);
        }
    }
}

#[test]
fn distributed_t_matches_direct() {
    let m = PrimeModulus::new(10007).unwrap();
    let g = Network::complete(4);
    let o = arithmetize(&g, 3, m).unwrap();
    let tree = build_tree(&g).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..20 {
        let x: Vec<u64> = (0..o.num_vars()).map(|_| m.random(&mut rng)).collect();
        let (root, _, ok) = eval_t_distributed(&o, &tree, &x, &mut |_, _| {});
        assert_eq!(root, o.eval_t(&x));
        assert!(ok.iter().all(|&b| b));
        let (_, _, ok) = eval_t_distributed(&o, &tree, &x, &mut |u, v| {
            if u == 2 {
                *v = m.add(*v, 1)
            }
        });
        assert!(!ok.iter().all(|&b| b));
    }
}

#[test]
fn k4_is_not_3_colorable_and_accepts() {
    let g = Network::complete(4);
    for seed in 0..3 {
        let out = noncolor_protocol(&g, 3, 2, seed).unwrap();
        assert!(out.all_accept(), "seed {seed}");
        assert_eq!(out.accept.len(), 4);
    }
}

#[test]
fn colorable_graph_is_rejected() {
    let g = Network::cycle(4);
    let mut fooled = 0;
    for seed in 0..20 {
        let out = noncolor_protocol(&g, 2, 2, seed).unwrap();
        assert!(!out.all_accept(), "seed {seed}");
        let mut cheat = AdaptiveProver::new(seed);
        let out = noncolor_with(&g, 2, 2, seed, &mut cheat).unwrap();
        fooled += out.all_accept() as usize;
    }
    // 8 rounds of degree 4 over q >= 256: at most 1/8 expected
    assert!(fooled <= 8, "{fooled}");
}

#[test]
fn field_is_large_enough() {
    for n in 2..12 {
        let m = pick_field(n, 5);
        assert!(m.q() >= (n as u64).pow(4));
    }
}

#[test]
fn dimacs_roundtrip() {
    let text = "c demo\np cnf 3 2\n1 -2 3 0\n-1 2 0\n";
    let cnf = Cnf::parse_dimacs(text).unwrap();
    assert_eq!(cnf.clauses, vec![vec![1, -2, 3], vec![-1, 2]]);
    assert_eq!(Cnf::parse_dimacs(&cnf.to_dimacs()).unwrap(), cnf);
    assert!(Cnf::parse_dimacs("p cnf 4 1\n1 2 3 4 0\n").is_err());
    assert!(Cnf::parse_dimacs("p cnf 2 1\n1 5 0\n").is_err());
    assert!(Cnf::parse_dimacs("1 2 0\n").is_err());
}

#[test]
fn reduction_preserves_satisfiability() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let mut seen = [0, 0];
    for i in 0..60 {
        let vars = 2 + i % 3;
        let clauses = 2 + i % 7;
        let cnf = Cnf::random(vars, clauses, &mut rng);
        let g = sat_to_3col(&cnf).unwrap();
        assert!(g.max_degree() <= SAT_MAX_DEGREE, "degree {}", g.max_degree());
        assert!(g.is_connected());
        let sat = cnf.satisfiable();
        seen[sat as usize] += 1;
        assert_eq!(is_colorable(&g, 3), sat, "{cnf:?}");
    }
    assert!(seen[0] > 0 && seen[1] > 0, "{seen:?}");
}

#[test]
fn unsat_formula_gives_uncolorable_graph() {
    let cnf = Cnf { vars: 1, clauses: vec![vec![1], vec![-1]] };
    assert!(!cnf.satisfiable());
    assert!(!is_colorable(&sat_to_3col(&cnf).unwrap(), 3));
}

#[test]
fn single_edge_indicator() {
    let m = PrimeModulus::new(101).unwrap();
    let g = Network::path(2);
    let o = arithmetize(&g, 2, m).unwrap();
    for bits in 0u32..16 {
        let x: Vec<u64> = (0..4).map(|j| ((bits >> (3 - j)) & 1) as u64).collect();
        let proper = (x[0] + x[1] == 1) && (x[2] + x[3] == 1) && x[0] != x[2];
        assert_eq!(o.eval(&x), proper as u64, "{x:?}");
    }
}

#[test]
fn reference_counts() {
    assert_eq!(count_colorings(&Network::complete(4), 3).unwrap(), 0);
    assert_eq!(count_colorings(&Network::complete(3), 3).unwrap(), 6);
    assert_eq!(count_colorings(&Network::path(4), 3).unwrap(), 24);
    let m = PrimeModulus::new(1_000_003).unwrap();
    for n in 2..=5 {
        let o = arithmetize(&Network::path(n), 3, m).unwrap();
        assert_eq!(hypercube_sum(&o).unwrap(), 3 << (n - 1));
    }
    assert!(arithmetize(&Network::path(3), 1, m).is_err());
}

#[test]
fn sampled_primes_miss_small_counts() {
    for seed in 0..200 {
        let q = pick_field(10, seed).q();
        assert!((10_000..=20_000).contains(&q));
        let q3 = pick_field(3, seed).q();
        assert_ne!(6 % q3, 0);
    }
}

#[test]
fn zero_point_gives_unit_t() {
    let m = PrimeModulus::new(10007).unwrap();
    let g = Network::complete(4);
    let o = arithmetize(&g, 3, m).unwrap();
    let tree = build_tree(&g).unwrap();
    let (root, parts, _) = eval_t_distributed(&o, &tree, &[0; 12], &mut |_, _| {});
    assert_eq!(root, 1);
    assert!(parts.iter().all(|&p| p == 1));
}

#[test]
fn subtree_products_decompose() {
    let m = PrimeModulus::new(10007).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let g = dzk::netsim::random_connected(6, 0.5, &mut rng);
    let o = arithmetize(&g, 3, m).unwrap();
    let tree = build_tree(&g).unwrap();
    for _ in 0..100 {
        let x: Vec<u64> = (0..o.num_vars()).map(|_| m.random(&mut rng)).collect();
        let t = o.subtree_products(&tree, &x);
        for u in 0..6 {
            let kids = tree.children(u).iter().fold(1, |a, &j| m.mul(a, t[j]));
            assert_eq!(t[u], m.mul(o.local_factor(u, &x), kids));
        }
        assert_eq!(t[0], o.eval_t(&x));
    }
}

#[test]
fn empty_formula_is_colorable() {
    let cnf = Cnf { vars: 1, clauses: vec![] };
    assert!(is_colorable(&sat_to_3col(&cnf).unwrap(), 3));
}

#[test]
fn reduction_exhaustive_small() {
    let mut lits = Vec::new();
    let all: Vec<i32> = vec![1, -1, 2, -2, 3, -3];
    for a in 0..6 {
        lits.push(vec![all[a]]);
        for b in a + 1..6 {
            lits.push(vec![all[a], all[b]]);
            for c in b + 1..6 {
                lits.push(vec![all[a], all[b], all[c]]);
            }
        }
    }
    let mut checked = 0;
    // index l stands for "no clause"
    let l = lits.len();
    for i in 0..=l {
        for j in i..=l {
            for h in j..=l {
                let clauses: Vec<Vec<i32>> = [i, j, h].iter().filter(|&&x| x < l).map(|&x| lits[x].clone()).collect();
                let cnf = Cnf { vars: 3, clauses };
                let g = sat_to_3col(&cnf).unwrap();
                assert_eq!(is_colorable(&g, 3), cnf.satisfiable(), "{cnf:?}");
                checked += 1;
            }
        }
    }
    assert!(checked > 10_000);
}
