use std::sync::Arc;

use dzk::algebra::{hypercube_sum, Oracle, PrimeModulus, SparsePoly};
use dzk::coloring::count_colorings;
use dzk::netsim::{build_tree, Network};
use dzk::roundopt::*;
use dzk::subgraph::{build_pattern_poly, count_copies, subgraph_protocol, PatternGraph};
use dzk::sumcheck::{centralized_sumcheck, ConstantShiftProver, HonestProver, SumcheckInstance};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn f10007() -> PrimeModulus {
    PrimeModulus::new(10007).unwrap()
}

#[test]
fn single_variable_identity() {
    let m = f10007();
    let x = SparsePoly::var(1, 0, m);
    for seed in 0..50 {
        assert!(fold_dcs_honest(&x, 1, seed, None).unwrap().accept);
    }
    let fooled = (0..2000).filter(|&s| fold_dcs_honest(&x, 0, s, None).unwrap().accept).count();
    // a wrong claim survives only if the folding scalar vanishes
    assert!(fooled <= 3, "fooled {fooled} times");
}

#[test]
fn constant_polynomial_sums() {
    let m = f10007();
    for nv in 1..=6 {
        let c = 17 + nv as u64;
        let f = SparsePoly::constant(nv, c, m);
        let a = m.mul(c, m.pow(2, nv as u64));
        for seed in 0..10 {
            assert!(fold_dcs_honest(&f, a, seed, None).unwrap().accept, "N={nv}");
            assert!(!fold_dcs_honest(&f, m.add(a, 1), seed, None).unwrap().accept, "N={nv}");
        }
    }
}

#[test]
fn padding_scales_the_claim() {
    let m = f10007();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let f = SparsePoly::random(3, 2, 6, m, &mut rng);
    let (p, a, pad) = pad_to_pow2(&f, 5);
    assert_eq!((p.num_vars(), pad, a), (4, 1, 10));
    assert_eq!(hypercube_sum(&p).unwrap(), m.mul(2, hypercube_sum(&f).unwrap()));
}

#[test]
fn levels_follow_the_recurrence() {
    let m = f10007();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let f = SparsePoly::random(8, 2, 20, m, &mut rng);
    let a = hypercube_sum(&f).unwrap();
    let out = fold_dcs_honest(&f, a, 3, None).unwrap();
    assert!(out.accept);
    assert_eq!(out.levels.len(), 3);
    let widths: Vec<usize> = out.levels.iter().map(|l| l.alpha.len()).collect();
    assert_eq!(widths, vec![4, 2, 1]);
    assert_eq!(out.trace.levels.len(), 3);
}

#[test]
fn fold_and_plain_agree() {
    let m = f10007();
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let (mut fold_fooled, mut plain_fooled) = (0, 0);
    for i in 0..100u64 {
        let nv = rng.gen_range(1..=8);
        let d = rng.gen_range(1..=3);
        let f = SparsePoly::random(nv, d, rng.gen_range(1..=12), m, &mut rng);
        let a = hypercube_sum(&f).unwrap();
        let fold = fold_dcs_honest(&f, a, i, None).unwrap().accept;
        let inst = SumcheckInstance::new(Network::path(d + 2), Arc::new(f.clone()), a, 1).unwrap();
        let plain = centralized_sumcheck(&inst, &mut HonestProver, i).accept;
        assert!(fold && plain);

        let delta = rng.gen_range(1..m.q());
        let bad = m.add(a, delta);
        fold_fooled += fold_dcs(&f, bad, i, &mut ShiftDcs::new(&f, bad), None).unwrap().accept as usize;
        let inst = SumcheckInstance::new(Network::path(d + 2), Arc::new(f.clone()), m.add(a, m.mul(2, delta)), 1).unwrap();
        plain_fooled += centralized_sumcheck(&inst, &mut ConstantShiftProver { delta }, i).accept as usize;
    }
    assert!(fold_fooled <= 2 && plain_fooled <= 2, "{fold_fooled} {plain_fooled}");
}

#[test]
fn distributed_fold_matches_central() {
    let m = f10007();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let net = Network::cycle(6);
    for i in 0..20u64 {
        let f = SparsePoly::random(4, 2, 10, m, &mut rng);
        let a = hypercube_sum(&f).unwrap();
        let claim = if i % 2 == 0 { a } else { m.add(a, 3) };
        let c = fold_dcs_honest(&f, claim, i, None).unwrap();
        let d = fold_dcs_honest(&f, claim, i, Some(&net)).unwrap();
        assert_eq!(c.accept, d.accept);
        assert_eq!(c.accept, i % 2 == 0);
        let tx = d.transcript.unwrap();
        // instance, commit + challenge per level, final commit, point, query, forward
        assert_eq!(tx.num_rounds(), 1 + 2 * 2 + 4);
    }
}

#[test]
fn monomial_assignment_examples() {
    let m = f10007();
    let c = SparsePoly::constant(3, 42, m);
    let asg = distribute_monomials(&c, 5, 1).unwrap();
    assert_eq!(asg.per_node[0].len(), 1);
    let tree = build_tree(&Network::path(5)).unwrap();
    let (root, _, ok) = monomial_query(&asg, &tree, &[3, 4, 5], &mut |_, _| {});
    assert_eq!(root, 42);
    assert!(ok.iter().all(|&b| b));

    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut f = SparsePoly::zero(4, 3, m);
    while f.len() < 8 {
        let e: Vec<u8> = (0..4).map(|_| rng.gen_range(0..=3)).collect();
        f.add_term(e, rng.gen_range(1..m.q())).unwrap();
    }
    let asg = distribute_monomials(&f, 8, 1).unwrap();
    assert!(asg.per_node.iter().all(|v| v.len() == 1));
    let flat: Vec<_> = asg.per_node.iter().flatten().map(|(e, _)| e.clone()).collect();
    let mut sorted = flat.clone();
    sorted.sort();
    assert_eq!(flat, sorted);
    let tree = build_tree(&Network::path(8)).unwrap();
    for _ in 0..20 {
        let pt: Vec<u64> = (0..4).map(|_| m.random(&mut rng)).collect();
        let (root, _, ok) = monomial_query(&asg, &tree, &pt, &mut |_, _| {});
        assert_eq!(root, f.eval(&pt));
        assert!(ok.iter().all(|&b| b));
        let (_, _, ok) = monomial_query(&asg, &tree, &pt, &mut |v, x| {
            if v == 3 {
                *x = m.add(*x, 1);
            }
        });
        assert!(!ok[3] || !ok[2]);
    }
    assert!(distribute_monomials(&f, 7, 1).is_err());
}

#[test]
fn split_polynomials_telescope() {
    let m = f10007();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..10 {
        let f = SparsePoly::random(6, 2, 15, m, &mut rng);
        let a = hypercube_sum(&f).unwrap();
        let mut p = HonestSplit { f: &f, ell: 2 };
        let h1 = p.h(1, &[]);
        assert_eq!(hypercube_sum(&h1).unwrap(), a);
        for solver in [SubSolver::FoldDcs, SubSolver::Plain] {
            let out = p_split(&f, a, 2, 2, 7, &mut HonestSplit { f: &f, ell: 2 }, solver, 9).unwrap();
            assert!(out.accept && out.budget_ok);
            assert!(out.max_monomials <= 9);
            assert_eq!(out.claims.len(), 3);
        }
    }
}

#[test]
fn triangle_split_matches_subgraph_protocol() {
    let net = Network::complete(4);
    let h = PatternGraph::clique(3);
    let sub = subgraph_protocol(&net, &h, count_copies(&net, &h), 2, 3).unwrap();
    assert!(sub.all_accept());
    let m = PrimeModulus::new(sub.q).unwrap();
    let f = build_pattern_poly(&net, &h, m);
    let a = m.mul(h.aut(), count_copies(&net, &h));
    let d = f.degree();
    let budget = (d + 1).pow(2);
    let out = p_split(&f, a, 2, 2, 5, &mut HonestSplit { f: &f, ell: 2 }, SubSolver::Plain, budget).unwrap();
    assert!(out.accept && out.budget_ok);
    let wrong = p_split(&f, m.add(a, 1), 2, 2, 5, &mut HonestSplit { f: &f, ell: 2 }, SubSolver::Plain, budget).unwrap();
    assert!(!wrong.accept);
}

#[test]
fn corrupt_split_is_caught() {
    let m = f10007();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let f = SparsePoly::random(6, 2, 15, m, &mut rng);
    let a = hypercube_sum(&f).unwrap();
    let trials = 10_000u64;
    let fooled = (0..trials)
        .filter(|&s| {
            let mut p = CorruptSplit { inner: HonestSplit { f: &f, ell: 2 }, which: 2 };
            p_split(&f, a, 2, 2, s, &mut p, SubSolver::FoldDcs, 9).unwrap().accept
        })
        .count();
    // t d log N / q is about 0.002 here
    assert!((fooled as f64) / (trials as f64) < 0.01, "fooled {fooled}");
}

#[test]
fn budget_violation_rejects() {
    let m = f10007();
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let f = SparsePoly::random(4, 2, 12, m, &mut rng);
    let a = hypercube_sum(&f).unwrap();
    let out = p_split(&f, a, 2, 1, 1, &mut HonestSplit { f: &f, ell: 2 }, SubSolver::Plain, 1).unwrap();
    assert!(!out.budget_ok && !out.accept);
}

#[test]
fn band_prefix_sums_match_brute_force() {
    let m = PrimeModulus::new(1_000_003).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for _ in 0..6 {
        let net = band_graph(6, 3, 4, 4, &mut rng);
        for k in 2..=3 {
            let band = BandColoring::new(&net, k, m).unwrap();
            assert_eq!(band.prefix_sum(&[]), count_colorings(&net, k).unwrap() % m.q());
            let nv = band.num_vars();
            for len in [1, 2, k, k + 1, nv - 1, nv] {
                let prefix: Vec<u64> = (0..len).map(|_| m.random(&mut rng)).collect();
                assert_eq!(band.prefix_sum(&prefix), brute_suffix_sum(&band, &prefix), "len {len}");
            }
        }
    }
}

fn brute_suffix_sum(f: &BandColoring, prefix: &[u64]) -> u64 {
    let m = f.modulus();
    let rest = f.num_vars() - prefix.len();
    let mut s = 0;
    let mut pt = prefix.to_vec();
    pt.resize(f.num_vars(), 0);
    for mask in 0u64..1 << rest {
        for j in 0..rest {
            pt[prefix.len() + j] = (mask >> j) & 1;
        }
        s = m.add(s, f.eval(&pt));
    }
    s
}

#[test]
fn constdeg_cycles() {
    let c5 = constdeg_noncolor(&Network::cycle(5), 2, 1).unwrap();
    assert!(c5.all_accept());
    let c6 = constdeg_noncolor(&Network::cycle(6), 2, 1).unwrap();
    assert!(!c6.all_accept());
    assert_eq!(c5.rounds, c5.plan.rounds(false));
}

#[test]
fn constdeg_masked_mode() {
    let out = constdeg_noncolor_with(&Network::cycle(7), 2, 4, true).unwrap();
    assert!(out.all_accept());
    assert_eq!(out.rounds, out.plan.rounds(true));
    assert!(!constdeg_noncolor_with(&Network::cycle(8), 2, 4, true).unwrap().all_accept());
}

#[test]
fn constdeg_rejects_high_degree() {
    assert!(constdeg_noncolor(&Network::star(7), 2, 1).is_err());
}

#[test]
fn batching_matches_sequential() {
    let m = f10007();
    let net = Network::cycle(8);
    let tree = build_tree(&net).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    let jobs: Vec<(SparsePoly, u64)> = (0..7)
        .map(|i| {
            let f = SparsePoly::random(3, 3, 6, m, &mut rng);
            let a = hypercube_sum(&f).unwrap();
            (f, if i % 3 == 0 { m.add(a, 1) } else { a })
        })
        .collect();
    let par = batched_sumchecks(&net, &tree, &jobs, 3, 77, 3, false).unwrap();
    let seq = batched_sumchecks(&net, &tree, &jobs, 3, 77, 1, false).unwrap();
    assert_eq!(par.verdicts, seq.verdicts);
    assert_eq!(par.verdicts, vec![false, true, true, false, true, true, false]);
    assert!(par.transcript.num_rounds() < seq.transcript.num_rounds());
}

#[test]
fn plan_matches_definition() {
    let p = ConstdegPlan::new(16, 2);
    assert_eq!((p.ell, p.num_vars), (3, 32));
    assert!(p.num_vars - p.t * p.ell <= p.ell);
    assert!(p.num_vars - (p.t - 1) * p.ell > p.ell);
    assert_eq!(p.batch, 4);
}

#[test]
fn trace_serializes() {
    let m = f10007();
    let f = SparsePoly::var(2, 1, m);
    let out = fold_dcs_honest(&f, 2, 1, None).unwrap();
    let j = out.trace.to_json();
    assert!(j["levels"][0]["challenges"].is_array());
    assert!(j["levels"][0]["claim"].is_u64());
}
