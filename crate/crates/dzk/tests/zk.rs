use std::sync::Arc;

use dzk::algebra::{hypercube_sum, PrimeModulus, SparsePoly};
use dzk::netsim::{random_connected, run_protocol, Network};
use dzk::sumcheck::{
    distributed_plain_sumcheck, AdaptiveProver, CorruptAlphaProver, HonestProver, QueryMode, SumcheckInstance,
};
use dzk::zk::{simulate_views, zk_sumcheck, ZkSumcheck};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn instance(n: usize, nv: usize, d: usize, q: u64, t: usize, seed: u64, yes: bool) -> SumcheckInstance {
    let m = PrimeModulus::new(q).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let net = if n <= 1 { Network::complete(n.max(1)) } else { random_connected(n, 0.4, &mut rng) };
    let f = SparsePoly::random(nv, d, 6, m, &mut rng);
    let s = hypercube_sum(&f).unwrap();
    let a = if yes { s } else { m.add(s, 1 + rng.gen_range(0..q - 1)) };
    SumcheckInstance::new(net, Arc::new(f), a, t).unwrap()
}

#[test]
fn honest_yes_instances_always_accept() {
    for i in 0..40 {
        let inst = instance(2 + i % 6, 1 + i % 4, 1 + i % 2, 10007, 2 + i % 3, i as u64, true);
        let proto = ZkSumcheck::new(inst).unwrap();
        for seed in 0..5 {
            let out = run_protocol(&proto, &mut HonestProver, seed);
            assert!(out.all_accept(), "instance {i} seed {seed}: {:?}", out.accept);
        }
    }
}

#[test]
fn zk_matches_plain_verdicts() {
    for i in 0..60u64 {
        let yes = i % 2 == 0;
        let n = 2 + (i as usize) % 7;
        let d = (1 + (i as usize) % 3).min(n - 1);
        let inst = instance(n, 1 + (i as usize) % 5, d, 101, 2, 100 + i, yes);
        let z = zk_sumcheck(&inst, &mut AdaptiveProver::new(i), i);
        let p = distributed_plain_sumcheck(&inst, &mut AdaptiveProver::new(i), i);
        assert_eq!(z.all_accept(), p.all_accept(), "instance {i}");
        let z = zk_sumcheck(&inst, &mut CorruptAlphaProver { round: 1, node: 1 }, i);
        assert!(!z.all_accept());
    }
}

#[test]
fn simulator_shape_matches() {
    let inst = instance(6, 3, 2, 101, 2, 5, true);
    let real = run_protocol(&ZkSumcheck::new(inst.clone()).unwrap(), &mut HonestProver, 9);
    let sim = simulate_views(&inst, 9, QueryMode::Honest);
    for (a, b) in real.views.iter().zip(&sim) {
        assert_eq!(a.shape(), b.shape());
    }
}

#[test]
fn single_node_masks_tie_alpha_to_beta() {
    use dzk::netsim::build_tree;
    use dzk::zk::gen_masks;
    let m = PrimeModulus::new(101).unwrap();
    let tree = build_tree(&Network::complete(1)).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let masks = gen_masks(m, &tree, 3, 1, 2, 0, None, &mut rng);
    for h in 0..9 {
        assert_eq!(masks.alpha[0][h].intercept, masks.beta[0][h].intercept);
    }
}

#[test]
fn generated_masks_satisfy_constraints() {
    use dzk::netsim::build_tree;
    use dzk::zk::{gen_masks, masks_consistent};
    let m = PrimeModulus::new(10007).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..30 {
        let n = rng.gen_range(1..10);
        let tree = build_tree(&random_connected(n, 0.3, &mut rng)).unwrap();
        let t = rng.gen_range(2..5);
        let nv = 3;
        let mut carried: Option<Vec<Vec<u64>>> = None;
        for stage in 1..=nv + 1 {
            let r = m.random(&mut rng);
            let masks = gen_masks(m, &tree, t, stage, nv, r, carried.as_deref(), &mut rng);
            assert!(masks_consistent(m, &tree, &masks, r, carried.as_deref()));
            let mut broken = masks.clone();
            if stage <= nv {
                broken.alpha[n - 1][0].intercept = m.add(broken.alpha[n - 1][0].intercept, 1);
            } else {
                broken.root[0].intercept = m.add(broken.root[0].intercept, 1);
            }
            assert!(!masks_consistent(m, &tree, &broken, r, carried.as_deref()));
            if stage <= nv {
                carried = Some(masks.alpha.iter().map(|c| c[..t].iter().map(|p| p.intercept).collect()).collect());
            }
        }
    }
}

#[test]
fn free_mask_coefficients_are_uniform() {
    use dzk::netsim::build_tree;
    use dzk::zk::gen_masks;
    let m = PrimeModulus::new(5).unwrap();
    let tree = build_tree(&Network::path(3)).unwrap();
    let mut hist = vec![[0usize; 5]; 3];
    for seed in 0..10_000u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let masks = gen_masks(m, &tree, 2, 1, 2, 0, None, &mut rng);
        for k in 0..3 {
            hist[k][masks.beta[k][0].intercept as usize] += 1;
        }
    }
    for h in &hist {
        let chi2: f64 = h.iter().map(|&c| (c as f64 - 2000.0).powi(2) / 2000.0).sum();
        // 4 degrees of freedom, 0.999 quantile 18.47
        assert!(chi2 < 18.47, "{h:?}");
    }
}

#[test]
fn masked_share_is_exactly_uniform() {
    use dzk::zk::PolyEnc;
    let m = PrimeModulus::new(5).unwrap();
    for hidden in 0..5 {
        for n0 in 0..5 {
            for point in 1..5 {
                let mut count = [0usize; 5];
                for s1 in 0..5 {
                    for s2 in 0..5 {
                        let p = PolyEnc { slope: s1, intercept: hidden };
                        let mask = PolyEnc { slope: s2, intercept: n0 };
                        count[m.add(p.eval(m, point), mask.eval(m, point)) as usize] += 1;
                    }
                }
                assert!(count.iter().all(|&c| c == 5));
            }
        }
    }
}

#[test]
fn kept_copy_odds_by_enumeration() {
    // ordered draws of t + 1 distinct copies out of t^2, t = 2
    let t = 2;
    let tt = t * t;
    let (mut kept, mut used, mut total) = (0, 0, 0);
    for a in 0..tt {
        for b in 0..tt {
            for c in 0..tt {
                if a == b || b == c || a == c {
                    continue;
                }
                total += 1;
                kept += [a, b, c].contains(&0) as usize;
                used += (a == 0) as usize;
            }
        }
    }
    assert_eq!(kept as f64 / total as f64, (t + 1) as f64 / tt as f64);
    assert_eq!(used as f64 / total as f64, 0.25);
}

#[test]
fn rc_violation_is_caught_when_opened() {
    use dzk::zk::RcViolatorProver;
    let inst = instance(5, 2, 2, 101, 2, 7, true);
    let m = inst.modulus;
    let trials = 2000;
    let fooled = (0..trials)
        .filter(|&s| {
            let mut p = RcViolatorProver { modulus: m, node: 2, bad_copy: 1 };
            zk_sumcheck(&inst, &mut p, s).all_accept()
        })
        .count();
    let rate = fooled as f64 / trials as f64;
    assert!(rate <= 0.75 + 0.03, "{rate}");
}

#[test]
fn no_node_sees_two_points_of_a_hidden_polynomial() {
    use dzk::netsim::{TagKind, ValueKind};
    use std::collections::{HashMap, HashSet};
    for seed in 0..10 {
        let inst = instance(7, 3, 2, 10007, 3, 20 + seed, true);
        let tx = zk_sumcheck(&inst, &mut HonestProver, seed);
        let views = dzk::netsim::extract_views(&tx);
        for view in &views {
            let mut points: HashMap<_, HashSet<u8>> = HashMap::new();
            for tag in view.flat_tags() {
                let used = (tag.stage as usize).checked_sub(1).and_then(|s| tx.challenges.kept.get(s)).and_then(|k| k.first()).copied();
                let hidden = match (tag.kind, tag.value) {
                    (TagKind::Enc, _) => true,
                    (TagKind::Mask, ValueKind::Alpha | ValueKind::Beta) => used == Some(tag.copy as u64),
                    _ => false,
                };
                if hidden {
                    points.entry((tag.kind, tag.stage, tag.owner, tag.value, tag.copy)).or_default().insert(tag.point);
                }
            }
            assert!(points.values().all(|p| p.len() <= 1), "node {}", view.id);
        }
    }
}

#[test]
fn zk_rounds_follow_schedule() {
    use dzk::zk::zk_schedule_rounds;
    for nv in [1, 2, 4, 8] {
        let inst = instance(5, nv, 2, 10007, 2, nv as u64, true);
        let tx = zk_sumcheck(&inst, &mut HonestProver, 1);
        assert_eq!(tx.num_rounds(), zk_schedule_rounds(nv, 0));
        assert_eq!(tx.num_rounds(), 4 * nv + 5);
    }
}

#[test]
fn zk_rejects_degenerate_instances() {
    use dzk::zk::check_zk_instance;
    let one = instance(1, 2, 0, 101, 2, 1, true);
    assert!(check_zk_instance(&one).is_err());
    let t1 = instance(4, 2, 1, 101, 2, 1, true);
    let mut t1 = t1;
    t1.t = 1;
    assert!(check_zk_instance(&t1).is_err());
    assert!(ZkSumcheck::new(t1).is_err());
}

#[test]
fn simulated_masks_satisfy_openings() {
    // honest-prover runs and simulated runs are both accepted by every node
    for seed in 0..20 {
        let inst = instance(6, 3, 2, 101, 2, 40 + seed, true);
        let sim = dzk::zk::simulate_transcript(&inst, seed, QueryMode::Honest);
        assert!(sim.all_accept(), "seed {seed}");
        let uni = dzk::zk::simulate_transcript(&inst, seed, QueryMode::Uniform);
        assert_eq!(uni.num_rounds(), sim.num_rounds());
    }
}
