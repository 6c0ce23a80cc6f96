use dzk::algebra::*;
use dzk::coloring::arithmetize;
use dzk::netsim::Network;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn f(q: u64) -> PrimeModulus {
    PrimeModulus::new(q).unwrap()
}

fn sieve(lo: u64, hi: u64) -> Vec<u64> {
    (lo..=hi).filter(|&n| n >= 2 && (2..n).all(|d| n % d != 0)).collect()
}

#[test]
fn field_examples() {
    let m = f(7);
    let three = m.elem(3);
    assert_eq!(three.inv().unwrap().value(), 5);
    assert_eq!((three * m.elem(5)).value(), 1);
    assert_eq!(m.elem(2).pow(6).value(), 1);
    for a in 0..7 {
        assert_eq!((m.elem(a) + m.elem(0)).value(), a);
    }
    assert!(m.elem(0).inv().is_err());
    assert!(PrimeModulus::new(9).is_err());
    assert!(PrimeModulus::new(2).is_err());
}

#[test]
fn field_axioms_exhaustive() {
    for q in [3u64, 5, 7, 11, 13] {
        let m = f(q);
        for a in 0..q {
            for b in 0..q {
                assert_eq!(m.add(a, b), (a + b) % q);
                assert_eq!(m.sub(a, b), (a + q - b) % q);
                assert_eq!(m.mul(a, b), a * b % q);
                for c in 0..q {
                    assert_eq!(m.add(m.add(a, b), c), m.add(a, m.add(b, c)));
                    assert_eq!(m.mul(m.mul(a, b), c), m.mul(a, m.mul(b, c)));
                    assert_eq!(m.mul(a, m.add(b, c)), m.add(m.mul(a, b), m.mul(a, c)));
                }
            }
            if a != 0 {
                assert_eq!(m.mul(a, m.inv(a).unwrap()), 1);
            }
            assert_eq!(m.add(a, m.neg(a)), 0);
        }
    }
}

#[test]
fn large_modulus_products() {
    let q = (1u64 << 61) - 1;
    let m = f(q);
    let a = q - 2;
    let b = q - 3;
    assert_eq!(m.mul(a, b), ((a as u128 * b as u128) % q as u128) as u64);
    assert_eq!(m.mul(a, m.inv(a).unwrap()), 1);
}

#[test]
fn prime_sampling() {
    let primes = sieve(100, 200);
    assert_eq!(primes.len(), 21);
    let mut seen = std::collections::BTreeSet::new();
    for seed in 0..2000 {
        let p = sample_prime(100, seed).unwrap().q();
        assert!(primes.contains(&p));
        seen.insert(p);
        assert_eq!(sample_prime(100, seed).unwrap().q(), p);
    }
    assert_eq!(seen.len(), 21);
    for seed in 0..200 {
        assert!([3, 5].contains(&sample_prime(3, seed).unwrap().q()));
    }
    assert!(sample_prime(2, 0).is_err());
}

#[test]
fn prime_sampling_is_uniform() {
    // each of the 21 primes should get about 1/21 of the draws
    let primes = sieve(100, 200);
    let trials = 21_000;
    let mut counts = vec![0usize; primes.len()];
    for seed in 0..trials {
        let p = sample_prime(100, seed as u64).unwrap().q();
        counts[primes.iter().position(|&x| x == p).unwrap()] += 1;
    }
    let expect = trials as f64 / 21.0;
    let chi2: f64 = counts.iter().map(|&c| (c as f64 - expect).powi(2) / expect).sum();
    // 20 degrees of freedom, 0.999 quantile is about 45.3
    assert!(chi2 < 45.3, "chi2 {chi2}");
}

#[test]
fn univariate_examples() {
    let m = f(7);
    assert_eq!(UniPoly::new(vec![0, 1], m).eval(5), 5);
    assert_eq!(UniPoly::new(vec![4], m).eval(6), 4);
    let p = UniPoly::new(vec![1, 2, 3], m);
    assert_eq!(p.eval(2), 3);
    assert_eq!(uni_eval(&p, m.elem(2)).unwrap().value(), 3);
    let m11 = f(11);
    assert_eq!(interpolate_deg1(m11, 1, 5, 2, 8).unwrap().coeffs, vec![2, 3]);
    assert_eq!(interpolate_deg1(m11, 1, 4, 2, 4).unwrap().coeffs, vec![4, 0]);
    assert_eq!(interpolate_deg1(m11, 0, 6, 1, 9).unwrap().coeffs, vec![6, 3]);
    assert!(interpolate_deg1(m11, 3, 1, 3, 2).is_err());
}

#[test]
fn horner_matches_naive() {
    let m = f(10007);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..200 {
        let len = rng.gen_range(1..10);
        let p = UniPoly::new((0..len).map(|_| m.random(&mut rng)).collect(), m);
        let x = m.random(&mut rng);
        assert_eq!(p.eval(x), p.eval_naive(x));
    }
}

#[test]
fn degree_one_roundtrip_exhaustive() {
    let m = f(5);
    for c0 in 0..5 {
        for c1 in 0..5 {
            let p = UniPoly::new(vec![c0, c1], m);
            for x1 in 0..5 {
                for x2 in 0..5 {
                    if x1 == x2 {
                        continue;
                    }
                    let back = interpolate_deg1(m, x1, p.eval(x1), x2, p.eval(x2)).unwrap();
                    assert_eq!(back.coeffs, vec![c0, c1]);
                }
            }
        }
    }
}

#[test]
fn interpolation_reproduces_values() {
    let m = f(101);
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for d in 0..6 {
        let xs: Vec<u64> = (0..=d as u64).map(|x| x * 7 + 1).collect();
        let ys: Vec<u64> = xs.iter().map(|_| m.random(&mut rng)).collect();
        let p = interpolate(m, &xs, &ys).unwrap();
        for (x, y) in xs.iter().zip(&ys) {
            assert_eq!(p.eval(*x), *y);
        }
    }
}

#[test]
fn sparse_examples() {
    let m = f(7);
    let x1x2 = SparsePoly::from_terms(2, 1, m, [(vec![1, 1], 1)]).unwrap();
    assert_eq!(sparse_eval(&x1x2, &[1, 1]).unwrap(), 1);
    let g = SparsePoly::from_terms(2, 1, m, [(vec![0, 0], 1), (vec![1, 1], 6)]).unwrap();
    assert_eq!(sparse_eval(&g, &[2, 3]).unwrap(), 2);
    assert_eq!(sparse_eval(&g, &[0, 0]).unwrap(), 1);
    assert!(sparse_eval(&g, &[1]).is_err());
    assert!(SparsePoly::from_terms(2, 1, m, [(vec![2, 0], 1)]).is_err());

    assert_eq!(hypercube_sum(&x1x2).unwrap(), 1);
    let sum = SparsePoly::from_terms(2, 1, m, [(vec![1, 0], 1), (vec![0, 1], 1)]).unwrap();
    assert_eq!(hypercube_sum(&sum).unwrap(), 4);
    let g1 = partial_sum_univariate(&x1x2, &[], 1).unwrap();
    assert_eq!(g1.coeffs, vec![0, 1]);
    assert_eq!(partial_sum_univariate(&x1x2, &[3], 2).unwrap().coeffs, vec![0, 3]);
}

#[test]
fn triangle_coloring_sum() {
    let m = f(1009);
    let p = arithmetize(&Network::complete(3), 3, m).unwrap();
    assert_eq!(hypercube_sum(&p).unwrap(), 6);
}

#[test]
fn first_round_polynomial_matches_expansion() {
    // expand g_1 directly: evaluate the cube sum with x_1 fixed at 0..=d
    let m = f(1009);
    let p = arithmetize(&Network::complete(3), 2, m).unwrap();
    let g1 = partial_sum_univariate(&p, &[], 1).unwrap();
    let n = p.num_vars();
    for x in 0..=p.degree() as u64 + 2 {
        let mut s = 0;
        for mask in 0u64..1 << (n - 1) {
            let mut pt = vec![x];
            pt.extend((0..n - 1).map(|j| (mask >> j) & 1));
            s = m.add(s, p.eval(&pt));
        }
        assert_eq!(g1.eval(x), s);
    }
}

#[test]
fn telescoping_identity() {
    let m = f(10007);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..30 {
        let nv = rng.gen_range(1..=6);
        let p = SparsePoly::random(nv, 3, 12, m, &mut rng);
        let mut claim = hypercube_sum(&p).unwrap();
        let mut r = Vec::new();
        for i in 1..=nv {
            let g = partial_sum_univariate(&p, &r, i).unwrap();
            assert_eq!(m.add(g.eval(0), g.eval(1)), claim);
            let ri = m.random(&mut rng);
            claim = g.eval(ri);
            r.push(ri);
        }
        assert_eq!(claim, p.eval(&r));
    }
}

#[test]
fn multilinear_extension() {
    let m = f(101);
    // K3 adjacency on 2-bit IDs
    let mut entries = Vec::new();
    for u in 0..3u64 {
        for v in 0..3u64 {
            if u != v {
                entries.push((u, v));
            }
        }
    }
    let table = BoolTable::new(2, entries).unwrap();
    let poly = mle_poly(m, &table);
    for z in 0..4u64 {
        for w in 0..4u64 {
            let pt = [(z >> 1) & 1, z & 1, (w >> 1) & 1, w & 1];
            assert_eq!(mle_eval(m, &table, &pt).unwrap(), table.get(z, w) as u64);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..100 {
        let pt: Vec<u64> = (0..4).map(|_| m.random(&mut rng)).collect();
        assert_eq!(mle_eval(m, &table, &pt).unwrap(), poly.eval(&pt));
    }
    assert_eq!(mle_eval(m, &table, &[17, 5, 99, 3]).unwrap(), poly.eval(&[17, 5, 99, 3]));
    assert!(mle_eval(m, &table, &[1, 2, 3]).is_err());
    assert!(BoolTable::new(2, vec![(4, 0)]).is_err());
}

#[test]
fn restriction_helpers() {
    let m = f(10007);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..30 {
        let p = SparsePoly::random(5, 2, 10, m, &mut rng);
        let pre: Vec<u64> = (0..2).map(|_| m.random(&mut rng)).collect();
        let fixed = p.fix_prefix(&pre);
        let rest: Vec<u64> = (0..3).map(|_| m.random(&mut rng)).collect();
        let mut full = pre.clone();
        full.extend(&rest);
        assert_eq!(fixed.eval(&rest), p.eval(&full));

        let s = p.sum_suffix(2);
        let mut direct = 0;
        for mask in 0u64..8 {
            let mut pt = pre.clone();
            pt.extend((0..3).map(|j| (mask >> j) & 1));
            direct = m.add(direct, p.eval(&pt));
        }
        assert_eq!(s.eval(&pre), direct);

        let padded = p.pad_vars(2);
        assert_eq!(hypercube_sum(&padded).unwrap(), m.mul(4, hypercube_sum(&p).unwrap()));
    }
}

#[test]
fn grid_interpolation() {
    let m = f(10007);
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for vars in 0..4 {
        for d in 1..4 {
            let p = SparsePoly::random(vars, d, 8, m, &mut rng);
            let w = d as u64 + 1;
            let total = w.pow(vars as u32);
            let values: Vec<u64> = (0..total)
                .map(|mut idx| {
                    let mut x = vec![0u64; vars];
                    for i in (0..vars).rev() {
                        x[i] = idx % w;
                        idx /= w;
                    }
                    p.eval(&x)
                })
                .collect();
            assert_eq!(interpolate_grid(m, vars, d, &values).unwrap(), p.with_degree(d).unwrap());
        }
    }
    assert!(interpolate_grid(m, 2, 1, &[1, 2, 3]).is_err());
}

#[test]
fn enumeration_guard() {
    let m = f(101);
    let p = SparsePoly::zero(MAX_ENUM_VARS + 1, 1, m);
    assert!(hypercube_sum(&p).is_err());
}
