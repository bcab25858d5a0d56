use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use smooth_moments::{
    arcs::classify_grid, balance_threshold_exponent, classify_theta, energy, eval_s,
    even_moment_exact, exponent_params, moment_quadrature, optimal_q, sieve_smooth, Rational,
    SmoothSet, SplitRule,
};

fn rng() -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(0x5eed_0001)
}

fn random_smooth_set(rng: &mut ChaCha8Rng, max_x: u64) -> SmoothSet {
    let x = rng.gen_range(2..=max_x);
    let y = rng.gen_range(2..=x);
    sieve_smooth(x, y).unwrap()
}

fn pair_sum_energy(members: &[u64]) -> u128 {
    let mut sums: HashMap<u64, u128> = HashMap::new();
    for &a in members {
        for &b in members {
            *sums.entry(a + b).or_default() += 1;
        }
    }
    sums.values().map(|c| c * c).sum()
}

fn is_sidon(members: &[u64]) -> bool {
    let mut seen = std::collections::HashSet::new();
    for (i, &a) in members.iter().enumerate() {
        for &b in &members[i..] {
            if !seen.insert(a + b) {
                return false;
            }
        }
    }
    true
}

#[test]
fn conjugate_symmetry_and_periodicity() {
    let mut rng = rng();
    let set = sieve_smooth(2000, 13).unwrap();
    let psi = set.count() as f64;
    for _ in 0..1000 {
        let theta: f64 = rng.gen();
        let a = eval_s(theta, &set);
        let b = eval_s(1.0 - theta, &set);
        assert!((a.modulus - b.modulus).abs() <= 1e-12 * psi);
        assert!(a.modulus <= psi * (1.0 + 1e-12));
        assert!((a.modulus.powi(2) - a.norm_sqr()).abs() <= 1e-12 * a.norm_sqr().max(1.0));

        // A dyadic theta makes theta + 1 exactly representable.
        let dyadic = (theta * (1u64 << 40) as f64).floor() / (1u64 << 40) as f64;
        assert_eq!(eval_s(dyadic, &set), eval_s(dyadic + 1.0, &set));
    }
}

#[test]
fn energy_matches_pair_sum_oracle() {
    let mut rng = rng();
    for _ in 0..20 {
        let set = random_smooth_set(&mut rng, 300);
        let e = energy::<f64>(&set).unwrap().exact.unwrap();
        assert_eq!(e, pair_sum_energy(set.members()), "x={} y={}", set.x(), set.y());
    }
}

#[test]
fn energy_lower_bound_and_sidon_equality() {
    let mut rng = rng();
    let mut sets: Vec<SmoothSet> = (0..30).map(|_| random_smooth_set(&mut rng, 200)).collect();
    sets.push(sieve_smooth(10, 2).unwrap());
    sets.push(sieve_smooth(1000, 2).unwrap());
    sets.push(SmoothSet::from_members(4, 4, vec![1, 2, 3, 4]).unwrap());
    for set in sets {
        let psi = u128::from(set.count());
        let e = energy::<f64>(&set).unwrap().exact.unwrap();
        assert!(e >= 2 * psi * psi - psi);
        assert_eq!(e == 2 * psi * psi - psi, is_sidon(set.members()));
    }
}

#[test]
fn parseval_diagonal_and_trivial_bounds() {
    let mut rng = rng();
    for _ in 0..15 {
        let set = random_smooth_set(&mut rng, 400);
        let psi = set.count();
        assert_eq!(even_moment_exact::<f64>(&set, 1).unwrap().exact, Some(u128::from(psi)));
        for s in 1..=3u32 {
            let i = even_moment_exact::<f64>(&set, s).unwrap().exact.unwrap();
            assert!(i >= u128::from(psi).pow(s));
            assert!(i <= u128::from(psi).pow(2 * s - 1));
        }
        for rho in [1.0, 2.0, 2.5, 3.0, 4.0, 5.5] {
            // Parseval holds on any grid with N > x - 1, which caps the sum.
            let n = rng.gen_range(set.x() as usize..=3 * set.x() as usize);
            let m = moment_quadrature(&set, rho, n).unwrap();
            let bound = (psi as f64).powf(rho - 1.0);
            if rho >= 2.0 {
                assert!(m.value <= bound * (1.0 + 1e-9), "rho={rho} n={n}");
            }
            assert!(m.value >= 0.0);
        }
    }
}

#[test]
fn dirichlet_coverage() {
    let mut rng = rng();
    for big_q in [10.0, 100.0] {
        for _ in 0..100_000 {
            let theta: f64 = rng.gen();
            let l = classify_theta(theta, big_q, 10_000).unwrap();
            assert!(l.q as f64 <= big_q);
            let d = (theta - l.center()).abs();
            let d = d.min(1.0 - d);
            assert!(d <= 1.0 / (l.q as f64 * big_q) * (1.0 + 1e-12));
            assert!(2.0 * l.halfwidth <= 2.0 / (l.q as f64 * big_q) * (1.0 + 1e-15));
            assert_eq!(num_integer_gcd(l.a, l.q), 1);
        }
    }
}

fn num_integer_gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

#[test]
fn split_hypotheses_on_grid_nodes() {
    let x = 10_000u64;
    let xf = x as f64;
    let eps = 0.05;
    let n = 20_011;

    // Q >= x^{1/2+eps} and q <= x^{1/2-eps} give q L <= 2 x^{1/2-eps}.
    for big_q in [xf.powf(0.5 + eps), 500.0, 2000.0] {
        for l in classify_grid(n, big_q, x) {
            if (l.q as f64) <= xf.powf(0.5 - eps) {
                assert!(l.q as f64 * l.l <= 2.0 * xf.powf(0.5 - eps) * (1.0 + 1e-12));
            }
        }
    }
    // Q >= x^{1/2}: nodes with q > x/Q have L <= 2.
    for big_q in [100.0, 316.0, 1500.0] {
        for l in classify_grid(n, big_q, x) {
            if l.q as f64 > xf / big_q {
                assert!(l.l <= 2.0);
            }
        }
    }
}

#[test]
fn balance_threshold_inequality() {
    for k in [4i64, 5, 13, 40] {
        for rho in [3i64, 4, 6, 10] {
            let p = exponent_params(Rational::from_integer(k.into()), Rational::from_integer(rho.into()), 0.05)
                .unwrap()
                .approx();
            let t = balance_threshold_exponent(&p);
            for x in [1e3f64, 1e6, 1e12] {
                for step in [0.0, 0.05, 0.2, 0.5] {
                    let q = x.powf(t + step);
                    let lhs = (1.0 - p.gamma * p.rho) * x.ln() + (-2.0 + p.gamma * p.rho) * q.ln();
                    let rhs = (1.0 + p.kappa * p.rho / 2.0) * x.ln() + (-2.0 - p.rho / 2.0) * q.ln();
                    assert!(lhs >= rhs - 1e-9 * rhs.abs().max(1.0), "K={k} rho={rho} x={x} step={step}");
                }
                // Q = x^{1/2} is above the threshold.
                assert!(0.5 >= t);
            }
        }
    }
    let p = exponent_params(13.0f64, 4.0, 0.05).unwrap();
    assert!(optimal_q(10_000, &p, SplitRule::Thm2).unwrap() >= 100.0);
}
