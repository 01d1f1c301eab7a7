//! Residue search over `P^1(Z_p)` as an oracle for the odd-prime criteria.

use chatelet::localsolve::{torsor_exponent_set, x_soluble_at_odd_p};
use chatelet::model::{canonicalize, CanonicalSurface, RawCoefficients};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn val(x: i128, p: i128, cap: u32) -> Option<u32> {
    let mut x = x;
    let mut e = 0;
    while e < cap {
        if x % p != 0 {
            return Some(e);
        }
        x /= p;
        e += 1;
    }
    None
}

/// Valuation pairs of `(f(u,v), g(u,v))` that are fixed modulo `p^depth`,
/// over the points `(1, t)` and `(p s, 1)`.
fn valuation_pairs(f: (i128, i128), g: (i128, i128), p: i128, depth: u32) -> Vec<(u32, u32)> {
    let pk = p.pow(depth);
    let mut out = Vec::new();
    let mut push = |u: i128, v: i128| {
        let x = f.0 * u * u + f.1 * v * v;
        let y = g.0 * u * u + g.1 * v * v;
        if let (Some(ex), Some(ey)) = (val(x, p, depth), val(y, p, depth)) {
            out.push((ex, ey));
        }
    };
    for t in 0..pk {
        push(1, t);
    }
    for s in 0..pk / p {
        push(p * s, 1);
    }
    out
}

fn depth_for(s: &CanonicalSurface, p: i128) -> Option<u32> {
    let mut k = 0;
    let mut x = s.delta_prime * (s.m as i128) * (s.n as i128);
    for c in s.coefficients() {
        x *= c as i128;
    }
    while x % p == 0 {
        x /= p;
        k += 1;
    }
    let depth = k + 3;
    (p.pow(depth) <= 200_000).then_some(depth)
}

fn random_surfaces(seed: u64, count: usize) -> Vec<CanonicalSurface> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let primes = [3i64, 7, 11];
    let mut out = Vec::new();
    while out.len() < count {
        let mut t: [i64; 4] = [0; 4].map(|_| rng.gen_range(-40..=40));
        let q = primes[rng.gen_range(0..3)];
        match rng.gen_range(0..4) {
            0 => {
                t[0] *= q;
                t[1] *= q;
            }
            1 => {
                t[2] *= q;
                t[3] *= q;
            }
            2 => t[rng.gen_range(0..4)] *= q * q,
            _ => {}
        }
        if let Ok(s) = canonicalize(RawCoefficients::new(t[0], t[1], t[2], t[3])) {
            out.push(s);
        }
    }
    out
}

#[test]
fn odd_prime_criteria_match_search() {
    let mut checked = 0;
    for s in random_surfaces(5, 1500) {
        for p in [3u64, 7, 11] {
            let pi = p as i128;
            let mn = (s.m * s.n) as i128;
            if (mn * s.delta_prime) % pi != 0 {
                continue;
            }
            let Some(depth) = depth_for(&s, pi) else { continue };
            let [a, b, c, d] = s.coefficients().map(|x| x as i128);
            let raw = valuation_pairs((a, b), (c, d), pi, depth);
            let oracle_x = raw.iter().any(|&(x, y)| (x + y) % 2 == 0);
            assert_eq!(x_soluble_at_odd_p(&s, p), oracle_x, "{:?} at {p}", s.coefficients());
            if !oracle_x {
                continue;
            }
            let [a1, b1, c1, d1] = s.primed().map(|x| x as i128);
            let primed = valuation_pairs((a1, b1), (c1, d1), pi, depth);
            let set = torsor_exponent_set(&s, p).unwrap();
            let candidates: &[(u8, u8)] = if mn % pi == 0 { &[(1, 0), (0, 1)] } else { &[(0, 0), (1, 1)] };
            for &k in candidates {
                let oracle = primed
                    .iter()
                    .any(|&(x, y)| (x + k.0 as u32) % 2 == 0 && (y + k.1 as u32) % 2 == 0);
                assert_eq!(set.contains(k), oracle, "{:?} at {p}, k = {k:?}, set {:?}", s.coefficients(), set.pairs);
            }
            checked += 1;
        }
    }
    assert!(checked > 300, "only {checked} cases exercised");
}

#[test]
fn coprime_primes_are_trivially_soluble() {
    for s in random_surfaces(9, 300) {
        for p in [3u64, 7, 11, 19, 23] {
            if (s.m * s.n) % p != 0 {
                assert!(x_soluble_at_odd_p(&s, p));
                if (s.delta_prime % p as i128) != 0 {
                    assert_eq!(torsor_exponent_set(&s, p).unwrap().pairs, vec![(0, 0)]);
                }
            }
        }
    }
}
