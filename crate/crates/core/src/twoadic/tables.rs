//! Case tables for a single binary form `r u^2 + s v^2` with
//! `u = 2^mu u'`, `v = 2^nu v'`, `u', v'` odd. The table deciders do not call
//! these; tests use them to cross-check the case lists.

use super::TwoAdicClass;

fn split(x: i64) -> (i64, u32) {
    let v = x.trailing_zeros();
    (x >> v, v)
}

fn is(x: i64, r: i64) -> bool {
    x.rem_euclid(4) == r
}

/// Whether some odd `u', v'` put `r (2^mu u')^2 + s (2^nu v')^2` in `target`.
/// Covers the two table shapes: `s` odd with `mu = 0`, and `r` odd with
/// `nu = 0`. Returns `None` outside them.
pub fn table_admits(r: i64, s: i64, mu: u32, nu: u32, target: TwoAdicClass) -> Option<bool> {
    if r == 0 || s == 0 {
        return None;
    }
    let (r1, rho) = split(r);
    let (s1, sigma) = split(s);
    if rho.min(sigma) != 0 {
        return None;
    }
    if sigma == 0 && mu == 0 {
        Some(one_sided(r1, rho, s, nu, target))
    } else if rho == 0 && nu == 0 {
        Some(one_sided(s1, sigma, r, mu, target))
    } else {
        None
    }
}

/// `x = 2^k x'` times an odd square plus `y` (odd) times `4^j` times an odd square.
fn one_sided(x1: i64, k: u32, y: i64, j: u32, target: TwoAdicClass) -> bool {
    let (one, three, even_sums): (i64, i64, [i64; 3]) = match target {
        TwoAdicClass::D => (1, 3, [2, 4, 0]),
        TwoAdicClass::Dbar => (3, 1, [6, 4, 0]),
    };
    let (k, two_j) = (k as i64, 2 * j as i64);
    if two_j <= k - 2 {
        is(y, one)
    } else if two_j >= k + 2 {
        is(x1, one)
    } else if two_j == k + 1 {
        is(x1, three)
    } else if two_j == k - 1 {
        is(y, three)
    } else {
        even_sums.contains(&(x1 + y).rem_euclid(8))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::twoadic::classify_d;

    #[test]
    fn tables_match_search() {
        let odd: Vec<i64> = (1..96).step_by(2).collect();
        for r in -20i64..=20 {
            for s in -20i64..=20 {
                if r == 0 || s == 0 || (r % 2 == 0 && s % 2 == 0) {
                    continue;
                }
                for mu in 0..4u32 {
                    for nu in 0..4u32 {
                        for target in [TwoAdicClass::D, TwoAdicClass::Dbar] {
                            let Some(expected) = table_admits(r, s, mu, nu, target) else {
                                continue;
                            };
                            let found = odd.iter().any(|&u1| {
                                odd.iter().any(|&v1| {
                                    let u = (u1 << mu) as i128;
                                    let v = (v1 << nu) as i128;
                                    let x = r as i128 * u * u + s as i128 * v * v;
                                    x != 0 && classify_d(x).unwrap() == target
                                })
                            });
                            assert_eq!(found, expected, "r={r} s={s} mu={mu} nu={nu} {target:?}");
                        }
                    }
                }
            }
        }
    }
}
