//! From local data to a verdict. Either two torsors are locally soluble
//! everywhere (and the surface has a rational point), or exactly one
//! candidate survives away from 2 and its 2-adic solubility decides.

use crate::arith::{factorize, sum_two_squares, SquareSumKernel};
use crate::error::{Error, Result};
use crate::localsolve::{torsor_exponent_set, torsor_real_signs, x_locally_soluble, Place};
use crate::model::CanonicalSurface;
use crate::twoadic::{torsor_soluble_at_2, TorsorSignClass};
use num_integer::Integer;
use serde::Serialize;
use std::collections::BTreeMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ShortcutReason {
    /// Both real signs are admissible.
    RealBothSigns,
    /// Two exponent pairs are admissible at this prime.
    TwoExponentChoices(u64),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TorsorAssembly {
    Shortcut(ShortcutReason),
    Unique {
        sign: i8,
        /// Primes with a nonzero exponent pair.
        exponents: BTreeMap<u64, (u8, u8)>,
        sign_class: TorsorSignClass,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PointReason {
    ShortcutReal,
    ShortcutExponents(u64),
    TorsorEverywhereSoluble,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Decision {
    LocalObstruction(Place),
    RationalPoint(PointReason),
    /// Everywhere locally soluble, but the only candidate torsor fails at 2.
    HasseFailure { epsilon: TorsorSignClass },
}

impl Decision {
    pub fn status(&self) -> &'static str {
        match self {
            Decision::LocalObstruction(_) => "local_obstruction",
            Decision::RationalPoint(_) => "rational_point",
            Decision::HasseFailure { .. } => "hasse_failure",
        }
    }
}

/// Primes `3 mod 4` dividing `m n Delta'`, ascending.
pub fn analysed_primes(s: &CanonicalSurface) -> Result<Vec<u64>> {
    let mut primes: Vec<u64> = Vec::new();
    for x in [s.m as i128, s.n as i128, s.delta_prime] {
        for p in factorize(x)?.primes() {
            if p % 4 == 3 && !primes.contains(&(p as u64)) {
                primes.push(p as u64);
            }
        }
    }
    primes.sort_unstable();
    Ok(primes)
}

/// The torsor forced by the local conditions away from 2, or the shortcut
/// showing the surface has a rational point. The surface must be
/// everywhere locally soluble.
pub fn assemble_unique_torsor(s: &CanonicalSurface) -> Result<TorsorAssembly> {
    let signs = torsor_real_signs(s)?;
    if signs.len() == 2 {
        return Ok(TorsorAssembly::Shortcut(ShortcutReason::RealBothSigns));
    }
    let sign = signs[0];
    let mut exponents = BTreeMap::new();
    // e_i mod 4, starting from the real sign
    let mut e = [sign as i64, sign as i64];
    for p in analysed_primes(s)? {
        let set = torsor_exponent_set(s, p)?;
        if set.len() == 2 {
            return Ok(TorsorAssembly::Shortcut(ShortcutReason::TwoExponentChoices(p)));
        }
        let k = set.pairs[0];
        if k != (0, 0) {
            exponents.insert(p, k);
        }
        for (ei, ki) in e.iter_mut().zip([k.0, k.1]) {
            if ki == 1 {
                *ei = (*ei * p as i64).rem_euclid(4);
            }
        }
    }
    let eps = e.map(|x| if x.rem_euclid(4) == 1 { 1 } else { -1 });
    Ok(TorsorAssembly::Unique {
        sign,
        exponents,
        sign_class: TorsorSignClass { eps1: eps[0], eps2: eps[1] },
    })
}

pub fn decide(s: &CanonicalSurface) -> Result<Decision> {
    let local = x_locally_soluble(s)?;
    if let Some(place) = local.obstruction {
        return Ok(Decision::LocalObstruction(place));
    }
    Ok(match assemble_unique_torsor(s)? {
        TorsorAssembly::Shortcut(ShortcutReason::RealBothSigns) => {
            Decision::RationalPoint(PointReason::ShortcutReal)
        }
        TorsorAssembly::Shortcut(ShortcutReason::TwoExponentChoices(p)) => {
            Decision::RationalPoint(PointReason::ShortcutExponents(p))
        }
        TorsorAssembly::Unique { sign_class, .. } => {
            if torsor_soluble_at_2(s, sign_class)? {
                Decision::RationalPoint(PointReason::TorsorEverywhereSoluble)
            } else {
                Decision::HasseFailure { epsilon: sign_class }
            }
        }
    })
}

/// A point `(u, v)` with `t = Q1(u,v) Q2(u,v) = y^2 + z^2 > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub u: i128,
    pub v: i128,
    pub t: u128,
    pub y: u128,
    pub z: u128,
}

/// Largest `|Q1|` or `|Q2|` over the search box.
fn form_bound(s: &CanonicalSurface, height: u64) -> Option<u64> {
    let h2 = (height as u128).checked_mul(height as u128)?;
    let m = [s.a.unsigned_abs() + s.b.unsigned_abs(), s.c.unsigned_abs() + s.d.unsigned_abs()]
        .into_iter()
        .max()? as u128;
    u64::try_from(m.checked_mul(h2)?).ok()
}

/// Scans coprime `0 <= u, v <= height` by increasing `max(u, v)`, then `v`,
/// then `u`, and returns the first point where `Q1 Q2` is a positive sum of
/// two squares.
pub fn witness_search(s: &CanonicalSurface, height: u64) -> Result<Option<Witness>> {
    let bound = form_bound(s, height).ok_or(Error::Overflow("witness_search"))?;
    let kernel = if bound <= SquareSumKernel::MAX_BOUND {
        Some(SquareSumKernel::new(bound.max(1))?)
    } else {
        None
    };
    witness_search_with(s, height, kernel.as_ref())
}

/// As [`witness_search`], with a caller-supplied kernel; values beyond the
/// kernel's bound are settled by factorization.
pub fn witness_search_with(
    s: &CanonicalSurface,
    height: u64,
    kernel: Option<&SquareSumKernel>,
) -> Result<Option<Witness>> {
    let h = height as i128;
    let check = |u: i128, v: i128| -> Result<Option<Witness>> {
        let (q1, q2) = (s.q1(u, v), s.q2(u, v));
        if q1 == 0 || q2 == 0 || (q1 > 0) != (q2 > 0) || u.gcd(&v) != 1 {
            return Ok(None);
        }
        let (x, y) = (q1.unsigned_abs(), q2.unsigned_abs());
        let is_sum = match kernel {
            Some(k) if x <= k.bound() as u128 && y <= k.bound() as u128 => {
                k.product_is_sum(x as u64, y as u64)
            }
            _ => crate::arith::is_sum_of_two_squares(x * y)?,
        };
        if !is_sum {
            return Ok(None);
        }
        let t = x * y;
        let (ys, zs) = sum_two_squares(t)?.ok_or_else(|| {
            Error::InternalInconsistency(format!("{t} passed the kernel test but has no representation"))
        })?;
        Ok(Some(Witness { u, v, t, y: ys, z: zs }))
    };
    for mx in 0..=h {
        let row = (0..mx).map(|v| (mx, v));
        let top = (0..=mx).map(|u| (u, mx));
        for (u, v) in row.chain(top) {
            if let Some(w) = check(u, v)? {
                return Ok(Some(w));
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::twoadic::TorsorSignClass;

    fn surface(a: i64, b: i64, c: i64, d: i64) -> CanonicalSurface {
        CanonicalSurface::from_reduced(a, b, c, d).unwrap()
    }

    #[test]
    fn assembly_examples() {
        assert_eq!(
            assemble_unique_torsor(&surface(1, -2, -1, 3)).unwrap(),
            TorsorAssembly::Unique {
                sign: 1,
                exponents: BTreeMap::new(),
                sign_class: TorsorSignClass { eps1: 1, eps2: 1 }
            }
        );
        assert_eq!(
            assemble_unique_torsor(&surface(1, 2, 1, 5)).unwrap(),
            TorsorAssembly::Shortcut(ShortcutReason::TwoExponentChoices(3))
        );
        assert_eq!(
            assemble_unique_torsor(&surface(3, 15, 1, 4)).unwrap(),
            TorsorAssembly::Unique {
                sign: 1,
                exponents: BTreeMap::from([(3, (1, 0))]),
                sign_class: TorsorSignClass { eps1: -1, eps2: 1 }
            }
        );
    }

    #[test]
    fn decide_examples() {
        assert!(matches!(decide(&surface(1, -2, -1, 3)).unwrap(), Decision::HasseFailure { .. }));
        assert!(matches!(decide(&surface(1, -1, -1, 2)).unwrap(), Decision::RationalPoint(_)));
        assert_eq!(
            decide(&surface(1, 2, -1, -1)).unwrap(),
            Decision::LocalObstruction(Place::Infinity)
        );
    }

    #[test]
    fn witness_examples() {
        let w = witness_search(&surface(1, -1, -1, 2), 10).unwrap().unwrap();
        assert_eq!((w.u, w.v, w.t), (9, 7, 544));
        assert_eq!((w.y, w.z), (12, 20));
        assert_eq!(witness_search(&surface(1, -2, -1, 3), 100).unwrap(), None);
    }
}
