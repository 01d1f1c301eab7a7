//! 2-adic machinery: the classes `D = {2^n (1 + 4m)}` and its complement,
//! closed-form deciders for the tuple sets `T1` (both forms in `D`) and `T2`
//! (product in `D`), and an independent residue-tree certifier.

mod decider;
mod search;
pub mod tables;
pub mod verify;

pub use decider::Residues;
pub use search::{certify_by_search, SearchMode, SearchVerdict};

use crate::error::{domain, Result};
use crate::model::CanonicalSurface;
use num_integer::Integer;
use serde::Serialize;

/// The two classes of nonzero 2-adic numbers modulo squares of units and
/// norms: odd part `1 mod 4` (`D`) or `3 mod 4` (`Dbar`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum TwoAdicClass {
    D,
    Dbar,
}

impl TwoAdicClass {
    pub fn of_odd_residue(odd: i128) -> Self {
        if odd.rem_euclid(4) == 1 {
            TwoAdicClass::D
        } else {
            TwoAdicClass::Dbar
        }
    }

    pub fn times(self, other: Self) -> Self {
        if self == other {
            TwoAdicClass::D
        } else {
            TwoAdicClass::Dbar
        }
    }
}

pub fn classify_d(x: i128) -> Result<TwoAdicClass> {
    if x == 0 {
        return Err(domain("classify_D of 0"));
    }
    Ok(TwoAdicClass::of_odd_residue(x >> x.trailing_zeros()))
}

/// Signs attached to a torsor at the real place and at 2: `e_i = eps_i mod 4`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct TorsorSignClass {
    pub eps1: i8,
    pub eps2: i8,
}

/// Whether some odd `u, v` give `r u^2 + s v^2` in the target class.
/// Only the residue `r + s mod 8` matters.
pub fn odd_pair_condition(r: i64, s: i64, target: TwoAdicClass) -> Result<bool> {
    if r % 2 == 0 || s % 2 == 0 {
        return Err(domain("odd_pair_condition expects odd r and s"));
    }
    Ok(decider::odd_sum_admits((r as i128 + s as i128).rem_euclid(8) as u8, target))
}

/// `(A, B, C, D)` with `A` odd and `B = 2^beta B'`, `C = 2^gamma C'`,
/// `D = 2^delta D'`, satisfying the normal-form constraints checked by
/// [`TwoAdicTuple::new`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TwoAdicTuple {
    pub a: i64,
    pub b_odd: i64,
    pub c_odd: i64,
    pub d_odd: i64,
    pub beta: u32,
    pub gamma: u32,
    pub delta: u32,
}

fn split2(x: i64) -> (i64, u32) {
    let v = x.trailing_zeros();
    (x >> v, v)
}

impl TwoAdicTuple {
    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        if a % 2 == 0 {
            return Err(domain("A must be odd"));
        }
        if b == 0 || c == 0 || d == 0 {
            return Err(domain("B, C, D must be nonzero"));
        }
        let upsilon = a as i128 * d as i128 - b as i128 * c as i128;
        if upsilon == 0 {
            return Err(domain("AD - BC must be nonzero"));
        }
        if a.gcd(&b) != 1 {
            return Err(domain("gcd(A,B) must be 1"));
        }
        if c.gcd(&d) != 1 {
            return Err(domain("gcd(C,D) must be 1"));
        }
        if !crate::arith::is_squarefree_u64(a.gcd(&c).unsigned_abs()) {
            return Err(domain("gcd(A,C) must be squarefree"));
        }
        if !crate::arith::is_squarefree_u64(b.gcd(&d).unsigned_abs()) {
            return Err(domain("gcd(B,D) must be squarefree"));
        }
        let (b_odd, beta) = split2(b);
        let (c_odd, gamma) = split2(c);
        let (d_odd, delta) = split2(d);
        if gamma.min(delta) != 0 {
            return Err(domain("min(gamma, delta) must be 0"));
        }
        if beta.min(delta) > 1 {
            return Err(domain("min(beta, delta) must be at most 1"));
        }
        Ok(TwoAdicTuple { a, b_odd, c_odd, d_odd, beta, gamma, delta })
    }

    pub fn b(&self) -> i128 {
        (self.b_odd as i128) << self.beta
    }

    pub fn c(&self) -> i128 {
        (self.c_odd as i128) << self.gamma
    }

    pub fn d(&self) -> i128 {
        (self.d_odd as i128) << self.delta
    }

    pub fn residues(&self) -> Residues {
        Residues::new(
            self.a, self.b_odd, self.c_odd, self.d_odd, self.beta, self.gamma, self.delta,
        )
    }

    /// Coefficients of `R1 = A u^2 + B v^2` and `R2 = C u^2 + D v^2`.
    pub fn forms(&self) -> ((i128, i128), (i128, i128)) {
        ((self.a as i128, self.b()), (self.c(), self.d()))
    }
}

/// Both `R1(u,v)` and `R2(u,v)` in `D` for some coprime `u, v` in `Z_2`.
pub fn in_ttot1(t: &TwoAdicTuple) -> bool {
    t.residues().in_t1()
}

/// `R1(u,v) R2(u,v)` in `D` for some coprime `u, v` in `Z_2`.
pub fn in_ttot2(t: &TwoAdicTuple) -> bool {
    t.residues().in_t2()
}

fn sigma_twist(s: &CanonicalSurface) -> i64 {
    if (s.m as u128 * s.n as u128) % 4 == 1 {
        1
    } else {
        -1
    }
}

/// 2-adic solubility of the surface: the twisted primed tuple lies in `T2`.
pub fn x_soluble_at_2(s: &CanonicalSurface) -> Result<bool> {
    let sigma = sigma_twist(s);
    let t = TwoAdicTuple::new(sigma * s.a1, sigma * s.b1, s.c1, s.d1).map_err(|e| {
        crate::error::Error::InternalInconsistency(format!(
            "twisted primed tuple of {:?} is not a valid 2-adic tuple: {e}",
            s.coefficients()
        ))
    })?;
    Ok(in_ttot2(&t))
}

/// 2-adic solubility of the torsor with sign class `signs`.
pub fn torsor_soluble_at_2(s: &CanonicalSurface, signs: TorsorSignClass) -> Result<bool> {
    let e1 = signs.eps1 as i64;
    let e2 = signs.eps2 as i64;
    let t = TwoAdicTuple::new(e1 * s.a1, e1 * s.b1, e2 * s.c1, e2 * s.d1).map_err(|e| {
        crate::error::Error::InternalInconsistency(format!(
            "torsor tuple of {:?} is not a valid 2-adic tuple: {e}",
            s.coefficients()
        ))
    })?;
    Ok(in_ttot1(&t))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tuple(a: i64, b: i64, c: i64, d: i64) -> TwoAdicTuple {
        TwoAdicTuple::new(a, b, c, d).unwrap()
    }

    #[test]
    fn classify_examples() {
        assert_eq!(classify_d(5).unwrap(), TwoAdicClass::D);
        assert_eq!(classify_d(12).unwrap(), TwoAdicClass::Dbar);
        assert_eq!(classify_d(-7).unwrap(), TwoAdicClass::D);
        assert!(classify_d(0).is_err());
    }

    #[test]
    fn odd_pair_examples() {
        assert!(odd_pair_condition(1, 1, TwoAdicClass::D).unwrap());
        assert!(!odd_pair_condition(3, 3, TwoAdicClass::D).unwrap());
        assert!(odd_pair_condition(3, 3, TwoAdicClass::Dbar).unwrap());
        assert!(!odd_pair_condition(1, 5, TwoAdicClass::D).unwrap());
        assert!(odd_pair_condition(2, 5, TwoAdicClass::D).is_err());
    }

    #[test]
    fn odd_pair_matches_search() {
        for r in (-25i64..=25).filter(|x| x % 2 != 0) {
            for s in (-25i64..=25).filter(|x| x % 2 != 0) {
                let mut seen = [false, false];
                for u in (1..32i64).step_by(2) {
                    for v in (1..32i64).step_by(2) {
                        let x = r * u * u + s * v * v;
                        if x == 0 {
                            continue;
                        }
                        match classify_d(x as i128).unwrap() {
                            TwoAdicClass::D => seen[0] = true,
                            TwoAdicClass::Dbar => seen[1] = true,
                        }
                    }
                }
                assert_eq!(odd_pair_condition(r, s, TwoAdicClass::D).unwrap(), seen[0], "{r} {s}");
                assert_eq!(odd_pair_condition(r, s, TwoAdicClass::Dbar).unwrap(), seen[1], "{r} {s}");
            }
        }
    }

    #[test]
    fn documented_examples() {
        assert!(in_ttot1(&tuple(3, 7, 1, 1)));
        assert!(!in_ttot1(&tuple(3, 7, 1, 5)));
        assert!(!in_ttot1(&tuple(1, -2, -1, 3)));
        assert!(in_ttot2(&tuple(1, -2, -1, 3)));
        assert!(!in_ttot2(&tuple(1, -111, -1, 112)));
        // (1,1,1,1) has AD - BC = 0, so only the residue-level predicate applies
        assert!(Residues::new(1, 1, 1, 1, 0, 0, 0).in_t2());
    }

    #[test]
    fn tuple_validation() {
        assert!(TwoAdicTuple::new(2, 1, 1, 1).is_err());
        assert!(TwoAdicTuple::new(1, 1, 1, 1).is_err());
        assert!(TwoAdicTuple::new(3, 3, 1, 2).is_err());
        assert!(TwoAdicTuple::new(1, 4, 1, 4).is_err());
        assert!(TwoAdicTuple::new(1, 2, 2, 1).is_ok());
        assert!(TwoAdicTuple::new(1, 3, 2, 4).is_err());
    }
}
