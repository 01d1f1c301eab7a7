//! Local solubility of the surface at the real place and at odd primes, and
//! the local data that pins down the candidate torsor: its admissible real
//! signs and, at each prime `p = 3 mod 4`, its admissible exponent pairs.

use crate::arith::{bracket_unchecked, valuation_unchecked, SymbolValue};
use crate::error::{Error, Result};
use crate::model::{CanonicalSurface, Sign};
use serde::{Serialize, Serializer};
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Place {
    Infinity,
    Prime(u64),
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Infinity => f.write_str("inf"),
            Place::Prime(p) => write!(f, "{p}"),
        }
    }
}

impl Serialize for Place {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LocalVerdict {
    pub soluble: bool,
    pub obstruction: Option<Place>,
}

/// Exponent pairs `(k1, k2)` for which the torsor with `e = (p^k1, p^k2)`
/// (times units) has `Q_p`-points. Sorted, without repeats.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct ExponentSet {
    pub prime: u64,
    pub pairs: Vec<(u8, u8)>,
}

impl ExponentSet {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn contains(&self, k: (u8, u8)) -> bool {
        self.pairs.contains(&k)
    }
}

/// `Q_R`-solubility: fails only for the sign pattern `(+,+,-,-)`.
pub fn real_soluble(s: &CanonicalSurface) -> bool {
    s.sign_pattern != [Sign::Plus, Sign::Plus, Sign::Minus, Sign::Minus]
}

fn plus(s: SymbolValue) -> bool {
    s == SymbolValue::PlusOne
}

/// `p`-adic data of a tuple at an odd prime: valuations of `a, b, c, d`, the
/// `p`-parts `k_m = min(v(a), v(b))`, `k_n = min(v(c), v(d))`, and the primed
/// tuple with those parts removed. Zero entries are not allowed.
#[derive(Debug, Clone, Copy)]
struct PrimeData {
    p: u64,
    k: u32,
    v: [u32; 4],
    primed: [i128; 4],
}

impl PrimeData {
    fn new(t: [i128; 4], p: u64) -> PrimeData {
        let v = t.map(|x| valuation_unchecked(x.unsigned_abs(), p as u128));
        let km = v[0].min(v[1]);
        let kn = v[2].min(v[3]);
        let pm = (p as i128).pow(km);
        let pn = (p as i128).pow(kn);
        let primed = [t[0] / pm, t[1] / pm, t[2] / pn, t[3] / pn];
        let v = [v[0] - km, v[1] - km, v[2] - kn, v[3] - kn];
        PrimeData { p, k: km + kn, v, primed }
    }

    fn bracket_ab(&self) -> SymbolValue {
        bracket_unchecked(-self.primed[0] * self.primed[1], self.p)
    }

    fn bracket_cd(&self) -> SymbolValue {
        bracket_unchecked(-self.primed[2] * self.primed[3], self.p)
    }
}

/// `Q_p`-solubility for an odd prime `p` and a tuple whose `p`-adic
/// valuations satisfy `min(v(a),v(b)), min(v(c),v(d)) <= 1` and not both
/// equal to 1. Entries must be nonzero.
pub fn x_soluble_at_odd_p_raw(t: [i128; 4], p: u64) -> Result<bool> {
    if p == 2 || p % 4 == 1 {
        return Ok(true);
    }
    if t.contains(&0) {
        return Err(Error::Domain("coefficients must be nonzero".into()));
    }
    let d = PrimeData::new(t, p);
    match d.k {
        0 => Ok(true),
        1 => {
            let equal_orders_ok = (d.v[0] != d.v[2] || d.v[0] == 0) && (d.v[1] != d.v[3] || d.v[1] == 0);
            Ok(equal_orders_ok && (plus(d.bracket_ab()) || plus(d.bracket_cd())))
        }
        _ => Err(Error::Domain(format!("v_{p}(mn) = {} exceeds 1", d.k))),
    }
}

/// `Q_p`-solubility for an odd prime `p`.
pub fn x_soluble_at_odd_p(s: &CanonicalSurface, p: u64) -> bool {
    if p % 4 == 1 || (s.m as u128 * s.n as u128) % p as u128 != 0 {
        return true;
    }
    x_soluble_at_odd_p_raw(s.coefficients().map(|x| x as i128), p)
        .expect("reduced surfaces have v_p(mn) <= 1")
}

fn odd_primes_of(x: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut m = x;
    let mut q = 3;
    while q * q <= m {
        if m % q == 0 {
            out.push(q);
            while m % q == 0 {
                m /= q;
            }
        }
        q += 2;
    }
    if m > 1 && m % 2 == 1 {
        out.push(m);
    }
    out
}

/// Checks the real place, then 2, then the primes dividing `mn` in
/// increasing order; reports the first failure.
pub fn x_locally_soluble(s: &CanonicalSurface) -> Result<LocalVerdict> {
    let fail = |place| Ok(LocalVerdict { soluble: false, obstruction: Some(place) });
    if !real_soluble(s) {
        return fail(Place::Infinity);
    }
    if !crate::twoadic::x_soluble_at_2(s)? {
        return fail(Place::Prime(2));
    }
    for p in odd_primes_of(s.m * s.n) {
        if !x_soluble_at_odd_p(s, p) {
            return fail(Place::Prime(p));
        }
    }
    Ok(LocalVerdict { soluble: true, obstruction: None })
}

/// Common signs of `(e1, e2)` for which the torsor has real points.
pub fn torsor_real_signs(s: &CanonicalSurface) -> Result<Vec<i8>> {
    use Sign::{Minus as M, Plus as P};
    let delta = if s.delta > 0 { 1 } else { -1 };
    let signs = match s.sign_pattern {
        [P, P, P, P] | [P, P, P, M] | [P, M, P, P] | [P, P, M, P] => vec![1],
        [P, M, P, M] => vec![1, -1],
        [P, M, M, P] => vec![delta],
        [P, M, M, M] => vec![-1],
        _ => {
            return Err(Error::Precondition(format!(
                "{:?} has no real points",
                s.coefficients()
            )))
        }
    };
    Ok(signs)
}

/// Admissible exponent pairs at `p = 3 mod 4` for a tuple satisfying the
/// reduced-representative valuation constraints at `p`. The surface must be
/// `Q_p`-soluble.
pub fn torsor_exponent_set_raw(t: [i128; 4], p: u64) -> Result<ExponentSet> {
    if p % 4 != 3 {
        return Err(Error::Domain(format!("{p} is not 3 mod 4")));
    }
    if t.contains(&0) {
        return Err(Error::Domain("coefficients must be nonzero".into()));
    }
    let d = PrimeData::new(t, p);
    let ab = plus(d.bracket_ab());
    let cd = plus(d.bracket_cd());
    let [a1, b1, c1, d1] = d.primed;
    let dp = a1 * d1 - b1 * c1;
    let mut pairs = Vec::new();
    match d.k {
        0 => {
            pairs.push((0, 0));
            if ab && cd && dp % p as i128 == 0 {
                pairs.push((1, 1));
            }
        }
        1 => {
            if !ab && !cd {
                return Err(Error::Precondition(format!("{t:?} is not Q_{p}-soluble")));
            }
            // even order >= 2 on one side against order 1 on the other
            let blocks = |x: u32, y: u32| x >= 2 && x % 2 == 0 && y == 1;
            let [va, vb, vc, vd] = d.v;
            if !cd || (ab && !blocks(va, vc) && !blocks(vb, vd)) {
                pairs.push((1, 0));
            }
            if !ab || (cd && !blocks(vc, va) && !blocks(vd, vb)) {
                pairs.push((0, 1));
            }
        }
        k => return Err(Error::Domain(format!("v_{p}(mn) = {k} exceeds 1"))),
    }
    if pairs.is_empty() {
        return Err(Error::InternalInconsistency(format!(
            "no torsor over Q_{p} for the locally soluble tuple {t:?}"
        )));
    }
    pairs.sort_unstable();
    Ok(ExponentSet { prime: p, pairs })
}

pub fn torsor_exponent_set(s: &CanonicalSurface, p: u64) -> Result<ExponentSet> {
    torsor_exponent_set_raw(s.coefficients().map(|x| x as i128), p)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn surface(a: i64, b: i64, c: i64, d: i64) -> CanonicalSurface {
        CanonicalSurface::from_reduced(a, b, c, d).unwrap()
    }

    #[test]
    fn real_examples() {
        assert!(!real_soluble(&surface(1, 2, -1, -3)));
        assert!(real_soluble(&surface(1, -2, -1, 3)));
        assert!(real_soluble(&surface(1, 1, 1, 2)));
    }

    #[test]
    fn odd_prime_examples() {
        assert!(x_soluble_at_odd_p(&surface(3, 15, 1, 4), 3));
        assert!(!x_soluble_at_odd_p(&surface(3, 3, 1, 4), 3));
        assert!(x_soluble_at_odd_p(&surface(1, -2, -1, 3), 3));
    }

    #[test]
    fn local_examples() {
        let v = x_locally_soluble(&surface(1, -2, -1, 3)).unwrap();
        assert!(v.soluble && v.obstruction.is_none());
        let v = x_locally_soluble(&surface(1, 2, -1, -1)).unwrap();
        assert_eq!(v.obstruction, Some(Place::Infinity));
        let v = x_locally_soluble(&surface(1, -111, -1, 112)).unwrap();
        assert_eq!(v.obstruction, Some(Place::Prime(2)));
    }

    #[test]
    fn real_sign_examples() {
        assert_eq!(torsor_real_signs(&surface(1, -2, -1, 3)).unwrap(), vec![1]);
        assert_eq!(torsor_real_signs(&surface(1, -2, 1, -3)).unwrap(), vec![1, -1]);
        assert_eq!(torsor_real_signs(&surface(1, 1, 1, 2)).unwrap(), vec![1]);
        assert!(torsor_real_signs(&surface(1, 2, -1, -3)).is_err());
    }

    #[test]
    fn exponent_examples() {
        let e = torsor_exponent_set(&surface(1, 2, 1, 5), 3).unwrap();
        assert_eq!(e.pairs, vec![(0, 0), (1, 1)]);
        let e = torsor_exponent_set(&surface(1, 1, 1, 4), 3).unwrap();
        assert_eq!(e.pairs, vec![(0, 0)]);
        let e = torsor_exponent_set(&surface(3, 15, 1, 4), 3).unwrap();
        assert_eq!(e.pairs, vec![(1, 0)]);
    }

    #[test]
    fn real_signs_match_sampling() {
        for t in sign_tuples(&[-3, -2, -1, 1, 2, 3]) {
            let Ok(s) = CanonicalSurface::from_reduced(t[0], t[1], t[2], t[3]) else { continue };
            if !real_soluble(&s) {
                continue;
            }
            let mut seen = Vec::new();
            for i in 0..2000 {
                let th = i as f64 * std::f64::consts::PI / 2000.0;
                let (u, v) = (th.cos(), th.sin());
                let q1 = s.a as f64 * u * u + s.b as f64 * v * v;
                let q2 = s.c as f64 * u * u + s.d as f64 * v * v;
                for e in [1i8, -1] {
                    if q1 * e as f64 > 1e-9 && q2 * e as f64 > 1e-9 && !seen.contains(&e) {
                        seen.push(e);
                    }
                }
            }
            seen.sort_unstable_by(|x, y| y.cmp(x));
            assert_eq!(torsor_real_signs(&s).unwrap(), seen, "{t:?}");
        }
    }

    fn sign_tuples(xs: &[i64]) -> Vec<[i64; 4]> {
        let mut out = Vec::new();
        for &a in xs.iter().filter(|&&a| a > 0) {
            for &b in xs {
                for &c in xs {
                    for &d in xs {
                        out.push([a, b, c, d]);
                    }
                }
            }
        }
        out
    }
}
