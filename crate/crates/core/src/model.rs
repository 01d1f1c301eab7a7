//! Surfaces `Y^2 + Z^2 = (a T^2 + b)(c T^2 + d)`, their reduced
//! representatives and the primed decomposition.
//!
//! The coefficient group acts by scaling all four coefficients, `(a, c)` by
//! squares, `(b, d)` by squares, `(a, b)` and `(c, d)` independently by norms
//! from `Q(i)`, and by the swaps `(c, d, a, b)` and `(b, a, d, c)`. Modulo
//! signs, a tuple is a vector of valuations at each prime, and the action
//! moves that vector inside a coset of a fixed lattice. [`canonicalize`]
//! picks one reduced vector per coset and prime, then the least swap image.

use crate::arith::{factorize, in_class_b_u64, is_squarefree_u64};
use crate::error::{Error, Result};
use num_integer::Integer;
use serde::Serialize;
use std::collections::BTreeSet;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Sign {
    pub fn of(x: i128) -> Sign {
        if x < 0 {
            Sign::Minus
        } else {
            Sign::Plus
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        })
    }
}

/// Coefficients as supplied by a user.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct RawCoefficients {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

impl RawCoefficients {
    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Self {
        RawCoefficients { a, b, c, d }
    }

    pub fn as_array(&self) -> [i64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    /// Checks `abcd != 0` and `ad - bc != 0`.
    pub fn validate(self) -> Result<Self> {
        if self.a == 0 || self.b == 0 || self.c == 0 || self.d == 0 {
            return Err(Error::ZeroCoefficient);
        }
        if self.a as i128 * self.d as i128 == self.b as i128 * self.c as i128 {
            return Err(Error::DegenerateDeterminant);
        }
        Ok(self)
    }
}

/// A reduced representative: primitive, `a > 0` odd, `gcd(a,b)` and
/// `gcd(c,d)` squarefree with primes `3 mod 4`, `gcd(a,c)` and `gcd(b,d)`
/// squarefree. Fields `a1..d1` hold the primed tuple `a = m a1`, ...
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct CanonicalSurface {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
    /// 0 when `b` is even, 1 otherwise.
    pub iota: u8,
    pub m: u64,
    pub n: u64,
    pub a1: i64,
    pub b1: i64,
    pub c1: i64,
    pub d1: i64,
    pub delta: i128,
    pub delta_prime: i128,
    pub sign_pattern: [Sign; 4],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Decomposition {
    pub m: u64,
    pub n: u64,
    pub primed: [i64; 4],
    pub delta: i128,
    pub delta_prime: i128,
}

impl CanonicalSurface {
    /// Accepts a tuple that is already a reduced representative and caches its
    /// decomposition. Fails with `InvariantViolation` naming the first broken
    /// condition.
    pub fn from_reduced(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        RawCoefficients::new(a, b, c, d).validate()?;
        let bad = |msg: &str| Err(Error::InvariantViolation(format!("({a},{b},{c},{d}): {msg}")));
        if a <= 0 || a % 2 == 0 {
            return bad("a must be positive and odd");
        }
        let m = a.gcd(&b).unsigned_abs();
        let n = c.gcd(&d).unsigned_abs();
        if m.gcd(&n) != 1 {
            return bad("tuple is not primitive");
        }
        if !in_class_b_u64(m) {
            return bad("gcd(a,b) must be squarefree with primes 3 mod 4");
        }
        if !in_class_b_u64(n) {
            return bad("gcd(c,d) must be squarefree with primes 3 mod 4");
        }
        if !is_squarefree_u64(a.gcd(&c).unsigned_abs()) {
            return bad("gcd(a,c) must be squarefree");
        }
        if !is_squarefree_u64(b.gcd(&d).unsigned_abs()) {
            return bad("gcd(b,d) must be squarefree");
        }
        Ok(Self::assemble(a, b, c, d, m, n))
    }

    fn assemble(a: i64, b: i64, c: i64, d: i64, m: u64, n: u64) -> Self {
        let (mi, ni) = (m as i64, n as i64);
        let (a1, b1, c1, d1) = (a / mi, b / mi, c / ni, d / ni);
        CanonicalSurface {
            a,
            b,
            c,
            d,
            iota: if b % 2 == 0 { 0 } else { 1 },
            m,
            n,
            a1,
            b1,
            c1,
            d1,
            delta: a as i128 * d as i128 - b as i128 * c as i128,
            delta_prime: a1 as i128 * d1 as i128 - b1 as i128 * c1 as i128,
            sign_pattern: [a, b, c, d].map(|x| Sign::of(x as i128)),
        }
    }

    pub fn coefficients(&self) -> [i64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn primed(&self) -> [i64; 4] {
        [self.a1, self.b1, self.c1, self.d1]
    }

    /// `Q1(u,v) = a u^2 + b v^2`.
    pub fn q1(&self, u: i128, v: i128) -> i128 {
        self.a as i128 * u * u + self.b as i128 * v * v
    }

    /// `Q2(u,v) = c u^2 + d v^2`.
    pub fn q2(&self, u: i128, v: i128) -> i128 {
        self.c as i128 * u * u + self.d as i128 * v * v
    }

    pub fn q1_primed(&self, u: i128, v: i128) -> i128 {
        self.a1 as i128 * u * u + self.b1 as i128 * v * v
    }

    pub fn q2_primed(&self, u: i128, v: i128) -> i128 {
        self.c1 as i128 * u * u + self.d1 as i128 * v * v
    }
}

pub fn decompose(s: &CanonicalSurface) -> Decomposition {
    Decomposition {
        m: s.m,
        n: s.n,
        primed: s.primed(),
        delta: s.delta,
        delta_prime: s.delta_prime,
    }
}

/// Checks every representative invariant, including the two linear identities
/// linking the primed forms, on a grid of sample points.
pub fn audit(s: &CanonicalSurface) -> Result<()> {
    let again = CanonicalSurface::from_reduced(s.a, s.b, s.c, s.d)?;
    if again != *s {
        return Err(Error::InvariantViolation("cached decomposition is stale".into()));
    }
    if s.a1.gcd(&s.b1) != 1 || s.c1.gcd(&s.d1) != 1 {
        return Err(Error::InvariantViolation("primed pairs must be coprime".into()));
    }
    let dp = s.delta_prime;
    for u in -5i128..5 {
        for v in -5i128..5 {
            let (q1, q2) = (s.q1_primed(u, v), s.q2_primed(u, v));
            if s.d1 as i128 * q1 - s.b1 as i128 * q2 != dp * u * u
                || -(s.c1 as i128) * q1 + s.a1 as i128 * q2 != dp * v * v
            {
                return Err(Error::InvariantViolation(format!(
                    "primed identity fails at ({u},{v})"
                )));
            }
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// canonicalization

type Valuations = [u32; 4];

fn lattice_contains(p: u128, w: [i64; 4]) -> bool {
    if w[0] - w[1] - w[2] + w[3] != 0 {
        return false;
    }
    if p % 4 == 3 {
        let parity = w.map(|x| x.rem_euclid(2));
        parity == [0, 0, 0, 0] || parity == [1, 1, 1, 1]
    } else {
        (w[0] - w[1]) % 2 == 0
    }
}

fn in_region(p: u128, w: Valuations) -> bool {
    let cap = if p % 4 == 3 { 1 } else { 0 };
    w.iter().min() == Some(&0)
        && w[0].min(w[2]) <= 1
        && w[1].min(w[3]) <= 1
        && w[0].min(w[1]) <= cap
        && w[2].min(w[3]) <= cap
}

/// The preferred reduced valuation vector in the coset of `v`.
fn reduce_valuations(p: u128, v: Valuations) -> Result<Valuations> {
    let vi = v.map(|x| x as i64);
    let inv = vi[0] - vi[1] - vi[2] + vi[3];
    let bound = inv.unsigned_abs() as i64 + 3;
    let mut best: Option<(u32, u32, Valuations)> = None;
    for wa in 0..=bound {
        for wb in 0..=bound {
            for wc in 0..=bound {
                let wd = inv - wa + wb + wc;
                if wd < 0 || wd > bound {
                    continue;
                }
                let w = [wa as u32, wb as u32, wc as u32, wd as u32];
                if !in_region(p, w) {
                    continue;
                }
                let diff = [wa - vi[0], wb - vi[1], wc - vi[2], wd - vi[3]];
                if !lattice_contains(p, diff) {
                    continue;
                }
                let sum: u32 = w.iter().sum();
                let key = if p == 2 { (w[0], sum, w) } else { (0, sum, w) };
                if best.map_or(true, |b| key < b) {
                    best = Some(key);
                }
            }
        }
    }
    best.map(|(_, _, w)| w).ok_or_else(|| {
        Error::InternalInconsistency(format!("no reduced valuation vector for {v:?} at {p}"))
    })
}

fn normal_form(t: [i64; 4], primes: &BTreeSet<u128>) -> Result<[i64; 4]> {
    let mut out: [i128; 4] = t.map(|x| x.signum() as i128);
    for &p in primes {
        let v = t.map(|x| crate::arith::valuation_unchecked(x.unsigned_abs() as u128, p));
        let w = reduce_valuations(p, v)?;
        for i in 0..4 {
            let factor = (p as i128)
                .checked_pow(w[i])
                .ok_or(Error::Overflow("canonicalize"))?;
            out[i] = out[i].checked_mul(factor).ok_or(Error::Overflow("canonicalize"))?;
        }
    }
    if out[0] < 0 {
        out = out.map(|x| -x);
    }
    let mut res = [0i64; 4];
    for i in 0..4 {
        res[i] = i64::try_from(out[i]).map_err(|_| Error::Overflow("canonicalize"))?;
    }
    Ok(res)
}

fn order_key(t: &[i64; 4]) -> ([u64; 4], [i64; 4]) {
    (t.map(|x| x.unsigned_abs()), *t)
}

/// Reduced representative of the orbit of `raw` under the coefficient group.
/// Constant on orbits; the chosen tuple minimises `(|a|,|b|,|c|,|d|)` and then
/// `(a,b,c,d)` among the swap images with `a` odd.
pub fn canonicalize(raw: RawCoefficients) -> Result<CanonicalSurface> {
    let raw = raw.validate()?;
    let t = raw.as_array();
    let mut primes = BTreeSet::new();
    for x in t {
        for p in factorize(x as i128)?.primes() {
            primes.insert(p);
        }
    }
    let images = [
        t,
        [t[2], t[3], t[0], t[1]],
        [t[1], t[0], t[3], t[2]],
        [t[3], t[2], t[1], t[0]],
    ];
    let mut best: Option<[i64; 4]> = None;
    for g in images {
        let nf = normal_form(g, &primes)?;
        if nf[0] % 2 == 0 {
            continue;
        }
        if best.map_or(true, |b| order_key(&nf) < order_key(&b)) {
            best = Some(nf);
        }
    }
    let best = best.ok_or_else(|| {
        Error::InternalInconsistency(format!("no swap image of {t:?} has odd leading coefficient"))
    })?;
    CanonicalSurface::from_reduced(best[0], best[1], best[2], best[3]).map_err(|e| {
        Error::InternalInconsistency(format!("normal form of {t:?} is not reduced: {e}"))
    })
}

/// Uses `raw` as is when it already is a reduced representative, otherwise
/// canonicalizes it.
pub fn reduce(raw: RawCoefficients) -> Result<CanonicalSurface> {
    let raw = raw.validate()?;
    match CanonicalSurface::from_reduced(raw.a, raw.b, raw.c, raw.d) {
        Ok(s) => Ok(s),
        Err(Error::InvariantViolation(_)) => canonicalize(raw),
        Err(e) => Err(e),
    }
}
