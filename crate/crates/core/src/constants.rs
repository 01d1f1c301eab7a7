//! Density constants: exact local factors, Euler products with explicit
//! tail bounds, the exact 2-adic density and brute-force local densities.

use crate::arith::primes_up_to;
use crate::error::{domain, Error, Result};
use crate::twoadic::Residues;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;
use std::collections::HashMap;
use twofloat::TwoFloat;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FactorKind {
    /// `(1 - 1/p)^2 (1 + 2/p + 1/p^2 - 2/p^4)`
    AP,
    /// `(1 + 1/p)^2 (1 + 2/p + 3/p^2 + 4/p^3 - 4/p^5)`
    BP,
    /// Local factor at primes dividing `mn`.
    CPPrime,
    /// `1 - (6 - 9/p^2 + 4/p^4) / (p^4 b_p)`
    RatioFactor,
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Evaluates `sum c_i u^i` for rational coefficients given as `(num, den)`.
fn poly(u: &BigRational, coeffs: &[(i64, i64)]) -> BigRational {
    coeffs.iter().rev().fold(BigRational::zero(), |acc, &(n, d)| acc * u + rat(n, d))
}

pub fn local_factor(p: u64, kind: FactorKind) -> BigRational {
    let u = rat(1, p as i64);
    let one = BigRational::one();
    let minus = &one - &u;
    let plus = &one + &u;
    let b_p = || &plus * &plus * poly(&u, &[(1, 1), (2, 1), (3, 1), (4, 1), (0, 1), (-4, 1)]);
    match kind {
        FactorKind::AP => &minus * &minus * poly(&u, &[(1, 1), (2, 1), (1, 1), (0, 1), (-2, 1)]),
        FactorKind::BP => b_p(),
        FactorKind::CPPrime => {
            let q = poly(&u, &[(1, 1), (4, 1), (3, 1), (2, 1), (3, 2), (-2, 1), (-2, 1)]);
            &minus * &minus / (&plus * &plus) * q
        }
        FactorKind::RatioFactor => {
            let u4 = u.pow(4);
            one - poly(&u, &[(6, 1), (0, 1), (-9, 1), (0, 1), (4, 1)]) * u4 / b_p()
        }
    }
}

/// The weighted sum over the exponent set for `p | m`, weighting a tuple of
/// exponents by 3/4 when all are even: `c_p' - (1 - 1/p)^4 / 4`. The closed
/// form for `c_p'` weights the zero tuple by 1 instead. With this value,
/// `a_p + 2 c / p^2` is the local density that [`density_bruteforce`]
/// converges to.
pub fn c_p_prime_from_exponents(p: u64) -> BigRational {
    let m = BigRational::one() - rat(1, p as i64);
    local_factor(p, FactorKind::CPPrime) - m.pow(4) * rat(1, 4)
}

/// `7 * 4751 / (2^8 * 3^2 * 17)`, the rational prefactor of the local-to-total ratio.
pub fn hasse_prefactor() -> BigRational {
    rat(7 * 4751, 256 * 9 * 17)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ProductKind {
    Tau,
    TauLoc,
    Thm12Ratio,
    HasseRatio,
}

impl ProductKind {
    pub fn name(self) -> &'static str {
        match self {
            ProductKind::Tau => "tau",
            ProductKind::TauLoc => "tau_loc",
            ProductKind::Thm12Ratio => "thm12_ratio",
            ProductKind::HasseRatio => "hasse_ratio",
        }
    }
}

/// A truncated Euler product. `tail_bound` bounds `|log|` of the omitted
/// factors over `p > prime_bound`; `rounding_bound` bounds the relative
/// floating-point error of `value`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EulerProductValue {
    pub kind: ProductKind,
    pub value: TwoFloat,
    pub prime_bound: u64,
    pub tail_bound: f64,
    pub rounding_bound: f64,
}

impl EulerProductValue {
    pub fn to_f64(&self) -> f64 {
        self.value.hi() + self.value.lo()
    }

    /// Total relative uncertainty: omitted tail plus rounding.
    pub fn relative_error(&self) -> f64 {
        self.tail_bound.exp_m1() + self.rounding_bound
    }

    /// Decimal places that the error bound does not reach.
    pub fn reliable_places(&self) -> usize {
        let err = self.relative_error() * self.to_f64().abs();
        ((-err.log10()).floor().max(0.0) as usize).min(30)
    }

    /// The value truncated to its reliable decimal places.
    pub fn decimal(&self) -> String {
        decimal_string(&twofloat_to_rational(self.value), self.reliable_places())
    }
}

pub(crate) fn twofloat_to_rational(x: TwoFloat) -> BigRational {
    let hi = BigRational::from_float(x.hi()).unwrap_or_else(BigRational::zero);
    let lo = BigRational::from_float(x.lo()).unwrap_or_else(BigRational::zero);
    hi + lo
}

fn rational_to_twofloat(r: &BigRational) -> TwoFloat {
    let hi = r.to_f64().unwrap_or(f64::NAN);
    let rest = r - BigRational::from_float(hi).unwrap_or_else(BigRational::zero);
    let lo = rest.to_f64().unwrap_or(0.0);
    TwoFloat::new_add(hi, lo)
}

/// `r` rounded to `places` decimal places (truncated toward zero).
pub fn decimal_string(r: &BigRational, places: usize) -> String {
    let scale = BigInt::from(10u8).pow(places as u32);
    let scaled = (r.abs() * BigRational::from_integer(scale.clone())).to_integer();
    let int = &scaled / &scale;
    let frac = (&scaled % &scale).to_string();
    let sign = if r.is_negative() { "-" } else { "" };
    if places == 0 {
        format!("{sign}{int}")
    } else {
        format!("{sign}{int}.{}{frac}", "0".repeat(places - frac.len()))
    }
}

/// The exact factor at `p`. Each factor is converted to double-double only
/// after exact evaluation, since division in double-double loses digits.
fn factor_exact(p: u64, which: Factor) -> BigRational {
    let u = rat(1, p as i64);
    let one = BigRational::one();
    match which {
        Factor::A => local_factor(p, FactorKind::AP),
        Factor::TauThree => {
            let r = (&one - &u) / (&one + &u);
            &r * &r * local_factor(p, FactorKind::BP)
        }
        Factor::LocThree => {
            local_factor(p, FactorKind::AP) + rat(2, 1) * local_factor(p, FactorKind::CPPrime) * &u * &u
        }
        Factor::Ratio => local_factor(p, FactorKind::RatioFactor),
    }
}

#[derive(Debug, Clone, Copy)]
enum Factor {
    /// `a_p`
    A,
    /// `((1 - u)/(1 + u))^2 b_p`
    TauThree,
    /// `a_p + 2 c_p' / p^2`
    LocThree,
    Ratio,
}

impl Factor {
    /// `(C, k)` with `|factor - 1| <= C / p^k` for every prime `p >= 3`.
    fn deviation(self) -> (f64, i32) {
        match self {
            Factor::A => (3.0, 2),
            Factor::TauThree => (7.0, 4),
            Factor::LocThree => (13.0, 4),
            Factor::Ratio => (6.0, 4),
        }
    }
}

/// Bound on `sum_{p > B} |log(1 + x_p)|` when `|x_p| <= C / p^k`.
fn tail(c: f64, k: i32, bound: u64) -> f64 {
    let b = bound as f64;
    let x = c / b.powi(k);
    c / ((k - 1) as f64 * b.powi(k - 1)) / (1.0 - x)
}

pub const MIN_PRIME_BOUND: u64 = 100;

pub fn euler_product(kind: ProductKind, prime_bound: u64) -> Result<EulerProductValue> {
    if prime_bound < MIN_PRIME_BOUND {
        return Err(domain(format!("prime bound must be at least {MIN_PRIME_BOUND}")));
    }
    let (prefactor, one_mod_4, three_mod_4) = match kind {
        ProductKind::Tau => (rat(17, 16), Some(Factor::A), Some(Factor::TauThree)),
        ProductKind::TauLoc => (rat(7, 4) * rat(4751, 9216), Some(Factor::A), Some(Factor::LocThree)),
        ProductKind::Thm12Ratio => (BigRational::one(), None, Some(Factor::Ratio)),
        ProductKind::HasseRatio => (hasse_prefactor(), None, Some(Factor::Ratio)),
    };
    let mut value = rational_to_twofloat(&prefactor);
    let mut count = 0u64;
    for p in primes_up_to(prime_bound).into_iter().filter(|&p| p > 2) {
        let f = if p % 4 == 1 { one_mod_4 } else { three_mod_4 };
        if let Some(f) = f {
            value *= rational_to_twofloat(&factor_exact(p, f));
            count += 1;
        }
    }
    let tail_bound = [one_mod_4, three_mod_4]
        .into_iter()
        .flatten()
        .map(|f| {
            let (c, k) = f.deviation();
            tail(c, k, prime_bound)
        })
        .sum();
    // one conversion and one product per factor, each within a few units of 2^-104
    let rounding_bound = (count as f64 + 1.0) * 8.0 * 2f64.powi(-104);
    if !value.is_valid() {
        return Err(Error::InternalInconsistency(format!("{} lost precision", kind.name())));
    }
    Ok(EulerProductValue { kind, value, prime_bound, tail_bound, rounding_bound })
}

// ---------------------------------------------------------------------------
// exact 2-adic density

/// Exponents at or beyond the threshold are replaced by `T` or `T + 1`
/// according to parity.
fn fold(e: u32, t: u32) -> u32 {
    if e < t {
        e
    } else {
        t + (e - t) % 2
    }
}

/// `sum_{e : fold(e) = f} 2^-e`.
fn fold_weight(f: u32, t: u32) -> BigRational {
    let w = rat(1, 1) / BigRational::from_integer(BigInt::from(2u8).pow(f));
    if f < t {
        w
    } else {
        w * rat(4, 3)
    }
}

pub const STABILIZATION_LIMIT: u32 = 12;
const STABILIZATION_CHECK: u32 = 4;

struct HCounter {
    i: u8,
    j: u8,
    cache: HashMap<(u32, u32, u32), u64>,
}

impl HCounter {
    /// Odd `(A', B', C', D') mod 16` with `(A', 2^beta B') = (i, j) mod 4`
    /// and `(A', 2^beta B', 2^gamma C', 2^delta D')` in `T2`.
    fn count(&mut self, beta: u32, gamma: u32, delta: u32) -> u64 {
        let (i, j) = (self.i, self.j);
        *self.cache.entry((beta, gamma, delta)).or_insert_with(|| {
            let odd = (1..16i64).step_by(2);
            let mut n = 0;
            for a in odd.clone().filter(|a| a % 4 == i as i64) {
                for b in odd.clone() {
                    let bj = if beta == 0 { b % 4 } else if beta == 1 { 2 } else { 0 };
                    if bj != j as i64 {
                        continue;
                    }
                    for c in odd.clone() {
                        for d in odd.clone() {
                            if Residues::new(a, b, c, d, beta, gamma, delta).in_t2() {
                                n += 1;
                            }
                        }
                    }
                }
            }
            n
        })
    }

    /// Whether every exponent triple up to `t + STABILIZATION_CHECK` agrees
    /// with its folded triple.
    fn stable_at(&mut self, t: u32) -> bool {
        let top = t + STABILIZATION_CHECK;
        for x in 0..top {
            for y in 0..top {
                let f = |e| fold(e, t);
                if self.count(x, y, 0) != self.count(f(x), f(y), 0) {
                    return false;
                }
            }
            if self.count(x, 0, 1) != self.count(fold(x, t), 0, 1) {
                return false;
            }
            for beta in 0..2 {
                if x >= 2 && self.count(beta, 0, x) != self.count(beta, 0, fold(x, t).max(2)) {
                    return false;
                }
            }
        }
        true
    }
}

/// The density component `tau_2(i, j)`: the 2-adic measure of
/// `(A, B, C, D)` with `A` odd, `(A, B) = (i, j) mod 4` and `XA,B,C,D(Q_2)`
/// nonempty, for exponents `min(gamma, delta) = 0`, `min(beta, delta) <= 1`.
pub fn tau2_component(i: u8, j: u8) -> Result<BigRational> {
    if i % 2 == 0 || i > 3 || j > 3 {
        return Err(domain("tau2_component expects i in {1,3} and j in 0..4"));
    }
    let mut h = HCounter { i, j, cache: HashMap::new() };
    let t = (3..=STABILIZATION_LIMIT).find(|&t| h.stable_at(t)).ok_or_else(|| {
        Error::NoStabilization(format!("tau_2({i},{j}) not parity-stable up to {STABILIZATION_LIMIT}"))
    })?;
    let folded: Vec<u32> = (0..t + 2).collect();
    let mut total = BigRational::zero();
    let mut add = |n: u64, w: BigRational| total += BigRational::from_integer(n.into()) * w;
    // delta = 0, beta and gamma free
    for &b in &folded {
        for &g in &folded {
            add(h.count(b, g, 0), fold_weight(b, t) * fold_weight(g, t));
        }
    }
    // delta = 1, gamma = 0, beta free
    for &b in &folded {
        add(h.count(b, 0, 1), fold_weight(b, t) * rat(1, 2));
    }
    // delta >= 2, gamma = 0, beta in {0, 1}
    for beta in 0..2 {
        for &dl in folded.iter().filter(|&&d| d >= 2) {
            add(h.count(beta, 0, dl), rat(1, 1 << beta) * fold_weight(dl, t));
        }
    }
    Ok(total / BigRational::from_integer(BigInt::from(1u32 << 16)))
}

/// `tau_loc,2 = 4 (tau_2(1,0) + tau_2(1,2)) + 2 (tau_2(1,1) + tau_2(1,3))`.
pub fn tau_loc2_exact() -> Result<BigRational> {
    let c = |j| tau2_component(1, j);
    Ok(rat(4, 1) * (c(0)? + c(2)?) + rat(2, 1) * (c(1)? + c(3)?))
}

// ---------------------------------------------------------------------------
// brute-force local densities

/// Residues modulo `p^k` grouped by what the local deciders read from them:
/// the valuation and the unit part (mod 16 at 2, mod p otherwise). The zero
/// residue is represented by `p^k`.
#[derive(Debug, Clone, Copy)]
struct ResidueClass {
    v: u32,
    unit: i64,
    count: u128,
}

fn residue_classes(p: u64, k: u32) -> Vec<ResidueClass> {
    let mut out = Vec::new();
    for v in 0..k {
        let width = k - v;
        // (unit classes, residues per class)
        let (units, count): (Vec<i64>, u128) = match p {
            2 if width < 4 => ((1..1i64 << width).step_by(2).collect(), 1),
            2 => ((1..16).step_by(2).collect(), 1 << (width - 4)),
            _ => ((1..p as i64).collect(), (p as u128).pow(width - 1)),
        };
        out.extend(units.into_iter().map(|unit| ResidueClass { v, unit, count }));
    }
    out.push(ResidueClass { v: k, unit: 1, count: 1 });
    out
}

fn tuple_soluble(p: u64, t: [ResidueClass; 4]) -> bool {
    if p == 2 {
        let [a, b, c, d] = t;
        return if a.v == 0 {
            Residues::new(a.unit, b.unit, c.unit, d.unit, b.v, c.v, d.v).in_t2()
        } else {
            // b is odd by the side conditions; exchange the roles of T and 1
            Residues::new(b.unit, a.unit, d.unit, c.unit, a.v, d.v, c.v).in_t2()
        };
    }
    if p % 4 == 1 {
        return true;
    }
    let raw = t.map(|x| (p as i128).pow(x.v) * x.unit as i128);
    crate::localsolve::x_soluble_at_odd_p_raw(raw, p).unwrap_or(false)
}

/// `p^-4k` times the number of `(a, b, c, d)` in `(Z/p^k)^4 \ p (Z/p^k)^4`
/// with `min(v(a), v(c)) <= 1`, `min(v(b), v(d)) <= 1`,
/// `min(v(a), v(b)) <= delta_p`, `min(v(c), v(d)) <= delta_p` and a
/// `Q_p`-point, where `delta_p = 1` for `p = 3 mod 4` and 0 otherwise.
/// Each residue is read through its least nonnegative representative.
pub fn density_bruteforce(p: u64, k: u32) -> Result<f64> {
    density_bruteforce_with_budget(p, k, crate::census::work_budget())
}

pub fn density_bruteforce_with_budget(p: u64, k: u32, budget: u128) -> Result<f64> {
    use rayon::prelude::*;
    if !crate::arith::is_prime(p as u128) || k == 0 {
        return Err(domain("density_bruteforce expects a prime p and k >= 1"));
    }
    let estimated = (p as u128).checked_pow(4 * k).unwrap_or(u128::MAX);
    if estimated > budget {
        return Err(Error::BudgetExceeded { estimated, budget });
    }
    let delta_p = if p % 4 == 3 { 1 } else { 0 };
    let classes = residue_classes(p, k);
    let total: u128 = classes
        .par_iter()
        .map(|&a| {
            let mut n = 0u128;
            for &b in &classes {
                if a.v.min(b.v) > delta_p {
                    continue;
                }
                for &c in &classes {
                    if a.v.min(c.v) > 1 {
                        continue;
                    }
                    for &d in &classes {
                        if c.v.min(d.v) > delta_p || b.v.min(d.v) > 1 {
                            continue;
                        }
                        if [a, b, c, d].iter().all(|x| x.v > 0) {
                            continue;
                        }
                        if tuple_soluble(p, [a, b, c, d]) {
                            n += a.count * b.count * c.count * d.count;
                        }
                    }
                }
            }
            n
        })
        .sum();
    Ok(total as f64 / estimated as f64)
}
