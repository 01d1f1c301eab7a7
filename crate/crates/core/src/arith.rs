//! Integer arithmetic: factorization, valuations, quadratic symbols and sums of two squares.

use crate::error::{domain, Error, Result};
use num_integer::Integer;

/// Largest magnitude accepted by [`factorize`].
pub const FACTOR_LIMIT: u128 = 1 << 96;

const TRIAL_LIMIT: u128 = 1 << 20;
const RHO_ROUNDS: u32 = 12;
const RHO_ITERATIONS: u64 = 1 << 22;

/// A value of the Legendre symbol or of the valuation-aware bracket.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[repr(i8)]
pub enum SymbolValue {
    MinusOne = -1,
    Zero = 0,
    PlusOne = 1,
}

impl SymbolValue {
    pub fn value(self) -> i8 {
        self as i8
    }
}

/// Membership of a positive integer in the two squarefree classes used by the model:
/// `in_a` means squarefree, `in_b` means squarefree with every prime factor `3 mod 4`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClassMembership {
    pub in_a: bool,
    pub in_b: bool,
}

/// Prime factorization of `|n|`, primes ascending.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Factorization {
    pub factors: Vec<(u128, u32)>,
}

impl Factorization {
    pub fn primes(&self) -> impl Iterator<Item = u128> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }

    pub fn exponent(&self, p: u128) -> u32 {
        self.factors
            .iter()
            .find(|&&(q, _)| q == p)
            .map_or(0, |&(_, e)| e)
    }

    pub fn is_squarefree(&self) -> bool {
        self.factors.iter().all(|&(_, e)| e == 1)
    }

    /// Product of the factors; `1` for the empty factorization.
    pub fn value(&self) -> u128 {
        self.factors
            .iter()
            .fold(1u128, |acc, &(p, e)| acc * p.pow(e))
    }
}

// ---------------------------------------------------------------------------
// modular arithmetic on u128 (moduli below 2^96)

fn mulmod(a: u128, b: u128, n: u128) -> u128 {
    if n <= u64::MAX as u128 {
        return (a % n) * (b % n) % n;
    }
    let a = a % n;
    let b = b % n;
    let mut r: u128 = 0;
    for shift in [96u32, 64, 32, 0] {
        let limb = (b >> shift) & 0xffff_ffff;
        r = (r << 32) % n;
        r = (r + a * limb % n) % n;
    }
    r
}

fn powmod(mut base: u128, mut exp: u128, n: u128) -> u128 {
    let mut acc = 1 % n;
    base %= n;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mulmod(acc, base, n);
        }
        base = mulmod(base, base, n);
        exp >>= 1;
    }
    acc
}

const SMALL_PRIMES: [u128; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];

/// Miller-Rabin with the first sixteen prime bases. Deterministic below
/// 3.3e24; a strong probable-prime test above that.
pub fn is_prime(n: u128) -> bool {
    if n < 2 {
        return false;
    }
    for &p in SMALL_PRIMES.iter() {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    if n < 53 * 53 {
        return true;
    }
    if n >= FACTOR_LIMIT {
        // mulmod only supports moduli below 2^96
        return trial_is_prime(n);
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in SMALL_PRIMES.iter() {
        let mut x = powmod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn trial_is_prime(n: u128) -> bool {
    let mut p = 3u128;
    while p * p <= n && p < TRIAL_LIMIT {
        if n % p == 0 {
            return false;
        }
        p += 2;
    }
    true
}

fn pollard_brent(n: u128, c: u128) -> Option<u128> {
    let f = |x: u128| (mulmod(x, x, n) + c) % n;
    let mut y: u128 = 2;
    let mut r: u64 = 1;
    let mut q: u128 = 1;
    let m: u64 = 128;
    let mut g: u128 = 1;
    let mut x = y;
    let mut ys = y;
    let mut spent: u64 = 0;
    while g == 1 {
        x = y;
        for _ in 0..r {
            y = f(y);
        }
        let mut k = 0;
        while k < r && g == 1 {
            ys = y;
            for _ in 0..m.min(r - k) {
                y = f(y);
                let diff = if x > y { x - y } else { y - x };
                q = mulmod(q, diff, n);
            }
            g = q.gcd(&n);
            k += m;
        }
        spent += r;
        if spent > RHO_ITERATIONS {
            return None;
        }
        r *= 2;
    }
    if g == n {
        loop {
            ys = f(ys);
            let diff = if x > ys { x - ys } else { ys - x };
            g = diff.gcd(&n);
            if g > 1 {
                break;
            }
        }
    }
    if g == n || g == 1 {
        None
    } else {
        Some(g)
    }
}

fn split_composite(n: u128, out: &mut Vec<u128>) -> Result<()> {
    if n == 1 {
        return Ok(());
    }
    if is_prime(n) {
        out.push(n);
        return Ok(());
    }
    for c in 1..=RHO_ROUNDS as u128 {
        if let Some(d) = pollard_brent(n, c) {
            split_composite(d, out)?;
            split_composite(n / d, out)?;
            return Ok(());
        }
    }
    Err(Error::FactorizationBudget(n))
}

/// Factor `|n|` for `1 <= |n| <= 2^96`.
pub fn factorize(n: i128) -> Result<Factorization> {
    if n == 0 {
        return Err(domain("cannot factor 0"));
    }
    let mut m = n.unsigned_abs();
    if m > FACTOR_LIMIT {
        return Err(domain(format!("|{n}| exceeds 2^96")));
    }
    let mut factors: Vec<(u128, u32)> = Vec::new();
    let tz = m.trailing_zeros();
    if tz > 0 {
        factors.push((2, tz));
        m >>= tz;
    }
    let mut p: u128 = 3;
    while p < TRIAL_LIMIT && p * p <= m {
        if m % p == 0 {
            let mut e = 0;
            while m % p == 0 {
                m /= p;
                e += 1;
            }
            factors.push((p, e));
        }
        p += 2;
    }
    if m > 1 {
        if m < TRIAL_LIMIT * TRIAL_LIMIT {
            factors.push((m, 1));
        } else {
            let mut primes = Vec::new();
            split_composite(m, &mut primes)?;
            primes.sort_unstable();
            for q in primes {
                match factors.last_mut() {
                    Some((last, e)) if *last == q => *e += 1,
                    _ => factors.push((q, 1)),
                }
            }
        }
    }
    Ok(Factorization { factors })
}

/// p-adic valuation of a nonzero integer.
pub fn valuation(n: i128, p: u128) -> Result<u32> {
    if n == 0 {
        return Err(domain("valuation of 0"));
    }
    if p < 2 {
        return Err(domain(format!("{p} is not a prime")));
    }
    Ok(valuation_unchecked(n.unsigned_abs(), p))
}

pub(crate) fn valuation_unchecked(mut n: u128, p: u128) -> u32 {
    if p == 2 {
        return n.trailing_zeros();
    }
    let mut e = 0;
    while n % p == 0 {
        n /= p;
        e += 1;
    }
    e
}

/// Legendre symbol `(n/p)` for an odd prime `p`; zero when `p | n`.
pub fn legendre(n: i128, p: u64) -> Result<SymbolValue> {
    if p == 2 || !is_prime(p as u128) {
        return Err(domain(format!("{p} is not an odd prime")));
    }
    Ok(legendre_unchecked(n, p))
}

pub(crate) fn legendre_unchecked(n: i128, p: u64) -> SymbolValue {
    let r = n.rem_euclid(p as i128) as u128;
    if r == 0 {
        return SymbolValue::Zero;
    }
    if powmod(r, (p as u128 - 1) / 2, p as u128) == 1 {
        SymbolValue::PlusOne
    } else {
        SymbolValue::MinusOne
    }
}

/// Valuation-aware symbol: `+1` when `v_p(n)` is odd, otherwise the Legendre
/// symbol of the `p`-free part of `n`.
pub fn bracket(n: i128, p: u64) -> Result<SymbolValue> {
    if n == 0 {
        return Err(domain("bracket of 0"));
    }
    if p == 2 || !is_prime(p as u128) {
        return Err(domain(format!("{p} is not an odd prime")));
    }
    Ok(bracket_unchecked(n, p))
}

pub(crate) fn bracket_unchecked(n: i128, p: u64) -> SymbolValue {
    let mut m = n;
    let mut v = 0;
    let pp = p as i128;
    while m % pp == 0 {
        m /= pp;
        v += 1;
    }
    if v % 2 == 1 {
        SymbolValue::PlusOne
    } else {
        legendre_unchecked(m, p)
    }
}

pub fn class_membership(n: u64) -> Result<ClassMembership> {
    if n == 0 {
        return Err(domain("class membership of 0"));
    }
    let f = factorize(n as i128)?;
    let in_a = f.is_squarefree();
    let in_b = in_a && f.primes().all(|p| p % 4 == 3);
    Ok(ClassMembership { in_a, in_b })
}

pub(crate) fn is_squarefree_u64(n: u64) -> bool {
    let mut m = n;
    let mut p = 2u64;
    while p * p <= m {
        if m % p == 0 {
            m /= p;
            if m % p == 0 {
                return false;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    true
}

/// Squarefree with all prime factors `3 mod 4`.
pub(crate) fn in_class_b_u64(n: u64) -> bool {
    let mut m = n;
    let mut p = 2u64;
    while p * p <= m {
        if m % p == 0 {
            if p % 4 != 3 {
                return false;
            }
            m /= p;
            if m % p == 0 {
                return false;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    m == 1 || m % 4 == 3
}

/// Primes `p <= n` in increasing order.
pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// sums of two squares

type Gaussian = (i128, i128);

fn gmul(x: Gaussian, y: Gaussian) -> Gaussian {
    (x.0 * y.0 - x.1 * y.1, x.0 * y.1 + x.1 * y.0)
}

/// `(x, y)` with `x^2 + y^2 = p` for a prime `p = 1 mod 4`.
fn prime_as_two_squares(p: u128) -> (u128, u128) {
    let mut c = 2u128;
    let root = loop {
        let r = powmod(c, (p - 1) / 4, p);
        if mulmod(r, r, p) == p - 1 {
            break r;
        }
        c += 1;
    };
    let (mut a, mut b) = (p, root.min(p - root));
    while b * b > p {
        let r = a % b;
        a = b;
        b = r;
    }
    let rest = p - b * b;
    let x = isqrt(rest);
    debug_assert_eq!(x * x + b * b, p);
    (b, x)
}

pub(crate) fn isqrt(n: u128) -> u128 {
    if n < 2 {
        return n;
    }
    let mut x = (n as f64).sqrt() as u128;
    while x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}

/// A representation `n = y^2 + z^2` with `0 <= y <= z`, or `None` if there is none.
pub fn sum_two_squares(n: u128) -> Result<Option<(u128, u128)>> {
    if n == 0 {
        return Err(domain("sum_two_squares expects n >= 1"));
    }
    let f = factorize(n as i128)?;
    let mut acc: Gaussian = (1, 0);
    for &(p, e) in &f.factors {
        if p == 2 {
            for _ in 0..e {
                acc = gmul(acc, (1, 1));
            }
        } else if p % 4 == 3 {
            if e % 2 == 1 {
                return Ok(None);
            }
            let s = p.pow(e / 2) as i128;
            acc = (acc.0 * s, acc.1 * s);
        } else {
            let (x, y) = prime_as_two_squares(p);
            for _ in 0..e {
                acc = gmul(acc, (x as i128, y as i128));
            }
        }
    }
    let (y, z) = (acc.0.unsigned_abs(), acc.1.unsigned_abs());
    Ok(Some((y.min(z), y.max(z))))
}

/// Lookup table deciding whether products of positive integers are sums of
/// two squares. `kernel[x]` is the product of the primes `3 mod 4` dividing
/// `x` to an odd power; `xy` is a sum of two squares iff the kernels agree.
#[derive(Debug, Clone)]
pub struct SquareSumKernel {
    kernel: Vec<u32>,
}

impl SquareSumKernel {
    /// Largest table bound accepted by [`SquareSumKernel::new`].
    pub const MAX_BOUND: u64 = 1 << 26;

    pub fn new(bound: u64) -> Result<Self> {
        if bound > Self::MAX_BOUND {
            return Err(domain(format!("kernel bound {bound} exceeds {}", Self::MAX_BOUND)));
        }
        let n = bound as usize;
        let mut kernel = vec![1u32; n + 1];
        for p in primes_up_to(bound) {
            if p % 4 != 3 {
                continue;
            }
            let p = p as usize;
            let mut q = p;
            while q <= n {
                for x in (q..=n).step_by(q) {
                    let k = &mut kernel[x];
                    if *k as usize % p == 0 {
                        *k /= p as u32;
                    } else {
                        *k *= p as u32;
                    }
                }
                match q.checked_mul(p) {
                    Some(next) => q = next,
                    None => break,
                }
            }
        }
        Ok(SquareSumKernel { kernel })
    }

    pub fn bound(&self) -> u64 {
        (self.kernel.len() - 1) as u64
    }

    /// Whether `x * y` is a sum of two squares, for `1 <= x, y <= bound`.
    pub fn product_is_sum(&self, x: u64, y: u64) -> bool {
        self.kernel[x as usize] == self.kernel[y as usize]
    }
}

/// Whether a positive integer is a sum of two squares (by factorization).
pub fn is_sum_of_two_squares(n: u128) -> Result<bool> {
    if n == 0 {
        return Ok(true);
    }
    let f = factorize(n as i128)?;
    Ok(f.factors.iter().all(|&(p, e)| p % 4 != 3 || e % 2 == 0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive_factor(mut n: u128) -> Vec<(u128, u32)> {
        let mut out = Vec::new();
        let mut p = 2;
        while p * p <= n {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            if e > 0 {
                out.push((p, e));
            }
            p += 1;
        }
        if n > 1 {
            out.push((n, 1));
        }
        out
    }

    #[test]
    fn factorize_small_matches_naive() {
        for n in 1..5000u128 {
            assert_eq!(factorize(n as i128).unwrap().factors, naive_factor(n), "n={n}");
        }
        assert_eq!(factorize(-360).unwrap().factors, vec![(2, 3), (3, 2), (5, 1)]);
        assert!(factorize(0).is_err());
    }

    #[test]
    fn factorize_large_semiprimes() {
        let p: u128 = 1_000_000_007;
        let q: u128 = 998_244_353;
        let f = factorize((p * q) as i128).unwrap();
        assert_eq!(f.factors, vec![(q, 1), (p, 1)]);

        let big_p: u128 = 18_446_744_073_709_551_557; // largest prime below 2^64
        let f = factorize((big_p * 4093) as i128).unwrap();
        assert_eq!(f.factors, vec![(4093, 1), (big_p, 1)]);

        let r: u128 = 4_294_967_291; // prime below 2^32
        let s: u128 = 4_294_967_279;
        let t: u128 = 4_294_967_231;
        let f = factorize((r * s * t) as i128).unwrap();
        assert_eq!(f.factors, vec![(t, 1), (s, 1), (r, 1)]);
        assert_eq!(f.value(), r * s * t);
    }

    #[test]
    fn primality() {
        let primes = primes_up_to(10_000);
        for n in 0..10_000u128 {
            assert_eq!(is_prime(n), primes.binary_search(&(n as u64)).is_ok(), "n={n}");
        }
        assert!(is_prime((1u128 << 61) - 1));
        assert!(!is_prime(3_215_031_751)); // strong pseudoprime to bases 2,3,5,7
    }

    #[test]
    fn legendre_and_bracket_examples() {
        assert_eq!(legendre(-1, 3).unwrap(), SymbolValue::MinusOne);
        assert_eq!(legendre(2, 7).unwrap(), SymbolValue::PlusOne);
        assert_eq!(legendre(14, 7).unwrap(), SymbolValue::Zero);
        assert!(legendre(3, 4).is_err());
        assert!(legendre(3, 2).is_err());
        assert_eq!(bracket(-9, 3).unwrap(), SymbolValue::MinusOne);
        assert_eq!(bracket(-3, 3).unwrap(), SymbolValue::PlusOne);
        assert_eq!(bracket(-18, 3).unwrap(), SymbolValue::PlusOne);
        assert!(bracket(0, 3).is_err());
    }

    #[test]
    fn legendre_matches_squares_table() {
        for p in [3u64, 5, 7, 11, 13, 19, 23] {
            let squares: Vec<i128> = (1..p as i128).map(|x| x * x % p as i128).collect();
            for n in -50i128..50 {
                let r = n.rem_euclid(p as i128);
                let expected = if r == 0 {
                    SymbolValue::Zero
                } else if squares.contains(&r) {
                    SymbolValue::PlusOne
                } else {
                    SymbolValue::MinusOne
                };
                assert_eq!(legendre(n, p).unwrap(), expected);
            }
        }
    }

    #[test]
    fn class_membership_examples() {
        assert_eq!(class_membership(21).unwrap(), ClassMembership { in_a: true, in_b: true });
        assert_eq!(class_membership(15).unwrap(), ClassMembership { in_a: true, in_b: false });
        assert_eq!(class_membership(1).unwrap(), ClassMembership { in_a: true, in_b: true });
        assert_eq!(class_membership(9).unwrap(), ClassMembership { in_a: false, in_b: false });
        for n in 1..3000u64 {
            let c = class_membership(n).unwrap();
            assert_eq!(c.in_a, is_squarefree_u64(n));
            assert_eq!(c.in_b, in_class_b_u64(n), "n={n}");
        }
    }

    #[test]
    fn sum_two_squares_examples() {
        assert_eq!(sum_two_squares(5).unwrap(), Some((1, 2)));
        assert_eq!(sum_two_squares(544).unwrap(), Some((12, 20)));
        assert_eq!(sum_two_squares(1).unwrap(), Some((0, 1)));
        assert_eq!(sum_two_squares(3).unwrap(), None);
        assert_eq!(sum_two_squares(21).unwrap(), None);
        assert_eq!(sum_two_squares(9).unwrap(), Some((0, 3)));
    }

    #[test]
    fn sum_two_squares_exhaustive() {
        let limit = 4000u128;
        let mut reachable = vec![false; limit as usize + 1];
        for y in 0..=64u128 {
            for z in y..=64 {
                let s = y * y + z * z;
                if s <= limit {
                    reachable[s as usize] = true;
                }
            }
        }
        let kernel = SquareSumKernel::new(limit as u64).unwrap();
        for n in 1..=limit {
            let rep = sum_two_squares(n).unwrap();
            assert_eq!(rep.is_some(), reachable[n as usize], "n={n}");
            if let Some((y, z)) = rep {
                assert!(y <= z);
                assert_eq!(y * y + z * z, n);
            }
            assert_eq!(kernel.product_is_sum(1, n as u64), reachable[n as usize]);
        }
    }

    #[test]
    fn kernel_products() {
        let kernel = SquareSumKernel::new(500).unwrap();
        for x in 1..=60u64 {
            for y in 1..=60u64 {
                assert_eq!(
                    kernel.product_is_sum(x, y),
                    is_sum_of_two_squares((x * y) as u128).unwrap()
                );
            }
        }
    }

    #[test]
    fn large_sum_of_two_squares() {
        let p: u128 = 1_000_000_009; // 1 mod 4
        let n = p * 13 * 13 * 2;
        let (y, z) = sum_two_squares(n).unwrap().unwrap();
        assert_eq!(y * y + z * z, n);
    }

    #[test]
    fn valuation_examples() {
        assert_eq!(valuation(48, 2).unwrap(), 4);
        assert_eq!(valuation(-54, 3).unwrap(), 3);
        assert!(valuation(0, 3).is_err());
    }
}
