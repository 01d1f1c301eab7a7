//! Closed-form membership tests for `T1` and `T2`, written against residue
//! data only: odd parts modulo 16 and the valuations of `B`, `C`, `D`.

use super::TwoAdicClass;

/// Residue data of a 2-adic tuple. Odd parts are stored modulo 16 in `1..16`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Residues {
    pub a: u8,
    pub b: u8,
    pub c: u8,
    pub d: u8,
    pub beta: u32,
    pub gamma: u32,
    pub delta: u32,
}

const ODD_D: [u8; 5] = [1, 2, 4, 5, 0];
const ODD_DBAR: [u8; 5] = [3, 4, 6, 7, 0];

pub(crate) fn odd_sum_admits(sum8: u8, target: TwoAdicClass) -> bool {
    match target {
        TwoAdicClass::D => ODD_D.contains(&sum8),
        TwoAdicClass::Dbar => ODD_DBAR.contains(&sum8),
    }
}

fn m16(x: i64) -> u8 {
    x.rem_euclid(16) as u8
}

/// `2^v * odd` reduced modulo 16.
fn full(odd: u8, v: u32) -> u8 {
    if v >= 4 {
        0
    } else {
        (odd << v) & 15
    }
}

fn sum8(x: u8, y: u8) -> u8 {
    (x + y) % 8
}

fn sum16(x: u8, y: u8) -> u8 {
    (x + y) % 16
}

impl Residues {
    pub fn new(a: i64, b_odd: i64, c_odd: i64, d_odd: i64, beta: u32, gamma: u32, delta: u32) -> Self {
        Residues { a: m16(a), b: m16(b_odd), c: m16(c_odd), d: m16(d_odd), beta, gamma, delta }
    }

    fn big_b(&self) -> u8 {
        full(self.b, self.beta)
    }

    fn big_c(&self) -> u8 {
        full(self.c, self.gamma)
    }

    fn big_d(&self) -> u8 {
        full(self.d, self.delta)
    }

    fn c_in_d(&self) -> bool {
        self.c % 4 == 1
    }

    fn d_in_d(&self) -> bool {
        self.d % 4 == 1
    }

    /// The full value `C` is odd and congruent to `r mod 4`.
    fn c_is(&self, r: u8) -> bool {
        self.gamma == 0 && self.c % 4 == r
    }

    fn d_is(&self, r: u8) -> bool {
        self.delta == 0 && self.d % 4 == r
    }

    fn negated(&self) -> Self {
        Residues {
            a: (16 - self.a) % 16,
            b: (16 - self.b) % 16,
            c: (16 - self.c) % 16,
            d: (16 - self.d) % 16,
            ..*self
        }
    }

    /// `(B, A, D, C)`: swaps the roles of `u` and `v`. Needs `B` odd.
    fn swapped(&self) -> Self {
        debug_assert_eq!(self.beta, 0);
        Residues {
            a: self.b,
            b: self.a,
            c: self.d,
            d: self.c,
            beta: 0,
            gamma: self.delta,
            delta: self.gamma,
        }
    }

    /// Residue class of `(A, B) mod 4` as `(A mod 4, B mod 4)`.
    fn ab_class(&self) -> (u8, u8) {
        (self.a % 4, self.big_b() % 4)
    }

    pub fn in_t1(&self) -> bool {
        match self.ab_class() {
            (1, 1) => self.t1_11(),
            (3, 3) => self.t1_33(),
            (1, 3) => self.t1_13(),
            // not covered by the case lists: exchange u and v to land in (1,3)
            (3, 1) => self.swapped().t1_13(),
            (1, 0) => self.t1_10(),
            (3, 0) => self.t1_30(),
            (1, 2) => self.t1_12(),
            (3, 2) => self.t1_32(),
            _ => unreachable!("A is odd"),
        }
    }

    pub fn in_t2(&self) -> bool {
        match self.ab_class() {
            (1, 1) => self.t2_11(),
            (1, 3) => self.t2_13(),
            (1, 0) => self.t2_10(),
            (1, 2) => self.t2_12(),
            // T2(i, j) = -T2(-i, -j)
            (3, _) => self.negated().in_t2(),
            _ => unreachable!("A is odd"),
        }
    }

    // -- (A,B) = (1,1) mod 4 ------------------------------------------------

    fn t1_11(&self) -> bool {
        let ab = sum8(self.a, self.big_b());
        let (c, d) = (self.big_c(), self.big_d());
        if self.c_in_d() || self.d_in_d() {
            return true;
        }
        if self.c_is(3) && self.d_is(3) && ab == 2 && sum8(c, d) == 2 {
            return true;
        }
        if self.c_is(3) && self.delta >= 1 && self.d % 4 == 3 {
            if self.delta % 2 == 1 || sum8(c, self.d) == 2 {
                return true;
            }
        }
        if self.d_is(3) && self.gamma >= 1 && self.c % 4 == 3 {
            if self.gamma % 2 == 1 || sum8(self.c, d) == 2 {
                return true;
            }
        }
        false
    }

    fn t2_11(&self) -> bool {
        let ab = sum8(self.a, self.big_b());
        let (c, d) = (self.big_c(), self.big_d());
        if self.c_in_d() || self.d_in_d() {
            return true;
        }
        if self.c_is(3) && self.d_is(3) && ab == sum8(c, d) {
            return true;
        }
        if self.c_is(3) && self.d % 4 == 3 {
            let dl = self.delta;
            let cd = sum8(c, self.d);
            if dl % 2 == 1 || (dl >= 2 && cd == 2) || (dl >= 2 && dl % 2 == 0 && ab == 6 && cd == 6) {
                return true;
            }
        }
        if self.d_is(3) && self.c % 4 == 3 {
            let g = self.gamma;
            let cd = sum8(self.c, d);
            if g % 2 == 1 || (g >= 2 && cd == 2) || (g >= 2 && g % 2 == 0 && ab == 6 && cd == 6) {
                return true;
            }
        }
        false
    }

    // -- (A,B) = (3,3) mod 4 ------------------------------------------------

    fn t1_33(&self) -> bool {
        sum8(self.a, self.big_b()) == 2 && ODD_D.contains(&sum8(self.big_c(), self.big_d()))
    }

    // -- (A,B) = (1,3) mod 4 ------------------------------------------------

    /// Conditions attached to `t = (1,3,3,1) mod 4`.
    fn cond_1331(&self) -> bool {
        let ab8 = sum8(self.a, self.big_b());
        let ab16 = sum16(self.a, self.big_b());
        let cd8 = sum8(self.big_c(), self.big_d());
        let cd16 = sum16(self.big_c(), self.big_d());
        ab8 == 0 || (ab8 == 4 && cd8 == 0) || (ab8 == 4 && ab16 == cd16)
    }

    fn t1_13(&self) -> bool {
        let (c, d) = (self.big_c(), self.big_d());
        let cd = sum8(c, d);
        if self.c_in_d() {
            return true;
        }
        if [1, 2, 5].contains(&cd) {
            return true;
        }
        if self.d_is(1) && self.gamma == 1 && self.c % 4 == 3 {
            return true;
        }
        if self.d_is(3) && self.gamma >= 2 && self.c % 4 == 3 {
            if self.gamma % 2 == 1 || sum8(self.c, d) == 2 {
                return true;
            }
        }
        self.c_is(3) && self.d_is(1) && self.cond_1331()
    }

    fn t2_13(&self) -> bool {
        let cd = sum8(self.big_c(), self.big_d());
        if self.c_in_d() {
            return true;
        }
        if self.gamma >= 1 {
            return true;
        }
        if self.c_is(3) && [1, 2, 3, 5, 6, 7].contains(&cd) {
            return true;
        }
        self.c_is(3) && self.d_is(1) && self.cond_1331()
    }

    // -- (A,B) = (1,0) mod 4, beta >= 2 -------------------------------------

    fn t1_10(&self) -> bool {
        let d = self.big_d();
        let cd = sum8(self.big_c(), d);
        let four_nmid_d = self.delta <= 1;
        if (self.c_in_d() || ODD_D.contains(&cd)) && four_nmid_d {
            return true;
        }
        if self.gamma == 1 && self.c % 4 == 3 && self.d_is(1) {
            return true;
        }
        if self.gamma >= 2 && self.c % 4 == 3 && self.d_is(3) {
            if self.gamma % 2 == 1 || sum8(self.c, d) == 2 {
                return true;
            }
        }
        false
    }

    /// `A + B' = 6 mod 8` whenever `B' = 1 mod 4` and `beta` is even.
    fn ab_prime_side_condition(&self) -> bool {
        !(self.b % 4 == 1 && self.beta % 2 == 0) || sum8(self.a, self.b) == 6
    }

    fn t2_10(&self) -> bool {
        let d = self.big_d();
        let cd = sum8(self.big_c(), d);
        let four_nmid_d = self.delta <= 1;
        if self.c_in_d() && four_nmid_d {
            return true;
        }
        if !self.c_in_d() && ODD_D.contains(&cd) {
            return true;
        }
        if !self.c_in_d() && four_nmid_d && [3, 6, 7].contains(&cd) {
            if self.c_is(3) && cd == 6 && self.ab_prime_side_condition() {
                return true;
            }
            if self.c % 4 == 3 && self.gamma == 1 && self.d_is(1) {
                return true;
            }
            if self.c % 4 == 3 && self.gamma >= 2 && self.d_is(3) {
                let g = self.gamma;
                let c1d = sum8(self.c, d);
                if g % 2 == 1
                    || c1d == 2
                    || (c1d == 6 && self.ab_prime_side_condition())
                {
                    return true;
                }
            }
        }
        false
    }

    // -- (A,B) = (3,0) mod 4 ------------------------------------------------

    fn t1_30(&self) -> bool {
        // u is even in any solution; B' = 1 mod 4 admits every large 2-power of u,
        // and for delta = 1 the second form needs v_2(u) >= 2
        let b_one = self.b % 4 == 1;
        let ab = sum8(self.a, self.b);
        if self.d_in_d() && self.delta <= 1 {
            let mid = ab == 2 && (self.delta == 0 || self.beta >= 4);
            if b_one || self.beta % 2 == 1 || mid {
                return true;
            }
        }
        self.delta == 1
            && self.d % 4 == 3
            && (self.beta == 3 || (self.beta == 2 && (b_one || ab == 2)))
    }

    // -- (A,B) = (1,2) mod 4, beta = 1 --------------------------------------

    fn t1_12(&self) -> bool {
        if self.c_in_d() {
            return true;
        }
        // C' = 3 mod 4 from here on
        let (g, dl) = (self.gamma, self.delta);
        let b1 = self.b % 4;
        let d1 = self.d % 4;
        let c = self.big_c();
        if self.d_is(1) && g >= 1 {
            return true;
        }
        if self.d_is(3) && g >= 1 && (g % 2 == 1 || sum8(self.c, self.big_d()) == 2) {
            return true;
        }
        if g == 0 && b1 == 3 && [0, 2, 3].contains(&dl) && d1 == 1 {
            return true;
        }
        if g == 0 && b1 == 3 && [1, 2, 3].contains(&dl) && d1 == 3 && (dl != 2 || sum8(c, self.d) == 2) {
            return true;
        }
        if g == 0 && b1 == 1 && d1 == 1 {
            return true;
        }
        g == 0 && b1 == 1 && dl >= 3 && d1 == 3 && (dl % 2 == 1 || sum8(c, self.d) == 2)
    }

    fn t2_12(&self) -> bool {
        if self.c_in_d() {
            return true;
        }
        if self.gamma >= 1 {
            return true;
        }
        let b1 = self.b % 4;
        let d1 = self.d % 4;
        b1 == d1 || self.delta != 1
    }

    // -- (A,B) = (3,2) mod 4, beta = 1 --------------------------------------

    fn t1_32(&self) -> bool {
        let d = self.big_d();
        let cd = sum8(self.big_c(), d);
        let b1 = self.b % 4;
        let d1 = self.d % 4;
        if ODD_D.contains(&cd) {
            return true;
        }
        // with D = 1 mod 4 the pairs (0,1) and (2,1) cover both classes of B'
        if self.d_is(1) {
            return true;
        }
        if (cd == 3 || cd == 7) && self.delta == 1 && d1 == b1 {
            return true;
        }
        if self.c_is(3) && self.delta >= 2 {
            let dl = self.delta;
            let c1d = sum8(self.big_c(), self.d);
            if b1 == 3 && dl == 3 {
                return true;
            }
            if b1 == 3 && dl == 2 && [2, 4, 0].contains(&c1d) {
                return true;
            }
            if b1 == 1 && d1 == 1 {
                return true;
            }
            if b1 == 1 && d1 == 3 && dl >= 3 && (dl % 2 == 1 || c1d == 2) {
                return true;
            }
        }
        false
    }
}
