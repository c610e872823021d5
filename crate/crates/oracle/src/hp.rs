//! Plain high-precision evaluation of the AGM-family sequences.
//!
//! Values are `BigInt`s scaled by `2^bits`. Rounding is round-to-nearest-ish
//! through `num-bigint` division and `sqrt`; every operation is within a
//! couple of units of `2^-bits`, so with a few hundred spare bits the results
//! serve as exact references for checks performed at much coarser scales.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

#[derive(Clone, Copy, Debug)]
pub struct Hp {
    pub bits: u64,
}

impl Hp {
    pub fn new(bits: u64) -> Self {
        Hp { bits }
    }

    pub fn one(&self) -> BigInt {
        BigInt::one() << self.bits
    }

    pub fn int(&self, n: i64) -> BigInt {
        BigInt::from(n) << self.bits
    }

    pub fn frac(&self, num: i64, den: i64) -> BigInt {
        (BigInt::from(num) << self.bits) / den
    }

    pub fn mul(&self, x: &BigInt, y: &BigInt) -> BigInt {
        (x * y) >> self.bits
    }

    pub fn div(&self, x: &BigInt, y: &BigInt) -> BigInt {
        (x << self.bits) / y
    }

    pub fn sqrt(&self, x: &BigInt) -> BigInt {
        (x << self.bits).sqrt()
    }

    pub fn to_rational(&self, x: &BigInt) -> BigRational {
        BigRational::new(x.clone(), self.one())
    }

    pub fn to_f64(&self, x: &BigInt) -> f64 {
        let shift = self.bits.saturating_sub(60);
        let top: BigInt = x >> shift;
        let v: f64 = top.to_string().parse().unwrap();
        v / 2f64.powi((self.bits - shift) as i32)
    }

    /// `(a_i, b_i)` for `i = 0..=steps` starting from `(a, b)`.
    pub fn agm(&self, a: BigInt, b: BigInt, steps: usize) -> Vec<(BigInt, BigInt)> {
        let mut out = vec![(a, b)];
        for _ in 0..steps {
            let (a, b) = out.last().unwrap();
            let na = (a + b) >> 1;
            let nb = self.sqrt(&self.mul(a, b));
            out.push((na, nb));
        }
        out
    }

    /// Exact-arithmetic Borwein quantities at `x = 1/sqrt(2)`:
    /// `y_i, z_i` for `i = 1..=n` and `pi_i` for `i = 0..=n`.
    pub fn borwein(&self, n: usize) -> BorweinSeq {
        let one = self.one();
        let s2 = self.sqrt(&self.int(2));
        let ss2 = self.sqrt(&s2);
        let pi0 = &s2 + self.int(2);
        let mut ys = Vec::new();
        let mut zs = Vec::new();
        let mut pis = vec![pi0.clone()];
        if n == 0 {
            return BorweinSeq { ys, zs, pis };
        }
        let mut y = self.div(&(&one + &s2), &(&ss2 << 1));
        let mut z = ss2.clone();
        let mut prod = self.div(&(&one + &y), &(&one + &z));
        ys.push(y.clone());
        zs.push(z.clone());
        pis.push(self.mul(&pi0, &prod));
        for _ in 1..n {
            let sy = self.sqrt(&y);
            let ny = self.div(&(&one + &y), &(&sy << 1));
            let nz = self.div(
                &(&one + self.mul(&z, &y)),
                &self.mul(&(&one + &z), &sy),
            );
            y = ny;
            z = nz;
            prod = self.mul(&prod, &self.div(&(&one + &y), &(&one + &z)));
            ys.push(y.clone());
            zs.push(z.clone());
            pis.push(self.mul(&pi0, &prod));
        }
        BorweinSeq { ys, zs, pis }
    }

    /// `pi'_i` for `i = 1..=n` (index 0 of the result is `pi'_1`).
    pub fn salamin(&self, n: usize) -> Vec<BigInt> {
        let a0 = self.one();
        let b0 = self.sqrt(&self.frac(1, 2));
        let pairs = self.agm(a0, b0, n);
        let mut out = Vec::new();
        for i in 1..=n {
            let mut sum = BigInt::from(0);
            for k in 1..i {
                let (a, b) = &pairs[k - 1];
                let d = a - b;
                sum += self.mul(&d, &d) << (k - 1);
            }
            let a = &pairs[i].0;
            let num = self.mul(a, a) << 2;
            out.push(self.div(&num, &(self.one() - sum)));
        }
        out
    }
}

pub struct BorweinSeq {
    pub ys: Vec<BigInt>,
    pub zs: Vec<BigInt>,
    pub pis: Vec<BigInt>,
}
