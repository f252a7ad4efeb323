//! Arithmetic in the prime field F_p for odd p.

use serde::{Deserialize, Serialize};
use std::fmt;

use crate::error::{Error, Result};

/// An odd prime. Construction rejects 2 and composites.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct Prime(u32);

impl Prime {
    pub fn new(p: u32) -> Result<Self> {
        if p < 3 || p.is_multiple_of(2) || !is_prime(p) {
            return Err(Error::BadPrime(p));
        }
        if p > 46_000 {
            // keeps products of residues inside u32 arithmetic via u64
            return Err(Error::BadPrime(p));
        }
        Ok(Prime(p))
    }

    #[inline]
    pub fn get(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn as_i64(self) -> i64 {
        self.0 as i64
    }

    #[inline]
    pub fn reduce(self, v: i64) -> u32 {
        v.rem_euclid(self.0 as i64) as u32
    }

    #[inline]
    pub fn add(self, a: u32, b: u32) -> u32 {
        let s = a + b;
        if s >= self.0 {
            s - self.0
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(self, a: u32, b: u32) -> u32 {
        if a >= b {
            a - b
        } else {
            a + self.0 - b
        }
    }

    #[inline]
    pub fn neg(self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.0 - a
        }
    }

    #[inline]
    pub fn mul(self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.0 as u64) as u32
    }

    pub fn pow(self, mut a: u32, mut e: u64) -> u32 {
        let mut r = 1 % self.0;
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(r, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        r
    }

    /// Multiplicative inverse; panics on zero.
    pub fn inv(self, a: u32) -> u32 {
        assert!(!a.is_multiple_of(self.0), "inverse of zero in F_{}", self.0);
        self.pow(a, (self.0 - 2) as u64)
    }

    /// (-1)^e as a residue.
    #[inline]
    pub fn sign(self, e: i64) -> u32 {
        if e.rem_euclid(2) == 0 {
            1
        } else {
            self.0 - 1
        }
    }

    /// Binomial coefficient mod p via Lucas. Negative top or out-of-range bottom gives 0.
    pub fn binom(self, top: i64, bottom: i64) -> u32 {
        if bottom < 0 || top < 0 || bottom > top {
            return 0;
        }
        let p = self.0 as i64;
        let (mut a, mut b) = (top, bottom);
        let mut acc = 1u32;
        while b > 0 {
            let (da, db) = (a % p, b % p);
            if db > da {
                return 0;
            }
            acc = self.mul(acc, small_binom(self, da as u32, db as u32));
            a /= p;
            b /= p;
        }
        acc
    }
}

impl TryFrom<u32> for Prime {
    type Error = Error;
    fn try_from(p: u32) -> Result<Self> {
        Prime::new(p)
    }
}

impl From<Prime> for u32 {
    fn from(p: Prime) -> u32 {
        p.0
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

// C(a, b) mod p for a, b < p, by the multiplicative formula.
fn small_binom(p: Prime, a: u32, b: u32) -> u32 {
    let b = b.min(a - b);
    let mut num = 1u32;
    let mut den = 1u32;
    for j in 0..b {
        num = p.mul(num, a - j);
        den = p.mul(den, j + 1);
    }
    p.mul(num, p.inv(den))
}

/// An element of F_p carrying its prime.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FpScalar {
    value: u32,
    prime: Prime,
}

impl FpScalar {
    pub fn new(value: i64, prime: Prime) -> Self {
        FpScalar { value: prime.reduce(value), prime }
    }

    pub fn zero(prime: Prime) -> Self {
        FpScalar { value: 0, prime }
    }

    pub fn one(prime: Prime) -> Self {
        FpScalar { value: 1, prime }
    }

    pub fn value(self) -> u32 {
        self.value
    }

    pub fn prime(self) -> Prime {
        self.prime
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    /// Symmetric representative in (-p/2, p/2], handy for printing signs.
    pub fn signed(self) -> i64 {
        let v = self.value as i64;
        let p = self.prime.as_i64();
        if v > p / 2 {
            v - p
        } else {
            v
        }
    }

    pub fn inv(self) -> Result<Self> {
        if self.value == 0 {
            return Err(Error::DivisionByZero);
        }
        Ok(FpScalar { value: self.prime.inv(self.value), prime: self.prime })
    }
}

impl std::ops::Add for FpScalar {
    type Output = FpScalar;
    fn add(self, o: FpScalar) -> FpScalar {
        debug_assert_eq!(self.prime, o.prime);
        FpScalar { value: self.prime.add(self.value, o.value), prime: self.prime }
    }
}

impl std::ops::Sub for FpScalar {
    type Output = FpScalar;
    fn sub(self, o: FpScalar) -> FpScalar {
        debug_assert_eq!(self.prime, o.prime);
        FpScalar { value: self.prime.sub(self.value, o.value), prime: self.prime }
    }
}

impl std::ops::Mul for FpScalar {
    type Output = FpScalar;
    fn mul(self, o: FpScalar) -> FpScalar {
        debug_assert_eq!(self.prime, o.prime);
        FpScalar { value: self.prime.mul(self.value, o.value), prime: self.prime }
    }
}

impl std::ops::Neg for FpScalar {
    type Output = FpScalar;
    fn neg(self) -> FpScalar {
        FpScalar { value: self.prime.neg(self.value), prime: self.prime }
    }
}

impl fmt::Display for FpScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

/// C(top, bottom) mod p. Zero when bottom < 0, bottom > top >= 0, or top < 0.
pub fn binom_mod_p(top: i64, bottom: i64, p: Prime) -> FpScalar {
    FpScalar { value: p.binom(top, bottom), prime: p }
}

/// (-1)^(deg_a * deg_b).
pub fn koszul_sign(deg_a: i64, deg_b: i64, p: Prime) -> FpScalar {
    FpScalar { value: p.sign(deg_a.rem_euclid(2) * deg_b.rem_euclid(2)), prime: p }
}
