//! Arithmetic in `F_p` for primes below `2^32`.

use crate::error::{Error, Result};

/// `2^31 − 1`.
pub const DEFAULT_PRIME: u64 = 2_147_483_647;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Field {
    p: u64,
}

impl Field {
    pub fn new(p: u64) -> Result<Self> {
        if p >= 1 << 32 || !is_prime(p) {
            return Err(Error::InvalidPrime(p));
        }
        Ok(Field { p })
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn reduce(&self, a: u64) -> u64 {
        a % self.p
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        (a + b) % self.p
    }

    pub fn sub(&self, a: u64, b: u64) -> u64 {
        (a + self.p - b) % self.p
    }

    pub fn neg(&self, a: u64) -> u64 {
        (self.p - a) % self.p
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        a * b % self.p
    }

    pub fn pow(&self, mut a: u64, mut e: u64) -> u64 {
        let mut r = 1 % self.p;
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(r, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        r
    }

    /// Inverse of a nonzero element.
    pub fn inv(&self, a: u64) -> Option<u64> {
        (a % self.p != 0).then(|| self.pow(a, self.p - 2))
    }

    pub fn dot(&self, a: &[u64], b: &[u64]) -> u64 {
        a.iter().zip(b).fold(0, |acc, (&x, &y)| self.add(acc, self.mul(x, y)))
    }

    /// Inverse of the row-major `n×n` matrix `m`, by Gauss–Jordan.
    pub fn invert(&self, m: &[u64], n: usize) -> Option<Vec<u64>> {
        let w = 2 * n;
        let mut a = vec![0u64; n * w];
        for r in 0..n {
            a[r * w..r * w + n].copy_from_slice(&m[r * n..(r + 1) * n]);
            a[r * w + n + r] = 1;
        }
        for col in 0..n {
            let pivot = (col..n).find(|&r| a[r * w + col] != 0)?;
            if pivot != col {
                for c in 0..w {
                    a.swap(pivot * w + c, col * w + c);
                }
            }
            let inv = self.inv(a[col * w + col])?;
            for c in 0..w {
                a[col * w + c] = self.mul(a[col * w + c], inv);
            }
            for r in 0..n {
                let f = a[r * w + col];
                if r != col && f != 0 {
                    for c in 0..w {
                        let v = self.mul(f, a[col * w + c]);
                        a[r * w + c] = self.sub(a[r * w + c], v);
                    }
                }
            }
        }
        Some((0..n).flat_map(|r| a[r * w + n..(r + 1) * w].to_vec()).collect())
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}
