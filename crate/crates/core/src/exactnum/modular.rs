//! Arithmetic modulo pseudo-Mersenne primes `2^61 - c` and dense elimination
//! over those fields.
//!
//! Ranks computed here are lower bounds for the rational rank; callers turn
//! them into exact statements either by hitting the trivial upper bound or by
//! lifting and verifying an exact kernel.

use num_bigint::{BigInt, Sign};
use num_traits::{ToPrimitive, Zero};

use super::Rational;

/// Offsets `c` such that `2^61 - c` is prime.
pub const PRIME_OFFSETS: [u64; 8] = [1, 31, 45, 229, 259, 283, 339, 391];

const SHIFT: u32 = 61;
const LOW_MASK: u128 = (1u128 << SHIFT) - 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Field {
    p: u64,
    c: u64,
}

impl Field {
    /// The `index`-th prime of the family, wrapping around.
    pub fn nth(index: usize) -> Field {
        let c = PRIME_OFFSETS[index % PRIME_OFFSETS.len()];
        Field { p: (1u64 << SHIFT) - c, c }
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    #[inline]
    fn reduce(&self, z: u128) -> u64 {
        // z = hi * 2^61 + lo  ==  hi * c + lo  (mod p); two folds bring any
        // product of reduced operands below 2p.
        let z = (z >> SHIFT) * self.c as u128 + (z & LOW_MASK);
        let z = (z >> SHIFT) * self.c as u128 + (z & LOW_MASK);
        let mut r = z as u64;
        if r >= self.p {
            r -= self.p;
        }
        r
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        self.reduce(a as u128 * b as u128)
    }

    pub fn pow(&self, mut a: u64, mut e: u64) -> u64 {
        let mut r = 1;
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(r, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        r
    }

    pub fn inv(&self, a: u64) -> Option<u64> {
        if a == 0 {
            None
        } else {
            Some(self.pow(a, self.p - 2))
        }
    }

    pub fn from_i64(&self, a: i64) -> u64 {
        self.from_i128(a as i128)
    }

    pub fn from_i128(&self, a: i128) -> u64 {
        let r = a.rem_euclid(self.p as i128);
        r as u64
    }

    pub fn from_bigint(&self, a: &BigInt) -> u64 {
        if let Some(v) = a.to_i128() {
            return self.from_i128(v);
        }
        let m = BigInt::from(self.p);
        let r = ((a % &m) + &m) % &m;
        r.to_u64().expect("residue fits in u64")
    }

    /// `None` when the denominator vanishes modulo the prime.
    pub fn from_rational(&self, a: &Rational) -> Option<u64> {
        let d = self.from_bigint(a.denom());
        let inv = self.inv(d)?;
        Some(self.mul(self.from_bigint(a.numer()), inv))
    }

    /// Representative in `(-p/2, p/2]`.
    pub fn to_symmetric(&self, a: u64) -> i64 {
        if a > self.p / 2 {
            a as i64 - self.p as i64
        } else {
            a as i64
        }
    }
}

pub fn bigint_from_u64(a: u64) -> BigInt {
    BigInt::from_biguint(Sign::Plus, a.into())
}

/// Outcome of forward elimination: the rank together with the original
/// indices of the rows and columns where pivots were found. The square
/// submatrix on those rows and columns is invertible modulo the prime.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Echelon {
    pub rank: usize,
    pub pivot_rows: Vec<usize>,
    pub pivot_cols: Vec<usize>,
}

pub fn echelon(field: &Field, mut rows: Vec<Vec<u64>>, cols: usize) -> Echelon {
    let mut order: Vec<usize> = (0..rows.len()).collect();
    let mut pivot_rows = Vec::new();
    let mut pivot_cols = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).find(|&i| rows[i][c] != 0) else {
            continue;
        };
        rows.swap(r, p);
        order.swap(r, p);
        let inv = field.inv(rows[r][c]).expect("pivot is nonzero");
        let (top, bottom) = rows.split_at_mut(r + 1);
        let prow = &mut top[r];
        for v in prow[c..].iter_mut() {
            *v = field.mul(*v, inv);
        }
        for row in bottom.iter_mut() {
            let f = row[c];
            if f == 0 {
                continue;
            }
            for (x, &pv) in row[c..].iter_mut().zip(&prow[c..]) {
                if pv != 0 {
                    *x = field.sub(*x, field.mul(f, pv));
                }
            }
        }
        pivot_rows.push(order[r]);
        pivot_cols.push(c);
        r += 1;
    }
    Echelon {
        rank: r,
        pivot_rows,
        pivot_cols,
    }
}

pub fn rank(field: &Field, rows: Vec<Vec<u64>>, cols: usize) -> usize {
    echelon(field, rows, cols).rank
}

/// Inverse of a square matrix, `None` if singular modulo the prime.
pub fn inverse(field: &Field, a: &[Vec<u64>]) -> Option<Vec<Vec<u64>>> {
    let n = a.len();
    let mut aug: Vec<Vec<u64>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.resize(2 * n, 0);
            r[n + i] = 1;
            r
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&i| aug[i][c] != 0)?;
        aug.swap(c, p);
        let inv = field.inv(aug[c][c])?;
        for v in aug[c].iter_mut() {
            *v = field.mul(*v, inv);
        }
        let prow = aug[c].clone();
        for (i, row) in aug.iter_mut().enumerate() {
            if i == c || row[c] == 0 {
                continue;
            }
            let f = row[c];
            for (x, &pv) in row.iter_mut().zip(&prow) {
                if pv != 0 {
                    *x = field.sub(*x, field.mul(f, pv));
                }
            }
        }
    }
    Some(aug.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Rational number `n/d` with `|n|, d <= sqrt(m/2)` congruent to `a` modulo
/// `m`, if one exists.
pub fn rational_reconstruct(a: &BigInt, m: &BigInt) -> Option<(BigInt, BigInt)> {
    let a = ((a % m) + m) % m;
    let bound = (m / BigInt::from(2)).sqrt();
    let (mut r0, mut r1) = (m.clone(), a);
    let (mut t0, mut t1) = (BigInt::zero(), BigInt::from(1));
    while r1 > bound {
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        let t2 = &t0 - &q * &t1;
        r0 = std::mem::replace(&mut r1, r2);
        t0 = std::mem::replace(&mut t1, t2);
    }
    if t1.is_zero() || t1.magnitude() > bound.magnitude() {
        return None;
    }
    if t1.sign() == Sign::Minus {
        Some((-r1, -t1))
    } else {
        Some((r1, t1))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduction_matches_u128_remainder() {
        for idx in 0..PRIME_OFFSETS.len() {
            let f = Field::nth(idx);
            let p = f.modulus();
            for &(a, b) in &[(p - 1, p - 1), (p - 2, 3), (1u64 << 60, (1u64 << 60) + 7), (0, 5)] {
                let want = ((a as u128 * b as u128) % p as u128) as u64;
                assert_eq!(f.mul(a, b), want);
            }
        }
    }

    #[test]
    fn inverse_and_symmetric_lift() {
        let f = Field::nth(0);
        let x = f.from_i64(-12345);
        assert_eq!(f.to_symmetric(x), -12345);
        let inv = f.inv(x).unwrap();
        assert_eq!(f.mul(x, inv), 1);
        assert_eq!(f.from_rational(&super::super::ratio(1, 2)), f.inv(2));
    }

    #[test]
    fn echelon_reports_invertible_pivot_block() {
        let f = Field::nth(1);
        let rows: Vec<Vec<u64>> = [[0i64, 1, 1], [0, 2, 2], [1, 0, 1]]
            .iter()
            .map(|r| r.iter().map(|&v| f.from_i64(v)).collect())
            .collect();
        let e = echelon(&f, rows.clone(), 3);
        assert_eq!(e.rank, 2);
        let block: Vec<Vec<u64>> = e
            .pivot_rows
            .iter()
            .map(|&i| e.pivot_cols.iter().map(|&j| rows[i][j]).collect())
            .collect();
        assert!(inverse(&f, &block).is_some());
    }

    #[test]
    fn reconstructs_small_fractions() {
        let m = BigInt::from(1_000_003i64) * BigInt::from(1_000_033i64);
        let seven_inv = {
            let (mut a, mut b) = (BigInt::from(7), m.clone());
            let (mut x0, mut x1) = (BigInt::from(1), BigInt::zero());
            while !b.is_zero() {
                let q = &a / &b;
                let t = &a - &q * &b;
                a = std::mem::replace(&mut b, t);
                let t = &x0 - &q * &x1;
                x0 = std::mem::replace(&mut x1, t);
            }
            ((x0 % &m) + &m) % &m
        };
        let a = (BigInt::from(-3) * seven_inv % &m + &m) % &m;
        assert_eq!(
            rational_reconstruct(&a, &m),
            Some((BigInt::from(-3), BigInt::from(7)))
        );
    }
}
