//! Arithmetic modulo the prime `q = 2^62 - 57` and exact matrix rank over
//! that field.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use super::matrix::{DenseMatrix, Scalar};

/// The field modulus, the largest prime below `2^62`.
pub const MODULUS: u64 = (1 << 62) - 57;

/// Residue modulo [`MODULUS`], always reduced into `[0, q)`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Fp(u64);

impl Fp {
    pub fn new(v: u64) -> Self {
        Self(v % MODULUS)
    }

    pub fn from_i64(v: i64) -> Self {
        let r = v.rem_euclid(MODULUS as i64);
        Self(r as u64)
    }

    pub fn value(self) -> u64 {
        self.0
    }

    pub fn pow(self, mut e: u64) -> Self {
        let mut base = self;
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse via Fermat. `None` for zero.
    pub fn inverse(self) -> Option<Self> {
        (self.0 != 0).then(|| self.pow(MODULUS - 2))
    }
}

impl fmt::Debug for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Add for Fp {
    type Output = Fp;
    #[inline]
    fn add(self, rhs: Fp) -> Fp {
        // both < 2^62, no overflow
        let s = self.0 + rhs.0;
        Fp(if s >= MODULUS { s - MODULUS } else { s })
    }
}

impl Sub for Fp {
    type Output = Fp;
    #[inline]
    fn sub(self, rhs: Fp) -> Fp {
        Fp(if self.0 >= rhs.0 {
            self.0 - rhs.0
        } else {
            self.0 + MODULUS - rhs.0
        })
    }
}

impl Mul for Fp {
    type Output = Fp;
    #[inline]
    fn mul(self, rhs: Fp) -> Fp {
        Fp(((self.0 as u128 * rhs.0 as u128) % MODULUS as u128) as u64)
    }
}

impl Neg for Fp {
    type Output = Fp;
    #[inline]
    fn neg(self) -> Fp {
        Fp::zero() - self
    }
}

impl Zero for Fp {
    fn zero() -> Self {
        Fp(0)
    }
    fn is_zero(&self) -> bool {
        self.0 == 0
    }
}

impl One for Fp {
    fn one() -> Self {
        Fp(1)
    }
}

impl Scalar for Fp {
    fn is_finite_entry(&self) -> bool {
        true
    }
}

pub type PrimeFieldMatrix = DenseMatrix<Fp>;

/// Exact rank by Gaussian elimination over the field.
pub fn field_rank(m: &PrimeFieldMatrix) -> usize {
    let mut a = m.clone();
    let (rows, cols) = (a.rows(), a.cols());
    let mut rank = 0;
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let Some(pivot) = (rank..rows).find(|&r| !a[(r, col)].is_zero()) else {
            continue;
        };
        if pivot != rank {
            for j in col..cols {
                let t = a[(pivot, j)];
                a[(pivot, j)] = a[(rank, j)];
                a[(rank, j)] = t;
            }
        }
        let inv = a[(rank, col)].inverse().expect("pivot is nonzero");
        for r in rank + 1..rows {
            let f = a[(r, col)];
            if f.is_zero() {
                continue;
            }
            let f = f * inv;
            for j in col..cols {
                let v = a[(rank, j)];
                a[(r, j)] = a[(r, j)] - f * v;
            }
        }
        rank += 1;
    }
    rank
}
