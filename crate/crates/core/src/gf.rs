//! Arithmetic in F_p and F_{p^2} for odd p.
//!
//! Elements of F_{p^2} are written c0 + c1*t in the polynomial basis with
//! t^2 = r for the smallest quadratic non-residue r mod p; then the p-power
//! Frobenius is the conjugation c0 - c1*t. For the prime field the
//! Frobenius is the identity, which keeps the semilinear layer above this
//! one uniform in the field degree.

use crate::error::{Error, Result};

/// Field descriptor: F_p (degree 1) or F_{p^2} (degree 2).
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Field {
    p: u64,
    degree: u8,
    nonresidue: u64, // t^2 = nonresidue; 0 when degree = 1
}

/// A field element; c1 = 0 always when the field has degree 1.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Default)]
pub struct El {
    pub c0: u64,
    pub c1: u64,
}

fn is_odd_prime(p: u64) -> bool {
    if p < 3 || p % 2 == 0 {
        return false;
    }
    let mut d = 3;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

impl Field {
    pub fn prime(p: u64) -> Result<Field> {
        if !is_odd_prime(p) {
            return Err(Error::NotOddPrime(p));
        }
        Ok(Field {
            p,
            degree: 1,
            nonresidue: 0,
        })
    }

    pub fn quadratic(p: u64) -> Result<Field> {
        if !is_odd_prime(p) {
            return Err(Error::NotOddPrime(p));
        }
        let mut r = 2;
        while pow_mod(r, (p - 1) / 2, p) != p - 1 {
            r += 1;
        }
        Ok(Field {
            p,
            degree: 2,
            nonresidue: r,
        })
    }

    pub fn with_degree(p: u64, degree: u8) -> Result<Field> {
        match degree {
            1 => Field::prime(p),
            2 => Field::quadratic(p),
            d => Err(Error::SchemaViolation(format!(
                "field_degree must be 1 or 2, got {d}"
            ))),
        }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> u8 {
        self.degree
    }

    pub fn zero(&self) -> El {
        El { c0: 0, c1: 0 }
    }

    pub fn one(&self) -> El {
        El { c0: 1, c1: 0 }
    }

    pub fn from_int(&self, v: i64) -> El {
        El {
            c0: v.rem_euclid(self.p as i64) as u64,
            c1: 0,
        }
    }

    pub fn from_pair(&self, c0: i64, c1: i64) -> Result<El> {
        if self.degree == 1 && c1.rem_euclid(self.p as i64) != 0 {
            return Err(Error::SchemaViolation(
                "coefficient pair with nonzero t-part in a prime field".into(),
            ));
        }
        Ok(El {
            c0: c0.rem_euclid(self.p as i64) as u64,
            c1: c1.rem_euclid(self.p as i64) as u64,
        })
    }

    pub fn is_zero(&self, x: El) -> bool {
        x.c0 == 0 && x.c1 == 0
    }

    pub fn add(&self, x: El, y: El) -> El {
        El {
            c0: add_mod(x.c0, y.c0, self.p),
            c1: add_mod(x.c1, y.c1, self.p),
        }
    }

    pub fn neg(&self, x: El) -> El {
        El {
            c0: neg_mod(x.c0, self.p),
            c1: neg_mod(x.c1, self.p),
        }
    }

    pub fn sub(&self, x: El, y: El) -> El {
        self.add(x, self.neg(y))
    }

    pub fn mul(&self, x: El, y: El) -> El {
        let p = self.p;
        // (a + bt)(c + dt) = ac + r*bd + (ad + bc) t
        let ac = mul_mod(x.c0, y.c0, p);
        let bd = mul_mod(x.c1, y.c1, p);
        let ad = mul_mod(x.c0, y.c1, p);
        let bc = mul_mod(x.c1, y.c0, p);
        El {
            c0: add_mod(ac, mul_mod(self.nonresidue, bd, p), p),
            c1: add_mod(ad, bc, p),
        }
    }

    pub fn inv(&self, x: El) -> Result<El> {
        if self.is_zero(x) {
            return Err(Error::InvariantViolation("division by zero".into()));
        }
        let p = self.p;
        if x.c1 == 0 {
            return Ok(El {
                c0: pow_mod(x.c0, p - 2, p),
                c1: 0,
            });
        }
        // (a + bt)^{-1} = (a - bt) / (a^2 - r b^2); the norm is nonzero
        // because t^2 = r has no root in F_p.
        let norm = sub_mod(
            mul_mod(x.c0, x.c0, p),
            mul_mod(self.nonresidue, mul_mod(x.c1, x.c1, p), p),
            p,
        );
        let ninv = pow_mod(norm, p - 2, p);
        Ok(El {
            c0: mul_mod(x.c0, ninv, p),
            c1: mul_mod(neg_mod(x.c1, p), ninv, p),
        })
    }

    /// x^p; identity on the prime field, conjugation on F_{p^2}.
    pub fn frobenius(&self, x: El) -> El {
        if self.degree == 1 {
            x
        } else {
            El {
                c0: x.c0,
                c1: neg_mod(x.c1, self.p),
            }
        }
    }
}

fn add_mod(a: u64, b: u64, p: u64) -> u64 {
    (a + b) % p
}

fn sub_mod(a: u64, b: u64, p: u64) -> u64 {
    (a + p - b) % p
}

fn neg_mod(a: u64, p: u64) -> u64 {
    (p - a % p) % p
}

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, p);
        }
        base = mul_mod(base, base, p);
        exp >>= 1;
    }
    acc
}
