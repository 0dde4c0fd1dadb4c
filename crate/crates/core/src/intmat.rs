//! Exact integer matrices: big-integer products and powers, the
//! characteristic polynomial by the Faddeev-LeVerrier recursion (whose
//! divisions are exact over Z), p-adic valuations, and the p-adic Newton
//! polygon of a polynomial, read off the lower convex hull of the
//! coefficient valuations.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rat::{rat, Rat};

#[derive(Clone, PartialEq, Eq)]
pub struct ZMat {
    n: usize,
    data: Vec<BigInt>,
}

impl ZMat {
    pub fn zeros(n: usize) -> Self {
        ZMat {
            n,
            data: vec![BigInt::zero(); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = ZMat::zeros(n);
        for i in 0..n {
            m.set(i, i, BigInt::one());
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::SchemaViolation(format!(
                "matrix must be square, got {n} rows of lengths {:?}",
                rows.iter().map(|r| r.len()).collect::<Vec<_>>()
            )));
        }
        Ok(ZMat {
            n,
            data: rows
                .iter()
                .flat_map(|r| r.iter().map(|&v| BigInt::from(v)))
                .collect(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.data[i * self.n + j] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn mul(&self, other: &ZMat) -> ZMat {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = ZMat::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        let cur = out.get(i, j) + a * b;
                        out.set(i, j, cur);
                    }
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> ZMat {
        let mut out = ZMat::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                out.set(j, i, self.get(i, j).clone());
            }
        }
        out
    }

    pub fn scale(&self, c: &BigInt) -> ZMat {
        let mut out = self.clone();
        for x in &mut out.data {
            *x *= c;
        }
        out
    }

    pub fn add(&self, other: &ZMat) -> ZMat {
        assert_eq!(self.n, other.n);
        let mut out = self.clone();
        for (x, y) in out.data.iter_mut().zip(&other.data) {
            *x += y;
        }
        out
    }

    pub fn trace(&self) -> BigInt {
        (0..self.n).map(|i| self.get(i, i).clone()).sum()
    }

    /// Minimum p-adic valuation over the nonzero entries; None for the
    /// zero matrix.
    pub fn min_valuation(&self, p: u64) -> Option<u32> {
        self.data
            .iter()
            .filter(|x| !x.is_zero())
            .map(|x| val_p(x, p).expect("nonzero entry has finite valuation"))
            .min()
    }

    /// Divides every entry by p^s; panics if any entry is not divisible.
    pub fn div_pow_p(&self, p: u64, s: u32) -> ZMat {
        let divisor = BigInt::from(p).pow(s);
        let mut out = self.clone();
        for x in &mut out.data {
            let (quot, rem) = num_integer::Integer::div_rem(&*x, &divisor);
            assert!(rem.is_zero(), "entry not divisible by p^{s}");
            *x = quot;
        }
        out
    }

    /// Reduction mod p as a matrix over the prime field.
    pub fn mod_p(&self, field: crate::gf::Field) -> crate::linalg::Mat {
        let n = self.n;
        let p = BigInt::from(field.p());
        let mut out = crate::linalg::Mat::zeros(field, n, n);
        for i in 0..n {
            for j in 0..n {
                let r = num_integer::Integer::mod_floor(self.get(i, j), &p);
                out.set(i, j, field.from_int(i64::try_from(r).expect("residue fits i64")));
            }
        }
        out
    }

    /// Coefficients c_0..c_n of det(T*I - A), monic: c_n = 1.
    /// Faddeev-LeVerrier; every division by k is exact over the integers.
    pub fn charpoly(&self) -> Vec<BigInt> {
        let n = self.n;
        let mut coeffs = vec![BigInt::zero(); n + 1];
        coeffs[n] = BigInt::one();
        let mut m = ZMat::zeros(n);
        for k in 1..=n {
            // M_k = A*M_{k-1} + c_{n-k+1} * I
            m = self.mul(&m);
            let c = coeffs[n - k + 1].clone();
            for i in 0..n {
                let cur = m.get(i, i) + &c;
                m.set(i, i, cur);
            }
            let t = self.mul(&m).trace();
            let (quot, rem) = num_integer::Integer::div_rem(&(-t), &BigInt::from(k as i64));
            debug_assert!(rem.is_zero());
            coeffs[n - k] = quot;
        }
        coeffs
    }

    /// det(A) = (-1)^n * c_0 of the characteristic polynomial.
    pub fn det(&self) -> BigInt {
        let c0 = self.charpoly().swap_remove(0);
        if self.n % 2 == 0 {
            c0
        } else {
            -c0
        }
    }
}

impl std::fmt::Debug for ZMat {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "ZMat {}x{}", self.n, self.n)?;
        for i in 0..self.n {
            let row: Vec<String> = (0..self.n).map(|j| self.get(i, j).to_string()).collect();
            writeln!(f, "  [{}]", row.join(" "))?;
        }
        Ok(())
    }
}

/// p-adic valuation of a nonzero integer; None for zero.
pub fn val_p(x: &BigInt, p: u64) -> Option<u32> {
    if x.is_zero() {
        return None;
    }
    let p = BigInt::from(p);
    let mut v = 0u32;
    let mut cur = x.abs();
    loop {
        let (quot, rem) = num_integer::Integer::div_rem(&cur, &p);
        if !rem.is_zero() {
            return Some(v);
        }
        v += 1;
        cur = quot;
    }
}

/// Valuations of the roots of a polynomial with integer coefficients
/// (c_0 != 0, ascending degree order), with multiplicities: the negated
/// slopes of the lower convex hull of {(i, v_p(c_i))}.
pub fn poly_root_valuations(coeffs: &[BigInt], p: u64) -> Result<Vec<(Rat, usize)>> {
    let deg = coeffs.len() - 1;
    if coeffs[0].is_zero() {
        return Err(Error::SingularMatrix(
            "constant coefficient vanishes; a root has infinite valuation".into(),
        ));
    }
    let points: Vec<(i64, i64)> = coeffs
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(i, c)| (i as i64, val_p(c, p).unwrap() as i64))
        .collect();

    // Lower convex hull, left to right (points already sorted by x).
    let mut hull: Vec<(i64, i64)> = Vec::new();
    for &pt in &points {
        while hull.len() >= 2 {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            // Drop b when it is on or above the segment a->pt.
            if (b.1 - a.1) * (pt.0 - a.0) >= (pt.1 - a.1) * (b.0 - a.0) {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(pt);
    }

    // Hull slopes increase strictly left to right, so the negated slopes
    // are distinct; sorting ascending is all the canonicalization needed.
    let mut out: Vec<(Rat, usize)> = hull
        .windows(2)
        .map(|seg| {
            let (x0, y0) = seg[0];
            let (x1, y1) = seg[1];
            (rat(y0 - y1, x1 - x0), (x1 - x0) as usize)
        })
        .collect();
    out.sort_by_key(|&(s, _)| s);
    debug_assert_eq!(out.iter().map(|&(_, h)| h).sum::<usize>(), deg);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn from_rows(rows: &[&[i64]]) -> ZMat {
        ZMat::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn charpoly_of_companion_shift() {
        // Cyclic shift with p in the corner: T^4 - 3.
        let a = from_rows(&[&[0, 0, 0, 3], &[1, 0, 0, 0], &[0, 1, 0, 0], &[0, 0, 1, 0]]);
        let c = a.charpoly();
        let expected: Vec<BigInt> = [-3, 0, 0, 0, 1].iter().map(|&v| BigInt::from(v)).collect();
        assert_eq!(c, expected);
    }

    #[test]
    fn charpoly_of_diagonal() {
        let a = from_rows(&[&[1, 0], &[0, 5]]);
        // (T-1)(T-5) = T^2 - 6T + 5
        let expected: Vec<BigInt> = [5, -6, 1].iter().map(|&v| BigInt::from(v)).collect();
        assert_eq!(a.charpoly(), expected);
        assert_eq!(a.det(), BigInt::from(5));
    }

    #[test]
    fn det_sign_on_odd_dimension() {
        let a = from_rows(&[&[2, 0, 0], &[0, 3, 0], &[0, 0, 5]]);
        assert_eq!(a.det(), BigInt::from(30));
        let b = from_rows(&[&[0, 1, 0], &[1, 0, 0], &[0, 0, 1]]);
        assert_eq!(b.det(), BigInt::from(-1));
    }

    #[test]
    fn valuations() {
        assert_eq!(val_p(&BigInt::from(45), 3), Some(2));
        assert_eq!(val_p(&BigInt::from(-27), 3), Some(3));
        assert_eq!(val_p(&BigInt::from(7), 3), Some(0));
        assert_eq!(val_p(&BigInt::zero(), 3), None);
    }

    #[test]
    fn newton_polygon_of_t4_minus_p() {
        let coeffs: Vec<BigInt> = [-5, 0, 0, 0, 1].iter().map(|&v| BigInt::from(v)).collect();
        let slopes = poly_root_valuations(&coeffs, 5).unwrap();
        assert_eq!(slopes, vec![(rat(1, 4), 4)]);
    }

    #[test]
    fn newton_polygon_of_split_quadratic() {
        // (T-1)(T-5): valuations 0 and 1 at p = 5.
        let coeffs: Vec<BigInt> = [5, -6, 1].iter().map(|&v| BigInt::from(v)).collect();
        let slopes = poly_root_valuations(&coeffs, 5).unwrap();
        assert_eq!(slopes, vec![(rat(0, 1), 1), (rat(1, 1), 1)]);
    }

    #[test]
    fn newton_polygon_rejects_zero_constant_term() {
        let coeffs: Vec<BigInt> = [0, 1].iter().map(|&v| BigInt::from(v)).collect();
        assert_eq!(
            poly_root_valuations(&coeffs, 5).unwrap_err().name(),
            "SingularMatrix"
        );
    }

    #[test]
    fn power_and_divide() {
        let a = from_rows(&[&[0, 3], &[1, 0]]);
        let a2 = a.mul(&a);
        assert_eq!(a2.min_valuation(3), Some(1));
        assert_eq!(a2.div_pow_p(3, 1), ZMat::identity(2));
    }
}
