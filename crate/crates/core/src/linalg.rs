//! Exact linear algebra over F_p / F_{p^2}: reduced echelon forms,
//! canonical subspaces, and sigma-semilinear maps.
//!
//! Subspaces are stored by their reduced row echelon basis, which is
//! canonical, so subspace equality is plain structural equality. A
//! semilinear map x -> A * sigma^t(x) carries its twist t in {-1, 0, +1};
//! images, preimages and kernels account for the twist by moving the
//! entrywise Frobenius across the solve.

use std::fmt;

use crate::gf::{El, Field};

#[derive(Clone, PartialEq, Eq)]
pub struct Mat {
    field: Field,
    rows: usize,
    cols: usize,
    data: Vec<El>,
}

impl Mat {
    pub fn zeros(field: Field, rows: usize, cols: usize) -> Self {
        Mat {
            field,
            rows,
            cols,
            data: vec![field.zero(); rows * cols],
        }
    }

    pub fn identity(field: Field, n: usize) -> Self {
        let mut m = Mat::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, field.one());
        }
        m
    }

    pub fn from_rows(field: Field, rows: Vec<Vec<El>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c));
        Mat {
            field,
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> El {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: El) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> Vec<El> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| self.field.is_zero(x))
    }

    pub fn mul(&self, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.rows);
        let f = self.field;
        let mut out = Mat::zeros(f, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if f.is_zero(a) {
                    continue;
                }
                for j in 0..other.cols {
                    let add = f.mul(a, other.get(k, j));
                    out.set(i, j, f.add(out.get(i, j), add));
                }
            }
        }
        out
    }

    /// Matrix-vector product (vector as coordinates, length = cols).
    pub fn apply(&self, v: &[El]) -> Vec<El> {
        assert_eq!(v.len(), self.cols);
        let f = self.field;
        (0..self.rows)
            .map(|i| {
                let mut acc = f.zero();
                for j in 0..self.cols {
                    acc = f.add(acc, f.mul(self.get(i, j), v[j]));
                }
                acc
            })
            .collect()
    }

    pub fn transpose(&self) -> Mat {
        let mut out = Mat::zeros(self.field, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j));
            }
        }
        out
    }

    /// Entrywise Frobenius (= entrywise inverse Frobenius, since the
    /// Frobenius is an involution on F_{p^2} and trivial on F_p).
    pub fn frobenius(&self) -> Mat {
        let mut out = self.clone();
        for x in &mut out.data {
            *x = self.field.frobenius(*x);
        }
        out
    }

    /// Reduced row echelon form with the list of pivot columns.
    pub fn rref(&self) -> (Mat, Vec<usize>) {
        let f = self.field;
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(pivot_row) = (r..m.rows).find(|&i| !f.is_zero(m.get(i, c))) else {
                continue;
            };
            for j in 0..m.cols {
                let tmp = m.get(r, j);
                m.set(r, j, m.get(pivot_row, j));
                m.set(pivot_row, j, tmp);
            }
            let inv = f.inv(m.get(r, c)).unwrap();
            for j in 0..m.cols {
                m.set(r, j, f.mul(m.get(r, j), inv));
            }
            for i in 0..m.rows {
                if i != r && !f.is_zero(m.get(i, c)) {
                    let factor = m.get(i, c);
                    for j in 0..m.cols {
                        let v = f.sub(m.get(i, j), f.mul(factor, m.get(r, j)));
                        m.set(i, j, v);
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of {x : self * x = 0}, one vector per free column, in
    /// ascending column order.
    pub fn null_space(&self) -> Vec<Vec<El>> {
        let f = self.field;
        let (r, pivots) = self.rref();
        let mut basis = Vec::new();
        let pivot_set: std::collections::BTreeSet<usize> = pivots.iter().copied().collect();
        for free in 0..self.cols {
            if pivot_set.contains(&free) {
                continue;
            }
            let mut v = vec![f.zero(); self.cols];
            v[free] = f.one();
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = f.neg(r.get(row, free));
            }
            basis.push(v);
        }
        basis
    }
}

impl fmt::Debug for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Mat {}x{} over GF({}^{})", self.rows, self.cols, self.field.p(), self.field.degree())?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols)
                .map(|j| {
                    let e = self.get(i, j);
                    if e.c1 == 0 {
                        format!("{}", e.c0)
                    } else {
                        format!("{}+{}t", e.c0, e.c1)
                    }
                })
                .collect();
            writeln!(f, "  [{}]", row.join(" "))?;
        }
        Ok(())
    }
}

/// A subspace of k^ambient in canonical (reduced echelon) form.
#[derive(Clone, PartialEq, Eq)]
pub struct Subspace {
    field: Field,
    ambient: usize,
    basis: Vec<Vec<El>>, // RREF rows, no zero rows
}

impl Subspace {
    pub fn zero(field: Field, ambient: usize) -> Self {
        Subspace {
            field,
            ambient,
            basis: Vec::new(),
        }
    }

    pub fn full(field: Field, ambient: usize) -> Self {
        Subspace::span(
            field,
            ambient,
            (0..ambient)
                .map(|i| unit_vector(field, ambient, i))
                .collect(),
        )
    }

    pub fn span(field: Field, ambient: usize, vectors: Vec<Vec<El>>) -> Self {
        if vectors.is_empty() {
            return Subspace::zero(field, ambient);
        }
        assert!(vectors.iter().all(|v| v.len() == ambient));
        let m = Mat::from_rows(field, vectors);
        let (r, pivots) = m.rref();
        let basis = (0..pivots.len()).map(|i| r.row(i)).collect();
        Subspace {
            field,
            ambient,
            basis,
        }
    }

    /// Span of the standard basis vectors at the given (0-based) indices.
    pub fn coordinate(field: Field, ambient: usize, indices: &[usize]) -> Self {
        Subspace::span(
            field,
            ambient,
            indices
                .iter()
                .map(|&i| unit_vector(field, ambient, i))
                .collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn basis(&self) -> &[Vec<El>] {
        &self.basis
    }

    pub fn contains_vector(&self, v: &[El]) -> bool {
        let mut rows = self.basis.clone();
        rows.push(v.to_vec());
        Mat::from_rows(self.field, rows).rank() == self.dim()
    }

    pub fn contains(&self, other: &Subspace) -> bool {
        other.basis.iter().all(|v| self.contains_vector(v))
    }

    pub fn sum(&self, other: &Subspace) -> Subspace {
        let mut rows = self.basis.clone();
        rows.extend(other.basis.iter().cloned());
        Subspace::span(self.field, self.ambient, rows)
    }

    /// Zassenhaus: echelonize [B1 | B1; B2 | 0]; rows with zero left half
    /// carry the intersection in their right half.
    pub fn intersect(&self, other: &Subspace) -> Subspace {
        let f = self.field;
        let n = self.ambient;
        let mut rows: Vec<Vec<El>> = Vec::new();
        for v in &self.basis {
            let mut row = v.clone();
            row.extend(v.iter().copied());
            rows.push(row);
        }
        for v in &other.basis {
            let mut row = v.clone();
            row.extend(std::iter::repeat(f.zero()).take(n));
            rows.push(row);
        }
        if rows.is_empty() {
            return Subspace::zero(f, n);
        }
        let (r, pivots) = Mat::from_rows(f, rows).rref();
        let mut inter = Vec::new();
        for i in 0..pivots.len() {
            let row = r.row(i);
            if row[..n].iter().all(|&x| f.is_zero(x)) {
                inter.push(row[n..].to_vec());
            }
        }
        Subspace::span(f, n, inter)
    }

    /// Image of the subspace under entrywise Frobenius.
    pub fn frobenius(&self) -> Subspace {
        Subspace::span(
            self.field,
            self.ambient,
            self.basis
                .iter()
                .map(|v| v.iter().map(|&x| self.field.frobenius(x)).collect())
                .collect(),
        )
    }

    /// Rows spanning the annihilator {c : v . c = 0 for all v in self}.
    fn annihilator_rows(&self) -> Vec<Vec<El>> {
        if self.basis.is_empty() {
            return (0..self.ambient)
                .map(|i| unit_vector(self.field, self.ambient, i))
                .collect();
        }
        Mat::from_rows(self.field, self.basis.clone()).null_space()
    }
}

impl fmt::Debug for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subspace(dim {} of {})", self.dim(), self.ambient)
    }
}

fn unit_vector(field: Field, n: usize, i: usize) -> Vec<El> {
    let mut v = vec![field.zero(); n];
    v[i] = field.one();
    v
}

/// Twist of a semilinear map: the map sends x to A * sigma^twist(x).
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Twist {
    /// sigma-semilinear (Frobenius), e.g. F.
    Frobenius,
    /// sigma^{-1}-semilinear, e.g. V.
    InverseFrobenius,
    /// plain linear
    None,
}

/// A map x -> A * sigma^t(x) on k^n with its twist.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SemilinearMap {
    mat: Mat,
    twist: Twist,
}

impl SemilinearMap {
    pub fn new(mat: Mat, twist: Twist) -> Self {
        assert_eq!(mat.rows(), mat.cols());
        SemilinearMap { mat, twist }
    }

    pub fn matrix(&self) -> &Mat {
        &self.mat
    }

    pub fn twist(&self) -> Twist {
        self.twist
    }

    fn n(&self) -> usize {
        self.mat.rows()
    }

    fn twist_el(&self, x: El) -> El {
        match self.twist {
            Twist::None => x,
            // On our fields sigma is an involution, so sigma^{-1} = sigma.
            Twist::Frobenius | Twist::InverseFrobenius => self.mat.field().frobenius(x),
        }
    }

    pub fn apply(&self, v: &[El]) -> Vec<El> {
        let twisted: Vec<El> = v.iter().map(|&x| self.twist_el(x)).collect();
        self.mat.apply(&twisted)
    }

    /// Image of a subspace: A * sigma^t(W).
    pub fn image_of(&self, w: &Subspace) -> Subspace {
        Subspace::span(
            self.mat.field(),
            self.n(),
            w.basis().iter().map(|v| self.apply(v)).collect(),
        )
    }

    pub fn image(&self) -> Subspace {
        self.image_of(&Subspace::full(self.mat.field(), self.n()))
    }

    /// Preimage {x : A * sigma^t(x) in W} = sigma^{-t}({y : A y in W}).
    pub fn preimage_of(&self, w: &Subspace) -> Subspace {
        let f = self.mat.field();
        let n = self.n();
        let ann = w.annihilator_rows();
        let linear_preimage = if ann.is_empty() {
            Subspace::full(f, n)
        } else {
            let c = Mat::from_rows(f, ann);
            let ca = c.mul(&self.mat);
            Subspace::span(f, n, ca.null_space())
        };
        match self.twist {
            Twist::None => linear_preimage,
            Twist::Frobenius | Twist::InverseFrobenius => linear_preimage.frobenius(),
        }
    }

    /// Kernel {x : A * sigma^t(x) = 0}.
    pub fn kernel(&self) -> Subspace {
        self.preimage_of(&Subspace::zero(self.mat.field(), self.n()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::Field;

    fn f7() -> Field {
        Field::prime(7).unwrap()
    }

    fn mat(field: Field, rows: &[&[i64]]) -> Mat {
        Mat::from_rows(
            field,
            rows.iter()
                .map(|r| r.iter().map(|&v| field.from_int(v)).collect())
                .collect(),
        )
    }

    #[test]
    fn rref_and_rank() {
        let f = f7();
        let m = mat(f, &[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        assert_eq!(m.rank(), 2);
        let (r, pivots) = m.rref();
        assert_eq!(pivots, vec![0, 1]);
        // check pivot normalization
        assert_eq!(r.get(0, 0), f.one());
    }

    #[test]
    fn null_space_is_kernel() {
        let f = f7();
        let m = mat(f, &[&[1, 2, 3], &[0, 1, 1]]);
        for v in m.null_space() {
            assert!(m.apply(&v).iter().all(|&x| f.is_zero(x)));
        }
        assert_eq!(m.null_space().len(), 1);
    }

    #[test]
    fn subspace_canonical_equality() {
        let f = f7();
        let a = Subspace::span(
            f,
            3,
            vec![
                vec![f.from_int(1), f.from_int(1), f.from_int(0)],
                vec![f.from_int(0), f.from_int(0), f.from_int(1)],
            ],
        );
        let b = Subspace::span(
            f,
            3,
            vec![
                vec![f.from_int(2), f.from_int(2), f.from_int(3)],
                vec![f.from_int(0), f.from_int(0), f.from_int(5)],
            ],
        );
        assert_eq!(a, b);
        assert_eq!(a.dim(), 2);
    }

    #[test]
    fn intersection_via_zassenhaus() {
        let f = f7();
        // <e0, e1> and <e1, e2> meet in <e1>.
        let a = Subspace::coordinate(f, 3, &[0, 1]);
        let b = Subspace::coordinate(f, 3, &[1, 2]);
        assert_eq!(a.intersect(&b), Subspace::coordinate(f, 3, &[1]));

        // A skew example: <(1,1,0)> within <e0,e1>.
        let c = Subspace::span(f, 3, vec![vec![f.from_int(1), f.from_int(1), f.from_int(0)]]);
        assert_eq!(a.intersect(&c), c);
    }

    #[test]
    fn preimage_and_kernel_linear() {
        let f = f7();
        // Projection onto first coordinate.
        let m = mat(f, &[&[1, 0], &[0, 0]]);
        let lm = SemilinearMap::new(m, Twist::None);
        assert_eq!(lm.kernel(), Subspace::coordinate(f, 2, &[1]));
        assert_eq!(lm.image(), Subspace::coordinate(f, 2, &[0]));
        let pre = lm.preimage_of(&Subspace::coordinate(f, 2, &[0]));
        assert_eq!(pre, Subspace::full(f, 2));
    }

    #[test]
    fn semilinear_image_respects_twist() {
        // Over F_9 with t^2 = 2: F(x) = A * sigma(x) where A = diag(t, 1).
        let f = Field::quadratic(3).unwrap();
        let t = f.from_pair(0, 1).unwrap();
        let mut a = Mat::zeros(f, 2, 2);
        a.set(0, 0, t);
        a.set(1, 1, f.one());
        let fm = SemilinearMap::new(a, Twist::Frobenius);
        // Apply to (t, 0): sigma(t) = -t, so F maps it to (t * -t, 0) = (-2, 0) = (1, 0).
        let v = vec![t, f.zero()];
        let out = fm.apply(&v);
        assert_eq!(out[0], f.from_int(1));
        assert!(f.is_zero(out[1]));
    }

    #[test]
    fn semilinear_preimage_round_trip() {
        let f = Field::quadratic(3).unwrap();
        let t = f.from_pair(0, 1).unwrap();
        let mut a = Mat::zeros(f, 2, 2);
        a.set(0, 1, t);
        a.set(1, 0, f.one());
        let fm = SemilinearMap::new(a, Twist::Frobenius);
        let w = Subspace::span(f, 2, vec![vec![f.one(), t]]);
        let pre = fm.preimage_of(&w);
        // Every vector of the preimage must land in w.
        for v in pre.basis() {
            assert!(w.contains_vector(&fm.apply(v)));
        }
        // And the preimage must be as large as possible: its image is w
        // intersected with the image of the map.
        assert_eq!(fm.image_of(&pre), w.intersect(&fm.image()));
    }
}
