//! Integral p-adic Dieudonné modules with exact integer matrices.
//!
//! A module of rank 2q carries Frobenius and Verschiebung matrices A_F and
//! A_V with A_F A_V = A_V A_F = p, an alternating pairing Gram matrix B, a
//! grading M = M1 + M2 and a signature (a, b). All entries are rational
//! integers, on which the Witt-vector Frobenius acts trivially; genuinely
//! twisted modules are rejected at the JSON boundary rather than
//! mishandled. Slopes are computed two independent ways: the exact power
//! check A_F^N = p^s * unit, and the p-adic Newton polygon of the
//! characteristic polynomial.

use num_traits::Zero;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::gf::Field;
use crate::intmat::{poly_root_valuations, val_p, ZMat};
use crate::modp::ModPModule;
use crate::polygons::SlopeMultiset;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CrystalModule {
    p: u64,
    q: usize,
    signature: (usize, usize),
    a_f: ZMat,
    a_v: ZMat,
    b: ZMat,
    m1: Vec<usize>, // 0-based, sorted
    m2: Vec<usize>,
}

impl CrystalModule {
    /// Shape-level validation only (sizes, partition, odd prime). The
    /// seven module axioms are checked by `verify_axioms`, so that broken
    /// modules can be built and reported on.
    pub fn new(
        p: u64,
        q: usize,
        signature: (usize, usize),
        a_f: ZMat,
        a_v: ZMat,
        b: ZMat,
        m1: Vec<usize>,
        m2: Vec<usize>,
    ) -> Result<Self> {
        if !is_odd_prime(p) {
            return Err(Error::NotOddPrime(p));
        }
        let dim = 2 * q;
        for (name, m) in [("A_F", &a_f), ("A_V", &a_v), ("B", &b)] {
            if m.n() != dim {
                return Err(Error::SchemaViolation(format!(
                    "{name} must be {dim}x{dim} for q={q}, got {}x{}",
                    m.n(),
                    m.n()
                )));
            }
        }
        let mut m1 = m1;
        let mut m2 = m2;
        m1.sort_unstable();
        m2.sort_unstable();
        let mut seen = vec![false; dim];
        for &i in m1.iter().chain(m2.iter()) {
            if i >= dim || seen[i] {
                return Err(Error::SchemaViolation(format!(
                    "splitting index {} out of range or repeated",
                    i + 1
                )));
            }
            seen[i] = true;
        }
        if m1.len() != q || m2.len() != q {
            return Err(Error::SchemaViolation(format!(
                "M1 and M2 must each contain {q} indices"
            )));
        }
        Ok(CrystalModule {
            p,
            q,
            signature,
            a_f,
            a_v,
            b,
            m1,
            m2,
        })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn dim(&self) -> usize {
        2 * self.q
    }

    pub fn signature(&self) -> (usize, usize) {
        self.signature
    }

    pub fn a_f(&self) -> &ZMat {
        &self.a_f
    }

    pub fn a_v(&self) -> &ZMat {
        &self.a_v
    }

    pub fn pairing(&self) -> &ZMat {
        &self.b
    }

    pub fn m1(&self) -> &[usize] {
        &self.m1
    }

    pub fn m2(&self) -> &[usize] {
        &self.m2
    }

    /// Mutable access to A_F, for tamper-testing broken modules.
    pub fn a_f_mut(&mut self) -> &mut ZMat {
        &mut self.a_f
    }

    /// Replaces the pairing, for tamper-testing broken modules.
    pub fn set_pairing(&mut self, b: ZMat) {
        self.b = b;
    }

    pub fn set_signature(&mut self, signature: (usize, usize)) {
        self.signature = signature;
    }

    /// Checks the seven defining conditions and reports each with a
    /// counterexample on failure. Never errors: failures are entries.
    pub fn verify_axioms(&self) -> AxiomReport {
        let mut entries = Vec::with_capacity(7);
        let dim = self.dim();
        let p = num_bigint::BigInt::from(self.p);

        // (1) free of rank 2q
        entries.push(AxiomCheck::pass(
            1,
            "rank",
            format!("module is free of rank {dim} = 2q"),
        ));

        // (2) rank-q graded pieces
        entries.push(AxiomCheck::pass(
            2,
            "grading ranks",
            format!("M1 and M2 each have rank {}", self.q),
        ));

        // (3) F V = V F = p
        let fv = self.a_f.mul(&self.a_v);
        let vf = self.a_v.mul(&self.a_f);
        let p_id = ZMat::identity(dim).scale(&p);
        entries.push(if fv == p_id && vf == p_id {
            AxiomCheck::pass(3, "F V = V F = p", "A_F A_V = A_V A_F = p Id".into())
        } else {
            let bad = first_column_difference(&fv, &p_id)
                .or_else(|| first_column_difference(&vf, &p_id))
                .unwrap();
            AxiomCheck::fail(
                3,
                "F V = V F = p",
                format!("composite differs from p Id on basis vector {}", bad + 1),
            )
        });

        // (4) perfect alternating pairing compatible with F and V
        entries.push(self.check_pairing());

        // (5) signature condition
        entries.push(self.check_signature());

        // (6) homogeneity of degree 1
        entries.push(self.check_homogeneity());

        // (7) isotropy of M1 and M2
        entries.push(self.check_isotropy());

        AxiomReport { entries }
    }

    fn check_pairing(&self) -> AxiomCheck {
        let dim = self.dim();
        for i in 0..dim {
            for j in 0..dim {
                if *self.b.get(i, j) != -self.b.get(j, i) {
                    return AxiomCheck::fail(
                        4,
                        "pairing",
                        format!("B is not alternating at ({},{})", i + 1, j + 1),
                    );
                }
            }
        }
        let det = self.b.det();
        if det.is_zero() || val_p(&det, self.p) != Some(0) {
            return AxiomCheck::fail(
                4,
                "pairing",
                format!("det B = {det} is not a p-adic unit"),
            );
        }
        // <Fx, y> = <x, Vy>^Frob with integer entries: A_F^T B = B A_V.
        let lhs = self.a_f.transpose().mul(&self.b);
        let rhs = self.b.mul(&self.a_v);
        if lhs != rhs {
            let bad = first_column_difference(&lhs, &rhs).unwrap();
            return AxiomCheck::fail(
                4,
                "pairing",
                format!(
                    "<F x, y> != <x, V y> already for x or y the basis vector {}",
                    bad + 1
                ),
            );
        }
        AxiomCheck::pass(
            4,
            "pairing",
            "B alternating, unimodular, and A_F^T B = B A_V".into(),
        )
    }

    fn check_signature(&self) -> AxiomCheck {
        let (a, b) = self.signature;
        let (dim_m1_quot, dim_m2_quot) = self.graded_quotient_dims();
        if a + b != self.q {
            return AxiomCheck::fail(
                5,
                "signature",
                format!("signature ({a},{b}) does not sum to q = {}", self.q),
            );
        }
        if (dim_m1_quot, dim_m2_quot) == (a, b) {
            AxiomCheck::pass(
                5,
                "signature",
                format!("dim M1/F M2 = {a} and dim M2/F M1 = {b}"),
            )
        } else {
            AxiomCheck::fail(
                5,
                "signature",
                format!(
                    "dim M1/F M2 = {dim_m1_quot} and dim M2/F M1 = {dim_m2_quot}, declared ({a},{b})"
                ),
            )
        }
    }

    /// (dim M1/F M2, dim M2/F M1): p M1 = F V M1 lies in F M2, so each
    /// quotient is a vector space mod p and its dimension is q minus the
    /// mod-p rank of the relevant block of A_F.
    fn graded_quotient_dims(&self) -> (usize, usize) {
        let field = Field::prime(self.p).expect("p validated at construction");
        let reduced = self.a_f.mod_p(field);
        let block_rank = |rows: &[usize], cols: &[usize]| -> usize {
            let sub = crate::linalg::Mat::from_rows(
                field,
                rows.iter()
                    .map(|&i| cols.iter().map(|&j| reduced.get(i, j)).collect())
                    .collect(),
            );
            sub.rank()
        };
        let r1 = block_rank(&self.m1, &self.m2); // F M2 inside M1
        let r2 = block_rank(&self.m2, &self.m1); // F M1 inside M2
        (self.q - r1, self.q - r2)
    }

    fn check_homogeneity(&self) -> AxiomCheck {
        for (name, m) in [("F", &self.a_f), ("V", &self.a_v)] {
            for (side, other) in [(&self.m1, &self.m2), (&self.m2, &self.m1)] {
                for &j in side.iter() {
                    for i in 0..self.dim() {
                        if !m.get(i, j).is_zero() && !other.contains(&i) {
                            return AxiomCheck::fail(
                                6,
                                "homogeneity",
                                format!(
                                    "{name}(basis {}) has a component on basis {}, same graded piece",
                                    j + 1,
                                    i + 1
                                ),
                            );
                        }
                    }
                }
            }
        }
        AxiomCheck::pass(
            6,
            "homogeneity",
            "F and V exchange the graded pieces".into(),
        )
    }

    fn check_isotropy(&self) -> AxiomCheck {
        for (name, side) in [("M1", &self.m1), ("M2", &self.m2)] {
            for &i in side.iter() {
                for &j in side.iter() {
                    if !self.b.get(i, j).is_zero() {
                        return AxiomCheck::fail(
                            7,
                            "isotropy",
                            format!("<{name} basis {}, {name} basis {}> != 0", i + 1, j + 1),
                        );
                    }
                }
            }
        }
        AxiomCheck::pass(7, "isotropy", "M1 and M2 are totally isotropic".into())
    }

    /// Smallest N <= n_max with A_F^N = p^s * U, U invertible mod p; all
    /// isocrystal slopes then equal s/N. Entries are Frobenius-fixed, so
    /// the N-fold semilinear composite has matrix A_F^N.
    pub fn isoclinic_check(&self, n_max: u32) -> Option<(u32, u32)> {
        let field = Field::prime(self.p).expect("p validated at construction");
        let mut power = ZMat::identity(self.dim());
        for n in 1..=n_max {
            power = power.mul(&self.a_f);
            let Some(s) = power.min_valuation(self.p) else {
                return None; // nilpotent: no unit multiple of a p-power
            };
            let unit_part = power.div_pow_p(self.p, s);
            if unit_part.mod_p(field).rank() == self.dim() {
                return Some((n, s));
            }
        }
        None
    }

    /// Default search bound for `isoclinic_check`: twice the rank.
    pub fn default_n_max(&self) -> u32 {
        (2 * self.dim()) as u32
    }

    /// Independent slope oracle: the p-adic valuations of the eigenvalues
    /// of A_F, read off the Newton polygon of the characteristic
    /// polynomial. Valid because the entries are rational integers.
    pub fn newton_slopes(&self) -> Result<SlopeMultiset> {
        let coeffs = self.a_f.charpoly();
        let roots = poly_root_valuations(&coeffs, self.p).map_err(|e| match e {
            Error::SingularMatrix(_) => {
                Error::SingularMatrix("A_F is singular; slopes are undefined".into())
            }
            other => other,
        })?;
        Ok(SlopeMultiset::new(roots))
    }

    /// Reduction mod p: the induced truncated module with the grading and
    /// pairing carried over.
    pub fn reduce_mod_p(&self) -> Result<ModPModule> {
        let field = Field::prime(self.p)?;
        ModPModule::new(
            field,
            self.a_f.mod_p(field),
            self.a_v.mod_p(field),
            Some((self.m1.clone(), self.m2.clone())),
            Some(self.b.mod_p(field)),
        )
    }
}

fn is_odd_prime(p: u64) -> bool {
    Field::prime(p).is_ok()
}

/// Index of the first basis vector on which two matrices differ.
fn first_column_difference(x: &ZMat, y: &ZMat) -> Option<usize> {
    (0..x.n()).find(|&j| (0..x.n()).any(|i| x.get(i, j) != y.get(i, j)))
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct AxiomCheck {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl AxiomCheck {
    fn pass(id: u8, name: &'static str, detail: String) -> Self {
        AxiomCheck {
            id,
            name,
            passed: true,
            detail,
        }
    }

    fn fail(id: u8, name: &'static str, detail: String) -> Self {
        AxiomCheck {
            id,
            name,
            passed: false,
            detail,
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct AxiomReport {
    pub entries: Vec<AxiomCheck>,
}

impl AxiomReport {
    pub fn all_passed(&self) -> bool {
        self.entries.iter().all(|e| e.passed)
    }

    pub fn first_failure(&self) -> Option<&AxiomCheck> {
        self.entries.iter().find(|e| !e.passed)
    }
}

impl std::fmt::Display for AxiomReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for e in &self.entries {
            writeln!(
                f,
                "({}) {:<12} {}  {}",
                e.id,
                e.name,
                if e.passed { "pass" } else { "FAIL" },
                e.detail
            )?;
        }
        Ok(())
    }
}

/// The rank-10 module with basis e_1..e_5, f_1..f_5 whose mod-p fiber
/// realizes the class gamma_{3,4} while every isocrystal slope is 1/2:
/// F and V act by the fixed table below (entries 0, ±1, ±p), the pairing
/// is <e_i, f_j> = (-1)^{i-1} delta_ij, M1 = <e_i>, M2 = <f_i>.
pub fn table1_module(p: u64) -> Result<CrystalModule> {
    if !is_odd_prime(p) {
        return Err(Error::NotOddPrime(p));
    }
    let q = 5usize;
    let dim = 10usize;
    let pi = p as i64;

    // (row, col, value): column j holds the image of basis vector j.
    let f_entries: [(usize, usize, i64); 10] = [
        (9, 0, 1),   // F(e1) = f5
        (5, 1, pi),  // F(e2) = p f1
        (6, 2, 1),   // F(e3) = f2
        (7, 3, 1),   // F(e4) = f3
        (8, 4, pi),  // F(e5) = p f4
        (4, 5, -pi), // F(f1) = -p e5
        (0, 6, 1),   // F(f2) = e1
        (1, 7, pi),  // F(f3) = p e2
        (2, 8, pi),  // F(f4) = p e3
        (3, 9, 1),   // F(f5) = e4
    ];
    let v_entries: [(usize, usize, i64); 10] = [
        (6, 0, pi), // V(e1) = p f2
        (7, 1, 1),  // V(e2) = f3
        (8, 2, 1),  // V(e3) = f4
        (9, 3, pi), // V(e4) = p f5
        (5, 4, -1), // V(e5) = -f1
        (1, 5, 1),  // V(f1) = e2
        (2, 6, pi), // V(f2) = p e3
        (3, 7, pi), // V(f3) = p e4
        (4, 8, 1),  // V(f4) = e5
        (0, 9, pi), // V(f5) = p e1
    ];

    let mut a_f = ZMat::zeros(dim);
    for (i, j, v) in f_entries {
        a_f.set(i, j, v.into());
    }
    let mut a_v = ZMat::zeros(dim);
    for (i, j, v) in v_entries {
        a_v.set(i, j, v.into());
    }
    let mut b = ZMat::zeros(dim);
    for i in 0..q {
        let sign: i64 = if i % 2 == 0 { 1 } else { -1 };
        b.set(i, q + i, sign.into());
        b.set(q + i, i, (-sign).into());
    }

    CrystalModule::new(
        p,
        q,
        (3, 2),
        a_f,
        a_v,
        b,
        (0..q).collect(),
        (q..dim).collect(),
    )
}

// --- JSON interchange -----------------------------------------------------

impl CrystalModule {
    pub fn to_json_value(&self) -> Value {
        let mat = |m: &ZMat| -> Value {
            Value::Array(
                (0..m.n())
                    .map(|i| {
                        Value::Array(
                            (0..m.n())
                                .map(|j| {
                                    json!(i64::try_from(m.get(i, j).clone())
                                        .expect("crystal entries fit i64"))
                                })
                                .collect(),
                        )
                    })
                    .collect(),
            )
        };
        let idx = |v: &[usize]| -> Value { Value::Array(v.iter().map(|i| json!(i + 1)).collect()) };
        json!({
            "p": self.p,
            "q": self.q,
            "signature": [self.signature.0, self.signature.1],
            "A_F": mat(&self.a_f),
            "A_V": mat(&self.a_v),
            "B": mat(&self.b),
            "M1": idx(&self.m1),
            "M2": idx(&self.m2),
        })
    }

    /// Parses and shape-validates; the caller decides whether to demand
    /// the full axioms (the CLI loader does).
    pub fn from_json_value(v: &Value) -> Result<Self> {
        let obj = v
            .as_object()
            .ok_or_else(|| Error::SchemaViolation("module must be a JSON object".into()))?;
        let p = obj
            .get("p")
            .and_then(|x| x.as_u64())
            .ok_or_else(|| Error::SchemaViolation("p: missing or not an integer".into()))?;
        let q = obj
            .get("q")
            .and_then(|x| x.as_u64())
            .ok_or_else(|| Error::SchemaViolation("q: missing or not an integer".into()))?
            as usize;
        let signature = match obj.get("signature") {
            Some(Value::Array(s)) if s.len() == 2 => {
                let a = s[0].as_u64().ok_or_else(|| {
                    Error::SchemaViolation("signature[0]: not an integer".into())
                })? as usize;
                let b = s[1].as_u64().ok_or_else(|| {
                    Error::SchemaViolation("signature[1]: not an integer".into())
                })? as usize;
                (a, b)
            }
            _ => {
                return Err(Error::SchemaViolation(
                    "signature: expected a two-element array".into(),
                ))
            }
        };
        let mat = |name: &str| -> Result<ZMat> {
            let raw = obj
                .get(name)
                .ok_or_else(|| Error::SchemaViolation(format!("{name}: missing")))?;
            let rows = raw
                .as_array()
                .ok_or_else(|| Error::SchemaViolation(format!("{name}: expected array")))?;
            let mut data: Vec<Vec<i64>> = Vec::with_capacity(rows.len());
            for (i, row) in rows.iter().enumerate() {
                let cells = row.as_array().ok_or_else(|| {
                    Error::SchemaViolation(format!("{name}[{i}]: expected array"))
                })?;
                let mut out = Vec::with_capacity(cells.len());
                for (j, c) in cells.iter().enumerate() {
                    let v = c.as_i64().ok_or_else(|| {
                        Error::NonIntegerEntries(format!(
                            "{name}[{i}][{j}] is not a rational integer"
                        ))
                    })?;
                    out.push(v);
                }
                data.push(out);
            }
            ZMat::from_rows(&data)
        };
        let idx = |name: &str| -> Result<Vec<usize>> {
            let raw = obj
                .get(name)
                .ok_or_else(|| Error::SchemaViolation(format!("{name}: missing")))?;
            let list = raw
                .as_array()
                .ok_or_else(|| Error::SchemaViolation(format!("{name}: expected array")))?;
            let mut out = Vec::with_capacity(list.len());
            for (k, item) in list.iter().enumerate() {
                let i = item.as_u64().ok_or_else(|| {
                    Error::SchemaViolation(format!("{name}[{k}]: not a positive integer"))
                })? as usize;
                if i < 1 || i > 2 * q {
                    return Err(Error::SchemaViolation(format!(
                        "{name}[{k}]: index {i} outside 1..={}",
                        2 * q
                    )));
                }
                out.push(i - 1);
            }
            Ok(out)
        };
        CrystalModule::new(
            p,
            q,
            signature,
            mat("A_F")?,
            mat("A_V")?,
            mat("B")?,
            idx("M1")?,
            idx("M2")?,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modp::eo_class_from_eta;
    use crate::rat::rat;
    use num_bigint::BigInt;

    #[test]
    fn table1_rejects_even_or_composite_p() {
        assert_eq!(table1_module(2).unwrap_err().name(), "NotOddPrime");
        assert_eq!(table1_module(9).unwrap_err().name(), "NotOddPrime");
    }

    #[test]
    fn table1_column_structure() {
        let m = table1_module(3).unwrap();
        // Column for e1 in A_F: single entry 1 in the f5 row.
        for i in 0..10 {
            let expected = if i == 9 { BigInt::from(1) } else { BigInt::from(0) };
            assert_eq!(*m.a_f().get(i, 0), expected);
        }
        // Column for f1 in A_F: single entry -p in the e5 row.
        for i in 0..10 {
            let expected = if i == 4 { BigInt::from(-3) } else { BigInt::from(0) };
            assert_eq!(*m.a_f().get(i, 5), expected);
        }
    }

    #[test]
    fn table1_determinant_valuations() {
        for p in [3u64, 5, 7] {
            let m = table1_module(p).unwrap();
            assert_eq!(val_p(&m.a_f().det(), p), Some(5));
            assert_eq!(val_p(&m.a_v().det(), p), Some(5));
        }
    }

    #[test]
    fn table1_axioms_all_pass() {
        for p in [3u64, 5, 7, 11] {
            let report = table1_module(p).unwrap().verify_axioms();
            assert!(report.all_passed(), "p = {p}:\n{report}");
        }
    }

    #[test]
    fn identity_pairing_fails_alternating() {
        let mut m = table1_module(3).unwrap();
        m.set_pairing(ZMat::identity(10));
        let report = m.verify_axioms();
        assert!(!report.all_passed());
        let failure = report.first_failure().unwrap();
        assert_eq!(failure.id, 4);
        assert!(failure.detail.contains("alternating"));
    }

    #[test]
    fn wrong_signature_fails_condition_five() {
        let mut m = table1_module(3).unwrap();
        m.set_signature((2, 3));
        let report = m.verify_axioms();
        let failed: Vec<u8> = report
            .entries
            .iter()
            .filter(|e| !e.passed)
            .map(|e| e.id)
            .collect();
        assert_eq!(failed, vec![5]);
    }

    #[test]
    fn isoclinic_check_on_table1() {
        for p in [3u64, 5, 7] {
            let m = table1_module(p).unwrap();
            let (n, s) = m.isoclinic_check(10).unwrap();
            assert_eq!((n, s), (10, 5), "p = {p}");
            assert_eq!(rat(s as i64, n as i64), rat(1, 2));
        }
    }

    #[test]
    fn isoclinic_check_on_rank_two_supersingular() {
        // A_F = [[0, p], [1, 0]]: A_F^2 = p Id.
        let a_f = ZMat::from_rows(&[vec![0, 3], vec![1, 0]]).unwrap();
        let a_v = ZMat::from_rows(&[vec![0, 3], vec![1, 0]]).unwrap();
        let mut b = ZMat::zeros(2);
        b.set(0, 1, BigInt::from(1));
        b.set(1, 0, BigInt::from(-1));
        let m = CrystalModule::new(3, 1, (1, 0), a_f, a_v, b, vec![0], vec![1]).unwrap();
        assert_eq!(m.isoclinic_check(4), Some((2, 1)));
    }

    #[test]
    fn isoclinic_check_on_etale_line() {
        let a_f = ZMat::identity(2);
        let a_v = ZMat::identity(2).scale(&BigInt::from(3));
        let mut b = ZMat::zeros(2);
        b.set(0, 1, BigInt::from(1));
        b.set(1, 0, BigInt::from(-1));
        let m = CrystalModule::new(3, 1, (1, 0), a_f, a_v, b, vec![0], vec![1]).unwrap();
        assert_eq!(m.isoclinic_check(4), Some((1, 0)));
    }

    #[test]
    fn newton_slopes_of_table1_are_constant_one_half() {
        let m = table1_module(5).unwrap();
        let slopes = m.newton_slopes().unwrap();
        assert_eq!(slopes.entries(), &[(rat(1, 2), 10)]);
        slopes.validate_for(5).unwrap();
        assert!(slopes.is_symmetric());
    }

    #[test]
    fn newton_slopes_of_diagonal() {
        let a_f = ZMat::from_rows(&[vec![1, 0], vec![0, 5]]).unwrap();
        let a_v = ZMat::from_rows(&[vec![5, 0], vec![0, 1]]).unwrap();
        let mut b = ZMat::zeros(2);
        b.set(0, 1, BigInt::from(1));
        b.set(1, 0, BigInt::from(-1));
        let m = CrystalModule::new(5, 1, (1, 0), a_f, a_v, b, vec![0], vec![1]).unwrap();
        let slopes = m.newton_slopes().unwrap();
        assert_eq!(slopes.entries(), &[(rat(0, 1), 1), (rat(1, 1), 1)]);
    }

    #[test]
    fn newton_slopes_of_m13_lift() {
        // Cyclic 4x4 shift with a single p: char poly T^4 - p.
        let a_f = ZMat::from_rows(&[
            vec![0, 0, 0, 5],
            vec![1, 0, 0, 0],
            vec![0, 1, 0, 0],
            vec![0, 0, 1, 0],
        ])
        .unwrap();
        let a_v = ZMat::from_rows(&[
            vec![0, 1, 0, 0],
            vec![0, 0, 1, 0],
            vec![0, 0, 0, 1],
            vec![5, 0, 0, 0],
        ])
        .unwrap();
        let mut b = ZMat::zeros(4);
        for i in 0..2 {
            b.set(i, 2 + i, BigInt::from(1));
            b.set(2 + i, i, BigInt::from(-1));
        }
        let m = CrystalModule::new(5, 2, (2, 0), a_f, a_v, b, vec![0, 1], vec![2, 3]).unwrap();
        let slopes = m.newton_slopes().unwrap();
        assert_eq!(slopes.entries(), &[(rat(1, 4), 4)]);
    }

    #[test]
    fn slope_methods_agree_on_table1() {
        for p in [3u64, 5, 7, 11] {
            let m = table1_module(p).unwrap();
            let (n, s) = m.isoclinic_check(m.default_n_max()).unwrap();
            let slopes = m.newton_slopes().unwrap();
            assert!(slopes.is_constant());
            let (slope, height) = slopes.entries()[0];
            assert_eq!(slope, rat(s as i64, n as i64));
            assert_eq!(height, 10);
            slopes.validate_for(5).unwrap();
            assert!(slopes.is_symmetric());
        }
    }

    #[test]
    fn reduce_mod_p_structure() {
        let m = table1_module(3).unwrap();
        let n = m.reduce_mod_p().unwrap();
        assert_eq!(n.dim(), 10);
        // F(e2) = p f1 dies mod p: column 1 of the reduced F is zero.
        let field = n.field();
        for i in 0..10 {
            assert!(field.is_zero(n.f_matrix().get(i, 1)));
        }
    }

    #[test]
    fn reduce_mod_p_satisfies_bt1_invariants() {
        for p in [3u64, 5, 7, 11] {
            let m = table1_module(p).unwrap().reduce_mod_p().unwrap();
            assert_eq!(m.f_map().kernel(), m.v_map().image());
            assert_eq!(m.v_map().kernel(), m.f_map().image());
            assert_eq!(m.kernel_f().dim(), 5);
        }
    }

    #[test]
    fn reduced_table1_has_p_rank_zero() {
        assert_eq!(table1_module(3).unwrap().reduce_mod_p().unwrap().p_rank(), 0);
    }

    #[test]
    fn table1_mod_p_eta_and_class() {
        for p in [3u64, 5, 7] {
            let n = table1_module(p).unwrap().reduce_mod_p().unwrap();
            let eta = n.unitary_eta().unwrap();
            assert_eq!(eta.values(), &[0, 0, 1, 2, 2], "p = {p}");
            let gamma = eo_class_from_eta(&eta, 3, 2).unwrap();
            assert_eq!(gamma.u(), &[3, 4]);
            assert_eq!(gamma.permutation().cycle_string(), "(1,3)(2,4)");
        }
    }

    #[test]
    fn table1_mod_p_final_sequence_pinned() {
        // Regression anchor for the full mod-p pipeline on the table
        // module; value pinned from a hand computation of the canonical
        // flag 0 < <f3> < <e4,f3> < ... < N.
        let n = table1_module(3).unwrap().reduce_mod_p().unwrap();
        let phi = n.final_sequence().unwrap();
        assert_eq!(phi.tuple(), &[0, 1, 2, 3, 4, 4, 4, 4, 4, 5]);
        assert_eq!(phi.generic_first_slope(), rat(1, 5));
    }

    #[test]
    fn table1_mod_p_canonical_flag_contains_f3_line() {
        let n = table1_module(3).unwrap().reduce_mod_p().unwrap();
        let field = n.field();
        let chain = n.canonical_filtration();
        let f3_line = crate::linalg::Subspace::coordinate(field, 10, &[7]);
        assert!(chain.contains(&f3_line));
        let e4_f3 = crate::linalg::Subspace::coordinate(field, 10, &[3, 7]);
        assert!(chain.contains(&e4_f3));
    }

    #[test]
    fn json_round_trip() {
        for p in [3u64, 5, 7] {
            let m = table1_module(p).unwrap();
            let v = m.to_json_value();
            let back = CrystalModule::from_json_value(&v).unwrap();
            assert_eq!(back, m);
        }
    }

    #[test]
    fn json_rejects_bad_shapes() {
        let good = table1_module(3).unwrap().to_json_value();

        let mut nonsquare = good.clone();
        nonsquare["A_F"].as_array_mut().unwrap().pop();
        assert_eq!(
            CrystalModule::from_json_value(&nonsquare).unwrap_err().name(),
            "SchemaViolation"
        );

        let mut fractional = good.clone();
        fractional["A_F"][0][0] = serde_json::json!(0.5);
        assert_eq!(
            CrystalModule::from_json_value(&fractional).unwrap_err().name(),
            "NonIntegerEntries"
        );

        let mut badidx = good;
        badidx["M1"][0] = serde_json::json!(11);
        assert_eq!(
            CrystalModule::from_json_value(&badidx).unwrap_err().name(),
            "SchemaViolation"
        );
    }
}
