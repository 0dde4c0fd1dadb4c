//! Mod-p Dieudonné modules: a 2q-dimensional space over F_p or F_{p^2}
//! with a Frobenius-semilinear F and inverse-semilinear V satisfying
//! FV = VF = 0, ker F = im V and ker V = im F.
//!
//! The canonical filtration is the coarsest flag stable under taking
//! F-images and V-preimages; refining it to a full flag and recording
//! dim F(C_i) yields the final sequence, and intersecting with the M1
//! grading yields the eta vector that pins down the Ekedahl-Oort class.

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::finalseq::FinalSequence;
use crate::gf::{El, Field};
use crate::linalg::{Mat, SemilinearMap, Subspace, Twist};
use crate::polygons::NewtonPolygon;
use crate::weyl::CosetRep;

#[derive(Clone, PartialEq, Eq)]
pub struct ModPModule {
    field: Field,
    dim: usize, // 2q
    f_mat: Mat,
    v_mat: Mat,
    splitting: Option<(Vec<usize>, Vec<usize>)>, // 0-based, sorted
    pairing: Option<Mat>,
}

impl ModPModule {
    /// Validates every structural invariant: FV = VF = 0, ker F = im V,
    /// ker V = im F, dim ker F = q, plus grading and pairing shape checks
    /// when those are present.
    pub fn new(
        field: Field,
        f_mat: Mat,
        v_mat: Mat,
        splitting: Option<(Vec<usize>, Vec<usize>)>,
        pairing: Option<Mat>,
    ) -> Result<Self> {
        let dim = f_mat.rows();
        if f_mat.cols() != dim || v_mat.rows() != dim || v_mat.cols() != dim {
            return Err(Error::SchemaViolation(format!(
                "F and V must be square of one size; got {}x{} and {}x{}",
                f_mat.rows(),
                f_mat.cols(),
                v_mat.rows(),
                v_mat.cols()
            )));
        }
        if dim == 0 || dim % 2 != 0 {
            return Err(Error::SchemaViolation(format!(
                "module dimension must be a positive even number, got {dim}"
            )));
        }
        // F(V(x)) = F sigma(V) x and V(F(x)) = V sigma^{-1}(F) x.
        if !f_mat.mul(&v_mat.frobenius()).is_zero() {
            return Err(Error::InvariantViolation(
                "F compose V is nonzero mod p".into(),
            ));
        }
        if !v_mat.mul(&f_mat.frobenius()).is_zero() {
            return Err(Error::InvariantViolation(
                "V compose F is nonzero mod p".into(),
            ));
        }

        let module = ModPModule {
            field,
            dim,
            f_mat,
            v_mat,
            splitting: None,
            pairing: None,
        };
        let f = module.f_map();
        let v = module.v_map();
        if f.kernel() != v.image() {
            return Err(Error::InvariantViolation("ker F != im V".into()));
        }
        if v.kernel() != f.image() {
            return Err(Error::InvariantViolation("ker V != im F".into()));
        }

        if let Some((m1, m2)) = &splitting {
            validate_splitting(&module, m1, m2)?;
        }
        if let Some(b) = &pairing {
            validate_pairing(field, b, dim)?;
        }

        Ok(ModPModule {
            splitting,
            pairing,
            ..module
        })
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn q(&self) -> usize {
        self.dim / 2
    }

    pub fn f_matrix(&self) -> &Mat {
        &self.f_mat
    }

    pub fn v_matrix(&self) -> &Mat {
        &self.v_mat
    }

    pub fn splitting(&self) -> Option<&(Vec<usize>, Vec<usize>)> {
        self.splitting.as_ref()
    }

    pub fn pairing(&self) -> Option<&Mat> {
        self.pairing.as_ref()
    }

    pub fn f_map(&self) -> SemilinearMap {
        SemilinearMap::new(self.f_mat.clone(), Twist::Frobenius)
    }

    pub fn v_map(&self) -> SemilinearMap {
        SemilinearMap::new(self.v_mat.clone(), Twist::InverseFrobenius)
    }

    pub fn kernel_f(&self) -> Subspace {
        self.f_map().kernel()
    }

    /// The p-rank: dimension of the stable image of the F-iteration,
    /// i.e. of the largest subspace on which F acts bijectively. The
    /// composite of n copies of F has matrix A * sigma(A_{n-1}), and the
    /// image chain is decreasing, so the rank stabilizes within 2q steps.
    pub fn p_rank(&self) -> usize {
        let mut composite = self.f_mat.clone();
        let mut rank = composite.rank();
        for _ in 0..self.dim {
            composite = self.f_mat.mul(&composite.frobenius());
            let next = composite.rank();
            if next == rank {
                break;
            }
            rank = next;
        }
        rank
    }

    /// The canonical filtration: the coarsest chain of subspaces containing
    /// 0 and N that is stable under W -> F(W) and W -> V^{-1}(W), computed
    /// by closure. The closure of a module with our invariants is totally
    /// ordered; we sort by dimension and check the chain.
    pub fn canonical_filtration(&self) -> Vec<Subspace> {
        let f = self.f_map();
        let v = self.v_map();
        let mut members: Vec<Subspace> = vec![
            Subspace::zero(self.field, self.dim),
            Subspace::full(self.field, self.dim),
        ];
        loop {
            let mut fresh: Vec<Subspace> = Vec::new();
            for w in &members {
                for image in [f.image_of(w), v.preimage_of(w)] {
                    if !members.contains(&image) && !fresh.contains(&image) {
                        fresh.push(image);
                    }
                }
            }
            if fresh.is_empty() {
                break;
            }
            members.extend(fresh);
        }
        members.sort_by_key(|w| w.dim());
        for pair in members.windows(2) {
            assert!(
                pair[1].contains(&pair[0]),
                "canonical closure is not a chain; module violates the BT1 axioms"
            );
        }
        members
    }

    /// Deterministic full flag refining the canonical filtration: each gap
    /// is filled by adjoining the next member's echelon basis vectors in
    /// ascending pivot order. dim(flag[i]) = i.
    pub fn final_flag(&self) -> Vec<Subspace> {
        let chain = self.canonical_filtration();
        let mut flag = vec![chain[0].clone()];
        for gap in chain.windows(2) {
            let mut current = gap[0].clone();
            for vector in gap[1].basis() {
                if !current.contains_vector(vector) {
                    current = current.sum(&Subspace::span(
                        self.field,
                        self.dim,
                        vec![vector.clone()],
                    ));
                    flag.push(current.clone());
                }
            }
        }
        debug_assert_eq!(flag.len(), self.dim + 1);
        flag
    }

    /// The final sequence phi(i) = dim F(C_i) along a full flag refining
    /// the canonical filtration. Any refinement gives the same phi: on each
    /// canonical gap F is injective or zero, so dim F(C) depends only on
    /// dim C.
    pub fn final_sequence(&self) -> Result<FinalSequence> {
        let f = self.f_map();
        let phi: Vec<usize> = self
            .final_flag()
            .iter()
            .map(|c| f.image_of(c).dim())
            .collect();
        FinalSequence::new(self.q(), phi)
    }

    /// The eta vector of a graded module: intersect a final flag with the
    /// M1 coordinate span to get C_{1,1} subset ... subset C_{1,q}, then
    /// record eta(j) = dim(C_{1,j} ∩ ker F).
    pub fn unitary_eta(&self) -> Result<EtaVector> {
        let Some((m1, _)) = &self.splitting else {
            return Err(Error::NoSplitting);
        };
        let n1 = Subspace::coordinate(self.field, self.dim, m1);
        let ker_f = self.kernel_f();
        let mut values = Vec::with_capacity(self.q());
        let mut last_dim = 0;
        for c in self.final_flag() {
            let c1 = c.intersect(&n1);
            if c1.dim() > last_dim {
                last_dim = c1.dim();
                values.push(c1.intersect(&ker_f).dim());
            }
        }
        EtaVector::new(self.q(), values)
    }
}

impl std::fmt::Debug for ModPModule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "ModPModule(dim {} over GF({}^{}))",
            self.dim,
            self.field.p(),
            self.field.degree()
        )
    }
}

fn validate_splitting(module: &ModPModule, m1: &[usize], m2: &[usize]) -> Result<()> {
    let dim = module.dim;
    let q = module.q();
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
    if m1.len() != q || m2.len() != q || !seen.iter().all(|&s| s) {
        return Err(Error::SchemaViolation(format!(
            "splitting must partition 1..={dim} into two sets of size {q}"
        )));
    }
    // Homogeneity of degree 1: each operator's column over M1 is supported
    // in M2 and vice versa.
    for (name, mat) in [("F", &module.f_mat), ("V", &module.v_mat)] {
        for (side, other) in [(m1, m2), (m2, m1)] {
            for &j in side {
                for i in 0..dim {
                    if !module.field.is_zero(mat.get(i, j)) && !other.contains(&i) {
                        return Err(Error::InvariantViolation(format!(
                            "{name} is not homogeneous of degree 1: column {} hits row {}",
                            j + 1,
                            i + 1
                        )));
                    }
                }
            }
        }
    }
    Ok(())
}

fn validate_pairing(field: Field, b: &Mat, dim: usize) -> Result<()> {
    if b.rows() != dim || b.cols() != dim {
        return Err(Error::SchemaViolation(format!(
            "pairing must be {dim}x{dim}, got {}x{}",
            b.rows(),
            b.cols()
        )));
    }
    for i in 0..dim {
        for j in 0..dim {
            if b.get(i, j) != field.neg(b.get(j, i)) {
                return Err(Error::InvariantViolation(format!(
                    "pairing is not alternating at ({},{})",
                    i + 1,
                    j + 1
                )));
            }
        }
    }
    if b.rank() != dim {
        return Err(Error::InvariantViolation(
            "pairing is degenerate mod p".into(),
        ));
    }
    Ok(())
}

/// The eta vector eta(1..q): dimensions of the kernel-of-F part along the
/// M1 filtration. Nondecreasing with steps at most 1.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct EtaVector {
    q: usize,
    values: Vec<usize>,
}

impl EtaVector {
    pub fn new(q: usize, values: Vec<usize>) -> Result<Self> {
        if values.len() != q {
            return Err(Error::EtaInvalid(format!(
                "expected {q} values, got {}",
                values.len()
            )));
        }
        let mut prev = 0;
        for (j, &v) in values.iter().enumerate() {
            if v < prev || v > prev + 1 {
                return Err(Error::EtaInvalid(format!(
                    "eta({}) = {v} after eta({j}) = {prev} breaks the 0/1-step condition",
                    j + 1
                )));
            }
            prev = v;
        }
        Ok(EtaVector { q, values })
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }
}

impl std::fmt::Display for EtaVector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.values.iter().map(|v| v.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Reads the Ekedahl-Oort class off an eta vector for signature (a, b):
/// u_t is the first index where eta reaches t.
pub fn eo_class_from_eta(eta: &EtaVector, a: usize, b: usize) -> Result<CosetRep> {
    if eta.q() != a + b {
        return Err(Error::EtaInvalid(format!(
            "eta has length {}, signature ({a},{b}) needs {}",
            eta.q(),
            a + b
        )));
    }
    let last = eta.values().last().copied().unwrap_or(0);
    if last != b {
        return Err(Error::EtaInvalid(format!(
            "eta ends at {last}, signature ({a},{b}) requires {b}"
        )));
    }
    let mut u = Vec::with_capacity(b);
    for t in 1..=b {
        let j = eta
            .values()
            .iter()
            .position(|&v| v == t)
            .expect("monotone eta with unit steps attains every value up to its maximum");
        u.push(j + 1);
    }
    CosetRep::new(a, b, u)
}

/// The de Jong-Oort minimal module of a symmetric Newton polygon: the
/// direct sum over factors of the cyclic module M_{m,n} on e_0..e_{m+n-1}
/// with F(e_i) = e_{i+m} and V(e_i) = e_{i+n}, indices dropping off the
/// end (the mod-p shadow of e_{j+m+n} = p e_j).
pub fn minimal_module(polygon: &NewtonPolygon, p: u64) -> Result<ModPModule> {
    let field = Field::prime(p)?;
    let dim = 2 * polygon.q();
    let mut f_mat = Mat::zeros(field, dim, dim);
    let mut v_mat = Mat::zeros(field, dim, dim);
    let mut offset = 0;
    for &(m, n, mult) in polygon.factors() {
        let span = (m + n) as usize;
        for _ in 0..mult {
            for i in 0..span {
                if i + (m as usize) < span {
                    f_mat.set(offset + i + m as usize, offset + i, field.one());
                }
                if i + (n as usize) < span {
                    v_mat.set(offset + i + n as usize, offset + i, field.one());
                }
            }
            offset += span;
        }
    }
    ModPModule::new(field, f_mat, v_mat, None, None)
}

// --- JSON interchange -----------------------------------------------------

fn el_to_json(field: Field, e: El) -> Value {
    if field.degree() == 1 {
        json!(e.c0)
    } else {
        json!([e.c0, e.c1])
    }
}

fn el_from_json(field: Field, v: &Value, path: &str) -> Result<El> {
    match v {
        Value::Number(n) => {
            let i = n
                .as_i64()
                .ok_or_else(|| Error::SchemaViolation(format!("{path}: not an integer")))?;
            Ok(field.from_int(i))
        }
        Value::Array(pair) if pair.len() == 2 => {
            let c0 = pair[0]
                .as_i64()
                .ok_or_else(|| Error::SchemaViolation(format!("{path}[0]: not an integer")))?;
            let c1 = pair[1]
                .as_i64()
                .ok_or_else(|| Error::SchemaViolation(format!("{path}[1]: not an integer")))?;
            field.from_pair(c0, c1)
        }
        _ => Err(Error::SchemaViolation(format!(
            "{path}: expected integer or [c0, c1] pair"
        ))),
    }
}

fn mat_to_json(field: Field, m: &Mat) -> Value {
    let rows: Vec<Value> = (0..m.rows())
        .map(|i| {
            Value::Array(
                (0..m.cols())
                    .map(|j| el_to_json(field, m.get(i, j)))
                    .collect(),
            )
        })
        .collect();
    Value::Array(rows)
}

fn mat_from_json(field: Field, v: &Value, name: &str) -> Result<Mat> {
    let rows = v
        .as_array()
        .ok_or_else(|| Error::SchemaViolation(format!("{name}: expected an array of rows")))?;
    let mut data = Vec::with_capacity(rows.len());
    let width = rows
        .first()
        .and_then(|r| r.as_array())
        .map(|r| r.len())
        .unwrap_or(0);
    for (i, row) in rows.iter().enumerate() {
        let cells = row
            .as_array()
            .ok_or_else(|| Error::SchemaViolation(format!("{name}[{i}]: expected an array")))?;
        if cells.len() != width {
            return Err(Error::SchemaViolation(format!(
                "{name}[{i}]: ragged row (got {}, expected {width})",
                cells.len()
            )));
        }
        let mut out = Vec::with_capacity(cells.len());
        for (j, cell) in cells.iter().enumerate() {
            out.push(el_from_json(field, cell, &format!("{name}[{i}][{j}]"))?);
        }
        data.push(out);
    }
    if data.is_empty() {
        return Err(Error::SchemaViolation(format!("{name}: empty matrix")));
    }
    Ok(Mat::from_rows(field, data))
}

fn indices_from_json(v: &Value, name: &str, dim: usize) -> Result<Vec<usize>> {
    let list = v
        .as_array()
        .ok_or_else(|| Error::SchemaViolation(format!("{name}: expected an array")))?;
    let mut out = Vec::with_capacity(list.len());
    for (k, item) in list.iter().enumerate() {
        let i = item
            .as_u64()
            .ok_or_else(|| Error::SchemaViolation(format!("{name}[{k}]: not a positive integer")))?
            as usize;
        if i < 1 || i > dim {
            return Err(Error::SchemaViolation(format!(
                "{name}[{k}]: index {i} outside 1..={dim}"
            )));
        }
        out.push(i - 1);
    }
    out.sort_unstable();
    Ok(out)
}

impl ModPModule {
    pub fn to_json_value(&self) -> Value {
        let mut obj = serde_json::Map::new();
        obj.insert("p".into(), json!(self.field.p()));
        obj.insert("field_degree".into(), json!(self.field.degree()));
        obj.insert("F".into(), mat_to_json(self.field, &self.f_mat));
        obj.insert("V".into(), mat_to_json(self.field, &self.v_mat));
        if let Some((m1, m2)) = &self.splitting {
            let up = |v: &Vec<usize>| -> Value {
                Value::Array(v.iter().map(|i| json!(i + 1)).collect())
            };
            obj.insert("M1".into(), up(m1));
            obj.insert("M2".into(), up(m2));
        }
        if let Some(b) = &self.pairing {
            obj.insert("B".into(), mat_to_json(self.field, b));
        }
        Value::Object(obj)
    }

    pub fn from_json_value(v: &Value) -> Result<Self> {
        let obj = v
            .as_object()
            .ok_or_else(|| Error::SchemaViolation("module must be a JSON object".into()))?;
        let p = obj
            .get("p")
            .and_then(|x| x.as_u64())
            .ok_or_else(|| Error::SchemaViolation("p: missing or not an integer".into()))?;
        let degree = obj
            .get("field_degree")
            .and_then(|x| x.as_u64())
            .unwrap_or(1) as u8;
        let field = Field::with_degree(p, degree)?;
        let f_mat = mat_from_json(
            field,
            obj.get("F")
                .ok_or_else(|| Error::SchemaViolation("F: missing".into()))?,
            "F",
        )?;
        let v_mat = mat_from_json(
            field,
            obj.get("V")
                .ok_or_else(|| Error::SchemaViolation("V: missing".into()))?,
            "V",
        )?;
        let dim = f_mat.rows();
        let splitting = match (obj.get("M1"), obj.get("M2")) {
            (Some(a), Some(b)) => Some((
                indices_from_json(a, "M1", dim)?,
                indices_from_json(b, "M2", dim)?,
            )),
            (None, None) => None,
            _ => {
                return Err(Error::SchemaViolation(
                    "M1 and M2 must be given together".into(),
                ))
            }
        };
        let pairing = obj
            .get("B")
            .map(|b| mat_from_json(field, b, "B"))
            .transpose()?;
        ModPModule::new(field, f_mat, v_mat, splitting, pairing)
    }
}
