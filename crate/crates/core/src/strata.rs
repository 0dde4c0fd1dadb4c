//! The classification engine for signature (3, 2): a forward-chaining rule
//! cascade that fills the 10 x 4 grid of Ekedahl-Oort strata against
//! admissible Newton polygons, recording for every cell which rules
//! justified its status.
//!
//! Rules split into computed facts (p-rank comparisons, the polygon
//! enumeration, the supersingular witness certificate, the minimal-module
//! identity) and imported geometric facts (the generic-first-slope bound,
//! the omega(3) = 3 supersingularity criterion, the closure identity for
//! the top p-rank-0 stratum). The rule order is fixed and a cell may only
//! ever be assigned one status: conflicting assignments abort loudly.

use std::fmt;

use serde_json::{json, Value};

use crate::crystal::{table1_module, CrystalModule};
use crate::error::{Error, Result};
use crate::finalseq::FinalSequence;
use crate::modp::eo_class_from_eta;
use crate::polygons::{admissible_polygons, NewtonPolygon};
use crate::rat::{json_rat, rat, Rat};
use crate::weyl::{enumerate_w, forget_unitary_32, CosetRep, Permutation};

/// One Ekedahl-Oort stratum of the signature (3, 2) moduli space, with
/// whatever Siegel-side data is tabulated for it.
#[derive(Clone, Debug)]
pub struct EoStratum {
    pub gamma: CosetRep,
    pub dimension: usize,
    pub p_rank: u32,
    /// Tabulated forgetful image, when known.
    pub omega: Option<Permutation>,
    /// Final sequence of the image; present iff omega is.
    pub phi: Option<FinalSequence>,
    /// Generic first slope of phi; present iff phi is.
    pub lambda: Option<Rat>,
}

/// p-rank of an Ekedahl-Oort stratum at signature (3, 2): 4 for the top
/// stratum, 2 for the other gamma_{u,5} with u > 1, and 0 elsewhere.
pub fn eo_p_rank_32(gamma: &CosetRep) -> Result<u32> {
    if (gamma.a(), gamma.b()) != (3, 2) {
        return Err(Error::WrongSignature {
            want_a: 3,
            want_b: 2,
            got_a: gamma.a(),
            got_b: gamma.b(),
        });
    }
    Ok(match (gamma.u()[0], gamma.u()[1]) {
        (4, 5) => 4,
        (2, 5) | (3, 5) => 2,
        _ => 0,
    })
}

/// The ten strata in enumeration order, each with its dimension, p-rank
/// and (when tabulated) forgetful image, final sequence and generic first
/// slope.
pub fn eo_strata_32() -> Vec<EoStratum> {
    enumerate_w(3, 2)
        .into_iter()
        .map(|gamma| {
            let omega = forget_unitary_32(&gamma).ok();
            let phi = omega
                .as_ref()
                .map(|w| FinalSequence::from_permutation(w, 5).expect("tabulated omega in W_5"));
            let lambda = phi.as_ref().map(|f| f.generic_first_slope());
            EoStratum {
                dimension: gamma.dimension(),
                p_rank: eo_p_rank_32(&gamma).expect("signature fixed"),
                omega,
                phi,
                lambda,
                gamma,
            }
        })
        .collect()
}

/// The polygons whose first slope is at least `lambda`, preserving order.
pub fn compatible_polygons(lambda: Rat, polys: &[NewtonPolygon]) -> Vec<NewtonPolygon> {
    polys
        .iter()
        .filter(|p| p.first_slope() >= lambda)
        .cloned()
        .collect()
}

/// Paper-style names of the four admissible polygons at (3, 2); other
/// polygons fall back to their display form.
pub fn polygon_name_32(p: &NewtonPolygon) -> String {
    let known: [(&str, &[(u32, u32, u32)]); 4] = [
        ("beta_ss", &[(1, 1, 5)]),
        ("beta_1", &[(1, 3, 1), (1, 1, 1), (3, 1, 1)]),
        ("beta_2", &[(0, 1, 2), (1, 1, 3), (1, 0, 2)]),
        ("beta_max", &[(0, 1, 4), (1, 1, 1), (1, 0, 4)]),
    ];
    for (name, factors) in known {
        if p.q() == 5 && p.factors() == factors {
            return name.to_string();
        }
    }
    p.to_string()
}

// --- Supersingular witness --------------------------------------------------

#[derive(Clone, Debug)]
pub struct WitnessLeg {
    pub name: &'static str,
    pub detail: String,
}

/// Certificate that the gamma_{3,4} stratum meets the supersingular locus:
/// a concrete integral module passing all axioms, isoclinic of slope 1/2,
/// whose mod-p fiber has Ekedahl-Oort class gamma_{3,4}.
#[derive(Clone, Debug)]
pub struct WitnessReport {
    pub p: u64,
    pub legs: Vec<WitnessLeg>,
}

impl fmt::Display for WitnessReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "supersingular witness at p = {}: gamma_{{3,4}} meets the slope-1/2 stratum",
            self.p
        )?;
        for leg in &self.legs {
            writeln!(f, "  [{}] {}", leg.name, leg.detail)?;
        }
        Ok(())
    }
}

pub fn supersingular_witness(p: u64) -> Result<WitnessReport> {
    supersingular_witness_for(&table1_module(p)?)
}

/// Runs the three-leg certification on an arbitrary module: axioms,
/// isoclinic slope 1/2, and mod-p class gamma_{3,4}.
pub fn supersingular_witness_for(m: &CrystalModule) -> Result<WitnessReport> {
    let mut legs = Vec::new();

    let report = m.verify_axioms();
    if let Some(bad) = report.first_failure() {
        return Err(Error::WitnessFailure {
            leg: "axioms".into(),
            detail: format!("condition ({}) {}: {}", bad.id, bad.name, bad.detail),
        });
    }
    legs.push(WitnessLeg {
        name: "axioms",
        detail: "all seven module conditions hold".into(),
    });

    let Some((n, s)) = m.isoclinic_check(m.default_n_max()) else {
        return Err(Error::WitnessFailure {
            leg: "isoclinic".into(),
            detail: format!("no N <= {} with A_F^N = p^s * unit", m.default_n_max()),
        });
    };
    if rat(s as i64, n as i64) != rat(1, 2) {
        return Err(Error::WitnessFailure {
            leg: "isoclinic".into(),
            detail: format!("A_F^{n} = p^{s} * unit gives slope {s}/{n}, not 1/2"),
        });
    }
    legs.push(WitnessLeg {
        name: "isoclinic",
        detail: format!("A_F^{n} = p^{s} * unit: every isocrystal slope is 1/2"),
    });

    let fiber = m.reduce_mod_p().map_err(|e| Error::WitnessFailure {
        leg: "eo-class".into(),
        detail: format!("mod-p fiber is not a valid module: {e}"),
    })?;
    let eta = fiber.unitary_eta().map_err(|e| Error::WitnessFailure {
        leg: "eo-class".into(),
        detail: e.to_string(),
    })?;
    let gamma = eo_class_from_eta(&eta, 3, 2).map_err(|e| Error::WitnessFailure {
        leg: "eo-class".into(),
        detail: e.to_string(),
    })?;
    if gamma.u() != [3, 4] {
        return Err(Error::WitnessFailure {
            leg: "eo-class".into(),
            detail: format!("mod-p fiber has class {gamma}, expected γ_{{3,4}}"),
        });
    }
    legs.push(WitnessLeg {
        name: "eo-class",
        detail: format!("mod-p fiber has eta = {eta} and class {gamma} = (1,3)(2,4)"),
    });

    Ok(WitnessReport { p: m.p(), legs })
}

// --- The interaction table ---------------------------------------------------

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum CellStatus {
    Equal,
    ContainedIn,
    Intersects,
    Empty,
}

impl CellStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            CellStatus::Equal => "Equal",
            CellStatus::ContainedIn => "ContainedIn",
            CellStatus::Intersects => "Intersects",
            CellStatus::Empty => "Empty",
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum RuleTag {
    PRank,
    UniqueNewton,
    Slope,
    Hoeve,
    Minimal,
    Closure,
    Witness,
}

impl RuleTag {
    pub fn id(&self) -> &'static str {
        match self {
            RuleTag::PRank => "R-prank",
            RuleTag::UniqueNewton => "R-unique-newton",
            RuleTag::Slope => "R-slope",
            RuleTag::Hoeve => "R-hoeve",
            RuleTag::Minimal => "R-minimal",
            RuleTag::Closure => "R-closure",
            RuleTag::Witness => "R-witness",
        }
    }

    /// Whether the rule is grounded in a computation done here or in an
    /// imported geometric fact.
    pub fn kind(&self) -> &'static str {
        match self {
            RuleTag::PRank | RuleTag::UniqueNewton | RuleTag::Witness => "computed",
            RuleTag::Slope | RuleTag::Hoeve | RuleTag::Minimal | RuleTag::Closure => "axiom",
        }
    }

    pub fn description(&self) -> &'static str {
        match self {
            RuleTag::PRank => {
                "strata intersect only inside one p-rank stratum; the two p-ranks differ"
            }
            RuleTag::UniqueNewton => {
                "this p-rank level holds a single admissible polygon (and, for Equal, a single stratum)"
            }
            RuleTag::Slope => {
                "every polygon on a stratum has first slope >= the generic first slope of its final sequence"
            }
            RuleTag::Hoeve => {
                "a Siegel stratum whose permutation fixes 3 (q = 5) is supersingular; holds for the images of gamma_{1,2} and gamma_{1,3}"
            }
            RuleTag::Minimal => {
                "the minimal module of [1/4, 1/2, 3/4] has one isomorphism class of p-divisible group and realizes this stratum"
            }
            RuleTag::Closure => {
                "the [1/4, 1/2, 3/4] stratum is the closure of the gamma_{3,4} stratum inside p-rank 0"
            }
            RuleTag::Witness => {
                "explicit integral module: axioms + slope 1/2 + mod-p class gamma_{3,4}"
            }
        }
    }

    pub fn all() -> [RuleTag; 7] {
        [
            RuleTag::PRank,
            RuleTag::UniqueNewton,
            RuleTag::Slope,
            RuleTag::Hoeve,
            RuleTag::Minimal,
            RuleTag::Closure,
            RuleTag::Witness,
        ]
    }
}

#[derive(Clone, Debug)]
pub struct Cell {
    pub status: CellStatus,
    pub justification: Vec<RuleTag>,
}

#[derive(Clone, Debug)]
pub struct InteractionTable {
    pub signature: (usize, usize),
    pub rows: Vec<EoStratum>,
    pub columns: Vec<NewtonPolygon>,
    pub column_names: Vec<String>,
    pub cells: Vec<Vec<Cell>>,
}

/// Working grid during the cascade; cells start unassigned.
struct Grid {
    cells: Vec<Vec<Option<Cell>>>,
}

impl Grid {
    fn new(rows: usize, cols: usize) -> Self {
        Grid {
            cells: vec![vec![None; cols]; rows],
        }
    }

    fn assign(&mut self, r: usize, c: usize, status: CellStatus, tag: RuleTag) -> Result<()> {
        match &mut self.cells[r][c] {
            slot @ None => {
                *slot = Some(Cell {
                    status,
                    justification: vec![tag],
                });
                Ok(())
            }
            Some(cell) if cell.status == status => {
                if !cell.justification.contains(&tag) {
                    cell.justification.push(tag);
                }
                Ok(())
            }
            Some(cell) => Err(Error::Inconsistent(format!(
                "cell ({r},{c}): {} would overwrite {} ({})",
                status.as_str(),
                cell.status.as_str(),
                tag.id()
            ))),
        }
    }

    fn status(&self, r: usize, c: usize) -> Option<CellStatus> {
        self.cells[r][c].as_ref().map(|cell| cell.status)
    }
}

/// Derives the full interaction table between the Ekedahl-Oort and Newton
/// stratifications at signature (3, 2) by the fixed rule cascade. The
/// supersingular witness is recomputed (at p = 3) as part of the run.
pub fn classify_32() -> Result<InteractionTable> {
    let rows = eo_strata_32();
    let columns = admissible_polygons(3, 2)?;
    let column_names: Vec<String> = columns.iter().map(polygon_name_32).collect();
    let mut grid = Grid::new(rows.len(), columns.len());

    // R-prank: a stratum and a polygon with different p-ranks are disjoint.
    for (r, row) in rows.iter().enumerate() {
        for (c, col) in columns.iter().enumerate() {
            if row.p_rank != col.p_rank() {
                grid.assign(r, c, CellStatus::Empty, RuleTag::PRank)?;
            }
        }
    }

    // R-unique-newton: a p-rank level with exactly one polygon swallows
    // every stratum at that level; a level that is one stratum against one
    // polygon is an equality.
    let levels: std::collections::BTreeSet<u32> = columns.iter().map(|p| p.p_rank()).collect();
    for level in levels {
        let polys: Vec<usize> = (0..columns.len())
            .filter(|&c| columns[c].p_rank() == level)
            .collect();
        let strata: Vec<usize> = (0..rows.len())
            .filter(|&r| rows[r].p_rank == level)
            .collect();
        if polys.len() == 1 {
            let status = if strata.len() == 1 {
                CellStatus::Equal
            } else {
                CellStatus::ContainedIn
            };
            for &r in &strata {
                grid.assign(r, polys[0], status, RuleTag::UniqueNewton)?;
            }
        }
    }

    // R-slope: polygons below the stratum's generic first slope are
    // excluded; a lone survivor contains the stratum.
    for (r, row) in rows.iter().enumerate() {
        let Some(lambda) = row.lambda else { continue };
        let survivors: Vec<usize> = (0..columns.len())
            .filter(|&c| columns[c].first_slope() >= lambda)
            .collect();
        for c in 0..columns.len() {
            if !survivors.contains(&c) {
                grid.assign(r, c, CellStatus::Empty, RuleTag::Slope)?;
            }
        }
        if let [lone] = survivors[..] {
            grid.assign(r, lone, CellStatus::ContainedIn, RuleTag::Slope)?;
        }
    }

    let row_index = |u: [usize; 2]| -> usize {
        rows.iter()
            .position(|s| s.gamma.u() == u)
            .expect("stratum present")
    };
    let col_index = |name: &str| -> usize {
        column_names
            .iter()
            .position(|n| n == name)
            .expect("polygon present")
    };
    let ss = col_index("beta_ss");
    let b1 = col_index("beta_1");

    // R-hoeve: two imported supersingularity facts.
    for u in [[1, 2], [1, 3]] {
        grid.assign(row_index(u), ss, CellStatus::ContainedIn, RuleTag::Hoeve)?;
    }

    // R-minimal: fires only after re-deriving the identity between the
    // minimal module of beta_1 and the forgetful image of gamma_{2,4}.
    let gamma_24 = CosetRep::new(3, 2, vec![2, 4])?;
    let from_module = crate::modp::minimal_module(&columns[b1], 3)?.final_sequence()?;
    let from_perm = FinalSequence::from_permutation(&forget_unitary_32(&gamma_24)?, 5)?;
    if from_module != from_perm {
        return Err(Error::Inconsistent(format!(
            "minimal-module identity failed: module gives {from_module}, permutation gives {from_perm}"
        )));
    }
    grid.assign(row_index([2, 4]), b1, CellStatus::ContainedIn, RuleTag::Minimal)?;

    // R-closure: imported closure identity inside p-rank 0.
    grid.assign(row_index([3, 4]), b1, CellStatus::Intersects, RuleTag::Closure)?;

    // R-witness: the computed certificate.
    supersingular_witness(3)?;
    grid.assign(row_index([3, 4]), ss, CellStatus::Intersects, RuleTag::Witness)?;

    // Containment completion: a ContainedIn or Equal cell empties the rest
    // of its row (and, for Equal, its column), justified by the same rule.
    for r in 0..rows.len() {
        for c in 0..columns.len() {
            let Some(cell) = grid.cells[r][c].clone() else {
                continue;
            };
            if !matches!(cell.status, CellStatus::ContainedIn | CellStatus::Equal) {
                continue;
            }
            let tag = *cell.justification.first().expect("assigned cells carry a tag");
            for c2 in 0..columns.len() {
                if c2 != c && grid.status(r, c2).is_none() {
                    grid.assign(r, c2, CellStatus::Empty, tag)?;
                }
            }
            if cell.status == CellStatus::Equal {
                for r2 in 0..rows.len() {
                    if r2 != r && grid.status(r2, c).is_none() {
                        grid.assign(r2, c, CellStatus::Empty, tag)?;
                    }
                }
            }
        }
    }

    let cells: Vec<Vec<Cell>> = grid
        .cells
        .into_iter()
        .enumerate()
        .map(|(r, row)| {
            row.into_iter()
                .enumerate()
                .map(|(c, cell)| {
                    cell.ok_or_else(|| {
                        Error::Inconsistent(format!("cell ({r},{c}) left unassigned"))
                    })
                })
                .collect::<Result<Vec<Cell>>>()
        })
        .collect::<Result<Vec<_>>>()?;

    let table = InteractionTable {
        signature: (3, 2),
        rows,
        columns,
        column_names,
        cells,
    };
    table.validate()?;
    Ok(table)
}

impl InteractionTable {
    /// Structural invariants: every row meets some polygon; an Equal cell
    /// is alone in both its row and column; a ContainedIn cell is alone in
    /// its row.
    pub fn validate(&self) -> Result<()> {
        for (r, row) in self.cells.iter().enumerate() {
            if row.iter().all(|c| c.status == CellStatus::Empty) {
                return Err(Error::Inconsistent(format!(
                    "stratum {} meets no polygon",
                    self.rows[r].gamma
                )));
            }
            for (c, cell) in row.iter().enumerate() {
                match cell.status {
                    CellStatus::Equal => {
                        let row_ok = row
                            .iter()
                            .enumerate()
                            .all(|(c2, x)| c2 == c || x.status == CellStatus::Empty);
                        let col_ok = self
                            .cells
                            .iter()
                            .enumerate()
                            .all(|(r2, x)| r2 == r || x[c].status == CellStatus::Empty);
                        if !row_ok || !col_ok {
                            return Err(Error::Inconsistent(format!(
                                "Equal cell ({r},{c}) is not alone in its row and column"
                            )));
                        }
                    }
                    CellStatus::ContainedIn => {
                        if !row
                            .iter()
                            .enumerate()
                            .all(|(c2, x)| c2 == c || x.status == CellStatus::Empty)
                        {
                            return Err(Error::Inconsistent(format!(
                                "ContainedIn cell ({r},{c}) is not alone in its row"
                            )));
                        }
                    }
                    _ => {}
                }
                if cell.justification.is_empty() {
                    return Err(Error::Inconsistent(format!(
                        "cell ({r},{c}) carries no justification"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn cell(&self, gamma_u: &[usize], column_name: &str) -> Option<&Cell> {
        let r = self.rows.iter().position(|s| s.gamma.u() == gamma_u)?;
        let c = self.column_names.iter().position(|n| n == column_name)?;
        Some(&self.cells[r][c])
    }

    pub fn to_markdown(&self) -> String {
        let mut out = String::new();
        let pretty = |name: &str| name.replace("beta_", "β_");
        out.push_str("| EO stratum | dim | p-rank |");
        for (name, poly) in self.column_names.iter().zip(&self.columns) {
            out.push_str(&format!(" {} {} |", pretty(name), poly));
        }
        out.push('\n');
        out.push_str("|---|---|---|");
        for _ in &self.columns {
            out.push_str("---|");
        }
        out.push('\n');
        for (row, cells) in self.rows.iter().zip(&self.cells) {
            out.push_str(&format!(
                "| {} | {} | {} |",
                row.gamma, row.dimension, row.p_rank
            ));
            for cell in cells {
                let tags: Vec<&str> = cell.justification.iter().map(|t| t.id()).collect();
                out.push_str(&format!(" {} ({}) |", cell.status.as_str(), tags.join(", ")));
            }
            out.push('\n');
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("eo,dimension,p_rank,newton,status,justification\n");
        for (row, cells) in self.rows.iter().zip(&self.cells) {
            let gamma = format!(
                "gamma_{}",
                row.gamma
                    .u()
                    .iter()
                    .map(|x| x.to_string())
                    .collect::<Vec<_>>()
                    .join("_")
            );
            for (name, cell) in self.column_names.iter().zip(cells) {
                let tags: Vec<&str> = cell.justification.iter().map(|t| t.id()).collect();
                out.push_str(&format!(
                    "{gamma},{},{},{name},{},{}\n",
                    row.dimension,
                    row.p_rank,
                    cell.status.as_str(),
                    tags.join(";")
                ));
            }
        }
        out
    }

    pub fn to_json_value(&self) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|s| {
                json!({
                    "gamma": s.gamma.u(),
                    "label": s.gamma.label(),
                    "dimension": s.dimension,
                    "p_rank": s.p_rank,
                    "omega": s.omega.as_ref().map(|w| w.cycle_string()),
                    "phi": s.phi.as_ref().map(|f| f.tuple().to_vec()),
                    "lambda": s.lambda.as_ref().map(json_rat),
                })
            })
            .collect();
        let columns: Vec<Value> = self
            .columns
            .iter()
            .zip(&self.column_names)
            .map(|(p, name)| {
                json!({
                    "name": name,
                    "display": p.to_string(),
                    "q": p.q(),
                    "factors": p.factors(),
                    "p_rank": p.p_rank(),
                    "first_slope": json_rat(&p.first_slope()),
                })
            })
            .collect();
        let cells: Vec<Value> = self
            .cells
            .iter()
            .map(|row| {
                Value::Array(
                    row.iter()
                        .map(|cell| {
                            json!({
                                "status": cell.status.as_str(),
                                "justification": cell
                                    .justification
                                    .iter()
                                    .map(|t| t.id())
                                    .collect::<Vec<_>>(),
                            })
                        })
                        .collect(),
                )
            })
            .collect();
        let rules: serde_json::Map<String, Value> = RuleTag::all()
            .iter()
            .map(|t| {
                (
                    t.id().to_string(),
                    json!({"kind": t.kind(), "description": t.description()}),
                )
            })
            .collect();
        json!({
            "signature": [self.signature.0, self.signature.1],
            "rows": rows,
            "columns": columns,
            "cells": cells,
            "rules": rules,
        })
    }
}
