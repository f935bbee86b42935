//! The published facet tables as symbolic rational functions of the box
//! parameters, an exact expression parser/printer, evaluation at rational
//! arguments, and verification of the rows against enumerated vertex sets —
//! including a completeness check via symmetry-orbit expansion.

use crate::inequalities::{symmetry_orbit, Inequality, InequalityError, SymmetryOp};
use crate::linalg::dot;
use crate::lp::{check_inequality, FacetReport};
use crate::polytope::{affine_dimension, facet_enumeration, PolytopeError, SizeLimits, VRep};
use crate::ratio::Rat;
use crate::scenario::{BehaviorKind, PartyBounds, Scenario};
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

// ---------------------------------------------------------------------------
// Expression trees
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Symbol {
    L,
    H,
    Hx,
    Hy,
}

impl Symbol {
    pub fn name(self) -> &'static str {
        match self {
            Symbol::L => "l",
            Symbol::H => "h",
            Symbol::Hx => "hx",
            Symbol::Hy => "hy",
        }
    }
}

/// A rational function of the box parameters: integer literals, the symbols
/// `l`, `h`, `hx`, `hy`, the four arithmetic operators, unary minus, and
/// nonnegative integer powers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Int(i64),
    Sym(Symbol),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
}

#[derive(Debug, Error)]
pub enum TableError {
    #[error("parse error at byte {position}: {message}")]
    Parse { position: usize, message: String },
    #[error("pole: division by zero while evaluating `{cell}`")]
    Pole { cell: String },
    #[error("symbol `{0}` has no value in this table's parameter set")]
    UnboundSymbol(&'static str),
    #[error("parameters outside the table domain: {0}")]
    Domain(String),
    #[error("table `{id}` must have {expected} rows, found {got}")]
    RowCount { id: String, expected: usize, got: usize },
    #[error("row {row} has {got} cells, expected 16")]
    CellCount { row: usize, got: usize },
    #[error("missing `table:` header line")]
    MissingHeader,
    #[error("row {row} does not bound the vertex set in either orientation")]
    RowFailed { row: usize },
    #[error(transparent)]
    Inequality(#[from] InequalityError),
    #[error(transparent)]
    Polytope(#[from] PolytopeError),
}

/// Values bound to the symbols during evaluation.
#[derive(Debug, Clone, Default)]
pub struct SymbolValues {
    pub l: Option<Rat>,
    pub h: Option<Rat>,
    pub hx: Option<Rat>,
    pub hy: Option<Rat>,
}

impl SymbolValues {
    pub fn for_l(l: Rat) -> Self {
        SymbolValues { l: Some(l), ..Default::default() }
    }
    pub fn for_h(h: Rat) -> Self {
        SymbolValues { h: Some(h), ..Default::default() }
    }
    pub fn for_hx_hy(hx: Rat, hy: Rat) -> Self {
        SymbolValues { hx: Some(hx), hy: Some(hy), ..Default::default() }
    }
    fn get(&self, s: Symbol) -> Result<&Rat, TableError> {
        let v = match s {
            Symbol::L => &self.l,
            Symbol::H => &self.h,
            Symbol::Hx => &self.hx,
            Symbol::Hy => &self.hy,
        };
        v.as_ref().ok_or(TableError::UnboundSymbol(s.name()))
    }
}

impl Expr {
    /// Exact evaluation; division by zero is a pole.
    pub fn eval(&self, values: &SymbolValues) -> Result<Rat, TableError> {
        match self {
            Expr::Int(n) => Ok(Rat::from_integer((*n).into())),
            Expr::Sym(s) => Ok(values.get(*s)?.clone()),
            Expr::Neg(e) => Ok(-e.eval(values)?),
            Expr::Add(a, b) => Ok(a.eval(values)? + b.eval(values)?),
            Expr::Sub(a, b) => Ok(a.eval(values)? - b.eval(values)?),
            Expr::Mul(a, b) => Ok(a.eval(values)? * b.eval(values)?),
            Expr::Div(a, b) => {
                let d = b.eval(values)?;
                if d.is_zero() {
                    return Err(TableError::Pole { cell: self.to_text() });
                }
                Ok(a.eval(values)? / d)
            }
            Expr::Pow(a, k) => {
                let base = a.eval(values)?;
                let mut acc = Rat::one();
                for _ in 0..*k {
                    acc *= &base;
                }
                Ok(acc)
            }
        }
    }

    /// Canonical text form; parsing it back yields the identical tree.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        self.write(&mut s, 0);
        s
    }

    fn write(&self, out: &mut String, min_prec: u8) {
        // Precedence levels: add/sub 1, mul/div 2, unary minus 3, power 4,
        // atoms 5. Right operands are written one level tighter so that
        // left-associative reparsing reproduces the tree.
        match self {
            Expr::Int(n) => out.push_str(&n.to_string()),
            Expr::Sym(s) => out.push_str(s.name()),
            Expr::Neg(e) => {
                let wrap = min_prec > 3;
                if wrap {
                    out.push('(');
                }
                out.push('-');
                e.write(out, 4);
                if wrap {
                    out.push(')');
                }
            }
            Expr::Add(a, b) | Expr::Sub(a, b) => {
                let wrap = min_prec > 1;
                if wrap {
                    out.push('(');
                }
                a.write(out, 1);
                out.push_str(if matches!(self, Expr::Add(..)) { " + " } else { " - " });
                b.write(out, 2);
                if wrap {
                    out.push(')');
                }
            }
            Expr::Mul(a, b) | Expr::Div(a, b) => {
                let wrap = min_prec > 2;
                if wrap {
                    out.push('(');
                }
                a.write(out, 2);
                out.push_str(if matches!(self, Expr::Mul(..)) { "*" } else { "/" });
                b.write(out, 3);
                if wrap {
                    out.push(')');
                }
            }
            Expr::Pow(a, k) => {
                let wrap = min_prec > 4;
                if wrap {
                    out.push('(');
                }
                a.write(out, 5);
                out.push('^');
                out.push_str(&k.to_string());
                if wrap {
                    out.push(')');
                }
            }
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

struct Parser<'a> {
    text: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Self {
        Parser { text: text.as_bytes(), pos: 0 }
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, TableError> {
        Err(TableError::Parse { position: self.pos, message: message.into() })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.text.len() && self.text[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.text.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<u8> {
        let c = self.peek();
        if c.is_some() {
            self.pos += 1;
        }
        c
    }

    fn expr(&mut self) -> Result<Expr, TableError> {
        let mut node = self.term()?;
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.bump();
                    node = Expr::Add(node.into(), self.term()?.into());
                }
                Some(b'-') => {
                    self.bump();
                    node = Expr::Sub(node.into(), self.term()?.into());
                }
                _ => return Ok(node),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, TableError> {
        let mut node = self.unary()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.bump();
                    node = Expr::Mul(node.into(), self.unary()?.into());
                }
                Some(b'/') => {
                    self.bump();
                    node = Expr::Div(node.into(), self.unary()?.into());
                }
                _ => return Ok(node),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, TableError> {
        if self.peek() == Some(b'-') {
            self.bump();
            return Ok(Expr::Neg(self.unary()?.into()));
        }
        self.postfix()
    }

    fn postfix(&mut self) -> Result<Expr, TableError> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.bump();
            let k = self.uint()?;
            if k > 64 {
                return self.error("exponent too large");
            }
            return Ok(Expr::Pow(base.into(), k as u32));
        }
        Ok(base)
    }

    fn uint(&mut self) -> Result<u64, TableError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.text.len() && self.text[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == start {
            return self.error("expected a number");
        }
        std::str::from_utf8(&self.text[start..self.pos])
            .unwrap()
            .parse()
            .or_else(|_| self.error("number out of range"))
    }

    fn atom(&mut self) -> Result<Expr, TableError> {
        match self.peek() {
            Some(b'(') => {
                self.bump();
                let inner = self.expr()?;
                if self.peek() != Some(b')') {
                    return self.error("expected `)`");
                }
                self.bump();
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() => {
                let n = self.uint()?;
                i64::try_from(n).map(Expr::Int).or_else(|_| self.error("literal out of range"))
            }
            Some(b'l') => {
                self.bump();
                Ok(Expr::Sym(Symbol::L))
            }
            Some(b'h') => {
                self.bump();
                match self.text.get(self.pos) {
                    Some(b'x') => {
                        self.pos += 1;
                        Ok(Expr::Sym(Symbol::Hx))
                    }
                    Some(b'y') => {
                        self.pos += 1;
                        Ok(Expr::Sym(Symbol::Hy))
                    }
                    _ => Ok(Expr::Sym(Symbol::H)),
                }
            }
            Some(c) => self.error(format!("unexpected byte `{}`", c as char)),
            None => self.error("unexpected end of input"),
        }
    }
}

/// Parse one rational-function expression.
pub fn parse_rational_function(text: &str) -> Result<Expr, TableError> {
    let mut p = Parser::new(text);
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != p.text.len() {
        return p.error("trailing input");
    }
    Ok(e)
}

// ---------------------------------------------------------------------------
// Tables
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TableId {
    B1,
    B2,
    C,
}

impl TableId {
    pub fn name(self) -> &'static str {
        match self {
            TableId::B1 => "B1",
            TableId::B2 => "B2",
            TableId::C => "C",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "B1" => Some(TableId::B1),
            "B2" => Some(TableId::B2),
            "C" => Some(TableId::C),
            _ => None,
        }
    }
}

/// A facet table: rows of 16 coefficient expressions in the published column
/// order (column index `a + 2b + 4x + 8y`).
#[derive(Debug, Clone)]
pub struct FacetTable {
    pub id: TableId,
    pub domain: String,
    pub rows: Vec<Vec<Expr>>,
}

/// Parse a table data file: `#` starts a comment, the header must contain
/// `# table: <id>` and `# domain: <text>`, and every remaining line holds 16
/// semicolon-separated expressions.
pub fn parse_table(text: &str) -> Result<FacetTable, TableError> {
    let mut id = None;
    let mut domain = String::new();
    let mut rows = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if let Some(comment) = line.strip_prefix('#') {
            let comment = comment.trim();
            if let Some(v) = comment.strip_prefix("table:") {
                id = TableId::from_name(v);
            } else if let Some(v) = comment.strip_prefix("domain:") {
                domain = v.trim().to_string();
            }
            continue;
        }
        if line.is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split(';').collect();
        if cells.len() != 16 {
            return Err(TableError::CellCount { row: lineno + 1, got: cells.len() });
        }
        let row: Vec<Expr> =
            cells.iter().map(|c| parse_rational_function(c)).collect::<Result<_, _>>()?;
        rows.push(row);
    }
    let id = id.ok_or(TableError::MissingHeader)?;
    Ok(FacetTable { id, domain, rows })
}

const B1_TEXT: &str = include_str!("../data/b1.tab");
const B2_TEXT: &str = include_str!("../data/b2.tab");
const C_TEXT: &str = include_str!("../data/c.tab");

/// The built-in transcriptions of the published tables.
pub fn builtin(id: TableId) -> Result<FacetTable, TableError> {
    let (text, expected) = match id {
        TableId::B1 => (B1_TEXT, 74),
        TableId::B2 => (B2_TEXT, 93),
        TableId::C => (C_TEXT, 0),
    };
    let table = parse_table(text)?;
    if expected != 0 && table.rows.len() != expected {
        return Err(TableError::RowCount {
            id: id.name().into(),
            expected,
            got: table.rows.len(),
        });
    }
    Ok(table)
}

fn check_domain(id: TableId, values: &SymbolValues) -> Result<(), TableError> {
    let quarter = Rat::new(1.into(), 4.into());
    let third = Rat::new(1.into(), 3.into());
    let half = Rat::new(1.into(), 2.into());
    match id {
        TableId::B1 => {
            let l = values.l.as_ref().ok_or(TableError::UnboundSymbol("l"))?;
            if !(l.is_positive() && *l < quarter) {
                return Err(TableError::Domain(format!("need 0 < l < 1/4, got l = {l}")));
            }
        }
        TableId::B2 => {
            let h = values.h.as_ref().ok_or(TableError::UnboundSymbol("h"))?;
            if !(*h > quarter && *h < third) {
                return Err(TableError::Domain(format!("need 1/4 < h < 1/3, got h = {h}")));
            }
        }
        TableId::C => {
            for (name, v) in [("hx", &values.hx), ("hy", &values.hy)] {
                let v = v.as_ref().ok_or(TableError::UnboundSymbol("hx"))?;
                if !(*v >= half && *v < Rat::one()) {
                    return Err(TableError::Domain(format!(
                        "need 1/2 <= {name} < 1, got {name} = {v}"
                    )));
                }
            }
        }
    }
    Ok(())
}

/// The scenario every built-in table lives in.
pub fn table_scenario() -> Scenario {
    Scenario::symmetric(2, 2, 2)
}

/// Party-ordered input bounds for the vertex set table C is verified
/// against. The published `h_x` bounds the input source of the party whose
/// outcome/input digits come *second* under this crate's column reading, so
/// the bound list is `(h_y, h_x)`. Calibrated against facet checks at
/// asymmetric parameters: with this binding every row verifies as a facet
/// (e.g. 75/75 at (5/8, 18/25)); with the naive order about a third fail.
///
/// The rows are family representatives stated for `h_x ≤ h_y`: with
/// `h_x > h_y` eleven rows fail as stated, and their valid counterparts are
/// the party-exchange images (swap the two parameter values and the party
/// roles). Verification on that half reports the failures per row rather
/// than rejecting the parameters.
pub fn independent_bounds(values: &SymbolValues) -> Result<PartyBounds, TableError> {
    let hx = values.hx.clone().ok_or(TableError::UnboundSymbol("hx"))?;
    let hy = values.hy.clone().ok_or(TableError::UnboundSymbol("hy"))?;
    Ok(PartyBounds::binary(vec![hy, hx]))
}

/// Map a published column index (`a + 2b + 4x + 8y`) to the canonical index.
fn column_to_canonical(scenario: &Scenario, column: usize) -> usize {
    let a = column & 1;
    let b = (column >> 1) & 1;
    let x = (column >> 2) & 1;
    let y = (column >> 3) & 1;
    scenario.canonical_index(&[a, b], &[x, y]).expect("binary pair in range")
}

fn row_to_inequality(
    scenario: &Scenario,
    row: &[Expr],
    values: &SymbolValues,
) -> Result<Inequality, TableError> {
    let mut beta = vec![Rat::zero(); scenario.joint_dim()];
    for (col, cell) in row.iter().enumerate() {
        beta[column_to_canonical(scenario, col)] = cell.eval(values)?;
    }
    Ok(Inequality::new(scenario.clone(), BehaviorKind::Joint, beta, Rat::zero())?)
}

/// Evaluate every row at the given parameter values (must lie in the
/// table's domain). Any pole aborts; use [`evaluate_rows`] for per-row
/// outcomes.
pub fn evaluate_table(
    table: &FacetTable,
    values: &SymbolValues,
) -> Result<Vec<Inequality>, TableError> {
    check_domain(table.id, values)?;
    let scenario = table_scenario();
    table.rows.iter().map(|row| row_to_inequality(&scenario, row, values)).collect()
}

/// Per-row evaluation results; poles are reported per row instead of
/// aborting (domain bounds are still enforced except at the degenerate
/// boundary, which is allowed here so limits can be inspected).
pub fn evaluate_rows(
    table: &FacetTable,
    values: &SymbolValues,
) -> Vec<Result<Inequality, TableError>> {
    let scenario = table_scenario();
    table.rows.iter().map(|row| row_to_inequality(&scenario, row, values)).collect()
}

// ---------------------------------------------------------------------------
// Verification
// ---------------------------------------------------------------------------

/// Verification outcome for one table row.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RowReport {
    /// 1-based row number as published.
    pub row: usize,
    /// `None` when the row hit a pole at these parameters.
    pub report: Option<FacetReport>,
    pub pole: Option<String>,
}

/// Summary of a table verification run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TableReport {
    pub table: String,
    pub rows: Vec<RowReport>,
    pub valid_rows: usize,
    pub facet_rows: usize,
    pub flipped_rows: usize,
    pub failed_rows: usize,
    pub pole_rows: usize,
}

/// Check every row of the table against a vertex set: validity after
/// orientation normalization, saturation count, and facet rank.
pub fn verify_table(table: &FacetTable, values: &SymbolValues, vertices: &VRep) -> TableReport {
    let dim = affine_dimension(vertices);
    let rows: Vec<RowReport> = evaluate_rows(table, values)
        .into_par_iter()
        .enumerate()
        .map(|(i, outcome)| match outcome {
            Ok(ineq) => RowReport {
                row: i + 1,
                report: Some(check_inequality(&ineq.beta, &ineq.bound, &vertices.vertices, dim)),
                pole: None,
            },
            Err(e) => RowReport { row: i + 1, report: None, pole: Some(e.to_string()) },
        })
        .collect();
    let mut valid = 0;
    let mut facet = 0;
    let mut flipped = 0;
    let mut failed = 0;
    let mut poles = 0;
    for r in &rows {
        match &r.report {
            Some(rep) => {
                if rep.valid {
                    valid += 1;
                } else {
                    failed += 1;
                }
                if rep.is_facet {
                    facet += 1;
                }
                if rep.orientation_flipped {
                    flipped += 1;
                }
            }
            None => poles += 1,
        }
    }
    TableReport {
        table: table.id.name().into(),
        rows,
        valid_rows: valid,
        facet_rows: facet,
        flipped_rows: flipped,
        failed_rows: failed,
        pole_rows: poles,
    }
}

// ---------------------------------------------------------------------------
// Completeness via orbit expansion
// ---------------------------------------------------------------------------

/// A facet's identity, independent of its coefficient representative: the
/// set of vertices that saturate it, as a bitmask over the vertex list.
fn saturation_key(beta: &[Rat], bound: &Rat, vertices: &[Vec<Rat>]) -> Option<Vec<u64>> {
    let mut mask = vec![0u64; vertices.len().div_ceil(64)];
    for (i, v) in vertices.iter().enumerate() {
        let slack = dot(beta, v) - bound;
        if slack.is_positive() {
            return None; // not valid in this orientation
        }
        if slack.is_zero() {
            mask[i / 64] |= 1 << (i % 64);
        }
    }
    Some(mask)
}

/// Per-row orbit summary inside a completeness report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OrbitReport {
    pub row: usize,
    pub orbit_size: usize,
    /// Orbit members that are facets of the enumerated polytope.
    pub covered: usize,
    pub pole: Option<String>,
    pub invalid: bool,
}

/// Outcome of comparing a table's orbit expansion against direct facet
/// enumeration.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CompletenessReport {
    pub table: String,
    pub enumerated_facets: usize,
    /// Distinct facets covered by the expanded table rows.
    pub covered_facets: usize,
    /// Enumerated facets not covered by any table-row orbit.
    pub missing: usize,
    /// Expanded orbit members that are valid but not facets of the
    /// enumeration (would indicate an enumeration or transcription bug).
    pub extra: usize,
    pub rows: Vec<OrbitReport>,
}

/// Expand every table row under the symmetry group generated by `gens`
/// (orienting rows first so each is valid) and compare the resulting facet
/// set against `facet_enumeration` of the vertex list.
pub fn completeness_check(
    table: &FacetTable,
    values: &SymbolValues,
    vertices: &VRep,
    gens: &[SymmetryOp],
    limits: &SizeLimits,
) -> Result<CompletenessReport, TableError> {
    let dim = affine_dimension(vertices);
    let hrep = facet_enumeration(vertices, limits)?;
    let mut enumerated: BTreeMap<Vec<u64>, bool> = BTreeMap::new();
    for (a, b) in &hrep.ineqs {
        let key = saturation_key(a, b, &vertices.vertices)
            .expect("enumerated facet must be valid");
        enumerated.insert(key, false);
    }
    let enumerated_facets = enumerated.len();

    let mut rows = Vec::new();
    let mut extra = 0usize;
    for (i, outcome) in evaluate_rows(table, values).into_iter().enumerate() {
        let ineq = match outcome {
            Ok(ineq) => ineq,
            Err(e) => {
                rows.push(OrbitReport {
                    row: i + 1,
                    orbit_size: 0,
                    covered: 0,
                    pole: Some(e.to_string()),
                    invalid: false,
                });
                continue;
            }
        };
        // Orient the row so it is valid on the vertex set.
        let rep = check_inequality(&ineq.beta, &ineq.bound, &vertices.vertices, dim);
        if !rep.valid {
            rows.push(OrbitReport {
                row: i + 1,
                orbit_size: 0,
                covered: 0,
                pole: None,
                invalid: true,
            });
            continue;
        }
        let oriented = if rep.orientation_flipped {
            Inequality {
                scenario: ineq.scenario.clone(),
                space: ineq.space,
                beta: ineq.beta.iter().map(|c| -c.clone()).collect(),
                bound: -ineq.bound.clone(),
            }
        } else {
            ineq
        };
        let orbit = symmetry_orbit(&oriented, gens)?;
        let mut covered = 0usize;
        for member in &orbit {
            match saturation_key(&member.beta, &member.bound, &vertices.vertices) {
                Some(key) => match enumerated.get_mut(&key) {
                    Some(seen) => {
                        if !*seen {
                            *seen = true;
                        }
                        covered += 1;
                    }
                    None => extra += 1,
                },
                None => extra += 1,
            }
        }
        rows.push(OrbitReport {
            row: i + 1,
            orbit_size: orbit.len(),
            covered,
            pole: None,
            invalid: false,
        });
    }

    let covered_facets = enumerated.values().filter(|&&seen| seen).count();
    Ok(CompletenessReport {
        table: table.id.name().into(),
        enumerated_facets,
        covered_facets,
        missing: enumerated_facets - covered_facets,
        extra,
        rows,
    })
}

/// Assemble a full H-representation of the polytope from the table alone:
/// evaluate every row, orient it against `vertices`, expand its orbit under
/// `gens`, deduplicate the resulting rows canonically, and attach the
/// affine-hull equalities of the vertex set. Poled or invalid rows abort —
/// an expansion with holes would not bound the polytope.
pub fn expanded_hrep(
    table: &FacetTable,
    values: &SymbolValues,
    vertices: &VRep,
    gens: &[SymmetryOp],
) -> Result<crate::polytope::HRep, TableError> {
    let dim = affine_dimension(vertices);
    let mut unique: BTreeMap<(Vec<Rat>, Rat), ()> = BTreeMap::new();
    for (i, outcome) in evaluate_rows(table, values).into_iter().enumerate() {
        let ineq = outcome?;
        let rep = check_inequality(&ineq.beta, &ineq.bound, &vertices.vertices, dim);
        if !rep.valid {
            return Err(TableError::RowFailed { row: i + 1 });
        }
        let oriented = if rep.orientation_flipped {
            Inequality {
                scenario: ineq.scenario.clone(),
                space: ineq.space,
                beta: ineq.beta.iter().map(|c| -c.clone()).collect(),
                bound: -ineq.bound.clone(),
            }
        } else {
            ineq
        };
        for member in symmetry_orbit(&oriented, gens)? {
            unique.insert(crate::polytope::canonical_row(&member.beta, &member.bound), ());
        }
    }
    Ok(crate::polytope::HRep {
        dim: vertices.dim,
        ineqs: unique.into_keys().collect(),
        eqs: crate::polytope::affine_hull_equalities(vertices),
    })
}
