//! Polytope representations and the concrete vertex/facet constructions for
//! measurement-dependent local models.
//!
//! Conversions between the two representations run through the exact
//! double-description machinery in [`crate::dd`]; everything stays in
//! `BigRational` arithmetic end to end.

use std::collections::HashSet;

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dd;
use crate::linalg::{affine_rank, AffineElimination};
use crate::ratio::{serde_rat_mat, Rat};
use crate::scenario::{
    mixed_radix, validate_mdl_params, validate_party_bounds, InputDistribution, MdlParams,
    PartyBounds, Scenario, ScenarioError,
};

#[derive(Debug, thiserror::Error)]
pub enum PolytopeError {
    #[error("{what} has size {got}, exceeding the limit {max} (raise SizeLimits to override)")]
    TooLarge { what: String, got: usize, max: usize },
    #[error("polyhedron is unbounded: {0}")]
    UnboundedPolyhedron(&'static str),
    #[error("equality system is inconsistent")]
    InconsistentEqualities,
    #[error("empty input: {0}")]
    EmptyInput(&'static str),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
}

/// Guard rails for the enumeration routines. The defaults cover every
/// scenario treated here; raise the fields to push further.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SizeLimits {
    pub max_dim: usize,
    pub max_candidates: usize,
}

impl Default for SizeLimits {
    fn default() -> Self {
        Self {
            max_dim: 64,
            max_candidates: 20_000,
        }
    }
}

impl SizeLimits {
    pub fn unlimited() -> Self {
        Self {
            max_dim: usize::MAX,
            max_candidates: usize::MAX,
        }
    }

    fn check(&self, what: &str, got: usize, max: usize) -> Result<(), PolytopeError> {
        if got > max {
            Err(PolytopeError::TooLarge {
                what: what.to_string(),
                got,
                max,
            })
        } else {
            Ok(())
        }
    }

    fn check_dim(&self, what: &str, dim: usize) -> Result<(), PolytopeError> {
        self.check(what, dim, self.max_dim)
    }

    fn check_candidates(&self, what: &str, n: usize) -> Result<(), PolytopeError> {
        self.check(what, n, self.max_candidates)
    }
}

// ---------------------------------------------------------------------------
// Representations
// ---------------------------------------------------------------------------

/// Vertex representation: the polytope is the convex hull of `vertices`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VRep {
    pub dim: usize,
    #[serde(with = "serde_rat_mat")]
    pub vertices: Vec<Vec<Rat>>,
}

/// Halfspace representation: rows `a·x ≤ b` plus equalities `e·x = f`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HRep {
    pub dim: usize,
    #[serde(with = "serde_rows")]
    pub ineqs: Vec<(Vec<Rat>, Rat)>,
    #[serde(with = "serde_rows")]
    pub eqs: Vec<(Vec<Rat>, Rat)>,
}

/// (De)serialize constraint rows as `{"a": [...], "b": "..."}` objects with
/// rationals rendered as strings.
mod serde_rows {
    use super::Rat;
    use crate::ratio::{format_rat, parse_rat};
    use serde::de::Error as DeError;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Row {
        a: Vec<String>,
        b: String,
    }

    pub fn serialize<S: Serializer>(
        rows: &[(Vec<Rat>, Rat)],
        ser: S,
    ) -> Result<S::Ok, S::Error> {
        let raw: Vec<Row> = rows
            .iter()
            .map(|(a, b)| Row {
                a: a.iter().map(format_rat).collect(),
                b: format_rat(b),
            })
            .collect();
        raw.serialize(ser)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        de: D,
    ) -> Result<Vec<(Vec<Rat>, Rat)>, D::Error> {
        let raw = Vec::<Row>::deserialize(de)?;
        raw.into_iter()
            .map(|row| {
                let a = row
                    .a
                    .iter()
                    .map(|s| parse_rat(s).map_err(D::Error::custom))
                    .collect::<Result<Vec<_>, _>>()?;
                let b = parse_rat(&row.b).map_err(D::Error::custom)?;
                Ok((a, b))
            })
            .collect()
    }
}

/// Scale `(a, b)` jointly to the primitive integer row with the same
/// orientation (positive scaling only, so the inequality is unchanged).
pub fn canonical_row(a: &[Rat], b: &Rat) -> (Vec<Rat>, Rat) {
    let mut all = a.to_vec();
    all.push(b.clone());
    let ints = dd::primitive_from_rat(&all);
    let mut rats: Vec<Rat> = ints.into_iter().map(Rat::from_integer).collect();
    let b = rats.pop().expect("bound entry");
    (rats, b)
}

/// Like [`canonical_row`] but additionally fixes the sign so the first
/// nonzero coefficient is positive — the canonical form for equalities,
/// where both orientations describe the same hyperplane.
pub fn canonical_eq(a: &[Rat], b: &Rat) -> (Vec<Rat>, Rat) {
    let (mut ca, mut cb) = canonical_row(a, b);
    let flip = match ca.iter().find(|v| !v.is_zero()) {
        Some(first) => first.is_negative(),
        None => cb.is_negative(),
    };
    if flip {
        for v in ca.iter_mut() {
            *v = -v.clone();
        }
        cb = -cb;
    }
    (ca, cb)
}

/// Affine dimension of the convex hull of the vertices.
pub fn affine_dimension(vrep: &VRep) -> usize {
    assert!(!vrep.vertices.is_empty(), "affine_dimension of an empty vertex set");
    affine_rank(&vrep.vertices)
}

// ---------------------------------------------------------------------------
// Representation conversion
// ---------------------------------------------------------------------------

/// All facets (and affine-hull equalities) of the convex hull of a vertex
/// list, via the double description of the dual cone
/// `{(f, c) : f·v ≤ c for every vertex v}`. Rows come back in primitive
/// integer form, sorted lexicographically.
pub fn facet_enumeration(vrep: &VRep, limits: &SizeLimits) -> Result<HRep, PolytopeError> {
    if vrep.vertices.is_empty() {
        return Err(PolytopeError::EmptyInput("facet_enumeration needs vertices"));
    }
    let d = vrep.dim;
    for v in &vrep.vertices {
        if v.len() != d {
            return Err(PolytopeError::DimensionMismatch(format!(
                "vertex has {} coordinates in a {d}-dimensional V-rep",
                v.len()
            )));
        }
    }
    limits.check_dim("facet_enumeration dimension", d + 1)?;
    limits.check_candidates("facet_enumeration vertex count", vrep.vertices.len())?;

    let rows: Vec<Vec<Rat>> = vrep
        .vertices
        .iter()
        .map(|v| {
            let mut row: Vec<Rat> = v.iter().map(|x| -x.clone()).collect();
            row.push(Rat::one());
            row
        })
        .collect();
    let cone = dd::extreme_rays(&rows, d + 1);

    let mut eqs: Vec<(Vec<Rat>, Rat)> = cone
        .lineality
        .iter()
        .map(|z| {
            let rats: Vec<Rat> = z.iter().cloned().map(Rat::from_integer).collect();
            canonical_eq(&rats[..d], &rats[d])
        })
        .collect();
    eqs.sort();

    let mut ineqs: Vec<(Vec<Rat>, Rat)> = Vec::new();
    for z in &cone.rays {
        if z[..d].iter().all(|x| x.is_zero()) {
            continue; // the trivial ray 0·x ≤ c
        }
        let rats: Vec<Rat> = z.iter().cloned().map(Rat::from_integer).collect();
        ineqs.push((rats[..d].to_vec(), rats[d].clone()));
    }
    ineqs.sort();

    Ok(HRep { dim: d, ineqs, eqs })
}

/// All vertices of a bounded H-rep polytope: equalities are substituted out,
/// the rest is homogenized and handed to the double description. An H-rep
/// with an unbounded feasible set is rejected; an infeasible one yields an
/// empty vertex list.
pub fn vertex_enumeration(hrep: &HRep, limits: &SizeLimits) -> Result<VRep, PolytopeError> {
    limits.check_dim("vertex_enumeration dimension", hrep.dim + 1)?;
    limits.check_candidates("vertex_enumeration constraint count", hrep.ineqs.len())?;

    let empty = || VRep {
        dim: hrep.dim,
        vertices: Vec::new(),
    };
    let elim = match AffineElimination::new(&hrep.eqs, hrep.dim) {
        Ok(e) => e,
        Err(_) => return Ok(empty()),
    };
    let rd = elim.reduced_dim();
    let mut reduced: Vec<(Vec<Rat>, Rat)> = Vec::new();
    for (a, b) in &hrep.ineqs {
        let (ra, rb) = elim.reduce_linear(a, b);
        if ra.iter().all(|v| v.is_zero()) {
            if rb.is_negative() {
                return Ok(empty());
            }
            continue;
        }
        reduced.push((ra, rb));
    }
    if rd == 0 {
        return Ok(VRep {
            dim: hrep.dim,
            vertices: vec![elim.lift_point(&[])],
        });
    }

    // Homogenize: { (y, t) : t ≥ 0, b t − a·y ≥ 0 }.
    let mut rows: Vec<Vec<Rat>> = Vec::with_capacity(reduced.len() + 1);
    let mut t_row = vec![Rat::zero(); rd + 1];
    t_row[rd] = Rat::one();
    rows.push(t_row);
    for (a, b) in &reduced {
        let mut row: Vec<Rat> = a.iter().map(|x| -x.clone()).collect();
        row.push(b.clone());
        rows.push(row);
    }
    let cone = dd::extreme_rays(&rows, rd + 1);
    if !cone.lineality.is_empty() {
        return Err(PolytopeError::UnboundedPolyhedron(
            "the feasible set contains a whole line",
        ));
    }
    let mut vertices = Vec::new();
    for ray in &cone.rays {
        let t = &ray[rd];
        if t.is_zero() {
            return Err(PolytopeError::UnboundedPolyhedron(
                "the feasible set contains a recession ray",
            ));
        }
        debug_assert!(t.is_positive());
        let t_rat = Rat::from_integer(t.clone());
        let y: Vec<Rat> = ray[..rd]
            .iter()
            .map(|x| Rat::from_integer(x.clone()) / &t_rat)
            .collect();
        vertices.push(elim.lift_point(&y));
    }
    vertices.sort();
    vertices.dedup();
    Ok(VRep {
        dim: hrep.dim,
        vertices,
    })
}

/// Drop every point that lies in the convex hull of the others, keeping the
/// extreme points of the hull (input order preserved, duplicates removed).
pub fn remove_redundant_vertices(vrep: &VRep) -> VRep {
    let mut distinct: Vec<Vec<Rat>> = Vec::new();
    let mut seen: HashSet<Vec<Rat>> = HashSet::new();
    for v in &vrep.vertices {
        if seen.insert(v.clone()) {
            distinct.push(v.clone());
        }
    }
    if distinct.len() <= 2 {
        return VRep {
            dim: vrep.dim,
            vertices: distinct,
        };
    }
    let keep: Vec<bool> = (0..distinct.len())
        .into_par_iter()
        .map(|i| {
            let others: Vec<Vec<Rat>> = distinct
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, v)| v.clone())
                .collect();
            let cert = crate::lp::membership(&distinct[i], &others)
                .expect("dimensions agree by construction");
            !cert.is_inside()
        })
        .collect();
    let vertices = distinct
        .into_iter()
        .zip(keep)
        .filter(|(_, k)| *k)
        .map(|(v, _)| v)
        .collect();
    VRep {
        dim: vrep.dim,
        vertices,
    }
}

// ---------------------------------------------------------------------------
// Scenario-specific constructions
// ---------------------------------------------------------------------------

/// Deterministic single-party strategies combined across all parties: the
/// vertices of the local polytope in conditional space. Party 0's strategy
/// varies slowest, and within a party the choice for input 0 varies slowest.
pub fn local_vertices(scenario: &Scenario) -> VRep {
    let dim = scenario.joint_dim();
    // Flatten (party, input) → outcome-count, party-major.
    let mut dims = Vec::new();
    let mut offsets = vec![0usize; scenario.parties()];
    for i in 0..scenario.parties() {
        offsets[i] = dims.len();
        for x in 0..scenario.inputs()[i] {
            dims.push(scenario.outputs_at(i, x));
        }
    }
    let contexts = scenario.contexts();
    let mut vertices = Vec::new();
    for choice in mixed_radix(&dims) {
        let mut v = vec![Rat::zero(); dim];
        for x in &contexts {
            let a: Vec<usize> = (0..scenario.parties())
                .map(|i| choice[offsets[i] + x[i]])
                .collect();
            let idx = scenario.canonical_index(&a, x).expect("valid by construction");
            v[idx] = Rat::one();
        }
        vertices.push(v);
    }
    VRep { dim, vertices }
}

/// Extreme points of `{ q ∈ R^k : Σ q = 1, l ≤ q_i ≤ h }`: at most one
/// coordinate away from a bound, pinned by the normalization.
fn bounded_simplex_vertices(k: usize, l: &Rat, h: &Rat) -> Vec<Vec<Rat>> {
    assert!(k >= 1 && k <= 24, "input polytope dimension out of range");
    let mut seen: HashSet<Vec<Rat>> = HashSet::new();
    let mut out: Vec<Vec<Rat>> = Vec::new();
    // Position `p` carries the remainder; every subset of the rest sits at h.
    for p in 0..k {
        let rest: Vec<usize> = (0..k).filter(|&i| i != p).collect();
        for mask in 0u32..(1u32 << rest.len()) {
            let s = mask.count_ones() as i64;
            let r = Rat::one()
                - Rat::from_integer(s.into()) * h
                - Rat::from_integer((k as i64 - 1 - s).into()) * l;
            if &r < l || &r > h {
                continue;
            }
            let mut q = vec![l.clone(); k];
            for (bit, &idx) in rest.iter().enumerate() {
                if mask & (1 << bit) != 0 {
                    q[idx] = h.clone();
                }
            }
            q[p] = r.clone();
            if seen.insert(q.clone()) {
                out.push(q);
            }
        }
    }
    out.sort();
    out
}

/// Vertices of the input polytope `{ q ∈ Δ_K : l ≤ q(x⃗) ≤ h }`, indexed by
/// context rank.
pub fn input_vertices(scenario: &Scenario, params: &MdlParams) -> Result<VRep, PolytopeError> {
    validate_mdl_params(scenario, params)?;
    let k = scenario.num_contexts();
    Ok(VRep {
        dim: k,
        vertices: bounded_simplex_vertices(k, &params.l, &params.h),
    })
}

/// Vertices of the independent-sources input polytope: products of per-party
/// distributions q_i with `l_i ≤ q_i(x) ≤ h_i`.
pub fn independent_input_vertices(
    scenario: &Scenario,
    bounds: &PartyBounds,
) -> Result<VRep, PolytopeError> {
    validate_party_bounds(scenario, bounds)?;
    let factors: Vec<Vec<Vec<Rat>>> = (0..scenario.parties())
        .map(|i| bounded_simplex_vertices(scenario.inputs()[i], &bounds.l[i], &bounds.h[i]))
        .collect();
    let counts: Vec<usize> = factors.iter().map(|f| f.len()).collect();
    let contexts = scenario.contexts();
    let mut vertices = Vec::new();
    for combo in mixed_radix(&counts) {
        let mut q = Vec::with_capacity(contexts.len());
        for x in &contexts {
            let mut w = Rat::one();
            for i in 0..scenario.parties() {
                w *= &factors[i][combo[i]][x[i]];
            }
            q.push(w);
        }
        vertices.push(q);
    }
    Ok(VRep {
        dim: scenario.num_contexts(),
        vertices,
    })
}

/// What to do with the raw pairwise products of input and local vertices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProductMode {
    /// Every pair, in input-major order.
    Raw,
    /// Drop exact duplicates (arise when an input vertex kills a context).
    Dedupe,
    /// Dedupe, then drop points inside the hull of the others.
    Minimize,
}

/// Joint-space products `v(a⃗, x⃗) = q(x⃗) · D(a⃗ | x⃗)` of input-polytope
/// vertices and conditional local vertices.
pub fn product_vertices(
    scenario: &Scenario,
    inputs: &VRep,
    locals: &VRep,
    mode: ProductMode,
    limits: &SizeLimits,
) -> Result<VRep, PolytopeError> {
    let dim = scenario.joint_dim();
    if inputs.dim != scenario.num_contexts() {
        return Err(PolytopeError::DimensionMismatch(format!(
            "input vertices live in dimension {}, scenario has {} contexts",
            inputs.dim,
            scenario.num_contexts()
        )));
    }
    if locals.dim != dim {
        return Err(PolytopeError::DimensionMismatch(format!(
            "local vertices live in dimension {}, scenario index set has {dim}",
            locals.dim
        )));
    }
    let count = inputs.vertices.len().saturating_mul(locals.vertices.len());
    limits.check_candidates("product vertex count", count)?;

    let ctx_of: Vec<usize> = scenario
        .index_pairs()
        .iter()
        .map(|(_, x)| scenario.context_rank(x).expect("valid context"))
        .collect();
    let mut vertices = Vec::with_capacity(count);
    for q in &inputs.vertices {
        for d in &locals.vertices {
            let v: Vec<Rat> = d
                .iter()
                .enumerate()
                .map(|(idx, dv)| {
                    if dv.is_zero() {
                        Rat::zero()
                    } else {
                        &q[ctx_of[idx]] * dv
                    }
                })
                .collect();
            vertices.push(v);
        }
    }
    let vrep = VRep { dim, vertices };
    Ok(match mode {
        ProductMode::Raw => vrep,
        ProductMode::Dedupe => {
            let mut seen = HashSet::new();
            let vertices = vrep
                .vertices
                .into_iter()
                .filter(|v| seen.insert(v.clone()))
                .collect();
            VRep { dim, vertices }
        }
        ProductMode::Minimize => remove_redundant_vertices(&VRep {
            dim,
            vertices: {
                let mut seen = HashSet::new();
                vrep.vertices
                    .into_iter()
                    .filter(|v| seen.insert(v.clone()))
                    .collect()
            },
        }),
    })
}

/// Vertices of the measurement-dependent local polytope in joint space.
pub fn mdl_vertices(
    scenario: &Scenario,
    params: &MdlParams,
    mode: ProductMode,
    limits: &SizeLimits,
) -> Result<VRep, PolytopeError> {
    let inputs = input_vertices(scenario, params)?;
    let locals = local_vertices(scenario);
    product_vertices(scenario, &inputs, &locals, mode, limits)
}

/// Vertices of the independent-sources variant in joint space.
pub fn independent_mdl_vertices(
    scenario: &Scenario,
    bounds: &PartyBounds,
    mode: ProductMode,
    limits: &SizeLimits,
) -> Result<VRep, PolytopeError> {
    let inputs = independent_input_vertices(scenario, bounds)?;
    let locals = local_vertices(scenario);
    product_vertices(scenario, &inputs, &locals, mode, limits)
}

/// H-representation of the nonsignaling polytope in conditional space:
/// positivity for every entry, one normalization equality per context, and
/// one marginal-equality row per (party, own input, own outcome, non-base
/// context of the others) — the same enumeration order as
/// [`crate::scenario::signaling_residuals`].
pub fn ns_polytope_hrep(scenario: &Scenario) -> HRep {
    let dim = scenario.joint_dim();
    let ineqs: Vec<(Vec<Rat>, Rat)> = (0..dim)
        .map(|idx| {
            let mut a = vec![Rat::zero(); dim];
            a[idx] = -Rat::one();
            (a, Rat::zero())
        })
        .collect();

    let mut eqs: Vec<(Vec<Rat>, Rat)> = Vec::new();
    let contexts = scenario.contexts();
    let mut offset = 0;
    for x in &contexts {
        let block = scenario.block_size(x);
        let mut row = vec![Rat::zero(); dim];
        for idx in offset..offset + block {
            row[idx] = Rat::one();
        }
        eqs.push((row, Rat::one()));
        offset += block;
    }

    for j in 0..scenario.parties() {
        let other_dims: Vec<usize> = (0..scenario.parties())
            .filter(|&i| i != j)
            .map(|i| scenario.inputs()[i])
            .collect();
        let others = mixed_radix(&other_dims);
        for xj in 0..scenario.inputs()[j] {
            let assemble = |rest: &[usize]| -> Vec<usize> {
                let mut x = Vec::with_capacity(scenario.parties());
                let mut it = rest.iter();
                for i in 0..scenario.parties() {
                    if i == j {
                        x.push(xj);
                    } else {
                        x.push(*it.next().unwrap());
                    }
                }
                x
            };
            let base_x = assemble(&others[0]);
            for aj in 0..scenario.outputs_at(j, xj) {
                let marginal_row = |x: &[usize], sign: i64, row: &mut Vec<Rat>| {
                    for a in scenario.outcomes_for(x) {
                        if a[j] == aj {
                            let idx = scenario.canonical_index(&a, x).expect("valid");
                            row[idx] = &row[idx] + Rat::from_integer(sign.into());
                        }
                    }
                };
                for rest in others.iter().skip(1) {
                    let x = assemble(rest);
                    let mut row = vec![Rat::zero(); dim];
                    marginal_row(&x, 1, &mut row);
                    marginal_row(&base_x, -1, &mut row);
                    eqs.push((row, Rat::zero()));
                }
            }
        }
    }
    HRep { dim, ineqs, eqs }
}

/// Equality rows satisfied by every vertex: the affine hull of the vertex
/// set, one canonical row per dimension the hull falls short of ambient.
pub fn affine_hull_equalities(vrep: &VRep) -> Vec<(Vec<Rat>, Rat)> {
    let Some(base) = vrep.vertices.first() else {
        return Vec::new();
    };
    let diffs: Vec<Vec<Rat>> = vrep.vertices[1..]
        .iter()
        .map(|v| v.iter().zip(base).map(|(a, b)| a - b).collect())
        .collect();
    let mut eqs: Vec<(Vec<Rat>, Rat)> = crate::linalg::nullspace(&diffs, vrep.dim)
        .into_iter()
        .map(|a| {
            let b = crate::linalg::dot(&a, base);
            canonical_eq(&a, &b)
        })
        .collect();
    eqs.sort();
    eqs
}

/// The nonsignaling conditions as *joint-space* equality rows under a fixed
/// everywhere-positive input distribution: each conditional-space equality
/// of [`ns_polytope_hrep`] is rewritten through p(a⃗|x⃗) = p(a⃗,x⃗)/q(x⃗)
/// (the per-context normalization rows thereby pin the input marginals to
/// q). Intersecting a joint-space polytope with these rows carves out its
/// nonsignaling part at the given observed inputs.
pub fn ns_joint_equalities(
    scenario: &Scenario,
    inputs: &InputDistribution,
) -> Result<Vec<(Vec<Rat>, Rat)>, PolytopeError> {
    if inputs.scenario != *scenario {
        return Err(PolytopeError::DimensionMismatch(
            "input distribution belongs to a different scenario".into(),
        ));
    }
    if inputs.values.iter().any(|q| !q.is_positive()) {
        return Err(PolytopeError::EmptyInput(
            "conditioning on inputs needs every context weight positive",
        ));
    }
    // Context rank of each joint slot, in canonical order.
    let mut slot_rank = Vec::with_capacity(scenario.joint_dim());
    for (rank, x) in scenario.contexts().into_iter().enumerate() {
        slot_rank.extend(std::iter::repeat(rank).take(scenario.block_size(&x)));
    }
    let eqs = ns_polytope_hrep(scenario)
        .eqs
        .into_iter()
        .map(|(a, b)| {
            let scaled: Vec<Rat> = a
                .iter()
                .zip(&slot_rank)
                .map(|(c, &rank)| c / &inputs.values[rank])
                .collect();
            canonical_eq(&scaled, &b)
        })
        .collect();
    Ok(eqs)
}
