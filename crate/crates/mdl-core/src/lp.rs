//! Exact rational linear programming with verifiable certificates.
//!
//! Everything here runs over `BigRational`: a two-phase primal simplex with
//! Bland's rule on a dense tableau. Optimal solutions come with dual
//! multipliers, infeasible systems with Farkas certificates, and unbounded
//! ones with an improving ray — so every answer can be checked independently
//! by plain arithmetic.

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::linalg::{affine_rank, dot};
use crate::polytope::{canonical_row, HRep, PolytopeError};
use crate::ratio::{serde_rat, serde_rat_vec, Rat};

#[derive(Debug, thiserror::Error)]
pub enum LpError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
}

/// `maximize/minimize objective·x` subject to `a·x ≤ b` rows and `e·x = f`
/// rows, over free variables.
#[derive(Debug, Clone)]
pub struct LpProblem {
    pub maximize: bool,
    pub objective: Vec<Rat>,
    /// Rows `a·x ≤ b`.
    pub ineqs: Vec<(Vec<Rat>, Rat)>,
    /// Rows `e·x = f`.
    pub eqs: Vec<(Vec<Rat>, Rat)>,
}

/// Certified solution. The multipliers satisfy
/// `objective = Σ λ_i a_i + Σ μ_j e_j` with `λ ≥ 0` when maximizing
/// (`λ ≤ 0` when minimizing), and `value = Σ λ_i b_i + Σ μ_j f_j`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LpSolution {
    #[serde(with = "serde_rat")]
    pub value: Rat,
    #[serde(with = "serde_rat_vec")]
    pub point: Vec<Rat>,
    #[serde(with = "serde_rat_vec")]
    pub ineq_multipliers: Vec<Rat>,
    #[serde(with = "serde_rat_vec")]
    pub eq_multipliers: Vec<Rat>,
}

/// Infeasibility witness: `λ ≥ 0`, `Σ λ_i a_i + Σ μ_j e_j = 0` while
/// `Σ λ_i b_i + Σ μ_j f_j < 0`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FarkasCertificate {
    #[serde(with = "serde_rat_vec")]
    pub ineq_multipliers: Vec<Rat>,
    #[serde(with = "serde_rat_vec")]
    pub eq_multipliers: Vec<Rat>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum LpOutcome {
    Optimal(LpSolution),
    Infeasible(FarkasCertificate),
    /// `point` is feasible and `point + t·ray` stays feasible for all `t ≥ 0`
    /// while the objective improves strictly along `ray`.
    Unbounded {
        #[serde(with = "serde_rat_vec")]
        point: Vec<Rat>,
        #[serde(with = "serde_rat_vec")]
        ray: Vec<Rat>,
    },
}

// ---------------------------------------------------------------------------
// Standard-form core: minimize c·x  s.t.  A x = b, x ≥ 0.
// ---------------------------------------------------------------------------

enum StdOutcome {
    /// `y` are equality multipliers with `yᵀA_j ≤ c_j` for every column and
    /// `value = yᵀb`.
    Optimal { value: Rat, x: Vec<Rat>, y: Vec<Rat> },
    /// Farkas: `yᵀA_j ≤ 0` for every column while `yᵀb > 0`.
    Infeasible { y: Vec<Rat> },
    Unbounded { x: Vec<Rat>, ray: Vec<Rat> },
}

struct Tableau {
    m: usize,
    /// Structural columns (artificials live at `n..n+m`, rhs at `n+m`).
    n: usize,
    rows: Vec<Vec<Rat>>,
    cost1: Vec<Rat>,
    cost2: Vec<Rat>,
    basis: Vec<usize>,
    dead: Vec<bool>,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let piv = self.rows[r][c].clone();
        debug_assert!(!piv.is_zero());
        for v in self.rows[r].iter_mut() {
            if !v.is_zero() {
                *v = &*v / &piv;
            }
        }
        let width = self.n + self.m + 1;
        for k in 0..self.m {
            if k == r {
                continue;
            }
            let factor = self.rows[k][c].clone();
            if factor.is_zero() {
                continue;
            }
            for j in 0..width {
                if !self.rows[r][j].is_zero() {
                    let delta = &self.rows[r][j] * &factor;
                    self.rows[k][j] = &self.rows[k][j] - delta;
                }
            }
        }
        for cost in [&mut self.cost1, &mut self.cost2] {
            let factor = cost[c].clone();
            if !factor.is_zero() {
                for j in 0..width {
                    if !self.rows[r][j].is_zero() {
                        let delta = &self.rows[r][j] * &factor;
                        cost[j] = &cost[j] - delta;
                    }
                }
            }
        }
        self.basis[r] = c;
    }

    /// Bland's rule over structural columns driven by the given cost row.
    /// Returns the entering column when no leaving row exists (unbounded).
    fn run_phase(&mut self, phase_one: bool) -> Option<usize> {
        loop {
            let cost = if phase_one { &self.cost1 } else { &self.cost2 };
            let Some(c) = (0..self.n).find(|&j| cost[j].is_negative()) else {
                return None;
            };
            let mut pick: Option<(usize, Rat)> = None;
            for i in 0..self.m {
                if self.dead[i] || !self.rows[i][c].is_positive() {
                    continue;
                }
                let ratio = &self.rows[i][self.n + self.m] / &self.rows[i][c];
                let better = match &pick {
                    None => true,
                    Some((pi, pr)) => ratio < *pr || (ratio == *pr && self.basis[i] < self.basis[*pi]),
                };
                if better {
                    pick = Some((i, ratio));
                }
            }
            match pick {
                Some((r, _)) => self.pivot(r, c),
                None => return Some(c),
            }
        }
    }
}

fn solve_standard(mut rows: Vec<Vec<Rat>>, mut rhs: Vec<Rat>, costs: Vec<Rat>) -> StdOutcome {
    let m = rows.len();
    let n = costs.len();
    let mut flipped = vec![false; m];
    for i in 0..m {
        if rhs[i].is_negative() {
            flipped[i] = true;
            rhs[i] = -rhs[i].clone();
            for v in rows[i].iter_mut() {
                *v = -v.clone();
            }
        }
    }

    let width = n + m + 1;
    let mut t = Vec::with_capacity(m);
    for i in 0..m {
        let mut row = Vec::with_capacity(width);
        row.extend(rows[i].iter().cloned());
        for k in 0..m {
            row.push(if k == i { Rat::from_integer(1.into()) } else { Rat::zero() });
        }
        row.push(rhs[i].clone());
        t.push(row);
    }
    let mut cost1 = vec![Rat::zero(); width];
    for j in 0..n {
        let mut s = Rat::zero();
        for row in t.iter() {
            s += &row[j];
        }
        cost1[j] = -s;
    }
    let mut b_sum = Rat::zero();
    for r in &rhs {
        b_sum += r;
    }
    cost1[width - 1] = -b_sum;
    let mut cost2 = vec![Rat::zero(); width];
    cost2[..n].clone_from_slice(&costs);

    let mut tab = Tableau {
        m,
        n,
        rows: t,
        cost1,
        cost2,
        basis: (n..n + m).collect(),
        dead: vec![false; m],
    };

    let unb = tab.run_phase(true);
    debug_assert!(unb.is_none(), "phase one is bounded below by zero");
    let obj1 = -tab.cost1[width - 1].clone();
    debug_assert!(!obj1.is_negative());
    if obj1.is_positive() {
        // Farkas from the phase-one duals: artificial i has cost 1 there.
        let mut y: Vec<Rat> = (0..m)
            .map(|i| Rat::from_integer(1.into()) - &tab.cost1[n + i])
            .collect();
        for (yi, f) in y.iter_mut().zip(&flipped) {
            if *f {
                *yi = -yi.clone();
            }
        }
        return StdOutcome::Infeasible { y };
    }

    // Drive leftover artificials out of the basis; rows that cannot release
    // one are linearly dependent and sit out of phase two.
    for i in 0..m {
        if tab.basis[i] < n {
            continue;
        }
        debug_assert!(tab.rows[i][width - 1].is_zero());
        match (0..n).find(|&j| !tab.rows[i][j].is_zero()) {
            Some(j) => tab.pivot(i, j),
            None => tab.dead[i] = true,
        }
    }

    match tab.run_phase(false) {
        Some(c) => {
            let mut x = vec![Rat::zero(); n];
            let mut ray = vec![Rat::zero(); n];
            for i in 0..m {
                if tab.dead[i] {
                    continue;
                }
                x[tab.basis[i]] = tab.rows[i][width - 1].clone();
                ray[tab.basis[i]] = -tab.rows[i][c].clone();
            }
            ray[c] = Rat::from_integer(1.into());
            StdOutcome::Unbounded { x, ray }
        }
        None => {
            let mut x = vec![Rat::zero(); n];
            for i in 0..m {
                if !tab.dead[i] && tab.basis[i] < n {
                    x[tab.basis[i]] = tab.rows[i][width - 1].clone();
                }
            }
            let mut y: Vec<Rat> = (0..m).map(|i| -tab.cost2[n + i].clone()).collect();
            for (yi, f) in y.iter_mut().zip(&flipped) {
                if *f {
                    *yi = -yi.clone();
                }
            }
            let value = -tab.cost2[width - 1].clone();
            StdOutcome::Optimal { value, x, y }
        }
    }
}

// ---------------------------------------------------------------------------
// General solver
// ---------------------------------------------------------------------------

pub fn solve_lp(p: &LpProblem) -> Result<LpOutcome, LpError> {
    let nv = p.objective.len();
    for (a, _) in p.ineqs.iter().chain(&p.eqs) {
        if a.len() != nv {
            return Err(LpError::DimensionMismatch(format!(
                "constraint has {} coefficients, objective has {}",
                a.len(),
                nv
            )));
        }
    }
    let n_in = p.ineqs.len();
    let m = n_in + p.eqs.len();
    // Free variables split as x = u − v; one slack per inequality.
    let n = 2 * nv + n_in;
    let mut rows = Vec::with_capacity(m);
    let mut rhs = Vec::with_capacity(m);
    for (ri, (a, b)) in p.ineqs.iter().chain(&p.eqs).enumerate() {
        let mut row = Vec::with_capacity(n);
        row.extend(a.iter().cloned());
        row.extend(a.iter().map(|v| -v.clone()));
        for s in 0..n_in {
            row.push(if s == ri { Rat::from_integer(1.into()) } else { Rat::zero() });
        }
        rows.push(row);
        rhs.push(b.clone());
    }
    let mut costs = Vec::with_capacity(n);
    let flip_obj = p.maximize;
    for c in &p.objective {
        costs.push(if flip_obj { -c.clone() } else { c.clone() });
    }
    for c in &p.objective {
        costs.push(if flip_obj { c.clone() } else { -c.clone() });
    }
    costs.resize(n, Rat::zero());

    let fold = |x: &[Rat]| -> Vec<Rat> {
        (0..nv).map(|k| &x[k] - &x[nv + k]).collect()
    };
    Ok(match solve_standard(rows, rhs, costs) {
        StdOutcome::Optimal { value, x, y } => {
            let sign = if p.maximize { -1 } else { 1 };
            let mults: Vec<Rat> = y.iter().map(|v| v * Rat::from_integer(sign.into())).collect();
            LpOutcome::Optimal(LpSolution {
                value: if p.maximize { -value } else { value },
                point: fold(&x),
                ineq_multipliers: mults[..n_in].to_vec(),
                eq_multipliers: mults[n_in..].to_vec(),
            })
        }
        StdOutcome::Infeasible { y } => {
            let neg: Vec<Rat> = y.iter().map(|v| -v.clone()).collect();
            LpOutcome::Infeasible(FarkasCertificate {
                ineq_multipliers: neg[..n_in].to_vec(),
                eq_multipliers: neg[n_in..].to_vec(),
            })
        }
        StdOutcome::Unbounded { x, ray } => LpOutcome::Unbounded {
            point: fold(&x),
            ray: fold(&ray),
        },
    })
}

// ---------------------------------------------------------------------------
// Convex-hull membership
// ---------------------------------------------------------------------------

/// Either a convex combination of the generators hitting the point exactly,
/// or a hyperplane with every generator on one side and the point strictly on
/// the other.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum MembershipCertificate {
    Inside {
        #[serde(with = "serde_rat_vec")]
        weights: Vec<Rat>,
    },
    Outside {
        #[serde(with = "serde_rat_vec")]
        separator: Vec<Rat>,
        #[serde(with = "serde_rat")]
        bound: Rat,
    },
}

impl MembershipCertificate {
    pub fn is_inside(&self) -> bool {
        matches!(self, MembershipCertificate::Inside { .. })
    }
}

/// Decide whether `point` lies in the convex hull of `vertices`.
pub fn membership(point: &[Rat], vertices: &[Vec<Rat>]) -> Result<MembershipCertificate, LpError> {
    let d = point.len();
    for v in vertices {
        if v.len() != d {
            return Err(LpError::DimensionMismatch(format!(
                "vertex has {} coordinates, point has {}",
                v.len(),
                d
            )));
        }
    }
    if vertices.is_empty() {
        return Ok(MembershipCertificate::Outside {
            separator: vec![Rat::zero(); d],
            bound: -Rat::from_integer(1.into()),
        });
    }
    // Feasibility of  Σ w_j v_j = point, Σ w_j = 1, w ≥ 0.
    let nw = vertices.len();
    let mut rows = Vec::with_capacity(d + 1);
    let mut rhs = Vec::with_capacity(d + 1);
    for k in 0..d {
        rows.push(vertices.iter().map(|v| v[k].clone()).collect::<Vec<_>>());
        rhs.push(point[k].clone());
    }
    rows.push(vec![Rat::from_integer(1.into()); nw]);
    rhs.push(Rat::from_integer(1.into()));
    match solve_standard(rows, rhs, vec![Rat::zero(); nw]) {
        StdOutcome::Optimal { x, .. } => Ok(MembershipCertificate::Inside { weights: x }),
        StdOutcome::Infeasible { y } => Ok(MembershipCertificate::Outside {
            separator: y[..d].to_vec(),
            bound: -y[d].clone(),
        }),
        StdOutcome::Unbounded { .. } => unreachable!("zero objective cannot be unbounded"),
    }
}

// ---------------------------------------------------------------------------
// Inequality checking against a vertex list
// ---------------------------------------------------------------------------

/// Outcome of testing `a·x ≤ b` against every vertex of a polytope.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FacetReport {
    /// Whether the reported orientation holds on every vertex.
    pub valid: bool,
    /// Largest value of `a·v − b` over the vertices, in the reported
    /// orientation (non-positive exactly when valid).
    #[serde(with = "serde_rat")]
    pub max_violation: Rat,
    /// How many vertices satisfy the inequality with equality.
    pub saturating_count: usize,
    /// Affine dimension of the saturating vertex set (−1 if empty).
    pub saturating_rank: i64,
    /// Valid, and the saturating set has affine dimension `dim − 1`.
    pub is_facet: bool,
    /// True when validity required flipping the stated inequality to
    /// `−a·x ≤ −b`.
    pub orientation_flipped: bool,
}

fn orientation_stats(a: &[Rat], b: &Rat, vertices: &[Vec<Rat>]) -> (Rat, Vec<usize>) {
    let mut max_v: Option<Rat> = None;
    let mut sat = Vec::new();
    for (i, v) in vertices.iter().enumerate() {
        let slack = dot(a, v) - b;
        if slack.is_zero() {
            sat.push(i);
        }
        if max_v.as_ref().is_none_or(|m| slack > *m) {
            max_v = Some(slack);
        }
    }
    (max_v.expect("nonempty vertex list"), sat)
}

/// Test `a·x ≤ b` on a vertex list; `dim` is the affine dimension of the
/// polytope the vertices span. If the stated orientation fails, the flipped
/// one is tried before reporting failure.
pub fn check_inequality(a: &[Rat], b: &Rat, vertices: &[Vec<Rat>], dim: usize) -> FacetReport {
    assert!(!vertices.is_empty(), "check_inequality needs at least one vertex");
    let (max_stated, sat_stated) = orientation_stats(a, b, vertices);
    let (flipped, max_violation, sat) = if !max_stated.is_positive() {
        (false, max_stated, sat_stated)
    } else {
        let na: Vec<Rat> = a.iter().map(|v| -v.clone()).collect();
        let nb = -b.clone();
        let (max_f, sat_f) = orientation_stats(&na, &nb, vertices);
        if !max_f.is_positive() {
            (true, max_f, sat_f)
        } else {
            (false, max_stated, sat_stated)
        }
    };
    let valid = !max_violation.is_positive();
    let saturating_rank = if sat.is_empty() {
        -1
    } else {
        let pts: Vec<Vec<Rat>> = sat.iter().map(|&i| vertices[i].clone()).collect();
        affine_rank(&pts) as i64
    };
    let is_facet = valid && dim >= 1 && saturating_rank == dim as i64 - 1;
    FacetReport {
        valid,
        max_violation,
        saturating_count: sat.len(),
        saturating_rank,
        is_facet,
        orientation_flipped: flipped,
    }
}

// ---------------------------------------------------------------------------
// Redundancy filtering and equality substitution
// ---------------------------------------------------------------------------

/// Is `a·x ≤ b` implied by the rows of `gens` together with the equalities?
/// Decided through the existence of a nonnegative combination
/// `a = Σ λ_j a_j + Σ μ_k e_k` with `Σ λ_j b_j + Σ μ_k f_k ≤ b` — sound and
/// complete whenever the generator system is feasible.
fn implied_by(
    a: &[Rat],
    b: &Rat,
    gens: &[(Vec<Rat>, Rat)],
    eqs: &[(Vec<Rat>, Rat)],
) -> bool {
    let d = a.len();
    // Columns: λ_j ≥ 0 per generator, split μ_k per equality, one slack for
    // the bound row.
    let ncols = gens.len() + 2 * eqs.len() + 1;
    let mut rows = Vec::with_capacity(d + 1);
    let mut rhs = Vec::with_capacity(d + 1);
    for k in 0..d {
        let mut row = Vec::with_capacity(ncols);
        for (g, _) in gens {
            row.push(g[k].clone());
        }
        for (e, _) in eqs {
            row.push(e[k].clone());
            row.push(-e[k].clone());
        }
        row.push(Rat::zero());
        rows.push(row);
        rhs.push(a[k].clone());
    }
    let mut brow = Vec::with_capacity(ncols);
    for (_, gb) in gens {
        brow.push(gb.clone());
    }
    for (_, f) in eqs {
        brow.push(f.clone());
        brow.push(-f.clone());
    }
    brow.push(Rat::from_integer(1.into()));
    rows.push(brow);
    rhs.push(b.clone());
    matches!(
        solve_standard(rows, rhs, vec![Rat::zero(); ncols]),
        StdOutcome::Optimal { .. }
    )
}

/// Remove redundant inequalities from a feasible system, keeping an
/// equivalent irredundant subset. Rows are first scaled to primitive integer
/// form (positive scaling only) and exact duplicates dropped.
pub fn redundancy_filter(hrep: &HRep) -> HRep {
    let mut canon: Vec<(Vec<Rat>, Rat)> = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for (a, b) in &hrep.ineqs {
        let (ca, cb) = canonical_row(a, b);
        if ca.iter().all(|v| v.is_zero()) && !cb.is_negative() {
            continue; // 0 ≤ b, trivially true
        }
        let key = format!("{ca:?}|{cb:?}");
        if seen.insert(key) {
            canon.push((ca, cb));
        }
    }
    let mut kept = vec![true; canon.len()];
    for i in 0..canon.len() {
        let others: Vec<(Vec<Rat>, Rat)> = canon
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i && kept[*j])
            .map(|(_, r)| r.clone())
            .collect();
        if implied_by(&canon[i].0, &canon[i].1, &others, &hrep.eqs) {
            kept[i] = false;
        }
    }
    let ineqs = canon
        .into_iter()
        .zip(&kept)
        .filter(|(_, k)| **k)
        .map(|(r, _)| r)
        .collect();
    HRep {
        dim: hrep.dim,
        ineqs,
        eqs: hrep.eqs.clone(),
    }
}

/// An H-representation re-expressed on the coordinates that survive
/// equality elimination, with the map back to the original space.
#[derive(Debug, Clone)]
pub struct ReducedPolytope {
    pub hrep: HRep,
    pub elimination: crate::linalg::AffineElimination,
}

/// Substitute the equalities (the H-rep's own plus `extra`) out of the
/// system, rewrite every inequality on the reduced coordinates, and filter
/// redundant rows. The input system must be feasible for the filtering step
/// to be meaningful.
pub fn intersect_with_equalities(
    hrep: &HRep,
    extra: &[(Vec<Rat>, Rat)],
) -> Result<ReducedPolytope, PolytopeError> {
    let mut eqs = hrep.eqs.clone();
    eqs.extend(extra.iter().cloned());
    let elim = crate::linalg::AffineElimination::new(&eqs, hrep.dim)
        .map_err(|_| PolytopeError::InconsistentEqualities)?;
    let mut ineqs = Vec::new();
    for (a, b) in &hrep.ineqs {
        let (ra, rb) = elim.reduce_linear(a, b);
        if ra.iter().all(|v| v.is_zero()) && !rb.is_negative() {
            continue;
        }
        ineqs.push((ra, rb));
    }
    let reduced = HRep {
        dim: elim.reduced_dim(),
        ineqs,
        eqs: Vec::new(),
    };
    Ok(ReducedPolytope {
        hrep: redundancy_filter(&reduced),
        elimination: elim,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio::{rat, rint};

    fn square_vertices() -> Vec<Vec<Rat>> {
        vec![
            vec![rint(0), rint(0)],
            vec![rint(1), rint(0)],
            vec![rint(0), rint(1)],
            vec![rint(1), rint(1)],
        ]
    }

    fn square_hrep() -> HRep {
        HRep {
            dim: 2,
            ineqs: vec![
                (vec![rint(-1), rint(0)], rint(0)),
                (vec![rint(0), rint(-1)], rint(0)),
                (vec![rint(1), rint(0)], rint(1)),
                (vec![rint(0), rint(1)], rint(1)),
            ],
            eqs: vec![],
        }
    }

    #[test]
    fn maximize_on_square() {
        let p = LpProblem {
            maximize: true,
            objective: vec![rint(1), rint(1)],
            ineqs: square_hrep().ineqs,
            eqs: vec![],
        };
        match solve_lp(&p).unwrap() {
            LpOutcome::Optimal(sol) => {
                assert_eq!(sol.value, rint(2));
                assert_eq!(sol.point, vec![rint(1), rint(1)]);
                // Certificate identity: c = Σ λ a, value = Σ λ b, λ ≥ 0.
                let mut lhs = vec![Rat::zero(); 2];
                let mut val = Rat::zero();
                for (lam, (a, b)) in sol.ineq_multipliers.iter().zip(square_hrep().ineqs) {
                    assert!(!lam.is_negative());
                    for k in 0..2 {
                        lhs[k] = &lhs[k] + &(lam * &a[k]);
                    }
                    val += lam * &b;
                }
                assert_eq!(lhs, vec![rint(1), rint(1)]);
                assert_eq!(val, sol.value);
            }
            other => panic!("expected optimal, got {other:?}"),
        }
    }

    #[test]
    fn minimize_with_equality() {
        // min x + 2y  s.t.  x + y = 1, x ≥ 0, y ≥ 0  →  1 at (1, 0).
        let p = LpProblem {
            maximize: false,
            objective: vec![rint(1), rint(2)],
            ineqs: vec![
                (vec![rint(-1), rint(0)], rint(0)),
                (vec![rint(0), rint(-1)], rint(0)),
            ],
            eqs: vec![(vec![rint(1), rint(1)], rint(1))],
        };
        match solve_lp(&p).unwrap() {
            LpOutcome::Optimal(sol) => {
                assert_eq!(sol.value, rint(1));
                assert_eq!(sol.point, vec![rint(1), rint(0)]);
                let mut lhs = vec![Rat::zero(); 2];
                let mut val = Rat::zero();
                for (lam, (a, b)) in sol
                    .ineq_multipliers
                    .iter()
                    .zip(p.ineqs.iter())
                    .chain(sol.eq_multipliers.iter().zip(p.eqs.iter()))
                {
                    for k in 0..2 {
                        lhs[k] = &lhs[k] + &(lam * &a[k]);
                    }
                    val += lam * b;
                }
                assert_eq!(lhs, p.objective);
                assert_eq!(val, sol.value);
                for lam in &sol.ineq_multipliers {
                    assert!(!lam.is_positive(), "minimize convention: λ ≤ 0");
                }
            }
            other => panic!("expected optimal, got {other:?}"),
        }
    }

    #[test]
    fn infeasible_farkas() {
        // x ≤ −1 and −x ≤ 0 clash.
        let ineqs = vec![
            (vec![rint(1)], rint(-1)),
            (vec![rint(-1)], rint(0)),
        ];
        let p = LpProblem {
            maximize: false,
            objective: vec![rint(0)],
            ineqs: ineqs.clone(),
            eqs: vec![],
        };
        match solve_lp(&p).unwrap() {
            LpOutcome::Infeasible(f) => {
                let mut comb = Rat::zero();
                let mut bound = Rat::zero();
                for (lam, (a, b)) in f.ineq_multipliers.iter().zip(&ineqs) {
                    assert!(!lam.is_negative());
                    comb += lam * &a[0];
                    bound += lam * b;
                }
                assert!(comb.is_zero());
                assert!(bound.is_negative());
            }
            other => panic!("expected infeasible, got {other:?}"),
        }
    }

    #[test]
    fn unbounded_ray() {
        // max x  s.t.  −x ≤ 0.
        let p = LpProblem {
            maximize: true,
            objective: vec![rint(1)],
            ineqs: vec![(vec![rint(-1)], rint(0))],
            eqs: vec![],
        };
        match solve_lp(&p).unwrap() {
            LpOutcome::Unbounded { point, ray } => {
                assert!(!point[0].is_negative());
                assert!(ray[0].is_positive());
            }
            other => panic!("expected unbounded, got {other:?}"),
        }
    }

    #[test]
    fn membership_certificates_check_out() {
        let verts = square_vertices();
        let inside = membership(&[rat(1, 3), rat(2, 3)], &verts).unwrap();
        match &inside {
            MembershipCertificate::Inside { weights } => {
                let mut sum = Rat::zero();
                let mut pt = vec![Rat::zero(); 2];
                for (w, v) in weights.iter().zip(&verts) {
                    assert!(!w.is_negative());
                    sum += w;
                    for k in 0..2 {
                        pt[k] = &pt[k] + &(w * &v[k]);
                    }
                }
                assert_eq!(sum, rint(1));
                assert_eq!(pt, vec![rat(1, 3), rat(2, 3)]);
            }
            other => panic!("expected inside, got {other:?}"),
        }
        let point = vec![rint(2), rat(1, 2)];
        match membership(&point, &verts).unwrap() {
            MembershipCertificate::Outside { separator, bound } => {
                for v in &verts {
                    assert!(dot(&separator, v) <= bound);
                }
                assert!(dot(&separator, &point) > bound);
            }
            other => panic!("expected outside, got {other:?}"),
        }
    }

    #[test]
    fn facet_reports_on_square() {
        let verts = square_vertices();
        let r = check_inequality(&[rint(1), rint(0)], &rint(1), &verts, 2);
        assert!(r.valid && r.is_facet && !r.orientation_flipped);
        assert_eq!(r.saturating_count, 2);
        assert_eq!(r.saturating_rank, 1);
        assert_eq!(r.max_violation, rint(0));

        let loose = check_inequality(&[rint(1), rint(0)], &rint(2), &verts, 2);
        assert!(loose.valid && !loose.is_facet);
        assert_eq!(loose.max_violation, rint(-1));
        assert_eq!(loose.saturating_count, 0);
        assert_eq!(loose.saturating_rank, -1);

        // Stated as x ≥ 1 (i.e. −x ≤ −1): invalid, but the flip is the x ≤ 1 facet.
        let flipped = check_inequality(&[rint(-1), rint(0)], &rint(-1), &verts, 2);
        assert!(flipped.valid && flipped.orientation_flipped && flipped.is_facet);

        let bad = check_inequality(&[rint(1), rint(1)], &rat(1, 2), &verts, 2);
        assert!(!bad.valid);
        assert_eq!(bad.max_violation, rat(3, 2));
    }

    #[test]
    fn redundancy_filter_trims_square() {
        let mut h = square_hrep();
        h.ineqs.push((vec![rint(1), rint(1)], rint(3))); // slack
        h.ineqs.push((vec![rint(2), rint(0)], rint(2))); // duplicate of x ≤ 1 after scaling
        h.ineqs.push((vec![rint(0), rint(0)], rint(5))); // trivial
        let filtered = redundancy_filter(&h);
        assert_eq!(filtered.ineqs.len(), 4);
        for (a, b) in &filtered.ineqs {
            let rep = check_inequality(a, b, &square_vertices(), 2);
            assert!(rep.valid && rep.is_facet);
        }
    }

    #[test]
    fn intersect_squashes_to_segment() {
        // Unit square ∩ {x = y} is a segment; reduced system has two rows.
        let h = square_hrep();
        let red = intersect_with_equalities(&h, &[(vec![rint(1), rint(-1)], rint(0))]).unwrap();
        assert_eq!(red.hrep.dim, 1);
        assert_eq!(red.hrep.ineqs.len(), 2);
        let p = red.elimination.lift_point(&[rat(1, 3)]);
        assert_eq!(p, vec![rat(1, 3), rat(1, 3)]);
    }
}
