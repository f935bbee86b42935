//! Exact dense linear algebra over rationals: row reduction, rank, linear
//! solves, nullspaces, and affine elimination of equality systems.
//!
//! Matrices are plain `Vec<Vec<Rat>>` row-major; sizes here are small (tens of
//! rows/columns), so fraction-free tricks are not worth their complexity.

use crate::ratio::Rat;
use num_traits::{One, Zero};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LinalgError {
    #[error("inconsistent equality system (0 = nonzero after elimination)")]
    Inconsistent,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
}

pub fn dot(a: &[Rat], b: &[Rat]) -> Rat {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = Rat::zero();
    for (x, y) in a.iter().zip(b) {
        if !x.is_zero() && !y.is_zero() {
            acc += x * y;
        }
    }
    acc
}

/// In-place reduced row echelon form. Returns the pivot column of each pivot
/// row, in row order.
pub fn rref(mat: &mut Vec<Vec<Rat>>) -> Vec<usize> {
    let rows = mat.len();
    let cols = if rows == 0 { 0 } else { mat[0].len() };
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !mat[i][c].is_zero()) else {
            continue;
        };
        mat.swap(r, p);
        let inv = mat[r][c].recip();
        for j in c..cols {
            let v = std::mem::take(&mut mat[r][j]);
            mat[r][j] = v * &inv;
        }
        for i in 0..rows {
            if i != r && !mat[i][c].is_zero() {
                let f = mat[i][c].clone();
                for j in c..cols {
                    let sub = &f * &mat[r][j];
                    mat[i][j] -= sub;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    pivots
}

pub fn rank(rows: &[Vec<Rat>]) -> usize {
    let mut m = rows.to_vec();
    rref(&mut m).len()
}

/// Rank of the affine span of a point set (dimension of the affine hull).
pub fn affine_rank(points: &[Vec<Rat>]) -> usize {
    if points.len() <= 1 {
        return 0;
    }
    let base = &points[0];
    let diffs: Vec<Vec<Rat>> = points[1..]
        .iter()
        .map(|p| p.iter().zip(base).map(|(a, b)| a - b).collect())
        .collect();
    rank(&diffs)
}

/// Basis of the nullspace of `a` (columns = `dim`).
pub fn nullspace(a: &[Vec<Rat>], dim: usize) -> Vec<Vec<Rat>> {
    let mut m = a.to_vec();
    let pivots = rref(&mut m);
    let pivot_set: std::collections::HashSet<usize> = pivots.iter().copied().collect();
    let free: Vec<usize> = (0..dim).filter(|c| !pivot_set.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Rat::zero(); dim];
            v[f] = Rat::one();
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = -m[row][f].clone();
            }
            v
        })
        .collect()
}

/// Affine change of coordinates produced by eliminating an equality system
/// `E x = f`. Pivot coordinates become affine functions of the kept (free)
/// coordinates:
///
/// ```text
/// x[pivot_i] = shift_i + sum_j coeffs_i[j] * x[kept_j]
/// ```
#[derive(Debug, Clone)]
pub struct AffineElimination {
    pub dim: usize,
    pub kept: Vec<usize>,
    pub pivot_cols: Vec<usize>,
    /// Row i: coefficients of the kept coordinates in the expression for
    /// `x[pivot_cols[i]]`.
    pub coeffs: Vec<Vec<Rat>>,
    pub shifts: Vec<Rat>,
}

impl AffineElimination {
    /// Gaussian-eliminate `eqs` (pairs `(a, b)` meaning `a·x = b`).
    pub fn new(eqs: &[(Vec<Rat>, Rat)], dim: usize) -> Result<Self, LinalgError> {
        for (a, _) in eqs {
            if a.len() != dim {
                return Err(LinalgError::DimensionMismatch {
                    expected: dim,
                    got: a.len(),
                });
            }
        }
        let mut m: Vec<Vec<Rat>> = eqs
            .iter()
            .map(|(a, b)| {
                let mut row = a.clone();
                row.push(b.clone());
                row
            })
            .collect();
        let pivots = rref(&mut m);
        // A pivot in the constant column means 0 = 1.
        if pivots.last() == Some(&dim) {
            return Err(LinalgError::Inconsistent);
        }
        let pivot_set: std::collections::HashSet<usize> = pivots.iter().copied().collect();
        let kept: Vec<usize> = (0..dim).filter(|c| !pivot_set.contains(c)).collect();
        let coeffs = pivots
            .iter()
            .enumerate()
            .map(|(row, _)| kept.iter().map(|&k| -m[row][k].clone()).collect())
            .collect();
        let shifts = pivots
            .iter()
            .enumerate()
            .map(|(row, _)| m[row][dim].clone())
            .collect();
        Ok(Self {
            dim,
            kept,
            pivot_cols: pivots,
            coeffs,
            shifts,
        })
    }

    pub fn reduced_dim(&self) -> usize {
        self.kept.len()
    }

    /// Project a full-space point onto the kept coordinates.
    pub fn reduce_point(&self, full: &[Rat]) -> Vec<Rat> {
        self.kept.iter().map(|&k| full[k].clone()).collect()
    }

    /// Reconstruct a full-space point from kept coordinates (the unique point
    /// on the equality subspace with those kept values).
    pub fn lift_point(&self, reduced: &[Rat]) -> Vec<Rat> {
        let mut full = vec![Rat::zero(); self.dim];
        for (slot, &k) in self.kept.iter().enumerate() {
            full[k] = reduced[slot].clone();
        }
        for (i, &pc) in self.pivot_cols.iter().enumerate() {
            full[pc] = &self.shifts[i] + dot(&self.coeffs[i], reduced);
        }
        full
    }

    /// Rewrite `a·x ≤ b` (or `= b`) in kept coordinates.
    pub fn reduce_linear(&self, a: &[Rat], b: &Rat) -> (Vec<Rat>, Rat) {
        let mut coef = vec![Rat::zero(); self.kept.len()];
        let mut bound = b.clone();
        for (slot, &k) in self.kept.iter().enumerate() {
            coef[slot] = a[k].clone();
        }
        for (i, &pc) in self.pivot_cols.iter().enumerate() {
            if a[pc].is_zero() {
                continue;
            }
            bound -= &a[pc] * &self.shifts[i];
            for (slot, c) in self.coeffs[i].iter().enumerate() {
                if !c.is_zero() {
                    coef[slot] += &a[pc] * c;
                }
            }
        }
        (coef, bound)
    }

    /// Lift a reduced-space linear form back to the full space, putting zero
    /// weight on every eliminated coordinate.
    pub fn lift_linear(&self, a_reduced: &[Rat], b_reduced: &Rat) -> (Vec<Rat>, Rat) {
        let mut a = vec![Rat::zero(); self.dim];
        for (slot, &k) in self.kept.iter().enumerate() {
            a[k] = a_reduced[slot].clone();
        }
        (a, b_reduced.clone())
    }
}
