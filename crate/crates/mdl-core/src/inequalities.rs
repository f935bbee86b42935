//! Linear inequalities on behaviors: representation, exact evaluation, the
//! transformation of locality inequalities into measurement-dependent ones,
//! relabeling symmetries with orbit closure, and a catalog of named
//! inequalities constructed programmatically.

use crate::linalg::dot;
use crate::polytope::{canonical_row, VRep};
use crate::ratio::{serde_rat, serde_rat_vec, Rat};
use crate::scenario::{Behavior, BehaviorKind, MdlParams, Scenario, ScenarioError};
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum InequalityError {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error("expected a {expected} inequality, got {got}")]
    SpaceMismatch { expected: &'static str, got: &'static str },
    #[error("coefficient vector must not be all zero")]
    AllZero,
    #[error("coefficient vector has length {got}, scenario needs {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("inequality and behavior live in different scenarios")]
    ScenarioMismatch,
    #[error("unknown catalog entry `{0}`")]
    UnknownCatalog(String),
    #[error("bad parameter: {0}")]
    BadParameter(String),
    #[error("symmetry operation does not fit the scenario: {0}")]
    BadSymmetry(String),
}

/// A linear inequality `Σ β·p ≤ bound` over joint probabilities
/// `p(a⃗,x⃗)` or conditional ones `p(a⃗|x⃗)`, in canonical index order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Inequality {
    pub scenario: Scenario,
    pub space: BehaviorKind,
    #[serde(with = "serde_rat_vec")]
    pub beta: Vec<Rat>,
    #[serde(with = "serde_rat")]
    pub bound: Rat,
}

impl Inequality {
    pub fn new(
        scenario: Scenario,
        space: BehaviorKind,
        beta: Vec<Rat>,
        bound: Rat,
    ) -> Result<Self, InequalityError> {
        let expected = scenario.joint_dim();
        if beta.len() != expected {
            return Err(InequalityError::LengthMismatch { expected, got: beta.len() });
        }
        if beta.iter().all(Rat::is_zero) {
            return Err(InequalityError::AllZero);
        }
        Ok(Self { scenario, space, beta, bound })
    }

    /// Coefficient at the pair (a⃗, x⃗).
    pub fn coefficient(&self, a: &[usize], x: &[usize]) -> Result<&Rat, InequalityError> {
        Ok(&self.beta[self.scenario.canonical_index(a, x)?])
    }
}

/// Exact value `Σ β·p` of the inequality on a behavior of matching space.
/// The value exceeds `bound` exactly when the behavior violates it.
pub fn evaluate(ineq: &Inequality, behavior: &Behavior) -> Result<Rat, InequalityError> {
    if behavior.scenario != ineq.scenario {
        return Err(InequalityError::ScenarioMismatch);
    }
    if behavior.kind != ineq.space {
        return Err(InequalityError::SpaceMismatch {
            expected: ineq.space.name(),
            got: behavior.kind.name(),
        });
    }
    Ok(dot(&ineq.beta, &behavior.values))
}

/// Evaluate a conditional-space inequality on a joint behavior by dividing
/// out the behavior's own input marginals (which must all be positive).
pub fn evaluate_conditional_on_joint(
    ineq: &Inequality,
    joint: &Behavior,
) -> Result<Rat, InequalityError> {
    if ineq.space != BehaviorKind::Conditional {
        return Err(InequalityError::SpaceMismatch {
            expected: "conditional",
            got: ineq.space.name(),
        });
    }
    let (cond, _inputs) = joint.to_conditional()?;
    evaluate(ineq, &cond)
}

/// Result of the locality-to-measurement-dependence transformation.
#[derive(Debug, Clone)]
pub struct MdlTransform {
    pub inequality: Inequality,
    /// With `l = 0` the positive part of the left side is wiped out and the
    /// transformed inequality holds trivially.
    pub trivial: bool,
}

/// Turn a conditional-space locality inequality `Σ β·p(a⃗|x⃗) ≤ B` into a
/// joint-space inequality valid on every MDL(ℓ,h) behavior: coefficients
/// with `β ≥ 0` are scaled by `ℓ`, those with `β < 0` by `h`, and the bound
/// becomes `ℓ·h·B`.
pub fn bell_to_mdl(bell: &Inequality, params: &MdlParams) -> Result<MdlTransform, InequalityError> {
    if bell.space != BehaviorKind::Conditional {
        return Err(InequalityError::SpaceMismatch {
            expected: "conditional",
            got: bell.space.name(),
        });
    }
    let beta: Vec<Rat> = bell
        .beta
        .iter()
        .map(|c| if c.is_negative() { &params.h * c } else { &params.l * c })
        .collect();
    let bound = &params.l * &params.h * &bell.bound;
    let inequality = Inequality {
        scenario: bell.scenario.clone(),
        space: BehaviorKind::Joint,
        beta,
        bound,
    };
    Ok(MdlTransform { trivial: params.l.is_zero(), inequality })
}

/// Exact maximum of the inequality over a vertex list. Joint-space
/// inequalities are evaluated directly; conditional-space ones are evaluated
/// on each vertex's conditional form, using the vertex's own input marginals
/// (every marginal must be positive).
pub fn mdl_bound(ineq: &Inequality, vertices: &VRep) -> Result<Rat, InequalityError> {
    let mut best: Option<Rat> = None;
    for v in &vertices.vertices {
        let value = match ineq.space {
            BehaviorKind::Joint => dot(&ineq.beta, v),
            BehaviorKind::Conditional => {
                let joint = Behavior::new(
                    ineq.scenario.clone(),
                    BehaviorKind::Joint,
                    v.clone(),
                )?;
                let (cond, _) = joint.to_conditional()?;
                dot(&ineq.beta, &cond.values)
            }
        };
        if best.as_ref().is_none_or(|b| value > *b) {
            best = Some(value);
        }
    }
    best.ok_or_else(|| InequalityError::BadParameter("empty vertex list".into()))
}

/// Exact maximum of a conditional-space inequality over the deterministic
/// local strategies of the scenario.
pub fn local_bound_check(ineq: &Inequality) -> Result<Rat, InequalityError> {
    if ineq.space != BehaviorKind::Conditional {
        return Err(InequalityError::SpaceMismatch {
            expected: "conditional",
            got: ineq.space.name(),
        });
    }
    let verts = crate::polytope::local_vertices(&ineq.scenario);
    let max = verts
        .vertices
        .iter()
        .map(|v| dot(&ineq.beta, v))
        .max()
        .expect("at least one deterministic strategy");
    Ok(max)
}

// ---------------------------------------------------------------------------
// Relabeling symmetries
// ---------------------------------------------------------------------------

/// A relabeling of parties, inputs, and outcomes. Input and outcome flips
/// require the flipped slot to be binary; the party permutation requires the
/// permuted parties to have identical input/outcome structure.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymmetryOp {
    /// New party `i` takes the wiring of old party `party_perm[i]`.
    pub party_perm: Vec<usize>,
    /// Per party: whether its (binary) input labels are exchanged.
    pub input_flips: Vec<bool>,
    /// Per party, per (post-flip) input: whether the (binary) outcome labels
    /// are exchanged. A uniform row is a global outcome flip for that party.
    pub output_flips: Vec<Vec<bool>>,
}

impl SymmetryOp {
    pub fn identity(scenario: &Scenario) -> Self {
        let n = scenario.parties();
        SymmetryOp {
            party_perm: (0..n).collect(),
            input_flips: vec![false; n],
            output_flips: (0..n).map(|i| vec![false; scenario.inputs()[i]]).collect(),
        }
    }

    fn validate(&self, scenario: &Scenario) -> Result<(), InequalityError> {
        let n = scenario.parties();
        let mut seen = vec![false; n];
        if self.party_perm.len() != n || self.input_flips.len() != n || self.output_flips.len() != n
        {
            return Err(InequalityError::BadSymmetry("length mismatch".into()));
        }
        for (i, &src) in self.party_perm.iter().enumerate() {
            if src >= n || seen[src] {
                return Err(InequalityError::BadSymmetry("not a permutation".into()));
            }
            seen[src] = true;
            let same = scenario.inputs()[i] == scenario.inputs()[src]
                && (0..scenario.inputs()[i])
                    .all(|x| scenario.outputs_at(i, x) == scenario.outputs_at(src, x));
            if !same {
                return Err(InequalityError::BadSymmetry(format!(
                    "parties {i} and {src} differ in structure"
                )));
            }
        }
        for i in 0..n {
            if self.input_flips[i] && scenario.inputs()[i] != 2 {
                return Err(InequalityError::BadSymmetry(format!(
                    "input flip on party {i} needs binary inputs"
                )));
            }
            if self.output_flips[i].len() != scenario.inputs()[i] {
                return Err(InequalityError::BadSymmetry(format!(
                    "output flip row {i} has wrong length"
                )));
            }
            for (x, &f) in self.output_flips[i].iter().enumerate() {
                if f && scenario.outputs_at(i, x) != 2 {
                    return Err(InequalityError::BadSymmetry(format!(
                        "outcome flip on party {i}, input {x} needs binary outcomes"
                    )));
                }
            }
        }
        Ok(())
    }

    /// The permutation induced on canonical indices: entry `k` is the image
    /// of index `k`.
    pub fn index_map(&self, scenario: &Scenario) -> Result<Vec<usize>, InequalityError> {
        self.validate(scenario)?;
        let n = scenario.parties();
        let mut map = Vec::with_capacity(scenario.joint_dim());
        for (a, x) in scenario.index_pairs() {
            let mut a2 = vec![0usize; n];
            let mut x2 = vec![0usize; n];
            for i in 0..n {
                a2[i] = a[self.party_perm[i]];
                x2[i] = x[self.party_perm[i]];
            }
            for i in 0..n {
                if self.input_flips[i] {
                    x2[i] ^= 1;
                }
            }
            for i in 0..n {
                if self.output_flips[i][x2[i]] {
                    a2[i] ^= 1;
                }
            }
            map.push(scenario.canonical_index(&a2, &x2)?);
        }
        Ok(map)
    }
}

/// Apply the index permutation to an inequality: coefficient at index `k`
/// moves to index `map[k]`.
pub fn apply_symmetry(ineq: &Inequality, op: &SymmetryOp) -> Result<Inequality, InequalityError> {
    let map = op.index_map(&ineq.scenario)?;
    let mut beta = vec![Rat::zero(); ineq.beta.len()];
    for (k, &to) in map.iter().enumerate() {
        beta[to] = ineq.beta[k].clone();
    }
    Ok(Inequality {
        scenario: ineq.scenario.clone(),
        space: ineq.space,
        beta,
        bound: ineq.bound.clone(),
    })
}

/// Apply the index permutation to a behavior (same convention as
/// [`apply_symmetry`], so evaluation is invariant under applying an op to
/// both sides).
pub fn apply_symmetry_behavior(
    behavior: &Behavior,
    op: &SymmetryOp,
) -> Result<Behavior, InequalityError> {
    let map = op.index_map(&behavior.scenario)?;
    let mut values = vec![Rat::zero(); behavior.values.len()];
    for (k, &to) in map.iter().enumerate() {
        values[to] = behavior.values[k].clone();
    }
    Ok(Behavior::new(behavior.scenario.clone(), behavior.kind, values)?)
}

/// Generators of the relabeling group listed alongside the facet tables:
/// exchanging parties, exchanging a party's input labels, and exchanging a
/// party's outcome labels uniformly across its inputs.
pub fn uniform_flip_generators(scenario: &Scenario) -> Vec<SymmetryOp> {
    let n = scenario.parties();
    let mut gens = Vec::new();
    for i in 0..n.saturating_sub(1) {
        let mut op = SymmetryOp::identity(scenario);
        op.party_perm.swap(i, i + 1);
        if op.validate(scenario).is_ok() {
            gens.push(op);
        }
    }
    for i in 0..n {
        if scenario.inputs()[i] == 2 {
            let mut op = SymmetryOp::identity(scenario);
            op.input_flips[i] = true;
            gens.push(op);
        }
        if (0..scenario.inputs()[i]).all(|x| scenario.outputs_at(i, x) == 2) {
            let mut op = SymmetryOp::identity(scenario);
            op.output_flips[i] = vec![true; scenario.inputs()[i]];
            gens.push(op);
        }
    }
    gens
}

/// Generators of the full relabeling group: as
/// [`uniform_flip_generators`], but outcome flips may act on a single
/// (party, input) slot.
pub fn relabeling_generators(scenario: &Scenario) -> Vec<SymmetryOp> {
    let n = scenario.parties();
    let mut gens = Vec::new();
    for i in 0..n.saturating_sub(1) {
        let mut op = SymmetryOp::identity(scenario);
        op.party_perm.swap(i, i + 1);
        if op.validate(scenario).is_ok() {
            gens.push(op);
        }
    }
    for i in 0..n {
        if scenario.inputs()[i] == 2 {
            let mut op = SymmetryOp::identity(scenario);
            op.input_flips[i] = true;
            gens.push(op);
        }
        for x in 0..scenario.inputs()[i] {
            if scenario.outputs_at(i, x) == 2 {
                let mut op = SymmetryOp::identity(scenario);
                op.output_flips[i][x] = true;
                gens.push(op);
            }
        }
    }
    gens
}

/// Canonical key of an inequality under positive rescaling.
fn orbit_key(beta: &[Rat], bound: &Rat) -> String {
    let (a, b) = canonical_row(beta, bound);
    let mut s = String::new();
    for c in &a {
        s.push_str(&c.to_string());
        s.push(',');
    }
    s.push('|');
    s.push_str(&b.to_string());
    s
}

/// Closure of an inequality under the group generated by `gens`,
/// deduplicated under positive rescaling. Deterministic order.
pub fn symmetry_orbit(
    ineq: &Inequality,
    gens: &[SymmetryOp],
) -> Result<Vec<Inequality>, InequalityError> {
    let maps: Vec<Vec<usize>> = gens
        .iter()
        .map(|g| g.index_map(&ineq.scenario))
        .collect::<Result<_, _>>()?;
    let mut seen = BTreeSet::new();
    seen.insert(orbit_key(&ineq.beta, &ineq.bound));
    let mut out = vec![ineq.clone()];
    let mut frontier = vec![ineq.clone()];
    while let Some(current) = frontier.pop() {
        for map in &maps {
            let mut beta = vec![Rat::zero(); current.beta.len()];
            for (k, &to) in map.iter().enumerate() {
                beta[to] = current.beta[k].clone();
            }
            let key = orbit_key(&beta, &current.bound);
            if seen.insert(key) {
                let next = Inequality {
                    scenario: ineq.scenario.clone(),
                    space: ineq.space,
                    beta,
                    bound: current.bound.clone(),
                };
                out.push(next.clone());
                frontier.push(next);
            }
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Catalog
// ---------------------------------------------------------------------------

fn rat_usize(n: usize) -> Rat {
    Rat::from_integer((n as i64).into())
}

/// The conditional-space inequality
/// `p(00|00) − p(01|01) − p(10|10) − p(00|11) ≤ 0` on two parties with
/// binary inputs and outputs.
pub fn eberhard() -> Inequality {
    let s = Scenario::symmetric(2, 2, 2);
    let mut beta = vec![Rat::zero(); s.joint_dim()];
    let one = Rat::from_integer(1.into());
    beta[s.canonical_index(&[0, 0], &[0, 0]).unwrap()] = one.clone();
    beta[s.canonical_index(&[0, 1], &[0, 1]).unwrap()] = -one.clone();
    beta[s.canonical_index(&[1, 0], &[1, 0]).unwrap()] = -one.clone();
    beta[s.canonical_index(&[0, 0], &[1, 1]).unwrap()] = -one;
    Inequality { scenario: s, space: BehaviorKind::Conditional, beta, bound: Rat::zero() }
}

/// The conditional-space form
/// `Σ (−1)^{a⊕b⊕xy} p(ab|xy) ≤ 2` of the standard two-party correlation
/// inequality.
pub fn chsh_conditional() -> Inequality {
    let s = Scenario::symmetric(2, 2, 2);
    let mut beta = vec![Rat::zero(); s.joint_dim()];
    for (slot, (a, x)) in s.index_pairs().into_iter().enumerate() {
        let sign = (a[0] + a[1] + x[0] * x[1]) % 2;
        beta[slot] = if sign == 0 {
            Rat::from_integer(1.into())
        } else {
            Rat::from_integer((-1).into())
        };
    }
    Inequality {
        scenario: s,
        space: BehaviorKind::Conditional,
        beta,
        bound: Rat::from_integer(2.into()),
    }
}

/// The joint-space inequality
/// `ℓ·p(0000) − h·(p(0101) + p(1010) + p(0011)) ≤ 0`, built by transforming
/// [`eberhard`].
pub fn golden(params: &MdlParams) -> Inequality {
    bell_to_mdl(&eberhard(), params)
        .expect("eberhard is conditional")
        .inequality
}

/// The joint-space inequality on two parties with `n` inputs:
/// `(1−(n²−n+1)h)·p(0000) − h·Σ_{i=1}^{n−1}(p(10i0)+p(010i)+p(00ii)) ≤ 0`.
pub fn two_n_two(n: usize, h: &Rat) -> Result<Inequality, InequalityError> {
    if n < 2 {
        return Err(InequalityError::BadParameter(format!("need n ≥ 2 inputs, got {n}")));
    }
    let s = Scenario::symmetric(2, n, 2);
    let mut beta = vec![Rat::zero(); s.joint_dim()];
    let lead = Rat::from_integer(1.into()) - rat_usize(n * n - n + 1) * h;
    beta[s.canonical_index(&[0, 0], &[0, 0])?] = lead;
    for i in 1..n {
        beta[s.canonical_index(&[1, 0], &[i, 0])?] = -h.clone();
        beta[s.canonical_index(&[0, 1], &[0, i])?] = -h.clone();
        beta[s.canonical_index(&[0, 0], &[i, i])?] = -h.clone();
    }
    Inequality::new(s, BehaviorKind::Joint, beta, Rat::zero())
}

/// The conditional-space inequality on `N` parties with binary inputs and
/// outputs: `p(0⃗|0⃗) − Σ_j p(e⃗_j|e⃗_j) − p(0⃗|1⃗) ≤ 0`.
pub fn n_party_bell(n_parties: usize) -> Result<Inequality, InequalityError> {
    if n_parties < 2 {
        return Err(InequalityError::BadParameter(format!(
            "need N ≥ 2 parties, got {n_parties}"
        )));
    }
    let s = Scenario::symmetric(n_parties, 2, 2);
    let mut beta = vec![Rat::zero(); s.joint_dim()];
    let one = Rat::from_integer(1.into());
    let zeros = vec![0usize; n_parties];
    let ones = vec![1usize; n_parties];
    beta[s.canonical_index(&zeros, &zeros)?] = one.clone();
    for j in 0..n_parties {
        let mut e = zeros.clone();
        e[j] = 1;
        beta[s.canonical_index(&e, &e)?] = -one.clone();
    }
    beta[s.canonical_index(&zeros, &ones)?] = -one;
    Inequality::new(s, BehaviorKind::Conditional, beta, Rat::zero())
}

/// The joint-space measurement-dependent form of [`n_party_bell`], built by
/// the transformation.
pub fn n_party_mdl(n_parties: usize, params: &MdlParams) -> Result<Inequality, InequalityError> {
    Ok(bell_to_mdl(&n_party_bell(n_parties)?, params)?.inequality)
}

/// Look up a named inequality. Parameters are read from `params`/`n` as the
/// entry requires.
pub fn catalog(
    name: &str,
    params: Option<&MdlParams>,
    n: Option<usize>,
) -> Result<Inequality, InequalityError> {
    let need_params = || {
        params.ok_or_else(|| {
            InequalityError::BadParameter(format!("`{name}` needs l and h parameters"))
        })
    };
    let need_n = || {
        n.ok_or_else(|| InequalityError::BadParameter(format!("`{name}` needs a party/input count")))
    };
    match name {
        "eberhard" => Ok(eberhard()),
        "chsh" | "chsh_conditional" => Ok(chsh_conditional()),
        "golden" => Ok(golden(need_params()?)),
        "two_n_two" => two_n_two(need_n()?, &need_params()?.h),
        "n_party_bell" => n_party_bell(need_n()?),
        "n_party_mdl" => n_party_mdl(need_n()?, need_params()?),
        other => Err(InequalityError::UnknownCatalog(other.into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polytope::{mdl_vertices, ProductMode, SizeLimits};
    use crate::ratio::rat;
    use crate::scenario::InputDistribution;

    fn scenario222() -> Scenario {
        Scenario::symmetric(2, 2, 2)
    }

    #[test]
    fn golden_matches_published_coefficients() {
        let params = MdlParams::new(rat(1, 10), rat(7, 10));
        let g = golden(&params);
        assert_eq!(g.space, BehaviorKind::Joint);
        assert_eq!(*g.coefficient(&[0, 0], &[0, 0]).unwrap(), rat(1, 10));
        assert_eq!(*g.coefficient(&[0, 1], &[0, 1]).unwrap(), rat(-7, 10));
        assert_eq!(*g.coefficient(&[1, 0], &[1, 0]).unwrap(), rat(-7, 10));
        assert_eq!(*g.coefficient(&[0, 0], &[1, 1]).unwrap(), rat(-7, 10));
        let nonzero = g.beta.iter().filter(|c| !c.is_zero()).count();
        assert_eq!(nonzero, 4);
        assert_eq!(g.bound, Rat::zero());
    }

    #[test]
    fn chsh_bounds() {
        let chsh = chsh_conditional();
        assert_eq!(local_bound_check(&chsh).unwrap(), rat(2, 1));
        // All-zero deterministic point evaluates to 2.
        let verts = crate::polytope::local_vertices(&scenario222());
        let all_zero = Behavior::new(
            scenario222(),
            BehaviorKind::Conditional,
            verts.vertices[0].clone(),
        )
        .unwrap();
        assert_eq!(evaluate(&chsh, &all_zero).unwrap(), rat(2, 1));
    }

    #[test]
    fn transform_scales_by_sign() {
        let params = MdlParams::new(rat(1, 10), rat(7, 10));
        let t = bell_to_mdl(&chsh_conditional(), &params).unwrap();
        assert!(!t.trivial);
        let m = t.inequality;
        assert_eq!(m.bound, rat(2, 100) * rat(7, 1)); // ℓ·h·2 = 14/100
        assert_eq!(*m.coefficient(&[0, 0], &[0, 0]).unwrap(), rat(1, 10));
        assert_eq!(*m.coefficient(&[0, 1], &[0, 0]).unwrap(), rat(-7, 10));
        assert_eq!(*m.coefficient(&[0, 0], &[1, 1]).unwrap(), rat(-7, 10));
        assert_eq!(*m.coefficient(&[0, 1], &[1, 1]).unwrap(), rat(1, 10));

        let trivial = bell_to_mdl(&chsh_conditional(), &MdlParams::new(rat(0, 1), rat(1, 3)))
            .unwrap();
        assert!(trivial.trivial);
    }

    #[test]
    fn transform_is_sound_on_vertices() {
        // Σ β·v ≤ ℓhB for every MDL vertex, for two scenarios and several
        // parameter pairs.
        let cases = [
            (Scenario::symmetric(2, 2, 2), vec![(rat(1, 10), rat(7, 10)), (rat(1, 5), rat(2, 5))]),
            (Scenario::symmetric(3, 2, 2), vec![(rat(1, 10), rat(1, 4)), (rat(1, 16), rat(5, 16))]),
        ];
        for (s, param_list) in cases {
            let bell = if s.parties() == 2 { chsh_conditional() } else { n_party_bell(3).unwrap() };
            for (l, h) in param_list {
                let params = MdlParams::new(l, h);
                let verts =
                    mdl_vertices(&s, &params, ProductMode::Dedupe, &SizeLimits::default()).unwrap();
                let t = bell_to_mdl(&bell, &params).unwrap();
                let max = mdl_bound(&t.inequality, &verts).unwrap();
                assert!(max <= t.inequality.bound, "transform violated at a vertex");
            }
        }
    }

    #[test]
    fn golden_value_is_zero_on_mdl_vertices() {
        let params = MdlParams::new(rat(1, 10), rat(7, 10));
        let verts = mdl_vertices(
            &scenario222(),
            &params,
            ProductMode::Minimize,
            &SizeLimits::default(),
        )
        .unwrap();
        let g = golden(&params);
        assert_eq!(mdl_bound(&g, &verts).unwrap(), Rat::zero());
    }

    #[test]
    fn chsh_mdl_bound_is_one_minus_two_l() {
        for l in [rat(1, 10), rat(1, 8), rat(1, 5)] {
            let h = Rat::from_integer(1.into()) - rat(3, 1) * &l;
            let params = MdlParams::new(l.clone(), h);
            let verts = mdl_vertices(
                &scenario222(),
                &params,
                ProductMode::Dedupe,
                &SizeLimits::default(),
            )
            .unwrap();
            // Full-probability form with uniform inputs: Σ (−1)^{a⊕b⊕xy} p(abxy).
            let chsh = chsh_conditional();
            let joint = Inequality {
                scenario: chsh.scenario.clone(),
                space: BehaviorKind::Joint,
                beta: chsh.beta.clone(),
                bound: Rat::zero(),
            };
            let max = mdl_bound(&joint, &verts).unwrap();
            assert_eq!(max, Rat::from_integer(1.into()) - rat(2, 1) * &l);
        }
    }

    #[test]
    fn orbit_sizes_in_222() {
        let s = scenario222();
        let uniform = uniform_flip_generators(&s);
        let full = relabeling_generators(&s);
        assert_eq!(uniform.len(), 5); // swap, 2 input flips, 2 global outcome flips
        assert_eq!(full.len(), 7); // swap, 2 input flips, 4 per-input outcome flips

        // Fully symmetric inequality: orbit of size 1.
        let sym = Inequality::new(
            s.clone(),
            BehaviorKind::Joint,
            vec![Rat::from_integer(1.into()); s.joint_dim()],
            Rat::from_integer(1.into()),
        )
        .unwrap();
        assert_eq!(symmetry_orbit(&sym, &full).unwrap().len(), 1);

        // Conditional-space positivity facet p(ab|xy) ≥ 0 written as
        // −p ≤ 0: orbit covers all 16 cells under either group.
        let mut beta = vec![Rat::zero(); s.joint_dim()];
        beta[0] = Rat::from_integer((-1).into());
        let pos = Inequality::new(s.clone(), BehaviorKind::Conditional, beta, Rat::zero()).unwrap();
        assert_eq!(symmetry_orbit(&pos, &uniform).unwrap().len(), 16);
        assert_eq!(symmetry_orbit(&pos, &full).unwrap().len(), 16);

        // The correlation inequality's orbit among non-positivity facets has
        // size 8 under the uniform-flip group.
        let chsh = chsh_conditional();
        assert_eq!(symmetry_orbit(&chsh, &uniform).unwrap().len(), 8);
        assert_eq!(symmetry_orbit(&chsh, &full).unwrap().len(), 8);
    }

    #[test]
    fn symmetries_preserve_mdl_vertex_set() {
        let s = scenario222();
        let params = MdlParams::new(rat(1, 10), rat(7, 10));
        let verts = mdl_vertices(&s, &params, ProductMode::Minimize, &SizeLimits::default())
            .unwrap();
        let mut sorted = verts.vertices.clone();
        sorted.sort();
        for op in relabeling_generators(&s) {
            let map = op.index_map(&s).unwrap();
            let mut mapped: Vec<Vec<Rat>> = verts
                .vertices
                .iter()
                .map(|v| {
                    let mut w = vec![Rat::zero(); v.len()];
                    for (k, &to) in map.iter().enumerate() {
                        w[to] = v[k].clone();
                    }
                    w
                })
                .collect();
            mapped.sort();
            assert_eq!(mapped, sorted, "op {op:?} does not preserve the vertex set");
        }
    }

    #[test]
    fn evaluation_invariant_under_simultaneous_relabeling() {
        let s = scenario222();
        let params = MdlParams::new(rat(1, 10), rat(7, 10));
        let g = golden(&params);
        let verts = mdl_vertices(&s, &params, ProductMode::Minimize, &SizeLimits::default())
            .unwrap();
        let behavior =
            Behavior::new(s.clone(), BehaviorKind::Joint, verts.vertices[17].clone()).unwrap();
        for op in relabeling_generators(&s) {
            let gi = apply_symmetry(&g, &op).unwrap();
            let bi = apply_symmetry_behavior(&behavior, &op).unwrap();
            assert_eq!(
                evaluate(&gi, &bi).unwrap(),
                evaluate(&g, &behavior).unwrap()
            );
        }
    }

    #[test]
    fn two_n_two_reduces_to_golden() {
        let h = rat(7, 10);
        let t = two_n_two(2, &h).unwrap();
        let l = Rat::from_integer(1.into()) - rat(3, 1) * &h; // 1−3h, negative here but formal
        let g = golden(&MdlParams::new(l, h));
        assert_eq!(t.beta, g.beta);
        assert_eq!(t.bound, g.bound);

        let t3 = two_n_two(3, &rat(1, 8)).unwrap();
        assert_eq!(*t3.coefficient(&[0, 0], &[0, 0]).unwrap(), rat(1, 8)); // 1−7h = 1/8
        let nonzero = t3.beta.iter().filter(|c| !c.is_zero()).count();
        assert_eq!(nonzero, 7);
    }

    #[test]
    fn n_party_bell_local_bound_zero() {
        for n in [2usize, 3, 4] {
            let ineq = n_party_bell(n).unwrap();
            assert_eq!(local_bound_check(&ineq).unwrap(), Rat::zero(), "N = {n}");
        }
        assert_eq!(local_bound_check(&chsh_conditional()).unwrap(), rat(2, 1));
    }

    #[test]
    fn n_party_mdl_coefficients() {
        let params = MdlParams::new(rat(1, 10), rat(7, 10));
        let m = n_party_mdl(2, &params).unwrap();
        assert_eq!(*m.coefficient(&[0, 0], &[0, 0]).unwrap(), rat(1, 10));
        assert_eq!(*m.coefficient(&[1, 0], &[1, 0]).unwrap(), rat(-7, 10));
        assert_eq!(*m.coefficient(&[0, 1], &[0, 1]).unwrap(), rat(-7, 10));
        assert_eq!(*m.coefficient(&[0, 0], &[1, 1]).unwrap(), rat(-7, 10));
    }

    #[test]
    fn conditional_evaluation_on_joint_behaviors() {
        // A product behavior with uniform inputs: conditional value of the
        // correlation inequality must match direct evaluation.
        let s = scenario222();
        let verts = crate::polytope::local_vertices(&s);
        let input = InputDistribution::uniform(s.clone());
        let joint = crate::scenario::conditional_to_joint(
            &Behavior::new(s.clone(), BehaviorKind::Conditional, verts.vertices[3].clone())
                .unwrap(),
            &input,
        )
        .unwrap();
        let chsh = chsh_conditional();
        let direct = dot(&chsh.beta, &verts.vertices[3]);
        assert_eq!(evaluate_conditional_on_joint(&chsh, &joint).unwrap(), direct);
    }

    #[test]
    fn inequality_json_round_trip() {
        let params = MdlParams::new(rat(1, 10), rat(7, 10));
        let g = golden(&params);
        let text = serde_json::to_string(&g).unwrap();
        assert!(text.contains("\"space\":\"joint\""));
        let back: Inequality = serde_json::from_str(&text).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn catalog_dispatch() {
        let params = MdlParams::new(rat(1, 10), rat(7, 10));
        assert!(catalog("eberhard", None, None).is_ok());
        assert!(catalog("golden", Some(&params), None).is_ok());
        assert!(catalog("golden", None, None).is_err());
        assert!(catalog("two_n_two", Some(&params), Some(3)).is_ok());
        assert!(catalog("n_party_bell", None, Some(4)).is_ok());
        assert!(matches!(
            catalog("nope", None, None),
            Err(InequalityError::UnknownCatalog(_))
        ));
    }
}
