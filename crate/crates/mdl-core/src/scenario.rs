//! Measurement scenarios and behaviors.
//!
//! A scenario fixes the number of parties, each party's input count, and the
//! output count for every (party, input) pair. Joint behaviors are
//! distributions p(a⃗, x⃗) over outcome-and-input tuples; conditional behaviors
//! are families p(a⃗ | x⃗) normalized per input context.
//!
//! The canonical flat index is inputs-outermost with party 1 most
//! significant: contexts x⃗ are ranked in mixed radix (x_1 highest), and
//! within a context outcomes a⃗ are ranked the same way. Blocks are ragged
//! when output counts vary by input, so every index corresponds to a
//! possible (a⃗, x⃗) pair and the indexing is bijective.

use crate::ratio::{serde_rat_vec, Rat};
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ScenarioError {
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error("length mismatch: expected {expected} values, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("negative entry at index {index}")]
    NegativeEntry { index: usize },
    #[error("values for context {context} sum to {got}, expected {expected}")]
    BadNormalization {
        context: usize,
        expected: String,
        got: String,
    },
    #[error("bounds violation: {constraint} fails for l={l}, h={h}")]
    BoundsViolation {
        constraint: &'static str,
        l: String,
        h: String,
    },
    #[error("party bounds violation at party {party}: {constraint}")]
    PartyBoundsViolation {
        party: usize,
        constraint: &'static str,
    },
    #[error("input context {context} has zero probability")]
    ZeroInputProbability { context: usize },
    #[error("expected a {expected} behavior, got {got}")]
    SpaceMismatch {
        expected: &'static str,
        got: &'static str,
    },
    #[error("outcome {outcome} out of range for party {party} at input {input}")]
    ImpossibleOutcome {
        party: usize,
        input: usize,
        outcome: usize,
    },
    #[error("input {input} out of range for party {party}")]
    BadInput { party: usize, input: usize },
}

/// Enumerate all tuples with the given per-position radices, first position
/// most significant. `dims = [2, 3]` yields `[0,0], [0,1], [0,2], [1,0], ...`.
pub fn mixed_radix(dims: &[usize]) -> Vec<Vec<usize>> {
    let total: usize = dims.iter().product();
    let mut out = Vec::with_capacity(total);
    let mut cur = vec![0usize; dims.len()];
    if dims.iter().any(|&d| d == 0) {
        return out;
    }
    loop {
        out.push(cur.clone());
        let mut pos = dims.len();
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            cur[pos] += 1;
            if cur[pos] < dims[pos] {
                break;
            }
            cur[pos] = 0;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "ScenarioRaw", into = "ScenarioRaw")]
pub struct Scenario {
    parties: usize,
    inputs: Vec<usize>,
    outputs: Vec<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
struct ScenarioRaw {
    parties: usize,
    inputs: Vec<usize>,
    outputs: Vec<Vec<usize>>,
}

impl From<Scenario> for ScenarioRaw {
    fn from(s: Scenario) -> Self {
        ScenarioRaw {
            parties: s.parties,
            inputs: s.inputs,
            outputs: s.outputs,
        }
    }
}

impl TryFrom<ScenarioRaw> for Scenario {
    type Error = ScenarioError;
    fn try_from(raw: ScenarioRaw) -> Result<Self, ScenarioError> {
        Scenario::new(raw.parties, raw.inputs, raw.outputs)
    }
}

impl Scenario {
    pub fn new(
        parties: usize,
        inputs: Vec<usize>,
        outputs: Vec<Vec<usize>>,
    ) -> Result<Self, ScenarioError> {
        if parties == 0 {
            return Err(ScenarioError::InvalidScenario("no parties".into()));
        }
        if inputs.len() != parties || outputs.len() != parties {
            return Err(ScenarioError::InvalidScenario(format!(
                "expected {parties} input counts and output tables"
            )));
        }
        for (i, (&n, outs)) in inputs.iter().zip(&outputs).enumerate() {
            if n == 0 {
                return Err(ScenarioError::InvalidScenario(format!(
                    "party {i} has no inputs"
                )));
            }
            if outs.len() != n {
                return Err(ScenarioError::InvalidScenario(format!(
                    "party {i}: expected {n} output counts, got {}",
                    outs.len()
                )));
            }
            if outs.iter().any(|&m| m < 2) {
                return Err(ScenarioError::InvalidScenario(format!(
                    "party {i} has an input with fewer than 2 outputs"
                )));
            }
        }
        Ok(Self {
            parties,
            inputs,
            outputs,
        })
    }

    /// The common symmetric case: every party has `n_inputs` inputs and every
    /// input has `n_outputs` outputs. `symmetric(2, 2, 2)` is the CHSH-style
    /// scenario.
    pub fn symmetric(parties: usize, n_inputs: usize, n_outputs: usize) -> Self {
        Scenario::new(
            parties,
            vec![n_inputs; parties],
            vec![vec![n_outputs; n_inputs]; parties],
        )
        .expect("symmetric scenario parameters")
    }

    pub fn parties(&self) -> usize {
        self.parties
    }

    pub fn inputs(&self) -> &[usize] {
        &self.inputs
    }

    pub fn outputs_at(&self, party: usize, input: usize) -> usize {
        self.outputs[party][input]
    }

    /// Number of input contexts, Π_i n_i.
    pub fn num_contexts(&self) -> usize {
        self.inputs.iter().product()
    }

    pub fn contexts(&self) -> Vec<Vec<usize>> {
        mixed_radix(&self.inputs)
    }

    pub fn context_rank(&self, x: &[usize]) -> Result<usize, ScenarioError> {
        let mut rank = 0usize;
        for (i, (&xi, &ni)) in x.iter().zip(&self.inputs).enumerate() {
            if xi >= ni {
                return Err(ScenarioError::BadInput {
                    party: i,
                    input: xi,
                });
            }
            rank = rank * ni + xi;
        }
        Ok(rank)
    }

    pub fn outcome_dims(&self, x: &[usize]) -> Vec<usize> {
        (0..self.parties).map(|i| self.outputs[i][x[i]]).collect()
    }

    pub fn block_size(&self, x: &[usize]) -> usize {
        self.outcome_dims(x).iter().product()
    }

    pub fn outcomes_for(&self, x: &[usize]) -> Vec<Vec<usize>> {
        mixed_radix(&self.outcome_dims(x))
    }

    /// Length of a joint or conditional value vector.
    pub fn joint_dim(&self) -> usize {
        self.contexts().iter().map(|x| self.block_size(x)).sum()
    }

    fn context_offset(&self, rank: usize) -> usize {
        self.contexts()
            .iter()
            .take(rank)
            .map(|x| self.block_size(x))
            .sum()
    }

    /// Canonical flat index of the pair (a⃗, x⃗); bijective on valid pairs.
    pub fn canonical_index(&self, a: &[usize], x: &[usize]) -> Result<usize, ScenarioError> {
        if a.len() != self.parties || x.len() != self.parties {
            return Err(ScenarioError::LengthMismatch {
                expected: self.parties,
                got: a.len().max(x.len()),
            });
        }
        let rank = self.context_rank(x)?;
        let dims = self.outcome_dims(x);
        let mut within = 0usize;
        for (i, (&ai, &mi)) in a.iter().zip(&dims).enumerate() {
            if ai >= mi {
                return Err(ScenarioError::ImpossibleOutcome {
                    party: i,
                    input: x[i],
                    outcome: ai,
                });
            }
            within = within * mi + ai;
        }
        Ok(self.context_offset(rank) + within)
    }

    /// Inverse of [`canonical_index`](Self::canonical_index).
    pub fn index_to_pair(&self, mut index: usize) -> (Vec<usize>, Vec<usize>) {
        for x in self.contexts() {
            let block = self.block_size(&x);
            if index < block {
                let dims = self.outcome_dims(&x);
                let mut a = vec![0usize; self.parties];
                for i in (0..self.parties).rev() {
                    a[i] = index % dims[i];
                    index /= dims[i];
                }
                return (a, x);
            }
            index -= block;
        }
        panic!("index out of range");
    }

    /// All (a⃗, x⃗) pairs in canonical-index order.
    pub fn index_pairs(&self) -> Vec<(Vec<usize>, Vec<usize>)> {
        let mut out = Vec::with_capacity(self.joint_dim());
        for x in self.contexts() {
            for a in self.outcomes_for(&x) {
                out.push((a, x.clone()));
            }
        }
        out
    }
}

/// Free-function form of the canonical indexing.
pub fn canonical_index(
    scenario: &Scenario,
    outcomes: &[usize],
    inputs: &[usize],
) -> Result<usize, ScenarioError> {
    scenario.canonical_index(outcomes, inputs)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BehaviorKind {
    Joint,
    Conditional,
}

impl BehaviorKind {
    pub fn name(self) -> &'static str {
        match self {
            BehaviorKind::Joint => "joint",
            BehaviorKind::Conditional => "conditional",
        }
    }
}

/// A joint distribution p(a⃗, x⃗) or a conditional family p(a⃗ | x⃗) over the
/// canonical index set of a scenario.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Behavior {
    pub scenario: Scenario,
    pub kind: BehaviorKind,
    #[serde(with = "serde_rat_vec")]
    pub values: Vec<Rat>,
}

impl Behavior {
    /// Validating constructor: nonnegative entries, exact normalization
    /// (global for joint, per context for conditional).
    pub fn new(
        scenario: Scenario,
        kind: BehaviorKind,
        values: Vec<Rat>,
    ) -> Result<Self, ScenarioError> {
        let b = Self {
            scenario,
            kind,
            values,
        };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        let dim = self.scenario.joint_dim();
        if self.values.len() != dim {
            return Err(ScenarioError::LengthMismatch {
                expected: dim,
                got: self.values.len(),
            });
        }
        if let Some(i) = self.values.iter().position(|v| v < &Rat::zero()) {
            return Err(ScenarioError::NegativeEntry { index: i });
        }
        match self.kind {
            BehaviorKind::Joint => {
                let total: Rat = self.values.iter().sum();
                if !total.is_one() {
                    return Err(ScenarioError::BadNormalization {
                        context: 0,
                        expected: "1".into(),
                        got: crate::ratio::format_rat(&total),
                    });
                }
            }
            BehaviorKind::Conditional => {
                let mut offset = 0;
                for (rank, x) in self.scenario.contexts().into_iter().enumerate() {
                    let block = self.scenario.block_size(&x);
                    let total: Rat = self.values[offset..offset + block].iter().sum();
                    if !total.is_one() {
                        return Err(ScenarioError::BadNormalization {
                            context: rank,
                            expected: "1".into(),
                            got: crate::ratio::format_rat(&total),
                        });
                    }
                    offset += block;
                }
            }
        }
        Ok(())
    }

    pub fn value(&self, a: &[usize], x: &[usize]) -> Result<&Rat, ScenarioError> {
        Ok(&self.values[self.scenario.canonical_index(a, x)?])
    }

    /// Marginal probability of each input context (joint behaviors only).
    pub fn input_marginals(&self) -> Result<Vec<Rat>, ScenarioError> {
        if self.kind != BehaviorKind::Joint {
            return Err(ScenarioError::SpaceMismatch {
                expected: "joint",
                got: self.kind.name(),
            });
        }
        let mut out = Vec::with_capacity(self.scenario.num_contexts());
        let mut offset = 0;
        for x in self.scenario.contexts() {
            let block = self.scenario.block_size(&x);
            out.push(self.values[offset..offset + block].iter().sum());
            offset += block;
        }
        Ok(out)
    }

    /// Joint → conditional, dividing each block by its input marginal.
    pub fn to_conditional(&self) -> Result<(Behavior, InputDistribution), ScenarioError> {
        let marginals = self.input_marginals()?;
        if let Some(rank) = marginals.iter().position(|m| m.is_zero()) {
            return Err(ScenarioError::ZeroInputProbability { context: rank });
        }
        let mut values = Vec::with_capacity(self.values.len());
        let mut offset = 0;
        for (rank, x) in self.scenario.contexts().into_iter().enumerate() {
            let block = self.scenario.block_size(&x);
            for v in &self.values[offset..offset + block] {
                values.push(v / &marginals[rank]);
            }
            offset += block;
        }
        Ok((
            Behavior::new(self.scenario.clone(), BehaviorKind::Conditional, values)?,
            InputDistribution::new(self.scenario.clone(), marginals)?,
        ))
    }
}

/// Conditional × input distribution → joint, exactly.
pub fn conditional_to_joint(
    cond: &Behavior,
    inputs: &InputDistribution,
) -> Result<Behavior, ScenarioError> {
    if cond.kind != BehaviorKind::Conditional {
        return Err(ScenarioError::SpaceMismatch {
            expected: "conditional",
            got: cond.kind.name(),
        });
    }
    if cond.scenario != inputs.scenario {
        return Err(ScenarioError::InvalidScenario(
            "conditional behavior and input distribution disagree on the scenario".into(),
        ));
    }
    let mut values = Vec::with_capacity(cond.values.len());
    let mut offset = 0;
    for (rank, x) in cond.scenario.contexts().into_iter().enumerate() {
        let block = cond.scenario.block_size(&x);
        for v in &cond.values[offset..offset + block] {
            values.push(v * &inputs.values[rank]);
        }
        offset += block;
    }
    Behavior::new(cond.scenario.clone(), BehaviorKind::Joint, values)
}

/// Distribution over input contexts, indexed by context rank.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputDistribution {
    pub scenario: Scenario,
    #[serde(with = "serde_rat_vec")]
    pub values: Vec<Rat>,
}

impl InputDistribution {
    pub fn new(scenario: Scenario, values: Vec<Rat>) -> Result<Self, ScenarioError> {
        if values.len() != scenario.num_contexts() {
            return Err(ScenarioError::LengthMismatch {
                expected: scenario.num_contexts(),
                got: values.len(),
            });
        }
        if let Some(i) = values.iter().position(|v| v < &Rat::zero()) {
            return Err(ScenarioError::NegativeEntry { index: i });
        }
        let total: Rat = values.iter().sum();
        if !total.is_one() {
            return Err(ScenarioError::BadNormalization {
                context: 0,
                expected: "1".into(),
                got: crate::ratio::format_rat(&total),
            });
        }
        Ok(Self { scenario, values })
    }

    pub fn uniform(scenario: Scenario) -> Self {
        let k = scenario.num_contexts();
        let w = Rat::new(1.into(), (k as i64).into());
        Self {
            scenario,
            values: vec![w; k],
        }
    }
}

/// Box bounds l ≤ p(x⃗|λ) ≤ h on the hidden-variable input distribution.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MdlParams {
    #[serde(with = "crate::ratio::serde_rat")]
    pub l: Rat,
    #[serde(with = "crate::ratio::serde_rat")]
    pub h: Rat,
}

impl MdlParams {
    pub fn new(l: Rat, h: Rat) -> Self {
        Self { l, h }
    }
}

/// Enforce the bounds chain
/// `max(1 − (K−1)h, 0) ≤ l ≤ 1/K ≤ h ≤ 1 − (K−1)l` with K = Π n_i.
/// The error names the first inequality that fails.
pub fn validate_mdl_params(scenario: &Scenario, params: &MdlParams) -> Result<(), ScenarioError> {
    let k = scenario.num_contexts() as i64;
    let one = Rat::one();
    let l = &params.l;
    let h = &params.h;
    let fail = |constraint: &'static str| ScenarioError::BoundsViolation {
        constraint,
        l: crate::ratio::format_rat(l),
        h: crate::ratio::format_rat(h),
    };
    let km1 = Rat::from_integer((k - 1).into());
    let floor = (&one - &km1 * h).max(Rat::zero());
    if *l < floor {
        return Err(fail("max(1 - (K-1)h, 0) <= l"));
    }
    let inv_k = Rat::new(1.into(), k.into());
    if *l > inv_k {
        return Err(fail("l <= 1/K"));
    }
    if *h < inv_k {
        return Err(fail("1/K <= h"));
    }
    if *h > &one - &km1 * l {
        return Err(fail("h <= 1 - (K-1)l"));
    }
    Ok(())
}

/// Per-party input bounds l_i ≤ p(x_i|λ) ≤ h_i for independent sources.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartyBounds {
    #[serde(with = "serde_rat_vec")]
    pub l: Vec<Rat>,
    #[serde(with = "serde_rat_vec")]
    pub h: Vec<Rat>,
}

impl PartyBounds {
    /// Binary-input bounds from the upper ends alone (l_i = 1 − h_i).
    pub fn binary(h: Vec<Rat>) -> Self {
        let l = h.iter().map(|hi| Rat::one() - hi).collect();
        Self { l, h }
    }
}

pub fn validate_party_bounds(
    scenario: &Scenario,
    bounds: &PartyBounds,
) -> Result<(), ScenarioError> {
    if bounds.l.len() != scenario.parties() || bounds.h.len() != scenario.parties() {
        return Err(ScenarioError::LengthMismatch {
            expected: scenario.parties(),
            got: bounds.l.len().min(bounds.h.len()),
        });
    }
    for i in 0..scenario.parties() {
        let n = scenario.inputs()[i] as i64;
        let l = &bounds.l[i];
        let h = &bounds.h[i];
        let fail = |constraint: &'static str| ScenarioError::PartyBoundsViolation {
            party: i,
            constraint,
        };
        if l < &Rat::zero() {
            return Err(fail("0 <= l_i"));
        }
        let inv_n = Rat::new(1.into(), n.into());
        if l > &inv_n {
            return Err(fail("l_i <= 1/n_i"));
        }
        if h < &inv_n {
            return Err(fail("1/n_i <= h_i"));
        }
        let km1 = Rat::from_integer((n - 1).into());
        if h > &(Rat::one() - &km1 * l) {
            return Err(fail("h_i <= 1 - (n_i - 1) l_i"));
        }
        if n == 2 && &(l + h) != &Rat::one() {
            return Err(fail("binary inputs require l_i = 1 - h_i"));
        }
    }
    Ok(())
}

/// Nonsignaling residuals: one entry per (party j, own input x_j, own outcome
/// a_j, non-base context of the other parties), comparing party j's marginal
/// against the base context (all other inputs 0). All residuals are zero iff
/// the behavior is nonsignaling.
///
/// Joint behaviors are first conditioned on the inputs; a context with zero
/// input probability is an error.
pub fn signaling_residuals(behavior: &Behavior) -> Result<Vec<Rat>, ScenarioError> {
    let cond_storage;
    let cond = match behavior.kind {
        BehaviorKind::Conditional => behavior,
        BehaviorKind::Joint => {
            let (c, _) = behavior.to_conditional()?;
            cond_storage = c;
            &cond_storage
        }
    };
    let sc = &cond.scenario;
    let mut residuals = Vec::new();
    for j in 0..sc.parties() {
        let other_dims: Vec<usize> = (0..sc.parties())
            .filter(|&i| i != j)
            .map(|i| sc.inputs()[i])
            .collect();
        let others = mixed_radix(&other_dims);
        for xj in 0..sc.inputs()[j] {
            let assemble = |rest: &[usize]| -> Vec<usize> {
                let mut x = Vec::with_capacity(sc.parties());
                let mut it = rest.iter();
                for i in 0..sc.parties() {
                    if i == j {
                        x.push(xj);
                    } else {
                        x.push(*it.next().unwrap());
                    }
                }
                x
            };
            let base_x = assemble(&others[0]);
            for aj in 0..sc.outputs_at(j, xj) {
                let marginal = |x: &[usize]| -> Rat {
                    let mut acc = Rat::zero();
                    for a in sc.outcomes_for(x) {
                        if a[j] == aj {
                            acc += cond.value(&a, x).expect("valid index");
                        }
                    }
                    acc
                };
                let base = marginal(&base_x);
                for rest in others.iter().skip(1) {
                    let x = assemble(rest);
                    residuals.push(marginal(&x) - &base);
                }
            }
        }
    }
    Ok(residuals)
}
