//! Small qubit-system simulation and derivative-free violation search:
//! complex state vectors, projective single-qubit measurement bases, the
//! Born rule, float-valued behaviors with exact rationalization, and a
//! seeded multi-restart simplex-reflection optimizer.
//!
//! Everything polyhedral in this crate is exact; this module is the one
//! place floating point is allowed. Float behaviors cross back into the
//! exact world through [`FloatBehavior::rationalize`], which rounds to
//! bounded-denominator rationals and renormalizes exactly so the LP layer
//! never sees an approximately-normalized distribution.

use num_complex::Complex64;
use num_traits::{Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::facet_tables::{evaluate_rows, FacetTable, SymbolValues, TableError};
use crate::inequalities::{Inequality, InequalityError};
use crate::ratio::Rat;
use crate::scenario::{Behavior, BehaviorKind, InputDistribution, Scenario, ScenarioError};

/// Hard cap on the party count of a state vector (2^N amplitudes).
pub const MAX_PARTIES: usize = 16;
/// Post-construction state norm must be within this of 1.
pub const STATE_NORM_TOLERANCE: f64 = 1e-12;
/// Measurement bases must be orthonormal within this tolerance.
pub const ORTHONORMALITY_TOLERANCE: f64 = 1e-12;
/// Born-rule outcome blocks must sum to 1 within this per context.
pub const PROBABILITY_SUM_TOLERANCE: f64 = 1e-10;
/// Born-rule probabilities may undershoot 0 or overshoot 1 by at most this
/// much before clamping.
pub const PROBABILITY_RANGE_TOLERANCE: f64 = 1e-12;
/// Denominator cap used when rounding float probabilities to rationals.
pub const RATIONALIZE_MAX_DENOMINATOR: u64 = 1_000_000_000;
/// An optimized value above this counts as a genuine violation; anything
/// below is numerical noise.
pub const VIOLATION_THRESHOLD: f64 = 1e-8;
/// Default number of optimizer restarts.
pub const DEFAULT_RESTARTS: usize = 64;
/// Default objective-evaluation budget per restart.
pub const DEFAULT_BUDGET: usize = 800;
/// Default master seed when the caller does not supply one.
pub const DEFAULT_SEED: u64 = 1729;

#[derive(Debug, Error)]
pub enum QuantumError {
    #[error("state on {parties} parties needs {expected} amplitudes, got {got}")]
    BadDimension {
        parties: usize,
        expected: usize,
        got: usize,
    },
    #[error("state vector has zero norm")]
    ZeroNorm,
    #[error("{0} parties exceed the {MAX_PARTIES}-party cap")]
    TooManyParties(usize),
    #[error("basis for party {party}, input {input} is not orthonormal ({detail})")]
    NotOrthonormal {
        party: usize,
        input: usize,
        detail: String,
    },
    #[error("angle for party {party}, input {input} out of range: {detail}")]
    AngleRange {
        party: usize,
        input: usize,
        detail: String,
    },
    #[error("measurement set does not fit the scenario: {0}")]
    ShapeMismatch(String),
    #[error("party {party}, input {input} has {got} outcomes; qubit measurements need 2")]
    NotBinaryOutputs {
        party: usize,
        input: usize,
        got: usize,
    },
    #[error("context {context} outcome probabilities sum to {got}, expected 1")]
    ContextNormalization { context: usize, got: f64 },
    #[error("probability {value} at index {index} lies outside [0,1]")]
    BadProbability { index: usize, value: f64 },
    #[error("behavior context {context} has zero total probability after rounding")]
    ZeroContextMass { context: usize },
    #[error("bad parameter: {0}")]
    BadParameter(String),
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Inequality(#[from] InequalityError),
    #[error(transparent)]
    Table(#[from] TableError),
}

// ---------------------------------------------------------------------------
// States
// ---------------------------------------------------------------------------

/// A pure state of `parties` qubits: 2^parties complex amplitudes, unit
/// norm, global phase fixed by making the first non-negligible amplitude
/// real and positive (so distinct parameter vectors describe distinct
/// states).
///
/// Amplitude index convention: bit of party `i` in amplitude index `k` is
/// `(k >> (parties − 1 − i)) & 1`, i.e. party 0 owns the most significant
/// bit, matching the ket notation |b₀b₁…⟩.
#[derive(Debug, Clone)]
pub struct StateVector {
    parties: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// Normalizes the amplitudes and fixes the global phase. Rejects zero
    /// vectors, party counts above [`MAX_PARTIES`], and length mismatches.
    pub fn new(parties: usize, amps: Vec<Complex64>) -> Result<Self, QuantumError> {
        if parties == 0 || parties > MAX_PARTIES {
            return Err(QuantumError::TooManyParties(parties));
        }
        let expected = 1usize << parties;
        if amps.len() != expected {
            return Err(QuantumError::BadDimension {
                parties,
                expected,
                got: amps.len(),
            });
        }
        let norm_sq: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if norm_sq <= 0.0 || !norm_sq.is_finite() {
            return Err(QuantumError::ZeroNorm);
        }
        let norm = norm_sq.sqrt();
        let mut amps: Vec<Complex64> = amps.into_iter().map(|a| a / norm).collect();
        // After normalization at least one amplitude has magnitude ≥ 2^{-N/2},
        // so picking the first above a loose floor always succeeds.
        let lead = amps
            .iter()
            .find(|a| a.norm() > 1e-14)
            .copied()
            .ok_or(QuantumError::ZeroNorm)?;
        let phase = lead / lead.norm();
        for a in &mut amps {
            *a /= phase;
        }
        debug_assert!((amps.iter().map(|a| a.norm_sqr()).sum::<f64>() - 1.0).abs()
            <= STATE_NORM_TOLERANCE);
        Ok(Self { parties, amps })
    }

    pub fn parties(&self) -> usize {
        self.parties
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// |b₀…b₀⟩ with every qubit 0.
    pub fn all_zero(parties: usize) -> Result<Self, QuantumError> {
        let mut amps = vec![Complex64::ZERO; 1usize << parties.min(MAX_PARTIES)];
        if amps.is_empty() {
            return Err(QuantumError::TooManyParties(parties));
        }
        amps[0] = Complex64::ONE;
        Self::new(parties, amps)
    }

    /// The two-qubit maximally entangled state (|00⟩+|11⟩)/√2.
    pub fn maximally_entangled() -> Self {
        let w = std::f64::consts::FRAC_1_SQRT_2;
        Self::new(2, vec![w.into(), Complex64::ZERO, Complex64::ZERO, w.into()])
            .expect("fixed two-qubit state")
    }

    /// cos(α)|0…0⟩ + sin(α)|1…1⟩ on `parties` qubits.
    pub fn schmidt_pair(parties: usize, alpha: f64) -> Result<Self, QuantumError> {
        if parties == 0 || parties > MAX_PARTIES {
            return Err(QuantumError::TooManyParties(parties));
        }
        let mut amps = vec![Complex64::ZERO; 1usize << parties];
        amps[0] = alpha.cos().into();
        let last = amps.len() - 1;
        amps[last] = alpha.sin().into();
        Self::new(parties, amps)
    }
}

// ---------------------------------------------------------------------------
// Measurements
// ---------------------------------------------------------------------------

/// One projective qubit measurement: an orthonormal pair of single-qubit
/// vectors, indexed by outcome.
#[derive(Debug, Clone)]
pub struct QubitBasis {
    vectors: [[Complex64; 2]; 2],
}

impl QubitBasis {
    /// Validates unit norms and orthogonality within
    /// [`ORTHONORMALITY_TOLERANCE`].
    pub fn new(vectors: [[Complex64; 2]; 2]) -> Result<Self, QuantumError> {
        let b = Self { vectors };
        b.orthonormality_defect()
            .map_err(|detail| QuantumError::NotOrthonormal {
                party: 0,
                input: 0,
                detail,
            })?;
        Ok(b)
    }

    fn orthonormality_defect(&self) -> Result<(), String> {
        let [v0, v1] = &self.vectors;
        let n0 = v0[0].norm_sqr() + v0[1].norm_sqr();
        let n1 = v1[0].norm_sqr() + v1[1].norm_sqr();
        let cross = v0[0].conj() * v1[0] + v0[1].conj() * v1[1];
        if (n0 - 1.0).abs() > ORTHONORMALITY_TOLERANCE {
            return Err(format!("outcome-0 vector has squared norm {n0}"));
        }
        if (n1 - 1.0).abs() > ORTHONORMALITY_TOLERANCE {
            return Err(format!("outcome-1 vector has squared norm {n1}"));
        }
        if cross.norm() > ORTHONORMALITY_TOLERANCE {
            return Err(format!("outcome vectors overlap with |⟨v0|v1⟩| = {}", cross.norm()));
        }
        Ok(())
    }

    /// Basis from Bloch angles: outcome 0 ↦ (cos(θ/2), e^{iφ} sin(θ/2)),
    /// outcome 1 ↦ (sin(θ/2), −e^{iφ} cos(θ/2)).
    pub fn from_angles(theta: f64, phi: f64) -> Self {
        let (s, c) = (theta / 2.0).sin_cos();
        let e = Complex64::from_polar(1.0, phi);
        Self {
            vectors: [
                [Complex64::from(c), e * s],
                [Complex64::from(s), -e * c],
            ],
        }
    }

    /// {|0⟩, |1⟩}.
    pub fn computational() -> Self {
        Self::from_angles(0.0, 0.0)
    }

    /// {(|0⟩+|1⟩)/√2, (|0⟩−|1⟩)/√2}.
    pub fn plus_minus() -> Self {
        Self::from_angles(std::f64::consts::FRAC_PI_2, 0.0)
    }

    /// vectors[outcome][component].
    pub fn vectors(&self) -> &[[Complex64; 2]; 2] {
        &self.vectors
    }
}

/// Per party, per input: a projective qubit measurement.
#[derive(Debug, Clone)]
pub struct MeasurementSet {
    bases: Vec<Vec<QubitBasis>>,
}

impl MeasurementSet {
    /// Every party needs at least one input; each basis must already be
    /// orthonormal (guaranteed by [`QubitBasis`] construction).
    pub fn new(bases: Vec<Vec<QubitBasis>>) -> Result<Self, QuantumError> {
        if bases.is_empty() {
            return Err(QuantumError::ShapeMismatch("no parties".into()));
        }
        if let Some(p) = bases.iter().position(|inputs| inputs.is_empty()) {
            return Err(QuantumError::ShapeMismatch(format!("party {p} has no inputs")));
        }
        Ok(Self { bases })
    }

    pub fn parties(&self) -> usize {
        self.bases.len()
    }

    pub fn basis(&self, party: usize, input: usize) -> Option<&QubitBasis> {
        self.bases.get(party).and_then(|b| b.get(input))
    }

    pub fn bases(&self) -> &[Vec<QubitBasis>] {
        &self.bases
    }

    /// The binary-outcome scenario this measurement set realizes.
    pub fn scenario(&self) -> Scenario {
        let inputs: Vec<usize> = self.bases.iter().map(|b| b.len()).collect();
        let outputs: Vec<Vec<usize>> = inputs.iter().map(|&n| vec![2; n]).collect();
        Scenario::new(self.bases.len(), inputs, outputs)
            .expect("nonempty binary-outcome shape is always a valid scenario")
    }

    /// Checks that `scenario` has exactly this shape with binary outcomes
    /// everywhere.
    pub fn check_scenario(&self, scenario: &Scenario) -> Result<(), QuantumError> {
        if scenario.parties() != self.parties() {
            return Err(QuantumError::ShapeMismatch(format!(
                "scenario has {} parties, measurement set has {}",
                scenario.parties(),
                self.parties()
            )));
        }
        for (party, bases) in self.bases.iter().enumerate() {
            if scenario.inputs()[party] != bases.len() {
                return Err(QuantumError::ShapeMismatch(format!(
                    "party {party}: scenario has {} inputs, measurement set has {}",
                    scenario.inputs()[party],
                    bases.len()
                )));
            }
            for input in 0..bases.len() {
                let got = scenario.outputs_at(party, input);
                if got != 2 {
                    return Err(QuantumError::NotBinaryOutputs { party, input, got });
                }
            }
        }
        Ok(())
    }
}

/// Bloch angles (θ, φ) per party, per input — the optimizer's search space
/// for measurement bases. θ ∈ [0, π], φ ∈ [0, 2π).
#[derive(Debug, Clone, PartialEq)]
pub struct AngleParametrization {
    angles: Vec<Vec<(f64, f64)>>,
}

impl AngleParametrization {
    pub fn new(angles: Vec<Vec<(f64, f64)>>) -> Result<Self, QuantumError> {
        if angles.is_empty() {
            return Err(QuantumError::ShapeMismatch("no parties".into()));
        }
        for (party, inputs) in angles.iter().enumerate() {
            if inputs.is_empty() {
                return Err(QuantumError::ShapeMismatch(format!("party {party} has no inputs")));
            }
            for (input, &(theta, phi)) in inputs.iter().enumerate() {
                if !(0.0..=std::f64::consts::PI).contains(&theta) {
                    return Err(QuantumError::AngleRange {
                        party,
                        input,
                        detail: format!("θ = {theta} outside [0, π]"),
                    });
                }
                if !(0.0..std::f64::consts::TAU).contains(&phi) {
                    return Err(QuantumError::AngleRange {
                        party,
                        input,
                        detail: format!("φ = {phi} outside [0, 2π)"),
                    });
                }
            }
        }
        Ok(Self { angles })
    }

    /// All-zero angles (computational basis everywhere) in the given shape:
    /// `inputs[i]` measurement settings for party `i`.
    pub fn zero(inputs: &[usize]) -> Result<Self, QuantumError> {
        Self::new(inputs.iter().map(|&n| vec![(0.0, 0.0); n]).collect())
    }

    /// The analytic two-party construction behind the golden-ratio model:
    /// input 0 ↦ {(|0⟩±|1⟩)/√2}, input 1 ↦ computational, both parties.
    pub fn hardy() -> Self {
        let per_party = vec![(std::f64::consts::FRAC_PI_2, 0.0), (0.0, 0.0)];
        Self {
            angles: vec![per_party.clone(), per_party],
        }
    }

    pub fn angles(&self) -> &[Vec<(f64, f64)>] {
        &self.angles
    }

    pub fn parties(&self) -> usize {
        self.angles.len()
    }

    pub fn to_measurements(&self) -> MeasurementSet {
        MeasurementSet {
            bases: self
                .angles
                .iter()
                .map(|inputs| {
                    inputs
                        .iter()
                        .map(|&(theta, phi)| QubitBasis::from_angles(theta, phi))
                        .collect()
                })
                .collect(),
        }
    }

    fn dim(&self) -> usize {
        2 * self.angles.iter().map(Vec::len).sum::<usize>()
    }

    fn flatten(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.dim());
        for inputs in &self.angles {
            for &(theta, phi) in inputs {
                out.push(theta);
                out.push(phi);
            }
        }
        out
    }

    /// Rebuild from a flat unconstrained vector, wrapping each (θ, φ) pair
    /// back onto the Bloch sphere: θ is reduced mod 2π and reflected into
    /// [0, π] (with φ shifted by π when reflected), φ reduced mod 2π.
    fn from_flat(shape: &[usize], flat: &[f64]) -> Self {
        let mut angles = Vec::with_capacity(shape.len());
        let mut it = flat.iter();
        for &n in shape {
            let mut per_party = Vec::with_capacity(n);
            for _ in 0..n {
                let raw_theta = *it.next().expect("flat vector matches shape");
                let raw_phi = *it.next().expect("flat vector matches shape");
                per_party.push(wrap_bloch(raw_theta, raw_phi));
            }
            angles.push(per_party);
        }
        Self { angles }
    }
}

/// Reduce an unconstrained (θ, φ) to θ ∈ [0, π], φ ∈ [0, 2π), describing
/// the same basis.
fn wrap_bloch(theta: f64, phi: f64) -> (f64, f64) {
    let tau = std::f64::consts::TAU;
    let mut t = theta.rem_euclid(tau);
    let mut p = phi;
    if t > std::f64::consts::PI {
        t = tau - t;
        p += std::f64::consts::PI;
    }
    (t, p.rem_euclid(tau))
}

// ---------------------------------------------------------------------------
// Born rule
// ---------------------------------------------------------------------------

/// A float-valued behavior in the canonical index order of its scenario.
/// The exact counterpart is [`Behavior`]; conversion goes through
/// [`FloatBehavior::rationalize`].
#[derive(Debug, Clone)]
pub struct FloatBehavior {
    pub scenario: Scenario,
    pub kind: BehaviorKind,
    pub values: Vec<f64>,
}

impl FloatBehavior {
    pub fn value(&self, a: &[usize], x: &[usize]) -> Result<f64, QuantumError> {
        Ok(self.values[self.scenario.canonical_index(a, x)?])
    }

    /// Round every entry to the nearest rational with denominator at most
    /// `max_denominator`, clamp the tiny negative float noise to zero, and
    /// renormalize exactly (globally for joint, per context for
    /// conditional). Entries more than [`PROBABILITY_RANGE_TOLERANCE`]
    /// outside [0,1] are rejected rather than silently clamped.
    pub fn rationalize(&self, max_denominator: u64) -> Result<Behavior, QuantumError> {
        if max_denominator == 0 {
            return Err(QuantumError::BadParameter("zero denominator cap".into()));
        }
        let mut values = Vec::with_capacity(self.values.len());
        for (index, &v) in self.values.iter().enumerate() {
            if !v.is_finite() || v < -PROBABILITY_RANGE_TOLERANCE
                || v > 1.0 + PROBABILITY_RANGE_TOLERANCE
            {
                return Err(QuantumError::BadProbability { index, value: v });
            }
            values.push(nearest_rational(v.clamp(0.0, 1.0), max_denominator));
        }
        match self.kind {
            BehaviorKind::Joint => {
                let total: Rat = values.iter().sum();
                if total.is_zero() {
                    return Err(QuantumError::ZeroContextMass { context: 0 });
                }
                for v in &mut values {
                    *v = &*v / &total;
                }
            }
            BehaviorKind::Conditional => {
                let mut offset = 0;
                for (rank, x) in self.scenario.contexts().into_iter().enumerate() {
                    let block = self.scenario.block_size(&x);
                    let total: Rat = values[offset..offset + block].iter().sum();
                    if total.is_zero() {
                        return Err(QuantumError::ZeroContextMass { context: rank });
                    }
                    for v in &mut values[offset..offset + block] {
                        *v = &*v / &total;
                    }
                    offset += block;
                }
            }
        }
        Ok(Behavior::new(self.scenario.clone(), self.kind, values)?)
    }
}

/// Nearest rational to `x` with denominator ≤ `max_den`. The float is
/// first converted to its exact dyadic value, then the continued-fraction
/// convergents are walked with exact integer arithmetic; once the
/// denominator cap is hit, the last convergent and the best
/// semiconvergent are compared exactly.
fn nearest_rational(x: f64, max_den: u64) -> Rat {
    use num_bigint::BigInt;
    let exact = Rat::from_float(x).expect("finite probability");
    let cap = BigInt::from(max_den.max(1));
    if exact.denom() <= &cap {
        return exact;
    }
    let negative = exact.is_negative();
    let target = exact.abs();
    let one = BigInt::from(1);
    let (mut p0, mut q0) = (BigInt::from(0), one.clone());
    let (mut p1, mut q1) = (one.clone(), BigInt::from(0));
    let mut remainder = target.clone();
    loop {
        let a = remainder.floor().to_integer();
        let q2 = &a * &q1 + &q0;
        if q2 > cap {
            // Largest k with k·q1 + q0 ≤ cap gives the best semiconvergent.
            let k = (&cap - &q0) / &q1;
            let semi = Rat::new(&k * &p1 + &p0, &k * &q1 + &q0);
            let conv = Rat::new(p1.clone(), q1.clone());
            let best = if q1.is_zero() || (&conv - &target).abs() > (&semi - &target).abs() {
                semi
            } else {
                conv
            };
            return if negative { -best } else { best };
        }
        let p2 = &a * &p1 + &p0;
        let frac = &remainder - Rat::from_integer(a);
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
        if frac.is_zero() {
            let r = Rat::new(p1, q1);
            return if negative { -r } else { r };
        }
        remainder = frac.recip();
    }
}

/// p(a⃗|x⃗) = |⟨⊗ᵢ basisᵢ^{xᵢ,aᵢ} | Ψ⟩|² for every context and outcome, in
/// canonical index order. Each context block is checked to sum to 1 within
/// [`PROBABILITY_SUM_TOLERANCE`].
pub fn born_conditional(
    state: &StateVector,
    meas: &MeasurementSet,
) -> Result<FloatBehavior, QuantumError> {
    let scenario = meas.scenario();
    if state.parties() != meas.parties() {
        return Err(QuantumError::ShapeMismatch(format!(
            "state has {} parties, measurement set has {}",
            state.parties(),
            meas.parties()
        )));
    }
    let values = born_values(state, meas, &scenario)?;
    Ok(FloatBehavior {
        scenario,
        kind: BehaviorKind::Conditional,
        values,
    })
}

/// Joint behavior p(a⃗, x⃗) = q(x⃗)·p(a⃗|x⃗) with `inputs` supplying q. The
/// input distribution's scenario must match the measurement shape.
pub fn born_joint(
    state: &StateVector,
    meas: &MeasurementSet,
    inputs: &InputDistribution,
) -> Result<FloatBehavior, QuantumError> {
    let cond = born_conditional(state, meas)?;
    meas.check_scenario(&inputs.scenario)?;
    let mut values = cond.values;
    let mut offset = 0;
    for (rank, x) in cond.scenario.contexts().into_iter().enumerate() {
        let q = inputs.values[rank]
            .to_f64()
            .ok_or_else(|| QuantumError::BadParameter("input weight out of float range".into()))?;
        let block = cond.scenario.block_size(&x);
        for v in &mut values[offset..offset + block] {
            *v *= q;
        }
        offset += block;
    }
    Ok(FloatBehavior {
        scenario: cond.scenario,
        kind: BehaviorKind::Joint,
        values,
    })
}

/// Raw Born-rule conditional values in canonical order, with per-context
/// normalization checks.
fn born_values(
    state: &StateVector,
    meas: &MeasurementSet,
    scenario: &Scenario,
) -> Result<Vec<f64>, QuantumError> {
    meas.check_scenario(scenario)?;
    let n = state.parties();
    let dim = state.amps.len();
    let mut values = Vec::with_capacity(scenario.joint_dim());
    for (rank, x) in scenario.contexts().into_iter().enumerate() {
        let block_start = values.len();
        for a in scenario.outcomes_for(&x) {
            // amp = Σ_k ∏_i conj(basis[i][x_i][a_i][bit_i(k)]) ψ_k
            let mut amp = Complex64::ZERO;
            for k in 0..dim {
                let mut w = state.amps[k];
                for i in 0..n {
                    let bit = (k >> (n - 1 - i)) & 1;
                    let b = &meas.bases[i][x[i]].vectors[a[i]][bit];
                    w *= b.conj();
                }
                amp += w;
            }
            let p = amp.norm_sqr();
            if !(-PROBABILITY_RANGE_TOLERANCE..=1.0 + PROBABILITY_RANGE_TOLERANCE).contains(&p) {
                return Err(QuantumError::BadProbability {
                    index: values.len(),
                    value: p,
                });
            }
            values.push(p);
        }
        let total: f64 = values[block_start..].iter().sum();
        if (total - 1.0).abs() > PROBABILITY_SUM_TOLERANCE {
            return Err(QuantumError::ContextNormalization {
                context: rank,
                got: total,
            });
        }
    }
    Ok(values)
}

/// Left-hand side Σ β·p of an inequality on a float behavior. The behavior
/// must live in the inequality's scenario and space.
pub fn evaluate_float(ineq: &Inequality, behavior: &FloatBehavior) -> Result<f64, QuantumError> {
    if ineq.scenario != behavior.scenario {
        return Err(QuantumError::ShapeMismatch(
            "inequality and behavior disagree on the scenario".into(),
        ));
    }
    if ineq.space != behavior.kind {
        return Err(QuantumError::ShapeMismatch(format!(
            "inequality lives in {} space, behavior in {}",
            ineq.space.name(),
            behavior.kind.name()
        )));
    }
    let mut total = 0.0;
    for (beta, p) in ineq.beta.iter().zip(&behavior.values) {
        if !beta.is_zero() {
            let c = beta
                .to_f64()
                .ok_or_else(|| QuantumError::BadParameter("coefficient out of float range".into()))?;
            total += c * p;
        }
    }
    Ok(total)
}

// ---------------------------------------------------------------------------
// Named constructions
// ---------------------------------------------------------------------------

/// Two-qubit state (1/√3)(|01⟩+|10⟩−|11⟩) with, for both parties,
/// input 0 ↦ {(|0⟩±|1⟩)/√2} and input 1 ↦ {|0⟩,|1⟩}. Realizes the
/// paradoxical behavior with p(00|00) = 1/12 while p(01|01), p(10|10) and
/// p(00|11) all vanish.
pub fn hardy_model() -> (StateVector, MeasurementSet) {
    let w = 3f64.sqrt().recip();
    let state = StateVector::new(
        2,
        vec![
            Complex64::ZERO,
            Complex64::from(w),
            Complex64::from(w),
            Complex64::from(-w),
        ],
    )
    .expect("fixed two-qubit state");
    (state, AngleParametrization::hardy().to_measurements())
}

/// N-party state (1/√(N+1))(|0…01⟩+…+|10…0⟩−|1…1⟩) with, for every party,
/// input 0 ↦ {(|0⟩±|1⟩)/√2} and input 1 ↦ {|0⟩,|1⟩}.
pub fn psi_n_model(n_parties: usize) -> Result<(StateVector, MeasurementSet), QuantumError> {
    if n_parties < 2 {
        return Err(QuantumError::BadParameter(format!(
            "need at least 2 parties, got {n_parties}"
        )));
    }
    if n_parties > MAX_PARTIES {
        return Err(QuantumError::TooManyParties(n_parties));
    }
    let dim = 1usize << n_parties;
    let w = ((n_parties + 1) as f64).sqrt().recip();
    let mut amps = vec![Complex64::ZERO; dim];
    for j in 0..n_parties {
        amps[1usize << (n_parties - 1 - j)] = Complex64::from(w);
    }
    amps[dim - 1] = Complex64::from(-w);
    let state = StateVector::new(n_parties, amps)?;
    let per_party = vec![QubitBasis::plus_minus(), QubitBasis::computational()];
    let meas = MeasurementSet::new(vec![per_party; n_parties])?;
    Ok((state, meas))
}

/// Two parties with `n` inputs each: the two-qubit state of [`hardy_model`]
/// with the input-0 basis reused for input 0 and the input-1 basis reused
/// for every input 1..n−1.
pub fn two_n_two_model(n: usize) -> Result<(StateVector, MeasurementSet), QuantumError> {
    if n < 2 {
        return Err(QuantumError::BadParameter(format!("need n ≥ 2 inputs, got {n}")));
    }
    let (state, _) = hardy_model();
    let mut per_party = vec![QubitBasis::plus_minus()];
    per_party.resize(n, QubitBasis::computational());
    let meas = MeasurementSet::new(vec![per_party.clone(), per_party])?;
    Ok((state, meas))
}

// ---------------------------------------------------------------------------
// Derivative-free violation search
// ---------------------------------------------------------------------------

/// State side of the optimizer's search space.
#[derive(Debug, Clone)]
pub enum StateFamily {
    /// Keep this state fixed; only measurement angles vary.
    Fixed(StateVector),
    /// cos(α)|0…0⟩ + sin(α)|1…1⟩ with α as one extra search parameter.
    /// Combined with free local measurement angles this reaches every pure
    /// two-qubit state up to local unitaries.
    SchmidtPair,
}

/// Search space: initial measurement angles (restart 0 starts exactly
/// here; further restarts draw random angles) plus the state family.
#[derive(Debug, Clone)]
pub struct SearchSpace {
    pub seed_angles: AngleParametrization,
    pub family: StateFamily,
}

/// Optimizer knobs. `budget` is the number of objective evaluations each
/// restart may spend beyond its initial point; zero means "evaluate the
/// starting point only".
#[derive(Debug, Clone)]
pub struct OptimizeOptions {
    pub restarts: usize,
    pub budget: usize,
    pub seed: u64,
}

impl Default for OptimizeOptions {
    fn default() -> Self {
        Self {
            restarts: DEFAULT_RESTARTS,
            budget: DEFAULT_BUDGET,
            seed: DEFAULT_SEED,
        }
    }
}

/// Outcome of a violation search.
#[derive(Debug, Clone)]
pub struct OptimizeReport {
    /// Largest left-hand-side value found (compare against the
    /// inequality's bound for a violation).
    pub best_value: f64,
    pub best_angles: AngleParametrization,
    pub best_state: StateVector,
    /// Restart that produced the best value (ties go to the lowest index).
    pub best_restart: usize,
    /// Total objective evaluations across all restarts.
    pub evaluations: usize,
}

struct Objective<'a> {
    beta: Vec<f64>,
    scenario: &'a Scenario,
    space: BehaviorKind,
    /// Input weights by context rank (joint space only).
    input_weights: Option<Vec<f64>>,
    shape: Vec<usize>,
    family: &'a StateFamily,
    parties: usize,
}

impl Objective<'_> {
    fn dim(&self) -> usize {
        let angle_dim = 2 * self.shape.iter().sum::<usize>();
        match self.family {
            StateFamily::Fixed(_) => angle_dim,
            StateFamily::SchmidtPair => angle_dim + 1,
        }
    }

    /// LHS value at a flat parameter vector; −∞ on numerically invalid
    /// points so the simplex walks away from them.
    fn eval(&self, flat: &[f64]) -> f64 {
        let (angle_flat, state) = match self.family {
            StateFamily::Fixed(ref s) => (flat, s.clone()),
            StateFamily::SchmidtPair => {
                let (alpha, rest) = flat.split_last().expect("dim ≥ 1");
                match StateVector::schmidt_pair(self.parties, *alpha) {
                    Ok(s) => (rest, s),
                    Err(_) => return f64::NEG_INFINITY,
                }
            }
        };
        let angles = AngleParametrization::from_flat(&self.shape, angle_flat);
        let meas = angles.to_measurements();
        let values = match born_values(&state, &meas, self.scenario) {
            Ok(v) => v,
            Err(_) => return f64::NEG_INFINITY,
        };
        let mut total = 0.0;
        match (&self.space, &self.input_weights) {
            (BehaviorKind::Conditional, _) => {
                for (b, p) in self.beta.iter().zip(&values) {
                    total += b * p;
                }
            }
            (BehaviorKind::Joint, Some(weights)) => {
                let mut offset = 0;
                for (rank, x) in self.scenario.contexts().into_iter().enumerate() {
                    let block = self.scenario.block_size(&x);
                    for (b, p) in self.beta[offset..offset + block]
                        .iter()
                        .zip(&values[offset..offset + block])
                    {
                        total += weights[rank] * b * p;
                    }
                    offset += block;
                }
            }
            (BehaviorKind::Joint, None) => unreachable!("joint objective carries weights"),
        }
        total
    }
}

/// Maximize the inequality's left-hand side over measurement angles (and
/// the state-family parameter, if any) with a multi-restart
/// simplex-reflection search.
///
/// Contract: the returned value is the best objective sample actually
/// evaluated (monotone best-so-far, never extrapolated), the whole run is
/// deterministic given `options.seed`, and ties across restarts go to the
/// lowest restart index. Restart 0 starts exactly at `space.seed_angles`
/// (and α = π/4 for the Schmidt family); later restarts draw uniform
/// random starting points. A zero budget therefore reports the seed
/// point's own value.
///
/// Joint-space inequalities need `inputs` (the experimenter's input
/// distribution); conditional-space ones must leave it out.
pub fn optimize_violation(
    ineq: &Inequality,
    inputs: Option<&InputDistribution>,
    space: &SearchSpace,
    options: &OptimizeOptions,
) -> Result<OptimizeReport, QuantumError> {
    let scenario = &ineq.scenario;
    let shape: Vec<usize> = scenario.inputs().to_vec();
    if space.seed_angles.parties() != scenario.parties()
        || space
            .seed_angles
            .angles()
            .iter()
            .map(Vec::len)
            .ne(shape.iter().copied())
    {
        return Err(QuantumError::ShapeMismatch(
            "seed angles do not match the inequality's scenario".into(),
        ));
    }
    for (party, &n) in shape.iter().enumerate() {
        for input in 0..n {
            let got = scenario.outputs_at(party, input);
            if got != 2 {
                return Err(QuantumError::NotBinaryOutputs { party, input, got });
            }
        }
    }
    let input_weights = match (ineq.space, inputs) {
        (BehaviorKind::Joint, Some(q)) => {
            if q.scenario != *scenario {
                return Err(QuantumError::ShapeMismatch(
                    "input distribution scenario mismatch".into(),
                ));
            }
            Some(
                q.values
                    .iter()
                    .map(|v| {
                        v.to_f64().ok_or_else(|| {
                            QuantumError::BadParameter("input weight out of float range".into())
                        })
                    })
                    .collect::<Result<Vec<f64>, _>>()?,
            )
        }
        (BehaviorKind::Joint, None) => {
            return Err(QuantumError::BadParameter(
                "joint-space search needs an input distribution".into(),
            ))
        }
        (BehaviorKind::Conditional, None) => None,
        (BehaviorKind::Conditional, Some(_)) => {
            return Err(QuantumError::BadParameter(
                "conditional-space search takes no input distribution".into(),
            ))
        }
    };
    if let StateFamily::Fixed(ref s) = space.family {
        if s.parties() != scenario.parties() {
            return Err(QuantumError::ShapeMismatch(
                "fixed state party count mismatches the scenario".into(),
            ));
        }
    }
    let objective = Objective {
        beta: ineq
            .beta
            .iter()
            .map(|b| {
                b.to_f64().ok_or_else(|| {
                    QuantumError::BadParameter("coefficient out of float range".into())
                })
            })
            .collect::<Result<Vec<f64>, _>>()?,
        scenario,
        space: ineq.space,
        input_weights,
        shape: shape.clone(),
        family: &space.family,
        parties: scenario.parties(),
    };
    let restarts = options.restarts.max(1);
    let mut seed_point = space.seed_angles.flatten();
    if matches!(space.family, StateFamily::SchmidtPair) {
        seed_point.push(std::f64::consts::FRAC_PI_4);
    }

    let runs: Vec<(f64, Vec<f64>, usize)> = (0..restarts)
        .into_par_iter()
        .map(|restart| {
            let start = if restart == 0 {
                seed_point.clone()
            } else {
                random_start(&objective, mix_seed(options.seed, restart as u64))
            };
            let (value, point, evals) = nelder_mead_max(
                |p| objective.eval(p),
                &start,
                options.budget,
                mix_seed(options.seed, (restart as u64) | (1 << 63)),
            );
            (value, point, evals)
        })
        .collect();

    let mut best_restart = 0;
    for (i, run) in runs.iter().enumerate() {
        if run.0 > runs[best_restart].0 {
            best_restart = i;
        }
    }
    let (best_value, ref best_point, _) = runs[best_restart];
    let evaluations = runs.iter().map(|r| r.2).sum();

    let (angle_flat, best_state) = match space.family {
        StateFamily::Fixed(ref s) => (best_point.as_slice(), s.clone()),
        StateFamily::SchmidtPair => {
            let (alpha, rest) = best_point.split_last().expect("dim ≥ 1");
            (rest, StateVector::schmidt_pair(scenario.parties(), *alpha)?)
        }
    };
    Ok(OptimizeReport {
        best_value,
        best_angles: AngleParametrization::from_flat(&shape, angle_flat),
        best_state,
        best_restart,
        evaluations,
    })
}

fn random_start(objective: &Objective<'_>, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let angle_dim = 2 * objective.shape.iter().sum::<usize>();
    let mut start = Vec::with_capacity(objective.dim());
    for slot in 0..angle_dim {
        if slot % 2 == 0 {
            start.push(rng.gen_range(0.0..std::f64::consts::PI));
        } else {
            start.push(rng.gen_range(0.0..std::f64::consts::TAU));
        }
    }
    if matches!(objective.family, StateFamily::SchmidtPair) {
        start.push(rng.gen_range(0.0..std::f64::consts::FRAC_PI_2));
    }
    start
}

/// Derive a stream seed from a master seed (splitmix64 finalizer).
fn mix_seed(master: u64, stream: u64) -> u64 {
    let mut z = master ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Standard Nelder–Mead on −f with a hard evaluation budget (the initial
/// point's evaluation is free, matching the zero-budget contract). Returns
/// the best (value, point) over *all* evaluations plus the evaluation
/// count. The `seed` only perturbs degenerate initial simplexes.
fn nelder_mead_max<F: Fn(&[f64]) -> f64>(
    f: F,
    start: &[f64],
    budget: usize,
    seed: u64,
) -> (f64, Vec<f64>, usize) {
    const REFLECT: f64 = 1.0;
    const EXPAND: f64 = 2.0;
    const CONTRACT: f64 = 0.5;
    const SHRINK: f64 = 0.5;
    const STEP: f64 = 0.35;

    let d = start.len();
    let mut evals = 0usize;
    let mut best_value = f(start);
    let mut best_point = start.to_vec();
    if budget == 0 || d == 0 {
        return (best_value, best_point, evals + 1);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let track = |value: f64, point: &[f64], best_value: &mut f64, best_point: &mut Vec<f64>| {
        if value > *best_value {
            *best_value = value;
            *best_point = point.to_vec();
        }
    };

    // Simplex of d+1 (point, value) pairs, kept sorted best-first.
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(d + 1);
    simplex.push((start.to_vec(), best_value));
    for i in 0..d {
        if evals >= budget {
            break;
        }
        let mut p = start.to_vec();
        p[i] += STEP * (1.0 + 0.01 * rng.gen_range(-1.0..1.0));
        let v = f(&p);
        evals += 1;
        track(v, &p, &mut best_value, &mut best_point);
        simplex.push((p, v));
    }
    if simplex.len() < d + 1 {
        return (best_value, best_point, evals + 1);
    }

    while evals < budget {
        simplex.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap_or(std::cmp::Ordering::Equal));
        let spread = simplex[0].1 - simplex[d].1;
        if spread.abs() < 1e-13 && simplex_diameter(&simplex) < 1e-9 {
            break;
        }
        // Centroid of all but the worst.
        let mut centroid = vec![0.0; d];
        for (p, _) in &simplex[..d] {
            for (c, x) in centroid.iter_mut().zip(p) {
                *c += x;
            }
        }
        for c in &mut centroid {
            *c /= d as f64;
        }
        let worst = simplex[d].clone();
        let reflected: Vec<f64> = centroid
            .iter()
            .zip(&worst.0)
            .map(|(c, w)| c + REFLECT * (c - w))
            .collect();
        let fr = f(&reflected);
        evals += 1;
        track(fr, &reflected, &mut best_value, &mut best_point);

        if fr > simplex[0].1 {
            // Try to expand past the reflection.
            if evals < budget {
                let expanded: Vec<f64> = centroid
                    .iter()
                    .zip(&worst.0)
                    .map(|(c, w)| c + EXPAND * (c - w))
                    .collect();
                let fe = f(&expanded);
                evals += 1;
                track(fe, &expanded, &mut best_value, &mut best_point);
                simplex[d] = if fe > fr { (expanded, fe) } else { (reflected, fr) };
            } else {
                simplex[d] = (reflected, fr);
            }
        } else if fr > simplex[d - 1].1 {
            simplex[d] = (reflected, fr);
        } else {
            // Contract toward the centroid, outside or inside.
            let toward = if fr > worst.1 { &reflected } else { &worst.0 };
            let contracted: Vec<f64> = centroid
                .iter()
                .zip(toward)
                .map(|(c, t)| c + CONTRACT * (t - c))
                .collect();
            let fc = f(&contracted);
            evals += 1;
            track(fc, &contracted, &mut best_value, &mut best_point);
            if fc > worst.1.max(fr) {
                simplex[d] = (contracted, fc);
            } else {
                // Shrink everything toward the best vertex.
                let anchor = simplex[0].0.clone();
                for (p, v) in simplex.iter_mut().skip(1) {
                    for (x, a) in p.iter_mut().zip(&anchor) {
                        *x = a + SHRINK * (*x - a);
                    }
                    if evals >= budget {
                        break;
                    }
                    *v = f(p);
                    evals += 1;
                    track(*v, p, &mut best_value, &mut best_point);
                }
            }
        }
    }
    (best_value, best_point, evals + 1)
}

fn simplex_diameter(simplex: &[(Vec<f64>, f64)]) -> f64 {
    let mut max = 0f64;
    for (p, _) in &simplex[1..] {
        let dist = p
            .iter()
            .zip(&simplex[0].0)
            .map(|(a, b)| (a - b).powi(2))
            .sum::<f64>()
            .sqrt();
        max = max.max(dist);
    }
    max
}

// ---------------------------------------------------------------------------
// Maximally-entangled scan
// ---------------------------------------------------------------------------

/// Per-grid-point result of [`maximally_entangled_scan`].
#[derive(Debug, Clone)]
pub struct ScanEntry {
    pub l: Rat,
    /// 1-based row id of the most-violated family.
    pub best_row: usize,
    /// Largest (LHS − bound) over all rows.
    pub best_violation: f64,
    /// Whether the best violation exceeds [`VIOLATION_THRESHOLD`].
    pub violated: bool,
    /// (row id, best LHS − bound) for every row.
    pub per_row: Vec<(usize, f64)>,
}

/// For each ℓ in the grid (h = 1−3ℓ): evaluate every row of the
/// shared-source facet table and maximize each over projective qubit
/// measurements on the fixed maximally entangled two-qubit state, under a
/// uniform input distribution. Reports the per-row and per-ℓ maxima of
/// LHS − bound.
///
/// Only the published family representatives are searched: the other
/// members of each relabeling orbit act on the quantum side as input,
/// outcome, and party relabelings of the same state and measurement set,
/// which the free Bloch angles (and the swap symmetry of the state)
/// already range over.
///
/// Rows are evaluated individually rather than through the strict
/// domain-checked path, so grid points on the closure of the table's
/// domain (notably the ℓ = 1/4 measurement-independence limit, where the
/// rows stay finite and valid) can be scanned; a genuine evaluation
/// failure in any row still aborts.
pub fn maximally_entangled_scan(
    table: &FacetTable,
    l_grid: &[Rat],
    options: &OptimizeOptions,
) -> Result<Vec<ScanEntry>, QuantumError> {
    let scenario = crate::facet_tables::table_scenario();
    let uniform = InputDistribution::uniform(scenario.clone());
    let mut out = Vec::with_capacity(l_grid.len());
    for l in l_grid {
        let values = SymbolValues::for_l(l.clone());
        let mut rows = evaluate_rows(table, &values)
            .into_iter()
            .collect::<Result<Vec<Inequality>, TableError>>()?;
        // Published rows fix a sign convention, not an orientation; flip
        // each one to the direction that actually bounds the polytope
        // (all-nonpositive positivity rows are stated reversed) so that
        // "LHS − bound > 0" genuinely means a point outside.
        let params = crate::scenario::MdlParams::new(
            l.clone(),
            Rat::from_integer(1.into()) - Rat::from_integer(3.into()) * l,
        );
        let hull = crate::polytope::mdl_vertices(
            &scenario,
            &params,
            crate::polytope::ProductMode::Dedupe,
            &crate::polytope::SizeLimits::default(),
        )
        .map_err(|e| QuantumError::BadParameter(format!("vertex enumeration failed: {e}")))?;
        for (i, ineq) in rows.iter_mut().enumerate() {
            let report = crate::lp::check_inequality(
                &ineq.beta,
                &ineq.bound,
                &hull.vertices,
                scenario.joint_dim() - 1,
            );
            if !report.valid {
                return Err(QuantumError::BadParameter(format!(
                    "row {} bounds the polytope in neither orientation at ℓ = {l}",
                    i + 1
                )));
            }
            if report.orientation_flipped {
                for b in &mut ineq.beta {
                    *b = -b.clone();
                }
                ineq.bound = -ineq.bound.clone();
            }
        }
        let per_row: Vec<(usize, f64)> = rows
            .par_iter()
            .enumerate()
            .map(|(i, ineq)| {
                let row_id = i + 1;
                let space = SearchSpace {
                    seed_angles: AngleParametrization::hardy(),
                    family: StateFamily::Fixed(StateVector::maximally_entangled()),
                };
                let row_options = OptimizeOptions {
                    restarts: options.restarts,
                    budget: options.budget,
                    seed: mix_seed(options.seed, row_id as u64),
                };
                let report = optimize_violation(ineq, Some(&uniform), &space, &row_options)?;
                let bound = ineq
                    .bound
                    .to_f64()
                    .ok_or_else(|| QuantumError::BadParameter("bound out of float range".into()))?;
                Ok((row_id, report.best_value - bound))
            })
            .collect::<Result<_, QuantumError>>()?;
        let &(best_row, best_violation) = per_row
            .iter()
            .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal))
            .expect("table has rows");
        out.push(ScanEntry {
            l: l.clone(),
            best_row,
            best_violation,
            violated: best_violation > VIOLATION_THRESHOLD,
            per_row,
        });
    }
    Ok(out)
}
