//! Limited-detection locality: behaviors with an explicit nondetection
//! outcome, the exact parameter mapping into the measurement-dependent
//! box, postselection on all-detected rounds, and a seeded sampler for
//! randomized inclusion testing.
//!
//! The nondetection event ∅ is represented as one extra outcome per party
//! and input — always the **last** outcome index of the enlarged alphabet.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use num_traits::{One, Signed, Zero};

use crate::ratio::{format_rat, Rat};
use crate::scenario::{Behavior, BehaviorKind, MdlParams, Scenario, ScenarioError};

/// Denominator of the dyadic grid used for all random draws, so sampled
/// behaviors stay exact rationals with bounded denominators.
pub const DYADIC_DENOMINATOR: u64 = 1 << 20;

#[derive(Debug, Error)]
pub enum DetectionError {
    #[error("detection bounds must satisfy 0 < η_min ≤ η_max ≤ 1, got [{0}, {1}]")]
    InvalidDetectionParams(String, String),
    #[error("input context {context} retains no detection probability")]
    AllLost { context: usize },
    #[error("lossy behavior must be joint-space, got {0}")]
    NotJoint(&'static str),
    #[error("behavior scenario is not the ∅-enlargement of the base scenario: {0}")]
    ShapeMismatch(String),
    #[error("hidden-variable component {index}: {detail}")]
    BadComponent { index: usize, detail: String },
    #[error("bad parameter: {0}")]
    BadParameter(String),
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
}

/// Per-round detection-probability bounds
/// η_min ≤ p(detect | input, λ) ≤ η_max. Requiring η_min > 0 keeps the
/// interval a strict subset of [0, 1].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DetectionParams {
    eta_min: Rat,
    eta_max: Rat,
}

impl DetectionParams {
    pub fn new(eta_min: Rat, eta_max: Rat) -> Result<Self, DetectionError> {
        if eta_min <= Rat::zero() || eta_min > eta_max || eta_max > Rat::one() {
            return Err(DetectionError::InvalidDetectionParams(
                format_rat(&eta_min),
                format_rat(&eta_max),
            ));
        }
        Ok(Self { eta_min, eta_max })
    }

    pub fn eta_min(&self) -> &Rat {
        &self.eta_min
    }

    pub fn eta_max(&self) -> &Rat {
        &self.eta_max
    }
}

/// The result of [`map_params`]: the measurement-dependence box absorbing
/// the detection slack, plus whether the upper bound had to be clamped.
#[derive(Debug, Clone)]
pub struct MappedParams {
    pub params: MdlParams,
    /// True when the raw h·(η_max/η_min)² exceeded the largest meaningful
    /// upper bound 1−(K−1)ℓ′ and was clamped down to it.
    pub clamped: bool,
}

/// The input box [ℓ, h] must intersect the probability simplex over the
/// scenario's K contexts: 0 ≤ ℓ ≤ h ≤ 1 with Kℓ ≤ 1 ≤ Kh. (Unlike the
/// polytope layer this deliberately does not require ℓ to sit above the
/// effective floor 1−(K−1)h; a loose ℓ merely never binds.)
fn check_box_feasible(scenario: &Scenario, params: &MdlParams) -> Result<(), DetectionError> {
    let k = Rat::from_integer((scenario.num_contexts() as i64).into());
    if params.l.is_negative()
        || params.l > params.h
        || params.h > Rat::one()
        || &k * &params.l > Rat::one()
        || &k * &params.h < Rat::one()
    {
        return Err(DetectionError::BadParameter(format!(
            "input box [{}, {}] misses the {}-context probability simplex",
            format_rat(&params.l),
            format_rat(&params.h),
            scenario.num_contexts()
        )));
    }
    Ok(())
}

/// Exact parameter mapping ℓ′ = ℓ·(η_min/η_max)², h′ = h·(η_max/η_min)²:
/// every postselected limited-detection behavior with parameters
/// (ℓ, h, η_min, η_max) lies in the measurement-dependent polytope at
/// (ℓ′, h′).
///
/// Over K input contexts no box constraint above 1−(K−1)ℓ′ can ever be
/// active (the polytopes coincide), so h′ beyond that ceiling is clamped
/// to it and flagged rather than rejected.
pub fn map_params(
    scenario: &Scenario,
    params: &MdlParams,
    det: &DetectionParams,
) -> Result<MappedParams, DetectionError> {
    check_box_feasible(scenario, params)?;
    let ratio = &det.eta_min / &det.eta_max;
    let ratio_sq = &ratio * &ratio;
    let l = &params.l * &ratio_sq;
    let h = &params.h / &ratio_sq;
    let k = scenario.num_contexts();
    let ceiling = Rat::one() - Rat::from_integer((k as i64 - 1).into()) * &l;
    let clamped = h > ceiling;
    let params = MdlParams::new(l, if clamped { ceiling } else { h });
    Ok(MappedParams { params, clamped })
}

/// The scenario with one extra ∅ outcome appended to every (party, input)
/// alphabet.
pub fn enlarged_scenario(base: &Scenario) -> Scenario {
    let parties = base.parties();
    let inputs = base.inputs().to_vec();
    let outputs = (0..parties)
        .map(|i| (0..inputs[i]).map(|x| base.outputs_at(i, x) + 1).collect())
        .collect();
    Scenario::new(parties, inputs, outputs).expect("enlarging outcomes keeps the scenario valid")
}

/// A joint behavior over the ∅-enlarged alphabet of a base scenario.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LossyBehavior {
    base: Scenario,
    behavior: Behavior,
}

impl LossyBehavior {
    /// `behavior` must be a joint behavior on exactly
    /// [`enlarged_scenario`]`(&base)`.
    pub fn new(base: Scenario, behavior: Behavior) -> Result<Self, DetectionError> {
        if behavior.kind != BehaviorKind::Joint {
            return Err(DetectionError::NotJoint(behavior.kind.name()));
        }
        let expected = enlarged_scenario(&base);
        if behavior.scenario != expected {
            return Err(DetectionError::ShapeMismatch(format!(
                "expected one extra outcome per party and input over the {}-party base",
                base.parties()
            )));
        }
        behavior.validate()?;
        Ok(Self { base, behavior })
    }

    pub fn base(&self) -> &Scenario {
        &self.base
    }

    pub fn behavior(&self) -> &Behavior {
        &self.behavior
    }

    /// Probability mass on fully-detected outcome tuples, per input
    /// context rank.
    pub fn detected_mass(&self) -> Result<Vec<Rat>, DetectionError> {
        let mut out = Vec::with_capacity(self.base.num_contexts());
        for x in self.base.contexts() {
            let mut total = Rat::zero();
            for a in self.base.outcomes_for(&x) {
                total += self.behavior.value(&a, &x)?;
            }
            out.push(total);
        }
        Ok(out)
    }
}

/// Embed a loss-free joint behavior into the enlarged alphabet (∅ gets
/// zero mass everywhere).
pub fn embed(behavior: &Behavior) -> Result<LossyBehavior, DetectionError> {
    if behavior.kind != BehaviorKind::Joint {
        return Err(DetectionError::NotJoint(behavior.kind.name()));
    }
    let base = behavior.scenario.clone();
    let big = enlarged_scenario(&base);
    let mut values = vec![Rat::zero(); big.joint_dim()];
    for (a, x) in base.index_pairs() {
        values[big.canonical_index(&a, &x)?] = behavior.value(&a, &x)?.clone();
    }
    let behavior = Behavior::new(big, BehaviorKind::Joint, values)?;
    LossyBehavior::new(base, behavior)
}

/// Postselect on every party detecting: restrict to ∅-free outcome tuples
/// and renormalize by the total detected mass (global conditioning of the
/// joint input/outcome distribution, not per context — postselection is
/// allowed to reshape the input marginals, which is exactly the
/// measurement-dependence mechanism). Errors with [`DetectionError::AllLost`]
/// if any input context keeps zero detected mass.
pub fn postselect(lossy: &LossyBehavior) -> Result<Behavior, DetectionError> {
    let masses = lossy.detected_mass()?;
    if let Some(context) = masses.iter().position(|m| m.is_zero()) {
        return Err(DetectionError::AllLost { context });
    }
    let total: Rat = masses.iter().sum();
    let base = lossy.base.clone();
    let mut values = Vec::with_capacity(base.joint_dim());
    for (a, x) in base.index_pairs() {
        values.push(lossy.behavior.value(&a, &x)? / &total);
    }
    Ok(Behavior::new(base, BehaviorKind::Joint, values)?)
}

/// One hidden-variable component of a finite-λ limited-detection model.
#[derive(Debug, Clone)]
pub struct LdlComponent {
    /// ρ(λ): nonnegative; all component weights sum to 1.
    pub weight: Rat,
    /// p(x⃗|λ) by context rank; inside the [ℓ, h] box, sums to 1.
    pub inputs: Vec<Rat>,
    /// responses[party][input][outcome] over the enlarged alphabet (last
    /// index = ∅); each distribution sums to 1 and its detected mass lies
    /// in [η_min, η_max].
    pub responses: Vec<Vec<Vec<Rat>>>,
}

/// Build the exact joint lossy behavior
/// p(a⃗, x⃗) = Σ_λ ρ(λ)·p(x⃗|λ)·∏ᵢ p(aᵢ|xᵢ, λ) after validating every
/// component against the box and detection bounds.
pub fn assemble_ldl(
    scenario: &Scenario,
    params: &MdlParams,
    det: &DetectionParams,
    components: &[LdlComponent],
) -> Result<LossyBehavior, DetectionError> {
    check_box_feasible(scenario, params)?;
    if components.is_empty() {
        return Err(DetectionError::BadParameter("no hidden-variable components".into()));
    }
    let big = enlarged_scenario(scenario);
    let contexts = scenario.contexts();
    let k = contexts.len();

    let total_weight: Rat = components.iter().map(|c| c.weight.clone()).sum();
    if !total_weight.is_one() {
        return Err(DetectionError::BadParameter(format!(
            "component weights sum to {}, expected 1",
            format_rat(&total_weight)
        )));
    }
    for (index, c) in components.iter().enumerate() {
        let fail = |detail: String| DetectionError::BadComponent { index, detail };
        if c.weight.is_negative() {
            return Err(fail("negative weight".into()));
        }
        if c.inputs.len() != k {
            return Err(fail(format!("{} input weights for {k} contexts", c.inputs.len())));
        }
        let input_total: Rat = c.inputs.iter().sum();
        if !input_total.is_one() {
            return Err(fail("input distribution does not sum to 1".into()));
        }
        if let Some(q) = c.inputs.iter().find(|q| **q < params.l || **q > params.h) {
            return Err(fail(format!(
                "input weight {} escapes the [{}, {}] box",
                format_rat(q),
                format_rat(&params.l),
                format_rat(&params.h)
            )));
        }
        if c.responses.len() != scenario.parties() {
            return Err(fail("one response table per party required".into()));
        }
        for (party, table) in c.responses.iter().enumerate() {
            if table.len() != scenario.inputs()[party] {
                return Err(fail(format!("party {party}: one response row per input required")));
            }
            for (input, dist) in table.iter().enumerate() {
                let m = scenario.outputs_at(party, input);
                if dist.len() != m + 1 {
                    return Err(fail(format!(
                        "party {party}, input {input}: {} entries for {} outcomes plus ∅",
                        dist.len(),
                        m
                    )));
                }
                if dist.iter().any(|p| p.is_negative()) {
                    return Err(fail(format!("party {party}, input {input}: negative probability")));
                }
                let total: Rat = dist.iter().sum();
                if !total.is_one() {
                    return Err(fail(format!(
                        "party {party}, input {input}: response sums to {}",
                        format_rat(&total)
                    )));
                }
                let detected = Rat::one() - &dist[m];
                if detected < det.eta_min || detected > det.eta_max {
                    return Err(fail(format!(
                        "party {party}, input {input}: detection probability {} outside [{}, {}]",
                        format_rat(&detected),
                        format_rat(&det.eta_min),
                        format_rat(&det.eta_max)
                    )));
                }
            }
        }
    }

    let mut values = vec![Rat::zero(); big.joint_dim()];
    for c in components {
        for (rank, x) in contexts.iter().enumerate() {
            let base_weight = &c.weight * &c.inputs[rank];
            if base_weight.is_zero() {
                continue;
            }
            for a in big.outcomes_for(x) {
                let mut p = base_weight.clone();
                for i in 0..scenario.parties() {
                    p *= &c.responses[i][x[i]][a[i]];
                }
                if !p.is_zero() {
                    values[big.canonical_index(&a, x)?] += p;
                }
            }
        }
    }
    let behavior = Behavior::new(big, BehaviorKind::Joint, values)?;
    LossyBehavior::new(scenario.clone(), behavior)
}

/// Uniform pick from the dyadic grid {lo + k/2²⁰} ∩ [lo, hi].
fn dyadic_in(rng: &mut ChaCha8Rng, lo: &Rat, hi: &Rat) -> Rat {
    debug_assert!(lo <= hi);
    let width = hi - lo;
    let grid = Rat::new(1.into(), (DYADIC_DENOMINATOR as i64).into());
    let steps = (&width / &grid).floor().to_integer();
    let steps: u64 = steps.try_into().unwrap_or(u64::MAX).min(DYADIC_DENOMINATOR);
    if steps == 0 {
        return lo.clone();
    }
    let k = rng.gen_range(0..=steps);
    lo + grid * Rat::from_integer((k as i64).into())
}

/// Random point of the simplex slice {v ∈ [lo, hi]^n : Σv = total},
/// sampled coordinate by coordinate over feasible dyadic sub-intervals.
fn sample_box_simplex(
    rng: &mut ChaCha8Rng,
    n: usize,
    lo: &Rat,
    hi: &Rat,
    total: &Rat,
) -> Vec<Rat> {
    let mut rest = total.clone();
    let mut out = Vec::with_capacity(n);
    for slot in 0..n {
        let remaining = (n - slot - 1) as i64;
        if remaining == 0 {
            out.push(rest.clone());
            break;
        }
        let rem = Rat::from_integer(remaining.into());
        let floor = (&rest - &rem * hi).max(lo.clone());
        let ceil = (&rest - &rem * lo).min(hi.clone());
        let v = dyadic_in(rng, &floor, &ceil);
        rest -= &v;
        out.push(v);
    }
    out
}

/// Draw a random finite-λ limited-detection behavior: `lambda_count`
/// hidden-variable components with random box-constrained input
/// distributions and random per-party responses whose detection
/// probability lies in [η_min, η_max]. Half of the response rows
/// concentrate the detected mass on a single outcome (the deterministic
/// corners the polytope's vertices are built from); the rest spread it
/// over the whole alphabet. Deterministic for a fixed seed.
pub fn sample_ldl_behavior(
    seed: u64,
    scenario: &Scenario,
    params: &MdlParams,
    det: &DetectionParams,
    lambda_count: usize,
) -> Result<LossyBehavior, DetectionError> {
    if lambda_count == 0 {
        return Err(DetectionError::BadParameter("need at least one hidden variable".into()));
    }
    check_box_feasible(scenario, params)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = scenario.num_contexts();

    // Component weights: dyadic draws bounded away from zero, normalized
    // exactly.
    let floor = Rat::new(1.into(), 1024.into());
    let one = Rat::one();
    let raw: Vec<Rat> = (0..lambda_count).map(|_| dyadic_in(&mut rng, &floor, &one)).collect();
    let total: Rat = raw.iter().sum();
    let weights: Vec<Rat> = raw.into_iter().map(|w| w / &total).collect();

    let mut components = Vec::with_capacity(lambda_count);
    for weight in weights {
        let inputs = sample_box_simplex(&mut rng, k, &params.l, &params.h, &Rat::one());
        let mut responses = Vec::with_capacity(scenario.parties());
        for party in 0..scenario.parties() {
            let mut table = Vec::with_capacity(scenario.inputs()[party]);
            for input in 0..scenario.inputs()[party] {
                let m = scenario.outputs_at(party, input);
                let eta = dyadic_in(&mut rng, &det.eta_min, &det.eta_max);
                let mut dist = vec![Rat::zero(); m + 1];
                dist[m] = Rat::one() - &eta;
                if rng.gen_bool(0.5) {
                    let winner = rng.gen_range(0..m);
                    dist[winner] = eta;
                } else {
                    let zero = Rat::zero();
                    let spread = sample_box_simplex(&mut rng, m, &zero, &eta, &eta);
                    dist[..m].clone_from_slice(&spread);
                }
                table.push(dist);
            }
            responses.push(table);
        }
        components.push(LdlComponent { weight, inputs, responses });
    }
    assemble_ldl(scenario, params, det, &components)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::membership;
    use crate::polytope::{mdl_vertices, ProductMode, SizeLimits};
    use crate::ratio::rat;

    fn s222() -> Scenario {
        Scenario::symmetric(2, 2, 2)
    }

    fn params_golden() -> MdlParams {
        MdlParams::new(rat(1, 10), rat(7, 10))
    }

    #[test]
    fn detection_params_are_validated() {
        assert!(DetectionParams::new(rat(1, 2), rat(3, 4)).is_ok());
        assert!(DetectionParams::new(rat(1, 1), rat(1, 1)).is_ok());
        assert!(matches!(
            DetectionParams::new(rat(0, 1), rat(1, 2)),
            Err(DetectionError::InvalidDetectionParams(..))
        ));
        assert!(DetectionParams::new(rat(3, 4), rat(1, 2)).is_err());
        assert!(DetectionParams::new(rat(1, 2), rat(5, 4)).is_err());
    }

    #[test]
    fn map_params_is_identity_for_equal_bounds() {
        let det = DetectionParams::new(rat(9, 10), rat(9, 10)).unwrap();
        let mapped = map_params(&s222(), &params_golden(), &det).unwrap();
        assert_eq!(mapped.params.l, rat(1, 10));
        assert_eq!(mapped.params.h, rat(7, 10));
        assert!(!mapped.clamped);
    }

    #[test]
    fn map_params_matches_the_worked_examples() {
        // ℓ=1/10, h=7/10, η ∈ [4/5, 1]: ℓ′ = 8/125 and the raw
        // h′ = 35/32 > 1 must clamp to 1 − 3ℓ′ = 101/125.
        let det = DetectionParams::new(rat(4, 5), rat(1, 1)).unwrap();
        let mapped = map_params(&s222(), &params_golden(), &det).unwrap();
        assert_eq!(mapped.params.l, rat(8, 125));
        assert!(mapped.clamped);
        assert_eq!(mapped.params.h, rat(101, 125));

        // ℓ=1/10, h=1/4, η ∈ [9/10, 1]: ℓ′ = 81/1000, h′ = 25/81, no clamp.
        let det = DetectionParams::new(rat(9, 10), rat(1, 1)).unwrap();
        let params = MdlParams::new(rat(1, 10), rat(1, 4));
        let mapped = map_params(&s222(), &params, &det).unwrap();
        assert_eq!(mapped.params.l, rat(81, 1000));
        assert_eq!(mapped.params.h, rat(25, 81));
        assert!(!mapped.clamped);
    }

    #[test]
    fn map_params_widens_with_the_detection_ratio() {
        let params = MdlParams::new(rat(1, 10), rat(1, 4));
        let tight = DetectionParams::new(rat(99, 100), rat(1, 1)).unwrap();
        let loose = DetectionParams::new(rat(9, 10), rat(1, 1)).unwrap();
        let a = map_params(&s222(), &params, &tight).unwrap().params;
        let b = map_params(&s222(), &params, &loose).unwrap().params;
        assert!(b.l < a.l && a.l < params.l);
        assert!(b.h > a.h && a.h > params.h);
    }

    #[test]
    fn embed_then_postselect_is_the_identity() {
        // Any loss-free behavior round-trips exactly; use a vertex-style one.
        let s = s222();
        let mut values = vec![Rat::zero(); s.joint_dim()];
        values[s.canonical_index(&[0, 0], &[0, 0]).unwrap()] = rat(1, 10);
        values[s.canonical_index(&[0, 1], &[0, 1]).unwrap()] = rat(1, 10);
        values[s.canonical_index(&[1, 0], &[1, 0]).unwrap()] = rat(1, 10);
        values[s.canonical_index(&[1, 1], &[1, 1]).unwrap()] = rat(7, 10);
        let b = Behavior::new(s, BehaviorKind::Joint, values).unwrap();
        let lossy = embed(&b).unwrap();
        assert_eq!(postselect(&lossy).unwrap(), b);
    }

    #[test]
    fn uniform_independent_loss_postselects_back_to_the_original() {
        // Each party's outcome is independently lost with probability 1/2.
        let s = s222();
        let big = enlarged_scenario(&s);
        let mut values = vec![Rat::zero(); big.joint_dim()];
        let mut base_values = vec![Rat::zero(); s.joint_dim()];
        base_values[s.canonical_index(&[0, 0], &[0, 0]).unwrap()] = rat(1, 10);
        base_values[s.canonical_index(&[0, 1], &[0, 1]).unwrap()] = rat(2, 10);
        base_values[s.canonical_index(&[1, 0], &[1, 0]).unwrap()] = rat(3, 10);
        base_values[s.canonical_index(&[1, 1], &[1, 1]).unwrap()] = rat(4, 10);
        let base = Behavior::new(s.clone(), BehaviorKind::Joint, base_values).unwrap();
        for (a, x) in s.index_pairs() {
            let p = base.value(&a, &x).unwrap().clone();
            if p.is_zero() {
                continue;
            }
            // Distribute p over the 4 loss patterns of the two parties.
            for pattern in 0..4u8 {
                let mut aa = a.clone();
                if pattern & 1 != 0 {
                    aa[0] = 2;
                }
                if pattern & 2 != 0 {
                    aa[1] = 2;
                }
                values[big.canonical_index(&aa, &x).unwrap()] += &p * rat(1, 4);
            }
        }
        let lossy =
            LossyBehavior::new(s, Behavior::new(big, BehaviorKind::Joint, values).unwrap())
                .unwrap();
        assert_eq!(postselect(&lossy).unwrap(), base);
    }

    #[test]
    fn all_lost_context_is_reported() {
        let s = s222();
        let big = enlarged_scenario(&s);
        let mut values = vec![Rat::zero(); big.joint_dim()];
        // Context (0,0): everything lost; other contexts fully detected.
        values[big.canonical_index(&[2, 2], &[0, 0]).unwrap()] = rat(1, 4);
        values[big.canonical_index(&[0, 0], &[0, 1]).unwrap()] = rat(1, 4);
        values[big.canonical_index(&[0, 0], &[1, 0]).unwrap()] = rat(1, 4);
        values[big.canonical_index(&[0, 0], &[1, 1]).unwrap()] = rat(1, 4);
        let lossy =
            LossyBehavior::new(s, Behavior::new(big, BehaviorKind::Joint, values).unwrap())
                .unwrap();
        assert!(matches!(postselect(&lossy), Err(DetectionError::AllLost { context: 0 })));
    }

    #[test]
    fn single_deterministic_component_with_full_detection_is_a_vertex() {
        let s = s222();
        let params = params_golden();
        let det = DetectionParams::new(rat(1, 1), rat(1, 1)).unwrap();
        // Response functions a = x for both parties; inputs at a box vertex.
        let respond = |m: usize, winner: usize| {
            let mut dist = vec![Rat::zero(); m + 1];
            dist[winner] = Rat::one();
            dist
        };
        let component = LdlComponent {
            weight: Rat::one(),
            inputs: vec![rat(1, 10), rat(1, 10), rat(1, 10), rat(7, 10)],
            responses: vec![
                vec![respond(2, 0), respond(2, 1)],
                vec![respond(2, 0), respond(2, 1)],
            ],
        };
        let lossy = assemble_ldl(&s, &params, &det, &[component]).unwrap();
        let detected = postselect(&lossy).unwrap();

        let mut expected = vec![Rat::zero(); s.joint_dim()];
        expected[s.canonical_index(&[0, 0], &[0, 0]).unwrap()] = rat(1, 10);
        expected[s.canonical_index(&[0, 1], &[0, 1]).unwrap()] = rat(1, 10);
        expected[s.canonical_index(&[1, 0], &[1, 0]).unwrap()] = rat(1, 10);
        expected[s.canonical_index(&[1, 1], &[1, 1]).unwrap()] = rat(7, 10);
        assert_eq!(detected.values, expected);

        let vrep = mdl_vertices(&s, &params, ProductMode::Dedupe, &SizeLimits::default())
            .expect("vertex enumeration");
        assert!(vrep.vertices.iter().any(|v| *v == expected));
    }

    #[test]
    fn sampler_is_deterministic_and_validates() {
        let s = s222();
        let params = params_golden();
        let det = DetectionParams::new(rat(4, 5), rat(19, 20)).unwrap();
        let a = sample_ldl_behavior(7, &s, &params, &det, 3).unwrap();
        let b = sample_ldl_behavior(7, &s, &params, &det, 3).unwrap();
        assert_eq!(a, b);
        let c = sample_ldl_behavior(8, &s, &params, &det, 3).unwrap();
        assert_ne!(a, c);
        // Conditioned on the input context, the detected fraction lies in
        // the two-party product window [η_min², η_max²].
        let lo = rat(4, 5) * rat(4, 5);
        let hi = rat(19, 20) * rat(19, 20);
        let inputs = a.behavior().input_marginals().unwrap();
        for (m, q) in a.detected_mass().unwrap().into_iter().zip(inputs) {
            assert!(m >= &lo * &q && m <= &hi * &q, "detected {m} of context mass {q}");
        }
    }

    #[test]
    fn sampled_behaviors_postselect_into_the_mapped_polytope() {
        let s = s222();
        let params = MdlParams::new(rat(1, 8), rat(3, 8));
        let det = DetectionParams::new(rat(9, 10), rat(1, 1)).unwrap();
        let mapped = map_params(&s, &params, &det).unwrap();
        let hull = mdl_vertices(&s, &mapped.params, ProductMode::Dedupe, &SizeLimits::default())
            .expect("vertex enumeration");
        for seed in 0..8u64 {
            let sample = sample_ldl_behavior(seed, &s, &params, &det, 2).unwrap();
            let q = postselect(&sample).unwrap();
            let cert = membership(&q.values, &hull.vertices).expect("membership LP");
            assert!(cert.is_inside(), "seed {seed} escaped the mapped polytope");
        }
    }
}
