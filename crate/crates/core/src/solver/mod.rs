//! Stable matchings: direct search, and the route from a stable fractional
//! matching of the Leontief market to a stable integral one.

pub mod constraint;
pub mod direct;
pub mod fractional;

pub use constraint::{
    apply_stable_transformations, build_constraint_system, extract_integral_solution,
    stable_transformation_chain, Column, ConstraintSystem, Row, TransformationKind, TransformationStep,
};
pub use direct::find_stable_matching;
pub use fractional::{
    available_to, leontief_set, verify_fractional_stability, verify_pseudo_stability, FractionalMatching,
    FractionalReport, FractionalViolation,
};

use num_rational::BigRational;

use crate::balance::{acceptable_set_matrix, is_balanced, primitive_set_matrix, Certificate, DEFAULT_CAP};
use crate::error::{Error, Result};
use crate::model::{Market, Matching};
use crate::prefs::{
    decompose_by_components, decompose_by_sets, is_additive, is_complementary, lift_matching,
    recompose_by_sets, DecomposedMarket,
};
use crate::scalar::ExactScalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    /// Complete search over one acceptable set (or none) per firm.
    Direct,
    /// Round a supplied stable fractional matching.
    Pipeline,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Decompose {
    /// Search the market as given, i.e. over the siblings of the
    /// decomposition by acceptable sets.
    Sets,
    /// Search the decomposition by complementarity components, then lift.
    Components,
}

#[derive(Clone, Debug)]
pub struct SolveOptions<'a> {
    pub strategy: Strategy,
    pub decompose: Decompose,
    pub fractional: Option<&'a FractionalMatching<BigRational>>,
    pub cap: usize,
}

impl Default for SolveOptions<'_> {
    fn default() -> Self {
        SolveOptions {
            strategy: Strategy::Direct,
            decompose: Decompose::Sets,
            fractional: None,
            cap: DEFAULT_CAP,
        }
    }
}

/// Which existence theorems' hypotheses the market meets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hypotheses {
    pub complementary: bool,
    pub additive: bool,
    pub acceptable_balanced: Certificate,
    /// Only computed when every firm is complementary.
    pub primitive_balanced: Option<Certificate>,
}

impl Hypotheses {
    pub fn of(m: &Market, cap: usize) -> Result<Self> {
        let mut complementary = true;
        let mut additive = true;
        for f in m.firm_ids() {
            complementary &= is_complementary(m, f)?;
            additive &= is_additive(m, f)?;
        }
        let primitive_balanced =
            if complementary { Some(is_balanced(&primitive_set_matrix(m)?, cap)) } else { None };
        Ok(Hypotheses {
            complementary,
            additive,
            acceptable_balanced: is_balanced(&acceptable_set_matrix(m), cap),
            primitive_balanced,
        })
    }

    /// Complementary preferences with balanced acceptable sets.
    pub fn complementary_balanced(&self) -> bool {
        self.complementary && self.acceptable_balanced.holds()
    }

    /// Complementary preferences with balanced primitive acceptable sets.
    pub fn primitive_balanced(&self) -> bool {
        self.complementary && self.primitive_balanced.as_ref().is_some_and(Certificate::holds)
    }

    /// Additive preferences with balanced acceptable sets.
    pub fn additive_balanced(&self) -> bool {
        self.additive && self.acceptable_balanced.holds()
    }

    pub fn guarantees_existence(&self) -> bool {
        self.complementary_balanced() || self.primitive_balanced() || self.additive_balanced()
    }
}

#[derive(Clone, Debug)]
pub struct SolveReport {
    /// A stable matching of the input market, or `None` when none exists.
    pub matching: Option<Matching>,
    /// Set when the matching was found in a decomposed market and lifted.
    pub decomposed: Option<DecomposedMarket>,
    /// Set when the decomposed market had no stable matching and the
    /// original market was searched instead.
    pub fell_back: bool,
    pub hypotheses: Hypotheses,
    pub pipeline: Option<PipelineReport<BigRational>>,
}

pub fn solve(m: &Market, opts: &SolveOptions<'_>) -> Result<SolveReport> {
    let hypotheses = Hypotheses::of(m, opts.cap)?;
    let mut report =
        SolveReport { matching: None, decomposed: None, fell_back: false, hypotheses, pipeline: None };
    match opts.strategy {
        Strategy::Pipeline => {
            let fm = opts.fractional.ok_or_else(|| {
                Error::InvalidArgument("the pipeline strategy needs a fractional matching".into())
            })?;
            let p = run_pipeline(m, fm, opts.cap)?;
            if p.original == *m {
                if !p.lifted_stable {
                    return Err(Error::MalformedMatching(
                        "lifted matching is not stable in the original market".into(),
                    ));
                }
                report.matching = Some(p.lifted.clone());
            } else {
                report.matching = Some(p.decomposed_matching.clone());
            }
            report.pipeline = Some(p);
        }
        Strategy::Direct => match opts.decompose {
            Decompose::Sets => report.matching = find_stable_matching(m)?,
            Decompose::Components => {
                let d = decompose_by_components(m)?;
                match find_stable_matching(&d.market)? {
                    Some(mu) => {
                        let lifted = lift_matching(&mu, &d)?;
                        if !m.is_stable(&lifted)? {
                            return Err(Error::MalformedMatching(
                                "lifted matching is not stable in the original market".into(),
                            ));
                        }
                        report.matching = Some(lifted);
                    }
                    None => {
                        report.fell_back = true;
                        report.matching = find_stable_matching(m)?;
                    }
                }
                report.decomposed = Some(d);
            }
        },
    }
    Ok(report)
}

#[derive(Clone, Debug)]
pub struct PipelineReport<T> {
    /// The market before decomposition.
    pub original: Market,
    pub decomposed: DecomposedMarket,
    pub system: ConstraintSystem,
    pub balanced: Certificate,
    pub z: Vec<u8>,
    pub steps: Vec<TransformationStep<T>>,
    pub integral: FractionalMatching<T>,
    pub decomposed_matching: Matching,
    pub lifted: Matching,
    pub lifted_stable: bool,
}

/// Pairs a market with its decomposition by acceptable sets. A market
/// whose firms already carry sibling names is recognized as decomposed
/// and merged back.
pub fn leontief_view(m: &Market) -> Result<(Market, DecomposedMarket)> {
    if let Some(pair) = recompose_by_sets(m) {
        return Ok(pair);
    }
    Ok((m.clone(), decompose_by_sets(m)?))
}

/// Build the constraint system of `fm`, extract a 0/1 solution, apply the
/// stable transformations and lift the result to the original market.
/// `fm` lives on the decomposition of `m` (see [`leontief_view`]).
pub fn run_pipeline<T: ExactScalar>(
    m: &Market,
    fm: &FractionalMatching<T>,
    cap: usize,
) -> Result<PipelineReport<T>> {
    let (original, decomposed) = leontief_view(m)?;
    let lm = &decomposed.market;
    let report = verify_fractional_stability(fm, lm)?;
    if !report.is_stable() {
        return Err(Error::MalformedFractional(format!("input is not stable: {}", report.describe(lm))));
    }
    let system = build_constraint_system(fm, lm)?;
    let balanced = system.balance_certificate(cap);
    let z = extract_integral_solution(&system).map_err(|e| match e {
        Error::NoIntegralSolution(msg) => {
            Error::NoIntegralSolution(format!("{msg}; balancedness of B: {balanced:?}"))
        }
        other => other,
    })?;
    let steps = stable_transformation_chain(fm, &z, &system, lm)?;
    let integral = apply_stable_transformations(fm, &z, &system, lm)?;
    let decomposed_matching = integral.to_matching(lm)?;
    let lifted = lift_matching(&decomposed_matching, &decomposed)?;
    let lifted_stable = original.is_stable(&lifted)?;
    Ok(PipelineReport {
        original,
        decomposed,
        system,
        balanced,
        z,
        steps,
        integral,
        decomposed_matching,
        lifted,
        lifted_stable,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    #[test]
    fn direct_strategy_on_the_corpus() {
        let opts = SolveOptions::default();
        assert!(solve(&corpus::triangle(), &opts).unwrap().matching.is_none());
        assert!(solve(&corpus::firm_worker_cycle(), &opts).unwrap().matching.is_none());
        let r = solve(&corpus::three_set_firm(), &opts).unwrap();
        assert!(corpus::three_set_firm().is_stable(&r.matching.unwrap()).unwrap());
    }

    #[test]
    fn hypotheses_of_corpus_markets() {
        let h3 = Hypotheses::of(&corpus::triangle(), DEFAULT_CAP).unwrap();
        assert!(h3.complementary && !h3.acceptable_balanced.holds());
        assert!(!h3.guarantees_existence());
        let h14 = Hypotheses::of(&corpus::additive_overlap(), DEFAULT_CAP).unwrap();
        assert!(!h14.complementary && h14.additive_balanced());
        let h6 = Hypotheses::of(&corpus::covered_odd_cycle(), DEFAULT_CAP).unwrap();
        assert!(h6.complementary_balanced());
    }

    #[test]
    fn component_search_lifts() {
        let opts = SolveOptions { decompose: Decompose::Components, ..SolveOptions::default() };
        let m = corpus::relaxed_triangle();
        let r = solve(&m, &opts).unwrap();
        assert!(!r.fell_back);
        assert!(m.is_stable(&r.matching.unwrap()).unwrap());
        assert!(solve(&corpus::additive_overlap(), &opts).is_err());
    }

    #[test]
    fn pipeline_replays_the_appendix() {
        let m = corpus::three_set_firm_split();
        let p = run_pipeline(&m, &corpus::half_integral(), DEFAULT_CAP).unwrap();
        assert_eq!(p.original, corpus::three_set_firm());
        assert_eq!(p.z, vec![1, 0, 0, 1, 0, 1, 1]);
        assert!(p.lifted_stable);
        let expected = Matching::from_names(&p.original, &[("f1", &["w1", "w2", "w3"][..])]).unwrap();
        assert_eq!(p.lifted, expected);
        let missing = SolveOptions { strategy: Strategy::Pipeline, ..SolveOptions::default() };
        assert!(matches!(solve(&m, &missing), Err(Error::InvalidArgument(_))));
    }
}
