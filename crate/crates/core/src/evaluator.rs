//! Regime classification and uniform dispatch: one entry point returning the
//! best available J_nu(x) with method provenance and an error estimate.

use crate::types::{
    BesselQuery, Error, ExpansionResult, Method, Regime, RegimeTag, Result,
};
use crate::{debye, meissel, oracle, transition};
use std::time::Instant;

/// Dispatch thresholds and per-regime method preference.
#[derive(Debug, Clone, PartialEq)]
pub struct DispatchPolicy {
    /// Transition band half-width c: |x - nu| <= c * nu^(1/3) is transition.
    /// Aligned by default with the epsilon expansion's validity radius so the
    /// band is exactly the set of points the transition methods accept.
    pub transition_halfwidth: f64,
    /// x < small_arg_coeff * sqrt(nu + 1) routes to the oracle series.
    pub small_arg_coeff: f64,
    /// Truncation orders handed to each expansion.
    pub meissel_first_terms: u32,
    pub meissel_second_terms: u32,
    pub meissel_third_terms: u32,
    pub debye_terms: u32,
    pub epsilon_terms: u32,
}

impl Default for DispatchPolicy {
    fn default() -> Self {
        DispatchPolicy {
            transition_halfwidth: transition::EPSILON_RADIUS,
            small_arg_coeff: 0.5,
            meissel_first_terms: 8,
            meissel_second_terms: 4,
            meissel_third_terms: 7,
            debye_terms: 4,
            epsilon_terms: 24,
        }
    }
}

/// Deterministic partition of (nu, x) space. Boundaries are half-open; ties
/// on the band edge resolve toward the transition methods.
pub fn classify(nu: f64, x: f64, policy: &DispatchPolicy) -> Result<Regime> {
    if !nu.is_finite() || !x.is_finite() || nu <= 0.0 || x < 0.0 {
        return Err(Error::InvalidInput(format!(
            "classify requires finite nu > 0 and x >= 0, got nu={nu}, x={x}"
        )));
    }
    let scale = nu.powf(1.0 / 3.0);
    let margin = (x - nu) / scale;
    let tag = if x < policy.small_arg_coeff * (nu + 1.0).sqrt() {
        RegimeTag::SmallArgument
    } else if margin < -policy.transition_halfwidth {
        RegimeTag::Below
    } else if margin > policy.transition_halfwidth {
        RegimeTag::Above
    } else if x < nu {
        RegimeTag::TransitionBelow
    } else {
        RegimeTag::TransitionAbove
    };
    Ok(Regime { tag, margin })
}

fn oracle_result(query: &BesselQuery, method: Method, started: Instant) -> Result<ExpansionResult> {
    let digits = query.policy.resolved_oracle_digits();
    let v = oracle::exact_j(query.order, query.argument, digits)?;
    Ok(ExpansionResult {
        value: v.to_f64(),
        method,
        terms_used: 0,
        est_error: Some(10f64.powi(-(v.achieved_digits as i32))),
        rigorous: true,
        precision_loss: false,
        elapsed: started.elapsed(),
    })
}

/// Run the preference list for a regime: skip methods that error out with a
/// regime/validity complaint, fall through on precision loss, and keep the
/// flagged result as a last resort if everything else fails too.
fn try_chain(
    query: &BesselQuery,
    chain: &[&dyn Fn(&BesselQuery) -> Result<ExpansionResult>],
) -> Result<ExpansionResult> {
    let mut flagged: Option<ExpansionResult> = None;
    for f in chain {
        match f(query) {
            Ok(r) if !r.precision_loss => return Ok(r),
            Ok(r) => {
                if flagged.is_none() {
                    flagged = Some(r);
                }
            }
            Err(Error::InvalidInput(e)) => return Err(Error::InvalidInput(e)),
            Err(_) => continue,
        }
    }
    // oracle fallback when within its cap
    let started = Instant::now();
    if let Ok(r) = oracle_result(query, Method::Oracle, started) {
        return Ok(r);
    }
    flagged.ok_or(Error::NoMethodApplicable {
        nu: query.order,
        x: query.argument,
    })
}

/// Evaluate with a caller-chosen method, no dispatch or fallback. The
/// method's own validity checks still apply.
pub fn eval_j_method(
    query: &BesselQuery,
    method: Method,
    policy: &DispatchPolicy,
) -> Result<ExpansionResult> {
    let started = Instant::now();
    match method {
        Method::MeisselFirst => meissel::meissel_first(query, policy.meissel_first_terms),
        Method::MeisselSecond => meissel::meissel_second(query, policy.meissel_second_terms),
        Method::MeisselThird => {
            if query.argument != query.order {
                return Err(Error::WrongRegime {
                    method: Method::MeisselThird,
                    detail: "requires x = nu exactly".into(),
                });
            }
            meissel::meissel_third(query.order, policy.meissel_third_terms)
        }
        Method::DebyeBelow => debye::debye_below(query, policy.debye_terms),
        Method::DebyeAbove => debye::debye_above(query, policy.debye_terms),
        Method::Epsilon => transition::epsilon_expansion(query, policy.epsilon_terms),
        Method::WatsonBelow => transition::watson_below(query),
        Method::WatsonAbove => transition::watson_above(query),
        Method::Oracle | Method::SmallArgSeries => oracle_result(query, method, started),
    }
}

/// Unified front door: classify, dispatch, fall back.
pub fn eval_j(query: &BesselQuery, policy: &DispatchPolicy) -> Result<ExpansionResult> {
    let started = Instant::now();
    let nu = query.order;
    let x = query.argument;
    if x == 0.0 {
        // J_0(0) = 1, J_nu(0) = 0: exact by the series definition
        return Ok(ExpansionResult {
            value: if nu == 0.0 { 1.0 } else { 0.0 },
            method: Method::SmallArgSeries,
            terms_used: 1,
            est_error: Some(0.0),
            rigorous: true,
            precision_loss: false,
            elapsed: started.elapsed(),
        });
    }
    if nu == 0.0 {
        // order zero has no asymptotic-in-nu path; the large-argument form
        // of the Second expansion covers it, the oracle covers small x
        if x >= 10.0 {
            return meissel::meissel_second(query, policy.meissel_second_terms);
        }
        return oracle_result(query, Method::SmallArgSeries, started);
    }
    let regime = classify(nu, x, policy)?;
    if x == nu {
        // exact diagonal: Meissel Third is the designated method
        return meissel::meissel_third(nu, policy.meissel_third_terms);
    }
    match regime.tag {
        RegimeTag::SmallArgument => oracle_result(query, Method::SmallArgSeries, started),
        RegimeTag::Below => try_chain(
            query,
            &[
                &|q| meissel::meissel_first(q, policy.meissel_first_terms),
                &|q| debye::debye_below(q, policy.debye_terms),
                &|q| transition::epsilon_expansion(q, policy.epsilon_terms),
                &|q| transition::watson_below(q),
            ],
        ),
        RegimeTag::Above => try_chain(
            query,
            &[
                &|q| meissel::meissel_second(q, policy.meissel_second_terms),
                &|q| debye::debye_above(q, policy.debye_terms),
                &|q| transition::epsilon_expansion(q, policy.epsilon_terms),
                &|q| transition::watson_above(q),
            ],
        ),
        RegimeTag::TransitionBelow => try_chain(
            query,
            &[
                &|q| transition::epsilon_expansion(q, policy.epsilon_terms),
                &|q| transition::watson_below(q),
                &|q| meissel::meissel_first(q, policy.meissel_first_terms),
            ],
        ),
        RegimeTag::TransitionAbove => try_chain(
            query,
            &[
                &|q| transition::epsilon_expansion(q, policy.epsilon_terms),
                &|q| transition::watson_above(q),
                &|q| meissel::meissel_second(q, policy.meissel_second_terms),
            ],
        ),
    }
}
