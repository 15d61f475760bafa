//! Arbitrary-precision ground truth for J_nu(x), plus the fractional-order
//! helpers J_{±1/3} and K_{1/3} needed by the Watson transition formulas.
//!
//! Two independent routes are kept alive on purpose: the ascending power
//! series (works for any real order) and a normalized Miller backward
//! recurrence (integer order). Where both apply they must agree, and
//! `exact_j` enforces that on every integer-order call.

use crate::hp::{bits_for_digits, digits_for_bits, hp};
use crate::types::{Error, Result};
use rug::float::Constant;
use rug::Float;

/// Hard cap on requested digits.
pub const DIGITS_CAP: u32 = 200;
/// Hard cap on working digits after guard digits are added. Queries whose
/// guard requirement blows past this (x in the tens of millions) are refused;
/// the asymptotic expansions are the only path there.
pub const WORKING_DIGITS_CAP: u32 = 1400;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleMethod {
    PowerSeries,
    BackwardRecurrence,
}

#[derive(Debug, Clone)]
pub struct OracleValue {
    pub value: Float,
    pub achieved_digits: u32,
    pub method: OracleMethod,
}

impl OracleValue {
    pub fn to_f64(&self) -> f64 {
        self.value.to_f64()
    }
}

/// Guard digits against the alternating-series cancellation: the series for
/// J_nu(x) loses up to ~0.434*x digits near nu ~ 0; 0.87*x is a 2x safety
/// factor on that.
fn guard_digits(x: f64) -> u32 {
    (0.87 * x).ceil() as u32 + 10
}

/// Whether `exact_j` can serve this query without tripping a cap. Lets
/// callers refuse a whole batch up front instead of failing partway.
pub fn in_range(x: f64, digits: u32) -> bool {
    digits >= 1 && digits <= DIGITS_CAP && digits + guard_digits(x) <= WORKING_DIGITS_CAP
}

fn check_inputs(nu: f64, x: f64, digits: u32) -> Result<()> {
    if !nu.is_finite() || !x.is_finite() || x < 0.0 {
        return Err(Error::InvalidInput(format!(
            "oracle requires finite nu and x >= 0, got nu={nu}, x={x}"
        )));
    }
    if digits == 0 || digits > DIGITS_CAP {
        return Err(Error::CapExceeded(format!(
            "requested {digits} digits, cap is {DIGITS_CAP}"
        )));
    }
    Ok(())
}

/// Ascending power series sum_k (-1)^k (x/2)^(nu+2k) / (k! Gamma(nu+k+1)) at
/// the given working precision. Returns the sum and the decimal digits lost
/// to cancellation (log10 of max partial term over result).
fn series_j_raw(nu: f64, x: f64, work_bits: u32) -> (Float, u32, u32) {
    if x == 0.0 {
        let v = if nu == 0.0 { 1.0 } else { 0.0 };
        return (hp(work_bits, v), 0, 1);
    }
    let half_x = hp(work_bits, x) / 2u32;
    let nu_hp = hp(work_bits, nu);
    // t0 = (x/2)^nu / Gamma(nu+1), in log space so nu=350 does not overflow
    // the exponent computation path.
    let ln_t0 = half_x.clone().ln() * &nu_hp - (nu_hp.clone() + 1u32).gamma().ln();
    let mut term = ln_t0.exp();
    let q = half_x.clone() * &half_x;
    let mut sum = term.clone();
    let mut max_abs = term.clone().abs();
    let mut k: u32 = 0;
    loop {
        let denom = hp(work_bits, (k + 1) as f64) * (nu_hp.clone() + hp(work_bits, (k + 1) as f64));
        term = -(term * &q) / denom;
        sum += &term;
        let ta = term.clone().abs();
        if ta > max_abs {
            max_abs = ta.clone();
        }
        k += 1;
        let kf = k as f64;
        let past_peak = (x / 2.0) * (x / 2.0) < (kf + 1.0) * (nu + kf + 1.0);
        if past_peak {
            // |sum| threshold normally triggers; the max_abs one guarantees
            // termination if the sum cancels to ~0.
            let tiny = ta <= sum.clone().abs() >> (work_bits - 2)
                || ta <= max_abs.clone() >> (2 * work_bits);
            if tiny || term.is_zero() {
                break;
            }
        }
        if k > 2_000_000 {
            break;
        }
    }
    let loss = if sum.is_zero() {
        digits_for_bits(work_bits)
    } else {
        let ratio = max_abs / sum.clone().abs();
        ratio.to_f64().log10().max(0.0).ceil() as u32
    };
    (sum, loss, k + 1)
}

/// Power-series route for real order nu >= (or fractional negative) at the
/// requested accuracy, retrying with more working precision if cancellation
/// ate into the target.
fn series_j(nu: f64, x: f64, digits: u32) -> Result<OracleValue> {
    let mut work_digits = digits + guard_digits(x);
    for _ in 0..3 {
        if work_digits > WORKING_DIGITS_CAP {
            return Err(Error::CapExceeded(format!(
                "series for J_{nu}({x}) needs {work_digits} working digits, cap is {WORKING_DIGITS_CAP}; \
                 use the asymptotic expansions instead"
            )));
        }
        let bits = bits_for_digits(work_digits);
        let (sum, loss, _terms) = series_j_raw(nu, x, bits);
        let achieved = work_digits.saturating_sub(loss + 3);
        if achieved >= digits {
            return Ok(OracleValue {
                value: sum,
                achieved_digits: achieved,
                method: OracleMethod::PowerSeries,
            });
        }
        work_digits = work_digits + (digits - achieved) + 10;
    }
    Err(Error::CapExceeded(format!(
        "series for J_{nu}({x}) did not reach {digits} digits"
    )))
}

/// Normalized Miller backward recurrence route, integer order only.
/// Start index is nu + max(40, ceil(10*sqrt(x))), pushed higher until the
/// trial solution at the start is estimated to sit `work_digits` below J_n.
pub fn miller_j(n: u32, x: f64, digits: u32) -> Result<OracleValue> {
    check_inputs(n as f64, x, digits)?;
    if x == 0.0 {
        let bits = bits_for_digits(digits);
        return Ok(OracleValue {
            value: hp(bits, if n == 0 { 1.0 } else { 0.0 }),
            achieved_digits: digits,
            method: OracleMethod::BackwardRecurrence,
        });
    }
    let work_digits = digits + guard_digits(x);
    if work_digits > WORKING_DIGITS_CAP {
        return Err(Error::CapExceeded(format!(
            "recurrence for J_{n}({x}) needs {work_digits} working digits, cap is {WORKING_DIGITS_CAP}"
        )));
    }
    let bits = bits_for_digits(work_digits);
    // |J_m(x)| <= (x/2)^m / m!, so this bounds the depth of decay at m.
    let log10_bound = |m: f64| -> f64 {
        let ln10 = std::f64::consts::LN_10;
        (m * (x / 2.0).ln() - ln_gamma_f64(m + 1.0)) / ln10
    };
    let mut start = n + 40u32.max((10.0 * x.sqrt()).ceil() as u32);
    let needed = -(work_digits as f64 + 10.0);
    while log10_bound(start as f64) > needed {
        start += 32;
    }
    if start % 2 == 1 {
        start += 1;
    }
    let xh = hp(bits, x);
    let mut f_up = hp(bits, 0.0); // f_{k+1}
    let mut f_cur = hp(bits, 1.0e-30); // f_k, arbitrary seed
    let mut even_sum = hp(bits, 0.0); // sum of f_{2j}, j >= 1
    let mut target = hp(bits, 0.0);
    if start == n {
        target = f_cur.clone();
    }
    even_sum += &f_cur; // start index is even and >= 2
    for k in (1..=start).rev() {
        let f_down = Float::with_val(bits, 2 * k) / &xh * &f_cur - &f_up;
        f_up = f_cur;
        f_cur = f_down;
        let idx = k - 1;
        if idx == n {
            target = f_cur.clone();
        }
        if idx > 0 && idx % 2 == 0 {
            even_sum += &f_cur;
        }
    }
    // normalization by J_0(x) + 2 sum_j J_{2j}(x) = 1; f_cur now holds f_0
    let norm = f_cur + even_sum * 2u32;
    let value = target / norm;
    Ok(OracleValue {
        value,
        achieved_digits: work_digits.saturating_sub(guard_digits(x) / 2),
        method: OracleMethod::BackwardRecurrence,
    })
}

// f64 lgamma via Stirling with argument shifting; only used for start-index
// estimates, not for values.
fn ln_gamma_f64(mut t: f64) -> f64 {
    let mut shift = 0.0;
    while t < 20.0 {
        shift -= t.ln();
        t += 1.0;
    }
    let ln2pi = (2.0 * std::f64::consts::PI).ln();
    let inv = 1.0 / t;
    let inv2 = inv * inv;
    (t - 0.5) * t.ln() - t
        + 0.5 * ln2pi
        + inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 / 1260.0))
        + shift
}

/// Exact J_nu(x) to `digits` decimal digits via the ascending power series,
/// cross-checked for integer nu by the normalized backward recurrence.
pub fn exact_j(nu: f64, x: f64, digits: u32) -> Result<OracleValue> {
    check_inputs(nu, x, digits)?;
    if nu < 0.0 {
        return Err(Error::InvalidInput(format!(
            "exact_j requires nu >= 0, got {nu}"
        )));
    }
    let mut primary = series_j(nu, x, digits)?;
    let is_integer = nu.fract() == 0.0 && nu <= u32::MAX as f64;
    if is_integer && x > 0.0 {
        let alt = miller_j(nu as u32, x, digits)?;
        let agreement = agreement_digits(&primary.value, &alt.value);
        // the dual-route invariant: shrink the claim to what both routes
        // support rather than overstating it.
        primary.achieved_digits = primary.achieved_digits.min(agreement);
        if primary.achieved_digits < digits {
            return Err(Error::CapExceeded(format!(
                "series/recurrence routes for J_{nu}({x}) agree to only {} digits, {digits} requested",
                primary.achieved_digits
            )));
        }
    }
    Ok(primary)
}

/// Decimal digits to which two high-precision values agree.
pub fn agreement_digits(a: &Float, b: &Float) -> u32 {
    let diff = Float::with_val(a.prec(), a - b).abs();
    if diff.is_zero() {
        return digits_for_bits(a.prec());
    }
    let scale = a.clone().abs().max(&b.clone().abs());
    if scale.is_zero() {
        return 0;
    }
    // log10 in precision: the ratio itself can sit far below f64's exponent
    // range when both routes carry hundreds of guard digits
    let rel = diff / scale;
    let d = -rel.log10().to_f64();
    if d.is_finite() && d > 0.0 {
        d.floor() as u32
    } else {
        0
    }
}

/// J_{±1/3}(w) for the Watson above-order formula, series range w in [0, 50].
pub fn exact_j_fractional_small(order: f64, w: f64, digits: u32) -> Result<OracleValue> {
    if order != 1.0 / 3.0 && order != -1.0 / 3.0 {
        return Err(Error::InvalidInput(format!(
            "fractional helper only serves order ±1/3, got {order}"
        )));
    }
    if !(0.0..=50.0).contains(&w) {
        return Err(Error::OutOfRange(format!(
            "J_(±1/3) series helper requires w in [0, 50], got {w}; \
             Watson's formula is only used near the transition"
        )));
    }
    if digits == 0 || digits > DIGITS_CAP {
        return Err(Error::CapExceeded(format!(
            "requested {digits} digits, cap is {DIGITS_CAP}"
        )));
    }
    if w == 0.0 && order < 0.0 {
        return Err(Error::OutOfRange(
            "J_(-1/3) diverges as (w/2)^(-1/3)/Gamma(2/3) at w=0".into(),
        ));
    }
    series_j(order, w, digits)
}

/// Modified Bessel I_nu(w): same series as J but without sign alternation.
fn series_i(nu: f64, w: f64, work_bits: u32) -> Float {
    let half = hp(work_bits, w) / 2u32;
    let nu_hp = hp(work_bits, nu);
    let ln_t0 = half.clone().ln() * &nu_hp - (nu_hp.clone() + 1u32).gamma().ln();
    let mut term = ln_t0.exp();
    let q = half.clone() * &half;
    let mut sum = term.clone();
    let mut k: u32 = 0;
    loop {
        let denom = hp(work_bits, (k + 1) as f64) * (nu_hp.clone() + hp(work_bits, (k + 1) as f64));
        term = term * &q / denom;
        sum += &term;
        k += 1;
        if term <= sum.clone() >> (work_bits - 2) {
            break;
        }
        if k > 2_000_000 {
            break;
        }
    }
    sum
}

/// K_{1/3}(w) via K_nu = pi (I_{-nu} - I_nu) / (2 sin(nu pi)); the I's grow
/// like e^w while K decays like e^-w, so the subtraction costs ~0.87*w digits
/// — covered by the same guard rule as the J series.
pub fn exact_k_third(w: f64, digits: u32) -> Result<OracleValue> {
    if !(w > 0.0 && w <= 700.0) {
        return Err(Error::OutOfRange(format!(
            "K_(1/3) helper requires w in (0, 700], got {w}"
        )));
    }
    if digits == 0 || digits > DIGITS_CAP {
        return Err(Error::CapExceeded(format!(
            "requested {digits} digits, cap is {DIGITS_CAP}"
        )));
    }
    let work_digits = digits + guard_digits(w);
    if work_digits > WORKING_DIGITS_CAP {
        return Err(Error::CapExceeded(format!(
            "K_(1/3)({w}) needs {work_digits} working digits, cap is {WORKING_DIGITS_CAP}"
        )));
    }
    let bits = bits_for_digits(work_digits);
    let i_minus = series_i(-1.0 / 3.0, w, bits);
    let i_plus = series_i(1.0 / 3.0, w, bits);
    let pi = Float::with_val(bits, Constant::Pi);
    let sin_third_pi = (pi.clone() / 3u32).sin();
    let k = pi * (i_minus - i_plus) / (sin_third_pi * 2u32);
    Ok(OracleValue {
        value: k,
        achieved_digits: digits,
        method: OracleMethod::PowerSeries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rug::ops::Pow;

    #[test]
    fn j0_at_zero_is_one() {
        let v = exact_j(0.0, 0.0, 30).unwrap();
        assert_eq!(v.to_f64(), 1.0);
    }

    #[test]
    fn tiny_argument_matches_leading_term() {
        // J_10(1e-8) ~ (x/2)^10 / 10!
        let v = exact_j(10.0, 1e-8, 30).unwrap();
        let lead = hp(256, 5e-9).pow(10) / hp(256, 3628800.0);
        // relative correction is (x/2)^2/(nu+1) ~ 2e-18, so ~17 digits
        let agree = agreement_digits(&v.value, &lead);
        assert!(agree >= 16, "agreement only {agree} digits");
    }

    #[test]
    fn dual_route_agreement_at_the_transition() {
        let s = series_j(300.0, 295.0, 30).unwrap();
        let m = miller_j(300, 295.0, 30).unwrap();
        let agree = agreement_digits(&s.value, &m.value);
        assert!(agree >= 25, "routes agree to only {agree} digits");
        // and the combined front door accepts it
        let v = exact_j(300.0, 295.0, 30).unwrap();
        assert!(v.achieved_digits >= 30);
        // spot value from an independent high-precision evaluation
        assert!((v.to_f64() - 0.02721505688138078).abs() < 1e-15);
    }

    #[test]
    fn oracle_refuses_huge_arguments() {
        assert!(matches!(
            exact_j(1.0e6, 3.2e7, 20),
            Err(Error::CapExceeded(_))
        ));
    }

    #[test]
    fn fractional_range_gate() {
        assert!(matches!(
            exact_j_fractional_small(1.0 / 3.0, 60.0, 20),
            Err(Error::OutOfRange(_))
        ));
        assert!(matches!(
            exact_j_fractional_small(0.5, 1.0, 20),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn fractional_cross_path_agreement() {
        // +1/3 goes through the same series machinery as exact_j with nu=1/3.
        let a = exact_j_fractional_small(1.0 / 3.0, 1.0, 30).unwrap();
        let b = exact_j(1.0 / 3.0, 1.0, 30).unwrap();
        assert!(agreement_digits(&a.value, &b.value) >= 28);
    }

    #[test]
    fn k_third_precision_doubling() {
        let a = exact_k_third(1.0, 30).unwrap();
        let b = exact_k_third(1.0, 60).unwrap();
        assert!(agreement_digits(&a.value, &b.value) >= 29);
    }

    #[test]
    fn k_third_large_argument_decay() {
        // K_(1/3)(w) ~ sqrt(pi/(2w)) e^-w for large w; ratio -> 1 within 1%.
        let v = exact_k_third(50.0, 30).unwrap().to_f64();
        let asym = (std::f64::consts::PI / 100.0).sqrt() * (-50.0f64).exp();
        assert!((v / asym - 1.0).abs() < 0.01);
    }

    #[test]
    fn k_third_small_argument_divergence() {
        // K_(1/3)(w) ~ 0.5 Gamma(1/3) (2/w)^(1/3) as w -> 0.
        let v = exact_k_third(0.001, 30).unwrap().to_f64();
        let gamma_third = hp(128, 1.0 / 3.0).gamma().to_f64();
        let lead = 0.5 * gamma_third * (2.0 / 0.001f64).powf(1.0 / 3.0);
        // next term is O((w/2)^(2/3)) ~ 1% at w = 0.001
        assert!((v / lead - 1.0).abs() < 0.02);
    }
}
