//! Debye's steepest-descent expansions below and above the order, with the
//! coefficient polynomials A_0..A_4.
//!
//! The below family is a polynomial in coth^2(alpha_D) with alternating
//! signs; the above family is the same polynomial in cot^2(beta) with all
//! signs positive. The above-order phase is nu tan(beta) - nu beta - pi/4:
//! the printed "tanh alpha" / "beta/4" variants fail the oracle comparison
//! by orders of magnitude, so the hyperbolic/circular slip is corrected here.

use crate::hp::{bits_for_digits, cos_reduced, hp, pi, sin_reduced};
use crate::types::{BesselQuery, Error, ExpansionResult, Method, Result};
use std::time::Instant;

const LOSS_BAND: f64 = 10.0;

/// Coefficients of A_m as a polynomial in t (t = coth^2 alpha below,
/// t = cot^2 beta above), constant term first. Below uses alternating signs,
/// above all-positive — same magnitudes term by term.
const A_POLY: [&[f64]; 5] = [
    &[1.0],
    &[1.0 / 8.0, 5.0 / 24.0],
    &[3.0 / 128.0, 77.0 / 576.0, 385.0 / 3456.0],
    &[5.0 / 1024.0, 1521.0 / 25600.0, 17017.0 / 138240.0, 17017.0 / 248832.0],
    &[
        11513.0 / 92897280.0,
        21023.0 / 9953280.0,
        138919.0 / 19906560.0,
        49049.0 / 5971968.0,
        230945.0 / 71663616.0,
    ],
];

/// A_m(t) with alternating signs (below-order family, t = coth^2 alpha_D).
pub fn debye_a_below(m: usize, t: f64) -> f64 {
    let mut acc = 0.0;
    let mut sign = 1.0;
    let mut tp = 1.0;
    for &c in A_POLY[m] {
        acc += sign * c * tp;
        sign = -sign;
        tp *= t;
    }
    acc
}

/// A_m(t) with all-positive signs (above-order family, t = cot^2 beta).
pub fn debye_a_above(m: usize, t: f64) -> f64 {
    let mut acc = 0.0;
    let mut tp = 1.0;
    for &c in A_POLY[m] {
        acc += c * tp;
        tp *= t;
    }
    acc
}

/// Gamma(m + 1/2) / Gamma(1/2) = (2m-1)!! / 2^m, exact for small m.
fn half_gamma_ratio(m: u32) -> f64 {
    let mut r = 1.0;
    for j in 0..m {
        r *= (j as f64) + 0.5;
    }
    r
}

/// Below-order expansion (x < nu), truncated at m_max <= 4.
pub fn debye_below(query: &BesselQuery, m_max: u32) -> Result<ExpansionResult> {
    let t0 = Instant::now();
    let nu = query.order;
    let x = query.argument;
    if !(nu > 0.0) {
        return Err(Error::InvalidInput(format!("debye_below requires nu > 0, got {nu}")));
    }
    if m_max > 4 {
        return Err(Error::InvalidInput(format!("m_max must be in [0,4], got {m_max}")));
    }
    if !(x > 0.0 && x < nu) {
        return Err(Error::WrongRegime {
            method: Method::DebyeBelow,
            detail: format!("requires 0 < x < nu, got nu={nu}, x={x}"),
        });
    }
    let z = x / nu;
    let precision_loss = 1.0 - z * z < LOSS_BAND * nu.powf(-2.0 / 3.0);

    // exponent nu(tanh alpha - alpha): ~alpha^3/3 cancellation near the
    // transition, done at 40 digits.
    let bits = bits_for_digits(40);
    let zh = hp(bits, x) / hp(bits, nu);
    let s = (hp(bits, 1.0) - zh.clone() * &zh).sqrt(); // tanh alpha
    let alpha = ((s.clone() + 1u32) / &zh).ln();
    let expo = ((s.clone() - &alpha) * hp(bits, nu)).exp();

    let tanh_a = s.to_f64();
    let t = 1.0 / (tanh_a * tanh_a); // coth^2 alpha
    let half_nu_tanh = 0.5 * nu * tanh_a;
    let mut sum = 0.0;
    let mut last = 0.0;
    for m in 0..=m_max {
        last = half_gamma_ratio(m) * debye_a_below(m as usize, t) / half_nu_tanh.powi(m as i32);
        sum += last;
    }
    let amp = 1.0 / (2.0 * std::f64::consts::PI * nu * tanh_a).sqrt();
    let value = expo.to_f64() * amp * sum;
    Ok(ExpansionResult {
        value,
        method: Method::DebyeBelow,
        terms_used: m_max + 1,
        est_error: if m_max == 0 { None } else { Some((last * expo.to_f64() * amp).abs()) },
        rigorous: false,
        precision_loss,
        elapsed: t0.elapsed(),
    })
}

/// Above-order expansion (x > nu), truncated over A_0..A_{m_max}.
pub fn debye_above(query: &BesselQuery, m_max: u32) -> Result<ExpansionResult> {
    let t0 = Instant::now();
    let nu = query.order;
    let x = query.argument;
    if nu < 0.0 {
        return Err(Error::InvalidInput(format!("debye_above requires nu >= 0, got {nu}")));
    }
    if m_max > 4 {
        return Err(Error::InvalidInput(format!("m_max must be in [0,4], got {m_max}")));
    }
    if !(x > nu) {
        return Err(Error::WrongRegime {
            method: Method::DebyeAbove,
            detail: format!("requires x > nu, got nu={nu}, x={x}"),
        });
    }
    let precision_loss = nu > 0.0 && {
        let z = x / nu;
        z * z - 1.0 < LOSS_BAND * nu.powf(-2.0 / 3.0)
    };

    // phase nu tan beta - nu beta - pi/4, in phase_digits precision
    let bits = bits_for_digits(query.policy.phase_digits.max(34));
    let nu_hp = hp(bits, nu);
    let x_hp = hp(bits, x);
    let q_hp = (x_hp.clone() * &x_hp - nu_hp.clone() * &nu_hp).sqrt();
    let beta_hp = (nu_hp.clone() / &x_hp).acos();
    let phase = q_hp - beta_hp * &nu_hp - pi(bits) / 4u32;
    let cosv = cos_reduced(&phase);
    let sinv = sin_reduced(&phase);

    let q = (x * x - nu * nu).sqrt(); // nu tan beta
    let t = (nu / q) * (nu / q); // cot^2 beta
    let half_nu_tan = 0.5 * q;
    let mut cos_sum = 0.0;
    let mut sin_sum = 0.0;
    let mut last = 0.0;
    let mut sign = 1.0;
    for m in 0..=m_max {
        let term = half_gamma_ratio(m) * debye_a_above(m as usize, t) / half_nu_tan.powi(m as i32);
        if m % 2 == 0 {
            cos_sum += sign * term;
        } else {
            sin_sum += sign * term;
            sign = -sign; // (-1)^m' advances once per even/odd pair
        }
        last = term;
    }
    let amp = (2.0 / (std::f64::consts::PI * q)).sqrt();
    let value = amp * (cosv * cos_sum + sinv * sin_sum);
    Ok(ExpansionResult {
        value,
        method: Method::DebyeAbove,
        terms_used: m_max + 1,
        est_error: if m_max == 0 { None } else { Some((last * amp).abs()) },
        rigorous: false,
        precision_loss,
        elapsed: t0.elapsed(),
    })
}
