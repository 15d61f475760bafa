//! Meissel's First, Second and Third expansions, with the coefficient
//! families V_1..V_8, (P_1..P_4, Q_1..Q_4) and lambda_0..lambda_7.
//!
//! Prefactors and phases are evaluated in extended precision (the phase of
//! the Second expansion reaches 1e7 radians at nu=1e6), the series terms in
//! f64; the expansions themselves are plain truncated asymptotic series and
//! est_error is the last-retained-term heuristic.

use crate::hp::{bits_for_digits, cos_reduced, hp, pi};
use crate::types::{BesselQuery, Error, ExpansionResult, Method, Result};
use std::time::Instant;

/// Width of the precision-loss band around z = 1, in units of nu^(-2/3):
/// flagged when |1 - z^2| < 5 * nu^(-2/3). This matches the transition-band
/// half-width of 2.5 nu^(1/3): |x - nu| = 2.5 nu^(1/3) gives |1 - z^2| close
/// to 5 nu^(-2/3), so points outside the transition band are never flagged.
const LOSS_BAND: f64 = 5.0;

/// V_k(z, nu) of the First expansion, k = 1..8. Each scales as nu^-k,
/// vanishes as z -> 0 and blows up as z -> 1-. The k >= 5 signs were
/// re-derived from the Debye polynomial recurrence and Stirling's series
/// (each V_k is checked against that derivation in the tests); commonly
/// circulated listings carry the opposite sign on these four.
pub fn meissel_v(k: usize, z: f64, nu: f64) -> f64 {
    let z2 = z * z;
    let w = 1.0 - z2; // in (0,1) for the below-order regime
    match k {
        1 => ((2.0 + 3.0 * z2) / w.powf(1.5) - 2.0) / (24.0 * nu),
        2 => -(4.0 * z2 + z2 * z2) / (16.0 * nu.powi(2) * w.powi(3)),
        3 => {
            let p = 16.0 - 1512.0 * z2 - 3654.0 * z2 * z2 - 375.0 * z2 * z2 * z2;
            -(p / w.powf(4.5) - 16.0) / (5760.0 * nu.powi(3))
        }
        4 => {
            let p = z2 * (32.0 + z2 * (288.0 + z2 * (232.0 + z2 * 13.0)));
            -p / (128.0 * nu.powi(4) * w.powi(6))
        }
        5 => {
            let p = 256.0
                + z2 * (78720.0
                    + z2 * (1891200.0 + z2 * (4744640.0 + z2 * (1914210.0 + z2 * 67599.0))));
            p / (322560.0 * nu.powi(5) * w.powf(7.5)) - 1.0 / (1260.0 * nu.powi(5))
        }
        6 => {
            let p = 48.0
                + z2 * (2580.0 + z2 * (14884.0 + z2 * (17493.0 + z2 * (4242.0 + z2 * 103.0))));
            -z2 * p / (192.0 * w.powi(9) * nu.powi(6))
        }
        7 => {
            let p = -2048.0
                + z2 * (881664.0
                    + z2 * (99783936.0
                        + z2 * (1135145088.0
                            + z2 * (2884531440.0
                                + z2 * (1965889800.0
                                    + z2 * (318291750.0 + z2 * 5635995.0))))));
            p / (3440640.0 * nu.powi(7) * w.powf(10.5)) + 1.0 / (1680.0 * nu.powi(7))
        }
        8 => {
            let p = 1024.0
                + z2 * (248320.0
                    + z2 * (5095936.0
                        + z2 * (24059968.0
                            + z2 * (34280896.0
                                + z2 * (15252048.0 + z2 * (1765936.0 + z2 * 23797.0))))));
            -z2 * p / (4096.0 * w.powi(12) * nu.powi(8))
        }
        _ => panic!("V_k defined for k = 1..8"),
    }
}

/// First expansion: J_nu(nu z) for z in (0,1), truncated at V_{k_max}.
pub fn meissel_first(query: &BesselQuery, k_max: u32) -> Result<ExpansionResult> {
    let t0 = Instant::now();
    let nu = query.order;
    let x = query.argument;
    if !(nu > 0.0) {
        return Err(Error::InvalidInput(format!("meissel_first requires nu > 0, got {nu}")));
    }
    if k_max > 8 {
        return Err(Error::InvalidInput(format!("k_max must be in [0,8], got {k_max}")));
    }
    let z = query.z();
    if !(z > 0.0 && z < 1.0) {
        return Err(Error::WrongRegime {
            method: Method::MeisselFirst,
            detail: format!("requires 0 < x < nu, got z = {z}"),
        });
    }
    let precision_loss = 1.0 - z * z < LOSS_BAND * nu.powf(-2.0 / 3.0);

    // ln prefactor of Eq-10 form: (nu z)^nu e^(nu s) / (e^nu Gamma(nu+1)
    // (1-z^2)^(1/4) (1+s)^nu), s = sqrt(1-z^2). The nu*ln(nu) ~ lnGamma
    // cancellation is absorbed in 40-digit arithmetic.
    let bits = bits_for_digits(40);
    let zh = hp(bits, x) / hp(bits, nu);
    let one_minus_z2 = hp(bits, 1.0) - zh.clone() * &zh;
    let s = one_minus_z2.clone().sqrt();
    let nu_hp = hp(bits, nu);
    let ln_pre = hp(bits, x).ln() * &nu_hp + s.clone() * &nu_hp
        - &nu_hp
        - (nu_hp.clone() + 1u32).gamma().ln()
        - one_minus_z2.ln() / 4u32
        - (s + 1u32).ln() * &nu_hp;

    let mut v_sum = 0.0;
    let mut last = 0.0;
    for k in 1..=k_max as usize {
        last = meissel_v(k, z, nu);
        v_sum += last;
    }
    let value = (ln_pre - hp(bits, v_sum)).exp().to_f64();
    let est_error = if k_max == 0 { None } else { Some((last * value).abs()) };
    Ok(ExpansionResult {
        value,
        method: Method::MeisselFirst,
        terms_used: k_max,
        est_error,
        rigorous: false,
        precision_loss,
        elapsed: t0.elapsed(),
    })
}

/// Amplitude corrections P_k(nu, x), k = 1..4, written in (nu, x, q) with
/// q = sqrt(x^2 - nu^2) so they stay regular as nu -> 0 (cot beta = nu/q,
/// sec beta = x/nu: the nu powers cancel identically). The k = 4 signs of
/// both families were re-derived from the Debye polynomial recurrence at
/// imaginary argument (see the tests); commonly circulated listings flip
/// them.
pub fn meissel_p(k: usize, nu: f64, x: f64) -> f64 {
    let n2 = nu * nu;
    let x2 = x * x;
    let q2 = x2 - n2;
    match k {
        // cot^6/(16 nu^2) (4 sec^2 + sec^4)
        1 => (x2 * (4.0 * n2 + x2)) / (16.0 * q2.powi(3)),
        // -cot^12/(128 nu^4) (32 sec^2 + 288 sec^4 + 232 sec^6 + 13 sec^8)
        2 => {
            let p = x2 * (32.0 * n2 * n2 * n2 + x2 * (288.0 * n2 * n2 + x2 * (232.0 * n2 + x2 * 13.0)));
            -p / (128.0 * q2.powi(6))
        }
        // cot^18/(192 nu^6) (48 sec^2 + 2580 sec^4 + 14884 sec^6 + 17493 sec^8
        //                    + 4242 sec^10 + 103 sec^12)
        3 => {
            let p = x2
                * (48.0 * n2.powi(5)
                    + x2 * (2580.0 * n2.powi(4)
                        + x2 * (14884.0 * n2.powi(3)
                            + x2 * (17493.0 * n2 * n2 + x2 * (4242.0 * n2 + x2 * 103.0)))));
            p / (192.0 * q2.powi(9))
        }
        // cot^24 sec^2/(4096 nu^8) (1024 + 248320 sec^2 + ... + 23797 sec^14)
        4 => {
            let p = x2
                * (1024.0 * n2.powi(7)
                    + x2 * (248320.0 * n2.powi(6)
                        + x2 * (5095936.0 * n2.powi(5)
                            + x2 * (24059968.0 * n2.powi(4)
                                + x2 * (34280896.0 * n2.powi(3)
                                    + x2 * (15252048.0 * n2 * n2
                                        + x2 * (1765936.0 * n2 + x2 * 23797.0)))))));
            -p / (4096.0 * q2.powi(12))
        }
        _ => panic!("P_k defined for k = 1..4"),
    }
}

/// Phase corrections Q_k for k = 2..4 (same regular parameterization).
/// Q_1's leading nu (tan beta - beta) is handled separately in extended
/// precision; this returns only Q_1's correction term for k = 1.
pub fn meissel_q_correction(k: usize, nu: f64, x: f64) -> f64 {
    let n2 = nu * nu;
    let x2 = x * x;
    let q2 = x2 - n2;
    let q = q2.sqrt();
    match k {
        // -cot^3/(24 nu) (2 + 3 sec^2)
        1 => -(2.0 * n2 + 3.0 * x2) / (24.0 * q2 * q),
        // -cot^9/(5760 nu^3) (16 - 1512 sec^2 - 3654 sec^4 - 375 sec^6)
        2 => {
            let p = 16.0 * n2 * n2 * n2 - x2 * (1512.0 * n2 * n2 + x2 * (3654.0 * n2 + 375.0 * x2));
            -p / (5760.0 * q2.powi(4) * q)
        }
        // -cot^15/(322560 nu^5) (256 + 78720 sec^2 + 1891200 sec^4
        //                        + 4744640 sec^6 + 1914210 sec^8 + 67599 sec^10)
        3 => {
            let p = 256.0 * n2.powi(5)
                + x2 * (78720.0 * n2.powi(4)
                    + x2 * (1891200.0 * n2.powi(3)
                        + x2 * (4744640.0 * n2 * n2 + x2 * (1914210.0 * n2 + x2 * 67599.0))));
            -p / (322560.0 * q2.powi(7) * q)
        }
        // -cot^21/(3440640 nu^7) (881664 sec^2 + ... + 5635995 sec^14 - 2048)
        4 => {
            let p = -2048.0 * n2.powi(7)
                + x2 * (881664.0 * n2.powi(6)
                    + x2 * (99783936.0 * n2.powi(5)
                        + x2 * (1135145088.0 * n2.powi(4)
                            + x2 * (2884531440.0 * n2.powi(3)
                                + x2 * (1965889800.0 * n2 * n2
                                    + x2 * (318291750.0 * n2 + x2 * 5635995.0))))));
            p / (3440640.0 * q2.powi(10) * q)
        }
        _ => panic!("Q_k defined for k = 1..4"),
    }
}

/// Second expansion: J_nu(nu sec beta) = sqrt(2 cot beta / (nu pi))
/// e^-P cos(Q - pi/4), for x > nu, truncated at k_max.
pub fn meissel_second(query: &BesselQuery, k_max: u32) -> Result<ExpansionResult> {
    let t0 = Instant::now();
    let nu = query.order;
    let x = query.argument;
    if nu < 0.0 {
        return Err(Error::InvalidInput(format!("meissel_second requires nu >= 0, got {nu}")));
    }
    if k_max > 4 {
        return Err(Error::InvalidInput(format!("k_max must be in [0,4], got {k_max}")));
    }
    if !(x > nu) {
        return Err(Error::WrongRegime {
            method: Method::MeisselSecond,
            detail: format!("requires x > nu, got nu={nu}, x={x}"),
        });
    }
    let precision_loss = nu > 0.0 && {
        let z = x / nu;
        z * z - 1.0 < LOSS_BAND * nu.powf(-2.0 / 3.0)
    };

    let mut p_sum = 0.0;
    let mut q_small = 0.0;
    let mut last_p = 0.0;
    let mut last_q = 0.0;
    for k in 1..=k_max as usize {
        last_p = meissel_p(k, nu, x);
        last_q = meissel_q_correction(k, nu, x);
        p_sum += last_p;
        q_small += last_q;
    }

    // phase nu(tan beta - beta) - pi/4 at phase_digits working digits, then
    // reduced mod 2pi: at nu=1e6, x=3e7 the raw phase has 8 integer digits.
    let bits = bits_for_digits(query.policy.phase_digits.max(34));
    let nu_hp = hp(bits, nu);
    let x_hp = hp(bits, x);
    let q_hp = (x_hp.clone() * &x_hp - nu_hp.clone() * &nu_hp).sqrt(); // nu tan beta
    let beta_hp = (nu_hp.clone() / &x_hp).acos();
    let phase = q_hp - beta_hp * &nu_hp + hp(bits, q_small) - pi(bits) / 4u32;
    let cosv = cos_reduced(&phase);

    // 2 cot beta / (nu pi) = 2 / (pi sqrt(x^2 - nu^2)), regular at nu = 0
    let q = (x * x - nu * nu).sqrt();
    let amplitude = (2.0 / (std::f64::consts::PI * q)).sqrt();
    let value = amplitude * (-p_sum).exp() * cosv;
    let est_error = if k_max == 0 {
        None
    } else {
        Some((last_p.abs() + last_q.abs()) * amplitude)
    };
    Ok(ExpansionResult {
        value,
        method: Method::MeisselSecond,
        terms_used: k_max,
        est_error,
        rigorous: false,
        precision_loss,
        elapsed: t0.elapsed(),
    })
}

/// lambda_m of the Third expansion as exact rationals (numerator, denominator).
pub const MEISSEL_LAMBDA: [(u64, u64); 8] = [
    (1, 1),
    (1, 60),
    (1, 1400),
    (1, 25200),
    (43, 17_248_000),
    (1213, 7_207_200_000),
    (681_563, 5_721_073_600_000),
    (63_319, 726_485_760_000_000),
];

/// cos(pi (m/3 + 1/6)) at exact rational multiples of pi: the table repeats
/// with period 6 in m and vanishes identically for m = 1 mod 3.
fn cos_sixth(m: u32) -> f64 {
    const HALF_SQRT3: f64 = 0.8660254037844386467637231707529362;
    match m % 6 {
        0 | 5 => HALF_SQRT3,
        1 | 4 => 0.0,
        2 | 3 => -HALF_SQRT3,
        _ => unreachable!(),
    }
}

/// Third expansion: J_n(n) on the exact diagonal, truncated at m_max.
pub fn meissel_third(n: f64, m_max: u32) -> Result<ExpansionResult> {
    let t0 = Instant::now();
    if !(n > 0.0) {
        return Err(Error::InvalidInput(format!("meissel_third requires n > 0, got {n}")));
    }
    if m_max > 7 {
        return Err(Error::InvalidInput(format!("m_max must be in [0,7], got {m_max}")));
    }
    let bits = bits_for_digits(30);
    let mut sum = 0.0;
    let mut last = 0.0;
    let mut used = 0;
    for m in 0..=m_max {
        let c = cos_sixth(m);
        if c == 0.0 {
            continue; // m = 1 mod 3: exactly zero, skipped by construction
        }
        let (num, den) = MEISSEL_LAMBDA[m as usize];
        let lambda = num as f64 / den as f64;
        let a = 2.0 * m as f64 / 3.0 + 4.0 / 3.0;
        let gamma = hp(bits, a).gamma().to_f64();
        let pow = (6.0 / n).powf(2.0 * m as f64 / 3.0 + 1.0 / 3.0);
        last = lambda * gamma * pow * c / std::f64::consts::PI;
        sum += last;
        used += 1;
    }
    Ok(ExpansionResult {
        value: sum,
        method: Method::MeisselThird,
        terms_used: used,
        est_error: if used > 1 { Some(last.abs()) } else { None },
        rigorous: false,
        precision_loss: false,
        elapsed: t0.elapsed(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::PrecisionConfig;

    fn q(nu: f64, x: f64) -> BesselQuery {
        BesselQuery::with_policy(nu, x, PrecisionConfig::default()).unwrap()
    }

    #[test]
    fn v_scaling_in_nu() {
        // V_k(z, 2 nu) = V_k(z, nu) / 2^k exactly
        for k in 1..=8 {
            let a = meissel_v(k, 0.5, 300.0);
            let b = meissel_v(k, 0.5, 600.0);
            assert!(
                (a / b / 2f64.powi(k as i32) - 1.0).abs() < 1e-12,
                "V_{k} scaling violated"
            );
        }
    }

    #[test]
    fn v_blows_up_toward_transition() {
        for k in 1..=8 {
            let mut prev = 0.0;
            for &z in &[0.9, 0.99, 0.999] {
                let v = meissel_v(k, z, 300.0).abs();
                assert!(v > prev, "V_{k} not growing toward z=1");
                prev = v;
            }
        }
    }

    #[test]
    fn p_scaling_in_nu() {
        // P_k(beta, 2nu) = P_k(beta, nu) / 4^k at fixed beta (fixed z = x/nu)
        for k in 1..=4 {
            let a = meissel_p(k, 300.0, 450.0);
            let b = meissel_p(k, 600.0, 900.0);
            assert!((a / b / 4f64.powi(k as i32) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn q_corrections_scale_in_nu() {
        // Q_k - [leading] scales as nu^(1-2k) at fixed beta
        for k in 1..=4 {
            let a = meissel_q_correction(k, 300.0, 450.0);
            let b = meissel_q_correction(k, 600.0, 900.0);
            let expect = 2f64.powi(2 * k as i32 - 1);
            assert!((a / b / expect - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn pq_vanish_at_large_beta() {
        // cot beta powers kill every correction as beta -> pi/2 (x >> nu)
        for k in 1..=4 {
            let p_near = meissel_p(k, 1.0, 100.0).abs();
            let p_far = meissel_p(k, 1.0, 10000.0).abs();
            assert!(p_far < p_near && p_far < 1e-8, "P_{k} not dying off");
            let q_near = meissel_q_correction(k, 1.0, 100.0).abs();
            let q_far = meissel_q_correction(k, 1.0, 10000.0).abs();
            assert!(q_far < q_near && q_far < 1e-3, "Q_{k} not dying off");
        }
    }

    #[test]
    fn first_small_argument_limit() {
        // for x << nu the prefactor reduces to the leading series term
        let r = meissel_first(&q(10.0, 1e-3), 8).unwrap();
        let lead = (5e-4f64).powi(10) / 3628800.0;
        // the next series term is O((x/2)^2/(nu+1)) ~ 2e-8 relative
        assert!((r.value / lead - 1.0).abs() < 1e-6);
    }

    #[test]
    fn second_reduces_to_classic_large_argument_form() {
        let r = meissel_second(&q(1.0, 1000.0), 4).unwrap();
        let classic = (2.0 / (std::f64::consts::PI * 1000.0)).sqrt()
            * (1000.0 - std::f64::consts::FRAC_PI_2 - std::f64::consts::FRAC_PI_4).cos();
        assert!((r.value - classic).abs() < 1e-4);
        // independent high-precision value
        assert!((r.value - 0.004728311907089524).abs() < 1e-10);
    }

    #[test]
    fn second_regular_at_order_zero() {
        let r = meissel_second(&q(0.0, 50.0), 4).unwrap();
        assert!(r.value.is_finite());
        // J_0(50) = 0.05581232766925181...
        assert!((r.value - 0.05581232766925181).abs() < 1e-8);
    }

    #[test]
    fn third_single_term_closed_form() {
        let r = meissel_third(300.0, 0).unwrap();
        let bits = bits_for_digits(30);
        let closed = hp(bits, 4.0 / 3.0).gamma().to_f64() * (6.0 / 300.0f64).powf(1.0 / 3.0)
            * (std::f64::consts::PI / 6.0).cos()
            / std::f64::consts::PI;
        assert!((r.value / closed - 1.0).abs() < 1e-14);
    }

    #[test]
    fn third_wrong_inputs() {
        assert!(meissel_third(-1.0, 7).is_err());
        assert!(meissel_third(300.0, 8).is_err());
    }

    #[test]
    fn first_rejects_above_order() {
        assert!(matches!(
            meissel_first(&q(300.0, 400.0), 8),
            Err(Error::WrongRegime { .. })
        ));
    }

    #[test]
    fn first_flags_transition_band() {
        let r = meissel_first(&q(300.0, 295.0), 8).unwrap();
        assert!(r.precision_loss);
        let r2 = meissel_first(&q(300.0, 150.0), 8).unwrap();
        assert!(!r2.precision_loss);
    }
}
