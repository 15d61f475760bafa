//! Transition-region methods: the epsilon expansion with B_0..B_24 and
//! Watson's contour-integration formulas with their rigorous error bounds
//! 3 theta_1 / nu and 24 theta_2 / nu (theta < 1).

use crate::hp::{bits_for_digits, cos_reduced, hp, sin_reduced};
use crate::oracle;
use crate::types::{BesselQuery, Error, ExpansionResult, Method, Result};
use std::time::Instant;

/// Validity radius for the epsilon expansion in units of nu^(1/3):
/// |x - nu| <= EPSILON_RADIUS * nu^(1/3). Calibrated so the working windows
/// reported at nu=300 ([286, 316]) and nu=1e6 (+-200) both sit inside.
pub const EPSILON_RADIUS: f64 = 2.5;

/// Coefficients of B_m(w), lowest power of w first, paired with that power.
/// m = 2 mod 3 rows are structurally absent: sin((m+1)pi/3) = 0 there.
fn b_poly(m: u32) -> Option<&'static [(f64, u32)]> {
    const B0: &[(f64, u32)] = &[(1.0, 0)];
    const B1: &[(f64, u32)] = &[(1.0, 1)];
    const B3: &[(f64, u32)] = &[(-1.0 / 15.0, 1), (1.0 / 6.0, 3)];
    const B4: &[(f64, u32)] = &[(1.0 / 280.0, 0), (-1.0 / 24.0, 2), (1.0 / 24.0, 4)];
    const B6: &[(f64, u32)] = &[
        (-1.0 / 3600.0, 0),
        (1.0 / 288.0, 2),
        (-7.0 / 1440.0, 4),
        (1.0 / 720.0, 6),
    ];
    const B7: &[(f64, u32)] = &[
        (-13.0 / 31500.0, 1),
        (19.0 / 12600.0, 3),
        (-1.0 / 900.0, 5),
        (1.0 / 5040.0, 7),
    ];
    const B9: &[(f64, u32)] = &[
        (7939.0 / 232_848_000.0, 1),
        (-121.0 / 907_200.0, 3),
        (71.0 / 604_800.0, 5),
        (-1.0 / 30_240.0, 7),
        (1.0 / 362_880.0, 9),
    ];
    const B10: &[(f64, u32)] = &[
        (-1213.0 / 655_200_000.0, 0),
        (43.0 / 1_728_000.0, 2),
        (-803.0 / 18_144_000.0, 4),
        (143.0 / 6_048_000.0, 6),
        (-11.0 / 2_419_200.0, 8),
        (1.0 / 3_628_800.0, 10),
    ];
    const B12: &[(f64, u32)] = &[
        (151_439.0 / 977_961_600_000.0, 0),
        (-59_503.0 / 27_941_760_000.0, 2),
        (337_207.0 / 83_825_280_000.0, 4),
        (-377.0 / 155_520_000.0, 6),
        (299.0 / 508_032_000.0, 8),
        (-13.0 / 217_728_000.0, 10),
        (1.0 / 479_001_600.0, 12),
    ];
    const B13: &[(f64, u32)] = &[
        (169_039.0 / 698_544_000_000.0, 1),
        (-266_303.0 / 259_459_200_000.0, 3),
        (25_853.0 / 23_950_080_000.0, 5),
        (-47.0 / 108_864_000.0, 7),
        (11.0 / 145_152_000.0, 9),
        (-1.0 / 171_072_000.0, 11),
        (1.0 / 6_227_020_800.0, 13),
    ];
    const B15: &[(f64, u32)] = &[
        (-16_720_141.0 / 810_485_676_000_000.0, 1),
        (5_141_933.0 / 57_210_753_600_000.0, 3),
        (-37_021.0 / 371_498_400_000.0, 5),
        (76_841.0 / 1_760_330_880_000.0, 7),
        (-17.0 / 1_905_120_000.0, 9),
        (113.0 / 125_737_920_000.0, 11),
        (-1.0 / 23_351_328_000.0, 13),
        (1.0 / 1_307_674_368_000.0, 15),
    ];
    // m = 16..24 rows regenerated from the stationary-phase recurrence with
    // exact rational arithmetic (same scheme that reproduces B_0..B_15 above).
    const B16: &[(f64, u32)] = &[
        (16_542_537_833.0 / 14_879_881_336_320_000_000.0, 0),
        (-4_823_069.0 / 305_124_019_200_000.0, 2),
        (73_912_243.0 / 2_288_430_144_000_000.0, 4),
        (-29_349_361.0 / 1_307_674_368_000_000.0, 6),
        (390_949.0 / 56_330_588_160_000.0, 8),
        (-391.0 / 365_783_040_000.0, 10),
        (17.0 / 201_180_672_000.0, 12),
        (-17.0 / 5_230_697_472_000.0, 14),
        (1.0 / 20_922_789_888_000.0, 16),
    ];
    const B18: &[(f64, u32)] = &[
        (-887_278_009.0 / 9_336_794_987_520_000_000.0, 0),
        (154_877_407.0 / 113_173_272_576_000_000.0, 2),
        (-2_683_694_311.0 / 933_679_498_752_000_000.0, 4),
        (344_828_093.0 / 164_766_970_368_000_000.0, 6),
        (-2_184_943.0 / 3_138_418_483_200_000.0, 8),
        (1_501.0 / 12_517_908_480_000.0, 10),
        (-817.0 / 72_425_041_920_000.0, 12),
        (1_273.0 / 2_196_892_938_240_000.0, 14),
        (-19.0 / 1_255_367_393_280_000.0, 16),
        (1.0 / 6_402_373_705_728_000.0, 18),
    ];
    const B19: &[(f64, u32)] = &[
        (-5_195_095_651_453.0 / 34_149_327_666_854_400_000_000.0, 1),
        (80_515_666_081.0 / 116_749_838_177_280_000_000.0, 3),
        (-120_072_119.0 / 145_887_421_680_000_000.0, 5),
        (468_365_621.0 / 1_153_368_792_576_000_000.0, 7),
        (-5_480_413.0 / 54_922_323_456_000_000.0, 9),
        (248_401.0 / 18_589_094_092_800_000.0, 11),
        (-17.0 / 16_812_956_160_000.0, 13),
        (47.0 / 1_098_446_469_120_000.0, 15),
        (-1.0 / 1_067_062_284_288_000.0, 17),
        (1.0 / 121_645_100_408_832_000.0, 19),
    ];
    const B21: &[(f64, u32)] = &[
        (1_462_888_991_875_009.0 / 111_388_897_880_612_352_000_000_000.0, 1),
        (-14_299_924_517.0 / 236_532_139_683_840_000_000.0, 3),
        (315_601_871_597.0 / 4_257_578_514_309_120_000_000.0, 5),
        (-8_322_563.0 / 218_262_739_968_000_000.0, 7),
        (3_580_219.0 / 359_491_571_712_000_000.0, 9),
        (-319_849.0 / 219_689_293_824_000_000.0, 11),
        (19_783.0 / 158_176_291_553_280_000.0, 13),
        (-23.0 / 3_594_915_717_120_000.0, 15),
        (31.0 / 162_969_512_509_440_000.0, 17),
        (-1.0 / 331_759_364_751_360_000.0, 19),
        (1.0 / 51_090_942_171_709_440_000.0, 21),
    ];
    const B22: &[(f64, u32)] = &[
        (-9_597_171_184_603.0 / 13_659_731_066_741_760_000_000_000.0, 0),
        (265_779_236_561.0 / 25_732_617_394_176_000_000_000.0, 2),
        (-370_847_532_490_051.0 / 16_391_677_280_090_112_000_000_000.0, 4),
        (48_184_749_068_689.0 / 2_731_946_213_348_352_000_000_000.0, 6),
        (-3_475_297_999.0 / 534_743_712_921_600_000_000.0, 8),
        (3_593_493_803.0 / 2_768_085_102_182_400_000_000.0, 10),
        (-4_874_459.0 / 32_221_096_427_520_000_000.0, 12),
        (3_245_507.0 / 304_489_361_240_064_000_000.0, 14),
        (-3_611.0 / 7_908_814_577_664_000_000.0, 16),
        (23.0 / 1_991_849_597_337_600_000.0, 18),
        (-23.0 / 145_974_120_490_598_400_000.0, 20),
        (1.0 / 1_124_000_727_777_607_680_000.0, 22),
    ];
    const B24: &[(f64, u32)] = &[
        (1_374_085_664_813_273_149.0 / 22_643_135_161_170_878_914_560_000_000_000.0, 0),
        (-26_458_283_312_167_519.0 / 29_406_669_040_481_660_928_000_000_000.0, 2),
        (4_910_206_456_408_607.0 / 2_450_555_753_373_471_744_000_000_000.0, 4),
        (-3_861_463_396_513.0 / 2_408_572_988_094_873_600_000_000.0, 6),
        (28_956_743_281_673.0 / 47_208_030_566_659_522_560_000_000.0, 8),
        (-1_041_557_273.0 / 8_066_990_869_217_280_000_000.0, 10),
        (8_439_083.0 / 521_981_762_125_824_000_000.0, 12),
        (-2_437_933.0 / 1_938_789_402_181_632_000_000.0, 14),
        (51_661.0 / 835_170_819_401_318_400_000.0, 16),
        (-19.0 / 9_928_604_146_728_960_000.0, 18),
        (1.0 / 27_867_786_639_114_240_000.0, 20),
        (-1.0 / 2_697_601_746_666_258_432_000.0, 22),
        (1.0 / 620_448_401_733_239_439_360_000.0, 24),
    ];
    match m {
        0 => Some(B0),
        1 => Some(B1),
        3 => Some(B3),
        4 => Some(B4),
        6 => Some(B6),
        7 => Some(B7),
        9 => Some(B9),
        10 => Some(B10),
        12 => Some(B12),
        13 => Some(B13),
        15 => Some(B15),
        16 => Some(B16),
        18 => Some(B18),
        19 => Some(B19),
        21 => Some(B21),
        22 => Some(B22),
        24 => Some(B24),
        2 | 5 | 8 | 11 | 14 | 17 | 20 | 23 => None,
        _ => panic!("B_m tabulated for m = 0..24"),
    }
}

/// B_m(w) evaluated from the exact rational coefficient table.
pub fn epsilon_b(m: u32, w: f64) -> f64 {
    match b_poly(m) {
        None => 0.0,
        Some(coeffs) => coeffs.iter().map(|&(c, p)| c * w.powi(p as i32)).sum(),
    }
}

/// sin((m+1) pi / 3) from the exact symbolic table (period 6).
fn sin_third(m: u32) -> f64 {
    const HALF_SQRT3: f64 = 0.8660254037844386467637231707529362;
    match m % 6 {
        0 | 1 => HALF_SQRT3,
        3 | 4 => -HALF_SQRT3,
        2 | 5 => 0.0,
        _ => unreachable!(),
    }
}

/// Epsilon expansion around the transition: nu = z(1 - eps) with z the
/// argument, so eps*z = x - nu. Truncated at m_max <= 24.
pub fn epsilon_expansion(query: &BesselQuery, m_max: u32) -> Result<ExpansionResult> {
    let t0 = Instant::now();
    let nu = query.order;
    let x = query.argument;
    if !(nu > 0.0 && x > 0.0) {
        return Err(Error::InvalidInput(format!(
            "epsilon expansion requires positive nu and x, got nu={nu}, x={x}"
        )));
    }
    if m_max > 24 {
        return Err(Error::InvalidInput(format!("m_max must be in [0,24], got {m_max}")));
    }
    let w = x - nu; // eps * z
    let radius = EPSILON_RADIUS * nu.powf(1.0 / 3.0);
    if w.abs() > radius {
        return Err(Error::OutOfValidity(format!(
            "|x - nu| = {} exceeds epsilon validity radius {radius:.3}; use the Meissel expansions",
            w.abs()
        )));
    }
    let bits = bits_for_digits(30);
    let sixth_z = x / 6.0;
    let mut sum = 0.0;
    let mut last = 0.0;
    let mut used = 0;
    for m in 0..=m_max {
        let s = sin_third(m);
        if s == 0.0 {
            continue;
        }
        let b = epsilon_b(m, w);
        let g = hp(bits, (m as f64 + 1.0) / 3.0).gamma().to_f64();
        let pw = sixth_z.powf(-((m as f64 + 1.0) / 3.0));
        last = b * s * g * pw / (3.0 * std::f64::consts::PI);
        sum += last;
        used += 1;
    }
    Ok(ExpansionResult {
        value: sum,
        method: Method::Epsilon,
        terms_used: used,
        est_error: if used > 1 { Some(last.abs()) } else { None },
        rigorous: false,
        precision_loss: false,
        elapsed: t0.elapsed(),
    })
}

/// Watson's below-order contour-integration formula with the rigorous
/// 3 theta_1 / nu * exp(nu(tanh a - a)) bound.
pub fn watson_below(query: &BesselQuery) -> Result<ExpansionResult> {
    let t0 = Instant::now();
    let nu = query.order;
    let x = query.argument;
    if !(nu > 0.0) {
        return Err(Error::InvalidInput(format!("watson_below requires nu > 0, got {nu}")));
    }
    if !(x > 0.0 && x < nu) {
        return Err(Error::WrongRegime {
            method: Method::WatsonBelow,
            detail: format!("requires 0 < x < nu, got nu={nu}, x={x}"),
        });
    }
    // alpha_D and the O(alpha^5) exponent cancellation at 40 digits
    let bits = bits_for_digits(40);
    let zh = hp(bits, x) / hp(bits, nu);
    let th = (hp(bits, 1.0) - zh.clone() * &zh).sqrt(); // tanh alpha_D
    let alpha = ((th.clone() + 1u32) / &zh).ln();
    let t3 = th.clone() * &th * &th;
    let w = (t3.clone() * hp(bits, nu) / 3u32).to_f64();
    let expo = ((th.clone() + t3 / 3u32 - &alpha) * hp(bits, nu)).exp().to_f64();

    let digits = query.policy.resolved_oracle_digits().min(40);
    let k_third = oracle::exact_k_third(w, digits)?;
    let tanh_a = th.to_f64();
    let value = tanh_a / (std::f64::consts::PI * 3.0f64.sqrt()) * expo * k_third.to_f64();
    let decay = ((th - alpha) * hp(bits, nu)).exp().to_f64();
    let bound = 3.0 / nu * decay;
    Ok(ExpansionResult {
        value,
        method: Method::WatsonBelow,
        terms_used: 1,
        est_error: Some(bound),
        rigorous: true,
        precision_loss: false,
        elapsed: t0.elapsed(),
    })
}

/// Watson's above-order formula via J_{±1/3}, rigorous bound 24 / nu.
/// The fractional-Bessel argument is nu tan^3(beta) / 3 (the nu mirrors the
/// K argument of the below formula) and is gated at 50 by the series helper.
pub fn watson_above(query: &BesselQuery) -> Result<ExpansionResult> {
    let t0 = Instant::now();
    let nu = query.order;
    let x = query.argument;
    if !(nu > 0.0) {
        return Err(Error::InvalidInput(format!("watson_above requires nu > 0, got {nu}")));
    }
    if !(x > nu) {
        return Err(Error::WrongRegime {
            method: Method::WatsonAbove,
            detail: format!("requires x > nu, got nu={nu}, x={x}"),
        });
    }
    let bits = bits_for_digits(query.policy.phase_digits.max(40));
    let nu_hp = hp(bits, nu);
    let x_hp = hp(bits, x);
    let tan_b = (x_hp.clone() * &x_hp - nu_hp.clone() * &nu_hp).sqrt() / &nu_hp;
    let beta = (nu_hp.clone() / &x_hp).acos();
    let t3 = tan_b.clone() * &tan_b * &tan_b;
    let w = (t3.clone() * &nu_hp / 3u32).to_f64();
    if w > 50.0 {
        return Err(Error::OutOfRange(format!(
            "fractional-Bessel argument w = {w:.2} > 50; use meissel_second/debye_above"
        )));
    }
    // phase nu(tan b - tan^3 b / 3 - beta): O(beta^5) cancellation
    let phase = (tan_b.clone() - t3 / 3u32 - beta) * &nu_hp;
    let cosv = cos_reduced(&phase);
    let sinv = sin_reduced(&phase);

    let digits = query.policy.resolved_oracle_digits().min(40);
    let j_minus = oracle::exact_j_fractional_small(-1.0 / 3.0, w, digits)?.to_f64();
    let j_plus = oracle::exact_j_fractional_small(1.0 / 3.0, w, digits)?.to_f64();
    let tb = tan_b.to_f64();
    let value = tb / 3.0 * cosv * (j_minus + j_plus)
        + tb / 3.0f64.sqrt() * sinv * (j_minus - j_plus);
    Ok(ExpansionResult {
        value,
        method: Method::WatsonAbove,
        terms_used: 1,
        est_error: Some(24.0 / nu),
        rigorous: true,
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
    fn b_constant_terms_match_table() {
        assert_eq!(epsilon_b(0, 0.0), 1.0);
        assert_eq!(epsilon_b(4, 0.0), 1.0 / 280.0);
        assert_eq!(epsilon_b(6, 0.0), -1.0 / 3600.0);
        assert_eq!(epsilon_b(10, 0.0), -1213.0 / 655_200_000.0);
        assert_eq!(epsilon_b(12, 0.0), 151_439.0 / 977_961_600_000.0);
        // odd-power polynomials vanish at 0
        for m in [1, 3, 7, 9, 13, 15] {
            assert_eq!(epsilon_b(m, 0.0), 0.0);
        }
    }

    #[test]
    fn absent_rows_are_zero() {
        for m in [2, 5, 8, 11, 14] {
            assert_eq!(epsilon_b(m, 3.7), 0.0);
            assert_eq!(sin_third(m), 0.0);
        }
    }

    #[test]
    fn zero_sine_terms_change_nothing() {
        // the m = 2 mod 3 rows contribute exactly zero, so truncating at
        // m_max = 14 vs 13 is bit-identical
        let a = epsilon_expansion(&q(300.0, 305.0), 14).unwrap();
        let b = epsilon_expansion(&q(300.0, 305.0), 13).unwrap();
        assert_eq!(a.value.to_bits(), b.value.to_bits());
    }

    #[test]
    fn epsilon_agrees_with_meissel_third_on_the_diagonal() {
        let e = epsilon_expansion(&q(300.0, 300.0), 15).unwrap();
        let t = crate::meissel::meissel_third(300.0, 7).unwrap();
        assert!(
            ((e.value - t.value) / t.value).abs() < 1e-8,
            "eps={} third={}",
            e.value,
            t.value
        );
    }

    #[test]
    fn epsilon_out_of_validity() {
        assert!(matches!(
            epsilon_expansion(&q(300.0, 350.0), 15),
            Err(Error::OutOfValidity(_))
        ));
    }

    #[test]
    fn watson_bound_decays_with_order() {
        let mut prev = f64::INFINITY;
        for &nu in &[300.0, 600.0, 1200.0] {
            let r = watson_below(&q(nu, 0.95 * nu)).unwrap();
            let b = r.est_error.unwrap();
            assert!(b < prev && r.rigorous);
            prev = b;
        }
    }

    #[test]
    fn watson_above_range_gate() {
        // far above the order the fractional argument exceeds 50
        assert!(matches!(
            watson_above(&q(300.0, 450.0)),
            Err(Error::OutOfRange(_))
        ));
    }

    #[test]
    fn watson_above_transition_limit_matches_third() {
        let r = watson_above(&q(300.0, 300.0001)).unwrap();
        let t = crate::meissel::meissel_third(300.0, 7).unwrap();
        assert!(((r.value - t.value) / t.value).abs() < 1e-4);
    }
}
