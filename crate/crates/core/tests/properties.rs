//! Property-based invariants: cheap structural guarantees checked over
//! randomized inputs rather than pinned points.

use bessel_asym::gw::{assoc_legendre, b_orb, GwParams};
use bessel_asym::transition::epsilon_b;
use bessel_asym::{classify, eval_j, meissel, oracle, BesselQuery, DispatchPolicy};
use proptest::prelude::*;

fn q(nu: f64, x: f64) -> BesselQuery {
    BesselQuery::new(nu, x).unwrap()
}

proptest! {
    // classification is total and pure on its whole domain
    #[test]
    fn classify_total_and_deterministic(nu in 1e-3..1e7f64, x in 0.0..2e7f64) {
        let p = DispatchPolicy::default();
        let a = classify(nu, x, &p).unwrap();
        let b = classify(nu, x, &p).unwrap();
        prop_assert_eq!(a.tag, b.tag);
        prop_assert_eq!(a.margin.to_bits(), b.margin.to_bits());
    }

    // the transition polynomials carry the parity of their index: only even
    // powers for even m, odd powers for odd m
    #[test]
    fn transition_polynomials_have_parity(m in 0u32..=24, w in -12.0..12.0f64) {
        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
        prop_assert_eq!(epsilon_b(m, -w), sign * epsilon_b(m, w));
    }

    // the oscillatory expansion never escapes its amplitude envelope in the
    // regime where it is meaningful (outside the transition band)
    #[test]
    fn second_expansion_under_envelope(nu in 1.0..400.0f64, m in 3.0..40.0f64) {
        let x = nu + m * nu.powf(1.0 / 3.0);
        let r = meissel::meissel_second(&q(nu, x), 4).unwrap();
        let envelope = (2.0 / (std::f64::consts::PI * (x * x - nu * nu).sqrt())).sqrt();
        // 1e-12 slack: the envelope itself is computed in f64 here
        prop_assert!(r.value.abs() <= envelope * (1.0 + 1e-12));
    }

    // asking the oracle for more digits never changes the leading ones
    #[test]
    fn oracle_precision_monotone(nu in 0.0..20.0f64, x in 0.1..30.0f64) {
        let lo = oracle::exact_j(nu, x, 15).unwrap();
        let hi = oracle::exact_j(nu, x, 30).unwrap();
        if !hi.value.is_zero() {
            prop_assert!(oracle::agreement_digits(&lo.value, &hi.value) >= 14);
        }
    }

    // reflection rule for negative azimuthal index
    #[test]
    fn legendre_negative_index_reflection(l in 0u32..=10, u in -0.999..0.999f64) {
        for m in 0..=l as i32 {
            let plus = assoc_legendre(l, m, u).unwrap();
            let minus = assoc_legendre(l, -m, u).unwrap();
            let mut ratio = 1.0;
            for j in (l as i32 - m + 1)..=(l as i32 + m) {
                ratio *= j as f64;
            }
            let expect = if m % 2 == 0 { plus / ratio } else { -plus / ratio };
            prop_assert!((minus - expect).abs() <= 1e-12 * expect.abs().max(1e-300));
        }
    }

    // the frequency-offset parameter is affine in the sideband index
    #[test]
    fn frequency_offset_affine_in_sideband(n in -50i64..=50, m in -12i64..=12) {
        let p = GwParams::desk_preset();
        let step = 2.0 * p.omega_orb() / p.omega_r();
        let got = b_orb(&p, n, m) - b_orb(&p, 0, m);
        prop_assert!((got - n as f64 * step).abs() < 1e-9 * (1.0 + got.abs()));
    }

    // the front door is deterministic across calls
    #[test]
    fn dispatch_deterministic(nu in 1.0..400.0f64, f in 0.2..2.0f64) {
        let x = nu * f;
        let p = DispatchPolicy::default();
        let a = eval_j(&q(nu, x), &p).unwrap();
        let b = eval_j(&q(nu, x), &p).unwrap();
        prop_assert_eq!(a.value.to_bits(), b.value.to_bits());
        prop_assert_eq!(a.method, b.method);
    }
}
