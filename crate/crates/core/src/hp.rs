//! Small helpers around MPFR floats: digit/bit conversion and extended-
//! precision phase reduction for the oscillatory expansions.

use rug::float::Constant;
use rug::Float;

/// Bits needed to hold `digits` decimal digits, with headroom.
pub fn bits_for_digits(digits: u32) -> u32 {
    (digits as f64 * std::f64::consts::LOG2_10).ceil() as u32 + 16
}

/// Decimal digits actually representable at `bits`.
pub fn digits_for_bits(bits: u32) -> u32 {
    ((bits.saturating_sub(16)) as f64 / std::f64::consts::LOG2_10).floor() as u32
}

pub fn hp(bits: u32, v: f64) -> Float {
    Float::with_val(bits, v)
}

pub fn pi(bits: u32) -> Float {
    Float::with_val(bits, Constant::Pi)
}

/// Reduce `phase` modulo 2*pi into [-pi, pi) and return it as f64.
/// The reduction happens at the float's own precision, so a phase of ~1e8
/// radians held at 34 digits still leaves ~26 fractional digits.
pub fn reduce_mod_2pi(phase: &Float) -> f64 {
    let bits = phase.prec();
    let two_pi = pi(bits) * 2u32;
    let mut r = phase.clone() % &two_pi;
    let p = pi(bits);
    if r >= p {
        r -= &two_pi;
    } else if r < -p.clone() {
        r += &two_pi;
    }
    r.to_f64()
}

/// cos(phase) with the argument reduced in extended precision first.
pub fn cos_reduced(phase: &Float) -> f64 {
    reduce_mod_2pi(phase).cos()
}

/// sin(phase) with the argument reduced in extended precision first.
pub fn sin_reduced(phase: &Float) -> f64 {
    reduce_mod_2pi(phase).sin()
}
