//! Desk-scale evaluation of the pulsar gravitational-wave Fourier-transform
//! signal: the truncated triple sum over psi_0..psi_4, plus the supporting
//! special functions (associated Legendre, spherical harmonics, signed
//! log-gamma, generalized hypergeometric 1F3).

use crate::evaluator::{eval_j, DispatchPolicy};
use crate::hp::{bits_for_digits, hp};
use crate::types::{BesselQuery, Error, PrecisionConfig, Result};
use num_complex::Complex64;
use std::collections::BTreeMap;

pub const SPEED_OF_LIGHT: f64 = 2.99792458e8;
pub const SECONDS_PER_DAY: f64 = 86_400.0;

/// All physical and detector parameters of the signal model.
#[derive(Debug, Clone, PartialEq)]
pub struct GwParams {
    /// Source GW frequency [Hz].
    pub f0: f64,
    /// Analysis angular frequency omega [rad/s] (omega = 2 pi f).
    pub omega: f64,
    /// Earth rotation period [s]; omega_r = 2 pi / t_re.
    pub t_re: f64,
    /// Orbital period [s]; omega_orb = 2 pi / t_orb.
    pub t_orb: f64,
    /// Orbit radius (sun-earth distance) [m].
    pub a_orbit: f64,
    /// Earth radius [m].
    pub r_earth: f64,
    /// Detector co-latitude [rad].
    pub alpha: f64,
    /// Source polar angle [rad].
    pub theta: f64,
    /// Source azimuthal angle [rad].
    pub phi: f64,
    /// Number of rotation periods in the psi_2 geometric factor.
    pub rotations: u32,
    /// n-sum bounds, inclusive.
    pub n_min: i64,
    pub n_max: i64,
    /// l-sum truncation, inclusive.
    pub l_max: u32,
}

impl GwParams {
    /// omega_0 = 2 pi f_0.
    pub fn omega0(&self) -> f64 {
        2.0 * std::f64::consts::PI * self.f0
    }

    /// Earth rotation rate omega_r (the formulae's omega_r and omega_rot are
    /// treated as the same quantity; one day is the only rotation period in
    /// the model).
    pub fn omega_r(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.t_re
    }

    pub fn omega_orb(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.t_orb
    }

    /// Earth-rotation Doppler scale k = 4 pi f0 R_E sin(alpha) / c.
    pub fn doppler_k(&self) -> f64 {
        4.0 * std::f64::consts::PI * self.f0 * self.r_earth * self.alpha.sin() / SPEED_OF_LIGHT
    }

    /// Orbital Bessel argument X = 2 pi f0 A sin(theta) / c.
    pub fn bessel_argument(&self) -> f64 {
        2.0 * std::f64::consts::PI * self.f0 * self.a_orbit * self.theta.sin() / SPEED_OF_LIGHT
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.f0 > 0.0 && self.t_re > 0.0 && self.t_orb > 0.0) {
            return Err(Error::InvalidInput("frequencies and periods must be positive".into()));
        }
        if !(0.0..=std::f64::consts::PI).contains(&self.alpha)
            || !(0.0..=std::f64::consts::PI).contains(&self.theta)
        {
            return Err(Error::InvalidInput("alpha and theta must lie in [0, pi]".into()));
        }
        if self.rotations < 1 {
            return Err(Error::InvalidInput("rotations must be >= 1".into()));
        }
        if self.n_min > self.n_max {
            return Err(Error::InvalidInput("n_min must be <= n_max".into()));
        }
        Ok(())
    }

    /// Desk-scale preset: every factor is oracle-checkable. f0 puts the
    /// orbital Bessel argument at X = 300; the Earth radius is scaled up so
    /// the Doppler scale lands at k = 3 (physically k ~ 0.02 at this f0).
    pub fn desk_preset() -> GwParams {
        let theta = std::f64::consts::PI / 3.0;
        let alpha = std::f64::consts::PI / 4.0;
        let a_orbit = 1.5e11;
        let f0 = 300.0 * SPEED_OF_LIGHT / (2.0 * std::f64::consts::PI * a_orbit * theta.sin());
        let r_earth = 3.0 * SPEED_OF_LIGHT / (4.0 * std::f64::consts::PI * f0 * alpha.sin());
        let mut p = GwParams {
            f0,
            omega: 0.0,
            t_re: SECONDS_PER_DAY,
            t_orb: 365.0 * SECONDS_PER_DAY,
            a_orbit,
            r_earth,
            alpha,
            theta,
            phi: 1.0,
            rotations: 7,
            // |J_n(X)| only starts its exponential falloff past |n| = X, so
            // the sideband window must clear X = 300 with margin
            n_min: -380,
            n_max: 380,
            l_max: 12,
        };
        p.omega = p.omega0();
        p
    }

    /// Physical-scale preset: f0 = 1000 Hz, theta = pi/2, so the Bessel
    /// argument is ~3.1e6 and every J_n routes through the asymptotic paths.
    pub fn physical_preset() -> GwParams {
        let mut p = GwParams {
            f0: 1000.0,
            omega: 0.0,
            t_re: SECONDS_PER_DAY,
            t_orb: 365.0 * SECONDS_PER_DAY,
            a_orbit: 1.5e11,
            r_earth: 6.371e6,
            alpha: std::f64::consts::PI / 4.0,
            theta: std::f64::consts::PI / 2.0,
            phi: 1.0,
            rotations: 7,
            n_min: -10,
            n_max: 10,
            l_max: 6,
        };
        p.omega = p.omega0();
        p
    }

    /// Parse a key = value parameter file ('#' starts a comment). Unknown
    /// keys are rejected so typos do not silently fall back to defaults.
    pub fn from_key_value(text: &str) -> Result<GwParams> {
        let mut p = GwParams::desk_preset();
        let mut omega_set = false;
        let mut f0_set = false;
        for (line_no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::InvalidInput(format!("line {}: expected key = value", line_no + 1))
            })?;
            let key = key.trim();
            let v: f64 = value.trim().parse().map_err(|_| {
                Error::InvalidInput(format!("line {}: bad number {:?}", line_no + 1, value.trim()))
            })?;
            match key {
                "f0" => {
                    p.f0 = v;
                    f0_set = true;
                }
                "omega" => {
                    p.omega = v;
                    omega_set = true;
                }
                "t_re" => p.t_re = v,
                "t_orb" => p.t_orb = v,
                "a_orbit" => p.a_orbit = v,
                "r_earth" => p.r_earth = v,
                "alpha" => p.alpha = v,
                "theta" => p.theta = v,
                "phi" => p.phi = v,
                "rotations" => p.rotations = v as u32,
                "n_min" => p.n_min = v as i64,
                "n_max" => p.n_max = v as i64,
                "l_max" => p.l_max = v as u32,
                other => {
                    return Err(Error::InvalidInput(format!(
                        "line {}: unknown key {other:?}",
                        line_no + 1
                    )))
                }
            }
        }
        if f0_set && !omega_set {
            p.omega = p.omega0();
        }
        p.validate()?;
        Ok(p)
    }
}

/// B_orb = 2((omega - omega_0)/omega_r + m/2 + n omega_orb / omega_r).
pub fn b_orb(params: &GwParams, n: i64, m: i64) -> f64 {
    let wr = params.omega_r();
    2.0 * ((params.omega - params.omega0()) / wr + m as f64 / 2.0
        + n as f64 * params.omega_orb() / wr)
}

/// ln |Gamma(t)| and the sign of Gamma(t) for real t; None at the poles.
pub fn ln_gamma_signed(t: f64) -> Option<(f64, f64)> {
    if t > 0.0 {
        let bits = bits_for_digits(25);
        Some((hp(bits, t).gamma().ln().to_f64(), 1.0))
    } else if t.fract() == 0.0 {
        None
    } else {
        // reflection: Gamma(t) = pi / (sin(pi t) Gamma(1 - t))
        let bits = bits_for_digits(25);
        let pi = std::f64::consts::PI;
        let s = {
            // sin(pi t) with the integer part peeled off to keep accuracy
            let frac = t - t.floor();
            let sv = (pi * frac).sin();
            if (t.floor() as i64).rem_euclid(2) == 0 { sv } else { -sv }
        };
        let lg1mt = hp(bits, 1.0 - t).gamma().ln().to_f64();
        Some((pi.ln() - s.abs().ln() - lg1mt, s.signum()))
    }
}

/// Unnormalized associated Legendre P_l^m(u), Condon-Shortley phase included.
/// Negative m via P_l^{-m} = (-1)^m (l-m)!/(l+m)! P_l^m.
pub fn assoc_legendre(l: u32, m: i32, u: f64) -> Result<f64> {
    if m.unsigned_abs() > l {
        return Err(Error::InvalidInput(format!("assoc_legendre requires |m| <= l, got l={l}, m={m}")));
    }
    if !(-1.0..=1.0).contains(&u) {
        return Err(Error::InvalidInput(format!("assoc_legendre requires u in [-1,1], got {u}")));
    }
    if m < 0 {
        let ma = (-m) as u32;
        let base = assoc_legendre(l, ma as i32, u)?;
        let mut ratio = 1.0; // (l-m)!/(l+m)!
        for j in (l - ma + 1)..=(l + ma) {
            ratio /= j as f64;
        }
        let sign = if ma % 2 == 0 { 1.0 } else { -1.0 };
        return Ok(sign * ratio * base);
    }
    let m = m as u32;
    // P_m^m = (-1)^m (2m-1)!! (1-u^2)^(m/2), then the stable upward
    // recurrence in l
    let somx2 = ((1.0 - u) * (1.0 + u)).sqrt();
    let mut pmm = 1.0;
    for j in 1..=m {
        pmm *= -((2 * j - 1) as f64) * somx2;
    }
    if l == m {
        return Ok(pmm);
    }
    let mut p_prev = pmm;
    let mut p_cur = u * (2 * m + 1) as f64 * pmm; // P_{m+1}^m
    for ll in (m + 1)..l {
        let next = ((2 * ll + 1) as f64 * u * p_cur - (ll + m) as f64 * p_prev)
            / (ll - m + 1) as f64;
        p_prev = p_cur;
        p_cur = next;
    }
    Ok(p_cur)
}

/// Orthonormal spherical-harmonic normalization constant
/// N_lm = sqrt((2l+1)(l-m)! / (4 pi (l+m)!)).
pub fn norm_nlm(l: u32, m: i32) -> f64 {
    let (la, lb) = if m >= 0 {
        (l as f64 - m as f64, l as f64 + m as f64)
    } else {
        (l as f64 + (-m) as f64, l as f64 - (-m) as f64)
    };
    let bits = bits_for_digits(25);
    let ln_ratio = hp(bits, la + 1.0).gamma().ln().to_f64() - hp(bits, lb + 1.0).gamma().ln().to_f64();
    ((2.0 * l as f64 + 1.0) / (4.0 * std::f64::consts::PI) * ln_ratio.exp()).sqrt()
}

/// Y_lm(theta, phi) = N_lm P_l^m(cos theta) e^(i m phi).
pub fn spherical_harmonic(l: u32, m: i32, theta: f64, phi: f64) -> Result<Complex64> {
    if m.unsigned_abs() > l {
        return Err(Error::InvalidInput(format!("|m| <= l required, got l={l}, m={m}")));
    }
    let p = assoc_legendre(l, m, theta.cos())?;
    let n = norm_nlm(l, m);
    Ok(Complex64::from_polar(1.0, m as f64 * phi).scale(n * p))
}

/// Generalized hypergeometric 1F3(a; b1, b2, b3; x), summed to relative tail
/// below `target_rel` in extended precision (the alternating x < 0 case is
/// carried with ~2*0.9*sqrt(|x|) guard digits).
pub fn hypergeom_1f3(a: f64, b1: f64, b2: f64, b3: f64, x: f64, target_rel: f64) -> Result<f64> {
    for b in [b1, b2, b3] {
        if b <= 0.0 && b.fract() == 0.0 {
            return Err(Error::PoleInParameters(format!(
                "1F3 parameter b = {b} is a non-positive integer"
            )));
        }
    }
    if x.abs() > 1.0e4 {
        return Err(Error::CapExceeded(format!(
            "1F3 argument |x| = {} beyond the configured cap 1e4",
            x.abs()
        )));
    }
    let target_digits = (-target_rel.log10()).ceil().max(1.0) as u32 + 2;
    let guard = if x < 0.0 {
        (0.9 * x.abs().sqrt() * 2.0).ceil() as u32
    } else {
        0
    };
    let bits = bits_for_digits(target_digits + guard + 10);
    let mut term = hp(bits, 1.0);
    let mut sum = term.clone();
    let xh = hp(bits, x);
    let mut k: u32 = 0;
    loop {
        let kf = k as f64;
        let num = hp(bits, a + kf);
        let den = hp(bits, b1 + kf) * hp(bits, b2 + kf) * hp(bits, b3 + kf) * hp(bits, kf + 1.0);
        term = term * num * &xh / den;
        sum += &term;
        k += 1;
        let decreasing = (a + kf).abs() * x.abs()
            < ((b1 + kf) * (b2 + kf) * (b3 + kf) * (kf + 1.0)).abs();
        if decreasing && term.clone().abs() <= sum.clone().abs() * hp(bits, target_rel) / 10u32 {
            break;
        }
        if k > 500_000 {
            return Err(Error::CapExceeded("1F3 series did not converge".into()));
        }
    }
    Ok(sum.to_f64())
}

/// psi_0 = 4 pi i^l Y_lm(theta, phi) N_lm P_l^m(cos alpha).
pub fn psi0(params: &GwParams, l: u32, m: i32) -> Result<Complex64> {
    let y = spherical_harmonic(l, m, params.theta, params.phi)?;
    let n = norm_nlm(l, m);
    let p = assoc_legendre(l, m, params.alpha.cos())?;
    Ok(i_pow(l as i64) * y.scale(4.0 * std::f64::consts::PI * n * p))
}

/// i^n for any integer n.
fn i_pow(n: i64) -> Complex64 {
    match n.rem_euclid(4) {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// psi_1 = T_rE sqrt(pi/2) e^(-i X cos phi) i^n e^(-i n phi) J_n(X),
/// X = 2 pi f0 A sin(theta) / c. J_n at negative n via (-1)^n J_|n|.
pub fn psi1(params: &GwParams, n: i64, policy: &DispatchPolicy) -> Result<Complex64> {
    let x = params.bessel_argument();
    let query = BesselQuery::with_policy(n.unsigned_abs() as f64, x, PrecisionConfig::default())?;
    let j = eval_j(&query, policy)?.value;
    let j = if n < 0 && n.rem_euclid(2) == 1 { -j } else { j };
    let amp = params.t_re * (std::f64::consts::PI / 2.0).sqrt();
    let phase = Complex64::from_polar(1.0, -x * params.phi.cos())
        * i_pow(n)
        * Complex64::from_polar(1.0, -(n as f64) * params.phi);
    Ok(phase.scale(amp * j))
}

/// psi_2 as the closed geometric sum sum_{j=0}^{R-1} e^(i pi (l - B) j)
/// times e^(-i B pi / 2) / 2^(2l); the ratio form's removable singularity at
/// even integer l - B is handled by the sum form automatically.
pub fn psi2(params: &GwParams, l: u32, n: i64, m: i64) -> Complex64 {
    let b = b_orb(params, n, m);
    let step = std::f64::consts::PI * (l as f64 - b);
    let mut sum = Complex64::new(0.0, 0.0);
    for j in 0..params.rotations {
        sum += Complex64::from_polar(1.0, step * j as f64);
    }
    let pre = Complex64::from_polar(1.0, -b * std::f64::consts::FRAC_PI_2);
    sum * pre / 4.0f64.powi(l as i32)
}

/// Ratio form of the psi_2 bracket, defined away from even integer l - B;
/// kept as the cross-check route for the sum form.
pub fn psi2_ratio_form(params: &GwParams, l: u32, n: i64, m: i64) -> Complex64 {
    let b = b_orb(params, n, m);
    let step = std::f64::consts::PI * (l as f64 - b);
    let num = Complex64::new(1.0, 0.0) - Complex64::from_polar(1.0, step * params.rotations as f64);
    let den = Complex64::new(1.0, 0.0) - Complex64::from_polar(1.0, step);
    let pre = Complex64::from_polar(1.0, -b * std::f64::consts::FRAC_PI_2);
    num / den * pre / 4.0f64.powi(l as i32)
}

/// psi_3 = k^(l+1/2) Gamma(l+1) / (Gamma(l+3/2) Gamma((l+B+2)/2)
/// Gamma((l-B+2)/2)), in log space; a pole in a denominator Gamma gives 0.
pub fn psi3(params: &GwParams, l: u32, n: i64, m: i64) -> f64 {
    let k = params.doppler_k();
    if k == 0.0 {
        return 0.0;
    }
    let b = b_orb(params, n, m);
    let lf = l as f64;
    let ga = match ln_gamma_signed((lf + b + 2.0) / 2.0) {
        Some(v) => v,
        None => return 0.0,
    };
    let gb = match ln_gamma_signed((lf - b + 2.0) / 2.0) {
        Some(v) => v,
        None => return 0.0,
    };
    let (ln_num, _) = ln_gamma_signed(lf + 1.0).expect("l+1 > 0");
    let (ln_den1, _) = ln_gamma_signed(lf + 1.5).expect("l+3/2 > 0");
    let ln_mag = (lf + 0.5) * k.ln() + ln_num - ln_den1 - ga.0 - gb.0;
    ga.1 * gb.1 * ln_mag.exp()
}

/// psi_4 = 1F3(l+1; l+3/2, (l+B+2)/2, (l-B+2)/2; -k^2/16).
pub fn psi4(params: &GwParams, l: u32, n: i64, m: i64, target_rel: f64) -> Result<f64> {
    let k = params.doppler_k();
    let b = b_orb(params, n, m);
    let lf = l as f64;
    hypergeom_1f3(
        lf + 1.0,
        lf + 1.5,
        (lf + b + 2.0) / 2.0,
        (lf - b + 2.0) / 2.0,
        -k * k / 16.0,
        target_rel,
    )
}

/// One term of the triple sum with its factor breakdown.
#[derive(Debug, Clone)]
pub struct SignalTerm {
    pub n: i64,
    pub l: u32,
    pub m: i64,
    pub psi0: Complex64,
    pub psi1: Complex64,
    pub psi2: Complex64,
    pub psi3: f64,
    pub psi4: f64,
    pub product: Complex64,
}

#[derive(Debug, Clone)]
pub struct FtResult {
    pub total: Complex64,
    /// Every evaluated term with a nonzero product, in (n, l, m) order.
    pub terms: Vec<SignalTerm>,
    /// |last l-shell contribution| / |total| — the convergence report.
    pub tail_estimate: f64,
    pub truncation_warning: bool,
}

impl FtResult {
    /// The largest-|product| terms for inspection.
    pub fn top_terms(&self, count: usize) -> Vec<&SignalTerm> {
        let mut refs: Vec<&SignalTerm> = self.terms.iter().collect();
        refs.sort_by(|a, b| {
            b.product
                .norm()
                .partial_cmp(&a.product.norm())
                .unwrap()
                .then_with(|| (a.n, a.l, a.m).cmp(&(b.n, b.l, b.m)))
        });
        refs.truncate(count);
        refs
    }
}

/// Truncated triple sum over (n, l, m), accumulated in fixed lexicographic
/// order with compensated summation so reruns are bit-identical.
pub fn ft_signal(params: &GwParams, policy: &DispatchPolicy) -> Result<FtResult> {
    params.validate()?;
    let target_rel = 1e-12;
    let mut terms = Vec::new();
    let mut shell_sums: BTreeMap<u32, Complex64> = BTreeMap::new();

    // psi_1 depends only on n; compute once per n
    let mut psi1_cache: BTreeMap<i64, Complex64> = BTreeMap::new();
    for n in params.n_min..=params.n_max {
        psi1_cache.insert(n, psi1(params, n, policy)?);
    }

    let mut sum = Complex64::new(0.0, 0.0);
    let mut comp = Complex64::new(0.0, 0.0); // Kahan compensation
    for n in params.n_min..=params.n_max {
        let p1 = psi1_cache[&n];
        if p1.norm() == 0.0 {
            continue;
        }
        for l in 0..=params.l_max {
            for m in -(l as i64)..=(l as i64) {
                let p0 = psi0(params, l, m as i32)?;
                let p2 = psi2(params, l, n, m);
                let p3 = psi3(params, l, n, m);
                let p4 = if p3 == 0.0 {
                    0.0
                } else {
                    psi4(params, l, n, m, target_rel)?
                };
                let product = p0 * p1 * p2 * (p3 * p4);
                if product.norm() > 0.0 {
                    terms.push(SignalTerm {
                        n,
                        l,
                        m,
                        psi0: p0,
                        psi1: p1,
                        psi2: p2,
                        psi3: p3,
                        psi4: p4,
                        product,
                    });
                }
                *shell_sums.entry(l).or_insert(Complex64::new(0.0, 0.0)) += product;
                let y = product - comp;
                let t = sum + y;
                comp = (t - sum) - y;
                sum = t;
            }
        }
    }
    let tail_estimate = if sum.norm() > 0.0 {
        shell_sums
            .get(&params.l_max)
            .map(|c| c.norm() / sum.norm())
            .unwrap_or(0.0)
    } else {
        0.0
    };
    Ok(FtResult {
        total: sum,
        terms,
        tail_estimate,
        truncation_warning: tail_estimate > 1e-6,
    })
}
