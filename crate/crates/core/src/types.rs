//! Shared domain types, precision policy and error taxonomy.

use std::time::Duration;

/// Method used to produce a value, carried on every [`ExpansionResult`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    MeisselFirst,
    MeisselSecond,
    MeisselThird,
    DebyeBelow,
    DebyeAbove,
    Epsilon,
    WatsonBelow,
    WatsonAbove,
    Oracle,
    SmallArgSeries,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::MeisselFirst => "meissel1",
            Method::MeisselSecond => "meissel2",
            Method::MeisselThird => "meissel3",
            Method::DebyeBelow => "debye_below",
            Method::DebyeAbove => "debye_above",
            Method::Epsilon => "epsilon",
            Method::WatsonBelow => "watson_below",
            Method::WatsonAbove => "watson_above",
            Method::Oracle => "oracle",
            Method::SmallArgSeries => "small_arg",
        }
    }

    pub fn from_name(name: &str) -> Option<Method> {
        Some(match name {
            "meissel1" => Method::MeisselFirst,
            "meissel2" => Method::MeisselSecond,
            "meissel3" => Method::MeisselThird,
            "debye_below" => Method::DebyeBelow,
            "debye_above" => Method::DebyeAbove,
            "epsilon" => Method::Epsilon,
            "watson_below" => Method::WatsonBelow,
            "watson_above" => Method::WatsonAbove,
            "oracle" => Method::Oracle,
            "small_arg" => Method::SmallArgSeries,
            _ => return None,
        })
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Precision and truncation policy shared by the oracle and the expansions.
#[derive(Debug, Clone, PartialEq)]
pub struct PrecisionConfig {
    /// Target relative error for adaptive summation; must lie in (0, 1).
    pub target_rel_error: f64,
    /// Requested oracle digits; `None` means "auto" (20 digits, or enough to
    /// resolve `target_rel_error`, whichever is larger).
    pub oracle_digits: Option<u32>,
    /// Per-expansion truncation cap; `None` = all terms the tables provide.
    pub max_terms: Option<u32>,
    /// Working decimal digits for trigonometric phase reduction.
    pub phase_digits: u32,
}

impl Default for PrecisionConfig {
    fn default() -> Self {
        PrecisionConfig {
            target_rel_error: 1e-10,
            oracle_digits: None,
            max_terms: None,
            phase_digits: 34,
        }
    }
}

impl PrecisionConfig {
    /// Deterministic resolution of the "auto" oracle-digit rule.
    pub fn resolved_oracle_digits(&self) -> u32 {
        match self.oracle_digits {
            Some(d) => d,
            None => {
                let from_target = (-self.target_rel_error.log10()).ceil() as u32 + 5;
                from_target.max(20)
            }
        }
    }

    pub fn validate(&self) -> Result<(), Error> {
        if !(self.target_rel_error > 0.0 && self.target_rel_error < 1.0) {
            return Err(Error::InvalidInput(format!(
                "target_rel_error must be in (0,1), got {}",
                self.target_rel_error
            )));
        }
        if self.phase_digits == 0 {
            return Err(Error::InvalidInput("phase_digits must be positive".into()));
        }
        Ok(())
    }
}

/// An (order, argument) pair plus precision policy — the universal input.
#[derive(Debug, Clone, PartialEq)]
pub struct BesselQuery {
    pub order: f64,
    pub argument: f64,
    pub policy: PrecisionConfig,
}

impl BesselQuery {
    pub fn new(order: f64, argument: f64) -> Result<Self, Error> {
        Self::with_policy(order, argument, PrecisionConfig::default())
    }

    pub fn with_policy(order: f64, argument: f64, policy: PrecisionConfig) -> Result<Self, Error> {
        if !order.is_finite() || !argument.is_finite() {
            return Err(Error::InvalidInput(format!(
                "order and argument must be finite, got nu={order}, x={argument}"
            )));
        }
        if argument < 0.0 {
            return Err(Error::InvalidInput(format!(
                "negative argument {argument} rejected; use the integer-order reflection identity"
            )));
        }
        policy.validate()?;
        Ok(BesselQuery { order, argument, policy })
    }

    /// z = x / nu, the parameterization used by all below/above expansions.
    pub fn z(&self) -> f64 {
        self.argument / self.order
    }

    /// Debye's below-order parameter alpha_D = arcsech(x/nu).
    /// Named alpha_D to avoid collision with the detector co-latitude alpha.
    pub fn alpha_d(&self) -> f64 {
        let z = self.z();
        ((1.0 + (1.0 - z * z).sqrt()) / z).ln()
    }

    /// Above-order parameter beta = arccos(nu/x) = arcsec(z).
    pub fn beta(&self) -> f64 {
        (self.order / self.argument).acos()
    }
}

/// Universal output: value, method provenance, truncation and error metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpansionResult {
    pub value: f64,
    pub method: Method,
    pub terms_used: u32,
    /// `None` means unknown. For asymptotic series this is the magnitude of
    /// the last retained term — a heuristic, not a bound; `rigorous` is true
    /// only for the Watson formulas and the oracle.
    pub est_error: Option<f64>,
    pub rigorous: bool,
    /// Set when the query sits inside the transition band where the method's
    /// own expansion variable is blowing up.
    pub precision_loss: bool,
    pub elapsed: Duration,
}

/// Classification of (nu, x) into evaluation zones.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RegimeTag {
    SmallArgument,
    Below,
    TransitionBelow,
    TransitionAbove,
    Above,
}

impl std::fmt::Display for RegimeTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            RegimeTag::SmallArgument => "small_argument",
            RegimeTag::Below => "below",
            RegimeTag::TransitionBelow => "transition_below",
            RegimeTag::TransitionAbove => "transition_above",
            RegimeTag::Above => "above",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Regime {
    pub tag: RegimeTag,
    /// Signed distance of x from the order in units of nu^(1/3).
    pub margin: f64,
}

/// Error taxonomy shared by every module.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("wrong regime for {method}: {detail}")]
    WrongRegime { method: Method, detail: String },
    #[error("outside validity radius: {0}")]
    OutOfValidity(String),
    #[error("out of range: {0}")]
    OutOfRange(String),
    #[error("precision cap exceeded: {0}")]
    CapExceeded(String),
    #[error("pole in parameters: {0}")]
    PoleInParameters(String),
    #[error("no method applicable for nu={nu}, x={x}")]
    NoMethodApplicable { nu: f64, x: f64 },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
