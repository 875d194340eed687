//! Shared value types: the precision context, entry-law moment profiles and
//! the bulk scaling that maps a window `(ξ, μ, ν)` onto spectral arguments.
//!
//! The entry law always has mean 0 and variance 1/2. That normalization is
//! baked into every recursion in this crate, so it is not a parameter; a law
//! is described by its fourth moment `b` alone.

use rug::float::Constant;
use rug::{Float, Rational};

use crate::error::{Error, Result};

/// Arbitrary-precision real used by every exact route.
pub type Real = Float;

const MODULE: &str = "domain";

/// Mantissa width, in bits, of the [`Real`] values an evaluation works with.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Precision(u32);

impl Precision {
    /// IEEE double width; meant for quick Monte Carlo cross-checks.
    pub const P53: Precision = Precision(53);
    pub const P128: Precision = Precision(128);
    pub const P256: Precision = Precision(256);

    /// Width at which decimal inputs are parsed before being rounded into the
    /// active tier.
    pub const PARSE: Precision = Precision::P256;

    pub fn new(bits: u32) -> Result<Self> {
        match bits {
            53 | 128 | 256 => Ok(Precision(bits)),
            _ => Err(Error::domain(
                MODULE,
                format!("precision must be one of 53, 128, 256 bits, got {bits}"),
            )),
        }
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    /// Default tier for recursions up to matrix size `n`: 128 bits up to
    /// N = 1000 and 256 bits beyond, where the `μν·s − (μ²+ν²)·s` terms of
    /// the condensed recursion start to cancel heavily.
    pub fn for_size(n: usize) -> Self {
        if n <= 1000 {
            Precision::P128
        } else {
            Precision::P256
        }
    }

    /// Rounds any MPFR-assignable value into this tier.
    pub fn real<T>(self, value: T) -> Real
    where
        Float: rug::Assign<T>,
    {
        Float::with_val(self.0, value)
    }

    pub fn zero(self) -> Real {
        Float::new(self.0)
    }

    pub fn pi(self) -> Real {
        Float::with_val(self.0, Constant::Pi)
    }

    /// Parses a decimal literal at [`Precision::PARSE`] and then rounds it to
    /// this tier, so `"0.1"` denotes the same number at every tier's parse
    /// stage.
    pub fn parse(self, text: &str) -> Result<Real> {
        let parsed = Float::parse(text.trim()).map_err(|e| {
            Error::domain(
                MODULE,
                format!("cannot parse {text:?} as a real number: {e}"),
            )
        })?;
        let wide = Float::with_val(Precision::PARSE.0, parsed);
        if !wide.is_finite() {
            return Err(Error::domain(MODULE, format!("{text:?} is not finite")));
        }
        Ok(Float::with_val(self.0, &wide))
    }

    /// `2^-(bits - guard)`, the relative tolerance used by cross-route checks.
    pub fn rel_tol(self, guard: u32) -> f64 {
        2f64.powi(-((self.0 - guard) as i32))
    }
}

impl Default for Precision {
    fn default() -> Self {
        Precision::P128
    }
}

/// How an entry law is sampled in Monte Carlo runs.
#[derive(Clone, Debug, PartialEq)]
pub enum EntryLaw {
    /// Normal with mean 0 and variance 1/2.
    Gaussian,
    /// Symmetric on `{−1/√2, +1/√2}`.
    Rademacher,
    /// Uniform on `[−√(3/2), +√(3/2)]`.
    Uniform,
    /// Asymmetric two-point law `P(x = hi) = p`, `P(x = lo) = 1 − p`, with
    /// `hi = √((1−p)/(2p))` and `lo = −√(p/(2(1−p)))`.
    TwoPoint { p: f64 },
    /// Moments only; no sampler.
    None,
}

/// An entry law `Q`, described by the only moment the correlation function
/// depends on.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentProfile {
    label: String,
    fourth_moment: Rational,
    law: EntryLaw,
}

impl MomentProfile {
    /// A law known only through its fourth moment `b`.
    ///
    /// `b ≥ 1/4` is required: with variance 1/2, Jensen gives `E x⁴ ≥ 1/4`.
    pub fn moments_only(label: impl Into<String>, fourth_moment: Rational) -> Result<Self> {
        Self::build(label.into(), fourth_moment, EntryLaw::None)
    }

    pub fn gaussian() -> Self {
        Self::build(
            "gaussian".into(),
            Rational::from((3, 4)),
            EntryLaw::Gaussian,
        )
        .expect("valid fourth moment")
    }

    pub fn rademacher() -> Self {
        Self::build(
            "rademacher".into(),
            Rational::from((1, 4)),
            EntryLaw::Rademacher,
        )
        .expect("valid fourth moment")
    }

    pub fn uniform() -> Self {
        Self::build("uniform".into(), Rational::from((9, 20)), EntryLaw::Uniform)
            .expect("valid fourth moment")
    }

    /// The asymmetric two-point law with mean 0, variance 1/2 and fourth
    /// moment `b`. Needs `b > 1/4`; the smaller root `p < 1/2` is used so the
    /// law is genuinely skewed.
    pub fn two_point(fourth_moment: Rational) -> Result<Self> {
        if fourth_moment <= Rational::from((1, 4)) {
            return Err(Error::domain(
                MODULE,
                "a skewed two-point law needs fourth moment strictly above 1/4",
            ));
        }
        // (3 + 4b) p² − (3 + 4b) p + 1 = 0
        let k = 3.0 + 4.0 * fourth_moment.to_f64();
        let p = 0.5 * (1.0 - (1.0 - 4.0 / k).sqrt());
        Self::build("two-point".into(), fourth_moment, EntryLaw::TwoPoint { p })
    }

    /// Shipped sampler by label.
    pub fn from_label(label: &str) -> Result<Self> {
        match label {
            "gaussian" => Ok(Self::gaussian()),
            "rademacher" => Ok(Self::rademacher()),
            "uniform" => Ok(Self::uniform()),
            other => Err(Error::domain(
                MODULE,
                format!("unknown entry law {other:?}; expected gaussian, rademacher or uniform"),
            )),
        }
    }

    fn build(label: String, fourth_moment: Rational, law: EntryLaw) -> Result<Self> {
        if fourth_moment < Rational::from((1, 4)) {
            return Err(Error::domain(
                MODULE,
                format!("fourth moment {fourth_moment} is below the Jensen bound 1/4"),
            ));
        }
        Ok(MomentProfile {
            label,
            fourth_moment,
            law,
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn law(&self) -> &EntryLaw {
        &self.law
    }

    /// `b = E x⁴`.
    pub fn fourth_moment(&self) -> &Rational {
        &self.fourth_moment
    }

    /// Excess `b* = b − 3/4` over the Gaussian value.
    pub fn excess(&self) -> Rational {
        &self.fourth_moment - Rational::from((3, 4))
    }

    pub fn b(&self, prec: Precision) -> Real {
        prec.real(&self.fourth_moment)
    }
}

/// Matrix size and the two spectral points at which `f(N; μ, ν)` is taken.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralArgs {
    pub n: usize,
    pub mu: Real,
    pub nu: Real,
}

/// How the bulk centre `ξ_N` follows `N`.
#[derive(Clone, Debug, PartialEq)]
pub enum XiRule {
    /// `ξ_N = √N ξ`.
    Bulk,
    /// `ξ_N = √N ξ + shift/√N`.
    Shifted(Real),
}

/// A local window in the bulk of the spectrum.
///
/// The spectral points are
/// `μ_N = ξ_N + mu_off/(√N ϱ(ξ)) + η/√N` and
/// `ν_N = ξ_N + nu_off/(√N ϱ(ξ)) − η/√N`.
/// The usual window has `η = 0` and `ξ_N = √N ξ`; the symmetric form with
/// zero offsets and nonzero `η` is the one [`ScaledWindow::to_eta_form`]
/// produces.
#[derive(Clone, Debug, PartialEq)]
pub struct ScaledWindow {
    xi: Real,
    mu_off: Real,
    nu_off: Real,
    eta: Option<Real>,
    xi_rule: XiRule,
}

impl ScaledWindow {
    pub fn new(xi: Real, mu_off: Real, nu_off: Real) -> Result<Self> {
        if !xi.is_finite() || xi.clone().abs() >= 2 {
            return Err(Error::domain(
                MODULE,
                format!("bulk location must satisfy |xi| < 2, got {}", xi.to_f64()),
            ));
        }
        if !mu_off.is_finite() || !nu_off.is_finite() {
            return Err(Error::domain(MODULE, "window offsets must be finite"));
        }
        Ok(ScaledWindow {
            xi,
            mu_off,
            nu_off,
            eta: None,
            xi_rule: XiRule::Bulk,
        })
    }

    /// Convenience constructor from doubles (exact conversion).
    pub fn from_f64(xi: f64, mu_off: f64, nu_off: f64) -> Result<Self> {
        let p = Precision::PARSE;
        Self::new(p.real(xi), p.real(mu_off), p.real(nu_off))
    }

    pub fn with_eta(mut self, eta: Real) -> Self {
        self.eta = Some(eta);
        self
    }

    pub fn with_xi_rule(mut self, rule: XiRule) -> Self {
        self.xi_rule = rule;
        self
    }

    pub fn xi(&self) -> &Real {
        &self.xi
    }

    pub fn mu_off(&self) -> &Real {
        &self.mu_off
    }

    pub fn nu_off(&self) -> &Real {
        &self.nu_off
    }

    pub fn eta(&self) -> Option<&Real> {
        self.eta.as_ref()
    }

    pub fn xi_rule(&self) -> &XiRule {
        &self.xi_rule
    }

    pub fn rho(&self, prec: Precision) -> Real {
        semicircle_density(&self.xi, prec).expect("|xi| < 2 is a window invariant")
    }

    /// The same spectral points written with zero offsets:
    /// `ξ_N = √N ξ + π(μ+ν)/(√N √(4−ξ²))` and `η = π(μ−ν)/√(4−ξ²)`.
    ///
    /// Only windows in plain offset form (bulk rule, no `η`) can be
    /// converted.
    pub fn to_eta_form(&self, prec: Precision) -> Result<ScaledWindow> {
        if self.eta.is_some() || self.xi_rule != XiRule::Bulk {
            return Err(Error::precondition(
                MODULE,
                "only offset-form windows can be rewritten in eta form",
            ));
        }
        let root = four_minus_sq_sqrt(&self.xi, prec);
        let pi = prec.pi();
        let sum = prec.real(&self.mu_off + &self.nu_off);
        let diff = prec.real(&self.mu_off - &self.nu_off);
        let shift = prec.real(&pi * &sum) / &root;
        let eta = prec.real(&pi * &diff) / &root;
        Ok(ScaledWindow {
            xi: self.xi.clone(),
            mu_off: prec.zero(),
            nu_off: prec.zero(),
            eta: Some(eta),
            xi_rule: XiRule::Shifted(shift),
        })
    }
}

/// `√(4 − ξ²)`.
pub(crate) fn four_minus_sq_sqrt(xi: &Real, prec: Precision) -> Real {
    let sq = prec.real(xi.square_ref());
    (prec.real(4) - sq).sqrt()
}

/// Rejects `b` below the Jensen bound `1/4` (or not finite).
pub fn validate_fourth_moment(b: &Real) -> Result<()> {
    if !b.is_finite() || *b < 0.25 {
        return Err(Error::domain(
            MODULE,
            format!(
                "fourth moment {} must be finite and at least 1/4",
                b.to_f64()
            ),
        ));
    }
    Ok(())
}

/// Semicircle density `ϱ(ξ) = √(4 − ξ²)/(2π)` on `[−2, 2]`.
pub fn semicircle_density(xi: &Real, prec: Precision) -> Result<Real> {
    if !xi.is_finite() || xi.clone().abs() > 2 {
        return Err(Error::domain(
            MODULE,
            format!("semicircle density needs |xi| <= 2, got {}", xi.to_f64()),
        ));
    }
    let two_pi = prec.pi() * 2u32;
    Ok(four_minus_sq_sqrt(xi, prec) / two_pi)
}

/// Maps a window and matrix size `N ≥ 1` to the spectral points `(μ_N, ν_N)`.
pub fn scale_to_spectral(window: &ScaledWindow, n: usize, prec: Precision) -> Result<SpectralArgs> {
    if n == 0 {
        return Err(Error::domain(MODULE, "window scaling needs N >= 1"));
    }
    let sqrt_n = prec.real(n).sqrt();
    let rho = window.rho(prec);
    let mut centre = prec.real(&sqrt_n * &window.xi);
    if let XiRule::Shifted(shift) = &window.xi_rule {
        centre += prec.real(shift / &sqrt_n);
    }
    let scale = prec.real(&sqrt_n * &rho);
    let mut mu = centre.clone() + prec.real(&window.mu_off / &scale);
    let mut nu = centre + prec.real(&window.nu_off / &scale);
    if let Some(eta) = &window.eta {
        let step = prec.real(eta / &sqrt_n);
        mu += &step;
        nu -= &step;
    }
    Ok(SpectralArgs { n, mu, nu })
}
