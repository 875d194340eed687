//! Sine-kernel limits of the rescaled correlation, convergence studies
//! against them, and a contour-quadrature route to `c(N)`.

use rayon::prelude::*;
use rug::ops::Pow;
use rug::{Complex, Float};

use crate::domain::{
    four_minus_sq_sqrt, scale_to_spectral, semicircle_density, Precision, Real, ScaledWindow,
    XiRule,
};
use crate::error::{Error, Result};
use crate::hermite::g_recursion;
use crate::recursion::{damped_condensed, prelimit_factor, scaled_correlation};

const MODULE: &str = "asymptotics";

/// Below this `|x|`, `sin x / x` is taken from its Taylor series.
const SINC_SERIES_CUTOFF: f64 = 1e-4;

/// Required bound on `|Im| / |Re|` of a contour result at 128 bits and above.
pub const CONTOUR_IMAG_TOL: f64 = 1e-20;

/// `sin x / x` with `sin 0 / 0 = 1`.
pub fn sinc(x: &Real, prec: Precision) -> Real {
    if x.clone().abs() < SINC_SERIES_CUTOFF {
        let x2 = prec.real(x.square_ref());
        let mut term = prec.real(1);
        let mut acc = prec.real(1);
        for k in 1u32.. {
            term = -term * &x2 / (2 * k * (2 * k + 1));
            acc += &term;
            if term.clone().abs() < prec.rel_tol(0) / 4.0 {
                break;
            }
        }
        acc
    } else {
        prec.real(x.sin_ref()) / x
    }
}

fn complex_sinc(w: &Complex, prec: Precision) -> Complex {
    let modulus = Float::with_val(prec.bits(), w.abs_ref());
    if modulus < SINC_SERIES_CUTOFF {
        let w2 = Complex::with_val(prec.bits(), w.square_ref());
        let mut term = Complex::with_val(prec.bits(), 1);
        let mut acc = Complex::with_val(prec.bits(), 1);
        for k in 1u32.. {
            term = -term * &w2 / (2 * k * (2 * k + 1));
            acc += &term;
            if Float::with_val(53, term.abs_ref()) < prec.rel_tol(0) / 4.0 {
                break;
            }
        }
        acc
    } else {
        Complex::with_val(prec.bits(), w.sin_ref()) / w
    }
}

fn excess_factor(b: &Real, prec: Precision) -> Real {
    (prec.real(b) - 0.75f64).exp()
}

fn require_offset_form(window: &ScaledWindow) -> Result<()> {
    if window.eta().is_some() || *window.xi_rule() != XiRule::Bulk {
        return Err(Error::precondition(
            MODULE,
            "expected a window in offset form (no eta, bulk xi rule)",
        ));
    }
    Ok(())
}

/// `exp(b − 3/4) · e^{ξ(μ+ν)/(2ϱ(ξ))} · ϱ(ξ) · sin π(μ−ν) / π(μ−ν)`.
pub fn sine_kernel_limit(window: &ScaledWindow, b: &Real, prec: Precision) -> Result<Real> {
    require_offset_form(window)?;
    let rho = window.rho(prec);
    let sum = prec.real(window.mu_off() + window.nu_off());
    let drift = (prec.real(window.xi() * &sum) / (prec.real(&rho * 2u32))).exp();
    let diff = prec.real(window.mu_off() - window.nu_off());
    let kernel = sinc(&(prec.pi() * diff), prec);
    Ok(excess_factor(b, prec) * drift * rho * kernel)
}

/// `exp(b − 3/4) · √(4−ξ²) · sin(√(4−ξ²) η) / (√(4−ξ²) η)` for complex `η`.
pub fn sine_kernel_limit_eta(
    xi: &Real,
    eta: &Complex,
    b: &Real,
    prec: Precision,
) -> Result<Complex> {
    if !xi.is_finite() || xi.clone().abs() >= 2 {
        return Err(Error::domain(MODULE, "eta limit needs |xi| < 2"));
    }
    let root = four_minus_sq_sqrt(xi, prec);
    let w = Complex::with_val(prec.bits(), eta * &root);
    let scale = excess_factor(b, prec) * root;
    Ok(complex_sinc(&w, prec) * scale)
}

/// Real-`η` form of [`sine_kernel_limit_eta`].
pub fn sine_kernel_limit_eta_real(
    xi: &Real,
    eta: &Real,
    b: &Real,
    prec: Precision,
) -> Result<Real> {
    if !xi.is_finite() || xi.clone().abs() >= 2 {
        return Err(Error::domain(MODULE, "eta limit needs |xi| < 2"));
    }
    let root = four_minus_sq_sqrt(xi, prec);
    let kernel = sinc(&prec.real(eta * &root), prec);
    Ok(excess_factor(b, prec) * root * kernel)
}

/// `√(2π/N) · e^{−ξ_N²/2} · f(N; ξ_N + η/√N, ξ_N − η/√N)/N!` for a window in
/// eta form (zero offsets), with `ξ_N` from the window's rule.
pub fn eta_prelimit(window: &ScaledWindow, n: usize, b: &Real, prec: Precision) -> Result<Real> {
    if !window.mu_off().is_zero() || !window.nu_off().is_zero() {
        return Err(Error::precondition(
            MODULE,
            "eta prelimit needs zero window offsets",
        ));
    }
    let args = scale_to_spectral(window, n, prec)?;
    let centre = prec.real(&args.mu + &args.nu) / 2u32;
    let delta = prec.real(centre.square_ref()) / (2 * n as u64);
    let state = damped_condensed(n, &args.mu, &args.nu, b, &delta, prec)?;
    let factor = (prec.pi() * 2u32 / n as u64).sqrt();
    Ok(factor * &state.c[n])
}

/// `√(1/(2πN)) · e^{−Nξ²/2} · f̃(N; μ_N, ν_N)/N!`, the centered analogue of
/// [`scaled_correlation`].
pub fn scaled_centered_correlation(
    window: &ScaledWindow,
    n: usize,
    b: &Real,
    prec: Precision,
) -> Result<Real> {
    let (raw, product) = damped_pair(window, n, b, prec)?;
    Ok(prelimit_factor(n, prec) * (raw - product))
}

/// `(e^{−Nδ} f/N!, e^{−Nδ} g(μ) g(ν)/N!)` at the window's spectral points,
/// `δ = ξ²/2`.
fn damped_pair(window: &ScaledWindow, n: usize, b: &Real, prec: Precision) -> Result<(Real, Real)> {
    let args = scale_to_spectral(window, n, prec)?;
    let delta = prec.real(window.xi().square_ref()) / 2u32;
    let raw = damped_condensed(n, &args.mu, &args.nu, b, &delta, prec)?.c[n].clone();
    let product = damped_mean_product(&args.mu, &args.nu, n, &delta, prec)?;
    Ok((raw, product))
}

fn damped_mean_product(
    mu: &Real,
    nu: &Real,
    n: usize,
    delta: &Real,
    prec: Precision,
) -> Result<Real> {
    let gm = g_recursion(n, mu, prec)?.g.pop().expect("nonempty");
    let gn = g_recursion(n, nu, prec)?.g.pop().expect("nonempty");
    let damp = (-prec.real(delta * n as u64)).exp();
    let fact = prec.real(Real::factorial(n as u32));
    Ok(gm * gn * damp / fact)
}

/// One line of a convergence study.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceRow {
    pub n: usize,
    pub prelimit: Real,
    pub limit: Real,
    pub abs_dev: Real,
}

impl ConvergenceRow {
    fn new(n: usize, prelimit: Real, limit: Real) -> Self {
        let abs_dev = Real::with_val(prelimit.prec().max(limit.prec()), &prelimit - &limit).abs();
        ConvergenceRow {
            n,
            prelimit,
            limit,
            abs_dev,
        }
    }

    pub fn rel_dev(&self) -> Real {
        Real::with_val(self.abs_dev.prec(), &self.abs_dev / &self.limit).abs()
    }
}

/// Working precision for a study point: the requested tier, raised to the
/// size-based default where that is wider.
fn study_precision(prec: Precision, n: usize) -> Precision {
    prec.max(Precision::for_size(n))
}

/// Pre-limit against limit for each `N` (rows sorted by `N`).
pub fn convergence_study(
    window: &ScaledWindow,
    b: &Real,
    n_list: &[usize],
    prec: Precision,
) -> Result<Vec<ConvergenceRow>> {
    require_offset_form(window)?;
    let mut ns = n_list.to_vec();
    ns.sort_unstable();
    if ns.first().is_some_and(|&n| n < 2) {
        return Err(Error::domain(
            MODULE,
            "convergence study needs every N >= 2",
        ));
    }
    ns.into_iter()
        .map(|n| {
            let p = study_precision(prec, n);
            let prelimit = scaled_correlation(window, n, b, p)?;
            let limit = sine_kernel_limit(window, b, p)?;
            Ok(ConvergenceRow::new(n, prelimit, limit))
        })
        .collect()
}

/// Which correlation a [`normalized_ratio`] normalizes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RatioKind {
    /// `E(D_μ D_ν) / √(E D_μ² · E D_ν²)`.
    Raw,
    /// The same with the determinants centered at their means.
    Centered,
}

/// Correlation of the characteristic polynomial at the window's two
/// spectral points, normalized by the second moments at each point.
/// Tends to `sin π(μ−ν)/π(μ−ν)` in either [`RatioKind`].
pub fn normalized_ratio(
    window: &ScaledWindow,
    n: usize,
    b: &Real,
    kind: RatioKind,
    prec: Precision,
) -> Result<Real> {
    require_offset_form(window)?;
    let prec = study_precision(prec, n);
    let args = scale_to_spectral(window, n, prec)?;
    let delta = prec.real(window.xi().square_ref()) / 2u32;
    let value = |x: &Real, y: &Real| -> Result<Real> {
        let raw = damped_condensed(n, x, y, b, &delta, prec)?.c[n].clone();
        Ok(match kind {
            RatioKind::Raw => raw,
            RatioKind::Centered => raw - damped_mean_product(x, y, n, &delta, prec)?,
        })
    };
    let cross = value(&args.mu, &args.nu)?;
    let left = value(&args.mu, &args.mu)?;
    let right = if args.mu == args.nu {
        left.clone()
    } else {
        value(&args.nu, &args.nu)?
    };
    if !(left.is_sign_positive() && !left.is_zero())
        || !(right.is_sign_positive() && !right.is_zero())
    {
        return Err(Error::Degenerate {
            module: MODULE,
            msg: format!("nonpositive second moment at N = {n}"),
        });
    }
    Ok(cross / (left * right).sqrt())
}

/// Nodes and radius for trapezoidal extraction of `c(N)` on `|z| = R`.
#[derive(Clone, Debug, PartialEq)]
pub struct ContourPlan {
    n: usize,
    radius: Real,
    nodes: usize,
    imag_bound: Option<f64>,
}

impl ContourPlan {
    /// Radius `R = 1 − 1/N` and `max(64, 8N)` nodes.
    pub fn new(n: usize, prec: Precision) -> Result<Self> {
        Self::with_nodes(n, (8 * n).max(64), prec)
    }

    /// Radius `R = 1 − 1/N` with an explicit node count `≥ 8N`.
    pub fn with_nodes(n: usize, nodes: usize, prec: Precision) -> Result<Self> {
        if n < 2 {
            return Err(Error::domain(MODULE, "contour route needs N >= 2"));
        }
        if nodes < 8 * n {
            return Err(Error::domain(
                MODULE,
                format!(
                    "contour route needs at least 8N = {} nodes, got {nodes}",
                    8 * n
                ),
            ));
        }
        let radius = prec.real(1) - prec.real(n).recip();
        Ok(ContourPlan {
            n,
            radius,
            nodes,
            imag_bound: None,
        })
    }

    /// Replaces the tier's default bound on the relative imaginary residue.
    pub fn with_imag_bound(mut self, bound: f64) -> Self {
        self.imag_bound = Some(bound);
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn radius(&self) -> &Real {
        &self.radius
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    /// `R^{Mq}`, the factor by which the first aliased coefficient
    /// `c(N + Mq)` leaks into the result.
    pub fn aliasing_factor(&self) -> Real {
        Real::with_val(self.radius.prec(), (&self.radius).pow(self.nodes as u32))
    }
}

/// A contour estimate of `c(N)` with its imaginary residue.
#[derive(Clone, Debug, PartialEq)]
pub struct ContourResult {
    pub value: Real,
    pub imag: Real,
}

impl ContourResult {
    pub fn relative_imag(&self) -> f64 {
        if self.value.is_zero() {
            if self.imag.is_zero() {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            Real::with_val(self.value.prec(), &self.imag / &self.value)
                .abs()
                .to_f64()
        }
    }
}

/// Bound on the relative imaginary residue at a given tier. Below 128 bits
/// rounding alone exceeds [`CONTOUR_IMAG_TOL`], so the bound follows the
/// tier's unit roundoff there.
pub fn contour_imag_bound(prec: Precision) -> f64 {
    CONTOUR_IMAG_TOL.max(prec.rel_tol(12))
}

/// Fixed-shape pairwise sum; the tree depends only on the slice length.
fn pairwise_sum(terms: &[Complex], prec: Precision) -> Complex {
    match terms.len() {
        0 => Complex::new(prec.bits()),
        1 => terms[0].clone(),
        len => {
            let (lo, hi) = terms.split_at(len / 2);
            pairwise_sum(lo, prec) + pairwise_sum(hi, prec)
        }
    }
}

/// `(1/Mq) Σ_j g(R e^{iθ_j}) (R e^{iθ_j})^{−N}`, `θ_j = 2πj/Mq`: the
/// equal-angle trapezoid rule for `(1/2πi)∮ g(z) z^{−N−1} dz`. For `g`
/// holomorphic on the closed disc this returns
/// `Σ_{k ≡ N mod Mq} [z^k]g · R^{k−N}`.
///
/// Node evaluations may run in parallel; the reduction order is fixed.
pub fn trapezoid_coefficient<G>(
    n: usize,
    radius: &Real,
    nodes: usize,
    prec: Precision,
    g: G,
) -> Complex
where
    G: Fn(&Complex) -> Complex + Sync,
{
    let bits = prec.bits();
    let two_pi = prec.pi() * 2u32;
    let inv_radius_pow = Real::with_val(bits, (radius).pow(n as u32)).recip();
    let terms: Vec<Complex> = (0..nodes)
        .into_par_iter()
        .map(|j| {
            let theta = Real::with_val(bits, &two_pi * j as u64) / nodes as u64;
            let (s, c) = theta.sin_cos(Real::new(bits));
            let z = Complex::with_val(
                bits,
                (
                    Real::with_val(bits, radius * &c),
                    Real::with_val(bits, radius * &s),
                ),
            );
            // z^{−N} = R^{−N} e^{−iNθ}, with Nθ reduced mod 2π exactly.
            let k = (n as u128 * j as u128 % nodes as u128) as u64;
            let phi = Real::with_val(bits, &two_pi * k) / nodes as u64;
            let (ps, pc) = phi.sin_cos(Real::new(bits));
            let rot = Complex::with_val(bits, (pc, -ps)) * &inv_radius_pow;
            g(&z) * rot
        })
        .collect();
    pairwise_sum(&terms, prec) / nodes as u64
}

/// `F(z)` from its closed form, principal branches (valid for `|z| < 1`).
pub fn egf_closed_form(z: &Complex, mu: &Real, nu: &Real, b: &Real, prec: Precision) -> Complex {
    let bits = prec.bits();
    let munu = prec.real(mu * nu);
    let half_sq = (prec.real(mu.square_ref()) + prec.real(nu.square_ref())) / 2u32;
    let excess = prec.real(b) - 0.75f64;
    let z2 = Complex::with_val(bits, z.square_ref());
    let q = Complex::with_val(bits, z / Complex::with_val(bits, 1 - &z2));
    let zq = Complex::with_val(bits, z * &q);
    let exponent = q * munu - zq * half_sq + z2 * excess;
    let one_minus = Complex::with_val(bits, 1 - z);
    let one_plus = Complex::with_val(bits, 1 + z);
    let denom = Complex::with_val(bits, one_minus.sqrt_ref()) * &one_minus * one_plus.sqrt();
    exponent.exp() / denom
}

/// `c(N) = f(N; μ, ν)/N!` by trapezoidal quadrature of the Cauchy integral
/// of `F` on the plan's circle.
///
/// The estimate carries the aliasing error `Σ_{j≥1} c(N + j·Mq) R^{j·Mq}`
/// in addition to rounding; see [`ContourPlan::aliasing_factor`].
pub fn contour_coefficient(
    mu: &Real,
    nu: &Real,
    b: &Real,
    plan: &ContourPlan,
    prec: Precision,
) -> Result<ContourResult> {
    let sum = trapezoid_coefficient(plan.n, &plan.radius, plan.nodes, prec, |z| {
        egf_closed_form(z, mu, nu, b, prec)
    });
    let (value, imag) = sum.into_real_imag();
    let result = ContourResult { value, imag };
    let residue = result.relative_imag();
    let bound = plan.imag_bound.unwrap_or_else(|| contour_imag_bound(prec));
    if residue.is_nan() || residue > bound {
        return Err(Error::Quadrature { residue, bound });
    }
    Ok(result)
}

/// Density at the window centre, re-exported for front ends.
pub fn window_density(window: &ScaledWindow, prec: Precision) -> Result<Real> {
    semicircle_density(window.xi(), prec)
}
