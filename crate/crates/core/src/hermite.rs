//! Mean characteristic polynomial `g(N; μ) = E det(X_N − μ)`, its Hermite
//! form, and the centered correlation `f̃ = f − g(μ)·g(ν)`.

use rug::ops::Pow;

use crate::domain::{semicircle_density, Precision, Real};
use crate::error::{Error, Result};
use crate::recursion::condensed;

const MODULE: &str = "hermite";

/// `g(0..=N; μ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct MeanDetSequence {
    pub g: Vec<Real>,
}

/// `g(N) = −μ g(N−1) − (N−1) g(N−2)`, `g(0) = 1`.
pub fn g_recursion(n_max: usize, mu: &Real, prec: Precision) -> Result<MeanDetSequence> {
    let mut g = Vec::with_capacity(n_max + 1);
    g.push(prec.real(1));
    for n in 1..=n_max {
        let mut next = -prec.real(mu * &g[n - 1]);
        if n >= 2 {
            next -= prec.real(&g[n - 2] * (n as u64 - 1));
        }
        if !next.is_finite() {
            return Err(Error::Overflow { module: MODULE, n });
        }
        g.push(next);
    }
    Ok(MeanDetSequence { g })
}

/// Physicists' Hermite polynomial by `H_N = 2x H_{N−1} − 2(N−1) H_{N−2}`.
pub fn hermite_h(n: usize, x: &Real, prec: Precision) -> Result<Real> {
    let two_x = prec.real(x * 2u32);
    let mut prev = prec.zero();
    let mut cur = prec.real(1);
    for k in 1..=n {
        let mut next = prec.real(&two_x * &cur);
        if k >= 2 {
            next -= prec.real(&prev * (2 * (k as u64 - 1)));
        }
        if !next.is_finite() {
            return Err(Error::Overflow {
                module: MODULE,
                n: k,
            });
        }
        prev = std::mem::replace(&mut cur, next);
    }
    Ok(cur)
}

/// `(−1)^N 2^{−N/2} H_N(μ/√2)`.
pub fn g_via_hermite(n: usize, mu: &Real, prec: Precision) -> Result<Real> {
    let sqrt2 = prec.real(2).sqrt();
    let h = hermite_h(n, &prec.real(mu / &sqrt2), prec)?;
    let scale = prec.real(2).pow(-(n as f64) / 2.0);
    let value = h * scale;
    Ok(if n % 2 == 1 { -value } else { value })
}

/// `f̃(N; μ, ν) = f(N; μ, ν) − g(N; μ) g(N; ν)`.
pub fn centered_correlation(
    n: usize,
    mu: &Real,
    nu: &Real,
    b: &Real,
    prec: Precision,
) -> Result<Real> {
    let f = condensed(n, mu, nu, b, prec)?.f(n, prec);
    let gm = g_recursion(n, mu, prec)?.g.pop().expect("nonempty");
    let gn = g_recursion(n, nu, prec)?.g.pop().expect("nonempty");
    Ok(f - gm * gn)
}

/// `|e^{−Nξ²/4} g(N; √N ξ + μ/(√N ϱ(ξ)))| / (N^{−1/4} √(N!))`.
///
/// Runs the recursion for `g(k)/√(k!)` in double precision with an explicit
/// log-scale, so the ratio stays representable for any `N`.
pub fn bound_ratio(n: usize, xi: f64, mu_off: f64) -> Result<f64> {
    if !xi.is_finite() || xi.abs() >= 2.0 {
        return Err(Error::domain(
            MODULE,
            format!("bound ratio needs |xi| < 2, got {xi}"),
        ));
    }
    if n == 0 {
        return Err(Error::domain(MODULE, "bound ratio needs N >= 1"));
    }
    let p = Precision::P53;
    let rho = semicircle_density(&p.real(xi), p)?.to_f64();
    let nf = n as f64;
    let point = nf.sqrt() * xi + mu_off / (nf.sqrt() * rho);

    // r_k = g(k)/√(k!) with r_k = −(μ/√k) r_{k−1} − √((k−1)/k) r_{k−2};
    // the true value is r · e^{log_scale}.
    let (mut prev, mut cur, mut log_scale) = (0.0f64, 1.0f64, 0.0f64);
    for k in 1..=n {
        let kf = k as f64;
        let next = -(point / kf.sqrt()) * cur - ((kf - 1.0) / kf).sqrt() * prev;
        prev = cur;
        cur = next;
        let mag = cur.abs().max(prev.abs());
        if mag > 1e100 || (mag < 1e-100 && mag > 0.0) {
            prev /= mag;
            cur /= mag;
            log_scale += mag.ln();
        }
    }
    if cur == 0.0 {
        return Ok(0.0);
    }
    let log_ratio = cur.abs().ln() + log_scale - nf * xi * xi / 4.0 + nf.ln() / 4.0;
    Ok(log_ratio.exp())
}

/// [`bound_ratio`] for every `N` in `1..=n_max`.
pub fn bound_ratio_sequence(n_max: usize, xi: f64, mu_off: f64) -> Result<Vec<f64>> {
    (1..=n_max).map(|n| bound_ratio(n, xi, mu_off)).collect()
}
