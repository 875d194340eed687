//! Exact evaluation of `f(N; μ, ν) = E det(X_N − μ) det(X_N − ν)`.
//!
//! Two independent recursions are provided. [`full_system`] iterates the
//! coupled system for `f` and the four auxiliary minors correlations; it is
//! kept as a verification twin. [`condensed`] iterates the single recursion
//! for `c(N) = f(N)/N!` together with the even-step partial sums
//! `s(N) = c(N) + c(N−2) + …`, and is the route everything else builds on.
//!
//! Both keep every prefix `0..=N_max`. Terms whose index would be negative
//! are exact zeros.

use crate::domain::{scale_to_spectral, Precision, Real, ScaledWindow};
use crate::error::{Error, Result};

const MODULE: &str = "recursion";

fn at(v: &[Real], n: usize, back: usize) -> Option<&Real> {
    n.checked_sub(back).map(|i| &v[i])
}

fn check(x: &Real, n: usize) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(Error::Overflow { module: MODULE, n })
    }
}

/// All five sequences of the coupled system, indexed by matrix size.
///
/// `f11` and `f11_chi` are defined from `N = 2` on and `f10`, `f01` from
/// `N = 1`; the undefined leading slots hold zero.
#[derive(Clone, Debug)]
pub struct FullSystemState {
    pub f: Vec<Real>,
    pub f11: Vec<Real>,
    pub f11_chi: Vec<Real>,
    pub f10: Vec<Real>,
    pub f01: Vec<Real>,
}

impl FullSystemState {
    pub fn n_max(&self) -> usize {
        self.f.len() - 1
    }
}

/// Forward iteration of the coupled recursion for `f`, `f₁₁`, `f₁₁^χ`,
/// `f₁₀` and `f₀₁` up to `N_max`.
pub fn full_system(
    n_max: usize,
    mu: &Real,
    nu: &Real,
    b: &Real,
    prec: Precision,
) -> Result<FullSystemState> {
    let zero = prec.zero();
    let len = n_max + 1;
    let mut f = vec![zero.clone(); len];
    let mut f11 = vec![zero.clone(); len];
    let mut f11_chi = vec![zero.clone(); len];
    let mut f10 = vec![zero.clone(); len];
    let mut f01 = vec![zero; len];

    let munu = prec.real(mu * nu);
    let one_plus_munu = prec.real(&munu + 1u32);
    // E|X_ij|⁴ = 2b + 1/2
    let fourth = prec.real(b * 2u32) + 0.5f64;

    f[0] = prec.real(1);
    for n in 1..=n_max {
        let m1 = prec.real(n - 1);

        // f10(N) = −(N−1) f01(N−1) − ν f(N−1), and symmetrically for f01.
        let mut x = -prec.real(nu * &f[n - 1]);
        let mut y = -prec.real(mu * &f[n - 1]);
        if n >= 2 {
            x -= prec.real(&m1 * &f01[n - 1]);
            y -= prec.real(&m1 * &f10[n - 1]);
        }
        f10[n] = x;
        f01[n] = y;

        if n >= 2 {
            let m2 = prec.real(n - 2);
            let m2m3 = prec.real((n - 2) * n.saturating_sub(3));
            let mut a = prec.real(&munu * &f[n - 2]);
            let mut chi = f[n - 2].clone();
            if let Some(fm3) = at(&f, n, 3) {
                let t = prec.real(&m2 * fm3);
                a += &t;
                chi += &t;
            }
            if n >= 3 {
                a += prec.real(&m2m3 * &f11[n - 2]);
                chi += prec.real(&m2m3 * &f11_chi[n - 2]);
                // Summed as one commutative pair so that swapping μ and ν
                // is bitwise symmetric.
                let t = prec.real(&m2 * nu) * &f10[n - 2];
                let u = prec.real(&m2 * mu) * &f01[n - 2];
                a += t + u;
            }
            check(&a, n)?;
            check(&chi, n)?;
            f11[n] = a;
            f11_chi[n] = chi;
        }

        let mut next = prec.real(&one_plus_munu * &f[n - 1]);
        if n >= 2 {
            next += prec.real(&fourth * &m1) * &f[n - 2];
            let t = prec.real(&m1 * nu) * &f10[n - 1];
            let u = prec.real(&m1 * mu) * &f01[n - 1];
            next += t + u;
        }
        if n >= 3 {
            let m1m2 = prec.real((n - 1) * (n - 2));
            let pair = prec.real(&f11[n - 1] + &f11_chi[n - 1]);
            next += m1m2 * pair;
        }
        check(&next, n)?;
        f[n] = next;
    }

    Ok(FullSystemState {
        f,
        f11,
        f11_chi,
        f10,
        f01,
    })
}

/// `c(N) = f(N)/N!` and its even-step partial sums, optionally damped.
///
/// With damping exponent `δ` the arrays hold `d(N) = c(N) e^{−Nδ}` and
/// `ŝ(N) = d(N) + e^{−2δ} ŝ(N−2)` instead.
#[derive(Clone, Debug)]
pub struct CondensedState {
    pub c: Vec<Real>,
    pub s: Vec<Real>,
    pub delta: Option<Real>,
}

impl CondensedState {
    pub fn n_max(&self) -> usize {
        self.c.len() - 1
    }

    /// `f(N) = N!·c(N)`; with damping this is `N!·e^{−Nδ}·f(N)/N!`, i.e. the
    /// damped value rescaled by `N!` only.
    pub fn f(&self, n: usize, prec: Precision) -> Real {
        let fact = prec.real(Real::factorial(n as u32));
        fact * &self.c[n]
    }
}

/// Whether the `(2b − 3/2)` correction enters the condensed recursion. Only
/// tests switch it off, to check the Gaussian case reduces correctly.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Cumulant {
    Included,
    #[cfg_attr(not(test), allow(dead_code))]
    Omitted,
}

/// The condensed recursion
///
/// ```text
/// N c(N) = c(N−1) + N c(N−2) + μν (s(N−1) + s(N−3)) − (μ²+ν²) s(N−2)
///          + (2b − 3/2) (c(N−2) − c(N−4))
/// ```
///
/// with `c(0) = 1`.
pub fn condensed(
    n_max: usize,
    mu: &Real,
    nu: &Real,
    b: &Real,
    prec: Precision,
) -> Result<CondensedState> {
    condensed_kernel(n_max, mu, nu, b, None, Cumulant::Included, prec)
}

/// The condensed recursion for `d(N) = c(N) e^{−Nδ}`.
///
/// Used at the bulk scaling with `δ = ξ²/2`, where `c(N)` itself carries an
/// `e^{Nξ²/2}` growth.
pub fn damped_condensed(
    n_max: usize,
    mu: &Real,
    nu: &Real,
    b: &Real,
    delta: &Real,
    prec: Precision,
) -> Result<CondensedState> {
    if delta.is_sign_negative() && !delta.is_zero() || !delta.is_finite() {
        return Err(Error::domain(
            MODULE,
            "damping exponent must be finite and >= 0",
        ));
    }
    condensed_kernel(n_max, mu, nu, b, Some(delta), Cumulant::Included, prec)
}

pub(crate) fn condensed_kernel(
    n_max: usize,
    mu: &Real,
    nu: &Real,
    b: &Real,
    delta: Option<&Real>,
    cumulant: Cumulant,
    prec: Precision,
) -> Result<CondensedState> {
    // e^{−kδ} for k = 1..=4
    let weights: Option<[Real; 4]> = delta.map(|d| {
        let w1 = prec.real(-d).exp();
        let w2 = prec.real(w1.square_ref());
        let w3 = prec.real(&w2 * &w1);
        let w4 = prec.real(w2.square_ref());
        [w1, w2, w3, w4]
    });
    let weighted = |x: &Real, k: usize| -> Real {
        match &weights {
            Some(w) => prec.real(x * &w[k - 1]),
            None => x.clone(),
        }
    };

    let munu = prec.real(mu * nu);
    let sum_sq = prec.real(mu.square_ref()) + prec.real(nu.square_ref());
    let kappa = prec.real(b * 2u32) - 1.5f64;

    let len = n_max + 1;
    let mut c = Vec::with_capacity(len);
    let mut s: Vec<Real> = Vec::with_capacity(len);
    c.push(prec.real(1));
    s.push(prec.real(1));

    for n in 1..=n_max {
        let mut acc = weighted(&c[n - 1], 1);
        acc += prec.real(&munu * &weighted(&s[n - 1], 1));
        if let Some(cm2) = at(&c, n, 2) {
            let cm2w = weighted(cm2, 2);
            acc += prec.real(&cm2w * n as u64);
            acc -= prec.real(&sum_sq * &weighted(&s[n - 2], 2));
            if cumulant == Cumulant::Included {
                let mut diff = cm2w;
                if let Some(cm4) = at(&c, n, 4) {
                    diff -= weighted(cm4, 4);
                }
                acc += prec.real(&kappa * &diff);
            }
        }
        if let Some(sm3) = at(&s, n, 3) {
            acc += prec.real(&munu * &weighted(sm3, 3));
        }
        let cn = acc / n as u64;
        check(&cn, n)?;
        let sn = match at(&s, n, 2) {
            Some(sm2) => prec.real(&cn + &weighted(sm2, 2)),
            None => cn.clone(),
        };
        c.push(cn);
        s.push(sn);
    }

    Ok(CondensedState {
        c,
        s,
        delta: delta.cloned(),
    })
}

/// `√(1/(2πN)) · e^{−Nξ²/2} · f(N; μ_N, ν_N)/N!` at the window's spectral
/// points: the pre-limit side of the sine-kernel limit.
pub fn scaled_correlation(
    window: &ScaledWindow,
    n: usize,
    b: &Real,
    prec: Precision,
) -> Result<Real> {
    let args = scale_to_spectral(window, n, prec)?;
    let delta = prec.real(window.xi().square_ref()) / 2u32;
    let state = damped_condensed(n, &args.mu, &args.nu, b, &delta, prec)?;
    Ok(prelimit_factor(n, prec) * &state.c[n])
}

/// `√(1/(2πN))`.
pub(crate) fn prelimit_factor(n: usize, prec: Precision) -> Real {
    let two_pi_n = prec.pi() * 2u32 * n as u64;
    two_pi_n.recip_sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const P: Precision = Precision::P128;

    fn rel(a: &Real, b: &Real) -> f64 {
        let d = Real::with_val(256, a - b).abs();
        if b.is_zero() {
            d.to_f64()
        } else {
            (d / b.clone().abs()).to_f64()
        }
    }

    #[test]
    fn small_cases() {
        let (mu, nu, b) = (P.real(0.3), P.real(-0.7), P.real(0.45));
        let st = full_system(0, &mu, &nu, &b, P).unwrap();
        assert_eq!(st.f, vec![P.real(1)]);

        let st = full_system(1, &mu, &nu, &b, P).unwrap();
        assert_eq!(st.f[1], P.real(1) + P.real(&mu * &nu));

        let zero = P.zero();
        for bv in [0.25, 0.75, 3.0, 0.45] {
            let b = P.real(bv);
            let st = full_system(2, &zero, &zero, &b, P).unwrap();
            let expect = P.real(&b * 2u32) + 1.5f64;
            assert_eq!(st.f[2], expect);
            let cs = condensed(2, &zero, &zero, &b, P).unwrap();
            assert_eq!(cs.c[0], 1);
            assert_eq!(cs.c[2], expect / 2u32);
        }
    }

    #[test]
    fn routes_agree_on_grid() {
        let tol = P.rel_tol(28);
        for mu in [-1.1, 0.0, 0.4, 2.0] {
            for nu in [-0.7, 0.0, 2.0, 0.3] {
                for bv in [0.25, 0.75, 3.0] {
                    let (m, v, b) = (P.real(mu), P.real(nu), P.real(bv));
                    let full = full_system(50, &m, &v, &b, P).unwrap();
                    let cond = condensed(50, &m, &v, &b, P).unwrap();
                    for n in 0..=50 {
                        let r = rel(&cond.f(n, P), &full.f[n]);
                        assert!(r <= tol, "N={n} mu={mu} nu={nu} b={bv}: {r:e}");
                    }
                }
            }
        }
    }

    #[test]
    fn cross_route_at_n4() {
        let (m, v, b) = (P.real(0.3), P.real(-0.7), P.real(0.75));
        let full = full_system(4, &m, &v, &b, P).unwrap();
        let cond = condensed(4, &m, &v, &b, P).unwrap();
        assert!(rel(&cond.f(4, P), &full.f[4]) <= 2f64.powi(-100));
    }

    #[test]
    fn partial_sums_invariant() {
        let (m, v, b) = (P.real(1.3), P.real(-0.2), P.real(0.6));
        let st = condensed(30, &m, &v, &b, P).unwrap();
        assert_eq!(st.s[0], st.c[0]);
        assert_eq!(st.s[1], st.c[1]);
        for n in 2..=30 {
            assert_eq!(st.s[n], P.real(&st.c[n] + &st.s[n - 2]));
        }
    }

    #[test]
    fn zero_damping_is_bitwise_identical() {
        let (m, v, b) = (P.real(0.9), P.real(-1.4), P.real(2.0));
        let plain = condensed(40, &m, &v, &b, P).unwrap();
        let damped = damped_condensed(40, &m, &v, &b, &P.zero(), P).unwrap();
        assert_eq!(plain.c, damped.c);
        assert_eq!(plain.s, damped.s);
    }

    #[test]
    fn damping_matches_undamped_oracle() {
        let hi = Precision::P256;
        // N = 30, μ = ν = √30, b = 3/4, δ = 1/2
        let root = hi.real(30).sqrt();
        let b = hi.real(0.75);
        let plain = condensed(30, &root, &root, &b, hi).unwrap();
        let damped = damped_condensed(30, &root, &root, &b, &hi.real(0.5), hi).unwrap();
        let expect = hi.real(&plain.c[30]) * hi.real(-15).exp();
        assert!(rel(&damped.c[30], &expect) < 1e-70);

        // N = 10, μ = ν = 0, δ = 0.1
        let zero = P.zero();
        let plain = condensed(10, &zero, &zero, &b, P).unwrap();
        let delta = P.parse("0.1").unwrap();
        let damped = damped_condensed(10, &zero, &zero, &b, &delta, P).unwrap();
        let expect = P.real(&plain.c[10]) * (-delta * 10u32).exp();
        assert!(rel(&damped.c[10], &expect) < 1e-35);

        assert!(damped_condensed(3, &zero, &zero, &b, &P.real(-0.1), P).is_err());
    }

    #[test]
    fn gaussian_cumulant_term_vanishes() {
        let b = P.real(0.75);
        for (mu, nu) in [(0.3, -0.7), (2.0, 2.0), (0.0, 1.5)] {
            let (m, v) = (P.real(mu), P.real(nu));
            let with = condensed_kernel(40, &m, &v, &b, None, Cumulant::Included, P).unwrap();
            let without = condensed_kernel(40, &m, &v, &b, None, Cumulant::Omitted, P).unwrap();
            assert_eq!(with.c, without.c);
        }
    }

    #[test]
    fn scaled_correlation_examples() {
        let b = P.real(0.75);
        let w = ScaledWindow::from_f64(0.0, 0.0, 0.0).unwrap();
        let one = scaled_correlation(&w, 1, &b, P).unwrap();
        let expect = (P.pi() * 2u32).recip_sqrt();
        assert!(rel(&one, &expect) < 1e-37);

        let four = scaled_correlation(&w, 4, &b, P).unwrap();
        let zero = P.zero();
        let c4 = condensed(4, &zero, &zero, &b, P).unwrap().c[4].clone();
        let expect = (P.pi() * 8u32).recip_sqrt() * c4;
        assert!(rel(&four, &expect) < 1e-37);
    }

    #[test]
    fn large_argument_stays_finite() {
        // Strongly damped evaluation far out; the MPFR exponent range holds.
        let p = Precision::P256;
        let mu = p.real(4000) / 1u32;
        let st = condensed(3000, &mu, &mu, &p.real(0.75), p).unwrap();
        assert!(st.c[3000].is_finite());
    }

    proptest! {
        #[test]
        fn swap_symmetry(mu in -3.0f64..3.0, nu in -3.0f64..3.0, b in 0.25f64..4.0, n in 0usize..40) {
            let (m, v, bb) = (P.real(mu), P.real(nu), P.real(b));
            let a = condensed(n, &m, &v, &bb, P).unwrap();
            let s = condensed(n, &v, &m, &bb, P).unwrap();
            prop_assert_eq!(&a.c, &s.c);
            let fa = full_system(n, &m, &v, &bb, P).unwrap();
            let fs = full_system(n, &v, &m, &bb, P).unwrap();
            prop_assert_eq!(&fa.f, &fs.f);
        }
    }
}
