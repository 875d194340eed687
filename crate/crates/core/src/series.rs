//! Truncated power series and the closed-form exponential generating
//! function
//!
//! ```text
//! F(x) = exp(μν·x/(1−x²) − ½(μ²+ν²)·x²/(1−x²) + b*·x²) / ((1−x)^{3/2} (1+x)^{1/2})
//! ```
//!
//! whose Taylor coefficients are `c(N) = f(N; μ, ν)/N!`, with `b* = b − 3/4`.
//!
//! Series are generic over the coefficient field: [`Real`] for the working
//! route and [`Rational`] for exact checks at rational arguments.

use std::fmt;

use rug::{Float, Integer, Rational};

use crate::domain::Real;
use crate::error::{Error, Result};

const MODULE: &str = "series";

/// Coefficient field of a [`TruncatedSeries`].
///
/// Constructors take `self` as a template so floating coefficients inherit
/// its precision.
pub trait Coeff: Clone + PartialEq + fmt::Debug {
    fn zero_like(&self) -> Self;
    fn ratio_like(&self, num: i64, den: i64) -> Self;
    fn factorial_like(&self, n: u32) -> Self;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn div(&self, other: &Self) -> Self;
    fn is_zero(&self) -> bool;

    fn one_like(&self) -> Self {
        self.ratio_like(1, 1)
    }
}

impl Coeff for Float {
    fn zero_like(&self) -> Self {
        Float::new(self.prec())
    }
    fn ratio_like(&self, num: i64, den: i64) -> Self {
        Float::with_val(self.prec(), num) / den
    }
    fn factorial_like(&self, n: u32) -> Self {
        Float::with_val(self.prec(), Float::factorial(n))
    }
    fn add(&self, other: &Self) -> Self {
        Float::with_val(self.prec(), self + other)
    }
    fn sub(&self, other: &Self) -> Self {
        Float::with_val(self.prec(), self - other)
    }
    fn mul(&self, other: &Self) -> Self {
        Float::with_val(self.prec(), self * other)
    }
    fn div(&self, other: &Self) -> Self {
        Float::with_val(self.prec(), self / other)
    }
    fn is_zero(&self) -> bool {
        Float::is_zero(self)
    }
}

impl Coeff for Rational {
    fn zero_like(&self) -> Self {
        Rational::new()
    }
    fn ratio_like(&self, num: i64, den: i64) -> Self {
        Rational::from((num, den))
    }
    fn factorial_like(&self, n: u32) -> Self {
        Rational::from(Integer::from(Integer::factorial(n)))
    }
    fn add(&self, other: &Self) -> Self {
        Rational::from(self + other)
    }
    fn sub(&self, other: &Self) -> Self {
        Rational::from(self - other)
    }
    fn mul(&self, other: &Self) -> Self {
        Rational::from(self * other)
    }
    fn div(&self, other: &Self) -> Self {
        Rational::from(self / other)
    }
    fn is_zero(&self) -> bool {
        self.cmp0() == std::cmp::Ordering::Equal
    }
}

/// Coefficients of `x^0 … x^M`; everything above order `M` is unknown.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedSeries<T> {
    coeffs: Vec<T>,
}

impl<T: Coeff> TruncatedSeries<T> {
    /// Series whose order is `coeffs.len() − 1`.
    ///
    /// Panics on an empty vector.
    pub fn from_coeffs(coeffs: Vec<T>) -> Self {
        assert!(!coeffs.is_empty(), "a truncated series needs order >= 0");
        TruncatedSeries { coeffs }
    }

    pub fn zeros(order: usize, like: &T) -> Self {
        TruncatedSeries {
            coeffs: vec![like.zero_like(); order + 1],
        }
    }

    /// `c·x^k`, or the zero series if `k > order`.
    pub fn monomial(order: usize, k: usize, c: T) -> Self {
        let mut s = Self::zeros(order, &c);
        if k <= order {
            s.coeffs[k] = c;
        }
        s
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Result<&T> {
        self.coeffs.get(k).ok_or(Error::Range {
            module: MODULE,
            index: k,
            order: self.order(),
        })
    }

    fn same_order(&self, other: &Self) {
        assert_eq!(self.order(), other.order(), "series orders differ");
    }

    pub fn add(&self, other: &Self) -> Self {
        self.same_order(other);
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a.add(b))
            .collect();
        TruncatedSeries { coeffs }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.same_order(other);
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a.sub(b))
            .collect();
        TruncatedSeries { coeffs }
    }

    pub fn scale(&self, factor: &T) -> Self {
        TruncatedSeries {
            coeffs: self.coeffs.iter().map(|a| a.mul(factor)).collect(),
        }
    }

    /// Cauchy product truncated at the common order.
    pub fn mul(&self, other: &Self) -> Self {
        self.same_order(other);
        let m = self.order();
        let coeffs = (0..=m)
            .map(|k| {
                let mut acc = self.coeffs[0].zero_like();
                for j in 0..=k {
                    if self.coeffs[j].is_zero() || other.coeffs[k - j].is_zero() {
                        continue;
                    }
                    acc = acc.add(&self.coeffs[j].mul(&other.coeffs[k - j]));
                }
                acc
            })
            .collect();
        TruncatedSeries { coeffs }
    }

    /// Formal derivative; known only through order `M − 1`, so an order-`M`
    /// input yields an order-`M−1` result (order 0 stays order 0).
    pub fn derivative(&self) -> Self {
        if self.order() == 0 {
            return Self::zeros(0, &self.coeffs[0]);
        }
        let coeffs = (1..=self.order())
            .map(|k| self.coeffs[k].mul(&self.coeffs[k].ratio_like(k as i64, 1)))
            .collect();
        TruncatedSeries { coeffs }
    }

    /// Drops coefficients above `order`.
    pub fn truncate(&self, order: usize) -> Self {
        assert!(order <= self.order(), "cannot extend a truncated series");
        TruncatedSeries {
            coeffs: self.coeffs[..=order].to_vec(),
        }
    }
}

/// `x/(1−x²) = x + x³ + x⁵ + …` through order `M`.
pub fn geometric_odd<T: Coeff>(order: usize, like: &T) -> TruncatedSeries<T> {
    let one = like.one_like();
    let coeffs = (0..=order)
        .map(|k| {
            if k % 2 == 1 {
                one.clone()
            } else {
                like.zero_like()
            }
        })
        .collect();
    TruncatedSeries { coeffs }
}

/// `x²/(1−x²) = x² + x⁴ + …` through order `M`.
pub fn geometric_even<T: Coeff>(order: usize, like: &T) -> TruncatedSeries<T> {
    let one = like.one_like();
    let coeffs = (0..=order)
        .map(|k| {
            if k >= 2 && k % 2 == 0 {
                one.clone()
            } else {
                like.zero_like()
            }
        })
        .collect();
    TruncatedSeries { coeffs }
}

/// `(1 + c·x)^α` through order `M`, from
/// `a_k = a_{k−1} · c · (α − k + 1)/k`, `a_0 = 1`.
pub fn binomial_power<T: Coeff>(c: &T, alpha: &T, order: usize) -> TruncatedSeries<T> {
    let mut coeffs = Vec::with_capacity(order + 1);
    coeffs.push(alpha.one_like());
    for k in 1..=order {
        let step = alpha.sub(&alpha.ratio_like(k as i64 - 1, 1));
        let next = coeffs[k - 1]
            .mul(c)
            .mul(&step)
            .div(&alpha.ratio_like(k as i64, 1));
        coeffs.push(next);
    }
    TruncatedSeries { coeffs }
}

/// `exp(a)` for a series without constant term, via `E' = a'·E`:
/// `E_0 = 1`, `E_k = (1/k) Σ_{j=1..k} j·a_j·E_{k−j}`.
pub fn series_exp<T: Coeff>(a: &TruncatedSeries<T>) -> Result<TruncatedSeries<T>> {
    if !a.coeffs[0].is_zero() {
        return Err(Error::precondition(
            MODULE,
            "series exponential needs a vanishing constant term",
        ));
    }
    let like = &a.coeffs[0];
    let m = a.order();
    let mut e: Vec<T> = Vec::with_capacity(m + 1);
    e.push(like.one_like());
    for k in 1..=m {
        let mut acc = like.zero_like();
        for j in 1..=k {
            if a.coeffs[j].is_zero() {
                continue;
            }
            let ja = a.coeffs[j].mul(&like.ratio_like(j as i64, 1));
            acc = acc.add(&ja.mul(&e[k - j]));
        }
        e.push(acc.div(&like.ratio_like(k as i64, 1)));
    }
    Ok(TruncatedSeries { coeffs: e })
}

/// The exponent `μν·x/(1−x²) − ½(μ²+ν²)·x²/(1−x²) + b*·x²` of `F`.
pub fn egf_exponent<T: Coeff>(mu: &T, nu: &T, b: &T, order: usize) -> TruncatedSeries<T> {
    let munu = mu.mul(nu);
    let half_sq = mu.mul(mu).add(&nu.mul(nu)).mul(&mu.ratio_like(1, 2));
    let excess = b.sub(&b.ratio_like(3, 4));
    let odd = geometric_odd(order, mu).scale(&munu);
    let even = geometric_even(order, mu).scale(&half_sq);
    odd.sub(&even)
        .add(&TruncatedSeries::monomial(order, 2, excess))
}

/// Taylor series of `F` through order `M`; `M` is always the caller's
/// choice.
pub fn egf_f<T: Coeff>(mu: &T, nu: &T, b: &T, order: usize) -> TruncatedSeries<T> {
    let exponent = egf_exponent(mu, nu, b, order);
    let e = series_exp(&exponent).expect("exponent has no constant term");
    let left = binomial_power(&mu.ratio_like(-1, 1), &mu.ratio_like(-3, 2), order);
    let right = binomial_power(&mu.one_like(), &mu.ratio_like(-1, 2), order);
    e.mul(&left).mul(&right)
}

/// `f(N) = N!·[x^N] F`.
pub fn coeff_to_f<T: Coeff>(series: &TruncatedSeries<T>, n: usize) -> Result<T> {
    let c = series.coeff(n)?;
    Ok(c.factorial_like(n as u32).mul(c))
}

/// Residual of the linear ODE satisfied by `F`, cleared of denominators:
///
/// ```text
/// (1−x²)² F′ − [(1+2x)(1−x²) + μν(1+x²) − (μ²+ν²)x + 2b*x(1−x²)²] F
/// ```
///
/// For an order-`M` input the residual is meaningful through order `M − 1`
/// and is returned at that order.
pub fn ode_residual<T: Coeff>(
    series: &TruncatedSeries<T>,
    mu: &T,
    nu: &T,
    b: &T,
) -> TruncatedSeries<T> {
    let m = series.order();
    assert!(m >= 1, "the ODE residual needs order >= 1");
    let top = m - 1;
    let r = |num: i64| mu.ratio_like(num, 1);
    let poly = |cs: Vec<T>| {
        let mut s = TruncatedSeries::zeros(top, mu);
        for (k, c) in cs.into_iter().enumerate() {
            if k <= top {
                s.coeffs[k] = c;
            }
        }
        s
    };
    let munu = mu.mul(nu);
    let sum_sq = mu.mul(mu).add(&nu.mul(nu));
    let excess = b.sub(&b.ratio_like(3, 4));
    let two_excess = excess.mul(&r(2));
    let multiplier = poly(vec![
        r(1).add(&munu),
        r(2).sub(&sum_sq).add(&two_excess),
        r(-1).add(&munu),
        r(-2).sub(&excess.mul(&r(4))),
        r(0),
        two_excess,
    ]);
    let weight = poly(vec![r(1), r(0), r(-2), r(0), r(1)]);
    let lhs = weight.mul(&series.derivative());
    let rhs = multiplier.mul(&series.truncate(top));
    lhs.sub(&rhs)
}

/// `F` evaluated in exact rational arithmetic.
pub fn egf_f_exact(
    mu: &Rational,
    nu: &Rational,
    b: &Rational,
    order: usize,
) -> TruncatedSeries<Rational> {
    egf_f(mu, nu, b, order)
}

/// `f(0..=N_max)` by coefficient extraction, at the working precision of
/// the inputs.
pub fn f_values(mu: &Real, nu: &Real, b: &Real, n_max: usize) -> Vec<Real> {
    let series = egf_f(mu, nu, b, n_max);
    (0..=n_max)
        .map(|n| coeff_to_f(&series, n).expect("n within order"))
        .collect()
}
