//! Direct simulation of Hermitian Wigner matrices and Monte Carlo estimates
//! of `E det(X − μ) det(X − ν)` and `E det(X − μ)`.
//!
//! Samples are split into fixed-size chunks. Chunk `k` of a sampler draws
//! from the ChaCha8 stream `(stream_id << 32) | k` under the sampler's seed,
//! and chunk accumulators are merged in chunk order, so results do not depend
//! on how many threads ran the chunks.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::domain::{EntryLaw, MomentProfile, Precision, Real};
use crate::error::{Error, Result};

const MODULE: &str = "montecarlo";

/// Samples per chunk.
pub const CHUNK: u64 = 1 << 15;

/// Above this size determinants are accumulated as log-magnitude and phase.
pub const LOG_MODE_ABOVE: usize = 64;

/// Per-sample bound on `|Im| / |Re|` of a determinant product.
pub const IMAG_TOL: f64 = 1e-8;

/// Draws Hermitian Wigner matrices with entry law `Q`: `X_ii = √2 q`,
/// `X_ij = q_re + i q_im` for `i < j`, `X_ji = conj(X_ij)`.
#[derive(Clone, Debug)]
pub struct WignerSampler {
    profile: MomentProfile,
    seed: u64,
    stream_id: u32,
    imag_tol: f64,
}

impl WignerSampler {
    pub fn new(profile: MomentProfile, seed: u64, stream_id: u32) -> Result<Self> {
        if *profile.law() == EntryLaw::None {
            return Err(Error::domain(
                MODULE,
                format!("profile {:?} has no sampling law", profile.label()),
            ));
        }
        Ok(WignerSampler {
            profile,
            seed,
            stream_id,
            imag_tol: IMAG_TOL,
        })
    }

    /// Replaces [`IMAG_TOL`] as the per-sample bound on `|Im| / |Re|`.
    pub fn with_imag_tol(mut self, tol: f64) -> Self {
        self.imag_tol = tol;
        self
    }

    pub fn profile(&self) -> &MomentProfile {
        &self.profile
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u32 {
        self.stream_id
    }

    /// The generator for one chunk of draws.
    pub fn chunk_rng(&self, chunk: u32) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(((self.stream_id as u64) << 32) | chunk as u64);
        rng
    }

    /// One draw from `Q`.
    #[inline]
    pub fn draw_q<R: Rng>(&self, rng: &mut R) -> f64 {
        match *self.profile.law() {
            EntryLaw::Gaussian => {
                let z: f64 = StandardNormal.sample(rng);
                z * std::f64::consts::FRAC_1_SQRT_2
            }
            EntryLaw::Rademacher => {
                if rng.random::<bool>() {
                    std::f64::consts::FRAC_1_SQRT_2
                } else {
                    -std::f64::consts::FRAC_1_SQRT_2
                }
            }
            EntryLaw::Uniform => {
                let half_width = 1.5f64.sqrt();
                (2.0 * rng.random::<f64>() - 1.0) * half_width
            }
            EntryLaw::TwoPoint { p } => {
                if rng.random::<f64>() < p {
                    ((1.0 - p) / (2.0 * p)).sqrt()
                } else {
                    -(p / (2.0 * (1.0 - p))).sqrt()
                }
            }
            EntryLaw::None => unreachable!("rejected at construction"),
        }
    }

    /// Fills `out` (row-major, length `n²`) with the next matrix from `rng`.
    pub fn fill_matrix<R: Rng>(&self, n: usize, rng: &mut R, out: &mut [Complex64]) {
        assert_eq!(out.len(), n * n, "buffer must hold an n x n matrix");
        for i in 0..n {
            out[i * n + i] = Complex64::new(std::f64::consts::SQRT_2 * self.draw_q(rng), 0.0);
            for j in i + 1..n {
                let re = self.draw_q(rng);
                let im = self.draw_q(rng);
                out[i * n + j] = Complex64::new(re, im);
                out[j * n + i] = Complex64::new(re, -im);
            }
        }
    }

    /// The `draw_index`-th matrix of size `n` this sampler produces in an
    /// estimator run.
    pub fn sample_matrix(&self, n: usize, draw_index: u64) -> Result<Vec<Complex64>> {
        if n == 0 {
            return Err(Error::domain(MODULE, "matrix size must be at least 1"));
        }
        let chunk = chunk_index(draw_index / CHUNK)?;
        let mut rng = self.chunk_rng(chunk);
        let mut out = vec![Complex64::new(0.0, 0.0); n * n];
        for _ in 0..=draw_index % CHUNK {
            self.fill_matrix(n, &mut rng, &mut out);
        }
        Ok(out)
    }
}

fn chunk_index(k: u64) -> Result<u32> {
    u32::try_from(k)
        .map_err(|_| Error::domain(MODULE, "sample count exceeds the chunk index range"))
}

/// A determinant as `value · e^{log_scale}`; in log mode `|value| = 1`
/// unless the determinant vanishes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScaledDet {
    pub value: Complex64,
    pub log_scale: f64,
}

/// `det(A − shift·I)` by Gaussian elimination with partial pivoting;
/// `a` (row-major `n × n`) is overwritten. In log mode the pivots'
/// magnitudes are summed as logarithms.
pub fn shifted_det(a: &mut [Complex64], n: usize, shift: f64, log_mode: bool) -> ScaledDet {
    for i in 0..n {
        a[i * n + i] -= shift;
    }
    let mut value = Complex64::new(1.0, 0.0);
    let mut log_scale = 0.0;
    for k in 0..n {
        let mut p = k;
        let mut best = a[k * n + k].norm_sqr();
        for r in k + 1..n {
            let m = a[r * n + k].norm_sqr();
            if m > best {
                best = m;
                p = r;
            }
        }
        if best == 0.0 {
            return ScaledDet {
                value: Complex64::new(0.0, 0.0),
                log_scale: 0.0,
            };
        }
        if p != k {
            for c in k..n {
                a.swap(k * n + c, p * n + c);
            }
            value = -value;
        }
        let pivot = a[k * n + k];
        if log_mode {
            let m = pivot.norm();
            log_scale += m.ln();
            value *= pivot / m;
        } else {
            value *= pivot;
        }
        let inv = pivot.inv();
        for r in k + 1..n {
            let factor = a[r * n + k] * inv;
            if factor == Complex64::new(0.0, 0.0) {
                continue;
            }
            for c in k + 1..n {
                let t = a[k * n + c];
                a[r * n + c] -= factor * t;
            }
        }
    }
    ScaledDet { value, log_scale }
}

/// Hadamard's bound on `|det(A − shift·I)|`, as a logarithm.
fn log_hadamard(a: &[Complex64], n: usize, shift: f64) -> f64 {
    (0..n)
        .map(|i| {
            let row: f64 = (0..n)
                .map(|j| {
                    let v = if i == j {
                        a[i * n + j] - shift
                    } else {
                        a[i * n + j]
                    };
                    v.norm_sqr()
                })
                .sum();
            0.5 * row.ln()
        })
        .sum()
}

/// Sample mean and its standard error.
#[derive(Clone, Debug, PartialEq)]
pub struct EstimatorResult {
    pub mean: Real,
    pub std_error: Real,
    pub n_samples: u64,
}

impl EstimatorResult {
    /// `(mean − exact) / std_error`.
    pub fn z_score(&self, exact: &Real) -> f64 {
        let diff = Real::with_val(Precision::P128.bits(), &self.mean - exact);
        (diff / &self.std_error).to_f64()
    }
}

/// Welford accumulator on values `x · e^{log_scale}` with a shared scale.
#[derive(Clone, Copy, Debug)]
struct Accumulator {
    count: u64,
    mean: f64,
    m2: f64,
    log_scale: f64,
}

impl Accumulator {
    fn new() -> Self {
        Accumulator {
            count: 0,
            mean: 0.0,
            m2: 0.0,
            log_scale: f64::NEG_INFINITY,
        }
    }

    fn rescale(&mut self, log_scale: f64) {
        if self.count > 0 && self.log_scale.is_finite() {
            let s = (self.log_scale - log_scale).exp();
            self.mean *= s;
            self.m2 *= s * s;
        }
        self.log_scale = log_scale;
    }

    fn push(&mut self, x: f64, log_scale: f64) {
        // A zero carries no scale of its own.
        let scale = if x == 0.0 && self.log_scale.is_finite() {
            self.log_scale
        } else {
            log_scale
        };
        if !self.log_scale.is_finite() {
            self.log_scale = scale;
        }
        let x = if scale == self.log_scale {
            x
        } else if scale > self.log_scale {
            self.rescale(scale);
            x
        } else {
            x * (scale - self.log_scale).exp()
        };
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    fn merge(mut self, mut other: Accumulator) -> Accumulator {
        if other.count == 0 {
            return self;
        }
        if self.count == 0 {
            return other;
        }
        let scale = self.log_scale.max(other.log_scale);
        self.rescale(scale);
        other.rescale(scale);
        let n = self.count + other.count;
        let delta = other.mean - self.mean;
        let mean = self.mean + delta * (other.count as f64 / n as f64);
        let m2 = self.m2
            + other.m2
            + delta * delta * (self.count as f64 * other.count as f64 / n as f64);
        Accumulator {
            count: n,
            mean,
            m2,
            log_scale: scale,
        }
    }

    fn finish(self) -> EstimatorResult {
        let bits = Precision::P53.bits();
        let scale = if self.log_scale.is_finite() {
            self.log_scale
        } else {
            0.0
        };
        let factor = Real::with_val(bits, scale).exp();
        let var = self.m2 / (self.count as f64 - 1.0);
        let se = (var / self.count as f64).sqrt();
        EstimatorResult {
            mean: Real::with_val(bits, self.mean) * &factor,
            std_error: Real::with_val(bits, se) * factor,
            n_samples: self.count,
        }
    }
}

/// What each matrix contributes to an estimate.
#[derive(Clone, Copy)]
enum Statistic {
    Product { mu: f64, nu: f64 },
    Single { mu: f64 },
}

fn estimate(
    n: usize,
    stat: Statistic,
    sampler: &WignerSampler,
    n_samples: u64,
) -> Result<EstimatorResult> {
    if n == 0 {
        return Err(Error::domain(MODULE, "matrix size must be at least 1"));
    }
    if n_samples < 2 {
        return Err(Error::domain(
            MODULE,
            "need at least 2 samples for a standard error",
        ));
    }
    let chunks = chunk_index(n_samples.div_ceil(CHUNK))?;
    let log_mode = n > LOG_MODE_ABOVE;
    let parts: Vec<Result<Accumulator>> = (0..chunks)
        .into_par_iter()
        .map(|k| {
            let len = CHUNK.min(n_samples - k as u64 * CHUNK);
            run_chunk(n, stat, sampler, k, len, log_mode)
        })
        .collect();
    let mut total = Accumulator::new();
    for part in parts {
        total = total.merge(part?);
    }
    Ok(total.finish())
}

fn run_chunk(
    n: usize,
    stat: Statistic,
    sampler: &WignerSampler,
    chunk: u32,
    len: u64,
    log_mode: bool,
) -> Result<Accumulator> {
    let mut rng = sampler.chunk_rng(chunk);
    let zero = Complex64::new(0.0, 0.0);
    let mut x = vec![zero; n * n];
    let mut work = vec![zero; n * n];
    let mut acc = Accumulator::new();
    for _ in 0..len {
        sampler.fill_matrix(n, &mut rng, &mut x);
        let (value, log_scale) = match stat {
            Statistic::Single { mu } => {
                work.copy_from_slice(&x);
                let d = shifted_det(&mut work, n, mu, log_mode);
                check_real(d.value, sampler.imag_tol, || {
                    log_hadamard(&x, n, mu) - d.log_scale
                })?;
                (d.value.re, d.log_scale)
            }
            Statistic::Product { mu, nu } => {
                work.copy_from_slice(&x);
                let a = shifted_det(&mut work, n, mu, log_mode);
                let b = if mu == nu {
                    a
                } else {
                    work.copy_from_slice(&x);
                    shifted_det(&mut work, n, nu, log_mode)
                };
                let product = a.value * b.value;
                let log_scale = a.log_scale + b.log_scale;
                check_real(product, sampler.imag_tol, || {
                    log_hadamard(&x, n, mu) + log_hadamard(&x, n, nu) - log_scale
                })?;
                (product.re, log_scale)
            }
        };
        acc.push(value, log_scale);
    }
    Ok(acc)
}

/// `|Im| ≤ tol·|Re|`, with an absolute floor of `64ε` times the Hadamard
/// bound (given as a log relative to the value's scale) so exactly
/// singular draws do not fail on rounding noise.
fn check_real(value: Complex64, tol: f64, log_floor: impl FnOnce() -> f64) -> Result<()> {
    let im = value.im.abs();
    if im <= tol * value.re.abs()
        || im <= tol * value.re.abs() + 64.0 * f64::EPSILON * log_floor().exp()
    {
        Ok(())
    } else {
        Err(Error::ImaginaryResidue {
            real: value.re,
            imag: value.im,
        })
    }
}

/// Estimate of `f(N; μ, ν) = E det(X − μ) det(X − ν)`.
pub fn mc_correlation(
    n: usize,
    mu: f64,
    nu: f64,
    sampler: &WignerSampler,
    n_samples: u64,
) -> Result<EstimatorResult> {
    estimate(n, Statistic::Product { mu, nu }, sampler, n_samples)
}

/// Estimate of `g(N; μ) = E det(X − μ)`.
pub fn mc_mean_det(
    n: usize,
    mu: f64,
    sampler: &WignerSampler,
    n_samples: u64,
) -> Result<EstimatorResult> {
    estimate(n, Statistic::Single { mu }, sampler, n_samples)
}
