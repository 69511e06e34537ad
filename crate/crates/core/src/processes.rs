//! Experiment process models: a cyclic-prefixed OFDM symbol with random
//! QPSK data, a two-component Gaussian chirp process, and a generic
//! circular-Gaussian sampler for arbitrary correlation matrices.
//!
//! Each model provides an exact correlation matrix (hence exact expected
//! ambiguity function and Rihaczek spectrum through [`crate::spectra`]) and a
//! seeded realization sampler; the OFDM model additionally has closed-form
//! spectra built from Dirichlet-type `dir` kernels.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grid::TfMatrix;
use crate::spectra::{CorrelationMatrix, SignalVector, SpectraError};

/// Errors from model construction and closed-form evaluation.
#[derive(Debug, Error)]
pub enum ProcessError {
    /// Parameter combination violates a model invariant.
    #[error("invalid model parameters: {0}")]
    InvalidParams(String),
    /// The derived correlation matrix failed validation.
    #[error("correlation validation failed: {0}")]
    Corr(#[from] SpectraError),
}

/// OFDM model: Q subcarriers, symbol length `N_s = 2Q`, cyclic prefix
/// `N_cp`, time offset `n₀`, on a length-N grid. The signal occupies the
/// periodized window `{n₀−N_cp, …, n₀+N_s−1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OfdmParams {
    /// Subcarrier count Q.
    pub q: usize,
    /// Grid length N.
    pub n_size: usize,
    /// Symbol length N_s = 2Q.
    pub n_s: usize,
    /// Cyclic prefix length N_cp.
    pub n_cp: usize,
    /// Time offset n₀ (samples).
    pub n0: usize,
}

impl OfdmParams {
    /// Builds and validates an OFDM parameter set with `N_s = 2Q`.
    ///
    /// Requires `N_s + N_cp < N/2` (needed by the closed-form expected
    /// ambiguity function, whose two branches must not overlap modulo N) and
    /// `2Q | N` (so periodization does not disturb the subcarrier phases).
    pub fn new(q: usize, n_size: usize, n_cp: usize, n0: usize) -> Result<Self, ProcessError> {
        let n_s = 2 * q;
        if q == 0 {
            return Err(ProcessError::InvalidParams("Q must be positive".into()));
        }
        if n_s + n_cp >= n_size / 2 {
            return Err(ProcessError::InvalidParams(format!(
                "need N_s + N_cp < N/2, got {} + {} vs N = {}",
                n_s, n_cp, n_size
            )));
        }
        if n_size % n_s != 0 {
            return Err(ProcessError::InvalidParams(format!(
                "need 2Q | N, got 2Q = {n_s}, N = {n_size}"
            )));
        }
        Ok(OfdmParams {
            q,
            n_size,
            n_s,
            n_cp,
            n0,
        })
    }

    /// Publication-scale configuration: N=512, Q=64, N_cp=N_s/8=16, n₀=N_cp.
    pub fn paper() -> Self {
        OfdmParams::new(64, 512, 16, 16).expect("static config is valid")
    }

    /// Desk-scale configuration: N=128, Q=16, N_cp=N_s/8=4, n₀=N_cp.
    pub fn desk() -> Self {
        OfdmParams::new(16, 128, 4, 4).expect("static config is valid")
    }

    /// Occupied window length `W = N_s + N_cp`.
    pub fn window_len(&self) -> usize {
        self.n_s + self.n_cp
    }

    /// First occupied time position (signed; may be negative before
    /// periodization when `n₀ < N_cp`).
    pub fn window_start(&self) -> i64 {
        self.n0 as i64 - self.n_cp as i64
    }

    /// For a stored index `n`, the signed window representative `u ≡ n
    /// (mod N)` with `u ∈ {window_start .. window_start+W−1}`, or None when
    /// `n` is outside the occupied window.
    pub fn window_rep(&self, n: usize) -> Option<i64> {
        let nn = self.n_size as i64;
        let a = self.window_start();
        let u = a + (n as i64 - a).rem_euclid(nn);
        if u < a + self.window_len() as i64 {
            Some(u)
        } else {
            None
        }
    }
}

/// Two-component chirp model: `X(t) = a₁ s(t−t₁) + a₂ s(t−t₂)` with
/// independent zero-mean unit-variance Gaussian amplitudes and the Gaussian
/// chirp pulse `s(t) = exp(−(t/T₀)²/2)·exp(−jπβt²)`, sampled on `0..N−1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChirpParams {
    /// Grid length N.
    pub n_size: usize,
    /// First pulse center (samples).
    pub t1: f64,
    /// Second pulse center (samples).
    pub t2: f64,
    /// Pulse width T₀ (samples).
    pub t0: f64,
    /// Chirp rate β (1/samples²).
    pub beta: f64,
}

impl ChirpParams {
    /// Builds and validates a chirp parameter set; the pulses must be
    /// effectively contained in the grid (energy outside `[0,N)` below
    /// 1e−2 of the pulse energy; the reference geometry places the pulse
    /// centers ≈2.1·T₀ from the grid edge, leaving ≈1.3e−3 in the tails).
    pub fn new(n_size: usize, t1: f64, t2: f64, t0: f64, beta: f64) -> Result<Self, ProcessError> {
        let p = ChirpParams {
            n_size,
            t1,
            t2,
            t0,
            beta,
        };
        // The envelope is Gaussian, so integrating |s|² = exp(−t²/T₀²)
        // outside the grid can be checked by sampling one tail period.
        let energy: f64 = (0..n_size).map(|n| p.pulse_env_sq(n as f64, t1)).sum();
        let tail: f64 = (1..=n_size)
            .map(|d| p.pulse_env_sq(-(d as f64), t1) + p.pulse_env_sq((n_size + d) as f64, t1))
            .sum();
        if tail > 1e-2 * energy {
            return Err(ProcessError::InvalidParams(format!(
                "pulse tails carry {:.3e} of the pulse energy (limit 1e−2)",
                tail / energy
            )));
        }
        let energy2: f64 = (0..n_size).map(|n| p.pulse_env_sq(n as f64, t2)).sum();
        let tail2: f64 = (1..=n_size)
            .map(|d| p.pulse_env_sq(-(d as f64), t2) + p.pulse_env_sq((n_size + d) as f64, t2))
            .sum();
        if tail2 > 1e-2 * energy2 {
            return Err(ProcessError::InvalidParams(
                "second pulse is not contained in the grid".into(),
            ));
        }
        Ok(p)
    }

    /// Publication-scale configuration: N=512, t₁=128, t₂=384, T₀=60,
    /// β=1/600.
    pub fn paper() -> Self {
        ChirpParams::new(512, 128.0, 384.0, 60.0, 1.0 / 600.0).expect("static config is valid")
    }

    /// Desk-scale configuration (paper geometry divided by 4): N=128,
    /// t₁=32, t₂=96, T₀=15, β=1/150·(1/4)… i.e. β scaled to keep βT₀²
    /// fixed: β=1/37.5.
    pub fn desk() -> Self {
        ChirpParams::new(128, 32.0, 96.0, 15.0, 1.0 / 37.5).expect("static config is valid")
    }

    fn pulse_env_sq(&self, t: f64, tc: f64) -> f64 {
        let u = (t - tc) / self.t0;
        (-u * u).exp()
    }

    /// Complex pulse sample `s(n − t_c)`.
    pub fn pulse(&self, n: usize, tc: f64) -> Complex64 {
        let t = n as f64 - tc;
        let env = (-(t / self.t0).powi(2) / 2.0).exp();
        env * Complex64::from_polar(1.0, -std::f64::consts::PI * self.beta * t * t)
    }
}

/// Splits a master seed into a per-trial stream seed; trials are replayable
/// individually and independent across indices.
pub fn derive_seed(master_seed: u64, trial_index: u64) -> u64 {
    // SplitMix64 NASAM-style mixing of the pair.
    let mut z = master_seed ^ trial_index.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Draws one OFDM realization: i.i.d. unit-energy QPSK symbols
/// `s_i ∈ {(±1±j)/√2}`, emitted as
/// `X[n] = Σ_i s_i e^{j2π(n−n₀)i/(2Q)}` on the occupied window, zero
/// elsewhere. Deterministic per seed.
pub fn ofdm_realization(p: &OfdmParams, seed: u64) -> SignalVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    let symbols: Vec<Complex64> = (0..p.q)
        .map(|_| {
            let re = if rng.gen::<bool>() { inv_sqrt2 } else { -inv_sqrt2 };
            let im = if rng.gen::<bool>() { inv_sqrt2 } else { -inv_sqrt2 };
            Complex64::new(re, im)
        })
        .collect();
    let mut x = vec![Complex64::new(0.0, 0.0); p.n_size];
    for (n, slot) in x.iter_mut().enumerate() {
        if let Some(u) = p.window_rep(n) {
            let phase_base = (u - p.n0 as i64) as f64 / (2.0 * p.q as f64);
            *slot = symbols
                .iter()
                .enumerate()
                .map(|(i, s)| s * crate::grid::cis_frac(phase_base * i as f64, 1.0))
                .sum();
        }
    }
    SignalVector::new(x)
}

/// Exact OFDM correlation matrix:
/// `γ[n₁,n₂] = 1{n₁∈win}·1{n₂∈win}·Σ_{i∈[Q]} e^{j2π(u₁−u₂)i/(2Q)}`
/// (symbol independence and unit symbol energy collapse the double sum).
pub fn ofdm_correlation(p: &OfdmParams) -> Result<CorrelationMatrix, ProcessError> {
    let n = p.n_size;
    let reps: Vec<Option<i64>> = (0..n).map(|i| p.window_rep(i)).collect();
    let gamma = DMatrix::from_fn(n, n, |n1, n2| match (reps[n1], reps[n2]) {
        (Some(u1), Some(u2)) => dir_kernel(p.q, (u1 - u2) as f64 / (2.0 * p.q as f64)),
        _ => Complex64::new(0.0, 0.0),
    });
    Ok(CorrelationMatrix::new(gamma)?)
}

/// The `dir` kernel: `dir(c, θ) = Σ_{r=0}^{c−1} e^{j2πθr}
/// = e^{jπθ(c−1)}·sin(πθc)/sin(πθ)`, with the limit `c` at integer θ.
pub fn dir_kernel(count: usize, theta: f64) -> Complex64 {
    let frac = theta - theta.round();
    if frac.abs() < 1e-13 {
        // All phases coincide (e^{j2πθr} = 1 up to an integer θ rotation).
        return Complex64::new(count as f64, 0.0);
    }
    let pi = std::f64::consts::PI;
    let ratio = (pi * theta * count as f64).sin() / (pi * theta).sin();
    Complex64::from_polar(1.0, pi * theta * (count as f64 - 1.0)) * ratio
}

/// Closed-form OFDM Rihaczek spectrum. Zero off the occupied time window;
/// on it,
/// `R̄[n,k] = Σ_{i∈[Q]} e^{−j2πu_min θ_i}·dir(W, −θ_i)` with
/// `θ_i = k/N − i/(2Q)`, `W = N_s+N_cp`, and `u_min = u(n) − (n₀−N_cp) − W + 1`
/// the smallest time-lag reached from position `n`.
pub fn ofdm_closed_rs(p: &OfdmParams) -> TfMatrix {
    let n = p.n_size;
    let w = p.window_len();
    let a = p.window_start();
    let two_q = 2.0 * p.q as f64;
    let mut out = TfMatrix::zeros(n);
    for nn in 0..n {
        let Some(u) = p.window_rep(nn) else { continue };
        let u_min = (u - a) as f64 - (w as f64 - 1.0);
        for k in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for i in 0..p.q {
                let theta = k as f64 / n as f64 - i as f64 / two_q;
                acc += crate::grid::cis_frac(-u_min * theta, 1.0) * dir_kernel(w, -theta);
            }
            out.set(nn as i64, k as i64, acc);
        }
    }
    out
}

/// Closed-form OFDM expected ambiguity function. Supported on time lags
/// `|m| < W = N_s+N_cp` (periodized); the non-positive-lag branch is
/// `Ā[m,l] = dir(Q, m/(2Q))·e^{−j2πl·n_start/N}·dir(W−|m|, −l/N)` with
/// `n_start` the first overlapped time position, and positive lags follow
/// from the ambiguity symmetry `Ā[m,l] = Ā*[−m,−l]·e^{−j2πml/N}`.
pub fn ofdm_closed_eaf(p: &OfdmParams) -> TfMatrix {
    let n = p.n_size as i64;
    let w = p.window_len() as i64;
    let a = p.window_start();
    let two_q = 2.0 * p.q as f64;
    let nf = p.n_size as f64;
    // Branches must not overlap after periodization: guaranteed by the
    // construction-time invariant W < N/2.
    let neg_branch = |m: i64, l: i64| -> Complex64 {
        // m ∈ {−(W−1) .. 0}: overlap starts at the window head.
        let overlap = (w + m) as usize;
        let n_start = a as f64;
        dir_kernel(p.q, m as f64 / two_q)
            * crate::grid::cis_frac(-(l as f64) * n_start, nf)
            * dir_kernel(overlap, -(l as f64) / nf)
    };
    let mut out = TfMatrix::zeros(p.n_size);
    for ms in 0..p.n_size as i64 {
        let m = if ms > n / 2 { ms - n } else { ms };
        if m.abs() >= w {
            continue;
        }
        for ls in 0..n {
            let l = if ls > n / 2 { ls - n } else { ls };
            let v = if m <= 0 {
                neg_branch(m, l)
            } else {
                // Conjugate-symmetry branch for m ∈ {1..W−1}.
                neg_branch(-m, -l).conj() * crate::grid::cis_frac(-((m * l) as f64), nf)
            };
            out.set(ms, ls, v);
        }
    }
    out
}

/// Exact chirp correlation matrix `Γ = s₁s₁ᴴ + s₂s₂ᴴ` (independent
/// amplitudes make the cross terms vanish).
pub fn chirp_correlation(p: &ChirpParams) -> Result<CorrelationMatrix, ProcessError> {
    let n = p.n_size;
    let s1: Vec<Complex64> = (0..n).map(|i| p.pulse(i, p.t1)).collect();
    let s2: Vec<Complex64> = (0..n).map(|i| p.pulse(i, p.t2)).collect();
    let gamma = DMatrix::from_fn(n, n, |i, j| {
        s1[i] * s1[j].conj() + s2[i] * s2[j].conj()
    });
    Ok(CorrelationMatrix::new(gamma)?)
}

/// Precomputed square-root factor of a correlation matrix for repeated
/// circular-Gaussian sampling.
pub struct GaussianSampler {
    half: DMatrix<Complex64>,
}

impl GaussianSampler {
    /// Eigendecomposes Γ once (negative eigenvalues floored at zero) so each
    /// draw costs one matrix–vector product.
    pub fn new(g: &CorrelationMatrix) -> Self {
        let eig = g.gamma().clone().symmetric_eigen();
        let n = g.n();
        let mut half = eig.eigenvectors.clone();
        for j in 0..n {
            let lam = eig.eigenvalues[j].max(0.0).sqrt();
            for i in 0..n {
                half[(i, j)] *= Complex64::new(lam, 0.0);
            }
        }
        GaussianSampler { half }
    }

    /// Draws `x = Γ^{1/2} w` with `w` i.i.d. standard circular complex
    /// Gaussian. Deterministic per seed.
    pub fn draw(&self, seed: u64) -> SignalVector {
        let n = self.half.nrows();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
        let w = nalgebra::DVector::from_fn(n, |_, _| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex64::new(re * inv_sqrt2, im * inv_sqrt2)
        });
        let x = &self.half * w;
        SignalVector::new(x.iter().copied().collect())
    }
}

/// One-shot circular-Gaussian draw from a correlation matrix (refactor to a
/// [`GaussianSampler`] when drawing many realizations from the same Γ).
pub fn gaussian_realization(g: &CorrelationMatrix, seed: u64) -> SignalVector {
    GaussianSampler::new(g).draw(seed)
}
