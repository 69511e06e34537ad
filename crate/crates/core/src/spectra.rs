//! Signal- and correlation-domain time-frequency representations — ambiguity
//! function (AF), Rihaczek distribution (RD), expected ambiguity function
//! (EAF), Rihaczek spectrum (RS) — plus the minimum-variance-unbiased (MVU)
//! smoothed estimator of the RS.
//!
//! Conventions: for a length-N signal x, the AF is
//! `A[m,l] = Σ_n x[n] x*[(n−m) mod N] e^{−j2πln/N}`, and the RD is its
//! forward symplectic 2D DFT, `R[n,k] = x[n] X̂*[k] e^{−j2πnk/N}`. Replacing
//! the outer product by the correlation matrix Γ gives the EAF and the RS:
//! `E{A} = Ā`, `E{R} = R̄`. The MVU estimator masks the AF to the effective
//! lag rectangle and transforms.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rustfft::FftPlanner;
use thiserror::Error;

use crate::grid::{cis_frac, symplectic_dft, symplectic_idft, LagSupport, TfMatrix};

/// Errors from correlation-matrix validation.
#[derive(Debug, Error)]
pub enum SpectraError {
    /// Matrix is not Hermitian within tolerance.
    #[error("correlation matrix not Hermitian: max |Γ − Γᴴ| entry = {max_dev:.3e}")]
    NotHermitian {
        /// Largest deviation |Γ_ij − Γ*_ji|.
        max_dev: f64,
    },
    /// Matrix has an eigenvalue below the PSD slack.
    #[error("correlation matrix not PSD: min eigenvalue {min_eig:.3e} < −1e−10·‖Γ‖")]
    NotPsd {
        /// Smallest eigenvalue found.
        min_eig: f64,
    },
    /// Matrix is not square or too small.
    #[error("invalid correlation matrix shape: {0}")]
    BadShape(String),
}

/// Length-N complex signal vector `x = (X[0] … X[N−1])ᵀ`.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalVector {
    samples: Vec<Complex64>,
}

impl SignalVector {
    /// Wraps a sample vector (length ≥ 2).
    pub fn new(samples: Vec<Complex64>) -> Self {
        assert!(samples.len() >= 2, "signal length must be at least 2");
        SignalVector { samples }
    }

    /// Signal length N.
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    /// Always false (length ≥ 2 by construction).
    pub fn is_empty(&self) -> bool {
        false
    }

    /// Sample view.
    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    /// Squared ℓ2 norm.
    pub fn energy(&self) -> f64 {
        self.samples.iter().map(|z| z.norm_sqr()).sum()
    }
}

/// Exact correlation matrix Γ with `Γ[n₁,n₂] = E{X[n₁] X*[n₂]}`, validated
/// Hermitian (to 1e−12 relative) and positive semidefinite (min eigenvalue
/// ≥ −1e−10·‖Γ‖) at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrix {
    gamma: DMatrix<Complex64>,
}

impl CorrelationMatrix {
    /// Validates and wraps Γ.
    pub fn new(gamma: DMatrix<Complex64>) -> Result<Self, SpectraError> {
        let n = gamma.nrows();
        if n < 2 || gamma.ncols() != n {
            return Err(SpectraError::BadShape(format!(
                "{}×{} (need square, N ≥ 2)",
                gamma.nrows(),
                gamma.ncols()
            )));
        }
        let scale = gamma.iter().map(|z| z.norm()).fold(0.0f64, f64::max).max(f64::MIN_POSITIVE);
        let mut max_dev = 0.0f64;
        for i in 0..n {
            for j in 0..=i {
                let dev = (gamma[(i, j)] - gamma[(j, i)].conj()).norm();
                max_dev = max_dev.max(dev);
            }
        }
        if max_dev > 1e-12 * scale.max(1.0) {
            return Err(SpectraError::NotHermitian { max_dev });
        }
        let frob = gamma.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let eig = gamma.clone().symmetric_eigen();
        let min_eig = eig.eigenvalues.iter().fold(f64::INFINITY, |a, &b| a.min(b));
        if min_eig < -1e-10 * frob {
            return Err(SpectraError::NotPsd { min_eig });
        }
        Ok(CorrelationMatrix { gamma })
    }

    /// Grid length N.
    pub fn n(&self) -> usize {
        self.gamma.nrows()
    }

    /// The validated matrix.
    pub fn gamma(&self) -> &DMatrix<Complex64> {
        &self.gamma
    }

    /// Entry accessor `γ[n₁,n₂]` on stored indices.
    pub fn entry(&self, n1: usize, n2: usize) -> Complex64 {
        self.gamma[(n1, n2)]
    }
}

/// Ambiguity function `A[m,l] = Σ_n x[n] x*[(n−m) mod N] e^{−j2πln/N}`.
pub fn ambiguity_function(x: &SignalVector) -> TfMatrix {
    let n = x.len();
    let mut planner = FftPlanner::<f64>::new();
    let fft = planner.plan_fft_forward(n);
    let s = x.samples();
    let mut out = TfMatrix::zeros(n);
    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    for m in 0..n {
        for nn in 0..n {
            buf[nn] = s[nn] * s[(nn + n - m) % n].conj();
        }
        fft.process(&mut buf);
        for l in 0..n {
            out.set(m as i64, l as i64, buf[l]);
        }
    }
    out
}

/// Rihaczek distribution `R[n,k] = x[n] X̂*[k] e^{−j2πnk/N}` with
/// `X̂[k] = Σ_n x[n] e^{−j2πkn/N}`; equals the forward symplectic DFT of the
/// ambiguity function.
pub fn rihaczek_distribution(x: &SignalVector) -> TfMatrix {
    let n = x.len();
    let mut planner = FftPlanner::<f64>::new();
    let fft = planner.plan_fft_forward(n);
    let mut spectrum = x.samples().to_vec();
    fft.process(&mut spectrum);
    let s = x.samples();
    TfMatrix::from_fn(n, |nn, k| {
        s[nn] * spectrum[k].conj() * cis_frac(-((nn * k) as f64), n as f64)
    })
}

/// Expected ambiguity function from the correlation matrix:
/// `Ā[m,l] = Σ_n γ[n,(n−m) mod N] e^{−j2πln/N}`.
pub fn eaf_from_corr(g: &CorrelationMatrix) -> TfMatrix {
    let n = g.n();
    let mut planner = FftPlanner::<f64>::new();
    let fft = planner.plan_fft_forward(n);
    let mut out = TfMatrix::zeros(n);
    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    for m in 0..n {
        for nn in 0..n {
            buf[nn] = g.entry(nn, (nn + n - m) % n);
        }
        fft.process(&mut buf);
        for l in 0..n {
            out.set(m as i64, l as i64, buf[l]);
        }
    }
    out
}

/// Rihaczek spectrum from the correlation matrix:
/// `R̄[n,k] = Σ_m γ[n,(n−m) mod N] e^{−j2πkm/N}`; equals the forward
/// symplectic DFT of [`eaf_from_corr`].
pub fn rs_from_corr(g: &CorrelationMatrix) -> TfMatrix {
    let n = g.n();
    let mut planner = FftPlanner::<f64>::new();
    let fft = planner.plan_fft_forward(n);
    let mut out = TfMatrix::zeros(n);
    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    for nn in 0..n {
        for m in 0..n {
            buf[m] = g.entry(nn, (nn + n - m) % n);
        }
        fft.process(&mut buf);
        for k in 0..n {
            out.set(nn as i64, k as i64, buf[k]);
        }
    }
    out
}

/// Indicator window of the effective lag rectangle:
/// 1 on the periodized `{−M..M}×{−L..L}`, 0 elsewhere.
pub fn mvu_window(sup: &LagSupport) -> TfMatrix {
    let n = sup.n_size;
    TfMatrix::from_fn(n, |m, l| {
        if sup.contains_effective(m as i64, l as i64) {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// Time-frequency smoothing kernel of the MVU estimator:
/// `Φ[n,k] = (1/N) Σ_{|m|≤M,|l|≤L} e^{−j2π(km−nl)/N}`, i.e. the forward
/// symplectic DFT of [`mvu_window`]. Factorizes into a product of Dirichlet
/// kernels, `Φ[n,k] = D_M(k)·D_L(n)/N`.
pub fn mvu_smoothing_kernel(sup: &LagSupport) -> TfMatrix {
    symplectic_dft(&mvu_window(sup))
}

/// Dirichlet kernel `D_H(k) = Σ_{|h|≤H} e^{−j2πkh/N} = sin(π(2H+1)k/N)/sin(πk/N)`.
pub fn dirichlet(half: usize, k: i64, n: usize) -> f64 {
    let theta = std::f64::consts::PI * (k.rem_euclid(n as i64) as f64) / n as f64;
    if theta.sin().abs() < 1e-12 {
        (2 * half + 1) as f64
    } else {
        (((2 * half + 1) as f64) * theta).sin() / theta.sin()
    }
}

/// AF masked to the effective lag support:
/// `mvu_window(sup) ⊙ ambiguity_function(x)` (elementwise).
pub fn masked_af(x: &SignalVector, sup: &LagSupport) -> TfMatrix {
    assert_eq!(x.len(), sup.n_size, "signal/support grid mismatch");
    let af = ambiguity_function(x);
    apply_window(&af, sup)
}

/// Masks an already computed lag-domain grid to the effective support.
pub fn apply_window(af_like: &TfMatrix, sup: &LagSupport) -> TfMatrix {
    let n = sup.n_size;
    assert_eq!(af_like.n(), n, "grid/support mismatch");
    TfMatrix::from_fn(n, |m, l| {
        if sup.contains_effective(m as i64, l as i64) {
            af_like.get(m as i64, l as i64)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// MVU estimate of the Rihaczek spectrum:
/// `R̂[n,k] = (1/N) Σ_{|m|≤M,|l|≤L} A[m,l] e^{−j2π(km−nl)/N}`, computed as the
/// forward symplectic DFT of [`masked_af`].
pub fn mvu_estimate(x: &SignalVector, sup: &LagSupport) -> TfMatrix {
    symplectic_dft(&masked_af(x, sup))
}

/// Expectation of the MVU estimate given the true RS: the circular 2D
/// convolution `(1/N) Σ_{n′,k′} Φ[n−n′,k−k′]·rs_true[n′,k′]`, computed in the
/// lag domain (inverse transform, mask, forward transform).
pub fn expected_mvu(rs_true: &TfMatrix, sup: &LagSupport) -> TfMatrix {
    let eaf = symplectic_idft(rs_true);
    symplectic_dft(&apply_window(&eaf, sup))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_lag_support;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    pub(crate) fn random_signal(n: usize, seed: u64) -> SignalVector {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        SignalVector::new(
            (0..n)
                .map(|_| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
                .collect(),
        )
    }

    fn unit_impulse(n: usize) -> SignalVector {
        let mut s = vec![Complex64::new(0.0, 0.0); n];
        s[0] = Complex64::new(1.0, 0.0);
        SignalVector::new(s)
    }

    #[test]
    fn af_of_impulse() {
        let af = ambiguity_function(&unit_impulse(4));
        for m in 0..4 {
            for l in 0..4 {
                let expect = if m == 0 { 1.0 } else { 0.0 };
                assert!((af.get(m, l) - Complex64::new(expect, 0.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn af_of_all_ones() {
        let x = SignalVector::new(vec![Complex64::new(1.0, 0.0); 4]);
        let af = ambiguity_function(&x);
        for m in 0..4 {
            for l in 0..4 {
                let expect = if l == 0 { 4.0 } else { 0.0 };
                assert!((af.get(m, l) - Complex64::new(expect, 0.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn af_origin_is_energy() {
        for seed in 0..20 {
            let x = random_signal(16, seed);
            let af = ambiguity_function(&x);
            assert!((af.get(0, 0).re - x.energy()).abs() < 1e-10);
            assert!(af.get(0, 0).im.abs() < 1e-10);
        }
    }

    #[test]
    fn af_symmetry_identity() {
        // A*[−m,−l]·e^{−j2πml/N} = A[m,l] for every realization.
        for seed in 0..10 {
            let x = random_signal(12, seed);
            let af = ambiguity_function(&x);
            let n = 12i64;
            for m in 0..n {
                for l in 0..n {
                    let lhs = af.get(-m, -l).conj() * cis_frac(-((m * l) as f64), n as f64);
                    assert!((lhs - af.get(m, l)).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn af_scaling_is_quadratic() {
        let x = random_signal(8, 7);
        let c = Complex64::new(1.5, -0.25);
        let cx = SignalVector::new(x.samples().iter().map(|&z| c * z).collect());
        let (a, b) = (ambiguity_function(&x), ambiguity_function(&cx));
        let scaled = a.map(|z| z * c.norm_sqr());
        assert!(b.max_abs_diff(&scaled) < 1e-10);
    }

    #[test]
    fn rd_of_impulse() {
        let rd = rihaczek_distribution(&unit_impulse(4));
        for nn in 0..4 {
            for k in 0..4 {
                let expect = if nn == 0 { 1.0 } else { 0.0 };
                assert!((rd.get(nn, k) - Complex64::new(expect, 0.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn rd_row_sums_give_sample_power() {
        let x = random_signal(8, 3);
        let rd = rihaczek_distribution(&x);
        for nn in 0..8usize {
            let sum: Complex64 = (0..8).map(|k| rd.get(nn as i64, k)).sum();
            let expect = 8.0 * x.samples()[nn].norm_sqr();
            assert!((sum - Complex64::new(expect, 0.0)).norm() < 1e-9);
        }
    }

    #[test]
    fn rd_equals_dft_of_af() {
        for seed in 0..20 {
            let x = random_signal(16, seed);
            let rd = rihaczek_distribution(&x);
            let via_af = symplectic_dft(&ambiguity_function(&x));
            assert!(rd.max_abs_diff(&via_af) < 1e-10 * rd.norm().max(1.0));
        }
    }

    fn identity_corr(n: usize) -> CorrelationMatrix {
        CorrelationMatrix::new(DMatrix::identity(n, n)).unwrap()
    }

    pub(crate) fn random_psd_corr(n: usize, seed: u64) -> CorrelationMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let b = DMatrix::from_fn(n, n, |_, _| {
            Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
        });
        CorrelationMatrix::new(&b * b.adjoint()).unwrap()
    }

    #[test]
    fn eaf_of_white_noise() {
        let eaf = eaf_from_corr(&identity_corr(8));
        let mut expect = TfMatrix::zeros(8);
        expect.set(0, 0, Complex64::new(8.0, 0.0));
        assert!(eaf.max_abs_diff(&expect) < 1e-12);
    }

    #[test]
    fn eaf_of_diagonal_corr() {
        let n = 8;
        let sig: Vec<f64> = (0..n).map(|i| 0.5 + i as f64).collect();
        let g = CorrelationMatrix::new(DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                Complex64::new(sig[i], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        }))
        .unwrap();
        let eaf = eaf_from_corr(&g);
        for m in 0..n as i64 {
            for l in 0..n as i64 {
                let expect = if m == 0 {
                    (0..n)
                        .map(|nn| {
                            Complex64::new(sig[nn], 0.0)
                                * cis_frac(-((l as usize * nn) as f64), n as f64)
                        })
                        .sum()
                } else {
                    Complex64::new(0.0, 0.0)
                };
                assert!((eaf.get(m, l) - expect).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn eaf_symmetry_identity() {
        let g = random_psd_corr(10, 4);
        let eaf = eaf_from_corr(&g);
        let n = 10i64;
        for m in 0..n {
            for l in 0..n {
                let lhs = eaf.get(-m, -l).conj() * cis_frac(-((m * l) as f64), n as f64);
                assert!((lhs - eaf.get(m, l)).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn rs_of_white_noise_is_flat() {
        let rs = rs_from_corr(&identity_corr(8));
        let ones = TfMatrix::from_fn(8, |_, _| Complex64::new(1.0, 0.0));
        assert!(rs.max_abs_diff(&ones) < 1e-12);
    }

    #[test]
    fn rs_of_diagonal_corr_is_row_constant() {
        let n = 8;
        let g = CorrelationMatrix::new(DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                Complex64::new(1.0 + i as f64, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        }))
        .unwrap();
        let rs = rs_from_corr(&g);
        for nn in 0..n {
            for k in 0..n {
                let expect = Complex64::new(1.0 + nn as f64, 0.0);
                assert!((rs.get(nn as i64, k as i64) - expect).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn rs_equals_dft_of_eaf() {
        for seed in 0..5 {
            let g = random_psd_corr(16, seed);
            let rs = rs_from_corr(&g);
            let via = symplectic_dft(&eaf_from_corr(&g));
            assert!(rs.max_abs_diff(&via) < 1e-10 * rs.norm().max(1.0));
        }
    }

    #[test]
    fn corr_validation_rejects_bad_matrices() {
        let mut m = DMatrix::<Complex64>::identity(4, 4);
        m[(0, 1)] = Complex64::new(0.5, 0.0); // asymmetric
        assert!(matches!(
            CorrelationMatrix::new(m),
            Err(SpectraError::NotHermitian { .. })
        ));
        let mut m = DMatrix::<Complex64>::identity(4, 4);
        m[(2, 2)] = Complex64::new(-1.0, 0.0); // indefinite
        assert!(matches!(
            CorrelationMatrix::new(m),
            Err(SpectraError::NotPsd { .. })
        ));
    }

    #[test]
    fn window_membership_paper_config() {
        let sup = make_lag_support(512, 3, 7).unwrap();
        let w = mvu_window(&sup);
        assert_eq!(w.get(3, 7), Complex64::new(1.0, 0.0));
        assert_eq!(w.get(4, 0), Complex64::new(0.0, 0.0));
        assert_eq!(w.get(509, 505), Complex64::new(1.0, 0.0)); // (−3,−7)
        let total: Complex64 = w.as_slice().iter().sum();
        assert_eq!(total, Complex64::new(105.0, 0.0));
    }

    #[test]
    fn window_degenerate_is_delta() {
        let sup = make_lag_support(16, 0, 0).unwrap();
        let w = mvu_window(&sup);
        let mut expect = TfMatrix::zeros(16);
        expect.set(0, 0, Complex64::new(1.0, 0.0));
        assert_eq!(w, expect);
    }

    #[test]
    fn smoothing_kernel_values() {
        let sup = make_lag_support(16, 2, 3).unwrap();
        let phi = mvu_smoothing_kernel(&sup);
        let n = 16.0;
        // Origin value S/N.
        assert!((phi.get(0, 0) - Complex64::new(sup.s as f64 / n, 0.0)).norm() < 1e-12);
        // Total mass N (only the (0,0) lag survives the sum).
        let total: Complex64 = phi.as_slice().iter().sum();
        assert!((total - Complex64::new(n, 0.0)).norm() < 1e-9);
        // Dirichlet factorization.
        for nn in 0..16i64 {
            for k in 0..16i64 {
                let expect = dirichlet(sup.m_half, k, 16) * dirichlet(sup.l_half, nn, 16) / n;
                assert!((phi.get(nn, k) - Complex64::new(expect, 0.0)).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn mvu_estimate_of_impulse() {
        let sup = make_lag_support(16, 2, 3).unwrap();
        let est = mvu_estimate(&unit_impulse(16), &sup);
        // AF of the impulse is δ[m] for every l, so the estimate is
        // D_L(n)/N, independent of k.
        for nn in 0..16i64 {
            let expect = dirichlet(sup.l_half, nn, 16) / 16.0;
            for k in 0..16i64 {
                assert!((est.get(nn, k) - Complex64::new(expect, 0.0)).norm() < 1e-10);
            }
        }
        let origin = (2 * sup.l_half + 1) as f64 / 16.0;
        assert!((est.get(0, 0).re - origin).abs() < 1e-10);
    }

    #[test]
    fn masked_af_degenerate_window() {
        let x = random_signal(8, 11);
        let sup = make_lag_support(8, 0, 0).unwrap();
        let out = masked_af(&x, &sup);
        let mut expect = TfMatrix::zeros(8);
        expect.set(0, 0, Complex64::new(x.energy(), 0.0));
        assert!(out.max_abs_diff(&expect) < 1e-10);
    }

    #[test]
    fn masked_af_full_window() {
        let x = random_signal(8, 12);
        let sup = make_lag_support(8, 3, 3).unwrap();
        let af = ambiguity_function(&x);
        let out = masked_af(&x, &sup);
        for m in -4i64..4 {
            for l in -4i64..4 {
                if m.abs() <= 3 && l.abs() <= 3 {
                    assert_eq!(out.get(m, l), af.get(m, l));
                } else {
                    assert_eq!(out.get(m, l), Complex64::new(0.0, 0.0));
                }
            }
        }
    }

    #[test]
    fn mvu_equals_dft_of_masked_af() {
        let sup = make_lag_support(16, 2, 3).unwrap();
        for seed in 0..10 {
            let x = random_signal(16, seed);
            let a = mvu_estimate(&x, &sup);
            let b = symplectic_dft(&masked_af(&x, &sup));
            assert!(a.max_abs_diff(&b) < 1e-10);
        }
    }

    #[test]
    fn mvu_equals_direct_convolution_with_kernel() {
        // Independent O(N⁴) oracle: R̂ = (1/N)·Φ ⊛ R (circular 2D convolution
        // of the smoothing kernel with the Rihaczek distribution).
        let n = 16usize;
        let sup = make_lag_support(n, 2, 3).unwrap();
        let x = random_signal(n, 21);
        let rd = rihaczek_distribution(&x);
        let phi = mvu_smoothing_kernel(&sup);
        let conv = TfMatrix::from_fn(n, |nn, k| {
            let mut acc = Complex64::new(0.0, 0.0);
            for np in 0..n as i64 {
                for kp in 0..n as i64 {
                    acc += phi.get(nn as i64 - np, k as i64 - kp) * rd.get(np, kp);
                }
            }
            acc / n as f64
        });
        let est = mvu_estimate(&x, &sup);
        assert!(est.max_abs_diff(&conv) < 1e-9);
    }

    #[test]
    fn expected_mvu_preserves_flat_rs() {
        let sup = make_lag_support(16, 2, 3).unwrap();
        let flat = TfMatrix::from_fn(16, |_, _| Complex64::new(1.0, 0.0));
        assert!(expected_mvu(&flat, &sup).max_abs_diff(&flat) < 1e-10);
    }

    #[test]
    fn expected_mvu_unbiased_on_supported_eaf() {
        // A process whose EAF lives inside the effective rectangle is
        // estimated without bias.
        let n = 16usize;
        let sup = make_lag_support(n, 2, 3).unwrap();
        let mut eaf = TfMatrix::zeros(n);
        // Hermitian-symmetric EAF supported in the window.
        for (m, l) in [(0i64, 0i64), (1, 2), (-1, -2), (2, -3), (-2, 3)] {
            eaf.set(m, l, Complex64::new(0.7, 0.0));
        }
        let rs = symplectic_dft(&eaf);
        assert!(expected_mvu(&rs, &sup).max_abs_diff(&rs) < 1e-10);
    }

    #[test]
    fn expected_mvu_matches_direct_convolution() {
        let n = 12usize;
        let sup = make_lag_support(n, 1, 2).unwrap();
        let g = random_psd_corr(n, 8);
        let rs = rs_from_corr(&g);
        let phi = mvu_smoothing_kernel(&sup);
        let conv = TfMatrix::from_fn(n, |nn, k| {
            let mut acc = Complex64::new(0.0, 0.0);
            for np in 0..n as i64 {
                for kp in 0..n as i64 {
                    acc += phi.get(nn as i64 - np, k as i64 - kp) * rs.get(np, kp);
                }
            }
            acc / n as f64
        });
        assert!(expected_mvu(&rs, &sup).max_abs_diff(&conv) < 1e-9);
    }
}
