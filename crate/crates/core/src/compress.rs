//! Compression–reconstruction stage: packing of the effective lag window,
//! the structured measurement operator, basis-pursuit recovery of a
//! subsampled Rihaczek spectrum, and the compressive / symmetrized
//! Rihaczek-spectrum estimators.
//!
//! The masked ambiguity values on the extended lag window 𝒜′ (size
//! S′ = ΔM·ΔL) and the MVU estimate subsampled on the stride grid
//! (Δn, Δk) are related by a fixed S′×S′ scaled-unitary matrix `U`:
//! `U·vec{R} = vec{Aᵀ}`. Randomly sampling P rows of `U` (equivalently, P
//! lag positions) yields an underdetermined system whose ℓ1-sparsest
//! solution recovers the subsampled spectrum when it is sparse enough; a
//! final chained transform maps it back to the full N×N grid.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grid::{cis_frac, symplectic_dft, LagSupport, TfMatrix};
use crate::solver::{basis_pursuit, BpConfig, BpSolution, SolverError};
use crate::spectra::{masked_af, SignalVector};

/// Errors from the compression stage.
#[derive(Debug, Error)]
pub enum CompressError {
    /// Measurement count out of the valid range `1..=S′`.
    #[error("measurement count {p} out of range 1..={s_prime}")]
    BadMeasurementCount {
        /// Requested P.
        p: usize,
        /// Extended support size.
        s_prime: usize,
    },
    /// The ℓ1 solver failed; diagnostics are in the source error.
    #[error("basis pursuit failed: {0}")]
    Solver(#[from] SolverError),
}

/// One period of the masked ambiguity values arranged as a ΔM×ΔL matrix:
/// `A[m+1,l+1] = Â[m−M, l−L]` for `m ∈ [ΔM]`, `l ∈ [ΔL]`.
#[derive(Debug, Clone)]
pub struct PackedLagMatrix {
    a_mat: DMatrix<Complex64>,
    sup: LagSupport,
}

impl PackedLagMatrix {
    /// The ΔM×ΔL matrix.
    pub fn a_mat(&self) -> &DMatrix<Complex64> {
        &self.a_mat
    }

    /// Associated lag support.
    pub fn sup(&self) -> &LagSupport {
        &self.sup
    }

    /// Column-stacked `vec{Aᵀ}`: flat index `i = m·ΔL + l`.
    pub fn vec_a(&self) -> DVector<Complex64> {
        let (dm, dl) = (self.sup.dm, self.sup.dl);
        DVector::from_fn(dm * dl, |i, _| self.a_mat[(i / dl, i % dl)])
    }

    /// Places the packed values back on the N×N lag grid (periodized on
    /// 𝒜′, zero elsewhere).
    pub fn to_grid(&self) -> TfMatrix {
        let mut out = TfMatrix::zeros(self.sup.n_size);
        for m in 0..self.sup.dm {
            for l in 0..self.sup.dl {
                out.set(
                    m as i64 - self.sup.m_half as i64,
                    l as i64 - self.sup.l_half as i64,
                    self.a_mat[(m, l)],
                );
            }
        }
        out
    }
}

/// The MVU spectrum subsampled on the stride grid, scaled by N and arranged
/// as a ΔL×ΔM matrix: `R[p+1,q+1] = N·R̂[pΔn, qΔk]`.
#[derive(Debug, Clone)]
pub struct SubsampledRs {
    r_mat: DMatrix<Complex64>,
    sup: LagSupport,
}

impl SubsampledRs {
    /// Wraps a ΔL×ΔM matrix (e.g. a solver solution reshaped).
    pub fn new(r_mat: DMatrix<Complex64>, sup: LagSupport) -> Self {
        assert_eq!(r_mat.nrows(), sup.dl, "row count must be ΔL");
        assert_eq!(r_mat.ncols(), sup.dm, "column count must be ΔM");
        SubsampledRs { r_mat, sup }
    }

    /// Rebuilds from the column-stacked vector `vec{R}` (flat `i = q·ΔL + p`).
    pub fn from_vec(r: &DVector<Complex64>, sup: LagSupport) -> Self {
        assert_eq!(r.len(), sup.s_prime, "vector length must be S′");
        let dl = sup.dl;
        SubsampledRs {
            r_mat: DMatrix::from_fn(sup.dl, sup.dm, |p, q| r[q * dl + p]),
            sup,
        }
    }

    /// The ΔL×ΔM matrix.
    pub fn r_mat(&self) -> &DMatrix<Complex64> {
        &self.r_mat
    }

    /// Associated lag support.
    pub fn sup(&self) -> &LagSupport {
        &self.sup
    }

    /// Column-stacked `vec{R}`: flat index `i = q·ΔL + p`.
    pub fn vec_r(&self) -> DVector<Complex64> {
        let dl = self.sup.dl;
        DVector::from_fn(self.sup.s_prime, |i, _| self.r_mat[(i % dl, i / dl)])
    }
}

/// A sampled compressive-measurement instance: which lag positions were
/// drawn, the measured ambiguity values, and the seed that produced them.
/// Serializable so an experiment can be replayed bit-exactly.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CsProblem {
    /// Lag-support geometry of the instance.
    pub sup: LagSupport,
    /// Ordered distinct flat indices into `vec{Aᵀ}` (lag (m,l) ↔ `m·ΔL+l`).
    pub indices: Vec<usize>,
    /// Measured ambiguity values at the selected lags.
    pub a_p: Vec<Complex64>,
    /// Seed used for the index selection.
    pub seed: u64,
}

impl CsProblem {
    /// Number of measurements P.
    pub fn p_count(&self) -> usize {
        self.indices.len()
    }

    /// Measurement vector as a column.
    pub fn b(&self) -> DVector<Complex64> {
        DVector::from_column_slice(&self.a_p)
    }
}

/// The S′×S′ measurement basis with `U·vec{R} = vec{Aᵀ}`:
/// `U[m·ΔL+l, q·ΔL+p] = (1/S′)·e^{j2π((m−M)q/ΔM − (l−L)p/ΔL)}`.
///
/// Kronecker-structured (a ΔM-point times a ΔL-point offset DFT), orthogonal
/// up to a factor (`UᴴU = (1/S′)·I`) and equimodular (`|U_ij| = 1/S′`).
pub fn build_u(sup: &LagSupport) -> DMatrix<Complex64> {
    let (dm, dl) = (sup.dm as f64, sup.dl as f64);
    let (mh, lh) = (sup.m_half as f64, sup.l_half as f64);
    let scale = 1.0 / sup.s_prime as f64;
    DMatrix::from_fn(sup.s_prime, sup.s_prime, |row, col| {
        let (m, l) = ((row / sup.dl) as f64, (row % sup.dl) as f64);
        let (q, p) = ((col / sup.dl) as f64, (col % sup.dl) as f64);
        cis_frac((m - mh) * q / dm - (l - lh) * p / dl, 1.0) * scale
    })
}

/// Packs one period of a masked lag grid into the ΔM×ΔL matrix form.
pub fn pack_lags(masked: &TfMatrix, sup: &LagSupport) -> PackedLagMatrix {
    assert_eq!(masked.n(), sup.n_size, "grid/support mismatch");
    let a_mat = DMatrix::from_fn(sup.dm, sup.dl, |m, l| {
        masked.get(m as i64 - sup.m_half as i64, l as i64 - sup.l_half as i64)
    });
    PackedLagMatrix {
        a_mat,
        sup: *sup,
    }
}

/// Subsampled (scaled) MVU spectrum of a signal:
/// `R[p+1,q+1] = Σ_{|m|≤M,|l|≤L} A[m,l] e^{−j2π(qm/ΔM − pl/ΔL)}`.
pub fn subsample_rs(x: &SignalVector, sup: &LagSupport) -> SubsampledRs {
    let masked = masked_af(x, sup);
    subsample_from_masked(&masked, sup)
}

/// Same as [`subsample_rs`] but starting from an already masked lag grid
/// (e.g. an exact expected ambiguity function for analysis paths).
pub fn subsample_from_masked(masked: &TfMatrix, sup: &LagSupport) -> SubsampledRs {
    let (dm, dl) = (sup.dm as f64, sup.dl as f64);
    let lags: Vec<(i64, i64, Complex64)> = sup
        .effective_lags()
        .map(|(m, l)| (m, l, masked.get(m, l)))
        .collect();
    let r_mat = DMatrix::from_fn(sup.dl, sup.dm, |p, q| {
        let mut acc = Complex64::new(0.0, 0.0);
        for &(m, l, v) in &lags {
            acc += v * cis_frac(-(q as f64 * m as f64 / dm - p as f64 * l as f64 / dl), 1.0);
        }
        acc
    });
    SubsampledRs { r_mat, sup: *sup }
}

/// Draws a seeded size-P measurement instance: a uniformly random size-P
/// subset of the S′ extended-window lag positions (Fisher–Yates, without
/// replacement), with the masked ambiguity value at each selected lag.
pub fn sample_measurements(
    x: &SignalVector,
    sup: &LagSupport,
    p_count: usize,
    seed: u64,
) -> Result<CsProblem, CompressError> {
    if p_count == 0 || p_count > sup.s_prime {
        return Err(CompressError::BadMeasurementCount {
            p: p_count,
            s_prime: sup.s_prime,
        });
    }
    let a = pack_lags(&masked_af(x, sup), sup).vec_a();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut positions: Vec<usize> = (0..sup.s_prime).collect();
    // Partial Fisher–Yates: after i swaps the first i entries are a uniform
    // without-replacement sample.
    for i in 0..p_count {
        let j = rng.gen_range(i..sup.s_prime);
        positions.swap(i, j);
    }
    positions.truncate(p_count);
    let a_p = positions.iter().map(|&i| a[i]).collect();
    Ok(CsProblem {
        sup: *sup,
        indices: positions,
        a_p,
        seed,
    })
}

/// Materializes the P×S′ measurement matrix: the selected rows of
/// [`build_u`], in selection order.
pub fn measurement_matrix(prob: &CsProblem) -> DMatrix<Complex64> {
    let u = build_u(&prob.sup);
    DMatrix::from_fn(prob.indices.len(), prob.sup.s_prime, |i, j| {
        u[(prob.indices[i], j)]
    })
}

/// Expands a subsampled spectrum back to ambiguity values on the extended
/// lag window, placed on the N×N grid (zero off 𝒜′):
/// `Â[m−M, l−L] = (1/S′) Σ_{p,q} R[p+1,q+1] e^{j2π((m−M)q/ΔM − (l−L)p/ΔL)}`.
pub fn unpack_to_grid(r_hat: &SubsampledRs) -> TfMatrix {
    let sup = r_hat.sup;
    let (dm, dl) = (sup.dm as f64, sup.dl as f64);
    let scale = 1.0 / sup.s_prime as f64;
    let mut out = TfMatrix::zeros(sup.n_size);
    for m in 0..sup.dm {
        let mm = m as i64 - sup.m_half as i64;
        for l in 0..sup.dl {
            let ll = l as i64 - sup.l_half as i64;
            let mut acc = Complex64::new(0.0, 0.0);
            for p in 0..sup.dl {
                for q in 0..sup.dm {
                    acc += r_hat.r_mat[(p, q)]
                        * cis_frac(
                            mm as f64 * q as f64 / dm - ll as f64 * p as f64 / dl,
                            1.0,
                        );
                }
            }
            out.set(mm, ll, acc * scale);
        }
    }
    out
}

/// Maps a (recovered) subsampled spectrum to the full N×N grid: expansion to
/// lag values on 𝒜′ followed by the forward symplectic DFT — two chained 2D
/// transform stages.
pub fn reconstruct_rs(r_hat: &SubsampledRs) -> TfMatrix {
    symplectic_dft(&unpack_to_grid(r_hat))
}

/// Symmetrization projector onto the manifold of valid ambiguity functions:
/// `out[m,l] = ½·(in[m,l] + in*[−m,−l]·e^{−j2πml/N})` with the flip taken on
/// the N-periodic grid.
pub fn symmetrize_eaf(a_cs: &TfMatrix) -> TfMatrix {
    let n = a_cs.n() as i64;
    TfMatrix::from_fn(a_cs.n(), |m, l| {
        let (m, l) = (m as i64, l as i64);
        0.5 * (a_cs.get(m, l)
            + a_cs.get(-m, -l).conj() * cis_frac(-((m * l) as f64), n as f64))
    })
}

/// Full compressive pipeline on a signal: sample P lag measurements, solve
/// basis pursuit for the subsampled spectrum, reconstruct the N×N estimate.
/// Returns the sampled problem, the solver output, and the recovered
/// subsampled spectrum alongside the estimate, so callers can derive the
/// symmetrized variant or archive the instance without re-solving.
pub fn compressive_solution(
    x: &SignalVector,
    sup: &LagSupport,
    p_count: usize,
    seed: u64,
    solver_cfg: &BpConfig,
) -> Result<(CsProblem, BpSolution, SubsampledRs), CompressError> {
    let prob = sample_measurements(x, sup, p_count, seed)?;
    let m = measurement_matrix(&prob);
    let sol = basis_pursuit(&m, &prob.b(), solver_cfg)?;
    let r_hat = SubsampledRs::from_vec(&sol.z_hat, *sup);
    Ok((prob, sol, r_hat))
}

/// Compressive Rihaczek-spectrum estimate `R̂_CS`.
pub fn compressive_estimate(
    x: &SignalVector,
    sup: &LagSupport,
    p_count: usize,
    seed: u64,
    solver_cfg: &BpConfig,
) -> Result<TfMatrix, CompressError> {
    let (_, _, r_hat) = compressive_solution(x, sup, p_count, seed, solver_cfg)?;
    Ok(reconstruct_rs(&r_hat))
}

/// Symmetrized compressive estimate `R̂ˢ_CS`: the recovered ambiguity values
/// are projected onto the ambiguity-symmetry manifold before the final
/// transform, which never increases the ℓ2 error against any symmetric
/// target (in particular the true spectrum), realization by realization.
pub fn symmetrized_compressive_estimate(
    x: &SignalVector,
    sup: &LagSupport,
    p_count: usize,
    seed: u64,
    solver_cfg: &BpConfig,
) -> Result<TfMatrix, CompressError> {
    let (_, _, r_hat) = compressive_solution(x, sup, p_count, seed, solver_cfg)?;
    Ok(symmetrized_from_subsampled(&r_hat))
}

/// Symmetrized estimate from an already recovered subsampled spectrum.
pub fn symmetrized_from_subsampled(r_hat: &SubsampledRs) -> TfMatrix {
    symplectic_dft(&symmetrize_eaf(&unpack_to_grid(r_hat)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_lag_support;
    use crate::spectra::{dirichlet, mvu_estimate};

    fn random_signal(n: usize, seed: u64) -> SignalVector {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        SignalVector::new(
            (0..n)
                .map(|_| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
                .collect(),
        )
    }

    #[test]
    fn u_is_scaled_orthogonal_and_equimodular() {
        // Paper-scale OFDM geometry: S′ = 128.
        let sup = make_lag_support(512, 3, 7).unwrap();
        let u = build_u(&sup);
        let gram = u.adjoint() * &u;
        let expect = DMatrix::<Complex64>::identity(128, 128) / Complex64::new(128.0, 0.0);
        assert!((gram - expect).iter().map(|z| z.norm()).fold(0.0, f64::max) < 1e-12);
        let scale = 1.0 / 128.0;
        for z in u.iter() {
            assert!((z.norm() - scale).abs() < 1e-14);
        }
    }

    #[test]
    fn u_degenerate_is_scalar_one() {
        let sup = make_lag_support(16, 0, 0).unwrap();
        let u = build_u(&sup);
        assert_eq!(u.shape(), (1, 1));
        assert!((u[(0, 0)] - Complex64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn pack_places_delta_at_window_origin() {
        let sup = make_lag_support(16, 1, 2).unwrap();
        let mut grid = TfMatrix::zeros(16);
        let c = Complex64::new(0.3, -0.9);
        grid.set(0, 0, c);
        let packed = pack_lags(&grid, &sup);
        for m in 0..sup.dm {
            for l in 0..sup.dl {
                let expect = if (m, l) == (sup.m_half, sup.l_half) {
                    c
                } else {
                    Complex64::new(0.0, 0.0)
                };
                assert_eq!(packed.a_mat()[(m, l)], expect);
            }
        }
    }

    #[test]
    fn pack_round_trips_through_grid() {
        let sup = make_lag_support(16, 1, 2).unwrap();
        let x = random_signal(16, 5);
        let masked = masked_af(&x, &sup);
        let grid = pack_lags(&masked, &sup).to_grid();
        assert!(grid.max_abs_diff(&masked) < 1e-14);
        // Zero outside the extended window.
        for m in -8i64..8 {
            for l in -8i64..8 {
                if !sup.contains_extended(m, l) {
                    assert_eq!(grid.get(m, l), Complex64::new(0.0, 0.0));
                }
            }
        }
    }

    #[test]
    fn packed_entries_outside_effective_window_are_zero() {
        let sup = make_lag_support(16, 1, 2).unwrap();
        let x = random_signal(16, 6);
        let packed = pack_lags(&masked_af(&x, &sup), &sup);
        for m in 0..sup.dm {
            for l in 0..sup.dl {
                if m >= 2 * sup.m_half + 1 || l >= 2 * sup.l_half + 1 {
                    assert_eq!(packed.a_mat()[(m, l)], Complex64::new(0.0, 0.0));
                }
            }
        }
    }

    #[test]
    fn subsample_of_impulse_gives_dirichlet_rows() {
        let sup = make_lag_support(16, 1, 1).unwrap();
        let mut s = vec![Complex64::new(0.0, 0.0); 16];
        s[0] = Complex64::new(1.0, 0.0);
        let r = subsample_rs(&SignalVector::new(s), &sup);
        for p in 0..sup.dl {
            for q in 0..sup.dm {
                // AF = δ[m] on all l, so the (m,l) sum collapses to a
                // Dirichlet sum over l at frequency p/ΔL.
                let expect = dirichlet(sup.l_half, (p * (16 / sup.dl)) as i64, 16);
                assert!(
                    (r.r_mat()[(p, q)] - Complex64::new(expect, 0.0)).norm() < 1e-10,
                    "entry ({p},{q})"
                );
            }
        }
    }

    #[test]
    fn subsample_matches_mvu_on_stride_grid() {
        let sup = make_lag_support(32, 2, 3).unwrap();
        for seed in 0..5 {
            let x = random_signal(32, seed);
            let r = subsample_rs(&x, &sup);
            let est = mvu_estimate(&x, &sup);
            for p in 0..sup.dl {
                for q in 0..sup.dm {
                    let expect = est.get((p * sup.dn) as i64, (q * sup.dk) as i64) * 32.0;
                    assert!((r.r_mat()[(p, q)] - expect).norm() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn u_times_r_equals_a() {
        for (n, mh, lh) in [(32usize, 2usize, 3usize), (16, 1, 1), (64, 3, 7)] {
            let sup = make_lag_support(n, mh, lh).unwrap();
            let x = random_signal(n, (n + mh) as u64);
            let u = build_u(&sup);
            let r = subsample_rs(&x, &sup).vec_r();
            let a = pack_lags(&masked_af(&x, &sup), &sup).vec_a();
            let resid = (u * r - &a).norm();
            assert!(resid < 1e-10 * a.norm().max(1.0), "residual {resid}");
        }
    }

    #[test]
    fn vec_round_trip() {
        let sup = make_lag_support(32, 2, 3).unwrap();
        let x = random_signal(32, 9);
        let r = subsample_rs(&x, &sup);
        let back = SubsampledRs::from_vec(&r.vec_r(), sup);
        assert_eq!(r.r_mat(), back.r_mat());
    }

    #[test]
    fn sampling_is_deterministic_and_in_range() {
        let sup = make_lag_support(32, 2, 3).unwrap();
        let x = random_signal(32, 1);
        let a = sample_measurements(&x, &sup, 10, 42).unwrap();
        let b = sample_measurements(&x, &sup, 10, 42).unwrap();
        assert_eq!(a.indices, b.indices);
        assert_eq!(a.a_p, b.a_p);
        let mut sorted = a.indices.clone();
        sorted.sort_unstable();
        sorted.dedup();
        assert_eq!(sorted.len(), 10, "indices must be distinct");
        assert!(sorted.iter().all(|&i| i < sup.s_prime));
    }

    #[test]
    fn full_sampling_is_permutation_of_a() {
        let sup = make_lag_support(32, 2, 3).unwrap();
        let x = random_signal(32, 2);
        let prob = sample_measurements(&x, &sup, sup.s_prime, 7).unwrap();
        let mut idx = prob.indices.clone();
        idx.sort_unstable();
        assert_eq!(idx, (0..sup.s_prime).collect::<Vec<_>>());
        let a = pack_lags(&masked_af(&x, &sup), &sup).vec_a();
        for (i, &pos) in prob.indices.iter().enumerate() {
            assert_eq!(prob.a_p[i], a[pos]);
        }
    }

    #[test]
    fn measurements_outside_effective_support_are_zero() {
        let sup = make_lag_support(32, 2, 3).unwrap();
        let x = random_signal(32, 3);
        let prob = sample_measurements(&x, &sup, sup.s_prime, 11).unwrap();
        for (i, &pos) in prob.indices.iter().enumerate() {
            let (m, l) = (pos / sup.dl, pos % sup.dl);
            let inside = m < 2 * sup.m_half + 1 && l < 2 * sup.l_half + 1;
            if !inside {
                assert_eq!(prob.a_p[i], Complex64::new(0.0, 0.0));
            }
        }
    }

    #[test]
    fn measurement_count_bounds_enforced() {
        let sup = make_lag_support(32, 2, 3).unwrap();
        let x = random_signal(32, 4);
        assert!(matches!(
            sample_measurements(&x, &sup, 0, 0),
            Err(CompressError::BadMeasurementCount { .. })
        ));
        assert!(matches!(
            sample_measurements(&x, &sup, sup.s_prime + 1, 0),
            Err(CompressError::BadMeasurementCount { .. })
        ));
    }

    #[test]
    fn measurement_matrix_consistency() {
        let sup = make_lag_support(32, 2, 3).unwrap();
        let x = random_signal(32, 8);
        let prob = sample_measurements(&x, &sup, 12, 13).unwrap();
        let m = measurement_matrix(&prob);
        let r = subsample_rs(&x, &sup).vec_r();
        let resid = (&m * r - prob.b()).norm();
        assert!(resid < 1e-10 * prob.b().norm().max(1.0));
        let scale = 1.0 / sup.s_prime as f64;
        for z in m.iter() {
            assert!((z.norm() - scale).abs() < 1e-14);
        }
    }

    #[test]
    fn reconstruct_inverts_subsampling() {
        let sup = make_lag_support(32, 2, 3).unwrap();
        for seed in 0..5 {
            let x = random_signal(32, 40 + seed);
            let rec = reconstruct_rs(&subsample_rs(&x, &sup));
            let est = mvu_estimate(&x, &sup);
            assert!(rec.max_abs_diff(&est) < 1e-9);
        }
    }

    #[test]
    fn reconstruct_zero_and_linearity() {
        let sup = make_lag_support(16, 1, 2).unwrap();
        let zero = SubsampledRs::new(DMatrix::zeros(sup.dl, sup.dm), sup);
        assert_eq!(reconstruct_rs(&zero).norm(), 0.0);

        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let rand_r = |rng: &mut ChaCha8Rng| {
            SubsampledRs::new(
                DMatrix::from_fn(sup.dl, sup.dm, |_, _| {
                    Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
                }),
                sup,
            )
        };
        let (ra, rb) = (rand_r(&mut rng), rand_r(&mut rng));
        let (ca, cb) = (Complex64::new(0.7, -0.2), Complex64::new(-1.1, 0.5));
        let combo = SubsampledRs::new(ra.r_mat() * ca + rb.r_mat() * cb, sup);
        let lhs = reconstruct_rs(&combo);
        let (fa, fb) = (reconstruct_rs(&ra), reconstruct_rs(&rb));
        let rhs = TfMatrix::from_fn(16, |i, j| {
            ca * fa.get(i as i64, j as i64) + cb * fb.get(i as i64, j as i64)
        });
        assert!(lhs.max_abs_diff(&rhs) < 1e-12);
    }

    #[test]
    fn symmetrize_fixes_exact_afs_and_is_idempotent() {
        let x = random_signal(16, 50);
        let af = crate::spectra::ambiguity_function(&x);
        assert!(symmetrize_eaf(&af).max_abs_diff(&af) < 1e-10);

        let mut rng = ChaCha8Rng::seed_from_u64(51);
        let arbitrary = TfMatrix::from_fn(16, |_, _| {
            Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
        });
        let once = symmetrize_eaf(&arbitrary);
        let twice = symmetrize_eaf(&once);
        assert!(twice.max_abs_diff(&once) < 1e-12);
    }

    #[test]
    fn symmetrize_output_satisfies_symmetry_identity() {
        for seed in 0..20 {
            let mut rng = ChaCha8Rng::seed_from_u64(60 + seed);
            let arbitrary = TfMatrix::from_fn(12, |_, _| {
                Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
            });
            let s = symmetrize_eaf(&arbitrary);
            for m in 0..12i64 {
                for l in 0..12i64 {
                    let lhs = s.get(-m, -l).conj() * cis_frac(-((m * l) as f64), 12.0);
                    assert!((lhs - s.get(m, l)).norm() < 1e-13);
                }
            }
        }
    }

    #[test]
    fn noncompressive_estimates_collapse_to_mvu() {
        let sup = make_lag_support(32, 2, 3).unwrap();
        let x = random_signal(32, 70);
        let cfg = BpConfig::default();
        let mvu = mvu_estimate(&x, &sup);
        let cs = compressive_estimate(&x, &sup, sup.s_prime, 123, &cfg).unwrap();
        let sym = symmetrized_compressive_estimate(&x, &sup, sup.s_prime, 123, &cfg).unwrap();
        assert!(cs.sub(&mvu).norm() / mvu.norm() < 1e-6);
        assert!(sym.sub(&mvu).norm() / mvu.norm() < 1e-6);
    }

    #[test]
    fn symmetrized_two_path_oracle() {
        // Production FFT path vs literal O(N⁴) evaluation of the same
        // definition (symmetrize on the periodic grid, then transform).
        let sup = make_lag_support(16, 1, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(81);
        let r_hat = SubsampledRs::new(
            DMatrix::from_fn(sup.dl, sup.dm, |_, _| {
                Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
            }),
            sup,
        );
        let fast = symmetrized_from_subsampled(&r_hat);
        let a_sym = symmetrize_eaf(&unpack_to_grid(&r_hat));
        let n = 16usize;
        let slow = TfMatrix::from_fn(n, |nn, k| {
            let mut acc = Complex64::new(0.0, 0.0);
            for m in 0..n {
                for l in 0..n {
                    acc += a_sym.get(m as i64, l as i64)
                        * cis_frac(-((k * m) as f64) + (nn * l) as f64, n as f64);
                }
            }
            acc / n as f64
        });
        assert!(fast.max_abs_diff(&slow) < 1e-10);
    }

    #[test]
    fn symmetrization_never_increases_error_to_symmetric_target() {
        // Pathwise inequality against an arbitrary symmetric target.
        let sup = make_lag_support(16, 1, 2).unwrap();
        for seed in 0..20 {
            let mut rng = ChaCha8Rng::seed_from_u64(200 + seed);
            let r_hat = SubsampledRs::new(
                DMatrix::from_fn(sup.dl, sup.dm, |_, _| {
                    Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
                }),
                sup,
            );
            let target_raw = TfMatrix::from_fn(16, |_, _| {
                Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
            });
            let target = symplectic_dft(&symmetrize_eaf(&target_raw));
            let plain = reconstruct_rs(&r_hat);
            let sym = symmetrized_from_subsampled(&r_hat);
            let e_plain = plain.sub(&target).norm();
            let e_sym = sym.sub(&target).norm();
            assert!(
                e_sym <= e_plain + 1e-9,
                "seed {seed}: {e_sym} > {e_plain}"
            );
        }
    }

    #[test]
    fn cs_problem_json_round_trip() {
        let sup = make_lag_support(32, 2, 3).unwrap();
        let x = random_signal(32, 90);
        let prob = sample_measurements(&x, &sup, 9, 77).unwrap();
        let json = serde_json::to_string(&prob).unwrap();
        let back: CsProblem = serde_json::from_str(&json).unwrap();
        assert_eq!(prob.indices, back.indices);
        assert_eq!(prob.seed, back.seed);
        assert_eq!(prob.sup, back.sup);
        for (a, b) in prob.a_p.iter().zip(&back.a_p) {
            assert_eq!(a.re.to_bits(), b.re.to_bits());
            assert_eq!(a.im.to_bits(), b.im.to_bits());
        }
    }
}
