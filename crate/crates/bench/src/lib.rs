//! Benchmark-only crate; shared helpers for the criterion benches.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tfrs_core::{SignalVector, TfMatrix};

/// Deterministic dense complex grid for transform benches.
pub fn random_grid(n: usize, seed: u64) -> TfMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    TfMatrix::from_fn(n, |_, _| {
        Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
    })
}

/// Deterministic complex signal for estimator benches.
pub fn random_signal(n: usize, seed: u64) -> SignalVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    SignalVector::new(
        (0..n)
            .map(|_| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
            .collect(),
    )
}
